//! Feasibility checking.
//!
//! Two points are M-connected when a rectilinear path through the point set
//! has length equal to their l1 distance. Such a path never leaves the
//! rectangle spanned by its ends and moves weakly towards the target in both
//! coordinates, so connectivity is reachability in a directed graph whose
//! arcs go to the nearest aligned point in the two directions facing the
//! target.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};

use crate::error::{GmcError, Result};
use crate::model::{Demand, Instance, Pt, Rect, Solution};

const NONE: u32 = u32::MAX;

/// Nearest-neighbour structure over a point set for repeated connectivity queries.
pub struct Connectivity {
    pts: Vec<Pt>,
    index: HashMap<Pt, u32>,
    up: Vec<u32>,
    down: Vec<u32>,
    right: Vec<u32>,
    left: Vec<u32>,
    scratch: RefCell<Scratch>,
}

struct Scratch {
    seen: Vec<u32>,
    stamp: u32,
    stack: Vec<u32>,
}

impl Connectivity {
    pub fn new(points: impl IntoIterator<Item = Pt>) -> Self {
        let mut pts: Vec<Pt> = points.into_iter().collect();
        pts.sort_unstable();
        pts.dedup();
        let n = pts.len();
        let index = pts
            .iter()
            .enumerate()
            .map(|(i, p)| (*p, i as u32))
            .collect();

        let mut up = vec![NONE; n];
        let mut down = vec![NONE; n];
        // `pts` is sorted by (x, y): column neighbours are adjacent entries.
        for i in 1..n {
            if pts[i - 1].x == pts[i].x {
                up[i - 1] = i as u32;
                down[i] = (i - 1) as u32;
            }
        }
        let mut by_row: Vec<u32> = (0..n as u32).collect();
        by_row.sort_unstable_by_key(|&i| (pts[i as usize].y, pts[i as usize].x));
        let mut right = vec![NONE; n];
        let mut left = vec![NONE; n];
        for w in by_row.windows(2) {
            let (a, b) = (w[0] as usize, w[1] as usize);
            if pts[a].y == pts[b].y {
                right[a] = b as u32;
                left[b] = a as u32;
            }
        }
        Connectivity {
            pts,
            index,
            up,
            down,
            right,
            left,
            scratch: RefCell::new(Scratch {
                seen: vec![0; n],
                stamp: 0,
                stack: Vec::new(),
            }),
        }
    }

    pub fn contains(&self, p: Pt) -> bool {
        self.index.contains_key(&p)
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    /// Whether `p` and `q` are M-connected. Points outside the set are never connected.
    pub fn connected(&self, p: Pt, q: Pt) -> bool {
        let (Some(&s), Some(&t)) = (self.index.get(&p), self.index.get(&q)) else {
            return false;
        };
        if s == t || p.aligned(&q) {
            return true;
        }
        let horiz = if q.x > p.x { &self.right } else { &self.left };
        let vert = if q.y > p.y { &self.up } else { &self.down };
        let rect = Rect::spanned(p, q);

        let mut scratch = self.scratch.borrow_mut();
        let Scratch { seen, stamp, stack } = &mut *scratch;
        *stamp = stamp.wrapping_add(1);
        if *stamp == 0 {
            seen.iter_mut().for_each(|s| *s = 0);
            *stamp = 1;
        }
        stack.clear();
        stack.push(s);
        seen[s as usize] = *stamp;
        while let Some(u) = stack.pop() {
            for next in [horiz[u as usize], vert[u as usize]] {
                if next == NONE || seen[next as usize] == *stamp {
                    continue;
                }
                if next == t {
                    return true;
                }
                if rect.contains(self.pts[next as usize]) {
                    seen[next as usize] = *stamp;
                    stack.push(next);
                }
            }
        }
        false
    }

    /// One monotone path from `p` to `q`, if any, listing every visited point.
    pub fn witness_path(&self, p: Pt, q: Pt) -> Option<Vec<Pt>> {
        let (&s, &t) = (self.index.get(&p)?, self.index.get(&q)?);
        if p.aligned(&q) {
            return Some(vec![p, q]);
        }
        let horiz = if q.x > p.x { &self.right } else { &self.left };
        let vert = if q.y > p.y { &self.up } else { &self.down };
        let rect = Rect::spanned(p, q);
        let mut parent: HashMap<u32, u32> = HashMap::new();
        let mut stack = vec![s];
        parent.insert(s, s);
        while let Some(u) = stack.pop() {
            if u == t {
                let mut path = vec![self.pts[t as usize]];
                let mut cur = t;
                while cur != s {
                    cur = parent[&cur];
                    path.push(self.pts[cur as usize]);
                }
                path.reverse();
                return Some(path);
            }
            for next in [horiz[u as usize], vert[u as usize]] {
                if next != NONE
                    && !parent.contains_key(&next)
                    && rect.contains(self.pts[next as usize])
                {
                    parent.insert(next, u);
                    stack.push(next);
                }
            }
        }
        None
    }
}

/// Whether `p` and `q` are M-connected within `points`.
pub fn m_connected(points: &[Pt], p: Pt, q: Pt) -> Result<bool> {
    let conn = Connectivity::new(points.iter().copied());
    for e in [p, q] {
        if !conn.contains(e) {
            return Err(GmcError::UnknownPoint(e.to_string()));
        }
    }
    Ok(conn.connected(p, q))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub feasible: bool,
    pub violated: Vec<Demand>,
}

/// Checks every demand of `inst` over the input points plus `sol`.
pub fn verify_solution(inst: &Instance, sol: &Solution) -> VerifyReport {
    let conn = Connectivity::new(inst.points.iter().map(|p| p.pos).chain(sol.aux.iter().copied()));
    let violated: Vec<Demand> = inst
        .demands
        .iter()
        .filter(|d| {
            let (p, q) = inst.ends(d);
            !conn.connected(p, q)
        })
        .copied()
        .collect();
    VerifyReport {
        feasible: violated.is_empty(),
        violated,
    }
}

/// Whether every unaligned pair's closed rectangle holds a third point of the set.
/// Aligned pairs are vacuously satisfied.
pub fn is_arboreally_satisfied(points: &[Pt]) -> bool {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    // A pair is satisfied iff some point other than the pair lies in the closed
    // rectangle. Sorting by x lets us only scan the columns in between.
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (p, q) = (pts[i], pts[j]);
            if p.aligned(&q) {
                continue;
            }
            let r = Rect::spanned(p, q);
            let satisfied = pts[i + 1..j].iter().any(|c| r.contains(*c))
                || pts[..i].iter().rev().take_while(|c| c.x == p.x).any(|c| r.contains(*c))
                || pts[j + 1..].iter().take_while(|c| c.x == q.x).any(|c| r.contains(*c));
            if !satisfied {
                return false;
            }
        }
    }
    true
}

/// Arboreal satisfaction for a point set with no shared rows or columns.
pub fn arboreally_satisfied(points: &[Pt]) -> Result<bool> {
    let mut xs = HashSet::new();
    let mut ys = HashSet::new();
    for p in points {
        if !xs.insert(p.x) || !ys.insert(p.y) {
            return Err(GmcError::InvalidArgument(format!(
                "point {p} shares a row or column with another point"
            )));
        }
    }
    Ok(is_arboreally_satisfied(points))
}

/// A vertical cut segment in scaled units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cut {
    pub x: i64,
    pub ylo: i64,
    pub yhi: i64,
}

impl Cut {
    /// Whether the segment meets the open interior of `r`.
    pub fn hits_interior(&self, r: &Rect) -> bool {
        r.xlo < self.x && self.x < r.xhi && self.ylo < r.yhi && self.yhi > r.ylo
    }

    /// Whether the segment lies strictly between the sides of `r` and spans it vertically.
    pub fn separates(&self, r: &Rect) -> bool {
        r.xlo < self.x && self.x < r.xhi && self.ylo <= r.ylo && self.yhi >= r.yhi
    }
}

/// An ordered demand subset with one cut per demand, witnessing vertical separability.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VsCertificate {
    pub order: Vec<Demand>,
    pub cuts: Vec<Cut>,
}

impl VsCertificate {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Checks that each cut spans its rectangle from inside and avoids the
/// interiors of all later rectangles. Touching boundaries is allowed.
pub fn verify_vs_certificate(inst: &Instance, cert: &VsCertificate) -> Result<bool> {
    if cert.cuts.iter().any(|c| c.ylo >= c.yhi) {
        return Err(GmcError::MalformedSegment);
    }
    let known: HashSet<&Demand> = inst.demands.iter().collect();
    if let Some(d) = cert.order.iter().find(|d| !known.contains(d)) {
        return Err(GmcError::InvalidArgument(format!(
            "certificate demand ({}, {}) is not in the instance",
            d.a, d.b
        )));
    }
    if cert.order.len() != cert.cuts.len() {
        return Ok(false);
    }
    let distinct: HashSet<&Demand> = cert.order.iter().collect();
    if distinct.len() != cert.order.len() {
        return Ok(false);
    }
    let rects: Vec<Rect> = cert.order.iter().map(|d| inst.rect(d)).collect();
    for (i, cut) in cert.cuts.iter().enumerate() {
        if !cut.separates(&rects[i]) {
            return Ok(false);
        }
        if rects[i + 1..].iter().any(|r| cut.hits_interior(r)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Point;

    fn pt(x: i64, y: i64) -> Pt {
        Pt::from_input(x, y).unwrap()
    }

    /// Enumerates all monotone staircase paths through grid points of the set.
    fn brute_connected(points: &[Pt], p: Pt, q: Pt) -> bool {
        if p == q {
            return true;
        }
        let r = Rect::spanned(p, q);
        let sx = (q.x - p.x).signum();
        let sy = (q.y - p.y).signum();
        points.iter().any(|&n| {
            n != p
                && r.contains(n)
                && n.aligned(&p)
                && ((n.x - p.x).signum() == sx || n.x == p.x)
                && ((n.y - p.y).signum() == sy || n.y == p.y)
                && brute_connected(points, n, q)
        })
    }

    #[test]
    fn aligned_pair_is_connected() {
        let pts = [pt(0, 0), pt(0, 6)];
        assert!(m_connected(&pts, pts[0], pts[1]).unwrap());
    }

    #[test]
    fn single_bend_through_corner() {
        let pts = [pt(0, 0), pt(4, 4), pt(0, 4)];
        assert!(m_connected(&pts, pts[0], pts[1]).unwrap());
    }

    #[test]
    fn point_outside_rectangle_does_not_help() {
        let pts = [pt(0, 0), pt(4, 4), pt(2, 6)];
        assert!(!brute_connected(&pts, pts[0], pts[1]));
        assert!(!m_connected(&pts, pts[0], pts[1]).unwrap());
    }

    #[test]
    fn unknown_endpoint_is_an_error() {
        let pts = [pt(0, 0)];
        assert!(m_connected(&pts, pts[0], pt(1, 1)).is_err());
    }

    #[test]
    fn descending_pairs_work_both_ways() {
        let pts = [pt(0, 4), pt(4, 0), pt(4, 4)];
        assert!(m_connected(&pts, pts[0], pts[1]).unwrap());
        assert!(m_connected(&pts, pts[1], pts[0]).unwrap());
    }

    fn fig1_instance() -> Instance {
        // p0..p3 zig-zag; demands p0-p2, p0-p3, p1-p2, p1-p3.
        let points = vec![
            Point::new("a", pt(0, 2)),
            Point::new("b", pt(1, 0)),
            Point::new("c", pt(3, 3)),
            Point::new("d", pt(4, 1)),
        ];
        Instance::explicit(points, vec![(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
    }

    #[test]
    fn figure_style_instance() {
        let inst = fig1_instance();
        let sol = Solution::new(vec![pt(1, 1), pt(1, 2), pt(3, 2)]);
        let rep = verify_solution(&inst, &sol);
        assert!(rep.feasible, "{:?}", rep.violated);
        let conn = Connectivity::new(inst.positions().into_iter().chain(sol.aux.iter().copied()));
        assert!(conn.connected(inst.pos(1), inst.pos(2)));
        for drop in 0..3 {
            let mut aux = sol.aux.clone();
            aux.remove(drop);
            assert!(!verify_solution(&inst, &Solution::new(aux)).feasible);
        }
    }

    #[test]
    fn empty_everything_is_feasible() {
        let inst = Instance::explicit(vec![], vec![]).unwrap();
        assert!(verify_solution(&inst, &Solution::default()).feasible);
    }

    #[test]
    fn lone_demand_without_help_is_violated() {
        let inst = Instance::explicit(
            vec![Point::new("p", pt(0, 0)), Point::new("q", pt(2, 3))],
            vec![(0, 1)],
        )
        .unwrap();
        let rep = verify_solution(&inst, &Solution::default());
        assert!(!rep.feasible);
        assert_eq!(rep.violated, inst.demands);
    }

    #[test]
    fn arboreal_examples() {
        assert!(!arboreally_satisfied(&[pt(1, 1), pt(2, 2), pt(3, 3)]).unwrap());
        assert!(arboreally_satisfied(&[pt(1, 1), pt(2, 2), pt(1, 2)]).is_err());
        assert!(is_arboreally_satisfied(&[pt(1, 1), pt(2, 2), pt(1, 2)]));
        assert!(!arboreally_satisfied(&[pt(1, 2), pt(2, 1)]).unwrap());
        assert!(arboreally_satisfied(&[pt(5, 5)]).unwrap());
        assert!(arboreally_satisfied(&[pt(1, 1), pt(1, 2)]).is_err());
    }

    #[test]
    fn witness_path_is_monotone() {
        let pts = [pt(0, 0), pt(0, 2), pt(3, 2), pt(3, 5)];
        let conn = Connectivity::new(pts);
        let path = conn.witness_path(pts[0], pts[3]).unwrap();
        assert_eq!(path.first(), Some(&pts[0]));
        assert_eq!(path.last(), Some(&pts[3]));
        let len: i64 = path.windows(2).map(|w| w[0].l1(&w[1])).sum();
        assert_eq!(len, pts[0].l1(&pts[3]));
    }

    fn diagonal(n: i64) -> Instance {
        let mut points = Vec::new();
        let mut pairs = Vec::new();
        for i in 1..=n {
            points.push(Point::new(format!("l{i}"), pt(i, i)));
            points.push(Point::new(format!("r{i}"), pt(i + n, i + n)));
            pairs.push((points.len() - 2, points.len() - 1));
        }
        Instance::explicit(points, pairs).unwrap()
    }

    #[test]
    fn diagonal_family_certificate() {
        let inst = diagonal(4);
        let order = inst.demands.clone();
        let cuts = order
            .iter()
            .map(|d| {
                let r = inst.rect(d);
                Cut {
                    x: r.xlo + 4,
                    ylo: r.ylo,
                    yhi: r.yhi,
                }
            })
            .collect();
        assert!(verify_vs_certificate(&inst, &VsCertificate { order, cuts }).unwrap());
    }

    #[test]
    fn single_demand_certificate() {
        let inst = diagonal(1);
        let r = inst.rect(&inst.demands[0]);
        let cert = VsCertificate {
            order: inst.demands.clone(),
            cuts: vec![Cut {
                x: (r.xlo + r.xhi) / 2,
                ylo: r.ylo - 8,
                yhi: r.yhi,
            }],
        };
        assert!(verify_vs_certificate(&inst, &cert).unwrap());
    }

    #[test]
    fn nested_cut_outer_first_fails() {
        let points = vec![
            Point::new("o1", pt(0, 0)),
            Point::new("o2", pt(10, 10)),
            Point::new("i1", pt(3, 3)),
            Point::new("i2", pt(6, 6)),
        ];
        let inst = Instance::explicit(points, vec![(0, 1), (2, 3)]).unwrap();
        let outer = inst.rect(&inst.demands[0]);
        let inner = inst.rect(&inst.demands[1]);
        let through_both = Cut {
            x: pt(4, 0).x,
            ylo: outer.ylo,
            yhi: outer.yhi,
        };
        assert!(through_both.hits_interior(&inner));
        let cert = VsCertificate {
            order: inst.demands.clone(),
            cuts: vec![
                through_both,
                Cut {
                    x: pt(4, 0).x,
                    ylo: inner.ylo,
                    yhi: inner.yhi,
                },
            ],
        };
        assert!(!verify_vs_certificate(&inst, &cert).unwrap());
        let bad = VsCertificate {
            order: vec![inst.demands[0]],
            cuts: vec![Cut { x: 8, ylo: 5, yhi: 5 }],
        };
        assert!(matches!(
            verify_vs_certificate(&inst, &bad),
            Err(GmcError::MalformedSegment)
        ));
    }
}
