//! Lower bounds on the optimum: boundary independent sets, independent
//! rectangles and vertical separability.

use std::collections::BTreeMap;

use crate::error::{GmcError, Result};
use crate::model::{split_monotone, Demand, Instance, Rect};
use crate::verify::{Cut, VsCertificate};

pub const DEFAULT_IR_CAP: usize = 20;
pub const DEFAULT_VS_CAP: usize = 16;

/// Closed interval with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    pub intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new(pairs: impl IntoIterator<Item = (i64, i64)>) -> Result<Self> {
        let mut intervals = Vec::new();
        for (lo, hi) in pairs {
            if lo >= hi {
                return Err(GmcError::InvalidArgument(format!(
                    "interval [{lo}, {hi}] is empty or degenerate"
                )));
            }
            intervals.push(Interval { lo, hi });
        }
        Ok(IntervalSet { intervals })
    }

    /// The y-extents of all demand rectangles.
    pub fn of_demands(inst: &Instance) -> Self {
        IntervalSet {
            intervals: inst
                .demands
                .iter()
                .map(|d| {
                    let r = inst.rect(d);
                    Interval { lo: r.ylo, hi: r.yhi }
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

fn by_right_end(set: &IntervalSet) -> Vec<usize> {
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by_key(|&i| (set.intervals[i].hi, set.intervals[i].lo, i));
    order
}

/// Maximum set of pairwise disjoint intervals, as indices. Sharing an
/// endpoint counts as overlap.
pub fn interval_mis(set: &IntervalSet) -> Vec<usize> {
    let mut picked = Vec::new();
    let mut last = i64::MIN;
    for i in by_right_end(set) {
        let iv = set.intervals[i];
        if picked.is_empty() || iv.lo > last {
            picked.push(i);
            last = iv.hi;
        }
    }
    picked.sort_unstable();
    picked
}

/// Minimum set of values stabbing every interval.
pub fn interval_hitting_set(set: &IntervalSet) -> Vec<i64> {
    let mut stabs: Vec<i64> = Vec::new();
    for i in by_right_end(set) {
        let iv = set.intervals[i];
        if stabs.last().map_or(true, |&s| s < iv.lo) {
            stabs.push(iv.hi);
        }
    }
    stabs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// A left or right side of a demand rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundarySegment {
    pub x: i64,
    pub ylo: i64,
    pub yhi: i64,
    pub side: Side,
    pub demand: Demand,
}

fn side_is(inst: &Instance, side: Side) -> Vec<BoundarySegment> {
    let mut columns: BTreeMap<i64, Vec<BoundarySegment>> = BTreeMap::new();
    for d in &inst.demands {
        let r = inst.rect(d);
        let x = match side {
            Side::Left => r.xlo,
            Side::Right => r.xhi,
        };
        columns.entry(x).or_default().push(BoundarySegment {
            x,
            ylo: r.ylo,
            yhi: r.yhi,
            side,
            demand: *d,
        });
    }
    let mut out = Vec::new();
    for segs in columns.values() {
        let set = IntervalSet {
            intervals: segs.iter().map(|s| Interval { lo: s.ylo, hi: s.yhi }).collect(),
        };
        out.extend(interval_mis(&set).into_iter().map(|i| segs[i]));
    }
    out
}

/// Size of a maximum boundary independent set and the segments achieving it.
pub fn boundary_is(inst: &Instance) -> (usize, Vec<BoundarySegment>) {
    let left = side_is(inst, Side::Left);
    let right = side_is(inst, Side::Right);
    let best = if right.len() > left.len() { right } else { left };
    (best.len(), best)
}

fn check_cap(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        return Err(GmcError::CapExceeded { what, size, cap });
    }
    Ok(())
}

/// Maximum independent set on a graph given by neighbour bitmasks.
fn max_independent(nbr: &[u64]) -> u64 {
    fn go(nbr: &[u64], cand: u64, cur: u64, best: &mut u64) {
        if cand == 0 {
            if cur.count_ones() > best.count_ones() {
                *best = cur;
            }
            return;
        }
        if cur.count_ones() + cand.count_ones() <= best.count_ones() {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        let bit = 1u64 << v;
        go(nbr, cand & !bit & !nbr[v], cur | bit, best);
        // Excluding an isolated vertex can never help.
        if cand & nbr[v] != 0 {
            go(nbr, cand & !bit, cur, best);
        }
    }
    let all = if nbr.len() == 64 {
        u64::MAX
    } else {
        (1u64 << nbr.len()) - 1
    };
    let mut best = 0;
    go(nbr, all, 0, &mut best);
    best
}

/// Largest set of pairwise non-conflicting demand rectangles.
pub fn ir_exact_witness(inst: &Instance, cap: usize) -> Result<Vec<Demand>> {
    let n = inst.demands.len();
    check_cap("demand set", n, cap.min(64))?;
    let rects: Vec<Rect> = inst.demands.iter().map(|d| inst.rect(d)).collect();
    let mut nbr = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            if rects[i].conflicts(&rects[j]) {
                nbr[i] |= 1 << j;
                nbr[j] |= 1 << i;
            }
        }
    }
    let best = max_independent(&nbr);
    Ok((0..n)
        .filter(|&i| best >> i & 1 == 1)
        .map(|i| inst.demands[i])
        .collect())
}

pub fn ir_exact(inst: &Instance, cap: usize) -> Result<usize> {
    Ok(ir_exact_witness(inst, cap)?.len())
}

/// Midpoints between consecutive columns of corners and input points. Every open
/// interval between corner columns contains one, and none lies on an input point.
fn cut_abscissas(inst: &Instance, rects: &[Rect]) -> Vec<i64> {
    let mut xs: Vec<i64> = rects.iter().flat_map(|r| [r.xlo, r.xhi]).collect();
    xs.extend(inst.points.iter().map(|p| p.pos.x));
    xs.sort_unstable();
    xs.dedup();
    xs.windows(2)
        .filter_map(|w| {
            let m = w[0] + (w[1] - w[0]) / 2;
            (w[0] < m && m < w[1]).then_some(m)
        })
        .collect()
}

/// For each rectangle, candidate cuts with the set of other rectangles whose
/// interior they cross.
struct CutTable {
    options: Vec<Vec<(Cut, u64)>>,
}

impl CutTable {
    fn new(inst: &Instance, rects: Vec<Rect>) -> Self {
        let abscissas = cut_abscissas(inst, &rects);
        let options = rects
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut seen = std::collections::HashSet::new();
                abscissas
                    .iter()
                    .filter(|&&x| r.xlo < x && x < r.xhi)
                    .filter_map(|&x| {
                        let cut = Cut {
                            x,
                            ylo: r.ylo,
                            yhi: r.yhi,
                        };
                        let mask = rects
                            .iter()
                            .enumerate()
                            .filter(|&(j, o)| j != i && cut.hits_interior(o))
                            .fold(0u64, |m, (j, _)| m | 1 << j);
                        // Only keep the first cut for each distinct blocking set.
                        seen.insert(mask).then_some((cut, mask))
                    })
                    .collect()
            })
            .collect();
        CutTable { options }
    }

    fn free_cut(&self, i: usize, others: u64) -> Option<Cut> {
        self.options[i]
            .iter()
            .find(|(_, mask)| mask & others == 0)
            .map(|(c, _)| *c)
    }
}

/// Maximum vertically separable demand subset, with a certificate.
pub fn vs_exact(inst: &Instance, cap: usize) -> Result<(usize, VsCertificate)> {
    let n = inst.demands.len();
    check_cap("demand set", n, cap.min(24))?;
    let table = CutTable::new(inst, inst.demands.iter().map(|d| inst.rect(d)).collect());
    let size = 1usize << n;
    // choice[S] = index of the rectangle cut first, or NONE when S is not separable.
    const NONE: u8 = u8::MAX;
    const EMPTY: u8 = u8::MAX - 1;
    let mut choice = vec![NONE; size];
    choice[0] = EMPTY;
    let mut best = 0usize;
    for s in 1..size {
        let mut rest = s;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = s & !(1 << i);
            if choice[without] != NONE && table.free_cut(i, without as u64).is_some() {
                choice[s] = i as u8;
                break;
            }
        }
        if choice[s] != NONE && s.count_ones() > best.count_ones() {
            best = s;
        }
    }
    let mut cert = VsCertificate::default();
    let mut s = best;
    while s != 0 {
        let i = choice[s] as usize;
        let without = s & !(1 << i);
        cert.order.push(inst.demands[i]);
        cert.cuts.push(table.free_cut(i, without as u64).unwrap());
        s = without;
    }
    Ok((cert.len(), cert))
}

/// Certificate for a whole demand list by repeatedly cutting any rectangle
/// that avoids all remaining ones. Returns `None` if the list is not
/// vertically separable.
pub fn vs_certificate_for(inst: &Instance, demands: &[Demand]) -> Option<VsCertificate> {
    let rects: Vec<Rect> = demands.iter().map(|d| inst.rect(d)).collect();
    let table = CutTable::new_unbounded(inst, &rects);
    let mut alive: Vec<bool> = vec![true; demands.len()];
    let mut cert = VsCertificate::default();
    for _ in 0..demands.len() {
        let pick = (0..demands.len()).find_map(|i| {
            if !alive[i] {
                return None;
            }
            table[i]
                .iter()
                .find(|cut| {
                    rects
                        .iter()
                        .enumerate()
                        .all(|(j, r)| j == i || !alive[j] || !cut.hits_interior(r))
                })
                .map(|cut| (i, *cut))
        })?;
        alive[pick.0] = false;
        cert.order.push(demands[pick.0]);
        cert.cuts.push(pick.1);
    }
    Some(cert)
}

impl CutTable {
    /// Candidate cuts per rectangle without the 64-rectangle mask limit.
    fn new_unbounded(inst: &Instance, rects: &[Rect]) -> Vec<Vec<Cut>> {
        let abscissas = cut_abscissas(inst, rects);
        rects
            .iter()
            .map(|r| {
                abscissas
                    .iter()
                    .copied()
                    .filter(|&x| r.xlo < x && x < r.xhi)
                    .map(|x| Cut {
                        x,
                        ylo: r.ylo,
                        yhi: r.yhi,
                    })
                    .collect()
            })
            .collect()
    }
}

/// Number of components of the graph joining aligned points, and of the
/// same graph with demand pairs added.
fn component_counts(inst: &Instance) -> (usize, usize) {
    let n = inst.len();
    let mut dsu = Dsu::new(n);
    let mut by_x: Vec<usize> = (0..n).collect();
    by_x.sort_by_key(|&i| (inst.pos(i).x, inst.pos(i).y));
    let mut by_y: Vec<usize> = (0..n).collect();
    by_y.sort_by_key(|&i| (inst.pos(i).y, inst.pos(i).x));
    for w in by_x.windows(2) {
        if inst.pos(w[0]).x == inst.pos(w[1]).x {
            dsu.union(w[0], w[1]);
        }
    }
    for w in by_y.windows(2) {
        if inst.pos(w[0]).y == inst.pos(w[1]).y {
            dsu.union(w[0], w[1]);
        }
    }
    let c0 = dsu.count;
    for d in &inst.demands {
        dsu.union(d.a, d.b);
    }
    (c0, dsu.count)
}

struct Dsu {
    parent: Vec<usize>,
    count: usize,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            count: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.count -= 1;
        }
    }
}

/// Every added point merges at most two components of the aligned-point
/// graph, and a feasible solution must merge every demand pair.
pub fn component_bound(inst: &Instance) -> usize {
    let (c0, merged) = component_counts(inst);
    c0 - merged
}

/// Best certified lower bound on the optimum, with exact VS on monotone
/// halves of at most `vs_cap` demands.
pub fn opt_lower_bound_with(inst: &Instance, vs_cap: usize) -> usize {
    let (up, down) = split_monotone(inst);
    let mut best = component_bound(inst);
    for half in [&up, &down] {
        best = best.max(boundary_is(half).0);
        if !half.demands.is_empty() && half.demands.len() <= vs_cap {
            if let Ok((vs, _)) = vs_exact(half, vs_cap) {
                best = best.max(vs);
            }
        }
    }
    best
}

pub fn opt_lower_bound(inst: &Instance) -> usize {
    opt_lower_bound_with(inst, DEFAULT_VS_CAP)
}
