//! Approximation algorithms: horizontal and vertical divide and conquer,
//! the naive vertical baseline and the greedy for uniform demands.

use std::collections::BTreeMap;

use crate::bounds::{boundary_is, interval_hitting_set, IntervalSet};
use crate::error::{GmcError, Result};
use crate::model::{normalize, split_monotone, x_groups, Demand, DemandKind, Instance, Pt, Solution};
use crate::strips::{balanced_strips, inter_strip_instance, intra_strip_instances, DemandClass};

/// Splits on the median row, connects every demand crossing it through two
/// points on that row and recurses above and below.
pub fn horizontal_dc(inst: &Instance, rows: &[i64]) -> Result<Solution> {
    let mut rows = rows.to_vec();
    rows.sort_unstable();
    rows.dedup();
    for d in &inst.demands {
        let r = inst.rect(d);
        let first = rows.partition_point(|&y| y < r.ylo);
        if first == rows.len() || rows[first] > r.yhi {
            return Err(GmcError::RowsMissDemand);
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<Demand>, &[i64])> = vec![(inst.demands.clone(), &rows[..])];
    while let Some((demands, rows)) = stack.pop() {
        if demands.is_empty() {
            continue;
        }
        let k = (rows.len() - 1) / 2;
        let m = rows[k];
        let (mut above, mut below) = (Vec::new(), Vec::new());
        for d in demands {
            let (p, q) = inst.ends(&d);
            let (lo, hi) = (p.y.min(q.y), p.y.max(q.y));
            if hi < m {
                below.push(d);
            } else if lo > m {
                above.push(d);
            } else {
                out.push(Pt::new(p.x, m));
                out.push(Pt::new(q.x, m));
            }
        }
        stack.push((below, &rows[..k]));
        stack.push((above, &rows[k + 1..]));
    }
    Ok(Solution::for_instance(inst, out))
}

fn solve_half(half: &Instance, mirror: bool) -> Solution {
    if half.demands.is_empty() {
        return Solution::default();
    }
    let work = if mirror { half.mirrored() } else { half.clone() };
    let rows = interval_hitting_set(&IntervalSet::of_demands(&work));
    let sol = horizontal_dc(&work, &rows).expect("a minimum hitting set hits every demand");
    if mirror {
        Solution::new(sol.aux.into_iter().map(|p| Pt::new(p.x, -p.y)).collect())
    } else {
        sol
    }
}

/// Per-half solutions of [`horizontal_manhattan`]: ascending, then descending.
pub fn horizontal_manhattan_halves(inst: &Instance) -> (Solution, Solution) {
    let (up, down) = split_monotone(inst);
    (solve_half(&up, false), solve_half(&down, true))
}

/// Minimum hitting set of the demand rows, then [`horizontal_dc`], once per
/// monotone half (the descending half is solved mirrored).
pub fn horizontal_manhattan(inst: &Instance) -> Solution {
    let (up, down) = horizontal_manhattan_halves(inst);
    up.union(&down)
}

/// `2 (1 + ceil(log2 s))`, the cost factor per unit of IS for one monotone half.
pub fn horizontal_factor(s: usize) -> usize {
    2 * (1 + ceil_log2(s))
}

pub fn ceil_log2(s: usize) -> usize {
    if s <= 1 {
        0
    } else {
        (usize::BITS - (s - 1).leading_zeros()) as usize
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerticalOptions {
    /// Number of strips per level; `None` picks `2^ceil(sqrt(log2 n))`.
    pub strips: Option<usize>,
    /// Only project endpoints of demands that leave their strip.
    pub project_only_demanded: bool,
}

/// Counters collected by [`vertical_manhattan_with`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerticalStats {
    pub strips: usize,
    pub depth: usize,
    pub projections: usize,
    pub inter_points: usize,
    /// Sum over inter-strip instances of `2 * horizontal_factor(g) * IS`.
    pub inter_budget: usize,
}

pub fn default_strips(n: usize) -> usize {
    let log = (n.max(2) as f64).log2();
    1usize << (log.sqrt().ceil() as u32)
}

pub fn vertical_manhattan(inst: &Instance, s: usize) -> Result<Solution> {
    Ok(vertical_manhattan_with(
        inst,
        VerticalOptions {
            strips: Some(s),
            ..Default::default()
        },
    )?
    .0)
}

/// Strip divide and conquer: recurse inside strips, solve the projected
/// instance between non-adjacent strips horizontally, and add the projections.
pub fn vertical_manhattan_with(
    inst: &Instance,
    opts: VerticalOptions,
) -> Result<(Solution, VerticalStats)> {
    let g = x_groups(inst).len();
    let s = match opts.strips {
        Some(s) if s < 2 => {
            return Err(GmcError::InvalidArgument(format!(
                "need at least 2 strips, got {s}"
            )))
        }
        Some(s) => s,
        None => default_strips(inst.len()).clamp(2, g.max(2)),
    };
    let mut stats = VerticalStats {
        strips: s,
        ..Default::default()
    };
    let mut out = Vec::new();
    vertical_rec(inst, s, opts.project_only_demanded, 1, &mut out, &mut stats)?;
    Ok((Solution::for_instance(inst, out), stats))
}

fn vertical_rec(
    inst: &Instance,
    s: usize,
    prune: bool,
    level: usize,
    out: &mut Vec<Pt>,
    stats: &mut VerticalStats,
) -> Result<()> {
    if x_groups(inst).len() <= 1 {
        return Ok(());
    }
    stats.depth = stats.depth.max(level);
    let sub = balanced_strips(inst, s)?;
    for part in intra_strip_instances(inst, &sub) {
        vertical_rec(&part, s, prune, level + 1, out, stats)?;
    }

    let (inter, map) = inter_strip_instance(inst, &sub)?;
    if !inter.demands.is_empty() {
        // Solutions omit points already in the instance, so a pruned run
        // may only treat demand endpoints as present.
        let sol = if prune {
            let mut ends: Vec<usize> = inter.demands.iter().flat_map(|d| [d.a, d.b]).collect();
            ends.sort_unstable();
            ends.dedup();
            horizontal_manhattan(&inter.induced(&ends))
        } else {
            horizontal_manhattan(&inter)
        };
        let g = x_groups(&inter).len();
        stats.inter_points += sol.cost();
        stats.inter_budget += 2 * horizontal_factor(g) * boundary_is(&inter).0;
        out.extend(sol.aux);
    }

    let before = out.len();
    if prune {
        for d in &inst.demands {
            if sub.classify(inst, d) == DemandClass::SameStrip {
                continue;
            }
            let (p, q) = inst.ends(d);
            let (a, b) = if p.x < q.x { (d.a, d.b) } else { (d.b, d.a) };
            out.push(inter.pos(map.right[a].unwrap()));
            out.push(inter.pos(map.left[b].unwrap()));
        }
    } else {
        out.extend(inter.points.iter().map(|p| p.pos));
    }
    stats.projections += out.len() - before;
    Ok(())
}

/// Halves the x-groups with a vertical line, projects the endpoints of every
/// crossing demand onto it and recurses on both sides.
pub fn naive_vertical_dc(inst: &Instance) -> Solution {
    let mut out = Vec::new();
    naive_rec(inst, &mut out);
    Solution::for_instance(inst, out)
}

fn naive_rec(inst: &Instance, out: &mut Vec<Pt>) {
    let groups = x_groups(inst);
    if groups.len() <= 1 || inst.demands.is_empty() {
        return;
    }
    let k = groups.len().div_ceil(2);
    let (a, b) = (groups[k - 1].0, groups[k].0);
    let line = a + (b - a) / 2;
    for d in &inst.demands {
        let (p, q) = inst.ends(d);
        if p.x.min(q.x) < line && line < p.x.max(q.x) {
            out.push(Pt::new(line, p.y));
            out.push(Pt::new(line, q.y));
        }
    }
    let left: Vec<usize> = groups[..k].iter().flat_map(|(_, m)| m.iter().copied()).collect();
    let right: Vec<usize> = groups[k..].iter().flat_map(|(_, m)| m.iter().copied()).collect();
    naive_rec(&inst.induced(&left), out);
    naive_rec(&inst.induced(&right), out);
}

/// Whether every unaligned pair of points is a demand.
fn demands_complete(inst: &Instance) -> bool {
    let n = inst.len();
    let unaligned = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !inst.pos(a).aligned(&inst.pos(b)))
        .count();
    unaligned == inst.demands.len()
}

/// Row-by-row greedy: at each input row, touch every column whose topmost
/// point so far spans an empty rectangle with the new point.
pub fn greedy_uniform(inst: &Instance) -> Result<Solution> {
    match inst.kind {
        DemandKind::Uniform => {}
        DemandKind::Explicit if demands_complete(inst) => {}
        other => {
            return Err(GmcError::WrongKind(format!(
                "greedy needs uniform demands, got {}",
                other.name()
            )))
        }
    }
    normalize(inst, true)?;
    let mut order: Vec<Pt> = inst.positions();
    order.sort_by_key(|p| p.y);
    // Topmost y per occupied column.
    let mut tops: BTreeMap<i64, i64> = BTreeMap::new();
    let mut out = Vec::new();
    for p in order {
        let mut touched = Vec::new();
        let mut ceiling = tops.get(&p.x).copied().unwrap_or(i64::MIN);
        for (&x, &top) in tops.range(p.x + 1..) {
            if top > ceiling {
                touched.push(x);
                ceiling = top;
            }
        }
        let mut ceiling = tops.get(&p.x).copied().unwrap_or(i64::MIN);
        for (&x, &top) in tops.range(..p.x).rev() {
            if top > ceiling {
                touched.push(x);
                ceiling = top;
            }
        }
        for x in touched {
            out.push(Pt::new(x, p.y));
            tops.insert(x, p.y);
        }
        tops.insert(p.x, p.y);
    }
    Ok(Solution::for_instance(inst, out))
}
