//! Exact solver for small instances by branch and bound over grid candidates.

use std::collections::BTreeSet;

use crate::bounds::opt_lower_bound;
use crate::error::{GmcError, Result};
use crate::model::{Instance, Pt, Rect, Solution};
use crate::verify::Connectivity;

pub const DEFAULT_CANDIDATE_CAP: usize = 24;
pub const MAX_CANDIDATES: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactConfig {
    /// Largest candidate set accepted (at most [`MAX_CANDIDATES`]).
    pub cap: usize,
    /// Search nodes allowed before giving up.
    pub budget: u64,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            cap: DEFAULT_CANDIDATE_CAP,
            budget: 5_000_000,
        }
    }
}

fn inside_some(rects: &[Rect], p: Pt) -> bool {
    rects.iter().any(|r| r.contains(p))
}

fn grid_points(inst: &Instance, xs: &[i64], ys: &[i64]) -> Vec<Pt> {
    let rects: Vec<Rect> = inst.demands.iter().map(|d| inst.rect(d)).collect();
    let inputs: BTreeSet<Pt> = inst.positions().into_iter().collect();
    let mut out = Vec::new();
    for &x in xs {
        for &y in ys {
            let p = Pt::new(x, y);
            if !inputs.contains(&p) && inside_some(&rects, p) {
                out.push(p);
            }
        }
    }
    out
}

fn coords(inst: &Instance) -> (Vec<i64>, Vec<i64>) {
    let mut xs: Vec<i64> = inst.points.iter().map(|p| p.pos.x).collect();
    let mut ys: Vec<i64> = inst.points.iter().map(|p| p.pos.y).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    (xs, ys)
}

fn with_midpoints(v: &[i64]) -> Vec<i64> {
    let mut out = v.to_vec();
    out.extend(v.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2));
    out.sort_unstable();
    out.dedup();
    out
}

/// Grid points on input rows and columns inside some demand rectangle,
/// excluding the input points.
pub fn hanan_candidates(inst: &Instance) -> Vec<Pt> {
    let (xs, ys) = coords(inst);
    grid_points(inst, &xs, &ys)
}

/// The Hanan grid refined by the midlines between consecutive rows and columns.
pub fn refined_candidates(inst: &Instance) -> Vec<Pt> {
    let (xs, ys) = coords(inst);
    grid_points(inst, &with_midpoints(&xs), &with_midpoints(&ys))
}

/// Four off-grid points per Hanan cell inside the demand rectangles: the
/// centre, the midpoints of its left and bottom sides, and a quarter point.
pub fn off_grid_probes(inst: &Instance) -> Vec<Pt> {
    let (xs, ys) = coords(inst);
    let rects: Vec<Rect> = inst.demands.iter().map(|d| inst.rect(d)).collect();
    let mut out = BTreeSet::new();
    for wx in xs.windows(2) {
        for wy in ys.windows(2) {
            let (mx, my) = (wx[0] + (wx[1] - wx[0]) / 2, wy[0] + (wy[1] - wy[0]) / 2);
            let (qx, qy) = (wx[0] + (wx[1] - wx[0]) / 4, wy[0] + (wy[1] - wy[0]) / 4);
            for p in [
                Pt::new(mx, my),
                Pt::new(wx[0], my),
                Pt::new(mx, wy[0]),
                Pt::new(qx, qy),
            ] {
                if inside_some(&rects, p) {
                    out.insert(p);
                }
            }
        }
    }
    out.into_iter().collect()
}

struct Search<'a> {
    inst: &'a Instance,
    cands: &'a [Pt],
    /// Candidates inside each demand rectangle.
    in_rect: Vec<u128>,
    nodes: u64,
    budget: u64,
    collect_all: bool,
    found: Vec<u128>,
}

fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, cands: &'a [Pt], budget: u64, collect_all: bool) -> Self {
        let in_rect = inst
            .demands
            .iter()
            .map(|d| {
                let r = inst.rect(d);
                cands
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| r.contains(**c))
                    .fold(0u128, |m, (i, _)| m | 1 << i)
            })
            .collect();
        Search {
            inst,
            cands,
            in_rect,
            nodes: 0,
            budget,
            collect_all,
            found: Vec::new(),
        }
    }

    fn unsatisfied(&self, chosen: u128) -> Vec<usize> {
        let conn = Connectivity::new(
            self.inst
                .points
                .iter()
                .map(|p| p.pos)
                .chain(bits(chosen).map(|i| self.cands[i])),
        );
        (0..self.inst.demands.len())
            .filter(|&k| {
                let (p, q) = self.inst.ends(&self.inst.demands[k]);
                !conn.connected(p, q)
            })
            .collect()
    }

    /// Unsatisfied demands with pairwise disjoint open candidate sets each need their own point.
    fn residual_bound(&self, unsat: &[usize], open: u128) -> usize {
        let mut sets: Vec<u128> = unsat.iter().map(|&k| self.in_rect[k] & open).collect();
        sets.sort_by_key(|m| m.count_ones());
        let mut used = 0u128;
        let mut count = 0;
        for m in sets {
            if m & used == 0 {
                used |= m;
                count += 1;
            }
        }
        count
    }

    /// Depth-limited search; returns true once a solution is found (unless collecting all).
    fn dfs(&mut self, chosen: u128, banned: u128, limit: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(GmcError::BudgetExceeded(self.budget));
        }
        let unsat = self.unsatisfied(chosen);
        if unsat.is_empty() {
            self.found.push(chosen);
            return Ok(!self.collect_all);
        }
        let used = chosen.count_ones() as usize;
        if used >= limit {
            return Ok(false);
        }
        let open = !chosen & !banned;
        if used + self.residual_bound(&unsat, open) > limit {
            return Ok(false);
        }
        let &target = unsat
            .iter()
            .min_by_key(|&&k| ((self.in_rect[k] & open).count_ones(), k))
            .unwrap();
        let mut options: Vec<usize> = bits(self.in_rect[target] & open).collect();
        if options.is_empty() {
            return Ok(false);
        }
        let coverage = |c: usize| unsat.iter().filter(|&&k| self.in_rect[k] >> c & 1 == 1).count();
        options.sort_by_key(|&c| (std::cmp::Reverse(coverage(c)), c));
        let mut banned = banned;
        for c in options {
            if self.dfs(chosen | 1 << c, banned, limit)? {
                return Ok(true);
            }
            banned |= 1 << c;
        }
        Ok(false)
    }
}

fn check_candidates(cands: &[Pt], cfg: &ExactConfig) -> Result<()> {
    let cap = cfg.cap.min(MAX_CANDIDATES);
    if cands.len() > cap {
        return Err(GmcError::CapExceeded {
            what: "candidate set",
            size: cands.len(),
            cap,
        });
    }
    Ok(())
}

fn to_solution(cands: &[Pt], mask: u128) -> Solution {
    Solution::new(bits(mask).map(|i| cands[i]).collect())
}

/// Minimum solution drawn from `cands`, by iterative deepening from the lower bound.
pub fn exact_opt_over(inst: &Instance, cands: &[Pt], cfg: &ExactConfig) -> Result<(usize, Solution)> {
    check_candidates(cands, cfg)?;
    let mut search = Search::new(inst, cands, cfg.budget, false);
    let mut limit = opt_lower_bound(inst);
    loop {
        if search.dfs(0, 0, limit)? {
            let best = search.found[0];
            return Ok((best.count_ones() as usize, to_solution(cands, best)));
        }
        if limit >= cands.len() {
            let all = if cands.is_empty() { 0 } else { u128::MAX >> (128 - cands.len()) };
            let left = search.unsatisfied(all);
            return Err(GmcError::Infeasible(left.into_iter().map(|k| inst.demands[k]).collect()));
        }
        limit += 1;
    }
}

/// Optimum over the Hanan grid.
pub fn exact_opt(inst: &Instance, cfg: &ExactConfig) -> Result<(usize, Solution)> {
    exact_opt_over(inst, &hanan_candidates(inst), cfg)
}

/// Every minimum-size feasible subset of the Hanan candidates plus `extra`.
pub fn enumerate_optima(inst: &Instance, extra: &[Pt], cfg: &ExactConfig) -> Result<Vec<Solution>> {
    let mut cands = hanan_candidates(inst);
    cands.extend_from_slice(extra);
    cands.sort_unstable();
    cands.dedup();
    let (opt, _) = exact_opt_over(inst, &cands, cfg)?;
    let mut search = Search::new(inst, &cands, cfg.budget, true);
    search.dfs(0, 0, opt)?;
    let mut out: Vec<Solution> = search
        .found
        .iter()
        .filter(|m| m.count_ones() as usize == opt)
        .map(|&m| to_solution(&cands, m))
        .collect();
    out.sort_by(|a, b| a.aux.cmp(&b.aux));
    out.dedup();
    Ok(out)
}
