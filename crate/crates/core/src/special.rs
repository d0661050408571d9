//! Solvers for demands derived from geometry (disks) or from a partition
//! of the points (complete k-partite).

use std::collections::{BTreeMap, BTreeSet};

use crate::approx::{ceil_log2, greedy_uniform};
use crate::bounds::boundary_is;
use crate::error::{GmcError, Result};
use crate::model::{x_groups, DemandKind, Instance, Point, Pt, Solution, SCALE};
use crate::verify::verify_solution;

/// Square grid with lines at `origin + k * cell` in both directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub origin: Pt,
    pub cell: i64,
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

impl Grid {
    pub fn new(origin: Pt, cell: i64) -> Result<Self> {
        if cell <= 0 {
            return Err(GmcError::InvalidArgument(format!("grid cell {cell} must be positive")));
        }
        Ok(Grid { origin, cell })
    }

    /// Grid whose origin sits a quarter unit below and left of every point.
    /// Input coordinates are whole units and cells are multiples of half a
    /// unit, so no point ever lies on a line.
    pub fn around(points: &[Pt], cell: i64) -> Result<Self> {
        let ox = points.iter().map(|p| p.x).min().unwrap_or(0) - SCALE / 4;
        let oy = points.iter().map(|p| p.y).min().unwrap_or(0) - SCALE / 4;
        Grid::new(Pt::new(ox, oy), cell)
    }

    pub fn cell_of(&self, p: Pt) -> (i64, i64) {
        (
            floor_div(p.x - self.origin.x, self.cell),
            floor_div(p.y - self.origin.y, self.cell),
        )
    }

    pub fn on_line(&self, p: Pt) -> bool {
        (p.x - self.origin.x) % self.cell == 0 || (p.y - self.origin.y) % self.cell == 0
    }

    fn lines_within(&self, v: i64, o: i64, dist: i64) -> Vec<i64> {
        let lo = ceil_div(v - dist - o, self.cell);
        let hi = floor_div(v + dist - o, self.cell);
        (lo..=hi).map(|k| o + k * self.cell).collect()
    }

    fn closest(&self, v: i64, o: i64, per_side: i64) -> Vec<i64> {
        let k0 = floor_div(v - o, self.cell);
        (k0 - per_side + 1..=k0 + per_side).map(|k| o + k * self.cell).collect()
    }

    /// Projections of `p` onto every line within distance `dist`.
    pub fn projections_within(&self, p: Pt, dist: i64) -> Vec<Pt> {
        let mut out: Vec<Pt> = self
            .lines_within(p.x, self.origin.x, dist)
            .into_iter()
            .map(|x| Pt::new(x, p.y))
            .collect();
        out.extend(
            self.lines_within(p.y, self.origin.y, dist)
                .into_iter()
                .map(|y| Pt::new(p.x, y)),
        );
        out
    }

    /// Projections of `p` onto the `per_side` closest lines in each of the four directions.
    pub fn closest_projections(&self, p: Pt, per_side: i64) -> Vec<Pt> {
        let mut out: Vec<Pt> = self
            .closest(p.x, self.origin.x, per_side)
            .into_iter()
            .map(|x| Pt::new(x, p.y))
            .collect();
        out.extend(
            self.closest(p.y, self.origin.y, per_side)
                .into_iter()
                .map(|y| Pt::new(p.x, y)),
        );
        out
    }

    /// Point indices grouped by cell, in cell order.
    pub fn bucket(&self, inst: &Instance) -> BTreeMap<(i64, i64), Vec<usize>> {
        let mut cells: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
        for (i, p) in inst.points.iter().enumerate() {
            cells.entry(self.cell_of(p.pos)).or_default().push(i);
        }
        cells
    }
}

fn require_strict(inst: &Instance) -> Result<()> {
    crate::model::normalize(inst, true).map(|_| ())
}

/// Greedy on every cell holding two or more points.
fn greedy_per_cell(inst: &Instance, cells: &BTreeMap<(i64, i64), Vec<usize>>) -> Result<Vec<Pt>> {
    let mut out = Vec::new();
    for members in cells.values().filter(|m| m.len() > 1) {
        let mut sub = inst.induced(members);
        sub.kind = DemandKind::Uniform;
        out.extend(greedy_uniform(&sub)?.aux);
    }
    Ok(out)
}

/// The two parts of a unit-disk solution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UnitDiskParts {
    pub grid: Option<Grid>,
    /// Greedy points added inside cells.
    pub inner: Solution,
    /// Projections of points with demands leaving their cell.
    pub outer: Solution,
    /// Most projections contributed by a single point.
    pub max_per_point: usize,
}

impl UnitDiskParts {
    pub fn solution(&self) -> Solution {
        self.inner.union(&self.outer)
    }
}

pub fn unit_disk_parts(inst: &Instance) -> Result<UnitDiskParts> {
    let DemandKind::UnitDisk { r } = inst.kind else {
        return Err(GmcError::WrongKind(format!(
            "unit-disk solver needs unit-disk demands, got {}",
            inst.kind.name()
        )));
    };
    require_strict(inst)?;
    if r == 0 || inst.demands.is_empty() {
        return Ok(UnitDiskParts::default());
    }
    let reach = r * SCALE;
    let grid = Grid::around(&inst.positions(), reach / 2)?;
    let cells = grid.bucket(inst);
    let inner = Solution::for_instance(inst, greedy_per_cell(inst, &cells)?);

    let mut leaving = vec![false; inst.len()];
    for d in &inst.demands {
        let (p, q) = inst.ends(d);
        if grid.cell_of(p) != grid.cell_of(q) {
            leaving[d.a] = true;
            leaving[d.b] = true;
        }
    }
    let mut outer = Vec::new();
    let mut max_per_point = 0;
    for (i, p) in inst.points.iter().enumerate() {
        if leaving[i] {
            let proj = grid.projections_within(p.pos, reach);
            max_per_point = max_per_point.max(proj.len());
            outer.extend(proj);
        }
    }
    Ok(UnitDiskParts {
        grid: Some(grid),
        inner,
        outer: Solution::for_instance(inst, outer),
        max_per_point,
    })
}

/// Greedy inside cells of side r/2 plus projections onto nearby grid lines.
pub fn unit_disk_solve(inst: &Instance) -> Result<Solution> {
    Ok(unit_disk_parts(inst)?.solution())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DiskMode {
    /// Two closest lines per direction on every level.
    #[default]
    Closest,
    /// Every finest-level line within reach of some partner.
    Dense,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiskStats {
    /// Exponents `h` and `k` of the finest and coarsest grids.
    pub h: u32,
    pub k: u32,
    pub projections: usize,
}

fn radii(inst: &Instance) -> Result<Vec<i64>> {
    if inst.kind != DemandKind::Disk {
        return Err(GmcError::WrongKind(format!(
            "disk solver needs disk demands, got {}",
            inst.kind.name()
        )));
    }
    inst.points
        .iter()
        .map(|p| match p.radius {
            None => Err(GmcError::MissingAttribute(p.id.clone(), "radius")),
            Some(r) if r < 1 => Err(GmcError::InvalidArgument(format!(
                "radius {r} of `{}` is below 1",
                p.id
            ))),
            Some(r) => Ok(r),
        })
        .collect()
}

/// Nested power-of-two grids: projections to nearby lines on every level and
/// greedy inside the cells of the finest level.
pub fn disk_solve(inst: &Instance, mode: DiskMode) -> Result<(Solution, DiskStats)> {
    let radii = radii(inst)?;
    require_strict(inst)?;
    if inst.demands.is_empty() {
        return Ok((Solution::default(), DiskStats::default()));
    }
    let (rmin, rmax) = (*radii.iter().min().unwrap(), *radii.iter().max().unwrap());
    let h = rmin.ilog2();
    let k = ceil_log2(rmax as usize) as u32 + 1;
    let positions = inst.positions();
    // Level i has cells of 2^(i-1) units, i.e. 2^(i-1) * SCALE scaled units.
    let level = |i: u32| Grid::around(&positions, (SCALE << i) / 2);
    let finest = level(h)?;

    let mut proj = Vec::new();
    match mode {
        DiskMode::Closest => {
            for i in h..=k {
                let grid = level(i)?;
                for p in &positions {
                    proj.extend(grid.closest_projections(*p, 2));
                }
            }
        }
        DiskMode::Dense => {
            let mut partner = vec![0i64; inst.len()];
            for d in &inst.demands {
                partner[d.a] = partner[d.a].max(radii[d.b]);
                partner[d.b] = partner[d.b].max(radii[d.a]);
            }
            for (i, p) in positions.iter().enumerate() {
                if partner[i] > 0 {
                    proj.extend(finest.projections_within(*p, (radii[i] + partner[i]) * SCALE));
                }
            }
        }
    }
    let proj = Solution::for_instance(inst, proj);
    let inner = greedy_per_cell(inst, &finest.bucket(inst))?;
    let sol = proj.union(&Solution::for_instance(inst, inner));
    let report = verify_solution(inst, &sol);
    if !report.feasible {
        return Err(GmcError::Infeasible(report.violated));
    }
    Ok((
        sol,
        DiskStats {
            h,
            k,
            projections: proj.cost(),
        },
    ))
}

/// Disk demands with two radius classes: unit-disk within each class, and
/// for pairs across classes a grid of cell `(r_a + r_b) / 2` with complete
/// bipartite sub-instances inside cells.
pub fn two_disk_solve(inst: &Instance) -> Result<Solution> {
    let radii = radii(inst)?;
    require_strict(inst)?;
    let distinct: BTreeSet<i64> = radii.iter().copied().collect();
    if distinct.len() > 2 {
        return Err(GmcError::InvalidArgument(format!(
            "two-disk solver needs at most two radii, got {}",
            distinct.len()
        )));
    }
    let classes: Vec<i64> = distinct.into_iter().collect();
    let mut out = Vec::new();
    for &r in &classes {
        let pts: Vec<Point> = inst
            .points
            .iter()
            .filter(|p| p.radius == Some(r))
            .cloned()
            .collect();
        let sub = Instance::with_kind(pts, DemandKind::UnitDisk { r: 2 * r })?;
        out.extend(unit_disk_solve(&sub)?.aux);
    }
    if let [ra, rb] = classes[..] {
        let reach = (ra + rb) * SCALE;
        let grid = Grid::around(&inst.positions(), reach / 2)?;
        let mut leaving = vec![false; inst.len()];
        for d in &inst.demands {
            let (p, q) = inst.ends(d);
            if radii[d.a] != radii[d.b] && grid.cell_of(p) != grid.cell_of(q) {
                leaving[d.a] = true;
                leaving[d.b] = true;
            }
        }
        for (i, p) in inst.points.iter().enumerate() {
            if leaving[i] {
                out.extend(grid.projections_within(p.pos, reach));
            }
        }
        for members in grid.bucket(inst).values() {
            let pts: Vec<Point> = members
                .iter()
                .map(|&i| {
                    let p = &inst.points[i];
                    let side = if radii[i] == ra { "a" } else { "b" };
                    Point::new(p.id.clone(), p.pos).with_class(side)
                })
                .collect();
            if pts.iter().map(|p| &p.class).collect::<BTreeSet<_>>().len() == 2 {
                let sub = Instance::with_kind(pts, DemandKind::KPartite)?;
                out.extend(kpartite_solve(&sub)?.aux);
            }
        }
    }
    Ok(Solution::for_instance(inst, out))
}

fn classes_of(inst: &Instance) -> Result<Vec<&str>> {
    if inst.kind != DemandKind::KPartite {
        return Err(GmcError::WrongKind(format!(
            "k-partite solver needs k-partite demands, got {}",
            inst.kind.name()
        )));
    }
    inst.points
        .iter()
        .map(|p| {
            p.class
                .as_deref()
                .ok_or_else(|| GmcError::MissingAttribute(p.id.clone(), "class"))
        })
        .collect()
}

fn require_distinct_rows(inst: &Instance) -> Result<()> {
    let mut rows: BTreeMap<i64, usize> = BTreeMap::new();
    for (i, p) in inst.points.iter().enumerate() {
        if let Some(&j) = rows.get(&p.pos.y) {
            return Err(GmcError::NotStrict(inst.points[j].id.clone(), p.id.clone(), "row"));
        }
        rows.insert(p.pos.y, i);
    }
    Ok(())
}

/// Whether the column of `p` between the rows of `p` and `q` holds only
/// `p` and points of class `allowed`.
fn side_clear(inst: &Instance, alive: &[bool], classes: &[&str], p: usize, q: usize, allowed: &str) -> bool {
    let (a, b) = (inst.pos(p), inst.pos(q));
    let (lo, hi) = (a.y.min(b.y), a.y.max(b.y));
    inst.points.iter().enumerate().all(|(w, pt)| {
        w == p
            || !alive[w]
            || pt.pos.x != a.x
            || pt.pos.y < lo
            || pt.pos.y > hi
            || classes[w] == allowed
    })
}

fn essential(inst: &Instance, alive: &[bool], classes: &[&str], p: usize) -> bool {
    (0..inst.len()).any(|q| {
        alive[q]
            && classes[q] != classes[p]
            && inst.pos(q).x != inst.pos(p).x
            && side_clear(inst, alive, classes, p, q, classes[q])
            && side_clear(inst, alive, classes, q, p, classes[p])
    })
}

/// Outcome of [`kpartite_sparsify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sparsified {
    pub instance: Instance,
    /// Ids of removed points, in removal order.
    pub removed: Vec<String>,
}

/// Removes points that take part in no essential demand, one at a time,
/// until every remaining point is essential.
pub fn kpartite_sparsify(inst: &Instance) -> Result<Sparsified> {
    let classes = classes_of(inst)?;
    require_distinct_rows(inst)?;
    let mut alive = vec![true; inst.len()];
    let mut removed = Vec::new();
    while let Some(p) = (0..inst.len()).find(|&p| alive[p] && !essential(inst, &alive, &classes, p)) {
        alive[p] = false;
        removed.push(inst.points[p].id.clone());
    }
    let keep: Vec<usize> = (0..inst.len()).filter(|&i| alive[i]).collect();
    Ok(Sparsified {
        instance: inst.induced(&keep),
        removed,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KPartiteStats {
    /// Active columns of the input.
    pub columns: usize,
    /// Boundary independent set of the sparsified input.
    pub root_is: usize,
    pub root_kept: usize,
}

impl KPartiteStats {
    /// `8 (ceil(log2 s) + 1) IS` of the sparsified root.
    pub fn budget(&self) -> usize {
        8 * (ceil_log2(self.columns) + 1) * self.root_is
    }
}

/// Sparsify, split the active columns at the median, project every
/// surviving point onto the split line and recurse on both sides.
pub fn kpartite_solve_with_stats(inst: &Instance) -> Result<(Solution, KPartiteStats)> {
    classes_of(inst)?;
    require_distinct_rows(inst)?;
    let mut stats = KPartiteStats {
        columns: x_groups(inst).len(),
        ..Default::default()
    };
    let mut out = Vec::new();
    let mut stack = vec![inst.clone()];
    let mut root = true;
    while let Some(cur) = stack.pop() {
        let sp = kpartite_sparsify(&cur)?.instance;
        if root {
            stats.root_is = boundary_is(&sp).0;
            stats.root_kept = sp.len();
            root = false;
        }
        let groups = x_groups(&sp);
        if groups.len() <= 1 || sp.demands.is_empty() {
            continue;
        }
        let k = groups.len().div_ceil(2);
        let (a, b) = (groups[k - 1].0, groups[k].0);
        let line = a + (b - a) / 2;
        out.extend(sp.points.iter().map(|p| Pt::new(line, p.pos.y)));
        let left: Vec<usize> = groups[..k].iter().flat_map(|(_, m)| m.iter().copied()).collect();
        let right: Vec<usize> = groups[k..].iter().flat_map(|(_, m)| m.iter().copied()).collect();
        stack.push(sp.induced(&right));
        stack.push(sp.induced(&left));
    }
    Ok((Solution::for_instance(inst, out), stats))
}

pub fn kpartite_solve(inst: &Instance) -> Result<Solution> {
    Ok(kpartite_solve_with_stats(inst)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> Pt {
        Pt::from_input(x, y).unwrap()
    }

    fn unit(coords: &[(i64, i64)], r: i64) -> Instance {
        let points = coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Point::new(format!("p{i}"), pt(x, y)))
            .collect();
        Instance::with_kind(points, DemandKind::UnitDisk { r }).unwrap()
    }

    fn disk(coords: &[(i64, i64, i64)]) -> Instance {
        let points = coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y, r))| Point::new(format!("p{i}"), pt(x, y)).with_radius(r))
            .collect();
        Instance::with_kind(points, DemandKind::Disk).unwrap()
    }

    fn kpart(coords: &[(i64, i64, &str)]) -> Instance {
        let points = coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y, c))| Point::new(format!("p{i}"), pt(x, y)).with_class(c))
            .collect();
        Instance::with_kind(points, DemandKind::KPartite).unwrap()
    }

    #[test]
    fn grid_lines() {
        let g = Grid::new(Pt::new(-2, -2), 16).unwrap();
        assert_eq!(g.cell_of(Pt::new(0, 15)), (0, 1));
        assert_eq!(g.lines_within(0, -2, 16), vec![-2, 14]);
        assert_eq!(g.closest(0, -2, 2), vec![-18, -2, 14, 30]);
        assert!(!g.on_line(Pt::new(0, 0)));
        assert!(Grid::new(Pt::new(0, 0), 0).is_err());
    }

    #[test]
    fn unit_disk_same_cell() {
        let inst = unit(&[(0, 0), (1, 1)], 4);
        let parts = unit_disk_parts(&inst).unwrap();
        assert!(parts.inner.cost() <= 1);
        assert!(parts.outer.aux.is_empty());
        assert!(verify_solution(&inst, &parts.solution()).feasible);
    }

    #[test]
    fn unit_disk_across_cells() {
        let inst = unit(&[(0, 0), (2, 1), (5, 3), (3, 6), (7, 7)], 4);
        let parts = unit_disk_parts(&inst).unwrap();
        assert!(parts.max_per_point <= 8);
        assert!(verify_solution(&inst, &parts.solution()).feasible);
        let wrong = kpart(&[(0, 0, "a"), (1, 1, "b")]);
        assert!(matches!(unit_disk_solve(&wrong), Err(GmcError::WrongKind(_))));
    }

    #[test]
    fn disk_equal_radii() {
        let inst = disk(&[(0, 0, 2), (3, 1, 2), (1, 4, 2), (6, 5, 2)]);
        let (sol, stats) = disk_solve(&inst, DiskMode::Closest).unwrap();
        assert!(verify_solution(&inst, &sol).feasible);
        let levels = (stats.k - stats.h + 1) as usize;
        assert!(stats.projections <= 8 * inst.len() * levels);
    }

    #[test]
    fn disk_two_levels_dense() {
        let inst = disk(&[(0, 0, 1), (3, 2, 4), (9, 1, 1), (5, 8, 4), (12, 6, 1)]);
        let (sol, _) = disk_solve(&inst, DiskMode::Dense).unwrap();
        assert!(verify_solution(&inst, &sol).feasible);
        let bad = disk(&[(0, 0, 0), (1, 1, 1)]);
        assert!(disk_solve(&bad, DiskMode::Dense).is_err());
    }

    #[test]
    fn two_disk_examples() {
        let only_b = disk(&[(0, 0, 3), (2, 1, 3), (7, 4, 3)]);
        assert!(verify_solution(&only_b, &two_disk_solve(&only_b).unwrap()).feasible);

        let cross = disk(&[(0, 0, 1), (5, 3, 4)]);
        let sol = two_disk_solve(&cross).unwrap();
        assert!(verify_solution(&cross, &sol).feasible);

        let mixed = disk(&[(0, 0, 1), (1, 3, 4), (4, 1, 1), (6, 6, 4), (9, 2, 1), (2, 9, 4)]);
        assert!(verify_solution(&mixed, &two_disk_solve(&mixed).unwrap()).feasible);

        let three = disk(&[(0, 0, 1), (1, 3, 2), (4, 1, 3)]);
        assert!(two_disk_solve(&three).is_err());
    }

    #[test]
    fn sparsify_keeps_lone_pair() {
        let inst = kpart(&[(0, 0, "a"), (3, 2, "b")]);
        let sp = kpartite_sparsify(&inst).unwrap();
        assert!(sp.removed.is_empty());
        assert_eq!(sp.instance.len(), 2);
    }

    #[test]
    fn sparsify_drops_blocked_point() {
        // p2 shares the column of p0 with a class-a point between it and
        // every b partner, so all its demands route through p0.
        let inst = kpart(&[(0, 1, "a"), (4, 3, "b"), (0, 0, "a")]);
        let sp = kpartite_sparsify(&inst).unwrap();
        assert_eq!(sp.removed, vec!["p2".to_string()]);
        let sol = kpartite_solve(&sp.instance).unwrap();
        assert!(verify_solution(&inst, &sol).feasible);
    }

    #[test]
    fn kpartite_examples() {
        let column = kpart(&[(1, 0, "a"), (1, 3, "b")]);
        assert_eq!(kpartite_solve(&column).unwrap().cost(), 0);

        let pair = kpart(&[(0, 0, "a"), (2, 3, "b")]);
        let sol = kpartite_solve(&pair).unwrap();
        assert!(sol.cost() <= 2);
        assert!(verify_solution(&pair, &sol).feasible);

        let mixed = kpart(&[
            (0, 0, "a"),
            (1, 5, "b"),
            (2, 2, "a"),
            (3, 7, "c"),
            (4, 1, "b"),
            (5, 4, "a"),
            (6, 6, "c"),
        ]);
        let (sol, stats) = kpartite_solve_with_stats(&mixed).unwrap();
        assert!(verify_solution(&mixed, &sol).feasible);
        assert!(sol.cost() <= stats.budget());
        assert!(stats.root_kept <= 8 * stats.root_is);

        let unlabeled = Instance::uniform(vec![Point::new("u", pt(0, 0))]).unwrap();
        assert!(matches!(kpartite_solve(&unlabeled), Err(GmcError::WrongKind(_))));
    }
}
