//! Instance model: points, demands, demand kinds and solutions.
//!
//! Coordinates are stored in *scaled units*: every input coordinate is
//! multiplied by [`SCALE`] when an instance is built. Strip boundaries,
//! grid lines and probe points then land on integers, so no geometric
//! predicate ever needs an epsilon. Files always carry unscaled values.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GmcError, Result};

/// Number of internal units per input unit.
pub const SCALE: i64 = 8;

/// Largest input coordinate magnitude accepted (in input units).
pub const COORD_LIMIT: i64 = 1 << 56;

/// A location in the plane, in scaled units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pt {
    pub x: i64,
    pub y: i64,
}

impl Pt {
    pub const fn new(x: i64, y: i64) -> Self {
        Pt { x, y }
    }

    /// Builds a location from unscaled input coordinates.
    pub fn from_input(x: i64, y: i64) -> Result<Self> {
        for v in [x, y] {
            if v.abs() > COORD_LIMIT {
                return Err(GmcError::CoordinateRange(v));
            }
        }
        Ok(Pt::new(x * SCALE, y * SCALE))
    }

    pub fn l1(&self, other: &Pt) -> i64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    pub fn aligned(&self, other: &Pt) -> bool {
        self.x == other.x || self.y == other.y
    }
}

impl fmt::Display for Pt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", Units(self.x), Units(self.y))
    }
}

/// Formats a scaled value in input units (exact, since `SCALE` is a power of two).
#[derive(Clone, Copy, Debug)]
pub struct Units(pub i64);

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % SCALE == 0 {
            write!(f, "{}", self.0 / SCALE)
        } else {
            write!(f, "{}", self.0 as f64 / SCALE as f64)
        }
    }
}

/// Closed axis-aligned rectangle in scaled units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rect {
    pub xlo: i64,
    pub xhi: i64,
    pub ylo: i64,
    pub yhi: i64,
}

impl Rect {
    pub fn spanned(p: Pt, q: Pt) -> Self {
        Rect {
            xlo: p.x.min(q.x),
            xhi: p.x.max(q.x),
            ylo: p.y.min(q.y),
            yhi: p.y.max(q.y),
        }
    }

    pub fn contains(&self, p: Pt) -> bool {
        self.xlo <= p.x && p.x <= self.xhi && self.ylo <= p.y && p.y <= self.yhi
    }

    pub fn interior_contains(&self, p: Pt) -> bool {
        self.xlo < p.x && p.x < self.xhi && self.ylo < p.y && p.y < self.yhi
    }

    pub fn corners(&self) -> [Pt; 4] {
        [
            Pt::new(self.xlo, self.ylo),
            Pt::new(self.xlo, self.yhi),
            Pt::new(self.xhi, self.ylo),
            Pt::new(self.xhi, self.yhi),
        ]
    }

    /// Two rectangles conflict when one holds a corner of the other in its interior.
    pub fn conflicts(&self, other: &Rect) -> bool {
        other.corners().iter().any(|c| self.interior_contains(*c))
            || self.corners().iter().any(|c| other.interior_contains(*c))
    }
}

/// An input point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    pub id: String,
    pub pos: Pt,
    /// Disk radius in input units.
    pub radius: Option<i64>,
    pub class: Option<String>,
}

impl Point {
    pub fn new(id: impl Into<String>, pos: Pt) -> Self {
        Point {
            id: id.into(),
            pos,
            radius: None,
            class: None,
        }
    }

    pub fn with_radius(mut self, r: i64) -> Self {
        self.radius = Some(r);
        self
    }

    pub fn with_class(mut self, c: impl Into<String>) -> Self {
        self.class = Some(c.into());
        self
    }
}

/// A demand between two points, by index into the instance's point list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Demand {
    pub a: usize,
    pub b: usize,
}

impl Demand {
    pub const fn new(a: usize, b: usize) -> Self {
        Demand { a, b }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DemandKind {
    Explicit,
    Uniform,
    /// `(p, q)` is a demand iff `|p - q|_1 <= r`, with `r` in input units.
    UnitDisk {
        r: i64,
    },
    Disk,
    KPartite,
}

impl DemandKind {
    pub fn name(&self) -> &'static str {
        match self {
            DemandKind::Explicit => "explicit",
            DemandKind::Uniform => "uniform",
            DemandKind::UnitDisk { .. } => "unit-disk",
            DemandKind::Disk => "disk",
            DemandKind::KPartite => "kpartite",
        }
    }
}

/// What [`normalize`] changed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalizeReport {
    pub reoriented: usize,
    pub duplicates: usize,
    pub aligned_dropped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub points: Vec<Point>,
    pub demands: Vec<Demand>,
    pub kind: DemandKind,
}

impl Instance {
    /// Builds and normalizes an instance with an explicit demand list.
    pub fn explicit(points: Vec<Point>, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let raw = Instance {
            points,
            demands: pairs.into_iter().map(|(a, b)| Demand::new(a, b)).collect(),
            kind: DemandKind::Explicit,
        };
        Ok(normalize(&raw, false)?.0)
    }

    /// Builds an instance whose demands are implied by `kind`, materializing them.
    pub fn with_kind(points: Vec<Point>, kind: DemandKind) -> Result<Self> {
        if kind == DemandKind::Explicit {
            return Err(GmcError::WrongKind(
                "explicit instances need a demand list".into(),
            ));
        }
        let demands = materialize(&points, kind)?;
        let raw = Instance {
            points,
            demands,
            kind,
        };
        Ok(normalize(&raw, false)?.0)
    }

    pub fn uniform(points: Vec<Point>) -> Result<Self> {
        Self::with_kind(points, DemandKind::Uniform)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn pos(&self, i: usize) -> Pt {
        self.points[i].pos
    }

    pub fn ends(&self, d: &Demand) -> (Pt, Pt) {
        (self.points[d.a].pos, self.points[d.b].pos)
    }

    pub fn rect(&self, d: &Demand) -> Rect {
        let (p, q) = self.ends(d);
        Rect::spanned(p, q)
    }

    pub fn positions(&self) -> Vec<Pt> {
        self.points.iter().map(|p| p.pos).collect()
    }

    /// True when all x-coordinates are distinct and all y-coordinates are distinct.
    pub fn is_strict(&self) -> bool {
        check_strict(&self.points).is_ok()
    }

    /// True when all y-coordinates are distinct.
    pub fn has_distinct_rows(&self) -> bool {
        let mut ys: Vec<i64> = self.points.iter().map(|p| p.pos.y).collect();
        ys.sort_unstable();
        ys.windows(2).all(|w| w[0] != w[1])
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    /// Sub-instance on the given points (in the given order) keeping demands
    /// with both ends inside. Implicit kinds survive because induced demand
    /// sets of uniform, disk and k-partite instances are again of that kind.
    pub fn induced(&self, keep: &[usize]) -> Instance {
        let mut map = HashMap::with_capacity(keep.len());
        for (new, &old) in keep.iter().enumerate() {
            map.insert(old, new);
        }
        let demands = self
            .demands
            .iter()
            .filter_map(|d| match (map.get(&d.a), map.get(&d.b)) {
                (Some(&a), Some(&b)) => Some(Demand::new(a, b)),
                _ => None,
            })
            .collect();
        Instance {
            points: keep.iter().map(|&i| self.points[i].clone()).collect(),
            demands,
            kind: self.kind,
        }
    }

    /// Same points, different demand subset. The result is always explicit.
    pub fn with_demands(&self, demands: Vec<Demand>) -> Instance {
        Instance {
            points: self.points.clone(),
            demands,
            kind: DemandKind::Explicit,
        }
    }

    /// Reflects y to -y. Demand orientation stays normalized because x is untouched.
    pub fn mirrored(&self) -> Instance {
        let mut out = self.clone();
        for p in &mut out.points {
            p.pos.y = -p.pos.y;
        }
        out
    }

    /// Whether every demand ascends (`y(a) < y(b)`).
    pub fn is_increasing(&self) -> bool {
        self.demands.iter().all(|d| {
            let (p, q) = self.ends(d);
            p.y < q.y
        })
    }

    pub fn is_monotone(&self) -> bool {
        let (up, down) = split_monotone(self);
        up.demands.is_empty() || down.demands.is_empty()
    }
}

fn validate_points(points: &[Point]) -> Result<()> {
    let mut ids = HashSet::with_capacity(points.len());
    let mut at: HashMap<Pt, usize> = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if !ids.insert(p.id.as_str()) {
            return Err(GmcError::DuplicatePointId(p.id.clone()));
        }
        if let Some(&j) = at.get(&p.pos) {
            return Err(GmcError::DuplicateCoordinates(
                points[j].id.clone(),
                p.id.clone(),
            ));
        }
        at.insert(p.pos, i);
    }
    Ok(())
}

fn check_strict(points: &[Point]) -> Result<()> {
    let mut xs: HashMap<i64, usize> = HashMap::new();
    let mut ys: HashMap<i64, usize> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        if let Some(&j) = xs.get(&p.pos.x) {
            return Err(GmcError::NotStrict(points[j].id.clone(), p.id.clone(), "column"));
        }
        if let Some(&j) = ys.get(&p.pos.y) {
            return Err(GmcError::NotStrict(points[j].id.clone(), p.id.clone(), "row"));
        }
        xs.insert(p.pos.x, i);
        ys.insert(p.pos.y, i);
    }
    Ok(())
}

/// Explicit demand list implied by an implicit demand kind (unnormalized).
pub fn materialize(points: &[Point], kind: DemandKind) -> Result<Vec<Demand>> {
    let n = points.len();
    let mut out = Vec::new();
    match kind {
        DemandKind::Explicit => {}
        DemandKind::Uniform => {
            for a in 0..n {
                for b in a + 1..n {
                    out.push(Demand::new(a, b));
                }
            }
        }
        DemandKind::UnitDisk { r } => {
            if r < 0 {
                return Err(GmcError::InvalidArgument("negative unit-disk radius".into()));
            }
            for a in 0..n {
                for b in a + 1..n {
                    if points[a].pos.l1(&points[b].pos) <= r * SCALE {
                        out.push(Demand::new(a, b));
                    }
                }
            }
        }
        DemandKind::Disk => {
            for p in points {
                match p.radius {
                    None => return Err(GmcError::MissingAttribute(p.id.clone(), "radius")),
                    Some(r) if r < 0 => {
                        return Err(GmcError::InvalidArgument(format!(
                            "negative radius on `{}`",
                            p.id
                        )))
                    }
                    _ => {}
                }
            }
            for a in 0..n {
                for b in a + 1..n {
                    let reach = points[a].radius.unwrap() + points[b].radius.unwrap();
                    if points[a].pos.l1(&points[b].pos) <= reach * SCALE {
                        out.push(Demand::new(a, b));
                    }
                }
            }
        }
        DemandKind::KPartite => {
            for p in points {
                if p.class.is_none() {
                    return Err(GmcError::MissingAttribute(p.id.clone(), "class"));
                }
            }
            for a in 0..n {
                for b in a + 1..n {
                    if points[a].class != points[b].class {
                        out.push(Demand::new(a, b));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Canonicalizes an instance: orients every demand left to right (bottom to
/// top when vertical), removes duplicates and drops aligned pairs, which are
/// connected by a straight segment already.
///
/// With `strict` set, also rejects instances with a shared row or column.
pub fn normalize(inst: &Instance, strict: bool) -> Result<(Instance, NormalizeReport)> {
    validate_points(&inst.points)?;
    if strict {
        check_strict(&inst.points)?;
    }
    let n = inst.points.len();
    let mut report = NormalizeReport::default();
    let mut seen = HashSet::with_capacity(inst.demands.len());
    let mut demands = Vec::with_capacity(inst.demands.len());
    for d in &inst.demands {
        if d.a >= n || d.b >= n {
            return Err(GmcError::UnknownPoint(format!("#{}", d.a.max(d.b))));
        }
        if d.a == d.b {
            return Err(GmcError::SelfDemand(inst.points[d.a].id.clone()));
        }
        let (p, q) = (inst.points[d.a].pos, inst.points[d.b].pos);
        let oriented = if (p.x, p.y) <= (q.x, q.y) {
            *d
        } else {
            report.reoriented += 1;
            Demand::new(d.b, d.a)
        };
        if !seen.insert(oriented) {
            report.duplicates += 1;
            continue;
        }
        if p.aligned(&q) {
            report.aligned_dropped += 1;
            continue;
        }
        demands.push(oriented);
    }
    Ok((
        Instance {
            points: inst.points.clone(),
            demands,
            kind: inst.kind,
        },
        report,
    ))
}

/// Splits a normalized instance into its ascending and descending demand sets.
pub fn split_monotone(inst: &Instance) -> (Instance, Instance) {
    let (up, down): (Vec<Demand>, Vec<Demand>) = inst.demands.iter().partition(|d| {
        let (p, q) = inst.ends(d);
        p.y < q.y
    });
    (inst.with_demands(up), inst.with_demands(down))
}

/// Maximal same-x point groups, ordered by x.
pub fn x_groups(inst: &Instance) -> Vec<(i64, Vec<usize>)> {
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, p) in inst.points.iter().enumerate() {
        groups.entry(p.pos.x).or_default().push(i);
    }
    groups.into_iter().collect()
}

/// A set of auxiliary points, kept sorted and free of duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Solution {
    pub aux: Vec<Pt>,
}

impl Solution {
    pub fn new(mut aux: Vec<Pt>) -> Self {
        aux.sort_unstable();
        aux.dedup();
        Solution { aux }
    }

    /// Drops points that coincide with input points; they cost nothing.
    pub fn for_instance(inst: &Instance, aux: impl IntoIterator<Item = Pt>) -> Self {
        let inputs: HashSet<Pt> = inst.points.iter().map(|p| p.pos).collect();
        Solution::new(aux.into_iter().filter(|p| !inputs.contains(p)).collect())
    }

    pub fn cost(&self) -> usize {
        self.aux.len()
    }

    pub fn union(&self, other: &Solution) -> Solution {
        let mut all = self.aux.clone();
        all.extend_from_slice(&other.aux);
        Solution::new(all)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> Pt {
        Pt::from_input(x, y).unwrap()
    }

    fn pts(coords: &[(i64, i64)]) -> Vec<Point> {
        coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Point::new(format!("p{i}"), pt(x, y)))
            .collect()
    }

    #[test]
    fn reorients_demands() {
        let raw = Instance {
            points: pts(&[(0, 0), (3, 5)]),
            demands: vec![Demand::new(1, 0)],
            kind: DemandKind::Explicit,
        };
        let (norm, report) = normalize(&raw, false).unwrap();
        assert_eq!(norm.demands, vec![Demand::new(0, 1)]);
        assert_eq!(report.reoriented, 1);
    }

    #[test]
    fn drops_aligned_pairs() {
        let raw = Instance {
            points: pts(&[(0, 0), (0, 5), (2, 7)]),
            demands: vec![Demand::new(0, 1), Demand::new(0, 2)],
            kind: DemandKind::Explicit,
        };
        let (norm, report) = normalize(&raw, false).unwrap();
        assert_eq!(report.aligned_dropped, 1);
        assert_eq!(norm.demands, vec![Demand::new(0, 2)]);
    }

    #[test]
    fn deduplicates() {
        let raw = Instance {
            points: pts(&[(0, 0), (3, 5)]),
            demands: vec![Demand::new(0, 1), Demand::new(0, 1), Demand::new(1, 0)],
            kind: DemandKind::Explicit,
        };
        let (norm, report) = normalize(&raw, false).unwrap();
        assert_eq!(norm.demands.len(), 1);
        assert_eq!(report.duplicates, 2);
    }

    #[test]
    fn rejects_duplicate_ids_and_coordinates() {
        let mut points = pts(&[(0, 0), (1, 1)]);
        points[1].id = "p0".into();
        let raw = Instance {
            points,
            demands: vec![],
            kind: DemandKind::Explicit,
        };
        assert!(matches!(
            normalize(&raw, false),
            Err(GmcError::DuplicatePointId(_))
        ));

        let raw = Instance {
            points: pts(&[(0, 0), (0, 0)]),
            demands: vec![],
            kind: DemandKind::Explicit,
        };
        assert!(matches!(
            normalize(&raw, false),
            Err(GmcError::DuplicateCoordinates(..))
        ));
    }

    #[test]
    fn strict_rejects_shared_column() {
        let raw = Instance {
            points: pts(&[(0, 0), (0, 3)]),
            demands: vec![],
            kind: DemandKind::Explicit,
        };
        assert!(normalize(&raw, false).is_ok());
        assert!(matches!(
            normalize(&raw, true),
            Err(GmcError::NotStrict(..))
        ));
    }

    #[test]
    fn split_by_slope() {
        let inst = Instance::explicit(
            pts(&[(0, 0), (2, 2), (1, 3), (3, 1)]),
            vec![(0, 1), (2, 3)],
        )
        .unwrap();
        let (up, down) = split_monotone(&inst);
        assert_eq!(up.demands, vec![Demand::new(0, 1)]);
        assert_eq!(down.demands, vec![Demand::new(2, 3)]);

        let empty = Instance::explicit(pts(&[(0, 0)]), vec![]).unwrap();
        let (u, d) = split_monotone(&empty);
        assert!(u.demands.is_empty() && d.demands.is_empty());

        let inc = Instance::explicit(pts(&[(0, 0), (2, 2), (3, 4)]), vec![(0, 1), (1, 2)]).unwrap();
        let (u, d) = split_monotone(&inc);
        assert_eq!(u.demands.len(), 2);
        assert!(d.demands.is_empty());
    }

    #[test]
    fn groups_by_column() {
        let inst = Instance::explicit(pts(&[(1, 0), (1, 1), (2, 2), (2, 3)]), vec![]).unwrap();
        let g = x_groups(&inst);
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|(_, m)| m.len() == 2));

        let distinct = Instance::explicit(pts(&[(1, 0), (2, 1), (3, 2), (4, 3)]), vec![]).unwrap();
        assert_eq!(x_groups(&distinct).len(), 4);

        let none = Instance::explicit(vec![], vec![]).unwrap();
        assert!(x_groups(&none).is_empty());
    }

    #[test]
    fn kinds_materialize() {
        let points = pts(&[(0, 0), (1, 2), (5, 5)]);
        let uni = Instance::uniform(points.clone()).unwrap();
        assert_eq!(uni.demands.len(), 3);
        let ud = Instance::with_kind(points.clone(), DemandKind::UnitDisk { r: 3 }).unwrap();
        assert_eq!(ud.demands, vec![Demand::new(0, 1)]);
        assert!(matches!(
            Instance::with_kind(points, DemandKind::Disk),
            Err(GmcError::MissingAttribute(..))
        ));
    }

    #[test]
    fn conflict_is_corner_in_interior() {
        let a = Rect::spanned(pt(1, 1), pt(5, 5));
        let b = Rect::spanned(pt(2, 2), pt(6, 6));
        let c = Rect::spanned(pt(5, 5), pt(7, 7));
        assert!(a.conflicts(&b));
        assert!(!a.conflicts(&c));
    }
}
