//! Vertical strip subdivisions and the instances they induce.

use std::collections::HashMap;

use crate::error::{GmcError, Result};
use crate::model::{normalize, x_groups, Demand, DemandKind, Instance, Point, Pt};

/// Strictly increasing vertical boundaries (scaled units). Strip `i` is the
/// open range between boundary `i - 1` and boundary `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripSubdivision {
    pub boundaries: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DemandClass {
    SameStrip,
    Adjacent,
    Distant,
}

impl StripSubdivision {
    /// Validates arbitrary boundaries against an instance.
    pub fn new(boundaries: Vec<i64>, inst: &Instance) -> Result<Self> {
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GmcError::InvalidArgument(
                "strip boundaries must be strictly increasing".into(),
            ));
        }
        for p in &inst.points {
            if boundaries.binary_search(&p.pos.x).is_ok() {
                return Err(GmcError::BoundaryOnPoint(p.pos.x));
            }
        }
        Ok(StripSubdivision { boundaries })
    }

    pub fn num_strips(&self) -> usize {
        self.boundaries.len() + 1
    }

    pub fn strip_of(&self, x: i64) -> usize {
        self.boundaries.partition_point(|&b| b < x)
    }

    pub fn left_boundary(&self, strip: usize) -> Option<i64> {
        strip.checked_sub(1).map(|i| self.boundaries[i])
    }

    pub fn right_boundary(&self, strip: usize) -> Option<i64> {
        self.boundaries.get(strip).copied()
    }

    pub fn classify(&self, inst: &Instance, d: &Demand) -> DemandClass {
        let (p, q) = inst.ends(d);
        let (a, b) = (self.strip_of(p.x), self.strip_of(q.x));
        match a.abs_diff(b) {
            0 => DemandClass::SameStrip,
            1 => DemandClass::Adjacent,
            _ => DemandClass::Distant,
        }
    }
}

fn midpoint(a: i64, b: i64) -> Result<i64> {
    let m = a + (b - a) / 2;
    if a < m && m < b {
        Ok(m)
    } else {
        Err(GmcError::BoundaryOnPoint(m))
    }
}

/// Cuts the x-groups into at most `s` strips of at most `ceil(g / s)` groups each.
pub fn balanced_strips(inst: &Instance, s: usize) -> Result<StripSubdivision> {
    if s < 2 {
        return Err(GmcError::InvalidArgument(format!(
            "need at least 2 strips, got {s}"
        )));
    }
    let xs: Vec<i64> = x_groups(inst).into_iter().map(|(x, _)| x).collect();
    let per = xs.len().div_ceil(s).max(1);
    let mut boundaries = Vec::new();
    let mut k = per;
    while k < xs.len() {
        boundaries.push(midpoint(xs[k - 1], xs[k])?);
        k += per;
    }
    Ok(StripSubdivision { boundaries })
}

/// Indices of each original point's projections in the inter-strip instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProjectionMap {
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
}

/// Projects every point onto the boundaries of its strip and keeps demands
/// between non-adjacent strips, rewired to the facing projections.
pub fn inter_strip_instance(
    inst: &Instance,
    sub: &StripSubdivision,
) -> Result<(Instance, ProjectionMap)> {
    for p in &inst.points {
        if sub.boundaries.binary_search(&p.pos.x).is_ok() {
            return Err(GmcError::BoundaryOnPoint(p.pos.x));
        }
    }
    let mut points: Vec<Point> = Vec::new();
    let mut at: HashMap<Pt, usize> = HashMap::new();
    let mut map = ProjectionMap {
        left: vec![None; inst.len()],
        right: vec![None; inst.len()],
    };
    let mut place = |pos: Pt, id: String, points: &mut Vec<Point>| -> usize {
        *at.entry(pos).or_insert_with(|| {
            points.push(Point::new(id, pos));
            points.len() - 1
        })
    };
    for (i, p) in inst.points.iter().enumerate() {
        let strip = sub.strip_of(p.pos.x);
        if let Some(b) = sub.left_boundary(strip) {
            map.left[i] = Some(place(Pt::new(b, p.pos.y), format!("{}:l", p.id), &mut points));
        }
        if let Some(b) = sub.right_boundary(strip) {
            map.right[i] = Some(place(Pt::new(b, p.pos.y), format!("{}:r", p.id), &mut points));
        }
    }
    let demands = inst
        .demands
        .iter()
        .filter(|d| sub.classify(inst, d) == DemandClass::Distant)
        .map(|d| {
            let (p, q) = inst.ends(d);
            let (a, b) = if p.x < q.x { (d.a, d.b) } else { (d.b, d.a) };
            Demand::new(map.right[a].unwrap(), map.left[b].unwrap())
        })
        .collect();
    let raw = Instance {
        points,
        demands,
        kind: DemandKind::Explicit,
    };
    Ok((normalize(&raw, false)?.0, map))
}

/// One sub-instance per nonempty strip, with the demands inside that strip.
pub fn intra_strip_instances(inst: &Instance, sub: &StripSubdivision) -> Vec<Instance> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); sub.num_strips()];
    for (i, p) in inst.points.iter().enumerate() {
        members[sub.strip_of(p.pos.x)].push(i);
    }
    members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|m| inst.induced(&m))
        .collect()
}
