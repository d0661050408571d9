//! Seeded instance generators.
//!
//! Coordinates are given in input units and scaled on construction, like any
//! other instance. All random generators draw from ChaCha8 so a seed fixes the
//! output on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GmcError, Result};
use crate::model::{DemandKind, Instance, Point, Pt, Rect};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_density(density: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&density) {
        return Err(GmcError::InvalidArgument(format!(
            "density {density} is outside [0, 1]"
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(GmcError::InvalidArgument("need at least one point".into()));
    }
    Ok(())
}

fn point(id: String, x: i64, y: i64) -> Point {
    Point::new(id, Pt::from_input(x, y).expect("generator coordinates are small"))
}

/// Points of a random `n x n` permutation matrix: column `i` holds row `perm[i]`.
fn permutation_points(n: usize, r: &mut ChaCha8Rng) -> Vec<Point> {
    spread_permutation(n, 1, r)
}

fn spread_permutation(n: usize, step: i64, r: &mut ChaCha8Rng) -> Vec<Point> {
    let mut rows: Vec<i64> = (0..n as i64).collect();
    rows.shuffle(r);
    rows.iter()
        .enumerate()
        .map(|(i, &y)| point(format!("p{i}"), i as i64 * step, y * step))
        .collect()
}

/// Spacing of [`gen_disk`] points, so that unit radii produce no demands.
pub const DISK_STEP: i64 = 2;

/// Random strict instance; each unordered pair is a demand with probability `density`.
pub fn gen_random(n: usize, density: f64, seed: u64) -> Result<Instance> {
    check_n(n)?;
    check_density(density)?;
    let mut r = rng(seed);
    let points = permutation_points(n, &mut r);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.gen_bool(density) {
                pairs.push((a, b));
            }
        }
    }
    Instance::explicit(points, pairs)
}

/// Random strict instance with ascending demands only.
pub fn gen_monotone(n: usize, density: f64, seed: u64) -> Result<Instance> {
    check_n(n)?;
    check_density(density)?;
    let mut r = rng(seed);
    let points = permutation_points(n, &mut r);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if points[a].pos.y < points[b].pos.y && r.gen_bool(density) {
                pairs.push((a, b));
            }
        }
    }
    Instance::explicit(points, pairs)
}

/// Ascending instance on `s` columns with distinct rows. Each point picks a
/// random column; each ascending pair in different columns is a demand with
/// probability `density`.
pub fn gen_s_thin(n: usize, s: usize, density: f64, seed: u64) -> Result<Instance> {
    check_n(n)?;
    check_density(density)?;
    if s == 0 {
        return Err(GmcError::InvalidArgument("need at least one column".into()));
    }
    let mut r = rng(seed);
    let mut rows: Vec<i64> = (0..n as i64).collect();
    rows.shuffle(&mut r);
    let points: Vec<Point> = rows
        .iter()
        .enumerate()
        .map(|(i, &y)| point(format!("p{i}"), r.gen_range(0..s as i64), y))
        .collect();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let (p, q) = (points[a].pos, points[b].pos);
            if p.x < q.x && p.y < q.y && r.gen_bool(density) {
                pairs.push((a, b));
            }
        }
    }
    Instance::explicit(points, pairs)
}

/// `n` shifted copies of one square demand, `R((i, i), (i + n, i + n))`,
/// drawn at twice the size.
///
/// For `n >= 2` the upper endpoint of copy `i` would land on the lower
/// endpoint of copy `i + n`, so upper endpoints move up by half a unit
/// (one unit after doubling).
pub fn gen_diagonal(n: usize) -> Result<Instance> {
    check_n(n)?;
    let mut points = Vec::with_capacity(2 * n);
    let mut pairs = Vec::with_capacity(n);
    for i in 1..=n as i64 {
        let j = i + n as i64;
        pairs.push((points.len(), points.len() + 1));
        points.push(point(format!("a{i}"), 2 * i, 2 * i));
        points.push(point(format!("b{i}"), 2 * j, 2 * j + 1));
    }
    Instance::explicit(points, pairs)
}

/// Apex `(0, 0)` with demands to the descending diagonal `(i, n + 1 - i)`.
pub fn gen_triangular(n: usize) -> Result<Instance> {
    check_n(n)?;
    let mut points = vec![point("p0".into(), 0, 0)];
    for i in 1..=n as i64 {
        points.push(point(format!("p{i}"), i, n as i64 + 1 - i));
    }
    Instance::explicit(points, (1..=n).map(|i| (0, i)).collect())
}

/// Coordinate grid of a triangular instance clipped to its demand rectangles.
pub fn triangular_grid(inst: &Instance) -> Vec<Pt> {
    let xs: Vec<i64> = inst.points.iter().map(|p| p.pos.x).collect();
    let ys: Vec<i64> = inst.points.iter().map(|p| p.pos.y).collect();
    let rects: Vec<Rect> = inst.demands.iter().map(|d| inst.rect(d)).collect();
    let mut out: Vec<Pt> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| Pt::new(x, y)))
        .filter(|p| rects.iter().any(|r| r.contains(*p)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// How [`gen_disk`] assigns radii (input units).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadiiSpec {
    Constant(i64),
    /// Each point gets `large` with probability `p_large`, else `small`.
    TwoValued { small: i64, large: i64, p_large: f64 },
    /// `2^u` rounded, with `u` uniform in `[0, log2 max]`.
    LogUniform { max: i64 },
}

/// Random strict points on a permutation matrix with spacing [`DISK_STEP`],
/// with radii; `(p, q)` is a demand iff `|p - q|_1 <= r_p + r_q`.
pub fn gen_disk(n: usize, radii: RadiiSpec, seed: u64) -> Result<Instance> {
    check_n(n)?;
    let mut r = rng(seed);
    let mut points = spread_permutation(n, DISK_STEP, &mut r);
    for p in &mut points {
        let radius = match radii {
            RadiiSpec::Constant(c) => c,
            RadiiSpec::TwoValued {
                small,
                large,
                p_large,
            } => {
                check_density(p_large)?;
                if r.gen_bool(p_large) {
                    large
                } else {
                    small
                }
            }
            RadiiSpec::LogUniform { max } => {
                if max < 1 {
                    return Err(GmcError::InvalidArgument("log-uniform max below 1".into()));
                }
                let u: f64 = r.gen_range(0.0..=(max as f64).log2());
                (u.exp2().round() as i64).clamp(1, max)
            }
        };
        if radius <= 0 {
            return Err(GmcError::InvalidArgument(format!("radius {radius} is not positive")));
        }
        p.radius = Some(radius);
    }
    Instance::with_kind(points, DemandKind::Disk)
}

/// Unit-disk instance on random strict points.
pub fn gen_unit_disk(n: usize, r: i64, seed: u64) -> Result<Instance> {
    check_n(n)?;
    let mut g = rng(seed);
    let points = permutation_points(n, &mut g);
    Instance::with_kind(points, DemandKind::UnitDisk { r })
}

/// Complete `k`-partite instance on random strict points with random classes.
pub fn gen_kpartite(n: usize, k: usize, seed: u64) -> Result<Instance> {
    check_n(n)?;
    if k < 2 {
        return Err(GmcError::InvalidArgument("need at least two classes".into()));
    }
    let mut r = rng(seed);
    let mut points = permutation_points(n, &mut r);
    for p in &mut points {
        p.class = Some(format!("S{}", r.gen_range(1..=k)));
    }
    Instance::with_kind(points, DemandKind::KPartite)
}

/// Uniform demands on random strict points.
pub fn gen_uniform(n: usize, seed: u64) -> Result<Instance> {
    check_n(n)?;
    let mut r = rng(seed);
    Instance::uniform(permutation_points(n, &mut r))
}
