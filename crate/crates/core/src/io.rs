//! JSON files for instances and solutions.
//!
//! Instance files hold input-unit integers:
//!
//! ```json
//! {"version": 1, "kind": "explicit",
//!  "points": [{"id": "a", "x": 0, "y": 0}, {"id": "b", "x": 2, "y": 3}],
//!  "demands": [["a", "b"]]}
//! ```
//!
//! `kind` is one of `explicit`, `uniform`, `unit-disk` (needs top-level `r`),
//! `disk` (needs `r` on every point) or `kpartite` (needs `class` on every
//! point). Only explicit instances carry `demands`; the others are
//! materialized on load. Solution files list auxiliary points, whose
//! coordinates may be multiples of `1/8`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::error::{GmcError, Result};
use crate::model::{DemandKind, Instance, Point, Pt, Solution, SCALE};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointRecord {
    id: String,
    x: i64,
    y: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    version: u32,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<i64>,
    points: Vec<PointRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    demands: Option<Vec<(String, String)>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionFile {
    version: u32,
    aux: Vec<(Number, Number)>,
}

fn schema(location: impl Into<String>, message: impl Into<String>) -> GmcError {
    GmcError::Schema {
        location: location.into(),
        message: message.into(),
    }
}

fn json_error(e: serde_json::Error) -> GmcError {
    schema(format!("line {} column {}", e.line(), e.column()), e.to_string())
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(schema("version", format!("unsupported version {v}")));
    }
    Ok(())
}

fn unscale(v: i64, what: &str) -> Result<i64> {
    if v % SCALE != 0 {
        return Err(schema(
            what,
            format!("coordinate {v}/{SCALE} is not an integer in input units"),
        ));
    }
    Ok(v / SCALE)
}

pub fn instance_from_str(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(json_error)?;
    check_version(file.version)?;
    let kind = match file.kind.as_str() {
        "explicit" => DemandKind::Explicit,
        "uniform" => DemandKind::Uniform,
        "unit-disk" => DemandKind::UnitDisk {
            r: file
                .r
                .ok_or_else(|| schema("r", "unit-disk instances need a radius `r`"))?,
        },
        "disk" => DemandKind::Disk,
        "kpartite" => DemandKind::KPartite,
        other => return Err(schema("kind", format!("unknown kind `{other}`"))),
    };
    if file.r.is_some() && !matches!(kind, DemandKind::UnitDisk { .. }) {
        return Err(schema("r", format!("`r` is only valid for unit-disk, not {}", file.kind)));
    }
    let mut points = Vec::with_capacity(file.points.len());
    for (k, p) in file.points.into_iter().enumerate() {
        let pos = Pt::from_input(p.x, p.y)?;
        if p.id.is_empty() {
            return Err(schema(format!("points[{k}].id"), "empty id"));
        }
        points.push(Point {
            id: p.id,
            pos,
            radius: p.r,
            class: p.class,
        });
    }
    match (kind, file.demands) {
        (DemandKind::Explicit, None) => Err(schema("demands", "explicit instances need `demands`")),
        (DemandKind::Explicit, Some(pairs)) => {
            let mut idx = Vec::with_capacity(pairs.len());
            for (k, (a, b)) in pairs.iter().enumerate() {
                let find = |id: &str| {
                    points
                        .iter()
                        .position(|p| p.id == id)
                        .ok_or_else(|| schema(format!("demands[{k}]"), format!("unknown point `{id}`")))
                };
                idx.push((find(a)?, find(b)?));
            }
            Instance::explicit(points, idx)
        }
        (_, Some(_)) => Err(schema(
            "demands",
            format!("{} instances must not list demands", kind.name()),
        )),
        (_, None) => Instance::with_kind(points, kind),
    }
}

pub fn instance_to_string(inst: &Instance) -> Result<String> {
    let points = inst
        .points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            Ok(PointRecord {
                id: p.id.clone(),
                x: unscale(p.pos.x, &format!("points[{k}].x"))?,
                y: unscale(p.pos.y, &format!("points[{k}].y"))?,
                r: p.radius,
                class: p.class.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (r, demands) = match inst.kind {
        DemandKind::Explicit => (
            None,
            Some(
                inst.demands
                    .iter()
                    .map(|d| (inst.points[d.a].id.clone(), inst.points[d.b].id.clone()))
                    .collect(),
            ),
        ),
        DemandKind::UnitDisk { r } => (Some(r), None),
        _ => (None, None),
    };
    let file = InstanceFile {
        version: FORMAT_VERSION,
        kind: inst.kind.name().to_string(),
        r,
        points,
        demands,
    };
    let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
    s.push('\n');
    Ok(s)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    instance_from_str(&fs::read_to_string(path)?)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, instance_to_string(inst)?)?;
    Ok(())
}

fn to_number(v: i64) -> Number {
    if v % SCALE == 0 {
        Number::from(v / SCALE)
    } else {
        // Multiples of 1/8 are exact in binary floating point.
        Number::from_f64(v as f64 / SCALE as f64).expect("finite")
    }
}

fn from_number(n: &Number, location: String) -> Result<i64> {
    if let Some(i) = n.as_i64() {
        return i
            .checked_mul(SCALE)
            .ok_or_else(|| schema(location, "coordinate out of range"));
    }
    let f = n.as_f64().ok_or_else(|| schema(location.clone(), "not a number"))?;
    let scaled = f * SCALE as f64;
    if scaled.fract() != 0.0 || scaled.abs() > (1u64 << 60) as f64 {
        return Err(schema(location, format!("{f} is not a multiple of 1/{SCALE}")));
    }
    Ok(scaled as i64)
}

pub fn solution_from_str(text: &str) -> Result<Solution> {
    let file: SolutionFile = serde_json::from_str(text).map_err(json_error)?;
    check_version(file.version)?;
    let aux = file
        .aux
        .iter()
        .enumerate()
        .map(|(k, (x, y))| {
            Ok(Pt::new(
                from_number(x, format!("aux[{k}][0]"))?,
                from_number(y, format!("aux[{k}][1]"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Solution::new(aux))
}

pub fn solution_to_string(sol: &Solution) -> String {
    let file = SolutionFile {
        version: FORMAT_VERSION,
        aux: sol
            .aux
            .iter()
            .map(|p| (to_number(p.x), to_number(p.y)))
            .collect(),
    };
    let mut s = serde_json::to_string(&file).expect("solution serializes");
    s.push('\n');
    s
}

pub fn load_solution(path: impl AsRef<Path>) -> Result<Solution> {
    solution_from_str(&fs::read_to_string(path)?)
}

pub fn save_solution(sol: &Solution, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, solution_to_string(sol))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_disk, gen_kpartite, gen_random, gen_unit_disk, RadiiSpec};

    #[test]
    fn explicit_round_trip() {
        for seed in 0..20 {
            let inst = gen_random(7, 0.4, seed).unwrap();
            let text = instance_to_string(&inst).unwrap();
            assert_eq!(instance_from_str(&text).unwrap(), inst);
        }
    }

    #[test]
    fn implicit_kinds_round_trip() {
        let cases = [
            gen_disk(8, RadiiSpec::Constant(2), 1).unwrap(),
            gen_kpartite(8, 3, 1).unwrap(),
            gen_unit_disk(8, 3, 1).unwrap(),
        ];
        for inst in cases {
            let text = instance_to_string(&inst).unwrap();
            assert!(!text.contains("demands"));
            assert_eq!(instance_from_str(&text).unwrap(), inst);
        }
    }

    #[test]
    fn unknown_field_is_named() {
        let text = r#"{"version":1,"kind":"uniform","points":[],"colour":"red"}"#;
        let err = instance_from_str(text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        let text = r#"{"version":1,"kind":"uniform","points":[{"id":"a","x":0,"y":0,"z":1}]}"#;
        let err = instance_from_str(text).unwrap_err().to_string();
        assert!(err.contains('z'), "{err}");
    }

    #[test]
    fn disk_without_radii_fails() {
        let text = r#"{"version":1,"kind":"disk","points":[{"id":"a","x":0,"y":0},{"id":"b","x":1,"y":1,"r":2}]}"#;
        assert!(matches!(
            instance_from_str(text),
            Err(GmcError::MissingAttribute(..))
        ));
    }

    #[test]
    fn schema_errors() {
        let bad = [
            r#"{"version":2,"kind":"uniform","points":[]}"#,
            r#"{"version":1,"kind":"weird","points":[]}"#,
            r#"{"version":1,"kind":"unit-disk","points":[]}"#,
            r#"{"version":1,"kind":"explicit","points":[]}"#,
            r#"{"version":1,"kind":"uniform","points":[],"demands":[]}"#,
            r#"{"version":1,"kind":"explicit","points":[{"id":"a","x":0,"y":0}],"demands":[["a","b"]]}"#,
            r#"{"version":1,"kind":"explicit","points":[{"id":"a","x":0.5,"y":0}],"demands":[]}"#,
            r#"{"version":1,"kind":"uniform","points":[{"id":"a","x":0,"y":0},{"id":"a","x":1,"y":1}]}"#,
        ];
        for t in bad {
            assert!(instance_from_str(t).is_err(), "{t}");
        }
    }

    #[test]
    fn solution_round_trip_with_fractions() {
        let sol = Solution::new(vec![Pt::new(8, 4), Pt::new(-3, 16), Pt::new(0, 0)]);
        let text = solution_to_string(&sol);
        assert!(text.contains("0.5") && text.contains("-0.375"), "{text}");
        assert_eq!(solution_from_str(&text).unwrap(), sol);
        assert!(solution_from_str(r#"{"version":1,"aux":[[0.1,0]]}"#).is_err());
    }
}
