//! Benchmark harness: generate families, run solvers, gate every solution
//! through the verifier and emit one CSV row per (instance, algorithm).

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{
    default_strips, greedy_uniform, horizontal_manhattan, naive_vertical_dc, vertical_manhattan,
    vertical_manhattan_with, VerticalOptions,
};
use crate::bounds::{boundary_is, vs_exact};
use crate::error::{GmcError, Result};
use crate::exact::{exact_opt, ExactConfig};
use crate::generators::{
    gen_diagonal, gen_disk, gen_kpartite, gen_monotone, gen_random, gen_s_thin, gen_triangular,
    gen_uniform, gen_unit_disk, RadiiSpec,
};
use crate::model::{Instance, Solution};
use crate::special::{disk_solve, kpartite_solve, two_disk_solve, unit_disk_solve, DiskMode};
use crate::verify::verify_solution;

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 12] = [
    "instance_id",
    "family",
    "n",
    "num_demands",
    "algorithm",
    "cost",
    "is_bound",
    "vs_bound",
    "exact_opt",
    "ratio_vs_is",
    "wall_time_ms",
    "seed",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Family {
    Random { density: f64 },
    Monotone { density: f64 },
    SThin { s: usize, density: f64 },
    Diagonal,
    Triangular,
    Uniform,
    UnitDisk { r: i64 },
    Disk { max_radius: i64 },
    TwoDisk { small: i64, large: i64 },
    Kpartite { k: usize },
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Random { .. } => "random".into(),
            Family::Monotone { .. } => "monotone".into(),
            Family::SThin { s, .. } => format!("s-thin-{s:03}"),
            Family::Diagonal => "diagonal".into(),
            Family::Triangular => "triangular".into(),
            Family::Uniform => "uniform".into(),
            Family::UnitDisk { .. } => "unit-disk".into(),
            Family::Disk { .. } => "disk".into(),
            Family::TwoDisk { .. } => "two-disk".into(),
            Family::Kpartite { k } => format!("kpartite-{k}"),
        }
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<Instance> {
        match *self {
            Family::Random { density } => gen_random(n, density, seed),
            Family::Monotone { density } => gen_monotone(n, density, seed),
            Family::SThin { s, density } => gen_s_thin(n, s, density, seed),
            Family::Diagonal => gen_diagonal(n),
            Family::Triangular => gen_triangular(n),
            Family::Uniform => gen_uniform(n, seed),
            Family::UnitDisk { r } => gen_unit_disk(n, r, seed),
            Family::Disk { max_radius } => gen_disk(n, RadiiSpec::LogUniform { max: max_radius }, seed),
            Family::TwoDisk { small, large } => gen_disk(
                n,
                RadiiSpec::TwoValued {
                    small,
                    large,
                    p_large: 0.5,
                },
                seed,
            ),
            Family::Kpartite { k } => gen_kpartite(n, k, seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Horizontal,
    Vertical,
    /// Vertical with only demanded endpoints projected.
    VerticalPruned,
    Naive,
    Greedy,
    UnitDisk,
    Disk,
    DiskDense,
    TwoDisk,
    Kpartite,
    Exact,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Horizontal => "horizontal",
            Algorithm::Vertical => "vertical",
            Algorithm::VerticalPruned => "vertical-pruned",
            Algorithm::Naive => "naive",
            Algorithm::Greedy => "greedy",
            Algorithm::UnitDisk => "unit-disk",
            Algorithm::Disk => "disk",
            Algorithm::DiskDense => "disk-dense",
            Algorithm::TwoDisk => "two-disk",
            Algorithm::Kpartite => "kpartite",
            Algorithm::Exact => "exact",
        }
    }

    pub fn run(&self, inst: &Instance, exact: &ExactConfig) -> Result<Solution> {
        match self {
            Algorithm::Horizontal => Ok(horizontal_manhattan(inst)),
            Algorithm::Vertical => vertical_manhattan(inst, default_strips(inst.len())),
            Algorithm::VerticalPruned => Ok(vertical_manhattan_with(
                inst,
                VerticalOptions {
                    strips: None,
                    project_only_demanded: true,
                },
            )?
            .0),
            Algorithm::Naive => Ok(naive_vertical_dc(inst)),
            Algorithm::Greedy => greedy_uniform(inst),
            Algorithm::UnitDisk => unit_disk_solve(inst),
            Algorithm::Disk => Ok(disk_solve(inst, DiskMode::Closest)?.0),
            Algorithm::DiskDense => Ok(disk_solve(inst, DiskMode::Dense)?.0),
            Algorithm::TwoDisk => two_disk_solve(inst),
            Algorithm::Kpartite => kpartite_solve(inst),
            Algorithm::Exact => Ok(exact_opt(inst, exact)?.1),
        }
    }
}

fn default_budget() -> u64 {
    ExactConfig::default().budget
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub families: Vec<Family>,
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub algorithms: Vec<Algorithm>,
    /// Largest demand count for the exact VS oracle; 0 disables it.
    #[serde(default)]
    pub vs_cap: usize,
    /// Largest candidate set for the exact solver; 0 disables it.
    #[serde(default)]
    pub exact_cap: usize,
    #[serde(default = "default_budget")]
    pub exact_budget: u64,
    /// Wall times make output depend on the machine, so they are opt-in.
    #[serde(default)]
    pub record_timing: bool,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GmcError::Schema {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance_id: String,
    pub family: String,
    pub n: usize,
    pub num_demands: usize,
    pub algorithm: String,
    pub cost: usize,
    pub is_bound: usize,
    pub vs_bound: Option<usize>,
    pub exact_opt: Option<usize>,
    pub ratio_vs_is: f64,
    pub wall_time_ms: Option<f64>,
    pub seed: u64,
}

/// A run that produced no record.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchFailure {
    pub instance_id: String,
    pub algorithm: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct BenchOutput {
    pub records: Vec<BenchRecord>,
    pub failures: Vec<BenchFailure>,
}

struct Job {
    family: Family,
    n: usize,
    seed: u64,
}

fn run_job(job: &Job, cfg: &BenchConfig, out: &mut BenchOutput) {
    let family = job.family.name();
    let id = format!("{family}/n{}/s{}", job.n, job.seed);
    let fail = |algorithm: &str, reason: String| BenchFailure {
        instance_id: id.clone(),
        algorithm: algorithm.into(),
        reason,
    };
    let inst = match job.family.generate(job.n, job.seed) {
        Ok(i) => i,
        Err(e) => {
            out.failures.push(fail("generate", e.to_string()));
            return;
        }
    };
    let exact_cfg = ExactConfig {
        cap: cfg.exact_cap,
        budget: cfg.exact_budget,
    };
    let is_bound = boundary_is(&inst).0;
    let vs_bound = (cfg.vs_cap > 0)
        .then(|| vs_exact(&inst, cfg.vs_cap).ok().map(|r| r.0))
        .flatten();
    let exact = (cfg.exact_cap > 0)
        .then(|| exact_opt(&inst, &exact_cfg).ok().map(|r| r.0))
        .flatten();
    for alg in &cfg.algorithms {
        let start = Instant::now();
        let sol = match alg.run(&inst, &exact_cfg) {
            Ok(s) => s,
            Err(e) => {
                out.failures.push(fail(alg.name(), e.to_string()));
                continue;
            }
        };
        let elapsed = start.elapsed().as_secs_f64() * 1000.0;
        let report = verify_solution(&inst, &sol);
        if !report.feasible {
            out.failures.push(fail(
                alg.name(),
                format!("{} demands violated", report.violated.len()),
            ));
            continue;
        }
        out.records.push(BenchRecord {
            instance_id: id.clone(),
            family: family.clone(),
            n: inst.len(),
            num_demands: inst.demands.len(),
            algorithm: alg.name().into(),
            cost: sol.cost(),
            is_bound,
            vs_bound,
            exact_opt: exact,
            ratio_vs_is: sol.cost() as f64 / is_bound.max(1) as f64,
            wall_time_ms: cfg.record_timing.then_some(elapsed),
            seed: job.seed,
        });
    }
}

/// Runs every (family, size, seed) job in parallel; records come back sorted
/// by family, size, seed and algorithm.
pub fn run_bench(cfg: &BenchConfig) -> BenchOutput {
    let jobs: Vec<Job> = cfg
        .families
        .iter()
        .flat_map(|f| {
            cfg.sizes.iter().flat_map(move |&n| {
                cfg.seeds.iter().map(move |&seed| Job {
                    family: f.clone(),
                    n,
                    seed,
                })
            })
        })
        .collect();
    let parts: Vec<BenchOutput> = jobs
        .par_iter()
        .map(|job| {
            let mut out = BenchOutput::default();
            run_job(job, cfg, &mut out);
            out
        })
        .collect();
    let mut all = BenchOutput::default();
    for p in parts {
        all.records.extend(p.records);
        all.failures.extend(p.failures);
    }
    all.records.sort_by(|a, b| {
        (&a.family, a.n, a.seed, &a.algorithm).cmp(&(&b.family, b.n, b.seed, &b.algorithm))
    });
    all.failures
        .sort_by(|a, b| (&a.instance_id, &a.algorithm).cmp(&(&b.instance_id, &b.algorithm)));
    all
}

pub fn write_csv<W: Write>(records: &[BenchRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_COLUMNS)?;
    for r in records {
        wr.write_record([
            r.instance_id.clone(),
            r.family.clone(),
            r.n.to_string(),
            r.num_demands.to_string(),
            r.algorithm.clone(),
            r.cost.to_string(),
            r.is_bound.to_string(),
            r.vs_bound.map(|v| v.to_string()).unwrap_or_default(),
            r.exact_opt.map(|v| v.to_string()).unwrap_or_default(),
            format!("{:.6}", r.ratio_vs_is),
            r.wall_time_ms.map(|v| format!("{v:.3}")).unwrap_or_default(),
            r.seed.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
