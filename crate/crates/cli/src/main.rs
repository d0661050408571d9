use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gmconn::approx::{
    default_strips, greedy_uniform, horizontal_manhattan, naive_vertical_dc, vertical_manhattan_with,
    VerticalOptions,
};
use gmconn::bench::{run_bench, write_csv, BenchConfig};
use gmconn::bounds::{
    boundary_is, interval_hitting_set, ir_exact, vs_exact, IntervalSet, DEFAULT_IR_CAP, DEFAULT_VS_CAP,
};
use gmconn::exact::{exact_opt, ExactConfig};
use gmconn::generators::{
    gen_diagonal, gen_disk, gen_kpartite, gen_monotone, gen_random, gen_s_thin, gen_triangular,
    gen_uniform, gen_unit_disk, RadiiSpec,
};
use gmconn::io::{load_instance, load_solution, save_instance, save_solution, solution_to_string};
use gmconn::sat::{sat_reduce, CnfFormula};
use gmconn::special::{disk_solve, kpartite_solve, two_disk_solve, unit_disk_solve, DiskMode};
use gmconn::svg::{render_svg, Witnesses};
use gmconn::verify::verify_solution;
use gmconn::{GmcError, Instance, Solution};

#[derive(Parser)]
#[command(name = "gmc", version, about = "Minimum generalized Manhattan connections")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    Horizontal,
    Vertical,
    Naive,
    Greedy,
    UnitDisk,
    Disk,
    TwoDisk,
    Kpartite,
    Exact,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Which {
    Is,
    Ir,
    Vs,
    Hitting,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Random,
    Monotone,
    SThin,
    Diagonal,
    Triangular,
    Uniform,
    UnitDisk,
    Disk,
    Kpartite,
}

#[derive(Clone, Copy, ValueEnum)]
enum Radii {
    Constant,
    TwoValued,
    LogUniform,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a solver and write the verified solution.
    Solve {
        #[arg(long, value_enum)]
        alg: Alg,
        #[arg(long = "in")]
        input: PathBuf,
        /// Solution file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Strips per level for the vertical solver.
        #[arg(long)]
        strips: Option<usize>,
        /// Disk solver: project to every fine grid line within reach.
        #[arg(long)]
        dense_projection: bool,
        /// Vertical solver: project only endpoints of strip-leaving demands.
        #[arg(long)]
        project_only_demanded: bool,
        /// Candidate cap for the exact solver.
        #[arg(long)]
        cap: Option<usize>,
        /// Node budget for the exact solver.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check a solution against an instance.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Print lower bounds.
    Bound {
        #[arg(long, value_enum, default_value = "all")]
        which: Which,
        #[arg(long = "in")]
        input: PathBuf,
        /// Demand cap for the exponential bounds.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Generate an instance.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        /// Column count for s-thin instances.
        #[arg(long, default_value_t = 4)]
        s: usize,
        /// Class count for k-partite instances.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Radius for unit-disk and constant disk radii.
        #[arg(long, default_value_t = 2)]
        r: i64,
        #[arg(long, value_enum, default_value = "constant")]
        radii: Radii,
        /// Larger radius (two-valued) or upper end (log-uniform).
        #[arg(long, default_value_t = 8)]
        max_radius: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compile a DIMACS 3-CNF formula into an instance.
    Reduce {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Assignment as a 0/1 string per variable, or `auto` to search for
        /// a satisfying one; writes the matching boolean solution.
        #[arg(long)]
        emit_assignment_solution: Option<String>,
        /// Where the boolean solution goes (default: OUT with `.solution.json`).
        #[arg(long)]
        solution_out: Option<PathBuf>,
    },
    /// Draw an instance as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Overlay a boundary independent set and, if small, VS cuts.
        #[arg(long)]
        witnesses: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a benchmark config and write CSV.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Exit status plus message.
struct Failure(u8, String);

impl From<GmcError> for Failure {
    fn from(e: GmcError) -> Self {
        let code = match e {
            GmcError::CapExceeded { .. } | GmcError::BudgetExceeded(_) => 3,
            GmcError::Infeasible(_) => 1,
            _ => 2,
        };
        Failure(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(2, e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn solve(inst: &Instance, alg: Alg, opts: &SolveOpts) -> gmconn::Result<Solution> {
    match alg {
        Alg::Horizontal => Ok(horizontal_manhattan(inst)),
        Alg::Vertical => Ok(vertical_manhattan_with(
            inst,
            VerticalOptions {
                strips: Some(opts.strips.unwrap_or_else(|| default_strips(inst.len()))),
                project_only_demanded: opts.project_only_demanded,
            },
        )?
        .0),
        Alg::Naive => Ok(naive_vertical_dc(inst)),
        Alg::Greedy => greedy_uniform(inst),
        Alg::UnitDisk => unit_disk_solve(inst),
        Alg::Disk => {
            let mode = if opts.dense {
                DiskMode::Dense
            } else {
                DiskMode::Closest
            };
            Ok(disk_solve(inst, mode)?.0)
        }
        Alg::TwoDisk => two_disk_solve(inst),
        Alg::Kpartite => kpartite_solve(inst),
        Alg::Exact => {
            let mut cfg = ExactConfig::default();
            if let Some(c) = opts.cap {
                cfg.cap = c;
            }
            if let Some(b) = opts.budget {
                cfg.budget = b;
            }
            Ok(exact_opt(inst, &cfg)?.1)
        }
    }
}

struct SolveOpts {
    strips: Option<usize>,
    dense: bool,
    project_only_demanded: bool,
    cap: Option<usize>,
    budget: Option<u64>,
}

fn parse_assignment(spec: &str, phi: &CnfFormula) -> Result<Vec<bool>, Failure> {
    if spec == "auto" {
        return phi
            .solve_brute_force()
            .ok_or_else(|| Failure(1, "formula is unsatisfiable".into()));
    }
    if spec.len() != phi.n || !spec.chars().all(|c| c == '0' || c == '1') {
        return Err(Failure(
            2,
            format!("assignment must be {} characters of 0/1, got `{spec}`", phi.n),
        ));
    }
    Ok(spec.chars().map(|c| c == '1').collect())
}

fn default_solution_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.solution.json"))
}

fn run(cli: Cli) -> CliResult {
    match cli.cmd {
        Cmd::Solve {
            alg,
            input,
            out,
            strips,
            dense_projection,
            project_only_demanded,
            cap,
            budget,
        } => {
            let inst = load_instance(&input)?;
            let opts = SolveOpts {
                strips,
                dense: dense_projection,
                project_only_demanded,
                cap,
                budget,
            };
            let sol = solve(&inst, alg, &opts)?;
            let report = verify_solution(&inst, &sol);
            if !report.feasible {
                return Err(Failure(
                    1,
                    format!("solver output violates {} demands", report.violated.len()),
                ));
            }
            match out {
                Some(p) => save_solution(&sol, p)?,
                None => print!("{}", solution_to_string(&sol)),
            }
            eprintln!("cost {}", sol.cost());
            Ok(())
        }
        Cmd::Verify { input, solution } => {
            let inst = load_instance(&input)?;
            let sol = load_solution(&solution)?;
            let report = verify_solution(&inst, &sol);
            if report.feasible {
                println!("feasible, cost {}", sol.cost());
                Ok(())
            } else {
                for d in &report.violated {
                    println!("violated {} {}", inst.points[d.a].id, inst.points[d.b].id);
                }
                Err(Failure(1, format!("{} demands violated", report.violated.len())))
            }
        }
        Cmd::Bound { which, input, cap } => {
            let inst = load_instance(&input)?;
            let all = which == Which::All;
            if all || which == Which::Is {
                println!("is {}", boundary_is(&inst).0);
            }
            if all || which == Which::Hitting {
                println!("hitting {}", interval_hitting_set(&IntervalSet::of_demands(&inst)).len());
            }
            let mut over_cap = None;
            if all || which == Which::Ir {
                match ir_exact(&inst, cap.unwrap_or(DEFAULT_IR_CAP)) {
                    Ok(v) => println!("ir {v}"),
                    Err(e) => over_cap = Some(e),
                }
            }
            if all || which == Which::Vs {
                match vs_exact(&inst, cap.unwrap_or(DEFAULT_VS_CAP)) {
                    Ok((v, _)) => println!("vs {v}"),
                    Err(e) => over_cap = Some(e),
                }
            }
            match over_cap {
                Some(e) => Err(e.into()),
                None => Ok(()),
            }
        }
        Cmd::Gen {
            kind,
            n,
            density,
            s,
            k,
            r,
            radii,
            max_radius,
            seed,
            out,
        } => {
            let inst = match kind {
                GenKind::Random => gen_random(n, density, seed),
                GenKind::Monotone => gen_monotone(n, density, seed),
                GenKind::SThin => gen_s_thin(n, s, density, seed),
                GenKind::Diagonal => gen_diagonal(n),
                GenKind::Triangular => gen_triangular(n),
                GenKind::Uniform => gen_uniform(n, seed),
                GenKind::UnitDisk => gen_unit_disk(n, r, seed),
                GenKind::Disk => {
                    let spec = match radii {
                        Radii::Constant => RadiiSpec::Constant(r),
                        Radii::TwoValued => RadiiSpec::TwoValued {
                            small: r,
                            large: max_radius,
                            p_large: 0.5,
                        },
                        Radii::LogUniform => RadiiSpec::LogUniform { max: max_radius },
                    };
                    gen_disk(n, spec, seed)
                }
                GenKind::Kpartite => gen_kpartite(n, k, seed),
            }?;
            save_instance(&inst, &out)?;
            eprintln!("{} points, {} demands", inst.len(), inst.demands.len());
            Ok(())
        }
        Cmd::Reduce {
            cnf,
            out,
            emit_assignment_solution,
            solution_out,
        } => {
            let phi = CnfFormula::parse_dimacs(&fs::read_to_string(&cnf)?)?;
            if phi.has_repeated_literals() {
                eprintln!("note: some clause repeats a variable");
            }
            let g = sat_reduce(&phi)?;
            save_instance(&g.instance, &out)?;
            println!("alpha {}", g.alpha);
            if let Some(spec) = emit_assignment_solution {
                let a = parse_assignment(&spec, &phi)?;
                let (sol, sat) = g.boolean_solution(&a)?;
                let path = solution_out.unwrap_or_else(|| default_solution_path(&out));
                save_solution(&sol, &path)?;
                println!("satisfied {}/{}", sat.len(), phi.m());
            }
            Ok(())
        }
        Cmd::Render {
            input,
            solution,
            witnesses,
            out,
        } => {
            let inst = load_instance(&input)?;
            let sol = solution.map(load_solution).transpose()?;
            let wit = witnesses.then(|| Witnesses {
                boundary: boundary_is(&inst).1,
                cuts: vs_exact(&inst, DEFAULT_VS_CAP)
                    .map(|(_, c)| c.cuts)
                    .unwrap_or_default(),
            });
            fs::write(out, render_svg(&inst, sol.as_ref(), wit.as_ref()))?;
            Ok(())
        }
        Cmd::Bench { config, out } => {
            let cfg = BenchConfig::from_json(&fs::read_to_string(&config)?)?;
            let res = run_bench(&cfg);
            for f in &res.failures {
                eprintln!("skipped {} {}: {}", f.instance_id, f.algorithm, f.reason);
            }
            write_csv(&res.records, fs::File::create(&out)?)?;
            eprintln!("{} records", res.records.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
