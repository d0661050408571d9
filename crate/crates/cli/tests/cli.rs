use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmc"))
        .args(args)
        .output()
        .expect("run gmc")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gen_solve_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    let sol = dir.path().join("s.json");
    let o = gmc(&["gen", "--kind", "random", "--n", "12", "--density", "0.4", "--seed", "3", "--out", p(&inst)]);
    assert!(o.status.success(), "{o:?}");
    for alg in ["horizontal", "vertical", "naive"] {
        let o = gmc(&["solve", "--alg", alg, "--in", p(&inst), "--out", p(&sol)]);
        assert!(o.status.success(), "{alg}: {o:?}");
        let o = gmc(&["verify", "--in", p(&inst), "--solution", p(&sol)]);
        assert_eq!(o.status.code(), Some(0), "{alg}");
        assert!(stdout(&o).starts_with("feasible"));
    }
}

#[test]
fn verify_reports_violations_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    let sol = dir.path().join("s.json");
    fs::write(
        &inst,
        r#"{"version":1,"kind":"explicit","points":[{"id":"a","x":0,"y":0},{"id":"b","x":2,"y":2}],"demands":[["a","b"]]}"#,
    )
    .unwrap();
    fs::write(&sol, r#"{"version":1,"aux":[]}"#).unwrap();
    let o = gmc(&["verify", "--in", p(&inst), "--solution", p(&sol)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violated a b"));
    fs::write(&sol, r#"{"version":1,"aux":[[0,2]]}"#).unwrap();
    assert_eq!(gmc(&["verify", "--in", p(&inst), "--solution", p(&sol)]).status.code(), Some(0));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    fs::write(&inst, r#"{"version":1,"kind":"uniform","points":[],"extra":0}"#).unwrap();
    let o = gmc(&["bound", "--in", p(&inst)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("extra"));
    let missing = dir.path().join("nope.json");
    assert_eq!(gmc(&["bound", "--in", p(&missing)]).status.code(), Some(2));
    assert_eq!(gmc(&["solve", "--alg", "bogus", "--in", p(&inst)]).status.code(), Some(2));
}

#[test]
fn caps_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    gmc(&["gen", "--kind", "random", "--n", "10", "--density", "1.0", "--out", p(&inst)]);
    let o = gmc(&["bound", "--which", "vs", "--in", p(&inst), "--cap", "5"]);
    assert_eq!(o.status.code(), Some(3));
    let o = gmc(&["solve", "--alg", "exact", "--in", p(&inst), "--cap", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bounds_on_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("d.json");
    gmc(&["gen", "--kind", "diagonal", "--n", "4", "--out", p(&inst)]);
    let o = gmc(&["bound", "--in", p(&inst)]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("ir 1\n") && out.contains("vs 4\n"), "{out}");
}

#[test]
fn reduce_emits_alpha_and_solution() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    let inst = dir.path().join("g.json");
    fs::write(&cnf, "p cnf 4 3\n1 -2 3 0\n1 2 -4 0\n-1 -2 4 0\n").unwrap();
    let o = gmc(&["reduce", "--cnf", p(&cnf), "--out", p(&inst), "--emit-assignment-solution", "auto"]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert!(out.contains("alpha 52") && out.contains("satisfied 3/3"), "{out}");
    let sol = dir.path().join("g.solution.json");
    let o = gmc(&["verify", "--in", p(&inst), "--solution", p(&sol)]);
    assert!(stdout(&o).contains("feasible, cost 52"));
    let o = gmc(&["reduce", "--cnf", p(&cnf), "--out", p(&inst), "--emit-assignment-solution", "01"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn render_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    gmc(&["gen", "--kind", "triangular", "--n", "4", "--out", p(&inst)]);
    assert!(gmc(&["render", "--in", p(&inst), "--witnesses", "--out", p(&a)]).status.success());
    gmc(&["render", "--in", p(&inst), "--witnesses", "--out", p(&b)]);
    let svg = fs::read_to_string(&a).unwrap();
    assert_eq!(svg, fs::read_to_string(&b).unwrap());
    assert!(svg.contains("<svg") && svg.contains("witnesses"));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("b.json");
    let out = dir.path().join("b.csv");
    fs::write(
        &cfg,
        r#"{"families":[{"family":"s-thin","s":4,"density":0.3}],"sizes":[8],"seeds":[1,2],
            "algorithms":["horizontal","naive"],"vs_cap":10,"exact_cap":0}"#,
    )
    .unwrap();
    assert!(gmc(&["bench", "--config", p(&cfg), "--out", p(&out)]).status.success());
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("instance_id,family,n,num_demands,algorithm,cost,is_bound,vs_bound,exact_opt,ratio_vs_is,wall_time_ms,seed\n"));
}

#[test]
fn special_solvers_from_cli() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    let cases: [(&[&str], &str); 4] = [
        (&["--kind", "unit-disk", "--r", "3"], "unit-disk"),
        (&["--kind", "disk", "--radii", "log-uniform", "--max-radius", "6"], "disk"),
        (&["--kind", "disk", "--radii", "two-valued", "--r", "1", "--max-radius", "4"], "two-disk"),
        (&["--kind", "kpartite", "--k", "3"], "kpartite"),
    ];
    for (flags, alg) in cases {
        let mut args = vec!["gen", "--n", "14", "--seed", "5", "--out", p(&inst)];
        args.extend_from_slice(flags);
        assert!(gmc(&args).status.success(), "{alg}");
        let o = gmc(&["solve", "--alg", alg, "--in", p(&inst)]);
        assert!(o.status.success(), "{alg}: {o:?}");
    }
    gmc(&["gen", "--kind", "uniform", "--n", "5", "--out", p(&inst)]);
    assert!(gmc(&["solve", "--alg", "greedy", "--in", p(&inst)]).status.success());
    assert!(gmc(&["solve", "--alg", "exact", "--in", p(&inst)]).status.success());
}
