use gmconn::approx::{
    ceil_log2, greedy_uniform, horizontal_factor, horizontal_manhattan, horizontal_manhattan_halves,
    naive_vertical_dc, vertical_manhattan, vertical_manhattan_with, VerticalOptions,
};
use gmconn::bounds::{
    boundary_is, interval_hitting_set, interval_mis, ir_exact, vs_certificate_for, vs_exact,
    IntervalSet,
};
use gmconn::exact::{exact_opt, ExactConfig};
use gmconn::generators::{
    gen_disk, gen_kpartite, gen_monotone, gen_random, gen_s_thin, gen_uniform, gen_unit_disk,
    RadiiSpec,
};
use gmconn::io::{instance_from_str, instance_to_string};
use gmconn::model::{normalize, split_monotone, x_groups, Demand, Instance, Point, Pt};
use gmconn::sat::{assignment_from_bits, sat_reduce, CnfFormula};
use gmconn::special::{disk_solve, kpartite_solve, kpartite_sparsify, two_disk_solve, unit_disk_parts, DiskMode};
use gmconn::strips::{balanced_strips, inter_strip_instance, intra_strip_instances, DemandClass};
use gmconn::verify::{is_arboreally_satisfied, m_connected, verify_solution, verify_vs_certificate};
use gmconn::Solution;
use proptest::prelude::*;

fn feasible(inst: &Instance, sol: &Solution) -> bool {
    verify_solution(inst, sol).feasible
}

/// Points on a small lattice, possibly sharing rows and columns, with random pairs.
fn loose_instance() -> impl Strategy<Value = Instance> {
    prop::collection::btree_set((0i64..6, 0i64..6), 2..9).prop_flat_map(|cells| {
        let cells: Vec<(i64, i64)> = cells.into_iter().collect();
        let n = cells.len();
        prop::collection::vec((0..n, 0..n), 0..12).prop_map(move |pairs| {
            let points = cells
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| Point::new(format!("p{i}"), Pt::from_input(x, y).unwrap()))
                .collect();
            let pairs = pairs.into_iter().filter(|(a, b)| a != b).collect();
            Instance::explicit(points, pairs).unwrap()
        })
    })
}

fn small_monotone() -> impl Strategy<Value = Instance> {
    (3usize..=8, 0.1f64..0.6, any::<u64>()).prop_filter_map("at most ten demands", |(n, d, s)| {
        let inst = gen_monotone(n, d, s).unwrap();
        (inst.demands.len() <= 10).then_some(inst)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent(inst in loose_instance()) {
        let (again, report) = normalize(&inst, false).unwrap();
        prop_assert_eq!(&again, &inst);
        prop_assert_eq!(report.reoriented + report.duplicates + report.aligned_dropped, 0);
    }

    #[test]
    fn split_monotone_partitions(inst in loose_instance()) {
        let (up, down) = split_monotone(&inst);
        prop_assert_eq!(up.demands.len() + down.demands.len(), inst.demands.len());
        prop_assert!(up.is_increasing());
    }

    #[test]
    fn balanced_strips_spread_groups(n in 2usize..40, s in 2usize..9, seed: u64) {
        let inst = gen_random(n, 0.2, seed).unwrap();
        let sub = balanced_strips(&inst, s).unwrap();
        let g = x_groups(&inst).len();
        let mut per = vec![0usize; sub.num_strips()];
        for (x, _) in x_groups(&inst) {
            per[sub.strip_of(x)] += 1;
        }
        prop_assert!(per.iter().all(|&c| c <= g.div_ceil(s)));
    }

    #[test]
    fn strip_classes_partition_demands(n in 2usize..30, s in 2usize..6, seed: u64) {
        let inst = gen_random(n, 0.3, seed).unwrap();
        let sub = balanced_strips(&inst, s).unwrap();
        let (inter, _) = inter_strip_instance(&inst, &sub).unwrap();
        let distant = inst
            .demands
            .iter()
            .filter(|d| sub.classify(&inst, d) == DemandClass::Distant)
            .count();
        let same = inst
            .demands
            .iter()
            .filter(|d| sub.classify(&inst, d) == DemandClass::SameStrip)
            .count();
        let intra: usize = intra_strip_instances(&inst, &sub).iter().map(|i| i.demands.len()).sum();
        prop_assert_eq!(intra, same);
        // Distinct distant demands may share projected endpoints.
        prop_assert!(inter.demands.len() <= distant);
        for d in &inter.demands {
            let (p, q) = inter.ends(d);
            prop_assert!(sub.strip_of(q.x) >= sub.strip_of(p.x) + 1);
        }
    }

    #[test]
    fn m_connected_is_symmetric_and_monotone(
        pts in prop::collection::btree_set((0i64..6, 0i64..6), 2..10),
        extra in prop::collection::vec((0i64..6, 0i64..6), 1..4),
    ) {
        let pts: Vec<Pt> = pts.into_iter().map(|(x, y)| Pt::new(x, y)).collect();
        let (p, q) = (pts[0], pts[pts.len() - 1]);
        let a = m_connected(&pts, p, q).unwrap();
        prop_assert_eq!(a, m_connected(&pts, q, p).unwrap());
        let mut more = pts.clone();
        more.extend(extra.into_iter().map(|(x, y)| Pt::new(x, y)));
        more.sort_unstable();
        more.dedup();
        if a {
            prop_assert!(m_connected(&more, p, q).unwrap());
        }
    }

    #[test]
    fn arboreal_iff_pairwise_connected(
        pts in prop::collection::btree_set((0i64..5, 0i64..5), 1..9),
    ) {
        let pts: Vec<Pt> = pts.into_iter().map(|(x, y)| Pt::new(x, y)).collect();
        let all = pts.iter().all(|&p| pts.iter().all(|&q| m_connected(&pts, p, q).unwrap()));
        prop_assert_eq!(is_arboreally_satisfied(&pts), all);
    }

    #[test]
    fn accepted_certificates_are_bounded_by_vs(inst in small_monotone(), mask: u16) {
        let (vs, cert) = vs_exact(&inst, 16).unwrap();
        prop_assert!(verify_vs_certificate(&inst, &cert).unwrap());
        let subset: Vec<Demand> = inst
            .demands
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, d)| *d)
            .collect();
        if let Some(c) = vs_certificate_for(&inst, &subset) {
            prop_assert!(verify_vs_certificate(&inst, &c).unwrap());
            prop_assert!(c.len() <= vs);
        }
    }

    #[test]
    fn hitting_set_matches_independent_set(
        ivs in prop::collection::vec((0i64..30, 1i64..10), 0..25),
    ) {
        let set = IntervalSet::new(ivs.into_iter().map(|(lo, len)| (lo, lo + len))).unwrap();
        prop_assert_eq!(interval_hitting_set(&set).len(), interval_mis(&set).len());
    }

    #[test]
    fn horizontal_half_bound(n in 2usize..40, s in 1usize..12, d in 0.05f64..0.5, seed: u64) {
        let inst = gen_s_thin(n, s, d, seed).unwrap();
        let sol = horizontal_manhattan(&inst);
        prop_assert!(feasible(&inst, &sol));
        let (up, down) = split_monotone(&inst);
        let (hu, hd) = horizontal_manhattan_halves(&inst);
        for (half, hs) in [(up, hu), (down, hd)] {
            let g = x_groups(&half).len();
            prop_assert!(hs.cost() <= horizontal_factor(g) * boundary_is(&half).0);
        }
    }

    #[test]
    fn general_solvers_are_feasible_and_deterministic(n in 1usize..40, d in 0.0f64..0.4, seed: u64) {
        let inst = gen_random(n, d, seed).unwrap();
        let h = horizontal_manhattan(&inst);
        let v = vertical_manhattan(&inst, 3).unwrap();
        let nv = naive_vertical_dc(&inst);
        prop_assert!(feasible(&inst, &h));
        prop_assert!(feasible(&inst, &v));
        prop_assert!(feasible(&inst, &nv));
        let pruned = VerticalOptions { strips: Some(3), project_only_demanded: true };
        prop_assert!(feasible(&inst, &vertical_manhattan_with(&inst, pruned).unwrap().0));
        prop_assert_eq!(h, horizontal_manhattan(&inst));
        prop_assert_eq!(v, vertical_manhattan(&inst, 3).unwrap());
    }

    #[test]
    fn vertical_with_enough_strips_is_one_level(n in 2usize..30, seed: u64) {
        let inst = gen_random(n, 0.3, seed).unwrap();
        let g = x_groups(&inst).len();
        let (sol, stats) = vertical_manhattan_with(
            &inst,
            VerticalOptions { strips: Some(g.max(2)), project_only_demanded: false },
        )
        .unwrap();
        prop_assert!(feasible(&inst, &sol));
        prop_assert!(stats.depth <= 1);
    }

    #[test]
    fn greedy_is_feasible_and_arboreal(n in 1usize..30, seed: u64) {
        let inst = gen_uniform(n, seed).unwrap();
        let sol = greedy_uniform(&inst).unwrap();
        prop_assert!(feasible(&inst, &sol));
        let mut all = inst.positions();
        all.extend_from_slice(&sol.aux);
        prop_assert!(is_arboreally_satisfied(&all));
    }

    #[test]
    fn unit_disk_projection_count(n in 1usize..40, r in 1i64..8, seed: u64) {
        let inst = gen_unit_disk(n, r, seed).unwrap();
        let parts = unit_disk_parts(&inst).unwrap();
        prop_assert!(parts.max_per_point <= 8);
        prop_assert!(parts.outer.cost() <= 8 * inst.len());
        prop_assert!(feasible(&inst, &parts.solution()));
    }

    #[test]
    fn disk_solvers_are_feasible(n in 1usize..30, max in 1i64..16, seed: u64) {
        let inst = gen_disk(n, RadiiSpec::LogUniform { max }, seed).unwrap();
        let (dense, _) = disk_solve(&inst, DiskMode::Dense).unwrap();
        prop_assert!(feasible(&inst, &dense));
        let two = gen_disk(n, RadiiSpec::TwoValued { small: 1, large: max, p_large: 0.4 }, seed).unwrap();
        prop_assert!(feasible(&two, &two_disk_solve(&two).unwrap()));
    }

    #[test]
    fn sparsified_solutions_transfer(n in 2usize..30, k in 2usize..4, seed: u64) {
        let inst = gen_kpartite(n, k, seed).unwrap();
        let sp = kpartite_sparsify(&inst).unwrap().instance;
        prop_assert!(sp.len() <= 8 * boundary_is(&sp).0.max(1) || sp.demands.is_empty());
        for sol in [
            kpartite_solve(&sp).unwrap(),
            horizontal_manhattan(&sp),
            naive_vertical_dc(&sp),
        ] {
            prop_assert!(feasible(&inst, &sol));
        }
        prop_assert!(feasible(&inst, &kpartite_solve(&inst).unwrap()));
    }

    #[test]
    fn instances_round_trip(n in 1usize..20, d in 0.0f64..1.0, seed: u64) {
        let inst = gen_random(n, d, seed).unwrap();
        prop_assert_eq!(instance_from_str(&instance_to_string(&inst).unwrap()).unwrap(), inst);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sandwich_on_small_monotone(inst in small_monotone()) {
        let is = boundary_is(&inst).0;
        let (vs, _) = vs_exact(&inst, 16).unwrap();
        let ir = ir_exact(&inst, 20).unwrap();
        let cfg = ExactConfig { cap: 64, budget: 20_000_000 };
        let (opt, sol) = exact_opt(&inst, &cfg).unwrap();
        prop_assert!(feasible(&inst, &sol));
        prop_assert!(is <= vs && vs <= opt && ir <= vs, "is={} ir={} vs={} opt={}", is, ir, vs, opt);
    }

    #[test]
    fn uniform_optimum_at_least_n_minus_one(n in 2usize..=5, seed: u64) {
        let inst = gen_uniform(n, seed).unwrap();
        let (opt, _) = exact_opt(&inst, &ExactConfig { cap: 64, budget: 20_000_000 }).unwrap();
        prop_assert!(opt + 1 >= n);
    }

    #[test]
    fn gadgets_hold_their_invariants(
        n in 1usize..=4,
        raw in prop::collection::vec(prop::array::uniform3((1i32..=4, any::<bool>())), 1..=4),
    ) {
        let clauses: Vec<[i32; 3]> = raw
            .iter()
            .map(|c| c.map(|(v, neg)| {
                let v = (v - 1) % n as i32 + 1;
                if neg { -v } else { v }
            }))
            .collect();
        let phi = CnfFormula::new(n, clauses).unwrap();
        let g = sat_reduce(&phi).unwrap();
        prop_assert!(g.validate().is_ok(), "{:?}", g.validate());
        prop_assert_eq!(g.certificate.len(), g.alpha);
        prop_assert!(verify_vs_certificate(&g.instance, &g.certificate).unwrap());
        for bits in 0..1u64 << n {
            let a = assignment_from_bits(bits, n);
            let (sol, sat) = g.boolean_solution(&a).unwrap();
            prop_assert_eq!(sol.cost(), g.alpha);
            prop_assert_eq!(&sat, &phi.satisfied_clauses(&a));
        }
    }
}

#[test]
fn log_helpers() {
    assert_eq!(ceil_log2(1), 0);
    assert_eq!(ceil_log2(2), 1);
    assert_eq!(ceil_log2(5), 3);
    assert_eq!(horizontal_factor(4), 6);
}
