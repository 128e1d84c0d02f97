use std::sync::Arc;

use lnls_core::embedding::{make_origin_embeddings, DefectSpec, HardwareGraph};
use lnls_core::generators::{gen_ferromagnet, gen_pm_j};
use lnls_core::ising::{build_subproblem_on, induced_graph, IsingModel, SpinState};
use lnls_core::lattice::{LatticeKind, LatticeTopology, SubspaceShape};
use lnls_core::lnls::{
    run_lnls, run_workflow_variant, subsolve, ClockKind, LnlsConfig, RegionTemplate, SubsolverKind, SubsolverSpec,
    TimingModel, Variant,
};
use lnls_core::rng::stream;
use lnls_core::samplers::brute_force;
use proptest::prelude::*;
use rand::Rng;

fn random_model(n: usize, density: f64, seed: u64) -> IsingModel {
    let mut rng = stream(seed, 0);
    let mut terms = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            if rng.random::<f64>() < density {
                terms.push((a, b, rng.random_range(-2.0..2.0)));
            }
        }
    }
    let h = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    IsingModel::from_terms(n, &terms, h).unwrap()
}

/// Minimum of H over assignments of `members` with everything else held at `x`.
fn restricted_minimum(model: &IsingModel, x: &[i8], members: &[u32]) -> f64 {
    let mut best = f64::INFINITY;
    let mut y = x.to_vec();
    for code in 0u32..1 << members.len() {
        for (b, &m) in members.iter().enumerate() {
            y[m as usize] = if code >> b & 1 == 1 { 1 } else { -1 };
        }
        best = best.min(model.energy(&y).unwrap());
    }
    best
}

fn cubic(l: usize) -> LatticeTopology {
    LatticeTopology::cubic(l).unwrap()
}

fn shape_config(topo: &LatticeTopology, shape: [usize; 3], spec: SubsolverSpec, seed: u64) -> LnlsConfig {
    let r = RegionTemplate::from_shape(topo, &SubspaceShape::Cuboid(shape)).unwrap();
    LnlsConfig::new(vec![r], spec, seed)
}

fn assert_monotone(energies: impl Iterator<Item = f64>) {
    let e: Vec<f64> = energies.collect();
    for w in e.windows(2) {
        assert!(w[1] <= w[0], "energy increased: {} -> {}", w[0], w[1]);
    }
}

#[test]
fn infinite_target_stops_before_first_iteration() {
    let topo = cubic(4);
    let model = gen_pm_j(&topo, 1).unwrap();
    let mut cfg = shape_config(&topo, [2, 2, 2], SubsolverSpec::sa(16), 3);
    cfg.e_target = f64::INFINITY;
    let (x, rec) = run_lnls(&model, &cfg).unwrap();
    assert_eq!(rec.iterations(), 0);
    assert_eq!(rec.points[0].energy, model.energy(&x).unwrap());
}

#[test]
fn full_region_brute_force_is_optimal_in_one_iteration() {
    for seed in 0..5 {
        let model = random_model(14, 0.3, seed);
        let all: Vec<u32> = (0..14).collect();
        let r = RegionTemplate::explicit(model.graph(), all).unwrap();
        let mut cfg = LnlsConfig::new(vec![r], SubsolverSpec::of_kind(SubsolverKind::BruteForce), seed);
        cfg.max_iterations = 1;
        let (x, rec) = run_lnls(&model, &cfg).unwrap();
        let (_, e0) = brute_force(&model).unwrap();
        assert!((rec.final_energy() - e0).abs() < 1e-9);
        assert!((model.energy(&x).unwrap() - e0).abs() < 1e-9);
    }
}

#[test]
fn one_iteration_matches_restricted_brute_force() {
    for seed in 0..20 {
        let model = random_model(12, 0.4, 100 + seed);
        let mut rng = stream(seed, 9);
        let k = rng.random_range(1..=8);
        let mut members: Vec<u32> = (0..12).collect();
        for i in 0..k {
            let j = rng.random_range(i..12);
            members.swap(i, j);
        }
        members.truncate(k);
        let r = RegionTemplate::explicit(model.graph(), members.clone()).unwrap();
        let mut cfg = LnlsConfig::new(vec![r], SubsolverSpec::of_kind(SubsolverKind::BruteForce), seed);
        cfg.max_iterations = 1;
        let x0 = SpinState::random(12, &mut stream(seed, 5));
        cfg.initial_state = Some(x0.clone());
        let (_, rec) = run_lnls(&model, &cfg).unwrap();
        let want = restricted_minimum(&model, &x0, &members);
        assert!((rec.final_energy() - want).abs() < 1e-9, "seed {seed}: {} vs {want}", rec.final_energy());
    }
}

#[test]
fn runs_are_deterministic() {
    let topo = cubic(6);
    let model = gen_pm_j(&topo, 4).unwrap();
    let cfg = shape_config(&topo, [3, 3, 3], SubsolverSpec::sa(32), 11);
    let (xa, a) = run_lnls(&model, &cfg).unwrap();
    let (xb, b) = run_lnls(&model, &cfg).unwrap();
    assert_eq!(xa, xb);
    let strip = |r: &lnls_core::lnls::BurnDownRecord| {
        r.points.iter().map(|p| (p.energy, p.accepted, p.sim_time_ms, p.offset)).collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
    let (_, c) = run_lnls(&model, &LnlsConfig { seed: 12, ..cfg }).unwrap();
    assert_ne!(strip(&a), strip(&c));
}

#[test]
fn clock_is_the_sum_of_attributed_times() {
    let topo = cubic(6);
    let model = gen_pm_j(&topo, 2).unwrap();
    let mut cfg = shape_config(&topo, [3, 3, 3], SubsolverSpec::sa(20), 5);
    cfg.max_iterations = 30;
    let (_, rec) = run_lnls(&model, &cfg).unwrap();
    let per_call = 20.0 * 27.0 * 33.0 * 1e-6;
    let mut clock = 0.0;
    for p in &rec.points[1..] {
        clock += per_call;
        assert_eq!(p.sim_time_ms, clock);
    }
    assert_eq!(rec.points[0].sim_time_ms, 0.0);

    cfg.timing = TimingModel { clock_override: Some(ClockKind::Qpu), qpu_reads: Some(25), ..TimingModel::default() };
    let (_, rec) = run_lnls(&model, &cfg).unwrap();
    let mut clock = 0.0;
    for p in &rec.points[1..] {
        clock += 17.5;
        assert_eq!(p.sim_time_ms, clock);
    }
}

#[test]
fn offsets_are_chosen_uniformly() {
    let topo = cubic(4);
    let model = gen_pm_j(&topo, 8).unwrap();
    let mut cfg = shape_config(&topo, [2, 2, 2], SubsolverSpec::of_kind(SubsolverKind::Greedy), 21);
    cfg.max_iterations = 12_800;
    let (_, rec) = run_lnls(&model, &cfg).unwrap();
    let mut counts = vec![0usize; 64];
    for p in &rec.points[1..] {
        counts[p.offset.unwrap()] += 1;
    }
    let expect = 12_800.0 / 64.0;
    let sigma = (12_800.0 * (1.0 / 64.0) * (63.0 / 64.0f64)).sqrt();
    for (o, &c) in counts.iter().enumerate() {
        assert!((c as f64 - expect).abs() < 4.0 * sigma, "offset {o}: {c}");
    }
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    // 63 degrees of freedom; 99.9th percentile ≈ 103.4
    assert!(chi2 < 103.4, "chi-square {chi2}");
}

#[test]
fn regions_are_chosen_uniformly() {
    let topo = cubic(6);
    let model = gen_pm_j(&topo, 8).unwrap();
    let regions = SubspaceShape::Cuboid([2, 2, 4])
        .rotations()
        .iter()
        .map(|s| RegionTemplate::from_shape(&topo, s).unwrap())
        .collect::<Vec<_>>();
    assert_eq!(regions.len(), 3);
    let mut cfg = LnlsConfig::new(regions, SubsolverSpec::of_kind(SubsolverKind::Greedy), 2);
    cfg.max_iterations = 3000;
    let (_, rec) = run_lnls(&model, &cfg).unwrap();
    let mut counts = [0usize; 3];
    for p in &rec.points[1..] {
        counts[p.region.unwrap()] += 1;
    }
    let sigma = (3000.0 * (1.0 / 3.0) * (2.0 / 3.0f64)).sqrt();
    assert!(counts.iter().all(|&c| (c as f64 - 1000.0).abs() < 4.0 * sigma), "{counts:?}");
}

#[test]
fn small_ferromagnet_converges() {
    let topo = cubic(6);
    let model = gen_ferromagnet(&topo).unwrap();
    let mut cfg = shape_config(&topo, [4, 4, 4], SubsolverSpec::sa(1024), 1);
    cfg.e_target = -3.0 * 216.0;
    cfg.max_iterations = 60;
    let (_, rec) = run_lnls(&model, &cfg).unwrap();
    assert_eq!(rec.final_energy(), -648.0);
    assert!(rec.iterations() < 60);
}

#[test]
fn post_process_is_a_no_op_after_exact_proposals() {
    let topo = cubic(4);
    let model = gen_pm_j(&topo, 6).unwrap();
    let mut cfg = shape_config(&topo, [2, 2, 2], SubsolverSpec::of_kind(SubsolverKind::BruteForce), 4);
    cfg.max_iterations = 40;
    let (xa, a) = run_workflow_variant(&model, &cfg).unwrap();
    cfg.variant = Variant::PostProcess;
    let (xb, b) = run_workflow_variant(&model, &cfg).unwrap();
    assert_eq!(xa, xb);
    let e = |r: &lnls_core::lnls::BurnDownRecord| r.points.iter().map(|p| p.energy).collect::<Vec<_>>();
    assert_eq!(e(&a), e(&b));
}

#[test]
fn parallel_process_drops_at_least_as_far_on_iteration_one() {
    let topo = cubic(6);
    for seed in 0..5 {
        let model = gen_pm_j(&topo, seed).unwrap();
        let mut cfg = shape_config(&topo, [3, 3, 3], SubsolverSpec::sa(64), seed);
        cfg.max_iterations = 1;
        let (_, a) = run_workflow_variant(&model, &cfg).unwrap();
        cfg.variant = Variant::ParallelProcess;
        let (x, b) = run_workflow_variant(&model, &cfg).unwrap();
        assert_eq!(a.points[0].energy, b.points[0].energy);
        assert!(b.points[1].energy <= a.points[1].energy);
        assert!(b.points[1].energy < a.points[1].energy);
        assert!(model.is_local_minimum(&x));
        assert_eq!(a.points[1].sim_time_ms, b.points[1].sim_time_ms);
    }
}

#[test]
fn recorded_energy_tracks_the_state() {
    let topo = cubic(5);
    let model = gen_pm_j(&topo, 3).unwrap();
    for variant in [Variant::Default, Variant::PostProcess, Variant::ParallelProcess] {
        let mut cfg = shape_config(&topo, [3, 3, 3], SubsolverSpec::sa(16), 9);
        cfg.variant = variant;
        let (x, rec) = run_lnls(&model, &cfg).unwrap();
        assert!((rec.final_energy() - model.energy(&x).unwrap()).abs() < 1e-9);
        assert_monotone(rec.points.iter().map(|p| p.energy));
    }
}

#[test]
fn variant_names_round_trip() {
    for v in [Variant::Default, Variant::PostProcess, Variant::ParallelProcess] {
        assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
    }
    assert!("sideways".parse::<Variant>().is_err());
    for k in ["sa", "greedy", "brute-force", "programmed-sa", "programmed-random"] {
        assert_eq!(k.parse::<SubsolverKind>().unwrap().to_string(), k);
    }
}

#[test]
fn configuration_errors() {
    let topo = cubic(4);
    let model = gen_pm_j(&topo, 1).unwrap();
    let mut cfg = shape_config(&topo, [2, 2, 2], SubsolverSpec::sa(8), 1);
    cfg.max_iterations = 0;
    assert!(run_lnls(&model, &cfg).is_err());
    let cfg = LnlsConfig::new(vec![], SubsolverSpec::sa(8), 1);
    assert!(run_lnls(&model, &cfg).is_err());
    let cfg = shape_config(&topo, [2, 2, 2], SubsolverSpec::of_kind(SubsolverKind::ProgrammedRandom), 1);
    let err = run_lnls(&model, &cfg).unwrap_err().to_string();
    assert!(err.contains("embedding"), "{err}");
    let other = gen_pm_j(&cubic(5), 1).unwrap();
    assert!(run_lnls(&other, &shape_config(&topo, [2, 2, 2], SubsolverSpec::sa(8), 1)).is_err());
}

#[test]
fn single_variable_sa_follows_the_field() {
    let model = IsingModel::from_terms(1, &[], vec![-3.0]).unwrap();
    let g = Arc::new(induced_graph(model.graph(), &[0]));
    let sub = build_subproblem_on(&model, &[-1], &[0], g).unwrap();
    let p = subsolve(&sub, &SubsolverSpec::sa(4), &TimingModel::default(), None, 1).unwrap();
    assert_eq!(p.assignments, vec![vec![1]]);
    assert_eq!(sub.energy(&p.assignments[0]).unwrap(), -3.0);
}

#[test]
fn sa_subsolver_time_is_sweeps_times_size_times_rate() {
    let topo = cubic(16);
    let model = gen_pm_j(&topo, 1).unwrap();
    let members = SubspaceShape::Cuboid([15, 15, 12]).origin_members(&topo).unwrap();
    let g = Arc::new(induced_graph(model.graph(), &members));
    let x = SpinState::uniform(model.num_vertices(), 1);
    let sub = build_subproblem_on(&model, &x, &members, g).unwrap();
    let p = subsolve(&sub, &SubsolverSpec::sa(198), &TimingModel::default(), None, 1).unwrap();
    assert_eq!(p.spin_updates, 198 * 2700);
    assert!((p.time_ms - 198.0 * 2700.0 * 33.0e-6).abs() < 1e-9);
}

fn embedded_setup() -> (LatticeTopology, IsingModel, Vec<RegionTemplate>) {
    let topo = cubic(6);
    let model = gen_pm_j(&topo, 2).unwrap();
    let hw = Arc::new(HardwareGraph::pegasus(6, &DefectSpec::None).unwrap());
    let regions = make_origin_embeddings(&hw, LatticeKind::Cubic, &SubspaceShape::Cuboid([4, 4, 4]))
        .unwrap()
        .into_iter()
        .map(|e| RegionTemplate::from_embedding(&topo, Arc::new(e), Arc::clone(&hw)).unwrap())
        .collect();
    (topo, model, regions)
}

#[test]
fn programmed_random_returns_uniform_reads() {
    let (_, model, regions) = embedded_setup();
    let spec = SubsolverSpec::of_kind(SubsolverKind::ProgrammedRandom);
    let mut cfg = LnlsConfig::new(regions, spec, 3);
    cfg.max_iterations = 20;
    let (_, rec) = run_lnls(&model, &cfg).unwrap();
    assert_monotone(rec.points.iter().map(|p| p.energy));
    assert_eq!(rec.points[20].sim_time_ms, 20.0 * 17.5);

    let samples = lnls_core::lnls::random_hardware_samples(25, 100, &mut stream(4, 0));
    assert_eq!(samples.len(), 25);
    assert!(samples.iter().all(|s| s.len() == 100 && s.iter().all(|&v| v == 1 || v == -1)));
    let plus = samples.iter().flatten().filter(|&&v| v == 1).count() as f64;
    // 2500 fair coins: 4σ = 100
    assert!((plus - 1250.0).abs() < 100.0, "{plus}");
}

#[test]
fn programmed_sa_improves_on_random_reads() {
    let (_, model, regions) = embedded_setup();
    let mut spec = SubsolverSpec::of_kind(SubsolverKind::ProgrammedSa);
    spec.reads = 4;
    spec.sweeps = 64;
    let mut cfg = LnlsConfig::new(regions.clone(), spec, 3);
    cfg.max_iterations = 12;
    let (x, sa) = run_lnls(&model, &cfg).unwrap();
    assert_monotone(sa.points.iter().map(|p| p.energy));
    assert!((sa.final_energy() - model.energy(&x).unwrap()).abs() < 1e-9);
    cfg.subsolver.kind = SubsolverKind::ProgrammedRandom;
    let (_, rnd) = run_lnls(&model, &cfg).unwrap();
    assert!(sa.final_energy() < rnd.final_energy());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn burn_down_never_increases(seed in 0u64..1000, kind in 0usize..3, variant in 0usize..3) {
        let topo = cubic(4);
        let model = gen_pm_j(&topo, seed).unwrap();
        let spec = match kind {
            0 => SubsolverSpec::sa(8),
            1 => SubsolverSpec::of_kind(SubsolverKind::Greedy),
            _ => SubsolverSpec::of_kind(SubsolverKind::BruteForce),
        };
        let mut cfg = shape_config(&topo, [2, 2, 2], spec, seed);
        cfg.max_iterations = 24;
        cfg.variant = [Variant::Default, Variant::PostProcess, Variant::ParallelProcess][variant];
        let (_, rec) = run_lnls(&model, &cfg).unwrap();
        for w in rec.points.windows(2) {
            prop_assert!(w[1].energy <= w[0].energy);
            prop_assert!(w[1].sim_time_ms > w[0].sim_time_ms);
        }
    }
}
