use proptest::prelude::*;
use proptest::strategy::ValueTree;

use finstab::balance::{compute_sheets, scale_assets, sheets_unchecked, WeightedNetwork};
use finstab::contagion::reference::reference_cascade;
use finstab::contagion::{
    apply_initial_shock, cascade, select_shock_set, vulnerability_index, CascadeResult, SheetPolicy, ShockMechanism,
    ShockSpec,
};
use finstab::generate::erdos_renyi;
use finstab::sweep::{assign_model, Model};
use finstab::Seed;

#[derive(Debug, Clone)]
struct Instance {
    net: WeightedNetwork,
    shocked: Vec<usize>,
    phi: f64,
}

fn model_of(i: u8) -> Model {
    match i {
        0 => Model::Homogeneous,
        1 => Model::Het1095,
        _ => Model::Het2060,
    }
}

/// Random ER network with random totals and an arbitrary shocked subset.
/// Heterogeneous draws that have no placeable edge fall back to the
/// homogeneous model.
fn instance(max_n: usize) -> impl Strategy<Value = Instance> {
    instance_in(2, max_n)
}

fn instance_in(min_n: usize, max_n: usize) -> impl Strategy<Value = Instance> {
    (min_n..=max_n, 0.5f64..6.0, any::<u64>(), 0u8..3, 0.1f64..4.0, 0.02f64..0.6, 0.01f64..0.39, any::<u64>()).prop_map(
        |(n, d, seed, model, ei, gamma, gap, mask)| {
            let graph = erdos_renyi(n, d, Seed(seed)).unwrap();
            let net = assign_model(graph.clone(), model_of(model), ei, gamma, Seed(seed).derive("hetero"))
                .or_else(|_| assign_model(graph, Model::Homogeneous, ei, gamma, Seed(0)))
                .unwrap();
            let mut shocked: Vec<usize> = (0..n).filter(|v| mask >> (v % 64) & 1 == 1).collect();
            if shocked.is_empty() {
                shocked.push((mask % n as u64) as usize);
            }
            Instance { net, shocked, phi: (gamma + gap).min(1.0) }
        },
    )
}

fn run(inst: &Instance) -> CascadeResult {
    cascade(&inst.net, &sheets_unchecked(&inst.net), &inst.shocked, inst.phi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matches_reference(inst in instance(12)) {
        let sheets = sheets_unchecked(&inst.net);
        let fast = cascade(&inst.net, &sheets, &inst.shocked, inst.phi);
        let slow = reference_cascade(&inst.net, &sheets, &inst.shocked, inst.phi);
        prop_assert_eq!(&fast.final_dead, &slow.final_dead);
        prop_assert_eq!(fast.rounds, slow.rounds);
        prop_assert_eq!(&fast.dead_trace, &slow.dead_trace);
    }

    #[test]
    fn terminates_within_n_plus_one_rounds(inst in instance(40)) {
        let r = run(&inst);
        prop_assert!(r.rounds >= 1);
        prop_assert!(r.rounds <= inst.net.n() + 1);
    }

    #[test]
    fn dead_set_only_grows(inst in instance(40)) {
        let r = run(&inst);
        prop_assert_eq!(r.dead_trace.len(), r.rounds + 1);
        prop_assert_eq!(r.dead_trace[0], 0);
        prop_assert!(r.dead_trace.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(*r.dead_trace.last().unwrap(), r.dead_count());
        let mut seen: Vec<usize> = r.failures.iter().map(|f| f.node).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, r.final_dead.clone());
    }

    #[test]
    fn outflow_is_capped_by_borrowing(inst in instance(40)) {
        let sheets = sheets_unchecked(&inst.net);
        let r = cascade(&inst.net, &sheets, &inst.shocked, inst.phi);
        let died_at: Vec<Option<usize>> = (0..inst.net.n())
            .map(|v| r.failures.iter().find(|f| f.node == v).map(|f| f.round))
            .collect();
        for f in &r.failures {
            let b = sheets[f.node].borrowing;
            prop_assert!(f.outflow <= b + 1e-9);
            // Creditors still alive at the start of the failing round.
            let alive_creditors = inst.net.graph.edges().iter()
                .filter(|&&(u, v)| v == f.node && died_at[u].is_none_or(|t| t >= f.round))
                .count();
            let expect = if alive_creditors > 0 { (-f.equity).min(b) } else { 0.0 };
            prop_assert!((f.outflow - expect).abs() <= 1e-9, "outflow {} vs {}", f.outflow, expect);
        }
    }

    #[test]
    fn shocked_banks_below_zero_die(inst in instance(40)) {
        let sheets = sheets_unchecked(&inst.net);
        let r = cascade(&inst.net, &sheets, &inst.shocked, inst.phi);
        let c0 = apply_initial_shock(&sheets, &inst.shocked, inst.phi);
        for &v in &inst.shocked {
            if c0[v] < 0.0 {
                prop_assert!(r.final_dead.binary_search(&v).is_ok());
            }
        }
    }

    #[test]
    fn outcome_is_scale_invariant(inst in instance(30)) {
        let base = run(&inst);
        for mu in [0.5, 3.0, 7.0] {
            let scaled = scale_assets(&inst.net, mu).unwrap();
            let r = cascade(&scaled, &sheets_unchecked(&scaled), &inst.shocked, inst.phi);
            prop_assert_eq!(&r.final_dead, &base.final_dead, "mu = {}", mu);
        }
    }

    #[test]
    fn coordinated_picks_largest_in_degrees(inst in instance(40), k in 0.05f64..1.0, seed in any::<u64>()) {
        let n = inst.net.n();
        prop_assume!((k * n as f64 + 0.5).floor() >= 1.0);
        let unweighted: Vec<f64> = inst.net.graph.in_degrees().into_iter().map(|d| d as f64).collect();
        let weighted = inst.net.weighted_in_degrees();
        for (mech, score) in [
            (ShockMechanism::CoordinatedUnweighted, unweighted),
            (ShockMechanism::CoordinatedWeighted, weighted),
        ] {
            let vs = select_shock_set(&inst.net, mech, k, Seed(seed)).unwrap();
            let lowest_in = vs.iter().map(|&v| score[v]).fold(f64::INFINITY, f64::min);
            let highest_out = (0..n).filter(|v| !vs.contains(v)).map(|v| score[v]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lowest_in >= highest_out);
        }
    }

    #[test]
    fn index_is_a_fraction(inst in instance(25), k in 0.05f64..1.0, trials in 1usize..5, seed in any::<u64>()) {
        let n = inst.net.n();
        prop_assume!((k * n as f64 + 0.5).floor() >= 1.0);
        let net = inst.net.clone();
        let spec = ShockSpec::new(k, inst.phi).unwrap();
        for mech in [ShockMechanism::Idiosyncratic, ShockMechanism::CoordinatedWeighted] {
            let est = vulnerability_index(|_| Ok(net.clone()), mech, spec, trials, Seed(seed), SheetPolicy::Permissive)
                .unwrap();
            prop_assert!((0.0..=1.0).contains(&est.mean));
            prop_assert!(est.std >= 0.0);
        }
    }
}

#[test]
fn random_instances_agree_with_reference() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..1000 {
        let inst = instance_in(30, 30).new_tree(&mut runner).unwrap().current();
        let sheets = sheets_unchecked(&inst.net);
        let fast = cascade(&inst.net, &sheets, &inst.shocked, inst.phi);
        let slow = reference_cascade(&inst.net, &sheets, &inst.shocked, inst.phi);
        assert_eq!(fast.final_dead, slow.final_dead);
        assert_eq!(fast.rounds, slow.rounds);
    }
}

#[test]
fn idiosyncratic_inclusion_is_uniform() {
    let graph = erdos_renyi(10, 3.0, Seed(3)).unwrap();
    let net = assign_model(graph, Model::Homogeneous, 2.0, 0.25, Seed(0)).unwrap();
    let draws = 50_000u64;
    let mut counts = [0usize; 10];
    for i in 0..draws {
        for v in select_shock_set(&net, ShockMechanism::Idiosyncratic, 0.3, Seed(8).child(i)).unwrap() {
            counts[v] += 1;
        }
    }
    for (v, c) in counts.iter().enumerate() {
        let f = *c as f64 / draws as f64;
        assert!((f - 0.3).abs() <= 0.01, "node {v}: {f}");
    }
}

#[test]
fn coordinated_ties_are_broken_evenly() {
    // Directed 6-cycle: every in-degree is 1, so one of six nodes is picked.
    let edges = (0..6).map(|v| (v, (v + 1) % 6)).collect();
    let graph = finstab::DirectedGraph::from_edges(6, edges).unwrap();
    let net = assign_model(graph, Model::Homogeneous, 2.0, 0.25, Seed(0)).unwrap();
    let mut counts = [0usize; 6];
    for i in 0..12_000 {
        let vs = select_shock_set(&net, ShockMechanism::CoordinatedUnweighted, 1.0 / 6.0, Seed(i)).unwrap();
        counts[vs[0]] += 1;
    }
    assert!(counts.iter().all(|&c| (1700..2300).contains(&c)), "{counts:?}");
}

#[test]
fn strict_sheets_agree_when_valid() {
    let graph = erdos_renyi(20, 3.0, Seed(11)).unwrap();
    let net = assign_model(graph, Model::Homogeneous, 3.5, 0.25, Seed(0)).unwrap();
    assert_eq!(compute_sheets(&net).unwrap(), sheets_unchecked(&net));
}
