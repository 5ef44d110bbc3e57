use erw_core::analysis::SampleStats;
use erw_core::branching::{
    coupled_modified_run, offspring_partial_sum, sample_offspring, simulate, simulate_modified_walk, BranchingParams,
    Censoring,
};
use erw_core::ensemble::map_replicates;
use erw_core::rng::tag;
use erw_core::ModelParams;

#[test]
fn mean_offspring_is_type_independent() {
    let b = BranchingParams::new(0.5, 1.0).unwrap();
    for k in [1u128, 5, 50] {
        let counts = map_replicates(k as u64, tag::BRANCHING, 100_000, |_, rng| {
            Ok(sample_offspring(k, &b, rng)?.children.len() as f64)
        })
        .unwrap();
        let s = SampleStats::from_values(&counts, 0.95);
        let want = offspring_partial_sum(k, erw_core::branching::cutoff(k, &b), &b).unwrap();
        assert!(b.mean_offspring() - want <= b.epsilon() + 1e-12);
        assert!((s.mean - want).abs() < 3.0 * s.std_error(), "k={k}: {} vs {want}", s.mean);
    }
}

#[test]
fn childless_probability_has_uniform_lower_bound() {
    for (p, beta) in [(0.5, 4.0), (0.3, 1.0)] {
        let b = BranchingParams::new(p, beta).unwrap();
        let b = b.with_epsilon(b.mean_offspring() / 2.0).unwrap();
        let c = -(1.0f64 - p).ln() / p;
        let floor = (-c * b.mean_offspring()).exp();
        for k in [1u128, 10, 1000] {
            let n = 20_000;
            let empty = map_replicates(k as u64 + 100, tag::BRANCHING, n, |_, rng| {
                Ok(sample_offspring(k, &b, rng)?.children.is_empty())
            })
            .unwrap()
            .into_iter()
            .filter(|&e| e)
            .count() as f64
                / n as f64;
            let sd = (floor * (1.0 - floor) / n as f64).sqrt();
            assert!(empty >= floor - 3.0 * sd, "p={p} beta={beta} k={k}: {empty} < {floor}");
        }
    }
}

#[test]
fn expected_generation_size_is_power_of_m() {
    let b = BranchingParams::new(0.5, 1.0).unwrap().with_caps(5, 1_000_000).unwrap();
    let n5 = map_replicates(1, tag::BRANCHING, 100_000, |_, rng| {
        let run = simulate(&b, rng)?;
        Ok(run.count_at(5).expect("not censored before generation 5") as f64)
    })
    .unwrap();
    let s = SampleStats::from_values(&n5, 0.95);
    assert!((s.mean - 1.0).abs() < 3.0 * s.std_error(), "{s:?}");
}

#[test]
fn subcritical_process_dies_out() {
    let b = BranchingParams::new(0.5, 2.0).unwrap().with_caps(20, 1_000_000).unwrap();
    let runs = map_replicates(2, tag::BRANCHING, 5_000, |_, rng| simulate(&b, rng)).unwrap();
    let m = b.mean_offspring();
    let extinct = runs.iter().filter(|r| r.extinct).count() as f64 / runs.len() as f64;
    let want = 1.0 - m.powi(19);
    let sd = (want * (1.0 - want) / runs.len() as f64).sqrt().max(1e-4);
    assert!(extinct >= want - 3.0 * sd);
    assert!(runs.iter().all(|r| r.censored != Some(Censoring::MaxPop)));
}

#[test]
fn critical_survival_decreases() {
    let b = BranchingParams::new(0.5, 1.0).unwrap().with_caps(40, 1_000_000).unwrap();
    let runs = map_replicates(3, tag::BRANCHING, 4_000, |_, rng| simulate(&b, rng)).unwrap();
    let alive: Vec<f64> = [5u64, 10, 20, 40]
        .iter()
        .map(|&g| runs.iter().filter(|r| r.alive_at(g) == Some(true)).count() as f64)
        .collect();
    assert!(alive.windows(2).all(|w| w[1] < w[0]), "{alive:?}");
}

#[test]
fn modified_walk_is_dominated_in_mean_by_distinct_types() {
    let model = ModelParams::new(0.5, 1.5).unwrap();
    let b = BranchingParams::from_model(model).unwrap().with_caps(200, 1_000_000).unwrap();
    let n = 200u64;
    let walks = map_replicates(4, tag::MODIFIED, 20_000, |_, rng| {
        Ok(*simulate_modified_walk(&model, n, rng)?.last().unwrap() as f64)
    })
    .unwrap();
    let types = map_replicates(5, tag::BRANCHING, 20_000, |_, rng| Ok(simulate(&b, rng)?.distinct_types_up_to(n) as f64))
        .unwrap();
    let (w, t) = (SampleStats::from_values(&walks, 0.95), SampleStats::from_values(&types, 0.95));
    let se = (w.std_error().powi(2) + t.std_error().powi(2)).sqrt();
    assert!(w.mean <= t.mean + 3.0 * se, "{w:?} vs {t:?}");
}

#[test]
fn coupled_modified_walk_disagreement_is_bounded_by_pair_terms() {
    for beta in [1.0, 3.0] {
        let model = ModelParams::new(0.5, beta).unwrap();
        let runs = map_replicates(6, tag::MODIFIED, 50_000, |_, rng| coupled_modified_run(&model, 30, rng)).unwrap();
        let n = runs.len() as f64;
        let differ = runs.iter().filter(|r| r.xi != r.xi_hat).count() as f64 / n;
        let ever = runs.iter().filter(|r| r.first_disagreement.is_some()).count() as f64 / n;
        let bounds: Vec<f64> = runs.iter().map(|r| r.pair_bound).collect();
        let bound = SampleStats::from_values(&bounds, 0.95);
        assert!(differ <= ever);
        let sd = (ever * (1.0 - ever) / n).sqrt();
        assert!(ever <= bound.mean + 4.0 * (sd + bound.std_error()), "beta={beta}: {ever} vs {}", bound.mean);
        assert!(runs.iter().all(|r| r.xi_hat <= r.xi || r.first_disagreement.is_some()));
    }
}
