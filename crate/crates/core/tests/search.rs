use nestcast::belief::{pi_deviation, Oracle};
use nestcast::evaluate::exact_cost;
use nestcast::model::{build_special_case, ScenarioChannel, SystemModel, DEFAULT_TRAJECTORY_CAP};
use nestcast::par::Workers;
use nestcast::random::{random_model, RandomModelSpec};
use nestcast::search::{
    brute_force_markov, coordinator_dp, falsify_structural, markov_class_size, BruteOptions, DpOptions, FalsifyOptions,
    Verdict,
};
use nestcast::strategy::PiNode;
use nestcast::{Error, Exact};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn brute(m: &SystemModel<Exact>) -> nestcast::search::SearchResult<Exact> {
    brute_force_markov(m, &BruteOptions::default()).unwrap()
}

fn dp(m: &SystemModel<Exact>) -> nestcast::search::DpResult<Exact> {
    coordinator_dp(m, &DpOptions::default()).unwrap()
}

#[test]
fn methods_agree_on_single_stage_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..12 {
        let m = random_model(&mut rng, &RandomModelSpec::general(1));
        if markov_class_size(&m).is_none_or(|n| n > 1 << 16) {
            continue;
        }
        let b = brute(&m);
        let d = dp(&m);
        assert_eq!(b.best_cost, d.result.best_cost);
        assert_eq!(b.enumerated, markov_class_size(&m).unwrap());
    }
}

#[test]
fn methods_agree_on_a_two_stage_binary_instance() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let m = random_model(&mut rng, &RandomModelSpec::noisy_binary(2));
    assert_eq!(markov_class_size(&m), Some(1 << 20));
    let b = brute(&m);
    assert_eq!(b.enumerated, 1 << 20);
    let d = dp(&m);
    assert_eq!(b.best_cost, d.result.best_cost);
}

#[test]
fn best_strategies_realize_their_reported_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for horizon in 1..=2 {
        let m = random_model(&mut rng, &RandomModelSpec::noisy_binary(horizon));
        let b = brute(&m);
        assert_eq!(exact_cost(&m, &b.best, DEFAULT_TRAJECTORY_CAP).unwrap().total, b.best_cost);
        let d = dp(&m);
        assert_eq!(exact_cost(&m, &d.result.best, DEFAULT_TRAJECTORY_CAP).unwrap().total, d.result.best_cost);
        assert_eq!(exact_cost(&m, &d.structured, DEFAULT_TRAJECTORY_CAP).unwrap().total, d.result.best_cost);
    }
}

#[test]
fn noiseless_scenario_is_solved_perfectly() {
    let m = build_special_case(2, 2, 4, 1, ScenarioChannel::Noiseless).unwrap();
    assert!(brute(&m).best_cost.is_zero());
    let d = dp(&m);
    assert!(d.result.best_cost.is_zero());
    assert_eq!(d.structured.root.children.len(), 4);
    assert!(d.structured.root.children.values().all(|c| c.depth == 1 && c.children.is_empty()));
}

#[test]
fn scaling_distortion_scales_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let lambda = Exact::new(5, 2);
    for _ in 0..4 {
        let m = random_model(&mut rng, &RandomModelSpec::binary(1));
        let scaled = m.scale_distortion(&lambda);
        let (b, bs) = (brute(&m), brute(&scaled));
        assert_eq!(bs.best_cost, &b.best_cost * &lambda);
        assert_eq!(bs.best.encoder, b.best.encoder);
        let (d, ds) = (dp(&m), dp(&scaled));
        assert_eq!(ds.result.best_cost, &d.result.best_cost * &lambda);
        assert_eq!(ds.structured.root.action, d.structured.root.action);
    }
}

#[test]
fn shifting_inner_distortion_adds_horizon_times_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let c = Exact::new(1, 3);
    for horizon in 1..=2 {
        let m = random_model(&mut rng, &RandomModelSpec::binary(horizon));
        let shifted = m.shift_inner_distortion(&c);
        let bump = &c * &Exact::from_integer(horizon as i64);
        let (b, bs) = (brute(&m), brute(&shifted));
        assert_eq!(bs.best_cost, &b.best_cost + &bump);
        assert_eq!(bs.best.encoder, b.best.encoder);
        let (d, ds) = (dp(&m), dp(&shifted));
        assert_eq!(ds.result.best_cost, &d.result.best_cost + &bump);
    }
}

#[test]
fn encoder_class_cap_is_an_error() {
    let m = build_special_case(2, 2, 4, 2, ScenarioChannel::Noiseless).unwrap();
    assert!(matches!(
        brute_force_markov(&m, &BruteOptions::default()),
        Err(Error::CapExceeded { what: "encoder class", .. })
    ));
    let tight = DpOptions { action_cap: 16, ..DpOptions::default() };
    assert!(matches!(coordinator_dp(&m, &tight), Err(Error::CapExceeded { what: "node action", .. })));
}

#[test]
fn worker_count_does_not_change_the_result() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let m = random_model(&mut rng, &RandomModelSpec::binary(1));
    let seq = brute_force_markov(&m, &BruteOptions { workers: Workers::SEQUENTIAL, ..BruteOptions::default() }).unwrap();
    let par = brute_force_markov(&m, &BruteOptions { workers: Workers(4), ..BruteOptions::default() }).unwrap();
    assert_eq!((seq.best_cost, seq.best, seq.enumerated), (par.best_cost, par.best, par.enumerated));
}

fn check_nodes(oracle: &Oracle, node: &PiNode<Exact>, z: &mut Vec<usize>) {
    let expected = oracle.pi(z).unwrap();
    assert!(pi_deviation(&node.pi, &expected).is_zero(), "node at z-history {z:?}");
    for (sym, child) in &node.children {
        z.push(*sym);
        check_nodes(oracle, child, z);
        z.pop();
    }
}

#[test]
fn every_dp_node_matches_the_oracle_outer_belief() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for horizon in 1..=2 {
        let m = random_model(&mut rng, &RandomModelSpec::noisy_binary(horizon));
        let d = dp(&m);
        let oracle = Oracle::build(&m, &d.structured, DEFAULT_TRAJECTORY_CAP).unwrap();
        check_nodes(&oracle, &d.structured.root, &mut Vec::new());
    }
}

#[test]
fn falsification_with_no_samples_is_vacuous() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let m = random_model(&mut rng, &RandomModelSpec::binary(1));
    let opt = dp(&m).result.best_cost;
    let opts = FalsifyOptions { samples: 0, seed: 1, cap: DEFAULT_TRAJECTORY_CAP, workers: Workers::SEQUENTIAL, plant: None };
    let r = falsify_structural(&m, &opt, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::NotFalsified);
    assert_eq!(r.best_sample, None);
}

#[test]
fn planted_optimum_ties_and_samples_do_not_win() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let m = random_model(&mut rng, &RandomModelSpec::binary(2));
    let d = dp(&m);
    let opts = FalsifyOptions {
        samples: 200,
        seed: 9,
        cap: DEFAULT_TRAJECTORY_CAP,
        workers: Workers::default(),
        plant: Some(d.result.best.clone()),
    };
    let r = falsify_structural(&m, &d.result.best_cost, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::NotFalsified);
    assert_eq!(r.planted, Some(d.result.best_cost.clone()));
    assert!(r.best_sample.unwrap() >= d.result.best_cost);
}

#[test]
fn an_inflated_optimum_is_falsified() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let m = random_model(&mut rng, &RandomModelSpec::binary(1));
    let fake = m.cost_bound() + Exact::from_integer(1);
    let opts = FalsifyOptions { samples: 5, seed: 3, cap: DEFAULT_TRAJECTORY_CAP, workers: Workers::SEQUENTIAL, plant: None };
    let r = falsify_structural(&m, &fake, &opts).unwrap();
    assert!(matches!(r.verdict, Verdict::Falsified { sample: 0, .. }));
}

fn noisy_scenario(horizon: usize) -> SystemModel<Exact> {
    let channel = ScenarioChannel::Symmetric { inner: Exact::new(1, 10), outer: Exact::new(1, 5) };
    build_special_case(2, 2, 2, horizon, channel).unwrap()
}

#[test]
fn noisy_scenario_reproduces_golden_optimum() {
    for (horizon, golden) in [(1, Exact::new(3, 5)), (2, Exact::new(9, 25))] {
        let m = noisy_scenario(horizon);
        assert_eq!(brute(&m).best_cost, golden, "brute T={horizon}");
        assert_eq!(dp(&m).result.best_cost, golden, "dp T={horizon}");
    }
}
