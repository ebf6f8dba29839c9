use nestcast::belief::{filter_check, pi_init, pi_update, theta2, AtomEncoder, BeliefDump, Oracle};
use nestcast::model::{build_special_case, ScenarioChannel, SystemModel, DEFAULT_TRAJECTORY_CAP};
use nestcast::random::{atom_consistent_markov_strategy, random_model, RandomModelSpec};
use nestcast::strategy::{Decoders, MarkovStrategy};
use nestcast::Exact;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, horizon: usize) -> (SystemModel<Exact>, MarkovStrategy) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_model(&mut rng, &RandomModelSpec::general(horizon));
    let s = atom_consistent_markov_strategy(&mut rng, &m);
    (m, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_filters_equal_the_oracle(seed in any::<u64>(), horizon in 1usize..=2) {
        let (m, s) = instance(seed, horizon);
        let d = filter_check::<Exact>(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap();
        prop_assert!(d.exact, "{d:?}");
        prop_assert!(d.histories > 0);
    }

    #[test]
    fn float_filters_stay_within_tolerance(seed in any::<u64>(), horizon in 1usize..=2) {
        let (m, s) = instance(seed, horizon);
        let d = filter_check::<f64>(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap();
        prop_assert!(d.max() <= 1e-9, "{d:?}");
    }

    #[test]
    fn outer_belief_chains_stay_normalized_and_bounded(seed in any::<u64>(), zs in proptest::collection::vec(0usize..3, 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, &RandomModelSpec::general(3));
        let a = m.alphabets;
        let one = Exact::from_integer(1);
        let mut pi = pi_init(&m);
        for (t, z) in zs.iter().enumerate() {
            let action: AtomEncoder<Exact> =
                pi.atoms.keys().map(|k| (k.clone(), (0..a.pairs()).map(|_| rng.random_range(0..a.x)).collect())).collect();
            let Ok(child) = pi_update(&m, &pi, z % a.z, &action) else { break };
            pi = child;
            prop_assert!(pi.atoms.len() <= a.y.pow(t as u32 + 1));
            let total = pi.atoms.values().fold(Exact::from_integer(0), |acc, atom| acc + atom.mass());
            prop_assert_eq!(total, one.clone());
            for atom in pi.atoms.values() {
                prop_assert_eq!(atom.xi.iter().fold(Exact::from_integer(0), |acc, w| acc + w.clone()), one.clone());
            }
            let marginal = pi.marginal();
            let v_marginal: Vec<Exact> = (0..a.v)
                .map(|v| (0..a.u).fold(Exact::from_integer(0), |acc, u| acc + marginal[a.pair(u, v)].clone()))
                .collect();
            prop_assert_eq!(theta2(&m, &pi), v_marginal);
        }
    }
}

/// Outer beliefs of the noisy fixed-message scenario after each outer history,
/// under the encoder that sends `u` at stage 1 and `v xor y_1` at stage 2.
fn scenario_dumps() -> (Vec<BeliefDump>, Vec<BeliefDump>) {
    let channel = ScenarioChannel::Symmetric { inner: Exact::new(1, 10), outer: Exact::new(1, 5) };
    let m = build_special_case(2, 2, 2, 2, channel).unwrap();
    let a = m.alphabets;
    let send_u = vec![0, 0, 1, 1];
    let send_v = vec![0, 1, 0, 1];
    let flip_v = vec![1, 0, 1, 0];
    // shared histories at stage 2 are indexed y * |Z| + z
    let s = MarkovStrategy {
        horizon: 2,
        encoder: vec![vec![send_u.clone()], vec![send_v.clone(), send_v, flip_v.clone(), flip_v]],
        decoders: Decoders::constant(&a, 2),
    };
    let oracle = Oracle::build(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap();

    let root = pi_init(&m);
    let first: AtomEncoder<Exact> = root.atoms.keys().map(|k| (k.clone(), send_u.clone())).collect();
    let mut filter = vec![BeliefDump::from_pi(&a, &root)];
    let mut exact = vec![BeliefDump::from_pi(&a, &oracle.pi(&[]).unwrap())];
    for z in 0..a.z {
        let child = pi_update(&m, &root, z, &first).unwrap();
        filter.push(BeliefDump::from_pi(&a, &child));
        exact.push(BeliefDump::from_pi(&a, &oracle.pi(&[z]).unwrap()));
    }
    (filter, exact)
}

#[test]
fn scenario_beliefs_match_the_golden_dump() {
    let (filter, oracle) = scenario_dumps();
    assert_eq!(filter, oracle);
    let text = serde_json::to_string_pretty(&filter).unwrap() + "\n";
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/scenario_beliefs.json");
    if std::env::var_os("NESTCAST_BLESS").is_some() {
        std::fs::write(path, &text).unwrap();
    }
    let golden = std::fs::read_to_string(path).unwrap();
    assert_eq!(text, golden);
}
