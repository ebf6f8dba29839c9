//! Random instances and strategies for tests, benches and sampling.
//! Probabilities are drawn as small integer weights, so every entry is a
//! rational with a small denominator.

use std::collections::HashMap;

use rand::Rng;

use crate::belief::{xi_init, xi_update, BeliefXi};
use crate::exact::Exact;
use crate::model::{Alphabets, DegradedChannel, DistortionSchedule, MarkovSource, SystemModel};
use crate::prob::vec_key;
use crate::strategy::history::{full_count, inner_count, outer_count, push_shared, shared_count, z_part};
use crate::strategy::{CoordinatorStrategy, Decoders, GeneralStrategy, MarkovStrategy, Prescription};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomModelSpec {
    pub u: usize,
    pub v: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub horizon: usize,
    /// Redraw the five alphabet sizes uniformly from `1..=max_size` per model.
    pub random_sizes: bool,
    pub max_size: usize,
    /// Every stochastic entry strictly positive.
    pub strictly_positive: bool,
    /// Integer weights are drawn from `0..=weight_range` before normalizing.
    pub weight_range: u32,
}

impl RandomModelSpec {
    pub fn binary(horizon: usize) -> Self {
        RandomModelSpec {
            u: 2,
            v: 2,
            x: 2,
            y: 2,
            z: 2,
            horizon,
            random_sizes: false,
            max_size: 2,
            strictly_positive: false,
            weight_range: 4,
        }
    }

    pub fn noisy_binary(horizon: usize) -> Self {
        RandomModelSpec { strictly_positive: true, ..Self::binary(horizon) }
    }

    /// Sizes drawn from `1..=3`.
    pub fn general(horizon: usize) -> Self {
        RandomModelSpec { random_sizes: true, max_size: 3, ..Self::binary(horizon) }
    }
}

fn row(rng: &mut impl Rng, n: usize, spec: &RandomModelSpec) -> Vec<Exact> {
    let lo = u32::from(spec.strictly_positive);
    loop {
        let w: Vec<i64> = (0..n).map(|_| i64::from(rng.random_range(lo..=spec.weight_range))).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| Exact::new(x, total)).collect();
        }
    }
}

fn matrix(rng: &mut impl Rng, rows: usize, cols: usize, spec: &RandomModelSpec) -> Vec<Vec<Exact>> {
    (0..rows).map(|_| row(rng, cols, spec)).collect()
}

/// Distortions in `{0, 1/4, …, 1}` with `rho_max = 1`.
fn distortion(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<Exact>> {
    (0..rows).map(|_| (0..cols).map(|_| Exact::new(rng.random_range(0..=4), 4)).collect()).collect()
}

pub fn random_model(rng: &mut impl Rng, spec: &RandomModelSpec) -> SystemModel<Exact> {
    let mut size = |n: usize| if spec.random_sizes { rng.random_range(1..=spec.max_size) } else { n };
    let (u, v, x, y, z) = (size(spec.u), size(spec.v), size(spec.x), size(spec.y), size(spec.z));
    let a = Alphabets { u, v, x, y, z, u_hat: u, v_hat: v };
    let n = a.pairs();
    SystemModel {
        alphabets: a,
        horizon: spec.horizon,
        source: MarkovSource { initial: row(rng, n, spec), transition: matrix(rng, n, n, spec) },
        channel: DegradedChannel { inner: matrix(rng, x, y, spec), outer: matrix(rng, y, z, spec) },
        distortion: DistortionSchedule {
            rho1: (0..spec.horizon).map(|_| distortion(rng, u, u)).collect(),
            rho2: (0..spec.horizon).map(|_| distortion(rng, v, v)).collect(),
            rho_max: Exact::from_integer(1),
        },
    }
}

fn table(rng: &mut impl Rng, len: usize, symbols: usize) -> Vec<usize> {
    (0..len).map(|_| rng.random_range(0..symbols)).collect()
}

pub fn random_decoders(rng: &mut impl Rng, a: &Alphabets, horizon: usize) -> Decoders {
    Decoders {
        inner: (1..=horizon).map(|t| table(rng, inner_count(a, t), a.u_hat)).collect(),
        outer: (1..=horizon).map(|t| table(rng, outer_count(a, t), a.v_hat)).collect(),
    }
}

pub fn random_markov_strategy(rng: &mut impl Rng, a: &Alphabets, horizon: usize) -> MarkovStrategy {
    let encoder = (1..=horizon)
        .map(|t| (0..shared_count(a, t)).map(|_| table(rng, a.pairs(), a.x)).collect())
        .collect();
    MarkovStrategy { horizon, encoder, decoders: random_decoders(rng, a, horizon) }
}

pub fn random_coordinator_strategy(rng: &mut impl Rng, a: &Alphabets, horizon: usize) -> CoordinatorStrategy {
    let prescriptions = (1..=horizon)
        .map(|t| {
            (0..shared_count(a, t))
                .map(|_| Prescription { encoder: table(rng, a.pairs(), a.x), inner: table(rng, a.y, a.u_hat) })
                .collect()
        })
        .collect();
    let outer = (1..=horizon).map(|t| table(rng, outer_count(a, t), a.v_hat)).collect();
    CoordinatorStrategy { horizon, prescriptions, outer }
}

pub fn random_general_strategy(rng: &mut impl Rng, a: &Alphabets, horizon: usize) -> GeneralStrategy {
    let encoder = (1..=horizon).map(|t| table(rng, full_count(a, t), a.x)).collect();
    GeneralStrategy { horizon, encoder, decoders: random_decoders(rng, a, horizon) }
}

/// Random Markov strategy whose table at each shared history depends only
/// on the stage, the outer history and the inner belief, so it is also a
/// rule on inner-belief atoms. Unreachable histories get independent
/// tables.
pub fn atom_consistent_markov_strategy(rng: &mut impl Rng, model: &SystemModel<Exact>) -> MarkovStrategy {
    let a = model.alphabets;
    let mut encoder = Vec::with_capacity(model.horizon);
    let mut beliefs: Vec<Option<BeliefXi<Exact>>> = vec![Some(xi_init(model))];
    for t in 1..=model.horizon {
        let mut chosen = HashMap::new();
        let stage: Vec<Vec<usize>> = beliefs
            .iter()
            .enumerate()
            .map(|(h, xi)| match xi {
                Some(xi) => chosen
                    .entry((z_part(&a, h, t - 1), vec_key(&xi.dist)))
                    .or_insert_with(|| table(rng, a.pairs(), a.x))
                    .clone(),
                None => table(rng, a.pairs(), a.x),
            })
            .collect();
        if t < model.horizon {
            let mut next = vec![None; shared_count(&a, t + 1)];
            for (h, xi) in beliefs.iter().enumerate() {
                let Some(xi) = xi else { continue };
                for y in 0..a.y {
                    for z in 0..a.z {
                        next[push_shared(&a, h, y, z)] = xi_update(model, xi, y, z, &stage[h]).ok();
                    }
                }
            }
            beliefs = next;
        }
        encoder.push(stage);
    }
    MarkovStrategy { horizon: model.horizon, encoder, decoders: random_decoders(rng, &a, model.horizon) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_model;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_models_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for spec in [RandomModelSpec::binary(2), RandomModelSpec::noisy_binary(3), RandomModelSpec::general(2)] {
            for _ in 0..20 {
                let m = random_model(&mut rng, &spec);
                assert_eq!(validate_model(m.to_raw()).unwrap(), m);
                if spec.strictly_positive {
                    assert!(m.channel.inner.iter().flatten().all(|p| !p.is_negative() && !num_traits::Zero::is_zero(p)));
                }
            }
        }
    }

    #[test]
    fn random_strategies_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let m = random_model(&mut rng, &RandomModelSpec::general(3));
        let a = m.alphabets;
        random_markov_strategy(&mut rng, &a, 3).validate(&a, 3).unwrap();
        random_coordinator_strategy(&mut rng, &a, 3).validate(&a, 3).unwrap();
        random_general_strategy(&mut rng, &a, 2).validate(&a, 2).unwrap();
        atom_consistent_markov_strategy(&mut rng, &m).validate(&a, 3).unwrap();
    }
}
