//! The coordinator view: a fictitious agent that sees only the shared
//! history `(y^{t-1}, z^{t-1})` and issues each stage a prescription, i.e. a
//! partial encoder on `U × V` and a partial inner decoder on `Y`. The outer
//! decoder is kept as a table.

use serde::{Deserialize, Serialize};

use super::history::{inner_index, push_outer, push_shared, shared_count};
use super::markov::{check_table, Decoders};
use super::{Executable, MarkovStrategy, StageRunner};
use crate::error::{Error, Result};
use crate::model::{Alphabets, SystemModel};
use crate::prob::Prob;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Prescription {
    /// `x = encoder[s]`.
    pub encoder: Vec<usize>,
    /// `û = inner[y]`.
    pub inner: Vec<usize>,
}

/// `prescriptions[t - 1][h]` is the coordinator's decision at stage `t` for
/// shared history `h`. Past prescriptions are themselves functions of the
/// shared history under this strategy, so indexing by `h` alone loses
/// nothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinatorStrategy {
    pub horizon: usize,
    pub prescriptions: Vec<Vec<Prescription>>,
    pub outer: Vec<Vec<usize>>,
}

impl CoordinatorStrategy {
    pub fn validate(&self, a: &Alphabets, horizon: usize) -> Result<()> {
        if self.horizon != horizon || self.prescriptions.len() != horizon || self.outer.len() != horizon {
            return Err(Error::InvalidStrategy(format!("strategy horizon {} != model horizon {horizon}", self.horizon)));
        }
        for t in 1..=horizon {
            let stage = &self.prescriptions[t - 1];
            if stage.len() != shared_count(a, t) {
                return Err(Error::InvalidStrategy(format!("coordinator stage {t} covers {} histories", stage.len())));
            }
            for p in stage {
                check_table(&p.encoder, a.pairs(), a.x, "partial encoder", t)?;
                check_table(&p.inner, a.y, a.u_hat, "partial inner decoder", t)?;
            }
            check_table(&self.outer[t - 1], a.z.pow(t as u32), a.v_hat, "outer decoder", t)?;
        }
        Ok(())
    }
}

/// Coordinator implementing a Markov strategy: the prescription for shared
/// history `h` is the encoder and inner decoder with `h` plugged in.
pub fn lift_to_coordinator(a: &Alphabets, s: &MarkovStrategy) -> CoordinatorStrategy {
    let prescriptions = (1..=s.horizon)
        .map(|t| {
            (0..shared_count(a, t))
                .map(|h| Prescription {
                    encoder: s.encoder[t - 1][h].clone(),
                    inner: (0..a.y).map(|y| s.decoders.inner[t - 1][inner_index(a, h, y)]).collect(),
                })
                .collect()
        })
        .collect();
    CoordinatorStrategy { horizon: s.horizon, prescriptions, outer: s.decoders.outer.clone() }
}

/// Markov strategy implementing a coordinator: at shared history `h` the
/// encoder is the prescribed partial encoder applied to `(u_t, v_t)` and the
/// inner decoder is the prescribed partial decoder applied to `y_t`.
pub fn lower_from_coordinator(a: &Alphabets, phi: &CoordinatorStrategy) -> MarkovStrategy {
    let mut encoder = Vec::with_capacity(phi.horizon);
    let mut inner = Vec::with_capacity(phi.horizon);
    for (t, stage) in (1..=phi.horizon).zip(&phi.prescriptions) {
        let mut inner_t = vec![0; shared_count(a, t) * a.y];
        for (h, p) in stage.iter().enumerate() {
            for (y, &u_hat) in p.inner.iter().enumerate() {
                inner_t[inner_index(a, h, y)] = u_hat;
            }
        }
        encoder.push(stage.iter().map(|p| p.encoder.clone()).collect());
        inner.push(inner_t);
    }
    MarkovStrategy { horizon: phi.horizon, encoder, decoders: Decoders { inner, outer: phi.outer.clone() } }
}

#[derive(Debug, Clone)]
pub struct CoordinatorRunner<'a> {
    strategy: &'a CoordinatorStrategy,
    alphabets: Alphabets,
    t: usize,
    shared: usize,
    outer: usize,
    y: usize,
    issued: Option<&'a Prescription>,
}

impl StageRunner for CoordinatorRunner<'_> {
    fn encode(&mut self, u: usize, v: usize) -> Result<usize> {
        let p = &self.strategy.prescriptions[self.t][self.shared];
        self.issued = Some(p);
        Ok(p.encoder[self.alphabets.pair(u, v)])
    }

    fn decode_inner(&mut self, y: usize) -> Result<usize> {
        self.y = y;
        let p = self.issued.unwrap_or(&self.strategy.prescriptions[self.t][self.shared]);
        Ok(p.inner[y])
    }

    fn decode_outer(&mut self, z: usize) -> Result<usize> {
        let a = &self.alphabets;
        self.outer = push_outer(a, self.outer, z);
        let v_hat = self.strategy.outer[self.t][self.outer];
        self.shared = push_shared(a, self.shared, self.y, z);
        self.issued = None;
        self.t += 1;
        Ok(v_hat)
    }
}

impl<S: Prob> Executable<S> for CoordinatorStrategy {
    type Runner<'a> = CoordinatorRunner<'a>;

    fn runner<'a>(&'a self, model: &'a SystemModel<S>) -> CoordinatorRunner<'a> {
        CoordinatorRunner { strategy: self, alphabets: model.alphabets, t: 0, shared: 0, outer: 0, y: 0, issued: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::{exact_cost, trajectory_equivalence, Divergence};
    use crate::exact::Exact;
    use crate::model::DEFAULT_TRAJECTORY_CAP;
    use crate::random::{random_coordinator_strategy, random_markov_strategy, random_model, RandomModelSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_stage_prescription_is_the_encoder_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_model(&mut rng, &RandomModelSpec::binary(1));
        let s = random_markov_strategy(&mut rng, &m.alphabets, 1);
        let phi = lift_to_coordinator(&m.alphabets, &s);
        assert_eq!(phi.prescriptions[0][0].encoder, s.encoder[0][0]);
        assert_eq!(lower_from_coordinator(&m.alphabets, &phi), s);
    }

    #[test]
    fn round_trip_restores_tables_and_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for horizon in 1..=3 {
            let m = random_model(&mut rng, &RandomModelSpec::binary(horizon));
            let s = random_markov_strategy(&mut rng, &m.alphabets, horizon);
            let phi = lift_to_coordinator(&m.alphabets, &s);
            phi.validate(&m.alphabets, horizon).unwrap();
            let back = lower_from_coordinator(&m.alphabets, &phi);
            assert_eq!(back, s);
            let direct = exact_cost(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap();
            let lifted = exact_cost(&m, &phi, DEFAULT_TRAJECTORY_CAP).unwrap();
            assert_eq!(direct.total, lifted.total);

            let phi = random_coordinator_strategy(&mut rng, &m.alphabets, horizon);
            let lowered = lower_from_coordinator(&m.alphabets, &phi);
            let a: Exact = exact_cost(&m, &phi, DEFAULT_TRAJECTORY_CAP).unwrap().total;
            let b: Exact = exact_cost(&m, &lowered, DEFAULT_TRAJECTORY_CAP).unwrap().total;
            assert_eq!(a, b);
            assert!(trajectory_equivalence(&m, &phi, &lowered, DEFAULT_TRAJECTORY_CAP).unwrap().is_equivalent());
        }
    }

    #[test]
    fn a_changed_reachable_prescription_diverges_at_its_stage() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_model(&mut rng, &RandomModelSpec::noisy_binary(2));
        let s = random_markov_strategy(&mut rng, &m.alphabets, 2);
        let mut phi = lift_to_coordinator(&m.alphabets, &s);
        let e = &mut phi.prescriptions[1][0].encoder[0];
        *e = 1 - *e;
        match trajectory_equivalence(&m, &s, &phi, DEFAULT_TRAJECTORY_CAP).unwrap() {
            Divergence::At { stage, .. } => assert_eq!(stage, 2),
            Divergence::Equivalent { .. } => panic!("expected divergence"),
        }
    }
}
