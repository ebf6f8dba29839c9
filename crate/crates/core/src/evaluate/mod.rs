//! Expected total distortion: exact by enumeration of the process tree,
//! estimated by simulation, plus realization-wise comparison of strategies.

mod equivalence;
mod monte_carlo;
mod report;

pub use equivalence::{trajectory_equivalence, Divergence};
pub use monte_carlo::{first_episodes, monte_carlo_cost, simulate_episode, Episode, Sampler};
pub use report::{CostSummary, StageSummary, CSV_HEADER};

use crate::error::Result;
use crate::model::support::walk;
use crate::model::SystemModel;
use crate::prob::Prob;
use crate::strategy::decode::{map_decode, min_expected};
use crate::strategy::history::{inner_count, inner_index, outer_count, push_outer, push_shared};
use crate::strategy::{Decoders, Executable};

#[derive(Debug, Clone, PartialEq)]
pub struct StageCost<S> {
    /// `E ρ_{1,t}(U_t, Û_t)`.
    pub inner: S,
    /// `E ρ_{2,t}(V_t, V̂_t)`.
    pub outer: S,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostMode {
    Exact,
    MonteCarlo { samples: u64, std_error: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostReport<S> {
    pub total: S,
    pub per_stage: Vec<StageCost<S>>,
    pub mode: CostMode,
}

impl<S: Prob> CostReport<S> {
    fn exact(per_stage: Vec<StageCost<S>>) -> Self {
        let mut total = S::zero();
        for st in &per_stage {
            total += &st.inner;
            total += &st.outer;
        }
        CostReport { total, per_stage, mode: CostMode::Exact }
    }
}

/// Exact expected total distortion of `strategy`, summing each stage's
/// distortion over every positive-probability prefix.
pub fn exact_cost<S: Prob, E: Executable<S>>(model: &SystemModel<S>, strategy: &E, cap: u64) -> Result<CostReport<S>> {
    let mut per_stage = vec![StageCost { inner: S::zero(), outer: S::zero() }; model.horizon];
    let a = model.alphabets;
    walk(model, strategy.runner(model), cap, |path, w| {
        let t = path.len();
        let st = path[t - 1];
        let (u, v) = a.split(st.s);
        let r1 = &model.rho1(t)[u][st.u_hat];
        if !r1.is_zero() {
            per_stage[t - 1].inner += S::product(w, r1);
        }
        let r2 = &model.rho2(t)[v][st.v_hat];
        if !r2.is_zero() {
            per_stage[t - 1].outer += S::product(w, r2);
        }
    })?;
    Ok(CostReport::exact(per_stage))
}

/// Optimal decoders for the encoder of `strategy` (its own decoders are
/// ignored) and the exact cost they achieve. Each decoder bin accumulates
/// the joint probability of the source symbol and the decoder's
/// observations; the reconstruction is MAP on the bin.
pub fn map_cost<S: Prob, E: Executable<S>>(
    model: &SystemModel<S>,
    strategy: &E,
    cap: u64,
) -> Result<(CostReport<S>, Decoders)> {
    let a = model.alphabets;
    let horizon = model.horizon;
    let mut inner: Vec<Vec<Vec<S>>> = (1..=horizon).map(|t| vec![vec![S::zero(); a.u]; inner_count(&a, t)]).collect();
    let mut outer: Vec<Vec<Vec<S>>> = (1..=horizon).map(|t| vec![vec![S::zero(); a.v]; outer_count(&a, t)]).collect();
    walk(model, strategy.runner(model), cap, |path, w| {
        let t = path.len();
        let (mut h, mut zh) = (0, 0);
        for st in &path[..t - 1] {
            h = push_shared(&a, h, st.y, st.z);
            zh = push_outer(&a, zh, st.z);
        }
        let st = path[t - 1];
        let (u, v) = a.split(st.s);
        inner[t - 1][inner_index(&a, h, st.y)][u] += w;
        outer[t - 1][push_outer(&a, zh, st.z)][v] += w;
    })?;
    let mut per_stage = Vec::with_capacity(horizon);
    let mut decoders = Decoders { inner: Vec::with_capacity(horizon), outer: Vec::with_capacity(horizon) };
    for t in 1..=horizon {
        let (r1, r2) = (model.rho1(t), model.rho2(t));
        let mut stage = StageCost { inner: S::zero(), outer: S::zero() };
        for bin in &inner[t - 1] {
            stage.inner += min_expected(bin, r1);
        }
        for bin in &outer[t - 1] {
            stage.outer += min_expected(bin, r2);
        }
        per_stage.push(stage);
        decoders.inner.push(inner[t - 1].iter().map(|b| map_decode(b, r1)).collect());
        decoders.outer.push(outer[t - 1].iter().map(|b| map_decode(b, r2)).collect());
    }
    Ok((CostReport::exact(per_stage), decoders))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Exact;
    use crate::model::{build_special_case, ScenarioChannel, DEFAULT_TRAJECTORY_CAP};
    use crate::random::{random_markov_strategy, random_model, RandomModelSpec};
    use crate::strategy::MarkovStrategy;
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_distortion_costs_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        let mut m = random_model(&mut rng, &RandomModelSpec::binary(2));
        m = m.scale_distortion(&Exact::zero());
        let s = random_markov_strategy(&mut rng, &m.alphabets, 2);
        let r = exact_cost(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap();
        assert!(r.total.is_zero());
        assert_eq!(r.per_stage.len(), 2);
    }

    #[test]
    fn injective_noiseless_single_stage_is_free() {
        let m = build_special_case(2, 3, 6, 1, ScenarioChannel::Noiseless).unwrap();
        let mut s = MarkovStrategy::constant(&m.alphabets, 1);
        s.encoder[0][0] = vec![5, 4, 3, 2, 1, 0];
        let (report, decoders) = map_cost(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap();
        assert!(report.total.is_zero());
        s.decoders = decoders;
        assert!(exact_cost(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap().total.is_zero());
    }

    #[test]
    fn map_decoders_realize_the_map_cost() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..10 {
            let m = random_model(&mut rng, &RandomModelSpec::general(2));
            let mut s = random_markov_strategy(&mut rng, &m.alphabets, 2);
            let own = exact_cost(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap();
            let (report, decoders) = map_cost(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap();
            assert!(report.total <= own.total);
            s.decoders = decoders;
            assert_eq!(exact_cost(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap(), report);
        }
    }

    #[test]
    fn total_is_within_bounds_and_sums_the_stages() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        for _ in 0..10 {
            let m = random_model(&mut rng, &RandomModelSpec::general(3));
            let s = random_markov_strategy(&mut rng, &m.alphabets, 3);
            let r = exact_cost(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap();
            let sum: Exact = r.per_stage.iter().map(|st| &st.inner + &st.outer).sum();
            assert_eq!(sum, r.total);
            assert!(!r.total.is_negative() && r.total <= m.cost_bound());
        }
    }
}
