use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::evaluate::{exact_cost, map_cost};
use crate::model::SystemModel;
use crate::par::Workers;
use crate::prob::Prob;
use crate::random::random_general_strategy;
use crate::strategy::{GeneralStrategy, MarkovStrategy};

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifyOptions {
    pub samples: u64,
    pub seed: u64,
    pub cap: u64,
    pub workers: Workers,
    /// Evaluated alongside the samples; its cost must equal the optimum.
    pub plant: Option<MarkovStrategy>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<S> {
    NotFalsified,
    /// A sampled strategy strictly beat the optimum (beyond tolerance in
    /// float mode).
    Falsified { sample: u64, cost: S, strategy: GeneralStrategy },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifyReport<S> {
    pub verdict: Verdict<S>,
    pub optimum: S,
    pub samples: u64,
    /// Lowest cost seen among the samples, own or MAP decoders.
    pub best_sample: Option<S>,
    pub planted: Option<S>,
}

/// Cost of a general strategy: the better of its own decoders and MAP
/// decoders.
fn score<S: Prob>(model: &SystemModel<S>, g: &GeneralStrategy, cap: u64) -> Result<S> {
    let own = exact_cost(model, g, cap)?.total;
    let map = map_cost(model, g, cap)?.0.total;
    Ok(if map < own { map } else { own })
}

/// Draws uniformly random general strategies and checks that none costs
/// less than `optimum`. Sample `i` uses stream `i` of the seeded generator.
pub fn falsify_structural<S: Prob>(model: &SystemModel<S>, optimum: &S, opts: &FalsifyOptions) -> Result<FalsifyReport<S>> {
    let a = model.alphabets;
    let threshold = optimum.clone() - S::tolerance();
    let costs = opts.workers.map(opts.samples as usize, |i| -> Result<(S, GeneralStrategy)> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(i as u64);
        let g = random_general_strategy(&mut rng, &a, model.horizon);
        Ok((score(model, &g, opts.cap)?, g))
    });
    let mut verdict = Verdict::NotFalsified;
    let mut best_sample: Option<S> = None;
    for (i, c) in costs.into_iter().enumerate() {
        let (cost, g) = c?;
        if best_sample.as_ref().is_none_or(|b| cost < *b) {
            best_sample = Some(cost.clone());
        }
        if cost < threshold && matches!(verdict, Verdict::NotFalsified) {
            verdict = Verdict::Falsified { sample: i as u64, cost, strategy: g };
        }
    }
    let planted = match &opts.plant {
        Some(p) => Some(score(model, &GeneralStrategy::from_markov(&a, p), opts.cap)?),
        None => None,
    };
    Ok(FalsifyReport { verdict, optimum: optimum.clone(), samples: opts.samples, best_sample, planted })
}
