use serde::{Deserialize, Serialize};

use super::history::{full_count, inner_index, push_full, push_outer, push_shared};
use super::markov::{check_table, Decoders};
use super::{Executable, MarkovStrategy, StageRunner};
use crate::error::{Error, Result};
use crate::model::{Alphabets, SystemModel};
use crate::prob::Prob;

/// Encoder `X_t = c_t(U^t, V^t, X^{t-1}, Y^{t-1}, Z^{t-1})` with table
/// decoders. Only used to sample strategies outside the structured class.
///
/// `encoder[t - 1][f * |U×V| + s_t]` where `f` indexes the completed stages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralStrategy {
    pub horizon: usize,
    pub encoder: Vec<Vec<usize>>,
    pub decoders: Decoders,
}

impl GeneralStrategy {
    pub fn validate(&self, a: &Alphabets, horizon: usize) -> Result<()> {
        if self.horizon != horizon || self.encoder.len() != horizon {
            return Err(Error::InvalidStrategy(format!("strategy horizon {} != model horizon {horizon}", self.horizon)));
        }
        for t in 1..=horizon {
            check_table(&self.encoder[t - 1], full_count(a, t), a.x, "encoder", t)?;
        }
        self.decoders.check(a, horizon)
    }

    /// The same strategy, ignoring past source symbols and inputs.
    pub fn from_markov(a: &Alphabets, m: &MarkovStrategy) -> Self {
        let encoder = (1..=m.horizon)
            .map(|t| {
                (0..full_count(a, t))
                    .map(|i| {
                        let s = i % a.pairs();
                        let f = i / a.pairs();
                        m.encoder[t - 1][shared_of_full(a, f, t - 1)][s]
                    })
                    .collect()
            })
            .collect();
        GeneralStrategy { horizon: m.horizon, encoder, decoders: m.decoders.clone() }
    }
}

/// Projects a full history of `len` stages onto its `(y, z)` outputs.
fn shared_of_full(a: &Alphabets, mut f: usize, len: usize) -> usize {
    let mut outputs = Vec::with_capacity(len);
    for _ in 0..len {
        outputs.push(f % a.outputs());
        f /= super::history::full_radix(a);
    }
    outputs.iter().rev().fold(0, |h, &yz| h * a.outputs() + yz)
}

#[derive(Debug, Clone, Copy)]
pub struct GeneralRunner<'a> {
    strategy: &'a GeneralStrategy,
    alphabets: Alphabets,
    t: usize,
    full: usize,
    shared: usize,
    outer: usize,
    s: usize,
    x: usize,
    y: usize,
}

impl StageRunner for GeneralRunner<'_> {
    fn encode(&mut self, u: usize, v: usize) -> Result<usize> {
        let a = &self.alphabets;
        self.s = a.pair(u, v);
        self.x = self.strategy.encoder[self.t][self.full * a.pairs() + self.s];
        Ok(self.x)
    }

    fn decode_inner(&mut self, y: usize) -> Result<usize> {
        self.y = y;
        Ok(self.strategy.decoders.inner[self.t][inner_index(&self.alphabets, self.shared, y)])
    }

    fn decode_outer(&mut self, z: usize) -> Result<usize> {
        let a = &self.alphabets;
        self.outer = push_outer(a, self.outer, z);
        let v_hat = self.strategy.decoders.outer[self.t][self.outer];
        self.shared = push_shared(a, self.shared, self.y, z);
        self.full = push_full(a, self.full, self.s, self.x, self.y, z);
        self.t += 1;
        Ok(v_hat)
    }
}

impl<S: Prob> Executable<S> for GeneralStrategy {
    type Runner<'a> = GeneralRunner<'a>;

    fn runner<'a>(&'a self, model: &'a SystemModel<S>) -> GeneralRunner<'a> {
        GeneralRunner {
            strategy: self,
            alphabets: model.alphabets,
            t: 0,
            full: 0,
            shared: 0,
            outer: 0,
            s: 0,
            x: 0,
            y: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::trajectory_equivalence;
    use crate::random::{random_markov_strategy, random_model, RandomModelSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn markov_embedding_is_trajectory_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let m = random_model(&mut rng, &RandomModelSpec::binary(3));
            let s = random_markov_strategy(&mut rng, &m.alphabets, 3);
            let g = GeneralStrategy::from_markov(&m.alphabets, &s);
            g.validate(&m.alphabets, 3).unwrap();
            assert!(trajectory_equivalence(&m, &s, &g, u64::MAX).unwrap().is_equivalent());
        }
    }
}
