//! Co-execution of two strategies under common random numbers. A channel
//! use consumes one uniform variate mapped through the inverse CDF of the
//! kernel row; the breakpoints of all rows cut `[0, 1)` into cells inside
//! which every input maps to a fixed output. Enumerating the cells (and the
//! source paths) covers every realization both strategies can face.

use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::prob::Prob;
use crate::strategy::{Executable, StageRunner};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Divergence {
    /// Every realization produced identical symbols.
    Equivalent { realizations: u64 },
    /// First difference found, in stage order.
    At { stage: usize, symbol: &'static str, left: usize, right: usize },
}

impl Divergence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Divergence::Equivalent { .. })
    }
}

/// For each noise cell, the output each input is mapped to.
fn noise_cells<S: Prob>(kernel: &[Vec<S>]) -> Vec<Vec<usize>> {
    let mut cuts: Vec<S> = Vec::new();
    for row in kernel {
        let mut acc = S::zero();
        for p in row {
            acc += p;
            cuts.push(acc.clone());
        }
    }
    cuts.push(S::zero());
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("comparable probabilities"));
    cuts.dedup();
    cuts.windows(2)
        .filter(|w| w[0] < w[1])
        .map(|w| {
            // every point of the cell is at least its left end
            kernel
                .iter()
                .map(|row| {
                    let mut acc = S::zero();
                    for (i, p) in row.iter().enumerate() {
                        acc += p;
                        if acc > w[0] {
                            return i;
                        }
                    }
                    row.len() - 1
                })
                .collect()
        })
        .collect()
}

struct Coupler<'m, S> {
    model: &'m SystemModel<S>,
    inner: Vec<Vec<usize>>,
    outer: Vec<Vec<usize>>,
    cap: u64,
    count: u64,
}

impl<S: Prob> Coupler<'_, S> {
    fn stage<A: StageRunner, B: StageRunner>(&mut self, a: &A, b: &B, prev: Option<usize>, t: usize) -> Result<Option<Divergence>> {
        if t > self.model.horizon {
            self.count += 1;
            if self.count > self.cap {
                return Err(Error::CapExceeded {
                    what: "realization",
                    count: format!("at least {}", self.count),
                    cap: self.cap as u128,
                });
            }
            return Ok(None);
        }
        let alph = self.model.alphabets;
        for s in 0..alph.pairs() {
            let p = match prev {
                None => &self.model.source.initial[s],
                Some(p) => &self.model.source.transition[p][s],
            };
            if p.is_zero() {
                continue;
            }
            let (u, v) = alph.split(s);
            let (mut ea, mut eb) = (a.clone(), b.clone());
            let (xa, xb) = (ea.encode(u, v)?, eb.encode(u, v)?);
            if xa != xb {
                return Ok(Some(Divergence::At { stage: t, symbol: "x", left: xa, right: xb }));
            }
            for c1 in 0..self.inner.len() {
                let (ya, yb) = (self.inner[c1][xa], self.inner[c1][xb]);
                let (mut ia, mut ib) = (ea.clone(), eb.clone());
                let (ua, ub) = (ia.decode_inner(ya)?, ib.decode_inner(yb)?);
                if ua != ub {
                    return Ok(Some(Divergence::At { stage: t, symbol: "u_hat", left: ua, right: ub }));
                }
                for c2 in 0..self.outer.len() {
                    let (za, zb) = (self.outer[c2][ya], self.outer[c2][yb]);
                    let (mut oa, mut ob) = (ia.clone(), ib.clone());
                    let (va, vb) = (oa.decode_outer(za)?, ob.decode_outer(zb)?);
                    if va != vb {
                        return Ok(Some(Divergence::At { stage: t, symbol: "v_hat", left: va, right: vb }));
                    }
                    if let Some(d) = self.stage(&oa, &ob, Some(s), t + 1)? {
                        return Ok(Some(d));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Runs `a` and `b` side by side on every realization of the source and the
/// channel noise and reports the first realized symbol on which they differ.
/// Channel outputs are functions of the common noise and the inputs, so
/// equal inputs imply equal outputs.
pub fn trajectory_equivalence<S: Prob, A: Executable<S>, B: Executable<S>>(
    model: &SystemModel<S>,
    a: &A,
    b: &B,
    cap: u64,
) -> Result<Divergence> {
    let mut c = Coupler {
        model,
        inner: noise_cells(&model.channel.inner),
        outer: noise_cells(&model.channel.outer),
        cap,
        count: 0,
    };
    Ok(match c.stage(&a.runner(model), &b.runner(model), None, 1)? {
        Some(d) => d,
        None => Divergence::Equivalent { realizations: c.count },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Exact;
    use crate::model::DEFAULT_TRAJECTORY_CAP;
    use crate::random::{random_markov_strategy, random_model, RandomModelSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cells_partition_each_row() {
        let kernel = vec![
            vec![Exact::new(1, 2), Exact::new(1, 2)],
            vec![Exact::new(1, 4), Exact::new(3, 4)],
            vec![Exact::new(1, 1), Exact::new(0, 1)],
        ];
        let cells = noise_cells(&kernel);
        assert_eq!(cells, vec![vec![0, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]);
    }

    #[test]
    fn a_strategy_is_equivalent_to_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        for _ in 0..5 {
            let m = random_model(&mut rng, &RandomModelSpec::general(2));
            let s = random_markov_strategy(&mut rng, &m.alphabets, 2);
            assert!(trajectory_equivalence(&m, &s, &s, DEFAULT_TRAJECTORY_CAP).unwrap().is_equivalent());
        }
    }

    #[test]
    fn a_changed_decoder_entry_is_found_at_its_stage() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let m = random_model(&mut rng, &RandomModelSpec::noisy_binary(2));
        let s = random_markov_strategy(&mut rng, &m.alphabets, 2);
        let mut other = s.clone();
        let e = &mut other.decoders.outer[1][3];
        *e = 1 - *e;
        match trajectory_equivalence(&m, &s, &other, DEFAULT_TRAJECTORY_CAP).unwrap() {
            Divergence::At { stage, symbol, .. } => assert_eq!((stage, symbol), (2, "v_hat")),
            d => panic!("{d:?}"),
        }
    }
}
