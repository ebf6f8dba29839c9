//! Exhaustive search over Markov encoders `c_t(u_t, v_t, y^{t-1}, z^{t-1})`.
//!
//! Encoders are visited in lexicographic order of their tables (stage, then
//! shared history, then source pair, earliest slot most significant). For a
//! fixed encoder the MAP decoders are optimal, so each encoder is scored by
//! its MAP cost, assembled from precomputed per-history pieces:
//!
//! * inner-decoder cost of history `h` and table `c`: depends only on the
//!   predicted joint `α_h` of the source pair with `h`, and on `c`;
//! * contributions of `(h, c)` to the outer-decoder bins of `z^t`, which
//!   are minimized once the whole stage is fixed;
//! * `α` of each child history, which fixes the next stage's pieces.
//!
//! Histories with `α_h = 0` cannot influence the cost; their table is fixed
//! to all-zero, the lexicographically first of the equally scored choices.

use std::time::Instant;

use super::{Method, SearchResult};
use crate::error::{Error, Result};
use crate::evaluate::map_cost;
use crate::model::SystemModel;
use crate::par::Workers;
use crate::prob::Prob;
use crate::strategy::decode::min_expected;
use crate::strategy::history::{push_shared, shared_count, z_part};
use crate::strategy::{Decoders, MarkovStrategy};

/// Largest encoder class enumerated by default.
pub const DEFAULT_ENCODER_CAP: u128 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteOptions {
    pub cap: u128,
    pub workers: Workers,
}

impl Default for BruteOptions {
    fn default() -> Self {
        BruteOptions { cap: DEFAULT_ENCODER_CAP, workers: Workers::default() }
    }
}

/// `|X|^(|U×V| Σ_t (|Y||Z|)^(t-1))`, or `None` past `u128`.
pub fn markov_class_size<S>(model: &SystemModel<S>) -> Option<u128> {
    let a = &model.alphabets;
    let mut slots: u32 = 0;
    for t in 1..=model.horizon {
        let histories = (a.outputs() as u128).checked_pow((t - 1) as u32)?;
        slots = slots.checked_add(u32::try_from(histories.checked_mul(a.pairs() as u128)?).ok()?)?;
    }
    (a.x as u128).checked_pow(slots)
}

/// Scored consequences of applying one table at one history.
#[derive(Clone)]
struct Choice<S> {
    inner_cost: S,
    /// `[z][v]` contributions to the outer bins at this history's `z^{t-1}`.
    outer: Vec<S>,
}

struct Stage<S> {
    t: usize,
    /// Per history: the candidate tables' scores, or `None` if unreachable.
    choices: Vec<Option<Vec<Choice<S>>>>,
    alpha: Vec<Vec<S>>,
}

struct Search<'m, S> {
    model: &'m SystemModel<S>,
    tables: &'m [Vec<usize>],
    enumerated: u128,
    best: Option<(S, Vec<Vec<usize>>)>,
    /// Table indices chosen so far, one vector per stage.
    chosen: Vec<Vec<usize>>,
}

fn decode_table(k: usize, x: usize, pairs: usize) -> Vec<usize> {
    let mut t = vec![0; pairs];
    let mut k = k;
    for slot in t.iter_mut().rev() {
        *slot = k % x;
        k /= x;
    }
    t
}

impl<'m, S: Prob> Search<'m, S> {
    fn stage(&self, t: usize, alpha: Vec<Vec<S>>) -> Stage<S> {
        let m = self.model;
        let a = m.alphabets;
        let rho1 = m.rho1(t);
        let choices = alpha
            .iter()
            .map(|al| {
                if al.iter().all(|p| p.is_zero()) {
                    return None;
                }
                Some(
                    self.tables
                        .iter()
                        .map(|table| {
                            let mut inner_cost = S::zero();
                            let mut outer = vec![S::zero(); a.z * a.v];
                            for y in 0..a.y {
                                let mut bin = vec![S::zero(); a.u];
                                for (s, p) in al.iter().enumerate() {
                                    let q = &m.channel.inner[table[s]][y];
                                    if p.is_zero() || q.is_zero() {
                                        continue;
                                    }
                                    let w = S::product(p, q);
                                    let (u, v) = a.split(s);
                                    for z in 0..a.z {
                                        let q2 = &m.channel.outer[y][z];
                                        if !q2.is_zero() {
                                            outer[z * a.v + v] += S::product(&w, q2);
                                        }
                                    }
                                    bin[u] += w;
                                }
                                inner_cost += min_expected(&bin, rho1);
                            }
                            Choice { inner_cost, outer }
                        })
                        .collect(),
                )
            })
            .collect();
        Stage { t, choices, alpha }
    }

    /// Predicted joints of the next stage's histories.
    fn next_alpha(&self, stage: &Stage<S>) -> Vec<Vec<S>> {
        let m = self.model;
        let a = m.alphabets;
        let mut next = vec![vec![S::zero(); a.pairs()]; shared_count(&a, stage.t + 1)];
        for (h, al) in stage.alpha.iter().enumerate() {
            if stage.choices[h].is_none() {
                continue;
            }
            let table = &self.tables[self.chosen[stage.t - 1][h]];
            for y in 0..a.y {
                for z in 0..a.z {
                    let mut w = vec![S::zero(); a.pairs()];
                    for (s, p) in al.iter().enumerate() {
                        if !p.is_zero() {
                            w[s] = S::product(p, &m.channel_joint(table[s], y, z));
                        }
                    }
                    next[push_shared(&a, h, y, z)] = m.predict(&w);
                }
            }
        }
        next
    }

    /// Enumerates the tables of histories `h..` of `stage`.
    fn walk(&mut self, stage: &Stage<S>, h: usize, cost: &S, bins: &[S]) {
        let m = self.model;
        let a = m.alphabets;
        if h == stage.choices.len() {
            let mut total = cost.clone();
            for zh in bins.chunks(a.v) {
                total += min_expected(zh, m.rho2(stage.t));
            }
            if stage.t == m.horizon {
                self.enumerated += 1;
                if self.best.as_ref().is_none_or(|(b, _)| total < *b) {
                    self.best = Some((total, self.chosen.clone()));
                }
                return;
            }
            let next = self.stage(stage.t + 1, self.next_alpha(stage));
            let bins = vec![S::zero(); a.z.pow((stage.t + 1) as u32) * a.v];
            self.chosen.push(vec![0; next.choices.len()]);
            self.walk(&next, 0, &total, &bins);
            self.chosen.pop();
            return;
        }
        let Some(options) = &stage.choices[h] else {
            self.chosen[stage.t - 1][h] = 0;
            return self.walk(stage, h + 1, cost, bins);
        };
        let base = z_part(&a, h, stage.t - 1) * a.z * a.v;
        let mut scratch = bins.to_vec();
        for (k, choice) in options.iter().enumerate() {
            self.chosen[stage.t - 1][h] = k;
            scratch.clone_from_slice(bins);
            for (slot, c) in scratch[base..base + choice.outer.len()].iter_mut().zip(&choice.outer) {
                *slot += c;
            }
            let cost = cost.clone() + &choice.inner_cost;
            self.walk(stage, h + 1, &cost, &scratch);
        }
    }
}

/// Minimum expected total distortion over all Markov encoders with MAP
/// decoders, and the lexicographically first encoder achieving it.
pub fn brute_force_markov<S: Prob>(model: &SystemModel<S>, opts: &BruteOptions) -> Result<SearchResult<S>> {
    let start = Instant::now();
    let a = model.alphabets;
    let size = markov_class_size(model);
    if size.is_none_or(|n| n > opts.cap) {
        return Err(Error::CapExceeded {
            what: "encoder class",
            count: size.map_or_else(|| "more than 2^128".into(), |n| n.to_string()),
            cap: opts.cap,
        });
    }
    let n_tables = a.x.pow(a.pairs() as u32);
    let tables: Vec<Vec<usize>> = (0..n_tables).map(|k| decode_table(k, a.x, a.pairs())).collect();
    let root = Search { model, tables: &tables, enumerated: 0, best: None, chosen: vec![vec![0]] };
    let first = root.stage(1, vec![model.source.initial.clone()]);
    let options = first.choices[0].as_ref().expect("the initial law has positive mass");

    // one independent subtree per stage-1 table, reduced in table order
    let parts = opts.workers.map(options.len(), |k| {
        let mut s = Search { model, tables: &tables, enumerated: 0, best: None, chosen: vec![vec![k]] };
        s.walk(&first, 1, &options[k].inner_cost, &options[k].outer);
        (s.best, s.enumerated)
    });

    let mut best: Option<(S, Vec<Vec<usize>>)> = None;
    let mut enumerated = 0;
    for (b, n) in parts {
        enumerated += n;
        if let Some((c, ch)) = b {
            if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
                best = Some((c, ch));
            }
        }
    }
    let (best_cost, chosen) = best.expect("the class is nonempty");
    let encoder = chosen
        .iter()
        .map(|stage| stage.iter().map(|&k| tables[k].clone()).collect())
        .collect();
    let mut strategy = MarkovStrategy { horizon: model.horizon, encoder, decoders: Decoders::constant(&a, model.horizon) };
    strategy.decoders = map_cost(model, &strategy, u64::MAX)?.1;
    Ok(SearchResult { method: Method::Brute, best_cost, best: strategy, enumerated, elapsed: start.elapsed() })
}
