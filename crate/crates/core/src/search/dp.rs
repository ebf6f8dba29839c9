//! Backward induction over the outer belief `Π`.
//!
//! The state after `t` outer observations is `Π_t`; an action is a table
//! over source pairs for each inner-belief atom of `Π_t`, chosen only where
//! the atom gives the pair positive weight (other entries never execute and
//! are set to 0). Decoders are MAP, so the stage cost of an action is
//!
//! `Σ_atoms Σ_y min_û E[ρ_1 ; y, atom] + Σ_z min_v̂ E[ρ_2 ; z]`
//!
//! and the value is the stage cost plus `Σ_z Pr(z) V_{t+1}(Π_{t+1}^z)`.
//! Values are memoized on the canonical key of `(t, Π_t)`.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use super::{Method, SearchResult};
use crate::belief::{pi_children, pi_init, theta2, AtomEncoder, AtomKey, BeliefPi};
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::prob::Prob;
use crate::strategy::decode::min_expected;
use crate::strategy::{PiNode, StructuredStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpOptions {
    /// Most actions enumerated at any one node.
    pub action_cap: u128,
    /// Most distinct memoized nodes.
    pub node_cap: usize,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { action_cap: 1 << 22, node_cap: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpResult<S: Prob> {
    pub result: SearchResult<S>,
    pub structured: StructuredStrategy<S>,
    /// Distinct `(t, Π_t)` states evaluated.
    pub states: usize,
}

type StateKey<S> = (usize, Vec<(AtomKey<S>, Vec<<S as Prob>::Key>)>);

struct Dp<'m, S: Prob> {
    model: &'m SystemModel<S>,
    opts: DpOptions,
    memo: HashMap<StateKey<S>, (S, AtomEncoder<S>)>,
    actions: u128,
}

impl<S: Prob> Dp<'_, S> {
    /// Atom tables for action `k`: free positions take digits of `k` in
    /// `|X|`-ary, first position most significant.
    fn action(&self, pi: &BeliefPi<S>, free: &[(usize, usize)], k: u128) -> AtomEncoder<S> {
        let a = &self.model.alphabets;
        let mut tables: Vec<Vec<usize>> = vec![vec![0; a.pairs()]; pi.atoms.len()];
        let mut k = k;
        for &(i, s) in free.iter().rev() {
            tables[i][s] = (k % a.x as u128) as usize;
            k /= a.x as u128;
        }
        pi.atoms.keys().cloned().zip(tables).collect()
    }

    fn value(&mut self, pi: &BeliefPi<S>) -> Result<S> {
        let t = pi.stage;
        if t == self.model.horizon {
            return Ok(S::zero());
        }
        let key = (t, pi.key());
        if let Some((v, _)) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        if self.memo.len() >= self.opts.node_cap {
            return Err(Error::CapExceeded { what: "belief node", count: format!("more than {}", self.opts.node_cap), cap: self.opts.node_cap as u128 });
        }
        let m = self.model;
        let a = m.alphabets;
        let priors: Vec<Vec<S>> = pi.atoms.values().map(|atom| m.prior_for(t, &atom.weights)).collect();
        let free: Vec<(usize, usize)> = priors
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.iter().enumerate().filter(|(_, w)| !w.is_zero()).map(move |(s, _)| (i, s)))
            .collect();
        let count = u32::try_from(free.len()).ok().and_then(|n| (a.x as u128).checked_pow(n));
        let Some(count) = count.filter(|&n| n <= self.opts.action_cap) else {
            return Err(Error::CapExceeded {
                what: "node action",
                count: format!("{}^{}", a.x, free.len()),
                cap: self.opts.action_cap,
            });
        };
        let last = t + 1 == m.horizon;
        let mut best: Option<(S, AtomEncoder<S>)> = None;
        for k in 0..count {
            self.actions += 1;
            let action = self.action(pi, &free, k);
            let mut total = S::zero();
            let mut outer = vec![S::zero(); a.z * a.v];
            for (prior, table) in priors.iter().zip(action.values()) {
                for y in 0..a.y {
                    let mut bin = vec![S::zero(); a.u];
                    for (s, p) in prior.iter().enumerate() {
                        let q = &m.channel.inner[table[s]][y];
                        if p.is_zero() || q.is_zero() {
                            continue;
                        }
                        let w = S::product(p, q);
                        let (u, v) = a.split(s);
                        if last {
                            for z in 0..a.z {
                                outer[z * a.v + v] += S::product(&w, &m.channel.outer[y][z]);
                            }
                        }
                        bin[u] += w;
                    }
                    total += min_expected(&bin, m.rho1(t + 1));
                }
            }
            if last {
                for bin in outer.chunks(a.v) {
                    total += min_expected(bin, m.rho2(t + 1));
                }
            } else {
                for (_, p_z, child) in pi_children(m, pi, |key| action.get(key).map(Vec::as_slice))? {
                    let theta = theta2(m, &child);
                    total += S::product(&p_z, &min_expected(&theta, m.rho2(t + 1)));
                    total += S::product(&p_z, &self.value(&child)?);
                }
            }
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, action));
            }
        }
        let (v, action) = best.expect("at least one action");
        self.memo.insert(key, (v.clone(), action));
        Ok(v)
    }

    fn build(&self, pi: BeliefPi<S>) -> Result<PiNode<S>> {
        let depth = pi.stage;
        if depth == self.model.horizon {
            return Ok(PiNode { depth, pi, action: BTreeMap::new(), children: BTreeMap::new() });
        }
        let (_, action) = &self.memo[&(depth, pi.key())];
        let mut children = BTreeMap::new();
        for (z, _, child) in pi_children(self.model, &pi, |key| action.get(key).map(Vec::as_slice))? {
            children.insert(z, self.build(child)?);
        }
        Ok(PiNode { depth, pi, action: action.clone(), children })
    }
}

/// Optimal structured strategy by backward induction over reachable outer
/// beliefs; ties go to the lexicographically first action.
pub fn coordinator_dp<S: Prob>(model: &SystemModel<S>, opts: &DpOptions) -> Result<DpResult<S>> {
    let start = Instant::now();
    let mut dp = Dp { model, opts: *opts, memo: HashMap::new(), actions: 0 };
    let root = pi_init(model);
    let best_cost = dp.value(&root)?;
    let structured = StructuredStrategy { horizon: model.horizon, root: dp.build(root)? };
    let best = structured.to_markov(model);
    Ok(DpResult {
        result: SearchResult { method: Method::Dp, best_cost, best, enumerated: dp.actions, elapsed: start.elapsed() },
        structured,
        states: dp.memo.len(),
    })
}
