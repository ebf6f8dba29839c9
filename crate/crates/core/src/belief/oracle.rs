//! Brute-force conditionals: enumerate every positive-probability prefix of
//! the process under a fixed strategy, tabulate the joint law of the current
//! source pair with each observation history, and slice.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::{BeliefPi, BeliefXi, PiAtom};
use crate::error::{Error, Result};
use crate::exact::Exact;
use crate::model::{support::walk, SystemModel};
use crate::prob::{normalized, sum, vec_key};
use crate::strategy::Executable;

/// A conditional to compute. Slices hold the realized outputs of stages
/// `1..=t`, except `ThetaU` whose `z` stops at `t - 1`.
#[derive(Debug, Clone, Copy)]
pub enum Query<'a> {
    /// `Pr(U_t, V_t | y^t, z^t)`.
    Xi { y: &'a [usize], z: &'a [usize] },
    /// `Pr(U_t, V_t, Ξ_t | z^t)`.
    Pi { z: &'a [usize] },
    /// `Pr(U_t | y^t, z^{t-1})`.
    ThetaU { y: &'a [usize], z: &'a [usize] },
    /// `Pr(V_t | z^t)`.
    ThetaV { z: &'a [usize] },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Conditional {
    Dist(Vec<Exact>),
    Pi(BeliefPi<Exact>),
}

/// Joint tables of one `(model, strategy)` pair. Immutable after
/// construction, so one oracle can serve any number of threads.
pub struct Oracle {
    model: SystemModel<Exact>,
    /// `joint[t][(y^t, z^t)][s] = Pr(S_t = s, y^t, z^t)` for positive-probability
    /// histories, `t >= 1`.
    joint: Vec<BTreeMap<Vec<(usize, usize)>, Vec<Exact>>>,
}

impl Oracle {
    pub fn build<E: Executable<Exact>>(model: &SystemModel<Exact>, strategy: &E, cap: u64) -> Result<Self> {
        let n = model.alphabets.pairs();
        let mut joint: Vec<HashMap<Vec<(usize, usize)>, Vec<Exact>>> = vec![HashMap::new(); model.horizon + 1];
        walk(model, strategy.runner(model), cap, |path, w| {
            let key: Vec<(usize, usize)> = path.iter().map(|st| (st.y, st.z)).collect();
            let s = path.last().expect("visited nodes are nonempty").s;
            let row = joint[path.len()].entry(key).or_insert_with(|| vec![Exact::zero(); n]);
            row[s] += w;
        })?;
        Ok(Oracle { model: model.clone(), joint: joint.into_iter().map(|m| m.into_iter().collect()).collect() })
    }

    pub fn model(&self) -> &SystemModel<Exact> {
        &self.model
    }

    /// Positive-probability histories `(y^t, z^t)` of length `t >= 1`.
    pub fn histories(&self, t: usize) -> impl Iterator<Item = &[(usize, usize)]> {
        self.joint[t].keys().map(Vec::as_slice)
    }

    pub fn conditional(&self, query: Query<'_>) -> Result<Conditional> {
        Ok(match query {
            Query::Xi { y, z } => Conditional::Dist(self.xi(y, z)?.dist),
            Query::Pi { z } => Conditional::Pi(self.pi(z)?),
            Query::ThetaU { y, z } => Conditional::Dist(self.theta_u(y, z)?),
            Query::ThetaV { z } => Conditional::Dist(self.theta_v(z)?),
        })
    }

    pub fn xi(&self, y: &[usize], z: &[usize]) -> Result<BeliefXi<Exact>> {
        assert_eq!(y.len(), z.len(), "inner and outer histories must have equal length");
        let t = y.len();
        if t == 0 {
            return Ok(BeliefXi { stage: 0, dist: self.model.source.initial.clone() });
        }
        let key: Vec<_> = y.iter().copied().zip(z.iter().copied()).collect();
        let row = self.joint[t].get(&key).ok_or(Error::ZeroProbabilityObservation)?;
        Ok(BeliefXi { stage: t, dist: normalized(row).ok_or(Error::ZeroProbabilityObservation)? })
    }

    pub fn theta_u(&self, y: &[usize], z: &[usize]) -> Result<Vec<Exact>> {
        let t = y.len();
        assert_eq!(z.len() + 1, t, "theta_u conditions on one fewer outer output");
        let a = &self.model.alphabets;
        let mut marg = vec![Exact::zero(); a.u];
        for z_t in 0..a.z {
            let key: Vec<_> = y.iter().copied().zip(z.iter().copied().chain([z_t])).collect();
            if let Some(row) = self.joint[t].get(&key) {
                for (s, p) in row.iter().enumerate() {
                    marg[a.split(s).0] += p;
                }
            }
        }
        normalized(&marg).ok_or(Error::ZeroProbabilityObservation)
    }

    /// Joint rows of every inner history consistent with `z`.
    fn rows_for<'s>(&'s self, z: &'s [usize]) -> impl Iterator<Item = &'s Vec<Exact>> + 's {
        self.joint[z.len()]
            .iter()
            .filter(move |(k, _)| k.iter().map(|&(_, zz)| zz).eq(z.iter().copied()))
            .map(|(_, row)| row)
    }

    pub fn theta_v(&self, z: &[usize]) -> Result<Vec<Exact>> {
        let a = &self.model.alphabets;
        let mut marg = vec![Exact::zero(); a.v];
        if z.is_empty() {
            for (s, p) in self.model.source.initial.iter().enumerate() {
                marg[a.split(s).1] += p;
            }
            return Ok(marg);
        }
        for row in self.rows_for(z) {
            for (s, p) in row.iter().enumerate() {
                marg[a.split(s).1] += p;
            }
        }
        normalized(&marg).ok_or(Error::ZeroProbabilityObservation)
    }

    /// Each consistent inner history contributes its joint row to the atom
    /// of the inner belief it induces.
    pub fn pi(&self, z: &[usize]) -> Result<BeliefPi<Exact>> {
        let t = z.len();
        let mut atoms = BTreeMap::new();
        if t == 0 {
            let initial = self.model.source.initial.clone();
            atoms.insert(vec_key(&initial), PiAtom { xi: initial.clone(), weights: initial });
            return Ok(BeliefPi { stage: 0, atoms });
        }
        let mut total = Exact::zero();
        for row in self.rows_for(z) {
            let xi = normalized(row).ok_or(Error::ZeroProbabilityObservation)?;
            total += &sum(row);
            let atom = atoms
                .entry(vec_key(&xi))
                .or_insert_with(|| PiAtom { xi, weights: vec![Exact::zero(); row.len()] });
            for (w, p) in atom.weights.iter_mut().zip(row) {
                *w += p;
            }
        }
        if total.is_zero() {
            return Err(Error::ZeroProbabilityObservation);
        }
        for atom in atoms.values_mut() {
            for w in atom.weights.iter_mut() {
                *w /= &total;
            }
        }
        Ok(BeliefPi { stage: t, atoms })
    }
}
