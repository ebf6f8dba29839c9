//! Sufficient-statistic filters.
//!
//! * `Ξ_t = Pr(U_t, V_t | y^t, z^t)`: the inner belief, shared by the encoder
//!   and the inner decoder.
//! * `Π_t = Pr(U_t, V_t, Ξ_t | z^t)`: the outer belief, a finitely supported
//!   measure over inner-belief atoms.
//! * `Θ_{1,t} = Pr(U_t | y^t, z^{t-1})` and `Θ_{2,t} = Pr(V_t | z^t)`: the
//!   decoders' beliefs.
//!
//! Every filter is a Bayes update; [`oracle`] recomputes the same
//! conditionals by brute-force enumeration for cross-checking.
//!
//! Beliefs carry the number of stages they have absorbed. A stage-0 belief
//! is the law of `(U_1, V_1)` itself; later beliefs are predicted through the
//! source transition before the next observation is absorbed.

mod check;
mod dump;
pub mod oracle;

pub use check::{filter_check, pi_deviation, FilterDeviation};
pub use dump::{BeliefDump, DumpAtom};
pub use oracle::{Conditional, Oracle, Query};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::prob::{linf, normalized, vec_key, Prob};

/// Canonical identity of an inner-belief atom.
pub type AtomKey<S> = Vec<<S as Prob>::Key>;

/// Partial encoder on `U × V × atoms`: one table over source pairs per atom.
pub type AtomEncoder<S> = BTreeMap<AtomKey<S>, Vec<usize>>;

#[derive(Debug, Clone, PartialEq)]
pub struct BeliefXi<S> {
    /// Observations absorbed.
    pub stage: usize,
    /// Distribution over source pairs.
    pub dist: Vec<S>,
}

impl<S: Prob> BeliefXi<S> {
    pub fn key(&self) -> AtomKey<S> {
        vec_key(&self.dist)
    }
}

/// One support point of `Π`: the atom's inner belief and the joint weights
/// `w(u, v, ξ)` of the source pair with it.
#[derive(Debug, Clone, PartialEq)]
pub struct PiAtom<S> {
    pub xi: Vec<S>,
    pub weights: Vec<S>,
}

impl<S: Prob> PiAtom<S> {
    pub fn mass(&self) -> S {
        crate::prob::sum(&self.weights)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeliefPi<S: Prob> {
    pub stage: usize,
    pub atoms: BTreeMap<AtomKey<S>, PiAtom<S>>,
}

impl<S: Prob> BeliefPi<S> {
    /// Marginal over source pairs.
    pub fn marginal(&self) -> Vec<S> {
        let n = self.atoms.values().next().map_or(0, |a| a.weights.len());
        let mut out = vec![S::zero(); n];
        for atom in self.atoms.values() {
            for (o, w) in out.iter_mut().zip(&atom.weights) {
                *o += w;
            }
        }
        out
    }

    pub fn key(&self) -> Vec<(AtomKey<S>, Vec<S::Key>)> {
        self.atoms.iter().map(|(k, a)| (k.clone(), vec_key(&a.weights))).collect()
    }

    /// Atom whose belief equals `xi`: an exact key hit, or in float mode the
    /// nearest atom within tolerance.
    pub fn find_atom(&self, xi: &[S]) -> Option<(&AtomKey<S>, &PiAtom<S>)> {
        if let Some(hit) = self.atoms.get_key_value(&vec_key(xi)) {
            return Some(hit);
        }
        if S::EXACT {
            return None;
        }
        self.atoms
            .iter()
            .map(|(k, a)| (linf(&a.xi, xi), k, a))
            .filter(|(d, _, _)| *d <= S::tolerance())
            .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"))
            .map(|(_, k, a)| (k, a))
    }
}

pub fn xi_init<S: Prob>(model: &SystemModel<S>) -> BeliefXi<S> {
    BeliefXi { stage: 0, dist: model.source.initial.clone() }
}

/// Unnormalized `Pr(s_t = s, y_t, z_t | ·)` after predicting `belief`.
fn observation_weights<S: Prob>(model: &SystemModel<S>, prior: &[S], y: usize, z: Option<usize>, enc: &[usize]) -> Vec<S> {
    prior
        .iter()
        .enumerate()
        .map(|(s, p)| {
            if p.is_zero() {
                return S::zero();
            }
            let x = enc[s];
            let lik = match z {
                Some(z) => model.channel_joint(x, y, z),
                None => model.channel.inner[x][y].clone(),
            };
            S::product(p, &lik)
        })
        .collect()
}

/// Inner-belief update: predict the source pair, then condition on the
/// stage's outputs `(y, z)` given that the encoder applied `enc`.
pub fn xi_update<S: Prob>(
    model: &SystemModel<S>,
    xi: &BeliefXi<S>,
    y: usize,
    z: usize,
    enc: &[usize],
) -> Result<BeliefXi<S>> {
    let prior = model.prior_for(xi.stage, &xi.dist);
    let w = observation_weights(model, &prior, y, Some(z), enc);
    let dist = normalized(&w).ok_or(Error::ZeroProbabilityObservation)?;
    Ok(BeliefXi { stage: xi.stage + 1, dist })
}

/// Inner decoder's belief over `U_t` after seeing `y_t`, from the previous
/// inner belief and the partial encoder in force.
pub fn theta1<S: Prob>(model: &SystemModel<S>, xi_prev: &BeliefXi<S>, y: usize, enc: &[usize]) -> Result<Vec<S>> {
    let prior = model.prior_for(xi_prev.stage, &xi_prev.dist);
    let w = observation_weights(model, &prior, y, None, enc);
    let a = &model.alphabets;
    let mut marg = vec![S::zero(); a.u];
    for (s, p) in w.iter().enumerate() {
        marg[a.split(s).0] += p;
    }
    normalized(&marg).ok_or(Error::ZeroProbabilityObservation)
}

/// Outer decoder's belief over `V_t`: the `V` marginal of `Π_t`.
pub fn theta2<S: Prob>(model: &SystemModel<S>, pi: &BeliefPi<S>) -> Vec<S> {
    let a = &model.alphabets;
    let mut out = vec![S::zero(); a.v];
    for (s, w) in pi.marginal().iter().enumerate() {
        out[a.split(s).1] += w;
    }
    out
}

pub fn pi_init<S: Prob>(model: &SystemModel<S>) -> BeliefPi<S> {
    let xi = xi_init(model);
    let mut atoms = BTreeMap::new();
    atoms.insert(xi.key(), PiAtom { xi: xi.dist, weights: model.source.initial.clone() });
    BeliefPi { stage: 0, atoms }
}

/// Children of `pi` for every outer output at once: `(z, Pr(z), Π')` for
/// each `z` of positive probability, `Π'` normalized.
pub(crate) fn pi_children<'e, S: Prob>(
    model: &SystemModel<S>,
    pi: &BeliefPi<S>,
    enc: impl Fn(&AtomKey<S>) -> Option<&'e [usize]>,
) -> Result<Vec<(usize, S, BeliefPi<S>)>> {
    let a = &model.alphabets;
    let mut unnormalized: Vec<BTreeMap<AtomKey<S>, PiAtom<S>>> = vec![BTreeMap::new(); a.z];
    for (key, atom) in &pi.atoms {
        let table = enc(key).ok_or(Error::UnknownAtom { stage: pi.stage + 1 })?;
        let parent = BeliefXi { stage: pi.stage, dist: atom.xi.clone() };
        let prior = model.prior_for(pi.stage, &atom.weights);
        for y in 0..a.y {
            for (z, children) in unnormalized.iter_mut().enumerate() {
                let w = observation_weights(model, &prior, y, Some(z), table);
                if w.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let child = xi_update(model, &parent, y, z, table)?;
                merge_atom(children, child.dist, w)?;
            }
        }
    }
    let mut out = Vec::new();
    for (z, atoms) in unnormalized.into_iter().enumerate() {
        let mut mass = S::zero();
        for atom in atoms.values() {
            mass += &atom.mass();
        }
        if mass.is_zero() {
            continue;
        }
        let atoms = atoms
            .into_iter()
            .map(|(k, mut atom)| {
                for w in atom.weights.iter_mut() {
                    *w /= &mass;
                }
                (k, atom)
            })
            .collect();
        out.push((z, mass, BeliefPi { stage: pi.stage + 1, atoms }));
    }
    Ok(out)
}

fn merge_atom<S: Prob>(atoms: &mut BTreeMap<AtomKey<S>, PiAtom<S>>, xi: Vec<S>, weights: Vec<S>) -> Result<()> {
    let key = vec_key(&xi);
    match atoms.get_mut(&key) {
        Some(existing) => {
            if !S::EXACT {
                let d = linf(&existing.xi, &xi);
                if d > S::tolerance() {
                    return Err(Error::AtomKeyCollision { distance: format!("{:e}", d.to_f64()) });
                }
            }
            for (e, w) in existing.weights.iter_mut().zip(weights) {
                *e += w;
            }
        }
        None => {
            atoms.insert(key, PiAtom { xi, weights });
        }
    }
    Ok(())
}

/// Outer-belief update on `z`: every atom `ξ'` and inner output `y` spawn
/// the child atom `xi_update(ξ', y, z, ĉ(ξ'))`; children with equal
/// canonical keys are merged and the result normalized. Inner outputs with
/// zero likelihood are skipped; only `z` itself must be reachable.
pub fn pi_update<S: Prob>(model: &SystemModel<S>, pi: &BeliefPi<S>, z: usize, enc: &AtomEncoder<S>) -> Result<BeliefPi<S>> {
    pi_children(model, pi, |k| enc.get(k).map(Vec::as_slice))?
        .into_iter()
        .find(|(zz, _, _)| *zz == z)
        .map(|(_, _, child)| child)
        .ok_or(Error::ZeroProbabilityObservation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Exact;
    use crate::model::{build_special_case, ScenarioChannel};
    use crate::random::{random_model, RandomModelSpec};
    use num_traits::{One, Zero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity_source_noiseless() -> SystemModel<Exact> {
        build_special_case(2, 2, 4, 2, ScenarioChannel::Noiseless).unwrap()
    }

    #[test]
    fn init_copies_the_prior() {
        let m = identity_source_noiseless();
        assert_eq!(xi_init(&m).dist, vec![Exact::new(1, 4); 4]);
        let mut point = m.clone();
        point.source.initial = vec![Exact::zero(), Exact::one(), Exact::zero(), Exact::zero()];
        assert_eq!(xi_init(&point).dist, point.source.initial);
    }

    #[test]
    fn noiseless_injective_encoder_reveals_the_pair() {
        let m = identity_source_noiseless();
        let enc = [0, 1, 2, 3];
        for s in 0..4 {
            let xi = xi_update(&m, &xi_init(&m), s, s, &enc).unwrap();
            let mut expected = vec![Exact::zero(); 4];
            expected[s] = Exact::one();
            assert_eq!(xi.dist, expected);
            let (u, _) = m.alphabets.split(s);
            let th = theta1(&m, &xi_init(&m), s, &enc).unwrap();
            assert_eq!(th[u], Exact::one());
        }
    }

    #[test]
    fn uninformative_channel_only_predicts() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut m = random_model(&mut rng, &RandomModelSpec::binary(2));
        m.channel.inner = vec![vec![Exact::new(1, 2); 2]; 2];
        let xi0 = xi_init(&m);
        let xi1 = xi_update(&m, &xi0, 0, 1, &[0, 1, 1, 0]);
        let Ok(xi1) = xi1 else { return };
        let xi2 = xi_update(&m, &xi1, 1, 0, &[1, 0, 0, 1]);
        if let Ok(xi2) = xi2 {
            if m.channel.outer[1][0].is_zero() {
                return;
            }
            assert_eq!(xi2.dist, m.predict(&xi1.dist));
        }
        let th = theta1(&m, &xi1, 0, &[1, 1, 0, 0]).unwrap();
        let pred = m.predict(&xi1.dist);
        assert_eq!(th, vec![&pred[0] + &pred[1], &pred[2] + &pred[3]]);
    }

    #[test]
    fn impossible_observation_is_an_error() {
        let m = identity_source_noiseless();
        assert_eq!(xi_update(&m, &xi_init(&m), 1, 2, &[0, 1, 2, 3]), Err(Error::ZeroProbabilityObservation));
        assert_eq!(theta1(&m, &xi_init(&m), 3, &[0, 0, 0, 0]), Err(Error::ZeroProbabilityObservation));
    }

    #[test]
    fn pi_init_is_a_single_prior_atom() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_model(&mut rng, &RandomModelSpec::binary(2));
        let pi = pi_init(&m);
        assert_eq!(pi.atoms.len(), 1);
        let atom = pi.atoms.values().next().unwrap();
        assert_eq!(atom.xi, xi_init(&m).dist);
        assert_eq!(pi.marginal(), m.source.initial);
    }

    #[test]
    fn single_inner_output_never_grows_the_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut spec = RandomModelSpec::binary(3);
        spec.y = 1;
        let m = random_model(&mut rng, &spec);
        let mut pi = pi_init(&m);
        for _ in 0..3 {
            let enc: AtomEncoder<Exact> = pi.atoms.keys().map(|k| (k.clone(), vec![1, 0, 0, 1])).collect();
            let Ok(next) = pi_update(&m, &pi, 0, &enc) else { break };
            assert_eq!(next.atoms.len(), 1);
            pi = next;
        }
    }

    #[test]
    fn theta2_of_a_point_mass() {
        let m = identity_source_noiseless();
        let mut pi = pi_init(&m);
        let atom = pi.atoms.values_mut().next().unwrap();
        atom.weights = vec![Exact::zero(), Exact::zero(), Exact::zero(), Exact::one()];
        assert_eq!(theta2(&m, &pi), vec![Exact::zero(), Exact::one()]);
    }

    #[test]
    fn missing_atom_rule_is_reported() {
        let m = identity_source_noiseless();
        let err = pi_update(&m, &pi_init(&m), 0, &AtomEncoder::<Exact>::new()).unwrap_err();
        assert_eq!(err, Error::UnknownAtom { stage: 1 });
    }
}
