use std::collections::BTreeMap;

use super::oracle::Oracle;
use super::{pi_init, pi_update, theta1, theta2, xi_init, xi_update, AtomEncoder, BeliefPi, BeliefXi};
use crate::error::{Error, Result};
use crate::exact::Exact;
use crate::model::SystemModel;
use crate::prob::{convert, linf, Prob};
use crate::strategy::history::push_shared;
use crate::strategy::MarkovStrategy;

/// Largest deviation of each filter from the oracle over every reachable
/// history of one strategy (or a batch of them).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterDeviation {
    pub histories: usize,
    pub xi: f64,
    pub pi: f64,
    pub theta_u: f64,
    pub theta_v: f64,
    /// Every deviation was exactly zero in the filter's arithmetic.
    pub exact: bool,
}

impl FilterDeviation {
    pub fn max(&self) -> f64 {
        self.xi.max(self.pi).max(self.theta_u).max(self.theta_v)
    }

    pub fn merge(&mut self, other: &FilterDeviation) {
        let was_empty = self.histories == 0;
        self.histories += other.histories;
        self.xi = self.xi.max(other.xi);
        self.pi = self.pi.max(other.pi);
        self.theta_u = self.theta_u.max(other.theta_u);
        self.theta_v = self.theta_v.max(other.theta_v);
        self.exact = (was_empty || self.exact) && other.exact;
    }
}

struct Tally<S> {
    worst: [S; 4],
    histories: usize,
}

impl<S: Prob> Tally<S> {
    fn record(&mut self, which: usize, d: S) {
        if d > self.worst[which] {
            self.worst[which] = d;
        }
    }

    fn finish(self) -> FilterDeviation {
        let exact = self.worst.iter().all(|d| d.is_zero());
        let [xi, pi, theta_u, theta_v] = self.worst.map(|d| d.to_f64());
        FilterDeviation { histories: self.histories, xi, pi, theta_u, theta_v, exact }
    }
}

const XI: usize = 0;
const PI: usize = 1;
const THETA_U: usize = 2;
const THETA_V: usize = 3;

/// Distance between a filtered `Π` and the oracle's: the worst coordinate
/// gap over matched atoms, or one if the supports do not correspond.
pub fn pi_deviation<S: Prob>(filter: &BeliefPi<S>, oracle: &BeliefPi<Exact>) -> S {
    let mut worst = S::zero();
    let mut matched = std::collections::BTreeSet::new();
    for atom in oracle.atoms.values() {
        let xi: Vec<S> = convert(&atom.xi);
        let Some((key, found)) = filter.find_atom(&xi) else {
            return S::one();
        };
        matched.insert(key.clone());
        for d in [linf(&found.xi, &xi), linf(&found.weights, &convert::<S>(&atom.weights))] {
            if d > worst {
                worst = d;
            }
        }
    }
    if matched.len() != filter.atoms.len() {
        return S::one();
    }
    worst
}

/// Runs the inner-belief and decoder-belief filters along every reachable
/// history of `strategy` and the outer-belief filter along every reachable
/// outer history, comparing each step with the oracle.
///
/// The outer filter needs the encoder as a rule on inner-belief atoms, so
/// `strategy` must choose the same table at any two shared histories with
/// equal outer histories and equal inner beliefs; otherwise the result is
/// `InvalidStrategy`.
pub fn filter_check<S: Prob>(model: &SystemModel<Exact>, strategy: &MarkovStrategy, cap: u64) -> Result<FilterDeviation> {
    let oracle = Oracle::build(model, strategy, cap)?;
    let fm: SystemModel<S> = model.convert();
    let a = model.alphabets;
    let mut tally = Tally { worst: std::array::from_fn(|_| S::zero()), histories: 0 };

    let xi0 = xi_init(&fm);
    tally.record(XI, linf(&xi0.dist, &convert::<S>(&oracle.xi(&[], &[])?.dist)));
    let pi0 = pi_init(&fm);
    tally.record(PI, pi_deviation(&pi0, &oracle.pi(&[])?));

    // (stage, z^t) -> atom rules, collected from the inner pass
    let mut rules: BTreeMap<(usize, Vec<usize>), Vec<(BeliefXi<S>, Vec<usize>)>> = BTreeMap::new();
    let mut stack = vec![(xi0, 0usize, Vec::<usize>::new(), Vec::<usize>::new())];
    while let Some((xi, h, ys, zs)) = stack.pop() {
        let t = ys.len();
        if t == model.horizon {
            continue;
        }
        let table = &strategy.encoder[t][h];
        let entry = rules.entry((t, zs.clone())).or_default();
        match entry.iter().find(|(x, _)| linf(&x.dist, &xi.dist) <= S::tolerance()) {
            Some((_, existing)) if existing != table => {
                return Err(Error::InvalidStrategy(format!(
                    "encoder at stage {} differs between histories with the same inner belief",
                    t + 1
                )))
            }
            Some(_) => {}
            None => entry.push((xi.clone(), table.clone())),
        }
        for y in 0..a.y {
            for z in 0..a.z {
                let mut ys2 = ys.clone();
                ys2.push(y);
                let mut zs2 = zs.clone();
                zs2.push(z);
                let Ok(expected) = oracle.xi(&ys2, &zs2) else { continue };
                tally.histories += 1;
                let got = xi_update(&fm, &xi, y, z, table)?;
                tally.record(XI, linf(&got.dist, &convert::<S>(&expected.dist)));
                let th = theta1(&fm, &xi, y, table)?;
                tally.record(THETA_U, linf(&th, &convert::<S>(&oracle.theta_u(&ys2, &zs)?)));
                stack.push((got, push_shared(&a, h, y, z), ys2, zs2));
            }
        }
    }

    let mut stack = vec![(pi0, Vec::<usize>::new())];
    while let Some((pi, zs)) = stack.pop() {
        let t = zs.len();
        if t == model.horizon {
            continue;
        }
        let known = rules.get(&(t, zs.clone())).map(Vec::as_slice).unwrap_or(&[]);
        let enc: AtomEncoder<S> = pi
            .atoms
            .iter()
            .filter_map(|(k, atom)| {
                known
                    .iter()
                    .find(|(x, _)| linf(&x.dist, &atom.xi) <= S::tolerance())
                    .map(|(_, table)| (k.clone(), table.clone()))
            })
            .collect();
        for z in 0..a.z {
            let mut zs2 = zs.clone();
            zs2.push(z);
            let Ok(expected) = oracle.pi(&zs2) else { continue };
            let got = pi_update(&fm, &pi, z, &enc)?;
            tally.record(PI, pi_deviation(&got, &expected));
            tally.record(THETA_V, linf(&theta2(&fm, &got), &convert::<S>(&oracle.theta_v(&zs2)?)));
            stack.push((got, zs2));
        }
    }
    Ok(tally.finish())
}
