use std::collections::BTreeMap;

use super::decode::{map_decode_u, map_decode_v};
use super::history::{inner_index, outer_count, push_outer, push_shared, shared_count};
use super::markov::Decoders;
use super::{Executable, MarkovStrategy, StageRunner};
use crate::belief::{theta1, theta2, xi_init, xi_update, AtomEncoder, BeliefPi, BeliefXi};
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::prob::Prob;

/// A reachable outer belief after `depth` outer observations, the encoder
/// rule chosen there for stage `depth + 1`, and one child per reachable
/// next outer output.
#[derive(Debug, Clone, PartialEq)]
pub struct PiNode<S: Prob> {
    pub depth: usize,
    pub pi: BeliefPi<S>,
    /// Table over source pairs for every atom in `pi`'s support. Empty at
    /// the horizon.
    pub action: AtomEncoder<S>,
    pub children: BTreeMap<usize, PiNode<S>>,
}

impl<S: Prob> PiNode<S> {
    pub fn node_count(&self) -> usize {
        1 + self.children.values().map(PiNode::node_count).sum::<usize>()
    }

    fn check(&self, model: &SystemModel<S>) -> Result<()> {
        let a = &model.alphabets;
        if self.depth < model.horizon {
            for key in self.pi.atoms.keys() {
                let table = self.action.get(key).ok_or(Error::UnknownAtom { stage: self.depth + 1 })?;
                super::markov::check_table(table, a.pairs(), a.x, "structured encoder", self.depth + 1)?;
            }
        } else if !self.children.is_empty() {
            return Err(Error::InvalidStrategy("structured tree deeper than the horizon".into()));
        }
        for (z, child) in &self.children {
            if *z >= a.z || child.depth != self.depth + 1 {
                return Err(Error::InvalidStrategy(format!("malformed child {z} at depth {}", self.depth)));
            }
            child.check(model)?;
        }
        Ok(())
    }
}

/// Encoder `X_t = ĉ_t(Π_{t-1})(U_t, V_t, Ξ_{t-1})` stored as a tree over the
/// reachable outer beliefs; both decoders are MAP on their beliefs.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredStrategy<S: Prob> {
    pub horizon: usize,
    pub root: PiNode<S>,
}

impl<S: Prob> StructuredStrategy<S> {
    pub fn validate(&self, model: &SystemModel<S>) -> Result<()> {
        if self.horizon != model.horizon || self.root.depth != 0 {
            return Err(Error::InvalidStrategy(format!("strategy horizon {} != model horizon {}", self.horizon, model.horizon)));
        }
        self.root.check(model)
    }

    /// Equivalent table strategy. Histories the structured strategy never
    /// reaches get symbol 0 everywhere.
    pub fn to_markov(&self, model: &SystemModel<S>) -> MarkovStrategy {
        let a = model.alphabets;
        let mut out = MarkovStrategy {
            horizon: self.horizon,
            encoder: (1..=self.horizon).map(|t| vec![vec![0; a.pairs()]; shared_count(&a, t)]).collect(),
            decoders: Decoders::constant(&a, self.horizon),
        };
        let mut stack = vec![(self.runner(model), 0usize, 0usize)];
        while let Some((runner, h, zh)) = stack.pop() {
            let t = runner.t;
            if t == self.horizon {
                continue;
            }
            let Ok(table) = runner.current_table() else { continue };
            out.encoder[t][h] = table.clone();
            for y in 0..a.y {
                let mut inner = runner.clone();
                inner.table = Some(table);
                let Ok(u_hat) = inner.decode_inner(y) else { continue };
                out.decoders.inner[t][inner_index(&a, h, y)] = u_hat;
                for z in 0..a.z {
                    let mut outer = inner.clone();
                    let Ok(v_hat) = outer.decode_outer(z) else { continue };
                    let zh2 = push_outer(&a, zh, z);
                    debug_assert!(zh2 < outer_count(&a, t + 1));
                    out.decoders.outer[t][zh2] = v_hat;
                    stack.push((outer, push_shared(&a, h, y, z), zh2));
                }
            }
        }
        out
    }

    fn runner<'a>(&'a self, model: &'a SystemModel<S>) -> StructuredRunner<'a, S> {
        StructuredRunner { model, node: &self.root, xi: xi_init(model), table: None, y: 0, t: 0 }
    }
}

/// Tracks the inner belief and the current tree node.
#[derive(Debug, Clone)]
pub struct StructuredRunner<'a, S: Prob> {
    model: &'a SystemModel<S>,
    node: &'a PiNode<S>,
    xi: BeliefXi<S>,
    table: Option<&'a Vec<usize>>,
    y: usize,
    t: usize,
}

impl<'a, S: Prob> StructuredRunner<'a, S> {
    fn current_table(&self) -> Result<&'a Vec<usize>> {
        let stage = self.t + 1;
        let (key, _) = self.node.pi.find_atom(&self.xi.dist).ok_or(Error::UnknownAtom { stage })?;
        self.node.action.get(key).ok_or(Error::UnknownAtom { stage })
    }

    pub fn inner_belief(&self) -> &BeliefXi<S> {
        &self.xi
    }

    pub fn outer_belief(&self) -> &BeliefPi<S> {
        &self.node.pi
    }
}

impl<S: Prob> StageRunner for StructuredRunner<'_, S> {
    fn encode(&mut self, u: usize, v: usize) -> Result<usize> {
        let table = self.current_table()?;
        self.table = Some(table);
        Ok(table[self.model.alphabets.pair(u, v)])
    }

    fn decode_inner(&mut self, y: usize) -> Result<usize> {
        let table = match self.table {
            Some(t) => t,
            None => self.current_table()?,
        };
        self.y = y;
        let theta = theta1(self.model, &self.xi, y, table)?;
        Ok(map_decode_u(&theta, self.model.rho1(self.t + 1)))
    }

    fn decode_outer(&mut self, z: usize) -> Result<usize> {
        let table = match self.table {
            Some(t) => t,
            None => self.current_table()?,
        };
        self.xi = xi_update(self.model, &self.xi, self.y, z, table)?;
        self.node = self.node.children.get(&z).ok_or(Error::UnknownAtom { stage: self.t + 2 })?;
        self.table = None;
        self.t += 1;
        Ok(map_decode_v(&theta2(self.model, &self.node.pi), self.model.rho2(self.t)))
    }
}

impl<S: Prob> Executable<S> for StructuredStrategy<S> {
    type Runner<'a> = StructuredRunner<'a, S>;

    fn runner<'a>(&'a self, model: &'a SystemModel<S>) -> StructuredRunner<'a, S> {
        StructuredStrategy::runner(self, model)
    }
}
