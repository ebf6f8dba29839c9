//! Strategy files: JSON with a `class` tag. Table classes are written as
//! their tables; the structured class as its tree with probabilities in
//! text form (`p/q` or decimal).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::coordinator::CoordinatorRunner;
use super::general::GeneralRunner;
use super::markov::MarkovRunner;
use super::{CoordinatorStrategy, Executable, GeneralStrategy, MarkovStrategy, PiNode, StageRunner, StructuredRunner, StructuredStrategy};
use crate::belief::{BeliefPi, PiAtom};
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::prob::{vec_key, Prob};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeFile {
    pub depth: usize,
    pub atoms: Vec<AtomFile>,
    #[serde(default)]
    pub children: Vec<ChildFile>,
}

/// Subtree reached when the outer output is `z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChildFile {
    pub z: usize,
    pub node: NodeFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomFile {
    pub xi: Vec<String>,
    pub weights: Vec<String>,
    /// Absent at the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoder: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuredFile {
    pub horizon: usize,
    pub root: NodeFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum StrategyFile {
    General(GeneralStrategy),
    Markov(MarkovStrategy),
    Coordinator(CoordinatorStrategy),
    Structured(StructuredFile),
}

impl StrategyFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("strategy serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    /// Hash of the canonical (compact) serialization.
    pub fn content_hash(&self) -> String {
        let text = serde_json::to_string(self).expect("strategy serializes");
        hex::encode(&Sha256::digest(text.as_bytes())[..8])
    }

    pub fn class(&self) -> &'static str {
        match self {
            StrategyFile::General(_) => "general",
            StrategyFile::Markov(_) => "markov",
            StrategyFile::Coordinator(_) => "coordinator",
            StrategyFile::Structured(_) => "structured",
        }
    }

    /// Loads the strategy for `model`, validating it.
    pub fn into_strategy<S: Prob>(self, model: &SystemModel<S>) -> Result<AnyStrategy<S>> {
        let a = &model.alphabets;
        let s = match self {
            StrategyFile::General(g) => {
                g.validate(a, model.horizon)?;
                AnyStrategy::General(g)
            }
            StrategyFile::Markov(m) => {
                m.validate(a, model.horizon)?;
                AnyStrategy::Markov(m)
            }
            StrategyFile::Coordinator(c) => {
                c.validate(a, model.horizon)?;
                AnyStrategy::Coordinator(c)
            }
            StrategyFile::Structured(f) => {
                let s = StructuredStrategy { horizon: f.horizon, root: node_from_file(&f.root)? };
                s.validate(model)?;
                AnyStrategy::Structured(s)
            }
        };
        Ok(s)
    }
}

fn parse_all<S: Prob>(values: &[String]) -> Result<Vec<S>> {
    values
        .iter()
        .map(|v| S::parse_value(v).ok_or_else(|| Error::Schema(format!("invalid probability `{v}`"))))
        .collect()
}

fn node_from_file<S: Prob>(f: &NodeFile) -> Result<PiNode<S>> {
    let mut atoms = BTreeMap::new();
    let mut action = BTreeMap::new();
    for atom in &f.atoms {
        let xi: Vec<S> = parse_all(&atom.xi)?;
        let key = vec_key(&xi);
        if let Some(enc) = &atom.encoder {
            action.insert(key.clone(), enc.clone());
        }
        atoms.insert(key, PiAtom { xi, weights: parse_all(&atom.weights)? });
    }
    let mut children = BTreeMap::new();
    for c in &f.children {
        if children.insert(c.z, node_from_file(&c.node)?).is_some() {
            return Err(Error::InvalidStrategy(format!("duplicate child {} at depth {}", c.z, f.depth)));
        }
    }
    Ok(PiNode { depth: f.depth, pi: BeliefPi { stage: f.depth, atoms }, action, children })
}

fn node_to_file<S: Prob>(n: &PiNode<S>) -> NodeFile {
    NodeFile {
        depth: n.depth,
        atoms: n
            .pi
            .atoms
            .iter()
            .map(|(k, atom)| AtomFile {
                xi: atom.xi.iter().map(ToString::to_string).collect(),
                weights: atom.weights.iter().map(ToString::to_string).collect(),
                encoder: n.action.get(k).cloned(),
            })
            .collect(),
        children: n.children.iter().map(|(z, c)| ChildFile { z: *z, node: node_to_file(c) }).collect(),
    }
}

impl<S: Prob> StructuredStrategy<S> {
    pub fn to_file(&self) -> StructuredFile {
        StructuredFile { horizon: self.horizon, root: node_to_file(&self.root) }
    }
}

/// A loaded strategy of any class.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyStrategy<S: Prob> {
    General(GeneralStrategy),
    Markov(MarkovStrategy),
    Coordinator(CoordinatorStrategy),
    Structured(StructuredStrategy<S>),
}

impl<S: Prob> AnyStrategy<S> {
    pub fn to_file(&self) -> StrategyFile {
        match self {
            AnyStrategy::General(g) => StrategyFile::General(g.clone()),
            AnyStrategy::Markov(m) => StrategyFile::Markov(m.clone()),
            AnyStrategy::Coordinator(c) => StrategyFile::Coordinator(c.clone()),
            AnyStrategy::Structured(s) => StrategyFile::Structured(s.to_file()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum AnyRunner<'a, S: Prob> {
    General(GeneralRunner<'a>),
    Markov(MarkovRunner<'a>),
    Coordinator(CoordinatorRunner<'a>),
    Structured(StructuredRunner<'a, S>),
}

macro_rules! dispatch {
    ($self:ident, $r:ident => $e:expr) => {
        match $self {
            AnyRunner::General($r) => $e,
            AnyRunner::Markov($r) => $e,
            AnyRunner::Coordinator($r) => $e,
            AnyRunner::Structured($r) => $e,
        }
    };
}

impl<S: Prob> StageRunner for AnyRunner<'_, S> {
    fn encode(&mut self, u: usize, v: usize) -> Result<usize> {
        dispatch!(self, r => r.encode(u, v))
    }

    fn decode_inner(&mut self, y: usize) -> Result<usize> {
        dispatch!(self, r => r.decode_inner(y))
    }

    fn decode_outer(&mut self, z: usize) -> Result<usize> {
        dispatch!(self, r => r.decode_outer(z))
    }
}

impl<S: Prob> Executable<S> for AnyStrategy<S> {
    type Runner<'a> = AnyRunner<'a, S>;

    fn runner<'a>(&'a self, model: &'a SystemModel<S>) -> AnyRunner<'a, S> {
        match self {
            AnyStrategy::General(g) => AnyRunner::General(Executable::<S>::runner(g, model)),
            AnyStrategy::Markov(m) => AnyRunner::Markov(Executable::<S>::runner(m, model)),
            AnyStrategy::Coordinator(c) => AnyRunner::Coordinator(Executable::<S>::runner(c, model)),
            AnyStrategy::Structured(s) => AnyRunner::Structured(Executable::<S>::runner(s, model)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::exact_cost;
    use crate::exact::Exact;
    use crate::model::DEFAULT_TRAJECTORY_CAP;
    use crate::random::{random_markov_strategy, random_model, RandomModelSpec};
    use crate::search::coordinator_dp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_classes_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let m = random_model(&mut rng, &RandomModelSpec::binary(2));
        let s = random_markov_strategy(&mut rng, &m.alphabets, 2);
        let file = StrategyFile::Markov(s.clone());
        let back = StrategyFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.content_hash(), file.content_hash());
        assert_eq!(back.into_strategy(&m).unwrap(), AnyStrategy::<Exact>::Markov(s));
    }

    #[test]
    fn structured_round_trips_in_both_arithmetics() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let m = random_model(&mut rng, &RandomModelSpec::noisy_binary(2));
        let dp = coordinator_dp(&m, &Default::default()).unwrap();
        let file = StrategyFile::Structured(dp.structured.to_file());
        let back = StrategyFile::from_json(&file.to_json()).unwrap();
        let exact = back.clone().into_strategy(&m).unwrap();
        assert_eq!(exact, AnyStrategy::Structured(dp.structured.clone()));
        let cost: Exact = exact_cost(&m, &exact, DEFAULT_TRAJECTORY_CAP).unwrap().total;
        assert_eq!(cost, dp.result.best_cost);

        let fm = m.convert::<f64>();
        let float = back.into_strategy(&fm).unwrap();
        let fcost = exact_cost(&fm, &float, DEFAULT_TRAJECTORY_CAP).unwrap().total;
        assert!((fcost - cost.to_f64()).abs() < 1e-9);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(matches!(StrategyFile::from_json("{\"class\":\"markov\"}"), Err(Error::Schema(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let m = random_model(&mut rng, &RandomModelSpec::binary(2));
        let mut s = random_markov_strategy(&mut rng, &m.alphabets, 2);
        s.encoder[1].pop();
        assert!(matches!(StrategyFile::Markov(s).into_strategy(&m), Err(Error::InvalidStrategy(_))));
    }
}
