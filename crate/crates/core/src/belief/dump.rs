use serde::{Deserialize, Serialize};

use super::BeliefPi;
use crate::model::Alphabets;
use crate::prob::{sum, Prob};

/// One atom of an outer belief as written to a dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpAtom {
    /// Inner belief over source pairs, row-major in `(u, v)`.
    pub xi: Vec<String>,
    /// Total probability of the atom.
    pub weight: String,
    /// `conditional[u][v]`: law of the source pair given the atom.
    pub conditional: Vec<Vec<String>>,
}

/// Snapshot of an outer belief after `stage` outer observations. Values
/// are printed in the arithmetic that produced them (`p/q` or decimals).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeliefDump {
    pub stage: usize,
    pub atoms: Vec<DumpAtom>,
}

impl BeliefDump {
    pub fn from_pi<S: Prob>(a: &Alphabets, pi: &BeliefPi<S>) -> Self {
        let atoms = pi
            .atoms
            .values()
            .map(|atom| {
                let mass = sum(&atom.weights);
                let conditional = (0..a.u)
                    .map(|u| {
                        (0..a.v)
                            .map(|v| {
                                let w = atom.weights[a.pair(u, v)].clone();
                                if mass.is_zero() { w } else { w / mass.clone() }.to_string()
                            })
                            .collect()
                    })
                    .collect();
                DumpAtom { xi: atom.xi.iter().map(ToString::to_string).collect(), weight: mass.to_string(), conditional }
            })
            .collect();
        BeliefDump { stage: pi.stage, atoms }
    }
}
