//! Strategy classes and the machinery to execute them stage by stage.
//!
//! * [`GeneralStrategy`]: encoder sees its full history.
//! * [`MarkovStrategy`]: encoder sees the current source pair and the fed
//!   back outputs.
//! * [`CoordinatorStrategy`]: per shared history, a prescription mapping the
//!   encoder's and inner decoder's private data to actions.
//! * [`StructuredStrategy`]: encoder rule selected by the outer belief and
//!   applied to the current pair and the inner belief; decoders are MAP on
//!   the compressed beliefs.
//!
//! Within a stage the order of events is fixed: encode `(u_t, v_t)`, observe
//! `y_t` at the inner decoder, observe `z_t` at the outer decoder. Runners
//! hold one episode's state and are cloned to branch during enumeration.

mod coordinator;
pub(crate) mod decode;
mod general;
pub mod history;
mod io;
mod markov;
mod structured;

pub use coordinator::{lift_to_coordinator, lower_from_coordinator, CoordinatorRunner, CoordinatorStrategy, Prescription};
pub use general::GeneralRunner;
pub use markov::MarkovRunner;
pub use decode::{map_decode, map_decode_u, map_decode_v};
pub use general::GeneralStrategy;
pub use io::{AnyRunner, AnyStrategy, AtomFile, ChildFile, NodeFile, StrategyFile, StructuredFile};
pub use markov::{Decoders, MarkovStrategy};
pub use structured::{PiNode, StructuredRunner, StructuredStrategy};

use crate::error::Result;
use crate::model::SystemModel;
use crate::prob::Prob;

pub trait StageRunner: Clone {
    fn encode(&mut self, u: usize, v: usize) -> Result<usize>;
    fn decode_inner(&mut self, y: usize) -> Result<usize>;
    fn decode_outer(&mut self, z: usize) -> Result<usize>;
}

/// A strategy that can be run on a model.
pub trait Executable<S: Prob> {
    type Runner<'a>: StageRunner
    where
        Self: 'a,
        S: 'a;

    fn runner<'a>(&'a self, model: &'a SystemModel<S>) -> Self::Runner<'a>;
}
