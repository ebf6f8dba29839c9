use crate::error::{Error, Result};
use crate::prob::Prob;
use crate::strategy::{Executable, StageRunner};

use super::SystemModel;

/// Exact evaluation refuses instances with more weighted trajectories.
pub const DEFAULT_TRAJECTORY_CAP: u64 = 10_000_000;

/// One positive-probability realization of the whole horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    pub u_hat: Vec<usize>,
    pub v_hat: Vec<usize>,
    pub prob: S,
}

/// Realized symbols of a single stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Step {
    pub s: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub u_hat: usize,
    pub v_hat: usize,
}

struct Walker<'m, 'v, S, F> {
    model: &'m SystemModel<S>,
    cap: u64,
    leaves: u64,
    path: Vec<Step>,
    visit: &'v mut F,
}

impl<S: Prob, F: FnMut(&[Step], &S)> Walker<'_, '_, S, F> {
    fn descend<R: StageRunner>(&mut self, runner: &R, weight: &S) -> Result<()> {
        let t = self.path.len();
        if t == self.model.horizon {
            self.leaves += 1;
            if self.leaves > self.cap {
                return Err(Error::CapExceeded {
                    what: "trajectory",
                    count: format!("at least {}", self.leaves),
                    cap: self.cap as u128,
                });
            }
            return Ok(());
        }
        let a = &self.model.alphabets;
        for s in 0..a.pairs() {
            let p_s = match self.path.last() {
                None => &self.model.source.initial[s],
                Some(prev) => &self.model.source.transition[prev.s][s],
            };
            if p_s.is_zero() {
                continue;
            }
            let w_s = S::product(weight, p_s);
            let (u, v) = a.split(s);
            let mut enc = runner.clone();
            let x = enc.encode(u, v)?;
            for y in 0..a.y {
                let q_y = &self.model.channel.inner[x][y];
                if q_y.is_zero() {
                    continue;
                }
                let w_y = S::product(&w_s, q_y);
                let mut inner = enc.clone();
                let u_hat = inner.decode_inner(y)?;
                for z in 0..a.z {
                    let q_z = &self.model.channel.outer[y][z];
                    if q_z.is_zero() {
                        continue;
                    }
                    let w_z = S::product(&w_y, q_z);
                    let mut outer = inner.clone();
                    let v_hat = outer.decode_outer(z)?;
                    self.path.push(Step { s, x, y, z, u_hat, v_hat });
                    (self.visit)(&self.path, &w_z);
                    let res = self.descend(&outer, &w_z);
                    self.path.pop();
                    res?;
                }
            }
        }
        Ok(())
    }
}

/// Depth-first walk over every positive-probability prefix. `visit` sees
/// each stage's node with the realized path so far and its probability.
/// Returns the number of complete trajectories.
pub(crate) fn walk<S: Prob, R: StageRunner>(
    model: &SystemModel<S>,
    runner: R,
    cap: u64,
    mut visit: impl FnMut(&[Step], &S),
) -> Result<u64> {
    let mut walker = Walker { model, cap, leaves: 0, path: Vec::with_capacity(model.horizon), visit: &mut visit };
    walker.descend(&runner, &S::one())?;
    Ok(walker.leaves)
}

/// Every trajectory `(u^T, v^T, x^T, y^T, z^T)` with positive probability
/// under `strategy`, with its exact probability and the strategy's
/// reconstructions.
pub fn reachable_trajectory_support<S: Prob, E: Executable<S>>(
    model: &SystemModel<S>,
    strategy: &E,
    cap: u64,
) -> Result<Vec<Trajectory<S>>> {
    let horizon = model.horizon;
    let a = model.alphabets;
    let mut out = Vec::new();
    walk(model, strategy.runner(model), cap, |path, w| {
        if path.len() == horizon {
            let mut tr = Trajectory {
                u: Vec::with_capacity(horizon),
                v: Vec::with_capacity(horizon),
                x: Vec::with_capacity(horizon),
                y: Vec::with_capacity(horizon),
                z: Vec::with_capacity(horizon),
                u_hat: Vec::with_capacity(horizon),
                v_hat: Vec::with_capacity(horizon),
                prob: w.clone(),
            };
            for st in path {
                let (u, v) = a.split(st.s);
                tr.u.push(u);
                tr.v.push(v);
                tr.x.push(st.x);
                tr.y.push(st.y);
                tr.z.push(st.z);
                tr.u_hat.push(st.u_hat);
                tr.v_hat.push(st.v_hat);
            }
            out.push(tr);
        }
    })?;
    Ok(out)
}
