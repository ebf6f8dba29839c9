//! The communication-system instance: a two-component Markov source, a
//! physically degraded broadcast channel `X → Y → Z`, per-stage distortion
//! matrices and the horizon.
//!
//! Source pairs `(u, v)` are flattened row-major, `s = u * |V| + v`, in every
//! matrix and belief vector of the crate.

mod config;
mod scenario;
pub(crate) mod support;

pub use config::{validate_model, RawAlphabets, RawChannel, RawDistortion, RawModel, RawSource};
pub use scenario::{build_special_case, ScenarioChannel};
pub use support::{reachable_trajectory_support, Trajectory, DEFAULT_TRAJECTORY_CAP};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exact::Exact;
use crate::prob::{convert, Prob};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabets {
    pub u: usize,
    pub v: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub u_hat: usize,
    pub v_hat: usize,
}

impl Alphabets {
    /// Same size everywhere, reconstruction alphabets equal to the source's.
    pub fn uniform(n: usize) -> Self {
        Alphabets { u: n, v: n, x: n, y: n, z: n, u_hat: n, v_hat: n }
    }

    pub fn pairs(&self) -> usize {
        self.u * self.v
    }

    pub fn pair(&self, u: usize, v: usize) -> usize {
        u * self.v + v
    }

    pub fn split(&self, s: usize) -> (usize, usize) {
        (s / self.v, s % self.v)
    }

    /// Number of joint channel outputs `(y, z)`.
    pub fn outputs(&self) -> usize {
        self.y * self.z
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSource<S> {
    /// Law of `(U_1, V_1)`.
    pub initial: Vec<S>,
    /// `transition[s'][s] = P(s | s')`.
    pub transition: Vec<Vec<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegradedChannel<S> {
    /// `inner[x][y] = Q(y | x)`.
    pub inner: Vec<Vec<S>>,
    /// `outer[y][z] = Q(z | y)`.
    pub outer: Vec<Vec<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSchedule<S> {
    /// `rho1[t - 1][u][u_hat]`.
    pub rho1: Vec<Vec<Vec<S>>>,
    /// `rho2[t - 1][v][v_hat]`.
    pub rho2: Vec<Vec<Vec<S>>>,
    pub rho_max: S,
}

/// A validated instance. Immutable once built; share it freely across
/// threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel<S> {
    pub alphabets: Alphabets,
    pub horizon: usize,
    pub source: MarkovSource<S>,
    pub channel: DegradedChannel<S>,
    pub distortion: DistortionSchedule<S>,
}

impl<S: Prob> SystemModel<S> {
    /// One-step prediction of a belief (or unnormalized weights) over source
    /// pairs through the source transition matrix.
    pub fn predict(&self, belief: &[S]) -> Vec<S> {
        let n = self.alphabets.pairs();
        let mut out = vec![S::zero(); n];
        for (prev, w) in belief.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (next, p) in self.source.transition[prev].iter().enumerate() {
                if !p.is_zero() {
                    out[next] += S::product(w, p);
                }
            }
        }
        out
    }

    /// Law of the source pair at the stage after a belief tagged with
    /// `stage` observations: the initial law at stage 0, a prediction
    /// otherwise.
    pub fn prior_for(&self, stage: usize, belief: &[S]) -> Vec<S> {
        if stage == 0 {
            belief.to_vec()
        } else {
            self.predict(belief)
        }
    }

    /// `Q(y | x) Q(z | y)`.
    pub fn channel_joint(&self, x: usize, y: usize, z: usize) -> S {
        S::product(&self.channel.inner[x][y], &self.channel.outer[y][z])
    }

    pub fn rho1(&self, t: usize) -> &[Vec<S>] {
        &self.distortion.rho1[t - 1]
    }

    pub fn rho2(&self, t: usize) -> &[Vec<S>] {
        &self.distortion.rho2[t - 1]
    }

    /// `2 T rho_max`, the largest attainable expected total distortion.
    pub fn cost_bound(&self) -> S {
        let mut b = S::zero();
        for _ in 0..2 * self.horizon {
            b += &self.distortion.rho_max;
        }
        b
    }
}

impl SystemModel<Exact> {
    pub fn convert<S: Prob>(&self) -> SystemModel<S> {
        let mat = |m: &Vec<Vec<Exact>>| m.iter().map(|r| convert::<S>(r)).collect::<Vec<_>>();
        SystemModel {
            alphabets: self.alphabets,
            horizon: self.horizon,
            source: MarkovSource {
                initial: convert(&self.source.initial),
                transition: mat(&self.source.transition),
            },
            channel: DegradedChannel { inner: mat(&self.channel.inner), outer: mat(&self.channel.outer) },
            distortion: DistortionSchedule {
                rho1: self.distortion.rho1.iter().map(mat).collect(),
                rho2: self.distortion.rho2.iter().map(mat).collect(),
                rho_max: S::from_exact(&self.distortion.rho_max),
            },
        }
    }

    /// Scales every distortion entry (and `rho_max`) by `factor`.
    pub fn scale_distortion(&self, factor: &Exact) -> SystemModel<Exact> {
        let mut m = self.clone();
        let scale = |stages: &mut Vec<Vec<Vec<Exact>>>| {
            for e in stages.iter_mut().flatten().flatten() {
                *e = &*e * factor;
            }
        };
        scale(&mut m.distortion.rho1);
        scale(&mut m.distortion.rho2);
        m.distortion.rho_max = &m.distortion.rho_max * factor;
        m
    }

    /// Adds `shift` to every inner-distortion entry, raising `rho_max` as
    /// needed.
    pub fn shift_inner_distortion(&self, shift: &Exact) -> SystemModel<Exact> {
        let mut m = self.clone();
        for e in m.distortion.rho1.iter_mut().flatten().flatten() {
            *e = &*e + shift;
        }
        m.distortion.rho_max = &m.distortion.rho_max + shift;
        m
    }

    pub fn to_raw(&self) -> RawModel {
        let a = self.alphabets;
        RawModel {
            horizon: self.horizon,
            alphabets: RawAlphabets {
                u: a.u,
                v: a.v,
                x: a.x,
                y: a.y,
                z: a.z,
                u_hat: Some(a.u_hat),
                v_hat: Some(a.v_hat),
            },
            source: RawSource {
                initial: self.source.initial.clone(),
                transition: self.source.transition.clone(),
            },
            channel: RawChannel { inner: self.channel.inner.clone(), outer: self.channel.outer.clone() },
            distortion: RawDistortion {
                rho_max: self.distortion.rho_max.clone(),
                rho1: self.distortion.rho1.clone(),
                rho2: self.distortion.rho2.clone(),
            },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_raw()).expect("model serializes to TOML")
    }

    pub fn from_toml(text: &str) -> crate::Result<Self> {
        let raw: RawModel = toml::from_str(text).map_err(|e| crate::Error::Schema(e.message().to_string()))?;
        validate_model(raw)
    }

    /// Content hash over the canonical serialization; stable across file
    /// formatting differences.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        hex::encode(&digest[..8])
    }
}
