//! Model files: TOML with explicit row-major matrices.
//!
//! ```toml
//! horizon = 2
//!
//! [alphabets]
//! u = 2
//! v = 2
//! x = 2
//! y = 2
//! z = 2
//! # u_hat, v_hat default to u, v
//!
//! [source]
//! initial = ["1/4", "1/4", "1/4", "1/4"]     # index u * |V| + v
//! transition = [["1", "0", "0", "0"], ...]     # row per previous pair
//!
//! [channel]
//! inner = [["9/10", "1/10"], ["1/10", "9/10"]] # Q(y | x), row per x
//! outer = [["4/5", "1/5"], ["1/5", "4/5"]]     # Q(z | y), row per y
//!
//! [distortion]
//! rho_max = "1"
//! rho1 = [[["0", "1"], ["1", "0"]], ...]       # per stage, rows u, columns u_hat
//! rho2 = [[["0", "1"], ["1", "0"]], ...]       # per stage, rows v, columns v_hat
//! ```
//!
//! Entries may be strings (`"3/8"`, `"0.375"`), integers or floats; floats
//! are read through their decimal rendering.

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{Alphabets, DegradedChannel, DistortionSchedule, MarkovSource, SystemModel};
use crate::error::{Error, Result};
use crate::exact::Exact;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAlphabets {
    pub u: usize,
    pub v: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_hat: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_hat: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSource {
    pub initial: Vec<Exact>,
    pub transition: Vec<Vec<Exact>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChannel {
    pub inner: Vec<Vec<Exact>>,
    pub outer: Vec<Vec<Exact>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDistortion {
    pub rho_max: Exact,
    pub rho1: Vec<Vec<Vec<Exact>>>,
    pub rho2: Vec<Vec<Vec<Exact>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub horizon: usize,
    pub alphabets: RawAlphabets,
    pub source: RawSource,
    pub channel: RawChannel,
    pub distortion: RawDistortion,
}

fn check_len(path: &str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { path: path.to_string(), expected, found });
    }
    Ok(())
}

fn check_dist(path: &str, row: &[Exact], len: usize) -> Result<()> {
    check_len(path, len, row.len())?;
    for (i, w) in row.iter().enumerate() {
        if w.is_negative() {
            return Err(Error::NegativeEntry { path: format!("{path}[{i}]"), value: w.to_string() });
        }
    }
    let total: Exact = row.iter().sum();
    if !total.is_one() {
        return Err(Error::NotStochastic { path: path.to_string(), sum: total.to_string() });
    }
    Ok(())
}

fn check_kernel(path: &str, label: &str, m: &[Vec<Exact>], rows: usize, cols: usize) -> Result<()> {
    check_len(path, rows, m.len())?;
    for (i, row) in m.iter().enumerate() {
        check_dist(&format!("{path}[{label}={i}]"), row, cols)?;
    }
    Ok(())
}

fn check_distortion(
    path: &str,
    stages: &[Vec<Vec<Exact>>],
    horizon: usize,
    (src, rec): (&str, &str),
    (rows, cols): (usize, usize),
    rho_max: &Exact,
) -> Result<()> {
    check_len(path, horizon, stages.len())?;
    for (t, m) in stages.iter().enumerate() {
        let stage_path = format!("{path}[t={}]", t + 1);
        check_len(&stage_path, rows, m.len())?;
        for (i, row) in m.iter().enumerate() {
            let row_path = format!("{stage_path}[{src}={i}]");
            check_len(&row_path, cols, row.len())?;
            for (j, e) in row.iter().enumerate() {
                let entry = format!("{row_path}[{rec}={j}]");
                if e.is_negative() {
                    return Err(Error::NegativeEntry { path: entry, value: e.to_string() });
                }
                if e > rho_max {
                    return Err(Error::DistortionOutOfRange {
                        path: entry,
                        value: e.to_string(),
                        rho_max: rho_max.to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Checks every invariant of a parsed model file and builds the exact
/// model. Errors name the offending index path.
pub fn validate_model(raw: RawModel) -> Result<SystemModel<Exact>> {
    let ra = &raw.alphabets;
    let alphabets = Alphabets {
        u: ra.u,
        v: ra.v,
        x: ra.x,
        y: ra.y,
        z: ra.z,
        u_hat: ra.u_hat.unwrap_or(ra.u),
        v_hat: ra.v_hat.unwrap_or(ra.v),
    };
    for (name, size) in [
        ("u", alphabets.u),
        ("v", alphabets.v),
        ("x", alphabets.x),
        ("y", alphabets.y),
        ("z", alphabets.z),
        ("u_hat", alphabets.u_hat),
        ("v_hat", alphabets.v_hat),
    ] {
        if size == 0 {
            return Err(Error::EmptyAlphabet(name));
        }
    }
    if raw.horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let pairs = alphabets.pairs();
    check_dist("source.initial", &raw.source.initial, pairs)?;
    check_kernel("source.transition", "s", &raw.source.transition, pairs, pairs)?;
    check_kernel("channel.inner", "x", &raw.channel.inner, alphabets.x, alphabets.y)?;
    check_kernel("channel.outer", "y", &raw.channel.outer, alphabets.y, alphabets.z)?;

    let d = &raw.distortion;
    if d.rho_max.is_negative() {
        return Err(Error::NegativeEntry { path: "distortion.rho_max".into(), value: d.rho_max.to_string() });
    }
    check_distortion(
        "distortion.rho1",
        &d.rho1,
        raw.horizon,
        ("u", "u_hat"),
        (alphabets.u, alphabets.u_hat),
        &d.rho_max,
    )?;
    check_distortion(
        "distortion.rho2",
        &d.rho2,
        raw.horizon,
        ("v", "v_hat"),
        (alphabets.v, alphabets.v_hat),
        &d.rho_max,
    )?;

    Ok(SystemModel {
        alphabets,
        horizon: raw.horizon,
        source: MarkovSource { initial: raw.source.initial, transition: raw.source.transition },
        channel: DegradedChannel { inner: raw.channel.inner, outer: raw.channel.outer },
        distortion: DistortionSchedule { rho1: raw.distortion.rho1, rho2: raw.distortion.rho2, rho_max: raw.distortion.rho_max },
    })
}
