//! The canned "fixed message" scenario: a uniformly drawn source pair that
//! never changes, no distortion before the last stage and Hamming distortion
//! at the last stage, so the total cost is `Pr(U ≠ Û_T) + Pr(V ≠ V̂_T)`.

use num_traits::{One, Zero};

use super::{Alphabets, DegradedChannel, DistortionSchedule, MarkovSource, SystemModel};
use crate::error::{Error, Result};
use crate::exact::Exact;

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioChannel {
    /// `Y = X` and `Z = Y`.
    Noiseless,
    /// q-ary symmetric channels on the input alphabet: a symbol survives
    /// with probability `1 - p` and is otherwise replaced uniformly.
    Symmetric { inner: Exact, outer: Exact },
}

fn identity(n: usize) -> Vec<Vec<Exact>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Exact::one() } else { Exact::zero() }).collect())
        .collect()
}

fn symmetric(n: usize, p: &Exact) -> Vec<Vec<Exact>> {
    if n == 1 {
        return identity(1);
    }
    let stay = Exact::one() - p.clone();
    let flip = p / &Exact::from_integer(n as i64 - 1);
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { stay.clone() } else { flip.clone() }).collect())
        .collect()
}

fn hamming(n: usize) -> Vec<Vec<Exact>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Exact::zero() } else { Exact::one() }).collect())
        .collect()
}

/// Builds the fixed-message scenario. The channel input, inner output and
/// outer output all use an alphabet of `x` symbols.
pub fn build_special_case(
    u: usize,
    v: usize,
    x: usize,
    horizon: usize,
    channel: ScenarioChannel,
) -> Result<SystemModel<Exact>> {
    let alphabets = Alphabets { u, v, x, y: x, z: x, u_hat: u, v_hat: v };
    let pairs = alphabets.pairs();
    if pairs == 0 {
        return Err(Error::EmptyAlphabet(if u == 0 { "u" } else { "v" }));
    }
    let (inner, outer) = match &channel {
        ScenarioChannel::Noiseless => (identity(x), identity(x)),
        ScenarioChannel::Symmetric { inner, outer } => (symmetric(x, inner), symmetric(x, outer)),
    };
    let stage = |n: usize, t: usize| {
        if t + 1 == horizon {
            hamming(n)
        } else {
            vec![vec![Exact::zero(); n]; n]
        }
    };
    let model = SystemModel {
        alphabets,
        horizon,
        source: MarkovSource {
            initial: vec![Exact::new(1, pairs as i64); pairs],
            transition: identity(pairs),
        },
        channel: DegradedChannel { inner, outer },
        distortion: DistortionSchedule {
            rho1: (0..horizon).map(|t| stage(u, t)).collect(),
            rho2: (0..horizon).map(|t| stage(v, t)).collect(),
            rho_max: Exact::one(),
        },
    };
    // Round-trip through validation so p outside [0, 1] and horizon 0 are
    // reported like any other bad model.
    super::validate_model(model.to_raw())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_source_transition_is_identity() {
        let m = build_special_case(2, 2, 4, 3, ScenarioChannel::Noiseless).unwrap();
        assert_eq!(m.source.transition, identity(4));
        assert!(m.source.initial.iter().all(|p| *p == Exact::new(1, 4)));
    }

    #[test]
    fn distortion_vanishes_before_the_last_stage() {
        let m = build_special_case(3, 2, 2, 4, ScenarioChannel::Noiseless).unwrap();
        for t in 1..4 {
            assert!(m.rho1(t).iter().flatten().all(Zero::is_zero));
            assert!(m.rho2(t).iter().flatten().all(Zero::is_zero));
        }
        assert_eq!(m.rho1(4), hamming(3).as_slice());
        assert_eq!(m.rho2(4), hamming(2).as_slice());
    }

    #[test]
    fn symmetric_channel_rows_are_stochastic() {
        let m = build_special_case(
            2,
            2,
            3,
            1,
            ScenarioChannel::Symmetric { inner: Exact::new(1, 10), outer: Exact::new(1, 5) },
        )
        .unwrap();
        assert_eq!(m.channel.inner[0], vec![Exact::new(9, 10), Exact::new(1, 20), Exact::new(1, 20)]);
    }

    #[test]
    fn crossover_above_one_is_rejected() {
        let err = build_special_case(
            2,
            2,
            2,
            1,
            ScenarioChannel::Symmetric { inner: Exact::new(3, 2), outer: Exact::zero() },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NegativeEntry { .. }));
    }
}
