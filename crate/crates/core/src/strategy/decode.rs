use crate::prob::Prob;

/// Reconstruction minimizing `Σ_w ρ(w, ŵ) θ(w)`, lowest index on ties.
/// `theta` may be unnormalized; scaling does not move the argmin.
pub fn map_decode<S: Prob>(theta: &[S], rho: &[Vec<S>]) -> usize {
    let n_hat = rho.first().map_or(1, Vec::len);
    let mut best = 0;
    let mut best_cost: Option<S> = None;
    for w_hat in 0..n_hat {
        let mut cost = S::zero();
        for (w, p) in theta.iter().enumerate() {
            if !p.is_zero() {
                cost += S::product(&rho[w][w_hat], p);
            }
        }
        if best_cost.as_ref().is_none_or(|b| cost < *b) {
            best = w_hat;
            best_cost = Some(cost);
        }
    }
    best
}

/// Inner decoder rule on a belief over `U`.
pub fn map_decode_u<S: Prob>(theta: &[S], rho1_t: &[Vec<S>]) -> usize {
    map_decode(theta, rho1_t)
}

/// Outer decoder rule on a belief over `V`.
pub fn map_decode_v<S: Prob>(theta: &[S], rho2_t: &[Vec<S>]) -> usize {
    map_decode(theta, rho2_t)
}

/// `min_ŵ Σ_w ρ(w, ŵ) θ(w)` for unnormalized `theta`.
pub(crate) fn min_expected<S: Prob>(theta: &[S], rho: &[Vec<S>]) -> S {
    let w_hat = map_decode(theta, rho);
    let mut cost = S::zero();
    for (w, p) in theta.iter().enumerate() {
        if !p.is_zero() {
            cost += S::product(&rho[w][w_hat], p);
        }
    }
    cost
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Exact;
    use proptest::prelude::*;

    fn hamming(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect()
    }

    #[test]
    fn hamming_picks_the_mode() {
        assert_eq!(map_decode_u(&[0.7, 0.3], &hamming(2)), 0);
        assert_eq!(map_decode_v(&[0.2, 0.5, 0.3], &hamming(3)), 1);
    }

    #[test]
    fn point_mass_is_recovered() {
        for u in 0..3 {
            let mut theta = vec![Exact::new(0, 1); 3];
            theta[u] = Exact::new(1, 1);
            let rho: Vec<Vec<Exact>> = hamming(3)
                .iter()
                .map(|r| r.iter().map(|&x| Exact::from_integer(x as i64)).collect())
                .collect();
            assert_eq!(map_decode_u(&theta, &rho), u);
        }
    }

    #[test]
    fn ties_go_to_the_lowest_index() {
        assert_eq!(map_decode(&[0.5, 0.5], &hamming(2)), 0);
        let flat = vec![vec![1.0, 1.0, 1.0]; 2];
        assert_eq!(map_decode(&[0.3, 0.7], &flat), 0);
    }

    proptest! {
        #[test]
        fn matches_exhaustive_search(
            theta in proptest::collection::vec(0i64..20, 3),
            rho in proptest::collection::vec(proptest::collection::vec(0i64..10, 3), 3),
        ) {
            let theta: Vec<Exact> = theta.into_iter().map(Exact::from_integer).collect();
            let rho: Vec<Vec<Exact>> =
                rho.into_iter().map(|r| r.into_iter().map(Exact::from_integer).collect()).collect();
            let expected = |w_hat: usize| -> Exact { (0..3).map(|w| &rho[w][w_hat] * &theta[w]).sum() };
            let costs: Vec<Exact> = (0..3).map(expected).collect();
            let min = costs.iter().min().unwrap();
            let first = costs.iter().position(|c| c == min).unwrap();
            prop_assert_eq!(map_decode(&theta, &rho), first);
            prop_assert_eq!(&min_expected(&theta, &rho), min);
        }
    }
}
