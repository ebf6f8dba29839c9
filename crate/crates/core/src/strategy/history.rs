//! Mixed-radix indices of observation histories, shared by every table-based
//! strategy. Histories are folded oldest symbol first.

use crate::model::Alphabets;

/// Number of shared histories `(y^{t-1}, z^{t-1})` seen at stage `t`.
pub fn shared_count(a: &Alphabets, t: usize) -> usize {
    a.outputs().pow((t - 1) as u32)
}

/// Extends a shared-history index by one stage's outputs.
pub fn push_shared(a: &Alphabets, h: usize, y: usize, z: usize) -> usize {
    h * a.outputs() + y * a.z + z
}

/// Index of the inner decoder's information `(y^t, z^{t-1})`.
pub fn inner_index(a: &Alphabets, h: usize, y: usize) -> usize {
    h * a.y + y
}

pub fn inner_count(a: &Alphabets, t: usize) -> usize {
    shared_count(a, t) * a.y
}

pub fn push_outer(a: &Alphabets, zh: usize, z: usize) -> usize {
    zh * a.z + z
}

/// Number of outer-decoder histories `z^t`.
pub fn outer_count(a: &Alphabets, t: usize) -> usize {
    a.z.pow(t as u32)
}

/// Radix of one completed stage in a full encoder history.
pub fn full_radix(a: &Alphabets) -> usize {
    a.pairs() * a.x * a.outputs()
}

/// Extends a full history `(u^{t-1}, v^{t-1}, x^{t-1}, y^{t-1}, z^{t-1})`.
pub fn push_full(a: &Alphabets, f: usize, s: usize, x: usize, y: usize, z: usize) -> usize {
    f * full_radix(a) + ((s * a.x + x) * a.y + y) * a.z + z
}

/// Number of general-encoder inputs at stage `t`.
pub fn full_count(a: &Alphabets, t: usize) -> usize {
    full_radix(a).pow((t - 1) as u32) * a.pairs()
}

/// Decodes a shared-history index back into `(y, z)` pairs.
pub fn unfold_shared(a: &Alphabets, mut h: usize, len: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0); len];
    for slot in out.iter_mut().rev() {
        let yz = h % a.outputs();
        h /= a.outputs();
        *slot = (yz / a.z, yz % a.z);
    }
    out
}

/// Outer-history index of the `z` part of a shared history.
pub fn z_part(a: &Alphabets, h: usize, len: usize) -> usize {
    unfold_shared(a, h, len).into_iter().fold(0, |zh, (_, z)| push_outer(a, zh, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_index_round_trips() {
        let a = Alphabets { u: 2, v: 3, x: 2, y: 3, z: 2, u_hat: 2, v_hat: 3 };
        let hist = [(2, 1), (0, 1), (1, 0)];
        let h = hist.iter().fold(0, |h, &(y, z)| push_shared(&a, h, y, z));
        assert!(h < shared_count(&a, 4));
        assert_eq!(unfold_shared(&a, h, 3), hist.to_vec());
        assert_eq!(z_part(&a, h, 3), (1 * 2 + 1) * 2);
    }
}
