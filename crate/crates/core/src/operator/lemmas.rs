//! Expansions of commutators with powers of ladder operators.
//!
//! Each function returns `lhs − rhs` for one identity, computed in normal
//! form. With exact coefficients a correct identity gives the zero operator.
//! The right-hand sides keep nested commutators up to third order, which is
//! complete when the nested commutators of fourth order vanish.

use super::NormalFormOperator;
use crate::scalar::{binomial, Coefficient};

type Op<C> = NormalFormOperator<C>;

fn int<C: Coefficient>(modes: usize, n: i64) -> Op<C> {
    Op::scalar(modes, C::from_int(n))
}

/// `[a^n, H] − Σ_{k=1}^{3} C(n,k) ad_a^k(H) a^{n−k}` for mode `j`.
pub fn annihilator_power<C: Coefficient>(h: &Op<C>, j: usize, n: u32) -> Op<C> {
    let m = h.modes();
    let a = Op::annihilator(m, j);
    let lhs = a.pow(n).commutator(h);
    let mut rhs = Op::zero(m);
    for k in 1..=n.min(3) {
        let term = &Op::nested_commutator(&a, h, k) * &a.pow(n - k);
        rhs = &rhs + &(&int(m, binomial(n, k)) * &term);
    }
    &lhs - &rhs
}

/// `[(a†)^m, H] − Σ_{k=1}^{3} (−1)^{k+1} C(m,k) (a†)^{m−k} ad_{a†}^k(H)`.
pub fn creator_power<C: Coefficient>(h: &Op<C>, j: usize, m: u32) -> Op<C> {
    let modes = h.modes();
    let ad = Op::creator(modes, j);
    let lhs = ad.pow(m).commutator(h);
    let mut rhs = Op::zero(modes);
    for k in 1..=m.min(3) {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let term = &ad.pow(m - k) * &Op::nested_commutator(&ad, h, k);
        rhs = &rhs + &(&int(modes, sign * binomial(m, k)) * &term);
    }
    &lhs - &rhs
}

/// `[(a†)^m a^n, H] − ( (a†)^m · RHS_annih + RHS_creator · a^n )`, the
/// expansion obtained from the two power lemmas.
pub fn word_commutator<C: Coefficient>(h: &Op<C>, j: usize, m: u32, n: u32) -> Op<C> {
    let modes = h.modes();
    let a = Op::annihilator(modes, j);
    let ad = Op::creator(modes, j);
    let lhs = (&ad.pow(m) * &a.pow(n)).commutator(h);
    let mut rhs = Op::zero(modes);
    for k in 1..=n.min(3) {
        let term = &(&ad.pow(m) * &Op::nested_commutator(&a, h, k)) * &a.pow(n - k);
        rhs = &rhs + &(&int(modes, binomial(n, k)) * &term);
    }
    for k in 1..=m.min(3) {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let term = &(&ad.pow(m - k) * &Op::nested_commutator(&ad, h, k)) * &a.pow(n);
        rhs = &rhs + &(&int(modes, sign * binomial(m, k)) * &term);
    }
    &lhs - &rhs
}

/// `[a^n b^m, H] − ([a^n, H] b^m + [b^m, H] a^n + [a^n, [b^m, H]])` with
/// `a = a_i`, `b = a_j`, `i ≠ j`.
pub fn two_mode_split<C: Coefficient>(h: &Op<C>, i: usize, j: usize, n: u32, m: u32) -> Op<C> {
    let modes = h.modes();
    let an = Op::annihilator(modes, i).pow(n);
    let bm = Op::annihilator(modes, j).pow(m);
    let lhs = (&an * &bm).commutator(h);
    let rhs = &(&(&an.commutator(h) * &bm) + &(&bm.commutator(h) * &an))
        + &an.commutator(&bm.commutator(h));
    &lhs - &rhs
}

/// `[a^n, [b^m, H]] − ( nm ad_a ad_b H a^{n−1} b^{m−1}
///   + C(n,2) m ad_a² ad_b H a^{n−2} b^{m−1} + n C(m,2) ad_a ad_b² H a^{n−1} b^{m−2} )`.
///
/// Complete when every word of `H` has total creation degree at most 3 in
/// the two modes.
pub fn two_mode_cross<C: Coefficient>(h: &Op<C>, i: usize, j: usize, n: u32, m: u32) -> Op<C> {
    let modes = h.modes();
    let a = Op::annihilator(modes, i);
    let b = Op::annihilator(modes, j);
    let lhs = a.pow(n).commutator(&b.pow(m).commutator(h));
    let mut rhs = Op::zero(modes);
    for (k, l) in [(1u32, 1u32), (2, 1), (1, 2)] {
        let c = binomial(n, k) * binomial(m, l);
        if c == 0 {
            continue;
        }
        let inner = Op::nested_commutator(&a, &Op::nested_commutator(&b, h, l), k);
        let term = &(&inner * &a.pow(n - k)) * &b.pow(m - l);
        rhs = &rhs + &(&int(modes, c) * &term);
    }
    &lhs - &rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiIndex;
    use crate::{ExactComplex, ExactNormalForm};

    fn word(modes: usize, c: i64, p: &[u32], q: &[u32]) -> ExactNormalForm {
        debug_assert_eq!(p.len(), modes);
        ExactNormalForm::word(
            modes,
            ExactComplex::from_int(c),
            MultiIndex::from(p.to_vec()),
            MultiIndex::from(q.to_vec()),
        )
    }

    #[test]
    fn single_mode_lemmas_on_cubic() {
        let h = &(&word(1, 2, &[3], &[1]) + &word(1, 2, &[1], &[3])) + &word(1, -5, &[2], &[2]);
        for n in 1..=5 {
            assert!(annihilator_power(&h, 0, n).is_zero(), "n = {n}");
            assert!(creator_power(&h, 0, n).is_zero(), "m = {n}");
            assert!(word_commutator(&h, 0, n, 6 - n).is_zero());
        }
    }

    #[test]
    fn truncated_expansion_fails_beyond_cubic() {
        let h = word(1, 1, &[4], &[0]);
        assert!(!annihilator_power(&h, 0, 4).is_zero());
    }

    #[test]
    fn two_mode_lemmas() {
        let h = &(&word(2, 1, &[1, 1], &[0, 1]) + &word(2, 3, &[0, 2], &[2, 0])) + &word(2, -2, &[2, 1], &[1, 1]);
        for n in 1..=4 {
            for m in 1..=4 {
                assert!(two_mode_split(&h, 0, 1, n, m).is_zero());
                assert!(two_mode_cross(&h, 0, 1, n, m).is_zero(), "n = {n}, m = {m}");
            }
        }
    }
}
