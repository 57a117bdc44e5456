//! Normal-ordered ladder-operator algebra.
//!
//! A word `(c, p, q)` stands for `c · Π_j (a_j†)^{p_j} · Π_j a_j^{q_j}`.
//! Products are brought back to normal order with the closed per-mode rule
//!
//! ```text
//! a^q (a†)^p = Σ_k  C(q,k) C(p,k) k!  (a†)^{p−k} a^{q−k}
//! ```
//!
//! so every coefficient that appears is an integer multiple of a product of
//! input coefficients. With an exact coefficient type identities hold with an
//! empty residual.

mod fock;
mod json;
pub mod lemmas;

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::Result;
use crate::poly::{Chart, MultiIndex, PolyExpr};
use crate::scalar::{binomial, factorial, Coefficient};

pub use fock::{FockMatrix, FockSpace, FockVector, DEFAULT_DIM_CAP};
pub use json::{FockMatrixJson, WordJson};

/// One term `coeff · (a†)^create · a^annih`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorWord<C> {
    pub coeff: C,
    pub create: MultiIndex,
    pub annih: MultiIndex,
}

/// Canonical sum of normal-ordered words, keyed by `(create, annih)`.
#[derive(Clone, PartialEq)]
pub struct NormalFormOperator<C> {
    modes: usize,
    words: BTreeMap<(MultiIndex, MultiIndex), C>,
}

/// Result of [`NormalFormOperator::hermitian_pairing`]: `partner[i]` is the
/// index (in [`NormalFormOperator::words`] order) of the conjugate partner of
/// word `i`. Self-conjugate words are their own partner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianPairing {
    pub partner: Vec<usize>,
}

impl<C: Coefficient> NormalFormOperator<C> {
    pub fn zero(modes: usize) -> Self {
        NormalFormOperator {
            modes,
            words: BTreeMap::new(),
        }
    }

    pub fn scalar(modes: usize, c: C) -> Self {
        Self::word(modes, c, MultiIndex::zeros(modes), MultiIndex::zeros(modes))
    }

    pub fn identity(modes: usize) -> Self {
        Self::scalar(modes, C::one())
    }

    pub fn word(modes: usize, c: C, create: MultiIndex, annih: MultiIndex) -> Self {
        let mut op = Self::zero(modes);
        op.accumulate(create, annih, c);
        op
    }

    /// `a_j`, 0-based mode.
    pub fn annihilator(modes: usize, j: usize) -> Self {
        Self::word(modes, C::one(), MultiIndex::zeros(modes), MultiIndex::unit(modes, j))
    }

    /// `a_j†`, 0-based mode.
    pub fn creator(modes: usize, j: usize) -> Self {
        Self::word(modes, C::one(), MultiIndex::unit(modes, j), MultiIndex::zeros(modes))
    }

    pub fn from_words(modes: usize, words: impl IntoIterator<Item = OperatorWord<C>>) -> Self {
        let mut op = Self::zero(modes);
        for w in words {
            assert!(
                w.create.len() == modes && w.annih.len() == modes,
                "word length must equal the mode count"
            );
            op.accumulate(w.create, w.annih, w.coeff);
        }
        op
    }

    fn accumulate(&mut self, create: MultiIndex, annih: MultiIndex, c: C) {
        use std::collections::btree_map::Entry;
        match self.words.entry((create, annih)) {
            Entry::Vacant(e) => {
                if !c.is_negligible() {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_negligible() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words in canonical order.
    pub fn words(&self) -> impl Iterator<Item = OperatorWord<C>> + '_ {
        self.words.iter().map(|((p, q), c)| OperatorWord {
            coeff: c.clone(),
            create: p.clone(),
            annih: q.clone(),
        })
    }

    pub fn coeff(&self, create: &MultiIndex, annih: &MultiIndex) -> C {
        self.words
            .get(&(create.clone(), annih.clone()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> NormalFormOperator<D> {
        let mut out = NormalFormOperator::zero(self.modes);
        for ((p, q), c) in &self.words {
            out.accumulate(p.clone(), q.clone(), f(c));
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map_coeffs(|x| x.clone() * c.clone())
    }

    pub fn embed(&self, modes: usize) -> Self {
        assert!(modes >= self.modes, "cannot embed into fewer modes");
        if modes == self.modes {
            return self.clone();
        }
        let mut out = Self::zero(modes);
        for ((p, q), c) in &self.words {
            out.accumulate(p.embed_blocks(1, modes), q.embed_blocks(1, modes), c.clone());
        }
        out
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let m = self.modes.max(other.modes);
        (self.embed(m), other.embed(m))
    }

    /// Hermitian adjoint: `(c, p, q) ↦ (c̄, q, p)`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.modes);
        for ((p, q), c) in &self.words {
            out.accumulate(q.clone(), p.clone(), c.conj());
        }
        out
    }

    /// True operator product, rewritten in normal order.
    pub fn normal_order_product(&self, other: &Self) -> Self {
        let (u, v) = self.aligned(other);
        let n = u.modes;
        let mut out = Self::zero(n);
        for ((p1, q1), c1) in &u.words {
            for ((p2, q2), c2) in &v.words {
                let c = c1.clone() * c2.clone();
                // Per mode j the contraction count k_j runs over 0..=min(q1_j, p2_j).
                let limits: Vec<u32> = (0..n).map(|j| q1.get(j).min(p2.get(j))).collect();
                let mut k = vec![0u32; n];
                loop {
                    let mut weight = 1i64;
                    let mut create = MultiIndex::zeros(n);
                    let mut annih = MultiIndex::zeros(n);
                    for j in 0..n {
                        let (a, b, kj) = (q1.get(j), p2.get(j), k[j]);
                        weight *= binomial(a, kj) * binomial(b, kj) * factorial(kj);
                        create.set(j, p1.get(j) + b - kj);
                        annih.set(j, a - kj + q2.get(j));
                    }
                    out.accumulate(create, annih, c.scale_int(weight));

                    let mut j = 0;
                    while j < n && k[j] == limits[j] {
                        k[j] = 0;
                        j += 1;
                    }
                    if j == n {
                        break;
                    }
                    k[j] += 1;
                }
            }
        }
        out
    }

    /// `[A, B] = AB − BA` in normal order.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.normal_order_product(other) - &other.normal_order_product(self)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.modes);
        for _ in 0..e {
            acc = acc.normal_order_product(self);
        }
        acc
    }

    /// `ad_X^k(H) = [X, [X, … [X, H]]]`.
    pub fn nested_commutator(x: &Self, h: &Self, k: u32) -> Self {
        let mut acc = h.clone();
        for _ in 0..k {
            acc = x.commutator(&acc);
        }
        acc
    }

    /// Maximal creation and annihilation exponent of mode `j` over all words.
    pub fn nested_commutator_order(&self, j: usize) -> (u32, u32) {
        self.words.keys().fold((0, 0), |(mc, ma), (p, q)| {
            (mc.max(p.get(j)), ma.max(q.get(j)))
        })
    }

    /// Largest total creation degree and total annihilation degree of any word.
    pub fn total_orders(&self) -> (u32, u32) {
        self.words.keys().fold((0, 0), |(mc, ma), (p, q)| {
            (mc.max(p.degree()), ma.max(q.degree()))
        })
    }

    /// Whether four-fold nested commutators with `a_j` and `a_j†` vanish for
    /// every mode, i.e. each per-mode exponent is at most 3.
    pub fn limited_order(&self) -> bool {
        (0..self.modes).all(|j| {
            let (c, a) = self.nested_commutator_order(j);
            c <= 3 && a <= 3
        })
    }

    /// Normal-ordered symbol: word `(p, q)` becomes `y^p z^q`.
    pub fn to_zy_poly(&self) -> PolyExpr<C> {
        let n = self.modes;
        PolyExpr::from_terms(
            Chart::Zy,
            n,
            self.words.iter().map(|((p, q), c)| {
                let mut k = MultiIndex::zeros(2 * n);
                for j in 0..n {
                    k.set(j, q.get(j));
                    k.set(n + j, p.get(j));
                }
                (k, c.clone())
            }),
        )
    }

    /// Normal product of a `(z, y)` polynomial: `z^n y^m ↦ (a†)^m a^n`.
    pub fn from_zy_poly(p: &PolyExpr<C>) -> Result<Self> {
        p.require_zy()?;
        let n = p.modes();
        let mut out = Self::zero(n);
        for (k, c) in p.terms() {
            let s = k.as_slice();
            out.accumulate(
                MultiIndex::from_vec(s[n..].to_vec()),
                MultiIndex::from_vec(s[..n].to_vec()),
                c.clone(),
            );
        }
        Ok(out)
    }
}

impl NormalFormOperator<Complex64> {
    /// Normal-form operator of a polynomial in either chart.
    pub fn from_poly(p: &PolyExpr<Complex64>) -> Result<Self> {
        match p.chart() {
            Chart::Zy => Self::from_zy_poly(p),
            Chart::PhiPi => Self::from_zy_poly(&p.to_zy()?),
        }
    }

    /// Pairs every word with its conjugate partner, or `None` if some word
    /// has no partner with conjugate coefficient.
    pub fn hermitian_pairing(&self) -> Option<HermitianPairing> {
        let keys: Vec<&(MultiIndex, MultiIndex)> = self.words.keys().collect();
        let mut partner = Vec::with_capacity(keys.len());
        for (i, (p, q)) in keys.iter().map(|k| (&k.0, &k.1)).enumerate() {
            let c = &self.words[keys[i]];
            let mirror = (q.clone(), p.clone());
            let partner_c = self.words.get(&mirror)?;
            if !partner_c.approx_eq(&c.conj()) {
                return None;
            }
            partner.push(keys.binary_search(&&mirror).expect("key present"));
        }
        Some(HermitianPairing { partner })
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_pairing().is_some()
    }

    /// Coefficient-wise comparison within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let diff = self - other;
        diff.words.values().all(|c| c.norm() <= tol)
    }

    /// Largest coefficient magnitude; zero for the zero operator.
    pub fn max_coeff(&self) -> f64 {
        self.words.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Normal-form operator of a `(φ, π)` or `(z, y)` polynomial.
pub fn poly_to_normal_form(p: &PolyExpr<Complex64>) -> Result<NormalFormOperator<Complex64>> {
    NormalFormOperator::from_poly(p)
}

impl<C: Coefficient> PolyExpr<C> {
    fn require_zy(&self) -> Result<()> {
        if self.chart() != Chart::Zy {
            return Err(crate::Error::ChartMismatch {
                expected: Chart::Zy.name(),
                found: self.chart().name(),
            });
        }
        Ok(())
    }
}

impl<C: Coefficient> std::ops::Add for &NormalFormOperator<C> {
    type Output = NormalFormOperator<C>;

    fn add(self, rhs: &NormalFormOperator<C>) -> NormalFormOperator<C> {
        let (mut a, b) = self.aligned(rhs);
        for ((p, q), c) in b.words {
            a.accumulate(p, q, c);
        }
        a
    }
}

impl<C: Coefficient> std::ops::Sub for &NormalFormOperator<C> {
    type Output = NormalFormOperator<C>;

    fn sub(self, rhs: &NormalFormOperator<C>) -> NormalFormOperator<C> {
        let (mut a, b) = self.aligned(rhs);
        for ((p, q), c) in b.words {
            a.accumulate(p, q, -c);
        }
        a
    }
}

impl<C: Coefficient> std::ops::Mul for &NormalFormOperator<C> {
    type Output = NormalFormOperator<C>;

    fn mul(self, rhs: &NormalFormOperator<C>) -> NormalFormOperator<C> {
        self.normal_order_product(rhs)
    }
}

impl<C: Coefficient> std::ops::Neg for &NormalFormOperator<C> {
    type Output = NormalFormOperator<C>;

    fn neg(self) -> NormalFormOperator<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

impl<C: Coefficient> std::fmt::Debug for NormalFormOperator<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.words.is_empty() {
            return write!(f, "0");
        }
        for (i, ((p, q), c)) in self.words.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let c = c.to_complex64();
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for (j, &e) in p.as_slice().iter().enumerate() {
                if e > 0 {
                    write!(f, " a{}+^{e}", j + 1)?;
                }
            }
            for (j, &e) in q.as_slice().iter().enumerate() {
                if e > 0 {
                    write!(f, " a{}^{e}", j + 1)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Bindings};
    use crate::{ExactComplex, ExactNormalForm, NormalForm};

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::from(v.to_vec())
    }

    fn nf(text: &str) -> NormalForm {
        poly_to_normal_form(&parse_poly(text, &Bindings::new()).unwrap()).unwrap()
    }

    #[test]
    fn canonical_commutation() {
        let a = NormalForm::annihilator(1, 0);
        let ad = NormalForm::creator(1, 0);
        let prod = a.normal_order_product(&ad);
        assert_eq!(prod.coeff(&mi(&[1]), &mi(&[1])), cx(1.0, 0.0));
        assert_eq!(prod.coeff(&mi(&[0]), &mi(&[0])), cx(1.0, 0.0));
        assert_eq!(prod.len(), 2);
        assert_eq!(ad.normal_order_product(&a), NormalForm::word(1, cx(1.0, 0.0), mi(&[1]), mi(&[1])));
        assert_eq!(a.commutator(&ad), NormalForm::identity(1));
        let n = ad.normal_order_product(&a);
        assert_eq!(a.commutator(&n), a);
    }

    #[test]
    fn squared_product_exact() {
        let a = ExactNormalForm::annihilator(1, 0);
        let ad = ExactNormalForm::creator(1, 0);
        let prod = a.pow(2).normal_order_product(&ad.pow(2));
        let int = |n: i64| ExactComplex::from_int(n);
        let expected = ExactNormalForm::from_words(
            1,
            [
                OperatorWord { coeff: int(1), create: mi(&[2]), annih: mi(&[2]) },
                OperatorWord { coeff: int(4), create: mi(&[1]), annih: mi(&[1]) },
                OperatorWord { coeff: int(2), create: mi(&[0]), annih: mi(&[0]) },
            ],
        );
        assert_eq!(prod, expected);
    }

    #[test]
    fn poly_images() {
        let phi = nf("phi1");
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(phi.approx_eq(
            &(&NormalForm::annihilator(1, 0) + &NormalForm::creator(1, 0)).scale(&cx(s, 0.0)),
            1e-15
        ));
        assert!(nf("0.5*phi1^2 + 0.5*pi1^2").approx_eq(
            &NormalForm::word(1, cx(1.0, 0.0), mi(&[1]), mi(&[1])),
            1e-15
        ));
        let phipi = nf("phi1*pi1");
        let expected = &NormalForm::word(1, cx(0.0, 0.5), mi(&[2]), mi(&[0]))
            - &NormalForm::word(1, cx(0.0, 0.5), mi(&[0]), mi(&[2]));
        assert!(phipi.approx_eq(&expected, 1e-15), "{phipi:?}");
    }

    #[test]
    fn hermitian_pairing_examples() {
        let n = NormalForm::word(1, cx(1.0, 0.0), mi(&[1]), mi(&[1]));
        assert_eq!(n.hermitian_pairing().unwrap().partner, vec![0]);
        let a2 = NormalForm::word(1, cx(1.0, 0.0), mi(&[0]), mi(&[2]));
        assert!(a2.hermitian_pairing().is_none());
        let both = &a2 + &a2.adjoint();
        assert_eq!(both.hermitian_pairing().unwrap().partner, vec![1, 0]);
        // i a² − i a†² is Hermitian, i(a² + a†²) is not.
        let skew = &a2.scale(&cx(0.0, 1.0)) + &a2.adjoint().scale(&cx(0.0, 1.0));
        assert!(!skew.is_hermitian());
        assert!(nf("phi1*pi1 + 3*phi1^3*pi2").is_hermitian());
    }

    #[test]
    fn commutator_with_field_matches_derivative() {
        // [Φ, H_n] = i (∂H/∂π)_n for H = ½(φ² + π²).
        let h = parse_poly("0.5*phi1^2 + 0.5*pi1^2", &Bindings::new()).unwrap();
        let phi = nf("phi1");
        let lhs = phi.commutator(&poly_to_normal_form(&h).unwrap());
        let dh = h.differentiate(crate::poly::Var::Pi(0)).unwrap().scale(&cx(0.0, 1.0));
        assert!(lhs.approx_eq(&poly_to_normal_form(&dh).unwrap(), 1e-15));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = (&NormalForm::annihilator(1, 0) - &NormalForm::creator(1, 0)).scale(&cx(s, 0.0));
        assert!(lhs.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn nested_order_gate() {
        let n = NormalForm::word(1, cx(1.0, 0.0), mi(&[1]), mi(&[1]));
        assert_eq!(n.nested_commutator_order(0), (1, 1));
        assert!(n.limited_order());
        let c4 = NormalForm::word(1, cx(1.0, 0.0), mi(&[4]), mi(&[0]));
        assert_eq!(c4.nested_commutator_order(0), (4, 0));
        assert!(!c4.limited_order());
        let osc = nf("0.5*pi1^2 + 0.5*2*phi1^2");
        assert_eq!(osc.nested_commutator_order(0), (2, 2));
        assert!(osc.limited_order());
    }

    #[test]
    fn symbol_round_trip() {
        let op = nf("phi1^3*pi2 - 2*pi1*pi2^2 + 4");
        let back = NormalForm::from_zy_poly(&op.to_zy_poly()).unwrap();
        assert_eq!(back, op);
    }
}
