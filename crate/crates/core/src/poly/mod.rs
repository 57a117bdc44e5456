//! Commuting-variable polynomials over `(φ, π)` or `(z, y)`.
//!
//! A polynomial in `n` modes has `2n` variables laid out as
//! `[φ_1..φ_n, π_1..π_n]` or `[z_1..z_n, y_1..y_n]`. Terms are kept in a
//! `BTreeMap` keyed by [`MultiIndex`], so iteration order is canonical.

mod chart;
mod json;
mod multi_index;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Coefficient;

pub use chart::{d_dy_from_phipi, d_dz_from_phipi, phi_derivative_in_zy, pi_derivative_in_zy};
pub use json::PolyJson;
pub use multi_index::MultiIndex;
pub use parse::{parse_poly, parse_poly_with_modes, Bindings};

/// Which pair of coordinates a polynomial is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    /// Field and momentum `(φ, π)`.
    PhiPi,
    /// Complex amplitudes `z = (φ + iπ)/√2`, `y = (φ − iπ)/√2`.
    Zy,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::PhiPi => "phi_pi",
            Chart::Zy => "zy",
        }
    }
}

/// A single coordinate variable, 0-based mode index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Phi(usize),
    Pi(usize),
    Z(usize),
    Y(usize),
}

impl Var {
    pub fn chart(self) -> Chart {
        match self {
            Var::Phi(_) | Var::Pi(_) => Chart::PhiPi,
            Var::Z(_) | Var::Y(_) => Chart::Zy,
        }
    }

    pub fn mode(self) -> usize {
        match self {
            Var::Phi(j) | Var::Pi(j) | Var::Z(j) | Var::Y(j) => j,
        }
    }

    /// Slot of this variable in a multi-index over `modes` modes.
    pub fn slot(self, modes: usize) -> usize {
        match self {
            Var::Phi(j) | Var::Z(j) => j,
            Var::Pi(j) | Var::Y(j) => modes + j,
        }
    }

    fn label(self) -> String {
        match self {
            Var::Phi(j) => format!("phi{}", j + 1),
            Var::Pi(j) => format!("pi{}", j + 1),
            Var::Z(j) => format!("z{}", j + 1),
            Var::Y(j) => format!("y{}", j + 1),
        }
    }

    fn from_slot(chart: Chart, modes: usize, slot: usize) -> Var {
        match (chart, slot < modes) {
            (Chart::PhiPi, true) => Var::Phi(slot),
            (Chart::PhiPi, false) => Var::Pi(slot - modes),
            (Chart::Zy, true) => Var::Z(slot),
            (Chart::Zy, false) => Var::Y(slot - modes),
        }
    }
}

/// Polynomial with coefficients in `C` over the `2n` variables of a chart.
#[derive(Clone, PartialEq)]
pub struct PolyExpr<C> {
    chart: Chart,
    modes: usize,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: Coefficient> PolyExpr<C> {
    pub fn zero(chart: Chart, modes: usize) -> Self {
        PolyExpr {
            chart,
            modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: Chart, modes: usize, c: C) -> Self {
        Self::monomial(chart, modes, MultiIndex::zeros(2 * modes), c)
    }

    pub fn monomial(chart: Chart, modes: usize, exps: MultiIndex, c: C) -> Self {
        assert_eq!(exps.len(), 2 * modes, "multi-index length must be 2 * modes");
        let mut p = Self::zero(chart, modes);
        if !c.is_negligible() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn var(modes: usize, v: Var) -> Result<Self> {
        if v.mode() >= modes {
            return Err(Error::UnknownVariable(v.label()));
        }
        Ok(Self::monomial(
            v.chart(),
            modes,
            MultiIndex::unit(2 * modes, v.slot(modes)),
            C::one(),
        ))
    }

    /// Builds a canonical polynomial from possibly repeated terms.
    pub fn from_terms(
        chart: Chart,
        modes: usize,
        terms: impl IntoIterator<Item = (MultiIndex, C)>,
    ) -> Self {
        let mut p = Self::zero(chart, modes);
        for (k, c) in terms {
            assert_eq!(k.len(), 2 * modes, "multi-index length must be 2 * modes");
            p.accumulate(k, c);
        }
        p
    }

    fn accumulate(&mut self, k: MultiIndex, c: C) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
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

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &MultiIndex) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// Constant term, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                k.is_zero().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> PolyExpr<D> {
        PolyExpr::from_terms(
            self.chart,
            self.modes,
            self.terms.iter().map(|(k, c)| (k.clone(), f(c))),
        )
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map_coeffs(|x| x.clone() * c.clone())
    }

    /// Same polynomial viewed in a space of `modes ≥ self.modes()` modes.
    pub fn embed(&self, modes: usize) -> Self {
        assert!(modes >= self.modes, "cannot embed into fewer modes");
        if modes == self.modes {
            return self.clone();
        }
        PolyExpr::from_terms(
            self.chart,
            modes,
            self.terms
                .iter()
                .map(|(k, c)| (k.embed_blocks(2, 2 * modes), c.clone())),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.chart, self.modes, C::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        assert_eq!(
            self.chart, other.chart,
            "polynomial arithmetic across charts"
        );
        let m = self.modes.max(other.modes);
        (self.embed(m), other.embed(m))
    }

    /// Exact formal partial derivative with respect to `v`.
    pub fn differentiate(&self, v: Var) -> Result<Self> {
        if v.chart() != self.chart {
            return Err(Error::ChartMismatch {
                expected: self.chart.name(),
                found: v.chart().name(),
            });
        }
        if v.mode() >= self.modes {
            return Err(Error::UnknownVariable(v.label()));
        }
        let slot = v.slot(self.modes);
        Ok(self.partial_slot(slot, 1))
    }

    fn partial_slot(&self, slot: usize, order: u32) -> Self {
        let terms = self.terms.iter().filter_map(|(k, c)| {
            let e = k.get(slot);
            if e < order {
                return None;
            }
            let falling: i64 = (0..order).map(|i| (e - i) as i64).product();
            let mut k2 = k.clone();
            k2.set(slot, e - order);
            Some((k2, c.scale_int(falling)))
        });
        PolyExpr::from_terms(self.chart, self.modes, terms)
    }

    /// Iterated partial derivative `∂^|k| p / ∂x^k`, `k` laid out over the
    /// chart's `2n` slots.
    pub fn partial(&self, k: &MultiIndex) -> Self {
        assert_eq!(k.len(), 2 * self.modes, "multi-index length must be 2 * modes");
        let mut p = self.clone();
        for (slot, &order) in k.as_slice().iter().enumerate() {
            if order > 0 {
                p = p.partial_slot(slot, order);
            }
        }
        p
    }

    /// Evaluates at a point given in chart order (`2n` entries).
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != 2 * self.modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.modes,
                found: point.len(),
            });
        }
        let max_deg: Vec<u32> = (0..point.len())
            .map(|s| self.terms.keys().map(|k| k.get(s)).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<Complex64>> = point
            .iter()
            .zip(&max_deg)
            .map(|(&x, &d)| {
                let mut row = Vec::with_capacity(d as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                row.push(acc);
                for _ in 0..d {
                    acc *= x;
                    row.push(acc);
                }
                row
            })
            .collect();
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| {
                k.as_slice()
                    .iter()
                    .enumerate()
                    .fold(c.to_complex64(), |acc, (s, &e)| acc * powers[s][e as usize])
            })
            .sum())
    }

    /// Maximum degree of each variable slot.
    pub fn slot_degrees(&self) -> Vec<u32> {
        (0..2 * self.modes)
            .map(|s| self.terms.keys().map(|k| k.get(s)).max().unwrap_or(0))
            .collect()
    }
}

impl PolyExpr<Complex64> {
    /// True when every coefficient has negligible imaginary part.
    pub fn has_real_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.im.abs() <= crate::scalar::DROP_TOL)
    }

    /// Evaluates a `(φ, π)` polynomial at real coordinates.
    pub fn eval_real(&self, phi: &[f64], pi: &[f64]) -> Result<Complex64> {
        let point: Vec<Complex64> = phi
            .iter()
            .chain(pi)
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        self.eval(&point)
    }

    /// Coefficient-wise comparison within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.chart != other.chart {
            return false;
        }
        let (a, b) = self.aligned(other);
        let diff = &a - &b;
        diff.terms.values().all(|c| c.norm() <= tol)
    }
}

impl<C: Coefficient> Add for &PolyExpr<C> {
    type Output = PolyExpr<C>;

    fn add(self, rhs: &PolyExpr<C>) -> PolyExpr<C> {
        let (mut a, b) = self.aligned(rhs);
        for (k, c) in b.terms {
            a.accumulate(k, c);
        }
        a
    }
}

impl<C: Coefficient> Sub for &PolyExpr<C> {
    type Output = PolyExpr<C>;

    fn sub(self, rhs: &PolyExpr<C>) -> PolyExpr<C> {
        let (mut a, b) = self.aligned(rhs);
        for (k, c) in b.terms {
            a.accumulate(k, -c);
        }
        a
    }
}

impl<C: Coefficient> Mul for &PolyExpr<C> {
    type Output = PolyExpr<C>;

    fn mul(self, rhs: &PolyExpr<C>) -> PolyExpr<C> {
        let (a, b) = self.aligned(rhs);
        let mut out = PolyExpr::zero(a.chart, a.modes);
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                out.accumulate(ka + kb, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coefficient> Neg for &PolyExpr<C> {
    type Output = PolyExpr<C>;

    fn neg(self) -> PolyExpr<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl<C: Coefficient> $tr for PolyExpr<C> {
            type Output = PolyExpr<C>;

            fn $method(self, rhs: PolyExpr<C>) -> PolyExpr<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl<C: Coefficient> Neg for PolyExpr<C> {
    type Output = PolyExpr<C>;

    fn neg(self) -> PolyExpr<C> {
        -&self
    }
}

impl<C: Coefficient> fmt::Debug for PolyExpr<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyExpr[{}; {}]({})", self.chart.name(), self.modes, self)
    }
}

/// Prints canonical, parseable text for real `(φ, π)` polynomials. Complex
/// coefficients and `(z, y)` variables print for display only.
impl<C: Coefficient> fmt::Display for PolyExpr<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let c = c.to_complex64();
            let (sign, coeff) = if c.im == 0.0 {
                if c.re < 0.0 {
                    ("-", format!("{:?}", -c.re))
                } else {
                    ("+", format!("{:?}", c.re))
                }
            } else {
                ("+", format!("({:?}{:+?}i)", c.re, c.im))
            };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            write!(f, "{coeff}")?;
            for (slot, &e) in k.as_slice().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = Var::from_slot(self.chart, self.modes, slot).label();
                if e == 1 {
                    write!(f, "*{v}")?;
                } else {
                    write!(f, "*{v}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Poly;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn phi(j: usize, n: usize) -> Poly {
        Poly::var(n, Var::Phi(j)).unwrap()
    }

    fn pi(j: usize, n: usize) -> Poly {
        Poly::var(n, Var::Pi(j)).unwrap()
    }

    #[test]
    fn differentiate_examples() {
        let p = &phi(0, 1) * &pi(0, 1);
        assert_eq!(p.differentiate(Var::Phi(0)).unwrap(), pi(0, 1));

        let m = 3.0;
        let half_m_phi2 = phi(0, 1).pow(2).scale(&c(0.5 * m));
        assert_eq!(
            half_m_phi2.differentiate(Var::Phi(0)).unwrap(),
            phi(0, 1).scale(&c(m))
        );

        let k = Poly::constant(Chart::PhiPi, 1, c(7.0));
        assert!(k.differentiate(Var::Phi(0)).unwrap().is_zero());
    }

    #[test]
    fn differentiate_rejects_foreign_variables() {
        let p = phi(0, 1);
        assert!(matches!(
            p.differentiate(Var::Z(0)),
            Err(Error::ChartMismatch { .. })
        ));
        assert!(matches!(
            p.differentiate(Var::Phi(3)),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn eval_examples() {
        let p = &phi(0, 1) * &pi(0, 1);
        assert_eq!(p.eval_real(&[2.0], &[3.0]).unwrap(), c(6.0));
        let k = Poly::constant(Chart::PhiPi, 2, c(5.0));
        assert_eq!(k.eval_real(&[0.3, -1.0], &[9.0, 2.0]).unwrap(), c(5.0));
        assert!(matches!(
            p.eval(&[c(1.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = &phi(0, 1) - &phi(0, 1);
        assert!(p.is_zero());
        let q = &(&phi(0, 1) + &pi(0, 1)) * &(&phi(0, 1) - &pi(0, 1));
        assert_eq!(q.len(), 2);
    }

    #[test]
    fn arithmetic_embeds_mode_counts() {
        let p = &phi(0, 1) + &pi(1, 2);
        assert_eq!(p.modes(), 2);
        assert_eq!(p.eval_real(&[1.0, 0.0], &[0.0, 2.0]).unwrap(), c(3.0));
    }

    #[test]
    fn partial_is_iterated_derivative() {
        let p = phi(0, 1).pow(3);
        let k = MultiIndex::from(vec![2, 0]);
        assert_eq!(p.partial(&k), phi(0, 1).scale(&c(6.0)));
    }

    #[test]
    fn display_is_canonical() {
        let p = &phi(0, 1).pow(2).scale(&c(0.5)) - &pi(0, 1).scale(&c(2.0));
        assert_eq!(p.to_string(), "-2.0*pi1 + 0.5*phi1^2");
    }
}
