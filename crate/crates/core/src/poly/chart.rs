//! The linear change of coordinates `φ = (z + y)/√2`, `π = (z − y)/(i√2)`
//! and its inverse, plus the induced derivative operators.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{Chart, MultiIndex, PolyExpr, Var};
use crate::error::{Error, Result};
use crate::scalar::Coefficient;

impl<C: Coefficient> PolyExpr<C> {
    /// Substitutes each chart variable (slot order) by the given polynomial.
    pub fn substitute(&self, images: &[PolyExpr<C>], target: Chart) -> PolyExpr<C> {
        assert_eq!(images.len(), 2 * self.modes, "one image per variable");
        let modes = images.iter().map(PolyExpr::modes).max().unwrap_or(self.modes);
        let degrees = self.slot_degrees();
        let powers: Vec<Vec<PolyExpr<C>>> = images
            .iter()
            .zip(&degrees)
            .map(|(img, &d)| {
                let img = img.embed(modes);
                let mut row = vec![PolyExpr::constant(target, modes, C::one())];
                for i in 0..d as usize {
                    row.push(&row[i] * &img);
                }
                row
            })
            .collect();
        let mut out = PolyExpr::zero(target, modes);
        for (k, c) in &self.terms {
            let mut term = PolyExpr::constant(target, modes, c.clone());
            for (s, &e) in k.as_slice().iter().enumerate() {
                if e > 0 {
                    term = &term * &powers[s][e as usize];
                }
            }
            out = &out + &term;
        }
        out
    }
}

fn linear(chart: Chart, modes: usize, parts: &[(Var, Complex64)]) -> PolyExpr<Complex64> {
    PolyExpr::from_terms(
        chart,
        modes,
        parts
            .iter()
            .map(|&(v, c)| (MultiIndex::unit(2 * modes, v.slot(modes)), c)),
    )
}

impl PolyExpr<Complex64> {
    /// Rewrites a `(φ, π)` polynomial in `(z, y)`.
    pub fn to_zy(&self) -> Result<Self> {
        self.require_chart(Chart::PhiPi)?;
        let n = self.modes;
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let neg_i_s = Complex64::new(0.0, -FRAC_1_SQRT_2);
        let mut images = Vec::with_capacity(2 * n);
        for j in 0..n {
            images.push(linear(Chart::Zy, n, &[(Var::Z(j), s), (Var::Y(j), s)]));
        }
        for j in 0..n {
            // (z − y)/(i√2) = −i(z − y)/√2
            images.push(linear(
                Chart::Zy,
                n,
                &[(Var::Z(j), neg_i_s), (Var::Y(j), -neg_i_s)],
            ));
        }
        Ok(self.substitute(&images, Chart::Zy))
    }

    /// Rewrites a `(z, y)` polynomial in `(φ, π)`.
    pub fn to_phipi(&self) -> Result<Self> {
        self.require_chart(Chart::Zy)?;
        let n = self.modes;
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let i_s = Complex64::new(0.0, FRAC_1_SQRT_2);
        let mut images = Vec::with_capacity(2 * n);
        for j in 0..n {
            images.push(linear(Chart::PhiPi, n, &[(Var::Phi(j), s), (Var::Pi(j), i_s)]));
        }
        for j in 0..n {
            images.push(linear(Chart::PhiPi, n, &[(Var::Phi(j), s), (Var::Pi(j), -i_s)]));
        }
        Ok(self.substitute(&images, Chart::PhiPi))
    }

    /// Iterated `(z, y)` derivative. Polynomials in the `(φ, π)` chart are
    /// converted first.
    pub fn zy_partial(&self, k: &MultiIndex) -> Result<Self> {
        let p = match self.chart {
            Chart::Zy => self.clone(),
            Chart::PhiPi => self.to_zy()?,
        };
        Ok(p.partial(k))
    }

    pub(crate) fn require_chart(&self, chart: Chart) -> Result<()> {
        if self.chart != chart {
            return Err(Error::ChartMismatch {
                expected: chart.name(),
                found: self.chart.name(),
            });
        }
        Ok(())
    }
}

/// `∂/∂z_j = (∂/∂φ_j − i ∂/∂π_j)/√2` applied to a `(φ, π)` polynomial.
pub fn d_dz_from_phipi(p: &PolyExpr<Complex64>, j: usize) -> Result<PolyExpr<Complex64>> {
    let dphi = p.differentiate(Var::Phi(j))?;
    let dpi = p.differentiate(Var::Pi(j))?;
    Ok((&dphi - &dpi.scale(&Complex64::i())).scale(&Complex64::new(FRAC_1_SQRT_2, 0.0)))
}

/// `∂/∂y_j = (∂/∂φ_j + i ∂/∂π_j)/√2` applied to a `(φ, π)` polynomial.
pub fn d_dy_from_phipi(p: &PolyExpr<Complex64>, j: usize) -> Result<PolyExpr<Complex64>> {
    let dphi = p.differentiate(Var::Phi(j))?;
    let dpi = p.differentiate(Var::Pi(j))?;
    Ok((&dphi + &dpi.scale(&Complex64::i())).scale(&Complex64::new(FRAC_1_SQRT_2, 0.0)))
}

/// `∂/∂φ_j = (∂/∂z_j + ∂/∂y_j)/√2` applied to a `(z, y)` polynomial.
pub fn phi_derivative_in_zy(p: &PolyExpr<Complex64>, j: usize) -> Result<PolyExpr<Complex64>> {
    let dz = p.differentiate(Var::Z(j))?;
    let dy = p.differentiate(Var::Y(j))?;
    Ok((&dz + &dy).scale(&Complex64::new(FRAC_1_SQRT_2, 0.0)))
}

/// `∂/∂π_j = i(∂/∂z_j − ∂/∂y_j)/√2` applied to a `(z, y)` polynomial.
pub fn pi_derivative_in_zy(p: &PolyExpr<Complex64>, j: usize) -> Result<PolyExpr<Complex64>> {
    let dz = p.differentiate(Var::Z(j))?;
    let dy = p.differentiate(Var::Y(j))?;
    Ok((&dz - &dy).scale(&Complex64::new(0.0, FRAC_1_SQRT_2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Poly;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phi_and_pi_images() {
        let phi = Poly::var(1, Var::Phi(0)).unwrap().to_zy().unwrap();
        let s = FRAC_1_SQRT_2;
        assert!((phi.coeff(&MultiIndex::from(vec![1, 0])) - cx(s, 0.0)).norm() < 1e-15);
        assert!((phi.coeff(&MultiIndex::from(vec![0, 1])) - cx(s, 0.0)).norm() < 1e-15);

        // π = (z − y)/(i√2)
        let pi = Poly::var(1, Var::Pi(0)).unwrap().to_zy().unwrap();
        let z_coeff = pi.coeff(&MultiIndex::from(vec![1, 0]));
        let y_coeff = pi.coeff(&MultiIndex::from(vec![0, 1]));
        assert!((z_coeff * cx(0.0, 2f64.sqrt()) - cx(1.0, 0.0)).norm() < 1e-15);
        assert!((y_coeff * cx(0.0, 2f64.sqrt()) + cx(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn oscillator_energy_is_zy() {
        let phi = Poly::var(1, Var::Phi(0)).unwrap();
        let pi = Poly::var(1, Var::Pi(0)).unwrap();
        let h = (&phi.pow(2) + &pi.pow(2)).scale(&cx(0.5, 0.0));
        let zy = h.to_zy().unwrap();
        let expected = Poly::monomial(Chart::Zy, 1, MultiIndex::from(vec![1, 1]), cx(1.0, 0.0));
        assert!(zy.approx_eq(&expected, 1e-15), "{zy:?}");
    }

    #[test]
    fn second_z_derivative_of_phi_squared() {
        let phi2 = Poly::var(1, Var::Phi(0)).unwrap().pow(2);
        let d = phi2.zy_partial(&MultiIndex::from(vec![2, 0])).unwrap();
        assert!((d.as_constant().unwrap() - cx(1.0, 0.0)).norm() < 1e-14);

        // ½(∂²/∂φ² − ∂²/∂π² − 2i ∂²/∂φ∂π) φ² = 1
        let dd_phi = phi2
            .differentiate(Var::Phi(0))
            .unwrap()
            .differentiate(Var::Phi(0))
            .unwrap();
        let dd_pi = phi2.differentiate(Var::Pi(0)).unwrap().differentiate(Var::Pi(0)).unwrap();
        let dd_mixed = phi2.differentiate(Var::Phi(0)).unwrap().differentiate(Var::Pi(0)).unwrap();
        let via_phipi = (&(&dd_phi - &dd_pi) - &dd_mixed.scale(&cx(0.0, 2.0))).scale(&cx(0.5, 0.0));
        assert!((via_phipi.as_constant().unwrap() - cx(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn third_y_derivative_of_quadratic_vanishes() {
        let p = crate::poly::parse_poly("3*phi1^2 - phi1*pi1 + 2*pi1^2 + phi1", &Default::default())
            .unwrap();
        assert!(p.zy_partial(&MultiIndex::from(vec![0, 3])).unwrap().is_zero());
        let z1y1 = Poly::monomial(Chart::Zy, 1, MultiIndex::from(vec![1, 1]), cx(1.0, 0.0));
        let dz = z1y1.zy_partial(&MultiIndex::from(vec![1, 0])).unwrap();
        assert_eq!(dz, Poly::var(1, Var::Y(0)).unwrap());
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let z = Poly::var(1, Var::Z(0)).unwrap();
        assert!(matches!(z.to_zy(), Err(Error::ChartMismatch { .. })));
    }
}
