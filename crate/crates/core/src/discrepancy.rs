//! Quantum flux `ĝ = −i Tr(ρ [g_n, H_n])` versus classical flux `ġ` along
//! Hamilton's equations, their difference, and its closed form
//!
//! ```text
//! i(ĝ − ġ) = Σ_{2 ≤ |k| ≤ cap} (1/k!) ( ∂_z^k g · ∂_y^k H − ∂_y^k g · ∂_z^k H )
//! ```
//!
//! evaluated at the classical point. The sum is exact once `cap` reaches the
//! total creation and annihilation degree of `H_n`.

use num_complex::Complex64;

use crate::ensemble::{pseudo_wavefunction, ClassicalState, DensityMatrix, Ensemble, HamiltonianFlow};
use crate::error::{Error, Result};
use crate::operator::FockSpace;
use crate::poly::{Chart, MultiIndex, PolyExpr, Var};
use crate::scalar::Coefficient;
use crate::{NormalForm, Poly};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Paired fluxes and their difference, direct and in closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyReport {
    pub g_hat: Complex64,
    pub g_dot: Complex64,
    /// `ĝ − ġ` from the dense quantum flux.
    pub direct: Complex64,
    /// `ĝ − ġ` from the derivative series, when computed.
    pub closed_form: Option<Complex64>,
    /// The series is complete at the chosen order cap.
    pub applicable: bool,
    /// Every per-mode creation and annihilation exponent of `H_n` is at most
    /// three, so fourth nested commutators with `a_j`, `a_j†` vanish.
    pub limited_order: bool,
    pub residual: Option<f64>,
}

fn modes_of(g: &Poly, h: &Poly) -> usize {
    g.modes().max(h.modes())
}

fn commutator_nf(g: &Poly, h: &Poly, modes: usize) -> Result<NormalForm> {
    let gn = NormalForm::from_poly(&g.embed(modes))?;
    let hn = NormalForm::from_poly(&h.embed(modes))?;
    Ok(gn.commutator(&hn))
}

/// `−i Tr(ρ [g_n, H_n])`, commutator taken symbolically then realized.
pub fn quantum_flux(rho: &DensityMatrix, g: &Poly, h: &Poly) -> Result<Complex64> {
    let n = rho.space().modes();
    if modes_of(g, h) > n {
        return Err(Error::ModeMismatch {
            left: modes_of(g, h),
            right: n,
        });
    }
    let c = commutator_nf(g, h, n)?.realize(rho.space())?;
    Ok(-I * rho.matrix().trace_product(&c))
}

/// `−i ⟨w|[g_n, H_n]|w⟩` for the pseudo-wavefunction of `s`.
pub fn quantum_flux_pure(s: &ClassicalState, g: &Poly, h: &Poly, space: &FockSpace) -> Result<Complex64> {
    let n = space.modes();
    if modes_of(g, h) > n {
        return Err(Error::ModeMismatch {
            left: modes_of(g, h),
            right: n,
        });
    }
    let w = pseudo_wavefunction(s, space)?;
    let cw = commutator_nf(g, h, n)?.apply(&w)?;
    Ok(-I * w.inner(&cw))
}

/// `Σ_j ∂g/∂φ_j · ∂H/∂π_j − ∂g/∂π_j · ∂H/∂φ_j` at `s`.
pub fn classical_flux(s: &ClassicalState, g: &Poly, h: &Poly) -> Result<Complex64> {
    g.require_chart(Chart::PhiPi)?;
    let n = s.modes();
    if modes_of(g, h) > n {
        return Err(Error::ModeMismatch {
            left: modes_of(g, h),
            right: n,
        });
    }
    let (dphi, dpi) = HamiltonianFlow::new(&h.embed(n))?.rhs(s)?;
    let g = g.embed(n);
    let point = s.phipi_point();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        acc += g.differentiate(Var::Phi(j))?.eval(&point)? * dphi[j];
        acc += g.differentiate(Var::Pi(j))?.eval(&point)? * dpi[j];
    }
    Ok(acc)
}

/// Direct discrepancy for a pure state; the closed-form fields are left
/// empty.
pub fn discrepancy_direct(s: &ClassicalState, g: &Poly, h: &Poly, space: &FockSpace) -> Result<DiscrepancyReport> {
    let g_hat = quantum_flux_pure(s, g, h, space)?;
    let g_dot = classical_flux(s, g, h)?;
    let hn = NormalForm::from_poly(h)?;
    Ok(DiscrepancyReport {
        g_hat,
        g_dot,
        direct: g_hat - g_dot,
        closed_form: None,
        applicable: false,
        limited_order: hn.limited_order(),
        residual: None,
    })
}

/// Closed-form value of `ĝ − ġ` and whether the truncated series is exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedForm {
    pub value: Complex64,
    pub applicable: bool,
    pub limited_order: bool,
}

/// `Σ_{2 ≤ |k| ≤ cap} (1/k!)(∂_z^k g ∂_y^k H − ∂_y^k g ∂_z^k H)` as a
/// `(z, y)` polynomial; equals `i(ĝ − ġ)` evaluated at a coherent point.
pub fn discrepancy_series<C: Coefficient>(g: &PolyExpr<C>, h: &PolyExpr<C>, order_cap: u32) -> PolyExpr<C> {
    let n = g.modes().max(h.modes());
    let (g, h) = (g.embed(n), h.embed(n));
    let mut acc = PolyExpr::zero(Chart::Zy, n);
    for k in MultiIndex::enumerate(n, 2, order_cap) {
        let zk = k.embed_blocks(1, 2 * n);
        let mut yk = MultiIndex::zeros(2 * n);
        for j in 0..n {
            yk.set(n + j, k.get(j));
        }
        let w = C::from_ratio(1, k.factorial());
        let t = &(&g.partial(&zk) * &h.partial(&yk)) - &(&g.partial(&yk) * &h.partial(&zk));
        acc = &acc + &t.scale(&w);
    }
    acc
}

pub fn discrepancy_closed_form(s: &ClassicalState, g: &Poly, h: &Poly, order_cap: u32) -> Result<ClosedForm> {
    let n = s.modes();
    if modes_of(g, h) > n {
        return Err(Error::ModeMismatch {
            left: modes_of(g, h),
            right: n,
        });
    }
    let gz = to_zy_chart(&g.embed(n))?;
    let hz = to_zy_chart(&h.embed(n))?;
    let series = discrepancy_series(&gz, &hz, order_cap);
    let value = -I * series.eval(&s.zy_point())?;
    let hn = NormalForm::from_zy_poly(&hz)?;
    let (c, a) = hn.total_orders();
    Ok(ClosedForm {
        value,
        applicable: c <= order_cap && a <= order_cap,
        limited_order: hn.limited_order(),
    })
}

fn to_zy_chart(p: &Poly) -> Result<Poly> {
    match p.chart() {
        Chart::Zy => Ok(p.clone()),
        Chart::PhiPi => p.to_zy(),
    }
}

/// Direct and closed-form discrepancy together.
pub fn discrepancy_report(
    s: &ClassicalState,
    g: &Poly,
    h: &Poly,
    space: &FockSpace,
    order_cap: u32,
) -> Result<DiscrepancyReport> {
    let mut r = discrepancy_direct(s, g, h, space)?;
    let cf = discrepancy_closed_form(s, g, h, order_cap)?;
    r.closed_form = Some(cf.value);
    r.applicable = cf.applicable;
    r.residual = Some((r.direct - cf.value).norm());
    Ok(r)
}

/// Single-mode second- and third-order discrepancy written with `(φ, π)`
/// derivatives; returns `ĝ − ġ`. An independent route to the same number as
/// [`discrepancy_closed_form`] with cap 3.
pub fn discrepancy_phipi_single_mode(s: &ClassicalState, g: &Poly, h: &Poly) -> Result<Complex64> {
    if s.modes() != 1 || g.modes() != 1 || h.modes() != 1 {
        return Err(Error::InvalidArgument("single-mode form needs one mode".into()));
    }
    g.require_chart(Chart::PhiPi)?;
    h.require_chart(Chart::PhiPi)?;
    let point = s.phipi_point();
    let d = |p: &Poly, a: u32, b: u32| -> Result<Complex64> {
        p.partial(&MultiIndex::from(vec![a, b])).eval(&point)
    };
    let i = I;
    let eight_i = -4.0 * i * d(g, 1, 1)? * (d(h, 2, 0)? - d(h, 0, 2)?)
        + 4.0 * i * (d(g, 2, 0)? - d(g, 0, 2)?) * d(h, 1, 1)?
        + (d(g, 3, 0)? - 3.0 * d(g, 1, 2)?) * (3.0 * i * d(h, 2, 1)? - i * d(h, 0, 3)?) / 3.0
        + (-3.0 * i * d(g, 2, 1)? + i * d(g, 0, 3)?) * (d(h, 3, 0)? - 3.0 * d(h, 1, 2)?) / 3.0;
    Ok(eight_i / (8.0 * i))
}

/// Canonical field scaling `φ_j = s_j φ′_j`, `π_j = π′_j / s_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldScaling<C> {
    scales: Vec<C>,
}

impl<C: Coefficient> FieldScaling<C> {
    pub fn scales(&self) -> &[C] {
        &self.scales
    }
}

impl FieldScaling<Complex64> {
    /// `(φ, π) ↦ (φ′, π′) = (φ/s, π s)`.
    pub fn to_primed(&self, st: &ClassicalState) -> ClassicalState {
        ClassicalState {
            phi: st.phi.iter().zip(&self.scales).map(|(x, s)| x / s.re).collect(),
            pi: st.pi.iter().zip(&self.scales).map(|(x, s)| x * s.re).collect(),
        }
    }

    /// `(φ′, π′) ↦ (φ, π) = (s φ′, π′/s)`.
    pub fn from_primed(&self, st: &ClassicalState) -> ClassicalState {
        ClassicalState {
            phi: st.phi.iter().zip(&self.scales).map(|(x, s)| x * s.re).collect(),
            pi: st.pi.iter().zip(&self.scales).map(|(x, s)| x / s.re).collect(),
        }
    }
}

/// `H′(φ′, π′) = H(s φ′, π′/s)`. Scales must be positive reals.
pub fn rescale_field<C: Coefficient>(h: &PolyExpr<C>, scales: &[C]) -> Result<(PolyExpr<C>, FieldScaling<C>)> {
    h.require_chart_generic(Chart::PhiPi)?;
    let n = h.modes();
    if scales.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: scales.len(),
        });
    }
    for s in scales {
        let c = s.to_complex64();
        if !(c.re > 0.0) || c.im != 0.0 {
            return Err(Error::InvalidArgument(format!("field scale must be positive, got {c}")));
        }
    }
    let mut images = Vec::with_capacity(2 * n);
    for (j, s) in scales.iter().enumerate() {
        images.push(PolyExpr::var(n, Var::Phi(j))?.scale(s));
    }
    for (j, s) in scales.iter().enumerate() {
        images.push(PolyExpr::var(n, Var::Pi(j))?.scale(&s.inv()));
    }
    Ok((
        h.substitute(&images, Chart::PhiPi),
        FieldScaling {
            scales: scales.to_vec(),
        },
    ))
}

/// Per mode, the ensemble average of `∂²H/∂φ_j² − ∂²H/∂π_j²`.
pub fn scaling_condition_residual(h: &Poly, e: &Ensemble) -> Result<Vec<Complex64>> {
    h.require_chart(Chart::PhiPi)?;
    let n = e.modes();
    let h = h.embed(n);
    (0..n)
        .map(|j| {
            let two = |v: Var| -> Result<Poly> { h.differentiate(v)?.differentiate(v) };
            let diff = &two(Var::Phi(j))? - &two(Var::Pi(j))?;
            e.average(|s| diff.eval(&s.phipi_point()))
        })
        .collect()
}

/// Exact-coefficient variant of [`scaling_condition_residual`] for
/// polynomials whose second derivatives are constant.
pub fn scaling_condition_constant<C: Coefficient>(h: &PolyExpr<C>) -> Result<Vec<C>> {
    h.require_chart_generic(Chart::PhiPi)?;
    let n = h.modes();
    (0..n)
        .map(|j| {
            let two = |v: Var| -> Result<PolyExpr<C>> { h.differentiate(v)?.differentiate(v) };
            let diff = &two(Var::Phi(j))? - &two(Var::Pi(j))?;
            diff.as_constant().ok_or_else(|| {
                Error::InvalidArgument("second derivatives are not constant".into())
            })
        })
        .collect()
}

/// Ensemble-averaged fluxes for one observable.
#[derive(Clone, Debug, PartialEq)]
pub struct IeeEntry {
    pub g_hat: Complex64,
    pub g_dot: Complex64,
    pub discrepancy: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IeeReport {
    pub entries: Vec<IeeEntry>,
    pub tolerance: f64,
    /// `⟨ĝ⟩` and `⟨ġ⟩` vanish within tolerance for every observable.
    pub holds: bool,
}

/// Member-wise fluxes averaged with the ensemble weights.
pub fn iee_check(e: &Ensemble, h: &Poly, observables: &[Poly], space: &FockSpace, tolerance: f64) -> Result<IeeReport> {
    if observables.is_empty() {
        return Err(Error::InvalidArgument("observable list is empty".into()));
    }
    let mut entries = Vec::with_capacity(observables.len());
    for g in observables {
        let g_hat = e.average(|s| quantum_flux_pure(s, g, h, space))?;
        let g_dot = e.average(|s| classical_flux(s, g, h))?;
        entries.push(IeeEntry {
            g_hat,
            g_dot,
            discrepancy: g_hat - g_dot,
        });
    }
    let holds = entries
        .iter()
        .all(|x| x.g_hat.norm() <= tolerance && x.g_dot.norm() <= tolerance);
    Ok(IeeReport {
        entries,
        tolerance,
        holds,
    })
}

impl<C: Coefficient> PolyExpr<C> {
    fn require_chart_generic(&self, chart: Chart) -> Result<()> {
        if self.chart() != chart {
            return Err(Error::ChartMismatch {
                expected: chart.name(),
                found: self.chart().name(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::pure_density;
    use crate::poly::{parse_poly, Bindings};
    use crate::{ExactComplex, ExactPoly};

    fn p(text: &str) -> Poly {
        parse_poly(text, &Bindings::new()).unwrap()
    }

    fn osc(m: f64) -> Poly {
        let b: Bindings = [("m".to_string(), m)].into_iter().collect();
        parse_poly("0.5*pi1^2 + 0.5*m*phi1^2", &b).unwrap()
    }

    #[test]
    fn oscillator_discrepancy() {
        let space = FockSpace::new(1, 32).unwrap();
        let g = p("phi1*pi1");
        for &m in &[0.5, 1.0, 2.0, 4.0] {
            let h = osc(m);
            for st in [ClassicalState::single(1.0, 0.0), ClassicalState::single(-0.4, 0.9)] {
                let r = discrepancy_report(&st, &g, &h, &space, 3).unwrap();
                let expect = -(m - 1.0) / 2.0;
                assert!((r.direct.re - expect).abs() < 1e-8 && r.direct.im.abs() < 1e-10, "m={m}: {r:?}");
                assert!(r.applicable && r.limited_order);
                assert!(r.residual.unwrap() < 1e-8);
                let phipi = discrepancy_phipi_single_mode(&st, &g, &h).unwrap();
                assert!((phipi.re - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classical_flux_examples() {
        let st = ClassicalState::single(0.7, -1.3);
        let m = 2.5;
        let h = osc(m);
        let gd = classical_flux(&st, &p("phi1*pi1"), &h).unwrap();
        assert!((gd.re - (1.3f64.powi(2) - m * 0.49)).abs() < 1e-12);
        assert_eq!(classical_flux(&st, &h, &h).unwrap().norm(), 0.0);
        let gd = classical_flux(&st, &p("phi1"), &h).unwrap();
        assert!((gd.re - -1.3).abs() < 1e-15);
    }

    #[test]
    fn dense_and_vector_flux_agree() {
        let space = FockSpace::new(1, 32).unwrap();
        let h = p("0.5*pi1^2 + phi1^2 + 0.2*phi1^3");
        let g = p("phi1*pi1^2 - phi1^2");
        let st = ClassicalState::single(0.6, 0.5);
        let rho = pure_density(&st, &space).unwrap();
        let a = quantum_flux(&rho, &g, &h).unwrap();
        let b = quantum_flux_pure(&st, &g, &h, &space).unwrap();
        assert!((a - b).norm() < 1e-12);
        assert!(quantum_flux(&rho, &h, &h).unwrap().norm() < 1e-12);
        let phi = quantum_flux(&pure_density(&ClassicalState::single(1.0, 0.0), &space).unwrap(), &p("phi1"), &p("0.5*phi1^2 + 0.5*pi1^2")).unwrap();
        assert!(phi.norm() < 1e-8);
    }

    #[test]
    fn two_mode_coupling() {
        let space = FockSpace::new(2, 32).unwrap();
        let h = p("0.5*pi1^2 + 0.5*pi2^2 + 0.7*phi1^2 + 0.3*phi2^2 + 0.4*phi1*phi2 + 0.1*phi1^2*phi2");
        let g = p("phi1*pi2");
        let st = ClassicalState::new(vec![0.3, -0.5], vec![0.8, 0.2]).unwrap();
        let r = discrepancy_report(&st, &g, &h, &space, 3).unwrap();
        assert!(r.applicable);
        assert!(r.residual.unwrap() < 1e-8, "{r:?}");
    }

    #[test]
    fn equal_curvature_quadratic_has_no_discrepancy() {
        let st = ClassicalState::single(0.2, 0.9);
        let cf = discrepancy_closed_form(&st, &p("phi1^2 - 3*phi1*pi1"), &p("1.5*phi1^2 + 1.5*pi1^2"), 3).unwrap();
        assert!(cf.value.norm() < 1e-14);
    }

    #[test]
    fn rescaling_oscillator() {
        let m: f64 = 2.0;
        let s = m.powf(-0.25);
        let (hp, map) = rescale_field(&osc(m), &[Complex64::new(s, 0.0)]).unwrap();
        let c = m.sqrt() / 2.0;
        assert!(hp.approx_eq(&p("phi1^2 + pi1^2").scale(&Complex64::new(c, 0.0)), 1e-15));
        let st = ClassicalState::single(0.4, -0.2);
        let back = map.from_primed(&map.to_primed(&st));
        assert!((back.phi[0] - 0.4).abs() < 1e-15 && (back.pi[0] + 0.2).abs() < 1e-15);
        let (same, _) = rescale_field(&osc(m), &[Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(same, osc(m));
        assert!(rescale_field(&osc(m), &[Complex64::new(-1.0, 0.0)]).is_err());

        let e = Ensemble::uniform_circle(8, 1.0).unwrap();
        let r = scaling_condition_residual(&osc(2.0), &e).unwrap();
        assert!((r[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_rescaling_for_fourth_powers() {
        // m = 16 gives s = 1/2.
        let half = ExactComplex::from_ratio(1, 2);
        let h: ExactPoly = osc(16.0).map_coeffs(|c| ExactComplex::from_ratio((c.re * 2.0) as i64, 2));
        let (hp, _) = rescale_field(&h, &[half]).unwrap();
        assert!(scaling_condition_constant(&hp).unwrap()[0] == ExactComplex::from_int(0));
    }

    #[test]
    fn iee_on_circle() {
        let space = FockSpace::new(1, 32).unwrap();
        let e = Ensemble::uniform_circle(64, 1.0).unwrap();
        let gs = [p("phi1*pi1"), p("phi1^2 - pi1^2")];
        let r1 = iee_check(&e, &osc(1.0), &gs, &space, 1e-7).unwrap();
        assert!(r1.holds, "{r1:?}");
        let r2 = iee_check(&e, &osc(2.0), &gs, &space, 1e-7).unwrap();
        assert!(!r2.holds);
        assert!((r2.entries[0].discrepancy.re + 0.5).abs() < 1e-7);
        assert!(iee_check(&e, &osc(1.0), &[], &space, 1e-7).is_err());
    }
}
