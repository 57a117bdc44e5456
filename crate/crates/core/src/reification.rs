//! Squeezing-type recodings of the classical density matrix.
//!
//! `S(α) = exp(−(α/2)(a†² + a²))` acts on one mode and is Hermitian, not
//! unitary; `ρ_z(α) = S ρ S` grows without bound as `α → π/4`. The doubled
//! representation uses `M(α) = exp(−α Σ_j (a_j† b_j† + a_j b_j))` on `2n`
//! modes ordered `a_1..a_n, b_1..b_n`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::ensemble::{extended_wavefunction, pseudo_wavefunction, ClassicalState};
use crate::error::{Error, Result};
use crate::linalg::{expm_apply, expm_hermitian};
use crate::operator::{FockMatrix, FockSpace, FockVector};

/// Smallest cutoff accepted for `S(α)`.
pub const MIN_CUTOFF: usize = 4;
/// Quantitative work near the pole keeps `π/4 − α` at least this large.
pub const POLE_MARGIN: f64 = 1e-3;

fn single_mode_space(cutoff: usize) -> Result<FockSpace> {
    if cutoff < MIN_CUTOFF {
        return Err(Error::CutoffTooSmall {
            cutoff,
            min: MIN_CUTOFF,
        });
    }
    FockSpace::new(1, cutoff)
}

/// `(a†² + a²)/2` on one mode.
fn squeeze_generator(space: &FockSpace) -> FockMatrix {
    let a = space.annihilator(0);
    let ad = space.creator(0);
    (&(&ad * &ad) + &(&a * &a)).scale(Complex64::new(0.5, 0.0))
}

/// Dense `S(α)`. Accurate while `α · D` is moderate; states near the pole
/// go through [`s_apply`].
pub fn s_operator(alpha: f64, cutoff: usize) -> Result<FockMatrix> {
    let space = single_mode_space(cutoff)?;
    let g = squeeze_generator(&space);
    FockMatrix::from_data(&space, expm_hermitian(g.data(), -alpha))
}

/// `S(α) v` without forming the dense exponential.
pub fn s_apply(alpha: f64, v: &FockVector) -> Result<FockVector> {
    let space = single_mode_space(v.space().cutoff())?;
    if v.space().modes() != 1 {
        return Err(Error::ModeMismatch {
            left: v.space().modes(),
            right: 1,
        });
    }
    let g = squeeze_generator(&space);
    FockVector::from_data(&space, expm_apply(g.data(), -alpha, v.data()))
}

/// `a(α) = cos α · a + sin α · a†`.
pub fn rotated_annihilator(alpha: f64, space: &FockSpace) -> FockMatrix {
    let (s, c) = alpha.sin_cos();
    &space.annihilator(0).scale(Complex64::new(c, 0.0)) + &space.creator(0).scale(Complex64::new(s, 0.0))
}

/// Max interior deviation of `(S(α+h) a S(α+h)⁻¹ − S(α−h) a S(α−h)⁻¹)/2h`
/// from `d a(α)/dα = −sin α · a + cos α · a†`.
pub fn similarity_slope_residual(alpha: f64, h: f64, cutoff: usize, margin: usize) -> Result<f64> {
    let space = single_mode_space(cutoff)?;
    let a = space.annihilator(0);
    let conj = |x: f64| -> Result<FockMatrix> { Ok(&(&s_operator(x, cutoff)? * &a) * &s_operator(-x, cutoff)?) };
    let slope = (&conj(alpha + h)? - &conj(alpha - h)?).scale(Complex64::new(0.5 / h, 0.0));
    let (s, c) = alpha.sin_cos();
    let expect = &a.scale(Complex64::new(-s, 0.0)) + &space.creator(0).scale(Complex64::new(c, 0.0));
    Ok(slope.interior_max_diff(&expect, margin))
}

/// Coefficients of the norm-preserving flow. Errors at the pole `α = π/4`
/// (modulo `π/2`), where `1 − 4 sin²α cos²α` vanishes.
pub fn flow_coeffs(alpha: f64) -> Result<(f64, f64)> {
    let (s, c) = alpha.sin_cos();
    let den = 1.0 - 4.0 * s * s * c * c;
    if den.abs() < 1e-14 {
        return Err(Error::Pole { alpha });
    }
    Ok((1.0 / den, -4.0 * s * c / den))
}

/// `S(α) |w⟩⟨w| S(α)` for the pseudo-wavefunction of a one-mode state.
pub fn rho_z(s: &ClassicalState, alpha: f64, cutoff: usize) -> Result<FockMatrix> {
    let space = single_mode_space(cutoff)?;
    if s.modes() != 1 {
        return Err(Error::ModeMismatch {
            left: s.modes(),
            right: 1,
        });
    }
    let sw = s_apply(alpha, &pseudo_wavefunction(s, &space)?)?;
    Ok(sw.projector())
}

/// Operator-norm residuals of the two relations obtained at `α = π/4`:
/// `ρ_z X = z̄ ρ_z` and `X ρ_z = z ρ_z` with `X = (a + a†)/√2`.
pub fn paradox_residuals(s: &ClassicalState, rz: &FockMatrix) -> (f64, f64) {
    let space = rz.space();
    let x = (&space.annihilator(0) + &space.creator(0)).scale(Complex64::new(FRAC_1_SQRT_2, 0.0));
    let z = s.z()[0];
    let r7 = &(rz * &x) - &rz.scale(z.conj());
    let r8 = &(&x * rz) - &rz.scale(z);
    (r7.operator_norm(), r8.operator_norm())
}

/// Norm growth of `ρ_z(α)` along an α grid at one cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct ReificationTrace {
    pub alphas: Vec<f64>,
    pub norms: Vec<f64>,
    pub cutoff: usize,
    pub residual_a7: Vec<f64>,
    pub residual_a8: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    /// First grid point whose norm exceeds the threshold.
    pub threshold_alpha: Option<f64>,
}

impl ReificationTrace {
    pub fn is_monotone(&self) -> bool {
        self.norms.windows(2).all(|w| w[1] > w[0])
    }
}

/// `n` points from 0 to `π/4 − margin` inclusive.
pub fn alpha_grid(n: usize, margin: f64) -> Vec<f64> {
    let end = FRAC_PI_4 - margin;
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| end * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn rho_z_trace(s: &ClassicalState, alphas: &[f64], cutoff: usize, threshold: f64) -> Result<ReificationTrace> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("empty α grid".into()));
    }
    for w in alphas.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidArgument("α grid must be strictly increasing".into()));
        }
    }
    if alphas[0] < 0.0 || *alphas.last().unwrap() >= FRAC_PI_4 {
        return Err(Error::InvalidArgument("α grid must lie in [0, π/4)".into()));
    }
    let mut t = ReificationTrace {
        alphas: alphas.to_vec(),
        norms: Vec::new(),
        cutoff,
        residual_a7: Vec::new(),
        residual_a8: Vec::new(),
        c: Vec::new(),
        d: Vec::new(),
        threshold_alpha: None,
    };
    for &alpha in alphas {
        let rz = rho_z(s, alpha, cutoff)?;
        let norm = rz.operator_norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite { step: t.norms.len() });
        }
        let (r7, r8) = paradox_residuals(s, &rz);
        let (c, d) = flow_coeffs(alpha)?;
        if t.threshold_alpha.is_none() && norm > threshold {
            t.threshold_alpha = Some(alpha);
        }
        t.norms.push(norm);
        t.residual_a7.push(r7);
        t.residual_a8.push(r8);
        t.c.push(c);
        t.d.push(d);
    }
    Ok(t)
}

/// Right-hand side of the norm-preserving flow for `ρ` at `α`.
pub fn norm_flow_rhs(rho: &FockMatrix, alpha: f64) -> Result<FockMatrix> {
    let space = rho.space();
    let (c, d) = flow_coeffs(alpha)?;
    let k = squeeze_generator(space);
    let aa = rotated_annihilator(alpha, space);
    let ah = aa.dagger();
    let cc = Complex64::new(c, 0.0);
    let mut f = (&(&k * rho) + &(rho * &k)).scale(Complex64::new(-1.0, 0.0));
    f = &f + &(&(&aa * &aa) * rho).scale(cc);
    f = &f + &(&(rho * &ah) * &ah).scale(cc);
    f = &f + &(&(&aa * rho) * &ah).scale(Complex64::new(d, 0.0));
    Ok(f)
}

/// Trace drift rate of `ρ(α) = ρ_z/Tr ρ_z` under one Euler step of the
/// norm-preserving flow, `|Tr(ρ + h F) − Tr ρ| / h`.
pub fn norm_flow_residual(s: &ClassicalState, alpha: f64, cutoff: usize) -> Result<f64> {
    if FRAC_PI_4 - alpha < POLE_MARGIN {
        return Err(Error::PoleProximity {
            alpha,
            margin: POLE_MARGIN,
        });
    }
    let rz = rho_z(s, alpha, cutoff)?;
    let rho = rz.scale(Complex64::new(1.0 / rz.trace().re, 0.0));
    let h = 1e-4;
    let stepped = &rho + &norm_flow_rhs(&rho, alpha)?.scale(Complex64::new(h, 0.0));
    Ok((stepped.trace() - rho.trace()).norm() / h)
}

/// `Σ_j (a_j† b_j† + a_j b_j)` on `2n` modes.
fn pair_generator(space: &FockSpace) -> FockMatrix {
    let n = space.modes() / 2;
    let mut g = FockMatrix::zeros(space);
    for j in 0..n {
        let (a, b) = (space.annihilator(j), space.annihilator(n + j));
        let (ad, bd) = (space.creator(j), space.creator(n + j));
        g = &g + &(&(&ad * &bd) + &(&a * &b));
    }
    g
}

pub fn m_operator(alpha: f64, modes: usize, cutoff: usize) -> Result<FockMatrix> {
    if modes == 0 {
        return Err(Error::InvalidArgument("at least one mode".into()));
    }
    let space = FockSpace::new(2 * modes, cutoff)?;
    let g = pair_generator(&space);
    FockMatrix::from_data(&space, expm_hermitian(g.data(), -alpha))
}

/// `‖M(α) w̃‖` for the normalized doubled wavefunction of `s`.
pub fn m_escape_norm(s: &ClassicalState, alpha: f64, cutoff: usize) -> Result<f64> {
    if s.modes() == 0 {
        return Err(Error::InvalidArgument("at least one mode".into()));
    }
    let space = FockSpace::new(2 * s.modes(), cutoff)?;
    let w = extended_wavefunction(s, &space)?;
    let g = pair_generator(&space);
    Ok(expm_apply(g.data(), -alpha, w.data()).norm())
}

/// One point of the paradox ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct ParadoxRow {
    pub eps: f64,
    pub cutoff: usize,
    pub norm: f64,
    pub residual_a7: f64,
    pub residual_a8: f64,
}

/// Residuals of both relations at `α = π/4 − ε` for every `(ε, cutoff)`.
pub fn paradox_demo(s: &ClassicalState, eps: &[f64], cutoffs: &[usize]) -> Result<Vec<ParadoxRow>> {
    let mut rows = Vec::with_capacity(eps.len() * cutoffs.len());
    for &cutoff in cutoffs {
        for &e in eps {
            if !(e > 0.0) {
                return Err(Error::InvalidArgument(format!("ε must be positive, got {e}")));
            }
            let rz = rho_z(s, FRAC_PI_4 - e, cutoff)?;
            let (r7, r8) = paradox_residuals(s, &rz);
            rows.push(ParadoxRow {
                eps: e,
                cutoff,
                norm: rz.operator_norm(),
                residual_a7: r7,
                residual_a8: r8,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_at_zero_is_identity() {
        let s = s_operator(0.0, 16).unwrap();
        assert!(s.interior_max_diff(&FockMatrix::identity(s.space()), 0) < 1e-12);
        assert!(s_operator(0.3, 16).unwrap().is_hermitian(1e-10));
        assert!(matches!(s_operator(0.1, 3), Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn one_parameter_group() {
        let (a1, a2) = (0.15, 0.2);
        let lhs = &s_operator(a1, 48).unwrap() * &s_operator(a2, 48).unwrap();
        let rhs = s_operator(a1 + a2, 48).unwrap();
        assert!(lhs.interior_max_diff(&rhs, 24) < 1e-8);
    }

    #[test]
    fn first_order_similarity() {
        let space = FockSpace::new(1, 48).unwrap();
        let da = 1e-4;
        let a = space.annihilator(0);
        let ad = space.creator(0);
        let sa = &(&s_operator(da, 48).unwrap() * &a) * &s_operator(-da, 48).unwrap();
        let sad = &(&s_operator(da, 48).unwrap() * &ad) * &s_operator(-da, 48).unwrap();
        let lin_a = &a + &ad.scale(Complex64::new(da, 0.0));
        let lin_ad = &ad - &a.scale(Complex64::new(da, 0.0));
        assert!(sa.interior_max_diff(&lin_a, 24) < 50.0 * da * da);
        assert!(sad.interior_max_diff(&lin_ad, 24) < 50.0 * da * da);
        assert!(similarity_slope_residual(0.3, 1e-3, 64, 56).unwrap() < 1e-5);
    }

    #[test]
    fn flow_coefficients() {
        assert_eq!(flow_coeffs(0.0).unwrap(), (1.0, 0.0));
        let (c, d) = flow_coeffs(std::f64::consts::FRAC_PI_6).unwrap();
        assert!((c - 4.0).abs() < 1e-12 && (d + 4.0 * 3f64.sqrt()).abs() < 1e-12);
        assert!(matches!(flow_coeffs(FRAC_PI_4), Err(Error::Pole { .. })));
        let (c, _) = flow_coeffs(FRAC_PI_4 - 1e-4).unwrap();
        assert!(c > 1e6);
    }

    #[test]
    fn trace_grows_toward_pole() {
        let st = ClassicalState::single(0.0, 2f64.sqrt());
        let grid = alpha_grid(20, POLE_MARGIN);
        let t = rho_z_trace(&st, &grid, 64, 1e6).unwrap();
        assert!((t.norms[0] - 1.0).abs() < 1e-10);
        assert!(t.is_monotone());
        assert!(t.threshold_alpha.is_some());
        assert!(rho_z_trace(&st, &[0.2, 0.1], 16, 1e6).is_err());
        assert!(rho_z_trace(&st, &[0.1, FRAC_PI_4], 16, 1e6).is_err());
    }

    #[test]
    fn norm_flow_small_alpha() {
        let st = ClassicalState::single(0.5, 0.3);
        assert!(norm_flow_residual(&st, 0.0, 32).unwrap() < 1e-6);
        assert!(matches!(
            norm_flow_residual(&st, FRAC_PI_4 - 1e-4, 32),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn m_operator_basics() {
        let m = m_operator(0.0, 1, 8).unwrap();
        assert!(m.interior_max_diff(&FockMatrix::identity(m.space()), 0) < 1e-12);
        assert!(m_operator(0.4, 1, 8).unwrap().is_hermitian(1e-10));
        let n = m_escape_norm(&ClassicalState::single(0.5, 0.3), FRAC_PI_4, 16).unwrap();
        assert!(n.is_finite() && n > 0.0);
    }

    #[test]
    fn paradox_ladder_shape() {
        let st = ClassicalState::single(0.5, 0.3);
        let rows = paradox_demo(&st, &[0.3, 0.01], &[16, 32]).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[1].residual_a7.max(rows[1].residual_a8) > rows[0].residual_a7.max(rows[0].residual_a8));
        assert!(paradox_demo(&st, &[0.0], &[16]).is_err());
    }
}
