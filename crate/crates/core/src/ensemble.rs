//! Classical states, coherent pseudo-wavefunctions and classical density
//! matrices, plus fixed-step integration of Hamilton's equations.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::HermitianEigen;
use crate::operator::{FockMatrix, FockSpace, FockVector};
use crate::poly::Var;
use crate::{NormalForm, Poly};

/// A point `(φ, π) ∈ ℝ^{2n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub phi: Vec<f64>,
    pub pi: Vec<f64>,
}

impl ClassicalState {
    pub fn new(phi: Vec<f64>, pi: Vec<f64>) -> Result<Self> {
        if phi.len() != pi.len() {
            return Err(Error::DimensionMismatch {
                expected: phi.len(),
                found: pi.len(),
            });
        }
        if phi.is_empty() {
            return Err(Error::InvalidArgument("state needs at least one mode".into()));
        }
        if phi.iter().chain(&pi).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("state entries must be finite".into()));
        }
        Ok(ClassicalState { phi, pi })
    }

    /// Single-mode state.
    pub fn single(phi: f64, pi: f64) -> Self {
        ClassicalState {
            phi: vec![phi],
            pi: vec![pi],
        }
    }

    /// State with the given complex amplitudes `z_j`.
    pub fn from_z(z: &[Complex64]) -> Self {
        ClassicalState {
            phi: z.iter().map(|z| z.re * 2f64.sqrt()).collect(),
            pi: z.iter().map(|z| z.im * 2f64.sqrt()).collect(),
        }
    }

    pub fn modes(&self) -> usize {
        self.phi.len()
    }

    /// `z_j = (φ_j + iπ_j)/√2`.
    pub fn z(&self) -> Vec<Complex64> {
        self.phi
            .iter()
            .zip(&self.pi)
            .map(|(&p, &q)| Complex64::new(p, q) * FRAC_1_SQRT_2)
            .collect()
    }

    /// `y_j = z̄_j`.
    pub fn y(&self) -> Vec<Complex64> {
        self.z().iter().map(|z| z.conj()).collect()
    }

    /// Point in the `(z, y)` chart, slot order `[z.., y..]`.
    pub fn zy_point(&self) -> Vec<Complex64> {
        let mut p = self.z();
        p.extend(self.y());
        p
    }

    /// Point in the `(φ, π)` chart, slot order `[φ.., π..]`.
    pub fn phipi_point(&self) -> Vec<Complex64> {
        self.phi
            .iter()
            .chain(&self.pi)
            .map(|&x| Complex64::new(x, 0.0))
            .collect()
    }

    fn axpy(&self, h: f64, d: &(Vec<f64>, Vec<f64>)) -> Self {
        ClassicalState {
            phi: self.phi.iter().zip(&d.0).map(|(x, v)| x + h * v).collect(),
            pi: self.pi.iter().zip(&d.1).map(|(x, v)| x + h * v).collect(),
        }
    }

    fn is_finite(&self) -> bool {
        self.phi.iter().chain(&self.pi).all(|x| x.is_finite())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub phi: Vec<f64>,
    pub pi: Vec<f64>,
    pub w: f64,
}

/// Finite weighted set of classical states. Weights are positive and sum to
/// one.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    members: Vec<(ClassicalState, f64)>,
}

#[derive(Serialize, Deserialize)]
struct EnsembleJson {
    members: Vec<Member>,
}

impl Ensemble {
    /// Validates weights: all positive, sum within `1e-12` of one.
    pub fn new(members: Vec<(ClassicalState, f64)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("ensemble has no members".into()));
        }
        let n = members[0].0.modes();
        if let Some((s, _)) = members.iter().find(|(s, _)| s.modes() != n) {
            return Err(Error::ModeMismatch {
                left: n,
                right: s.modes(),
            });
        }
        if members.iter().any(|(_, w)| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("ensemble weights must be positive".into()));
        }
        let total: f64 = members.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "ensemble weights sum to {total}, not 1"
            )));
        }
        Ok(Ensemble { members })
    }

    /// Rescales positive weights to sum to one.
    pub fn normalized(members: Vec<(ClassicalState, f64)>) -> Result<Self> {
        let total: f64 = members.iter().map(|(_, w)| w).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("ensemble weights must be positive".into()));
        }
        Self::new(members.into_iter().map(|(s, w)| (s, w / total)).collect())
    }

    pub fn single(s: ClassicalState) -> Self {
        Ensemble {
            members: vec![(s, 1.0)],
        }
    }

    /// `points` equally spaced phases on the circle `φ² + π² = r²` of a
    /// single mode, equal weights.
    pub fn uniform_circle(points: usize, radius: f64) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidArgument("circle needs at least one point".into()));
        }
        let w = 1.0 / points as f64;
        Ok(Ensemble {
            members: (0..points)
                .map(|k| {
                    let th = 2.0 * PI * k as f64 / points as f64;
                    (ClassicalState::single(radius * th.cos(), radius * th.sin()), w)
                })
                .collect(),
        })
    }

    pub fn members(&self) -> &[(ClassicalState, f64)] {
        &self.members
    }

    pub fn modes(&self) -> usize {
        self.members[0].0.modes()
    }

    /// Weighted sum `Σ w_i f(s_i)`.
    pub fn average(&self, mut f: impl FnMut(&ClassicalState) -> Result<Complex64>) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, w) in &self.members {
            acc += f(s)? * *w;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> String {
        let j = EnsembleJson {
            members: self
                .members
                .iter()
                .map(|(s, w)| Member {
                    phi: s.phi.clone(),
                    pi: s.pi.clone(),
                    w: *w,
                })
                .collect(),
        };
        serde_json::to_string(&j).expect("ensemble JSON is always encodable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: EnsembleJson = serde_json::from_str(text)?;
        let members = j
            .members
            .into_iter()
            .map(|m| Ok((ClassicalState::new(m.phi, m.pi)?, m.w)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }
}

/// A Fock matrix tagged with what is known about it.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: FockMatrix,
    pub hermitian: bool,
    pub unit_trace: bool,
    /// Built as a mixture of pure classical states.
    pub physically_realizable: bool,
}

impl DensityMatrix {
    /// Wraps an arbitrary matrix; flags are measured, provenance is not PR.
    pub fn from_matrix(matrix: FockMatrix) -> Self {
        let hermitian = matrix.is_hermitian(1e-12);
        let unit_trace = (matrix.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-10;
        DensityMatrix {
            matrix,
            hermitian,
            unit_trace,
            physically_realizable: false,
        }
    }

    fn realizable(matrix: FockMatrix) -> Self {
        DensityMatrix {
            physically_realizable: true,
            ..Self::from_matrix(matrix)
        }
    }

    pub fn matrix(&self) -> &FockMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> FockMatrix {
        self.matrix
    }

    pub fn space(&self) -> &FockSpace {
        self.matrix.space()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = self.matrix.hermitian_part();
        HermitianEigen::new(h.data())
            .eigenvalues()
            .first()
            .copied()
            .unwrap_or(0.0)
    }
}

/// Truncated coherent amplitudes `z^k e^{−|z|²/2}/√k!`, `k < cutoff`.
pub fn coherent_amplitudes(z: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(cutoff);
    let mut c = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for k in 0..cutoff {
        out.push(c);
        c = c * z / ((k + 1) as f64).sqrt();
    }
    out
}

fn product_state(space: &FockSpace, factors: &[Vec<Complex64>]) -> FockVector {
    let data = DVector::from_fn(space.dim(), |i, _| {
        space
            .occupations(i)
            .iter()
            .zip(factors)
            .map(|(&k, f)| f[k])
            .product()
    });
    FockVector::from_data(space, data).expect("dimension matches")
}

fn guard(z: &[Complex64], cutoff: usize, first_mode: usize) -> Result<()> {
    let limit = cutoff as f64 / 4.0;
    for (j, zj) in z.iter().enumerate() {
        if zj.norm_sqr() > limit {
            return Err(Error::AmplitudeOverflow {
                mode: first_mode + j + 1,
                norm_sqr: zj.norm_sqr(),
                limit,
            });
        }
    }
    Ok(())
}

/// The multimode coherent vector `exp(Σ_j z_j a_j† − ½|z_j|²)|0⟩`.
pub fn pseudo_wavefunction(s: &ClassicalState, space: &FockSpace) -> Result<FockVector> {
    if s.modes() != space.modes() {
        return Err(Error::ModeMismatch {
            left: s.modes(),
            right: space.modes(),
        });
    }
    let z = s.z();
    guard(&z, space.cutoff(), 0)?;
    let factors: Vec<Vec<Complex64>> = z
        .iter()
        .map(|&zj| coherent_amplitudes(zj, space.cutoff()))
        .collect();
    Ok(product_state(space, &factors))
}

/// `ρ = w w†`.
pub fn pure_density(s: &ClassicalState, space: &FockSpace) -> Result<DensityMatrix> {
    Ok(DensityMatrix::realizable(pseudo_wavefunction(s, space)?.projector()))
}

/// `ρ = Σ_i w_i ρ(s_i)`.
pub fn ensemble_density(e: &Ensemble, space: &FockSpace) -> Result<DensityMatrix> {
    let mut acc = FockMatrix::zeros(space);
    for (s, w) in e.members() {
        let v = pseudo_wavefunction(s, space)?;
        acc = &acc + &v.projector().scale(Complex64::new(*w, 0.0));
    }
    Ok(DensityMatrix::realizable(acc))
}

/// `Tr(ρ g_n)`.
pub fn expectation(rho: &DensityMatrix, g: &Poly) -> Result<Complex64> {
    let gn = NormalForm::from_poly(g)?;
    Ok(rho.matrix().trace_product(&gn.realize(rho.space())?))
}

/// The doubled-space vector with `a_j` amplitudes `z_j` and `b_j` amplitudes
/// `y_j`, modes ordered `a_1..a_n, b_1..b_n`.
///
/// The raw construction `exp(Σ_j z_j a_j† + y_j b_j† − (φ_j² + π_j²))|0⟩` is
/// only fixed up to constant factors, so the vector is returned with unit
/// norm: it is the tensor product of the two normalized coherent states.
pub fn extended_wavefunction(s: &ClassicalState, space: &FockSpace) -> Result<FockVector> {
    let n = s.modes();
    if space.modes() != 2 * n {
        return Err(Error::ModeMismatch {
            left: 2 * n,
            right: space.modes(),
        });
    }
    let z = s.z();
    let y = s.y();
    guard(&z, space.cutoff(), 0)?;
    guard(&y, space.cutoff(), n)?;
    let factors: Vec<Vec<Complex64>> = z
        .iter()
        .chain(&y)
        .map(|&c| coherent_amplitudes(c, space.cutoff()))
        .collect();
    Ok(product_state(space, &factors).normalized())
}

/// Hamilton's equations `φ̇ = ∂H/∂π`, `π̇ = −∂H/∂φ` with the partial
/// derivatives precomputed.
#[derive(Clone, Debug)]
pub struct HamiltonianFlow {
    h: Poly,
    dh_dphi: Vec<Poly>,
    dh_dpi: Vec<Poly>,
}

impl HamiltonianFlow {
    pub fn new(h: &Poly) -> Result<Self> {
        h.require_chart(crate::poly::Chart::PhiPi)?;
        let n = h.modes();
        Ok(HamiltonianFlow {
            h: h.clone(),
            dh_dphi: (0..n).map(|j| h.differentiate(Var::Phi(j))).collect::<Result<_>>()?,
            dh_dpi: (0..n).map(|j| h.differentiate(Var::Pi(j))).collect::<Result<_>>()?,
        })
    }

    pub fn hamiltonian(&self) -> &Poly {
        &self.h
    }

    fn embedded(&self, s: &ClassicalState) -> Result<Poly> {
        if s.modes() < self.h.modes() {
            return Err(Error::ModeMismatch {
                left: self.h.modes(),
                right: s.modes(),
            });
        }
        Ok(self.h.embed(s.modes()))
    }

    /// `(φ̇, π̇)` at `s`. Modes of `s` beyond those of `H` do not move.
    pub fn rhs(&self, s: &ClassicalState) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = s.modes();
        if n < self.h.modes() {
            return Err(Error::ModeMismatch {
                left: self.h.modes(),
                right: n,
            });
        }
        let point = s.phipi_point();
        let eval = |p: &Poly| -> Result<f64> { Ok(p.embed(n).eval(&point)?.re) };
        let mut dphi = vec![0.0; n];
        let mut dpi = vec![0.0; n];
        for j in 0..self.h.modes() {
            dphi[j] = eval(&self.dh_dpi[j])?;
            dpi[j] = -eval(&self.dh_dphi[j])?;
        }
        Ok((dphi, dpi))
    }

    pub fn energy(&self, s: &ClassicalState) -> Result<f64> {
        Ok(self.embedded(s)?.eval(&s.phipi_point())?.re)
    }

    /// One classic RK4 step of signed size `h`.
    pub fn rk4_step(&self, s: &ClassicalState, h: f64) -> Result<ClassicalState> {
        let k1 = self.rhs(s)?;
        let k2 = self.rhs(&s.axpy(h / 2.0, &k1))?;
        let k3 = self.rhs(&s.axpy(h / 2.0, &k2))?;
        let k4 = self.rhs(&s.axpy(h, &k3))?;
        let n = s.modes();
        let comb = |i: usize, f: fn(&(Vec<f64>, Vec<f64>)) -> &Vec<f64>| {
            (f(&k1)[i] + 2.0 * f(&k2)[i] + 2.0 * f(&k3)[i] + f(&k4)[i]) / 6.0
        };
        Ok(ClassicalState {
            phi: (0..n).map(|i| s.phi[i] + h * comb(i, |k| &k.0)).collect(),
            pi: (0..n).map(|i| s.pi[i] + h * comb(i, |k| &k.1)).collect(),
        })
    }

    /// Advances `s` by time `t` (negative runs backwards) in steps of `dt`.
    /// `|t|` must be a whole multiple of `dt`.
    pub fn integrate(&self, s: &ClassicalState, t: f64, dt: f64) -> Result<ClassicalState> {
        let steps = step_count(t, dt)?;
        let h = dt * t.signum();
        let mut cur = s.clone();
        for step in 0..steps {
            cur = self.rk4_step(&cur, h)?;
            if !cur.is_finite() {
                return Err(Error::NonFinite { step: step + 1 });
            }
        }
        Ok(cur)
    }
}

/// Number of steps of size `dt` covering `|t|`.
pub fn step_count(t: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument("t must be finite".into()));
    }
    let steps = (t.abs() / dt).round();
    if (steps * dt - t.abs()).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "t = {t} is not a multiple of dt = {dt}"
        )));
    }
    Ok(steps as usize)
}

/// `(φ̇, π̇)` from Hamilton's equations.
pub fn hamilton_rhs(h: &Poly, s: &ClassicalState) -> Result<(Vec<f64>, Vec<f64>)> {
    HamiltonianFlow::new(h)?.rhs(s)
}

/// Advances every member by RK4; weights are unchanged.
pub fn integrate_ensemble(h: &Poly, e: &Ensemble, t: f64, dt: f64) -> Result<Ensemble> {
    let flow = HamiltonianFlow::new(h)?;
    let members = e
        .members()
        .iter()
        .map(|(s, w)| Ok((flow.integrate(s, t, dt)?, *w)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble { members })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Bindings};

    fn h(text: &str) -> Poly {
        parse_poly(text, &Bindings::new()).unwrap()
    }

    #[test]
    fn vacuum_and_norm() {
        let s = FockSpace::new(1, 32).unwrap();
        let w = pseudo_wavefunction(&ClassicalState::single(0.0, 0.0), &s).unwrap();
        assert_eq!(w, FockVector::basis(&s, &[0]));
        let w = pseudo_wavefunction(&ClassicalState::single(0.9, -1.1), &s).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eigenrelation() {
        let s = FockSpace::new(2, 32).unwrap();
        let st = ClassicalState::new(vec![0.8, -0.3], vec![0.5, 1.2]).unwrap();
        let w = pseudo_wavefunction(&st, &s).unwrap();
        for (j, z) in st.z().into_iter().enumerate() {
            let aw = s.annihilator(j).apply(&w);
            assert!((&aw - &w.scale(z)).norm() < 1e-8);
        }
    }

    #[test]
    fn guard_names_mode() {
        let s = FockSpace::new(2, 8).unwrap();
        let st = ClassicalState::new(vec![0.1, 3.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            pseudo_wavefunction(&st, &s),
            Err(Error::AmplitudeOverflow { mode: 2, .. })
        ));
    }

    #[test]
    fn right_eigenrelation_and_sandwich() {
        let s = FockSpace::new(1, 32).unwrap();
        let st = ClassicalState::single(0.7, -0.4);
        let rho = pure_density(&st, &s).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
        let y = st.y()[0];
        let ad = s.creator(0);
        let lhs = rho.matrix() * &ad;
        let diff = &lhs - &rho.matrix().scale(y);
        assert!(diff.interior_max_diff(&FockMatrix::zeros(&s), 1) < 1e-8);

        // g = z² y: g ρ = a² ρ a†
        let z = st.z()[0];
        let a = s.annihilator(0);
        let sandwich = &(&(&a * &a) * rho.matrix()) * &ad;
        let scaled = rho.matrix().scale(z * z * y);
        assert!(sandwich.interior_max_diff(&scaled, 3) < 1e-8);
    }

    #[test]
    fn circle_ensemble_is_phase_averaged() {
        let s = FockSpace::new(1, 32).unwrap();
        let e = Ensemble::uniform_circle(64, 1.0).unwrap();
        let rho = ensemble_density(&e, &s).unwrap();
        assert!(rho.physically_realizable && rho.hermitian && rho.unit_trace);
        let mean = 0.5;
        let mut p = (-mean as f64).exp();
        for k in 0..32 {
            assert!((rho.matrix().data()[(k, k)].re - p).abs() < 1e-12);
            p *= mean / (k + 1) as f64;
        }
        let d = rho.matrix().data();
        let off = (0..32)
            .flat_map(|i| (0..32).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| d[(i, j)].norm())
            .fold(0.0, f64::max);
        assert!(off <= 1e-6);
        assert!(rho.min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn mixture_and_expectation() {
        let s = FockSpace::new(1, 32).unwrap();
        let a = ClassicalState::single(1.0, 0.0);
        let b = ClassicalState::single(-1.0, 0.0);
        let e = Ensemble::new(vec![(a.clone(), 0.5), (b.clone(), 0.5)]).unwrap();
        let rho = ensemble_density(&e, &s).unwrap();
        assert!(rho.hermitian && rho.unit_trace && rho.min_eigenvalue() >= -1e-10);

        let g = h("0.5*phi1^2 + 0.5*pi1^2");
        let st = ClassicalState::single(0.6, -0.8);
        let v = expectation(&pure_density(&st, &s).unwrap(), &g).unwrap();
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-8);

        let mix = expectation(&rho, &h("phi1^3 + pi1")).unwrap();
        let parts = 0.5 * expectation(&pure_density(&a, &s).unwrap(), &h("phi1^3 + pi1")).unwrap()
            + 0.5 * expectation(&pure_density(&b, &s).unwrap(), &h("phi1^3 + pi1")).unwrap();
        assert!((mix - parts).norm() < 1e-12);

        let vac = pure_density(&ClassicalState::single(0.0, 0.0), &s).unwrap();
        assert!(expectation(&vac, &h("phi1^2 + 3*phi1*pi1")).unwrap().norm() < 1e-15);
    }

    #[test]
    fn ensemble_validation_and_json() {
        let a = ClassicalState::single(1.0, 0.0);
        assert!(Ensemble::new(vec![(a.clone(), 0.7)]).is_err());
        assert!(Ensemble::new(vec![(a.clone(), -1.0), (a.clone(), 2.0)]).is_err());
        let e = Ensemble::normalized(vec![(a.clone(), 1.0), (ClassicalState::single(0.0, 2.0), 3.0)]).unwrap();
        assert_eq!(Ensemble::from_json(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn hamilton_examples() {
        let osc = h("0.5*phi1^2 + 0.5*pi1^2");
        let (dphi, dpi) = hamilton_rhs(&osc, &ClassicalState::single(1.0, 0.0)).unwrap();
        assert_eq!((dphi[0], dpi[0]), (0.0, -1.0));
        let m = 3.0;
        let bind: Bindings = [("m".to_string(), m)].into_iter().collect();
        let h112 = parse_poly("0.5*pi1^2 + 0.5*m*phi1^2", &bind).unwrap();
        let (_, dpi) = hamilton_rhs(&h112, &ClassicalState::single(0.4, 0.2)).unwrap();
        assert!((dpi[0] + m * 0.4).abs() < 1e-15);
        assert!(hamilton_rhs(&osc.to_zy().unwrap(), &ClassicalState::single(1.0, 0.0)).is_err());
    }

    #[test]
    fn rk4_rotation_energy_and_reversibility() {
        let osc = h("0.5*phi1^2 + 0.5*pi1^2");
        let flow = HamiltonianFlow::new(&osc).unwrap();
        let s0 = ClassicalState::single(1.0, 0.0);
        let quarter = std::f64::consts::FRAC_PI_2;
        // π/2 is not a multiple of 1e-3; integrate 1570 steps and finish with a partial one.
        let s1 = flow.integrate(&s0, 1.570, 1e-3).unwrap();
        let s1 = flow.rk4_step(&s1, quarter - 1.570).unwrap();
        assert!(s1.phi[0].abs() < 1e-8 && (s1.pi[0] + 1.0).abs() < 1e-8);

        let quartic = h("0.5*pi1^2 + 0.5*phi1^2 + 0.1*phi1^4");
        let flow = HamiltonianFlow::new(&quartic).unwrap();
        let s0 = ClassicalState::single(0.8, 0.3);
        let e0 = flow.energy(&s0).unwrap();
        let s10 = flow.integrate(&s0, 10.0, 1e-3).unwrap();
        assert!((flow.energy(&s10).unwrap() - e0).abs() < 1e-8);
        let back = flow.integrate(&s10, -10.0, 1e-3).unwrap();
        assert!((back.phi[0] - 0.8).abs() < 1e-7 && (back.pi[0] - 0.3).abs() < 1e-7);
        assert!(flow.integrate(&s0, 1.0, 0.3).is_err());
    }

    #[test]
    fn extended_vector_eigenrelations() {
        let s = FockSpace::new(2, 24).unwrap();
        let st = ClassicalState::single(0.6, 0.9);
        let w = extended_wavefunction(&st, &s).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-12);
        let (z, y) = (st.z()[0], st.y()[0]);
        assert!((&s.annihilator(0).apply(&w) - &w.scale(z)).norm() < 1e-8);
        assert!((&s.annihilator(1).apply(&w) - &w.scale(y)).norm() < 1e-8);
        let vac = extended_wavefunction(&ClassicalState::single(0.0, 0.0), &s).unwrap();
        assert_eq!(vac, FockVector::basis(&s, &[0, 0]));
    }
}
