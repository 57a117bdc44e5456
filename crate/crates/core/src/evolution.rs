//! The two competing generators for `ρ`: the quantum Liouville equation
//! `ρ̇ = −i[H_n, ρ]` and the free-space master equation
//!
//! ```text
//! ρ′  = i Σ_{j,α} C_α ( a_j [a_j†, H_αR] ρ H_αL − a_j† H_αR ρ [a_j, H_αL] )
//! ∂ρ  = ρ′ + ρ′†
//! ```
//!
//! with fixed-step RK4 in matrix space and the time-average projection.

use std::f64::consts::PI;

use log::debug;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ensemble::{step_count, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::HermitianEigen;
use crate::operator::{FockMatrix, FockSpace, HermitianPairing, OperatorWord};
use crate::poly::MultiIndex;
use crate::NormalForm;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// One sandwich `c · L ρ R`.
#[derive(Clone, Debug)]
struct Sandwich {
    c: Complex64,
    left: FockMatrix,
    right: FockMatrix,
}

impl Sandwich {
    fn apply(&self, rho: &FockMatrix) -> DMatrix<Complex64> {
        (self.left.data() * rho.data() * self.right.data()) * self.c
    }
}

/// Per-word ingredients of the master equation for a Hermitian `H_n`.
#[derive(Clone, Debug)]
pub struct MasterTerms {
    space: FockSpace,
    pairing: HermitianPairing,
    words: Vec<OperatorWord<Complex64>>,
    /// `[a_j†, H_αR]` indexed `[α][j]`.
    comm_right: Vec<Vec<NormalForm>>,
    /// `[a_j, H_αL]` indexed `[α][j]`.
    comm_left: Vec<Vec<NormalForm>>,
    prime: Vec<Sandwich>,
    unfolded_extra: Vec<Sandwich>,
}

impl MasterTerms {
    /// Refuses operators without a complete Hermitian pairing.
    pub fn new(hn: &NormalForm, space: &FockSpace) -> Result<Self> {
        let pairing = hn.hermitian_pairing().ok_or(Error::MissingPairing)?;
        if hn.modes() > space.modes() {
            return Err(Error::ModeMismatch {
                left: hn.modes(),
                right: space.modes(),
            });
        }
        let n = space.modes();
        let hn = hn.embed(n);
        let words: Vec<_> = hn.words().collect();
        let mut comm_right = Vec::with_capacity(words.len());
        let mut comm_left = Vec::with_capacity(words.len());
        let mut prime = Vec::new();
        let mut unfolded_extra = Vec::new();
        let zeros = MultiIndex::zeros(n);
        let one = Complex64::new(1.0, 0.0);
        for w in &words {
            let hl = NormalForm::word(n, one, w.create.clone(), zeros.clone());
            let hr = NormalForm::word(n, one, zeros.clone(), w.annih.clone());
            let hl_m = hl.realize(space)?;
            let hr_m = hr.realize(space)?;
            let mut cr = Vec::with_capacity(n);
            let mut cl = Vec::with_capacity(n);
            for j in 0..n {
                let a = NormalForm::annihilator(n, j);
                let ad = NormalForm::creator(n, j);
                let r = ad.commutator(&hr);
                let l = a.commutator(&hl);
                if !r.is_zero() {
                    prime.push(Sandwich {
                        c: I * w.coeff,
                        left: (&a * &r).realize(space)?,
                        right: hl_m.clone(),
                    });
                    unfolded_extra.push(Sandwich {
                        c: -I * w.coeff,
                        left: r.realize(space)?,
                        right: (&hl * &a).realize(space)?,
                    });
                }
                if !l.is_zero() {
                    prime.push(Sandwich {
                        c: -I * w.coeff,
                        left: (&ad * &hr).realize(space)?,
                        right: l.realize(space)?,
                    });
                    unfolded_extra.push(Sandwich {
                        c: I * w.coeff,
                        left: hr_m.clone(),
                        right: (&l * &ad).realize(space)?,
                    });
                }
                cr.push(r);
                cl.push(l);
            }
            comm_right.push(cr);
            comm_left.push(cl);
        }
        Ok(MasterTerms {
            space: *space,
            pairing,
            words,
            comm_right,
            comm_left,
            prime,
            unfolded_extra,
        })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn pairing(&self) -> &HermitianPairing {
        &self.pairing
    }

    pub fn words(&self) -> &[OperatorWord<Complex64>] {
        &self.words
    }

    /// `[a_j†, H_αR]`.
    pub fn comm_right(&self, alpha: usize, j: usize) -> &NormalForm {
        &self.comm_right[alpha][j]
    }

    /// `[a_j, H_αL]`.
    pub fn comm_left(&self, alpha: usize, j: usize) -> &NormalForm {
        &self.comm_left[alpha][j]
    }

    fn check(&self, rho: &FockMatrix) -> Result<()> {
        if rho.space() != &self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }

    /// `ρ′` alone.
    pub fn rho_prime(&self, rho: &FockMatrix) -> Result<FockMatrix> {
        self.check(rho)?;
        let d = self.space.dim();
        let mut acc = DMatrix::zeros(d, d);
        for s in &self.prime {
            acc += s.apply(rho);
        }
        FockMatrix::from_data(&self.space, acc)
    }

    /// The same generator written as `ρ′` plus the second sum of the
    /// unfolded form, in which terms are not termwise adjoints of `ρ′`.
    pub fn unfolded_rhs(&self, rho: &FockMatrix) -> Result<FockMatrix> {
        let mut out = self.rho_prime(rho)?;
        for s in &self.unfolded_extra {
            *out.data_mut() += s.apply(rho);
        }
        Ok(out)
    }
}

/// `−i(H_n ρ − ρ H_n)`.
pub fn liouville_rhs(rho: &FockMatrix, hn: &FockMatrix) -> Result<FockMatrix> {
    if rho.space() != hn.space() {
        return Err(Error::DimensionMismatch {
            expected: hn.dim(),
            found: rho.dim(),
        });
    }
    let c = hn.data() * rho.data() - rho.data() * hn.data();
    FockMatrix::from_data(rho.space(), c * -I)
}

/// `ρ′ + ρ′†`. Non-Hermitian and non-realizable inputs are accepted.
pub fn master_rhs(rho: &FockMatrix, terms: &MasterTerms) -> Result<FockMatrix> {
    let p = terms.rho_prime(rho)?;
    Ok(&p + &p.dagger())
}

/// Time generator for [`evolve_density`].
#[derive(Clone, Debug)]
pub enum Generator {
    Liouville(FockMatrix),
    Master(Box<MasterTerms>),
}

impl Generator {
    pub fn liouville(hn: &NormalForm, space: &FockSpace) -> Result<Self> {
        Ok(Generator::Liouville(hn.embed(space.modes()).realize(space)?))
    }

    pub fn master(hn: &NormalForm, space: &FockSpace) -> Result<Self> {
        Ok(Generator::Master(Box::new(MasterTerms::new(hn, space)?)))
    }

    pub fn rhs(&self, rho: &FockMatrix) -> Result<FockMatrix> {
        match self {
            Generator::Liouville(h) => liouville_rhs(rho, h),
            Generator::Master(t) => master_rhs(rho, t),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Generator::Liouville(_) => "liouville",
            Generator::Master(_) => "master",
        }
    }
}

/// Outcome of [`evolve_density`].
#[derive(Clone, Debug)]
pub struct Evolution {
    pub rho: DensityMatrix,
    /// Largest `max|ρ − ρ†|` seen after a step, before symmetrization.
    pub max_asymmetry: f64,
    /// Largest `|Tr ρ(t) − Tr ρ(0)|` seen.
    pub max_trace_drift: f64,
    pub steps: usize,
}

/// One RK4 step of size `h`.
pub fn rk4_step(gen: &Generator, rho: &FockMatrix, h: f64) -> Result<FockMatrix> {
    let half = Complex64::new(h / 2.0, 0.0);
    let full = Complex64::new(h, 0.0);
    let k1 = gen.rhs(rho)?;
    let k2 = gen.rhs(&(rho + &k1.scale(half)))?;
    let k3 = gen.rhs(&(rho + &k2.scale(half)))?;
    let k4 = gen.rhs(&(rho + &k3.scale(full)))?;
    let sum = &(&(&k1 + &k2.scale(Complex64::new(2.0, 0.0))) + &k3.scale(Complex64::new(2.0, 0.0))) + &k4;
    Ok(rho + &sum.scale(Complex64::new(h / 6.0, 0.0)))
}

/// RK4 in matrix space with per-step Hermitian symmetrization. `observe` is
/// called with `(step, t, ρ)` at step 0 and after every step.
pub fn evolve_observed(
    rho0: &DensityMatrix,
    gen: &Generator,
    t: f64,
    dt: f64,
    mut observe: impl FnMut(usize, f64, &FockMatrix),
) -> Result<Evolution> {
    let steps = step_count(t, dt)?;
    let h = dt * t.signum();
    let tr0 = rho0.trace();
    let mut rho = rho0.matrix().clone();
    let mut max_asymmetry = 0.0f64;
    let mut max_trace_drift = 0.0f64;
    observe(0, 0.0, &rho);
    for step in 1..=steps {
        rho = rk4_step(gen, &rho, h)?;
        if rho.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        max_asymmetry = max_asymmetry.max(rho.max_asymmetry());
        rho = rho.hermitian_part();
        max_trace_drift = max_trace_drift.max((rho.trace() - tr0).norm());
        observe(step, step as f64 * h, &rho);
    }
    debug!(
        "{} evolution: {steps} steps, max asymmetry {max_asymmetry:.3e}, max trace drift {max_trace_drift:.3e}",
        gen.name()
    );
    let mut out = DensityMatrix::from_matrix(rho);
    out.physically_realizable = false;
    Ok(Evolution {
        rho: out,
        max_asymmetry,
        max_trace_drift,
        steps,
    })
}

pub fn evolve_density(rho0: &DensityMatrix, gen: &Generator, t: f64, dt: f64) -> Result<Evolution> {
    evolve_observed(rho0, gen, t, dt, |_, _, _| {})
}

/// Default quadrature step for a window of length `delta`.
pub fn default_projection_step(delta: f64) -> f64 {
    0.01f64.min(delta / 1000.0)
}

/// Trapezoid average of `e^{iωt}` over `[0, Δ]` with `steps` panels.
fn trapezoid_phase_average(omega: f64, delta: f64, steps: usize) -> Complex64 {
    let h = delta / steps as f64;
    let x = omega * h;
    if x.abs() < 1e-6 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=steps {
            let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
            acc += Complex64::from_polar(w, x * k as f64);
        }
        return acc * h / delta;
    }
    // Σ_{k=0}^{N} r^k − (1 + r^N)/2 with r = e^{ix}
    let r = Complex64::from_polar(1.0, x);
    let rn = Complex64::from_polar(1.0, x * steps as f64);
    let geometric = (Complex64::new(1.0, 0.0) - rn * r) / (Complex64::new(1.0, 0.0) - r);
    (geometric - (Complex64::new(1.0, 0.0) + rn) * 0.5) * h / delta
}

/// Eigenbasis of `H_n` used by the projection.
#[derive(Clone, Debug)]
pub struct EnergyBasis {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl EnergyBasis {
    pub fn new(hn: &FockMatrix) -> Self {
        let (values, vectors) = HermitianEigen::new(hn.data()).basis();
        EnergyBasis {
            values: values.iter().cloned().collect(),
            vectors,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// `V† ρ V`.
    pub fn to_energy(&self, rho: &FockMatrix) -> DMatrix<Complex64> {
        self.vectors.adjoint() * rho.data() * &self.vectors
    }

    /// Smallest gap between distinct eigenvalues (spacing above `tol`).
    pub fn min_gap(&self, tol: f64) -> Option<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v.windows(2)
            .map(|w| w[1] - w[0])
            .filter(|&g| g > tol)
            .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |a| a.min(g))))
    }

    /// Largest `|ρ̃_jk|` over pairs with `|λ_j − λ_k| > tol`, in the energy
    /// basis.
    pub fn max_coherence(&self, rho: &FockMatrix, tol: f64) -> f64 {
        let r = self.to_energy(rho);
        let d = self.values.len();
        let mut worst = 0.0f64;
        for j in 0..d {
            for k in 0..d {
                if (self.values[j] - self.values[k]).abs() > tol {
                    worst = worst.max(r[(j, k)].norm());
                }
            }
        }
        worst
    }

    /// Trapezoid quadrature of `(1/Δ)∫ e^{i(H−E)t} ρ e^{−i(H−E)t} dt`,
    /// divided by its trace. `E` cancels between the two exponentials.
    pub fn project(&self, rho: &FockMatrix, delta: f64, dt: f64) -> Result<DensityMatrix> {
        if !(delta > 0.0) || !(dt > 0.0) {
            return Err(Error::InvalidArgument("delta and dt must be positive".into()));
        }
        let steps = (delta / dt).ceil().max(1.0) as usize;
        let mut r = self.to_energy(rho);
        let d = self.values.len();
        for j in 0..d {
            for k in 0..d {
                let omega = self.values[j] - self.values[k];
                if omega != 0.0 {
                    r[(j, k)] *= trapezoid_phase_average(omega, delta, steps);
                }
            }
        }
        let back = &self.vectors * r * self.vectors.adjoint();
        let tr = back.trace();
        if tr.norm() == 0.0 {
            return Err(Error::InvalidArgument("projected matrix has zero trace".into()));
        }
        let m = FockMatrix::from_data(rho.space(), back / tr)?;
        Ok(DensityMatrix::from_matrix(m))
    }
}

/// Time-average projection of `ρ` over `[0, Δ]`, trace-normalized. `energy`
/// only shifts `H_n` and drops out; it is accepted for completeness.
pub fn time_average_project(
    rho: &DensityMatrix,
    hn: &FockMatrix,
    energy: f64,
    delta: f64,
    dt: Option<f64>,
) -> Result<DensityMatrix> {
    let _ = energy;
    let dt = dt.unwrap_or_else(|| default_projection_step(delta));
    EnergyBasis::new(hn).project(rho.matrix(), delta, dt)
}

/// Decay of inter-eigenspace coherences under the projection.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayPoint {
    pub delta: f64,
    /// Largest coherence at exactly `Δ`, relative to the unprojected one.
    pub pointwise: f64,
    /// Largest relative coherence over `Δ' ∈ [Δ, Δ + 2π/ω_min]`.
    pub envelope: f64,
}

/// Measures [`DecayPoint`]s; the envelope window is sampled at `samples`
/// points.
pub fn projection_decay(
    rho: &FockMatrix,
    hn: &FockMatrix,
    deltas: &[f64],
    samples: usize,
) -> Result<Vec<DecayPoint>> {
    let basis = EnergyBasis::new(hn);
    let tol = 1e-9;
    let initial = basis.max_coherence(rho, tol);
    if initial == 0.0 {
        return Err(Error::InvalidArgument("state has no coherences to decay".into()));
    }
    let window = 2.0 * PI / basis.min_gap(tol).unwrap_or(1.0);
    deltas
        .iter()
        .map(|&delta| {
            let measure = |d: f64| -> Result<f64> {
                let p = basis.project(rho, d, default_projection_step(d))?;
                Ok(basis.max_coherence(p.matrix(), tol) / initial)
            };
            let pointwise = measure(delta)?;
            let mut envelope = pointwise;
            for s in 1..=samples {
                envelope = envelope.max(measure(delta + window * s as f64 / samples as f64)?);
            }
            Ok(DecayPoint {
                delta,
                pointwise,
                envelope,
            })
        })
        .collect()
}

/// Least-squares `C` in `y ≈ C/Δ` on a log scale (geometric mean of
/// `y·Δ`) and the worst ratio `max(y/(C/Δ), (C/Δ)/y)`.
pub fn inverse_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let logc = points.iter().map(|(d, y)| (y * d).ln()).sum::<f64>() / points.len() as f64;
    let c = logc.exp();
    let worst = points
        .iter()
        .map(|(d, y)| {
            let r = y / (c / d);
            r.max(1.0 / r)
        })
        .fold(1.0, f64::max);
    (c, worst)
}

/// Spectrum of the master generator as a real-linear map on Hermitian
/// matrices (the map `ρ ↦ ρ′ + ρ′†` is not complex-linear). Only meant for
/// tiny spaces.
pub fn master_spectrum(terms: &MasterTerms) -> Result<Vec<Complex64>> {
    let space = *terms.space();
    let d = space.dim();
    if d > 12 {
        return Err(Error::InvalidArgument(format!(
            "superoperator spectrum limited to dimension 12, got {d}"
        )));
    }
    // Real coordinates of a Hermitian matrix: diagonal, then Re and Im of
    // the strict upper triangle.
    let upper: Vec<(usize, usize)> = (0..d).flat_map(|i| ((i + 1)..d).map(move |j| (i, j))).collect();
    let dim = d + 2 * upper.len();
    let basis = |k: usize| -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(d, d);
        if k < d {
            m[(k, k)] = Complex64::new(1.0, 0.0);
        } else if k < d + upper.len() {
            let (i, j) = upper[k - d];
            m[(i, j)] = Complex64::new(1.0, 0.0);
            m[(j, i)] = Complex64::new(1.0, 0.0);
        } else {
            let (i, j) = upper[k - d - upper.len()];
            m[(i, j)] = Complex64::new(0.0, 1.0);
            m[(j, i)] = Complex64::new(0.0, -1.0);
        }
        m
    };
    let coords = |m: &DMatrix<Complex64>| -> Vec<f64> {
        let mut v: Vec<f64> = (0..d).map(|i| m[(i, i)].re).collect();
        v.extend(upper.iter().map(|&(i, j)| m[(i, j)].re));
        v.extend(upper.iter().map(|&(i, j)| m[(i, j)].im));
        v
    };
    let mut sup = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        let rho = FockMatrix::from_data(&space, basis(k))?;
        let out = master_rhs(&rho, terms)?;
        for (r, v) in coords(out.data()).into_iter().enumerate() {
            sup[(r, k)] = v;
        }
    }
    Ok(sup.complex_eigenvalues().iter().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{pure_density, ClassicalState};
    use crate::operator::poly_to_normal_form;
    use crate::poly::{parse_poly, Bindings};

    fn nf(text: &str) -> NormalForm {
        poly_to_normal_form(&parse_poly(text, &Bindings::new()).unwrap()).unwrap()
    }

    #[test]
    fn refuses_unpaired_operator() {
        let s = FockSpace::new(1, 8).unwrap();
        let a2 = NormalForm::annihilator(1, 0).pow(2);
        assert!(matches!(MasterTerms::new(&a2, &s), Err(Error::MissingPairing)));
    }

    #[test]
    fn precomputed_commutators_match() {
        let s = FockSpace::new(2, 6).unwrap();
        let h = nf("phi1^2*pi2 + pi1*pi2 + phi2^3");
        let t = MasterTerms::new(&h, &s).unwrap();
        let n = 2;
        for (alpha, w) in t.words().iter().enumerate() {
            let one = Complex64::new(1.0, 0.0);
            let hr = NormalForm::word(n, one, MultiIndex::zeros(n), w.annih.clone());
            let hl = NormalForm::word(n, one, w.create.clone(), MultiIndex::zeros(n));
            for j in 0..n {
                assert_eq!(t.comm_right(alpha, j), &NormalForm::creator(n, j).commutator(&hr));
                assert_eq!(t.comm_left(alpha, j), &NormalForm::annihilator(n, j).commutator(&hl));
            }
            let p = t.pairing().partner[alpha];
            assert_eq!(t.pairing().partner[p], alpha);
        }
    }

    #[test]
    fn number_operator_rotates_coherent_state() {
        let s = FockSpace::new(1, 32).unwrap();
        let h = nf("0.5*phi1^2 + 0.5*pi1^2");
        let hm = h.realize(&s).unwrap();
        let st = ClassicalState::single(1.0, 0.0);
        let rho = pure_density(&st, &s).unwrap();
        let dt = 1e-4;
        let rot = |t: f64| {
            let z = st.z()[0] * Complex64::from_polar(1.0, -t);
            pure_density(&ClassicalState::from_z(&[z]), &s).unwrap().into_matrix()
        };
        let fd = (&rot(dt) - &rot(-dt)).scale(Complex64::new(0.5 / dt, 0.0));
        let l = liouville_rhs(rho.matrix(), &hm).unwrap();
        assert!((&fd - &l).max_abs() < 1e-6);
        let terms = MasterTerms::new(&h, &s).unwrap();
        let m = master_rhs(rho.matrix(), &terms).unwrap();
        assert!(m.interior_max_diff(&l, 2) < 1e-8);

        let diag = FockMatrix::from_data(&s, DMatrix::from_diagonal(&rho.matrix().data().diagonal())).unwrap();
        assert!(liouville_rhs(&diag, &hm).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn unfolded_form_agrees_on_hermitian_input() {
        let s = FockSpace::new(1, 16).unwrap();
        let h = nf("phi1^3 + 0.5*pi1^2 - 0.3*phi1*pi1^2");
        let terms = MasterTerms::new(&h, &s).unwrap();
        let rho = pure_density(&ClassicalState::single(0.5, -0.7), &s).unwrap();
        let a = master_rhs(rho.matrix(), &terms).unwrap();
        let b = terms.unfolded_rhs(rho.matrix()).unwrap();
        assert!(a.interior_max_diff(&b, 4) < 1e-12);
    }

    #[test]
    fn periodic_liouville_evolution() {
        let s = FockSpace::new(1, 12).unwrap();
        let h = nf("0.5*phi1^2 + 0.5*pi1^2");
        let rho = pure_density(&ClassicalState::single(0.8, 0.2), &s).unwrap();
        let gen = Generator::liouville(&h, &s).unwrap();
        let two_pi = 2.0 * PI;
        let steps = 2000;
        let ev = evolve_density(&rho, &gen, two_pi, two_pi / steps as f64).unwrap();
        assert_eq!(ev.steps, steps);
        assert!((ev.rho.matrix() - rho.matrix()).max_abs() < 1e-6);
        assert!(ev.max_trace_drift < 1e-10);
    }

    #[test]
    fn projection_commuting_and_trace() {
        let s = FockSpace::new(1, 16).unwrap();
        let hm = nf("0.5*phi1^2 + 0.5*pi1^2").realize(&s).unwrap();
        let rho = pure_density(&ClassicalState::single(1.0, 0.0), &s).unwrap();
        let diag = DensityMatrix::from_matrix(
            FockMatrix::from_data(&s, DMatrix::from_diagonal(&rho.matrix().data().diagonal())).unwrap(),
        );
        let p = time_average_project(&diag, &hm, 0.5, 7.0, None).unwrap();
        assert!((p.matrix() - &diag.matrix().scale(Complex64::new(1.0 / diag.trace().re, 0.0))).max_abs() < 1e-12);
        let q = time_average_project(&rho, &hm, 0.5, 200.0, None).unwrap();
        assert!((q.trace().re - 1.0).abs() < 1e-10);
        let basis = EnergyBasis::new(&hm);
        let ratio = basis.max_coherence(q.matrix(), 1e-9) / basis.max_coherence(rho.matrix(), 1e-9);
        assert!(ratio <= 3.0 / 200.0, "{ratio}");
    }

    #[test]
    fn trapezoid_average_closed_form() {
        let direct = |omega: f64, delta: f64, n: usize| {
            let h = delta / n as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..=n {
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                acc += Complex64::from_polar(w, omega * h * k as f64);
            }
            acc * h / delta
        };
        for &(om, d, n) in &[(1.0, 50.0, 5000usize), (-3.0, 7.5, 750), (1e-9, 2.0, 10)] {
            assert!((trapezoid_phase_average(om, d, n) - direct(om, d, n)).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_fit_recovers_constant() {
        let pts = [(50.0, 0.1 / 50.0), (100.0, 0.1 / 100.0), (200.0, 0.1 / 200.0)];
        let (c, worst) = inverse_fit(&pts);
        assert!((c - 0.1).abs() < 1e-12 && (worst - 1.0).abs() < 1e-12);
    }
}
