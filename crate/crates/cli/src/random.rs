//! Seeded random inputs. Every sub-check draws from its own ChaCha stream
//! of the suite seed, so results do not depend on scheduling.

use fockflux::ensemble::ClassicalState;
use fockflux::operator::{FockMatrix, FockSpace};
use fockflux::poly::{Chart, MultiIndex};
use fockflux::scalar::Coefficient;
use fockflux::{Complex64, ExactComplex, ExactNormalForm, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Real polynomial in `(φ, π)` with each monomial of degree `≤ max_degree`
/// present with probability `density` and a coefficient in `[−1, 1]`.
pub fn real_poly(rng: &mut impl Rng, modes: usize, max_degree: u32, density: f64) -> Poly {
    let mut terms = Vec::new();
    for k in MultiIndex::enumerate(2 * modes, 0, max_degree) {
        if rng.random::<f64>() < density {
            terms.push((k, Complex64::new(rng.random_range(-1.0..=1.0), 0.0)));
        }
    }
    Poly::from_terms(Chart::PhiPi, modes, terms)
}

/// Like [`real_poly`] but with at least one term of the top degree.
pub fn real_poly_of_degree(rng: &mut impl Rng, modes: usize, degree: u32, density: f64) -> Poly {
    loop {
        let p = real_poly(rng, modes, degree, density);
        if p.degree() == degree {
            return p;
        }
    }
}

/// State with every `|z_j| ≤ radius`, uniform on the disk.
pub fn state(rng: &mut impl Rng, modes: usize, radius: f64) -> ClassicalState {
    let z: Vec<Complex64> = (0..modes)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    ClassicalState::from_z(&z)
}

/// Hermitian matrix with entries of unit scale, generally indefinite.
pub fn hermitian(rng: &mut impl Rng, space: &FockSpace) -> FockMatrix {
    let d = space.dim();
    let mut m = FockMatrix::zeros(space);
    for j in 0..d {
        for i in 0..=j {
            let z = if i == j {
                Complex64::new(rng.random_range(-1.0..=1.0), 0.0)
            } else {
                Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
            };
            m.data_mut()[(i, j)] = z;
            m.data_mut()[(j, i)] = z.conj();
        }
    }
    m
}

/// Normal-ordered operator with words of total degree `≤ max_degree` and
/// small rational coefficients.
pub fn exact_operator(rng: &mut impl Rng, modes: usize, max_degree: u32, terms: usize) -> ExactNormalForm {
    let mut op = ExactNormalForm::zero(modes);
    let pool = MultiIndex::enumerate(2 * modes, 1, max_degree);
    for _ in 0..terms {
        let k = &pool[rng.random_range(0..pool.len())];
        let create = MultiIndex::from_vec(k.as_slice()[..modes].to_vec());
        let annih = MultiIndex::from_vec(k.as_slice()[modes..].to_vec());
        let num = rng.random_range(-6i64..=6);
        let den = rng.random_range(1i64..=4);
        let im = rng.random_range(-2i64..=2);
        let c = ExactComplex::from_ratio(num, den) + ExactComplex::imag_unit() * ExactComplex::from_ratio(im, den);
        op = &op + &ExactNormalForm::word(modes, c, create, annih);
    }
    op
}
