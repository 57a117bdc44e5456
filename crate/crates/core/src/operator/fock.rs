//! Dense realization in the Fock space truncated at `D` quanta per mode.
//!
//! Basis states `|k_1 … k_n⟩` are laid out with mode 1 as the slowest index:
//! `index = Σ_j k_j · D^{n−1−j}`. Ladder matrices are the truncated ones, so
//! `a†|D−1⟩ = 0` and identities only hold away from the top occupations.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NormalFormOperator;
use crate::error::{Error, Result};
use crate::scalar::Coefficient;

/// Default bound on the Fock dimension `D^n`.
pub const DEFAULT_DIM_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    modes: usize,
    cutoff: usize,
}

impl FockSpace {
    pub fn new(modes: usize, cutoff: usize) -> Result<Self> {
        Self::with_cap(modes, cutoff, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(modes: usize, cutoff: usize, cap: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidArgument("mode count must be positive".into()));
        }
        if cutoff < 2 {
            return Err(Error::CutoffTooSmall { cutoff, min: 2 });
        }
        match cutoff.checked_pow(modes as u32) {
            Some(dim) if dim <= cap => Ok(FockSpace { modes, cutoff }),
            Some(dim) => Err(Error::DimensionCap { dim, cap }),
            None => Err(Error::DimensionCap { dim: usize::MAX, cap }),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff.pow(self.modes as u32)
    }

    pub fn index(&self, occ: &[usize]) -> usize {
        debug_assert_eq!(occ.len(), self.modes);
        occ.iter().fold(0, |acc, &k| acc * self.cutoff + k)
    }

    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.modes];
        for j in (0..self.modes).rev() {
            occ[j] = index % self.cutoff;
            index /= self.cutoff;
        }
        occ
    }

    /// True when every occupation of basis state `index` is at most
    /// `D − 1 − margin`.
    pub fn is_interior(&self, index: usize, margin: usize) -> bool {
        self.occupations(index)
            .iter()
            .all(|&k| k + margin < self.cutoff)
    }

    pub fn annihilator(&self, j: usize) -> FockMatrix {
        NormalFormOperator::<Complex64>::annihilator(self.modes, j)
            .realize(self)
            .expect("mode index within space")
    }

    pub fn creator(&self, j: usize) -> FockMatrix {
        NormalFormOperator::<Complex64>::creator(self.modes, j)
            .realize(self)
            .expect("mode index within space")
    }

    fn check(&self, other: &FockSpace) {
        assert_eq!(self, other, "operands live in different Fock spaces");
    }
}

/// `sqrt(hi! / lo!)` for `lo ≤ hi`.
fn sqrt_falling(hi: usize, lo: usize) -> f64 {
    ((lo + 1)..=hi).map(|i| i as f64).product::<f64>().sqrt()
}

impl<C: Coefficient> NormalFormOperator<C> {
    fn check_space(&self, space: &FockSpace) -> Result<()> {
        if self.modes() > space.modes {
            return Err(Error::ModeMismatch {
                left: self.modes(),
                right: space.modes,
            });
        }
        Ok(())
    }

    /// Calls `f(row, amplitude)` for each nonzero entry of column `col`.
    fn column_entries(&self, space: &FockSpace, col: usize, mut f: impl FnMut(usize, Complex64)) {
        let occ = space.occupations(col);
        let n = self.modes();
        'words: for ((p, q), c) in &self.words {
            let mut amp = 1.0;
            let mut out = occ.clone();
            for j in 0..n {
                let (pj, qj) = (p.get(j) as usize, q.get(j) as usize);
                if occ[j] < qj {
                    continue 'words;
                }
                let mid = occ[j] - qj;
                let top = mid + pj;
                if top >= space.cutoff {
                    continue 'words;
                }
                amp *= sqrt_falling(occ[j], mid) * sqrt_falling(top, mid);
                out[j] = top;
            }
            f(space.index(&out), c.to_complex64() * amp);
        }
    }

    /// Dense matrix of the operator at the space's cutoff. Entries equal the
    /// product of truncated ladder matrices taken in normal order.
    pub fn realize(&self, space: &FockSpace) -> Result<FockMatrix> {
        self.check_space(space)?;
        let dim = space.dim();
        let mut data = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            self.column_entries(space, col, |row, v| data[(row, col)] += v);
        }
        Ok(FockMatrix { space: *space, data })
    }

    /// Applies the operator to a vector without forming its matrix.
    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        self.check_space(&v.space)?;
        let mut out = DVector::zeros(v.data.len());
        for (col, &x) in v.data.iter().enumerate() {
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            self.column_entries(&v.space, col, |row, a| out[row] += a * x);
        }
        Ok(FockVector {
            space: v.space,
            data: out,
        })
    }
}

/// Dense complex matrix over a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockMatrix {
    pub(crate) space: FockSpace,
    pub(crate) data: DMatrix<Complex64>,
}

impl FockMatrix {
    pub fn zeros(space: &FockSpace) -> Self {
        let d = space.dim();
        FockMatrix {
            space: *space,
            data: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(space: &FockSpace) -> Self {
        let d = space.dim();
        FockMatrix {
            space: *space,
            data: DMatrix::identity(d, d),
        }
    }

    pub fn from_data(space: &FockSpace, data: DMatrix<Complex64>) -> Result<Self> {
        let d = space.dim();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: data.nrows().max(data.ncols()),
            });
        }
        Ok(FockMatrix {
            space: *space,
            data,
        })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.data
    }

    pub fn into_data(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn dagger(&self) -> Self {
        FockMatrix {
            space: self.space,
            data: self.data.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        FockMatrix {
            space: self.space,
            data: &self.data * c,
        }
    }

    /// `max |A − A†|` entrywise.
    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        FockMatrix {
            space: self.space,
            data: (&self.data + self.data.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference restricted to rows and columns whose
    /// occupations stay `margin` below the cutoff.
    pub fn interior_max_diff(&self, other: &FockMatrix, margin: usize) -> f64 {
        self.space.check(&other.space);
        let interior: Vec<usize> = (0..self.dim())
            .filter(|&i| self.space.is_interior(i, margin))
            .collect();
        let mut worst = 0.0f64;
        for &j in &interior {
            for &i in &interior {
                worst = worst.max((self.data[(i, j)] - other.data[(i, j)]).norm());
            }
        }
        worst
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.data
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        self.space.check(&v.space);
        FockVector {
            space: self.space,
            data: &self.data * &v.data,
        }
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &FockMatrix) -> Complex64 {
        self.space.check(&other.space);
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self.data[(i, k)] * other.data[(k, i)];
            }
        }
        acc
    }
}

impl Add for &FockMatrix {
    type Output = FockMatrix;

    fn add(self, rhs: &FockMatrix) -> FockMatrix {
        self.space.check(&rhs.space);
        FockMatrix {
            space: self.space,
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &FockMatrix {
    type Output = FockMatrix;

    fn sub(self, rhs: &FockMatrix) -> FockMatrix {
        self.space.check(&rhs.space);
        FockMatrix {
            space: self.space,
            data: &self.data - &rhs.data,
        }
    }
}

impl Mul for &FockMatrix {
    type Output = FockMatrix;

    fn mul(self, rhs: &FockMatrix) -> FockMatrix {
        self.space.check(&rhs.space);
        FockMatrix {
            space: self.space,
            data: &self.data * &rhs.data,
        }
    }
}

/// Dense complex vector over a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    pub(crate) space: FockSpace,
    pub(crate) data: DVector<Complex64>,
}

impl FockVector {
    pub fn zeros(space: &FockSpace) -> Self {
        FockVector {
            space: *space,
            data: DVector::zeros(space.dim()),
        }
    }

    /// Number state `|k_1 … k_n⟩`.
    pub fn basis(space: &FockSpace, occ: &[usize]) -> Self {
        let mut v = Self::zeros(space);
        v.data[space.index(occ)] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_data(space: &FockSpace, data: DVector<Complex64>) -> Result<Self> {
        if data.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: data.len(),
            });
        }
        Ok(FockVector {
            space: *space,
            data,
        })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn data(&self) -> &DVector<Complex64> {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.space.check(&other.space);
        self.data.dotc(&other.data)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        FockVector {
            space: self.space,
            data: &self.data * c,
        }
    }

    pub fn normalized(&self) -> Self {
        self.scale(Complex64::new(1.0 / self.norm(), 0.0))
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> FockMatrix {
        FockMatrix {
            space: self.space,
            data: &self.data * self.data.adjoint(),
        }
    }

    /// Largest entry magnitude over basis states at least `margin` below
    /// the cutoff.
    pub fn interior_max_abs(&self, margin: usize) -> f64 {
        self.data
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.is_interior(*i, margin))
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }
}

impl Sub for &FockVector {
    type Output = FockVector;

    fn sub(self, rhs: &FockVector) -> FockVector {
        self.space.check(&rhs.space);
        FockVector {
            space: self.space,
            data: &self.data - &rhs.data,
        }
    }
}

impl Add for &FockVector {
    type Output = FockVector;

    fn add(self, rhs: &FockVector) -> FockVector {
        self.space.check(&rhs.space);
        FockVector {
            space: self.space,
            data: &self.data + &rhs.data,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiIndex;
    use crate::NormalForm;

    fn cx(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ladder_matrices() {
        let s = FockSpace::new(1, 3).unwrap();
        let a = s.annihilator(0);
        let expect = DMatrix::from_row_slice(
            3,
            3,
            &[
                cx(0.0), cx(1.0), cx(0.0),
                cx(0.0), cx(0.0), cx(2f64.sqrt()),
                cx(0.0), cx(0.0), cx(0.0),
            ],
        );
        assert_eq!(a.data, expect);
        let n = NormalForm::word(1, cx(1.0), MultiIndex::from(vec![1]), MultiIndex::from(vec![1]));
        let nm = n.realize(&s).unwrap();
        assert!((&nm.data - DMatrix::from_diagonal(&DVector::from_vec(vec![cx(0.0), cx(1.0), cx(2.0)])))
            .iter()
            .all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn mode_one_is_slowest() {
        let s = FockSpace::new(2, 3).unwrap();
        assert_eq!(s.index(&[1, 0]), 3);
        assert_eq!(s.occupations(5), vec![1, 2]);
        let a2 = s.annihilator(1);
        // a_2 |0,1⟩ = |0,0⟩
        assert_eq!(a2.data[(0, 1)], cx(1.0));
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(FockSpace::new(3, 17), Err(Error::DimensionCap { dim: 4913, cap: 4096 })));
        assert!(FockSpace::new(2, 64).is_ok());
        assert!(matches!(FockSpace::new(1, 1), Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn realize_matches_truncated_products() {
        let s = FockSpace::new(2, 6).unwrap();
        let a = s.annihilator(0);
        let b = s.annihilator(1);
        let ad = a.dagger();
        let bd = b.dagger();
        let word = NormalForm::word(2, Complex64::new(0.5, -1.0), MultiIndex::from(vec![2, 1]), MultiIndex::from(vec![1, 3]));
        let dense = &(&(&(&(&ad * &ad) * &bd) * &a) * &(&(&b * &b) * &b)).scale(Complex64::new(0.5, -1.0));
        let diff = &word.realize(&s).unwrap() - dense;
        assert!(diff.max_abs() < 1e-12);
        let v = FockVector::basis(&s, &[2, 4]);
        let applied = word.apply(&v).unwrap();
        assert!((&applied - &dense.apply(&v)).norm() < 1e-12);
    }
}
