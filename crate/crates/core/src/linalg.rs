//! Hermitian eigendecomposition and functions of Hermitian matrices.
//!
//! Generators used here (squeezing, pair creation, number-conserving
//! Hamiltonians) are block diagonal under a symmetry, so matrices are first
//! split into connected components of their sparsity pattern and each block
//! is diagonalized on its own.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Index sets of the connected components of the graph with an edge `i–j`
/// whenever `m[(i, j)]` or `m[(j, i)]` is nonzero.
pub fn components(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let d = m.nrows();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for j in 0..d {
        for i in 0..d {
            if i != j && m[(i, j)].norm() > 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..d {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Eigendecomposition of a Hermitian matrix, stored per block.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    dim: usize,
    blocks: Vec<Block>,
}

#[derive(Clone, Debug)]
struct Block {
    indices: Vec<usize>,
    values: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    /// Only the lower triangle of `m` is read by the eigensolver; callers
    /// pass matrices that are Hermitian to rounding.
    pub fn new(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "square matrix required");
        let blocks = components(m)
            .into_iter()
            .map(|indices| {
                let k = indices.len();
                let sub = DMatrix::from_fn(k, k, |r, c| m[(indices[r], indices[c])]);
                let eig = SymmetricEigen::new(sub);
                Block {
                    indices,
                    values: eig.eigenvalues,
                    vectors: eig.eigenvectors,
                }
            })
            .collect();
        HermitianEigen {
            dim: m.nrows(),
            blocks,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.blocks.iter().flat_map(|b| b.values.iter().cloned()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `f(M) = V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let scaled = DMatrix::from_fn(b.vectors.nrows(), b.vectors.ncols(), |r, c| {
                b.vectors[(r, c)] * f(b.values[c])
            });
            let sub = scaled * b.vectors.adjoint();
            for (r, &i) in b.indices.iter().enumerate() {
                for (c, &j) in b.indices.iter().enumerate() {
                    out[(i, j)] = sub[(r, c)];
                }
            }
        }
        out
    }

    /// Full eigenvector matrix (columns) and matching eigenvalues. Column
    /// order follows the block order.
    pub fn basis(&self) -> (DVector<f64>, DMatrix<Complex64>) {
        let mut values = DVector::zeros(self.dim);
        let mut vectors = DMatrix::zeros(self.dim, self.dim);
        let mut col = 0;
        for b in &self.blocks {
            for c in 0..b.values.len() {
                values[col] = b.values[c];
                for (r, &i) in b.indices.iter().enumerate() {
                    vectors[(i, col)] = b.vectors[(r, c)];
                }
                col += 1;
            }
        }
        (values, vectors)
    }
}

/// `exp(x · M)` for Hermitian `M` and real `x`.
pub fn expm_hermitian(m: &DMatrix<Complex64>, x: f64) -> DMatrix<Complex64> {
    HermitianEigen::new(m).map(|l| Complex64::new((x * l).exp(), 0.0))
}

/// `exp(i t M)` for Hermitian `M`.
pub fn expm_i_hermitian(m: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    HermitianEigen::new(m).map(|l| Complex64::from_polar(1.0, t * l))
}

/// `exp(x · M) v` by Taylor substeps on the nonzero entries of `M`.
///
/// Rounding stays local to the occupied part of the basis, unlike
/// [`expm_hermitian`], whose eigenvector errors are amplified by
/// `exp(|x| · λ_max)` once that exceeds about `1e8`.
pub fn expm_apply(m: &DMatrix<Complex64>, x: f64, v: &DVector<Complex64>) -> DVector<Complex64> {
    let n = m.nrows();
    let mut entries = Vec::new();
    let mut norm1: f64 = 0.0;
    for j in 0..n {
        let mut col = 0.0;
        for i in 0..n {
            let e = m[(i, j)];
            if e.re != 0.0 || e.im != 0.0 {
                entries.push((i, j, e));
                col += e.norm();
            }
        }
        norm1 = norm1.max(col);
    }
    let steps = ((x.abs() * norm1) / 0.5).ceil().max(1.0) as usize;
    let h = x / steps as f64;
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        for k in 1..=60 {
            let mut next = DVector::zeros(n);
            for &(i, j, e) in &entries {
                next[i] += e * term[j];
            }
            next *= Complex64::new(h / k as f64, 0.0);
            out += &next;
            term = next;
            if term.norm() <= 1e-18 * out.norm() {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_exponential_matches_series() {
        // Two decoupled blocks: a 2x2 Pauli-x and a 1x1 entry.
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(3, 3, &[z, z, o, z, Complex64::new(2.0, 0.0), z, o, z, z]);
        assert_eq!(components(&m), vec![vec![0, 2], vec![1]]);
        let e = expm_hermitian(&m, 0.3);
        let (c, s) = (0.3f64.cosh(), 0.3f64.sinh());
        assert!((e[(0, 0)].re - c).abs() < 1e-14);
        assert!((e[(0, 2)].re - s).abs() < 1e-14);
        assert!((e[(1, 1)].re - 0.6f64.exp()).abs() < 1e-14);
        assert!(e[(0, 1)].norm() == 0.0);
        let u = expm_i_hermitian(&m, 0.7);
        assert!((u[(0, 2)] - Complex64::new(0.0, 0.7f64.sin())).norm() < 1e-14);
    }

    #[test]
    fn taylor_apply_matches_eigen_route() {
        let m = DMatrix::from_fn(6, 6, |i, j| {
            let d = (i as i64 - j as i64).abs();
            match d {
                0 => Complex64::new(0.3 * i as f64, 0.0),
                2 => Complex64::new(0.5, if i < j { 0.2 } else { -0.2 }),
                _ => Complex64::new(0.0, 0.0),
            }
        });
        let v = DVector::from_fn(6, |i, _| Complex64::new(1.0 / (i + 1) as f64, 0.1));
        let a = expm_apply(&m, -1.3, &v);
        let b = expm_hermitian(&m, -1.3) * &v;
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn basis_reconstructs_matrix() {
        let m = DMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                Complex64::new(i as f64, 0.0)
            } else {
                Complex64::new(0.1 * (i + j) as f64, 0.05 * (i as f64 - j as f64))
            }
        });
        let (vals, vecs) = HermitianEigen::new(&m).basis();
        let back = &vecs * DMatrix::from_diagonal(&vals.map(|l| Complex64::new(l, 0.0))) * vecs.adjoint();
        assert!((back - m).iter().all(|z| z.norm() < 1e-13));
    }
}
