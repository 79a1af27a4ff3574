//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenvalues closer than this are treated as one degenerate cluster when
/// choosing a canonical eigenbasis.
const DEGENERACY_TOL: f64 = 1e-9;

/// Eigenvalues of a Hermitian matrix in decreasing order, with eigenvectors
/// as matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Multiplies `v` by a phase so that its first entry of (numerically) maximal
/// modulus is real and positive.
pub fn fix_phase(v: &mut CVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().find(|z| z.norm() >= max - 1e-12).copied().unwrap_or(ONE);
    let phase = pivot.conj() / pivot.norm();
    v.iter_mut().for_each(|z| *z *= phase);
}

/// Eigen-decomposition with a reproducible basis inside degenerate
/// eigenspaces: Gram-Schmidt on the projections of computational basis
/// vectors `|0>, |1>, ...`, each result phase-fixed by [`fix_phase`].
///
/// Only eigenvalues above `rank_tol` are returned.
pub fn canonical_eigenbasis(m: &CMatrix, rank_tol: f64) -> (Vec<f64>, Vec<CVector>) {
    let (values, vectors) = hermitian_eigen(m);
    let dim = m.nrows();
    let mut out_vals = Vec::new();
    let mut out_vecs: Vec<CVector> = Vec::new();
    let mut start = 0;
    while start < values.len() && values[start] > rank_tol {
        let mut end = start + 1;
        while end < values.len() && (values[start] - values[end]).abs() < DEGENERACY_TOL {
            end += 1;
        }
        let block = vectors.columns(start, end - start);
        let projector = block * block.adjoint();
        let mut basis: Vec<CVector> = Vec::with_capacity(end - start);
        for k in 0..dim {
            if basis.len() == end - start {
                break;
            }
            let mut v: CVector = projector.column(k).into_owned();
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
            let norm = v.norm();
            if norm > 1e-6 {
                v /= Complex64::new(norm, 0.0);
                fix_phase(&mut v);
                basis.push(v);
            }
        }
        debug_assert_eq!(basis.len(), end - start);
        for v in basis {
            out_vals.push(v.dotc(&(m * &v)).re);
            out_vecs.push(v);
        }
        start = end;
    }
    (out_vals, out_vecs)
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest deviation of `m^dagger m` from the identity.
pub fn orthonormality_defect(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    max_abs_diff(&gram, &CMatrix::identity(gram.nrows(), gram.ncols()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_basis_of_flat_spectrum_is_computational() {
        let m = CMatrix::identity(4, 4) * Complex64::new(0.25, 0.0);
        let (vals, vecs) = canonical_eigenbasis(&m, 1e-10);
        assert_eq!(vals.len(), 4);
        for (k, v) in vecs.iter().enumerate() {
            assert!((v[k] - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn canonical_basis_reconstructs() {
        let a = CMatrix::from_fn(3, 3, |r, c| Complex64::new((r + 2 * c) as f64, (r as f64) - (c as f64)));
        let m = &a * a.adjoint();
        let (vals, vecs) = canonical_eigenbasis(&m, 1e-12);
        let mut rebuilt = CMatrix::zeros(3, 3);
        for (l, v) in vals.iter().zip(&vecs) {
            rebuilt += v * v.adjoint() * Complex64::new(*l, 0.0);
        }
        assert!(max_abs_diff(&rebuilt, &m) < 1e-10);
    }
}
