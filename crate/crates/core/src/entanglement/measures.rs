use crate::error::EntanglementError;
use crate::graphs::VertexSet;
use crate::linalg::{hermitian_eigen, singular_values, CMatrix, CVector, ZERO};
use crate::qstate::{purification_vectors, DensityMatrix, StateVector};

/// Eigenvalues below this are dropped when building the vector
/// decomposition used by the concurrence formula.
const SPECTRUM_FLOOR: f64 = 1e-13;

/// `(Y ⊗ Y) v` for a two-qubit vector.
fn spin_flip(v: &CVector) -> CVector {
    CVector::from_vec(vec![-v[3], v[2], v[1], -v[0]])
}

/// Wootters concurrence from any decomposition `rho = sum_i v_i v_i^dagger`.
/// The singular values of `T_ij = v_i^T (Y⊗Y) v_j` are the square roots of
/// the spectrum of `rho (Y⊗Y) rho* (Y⊗Y)`, so no matrix square root is needed.
pub fn concurrence_from_vectors(vs: &[CVector]) -> Result<f64, EntanglementError> {
    if let Some(v) = vs.iter().find(|v| v.len() != 4) {
        return Err(EntanglementError::WrongSize { expected: 2, got: v.len().trailing_zeros() as usize });
    }
    if vs.is_empty() {
        return Ok(0.0);
    }
    let flipped: Vec<CVector> = vs.iter().map(spin_flip).collect();
    let t = CMatrix::from_fn(vs.len(), vs.len(), |i, j| vs[i].dot(&flipped[j]));
    let mut lambda = singular_values(&t);
    lambda.resize(4.max(lambda.len()), 0.0);
    Ok((lambda[0] - lambda[1..].iter().sum::<f64>()).max(0.0))
}

pub fn concurrence(r: &DensityMatrix) -> Result<f64, EntanglementError> {
    if r.num_qubits() != 2 {
        return Err(EntanglementError::WrongSize { expected: 2, got: r.num_qubits() });
    }
    let (vals, vecs) = hermitian_eigen(r.matrix());
    let vs: Vec<CVector> = vals
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > SPECTRUM_FLOOR)
        .map(|(k, &l)| vecs.column(k) * num_complex::Complex64::new(l.sqrt(), 0.0))
        .collect();
    concurrence_from_vectors(&vs)
}

fn check_three(s: &StateVector) -> Result<(), EntanglementError> {
    if s.num_qubits() != 3 {
        return Err(EntanglementError::WrongSize { expected: 3, got: s.num_qubits() });
    }
    Ok(())
}

/// The three terms of the CKW relation for qubit 0 of a pure 3-qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CkwTerms {
    /// `C^2_{0(12)} = 4 det rho_0`
    pub one_vs_rest: f64,
    pub c01_sq: f64,
    pub c02_sq: f64,
}

impl CkwTerms {
    pub fn residual(&self) -> f64 {
        self.one_vs_rest - self.c01_sq - self.c02_sq
    }
}

pub fn ckw_terms(s: &StateVector) -> Result<CkwTerms, EntanglementError> {
    check_three(s)?;
    let a = s.amplitudes();
    let (mut r00, mut r11, mut r01) = (0.0, 0.0, ZERO);
    for k in 0..4 {
        r00 += a[k].norm_sqr();
        r11 += a[4 + k].norm_sqr();
        r01 += a[k] * a[4 + k].conj();
    }
    let det = r00 * r11 - r01.norm_sqr();
    let pair = |keep: [usize; 2]| -> Result<f64, EntanglementError> {
        let vs = purification_vectors(s, keep.into_iter().collect())?;
        Ok(concurrence_from_vectors(&vs)?.powi(2))
    };
    Ok(CkwTerms { one_vs_rest: 4.0 * det, c01_sq: pair([0, 1])?, c02_sq: pair([0, 2])? })
}

/// Three-tangle of a pure 3-qubit state as the CKW residual, clamped at 0.
pub fn three_tangle_pure(s: &StateVector) -> Result<f64, EntanglementError> {
    Ok(ckw_terms(s)?.residual().max(0.0))
}

/// `4 |Det(psi)|` with `Det` Cayley's hyperdeterminant. Equal to the
/// three-tangle for normalized `psi`; homogeneous of degree 4 otherwise.
pub fn hyperdeterminant_tangle(a: &[num_complex::Complex64]) -> f64 {
    let d1 =
        a[0] * a[0] * a[7] * a[7] + a[1] * a[1] * a[6] * a[6] + a[2] * a[2] * a[5] * a[5] + a[4] * a[4] * a[3] * a[3];
    let d2 = a[0] * a[7] * (a[3] * a[4] + a[5] * a[2] + a[6] * a[1])
        + a[3] * a[4] * (a[5] * a[2] + a[6] * a[1])
        + a[5] * a[2] * a[6] * a[1];
    let d3 = a[0] * a[6] * a[5] * a[3] + a[7] * a[1] * a[2] * a[4];
    4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm()
}

fn positions(labels: &[usize], set: VertexSet) -> VertexSet {
    labels.iter().enumerate().filter(|(_, l)| set.contains(**l)).map(|(p, _)| p).collect()
}

/// Checks that `(a, b)` partitions `labels` into two nonempty parts.
pub fn check_bipartition(labels: &[usize], a: VertexSet, b: VertexSet) -> Result<(), EntanglementError> {
    let all: VertexSet = labels.iter().copied().collect();
    if a.is_empty() || b.is_empty() || !a.intersection(b).is_empty() || a.union(b) != all {
        return Err(EntanglementError::BadPartition);
    }
    Ok(())
}

pub fn negativity(r: &DensityMatrix, bipartition: (VertexSet, VertexSet)) -> Result<f64, EntanglementError> {
    check_bipartition(r.labels(), bipartition.0, bipartition.1)?;
    let pt = r.partial_transpose(bipartition.0);
    Ok(hermitian_eigen(&pt).0.iter().filter(|&&l| l < 0.0).map(|l| -l).sum())
}

/// Schmidt coefficients (decreasing) of a pure state across `part | rest`,
/// with `part` given in qubit positions of `s`.
pub fn schmidt_coefficients(s: &StateVector, part: VertexSet) -> Result<Vec<f64>, EntanglementError> {
    let n = s.num_qubits();
    check_bipartition(&(0..n).collect::<Vec<_>>(), part, VertexSet::full(n).difference(part))?;
    let rows = purification_vectors(s, part)?;
    // columns indexed by the complement's basis states
    let m = CMatrix::from_fn(rows[0].len(), rows.len(), |r, c| rows[c][r]);
    Ok(singular_values(&m))
}

/// Same as [`schmidt_coefficients`] with `part` given in original labels
/// for a state living on `labels`.
pub fn schmidt_coefficients_labeled(
    s: &StateVector,
    labels: &[usize],
    part: VertexSet,
) -> Result<Vec<f64>, EntanglementError> {
    if labels.len() != s.num_qubits() {
        return Err(EntanglementError::WrongSize { expected: labels.len(), got: s.num_qubits() });
    }
    let all: VertexSet = labels.iter().copied().collect();
    check_bipartition(labels, part, all.difference(part))?;
    schmidt_coefficients(s, positions(labels, part))
}

/// Tolerance on the largest Schmidt coefficient for a product verdict.
pub const PRODUCT_TOL: f64 = 1e-10;

pub fn is_product_across(s: &StateVector, bipartition: (VertexSet, VertexSet)) -> Result<bool, EntanglementError> {
    let n = s.num_qubits();
    check_bipartition(&(0..n).collect::<Vec<_>>(), bipartition.0, bipartition.1)?;
    let sv = schmidt_coefficients(s, bipartition.0)?;
    Ok((sv[0] - 1.0).abs() < PRODUCT_TOL)
}

/// `sum_{i >= 2} sigma_i^2 = 1 - sigma_1^2` for a normalized vector across
/// `part | rest` (positions). Zero exactly on product vectors.
pub fn product_defect(psi: &CVector, num_qubits: usize, part: VertexSet) -> f64 {
    let a = part.to_vec();
    let b = VertexSet::full(num_qubits).difference(part).to_vec();
    let idx = |ia: usize, ib: usize| {
        let mut full = 0;
        for (j, &q) in a.iter().enumerate() {
            full |= ((ia >> (a.len() - 1 - j)) & 1) << (num_qubits - 1 - q);
        }
        for (j, &q) in b.iter().enumerate() {
            full |= ((ib >> (b.len() - 1 - j)) & 1) << (num_qubits - 1 - q);
        }
        full
    };
    let m = CMatrix::from_fn(1 << a.len(), 1 << b.len(), |r, c| psi[idx(r, c)]);
    let s = singular_values(&m);
    s.iter().skip(1).map(|x| x * x).sum()
}
