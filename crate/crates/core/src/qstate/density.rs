use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{bit, StateVector};
use super::BIT_CONVENTION;
use crate::error::StateError;
use crate::graphs::VertexSet;
use crate::linalg::{hermitian_eigenvalues, max_abs_diff, CMatrix, CVector, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Density matrix over the qubits `qubit_labels` (original indices, ascending).
/// Row/column index bits follow the label order, first label most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<usize>,
    matrix: CMatrix,
}

/// Index into the full register from the kept bits and the traced-out bits.
fn merge_index(keep_idx: usize, env_idx: usize, keep: &[usize], env: &[usize], n: usize) -> usize {
    let mut full = 0;
    for (j, &q) in keep.iter().enumerate() {
        full |= bit(keep_idx, j, keep.len()) << (n - 1 - q);
    }
    for (j, &q) in env.iter().enumerate() {
        full |= bit(env_idx, j, env.len()) << (n - 1 - q);
    }
    full
}

fn split_positions(total: usize, keep: VertexSet) -> Result<(Vec<usize>, Vec<usize>), StateError> {
    let all = VertexSet::full(total);
    if keep.is_empty() || keep == all || !keep.is_subset(all) {
        return Err(StateError::BadKeep);
    }
    Ok((keep.to_vec(), all.difference(keep).to_vec()))
}

/// Columns `v_e = (I ⊗ <e|) |psi>` over the traced-out basis states `e`, so
/// that `rho_keep = sum_e v_e v_e^dagger`.
pub fn purification_vectors(s: &StateVector, keep: VertexSet) -> Result<Vec<CVector>, StateError> {
    let n = s.num_qubits();
    let (keep, env) = split_positions(n, keep)?;
    Ok((0..1usize << env.len())
        .map(|e| CVector::from_fn(1 << keep.len(), |k, _| s.amplitude(merge_index(k, e, &keep, &env, n))))
        .collect())
}

/// Reduced state on `keep`, tracing out every other qubit of a pure state.
pub fn partial_trace(s: &StateVector, keep: VertexSet) -> Result<DensityMatrix, StateError> {
    let n = s.num_qubits();
    let (keep_list, env) = split_positions(n, keep)?;
    let rows = 1 << keep_list.len();
    let cols = 1 << env.len();
    let m = CMatrix::from_fn(rows, cols, |k, e| s.amplitude(merge_index(k, e, &keep_list, &env, n)));
    let rho = &m * m.adjoint();
    DensityMatrix::new(keep_list, rho)
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(labels: Vec<usize>, matrix: CMatrix) -> Result<Self, StateError> {
        let dim = 1usize << labels.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(StateError::InvalidDensity(format!(
                "{}x{} matrix for {} labels",
                matrix.nrows(),
                matrix.ncols(),
                labels.len()
            )));
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StateError::InvalidDensity("labels must be strictly ascending".into()));
        }
        let herm = max_abs_diff(&matrix, &matrix.adjoint());
        if herm > HERMITIAN_TOL {
            return Err(StateError::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(StateError::InvalidDensity(format!("trace {trace} != 1")));
        }
        let min_eig = hermitian_eigenvalues(&matrix).into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(StateError::InvalidDensity(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(DensityMatrix { labels, matrix })
    }

    pub fn from_pure(s: &StateVector) -> Self {
        let v = s.to_vector();
        DensityMatrix { labels: (0..s.num_qubits()).collect(), matrix: &v * v.adjoint() }
    }

    pub fn maximally_mixed(labels: Vec<usize>) -> Self {
        let dim = 1 << labels.len();
        DensityMatrix { labels, matrix: CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0) }
    }

    pub(crate) fn from_parts_unchecked(labels: Vec<usize>, matrix: CMatrix) -> Self {
        DensityMatrix { labels, matrix }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_set(&self) -> VertexSet {
        self.labels.iter().copied().collect()
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Position of an original label inside this matrix's qubit order.
    pub fn position_of(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        // Hermitian: Tr(rho^2) = sum |rho_ij|^2
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > tol).count()
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.labels != other.labels {
            return f64::INFINITY;
        }
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// Traces out every label not in `keep` (given as original labels).
    pub fn partial_trace(&self, keep: VertexSet) -> Result<DensityMatrix, StateError> {
        if !keep.is_subset(self.label_set()) {
            return Err(StateError::BadKeep);
        }
        let positions: VertexSet = keep.iter().map(|l| self.position_of(l).expect("subset")).collect();
        let n = self.num_qubits();
        let (keep_pos, env_pos) = split_positions(n, positions)?;
        let rows = 1 << keep_pos.len();
        let mut out = CMatrix::from_element(rows, rows, ZERO);
        for e in 0..1usize << env_pos.len() {
            for r in 0..rows {
                let fr = merge_index(r, e, &keep_pos, &env_pos, n);
                for c in 0..rows {
                    out[(r, c)] += self.matrix[(fr, merge_index(c, e, &keep_pos, &env_pos, n))];
                }
            }
        }
        DensityMatrix::new(keep.to_vec(), out)
    }

    /// Partial transpose on the qubits whose labels are in `part`.
    pub fn partial_transpose(&self, part: VertexSet) -> CMatrix {
        let n = self.num_qubits();
        let mask: usize =
            self.labels.iter().enumerate().filter(|(_, l)| part.contains(**l)).map(|(pos, _)| 1 << (n - 1 - pos)).sum();
        let dim = self.dim();
        CMatrix::from_fn(dim, dim, |r, c| {
            // swap the `part` bits between row and column index
            let r2 = (r & !mask) | (c & mask);
            let c2 = (c & !mask) | (r & mask);
            self.matrix[(r2, c2)]
        })
    }
}

#[derive(Serialize, Deserialize)]
struct DensityMatrixJson {
    qubit_labels: Vec<usize>,
    dim: usize,
    bit_convention: String,
    /// Row-major `[re, im]` entries.
    matrix: Vec<[f64; 2]>,
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dim = self.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let z = self.matrix[(r, c)];
                entries.push([z.re, z.im]);
            }
        }
        DensityMatrixJson {
            qubit_labels: self.labels.clone(),
            dim,
            bit_convention: BIT_CONVENTION.to_string(),
            matrix: entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = DensityMatrixJson::deserialize(deserializer)?;
        if raw.bit_convention != BIT_CONVENTION {
            return Err(serde::de::Error::custom(format!("unsupported bit convention '{}'", raw.bit_convention)));
        }
        if raw.matrix.len() != raw.dim * raw.dim {
            return Err(serde::de::Error::custom("matrix entry count does not match dim"));
        }
        let m = CMatrix::from_row_iterator(raw.dim, raw.dim, raw.matrix.iter().map(|&[re, im]| Complex64::new(re, im)));
        DensityMatrix::new(raw.qubit_labels, m).map_err(serde::de::Error::custom)
    }
}
