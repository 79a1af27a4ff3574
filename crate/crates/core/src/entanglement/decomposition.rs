use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::EntanglementError;
use crate::linalg::{canonical_eigenbasis, max_abs_diff, orthonormality_defect, CMatrix, CVector, ZERO};
use crate::qstate::{DensityMatrix, StateVector};

pub const WEIGHT_SUM_TOL: f64 = 1e-10;
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
pub const ISOMETRY_TOL: f64 = 1e-10;
/// Eigenvalues at or below this count as zero when computing ranks.
pub const RANK_TOL: f64 = 1e-10;
/// Members lighter than this are dropped from a decomposition.
pub const MIN_WEIGHT: f64 = 1e-13;

/// Pure-state ensemble `{(w_i, psi_i)}` for a density matrix on `labels`.
///
/// `mixing_isometry` is the `m x r` matrix `U` with
/// `sqrt(w_i) psi_i = sum_j U_ij sqrt(lambda_j) e_j` over the canonical
/// eigenbasis `{lambda_j, e_j}` of the source.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub labels: Vec<usize>,
    pub weights: Vec<f64>,
    pub members: Vec<StateVector>,
    pub mixing_isometry: CMatrix,
}

/// Canonical weighted eigenvectors `sqrt(lambda_j) e_j`, as matrix columns.
pub fn weighted_eigenvectors(rho: &DensityMatrix) -> (Vec<f64>, CMatrix) {
    let (vals, vecs) = canonical_eigenbasis(rho.matrix(), RANK_TOL);
    let dim = rho.dim();
    let w = CMatrix::from_fn(dim, vals.len(), |r, c| vecs[c][r] * vals[c].sqrt());
    (vals, w)
}

impl Decomposition {
    /// Members `U W^T`, normalized, with zero-weight rows dropped.
    pub fn from_isometry(rho: &DensityMatrix, u: CMatrix) -> Result<Self, EntanglementError> {
        let (_, w) = weighted_eigenvectors(rho);
        if u.ncols() != w.ncols() {
            return Err(EntanglementError::InvalidDecomposition(format!(
                "isometry has {} columns, source rank is {}",
                u.ncols(),
                w.ncols()
            )));
        }
        let tilde = &w * u.transpose();
        Self::from_unnormalized(rho.labels().to_vec(), &tilde, u)
    }

    /// Builds from explicit members; the mixing isometry is recovered by
    /// projecting onto the canonical eigenbasis.
    pub fn from_members(
        rho: &DensityMatrix,
        weights: Vec<f64>,
        members: Vec<StateVector>,
    ) -> Result<Self, EntanglementError> {
        let (vals, vecs) = canonical_eigenbasis(rho.matrix(), RANK_TOL);
        let u = CMatrix::from_fn(members.len(), vals.len(), |i, j| {
            let amp = vecs[j].dotc(&members[i].to_vector());
            amp * Complex64::new(weights[i].sqrt() / vals[j].sqrt(), 0.0)
        });
        Ok(Decomposition { labels: rho.labels().to_vec(), weights, members, mixing_isometry: u })
    }

    fn from_unnormalized(labels: Vec<usize>, tilde: &CMatrix, u: CMatrix) -> Result<Self, EntanglementError> {
        let n = labels.len();
        let mut weights = Vec::new();
        let mut members = Vec::new();
        for col in tilde.column_iter() {
            let p = col.norm_squared();
            if p > MIN_WEIGHT {
                let v: CVector = col.into_owned() / Complex64::new(p.sqrt(), 0.0);
                weights.push(p);
                members.push(StateVector::from_amplitudes(n, v.iter().copied().collect())?);
            }
        }
        Ok(Decomposition { labels, weights, members, mixing_isometry: u })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let dim = 1 << self.labels.len();
        let mut out = CMatrix::from_element(dim, dim, ZERO);
        for (w, s) in self.weights.iter().zip(&self.members) {
            let v = s.to_vector();
            out += &v * v.adjoint() * Complex64::new(*w, 0.0);
        }
        out
    }

    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        if rho.labels() != self.labels.as_slice() {
            return f64::INFINITY;
        }
        max_abs_diff(&self.reconstruct(), rho.matrix())
    }

    /// Checks weights, reconstruction of `rho` and isometry columns.
    pub fn validate(&self, rho: &DensityMatrix) -> Result<(), EntanglementError> {
        let bad = |msg: String| Err(EntanglementError::InvalidDecomposition(msg));
        if self.members.is_empty() || self.weights.len() != self.members.len() {
            return bad("empty or mismatched member list".into());
        }
        if let Some(w) = self.weights.iter().find(|&&w| !(w > 0.0)) {
            return bad(format!("non-positive weight {w:e}"));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return bad(format!("weights sum to {total}"));
        }
        if let Some(m) = self.members.iter().find(|m| m.num_qubits() != self.labels.len()) {
            return bad(format!("member on {} qubits, expected {}", m.num_qubits(), self.labels.len()));
        }
        let err = self.reconstruction_error(rho);
        if !(err <= RECONSTRUCTION_TOL) {
            return bad(format!("reconstruction error {err:e}"));
        }
        let defect = orthonormality_defect(&self.mixing_isometry);
        if !(defect <= ISOMETRY_TOL) {
            return bad(format!("mixing isometry defect {defect:e}"));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    labels: Vec<usize>,
    weights: Vec<f64>,
    /// Member amplitudes as `[re, im]` pairs.
    members: Vec<Vec<[f64; 2]>>,
    /// Row-major `[re, im]` entries of the `rows x cols` mixing isometry.
    mixing_isometry: Vec<Vec<[f64; 2]>>,
}

fn pairs<'a>(it: impl Iterator<Item = &'a Complex64>) -> Vec<[f64; 2]> {
    it.map(|z| [z.re, z.im]).collect()
}

impl Serialize for Decomposition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let u = &self.mixing_isometry;
        DecompositionJson {
            labels: self.labels.clone(),
            weights: self.weights.clone(),
            members: self.members.iter().map(|m| pairs(m.amplitudes().iter())).collect(),
            mixing_isometry: (0..u.nrows()).map(|r| pairs(u.row(r).iter())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Decomposition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = DecompositionJson::deserialize(deserializer)?;
        let n = raw.labels.len();
        let members = raw
            .members
            .iter()
            .map(|amps| StateVector::from_amplitudes(n, amps.iter().map(|&[re, im]| Complex64::new(re, im)).collect()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        let rows = raw.mixing_isometry.len();
        let cols = raw.mixing_isometry.first().map_or(0, Vec::len);
        if raw.mixing_isometry.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("ragged mixing isometry"));
        }
        let u = CMatrix::from_fn(rows, cols, |r, c| {
            let [re, im] = raw.mixing_isometry[r][c];
            Complex64::new(re, im)
        });
        Ok(Decomposition { labels: raw.labels, weights: raw.weights, members, mixing_isometry: u })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{family, FamilyKind, VertexSet};
    use crate::qstate::{build_graph_state, partial_trace};

    #[test]
    fn identity_isometry_is_the_eigen_decomposition() {
        let s = build_graph_state(&family(FamilyKind::Cycle, 5).unwrap()).unwrap();
        let rho = partial_trace(&s, VertexSet::from_iter([0, 1, 3])).unwrap();
        let r = rho.rank(RANK_TOL);
        let d = Decomposition::from_isometry(&rho, CMatrix::identity(r, r)).unwrap();
        d.validate(&rho).unwrap();
        assert_eq!(d.len(), r);
    }

    #[test]
    fn from_members_recovers_isometry() {
        let s = build_graph_state(&family(FamilyKind::Star, 4).unwrap()).unwrap();
        let rho = partial_trace(&s, VertexSet::from_iter([1, 2, 3])).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(h, 0.0), Complex64::new(0.0, h), Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        );
        let d = Decomposition::from_isometry(&rho, u.clone()).unwrap();
        let back = Decomposition::from_members(&rho, d.weights.clone(), d.members.clone()).unwrap();
        assert!(max_abs_diff(&back.mixing_isometry, &u) < 1e-12);
        back.validate(&rho).unwrap();
    }

    #[test]
    fn validation_rejects_bad_ensembles() {
        let rho = DensityMatrix::maximally_mixed(vec![0]);
        let d = Decomposition::from_isometry(&rho, CMatrix::identity(2, 2)).unwrap();
        d.validate(&rho).unwrap();
        let mut wrong = d.clone();
        wrong.weights = vec![0.7, 0.3];
        assert!(wrong.validate(&rho).is_err());
        let mut wrong = d.clone();
        wrong.mixing_isometry[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(wrong.validate(&rho).is_err());
        let json = serde_json::to_string(&d).unwrap();
        let back: Decomposition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }
}
