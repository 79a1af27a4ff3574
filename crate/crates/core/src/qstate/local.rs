use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::density::DensityMatrix;
use super::state::StateVector;
use crate::error::StateError;
use crate::graphs::Graph;
use crate::linalg::{kron, CMatrix, I, ONE, ZERO};

/// Tensor product of single-qubit unitaries, one factor per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitary {
    factors: Vec<Matrix2<Complex64>>,
}

fn sqrt_minus_i_x() -> Matrix2<Complex64> {
    // (I - iX)/sqrt(2)
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Matrix2::new(ONE, -I, -I, ONE) * h
}

fn sqrt_i_z() -> Matrix2<Complex64> {
    // (I + iZ)/sqrt(2)
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Matrix2::new(ONE + I, ZERO, ZERO, ONE - I) * h
}

/// Local Clifford lift of `local_complement(g, a)`: sqrt(-iX) on `a`,
/// sqrt(iZ) on each neighbour. Maps `|G>` to `|tau_a(G)>` up to phase.
pub fn lc_unitary(g: &Graph, a: usize) -> Result<LocalUnitary, StateError> {
    let nbhd = g.neighborhood(a)?;
    let mut u = LocalUnitary::identity(g.n());
    u.factors[a] = sqrt_minus_i_x();
    for b in nbhd.iter() {
        u.factors[b] = sqrt_i_z();
    }
    Ok(u)
}

impl LocalUnitary {
    pub fn identity(n: usize) -> Self {
        LocalUnitary { factors: vec![Matrix2::identity(); n] }
    }

    pub fn from_factors(factors: Vec<Matrix2<Complex64>>) -> Self {
        LocalUnitary { factors }
    }

    pub fn num_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, q: usize) -> &Matrix2<Complex64> {
        &self.factors[q]
    }

    pub fn apply(&self, s: &StateVector) -> Result<StateVector, StateError> {
        if s.num_qubits() != self.num_qubits() {
            return Err(StateError::SizeMismatch { left: s.num_qubits(), right: self.num_qubits() });
        }
        let mut out = s.clone();
        for (q, u) in self.factors.iter().enumerate() {
            if *u != Matrix2::identity() {
                out = out.apply_single(q, u)?;
            }
        }
        Ok(out)
    }

    /// `self * other`: `other` acts first.
    pub fn compose(&self, other: &LocalUnitary) -> Result<LocalUnitary, StateError> {
        if self.num_qubits() != other.num_qubits() {
            return Err(StateError::SizeMismatch { left: self.num_qubits(), right: other.num_qubits() });
        }
        Ok(LocalUnitary { factors: self.factors.iter().zip(&other.factors).map(|(a, b)| a * b).collect() })
    }

    pub fn adjoint(&self) -> LocalUnitary {
        LocalUnitary { factors: self.factors.iter().map(|u| u.adjoint()).collect() }
    }

    /// Dense matrix of the factors on `labels`, first label most significant.
    pub fn restricted_matrix(&self, labels: &[usize]) -> CMatrix {
        labels.iter().fold(CMatrix::identity(1, 1), |acc, &q| {
            let f = &self.factors[q];
            kron(&acc, &CMatrix::from_fn(2, 2, |r, c| f[(r, c)]))
        })
    }

    /// `U_S rho U_S^dagger` with `U_S` the factors on the matrix's labels.
    pub fn conjugate(&self, rho: &DensityMatrix) -> DensityMatrix {
        let u = self.restricted_matrix(rho.labels());
        DensityMatrix::from_parts_unchecked(rho.labels().to_vec(), &u * rho.matrix() * u.adjoint())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{enumerate_connected_graphs, family, local_complement, FamilyKind, VertexSet};
    use crate::qstate::{build_graph_state, partial_trace, states_equal_up_to_phase};

    #[test]
    fn factors_are_unitary() {
        for m in [sqrt_minus_i_x(), sqrt_i_z()] {
            let d = m.adjoint() * m - Matrix2::identity();
            assert!(d.iter().all(|z| z.norm() < 1e-15));
        }
    }

    #[test]
    fn intertwines_local_complementation() {
        for n in 2..=6 {
            for g in enumerate_connected_graphs(n).unwrap() {
                let s = build_graph_state(&g).unwrap();
                for a in 0..n {
                    let lifted = lc_unitary(&g, a).unwrap().apply(&s).unwrap();
                    let target = build_graph_state(&local_complement(&g, a).unwrap()).unwrap();
                    assert!(states_equal_up_to_phase(&lifted, &target).unwrap(), "{g:?} at {a}");
                }
            }
        }
    }

    #[test]
    fn leaf_and_double_application() {
        let star = family(FamilyKind::Star, 4).unwrap();
        let s = build_graph_state(&star).unwrap();
        let u = lc_unitary(&star, 1).unwrap();
        assert!(states_equal_up_to_phase(&u.apply(&s).unwrap(), &s).unwrap());

        let k4 = family(FamilyKind::Complete, 4).unwrap();
        let s = build_graph_state(&k4).unwrap();
        let once = lc_unitary(&k4, 0).unwrap();
        let twice = lc_unitary(&local_complement(&k4, 0).unwrap(), 0).unwrap().compose(&once).unwrap();
        assert!(states_equal_up_to_phase(&twice.apply(&s).unwrap(), &s).unwrap());
    }

    #[test]
    fn conjugation_commutes_with_partial_trace() {
        let g = family(FamilyKind::Cycle, 5).unwrap();
        let s = build_graph_state(&g).unwrap();
        let u = lc_unitary(&g, 2).unwrap();
        let keep: VertexSet = [1, 2, 4].into_iter().collect();
        let a = u.conjugate(&partial_trace(&s, keep).unwrap());
        let b = partial_trace(&u.apply(&s).unwrap(), keep).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
        let back = u.adjoint().conjugate(&a);
        assert!(back.max_abs_diff(&partial_trace(&s, keep).unwrap()) < 1e-12);
    }
}
