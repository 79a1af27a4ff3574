use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BIT_CONVENTION, MAX_QUBITS};
use crate::error::StateError;
use crate::graphs::Graph;
use crate::linalg::{CVector, ONE, ZERO};

/// Norm tolerance for a valid state vector.
pub const NORM_TOL: f64 = 1e-12;
/// `|<s1|s2>| = 1` tolerance used by [`states_equal_up_to_phase`].
pub const PHASE_EQ_TOL: f64 = 1e-10;

/// Unit-norm amplitude vector over `n` qubits. Qubit 0 is the most
/// significant bit of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

#[inline]
pub(crate) fn bit(index: usize, qubit: usize, n: usize) -> usize {
    index >> (n - 1 - qubit) & 1
}

#[inline]
pub(crate) fn qubit_mask(qubit: usize, n: usize) -> usize {
    1 << (n - 1 - qubit)
}

fn check_capacity(n: usize) -> Result<(), StateError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(StateError::Capacity { n, max: MAX_QUBITS });
    }
    Ok(())
}

impl StateVector {
    pub fn from_amplitudes(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self, StateError> {
        check_capacity(num_qubits)?;
        if amps.len() != 1 << num_qubits {
            return Err(StateError::BadLength { len: amps.len(), n: num_qubits });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized { norm, tol: NORM_TOL });
        }
        Ok(StateVector { num_qubits, amps })
    }

    /// Rescales `amps` to unit norm. Returns the state and the factor applied.
    pub fn normalized(num_qubits: usize, mut amps: Vec<Complex64>) -> Result<(Self, f64), StateError> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::NotNormalized { norm, tol: NORM_TOL });
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok((Self::from_amplitudes(num_qubits, amps)?, 1.0 / norm))
    }

    pub(crate) fn from_vector_unchecked(num_qubits: usize, v: &CVector) -> Self {
        StateVector { num_qubits, amps: v.iter().copied().collect() }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, StateError> {
        check_capacity(num_qubits)?;
        let mut amps = vec![ZERO; 1 << num_qubits];
        *amps.get_mut(index).ok_or(StateError::BadLength { len: index, n: num_qubits })? = ONE;
        Ok(StateVector { num_qubits, amps })
    }

    /// Basis state from a label such as `"0110"` (qubit 0 first).
    pub fn from_label(label: &str) -> Result<Self, StateError> {
        let n = label.len();
        if n == 0 || !label.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(StateError::BadLabel(label.into()));
        }
        let index = usize::from_str_radix(label, 2).map_err(|_| StateError::BadLabel(label.into()))?;
        Self::basis(n, index)
    }

    pub fn plus_state(n: usize) -> Result<Self, StateError> {
        check_capacity(n)?;
        let amp = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
        Ok(StateVector { num_qubits: n, amps: vec![amp; 1 << n] })
    }

    /// `(|0...0> + |1...1>)/sqrt 2`
    pub fn ghz(n: usize) -> Result<Self, StateError> {
        check_capacity(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[(1 << n) - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Equal superposition of the `n` basis states with a single 1.
    pub fn w(n: usize) -> Result<Self, StateError> {
        check_capacity(n)?;
        let mut amps = vec![ZERO; 1 << n];
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        for q in 0..n {
            amps[qubit_mask(q, n)] = a;
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    /// `(|00> + |11>)/sqrt 2`
    pub fn bell() -> Self {
        Self::ghz(2).expect("two qubits fit")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.amps)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn basis_label(&self, index: usize) -> String {
        (0..self.num_qubits).map(|q| if bit(index, q, self.num_qubits) == 1 { '1' } else { '0' }).collect()
    }

    pub(crate) fn check_qubit(&self, q: usize) -> Result<(), StateError> {
        if q >= self.num_qubits {
            return Err(StateError::QubitOutOfRange { qubit: q, n: self.num_qubits });
        }
        Ok(())
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, StateError> {
        if self.num_qubits != other.num_qubits {
            return Err(StateError::SizeMismatch { left: self.num_qubits, right: other.num_qubits });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, StateError> {
        let n = self.num_qubits + other.num_qubits;
        check_capacity(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Controlled-Z on qubits `a`, `b`: negates amplitudes where both bits are 1.
    pub fn apply_cz(&self, a: usize, b: usize) -> Result<StateVector, StateError> {
        let mut out = self.clone();
        out.cz_in_place(a, b)?;
        Ok(out)
    }

    pub(crate) fn cz_in_place(&mut self, a: usize, b: usize) -> Result<(), StateError> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(StateError::SameQubit(a));
        }
        let mask = qubit_mask(a, self.num_qubits) | qubit_mask(b, self.num_qubits);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    /// Applies a 2x2 matrix to qubit `q`.
    pub fn apply_single(&self, q: usize, u: &Matrix2<Complex64>) -> Result<StateVector, StateError> {
        self.check_qubit(q)?;
        let mask = qubit_mask(q, self.num_qubits);
        let mut amps = self.amps.clone();
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let (x0, x1) = (self.amps[i], self.amps[i | mask]);
                amps[i] = u[(0, 0)] * x0 + u[(0, 1)] * x1;
                amps[i | mask] = u[(1, 0)] * x0 + u[(1, 1)] * x1;
            }
        }
        Ok(StateVector { num_qubits: self.num_qubits, amps })
    }

    pub fn scaled(&self, phase: Complex64) -> StateVector {
        StateVector { num_qubits: self.num_qubits, amps: self.amps.iter().map(|a| a * phase).collect() }
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// The CZ circuit over all edges applied to `|+>^n`.
pub fn build_graph_state(g: &Graph) -> Result<StateVector, StateError> {
    build_graph_state_in_order(g, &g.edges())
}

/// Same as [`build_graph_state`] with an explicit gate order.
pub fn build_graph_state_in_order(g: &Graph, order: &[(usize, usize)]) -> Result<StateVector, StateError> {
    let mut s = StateVector::plus_state(g.n())?;
    for &(a, b) in order {
        s.cz_in_place(a, b)?;
    }
    Ok(s)
}

pub fn plus_state(n: usize) -> Result<StateVector, StateError> {
    StateVector::plus_state(n)
}

pub fn fidelity(s1: &StateVector, s2: &StateVector) -> Result<f64, StateError> {
    Ok(s1.inner(s2)?.norm_sqr())
}

/// True iff `|<s1|s2>| = 1` within [`PHASE_EQ_TOL`].
pub fn states_equal_up_to_phase(s1: &StateVector, s2: &StateVector) -> Result<bool, StateError> {
    Ok((s1.inner(s2)?.norm() - 1.0).abs() < PHASE_EQ_TOL)
}

#[derive(Serialize, Deserialize)]
struct StateVectorJson {
    num_qubits: usize,
    bit_convention: String,
    amplitudes: Vec<[f64; 2]>,
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StateVectorJson {
            num_qubits: self.num_qubits,
            bit_convention: BIT_CONVENTION.to_string(),
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = StateVectorJson::deserialize(deserializer)?;
        if raw.bit_convention != BIT_CONVENTION {
            return Err(serde::de::Error::custom(format!("unsupported bit convention '{}'", raw.bit_convention)));
        }
        let amps = raw.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        StateVector::from_amplitudes(raw.num_qubits, amps).map_err(serde::de::Error::custom)
    }
}
