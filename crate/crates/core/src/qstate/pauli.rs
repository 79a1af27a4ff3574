use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{bit, StateVector};
use crate::error::StateError;
use crate::graphs::Graph;
use crate::linalg::{I, ONE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    MinusOne,
    PlusI,
    MinusI,
}

impl Phase {
    pub fn value(self) -> Complex64 {
        match self {
            Phase::PlusOne => ONE,
            Phase::MinusOne => -ONE,
            Phase::PlusI => I,
            Phase::MinusI => -I,
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Phase::PlusOne => "+",
            Phase::MinusOne => "-",
            Phase::PlusI => "+i",
            Phase::MinusI => "-i",
        }
    }
}

/// Tensor product of single-qubit Paulis with a global phase; letter `q`
/// acts on qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    pub letters: Vec<Pauli>,
    pub phase: Phase,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator { letters: vec![Pauli::I; n], phase: Phase::PlusOne }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The letters without the phase, e.g. `XZZI`.
    pub fn letters_string(&self) -> String {
        self.letters
            .iter()
            .map(|p| match p {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            })
            .collect()
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase.prefix(), self.letters_string())
    }
}

impl FromStr for PauliOperator {
    type Err = StateError;

    /// Accepts an optional phase prefix (`+`, `-`, `i`, `+i`, `-i`) followed by letters.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MinusI, rest)
        } else if let Some(rest) = s.strip_prefix("+i").or_else(|| s.strip_prefix('i')) {
            (Phase::PlusI, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MinusOne, rest)
        } else {
            (Phase::PlusOne, s.strip_prefix('+').unwrap_or(s))
        };
        let letters = body
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(StateError::BadPauli(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if letters.is_empty() {
            return Err(StateError::BadPauli(s.to_string()));
        }
        Ok(PauliOperator { letters, phase })
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `X` on `a`, `Z` on every neighbour of `a`, identity elsewhere.
pub fn stabilizer_op(g: &Graph, a: usize) -> Result<PauliOperator, StateError> {
    let nbhd = g.neighborhood(a)?;
    let mut op = PauliOperator::identity(g.n());
    op.letters[a] = Pauli::X;
    for b in nbhd.iter() {
        op.letters[b] = Pauli::Z;
    }
    Ok(op)
}

pub fn apply_pauli(s: &StateVector, p: &PauliOperator) -> Result<StateVector, StateError> {
    let n = s.num_qubits();
    if p.len() != n {
        return Err(StateError::SizeMismatch { left: n, right: p.len() });
    }
    let flip: usize = p
        .letters
        .iter()
        .enumerate()
        .filter(|(_, l)| matches!(l, Pauli::X | Pauli::Y))
        .map(|(q, _)| 1 << (n - 1 - q))
        .sum();
    let global = p.phase.value();
    let mut out = vec![Complex64::new(0.0, 0.0); s.dim()];
    for (i, amp) in s.amplitudes().iter().enumerate() {
        let mut factor = global;
        for (q, letter) in p.letters.iter().enumerate() {
            let b = bit(i, q, n);
            match letter {
                Pauli::I | Pauli::X => {}
                Pauli::Z => {
                    if b == 1 {
                        factor = -factor;
                    }
                }
                // Y|0> = i|1>, Y|1> = -i|0>
                Pauli::Y => factor *= if b == 0 { I } else { -I },
            }
        }
        out[i ^ flip] = factor * amp;
    }
    StateVector::from_amplitudes(n, out)
}
