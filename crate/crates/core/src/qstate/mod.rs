//! Dense state vectors, Pauli strings, local unitaries and reduced states.

mod density;
mod local;
mod pauli;
mod state;

pub use density::{partial_trace, purification_vectors, DensityMatrix, HERMITIAN_TOL, PSD_TOL, TRACE_TOL};
pub use local::{lc_unitary, LocalUnitary};
pub use pauli::{apply_pauli, stabilizer_op, Pauli, PauliOperator, Phase};
pub use state::{
    build_graph_state, build_graph_state_in_order, fidelity, plus_state, states_equal_up_to_phase, StateVector,
    NORM_TOL, PHASE_EQ_TOL,
};

pub const MAX_QUBITS: usize = 14;

/// Recorded in every serialized state so the basis ordering is auditable.
pub const BIT_CONVENTION: &str = "qubit 0 = most significant bit";
