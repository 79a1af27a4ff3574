//! Graph states: construction, local complementation, entanglement measures
//! and numerical certificates for the absence of low-order genuine
//! entanglement.

// `!(x < tol)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod claims;
pub mod entanglement;
pub mod error;
pub mod graphs;
pub mod linalg;
pub mod qstate;

pub use error::{ClaimError, EntanglementError, GraphError, StateError};
pub use graphs::{Graph, VertexSet};
pub use qstate::{DensityMatrix, StateVector};
