use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("{what} capacity exceeded: n = {n}, maximum is {max}")]
    Capacity { what: &'static str, n: usize, max: usize },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("adjacency row {0} is not symmetric or has a diagonal entry")]
    InvalidAdjacency(usize),
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("vertex subset must be nonempty")]
    EmptySubset,
    #[error("subset size {size} outside the allowed range {min}..={max}")]
    SubsetSize { size: usize, min: usize, max: usize },
    #[error("family requires n >= {min}, got {n}")]
    TooFewVertices { n: usize, min: usize },
    #[error("graph6: invalid byte {byte:#04x} at position {pos}")]
    Graph6Byte { pos: usize, byte: u8 },
    #[error("graph6: payload truncated, expected {expected} bytes, found {found}")]
    Graph6Truncated { expected: usize, found: usize },
    #[error("graph6: {extra} unexpected trailing byte(s)")]
    Graph6Trailing { extra: usize },
    #[error("graph6: empty input")]
    Graph6Empty,
    #[error("edge list line {line}: {msg}")]
    EdgeList { line: usize, msg: String },
    #[error("witness replay does not reproduce the recorded graph")]
    WitnessMismatch,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("qubit capacity exceeded: {n} qubits, maximum is {max}")]
    Capacity { n: usize, max: usize },
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("amplitude vector length {len} is not 2^{n}")]
    BadLength { len: usize, n: usize },
    #[error("state norm {norm} differs from 1 by more than {tol:e}")]
    NotNormalized { norm: f64, tol: f64 },
    #[error("size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("kept subsystem must be a nonempty proper subset")]
    BadKeep,
    #[error("density matrix invalid: {0}")]
    InvalidDensity(String),
    #[error("invalid basis label '{0}'")]
    BadLabel(String),
    #[error("invalid pauli string: {0}")]
    BadPauli(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntanglementError {
    #[error("expected a {expected}-qubit input, got {got} qubits")]
    WrongSize { expected: usize, got: usize },
    #[error("bipartition is not a partition of the subsystem labels")]
    BadPartition,
    #[error("rank {rank} exceeds member count {members}")]
    RankExceedsMembers { rank: usize, members: usize },
    #[error("member count {members} exceeds 4 x rank ({rank})")]
    TooManyMembers { rank: usize, members: usize },
    #[error("expected numerical rank 2, found {0}")]
    NotRankTwo(usize),
    #[error("decomposition invalid: {0}")]
    InvalidDecomposition(String),
    #[error("witness does not disconnect the subset: {0}")]
    InvalidWitness(String),
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error)]
pub enum ClaimError {
    #[error("normal form state norm {0} is not 1")]
    NormViolation(f64),
    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    OutOfRange { name: &'static str, value: f64, min: f64, max: f64 },
    #[error("claim requires {0}")]
    Precondition(String),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
