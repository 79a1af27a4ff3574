//! Entanglement measures, pure-state decompositions and certificates.

mod certificates;
mod decomposition;
mod measures;
mod roof;

pub use certificates::{
    certify_biseparable, certify_zero_tangle, lemma1_decomposition, lemma1_mixing, member_tangles,
    theorem1_superoperator, theorem2_separable_decomposition, zero_tangle_from_separable, BiseparableOutcome,
    CertificateOrigin, CertifyOptions, IorZ, SearchAttempt, SeparabilityCertificate, ZeroTangleCertificate,
    ZeroTangleOutcome,
};
pub use decomposition::{
    weighted_eigenvectors, Decomposition, ISOMETRY_TOL, MIN_WEIGHT, RANK_TOL, RECONSTRUCTION_TOL, WEIGHT_SUM_TOL,
};
pub use measures::{
    check_bipartition, ckw_terms, concurrence, concurrence_from_vectors, hyperdeterminant_tangle, is_product_across,
    negativity, product_defect, schmidt_coefficients, schmidt_coefficients_labeled, three_tangle_pure, CkwTerms,
    PRODUCT_TOL,
};
pub use roof::{
    convex_roof_upper_bound, identity_isometry, random_isometry, ProductDefect, PureStateMeasure, RoofOptions,
    RoofResult, RunRecord, ThreeTangle,
};

/// Certification threshold for member tangles and Schmidt coefficients.
pub const CERT_TOL: f64 = 1e-9;
