//! Runnable checks for the graph-state claims, with structured reports.

mod graph_claims;
mod normal_form;
mod records;
mod report;
mod states;

pub use graph_claims::{
    class_name, corollary_family, lc_class_partition, lc_partition, reference_pair, reference_reduction,
    verify_corollary1, verify_lemma1, verify_pairwise_zero, verify_theorem1, verify_theorem2, VerifyOptions,
    COROLLARY_STATE_MAX,
};
pub use normal_form::{eq5_holds, mg4, mg4_params, normal_form_state, NormalFormParams, EQ5_TOL, NORM_TOL};
pub use records::{recheck_report, CertificateRecord, CONCURRENCE_TOL};
pub use report::{instance_seed, ClaimReport, InstanceResult, Summary, Verdict, TOOL_VERSION};
pub use states::{
    check_fully_entangled, eq5_sweep, graph_pair_purities, lu_inequivalence_scan, max_pair_concurrence, parse_grid,
    scan_pair, LevelStatus, MIXED_TOL, PURITY_TOL, VIOLATION_CONCURRENCE,
};
