use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::entanglement::{concurrence, SeparabilityCertificate, ZeroTangleCertificate};
use crate::error::{ClaimError, EntanglementError};
use crate::graphs::{parse_graph6, LcWitness, VertexSet};
use crate::linalg::max_abs_diff;
use crate::qstate::{build_graph_state, partial_trace, DensityMatrix};

use super::report::ClaimReport;

/// Tolerance for matching a stored source matrix against a rebuilt one.
const SOURCE_TOL: f64 = 1e-12;
pub const CONCURRENCE_TOL: f64 = 1e-10;

/// Evidence attached to an instance, tagged so a checker can dispatch on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateRecord {
    ZeroTangle {
        #[serde(skip_serializing_if = "Option::is_none", default)]
        graph: Option<String>,
        subset: VertexSet,
        certificate: ZeroTangleCertificate,
    },
    Separability {
        #[serde(skip_serializing_if = "Option::is_none", default)]
        graph: Option<String>,
        subset: VertexSet,
        certificate: SeparabilityCertificate,
    },
    LcWitness {
        graph: String,
        subset: VertexSet,
        witness: LcWitness,
    },
    /// A two-qubit reduction whose concurrence is claimed to vanish.
    Concurrence {
        #[serde(skip_serializing_if = "Option::is_none", default)]
        graph: Option<String>,
        source: DensityMatrix,
    },
}

fn check_source(graph: &Option<String>, subset: VertexSet, source: &DensityMatrix) -> Result<(), ClaimError> {
    let Some(g6) = graph else { return Ok(()) };
    let g = parse_graph6(g6)?;
    let rebuilt = partial_trace(&build_graph_state(&g)?, subset)?;
    if rebuilt.labels() != source.labels() || max_abs_diff(rebuilt.matrix(), source.matrix()) > SOURCE_TOL {
        return Err(EntanglementError::Certificate(format!("source is not the reduction of {g6} on {subset}")).into());
    }
    Ok(())
}

impl CertificateRecord {
    /// Re-validates the record without any search.
    pub fn check(&self) -> Result<(), ClaimError> {
        match self {
            CertificateRecord::ZeroTangle { graph, subset, certificate } => {
                certificate.check()?;
                check_source(graph, *subset, &certificate.source)
            }
            CertificateRecord::Separability { graph, subset, certificate } => {
                certificate.check()?;
                check_source(graph, *subset, &certificate.source)
            }
            CertificateRecord::LcWitness { graph, subset, witness } => {
                let g = parse_graph6(graph)?;
                let replayed = witness.replay(&g)?;
                if replayed.is_connected_within(*subset) {
                    return Err(EntanglementError::InvalidWitness(format!("{subset} stays connected")).into());
                }
                Ok(())
            }
            CertificateRecord::Concurrence { graph, source } => {
                let c = concurrence(source)?;
                if !(c < CONCURRENCE_TOL) {
                    return Err(EntanglementError::Certificate(format!("concurrence {c:e}")).into());
                }
                check_source(graph, source.label_set(), source)
            }
        }
    }

    pub fn check_json(value: &Value) -> Result<(), ClaimError> {
        let rec: CertificateRecord = serde_json::from_value(value.clone())
            .map_err(|e| EntanglementError::Certificate(format!("bad certificate JSON: {e}")))?;
        rec.check()
    }
}

/// Re-validates every certificate in a report; returns how many were checked.
pub fn recheck_report(report: &ClaimReport) -> Result<usize, (String, ClaimError)> {
    let mut checked = 0;
    for inst in &report.instances {
        if let Some(cert) = &inst.certificate {
            CertificateRecord::check_json(cert).map_err(|e| (inst.key.clone(), e))?;
            checked += 1;
        }
    }
    Ok(checked)
}
