use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::decomposition::{weighted_eigenvectors, Decomposition, RANK_TOL};
use super::measures::{check_bipartition, ckw_terms, schmidt_coefficients_labeled};
use super::roof::{convex_roof_upper_bound, ProductDefect, RoofOptions, RunRecord, ThreeTangle};
use super::CERT_TOL;
use crate::error::EntanglementError;
use crate::graphs::{Graph, LcWitness, VertexSet};
use crate::linalg::{kron, CMatrix, I, ONE, ZERO};
use crate::qstate::{build_graph_state, lc_unitary, partial_trace, DensityMatrix, LocalUnitary, StateVector};

/// How a zero-tangle decomposition was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateOrigin {
    Search { seed: u64, members: usize, restarts: usize },
    LcWitness { moves: Vec<usize> },
    FixedMixing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTangleCertificate {
    pub source: DensityMatrix,
    pub decomposition: Decomposition,
    /// Three-tangle of each member.
    pub residuals: Vec<f64>,
    /// Square roots of `residuals`.
    pub sqrt_residuals: Vec<f64>,
    pub tolerance: f64,
    pub origin: CertificateOrigin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityCertificate {
    pub source: DensityMatrix,
    pub bipartition: (VertexSet, VertexSet),
    pub decomposition: Decomposition,
    /// Second Schmidt coefficient of each member across the bipartition.
    pub schmidt_second: Vec<f64>,
    pub witness: Option<LcWitness>,
    pub tolerance: f64,
}

fn second_schmidt(s: &StateVector, labels: &[usize], part: VertexSet) -> Result<f64, EntanglementError> {
    Ok(schmidt_coefficients_labeled(s, labels, part)?.get(1).copied().unwrap_or(0.0))
}

/// Member tangles via the CKW residual (independent of the search's
/// hyperdeterminant evaluation).
pub fn member_tangles(d: &Decomposition) -> Result<Vec<f64>, EntanglementError> {
    d.members.iter().map(|m| Ok(ckw_terms(m)?.residual().max(0.0))).collect()
}

impl ZeroTangleCertificate {
    pub fn new(
        source: DensityMatrix,
        decomposition: Decomposition,
        origin: CertificateOrigin,
    ) -> Result<Self, EntanglementError> {
        let residuals = member_tangles(&decomposition)?;
        let cert = ZeroTangleCertificate {
            sqrt_residuals: residuals.iter().map(|t| t.sqrt()).collect(),
            residuals,
            source,
            decomposition,
            tolerance: CERT_TOL,
            origin,
        };
        cert.check()?;
        Ok(cert)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Re-validates from the stored data alone: ensemble invariants against
    /// the stored source, recomputed member tangles, tolerance.
    pub fn check(&self) -> Result<(), EntanglementError> {
        let fail = |m: String| Err(EntanglementError::Certificate(m));
        if self.source.num_qubits() != 3 {
            return fail(format!("source has {} qubits, expected 3", self.source.num_qubits()));
        }
        if !(self.tolerance <= CERT_TOL) {
            return fail(format!("tolerance {} looser than {CERT_TOL:e}", self.tolerance));
        }
        self.decomposition.validate(&self.source)?;
        let recomputed = member_tangles(&self.decomposition)?;
        if recomputed.len() != self.residuals.len() {
            return fail("residual count does not match member count".into());
        }
        for (i, (&stored, &fresh)) in self.residuals.iter().zip(&recomputed).enumerate() {
            if !(fresh < self.tolerance) {
                return fail(format!("member {i} has tangle {fresh:e}"));
            }
            if (stored - fresh).abs() > 1e-12 {
                return fail(format!("member {i}: stored residual {stored:e} != recomputed {fresh:e}"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, EntanglementError> {
        let cert: Self =
            serde_json::from_str(text).map_err(|e| EntanglementError::Certificate(format!("bad JSON: {e}")))?;
        cert.check()?;
        Ok(cert)
    }
}

impl SeparabilityCertificate {
    pub fn new(
        source: DensityMatrix,
        bipartition: (VertexSet, VertexSet),
        decomposition: Decomposition,
        witness: Option<LcWitness>,
    ) -> Result<Self, EntanglementError> {
        let schmidt_second = decomposition
            .members
            .iter()
            .map(|m| second_schmidt(m, &decomposition.labels, bipartition.0))
            .collect::<Result<Vec<_>, _>>()?;
        let cert = SeparabilityCertificate {
            source,
            bipartition,
            decomposition,
            schmidt_second,
            witness,
            tolerance: CERT_TOL,
        };
        cert.check()?;
        Ok(cert)
    }

    pub fn max_schmidt_second(&self) -> f64 {
        self.schmidt_second.iter().copied().fold(0.0, f64::max)
    }

    pub fn check(&self) -> Result<(), EntanglementError> {
        let fail = |m: String| Err(EntanglementError::Certificate(m));
        check_bipartition(self.source.labels(), self.bipartition.0, self.bipartition.1)?;
        if !(self.tolerance <= CERT_TOL) {
            return fail(format!("tolerance {} looser than {CERT_TOL:e}", self.tolerance));
        }
        self.decomposition.validate(&self.source)?;
        if self.schmidt_second.len() != self.decomposition.len() {
            return fail("Schmidt list does not match member count".into());
        }
        for (i, m) in self.decomposition.members.iter().enumerate() {
            let s2 = second_schmidt(m, &self.decomposition.labels, self.bipartition.0)?;
            if !(s2 < self.tolerance) {
                return fail(format!("member {i} has second Schmidt coefficient {s2:e}"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, EntanglementError> {
        let cert: Self =
            serde_json::from_str(text).map_err(|e| EntanglementError::Certificate(format!("bad JSON: {e}")))?;
        cert.check()?;
        Ok(cert)
    }
}

/// The fixed mixing `U = (1/sqrt 2) [[1, i], [1, -i]]`.
pub fn lemma1_mixing() -> CMatrix {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    CMatrix::from_row_slice(2, 2, &[ONE, I, ONE, -I]) * h
}

/// Applies the fixed 2x2 mixing to the weighted canonical eigenvectors of a
/// rank-2 state.
pub fn lemma1_decomposition(rho: &DensityMatrix) -> Result<Decomposition, EntanglementError> {
    let (vals, _) = weighted_eigenvectors(rho);
    if vals.len() != 2 {
        return Err(EntanglementError::NotRankTwo(vals.len()));
    }
    let d = Decomposition::from_isometry(rho, lemma1_mixing())?;
    if d.len() != 2 {
        return Err(EntanglementError::InvalidDecomposition("a fixed-mixing member vanished".into()));
    }
    Ok(d)
}

/// `I` or `Z` on one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IorZ {
    I,
    Z,
}

/// `e(rho) = rho/2 + (u1 ⊗ u2 ⊗ u3) rho (u1 ⊗ u2 ⊗ u3)^dagger / 2`.
pub fn theorem1_superoperator(rho: &DensityMatrix, u: [IorZ; 3]) -> Result<DensityMatrix, EntanglementError> {
    if rho.num_qubits() != 3 {
        return Err(EntanglementError::WrongSize { expected: 3, got: rho.num_qubits() });
    }
    let factor = |x: IorZ| match x {
        IorZ::I => CMatrix::identity(2, 2),
        IorZ::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    };
    let op = kron(&kron(&factor(u[0]), &factor(u[1])), &factor(u[2]));
    let half = Complex64::new(0.5, 0.0);
    let m = rho.matrix() * half + &op * rho.matrix() * op.adjoint() * half;
    Ok(DensityMatrix::new(rho.labels().to_vec(), m)?)
}

/// Local unitary `U` with `U|G> = |witness.resulting_graph>` up to phase.
fn witness_unitary(g: &Graph, witness: &LcWitness) -> Result<LocalUnitary, EntanglementError> {
    let mut u = LocalUnitary::identity(g.n());
    let mut current = g.clone();
    for &a in &witness.moves {
        u = lc_unitary(&current, a)?.compose(&u)?;
        current = crate::graphs::local_complement(&current, a)?;
    }
    Ok(u)
}

/// Explicit separable decomposition of `rho_S` for a graph state.
///
/// With `G' = witness.resulting_graph`, `rho_S(G') = 2^-|S^c| sum_z
/// Z^{Gamma z} |G'[S]><G'[S]| Z^{Gamma z}` where `Gamma` is the `S x S^c`
/// adjacency. `G'[S]` is disconnected, so every member is a product across
/// its first component; pulling back by the local LC unitary keeps it so.
pub fn theorem2_separable_decomposition(
    g: &Graph,
    s: VertexSet,
    witness: &LcWitness,
) -> Result<SeparabilityCertificate, EntanglementError> {
    let replayed = witness.replay(g)?;
    let gk = &witness.resulting_graph;
    if &replayed != gk {
        return Err(EntanglementError::InvalidWitness("replay mismatch".into()));
    }
    g.check_subset(s)?;
    let components = gk.components_within(s);
    if components.len() < 2 {
        return Err(EntanglementError::InvalidWitness(format!("induced subgraph on {s} is connected")));
    }
    let labels = s.to_vec();
    let k = labels.len();
    let outside = g.vertices().difference(s).to_vec();

    let (sub, _) = gk.induced_subgraph(s)?;
    let base = build_graph_state(&sub)?;
    let pull_back = {
        let u = witness_unitary(g, witness)?;
        LocalUnitary::from_factors(labels.iter().map(|&q| *u.factor(q)).collect()).adjoint()
    };

    // Gamma z as a bitmask over positions in `labels`, counted per value
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for z in 0..1usize << outside.len() {
        let mut mask = 0;
        for (p, &v) in labels.iter().enumerate() {
            let parity =
                outside.iter().enumerate().filter(|(j, &w)| (z >> j) & 1 == 1 && gk.has_edge(v, w)).count() % 2;
            mask |= parity << (k - 1 - p);
        }
        *counts.entry(mask).or_default() += 1;
    }
    let total = (1usize << outside.len()) as f64;
    let mut weights = Vec::new();
    let mut members = Vec::new();
    for (mask, count) in counts {
        let amps = base
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| if (i & mask).count_ones() % 2 == 1 { -a } else { *a })
            .collect();
        let decorated = StateVector::from_amplitudes(k, amps)?;
        members.push(pull_back.apply(&decorated)?);
        weights.push(count as f64 / total);
    }

    let source = partial_trace(&build_graph_state(g)?, s)?;
    let decomposition = Decomposition::from_members(&source, weights, members)?;
    let bipartition = (components[0], s.difference(components[0]));
    SeparabilityCertificate::new(source, bipartition, decomposition, Some(witness.clone()))
}

/// A separable decomposition is also a zero-tangle one: every member is a
/// product across some cut, so its three-tangle vanishes.
pub fn zero_tangle_from_separable(cert: &SeparabilityCertificate) -> Result<ZeroTangleCertificate, EntanglementError> {
    let moves = cert.witness.as_ref().map(|w| w.moves.clone()).unwrap_or_default();
    ZeroTangleCertificate::new(cert.source.clone(), cert.decomposition.clone(), CertificateOrigin::LcWitness { moves })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchAttempt {
    pub members: usize,
    pub restarts: usize,
    pub value: f64,
    pub max_member_value: f64,
    pub runs: Vec<RunRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { restarts: 32, seed: 0, max_sweeps: 400 }
    }
}

#[derive(Clone, Debug)]
pub struct ZeroTangleOutcome {
    pub certificate: Option<ZeroTangleCertificate>,
    pub attempts: Vec<SearchAttempt>,
    /// Smallest decomposition-averaged tangle seen.
    pub best_value: f64,
}

/// Searches for a zero-tangle decomposition of a 3-qubit state: members =
/// rank, then 2 x rank, then 2 x rank with doubled restarts.
pub fn certify_zero_tangle(rho: &DensityMatrix, opts: &CertifyOptions) -> Result<ZeroTangleOutcome, EntanglementError> {
    if rho.num_qubits() != 3 {
        return Err(EntanglementError::WrongSize { expected: 3, got: rho.num_qubits() });
    }
    let r = rho.rank(RANK_TOL);
    let schedule = [(r, opts.restarts), (2 * r, opts.restarts), (2 * r, 2 * opts.restarts)];
    let mut attempts = Vec::new();
    let mut best_value = f64::INFINITY;
    for (m, restarts) in schedule {
        let roof = RoofOptions {
            members: m,
            restarts,
            seed: opts.seed,
            max_sweeps: opts.max_sweeps,
            target: CERT_TOL * 1e-3,
            early_stop: Some(CERT_TOL * 1e-1),
        };
        let res = convex_roof_upper_bound(rho, &ThreeTangle, &roof)?;
        best_value = best_value.min(res.value);
        attempts.push(SearchAttempt {
            members: m,
            restarts,
            value: res.value,
            max_member_value: res.max_member_value(),
            runs: res.runs.clone(),
        });
        if res.max_member_value() < CERT_TOL {
            let origin = CertificateOrigin::Search { seed: opts.seed, members: m, restarts };
            if let Ok(cert) = ZeroTangleCertificate::new(rho.clone(), res.best, origin) {
                return Ok(ZeroTangleOutcome { certificate: Some(cert), attempts, best_value });
            }
        }
    }
    Ok(ZeroTangleOutcome { certificate: None, attempts, best_value })
}

#[derive(Clone, Debug)]
pub struct BiseparableOutcome {
    pub certificate: Option<SeparabilityCertificate>,
    /// Smallest averaged product defect per bipartition tried, in label sets.
    pub best_by_bipartition: Vec<((VertexSet, VertexSet), f64)>,
}

/// Searches for a decomposition of `rho` into members that are all product
/// across one bipartition. Bipartitions keep the first qubit on the left.
pub fn certify_biseparable(
    rho: &DensityMatrix,
    opts: &CertifyOptions,
) -> Result<BiseparableOutcome, EntanglementError> {
    let k = rho.num_qubits();
    if k < 2 {
        return Err(EntanglementError::WrongSize { expected: 2, got: k });
    }
    let labels = rho.labels().to_vec();
    let r = rho.rank(RANK_TOL);
    // Schmidt second coefficient below CERT_TOL needs a defect below CERT_TOL^2
    let target = CERT_TOL * CERT_TOL * 0.1;
    let mut best_by_bipartition = Vec::new();
    for bits in 0..(1u32 << (k - 1)) - 1 {
        // position 0 always in the left part; `bits` chooses positions 1..k for the left
        let left_pos: VertexSet = std::iter::once(0).chain((1..k).filter(|p| bits >> (p - 1) & 1 == 1)).collect();
        let to_labels = |set: VertexSet| -> VertexSet { set.iter().map(|p| labels[p]).collect() };
        let part = (to_labels(left_pos), to_labels(VertexSet::full(k).difference(left_pos)));
        let measure = ProductDefect { num_qubits: k, part: left_pos };
        let mut best = f64::INFINITY;
        for m in [r, (2 * r).min(1 << k)] {
            let roof = RoofOptions {
                members: m,
                restarts: opts.restarts,
                seed: opts.seed,
                max_sweeps: opts.max_sweeps,
                target,
                early_stop: Some(target),
            };
            let res = convex_roof_upper_bound(rho, &measure, &roof)?;
            best = best.min(res.value);
            if let Ok(cert) = SeparabilityCertificate::new(rho.clone(), part, res.best, None) {
                best_by_bipartition.push((part, best));
                return Ok(BiseparableOutcome { certificate: Some(cert), best_by_bipartition });
            }
        }
        best_by_bipartition.push((part, best));
    }
    Ok(BiseparableOutcome { certificate: None, best_by_bipartition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{can_disconnect_by_lc, family, FamilyKind};
    use crate::linalg::max_abs_diff;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn fixed_mixing_on_classical_mixture() {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(3, 3)] = Complex64::new(0.5, 0.0);
        let rho = DensityMatrix::new(vec![0, 1], m).unwrap();
        let d = lemma1_decomposition(&rho).unwrap();
        d.validate(&rho).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!((d.members[0].amplitude(0).re - h).abs() < 1e-12);
        assert!((d.members[0].amplitude(3) - Complex64::new(0.0, h)).norm() < 1e-12);
        assert!((d.members[1].amplitude(3) - Complex64::new(0.0, -h)).norm() < 1e-12);
        assert!(d.weights.iter().all(|w| (w - 0.5).abs() < 1e-12));
        assert!(matches!(
            lemma1_decomposition(&DensityMatrix::maximally_mixed(vec![0, 1])),
            Err(EntanglementError::NotRankTwo(4))
        ));
    }

    #[test]
    fn superoperator_identities() {
        let s = build_graph_state(&family(FamilyKind::Cycle, 5).unwrap()).unwrap();
        let rho = partial_trace(&s, set(&[0, 1, 2])).unwrap();
        let same = theorem1_superoperator(&rho, [IorZ::I; 3]).unwrap();
        assert!(same.max_abs_diff(&rho) < 1e-15);
        let u = [IorZ::Z, IorZ::I, IorZ::Z];
        let once = theorem1_superoperator(&rho, u).unwrap();
        let twice = theorem1_superoperator(&once, u).unwrap();
        assert!(twice.max_abs_diff(&once) < 1e-15);
    }

    #[test]
    fn theorem2_path_pair() {
        let p4 = family(FamilyKind::Path, 4).unwrap();
        let s = set(&[0, 2]);
        let w = can_disconnect_by_lc(&p4, s).unwrap().unwrap();
        assert!(w.moves.is_empty());
        let cert = theorem2_separable_decomposition(&p4, s, &w).unwrap();
        assert_eq!(cert.bipartition, (set(&[0]), set(&[2])));
        assert!(cert.max_schmidt_second() < 1e-12);
        // rho_02 of P4 is I/4
        assert!(max_abs_diff(cert.source.matrix(), DensityMatrix::maximally_mixed(vec![0, 2]).matrix()) < 1e-12);
    }

    #[test]
    fn theorem2_complete_triple_uses_one_move() {
        let k4 = family(FamilyKind::Complete, 4).unwrap();
        let s = set(&[0, 1, 2]);
        let w = can_disconnect_by_lc(&k4, s).unwrap().unwrap();
        assert_eq!(w.moves.len(), 1);
        let cert = theorem2_separable_decomposition(&k4, s, &w).unwrap();
        cert.check().unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        SeparabilityCertificate::from_json(&text).unwrap();
        let zt = zero_tangle_from_separable(&cert).unwrap();
        assert!(zt.max_residual() < 1e-12);
    }

    #[test]
    fn theorem2_rejects_bad_witness() {
        let k4 = family(FamilyKind::Complete, 4).unwrap();
        let bogus = LcWitness { moves: vec![], resulting_graph: k4.clone() };
        assert!(matches!(
            theorem2_separable_decomposition(&k4, set(&[0, 1, 2]), &bogus),
            Err(EntanglementError::InvalidWitness(_))
        ));
        let mismatched = LcWitness { moves: vec![3], resulting_graph: k4.clone() };
        assert!(theorem2_separable_decomposition(&k4, set(&[0, 1, 2]), &mismatched).is_err());
    }

    #[test]
    fn tampered_certificate_fails_check() {
        let k4 = family(FamilyKind::Complete, 4).unwrap();
        let rho = partial_trace(&build_graph_state(&k4).unwrap(), set(&[0, 1, 2])).unwrap();
        let out = certify_zero_tangle(&rho, &CertifyOptions::default()).unwrap();
        let cert = out.certificate.expect("K4 triple certifies");
        let mut v: serde_json::Value = serde_json::to_value(&cert).unwrap();
        v["residuals"][0] = serde_json::json!(0.5);
        assert!(ZeroTangleCertificate::from_json(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::to_value(&cert).unwrap();
        v["decomposition"]["weights"][0] = serde_json::json!(0.9);
        assert!(ZeroTangleCertificate::from_json(&v.to_string()).is_err());
        ZeroTangleCertificate::from_json(&serde_json::to_string(&cert).unwrap()).unwrap();
    }
}
