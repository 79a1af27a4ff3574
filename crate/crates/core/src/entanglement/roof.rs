//! Derivative-free upper bounds on convex-roof extensions.
//!
//! Members are `psi~ = W U^T` with `W` the weighted canonical eigenvectors
//! and `U` an `m x r` isometry. The search applies Givens-type rotations to
//! pairs of rows of `U` (one real and one imaginary generator per pair), each
//! step sized by a three-point parabola fit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::decomposition::{weighted_eigenvectors, Decomposition, MIN_WEIGHT};
use super::measures::{hyperdeterminant_tangle, product_defect};
use crate::error::EntanglementError;
use crate::graphs::VertexSet;
use crate::linalg::{CMatrix, CVector, ONE, ZERO};
use crate::qstate::DensityMatrix;

/// A functional on normalized pure states.
pub trait PureStateMeasure: Sync {
    fn name(&self) -> &'static str;

    fn evaluate(&self, psi: &[Complex64]) -> f64;

    /// Value on `psi / sqrt(p)` where `p = |psi|^2`.
    fn evaluate_unnormalized(&self, psi: &[Complex64], p: f64) -> f64 {
        let scale = 1.0 / p.sqrt();
        let v: Vec<Complex64> = psi.iter().map(|z| z * scale).collect();
        self.evaluate(&v)
    }
}

/// Three-qubit tangle, evaluated through the hyperdeterminant.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThreeTangle;

impl PureStateMeasure for ThreeTangle {
    fn name(&self) -> &'static str {
        "three_tangle"
    }

    fn evaluate(&self, psi: &[Complex64]) -> f64 {
        hyperdeterminant_tangle(psi)
    }

    fn evaluate_unnormalized(&self, psi: &[Complex64], p: f64) -> f64 {
        hyperdeterminant_tangle(psi) / (p * p)
    }
}

/// `1 - sigma_1^2` across `part | rest` (qubit positions); zero iff product.
#[derive(Clone, Copy, Debug)]
pub struct ProductDefect {
    pub num_qubits: usize,
    pub part: VertexSet,
}

impl PureStateMeasure for ProductDefect {
    fn name(&self) -> &'static str {
        "product_defect"
    }

    fn evaluate(&self, psi: &[Complex64]) -> f64 {
        product_defect(&CVector::from_column_slice(psi), self.num_qubits, self.part)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoofOptions {
    pub members: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    /// A run stops once every member value is below this.
    pub target: f64,
    /// Remaining restarts are skipped once a run's largest member value is
    /// below this.
    pub early_stop: Option<f64>,
}

impl RoofOptions {
    pub fn new(members: usize, restarts: usize, seed: u64) -> Self {
        RoofOptions { members, restarts, seed, max_sweeps: 400, target: 1e-12, early_stop: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub restart: usize,
    pub start_value: f64,
    pub final_value: f64,
    pub max_member_value: f64,
    pub sweeps: usize,
    /// Reached `target` (as opposed to stalling or running out of sweeps).
    pub reached_target: bool,
}

#[derive(Clone, Debug)]
pub struct RoofResult {
    /// `sum_i w_i f(psi_i)` for the best decomposition found.
    pub value: f64,
    pub member_values: Vec<f64>,
    pub best: Decomposition,
    pub runs: Vec<RunRecord>,
}

impl RoofResult {
    pub fn max_member_value(&self) -> f64 {
        self.member_values.iter().copied().fold(0.0, f64::max)
    }
}

/// Haar-random `m x r` isometry.
pub fn random_isometry(m: usize, r: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = DMatrix::from_fn(m, m, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let qr = g.qr();
    let (q, rr) = (qr.q(), qr.r());
    // fix the phases so the distribution is Haar
    let mut q = q;
    for c in 0..m {
        let d = rr[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        q.column_mut(c).iter_mut().for_each(|z| *z *= phase);
    }
    q.columns(0, r).into_owned()
}

pub fn identity_isometry(m: usize, r: usize) -> CMatrix {
    CMatrix::from_fn(m, r, |i, j| if i == j { ONE } else { ZERO })
}

#[derive(Clone, Copy, PartialEq)]
enum Objective {
    Average,
    /// `sum f_i^2` over members of non-negligible weight: smooth at zero,
    /// and pulls light members down as hard as heavy ones.
    Polish,
}

/// Switch to the polish objective below this average.
const POLISH_BELOW: f64 = 1e-4;
const MAX_STEP: f64 = 0.8;
const MIN_STEP: f64 = 1e-10;
/// Consecutive sweeps without improvement before a run gives up.
const STALL_SWEEPS: usize = 8;

struct Search<'a> {
    measure: &'a dyn PureStateMeasure,
    dim: usize,
    /// member `i` occupies `psi[i*dim .. (i+1)*dim]`
    psi: Vec<Complex64>,
    u: CMatrix,
    weight: Vec<f64>,
    value: Vec<f64>,
    objective: Objective,
}

impl<'a> Search<'a> {
    fn new(measure: &'a dyn PureStateMeasure, w: &CMatrix, u: CMatrix) -> Self {
        let tilde = w * u.transpose();
        let (dim, m) = tilde.shape();
        let mut psi = Vec::with_capacity(dim * m);
        for c in 0..m {
            psi.extend(tilde.column(c).iter());
        }
        let mut s =
            Search { measure, dim, psi, u, weight: vec![0.0; m], value: vec![0.0; m], objective: Objective::Average };
        for i in 0..m {
            let (p, f) = s.eval(&s.psi[i * dim..(i + 1) * dim]);
            s.weight[i] = p;
            s.value[i] = f;
        }
        s
    }

    fn eval(&self, v: &[Complex64]) -> (f64, f64) {
        let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if p <= MIN_WEIGHT {
            (p, 0.0)
        } else {
            (p, self.measure.evaluate_unnormalized(v, p).max(0.0))
        }
    }

    fn term(&self, p: f64, f: f64) -> f64 {
        match self.objective {
            Objective::Average => p * f,
            Objective::Polish => {
                if p > MIN_WEIGHT {
                    f * f
                } else {
                    0.0
                }
            }
        }
    }

    fn average(&self) -> f64 {
        self.weight.iter().zip(&self.value).map(|(p, f)| p * f).sum()
    }

    fn max_value(&self) -> f64 {
        self.weight.iter().zip(&self.value).filter(|(p, _)| **p > MIN_WEIGHT).map(|(_, f)| *f).fold(0.0, f64::max)
    }

    fn total(&self) -> f64 {
        self.weight.iter().zip(&self.value).map(|(p, f)| self.term(*p, *f)).sum()
    }

    fn gate(t: f64, imaginary: bool) -> [Complex64; 4] {
        let (s, c) = t.sin_cos();
        if imaginary {
            [Complex64::new(c, 0.0), Complex64::new(0.0, s), Complex64::new(0.0, s), Complex64::new(c, 0.0)]
        } else {
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0), Complex64::new(c, 0.0)]
        }
    }

    /// Rotated pair `(i, k)` for angle `t` and its cost contribution.
    fn trial(&self, i: usize, k: usize, t: f64, imaginary: bool, buf: &mut [Complex64]) -> (f64, [(f64, f64); 2]) {
        let g = Self::gate(t, imaginary);
        let d = self.dim;
        let (a, b) = (&self.psi[i * d..(i + 1) * d], &self.psi[k * d..(k + 1) * d]);
        for x in 0..d {
            buf[x] = g[0] * a[x] + g[1] * b[x];
            buf[d + x] = g[2] * a[x] + g[3] * b[x];
        }
        let ei = self.eval(&buf[..d]);
        let ek = self.eval(&buf[d..]);
        (self.term(ei.0, ei.1) + self.term(ek.0, ek.1), [ei, ek])
    }

    fn apply(&mut self, i: usize, k: usize, t: f64, imaginary: bool, evals: [(f64, f64); 2]) {
        let g = Self::gate(t, imaginary);
        let d = self.dim;
        for x in 0..d {
            let (a, b) = (self.psi[i * d + x], self.psi[k * d + x]);
            self.psi[i * d + x] = g[0] * a + g[1] * b;
            self.psi[k * d + x] = g[2] * a + g[3] * b;
        }
        for c in 0..self.u.ncols() {
            let (a, b) = (self.u[(i, c)], self.u[(k, c)]);
            self.u[(i, c)] = g[0] * a + g[1] * b;
            self.u[(k, c)] = g[2] * a + g[3] * b;
        }
        (self.weight[i], self.value[i]) = evals[0];
        (self.weight[k], self.value[k]) = evals[1];
    }

    /// One parabola-fitted line search; returns the accepted angle.
    fn line_search(&mut self, i: usize, k: usize, imaginary: bool, h: f64, buf: &mut [Complex64]) -> Option<f64> {
        let f0 = self.term(self.weight[i], self.value[i]) + self.term(self.weight[k], self.value[k]);
        let (fp, ep) = self.trial(i, k, h, imaginary, buf);
        let (fm, em) = self.trial(i, k, -h, imaginary, buf);
        let mut best = (f0, 0.0, None);
        if fp < best.0 {
            best = (fp, h, Some(ep));
        }
        if fm < best.0 {
            best = (fm, -h, Some(em));
        }
        let curv = fp + fm - 2.0 * f0;
        if curv > 0.0 {
            let t = (h * (fm - fp) / (2.0 * curv)).clamp(-4.0 * h, 4.0 * h);
            if t != 0.0 && t.abs() != h {
                let (ft, et) = self.trial(i, k, t, imaginary, buf);
                if ft < best.0 {
                    best = (ft, t, Some(et));
                }
            }
        }
        let (_, t, evals) = best;
        evals.map(|e| {
            self.apply(i, k, t, imaginary, e);
            t
        })
    }

    fn run(&mut self, max_sweeps: usize, target: f64) -> (usize, bool) {
        let m = self.weight.len();
        let mut buf = vec![ZERO; 2 * self.dim];
        let coords: Vec<(usize, usize, bool)> =
            (0..m).flat_map(|i| (i + 1..m).flat_map(move |k| [(i, k, false), (i, k, true)])).collect();
        let mut steps: Vec<f64> = vec![0.3; coords.len()];
        let mut idle = 0;
        for sweep in 0..max_sweeps {
            if self.max_value() < target {
                return (sweep, true);
            }
            if self.objective == Objective::Average && self.average() < POLISH_BELOW {
                self.objective = Objective::Polish;
                steps.iter_mut().for_each(|h| *h = (*h).max(1e-3));
            }
            if coords.is_empty() {
                return (sweep, false);
            }
            let before = self.total();
            for (c, &(i, k, imaginary)) in coords.iter().enumerate() {
                steps[c] = match self.line_search(i, k, imaginary, steps[c], &mut buf) {
                    Some(t) => (2.0 * t.abs()).clamp(MIN_STEP, MAX_STEP),
                    None => (steps[c] * 0.5).max(MIN_STEP),
                };
            }
            let after = self.total();
            idle = if after < before { 0 } else { idle + 1 };
            if idle >= STALL_SWEEPS || steps.iter().all(|&h| h <= 4.0 * MIN_STEP) {
                return (sweep + 1, self.max_value() < target);
            }
        }
        (max_sweeps, self.max_value() < target)
    }
}

/// Runs whose members all sit below the certification threshold rank by
/// their largest member value; the rest by the average.
fn ranking(value: f64, max_member: f64) -> (bool, f64) {
    if max_member < super::CERT_TOL {
        (false, max_member)
    } else {
        (true, value)
    }
}

/// Smallest decomposition-averaged `measure` found over `restarts` local
/// searches. Restart 0 starts from the canonical eigen-decomposition, later
/// restarts from seeded Haar-random isometries.
pub fn convex_roof_upper_bound(
    rho: &DensityMatrix,
    measure: &dyn PureStateMeasure,
    opts: &RoofOptions,
) -> Result<RoofResult, EntanglementError> {
    let (_, w) = weighted_eigenvectors(rho);
    let r = w.ncols();
    let m = opts.members;
    if m < r {
        return Err(EntanglementError::RankExceedsMembers { rank: r, members: m });
    }
    if m > 4 * r {
        return Err(EntanglementError::TooManyMembers { rank: r, members: m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut runs = Vec::new();
    let mut best: Option<(f64, f64, CMatrix)> = None;
    for restart in 0..opts.restarts.max(1) {
        let u0 = if restart == 0 { identity_isometry(m, r) } else { random_isometry(m, r, &mut rng) };
        let mut search = Search::new(measure, &w, u0);
        let start_value = search.average();
        let (sweeps, reached_target) = search.run(opts.max_sweeps, opts.target);
        let (value, max_member) = (search.average(), search.max_value());
        runs.push(RunRecord {
            restart,
            start_value,
            final_value: value,
            max_member_value: max_member,
            sweeps,
            reached_target,
        });
        let better = best.as_ref().is_none_or(|(bv, bm, _)| ranking(value, max_member) < ranking(*bv, *bm));
        if better {
            best = Some((value, max_member, search.u));
        }
        if opts.early_stop.is_some_and(|tol| max_member < tol) {
            break;
        }
    }
    let (_, _, u) = best.expect("at least one restart");
    let decomposition = Decomposition::from_isometry(rho, u)?;
    let member_values: Vec<f64> = decomposition.members.iter().map(|s| measure.evaluate(s.amplitudes())).collect();
    let value = decomposition.weights.iter().zip(&member_values).map(|(w, f)| w * f).sum();
    Ok(RoofResult { value, member_values, best: decomposition, runs })
}
