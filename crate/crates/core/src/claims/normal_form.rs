use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ClaimError;
use crate::linalg::{I, ZERO};
use crate::qstate::StateVector;

/// Allowed deviation of the normal-form state norm from 1.
pub const NORM_TOL: f64 = 1e-10;
/// Slack below zero still counted as satisfying an inequality.
pub const EQ5_TOL: f64 = 1e-12;

/// Four-qubit normal form with complex parameters `a, b, c, d`.
///
/// Amplitudes: `A = (a+d)/2` on 0000/1111, `C = (a-d)/2` on 0011/1100,
/// `B = (b+c)/2` on 0101/1010, `D = (b-c)/2` on 0110/1001. The state norm
/// squared is `2 (x1^2 + x2^2 + x3^2 + x4^2)` with `x = (|A|, |B|, |C|, |D|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormParams {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl NormalFormParams {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        NormalFormParams { a, b, c, d }
    }

    /// From the derived coefficients `(A, B, C, D)`.
    pub fn from_abcd_coefficients(big_a: Complex64, big_b: Complex64, big_c: Complex64, big_d: Complex64) -> Self {
        NormalFormParams { a: big_a + big_c, d: big_a - big_c, b: big_b + big_d, c: big_b - big_d }
    }

    /// `[A, B, C, D]`
    pub fn coefficients(&self) -> [Complex64; 4] {
        let half = 0.5;
        [(self.a + self.d) * half, (self.b + self.c) * half, (self.a - self.d) * half, (self.b - self.c) * half]
    }

    /// Global phase making `A` real and nonnegative (`A = x1 = |A|`).
    pub fn gauged(&self) -> Self {
        let big_a = self.coefficients()[0];
        if big_a.norm() == 0.0 {
            return *self;
        }
        let phase = big_a.conj() / big_a.norm();
        NormalFormParams { a: self.a * phase, b: self.b * phase, c: self.c * phase, d: self.d * phase }
    }

    /// `[x1, x2, x3, x4]`
    pub fn moduli(&self) -> [f64; 4] {
        self.coefficients().map(|z| z.norm())
    }

    /// `[phi2, phi3, phi4]` after the gauge; `phi1 = 0`.
    pub fn phases(&self) -> [f64; 3] {
        let [_, b, c, d] = self.gauged().coefficients();
        [b.arg(), c.arg(), d.arg()]
    }

    pub fn state_norm(&self) -> f64 {
        (2.0 * self.moduli().iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    /// Rescaled to unit state norm, with the scale factor applied.
    pub fn normalized(&self) -> Result<(Self, f64), ClaimError> {
        let norm = self.state_norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(ClaimError::NormViolation(norm));
        }
        let s = 1.0 / norm;
        Ok((NormalFormParams { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }, s))
    }

    /// Right-hand side minus left-hand side of each of the six conditions
    /// for vanishing pairwise entanglement.
    pub fn eq5_slack(&self) -> [f64; 6] {
        let [x1, x2, x3, x4] = self.moduli();
        let [p2, p3, p4] = self.phases();
        [
            x3 * x3 + x4 * x4 - 2.0 * x1 * x2 * p2.cos().abs(),
            x1 * x1 + x2 * x2 - 2.0 * x3 * x4 * (p3 - p4).cos().abs(),
            x2 * x2 + x4 * x4 - 2.0 * x1 * x3 * p3.cos().abs(),
            x1 * x1 + x3 * x3 - 2.0 * x2 * x4 * (p2 - p4).cos().abs(),
            x2 * x2 + x3 * x3 - 2.0 * x1 * x4 * p4.cos().abs(),
            x1 * x1 + x4 * x4 - 2.0 * x2 * x3 * (p2 - p3).cos().abs(),
        ]
    }
}

pub fn eq5_holds(p: &NormalFormParams) -> (bool, [f64; 6]) {
    let slack = p.eq5_slack();
    (slack.iter().all(|&s| s >= -EQ5_TOL), slack)
}

pub fn normal_form_state(p: &NormalFormParams) -> Result<StateVector, ClaimError> {
    let norm = p.state_norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(ClaimError::NormViolation(norm));
    }
    let [big_a, big_b, big_c, big_d] = p.coefficients();
    let mut amps = vec![ZERO; 16];
    for (idx, v) in [
        (0b0000, big_a),
        (0b1111, big_a),
        (0b0011, big_c),
        (0b1100, big_c),
        (0b0101, big_b),
        (0b1010, big_b),
        (0b0110, big_d),
        (0b1001, big_d),
    ] {
        amps[idx] = v;
    }
    Ok(StateVector::from_amplitudes(4, amps)?)
}

fn check_mg4(c: f64) -> Result<(), ClaimError> {
    if !(0.0..=FRAC_1_SQRT_2 + 1e-12).contains(&c) {
        return Err(ClaimError::OutOfRange { name: "c", value: c, min: 0.0, max: FRAC_1_SQRT_2 });
    }
    Ok(())
}

/// Normal-form parameters of the `MG4(c)` family: `A = c`, `C = i sqrt(1/2 - c^2)`.
pub fn mg4_params(c: f64) -> Result<NormalFormParams, ClaimError> {
    check_mg4(c)?;
    let s = (0.5 - c * c).max(0.0).sqrt();
    Ok(NormalFormParams::from_abcd_coefficients(Complex64::new(c, 0.0), ZERO, I * s, ZERO))
}

/// `c (|0000> + |1111>) + i sqrt(1/2 - c^2) (|0011> + |1100>)`
pub fn mg4(c: f64) -> Result<StateVector, ClaimError> {
    check_mg4(c)?;
    let s = I * (0.5 - c * c).max(0.0).sqrt();
    let mut amps = vec![ZERO; 16];
    amps[0b0000] = Complex64::new(c, 0.0);
    amps[0b1111] = Complex64::new(c, 0.0);
    amps[0b0011] = s;
    amps[0b1100] = s;
    Ok(StateVector::from_amplitudes(4, amps)?)
}
