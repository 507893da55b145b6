//! Distance bounds for `N`-qubit Markovian dephasing and their asymptotes.
//!
//! Integrating `sqrt(C_Q^opt) / 2` over time in the angle `theta = arccos e^{-gamma t}`
//! gives
//!
//! ```text
//! D <= 1/2 integral_0^theta_tau sqrt(A sin^2 / (N q sin^2 + cos^2) + B) d theta,
//!     A = r^2 N^2 V,  B = N V / q,
//! ```
//!
//! whose integrand is smooth on `[0, pi/2]`. For `N q = 1` this is an
//! incomplete elliptic integral of parameter `-r^2`.

use std::f64::consts::FRAC_PI_2;

use crate::elliptic::{elliptic_e, elliptic_e_param};
use crate::error::{Error, Result};
use crate::quadrature::integrate;

const QUAD_REL_TOL: f64 = 1e-13;

/// `arccos e^{-gt}`, accurate for small `gt`.
pub fn dephasing_angle(gt: f64) -> f64 {
    let c = (-gt).exp();
    let s = (-(-2.0 * gt).exp_m1()).sqrt();
    s.atan2(c)
}

fn check(gt: f64, r: f64, var: f64, n: usize, q: f64) -> Result<()> {
    if gt < 0.0 || gt.is_nan() {
        return Err(Error::NegativeTime(gt));
    }
    if r < 0.0 || !r.is_finite() {
        return Err(Error::DomainError(format!("r = {r} must be finite and >= 0")));
    }
    if !(0.0..=1.0 + 1e-12).contains(&var) {
        return Err(Error::DomainError(format!("variance {var} outside [0, 1]")));
    }
    if n == 0 || !(q > 0.0 && q <= 1.0 + 1e-12) {
        return Err(Error::DomainError(format!("need N >= 1 and q in (0, 1], got {n}, {q}")));
    }
    Ok(())
}

/// Upper bound on the Bures angle reached after `gt = gamma tau`, for an
/// `N`-qubit state with collective moments `V = <Delta Z^2>` and `q`.
pub fn dephasing_distance_bound(gt: f64, r: f64, var_script_z: f64, n: usize, q: f64) -> Result<f64> {
    check(gt, r, var_script_z, n, q)?;
    if gt == 0.0 || var_script_z == 0.0 {
        return Ok(0.0);
    }
    let theta = if gt.is_infinite() { FRAC_PI_2 } else { dephasing_angle(gt) };
    let nf = n as f64;
    let nq = nf * q;
    if (nq - 1.0).abs() <= 1e-12 {
        return Ok(0.5 * nf * var_script_z.sqrt() * elliptic_e_param(theta, -r * r)?);
    }
    let a = r * r * nf * nf * var_script_z;
    let b = nf * var_script_z / q;
    let res = integrate(
        |th: f64| {
            let s2 = th.sin().powi(2);
            (a * s2 / (nq * s2 + (1.0 - s2)) + b).sqrt()
        },
        0.0,
        theta,
        0.0,
        QUAD_REL_TOL,
    )?;
    Ok(0.5 * res.value)
}

/// Single-qubit bound in the complementary-modulus form
/// `1/2 sqrt(V) sqrt(r^2+1) [E(pi/2, k) - E(arcsin e^{-gt}, k)]`, `k = r / sqrt(r^2+1)`.
pub fn single_qubit_elliptic_bound(gt: f64, r: f64, var_z: f64) -> Result<f64> {
    check(gt, r, var_z, 1, 1.0)?;
    let k = r / (r * r + 1.0).sqrt();
    let lower = elliptic_e((-gt).exp().min(1.0).asin(), k)?;
    Ok(0.5 * var_z.sqrt() * (r * r + 1.0).sqrt() * (elliptic_e(FRAC_PI_2, k)? - lower))
}

/// Symmetric product state of `N` qubits, each with `<Delta Z^2> = var_z`.
pub fn separable_distance_bound(gt: f64, r: f64, var_z: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::DomainError("N must be >= 1".into()));
    }
    dephasing_distance_bound(gt, r, var_z / n as f64, n, 1.0 / n as f64)
}

/// Most general bound, attained at `q = 1`, `<Delta Z^2> = 1` (GHZ).
pub fn ghz_distance_bound(gt: f64, r: f64, n: usize) -> Result<f64> {
    dephasing_distance_bound(gt, r, 1.0, n, 1.0)
}

/// `tau -> infinity` limit of the single-qubit bound with `<Delta Z^2> = 1`.
pub fn exclusion_limit(r: f64) -> Result<f64> {
    if r < 0.0 || !r.is_finite() {
        return Err(Error::DomainError(format!("r = {r} must be finite and >= 0")));
    }
    Ok(0.5 * elliptic_e_param(FRAC_PI_2, -r * r)?)
}

/// `r` at which [`exclusion_limit`] reaches `pi/2`; below it no state can
/// become orthogonal to its initial state.
pub fn critical_ratio() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if exclusion_limit(mid).unwrap() < FRAC_PI_2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_target(n: usize, r: f64, d: f64) -> Result<()> {
    if n == 0 || !(r > 0.0) || !(d > 0.0 && d < FRAC_PI_2) {
        return Err(Error::DomainError(format!(
            "need N >= 1, r > 0, 0 < D < pi/2; got {n}, {r}, {d}"
        )));
    }
    Ok(())
}

/// Large-`r`, large-`N` estimate of the GHZ bound: `gamma tau = (1/N) (2D/r) (1 + D/r)`.
pub fn ghz_tau_asymptote(n: usize, r: f64, d: f64) -> Result<f64> {
    check_target(n, r, d)?;
    Ok(2.0 * d / r * (1.0 + d / r) / n as f64)
}

/// Separable-state asymptotes `((1/N) 2 D^2 / V, (1/sqrt N) 2 D / (r sqrt V))`,
/// valid respectively for small `gamma tau` and for large `r`.
pub fn separable_tau_asymptotes(n: usize, r: f64, var_z: f64, d: f64) -> Result<(f64, f64)> {
    check_target(n, r, d)?;
    if !(var_z > 0.0 && var_z <= 1.0) {
        return Err(Error::DomainError(format!("variance {var_z} outside (0, 1]")));
    }
    let nf = n as f64;
    Ok((2.0 * d * d / var_z / nf, 2.0 * d / (r * var_z.sqrt()) / nf.sqrt()))
}

/// Where the two separable asymptotes meet: `(gamma tau_tr, N_tr) = (2 / r^2, r^2 D^2 / V)`.
pub fn separable_transition_estimate(r: f64, var_z: f64, d: f64) -> Result<(f64, f64)> {
    check_target(1, r, d)?;
    if !(var_z > 0.0 && var_z <= 1.0) {
        return Err(Error::DomainError(format!("variance {var_z} outside (0, 1]")));
    }
    Ok((2.0 / (r * r), r * r * d * d / var_z))
}
