//! Bures length along a trajectory and the closed-form unitary and
//! amplitude-damping bounds.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::qfi::{sld_and_qfi_with, SldOptions, Trajectory};
use crate::quadrature::integrate;

/// SLD rank cutoff used inside [`bures_length`]. Populations that start at
/// zero carry an integrable `1/t` divergence of the QFI, which the default
/// cutoff would discard for `t` below about `1e-10`.
const LENGTH_RANK_TOL: f64 = 1e-14;

/// `integral_0^tau sqrt(F_Q(t)) / 2 dt`, in radians.
///
/// Integrates in `s = sqrt(t)` so that `1/sqrt(t)` endpoint behavior becomes smooth.
pub fn bures_length(tr: &Trajectory, tau: f64, quad_tol: f64) -> Result<f64> {
    if tau < 0.0 || !tau.is_finite() {
        return Err(Error::NegativeTime(tau));
    }
    if tau > tr.t_max {
        return Err(Error::DomainEdge {
            t: tau,
            margin: tau - tr.t_max,
        });
    }
    if !(quad_tol > 0.0) {
        return Err(Error::DomainError(format!("quad_tol must be positive, got {quad_tol}")));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let mut failure = None;
    let integrand = |s: f64| {
        let t = s * s;
        let opts = SldOptions {
            step: Some(Trajectory::default_step(t).min(0.5 * t)),
            rank_tol: LENGTH_RANK_TOL,
            unchecked_domain: true,
        };
        match sld_and_qfi_with(tr, t, opts) {
            Ok(r) => s * r.qfi.max(0.0).sqrt(),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let res = integrate(integrand, 0.0, tau.sqrt(), quad_tol, 0.0)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(res.value),
    }
}

/// `D / sqrt(<Delta H^2>)` (hbar = 1).
pub fn mandelstam_tamm_tau(var_h: f64, d: f64) -> Result<f64> {
    if !(var_h > 0.0) {
        return Err(Error::DomainError(format!("energy variance must be positive, got {var_h}")));
    }
    if !(0.0..=FRAC_PI_2).contains(&d) {
        return Err(Error::DomainError(format!("distance {d} outside [0, pi/2]")));
    }
    Ok(d / var_h.sqrt())
}

/// Minimal `gamma tau` to reach Bures angle `d` under amplitude damping,
/// `2 ln sec(d / sqrt(n))`, where `n` is the initial excited population.
pub fn amp_damp_tau_bound(d: f64, n_excited: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&n_excited) {
        return Err(Error::DomainError(format!("excited population {n_excited} outside [0, 1]")));
    }
    if d < 0.0 || !d.is_finite() {
        return Err(Error::DomainError(format!("negative distance {d}")));
    }
    if d == 0.0 {
        return Ok(0.0);
    }
    if n_excited == 0.0 {
        return Err(Error::ZeroExcitation);
    }
    let x = d / n_excited.sqrt();
    if x >= FRAC_PI_2 {
        return Err(Error::DomainError(format!(
            "distance {d} at or beyond the reachable limit {}",
            n_excited.sqrt() * FRAC_PI_2
        )));
    }
    Ok(-2.0 * x.cos().ln())
}

/// Distance bound after `gamma tau` of amplitude damping: `sqrt(n) arccos(e^{-gamma tau / 2})`.
pub fn amp_damp_distance_bound(gt: f64, n_excited: f64) -> Result<f64> {
    if gt < 0.0 {
        return Err(Error::NegativeTime(gt));
    }
    if !(0.0..=1.0).contains(&n_excited) {
        return Err(Error::DomainError(format!("excited population {n_excited} outside [0, 1]")));
    }
    // arccos(e^{-x/2}) written via atan2 to keep precision at small x
    let c = (-0.5 * gt).exp();
    let s = (-(-gt).exp_m1()).sqrt();
    Ok(n_excited.sqrt() * s.atan2(c))
}
