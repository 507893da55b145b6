//! Incomplete elliptic integrals of the second kind via Carlson's symmetric forms.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

// Truncation error of the series below scales as the sixth power of this.
const CARLSON_TOL: f64 = 1e-3;

/// Carlson's `R_F(x, y, z)`; at most one argument may be zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    loop {
        let mu = (x + y + z) / 3.0;
        let dx = 1.0 - x / mu;
        let dy = 1.0 - y / mu;
        let dz = 1.0 - z / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < CARLSON_TOL {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
}

/// Carlson's `R_D(x, y, z)`; `z > 0` and at most one of `x, y` zero.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    loop {
        let mu = (x + y + 3.0 * z) / 5.0;
        let dx = 1.0 - x / mu;
        let dy = 1.0 - y / mu;
        let dz = 1.0 - z / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < CARLSON_TOL {
            let ea = dx * dy;
            let eb = dz * dz;
            let ec = ea - eb;
            let ed = ea - 6.0 * eb;
            let ee = ed + ec + ec;
            let s = 1.0
                + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 9.0 / 52.0 * dz * ee)
                + dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + dz * 3.0 / 26.0 * ea));
            return 3.0 * sum + fac * s / (mu * mu.sqrt());
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lambda));
        fac *= 0.25;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
}

/// `E(phi | m) = integral_0^phi sqrt(1 - m sin^2 t) dt` for `m sin^2 phi <= 1`;
/// `m` may be negative.
pub fn elliptic_e_param(phi: f64, m: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&phi) || !m.is_finite() {
        return Err(Error::DomainError(format!("E(phi | m) needs phi in [0, pi/2], got {phi}")));
    }
    let (s, c) = phi.sin_cos();
    let s2 = s * s;
    let y = 1.0 - m * s2;
    if y < -1e-15 {
        return Err(Error::DomainError(format!("m sin^2 phi = {} > 1", m * s2)));
    }
    if phi == 0.0 {
        return Ok(0.0);
    }
    let y = y.max(0.0);
    let c2 = c * c;
    if c2 == 0.0 && y == 0.0 {
        // E(pi/2 | 1)
        return Ok(1.0);
    }
    Ok(s * carlson_rf(c2, y, 1.0) - m * s * s2 * carlson_rd(c2, y, 1.0) / 3.0)
}

/// `E(phi, k)` with modulus `k` in [0, 1].
pub fn elliptic_e(phi: f64, k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::DomainError(format!("modulus {k} outside [0, 1]")));
    }
    if k == 1.0 {
        if !(0.0..=FRAC_PI_2).contains(&phi) {
            return Err(Error::DomainError(format!("phi {phi} outside [0, pi/2]")));
        }
        return Ok(phi.sin());
    }
    elliptic_e_param(phi, k * k)
}
