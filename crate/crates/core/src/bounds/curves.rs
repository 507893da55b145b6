//! Bound families behind one interface, inversion to minimal times, and sampled curves.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use super::dephasing::{
    dephasing_distance_bound, exclusion_limit, ghz_distance_bound, separable_distance_bound,
    single_qubit_elliptic_bound,
};
use super::length::{amp_damp_distance_bound, bures_length};
use super::purification::cq_opt_1q;
use crate::error::{Error, Result};
use crate::qfi::Trajectory;
use crate::quadrature::integrate;

/// Largest `gamma tau` tried while bracketing a target distance.
const MAX_BRACKET: f64 = 1e6;
/// Quadrature tolerance of the Bures-length family.
const LENGTH_QUAD_TOL: f64 = 1e-12;

/// Distance bound as a function of dimensionless time.
///
/// Every family except [`BoundFamily::BuresLength`] takes `gamma tau`; the
/// Bures length takes absolute time on its trajectory.
#[derive(Debug, Clone)]
pub enum BoundFamily {
    /// Bures length of an explicit trajectory.
    BuresLength(Trajectory),
    /// Quadrature of the optimized single-qubit purification bound.
    CqOptQubit { r: f64, var_z: f64 },
    /// Closed elliptic form of the single-qubit dephasing bound.
    EllipticQubit { r: f64, var_z: f64 },
    /// Amplitude damping with initial excited population `n_excited`.
    AmpDampClosed { n_excited: f64 },
    /// Most general `N`-qubit dephasing bound (`q = 1`).
    GhzGeneral { r: f64, n: usize },
    /// Symmetric separable `N`-qubit states with per-qubit variance `var_z`.
    SeparableElliptic { r: f64, var_z: f64, n: usize },
    /// Large-`r` GHZ estimate `gamma tau = (2D/r)(1 + D/r) / N`, read as a distance.
    GhzAsymptote { r: f64, n: usize },
}

impl BoundFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::BuresLength(_) => "bures_length",
            Self::CqOptQubit { .. } => "cq_opt_qubit",
            Self::EllipticQubit { .. } => "elliptic_qubit",
            Self::AmpDampClosed { .. } => "amp_damp_closed",
            Self::GhzGeneral { .. } => "ghz_general",
            Self::SeparableElliptic { .. } => "separable_elliptic",
            Self::GhzAsymptote { .. } => "ghz_asymptote",
        }
    }

    /// Upper bound on the Bures angle reached after time `x`.
    pub fn distance_bound(&self, x: f64) -> Result<f64> {
        match self {
            Self::BuresLength(tr) => bures_length(tr, x, LENGTH_QUAD_TOL),
            Self::CqOptQubit { r, var_z } => {
                if x < 0.0 {
                    return Err(Error::NegativeTime(x));
                }
                if x == 0.0 {
                    return Ok(0.0);
                }
                // u^2 = e^{2 gt} - 1 removes the 1/sqrt(t) endpoint behavior
                let (r, v) = (*r, *var_z);
                let u_max = (2.0 * x).exp_m1().sqrt();
                let res = integrate(
                    |u: f64| {
                        if u == 0.0 {
                            return v.sqrt();
                        }
                        let gt = 0.5 * (u * u).ln_1p();
                        let c = cq_opt_1q(gt, r, 1.0, v).unwrap_or(0.0);
                        // dt = u / (1 + u^2) du
                        0.5 * c.sqrt() * u / (1.0 + u * u)
                    },
                    0.0,
                    u_max,
                    0.0,
                    1e-13,
                )?;
                Ok(res.value)
            }
            Self::EllipticQubit { r, var_z } => single_qubit_elliptic_bound(x, *r, *var_z),
            Self::AmpDampClosed { n_excited } => amp_damp_distance_bound(x, *n_excited),
            Self::GhzGeneral { r, n } => ghz_distance_bound(x, *r, *n),
            Self::SeparableElliptic { r, var_z, n } => separable_distance_bound(x, *r, *var_z, *n),
            Self::GhzAsymptote { r, n } => {
                if x < 0.0 {
                    return Err(Error::NegativeTime(x));
                }
                Ok(0.5 * r * ((1.0 + 2.0 * *n as f64 * x).sqrt() - 1.0))
            }
        }
    }

    /// `tau -> infinity` value of the distance bound, when finite and known.
    pub fn limit(&self) -> Result<Option<f64>> {
        Ok(match self {
            Self::BuresLength(_) | Self::GhzAsymptote { .. } => None,
            Self::CqOptQubit { r, var_z } | Self::EllipticQubit { r, var_z } => {
                Some(var_z.sqrt() * exclusion_limit(*r)?)
            }
            Self::AmpDampClosed { n_excited } => Some(n_excited.sqrt() * FRAC_PI_2),
            Self::GhzGeneral { r, n } => Some(dephasing_distance_bound(f64::INFINITY, *r, 1.0, *n, 1.0)?),
            Self::SeparableElliptic { r, var_z, n } => Some(separable_distance_bound(f64::INFINITY, *r, *var_z, *n)?),
        })
    }

    fn abscissa_cap(&self) -> f64 {
        match self {
            Self::BuresLength(tr) => tr.t_max,
            _ => MAX_BRACKET,
        }
    }
}

/// Minimal time at which `family` allows the Bures angle `d_target`.
///
/// Brackets by doubling and halving, then bisects until the bound is within
/// `1e-10 d_target` of the target or the bracket collapses.
pub fn invert_bound(family: &BoundFamily, d_target: f64) -> Result<f64> {
    if d_target < 0.0 || !d_target.is_finite() {
        return Err(Error::DomainError(format!("target distance {d_target} must be >= 0")));
    }
    if d_target == 0.0 {
        return Ok(0.0);
    }
    if let Some(limit) = family.limit()? {
        if d_target >= limit {
            return Err(Error::Unreachable { limit });
        }
    }
    let f = |x: f64| family.distance_bound(x);
    let cap = family.abscissa_cap();
    let mut hi = 1.0f64.min(cap);
    let mut f_hi = f(hi)?;
    while f_hi < d_target {
        if hi >= cap {
            return Err(Error::Unreachable { limit: f_hi });
        }
        hi = (2.0 * hi).min(cap);
        f_hi = f(hi)?;
    }
    let mut lo = 0.5 * hi;
    while f(lo)? >= d_target {
        hi = lo;
        lo *= 0.5;
        if lo < 1e-300 {
            return Ok(hi);
        }
    }
    let tol = 1e-10 * d_target;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(hi);
        }
        let v = f(mid)?;
        if (v - d_target).abs() <= tol {
            return Ok(mid);
        }
        if v < d_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Absolute time from a dimensionless one: `x / rate`, where the rate is
/// `gamma`, or `omega0` when `gamma = 0`.
pub fn to_absolute_time(x: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(Error::DomainError(format!("rate must be positive, got {rate}")));
    }
    Ok(x / rate)
}

/// Which coordinate a curve is sampled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Abscissa {
    /// Samples are `(time, distance bound)`.
    Time,
    /// Samples are `(distance, minimal time)`.
    Distance,
}

/// Sampled bound with its family.
#[derive(Debug, Clone)]
pub struct BoundCurve {
    pub family: BoundFamily,
    pub abscissa: Abscissa,
    pub samples: Vec<(f64, f64)>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::DomainError("abscissa must be strictly increasing".into()));
    }
    Ok(())
}

impl BoundCurve {
    /// Distance bound at each time of `grid`.
    pub fn over_time(family: BoundFamily, grid: &[f64]) -> Result<Self> {
        check_grid(grid)?;
        let samples = grid
            .par_iter()
            .map(|&x| family.distance_bound(x).map(|d| (x, d)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            family,
            abscissa: Abscissa::Time,
            samples,
        })
    }

    /// Minimal time for each distance of `grid`.
    pub fn over_distance(family: BoundFamily, grid: &[f64]) -> Result<Self> {
        check_grid(grid)?;
        let samples = grid
            .par_iter()
            .map(|&d| invert_bound(&family, d).map(|t| (d, t)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            family,
            abscissa: Abscissa::Distance,
            samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelDescriptor;
    use crate::linalg::pauli_x;
    use crate::states::DensityOperator;
    use std::f64::consts::{FRAC_PI_4, LN_2, PI};

    #[test]
    fn amp_damp_inversion() {
        let t = invert_bound(&BoundFamily::AmpDampClosed { n_excited: 1.0 }, FRAC_PI_4).unwrap();
        assert!((t - LN_2).abs() < 1e-9);
    }

    #[test]
    fn exclusion_window_is_unreachable() {
        let fam = BoundFamily::EllipticQubit { r: 2.0, var_z: 1.0 };
        assert!(matches!(invert_bound(&fam, FRAC_PI_2), Err(Error::Unreachable { .. })));
        let reachable = BoundFamily::EllipticQubit { r: 3.0, var_z: 1.0 };
        assert!(invert_bound(&reachable, FRAC_PI_2).is_ok());
    }

    #[test]
    fn zero_target_for_all_families() {
        let families = vec![
            BoundFamily::CqOptQubit { r: 8.0, var_z: 1.0 },
            BoundFamily::EllipticQubit { r: 8.0, var_z: 1.0 },
            BoundFamily::AmpDampClosed { n_excited: 0.5 },
            BoundFamily::GhzGeneral { r: 8.0, n: 4 },
            BoundFamily::SeparableElliptic { r: 8.0, var_z: 1.0, n: 4 },
            BoundFamily::GhzAsymptote { r: 8.0, n: 4 },
        ];
        for f in &families {
            assert_eq!(invert_bound(f, 0.0).unwrap(), 0.0, "{}", f.name());
        }
    }

    #[test]
    fn quadrature_and_elliptic_qubit_agree() {
        for r in [0.0, 1.0, 8.0] {
            for gt in [0.01, 0.5, 3.0] {
                let a = BoundFamily::CqOptQubit { r, var_z: 0.6 }.distance_bound(gt).unwrap();
                let b = BoundFamily::EllipticQubit { r, var_z: 0.6 }.distance_bound(gt).unwrap();
                assert!((a - b).abs() < 1e-10, "r={r} gt={gt}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn asymptote_family_inverts_to_formula() {
        let d = 0.1f64.acos();
        let t = invert_bound(&BoundFamily::GhzAsymptote { r: 8.0, n: 50 }, d).unwrap();
        let expected = super::super::dephasing::ghz_tau_asymptote(50, 8.0, d).unwrap();
        assert!((t - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn rabi_length_inversion() {
        let omega = 1.0;
        let ch = ChannelDescriptor::hamiltonian(&pauli_x().scale_real(omega / 2.0)).unwrap();
        let tr = Trajectory::new(ch, DensityOperator::basis(2, 0).unwrap(), 10.0).unwrap();
        let t = invert_bound(&BoundFamily::BuresLength(tr), FRAC_PI_2).unwrap();
        assert!((t - PI / omega).abs() < 1e-9, "{}", t - PI);
    }

    #[test]
    fn curves_are_ordered() {
        let grid: Vec<f64> = (1..=20).map(|i| 0.1 * i as f64).collect();
        let c = BoundCurve::over_time(BoundFamily::EllipticQubit { r: 8.0, var_z: 1.0 }, &grid).unwrap();
        assert_eq!(c.samples.len(), 20);
        assert!(c.samples.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!(BoundCurve::over_time(BoundFamily::AmpDampClosed { n_excited: 1.0 }, &[1.0, 0.5]).is_err());
        assert!((to_absolute_time(2.0, 4.0).unwrap() - 0.5).abs() < 1e-16);
    }
}
