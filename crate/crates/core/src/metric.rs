//! Fidelity-based distances and the curvature prefactor of the general bound.
//!
//! Any distance `D(F_B)` that is smooth near `F_B = 1` yields the bound
//! `c_D * D(0, tau) <= integral sqrt(F_Q / 4) dt`, where
//! `c_D = lim_{F_B -> 1} sqrt(D''(F_B) / (2 D'(F_B)^3))`. Both derivatives diverge
//! at the limit, so they are evaluated in the variable `eps = 1 - F_B` at a
//! geometric sequence of points and the ratio is extrapolated to `eps = 0`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A distance expressed as a function of the Bures fidelity.
#[derive(Clone)]
pub struct MetricFunction {
    name: String,
    evaluator: Evaluator,
}

impl fmt::Debug for MetricFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricFunction").field("name", &self.name).finish()
    }
}

impl MetricFunction {
    pub fn new(name: impl Into<String>, evaluator: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            evaluator: Arc::new(evaluator),
        }
    }

    /// `arccos sqrt(F_B)`, the geodesic distance of the Bures metric.
    pub fn bures_angle() -> Self {
        Self::new("bures_angle", |f: f64| f.clamp(0.0, 1.0).sqrt().acos())
    }

    /// `sqrt(2 (1 - sqrt(F_B)))`.
    pub fn bures_distance() -> Self {
        Self::new("bures_distance", |f: f64| (2.0 * (1.0 - f.clamp(0.0, 1.0).sqrt())).sqrt())
    }

    /// `k * D` for a rescaled copy of this metric.
    pub fn scaled(&self, k: f64) -> Self {
        let inner = self.evaluator.clone();
        Self {
            name: format!("{k}*{}", self.name),
            evaluator: Arc::new(move |f| k * inner(f)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn evaluate(&self, fidelity: f64) -> f64 {
        (self.evaluator)(fidelity)
    }

    fn at_eps(&self, eps: f64) -> f64 {
        self.evaluate(1.0 - eps)
    }
}

const EPS_START: f64 = 1e-2;
const EPS_STOP: f64 = 1e-6;
const RICHARDSON_ORDER: usize = 3;
const CONVERGENCE_TOL: f64 = 1e-4;

/// Central differences of `f` at `x` with step `h`, extrapolated over `h, h/2, h/4`.
fn richardson_derivatives(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
    let fx = f(x);
    let level = |h: f64| {
        let (fp, fm) = (f(x + h), f(x - h));
        ((fp - fm) / (2.0 * h), (fp - 2.0 * fx + fm) / (h * h))
    };
    let l0 = level(h);
    let l1 = level(h / 2.0);
    let l2 = level(h / 4.0);
    let r = |a: f64, b: f64, c: f64| {
        let ab = (4.0 * b - a) / 3.0;
        let bc = (4.0 * c - b) / 3.0;
        (16.0 * bc - ab) / 15.0
    };
    (r(l0.0, l1.0, l2.0), r(l0.1, l1.1, l2.1))
}

fn check_admissible(d: &MetricFunction) -> Result<()> {
    let at_one = d.evaluate(1.0);
    if !at_one.is_finite() || at_one.abs() > 1e-12 {
        return Err(Error::DomainError(format!(
            "metric {} does not vanish at F_B = 1 (D(1) = {at_one})",
            d.name
        )));
    }
    let mut prev = 0.0;
    let mut eps = EPS_STOP;
    while eps <= EPS_START * 1.0001 {
        let v = d.at_eps(eps);
        if !v.is_finite() || v < prev {
            return Err(Error::DomainError(format!(
                "metric {} is not non-increasing in F_B near 1",
                d.name
            )));
        }
        prev = v;
        eps *= 2.0;
    }
    Ok(())
}

/// Curvature prefactor `lim_{F_B -> 1} sqrt(D'' / (2 D'^3))` of a fidelity-based metric.
pub fn curvature_factor(d: &MetricFunction) -> Result<f64> {
    check_admissible(d)?;
    let g = |e: f64| d.at_eps(e);

    let mut samples = Vec::new();
    let mut eps = EPS_START;
    while eps >= EPS_STOP {
        // in eps: dD/dF = -dD/deps, d2D/dF2 = d2D/deps2
        let (d1, d2) = richardson_derivatives(&g, eps, eps / 4.0);
        let radicand = -d2 / (2.0 * d1 * d1 * d1);
        if !radicand.is_finite() || radicand < 0.0 {
            return Err(Error::NonConvergent(format!(
                "metric {} has a non-positive curvature ratio {radicand} at eps = {eps:e}",
                d.name
            )));
        }
        samples.push(radicand.sqrt());
        eps /= 2.0;
    }

    // Neville table in eps with ratio 1/2: error terms eps, eps^2, ...
    let n = samples.len();
    let mut table = vec![samples.clone()];
    for j in 1..=RICHARDSON_ORDER {
        let prev = &table[j - 1];
        let p = f64::powi(2.0, j as i32);
        let col: Vec<f64> = (1..prev.len())
            .map(|k| (p * prev[k] - prev[k - 1]) / (p - 1.0))
            .collect();
        table.push(col);
    }
    let last = &table[RICHARDSON_ORDER];
    let m = last.len();
    if m < 2 {
        return Err(Error::NonConvergent(format!("only {n} samples")));
    }
    let (a, b) = (last[m - 1], last[m - 2]);
    if !a.is_finite() || (a - b).abs() > CONVERGENCE_TOL {
        return Err(Error::NonConvergent(format!(
            "metric {}: extrapolates disagree ({a} vs {b})",
            d.name
        )));
    }
    Ok(a)
}

/// Left-hand side of the general bound, `c_D * D(F_B)`, for a given fidelity.
pub fn bound_lhs(d: &MetricFunction, fidelity: f64) -> Result<f64> {
    Ok(curvature_factor(d)? * d.evaluate(fidelity))
}
