//! Derivative-free minimization: coarse grid followed by coordinate descent
//! with parabolic line searches.

/// Result of [`minimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Search box and stopping rule.
#[derive(Debug, Clone)]
pub struct SearchBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Grid points per coordinate in the initial scan.
    pub grid: usize,
    /// Stop when a full sweep improves the value by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl SearchBox {
    pub fn cube(dim: usize, half_width: f64) -> Self {
        Self {
            lower: vec![-half_width; dim],
            upper: vec![half_width; dim],
            grid: 7,
            tol: 1e-14,
            max_sweeps: 500,
        }
    }
}

/// Minimizes `f` starting from the best point of a regular grid over the box.
/// The descent itself is not confined to the box.
pub fn minimize(f: impl Fn(&[f64]) -> f64, bx: &SearchBox) -> Minimum {
    let dim = bx.lower.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        f(x)
    };

    let g = bx.grid.max(2);
    let total = g.pow(dim as u32);
    let mut best = bx.lower.clone();
    let mut best_val = f64::INFINITY;
    let mut x = vec![0.0; dim];
    for idx in 0..total {
        let mut rem = idx;
        for ((xd, lo), hi) in x.iter_mut().zip(&bx.lower).zip(&bx.upper) {
            let k = rem % g;
            rem /= g;
            *xd = lo + (hi - lo) * k as f64 / (g - 1) as f64;
        }
        let v = eval(&x);
        if v < best_val {
            best_val = v;
            best.copy_from_slice(&x);
        }
    }

    let mut steps: Vec<f64> = (0..dim).map(|d| (bx.upper[d] - bx.lower[d]) / (g - 1) as f64).collect();
    for _ in 0..bx.max_sweeps {
        let start = best_val;
        for d in 0..dim {
            let s = steps[d];
            let x0 = best[d];
            let mut probe = best.clone();
            probe[d] = x0 - s;
            let fm = eval(&probe);
            probe[d] = x0 + s;
            let fp = eval(&probe);
            let curvature = fp - 2.0 * best_val + fm;
            let mut candidates = vec![(fm, x0 - s), (fp, x0 + s)];
            if curvature > 0.0 {
                let vertex = x0 - 0.5 * s * (fp - fm) / curvature;
                probe[d] = vertex;
                candidates.push((eval(&probe), vertex));
            }
            let (v, xv) = candidates
                .into_iter()
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .unwrap();
            if v < best_val {
                best_val = v;
                best[d] = xv;
                steps[d] = (2.0 * (xv - x0).abs()).max(s * 0.5).max(1e-12);
            } else {
                steps[d] = (s * 0.5).max(1e-12);
            }
        }
        let improvement = start - best_val;
        if improvement.abs() <= bx.tol * (1.0 + best_val.abs()) && steps.iter().all(|&s| s < 1e-8) {
            break;
        }
    }
    Minimum {
        point: best,
        value: best_val,
        evaluations,
    }
}
