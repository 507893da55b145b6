//! Invariant suite emitted as pass/fail records.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::csv::CsvDataset;
use crate::bounds::{
    amp_damp_distance_bound, bures_length, cq_general, cq_opt_nq, cq_symmetric, dephasing_distance_bound,
    optimal_env_params, z_moments, EnvGenerator, EnvGeneratorParams, PurifiedEvolution,
};
use crate::channels::{
    evolve, evolve_joint, exact_fidelity_ghz, exact_fidelity_separable, ghz_state, symmetric_product_state,
    ChannelDescriptor, Survival,
};
use crate::elliptic::elliptic_e_param;
use crate::error::Result;
use crate::linalg::{eigh, matrix_sqrt, partial_trace, tensor, ComplexMatrix};
use crate::metric::{curvature_factor, MetricFunction};
use crate::qfi::{qfi_from_fidelity, sld_and_qfi, sld_and_qfi_with, variance_qfi, SldOptions, Trajectory};
use crate::quadrature::integrate;
use crate::states::{bures_angle, bures_fidelity, random_density_with, random_state_vector, DensityOperator, PurityClass};

/// Outcome of one invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantRecord {
    pub name: &'static str,
    pub samples: usize,
    /// Largest measured violation; `f64::MAX` when the check itself errored.
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

struct Ctx {
    samples: usize,
    rank_tol: f64,
}

type Check = fn(&Ctx, &mut ChaCha8Rng) -> Result<(usize, f64)>;

/// Registered invariants: name, tolerance on the violation, check.
const INVARIANTS: &[(&str, f64, Check)] = &[
    ("eigh_reconstruction", 1e-10, eigh_reconstruction),
    ("matrix_sqrt_square", 1e-10, matrix_sqrt_square),
    ("partial_trace_of_product", 1e-12, partial_trace_of_product),
    ("fidelity_symmetry_range", 1e-9, fidelity_symmetry_range),
    ("fidelity_pure_overlap", 1e-10, fidelity_pure_overlap),
    ("dilation_consistency", 1e-10, dilation_consistency),
    ("qfi_nonnegative", 1e-10, qfi_nonnegative),
    ("unitary_qfi_variance", 1e-6, unitary_qfi_variance),
    ("expansion_consistency", 0.0, expansion_consistency),
    ("reparameterization_invariance", 1e-6, reparameterization_invariance),
    ("dephasing_max_distance", 1e-9, dephasing_max_distance),
    ("amp_damp_max_distance", 1e-9, amp_damp_max_distance),
    ("bures_length_validity", 1e-6, bures_length_validity),
    ("qfi_below_purification", 1e-6, qfi_below_purification),
    ("optimizer_minimality", 1e-9, optimizer_minimality),
    ("optimal_params_reproduce_optimum", 1e-9, optimal_params_reproduce_optimum),
    ("q_parameter_laws", 1e-10, q_parameter_laws),
    ("exact_fidelity_oracle", 1e-10, exact_fidelity_oracle),
    ("elliptic_against_quadrature", 1e-12, elliptic_against_quadrature),
    ("curvature_factor_scaling", 1e-6, curvature_factor_scaling),
    ("dephasing_bound_monotone", 0.0, dephasing_bound_monotone),
];

/// Number of invariants [`run_validate`] reports.
pub fn invariant_count() -> usize {
    INVARIANTS.len()
}

/// Runs every invariant with its own stream derived from `cfg.seed`.
pub fn validation_records(cfg: &ExperimentConfig) -> Result<Vec<InvariantRecord>> {
    cfg.validate()?;
    let ctx = Ctx {
        samples: cfg.samples,
        rank_tol: cfg.sld_rank_tol,
    };
    Ok(INVARIANTS
        .par_iter()
        .enumerate()
        .map(|(k, &(name, tolerance, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            let (samples, max_violation) = check(&ctx, &mut rng).unwrap_or((0, f64::MAX));
            InvariantRecord {
                name,
                samples,
                max_violation,
                tolerance,
                pass: samples > 0 && max_violation <= tolerance,
            }
        })
        .collect())
}

pub fn run_validate(cfg: &ExperimentConfig) -> Result<CsvDataset> {
    records_dataset(&validation_records(cfg)?)
}

/// CSV form of a set of records.
pub fn records_dataset(records: &[InvariantRecord]) -> Result<CsvDataset> {
    let mut ds = CsvDataset::new(&[
        ("name", "label"),
        ("samples", "1"),
        ("max_violation", "1"),
        ("tolerance", "1"),
        ("pass", "bool"),
    ]);
    for rec in records {
        ds.push(vec![
            rec.name.into(),
            rec.samples.into(),
            rec.max_violation.into(),
            rec.tolerance.into(),
            rec.pass.into(),
        ])?;
    }
    Ok(ds)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let data = (0..dim * dim)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    ComplexMatrix::new(dim, data).unwrap().hermitian_part()
}

fn random_class(rng: &mut ChaCha8Rng) -> PurityClass {
    if rng.random_bool(0.5) {
        PurityClass::Pure
    } else {
        PurityClass::Mixed
    }
}

fn random_qubit_channel(rng: &mut ChaCha8Rng) -> ChannelDescriptor {
    let gamma = rng.random_range(0.2..2.0);
    if rng.random_bool(0.5) {
        ChannelDescriptor::amplitude_damping(gamma)
    } else {
        ChannelDescriptor::dephasing(gamma, gamma * rng.random_range(0.0..10.0))
    }
}

fn eigh_reconstruction(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let h = random_hermitian(rng.random_range(2..=8), rng);
        let e = eigh(&h)?;
        worst = worst.max(e.reconstruct().max_abs_diff(&h) / h.max_norm().max(1.0));
    }
    Ok((ctx.samples, worst))
}

fn matrix_sqrt_square(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let rho = random_density_with(rng.random_range(2..=8), random_class(rng), rng)?;
        let s = matrix_sqrt(rho.matrix())?;
        worst = worst.max(s.matmul(&s).max_abs_diff(rho.matrix()));
    }
    Ok((ctx.samples, worst))
}

fn partial_trace_of_product(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let (da, db) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let a = random_density_with(da, PurityClass::Mixed, rng)?;
        let b = random_density_with(db, PurityClass::Mixed, rng)?;
        let ab = tensor(a.matrix(), b.matrix())?;
        worst = worst.max(partial_trace(&ab, &[0], &[da, db])?.max_abs_diff(a.matrix()));
        worst = worst.max(partial_trace(&ab, &[1], &[da, db])?.max_abs_diff(b.matrix()));
    }
    Ok((ctx.samples, worst))
}

fn fidelity_symmetry_range(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let dim = rng.random_range(2..=6);
        let a = random_density_with(dim, random_class(rng), rng)?;
        let b = random_density_with(dim, random_class(rng), rng)?;
        let (fab, fba) = (bures_fidelity(&a, &b)?, bures_fidelity(&b, &a)?);
        let self_f = bures_fidelity(&a, &a)?;
        worst = worst
            .max((fab - fba).abs())
            .max((self_f - 1.0).abs())
            .max(-fab.min(0.0))
            .max((fab - 1.0).max(0.0));
    }
    Ok((ctx.samples, worst))
}

fn fidelity_pure_overlap(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let dim = rng.random_range(2..=6);
        let (u, v) = (random_state_vector(dim, rng), random_state_vector(dim, rng));
        let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        let f = bures_fidelity(&DensityOperator::pure(&u)?, &DensityOperator::pure(&v)?)?;
        worst = worst.max((f - overlap.norm_sqr()).abs());
    }
    Ok((ctx.samples, worst))
}

fn dilation_consistency(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let ch = match rng.random_range(0..3) {
            0 => ChannelDescriptor::amplitude_damping(rng.random_range(0.1..2.0)),
            1 => ChannelDescriptor::dephasing(rng.random_range(0.1..2.0), rng.random_range(0.0..10.0)),
            _ => ChannelDescriptor::dephasing_n(
                rng.random_range(0.1..2.0),
                rng.random_range(0.0..10.0),
                rng.random_range(2..=3),
            ),
        };
        let psi = random_state_vector(ch.system_dim(), rng);
        let t = rng.random_range(0.0..3.0);
        let joint = evolve_joint(&ch, &psi, t)?.reduced_system();
        let direct = evolve(&ch, &DensityOperator::pure(&psi)?, t)?;
        worst = worst.max(joint.matrix().max_abs_diff(direct.matrix()));
    }
    Ok((ctx.samples, worst))
}

fn qfi_nonnegative(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let ch = random_qubit_channel(rng);
        let rho0 = random_density_with(2, random_class(rng), rng)?;
        let tr = Trajectory::new(ch, rho0, 5.0)?;
        let res = sld_and_qfi(&tr, rng.random_range(0.05..4.0))?;
        worst = worst.max(-res.qfi).max(res.sld.hermitian_deviation());
    }
    Ok((ctx.samples, worst))
}

fn unitary_qfi_variance(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let dim = rng.random_range(2..=4);
        let h = random_hermitian(dim, rng);
        let psi = random_state_vector(dim, rng);
        let rho0 = DensityOperator::pure(&psi)?;
        let expected = variance_qfi(&rho0, &h);
        let tr = Trajectory::new(ChannelDescriptor::hamiltonian(&h)?, rho0, 5.0)?;
        let got = sld_and_qfi(&tr, rng.random_range(0.1..4.0))?.qfi;
        worst = worst.max((got - expected).abs() / expected.max(1.0));
    }
    Ok((ctx.samples, worst))
}

/// Distance of the dt-halving error ratio from `[0.3, 0.7]`.
fn expansion_consistency(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let ch = random_qubit_channel(rng);
        let rho0 = random_density_with(2, random_class(rng), rng)?;
        let tr = Trajectory::new(ch, rho0, 10.0)?;
        let t = rng.random_range(0.05..3.0);
        let opts = SldOptions {
            rank_tol: ctx.rank_tol,
            ..SldOptions::default()
        };
        let exact = sld_and_qfi_with(&tr, t, opts)?.qfi;
        let dt = 1e-3 * t.min(1.0);
        let e1 = (qfi_from_fidelity(&tr, t, dt)? - exact).abs();
        let e2 = (qfi_from_fidelity(&tr, t, 0.5 * dt)? - exact).abs();
        let ratio = e2 / e1;
        let miss = if ratio.is_nan() { 1.0 } else { (0.3 - ratio).max(ratio - 0.7).max(0.0) };
        worst = worst.max(miss);
    }
    Ok((ctx.samples, worst))
}

/// Amplitude damping with `P(t) = exp(-t^2)` against the exponential law at matched `P`.
fn reparameterization_invariance(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let custom = ChannelDescriptor::AmplitudeDamping {
        gamma: 1.0,
        survival: Survival::Custom(Arc::new(|t: f64| (-t * t).exp())),
    };
    let expo = ChannelDescriptor::amplitude_damping(1.0);
    let n = ctx.samples.div_ceil(4);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let rho0 = random_density_with(2, random_class(rng), rng)?;
        let s = rng.random_range(0.1..1.5);
        let a = evolve(&custom, &rho0, s)?;
        let b = evolve(&expo, &rho0, s * s)?;
        worst = worst.max(a.matrix().max_abs_diff(b.matrix()));
        let la = bures_length(&Trajectory::new(custom.clone(), rho0.clone(), 2.0)?, s, 1e-10)?;
        let lb = bures_length(&Trajectory::new(expo.clone(), rho0, 3.0)?, s * s, 1e-10)?;
        worst = worst.max((la - lb).abs());
    }
    Ok((n, worst))
}

fn dephasing_max_distance(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let ch = ChannelDescriptor::dephasing(1.0, 0.0);
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let rho0 = random_density_with(2, random_class(rng), rng)?;
        let mean = rho0.expectation(&crate::linalg::pauli_z());
        let var = (1.0 - mean * mean).max(0.0);
        for k in 1..=40 {
            let gt = 0.25 * k as f64;
            let d = bures_angle(&rho0, &evolve(&ch, &rho0, gt)?)?;
            let bound = dephasing_distance_bound(gt, 0.0, var, 1, 1.0)?;
            worst = worst.max(d - bound).max(d - var.sqrt() * FRAC_PI_4);
        }
    }
    Ok((ctx.samples, worst))
}

fn amp_damp_max_distance(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let ch = ChannelDescriptor::amplitude_damping(1.0);
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let rho0 = random_density_with(2, random_class(rng), rng)?;
        let n = rho0.matrix()[(1, 1)].re;
        for k in 1..=40 {
            let gt = 0.25 * k as f64;
            let d = bures_angle(&rho0, &evolve(&ch, &rho0, gt)?)?;
            worst = worst
                .max(d - amp_damp_distance_bound(gt, n)?)
                .max(d - n.sqrt() * FRAC_PI_2);
        }
    }
    Ok((ctx.samples, worst))
}

fn bures_length_validity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let ch = random_qubit_channel(rng);
        let rho0 = random_density_with(2, random_class(rng), rng)?;
        let tau = rng.random_range(0.01..3.0);
        let tr = Trajectory::new(ch, rho0.clone(), 3.0)?;
        let d = bures_angle(&rho0, &tr.evaluate(tau)?)?;
        worst = worst.max(d - bures_length(&tr, tau, 1e-10)?);
    }
    Ok((ctx.samples, worst))
}

fn qfi_below_purification(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let gamma = rng.random_range(0.2..2.0);
        let (ch, gen) = if rng.random_bool(0.3) {
            (ChannelDescriptor::amplitude_damping(gamma), EnvGenerator::none())
        } else {
            let n = rng.random_range(1..=2);
            let p = EnvGeneratorParams::new(
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            );
            let omega0 = gamma * rng.random_range(0.0..10.0);
            (ChannelDescriptor::dephasing_n(gamma, omega0, n), EnvGenerator::constant(p))
        };
        let rho0 = random_density_with(ch.system_dim(), random_class(rng), rng)?;
        let t = rng.random_range(0.05..3.0);
        let tr = Trajectory::new(ch.clone(), rho0.clone(), 5.0)?;
        let fq = sld_and_qfi(&tr, t)?.qfi;
        let cq = cq_general(&PurifiedEvolution::new(ch, gen), &rho0, t)?;
        worst = worst.max((fq - cq) / cq.max(1.0));
    }
    Ok((ctx.samples, worst))
}

fn random_register_moments(rng: &mut ChaCha8Rng) -> Result<(usize, crate::bounds::ZMoments, f64)> {
    loop {
        let n = rng.random_range(1..=3);
        let rho = random_density_with(1 << n, random_class(rng), rng)?;
        let m = z_moments(&rho)?;
        if let Ok(q) = m.q() {
            if m.var > 1e-6 {
                return Ok((n, m, q));
            }
        }
    }
}

fn optimizer_minimality(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let (n, m, q) = random_register_moments(rng)?;
        let (gamma, t) = (rng.random_range(0.2..2.0), rng.random_range(0.05..3.0));
        let omega0 = gamma * rng.random_range(0.0..10.0);
        let opt = cq_opt_nq(t, omega0, gamma, n, q, m.var)?;
        for _ in 0..25 {
            let p = EnvGeneratorParams::new(
                rng.random_range(-20.0..20.0),
                rng.random_range(-20.0..20.0),
                rng.random_range(-20.0..20.0),
            );
            let v = cq_symmetric(t, omega0, gamma, n, m, p)?;
            worst = worst.max((opt - v) / opt.max(1.0));
        }
    }
    Ok((ctx.samples, worst))
}

fn optimal_params_reproduce_optimum(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let (n, m, q) = random_register_moments(rng)?;
        let (gamma, t) = (rng.random_range(0.2..2.0), rng.random_range(0.05..3.0));
        let omega0 = gamma * rng.random_range(0.0..10.0);
        let opt = cq_opt_nq(t, omega0, gamma, n, q, m.var)?;
        let p = optimal_env_params(t, omega0, gamma, n, q, m.mean)?;
        let v = cq_symmetric(t, omega0, gamma, n, m, p)?;
        worst = worst.max((opt - v).abs() / opt.max(1.0));
    }
    Ok((ctx.samples, worst))
}

fn q_parameter_laws(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let n = rng.random_range(1..=5);
        let qubit = random_state_vector(2, rng);
        let prod = DensityOperator::pure(&symmetric_product_state(&[qubit[0], qubit[1]], n))?;
        if let Ok(q) = z_moments(&prod)?.q() {
            worst = worst.max((q - 1.0 / n as f64).abs());
        }
        let ghz = z_moments(&DensityOperator::pure(&ghz_state(n, rng.random_range(0.0..6.3)))?)?;
        worst = worst.max((ghz.q()? - 1.0).abs()).max((ghz.var - 1.0).abs());
        let any = random_density_with(1 << n, random_class(rng), rng)?;
        if let Ok(q) = z_moments(&any)?.q() {
            worst = worst.max(-q).max(q - 1.0);
        }
    }
    Ok((ctx.samples, worst))
}

fn exact_fidelity_oracle(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    let plus = [c(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2];
    for _ in 0..ctx.samples {
        let n = rng.random_range(1..=4);
        let (r, gt) = (rng.random_range(0.0..20.0), rng.random_range(0.0..3.0));
        let ch = ChannelDescriptor::dephasing_n(1.0, r, n);
        for (psi, exact) in [
            (ghz_state(n, 0.0), exact_fidelity_ghz(n, r, gt)),
            (symmetric_product_state(&plus, n), exact_fidelity_separable(n, r, gt)),
        ] {
            let rho0 = DensityOperator::pure(&psi)?;
            let f = bures_fidelity(&rho0, &evolve_joint(&ch, &psi, gt)?.reduced_system())?;
            worst = worst.max((f - exact).abs());
        }
    }
    Ok((ctx.samples, worst))
}

fn elliptic_against_quadrature(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let phi = rng.random_range(0.0..FRAC_PI_2);
        let m = rng.random_range(-100.0..1.0);
        let e = elliptic_e_param(phi, m)?;
        let q = integrate(|x: f64| (1.0 - m * x.sin().powi(2)).sqrt(), 0.0, phi, 0.0, 1e-14)?.value;
        worst = worst.max((e - q).abs() / q.max(1.0));
    }
    Ok((ctx.samples, worst))
}

/// `c_{kD} k = 1` for rescaled Bures angles, and `c_D = 1` for the angle itself.
fn curvature_factor_scaling(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let n = ctx.samples.div_ceil(8);
    let base = MetricFunction::bures_angle();
    let mut worst = (curvature_factor(&base)? - 1.0).abs();
    for _ in 0..n {
        let k = rng.random_range(0.2..5.0);
        worst = worst.max((curvature_factor(&base.scaled(k))? * k - 1.0).abs());
    }
    Ok((n + 1, worst))
}

fn dephasing_bound_monotone(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let n = rng.random_range(1..=20);
        let q = rng.random_range(0.01..1.0);
        let (r, v) = (rng.random_range(0.0..50.0), rng.random_range(0.01..1.0));
        let mut prev = 0.0;
        for k in 1..=30 {
            let d = dephasing_distance_bound(0.1 * k as f64, r, v, n, q)?;
            worst = worst.max(prev - d);
            prev = d;
        }
    }
    Ok((ctx.samples, worst))
}
