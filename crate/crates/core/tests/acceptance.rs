//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line before asserting.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsl_core::bounds::{
    amp_damp_tau_bound, bures_length, cq_direct, cq_general, cq_opt_1q, cq_opt_nq, cq_symmetric, critical_ratio,
    dephasing_distance_bound, exclusion_limit, ghz_tau_asymptote, invert_bound, optimal_env_params, z_moments,
    BoundFamily, EnvGenerator, PurifiedEvolution,
};
use qsl_core::channels::{
    evolve, evolve_joint, exact_fidelity_ghz, exact_fidelity_separable, exact_transition_by_inversion,
    exact_transition_n, ghz_state, symmetric_product_state, ChannelDescriptor,
};
use qsl_core::linalg::{pauli_x, pauli_z};
use qsl_core::minimize::{minimize, SearchBox};
use qsl_core::qfi::{qfi_from_fidelity, sld_and_qfi, Trajectory};
use qsl_core::states::{bures_angle, bures_fidelity, random_density_with, random_state_vector, PurityClass};
use qsl_core::DensityOperator;

fn report(n: &str, pass: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn within(start: Instant, limit: Duration) -> (bool, Duration) {
    let el = start.elapsed();
    (el < limit, el)
}

fn class(rng: &mut ChaCha8Rng) -> PurityClass {
    if rng.random_bool(0.5) {
        PurityClass::Pure
    } else {
        PurityClass::Mixed
    }
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for &(x, y) in points {
        num += (x.ln() - mx) * (y.ln() - my);
        den += (x.ln() - mx).powi(2);
    }
    num / den
}

#[test]
fn criterion_01_mandelstam_tamm_recovery() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for omega0 in [1.0, 2.0, 5.0] {
        let ch = ChannelDescriptor::hamiltonian(&pauli_x().scale_real(omega0 / 2.0)).unwrap();
        let tr = Trajectory::new(ch, DensityOperator::basis(2, 0).unwrap(), 10.0 / omega0).unwrap();
        let tau = invert_bound(&BoundFamily::BuresLength(tr), FRAC_PI_2).unwrap();
        worst = worst.max((tau - PI / omega0).abs());
    }
    let (fast, el) = within(start, Duration::from_secs(3));
    report(
        "1",
        worst <= 1e-9 && fast,
        format!("max |tau - pi/omega0| = {worst:.2e} over 3 frequencies (<= 1e-9), {el:?} (< 1 s each)"),
    );
}

#[test]
fn criterion_02_amplitude_damping_saturation() {
    let tr = Trajectory::new(
        ChannelDescriptor::amplitude_damping(1.0),
        DensityOperator::basis(2, 1).unwrap(),
        3.5,
    )
    .unwrap();
    let mut worst_len = 0.0f64;
    for k in 1..=50 {
        let gt = 3.0 * k as f64 / 50.0;
        let l = bures_length(&tr, gt, 1e-10).unwrap();
        worst_len = worst_len.max((l - (-gt).exp().sqrt().acos()).abs());
    }
    let mut worst_inv = 0.0f64;
    for k in 1..=50 {
        let d = FRAC_PI_2 * k as f64 / 51.0;
        let gt = amp_damp_tau_bound(d, 1.0).unwrap();
        worst_inv = worst_inv.max((gt - 2.0 * (1.0 / d.cos()).ln()).abs());
    }
    report(
        "2",
        worst_len <= 1e-6 && worst_inv <= 1e-8,
        format!("length vs arccos sqrt(P): {worst_len:.2e} (<= 1e-6); 2 ln sec D: {worst_inv:.2e} (<= 1e-8)"),
    );
}

#[test]
fn criterion_03_qfi_cross_validation() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..100 {
        let gamma = rng.random_range(0.2..2.0);
        let ch = if rng.random_bool(0.5) {
            ChannelDescriptor::amplitude_damping(gamma)
        } else {
            ChannelDescriptor::dephasing(gamma, gamma * rng.random_range(0.0..10.0))
        };
        let c = class(&mut rng);
        let rho0 = random_density_with(2, c, &mut rng).unwrap();
        let tr = Trajectory::new(ch, rho0, 10.0).unwrap();
        let t = rng.random_range(0.05..3.0);
        let exact = sld_and_qfi(&tr, t).unwrap().qfi;
        let dt = 1e-3 * t.min(1.0);
        let e1 = (qfi_from_fidelity(&tr, t, dt).unwrap() - exact).abs();
        let e2 = (qfi_from_fidelity(&tr, t, 0.5 * dt).unwrap() - exact).abs();
        let ratio = e2 / e1;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let (fast, el) = within(start, Duration::from_secs(30));
    report(
        "3",
        lo >= 0.3 && hi <= 0.7 && fast,
        format!("error ratio under dt halving in [{lo:.4}, {hi:.4}] (within [0.3, 0.7]), {el:?}"),
    );
}

#[test]
fn criterion_04_closed_form_optimizer() {
    let start = Instant::now();
    let (omega0, gamma) = (8.0, 1.0);
    let states: Vec<DensityOperator> = vec![
        DensityOperator::qubit_bloch(1.0, 0.0, 0.0).unwrap(),
        DensityOperator::qubit_bloch(0.6, 0.0, 0.8).unwrap(),
        DensityOperator::qubit_bloch(0.0, 0.5f64.sqrt(), -0.5f64.sqrt()).unwrap(),
        DensityOperator::qubit_bloch(0.5, 0.2, 0.3).unwrap(),
        DensityOperator::qubit_bloch(-0.3, 0.4, -0.6).unwrap(),
    ];
    let ch = ChannelDescriptor::dephasing(gamma, omega0);
    let mut worst_brute = 0.0f64;
    for rho0 in &states {
        let var_z = 1.0 - rho0.expectation(&pauli_z()).powi(2);
        for t in [0.1, 0.5, 1.0, 2.0] {
            let target = cq_opt_1q(t, omega0, gamma, var_z).unwrap();
            let f = |x: &[f64]| {
                let pe = PurifiedEvolution::new(ch.clone(), EnvGenerator::qubit([x[0], x[1], x[2], x[3]]));
                cq_general(&pe, rho0, t).unwrap()
            };
            let m = minimize(f, &SearchBox::cube(4, 20.0));
            worst_brute = worst_brute.max((m.value - target).abs() / target.max(1.0));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_closed = 0.0f64;
    let mut worst_matrix = 0.0f64;
    for n in [1usize, 2, 4] {
        for k in 0..4 {
            let psi = random_state_vector(1 << n, &mut rng);
            let rho0 = DensityOperator::pure(&psi).unwrap();
            let m = z_moments(&rho0).unwrap();
            let q = m.q().unwrap();
            let t = [0.1, 0.5, 1.0, 2.0][k];
            let opt = cq_opt_nq(t, omega0, gamma, n, q, m.var).unwrap();
            let p = optimal_env_params(t, omega0, gamma, n, q, m.mean).unwrap();
            let v = cq_symmetric(t, omega0, gamma, n, m, p).unwrap();
            worst_closed = worst_closed.max((v - opt).abs() / opt.max(1.0));
            let pe = PurifiedEvolution::new(
                ChannelDescriptor::dephasing_n(gamma, omega0, n),
                EnvGenerator::optimal(omega0, gamma, n, q, m.mean),
            );
            let direct = cq_direct(&pe, &rho0, t).unwrap();
            worst_matrix = worst_matrix.max((direct - opt).abs() / opt.max(1.0));
        }
    }
    let (fast, el) = within(start, Duration::from_secs(120));
    report(
        "4",
        worst_brute <= 1e-6 && worst_closed <= 1e-9 && fast,
        format!(
            "brute-force min vs cq_opt_1q: {worst_brute:.2e} (<= 1e-6); optimal params vs closed form: \
             {worst_closed:.2e} (<= 1e-9); matrix route: {worst_matrix:.2e}; {el:?}"
        ),
    );
}

#[test]
fn criterion_05_exclusion_window() {
    let rc = critical_ratio();
    let at = exclusion_limit(rc).unwrap();
    report(
        "5",
        (2.55..=2.65).contains(&rc) && (at - FRAC_PI_2).abs() < 1e-9,
        format!("r_crit = {rc:.6} (in [2.55, 2.65])"),
    );
}

#[test]
fn criterion_06_scaling_transition() {
    let start = Instant::now();
    let (r, d) = (8.0, 0.1f64.acos());
    let bound = |n: usize| invert_bound(&BoundFamily::SeparableElliptic { r, var_z: 1.0, n }, d).unwrap();

    let small: Vec<(f64, f64)> = (4..=30).map(|n| (n as f64, bound(n))).collect();
    let slope_small = log_slope(&small);

    let n_tr = exact_transition_n(r, d).unwrap();
    let n0 = 10.0 * n_tr;
    let large: Vec<(f64, f64)> = (0..20)
        .map(|k| {
            let n = (n0 * 100f64.powf(k as f64 / 19.0)).round() as usize;
            (n as f64, bound(n))
        })
        .collect();
    let slope_large = log_slope(&large);

    let n_exact = exact_transition_by_inversion(r, d).unwrap();
    let factor = (n_exact / n_tr).max(n_tr / n_exact);
    let (fast, el) = within(start, Duration::from_secs(60));

    let ok_small = (slope_small + 0.5).abs() <= 0.1;
    let ok_large = (slope_large + 1.0).abs() <= 0.05;
    let ok_tr = factor <= 2.0;
    report(
        "6",
        ok_small && ok_large && ok_tr && fast,
        format!(
            "slope N in [4,30] = {slope_small:.4} (-0.5 +- 0.1: {}); slope N >= {n0:.0} = {slope_large:.4} \
             (-1 +- 0.05: {}); exact transition N = {n_exact:.2} vs (r^2-1) ln sec D = {n_tr:.2} (factor \
             {factor:.3} <= 2: {}); {el:?}",
            ok_small, ok_large, ok_tr
        ),
    );
}

#[test]
fn criterion_07_ghz_scaling() {
    let (r, d) = (8.0, 0.1f64.acos());
    let coeff = 2.0 * d / r * (1.0 + d / r);
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for n in [1000usize, 3000, 10_000, 100_000] {
        let gt = invert_bound(&BoundFamily::GhzGeneral { r, n }, d).unwrap();
        let ngt = n as f64 * gt;
        let rel = (ngt - coeff).abs() / coeff;
        assert!((ghz_tau_asymptote(n, r, d).unwrap() * n as f64 - coeff).abs() < 1e-12);
        worst = worst.max(rel);
        detail.push_str(&format!("N={n}: {ngt:.5}; "));
    }
    report(
        "7",
        worst <= 0.02,
        format!("N gt_bound vs (2D/r)(1+D/r) = {coeff:.5}: {detail}max rel gap {worst:.4} (<= 0.02)"),
    );
}

#[test]
fn criterion_08_exact_formula_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let plus = [Complex64::new(FRAC_1_SQRT_2, 0.0); 2];
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 1..=6 {
        for _ in 0..20 {
            let (r, gt) = (rng.random_range(0.0..20.0), rng.random_range(0.0..3.0));
            let ch = ChannelDescriptor::dephasing_n(1.0, r, n);
            for (psi, exact) in [
                (ghz_state(n, 0.0), exact_fidelity_ghz(n, r, gt)),
                (symmetric_product_state(&plus, n), exact_fidelity_separable(n, r, gt)),
            ] {
                let rho0 = DensityOperator::pure(&psi).unwrap();
                let reduced = evolve_joint(&ch, &psi, gt).unwrap().reduced_system();
                worst = worst.max((bures_fidelity(&rho0, &reduced).unwrap() - exact).abs());
                count += 1;
            }
        }
    }
    let (fast, el) = within(start, Duration::from_secs(60));
    report(
        "8",
        worst <= 1e-10 && fast,
        format!("{count} joint-dilation fidelities, max deviation {worst:.2e} (<= 1e-10), {el:?}"),
    );
}

/// Bound families applicable to one sampled triple, with their distances.
fn family_bounds(ch: &ChannelDescriptor, rho0: &DensityOperator, tau: f64, tag: &str) -> Vec<(String, f64)> {
    let tr = Trajectory::new(ch.clone(), rho0.clone(), tau.max(1e-3)).unwrap();
    let mut out = vec![("bures_length".to_string(), bures_length(&tr, tau, 1e-10).unwrap())];
    match ch {
        ChannelDescriptor::AmplitudeDamping { gamma, .. } => {
            let n = rho0.matrix()[(1, 1)].re;
            let fam = BoundFamily::AmpDampClosed { n_excited: n };
            out.push((fam.name().into(), fam.distance_bound(gamma * tau).unwrap()));
        }
        ChannelDescriptor::Dephasing1Q { gamma, omega0 } => {
            let var_z = (1.0 - rho0.expectation(&pauli_z()).powi(2)).max(0.0);
            let r = omega0 / gamma;
            for fam in [BoundFamily::EllipticQubit { r, var_z }, BoundFamily::CqOptQubit { r, var_z }] {
                out.push((fam.name().into(), fam.distance_bound(gamma * tau).unwrap()));
            }
        }
        ChannelDescriptor::DephasingNQ { gamma, omega0, n_qubits } => {
            let (r, n, gt) = (omega0 / gamma, *n_qubits, gamma * tau);
            let fam = BoundFamily::GhzGeneral { r, n };
            out.push((fam.name().into(), fam.distance_bound(gt).unwrap()));
            let m = z_moments(rho0).unwrap();
            if let Ok(q) = m.q() {
                out.push(("moment_bound".into(), dephasing_distance_bound(gt, r, m.var, n, q).unwrap()));
            }
            if tag == "product" {
                let var_z = n as f64 * m.var;
                let fam = BoundFamily::SeparableElliptic { r, var_z: var_z.min(1.0), n };
                out.push((fam.name().into(), fam.distance_bound(gt).unwrap()));
            }
        }
        ChannelDescriptor::ExplicitUnitary(_) => unreachable!(),
    }
    out
}

#[test]
fn criterion_09_bound_validity_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = (String::new(), f64::NEG_INFINITY);
    let mut checks = 0usize;
    for _ in 0..1000 {
        let gamma = rng.random_range(0.2..2.0);
        let omega0 = gamma * rng.random_range(0.0..20.0);
        let (ch, rho0, tag) = match rng.random_range(0..4) {
            0 => {
                let c = class(&mut rng);
                (ChannelDescriptor::amplitude_damping(gamma), random_density_with(2, c, &mut rng).unwrap(), "random")
            }
            1 => {
                let c = class(&mut rng);
                (ChannelDescriptor::dephasing(gamma, omega0), random_density_with(2, c, &mut rng).unwrap(), "random")
            }
            2 => {
                let n = rng.random_range(2..=3);
                let c = class(&mut rng);
                let rho = random_density_with(1 << n, c, &mut rng).unwrap();
                (ChannelDescriptor::dephasing_n(gamma, omega0, n), rho, "random")
            }
            _ => {
                let n = rng.random_range(2..=3);
                let q = random_state_vector(2, &mut rng);
                let (psi, tag) = if rng.random_bool(0.5) {
                    (symmetric_product_state(&[q[0], q[1]], n), "product")
                } else {
                    (ghz_state(n, rng.random_range(0.0..6.3)), "ghz")
                };
                (ChannelDescriptor::dephasing_n(gamma, omega0, n), DensityOperator::pure(&psi).unwrap(), tag)
            }
        };
        let tau = rng.random_range(0.0..3.0) / gamma;
        let d = bures_angle(&rho0, &evolve(&ch, &rho0, tau).unwrap()).unwrap();
        for (name, b) in family_bounds(&ch, &rho0, tau, tag) {
            checks += 1;
            if d - b > worst.1 {
                worst = (name, d - b);
            }
        }
    }
    report(
        "9",
        worst.1 <= 1e-6,
        format!("1000 triples, {checks} family checks, max (D - bound) = {:.2e} ({}) (<= 1e-6)", worst.1, worst.0),
    );
}

#[test]
fn criterion_10_q_parameter_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_sep = 0.0f64;
    let mut tested = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=8);
        let q = random_state_vector(2, &mut rng);
        let rho = DensityOperator::pure(&symmetric_product_state(&[q[0], q[1]], n)).unwrap();
        if let Ok(qv) = z_moments(&rho).unwrap().q() {
            worst_sep = worst_sep.max((qv - 1.0 / n as f64).abs());
            tested += 1;
        }
    }
    let mut worst_ghz = 0.0f64;
    for n in 1..=8 {
        let m = z_moments(&DensityOperator::pure(&ghz_state(n, rng.random_range(0.0..6.3))).unwrap()).unwrap();
        worst_ghz = worst_ghz.max((m.q().unwrap() - 1.0).abs()).max((m.var - 1.0).abs());
    }
    report(
        "10",
        worst_sep <= 1e-10 && worst_ghz <= 1e-10 && tested > 150,
        format!("product states |q - 1/N| = {worst_sep:.2e} over {tested}; GHZ |q - 1|, |V - 1| = {worst_ghz:.2e}"),
    );
}
