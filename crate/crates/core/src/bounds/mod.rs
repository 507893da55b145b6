//! Speed-limit bounds: Bures length, closed-form channel bounds, the
//! purification bound and its optimizers, dephasing bounds, and inversion.

pub mod curves;
pub mod dephasing;
pub mod length;
pub mod purification;

pub use curves::{invert_bound, to_absolute_time, Abscissa, BoundCurve, BoundFamily};
pub use dephasing::{
    critical_ratio, dephasing_angle, dephasing_distance_bound, exclusion_limit, ghz_distance_bound,
    ghz_tau_asymptote, separable_distance_bound, separable_tau_asymptotes, separable_transition_estimate,
    single_qubit_elliptic_bound,
};
pub use length::{amp_damp_distance_bound, amp_damp_tau_bound, bures_length, mandelstam_tamm_tau};
pub use purification::{
    cq_direct, cq_general, cq_opt_1q, cq_opt_nq, cq_symmetric, optimal_env_params, z_moments, EnvGenerator,
    EnvGeneratorParams, PurifiedEvolution, ZMoments,
};
