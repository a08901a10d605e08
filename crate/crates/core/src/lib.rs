//! SEIRS epidemic models with a constant latency delay.
//!
//! ```text
//! S' = -β S I + γ R
//! E' =  β S I - E(t - r) / k_r
//! I' =  E(t - r) / k_r - μ I
//! R' =  μ I - γ R
//! ```
//!
//! The crate covers the closed-form equilibria, fixed-step integration of the
//! nondelayed and delayed systems, linear stability at both equilibria, the
//! critical delays at which characteristic roots reach the imaginary axis,
//! and Euler–Maruyama simulation of the noisy system together with its
//! concentration and Lyapunov checks.
//!
//! Everything is generic over [`scalar::Scalar`] (`f32` or `f64`); the
//! aliases below fix the double precision types used by the CLI.

pub mod delay;
pub mod deterministic;
pub mod equilibria;
pub mod linearization;
pub mod model;
pub mod polynomial;
pub mod scalar;
pub mod stochastic;

pub use delay::{
    deg2_crossing, deg2_instability_possible, deg3_crossing, deg3_instability_possible, free_disease_crossing,
    free_disease_margin, margin_formula, verify_crossing, CrossingReport, CubicABC, Deg3Crossing, DelayError,
};
pub use deterministic::{
    default_step, integrate_dde, integrate_dde_cascade, integrate_dde_unchecked, integrate_euler, integrate_ode,
    integrate_scalar_comparison, IntegrationError, Trajectory,
};
pub use equilibria::{
    basic_reproduction_number, coexistence_equilibrium, equilibria, equilibrium_residual, EquilibriumSet,
};
pub use linearization::{
    char_poly_delay_coexistence, char_poly_delay_free, free_disease_eigenvalues_closed_form, jacobian_coexistence,
    jacobian_free_disease, routh_hurwitz_coexistence, routh_hurwitz_cubic, routh_hurwitz_free_disease, Matrix3,
    QuasiPolynomial, Stability, StabilityError, StabilityVerdict,
};
pub use model::{InitialCondition, ModelError, Params, State, ValidationReport, Violation};
pub use polynomial::{cubic_real_roots, cubic_roots};
pub use scalar::Scalar;
pub use stochastic::{
    concentration_check, ensemble, lyapunov_certificate, lyapunov_condition, simulate_sde,
    stochastic_stability_experiment, ConcentrationReport, EnsembleSummary, LyapunovCertificate, SdeError, Seed,
    StabilityExperiment,
};

pub type Params64 = Params<f64>;
pub type Params32 = Params<f32>;
pub type State64 = State<f64>;
pub type State32 = State<f32>;
pub type InitialCondition64 = InitialCondition<f64>;
pub type InitialCondition32 = InitialCondition<f32>;
pub type Trajectory64 = Trajectory<f64>;
pub type Trajectory32 = Trajectory<f32>;
pub type QuasiPolynomial64 = QuasiPolynomial<f64>;
pub type CrossingReport64 = CrossingReport<f64>;
pub type EnsembleSummary64 = EnsembleSummary<f64>;
