//! Quadratic Lyapunov certificate for the disease-free point of the
//! nondelayed stochastic model, and the matching Monte Carlo experiment.
//!
//! In the reduced coordinates `u = (E, I, R)` the candidate is
//! `V = u₁² + v₂ u₂² + v₃ u₃²`, whose generator along the linearization is
//!
//! ```text
//! LV = 2(β + v₂/k_r) u₁u₂ + 2 v₃ μ u₂u₃ - (2/k_r) u₁² - (2 v₂ μ - ε²) u₂² - 2 v₃ γ u₃².
//! ```
//!
//! Young's inequality with splitters `λ₁², λ₃²` turns `LV ≤ 0` into three
//! scalar inequalities on the diagonal coefficients.

use super::{final_states, quantile, SdeError, Seed};
use crate::deterministic::IntegrationError;
use crate::model::{InitialCondition, Params};
use crate::scalar::Scalar;

/// Slack in the first splitter.
pub const ALPHA0: f64 = 1e-6;

/// Search grid for `v₃`, largest first.
pub const V3_CANDIDATES: [f64; 9] = [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

/// Points per axis of the `(0, 1]³` grid on which `LV/|u|²` is sampled.
const LV_GRID: usize = 10;

fn require_nondelayed<T: Scalar>(p: &Params<T>) -> Result<(), SdeError> {
    let report = p.validate();
    if !report.valid {
        return Err(IntegrationError::InvalidParams(report).into());
    }
    if p.r != T::zero() {
        return Err(SdeError::NondelayedOnly { r: p.r.as_f64() });
    }
    Ok(())
}

/// `μ - β - ε²/(2μ k_r)`.
pub fn lyapunov_margin<T: Scalar>(p: &Params<T>) -> T {
    p.mu - p.beta - p.epsilon * p.epsilon / (T::of(2.0) * p.mu * p.k_r)
}

/// `(β + √(β² + 2ε²/k_r)) / 2`; the condition is `μ` above this value.
pub fn lyapunov_threshold<T: Scalar>(p: &Params<T>) -> T {
    (p.beta + (p.beta * p.beta + T::of(2.0) * p.epsilon * p.epsilon / p.k_r).sqrt()) / T::of(2.0)
}

/// Noise level at which the margin vanishes, when `μ > β`.
pub fn critical_epsilon<T: Scalar>(p: &Params<T>) -> Option<T> {
    (p.mu > p.beta).then(|| (T::of(2.0) * p.mu * p.k_r * (p.mu - p.beta)).sqrt())
}

/// Whether the sufficient condition for stochastic stability holds.
pub fn lyapunov_condition<T: Scalar>(p: &Params<T>) -> Result<bool, SdeError> {
    require_nondelayed(p)?;
    Ok(lyapunov_margin(p) > T::zero())
}

/// The three coefficient inequalities, each required to be `≤ 0`.
pub fn certificate_inequalities<T: Scalar>(p: &Params<T>, v2: T, v3: T, lambda1_sq: T, lambda3_sq: T) -> [T; 3] {
    let two = T::of(2.0);
    let inv_k = p.latency_rate();
    let coupling = p.beta + v2 * inv_k;
    [
        -two * inv_k + lambda1_sq * coupling,
        -two * v2 * p.mu + p.epsilon * p.epsilon + coupling / lambda1_sq + v3 * p.mu / lambda3_sq,
        -two * v3 * p.gamma + lambda3_sq * v3 * p.mu,
    ]
}

/// `LV(u)` for the linearized generator.
pub fn lv_form<T: Scalar>(p: &Params<T>, v2: T, v3: T, u: [T; 3]) -> T {
    let two = T::of(2.0);
    let inv_k = p.latency_rate();
    two * (p.beta + v2 * inv_k) * u[0] * u[1] + two * v3 * p.mu * u[1] * u[2]
        - two * inv_k * u[0] * u[0]
        - (two * v2 * p.mu - p.epsilon * p.epsilon) * u[1] * u[1]
        - two * v3 * p.gamma * u[2] * u[2]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovCertificate<T> {
    pub v2: T,
    pub v3: T,
    pub lambda1_sq: T,
    pub lambda3_sq: T,
    pub alpha0: T,
    pub inequalities: [T; 3],
    /// Largest `LV/|u|²` over the sample grid.
    pub lv_bound: T,
    pub holds: bool,
}

fn lv_bound<T: Scalar>(p: &Params<T>, v2: T, v3: T) -> T {
    let axis: Vec<T> = (1..=LV_GRID).map(|j| T::of(j as f64 / LV_GRID as f64)).collect();
    let mut bound = T::neg_infinity();
    for &u1 in &axis {
        for &u2 in &axis {
            for &u3 in &axis {
                let norm_sq = u1 * u1 + u2 * u2 + u3 * u3;
                bound = bound.max(lv_form(p, v2, v3, [u1, u2, u3]) / norm_sq);
            }
        }
    }
    bound
}

/// Builds `(v₂, v₃, λ₁², λ₃²)` and verifies the certificate.
pub fn lyapunov_certificate<T: Scalar>(p: &Params<T>) -> Result<LyapunovCertificate<T>, SdeError> {
    if !lyapunov_condition(p)? {
        return Err(SdeError::ConditionFalse {
            margin: lyapunov_margin(p).as_f64(),
        });
    }
    let two = T::of(2.0);
    let alpha0 = T::of(ALPHA0);
    let v2 = p.k_r * (two * p.mu - p.beta);
    let lambda1_sq = (two * p.latency_rate() - alpha0) / (p.beta + v2 * p.latency_rate());
    let lambda3_sq = p.gamma / p.mu;
    let v3 = V3_CANDIDATES
        .iter()
        .map(|v| T::of(*v))
        .find(|v3| certificate_inequalities(p, v2, *v3, lambda1_sq, lambda3_sq)[1] <= T::zero())
        .ok_or(SdeError::CertificateFailed)?;
    let inequalities = certificate_inequalities(p, v2, v3, lambda1_sq, lambda3_sq);
    let lv_bound = lv_bound(p, v2, v3);
    let holds = inequalities.iter().all(|v| *v <= T::zero()) && lv_bound < T::zero();
    Ok(LyapunovCertificate {
        v2,
        v3,
        lambda1_sq,
        lambda3_sq,
        alpha0,
        inequalities,
        lv_bound,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityExperiment<T> {
    pub condition_holds: bool,
    pub n_rep: usize,
    /// `E + I + R` at the horizon, per replica.
    pub infected: Vec<T>,
    pub mean_infected: T,
    pub p95_infected: T,
    pub warnings: Vec<String>,
}

/// Monte Carlo run of the nonlinear stochastic model; reports the spread of
/// `E + I + R` at `t_end`.
pub fn stochastic_stability_experiment<T: Scalar>(
    p: &Params<T>,
    ic: &InitialCondition<T>,
    t_end: T,
    h: T,
    n_rep: usize,
    seed: &Seed,
) -> Result<StabilityExperiment<T>, SdeError> {
    let condition_holds = lyapunov_condition(p)?;
    let finals = final_states(p, ic, t_end, h, n_rep, seed)?;
    let infected: Vec<T> = finals.iter().map(|x| x[1] + x[2] + x[3]).collect();
    let mean_infected = infected.iter().copied().sum::<T>() / T::of(n_rep as f64);
    let p95_infected = quantile(&infected, T::of(0.95));
    let mut warnings = Vec::new();
    if !condition_holds {
        warnings.push(format!(
            "condition not satisfied (margin {:e}); no decay is implied",
            lyapunov_margin(p).as_f64()
        ));
    }
    Ok(StabilityExperiment {
        condition_holds,
        n_rep,
        infected,
        mean_infected,
        p95_infected,
        warnings,
    })
}
