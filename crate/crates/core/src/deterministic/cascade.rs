//! Interval-by-interval solution of the delayed model.
//!
//! On `[nr, (n+1)r]` the delayed term only involves `E` from the previous
//! interval, so the compartments can be obtained in the order I, R, S, E:
//!
//! ```text
//! I(t) = e^{-μτ} ( (1/k_r) ∫ E(s-r) e^{μσ} ds + I(nr) )
//! R(t) = e^{-γτ} ( ∫ μ I(s) e^{γσ} ds + R(nr) )
//! S(t) = e^{-Φ(τ)} ( ∫ γ R(s) e^{Φ(σ)} ds + S(nr) ),   Φ(τ) = ∫ β I
//! E(t) = E(nr) + ∫ β S I ds - (1/k_r) ∫ E(s-r) ds
//! ```
//!
//! with `τ = t - nr`, `σ = s - nr` and every integral over `[nr, t]`. The
//! integrals are cumulative composite Simpson sums on `quad_n` panels per
//! interval.

use super::{check_node, into_trajectory, require_valid, step_count, IntegrationError, Trajectory};
use crate::model::{InitialCondition, Params};
use crate::scalar::Scalar;

/// Cumulative integral of equally spaced samples `f` with spacing `dx`.
///
/// Even nodes use composite Simpson; odd nodes add a single panel integrated
/// with the local cubic interpolant. `f.len()` must be odd and at least 5.
pub(crate) fn cumulative_simpson<T: Scalar>(f: &[T], dx: T) -> Vec<T> {
    let n = f.len();
    debug_assert!(n >= 5 && n % 2 == 1);
    let third = dx / T::of(3.0);
    let w = dx / T::of(24.0);
    let c = |v: f64| T::of(v);
    let mut out = vec![T::zero(); n];
    for j in (2..n).step_by(2) {
        out[j] = out[j - 2] + third * (f[j - 2] + c(4.0) * f[j - 1] + f[j]);
    }
    out[1] = w * (c(9.0) * f[0] + c(19.0) * f[1] - c(5.0) * f[2] + f[3]);
    for j in (3..n).step_by(2) {
        out[j] = out[j - 1] + w * (c(13.0) * (f[j - 1] + f[j]) - f[j - 2] - f[j + 1]);
    }
    out
}

/// Builds the delayed solution interval by interval on `quad_n` panels per
/// delay interval. `t_end` must be a multiple of `r / quad_n`.
pub fn integrate_dde_cascade<T: Scalar>(
    p: &Params<T>,
    ic: &InitialCondition<T>,
    t_end: T,
    quad_n: usize,
) -> Result<Trajectory<T>, IntegrationError> {
    require_valid(p)?;
    if p.r <= T::zero() {
        return Err(IntegrationError::Precondition(
            "integrate_dde_cascade requires r > 0".into(),
        ));
    }
    if quad_n < 8 || !quad_n.is_multiple_of(2) {
        return Err(IntegrationError::Precondition(format!(
            "quad_n must be even and at least 8, got {quad_n}"
        )));
    }
    let dx = p.r / T::of(quad_n as f64);
    let total = step_count(t_end, dx)?;
    if t_end < p.r {
        return Err(IntegrationError::Precondition(format!(
            "horizon {t_end} shorter than the delay {}",
            p.r
        )));
    }
    let intervals = total.div_ceil(quad_n);
    let inv_k = p.latency_rate();
    let offsets: Vec<T> = (0..=quad_n).map(|j| T::of(j as f64) * dx).collect();

    let mut nodes: Vec<[T; 4]> = Vec::with_capacity(intervals * quad_n + 1);
    let x0 = ic.state_at_zero().to_array();
    nodes.push(x0);
    let mut e_prev = vec![ic.e0; quad_n + 1];
    let (mut s0, mut e0, mut i0, mut r0) = (x0[0], x0[1], x0[2], x0[3]);

    for _ in 0..intervals {
        let grow_mu: Vec<T> = offsets.iter().map(|t| (p.mu * *t).exp()).collect();
        let grow_gamma: Vec<T> = offsets.iter().map(|t| (p.gamma * *t).exp()).collect();

        let inflow: Vec<T> = e_prev.iter().zip(&grow_mu).map(|(e, g)| *e * *g).collect();
        let inflow_int = cumulative_simpson(&inflow, dx);
        let i: Vec<T> = (0..=quad_n)
            .map(|j| (inv_k * inflow_int[j] + i0) / grow_mu[j])
            .collect();

        let recovered: Vec<T> = (0..=quad_n).map(|j| p.mu * i[j] * grow_gamma[j]).collect();
        let recovered_int = cumulative_simpson(&recovered, dx);
        let rcv: Vec<T> = (0..=quad_n).map(|j| (recovered_int[j] + r0) / grow_gamma[j]).collect();

        let force: Vec<T> = i.iter().map(|v| p.beta * *v).collect();
        let phi = cumulative_simpson(&force, dx);
        let waning: Vec<T> = (0..=quad_n).map(|j| p.gamma * rcv[j] * phi[j].exp()).collect();
        let waning_int = cumulative_simpson(&waning, dx);
        let s: Vec<T> = (0..=quad_n).map(|j| (waning_int[j] + s0) * (-phi[j]).exp()).collect();

        let incidence: Vec<T> = (0..=quad_n).map(|j| p.beta * s[j] * i[j]).collect();
        let incidence_int = cumulative_simpson(&incidence, dx);
        let outflow_int = cumulative_simpson(&e_prev, dx);
        let e: Vec<T> = (0..=quad_n)
            .map(|j| e0 + incidence_int[j] - inv_k * outflow_int[j])
            .collect();

        for j in 1..=quad_n {
            let x = [s[j], e[j], i[j], rcv[j]];
            check_node(nodes.len(), &x)?;
            nodes.push(x);
        }
        s0 = s[quad_n];
        e0 = e[quad_n];
        i0 = i[quad_n];
        r0 = rcv[quad_n];
        e_prev = e;
    }
    nodes.truncate(total + 1);
    into_trajectory(nodes, dx)
}
