//! Euler–Maruyama simulation of the stochastic model and Monte Carlo
//! ensembles over it.
//!
//! A single scalar Wiener process drives the infection term:
//!
//! ```text
//! dS = (γR - βSI) dt + εSI dW
//! dE = (βSI - E(t-r)/k_r) dt - εSI dW
//! ```
//!
//! while `I` and `R` follow the deterministic drift. The noise increment is
//! computed once per step and added to `S` and subtracted from `E`, so the
//! total population only sees the rounding of the drift update.

mod concentration;
mod lyapunov;

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::deterministic::{delay_steps, drift, euler_update, require_valid, step_count, IntegrationError, Trajectory};
use crate::model::{InitialCondition, Params, State};
use crate::scalar::Scalar;

pub use concentration::{
    concentration_check, ConcentrationReport, TailFit, TransferCheck, MIN_EXCEEDANCES, TRANSFER_SAFETY,
};
pub use lyapunov::{
    certificate_inequalities, critical_epsilon, lv_form, lyapunov_certificate, lyapunov_condition, lyapunov_margin,
    lyapunov_threshold, stochastic_stability_experiment, LyapunovCertificate, StabilityExperiment, ALPHA0,
    V3_CANDIDATES,
};

/// Distance outside `[0, 1]` a component may reach before a path is aborted.
pub const EXCURSION_TOL: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdeError {
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error("excursion in replica {replica} at step {step}: {component} = {value}")]
    Excursion {
        replica: u64,
        step: usize,
        component: &'static str,
        value: f64,
    },
    #[error("ensemble needs at least one replica")]
    NoReplicas,
    #[error("invalid rho grid: {0}")]
    InvalidRhoGrid(String),
    #[error("insufficient exceedances: {usable} tail points with at least {required} exceedances")]
    InsufficientExceedances { usable: usize, required: usize },
    #[error("nondelayed analysis only (r = {r})")]
    NondelayedOnly { r: f64 },
    #[error("stability condition mu - beta - eps^2/(2 mu k_r) > 0 is false (margin {margin})")]
    ConditionFalse { margin: f64 },
    #[error("certificate construction failed: no v3 in the search grid satisfies the second inequality")]
    CertificateFailed,
}

/// Master seed; replica `j` draws from the ChaCha8 stream `j` of the
/// generator keyed by the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub master: u64,
}

impl Seed {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn stream(&self, replica: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(replica);
        rng
    }
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    steps: usize,
    lag: usize,
}

fn grid<T: Scalar>(p: &Params<T>, t_end: T, h: T) -> Result<Grid, SdeError> {
    require_valid(p)?;
    let steps = step_count(t_end, h)?;
    let lag = if p.r > T::zero() { delay_steps(p.r, h)? } else { 0 };
    Ok(Grid { steps, lag })
}

fn check_excursion<T: Scalar>(replica: u64, step: usize, x: &[T; 4]) -> Result<(), SdeError> {
    let lo = -T::of(EXCURSION_TOL);
    let hi = T::one() + T::of(EXCURSION_TOL);
    for (component, v) in ["S", "E", "I", "R"].into_iter().zip(x) {
        if !(*v >= lo && *v <= hi) {
            return Err(SdeError::Excursion {
                replica,
                step,
                component,
                value: v.as_f64(),
            });
        }
    }
    Ok(())
}

/// Runs one path and hands every node, including the initial one, to
/// `visit`. Returns the final node.
fn run_path<T: Scalar>(
    p: &Params<T>,
    ic: &InitialCondition<T>,
    grid: Grid,
    h: T,
    mut rng: Option<&mut ChaCha8Rng>,
    replica: u64,
    mut visit: impl FnMut(usize, &[T; 4]),
) -> Result<[T; 4], SdeError> {
    let sqrt_h = h.sqrt();
    let mut x = ic.state_at_zero().to_array();
    let mut e_history = Vec::with_capacity(grid.steps + 1);
    e_history.push(x[1]);
    visit(0, &x);
    for k in 0..grid.steps {
        let e_delayed = if k >= grid.lag { e_history[k - grid.lag] } else { ic.e0 };
        let d = drift(p, &x, e_delayed);
        let mut next = euler_update(&x, h, &d);
        if let Some(rng) = rng.as_deref_mut() {
            let dw = sqrt_h * T::standard_normal(rng);
            let noise = p.epsilon * x[0] * x[2] * dw;
            next[0] = next[0] + noise;
            next[1] = next[1] - noise;
        }
        check_excursion(replica, k + 1, &next)?;
        x = next;
        e_history.push(x[1]);
        visit(k + 1, &x);
    }
    Ok(x)
}

fn noise_source(noiseless: bool, seed: &Seed, replica: u64) -> Option<ChaCha8Rng> {
    (!noiseless).then(|| seed.stream(replica))
}

/// One Euler–Maruyama path. With `ε = 0` no random numbers are drawn and
/// the result equals [`crate::deterministic::integrate_euler`] node for node.
pub fn simulate_sde<T: Scalar>(
    p: &Params<T>,
    ic: &InitialCondition<T>,
    t_end: T,
    h: T,
    seed: &Seed,
    replica: u64,
) -> Result<Trajectory<T>, SdeError> {
    let grid = grid(p, t_end, h)?;
    let mut rng = noise_source(p.epsilon == T::zero(), seed, replica);
    let mut nodes = Vec::with_capacity(grid.steps + 1);
    run_path(p, ic, grid, h, rng.as_mut(), replica, |_, x| nodes.push(*x))?;
    Ok(Trajectory::from_nodes(nodes, h))
}

/// Empirical `P(sup > ρ)` at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPoint<T> {
    pub rho: T,
    pub exceedances: usize,
    pub probability: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary<T> {
    pub n_rep: usize,
    pub epsilon: T,
    /// `‖Zᵉ - Z‖∞` over `[0, T]` per replica, in replica order.
    pub sup_deviations: Vec<T>,
    pub mean_final: State<T>,
    /// Ascending in `ρ`.
    pub tail: Vec<TailPoint<T>>,
}

impl<T: Scalar> EnsembleSummary<T> {
    pub fn median_sup_deviation(&self) -> T {
        quantile(&self.sup_deviations, T::of(0.5))
    }

    pub fn sup_deviation_quantile(&self, q: T) -> T {
        quantile(&self.sup_deviations, q)
    }
}

/// Linearly interpolated sample quantile, `q ∈ [0, 1]`.
pub fn quantile<T: Scalar>(values: &[T], q: T) -> T {
    assert!(!values.is_empty(), "quantile of an empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    let pos = q.max(T::zero()).min(T::one()) * T::of((sorted.len() - 1) as f64);
    let lo = pos.floor().to_usize().expect("index");
    let hi = pos.ceil().to_usize().expect("index");
    let frac = pos - T::of(lo as f64);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

fn sorted_grid<T: Scalar>(rho_grid: &[T]) -> Result<Vec<T>, SdeError> {
    if let Some(bad) = rho_grid.iter().find(|r| !(r.is_finite() && **r >= T::zero())) {
        return Err(SdeError::InvalidRhoGrid(format!(
            "rho = {bad} is not a finite nonnegative value"
        )));
    }
    let mut grid = rho_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    grid.dedup();
    Ok(grid)
}

/// `n_rep` independent replicas compared against the `ε = 0` path on the
/// same grid. Replicas run in parallel; results do not depend on scheduling.
pub fn ensemble<T: Scalar>(
    p: &Params<T>,
    ic: &InitialCondition<T>,
    t_end: T,
    h: T,
    n_rep: usize,
    seed: &Seed,
    rho_grid: &[T],
) -> Result<EnsembleSummary<T>, SdeError> {
    if n_rep == 0 {
        return Err(SdeError::NoReplicas);
    }
    let rho_grid = sorted_grid(rho_grid)?;
    let grid = grid(p, t_end, h)?;
    let noiseless = p.with_epsilon(T::zero());
    let mut reference = Vec::with_capacity(grid.steps + 1);
    run_path(&noiseless, ic, grid, h, None, 0, |_, x| reference.push(*x))?;
    debug!(
        "ensemble: {n_rep} replicas, {} steps, epsilon {}",
        grid.steps, p.epsilon
    );

    let outcomes: Vec<Result<(T, [T; 4]), SdeError>> = (0..n_rep as u64)
        .into_par_iter()
        .map(|replica| {
            let mut rng = noise_source(p.epsilon == T::zero(), seed, replica);
            let mut sup = T::zero();
            let last = run_path(p, ic, grid, h, rng.as_mut(), replica, |k, x| {
                for (a, b) in x.iter().zip(&reference[k]) {
                    sup = sup.max((*a - *b).abs());
                }
            })?;
            Ok((sup, last))
        })
        .collect();

    let mut sup_deviations = Vec::with_capacity(n_rep);
    let mut total = [T::zero(); 4];
    for outcome in outcomes {
        let (sup, last) = outcome?;
        sup_deviations.push(sup);
        for c in 0..4 {
            total[c] = total[c] + last[c];
        }
    }
    let count = T::of(n_rep as f64);
    let mean_final = State::from_array_unchecked(total.map(|v| v / count));
    let tail = rho_grid
        .into_iter()
        .map(|rho| {
            let exceedances = sup_deviations.iter().filter(|s| **s > rho).count();
            TailPoint {
                rho,
                exceedances,
                probability: T::of(exceedances as f64) / count,
            }
        })
        .collect();
    Ok(EnsembleSummary {
        n_rep,
        epsilon: p.epsilon,
        sup_deviations,
        mean_final,
        tail,
    })
}

/// Final states of `n_rep` replicas, in replica order.
pub(crate) fn final_states<T: Scalar>(
    p: &Params<T>,
    ic: &InitialCondition<T>,
    t_end: T,
    h: T,
    n_rep: usize,
    seed: &Seed,
) -> Result<Vec<[T; 4]>, SdeError> {
    if n_rep == 0 {
        return Err(SdeError::NoReplicas);
    }
    let grid = grid(p, t_end, h)?;
    (0..n_rep as u64)
        .into_par_iter()
        .map(|replica| {
            let mut rng = noise_source(p.epsilon == T::zero(), seed, replica);
            run_path(p, ic, grid, h, rng.as_mut(), replica, |_, _| {})
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}
