//! Fixed-step integrators for the deterministic model.
//!
//! * [`integrate_ode`]: classical RK4 for the nondelayed system (`r = 0`).
//! * [`integrate_dde`]: Adams–Bashforth–Moulton (PECE, order 4) for the
//!   delayed system. Every evaluation happens on a grid node, so with `h`
//!   dividing `r` the delayed value `E(t - r)` is always a stored node and no
//!   history interpolation is needed. The multistep memory is restarted at
//!   the first few multiples of `r`, where the solution has derivative jumps.
//! * [`integrate_dde_cascade`]: interval-by-interval solution through the
//!   integrating-factor representation; used as an independent oracle.
//! * [`integrate_euler`]: explicit Euler, the zero-noise limit of the
//!   stochastic scheme.

mod adams;
mod cascade;

use thiserror::Error;

use crate::model::{InitialCondition, ModelError, Params, State, ValidationReport, PROPAGATION_TOL};
use crate::scalar::Scalar;

pub use cascade::integrate_dde_cascade;

/// Lowest value a trajectory component may take before integration aborts.
pub const POSITIVITY_FLOOR: f64 = -1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrationError {
    #[error("invalid parameters: {0}")]
    InvalidParams(ValidationReport),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("step {h} does not divide horizon {t_end}")]
    StepMismatch { h: f64, t_end: f64 },
    #[error("step {h} does not divide delay {r}")]
    DelayMismatch { h: f64, r: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invariant breach at node {node}: {detail}")]
    InvariantBreach { node: usize, detail: String },
}

/// Time grid and the states computed on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<State<T>>,
    pub step: T,
}

impl<T: Scalar> Trajectory<T> {
    /// Wraps raw nodes `x(k h)` without any invariant checks.
    pub(crate) fn from_nodes(nodes: Vec<[T; 4]>, h: T) -> Self {
        let times = (0..nodes.len()).map(|k| T::of(k as f64) * h).collect();
        let states = nodes.into_iter().map(State::from_array_unchecked).collect();
        Self { times, states, step: h }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn final_state(&self) -> State<T> {
        *self.states.last().expect("trajectory has at least the initial node")
    }

    pub fn final_time(&self) -> T {
        *self.times.last().expect("trajectory has at least the initial node")
    }

    /// Largest `|S + E + I + R - 1|` over all nodes.
    pub fn max_sum_drift(&self) -> T {
        self.states
            .iter()
            .fold(T::zero(), |acc, x| acc.max((x.sum() - T::one()).abs()))
    }

    pub fn min_component(&self) -> T {
        self.states
            .iter()
            .fold(T::infinity(), |acc, x| x.to_array().iter().fold(acc, |a, v| a.min(*v)))
    }

    /// Max-norm distance between two trajectories at the nodes they share.
    ///
    /// `stride_self` / `stride_other` select every k-th node of each.
    pub fn max_difference(&self, stride_self: usize, other: &Self, stride_other: usize) -> T {
        self.states
            .iter()
            .step_by(stride_self)
            .zip(other.states.iter().step_by(stride_other))
            .fold(T::zero(), |acc, (a, b)| acc.max(a.distance(b)))
    }
}

/// Number of steps of size `h` in `[0, t_end]`.
pub fn step_count<T: Scalar>(t_end: T, h: T) -> Result<usize, IntegrationError> {
    if !(h > T::zero() && h.is_finite() && t_end.is_finite()) {
        return Err(IntegrationError::Precondition(format!(
            "step must be positive and finite (h = {h}, t_end = {t_end})"
        )));
    }
    if t_end < h {
        return Err(IntegrationError::Precondition(format!(
            "horizon {t_end} shorter than one step {h}"
        )));
    }
    let ratio = t_end / h;
    let n = ratio.round();
    if (ratio - n).abs() > T::tolerance(1e-12) * n.max(T::one()) {
        return Err(IntegrationError::StepMismatch {
            h: h.as_f64(),
            t_end: t_end.as_f64(),
        });
    }
    Ok(n.to_usize().expect("step count fits in usize"))
}

/// Number of steps of size `h` in one delay interval.
pub fn delay_steps<T: Scalar>(r: T, h: T) -> Result<usize, IntegrationError> {
    let ratio = r / h;
    let m = ratio.round();
    if m < T::one() || (ratio - m).abs() > T::tolerance(1e-12) * m.max(T::one()) {
        return Err(IntegrationError::DelayMismatch {
            h: h.as_f64(),
            r: r.as_f64(),
        });
    }
    Ok(m.to_usize().expect("delay step count fits in usize"))
}

/// Default step: `min(0.01, r / 50)`.
pub fn default_step<T: Scalar>(r: T) -> T {
    let base = T::of(0.01);
    if r > T::zero() {
        base.min(r / T::of(50.0))
    } else {
        base
    }
}

pub(crate) fn require_valid<T: Scalar>(p: &Params<T>) -> Result<(), IntegrationError> {
    let report = p.validate();
    if report.valid {
        Ok(())
    } else {
        Err(IntegrationError::InvalidParams(report))
    }
}

/// Validity check that skips the `k_r ≥ r·e` condition.
fn require_valid_except_delay<T: Scalar>(p: &Params<T>) -> Result<(), IntegrationError> {
    let mut report = p.validate();
    report
        .violations
        .retain(|v| *v != crate::model::Violation::DelayValidity);
    report.valid = report.violations.is_empty();
    if report.valid {
        Ok(())
    } else {
        Err(IntegrationError::InvalidParams(report))
    }
}

/// Drift of the four compartments given the current state and `E(t - r)`.
///
/// The four components sum to zero in exact arithmetic.
#[inline]
pub(crate) fn drift<T: Scalar>(p: &Params<T>, x: &[T; 4], e_delayed: T) -> [T; 4] {
    let infection = p.beta * x[0] * x[2];
    let latency = e_delayed / p.k_r;
    let recovery = p.mu * x[2];
    let waning = p.gamma * x[3];
    [
        waning - infection,
        infection - latency,
        latency - recovery,
        recovery - waning,
    ]
}

/// Checks one integrator node against the trajectory invariants.
pub(crate) fn check_node<T: Scalar>(node: usize, x: &[T; 4]) -> Result<(), IntegrationError> {
    let floor = T::of(POSITIVITY_FLOOR);
    for (name, v) in ["S", "E", "I", "R"].iter().zip(x.iter()) {
        if !v.is_finite() || *v < floor {
            return Err(IntegrationError::InvariantBreach {
                node,
                detail: format!("{name} = {v} below positivity floor"),
            });
        }
    }
    let sum = x[0] + x[1] + x[2] + x[3];
    if (sum - T::one()).abs() > T::tolerance(PROPAGATION_TOL) {
        return Err(IntegrationError::InvariantBreach {
            node,
            detail: format!("components sum to {sum}"),
        });
    }
    Ok(())
}

fn into_trajectory<T: Scalar>(nodes: Vec<[T; 4]>, h: T) -> Result<Trajectory<T>, IntegrationError> {
    for (k, x) in nodes.iter().enumerate() {
        check_node(k, x)?;
    }
    Ok(Trajectory::from_nodes(nodes, h))
}

fn axpy<T: Scalar>(x: &[T; 4], a: T, d: &[T; 4]) -> [T; 4] {
    [x[0] + a * d[0], x[1] + a * d[1], x[2] + a * d[2], x[3] + a * d[3]]
}

/// Classical fourth-order Runge–Kutta integration of the nondelayed model.
pub fn integrate_ode<T: Scalar>(
    p: &Params<T>,
    x0: &State<T>,
    t_end: T,
    h: T,
) -> Result<Trajectory<T>, IntegrationError> {
    require_valid(p)?;
    if p.r != T::zero() {
        return Err(IntegrationError::Precondition(
            "integrate_ode requires r = 0; use integrate_dde for delayed runs".into(),
        ));
    }
    let n = step_count(t_end, h)?;
    let half = h / T::of(2.0);
    let sixth = h / T::of(6.0);
    let two = T::of(2.0);
    let rhs = |x: &[T; 4]| drift(p, x, x[1]);

    let mut nodes = Vec::with_capacity(n + 1);
    let mut x = x0.to_array();
    nodes.push(x);
    for k in 1..=n {
        let k1 = rhs(&x);
        let k2 = rhs(&axpy(&x, half, &k1));
        let k3 = rhs(&axpy(&x, half, &k2));
        let k4 = rhs(&axpy(&x, h, &k3));
        for c in 0..4 {
            x[c] = x[c] + sixth * (k1[c] + two * k2[c] + two * k3[c] + k4[c]);
        }
        check_node(k, &x)?;
        nodes.push(x);
    }
    into_trajectory(nodes, h)
}

/// Explicit Euler with node lookup of `E(t - r)`; `r = 0` is allowed.
pub fn integrate_euler<T: Scalar>(
    p: &Params<T>,
    ic: &InitialCondition<T>,
    t_end: T,
    h: T,
) -> Result<Trajectory<T>, IntegrationError> {
    require_valid(p)?;
    let n = step_count(t_end, h)?;
    let lag = if p.r > T::zero() { delay_steps(p.r, h)? } else { 0 };

    let mut nodes: Vec<[T; 4]> = Vec::with_capacity(n + 1);
    nodes.push(ic.state_at_zero().to_array());
    for k in 0..n {
        let x = nodes[k];
        let e_delayed = delayed_e(&nodes, k, lag, ic.e0);
        let d = drift(p, &x, e_delayed);
        let next = euler_update(&x, h, &d);
        check_node(k + 1, &next)?;
        nodes.push(next);
    }
    into_trajectory(nodes, h)
}

#[inline]
pub(crate) fn euler_update<T: Scalar>(x: &[T; 4], h: T, d: &[T; 4]) -> [T; 4] {
    [x[0] + h * d[0], x[1] + h * d[1], x[2] + h * d[2], x[3] + h * d[3]]
}

/// `E` at node `k - lag`, or the constant history before `t = 0`.
#[inline]
pub(crate) fn delayed_e<T: Scalar>(nodes: &[[T; 4]], k: usize, lag: usize, e0: T) -> T {
    if k >= lag {
        nodes[k - lag][1]
    } else {
        e0
    }
}

/// Delayed model on a uniform grid with `r / h` integer.
pub fn integrate_dde<T: Scalar>(
    p: &Params<T>,
    ic: &InitialCondition<T>,
    t_end: T,
    h: T,
) -> Result<Trajectory<T>, IntegrationError> {
    require_valid(p)?;
    dde_core(p, ic, t_end, h)
}

/// Same as [`integrate_dde`] without the `k_r ≥ r·e` requirement.
///
/// Positivity is no longer guaranteed; the node checks still apply. Intended
/// for probing the linear stability boundary at delays beyond the validity
/// range.
pub fn integrate_dde_unchecked<T: Scalar>(
    p: &Params<T>,
    ic: &InitialCondition<T>,
    t_end: T,
    h: T,
) -> Result<Trajectory<T>, IntegrationError> {
    require_valid_except_delay(p)?;
    dde_core(p, ic, t_end, h)
}

fn dde_core<T: Scalar>(
    p: &Params<T>,
    ic: &InitialCondition<T>,
    t_end: T,
    h: T,
) -> Result<Trajectory<T>, IntegrationError> {
    if p.r <= T::zero() {
        return Err(IntegrationError::Precondition("integrate_dde requires r > 0".into()));
    }
    let n = step_count(t_end, h)?;
    let lag = delay_steps(p.r, h)?;
    if t_end < p.r {
        return Err(IntegrationError::Precondition(format!(
            "horizon {t_end} shorter than the delay {}",
            p.r
        )));
    }
    let x0 = ic.state_at_zero().to_array();
    let nodes = adams::integrate(x0, x0, lag, n, h, |x, delayed| drift(p, x, delayed[1]), check_node)?;
    into_trajectory(nodes, h)
}

/// Scalar comparison equation `F'(t) = -k F(t - r)` with constant history
/// `f0`, integrated with the same node-only Adams scheme.
pub fn integrate_scalar_comparison<T: Scalar>(k: T, r: T, f0: T, t_end: T, h: T) -> Result<Vec<T>, IntegrationError> {
    if !(k > T::zero() && r > T::zero() && f0 >= T::zero()) {
        return Err(IntegrationError::Precondition(
            "comparison equation needs k > 0, r > 0, f0 ≥ 0".into(),
        ));
    }
    let n = step_count(t_end, h)?;
    let lag = delay_steps(r, h)?;
    let nodes = adams::integrate([f0], [f0], lag, n, h, |_, delayed| [-k * delayed[0]], |_, _| Ok(()))?;
    Ok(nodes.into_iter().map(|x| x[0]).collect())
}
