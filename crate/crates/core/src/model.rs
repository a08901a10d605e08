//! Model constants, compartment states and the validity checks every other
//! module relies on.
//!
//! All quantities are population fractions; a [`State`] always lies on the
//! probability simplex `S + E + I + R = 1`.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

/// Simplex tolerance applied when a state is constructed from user input.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Simplex tolerance that integrators must maintain along a trajectory.
pub const PROPAGATION_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(ValidationReport),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid initial condition: {0}")]
    InvalidInitialCondition(String),
}

/// The six model constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T> {
    /// Transmission rate.
    pub beta: T,
    /// Recovery rate.
    pub mu: T,
    /// Loss-of-immunity rate.
    pub gamma: T,
    /// Denominator of the latency outflow `E(t - r) / k_r`.
    pub k_r: T,
    /// Latency delay.
    pub r: T,
    /// Noise intensity on the contact rate.
    pub epsilon: T,
}

/// A named constraint that a [`Params`] value failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Violation {
    NonFinite(&'static str),
    OutsideUnitInterval(&'static str),
    NonPositiveKr,
    NegativeDelay,
    NegativeEpsilon,
    /// `k_r < r·e` with `r > 0`: the delayed model may lose positivity.
    DelayValidity,
}

impl Violation {
    pub fn name(&self) -> String {
        match self {
            Violation::NonFinite(field) => format!("non-finite {field}"),
            Violation::OutsideUnitInterval(field) => format!("{field} ∈ (0,1)"),
            Violation::NonPositiveKr => "k_r > 0".to_string(),
            Violation::NegativeDelay => "r ≥ 0".to_string(),
            Violation::NegativeEpsilon => "epsilon ≥ 0".to_string(),
            Violation::DelayValidity => "k_r ≥ r·e".to_string(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            valid: violations.is_empty(),
            violations,
        }
    }

    pub fn has(&self, v: Violation) -> bool {
        self.violations.contains(&v)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return f.write_str("valid");
        }
        let names: Vec<String> = self.violations.iter().map(Violation::name).collect();
        write!(f, "violated {}", names.join(", "))
    }
}

impl<T: Scalar> Params<T> {
    pub fn new(beta: T, mu: T, gamma: T, k_r: T, r: T, epsilon: T) -> Self {
        Self {
            beta,
            mu,
            gamma,
            k_r,
            r,
            epsilon,
        }
    }

    /// Checks every standing assumption on the constants.
    ///
    /// Non-finite inputs are reported as violations; the check never panics.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let fields = [
            ("beta", self.beta),
            ("mu", self.mu),
            ("gamma", self.gamma),
            ("k_r", self.k_r),
            ("r", self.r),
            ("epsilon", self.epsilon),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                violations.push(Violation::NonFinite(name));
            }
        }
        if !violations.is_empty() {
            return ValidationReport::from_violations(violations);
        }

        for (name, value) in [("beta", self.beta), ("mu", self.mu), ("gamma", self.gamma)] {
            if !(value > T::zero() && value < T::one()) {
                violations.push(Violation::OutsideUnitInterval(name));
            }
        }
        if self.k_r <= T::zero() {
            violations.push(Violation::NonPositiveKr);
        }
        if self.r < T::zero() {
            violations.push(Violation::NegativeDelay);
        }
        if self.epsilon < T::zero() {
            violations.push(Violation::NegativeEpsilon);
        }
        if self.r > T::zero() && self.k_r < self.r * T::E() {
            violations.push(Violation::DelayValidity);
        }
        ValidationReport::from_violations(violations)
    }

    /// Returns `self` if valid, the full report otherwise.
    pub fn validated(self) -> Result<Self, ModelError> {
        let report = self.validate();
        if report.valid {
            Ok(self)
        } else {
            Err(ModelError::InvalidParams(report))
        }
    }

    /// Same constants with a different delay.
    pub fn with_delay(self, r: T) -> Self {
        Self { r, ..self }
    }

    /// Same constants with a different noise intensity.
    pub fn with_epsilon(self, epsilon: T) -> Self {
        Self { epsilon, ..self }
    }

    /// Latency outflow rate `1 / k_r`.
    pub fn latency_rate(&self) -> T {
        self.k_r.recip()
    }

    /// `γ k_r μ + γ + μ`, the denominator shared by the endemic closed forms.
    pub(crate) fn endemic_denominator(&self) -> T {
        self.gamma * self.k_r * self.mu + self.gamma + self.mu
    }
}

/// One point `(S, E, I, R)` of the probability simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State<T> {
    s: T,
    e: T,
    i: T,
    rcv: T,
}

fn check_simplex<T: Scalar>(values: [(&str, T); 4]) -> Result<(), String> {
    for (name, v) in values {
        if !v.is_finite() {
            return Err(format!("{name} is not finite"));
        }
    }
    for (name, v) in values {
        if v < T::zero() {
            return Err(format!("{name} = {v} is negative"));
        }
    }
    let sum: T = values.iter().map(|(_, v)| *v).sum();
    if (sum - T::one()).abs() > T::tolerance(CONSTRUCTION_TOL) {
        return Err(format!("components sum to {sum}, not 1"));
    }
    Ok(())
}

impl<T: Scalar> State<T> {
    /// Builds a state, rejecting negative components and sums away from one.
    pub fn new(s: T, e: T, i: T, rcv: T) -> Result<Self, ModelError> {
        check_simplex([("s", s), ("e", e), ("i", i), ("rcv", rcv)]).map_err(ModelError::InvalidState)?;
        Ok(Self { s, e, i, rcv })
    }

    /// Integrator output; invariants are checked by the caller at the
    /// propagation tolerance.
    pub(crate) fn from_array_unchecked(x: [T; 4]) -> Self {
        Self {
            s: x[0],
            e: x[1],
            i: x[2],
            rcv: x[3],
        }
    }

    /// The disease-free point `(1, 0, 0, 0)`.
    pub fn disease_free() -> Self {
        Self {
            s: T::one(),
            e: T::zero(),
            i: T::zero(),
            rcv: T::zero(),
        }
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn e(&self) -> T {
        self.e
    }

    pub fn i(&self) -> T {
        self.i
    }

    pub fn rcv(&self) -> T {
        self.rcv
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.s, self.e, self.i, self.rcv]
    }

    pub fn sum(&self) -> T {
        self.s + self.e + self.i + self.rcv
    }

    /// Infected-or-immune mass `E + I + R`.
    pub fn non_susceptible(&self) -> T {
        self.e + self.i + self.rcv
    }

    /// Max-norm distance between two states.
    pub fn distance(&self, other: &Self) -> T {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()))
    }
}

/// Constant E-history on `[-r, 0]` plus the other fractions at `t = 0`.
///
/// `E(0) = e0`, so the state at `t = 0` is `(s0, e0, i0, r0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition<T> {
    pub e0: T,
    pub s0: T,
    pub i0: T,
    pub r0: T,
}

impl<T: Scalar> InitialCondition<T> {
    pub fn new(e0: T, s0: T, i0: T, r0: T) -> Result<Self, ModelError> {
        check_simplex([("e0", e0), ("s0", s0), ("i0", i0), ("r0", r0)]).map_err(ModelError::InvalidInitialCondition)?;
        Ok(Self { e0, s0, i0, r0 })
    }

    /// Starts from `x` with the E-history frozen at `x.e()`.
    pub fn from_state(x: State<T>) -> Self {
        Self {
            e0: x.e(),
            s0: x.s(),
            i0: x.i(),
            r0: x.rcv(),
        }
    }

    pub fn state_at_zero(&self) -> State<T> {
        State::from_array_unchecked([self.s0, self.e0, self.i0, self.r0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(k_r: f64, r: f64) -> Params<f64> {
        Params::new(0.1, 0.2, 0.3, k_r, r, 0.0)
    }

    #[test]
    fn delay_validity_threshold() {
        // r·e = 0.5 · 2.718281828… = 1.3591409…
        assert!(p(2.0, 0.5).validate().valid);
        let bad = p(1.0, 0.5).validate();
        assert!(!bad.valid);
        assert_eq!(bad.violations, vec![Violation::DelayValidity]);
        assert_eq!(bad.violations[0].name(), "k_r ≥ r·e");
        assert!(p(2.0, 0.0).validate().valid);
    }

    #[test]
    fn exact_threshold_is_valid() {
        let r = 0.7;
        assert!(p(r * std::f64::consts::E, r).validate().valid);
    }

    #[test]
    fn non_finite_inputs_are_violations() {
        let report = Params::new(f64::NAN, 0.2, 0.3, f64::INFINITY, 0.0, 0.0).validate();
        assert!(!report.valid);
        assert!(report.has(Violation::NonFinite("beta")));
        assert!(report.has(Violation::NonFinite("k_r")));
    }

    #[test]
    fn every_violation_is_named() {
        let report = Params::new(0.0, 1.0, 1.5, -1.0, -0.1, -0.2).validate();
        assert_eq!(report.violations.len(), 6);
        assert!(!report.valid);
        let rendered = report.to_string();
        assert!(rendered.contains("beta ∈ (0,1)"));
        assert!(rendered.contains("epsilon ≥ 0"));
    }

    #[test]
    fn make_state_examples() {
        let x0 = State::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(x0, State::disease_free());
        assert!(State::new(0.25, 0.25, 0.25, 0.25).is_ok());
        match State::new(0.5, 0.5, 0.5, -0.5) {
            Err(ModelError::InvalidState(msg)) => assert!(msg.contains("negative"), "{msg}"),
            other => panic!("expected negativity error, got {other:?}"),
        }
        assert!(State::new(0.5, 0.5, 0.1, 0.0).is_err());
        assert!(State::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn initial_condition_checks_simplex() {
        assert!(InitialCondition::new(0.1, 0.8, 0.1, 0.0).is_ok());
        assert!(InitialCondition::new(0.2, 0.8, 0.1, 0.0).is_err());
        let ic = InitialCondition::new(0.1, 0.8, 0.1, 0.0).unwrap();
        assert_eq!(ic.state_at_zero().to_array(), [0.8, 0.1, 0.1, 0.0]);
    }

    proptest! {
        #[test]
        fn accepted_states_lie_in_unit_cube(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
            let total = a + b + c + 1.0;
            if let Ok(x) = State::new(a / total, b / total, c / total, 1.0 / total) {
                for v in x.to_array() {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
            }
        }

        #[test]
        fn validity_is_monotone_in_kr(k in 0.01f64..10.0, extra in 0.0f64..10.0, r in 0.0f64..3.0) {
            if p(k, r).validate().valid {
                prop_assert!(p(k + extra, r).validate().valid);
            }
        }
    }
}
