//! Basic reproduction number and the two equilibria of the model.

use crate::model::{Params, State};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSet<T> {
    pub r0: T,
    /// Always `(1, 0, 0, 0)`.
    pub x_free: State<T>,
    /// Endemic point; present exactly when `β > μ`.
    pub x_star: Option<State<T>>,
}

/// `R₀ = β / μ`.
pub fn basic_reproduction_number<T: Scalar>(p: &Params<T>) -> T {
    p.beta / p.mu
}

/// Closed-form coexistence equilibrium, absent when `β ≤ μ`.
pub fn coexistence_equilibrium<T: Scalar>(p: &Params<T>) -> Option<State<T>> {
    if p.beta <= p.mu {
        return None;
    }
    let excess = p.beta - p.mu;
    let denom = p.beta * p.endemic_denominator();
    let s = p.mu / p.beta;
    let e = p.k_r * excess * p.mu * p.gamma / denom;
    let i = p.gamma * excess / denom;
    let rcv = excess * p.mu / denom;
    Some(State::new(s, e, i, rcv).expect("closed-form endemic point lies on the simplex"))
}

/// Max-norm of the four balance equations evaluated at `x`.
pub fn equilibrium_residual<T: Scalar>(p: &Params<T>, x: &State<T>) -> T {
    let infection = p.beta * x.s() * x.i();
    let latency = x.e() / p.k_r;
    let recovery = p.mu * x.i();
    let waning = p.gamma * x.rcv();
    [
        -infection + waning,
        infection - latency,
        latency - recovery,
        recovery - waning,
    ]
    .iter()
    .fold(T::zero(), |acc, v| acc.max(v.abs()))
}

pub fn equilibria<T: Scalar>(p: &Params<T>) -> EquilibriumSet<T> {
    EquilibriumSet {
        r0: basic_reproduction_number(p),
        x_free: State::disease_free(),
        x_star: coexistence_equilibrium(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(beta: f64, mu: f64, gamma: f64, k_r: f64) -> Params<f64> {
        Params::new(beta, mu, gamma, k_r, 0.0, 0.0)
    }

    #[test]
    fn reproduction_number() {
        assert_eq!(basic_reproduction_number(&params(0.4, 0.2, 0.1, 2.0)), 2.0);
        assert_eq!(basic_reproduction_number(&params(0.2, 0.2, 0.1, 2.0)), 1.0);
        assert_eq!(basic_reproduction_number(&params(0.1, 0.2, 0.1, 2.0)), 0.5);
    }

    #[test]
    fn endemic_point_reference_values() {
        let p = params(0.4, 0.2, 0.1, 2.0);
        let x = coexistence_equilibrium(&p).unwrap();
        // βD = 0.4 · (0.1·2·0.2 + 0.1 + 0.2) = 0.136
        let expected = [0.5, 0.008 / 0.136, 0.02 / 0.136, 0.04 / 0.136];
        for (got, want) in x.to_array().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
        assert!((x.e() - 0.0588235294117647).abs() < 1e-12);
        assert!(equilibrium_residual(&p, &x) <= 1e-12);
    }

    #[test]
    fn no_endemic_point_below_threshold() {
        assert!(coexistence_equilibrium(&params(0.1, 0.2, 0.1, 2.0)).is_none());
        assert!(coexistence_equilibrium(&params(0.2, 0.2, 0.1, 2.0)).is_none());
    }

    #[test]
    fn endemic_point_approaches_disease_free() {
        let x = coexistence_equilibrium(&params(0.2 + 1e-12, 0.2, 0.1, 2.0)).unwrap();
        assert!(x.distance(&State::disease_free()) < 1e-10);
        assert!(x.e() > 0.0 && x.i() > 0.0 && x.rcv() > 0.0);
    }

    #[test]
    fn residual_examples() {
        let p = params(0.4, 0.2, 0.1, 2.0);
        assert_eq!(equilibrium_residual(&p, &State::disease_free()), 0.0);
        // Right-hand sides at the barycentre: (0, -0.1, 0.075, 0.025).
        let mid = State::new(0.25, 0.25, 0.25, 0.25).unwrap();
        assert!((equilibrium_residual(&p, &mid) - 0.1).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn endemic_point_invariants(mu in 0.01f64..0.98, frac in 0.001f64..1.0, gamma in 0.01f64..0.99, k_r in 0.05f64..20.0) {
            let beta = mu + frac * (0.999 - mu);
            let p = params(beta, mu, gamma, k_r);
            let set = equilibria(&p);
            prop_assert_eq!(equilibrium_residual(&p, &set.x_free), 0.0);
            let x = set.x_star.unwrap();
            prop_assert!(x.e() > 0.0 && x.i() > 0.0 && x.rcv() > 0.0);
            prop_assert!((x.sum() - 1.0).abs() <= 1e-12);
            prop_assert!((x.s() - mu / beta).abs() <= 1e-15);
            prop_assert!(equilibrium_residual(&p, &x) <= 1e-12);
        }
    }
}
