//! Linearizations at the two equilibria, their eigenvalues and the
//! characteristic quasi-polynomials of the delayed model.
//!
//! The susceptible class is eliminated through `S = 1 - E - I - R`, so every
//! matrix acts on `(E, I, R)`.

use std::fmt;

use num_complex::Complex;
use thiserror::Error;

use crate::equilibria::coexistence_equilibrium;
use crate::model::Params;
use crate::polynomial::cubic_roots;
use crate::scalar::Scalar;

/// Values within this distance of zero are classified as marginal.
pub const MARGINAL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("no coexistence equilibrium: beta = {beta} ≤ mu = {mu}")]
    NoCoexistence { beta: f64, mu: f64 },
    #[error("quasi-polynomial needs matching coefficient lists of length 2 or 3, got {a} and {b}")]
    BadDegree { a: usize, b: usize },
    #[error("non-finite quasi-polynomial coefficient")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix3<T>(pub [[T; 3]; 3]);

impl<T: Scalar> Matrix3<T> {
    pub fn entry(&self, row: usize, col: usize) -> T {
        self.0[row][col]
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn determinant(&self) -> T {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Sum of the principal 2×2 minors: the coefficient of `λ` in
    /// `det(λI - M)`.
    pub fn principal_minor_sum(&self) -> T {
        let m = &self.0;
        m[0][0] * m[1][1] + m[0][0] * m[2][2] + m[1][1] * m[2][2]
            - m[0][1] * m[1][0]
            - m[0][2] * m[2][0]
            - m[1][2] * m[2][1]
    }

    /// `(c2, c1, c0)` with `det(λI - M) = λ³ + c2 λ² + c1 λ + c0`.
    pub fn characteristic_coefficients(&self) -> (T, T, T) {
        (-self.trace(), self.principal_minor_sum(), -self.determinant())
    }

    /// Eigenvalues as the roots of the characteristic cubic.
    pub fn eigenvalues(&self) -> [Complex<T>; 3] {
        let (c2, c1, c0) = self.characteristic_coefficients();
        cubic_roots(c2, c1, c0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        })
    }
}

/// Sign test on the largest real part of a spectrum.
pub fn spectral_stability<T: Scalar>(eigenvalues: &[Complex<T>]) -> Stability {
    let max_re = eigenvalues.iter().fold(T::neg_infinity(), |acc, z| acc.max(z.re));
    classify_negative(max_re)
}

/// `Stable` when `value < 0` beyond the marginal band.
fn classify_negative<T: Scalar>(value: T) -> Stability {
    let tol = T::tolerance(MARGINAL_TOL);
    if value.abs() <= tol {
        Stability::Marginal
    } else if value < T::zero() {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion<T> {
    pub condition: &'static str,
    pub value: T,
    pub satisfied: bool,
    pub marginal: bool,
}

impl<T: Scalar> Criterion<T> {
    fn negative(condition: &'static str, value: T) -> Self {
        let class = classify_negative(value);
        Self {
            condition,
            value,
            satisfied: class == Stability::Stable,
            marginal: class == Stability::Marginal,
        }
    }

    fn positive(condition: &'static str, value: T) -> Self {
        let mut c = Self::negative(condition, -value);
        c.value = value;
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict<T> {
    pub stable: bool,
    pub status: Stability,
    pub criteria: Vec<Criterion<T>>,
}

impl<T: Scalar> StabilityVerdict<T> {
    fn from_criteria(criteria: Vec<Criterion<T>>) -> Self {
        let stable = criteria.iter().all(|c| c.satisfied);
        let status = if stable {
            Stability::Stable
        } else if criteria.iter().any(|c| c.marginal) {
            Stability::Marginal
        } else {
            Stability::Unstable
        };
        Self {
            stable,
            status,
            criteria,
        }
    }
}

/// Linearization at `(1, 0, 0, 0)` in the `(E, I, R)` coordinates.
pub fn jacobian_free_disease<T: Scalar>(p: &Params<T>) -> Matrix3<T> {
    let k = p.latency_rate();
    let z = T::zero();
    Matrix3([[-k, p.beta, z], [k, -p.mu, z], [z, p.mu, -p.gamma]])
}

/// `(λ₊, λ₋, -γ)` for the disease-free linearization.
pub fn free_disease_eigenvalues_closed_form<T: Scalar>(p: &Params<T>) -> [T; 3] {
    let two = T::of(2.0);
    let lead = p.mu * p.k_r + T::one();
    let radicand = lead * lead - T::of(4.0) * p.k_r * (p.mu - p.beta);
    let root = radicand.max(T::zero()).sqrt();
    let denom = two * p.k_r;
    [(root - lead) / denom, -(lead + root) / denom, -p.gamma]
}

/// Linearization at the coexistence point (nondelayed).
pub fn jacobian_coexistence<T: Scalar>(p: &Params<T>) -> Result<Matrix3<T>, StabilityError> {
    let x_star = coexistence_equilibrium(p).ok_or(StabilityError::NoCoexistence {
        beta: p.beta.as_f64(),
        mu: p.mu.as_f64(),
    })?;
    let k = p.latency_rate();
    let force = p.beta * x_star.i();
    let z = T::zero();
    Ok(Matrix3([
        [-force - k, p.mu - force, -force],
        [k, -p.mu, z],
        [z, p.mu, -p.gamma],
    ]))
}

/// Routh–Hurwitz test on the coexistence linearization:
/// `trace < 0`, `det < 0` and `-A₂·trace + det > 0`.
pub fn routh_hurwitz_coexistence<T: Scalar>(p: &Params<T>) -> Result<StabilityVerdict<T>, StabilityError> {
    let a = jacobian_coexistence(p)?;
    let trace = a.trace();
    let det = a.determinant();
    let minors = a.principal_minor_sum();
    Ok(StabilityVerdict::from_criteria(vec![
        Criterion::negative("trace < 0", trace),
        Criterion::negative("det < 0", det),
        Criterion::positive("-A2·trace + det > 0", -minors * trace + det),
    ]))
}

/// Routh–Hurwitz test on `λ³ + c2 λ² + c1 λ + c0`.
pub fn routh_hurwitz_cubic<T: Scalar>(c2: T, c1: T, c0: T) -> StabilityVerdict<T> {
    StabilityVerdict::from_criteria(vec![
        Criterion::positive("c2 > 0", c2),
        Criterion::positive("c0 > 0", c0),
        Criterion::positive("c2·c1 - c0 > 0", c2 * c1 - c0),
    ])
}

/// Routh–Hurwitz test on the disease-free linearization.
pub fn routh_hurwitz_free_disease<T: Scalar>(p: &Params<T>) -> StabilityVerdict<T> {
    let (c2, c1, c0) = jacobian_free_disease(p).characteristic_coefficients();
    routh_hurwitz_cubic(c2, c1, c0)
}

/// `λⁿ + Σ aₖ λᵏ + (Σ bₖ λᵏ) e^{-λ r}` with `n = 2` or `3`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPolynomial<T> {
    a: Vec<T>,
    b: Vec<T>,
    delay: T,
}

impl<T: Scalar> QuasiPolynomial<T> {
    /// `a` and `b` are ordered by ascending power of `λ`.
    pub fn new(a: Vec<T>, b: Vec<T>, delay: T) -> Result<Self, StabilityError> {
        if a.len() != b.len() || !(2..=3).contains(&a.len()) {
            return Err(StabilityError::BadDegree { a: a.len(), b: b.len() });
        }
        if !a.iter().chain(b.iter()).all(|v| v.is_finite()) || !delay.is_finite() {
            return Err(StabilityError::NonFinite);
        }
        Ok(Self { a, b, delay })
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn delay(&self) -> T {
        self.delay
    }

    pub fn with_delay(&self, delay: T) -> Self {
        Self { delay, ..self.clone() }
    }

    /// Coefficients of the `r = 0` polynomial, ascending, without the
    /// leading 1.
    pub fn undelayed(&self) -> Vec<T> {
        self.a.iter().zip(&self.b).map(|(x, y)| *x + *y).collect()
    }

    fn horner(coeffs: &[T], lambda: Complex<T>) -> Complex<T> {
        coeffs.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, c| {
            acc * lambda + Complex::new(*c, T::zero())
        })
    }

    /// Instantaneous part `λⁿ + Σ aₖ λᵏ`.
    pub fn instantaneous(&self, lambda: Complex<T>) -> Complex<T> {
        let mut coeffs = self.a.clone();
        coeffs.push(T::one());
        Self::horner(&coeffs, lambda)
    }

    /// Delayed part `Σ bₖ λᵏ`, before the exponential factor.
    pub fn delayed(&self, lambda: Complex<T>) -> Complex<T> {
        Self::horner(&self.b, lambda)
    }

    pub fn eval_with_delay(&self, lambda: Complex<T>, delay: T) -> Complex<T> {
        self.instantaneous(lambda) + self.delayed(lambda) * (-lambda * delay).exp()
    }

    pub fn eval(&self, lambda: Complex<T>) -> Complex<T> {
        self.eval_with_delay(lambda, self.delay)
    }
}

/// Degree-2 factor of the delayed disease-free characteristic function
/// (the root `-γ` factored out).
pub fn char_poly_delay_free<T: Scalar>(p: &Params<T>) -> QuasiPolynomial<T> {
    let k = p.latency_rate();
    QuasiPolynomial::new(vec![T::zero(), p.mu], vec![(p.mu - p.beta) * k, k], p.r)
        .expect("two finite coefficients each")
}

/// Degree-3 characteristic function at the coexistence point.
pub fn char_poly_delay_coexistence<T: Scalar>(p: &Params<T>) -> Result<QuasiPolynomial<T>, StabilityError> {
    if p.beta <= p.mu {
        return Err(StabilityError::NoCoexistence {
            beta: p.beta.as_f64(),
            mu: p.mu.as_f64(),
        });
    }
    let (beta, mu, gamma, k_r) = (p.beta, p.mu, p.gamma, p.k_r);
    let d = p.endemic_denominator();
    let dk = d * k_r;
    let a0 = gamma * gamma * mu * (beta - mu) / d;
    let a1 = gamma * (gamma * k_r * mu * mu + beta * gamma + beta * mu) / d;
    let a2 =
        (gamma * gamma * k_r * mu + gamma * k_r * mu * mu + beta * gamma + gamma * gamma + gamma * mu + mu * mu) / d;
    let b0 = gamma * (beta * gamma + beta * mu - gamma * mu - mu * mu) / dk;
    let b1 = gamma * (gamma * k_r * mu + beta + gamma) / dk;
    let b2 = k_r.recip();
    QuasiPolynomial::new(vec![a0, a1, a2], vec![b0, b1, b2], p.r)
}

#[cfg(test)]
mod tests;
