//! Delay margins: when can the characteristic roots reach the imaginary
//! axis as the delay grows, and at which delay does that first happen.
//!
//! A root `λ = iω` of `P(λ) + Q(λ) e^{-λr}` requires `|P(iω)| = |Q(iω)|`,
//! which is a polynomial equation in `ω²`. The phase condition then fixes
//! `θ = ωr` modulo `2π`, and the first crossing happens at `r* = θ/ω`.

use num_complex::Complex;
use thiserror::Error;

use crate::linearization::{char_poly_delay_free, QuasiPolynomial};
use crate::model::{Params, ValidationReport};
use crate::polynomial::{cubic_real_roots, cubic_residual, cubic_residual_bound};
use crate::scalar::Scalar;

/// Largest `|q(iω)|` accepted for a reported crossing.
pub const CROSSING_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DelayError {
    #[error("expected a degree-{expected} quasi-polynomial, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("a0 + b0 = 0: the origin is a root for every delay")]
    RootAtOrigin,
    #[error("no crossing: {0}")]
    NoCrossing(String),
    #[error("crossing residual {residual:e} exceeds {tol:e}")]
    Residual { residual: f64, tol: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(ValidationReport),
    #[error("margin needs beta < mu (beta = {beta}, mu = {mu})")]
    NotBelowThreshold { beta: f64, mu: f64 },
}

/// First imaginary-axis crossing of a quasi-polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingReport<T> {
    pub omega: T,
    pub theta: T,
    pub r_star: T,
    pub cos_theta: T,
    pub sin_theta: T,
    pub residual: T,
}

/// Coefficients of `x³ + A x² + B x + C` with `x = ω²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicABC<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Scalar> CubicABC<T> {
    pub fn from_quasi_polynomial(q: &QuasiPolynomial<T>) -> Result<Self, DelayError> {
        expect_degree(q, 3)?;
        let (a, b) = (q.a(), q.b());
        let two = T::of(2.0);
        Ok(Self {
            a: a[2] * a[2] - b[2] * b[2] - two * a[1],
            b: a[1] * a[1] - b[1] * b[1] + two * b[2] * b[0] - two * a[2] * a[0],
            c: a[0] * a[0] - b[0] * b[0],
        })
    }

    /// `18ABC - 4A³C + A²B² - 4B² - 27C²`, the discriminant that decides
    /// the crossing. It differs from the classical one in the `B` term.
    pub fn delta(&self) -> T {
        let (a, b, c) = (self.a, self.b, self.c);
        T::of(18.0) * a * b * c - T::of(4.0) * a.powi(3) * c + a * a * b * b - T::of(4.0) * b * b - T::of(27.0) * c * c
    }

    /// The classical cubic discriminant, with `-4B³`.
    pub fn delta_standard(&self) -> T {
        let (a, b, c) = (self.a, self.b, self.c);
        T::of(18.0) * a * b * c - T::of(4.0) * a.powi(3) * c + a * a * b * b
            - T::of(4.0) * b.powi(3)
            - T::of(27.0) * c * c
    }

    pub fn eval(&self, x: T) -> T {
        ((x + self.a) * x + self.b) * x + self.c
    }

    pub fn real_roots(&self) -> Vec<T> {
        cubic_real_roots(self.a, self.b, self.c)
    }

    pub fn all_positive(&self) -> bool {
        self.a > T::zero() && self.b > T::zero() && self.c > T::zero()
    }
}

/// Outcome of the degree-3 analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct Deg3Crossing<T> {
    pub abc: CubicABC<T>,
    pub delta: T,
    pub delta_standard: T,
    /// Real roots of the cubic in `ω²`, ascending.
    pub omega_sq_roots: Vec<T>,
    /// Whether `delta < 0` agrees with the cubic having a single real root.
    pub discriminant_agrees: bool,
    /// `None` when `delta ≥ 0`: the criterion does not decide that case.
    pub report: Option<CrossingReport<T>>,
}

impl<T> Deg3Crossing<T> {
    pub fn is_inconclusive(&self) -> bool {
        self.report.is_none()
    }
}

fn expect_degree<T: Scalar>(q: &QuasiPolynomial<T>, expected: usize) -> Result<(), DelayError> {
    if q.degree() == expected {
        Ok(())
    } else {
        Err(DelayError::WrongDegree {
            expected,
            got: q.degree(),
        })
    }
}

/// `|q(iω)|` with delay `r`.
pub fn verify_crossing<T: Scalar>(q: &QuasiPolynomial<T>, omega: T, r: T) -> T {
    q.eval_with_delay(Complex::new(T::zero(), omega), r).norm()
}

/// Onset conditions for the degree-2 family: stable without delay, and
/// destabilised by some delay.
pub fn deg2_instability_possible<T: Scalar>(q: &QuasiPolynomial<T>) -> bool {
    if q.degree() != 2 {
        return false;
    }
    let (a, b) = (q.a(), q.b());
    let two = T::of(2.0);
    let stable_undelayed = a[0] + b[0] > T::zero() && a[1] + b[1] > T::zero();
    let (a0_sq, b0_sq) = (a[0] * a[0], b[0] * b[0]);
    let gap = a[1] * a[1] - b[1] * b[1] - two * a[0];
    let crossing = a0_sq < b0_sq
        || (a0_sq > b0_sq && a[1] * a[1] < b[1] * b[1] + two * a[0] && gap * gap > T::of(4.0) * (a0_sq - b0_sq));
    stable_undelayed && crossing
}

/// Phase of a crossing from `P(iω) = X + iY` and `Q(iω) = U + iV`:
/// `e^{-iθ} = -(X + iY)/(U + iV)`.
fn phase<T: Scalar>(x: T, y: T, u: T, v: T) -> (T, T) {
    let den = u * u + v * v;
    (-(x * u + y * v) / den, (y * u - x * v) / den)
}

/// `atan2` shifted into `[0, 2π)`.
fn angle<T: Scalar>(cos: T, sin: T) -> T {
    let two_pi = T::TAU();
    let mut theta = sin.atan2(cos);
    if theta < T::zero() {
        theta = theta + two_pi;
    }
    if theta >= two_pi {
        theta = T::zero();
    }
    theta + T::zero()
}

fn finish<T: Scalar>(q: &QuasiPolynomial<T>, omega: T, cos: T, sin: T) -> Result<CrossingReport<T>, DelayError> {
    let theta = angle(cos, sin);
    let r_star = theta / omega;
    let residual = verify_crossing(q, omega, r_star);
    let tol = T::tolerance(CROSSING_RESIDUAL_TOL);
    if residual.is_nan() || residual > tol {
        return Err(DelayError::Residual {
            residual: residual.as_f64(),
            tol: tol.as_f64(),
        });
    }
    Ok(CrossingReport {
        omega,
        theta,
        r_star,
        cos_theta: cos,
        sin_theta: sin,
        residual,
    })
}

/// `(cos θ, sin θ)` for a degree-2 crossing at `ω`.
pub fn deg2_phase<T: Scalar>(q: &QuasiPolynomial<T>, omega: T) -> (T, T) {
    let (a, b) = (q.a(), q.b());
    phase(a[0] - omega * omega, a[1] * omega, b[0], b[1] * omega)
}

/// `(cos θ, sin θ)` for a degree-3 crossing at `ω`.
pub fn deg3_phase<T: Scalar>(q: &QuasiPolynomial<T>, omega: T) -> (T, T) {
    let (a, b) = (q.a(), q.b());
    let w2 = omega * omega;
    phase(
        a[0] - a[2] * w2,
        a[1] * omega - w2 * omega,
        b[0] - b[2] * w2,
        b[1] * omega,
    )
}

/// First crossing of a degree-2 quasi-polynomial.
pub fn deg2_crossing<T: Scalar>(q: &QuasiPolynomial<T>) -> Result<CrossingReport<T>, DelayError> {
    expect_degree(q, 2)?;
    let (a, b) = (q.a(), q.b());
    if a[0] + b[0] == T::zero() {
        return Err(DelayError::RootAtOrigin);
    }
    let two = T::of(2.0);
    let (a0_sq, b0_sq) = (a[0] * a[0], b[0] * b[0]);
    let lead = b[1] * b[1] + two * a[0] - a[1] * a[1];
    let disc = lead * lead - T::of(4.0) * (a0_sq - b0_sq);
    let second_branch = a0_sq > b0_sq && lead > T::zero() && disc > T::zero();
    if !(a0_sq < b0_sq || second_branch) {
        return Err(DelayError::NoCrossing(
            "|P(iω)| = |Q(iω)| has no positive solution".into(),
        ));
    }
    let root = disc.sqrt();
    let omega_sq = if lead >= T::zero() {
        (lead + root) / two
    } else {
        two * (b0_sq - a0_sq) / (root - lead)
    };
    if omega_sq.is_nan() || omega_sq <= T::zero() {
        return Err(DelayError::NoCrossing(format!("ω² = {omega_sq} is not positive")));
    }
    let omega = omega_sq.sqrt();
    let (cos, sin) = deg2_phase(q, omega);
    finish(q, omega, cos, sin)
}

/// `M = π / (2ω)` for the disease-free factor: a lower bound on the first
/// crossing delay, uniform in `γ` and `r`.
pub fn free_disease_margin<T: Scalar>(p: &Params<T>) -> Result<T, DelayError> {
    let report = p.validate();
    if !report.valid {
        return Err(DelayError::InvalidParams(report));
    }
    if p.beta >= p.mu {
        return Err(DelayError::NotBelowThreshold {
            beta: p.beta.as_f64(),
            mu: p.mu.as_f64(),
        });
    }
    Ok(margin_formula(p.k_r, p.mu, p.beta))
}

/// `M(k_r, μ, β) = π / (√2 √((k_r⁻² - μ²) + √((k_r⁻² - μ²)² + 4 k_r⁻² (μ - β)²)))`
/// without any parameter checks.
pub fn margin_formula<T: Scalar>(k_r: T, mu: T, beta: T) -> T {
    let inv_k_sq = k_r.powi(-2);
    let base = inv_k_sq - mu * mu;
    let gap = mu - beta;
    let inner = base + (base * base + T::of(4.0) * inv_k_sq * gap * gap).sqrt();
    T::PI() / (T::SQRT_2() * inner.sqrt())
}

/// Degree-2 crossing for the disease-free point of `p`.
pub fn free_disease_crossing<T: Scalar>(p: &Params<T>) -> Result<CrossingReport<T>, DelayError> {
    deg2_crossing(&char_poly_delay_free(p))
}

/// Onset conditions for the degree-3 family.
pub fn deg3_instability_possible<T: Scalar>(q: &QuasiPolynomial<T>) -> bool {
    let Ok(abc) = CubicABC::from_quasi_polynomial(q) else {
        return false;
    };
    let (a, b) = (q.a(), q.b());
    let s = q.undelayed();
    let stable_undelayed = a[2] + b[2] > T::zero() && s[0] > T::zero() && s[2] * s[1] - s[0] > T::zero();
    let (ca, cb, cc) = (abc.a, abc.b, abc.c);
    let three = T::of(3.0);
    let branch = cc < T::zero()
        || (cc > T::zero()
            && ca * ca - three * cb > T::zero()
            && T::of(4.0) * (cb * cb - three * ca * cc) * (ca * ca - three * cb) - (T::of(9.0) * cc - ca * cb).powi(2)
                > T::zero());
    !abc.all_positive() && stable_undelayed && branch
}

/// First crossing of a degree-3 quasi-polynomial.
///
/// The cubic in `ω²` is solved directly. Without a positive root there is
/// no crossing at all. Otherwise [`CubicABC::delta`] decides: `Δ ≥ 0`
/// is reported as inconclusive, `Δ < 0` yields the crossing with the
/// smallest delay among the positive roots.
pub fn deg3_crossing<T: Scalar>(q: &QuasiPolynomial<T>) -> Result<Deg3Crossing<T>, DelayError> {
    let abc = CubicABC::from_quasi_polynomial(q)?;
    let (a, b) = (q.a(), q.b());
    if a[0] + b[0] == T::zero() {
        return Err(DelayError::RootAtOrigin);
    }
    let roots = abc.real_roots();
    let delta = abc.delta();
    let delta_standard = abc.delta_standard();
    let discriminant_agrees = (delta < T::zero()) == (roots.len() == 1);

    let positive: Vec<T> = roots.iter().copied().filter(|x| *x > T::zero()).collect();
    if positive.is_empty() {
        return Err(DelayError::NoCrossing(format!(
            "ω⁶ + Aω⁴ + Bω² + C has no positive root in ω² (real roots {roots:?})"
        )));
    }
    let bound = cubic_residual_bound(abc.a, abc.b, abc.c);
    debug_assert!(positive
        .iter()
        .all(|x| cubic_residual(abc.a, abc.b, abc.c, *x) <= bound));

    let report = if delta < T::zero() {
        let mut best: Option<CrossingReport<T>> = None;
        for w2 in positive {
            let omega = w2.sqrt();
            let (cos, sin) = deg3_phase(q, omega);
            let candidate = finish(q, omega, cos, sin)?;
            if best.is_none_or(|b| candidate.r_star < b.r_star) {
                best = Some(candidate);
            }
        }
        best
    } else {
        None
    };
    Ok(Deg3Crossing {
        abc,
        delta,
        delta_standard,
        omega_sq_roots: roots,
        discriminant_agrees,
        report,
    })
}
