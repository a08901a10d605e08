//! Roots of monic cubics `x³ + a x² + b x + c`.
//!
//! One real root is found in closed form (Cardano or the trigonometric form
//! depending on the discriminant) and polished with Newton; the remaining
//! quadratic factor is solved with the cancellation-free formula.

use num_complex::Complex;

use crate::scalar::Scalar;

#[inline]
fn eval<T: Scalar>(a: T, b: T, c: T, x: T) -> T {
    ((x + a) * x + b) * x + c
}

#[inline]
fn eval_derivative<T: Scalar>(a: T, b: T, x: T) -> T {
    (T::of(3.0) * x + T::of(2.0) * a) * x + b
}

/// Newton iterations that only accept strictly improving residuals.
fn polish<T: Scalar>(a: T, b: T, c: T, mut x: T) -> T {
    let mut best = eval(a, b, c, x).abs();
    for _ in 0..8 {
        if best == T::zero() {
            break;
        }
        let d = eval_derivative(a, b, x);
        if d == T::zero() {
            break;
        }
        let candidate = x - eval(a, b, c, x) / d;
        let res = eval(a, b, c, candidate).abs();
        if res < best {
            x = candidate;
            best = res;
        } else {
            break;
        }
    }
    x
}

/// A real root of the cubic, preferring the one of largest magnitude.
fn dominant_real_root<T: Scalar>(a: T, b: T, c: T) -> T {
    if c == T::zero() {
        return T::zero();
    }
    let three = T::of(3.0);
    let shift = a / three;
    let p = b - a * a / three;
    let q = T::of(2.0) * a * a * a / T::of(27.0) - a * b / three + c;
    let half_q = q / T::of(2.0);
    let disc = half_q * half_q + (p / three).powi(3);

    let t = if disc > T::zero() {
        let sign = if q >= T::zero() { T::one() } else { -T::one() };
        let u = (-half_q - sign * disc.sqrt()).cbrt();
        if u == T::zero() {
            T::zero()
        } else {
            u - p / (three * u)
        }
    } else if p == T::zero() {
        T::zero()
    } else {
        let m = T::of(2.0) * (-p / three).sqrt();
        let arg = (three * q / (p * m)).max(-T::one()).min(T::one());
        let phi = arg.acos() / three;
        let step = T::of(2.0) * T::PI() / three;
        (0..3)
            .map(|k| m * (phi - step * T::of(k as f64)).cos())
            .fold(T::zero(), |best, v| {
                if (v - shift).abs() > (best - shift).abs() {
                    v
                } else {
                    best
                }
            })
    };
    polish(a, b, c, t - shift)
}

/// All three roots, real ones first in ascending order.
pub fn cubic_roots<T: Scalar>(a: T, b: T, c: T) -> [Complex<T>; 3] {
    let x1 = dominant_real_root(a, b, c);
    // x³ + a x² + b x + c = (x - x1)(x² + p x + q)
    let p = a + x1;
    let q = if x1 != T::zero() { -c / x1 } else { b };
    let disc = p * p - T::of(4.0) * q;
    let scale = (p * p).max((T::of(4.0) * q).abs());
    let negligible = disc.abs() <= T::of(64.0) * T::epsilon() * scale;

    let mut roots = if disc >= T::zero() || negligible {
        let root = if disc > T::zero() { disc.sqrt() } else { T::zero() };
        let sign = if p >= T::zero() { T::one() } else { -T::one() };
        let s = -(p + sign * root) / T::of(2.0);
        let (x2, x3) = if s == T::zero() {
            (T::zero(), T::zero())
        } else if root == T::zero() {
            (s, s)
        } else {
            (s, q / s)
        };
        let mut reals = [x1, polish(a, b, c, x2), polish(a, b, c, x3)];
        reals.sort_by(|u, v| u.partial_cmp(v).expect("finite roots"));
        reals.map(|x| Complex::new(x, T::zero()))
    } else {
        let re = -p / T::of(2.0);
        let im = (-disc).sqrt() / T::of(2.0);
        [Complex::new(x1, T::zero()), Complex::new(re, im), Complex::new(re, -im)]
    };
    if roots[1].im == T::zero() {
        roots.sort_by(|u, v| u.re.partial_cmp(&v.re).expect("finite roots"));
    }
    roots
}

/// Real roots of `x³ + a x² + b x + c`, sorted, repeated by multiplicity.
pub fn cubic_real_roots<T: Scalar>(a: T, b: T, c: T) -> Vec<T> {
    cubic_roots(a, b, c)
        .iter()
        .filter(|z| z.im == T::zero())
        .map(|z| z.re)
        .collect()
}

/// Residual bound the root finder guarantees: `1e-12 · max(1, |a|, |b|, |c|)`.
pub fn cubic_residual_bound<T: Scalar>(a: T, b: T, c: T) -> T {
    T::tolerance(1e-12) * T::one().max(a.abs()).max(b.abs()).max(c.abs())
}

/// `|x³ + a x² + b x + c|`.
pub fn cubic_residual<T: Scalar>(a: T, b: T, c: T, x: T) -> T {
    eval(a, b, c, x).abs()
}
