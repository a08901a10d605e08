use super::*;
use crate::deterministic::drift;
use crate::equilibria::coexistence_equilibrium;
use crate::model::State;
use proptest::prelude::*;

type C = Complex<f64>;

fn params(beta: f64, mu: f64, gamma: f64, k_r: f64, r: f64) -> Params<f64> {
    Params::new(beta, mu, gamma, k_r, r, 0.0)
}

/// Central-difference Jacobians of the drift in `(E, I, R)` with
/// `S = 1 - E - I - R`: one for the current state, one for the delayed `E`.
fn numeric_jacobians(p: &Params<f64>, x: &State<f64>) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let h = 1e-6;
    let reduced = |eir: [f64; 3], e_lag: f64| {
        let full = [1.0 - eir[0] - eir[1] - eir[2], eir[0], eir[1], eir[2]];
        let d = drift(p, &full, e_lag);
        [d[1], d[2], d[3]]
    };
    let base = [x.e(), x.i(), x.rcv()];
    let mut j0 = [[0.0; 3]; 3];
    for col in 0..3 {
        let (mut up, mut down) = (base, base);
        up[col] += h;
        down[col] -= h;
        let (fu, fd) = (reduced(up, x.e()), reduced(down, x.e()));
        for row in 0..3 {
            j0[row][col] = (fu[row] - fd[row]) / (2.0 * h);
        }
    }
    let mut jd = [[0.0; 3]; 3];
    let (fu, fd) = (reduced(base, x.e() + h), reduced(base, x.e() - h));
    for row in 0..3 {
        jd[row][0] = (fu[row] - fd[row]) / (2.0 * h);
    }
    (j0, jd)
}

fn complex_det(m: [[C; 3]; 3]) -> C {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `det(λI - J₀ - J_d e^{-λr})`.
fn characteristic_oracle(j0: &[[f64; 3]; 3], jd: &[[f64; 3]; 3], lambda: C, r: f64) -> C {
    let z = (-lambda * r).exp();
    let mut m = [[C::new(0.0, 0.0); 3]; 3];
    for row in 0..3 {
        for col in 0..3 {
            let diag = if row == col { lambda } else { C::new(0.0, 0.0) };
            m[row][col] = diag - j0[row][col] - z * jd[row][col];
        }
    }
    complex_det(m)
}

#[test]
fn free_disease_matrix_entries() {
    let m = jacobian_free_disease(&params(0.1, 0.2, 0.3, 2.0, 0.0));
    assert_eq!(m.0, [[-0.5, 0.1, 0.0], [0.5, -0.2, 0.0], [0.0, 0.2, -0.3]]);
    assert!((m.trace() + (0.5 + 0.2 + 0.3)).abs() < 1e-15);
    assert!(m.is_finite());
}

#[test]
fn free_disease_eigenvalues_reference() {
    let p = params(0.1, 0.2, 0.3, 2.0, 0.0);
    let closed = free_disease_eigenvalues_closed_form(&p);
    assert!((closed[0] + 0.0807417596).abs() < 1e-9, "{closed:?}");
    assert!((closed[1] + 0.6192582404).abs() < 1e-9);
    assert_eq!(closed[2], -0.3);
    let numeric = jacobian_free_disease(&p).eigenvalues();
    let mut sorted = closed;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (z, want) in numeric.iter().zip(sorted) {
        assert!(z.im == 0.0 && (z.re - want).abs() <= 1e-10);
    }
}

#[test]
fn free_disease_eigenvalue_is_zero_at_threshold() {
    let p = params(0.25, 0.25, 0.3, 2.0, 0.0);
    assert_eq!(free_disease_eigenvalues_closed_form(&p)[0], 0.0);
    assert_eq!(
        spectral_stability(&jacobian_free_disease(&p).eigenvalues()),
        Stability::Marginal
    );
}

#[test]
fn free_disease_unstable_above_threshold() {
    let p = params(0.4, 0.2, 0.1, 2.0, 0.0);
    assert!(free_disease_eigenvalues_closed_form(&p)[0] > 0.0);
    assert_eq!(
        spectral_stability(&jacobian_free_disease(&p).eigenvalues()),
        Stability::Unstable
    );
}

#[test]
fn coexistence_matrix_reference() {
    let p = params(0.4, 0.2, 0.1, 2.0, 0.0);
    let a = jacobian_coexistence(&p).unwrap();
    assert_eq!(a.entry(1, 0), 0.5);
    assert_eq!(a.entry(2, 2), -0.1);
    assert!((a.determinant() + 0.01).abs() <= 1e-14, "{}", a.determinant());
}

#[test]
fn coexistence_matrix_matches_numeric_linearization() {
    let p = params(0.4, 0.2, 0.1, 2.0, 0.0);
    let x_star = coexistence_equilibrium(&p).unwrap();
    let (j0, jd) = numeric_jacobians(&p, &x_star);
    let a = jacobian_coexistence(&p).unwrap();
    for row in 0..3 {
        for col in 0..3 {
            let numeric = j0[row][col] + jd[row][col];
            assert!((a.entry(row, col) - numeric).abs() < 1e-8, "({row},{col})");
        }
    }
}

#[test]
fn coexistence_requires_endemic_regime() {
    let p = params(0.1, 0.2, 0.3, 2.0, 0.0);
    assert!(matches!(
        jacobian_coexistence(&p),
        Err(StabilityError::NoCoexistence { .. })
    ));
    assert!(routh_hurwitz_coexistence(&p).is_err());
    assert!(char_poly_delay_coexistence(&p.with_delay(0.5)).is_err());
}

#[test]
fn routh_hurwitz_reference_point_is_stable() {
    let verdict = routh_hurwitz_coexistence(&params(0.4, 0.2, 0.1, 2.0, 0.0)).unwrap();
    assert!(verdict.stable);
    assert_eq!(verdict.status, Stability::Stable);
    assert_eq!(verdict.criteria.len(), 3);
    assert!(verdict.criteria.iter().all(|c| c.satisfied && !c.marginal));
}

#[test]
fn free_disease_quasi_polynomial_reference() {
    let q = char_poly_delay_free(&params(0.1, 0.2, 0.3, 2.0, 0.5));
    assert_eq!(q.degree(), 2);
    assert_eq!(q.a(), &[0.0, 0.2]);
    assert!((q.b()[0] - 0.05).abs() < 1e-15 && q.b()[1] == 0.5);
    assert_eq!(q.delay(), 0.5);
    let at_threshold = char_poly_delay_free(&params(0.2, 0.2, 0.3, 2.0, 0.5));
    assert_eq!(at_threshold.b()[0], 0.0);
}

#[test]
fn free_disease_quasi_polynomial_matches_oracle() {
    let p = params(0.1, 0.2, 0.3, 2.0, 0.5);
    let (j0, jd) = numeric_jacobians(&p, &State::disease_free());
    let q = char_poly_delay_free(&p);
    for lambda in [C::new(0.3, 0.7), C::new(-0.2, 1.5), C::new(1.0, 0.0)] {
        let full = (lambda + p.gamma) * q.eval(lambda);
        let oracle = characteristic_oracle(&j0, &jd, lambda, p.r);
        assert!((full - oracle).norm() < 1e-8, "{lambda}: {full} vs {oracle}");
    }
    let removed = characteristic_oracle(&j0, &jd, C::new(-p.gamma, 0.0), p.r);
    assert!(removed.norm() < 1e-9);
}

#[test]
fn coexistence_quasi_polynomial_reference() {
    let q = char_poly_delay_coexistence(&params(0.4, 0.2, 0.1, 2.0, 0.5)).unwrap();
    let want_a = [0.0011764706, 0.0376470588, 0.3588235294];
    let want_b = [0.0088235294, 0.0794117647, 0.5];
    for (got, want) in q.a().iter().zip(want_a).chain(q.b().iter().zip(want_b)) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
    let (a, b) = (q.a(), q.b());
    let s: Vec<f64> = q.undelayed();
    assert!(s[2] * s[1] - s[0] > 0.0);
    assert!(a[0] * a[0] - b[0] * b[0] < 0.0);
}

#[test]
fn quasi_polynomial_rejects_bad_shapes() {
    assert!(matches!(
        QuasiPolynomial::new(vec![1.0], vec![1.0], 0.0),
        Err(StabilityError::BadDegree { .. })
    ));
    assert!(matches!(
        QuasiPolynomial::new(vec![1.0, 2.0], vec![1.0, 2.0, 3.0], 0.0),
        Err(StabilityError::BadDegree { .. })
    ));
    assert!(matches!(
        QuasiPolynomial::new(vec![1.0, f64::NAN], vec![1.0, 2.0], 0.0),
        Err(StabilityError::NonFinite)
    ));
}

#[test]
fn single_precision_smoke() {
    let p: Params<f32> = Params::new(0.4, 0.2, 0.1, 2.0, 0.5, 0.0);
    assert!(routh_hurwitz_coexistence(&p).unwrap().stable);
    let q = char_poly_delay_coexistence(&p).unwrap();
    assert!((q.a()[2] - 0.358_823_5).abs() < 1e-6);
}

fn endemic() -> impl Strategy<Value = Params<f64>> {
    (0.05f64..0.95, 0.05f64..0.95, 0.05f64..0.95, 0.2f64..6.0)
        .prop_filter("beta > mu", |(b, m, _, _)| b - m > 1e-3)
        .prop_map(|(b, m, g, k)| params(b, m, g, k, 0.0))
}

fn any_valid() -> impl Strategy<Value = Params<f64>> {
    (0.01f64..0.99, 0.01f64..0.99, 0.01f64..0.99, 0.1f64..8.0).prop_map(|(b, m, g, k)| params(b, m, g, k, 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_matches_numeric_spectrum(p in any_valid()) {
        let mut closed = free_disease_eigenvalues_closed_form(&p);
        closed.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let numeric = jacobian_free_disease(&p).eigenvalues();
        for (z, want) in numeric.iter().zip(closed) {
            prop_assert!(z.im == 0.0);
            prop_assert!((z.re - want).abs() <= 1e-10, "{} vs {}", z.re, want);
        }
        let positive = closed.iter().filter(|v| **v > 0.0).count();
        if p.beta < p.mu {
            prop_assert_eq!(positive, 0);
        } else if p.beta > p.mu {
            prop_assert_eq!(positive, 1);
        }
    }

    #[test]
    fn free_disease_routh_hurwitz_matches_spectrum(p in any_valid()) {
        prop_assume!((p.beta - p.mu).abs() > 1e-6);
        let verdict = routh_hurwitz_free_disease(&p);
        prop_assert_eq!(verdict.stable, p.beta < p.mu);
        let spectrum = jacobian_free_disease(&p).eigenvalues();
        prop_assert_eq!(spectral_stability(&spectrum), verdict.status);
    }

    #[test]
    fn coexistence_is_always_stable(p in endemic()) {
        let verdict = routh_hurwitz_coexistence(&p).unwrap();
        prop_assert!(verdict.stable, "{:?}", verdict);
        let spectrum = jacobian_coexistence(&p).unwrap().eigenvalues();
        prop_assert_eq!(spectral_stability(&spectrum), verdict.status);
        let det = jacobian_coexistence(&p).unwrap().determinant();
        prop_assert!((det + p.gamma * (p.beta - p.mu) / p.k_r).abs() <= 1e-14);
    }

    #[test]
    fn coexistence_quasi_polynomial_matches_oracle(p in endemic(), r in 0.0f64..3.0, re in -1.0f64..1.0, im in -2.0f64..2.0) {
        let p = p.with_delay(r);
        let x_star = coexistence_equilibrium(&p).unwrap();
        let (j0, jd) = numeric_jacobians(&p, &x_star);
        let q = char_poly_delay_coexistence(&p).unwrap();
        let lambda = C::new(re, im);
        let got = q.eval(lambda);
        let want = characteristic_oracle(&j0, &jd, lambda, r);
        prop_assert!((got - want).norm() <= 1e-7 * (1.0 + want.norm()), "{} vs {}", got, want);
    }

    #[test]
    fn quasi_polynomial_at_origin(a in prop::collection::vec(-5.0f64..5.0, 3), b in prop::collection::vec(-5.0f64..5.0, 3), r in 0.0f64..10.0) {
        let q = QuasiPolynomial::new(a.clone(), b.clone(), r).unwrap();
        let v = q.eval(C::new(0.0, 0.0));
        prop_assert_eq!(v, C::new(a[0] + b[0], 0.0));
    }
}
