use flowcorr::numerics::{
    bessel_k, cholesky_psd, eig_sym, expect_1d, integrate, integrate_to_infinity, ln_bessel_k,
    Density, NumericsError, QuadratureSpec, RngStream,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

/// Composite Simpson rule on a uniform grid.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// ln K_nu(x) from K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt.
fn ln_bessel_k_oracle(nu: f64, x: f64) -> f64 {
    let g = |t: f64| -x * t.cosh() + nu * t + (0.5 * (1.0 + (-2.0 * nu * t).exp())).ln();
    // locate the peak and the point where the integrand has dropped by e^-60
    let mut peak = 0.0;
    let mut t = 0.0;
    let mut t_peak = 0.0;
    while t < 800.0 {
        let v = g(t);
        if v > peak || t == 0.0 {
            peak = v;
            t_peak = t;
        }
        if v < peak - 60.0 && t > t_peak {
            break;
        }
        t += 1e-3;
    }
    let upper = t;
    let pieces = 8;
    let width = upper / pieces as f64;
    let total: f64 = (0..pieces)
        .map(|k| {
            simpson(
                |s| (g(s) - peak).exp(),
                k as f64 * width,
                (k + 1) as f64 * width,
                20_000,
            )
        })
        .sum();
    peak + total.ln()
}

#[test]
#[allow(clippy::excessive_precision)]
fn bessel_k_tabulated_values() {
    let cases = [
        (0.0, 1.0, 0.421_024_438_240_708_3),
        (1.0, 1.0, 0.601_907_230_197_234_6),
        (0.0, 0.1, 2.427_069_024_702_016_6),
    ];
    for (nu, x, expected) in cases {
        let got = bessel_k(nu, x).unwrap();
        assert!((got / expected - 1.0).abs() < 1e-12, "K_{nu}({x}) = {got}");
    }
}

#[test]
fn bessel_k_matches_integral_representation() {
    let orders = [0.0, 0.2, 0.5, 0.9, 1.0, 1.5, 1.7, 2.5, 3.2, 7.5, 10.4, 40.3];
    let args = [1e-8, 1e-3, 0.3, 1.9, 2.0, 2.1, 7.0, 60.0, 400.0, 700.0];
    for &nu in &orders {
        for &x in &args {
            let got = ln_bessel_k(nu, x).unwrap();
            let want = ln_bessel_k_oracle(nu, x);
            // compare relative error of K, i.e. absolute error of ln K
            assert!((got - want).abs() < 1e-10, "nu={nu} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn bessel_k_order_recurrence() {
    for &nu in &[0.3, 1.25, 4.6] {
        for &x in &[0.05, 1.5, 3.0, 25.0] {
            let lhs = bessel_k(nu + 1.0, x).unwrap() - bessel_k(nu - 1.0, x).unwrap();
            let rhs = 2.0 * nu / x * bessel_k(nu, x).unwrap();
            assert!((lhs / rhs - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn bessel_k_error_signals() {
    assert!(matches!(bessel_k(1.0, 0.0), Err(NumericsError::Domain(_))));
    assert!(matches!(bessel_k(1.0, -2.0), Err(NumericsError::Domain(_))));
    assert!(matches!(
        bessel_k(0.3, 800.0),
        Err(NumericsError::Underflow(_))
    ));
    assert!(matches!(
        bessel_k(200.0, 1e-6),
        Err(NumericsError::Overflow(_))
    ));
    // the log form keeps working in both regimes
    assert!(ln_bessel_k(0.3, 800.0).unwrap() < -790.0);
    assert!(ln_bessel_k(200.0, 1e-6).unwrap() > 3000.0);
}

#[test]
fn quadrature_known_integrals() {
    let spec = QuadratureSpec::default();
    let est = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, &spec).unwrap();
    assert!((est.value - 2.0).abs() < 1e-13);
    let est = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &spec).unwrap();
    assert!((est.value - 2.0).abs() < 1e-9);
    let est = integrate_to_infinity(|x: f64| (-x * x).exp(), 0.0, &spec).unwrap();
    assert!((est.value - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
}

#[test]
fn quadrature_reports_non_convergence() {
    let spec = QuadratureSpec::new(1e-300, 1e-14, 5).unwrap();
    let res = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &spec);
    assert!(matches!(res, Err(NumericsError::NoConvergence { .. })));
    assert!(QuadratureSpec::new(0.0, 1e-8, 10).is_err());
}

#[test]
fn inverse_gamma_moments() {
    let spec = QuadratureSpec::default();
    let d = Density::InverseGamma {
        shape: 3.0,
        scale: 3.0,
    };
    let mean = expect_1d(&d, |v| v, &spec).unwrap();
    assert!((mean.value - 1.5).abs() < 1e-8);
    for &(shape, scale, k) in &[
        (0.6, 0.6, 0.25),
        (2.5, 1.0, 1.5),
        (5.0, 2.0, 3.0),
        (0.2, 0.2, 0.1),
    ] {
        let d = Density::InverseGamma { shape, scale };
        let got = expect_1d(&d, |v| v.powf(k), &spec).unwrap().value;
        let want = d.raw_moment(k).unwrap();
        assert!(
            (got / want - 1.0).abs() < 1e-8,
            "IG({shape},{scale}) k={k}: {got} vs {want}"
        );
    }
    assert!(Density::InverseGamma {
        shape: 2.0,
        scale: 1.0
    }
    .raw_moment(2.0)
    .is_none());
}

#[test]
fn point_mass_is_exact() {
    let d = Density::PointMass { value: 0.7 };
    let est = expect_1d(&d, |v| (v * 3.0).exp(), &QuadratureSpec::default()).unwrap();
    assert_eq!(est.value, (0.7f64 * 3.0).exp());
}

#[test]
fn laplace_transforms_of_scale_laws() {
    let spec = QuadratureSpec::default();
    let s = 0.37;
    // exponential and gamma: (rate / (rate + s))^shape
    let got = expect_1d(
        &Density::Exponential { rate: 2.0 },
        |v| (-s * v).exp(),
        &spec,
    )
    .unwrap()
    .value;
    assert!((got - 2.0 / (2.0 + s)).abs() < 1e-12);
    let got = expect_1d(
        &Density::Gamma {
            shape: 0.3,
            rate: 1.7,
        },
        |v| (-s * v).exp(),
        &spec,
    )
    .unwrap()
    .value;
    assert!((got - (1.7f64 / (1.7 + s)).powf(0.3)).abs() < 1e-12);
    // inverse gamma: 2 (b s)^{a/2} K_a(2 sqrt(b s)) / Γ(a)
    let (a, b): (f64, f64) = (1.3, 0.8);
    let z = 2.0 * (b * s).sqrt();
    let want = 2.0 * (b * s).powf(a / 2.0) * bessel_k(a, z).unwrap() / flowcorr::numerics::gamma(a);
    let got = expect_1d(
        &Density::InverseGamma { shape: a, scale: b },
        |v| (-s * v).exp(),
        &spec,
    )
    .unwrap()
    .value;
    assert!((got - want).abs() < 1e-11);
}

#[test]
fn heavy_tailed_laws() {
    let spec = QuadratureSpec::default();
    let hc = Density::HalfCauchy { scale: 2.0 };
    let total = expect_1d(&hc, |_| 1.0, &spec).unwrap().value;
    assert!((total - 1.0).abs() < 1e-11);
    let got = expect_1d(&hc, |v| v.sqrt(), &spec).unwrap().value;
    assert!((got - hc.raw_moment(0.5).unwrap()).abs() < 1e-9);
    let bp = Density::BetaPrime {
        alpha: 1.0,
        beta: 0.5,
        scale: 0.3,
    };
    let got = expect_1d(&bp, |v| v.powf(0.25), &spec).unwrap().value;
    assert!((got / bp.raw_moment(0.25).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn cholesky_reconstructs_and_reports_jitter() {
    let a = DMatrix::from_row_slice(3, 3, &[4.0, 2.0, 0.6, 2.0, 3.0, 0.4, 0.6, 0.4, 1.0]);
    let c = cholesky_psd(&a).unwrap();
    assert_eq!(c.jitter, 0.0);
    let back = &c.lower * c.lower.transpose();
    assert!((back - &a).amax() < 1e-14);

    // rank-one matrix needs a shift from the ladder
    let v = nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]);
    let r1 = &v * v.transpose();
    let c = cholesky_psd(&r1).unwrap();
    assert!(c.jitter > 0.0);
    assert!(c.jitter <= 1e-8 * r1.trace() / 3.0);

    let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    assert!(matches!(
        cholesky_psd(&indefinite),
        Err(NumericsError::NotPsd { .. })
    ));
    let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
    assert!(matches!(cholesky_psd(&asym), Err(NumericsError::Shape(_))));
}

/// Characteristic polynomial coefficients by Faddeev-LeVerrier, highest first.
fn char_poly(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    let id = DMatrix::<f64>::identity(n, n);
    let mut c = 1.0;
    for k in 1..=n {
        m = a * &m + &id * c;
        let am = a * &m;
        c = -am.trace() / k as f64;
        coeffs.push(c);
    }
    coeffs
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &ci| acc * x + ci)
}

#[test]
fn eig_sym_matches_characteristic_polynomial_roots() {
    let mut rng = RngStream::new(5, 0).rng();
    let b = DMatrix::from_fn(5, 5, |_, _| rng.random::<f64>() - 0.5);
    let a = &b + b.transpose();
    let (values, vectors) = eig_sym(&a).unwrap();
    // roots by scanning for sign changes and bisecting
    let coeffs = char_poly(&a);
    let bound = a.abs().row_sum().max() + 1.0;
    let mut roots = Vec::new();
    let steps = 200_000;
    let mut prev_x = -bound;
    let mut prev = poly_eval(&coeffs, prev_x);
    for i in 1..=steps {
        let x = -bound + 2.0 * bound * i as f64 / steps as f64;
        let v = poly_eval(&coeffs, x);
        if prev == 0.0 || prev.signum() != v.signum() {
            let (mut lo, mut hi) = (prev_x, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if poly_eval(&coeffs, lo).signum() == poly_eval(&coeffs, mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev = v;
    }
    roots.sort_by(|x, y| y.total_cmp(x));
    assert_eq!(roots.len(), 5);
    for (r, v) in roots.iter().zip(&values) {
        assert!((r - v).abs() < 1e-8, "{r} vs {v}");
    }
    let recon = &vectors
        * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(values))
        * vectors.transpose();
    assert!((recon - a).amax() < 1e-12);
}

#[test]
fn rng_streams_are_reproducible_and_distinct() {
    let s = RngStream::new(11, 3);
    let a: Vec<u64> = (0..4)
        .map(|_| 0)
        .scan(s.rng(), |r, _| Some(r.random()))
        .collect();
    let b: Vec<u64> = (0..4)
        .map(|_| 0)
        .scan(s.rng(), |r, _| Some(r.random()))
        .collect();
    assert_eq!(a, b);
    let c: Vec<u64> = (0..4)
        .map(|_| 0)
        .scan(RngStream::new(11, 4).rng(), |r, _| Some(r.random()))
        .collect();
    assert_ne!(a, c);
    assert_ne!(s.child(0), s.child(1));
    assert_eq!(s.child(2), s.child(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_k_positive_and_decreasing_in_x(nu in 0.0f64..6.0, x in 0.01f64..50.0) {
        let k1 = bessel_k(nu, x).unwrap();
        let k2 = bessel_k(nu, x * 1.01).unwrap();
        prop_assert!(k1 > 0.0);
        prop_assert!(k2 < k1);
    }

    #[test]
    fn bessel_k_increasing_in_order(nu in 0.0f64..6.0, x in 0.01f64..50.0) {
        prop_assert!(bessel_k(nu + 0.1, x).unwrap() > bessel_k(nu, x).unwrap());
    }

    #[test]
    fn random_psd_matrices_factor(seed in 0u64..1000, n in 1usize..8, rank in 1usize..8) {
        let mut rng = RngStream::new(seed, 0).rng();
        let b = DMatrix::from_fn(n, rank.min(n), |_, _| rng.random::<f64>() - 0.5);
        let a = &b * b.transpose();
        let c = cholesky_psd(&a).unwrap();
        let back = &c.lower * c.lower.transpose();
        let tol = 1e-12 * a.amax().max(1.0) + c.jitter;
        prop_assert!((back - &a).amax() <= tol * 2.0);
    }
}
