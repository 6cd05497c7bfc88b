use proptest::prelude::*;
use rug::ops::Pow;
use rug::Float;

use stirling2::params::{central_params, lagrange_saddle, lambda_alpha, solve_lambda_star, solve_saddle, LambdaFamily};
use stirling2::special::lambert_w;
use stirling2::SolverConfig;

fn cfg() -> SolverConfig {
    SolverConfig::new(50).unwrap()
}

fn rel(a: &Float, b: &Float) -> f64 {
    (Float::with_val(a.prec(), a / b) - 1u32).abs().to_f64()
}

#[test]
fn lambda_table_columns() {
    let c = cfg();
    let n = 1000u32;
    let w = lambert_w(&c.float(n), &c).unwrap().to_f64();
    let k = (f64::from(n) / w).round() as u32;
    let p = central_params(n, k, &c).unwrap();
    assert!((p.lambda.to_f64() - 1.0).abs() < 0.05, "λ = {}", p.lambda.to_f64());

    let p = central_params(n, n, &c).unwrap();
    let want = Float::with_val(c.bits(), -1i32).exp() * n;
    assert!(rel(&p.lambda, &want) < 1e-45);

    let p = central_params(n, 1, &c).unwrap();
    let want = Float::with_val(c.bits(), -i64::from(n)).exp();
    assert!(rel(&p.lambda, &want) < 1e-45);
}

#[test]
fn saddle_residual_and_bracket() {
    let c = cfg();
    let s = solve_saddle(20, 11, &c).unwrap();
    let rs = Float::with_val(c.bits(), 21u32) / 11u32;
    let phi = Float::with_val(c.bits(), -Float::with_val(c.bits(), -&s.r).exp_m1()) * &rs - &s.r;
    assert!(phi.abs() < 1e-30);
    assert!(solve_saddle(9, 10, &c).unwrap().r.is_zero());

    // bisection oracle on R/(1-e^{-R}) - ρ*, increasing in R
    let rs = Float::with_val(c.bits(), 201u32) / 70u32;
    let g = |r: &Float| -> Float {
        let d = -Float::with_val(r.prec(), -r).exp_m1();
        Float::with_val(r.prec(), r / d) - &rs
    };
    let mut lo = Float::with_val(c.bits(), &rs - 1u32);
    let mut hi = rs.clone();
    for _ in 0..300 {
        let mid = Float::with_val(c.bits(), &lo + &hi) / 2u32;
        if g(&mid) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s = solve_saddle(200, 70, &c).unwrap();
    assert!(s.r >= Float::with_val(c.bits(), &rs - 1u32) && s.r <= rs);
    assert!(rel(&s.r, &lo) < 1e-40);
    assert!(s.v >= 0);
}

#[test]
fn saddle_decreases_in_k() {
    let c = cfg();
    for n in [30u32, 200] {
        let mut prev = Float::with_val(c.bits(), f64::INFINITY);
        for k in 1..=n + 1 {
            let s = solve_saddle(n, k, &c).unwrap();
            assert!(s.r < prev, "n={n} k={k}");
            prev = s.r;
        }
    }
}

#[test]
fn lagrange_series_converges() {
    let c = cfg();
    for (n, k) in [(200u32, 50u32), (200, 60), (1000, 250), (90, 30)] {
        let rs = Float::with_val(c.bits(), n + 1) / k;
        assert!(rs >= 3);
        let r = solve_saddle(n, k, &c).unwrap().r;
        let mut prev = f64::INFINITY;
        for terms in 1..=12 {
            let d = Float::with_val(c.bits(), lagrange_saddle(&rs, terms) - &r).abs().to_f64();
            assert!(d < prev, "n={n} k={k} terms={terms}");
            prev = d;
        }
        // terms shrink like (ρ* e^{1-ρ*})^J
        let ratio = (rs.to_f64() * (1.0 - rs.to_f64()).exp()).powi(40);
        assert!(Float::with_val(c.bits(), lagrange_saddle(&rs, 40) - &r).abs().to_f64() < ratio);
    }
}

#[test]
fn lambda_alpha_columns() {
    let c = cfg();
    let p = central_params(500, 90, &c).unwrap();
    let k = 90u32;
    assert!(rel(&lambda_alpha(&p, &c.float(0)), &p.lambda) < 1e-45);
    let laplace = Float::with_val(c.bits(), -Float::with_val(c.bits(), 501u32) / k).exp() * k;
    assert!(rel(&lambda_alpha(&p, &c.float(1)), &laplace) < 1e-45);
    let menon = Float::with_val(c.bits(), Float::with_val(c.bits(), 1u32) / (2 * k)).exp() * &p.lambda;
    assert!(rel(&lambda_alpha(&p, &c.float(-0.5)), &menon) < 1e-45);
}

#[test]
fn ee_star_equation_and_expansion() {
    let c = cfg();
    let n = 1000u32;
    for k in [185u32, 190, 195] {
        let p = central_params(n, k, &c).unwrap();
        let s = solve_lambda_star(&p, LambdaFamily::Ee, &c).unwrap();
        let (kf, rho, lam) = (p.float(k), p.rho.clone(), p.lambda.clone());
        let two_k = Float::with_val(c.bits(), &kf * 2u32);
        let expo = -Float::with_val(c.bits(), &rho) - Float::with_val(c.bits(), &rho / &two_k)
            + Float::with_val(c.bits(), Float::with_val(c.bits(), &rho + 1u32) * &s.value) / &two_k;
        let rhs = expo.exp() * &kf;
        assert!(Float::with_val(c.bits(), &rhs - &s.value).abs() < 1e-30);

        // λ + (λ(λ-1)ρ + λ^2)/(2k) + O(k^-2)
        let (l, r, kk) = (lam.to_f64(), rho.to_f64(), f64::from(k));
        let two = l + (l * (l - 1.0) * r + l * l) / (2.0 * kk);
        let bound = l * (1.0 + l).powi(2) * (1.0 + r).powi(2) / (kk * kk);
        assert!((s.value.to_f64() - two).abs() <= bound, "k={k}");
    }
}

#[test]
fn hat_matches_three_term_series() {
    let c = cfg();
    let n = 1000u32;
    for k in [170u32, 189, 210] {
        let p = central_params(n, k, &c).unwrap();
        let s = solve_lambda_star(&p, LambdaFamily::Hat, &c).unwrap();
        let (l, r, kk) = (p.lambda.to_f64(), p.rho.to_f64(), f64::from(k));
        let series = l
            + l * ((l - 1.0) * r + l) / (2.0 * kk)
            + l * (3.0 * (4.0 * l * l - 6.0 * l + 1.0) * r * r + 8.0 * (2.0 * l * l - 1.0) * r + 8.0 * l * l)
                / (24.0 * kk * kk);
        let bound = l * (1.0 + l).powi(3) * (1.0 + r).powi(3) / kk.powi(3);
        let d = (s.value.to_f64() - series).abs();
        assert!(d <= bound, "k={k} d={d} bound={bound}");
        // and strictly better than the two-term truncation
        let two = l + l * ((l - 1.0) * r + l) / (2.0 * kk);
        assert!(d < (s.value.to_f64() - two).abs());
    }
}

#[test]
fn lambda_star_collapses_as_k_over_n_vanishes() {
    // Along k = n^{2/3}, k/n -> 0 and the first correction (of size ρ/k = n/k^2) vanishes.
    let c = cfg();
    let fams = [LambdaFamily::Ee, LambdaFamily::Be, LambdaFamily::Bb, LambdaFamily::Eb, LambdaFamily::Hat];
    let mut prev = [f64::INFINITY; 5];
    for n in [1000u32, 8000, 64000] {
        let k = f64::from(n).powf(2.0 / 3.0).round() as u32;
        let p = central_params(n, k, &c).unwrap();
        for (i, fam) in fams.iter().enumerate() {
            let s = solve_lambda_star(&p, *fam, &c).unwrap();
            let base = if fam.binomial_base() { &p.lambda_b } else { &p.lambda };
            let d = rel(&s.value, base);
            assert!(d < prev[i], "{fam:?} n={n}");
            prev[i] = d;
        }
    }
    assert!(prev.iter().all(|&d| d < 0.05));
}

#[test]
fn tree_forms_cover_whole_range() {
    // every closed-form argument stays inside [0, 1/e] for 1 <= k <= n
    let c = cfg();
    let fams = [LambdaFamily::Ee, LambdaFamily::Be, LambdaFamily::Bb, LambdaFamily::Eb];
    for n in [2u32, 5, 60] {
        for k in 2..=n {
            let p = central_params(n, k, &c).unwrap();
            for fam in fams {
                let s = solve_lambda_star(&p, fam, &c).unwrap();
                assert!(s.defining_residual < 1e-30, "{fam:?} n={n} k={k}");
            }
        }
    }
    // binomial-base shifts are undefined at k = 1
    let p = central_params(10, 1, &c).unwrap();
    for fam in [LambdaFamily::Bb, LambdaFamily::Eb] {
        assert_eq!(solve_lambda_star(&p, fam, &c).unwrap_err().exit_code(), 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn central_params_consistency(n in 2u32..=600, kk in 0u32..600) {
        let k = 1 + kk % n;
        let c = SolverConfig::new(40).unwrap();
        let p = central_params(n, k, &c).unwrap();
        let kf = p.float(k);
        prop_assert!(p.lambda > 0);
        prop_assert!(p.lambda <= Float::with_val(p.prec(), -1i32).exp() * k * (1.0 + 1e-30));
        prop_assert!(p.lambda_b < p.lambda);
        // Λ(k-λ) = λ
        let back = Float::with_val(p.prec(), &kf - &p.lambda) * &p.big_lambda;
        prop_assert!(rel(&back, &p.lambda) < 1e-30);
        // Λ = e^{-ρ}/(1-e^{-ρ})
        let e = Float::with_val(p.prec(), -&p.rho).exp();
        let big = Float::with_val(p.prec(), &e / Float::with_val(p.prec(), 1u32 - &e));
        prop_assert!(rel(&big, &p.big_lambda) < 1e-30);
        // λ_b/λ = (e^{1/k}(1-1/k))^n, with λ_b = 0 at k = 1
        if k == 1 {
            prop_assert!(p.lambda_b.is_zero());
            return Ok(());
        }
        let q = Float::with_val(p.prec(), kf.recip_ref()).exp() * Float::with_val(p.prec(), 1u32 - Float::with_val(p.prec(), kf.recip_ref()));
        let q = q.pow(n);
        prop_assert!(rel(&Float::with_val(p.prec(), &p.lambda_b / &p.lambda), &q) < 1e-28);
        prop_assert!(rel(&Float::with_val(p.prec(), &p.rho * &kf), &p.float(n)) < 1e-35);
    }
}
