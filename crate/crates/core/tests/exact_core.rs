use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use stirling2::exact::{
    bell_numbers, coupon_covered, exact_moment, normalized_s, sieve_numerator, sieve_profile, stirling2_sieve,
    StirlingTriangle,
};

/// Block counts of every set partition of {0..n}, by restricted growth strings.
fn brute_block_counts(n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n + 1];
    let mut a = vec![0usize; n];
    loop {
        let blocks = a.iter().max().map_or(0, |m| m + 1);
        counts[if n == 0 { 0 } else { blocks }] += 1;
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return counts;
            }
            i -= 1;
            let cap = a[..i].iter().max().unwrap() + 1;
            if a[i] < cap {
                a[i] += 1;
                for x in &mut a[i + 1..] {
                    *x = 0;
                }
                break;
            }
        }
    }
}

#[test]
fn brute_force_partitions() {
    for n in 1..=9usize {
        let counts = brute_block_counts(n);
        for k in 1..=n {
            assert_eq!(stirling2_sieve(n as u32, k as u32), counts[k], "n={n} k={k}");
        }
    }
    assert_eq!(stirling2_sieve(4, 2), 7);
}

#[test]
fn trivial_columns() {
    for n in 1..=40 {
        assert_eq!(stirling2_sieve(n, 1), 1);
        assert_eq!(stirling2_sieve(n, n), 1);
        let s = normalized_s(n, n).unwrap();
        let want = Rational::from((Integer::from(Integer::factorial(n)), Integer::from(Integer::u_pow_u(n, n))));
        assert_eq!(s, want);
    }
}

#[test]
fn bell_values_and_domination() {
    let b = bell_numbers(30).unwrap();
    let first: Vec<u32> = b[..6].iter().map(|x| x.to_u32().unwrap()).collect();
    assert_eq!(first, [1, 1, 2, 5, 15, 52]);
    let tri = StirlingTriangle::new(30).unwrap();
    for n in 0..=30u32 {
        assert!(tri.row(n).iter().all(|s| *s <= b[n as usize]));
    }
}

#[test]
fn sieve_first_term_is_one() {
    for (n, k) in [(5, 3), (20, 11), (200, 70)] {
        assert_eq!(sieve_profile(n, k).unwrap().terms[0], 1);
    }
}

fn subsets(k: u32, s: u32) -> Vec<u32> {
    (0u32..1 << k).filter(|m| m.count_ones() == s).collect()
}

/// Fraction of all n-tuples of s-subsets of {0..k} whose union is everything.
fn brute_coverage(n: u32, k: u32, s: u32) -> Rational {
    let subs = subsets(k, s);
    let full = (1u32 << k) - 1;
    let mut hit = 0u64;
    let total = (subs.len() as u64).pow(n);
    for mut idx in 0..total {
        let mut acc = 0u32;
        for _ in 0..n {
            acc |= subs[(idx % subs.len() as u64) as usize];
            idx /= subs.len() as u64;
        }
        if acc == full {
            hit += 1;
        }
    }
    Rational::from((hit, total))
}

#[test]
fn coupon_brute_force() {
    for (k, s) in [(4, 1), (4, 2), (5, 2), (5, 3), (6, 3)] {
        for n in 1..=4 {
            assert_eq!(coupon_covered(n, k, s).unwrap(), brute_coverage(n, k, s), "n={n} k={k} s={s}");
        }
    }
}

#[test]
fn coupon_special_cases() {
    assert_eq!(coupon_covered(20, 11, 1).unwrap(), normalized_s(20, 11).unwrap());
    for n in 1..=10 {
        assert_eq!(coupon_covered(n, 7, 7).unwrap(), 1);
    }
    assert!(coupon_covered(3, 5, 6).is_err());
}

#[test]
fn coupon_monotone_in_n() {
    for (k, s) in [(10, 1), (12, 3), (20, 5), (30, 7)] {
        let mut prev = Rational::new();
        for n in 1..=60 {
            let p = coupon_covered(n, k, s).unwrap();
            assert!(p >= prev, "k={k} s={s} n={n}");
            prev = p;
        }
    }
}

#[test]
fn moment_examples() {
    assert_eq!(exact_moment(7, 0, false).unwrap(), 1);
    assert_eq!(exact_moment(3, 1, false).unwrap(), 2);
    let b = bell_numbers(12).unwrap();
    let mean = exact_moment(10, 1, false).unwrap();
    assert_eq!(mean + 1u32, Rational::from((b[11].clone(), b[10].clone())));
}

#[test]
fn max_term_near_lambda() {
    // k = 1.8 n / log n: the sieve's largest term sits at j ≈ λ and obeys the two-sided bound.
    let mut prev_lam = 0.0;
    for n in [1000u32, 2000, 4000] {
        let nf = f64::from(n);
        let k = (1.8 * nf / nf.ln()).round() as u32;
        let lam = f64::from(k) * (-nf / f64::from(k)).exp();
        let prof = sieve_profile(n, k).unwrap();
        // |j*/λ - 1| <= 1/λ with λ growing along the grid
        assert!((f64::from(prof.j_star) - lam).abs() <= 1.0, "n={n} j*={} λ={lam}", prof.j_star);
        assert!(lam > prev_lam);
        prev_lam = lam;

        let j0 = lam.floor() as u32;
        let fact = Float::with_val(200, &Integer::from(Integer::factorial(j0)));
        let top = Float::with_val(200, Float::with_val(200, lam).pow(j0)) / fact;
        let bmax = Float::with_val(200, &prof.terms[prof.j_star as usize]);
        let c = 1.0 - (-1f64).exp() - 0.5;
        let low = Float::with_val(200, &top) * (-2.0 * nf * (-2.0 * nf / f64::from(k)).exp() / c).exp();
        assert!(bmax <= top && bmax >= low, "n={n}");
    }
}

#[test]
fn bai_inequality() {
    let prec = 200;
    for n in [1u32, 2, 5, 10, 50, 100, 1000, 10000] {
        for i in 0..=200 {
            let t = Float::with_val(prec, i) / 200u32;
            let nt = Float::with_val(prec, &t * n);
            let lhs = Float::with_val(prec, Float::with_val(prec, 1u32 - &t).pow(n) - Float::with_val(prec, -&nt).exp());
            let rhs = Float::with_val(prec, &nt * &t) * Float::with_val(prec, -&nt).exp();
            assert!(lhs.abs() <= rhs, "n={n} t={}", t.to_f64());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bonferroni(n in 1u32..=60, kk in 0u32..60) {
        let k = 1 + kk % n;
        let prof = sieve_profile(n, k).unwrap();
        let s = normalized_s(n, k).unwrap();
        for j in 1..=k as usize {
            let gap = Rational::from(&s - &prof.partial_sums[j - 1]).abs();
            prop_assert!(gap <= prof.terms[j], "n={} k={} j={}", n, k, j);
        }
        prop_assert_eq!(&prof.total, &s);
    }

    #[test]
    fn uniform_bound(n in 1u32..=60, kk in 0u32..60) {
        let k = 1 + kk % n;
        let lhs = stirling2_sieve(n, k) * Integer::from(Integer::factorial(k));
        prop_assert!(lhs <= Integer::from(Integer::u_pow_u(k, n)));
        prop_assert_eq!(sieve_numerator(n, k), lhs);
    }

    #[test]
    fn sieve_terms_unimodal(n in 1u32..=60, kk in 0u32..60) {
        let k = 1 + kk % n;
        let b = sieve_profile(n, k).unwrap().terms;
        let peak = (0..b.len()).max_by(|&x, &y| b[x].cmp(&b[y]).then(y.cmp(&x))).unwrap();
        if k >= 1 && b[1] > b[0] {
            prop_assert!(b[..=peak].windows(2).all(|w| w[0] <= w[1]));
        } else {
            prop_assert_eq!(peak, 0);
        }
        prop_assert!(b[peak..].windows(2).all(|w| w[0] > w[1] || (w[0] == w[1] && w[0] == 0)));
    }
}
