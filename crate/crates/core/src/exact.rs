//! Exact big-integer and rational computations.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Default byte budget for a fully stored triangle.
pub const DEFAULT_TABLE_BUDGET: u64 = 1 << 30;

/// One row of Stirling numbers of the second kind, indices `0..=n`.
pub type Row = Vec<Integer>;

/// Iterator over rows `0, 1, 2, ...` of the Stirling triangle.
///
/// Only the current row is held in memory.
#[derive(Debug, Clone, Default)]
pub struct Rows {
    row: Option<Row>,
}

impl Rows {
    pub fn new() -> Self {
        Rows { row: None }
    }
}

impl Iterator for Rows {
    type Item = Row;

    fn next(&mut self) -> Option<Row> {
        let next = match &self.row {
            None => vec![Integer::from(1)],
            Some(prev) => {
                let n = prev.len();
                let mut row = Vec::with_capacity(n + 1);
                row.push(Integer::new());
                for k in 1..=n {
                    let mut v = if k < n { Integer::from(&prev[k] * k as u32) } else { Integer::new() };
                    v += &prev[k - 1];
                    row.push(v);
                }
                row
            }
        };
        self.row = Some(next.clone());
        Some(next)
    }
}

/// Row `n` of the triangle, computed by streaming the recurrence.
pub fn stirling2_row(n: u32) -> Row {
    Rows::new().nth(n as usize).expect("rows iterator is infinite")
}

/// Stored triangle of `Stirling{n}{k}` for `0 <= k <= n <= n_max`.
#[derive(Debug, Clone)]
pub struct StirlingTriangle {
    rows: Vec<Row>,
}

impl StirlingTriangle {
    pub fn new(n_max: u32) -> Result<Self> {
        Self::with_budget(n_max, DEFAULT_TABLE_BUDGET)
    }

    /// Build the table unless its estimated size exceeds `budget_bytes`.
    pub fn with_budget(n_max: u32, budget_bytes: u64) -> Result<Self> {
        let need = estimated_table_bytes(n_max);
        if need > budget_bytes {
            return Err(Error::ResourceLimit(format!(
                "triangle up to n = {n_max} needs about {need} bytes, budget is {budget_bytes}"
            )));
        }
        Ok(StirlingTriangle { rows: Rows::new().take(n_max as usize + 1).collect() })
    }

    pub fn n_max(&self) -> u32 {
        self.rows.len() as u32 - 1
    }

    /// `Stirling{n}{k}`; zero when `k > n`.
    pub fn get(&self, n: u32, k: u32) -> Integer {
        match self.rows.get(n as usize).and_then(|r| r.get(k as usize)) {
            Some(v) => v.clone(),
            None if n <= self.n_max() => Integer::new(),
            None => panic!("row {n} is beyond the stored table"),
        }
    }

    pub fn row(&self, n: u32) -> &[Integer] {
        &self.rows[n as usize]
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }
}

/// Rough byte count of the triangle: entry (n,k) has at most n*log2(k)+1 bits.
pub fn estimated_table_bytes(n_max: u32) -> u64 {
    let mut bits = 0f64;
    let mut log2_fact = 0f64;
    for n in 0..=u64::from(n_max) {
        if n >= 2 {
            log2_fact += (n as f64).log2();
        }
        bits += n as f64 * log2_fact + 256.0 * (n as f64 + 1.0);
    }
    (bits / 8.0) as u64
}

/// Numerator Σ_j C(k,j)(-1)^j (k-j)^n of the sieve formula.
pub fn sieve_numerator(n: u32, k: u32) -> Integer {
    let mut sum = Integer::new();
    let mut binom = Integer::from(1);
    let mut pw = Integer::new();
    for j in 0..=k {
        pw.assign_pow(k - j, n);
        if j % 2 == 0 {
            sum += &binom * &pw;
        } else {
            sum -= &binom * &pw;
        }
        binom *= k - j;
        binom /= j + 1;
    }
    sum
}

trait AssignPow {
    fn assign_pow(&mut self, base: u32, exp: u32);
}

impl AssignPow for Integer {
    fn assign_pow(&mut self, base: u32, exp: u32) {
        use rug::Assign;
        self.assign(Integer::u_pow_u(base, exp));
    }
}

/// `Stirling{n}{k}` via the sieve formula.
pub fn stirling2_sieve(n: u32, k: u32) -> Integer {
    if k == 0 {
        return Integer::from(u32::from(n == 0));
    }
    if k > n {
        return Integer::new();
    }
    sieve_numerator(n, k) / Integer::from(Integer::factorial(k))
}

fn check_nk(n: u32, k: u32) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::domain(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// S(n,k) = k! Stirling{n}{k} / k^n.
pub fn normalized_s(n: u32, k: u32) -> Result<Rational> {
    check_nk(n, k)?;
    Ok(Rational::from((sieve_numerator(n, k), Integer::from(Integer::u_pow_u(k, n)))))
}

/// Terms of the normalized sieve sum and their prefix sums.
#[derive(Debug, Clone)]
pub struct SieveProfile {
    pub n: u32,
    pub k: u32,
    /// b(j) = C(k,j)(k-j)^n / k^n for j = 0..=k.
    pub terms: Vec<Rational>,
    /// partial_sums[j] = Σ_{l<=j} (-1)^l b(l).
    pub partial_sums: Vec<Rational>,
    pub j_star: u32,
    pub total: Rational,
}

pub fn sieve_profile(n: u32, k: u32) -> Result<SieveProfile> {
    check_nk(n, k)?;
    let denom = Integer::from(Integer::u_pow_u(k, n));
    let mut terms = Vec::with_capacity(k as usize + 1);
    let mut partial_sums = Vec::with_capacity(k as usize + 1);
    let mut binom = Integer::from(1);
    let mut acc = Integer::new();
    let mut j_star = 0u32;
    let mut best = Integer::new();
    for j in 0..=k {
        let num = &binom * Integer::from(Integer::u_pow_u(k - j, n));
        if num > best {
            best = num.clone();
            j_star = j;
        }
        if j % 2 == 0 {
            acc += &num;
        } else {
            acc -= &num;
        }
        terms.push(Rational::from((num, denom.clone())));
        partial_sums.push(Rational::from((acc.clone(), denom.clone())));
        binom *= k - j;
        binom /= j + 1;
    }
    let total = partial_sums.last().cloned().expect("k >= 1");
    Ok(SieveProfile { n, k, terms, partial_sums, j_star, total })
}

/// B_0 ..= B_{n_max} as row sums of the triangle.
pub fn bell_numbers(n_max: u32) -> Result<Vec<Integer>> {
    check_stream_budget(n_max)?;
    Ok(Rows::new()
        .take(n_max as usize + 1)
        .map(|r| r.iter().sum::<Integer>())
        .collect())
}

/// Largest n for which row-streamed quantities are accepted.
pub const STREAM_N_MAX: u32 = 20_000;

fn check_stream_budget(n_max: u32) -> Result<()> {
    if n_max > STREAM_N_MAX {
        return Err(Error::ResourceLimit(format!(
            "n = {n_max} exceeds the streaming limit {STREAM_N_MAX}"
        )));
    }
    Ok(())
}

/// Probability that `n` draws of `s` distinct coupons out of `k` cover all `k`.
///
/// M_s = Σ_j C(k,j)(-1)^j (C(k-j,s)/C(k,s))^n, evaluated exactly.
pub fn coupon_covered(n: u32, k: u32, s: u32) -> Result<Rational> {
    if k < 1 || s < 1 || s > k {
        return Err(Error::domain(format!("need 1 <= s <= k, got k = {k}, s = {s}")));
    }
    if n == 0 {
        return Ok(Rational::new());
    }
    let cks = Integer::from(Integer::binomial_u(k, s));
    let mut sum = Integer::new();
    let mut binom = Integer::from(1);
    for j in 0..=k - s {
        let c = Integer::from(Integer::binomial_u(k - j, s));
        let t = &binom * c.pow(n);
        if j % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        binom *= k - j;
        binom /= j + 1;
    }
    Ok(Rational::from((sum, cks.pow(n))))
}

/// Block-count distribution weights `Stirling{n}{k}` with their total `B_n`.
pub fn block_distribution(n: u32) -> Result<(Row, Integer)> {
    if n < 1 {
        return Err(Error::domain("n must be at least 1"));
    }
    check_stream_budget(n)?;
    let row = stirling2_row(n);
    let total = row.iter().sum();
    Ok((row, total))
}

/// Raw or centered m-th moment of the number of blocks of a uniform set partition.
pub fn exact_moment(n: u32, m: u32, centered: bool) -> Result<Rational> {
    let (row, bell) = block_distribution(n)?;
    Ok(row_moment(&row, &bell, m, centered))
}

/// Moment from a precomputed row and its sum.
pub fn row_moment(row: &[Integer], bell: &Integer, m: u32, centered: bool) -> Rational {
    // Integer power sums P_i = Σ k^i Stirling{n}{k}, then one rational binomial expansion.
    let mut sums = vec![Integer::new(); m.max(1) as usize + 1];
    for (k, v) in row.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let mut t = v.clone();
        for s in sums.iter_mut() {
            *s += &t;
            t *= k as u32;
        }
    }
    let raw = |i: usize| Rational::from((sums[i].clone(), bell.clone()));
    if !centered {
        return raw(m as usize);
    }
    let neg_mu = -raw(1);
    let mut acc = Rational::new();
    for i in 0..=m {
        let c = Integer::from(Integer::binomial_u(m, i));
        let pw = neg_mu.clone().pow((m - i) as i32);
        acc += raw(i as usize) * pw * c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rows() {
        let t = StirlingTriangle::new(6).unwrap();
        assert_eq!(t.get(4, 2), 7);
        assert_eq!(t.get(0, 0), 1);
        assert_eq!(t.get(5, 0), 0);
        assert_eq!(t.get(3, 5), 0);
        assert_eq!(t.get(6, 3), 90);
    }

    #[test]
    fn triangle_budget() {
        assert!(matches!(StirlingTriangle::new(5000), Err(Error::ResourceLimit(_))));
        assert!(StirlingTriangle::new(300).is_ok());
    }

    #[test]
    fn sieve_agrees_with_rows() {
        for (n, row) in Rows::new().take(25).enumerate() {
            for k in 0..=n as u32 + 2 {
                let expect = row.get(k as usize).cloned().unwrap_or_default();
                assert_eq!(stirling2_sieve(n as u32, k), expect, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn normalized_diagonal() {
        let s = normalized_s(6, 6).unwrap();
        assert_eq!(s, Rational::from((720, 46656)));
        assert!(normalized_s(3, 4).is_err());
        assert!(normalized_s(3, 0).is_err());
    }

    #[test]
    fn bell_small() {
        let b = bell_numbers(5).unwrap();
        assert_eq!(b, [1, 1, 2, 5, 15, 52].map(Integer::from).to_vec());
    }

    #[test]
    fn coupons() {
        assert_eq!(coupon_covered(20, 11, 1).unwrap(), normalized_s(20, 11).unwrap());
        assert_eq!(coupon_covered(3, 4, 4).unwrap(), 1);
        assert_eq!(coupon_covered(0, 3, 1).unwrap(), 0);
        assert!(coupon_covered(3, 4, 5).is_err());
    }

    #[test]
    fn moments_of_three() {
        assert_eq!(exact_moment(3, 0, false).unwrap(), 1);
        assert_eq!(exact_moment(3, 1, false).unwrap(), 2);
        assert_eq!(exact_moment(3, 2, true).unwrap(), Rational::from((2, 5)));
    }
}
