//! Exact coefficient polynomials: the four formal families, τ_m and J_h.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::{Integer, Rational};

use crate::poly::SeriesPoly;

/// The four formal expansion families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Binomial weights, binomial base λ_b.
    Bb,
    /// Binomial weights, exponential base λ.
    Be,
    /// Poisson weights, exponential base λ(α).
    Ee,
    /// Poisson weights, binomial base λ_b.
    Eb,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Bb, Family::Be, Family::Ee, Family::Eb];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bb => "bb",
            Family::Be => "be",
            Family::Ee => "ee",
            Family::Eb => "eb",
        }
    }

    /// Sum over j against C(k,j)(-x)^j rather than (-λ)^j/j!.
    pub fn binomial_weights(self) -> bool {
        matches!(self, Family::Bb | Family::Be)
    }

    /// Leading parameter built on (1-1/k)^n rather than e^{-n/k}.
    pub fn binomial_base(self) -> bool {
        matches!(self, Family::Bb | Family::Eb)
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// F_r(j) = Σ_{0<=l<j} l^r as coefficient vectors in j, for r = 0..=r_max.
pub fn power_sums(r_max: u32) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for r in 0..=r_max {
        // j^{r+1} = Σ_{i<=r} C(r+1,i) F_i(j)
        let mut v = vec![Rational::new(); r as usize + 2];
        v[r as usize + 1] = Rational::from(1);
        for (i, f) in out.iter().enumerate() {
            let c = Integer::from(Integer::binomial_u(r + 1, i as u32));
            for (d, x) in f.iter().enumerate() {
                v[d] -= Rational::from(x * &c);
            }
        }
        let inv = q(1, i64::from(r) + 1);
        for x in &mut v {
            *x *= &inv;
        }
        out.push(v);
    }
    out
}

fn log_series(family: Family, order: usize) -> SeriesPoly {
    let mut l = SeriesPoly::zero(order);
    let sums = power_sums(order as u32);
    for r in 1..=order {
        let rr = r as i64;
        let c = &mut l.coeffs[r];
        let inv_r1 = q(-1, rr + 1);
        match family {
            Family::Bb | Family::Eb => {
                // -w Σ (j^{r+1} - j) t^r/(r+1)
                c.add_term((r as u32 + 1, 1, 0), inv_r1.clone());
                c.add_term((1, 1, 0), -inv_r1.clone());
            }
            Family::Be | Family::Ee => {
                c.add_term((r as u32 + 1, 1, 0), inv_r1.clone());
            }
        }
        if matches!(family, Family::Ee | Family::Eb) {
            // Σ_{1<=l<j} log(1 - l t) = -Σ_r t^r/r F_r(j)
            for (d, x) in sums[r].iter().enumerate() {
                c.add_term((d as u32, 0, 0), x * q(-1, rr));
            }
        }
        if family.binomial_base() {
            // (1-t)^{-j a}
            c.add_term((1, 0, 1), q(1, rr));
        } else if r == 1 {
            // e^{j a t}
            c.add_term((1, 0, 1), q(1, 1));
        }
    }
    l
}

type Cache = Mutex<HashMap<(Family, usize), Arc<SeriesPoly>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients c_0..c_{m_max} of a family, as polynomials in (j, w, a).
///
/// `w` stands for n/k. `a` is the shift: α in λ(α) = k e^{-n/k-α/k} for the
/// exponential bases, d in λ_b(d) = k(1-1/k)^{n+d} for the binomial bases.
pub fn family_coeffs(family: Family, m_max: usize) -> Arc<SeriesPoly> {
    if let Some(s) = cache().lock().expect("coefficient cache").get(&(family, m_max)) {
        return s.clone();
    }
    let s = Arc::new(log_series(family, m_max).exp());
    cache().lock().expect("coefficient cache").insert((family, m_max), s.clone());
    s
}

/// τ_m(n) as integer coefficients of 1, n, n^2, ...
pub fn tau_poly(m: u32) -> Vec<Integer> {
    let mut prev2 = vec![Integer::from(1)];
    if m == 0 {
        return prev2;
    }
    let mut prev1 = vec![Integer::new()];
    for i in 2..=m {
        let mut next = vec![Integer::new(); i as usize / 2 + 1];
        for (d, c) in prev1.iter().enumerate() {
            next[d] += c;
        }
        for (d, c) in prev2.iter().enumerate() {
            next[d + 1] -= c;
        }
        for c in &mut next {
            *c *= i - 1;
        }
        prev2 = prev1;
        prev1 = next;
    }
    trim(prev1)
}

fn trim(mut v: Vec<Integer>) -> Vec<Integer> {
    while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// τ_0(n), ..., τ_{m_max}(n) at a fixed integer n.
pub fn tau_values(n: u32, m_max: usize) -> Vec<Integer> {
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(Integer::from(1));
    if m_max >= 1 {
        out.push(Integer::new());
    }
    for m in 2..=m_max {
        let t = (&out[m - 1] - Integer::from(&out[m - 2] * n)) * (m as u32 - 1);
        out.push(t);
    }
    out
}

/// J_h(z) = 2 Σ_{l<=h} (h+2)^{l-1}(h+1-l)/(l+1)! z^l.
pub fn j_poly(h: u32) -> Vec<Rational> {
    (0..=h)
        .map(|l| {
            let pw = Rational::from(h + 2).pow_i(l as i32 - 1);
            let fact = Integer::from(Integer::factorial(l + 1));
            pw * Rational::from((Integer::from(2 * (h + 1 - l)), fact))
        })
        .collect()
}

trait PowI {
    fn pow_i(self, e: i32) -> Rational;
}

impl PowI for Rational {
    fn pow_i(self, e: i32) -> Rational {
        use rug::ops::Pow;
        self.pow(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::BivarPoly;

    fn poly(terms: &[((u32, u32, u32), (i64, i64))]) -> BivarPoly {
        let mut p = BivarPoly::zero();
        for (e, (n, d)) in terms {
            p.add_term(*e, q(*n, *d));
        }
        p
    }

    #[test]
    fn first_coefficients() {
        let bb = family_coeffs(Family::Bb, 2);
        assert_eq!(bb.coeffs[0], BivarPoly::one());
        assert_eq!(bb.coeffs[1].without_shift(), poly(&[((2, 1, 0), (-1, 2)), ((1, 1, 0), (1, 2))]));
        let be = family_coeffs(Family::Be, 2);
        assert_eq!(be.coeffs[1].without_shift(), poly(&[((2, 1, 0), (-1, 2))]));
        // c_2 for be: j^3 w (3 j w - 8)/24
        assert_eq!(be.coeffs[2].without_shift(), poly(&[((4, 2, 0), (1, 8)), ((3, 1, 0), (-1, 3))]));
        let ee = family_coeffs(Family::Ee, 1);
        // -(j/2)((w+1) j - 2a - 1)
        assert_eq!(
            ee.coeffs[1],
            poly(&[((2, 1, 0), (-1, 2)), ((2, 0, 0), (-1, 2)), ((1, 0, 1), (1, 1)), ((1, 0, 0), (1, 2))])
        );
    }

    #[test]
    fn power_sum_values() {
        let s = power_sums(3);
        // Σ_{l<5} l^3 = 100
        let v: Rational = s[3].iter().enumerate().map(|(d, c)| c.clone() * Rational::from(5u32.pow(d as u32))).sum();
        assert_eq!(v, 100);
    }

    #[test]
    fn tau_small() {
        assert_eq!(tau_poly(0), vec![Integer::from(1)]);
        assert_eq!(tau_poly(1), vec![Integer::new()]);
        assert_eq!(tau_poly(2), vec![Integer::new(), Integer::from(-1)]);
        assert_eq!(tau_poly(4), vec![Integer::new(), Integer::from(-6), Integer::from(3)]);
        let vals = tau_values(7, 6);
        for (m, v) in vals.iter().enumerate() {
            let p = tau_poly(m as u32);
            let e: Integer = p.iter().enumerate().map(|(d, c)| c * Integer::from(7u32.pow(d as u32))).sum();
            assert_eq!(&e, v);
        }
    }

    #[test]
    fn j_small() {
        assert_eq!(j_poly(0), vec![q(1, 1)]);
        assert_eq!(j_poly(1), vec![q(4, 3), q(1, 1)]);
        assert_eq!(j_poly(2), vec![q(3, 2), q(2, 1), q(4, 3)]);
    }
}
