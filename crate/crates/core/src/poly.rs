//! Polynomials in (j, w, a) with rational coefficients and truncated series over them.

use std::collections::BTreeMap;
use std::fmt;

use rug::{Float, Rational};

/// Exponent triple (j, w, a).
pub type Exps = (u32, u32, u32);

/// Finitely supported polynomial in the index `j`, the ratio `w = n/k`
/// and a shift parameter `a`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BivarPoly {
    terms: BTreeMap<Exps, Rational>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        BivarPoly::default()
    }

    pub fn one() -> Self {
        BivarPoly::constant(Rational::from(1))
    }

    pub fn constant(c: Rational) -> Self {
        BivarPoly::monomial(c, (0, 0, 0))
    }

    pub fn monomial(c: Rational, e: Exps) -> Self {
        let mut p = BivarPoly::zero();
        p.add_term(e, c);
        p
    }

    pub fn add_term(&mut self, e: Exps, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: Exps) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn degree_j(&self) -> u32 {
        self.terms.keys().map(|e| e.0).max().unwrap_or(0)
    }

    pub fn degree_w(&self) -> u32 {
        self.terms.keys().map(|e| e.1).max().unwrap_or(0)
    }

    pub fn degree_a(&self) -> u32 {
        self.terms.keys().map(|e| e.2).max().unwrap_or(0)
    }

    pub fn add(&self, other: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, Rational::from(v * c));
        }
        out
    }

    pub fn mul(&self, other: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term((ea.0 + eb.0, ea.1 + eb.1, ea.2 + eb.2), Rational::from(ca * cb));
            }
        }
        out
    }

    /// Substitute `a = 0`.
    pub fn without_shift(&self) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (e, c) in &self.terms {
            if e.2 == 0 {
                out.add_term(*e, c.clone());
            }
        }
        out
    }

    /// Exact value at rational (j, w, a).
    pub fn eval_exact(&self, j: &Rational, w: &Rational, a: &Rational) -> Rational {
        let mut acc = Rational::new();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            t *= pow_q(j, e.0);
            t *= pow_q(w, e.1);
            t *= pow_q(a, e.2);
            acc += t;
        }
        acc
    }

    /// Coefficients of j^0, j^1, ... after substituting real w and a.
    pub fn coeffs_in_j(&self, w: &Float, a: &Float) -> Vec<Float> {
        let prec = w.prec();
        let mut out = vec![Float::new(prec); self.degree_j() as usize + 1];
        for (e, c) in &self.terms {
            let mut t = Float::with_val(prec, c);
            t *= pow_f(w, e.1);
            t *= pow_f(a, e.2);
            out[e.0 as usize] += t;
        }
        out
    }
}

fn pow_q(x: &Rational, e: u32) -> Rational {
    use rug::ops::Pow;
    Rational::from(x.pow(e as i32))
}

fn pow_f(x: &Float, e: u32) -> Float {
    use rug::ops::Pow;
    Float::with_val(x.prec(), x.pow(e))
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((j, w, a), c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (name, e) in [("j", j), ("w", w), ("a", a)] {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// Power series in t truncated after `t^order`, with [`BivarPoly`] coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesPoly {
    pub order: usize,
    pub coeffs: Vec<BivarPoly>,
}

impl SeriesPoly {
    pub fn zero(order: usize) -> Self {
        SeriesPoly { order, coeffs: vec![BivarPoly::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = SeriesPoly::zero(order);
        s.coeffs[0] = BivarPoly::one();
        s
    }

    pub fn add(&self, other: &SeriesPoly) -> SeriesPoly {
        let order = self.order.min(other.order);
        SeriesPoly {
            order,
            coeffs: (0..=order).map(|m| self.coeffs[m].add(&other.coeffs[m])).collect(),
        }
    }

    pub fn mul(&self, other: &SeriesPoly) -> SeriesPoly {
        let order = self.order.min(other.order);
        let mut out = SeriesPoly::zero(order);
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for l in 0..=order - i {
                if other.coeffs[l].is_zero() {
                    continue;
                }
                out.coeffs[i + l] = out.coeffs[i + l].add(&self.coeffs[i].mul(&other.coeffs[l]));
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> SeriesPoly {
        SeriesPoly { order: self.order, coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect() }
    }

    /// exp of a series whose constant term vanishes.
    pub fn exp(&self) -> SeriesPoly {
        assert!(self.coeffs[0].is_zero(), "exp needs a zero constant term");
        let mut out = SeriesPoly::one(self.order);
        let mut pw = SeriesPoly::one(self.order);
        for i in 1..=self.order {
            pw = pw.mul(self).scale(&Rational::from((1, i as u32)));
            out = out.add(&pw);
        }
        out
    }
}
