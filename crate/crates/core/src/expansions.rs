//! Asymptotic approximations of S(n,k) and the exact rearrangements behind them.

use std::fmt;
use std::str::FromStr;

use rug::{Float, Integer, Rational};

use crate::coeffs::{family_coeffs, j_poly, tau_values, Family};
use crate::error::{Error, Result};
use crate::exact::stirling2_row;
use crate::params::{central_params, lambda_alpha, solve_lambda_star, solve_saddle, CentralParams, LambdaFamily};
use crate::precision::{log10_abs, SolverConfig};

/// Which approximation a result came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Finite-difference expansion, `order` = s.
    Fd,
    /// Poisson-Charlier expansion, `order` = s1.
    Pc,
    /// One of the formal families; `alpha` only for plain Exp-Exp.
    Family { family: Family, reduced: bool, alpha: Option<Rational> },
    /// Menon's two-term formula.
    Menon,
    /// e^{-λ̂} with the fixed-point parameter.
    MenonReduced,
    SaddleSmallK,
    /// `order` = m.
    SaddleMLogN,
    /// `order` = m.
    SaddleRho,
}

impl Method {
    pub fn family(family: Family) -> Method {
        Method::Family { family, reduced: false, alpha: None }
    }

    pub fn reduced(family: Family) -> Method {
        Method::Family { family, reduced: true, alpha: None }
    }

    pub fn ee_alpha(alpha: Rational) -> Method {
        Method::Family { family: Family::Ee, reduced: false, alpha: Some(alpha) }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Fd => write!(f, "fd"),
            Method::Pc => write!(f, "pc"),
            Method::Family { family, reduced, alpha } => {
                write!(f, "{}", family.name())?;
                if *reduced {
                    write!(f, "*")?;
                }
                match alpha {
                    Some(a) if !a.is_zero() => write!(f, ":{a}"),
                    _ => Ok(()),
                }
            }
            Method::Menon => write!(f, "menon"),
            Method::MenonReduced => write!(f, "menon*"),
            Method::SaddleSmallK => write!(f, "saddle-small"),
            Method::SaddleMLogN => write!(f, "saddle-mlogn"),
            Method::SaddleRho => write!(f, "saddle-rho"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        let s = s.trim().to_ascii_lowercase();
        let (head, alpha) = match s.split_once(':') {
            Some((h, a)) => (h.to_string(), Some(parse_rational(a)?)),
            None => (s.clone(), None),
        };
        let (base, reduced) = match head.strip_suffix('*') {
            Some(b) => (b, true),
            None => (head.as_str(), false),
        };
        let fam = match base {
            "bb" => Some(Family::Bb),
            "be" => Some(Family::Be),
            "ee" => Some(Family::Ee),
            "eb" => Some(Family::Eb),
            _ => None,
        };
        if alpha.is_some() && (fam != Some(Family::Ee) || reduced) {
            return Err(Error::Validation(format!("α only applies to plain ee: {s}")));
        }
        if let Some(family) = fam {
            let alpha = alpha.filter(|a| !a.is_zero());
            return Ok(Method::Family { family, reduced, alpha });
        }
        let m = match (base, reduced) {
            ("fd", false) => Method::Fd,
            ("pc", false) => Method::Pc,
            ("menon", false) => Method::Menon,
            ("menon", true) | ("hat", false) => Method::MenonReduced,
            ("saddle-small", false) => Method::SaddleSmallK,
            ("saddle-mlogn", false) => Method::SaddleMLogN,
            ("saddle-rho", false) => Method::SaddleRho,
            _ => return Err(Error::Validation(format!("unknown approximation '{s}'"))),
        };
        Ok(m)
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Ok(q) = Rational::from_str(s) {
        return Ok(q);
    }
    let v: f64 = s.parse().map_err(|_| Error::Validation(format!("bad number '{s}'")))?;
    Rational::from_f64(v).ok_or_else(|| Error::Validation(format!("bad number '{s}'")))
}

/// An approximate value of S(n,k).
#[derive(Debug, Clone)]
pub struct ApproxResult {
    pub method: Method,
    pub order: u32,
    pub value: Float,
    /// Size of the first omitted correction, relative to the value.
    pub leading_error_estimate: Float,
    pub in_validity_range: bool,
}

fn ln(x: f64) -> f64 {
    x.ln()
}

/// n/log n <= k <= 2n/(log n + 6).
pub fn fd_range(n: u32, k: u32) -> bool {
    let (n, k) = (f64::from(n), f64::from(k));
    n > 1.0 && k >= n / ln(n) && k <= 2.0 * n / (ln(n) + 6.0)
}

/// n/W(n) <= k <= 2n/(log n + 6).
pub fn pc_range(n: u32, k: u32, omega: &Float) -> bool {
    let (nf, kf) = (f64::from(n), f64::from(k));
    n > 1 && kf >= nf / omega.to_f64() && kf <= 2.0 * nf / (ln(nf) + 6.0)
}

/// k <= 2n/(log n + 6).
pub fn formal_range(n: u32, k: u32) -> bool {
    let (n, k) = (f64::from(n), f64::from(k));
    n > 1.0 && k <= 2.0 * n / (ln(n) + 6.0)
}

fn hat_range(n: u32, k: u32) -> bool {
    let (n, k) = (f64::from(n), f64::from(k));
    n > 3.0 && k < 4.0 * n / (ln(n) + 2.0 * ln(ln(n)))
}

/// (1 - x)^k for 0 <= x < 1, via log1p.
fn pow_one_minus(x: &Float, k: u32) -> Float {
    let l = Float::with_val(x.prec(), -x).ln_1p();
    (l * k).exp()
}

/// Evaluate `f` at rising precision until the measured cancellation leaves
/// `target` reliable digits. `f` returns the result and its largest term.
fn adaptive<F>(target: u32, start: u32, mut f: F) -> Result<Float>
where
    F: FnMut(u32) -> Result<(Float, Float)>,
{
    let mut digits = start.max(target);
    for _ in 0..8 {
        let (sum, big) = f(digits)?;
        if sum.is_zero() {
            if big.is_zero() {
                return Ok(sum);
            }
            digits *= 2;
            continue;
        }
        let lost = (log10_abs(&big) - log10_abs(&sum)).max(0.0);
        if f64::from(digits) - lost >= f64::from(target) + 3.0 {
            return Ok(sum);
        }
        digits = target + lost.ceil() as u32 + 10;
    }
    Err(Error::NonConvergence { what: "precision escalation".into(), iterations: 8 })
}

fn d_fd_at(n: u32, k: u32, j: u32, digits: u32) -> (Float, Float) {
    let bits = crate::precision::digits_to_bits(digits);
    let kf = Float::with_val(bits, k);
    let mut sum = Float::new(bits);
    let mut big = Float::new(bits);
    let mut binom = Integer::from(1);
    for l in 0..=j {
        // term for index l carries sign (-1)^{j-l}
        if l < k {
            let y = Float::with_val(bits, l) / &kf;
            let e = Float::with_val(bits, &y + Float::with_val(bits, -&y).ln_1p()) * n;
            let g = e.exp() * &binom;
            if g > big {
                big = g.clone();
            }
            if (j - l).is_multiple_of(2) {
                sum += g;
            } else {
                sum -= g;
            }
        }
        binom *= j - l;
        binom /= l + 1;
    }
    (sum, big)
}

/// D_{n,k}(j) = Σ_l C(j,l)(-1)^{j-l}(e^{l/k}(1-l/k))^n.
pub fn d_fd(n: u32, k: u32, j: u32, cfg: &SolverConfig) -> Result<Float> {
    if j > k || k == 0 {
        return Err(Error::domain(format!("need 0 <= j <= k, got j = {j}, k = {k}")));
    }
    if j == 0 {
        return Ok(cfg.float(1));
    }
    let target = cfg.digits();
    let v = adaptive(target, target + 5 * j, |d| Ok(d_fd_at(n, k, j, d)))?;
    Ok(Float::with_val(cfg.bits(), &v))
}

/// (1-λ/k)^k (1 + Σ_{1<=j<s} C(k,j)(-Λ)^j D(j)).
pub fn fd_expansion(n: u32, k: u32, s: u32, cfg: &SolverConfig) -> Result<ApproxResult> {
    if s < 1 {
        return Err(Error::domain("fd order must be at least 1"));
    }
    let p = central_params(n, k, cfg)?;
    let lead = pow_one_minus(&Float::with_val(p.prec(), &p.lambda / k), k);
    let term = |j: u32| -> Result<Float> {
        let b = Float::with_val(p.prec(), &Integer::from(Integer::binomial_u(k, j)));
        let neg = Float::with_val(p.prec(), -&p.big_lambda);
        let pw = neg.pow_u(j);
        Ok(b * pw * d_fd(n, k, j, cfg)?)
    };
    let mut corr = p.float(1);
    for j in 1..s.min(k + 1) {
        corr += term(j)?;
    }
    let next = if s <= k { term(s)?.abs() } else { p.float(0) };
    Ok(ApproxResult {
        method: Method::Fd,
        order: s,
        value: lead * &corr,
        leading_error_estimate: next / corr.abs(),
        in_validity_range: fd_range(n, k),
    })
}

/// Full finite-difference rearrangement Σ_{j<=k} of the sieve sum; equals S(n,k).
pub fn fd_identity_sum(n: u32, k: u32, cfg: &SolverConfig) -> Result<Float> {
    let target = cfg.digits();
    let v = adaptive(target, target + 10, |d| {
        let c = cfg.at_digits(d);
        let p = central_params(n, k, &c)?;
        let mut sum = Float::new(c.bits());
        let mut big = Float::new(c.bits());
        let neg = Float::with_val(c.bits(), -&p.big_lambda);
        let mut pw = c.float(1);
        let mut binom = Integer::from(1);
        for j in 0..=k {
            let t = Float::with_val(c.bits(), &pw * &binom) * d_fd(n, k, j, &c)?;
            if Float::with_val(c.bits(), t.abs_ref()) > big {
                big = t.clone().abs();
            }
            sum += t;
            pw *= &neg;
            binom *= k - j;
            binom /= j + 1;
        }
        let lead = pow_one_minus(&Float::with_val(c.bits(), &p.lambda / k), k);
        Ok((sum * &lead, big * lead))
    })?;
    Ok(Float::with_val(cfg.bits(), &v))
}

trait PowU {
    fn pow_u(self, e: u32) -> Float;
}

impl PowU for Float {
    fn pow_u(self, e: u32) -> Float {
        use rug::ops::Pow;
        self.pow(e)
    }
}

/// Σ_{l<=min(m,k)} Stirling{m}{l} k^{(l)} y^l with the falling factorial k^{(l)}.
fn touchard_binomial(m: u32, k: u32, y: &Float) -> Float {
    let row = stirling2_row(m);
    let prec = y.prec();
    let mut acc = Float::new(prec);
    let mut ff = Float::with_val(prec, 1);
    for l in 0..=m.min(k) {
        if l > 0 {
            ff *= Float::with_val(prec, y * (k - l + 1));
        }
        acc += Float::with_val(prec, &row[l as usize] * &ff);
    }
    acc
}

/// Σ_{l<=m} Stirling{m}{l} y^l.
fn touchard(m: u32, y: &Float) -> Float {
    let row = stirling2_row(m);
    let prec = y.prec();
    let mut acc = Float::new(prec);
    let mut pw = Float::with_val(prec, 1);
    for c in row.iter() {
        acc += Float::with_val(prec, c * &pw);
        pw *= y;
    }
    acc
}

/// Q̄_{n,k}(m) = Σ_{l<=min(m,k)} Stirling{m}{l} C(k,l) l! (-Λ)^l.
pub fn qbar(p: &CentralParams, m: u32) -> Float {
    touchard_binomial(m, p.k, &Float::with_val(p.prec(), -&p.big_lambda))
}

/// (1-λ/k)^k (1 + Σ_{2<=m<2 s1} τ_m(n)/(m! k^m) Q̄(m)).
pub fn pc_expansion(n: u32, k: u32, s1: u32, cfg: &SolverConfig) -> Result<ApproxResult> {
    if s1 < 1 {
        return Err(Error::domain("pc order must be at least 1"));
    }
    let p = central_params(n, k, cfg)?;
    let prec = p.prec();
    let top = 2 * s1 + 1;
    let taus = tau_values(n, top as usize);
    let kf = p.float(k);
    let term = |m: u32| -> Float {
        let mut c = Float::with_val(prec, &taus[m as usize]);
        c /= Float::with_val(prec, &Integer::from(Integer::factorial(m)));
        c /= Float::with_val(prec, kf.clone().pow_u(m));
        c * qbar(&p, m)
    };
    let mut corr = p.float(1);
    for m in 2..2 * s1 {
        corr += term(m);
    }
    let next = term(2 * s1).abs() + term(2 * s1 + 1).abs();
    let lead = pow_one_minus(&Float::with_val(prec, &p.lambda / k), k);
    Ok(ApproxResult {
        method: Method::Pc,
        order: s1,
        value: lead * &corr,
        leading_error_estimate: next / corr.abs(),
        in_validity_range: pc_range(n, k, &p.omega),
    })
}

/// Partial sums P_0..P_{m_max} of the Poisson-Charlier rearrangement, leading factor included.
pub fn pc_partial_sums(n: u32, k: u32, m_max: u32, cfg: &SolverConfig) -> Result<Vec<Float>> {
    let p = central_params(n, k, cfg)?;
    let (sums, _) = pc_sums_at(&p, m_max, None);
    Ok(sums)
}

/// Returns partial sums and the largest term magnitude seen. With `stop`,
/// summation ends once three successive decreasing terms drop below it (relative).
fn pc_sums_at(p: &CentralParams, m_max: u32, stop: Option<&Float>) -> (Vec<Float>, Float) {
    let prec = p.prec();
    let k = p.k;
    let kf = p.float(k);
    let x = Float::with_val(prec, &p.lambda / &kf);
    let lead = pow_one_minus(&x, k);
    // u_j = C(k,j)(-x)^j (1-x)^{-k}, then v_j = u_j (j/k)^m.
    let mut v = Vec::with_capacity(k as usize + 1);
    let mut u = Float::with_val(prec, lead.recip_ref());
    let negx = Float::with_val(prec, -&x);
    for j in 0..=k {
        v.push(u.clone());
        u *= &negx;
        u *= k - j;
        u /= j + 1;
    }
    let ratios: Vec<Float> = (0..=k).map(|j| Float::with_val(prec, j) / &kf).collect();
    let taus = tau_values(p.n, 1);
    let mut tau_prev2 = taus[0].clone();
    let mut tau_prev1 = Integer::new();
    let mut inv_fact = Float::with_val(prec, 1);
    let mut acc = Float::new(prec);
    let mut big = Float::new(prec);
    let mut out = Vec::new();
    let mut small_run = 0;
    let mut last_mag: Option<Float> = None;
    for m in 0..=m_max {
        let tau = match m {
            0 => Integer::from(1),
            1 => Integer::new(),
            _ => {
                let t = (&tau_prev1 - Integer::from(&tau_prev2 * p.n)) * (m - 1);
                tau_prev2 = std::mem::replace(&mut tau_prev1, t.clone());
                t
            }
        };
        if m > 0 {
            inv_fact /= m;
            for (vj, r) in v.iter_mut().zip(&ratios) {
                *vj *= r;
            }
        }
        let coef = Float::with_val(prec, &tau) * &inv_fact;
        let mut q = Float::new(prec);
        let mut qabs = Float::new(prec);
        for vj in &v {
            q += vj;
            qabs += Float::with_val(prec, vj.abs_ref());
        }
        let t = Float::with_val(prec, &coef * &q);
        let mag = Float::with_val(prec, coef.abs_ref()) * &qabs;
        if mag > big {
            big = mag.clone();
        }
        acc += &t;
        out.push(Float::with_val(prec, &acc * &lead));
        if let Some(eps) = stop {
            let decreasing = last_mag.as_ref().is_some_and(|l| mag <= *l);
            let tiny = mag <= Float::with_val(prec, acc.abs_ref()) * eps;
            if m >= 4 && decreasing && tiny {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        if !tau.is_zero() || m == 0 {
            last_mag = Some(mag);
        }
    }
    (out, big * lead)
}

/// Limit of the Poisson-Charlier partial sums, i.e. S(n,k).
pub fn pc_identity_sum(n: u32, k: u32, cfg: &SolverConfig) -> Result<Float> {
    let target = cfg.digits();
    let cap = 40 * n + 400;
    let v = adaptive(target, target + 10, |d| {
        let c = cfg.at_digits(d);
        let p = central_params(n, k, &c)?;
        let eps = Float::with_val(c.bits(), 10u32).pow_u(d + 5).recip();
        let (sums, big) = pc_sums_at(&p, cap, Some(&eps));
        if sums.len() as u32 > cap {
            return Err(Error::NonConvergence { what: "Poisson-Charlier sum".into(), iterations: cap as usize });
        }
        Ok((sums.last().cloned().expect("at least one term"), big))
    })?;
    Ok(Float::with_val(cfg.bits(), &v))
}

/// Weight system of an alternating moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// Σ_j C(k,j)(-x)^j f(j).
    Binomial { k: u32 },
    /// Σ_j (-λ)^j/j! f(j).
    Poisson,
}

/// Normalized moments Σ_j w_j j^i / Σ_j w_j for i = 0..=i_max, in closed form.
fn normalized_moments(kind: MomentKind, x: &Float, i_max: u32) -> Vec<Float> {
    let prec = x.prec();
    match kind {
        MomentKind::Binomial { k } => {
            let y = -Float::with_val(prec, x / Float::with_val(prec, 1 - Float::with_val(prec, x)));
            (0..=i_max).map(|i| touchard_binomial(i, k, &y)).collect()
        }
        MomentKind::Poisson => {
            let y = Float::with_val(prec, -x);
            (0..=i_max).map(|i| touchard(i, &y)).collect()
        }
    }
}

fn moment_weight_total(kind: MomentKind, x: &Float) -> Float {
    match kind {
        MomentKind::Binomial { k } => pow_one_minus(x, k),
        MomentKind::Poisson => Float::with_val(x.prec(), -x).exp(),
    }
}

/// Σ_j w_j f(j) for f(j) = Σ_i coeffs[i] j^i, with binomial weights C(k,j)(-x)^j
/// or Poisson weights (-x)^j/j!.
pub fn alternating_moment(kind: MomentKind, x: &Float, coeffs: &[Float]) -> Float {
    let prec = x.prec();
    if coeffs.is_empty() {
        return Float::new(prec);
    }
    let mu = normalized_moments(kind, x, coeffs.len() as u32 - 1);
    let mut acc = Float::new(prec);
    for (c, m) in coeffs.iter().zip(&mu) {
        acc += Float::with_val(prec, c * m);
    }
    acc * moment_weight_total(kind, x)
}

/// Leading factor, relative correction terms t_1.. and the parameter used.
struct FamilyTerms {
    lead: Float,
    terms: Vec<Float>,
}

fn family_terms(
    p: &CentralParams,
    family: Family,
    param: &Float,
    shift: &Float,
    m_top: usize,
) -> FamilyTerms {
    let prec = p.prec();
    let series = family_coeffs(family, m_top);
    let (kind, x) = if family.binomial_weights() {
        (MomentKind::Binomial { k: p.k }, Float::with_val(prec, param / p.k))
    } else {
        (MomentKind::Poisson, param.clone())
    };
    let mu = normalized_moments(kind, &x, 2 * m_top as u32);
    let kf = p.float(p.k);
    let mut terms = Vec::with_capacity(m_top);
    let mut kpow = p.float(1);
    for m in 1..=m_top {
        kpow /= &kf;
        let cj = series.coeffs[m].coeffs_in_j(&p.rho, shift);
        let mut s = Float::new(prec);
        for (c, u) in cj.iter().zip(&mu) {
            s += Float::with_val(prec, c * u);
        }
        terms.push(s * &kpow);
    }
    FamilyTerms { lead: moment_weight_total(kind, &x), terms }
}

fn family_param(
    p: &CentralParams,
    family: Family,
    reduced: bool,
    alpha: Option<&Rational>,
    cfg: &SolverConfig,
) -> Result<(Float, Float)> {
    let prec = p.prec();
    if reduced {
        let lf = match family {
            Family::Bb => LambdaFamily::Bb,
            Family::Be => LambdaFamily::Be,
            Family::Ee => LambdaFamily::Ee,
            Family::Eb => LambdaFamily::Eb,
        };
        let s = solve_lambda_star(p, lf, cfg)?;
        return Ok((s.value, s.shift));
    }
    Ok(match family {
        Family::Bb | Family::Eb => (p.lambda_b.clone(), Float::new(prec)),
        Family::Be => (p.lambda.clone(), Float::new(prec)),
        Family::Ee => {
            let a = Float::with_val(prec, alpha.cloned().unwrap_or_default());
            (lambda_alpha(p, &a), a)
        }
    })
}

/// Formal family expansion truncated after k^{-order}.
///
/// With `error_reduced`, the family's λ-parameter is replaced by its shifted
/// solution and the same coefficient polynomials are evaluated at the shift.
pub fn family_expansion(
    n: u32,
    k: u32,
    family: Family,
    order: u32,
    error_reduced: bool,
    alpha: Option<&Rational>,
    cfg: &SolverConfig,
) -> Result<ApproxResult> {
    if alpha.is_some() && (family != Family::Ee || error_reduced) {
        return Err(Error::Validation("α applies only to plain ee".into()));
    }
    let p = central_params(n, k, cfg)?;
    let (param, shift) = family_param(&p, family, error_reduced, alpha, cfg)?;
    let ft = family_terms(&p, family, &param, &shift, order as usize + 2);
    let mut corr = p.float(1);
    for t in &ft.terms[..order as usize] {
        corr += t;
    }
    let next = Float::with_val(p.prec(), ft.terms[order as usize].abs_ref())
        + Float::with_val(p.prec(), ft.terms[order as usize + 1].abs_ref());
    Ok(ApproxResult {
        method: Method::Family { family, reduced: error_reduced, alpha: alpha.filter(|a| !a.is_zero()).cloned() },
        order,
        value: ft.lead * &corr,
        leading_error_estimate: next / corr.abs(),
        in_validity_range: formal_range(n, k),
    })
}

/// e^{-λ'}(1 - λ'(λ'-1)/k^2 ((n+k)/2 - 1/4)) with Menon's λ'; `order` 0 keeps e^{-λ'} only.
pub fn menon_expansion(n: u32, k: u32, order: u32, cfg: &SolverConfig) -> Result<ApproxResult> {
    let p = central_params(n, k, cfg)?;
    let prec = p.prec();
    let l = &p.lambda_e_prime;
    let k2 = Float::with_val(prec, p.float(k).square_ref());
    let bracket = Float::with_val(prec, n + k) / 2u32 - 0.25f64;
    let c = Float::with_val(prec, l * Float::with_val(prec, l - 1u32)) * bracket / &k2;
    let lead = Float::with_val(prec, -l).exp();
    let (value, est) = if order == 0 {
        (lead, c.abs())
    } else {
        let corr = 1u32 - c;
        // Menon's parameter sits at α = -1/2 up to O(k^-2); the next term is estimated there.
        let half = p.float(-0.5);
        let ft = family_terms(&p, Family::Ee, &lambda_alpha(&p, &half), &half, 2);
        let est = Float::with_val(prec, ft.terms[1].abs_ref()) / Float::with_val(prec, corr.abs_ref());
        (lead * corr, est)
    };
    Ok(ApproxResult {
        method: Method::Menon,
        order: order.min(1),
        value,
        leading_error_estimate: est,
        in_validity_range: formal_range(n, k),
    })
}

/// e^{-λ̂} with λ̂ the fixed point extending Menon's parameter.
pub fn menon_reduced(n: u32, k: u32, cfg: &SolverConfig) -> Result<ApproxResult> {
    let p = central_params(n, k, cfg)?;
    let s = solve_lambda_star(&p, LambdaFamily::Hat, cfg)?;
    let prec = p.prec();
    let l = &s.value;
    let k3 = p.float(k).pow_u(3);
    let rho3 = p.rho.clone().pow_u(3);
    let est = (Float::with_val(prec, l.clone().pow_u(4)) + l) * rho3 / k3;
    Ok(ApproxResult {
        method: Method::MenonReduced,
        order: 0,
        value: Float::with_val(prec, -l).exp(),
        leading_error_estimate: est,
        in_validity_range: hat_range(n, k),
    })
}

/// Saddle-point corollary forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleForm {
    SmallK,
    MLogN,
    RhoForm,
}

pub fn saddle_corollary(n: u32, k: u32, m: u32, form: SaddleForm, cfg: &SolverConfig) -> Result<ApproxResult> {
    if k < 1 || k > n {
        return Err(Error::domain(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    if form != SaddleForm::SmallK && m < 2 {
        return Err(Error::domain("saddle form needs m >= 2"));
    }
    let prec = cfg.bits();
    let nf = f64::from(n);
    let kf = f64::from(k);
    let one = Float::with_val(prec, 1);
    let inv_n = Float::with_val(prec, n).recip();
    let (value, est, valid, method) = match form {
        SaddleForm::SmallK | SaddleForm::MLogN => {
            let s = solve_saddle(n, k, cfg)?;
            let e = Float::with_val(prec, -&s.r).exp();
            let log_base = Float::with_val(prec, -&e).ln_1p();
            let re = Float::with_val(prec, &s.r * &e);
            if form == SaddleForm::SmallK {
                let expo = Float::with_val(prec, &log_base * (i64::from(k) - i64::from(n)))
                    - Float::with_val(prec, &e * n);
                let valid = kf <= nf / (ln(nf) + 1.0);
                (expo.exp(), re + &inv_n, valid, Method::SaddleSmallK)
            } else {
                let mut sum = Float::new(prec);
                for l in 2..m {
                    sum += Float::with_val(prec, &e).pow_u(l) / l;
                }
                let expo = Float::with_val(prec, &log_base * k) + sum * n;
                let tail = Float::with_val(prec, &e).pow_u(m) * n;
                let valid = kf <= f64::from(m) * nf / (ln(nf) + 1.0);
                (expo.exp(), re + tail + &inv_n, valid, Method::SaddleMLogN)
            }
        }
        SaddleForm::RhoForm => {
            let rs = Float::with_val(prec, n + 1) / k;
            let e = Float::with_val(prec, -&rs).exp();
            let log_base = Float::with_val(prec, -&e).ln_1p();
            let mut sum = Float::new(prec);
            let mut eh = one.clone();
            for h in 0..=m.saturating_sub(3) {
                if m < 3 {
                    break;
                }
                let jp = j_poly(h);
                let mut val = Float::new(prec);
                for c in jp.iter().rev() {
                    val *= &rs;
                    val += Float::with_val(prec, c);
                }
                sum += val * &eh;
                eh *= &e;
            }
            let e2 = Float::with_val(prec, e.square_ref());
            let expo = Float::with_val(prec, &log_base * k)
                - Float::with_val(prec, &e2 * (n + 1)) / 2u32 * sum;
            let est = Float::with_val(prec, &rs * &e)
                + Float::with_val(prec, rs.clone().pow_u(m - 1)) * Float::with_val(prec, &e).pow_u(m) * k
                + &inv_n;
            let lln = if nf > 1.0 { ln(ln(nf)).max(0.0) } else { 0.0 };
            let valid = kf <= f64::from(m) * nf / (ln(nf) + f64::from(m - 2) * lln + 1.0);
            (expo.exp(), est, valid, Method::SaddleRho)
        }
    };
    Ok(ApproxResult {
        method,
        order: if form == SaddleForm::SmallK { 0 } else { m },
        value,
        leading_error_estimate: est,
        in_validity_range: valid,
    })
}

/// Evaluate any method at (n, k). `order` is s for fd, s1 for pc, the truncation
/// order for families, 0 or 1 for menon, and m for the saddle forms (ignored by menon* and
/// saddle-small).
pub fn evaluate(method: &Method, n: u32, k: u32, order: u32, cfg: &SolverConfig) -> Result<ApproxResult> {
    match method {
        Method::Fd => fd_expansion(n, k, order, cfg),
        Method::Pc => pc_expansion(n, k, order, cfg),
        Method::Family { family, reduced, alpha } => {
            family_expansion(n, k, *family, order, *reduced, alpha.as_ref(), cfg)
        }
        Method::Menon => menon_expansion(n, k, order, cfg),
        Method::MenonReduced => menon_reduced(n, k, cfg),
        Method::SaddleSmallK => saddle_corollary(n, k, order, SaddleForm::SmallK, cfg),
        Method::SaddleMLogN => saddle_corollary(n, k, order, SaddleForm::MLogN, cfg),
        Method::SaddleRho => saddle_corollary(n, k, order, SaddleForm::RhoForm, cfg),
    }
}
