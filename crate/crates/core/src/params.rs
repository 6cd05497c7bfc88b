//! Derived parameters, the saddle point, and shifted λ-parameters.

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::SolverConfig;
use crate::special::{lambert_w, tree_t};

/// n, k and the real parameters built from them.
#[derive(Debug, Clone)]
pub struct CentralParams {
    pub n: u32,
    pub k: u32,
    /// n/k
    pub rho: Float,
    /// (n+1)/k
    pub rho_star: Float,
    /// k e^{-n/k}
    pub lambda: Float,
    /// k (1-1/k)^n
    pub lambda_b: Float,
    /// k e^{-n/k + 1/(2k) - 1/(12k^2)}
    pub lambda_e_prime: Float,
    /// λ/(k-λ)
    pub big_lambda: Float,
    /// W(n)
    pub omega: Float,
}

impl CentralParams {
    pub fn prec(&self) -> u32 {
        self.rho.prec()
    }

    pub fn float<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.prec(), v)
    }

    /// ln(1 - 1/k); -inf at k = 1.
    pub fn log_q(&self) -> Float {
        let k = self.float(self.k);
        Float::with_val(self.prec(), -k.recip()).ln_1p()
    }
}

pub fn central_params(n: u32, k: u32, cfg: &SolverConfig) -> Result<CentralParams> {
    if k < 1 || k > n {
        return Err(Error::domain(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    let p = cfg.bits();
    let kf = Float::with_val(p, k);
    let nf = Float::with_val(p, n);
    let rho = Float::with_val(p, &nf / &kf);
    let rho_star = Float::with_val(p, n + 1) / &kf;
    let lambda = Float::with_val(p, -&rho).exp() * &kf;
    let lambda_b = if k == 1 {
        Float::new(p)
    } else {
        let lq = Float::with_val(p, -kf.clone().recip()).ln_1p();
        (lq * &nf).exp() * &kf
    };
    let k2 = Float::with_val(p, kf.square_ref());
    let ex = Float::with_val(p, -&rho) + Float::with_val(p, kf.clone() * 2u32).recip()
        - Float::with_val(p, k2 * 12u32).recip();
    let lambda_e_prime = ex.exp() * &kf;
    let big_lambda = Float::with_val(p, &lambda / (Float::with_val(p, &kf - &lambda)));
    let omega = lambert_w(&nf, cfg)?;
    Ok(CentralParams { n, k, rho, rho_star, lambda, lambda_b, lambda_e_prime, big_lambda, omega })
}

/// λ(α) = k exp(-n/k - α/k).
pub fn lambda_alpha(p: &CentralParams, alpha: &Float) -> Float {
    let k = p.float(p.k);
    let e = Float::with_val(p.prec(), -&p.rho) - Float::with_val(p.prec(), alpha / &k);
    e.exp() * k
}

/// Solution of the saddle-point equation ρ*(1 - e^{-R}) = R.
#[derive(Debug, Clone)]
pub struct SaddleSolution {
    pub r: Float,
    /// (n+1)(R + 1 - ρ*)
    pub v: Float,
    /// |ρ*(1 - e^{-R}) - R|
    pub residual: Float,
}

fn saddle_phi(rho_star: &Float, r: &Float) -> Float {
    let one_minus = -Float::with_val(r.prec(), -r).exp_m1();
    Float::with_val(r.prec(), rho_star * &one_minus) - r
}

/// Truncated Lagrange series ρ* - Σ_{j<=terms} j^{j-1}/j! (ρ* e^{-ρ*})^j.
pub fn lagrange_saddle(rho_star: &Float, terms: u32) -> Float {
    let prec = rho_star.prec();
    let z = Float::with_val(prec, -rho_star).exp() * rho_star;
    let mut sum = Float::new(prec);
    let mut zj = Float::with_val(prec, 1);
    let mut fact = Float::with_val(prec, 1);
    for j in 1..=terms {
        zj *= &z;
        fact *= j;
        let jj = Float::with_val(prec, j).pow_u(j - 1);
        sum += jj * &zj / &fact;
    }
    Float::with_val(prec, rho_star - &sum)
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

/// Safeguarded Newton for R on the bracket [max(0, ρ*-1), ρ*].
pub fn solve_saddle(n: u32, k: u32, cfg: &SolverConfig) -> Result<SaddleSolution> {
    if k < 1 || k > n + 1 {
        return Err(Error::domain(format!("need 1 <= k <= n+1, got n = {n}, k = {k}")));
    }
    let prec = cfg.bits() + 32;
    let rho_star = Float::with_val(prec, n + 1) / k;
    let np1 = Float::with_val(prec, n + 1);
    if k == n + 1 {
        let r = Float::new(prec);
        let v = Float::with_val(prec, &r + 1u32) - &rho_star;
        return Ok(SaddleSolution {
            r: Float::with_val(cfg.bits(), &r),
            v: Float::with_val(cfg.bits(), v * &np1),
            residual: Float::new(cfg.bits()),
        });
    }
    // g(R) = R/(1 - e^{-R}) - ρ* is increasing with a single root in the bracket.
    let g = |r: &Float| -> Float {
        let om = -Float::with_val(prec, -r).exp_m1();
        Float::with_val(prec, r / &om) - &rho_star
    };
    let mut lo = Float::with_val(prec, &rho_star - 1u32).max(&Float::new(prec));
    let mut hi = rho_star.clone();
    let init = {
        let z = Float::with_val(prec, -&rho_star).exp() * &rho_star;
        let t = tree_t(&z, &cfg.widened(10))?;
        Float::with_val(prec, &rho_star - t)
    };
    let mut r = if init > lo && init < hi {
        init
    } else {
        Float::with_val(prec, &lo + &hi) / 2u32
    };
    let tol = Float::with_val(prec, &cfg.rel_tolerance) * 1e-3;
    let mut converged = false;
    for _ in 0..cfg.max_iterations {
        if r.is_zero() {
            r = Float::with_val(prec, &lo + &hi) / 2u32;
        }
        let gr = g(&r);
        if gr.is_zero() {
            converged = true;
            break;
        }
        if gr < 0 {
            lo = r.clone();
        } else {
            hi = r.clone();
        }
        let e = Float::with_val(prec, -&r).exp();
        let om = -Float::with_val(prec, -&r).exp_m1();
        let num = Float::with_val(prec, &om - Float::with_val(prec, &r * &e));
        let dg = num / Float::with_val(prec, om.square_ref());
        let mut next = Float::with_val(prec, &r - Float::with_val(prec, &gr / &dg));
        if !(next > lo && next < hi) || !next.is_finite() {
            next = Float::with_val(prec, &lo + &hi) / 2u32;
        }
        let step = Float::with_val(prec, &next - &r).abs();
        r = next;
        if step <= Float::with_val(prec, &tol * r.clone().abs()) {
            converged = true;
            break;
        }
        if Float::with_val(prec, &hi - &lo) <= Float::with_val(prec, &tol * r.clone().abs()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { what: "saddle point".into(), iterations: cfg.max_iterations });
    }
    let residual = saddle_phi(&rho_star, &r).abs();
    let v = (Float::with_val(prec, &r + 1u32) - &rho_star) * &np1;
    Ok(SaddleSolution {
        r: Float::with_val(cfg.bits(), &r),
        v: Float::with_val(cfg.bits(), &v),
        residual: Float::with_val(cfg.bits(), &residual),
    })
}

/// Families with a shifted λ-parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LambdaFamily {
    Ee,
    Bb,
    Be,
    Eb,
    Hat,
}

impl LambdaFamily {
    pub fn name(self) -> &'static str {
        match self {
            LambdaFamily::Ee => "ee",
            LambdaFamily::Bb => "bb",
            LambdaFamily::Be => "be",
            LambdaFamily::Eb => "eb",
            LambdaFamily::Hat => "hat",
        }
    }

    /// Whether the parameter replaces λ_b (as opposed to λ).
    pub fn binomial_base(self) -> bool {
        matches!(self, LambdaFamily::Bb | LambdaFamily::Eb)
    }
}

#[derive(Debug, Clone)]
pub struct LambdaStar {
    pub family: LambdaFamily,
    pub value: Float,
    /// α with λ(α) = value for exponential bases; d with λ_b(d) = value for binomial bases.
    pub shift: Float,
    pub defining_residual: Float,
}

/// Right-hand side of each family's defining equation x = F(x).
pub fn lambda_star_rhs(p: &CentralParams, family: LambdaFamily, x: &Float) -> Float {
    let prec = x.prec();
    let k = Float::with_val(prec, p.k);
    let rho = Float::with_val(prec, &p.rho);
    let lam = Float::with_val(prec, &p.lambda);
    match family {
        LambdaFamily::Ee => {
            // k exp(-ρ - ρ/(2k) + (ρ+1)x/(2k))
            let e = Float::with_val(prec, &rho + 1u32) * x - &rho;
            let e = e / Float::with_val(prec, &k * 2u32) - &rho;
            e.exp() * &k
        }
        LambdaFamily::Be => {
            // k exp(-ρ + (x-1)ρ/(2k))
            let e = Float::with_val(prec, x - 1u32) * &rho / Float::with_val(prec, &k * 2u32) - &rho;
            e.exp() * &k
        }
        LambdaFamily::Bb => {
            // k (1-1/k)^{n - xn/(2k)}
            let expo = Float::with_val(prec, p.n) - Float::with_val(prec, x * &rho) / 2u32;
            (Float::with_val(prec, p.log_q()) * expo).exp() * &k
        }
        LambdaFamily::Eb => {
            // k (1-1/k)^{n - (ρ+1)x/2}
            let expo = Float::with_val(prec, p.n) - Float::with_val(prec, &rho + 1u32) * x / 2u32;
            (Float::with_val(prec, p.log_q()) * expo).exp() * &k
        }
        LambdaFamily::Hat => {
            let k2 = Float::with_val(prec, k.square_ref());
            let a = (Float::with_val(prec, &rho) - Float::with_val(prec, &rho + 1u32) * x)
                / Float::with_val(prec, &k * 2u32);
            let x2 = Float::with_val(prec, x.square_ref());
            let b = Float::with_val(prec, &rho * 8u32)
                + Float::with_val(prec, &rho * 6u32) * Float::with_val(prec, &rho - 2u32) * x
                - Float::with_val(prec, &rho - 1u32) * (Float::with_val(prec, &rho * 3u32) + 1u32) * x2;
            let b = b / (k2 * 24u32);
            let e = -a - b;
            e.exp() * lam
        }
    }
}

fn relative_residual(p: &CentralParams, family: LambdaFamily, x: &Float) -> Float {
    let f = lambda_star_rhs(p, family, x);
    (f - x).abs() / x
}

fn tree_solution(p: &CentralParams, family: LambdaFamily, cfg: &SolverConfig) -> Result<Float> {
    let prec = p.prec();
    let k = p.float(p.k);
    let n = p.float(p.n);
    let rho = &p.rho;
    let half_k_inv = Float::with_val(prec, &k * 2u32).recip();
    let (z, scale) = match family {
        LambdaFamily::Ee => {
            let rp1 = Float::with_val(prec, rho + 1u32);
            let e = -Float::with_val(prec, rho) - Float::with_val(prec, rho * &half_k_inv);
            let z = e.exp() * &rp1 / 2u32;
            (z, Float::with_val(prec, &k * 2u32) / rp1)
        }
        LambdaFamily::Be => {
            let e = -Float::with_val(prec, rho) - Float::with_val(prec, rho * &half_k_inv);
            let z = e.exp() * rho / 2u32;
            (z, Float::with_val(prec, &k * 2u32) / rho)
        }
        LambdaFamily::Bb | LambdaFamily::Eb => {
            if p.k < 2 {
                return Err(Error::domain("binomial-base shift needs k >= 2"));
            }
            let l = -p.log_q();
            let m = if family == LambdaFamily::Bb { n.clone() } else { Float::with_val(prec, &n + &k) };
            let ml = Float::with_val(prec, &m * &l);
            let z = Float::with_val(prec, &p.lambda_b / &k) * &ml / 2u32;
            (z, Float::with_val(prec, &k * 2u32) / ml)
        }
        LambdaFamily::Hat => unreachable!("hat has no closed form"),
    };
    let t = tree_t(&z, cfg)?;
    Ok(t * scale)
}

fn solve_hat(p: &CentralParams, cfg: &SolverConfig) -> Result<Float> {
    let prec = p.prec();
    let tol = Float::with_val(prec, &cfg.rel_tolerance) * 1e-2;
    let mut x = p.lambda.clone();
    let mut res = relative_residual(p, LambdaFamily::Hat, &x);
    let mut theta = Float::with_val(prec, 1);
    for _ in 0..cfg.max_iterations {
        let f = lambda_star_rhs(p, LambdaFamily::Hat, &x);
        let step = Float::with_val(prec, &f - &x) * &theta;
        let next = Float::with_val(prec, &x + &step);
        if !next.is_finite() || next <= 0 {
            theta /= 2u32;
            continue;
        }
        let next_res = relative_residual(p, LambdaFamily::Hat, &next);
        if next_res > res {
            theta /= 2u32;
        }
        let rel = step.abs() / &next;
        x = next;
        res = next_res;
        if rel <= tol {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence { what: "hat λ fixed point".into(), iterations: cfg.max_iterations })
}

pub fn solve_lambda_star(p: &CentralParams, family: LambdaFamily, cfg: &SolverConfig) -> Result<LambdaStar> {
    let prec = p.prec();
    let value = match family {
        LambdaFamily::Hat => solve_hat(p, cfg)?,
        _ => tree_solution(p, family, cfg)?,
    };
    if value <= 0 {
        return Err(Error::domain(format!("{} parameter is not positive", family.name())));
    }
    let k = p.float(p.k);
    let shift = if family.binomial_base() {
        let ratio = Float::with_val(prec, &value / &p.lambda_b).ln();
        ratio / p.log_q()
    } else {
        Float::with_val(prec, &p.lambda / &value).ln() * &k
    };
    let defining_residual = relative_residual(p, family, &value);
    Ok(LambdaStar { family, value, shift, defining_residual })
}
