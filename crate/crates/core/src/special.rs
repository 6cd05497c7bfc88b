//! Scalar special functions at configurable precision.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::precision::SolverConfig;

/// Principal branch of Lambert W on `[-1/e, inf)`.
pub fn lambert_w(x: &Float, cfg: &SolverConfig) -> Result<Float> {
    let prec = x.prec().max(cfg.bits());
    let x = Float::with_val(prec, x);
    if x.is_zero() {
        return Ok(Float::new(prec));
    }
    // e*x + 1, the distance to the branch point.
    let e = Float::with_val(prec, 1).exp();
    let q = Float::with_val(prec, &e * &x) + 1u32;
    let tiny = Float::with_val(prec, 2u32).pow(-(prec as i32) + 8);
    if q < 0 {
        if -q.clone() > tiny {
            return Err(Error::domain("lambert_w: argument below -1/e"));
        }
        return Ok(Float::with_val(prec, -1));
    }
    if q <= tiny {
        return Ok(Float::with_val(prec, -1));
    }
    let mut w = initial_w(&x, &q);
    let tol = Float::with_val(prec, &cfg.rel_tolerance);
    let scale = Float::with_val(prec, x.clone().abs()).max(&Float::with_val(prec, 1));
    for _ in 0..cfg.max_iterations {
        let ew = w.clone().exp();
        let f = Float::with_val(prec, &w * &ew) - &x;
        let wp1 = Float::with_val(prec, &w + 1u32);
        if wp1.is_zero() {
            return Ok(w);
        }
        let fp = Float::with_val(prec, &ew * &wp1);
        let corr = Float::with_val(prec, &w + 2u32) * &f / (Float::with_val(prec, &wp1 * 2u32));
        let den = fp - corr;
        let step = Float::with_val(prec, &f / &den);
        w -= &step;
        let mag = Float::with_val(prec, w.clone().abs()).max(&tiny);
        if step.clone().abs() <= Float::with_val(prec, &mag * &tol) * Float::with_val(prec, 2u32).pow(-8) {
            return Ok(w);
        }
        // Accept once the defining residual is at tolerance and the step is negligible.
        if f.clone().abs() <= Float::with_val(prec, &tol * &scale) * Float::with_val(prec, 2u32).pow(-16) {
            return Ok(w);
        }
    }
    Err(Error::NonConvergence { what: "lambert_w".into(), iterations: cfg.max_iterations })
}

fn initial_w(x: &Float, q: &Float) -> Float {
    let prec = x.prec();
    let xf = x.to_f64();
    if q.to_f64() < 0.3 {
        // Branch-point series in p = sqrt(2(e x + 1)).
        let p = Float::with_val(prec, q * 2u32).sqrt();
        let p2 = Float::with_val(prec, p.square_ref());
        let p3 = Float::with_val(prec, &p2 * &p);
        return Float::with_val(prec, -1) + &p - p2 / 3u32 + p3 * 11u32 / 72u32;
    }
    let w0 = if x.to_f64().is_infinite() || xf > 1e300 {
        let l = x.clone().ln();
        let ll = Float::with_val(prec, l.ln_ref());
        return l - ll;
    } else if xf < 1.0 {
        // log1p keeps the guess accurate near zero.
        let w = xf.ln_1p();
        w - (w * w.exp() - xf) / (w.exp() * (w + 1.0))
    } else {
        let l = xf.ln();
        l - l.ln().max(0.0)
    };
    let mut w = w0;
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - xf;
        let s = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
        w -= s;
        if !w.is_finite() {
            w = w0;
            break;
        }
        if s.abs() <= 1e-15 * w.abs() {
            break;
        }
    }
    Float::with_val(prec, w)
}

/// Cayley tree function T(z) = -W(-z) on `[0, 1/e]`.
pub fn tree_t(z: &Float, cfg: &SolverConfig) -> Result<Float> {
    let prec = z.prec().max(cfg.bits());
    if z.is_sign_negative() && !z.is_zero() {
        return Err(Error::domain("tree_t: argument below 0"));
    }
    let e = Float::with_val(prec, 1).exp();
    let excess = Float::with_val(prec, &e * z) - 1u32;
    if excess > 0 {
        let slack = Float::with_val(prec, 2u32).pow(-(prec as i32) + 16);
        if excess > slack {
            return Err(Error::domain("tree_t: argument exceeds 1/e"));
        }
        return Ok(Float::with_val(prec, 1));
    }
    let w = lambert_w(&Float::with_val(prec, -z), cfg)?;
    Ok(-w)
}

/// Standard normal distribution function.
pub fn normal_cdf(x: &Float) -> Float {
    let prec = x.prec();
    let s = Float::with_val(prec, 2u32).sqrt();
    let arg = Float::with_val(prec, -x) / s;
    arg.erfc() / 2u32
}

/// Standard normal density.
pub fn normal_pdf(x: &Float) -> Float {
    let prec = x.prec();
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let e = Float::with_val(prec, x.square_ref()) / -2i32;
    e.exp() / two_pi.sqrt()
}

/// Largest argument for which ln(k!) goes through the exact factorial.
pub const EXACT_FACTORIAL_MAX: u32 = 20_000;

/// ln(k!) at `prec` bits.
pub fn log_factorial(k: u32, prec: u32) -> Float {
    if k < 2 {
        return Float::new(prec);
    }
    if k <= EXACT_FACTORIAL_MAX {
        let f = Integer::from(Integer::factorial(k));
        return Float::with_val(prec, &f).ln();
    }
    Float::with_val(prec, k + 1).ln_gamma()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn w_fixed_points() {
        let c = cfg();
        let e = c.float(1).exp();
        let w = lambert_w(&e, &c).unwrap();
        assert!((w - 1u32).abs() < 1e-45);
        assert!(lambert_w(&c.float(0), &c).unwrap().is_zero());
        let m1 = -(c.float(1).exp().recip());
        let w = lambert_w(&m1, &c).unwrap();
        assert!((w + 1u32).abs() < 1e-20);
        assert!(lambert_w(&c.float(-0.5), &c).is_err());
    }

    #[test]
    fn w_negative_and_huge() {
        let c = cfg();
        for x in [-0.3678, -0.2, -1e-12, 1e-30, 3.5, 1e10, 1e100] {
            let x = c.float(x);
            let w = lambert_w(&x, &c).unwrap();
            let r = Float::with_val(c.bits(), &w * w.clone().exp()) - &x;
            let scale = x.clone().abs().max(&c.float(1));
            assert!(r.abs() <= c.rel_tolerance.clone() * scale, "x = {x}");
        }
    }

    #[test]
    fn tree_domain() {
        let c = cfg();
        let z = c.float(1).exp().recip();
        let t = tree_t(&z, &c).unwrap();
        assert!((t - 1u32).abs() < 1e-20);
        assert!(tree_t(&c.float(0.4), &c).is_err());
        assert!(tree_t(&c.float(-0.1), &c).is_err());
        assert!(tree_t(&c.float(0), &c).unwrap().is_zero());
    }

    #[test]
    fn cdf_symmetry() {
        let c = cfg();
        assert_eq!(normal_cdf(&c.float(0)), 0.5);
        let x = c.float(1.7);
        let s = normal_cdf(&x) + normal_cdf(&(-x.clone()));
        assert!((s - 1u32).abs() < 1e-45);
    }

    #[test]
    fn log_factorial_small() {
        assert!(log_factorial(0, 100).is_zero());
        assert!(log_factorial(1, 100).is_zero());
        let l = log_factorial(10, 200);
        assert!((l - Float::with_val(200, 3628800u32).ln()).abs() < 1e-55);
        let big = log_factorial(EXACT_FACTORIAL_MAX + 1, 200);
        let prev = log_factorial(EXACT_FACTORIAL_MAX, 200);
        let d = big - prev - Float::with_val(200, EXACT_FACTORIAL_MAX + 1).ln();
        assert!(d.abs() < 1e-50);
    }
}
