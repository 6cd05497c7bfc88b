//! Moments, Bell-number asymptotics and limit-theorem checks for the block count.

use rug::float::Constant;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::exact::block_distribution;
use crate::precision::SolverConfig;
use crate::special::{lambert_w, normal_cdf};

/// μ_n = n/W(n) and σ_n^2 = n/(W(n)(W(n)+1)).
#[derive(Debug, Clone)]
pub struct MomentParams {
    pub n: u32,
    pub mu: Float,
    pub sigma2: Float,
    pub omega: Float,
}

impl MomentParams {
    pub fn sigma(&self) -> Float {
        self.sigma2.clone().sqrt()
    }
}

pub fn moment_params(n: u32, cfg: &SolverConfig) -> Result<MomentParams> {
    if n < 1 {
        return Err(Error::domain("n must be at least 1"));
    }
    let p = cfg.bits();
    let nf = Float::with_val(p, n);
    let omega = lambert_w(&nf, cfg)?;
    let mu = Float::with_val(p, &nf / &omega);
    let sigma2 = Float::with_val(p, &mu / Float::with_val(p, &omega + 1u32));
    Ok(MomentParams { n, mu, sigma2, omega })
}

/// e^{(ω-1+1/ω)n-1}/sqrt(ω+1), optionally with the 1/n correction factor.
pub fn bell_asympt(n: u32, refined: bool, cfg: &SolverConfig) -> Result<Float> {
    if n < 2 {
        return Err(Error::domain("bell_asympt needs n >= 2"));
    }
    let p = cfg.bits();
    let w = lambert_w(&Float::with_val(p, n), cfg)?;
    let wp1 = Float::with_val(p, &w + 1u32);
    let expo = (Float::with_val(p, &w - 1u32) + Float::with_val(p, w.recip_ref())) * n - 1u32;
    let mut v = expo.exp() / wp1.clone().sqrt();
    if refined {
        let w2 = Float::with_val(p, w.square_ref());
        let poly = Float::with_val(p, &w2 * 2u32) + Float::with_val(p, &w * 7u32) + 10u32;
        let den = Float::with_val(p, wp1.clone().pow_u(3)) * 24u32 * n;
        v *= 1u32 - w2 * poly / den;
    }
    Ok(v)
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

/// (mean, variance) approximations: (μ_n, σ_n^2), or the four-term expansions.
pub fn mean_var_asympt(n: u32, refined: bool, cfg: &SolverConfig) -> Result<(Float, Float)> {
    if n < 2 {
        return Err(Error::domain("mean_var_asympt needs n >= 2"));
    }
    let m = moment_params(n, cfg)?;
    if !refined {
        return Ok((m.mu, m.sigma2));
    }
    let p = cfg.bits();
    let w = &m.omega;
    let w2 = Float::with_val(p, w.square_ref());
    let w3 = Float::with_val(p, &w2 * w);
    let wp1 = Float::with_val(p, w + 1u32);
    let nf = Float::with_val(p, n);

    let mut mean = Float::with_val(p, &m.mu) - 1u32;
    mean += Float::with_val(p, w / (Float::with_val(p, wp1.square_ref()) * 2u32));
    let poly = Float::with_val(p, &w3 * 2u32) + Float::with_val(p, &w2 * 8u32) + Float::with_val(p, w * 11u32) + 20u32;
    mean += Float::with_val(p, &w2 * &poly) / (Float::with_val(p, wp1.clone().pow_u(5)) * 24u32 * &nf);

    let mut var = Float::with_val(p, &m.sigma2) - 1u32;
    var += Float::with_val(p, w * Float::with_val(p, w - 1u32)) / (Float::with_val(p, wp1.clone().pow_u(4)) * 2u32);
    let poly = Float::with_val(p, &w3 * 2u32) + Float::with_val(p, &w2 * 10u32) - Float::with_val(p, w * 27u32) + 40u32;
    var -= Float::with_val(p, &w2 * &poly) / (Float::with_val(p, wp1.clone().pow_u(7)) * 24u32 * &nf);
    Ok((mean, var))
}

/// Distance of the exact block-count law from its normal limit.
#[derive(Debug, Clone)]
pub struct LimitReport {
    pub n: u32,
    pub sup_cdf_distance: Float,
    /// (x, P(X = floor(μ + xσ)) sqrt(2π) σ e^{x^2/2})
    pub llt_ratios: Vec<(i32, Float)>,
    /// sup distance times sqrt(n)/log n
    pub scaled_rate: Float,
}

pub const LLT_POINTS: [i32; 5] = [-2, -1, 0, 1, 2];

pub fn limit_checks(n: u32, cfg: &SolverConfig) -> Result<LimitReport> {
    if n < 10 {
        return Err(Error::domain("limit_checks needs n >= 10"));
    }
    let p = cfg.bits();
    let mp = moment_params(n, cfg)?;
    let sigma = mp.sigma();
    let (row, bell) = block_distribution(n)?;
    let bell_f = Float::with_val(p, &bell);
    let mut cum = Integer::new();
    let mut prev_cdf = Float::new(p);
    let mut sup = Float::new(p);
    for (k, v) in row.iter().enumerate() {
        cum += v;
        let cdf = Float::with_val(p, &cum) / &bell_f;
        let x = (Float::with_val(p, k as u32) - &mp.mu) / &sigma;
        let phi = normal_cdf(&x);
        for d in [Float::with_val(p, &cdf - &phi), Float::with_val(p, &prev_cdf - &phi)] {
            let d = d.abs();
            if d > sup {
                sup = d;
            }
        }
        prev_cdf = cdf;
    }
    let root_2pi = (Float::with_val(p, Constant::Pi) * 2u32).sqrt();
    let mut llt_ratios = Vec::new();
    for x in LLT_POINTS {
        let pos = Float::with_val(p, &sigma * x) + &mp.mu;
        let k = pos.floor().to_f64() as i64;
        let prob = if k < 0 || k as usize >= row.len() {
            Float::new(p)
        } else {
            Float::with_val(p, &row[k as usize]) / &bell_f
        };
        let g = Float::with_val(p, f64::from(x * x) / 2.0).exp();
        llt_ratios.push((x, prob * &root_2pi * &sigma * g));
    }
    let nf = Float::with_val(p, n);
    let scaled_rate = Float::with_val(p, &sup * nf.clone().sqrt()) / nf.ln();
    Ok(LimitReport { n, sup_cdf_distance: sup, llt_ratios, scaled_rate })
}
