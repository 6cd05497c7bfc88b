use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Smallest accepted working precision in decimal digits.
pub const MIN_DIGITS: u32 = 15;
/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 50;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

/// Number of binary digits carrying `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * BITS_PER_DIGIT).ceil() as u32 + 4
}

/// Working precision plus the settings shared by the iterative solvers.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    digits: u32,
    pub rel_tolerance: Float,
    pub max_iterations: usize,
}

impl SolverConfig {
    /// Config with tolerance `10^-(digits-5)` and 200 iterations.
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Validation(format!(
                "precision must be at least {MIN_DIGITS} digits, got {digits}"
            )));
        }
        let bits = digits_to_bits(digits);
        let tol = Float::with_val(bits, 10u32).pow(-(i64::from(digits) - 5));
        Ok(SolverConfig { digits, rel_tolerance: tol, max_iterations: 200 })
    }

    pub fn with_tolerance(mut self, tol: Float, max_iterations: usize) -> Result<Self> {
        if !(tol > 0 && tol < 1) {
            return Err(Error::Validation("tolerance must lie in (0, 1)".into()));
        }
        if max_iterations == 0 {
            return Err(Error::Validation("max_iterations must be positive".into()));
        }
        self.rel_tolerance = tol;
        self.max_iterations = max_iterations;
        Ok(self)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        digits_to_bits(self.digits)
    }

    /// Same settings at a higher precision (tolerance unchanged).
    pub fn widened(&self, extra_digits: u32) -> SolverConfig {
        SolverConfig {
            digits: self.digits + extra_digits,
            rel_tolerance: Float::with_val(
                digits_to_bits(self.digits + extra_digits),
                &self.rel_tolerance,
            ),
            max_iterations: self.max_iterations,
        }
    }

    /// Config whose tolerance tracks its own precision.
    pub fn at_digits(&self, digits: u32) -> SolverConfig {
        let mut c = SolverConfig::new(digits.max(MIN_DIGITS)).expect("digits clamped");
        c.max_iterations = self.max_iterations;
        c
    }

    pub fn float<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), v)
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::new(DEFAULT_DIGITS).expect("default precision is valid")
    }
}

/// Decimal log of |x|; `-inf` for zero.
pub fn log10_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log10() + f64::from(e) * std::f64::consts::LOG10_2
}

/// Format with `sig` significant digits in scientific notation.
pub fn format_sig(x: &Float, sig: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf".into() } else { "inf".into() };
    }
    format!("{:.*e}", sig.max(1), x)
}
