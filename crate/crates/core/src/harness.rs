//! Comparison sweeps, the lottery threshold, and byte-stable output.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use rug::{Float, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{coupon_covered, normalized_s};
use crate::expansions::{evaluate, Method};
use crate::precision::{format_sig, SolverConfig, DEFAULT_DIGITS, MIN_DIGITS};
use crate::stats::moment_params;

/// Significant digits written for approx, exact and delta.
pub const OUTPUT_DIGITS: usize = 20;

/// An approximation together with a pinned order, written `label` or `label@order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MethodSpec {
    pub method: Method,
    pub order: Option<u32>,
}

impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<MethodSpec> {
        match s.rsplit_once('@') {
            Some((m, o)) => {
                let order = o.trim().parse().map_err(|_| Error::Validation(format!("bad order in '{s}'")))?;
                Ok(MethodSpec { method: m.parse()?, order: Some(order) })
            }
            None => Ok(MethodSpec { method: s.parse()?, order: None }),
        }
    }
}

/// Methods whose value does not depend on the order argument.
fn order_free(m: &Method) -> bool {
    matches!(m, Method::MenonReduced | Method::SaddleSmallK)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KSelect {
    /// Every k in lo..=hi (clamped to 1..=n) stepping by `step`.
    Range { lo: u32, hi: u32, step: u32 },
    /// k within μ_n + offset ± window·σ_n.
    SdWindow(f64),
    /// Every k in 1..=n.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Validation(format!("unknown format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub digits: u32,
    pub methods: Vec<MethodSpec>,
    /// Orders used for methods without a pinned `@order`.
    pub orders: Vec<u32>,
    pub ns: Vec<u32>,
    pub k_select: KSelect,
    pub axis_offset: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            digits: DEFAULT_DIGITS,
            methods: Vec::new(),
            orders: vec![1],
            ns: Vec::new(),
            k_select: KSelect::All,
            axis_offset: -1.0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Validation("at least one approximation is required".into()));
        }
        if self.ns.is_empty() {
            return Err(Error::Validation("at least one n is required".into()));
        }
        if self.digits < MIN_DIGITS {
            return Err(Error::Validation(format!("precision must be at least {MIN_DIGITS} digits")));
        }
        if self.ns.contains(&0) {
            return Err(Error::Validation("n must be positive".into()));
        }
        if self.orders.is_empty() && self.methods.iter().any(|m| m.order.is_none() && !order_free(&m.method)) {
            return Err(Error::Validation("no order given".into()));
        }
        match self.k_select {
            KSelect::Range { lo, hi, step } if step == 0 || lo > hi || hi == 0 => {
                Err(Error::Validation("k range must be nonempty with a positive step".into()))
            }
            KSelect::SdWindow(w) if !(w >= 0.0 && w.is_finite()) => {
                Err(Error::Validation("sd window must be a nonnegative number".into()))
            }
            _ if !self.axis_offset.is_finite() => Err(Error::Validation("axis offset must be finite".into())),
            _ => Ok(()),
        }
    }

    fn jobs(&self) -> Vec<(Method, u32)> {
        let mut out = Vec::new();
        for spec in &self.methods {
            if let Some(o) = spec.order {
                out.push((spec.method.clone(), o));
            } else if order_free(&spec.method) {
                out.push((spec.method.clone(), 0));
            } else {
                for &o in &self.orders {
                    out.push((spec.method.clone(), o));
                }
            }
        }
        out.sort_by_key(|a| (a.0.to_string(), a.1));
        out.dedup();
        out
    }
}

/// One approximation at one (n, k).
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub n: u32,
    pub k: u32,
    pub x_axis: Float,
    pub method: String,
    pub order: u32,
    /// The approximation, or the error tag of a failed cell.
    pub approx: std::result::Result<Float, String>,
    pub exact: Rational,
    /// |S/f - 1| at working precision.
    pub delta: Option<Float>,
    pub in_range: bool,
}

/// 1 + (k - μ_n - offset)/(10 σ_n).
pub fn x_axis(k: u32, mu: &Float, sigma: &Float, offset: f64) -> Float {
    let prec = mu.prec();
    let d = Float::with_val(prec, k) - mu - offset;
    d / Float::with_val(prec, sigma * 10u32) + 1u32
}

fn k_values(n: u32, sel: KSelect, mu: &Float, sigma: &Float, offset: f64) -> Vec<u32> {
    match sel {
        KSelect::All => (1..=n).collect(),
        KSelect::Range { lo, hi, step } => (lo.max(1)..=hi.min(n)).step_by(step as usize).collect(),
        KSelect::SdWindow(w) => {
            let c = mu.to_f64() + offset;
            let s = sigma.to_f64();
            if w == 0.0 {
                let k = c.round().clamp(1.0, f64::from(n)) as u32;
                return vec![k];
            }
            let lo = (c - w * s).ceil().max(1.0) as u32;
            let hi = (c + w * s).floor().min(f64::from(n)) as u32;
            (lo..=hi).collect()
        }
    }
}

/// Rows for every (n, k, approximation), sorted by n, k, label and order.
pub fn compare_run(cfg: &RunConfig) -> Result<Vec<CompareRow>> {
    cfg.validate()?;
    let solver = SolverConfig::new(cfg.digits)?;
    let jobs = cfg.jobs();
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        let mp = moment_params(n, &solver)?;
        let sigma = mp.sigma();
        let ks = k_values(n, cfg.k_select, &mp.mu, &sigma, cfg.axis_offset);
        let per_k: Vec<Vec<CompareRow>> = ks
            .par_iter()
            .map(|&k| {
                let exact = normalized_s(n, k).expect("k within 1..=n");
                let ef = Float::with_val(solver.bits(), &exact);
                let xa = x_axis(k, &mp.mu, &sigma, cfg.axis_offset);
                jobs.iter()
                    .map(|(method, order)| {
                        let (approx, delta, in_range) = match evaluate(method, n, k, *order, &solver) {
                            Ok(r) => {
                                let d = (Float::with_val(solver.bits(), &ef / &r.value) - 1u32).abs();
                                let d = if d.is_finite() { Some(d) } else { None };
                                (Ok(r.value), d, r.in_validity_range)
                            }
                            Err(e) => (Err(e.tag().to_string()), None, false),
                        };
                        CompareRow {
                            n,
                            k,
                            x_axis: xa.clone(),
                            method: method.to_string(),
                            order: *order,
                            approx,
                            exact: exact.clone(),
                            delta,
                            in_range,
                        }
                    })
                    .collect()
            })
            .collect();
        rows.extend(per_k.into_iter().flatten());
    }
    rows.sort_by(|a, b| (a.n, a.k, &a.method, a.order).cmp(&(b.n, b.k, &b.method, b.order)));
    Ok(rows)
}

/// [`compare_run`] over an sd-window around μ_n + offset.
pub fn sweep_sd_axis(cfg: &RunConfig) -> Result<Vec<CompareRow>> {
    if !matches!(cfg.k_select, KSelect::SdWindow(_)) {
        return Err(Error::Validation("sweep needs an sd window".into()));
    }
    compare_run(cfg)
}

/// Outcome of a lottery-threshold search.
#[derive(Debug, Clone)]
pub struct LottoThreshold {
    pub threshold: u32,
    /// Real root of the closed-form approximation (approximate path only).
    pub root: Option<Float>,
}

/// Smallest n with full-coverage probability above 1/2.
pub fn lotto_threshold(k: u32, s: u32, use_exact: bool, cfg: &SolverConfig) -> Result<LottoThreshold> {
    if k < 1 || s < 1 || s > k {
        return Err(Error::domain(format!("need 1 <= s <= k, got k = {k}, s = {s}")));
    }
    if s == k {
        return Ok(LottoThreshold { threshold: 1, root: None });
    }
    if use_exact {
        let half = Rational::from((1, 2));
        let above = |n: u32| -> Result<bool> { Ok(coupon_covered(n, k, s)? > half) };
        let mut hi = 1u32;
        while !above(hi)? {
            hi = hi.checked_mul(2).ok_or_else(|| Error::domain("threshold search overflow"))?;
        }
        let mut lo = hi / 2;
        // invariant: !above(lo) (or lo = 0), above(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if above(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Ok(LottoThreshold { threshold: hi, root: None });
    }
    // (1 - (1 - s/k)^n)^k = 1/2  <=>  n = log(1 - 2^{-1/k}) / log(1 - s/k)
    let p = cfg.bits();
    let half_root = Float::with_val(p, 2u32).ln() / k;
    let num = Float::with_val(p, -(Float::with_val(p, -half_root).exp())).ln_1p();
    let den = Float::with_val(p, -(Float::with_val(p, s) / k)).ln_1p();
    let root = num / den;
    let threshold = root.clone().floor().to_f64() as u32 + 1;
    Ok(LottoThreshold { threshold, root: Some(root) })
}

/// Header plus string cells, written as CSV or JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub const COMPARE_COLUMNS: [&str; 9] = ["n", "k", "x_axis", "family", "order", "approx", "exact", "delta", "in_range"];

pub fn rows_table(rows: &[CompareRow]) -> Table {
    let mut t = Table::new(&COMPARE_COLUMNS);
    for r in rows {
        let prec = r.x_axis.prec();
        let exact = Float::with_val(prec, &r.exact);
        t.push(vec![
            r.n.to_string(),
            r.k.to_string(),
            format_sig(&r.x_axis, OUTPUT_DIGITS),
            r.method.clone(),
            r.order.to_string(),
            match &r.approx {
                Ok(v) => format_sig(v, OUTPUT_DIGITS),
                Err(tag) => format!("error:{tag}"),
            },
            format_sig(&exact, OUTPUT_DIGITS),
            match &r.delta {
                Some(d) => format_sig(d, OUTPUT_DIGITS),
                None => "NaN".into(),
            },
            r.in_range.to_string(),
        ]);
    }
    t
}

#[derive(Serialize)]
struct JsonTable<'a> {
    columns: &'a [String],
    rows: Vec<serde_json::Map<String, serde_json::Value>>,
}

/// Write `table` to `out` with LF line endings.
pub fn write_table<W: Write>(table: &Table, format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
            w.write_record(&table.header)?;
            for r in &table.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows = table
                .rows
                .iter()
                .map(|r| {
                    table
                        .header
                        .iter()
                        .zip(r)
                        .map(|(h, v)| (h.clone(), serde_json::Value::String(v.clone())))
                        .collect()
                })
                .collect();
            serde_json::to_writer_pretty(&mut out, &JsonTable { columns: &table.header, rows })?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Write to `path`, or to stdout when `path` is `None`.
pub fn emit(table: &Table, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p)?;
            write_table(table, format, std::io::BufWriter::new(f))
        }
        None => write_table(table, format, std::io::stdout().lock()),
    }
}
