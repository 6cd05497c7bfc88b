use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rug::Float;

use stirling2::exact::{bell_numbers, block_distribution, normalized_s, row_moment, stirling2_sieve};
use stirling2::expansions::{evaluate, Method};
use stirling2::harness::{
    compare_run, emit, lotto_threshold, rows_table, sweep_sd_axis, Format, KSelect, MethodSpec, RunConfig, Table,
    OUTPUT_DIGITS,
};
use stirling2::params::solve_saddle;
use stirling2::precision::{format_sig, SolverConfig};
use stirling2::stats::{limit_checks, mean_var_asympt};
use stirling2::{Error, Result};

#[derive(Parser)]
#[command(name = "stirling2", version, about = "Exact and asymptotic Stirling numbers of the second kind")]
struct Cli {
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 50)]
    digits: u32,
    /// Output format: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    format: String,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Offset added to μ_n when centring the sweep axis.
    #[arg(long, global = true, default_value_t = -1.0, allow_negative_numbers = true)]
    axis_offset: f64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Stirling number and normalized value S(n,k).
    Exact { n: u32, k: u32 },
    /// Bell numbers B_0..B_n.
    Bell { n_max: u32 },
    /// One approximation at (n, k).
    Approx {
        n: u32,
        k: u32,
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1)]
        order: u32,
        #[arg(long)]
        error_reduced: bool,
    },
    /// Error table over explicit n values and a k range.
    Compare {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        families: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        orders: Vec<u32>,
        #[arg(long)]
        k_min: Option<u32>,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long, default_value_t = 1)]
        k_step: u32,
    },
    /// Error table over k within μ_n + offset ± window·σ_n.
    Sweep {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        sd_window: f64,
        #[arg(long, value_delimiter = ',', default_value = "bb@1,fd@3,pc@2,ee@1,eb@1,menon@1")]
        families: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        orders: Vec<u32>,
    },
    /// Exact mean and variance of the block count with their approximations.
    Moments {
        n: u32,
        #[arg(long)]
        refined: bool,
    },
    /// Normal-limit distances of the exact block-count law.
    Limits { n: u32 },
    /// Smallest number of draws covering all k numbers with probability above 1/2.
    Lotto {
        k: u32,
        s: u32,
        #[arg(long)]
        approx: bool,
    },
    /// Saddle point R of the occupancy integral.
    Saddle { n: u32, k: u32 },
}

fn sig(x: &Float) -> String {
    format_sig(x, OUTPUT_DIGITS)
}

fn run(cli: Cli) -> Result<()> {
    let format: Format = cli.format.parse()?;
    let cfg = SolverConfig::new(cli.digits)?;
    let bits = cfg.bits();
    let table = match cli.cmd {
        Cmd::Exact { n, k } => {
            let s = normalized_s(n, k)?;
            let mut t = Table::new(&["n", "k", "stirling2", "normalized"]);
            t.push(vec![
                n.to_string(),
                k.to_string(),
                stirling2_sieve(n, k).to_string(),
                sig(&Float::with_val(bits, &s)),
            ]);
            t
        }
        Cmd::Bell { n_max } => {
            let mut t = Table::new(&["n", "bell"]);
            for (n, b) in bell_numbers(n_max)?.iter().enumerate() {
                t.push(vec![n.to_string(), b.to_string()]);
            }
            t
        }
        Cmd::Approx { n, k, family, order, error_reduced } => {
            let mut method: Method = family.parse()?;
            if error_reduced {
                method = match method {
                    Method::Family { family, alpha: None, .. } => Method::reduced(family),
                    Method::Menon => Method::MenonReduced,
                    other => {
                        return Err(Error::Validation(format!("no error-reduced variant of {other}")));
                    }
                };
            }
            let r = evaluate(&method, n, k, order, &cfg)?;
            let mut t = Table::new(&["n", "k", "family", "order", "value", "error_estimate", "in_range"]);
            t.push(vec![
                n.to_string(),
                k.to_string(),
                r.method.to_string(),
                r.order.to_string(),
                sig(&r.value),
                sig(&r.leading_error_estimate),
                r.in_validity_range.to_string(),
            ]);
            t
        }
        Cmd::Compare { n, families, orders, k_min, k_max, k_step } => {
            let k_select = match (k_min, k_max) {
                (None, None) if k_step == 1 => KSelect::All,
                (lo, hi) => KSelect::Range { lo: lo.unwrap_or(1), hi: hi.unwrap_or(u32::MAX), step: k_step },
            };
            let rc = RunConfig {
                digits: cli.digits,
                methods: parse_methods(&families)?,
                orders,
                ns: n,
                k_select,
                axis_offset: cli.axis_offset,
            };
            rows_table(&compare_run(&rc)?)
        }
        Cmd::Sweep { n, sd_window, families, orders } => {
            let rc = RunConfig {
                digits: cli.digits,
                methods: parse_methods(&families)?,
                orders,
                ns: vec![n],
                k_select: KSelect::SdWindow(sd_window),
                axis_offset: cli.axis_offset,
            };
            rows_table(&sweep_sd_axis(&rc)?)
        }
        Cmd::Moments { n, refined } => {
            let (row, bell) = block_distribution(n)?;
            let mean = row_moment(&row, &bell, 1, false);
            let var = row_moment(&row, &bell, 2, true);
            let (am, av) = mean_var_asympt(n.max(2), refined, &cfg)?;
            let mut t = Table::new(&["n", "mean", "variance", "approx_mean", "approx_variance"]);
            t.push(vec![
                n.to_string(),
                sig(&Float::with_val(bits, &mean)),
                sig(&Float::with_val(bits, &var)),
                sig(&am),
                sig(&av),
            ]);
            t
        }
        Cmd::Limits { n } => {
            let r = limit_checks(n, &cfg)?;
            let mut t = Table::new(&["n", "quantity", "x", "value"]);
            t.push(vec![n.to_string(), "sup_cdf_distance".into(), String::new(), sig(&r.sup_cdf_distance)]);
            t.push(vec![n.to_string(), "scaled_rate".into(), String::new(), sig(&r.scaled_rate)]);
            for (x, v) in &r.llt_ratios {
                t.push(vec![n.to_string(), "llt_ratio".into(), x.to_string(), sig(v)]);
            }
            t
        }
        Cmd::Lotto { k, s, approx } => {
            let r = lotto_threshold(k, s, !approx, &cfg)?;
            let mut t = Table::new(&["k", "s", "method", "threshold", "root"]);
            t.push(vec![
                k.to_string(),
                s.to_string(),
                if approx { "approx" } else { "exact" }.into(),
                r.threshold.to_string(),
                r.root.as_ref().map(sig).unwrap_or_default(),
            ]);
            t
        }
        Cmd::Saddle { n, k } => {
            let s = solve_saddle(n, k, &cfg)?;
            let mut t = Table::new(&["n", "k", "R", "V", "residual"]);
            t.push(vec![n.to_string(), k.to_string(), sig(&s.r), sig(&s.v), sig(&s.residual)]);
            t
        }
    };
    emit(&table, format, cli.out.as_deref())
}

fn parse_methods(list: &[String]) -> Result<Vec<MethodSpec>> {
    list.iter().filter(|s| !s.trim().is_empty()).map(|s| s.parse()).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

