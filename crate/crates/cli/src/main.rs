// SPDX-License-Identifier: Apache-2.0

//! `toricorr`: verification and search workflows for torus correlations.
//!
//! Exit status: 0 when every asserted check passes, 1 on a mathematical
//! disagreement, 2 on configuration or usage errors.

mod emit;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use toricorr::analysis::{
    expectation_scan, field_descriptors, nonvanishing_search, run_identity_suite, theorem2_verify, verify_theorem1,
    AlphaRule, Check, FieldSpec, Report, RunConfig, URule,
};
use toricorr::legendre::{legendre_mod_p, legendre_poly};
use toricorr::report::{bracket, Summary};
use toricorr::FieldCtx;

use emit::{render, write_out, Format};

#[derive(Parser)]
#[command(name = "toricorr", version, about = "Torus correlations of PGL2(F_q) representations and Legendre polynomials mod p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare correlations mod p with s*t and P_r(u/sqrt(alpha))^2.
    VerifyTheorem1 {
        #[command(flatten)]
        common: Common,
        /// Also compute the characteristic-zero value (fields with q <= 13).
        #[arg(long)]
        char0: bool,
    },
    /// Search for u with every in-scope correlation nonzero mod p.
    Search {
        #[command(flatten)]
        common: Common,
    },
    /// Run the identity suite.
    Identities {
        #[command(flatten)]
        common: Common,
    },
    /// Dump Legendre polynomials, their reductions and factor shapes.
    Legendre {
        #[command(flatten)]
        common: Common,
        /// Largest index to dump.
        #[arg(long, default_value_t = 10)]
        r_max: u64,
    },
    /// Run the identity suite; with --out DIR, write report.json plus one CSV per check.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Odd prime(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Vec<u64>,
    /// Extension degree applied to every --p.
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Non-square alpha: an element code, a comma-separated list, `all` or `least`.
    #[arg(long)]
    alpha: Option<String>,
    /// Element code(s) of u, or `all`.
    #[arg(long)]
    u: Option<String>,
    /// Restrict to named checks (repeatable).
    #[arg(long = "check")]
    checks: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Output file (directory for `report`); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    max_q: Option<u64>,
    /// JSON run configuration; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Usage or configuration problem (exit 2).
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parse_codes(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| usage(format!("not an element code: {t}"))))
        .collect()
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(|e| usage(format!("{e:#}")))?;
                serde_json::from_str(&text).map_err(|e| usage(format!("bad config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if !self.p.is_empty() {
            cfg.fields = self.p.iter().map(|&p| FieldSpec { p, m: self.m }).collect();
        }
        if let Some(a) = &self.alpha {
            cfg.alpha = match a.as_str() {
                "all" => AlphaRule::All,
                "least" => AlphaRule::Least,
                s => AlphaRule::List(parse_codes(s)?),
            };
        }
        if let Some(u) = &self.u {
            cfg.u = match u.as_str() {
                "all" => URule::All,
                s => URule::List(parse_codes(s)?),
            };
        }
        if !self.checks.is_empty() {
            cfg.checks = self
                .checks
                .iter()
                .map(|c| {
                    Check::parse(c).ok_or_else(|| {
                        let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
                        usage(format!("unknown check {c}; expected one of {}", names.join(", ")))
                    })
                })
                .collect::<Result<_>>()?;
        }
        if let Some(n) = self.max_q {
            cfg.max_q = n;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        Ok(cfg)
    }
}

fn emit<R: Serialize>(report: &Report<R>, common: &Common) -> Result<bool> {
    write_out(&render(report, common.format)?, common.out.as_deref())?;
    let s = report.summary;
    eprintln!("{} rows: {} passed, {} failed, {} exploratory", s.total, s.passed, s.failed, s.exploratory);
    Ok(s.pass)
}

#[derive(Debug, Serialize)]
struct SearchRow {
    p: u64,
    m: u32,
    alpha: String,
    witness: Option<String>,
    witnesses: String,
    routes_agree: bool,
    all_units: Option<bool>,
    nonresidue_count: Option<u64>,
    folded_degree_bound: Option<u64>,
    /// Prime-field verdict from the expectation scan.
    expectation: Option<bool>,
    exploratory: bool,
    pass: bool,
}

fn cmd_search(common: &Common) -> Result<bool> {
    let cfg = common.config()?;
    let mut rows = Vec::new();
    for f in &cfg.fields {
        let ctx = FieldCtx::build(f.p, f.m)?;
        for a in cfg.alphas(&ctx)? {
            let row = if f.m >= 2 {
                let t = theorem2_verify(&ctx, a)?;
                SearchRow {
                    p: f.p,
                    m: f.m,
                    alpha: t.search.alpha.clone(),
                    witness: t.search.witness.as_ref().map(|w| w.u.clone()),
                    witnesses: bracket(&t.search.naive_witnesses),
                    routes_agree: t.search.routes_agree,
                    all_units: Some(t.all_units),
                    nonresidue_count: Some(t.nonresidue_count),
                    folded_degree_bound: Some(t.folded_degree_bound),
                    expectation: None,
                    exploratory: false,
                    pass: t.pass,
                }
            } else {
                let s = nonvanishing_search(&ctx, a)?;
                let e = expectation_scan(&ctx)?;
                SearchRow {
                    p: f.p,
                    m: f.m,
                    alpha: s.alpha.clone(),
                    witness: s.witness.as_ref().map(|w| w.u.clone()),
                    witnesses: bracket(&s.naive_witnesses),
                    routes_agree: s.routes_agree,
                    all_units: None,
                    nonresidue_count: None,
                    folded_degree_bound: None,
                    expectation: Some(e.verdict),
                    exploratory: true,
                    pass: !s.exhausted,
                }
            };
            rows.push(row);
        }
    }
    let summary = Summary::from_flags(rows.iter().map(|r| (r.pass, r.exploratory)));
    emit(&Report { field_ctx: field_descriptors(&cfg)?, config: cfg, rows, summary }, common)
}

#[derive(Debug, Serialize)]
struct LegendreRow {
    r: u64,
    exact: String,
    p: Option<u64>,
    modp: Option<String>,
    factor_shape: Option<String>,
}

fn cmd_legendre(common: &Common, r_max: u64) -> Result<bool> {
    let cfg = common.config()?;
    let primes: Vec<u64> = if common.p.is_empty() && common.config.is_none() {
        Vec::new()
    } else {
        let mut v: Vec<u64> = cfg.fields.iter().map(|f| f.p).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut rows = Vec::new();
    for r in 0..=r_max {
        let exact = legendre_poly(r).to_string();
        if primes.is_empty() {
            rows.push(LegendreRow { r, exact, p: None, modp: None, factor_shape: None });
            continue;
        }
        for &p in &primes {
            let ctx = FieldCtx::build(p, 1)?;
            let f = legendre_mod_p(r, &ctx);
            let shape = f.factor_shape(&ctx).ok().map(|s| {
                bracket(s.entries.iter().map(|e| format!("{}^{}x{}", e.degree, e.multiplicity, e.count)))
            });
            rows.push(LegendreRow {
                r,
                exact: exact.clone(),
                p: Some(p),
                modp: Some(bracket(f.to_strings(&ctx))),
                factor_shape: shape,
            });
        }
    }
    let summary = Summary::from_flags(rows.iter().map(|_| (true, false)));
    emit(&Report { field_ctx: field_descriptors(&cfg)?, config: cfg, rows, summary }, common)
}

fn cmd_report(common: &Common) -> Result<bool> {
    let cfg = common.config()?;
    let report = run_identity_suite(&cfg)?;
    let Some(dir) = &common.out else {
        return emit(&report, &Common { format: Format::Json, ..common.clone() });
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_out(&render(&report, Format::Json)?, Some(&dir.join("report.json")))?;
    for check in Check::ALL {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.check == check.name()).collect();
        if !rows.is_empty() {
            write_out(&emit::csv_table(&rows)?, Some(&dir.join(format!("{}.csv", check.name()))))?;
        }
    }
    let s = report.summary;
    eprintln!("{} rows: {} passed, {} failed, {} exploratory", s.total, s.passed, s.failed, s.exploratory);
    Ok(s.pass)
}

fn run(cli: Cli) -> Result<bool> {
    let common = match &cli.command {
        Command::VerifyTheorem1 { common, .. }
        | Command::Search { common }
        | Command::Identities { common }
        | Command::Legendre { common, .. }
        | Command::Report { common } => common,
    };
    let threads = match &common.config {
        Some(_) => common.config()?.threads,
        None => common.threads,
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))?;
    }
    match &cli.command {
        Command::VerifyTheorem1 { common, char0 } => emit(&verify_theorem1(&common.config()?, *char0)?, common),
        Command::Search { common } => cmd_search(common),
        Command::Identities { common } => emit(&run_identity_suite(&common.config()?)?, common),
        Command::Legendre { common, r_max } => cmd_legendre(common, *r_max),
        Command::Report { common } => cmd_report(common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
