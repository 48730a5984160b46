//! `kpot`: command-line front end for the `hankel-potentials` library.
//!
//! Tabulates the radial semigroup kernels and potential operators of the
//! `(n, gamma)` framework, runs the built-in verification suite, sweeps the
//! wavelet-style potential inversion, and inspects wavelet design measures.
//!
//! Tabular output (CSV or JSON) is deterministic: identical invocations
//! produce byte-identical bytes. Exit codes: `0` success / all checks pass,
//! `1` check failure or numerical breakdown, `2` usage or parameter error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hankel_potentials::{
    bessel_kernel_profile, c_constant, design_measure, geometric_grid, inversion_sweep,
    kernel_profile, measure_laplace, potential_apply_spectral, run_full_suite, CheckResult, Error,
    FrameworkParams, PotentialKind, QuadratureConfig, RadialProfile, Result, SemigroupKind,
    VerifyOptions, WaveletMeasure,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "kpot",
    version,
    about = "Radial Hankel-type semigroups, potential operators, and their wavelet inversion",
    arg_required_else_help = true
)]
struct Cli {
    /// Dimension-like integer parameter (>= 1).
    #[arg(long, global = true, default_value_t = 2)]
    n: u32,

    /// Weight exponent (>= 0); the transform order is nu = n + 2 gamma - 2.
    #[arg(long, global = true, default_value_t = 0.5, allow_negative_numbers = true)]
    gamma: f64,

    /// Loosen verification gates and quadrature budgets (default: each
    /// check's built-in gate; values below a gate leave it unchanged).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Largest grid radius.
    #[arg(long, global = true, default_value_t = 20.0)]
    rmax: f64,

    /// Number of grid points (>= 16).
    #[arg(long, global = true, default_value_t = 48)]
    points: usize,

    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write tabular output to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full self-verification suite: one line per check, no early
    /// abort. Exits 0 only if every check passes.
    Verify,

    /// Tabulate a semigroup kernel, or the bessel-G potential kernel.
    Kernel {
        #[arg(value_enum)]
        kind: KernelKind,
        /// Semigroup time (required by heat, poisson, beta).
        #[arg(long)]
        t: Option<f64>,
        /// Stable order of the beta kind (beta > 2 loses positivity).
        #[arg(long)]
        beta: Option<f64>,
        /// Order of the bessel-g kernel (required by bessel-g only).
        #[arg(long)]
        alpha: Option<f64>,
    },

    /// Apply a potential operator to f(r) = e^{-r} and tabulate the result.
    Potential {
        #[arg(value_enum)]
        kind: PotentialName,
        /// Potential order.
        #[arg(long)]
        alpha: f64,
        /// Second order of the bi-parametric kind.
        #[arg(long)]
        beta: Option<f64>,
    },

    /// Invert a potential of f(r) = e^{-r} with truncated wavelet
    /// transforms, sweeping the truncation point downward.
    Invert {
        #[arg(value_enum)]
        kind: PotentialName,
        /// Potential order.
        #[arg(long)]
        alpha: f64,
        /// Second order of the bi-parametric kind; for the riesz kind this
        /// picks the subordinating wavelet family order (default 2).
        #[arg(long)]
        beta: Option<f64>,
        /// Vanishing moments of the binomial design measure beyond the
        /// zeroth.
        #[arg(long, default_value_t = 1)]
        moments: usize,
        /// Truncation points, largest to smallest.
        #[arg(
            long,
            value_delimiter = ',',
            default_values_t = vec![1.0, 0.5, 0.25, 0.125, 0.0625]
        )]
        eps: Vec<f64>,
        /// Convergence target as a fraction of sup |f|.
        #[arg(long, default_value_t = 0.25)]
        target: f64,
    },

    /// Print a binomial design measure: atoms, certified moment residuals,
    /// Laplace symbol, and the normalizations C(theta) it supports.
    Measure {
        /// Vanishing moments beyond the zeroth.
        #[arg(long, default_value_t = 1)]
        moments: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelKind {
    Heat,
    Poisson,
    Beta,
    BesselG,
}

impl KernelKind {
    fn name(self) -> &'static str {
        match self {
            KernelKind::Heat => "heat",
            KernelKind::Poisson => "poisson",
            KernelKind::Beta => "beta",
            KernelKind::BesselG => "bessel-g",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PotentialName {
    Riesz,
    Bessel,
    Flett,
    Biparam,
}

impl PotentialName {
    fn name(self) -> &'static str {
        match self {
            PotentialName::Riesz => "riesz",
            PotentialName::Bessel => "bessel",
            PotentialName::Flett => "flett",
            PotentialName::Biparam => "biparam",
        }
    }
}

/// Validated run configuration shared by every subcommand.
#[derive(Serialize)]
struct RunConfig {
    n: u32,
    gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    rmax: f64,
    points: usize,
    output_format: Format,
    #[serde(skip)]
    output_path: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) | Error::Precondition(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = make_config(&cli)?;
    let params = FrameworkParams::new(cfg.n, cfg.gamma)?;
    match cli.command {
        Command::Verify => cmd_verify(&cfg, &params),
        Command::Kernel {
            kind,
            t,
            beta,
            alpha,
        } => cmd_kernel(&cfg, &params, kind, t, beta, alpha),
        Command::Potential { kind, alpha, beta } => {
            cmd_potential(&cfg, &params, kind, alpha, beta)
        }
        Command::Invert {
            kind,
            alpha,
            beta,
            moments,
            eps,
            target,
        } => cmd_invert(&cfg, &params, kind, alpha, beta, moments, &eps, target),
        Command::Measure { moments } => cmd_measure(&cfg, moments),
    }
}

fn make_config(cli: &Cli) -> Result<RunConfig> {
    if cli.points < 16 {
        return Err(Error::Domain(format!(
            "--points must be at least 16, got {}",
            cli.points
        )));
    }
    if !(cli.rmax.is_finite() && cli.rmax > 0.0) {
        return Err(Error::Domain(format!(
            "--rmax must be finite and > 0, got {}",
            cli.rmax
        )));
    }
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Domain(format!(
                "--tol must be finite and > 0, got {t}"
            )));
        }
    }
    Ok(RunConfig {
        n: cli.n,
        gamma: cli.gamma,
        tol: cli.tol,
        rmax: cli.rmax,
        points: cli.points,
        output_format: cli.format,
        output_path: cli.out.clone(),
    })
}

/// Quadrature tolerance: `--tol / 100` (clamped to a sane window) when the
/// user loosened the run, never tighter than the command's calibrated base.
fn quad_for(cfg: &RunConfig, base: f64) -> QuadratureConfig {
    let tol = cfg
        .tol
        .map(|t| (t / 100.0).clamp(1e-12, 1e-4).max(base))
        .unwrap_or(base);
    QuadratureConfig::default().with_tolerance(tol, tol)
}

/// Tabulation grid: the origin plus a geometric ladder up to `rmax`.
fn radial_grid(cfg: &RunConfig) -> Vec<f64> {
    let mut grid = vec![0.0];
    grid.extend(geometric_grid(cfg.points - 1, cfg.rmax * 1e-3, cfg.rmax));
    grid
}

// --------------------------------------------------------------- subcommands

fn cmd_verify(cfg: &RunConfig, params: &FrameworkParams) -> Result<ExitCode> {
    let results = run_full_suite(params, &VerifyOptions { tol: cfg.tol });
    let mut all_pass = true;
    println!(
        "{:<28} {:<6} {:>12} {:>10} {:>9}  detail",
        "check", "status", "max dev", "gate", "time"
    );
    for r in &results {
        all_pass &= r.pass;
        println!(
            "{:<28} {:<6} {:>12.3e} {:>10.1e} {:>8.2}s  {}",
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            r.max_dev,
            r.gate,
            r.seconds,
            r.detail
        );
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!("{} checks: {} passed, {} failed", results.len(), passed, results.len() - passed);
    if let Some(path) = &cfg.output_path {
        let body = match cfg.output_format {
            Format::Csv => verify_csv(&results),
            Format::Json => {
                let doc = serde_json::json!({
                    "command": "verify",
                    "config": cfg,
                    "checks": results,
                    "all_pass": all_pass,
                });
                pretty_json(&doc)
            }
        };
        write_out(path, &body)?;
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verify_csv(results: &[CheckResult]) -> String {
    let mut s = String::from("check,pass,max_dev,gate,seconds\n");
    for r in results {
        writeln!(
            s,
            "{},{},{},{},{}",
            r.name,
            r.pass,
            fmt_float(r.max_dev),
            fmt_float(r.gate),
            fmt_float(r.seconds)
        )
        .unwrap();
    }
    s
}

fn cmd_kernel(
    cfg: &RunConfig,
    params: &FrameworkParams,
    kind: KernelKind,
    t: Option<f64>,
    beta: Option<f64>,
    alpha: Option<f64>,
) -> Result<ExitCode> {
    let quad = quad_for(cfg, 1e-10);
    let mut meta = base_meta(cfg, params, "kernel", kind.name());
    let profile = match kind {
        KernelKind::Heat | KernelKind::Poisson | KernelKind::Beta => {
            let t = t.ok_or_else(|| {
                Error::Domain(format!("kernel kind '{}' needs --t", kind.name()))
            })?;
            let sg = match kind {
                KernelKind::Heat => SemigroupKind::Heat,
                KernelKind::Poisson => SemigroupKind::Poisson,
                KernelKind::Beta => SemigroupKind::Beta(
                    beta.ok_or_else(|| Error::Domain("kernel kind 'beta' needs --beta".into()))?,
                ),
                KernelKind::BesselG => unreachable!(),
            };
            meta.push(("t".into(), fmt_plain(t)));
            if let SemigroupKind::Beta(beta) = sg {
                meta.push(("beta".into(), fmt_plain(beta)));
            }
            kernel_profile(sg, t, params, &quad)?
        }
        KernelKind::BesselG => {
            let alpha = alpha
                .ok_or_else(|| Error::Domain("kernel kind 'bessel-g' needs --alpha".into()))?;
            meta.push(("alpha".into(), fmt_plain(alpha)));
            bessel_kernel_profile(alpha, params, &quad)?
        }
    };
    let grid = radial_grid(cfg);
    let values = profile.values_on(&grid);
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .zip(&values)
        .map(|(&r, &v)| vec![r, v])
        .collect();
    emit_table(cfg, "kernel", meta, &["r", "kernel"], &rows)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_potential(
    cfg: &RunConfig,
    params: &FrameworkParams,
    kind: PotentialName,
    alpha: f64,
    beta: Option<f64>,
) -> Result<ExitCode> {
    let pot = make_potential(kind, alpha, beta)?;
    let quad = quad_for(cfg, 1e-10);
    let f = RadialProfile::unit_exponential();
    let out = potential_apply_spectral(pot, &f, params, &quad)?;
    let mut meta = base_meta(cfg, params, "potential", kind.name());
    meta.push(("alpha".into(), fmt_plain(alpha)));
    if let PotentialKind::Biparam { beta, .. } = pot {
        meta.push(("beta".into(), fmt_plain(beta)));
    }
    meta.push(("f".into(), "exp(-r)".into()));
    let grid = radial_grid(cfg);
    let values = out.values_on(&grid);
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .zip(&values)
        .map(|(&r, &v)| vec![r, v])
        .collect();
    emit_table(cfg, "potential", meta, &["r", "potential"], &rows)?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_invert(
    cfg: &RunConfig,
    params: &FrameworkParams,
    kind: PotentialName,
    alpha: f64,
    beta: Option<f64>,
    moments: usize,
    eps: &[f64],
    target: f64,
) -> Result<ExitCode> {
    let pot = make_potential(kind, alpha, beta)?;
    let mu = design_measure(moments)?;
    let riesz_order = beta.unwrap_or(2.0);
    let f = RadialProfile::unit_exponential();
    let grid = geometric_grid(cfg.points, cfg.rmax * 5e-4, cfg.rmax);
    let quad = quad_for(cfg, 1e-9);
    let report = inversion_sweep(pot, riesz_order, &f, &mu, eps, target, &grid, params, &quad)?;

    match cfg.output_format {
        Format::Csv => {
            let mut meta = base_meta(cfg, params, "invert", kind.name());
            meta.push(("alpha".into(), fmt_plain(alpha)));
            if let Some(b) = beta {
                meta.push(("beta".into(), fmt_plain(b)));
            }
            meta.push(("moments".into(), moments.to_string()));
            meta.push(("measure_atoms".into(), atoms_string(&mu)));
            meta.push(("laplace_symbol".into(), symbol_string(&mu)));
            meta.push(("c_constant".into(), fmt_plain(report.c_constant)));
            meta.push(("target".into(), fmt_plain(target)));
            meta.push(("converged".into(), report.converged.to_string()));
            meta.push((
                "grid".into(),
                format!(
                    "geometric, {} points in [{}, {}]",
                    cfg.points,
                    fmt_plain(cfg.rmax * 5e-4),
                    fmt_plain(cfg.rmax)
                ),
            ));
            let rows: Vec<Vec<f64>> = report
                .epsilons
                .iter()
                .zip(&report.sup_errors)
                .map(|(&e, &s)| vec![e, s])
                .collect();
            emit_table(cfg, "invert", meta, &["eps", "sup_error"], &rows)?;
        }
        Format::Json => {
            let doc = serde_json::json!({
                "command": "invert",
                "config": cfg,
                "report": report,
            });
            emit_body(cfg, &pretty_json(&doc))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_measure(cfg: &RunConfig, moments: usize) -> Result<ExitCode> {
    let mu = design_measure(moments)?;
    let quad = QuadratureConfig::default().with_tolerance(1e-11, 1e-11);
    let mut s = String::new();
    writeln!(
        s,
        "binomial design measure: moments 0..={moments} vanish, {} atoms",
        mu.atoms().len()
    )
    .unwrap();
    writeln!(s, "atoms (location, weight):").unwrap();
    for &(loc, w) in mu.atoms() {
        writeln!(s, "  ({}, {})", fmt_plain(loc), fmt_plain(w)).unwrap();
    }
    writeln!(s, "total variation = {}", fmt_plain(mu.total_variation())).unwrap();
    writeln!(s, "moment residuals:").unwrap();
    for i in 0..=moments {
        let residual: f64 = mu
            .atoms()
            .iter()
            .map(|&(loc, w)| w * loc.powi(i as i32))
            .sum();
        writeln!(s, "  order {i}: {residual:e}").unwrap();
    }
    writeln!(s, "laplace symbol: mu~(t) = {}", symbol_string(&mu)).unwrap();
    writeln!(
        s,
        "  mu~(1) = {} (direct sum {})",
        fmt_plain(measure_laplace(&mu, 1.0)),
        fmt_plain(
            mu.atoms()
                .iter()
                .map(|&(loc, w)| w * (-loc).exp())
                .sum::<f64>()
        )
    )
    .unwrap();
    writeln!(s, "normalizations:").unwrap();
    for theta in [0.5, 1.0, 1.5] {
        match c_constant(theta, &mu, &quad) {
            Ok(c) => writeln!(s, "  C({theta}) = {}", fmt_plain(c)).unwrap(),
            Err(e) => writeln!(s, "  C({theta}) rejected: {e}").unwrap(),
        }
    }
    emit_body(cfg, &s)?;
    Ok(ExitCode::SUCCESS)
}

// ------------------------------------------------------------------- output

fn make_potential(name: PotentialName, alpha: f64, beta: Option<f64>) -> Result<PotentialKind> {
    Ok(match name {
        PotentialName::Riesz => PotentialKind::Riesz { alpha },
        PotentialName::Bessel => PotentialKind::Bessel { alpha },
        PotentialName::Flett => PotentialKind::Flett { alpha },
        PotentialName::Biparam => PotentialKind::Biparam {
            alpha,
            beta: beta
                .ok_or_else(|| Error::Domain("potential kind 'biparam' needs --beta".into()))?,
        },
    })
}

fn base_meta(
    cfg: &RunConfig,
    params: &FrameworkParams,
    command: &str,
    kind: &str,
) -> Vec<(String, String)> {
    let mut meta = vec![
        ("command".into(), command.to_string()),
        ("kind".into(), kind.to_string()),
        ("n".into(), cfg.n.to_string()),
        ("gamma".into(), fmt_plain(cfg.gamma)),
        ("nu".into(), fmt_plain(params.transform_order())),
    ];
    if let Some(t) = cfg.tol {
        meta.push(("tol".into(), fmt_plain(t)));
    }
    meta.push(("rmax".into(), fmt_plain(cfg.rmax)));
    meta.push(("points".into(), cfg.points.to_string()));
    meta
}

fn atoms_string(mu: &WaveletMeasure) -> String {
    mu.atoms()
        .iter()
        .map(|&(loc, w)| format!("({}, {})", fmt_plain(loc), fmt_plain(w)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn symbol_string(mu: &WaveletMeasure) -> String {
    format!("(1 - exp(-t))^{}", mu.certified_moments() + 1)
}

/// Scientific notation for data cells: deterministic and round-trippable.
fn fmt_float(v: f64) -> String {
    format!("{v:e}")
}

/// Plain `Display` for metadata values (shortest exact decimal).
fn fmt_plain(v: f64) -> String {
    format!("{v}")
}

fn emit_table(
    cfg: &RunConfig,
    command: &str,
    meta: Vec<(String, String)>,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    let body = match cfg.output_format {
        Format::Csv => {
            let mut s = String::new();
            for (k, v) in &meta {
                writeln!(s, "# {k} = {v}").unwrap();
            }
            writeln!(s, "{}", columns.join(",")).unwrap();
            for row in rows {
                let cells: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
                writeln!(s, "{}", cells.join(",")).unwrap();
            }
            s
        }
        Format::Json => {
            let meta_obj: serde_json::Map<String, serde_json::Value> = meta
                .into_iter()
                .map(|(k, v)| (k, serde_json::Value::String(v)))
                .collect();
            let doc = serde_json::json!({
                "command": command,
                "config": cfg,
                "meta": meta_obj,
                "columns": columns,
                "rows": rows,
            });
            pretty_json(&doc)
        }
    };
    emit_body(cfg, &body)
}

fn emit_body(cfg: &RunConfig, body: &str) -> Result<()> {
    match &cfg.output_path {
        Some(path) => write_out(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn write_out(path: &PathBuf, body: &str) -> Result<()> {
    std::fs::write(path, body)
        .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
}

fn pretty_json(doc: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("json serialization cannot fail");
    s.push('\n');
    s
}
