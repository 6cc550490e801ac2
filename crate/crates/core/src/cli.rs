//! Command-line front end. Every command writes human-readable output to the
//! supplied writer and returns the process exit code.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::cache::{CachedSolve, QuadratureCache};
use crate::construct::{
    a_sequence, build, lower_bound, plan, planned_cardinality, BuildOptions, BuildPlan,
    SplitOverrides,
};
use crate::error::{Error, Result};
use crate::exact_moments::JacobiWeight;
use crate::formats::{
    design_to_csv, design_to_json, load_design, quadrature_to_json, write_atomic,
};
use crate::quadrature::{solve_equal_weight, SolverOptions, DEFAULT_QUAD_TOLERANCE};
use crate::verify::DEFAULT_DESIGN_TOLERANCE;
use crate::verify::{verify_auto, verify_gegenbauer, verify_monomials, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

pub const CACHE_ENV: &str = "DESIGNFORGE_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum VerifyMethod {
    /// Both criteria when feasible, otherwise the authoritative one.
    #[default]
    Auto,
    Monomial,
    Gegenbauer,
    Both,
}

#[derive(Debug, Parser)]
#[command(
    name = "designforge",
    version,
    about = "Spherical t-designs from equal-weight Jacobi quadratures"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Certification tolerance for equal-weight quadratures.
    #[arg(long = "tol-quad", global = true, default_value_t = DEFAULT_QUAD_TOLERANCE)]
    pub tol_quad: f64,
    /// Certification tolerance for designs.
    #[arg(long = "tol-design", global = true, default_value_t = DEFAULT_DESIGN_TOLERANCE)]
    pub tol_design: f64,
    #[arg(long = "max-k", global = true, default_value_t = SolverOptions::default().max_k)]
    pub max_k: usize,
    #[arg(long = "max-iter", global = true, default_value_t = SolverOptions::default().max_iterations)]
    pub max_iter: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Quadrature cache directory (overrides $DESIGNFORGE_CACHE).
    #[arg(long = "cache-dir", global = true, env = CACHE_ENV)]
    pub cache_dir: Option<PathBuf>,
    /// Disable the quadrature cache.
    #[arg(long = "no-cache", global = true)]
    pub no_cache: bool,
    /// Output format (designs default to json, tables to aligned text).
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// JSON file of split overrides: {"splits": {"<ambient dim>": [m, n]}}.
    #[arg(long, global = true)]
    pub plan: Option<PathBuf>,
    /// Rotation of the S^1 polygons, in radians.
    #[arg(
        long,
        global = true,
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub phase: f64,
    /// Also write raw IEEE-754 bit patterns.
    #[arg(long, global = true)]
    pub hex: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower bounds, predicted exponents and achieved sizes for S^n.
    Bounds {
        #[arg(short = 'n', long = "sphere")]
        sphere: usize,
        #[arg(long = "t-max")]
        t_max: u32,
        /// Build any design missing from the cache before tabulating.
        #[arg(long)]
        build: bool,
    },
    /// Solve (or load) an equal-weight quadrature for w_{m,n}.
    Quadrature {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(short = 't', long = "degree")]
        degree: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build and verify a design on S^n.
    Build {
        #[arg(short = 'n', long = "sphere")]
        sphere: usize,
        #[arg(short = 't', long = "degree")]
        degree: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Verify a design file (JSON or CSV).
    Verify {
        file: PathBuf,
        /// Degree to check (defaults to the file's degree; required for CSV).
        #[arg(short = 't', long = "degree")]
        degree: Option<u32>,
        /// Tolerance (defaults to --tol-design).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = VerifyMethod::Auto)]
        method: VerifyMethod,
    },
}

/// Resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub quad_tolerance: f64,
    pub design_tolerance: f64,
    pub max_k: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub phase: f64,
    pub hex: bool,
    pub splits: SplitOverrides,
}

impl Default for Config {
    fn default() -> Self {
        let solver = SolverOptions::default();
        Self {
            quad_tolerance: DEFAULT_QUAD_TOLERANCE,
            design_tolerance: DEFAULT_DESIGN_TOLERANCE,
            max_k: solver.max_k,
            max_iterations: solver.max_iterations,
            seed: solver.seed,
            cache_dir: None,
            format: None,
            phase: 0.0,
            hex: false,
            splits: SplitOverrides::new(),
        }
    }
}

#[derive(Debug, Deserialize)]
struct PlanOverrideFile {
    splits: std::collections::BTreeMap<String, (usize, usize)>,
}

fn read_plan_overrides(path: &Path) -> Result<SplitOverrides> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: PlanOverrideFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        source_name: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.splits
        .into_iter()
        .map(|(k, v)| {
            k.trim()
                .parse::<usize>()
                .map(|dim| (dim, v))
                .map_err(|_| Error::invalid(format!("split key {k:?} is not a dimension")))
        })
        .collect()
}

impl Config {
    pub fn from_args(args: &ConfigArgs) -> Result<Self> {
        let splits = match &args.plan {
            Some(p) => read_plan_overrides(p)?,
            None => SplitOverrides::new(),
        };
        let cache_dir = if args.no_cache {
            None
        } else {
            args.cache_dir.clone().or_else(default_cache_dir)
        };
        let config = Self {
            quad_tolerance: args.tol_quad,
            design_tolerance: args.tol_design,
            max_k: args.max_k,
            max_iterations: args.max_iter,
            seed: args.seed,
            cache_dir,
            format: args.format,
            phase: args.phase,
            hex: args.hex,
            splits,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.quad_tolerance > 0.0) || !(self.design_tolerance > 0.0) {
            return Err(Error::invalid("tolerances must be strictly positive"));
        }
        if self.max_k == 0 {
            return Err(Error::invalid("max_K must be >= 1"));
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tolerance: self.quad_tolerance,
            max_iterations: self.max_iterations,
            max_k: self.max_k,
            seed: self.seed,
            ..SolverOptions::default()
        }
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            design_tolerance: self.design_tolerance,
            phase: self.phase,
            allow_uncertified: false,
        }
    }

    pub fn cache(&self) -> Option<QuadratureCache> {
        self.cache_dir.as_ref().map(QuadratureCache::new)
    }

    fn source(&self) -> CachedSolve {
        CachedSolve {
            cache: self.cache(),
            options: self.solver_options(),
        }
    }
}

fn default_cache_dir() -> Option<PathBuf> {
    std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
        .map(|base| base.join("designforge"))
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

/// Parses `args` and runs the selected command. Results go to `out`,
/// diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_ERROR;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = Config::from_args(&cli.config).and_then(|config| match cli.command {
        Command::Bounds {
            sphere,
            t_max,
            build,
        } => cmd_bounds(sphere, t_max, build, &config, out),
        Command::Quadrature {
            m,
            n,
            degree,
            out: path,
        } => cmd_quadrature(m, n, degree, path.as_deref(), &config, out),
        Command::Build {
            sphere,
            degree,
            out: path,
            report,
        } => cmd_build(
            sphere,
            degree,
            path.as_deref(),
            report.as_deref(),
            &config,
            out,
        ),
        Command::Verify {
            file,
            degree,
            tol,
            method,
        } => cmd_verify(&file, degree, tol, method, &config, out),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub t: u32,
    pub lower_bound: String,
    pub a_n: Option<u64>,
    pub t_pow_a_n: Option<f64>,
    pub cardinality: Option<String>,
    /// `cardinality / t^(a_n)`.
    pub ratio: Option<f64>,
}

/// Rows of the bounds table for `t = 1..=t_max` (a single `t = 0` row when
/// `t_max = 0`).
pub fn bounds_rows(
    sphere: usize,
    t_max: u32,
    mut cardinality: impl FnMut(u32) -> Option<u128>,
) -> Vec<BoundsRow> {
    let a_n = (sphere >= 1).then(|| a_sequence(sphere as u64));
    let ts: Vec<u32> = if t_max == 0 {
        vec![0]
    } else {
        (1..=t_max).collect()
    };
    ts.into_iter()
        .map(|t| {
            let t_pow = a_n.map(|a| (t as f64).powf(a as f64));
            let card = cardinality(t);
            BoundsRow {
                t,
                lower_bound: lower_bound(sphere as u64, t as u64).to_string(),
                a_n,
                t_pow_a_n: t_pow,
                cardinality: card.map(|c| c.to_string()),
                ratio: match (card, t_pow) {
                    (Some(c), Some(p)) if p > 0.0 => Some(c as f64 / p),
                    _ => None,
                },
            }
        })
        .collect()
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: &[String]| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    out.push_str(&line(
        &header.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
    ));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref()
        .map_or_else(|| "-".to_string(), ToString::to_string)
}

pub fn cmd_bounds(
    sphere: usize,
    t_max: u32,
    build_missing: bool,
    config: &Config,
    out: &mut dyn Write,
) -> Result<i32> {
    let cache = config.cache();
    let mut all_ok = true;
    let mut cardinality = |t: u32| -> Option<u128> {
        let plan = plan(sphere, t, &config.splits).ok()?;
        let from_cache = |plan: &BuildPlan| {
            planned_cardinality(plan, |w| {
                cache
                    .as_ref()
                    .and_then(|c| c.lookup(w, t, config.quad_tolerance))
                    .map(|q| q.k())
            })
        };
        if let Some(c) = from_cache(&plan) {
            return Some(c);
        }
        if !build_missing {
            return None;
        }
        match build(&plan, &mut config.source(), &config.build_options()) {
            Ok((design, _)) => Some(design.len() as u128),
            Err(e) => {
                log::warn!("build of S^{sphere} at t={t} failed: {e}");
                all_ok = false;
                None
            }
        }
    };
    let rows = bounds_rows(sphere, t_max, &mut cardinality);
    match config.format {
        Some(OutputFormat::Json) => {
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&rows).expect("rows serialize")
            )
            .map_err(io_err)?;
        }
        Some(OutputFormat::Csv) => {
            writeln!(out, "t,lower_bound,a_n,t_pow_a_n,cardinality,ratio").map_err(io_err)?;
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.t,
                    r.lower_bound,
                    opt(&r.a_n),
                    opt(&r.t_pow_a_n),
                    opt(&r.cardinality),
                    opt(&r.ratio)
                )
                .map_err(io_err)?;
            }
        }
        None => write!(out, "{}", bounds_table(&rows)).map_err(io_err)?,
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_FAILED })
}

/// Aligned plain-text bounds table.
pub fn bounds_table(rows: &[BoundsRow]) -> String {
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.t.to_string(),
                r.lower_bound.clone(),
                opt(&r.a_n),
                r.t_pow_a_n.map_or("-".into(), |p| format!("{p:.0}")),
                opt(&r.cardinality),
                r.ratio.map_or("-".into(), |x| format!("{x:.4}")),
            ]
        })
        .collect();
    render_table(
        &["t", "lower", "a_n", "t^a_n", "size", "size/t^a_n"],
        &table,
    )
}

pub fn cmd_quadrature(
    m: u32,
    n: u32,
    degree: u32,
    path: Option<&Path>,
    config: &Config,
    out: &mut dyn Write,
) -> Result<i32> {
    let w = JacobiWeight::new(m, n)?;
    let default_path = PathBuf::from(format!("quadrature_m{m}_n{n}_t{degree}.json"));
    let path = path.unwrap_or(&default_path);
    let cached = config
        .cache()
        .and_then(|c| c.lookup(w, degree, config.quad_tolerance));
    let (q, code) = match cached {
        Some(q) => (q, EXIT_OK),
        None => match solve_equal_weight(w, degree, &config.solver_options()) {
            Ok((q, _)) => {
                if let Some(cache) = config.cache() {
                    if let Err(e) = cache.store(&q) {
                        log::warn!("could not write quadrature cache: {e}");
                    }
                }
                (q, EXIT_OK)
            }
            Err(Error::NoConvergence {
                best: Some(best),
                best_residual,
                ..
            }) => {
                writeln!(
                    out,
                    "no certified rule within max_K={}; best residual {best_residual:e}",
                    config.max_k
                )
                .map_err(io_err)?;
                (*best, EXIT_FAILED)
            }
            Err(e) => return Err(e),
        },
    };
    write_atomic(path, &quadrature_to_json(&q, config.hex))?;
    writeln!(
        out,
        "m={m} n={n} t={degree} K={} max_abs_residual={:e} certified={} -> {}",
        q.k(),
        q.max_abs_residual(),
        q.is_certified(),
        path.display()
    )
    .map_err(io_err)?;
    Ok(code)
}

pub fn cmd_build(
    sphere: usize,
    degree: u32,
    path: Option<&Path>,
    report_path: Option<&Path>,
    config: &Config,
    out: &mut dyn Write,
) -> Result<i32> {
    let format = config.format.unwrap_or_default();
    let ext = match format {
        OutputFormat::Json => "json",
        OutputFormat::Csv => "csv",
    };
    let default_path = PathBuf::from(format!("design_S{sphere}_t{degree}.{ext}"));
    let path = path.unwrap_or(&default_path);
    let default_report = PathBuf::from(format!("design_S{sphere}_t{degree}.report.json"));
    let report_path = report_path.unwrap_or(&default_report);

    let plan = plan(sphere, degree, &config.splits)?;
    let (design, report, code) = match build(&plan, &mut config.source(), &config.build_options()) {
        Ok((d, r)) => (Some(d), r, EXIT_OK),
        Err(Error::BuildFailed {
            node,
            residual,
            report: Some(report),
            ..
        }) => {
            writeln!(out, "build failed at {node}: residual {residual:e}").map_err(io_err)?;
            (None, *report, EXIT_FAILED)
        }
        Err(e) => return Err(e),
    };
    let mut report_text = serde_json::to_string_pretty(&report).expect("report serializes");
    report_text.push('\n');
    write_atomic(report_path, &report_text)?;
    if let Some(design) = &design {
        let text = match format {
            OutputFormat::Json => design_to_json(design, config.hex),
            OutputFormat::Csv => design_to_csv(design),
        };
        write_atomic(path, &text)?;
        writeln!(
            out,
            "S^{sphere} t={degree} plan={} points={} residual={:e} -> {}",
            report.plan,
            design.len(),
            report.root.verification_residual,
            path.display()
        )
        .map_err(io_err)?;
    }
    Ok(code)
}

pub fn cmd_verify(
    file: &Path,
    degree: Option<u32>,
    tol: Option<f64>,
    method: VerifyMethod,
    config: &Config,
    out: &mut dyn Write,
) -> Result<i32> {
    let design = load_design(file, degree)?;
    let t = design.degree();
    let tol = tol.unwrap_or(config.design_tolerance);
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be strictly positive"));
    }
    let reports: Vec<VerificationReport> = match method {
        VerifyMethod::Auto => verify_auto(&design, t, tol),
        VerifyMethod::Monomial => vec![verify_monomials(&design, t, tol)],
        VerifyMethod::Gegenbauer => vec![verify_gegenbauer(&design, t, tol)?],
        VerifyMethod::Both => vec![
            verify_monomials(&design, t, tol),
            verify_gegenbauer(&design, t, tol)?,
        ],
    };
    let passed = reports.iter().all(|r| r.passed);
    match config.format.unwrap_or_default() {
        OutputFormat::Json => {
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&reports).expect("reports serialize")
            )
            .map_err(io_err)?;
        }
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        format!("{:?}", r.method).to_lowercase(),
                        r.degree_checked.to_string(),
                        format!("{:e}", r.max_abs_residual),
                        format!("{:e}", r.tolerance),
                        if r.passed { "pass" } else { "FAIL" }.to_string(),
                    ]
                })
                .collect();
            write!(
                out,
                "{}",
                render_table(&["method", "degree", "residual", "tol", "result"], &rows)
            )
            .map_err(io_err)?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}
