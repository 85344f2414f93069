//! Subcommand orchestration: resolve configuration, fan the computation out
//! over the grids (parallel over theta / pixels, order-preserving), and emit
//! deterministic CSV/SVG/PGM artifacts.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use quench_core::correlators::{thermo_gap, tpcf_gcs, tpcf_mmgs, tpcf_thermo};
use quench_core::glauber::{
    f_integrand_profile, fourier_autocorr_exact, fourier_autocorr_stirling, g_of_x,
    TruncationSpec, XGrid,
};
use quench_core::loschmidt::{autocorr_genfun, free_energy, FreeEnergyCurve};
use quench_core::phasespace::{circle_section, distribution_grid, husimi_norm_check, GridSpec};
use quench_core::special::poisson_tail_bound;
use quench_core::states::{Boundary, BoseHubbardModel, GcsState, MmgsState, TimeGrid};

use crate::config::{
    parse_complex_list, parse_f64_list, resolve_out, ConfigError, ConfigResult, FileConfig,
    ResolvedEcho,
};
use crate::oracle::{deep_lattice_autocorr_oracle_guarded, sector_autocorr, MmgsCrossCorr};
use crate::output::{complex_cells, write_csv, write_pgm, write_svg_lines, Cell, SvgSeries};

/// Errors mapped onto process exit codes:
/// 0 success, 1 internal/IO/check failure, 2 configuration, 3 numeric guard.
#[derive(Debug)]
pub enum AppError {
    Config(ConfigError),
    Guard(quench_core::Error),
    Io(std::io::Error),
    CheckFailed(usize),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Guard(e) => match e {
                quench_core::Error::DimensionGuard { .. }
                | quench_core::Error::TailTolerance { .. }
                | quench_core::Error::Aliasing { .. }
                | quench_core::Error::Overflow => 3,
                quench_core::Error::InvalidInput(_) => 2,
            },
            AppError::Io(_) => 1,
            AppError::CheckFailed(_) => 1,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(e) => write!(f, "configuration error: {e}"),
            AppError::Guard(e) => write!(f, "{e}"),
            AppError::Io(e) => write!(f, "io error: {e}"),
            AppError::CheckFailed(n) => write!(f, "{n} oracle check(s) failed"),
        }
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Config(e)
    }
}

impl From<quench_core::Error> for AppError {
    fn from(e: quench_core::Error) -> Self {
        AppError::Guard(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "quench",
    about = "Quench-dynamics observables of interacting bosons in deep lattices",
    version
)]
pub struct Cli {
    /// Flat key=value config file; command-line flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Two-point correlators for either state family, or the finite-size
    /// gap to the thermodynamic limit.
    Tpcf(TpcfArgs),
    /// Dynamical free-energy density of a GCS (generating-function path).
    LoschmidtGcs(LoschmidtGcsArgs),
    /// Dynamical free-energy density of an MMGS (factorized survival).
    LoschmidtGlauber(LoschmidtGlauberArgs),
    /// Fourier/projection reconstruction of the GCS autocorrelation from
    /// Glauber cross-correlations, compared against the reference path.
    Fourier(FourierArgs),
    /// Real/imaginary profile of the integrand F(x, theta) = e^{-2 pi i x S} G(x, theta).
    FxProfile(FxProfileArgs),
    /// Phase-space distribution grids, circle sections and the completeness
    /// norm check.
    Phasespace(PhasespaceArgs),
    /// Cross-implementation property suite at chosen sizes.
    OracleCheck(OracleCheckArgs),
}

#[derive(Args, Debug, Default)]
pub struct GridFlags {
    /// Single evaluation time theta = U t (mutually exclusive with the grid flags).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Grid start (default 0).
    #[arg(long)]
    pub theta_min: Option<f64>,
    /// Grid end (default 4 pi).
    #[arg(long)]
    pub theta_max: Option<f64>,
    /// Number of grid points (default 2000).
    #[arg(long)]
    pub theta_points: Option<usize>,
}

fn resolve_grid(flags: &GridFlags, file: &FileConfig, default_points: usize) -> ConfigResult<TimeGrid> {
    let single = flags.theta.or(file.get::<f64>("theta")?);
    let t_min = flags.theta_min.or(file.get::<f64>("theta-min")?);
    let t_max = flags.theta_max.or(file.get::<f64>("theta-max")?);
    let points = flags.theta_points.or(file.get::<usize>("theta-points")?);
    if single.is_some() && (t_min.is_some() || t_max.is_some() || points.is_some()) {
        return Err(ConfigError(
            "theta conflicts with theta-min/theta-max/theta-points".into(),
        ));
    }
    if let Some(t) = single {
        return TimeGrid::from_values(vec![t]).map_err(|e| ConfigError(e.to_string()));
    }
    let t_min = t_min.unwrap_or(0.0);
    let t_max = t_max.unwrap_or(4.0 * PI);
    let points = points.unwrap_or(default_points);
    TimeGrid::linspace(t_min, t_max, points).map_err(|e| ConfigError(e.to_string()))
}

fn echo_grid(echo: &mut ResolvedEcho, grid: &TimeGrid) {
    echo.push("theta-min", grid.values()[0]);
    echo.push("theta-max", grid.values()[grid.len() - 1]);
    echo.push("theta-points", grid.len());
}

fn load_file(config: &Option<PathBuf>) -> ConfigResult<FileConfig> {
    match config {
        Some(path) => FileConfig::load(path),
        None => Ok(FileConfig::empty()),
    }
}

fn pick<T>(flag: Option<T>, file: &FileConfig, key: &str) -> ConfigResult<Option<T>>
where
    T: std::str::FromStr,
    <T as std::str::FromStr>::Err: std::fmt::Display,
{
    match flag {
        Some(v) => {
            let _ = file.get::<String>(key); // mark consumed either way
            Ok(Some(v))
        }
        None => file.get::<T>(key),
    }
}


fn pick_string(flag: Option<String>, file: &FileConfig, key: &str) -> Option<String> {
    let from_file = file.get_string(key);
    flag.or(from_file)
}

fn pick_path(flag: Option<PathBuf>, file: &FileConfig, key: &str) -> Option<PathBuf> {
    let from_file = file.get_string(key).map(PathBuf::from);
    flag.or(from_file)
}

pub fn run(cli: Cli) -> Result<(), AppError> {
    let file = load_file(&cli.config)?;
    match cli.command {
        Command::Tpcf(args) => run_tpcf(args, &file),
        Command::LoschmidtGcs(args) => run_loschmidt_gcs(args, &file),
        Command::LoschmidtGlauber(args) => run_loschmidt_glauber(args, &file),
        Command::Fourier(args) => run_fourier(args, &file),
        Command::FxProfile(args) => run_fx_profile(args, &file),
        Command::Phasespace(args) => run_phasespace(args, &file),
        Command::OracleCheck(args) => run_oracle_check(args, &file),
    }
}

// ---------------------------------------------------------------- tpcf ----

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Gcs,
    Mmgs,
    Thermo,
}

#[derive(Args, Debug)]
pub struct TpcfArgs {
    /// Which correlator family to evaluate.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Particle number S (GCS family).
    #[arg(long)]
    pub s: Option<u32>,
    /// Mode count M for homogeneous states.
    #[arg(long)]
    pub m: Option<u32>,
    /// Filling factor lambda.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Explicit GCS amplitudes "re,im;re,im;..." (normalized internally).
    #[arg(long)]
    pub xi: Option<String>,
    /// Explicit MMGS amplitudes "re,im;re,im;...".
    #[arg(long)]
    pub alpha: Option<String>,
    /// First site index (0-based).
    #[arg(long)]
    pub site_i: Option<usize>,
    /// Second site index (0-based).
    #[arg(long)]
    pub site_j: Option<usize>,
    /// Finite-size-to-thermodynamic-limit gap sweep over S values.
    #[arg(long)]
    pub thermo_gap: bool,
    /// S values for the gap sweep, e.g. "50,100,200,400".
    #[arg(long)]
    pub s_list: Option<String>,
    #[command(flatten)]
    pub grid: GridFlags,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG line plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

fn run_tpcf(args: TpcfArgs, file: &FileConfig) -> Result<(), AppError> {
    let thermo_gap_mode = args.thermo_gap || file.get::<bool>("thermo-gap")?.unwrap_or(false);
    if thermo_gap_mode {
        return run_thermo_gap(args, file);
    }
    let family_key = file.get_string("family");
    let family = match args.family {
        Some(f) => f,
        None => match family_key.as_deref() {
            None => Family::Gcs,
            Some("gcs") => Family::Gcs,
            Some("mmgs") => Family::Mmgs,
            Some("thermo") => Family::Thermo,
            Some(other) => {
                return Err(ConfigError(format!("unknown family {other:?}")).into());
            }
        },
    };
    let grid = resolve_grid(&args.grid, file, 2000)?;
    let i = pick(args.site_i, file, "site-i")?.unwrap_or(0);
    let j = pick(args.site_j, file, "site-j")?.unwrap_or(1);
    let lambda = pick(args.lambda, file, "lambda")?;
    let s = pick(args.s, file, "s")?;
    let m = pick(args.m, file, "m")?;
    let xi_raw = pick_string(args.xi, file, "xi");
    let alpha_raw = pick_string(args.alpha, file, "alpha");
    let out = resolve_out(args.out, file.get_string("out"), "tpcf.csv");
    let svg = pick_path(args.svg, file, "svg");
    file.finish()?;

    let mut echo = ResolvedEcho::new("tpcf");
    echo_grid(&mut echo, &grid);
    echo.push("site-i", i);
    echo.push("site-j", j);

    let values: Vec<Complex64> = match family {
        Family::Gcs => {
            let s = s.ok_or_else(|| ConfigError("gcs family needs --s".into()))?;
            let state = match (m, &xi_raw) {
                (Some(_), Some(_)) => {
                    return Err(ConfigError("--m and --xi are contradictory".into()).into())
                }
                (Some(m), None) => GcsState::homogeneous(s, m)?,
                (None, Some(raw)) => {
                    GcsState::normalized(s, parse_complex_list(raw, "--xi")?)?
                }
                (None, None) => return Err(ConfigError("gcs family needs --m or --xi".into()).into()),
            };
            echo.push("family", "gcs");
            echo.push("s", s);
            echo.push("m", state.modes());
            grid.values()
                .iter()
                .map(|&t| tpcf_gcs(&state, t, i, j))
                .collect::<Result<_, _>>()?
        }
        Family::Mmgs => {
            let state = match (lambda, &alpha_raw) {
                (Some(_), Some(_)) => {
                    return Err(
                        ConfigError("--lambda and --alpha are contradictory".into()).into()
                    )
                }
                (Some(l), None) => {
                    let m = m.ok_or_else(|| ConfigError("mmgs family needs --m".into()))?;
                    MmgsState::homogeneous(l, m)?
                }
                (None, Some(raw)) => MmgsState::new(parse_complex_list(raw, "--alpha")?)?,
                (None, None) => {
                    return Err(ConfigError("mmgs family needs --lambda or --alpha".into()).into())
                }
            };
            echo.push("family", "mmgs");
            echo.push("m", state.modes());
            echo.push("ntilde", state.ntilde());
            grid.values()
                .iter()
                .map(|&t| tpcf_mmgs(&state, t, i, j))
                .collect::<Result<_, _>>()?
        }
        Family::Thermo => {
            let l =
                lambda.ok_or_else(|| ConfigError("thermo family needs --lambda".into()))?;
            echo.push("family", "thermo");
            echo.push("lambda", l);
            grid.values()
                .iter()
                .map(|&t| tpcf_thermo(l, t).map(|v| Complex64::new(v, 0.0)))
                .collect::<Result<_, _>>()?
        }
    };

    let rows: Vec<Vec<Cell>> = grid
        .values()
        .iter()
        .zip(&values)
        .map(|(&t, &v)| {
            let [re, im] = complex_cells(v);
            vec![Cell::Float(t), re, im]
        })
        .collect();
    write_csv(&out, &echo.comment_lines(), &["theta", "re", "im"], &rows)?;
    if let Some(svg_path) = svg {
        let ys: Vec<f64> = values.iter().map(|v| v.re).collect();
        write_svg_lines(
            &svg_path,
            "two-point correlator",
            "theta = U t",
            "Re <a_i^+ a_j>",
            &[SvgSeries {
                label: "Re",
                x: grid.values(),
                y: &ys,
            }],
        )?;
    }
    print!("{}", echo.render());
    Ok(())
}

fn run_thermo_gap(args: TpcfArgs, file: &FileConfig) -> Result<(), AppError> {
    let lambda = pick(args.lambda, file, "lambda")?.unwrap_or(1.0);
    let theta = pick(args.grid.theta, file, "theta")?.unwrap_or(PI);
    let s_raw =
        pick_string(args.s_list, file, "s-list").unwrap_or_else(|| "50,100,200,400".into());
    let s_values: Vec<u32> = parse_f64_list(&s_raw, "--s-list")?
        .into_iter()
        .map(|v| v as u32)
        .collect();
    let out = resolve_out(args.out, file.get_string("out"), "thermo_gap.csv");
    file.finish()?;

    let mut echo = ResolvedEcho::new("tpcf");
    echo.push("thermo-gap", true);
    echo.push("lambda", lambda);
    echo.push("theta", theta);

    let mut rows = Vec::new();
    for &s in &s_values {
        let gap = thermo_gap(s, lambda, theta)?;
        rows.push(vec![Cell::Int(s as i64), Cell::Float(gap)]);
    }
    write_csv(&out, &echo.comment_lines(), &["s", "gap"], &rows)?;
    print!("{}", echo.render());
    Ok(())
}

// ------------------------------------------------------- loschmidt-gcs ----

#[derive(Args, Debug)]
pub struct LoschmidtGcsArgs {
    /// Particle number S.
    #[arg(long)]
    pub s: Option<u32>,
    /// Filling factors, one curve each; M = S/lambda must be integer.
    #[arg(long)]
    pub lambda_list: Option<String>,
    /// Mode counts, one curve each (alternative to --lambda-list).
    #[arg(long)]
    pub m_list: Option<String>,
    /// Minimum peak prominence reported (default 0.01).
    #[arg(long)]
    pub min_prominence: Option<f64>,
    /// Minimum peak separation; closer maxima merge into one spike (default 0.05).
    #[arg(long)]
    pub min_separation: Option<f64>,
    #[command(flatten)]
    pub grid: GridFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

fn lambda_label(lambda: f64) -> String {
    format!("{lambda}")
}

fn run_loschmidt_gcs(args: LoschmidtGcsArgs, file: &FileConfig) -> Result<(), AppError> {
    let s = pick(args.s, file, "s")?.unwrap_or(100);
    let grid = resolve_grid(&args.grid, file, 2000)?;
    let min_prom = pick(args.min_prominence, file, "min-prominence")?.unwrap_or(0.01);
    let min_sep = pick(args.min_separation, file, "min-separation")?.unwrap_or(0.05);
    let lambda_raw = pick_string(args.lambda_list, file, "lambda-list");
    let m_raw = pick_string(args.m_list, file, "m-list");
    let out = resolve_out(args.out, file.get_string("out"), "loschmidt_gcs.csv");
    let svg = pick_path(args.svg, file, "svg");
    file.finish()?;

    let m_values: Vec<u32> = match (lambda_raw, m_raw) {
        (Some(_), Some(_)) => {
            return Err(ConfigError("--lambda-list and --m-list are contradictory".into()).into())
        }
        (Some(raw), None) => {
            let lambdas = parse_f64_list(&raw, "--lambda-list")?;
            let mut ms = Vec::new();
            for l in lambdas {
                let m_real = s as f64 / l;
                let m = m_real.round();
                if !(l > 0.0) || (m_real - m).abs() > 1e-9 || m < 1.0 {
                    return Err(ConfigError(format!(
                        "lambda={l} does not give an integer mode count for S={s}"
                    ))
                    .into());
                }
                ms.push(m as u32);
            }
            ms
        }
        (None, Some(raw)) => parse_f64_list(&raw, "--m-list")?
            .into_iter()
            .map(|v| v as u32)
            .collect(),
        (None, None) => vec![200, 100, 50, 20], // lambda 0.5, 1, 2, 5 at S=100
    };

    let mut echo = ResolvedEcho::new("loschmidt-gcs");
    echo.push("s", s);
    echo_grid(&mut echo, &grid);
    echo.push("min-prominence", min_prom);
    echo.push("min-separation", min_sep);

    let mut curves: Vec<(f64, FreeEnergyCurve)> = Vec::new();
    for &m in &m_values {
        let state = GcsState::homogeneous(s, m)?;
        let lambda = s as f64 / m as f64;
        let evaluated: Vec<(f64, bool)> = grid
            .values()
            .par_iter()
            .map(|&theta| {
                let fe = free_energy(autocorr_genfun(&state, theta), m as usize);
                (fe.value, fe.saturated)
            })
            .collect();
        let (values, saturated): (Vec<f64>, Vec<bool>) = evaluated.into_iter().unzip();
        let curve = FreeEnergyCurve::from_values(grid.values().to_vec(), values, saturated);
        echo.push("m", m);
        echo.push("lambda", lambda_label(lambda));
        for p in curve.dominant_peaks(min_prom, min_sep) {
            echo.push(
                &format!("peak[lambda={}]", lambda_label(lambda)),
                format!(
                    "theta={:.6} L={:.6} prominence={:.6}",
                    p.theta, p.value, p.prominence
                ),
            );
        }
        curves.push((lambda, curve));
    }

    let mut header: Vec<String> = vec!["theta".into()];
    for (lambda, _) in &curves {
        header.push(format!("L[lambda={}]", lambda_label(*lambda)));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<Cell>> = (0..grid.len())
        .map(|idx| {
            let mut row = vec![Cell::Float(grid.values()[idx])];
            for (_, curve) in &curves {
                row.push(Cell::Float(curve.values[idx]));
            }
            row
        })
        .collect();
    write_csv(&out, &echo.comment_lines(), &header_refs, &rows)?;

    if let Some(svg_path) = svg {
        let labels: Vec<String> = curves
            .iter()
            .map(|(l, _)| format!("lambda={}", lambda_label(*l)))
            .collect();
        let series: Vec<SvgSeries<'_>> = curves
            .iter()
            .zip(&labels)
            .map(|((_, c), label)| SvgSeries {
                label,
                x: grid.values(),
                y: &c.values,
            })
            .collect();
        write_svg_lines(
            &svg_path,
            "dynamical free-energy density (GCS)",
            "theta = U t",
            "L",
            &series,
        )?;
    }
    print!("{}", echo.render());
    Ok(())
}

// --------------------------------------------------- loschmidt-glauber ----

#[derive(Args, Debug)]
pub struct LoschmidtGlauberArgs {
    /// Filling factor of the homogeneous state (per-site rate is then
    /// independent of M).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Explicit amplitudes "re,im;re,im;...".
    #[arg(long)]
    pub alpha: Option<String>,
    /// Mode count for the homogeneous state (default 1).
    #[arg(long)]
    pub m: Option<u32>,
    #[command(flatten)]
    pub grid: GridFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

fn run_loschmidt_glauber(args: LoschmidtGlauberArgs, file: &FileConfig) -> Result<(), AppError> {
    let grid = resolve_grid(&args.grid, file, 2000)?;
    let lambda = pick(args.lambda, file, "lambda")?;
    let m = pick(args.m, file, "m")?;
    let alpha_raw = pick_string(args.alpha, file, "alpha");
    let out = resolve_out(args.out, file.get_string("out"), "loschmidt_glauber.csv");
    let svg = pick_path(args.svg, file, "svg");
    file.finish()?;

    let state = match (lambda, alpha_raw) {
        (Some(_), Some(_)) => {
            return Err(ConfigError("--lambda and --alpha are contradictory".into()).into())
        }
        (Some(l), None) => MmgsState::homogeneous(l, m.unwrap_or(1))?,
        (None, Some(raw)) => MmgsState::new(parse_complex_list(&raw, "--alpha")?)?,
        (None, None) => MmgsState::homogeneous(2.0, 1)?,
    };
    let lambda_max = state
        .alpha()
        .iter()
        .map(|a| a.norm_sqr())
        .fold(0.0, f64::max);
    let trunc = TruncationSpec::for_lambda(lambda_max);

    let mut echo = ResolvedEcho::new("loschmidt-glauber");
    echo.push("m", state.modes());
    echo.push("ntilde", state.ntilde());
    echo.push("n-cut", trunc.n_cut);
    echo.push("tail-tol", trunc.tail_tol);
    echo_grid(&mut echo, &grid);

    let m_sites = state.modes();
    let values: Vec<f64> = grid
        .values()
        .par_iter()
        .map(|&theta| {
            quench_core::glauber::survival_mmgs(&state, theta, &trunc)
                .map(|a| free_energy(a, m_sites).value)
        })
        .collect::<Result<_, _>>()?;

    let rows: Vec<Vec<Cell>> = grid
        .values()
        .iter()
        .zip(&values)
        .map(|(&t, &v)| vec![Cell::Float(t), Cell::Float(v)])
        .collect();
    write_csv(&out, &echo.comment_lines(), &["theta", "L"], &rows)?;
    if let Some(svg_path) = svg {
        write_svg_lines(
            &svg_path,
            "dynamical free-energy density (MMGS)",
            "theta = U t",
            "L",
            &[SvgSeries {
                label: "quantum",
                x: grid.values(),
                y: &values,
            }],
        )?;
    }
    print!("{}", echo.render());
    Ok(())
}

// -------------------------------------------------------------- fourier ----

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum FourierMode {
    /// Exact particle-number projection (eq-exact; any S).
    Exact,
    /// Stirling-prefactor variant (error O(1/S)).
    Stirling,
}

#[derive(Args, Debug)]
pub struct FourierArgs {
    /// Projection flavour.
    #[arg(long, value_enum)]
    pub mode: Option<FourierMode>,
    /// Particle number S of the reconstructed GCS amplitude.
    #[arg(long)]
    pub s: Option<u32>,
    /// Mode count M.
    #[arg(long)]
    pub m: Option<u32>,
    /// Quadrature nodes on [0, 1).
    #[arg(long)]
    pub n_x: Option<usize>,
    /// Hopping amplitude J: switches to the Bose-Hubbard provider assembled
    /// from dense sector evolution (reference becomes the direct sector
    /// amplitude).
    #[arg(long)]
    pub hopping: Option<f64>,
    /// On-site strength U for the Bose-Hubbard provider (default 1).
    #[arg(long)]
    pub u: Option<f64>,
    /// Chain boundary for the Bose-Hubbard provider.
    #[arg(long)]
    pub boundary: Option<String>,
    /// Sector cutoff for the assembled provider (default: Poisson tail < 1e-12).
    #[arg(long)]
    pub s_cut: Option<u32>,
    #[command(flatten)]
    pub grid: GridFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

fn run_fourier(args: FourierArgs, file: &FileConfig) -> Result<(), AppError> {
    let mode_key = file.get_string("mode");
    let mode = match args.mode {
        Some(m) => m,
        None => match mode_key.as_deref() {
            None | Some("exact") => FourierMode::Exact,
            Some("stirling") => FourierMode::Stirling,
            Some(other) => return Err(ConfigError(format!("unknown mode {other:?}")).into()),
        },
    };
    let s = pick(args.s, file, "s")?.unwrap_or(20);
    let m = pick(args.m, file, "m")?.unwrap_or(2);
    let n_x = pick(args.n_x, file, "n-x")?.unwrap_or(4096);
    let hopping = pick(args.hopping, file, "hopping")?;
    let u = pick(args.u, file, "u")?.unwrap_or(1.0);
    let boundary = match pick_string(args.boundary, file, "boundary").as_deref() {
        None | Some("periodic") => Boundary::Periodic,
        Some("open") => Boundary::Open,
        Some(other) => return Err(ConfigError(format!("unknown boundary {other:?}")).into()),
    };
    let s_cut_flag = pick(args.s_cut, file, "s-cut")?;
    let grid = resolve_grid(&args.grid, file, 64)?;
    let out = resolve_out(args.out, file.get_string("out"), "fourier.csv");
    let svg = pick_path(args.svg, file, "svg");
    file.finish()?;

    let lambda = s as f64 / m as f64;
    let state = MmgsState::homogeneous(lambda, m)?;
    let xgrid = XGrid::new(n_x)?;
    let trunc = TruncationSpec::for_lambda(lambda);

    let mut echo = ResolvedEcho::new("fourier");
    echo.push(
        "mode",
        match mode {
            FourierMode::Exact => "exact",
            FourierMode::Stirling => "stirling",
        },
    );
    echo.push("s", s);
    echo.push("m", m);
    echo.push("lambda", lambda);
    echo.push("n-x", n_x);
    echo_grid(&mut echo, &grid);

    // (fourier value, reference value) per theta
    let pairs: Vec<(Complex64, Complex64)> = match hopping {
        None => {
            echo.push("provider", "deep-lattice closed form");
            let gcs = GcsState::homogeneous(s, m)?;
            grid.values()
                .par_iter()
                .map(|&theta| {
                    let four = match mode {
                        FourierMode::Exact => fourier_autocorr_exact(s, &state, theta, &xgrid, |x| {
                            g_of_x(x, theta, lambda, m, &trunc)
                        })?,
                        FourierMode::Stirling => {
                            fourier_autocorr_stirling(s, m, theta, &xgrid, &trunc)?
                        }
                    };
                    Ok((four, autocorr_genfun(&gcs, theta)))
                })
                .collect::<Result<_, quench_core::Error>>()?
        }
        Some(j) => {
            if mode == FourierMode::Stirling {
                return Err(ConfigError(
                    "the Stirling variant is derived for the deep lattice; use --mode exact with --hopping"
                        .into(),
                )
                .into());
            }
            let model = BoseHubbardModel::new(u, j, m, boundary)?;
            let s_cut = match s_cut_flag {
                Some(c) => c,
                None => {
                    let mut c = s;
                    while poisson_tail_bound(state.ntilde(), c as usize)
                        >= crate::oracle::ASSEMBLY_TAIL_TOL
                    {
                        c += 1;
                    }
                    c
                }
            };
            echo.push("provider", "bose-hubbard sector assembly");
            echo.push("u", u);
            echo.push("hopping", j);
            echo.push(
                "boundary",
                match boundary {
                    Boundary::Periodic => "periodic",
                    Boundary::Open => "open",
                },
            );
            echo.push("s-cut", s_cut);
            let assembled = MmgsCrossCorr::new(&state, &model, s_cut)?;
            let gcs = GcsState::homogeneous(s, m)?;
            let reference = sector_autocorr(&gcs, &model, &grid)?;
            grid.values()
                .par_iter()
                .zip(reference.values.par_iter())
                .map(|(&theta, &reference)| {
                    let four = fourier_autocorr_exact(s, &state, theta, &xgrid, |x| {
                        Ok(assembled.eval(x, theta))
                    })?;
                    Ok((four, reference))
                })
                .collect::<Result<_, quench_core::Error>>()?
        }
    };

    let mut max_delta = 0.0f64;
    let rows: Vec<Vec<Cell>> = grid
        .values()
        .iter()
        .zip(&pairs)
        .map(|(&t, &(four, reference))| {
            let delta = (four - reference).norm();
            max_delta = max_delta.max(delta);
            let [fr, fi] = complex_cells(four);
            let [rr, ri] = complex_cells(reference);
            vec![Cell::Float(t), fr, fi, rr, ri, Cell::Float(delta)]
        })
        .collect();
    echo.push("max-abs-delta", format!("{max_delta:.3e}"));
    write_csv(
        &out,
        &echo.comment_lines(),
        &["theta", "re_fourier", "im_fourier", "re_ref", "im_ref", "abs_delta"],
        &rows,
    )?;
    if let Some(svg_path) = svg {
        let deltas: Vec<f64> = pairs.iter().map(|(f, r)| (f - r).norm()).collect();
        write_svg_lines(
            &svg_path,
            "Fourier reconstruction error",
            "theta = U t",
            "|delta|",
            &[SvgSeries {
                label: "|fourier - reference|",
                x: grid.values(),
                y: &deltas,
            }],
        )?;
    }
    print!("{}", echo.render());
    Ok(())
}

// ----------------------------------------------------------- fx-profile ----

#[derive(Args, Debug)]
pub struct FxProfileArgs {
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    /// Filling factor override (default S/M).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Evaluation time theta = U t.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Profile nodes on [0, 1).
    #[arg(long)]
    pub n_x: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

fn run_fx_profile(args: FxProfileArgs, file: &FileConfig) -> Result<(), AppError> {
    let s = pick(args.s, file, "s")?.unwrap_or(100);
    let m = pick(args.m, file, "m")?.unwrap_or(3);
    let lambda = pick(args.lambda, file, "lambda")?.unwrap_or(s as f64 / m as f64);
    let theta = pick(args.theta, file, "theta")?.unwrap_or(PI / 2.0);
    let n_x = pick(args.n_x, file, "n-x")?.unwrap_or(2048);
    let out = resolve_out(args.out, file.get_string("out"), "fx_profile.csv");
    let svg = pick_path(args.svg, file, "svg");
    file.finish()?;

    let xgrid = XGrid::new(n_x)?;
    let trunc = TruncationSpec::for_lambda(lambda);
    let profile = f_integrand_profile(s, lambda, m, theta, &xgrid, &trunc)?;

    let mut echo = ResolvedEcho::new("fx-profile");
    echo.push("s", s);
    echo.push("m", m);
    echo.push("lambda", lambda);
    echo.push("theta", theta);
    echo.push("n-x", n_x);
    let mean: Complex64 =
        quench_core::special::pairwise_sum(&profile.values) / profile.values.len() as f64;
    echo.push("integral-re", format!("{:.6e}", mean.re));
    echo.push("integral-im", format!("{:.6e}", mean.im));

    let rows: Vec<Vec<Cell>> = profile
        .grid
        .iter()
        .zip(&profile.values)
        .map(|(&x, &v)| {
            let [re, im] = complex_cells(v);
            vec![Cell::Float(x), re, im, Cell::Float(v.norm())]
        })
        .collect();
    write_csv(&out, &echo.comment_lines(), &["x", "re", "im", "abs"], &rows)?;
    if let Some(svg_path) = svg {
        let re: Vec<f64> = profile.values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = profile.values.iter().map(|v| v.im).collect();
        write_svg_lines(
            &svg_path,
            "integrand F(x, theta)",
            "x",
            "F",
            &[
                SvgSeries {
                    label: "Re F",
                    x: &profile.grid,
                    y: &re,
                },
                SvgSeries {
                    label: "Im F",
                    x: &profile.grid,
                    y: &im,
                },
            ],
        )?;
    }
    print!("{}", echo.render());
    Ok(())
}

// ----------------------------------------------------------- phasespace ----

#[derive(Args, Debug)]
pub struct PhasespaceArgs {
    /// Initial Glauber amplitude "re,im" (or a bare real).
    #[arg(long)]
    pub alpha: Option<String>,
    /// Alternative: alpha = sqrt(lambda) on the positive real axis.
    #[arg(long)]
    pub sqrt_lambda: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Exponent M of the plotted |<beta|psi>|^M.
    #[arg(long)]
    pub m: Option<u32>,
    /// Half-width of the square beta grid (default |alpha| + 4).
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Nodes per axis (default 201).
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Emit |G(x, theta)| along the radius-sqrt(lambda) circle instead of a grid.
    #[arg(long)]
    pub circle_section: bool,
    /// Nodes for the circle section (default 512).
    #[arg(long)]
    pub n_x: Option<usize>,
    /// Run the completeness norm check instead of emitting a grid.
    #[arg(long)]
    pub norm_check: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_phasespace(args: PhasespaceArgs, file: &FileConfig) -> Result<(), AppError> {
    let theta = pick(args.theta, file, "theta")?.unwrap_or(0.0);
    let m = pick(args.m, file, "m")?.unwrap_or(1);
    let sqrt_lambda = pick(args.sqrt_lambda, file, "sqrt-lambda")?;
    let alpha_raw = pick_string(args.alpha, file, "alpha");
    let alpha = match (alpha_raw, sqrt_lambda) {
        (Some(_), Some(_)) => {
            return Err(ConfigError("--alpha and --sqrt-lambda are contradictory".into()).into())
        }
        (Some(raw), None) => {
            let list = parse_complex_list(&raw, "--alpha")?;
            if list.len() != 1 {
                return Err(ConfigError("--alpha takes a single amplitude".into()).into());
            }
            list[0]
        }
        (None, Some(r)) => Complex64::new(r, 0.0),
        (None, None) => Complex64::new(1.0, 0.0),
    };
    let circle = args.circle_section || file.get::<bool>("circle-section")?.unwrap_or(false);
    let norm = args.norm_check || file.get::<bool>("norm-check")?.unwrap_or(false);
    if circle && norm {
        return Err(ConfigError("--circle-section and --norm-check are contradictory".into()).into());
    }
    let default_half = alpha.norm() + if norm { 6.0 } else { 4.0 };
    let half_width = pick(args.half_width, file, "half-width")?.unwrap_or(default_half);
    let resolution = pick(args.resolution, file, "resolution")?.unwrap_or(201);
    let n_x = pick(args.n_x, file, "n-x")?.unwrap_or(512);
    let out = resolve_out(
        args.out,
        file.get_string("out"),
        if circle {
            "circle_section.csv"
        } else if norm {
            "husimi_norm.csv"
        } else {
            "phasespace.csv"
        },
    );
    file.finish()?;

    let mut echo = ResolvedEcho::new("phasespace");
    echo.push("alpha", format!("{},{}", alpha.re, alpha.im));
    echo.push("theta", theta);
    echo.push("m", m);

    if circle {
        let xgrid = XGrid::new(n_x)?;
        let trunc = TruncationSpec::for_lambda(alpha.norm_sqr());
        let section = circle_section(alpha.norm(), theta, m, &xgrid, &trunc)?;
        echo.push("n-x", n_x);
        let rows: Vec<Vec<Cell>> = xgrid
            .iter()
            .zip(&section)
            .map(|(x, &v)| vec![Cell::Float(x), Cell::Float(v)])
            .collect();
        write_csv(&out, &echo.comment_lines(), &["x", "abs_g"], &rows)?;
    } else if norm {
        let spec = GridSpec::centered(half_width, resolution);
        let trunc = TruncationSpec::for_lambda(alpha.norm() * spec.max_abs());
        let value = husimi_norm_check(alpha, theta, &spec, &trunc)?;
        echo.push("half-width", half_width);
        echo.push("resolution", resolution);
        echo.push("norm", value);
        write_csv(
            &out,
            &echo.comment_lines(),
            &["norm", "deviation"],
            &[vec![Cell::Float(value), Cell::Float((value - 1.0).abs())]],
        )?;
    } else {
        let spec = GridSpec::centered(half_width, resolution);
        let trunc = TruncationSpec::for_lambda(alpha.norm() * spec.max_abs());
        echo.push("half-width", half_width);
        echo.push("resolution", resolution);
        let grid = distribution_grid(alpha, theta, m, &spec, &trunc)?;
        let values = grid.values;
        let rows: Vec<Vec<Cell>> = (0..resolution)
            .flat_map(|i| {
                let values = &values;
                (0..resolution).map(move |j| {
                    vec![
                        Cell::Float(spec.re_node(j)),
                        Cell::Float(spec.im_node(i)),
                        Cell::Float(values[i * resolution + j]),
                    ]
                })
            })
            .collect();
        write_csv(
            &out,
            &echo.comment_lines(),
            &["re_beta", "im_beta", "value"],
            &rows,
        )?;
        let pgm = out.with_extension("pgm");
        write_pgm(&pgm, resolution, resolution, &values)?;
        echo.push("pgm", pgm.display());
    }
    print!("{}", echo.render());
    Ok(())
}

// ---------------------------------------------------------- oracle-check ----

#[derive(Args, Debug)]
pub struct OracleCheckArgs {
    /// Largest particle number exercised.
    #[arg(long)]
    pub max_s: Option<u32>,
    /// Largest mode count exercised.
    #[arg(long)]
    pub max_m: Option<u32>,
    /// Theta samples per check.
    #[arg(long)]
    pub theta_points: Option<usize>,
}

fn run_oracle_check(args: OracleCheckArgs, file: &FileConfig) -> Result<(), AppError> {
    let max_s = pick(args.max_s, file, "max-s")?.unwrap_or(5);
    let max_m = pick(args.max_m, file, "max-m")?.unwrap_or(3);
    let theta_points = pick(args.theta_points, file, "theta-points")?.unwrap_or(16);
    file.finish()?;

    let grid = TimeGrid::linspace(0.0, 4.0 * PI, theta_points.max(2))?;
    let mut failures = 0usize;
    let mut report = |name: &str, worst: f64, tol: f64| {
        let ok = worst < tol;
        if !ok {
            failures += 1;
        }
        println!(
            "check {name}: {} (worst {worst:.3e}, tol {tol:.1e})",
            if ok { "PASS" } else { "FAIL" }
        );
    };

    // three deep-lattice paths agree: enumeration, genfun, Fock oracle
    let mut worst = 0.0f64;
    for s in 0..=max_s {
        for m in 1..=max_m {
            let state = GcsState::homogeneous(s, m)?;
            for &theta in grid.values() {
                let e = quench_core::loschmidt::autocorr_enumerated(&state, theta)?;
                let g = autocorr_genfun(&state, theta);
                let o = deep_lattice_autocorr_oracle_guarded(&state, theta, 20_000)?;
                worst = worst.max((e - g).norm()).max((e - o).norm());
            }
        }
    }
    report("deep-lattice three-path consistency", worst, 1e-10);

    // unitarity and A(0) = 1 through the sector evolution, J/U in {0, 0.3, 1}
    let mut worst = 0.0f64;
    for &j in &[0.0, 0.3, 1.0] {
        for s in 1..=max_s {
            for m in 2..=max_m {
                let state = GcsState::homogeneous(s, m)?;
                let model = BoseHubbardModel::new(1.0, j, m, Boundary::Periodic)?;
                let series = sector_autocorr(&state, &model, &grid)?;
                worst = worst.max((series.values[0] - 1.0).norm());
                for v in &series.values {
                    worst = worst.max((v.norm() - 1.0).max(0.0));
                }
            }
        }
    }
    report("sector unitarity and A(0)=1", worst, 1e-10);

    // projection round trip: fourier_exact o assembled == sector amplitude
    let mut worst = 0.0f64;
    let round_grid = TimeGrid::linspace(0.0, 4.0 * PI, 7)?;
    for &j in &[0.0, 0.3, 1.0] {
        for s in 1..=max_s.min(5) {
            for m in 2..=max_m.min(3) {
                let lambda = s as f64 / m as f64;
                let mmgs = MmgsState::homogeneous(lambda, m)?;
                let model = BoseHubbardModel::new(1.0, j, m, Boundary::Periodic)?;
                let mut s_cut = s;
                while poisson_tail_bound(mmgs.ntilde(), s_cut as usize)
                    >= crate::oracle::ASSEMBLY_TAIL_TOL
                {
                    s_cut += 1;
                }
                let assembled = MmgsCrossCorr::new(&mmgs, &model, s_cut)?;
                let gcs = GcsState::homogeneous(s, m)?;
                let reference = sector_autocorr(&gcs, &model, &round_grid)?;
                let xgrid = XGrid::new(256)?;
                for (&theta, &want) in round_grid.values().iter().zip(&reference.values) {
                    let got = fourier_autocorr_exact(s, &mmgs, theta, &xgrid, |x| {
                        Ok(assembled.eval(x, theta))
                    })?;
                    worst = worst.max((got - want).norm());
                }
            }
        }
    }
    report("projection round trip", worst, 1e-9);

    // G identity against the powered cross-correlation
    let mut worst = 0.0f64;
    for &(x, theta, lambda, m) in &[
        (0.17, 0.8, 0.5, 4u32),
        (0.62, 2.9, 2.0, 8),
        (0.91, 5.5, 4.0, 2),
    ] {
        let trunc = TruncationSpec::for_lambda(lambda);
        let g = g_of_x(x, theta, lambda, m, &trunc)?;
        let beta = Complex64::from_polar(lambda.sqrt(), -std::f64::consts::TAU * x);
        let a = Complex64::new(lambda.sqrt(), 0.0);
        let c = quench_core::glauber::cross_corr_single(beta, a, theta, &trunc)?.powu(m);
        worst = worst.max((g - c).norm());
    }
    report("G/cross-correlation identity", worst, 1e-12);

    if failures > 0 {
        Err(AppError::CheckFailed(failures))
    } else {
        Ok(())
    }
}
