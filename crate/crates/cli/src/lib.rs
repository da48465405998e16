//! Command-line surface for the free Gamma laws: parameter summaries, density
//! tables, moments, the mode, the small-alpha limits and a verification
//! battery. Output is CSV or JSON and is byte-identical for identical flags.

mod output;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use freegamma::landscape::AlphaContext;
use freegamma::moments::MAX_DENSITY_ORDER;
use freegamma::{
    density_table, edge_coefficient, find_mode, free_cumulants, moments_from_cumulants, moments_from_density,
    small_alpha_moment_limit, small_alpha_profile, Error, GridKind, QuadratureSettings,
};

pub use output::{Cell, Table};

/// Root tolerance used with the default quadrature settings.
const ROOT_TOL: f64 = 1e-10;
/// Largest alpha accepted by `limit`.
const SMALL_ALPHA: f64 = 0.01;
const DEFAULT_LIMIT_POINTS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
/// Width of the default density window above the support edge.
const DEFAULT_SPAN: f64 = 20.0;

#[derive(Debug, Parser)]
#[command(name = "freegamma", version, about = "Free Gamma laws: density, moments, mode and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Shape parameter; a comma-separated list runs each value in turn.
    #[arg(long, global = true, value_delimiter = ',', default_value = "1")]
    pub alpha: Vec<f64>,

    /// Lower end of the sampling window (default: the support edge).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub min: Option<f64>,

    /// Upper end of the sampling window (default: min + 20).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub max: Option<f64>,

    /// Number of grid points.
    #[arg(long, global = true, default_value_t = 101)]
    pub points: usize,

    /// Highest moment order.
    #[arg(long = "max-order", global = true, default_value_t = 6)]
    pub max_order: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Significant digits in numeric output.
    #[arg(long, global = true, default_value_t = 12)]
    pub precision: usize,

    /// Sampling pattern for `density`.
    #[arg(long, global = true, value_enum, default_value_t = Grid::Uniform)]
    pub grid: Grid,

    /// Overrides both quadrature tolerances (diagnostic; `verify` measures
    /// the effect against the default settings).
    #[arg(long = "quad-tol", global = true)]
    pub quad_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Support edge, edge constants, mode and tail constant.
    Params,
    /// Table of the density over [min, max].
    Density,
    /// Free cumulants and moments, exact and integrated from the density.
    Moments,
    /// Location and height of the density maximum.
    Mode,
    /// Runs the check battery; exit status 1 if any check fails.
    Verify,
    /// Small-alpha limits of f/alpha and m_p/alpha (alpha <= 0.01).
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    Uniform,
    LogEdge,
}

/// Successful run: text for stdout and the process exit code.
#[derive(Debug)]
pub struct Report {
    pub output: String,
    pub code: u8,
}

#[derive(Debug)]
pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::DomainViolation(_) => 2,
            _ => 3,
        };
        Failure {
            message: e.to_string(),
            code,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure {
        message: msg.into(),
        code: 2,
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

pub fn run(cli: &Cli) -> CliResult<Report> {
    validate(cli)?;
    let settings = match cli.quad_tol {
        Some(tol) => QuadratureSettings::with_tolerance(tol),
        None => QuadratureSettings::default(),
    };
    let root_tol = cli.quad_tol.map_or(ROOT_TOL, |t| t.clamp(ROOT_TOL, 0.5));
    let contexts = cli
        .alpha
        .iter()
        .map(|&a| AlphaContext::with_settings(a, settings, root_tol))
        .collect::<Result<Vec<_>, _>>()?;

    if cli.command == Command::Verify {
        let (output, all_pass) = verify::run(&contexts, cli)?;
        return Ok(Report {
            output,
            code: if all_pass { 0 } else { 1 },
        });
    }
    let table = match cli.command {
        Command::Params => params(&contexts)?,
        Command::Density => density(&contexts, cli)?,
        Command::Moments => moments(&contexts, cli)?,
        Command::Mode => mode(&contexts)?,
        Command::Limit => limit(cli)?,
        Command::Verify => unreachable!(),
    };
    // a single parameter record is emitted as a flat object
    let flat = cli.command == Command::Params && contexts.len() == 1;
    Ok(Report {
        output: table.render(cli.format, cli.precision, flat),
        code: 0,
    })
}

fn validate(cli: &Cli) -> CliResult<()> {
    if cli.alpha.is_empty() {
        return Err(invalid("--alpha needs at least one value"));
    }
    if !(1..=17).contains(&cli.precision) {
        return Err(invalid(format!("--precision must lie in 1..=17, got {}", cli.precision)));
    }
    if cli.points < 2 {
        return Err(invalid(format!("--points must be at least 2, got {}", cli.points)));
    }
    if !(1..=MAX_DENSITY_ORDER).contains(&cli.max_order) {
        return Err(invalid(format!(
            "--max-order must lie in 1..={MAX_DENSITY_ORDER}, got {}",
            cli.max_order
        )));
    }
    for (name, v) in [("--min", cli.min), ("--max", cli.max)] {
        if v.is_some_and(|v| !v.is_finite()) {
            return Err(invalid(format!("{name} must be finite")));
        }
    }
    if let (Some(lo), Some(hi)) = (cli.min, cli.max) {
        if lo >= hi {
            return Err(invalid(format!("--min ({lo}) must be below --max ({hi})")));
        }
    }
    if let Some(tol) = cli.quad_tol {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(invalid(format!("--quad-tol must lie in (0, 1), got {tol}")));
        }
    }
    Ok(())
}

/// Window `[min, max]`, defaulting to `[s, s + 20]` and keeping `min < max`.
fn window(cli: &Cli, edge: f64) -> CliResult<(f64, f64)> {
    let lo = cli.min.unwrap_or(edge);
    let hi = cli.max.unwrap_or(lo + DEFAULT_SPAN);
    if lo >= hi {
        return Err(invalid(format!("window [{lo}, {hi}] is empty")));
    }
    Ok((lo, hi))
}

/// Mode and edge coefficient are unavailable when the edge lies below
/// double-precision range; they are reported as missing values.
fn optional(r: freegamma::error::Result<f64>) -> CliResult<Cell> {
    match r {
        Ok(v) => Ok(Cell::Num(v)),
        Err(Error::NonConvergence { .. } | Error::DegenerateSlope { .. }) => Ok(Cell::Missing),
        Err(e) => Err(e.into()),
    }
}

fn params(contexts: &[AlphaContext]) -> CliResult<Table> {
    let mut table = Table::new(&[
        "alpha",
        "c_alpha",
        "s_alpha",
        "gamma_alpha",
        "dc_dalpha",
        "ds_dalpha",
        "omega_alpha",
        "f_at_mode",
        "edge_coefficient",
        "tail_constant",
    ]);
    for k in contexts {
        let alpha = k.alpha();
        let mode = find_mode(k);
        table.push(vec![
            Cell::Num(alpha),
            Cell::Num(k.c_alpha()),
            Cell::Num(k.s_alpha()),
            Cell::Num(k.gamma_alpha()),
            optional(k.c_alpha_derivative())?,
            optional(k.s_alpha_derivative())?,
            optional(mode.as_ref().map(|m| m.omega).map_err(Clone::clone))?,
            optional(mode.as_ref().map(|m| m.f_at_mode).map_err(Clone::clone))?,
            optional(edge_coefficient(k))?,
            Cell::Num(alpha * alpha.exp()),
        ]);
    }
    Ok(table)
}

fn density(contexts: &[AlphaContext], cli: &Cli) -> CliResult<Table> {
    let [k] = contexts else {
        return Err(invalid("density takes a single --alpha value"));
    };
    let (lo, hi) = window(cli, k.s_alpha())?;
    let kind = match cli.grid {
        Grid::Uniform => GridKind::Uniform,
        Grid::LogEdge => GridKind::LogEdge,
    };
    let t = density_table(k, lo, hi, cli.points, kind)?;
    let mut table = Table::new(&["xi", "f"]);
    for (xi, f) in t.xi.iter().zip(&t.f) {
        table.push(vec![Cell::Num(*xi), Cell::Num(*f)]);
    }
    Ok(table)
}

fn moments(contexts: &[AlphaContext], cli: &Cli) -> CliResult<Table> {
    let p_max = cli.max_order;
    let mut table = Table::new(&["alpha", "p", "free_cumulant", "moment", "moment_from_density"]);
    for k in contexts {
        let r = free_cumulants(k.alpha(), p_max)?;
        let m = moments_from_cumulants(&r, p_max)?;
        let integrated: Vec<Cell> = match moments_from_density(k, p_max) {
            Ok(d) => d.moments.into_iter().map(Cell::Num).collect(),
            Err(Error::NonConvergence { .. }) if !k.edge_resolved() => vec![Cell::Missing; p_max],
            Err(e) => return Err(e.into()),
        };
        for p in 0..p_max {
            table.push(vec![
                Cell::Num(k.alpha()),
                Cell::Int(p as i64 + 1),
                Cell::Num(r[p]),
                Cell::Num(m[p]),
                integrated[p].clone(),
            ]);
        }
    }
    Ok(table)
}

fn mode(contexts: &[AlphaContext]) -> CliResult<Table> {
    let mut table = Table::new(&["alpha", "omega", "f_at_mode"]);
    for k in contexts {
        let m = find_mode(k)?;
        table.push(vec![Cell::Num(k.alpha()), Cell::Num(m.omega), Cell::Num(m.f_at_mode)]);
    }
    Ok(table)
}

fn limit(cli: &Cli) -> CliResult<Table> {
    let xs: Vec<f64> = match (cli.min, cli.max) {
        (None, None) => DEFAULT_LIMIT_POINTS.to_vec(),
        _ => {
            let (lo, hi) = window(cli, DEFAULT_LIMIT_POINTS[0])?;
            let step = (hi - lo) / (cli.points - 1) as f64;
            (0..cli.points).map(|i| lo + step * i as f64).collect()
        }
    };
    let mut table = Table::new(&["alpha", "kind", "arg", "value", "limit"]);
    for &alpha in &cli.alpha {
        if alpha > SMALL_ALPHA {
            return Err(invalid(format!("limit needs alpha <= {SMALL_ALPHA}, got {alpha}")));
        }
        for (x, ratio, lim) in small_alpha_profile(alpha, &xs)? {
            table.push(vec![
                Cell::Num(alpha),
                Cell::Text("density".into()),
                Cell::Num(x),
                Cell::Num(ratio),
                Cell::Num(lim),
            ]);
        }
        let mut factorial = 1.0;
        for (p, ratio) in small_alpha_moment_limit(alpha, cli.max_order)?.into_iter().enumerate() {
            if p > 0 {
                factorial *= p as f64;
            }
            table.push(vec![
                Cell::Num(alpha),
                Cell::Text("moment".into()),
                Cell::Int(p as i64 + 1),
                Cell::Num(ratio),
                Cell::Num(factorial),
            ]);
        }
    }
    Ok(table)
}
