//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 domain or input error,
//! 3 I/O error, 4 oracle convergence failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::closedform::{FormulaVariant, FrequencyX, GaugeForms};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::format::{sci, sig};
use crate::identities::{verify, Profile, VerifyConfig};
use crate::oracle::{OracleState, RadialGrid, DEFAULT_POINTS, DEFAULT_R_MAX};
use crate::rabi::{beta_with, PhysicalConstants};
use crate::report::{GeneratedInputs, ReportDocument};
use crate::scan::{write_scan, Column, ScanSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "gauge-workbench",
    version,
    about = "Two-photon 1S-2S matrix elements of hydrogen in length and velocity gauge"
)]
pub struct Cli {
    /// TOML constants file; falls back to $GAUGE_WORKBENCH_CONSTANTS.
    #[arg(long, global = true, value_name = "PATH")]
    pub constants_file: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print one quantity at one frequency.
    Compute {
        /// Photon energy in units of α²mc² (for two_color_q: the first photon).
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, value_enum)]
        quantity: Quantity,
        #[arg(long, value_enum, default_value_t = FormulaVariant::Derived)]
        formula: FormulaVariant,
    },
    /// Write f1, f2, delta (and optional columns) over a frequency grid as CSV.
    Scan {
        #[arg(long, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        x_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        /// Extra columns, comma separated.
        #[arg(long, value_enum, value_delimiter = ',')]
        columns: Vec<Column>,
        #[arg(long, value_enum, default_value_t = FormulaVariant::Derived)]
        formula: FormulaVariant,
    },
    /// Run the identity checks and the constants table.
    Verify {
        #[arg(long, value_enum, default_value_t = Profile::Strict)]
        profile: Profile,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        grid_points: usize,
        #[arg(long, default_value_t = DEFAULT_R_MAX)]
        r_max: f64,
        /// Force a closed-form variant instead of the oracle-selected one.
        #[arg(long, value_enum)]
        formula: Option<FormulaVariant>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Q,
    P,
    F1,
    F2,
    Delta,
    Beta,
    #[value(name = "two_color_q")]
    TwoColorQ,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Pole(_) | Error::Input(_) | Error::NearResonance(_) => EXIT_INPUT,
        Error::Io(_) => EXIT_IO,
        Error::Convergence(_) | Error::NonConvergence { .. } => EXIT_CONVERGENCE,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn load_constants(path: Option<&Path>) -> Result<PhysicalConstants> {
    PhysicalConstants::load(path)
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let constants_path = cli.constants_file.as_deref();
    match &cli.command {
        Command::Compute { x, quantity, formula } => {
            let forms = GaugeForms::new(*formula);
            let x = FrequencyX::new(*x)?;
            let (value, unit, limit_path) = match quantity {
                Quantity::TwoColorQ => (forms.two_color_q(x)?, "dimensionless".to_string(), false),
                Quantity::Beta => {
                    let k = load_constants(constants_path)?;
                    (beta_with(&forms, x, &k)?, format!("Hz m^2/W; {}", k.provenance_tag), forms.q(x)?.limit_path)
                }
                q => {
                    let g = forms.pair(x)?;
                    let v = match q {
                        Quantity::Q => g.q,
                        Quantity::P => g.p,
                        Quantity::F1 => g.f1,
                        Quantity::F2 => g.f2,
                        _ => g.delta,
                    };
                    (v, "dimensionless".to_string(), g.limit_path)
                }
            };
            writeln!(out, "{} [{unit}]", sig(value)).map_err(io)?;
            if limit_path {
                writeln!(err, "note: x is within the near-threshold band; value taken from the interpolated limit")
                    .map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Scan { x_min, x_max, steps, out: path, columns, formula } => {
            let spec = ScanSpec::new(*x_min, *x_max, *steps, columns)?;
            let k = if spec.columns().contains(&Column::Beta) {
                load_constants(constants_path)?
            } else {
                PhysicalConstants::codata_2018()
            };
            let rows = write_scan(&spec, &GaugeForms::new(*formula), &k, Execution::default(), path)?;
            write!(out, "wrote {} rows ({}) to {}", rows.len(), spec.header(), path.display()).map_err(io)?;
            if spec.columns().contains(&Column::Beta) {
                write!(out, "; constants {}", k.provenance_tag).map_err(io)?;
            }
            writeln!(out).map_err(io)?;
            let limited = rows.iter().filter(|r| r.limit_path).count();
            if limited > 0 {
                writeln!(err, "note: {limited} rows within the near-threshold band used the interpolated limit")
                    .map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { profile, out: path, grid_points, r_max, formula } => {
            let k = load_constants(constants_path)?;
            let grid = RadialGrid::new(*grid_points, *r_max)?;
            let oracle = OracleState::new(grid)?;
            let cfg = VerifyConfig { profile: *profile, formula: *formula, exec: Execution::default() };
            let report = verify(&oracle, &k, &cfg)?;

            for c in &report.checks {
                writeln!(
                    out,
                    "{} {:<17} source={:<11} points={:<3} max_residual={} tolerance={:e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name.as_str(),
                    match c.source {
                        crate::identities::Source::ClosedForm => "closed_form",
                        crate::identities::Source::Oracle => "oracle",
                    },
                    c.x_values.len(),
                    sci(c.max_residual()),
                    c.tolerance,
                )
                .map_err(io)?;
            }
            for c in &report.constants {
                writeln!(
                    out,
                    "{} {:<22} computed={} reference={} relative_error={}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    sci(c.computed),
                    sig(c.reference),
                    sci(c.relative_error),
                )
                .map_err(io)?;
            }
            let n = &report.non_invariance;
            writeln!(
                out,
                "{} gauge difference off resonance: {}",
                if n.passed { "PASS" } else { "FAIL" },
                n.x_values
                    .iter()
                    .zip(&n.delta)
                    .map(|(x, d)| format!("delta({})={}", x.value(), sci(*d)))
                    .collect::<Vec<_>>()
                    .join(" "),
            )
            .map_err(io)?;
            writeln!(
                out,
                "formula variant: {} (oracle selects {}); constants: {}",
                report.formula_variant.name(),
                report.variant_selection.chosen.name(),
                k.provenance_tag
            )
            .map_err(io)?;
            writeln!(out, "overall: {}", if report.overall_pass { "PASS" } else { "FAIL" }).map_err(io)?;

            if let Some(path) = path {
                let inputs = GeneratedInputs {
                    profile: *profile,
                    formula: *formula,
                    grid_points: *grid_points,
                    r_max: *r_max,
                    constants_file: PhysicalConstants::resolve_path(constants_path).map(|p| p.display().to_string()),
                };
                ReportDocument::new(&report, &k.provenance_tag, inputs).write(path)?;
            }
            Ok(if report.overall_pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}
