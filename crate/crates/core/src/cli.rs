//! Command-line front end.
//!
//! Exit status: 0 success, 1 domain or validation error, 2 I/O error,
//! 3 solver error (including a failed residual gate in `check`).

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::repro::{write_figure, Figure};
use crate::scenario::csv::format_number;
use crate::scenario::{
    load_scenario, run, sweep_table, write_csv, OutputKind, ScenarioError, ScenarioResult, ScheduleRun,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Default relative Euler-Lagrange residual gate for `check`.
pub const DEFAULT_CHECK_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "vaxcontract", version, about = "Capacity buildup contracts under adjustment costs")]
pub struct Cli {
    /// Override the solver grid resolution N.
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Relative residual gate used by `check`.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Suppress the summary table.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the outputs requested by a scenario and write CSVs.
    Solve {
        scenario: PathBuf,
        /// Output directory for CSV files.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compare constant and declining price schedules on one contract.
    Compare {
        scenario: PathBuf,
        /// Output directory for CSV files.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the scenario's parameter sweep.
    Sweep {
        scenario: PathBuf,
        /// Output directory for CSV files.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Regenerate a reference figure dataset.
    Repro {
        /// Figure number, 1 or 2.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        figure: u8,
        /// Output directory for CSV files.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Validate a scenario and print solver residuals without writing files.
    Check { scenario: PathBuf },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = match &e {
            ScenarioError::Parse { .. } | ScenarioError::Validation { .. } => EXIT_DOMAIN,
            ScenarioError::Model { source: Error::Solver(_), .. } => EXIT_SOLVER,
            ScenarioError::Model { .. } => EXIT_DOMAIN,
            ScenarioError::Io { .. } => EXIT_IO,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c == 0 {
                    format!("{cell:<w$}", w = widths[c])
                } else {
                    format!("{cell:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn run_columns(result: &ScenarioResult) -> Vec<(&'static str, &ScheduleRun)> {
    match &result.comparison {
        Some(cmp) => vec![("constant", &cmp.constant), ("linear", &cmp.linear)],
        None => vec![(result.primary.schedule.label(), &result.primary)],
    }
}

/// Cost and residual summary with aligned columns.
pub fn summary_table(result: &ScenarioResult) -> String {
    let columns = run_columns(result);
    let mut rows = vec![{
        let mut h = vec!["quantity".to_string()];
        h.extend(columns.iter().map(|(label, _)| label.to_string()));
        h
    }];
    let mut push = |name: &str, f: &dyn Fn(&ScheduleRun) -> Option<f64>| {
        let mut row = vec![name.to_string()];
        row.extend(columns.iter().map(|(_, r)| f(r).map_or_else(|| "-".to_string(), format_number)));
        rows.push(row);
    };
    push("base_price", &|r| Some(r.schedule.base_price()));
    push("price_slope", &|r| Some(r.schedule.slope()));
    for (i, (name, _)) in columns[0].1.costs.fields().iter().enumerate() {
        push(name, &|r| r.costs.fields().get(i).map(|(_, v)| *v));
    }
    push("multiplier", &|r| Some(r.numeric.multiplier));
    push("el_residual", &|r| Some(r.residuals.max_euler_lagrange_residual));
    push("boundary_residual", &|r| Some(r.residuals.boundary_residual));
    push("constraint_residual", &|r| Some(r.residuals.constraint_residual));

    let mut out = format!(
        "scenario {}  (grid N = {}, model {})\n",
        result.name, result.provenance.grid_n, result.provenance.model_version
    );
    out.push_str(&aligned(&rows));
    if let Some(sweep) = &result.sweep {
        let table = sweep_table(sweep);
        let mut srows = vec![table.header.clone()];
        srows.extend(table.rows.iter().map(|r| {
            r.iter()
                .map(|c| c.map_or_else(String::new, format_number))
                .collect()
        }));
        out.push_str("\nsweep\n");
        out.push_str(&aligned(&srows));
    }
    out
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Solve { scenario, out }
        | Command::Compare { scenario, out }
        | Command::Sweep { scenario, out } => {
            let mut file = load_scenario(scenario)?;
            match cli.command {
                Command::Compare { .. } if !file.outputs.contains(&OutputKind::Compare) => {
                    file.outputs.push(OutputKind::Compare)
                }
                Command::Sweep { .. } => {
                    if file.sweep.is_none() {
                        return Err(ScenarioError::Validation {
                            field: "sweep".into(),
                            message: "scenario has no [sweep] block".into(),
                        }
                        .into());
                    }
                    if !file.outputs.contains(&OutputKind::Sweep) {
                        file.outputs.push(OutputKind::Sweep);
                    }
                }
                _ => {}
            }
            let result = run(&file, cli.grid)?;
            let written = write_csv(&result, out)?;
            if !cli.quiet {
                write!(stdout, "{}", summary_table(&result))?;
                for path in written {
                    writeln!(stdout, "wrote {}", path.display())?;
                }
            }
            Ok(())
        }
        Command::Repro { figure, out } => {
            let figure = Figure::from_number(*figure).ok_or_else(|| Failure {
                code: EXIT_DOMAIN,
                message: format!("figure must be 1 or 2, got {figure}"),
            })?;
            let written = write_figure(figure, out, cli.grid)?;
            if !cli.quiet {
                for path in written {
                    writeln!(stdout, "wrote {}", path.display())?;
                }
            }
            Ok(())
        }
        Command::Check { scenario } => {
            let file = load_scenario(scenario)?;
            let result = run(&file, cli.grid)?;
            let tol = cli.tolerance.unwrap_or(DEFAULT_CHECK_TOLERANCE);
            let columns = run_columns(&result);
            if !cli.quiet {
                write!(stdout, "{}", summary_table(&result))?;
            }
            for (label, r) in columns {
                let rel = r.residuals.max_euler_lagrange_residual / r.numeric.multiplier.abs().max(1.0);
                if rel.is_nan() || rel > tol {
                    return Err(Failure {
                        code: EXIT_SOLVER,
                        message: format!(
                            "{label} schedule: relative Euler-Lagrange residual {rel:e} exceeds tolerance {tol:e}"
                        ),
                    });
                }
            }
            if !cli.quiet {
                writeln!(stdout, "check passed (tolerance {})", format_number(tol))?;
            }
            Ok(())
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Diagnostics go to `stderr` as a single line.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_DOMAIN
                }
            };
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message.replace('\n', " "));
            f.code
        }
    }
}

pub fn quiet_requested<I, T>(args: I) -> bool
where
    I: IntoIterator<Item = T>,
    T: AsRef<std::ffi::OsStr>,
{
    args.into_iter().any(|a| a.as_ref() == "--quiet" || a.as_ref() == "-q")
}
