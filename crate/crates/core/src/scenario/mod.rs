//! Scenario files, model pipelines and CSV output.

mod config;
pub mod csv;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::contract::{adjustment_cost, analytic_path, fixed_price_path, CapacityPath, ContractSpec, PricingSchedule};
use crate::error::Error;
use crate::policy::{design_optimal_schedule, CostReport};
use crate::solver::{residuals, solve, GridSpec, ResidualReport, Trajectory};

pub use config::{
    load_scenario, parse_scenario, ContractBlock, OutputKind, ScenarioFile, ScheduleBlock,
    ScheduleKind, SolverBlock, SweepBlock, SweepParameter, DEFAULT_GRID_INTERVALS,
};
use csv::{CsvTable, LabeledTable};

pub const MODEL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{origin}:{line}:{column}: parse error: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("scenario `{scenario}`: {source}")]
    Model {
        scenario: String,
        #[source]
        source: Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Everything computed for one pricing schedule on the scenario's contract.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleRun {
    pub schedule: PricingSchedule,
    /// Closed-form path; absent for a linear schedule with `z0 > 0`.
    pub analytic: Option<CapacityPath>,
    pub numeric: Trajectory,
    pub residuals: ResidualReport,
    pub costs: CostReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub constant: ScheduleRun,
    pub linear: ScheduleRun,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub costs: CostReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub model_version: &'static str,
    pub grid_n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub name: String,
    pub outputs: Vec<OutputKind>,
    pub spec: ContractSpec,
    pub primary: ScheduleRun,
    pub comparison: Option<Comparison>,
    pub sweep: Option<SweepTable>,
    pub provenance: Provenance,
}

/// Solves `schedule` on `spec` both in closed form (when available) and
/// numerically on `grid`.
pub fn run_schedule(spec: &ContractSpec, schedule: PricingSchedule, grid: &GridSpec) -> Result<ScheduleRun, Error> {
    let closed_form_exists =
        matches!(schedule, PricingSchedule::Constant { .. }) || spec.initial_capacity == 0.0;
    let analytic = if closed_form_exists {
        Some(analytic_path(spec, &schedule)?)
    } else {
        spec.require_buildup()?;
        None
    };
    let numeric = solve(spec, &schedule, grid)?;
    let residuals = residuals(&numeric, spec, &schedule);
    let costs = match &analytic {
        Some(path) => CostReport::for_path(spec, path, &schedule),
        None => CostReport::for_trajectory(spec, &numeric, &schedule),
    };
    Ok(ScheduleRun {
        schedule,
        analytic,
        numeric,
        residuals,
        costs,
    })
}

/// Constant and declining schedules to set against each other. The side not
/// given by the scenario is priced at its break-even base price.
fn comparison_schedules(spec: &ContractSpec, primary: PricingSchedule) -> Result<(PricingSchedule, PricingSchedule), Error> {
    let constant = match primary {
        PricingSchedule::Constant { .. } => primary,
        PricingSchedule::LinearDecline { .. } => {
            let path = fixed_price_path(spec)?;
            PricingSchedule::Constant {
                base_price: adjustment_cost(&path, spec.adjustment_coeff) / spec.total_quantity
                    + spec.marginal_cost,
            }
        }
    };
    let linear = match primary {
        PricingSchedule::LinearDecline { .. } => primary,
        PricingSchedule::Constant { base_price } => {
            let slope = spec.social_cost_rate;
            let base_price = match design_optimal_schedule(spec) {
                Ok(s) => s.base_price(),
                Err(_) => base_price,
            };
            PricingSchedule::LinearDecline { base_price, slope }
        }
    };
    Ok((constant, linear))
}

fn run_sweep(file: &ScenarioFile, spec: &ContractSpec, sweep: &SweepBlock) -> Result<SweepTable, Error> {
    log::info!("sweep over {} with {} points", sweep.parameter, sweep.steps);
    let rows = sweep
        .values()
        .into_par_iter()
        .map(|value| {
            let mut s = spec.clone();
            sweep.parameter.apply(&mut s, value);
            let schedule = file.schedule_for(&s);
            let path = analytic_path(&s, &schedule).map_err(|e| match e {
                Error::Domain { field, message } => Error::Domain {
                    field,
                    message: format!("{message} (at {} = {value})", sweep.parameter),
                },
                other => other,
            })?;
            Ok(SweepRow {
                value,
                costs: CostReport::for_path(&s, &path, &schedule),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(SweepTable {
        parameter: sweep.parameter,
        rows,
    })
}

/// Runs every pipeline the scenario requests. `grid_override` replaces the
/// scenario's solver resolution.
pub fn run(file: &ScenarioFile, grid_override: Option<usize>) -> Result<ScenarioResult, ScenarioError> {
    file.validate()?;
    let wrap = |source: Error| ScenarioError::Model {
        scenario: file.name.clone(),
        source,
    };
    let spec = file.contract_spec();
    let grid_n = grid_override.unwrap_or(file.solver.n);
    let grid = GridSpec::new(grid_n, spec.horizon).map_err(wrap)?;

    let schedule = file.schedule_for(&spec);
    log::info!("scenario `{}`: {} schedule, N = {grid_n}", file.name, schedule.label());
    let primary = run_schedule(&spec, schedule, &grid).map_err(wrap)?;

    let comparison = if file.outputs.contains(&OutputKind::Compare) {
        let (c, l) = comparison_schedules(&spec, schedule).map_err(wrap)?;
        let constant = if c == schedule { primary.clone() } else { run_schedule(&spec, c, &grid).map_err(wrap)? };
        let linear = if l == schedule { primary.clone() } else { run_schedule(&spec, l, &grid).map_err(wrap)? };
        Some(Comparison { constant, linear })
    } else {
        None
    };

    let sweep = match (&file.sweep, file.outputs.contains(&OutputKind::Sweep)) {
        (Some(block), true) => Some(run_sweep(file, &spec, block).map_err(wrap)?),
        _ => None,
    };

    Ok(ScenarioResult {
        name: file.name.clone(),
        outputs: file.outputs.clone(),
        spec,
        primary,
        comparison,
        sweep,
        provenance: Provenance {
            model_version: MODEL_VERSION,
            grid_n,
        },
    })
}

/// `t, z_analytic, z_numeric, zdot_analytic, price` for every grid node.
pub fn path_table(run: &ScheduleRun) -> CsvTable {
    let mut table = CsvTable::new(["t", "z_analytic", "z_numeric", "zdot_analytic", "price"]);
    for (t, z) in run.numeric.times().into_iter().zip(&run.numeric.values) {
        table.push(vec![
            Some(t),
            run.analytic.map(|p| p.value(t)),
            Some(*z),
            run.analytic.map(|p| p.rate(t)),
            Some(run.schedule.price_at(t)),
        ]);
    }
    table
}

pub fn costs_table(costs: &CostReport) -> LabeledTable {
    LabeledTable {
        header: vec!["field".into(), "value".into()],
        rows: costs.fields().into_iter().map(|(k, v)| (k.to_string(), vec![v])).collect(),
    }
}

pub fn compare_path_table(cmp: &Comparison) -> CsvTable {
    let mut table = CsvTable::new([
        "t",
        "z_constant",
        "z_linear",
        "z_numeric_constant",
        "z_numeric_linear",
        "price_constant",
        "price_linear",
    ]);
    let times = cmp.constant.numeric.times();
    for (i, t) in times.into_iter().enumerate() {
        table.push(vec![
            Some(t),
            cmp.constant.analytic.map(|p| p.value(t)),
            cmp.linear.analytic.map(|p| p.value(t)),
            Some(cmp.constant.numeric.values[i]),
            Some(cmp.linear.numeric.values[i]),
            Some(cmp.constant.schedule.price_at(t)),
            Some(cmp.linear.schedule.price_at(t)),
        ]);
    }
    table
}

pub fn compare_costs_table(cmp: &Comparison) -> LabeledTable {
    let linear = cmp.linear.costs.fields();
    LabeledTable {
        header: vec!["field".into(), "constant".into(), "linear".into()],
        rows: cmp
            .constant
            .costs
            .fields()
            .into_iter()
            .filter_map(|(k, v)| {
                linear
                    .iter()
                    .find(|(name, _)| *name == k)
                    .map(|(_, w)| (k.to_string(), vec![v, *w]))
            })
            .collect(),
    }
}

pub fn sweep_table(sweep: &SweepTable) -> CsvTable {
    let mut header = vec![sweep.parameter.name().to_string()];
    if let Some(first) = sweep.rows.first() {
        header.extend(first.costs.fields().into_iter().map(|(k, _)| k.to_string()));
    }
    let width = header.len();
    let mut table = CsvTable::new(header);
    for row in &sweep.rows {
        let mut cells = vec![Some(row.value)];
        cells.extend(row.costs.fields().into_iter().map(|(_, v)| Some(v)));
        cells.resize(width, None);
        table.push(cells);
    }
    table
}

pub(crate) fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf, ScenarioError> {
    std::fs::write(&path, contents).map_err(|source| ScenarioError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), ScenarioError> {
    std::fs::create_dir_all(dir).map_err(|source| ScenarioError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes one CSV per requested output and returns the paths in output order.
///
/// * `path`: `<name>.path.csv`
/// * `costs`: `<name>.costs.csv`
/// * `compare`: `<name>.compare.path.csv` and `<name>.compare.costs.csv`
/// * `sweep`: `<name>.sweep.csv`
pub fn write_csv(result: &ScenarioResult, out_dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    let mut written = Vec::new();
    if result.outputs.is_empty() {
        return Ok(written);
    }
    ensure_dir(out_dir)?;
    let file = |suffix: &str| out_dir.join(format!("{}.{suffix}", result.name));
    for output in &result.outputs {
        match output {
            OutputKind::Path => {
                written.push(write_file(file("path.csv"), &path_table(&result.primary).render())?);
            }
            OutputKind::Costs => {
                written.push(write_file(file("costs.csv"), &costs_table(&result.primary.costs).render())?);
            }
            OutputKind::Compare => {
                if let Some(cmp) = &result.comparison {
                    written.push(write_file(file("compare.path.csv"), &compare_path_table(cmp).render())?);
                    written.push(write_file(file("compare.costs.csv"), &compare_costs_table(cmp).render())?);
                }
            }
            OutputKind::Sweep => {
                if let Some(sweep) = &result.sweep {
                    written.push(write_file(file("sweep.csv"), &sweep_table(sweep).render())?);
                }
            }
        }
    }
    Ok(written)
}
