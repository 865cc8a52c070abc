//! Reference datasets for the two standard figures.
//!
//! Figure 1: fixed-price buildup on `[0, 1]` followed by constant production
//! at the terminal rate on `[1, 2]`. Figure 2: the declining-price path with
//! `k = 48 a_z Z_T / T^4` next to the constant-price path on one grid.

use std::path::{Path, PathBuf};

use crate::policy::design_optimal_schedule;
use crate::scenario::csv::CsvTable;
use crate::scenario::{
    compare_costs_table, compare_path_table, costs_table, ensure_dir, run, write_file,
    ContractBlock, OutputKind, ScenarioError, ScenarioFile, ScheduleBlock, ScheduleKind,
    SolverBlock, DEFAULT_GRID_INTERVALS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Buildup,
    DecliningPrice,
}

impl Figure {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Figure::Buildup),
            2 => Some(Figure::DecliningPrice),
            _ => None,
        }
    }
}

fn unit_contract(social_cost_rate: f64) -> ContractBlock {
    ContractBlock {
        total_quantity: 1.0,
        horizon: 1.0,
        initial_capacity: 0.0,
        adjustment_coeff: 1.0,
        social_cost_rate,
        marginal_cost: 0.0,
        natural_herd_immunity_time: None,
    }
}

/// The scenario each figure is generated from.
pub fn figure_scenario(figure: Figure) -> ScenarioFile {
    match figure {
        Figure::Buildup => ScenarioFile {
            name: "fig1".into(),
            outputs: vec![OutputKind::Path, OutputKind::Costs],
            contract: unit_contract(1.0),
            schedule: ScheduleBlock {
                kind: ScheduleKind::Constant,
                p0: 3.0,
                slope: None,
            },
            solver: SolverBlock::default(),
            sweep: None,
        },
        Figure::DecliningPrice => {
            let contract = unit_contract(48.0);
            let mut file = ScenarioFile {
                name: "fig2".into(),
                outputs: vec![OutputKind::Compare],
                contract,
                schedule: ScheduleBlock {
                    kind: ScheduleKind::Linear,
                    p0: 0.0,
                    slope: None,
                },
                solver: SolverBlock::default(),
                sweep: None,
            };
            let schedule = design_optimal_schedule(&file.contract_spec())
                .expect("figure 2 contract is valid");
            file.schedule.p0 = schedule.base_price();
            file
        }
    }
}

/// Writes the figure's CSVs into `out_dir` and returns their paths.
pub fn write_figure(figure: Figure, out_dir: &Path, grid: Option<usize>) -> Result<Vec<PathBuf>, ScenarioError> {
    let file = figure_scenario(figure);
    let result = run(&file, Some(grid.unwrap_or(DEFAULT_GRID_INTERVALS)))?;
    ensure_dir(out_dir)?;
    let out = |suffix: &str| out_dir.join(format!("{}.{suffix}", file.name));
    match figure {
        Figure::Buildup => {
            let run = &result.primary;
            let path = run.analytic.expect("fixed-price path has a closed form");
            let grid = run.numeric.grid;
            let n = grid.n_intervals();
            let terminal = path.value(grid.horizon());
            let terminal_numeric = run.numeric.values[n];
            let price = run.schedule.base_price();

            let mut table = CsvTable::new(["t", "z_analytic", "z_numeric", "zdot_analytic", "price"]);
            for (i, z) in run.numeric.values.iter().enumerate() {
                let t = grid.time(i);
                table.push(vec![Some(t), Some(path.value(t)), Some(*z), Some(path.rate(t)), Some(price)]);
            }
            // Second period: production held at the terminal rate.
            for i in 1..=n {
                let t = grid.horizon() + grid.time(i);
                table.push(vec![Some(t), Some(terminal), Some(terminal_numeric), Some(0.0), Some(price)]);
            }
            Ok(vec![
                write_file(out("path.csv"), &table.render())?,
                write_file(out("costs.csv"), &costs_table(&run.costs).render())?,
            ])
        }
        Figure::DecliningPrice => {
            let cmp = result.comparison.as_ref().expect("figure 2 requests a comparison");
            Ok(vec![
                write_file(out("compare.path.csv"), &compare_path_table(cmp).render())?,
                write_file(out("compare.costs.csv"), &compare_costs_table(cmp).render())?,
            ])
        }
    }
}
