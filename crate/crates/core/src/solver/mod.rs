//! Discretized variational solver.
//!
//! The functional `a_z int zdot^2 dt - int p(t) z dt` is discretized on a
//! uniform grid with forward differences for `zdot` and trapezoid weights for
//! the integrals. With `z_0` eliminated the Hessian in `z_1..z_N` is symmetric
//! tridiagonal; the quantity constraint adds one dense border row and column.
//! The KKT system is solved exactly by two tridiagonal solves that share one
//! factorization, followed by a scalar Schur complement for the multiplier.

mod tridiag;

use log::warn;

use crate::contract::{analytic_path, ContractSpec, PricingSchedule};
use crate::error::{Error, Result};

pub use tridiag::{LdlFactor, SymTridiagonal};

/// Relative tolerance for matching a grid horizon against a spec horizon.
const HORIZON_MATCH_RTOL: f64 = 1e-12;

/// Uniform grid `t_i = i T / N`, `i = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n_intervals: usize,
    horizon: f64,
}

impl GridSpec {
    pub fn new(n_intervals: usize, horizon: f64) -> Result<Self> {
        if n_intervals < 2 {
            return Err(Error::domain("n_intervals", format!("must be >= 2, got {n_intervals}")));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::domain("horizon", format!("must be finite and > 0, got {horizon}")));
        }
        Ok(GridSpec { n_intervals, horizon })
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.n_intervals as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.horizon * i as f64 / self.n_intervals as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_intervals).map(|i| self.time(i)).collect()
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n_intervals {
            0.5 * self.step()
        } else {
            self.step()
        }
    }

    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        values.iter().enumerate().map(|(i, v)| self.weight(i) * v).sum()
    }
}

/// Node values of a solved trajectory and the multiplier of the quantity
/// constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub multiplier: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    pub fn total_output(&self) -> f64 {
        self.grid.trapezoid(&self.values)
    }

    /// Discrete `a_z int zdot^2 dt` with forward differences.
    pub fn adjustment_cost(&self, adjustment_coeff: f64) -> f64 {
        let dt = self.grid.step();
        let energy: f64 = self.values.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
        adjustment_coeff * energy / dt
    }

    /// Trapezoid `int t z dt`.
    pub fn first_moment(&self) -> f64 {
        let weighted: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| self.grid.time(i) * z)
            .collect();
        self.grid.trapezoid(&weighted)
    }

    /// Trapezoid `int p(t) z dt`.
    pub fn revenue(&self, schedule: &PricingSchedule) -> f64 {
        let weighted: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| schedule.price_at(self.grid.time(i)) * z)
            .collect();
        self.grid.trapezoid(&weighted)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// How well a trajectory satisfies the continuous optimality conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// Max over interior nodes of `|2 a_z z'' - (lambda - p(t_i))|`.
    pub max_euler_lagrange_residual: f64,
    /// Backward-difference estimate of `zdot(T)`.
    pub boundary_residual: f64,
    /// Trapezoid total minus `Z_T`.
    pub constraint_residual: f64,
}

fn check_grid(spec: &ContractSpec, grid: &GridSpec) -> Result<()> {
    spec.validate()?;
    let rel = (grid.horizon - spec.horizon).abs() / spec.horizon;
    if rel > HORIZON_MATCH_RTOL {
        return Err(Error::domain(
            "horizon",
            format!("grid horizon {} differs from contract horizon {}", grid.horizon, spec.horizon),
        ));
    }
    Ok(())
}

/// Minimizes `a_z sum (dz/dt)^2 dt + sum_i c_i z_i` subject to
/// `sum w_i z_i = Z_T` and `z_0 = spec.initial_capacity`, where
/// `linear_cost[i]` is `c_i` for node `i` (length `N + 1`; entry 0 ignored).
///
/// The returned multiplier `mu` satisfies `grad + mu w = 0`.
fn solve_linear_cost(spec: &ContractSpec, grid: &GridSpec, linear_cost: &[f64]) -> Result<Trajectory> {
    let n = grid.n_intervals;
    let dt = grid.step();
    let stiffness = 2.0 * spec.adjustment_coeff / dt;
    let z0 = spec.initial_capacity;

    let mut diag = vec![2.0 * stiffness; n];
    diag[n - 1] = stiffness;
    let hessian = SymTridiagonal::new(diag, vec![-stiffness; n - 1])?;
    let factor = hessian.factor()?;

    let weights: Vec<f64> = (1..=n).map(|i| grid.weight(i)).collect();
    let mut rhs: Vec<f64> = (1..=n).map(|i| -linear_cost[i]).collect();
    rhs[0] += stiffness * z0;

    let u = factor.solve(&rhs);
    let v = factor.solve(&weights);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let schur = dot(&weights, &v);
    if !(schur.is_finite() && schur > 0.0) {
        return Err(Error::Solver(format!("non-positive Schur complement {schur:e}")));
    }
    let target = spec.total_quantity - grid.weight(0) * z0;
    let multiplier = (dot(&weights, &u) - target) / schur;

    let mut values = Vec::with_capacity(n + 1);
    values.push(z0);
    values.extend(u.iter().zip(&v).map(|(ui, vi)| ui - multiplier * vi));

    if values.iter().any(|z| !z.is_finite()) || !multiplier.is_finite() {
        return Err(Error::Solver("non-finite solution".into()));
    }
    let traj = Trajectory {
        grid: *grid,
        values,
        multiplier,
    };
    let min = traj.min_value();
    if min < 0.0 {
        warn!("solver: trajectory has negative capacity (min node value {min:.6e})");
    }
    Ok(traj)
}

/// Firm's problem: maximize trapezoid revenue minus discrete adjustment cost
/// under the quantity constraint. The multiplier is the shadow price
/// `lambda` in `2 a_z zddot = lambda - p(t)`.
pub fn solve(spec: &ContractSpec, schedule: &PricingSchedule, grid: &GridSpec) -> Result<Trajectory> {
    check_grid(spec, grid)?;
    let cost: Vec<f64> = (0..=grid.n_intervals)
        .map(|i| -grid.weight(i) * schedule.price_at(grid.time(i)))
        .collect();
    solve_linear_cost(spec, grid, &cost)
}

/// Planner's problem: minimize `k sum w_i t_i z_i` plus the discrete
/// adjustment cost under the same constraints. The multiplier `mu`
/// satisfies `2 a_z zddot = mu + k t`.
pub fn solve_planner(spec: &ContractSpec, grid: &GridSpec) -> Result<Trajectory> {
    check_grid(spec, grid)?;
    let k = spec.social_cost_rate;
    let cost: Vec<f64> = (0..=grid.n_intervals)
        .map(|i| k * grid.weight(i) * grid.time(i))
        .collect();
    solve_linear_cost(spec, grid, &cost)
}

/// Discrete firm objective as a cost: adjustment cost minus revenue.
pub fn firm_objective(traj: &Trajectory, spec: &ContractSpec, schedule: &PricingSchedule) -> f64 {
    traj.adjustment_cost(spec.adjustment_coeff) - traj.revenue(schedule)
}

/// Discrete planner objective: pandemic cost plus adjustment cost.
pub fn planner_objective(traj: &Trajectory, spec: &ContractSpec) -> f64 {
    spec.social_cost_rate * traj.first_moment() + traj.adjustment_cost(spec.adjustment_coeff)
}

pub fn residuals(traj: &Trajectory, spec: &ContractSpec, schedule: &PricingSchedule) -> ResidualReport {
    let dt = traj.grid.step();
    let z = &traj.values;
    let n = traj.grid.n_intervals;
    let two_a = 2.0 * spec.adjustment_coeff;
    let max_el = (1..n)
        .map(|i| {
            let second = (z[i + 1] - 2.0 * z[i] + z[i - 1]) / (dt * dt);
            (two_a * second - (traj.multiplier - schedule.price_at(traj.grid.time(i)))).abs()
        })
        .fold(0.0, f64::max);
    ResidualReport {
        max_euler_lagrange_residual: max_el,
        boundary_residual: (z[n] - z[n - 1]) / dt,
        constraint_residual: traj.total_output() - spec.total_quantity,
    }
}

/// Result of a grid-refinement study against the closed-form path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Least-squares slope of `log(deviation)` against `log(dt)`; NaN if
    /// fewer than two samples lie above the round-off floor.
    pub order: f64,
    /// `(dt, max node-wise deviation)` per grid.
    pub samples: Vec<(f64, f64)>,
    /// True if any sample sits at the round-off floor and was excluded.
    pub at_floor: bool,
}

/// Deviations at or below this multiple of the path scale count as round-off.
const DEVIATION_FLOOR: f64 = 1e-12;

/// Fits the observed order from `(dt, deviation)` samples. `scale` sets the
/// round-off floor.
pub fn fit_order(samples: &[(f64, f64)], scale: f64) -> ConvergenceReport {
    let floor = DEVIATION_FLOOR * scale.abs().max(f64::MIN_POSITIVE);
    let usable: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, dev)| *dev > floor)
        .map(|(dt, dev)| (dt.ln(), dev.ln()))
        .collect();
    let at_floor = usable.len() < samples.len();
    let order = if usable.len() < 2 {
        f64::NAN
    } else {
        let m = usable.len() as f64;
        let mx = usable.iter().map(|p| p.0).sum::<f64>() / m;
        let my = usable.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = usable.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = usable.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        sxy / sxx
    };
    ConvergenceReport {
        order,
        samples: samples.to_vec(),
        at_floor,
    }
}

/// Solves on each grid and fits the convergence order of the max node-wise
/// deviation from the closed-form path.
pub fn convergence_order(
    spec: &ContractSpec,
    schedule: &PricingSchedule,
    grids: &[GridSpec],
) -> Result<ConvergenceReport> {
    if grids.len() < 3 {
        return Err(Error::InsufficientData(format!("need at least 3 grids, got {}", grids.len())));
    }
    if grids.windows(2).any(|w| w[1].n_intervals <= w[0].n_intervals) {
        return Err(Error::InsufficientData("grids must have strictly increasing N".into()));
    }
    let path = analytic_path(spec, schedule).map_err(|e| {
        Error::InsufficientData(format!("no closed-form reference for this spec: {e}"))
    })?;
    let mut samples = Vec::with_capacity(grids.len());
    for grid in grids {
        let traj = solve(spec, schedule, grid)?;
        let dev = traj
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| (z - path.value(grid.time(i))).abs())
            .fold(0.0, f64::max);
        samples.push((grid.step(), dev));
    }
    Ok(fit_order(&samples, spec.total_quantity / spec.horizon))
}
