//! Plain-Rust computations behind the browser demo.

use vaxcontract::contract::{adjustment_cost, declining_price_path, fixed_price_path, mean_delivery_delay};
use vaxcontract::policy::{optimal_horizon, social_cost};
use vaxcontract::solver::{residuals, solve};
use vaxcontract::{ContractSpec, GridSpec, PricingSchedule, Result};

/// Sampled constant-price and declining-price capacity paths for one contract.
#[derive(Debug, Clone, PartialEq)]
pub struct PathComparison {
    pub times: Vec<f64>,
    pub constant: Vec<f64>,
    pub declining: Vec<f64>,
    pub adjustment_cost: [f64; 2],
    pub mean_delay: [f64; 2],
}

/// Social cost as a function of the delivery horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct CostCurve {
    pub horizons: Vec<f64>,
    pub adjustment: Vec<f64>,
    pub opportunity: Vec<f64>,
    pub total: Vec<f64>,
    pub optimal_horizon: f64,
    pub optimal_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverCheck {
    pub times: Vec<f64>,
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
    pub max_error: f64,
    pub euler_lagrange_residual: f64,
}

fn linspace(from: f64, to: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    let step = (to - from) / (samples - 1) as f64;
    (0..samples).map(|i| from + step * i as f64).collect()
}

fn contract(total_quantity: f64, horizon: f64, adjustment_coeff: f64, social_cost_rate: f64) -> Result<ContractSpec> {
    let spec = ContractSpec::new(total_quantity, horizon, adjustment_coeff).with_social_cost_rate(social_cost_rate);
    spec.validate()?;
    Ok(spec)
}

pub fn compare_paths(
    total_quantity: f64,
    horizon: f64,
    adjustment_coeff: f64,
    social_cost_rate: f64,
    samples: usize,
) -> Result<PathComparison> {
    let spec = contract(total_quantity, horizon, adjustment_coeff, social_cost_rate)?;
    let fixed = fixed_price_path(&spec)?;
    let declining = declining_price_path(&spec)?;
    let times = linspace(0.0, horizon, samples);
    Ok(PathComparison {
        constant: times.iter().map(|&t| fixed.value(t)).collect(),
        declining: times.iter().map(|&t| declining.value(t)).collect(),
        times,
        adjustment_cost: [
            adjustment_cost(&fixed, adjustment_coeff),
            adjustment_cost(&declining, adjustment_coeff),
        ],
        mean_delay: [
            mean_delivery_delay(&fixed, total_quantity),
            mean_delivery_delay(&declining, total_quantity),
        ],
    })
}

/// Samples horizons in `(0, max_horizon]`; `max_horizon <= 0` picks 3 T_opt.
pub fn cost_curve(
    total_quantity: f64,
    adjustment_coeff: f64,
    social_cost_rate: f64,
    max_horizon: f64,
    samples: usize,
) -> Result<CostCurve> {
    let spec = contract(total_quantity, 1.0, adjustment_coeff, social_cost_rate)?;
    let t_opt = optimal_horizon(&spec)?;
    let t_max = if max_horizon > 0.0 { max_horizon } else { 3.0 * t_opt };
    let mut horizons = linspace(0.0, t_max, samples + 1);
    horizons.remove(0);
    let mut curve = CostCurve {
        horizons: Vec::with_capacity(horizons.len()),
        adjustment: Vec::with_capacity(horizons.len()),
        opportunity: Vec::with_capacity(horizons.len()),
        total: Vec::with_capacity(horizons.len()),
        optimal_horizon: t_opt,
        optimal_cost: social_cost(&ContractSpec { horizon: t_opt, ..spec.clone() })?.social_cost,
    };
    for t in horizons {
        let report = social_cost(&ContractSpec { horizon: t, ..spec.clone() })?;
        curve.horizons.push(t);
        curve.adjustment.push(report.adjustment_cost);
        curve.opportunity.push(report.opportunity_cost);
        curve.total.push(report.social_cost);
    }
    Ok(curve)
}

/// Solves the declining-price contract on `n` intervals and compares it with
/// the closed form.
pub fn check_solver(
    total_quantity: f64,
    horizon: f64,
    adjustment_coeff: f64,
    social_cost_rate: f64,
    n: usize,
) -> Result<SolverCheck> {
    let spec = contract(total_quantity, horizon, adjustment_coeff, social_cost_rate)?;
    let schedule = PricingSchedule::LinearDecline {
        base_price: 0.0,
        slope: social_cost_rate,
    };
    let grid = GridSpec::new(n, horizon)?;
    let traj = solve(&spec, &schedule, &grid)?;
    let path = declining_price_path(&spec)?;
    let times = grid.times();
    let analytic: Vec<f64> = times.iter().map(|&t| path.value(t)).collect();
    let max_error = analytic
        .iter()
        .zip(&traj.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let report = residuals(&traj, &spec, &schedule);
    Ok(SolverCheck {
        times,
        analytic,
        numeric: traj.values,
        max_error,
        euler_lagrange_residual: report.max_euler_lagrange_residual,
    })
}
