//! Social planner accounting: delay costs, the optimal delivery horizon,
//! benefit/cost ratios and the break-even declining price schedule.
//!
//! Two delay-cost conventions appear here. The opportunity cost integrates
//! the not-yet-supplied share, `k int (1 - Z_t / Z_T) dt`; the pandemic cost
//! weights deliveries by their time, `k int t z dt`. When the quantity
//! constraint holds they differ only by the factor `Z_T`.

use crate::contract::{
    adjustment_cost, fixed_price_path, mean_delivery_delay, profit, revenue, CapacityPath,
    ContractSpec, PricingSchedule,
};
use crate::error::{Error, Result};
use crate::solver::Trajectory;

/// Decomposed costs of one contract outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostReport {
    pub adjustment_cost: f64,
    /// `k int_0^T (1 - Z_t / Z_T) dt`.
    pub opportunity_cost: f64,
    /// Adjustment plus opportunity cost.
    pub social_cost: f64,
    /// Adjustment cost per dose.
    pub unit_adjustment_cost: f64,
    /// `k int_0^T t z dt`.
    pub pandemic_cost: f64,
    pub mean_delivery_delay: f64,
    pub revenue: f64,
    pub profit: f64,
    /// `k T_nhi - social_cost`, when the no-vaccine duration is known.
    pub benefit: Option<f64>,
    pub benefit_cost_ratio: Option<f64>,
}

impl CostReport {
    /// Costs of `path` delivered under `schedule`, using the exact
    /// polynomial integrals of the path.
    pub fn for_path(spec: &ContractSpec, path: &CapacityPath, schedule: &PricingSchedule) -> Self {
        let k = spec.social_cost_rate;
        let adj = adjustment_cost(path, spec.adjustment_coeff);
        let opportunity = k * (path.horizon - path.cumulative_area() / spec.total_quantity);
        Self::assemble(spec, adj, opportunity, path, schedule)
    }

    /// Costs of a numerically solved trajectory, from trapezoid sums and
    /// forward differences. Used when no closed form exists.
    pub fn for_trajectory(spec: &ContractSpec, traj: &Trajectory, schedule: &PricingSchedule) -> Self {
        let k = spec.social_cost_rate;
        let z = spec.total_quantity;
        let t = traj.grid.horizon();
        let adj = traj.adjustment_cost(spec.adjustment_coeff);
        let moment = traj.first_moment();
        let cumulative_area = t * traj.total_output() - moment;
        let opportunity = k * (t - cumulative_area / z);
        let social = adj + opportunity;
        let revenue = traj.revenue(schedule);
        let benefit = spec.natural_herd_immunity_time.map(|t_nhi| k * t_nhi - social);
        CostReport {
            adjustment_cost: adj,
            opportunity_cost: opportunity,
            social_cost: social,
            unit_adjustment_cost: adj / z,
            pandemic_cost: k * moment,
            mean_delivery_delay: moment / z,
            revenue,
            profit: revenue - adj - spec.marginal_cost * z,
            benefit,
            benefit_cost_ratio: benefit.and_then(|b| (adj > 0.0).then(|| b / adj)),
        }
    }

    fn assemble(
        spec: &ContractSpec,
        adj: f64,
        opportunity: f64,
        path: &CapacityPath,
        schedule: &PricingSchedule,
    ) -> Self {
        let k = spec.social_cost_rate;
        let social = adj + opportunity;
        let benefit = spec.natural_herd_immunity_time.map(|t_nhi| k * t_nhi - social);
        let benefit_cost_ratio = benefit.and_then(|b| (adj > 0.0).then(|| b / adj));
        CostReport {
            adjustment_cost: adj,
            opportunity_cost: opportunity,
            social_cost: social,
            unit_adjustment_cost: adj / spec.total_quantity,
            pandemic_cost: pandemic_cost(path, k),
            mean_delivery_delay: mean_delivery_delay(path, spec.total_quantity),
            revenue: revenue(path, schedule),
            profit: profit(path, schedule, spec),
            benefit,
            benefit_cost_ratio,
        }
    }

    /// `(name, value)` pairs in a fixed order; absent optional fields are skipped.
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![
            ("adjustment_cost", self.adjustment_cost),
            ("opportunity_cost", self.opportunity_cost),
            ("social_cost", self.social_cost),
            ("unit_adjustment_cost", self.unit_adjustment_cost),
            ("pandemic_cost", self.pandemic_cost),
            ("mean_delivery_delay", self.mean_delivery_delay),
            ("revenue", self.revenue),
            ("profit", self.profit),
        ];
        if let Some(b) = self.benefit {
            out.push(("benefit", b));
        }
        if let Some(r) = self.benefit_cost_ratio {
            out.push(("benefit_cost_ratio", r));
        }
        out
    }
}

fn require_zero_initial_capacity(spec: &ContractSpec, what: &str) -> Result<()> {
    if spec.initial_capacity != 0.0 {
        return Err(Error::domain(
            "initial_capacity",
            format!("{what} is only defined for zero initial capacity"),
        ));
    }
    Ok(())
}

fn require_positive_cost_rate(spec: &ContractSpec) -> Result<()> {
    if spec.social_cost_rate <= 0.0 {
        return Err(Error::domain(
            "social_cost_rate",
            "must be > 0 for a finite optimal horizon; with k = 0 social cost falls monotonically in T",
        ));
    }
    Ok(())
}

/// Delay cost `k int (1 - Z_t / Z_T) dt` of the fixed-price path. Uses the
/// closed form `5 k T / 8` when `z0 = 0`, the exact polynomial integral
/// otherwise.
pub fn opportunity_cost_fixed_price(spec: &ContractSpec) -> Result<f64> {
    spec.validate()?;
    let k = spec.social_cost_rate;
    if spec.initial_capacity == 0.0 {
        return Ok(0.625 * k * spec.horizon);
    }
    let path = fixed_price_path(spec)?;
    Ok(k * (spec.horizon - path.cumulative_area() / spec.total_quantity))
}

/// Social cost of a fixed-price contract at the contract's horizon, priced at
/// `spec.base_price`.
///
/// With `z0 = 0` the two cost terms are the closed forms `5 k T / 8` and
/// `3 a_z Z_T^2 / T^3`.
pub fn social_cost(spec: &ContractSpec) -> Result<CostReport> {
    let path = fixed_price_path(spec)?;
    let schedule = PricingSchedule::Constant {
        base_price: spec.base_price,
    };
    if spec.initial_capacity != 0.0 {
        return Ok(CostReport::for_path(spec, &path, &schedule));
    }
    let t = spec.horizon;
    let adj = 3.0 * spec.adjustment_coeff * spec.total_quantity.powi(2) / t.powi(3);
    let opportunity = opportunity_cost_fixed_price(spec)?;
    Ok(CostReport::assemble(spec, adj, opportunity, &path, &schedule))
}

/// Horizon minimizing `5 k T / 8 + 3 a_z Z_T^2 / T^3`:
/// `T_opt = (72 Z_T^2 a_z / (5 k))^(1/4)`.
pub fn optimal_horizon(spec: &ContractSpec) -> Result<f64> {
    spec.validate()?;
    require_zero_initial_capacity(spec, "the optimal horizon")?;
    require_positive_cost_rate(spec)?;
    Ok((72.0 * spec.total_quantity.powi(2) * spec.adjustment_coeff / (5.0 * spec.social_cost_rate))
        .powf(0.25))
}

/// `spec` with its horizon replaced by the optimal one.
pub fn at_optimal_horizon(spec: &ContractSpec) -> Result<ContractSpec> {
    let t_opt = optimal_horizon(spec)?;
    Ok(ContractSpec {
        horizon: t_opt,
        ..spec.clone()
    })
}

/// Break-even unit price at the optimal horizon,
/// `3 a_z^(1/4) Z_T^(-1/2) (5 k / 72)^(3/4)`.
pub fn unit_cost_at_optimum(spec: &ContractSpec) -> Result<f64> {
    optimal_horizon(spec)?;
    Ok(3.0
        * spec.adjustment_coeff.powf(0.25)
        * spec.total_quantity.powf(-0.5)
        * (5.0 * spec.social_cost_rate / 72.0).powf(0.75))
}

/// Break-even unit price `3 a_z Z_T / T^3` at the contract's own horizon.
pub fn unit_cost_fixed_t(spec: &ContractSpec) -> Result<f64> {
    spec.validate()?;
    require_zero_initial_capacity(spec, "the fixed-horizon unit cost")?;
    Ok(3.0 * spec.adjustment_coeff * spec.total_quantity / spec.horizon.powi(3))
}

/// Benefit/cost accounting against the no-vaccine baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenefitReport {
    pub horizon: f64,
    pub benefit: f64,
    /// Adjustment cost of the order at `horizon`.
    pub cost: f64,
    pub ratio: f64,
}

/// `(24/5)(T_nhi/T - 5/6)`: the benefit/cost ratio when `T` is the optimal
/// horizon.
pub fn benefit_cost_ratio(nhi_to_horizon: f64) -> f64 {
    (24.0 * nhi_to_horizon - 20.0) / 5.0
}

/// Social benefit `k T_nhi - E_social(T)` and its ratio to the adjustment cost.
///
/// With `horizon = None` the optimal horizon is used and the closed forms
/// `k T (T_nhi/T - 5/6)` and `(24/5)(T_nhi/T - 5/6)` apply. An explicit
/// horizon evaluates the same accounting at that `T`.
pub fn social_benefit(spec: &ContractSpec, horizon: Option<f64>) -> Result<BenefitReport> {
    spec.validate()?;
    let t_nhi = spec.natural_herd_immunity_time.ok_or_else(|| {
        Error::domain("natural_herd_immunity_time", "required for benefit accounting")
    })?;
    let k = spec.social_cost_rate;
    match horizon {
        None => {
            let t = optimal_horizon(spec)?;
            let x = t_nhi / t;
            if x < 5.0 / 6.0 {
                return Err(Error::domain(
                    "natural_herd_immunity_time",
                    format!("T_nhi / T_opt = {x} is below 5/6; vaccination yields no net benefit"),
                ));
            }
            Ok(BenefitReport {
                horizon: t,
                benefit: k * t * (x - 5.0 / 6.0),
                cost: 3.0 * spec.adjustment_coeff * spec.total_quantity.powi(2) / t.powi(3),
                ratio: benefit_cost_ratio(x),
            })
        }
        Some(t) => {
            let at_t = ContractSpec {
                horizon: t,
                ..spec.clone()
            };
            require_zero_initial_capacity(&at_t, "benefit accounting")?;
            let report = social_cost(&at_t)?;
            let benefit = k * t_nhi - report.social_cost;
            if benefit < 0.0 {
                return Err(Error::domain(
                    "natural_herd_immunity_time",
                    format!("benefit {benefit} is negative at horizon {t}"),
                ));
            }
            Ok(BenefitReport {
                horizon: t,
                benefit,
                cost: report.adjustment_cost,
                ratio: benefit / report.adjustment_cost,
            })
        }
    }
}

/// Declining schedule `p(t) = p0* - k t` whose base price lets the firm
/// exactly break even on the declining-price path. Falls back to the
/// constant break-even price when `k = 0`.
pub fn design_optimal_schedule(spec: &ContractSpec) -> Result<PricingSchedule> {
    spec.validate()?;
    require_zero_initial_capacity(spec, "the optimal schedule")?;
    let k = spec.social_cost_rate;
    let path = crate::contract::declining_price_path(spec)?;
    let adj = adjustment_cost(&path, spec.adjustment_coeff);
    let z = spec.total_quantity;
    let base_price = (adj + k * path.first_moment()) / z + spec.marginal_cost;
    Ok(if k == 0.0 {
        PricingSchedule::Constant { base_price }
    } else {
        PricingSchedule::LinearDecline { base_price, slope: k }
    })
}

/// `k int_0^T t z dt`.
pub fn pandemic_cost(path: &CapacityPath, social_cost_rate: f64) -> f64 {
    social_cost_rate * path.first_moment()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceValue {
    pub usd: f64,
    pub source: &'static str,
}

/// Order-of-magnitude per-dose values in USD, for annotating reports.
/// These never enter cost arithmetic; model costs are in abstract units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueBounds {
    pub social_value_lower: ReferenceValue,
    pub social_value_upper: ReferenceValue,
    pub observed_price_low: ReferenceValue,
    pub observed_price_high: ReferenceValue,
    pub global_cost_per_dose: ReferenceValue,
}

pub fn value_bounds() -> ValueBounds {
    ValueBounds {
        social_value_lower: ReferenceValue {
            usd: 500.0,
            source: "willingness-to-pay survey, ~1.1% of GDP per capita",
        },
        social_value_upper: ReferenceValue {
            usd: 1500.0,
            source: "avoided economic cost, 2-2.5% of US GDP per capita per dose",
        },
        observed_price_low: ReferenceValue {
            usd: 15.0,
            source: "reported contract prices",
        },
        observed_price_high: ReferenceValue {
            usd: 30.0,
            source: "reported contract prices",
        },
        global_cost_per_dose: ReferenceValue {
            usd: 1300.0,
            source: "16 trillion USD global cost over 6 billion vaccinations, two doses each",
        },
    }
}
