//! Contract parameterization and the closed-form capacity paths.
//!
//! All path integrals are evaluated from antiderivatives of the cubic, never
//! by quadrature, so the quantity constraint and the natural boundary
//! condition can be checked to round-off.

use log::warn;

use crate::error::{Error, Result};

/// Number of points used when scanning a path for negative capacity.
pub const NONNEGATIVITY_SCAN_POINTS: usize = 10_001;

/// Full parameterization of one delivery contract.
///
/// Prices are understood net of the marginal cost; `marginal_cost` only
/// enters the firm's profit.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractSpec {
    /// Total number of doses to deliver over `[0, horizon]`.
    pub total_quantity: f64,
    /// Contractual delivery period.
    pub horizon: f64,
    /// Production rate at `t = 0`.
    pub initial_capacity: f64,
    /// Weight on the squared rate of capacity change.
    pub adjustment_coeff: f64,
    /// Cost per unit time of the ongoing pandemic.
    pub social_cost_rate: f64,
    pub base_price: f64,
    pub marginal_cost: f64,
    /// Pandemic duration without a vaccine; only used for benefit accounting.
    pub natural_herd_immunity_time: Option<f64>,
}

impl ContractSpec {
    pub fn new(total_quantity: f64, horizon: f64, adjustment_coeff: f64) -> Self {
        ContractSpec {
            total_quantity,
            horizon,
            initial_capacity: 0.0,
            adjustment_coeff,
            social_cost_rate: 0.0,
            base_price: 0.0,
            marginal_cost: 0.0,
            natural_herd_immunity_time: None,
        }
    }

    pub fn with_initial_capacity(mut self, z0: f64) -> Self {
        self.initial_capacity = z0;
        self
    }

    pub fn with_social_cost_rate(mut self, k: f64) -> Self {
        self.social_cost_rate = k;
        self
    }

    pub fn with_base_price(mut self, p0: f64) -> Self {
        self.base_price = p0;
        self
    }

    pub fn with_marginal_cost(mut self, c: f64) -> Self {
        self.marginal_cost = c;
        self
    }

    pub fn with_natural_herd_immunity_time(mut self, t_nhi: f64) -> Self {
        self.natural_herd_immunity_time = Some(t_nhi);
        self
    }

    /// Checks the parameter invariants. Field names in errors match the
    /// scenario file keys.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("total_quantity", self.total_quantity),
            ("horizon", self.horizon),
            ("initial_capacity", self.initial_capacity),
            ("adjustment_coeff", self.adjustment_coeff),
            ("social_cost_rate", self.social_cost_rate),
            ("base_price", self.base_price),
            ("marginal_cost", self.marginal_cost),
        ];
        for (field, value) in finite {
            if !value.is_finite() {
                return Err(Error::domain(field, format!("must be finite, got {value}")));
            }
        }
        if self.horizon <= 0.0 {
            return Err(Error::domain("horizon", format!("must be > 0, got {}", self.horizon)));
        }
        if self.total_quantity <= 0.0 {
            return Err(Error::domain(
                "total_quantity",
                format!("must be > 0, got {}", self.total_quantity),
            ));
        }
        if self.adjustment_coeff <= 0.0 {
            return Err(Error::domain(
                "adjustment_coeff",
                format!("must be > 0, got {}", self.adjustment_coeff),
            ));
        }
        if self.initial_capacity < 0.0 {
            return Err(Error::domain(
                "initial_capacity",
                format!("must be >= 0, got {}", self.initial_capacity),
            ));
        }
        if self.social_cost_rate < 0.0 {
            return Err(Error::domain(
                "social_cost_rate",
                format!("must be >= 0, got {}", self.social_cost_rate),
            ));
        }
        if self.marginal_cost < 0.0 {
            return Err(Error::domain(
                "marginal_cost",
                format!("must be >= 0, got {}", self.marginal_cost),
            ));
        }
        if let Some(t_nhi) = self.natural_herd_immunity_time {
            if !(t_nhi.is_finite() && t_nhi > 0.0) {
                return Err(Error::domain(
                    "natural_herd_immunity_time",
                    format!("must be finite and > 0, got {t_nhi}"),
                ));
            }
        }
        Ok(())
    }

    /// Gap between the average rate needed and the initial rate, `Z_T/T - z0`.
    pub fn capacity_gap(&self) -> f64 {
        self.total_quantity / self.horizon - self.initial_capacity
    }

    /// Validates the contract and returns the capacity gap, rejecting the
    /// shutdown regime (gap <= 0).
    pub fn require_buildup(&self) -> Result<f64> {
        self.validate()?;
        let gap = self.capacity_gap();
        if gap <= 0.0 {
            return Err(Error::domain(
                "initial_capacity",
                format!(
                    "capacity gap Z_T/T - z0 = {gap} must be > 0; capacity shutdown is not modelled"
                ),
            ));
        }
        Ok(gap)
    }
}

/// Price paid per dose as a function of delivery time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PricingSchedule {
    Constant { base_price: f64 },
    /// `p(t) = base_price - slope * t`.
    LinearDecline { base_price: f64, slope: f64 },
}

impl PricingSchedule {
    pub fn base_price(&self) -> f64 {
        match *self {
            PricingSchedule::Constant { base_price } => base_price,
            PricingSchedule::LinearDecline { base_price, .. } => base_price,
        }
    }

    pub fn slope(&self) -> f64 {
        match *self {
            PricingSchedule::Constant { .. } => 0.0,
            PricingSchedule::LinearDecline { slope, .. } => slope,
        }
    }

    pub fn price_at(&self, t: f64) -> f64 {
        match *self {
            PricingSchedule::Constant { base_price } => base_price,
            PricingSchedule::LinearDecline { base_price, slope } => base_price - slope * t,
        }
    }

    /// Same schedule shape with a different base price.
    pub fn with_base_price(&self, base_price: f64) -> Self {
        match *self {
            PricingSchedule::Constant { .. } => PricingSchedule::Constant { base_price },
            PricingSchedule::LinearDecline { slope, .. } => {
                PricingSchedule::LinearDecline { base_price, slope }
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PricingSchedule::Constant { .. } => "constant",
            PricingSchedule::LinearDecline { .. } => "linear",
        }
    }
}

/// Cubic capacity trajectory `z(t) = z0 + gamma t + delta t^2 + kappa t^3`
/// on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityPath {
    pub initial: f64,
    pub gamma: f64,
    pub delta: f64,
    pub kappa: f64,
    pub horizon: f64,
}

impl CapacityPath {
    pub fn constant(level: f64, horizon: f64) -> Self {
        CapacityPath {
            initial: level,
            gamma: 0.0,
            delta: 0.0,
            kappa: 0.0,
            horizon,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.initial + t * (self.gamma + t * (self.delta + t * self.kappa))
    }

    /// Rate of capacity change `zdot(t)`.
    pub fn rate(&self, t: f64) -> f64 {
        self.gamma + t * (2.0 * self.delta + t * 3.0 * self.kappa)
    }

    pub fn terminal_rate(&self) -> f64 {
        self.rate(self.horizon)
    }

    /// `int_0^T z dt`.
    pub fn total_output(&self) -> f64 {
        let t = self.horizon;
        t * (self.initial + t * (self.gamma / 2.0 + t * (self.delta / 3.0 + t * self.kappa / 4.0)))
    }

    /// `int_0^T t z dt`.
    pub fn first_moment(&self) -> f64 {
        let t = self.horizon;
        t * t
            * (self.initial / 2.0
                + t * (self.gamma / 3.0 + t * (self.delta / 4.0 + t * self.kappa / 5.0)))
    }

    /// `int_0^T (int_0^s z dt') ds`, the area under the cumulative delivery curve.
    pub fn cumulative_area(&self) -> f64 {
        let t = self.horizon;
        t * t
            * (self.initial / 2.0
                + t * (self.gamma / 6.0 + t * (self.delta / 12.0 + t * self.kappa / 20.0)))
    }

    /// `int_0^T zdot^2 dt`.
    pub fn rate_energy(&self) -> f64 {
        // zdot = a + b t + c t^2
        let (a, b, c) = (self.gamma, 2.0 * self.delta, 3.0 * self.kappa);
        let t = self.horizon;
        t * (a * a
            + t * (a * b + t * ((b * b + 2.0 * a * c) / 3.0 + t * (b * c / 2.0 + t * c * c / 5.0))))
    }

    /// Smallest capacity on a uniform scan of `[0, T]`, as `(t, z)`.
    pub fn min_capacity(&self) -> (f64, f64) {
        let n = NONNEGATIVITY_SCAN_POINTS - 1;
        (0..=n)
            .map(|i| {
                let t = self.horizon * i as f64 / n as f64;
                (t, self.value(t))
            })
            .fold((0.0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    fn warn_if_negative(self, origin: &str) -> Self {
        let (t, z) = self.min_capacity();
        if z < 0.0 {
            warn!("{origin}: capacity path dips below zero (z = {z:.6e} at t = {t:.6})");
        }
        self
    }
}

fn buildup_path(spec: &ContractSpec, gap: f64, kappa: f64) -> CapacityPath {
    let t = spec.horizon;
    CapacityPath {
        initial: spec.initial_capacity,
        gamma: 3.0 * gap / t + 0.75 * kappa * t * t,
        delta: -1.5 * gap / (t * t) - 1.875 * kappa * t,
        kappa,
        horizon: t,
    }
}

/// Cost-minimizing path under a constant price: the inverted parabola
/// `z0 + (3 dZ / T)(t - t^2 / (2T))`.
pub fn fixed_price_path(spec: &ContractSpec) -> Result<CapacityPath> {
    let gap = spec.require_buildup()?;
    Ok(buildup_path(spec, gap, 0.0).warn_if_negative("fixed_price_path"))
}

/// Cost-minimizing path under `p(t) = p0 - k t` with `k = spec.social_cost_rate`.
///
/// Only defined for zero initial capacity. The homogeneous part of the
/// solution scales with `Z_T`; the cubic term `kappa = k / (12 a_z)` does not.
pub fn declining_price_path(spec: &ContractSpec) -> Result<CapacityPath> {
    let gap = spec.require_buildup()?;
    if spec.initial_capacity != 0.0 {
        return Err(Error::domain(
            "initial_capacity",
            "the declining-price closed form requires zero initial capacity; use the numerical solver",
        ));
    }
    let kappa = spec.social_cost_rate / (12.0 * spec.adjustment_coeff);
    Ok(buildup_path(spec, gap, kappa).warn_if_negative("declining_price_path"))
}

/// Closed-form path for whichever schedule the firm faces. The decline
/// rate of a linear schedule takes the role of `k`.
pub fn analytic_path(spec: &ContractSpec, schedule: &PricingSchedule) -> Result<CapacityPath> {
    match *schedule {
        PricingSchedule::Constant { .. } => fixed_price_path(spec),
        PricingSchedule::LinearDecline { slope, .. } => {
            if !(slope.is_finite() && slope >= 0.0) {
                return Err(Error::domain("slope", format!("must be finite and >= 0, got {slope}")));
            }
            declining_price_path(&spec.clone().with_social_cost_rate(slope))
        }
    }
}

/// `a_z int_0^T zdot^2 dt`.
pub fn adjustment_cost(path: &CapacityPath, adjustment_coeff: f64) -> f64 {
    adjustment_coeff * path.rate_energy()
}

/// Average delivery time `(1/Z_T) int_0^T t z dt`.
pub fn mean_delivery_delay(path: &CapacityPath, total_quantity: f64) -> f64 {
    path.first_moment() / total_quantity
}

/// `int_0^T p(t) z(t) dt`.
pub fn revenue(path: &CapacityPath, schedule: &PricingSchedule) -> f64 {
    match *schedule {
        PricingSchedule::Constant { base_price } => base_price * path.total_output(),
        PricingSchedule::LinearDecline { base_price, slope } => {
            base_price * path.total_output() - slope * path.first_moment()
        }
    }
}

/// Revenue minus adjustment cost minus marginal production cost.
pub fn profit(path: &CapacityPath, schedule: &PricingSchedule, spec: &ContractSpec) -> f64 {
    revenue(path, schedule)
        - adjustment_cost(path, spec.adjustment_coeff)
        - spec.marginal_cost * spec.total_quantity
}
