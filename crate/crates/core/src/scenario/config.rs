use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::contract::{ContractSpec, PricingSchedule};
use crate::error::Error;

pub const DEFAULT_GRID_INTERVALS: usize = 1000;

fn default_grid_intervals() -> usize {
    DEFAULT_GRID_INTERVALS
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Path, OutputKind::Costs]
}

/// A scenario definition as stored on disk (TOML).
///
/// ```toml
/// name = "baseline"
/// outputs = ["path", "costs"]
///
/// [contract]
/// total_quantity = 1.0
/// horizon = 1.0
/// adjustment_coeff = 1.0
/// social_cost_rate = 1.0
///
/// [schedule]
/// type = "constant"
/// p0 = 3.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    pub contract: ContractBlock,
    pub schedule: ScheduleBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractBlock {
    pub total_quantity: f64,
    pub horizon: f64,
    #[serde(default)]
    pub initial_capacity: f64,
    pub adjustment_coeff: f64,
    #[serde(default)]
    pub social_cost_rate: f64,
    #[serde(default)]
    pub marginal_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub natural_herd_immunity_time: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Constant,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleBlock {
    #[serde(rename = "type")]
    pub kind: ScheduleKind,
    pub p0: f64,
    /// Decline rate of a linear schedule; defaults to the social cost rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    #[serde(default = "default_grid_intervals")]
    pub n: usize,
}

impl Default for SolverBlock {
    fn default() -> Self {
        SolverBlock {
            n: DEFAULT_GRID_INTERVALS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Path,
    Costs,
    Compare,
    Sweep,
}

/// Contract parameters that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    TotalQuantity,
    Horizon,
    InitialCapacity,
    AdjustmentCoeff,
    SocialCostRate,
    BasePrice,
    MarginalCost,
    NaturalHerdImmunityTime,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::TotalQuantity => "total_quantity",
            SweepParameter::Horizon => "horizon",
            SweepParameter::InitialCapacity => "initial_capacity",
            SweepParameter::AdjustmentCoeff => "adjustment_coeff",
            SweepParameter::SocialCostRate => "social_cost_rate",
            SweepParameter::BasePrice => "base_price",
            SweepParameter::MarginalCost => "marginal_cost",
            SweepParameter::NaturalHerdImmunityTime => "natural_herd_immunity_time",
        }
    }

    pub fn apply(&self, spec: &mut ContractSpec, value: f64) {
        match self {
            SweepParameter::TotalQuantity => spec.total_quantity = value,
            SweepParameter::Horizon => spec.horizon = value,
            SweepParameter::InitialCapacity => spec.initial_capacity = value,
            SweepParameter::AdjustmentCoeff => spec.adjustment_coeff = value,
            SweepParameter::SocialCostRate => spec.social_cost_rate = value,
            SweepParameter::BasePrice => spec.base_price = value,
            SweepParameter::MarginalCost => spec.marginal_cost = value,
            SweepParameter::NaturalHerdImmunityTime => spec.natural_herd_immunity_time = Some(value),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepBlock {
    /// `steps` evenly spaced values from `from` to `to` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / last
                }
            })
            .collect()
    }
}

fn validation(field: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

impl ScenarioFile {
    pub fn contract_spec(&self) -> ContractSpec {
        let c = &self.contract;
        ContractSpec {
            total_quantity: c.total_quantity,
            horizon: c.horizon,
            initial_capacity: c.initial_capacity,
            adjustment_coeff: c.adjustment_coeff,
            social_cost_rate: c.social_cost_rate,
            base_price: self.schedule.p0,
            marginal_cost: c.marginal_cost,
            natural_herd_immunity_time: c.natural_herd_immunity_time,
        }
    }

    /// The pricing schedule this scenario imposes on `spec`. An unset linear
    /// slope follows `spec.social_cost_rate`, so sweeps over `k` move it too.
    pub fn schedule_for(&self, spec: &ContractSpec) -> PricingSchedule {
        match self.schedule.kind {
            ScheduleKind::Constant => PricingSchedule::Constant {
                base_price: spec.base_price,
            },
            ScheduleKind::Linear => PricingSchedule::LinearDecline {
                base_price: spec.base_price,
                slope: self.schedule.slope.unwrap_or(spec.social_cost_rate),
            },
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.name.trim().is_empty() {
            return Err(validation("name", "must not be empty"));
        }
        if self.name.contains(['/', '\\']) {
            return Err(validation("name", "must not contain path separators"));
        }
        self.contract_spec().validate().map_err(|e| match e {
            Error::Domain { field, message } => validation(field, message),
            other => validation("contract", other.to_string()),
        })?;
        if !self.schedule.p0.is_finite() {
            return Err(validation("p0", "must be finite"));
        }
        match (self.schedule.kind, self.schedule.slope) {
            (ScheduleKind::Constant, Some(_)) => {
                return Err(validation("slope", "only allowed for linear schedules"));
            }
            (ScheduleKind::Linear, Some(s)) if !(s.is_finite() && s >= 0.0) => {
                return Err(validation("slope", format!("must be finite and >= 0, got {s}")));
            }
            _ => {}
        }
        if self.solver.n < 2 {
            return Err(validation("n", format!("must be >= 2, got {}", self.solver.n)));
        }
        let mut seen = Vec::new();
        for o in &self.outputs {
            if seen.contains(o) {
                return Err(validation("outputs", format!("duplicate entry {o:?}")));
            }
            seen.push(*o);
        }
        if let Some(sweep) = &self.sweep {
            if !(sweep.from.is_finite() && sweep.to.is_finite()) {
                return Err(validation("from", "sweep bounds must be finite"));
            }
            if sweep.from >= sweep.to {
                return Err(validation(
                    "to",
                    format!("sweep requires from < to, got {} .. {}", sweep.from, sweep.to),
                ));
            }
            if sweep.steps < 2 {
                return Err(validation("steps", format!("must be >= 2, got {}", sweep.steps)));
            }
        } else if self.outputs.contains(&OutputKind::Sweep) {
            return Err(validation("sweep", "output \"sweep\" requested without a [sweep] block"));
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario files always serialize")
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates scenario text. `origin` labels parse errors.
pub fn parse_scenario(text: &str, origin: &str) -> Result<ScenarioFile, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |span| line_column(text, span.start));
        ScenarioError::Parse {
            origin: origin.to_string(),
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    file.validate()?;
    Ok(file)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioFile, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "minimal"

[contract]
total_quantity = 1.0
horizon = 1.0
adjustment_coeff = 1.0
social_cost_rate = 1.0

[schedule]
type = "constant"
p0 = 3.0
"#;

    #[test]
    fn minimal_file_gets_defaults() {
        let f = parse_scenario(MINIMAL, "minimal.toml").unwrap();
        assert_eq!(f.solver.n, 1000);
        assert_eq!(f.contract.initial_capacity, 0.0);
        assert_eq!(f.contract.marginal_cost, 0.0);
        assert_eq!(f.outputs, vec![OutputKind::Path, OutputKind::Costs]);
        assert_eq!(f.contract_spec().base_price, 3.0);
    }

    #[test]
    fn negative_horizon_names_field() {
        let text = MINIMAL.replace("horizon = 1.0", "horizon = -1.0");
        match parse_scenario(&text, "x") {
            Err(ScenarioError::Validation { field, .. }) => assert_eq!(field, "horizon"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_a_parse_error_with_position() {
        let text = MINIMAL.replace("horizon = 1.0", "horizon = 1.0\nhorizn = 2.0");
        match parse_scenario(&text, "x") {
            Err(ScenarioError::Parse { line, column, message, .. }) => {
                assert_eq!(line, 7);
                assert_eq!(column, 1);
                assert!(message.contains("horizn"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_syntax_reports_line() {
        let text = MINIMAL.replace("p0 = 3.0", "p0 = = 3.0");
        match parse_scenario(&text, "x") {
            Err(ScenarioError::Parse { line, .. }) => assert_eq!(line, 12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_constraints() {
        let base = format!("{MINIMAL}\n[sweep]\nparameter = \"horizon\"\nfrom = 1.0\nto = 4.0\nsteps = 8\n");
        let f = parse_scenario(&base, "x").unwrap();
        let values = f.sweep.as_ref().unwrap().values();
        assert_eq!(values.len(), 8);
        assert_eq!(values[0], 1.0);
        assert_eq!(values[7], 4.0);

        let reversed = base.replace("from = 1.0", "from = 5.0");
        assert!(matches!(parse_scenario(&reversed, "x"), Err(ScenarioError::Validation { .. })));
        let one_step = base.replace("steps = 8", "steps = 1");
        assert!(matches!(parse_scenario(&one_step, "x"), Err(ScenarioError::Validation { .. })));
        let bad_param = base.replace("\"horizon\"", "\"gdp\"");
        assert!(matches!(parse_scenario(&bad_param, "x"), Err(ScenarioError::Parse { .. })));
    }

    #[test]
    fn slope_on_constant_schedule_is_rejected() {
        let text = MINIMAL.replace("p0 = 3.0", "p0 = 3.0\nslope = 2.0");
        match parse_scenario(&text, "x") {
            Err(ScenarioError::Validation { field, .. }) => assert_eq!(field, "slope"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn serialized_file_reloads_identically() {
        let text = format!(
            "{}\n[sweep]\nparameter = \"social_cost_rate\"\nfrom = 0.5\nto = 4.0\nsteps = 3\n",
            MINIMAL.replace("type = \"constant\"", "type = \"linear\"")
        );
        let f = parse_scenario(&text, "x").unwrap();
        let again = parse_scenario(&f.to_toml_string(), "y").unwrap();
        assert_eq!(f, again);
    }
}
