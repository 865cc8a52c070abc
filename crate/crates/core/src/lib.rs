//! Capacity buildup under quadratic adjustment costs.
//!
//! A supplier has to deliver a fixed quantity over a contractual horizon and
//! pays `a_z * zdot^2` per unit time for changing its production rate. This
//! crate provides
//!
//! * [`contract`]: closed-form cost-minimizing capacity paths for a constant
//!   price and for a linearly declining price schedule,
//! * [`policy`]: delay costs, the socially optimal horizon, benefit/cost
//!   accounting and the break-even declining schedule,
//! * [`solver`]: a discretized variational solver (equality-constrained QP
//!   solved through a bordered tridiagonal KKT system) used to check the
//!   closed forms independently,
//! * [`scenario`]: TOML scenario files, pipelines and CSV output,
//! * [`cli`]: the command-line front end.

pub mod cli;
pub mod contract;
pub mod error;
pub mod policy;
pub mod repro;
pub mod scenario;
pub mod solver;

pub use contract::{CapacityPath, ContractSpec, PricingSchedule};
pub use error::{Error, Result};
pub use policy::CostReport;
pub use solver::{GridSpec, ResidualReport, Trajectory};
