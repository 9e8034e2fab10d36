//! End-to-end extraction strategies and plan execution.

mod builder;
mod cg;
mod execute;
mod lvde;
mod ovde;
mod request;

pub use cg::{cg_region_size, cg_schedule, plan_cg, plan_cg_detailed, CgLayout, Gate};
pub use execute::{
    check_extraction, cost_report, execute_plan, execute_plan_with, verify_statevector, verify_tableau, PhysicalRun,
};
pub use lvde::plan_lvde;
pub use ovde::plan_ovde;
pub use request::{ExtractionRequest, Region, Strategy};

use crate::error::Result;
use crate::primitives::Plan;

/// Plans with the request's own strategy.
pub fn plan(req: &ExtractionRequest) -> Result<Plan> {
    plan_with(req, req.strategy)
}

pub fn plan_with(req: &ExtractionRequest, strategy: Strategy) -> Result<Plan> {
    match strategy {
        Strategy::Lvde => plan_lvde(req),
        Strategy::Ovde => plan_ovde(req),
        Strategy::Cg => plan_cg(req),
    }
}
