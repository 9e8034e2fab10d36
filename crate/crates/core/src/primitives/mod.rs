//! Measurement gadgets on the cluster lattice.

mod canvas;
mod plan;
mod expand;
mod ghz;
mod hub;
mod merge;
mod zipper;

pub use canvas::Canvas;
pub use plan::{replay, CostReport, Plan, PlanStep, PlanTarget, StepOp, PREP_TAGS};
pub use expand::{expand_degree, expand_degree_u_shaped, expand_footprint, u_footprint, Direction, Expansion};
pub use ghz::{ghz_collect_step, ghz_collect_steps, run_steps, star_center, zipper_chain_steps};
pub use hub::{hub_connect_degree4, HubResult};
pub use merge::{check_merge, merge_on_canvas, merge_subgraphs, merge_unchecked};
pub use zipper::{zipper_connect, zipper_connect_with, ZipperOptions, ZipperResult};
