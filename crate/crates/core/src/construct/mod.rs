//! Base designs, the product construction and the recursive planner.

mod build;
mod design;
mod plan;
mod sequence;

pub use build::{
    build, planned_cardinality, BuildOptions, BuildReport, NodeReport, ProductRecord,
    QuadratureSource, Solve,
};
pub use design::{base_s0, base_s1, product, Design, UNIT_NORM_TOLERANCE};
pub use plan::{default_split, plan, BuildPlan, PlanNode, SplitOverrides};
pub use sequence::{a_sequence, binomial, exponent_below_log_bound, lower_bound};
