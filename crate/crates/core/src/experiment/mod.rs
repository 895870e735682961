//! Counterfactual practice campaigns and their reports.

mod campaign;
mod compare;
mod svg;

pub use campaign::{simulate_counterfactual, Campaign, ConditionReport, ReplicationSummary, FINAL_WINDOW};
pub use compare::{compare, smooth, ComparisonTable, ConditionSummary, PairwiseDifference, NAMED_OPPORTUNITIES, THRESHOLDS};
pub use svg::render_curve_svg;
