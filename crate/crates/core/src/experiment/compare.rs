use serde::{Deserialize, Serialize};

use super::ConditionReport;
use crate::logs::LearningCurve;
use crate::sequences::Schema;

pub const NAMED_OPPORTUNITIES: [usize; 4] = [0, 3, 5, 15];
pub const THRESHOLDS: [f64; 3] = [0.5, 0.2, 0.1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub schema: Schema,
    pub mean_error: f64,
    /// Error rate at each named opportunity, if the curve reaches it.
    pub error_at: Vec<(usize, Option<f64>)>,
    /// First opportunity whose smoothed error is below each threshold.
    pub crossing: Vec<(f64, Option<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseDifference {
    pub a: Schema,
    pub b: Schema,
    /// `a` minus `b`.
    pub mean_error: f64,
    pub error_at: Vec<(usize, Option<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub conditions: Vec<ConditionSummary>,
    pub pairwise: Vec<PairwiseDifference>,
}

/// Centred moving average with window 3; the ends average what exists.
pub fn smooth(values: &[f64]) -> Vec<f64> {
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 2).min(values.len());
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

pub fn first_crossing(curve: &LearningCurve, threshold: f64) -> Option<usize> {
    let rates: Vec<f64> = curve.points.iter().map(|p| p.error_rate).collect();
    smooth(&rates).iter().position(|&e| e < threshold)
}

fn summarize(r: &ConditionReport) -> ConditionSummary {
    ConditionSummary {
        schema: r.schema,
        mean_error: r.mean_error(),
        error_at: NAMED_OPPORTUNITIES
            .iter()
            .map(|&k| (k, r.curve.at(k).map(|p| p.error_rate)))
            .collect(),
        crossing: THRESHOLDS.iter().map(|&t| (t, first_crossing(&r.curve, t))).collect(),
    }
}

pub fn compare(reports: &[ConditionReport]) -> ComparisonTable {
    let conditions: Vec<ConditionSummary> = reports.iter().map(summarize).collect();
    let mut pairwise = Vec::new();
    for (i, a) in conditions.iter().enumerate() {
        for b in &conditions[i + 1..] {
            pairwise.push(PairwiseDifference {
                a: a.schema,
                b: b.schema,
                mean_error: a.mean_error - b.mean_error,
                error_at: a
                    .error_at
                    .iter()
                    .zip(&b.error_at)
                    .map(|(&(k, x), &(_, y))| (k, x.zip(y).map(|(x, y)| x - y)))
                    .collect(),
            });
        }
    }
    ComparisonTable { conditions, pairwise }
}
