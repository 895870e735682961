use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{Agent, AgentConfig};
use crate::logs::{aggregate_curves, LearningCurve, StepRecord};
use crate::rngs;
use crate::sequences::Schema;

/// Problems at the end of a sequence summarised separately.
pub const FINAL_WINDOW: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub config: AgentConfig,
    pub schemas: Vec<Schema>,
    pub replications: usize,
    pub seed: u64,
}

impl Campaign {
    pub fn new(config: AgentConfig, schemas: Vec<Schema>, seed: u64) -> Self {
        Self { config, schemas, replications: 20, seed }
    }

    /// Sequence seed of a replication. Replication `r` uses the same seed in
    /// every condition.
    pub fn sequence_seed(&self, rep: usize) -> u64 {
        rngs::derive(self.seed, rep as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub sequence_seed: u64,
    pub mean_error: f64,
    pub final_window_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub schema: Schema,
    pub curve: LearningCurve,
    pub replications: Vec<ReplicationSummary>,
    #[serde(skip)]
    pub records: Vec<Vec<StepRecord>>,
}

impl ConditionReport {
    /// Mean first-attempt error over every step of every replication.
    pub fn mean_error(&self) -> f64 {
        let (sum, n) = self
            .records
            .iter()
            .flatten()
            .fold((0.0, 0usize), |(s, n), r| (s + r.error(), n + 1));
        if n == 0 {
            self.replications.iter().map(|r| r.mean_error).sum::<f64>() / self.replications.len().max(1) as f64
        } else {
            sum / n as f64
        }
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

fn run_replication(campaign: &Campaign, schema: Schema, rep: usize) -> (ReplicationSummary, Vec<StepRecord>) {
    let sequence_seed = campaign.sequence_seed(rep);
    let seq = schema.generate(sequence_seed);
    let mut agent = Agent::new(campaign.config.clone(), rngs::agent_seed(campaign.seed, rep as u64));
    let records: Vec<StepRecord> = agent.run_sequence(&seq.problems).into_iter().flat_map(|r| r.records).collect();
    let cutoff = seq.problems.len().saturating_sub(FINAL_WINDOW);
    let summary = ReplicationSummary {
        sequence_seed,
        mean_error: mean(records.iter().map(StepRecord::error)),
        final_window_error: mean(records.iter().filter(|r| r.problem_index >= cutoff).map(StepRecord::error)),
    };
    (summary, records)
}

/// Runs every condition of the campaign. Replications run in parallel; each
/// owns its agent and random streams, and results are reduced in replication
/// order.
pub fn simulate_counterfactual(campaign: &Campaign) -> Vec<ConditionReport> {
    assert!(campaign.replications >= 1, "a campaign needs at least one replication");
    campaign
        .schemas
        .iter()
        .map(|&schema| {
            let (replications, records): (Vec<_>, Vec<_>) = (0..campaign.replications)
                .into_par_iter()
                .map(|rep| run_replication(campaign, schema, rep))
                .collect::<Vec<_>>()
                .into_iter()
                .unzip();
            ConditionReport { schema, curve: aggregate_curves(&records), replications, records }
        })
        .collect()
}
