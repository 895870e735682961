//! Agreement between simulated and observed first attempts.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::agent::{Agent, AgentConfig};
use crate::error::TuneError;
use crate::logs::StudentLog;
use crate::rngs;
use crate::tutor::FieldId;

/// Disagreement rate on the first `first_k` problems of the log.
pub fn objective(
    config: &AgentConfig,
    log: &StudentLog,
    first_k: usize,
    replications: usize,
    seed: u64,
) -> Result<f64, TuneError> {
    objective_window(config, log, 0, first_k, replications, seed)
}

/// Disagreement rate on problems `start..end` of the log.
///
/// Each replication runs a fresh agent over the log's own problems up to
/// `end`, so earlier problems still count as practice. A step disagrees when
/// exactly one of agent and student erred on the first attempt. The result
/// averages over every scored step of every replication.
pub fn objective_window(
    config: &AgentConfig,
    log: &StudentLog,
    start: usize,
    end: usize,
    replications: usize,
    seed: u64,
) -> Result<f64, TuneError> {
    if replications == 0 {
        return Err(TuneError::NoReplications);
    }
    if end > log.sequence.len() {
        return Err(TuneError::NotEnoughProblems { requested: end, available: log.sequence.len() });
    }
    let targets: Vec<(usize, FieldId, bool)> = log
        .window(start, end)
        .map(|r| (r.problem_index, r.field, r.outcome.is_error()))
        .collect();
    if targets.is_empty() {
        return Err(TuneError::EmptyWindow { start, end });
    }
    let problems = &log.sequence[..end];

    let per_rep: Vec<usize> = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let mut agent = Agent::new(config.clone(), rngs::agent_seed(seed, r));
            let predicted: HashMap<(usize, FieldId), bool> = agent
                .run_sequence(problems)
                .into_iter()
                .flat_map(|run| run.records)
                .map(|rec| ((rec.problem_index, rec.field), rec.outcome.is_error()))
                .collect();
            targets
                .iter()
                .filter(|(p, f, err)| predicted.get(&(*p, *f)) != Some(err))
                .count()
        })
        .collect();
    let total = (targets.len() * replications) as f64;
    Ok(per_rep.iter().sum::<usize>() as f64 / total)
}
