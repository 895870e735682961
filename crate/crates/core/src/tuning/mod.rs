//! Fitting agent configurations to a student's log.
//!
//! The search space has one inclusion flag per authored skill group and three
//! continuous learning parameters. Trials are proposed by a Parzen-estimator
//! optimiser ([`tpe`]) and scored by how often a simulated agent disagrees
//! with the student about first-attempt correctness.

mod objective;
pub mod tpe;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use objective::{objective, objective_window};
pub use tpe::{Domain, Point, TpeSettings};

use crate::agent::{AgentConfig, CognitiveParams};
use crate::error::TuneError;
use crate::logs::StudentLog;
use crate::rngs;
use crate::skills::SkillGroupId;

pub const DEFAULT_REPLICATIONS: usize = 5;

/// Inclusive uniform bounds of the continuous parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub guess_rate: (f64, f64),
    pub action_penalty: (f64, f64),
    pub discount: (f64, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self { guess_rate: (0.0, 1.0), action_penalty: (0.0, 0.2), discount: (0.05, 0.99) }
    }
}

impl SearchSpace {
    pub fn domain(&self) -> Domain {
        Domain {
            reals: vec![self.guess_rate, self.action_penalty, self.discount],
            n_bools: SkillGroupId::ALL.len(),
        }
    }

    pub fn to_config(&self, p: &Point) -> AgentConfig {
        let prior_knowledge = SkillGroupId::ALL
            .iter()
            .zip(&p.bools)
            .filter(|(_, &on)| on)
            .map(|(&g, _)| g)
            .collect();
        AgentConfig {
            prior_knowledge,
            params: CognitiveParams {
                guess_rate: p.reals[0],
                action_penalty: p.reals[1],
                discount: p.reals[2],
                ..CognitiveParams::default()
            },
        }
    }

    pub fn to_point(&self, c: &AgentConfig) -> Point {
        Point {
            reals: vec![c.params.guess_rate, c.params.action_penalty, c.params.discount],
            bools: SkillGroupId::ALL.iter().map(|&g| c.has_group(g)).collect(),
        }
    }

    pub fn contains(&self, c: &AgentConfig) -> bool {
        self.domain().contains(&self.to_point(c))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> AgentConfig {
        self.to_config(&self.domain().sample_uniform(rng))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub trial_index: usize,
    pub config: AgentConfig,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub best: AgentConfig,
    pub best_loss: f64,
    pub history: Vec<Trial>,
}

impl TuneResult {
    /// Best loss seen up to and including each trial.
    pub fn running_best(&self) -> Vec<f64> {
        self.history
            .iter()
            .scan(f64::INFINITY, |best, t| {
                *best = best.min(t.loss);
                Some(*best)
            })
            .collect()
    }
}

/// Proposes the next configuration given the trials so far.
pub fn tpe_suggest<R: Rng + ?Sized>(
    history: &[Trial],
    space: &SearchSpace,
    rng: &mut R,
    settings: &TpeSettings,
) -> AgentConfig {
    let points: Vec<(Point, f64)> = history.iter().map(|t| (space.to_point(&t.config), t.loss)).collect();
    space.to_config(&tpe::suggest(&points, &space.domain(), rng, settings))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOptions {
    pub iterations: usize,
    pub first_k: usize,
    pub replications: usize,
    pub seed: u64,
    pub settings: TpeSettings,
}

impl TuneOptions {
    pub fn new(iterations: usize, first_k: usize, seed: u64) -> Self {
        Self { iterations, first_k, replications: DEFAULT_REPLICATIONS, seed, settings: TpeSettings::default() }
    }
}

/// Suggest, simulate, score, repeat. Every trial is scored with the same
/// agent seeds, so loss differences come from the configurations alone.
///
/// A skill group whose problem type never occurs in the tuning window cannot
/// change the loss, so its flag is held at the baseline (absent) rather than
/// left to chance.
pub fn tune(log: &StudentLog, space: &SearchSpace, iterations: usize, first_k: usize, seed: u64) -> Result<TuneResult, TuneError> {
    tune_with(log, space, &TuneOptions::new(iterations, first_k, seed))
}

pub fn tune_with(log: &StudentLog, space: &SearchSpace, opts: &TuneOptions) -> Result<TuneResult, TuneError> {
    if opts.iterations == 0 {
        return Err(TuneError::NoIterations);
    }
    let seen: Vec<_> = log.sequence.iter().take(opts.first_k).map(|p| p.ptype).collect();
    let mut rng = rngs::rng(opts.seed, 0x7E);
    let mut history: Vec<Trial> = Vec::with_capacity(opts.iterations);
    for trial_index in 0..opts.iterations {
        let mut config = tpe_suggest(&history, space, &mut rng, &opts.settings);
        config.prior_knowledge.retain(|g| seen.contains(&g.problem_type()));
        let loss = objective(&config, log, opts.first_k, opts.replications, opts.seed)?;
        history.push(Trial { trial_index, config, loss });
    }
    let best = history
        .iter()
        .min_by(|a, b| a.loss.total_cmp(&b.loss).then(a.trial_index.cmp(&b.trial_index)))
        .expect("at least one trial");
    Ok(TuneResult { best: best.config.clone(), best_loss: best.loss, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logs::synth_student;
    use crate::sequences::interleaved;

    #[test]
    fn self_prediction_is_exact() {
        let seq = interleaved(4);
        let mut truth = AgentConfig::with_groups(&[SkillGroupId::FracMul]);
        truth.params.guess_rate = 0.0;
        let log = synth_student(&truth, &seq, 11, "s");
        assert_eq!(objective(&truth, &log, 10, 1, 11).unwrap(), 0.0);
        assert_eq!(objective(&AgentConfig::expert(), &synth_student(&AgentConfig::expert(), &seq, 3, "e"), 48, 3, 3).unwrap(), 0.0);
    }

    #[test]
    fn student_id_is_not_read() {
        let seq = interleaved(4);
        let mut log = synth_student(&AgentConfig::default(), &seq, 1, "a");
        let l1 = objective(&AgentConfig::expert(), &log, 10, 2, 5).unwrap();
        log.student_id = "b".into();
        assert_eq!(objective(&AgentConfig::expert(), &log, 10, 2, 5).unwrap(), l1);
    }

    #[test]
    fn contract_violations() {
        let log = synth_student(&AgentConfig::default(), &interleaved(1), 1, "a");
        let c = AgentConfig::default();
        assert_eq!(objective(&c, &log, 49, 1, 0), Err(TuneError::NotEnoughProblems { requested: 49, available: 48 }));
        assert_eq!(objective(&c, &log, 10, 0, 0), Err(TuneError::NoReplications));
        assert_eq!(objective_window(&c, &log, 5, 5, 1, 0), Err(TuneError::EmptyWindow { start: 5, end: 5 }));
        assert_eq!(tune(&log, &SearchSpace::default(), 0, 5, 0), Err(TuneError::NoIterations));
    }

    #[test]
    fn unseen_groups_stay_at_baseline() {
        let log = synth_student(&AgentConfig::expert(), &crate::sequences::blocked(crate::sequences::BlockedVariant::A, 1), 1, "a");
        let r = tune(&log, &SearchSpace::default(), 15, 5, 2).unwrap();
        for t in &r.history {
            assert!(t.config.prior_knowledge.iter().all(|&g| g == SkillGroupId::FracAddSame), "{:?}", t.config);
        }
        assert!(r.history.iter().any(|t| t.config.has_group(SkillGroupId::FracAddSame)));
    }

    #[test]
    fn single_iteration() {
        let log = synth_student(&AgentConfig::expert(), &interleaved(1), 1, "a");
        let r = tune(&log, &SearchSpace::default(), 1, 3, 2).unwrap();
        assert_eq!(r.history.len(), 1);
        assert_eq!(r.best, r.history[0].config);
        assert_eq!(r.best_loss, r.history[0].loss);
    }

    #[test]
    fn configs_round_trip_through_points() {
        let space = SearchSpace::default();
        let mut rng = rngs::rng(0, 0);
        for _ in 0..50 {
            let c = space.sample(&mut rng);
            assert!(space.contains(&c));
            assert_eq!(space.to_config(&space.to_point(&c)), c);
        }
    }
}
