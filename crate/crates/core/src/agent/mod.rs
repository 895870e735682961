//! The simulated learner.
//!
//! Each external step attempt runs a match/select/fire loop over long-term
//! memory. Internal firings write scratch values and cost `action_penalty`; the
//! first external firing is scored by the tutor (+1 / -1) and the reward is
//! backed up along the firing trace with Q-learning. With nothing predicted to
//! pay off the agent asks for a hint, explains the demonstrated step with its
//! arithmetic skills and compiles the explanation into a new skill.

mod explain;
mod matching;
mod qlearn;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use explain::{compile, explain, Explanation};
pub use matching::{focus_field, match_skills, select_action, Decision, Proposal, SkillActivation};
pub use qlearn::q_update;

use crate::error::TutorError;
use crate::logs::{Outcome, StepRecord};
use crate::skills::{fraction_skills, primitive_skills, Skill, SkillGroupId};
use crate::tutor::{FieldId, Problem, ProblemType, StepAction, TutorState, Value};

/// Longest explanation chain, counting the final copy.
pub const MAX_CHAIN: usize = 3;
/// Internal firings allowed per external step before a hint is forced.
pub const INTERNAL_LOOP_CAP: usize = 10;
/// Step attempts allowed per problem before every further step is a hint.
pub const ATTEMPT_CAP: usize = 100;

/// Key of the tabular expected-value function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContextKey {
    pub ptype: ProblemType,
    pub field: FieldId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CognitiveParams {
    /// Probability of firing a random activation instead of the best one.
    pub guess_rate: f64,
    /// Cost of each internal firing.
    pub action_penalty: f64,
    pub discount: f64,
    pub learning_rate: f64,
}

impl Default for CognitiveParams {
    fn default() -> Self {
        Self {
            guess_rate: 0.30,
            action_penalty: 0.05,
            discount: 0.70,
            learning_rate: 0.10,
        }
    }
}

/// Prior knowledge plus cognitive parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    #[serde(default)]
    pub prior_knowledge: Vec<SkillGroupId>,
    #[serde(default)]
    pub params: CognitiveParams,
}

impl Default for AgentConfig {
    /// Whole-number arithmetic only, default parameters.
    fn default() -> Self {
        Self {
            prior_knowledge: Vec::new(),
            params: CognitiveParams::default(),
        }
    }
}

impl AgentConfig {
    pub fn with_groups(groups: &[SkillGroupId]) -> Self {
        let mut prior_knowledge = groups.to_vec();
        prior_knowledge.sort();
        prior_knowledge.dedup();
        Self { prior_knowledge, ..Self::default() }
    }

    /// All fraction skill groups and no guessing.
    pub fn expert() -> Self {
        let mut c = Self::with_groups(&SkillGroupId::ALL);
        c.params.guess_rate = 0.0;
        c
    }

    pub fn has_group(&self, g: SkillGroupId) -> bool {
        self.prior_knowledge.contains(&g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScratchEntry {
    pub value: i64,
    /// Index of the skill that produced the value.
    pub producer: usize,
}

/// One firing on the current trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Firing {
    pub skill: usize,
    pub context: ContextKey,
    pub reward: f64,
}

/// Short-term memory for one external step attempt.
#[derive(Debug, Clone)]
pub struct WorkingMemory {
    pub tutor: TutorState,
    pub scratch: Vec<ScratchEntry>,
    pub trace: Vec<Firing>,
}

impl WorkingMemory {
    pub fn new(tutor: TutorState) -> Self {
        Self { tutor, scratch: Vec::new(), trace: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub field: FieldId,
    pub outcome: Outcome,
}

/// Result of working one problem to completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemRun {
    /// First attempt on each field, in the order first attempts happened.
    pub records: Vec<StepRecord>,
    /// Every attempt, in order.
    pub attempts: Vec<StepOutcome>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Agent {
    config: AgentConfig,
    /// Long-term memory, sorted by skill id.
    skills: Vec<Skill>,
    rng: ChaCha8Rng,
    problems_seen: usize,
}

impl Agent {
    pub fn new(config: AgentConfig, seed: u64) -> Self {
        let mut skills = primitive_skills();
        skills.extend(fraction_skills(&config.prior_knowledge));
        skills.sort_by(|a, b| a.id.cmp(&b.id));
        Self {
            config,
            skills,
            rng: ChaCha8Rng::seed_from_u64(seed),
            problems_seen: 0,
        }
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn params(&self) -> &CognitiveParams {
        &self.config.params
    }

    pub fn skills(&self) -> &[Skill] {
        &self.skills
    }

    pub fn skill(&self, id: &str) -> Option<&Skill> {
        self.position(id).ok().map(|i| &self.skills[i])
    }

    fn position(&self, id: &str) -> Result<usize, usize> {
        self.skills.binary_search_by(|s| s.id.as_str().cmp(id))
    }

    /// Q value of `skill` for `ctx`, 0 when unseen.
    pub fn q_value(&self, id: &str, ctx: ContextKey) -> f64 {
        self.skill(id).map_or(0.0, |s| s.qtable.get(ctx))
    }

    /// Performs one external step attempt (or takes one hint).
    pub fn step(&mut self, tutor: &mut TutorState) -> Result<StepOutcome, TutorError> {
        self.step_inner(tutor, false)
    }

    fn step_inner(&mut self, tutor: &mut TutorState, force_hint: bool) -> Result<StepOutcome, TutorError> {
        if tutor.is_done() {
            return Err(TutorError::ProblemFinished);
        }
        let mut wm = WorkingMemory::new(tutor.clone());
        if force_hint {
            return self.take_hint(tutor, &wm);
        }
        loop {
            if wm.trace.len() >= INTERNAL_LOOP_CAP {
                return self.take_hint(tutor, &wm);
            }
            let activations = match_skills(&wm, &self.skills);
            let chosen = match select_action(&activations, &self.config.params, &mut self.rng) {
                Decision::RequestHint => return self.take_hint(tutor, &wm),
                Decision::Fire(i) => &activations[i],
            };
            match chosen.proposed {
                Proposal::Internal { value, .. } => {
                    wm.scratch.push(ScratchEntry { value, producer: chosen.skill });
                    wm.trace.push(Firing {
                        skill: chosen.skill,
                        context: chosen.context,
                        reward: -self.config.params.action_penalty,
                    });
                }
                Proposal::External(action) => {
                    let feedback = tutor.check_step(action)?;
                    let outcome = match feedback {
                        crate::tutor::Feedback::Correct => Outcome::Correct,
                        crate::tutor::Feedback::Incorrect => Outcome::Incorrect,
                    };
                    let reward = if outcome == Outcome::Correct { 1.0 } else { -1.0 };
                    wm.trace.push(Firing { skill: chosen.skill, context: chosen.context, reward });
                    self.back_up(&wm.trace);
                    return Ok(StepOutcome { field: action.field, outcome });
                }
            }
        }
    }

    /// Backs the trace's rewards up from the external firing (a terminal
    /// transition) to the first internal one, each firing bootstrapping from
    /// the freshly updated value of its successor.
    fn back_up(&mut self, trace: &[Firing]) {
        let params = self.config.params;
        let mut next = 0.0;
        for firing in trace.iter().rev() {
            let table = &mut self.skills[firing.skill].qtable;
            let q = q_update(table.get(firing.context), firing.reward, next, &params);
            table.set(firing.context, q);
            next = q;
        }
    }

    fn take_hint(&mut self, tutor: &mut TutorState, wm: &WorkingMemory) -> Result<StepOutcome, TutorError> {
        let demo = tutor.next_hint()?;
        self.explain_and_compile(&demo, &wm.tutor);
        tutor.apply_hint()?;
        Ok(StepOutcome { field: demo.field, outcome: Outcome::Hint })
    }

    /// Explains a demonstration and adds the compiled skills to long-term
    /// memory. Returns the ids of the skills added; skills that already exist
    /// are reused and only their value for this context is updated.
    pub fn explain_and_compile(&mut self, demo: &StepAction, tutor: &TutorState) -> Vec<String> {
        let ctx = ContextKey { ptype: tutor.problem().ptype, field: demo.field };
        let mut added = Vec::new();
        for ex in explain(demo, tutor, MAX_CHAIN) {
            let seed = self.config.params.discount.powi(ex.len() as i32 - 1);
            let skill = compile(&ex, tutor);
            match self.position(&skill.id) {
                Ok(i) => {
                    let table = &mut self.skills[i].qtable;
                    let q = match table.entry(ctx) {
                        None => seed,
                        Some(q) => q_update(q, seed, 0.0, &self.config.params),
                    };
                    table.set(ctx, q);
                }
                Err(i) => {
                    let mut skill = skill;
                    skill.qtable.set(ctx, seed);
                    added.push(skill.id.clone());
                    self.skills.insert(i, skill);
                }
            }
        }
        added
    }

    /// Works `problem` to completion and reports first attempts.
    pub fn run_problem(&mut self, problem: Problem) -> ProblemRun {
        let problem_index = self.problems_seen;
        self.problems_seen += 1;
        let mut tutor = TutorState::new(problem);
        let mut first: BTreeSet<FieldId> = BTreeSet::new();
        let mut records = Vec::new();
        let mut attempts = Vec::new();
        while !tutor.is_done() {
            let force = attempts.len() >= ATTEMPT_CAP;
            let step = self
                .step_inner(&mut tutor, force)
                .expect("agent only acts on open fields of an unfinished problem");
            if first.insert(step.field) {
                records.push(StepRecord { problem_index, problem, field: step.field, outcome: step.outcome });
            }
            attempts.push(step);
        }
        ProblemRun { records, attempts }
    }

    /// Runs a whole sequence, returning the per-problem runs.
    pub fn run_sequence(&mut self, problems: &[Problem]) -> Vec<ProblemRun> {
        problems.iter().map(|&p| self.run_problem(p)).collect()
    }

    /// The value the agent would currently compute for a rule skill on a
    /// tutor state, if it matches.
    pub fn evaluate(&self, id: &str, tutor: &TutorState) -> Option<(FieldId, Value)> {
        self.skill(id)?.body.evaluate_rule(tutor)
    }
}
