//! Skill matching against working memory and epsilon-greedy selection.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CognitiveParams, ContextKey, WorkingMemory};
use crate::skills::{is_open, Compute, Skill, SkillBody, Source};
use crate::tutor::{FieldId, StepAction, TutorState, Value};

/// A fully ground effect proposed by an activation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Proposal {
    /// Stores `value` in a new scratch slot.
    Internal { compute: Compute, value: i64 },
    /// Submits a tutor transaction.
    External(StepAction),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillActivation {
    /// Index into the long-term memory slice that was matched.
    pub skill: usize,
    pub bindings: Vec<(Source, Value)>,
    pub proposed: Proposal,
    pub context: ContextKey,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// Index into the activation list.
    Fire(usize),
    RequestHint,
}

/// The field the tutor expects next; internal firings are credited to it.
pub fn focus_field(tutor: &TutorState) -> FieldId {
    FieldId::ALL
        .into_iter()
        .find(|&f| tutor.is_admissible(f))
        .unwrap_or(FieldId::Done)
}

/// Bound integer sources: operands, locked integer fields, then scratch slots.
fn numeric_sources(wm: &WorkingMemory) -> Vec<(Source, i64)> {
    let mut out: Vec<(Source, i64)> = Source::OPERANDS
        .into_iter()
        .filter_map(|s| Some((s, s.resolve(&wm.tutor, &[])?.as_int()?)))
        .collect();
    for f in FieldId::ALL {
        if let Some(Value::Int(v)) = wm.tutor.locked_value(f) {
            out.push((Source::Field(f), v));
        }
    }
    out.extend(wm.scratch.iter().enumerate().map(|(i, e)| (Source::Scratch(i), e.value)));
    out
}

/// Matches every skill against working memory. Activations that would write a
/// hidden or locked field are dropped. Output is ordered by skill (long-term
/// memory is kept sorted by id) and then by bindings.
pub fn match_skills(wm: &WorkingMemory, ltm: &[Skill]) -> Vec<SkillActivation> {
    let ptype = wm.tutor.problem().ptype;
    let focus = ContextKey { ptype, field: focus_field(&wm.tutor) };
    let sources = numeric_sources(wm);
    let mut out = Vec::new();

    for (idx, skill) in ltm.iter().enumerate() {
        let start = out.len();
        match &skill.body {
            SkillBody::Arithmetic(compute) => {
                let q = skill.qtable.get(focus);
                for (i, &(sa, a)) in sources.iter().enumerate() {
                    for (j, &(sb, b)) in sources.iter().enumerate() {
                        if i == j || (compute.is_commutative() && i > j) {
                            continue;
                        }
                        if let Some(value) = compute.apply(a, b) {
                            out.push(SkillActivation {
                                skill: idx,
                                bindings: vec![(sa, Value::Int(a)), (sb, Value::Int(b))],
                                proposed: Proposal::Internal { compute: *compute, value },
                                context: focus,
                                q,
                            });
                        }
                    }
                }
            }
            SkillBody::Copy => {
                for field in wm.tutor.open_fields() {
                    let context = ContextKey { ptype, field };
                    let q = skill.qtable.get(context);
                    let mut push = |src: Source, value: Value| {
                        out.push(SkillActivation {
                            skill: idx,
                            bindings: vec![(src, value)],
                            proposed: Proposal::External(StepAction { field, value }),
                            context,
                            q,
                        });
                    };
                    if field.is_boolean() {
                        for b in [false, true] {
                            push(Source::Constant(Value::Bool(b)), Value::Bool(b));
                        }
                    } else {
                        for &(src, v) in &sources {
                            push(src, Value::Int(v));
                        }
                    }
                }
            }
            SkillBody::Rule { conditions, .. } => {
                let Some((field, value)) = skill.body.evaluate_rule(&wm.tutor) else {
                    continue;
                };
                if !is_open(&wm.tutor, field) || field.is_boolean() != matches!(value, Value::Bool(_)) {
                    continue;
                }
                let context = ContextKey { ptype, field };
                let bindings = conditions
                    .iter()
                    .filter_map(|c| Some((c.source, c.source.resolve(&wm.tutor, &[])?)))
                    .collect();
                out.push(SkillActivation {
                    skill: idx,
                    bindings,
                    proposed: Proposal::External(StepAction { field, value }),
                    context,
                    q: skill.qtable.get(context),
                });
            }
        }
        out[start..].sort_by(|x, y| x.bindings.cmp(&y.bindings));
    }
    out
}

/// Chooses what to do with the current activations.
///
/// When no activation predicts positive reward the agent asks for a hint.
/// Otherwise it guesses a uniformly random activation with probability
/// `guess_rate`, and fires the highest-valued activation (ties broken at
/// random) the rest of the time.
pub fn select_action<R: Rng + ?Sized>(
    activations: &[SkillActivation],
    params: &CognitiveParams,
    rng: &mut R,
) -> Decision {
    let best = activations.iter().map(|a| a.q).fold(f64::NEG_INFINITY, f64::max);
    if best.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Decision::RequestHint;
    }
    if rng.random::<f64>() < params.guess_rate {
        return Decision::Fire(rng.random_range(0..activations.len()));
    }
    let ties: Vec<usize> = activations
        .iter()
        .enumerate()
        .filter(|(_, a)| a.q == best)
        .map(|(i, _)| i)
        .collect();
    Decision::Fire(ties[rng.random_range(0..ties.len())])
}
