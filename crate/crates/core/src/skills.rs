//! Skill definitions: whole-number arithmetic primitives and the authored
//! fraction skills that make up the prior-knowledge search space.
//!
//! A skill is either a *primitive* whose arguments are free variables bound
//! against whatever working memory holds, or a *rule* with fixed sources: a
//! list of condition patterns plus a chain of effects that ends in exactly one
//! write to a tutor field. Authored fraction skills and compiled macro-skills
//! are both rules.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::agent::ContextKey;
use crate::tutor::{FieldId, FieldState, ProblemType, TutorState, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Part {
    Num,
    Den,
}

/// Where a value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Source {
    Operand { side: Side, part: Part },
    Field(FieldId),
    /// A scratch slot. Inside a rule the slot is local to the rule's chain.
    Scratch(usize),
    Constant(Value),
}

impl Source {
    pub const OPERANDS: [Source; 4] = [
        Source::Operand { side: Side::Left, part: Part::Num },
        Source::Operand { side: Side::Left, part: Part::Den },
        Source::Operand { side: Side::Right, part: Part::Num },
        Source::Operand { side: Side::Right, part: Part::Den },
    ];

    /// Resolves the source against the tutor view and a scratch list.
    /// Unlocked fields and missing slots are unbound.
    pub fn resolve(self, tutor: &TutorState, scratch: &[Value]) -> Option<Value> {
        match self {
            Source::Operand { side, part } => {
                let p = tutor.problem();
                let frac = match side {
                    Side::Left => p.left,
                    Side::Right => p.right,
                };
                Some(Value::Int(match part {
                    Part::Num => frac.num,
                    Part::Den => frac.den,
                }))
            }
            Source::Field(f) => tutor.locked_value(f),
            Source::Scratch(i) => scratch.get(i).copied(),
            Source::Constant(v) => Some(v),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Operand { side, part } => {
                let s = if *side == Side::Left { "L" } else { "R" };
                let p = if *part == Part::Num { "num" } else { "den" };
                write!(f, "{s}.{p}")
            }
            Source::Field(id) => write!(f, "{id}"),
            Source::Scratch(i) => write!(f, "s{i}"),
            Source::Constant(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    Equal,
    NotEqual,
}

/// A condition: `source` must be bound, and if a relation is given it must hold
/// between `source` and the other source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern {
    pub source: Source,
    pub relation: Option<(Relation, Source)>,
}

impl Pattern {
    pub fn bound(source: Source) -> Self {
        Self { source, relation: None }
    }

    pub fn relate(source: Source, relation: Relation, other: Source) -> Self {
        Self { source, relation: Some((relation, other)) }
    }

    pub fn holds(&self, tutor: &TutorState, scratch: &[Value]) -> bool {
        let Some(a) = self.source.resolve(tutor, scratch) else {
            return false;
        };
        match self.relation {
            None => true,
            Some((rel, other)) => match other.resolve(tutor, scratch) {
                None => false,
                Some(b) => (rel == Relation::Equal) == (a == b),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Compute {
    Add,
    Sub,
    Mul,
    Div,
}

impl Compute {
    pub const ALL: [Compute; 4] = [Compute::Add, Compute::Sub, Compute::Mul, Compute::Div];

    /// Whole-number arithmetic. Subtraction must stay positive and division
    /// must be exact with a nonzero divisor.
    pub fn apply(self, a: i64, b: i64) -> Option<i64> {
        match self {
            Compute::Add => a.checked_add(b),
            Compute::Sub => (a > b).then(|| a - b),
            Compute::Mul => a.checked_mul(b),
            Compute::Div => (b != 0 && a % b == 0).then(|| a / b),
        }
    }

    pub fn is_commutative(self) -> bool {
        matches!(self, Compute::Add | Compute::Mul)
    }

    pub fn name(self) -> &'static str {
        match self {
            Compute::Add => "add",
            Compute::Sub => "sub",
            Compute::Mul => "mul",
            Compute::Div => "div",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Effect {
    Internal { compute: Compute, args: [Source; 2], out: usize },
    External { field: FieldId, value: Source },
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Effect::Internal { compute, args, out } => {
                write!(f, "s{out}={}({},{})", compute.name(), args[0], args[1])
            }
            Effect::External { field, value } => write!(f, "{field}<-{value}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    Primitive,
    Authored,
    Compiled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkillBody {
    /// Applies `Compute` to any two distinct bound integer sources and stores
    /// the result in a new scratch slot.
    Arithmetic(Compute),
    /// Writes any bound value into any open field: integer sources into
    /// integer fields, `true`/`false` into boolean fields.
    Copy,
    /// Fixed conditions and an effect chain ending in one external write.
    Rule { conditions: Vec<Pattern>, effects: Vec<Effect> },
}

impl SkillBody {
    /// The field a rule writes to.
    pub fn target(&self) -> Option<FieldId> {
        match self {
            SkillBody::Rule { effects, .. } => match effects.last() {
                Some(Effect::External { field, .. }) => Some(*field),
                _ => None,
            },
            _ => None,
        }
    }

    /// Runs a rule's chain against the tutor view. Returns the field write it
    /// proposes, or `None` when a condition fails or a computation is
    /// undefined.
    pub fn evaluate_rule(&self, tutor: &TutorState) -> Option<(FieldId, Value)> {
        let SkillBody::Rule { conditions, effects } = self else {
            return None;
        };
        let mut local: Vec<Value> = Vec::with_capacity(effects.len());
        if !conditions.iter().all(|c| c.holds(tutor, &local)) {
            return None;
        }
        for effect in effects {
            match *effect {
                Effect::Internal { compute, args, out } => {
                    let a = args[0].resolve(tutor, &local)?.as_int()?;
                    let b = args[1].resolve(tutor, &local)?.as_int()?;
                    let v = Value::Int(compute.apply(a, b)?);
                    if out == local.len() {
                        local.push(v);
                    } else {
                        *local.get_mut(out)? = v;
                    }
                }
                Effect::External { field, value } => {
                    let v = value.resolve(tutor, &local)?;
                    return Some((field, v));
                }
            }
        }
        None
    }
}

/// Expected-value table keyed by (problem type, target field).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<QEntry>", from = "Vec<QEntry>")]
pub struct QTable(BTreeMap<ContextKey, f64>);

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct QEntry {
    ptype: ProblemType,
    field: FieldId,
    q: f64,
}

impl From<QTable> for Vec<QEntry> {
    fn from(t: QTable) -> Self {
        t.0.into_iter()
            .map(|(k, q)| QEntry { ptype: k.ptype, field: k.field, q })
            .collect()
    }
}

impl From<Vec<QEntry>> for QTable {
    fn from(v: Vec<QEntry>) -> Self {
        QTable(
            v.into_iter()
                .map(|e| (ContextKey { ptype: e.ptype, field: e.field }, e.q))
                .collect(),
        )
    }
}

impl QTable {
    /// Unseen contexts read as 0.
    pub fn get(&self, ctx: ContextKey) -> f64 {
        self.0.get(&ctx).copied().unwrap_or(0.0)
    }

    pub fn entry(&self, ctx: ContextKey) -> Option<f64> {
        self.0.get(&ctx).copied()
    }

    pub fn set(&mut self, ctx: ContextKey, q: f64) {
        self.0.insert(ctx, q);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ContextKey, f64)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skill {
    pub id: String,
    pub origin: Origin,
    pub body: SkillBody,
    pub qtable: QTable,
    /// Ids of the skills a compiled skill was composed from, in firing order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constituents: Vec<String>,
}

impl Skill {
    fn new(id: impl Into<String>, origin: Origin, body: SkillBody) -> Self {
        Self {
            id: id.into(),
            origin,
            body,
            qtable: QTable::default(),
            constituents: Vec::new(),
        }
    }

    pub fn is_external(&self) -> bool {
        !matches!(self.body, SkillBody::Arithmetic(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SkillGroupId {
    FracAddSame,
    FracConvertButterfly,
    FracMul,
}

impl SkillGroupId {
    pub const ALL: [SkillGroupId; 3] = [
        SkillGroupId::FracAddSame,
        SkillGroupId::FracConvertButterfly,
        SkillGroupId::FracMul,
    ];

    /// The problem type whose contexts this group's skills are seeded for.
    pub fn problem_type(self) -> ProblemType {
        match self {
            SkillGroupId::FracAddSame => ProblemType::AddSame,
            SkillGroupId::FracConvertButterfly => ProblemType::AddDiff,
            SkillGroupId::FracMul => ProblemType::Mul,
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            SkillGroupId::FracAddSame => "frac-add-same",
            SkillGroupId::FracConvertButterfly => "frac-butterfly",
            SkillGroupId::FracMul => "frac-mul",
        }
    }
}

/// Whole-number arithmetic plus the copy skill. Q-tables start empty.
pub fn primitive_skills() -> Vec<Skill> {
    let mut out: Vec<Skill> = Compute::ALL
        .into_iter()
        .map(|c| Skill::new(c.name(), Origin::Primitive, SkillBody::Arithmetic(c)))
        .collect();
    out.push(Skill::new("copy", Origin::Primitive, SkillBody::Copy));
    out
}

/// Initial expected value for authored prior knowledge.
pub const AUTHORED_Q: f64 = 1.0;

/// Authored fraction skills for the requested groups, one per output field.
/// Each skill's table is seeded with [`AUTHORED_Q`] for its group's problem
/// type so that prior knowledge fires without hints.
pub fn fraction_skills(groups: &[SkillGroupId]) -> Vec<Skill> {
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for &g in groups {
        if seen.insert(g) {
            out.extend(group_skills(g));
        }
    }
    out
}

fn group_skills(group: SkillGroupId) -> Vec<Skill> {
    use FieldId::*;
    const LN: Source = Source::Operand { side: Side::Left, part: Part::Num };
    const LD: Source = Source::Operand { side: Side::Left, part: Part::Den };
    const RN: Source = Source::Operand { side: Side::Right, part: Part::Num };
    const RD: Source = Source::Operand { side: Side::Right, part: Part::Den };
    let bound = |fields: &[FieldId]| -> Vec<Pattern> {
        fields.iter().map(|&f| Pattern::bound(Source::Field(f))).collect()
    };
    let write = |field, value| Effect::External { field, value };
    let compute = |compute, a, b| Effect::Internal { compute, args: [a, b], out: 0 };
    let fals = Source::Constant(Value::Bool(false));
    let tru = Source::Constant(Value::Bool(true));

    let mut rules: Vec<(FieldId, Vec<Pattern>, Vec<Effect>)> = Vec::new();
    match group {
        SkillGroupId::FracAddSame => {
            let same = Pattern::relate(LD, Relation::Equal, RD);
            rules.push((ConvertCheck, vec![same], vec![write(ConvertCheck, fals)]));
            let mut c = bound(&[ConvertCheck]);
            c.push(same);
            rules.push((AnswerNum, c.clone(), vec![compute(Compute::Add, LN, RN), write(AnswerNum, Source::Scratch(0))]));
            rules.push((AnswerDen, c, vec![write(AnswerDen, LD)]));
        }
        SkillGroupId::FracConvertButterfly => {
            let diff = Pattern::relate(LD, Relation::NotEqual, RD);
            rules.push((ConvertCheck, vec![diff], vec![write(ConvertCheck, tru)]));
            let product = |field, a, b, pre: &[FieldId]| {
                (field, bound(pre), vec![compute(Compute::Mul, a, b), write(field, Source::Scratch(0))])
            };
            rules.push(product(ConvLeftDen, LD, RD, &[ConvertCheck]));
            rules.push(product(ConvRightDen, LD, RD, &[ConvLeftDen]));
            rules.push(product(ConvLeftNum, LN, RD, &[ConvLeftDen]));
            rules.push(product(ConvRightNum, RN, LD, &[ConvLeftDen, ConvRightDen, ConvLeftNum]));
            let converted = bound(&[ConvLeftDen, ConvRightDen, ConvLeftNum, ConvRightNum]);
            rules.push((
                AnswerNum,
                converted.clone(),
                vec![
                    compute(Compute::Add, Source::Field(ConvLeftNum), Source::Field(ConvRightNum)),
                    write(AnswerNum, Source::Scratch(0)),
                ],
            ));
            rules.push((AnswerDen, converted, vec![write(AnswerDen, Source::Field(ConvLeftDen))]));
        }
        SkillGroupId::FracMul => {
            rules.push((ConvertCheck, vec![], vec![write(ConvertCheck, fals)]));
            let c = bound(&[ConvertCheck]);
            rules.push((AnswerNum, c.clone(), vec![compute(Compute::Mul, LN, RN), write(AnswerNum, Source::Scratch(0))]));
            rules.push((AnswerDen, c, vec![compute(Compute::Mul, LD, RD), write(AnswerDen, Source::Scratch(0))]));
        }
    }
    rules.push((Done, bound(&[AnswerNum, AnswerDen]), vec![write(Done, tru)]));

    let ptype = group.problem_type();
    rules
        .into_iter()
        .map(|(field, conditions, effects)| {
            let mut s = Skill::new(
                format!("{}:{}", group.prefix(), field),
                Origin::Authored,
                SkillBody::Rule { conditions, effects },
            );
            s.qtable.set(ContextKey { ptype, field }, AUTHORED_Q);
            s
        })
        .collect()
}

/// Does this tutor state show `field` as open?
pub(crate) fn is_open(tutor: &TutorState, field: FieldId) -> bool {
    tutor.field(field) == FieldState::Empty
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tutor::{required_steps, Feedback, Problem, StepAction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn primitive_set() {
        let p = primitive_skills();
        assert_eq!(p.len(), 5);
        assert!(p.iter().all(|s| s.qtable.is_empty() && s.origin == Origin::Primitive));
        assert_eq!(Compute::Mul.apply(3, 5), Some(15));
        assert_eq!(Compute::Div.apply(6, 0), None);
        assert_eq!(Compute::Div.apply(7, 2), None);
        assert_eq!(Compute::Sub.apply(2, 3), None);
    }

    #[test]
    fn empty_groups_give_no_skills() {
        assert!(fraction_skills(&[]).is_empty());
    }

    #[test]
    fn groups_partition_authored_skills() {
        let all = fraction_skills(&SkillGroupId::ALL);
        let mut total = 0;
        for g in SkillGroupId::ALL {
            let one = fraction_skills(&[g]);
            total += one.len();
            for s in &one {
                assert!(all.iter().any(|a| a.id == s.id));
            }
        }
        assert_eq!(total, all.len());
        let mut ids: Vec<_> = all.iter().map(|s| s.id.clone()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len());
    }

    /// Walks each problem: whenever an authored skill of the matching group
    /// proposes a write to an open field, the tutor must accept it.
    #[test]
    fn authored_skills_are_always_correct() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in SkillGroupId::ALL {
            let skills = fraction_skills(&[g]);
            for _ in 0..100 {
                let problem = Problem::random(g.problem_type(), 10, &mut rng);
                let mut tutor = TutorState::new(problem);
                let mut fired = 0;
                while !tutor.is_done() {
                    let proposal = skills.iter().find_map(|s| {
                        s.body.evaluate_rule(&tutor).filter(|(f, _)| is_open(&tutor, *f))
                    });
                    let (field, value) = proposal.expect("a skill applies at every step");
                    let fb = tutor.check_step(StepAction { field, value }).unwrap();
                    assert_eq!(fb, Feedback::Correct, "{g:?} on {problem}: {field}={value}");
                    fired += 1;
                }
                assert_eq!(fired, required_steps(&problem).len());
            }
        }
    }

    #[test]
    fn skills_round_trip_through_json() {
        let skills = fraction_skills(&SkillGroupId::ALL);
        let text = serde_json::to_string(&skills).unwrap();
        let back: Vec<Skill> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, skills);
    }
}
