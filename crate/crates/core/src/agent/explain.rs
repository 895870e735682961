//! Explaining a demonstrated step as a chain of arithmetic skills and
//! compiling the chain into a single macro-skill.

use std::collections::BTreeSet;

use crate::skills::{Compute, Effect, Origin, Pattern, QTable, Skill, SkillBody, Source};
use crate::tutor::{Demonstration, FieldId, TutorState, Value};

/// A chain of effects that reproduces a demonstrated value. The last effect is
/// the external write; earlier ones fill rule-local scratch slots `0, 1, ..`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Explanation {
    pub effects: Vec<Effect>,
}

impl Explanation {
    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

fn base_sources(tutor: &TutorState) -> Vec<(Source, i64)> {
    let mut out: Vec<(Source, i64)> = Source::OPERANDS
        .into_iter()
        .filter_map(|s| Some((s, s.resolve(tutor, &[])?.as_int()?)))
        .collect();
    for f in FieldId::ALL {
        if let Some(Value::Int(v)) = tutor.locked_value(f) {
            out.push((Source::Field(f), v));
        }
    }
    out
}

/// Ordered argument pairs over distinct sources; commutative operations take
/// each unordered pair once, in source order.
fn pairs(compute: Compute, items: &[(Source, i64)]) -> Vec<[(Source, i64); 2]> {
    let mut out = Vec::new();
    for (i, &a) in items.iter().enumerate() {
        for (j, &b) in items.iter().enumerate() {
            if i == j {
                continue;
            }
            if compute.is_commutative() && a.0 > b.0 {
                continue;
            }
            out.push([a, b]);
        }
    }
    out
}

/// Iterative-deepening search for every chain of at most `max_chain` effects
/// (internal arithmetic followed by one copy) that writes `demo.value` to
/// `demo.field`. All chains of the shortest successful length are returned.
/// Reward predictions play no part in the search.
pub fn explain(demo: &Demonstration, tutor: &TutorState, max_chain: usize) -> Vec<Explanation> {
    if max_chain == 0 {
        return Vec::new();
    }
    let write = |value| Effect::External { field: demo.field, value };
    if let Value::Bool(_) = demo.value {
        return vec![Explanation { effects: vec![write(Source::Constant(demo.value))] }];
    }
    let Value::Int(target) = demo.value else { unreachable!() };
    let base = base_sources(tutor);

    let mut found: BTreeSet<Explanation> = base
        .iter()
        .filter(|(_, v)| *v == target)
        .map(|&(s, _)| Explanation { effects: vec![write(s)] })
        .collect();

    // depth 2: one computation then copy
    if found.is_empty() && max_chain >= 2 {
        for compute in Compute::ALL {
            for [(sa, a), (sb, b)] in pairs(compute, &base) {
                if compute.apply(a, b) == Some(target) {
                    found.insert(Explanation {
                        effects: vec![
                            Effect::Internal { compute, args: [sa, sb], out: 0 },
                            write(Source::Scratch(0)),
                        ],
                    });
                }
            }
        }
    }

    // depth 3: a second computation that consumes the first result
    if found.is_empty() && max_chain >= 3 {
        for first in Compute::ALL {
            for [(sa, a), (sb, b)] in pairs(first, &base) {
                let Some(mid) = first.apply(a, b) else { continue };
                let mut items = base.clone();
                items.push((Source::Scratch(0), mid));
                for second in Compute::ALL {
                    for [(sx, x), (sy, y)] in pairs(second, &items) {
                        if sx != Source::Scratch(0) && sy != Source::Scratch(0) {
                            continue;
                        }
                        if second.apply(x, y) == Some(target) {
                            found.insert(Explanation {
                                effects: vec![
                                    Effect::Internal { compute: first, args: [sa, sb], out: 0 },
                                    Effect::Internal { compute: second, args: [sx, sy], out: 1 },
                                    write(Source::Scratch(1)),
                                ],
                            });
                        }
                    }
                }
            }
        }
    }
    found.into_iter().collect()
}

/// Composes an explanation into a compiled skill.
///
/// The conditions require every operand and field the chain reads, plus every
/// field that was locked when the demonstration was given, so the new skill
/// only proposes its step at the same point in the tutor's ordering.
pub fn compile(explanation: &Explanation, tutor: &TutorState) -> Skill {
    let mut read: BTreeSet<Source> = BTreeSet::new();
    for e in &explanation.effects {
        match e {
            Effect::Internal { args, .. } => read.extend(args.iter().copied()),
            Effect::External { value, .. } => {
                read.insert(*value);
            }
        }
    }
    for f in FieldId::ALL {
        if tutor.locked_value(f).is_some() {
            read.insert(Source::Field(f));
        }
    }
    let conditions: Vec<Pattern> = read
        .into_iter()
        .filter(|s| matches!(s, Source::Operand { .. } | Source::Field(_)))
        .map(Pattern::bound)
        .collect();

    let chain: Vec<String> = explanation.effects.iter().map(|e| e.to_string()).collect();
    let when: Vec<String> = conditions
        .iter()
        .filter_map(|c| match c.source {
            Source::Field(f) => Some(f.to_string()),
            _ => None,
        })
        .collect();
    let id = format!("learned:{} | {}", chain.join("; "), when.join(","));
    let constituents = explanation
        .effects
        .iter()
        .map(|e| match e {
            Effect::Internal { compute, .. } => compute.name().to_string(),
            Effect::External { .. } => "copy".to_string(),
        })
        .collect();

    Skill {
        id,
        origin: Origin::Compiled,
        body: SkillBody::Rule { conditions, effects: explanation.effects.clone() },
        qtable: QTable::default(),
        constituents,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skills::{Part, Side};
    use crate::tutor::{Problem, StepAction};

    fn state(s: &str) -> TutorState {
        TutorState::new(s.parse::<Problem>().unwrap())
    }

    fn demo(field: FieldId, v: i64) -> Demonstration {
        StepAction { field, value: Value::Int(v) }
    }

    const LD: Source = Source::Operand { side: Side::Left, part: Part::Den };
    const RD: Source = Source::Operand { side: Side::Right, part: Part::Den };

    /// Independent enumeration of single-operation chains over the four
    /// operand values, counting distinct (operation, unordered-or-ordered
    /// pair) combinations that produce `target`.
    fn oracle_depth_two(operands: [i64; 4], target: i64) -> Vec<(char, usize, usize)> {
        let mut hits = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let (a, b) = (operands[i], operands[j]);
                if i < j && a + b == target {
                    hits.push(('+', i, j));
                }
                if i < j && a * b == target {
                    hits.push(('*', i, j));
                }
                if a > b && a - b == target {
                    hits.push(('-', i, j));
                }
                if b != 0 && a % b == 0 && a / b == target {
                    hits.push(('/', i, j));
                }
            }
        }
        hits
    }

    #[test]
    fn left_denominator_is_product_of_denominators() {
        let mut s = state("1/2+1/3");
        s.apply_hint().unwrap();
        let oracle = oracle_depth_two([1, 2, 1, 3], 6);
        assert_eq!(oracle, vec![('*', 1, 3)]);
        let ex = explain(&demo(FieldId::ConvLeftDen, 6), &s, 3);
        assert_eq!(ex.len(), 1);
        assert_eq!(
            ex[0].effects,
            vec![
                Effect::Internal { compute: Compute::Mul, args: [LD, RD], out: 0 },
                Effect::External { field: FieldId::ConvLeftDen, value: Source::Scratch(0) },
            ]
        );
    }

    #[test]
    fn add_then_copy() {
        let mut s = state("2/9+3/9");
        s.apply_hint().unwrap();
        assert_eq!(oracle_depth_two([2, 9, 3, 9], 5).len(), 1);
        let ex = explain(&demo(FieldId::AnswerNum, 5), &s, 3);
        assert_eq!(ex.len(), 1);
        let skill = compile(&ex[0], &s);
        assert_eq!(skill.constituents, vec!["add", "copy"]);
        assert_eq!(skill.origin, Origin::Compiled);
    }

    #[test]
    fn ambiguous_values_yield_one_explanation_per_binding() {
        let mut s = state("2/7+3/7");
        s.apply_hint().unwrap();
        let expected = oracle_depth_two([2, 7, 3, 7], 5).len();
        assert_eq!(expected, 3);
        assert_eq!(explain(&demo(FieldId::AnswerNum, 5), &s, 3).len(), expected);
        // equal denominators: copying either one explains the answer denominator
        assert_eq!(explain(&demo(FieldId::AnswerDen, 7), &s, 3).len(), 2);
    }

    #[test]
    fn unreachable_values_give_nothing() {
        let mut s = state("1/2+1/3");
        s.apply_hint().unwrap();
        assert!(explain(&demo(FieldId::ConvLeftDen, 997), &s, 3).is_empty());
        assert!(explain(&demo(FieldId::ConvLeftDen, 6), &s, 1).is_empty());
    }

    #[test]
    fn depth_three_chains() {
        // no single operation over {1, 2, 1, 3} gives 9, but (2+1)*3 does
        let mut s = state("1/2+1/3");
        s.apply_hint().unwrap();
        let ex = explain(&demo(FieldId::ConvLeftDen, 9), &s, 3);
        assert!(!ex.is_empty());
        assert!(ex.iter().all(|e| e.len() == 3));
        for e in &ex {
            let skill = compile(e, &s);
            assert_eq!(skill.body.evaluate_rule(&s), Some((FieldId::ConvLeftDen, Value::Int(9))));
        }
    }

    #[test]
    fn compiled_rule_reproduces_demo_and_generalises() {
        let mut s = state("1/2+1/3");
        s.apply_hint().unwrap();
        let ex = explain(&demo(FieldId::ConvLeftDen, 6), &s, 3);
        let skill = compile(&ex[0], &s);
        assert_eq!(skill.body.evaluate_rule(&s), Some((FieldId::ConvLeftDen, Value::Int(6))));
        let mut other = state("3/4+2/5");
        assert_eq!(skill.body.evaluate_rule(&other), None, "ConvertCheck not yet locked");
        other.apply_hint().unwrap();
        assert_eq!(skill.body.evaluate_rule(&other), Some((FieldId::ConvLeftDen, Value::Int(20))));
    }
}
