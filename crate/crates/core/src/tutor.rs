//! The fraction-arithmetic tutor: problems, interface fields, step checking and
//! bottom-out hints.
//!
//! The tutor is a small deterministic state machine. Every problem starts with a
//! `ConvertCheck` decision; addition with unlike denominators then unlocks the
//! four conversion fields, which must be filled with the butterfly method in a
//! fixed order before the answer fields are admissible. Answers are never
//! reduced.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::TutorError;

/// Operand range used by the experiment drivers.
pub const DEFAULT_MAX_OPERAND: i64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

impl Fraction {
    pub fn new(num: i64, den: i64) -> Result<Self, TutorError> {
        if num < 1 || den < 1 {
            return Err(TutorError::NonPositiveOperand { num, den });
        }
        Ok(Self { num, den })
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProblemType {
    AddSame,
    AddDiff,
    Mul,
}

impl ProblemType {
    pub const ALL: [ProblemType; 3] = [ProblemType::AddSame, ProblemType::AddDiff, ProblemType::Mul];

    /// Interface fields the tutor shows for this problem type, in hint order.
    pub fn fields(self) -> &'static [FieldId] {
        match self {
            ProblemType::AddDiff => &FieldId::ALL,
            ProblemType::AddSame | ProblemType::Mul => &[
                FieldId::ConvertCheck,
                FieldId::AnswerNum,
                FieldId::AnswerDen,
                FieldId::Done,
            ],
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ProblemType::AddSame => "AS",
            ProblemType::AddDiff => "AD",
            ProblemType::Mul => "M",
        }
    }
}

/// Interface fields. Declaration order is the fixed hint order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldId {
    ConvertCheck,
    ConvLeftDen,
    ConvRightDen,
    ConvLeftNum,
    ConvRightNum,
    AnswerNum,
    AnswerDen,
    Done,
}

impl FieldId {
    pub const ALL: [FieldId; 8] = [
        FieldId::ConvertCheck,
        FieldId::ConvLeftDen,
        FieldId::ConvRightDen,
        FieldId::ConvLeftNum,
        FieldId::ConvRightNum,
        FieldId::AnswerNum,
        FieldId::AnswerDen,
        FieldId::Done,
    ];

    pub const CONVERSION: [FieldId; 4] = [
        FieldId::ConvLeftDen,
        FieldId::ConvRightDen,
        FieldId::ConvLeftNum,
        FieldId::ConvRightNum,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// `ConvertCheck` and `Done` take booleans; every other field an integer.
    pub fn is_boolean(self) -> bool {
        matches!(self, FieldId::ConvertCheck | FieldId::Done)
    }

    pub fn is_conversion(self) -> bool {
        FieldId::CONVERSION.contains(&self)
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldId::ConvertCheck => "ConvertCheck",
            FieldId::ConvLeftDen => "ConvLeftDen",
            FieldId::ConvRightDen => "ConvRightDen",
            FieldId::ConvLeftNum => "ConvLeftNum",
            FieldId::ConvRightNum => "ConvRightNum",
            FieldId::AnswerNum => "AnswerNum",
            FieldId::AnswerDen => "AnswerDen",
            FieldId::Done => "Done",
        }
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FieldId {
    type Err = TutorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FieldId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| TutorError::UnknownField(s.to_string()))
    }
}

/// A value entered into a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
}

impl Value {
    pub fn as_int(self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(v),
            Value::Bool(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Problem {
    pub ptype: ProblemType,
    pub left: Fraction,
    pub right: Fraction,
}

impl Problem {
    /// Builds a problem, checking the denominator constraint of `ptype`.
    pub fn new(ptype: ProblemType, left: Fraction, right: Fraction) -> Result<Self, TutorError> {
        let ok = match ptype {
            ProblemType::AddSame => left.den == right.den,
            ProblemType::AddDiff => left.den != right.den,
            ProblemType::Mul => true,
        };
        if !ok {
            return Err(TutorError::DenominatorConstraint(ptype));
        }
        Ok(Self { ptype, left, right })
    }

    /// Draws a random problem with operands uniform in `[1, max_operand]`.
    ///
    /// Addition with unlike denominators draws denominators from
    /// `[2, max_operand]` and resamples the right one until they differ.
    ///
    /// # Panics
    ///
    /// If `max_operand < 2`.
    pub fn random<R: Rng + ?Sized>(ptype: ProblemType, max_operand: i64, rng: &mut R) -> Self {
        assert!(max_operand >= 2, "max_operand must be at least 2");
        let n1 = rng.random_range(1..=max_operand);
        let n2 = rng.random_range(1..=max_operand);
        let (d1, d2) = match ptype {
            ProblemType::AddSame => {
                let d = rng.random_range(1..=max_operand);
                (d, d)
            }
            ProblemType::AddDiff => {
                let d1 = rng.random_range(2..=max_operand);
                let mut d2 = rng.random_range(2..=max_operand);
                while d2 == d1 {
                    d2 = rng.random_range(2..=max_operand);
                }
                (d1, d2)
            }
            ProblemType::Mul => (rng.random_range(1..=max_operand), rng.random_range(1..=max_operand)),
        };
        Self {
            ptype,
            left: Fraction { num: n1, den: d1 },
            right: Fraction { num: n2, den: d2 },
        }
    }

    /// Text id, e.g. `2/5+1/5` or `2/3*4/5`.
    pub fn id(&self) -> String {
        self.to_string()
    }

    /// Ground truth for `field`, or `None` if this problem type does not show it.
    pub fn correct_value(&self, field: FieldId) -> Option<Value> {
        if !self.ptype.fields().contains(&field) {
            return None;
        }
        let Fraction { num: n1, den: d1 } = self.left;
        let Fraction { num: n2, den: d2 } = self.right;
        let v = match field {
            FieldId::ConvertCheck => Value::Bool(self.ptype == ProblemType::AddDiff),
            FieldId::ConvLeftDen | FieldId::ConvRightDen => Value::Int(d1 * d2),
            FieldId::ConvLeftNum => Value::Int(n1 * d2),
            FieldId::ConvRightNum => Value::Int(n2 * d1),
            FieldId::AnswerNum => Value::Int(match self.ptype {
                ProblemType::AddSame => n1 + n2,
                ProblemType::AddDiff => n1 * d2 + n2 * d1,
                ProblemType::Mul => n1 * n2,
            }),
            FieldId::AnswerDen => Value::Int(match self.ptype {
                ProblemType::AddSame => d1,
                ProblemType::AddDiff | ProblemType::Mul => d1 * d2,
            }),
            FieldId::Done => Value::Bool(true),
        };
        Some(v)
    }

    /// Fields that must be locked before `field` is admissible.
    pub fn prerequisites(&self, field: FieldId) -> &'static [FieldId] {
        use FieldId::*;
        match field {
            ConvertCheck => &[],
            ConvLeftDen => &[ConvertCheck],
            ConvRightDen | ConvLeftNum => &[ConvLeftDen],
            ConvRightNum => &[ConvLeftDen, ConvRightDen, ConvLeftNum],
            AnswerNum | AnswerDen => match self.ptype {
                ProblemType::AddDiff => &[ConvLeftDen, ConvRightDen, ConvLeftNum, ConvRightNum],
                _ => &[ConvertCheck],
            },
            Done => &[AnswerNum, AnswerDen],
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.ptype == ProblemType::Mul { '*' } else { '+' };
        write!(f, "{}{}{}", self.left, op, self.right)
    }
}

impl FromStr for Problem {
    type Err = TutorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TutorError::MalformedProblem(s.to_string());
        let (op_pos, op) = s
            .char_indices()
            .find(|&(_, c)| c == '+' || c == '*')
            .ok_or_else(bad)?;
        let parse_frac = |t: &str| -> Result<Fraction, TutorError> {
            let (n, d) = t.split_once('/').ok_or_else(bad)?;
            let is_digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
            if !is_digits(n) || !is_digits(d) {
                return Err(bad());
            }
            let num = n.parse().map_err(|_| bad())?;
            let den = d.parse().map_err(|_| bad())?;
            Fraction::new(num, den).map_err(|_| bad())
        };
        let left = parse_frac(&s[..op_pos])?;
        let right = parse_frac(&s[op_pos + 1..])?;
        let ptype = match op {
            '*' => ProblemType::Mul,
            _ if left.den == right.den => ProblemType::AddSame,
            _ => ProblemType::AddDiff,
        };
        Ok(Problem { ptype, left, right })
    }
}

/// The canonical ordered step list: every shown field with its correct value,
/// in hint order (which respects every ordering constraint).
pub fn required_steps(problem: &Problem) -> Vec<(FieldId, Value)> {
    problem
        .ptype
        .fields()
        .iter()
        .map(|&f| (f, problem.correct_value(f).expect("shown field has a value")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldState {
    Hidden,
    Empty,
    Locked(Value),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepAction {
    pub field: FieldId,
    pub value: Value,
}

/// A bottom-out hint: the next correct step.
pub type Demonstration = StepAction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Feedback {
    Correct,
    Incorrect,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TutorState {
    problem: Problem,
    fields: [FieldState; 8],
    done: bool,
}

impl TutorState {
    pub fn new(problem: Problem) -> Self {
        let mut fields = [FieldState::Hidden; 8];
        for &f in problem.ptype.fields() {
            if !f.is_conversion() {
                fields[f.index()] = FieldState::Empty;
            }
        }
        Self { problem, fields, done: false }
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn field(&self, field: FieldId) -> FieldState {
        self.fields[field.index()]
    }

    pub fn locked_value(&self, field: FieldId) -> Option<Value> {
        match self.field(field) {
            FieldState::Locked(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Visible fields that still accept input.
    pub fn open_fields(&self) -> impl Iterator<Item = FieldId> + '_ {
        FieldId::ALL
            .into_iter()
            .filter(|&f| self.field(f) == FieldState::Empty)
    }

    /// True when `field` is open and all of its prerequisites are locked.
    pub fn is_admissible(&self, field: FieldId) -> bool {
        self.field(field) == FieldState::Empty
            && self
                .problem
                .prerequisites(field)
                .iter()
                .all(|&p| matches!(self.field(p), FieldState::Locked(_)))
    }

    /// Scores one tutor transaction. On a correct entry the field locks and any
    /// newly enabled fields appear.
    pub fn check_step(&mut self, action: StepAction) -> Result<Feedback, TutorError> {
        match self.field(action.field) {
            FieldState::Hidden => return Err(TutorError::HiddenField(action.field)),
            FieldState::Locked(_) => return Err(TutorError::LockedField(action.field)),
            FieldState::Empty => {}
        }
        if action.field.is_boolean() != matches!(action.value, Value::Bool(_)) {
            return Err(TutorError::ValueType(action.field));
        }
        let truth = self
            .problem
            .correct_value(action.field)
            .expect("visible field has a ground truth");
        if !self.is_admissible(action.field) || action.value != truth {
            return Ok(Feedback::Incorrect);
        }
        self.fields[action.field.index()] = FieldState::Locked(action.value);
        match action.field {
            FieldId::ConvertCheck if action.value == Value::Bool(true) => {
                for f in FieldId::CONVERSION {
                    self.fields[f.index()] = FieldState::Empty;
                }
            }
            FieldId::Done => self.done = true,
            _ => {}
        }
        Ok(Feedback::Correct)
    }

    /// The first admissible field in hint order, with its correct value.
    pub fn next_hint(&self) -> Result<Demonstration, TutorError> {
        if self.done {
            return Err(TutorError::ProblemFinished);
        }
        FieldId::ALL
            .into_iter()
            .find(|&f| self.is_admissible(f))
            .map(|field| StepAction {
                field,
                value: self.problem.correct_value(field).expect("admissible field is shown"),
            })
            .ok_or(TutorError::ProblemFinished)
    }

    /// Performs the hinted step on the learner's behalf and returns it.
    pub fn apply_hint(&mut self) -> Result<Demonstration, TutorError> {
        let demo = self.next_hint()?;
        let fb = self.check_step(demo)?;
        debug_assert_eq!(fb, Feedback::Correct);
        Ok(demo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> Problem {
        s.parse().unwrap()
    }

    fn int(v: i64) -> Value {
        Value::Int(v)
    }

    fn act(field: FieldId, value: Value) -> StepAction {
        StepAction { field, value }
    }

    #[test]
    fn random_problems_respect_type_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let a = Problem::random(ProblemType::AddSame, 10, &mut rng);
            assert_eq!(a.left.den, a.right.den);
            let d = Problem::random(ProblemType::AddDiff, 10, &mut rng);
            assert_ne!(d.left.den, d.right.den);
            assert!(d.left.den >= 2 && d.right.den >= 2);
            let m = Problem::random(ProblemType::Mul, 10, &mut rng);
            for v in [m.left.num, m.left.den, m.right.num, m.right.den] {
                assert!((1..=10).contains(&v));
            }
        }
    }

    #[test]
    fn problem_ids() {
        assert_eq!(p("1/2+1/3").ptype, ProblemType::AddDiff);
        assert_eq!(p("2/5+1/5").ptype, ProblemType::AddSame);
        assert_eq!(p("2/3*4/5").ptype, ProblemType::Mul);
        assert_eq!(p("1/2+1/3").id(), "1/2+1/3");
        for bad in ["", "1/2", "1/2-1/3", "0/2+1/3", "a/2+1/3", "1/2+1/", "1//2+1/3", "-1/2+1/3"] {
            assert!(bad.parse::<Problem>().is_err(), "{bad}");
        }
        assert!(Problem::new(ProblemType::AddSame, Fraction::new(1, 2).unwrap(), Fraction::new(1, 3).unwrap()).is_err());
    }

    #[test]
    fn butterfly_left_den_first() {
        let mut s = TutorState::new(p("1/2+1/3"));
        assert_eq!(s.check_step(act(FieldId::ConvertCheck, Value::Bool(true))).unwrap(), Feedback::Correct);
        assert_eq!(s.field(FieldId::ConvLeftDen), FieldState::Empty);
        // right numerator before left denominator is out of order
        assert_eq!(s.check_step(act(FieldId::ConvRightNum, int(2))).unwrap(), Feedback::Incorrect);
        assert_eq!(s.field(FieldId::ConvRightNum), FieldState::Empty);
        assert_eq!(s.check_step(act(FieldId::ConvLeftDen, int(6))).unwrap(), Feedback::Correct);
    }

    #[test]
    fn right_numerator_needs_all_three_prior_conversions() {
        let mut s = TutorState::new(p("1/2+1/3"));
        s.check_step(act(FieldId::ConvertCheck, Value::Bool(true))).unwrap();
        s.check_step(act(FieldId::ConvLeftDen, int(6))).unwrap();
        assert_eq!(s.check_step(act(FieldId::ConvRightNum, int(2))).unwrap(), Feedback::Incorrect);
        s.check_step(act(FieldId::ConvRightDen, int(6))).unwrap();
        assert_eq!(s.check_step(act(FieldId::ConvRightNum, int(2))).unwrap(), Feedback::Incorrect);
        s.check_step(act(FieldId::ConvLeftNum, int(3))).unwrap();
        assert_eq!(s.check_step(act(FieldId::ConvRightNum, int(2))).unwrap(), Feedback::Correct);
    }

    #[test]
    fn multiplication_and_convert_check() {
        let mut m = TutorState::new(p("2/3*4/5"));
        m.check_step(act(FieldId::ConvertCheck, Value::Bool(false))).unwrap();
        assert_eq!(m.check_step(act(FieldId::AnswerNum, int(8))).unwrap(), Feedback::Correct);

        let mut a = TutorState::new(p("2/5+1/5"));
        assert_eq!(a.check_step(act(FieldId::ConvertCheck, Value::Bool(true))).unwrap(), Feedback::Incorrect);
    }

    #[test]
    fn done_requires_both_answers() {
        let mut s = TutorState::new(p("2/5+1/5"));
        s.check_step(act(FieldId::ConvertCheck, Value::Bool(false))).unwrap();
        assert_eq!(s.check_step(act(FieldId::Done, Value::Bool(true))).unwrap(), Feedback::Incorrect);
        s.check_step(act(FieldId::AnswerDen, int(5))).unwrap();
        assert_eq!(s.check_step(act(FieldId::Done, Value::Bool(true))).unwrap(), Feedback::Incorrect);
        s.check_step(act(FieldId::AnswerNum, int(3))).unwrap();
        assert_eq!(s.check_step(act(FieldId::Done, Value::Bool(true))).unwrap(), Feedback::Correct);
        assert!(s.is_done());
        assert_eq!(s.next_hint(), Err(TutorError::ProblemFinished));
    }

    #[test]
    fn contract_violations() {
        let mut s = TutorState::new(p("2/5+1/5"));
        assert_eq!(s.check_step(act(FieldId::ConvLeftDen, int(25))), Err(TutorError::HiddenField(FieldId::ConvLeftDen)));
        s.check_step(act(FieldId::ConvertCheck, Value::Bool(false))).unwrap();
        assert_eq!(
            s.check_step(act(FieldId::ConvertCheck, Value::Bool(false))),
            Err(TutorError::LockedField(FieldId::ConvertCheck))
        );
        assert_eq!(s.check_step(act(FieldId::AnswerNum, Value::Bool(true))), Err(TutorError::ValueType(FieldId::AnswerNum)));
    }

    #[test]
    fn hints_follow_fixed_order() {
        let s = TutorState::new(p("1/2+1/3"));
        assert_eq!(s.next_hint().unwrap(), act(FieldId::ConvertCheck, Value::Bool(true)));

        let mut s = TutorState::new(p("1/2+1/3"));
        for _ in 0..5 {
            s.apply_hint().unwrap();
        }
        for f in FieldId::CONVERSION {
            assert!(matches!(s.field(f), FieldState::Locked(_)));
        }
        // 1*3 + 1*2
        assert_eq!(s.next_hint().unwrap(), act(FieldId::AnswerNum, int(5)));

        let mut s = TutorState::new(p("2/5+1/5"));
        s.check_step(act(FieldId::ConvertCheck, Value::Bool(false))).unwrap();
        assert_eq!(s.next_hint().unwrap(), act(FieldId::AnswerNum, int(3)));
    }

    #[test]
    fn required_step_counts() {
        assert_eq!(required_steps(&p("2/5+1/5")).len(), 4);
        assert_eq!(required_steps(&p("1/2+1/3")).len(), 8);
        assert!(required_steps(&p("2/3*4/5")).contains(&(FieldId::AnswerDen, int(15))));
    }
}
