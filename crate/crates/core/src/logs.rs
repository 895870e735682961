//! Transaction logs, first-attempt extraction and learning curves.
//!
//! The CSV schema is `student_id,problem_id,step_field,attempt_index,outcome`.
//! Extra columns are ignored. A problem instance ends when the problem id
//! changes or a field sees attempt 1 again.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agent::{Agent, AgentConfig, ProblemRun};
use crate::error::LogError;
use crate::rngs;
use crate::sequences::{classify, ProblemSequence, Schema};
use crate::tutor::{FieldId, Problem, ProblemType};

pub const HEADER: [&str; 5] = ["student_id", "problem_id", "step_field", "attempt_index", "outcome"];

const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Correct,
    Incorrect,
    Hint,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Correct => "Correct",
            Outcome::Incorrect => "Incorrect",
            Outcome::Hint => "Hint",
        }
    }

    /// Incorrect answers and hint requests both count as errors.
    pub fn is_error(self) -> bool {
        self != Outcome::Correct
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Correct" => Ok(Outcome::Correct),
            "Incorrect" => Ok(Outcome::Incorrect),
            "Hint" => Ok(Outcome::Hint),
            _ => Err(s.to_string()),
        }
    }
}

/// Knowledge component: one input field of one problem type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KcLabel {
    pub ptype: ProblemType,
    pub field: FieldId,
}

impl KcLabel {
    /// Every label a tutor can credit.
    pub fn all() -> Vec<KcLabel> {
        ProblemType::ALL
            .iter()
            .flat_map(|&ptype| ptype.fields().iter().map(move |&field| KcLabel { ptype, field }))
            .collect()
    }
}

/// First attempt on one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Position of the problem in the learner's sequence.
    pub problem_index: usize,
    pub problem: Problem,
    pub field: FieldId,
    pub outcome: Outcome,
}

impl StepRecord {
    pub fn kc(&self) -> KcLabel {
        KcLabel { ptype: self.problem.ptype, field: self.field }
    }

    pub fn error(&self) -> f64 {
        if self.outcome.is_error() {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub student_id: String,
    pub problem_id: String,
    pub step_field: FieldId,
    pub attempt_index: u32,
    pub outcome: Outcome,
    pub row_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudentLog {
    pub student_id: String,
    /// Practice schema, when the sequence matches one.
    pub condition: Option<Schema>,
    pub sequence: Vec<Problem>,
    pub first_attempts: Vec<StepRecord>,
}

impl StudentLog {
    /// First attempts on the problems in `start..end` of the sequence.
    pub fn window(&self, start: usize, end: usize) -> impl Iterator<Item = &StepRecord> {
        self.first_attempts
            .iter()
            .filter(move |r| r.problem_index >= start && r.problem_index < end)
    }
}

/// Converts agent runs into transactions, numbering attempts per field.
pub fn transactions_from_runs(student_id: &str, problems: &[Problem], runs: &[ProblemRun]) -> Vec<Transaction> {
    let mut out = Vec::new();
    for (problem, run) in problems.iter().zip(runs) {
        let problem_id = problem.id();
        let mut attempts: BTreeMap<FieldId, u32> = BTreeMap::new();
        for step in &run.attempts {
            let n = attempts.entry(step.field).or_insert(0);
            *n += 1;
            out.push(Transaction {
                student_id: student_id.to_string(),
                problem_id: problem_id.clone(),
                step_field: step.field,
                attempt_index: *n,
                outcome: step.outcome,
                row_index: out.len(),
            });
        }
    }
    out
}

pub fn write_transactions(transactions: &[Transaction]) -> Result<String, LogError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(HEADER)?;
    for t in transactions {
        w.write_record([
            t.student_id.as_str(),
            t.problem_id.as_str(),
            t.step_field.name(),
            &t.attempt_index.to_string(),
            t.outcome.name(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("csv output is utf-8"))
}

struct Builder {
    log: StudentLog,
    current: Option<String>,
    attempts: HashMap<FieldId, u32>,
}

impl Builder {
    fn start_problem(&mut self, id: &str, problem: Problem) {
        self.current = Some(id.to_string());
        self.attempts.clear();
        self.log.sequence.push(problem);
    }
}

/// Parses a transaction CSV into one log per student, in order of first
/// appearance.
pub fn parse_transactions(text: &str) -> Result<Vec<StudentLog>, LogError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let expected = || LogError::Header { expected: HEADER.join(",") };
    let mut cols = [0usize; 5];
    for (slot, name) in cols.iter_mut().zip(HEADER) {
        *slot = headers.iter().position(|h| h == name).ok_or_else(expected)?;
    }

    let mut order: Vec<String> = Vec::new();
    let mut builders: HashMap<String, Builder> = HashMap::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let get = |c: usize| rec.get(cols[c]).unwrap_or("");
        let student = get(0).to_string();
        let problem_id = get(1);
        let problem: Problem = problem_id.parse().map_err(|source| LogError::Problem { row, source })?;
        let field: FieldId = get(2).parse().map_err(|source| LogError::Problem { row, source })?;
        let attempt: u32 = get(3)
            .parse()
            .ok()
            .filter(|&a| a >= 1)
            .ok_or_else(|| LogError::AttemptIndex { row, value: get(3).to_string() })?;
        let outcome: Outcome = get(4).parse().map_err(|value| LogError::Outcome { row, value })?;
        if !problem.ptype.fields().contains(&field) {
            return Err(LogError::FieldNotShown { row, field, problem: problem_id.to_string() });
        }

        let b = builders.entry(student.clone()).or_insert_with(|| {
            order.push(student.clone());
            Builder {
                log: StudentLog {
                    student_id: student.clone(),
                    condition: None,
                    sequence: Vec::new(),
                    first_attempts: Vec::new(),
                },
                current: None,
                attempts: HashMap::new(),
            }
        });
        let fresh = b.current.as_deref() != Some(problem_id) || (attempt == 1 && b.attempts.contains_key(&field));
        if fresh {
            b.start_problem(problem_id, problem);
        }
        let previous = b.attempts.get(&field).copied().unwrap_or(0);
        if attempt != previous + 1 {
            return Err(LogError::NonMonotoneAttempt { row, field, previous, got: attempt });
        }
        b.attempts.insert(field, attempt);
        if attempt == 1 {
            b.log.first_attempts.push(StepRecord {
                problem_index: b.log.sequence.len() - 1,
                problem,
                field,
                outcome,
            });
        }
    }

    Ok(order
        .into_iter()
        .map(|id| {
            let mut log = builders.remove(&id).expect("every ordered id has a builder").log;
            let types: Vec<ProblemType> = log.sequence.iter().map(|p| p.ptype).collect();
            log.condition = classify(&types);
            log
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub opportunity: usize,
    pub error_rate: f64,
    pub n: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
}

impl LearningCurve {
    pub fn at(&self, opportunity: usize) -> Option<&CurvePoint> {
        self.points.get(opportunity)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("opportunity,error_rate,n,ci_low,ci_high\n");
        for p in &self.points {
            s.push_str(&format!("{},{:.6},{},{:.6},{:.6}\n", p.opportunity, p.error_rate, p.n, p.ci_low, p.ci_high));
        }
        s
    }
}

/// Number of earlier records with the same label, for each record.
pub fn opportunities<K: Ord>(records: &[StepRecord], kc_of: impl Fn(&StepRecord) -> K) -> Vec<usize> {
    let mut seen: BTreeMap<K, usize> = BTreeMap::new();
    records
        .iter()
        .map(|r| {
            let n = seen.entry(kc_of(r)).or_insert(0);
            *n += 1;
            *n - 1
        })
        .collect()
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn point(opportunity: usize, mean: f64, n: usize, spread: &[f64]) -> CurvePoint {
    let (_, sd) = mean_sd(spread);
    let half = Z95 * sd / (spread.len() as f64).sqrt();
    CurvePoint {
        opportunity,
        error_rate: mean,
        n,
        ci_low: (mean - half).clamp(0.0, 1.0),
        ci_high: (mean + half).clamp(0.0, 1.0),
    }
}

/// Error buckets per opportunity.
fn bucket<K: Ord>(records: &[StepRecord], kc_of: impl Fn(&StepRecord) -> K) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (r, k) in records.iter().zip(opportunities(records, kc_of)) {
        if out.len() <= k {
            out.resize_with(k + 1, Vec::new);
        }
        out[k].push(r.error());
    }
    out
}

/// Learning curve of one learner with the default KC model.
pub fn learning_curve(records: &[StepRecord]) -> LearningCurve {
    learning_curve_by(records, StepRecord::kc)
}

/// Learning curve of one learner; the interval uses the per-record spread.
pub fn learning_curve_by<K: Ord>(records: &[StepRecord], kc_of: impl Fn(&StepRecord) -> K) -> LearningCurve {
    let points = bucket(records, kc_of)
        .iter()
        .enumerate()
        .map(|(k, errs)| point(k, mean_sd(errs).0, errs.len(), errs))
        .collect();
    LearningCurve { points }
}

/// Pools replications into one curve. The error rate at each opportunity is
/// the mean over every record of every replication; the interval is built
/// from the spread of per-replication means, so one replication gives a
/// zero-width band.
pub fn aggregate_curves(replications: &[Vec<StepRecord>]) -> LearningCurve {
    let per_rep: Vec<Vec<Vec<f64>>> = replications.iter().map(|r| bucket(r, StepRecord::kc)).collect();
    let len = per_rep.iter().map(Vec::len).max().unwrap_or(0);
    let points = (0..len)
        .map(|k| {
            let mut pooled = 0.0;
            let mut n = 0;
            let mut rep_means = Vec::new();
            for rep in &per_rep {
                if let Some(errs) = rep.get(k) {
                    pooled += errs.iter().sum::<f64>();
                    n += errs.len();
                    rep_means.push(mean_sd(errs).0);
                }
            }
            point(k, pooled / n as f64, n, &rep_means)
        })
        .collect();
    LearningCurve { points }
}

/// Runs a simulated student over a sequence and returns both its log and the
/// raw transactions.
pub fn simulate_student(
    config: &AgentConfig,
    sequence: &ProblemSequence,
    seed: u64,
    student_id: &str,
) -> (StudentLog, Vec<Transaction>) {
    let mut agent = Agent::new(config.clone(), rngs::agent_seed(seed, 0));
    let runs = agent.run_sequence(&sequence.problems);
    let transactions = transactions_from_runs(student_id, &sequence.problems, &runs);
    let log = StudentLog {
        student_id: student_id.to_string(),
        condition: Some(sequence.schema),
        sequence: sequence.problems.clone(),
        first_attempts: runs.into_iter().flat_map(|r| r.records).collect(),
    };
    (log, transactions)
}

pub fn synth_student(config: &AgentConfig, sequence: &ProblemSequence, seed: u64, student_id: &str) -> StudentLog {
    simulate_student(config, sequence, seed, student_id).0
}

/// Distinct labels exercised in a record list.
pub fn labels(records: &[StepRecord]) -> BTreeSet<KcLabel> {
    records.iter().map(StepRecord::kc).collect()
}
