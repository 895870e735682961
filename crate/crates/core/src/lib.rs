//! Simulated learners for a fraction-arithmetic tutor.
//!
//! A step-based tutor ([`tutor`]) poses addition and multiplication problems.
//! Agents ([`agent`]) practise on problem orderings ([`sequences`]), asking for
//! hints when they have nothing better to do and compiling explanations of the
//! demonstrated steps into new skills. Their first attempts are logged in a
//! transaction format shared with human data ([`logs`]), agent parameters can
//! be fitted to a student's log ([`tuning`]), and fitted agents can be run on
//! orderings the student never saw ([`experiment`]).

pub mod agent;
pub mod error;
pub mod experiment;
pub mod logs;
pub mod rngs;
pub mod sequences;
pub mod skills;
pub mod tuning;
pub mod tutor;

pub use agent::{Agent, AgentConfig, CognitiveParams};
pub use error::{LogError, TuneError, TutorError};
pub use logs::{LearningCurve, Outcome, StepRecord, StudentLog};
pub use sequences::{ProblemSequence, Schema};
pub use skills::SkillGroupId;
pub use tutor::{FieldId, Problem, ProblemType, TutorState};
