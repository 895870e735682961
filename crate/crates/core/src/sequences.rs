//! Practice orderings: blocked (two type orders), interleaved, and a faded
//! schedule that shrinks same-type blocks from three to two to one.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rngs;
use crate::tutor::{Problem, ProblemType, DEFAULT_MAX_OPERAND};

pub const PER_TYPE: usize = 16;
pub const SEQUENCE_LEN: usize = 3 * PER_TYPE;

/// (rounds, block size) for the faded schedule. Every round has one block of
/// each problem type: 2*3 + 3*2 + 4*1 = 16 problems per type.
pub const FADED_ROUNDS: [(usize, usize); 3] = [(2, 3), (3, 2), (4, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schema {
    BlockedA,
    BlockedB,
    Interleaved,
    Faded,
}

impl Schema {
    pub const ALL: [Schema; 4] = [Schema::BlockedA, Schema::BlockedB, Schema::Interleaved, Schema::Faded];

    pub fn name(self) -> &'static str {
        match self {
            Schema::BlockedA => "blocked-a",
            Schema::BlockedB => "blocked-b",
            Schema::Interleaved => "interleaved",
            Schema::Faded => "faded",
        }
    }

    /// Draws a sequence of this schema.
    pub fn generate(self, seed: u64) -> ProblemSequence {
        match self {
            Schema::BlockedA => blocked(BlockedVariant::A, seed),
            Schema::BlockedB => blocked(BlockedVariant::B, seed),
            Schema::Interleaved => interleaved(seed),
            Schema::Faded => faded(seed),
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Schema {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Schema::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown schema {s:?} (expected blocked-a, blocked-b, interleaved or faded)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockedVariant {
    /// Same-denominator addition, unlike-denominator addition, multiplication.
    A,
    /// Multiplication first, then the two addition types.
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSequence {
    pub schema: Schema,
    pub problems: Vec<Problem>,
    pub seed: u64,
}

impl ProblemSequence {
    pub fn ids(&self) -> Vec<String> {
        self.problems.iter().map(Problem::id).collect()
    }

    /// JSON array of problem ids.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.ids()).expect("strings serialize")
    }

    pub fn types(&self) -> Vec<ProblemType> {
        self.problems.iter().map(|p| p.ptype).collect()
    }
}

fn fill<R: Rng + ?Sized>(types: &[ProblemType], rng: &mut R) -> Vec<Problem> {
    types
        .iter()
        .map(|&t| Problem::random(t, DEFAULT_MAX_OPERAND, rng))
        .collect()
}

pub fn blocked(variant: BlockedVariant, seed: u64) -> ProblemSequence {
    use ProblemType::*;
    let order = match variant {
        BlockedVariant::A => [AddSame, AddDiff, Mul],
        BlockedVariant::B => [Mul, AddSame, AddDiff],
    };
    let types: Vec<ProblemType> = order.iter().flat_map(|&t| [t; PER_TYPE]).collect();
    let mut rng = rngs::rng(seed, 1);
    ProblemSequence {
        schema: match variant {
            BlockedVariant::A => Schema::BlockedA,
            BlockedVariant::B => Schema::BlockedB,
        },
        problems: fill(&types, &mut rng),
        seed,
    }
}

pub fn interleaved(seed: u64) -> ProblemSequence {
    let mut types: Vec<ProblemType> = ProblemType::ALL.iter().flat_map(|&t| [t; PER_TYPE]).collect();
    let mut rng = rngs::rng(seed, 2);
    types.shuffle(&mut rng);
    ProblemSequence { schema: Schema::Interleaved, problems: fill(&types, &mut rng), seed }
}

/// Faded blocked-to-interleaved schedule. The first round uses the fixed type
/// order AS, AD, M; every later round shuffles the order of its three blocks.
pub fn faded(seed: u64) -> ProblemSequence {
    let mut rng = rngs::rng(seed, 3);
    let mut types = Vec::with_capacity(SEQUENCE_LEN);
    let mut first = true;
    for (rounds, size) in FADED_ROUNDS {
        for _ in 0..rounds {
            let mut order = ProblemType::ALL;
            if !first {
                order.shuffle(&mut rng);
            }
            first = false;
            for t in order {
                types.extend(std::iter::repeat_n(t, size));
            }
        }
    }
    ProblemSequence { schema: Schema::Faded, problems: fill(&types, &mut rng), seed }
}

fn is_faded(types: &[ProblemType]) -> bool {
    let mut pos = 0;
    let mut first = true;
    for (rounds, size) in FADED_ROUNDS {
        for _ in 0..rounds {
            let mut seen = Vec::with_capacity(3);
            for _ in 0..3 {
                let block = &types[pos..pos + size];
                if block.iter().any(|&t| t != block[0]) || seen.contains(&block[0]) {
                    return false;
                }
                seen.push(block[0]);
                pos += size;
            }
            if first && seen != ProblemType::ALL {
                return false;
            }
            first = false;
        }
    }
    pos == types.len()
}

/// Recovers the schema of a problem-type ordering. Returns `None` unless the
/// sequence has 48 problems, 16 of each type.
pub fn classify(types: &[ProblemType]) -> Option<Schema> {
    use ProblemType::*;
    if types.len() != SEQUENCE_LEN
        || ProblemType::ALL
            .iter()
            .any(|t| types.iter().filter(|x| *x == t).count() != PER_TYPE)
    {
        return None;
    }
    let block_pattern = |order: [ProblemType; 3]| {
        types
            .chunks(PER_TYPE)
            .zip(order)
            .all(|(chunk, t)| chunk.iter().all(|&x| x == t))
    };
    Some(if block_pattern([AddSame, AddDiff, Mul]) {
        Schema::BlockedA
    } else if block_pattern([Mul, AddSame, AddDiff]) {
        Schema::BlockedB
    } else if is_faded(types) {
        Schema::Faded
    } else {
        Schema::Interleaved
    })
}
