use thiserror::Error;

use crate::syntax::GroundAtom;

/// Failures of the semantic layers (grounding, model enumeration, queries).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("program has variables but no constants to ground them with")]
    EmptyUniverse,
    #[error("hypothesis `{hypothesis}` occurs in the head of ground clause `{clause}`")]
    HypothesisInHead { clause: String, hypothesis: GroundAtom },
    #[error("hypothesis `{0}` belongs to more than one ground disjoint statement")]
    OverlappingStatements(GroundAtom),
    #[error("hypothesis set {0} is inconsistent")]
    Inconsistent(String),
    #[error("`{0}` is not a declared hypothesis")]
    NotAHypothesis(GroundAtom),
    #[error("{atoms} candidate atoms exceed the enumeration limit of {limit}")]
    AtomLimit { atoms: usize, limit: usize },
    #[error("formula `{0}` mixes hypotheses and regular atoms")]
    MixedFormula(String),
    #[error("formula `{0}` mentions hypotheses; only regular atoms are allowed here")]
    HypothesisInQuery(String),
    #[error("no minimal models under {0}")]
    NoModels(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
