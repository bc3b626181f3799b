//! Probabilistic disjunctive logic programs.
//!
//! Programs mix disjunctive clauses with `disjoint` declarations that give a
//! distribution over hypotheses. The default probability of a ground formula
//! weighs every hypothesis base by its probability and spreads that weight
//! evenly over the minimal models it generates. Three independent routes
//! compute it: explanations ([`explain`]), a hypothetical model forest
//! ([`forest`]) and brute-force enumeration ([`worlds`]).

pub mod error;
pub mod explain;
pub mod forest;
pub mod grounder;
pub mod query;
pub mod syntax;
pub mod worlds;

pub use error::{Error, Result};
pub use explain::{default_probability, Explainer, QueryResult};
pub use forest::{build_forest, forest_query, HypotheticalModelForest, ModelTree};
pub use grounder::{ground_program, GroundProgram};
pub use query::{probability, Method};
pub use syntax::{parse_formula, parse_program, validate, Formula, GroundAtom, Program};
pub use worlds::{HypothesisSet, Interpretation};
