//! Routing of a query to one of the three probability methods.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::explain::Explainer;
use crate::forest::{build_forest, forest_query};
use crate::grounder::GroundProgram;
use crate::syntax::Formula;
use crate::worlds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Full plus partial explanations.
    #[default]
    Explanation,
    /// Branch counting on a complete hypothetical model forest.
    Forest,
    /// Enumeration of every basic subspace.
    BruteForce,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Explanation, Method::Forest, Method::BruteForce];

    pub fn name(self) -> &'static str {
        match self {
            Method::Explanation => "expl",
            Method::Forest => "forest",
            Method::BruteForce => "brute",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "expl" => Ok(Method::Explanation),
            "forest" => Ok(Method::Forest),
            "brute" => Ok(Method::BruteForce),
            other => Err(format!("unknown method `{other}` (expected expl, forest or brute)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaKind {
    /// Only regular atoms (or no atoms at all).
    Regular,
    /// Only hypotheses.
    Hypotheses,
    Mixed,
}

pub fn classify(f: &Formula, gp: &GroundProgram) -> FormulaKind {
    let atoms = f.atoms();
    let hyps = atoms.iter().filter(|a| gp.is_hypothesis(a)).count();
    match hyps {
        0 => FormulaKind::Regular,
        n if n == atoms.len() => FormulaKind::Hypotheses,
        _ => FormulaKind::Mixed,
    }
}

/// Probability of `f` by the chosen method. Hypothesis-only formulas go to
/// the product distribution whatever the method; mixed formulas are
/// rejected.
pub fn probability(f: &Formula, gp: &GroundProgram, method: Method) -> Result<f64> {
    match classify(f, gp) {
        FormulaKind::Mixed => Err(Error::MixedFormula(f.to_string())),
        FormulaKind::Hypotheses => worlds::pr_star(f, gp),
        FormulaKind::Regular => match method {
            Method::Explanation => Ok(Explainer::new(gp)?.default_probability(f)?.pr),
            Method::Forest => Ok(forest_query(&build_forest(gp), f, gp)),
            Method::BruteForce => worlds::brute_force_probability(f, gp),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::ground_program;
    use crate::syntax::{parse_formula, parse_program};

    fn gp() -> GroundProgram {
        ground_program(&parse_program("d ; e :- h3. d ; e :- h4. disjoint(h3: .5, h3p: .5). disjoint(h4: .4, h4p: .6).").unwrap())
            .unwrap()
    }

    #[test]
    fn routes() {
        let g = gp();
        let f = |s: &str| parse_formula(s).unwrap();
        assert_eq!(classify(&f("d | e"), &g), FormulaKind::Regular);
        assert_eq!(classify(&f("h3 & not h4"), &g), FormulaKind::Hypotheses);
        assert_eq!(classify(&f("d & h3"), &g), FormulaKind::Mixed);
        assert_eq!(classify(&Formula::True, &g), FormulaKind::Regular);
        for m in Method::ALL {
            assert!((probability(&f("d"), &g, m).unwrap() - 0.35).abs() < 1e-9);
            assert!((probability(&f("h4"), &g, m).unwrap() - 0.4).abs() < 1e-9);
            assert!(matches!(probability(&f("d & h3"), &g, m), Err(Error::MixedFormula(_))));
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("fast".parse::<Method>().is_err());
    }
}
