//! Explanation-based default probability.
//!
//! A full explanation of a formula is a consistent hypothesis set under
//! which the formula holds in every minimal model; a partial explanation
//! leaves it true in some models and false in others. The default
//! probability is the product-distribution mass of the minimal full
//! explanations plus, for every expansion of the minimally sufficient
//! partial explanations, its mass times the fraction of its
//! (hypothesis-free) minimal models satisfying the formula.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::grounder::GroundProgram;
use crate::syntax::Formula;
use crate::worlds::{self, eval_formula, HypothesisSet, Interpretation};

/// Minimal full explanations and minimally sufficient partial explanations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExplanationBase {
    pub f_base: Vec<HypothesisSet>,
    pub p_base: Vec<HypothesisSet>,
}

/// One member of the expansion of the partial-explanation base.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub hypotheses: HypothesisSet,
    /// Product of the members' probabilities.
    pub weight: f64,
    /// Number of hypothesis-free minimal models.
    pub models: usize,
    /// How many of those satisfy the query.
    pub satisfying: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub formula: Formula,
    pub pr_full: f64,
    pub pr_partial: f64,
    pub pr: f64,
    pub explanations: ExplanationBase,
    pub expansions: Vec<Expansion>,
}

/// Query engine over one ground program. The hypothesis-free minimal-model
/// set of every hypothesis base is computed once with the brute-force
/// enumerator; the model set of a partial hypothesis set is the union over
/// the bases extending it.
#[derive(Debug, Clone)]
pub struct Explainer<'a> {
    gp: &'a GroundProgram,
    bases: Vec<HypothesisSet>,
    base_models: Vec<BTreeSet<Interpretation>>,
    candidates: Vec<HypothesisSet>,
}

impl<'a> Explainer<'a> {
    pub fn new(gp: &'a GroundProgram) -> Result<Self> {
        let bases = worlds::hypothesis_bases(gp);
        let base_models = bases
            .iter()
            .map(|b| Ok(worlds::regular_model_set(gp, b)?.into_iter().collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Explainer {
            gp,
            bases,
            base_models,
            candidates: consistent_subsets(gp),
        })
    }

    pub fn program(&self) -> &GroundProgram {
        self.gp
    }

    fn extending<'s>(&'s self, h: &'s HypothesisSet) -> impl Iterator<Item = &'s BTreeSet<Interpretation>> + 's {
        self.bases
            .iter()
            .zip(&self.base_models)
            .filter(move |(b, _)| h.is_subset(b))
            .map(|(_, m)| m)
    }

    fn check_set(&self, h: &HypothesisSet) -> Result<()> {
        h.choices(self.gp).map(|_| ())
    }

    fn check_query(&self, f: &Formula) -> Result<()> {
        if f.atoms().iter().any(|a| self.gp.is_hypothesis(a)) {
            return Err(Error::HypothesisInQuery(f.to_string()));
        }
        Ok(())
    }

    /// Hypothesis-free minimal models under a consistent set.
    pub fn regular_models(&self, h: &HypothesisSet) -> Result<BTreeSet<Interpretation>> {
        self.check_set(h)?;
        Ok(self.extending(h).flatten().cloned().collect())
    }

    pub fn is_f_explanation(&self, h: &HypothesisSet, f: &Formula) -> Result<bool> {
        self.check_set(h)?;
        self.check_query(f)?;
        Ok(self.extending(h).flatten().all(|w| eval_formula(f, w)))
    }

    /// Minimal full explanations, smallest first.
    pub fn f_explanations(&self, f: &Formula) -> Result<Vec<HypothesisSet>> {
        self.check_query(f)?;
        let mut found: Vec<HypothesisSet> = Vec::new();
        for h in &self.candidates {
            if found.iter().any(|e| e.is_subset(h)) {
                continue;
            }
            if self.is_f_explanation(h, f)? {
                found.push(h.clone());
            }
        }
        Ok(found)
    }

    /// `h` is a partial explanation (not inside any full explanation, and
    /// the query is true in some and false in some minimal model) and every
    /// consistent superset yields the same hypothesis-free models.
    ///
    /// Supersets are checked at the hypothesis bases only: the model set of
    /// any intermediate superset is the union over the bases extending it.
    pub fn is_sufficient_p_explanation(&self, h: &HypothesisSet, f: &Formula) -> Result<bool> {
        self.check_set(h)?;
        self.check_query(f)?;
        let sets: Vec<&BTreeSet<Interpretation>> = self.extending(h).collect();
        let Some(first) = sets.first() else {
            return Ok(false);
        };
        let sufficient = sets.iter().all(|s| s == first);
        let not_inside_full = sets.iter().all(|s| s.iter().any(|w| !eval_formula(f, w)));
        let union = sets.iter().copied().flatten();
        let some_true = union.clone().any(|w| eval_formula(f, w));
        let some_false = union.clone().any(|w| !eval_formula(f, w));
        Ok(sufficient && not_inside_full && some_true && some_false)
    }

    /// Minimally sufficient partial explanations, smallest first.
    pub fn p_explanations(&self, f: &Formula) -> Result<Vec<HypothesisSet>> {
        self.check_query(f)?;
        let mut found: Vec<HypothesisSet> = Vec::new();
        for h in &self.candidates {
            if found.iter().any(|e| e.is_subset(h)) {
                continue;
            }
            if self.is_sufficient_p_explanation(h, f)? {
                found.push(h.clone());
            }
        }
        Ok(found)
    }

    fn pr_full_of(&self, f_base: &[HypothesisSet]) -> Result<f64> {
        let explained = Formula::disjunction(
            f_base
                .iter()
                .map(|h| Formula::conjunction(h.iter().cloned().map(Formula::Atom))),
        );
        worlds::pr_star(&explained, self.gp)
    }

    pub fn pr_full(&self, f: &Formula) -> Result<f64> {
        self.pr_full_of(&self.f_explanations(f)?)
    }

    fn expansions_of(&self, f: &Formula, p_base: &[HypothesisSet]) -> Result<Vec<Expansion>> {
        worlds::expd(p_base, self.gp)
            .into_iter()
            .map(|h| {
                let models = self.regular_models(&h)?;
                if models.is_empty() {
                    return Err(Error::NoModels(h.to_string()));
                }
                Ok(Expansion {
                    weight: worlds::pr_hypothesis_set(&h, self.gp),
                    models: models.len(),
                    satisfying: models.iter().filter(|w| eval_formula(f, w)).count(),
                    hypotheses: h,
                })
            })
            .collect()
    }

    pub fn pr_partial(&self, f: &Formula) -> Result<f64> {
        let expansions = self.expansions_of(f, &self.p_explanations(f)?)?;
        Ok(partial_mass(&expansions))
    }

    pub fn default_probability(&self, f: &Formula) -> Result<QueryResult> {
        let f_base = self.f_explanations(f)?;
        let p_base = self.p_explanations(f)?;
        let pr_full = self.pr_full_of(&f_base)?;
        let expansions = self.expansions_of(f, &p_base)?;
        let pr_partial = partial_mass(&expansions);
        Ok(QueryResult {
            formula: f.clone(),
            pr_full,
            pr_partial,
            pr: pr_full + pr_partial,
            explanations: ExplanationBase { f_base, p_base },
            expansions,
        })
    }
}

fn partial_mass(expansions: &[Expansion]) -> f64 {
    expansions
        .iter()
        .map(|e| e.weight * e.satisfying as f64 / e.models as f64)
        .sum()
}

/// Every consistent set of hypotheses, ordered by size and then
/// lexicographically.
pub fn consistent_subsets(gp: &GroundProgram) -> Vec<HypothesisSet> {
    let mut out = vec![HypothesisSet::new()];
    for s in &gp.statements {
        let mut next = Vec::with_capacity(out.len() * (s.entries.len() + 1));
        for h in &out {
            next.push(h.clone());
            for hyp in s.hypotheses() {
                let mut h = h.clone();
                h.insert(hyp.clone());
                next.push(h);
            }
        }
        out = next;
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

pub fn is_f_explanation(h: &HypothesisSet, f: &Formula, gp: &GroundProgram) -> Result<bool> {
    Explainer::new(gp)?.is_f_explanation(h, f)
}

pub fn f_explanations(f: &Formula, gp: &GroundProgram) -> Result<Vec<HypothesisSet>> {
    Explainer::new(gp)?.f_explanations(f)
}

pub fn pr_full(f: &Formula, gp: &GroundProgram) -> Result<f64> {
    Explainer::new(gp)?.pr_full(f)
}

pub fn is_sufficient_p_explanation(h: &HypothesisSet, f: &Formula, gp: &GroundProgram) -> Result<bool> {
    Explainer::new(gp)?.is_sufficient_p_explanation(h, f)
}

pub fn p_explanations(f: &Formula, gp: &GroundProgram) -> Result<Vec<HypothesisSet>> {
    Explainer::new(gp)?.p_explanations(f)
}

pub fn pr_partial(f: &Formula, gp: &GroundProgram) -> Result<f64> {
    Explainer::new(gp)?.pr_partial(f)
}

/// `pr_full + pr_partial`, with the explanation bases and expansion detail.
pub fn default_probability(f: &Formula, gp: &GroundProgram) -> Result<QueryResult> {
    Explainer::new(gp)?.default_probability(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::ground_program;
    use crate::syntax::{parse_formula, parse_program, GroundAtom};

    const UNIVERSITY_PLAIN: &str = "
        fac(X) ; staff(X) :- work(X, uwm).
        doc(X) ; fac(X) ; staff(X) :- work(X, mcw).
        work(X, uwm) :- dad(X, bob).
        work(X, mcw) :- dad(X, helen).
        dad(alex, helen) ; dad(alex, bob).
    ";

    const UNIVERSITY: &str = "
        fac(X) ; staff(X) :- work(X, uwm).
        doc(X) ; fac(X) :- work(X, mcw), hasDoc.
        staff(X) :- work(X, mcw), noDoc.
        work(X, uwm) :- dad(X, bob).
        work(X, mcw) :- dad(X, helen).
        dad(alex, helen) ; dad(alex, bob) :- haveRel.
        disjoint(hasDoc: .2, noDoc: .8).
        disjoint(haveRel: .7, noRel: .3).
    ";

    const TWO_SOURCES: &str = "
        a ; b :- h1.
        a ; c :- h2.
        disjoint(h1: .5, h1p: .5).
        disjoint(h2: .5, h2p: .5).
    ";

    const PARTIAL: &str = "
        d ; e :- h3.
        d ; e :- h4.
        disjoint(h3: .5, h3p: .5).
        disjoint(h4: .4, h4p: .6).
    ";

    fn gp(text: &str) -> GroundProgram {
        ground_program(&parse_program(text).unwrap()).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn hs(items: &[&str]) -> HypothesisSet {
        items.iter().map(|s| GroundAtom::prop(*s)).collect()
    }

    fn set(items: &[&[&str]]) -> BTreeSet<HypothesisSet> {
        items.iter().map(|h| hs(h)).collect()
    }

    fn as_set(v: Vec<HypothesisSet>) -> BTreeSet<HypothesisSet> {
        v.into_iter().collect()
    }

    #[test]
    fn full_explanation_checks() {
        let uni = gp(UNIVERSITY);
        let q = f("fac(alex) | staff(alex) | doc(alex)");
        assert!(is_f_explanation(&hs(&["haveRel"]), &q, &uni).unwrap());
        assert!(!is_f_explanation(&HypothesisSet::new(), &q, &uni).unwrap());
        let sources = gp(TWO_SOURCES);
        assert!(!is_f_explanation(&hs(&["h1"]), &f("a"), &sources).unwrap());
        assert!(is_f_explanation(&HypothesisSet::new(), &Formula::True, &sources).unwrap());
    }

    #[test]
    fn full_explanation_bases() {
        let uni = gp(UNIVERSITY);
        let q = f("fac(alex) | staff(alex) | doc(alex)");
        assert_eq!(f_explanations(&q, &uni).unwrap(), vec![hs(&["haveRel"])]);
        assert!(f_explanations(&f("d"), &gp(PARTIAL)).unwrap().is_empty());
        assert_eq!(f_explanations(&Formula::True, &uni).unwrap(), vec![HypothesisSet::new()]);
    }

    #[test]
    fn full_mass() {
        let uni = gp(UNIVERSITY);
        let q = f("fac(alex) | staff(alex) | doc(alex)");
        assert!((pr_full(&q, &uni).unwrap() - 0.7).abs() < 1e-9);
        assert_eq!(pr_full(&f("d"), &gp(PARTIAL)).unwrap(), 0.0);
        assert!((pr_full(&Formula::True, &uni).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sufficiency() {
        let partial = gp(PARTIAL);
        assert!(is_sufficient_p_explanation(&hs(&["h3"]), &f("d"), &partial).unwrap());
        let sources = gp(TWO_SOURCES);
        assert!(!is_sufficient_p_explanation(&hs(&["h1"]), &f("a"), &sources).unwrap());
        assert!(is_sufficient_p_explanation(&hs(&["h1", "h2"]), &f("a"), &sources).unwrap());
    }

    #[test]
    fn partial_explanation_bases() {
        let sources = gp(TWO_SOURCES);
        let es = p_explanations(&f("a"), &sources).unwrap();
        assert_eq!(as_set(es.clone()), set(&[&["h1", "h2"], &["h1", "h2p"], &["h1p", "h2"]]));
        // the expansion of this base is the base itself
        assert_eq!(as_set(worlds::expd(&es, &sources)), as_set(es));
        let partial = gp(PARTIAL);
        let es = p_explanations(&f("d"), &partial).unwrap();
        assert_eq!(es, vec![hs(&["h3"]), hs(&["h4"])]);
        assert_eq!(
            as_set(worlds::expd(&es, &partial)),
            set(&[&["h3", "h4p"], &["h3", "h4"], &["h3p", "h4"]])
        );
        assert!(p_explanations(&Formula::True, &partial).unwrap().is_empty());
    }

    #[test]
    fn partial_mass() {
        assert!((pr_partial(&f("d"), &gp(PARTIAL)).unwrap() - 0.35).abs() < 1e-9);
        assert!((pr_partial(&f("a"), &gp(TWO_SOURCES)).unwrap() - 0.375).abs() < 1e-9);
        assert_eq!(pr_partial(&Formula::True, &gp(TWO_SOURCES)).unwrap(), 0.0);
    }

    #[test]
    fn partial_expansion_rows() {
        let r = default_probability(&f("d"), &gp(PARTIAL)).unwrap();
        assert_eq!(r.expansions.len(), 3);
        for e in &r.expansions {
            assert_eq!((e.models, e.satisfying), (2, 1));
        }
        let weights: Vec<f64> = r.expansions.iter().map(|e| e.weight).collect();
        let expected = [0.5 * 0.4, 0.5 * 0.6, 0.5 * 0.4];
        let mut got = weights.clone();
        got.sort_by(f64::total_cmp);
        let mut exp = expected.to_vec();
        exp.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&exp) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((r.pr - 0.35).abs() < 1e-9);
    }

    #[test]
    fn default_probability_values() {
        let r = default_probability(&f("doc(alex)"), &gp(UNIVERSITY_PLAIN)).unwrap();
        assert!((r.pr - 0.2).abs() < 1e-9);
        let r = default_probability(&f("lawyer"), &gp("lawyer ; doctor. lawyer ; professor.")).unwrap();
        assert!((r.pr - 0.5).abs() < 1e-9);
        let r = default_probability(&f("dad(alex,bob)"), &gp(UNIVERSITY)).unwrap();
        assert!((r.pr - (0.14 * 2.0 / 4.0 + 0.56 * 2.0 / 3.0)).abs() < 1e-9);
        assert_eq!(r.pr, r.pr_full + r.pr_partial);
    }

    #[test]
    fn hypotheses_are_not_allowed_in_queries() {
        let g = gp(UNIVERSITY);
        assert!(matches!(
            default_probability(&f("hasDoc & doc(alex)"), &g),
            Err(Error::HypothesisInQuery(_))
        ));
    }

    #[test]
    fn candidate_order_is_size_then_lexicographic() {
        let c = consistent_subsets(&gp(UNIVERSITY));
        assert_eq!(c.len(), 9);
        assert_eq!(c[0], HypothesisSet::new());
        assert_eq!(c[1], hs(&["hasDoc"]));
        assert_eq!(c[5], hs(&["hasDoc", "haveRel"]));
        assert!(c.windows(2).all(|w| w[0].len() <= w[1].len()));
    }
}
