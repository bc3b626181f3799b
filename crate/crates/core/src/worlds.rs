//! Possible-world semantics: interpretations, hypothesis-set algebra,
//! brute-force minimal-model enumeration and the product distribution over
//! hypotheses.
//!
//! `minimal_models` is the reference oracle the other query methods are
//! checked against. It enumerates every completion of the given hypothesis
//! set to one hypothesis per statement, crosses each completion with every
//! subset of the candidate regular atoms, keeps the models and finally drops
//! every model that has a proper submodel in the collection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::grounder::GroundProgram;
use crate::syntax::{Formula, GroundAtom};

fn write_set<'a>(f: &mut fmt::Formatter<'_>, atoms: impl Iterator<Item = &'a GroundAtom>) -> fmt::Result {
    f.write_str("{")?;
    for (i, a) in atoms.enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str("}")
}

macro_rules! atom_set {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(BTreeSet<GroundAtom>);

        impl $name {
            pub fn new() -> Self {
                Self::default()
            }

            pub fn contains(&self, atom: &GroundAtom) -> bool {
                self.0.contains(atom)
            }

            pub fn insert(&mut self, atom: GroundAtom) -> bool {
                self.0.insert(atom)
            }

            pub fn iter(&self) -> std::collections::btree_set::Iter<'_, GroundAtom> {
                self.0.iter()
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn is_subset(&self, other: &Self) -> bool {
                self.0.is_subset(&other.0)
            }

            pub fn as_set(&self) -> &BTreeSet<GroundAtom> {
                &self.0
            }

            pub fn into_set(self) -> BTreeSet<GroundAtom> {
                self.0
            }
        }

        impl FromIterator<GroundAtom> for $name {
            fn from_iter<I: IntoIterator<Item = GroundAtom>>(iter: I) -> Self {
                $name(iter.into_iter().collect())
            }
        }

        impl From<BTreeSet<GroundAtom>> for $name {
            fn from(s: BTreeSet<GroundAtom>) -> Self {
                $name(s)
            }
        }

        impl<'a> IntoIterator for &'a $name {
            type Item = &'a GroundAtom;
            type IntoIter = std::collections::btree_set::Iter<'a, GroundAtom>;
            fn into_iter(self) -> Self::IntoIter {
                self.0.iter()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write_set(f, self.0.iter())
            }
        }
    };
}

atom_set!(
    /// A finite Herbrand interpretation: the set of true ground atoms.
    Interpretation
);

atom_set!(
    /// A set of ground hypotheses.
    HypothesisSet
);

impl Interpretation {
    /// The interpretation with every hypothesis removed.
    pub fn regular_part(&self, gp: &GroundProgram) -> Interpretation {
        self.iter().filter(|a| !gp.is_hypothesis(a)).cloned().collect()
    }

    pub fn hypothesis_part(&self, gp: &GroundProgram) -> HypothesisSet {
        self.iter().filter(|a| gp.is_hypothesis(a)).cloned().collect()
    }
}

impl HypothesisSet {
    /// Map statement id to the chosen entry. Fails on a non-hypothesis atom
    /// or on two hypotheses from one statement.
    pub fn choices(&self, gp: &GroundProgram) -> Result<BTreeMap<usize, usize>> {
        let mut out = BTreeMap::new();
        for h in self {
            let (s, e) = gp.locate(h).ok_or_else(|| Error::NotAHypothesis(h.clone()))?;
            if out.insert(s, e).is_some() {
                return Err(Error::Inconsistent(self.to_string()));
            }
        }
        Ok(out)
    }

    /// Statement ids this set mentions.
    pub fn statements(&self, gp: &GroundProgram) -> BTreeSet<usize> {
        self.iter().filter_map(|h| gp.locate(h)).map(|(s, _)| s).collect()
    }
}

/// Classical truth of a ground formula in an interpretation.
pub fn eval_formula(f: &Formula, w: &Interpretation) -> bool {
    f.eval_with(&|a| w.contains(a))
}

/// At most one hypothesis per statement, and only declared hypotheses.
pub fn is_consistent(h: &HypothesisSet, gp: &GroundProgram) -> bool {
    h.choices(gp).is_ok()
}

/// Cartesian product of the given statements' entries, last statement
/// varying fastest.
fn product_over(gp: &GroundProgram, options: &[Vec<usize>], statements: &[usize]) -> Vec<HypothesisSet> {
    let mut out = vec![HypothesisSet::new()];
    for (&s, opts) in statements.iter().zip(options) {
        out = out
            .into_iter()
            .flat_map(|h| {
                opts.iter().map(move |&e| {
                    let mut h = h.clone();
                    h.insert(gp.statements[s].entries[e].0.clone());
                    h
                })
            })
            .collect();
    }
    out
}

fn all_entries(gp: &GroundProgram, s: usize) -> Vec<usize> {
    (0..gp.statements[s].entries.len()).collect()
}

/// Every hypothesis base: one hypothesis per statement, in statement order.
pub fn hypothesis_bases(gp: &GroundProgram) -> Vec<HypothesisSet> {
    let statements: Vec<usize> = (0..gp.statements.len()).collect();
    let options: Vec<Vec<usize>> = statements.iter().map(|&s| all_entries(gp, s)).collect();
    product_over(gp, &options, &statements)
}

/// Every hypothesis base containing `h`.
pub fn bases_extending(h: &HypothesisSet, gp: &GroundProgram) -> Result<Vec<HypothesisSet>> {
    let chosen = h.choices(gp)?;
    let statements: Vec<usize> = (0..gp.statements.len()).collect();
    let options: Vec<Vec<usize>> = statements
        .iter()
        .map(|s| match chosen.get(s) {
            Some(&e) => vec![e],
            None => all_entries(gp, *s),
        })
        .collect();
    Ok(product_over(gp, &options, &statements))
}

/// All sets obtained by replacing each member of `h` by any hypothesis of
/// its own statement.
pub fn compl(h: &HypothesisSet, gp: &GroundProgram) -> Result<Vec<HypothesisSet>> {
    let statements: Vec<usize> = h.choices(gp)?.into_keys().collect();
    let options: Vec<Vec<usize>> = statements.iter().map(|&s| all_entries(gp, s)).collect();
    Ok(product_over(gp, &options, &statements))
}

/// The expansion of a family: the completion over every statement the family
/// touches, restricted to the sets that contain some member of the family.
///
/// A maximal consistent subset of the family's union touches exactly the
/// statements the union touches, so the completion over those statements is
/// the completion of any such subset.
pub fn expd(hs: &[HypothesisSet], gp: &GroundProgram) -> Vec<HypothesisSet> {
    if hs.is_empty() {
        return Vec::new();
    }
    let statements: Vec<usize> = hs
        .iter()
        .flat_map(|h| h.statements(gp))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let options: Vec<Vec<usize>> = statements.iter().map(|&s| all_entries(gp, s)).collect();
    product_over(gp, &options, &statements)
        .into_iter()
        .filter(|c| hs.iter().any(|h| h.is_subset(c)))
        .collect()
}

/// Whether `w` satisfies every ground clause and integrity constraint.
pub fn is_model(gp: &GroundProgram, w: &Interpretation) -> bool {
    gp.clauses
        .iter()
        .all(|c| !c.body.iter().all(|a| w.contains(a)) || c.head.iter().any(|a| w.contains(a)))
        && gp.ic.satisfied_by(&|a| w.contains(a))
}

/// Minimal regular parts of models of the program with the hypotheses of
/// `base` true and every other hypothesis false.
fn regular_minimal_models(gp: &GroundProgram, base: &HypothesisSet) -> Result<Vec<Interpretation>> {
    let body_possible = |body: &[GroundAtom], upper: &BTreeSet<&GroundAtom>| {
        body.iter().all(|a| {
            if gp.is_hypothesis(a) {
                base.contains(a)
            } else {
                upper.contains(a)
            }
        })
    };

    // Every atom of a minimal model is derivable when each disjunctive head
    // is read as all of its disjuncts.
    let mut upper: BTreeSet<&GroundAtom> = BTreeSet::new();
    loop {
        let mut changed = false;
        for c in &gp.clauses {
            if body_possible(&c.body, &upper) {
                for a in &c.head {
                    changed |= upper.insert(a);
                }
            }
        }
        if !changed {
            break;
        }
    }

    let limit = gp.atom_limit().min(63);
    if upper.len() > limit {
        return Err(Error::AtomLimit {
            atoms: upper.len(),
            limit,
        });
    }

    let atoms: Vec<&GroundAtom> = upper.iter().copied().collect();
    let bit = |a: &GroundAtom| -> u64 {
        atoms
            .binary_search(&a)
            .map(|i| 1u64 << i)
            .expect("candidate atom")
    };
    let rules: Vec<(u64, u64)> = gp
        .clauses
        .iter()
        .filter(|c| body_possible(&c.body, &upper))
        .map(|c| {
            let body = c
                .body
                .iter()
                .filter(|a| !gp.is_hypothesis(a))
                .fold(0, |m, a| m | bit(a));
            let head = c.head.iter().fold(0, |m, a| m | bit(a));
            (body, head)
        })
        .collect();

    let models: Vec<u64> = (0..1u64 << atoms.len())
        .filter(|&m| rules.iter().all(|&(body, head)| m & body != body || m & head != 0))
        .collect();
    let minimal = models
        .iter()
        .copied()
        .filter(|&m| !models.iter().any(|&sub| sub != m && sub & m == sub));

    Ok(minimal
        .map(|m| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| m & (1 << i) != 0)
                .map(|(_, a)| (*a).clone())
                .collect()
        })
        .collect())
}

/// Minimal Herbrand models of the ground clauses together with `h` and the
/// integrity constraints. Models include their hypotheses and are returned
/// sorted.
pub fn minimal_models(gp: &GroundProgram, h: &HypothesisSet) -> Result<Vec<Interpretation>> {
    let mut candidates: Vec<Interpretation> = Vec::new();
    for completion in bases_extending(h, gp)? {
        for regular in regular_minimal_models(gp, &completion)? {
            let mut w = regular;
            for hyp in &completion {
                w.insert(hyp.clone());
            }
            candidates.push(w);
        }
    }
    let mut out: Vec<Interpretation> = candidates
        .iter()
        .filter(|w| !candidates.iter().any(|v| v != *w && v.is_subset(w)))
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// `minimal_models` with hypotheses stripped, as a sorted duplicate-free list.
pub fn regular_model_set(gp: &GroundProgram, h: &HypothesisSet) -> Result<Vec<Interpretation>> {
    let set: BTreeSet<Interpretation> = minimal_models(gp, h)?
        .iter()
        .map(|w| w.regular_part(gp))
        .collect();
    Ok(set.into_iter().collect())
}

/// Probability of a formula over hypotheses only, under independence of the
/// statements: the total weight of the joint choices (over the statements
/// the formula mentions) that satisfy it.
pub fn pr_star(f: &Formula, gp: &GroundProgram) -> Result<f64> {
    let mut statements = BTreeSet::new();
    for a in f.atoms() {
        let (s, _) = gp.locate(a).ok_or_else(|| Error::NotAHypothesis(a.clone()))?;
        statements.insert(s);
    }
    let statements: Vec<usize> = statements.into_iter().collect();
    let options: Vec<Vec<usize>> = statements.iter().map(|&s| all_entries(gp, s)).collect();
    let mut total = 0.0;
    for choice in product_over(gp, &options, &statements) {
        if f.eval_with(&|a| choice.contains(a)) {
            total += pr_hypothesis_set(&choice, gp);
        }
    }
    Ok(total)
}

/// Product of the members' probabilities; 1 for the empty set and 0 for an
/// inconsistent set.
pub fn pr_hypothesis_set(h: &HypothesisSet, gp: &GroundProgram) -> f64 {
    if !is_consistent(h, gp) {
        return 0.0;
    }
    h.iter()
        .map(|a| gp.probability_of(a).expect("consistent sets hold only hypotheses"))
        .product()
}

/// Reference value of the default probability: every basic subspace weighs
/// its base's probability, spread evenly over its minimal models.
pub fn brute_force_probability(f: &Formula, gp: &GroundProgram) -> Result<f64> {
    let mut total = 0.0;
    for base in hypothesis_bases(gp) {
        let models = minimal_models(gp, &base)?;
        if models.is_empty() {
            continue;
        }
        let satisfying = models.iter().filter(|w| eval_formula(f, w)).count();
        total += pr_hypothesis_set(&base, gp) * satisfying as f64 / models.len() as f64;
    }
    Ok(total)
}
