//! Model trees and hypothetical model forests.
//!
//! A forest is a list of `(tree, hypotheses)` pairs with pairwise
//! inconsistent hypothesis sets. It is complete when every hypothesis base
//! extends exactly one pair's set and that pair's tree holds the base's
//! hypothesis-free minimal models. Once built, any formula over regular
//! atoms is answered by counting branches.
//!
//! Construction runs every ground clause against every pair until nothing
//! changes. A clause acts on a pair only if some branch contains its regular
//! body and none of its head atoms:
//!
//! 1. a body hypothesis contradicting the pair's set: the clause is skipped;
//! 2. a body hypothesis from a statement the pair has not decided: the pair
//!    is split into one pair per hypothesis of that statement and the clause
//!    is retried on each;
//! 3. otherwise each such branch is replaced by one extension per head atom.
//!
//! Afterwards each tree is cut down to the minimal genuine models among its
//! branches, and the pairs are regrouped into a canonical partition with
//! the fewest pairs, so the result does not depend on clause order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::grounder::{GroundClause, GroundProgram};
use crate::syntax::{Formula, GroundAtom};
use crate::worlds::{self, eval_formula, HypothesisSet, Interpretation};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    /// `None` is the empty label.
    label: Option<GroundAtom>,
    parent: Option<usize>,
    children: Vec<usize>,
}

/// A tree whose root-to-leaf paths spell out a finite set of models.
///
/// The root and end-of-branch markers carry the empty label. A tree with
/// only the root represents the single empty model; a `void` tree represents
/// no model at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelTree {
    nodes: Vec<Node>,
    void: bool,
}

impl Default for ModelTree {
    fn default() -> Self {
        Self::empty()
    }
}

impl ModelTree {
    /// Root only: the set `{∅}`.
    pub fn empty() -> Self {
        ModelTree {
            nodes: vec![Node {
                label: None,
                parent: None,
                children: Vec::new(),
            }],
            void: false,
        }
    }

    /// The tree representing no model.
    pub fn void() -> Self {
        ModelTree {
            void: true,
            ..Self::empty()
        }
    }

    pub fn is_void(&self) -> bool {
        self.void
    }

    /// Root only, and not void.
    pub fn is_empty_tree(&self) -> bool {
        !self.void && self.nodes.len() == 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn add_child(&mut self, parent: usize, label: Option<GroundAtom>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            label,
            parent: Some(parent),
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        id
    }

    fn leaves(&self) -> Vec<usize> {
        if self.void {
            return Vec::new();
        }
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].children.is_empty())
            .collect()
    }

    fn path(&self, leaf: usize) -> BTreeSet<&GroundAtom> {
        let mut out = BTreeSet::new();
        let mut at = Some(leaf);
        while let Some(i) = at {
            if let Some(a) = &self.nodes[i].label {
                out.insert(a);
            }
            at = self.nodes[i].parent;
        }
        out
    }

    /// Trie over the lexicographically sorted atoms of each model.
    pub fn from_models<'a>(models: impl IntoIterator<Item = &'a Interpretation>) -> Self {
        let models: BTreeSet<&Interpretation> = models.into_iter().collect();
        if models.is_empty() {
            return Self::void();
        }
        let mut tree = Self::empty();
        let mut ends: BTreeSet<usize> = BTreeSet::new();
        for m in models {
            let mut at = 0;
            for a in m {
                let existing = tree.nodes[at]
                    .children
                    .iter()
                    .copied()
                    .find(|&c| tree.nodes[c].label.as_ref() == Some(a));
                at = match existing {
                    Some(c) => c,
                    None => tree.add_child(at, Some(a.clone())),
                };
            }
            ends.insert(at);
        }
        // a model that is a prefix of another ends in an explicit empty leaf
        for end in ends {
            if !tree.nodes[end].children.is_empty() {
                tree.add_child(end, None);
            }
        }
        tree
    }

    /// The represented models, sorted.
    pub fn branches(&self) -> Vec<Interpretation> {
        let set: BTreeSet<Interpretation> = self
            .leaves()
            .into_iter()
            .map(|l| self.path(l).into_iter().cloned().collect())
            .collect();
        set.into_iter().collect()
    }

    pub fn branch_count(&self) -> usize {
        self.leaves().len()
    }

    /// No atom repeats along any root-to-leaf path.
    pub fn is_well_formed(&self) -> bool {
        self.leaves().into_iter().all(|leaf| {
            let mut seen = BTreeSet::new();
            let mut at = Some(leaf);
            while let Some(i) = at {
                if let Some(a) = &self.nodes[i].label {
                    if !seen.insert(a) {
                        return false;
                    }
                }
                at = self.nodes[i].parent;
            }
            true
        })
    }

    /// Indented rendering of the tree shape; `ε` marks empty labels.
    pub fn render(&self) -> String {
        if self.void {
            return "(no models)\n".to_owned();
        }
        let mut out = String::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, depth)) = stack.pop() {
            let label = self.nodes[i]
                .label
                .as_ref()
                .map_or_else(|| "ε".to_owned(), ToString::to_string);
            out.push_str(&format!("{}{}\n", "  ".repeat(depth), label));
            for &c in self.nodes[i].children.iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        out
    }
}

pub fn tree_from_models<'a>(models: impl IntoIterator<Item = &'a Interpretation>) -> ModelTree {
    ModelTree::from_models(models)
}

pub fn branches(tree: &ModelTree) -> Vec<Interpretation> {
    tree.branches()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestPair {
    pub tree: ModelTree,
    pub hypotheses: HypothesisSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypotheticalModelForest {
    pub pairs: Vec<ForestPair>,
}

impl HypotheticalModelForest {
    /// `(branch set, hypothesis set)` for every pair, independent of tree
    /// shape.
    pub fn family(&self) -> BTreeSet<(Vec<Interpretation>, HypothesisSet)> {
        self.pairs
            .iter()
            .map(|p| (p.tree.branches(), p.hypotheses.clone()))
            .collect()
    }

    /// Pairs in the order of their hypothesis sets.
    pub fn sort(&mut self) {
        self.pairs.sort_by(|a, b| a.hypotheses.cmp(&b.hypotheses));
    }
}

/// One block per pair: `hypotheses: {...}` followed by one sorted branch per
/// line. Blocks are separated by a blank line.
impl fmt::Display for HypotheticalModelForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, pair) in self.pairs.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "hypotheses: {}", pair.hypotheses)?;
            for b in pair.tree.branches() {
                writeln!(f, "{b}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct WorkPair {
    tree: ModelTree,
    /// statement id -> entry index
    choice: BTreeMap<usize, usize>,
}

enum Step {
    Unchanged,
    Extended,
    Split(Vec<WorkPair>),
}

fn apply_clause(gp: &GroundProgram, clause: &GroundClause, pair: &mut WorkPair) -> Step {
    let mut undecided: Option<usize> = None;
    let mut regular_body = Vec::new();
    for a in &clause.body {
        match gp.locate(a) {
            Some((s, e)) => match pair.choice.get(&s) {
                Some(&chosen) if chosen != e => return Step::Unchanged,
                Some(_) => {}
                None => undecided = Some(undecided.map_or(s, |u| u.min(s))),
            },
            None => regular_body.push(a),
        }
    }

    let firing: Vec<usize> = pair
        .tree
        .leaves()
        .into_iter()
        .filter(|&leaf| {
            let path = pair.tree.path(leaf);
            regular_body.iter().all(|a| path.contains(a)) && clause.head.iter().all(|a| !path.contains(a))
        })
        .collect();
    if firing.is_empty() {
        return Step::Unchanged;
    }

    if let Some(s) = undecided {
        let children = (0..gp.statements[s].entries.len())
            .map(|e| {
                let mut child = pair.clone();
                child.choice.insert(s, e);
                child
            })
            .collect();
        return Step::Split(children);
    }

    for leaf in firing {
        for a in &clause.head {
            pair.tree.add_child(leaf, Some(a.clone()));
        }
    }
    Step::Extended
}

fn hypotheses_of(gp: &GroundProgram, choice: &BTreeMap<usize, usize>) -> HypothesisSet {
    choice
        .iter()
        .map(|(&s, &e)| gp.statements[s].entries[e].0.clone())
        .collect()
}

/// Whether `w` satisfies every clause whose body hypotheses are not ruled
/// out by `choice`.
fn is_model_under(gp: &GroundProgram, choice: &BTreeMap<usize, usize>, w: &Interpretation) -> bool {
    gp.clauses.iter().all(|c| {
        let fires = c.body.iter().all(|a| match gp.locate(a) {
            Some((s, e)) => choice.get(&s).is_none_or(|&chosen| chosen == e),
            None => w.contains(a),
        });
        !fires || c.head.iter().any(|a| w.contains(a))
    })
}

fn minimize(gp: &GroundProgram, pair: &WorkPair) -> BTreeSet<Interpretation> {
    let models: Vec<Interpretation> = pair
        .tree
        .branches()
        .into_iter()
        .filter(|w| is_model_under(gp, &pair.choice, w))
        .collect();
    models
        .iter()
        .filter(|w| !models.iter().any(|v| v != *w && v.is_subset(w)))
        .cloned()
        .collect()
}

type Assignment = BTreeMap<usize, usize>;

type Grouping = Vec<(Assignment, BTreeSet<Interpretation>)>;

/// Regroups a complete forest into the partition with the fewest pairs,
/// splitting on the lowest statement id among equally small choices.
struct Canonicalizer<'a> {
    gp: &'a GroundProgram,
    statements: Vec<usize>,
    /// every full assignment over `statements` with its model set
    table: Grouping,
    memo: HashMap<Vec<(usize, usize)>, Grouping>,
}

impl<'a> Canonicalizer<'a> {
    fn new(gp: &'a GroundProgram, pairs: &[(Assignment, BTreeSet<Interpretation>)]) -> Self {
        let statements: Vec<usize> = pairs
            .iter()
            .flat_map(|(c, _)| c.keys().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut full: Vec<Assignment> = vec![Assignment::new()];
        for &s in &statements {
            full = full
                .into_iter()
                .flat_map(|a| {
                    (0..gp.statements[s].entries.len()).map(move |e| {
                        let mut a = a.clone();
                        a.insert(s, e);
                        a
                    })
                })
                .collect();
        }
        let table = full
            .into_iter()
            .map(|a| {
                let models = pairs
                    .iter()
                    .find(|(c, _)| c.iter().all(|(s, e)| a.get(s) == Some(e)))
                    .map(|(_, m)| m.clone())
                    .expect("every assignment is covered by some pair");
                (a, models)
            })
            .collect();
        Canonicalizer {
            gp,
            statements,
            table,
            memo: HashMap::new(),
        }
    }

    fn solve(&mut self, partial: &Assignment) -> Vec<(Assignment, BTreeSet<Interpretation>)> {
        let key: Vec<(usize, usize)> = partial.iter().map(|(&s, &e)| (s, e)).collect();
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut covered = self
            .table
            .iter()
            .filter(|(a, _)| partial.iter().all(|(s, e)| a.get(s) == Some(e)))
            .map(|(_, m)| m);
        let first = covered.next().cloned().unwrap_or_default();
        let result = if covered.all(|m| *m == first) {
            vec![(partial.clone(), first)]
        } else {
            let mut best: Option<Vec<(Assignment, BTreeSet<Interpretation>)>> = None;
            let free: Vec<usize> = self
                .statements
                .iter()
                .copied()
                .filter(|s| !partial.contains_key(s))
                .collect();
            for s in free {
                let mut leaves = Vec::new();
                for e in 0..self.gp.statements[s].entries.len() {
                    let mut child = partial.clone();
                    child.insert(s, e);
                    leaves.extend(self.solve(&child));
                }
                if best.as_ref().is_none_or(|b| leaves.len() < b.len()) {
                    best = Some(leaves);
                }
            }
            best.expect("a non-constant region has a free statement")
        };
        self.memo.insert(key, result.clone());
        result
    }
}

/// Build a complete hypothetical model forest, processing ground clauses in
/// program order.
pub fn build_forest(gp: &GroundProgram) -> HypotheticalModelForest {
    let order: Vec<usize> = (0..gp.clauses.len()).collect();
    build_forest_with_order(gp, &order)
}

/// Build a forest processing the ground clauses in the given order, which
/// must be a permutation of the clause indices.
pub fn build_forest_with_order(gp: &GroundProgram, order: &[usize]) -> HypotheticalModelForest {
    assert_eq!(order.len(), gp.clauses.len(), "order must be a permutation of the clauses");
    let mut pairs = vec![WorkPair {
        tree: ModelTree::empty(),
        choice: BTreeMap::new(),
    }];
    loop {
        let mut modified = false;
        for &ci in order {
            let clause = &gp.clauses[ci];
            let mut work: Vec<WorkPair> = pairs.drain(..).rev().collect();
            let mut next = Vec::with_capacity(work.len());
            while let Some(mut pair) = work.pop() {
                match apply_clause(gp, clause, &mut pair) {
                    Step::Unchanged => next.push(pair),
                    Step::Extended => {
                        modified = true;
                        next.push(pair);
                    }
                    Step::Split(children) => {
                        modified = true;
                        work.extend(children.into_iter().rev());
                    }
                }
            }
            pairs = next;
        }
        if !modified {
            break;
        }
    }

    let minimized: Vec<(Assignment, BTreeSet<Interpretation>)> =
        pairs.iter().map(|p| (p.choice.clone(), minimize(gp, p))).collect();
    let canonical = Canonicalizer::new(gp, &minimized).solve(&Assignment::new());

    let mut forest = HypotheticalModelForest {
        pairs: canonical
            .into_iter()
            .map(|(choice, models)| ForestPair {
                tree: ModelTree::from_models(&models),
                hypotheses: hypotheses_of(gp, &choice),
            })
            .collect(),
    };
    forest.sort();
    forest
}

/// Σ over pairs of (satisfying branches / branches) × Pr*(hypotheses);
/// pairs without branches contribute nothing.
pub fn forest_query(forest: &HypotheticalModelForest, f: &Formula, gp: &GroundProgram) -> f64 {
    let mut prob = 0.0;
    for pair in &forest.pairs {
        let models = pair.tree.branches();
        let q = models.len();
        if q != 0 {
            let p = models.iter().filter(|w| eval_formula(f, w)).count();
            prob += p as f64 / q as f64 * worlds::pr_hypothesis_set(&pair.hypotheses, gp);
        }
    }
    prob
}

/// Check a forest against the brute-force enumerator: pairwise inconsistent
/// hypothesis sets, and every hypothesis base extends exactly one pair whose
/// branches are the base's hypothesis-free minimal models. Returns the
/// problems found.
pub fn audit_forest(forest: &HypotheticalModelForest, gp: &GroundProgram) -> crate::Result<Vec<String>> {
    let mut problems = Vec::new();
    for (i, a) in forest.pairs.iter().enumerate() {
        if !a.tree.is_well_formed() {
            problems.push(format!("tree of pair {} repeats an atom on a path", a.hypotheses));
        }
        for b in &forest.pairs[i + 1..] {
            let mut union = a.hypotheses.clone();
            for h in &b.hypotheses {
                union.insert(h.clone());
            }
            if worlds::is_consistent(&union, gp) {
                problems.push(format!("pairs {} and {} are consistent", a.hypotheses, b.hypotheses));
            }
        }
    }
    for base in worlds::hypothesis_bases(gp) {
        let matching: Vec<&ForestPair> = forest
            .pairs
            .iter()
            .filter(|p| p.hypotheses.is_subset(&base))
            .collect();
        if matching.len() != 1 {
            problems.push(format!("base {base} extends {} pairs", matching.len()));
            continue;
        }
        let expected = worlds::regular_model_set(gp, &base)?;
        if matching[0].tree.branches() != expected {
            problems.push(format!("base {base}: forest models differ from the minimal models"));
        }
    }
    Ok(problems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::ground_program;
    use crate::syntax::{parse_formula, parse_program};

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

    fn gp(text: &str) -> GroundProgram {
        ground_program(&parse_program(text).unwrap()).unwrap()
    }

    fn atom(s: &str) -> GroundAtom {
        match parse_formula(s).unwrap() {
            Formula::Atom(a) => a,
            f => panic!("not an atom: {f}"),
        }
    }

    fn interp(items: &[&str]) -> Interpretation {
        items.iter().map(|s| atom(s)).collect()
    }

    fn hs(items: &[&str]) -> HypothesisSet {
        items.iter().map(|s| atom(s)).collect()
    }

    #[test]
    fn two_branch_tree() {
        let models = [interp(&["dad(alex,helen)"]), interp(&["dad(alex,bob)"])];
        let tree = tree_from_models(&models);
        assert_eq!(tree.branch_count(), 2);
        assert_eq!(tree.node_count(), 3);
        let mut expected = models.to_vec();
        expected.sort();
        assert_eq!(branches(&tree), expected);
    }

    #[test]
    fn empty_and_void_trees() {
        let empty = tree_from_models(&[Interpretation::new()]);
        assert!(empty.is_empty_tree());
        assert_eq!(empty.branches(), vec![Interpretation::new()]);
        let void = tree_from_models(&[]);
        assert!(void.is_void() && !void.is_empty_tree());
        assert!(void.branches().is_empty());
        assert_ne!(empty, void);
    }

    #[test]
    fn prefix_models_get_an_empty_leaf() {
        let models = [interp(&["a"]), interp(&["a", "b"]), Interpretation::new()];
        let tree = tree_from_models(&models);
        let mut expected = models.to_vec();
        expected.sort();
        assert_eq!(tree.branches(), expected);
        assert!(tree.is_well_formed());
        assert!(tree.render().contains('ε'));
    }

    #[test]
    fn university_forest() {
        let g = gp(UNIVERSITY);
        let forest = build_forest(&g);
        let hyps: Vec<HypothesisSet> = forest.pairs.iter().map(|p| p.hypotheses.clone()).collect();
        assert_eq!(
            hyps,
            vec![hs(&["hasDoc", "haveRel"]), hs(&["haveRel", "noDoc"]), hs(&["noRel"])]
        );
        assert!(forest.pairs[2].tree.is_empty_tree());
        assert_eq!(forest.pairs[0].tree.branch_count(), 4);
        assert_eq!(
            forest.pairs[1].tree.branches(),
            vec![
                interp(&["dad(alex,bob)", "fac(alex)", "work(alex,uwm)"]),
                interp(&["dad(alex,bob)", "staff(alex)", "work(alex,uwm)"]),
                interp(&["dad(alex,helen)", "staff(alex)", "work(alex,mcw)"]),
            ]
        );
        assert!(audit_forest(&forest, &g).unwrap().is_empty());
    }

    #[test]
    fn declaration_free_and_empty_programs() {
        let g = gp("a ; b. c :- a.");
        let forest = build_forest(&g);
        assert_eq!(forest.pairs.len(), 1);
        assert!(forest.pairs[0].hypotheses.is_empty());
        assert_eq!(forest.pairs[0].tree.branches(), vec![interp(&["a", "c"]), interp(&["b"])]);
        let empty = build_forest(&gp(""));
        assert_eq!(empty.pairs.len(), 1);
        assert!(empty.pairs[0].tree.is_empty_tree());
        assert_eq!(empty.to_string(), "hypotheses: {}\n{}\n");
    }

    #[test]
    fn queries_on_the_university_forest() {
        let g = gp(UNIVERSITY);
        let forest = build_forest(&g);
        let q = |s: &str| forest_query(&forest, &parse_formula(s).unwrap(), &g);
        assert!((q("doc(alex)") - 0.035).abs() < 1e-9);
        assert!((q("dad(alex,bob)") - (0.14 * 0.5 + 0.56 * 2.0 / 3.0)).abs() < 1e-9);
        assert_eq!(q("false"), 0.0);
        assert!((q("true") - 1.0).abs() < 1e-9);
    }

    #[test]
    fn void_pairs_contribute_nothing() {
        let g = gp("a ; b :- h. disjoint(h: .5, k: .5).");
        let forest = HypotheticalModelForest {
            pairs: vec![
                ForestPair {
                    tree: ModelTree::void(),
                    hypotheses: hs(&["h"]),
                },
                ForestPair {
                    tree: ModelTree::empty(),
                    hypotheses: hs(&["k"]),
                },
            ],
        };
        assert_eq!(forest_query(&forest, &Formula::True, &g), 0.5);
    }

    #[test]
    fn redundant_splits_are_merged() {
        // the first clause alone would split on h; the fact makes it moot
        let g = gp("a :- h. a. disjoint(h: .5, k: .5).");
        let forest = build_forest(&g);
        assert_eq!(forest.pairs.len(), 1);
        assert!(forest.pairs[0].hypotheses.is_empty());
    }

    #[test]
    fn clause_order_does_not_change_the_family() {
        let g = gp("a :- h1. a :- h2. disjoint(h1: .5, k1: .5). disjoint(h2: .5, k2: .5).");
        let forward = build_forest(&g);
        let backward = build_forest_with_order(&g, &[1, 0]);
        assert_eq!(forward.family(), backward.family());
        assert!(audit_forest(&forward, &g).unwrap().is_empty());
    }
}
