//! Abstract syntax for probabilistic disjunctive logic programs and ground
//! query formulas, together with the text parser and static validation.
//!
//! A program is a list of disjunctive clauses `a ; b :- c, d.` and a list of
//! `disjoint(h1: p1, ..., hn: pn).` declarations. Terms are constants or
//! variables only.

mod lexer;
mod parser;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

pub use parser::{parse_formula, parse_program, ParseError, ParseErrorKind};
pub use validate::{validate, ValidationReport, Violation};

/// Tolerance used for every probability comparison.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// A 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String),
    Var(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) | Term::Var(c) => f.write_str(c),
        }
    }
}

/// An atom whose arguments may contain variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for t in &self.args {
            if let Term::Var(v) = t {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Const(c) => Some(c.as_str()),
            Term::Var(_) => None,
        })
    }

    /// The ground atom, if this atom has no variables.
    pub fn to_ground(&self) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom {
            predicate: self.predicate.clone(),
            args,
        })
    }

    /// Apply a substitution; `None` if some variable is left unbound.
    pub fn instantiate(&self, binding: &dyn Fn(&str) -> Option<String>) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(v) => binding(v),
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom {
            predicate: self.predicate.clone(),
            args,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        write_args(f, self.args.iter())
    }
}

fn write_args<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    mut args: impl ExactSizeIterator<Item = T>,
) -> fmt::Result {
    if args.len() == 0 {
        return Ok(());
    }
    f.write_str("(")?;
    if let Some(first) = args.next() {
        write!(f, "{first}")?;
    }
    for a in args {
        write!(f, ",{a}")?;
    }
    f.write_str(")")
}

/// A variable-free atom. Ordering is lexicographic by predicate, then by
/// arguments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new<S: Into<String>>(predicate: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    /// A propositional atom.
    pub fn prop(name: impl Into<String>) -> Self {
        GroundAtom {
            predicate: name.into(),
            args: Vec::new(),
        }
    }

    pub fn to_atom(&self) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().cloned().map(Term::Const).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        write_args(f, self.args.iter())
    }
}

/// `head[0] ; head[1] ; ... :- body[0], body[1], ...`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Vec<Atom>,
    pub body: Vec<Atom>,
}

impl Clause {
    pub fn new(head: Vec<Atom>, body: Vec<Atom>) -> Self {
        let mut c = Clause { head, body };
        dedup_in_order(&mut c.head);
        c
    }

    pub fn fact(atom: Atom) -> Self {
        Clause {
            head: vec![atom],
            body: Vec::new(),
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.head.iter().chain(self.body.iter())
    }

    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for v in self.atoms().flat_map(Atom::variables) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.head, " ; ")?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            write_list(f, &self.body, ", ")?;
        }
        f.write_str(".")
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

pub(crate) fn dedup_in_order<T: PartialEq>(items: &mut Vec<T>) {
    let mut i = 0;
    while i < items.len() {
        if items[..i].contains(&items[i]) {
            items.remove(i);
        } else {
            i += 1;
        }
    }
}

/// `disjoint(h1: p1, ..., hn: pn).` One random variable whose states are the
/// listed hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjointDecl {
    pub entries: Vec<(Atom, f64)>,
}

impl DisjointDecl {
    pub fn new(entries: Vec<(Atom, f64)>) -> Self {
        DisjointDecl { entries }
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for v in self.entries.iter().flat_map(|(a, _)| a.variables()) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }
}

impl fmt::Display for DisjointDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("disjoint(")?;
        for (i, (atom, p)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{atom}: {p}")?;
        }
        f.write_str(").")
    }
}

/// A parsed program. Source positions are kept for diagnostics and are not
/// part of structural equality.
#[derive(Debug, Clone, Default)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub declarations: Vec<DisjointDecl>,
    pub clause_pos: Vec<Pos>,
    pub decl_pos: Vec<Pos>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>, declarations: Vec<DisjointDecl>) -> Self {
        let clause_pos = vec![Pos::default(); clauses.len()];
        let decl_pos = vec![Pos::default(); declarations.len()];
        Program {
            clauses,
            declarations,
            clause_pos,
            decl_pos,
        }
    }

    /// Every constant appearing anywhere in the program.
    pub fn constants(&self) -> BTreeSet<String> {
        let clause_atoms = self.clauses.iter().flat_map(Clause::atoms);
        let decl_atoms = self.declarations.iter().flat_map(|d| d.entries.iter().map(|(a, _)| a));
        clause_atoms
            .chain(decl_atoms)
            .flat_map(Atom::constants)
            .map(str::to_owned)
            .collect()
    }

    pub fn has_variables(&self) -> bool {
        self.clauses.iter().flat_map(Clause::atoms).any(|a| !a.is_ground())
            || self
                .declarations
                .iter()
                .flat_map(|d| d.entries.iter())
                .any(|(a, _)| !a.is_ground())
    }

    pub fn clause_position(&self, index: usize) -> Pos {
        self.clause_pos.get(index).copied().unwrap_or_default()
    }

    pub fn decl_position(&self, index: usize) -> Pos {
        self.decl_pos.get(index).copied().unwrap_or_default()
    }
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses && self.declarations == other.declarations
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.declarations {
            writeln!(f, "{d}")?;
        }
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A ground query formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(GroundAtom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: GroundAtom) -> Self {
        Formula::Atom(a)
    }

    pub fn prop(name: &str) -> Self {
        Formula::Atom(GroundAtom::prop(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction of all items; `True` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Disjunction of all items; `False` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn atoms(&self) -> BTreeSet<&GroundAtom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a GroundAtom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a);
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Classical evaluation given the truth of each atom.
    pub fn eval_with(&self, truth: &dyn Fn(&GroundAtom) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => truth(a),
            Formula::Not(f) => !f.eval_with(truth),
            Formula::And(a, b) => a.eval_with(truth) && b.eval_with(truth),
            Formula::Or(a, b) => a.eval_with(truth) || b.eval_with(truth),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => write!(f, "not {g}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}
