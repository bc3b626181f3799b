//! Instantiation of a program over its (finite) Herbrand universe.
//!
//! Every variable ranges over every constant of the program; no safety or
//! range restriction is required. Each ground instance of a `disjoint`
//! declaration becomes its own statement (random variable), and the
//! integrity constraints are derived from the statements: one exhaustiveness
//! disjunction and all pairwise denials per statement.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::syntax::{Clause, DisjointDecl, GroundAtom, Program};

/// Default cap on the number of candidate regular atoms the brute-force
/// model enumerator will accept.
pub const DEFAULT_ATOM_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundClause {
    pub head: Vec<GroundAtom>,
    pub body: Vec<GroundAtom>,
}

impl GroundClause {
    /// Head and body are kept sorted and duplicate-free.
    pub fn new(mut head: Vec<GroundAtom>, mut body: Vec<GroundAtom>) -> Self {
        head.sort();
        head.dedup();
        body.sort();
        body.dedup();
        GroundClause { head, body }
    }

    pub fn to_clause(&self) -> Clause {
        Clause::new(
            self.head.iter().map(GroundAtom::to_atom).collect(),
            self.body.iter().map(GroundAtom::to_atom).collect(),
        )
    }
}

impl fmt::Display for GroundClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_clause().fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStatement {
    pub id: usize,
    pub entries: Vec<(GroundAtom, f64)>,
}

impl GroundStatement {
    pub fn hypotheses(&self) -> impl Iterator<Item = &GroundAtom> {
        self.entries.iter().map(|(h, _)| h)
    }
}

impl fmt::Display for GroundStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        DisjointDecl::new(self.entries.iter().map(|(h, p)| (h.to_atom(), *p)).collect()).fmt(f)
    }
}

/// Per statement: `h1 ; ... ; hn` plus `:- hi, hj` for every pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntegrityConstraints {
    pub exhaustive: Vec<Vec<GroundAtom>>,
    pub denials: Vec<(GroundAtom, GroundAtom)>,
}

impl IntegrityConstraints {
    pub fn from_statements(statements: &[GroundStatement]) -> Self {
        let mut ic = IntegrityConstraints::default();
        for s in statements {
            let hyps: Vec<GroundAtom> = s.hypotheses().cloned().collect();
            for i in 0..hyps.len() {
                for j in i + 1..hyps.len() {
                    ic.denials.push((hyps[i].clone(), hyps[j].clone()));
                }
            }
            ic.exhaustive.push(hyps);
        }
        ic
    }

    /// Whether an interpretation (given as a membership test) satisfies
    /// every constraint.
    pub fn satisfied_by(&self, holds: &dyn Fn(&GroundAtom) -> bool) -> bool {
        self.exhaustive.iter().all(|d| d.iter().any(holds))
            && self.denials.iter().all(|(a, b)| !(holds(a) && holds(b)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundProgram {
    /// Sorted and duplicate-free.
    pub clauses: Vec<GroundClause>,
    pub statements: Vec<GroundStatement>,
    pub ic: IntegrityConstraints,
    /// Ground non-hypothesis atoms occurring in clauses.
    pub regular_base: BTreeSet<GroundAtom>,
    /// The hypothesis universe.
    pub hypotheses: BTreeSet<GroundAtom>,
    index: BTreeMap<GroundAtom, (usize, usize)>,
    atom_limit: usize,
}

impl GroundProgram {
    /// Assemble a ground program from already-ground parts.
    pub fn from_parts(clauses: Vec<GroundClause>, statements: Vec<GroundStatement>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (si, s) in statements.iter().enumerate() {
            for (ei, h) in s.hypotheses().enumerate() {
                if index.insert(h.clone(), (si, ei)).is_some() {
                    return Err(Error::OverlappingStatements(h.clone()));
                }
            }
        }
        let clauses: BTreeSet<GroundClause> = clauses.into_iter().collect();
        let clauses: Vec<GroundClause> = clauses.into_iter().collect();
        for c in &clauses {
            if let Some(h) = c.head.iter().find(|a| index.contains_key(*a)) {
                return Err(Error::HypothesisInHead {
                    clause: c.to_string(),
                    hypothesis: h.clone(),
                });
            }
        }
        let regular_base = clauses
            .iter()
            .flat_map(|c| c.head.iter().chain(&c.body))
            .filter(|a| !index.contains_key(*a))
            .cloned()
            .collect();
        let hypotheses = index.keys().cloned().collect();
        let statements: Vec<GroundStatement> = statements
            .into_iter()
            .enumerate()
            .map(|(id, s)| GroundStatement { id, ..s })
            .collect();
        Ok(GroundProgram {
            ic: IntegrityConstraints::from_statements(&statements),
            clauses,
            statements,
            regular_base,
            hypotheses,
            index,
            atom_limit: DEFAULT_ATOM_LIMIT,
        })
    }

    pub fn atom_limit(&self) -> usize {
        self.atom_limit
    }

    pub fn set_atom_limit(&mut self, limit: usize) {
        self.atom_limit = limit;
    }

    pub fn with_atom_limit(mut self, limit: usize) -> Self {
        self.atom_limit = limit;
        self
    }

    pub fn is_hypothesis(&self, atom: &GroundAtom) -> bool {
        self.index.contains_key(atom)
    }

    /// `(statement id, entry index)` of a hypothesis.
    pub fn locate(&self, atom: &GroundAtom) -> Option<(usize, usize)> {
        self.index.get(atom).copied()
    }

    pub fn probability_of(&self, atom: &GroundAtom) -> Option<f64> {
        self.locate(atom).map(|(s, e)| self.statements[s].entries[e].1)
    }

    /// The program back in source form; grounding it again is the identity.
    pub fn to_program(&self) -> Program {
        Program::new(
            self.clauses.iter().map(GroundClause::to_clause).collect(),
            self.statements
                .iter()
                .map(|s| DisjointDecl::new(s.entries.iter().map(|(h, p)| (h.to_atom(), *p)).collect()))
                .collect(),
        )
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The constants of the program (its Herbrand universe).
pub fn herbrand_constants(program: &Program) -> BTreeSet<String> {
    program.constants()
}

/// Every binding of `vars` to `constants`, in odometer order (last variable
/// fastest). No variables gives the single empty binding.
pub fn substitutions(vars: &[&str], constants: &[String]) -> Vec<BTreeMap<String, String>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|b| {
                constants.iter().map(move |c| {
                    let mut b = b.clone();
                    b.insert((*v).to_owned(), c.clone());
                    b
                })
            })
            .collect();
    }
    out
}

/// All ground instances of one clause, before cross-clause deduplication.
pub fn ground_clause_instances(clause: &Clause, constants: &[String]) -> Vec<GroundClause> {
    let vars = clause.variables();
    substitutions(&vars, constants)
        .into_iter()
        .map(|b| {
            let lookup = |v: &str| b.get(v).cloned();
            let inst = |atoms: &[crate::syntax::Atom]| {
                atoms
                    .iter()
                    .map(|a| a.instantiate(&lookup).expect("every variable is bound"))
                    .collect::<Vec<_>>()
            };
            GroundClause::new(inst(&clause.head), inst(&clause.body))
        })
        .collect()
}

fn ground_statements(decl: &DisjointDecl, constants: &[String]) -> Vec<GroundStatement> {
    let vars = decl.variables();
    let mut out: Vec<GroundStatement> = Vec::new();
    for b in substitutions(&vars, constants) {
        let lookup = |v: &str| b.get(v).cloned();
        let entries: Vec<(GroundAtom, f64)> = decl
            .entries
            .iter()
            .map(|(a, p)| (a.instantiate(&lookup).expect("every variable is bound"), *p))
            .collect();
        if !out.iter().any(|s| s.entries == entries) {
            out.push(GroundStatement { id: 0, entries });
        }
    }
    out
}

/// Ground a program over its constants and derive the integrity constraints.
pub fn ground_program(program: &Program) -> Result<GroundProgram> {
    let constants: Vec<String> = herbrand_constants(program).into_iter().collect();
    if constants.is_empty() && program.has_variables() {
        return Err(Error::EmptyUniverse);
    }
    let statements: Vec<GroundStatement> = program
        .declarations
        .iter()
        .flat_map(|d| ground_statements(d, &constants))
        .collect();
    for s in &statements {
        let mut seen = BTreeSet::new();
        if let Some(h) = s.hypotheses().find(|h| !seen.insert(*h)) {
            return Err(Error::OverlappingStatements(h.clone()));
        }
    }
    let clauses = program
        .clauses
        .iter()
        .flat_map(|c| ground_clause_instances(c, &constants))
        .collect();
    GroundProgram::from_parts(clauses, statements)
}
