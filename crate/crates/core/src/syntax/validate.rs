//! Static checks on a parsed program.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::{Atom, GroundAtom, Pos, Program, Term, PROB_TOLERANCE};
use crate::grounder::substitutions;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A clause head atom has a ground instance that is a declared hypothesis.
    HypothesisInHead {
        clause: usize,
        pos: Pos,
        atom: Atom,
        hypothesis: Atom,
    },
    /// Two different ground declaration instances share a hypothesis.
    /// `first == second` means two instances of the same declaration.
    OverlappingDeclarations {
        first: usize,
        second: usize,
        pos: Pos,
        hypothesis: GroundAtom,
    },
    ProbabilitySum {
        declaration: usize,
        pos: Pos,
        sum: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::HypothesisInHead {
                pos, atom, hypothesis, ..
            } => write!(f, "{pos}: head atom `{atom}` can be an instance of hypothesis `{hypothesis}`"),
            Violation::OverlappingDeclarations {
                first,
                second,
                pos,
                hypothesis,
            } => {
                if first == second {
                    write!(f, "{pos}: ground instances of this declaration share hypothesis `{hypothesis}`")
                } else {
                    write!(
                        f,
                        "{pos}: declarations #{} and #{} share hypothesis `{hypothesis}`",
                        first + 1,
                        second + 1
                    )
                }
            }
            Violation::ProbabilitySum { pos, sum, .. } => {
                write!(f, "{pos}: probabilities sum to {sum}, expected 1")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Collect every well-formedness violation. Never fails; an empty report
/// means the program is a valid probabilistic program.
pub fn validate(program: &Program) -> ValidationReport {
    let mut violations = Vec::new();

    for (ci, clause) in program.clauses.iter().enumerate() {
        for atom in &clause.head {
            let hit = program
                .declarations
                .iter()
                .flat_map(|d| d.entries.iter().map(|(h, _)| h))
                .find(|h| unifiable(atom, h));
            if let Some(h) = hit {
                violations.push(Violation::HypothesisInHead {
                    clause: ci,
                    pos: program.clause_position(ci),
                    atom: atom.clone(),
                    hypothesis: h.clone(),
                });
            }
        }
    }

    for (di, decl) in program.declarations.iter().enumerate() {
        let sum = decl.total();
        if (sum - 1.0).abs() > PROB_TOLERANCE {
            violations.push(Violation::ProbabilitySum {
                declaration: di,
                pos: program.decl_position(di),
                sum,
            });
        }
    }

    violations.extend(overlapping_declarations(program));
    ValidationReport { violations }
}

fn overlapping_declarations(program: &Program) -> Vec<Violation> {
    let constants: Vec<String> = program.constants().into_iter().collect();
    // hypothesis -> (declaration, ground instance key)
    let mut owner: BTreeMap<GroundAtom, (usize, Vec<GroundAtom>)> = BTreeMap::new();
    let mut out = Vec::new();
    for (di, decl) in program.declarations.iter().enumerate() {
        let vars = decl.variables();
        let mut seen_instances: Vec<Vec<GroundAtom>> = Vec::new();
        for binding in substitutions(&vars, &constants) {
            let lookup = |v: &str| binding.get(v).cloned();
            let instance: Vec<GroundAtom> = decl
                .entries
                .iter()
                .filter_map(|(a, _)| a.instantiate(&lookup))
                .collect();
            if seen_instances.contains(&instance) {
                continue;
            }
            seen_instances.push(instance.clone());
            for (i, h) in instance.iter().enumerate() {
                let clash = if instance[..i].contains(h) {
                    Some(di)
                } else {
                    match owner.get(h) {
                        Some((d, inst)) if (*d, inst) != (di, &instance) => Some(*d),
                        _ => None,
                    }
                };
                match clash {
                    Some(first) => {
                        if !out.iter().any(|v| matches!(v, Violation::OverlappingDeclarations { hypothesis, .. } if hypothesis == h)) {
                            out.push(Violation::OverlappingDeclarations {
                                first,
                                second: di,
                                pos: program.decl_position(di),
                                hypothesis: h.clone(),
                            });
                        }
                    }
                    None => {
                        owner.insert(h.clone(), (di, instance.clone()));
                    }
                }
            }
        }
    }
    out
}

/// Whether two atoms, with variables renamed apart, have a common instance.
pub(crate) fn unifiable(a: &Atom, b: &Atom) -> bool {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return false;
    }
    // Variables are tagged by side so the two atoms never share one.
    let mut binding: HashMap<(u8, &str), Slot<'_>> = HashMap::new();
    for (x, y) in a.args.iter().zip(&b.args) {
        let l = resolve(&binding, slot(0, x));
        let r = resolve(&binding, slot(1, y));
        match (l, r) {
            (Slot::Const(p), Slot::Const(q)) => {
                if p != q {
                    return false;
                }
            }
            (Slot::Var(v), other) | (other, Slot::Var(v)) => {
                if Slot::Var(v) != other {
                    binding.insert(v, other);
                }
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot<'a> {
    Const(&'a str),
    Var((u8, &'a str)),
}

fn slot(side: u8, t: &Term) -> Slot<'_> {
    match t {
        Term::Const(c) => Slot::Const(c),
        Term::Var(v) => Slot::Var((side, v)),
    }
}

fn resolve<'a>(binding: &HashMap<(u8, &'a str), Slot<'a>>, mut s: Slot<'a>) -> Slot<'a> {
    while let Slot::Var(v) = s {
        match binding.get(&v) {
            Some(next) => s = *next,
            None => break,
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

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

    #[test]
    fn well_formed_program_has_empty_report() {
        assert!(validate(&parse_program(UNIVERSITY).unwrap()).is_empty());
    }

    #[test]
    fn hypothesis_in_head_is_flagged_once() {
        let text = format!("{UNIVERSITY}\nhasDoc :- a.");
        let report = validate(&parse_program(&text).unwrap());
        assert_eq!(report.len(), 1);
        assert!(matches!(&report.violations[0], Violation::HypothesisInHead { clause: 6, .. }));
    }

    #[test]
    fn non_ground_head_matching_hypothesis() {
        let p = parse_program("ok(X) :- b(X). disjoint(ok(a): .5, ko(a): .5).").unwrap();
        let report = validate(&p);
        assert_eq!(report.len(), 1);
        let p = parse_program("ok(X, b) :- c(X). disjoint(ok(a, Y): .5, ko(Y): .5).").unwrap();
        assert_eq!(validate(&p).len(), 1);
        let p = parse_program("ok(X, X) :- c(X). disjoint(ok(a, b): .5, ko: .5).").unwrap();
        assert!(validate(&p).is_empty());
    }

    #[test]
    fn probability_sum_off() {
        let report = validate(&parse_program("disjoint(h1:0.5, h2:0.4).").unwrap());
        assert_eq!(report.len(), 1);
        match &report.violations[0] {
            Violation::ProbabilitySum { sum, .. } => assert!((sum - 0.9).abs() < 1e-12),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn overlapping_declarations() {
        let p = parse_program("disjoint(a: .5, b: .5). disjoint(b: .3, c: .7).").unwrap();
        let report = validate(&p);
        assert_eq!(report.len(), 1);
        assert!(matches!(
            &report.violations[0],
            Violation::OverlappingDeclarations { first: 0, second: 1, .. }
        ));
    }

    #[test]
    fn variable_declaration_instances_overlap() {
        // every instance shares `g`
        let p = parse_program("disjoint(h(X): .5, g: .5). p(a). p(b).").unwrap();
        let report = validate(&p);
        assert_eq!(report.len(), 1);
        assert!(matches!(
            &report.violations[0],
            Violation::OverlappingDeclarations { first: 0, second: 0, .. }
        ));
        // one instance per constant, all distinct
        let p = parse_program("disjoint(h(X): .5, g(X): .5). p(a). p(b).").unwrap();
        assert!(validate(&p).is_empty());
    }

    #[test]
    fn unification_cases() {
        let a = |s: &str| parse_program(&format!("{s}.")).unwrap().clauses[0].head[0].clone();
        assert!(unifiable(&a("p(X, X)"), &a("p(a, Y)")));
        assert!(!unifiable(&a("p(X, X)"), &a("p(a, b)")));
        assert!(unifiable(&a("p(X, Y)"), &a("p(Y, a)")));
        assert!(!unifiable(&a("p(a)"), &a("q(a)")));
        assert!(!unifiable(&a("p(a)"), &a("p(a, b)")));
    }
}
