mod common;

use common::{fixture, fixture_text, formula, TOL};
use pdlp_core::forest::audit_forest;
use pdlp_core::{build_forest, default_probability, ground_program, parse_program, probability, validate, Error, Method};

#[test]
fn every_fixture_parses_and_round_trips() {
    for name in [
        "university_plain.pdlp",
        "university.pdlp",
        "two_sources.pdlp",
        "partial.pdlp",
        "lawyer.pdlp",
        "hypothesis_in_head.pdlp",
        "empty.pdlp",
    ] {
        let p = parse_program(&fixture_text(name)).unwrap();
        let again = parse_program(&p.to_string()).unwrap();
        assert_eq!(p, again, "{name}");
    }
}

#[test]
fn hypothesis_in_head_is_rejected() {
    let p = parse_program(&fixture_text("hypothesis_in_head.pdlp")).unwrap();
    assert_eq!(validate(&p).len(), 1);
    assert!(matches!(ground_program(&p), Err(Error::HypothesisInHead { .. })));
}

#[test]
fn empty_program_has_one_empty_model() {
    let g = fixture("empty.pdlp");
    assert!(g.clauses.is_empty());
    for m in Method::ALL {
        assert!((probability(&formula("true"), &g, m).unwrap() - 1.0).abs() < TOL);
        assert!(probability(&formula("a"), &g, m).unwrap().abs() < TOL);
    }
}

#[test]
fn forests_match_golden_dumps_and_pass_the_audit() {
    for (program, dump) in [("university_plain.pdlp", "university_plain_forest.txt"), ("university.pdlp", "university_forest.txt")] {
        let g = fixture(program);
        let forest = build_forest(&g);
        assert_eq!(forest.to_string(), fixture_text(dump), "{program}");
        assert!(audit_forest(&forest, &g).unwrap().is_empty(), "{program}");
    }
}

#[test]
fn university_queries_agree_across_methods() {
    let g = fixture("university.pdlp");
    for q in ["doc(alex)", "fac(alex)", "staff(alex)", "work(alex,mcw) & not fac(alex)", "dad(alex,bob) | staff(alex)"] {
        let f = formula(q);
        let expl = probability(&f, &g, Method::Explanation).unwrap();
        let forest = probability(&f, &g, Method::Forest).unwrap();
        let brute = probability(&f, &g, Method::BruteForce).unwrap();
        assert!((expl - brute).abs() < TOL && (forest - brute).abs() < TOL, "{q}: {expl} {forest} {brute}");
    }
}

#[test]
fn partial_and_full_parts_add_up() {
    let g = fixture("partial.pdlp");
    let r = default_probability(&formula("d"), &g).unwrap();
    assert!((r.pr - r.pr_full - r.pr_partial).abs() < TOL);
    assert!((r.pr - 0.35).abs() < TOL);
}

#[test]
fn mixed_formula_is_rejected() {
    let g = fixture("university.pdlp");
    assert!(matches!(
        probability(&formula("hasDoc & doc(alex)"), &g, Method::Explanation),
        Err(Error::MixedFormula(_))
    ));
}
