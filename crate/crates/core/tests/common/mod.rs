//! Fixtures and a seeded generator of small random programs.

#![allow(dead_code)]

use std::path::PathBuf;

use pdlp_core::{ground_program, parse_program, Formula, GroundAtom, GroundProgram};
use rand::seq::SliceRandom;
use rand::Rng;

pub const TOL: f64 = 1e-9;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn fixture(name: &str) -> GroundProgram {
    ground_program(&parse_program(&fixture_text(name)).unwrap()).unwrap()
}

pub fn formula(s: &str) -> Formula {
    pdlp_core::parse_formula(s).unwrap()
}

const REGULAR: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Program text with at most 3 statements of 2-3 hypotheses, at most 6
/// clauses and at most 6 regular atoms.
pub fn random_program_text(rng: &mut impl Rng) -> String {
    let n_atoms = rng.gen_range(1..=REGULAR.len());
    let atoms = &REGULAR[..n_atoms];
    let n_statements = rng.gen_range(0..=3);
    let mut text = String::new();
    let mut hyps: Vec<String> = Vec::new();
    for s in 0..n_statements {
        let n = rng.gen_range(2..=3);
        let weights: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
        let total: u32 = weights.iter().sum();
        let entries: Vec<String> = weights
            .iter()
            .enumerate()
            .map(|(j, w)| {
                let h = format!("h{s}{j}");
                hyps.push(h.clone());
                format!("{h}: {}", *w as f64 / total as f64)
            })
            .collect();
        text.push_str(&format!("disjoint({}).\n", entries.join(", ")));
    }
    let n_clauses = rng.gen_range(1..=6);
    for _ in 0..n_clauses {
        let k = rng.gen_range(1..=3.min(n_atoms));
        let head: Vec<&str> = atoms.choose_multiple(rng, k).copied().collect();
        let mut body: Vec<String> = Vec::new();
        let n_reg = rng.gen_range(0..=2.min(n_atoms));
        body.extend(atoms.choose_multiple(rng, n_reg).map(|s| s.to_string()));
        if !hyps.is_empty() {
            let n_hyp = rng.gen_range(0..=2.min(hyps.len()));
            body.extend(hyps.choose_multiple(rng, n_hyp).cloned());
        }
        text.push_str(&head.join(" ; "));
        if !body.is_empty() {
            text.push_str(" :- ");
            text.push_str(&body.join(", "));
        }
        text.push_str(".\n");
    }
    text
}

pub fn random_program(rng: &mut impl Rng) -> GroundProgram {
    let text = random_program_text(rng);
    ground_program(&parse_program(&text).unwrap()).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

/// Random ground formula over the program's regular atoms (plus one atom
/// that never occurs).
pub fn random_formula(rng: &mut impl Rng, gp: &GroundProgram, depth: u32) -> Formula {
    let mut atoms: Vec<GroundAtom> = gp.regular_base.iter().cloned().collect();
    atoms.push(GroundAtom::prop("zz"));
    random_formula_over(rng, &atoms, depth)
}

pub fn random_formula_over(rng: &mut impl Rng, atoms: &[GroundAtom], depth: u32) -> Formula {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..12) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::Atom(atoms.choose(rng).unwrap().clone()),
        };
    }
    match rng.gen_range(0..3) {
        0 => Formula::not(random_formula_over(rng, atoms, depth - 1)),
        1 => Formula::and(
            random_formula_over(rng, atoms, depth - 1),
            random_formula_over(rng, atoms, depth - 1),
        ),
        _ => Formula::or(
            random_formula_over(rng, atoms, depth - 1),
            random_formula_over(rng, atoms, depth - 1),
        ),
    }
}
