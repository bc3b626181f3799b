//! Command-line front end for probabilistic disjunctive logic programs.
//!
//! [`run`] takes the argument list and two writers so the whole command
//! surface can be exercised in-process.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pdlp_core::explain::{Explainer, QueryResult};
use pdlp_core::query::{classify, FormulaKind};
use pdlp_core::worlds::pr_star;
use pdlp_core::{build_forest, ground_program, parse_formula, parse_program, probability, validate, Formula};
use pdlp_core::{GroundProgram, Method};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SEMANTIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const ATOM_LIMIT_VAR: &str = "PDLP_ATOM_LIMIT";

/// Probabilities are printed with 9 decimals, matching the comparison
/// tolerance.
pub fn format_probability(p: f64) -> String {
    // avoid printing -0.000000000 for tiny negative rounding noise
    let p = if p.abs() < 5e-10 { 0.0 } else { p };
    format!("{p:.9}")
}

#[derive(Debug, Parser)]
#[command(name = "pdlp", version, about = "Query probabilistic disjunctive logic programs")]
pub struct Cli {
    /// Cap on the candidate atoms the brute-force oracle enumerates
    /// (overrides PDLP_ATOM_LIMIT).
    #[arg(long, global = true, value_name = "N")]
    pub atom_limit: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a program and report every violation.
    Check { file: PathBuf },
    /// Print the hypothetical model forest.
    Models { file: PathBuf },
    /// Print the f- and p-explanation bases of a formula.
    Explain(FormulaArgs),
    /// Compute the default probability of a formula.
    Query {
        #[command(flatten)]
        target: FormulaArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Expl)]
        method: MethodArg,
        /// Print the full result record instead of the bare value.
        #[arg(long)]
        structured: bool,
    },
    /// Compute a probability by all three methods and compare them.
    Crosscheck(FormulaArgs),
}

#[derive(Debug, Args)]
pub struct FormulaArgs {
    pub file: PathBuf,
    pub formula: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Expl,
    Forest,
    Brute,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Expl => Method::Explanation,
            MethodArg::Forest => Method::Forest,
            MethodArg::Brute => Method::BruteForce,
        }
    }
}

/// A failed command: the exit status and the message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn semantic(message: impl Into<String>) -> Self {
        Failure { code: EXIT_SEMANTIC, message: message.into() }
    }
}

impl From<pdlp_core::Error> for Failure {
    fn from(e: pdlp_core::Error) -> Self {
        Failure::semantic(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Runs the command line `args` (program name first) and returns the exit
/// status. Reads the atom limit from the environment.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let env_limit = std::env::var(ATOM_LIMIT_VAR).ok();
    run_with_env(args, env_limit.as_deref(), out, err)
}

pub fn run_with_env<I, S>(args: I, env_limit: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return e.exit_code();
        }
    };
    match execute(&cli, env_limit, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn atom_limit(cli: &Cli, env_limit: Option<&str>) -> Result<Option<usize>, Failure> {
    if cli.atom_limit.is_some() {
        return Ok(cli.atom_limit);
    }
    match env_limit {
        None => Ok(None),
        Some(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::usage(format!("{ATOM_LIMIT_VAR} must be a non-negative integer, got `{v}`"))),
    }
}

fn execute(cli: &Cli, env_limit: Option<&str>, out: &mut dyn Write) -> CmdResult {
    let limit = atom_limit(cli, env_limit)?;
    let load = |path: &Path| -> Result<GroundProgram, Failure> {
        let mut gp = load_program(path)?;
        if let Some(n) = limit {
            gp.set_atom_limit(n);
        }
        Ok(gp)
    };
    match &cli.command {
        Command::Check { file } => cmd_check(file, out),
        Command::Models { file } => cmd_models(&load(file)?, out),
        Command::Explain(t) => cmd_explain(&load(&t.file)?, &parse_query(&t.formula)?, out),
        Command::Query { target, method, structured } => {
            let gp = load(&target.file)?;
            let f = parse_query(&target.formula)?;
            if *structured {
                cmd_query_structured(&gp, &f, (*method).into(), out)
            } else {
                cmd_query(&gp, &f, (*method).into(), out)
            }
        }
        Command::Crosscheck(t) => cmd_crosscheck(&load(&t.file)?, &parse_query(&t.formula)?, out),
    }
}

fn read_program(path: &Path) -> Result<pdlp_core::Program, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_program(&text).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))
}

fn load_program(path: &Path) -> Result<GroundProgram, Failure> {
    let program = read_program(path)?;
    let report = validate(&program);
    if !report.is_empty() {
        return Err(Failure::semantic(format!("{} is not a valid program\n{report}", path.display())));
    }
    Ok(ground_program(&program)?)
}

fn parse_query(text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(|e| Failure::usage(format!("formula {e}")))
}

fn io(e: std::io::Error) -> Failure {
    Failure::usage(format!("write failed: {e}"))
}

fn cmd_check(path: &Path, out: &mut dyn Write) -> CmdResult {
    let program = read_program(path)?;
    let report = validate(&program);
    if !report.is_empty() {
        write!(out, "{report}").map_err(io)?;
        if !report.to_string().ends_with('\n') {
            writeln!(out).map_err(io)?;
        }
        return Err(Failure::semantic(format!("{} violation(s)", report.len())));
    }
    ground_program(&program)?;
    writeln!(out, "ok").map_err(io)
}

fn cmd_models(gp: &GroundProgram, out: &mut dyn Write) -> CmdResult {
    write!(out, "{}", build_forest(gp)).map_err(io)
}

fn bases_line(sets: &[pdlp_core::HypothesisSet]) -> String {
    let items: Vec<String> = sets.iter().map(ToString::to_string).collect();
    format!("[{}]", items.join(", "))
}

fn regular_only(gp: &GroundProgram, f: &Formula) -> CmdResult {
    match classify(f, gp) {
        FormulaKind::Regular => Ok(()),
        _ => Err(Failure::semantic(format!(
            "explanations are defined for formulas over regular atoms only, got `{f}`"
        ))),
    }
}

fn cmd_explain(gp: &GroundProgram, f: &Formula, out: &mut dyn Write) -> CmdResult {
    regular_only(gp, f)?;
    let ex = Explainer::new(gp)?;
    writeln!(out, "f_base: {}", bases_line(&ex.f_explanations(f)?)).map_err(io)?;
    writeln!(out, "p_base: {}", bases_line(&ex.p_explanations(f)?)).map_err(io)
}

fn cmd_query(gp: &GroundProgram, f: &Formula, method: Method, out: &mut dyn Write) -> CmdResult {
    let p = probability(f, gp, method)?;
    writeln!(out, "{}", format_probability(p)).map_err(io)
}

fn cmd_query_structured(gp: &GroundProgram, f: &Formula, method: Method, out: &mut dyn Write) -> CmdResult {
    if classify(f, gp) == FormulaKind::Hypotheses {
        let record = Record { formula: f.to_string(), pr: pr_star(f, gp)?, ..Record::default() };
        return write!(out, "{}", record.render()).map_err(io);
    }
    regular_only(gp, f)?;
    let result = Explainer::new(gp)?.default_probability(f)?;
    let pr = match method {
        Method::Explanation => result.pr,
        m => probability(f, gp, m)?,
    };
    write!(out, "{}", Record::from_result(&result, pr).render()).map_err(io)
}

fn cmd_crosscheck(gp: &GroundProgram, f: &Formula, out: &mut dyn Write) -> CmdResult {
    let mut values = Vec::new();
    for m in Method::ALL {
        let p = probability(f, gp, m)?;
        writeln!(out, "{:<6} {}", m.name(), format_probability(p)).map_err(io)?;
        values.push((m, p));
    }
    let spread = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max)
        - values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    if spread > pdlp_core::syntax::PROB_TOLERANCE {
        let shown: Vec<String> = values.iter().map(|(m, p)| format!("{}={}", m.name(), format_probability(*p))).collect();
        return Err(Failure::semantic(format!("methods disagree: {}", shown.join(" "))));
    }
    writeln!(out, "agree").map_err(io)
}

/// One expansion row of a structured record.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpansionRow {
    pub hypotheses: String,
    pub weight: f64,
    pub models: usize,
    pub satisfying: usize,
}

/// The structured query record. Hypothesis-only formulas carry just the
/// formula and `pr`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record {
    pub formula: String,
    pub pr: f64,
    pub pr_full: Option<f64>,
    pub pr_partial: Option<f64>,
    pub f_base: Option<String>,
    pub p_base: Option<String>,
    pub expansions: Vec<ExpansionRow>,
}

impl Record {
    pub fn from_result(r: &QueryResult, pr: f64) -> Self {
        Record {
            formula: r.formula.to_string(),
            pr,
            pr_full: Some(r.pr_full),
            pr_partial: Some(r.pr_partial),
            f_base: Some(bases_line(&r.explanations.f_base)),
            p_base: Some(bases_line(&r.explanations.p_base)),
            expansions: r
                .expansions
                .iter()
                .map(|e| ExpansionRow {
                    hypotheses: e.hypotheses.to_string(),
                    weight: e.weight,
                    models: e.models,
                    satisfying: e.satisfying,
                })
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("formula: {}\npr: {}\n", self.formula, format_probability(self.pr));
        if let (Some(full), Some(partial)) = (self.pr_full, self.pr_partial) {
            s += &format!("pr_full: {}\npr_partial: {}\n", format_probability(full), format_probability(partial));
        }
        if let Some(b) = &self.f_base {
            s += &format!("f_base: {b}\n");
        }
        if let Some(b) = &self.p_base {
            s += &format!("p_base: {b}\n");
            s += &format!("expansions: {}\n", self.expansions.len());
            for e in &self.expansions {
                s += &format!(
                    "expansion: {} weight={} models={} satisfying={}\n",
                    e.hypotheses,
                    format_probability(e.weight),
                    e.models,
                    e.satisfying
                );
            }
        }
        s
    }
}

/// Parses the text produced by [`Record::render`].
pub fn parse_record(text: &str) -> Result<Record, String> {
    let mut rec = Record::default();
    let mut seen_pr = false;
    let mut expected_rows = None;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number `{v}`: {e}"));
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (key, value) = line.split_once(": ").ok_or_else(|| format!("malformed line `{line}`"))?;
        match key {
            "formula" => rec.formula = value.to_owned(),
            "pr" => {
                rec.pr = num(value)?;
                seen_pr = true;
            }
            "pr_full" => rec.pr_full = Some(num(value)?),
            "pr_partial" => rec.pr_partial = Some(num(value)?),
            "f_base" => rec.f_base = Some(value.to_owned()),
            "p_base" => rec.p_base = Some(value.to_owned()),
            "expansions" => {
                expected_rows = Some(value.trim().parse::<usize>().map_err(|e| format!("bad count `{value}`: {e}"))?)
            }
            "expansion" => rec.expansions.push(parse_row(value)?),
            _ => return Err(format!("unknown field `{key}`")),
        }
    }
    if !seen_pr {
        return Err("missing field `pr`".into());
    }
    if let Some(n) = expected_rows {
        if n != rec.expansions.len() {
            return Err(format!("expected {n} expansion rows, found {}", rec.expansions.len()));
        }
    }
    Ok(rec)
}

fn parse_row(value: &str) -> Result<ExpansionRow, String> {
    let close = value.find('}').ok_or_else(|| format!("malformed expansion `{value}`"))?;
    let (hyps, rest) = value.split_at(close + 1);
    let mut row = ExpansionRow { hypotheses: hyps.to_owned(), ..ExpansionRow::default() };
    for field in rest.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| format!("malformed field `{field}`"))?;
        let bad = |e: &dyn std::fmt::Display| format!("bad value in `{field}`: {e}");
        match k {
            "weight" => row.weight = v.parse().map_err(|e| bad(&e))?,
            "models" => row.models = v.parse().map_err(|e| bad(&e))?,
            "satisfying" => row.satisfying = v.parse().map_err(|e| bad(&e))?,
            _ => return Err(format!("unknown expansion field `{k}`")),
        }
    }
    Ok(row)
}
