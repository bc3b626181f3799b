//! Recursive-descent parser for programs and query formulas.

use thiserror::Error;

use super::lexer::{tokenize, Tok, Token};
use super::{Atom, Clause, DisjointDecl, Formula, GroundAtom, Pos, Program, Term};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, kind: ParseErrorKind) -> Self {
        ParseError { pos, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("a disjoint declaration needs at least two hypotheses")]
    SingleEntryDeclaration,
    #[error("hypothesis `{0}` listed twice in one declaration")]
    DuplicateEntry(String),
    #[error("query formulas must be ground, found variable in `{0}`")]
    NonGround(String),
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.at + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::new(
            self.pos(),
            ParseErrorKind::Unexpected {
                expected: expected.to_owned(),
                found: self.peek().describe(),
            },
        )
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let predicate = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("an atom")),
        };
        self.next();
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                let term = match self.peek() {
                    Tok::Ident(s) => Term::Const(s.clone()),
                    Tok::Var(s) => Term::Var(s.clone()),
                    _ => return Err(self.unexpected("a constant or variable")),
                };
                self.next();
                args.push(term);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen, "`,` or `)`")?;
        }
        Ok(Atom { predicate, args })
    }

    fn declaration(&mut self) -> Result<DisjointDecl, ParseError> {
        let start = self.pos();
        self.next();
        self.expect(Tok::LParen, "`(`")?;
        let mut entries: Vec<(Atom, f64)> = Vec::new();
        loop {
            let at = self.pos();
            let atom = self.atom()?;
            self.expect(Tok::Colon, "`:`")?;
            let p = match self.peek() {
                Tok::Number(n) => *n,
                _ => return Err(self.unexpected("a probability")),
            };
            self.next();
            if entries.iter().any(|(a, _)| *a == atom) {
                return Err(ParseError::new(at, ParseErrorKind::DuplicateEntry(atom.to_string())));
            }
            entries.push((atom, p));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen, "`,` or `)`")?;
        self.expect(Tok::Dot, "`.`")?;
        if entries.len() < 2 {
            return Err(ParseError::new(start, ParseErrorKind::SingleEntryDeclaration));
        }
        Ok(DisjointDecl { entries })
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let mut head = vec![self.atom()?];
        while self.eat(&Tok::Semi) {
            head.push(self.atom()?);
        }
        let mut body = Vec::new();
        if self.eat(&Tok::Neck) {
            body.push(self.atom()?);
            while self.eat(&Tok::Comma) {
                body.push(self.atom()?);
            }
        }
        self.expect(Tok::Dot, "`.`")?;
        Ok(Clause::new(head, body))
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut prog = Program::default();
        while *self.peek() != Tok::Eof {
            let pos = self.pos();
            let is_decl = matches!(self.peek(), Tok::Ident(s) if s == "disjoint")
                && *self.peek_at(1) == Tok::LParen;
            if is_decl {
                prog.declarations.push(self.declaration()?);
                prog.decl_pos.push(pos);
            } else {
                prog.clauses.push(self.clause()?);
                prog.clause_pos.push(pos);
            }
        }
        Ok(prog)
    }

    // or  := and ('|' and)*
    // and := unary (('&' | ',') unary)*
    // unary := ('not' | '~') unary | primary
    fn or_formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.and_formula()?;
        while self.eat(&Tok::Pipe) {
            f = Formula::or(f, self.and_formula()?);
        }
        Ok(f)
    }

    fn and_formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary_formula()?;
        while matches!(self.peek(), Tok::Amp | Tok::Comma) {
            self.next();
            f = Formula::and(f, self.unary_formula()?);
        }
        Ok(f)
    }

    fn unary_formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Tilde => {
                self.next();
                Ok(Formula::not(self.unary_formula()?))
            }
            Tok::Ident(s) if s == "not" => {
                self.next();
                Ok(Formula::not(self.unary_formula()?))
            }
            _ => self.primary_formula(),
        }
    }

    fn primary_formula(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let f = self.or_formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(s) | Tok::Var(s) if s == "true" || s == "TRUE" => {
                self.next();
                Ok(Formula::True)
            }
            Tok::Ident(s) | Tok::Var(s) if s == "false" || s == "FALSE" => {
                self.next();
                Ok(Formula::False)
            }
            Tok::Ident(_) => {
                let atom = self.atom()?;
                let ground: Option<GroundAtom> = atom.to_ground();
                ground
                    .map(Formula::Atom)
                    .ok_or_else(|| ParseError::new(pos, ParseErrorKind::NonGround(atom.to_string())))
            }
            Tok::Var(v) => Err(ParseError::new(pos, ParseErrorKind::NonGround(v))),
            _ => Err(self.unexpected("a formula")),
        }
    }
}

/// Parse program text. Only syntactic normalization happens here: duplicate
/// head disjuncts are dropped, nothing is grounded.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    Parser::new(text)?.program()
}

/// Parse a ground query formula. Precedence is `not` > `&` > `|`; `,` is a
/// synonym for `&` and `~` for `not`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.or_formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of formula"));
    }
    Ok(f)
}
