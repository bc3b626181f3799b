use super::parser::{ParseError, ParseErrorKind};
use super::Pos;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// Lowercase-initial identifier: predicate or constant.
    Ident(String),
    /// Uppercase- or underscore-initial identifier.
    Var(String),
    Number(f64),
    LParen,
    RParen,
    Comma,
    Semi,
    Neck,
    Colon,
    Dot,
    Pipe,
    Amp,
    Tilde,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Var(s) => format!("variable `{s}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Neck => "`:-`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.text.len())
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.offset();
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
        let end = self.offset();
        &self.text[start..end]
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor {
        chars: text.char_indices().peekable(),
        text,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        let pos = cur.pos();
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, pos });
            return Ok(out);
        };
        let tok = match c {
            c if c.is_whitespace() => {
                cur.bump();
                continue;
            }
            '%' => {
                cur.eat_while(|c| c != '\n');
                continue;
            }
            'a'..='z' => Tok::Ident(cur.eat_while(is_ident_char).to_owned()),
            'A'..='Z' | '_' => Tok::Var(cur.eat_while(is_ident_char).to_owned()),
            '0'..='9' => lex_number(&mut cur, pos)?,
            '.' if cur.peek_second().is_some_and(|c| c.is_ascii_digit()) => lex_number(&mut cur, pos)?,
            ':' => {
                cur.bump();
                if cur.peek() == Some('-') {
                    cur.bump();
                    Tok::Neck
                } else {
                    Tok::Colon
                }
            }
            _ => {
                cur.bump();
                match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '.' => Tok::Dot,
                    '|' => Tok::Pipe,
                    '&' => Tok::Amp,
                    '~' => Tok::Tilde,
                    other => return Err(ParseError::new(pos, ParseErrorKind::UnexpectedChar(other))),
                }
            }
        };
        out.push(Token { tok, pos });
    }
}

// `12`, `0.25`, `.25`. A trailing `.` not followed by a digit is left for the
// clause terminator.
fn lex_number(cur: &mut Cursor<'_>, pos: Pos) -> Result<Tok, ParseError> {
    let start = cur.offset();
    cur.eat_while(|c| c.is_ascii_digit());
    if cur.peek() == Some('.') && cur.peek_second().is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
        cur.eat_while(|c| c.is_ascii_digit());
    }
    let end = cur.offset();
    let lexeme = &cur.text[start..end];
    lexeme
        .parse::<f64>()
        .map(Tok::Number)
        .map_err(|_| ParseError::new(pos, ParseErrorKind::BadNumber(lexeme.to_owned())))
}
