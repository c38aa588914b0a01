//! Text syntax for LTL.
//!
//! Precedence from tightest to loosest: unary operators (`!`, `X`, `F`, `G`),
//! the temporal binaries `U W R M` (right associative), `&`, `|`, `->` (right
//! associative) and `<->`. See `docs/grammar.md`.

use std::fmt;

use super::formula::Formula;

/// Parse tree before negations are pushed to the atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    Atom(String),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
    Next(Box<Expr>),
    Finally(Box<Expr>),
    Globally(Box<Expr>),
    Until(Box<Expr>, Box<Expr>),
    WeakUntil(Box<Expr>, Box<Expr>),
    Release(Box<Expr>, Box<Expr>),
    StrongRelease(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Next,
    Finally,
    Globally,
    Until,
    WeakUntil,
    Release,
    StrongRelease,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Not => "`!`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Implies => "`->`",
            Tok::Iff => "`<->`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Next => "`X`",
            Tok::Finally => "`F`",
            Tok::Globally => "`G`",
            Tok::Until => "`U`",
            Tok::WeakUntil => "`W`",
            Tok::Release => "`R`",
            Tok::StrongRelease => "`M`",
            Tok::End => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else if rest.starts_with("&&") {
            (Tok::And, 2)
        } else if rest.starts_with("||") {
            (Tok::Or, 2)
        } else {
            match c {
                '!' | '~' => (Tok::Not, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut j = i;
                    while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                        j += 1;
                    }
                    let word: String = chars[i..j].iter().collect();
                    let tok = match word.as_str() {
                        "true" | "tt" => Tok::True,
                        "false" | "ff" => Tok::False,
                        "X" => Tok::Next,
                        "F" => Tok::Finally,
                        "G" => Tok::Globally,
                        "U" => Tok::Until,
                        "W" => Tok::WeakUntil,
                        "R" => Tok::Release,
                        "M" => Tok::StrongRelease,
                        _ => Tok::Ident(word),
                    };
                    (tok, j - i)
                }
                other => {
                    return Err(err(
                        start_line,
                        start_col,
                        format!("unknown token `{other}`"),
                    ));
                }
            }
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
        i += len;
        column += len;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, what: &str) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            message: format!("expected {what}, found {}", t.tok),
        }
    }

    fn iff(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implies()?;
            lhs = Expr::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.binary_temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.binary_temporal()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.unary()?;
        let ctor: fn(Box<Expr>, Box<Expr>) -> Expr = match self.peek() {
            Tok::Until => Expr::Until,
            Tok::WeakUntil => Expr::WeakUntil,
            Tok::Release => Expr::Release,
            Tok::StrongRelease => Expr::StrongRelease,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.binary_temporal()?;
        Ok(ctor(Box::new(lhs), Box::new(rhs)))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let ctor: fn(Box<Expr>) -> Expr = match self.peek() {
            Tok::Not => Expr::Not,
            Tok::Next => Expr::Next,
            Tok::Finally => Expr::Finally,
            Tok::Globally => Expr::Globally,
            _ => return self.atom(),
        };
        self.bump();
        Ok(ctor(Box::new(self.unary()?)))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Expr::Const(true))
            }
            Tok::False => {
                self.bump();
                Ok(Expr::Const(false))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Atom(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error_here("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error_here("a formula")),
        }
    }
}

/// Parses `text` into a parse tree, without normalisation.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.iff()?;
    if *p.peek() != Tok::End {
        return Err(p.error_here("end of input"));
    }
    Ok(e)
}

/// Parses `text` and converts the result to negation normal form.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    Ok(to_nnf(&parse_expr(text)?))
}

/// Pushes negations to the atoms and eliminates `->` and `<->`.
pub fn to_nnf(e: &Expr) -> Formula {
    nnf(e, true)
}

fn nnf(e: &Expr, positive: bool) -> Formula {
    let pos = |x: &Expr| nnf(x, positive);
    match e {
        Expr::Const(b) => Formula::constant(*b == positive),
        Expr::Atom(a) => Formula::literal(a, positive),
        Expr::Not(x) => nnf(x, !positive),
        Expr::And(a, b) if positive => Formula::and2(pos(a), pos(b)),
        Expr::And(a, b) => Formula::or2(pos(a), pos(b)),
        Expr::Or(a, b) if positive => Formula::or2(pos(a), pos(b)),
        Expr::Or(a, b) => Formula::and2(pos(a), pos(b)),
        // a -> b  ==  !a | b
        Expr::Implies(a, b) if positive => Formula::or2(nnf(a, false), nnf(b, true)),
        Expr::Implies(a, b) => Formula::and2(nnf(a, true), nnf(b, false)),
        Expr::Iff(a, b) => {
            let both = Formula::and2(nnf(a, true), nnf(b, true));
            let neither = Formula::and2(nnf(a, false), nnf(b, false));
            let left_only = Formula::and2(nnf(a, true), nnf(b, false));
            let right_only = Formula::and2(nnf(a, false), nnf(b, true));
            if positive {
                Formula::or2(both, neither)
            } else {
                Formula::or2(left_only, right_only)
            }
        }
        Expr::Next(x) => Formula::next(pos(x)),
        Expr::Finally(x) if positive => Formula::finally(pos(x)),
        Expr::Finally(x) => Formula::globally(pos(x)),
        Expr::Globally(x) if positive => Formula::globally(pos(x)),
        Expr::Globally(x) => Formula::finally(pos(x)),
        Expr::Until(a, b) if positive => Formula::until(pos(a), pos(b)),
        Expr::Until(a, b) => Formula::release(pos(a), pos(b)),
        Expr::Release(a, b) if positive => Formula::release(pos(a), pos(b)),
        Expr::Release(a, b) => Formula::until(pos(a), pos(b)),
        Expr::WeakUntil(a, b) if positive => Formula::weak_until(pos(a), pos(b)),
        Expr::WeakUntil(a, b) => Formula::strong_release(pos(a), pos(b)),
        Expr::StrongRelease(a, b) if positive => Formula::strong_release(pos(a), pos(b)),
        Expr::StrongRelease(a, b) => Formula::weak_until(pos(a), pos(b)),
    }
}

/// Embeds an NNF formula back into the parse tree type.
pub fn to_expr(f: &Formula) -> Expr {
    let bx = |x: &Formula| Box::new(to_expr(x));
    let fold = |cs: &[Formula], ctor: fn(Box<Expr>, Box<Expr>) -> Expr| {
        let mut it = cs.iter().map(to_expr);
        let first = it.next().expect("junction has children");
        it.fold(first, |acc, x| ctor(Box::new(acc), Box::new(x)))
    };
    match f {
        Formula::True => Expr::Const(true),
        Formula::False => Expr::Const(false),
        Formula::Atom(a) => Expr::Atom(a.to_string()),
        Formula::NegAtom(a) => Expr::Not(Box::new(Expr::Atom(a.to_string()))),
        Formula::And(cs) => fold(cs, Expr::And),
        Formula::Or(cs) => fold(cs, Expr::Or),
        Formula::Next(x) => Expr::Next(bx(x)),
        Formula::Finally(x) => Expr::Finally(bx(x)),
        Formula::Globally(x) => Expr::Globally(bx(x)),
        Formula::Until(a, b) => Expr::Until(bx(a), bx(b)),
        Formula::WeakUntil(a, b) => Expr::WeakUntil(bx(a), bx(b)),
        Formula::Release(a, b) => Expr::Release(bx(a), bx(b)),
        Formula::StrongRelease(a, b) => Expr::StrongRelease(bx(a), bx(b)),
    }
}
