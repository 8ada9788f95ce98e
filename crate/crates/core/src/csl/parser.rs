//! Recursive-descent parser for requirement strings.
//!
//! ```text
//! requirement := 'P' cmp number '[' prop 'U' ('<=' | '<') number prop ']'
//! cmp         := '<=' | '<' | '>=' | '>'
//! prop        := or ('=>' prop)?
//! or          := and ('|' and)*
//! and         := unary ('&' unary)*
//! unary       := '!' unary | '(' prop ')' | atom
//! atom        := '"' name '"' | name
//! ```
//!
//! The bare words `P` and `U` are keywords; quote them to use them as atoms.

use thiserror::Error;

use super::{Comparison, PropFormula, UntilRequirement};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CslError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("bound must be in (0,1), got {0}")]
    BoundOutOfRange(f64),
    #[error("time bound must be > 0, got {0}")]
    NonPositiveTime(f64),
    #[error("nested or multiple P/Until operators are not supported (byte {offset})")]
    NestedOperator { offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Prob,
    Until,
    Le,
    Lt,
    Ge,
    Gt,
    Implies,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Not,
    Or,
    And,
    Number(f64),
    Ident(String),
    Quoted(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Prob => "`P`".into(),
            Tok::Until => "`U`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Not => "`!`".into(),
            Tok::Or => "`|`".into(),
            Tok::And => "`&`".into(),
            Tok::Number(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Quoted(s) => format!("atom {s:?}"),
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> CslError {
    CslError::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, CslError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut at = 0;
    while at < bytes.len() {
        let c = bytes[at];
        let start = at;
        let two = |next: u8| bytes.get(at + 1) == Some(&next);
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                at += 1;
                continue;
            }
            b'<' if two(b'=') => {
                at += 2;
                Tok::Le
            }
            b'<' => {
                at += 1;
                Tok::Lt
            }
            b'>' if two(b'=') => {
                at += 2;
                Tok::Ge
            }
            b'>' => {
                at += 1;
                Tok::Gt
            }
            b'=' if two(b'>') => {
                at += 2;
                Tok::Implies
            }
            b'[' | b']' | b'(' | b')' | b'!' | b'|' | b'&' => {
                at += 1;
                match c {
                    b'[' => Tok::LBracket,
                    b']' => Tok::RBracket,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b'!' => Tok::Not,
                    b'|' => Tok::Or,
                    _ => Tok::And,
                }
            }
            b'"' => {
                let close = text[at + 1..]
                    .find('"')
                    .ok_or_else(|| syntax(at, "unterminated quoted atom"))?;
                let name = &text[at + 1..at + 1 + close];
                if !crate::model::is_proposition_name(name) {
                    return Err(syntax(at, format!("invalid atom name {name:?}")));
                }
                at += close + 2;
                Tok::Quoted(name.to_string())
            }
            b'0'..=b'9' | b'.' => {
                while at < bytes.len() {
                    let d = bytes[at];
                    let exp_sign = (d == b'+' || d == b'-')
                        && matches!(bytes.get(at - 1), Some(b'e') | Some(b'E'));
                    if d.is_ascii_digit() || d == b'.' || d == b'e' || d == b'E' || exp_sign {
                        at += 1;
                    } else {
                        break;
                    }
                }
                let lit = &text[start..at];
                let value = lit
                    .parse::<f64>()
                    .map_err(|_| syntax(start, format!("invalid number {lit:?}")))?;
                Tok::Number(value)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while at < bytes.len() && (bytes[at].is_ascii_alphanumeric() || bytes[at] == b'_') {
                    at += 1;
                }
                match &text[start..at] {
                    "P" => Tok::Prob,
                    "U" => Tok::Until,
                    word => Tok::Ident(word.to_string()),
                }
            }
            _ => {
                let ch = text[at..].chars().next().unwrap_or('?');
                return Err(syntax(at, format!("unexpected character {ch:?}")));
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn unexpected(&self, wanted: &str) -> CslError {
        match self.peek() {
            Some(Tok::Prob) | Some(Tok::Until) => CslError::NestedOperator {
                offset: self.offset(),
            },
            Some(t) => syntax(self.offset(), format!("expected {wanted}, found {}", t.describe())),
            None => syntax(self.end, format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), CslError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn number(&mut self, wanted: &str) -> Result<f64, CslError> {
        match self.peek() {
            Some(Tok::Number(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn requirement(&mut self) -> Result<UntilRequirement, CslError> {
        self.expect(Tok::Prob, "`P`")?;
        let comparison = match self.bump() {
            Some(Tok::Le) | Some(Tok::Lt) => Comparison::Leq,
            Some(Tok::Ge) | Some(Tok::Gt) => Comparison::Geq,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("comparison operator"));
            }
        };
        let bound = self.number("probability bound")?;
        self.expect(Tok::LBracket, "`[`")?;
        let phi = self.prop()?;
        self.expect(Tok::Until, "`U`")?;
        match self.bump() {
            Some(Tok::Le) | Some(Tok::Lt) => {}
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("`<=` after `U`"));
            }
        }
        let time_bound = self.number("time bound")?;
        let psi = self.prop()?;
        self.expect(Tok::RBracket, "`]`")?;
        if self.peek().is_some() {
            if self.toks[self.pos..]
                .iter()
                .any(|(_, t)| matches!(t, Tok::Prob | Tok::Until))
            {
                return Err(CslError::NestedOperator {
                    offset: self.offset(),
                });
            }
            return Err(self.unexpected("end of input"));
        }
        UntilRequirement::new(comparison, bound, phi, psi, time_bound)
    }

    fn prop(&mut self) -> Result<PropFormula, CslError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.prop()?;
            return Ok(PropFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<PropFormula, CslError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = PropFormula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<PropFormula, CslError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = PropFormula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<PropFormula, CslError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(PropFormula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.prop()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) | Some(Tok::Quoted(name)) => {
                let f = PropFormula::atom(name.clone());
                self.pos += 1;
                Ok(f)
            }
            _ => Err(self.unexpected("atomic proposition")),
        }
    }
}

/// Parses a requirement such as `P<=0.2 [ "up" U<=5 "repair" ]`.
pub fn parse(text: &str) -> Result<UntilRequirement, CslError> {
    let toks = lex(text)?;
    Parser {
        toks,
        pos: 0,
        end: text.len(),
    }
    .requirement()
}
