//! Text syntax for polynomials, e.g. `q1 - z1*qb2 + (0.5-2i)*z1^3`.
//!
//! Grammar: sums and differences of products, `^` with a non-negative
//! integer exponent, parentheses, unary minus. Numbers may carry an `i`
//! suffix; variables are `z`, `zb`, `w`, `q`, `qb` followed by a one-based
//! index.

use std::str::FromStr;

use num_complex::Complex64 as C64;

use super::poly::{ComplexPoly, Var};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(C64),
    Var(Var),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            d if d.is_ascii_digit() || d == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let x: f64 = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {text:?}")))?;
                if i < chars.len() && chars[i] == 'i' && !chars.get(i + 1).is_some_and(|c| c.is_alphanumeric()) {
                    i += 1;
                    out.push(Tok::Num(C64::new(0.0, x)));
                } else {
                    out.push(Tok::Num(C64::new(x, 0.0)));
                }
            }
            a if a.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if word == "i" {
                    out.push(Tok::Num(C64::new(0.0, 1.0)));
                } else {
                    out.push(Tok::Var(word.parse()?));
                }
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<ComplexPoly> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ComplexPoly> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = acc * self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ComplexPoly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ComplexPoly> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(n)) if n.im == 0.0 && n.re >= 0.0 && n.re.fract() == 0.0 && n.re <= 64.0 => {
                    Ok(base.pow(n.re as u32))
                }
                other => Err(Error::Parse(format!("exponent must be a small non-negative integer, got {other:?}"))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<ComplexPoly> {
        match self.next() {
            Some(Tok::Num(c)) => Ok(ComplexPoly::constant(c)),
            Some(Tok::Var(v)) => Ok(ComplexPoly::var(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing ')'".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl FromStr for ComplexPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<ComplexPoly> {
        let toks = tokenize(s)?;
        if toks.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut p = Parser { toks, pos: 0 };
        let out = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in {s:?}")));
        }
        Ok(out)
    }
}

/// Parses `re+imj`, `re-imj`, `re`, `imj` (or `i` in place of `j`), or a
/// JSON pair `[re, im]`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad complex number {s:?}; expected re+imj or [re,im]"));
    if t.starts_with('[') {
        let pair: [f64; 2] = serde_json::from_str(&t).map_err(|_| bad())?;
        return Ok(C64::new(pair[0], pair[1]));
    }
    if t.is_empty() {
        return Err(bad());
    }
    let bytes = t.as_bytes();
    // split at the last sign that is not a leading sign or an exponent sign
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |u: &str| -> Result<f64> {
        let body = u.strip_suffix('j').or_else(|| u.strip_suffix('i')).ok_or_else(bad)?;
        match body {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => body.parse().map_err(|_| bad()),
        }
    };
    let real = |u: &str| -> Result<f64> { u.parse().map_err(|_| bad()) };
    let is_imag = |u: &str| u.ends_with('j') || u.ends_with('i');
    match split {
        Some(i) if is_imag(&t[i..]) => Ok(C64::new(real(&t[..i])?, imag(&t[i..])?)),
        _ if is_imag(&t) => Ok(C64::new(0.0, imag(&t)?)),
        _ => Ok(C64::new(real(&t)?, 0.0)),
    }
}

/// Inverse of [`parse_complex`] for the text form.
pub fn format_complex(c: C64) -> String {
    format!("{}{:+}j", c.re, c.im)
}
