//! Surface syntax for elements.
//!
//! ```text
//! expr     := term (('+' | '-') term)*  |  '0'
//! term     := [rational '*'] gen
//! gen      := ('L' | 'G' | 'I' | 'Q') '[' index ']' | 'C' | 'C1' | 'C2'
//! rational := ['-'] digits ['/' digits]
//! index    := ['-'] digits ['/2']
//! ```
//!
//! Printing lists terms by kind (L, G, I, Q, C, C1, C2) and then by
//! ascending index, which is the `Element` storage order. The zero element
//! prints as `0`.

use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, Element, Family, Index, Kind};
use crate::linalg::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("{} is not a generator kind of {family}", kind.symbol())]
    KindNotInFamily { kind: Kind, family: Family },
    #[error("index {index} is not allowed for {} in {family}", kind.symbol())]
    IndexNotInSector {
        kind: Kind,
        index: Index,
        family: Family,
    },
}

impl From<AlgebraError> for ParseError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::KindNotInFamily { kind, family } => {
                ParseError::KindNotInFamily { kind, family }
            }
            AlgebraError::IndexNotInSector {
                kind,
                index,
                family,
            } => ParseError::IndexNotInSector {
                kind,
                index,
                family,
            },
            AlgebraError::FamilyMismatch(a, _) => ParseError::Syntax {
                pos: 0,
                msg: format!("family mismatch in {a}"),
            },
        }
    }
}

/// `p/q`, or just `p` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Always `p/q`, used for scalar fields in JSON output.
pub fn format_rational_pq(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn format_element(x: &Element) -> String {
    let mut out = String::new();
    for (pos, (b, c)) in x.terms().enumerate() {
        let mag = c.abs();
        if pos == 0 {
            if c.is_negative() {
                // A bare leading '-' is not a term; spell out the sign.
                write!(out, "-{}*", format_rational(&mag)).unwrap();
            } else if !mag.is_one() {
                write!(out, "{}*", format_rational(&mag)).unwrap();
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
            if !mag.is_one() {
                write!(out, "{}*", format_rational(&mag)).unwrap();
            }
        }
        write!(out, "{b}").unwrap();
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn parse_element(src: &str, family: Family) -> Result<Element, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.peek() == Some(b'0') {
        let save = p.pos;
        p.pos += 1;
        p.skip_ws();
        if p.at_end() {
            return Ok(Element::zero(family));
        }
        p.pos = save;
    }
    let mut acc = Element::zero(family);
    let (k, b) = p.term(family)?;
    acc.add_scaled(&b, &k)?;
    loop {
        p.skip_ws();
        let sign = match p.peek() {
            None => break,
            Some(b'+') => Rational::one(),
            Some(b'-') => -Rational::one(),
            Some(_) => return Err(p.error("expected '+' or '-'")),
        };
        p.pos += 1;
        p.skip_ws();
        let (k, b) = p.term(family)?;
        acc.add_scaled(&b, &(k * sign))?;
    }
    Ok(acc)
}

/// Parses a standalone rational `['-'] digits ['/' digits]`.
pub fn parse_rational(src: &str) -> Result<Rational, ParseError> {
    let mut p = Parser {
        src: src.trim().as_bytes(),
        pos: 0,
    };
    let q = p.rational()?;
    if !p.at_end() {
        return Err(p.error("trailing input after rational"));
    }
    Ok(q)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn digits(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse as an integer"))
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let negative = self.peek() == Some(b'-');
        if negative {
            self.pos += 1;
        }
        let numer = self.digits()?;
        let denom = if self.peek() == Some(b'/') {
            self.pos += 1;
            let at = self.pos;
            let d = self.digits()?;
            if d.is_zero() {
                return Err(ParseError::Syntax {
                    pos: at,
                    msg: "zero denominator".into(),
                });
            }
            d
        } else {
            BigInt::one()
        };
        let q = Rational::new(numer, denom);
        Ok(if negative { -q } else { q })
    }

    fn term(&mut self, family: Family) -> Result<(Rational, Element), ParseError> {
        self.skip_ws();
        let coeff = match self.peek() {
            Some(c) if c == b'-' || c.is_ascii_digit() => {
                let q = self.rational()?;
                self.expect(b'*')?;
                self.skip_ws();
                q
            }
            _ => Rational::one(),
        };
        let gen = self.generator(family)?;
        Ok((coeff, gen))
    }

    fn generator(&mut self, family: Family) -> Result<Element, ParseError> {
        let kind = match self.peek() {
            Some(b'L') => Kind::L,
            Some(b'G') => Kind::G,
            Some(b'I') => Kind::I,
            Some(b'Q') => Kind::Q,
            Some(b'C') => {
                self.pos += 1;
                let kind = match self.peek() {
                    Some(b'1') => Kind::C1,
                    Some(b'2') => Kind::C2,
                    _ => Kind::C,
                };
                if kind != Kind::C {
                    self.pos += 1;
                }
                return Ok(Element::basis(family, kind, Index::ZERO)?);
            }
            _ => return Err(self.error("expected a generator (L, G, I, Q, C, C1, C2)")),
        };
        self.pos += 1;
        self.expect(b'[')?;
        self.skip_ws();
        let index = self.index()?;
        self.expect(b']')?;
        Ok(Element::basis(family, kind, index)?)
    }

    fn index(&mut self) -> Result<Index, ParseError> {
        let start = self.pos;
        let negative = self.peek() == Some(b'-');
        if negative {
            self.pos += 1;
        }
        let n = self.digits()?;
        let mut twice: BigInt = n * 2;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            if self.peek() != Some(b'2') {
                return Err(self.error("index denominator must be 2"));
            }
            self.pos += 1;
            twice /= 2;
        }
        if negative {
            twice = -twice;
        }
        i64::try_from(twice)
            .map(Index::from_twice)
            .map_err(|_| ParseError::Syntax {
                pos: start,
                msg: "index out of range".into(),
            })
    }
}
