//! Parser for θ expressions.
//!
//! ```text
//! expr  := sum | "(" sum ")" "/" uint
//! sum   := sign? term (sign term)?
//! term  := uint | uint "*"? sqrt | sqrt
//! sqrt  := "sqrt" "(" uint ")"
//! sign  := "+" | "-"
//! ```
//!
//! At most one integer term and at most one `sqrt` term. Whitespace is
//! ignored between tokens.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{QuadraticIrrational, QuadraticNumber};
use crate::arith;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Sqrt,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let tok = match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("ascii digits");
                out.push((start, Tok::Int(n)));
                continue;
            }
            _ if text[i..].starts_with("sqrt") => {
                out.push((i, Tok::Sqrt));
                i += 4;
                continue;
            }
            _ => {
                let c = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    position: i,
                    message: format!("unexpected character '{c}'"),
                });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

#[derive(Default)]
struct Sum {
    rational: Option<BigInt>,
    surd: Option<(BigInt, BigInt)>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn uint(&mut self, what: &str) -> Result<BigInt> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn sqrt(&mut self) -> Result<BigInt> {
        self.expect(Tok::Sqrt, "'sqrt'")?;
        self.expect(Tok::LParen, "'(' after sqrt")?;
        let d = self.uint("radicand")?;
        self.expect(Tok::RParen, "')'")?;
        Ok(d)
    }

    fn term(&mut self, negative: bool, acc: &mut Sum) -> Result<()> {
        let at = self.offset();
        let sign = |n: BigInt| if negative { -n } else { n };
        match self.peek() {
            Some(Tok::Sqrt) => {
                let d = self.sqrt()?;
                self.put_surd(acc, sign(BigInt::one()), d, at)
            }
            Some(Tok::Int(_)) => {
                let n = self.uint("integer")?;
                match self.peek() {
                    Some(Tok::Star) => {
                        self.pos += 1;
                        let d = self.sqrt()?;
                        self.put_surd(acc, sign(n), d, at)
                    }
                    Some(Tok::Sqrt) => {
                        let d = self.sqrt()?;
                        self.put_surd(acc, sign(n), d, at)
                    }
                    _ => {
                        if acc.rational.is_some() {
                            return Err(Error::Syntax {
                                position: at,
                                message: "more than one integer term".into(),
                            });
                        }
                        acc.rational = Some(sign(n));
                        Ok(())
                    }
                }
            }
            _ => self.err("expected integer or sqrt(...)"),
        }
    }

    fn put_surd(&self, acc: &mut Sum, coeff: BigInt, d: BigInt, at: usize) -> Result<()> {
        if acc.surd.is_some() {
            return Err(Error::Syntax {
                position: at,
                message: "more than one sqrt term".into(),
            });
        }
        acc.surd = Some((coeff, d));
        Ok(())
    }

    fn sum(&mut self) -> Result<Sum> {
        let mut acc = Sum::default();
        let mut negative = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                true
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        self.term(negative, &mut acc)?;
        if let Some(t @ (Tok::Plus | Tok::Minus)) = self.peek() {
            negative = *t == Tok::Minus;
            self.pos += 1;
            self.term(negative, &mut acc)?;
        }
        Ok(acc)
    }

    fn expr(&mut self) -> Result<(Sum, BigInt)> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let s = self.sum()?;
            self.expect(Tok::RParen, "')'")?;
            self.expect(Tok::Slash, "'/'")?;
            let at = self.offset();
            let c = self.uint("denominator")?;
            if c.is_zero() {
                return Err(Error::Syntax {
                    position: at,
                    message: "zero denominator".into(),
                });
            }
            Ok((s, c))
        } else {
            Ok((self.sum()?, BigInt::one()))
        }
    }
}

/// Parses an expression such as `(1+sqrt(5))/2` or `3 - 2*sqrt(7)` into a
/// canonical quadratic irrational.
pub fn parse_theta(text: &str) -> Result<QuadraticIrrational> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let (sum, c) = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    let a = sum.rational.unwrap_or_default();
    let Some((b, d)) = sum.surd else {
        return Err(Error::RationalValue(format!("no sqrt term in '{}'", text.trim())));
    };
    if d < BigInt::from(2) || arith::is_square(&d) {
        return Err(Error::RationalValue(format!("sqrt({d}) is a perfect square")));
    }
    let x = QuadraticNumber::new(a, b, c, d)?;
    QuadraticIrrational::try_from(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(s: &str) -> (i64, i64, i64, i64) {
        let t = parse_theta(s).unwrap();
        let f = |x: &BigInt| i64::try_from(x).unwrap();
        (f(t.a()), f(t.b()), f(t.c()), f(t.d()))
    }

    #[test]
    fn golden_ratio() {
        assert_eq!(parts("(1+sqrt(5))/2"), (1, 1, 2, 5));
        assert_eq!(parts("( 1 + sqrt( 5 ) ) / 2"), (1, 1, 2, 5));
    }

    #[test]
    fn square_factor_absorbed() {
        assert_eq!(parts("sqrt(8)"), (0, 2, 1, 2));
        assert_eq!(parts("3*sqrt(12)"), (0, 6, 1, 3));
    }

    #[test]
    fn forms_accepted() {
        assert_eq!(parts("sqrt(10)"), (0, 1, 1, 10));
        assert_eq!(parts("-sqrt(2)"), (0, -1, 1, 2));
        assert_eq!(parts("3 - 2*sqrt(7)"), (3, -2, 1, 7));
        assert_eq!(parts("2sqrt(3)+1"), (1, 2, 1, 3));
        assert_eq!(parts("(-4+2*sqrt(5))/6"), (-2, 1, 3, 5));
    }

    #[test]
    fn perfect_square_rejected() {
        assert!(matches!(parse_theta("(3+sqrt(9))/2"), Err(Error::RationalValue(_))));
        assert!(matches!(parse_theta("sqrt(1)"), Err(Error::RationalValue(_))));
        assert!(matches!(parse_theta("0*sqrt(2)"), Err(Error::RationalValue(_))));
        assert!(matches!(parse_theta("7"), Err(Error::RationalValue(_))));
    }

    #[test]
    fn syntax_errors_report_position() {
        match parse_theta("(1+sqrt(5)/2") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 10),
            other => panic!("{other:?}"),
        }
        match parse_theta("1 + sqrt(5) x") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_theta("(1+sqrt(5))/0"), Err(Error::Syntax { position: 12, .. })));
        assert!(matches!(parse_theta("sqrt(2)+sqrt(3)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_theta(""), Err(Error::Syntax { position: 0, .. })));
    }

    #[test]
    fn display_round_trips() {
        for s in ["(1 + sqrt(5))/2", "sqrt(2)", "-sqrt(3)", "3 - 2*sqrt(7)", "(-1 + sqrt(5))/2"] {
            let t = parse_theta(s).unwrap();
            assert_eq!(t.to_string(), s);
            assert_eq!(parse_theta(&t.to_string()).unwrap(), t);
        }
    }
}
