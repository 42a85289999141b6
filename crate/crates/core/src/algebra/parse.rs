//! Parser for the polynomial/series expression grammar.
//!
//! Grammar (whitespace ignored):
//! ```text
//! expr     := '-'? term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' uint)?
//! base     := rational | var | '(' expr ')' | func '(' expr ')'
//! var      := 'm' uint | 'z' uint          (1-indexed)
//! rational := int ('/' uint)?
//! func     := 'exp' | 'log1p'              (series expressions only)
//! ```

use num_bigint::BigInt;
use num_traits::One;

use super::poly::MultiPoly;
use super::series::TruncSeries;
use super::{AlgebraError, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Rational),
    /// 0-based variable index.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Exp(Box<Expr>),
    Log1p(Box<Expr>),
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    n: usize,
    allow_funcs: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, n: usize, allow_funcs: bool) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            n,
            allow_funcs,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> AlgebraError {
        AlgebraError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), AlgebraError> {
        match self.peek() {
            Some(x) if x == b => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(&format!("expected '{}'", b as char))),
        }
    }

    fn uint(&mut self) -> Result<BigInt, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected unsigned integer"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn small_uint(&mut self) -> Result<u32, AlgebraError> {
        let v = self.uint()?;
        u32::try_from(&v).map_err(|_| self.err("integer too large"))
    }

    fn expr(&mut self) -> Result<Expr, AlgebraError> {
        let mut acc = if self.peek() == Some(b'-') {
            self.pos += 1;
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, AlgebraError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, AlgebraError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            if self.peek() == Some(b'-') {
                return Err(AlgebraError::NegativeExponent { pos: self.pos });
            }
            let e = self.small_uint()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, AlgebraError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'-') | Some(b'0'..=b'9') => self.rational(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(self.err(&format!("unexpected character '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn rational(&mut self) -> Result<Expr, AlgebraError> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let num = self.uint()?;
        let num = if neg { -num } else { num };
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let den = self.uint()?;
            if den == BigInt::from(0) {
                return Err(self.err("zero denominator"));
            }
            Ok(Expr::Num(Rational::new(num, den)))
        } else {
            Ok(Expr::Num(Rational::from_integer(num)))
        }
    }

    fn ident(&mut self) -> Result<Expr, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        if self.allow_funcs && (word == "exp" || word == "log1p") {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(if word == "exp" {
                Expr::Exp(Box::new(arg))
            } else {
                Expr::Log1p(Box::new(arg))
            });
        }
        let (head, digits) = word.split_at(1);
        if (head == "m" || head == "z") && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        {
            let idx: usize = digits.parse().map_err(|_| AlgebraError::Parse {
                pos: start,
                msg: "variable index too large".into(),
            })?;
            if idx == 0 || idx > self.n {
                return Err(AlgebraError::UnknownVariable {
                    pos: start,
                    name: word.to_string(),
                });
            }
            return Ok(Expr::Var(idx - 1));
        }
        Err(AlgebraError::UnknownVariable {
            pos: start,
            name: word.to_string(),
        })
    }

    fn finish(&mut self) -> Result<(), AlgebraError> {
        if self.peek().is_some() {
            Err(self.err("trailing input"))
        } else {
            Ok(())
        }
    }
}

fn lower_poly(expr: &Expr, n: usize) -> Result<MultiPoly, AlgebraError> {
    Ok(match expr {
        Expr::Num(c) => MultiPoly::constant(n, c.clone()),
        Expr::Var(i) => MultiPoly::var(n, *i),
        Expr::Neg(a) => -&lower_poly(a, n)?,
        Expr::Add(a, b) => &lower_poly(a, n)? + &lower_poly(b, n)?,
        Expr::Sub(a, b) => &lower_poly(a, n)? - &lower_poly(b, n)?,
        Expr::Mul(a, b) => &lower_poly(a, n)? * &lower_poly(b, n)?,
        Expr::Pow(a, e) => lower_poly(a, n)?.pow(*e),
        Expr::Exp(_) | Expr::Log1p(_) => {
            return Err(AlgebraError::Parse {
                pos: 0,
                msg: "function calls are not allowed in polynomial expressions".into(),
            })
        }
    })
}

fn lower_series(expr: &Expr, n: usize, d: u32) -> Result<TruncSeries, AlgebraError> {
    Ok(match expr {
        Expr::Num(c) => TruncSeries::constant(n, d, c.clone()),
        Expr::Var(i) => TruncSeries::var(n, d, *i),
        Expr::Neg(a) => -&lower_series(a, n, d)?,
        Expr::Add(a, b) => &lower_series(a, n, d)? + &lower_series(b, n, d)?,
        Expr::Sub(a, b) => &lower_series(a, n, d)? - &lower_series(b, n, d)?,
        Expr::Mul(a, b) => &lower_series(a, n, d)? * &lower_series(b, n, d)?,
        Expr::Pow(a, e) => lower_series(a, n, d)?.pow(*e),
        Expr::Exp(a) => lower_series(a, n, d)?.exp()?,
        Expr::Log1p(a) => lower_series(a, n, d)?.log1p()?,
    })
}

/// Parses a polynomial over variables `m1..mn` (or `z1..zn`).
pub fn poly_parse(text: &str, n: usize) -> Result<MultiPoly, AlgebraError> {
    let mut p = Parser::new(text, n, false);
    let expr = p.expr()?;
    p.finish()?;
    lower_poly(&expr, n)
}

/// Parses a series expression (polynomial grammar extended with exp and log1p)
/// and evaluates it as a truncated series at degree `d`.
pub fn series_parse(text: &str, n: usize, d: u32) -> Result<TruncSeries, AlgebraError> {
    let mut p = Parser::new(text, n, true);
    let expr = p.expr()?;
    p.finish()?;
    lower_series(&expr, n, d)
}

/// Parses "p" or "p/q" into a rational (q positive).
pub fn rational_parse(text: &str) -> Result<Rational, AlgebraError> {
    let t = text.trim();
    t.parse::<Rational>().map_err(|e| AlgebraError::Parse {
        pos: 0,
        msg: format!("invalid rational '{t}': {e}"),
    })
}

/// Renders a rational as "p" or "p/q".
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::exponent::ExponentVector;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_term_maps_directly() {
        let p = poly_parse("m1 - m1^2", 1).unwrap();
        assert_eq!(p.coefficient(&ExponentVector::new(vec![1])), q("1"));
        assert_eq!(p.coefficient(&ExponentVector::new(vec![2])), q("-1"));
        assert_eq!(p.num_terms(), 2);

        let p = poly_parse("3/2*m1^2*m2", 2).unwrap();
        assert_eq!(p.coefficient(&ExponentVector::new(vec![2, 1])), q("3/2"));
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn distributes_products() {
        let p = poly_parse("m1*(m1+1)", 1).unwrap();
        let expected = poly_parse("m1^2 + m1", 1).unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn reports_error_positions() {
        match poly_parse("m1 + + m2", 2) {
            Err(AlgebraError::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        match poly_parse("m3 + 1", 2) {
            Err(AlgebraError::UnknownVariable { name, .. }) => assert_eq!(name, "m3"),
            other => panic!("expected unknown variable, got {other:?}"),
        }
        match poly_parse("m1^-2", 1) {
            Err(AlgebraError::NegativeExponent { .. }) => {}
            other => panic!("expected negative exponent error, got {other:?}"),
        }
    }

    #[test]
    fn series_grammar_supports_exp_and_log1p() {
        let s = series_parse("exp(z1) - 1", 1, 3).unwrap();
        assert_eq!(s.coefficient(&ExponentVector::new(vec![3])), q("1/6"));
        let s = series_parse("log1p(z1 + z2)", 2, 2).unwrap();
        assert_eq!(s.coefficient(&ExponentVector::new(vec![1, 1])), q("-1"));
    }
}
