//! Expression grammar:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' integer)?
//! atom  := integer | name | '(' expr ')'
//! ```
//!
//! Names are the variables `x1..xn` (or a caller-supplied list) and `w`, the
//! generator of a number field.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::field::FieldSpec;
use crate::poly::{Poly, RatFunc};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable '{name}' at offset {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("'w' at offset {pos} is only valid over a number field")]
    GeneratorNotAllowed { pos: usize },
    #[error("division by zero at offset {pos}")]
    DivisionByZero { pos: usize },
    #[error("expected a polynomial, got a proper fraction")]
    NotPolynomial,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Sym(char),
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(src[start..i].parse().unwrap()), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Name(src[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(ExprError::Syntax { pos: i, msg: format!("unexpected character '{ch}'") });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    k: &'a FieldSpec,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn unexpected(&self) -> ExprError {
        let msg = match self.peek() {
            Tok::End => "unexpected end of input".to_string(),
            Tok::Num(n) => format!("unexpected number {n}"),
            Tok::Name(s) => format!("unexpected name '{s}'"),
            Tok::Sym(c) => format!("unexpected '{c}'"),
        };
        ExprError::Syntax { pos: self.pos(), msg }
    }

    fn expr(&mut self) -> Result<RatFunc, ExprError> {
        let mut acc = self.term()?;
        while let Tok::Sym(c @ ('+' | '-')) = *self.peek() {
            self.at += 1;
            let rhs = self.term()?;
            acc = if c == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc, ExprError> {
        let mut acc = self.unary()?;
        while let Tok::Sym(c @ ('*' | '/')) = *self.peek() {
            self.at += 1;
            let pos = self.pos();
            let rhs = self.unary()?;
            acc = if c == '*' {
                acc.mul(&rhs)
            } else {
                acc.div(&rhs).map_err(|_| ExprError::DivisionByZero { pos })?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunc, ExprError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.at += 1;
                Ok(self.unary()?.neg())
            }
            Tok::Sym('+') => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc, ExprError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Sym('^') {
            self.at += 1;
            let Tok::Num(e) = self.peek().clone() else {
                return Err(ExprError::Syntax { pos: self.pos(), msg: "exponent must be a nonnegative integer".into() });
            };
            let e: u32 = e
                .try_into()
                .map_err(|_| ExprError::Syntax { pos: self.pos(), msg: "exponent too large".into() })?;
            self.at += 1;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc, ExprError> {
        let n = self.names.len();
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.at += 1;
                Ok(RatFunc::constant(self.k, n, self.k.from_bigint(&v)))
            }
            Tok::Name(s) => {
                self.at += 1;
                if let Some(i) = self.names.iter().position(|x| *x == s) {
                    return Ok(RatFunc::var(self.k, n, i));
                }
                if s == "w" {
                    return match self.k.generator() {
                        Some(g) => Ok(RatFunc::constant(self.k, n, g)),
                        None => Err(ExprError::GeneratorNotAllowed { pos }),
                    };
                }
                Err(ExprError::UnknownVariable { name: s, pos })
            }
            Tok::Sym('(') => {
                self.at += 1;
                let inner = self.expr()?;
                if *self.peek() != Tok::Sym(')') {
                    return Err(self.unexpected());
                }
                self.at += 1;
                Ok(inner)
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses with an explicit list of variable names.
pub fn parse_with_names(src: &str, k: &FieldSpec, names: &[String]) -> Result<RatFunc, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, k, names };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok(out)
}

/// Parses a rational function in `x1..xn`.
pub fn parse_ratfunc(src: &str, k: &FieldSpec, nvars: usize) -> Result<RatFunc, ExprError> {
    parse_with_names(src, k, &Poly::default_names(nvars))
}

/// Alias of [`parse_ratfunc`]; polynomials come back with denominator one.
pub fn parse_expr(src: &str, k: &FieldSpec, nvars: usize) -> Result<RatFunc, ExprError> {
    parse_ratfunc(src, k, nvars)
}

pub fn parse_poly(src: &str, k: &FieldSpec, nvars: usize) -> Result<Poly, ExprError> {
    let r = parse_ratfunc(src, k, nvars)?;
    if !r.is_polynomial() {
        return Err(ExprError::NotPolynomial);
    }
    Ok(r.num().clone())
}

/// Univariate polynomial over `Q` in `var`, as dense coefficients low degree first.
pub fn parse_univariate(src: &str, var: char) -> Result<Vec<BigRational>, ExprError> {
    let q = FieldSpec::rationals();
    let r = parse_with_names(src, &q, &[var.to_string()])?;
    if !r.is_polynomial() {
        return Err(ExprError::NotPolynomial);
    }
    let u = r.num().to_upoly(0);
    Ok(u.coeffs().iter().map(|c| q.to_rational(c).unwrap()).collect())
}

/// Parses one field element (an expression without variables).
pub fn parse_elem(src: &str, k: &FieldSpec) -> Result<crate::field::Elem, ExprError> {
    let r = parse_with_names(src, k, &[])?;
    if !r.is_polynomial() {
        return Err(ExprError::NotPolynomial);
    }
    let p = r.num();
    Ok(if p.is_zero() { k.zero() } else { p.lc() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let q = FieldSpec::rationals();
        let f = parse_poly("x1^2*x2 - 1/2", &q, 2).unwrap();
        assert_eq!(f.len(), 2);
        let s = parse_ratfunc("(x1^2+x2^2)/(x1*x2)", &q, 2).unwrap();
        assert_eq!(s.to_string(), "(x1^2 + x2^2)/(x1*x2)");
        assert_eq!(
            parse_ratfunc("x1 + )", &q, 2).unwrap_err(),
            ExprError::Syntax { pos: 5, msg: "unexpected ')'".into() }
        );
        assert!(matches!(parse_poly("x3", &q, 2), Err(ExprError::UnknownVariable { pos: 0, .. })));
        assert!(matches!(parse_poly("2*w", &q, 1), Err(ExprError::GeneratorNotAllowed { pos: 2 })));
        assert!(matches!(parse_ratfunc("x1/(x2-x2)", &q, 2), Err(ExprError::DivisionByZero { pos: 3 })));
        assert_eq!(parse_poly("-x1^2", &q, 1).unwrap().to_string(), "-x1^2");
    }

    #[test]
    fn number_field_round_trip() {
        let k = FieldSpec::parse("Q[w]/(w^2-3)").unwrap();
        for src in ["(w + 1)*x1^2 - 1/2*w*x2 + 3", "x1/(x2 + w)", "(2*w*x1 - 1)/(x1^2 - 3)"] {
            let f = parse_ratfunc(src, &k, 2).unwrap();
            let again = parse_ratfunc(&f.to_string(), &k, 2).unwrap();
            assert_eq!(f, again, "{src} -> {f}");
        }
        assert_eq!(parse_univariate("w^2 - 3", 'w').unwrap().len(), 3);
    }
}
