//! Expression grammar shared by every data file.
//!
//! Expressions are sums of products of integers, `i`, identifiers, powers with
//! integer exponents and parenthesised subexpressions. Evaluation produces a
//! linear combination of "atoms" (basis vectors e3, forms D13, nabla names N2,
//! structure constants c12_3, ...) with rational-function coefficients; what
//! counts as an atom is decided by the caller.

use super::gq::Gq;
use super::poly::Poly;
use super::ratfun::{Scalar, ScalarError};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("{0}")]
    Eval(String),
}

impl From<ScalarError> for ParseError {
    fn from(e: ScalarError) -> Self {
        ParseError::Eval(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[st..i].iter().collect();
            out.push((Tok::Int(s.parse().unwrap()), st + 1));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[st..i].iter().collect()), st + 1));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i + 1));
            i += 1;
        } else {
            return Err(ParseError::Syntax { col: i + 1, msg: format!("unexpected character '{}'", c) });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax { col: self.col(), msg: msg.to_string() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let paren = self.eat('(');
            let neg = self.eat('-');
            let k = match self.peek() {
                Some(Tok::Int(k)) => {
                    let k: i64 = k.try_into().map_err(|_| ParseError::Syntax { col: self.col(), msg: "exponent too large".into() })?;
                    self.pos += 1;
                    k
                }
                _ => return self.err("expected integer exponent"),
            };
            if paren && !self.eat(')') {
                return self.err("expected ')'");
            }
            return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                self.pos += 1;
                Ok(Expr::Int(k))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Ident(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of expression"),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len() + 1 };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// A linear combination of atoms plus a scalar part.
#[derive(Clone, Debug, Default)]
pub struct Lin {
    pub scalar: Option<Scalar>,
    pub atoms: BTreeMap<String, Scalar>,
}

impl Lin {
    pub fn scalar(x: Scalar) -> Lin {
        Lin { scalar: Some(x), atoms: BTreeMap::new() }
    }

    pub fn atom(name: &str) -> Lin {
        let mut atoms = BTreeMap::new();
        atoms.insert(name.to_string(), Scalar::one());
        Lin { scalar: None, atoms }
    }

    fn as_scalar(&self) -> Option<Scalar> {
        if self.atoms.is_empty() {
            Some(self.scalar.clone().unwrap_or_else(Scalar::zero))
        } else {
            None
        }
    }

    fn add(mut self, o: Lin) -> Lin {
        self.scalar = match (self.scalar, o.scalar) {
            (Some(a), Some(b)) => Some(a.add(&b)),
            (a, None) => a,
            (None, b) => b,
        };
        for (k, v) in o.atoms {
            let nv = match self.atoms.get(&k) {
                Some(x) => x.add(&v),
                None => v,
            };
            self.atoms.insert(k, nv);
        }
        self
    }

    fn scale(self, k: &Scalar) -> Lin {
        Lin {
            scalar: self.scalar.map(|s| s.mul(k)),
            atoms: self.atoms.into_iter().map(|(n, v)| (n, v.mul(k))).collect(),
        }
    }

    /// Drop atoms whose coefficient cancelled.
    pub fn cleaned(mut self) -> Lin {
        self.atoms.retain(|_, v| !v.is_zero());
        self
    }
}

/// Resolver for identifiers: return Some to override, None for a plain parameter.
pub type Resolver<'a> = &'a dyn Fn(&str) -> Option<Lin>;

pub fn eval_lin(e: &Expr, resolve: Resolver) -> Result<Lin, ParseError> {
    Ok(match e {
        Expr::Int(k) => Lin::scalar(Scalar::constant(Gq::from_rational(BigRational::from_integer(k.clone())))),
        Expr::Ident(name) => {
            if let Some(v) = resolve(name) {
                v
            } else if name == "i" {
                Lin::scalar(Scalar::i())
            } else {
                Lin::scalar(Scalar::from_poly(Poly::named(name)))
            }
        }
        Expr::Neg(a) => eval_lin(a, resolve)?.scale(&Scalar::from_int(-1)),
        Expr::Add(a, b) => eval_lin(a, resolve)?.add(eval_lin(b, resolve)?),
        Expr::Sub(a, b) => eval_lin(a, resolve)?.add(eval_lin(b, resolve)?.scale(&Scalar::from_int(-1))),
        Expr::Mul(a, b) => {
            let x = eval_lin(a, resolve)?;
            let y = eval_lin(b, resolve)?;
            match (x.as_scalar(), y.as_scalar()) {
                (Some(k), _) => y.scale(&k),
                (None, Some(k)) => x.scale(&k),
                _ => return Err(ParseError::Eval("product of two non-scalar terms".into())),
            }
        }
        Expr::Div(a, b) => {
            let x = eval_lin(a, resolve)?;
            let y = eval_lin(b, resolve)?
                .as_scalar()
                .ok_or_else(|| ParseError::Eval("division by a non-scalar term".into()))?;
            x.scale(&Scalar::one().div(&y)?)
        }
        Expr::Pow(a, k) => {
            let x = eval_lin(a, resolve)?
                .as_scalar()
                .ok_or_else(|| ParseError::Eval("power of a non-scalar term".into()))?;
            Lin::scalar(x.pow(*k as i32)?)
        }
    })
}

/// Parse a plain scalar expression; every identifier other than `i` is a parameter.
pub fn parse_scalar(src: &str) -> Result<Scalar, ParseError> {
    parse_scalar_with(src, &|_| None)
}

pub fn parse_scalar_with(src: &str, resolve: Resolver) -> Result<Scalar, ParseError> {
    let e = parse_expr(src)?;
    let l = eval_lin(&e, resolve)?;
    l.as_scalar().ok_or_else(|| ParseError::Eval(format!("expected a scalar in '{}'", src)))
}

/// Parse a linear combination of atoms recognised by `is_atom`; a nonzero scalar part is an error.
pub fn parse_combination(
    src: &str,
    is_atom: &dyn Fn(&str) -> bool,
    resolve: Resolver,
) -> Result<BTreeMap<String, Scalar>, ParseError> {
    let e = parse_expr(src)?;
    let wrapped = |name: &str| {
        if is_atom(name) {
            Some(Lin::atom(name))
        } else {
            resolve(name)
        }
    };
    let l = eval_lin(&e, &wrapped)?.cleaned();
    if let Some(s) = &l.scalar {
        if !s.is_zero() {
            return Err(ParseError::Eval(format!("stray scalar term in '{}'", src)));
        }
    }
    Ok(l.atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_and_powers() {
        let x = parse_scalar("3/2*alpha^2 - (alpha - 1)/(alpha - 1)").unwrap();
        let y = parse_scalar("3*alpha^2/2 - 1").unwrap();
        assert_eq!(x, y);
        assert_eq!(parse_scalar("i^2").unwrap(), Scalar::from_int(-1));
        assert_eq!(parse_scalar("s^-2*s^(2)").unwrap(), Scalar::one());
    }

    #[test]
    fn combinations() {
        let atom = |n: &str| n.starts_with('e') && n[1..].parse::<usize>().is_ok();
        let c = parse_combination("s^-1*e1 - 2*e3 + e1/s", &atom, &|_| None).unwrap();
        assert_eq!(c["e1"], parse_scalar("2/s").unwrap());
        assert_eq!(c["e3"], Scalar::from_int(-2));
        assert!(parse_combination("e1*e2", &atom, &|_| None).is_err());
    }

    #[test]
    fn errors_carry_columns() {
        match parse_expr("1 + $") {
            Err(ParseError::Syntax { col, .. }) => assert_eq!(col, 5),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn display_reparses() {
        let x = parse_scalar("(alpha^2 + 1)/(2*alpha - 2) + i*beta").unwrap();
        assert_eq!(parse_scalar(&x.to_string()).unwrap(), x);
    }
}
