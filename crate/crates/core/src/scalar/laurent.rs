//! Laurent polynomials in the deformation variable s, with t = s^m.

use super::gq::Gq;
use super::poly::{Poly, Var};
use super::ratfun::{Scalar, ScalarError};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub fn s_var() -> Var {
    Var::new("s")
}

#[derive(Clone, Debug)]
pub struct LaurentPoly {
    pub m: u32,
    terms: BTreeMap<i64, Scalar>,
}

impl LaurentPoly {
    pub fn zero(m: u32) -> LaurentPoly {
        assert!(m >= 1);
        LaurentPoly { m, terms: BTreeMap::new() }
    }

    pub fn monomial(m: u32, k: i64, c: Scalar) -> LaurentPoly {
        let mut p = LaurentPoly::zero(m);
        if !c.is_zero() {
            p.terms.insert(k, c);
        }
        p
    }

    pub fn constant(m: u32, c: Scalar) -> LaurentPoly {
        LaurentPoly::monomial(m, 0, c)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn add(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            let v = match r.terms.get(k) {
                Some(x) => x.add(c),
                None => c.clone(),
            };
            if v.is_zero() {
                r.terms.remove(k);
            } else {
                r.terms.insert(*k, v);
            }
        }
        r
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly { m: self.m, terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }

    pub fn mul(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = LaurentPoly::zero(self.m);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                r = r.add(&LaurentPoly::monomial(self.m, k1 + k2, c1.mul(c2)));
            }
        }
        r
    }

    /// Split a rational function whose denominator is a power of s (times a constant).
    pub fn from_scalar(x: &Scalar, m: u32) -> Option<LaurentPoly> {
        let s = s_var();
        let mut shift: i64 = 0;
        for (f, e) in x.den_factors() {
            if *f != Poly::var(s) {
                return None;
            }
            shift -= *e as i64;
        }
        let dc = x.den_poly().exact_div(&Poly::var(s).pow((-shift) as u32))?.as_constant()?;
        let mut r = LaurentPoly::zero(m);
        let num = x.num();
        for e in 0..=num.degree_in(s) {
            let c = num.coeff_of(s, e);
            if !c.is_zero() {
                let c = Scalar::from_poly(c.scale(&dc.inv().unwrap()));
                r = r.add(&LaurentPoly::monomial(m, e as i64 + shift, c));
            }
        }
        Some(r)
    }

    pub fn to_scalar(&self) -> Scalar {
        let s = Scalar::from_poly(Poly::var(s_var()));
        let mut acc = Scalar::zero();
        for (k, c) in &self.terms {
            acc = acc.add(&c.mul(&s.pow(*k as i32).unwrap()));
        }
        acc
    }

    pub fn eval_at(&self, s0: &Gq, at: &HashMap<Var, Gq>) -> Result<Gq, ScalarError> {
        let mut acc = Gq::zero();
        let inv = s0.inv();
        for (k, c) in &self.terms {
            let v = c.eval(at)?;
            let p = if *k >= 0 {
                s0.pow(*k as u32)
            } else {
                inv.as_ref().ok_or(ScalarError::PoleAtAssignment("s".into()))?.pow((-k) as u32)
            };
            acc = &acc + &(&v * &p);
        }
        Ok(acc)
    }

    /// Coefficient of s^0, or the most negative exponent as an error.
    pub fn limit_at_zero(&self) -> Result<Scalar, ScalarError> {
        match self.min_exponent() {
            Some(k) if k < 0 => Err(ScalarError::NegativeExponentAtZero(k)),
            _ => Ok(self.terms.get(&0).cloned().unwrap_or_else(Scalar::zero)),
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(k, c)| match *k {
                0 => format!("({})", c),
                1 => format!("({})*s", c),
                _ => format!("({})*s^{}", c, k),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_of_regular_series() {
        let p = LaurentPoly::monomial(1, 2, Scalar::from_int(3)).add(&LaurentPoly::constant(1, Scalar::from_int(5)));
        assert_eq!(p.limit_at_zero().unwrap(), Scalar::from_int(5));
    }

    #[test]
    fn pole_reports_exponent() {
        let p = LaurentPoly::monomial(1, -1, Scalar::one());
        assert_eq!(p.limit_at_zero(), Err(ScalarError::NegativeExponentAtZero(-1)));
    }

    #[test]
    fn scalar_round_trip() {
        let s = Scalar::var("s");
        let x = s.mul(&s).add(&Scalar::from_int(2)).div(&s.mul(&s).mul(&s)).unwrap();
        let l = LaurentPoly::from_scalar(&x, 1).unwrap();
        assert_eq!(l.min_exponent(), Some(-3));
        assert_eq!(l.to_scalar(), x);
    }
}
