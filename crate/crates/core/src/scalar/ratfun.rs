//! Rational functions over Q(i) in named parameters.
//!
//! The denominator is kept as a constant times a product of monic factors.
//! There is no multivariate gcd: cancellation is done by trial division of the
//! numerator by each stored factor, and new denominators are split against a
//! registry of atomic factors (single parameters plus whatever the constraint
//! declarations register, e.g. `alpha - 1`). Zero testing is exact regardless.

use super::gq::Gq;
use super::poly::{Mono, Poly, Var};
use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("division by the zero function")]
    DivisionByZeroFunction,
    #[error("pole at assignment: denominator {0} vanishes")]
    PoleAtAssignment(String),
    #[error("missing parameter {0}")]
    MissingParameter(String),
    #[error("negative exponent at zero: order {0}")]
    NegativeExponentAtZero(i64),
}

fn atoms() -> &'static RwLock<Vec<Poly>> {
    static ATOMS: OnceLock<RwLock<Vec<Poly>>> = OnceLock::new();
    ATOMS.get_or_init(|| RwLock::new(Vec::new()))
}

/// Register a polynomial as an atomic denominator factor (normalised to monic).
pub fn register_atom(p: &Poly) {
    if p.is_constant() || p.is_monomial() {
        return;
    }
    let (_, m) = p.monic();
    let mut w = atoms().write().unwrap();
    if !w.contains(&m) {
        w.push(m);
    }
}

/// Split a nonzero polynomial into constant * product of monic factors.
fn factorize(p: &Poly) -> (Gq, Vec<(Poly, u32)>) {
    let (c, mut p) = p.monic();
    let mut out: Vec<(Poly, u32)> = Vec::new();
    let mc = p.mono_content();
    if !mc.is_one() {
        p = p.exact_div(&Poly::monomial(mc.clone(), Gq::one())).unwrap();
        for &(v, e) in &mc.0 {
            out.push((Poly::var(Var(v)), e));
        }
    }
    if !p.is_constant() {
        let known = atoms().read().unwrap().clone();
        for a in known.iter() {
            let mut e = 0;
            while let Some(q) = p.exact_div(a) {
                p = q;
                e += 1;
                if p.is_constant() {
                    break;
                }
            }
            if e > 0 {
                out.push((a.clone(), e));
            }
            if p.is_constant() {
                break;
            }
        }
    }
    let mut c = c;
    if let Some(k) = p.as_constant() {
        c = &c * &k;
    } else {
        let (k, m) = p.monic();
        c = &c * &k;
        out.push((m, 1));
    }
    (c, out)
}

#[derive(Clone, Debug)]
pub struct Scalar {
    num: Poly,
    dc: Gq,
    den: Vec<(Poly, u32)>,
}

fn merge_factor(list: &mut Vec<(Poly, u32)>, f: &Poly, e: u32) {
    if e == 0 {
        return;
    }
    for item in list.iter_mut() {
        if &item.0 == f {
            item.1 += e;
            return;
        }
    }
    list.push((f.clone(), e));
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { num: Poly::zero(), dc: Gq::one(), den: Vec::new() }
    }

    pub fn one() -> Scalar {
        Scalar::from_int(1)
    }

    pub fn from_int(v: i64) -> Scalar {
        Scalar::from_poly(Poly::from_int(v))
    }

    pub fn from_ratio(p: i64, q: i64) -> Scalar {
        Scalar::constant(Gq::from_ratio(p, q))
    }

    pub fn constant(c: Gq) -> Scalar {
        Scalar::from_poly(Poly::constant(c))
    }

    pub fn i() -> Scalar {
        Scalar::constant(Gq::i())
    }

    pub fn from_poly(p: Poly) -> Scalar {
        Scalar { num: p, dc: Gq::one(), den: Vec::new() }
    }

    pub fn var(name: &str) -> Scalar {
        Scalar::from_poly(Poly::named(name))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn den_poly(&self) -> Poly {
        let mut d = Poly::constant(self.dc.clone());
        for (f, e) in &self.den {
            d = d.mul(&f.pow(*e));
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_constant(&self) -> Option<Gq> {
        if !self.den.is_empty() {
            return None;
        }
        self.num.as_constant().map(|c| &c / &self.dc)
    }

    /// The polynomial value when the denominator is a constant.
    pub fn as_poly(&self) -> Option<Poly> {
        if !self.den.is_empty() {
            return None;
        }
        Some(self.num.scale(&self.dc.inv().unwrap()))
    }

    fn reduce(mut self) -> Scalar {
        if self.num.is_zero() {
            return Scalar::zero();
        }
        for item in self.den.iter_mut() {
            while item.1 > 0 {
                match self.num.exact_div(&item.0) {
                    Some(q) => {
                        self.num = q;
                        item.1 -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
        if self.den.is_empty() && !self.dc.is_one() {
            self.num = self.num.scale(&self.dc.inv().unwrap());
            self.dc = Gq::one();
        }
        self
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        if self.den.is_empty() && o.den.is_empty() {
            return Scalar {
                num: self.num.scale(&o.dc).add(&o.num.scale(&self.dc)),
                dc: &self.dc * &o.dc,
                den: Vec::new(),
            }
            .reduce();
        }
        // lcm of the factor lists by maximum exponent
        let mut lcm: Vec<(Poly, u32)> = self.den.clone();
        for (f, e) in &o.den {
            match lcm.iter_mut().find(|(g, _)| g == f) {
                Some(item) => item.1 = item.1.max(*e),
                None => lcm.push((f.clone(), *e)),
            }
        }
        let cofactor = |den: &Vec<(Poly, u32)>| {
            let mut c = Poly::one();
            for (f, e) in &lcm {
                let have = den.iter().find(|(g, _)| g == f).map(|(_, k)| *k).unwrap_or(0);
                if *e > have {
                    c = c.mul(&f.pow(e - have));
                }
            }
            c
        };
        let a = self.num.mul(&cofactor(&self.den)).scale(&o.dc);
        let b = o.num.mul(&cofactor(&o.den)).scale(&self.dc);
        Scalar { num: a.add(&b), dc: &self.dc * &o.dc, den: lcm }.reduce()
    }

    pub fn neg(&self) -> Scalar {
        Scalar { num: self.num.neg(), dc: self.dc.clone(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        let mut den = self.den.clone();
        for (f, e) in &o.den {
            merge_factor(&mut den, f, *e);
        }
        let r = Scalar { num: self.num.mul(&o.num), dc: &self.dc * &o.dc, den };
        if self.den.is_empty() && o.den.is_empty() {
            r
        } else {
            r.reduce()
        }
    }

    pub fn scale(&self, k: &Gq) -> Scalar {
        if k.is_zero() {
            return Scalar::zero();
        }
        Scalar { num: self.num.scale(k), dc: self.dc.clone(), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZeroFunction);
        }
        let mut num = Poly::constant(self.dc.clone());
        for (f, e) in &self.den {
            num = num.mul(&f.pow(*e));
        }
        if let Some(c) = self.num.as_constant() {
            return Ok(Scalar { num: num.scale(&c.inv().unwrap()), dc: Gq::one(), den: Vec::new() });
        }
        let (c, factors) = factorize(&self.num);
        Ok(Scalar { num, dc: c, den: factors }.reduce())
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<Scalar, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn equals(&self, o: &Scalar) -> bool {
        self.sub(o).is_zero()
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        let mut s = self.num.vars();
        for (f, _) in &self.den {
            s.extend(f.vars());
        }
        s
    }

    pub fn eval(&self, at: &HashMap<Var, Gq>) -> Result<Gq, ScalarError> {
        let n = self.num.eval(at).map_err(|v| ScalarError::MissingParameter(v.name()))?;
        let mut d = self.dc.clone();
        for (f, e) in &self.den {
            let fv = f.eval(at).map_err(|v| ScalarError::MissingParameter(v.name()))?;
            if fv.is_zero() {
                return Err(ScalarError::PoleAtAssignment(f.to_string()));
            }
            d = &d * &fv.pow(*e);
        }
        Ok(&n / &d)
    }

    /// Substitute rational functions for some parameters (simultaneously).
    pub fn substitute(&self, sub: &HashMap<Var, Scalar>) -> Result<Scalar, ScalarError> {
        if sub.is_empty() {
            return Ok(self.clone());
        }
        let num = subst_poly(&self.num, sub);
        let mut den = Scalar::constant(self.dc.clone());
        for (f, e) in &self.den {
            den = den.mul(&subst_poly(f, sub).pow(*e as i32)?);
        }
        num.div(&den)
    }

    /// Partial derivative in a parameter.
    pub fn derivative(&self, v: Var) -> Scalar {
        let n = Scalar::from_poly(self.num.clone());
        let dn = Scalar::from_poly(self.num.derivative(v));
        if self.den.is_empty() {
            return dn.scale(&self.dc.inv().unwrap());
        }
        let d = Scalar::from_poly(self.den_poly());
        let dd = Scalar::from_poly(self.den_poly().derivative(v));
        let top = dn.mul(&d).sub(&n.mul(&dd));
        top.div(&d.mul(&d)).expect("denominator is nonzero")
    }

    /// Value at v = 0 of a function regular there, or the (negative) order of the pole.
    pub fn limit_at_zero(&self, v: Var) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Ok(Scalar::zero());
        }
        let on = self.num.order_in(v) as i64;
        let od: i64 = self.den.iter().map(|(f, e)| f.order_in(v) as i64 * *e as i64).sum();
        let k = on - od;
        if k < 0 {
            return Err(ScalarError::NegativeExponentAtZero(k));
        }
        if k > 0 {
            return Ok(Scalar::zero());
        }
        let top = Scalar::from_poly(self.num.coeff_of(v, on as u32));
        let mut bottom = Scalar::constant(self.dc.clone());
        for (f, e) in &self.den {
            let lc = Scalar::from_poly(f.coeff_of(v, f.order_in(v)));
            bottom = bottom.mul(&lc.pow(*e as i32).unwrap());
        }
        top.div(&bottom)
    }

    /// Order of vanishing along v = 0 (negative for poles).
    pub fn order_in(&self, v: Var) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let on = self.num.order_in(v) as i64;
        let od: i64 = self.den.iter().map(|(f, e)| f.order_in(v) as i64 * *e as i64).sum();
        Some(on - od)
    }

    /// Nonvanishing follows from the declared nonzero factors alone.
    pub fn provably_nonzero(&self, nonzero: &NonZero) -> bool {
        if self.num.is_zero() {
            return false;
        }
        let mut p = self.num.clone();
        let mc = p.mono_content();
        if !mc.is_one() {
            if !mc.0.iter().all(|&(v, _)| nonzero.vars.contains(&Var(v))) {
                return false;
            }
            p = p.exact_div(&Poly::monomial(mc, Gq::one())).unwrap();
        }
        if p.is_constant() {
            return true;
        }
        for a in &nonzero.polys {
            while let Some(q) = p.exact_div(a) {
                p = q;
                if p.is_constant() {
                    return true;
                }
            }
        }
        p.is_constant()
    }
}

fn subst_poly(p: &Poly, sub: &HashMap<Var, Scalar>) -> Scalar {
    let mut acc = Scalar::zero();
    for (m, c) in &p.terms {
        let mut t = Scalar::constant(c.clone());
        let mut keep = Vec::new();
        for &(v, e) in &m.0 {
            match sub.get(&Var(v)) {
                Some(s) => t = t.mul(&s.pow(e as i32).expect("positive power")),
                None => keep.push((v, e)),
            }
        }
        if !keep.is_empty() {
            t = t.mul(&Scalar::from_poly(Poly::monomial(Mono(keep), Gq::one())));
        }
        acc = acc.add(&t);
    }
    acc
}

/// Factors declared nonzero by constraints (parameters and polynomials).
#[derive(Clone, Debug, Default)]
pub struct NonZero {
    pub vars: Vec<Var>,
    pub polys: Vec<Poly>,
}

impl NonZero {
    pub fn none() -> NonZero {
        NonZero::default()
    }

    pub fn from_polys(ps: &[Poly]) -> NonZero {
        let mut nz = NonZero::default();
        for p in ps {
            nz.add(p);
        }
        nz
    }

    pub fn add(&mut self, p: &Poly) {
        if p.is_constant() {
            return;
        }
        // a monomial constraint declares each of its variables nonzero
        if p.is_monomial() {
            for v in p.vars() {
                if !self.vars.contains(&v) {
                    self.vars.push(v);
                }
            }
            return;
        }
        // split off the monomial content, which provably_nonzero strips first
        let mc = p.mono_content();
        let mut p = p.clone();
        if !mc.is_one() {
            for &(v, _) in &mc.0 {
                if !self.vars.contains(&Var(v)) {
                    self.vars.push(Var(v));
                }
            }
            p = p.exact_div(&Poly::monomial(mc, Gq::one())).unwrap();
            if p.is_constant() {
                return;
            }
        }
        register_atom(&p);
        let (_, m) = p.monic();
        if !self.polys.contains(&m) {
            self.polys.push(m);
        }
    }

    pub fn extend(&mut self, o: &NonZero) {
        for v in &o.vars {
            if !self.vars.contains(v) {
                self.vars.push(*v);
            }
        }
        for p in &o.polys {
            if !self.polys.contains(p) {
                self.polys.push(p.clone());
            }
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        self.equals(o)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Scalar {
        Scalar::from_int(v)
    }
}

impl From<Gq> for Scalar {
    fn from(v: Gq) -> Scalar {
        Scalar::constant(v)
    }
}

fn paren_if_sum(p: &Poly) -> String {
    if p.term_count() > 1 {
        format!("({})", p)
    } else {
        format!("{}", p)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            let p = self.num.scale(&self.dc.inv().unwrap());
            return write!(f, "{}", p);
        }
        let mut parts: Vec<String> = Vec::new();
        if !self.dc.is_one() {
            if self.dc.is_compound() || self.dc.is_negative_real() {
                parts.push(format!("({})", self.dc));
            } else {
                parts.push(format!("{}", self.dc));
            }
        }
        let mut factors: Vec<(String, u32)> =
            self.den.iter().map(|(p, e)| (paren_if_sum(p), *e)).collect();
        factors.sort();
        for (s, e) in factors {
            if e == 1 {
                parts.push(s);
            } else {
                parts.push(format!("{}^{}", s, e));
            }
        }
        let den = if parts.len() == 1 { parts.remove(0) } else { format!("({})", parts.join("*")) };
        write!(f, "{}/{}", paren_if_sum(&self.num), den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Scalar {
        Scalar::var("alpha")
    }

    #[test]
    fn formal_cancellation() {
        let r = a().mul(&a().inv().unwrap());
        assert!(r.is_one());
    }

    #[test]
    fn difference_of_squares_reduces() {
        let one = Scalar::one();
        let num = a().mul(&a()).sub(&one);
        let den = a().sub(&one);
        let q = num.div(&den).unwrap();
        assert!(q.is_polynomial());
        assert_eq!(q, a().add(&one));
    }

    #[test]
    fn pole_is_reported() {
        let f = Scalar::one().div(&a().sub(&Scalar::one())).unwrap();
        let mut at = HashMap::new();
        at.insert(Var::new("alpha"), Gq::from_int(1));
        assert!(matches!(f.eval(&at), Err(ScalarError::PoleAtAssignment(_))));
    }

    #[test]
    fn identification_map_fixes_one() {
        let two = Scalar::from_int(2);
        let three = Scalar::from_int(3);
        let f = two.mul(&a()).sub(&Scalar::one()).div(&three.mul(&a()).sub(&two)).unwrap();
        let mut at = HashMap::new();
        at.insert(Var::new("alpha"), Gq::from_int(1));
        assert_eq!(f.eval(&at).unwrap(), Gq::one());
    }

    #[test]
    fn limits_along_s() {
        let s = Scalar::var("s");
        let sv = Var::new("s");
        let f = s.mul(&s).scale(&Gq::from_int(3)).add(&Scalar::from_int(5));
        assert_eq!(f.limit_at_zero(sv).unwrap(), Scalar::from_int(5));
        let g = s.inv().unwrap();
        assert_eq!(g.limit_at_zero(sv), Err(ScalarError::NegativeExponentAtZero(-1)));
        let h = s.add(&s.mul(&s)).div(&s.mul(&Scalar::one().sub(&s))).unwrap();
        assert_eq!(h.limit_at_zero(sv).unwrap(), Scalar::one());
    }

    #[test]
    fn provable_nonzero_under_constraints() {
        let nz = NonZero::from_polys(&[Poly::named("x"), Poly::named("alpha").sub(&Poly::one())]);
        let e = Scalar::var("x").mul(&a().sub(&Scalar::one())).scale(&Gq::from_int(3));
        assert!(e.provably_nonzero(&nz));
        assert!(!a().provably_nonzero(&nz));
    }
}
