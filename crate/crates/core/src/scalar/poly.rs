//! Sparse multivariate polynomials over Q(i) in named parameters.

use super::gq::Gq;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

/// Interned parameter name.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(pub u32);

struct Interner {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        // Pre-intern the usual names so that ids (and hence the lex order used
        // for normalising denominators) do not depend on parse order.
        let mut it = Interner { names: Vec::new(), ids: HashMap::new() };
        let mut common: Vec<String> = ["s", "t", "E", "alpha", "beta", "lambda", "mu"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        common.extend((1..=9).map(|k| format!("mu{k}")));
        common.extend((1..=9).map(|k| format!("a{k}")));
        common.extend(["k", "l", "q", "r", "u", "v", "w", "x", "y", "z"].iter().map(|s| s.to_string()));
        for name in common {
            let id = it.names.len() as u32;
            it.ids.insert(name.clone(), id);
            it.names.push(name);
        }
        RwLock::new(it)
    })
}

impl Var {
    pub fn new(name: &str) -> Var {
        if let Some(&id) = interner().read().unwrap().ids.get(name) {
            return Var(id);
        }
        let mut w = interner().write().unwrap();
        if let Some(&id) = w.ids.get(name) {
            return Var(id);
        }
        let id = w.names.len() as u32;
        w.ids.insert(name.to_string(), id);
        w.names.push(name.to_string());
        Var(id)
    }

    pub fn name(&self) -> String {
        interner().read().unwrap().names[self.0 as usize].clone()
    }
}

/// Exponent vector stored sparsely as (var id, exponent) sorted by id, exponents > 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono(pub Vec<(u32, u32)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(v.0, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exp_of(&self, v: u32) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map(|&(_, e)| e).unwrap_or(0)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    /// self / o if o divides self.
    pub fn div(&self, o: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < o.0.len() && o.0[j].0 < v {
                return None;
            }
            if j < o.0.len() && o.0[j].0 == v {
                let f = o.0[j].1;
                j += 1;
                if f > e {
                    return None;
                }
                if e > f {
                    out.push((v, e - f));
                }
            } else {
                out.push((v, e));
            }
        }
        if j < o.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    /// Componentwise minimum.
    pub fn gcd(&self, o: &Mono) -> Mono {
        let mut out = Vec::new();
        for &(v, e) in &self.0 {
            let f = o.exp_of(v);
            if f > 0 {
                out.push((v, e.min(f)));
            }
        }
        Mono(out)
    }

    /// Pure lexicographic order on dense exponent vectors (smaller var id is more significant).
    pub fn lex_cmp(&self, o: &Mono) -> Ordering {
        let (a, b) = (&self.0, &o.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va < vb {
                        return Ordering::Greater;
                    }
                    if vb < va {
                        return Ordering::Less;
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }

    fn named(&self) -> Vec<(String, u32)> {
        let mut v: Vec<(String, u32)> = self.0.iter().map(|&(id, e)| (Var(id).name(), e)).collect();
        v.sort();
        v
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Gq>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Gq) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn from_int(v: i64) -> Poly {
        Poly::constant(Gq::from_int(v))
    }

    pub fn one() -> Poly {
        Poly::from_int(1)
    }

    pub fn var(v: Var) -> Poly {
        Poly::monomial(Mono::var(v, 1), Gq::one())
    }

    pub fn named(name: &str) -> Poly {
        Poly::var(Var::new(name))
    }

    pub fn monomial(m: Mono, c: Gq) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Gq> {
        match self.terms.len() {
            0 => Some(Gq::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    fn add_term(&mut self, m: Mono, c: Gq) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                let s = &*x + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), -c);
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, k: &Gq) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly { terms: self.terms.iter().map(|(n, c)| (n.mul(m), c.clone())).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return o.scale(&c);
        }
        if let Some(c) = o.as_constant() {
            return self.scale(&c);
        }
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Leading term under pure lex.
    pub fn leading(&self) -> Option<(&Mono, &Gq)> {
        let mut best: Option<(&Mono, &Gq)> = None;
        for (m, c) in &self.terms {
            best = match best {
                None => Some((m, c)),
                Some((bm, bc)) => {
                    if m.lex_cmp(bm) == Ordering::Greater {
                        Some((m, c))
                    } else {
                        Some((bm, bc))
                    }
                }
            };
        }
        best
    }

    pub fn leading_coeff(&self) -> Gq {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Gq::zero)
    }

    /// Exact quotient self / d, or None when d does not divide self.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.inv()?));
        }
        let (dm, dc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let dci = dc.inv()?;
        if d.terms.len() == 1 {
            let mut q = Poly::zero();
            for (m, c) in &self.terms {
                q.terms.insert(m.div(&dm)?, c * &dci);
            }
            return Some(q);
        }
        let mut r = self.clone();
        let mut q = Poly::zero();
        let mut guard = 0usize;
        while !r.is_zero() {
            guard += 1;
            if guard > 100_000 {
                return None;
            }
            let (rm, rc) = r.leading().map(|(m, c)| (m.clone(), c.clone()))?;
            let qm = rm.div(&dm)?;
            let qc = &rc * &dci;
            r = r.sub(&d.mul_mono(&qm).scale(&qc));
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Largest monomial dividing every term.
    pub fn mono_content(&self) -> Mono {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return Mono::one(),
        };
        it.fold(first, |acc, m| acc.gcd(m))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            for &(v, _) in &m.0 {
                s.insert(Var(v));
            }
        }
        s
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp_of(v.0)).max().unwrap_or(0)
    }

    /// Smallest exponent of v over the terms (the order of vanishing along v = 0).
    pub fn order_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp_of(v.0)).min().unwrap_or(0)
    }

    /// Coefficient of v^e, as a polynomial in the remaining variables.
    pub fn coeff_of(&self, v: Var, e: u32) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.terms {
            if m.exp_of(v.0) == e {
                let rest = Mono(m.0.iter().copied().filter(|&(w, _)| w != v.0).collect());
                r.add_term(rest, c.clone());
            }
        }
        r
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp_of(v.0);
            if e == 0 {
                continue;
            }
            let rest: Vec<(u32, u32)> = m
                .0
                .iter()
                .filter_map(|&(w, f)| {
                    if w == v.0 {
                        if f > 1 {
                            Some((w, f - 1))
                        } else {
                            None
                        }
                    } else {
                        Some((w, f))
                    }
                })
                .collect();
            r.add_term(Mono(rest), c * &Gq::from_int(e as i64));
        }
        r
    }

    /// Evaluate at a full assignment; Err(var) names the first missing parameter.
    pub fn eval(&self, at: &HashMap<Var, Gq>) -> Result<Gq, Var> {
        let mut acc = Gq::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let x = at.get(&Var(v)).ok_or(Var(v))?;
                t = &t * &x.pow(e);
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Substitute polynomials for some variables; others are kept.
    pub fn compose(&self, sub: &HashMap<Var, Poly>) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            let mut keep = Vec::new();
            for &(v, e) in &m.0 {
                match sub.get(&Var(v)) {
                    Some(p) => t = t.mul(&p.pow(e)),
                    None => keep.push((v, e)),
                }
            }
            r = r.add(&t.mul_mono(&Mono(keep)));
        }
        r
    }

    /// Make the lex-leading coefficient 1; returns (constant, monic part).
    pub fn monic(&self) -> (Gq, Poly) {
        let lc = self.leading_coeff();
        if lc.is_zero() {
            return (Gq::zero(), Poly::zero());
        }
        let inv = lc.inv().unwrap();
        (lc, self.scale(&inv))
    }

    /// Terms in a stable, name-based order: higher total degree first, then by names.
    pub fn sorted_terms(&self) -> Vec<(Vec<(String, u32)>, Gq)> {
        let mut v: Vec<(Vec<(String, u32)>, u32, Gq)> =
            self.terms.iter().map(|(m, c)| (m.named(), m.degree(), c.clone())).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v.into_iter().map(|(m, _, c)| (m, c)).collect()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }
}

fn fmt_mono(m: &[(String, u32)]) -> String {
    m.iter()
        .map(|(n, e)| if *e == 1 { n.clone() } else { format!("{}^{}", n, e) })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.sorted_terms() {
            let neg = c.is_negative_real();
            let mag = if neg { -c.clone() } else { c.clone() };
            let body = if m.is_empty() {
                if mag.is_compound() && !mag.is_real() {
                    format!("({})", mag)
                } else {
                    format!("{}", mag)
                }
            } else if mag.is_one() {
                fmt_mono(&m)
            } else if mag.is_real() {
                format!("{}*{}", mag, fmt_mono(&m))
            } else {
                format!("({})*{}", mag, fmt_mono(&m))
            };
            if first {
                if neg {
                    write!(f, "-{}", body)?;
                } else {
                    write!(f, "{}", body)?;
                }
                first = false;
            } else if neg {
                write!(f, " - {}", body)?;
            } else {
                write!(f, " + {}", body)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Poly {
        Poly::named("alpha")
    }

    #[test]
    fn exact_division_of_difference_of_squares() {
        let num = a().mul(&a()).sub(&Poly::one());
        let den = a().sub(&Poly::one());
        let q = num.exact_div(&den).unwrap();
        assert_eq!(q, a().add(&Poly::one()));
        assert!(num.exact_div(&a()).is_none());
    }

    #[test]
    fn multivariate_division() {
        let x = Poly::named("x");
        let y = Poly::named("y");
        let f = x.add(&y);
        let g = x.sub(&y);
        let prod = f.mul(&g).mul(&x);
        assert_eq!(prod.exact_div(&g).unwrap(), f.mul(&x));
        assert!(prod.exact_div(&y).is_none());
    }

    #[test]
    fn derivative_and_eval() {
        let p = a().pow(3).add(&a().scale(&Gq::from_int(2)));
        let d = p.derivative(Var::new("alpha"));
        let mut at = HashMap::new();
        at.insert(Var::new("alpha"), Gq::from_int(2));
        assert_eq!(d.eval(&at).unwrap(), Gq::from_int(14));
    }

    #[test]
    fn display_is_stable() {
        let p = a().pow(2).sub(&Poly::named("beta")).add(&Poly::from_int(3));
        assert_eq!(p.to_string(), "alpha^2 - beta + 3");
    }
}
