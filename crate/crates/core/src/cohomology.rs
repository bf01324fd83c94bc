//! Cocycles, coboundaries and second cohomology with trivial coefficients.

use crate::algebra::{Algebra, AlgebraError, Subspace};
use crate::linalg::{self, LinalgError, Pivoting};
use crate::scalar::{parse_combination, ParseError, Scalar};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CohomologyError {
    #[error("not a cocycle: {0}")]
    NotACocycle(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl From<LinalgError> for CohomologyError {
    fn from(e: LinalgError) -> Self {
        CohomologyError::Algebra(AlgebraError::Linalg(e))
    }
}

/// θ = Σ m[i][j] Δ_ij, stored row-major.
#[derive(Clone, Debug)]
pub struct BilinearForm {
    pub n: usize,
    pub m: Vec<Scalar>,
}

impl PartialEq for BilinearForm {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.m.iter().zip(o.m.iter()).all(|(a, b)| a.equals(b))
    }
}

impl BilinearForm {
    pub fn zero(n: usize) -> BilinearForm {
        BilinearForm { n, m: vec![Scalar::zero(); n * n] }
    }

    /// Δ_ij with 1-based indices.
    pub fn delta(n: usize, i: usize, j: usize) -> BilinearForm {
        let mut f = BilinearForm::zero(n);
        f.m[(i - 1) * n + (j - 1)] = Scalar::one();
        f
    }

    pub fn from_flat(n: usize, m: Vec<Scalar>) -> BilinearForm {
        BilinearForm { n, m }
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.m[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &BilinearForm) -> BilinearForm {
        BilinearForm { n: self.n, m: self.m.iter().zip(o.m.iter()).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &BilinearForm) -> BilinearForm {
        BilinearForm { n: self.n, m: self.m.iter().zip(o.m.iter()).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, k: &Scalar) -> BilinearForm {
        BilinearForm { n: self.n, m: self.m.iter().map(|a| a.mul(k)).collect() }
    }

    pub fn eval(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let n = self.n;
        let mut acc = Scalar::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                let c = &self.m[i * n + j];
                if c.is_zero() || y[j].is_zero() {
                    continue;
                }
                acc = acc.add(&x[i].mul(&y[j]).mul(c));
            }
        }
        acc
    }

    /// Parse "D13 - 2*D21 + alpha*D42" (digits are 1-based indices).
    pub fn parse(n: usize, src: &str) -> Result<BilinearForm, ParseError> {
        let is_atom = |s: &str| parse_delta_name(s).is_some();
        let atoms = parse_combination(src, &is_atom, &|_| None)?;
        let mut f = BilinearForm::zero(n);
        for (name, c) in atoms {
            let (i, j) = parse_delta_name(&name).unwrap();
            if i == 0 || j == 0 || i > n || j > n {
                return Err(ParseError::Eval(format!("{} out of range for dimension {}", name, n)));
            }
            let id = (i - 1) * n + (j - 1);
            f.m[id] = f.m[id].add(&c);
        }
        Ok(f)
    }
}

fn parse_delta_name(s: &str) -> Option<(usize, usize)> {
    let d = s.strip_prefix('D')?;
    let b = d.as_bytes();
    if b.len() != 2 || !b.iter().all(|c| c.is_ascii_digit()) {
        return None;
    }
    Some(((b[0] - b'0') as usize, (b[1] - b'0') as usize))
}

impl fmt::Display for BilinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let c = self.get(i, j);
                if c.is_zero() {
                    continue;
                }
                let d = format!("D{}{}", i + 1, j + 1);
                parts.push(if c.is_one() { d } else { format!("({})*{}", c, d) });
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn var_index(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

/// Rows of the linear system θ(xy,z) = θ(xz,y) + θ(x,yz) in the n² unknowns.
fn cocycle_rows(a: &Algebra) -> Vec<Vec<Scalar>> {
    let n = a.n;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut row = vec![Scalar::zero(); n * n];
                for l in 0..n {
                    let c1 = a.get(i, j, l);
                    if !c1.is_zero() {
                        let id = var_index(n, l, k);
                        row[id] = row[id].add(c1);
                    }
                    let c2 = a.get(i, k, l);
                    if !c2.is_zero() {
                        let id = var_index(n, l, j);
                        row[id] = row[id].sub(c2);
                    }
                    let c3 = a.get(j, k, l);
                    if !c3.is_zero() {
                        let id = var_index(n, i, l);
                        row[id] = row[id].sub(c3);
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// Rows of θ(x,yz) = θ(xy,z) + θ(y,xz).
fn symmetric_rows(a: &Algebra) -> Vec<Vec<Scalar>> {
    let n = a.n;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut row = vec![Scalar::zero(); n * n];
                for l in 0..n {
                    let c1 = a.get(j, k, l);
                    if !c1.is_zero() {
                        let id = var_index(n, i, l);
                        row[id] = row[id].add(c1);
                    }
                    let c2 = a.get(i, j, l);
                    if !c2.is_zero() {
                        let id = var_index(n, l, k);
                        row[id] = row[id].sub(c2);
                    }
                    let c3 = a.get(i, k, l);
                    if !c3.is_zero() {
                        let id = var_index(n, j, l);
                        row[id] = row[id].sub(c3);
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

fn forms_of(n: usize, vs: Vec<Vec<Scalar>>) -> Vec<BilinearForm> {
    vs.into_iter().map(|v| BilinearForm::from_flat(n, v)).collect()
}

/// Basis of Z², echelonised in the flattened (i,j) order.
pub fn cocycle_space(a: &Algebra) -> Result<Vec<BilinearForm>, CohomologyError> {
    let n = a.n;
    let ns = linalg::nullspace(cocycle_rows(a), n * n, &a.pivoting())?;
    let e = linalg::rref(ns, n * n, &a.pivoting())?;
    Ok(forms_of(n, e.rows))
}

pub fn is_cocycle(a: &Algebra, f: &BilinearForm) -> bool {
    cocycle_rows(a).iter().all(|row| {
        row.iter().zip(f.m.iter()).fold(Scalar::zero(), |acc, (x, y)| if x.is_zero() || y.is_zero() { acc } else { acc.add(&x.mul(y)) }).is_zero()
    })
}

/// δ(e_k*) for every k: the form (i,j) ↦ c_ij^k. Not reduced.
pub fn coboundary_generators(a: &Algebra) -> Vec<BilinearForm> {
    let n = a.n;
    (0..n)
        .map(|k| {
            let mut f = BilinearForm::zero(n);
            for i in 0..n {
                for j in 0..n {
                    f.m[i * n + j] = a.get(i, j, k).clone();
                }
            }
            f
        })
        .collect()
}

/// Basis of B² (dimension equals dim A²).
pub fn coboundary_space(a: &Algebra) -> Result<Vec<BilinearForm>, CohomologyError> {
    let n = a.n;
    let gens: Vec<Vec<Scalar>> = coboundary_generators(a).into_iter().map(|f| f.m).collect();
    let e = linalg::rref(gens, n * n, &a.pivoting())?;
    Ok(forms_of(n, e.rows))
}

#[derive(Clone, Debug)]
pub struct Cohomology {
    pub z2: Vec<BilinearForm>,
    pub b2: Vec<BilinearForm>,
    /// Representatives of a complement of B² in Z².
    pub h2: Vec<BilinearForm>,
}

impl Cohomology {
    pub fn dim_h2(&self) -> usize {
        self.h2.len()
    }
}

fn grow_complement(base: &[BilinearForm], cands: &[BilinearForm], piv: &Pivoting) -> Result<Vec<BilinearForm>, CohomologyError> {
    let nn = cands.first().map(|f| f.m.len()).or(base.first().map(|f| f.m.len())).unwrap_or(0);
    let mut cur: Vec<Vec<Scalar>> = base.iter().map(|f| f.m.clone()).collect();
    let mut r = linalg::rank(cur.clone(), nn, piv)?;
    let mut out = Vec::new();
    for c in cands {
        let mut t = cur.clone();
        t.push(c.m.clone());
        let r2 = linalg::rank(t.clone(), nn, piv)?;
        if r2 > r {
            cur = t;
            r = r2;
            out.push(c.clone());
        }
    }
    Ok(out)
}

pub fn cohomology_basis(a: &Algebra) -> Result<Cohomology, CohomologyError> {
    let z2 = cocycle_space(a)?;
    let b2 = coboundary_space(a)?;
    let h2 = grow_complement(&b2, &z2, &a.pivoting())?;
    Ok(Cohomology { z2, b2, h2 })
}

pub fn same_class(a: &Algebra, t: &BilinearForm, u: &BilinearForm) -> Result<bool, CohomologyError> {
    for f in [t, u] {
        if !is_cocycle(a, f) {
            return Err(CohomologyError::NotACocycle(f.to_string()));
        }
    }
    let d = t.sub(u);
    if d.is_zero() {
        return Ok(true);
    }
    let b2: Vec<Vec<Scalar>> = coboundary_space(a)?.into_iter().map(|f| f.m).collect();
    Ok(linalg::express_in_span(&b2, &d.m, &a.pivoting())?.is_some())
}

/// Z²_S = Z² ∩ {θ(x,yz) = θ(xy,z) + θ(y,xz)}.
pub fn symmetric_cocycle_space(a: &Algebra) -> Result<Vec<BilinearForm>, CohomologyError> {
    let n = a.n;
    let mut rows = cocycle_rows(a);
    rows.extend(symmetric_rows(a));
    let ns = linalg::nullspace(rows, n * n, &a.pivoting())?;
    let e = linalg::rref(ns, n * n, &a.pivoting())?;
    Ok(forms_of(n, e.rows))
}

pub fn symmetric_h2_dim(a: &Algebra) -> Result<usize, CohomologyError> {
    Ok(symmetric_cocycle_space(a)?.len() - coboundary_space(a)?.len())
}

/// Common kernel {x : θ(x,A) + θ(A,x) = 0} of the forms.
pub fn cocycle_annihilator(a: &Algebra, forms: &[BilinearForm]) -> Result<Subspace, CohomologyError> {
    let n = a.n;
    let mut rows = Vec::new();
    for f in forms {
        for j in 0..n {
            rows.push((0..n).map(|i| f.get(i, j).clone()).collect::<Vec<_>>());
            rows.push((0..n).map(|i| f.get(j, i).clone()).collect::<Vec<_>>());
        }
    }
    let piv = a.pivoting();
    let ns = linalg::nullspace(rows, n, &piv)?;
    Ok(Subspace::span(n, ns, &piv)?)
}

#[derive(Clone, Debug)]
pub struct TsReport {
    /// A nonzero vector of Ann(W) ∩ Ann(A), if any.
    pub violation: Option<Vec<Scalar>>,
    /// Whether the classes are independent modulo B².
    pub independent: bool,
}

impl TsReport {
    pub fn in_ts(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn ts_membership(a: &Algebra, w: &[BilinearForm]) -> Result<TsReport, CohomologyError> {
    let piv = a.pivoting();
    let ann_w = cocycle_annihilator(a, w)?;
    let ann_a = a.annihilator()?;
    let meet = ann_w.intersect(&ann_a, &piv)?;
    let violation = meet.rows.first().cloned();
    let b2 = coboundary_space(a)?;
    let added = grow_complement(&b2, w, &piv)?;
    Ok(TsReport { violation, independent: added.len() == w.len() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetricSplit {
    R,
    U,
}

/// R_s when every form lies in Z²_S, otherwise U_s.
pub fn rs_us_classify(s: &Algebra, w: &[BilinearForm]) -> Result<SymmetricSplit, CohomologyError> {
    let zs: Vec<Vec<Scalar>> = symmetric_cocycle_space(s)?.into_iter().map(|f| f.m).collect();
    for f in w {
        if linalg::express_in_span(&zs, &f.m, &s.pivoting())?.is_none() {
            return Ok(SymmetricSplit::U);
        }
    }
    Ok(SymmetricSplit::R)
}

#[derive(Clone, Debug)]
pub struct TableCheck {
    pub computed_dim: usize,
    pub listed: usize,
    pub all_cocycles: bool,
    pub independent: bool,
}

impl TableCheck {
    pub fn ok(&self, expected: usize) -> bool {
        self.computed_dim == expected && self.listed == expected && self.all_cocycles && self.independent
    }
}

/// Listed representatives are cocycles, independent modulo B² and (when the
/// count equals dim H²) therefore span a complement.
pub fn check_h2_table(a: &Algebra, listed: &[BilinearForm]) -> Result<TableCheck, CohomologyError> {
    let coh = cohomology_basis(a)?;
    let all_cocycles = listed.iter().all(|f| is_cocycle(a, f));
    let added = grow_complement(&coh.b2, listed, &a.pivoting())?;
    Ok(TableCheck { computed_dim: coh.dim_h2(), listed: listed.len(), all_cocycles, independent: added.len() == listed.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::unit;

    fn int(k: i64) -> Scalar {
        Scalar::from_int(k)
    }

    fn n01() -> Algebra {
        Algebra::from_products(3, &[(1, 1, 2, int(1))])
    }

    #[test]
    fn dimensions_for_small_algebras() {
        let c = cohomology_basis(&n01()).unwrap();
        assert_eq!((c.z2.len(), c.b2.len(), c.dim_h2()), (5, 1, 4));
        let z = Algebra::zero(3);
        assert_eq!(cocycle_space(&z).unwrap().len(), 9);
        assert_eq!(coboundary_space(&z).unwrap().len(), 0);
        let l13 = Algebra::from_products(4, &[(1, 1, 2, int(1)), (2, 1, 3, int(1)), (3, 1, 4, int(1))]);
        let c = cohomology_basis(&l13).unwrap();
        assert_eq!(c.z2.len() - c.b2.len(), 1);
    }

    #[test]
    fn classes_in_n01() {
        let a = n01();
        let d11 = BilinearForm::delta(3, 1, 1);
        let d21 = BilinearForm::delta(3, 2, 1);
        let z = BilinearForm::zero(3);
        assert!(same_class(&a, &d11, &z).unwrap());
        assert!(!same_class(&a, &d21, &z).unwrap());
        assert!(same_class(&a, &d21, &d21).unwrap());
    }

    #[test]
    fn cocycle_annihilators() {
        let z = Algebra::zero(3);
        // two-sided: D21 pairs e2 on the left and e1 on the right, so only e3 survives
        let ann = cocycle_annihilator(&z, &[BilinearForm::delta(3, 2, 1)]).unwrap();
        assert_eq!(ann.rows, vec![unit(3, 2)]);
        let ann = cocycle_annihilator(&n01(), &[BilinearForm::delta(3, 2, 1), BilinearForm::delta(3, 3, 1)]).unwrap();
        assert_eq!(ann.dim(), 0);
        let ann = cocycle_annihilator(&n01(), &[BilinearForm::delta(3, 2, 1), BilinearForm::delta(3, 1, 3)]).unwrap();
        assert_eq!(ann.dim(), 0);
        let ann = cocycle_annihilator(&n01(), &[BilinearForm::delta(3, 1, 2)]).unwrap();
        assert_eq!(ann.rows, vec![unit(3, 2)]);
        assert_eq!(cocycle_annihilator(&z, &[BilinearForm::zero(3)]).unwrap().dim(), 3);
    }

    #[test]
    fn ts_in_n01() {
        let a = n01();
        let w = [BilinearForm::delta(3, 2, 1), BilinearForm::delta(3, 3, 1)];
        assert!(ts_membership(&a, &w).unwrap().in_ts());
        let r = ts_membership(&a, &w[..1]).unwrap();
        assert_eq!(r.violation, Some(unit(3, 2)));
        assert!(!ts_membership(&a, &[BilinearForm::zero(3)]).unwrap().in_ts());
        assert_eq!(rs_us_classify(&a, &w).unwrap(), SymmetricSplit::U);
    }

    #[test]
    fn form_parsing() {
        let f = BilinearForm::parse(4, "alpha*D31 + D42 - D42/2").unwrap();
        assert_eq!(f.get(3, 1), &Scalar::from_ratio(1, 2));
        assert!(BilinearForm::parse(3, "D44").is_err());
    }
}
