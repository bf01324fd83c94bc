//! Structure-constant algebras: products, Leibniz identities, annihilators,
//! the lower central series and changes of basis.

use crate::linalg::{self, LinalgError, Matrix, Pivoting};
use crate::scalar::{Gq, NonZero, Poly, Scalar, ScalarError, Var};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular matrix")]
    SingularMatrix,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug)]
pub struct Algebra {
    pub name: String,
    pub n: usize,
    /// c[(i*n + j)*n + k] is the coefficient of e_k in e_i e_j (0-based).
    pub c: Vec<Scalar>,
    pub params: Vec<Var>,
    /// Polynomials declared nonzero.
    pub constraints: Vec<Poly>,
}

/// A basis triple (1-based) where an identity fails, with the residual vector.
#[derive(Clone, Debug)]
pub struct IdentityFailure {
    pub triple: (usize, usize, usize),
    pub residual: Vec<Scalar>,
}

impl fmt::Display for IdentityFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j, k) = self.triple;
        write!(f, "({},{},{}) residual {}", i, j, k, fmt_vector(&self.residual))
    }
}

pub fn fmt_vector(v: &[Scalar]) -> String {
    let parts: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(k, x)| format!("({})*e{}", x, k + 1))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

pub fn unit(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[i] = Scalar::one();
    v
}

impl Algebra {
    pub fn zero(n: usize) -> Algebra {
        Algebra { name: String::new(), n, c: vec![Scalar::zero(); n * n * n], params: Vec::new(), constraints: Vec::new() }
    }

    /// Build from 1-based (i, j, k, coefficient) entries.
    pub fn from_products(n: usize, entries: &[(usize, usize, usize, Scalar)]) -> Algebra {
        let mut a = Algebra::zero(n);
        for (i, j, k, x) in entries {
            let cur = a.get(i - 1, j - 1, k - 1).add(x);
            a.set(i - 1, j - 1, k - 1, cur);
        }
        a.collect_params();
        a
    }

    pub fn named(mut self, name: &str) -> Algebra {
        self.name = name.to_string();
        self
    }

    pub fn with_constraints(mut self, cs: Vec<Poly>) -> Algebra {
        self.constraints = cs;
        self
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.c[self.idx(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, x: Scalar) {
        let id = self.idx(i, j, k);
        self.c[id] = x;
    }

    pub fn product_of_basis(&self, i: usize, j: usize) -> Vec<Scalar> {
        let st = (i * self.n + j) * self.n;
        self.c[st..st + self.n].to_vec()
    }

    /// Recompute the parameter list from the tensor (sorted by name).
    pub fn collect_params(&mut self) {
        let mut s: BTreeSet<Var> = BTreeSet::new();
        for x in &self.c {
            s.extend(x.vars());
        }
        let mut v: Vec<Var> = s.into_iter().collect();
        v.sort_by_key(|a| a.name());
        self.params = v;
    }

    pub fn nonzero(&self) -> NonZero {
        NonZero::from_polys(&self.constraints)
    }

    pub fn pivoting(&self) -> Pivoting {
        Pivoting::Strict(self.nonzero())
    }

    pub fn is_parametric(&self) -> bool {
        !self.params.is_empty()
    }

    pub fn multiply(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>, AlgebraError> {
        for v in [x, y] {
            if v.len() != self.n {
                return Err(AlgebraError::DimensionMismatch { expected: self.n, got: v.len() });
            }
        }
        Ok(self.mul_unchecked(x, y))
    }

    fn mul_unchecked(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let n = self.n;
        let mut out = vec![Scalar::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let st = (i * n + j) * n;
                let mut w: Option<Scalar> = None;
                for k in 0..n {
                    let c = &self.c[st + k];
                    if c.is_zero() {
                        continue;
                    }
                    let w = w.get_or_insert_with(|| x[i].mul(&y[j]));
                    out[k] = out[k].add(&w.mul(c));
                }
            }
        }
        out
    }

    /// (e_i e_j) applied on the right by e_k, etc., via the product table.
    fn basis_products(&self) -> Vec<Vec<Vec<Scalar>>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.product_of_basis(i, j)).collect()).collect()
    }

    fn left_times_basis(&self, v: &[Scalar], k: usize) -> Vec<Scalar> {
        self.mul_unchecked(v, &unit(self.n, k))
    }

    fn basis_times(&self, i: usize, v: &[Scalar]) -> Vec<Scalar> {
        self.mul_unchecked(&unit(self.n, i), v)
    }

    /// (xy)z = (xz)y + x(yz) on basis triples.
    pub fn check_right_leibniz(&self) -> Option<IdentityFailure> {
        let p = self.basis_products();
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.left_times_basis(&p[i][j], k);
                    let b = self.left_times_basis(&p[i][k], j);
                    let c = self.basis_times(i, &p[j][k]);
                    let r: Vec<Scalar> = (0..n).map(|q| a[q].sub(&b[q]).sub(&c[q])).collect();
                    if r.iter().any(|x| !x.is_zero()) {
                        return Some(IdentityFailure { triple: (i + 1, j + 1, k + 1), residual: r });
                    }
                }
            }
        }
        None
    }

    /// x(yz) = (xy)z + y(xz) on basis triples.
    pub fn check_left_leibniz(&self) -> Option<IdentityFailure> {
        let p = self.basis_products();
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.basis_times(i, &p[j][k]);
                    let b = self.left_times_basis(&p[i][j], k);
                    let c = self.basis_times(j, &p[i][k]);
                    let r: Vec<Scalar> = (0..n).map(|q| a[q].sub(&b[q]).sub(&c[q])).collect();
                    if r.iter().any(|x| !x.is_zero()) {
                        return Some(IdentityFailure { triple: (i + 1, j + 1, k + 1), residual: r });
                    }
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.check_right_leibniz().is_none() && self.check_left_leibniz().is_none()
    }

    pub fn annihilator(&self) -> Result<Subspace, AlgebraError> {
        let n = self.n;
        let mut rows = Vec::new();
        for j in 0..n {
            for k in 0..n {
                rows.push((0..n).map(|i| self.get(i, j, k).clone()).collect::<Vec<_>>());
                rows.push((0..n).map(|i| self.get(j, i, k).clone()).collect::<Vec<_>>());
            }
        }
        let ns = linalg::nullspace(rows, n, &self.pivoting())?;
        Subspace::span(n, ns, &self.pivoting())
    }

    /// A² = span of all products.
    pub fn square(&self) -> Result<Subspace, AlgebraError> {
        let n = self.n;
        let mut vs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                vs.push(self.product_of_basis(i, j));
            }
        }
        Subspace::span(n, vs, &self.pivoting())
    }

    /// A¹ = A, A^{k+1} = A^k A + A A^k, until stable.
    pub fn lower_central_series(&self) -> Result<Vec<Subspace>, AlgebraError> {
        let n = self.n;
        let piv = self.pivoting();
        let mut out = vec![Subspace::full(n)];
        loop {
            let cur = out.last().unwrap();
            let mut vs = Vec::new();
            for u in &cur.rows {
                for j in 0..n {
                    vs.push(self.left_times_basis(u, j));
                    vs.push(self.basis_times(j, u));
                }
            }
            let next = Subspace::span(n, vs, &piv)?;
            if next.dim() == cur.dim() {
                break;
            }
            let done = next.dim() == 0;
            out.push(next);
            if done {
                break;
            }
        }
        Ok(out)
    }

    pub fn central_series_dims(&self) -> Result<Vec<usize>, AlgebraError> {
        Ok(self.lower_central_series()?.iter().map(|s| s.dim()).collect())
    }

    pub fn is_nilpotent(&self) -> Result<bool, AlgebraError> {
        Ok(self.lower_central_series()?.last().map(|s| s.dim() == 0).unwrap_or(true))
    }

    /// Structure constants in the basis f_i = Σ_j P_ij e_j.
    pub fn change_basis(&self, p: &Matrix) -> Result<Algebra, AlgebraError> {
        let n = self.n;
        if p.len() != n || p.iter().any(|r| r.len() != n) {
            return Err(AlgebraError::DimensionMismatch { expected: n, got: p.len() });
        }
        let pinv = linalg::inverse(p).map_err(|_| AlgebraError::SingularMatrix)?;
        self.change_basis_with_inverse(p, &pinv)
    }

    pub fn change_basis_with_inverse(&self, p: &Matrix, pinv: &Matrix) -> Result<Algebra, AlgebraError> {
        let n = self.n;
        let mut out = Algebra { c: vec![Scalar::zero(); n * n * n], ..self.clone() };
        for i in 0..n {
            for j in 0..n {
                let v = self.mul_unchecked(&p[i], &p[j]);
                let w = linalg::vec_mat(&v, pinv);
                for (k, x) in w.into_iter().enumerate() {
                    out.set(i, j, k, x);
                }
            }
        }
        out.collect_params();
        Ok(out)
    }

    pub fn direct_sum(&self, o: &Algebra) -> Algebra {
        let n = self.n + o.n;
        let mut a = Algebra::zero(n);
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    a.set(i, j, k, self.get(i, j, k).clone());
                }
            }
        }
        let d = self.n;
        for i in 0..o.n {
            for j in 0..o.n {
                for k in 0..o.n {
                    a.set(i + d, j + d, k + d, o.get(i, j, k).clone());
                }
            }
        }
        a.constraints = self.constraints.iter().chain(o.constraints.iter()).cloned().collect();
        a.collect_params();
        a
    }

    pub fn substitute(&self, sub: &HashMap<Var, Scalar>) -> Result<Algebra, AlgebraError> {
        let mut c = Vec::with_capacity(self.c.len());
        for x in &self.c {
            c.push(if x.is_zero() { Scalar::zero() } else { x.substitute(sub)? });
        }
        let mut a = Algebra { c, ..self.clone() };
        a.constraints.retain(|p| p.vars().iter().all(|v| !sub.contains_key(v)));
        a.collect_params();
        Ok(a)
    }

    /// Instantiate every parameter at a sample.
    pub fn at(&self, sample: &HashMap<Var, Gq>) -> Result<Algebra, AlgebraError> {
        let sub: HashMap<Var, Scalar> = sample.iter().map(|(v, x)| (*v, Scalar::constant(x.clone()))).collect();
        for p in &self.constraints {
            if p.vars().iter().all(|v| sample.contains_key(v)) {
                if let Ok(v) = p.eval(sample) {
                    if v.is_zero() {
                        return Err(AlgebraError::Scalar(ScalarError::PoleAtAssignment(format!("{} = 0", p))));
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(self.c.len());
        for x in &self.c {
            out.push(if x.is_zero() { Scalar::zero() } else { x.substitute(&sub)? });
        }
        let mut a = Algebra { c: out, ..self.clone() };
        a.constraints.retain(|p| p.vars().iter().any(|v| !sample.contains_key(v)));
        a.collect_params();
        Ok(a)
    }

    pub fn tensor_eq(&self, o: &Algebra) -> bool {
        self.n == o.n && self.c.iter().zip(o.c.iter()).all(|(a, b)| a.equals(b))
    }

    /// Nonzero products as "e1*e1 = e2" strings.
    pub fn product_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.product_of_basis(i, j);
                if v.iter().all(|x| x.is_zero()) {
                    continue;
                }
                out.push(format!("e{}*e{} = {}", i + 1, j + 1, fmt_product(&v)));
            }
        }
        out
    }
}

pub fn fmt_product(v: &[Scalar]) -> String {
    let mut s = String::new();
    for (k, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let term = if x.is_one() {
            format!("e{}", k + 1)
        } else if x.equals(&Scalar::from_int(-1)) {
            format!("-e{}", k + 1)
        } else {
            let c = x.to_string();
            let body = c.strip_prefix('-').unwrap_or(&c);
            if body.contains([' ', '+', '-', '/', '(']) {
                format!("({})*e{}", c, k + 1)
            } else {
                format!("{}*e{}", c, k + 1)
            }
        };
        if s.is_empty() {
            s = term;
        } else if let Some(rest) = term.strip_prefix('-') {
            s = format!("{} - {}", s, rest);
        } else {
            s = format!("{} + {}", s, term);
        }
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

/// A subspace of K^n stored as reduced row-echelon rows.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub n: usize,
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(n: usize, vs: Vec<Vec<Scalar>>, piv: &Pivoting) -> Result<Subspace, AlgebraError> {
        let e = linalg::rref(vs, n, piv)?;
        Ok(Subspace { n, rows: e.rows, pivots: e.pivots })
    }

    pub fn full(n: usize) -> Subspace {
        Subspace { n, rows: linalg::identity(n), pivots: (0..n).collect() }
    }

    pub fn zero(n: usize) -> Subspace {
        Subspace { n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, v: &[Scalar], piv: &Pivoting) -> Result<bool, AlgebraError> {
        Ok(linalg::express_in_span(&self.rows, v, piv)?.is_some())
    }

    pub fn same_as(&self, o: &Subspace, piv: &Pivoting) -> Result<bool, AlgebraError> {
        if self.dim() != o.dim() {
            return Ok(false);
        }
        for r in &o.rows {
            if !self.contains(r, piv)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn intersect(&self, o: &Subspace, piv: &Pivoting) -> Result<Subspace, AlgebraError> {
        let (a, b) = (self.dim(), o.dim());
        if a == 0 || b == 0 {
            return Ok(Subspace::zero(self.n));
        }
        let m: Matrix = (0..self.n)
            .map(|i| {
                let mut row: Vec<Scalar> = self.rows.iter().map(|r| r[i].clone()).collect();
                row.extend(o.rows.iter().map(|r| r[i].neg()));
                row
            })
            .collect();
        let ns = linalg::nullspace(m, a + b, piv)?;
        let vs: Vec<Vec<Scalar>> = ns
            .into_iter()
            .map(|coef| {
                let mut v = vec![Scalar::zero(); self.n];
                for (ci, r) in coef.iter().take(a).zip(self.rows.iter()) {
                    if ci.is_zero() {
                        continue;
                    }
                    for (x, y) in v.iter_mut().zip(r.iter()) {
                        *x = x.add(&ci.mul(y));
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.n, vs, piv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;

    fn int(k: i64) -> Scalar {
        Scalar::from_int(k)
    }

    fn n01() -> Algebra {
        Algebra::from_products(3, &[(1, 1, 2, int(1))])
    }

    fn l13() -> Algebra {
        Algebra::from_products(4, &[(1, 1, 2, int(1)), (2, 1, 3, int(1)), (3, 1, 4, int(1))])
    }

    #[test]
    fn products_in_small_algebras() {
        let a = n01();
        assert_eq!(a.multiply(&unit(3, 0), &unit(3, 0)).unwrap(), unit(3, 1));
        assert!(a.multiply(&unit(3, 1), &unit(3, 1)).unwrap().iter().all(|x| x.is_zero()));
        assert!(matches!(a.multiply(&unit(2, 0), &unit(3, 0)), Err(AlgebraError::DimensionMismatch { .. })));
    }

    #[test]
    fn idempotent_square_breaks_right_leibniz() {
        let a = Algebra::from_products(1, &[(1, 1, 1, int(1))]);
        let f = a.check_right_leibniz().unwrap();
        assert_eq!(f.triple, (1, 1, 1));
        assert!(Algebra::zero(3).check_right_leibniz().is_none());
    }

    #[test]
    fn annihilator_and_series() {
        let ann = n01().annihilator().unwrap();
        assert_eq!(ann.dim(), 2);
        assert_eq!(ann.rows, vec![unit(3, 1), unit(3, 2)]);
        assert_eq!(l13().central_series_dims().unwrap(), vec![4, 3, 2, 1, 0]);
        assert_eq!(n01().central_series_dims().unwrap(), vec![3, 1, 0]);
        assert_eq!(Algebra::zero(4).central_series_dims().unwrap(), vec![4, 0]);
    }

    #[test]
    fn swapping_basis_vectors_of_the_heisenberg_algebra() {
        let n02 = Algebra::from_products(3, &[(1, 2, 3, int(1)), (2, 1, 3, int(-1))]);
        let p = linalg::from_ints(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        let b = n02.change_basis(&p).unwrap();
        assert_eq!(b.get(0, 1, 2), &int(-1));
        assert_eq!(b.get(1, 0, 2), &int(1));
    }

    #[test]
    fn direct_sum_adds_a_central_direction() {
        let a = l13().direct_sum(&Algebra::zero(1));
        assert_eq!(a.n, 5);
        assert_eq!(a.annihilator().unwrap().dim(), 2);
        assert!(a.check_right_leibniz().is_none());
    }

    #[test]
    fn parametric_change_of_basis_round_trip() {
        let a = Algebra::from_products(3, &[(1, 1, 3, int(1)), (1, 2, 3, int(1)), (2, 2, 3, parse_scalar("alpha").unwrap())]);
        let p = vec![
            vec![int(1), int(2), int(0)],
            vec![int(0), parse_scalar("alpha + 1").unwrap(), int(0)],
            vec![int(1), int(0), int(3)],
        ];
        let b = a.change_basis(&p).unwrap();
        let back = b.change_basis(&linalg::inverse(&p).unwrap()).unwrap();
        assert!(back.tensor_eq(&a));
    }
}
