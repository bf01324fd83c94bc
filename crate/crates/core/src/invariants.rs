//! Derivations, orbit dimensions and basis-independent fingerprints.

use crate::algebra::{Algebra, AlgebraError};
use crate::cohomology::{self, CohomologyError};
use crate::linalg::{self, LinalgError, Matrix};
use crate::scalar::{Gq, Scalar, Var};
use std::collections::HashMap;
use std::fmt;

/// Unknown d_{a,b} is the e_a coordinate of d(e_b), flattened as a*n + b.
fn derivation_rows(a: &Algebra) -> Vec<Vec<Scalar>> {
    let n = a.n;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut row = vec![Scalar::zero(); n * n];
                for l in 0..n {
                    let c = a.get(i, j, l);
                    if !c.is_zero() {
                        row[k * n + l] = row[k * n + l].add(c);
                    }
                    let c = a.get(l, j, k);
                    if !c.is_zero() {
                        row[l * n + i] = row[l * n + i].sub(c);
                    }
                    let c = a.get(i, l, k);
                    if !c.is_zero() {
                        row[l * n + j] = row[l * n + j].sub(c);
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

/// Basis of Der(A) as n×n matrices (column b is d(e_b)).
pub fn derivation_algebra(a: &Algebra) -> Result<Vec<Matrix>, AlgebraError> {
    let n = a.n;
    let ns = linalg::nullspace(derivation_rows(a), n * n, &a.pivoting())?;
    Ok(ns.into_iter().map(|v| v.chunks(n).map(|r| r.to_vec()).collect()).collect())
}

pub fn der_dim(a: &Algebra) -> Result<usize, AlgebraError> {
    let n = a.n;
    Ok(n * n - linalg::rank(derivation_rows(a), n * n, &a.pivoting())?)
}

pub fn is_derivation(a: &Algebra, d: &Matrix) -> bool {
    let n = a.n;
    let flat: Vec<Scalar> = d.iter().flatten().cloned().collect();
    derivation_rows(a).iter().all(|row| {
        row.iter().zip(flat.iter()).fold(Scalar::zero(), |acc, (x, y)| if x.is_zero() || y.is_zero() { acc } else { acc.add(&x.mul(y)) }).is_zero()
    }) && d.len() == n
}

/// dim Der, falling back to the sample when the symbolic rank is ambiguous.
pub fn der_dim_at(a: &Algebra, sample: &HashMap<Var, Gq>) -> Result<usize, AlgebraError> {
    der_dim(&a.at(sample)?)
}

/// n² − dim Der at the sample.
pub fn orbit_dimension(a: &Algebra, sample: &HashMap<Var, Gq>) -> Result<usize, AlgebraError> {
    Ok(a.n * a.n - der_dim_at(a, sample)?)
}

/// Tangent vector of the GL-orbit for the elementary matrix E_ab (E_ab e_b = e_a).
fn orbit_tangent(c: &Algebra, ai: usize, bi: usize) -> Vec<Scalar> {
    let n = c.n;
    let mut v = vec![Scalar::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut val = Scalar::zero();
                if k == ai {
                    val = val.add(c.get(i, j, bi));
                }
                if i == bi {
                    val = val.sub(c.get(ai, j, k));
                }
                if j == bi {
                    val = val.sub(c.get(i, ai, k));
                }
                v[(i * n + j) * n + k] = val;
            }
        }
    }
    v
}

/// Dimension of the closure of the union of orbits of the family: rank of the
/// orbit tangents together with the parameter derivatives at a generic sample.
pub fn family_closure_dimension(a: &Algebra, sample: &HashMap<Var, Gq>) -> Result<usize, AlgebraError> {
    let c = a.at(sample)?;
    let n = a.n;
    let mut vecs = Vec::new();
    for ai in 0..n {
        for bi in 0..n {
            vecs.push(orbit_tangent(&c, ai, bi));
        }
    }
    for p in &a.params {
        let mut v = Vec::with_capacity(n * n * n);
        for x in &a.c {
            v.push(if x.is_zero() { Scalar::zero() } else { x.derivative(*p) });
        }
        let mut sub = HashMap::new();
        for (k, val) in sample {
            sub.insert(*k, Scalar::constant(val.clone()));
        }
        let v: Result<Vec<Scalar>, _> = v.iter().map(|x| x.substitute(&sub)).collect();
        vecs.push(v?);
    }
    let consts: Vec<Vec<Gq>> = vecs
        .into_iter()
        .map(|v| v.into_iter().map(|x| x.as_constant().expect("sampled entries are constant")).collect())
        .collect();
    Ok(linalg::rank_gq(consts))
}

pub fn one_generated(a: &Algebra) -> Result<bool, AlgebraError> {
    Ok(a.n - a.square()?.dim() == 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub dim: usize,
    pub ann: usize,
    pub series: Vec<usize>,
    pub square: usize,
    pub der: usize,
    pub z2: usize,
    pub h2: usize,
    pub symmetric: bool,
    pub one_generated: bool,
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let series: Vec<String> = self.series.iter().map(|d| d.to_string()).collect();
        write!(
            f,
            "dim={} ann={} series=[{}] square={} der={} z2={} h2={} symmetric={} one_generated={}",
            self.dim,
            self.ann,
            series.join(","),
            self.square,
            self.der,
            self.z2,
            self.h2,
            self.symmetric,
            self.one_generated
        )
    }
}

pub fn fingerprint(a: &Algebra, sample: Option<&HashMap<Var, Gq>>) -> Result<Fingerprint, CohomologyError> {
    let inst;
    let a = match sample {
        Some(s) => {
            inst = a.at(s)?;
            &inst
        }
        None => a,
    };
    let coh = cohomology::cohomology_basis(a)?;
    Ok(Fingerprint {
        dim: a.n,
        ann: a.annihilator()?.dim(),
        series: a.central_series_dims()?,
        square: a.square()?.dim(),
        der: der_dim(a)?,
        z2: coh.z2.len(),
        h2: coh.dim_h2(),
        symmetric: a.check_left_leibniz().is_none() && a.check_right_leibniz().is_none(),
        one_generated: one_generated(a)?,
    })
}

const SAMPLE_VALUES: [i64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Deterministic parameter samples avoiding the declared exclusions: sample
/// number s gives the p-th parameter the value at position s + p of 2, 3, 5, ...
pub fn default_samples(a: &Algebra, k: usize) -> Vec<HashMap<Var, Gq>> {
    if a.params.is_empty() {
        return vec![HashMap::new()];
    }
    let mut out = Vec::new();
    let mut s = 0;
    while out.len() < k && s < 64 {
        let m: HashMap<Var, Gq> = a
            .params
            .iter()
            .enumerate()
            .map(|(p, v)| (*v, Gq::from_int(SAMPLE_VALUES[(s + p) % SAMPLE_VALUES.len()] + 20 * ((s + p) / SAMPLE_VALUES.len()) as i64)))
            .collect();
        s += 1;
        if sample_is_allowed(a, &m) {
            out.push(m);
        }
    }
    out
}

pub fn sample_is_allowed(a: &Algebra, m: &HashMap<Var, Gq>) -> bool {
    a.constraints.iter().all(|p| p.eval(m).map(|v| !v.is_zero()).unwrap_or(true))
        && a.c.iter().all(|x| x.eval(m).is_ok() || x.vars().iter().any(|v| !m.contains_key(v)))
}

/// Pick the symbolic computation when the rank is unambiguous, else sample.
pub fn der_dim_generic(a: &Algebra) -> Result<usize, AlgebraError> {
    match der_dim(a) {
        Ok(d) => Ok(d),
        Err(AlgebraError::Linalg(LinalgError::ParameterRankAmbiguity { .. })) => {
            let s = default_samples(a, 1);
            der_dim_at(a, &s[0])
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(k: i64) -> Scalar {
        Scalar::from_int(k)
    }

    fn l82() -> Algebra {
        Algebra::from_products(5, &[(1, 1, 2, int(1)), (2, 1, 3, int(1)), (3, 1, 4, int(1)), (4, 1, 5, int(1))])
    }

    #[test]
    fn derivations_of_small_cases() {
        assert_eq!(der_dim(&Algebra::zero(5)).unwrap(), 25);
        assert_eq!(der_dim(&l82()).unwrap(), 5);
        assert_eq!(orbit_dimension(&l82(), &HashMap::new()).unwrap(), 20);
        assert_eq!(orbit_dimension(&Algebra::zero(3), &HashMap::new()).unwrap(), 0);
    }

    #[test]
    fn derivations_close_under_commutator() {
        let a = l82();
        let ds = derivation_algebra(&a).unwrap();
        for d1 in &ds {
            for d2 in &ds {
                let p = linalg::mat_mul(d1, d2);
                let q = linalg::mat_mul(d2, d1);
                let c: Matrix = p.iter().zip(q.iter()).map(|(r, s)| r.iter().zip(s.iter()).map(|(x, y)| x.sub(y)).collect()).collect();
                assert!(is_derivation(&a, &c));
            }
        }
    }

    #[test]
    fn generation() {
        assert!(one_generated(&l82()).unwrap());
        let l01 = Algebra::from_products(5, &[(1, 1, 2, int(1)), (2, 1, 4, int(1)), (3, 1, 5, int(1))]);
        assert!(!one_generated(&l01).unwrap());
        assert!(!one_generated(&Algebra::zero(2)).unwrap());
    }

    #[test]
    fn zero_algebra_fingerprint() {
        let f = fingerprint(&Algebra::zero(3), None).unwrap();
        assert_eq!(
            f,
            Fingerprint { dim: 3, ann: 3, series: vec![3, 0], square: 0, der: 9, z2: 9, h2: 9, symmetric: true, one_generated: false }
        );
    }
}
