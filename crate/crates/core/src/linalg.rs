//! Gauss-Jordan elimination over the parameter field.
//!
//! Pivots are taken from the leftmost column that has one, in the first row
//! whose entry qualifies, and normalised to 1. Under `Pivoting::Strict` an
//! entry qualifies only when its nonvanishing follows from the declared
//! constraints; columns with only doubtful entries are skipped, and if anything
//! is left over at the end the rank is parameter dependent.

use crate::scalar::{Gq, NonZero, Scalar};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("rank depends on the parameters (column {column}, entry {entry})")]
    ParameterRankAmbiguity { column: usize, entry: String },
    #[error("singular matrix")]
    SingularMatrix,
}

#[derive(Clone, Debug)]
pub enum Pivoting {
    Strict(NonZero),
    Generic,
}

impl Pivoting {
    pub fn strict_none() -> Pivoting {
        Pivoting::Strict(NonZero::none())
    }
}

#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
    /// Non-constant pivots used under generic pivoting (genericity conditions).
    pub conditions: Vec<Scalar>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

pub type Matrix = Vec<Vec<Scalar>>;

pub fn zeros(r: usize, c: usize) -> Matrix {
    vec![vec![Scalar::zero(); c]; r]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Scalar::one();
    }
    m
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Scalar::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc = acc.add(&row[k].mul(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mat(v: &[Scalar], m: &Matrix) -> Vec<Scalar> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    (0..cols)
        .map(|j| {
            let mut acc = Scalar::zero();
            for (k, x) in v.iter().enumerate() {
                if !x.is_zero() && !m[k][j].is_zero() {
                    acc = acc.add(&x.mul(&m[k][j]));
                }
            }
            acc
        })
        .collect()
}

pub fn rref(mut m: Matrix, ncols: usize, piv: &Pivoting) -> Result<Echelon, LinalgError> {
    m.retain(|row| row.iter().any(|x| !x.is_zero()));
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut conditions = Vec::new();
    let mut deferred: Option<(usize, String)> = None;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let mut choice = None;
        for (i, row) in m.iter().enumerate().skip(r) {
            let x = &row[col];
            if x.is_zero() {
                continue;
            }
            match piv {
                Pivoting::Generic => {
                    choice = Some(i);
                    break;
                }
                Pivoting::Strict(nz) => {
                    if x.provably_nonzero(nz) {
                        choice = Some(i);
                        break;
                    } else if deferred.is_none() {
                        deferred = Some((col, x.to_string()));
                    }
                }
            }
        }
        let p = match choice {
            Some(p) => p,
            None => continue,
        };
        m.swap(r, p);
        let pv = m[r][col].clone();
        if pv.as_constant().is_none() {
            conditions.push(pv.clone());
        }
        if !pv.is_one() {
            let inv = pv.inv().expect("pivot is nonzero");
            for x in m[r].iter_mut() {
                if !x.is_zero() {
                    *x = x.mul(&inv);
                }
            }
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(prow.iter()) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let leftover = m.iter().skip(r).any(|row| row.iter().any(|x| !x.is_zero()));
    if leftover {
        let (column, entry) = deferred.unwrap_or((0, String::from("?")));
        return Err(LinalgError::ParameterRankAmbiguity { column, entry });
    }
    m.truncate(r);
    Ok(Echelon { rows: m, pivots, conditions })
}

pub fn rank(m: Matrix, ncols: usize, piv: &Pivoting) -> Result<usize, LinalgError> {
    Ok(rref(m, ncols, piv)?.rank())
}

/// Basis of {x : m x = 0}, one vector per free column with a 1 there.
pub fn nullspace(m: Matrix, ncols: usize, piv: &Pivoting) -> Result<Vec<Vec<Scalar>>, LinalgError> {
    let e = rref(m, ncols, piv)?;
    Ok(nullspace_of(&e, ncols))
}

pub fn nullspace_of(e: &Echelon, ncols: usize) -> Vec<Vec<Scalar>> {
    let mut out = Vec::new();
    for f in 0..ncols {
        if e.pivots.contains(&f) {
            continue;
        }
        let mut v = vec![Scalar::zero(); ncols];
        v[f] = Scalar::one();
        for (row, &pc) in e.rows.iter().zip(e.pivots.iter()) {
            v[pc] = row[f].neg();
        }
        out.push(v);
    }
    out
}

/// Coefficients expressing v in the span of `basis`, if it lies there.
pub fn express_in_span(basis: &[Vec<Scalar>], v: &[Scalar], piv: &Pivoting) -> Result<Option<Vec<Scalar>>, LinalgError> {
    let k = basis.len();
    let n = v.len();
    let m: Matrix = (0..n)
        .map(|i| {
            let mut row: Vec<Scalar> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let e = rref(m, k + 1, piv)?;
    if e.pivots.contains(&k) {
        return Ok(None);
    }
    let mut x = vec![Scalar::zero(); k];
    for (row, &pc) in e.rows.iter().zip(e.pivots.iter()) {
        x[pc] = row[k].clone();
    }
    Ok(Some(x))
}

pub fn inverse(p: &Matrix) -> Result<Matrix, LinalgError> {
    let n = p.len();
    let aug: Matrix = p
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { Scalar::one() } else { Scalar::zero() });
            }
            r
        })
        .collect();
    let e = rref(aug, 2 * n, &Pivoting::Generic)?;
    if e.pivots.len() < n || e.pivots.iter().take(n).enumerate().any(|(i, &c)| c != i) {
        return Err(LinalgError::SingularMatrix);
    }
    Ok(e.rows.into_iter().take(n).map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(p: &Matrix) -> Scalar {
    let n = p.len();
    let mut m = p.clone();
    let mut det = Scalar::one();
    for col in 0..n {
        let piv = match (col..n).find(|&i| !m[i][col].is_zero()) {
            Some(i) => i,
            None => return Scalar::zero(),
        };
        if piv != col {
            m.swap(piv, col);
            det = det.neg();
        }
        let pv = m[col][col].clone();
        det = det.mul(&pv);
        let inv = pv.inv().unwrap();
        for i in col + 1..n {
            if m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].mul(&inv);
            for j in col..n {
                let t = f.mul(&m[col][j]);
                m[i][j] = m[i][j].sub(&t);
            }
        }
    }
    det
}

pub fn from_ints(rows: &[&[i64]]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect()
}

/// Rank of a constant matrix over Q(i).
pub fn rank_gq(mut m: Vec<Vec<Gq>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for col in 0..cols {
        let p = match (r..rows).find(|&i| !m[i][col].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        m.swap(r, p);
        let inv = m[r][col].inv().unwrap();
        let prow: Vec<Gq> = m[r].iter().map(|x| x * &inv).collect();
        for row in m.iter_mut().skip(r + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(prow.iter()).skip(col) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        m[r] = prow;
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Inverse of a constant matrix, or None when it is singular.
pub fn inverse_gq(p: &[Vec<Gq>]) -> Option<Vec<Vec<Gq>>> {
    let n = p.len();
    let mut m: Vec<Vec<Gq>> = p
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Gq::one() } else { Gq::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].inv()?;
        let prow: Vec<Gq> = m[col].iter().map(|x| x * &inv).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(prow.iter()) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        m[col] = prow;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_scalar, Poly};

    #[test]
    fn nullspace_of_rank_one() {
        let m = from_ints(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(m.clone(), 3, &Pivoting::Generic).unwrap();
        assert_eq!(ns.len(), 2);
        for v in ns {
            for row in &m {
                let dot = row.iter().zip(v.iter()).fold(Scalar::zero(), |a, (x, y)| a.add(&x.mul(y)));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let p = from_ints(&[&[1, 2], &[3, 5]]);
        let q = inverse(&p).unwrap();
        assert_eq!(mat_mul(&p, &q), identity(2));
        assert_eq!(inverse(&from_ints(&[&[1, 2], &[2, 4]])), Err(LinalgError::SingularMatrix));
    }

    #[test]
    fn strict_pivoting_needs_constraints() {
        let a = parse_scalar("alpha").unwrap();
        let m = vec![vec![a.clone(), Scalar::one()], vec![Scalar::zero(), Scalar::zero()]];
        assert!(rank(m.clone(), 2, &Pivoting::strict_none()).is_ok());
        let m2 = vec![vec![a.clone()], vec![Scalar::zero()]];
        assert!(matches!(rank(m2.clone(), 1, &Pivoting::strict_none()), Err(LinalgError::ParameterRankAmbiguity { .. })));
        let nz = NonZero::from_polys(&[Poly::named("alpha")]);
        assert_eq!(rank(m2, 1, &Pivoting::Strict(nz)).unwrap(), 1);
    }

    #[test]
    fn symbolic_determinant() {
        let a = parse_scalar("alpha").unwrap();
        let m = vec![vec![a.clone(), Scalar::one()], vec![Scalar::one(), a.clone()]];
        assert_eq!(determinant(&m), parse_scalar("alpha^2 - 1").unwrap());
    }
}
