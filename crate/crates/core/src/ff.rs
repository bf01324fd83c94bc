//! Brute-force classification of small nilpotent Leibniz algebras over F_p.
//!
//! Tensors are flat vectors of field elements, entry (i*n + j)*n + k being the
//! coefficient of e_k in e_i e_j. Every nilpotent algebra has a basis in which
//! e_i e_j only involves e_k with k > max(i, j) (refine the lower central
//! series to a complete flag), so every orbit meets that "triangular" set and
//! the search is restricted to it. Two strategies classify the triangular
//! tensors: orbit expansion under change of basis, and union-find over the
//! transport action. They share only the identity and triangularity tests.

use crate::algebra::Algebra;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FfError {
    #[error("search space too large for n = {n}, p = {p}")]
    SearchSpaceTooLarge { n: usize, p: u32 },
    #[error("{0} is not a supported prime")]
    UnsupportedPrime(u32),
    #[error("structure constant not integral mod {0}")]
    NotIntegral(u32),
}

pub type Tensor = Vec<u8>;
pub type FfMatrix = Vec<Vec<u8>>;

pub fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub fn check_size(n: usize, p: u32) -> Result<(), FfError> {
    if ![2, 3, 5].contains(&p) {
        return Err(FfError::UnsupportedPrime(p));
    }
    let ok = n >= 1 && (n <= 2 || (n == 3 && p <= 3) || (n == 4 && p == 2));
    if ok {
        Ok(())
    } else {
        Err(FfError::SearchSpaceTooLarge { n, p })
    }
}

#[inline]
fn at(n: usize, i: usize, j: usize, k: usize) -> usize {
    (i * n + j) * n + k
}

/// Positions allowed to be nonzero in a triangular tensor.
pub fn triangular_positions(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in i.max(j) + 1..n {
                out.push(at(n, i, j, k));
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn is_triangular(n: usize, c: &[u8]) -> bool {
    for i in 0..n {
        for j in 0..n {
            for k in 0..=i.max(j) {
                if c[at(n, i, j, k)] != 0 {
                    return false;
                }
            }
        }
    }
    true
}

fn product(n: usize, p: u32, c: &[u8], x: &[u32], y: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; n];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            if yj == 0 {
                continue;
            }
            let w = xi * yj % p;
            for (k, o) in out.iter_mut().enumerate() {
                *o = (*o + w * c[at(n, i, j, k)] as u32) % p;
            }
        }
    }
    out
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// (xy)z = (xz)y + x(yz) on basis triples.
pub fn is_right_leibniz(n: usize, p: u32, c: &[u8]) -> bool {
    let basis: Vec<Vec<u32>> = (0..n).map(|i| unit(n, i)).collect();
    let prods: Vec<Vec<Vec<u32>>> = (0..n).map(|i| (0..n).map(|j| product(n, p, c, &basis[i], &basis[j])).collect()).collect();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = product(n, p, c, &prods[i][j], &basis[k]);
                let r1 = product(n, p, c, &prods[i][k], &basis[j]);
                let r2 = product(n, p, c, &basis[i], &prods[j][k]);
                if (0..n).any(|l| (r1[l] + r2[l]) % p != lhs[l]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Row-reduce in place and return the rank.
pub fn rank_mod(mut m: Vec<Vec<u32>>, p: u32) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for col in 0..cols {
        let Some(piv) = (r..rows).find(|&i| m[i][col] != 0) else { continue };
        m.swap(r, piv);
        let inv = inv_mod(m[r][col] as u64, p as u64) as u32;
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let f = row[col];
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn reduced_basis(vs: Vec<Vec<u32>>, n: usize, p: u32) -> Vec<Vec<u32>> {
    let mut m: Vec<Vec<u32>> = vs.into_iter().filter(|v| v.iter().any(|&x| x != 0)).collect();
    let rows = m.len();
    let mut r = 0;
    for col in 0..n {
        let Some(piv) = (r..rows).find(|&i| m[i][col] != 0) else { continue };
        m.swap(r, piv);
        let inv = inv_mod(m[r][col] as u64, p as u64) as u32;
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let f = row[col];
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

/// Dimensions of A = A^1 ⊃ A^2 ⊃ ... with A^{k+1} = A^k A + A A^k, until stable.
pub fn series_dims(n: usize, p: u32, c: &[u8]) -> Vec<usize> {
    let mut cur: Vec<Vec<u32>> = (0..n).map(|i| unit(n, i)).collect();
    let mut dims = vec![n];
    loop {
        let mut vs = Vec::new();
        for u in &cur {
            for j in 0..n {
                let e = unit(n, j);
                vs.push(product(n, p, c, u, &e));
                vs.push(product(n, p, c, &e, u));
            }
        }
        let next = reduced_basis(vs, n, p);
        if next.len() == cur.len() {
            break;
        }
        dims.push(next.len());
        cur = next;
        if cur.is_empty() {
            break;
        }
    }
    dims
}

pub fn is_nilpotent(n: usize, p: u32, c: &[u8]) -> bool {
    series_dims(n, p, c).last() == Some(&0) || n == 0
}

pub fn ann_dim(n: usize, p: u32, c: &[u8]) -> usize {
    let mut rows = Vec::new();
    for j in 0..n {
        for k in 0..n {
            rows.push((0..n).map(|i| c[at(n, i, j, k)] as u32).collect());
            rows.push((0..n).map(|i| c[at(n, j, i, k)] as u32).collect());
        }
    }
    n - rank_mod(rows, p)
}

pub fn der_dim(n: usize, p: u32, c: &[u8]) -> usize {
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut row = vec![0u32; n * n];
                for l in 0..n {
                    row[k * n + l] = (row[k * n + l] + c[at(n, i, j, l)] as u32) % p;
                    row[l * n + i] = (row[l * n + i] + p - c[at(n, l, j, k)] as u32) % p;
                    row[l * n + j] = (row[l * n + j] + p - c[at(n, i, l, k)] as u32) % p;
                }
                rows.push(row);
            }
        }
    }
    n * n - rank_mod(rows, p)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FfFingerprint {
    pub ann: usize,
    pub series: Vec<usize>,
    pub der: usize,
}

pub fn fingerprint(n: usize, p: u32, c: &[u8]) -> FfFingerprint {
    FfFingerprint { ann: ann_dim(n, p, c), series: series_dims(n, p, c), der: der_dim(n, p, c) }
}

fn mat_inverse(g: &[Vec<u8>], p: u32) -> Option<FfMatrix> {
    let n = g.len();
    let mut m: Vec<Vec<u32>> = g
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<u32> = r.iter().map(|&x| x as u32).collect();
            row.extend((0..n).map(|j| (i == j) as u32));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| m[i][col] != 0)?;
        m.swap(col, piv);
        let inv = inv_mod(m[col][col] as u64, p as u64) as u32;
        for x in m[col].iter_mut() {
            *x = *x * inv % p;
        }
        let prow = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != col && row[col] != 0 {
                let f = row[col];
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].iter().map(|&x| x as u8).collect()).collect())
}

/// All invertible n×n matrices with their inverses, in row-major counting order.
pub fn general_linear_group(n: usize, p: u32) -> Vec<(FfMatrix, FfMatrix)> {
    let cells = n * n;
    let total = (p as u64).pow(cells as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut x = code;
        let mut flat = vec![0u8; cells];
        for slot in flat.iter_mut().rev() {
            *slot = (x % p as u64) as u8;
            x /= p as u64;
        }
        let g: FfMatrix = flat.chunks(n).map(|r| r.to_vec()).collect();
        if let Some(gi) = mat_inverse(&g, p) {
            out.push((g, gi));
        }
    }
    out
}

pub fn gl_order(n: usize, p: u32) -> u64 {
    let q = p as u64;
    (0..n as u32).map(|i| q.pow(n as u32) - q.pow(i)).product()
}

/// Structure constants in the basis f_i = Σ_j P_ij e_j (rows are new vectors).
pub fn change_basis(n: usize, p: u32, c: &[u8], pm: &[Vec<u8>], pinv: &[Vec<u8>]) -> Tensor {
    let mut out = vec![0u8; n * n * n];
    let mut v = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            v.iter_mut().for_each(|x| *x = 0);
            for a in 0..n {
                let pa = pm[i][a] as u32;
                if pa == 0 {
                    continue;
                }
                for b in 0..n {
                    let w = pa * pm[j][b] as u32 % p;
                    if w == 0 {
                        continue;
                    }
                    for (l, vl) in v.iter_mut().enumerate() {
                        *vl += w * c[at(n, a, b, l)] as u32;
                    }
                }
            }
            for k in 0..n {
                let mut acc = 0u32;
                for (l, vl) in v.iter().enumerate() {
                    acc += (vl % p) * pinv[l][k] as u32;
                }
                out[at(n, i, j, k)] = (acc % p) as u8;
            }
        }
    }
    out
}

/// The transported product μ'(x, y) = g μ(g⁻¹x, g⁻¹y), with column j of g being g(e_j).
pub fn transport(n: usize, p: u32, c: &[u8], g: &[Vec<u8>], ginv: &[Vec<u8>]) -> Tensor {
    let mut out = vec![0u8; n * n * n];
    for i in 0..n {
        let xi: Vec<u32> = (0..n).map(|a| ginv[a][i] as u32).collect();
        for j in 0..n {
            let yj: Vec<u32> = (0..n).map(|b| ginv[b][j] as u32).collect();
            let m = product(n, p, c, &xi, &yj);
            for k in 0..n {
                let s: u32 = (0..n).map(|l| g[k][l] as u32 * m[l]).sum();
                out[at(n, i, j, k)] = (s % p) as u8;
            }
        }
    }
    out
}

/// Every right Leibniz tensor supported on the triangular positions, in lexicographic order.
pub fn triangular_leibniz(n: usize, p: u32) -> Vec<Tensor> {
    let pos = triangular_positions(n);
    let total = (p as u64).pow(pos.len() as u32);
    let mut out: Vec<Tensor> = (0..total)
        .into_par_iter()
        .filter_map(|code| {
            let mut c = vec![0u8; n * n * n];
            let mut x = code;
            for &q in pos.iter().rev() {
                c[q] = (x % p as u64) as u8;
                x /= p as u64;
            }
            if is_right_leibniz(n, p, &c) {
                Some(c)
            } else {
                None
            }
        })
        .collect();
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FfClass {
    /// Lexicographically least triangular tensor of the orbit.
    pub canonical: Tensor,
    pub orbit_size: u64,
    /// |Stab| of the canonical tensor, when the strategy computes it.
    pub stabilizer: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct FfClassification {
    pub n: usize,
    pub p: u32,
    pub classes: Vec<FfClass>,
}

impl FfClassification {
    pub fn canonicals(&self) -> BTreeSet<Tensor> {
        self.classes.iter().map(|c| c.canonical.clone()).collect()
    }

    pub fn orbit_sum(&self) -> u64 {
        self.classes.iter().map(|c| c.orbit_size).sum()
    }

    pub fn histogram(&self) -> BTreeMap<u64, usize> {
        let mut h = BTreeMap::new();
        for c in &self.classes {
            *h.entry(c.orbit_size).or_insert(0) += 1;
        }
        h
    }
}

fn orbit(n: usize, p: u32, c: &[u8], group: &[(FfMatrix, FfMatrix)]) -> HashSet<Tensor> {
    group.iter().map(|(g, gi)| change_basis(n, p, c, g, gi)).collect()
}

/// Canonical form of a nilpotent tensor: least triangular member of its orbit.
pub fn canonical_form(n: usize, p: u32, c: &[u8], group: &[(FfMatrix, FfMatrix)]) -> Option<Tensor> {
    orbit(n, p, c, group).into_iter().filter(|t| is_triangular(n, t)).min()
}

/// Strategy A: expand the full orbit of each unvisited triangular tensor.
pub fn classify_by_orbits(n: usize, p: u32) -> Result<FfClassification, FfError> {
    check_size(n, p)?;
    let group = general_linear_group(n, p);
    let reps = triangular_leibniz(n, p);
    let mut seen: HashSet<Tensor> = HashSet::new();
    let mut classes = Vec::new();
    for t in &reps {
        if seen.contains(t) {
            continue;
        }
        let o = orbit(n, p, t, &group);
        let tri: Vec<&Tensor> = o.iter().filter(|x| is_triangular(n, x)).collect();
        let canonical = (*tri.iter().min().unwrap()).clone();
        for x in tri {
            seen.insert(x.clone());
        }
        classes.push(FfClass { canonical, orbit_size: o.len() as u64, stabilizer: None });
    }
    classes.sort_by(|a, b| a.canonical.cmp(&b.canonical));
    Ok(FfClassification { n, p, classes })
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Strategy B: union-find over triangular tensors joined by single group moves.
pub fn classify_by_union_find(n: usize, p: u32) -> Result<FfClassification, FfError> {
    check_size(n, p)?;
    let group = general_linear_group(n, p);
    let reps = triangular_leibniz(n, p);
    let index: HashMap<&Tensor, usize> = reps.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let moves: Vec<(Vec<usize>, u64)> = reps
        .par_iter()
        .map(|t| {
            let mut hits = Vec::new();
            let mut stab = 0u64;
            for (g, gi) in &group {
                let y = transport(n, p, t, g, gi);
                if &y == t {
                    stab += 1;
                } else if let Some(&k) = index.get(&y) {
                    hits.push(k);
                }
            }
            (hits, stab)
        })
        .collect();
    let mut parent: Vec<usize> = (0..reps.len()).collect();
    for (i, (hits, _)) in moves.iter().enumerate() {
        for &k in hits {
            let a = find(&mut parent, i);
            let b = find(&mut parent, k);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let order = group.len() as u64;
    let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..reps.len() {
        let r = find(&mut parent, i);
        roots.entry(r).or_insert(i);
    }
    let mut classes: Vec<FfClass> = roots
        .values()
        .map(|&first| {
            let stab = moves[first].1;
            FfClass { canonical: reps[first].clone(), orbit_size: order / stab, stabilizer: Some(stab) }
        })
        .collect();
    classes.sort_by(|a, b| a.canonical.cmp(&b.canonical));
    Ok(FfClassification { n, p, classes })
}

/// Number of right Leibniz nilpotent tensors in the whole space, when small
/// enough to scan (p^(n³) ≤ 2^27).
pub fn full_space_count(n: usize, p: u32) -> Option<u64> {
    let cells = (n * n * n) as u32;
    let total = (p as u64).checked_pow(cells)?;
    if total > 1 << 27 {
        return None;
    }
    if p == 2 && n == 3 {
        return Some(packed_count_f2_dim3());
    }
    Some(
        (0..total)
            .into_par_iter()
            .filter(|&code| {
                let mut x = code;
                let mut c = vec![0u8; cells as usize];
                for slot in c.iter_mut().rev() {
                    *slot = (x % p as u64) as u8;
                    x /= p as u64;
                }
                is_right_leibniz(n, p, &c) && is_nilpotent(n, p, &c)
            })
            .count() as u64,
    )
}

/// Over F_2 in dimension 3 a tensor is a 27-bit word; bits 3(3i + j) .. +2 hold e_i e_j.
fn packed_count_f2_dim3() -> u64 {
    (0u32..1 << 27).into_par_iter().filter(|&w| packed_leibniz(w) && packed_nilpotent(w)).count() as u64
}

#[inline]
fn packed_products(w: u32) -> [[u8; 3]; 3] {
    let mut t = [[0u8; 3]; 3];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = ((w >> (3 * (3 * i + j))) & 7) as u8;
        }
    }
    t
}

#[inline]
fn times_right(t: &[[u8; 3]; 3], v: u8, k: usize) -> u8 {
    (0..3).filter(|l| v >> l & 1 == 1).fold(0, |a, l| a ^ t[l][k])
}

#[inline]
fn times_left(t: &[[u8; 3]; 3], i: usize, v: u8) -> u8 {
    (0..3).filter(|l| v >> l & 1 == 1).fold(0, |a, l| a ^ t[i][l])
}

fn packed_leibniz(w: u32) -> bool {
    let t = packed_products(w);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                if times_right(&t, t[i][j], k) != times_right(&t, t[i][k], j) ^ times_left(&t, i, t[j][k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Span of 3-bit vectors as the set of its members (bit v set when v is in it).
fn span_set(vs: impl Iterator<Item = u8>) -> u8 {
    let mut set: u8 = 1;
    for v in vs {
        if set >> v & 1 == 0 {
            let mut add = 0u8;
            for x in 0..8 {
                if set >> x & 1 == 1 {
                    add |= 1 << (x ^ v);
                }
            }
            set |= add;
        }
    }
    set
}

fn packed_nilpotent(w: u32) -> bool {
    let t = packed_products(w);
    let mut cur: u8 = 0xff;
    loop {
        let members: Vec<u8> = (0..8).filter(|x| cur >> x & 1 == 1).collect();
        let next = span_set(members.iter().flat_map(|&u| (0..3).flat_map(move |j| [times_right(&t, u, j), times_left(&t, j, u)])).collect::<Vec<_>>().into_iter());
        if next == cur {
            return cur == 1;
        }
        cur = next;
    }
}

/// One hex digit per entry in (i, j, k) order.
pub fn hex(c: &[u8]) -> String {
    c.iter().map(|&x| char::from_digit(x as u32, 16).unwrap()).collect()
}

pub fn parse_hex(s: &str) -> Option<Tensor> {
    s.chars().map(|ch| ch.to_digit(16).map(|d| d as u8)).collect()
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub n: usize,
    pub p: u32,
    pub classes_a: usize,
    pub classes_b: usize,
    pub same_canonicals: bool,
    /// |orbit| from expansion times |stab| from the transport action equals |GL|, for every class.
    pub orbit_stabilizer: bool,
    pub orbit_sum: u64,
    pub full_count: Option<u64>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.classes_a == self.classes_b
            && self.same_canonicals
            && self.orbit_stabilizer
            && self.full_count.map_or(true, |c| c == self.orbit_sum)
    }
}

pub fn run_oracle(n: usize, p: u32) -> Result<(OracleReport, FfClassification), FfError> {
    let a = classify_by_orbits(n, p)?;
    let b = classify_by_union_find(n, p)?;
    let order = gl_order(n, p);
    let stabs: HashMap<&Tensor, u64> = b.classes.iter().map(|c| (&c.canonical, c.stabilizer.unwrap())).collect();
    let orbit_stabilizer = a.classes.iter().all(|c| stabs.get(&c.canonical).map_or(false, |s| c.orbit_size * s == order));
    let report = OracleReport {
        n,
        p,
        classes_a: a.classes.len(),
        classes_b: b.classes.len(),
        same_canonicals: a.canonicals() == b.canonicals(),
        orbit_stabilizer,
        orbit_sum: a.orbit_sum(),
        full_count: full_space_count(n, p),
    };
    Ok((report, a))
}

#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub orbits: usize,
    /// Canonical forms of orbits on which some fingerprint component varies.
    pub varying: Vec<String>,
    /// Pairs of distinct classes sharing a fingerprint.
    pub collisions: Vec<(String, String)>,
}

pub fn invariant_crosscheck(cl: &FfClassification) -> InvariantReport {
    let (n, p) = (cl.n, cl.p);
    let group = general_linear_group(n, p);
    let results: Vec<(bool, FfFingerprint)> = cl
        .classes
        .par_iter()
        .map(|c| {
            let f0 = fingerprint(n, p, &c.canonical);
            let constant = orbit(n, p, &c.canonical, &group).iter().all(|x| fingerprint(n, p, x) == f0);
            (constant, f0)
        })
        .collect();
    let varying = cl.classes.iter().zip(results.iter()).filter(|(_, r)| !r.0).map(|(c, _)| hex(&c.canonical)).collect();
    let mut by_print: BTreeMap<&FfFingerprint, Vec<&FfClass>> = BTreeMap::new();
    for (c, (_, f)) in cl.classes.iter().zip(results.iter()) {
        by_print.entry(f).or_default().push(c);
    }
    let mut collisions = Vec::new();
    for group in by_print.values() {
        for w in group.windows(2) {
            collisions.push((hex(&w[0].canonical), hex(&w[1].canonical)));
        }
    }
    InvariantReport { orbits: cl.classes.len(), varying, collisions }
}

/// Reduce an algebra with constant structure constants mod p.
pub fn reduce(a: &Algebra, p: u32) -> Result<Tensor, FfError> {
    a.c.iter()
        .map(|x| x.as_constant().and_then(|g| g.mod_p(p as u64)).map(|v| v as u8).ok_or(FfError::NotIntegral(p)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub label: String,
    pub tensor: String,
    pub canonical: Option<String>,
    pub enumerated: bool,
}

/// Reduce each algebra mod p at every parameter point in {1, ..., p-1}^params
/// where the declared constraints stay nonzero mod p, then locate its class.
pub fn base_reductions(algs: &[&Algebra], cl: &FfClassification) -> Vec<Reduction> {
    let (n, p) = (cl.n, cl.p);
    let group = general_linear_group(n, p);
    let known = cl.canonicals();
    let mut out = Vec::new();
    for a in algs.iter().filter(|a| a.n == n) {
        let k = a.params.len();
        let points = ((p - 1) as u64).pow(k as u32);
        for code in 0..points {
            let mut x = code;
            let mut sample = HashMap::new();
            let mut label = a.name.clone();
            for v in &a.params {
                let val = (x % (p - 1) as u64) as i64 + 1;
                x /= (p - 1) as u64;
                sample.insert(*v, crate::scalar::Gq::from_int(val));
                let _ = write!(label, " {}={}", v.name(), val);
            }
            let allowed = a.constraints.iter().all(|c| c.eval(&sample).ok().and_then(|g| g.mod_p(p as u64)).map_or(false, |r| r != 0));
            if !allowed {
                continue;
            }
            let Ok(inst) = a.at(&sample) else { continue };
            let Ok(t) = reduce(&inst, p) else { continue };
            let canonical = if is_right_leibniz(n, p, &t) && is_nilpotent(n, p, &t) { canonical_form(n, p, &t, &group) } else { None };
            let enumerated = canonical.as_ref().map_or(false, |c| known.contains(c));
            out.push(Reduction { label, tensor: hex(&t), canonical: canonical.map(|c| hex(&c)), enumerated });
        }
    }
    out
}

/// Text form: one `hex orbit-size` line per class, then a summary block.
pub fn render(cl: &FfClassification) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n = {}, p = {}; entry (i*n + j)*n + k is the e_k coefficient of e_i e_j, one hex digit each", cl.n, cl.p);
    for c in &cl.classes {
        let _ = writeln!(out, "{} {}", hex(&c.canonical), c.orbit_size);
    }
    let _ = writeln!(out, "# classes {}", cl.classes.len());
    let _ = writeln!(out, "# tensors {}", cl.orbit_sum());
    for (size, count) in cl.histogram() {
        let _ = writeln!(out, "# orbit size {}: {}", size, count);
    }
    out
}
