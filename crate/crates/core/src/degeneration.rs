//! Degeneration certificates (parametrized bases and indices) and closed-set
//! evidence for non-degenerations.
//!
//! A certificate lists the new basis vectors E_i as Laurent combinations of
//! the old ones in the variable s, where t = s^m. The deformed structure
//! constants must be polynomial in s and agree with the target at s = 0.

use crate::algebra::{Algebra, AlgebraError};
use crate::catalog::Catalog;
use crate::invariants;
use crate::linalg::{self, Matrix};
use crate::scalar::{parse_combination, parse_scalar_with, s_var, Gq, Lin, ParseError, Poly, Scalar, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegenerationError {
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error("unknown algebra {0}")]
    UnknownAlgebra(String),
    #[error("the deformation basis is singular")]
    SingularDeformationBasis,
    #[error("could not resolve the constant {0}")]
    UnresolvedConstant(String),
    #[error("more than one unknown constant: {0}")]
    TooManyConstants(String),
    #[error("dimensions differ: source {src}, target {tgt}, basis {basis}")]
    Dimension { src: usize, tgt: usize, basis: usize },
    #[error("{0} does not lie in the closed set")]
    NotInClosedSet(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn perr(file: &str, line: usize, msg: impl Into<String>) -> DegenerationError {
    DegenerationError::Parse { file: file.to_string(), line, msg: msg.into() }
}

fn strip_comment(l: &str) -> &str {
    match l.find('#') {
        Some(p) => &l[..p],
        None => l,
    }
    .trim()
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub line: usize,
    pub source: String,
    /// Parametrized index: source parameters replaced simultaneously.
    pub source_params: Vec<(Var, Scalar)>,
    pub target: String,
    /// Target parameters written in terms of the source's.
    pub target_params: Vec<(Var, Scalar)>,
    pub m: u32,
    /// Row i holds the coordinates of E_{i+1}.
    pub basis: Matrix,
    source_text: String,
    target_text: String,
}

impl Certificate {
    pub fn proper(&self) -> bool {
        self.source != self.target
    }

    pub fn label(&self) -> String {
        let mut out = self.source.clone();
        if !self.source_text.is_empty() {
            out += &format!("{{{}}}", self.source_text);
        }
        out += " -> ";
        out += &self.target;
        if !self.target_text.is_empty() {
            out += &format!("{{{}}}", self.target_text);
        }
        out
    }

    fn substitution(list: &[(Var, Scalar)]) -> HashMap<Var, Scalar> {
        list.iter().cloned().collect()
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn t_resolver(m: u32) -> impl Fn(&str) -> Option<Lin> {
    move |name: &str| {
        if name == "t" {
            Some(Lin::scalar(Scalar::from_poly(Poly::var(s_var()).pow(m))))
        } else {
            None
        }
    }
}

fn parse_params(body: &str, m: u32) -> Result<Vec<(Var, Scalar)>, String> {
    let inner = body
        .trim()
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or("expected { name = value, ... }")?;
    let resolve = t_resolver(m);
    let mut out = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part.split_once('=').ok_or_else(|| format!("expected name = value in '{}'", part))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("bad parameter name '{}'", name));
        }
        let v = parse_scalar_with(value.trim(), &resolve).map_err(|e| e.to_string())?;
        out.push((Var::new(name), v));
    }
    Ok(out)
}

#[derive(Default)]
struct RawCert {
    line: usize,
    source: Option<String>,
    source_params: Option<(usize, String)>,
    target: Option<String>,
    target_params: Option<(usize, String)>,
    m: u32,
    vectors: Vec<(usize, usize, String)>,
}

fn finish_cert(raw: RawCert, file: &str) -> Result<Certificate, DegenerationError> {
    let line = raw.line;
    let source = raw.source.ok_or_else(|| perr(file, line, "missing source"))?;
    let target = raw.target.ok_or_else(|| perr(file, line, "missing target"))?;
    let m = raw.m;
    let n = raw.vectors.len();
    if n == 0 {
        return Err(perr(file, line, "no basis vectors"));
    }
    let mut basis = vec![Vec::new(); n];
    let resolve = t_resolver(m);
    let is_atom = move |name: &str| name.strip_prefix('e').and_then(|k| k.parse::<usize>().ok()).map_or(false, |k| k >= 1 && k <= n);
    for (l, idx, text) in &raw.vectors {
        if *idx < 1 || *idx > n || !basis[idx - 1].is_empty() {
            return Err(perr(file, *l, format!("E{} is out of range or repeated", idx)));
        }
        let combo = parse_combination(text, &is_atom, &resolve).map_err(|e| perr(file, *l, e.to_string()))?;
        let mut row = vec![Scalar::zero(); n];
        for (atom, c) in combo {
            let k: usize = atom[1..].parse().unwrap();
            row[k - 1] = c;
        }
        basis[idx - 1] = row;
    }
    let parse_opt = |p: &Option<(usize, String)>| -> Result<(Vec<(Var, Scalar)>, String), DegenerationError> {
        match p {
            Some((l, body)) => {
                let v = parse_params(body, m).map_err(|e| perr(file, *l, e))?;
                let text = body.trim().trim_start_matches('{').trim_end_matches('}').trim().to_string();
                Ok((v, text))
            }
            None => Ok((Vec::new(), String::new())),
        }
    };
    let (source_params, source_text) = parse_opt(&raw.source_params)?;
    let (target_params, target_text) = parse_opt(&raw.target_params)?;
    Ok(Certificate { line, source, source_params, target, target_params, m, basis, source_text, target_text })
}

/// Certificates are blocks starting at a `source = NAME` line.
pub fn parse_certificates(text: &str, file: &str) -> Result<Vec<Certificate>, DegenerationError> {
    let mut out = Vec::new();
    let mut cur: Option<RawCert> = None;
    for (ln, raw_line) in text.lines().enumerate() {
        let ln = ln + 1;
        let l = strip_comment(raw_line);
        if l.is_empty() {
            continue;
        }
        let (key, value) = l.split_once('=').map(|(k, v)| (k.trim(), v.trim())).ok_or_else(|| perr(file, ln, "expected key = value"))?;
        if key == "source" {
            if let Some(c) = cur.take() {
                out.push(finish_cert(c, file)?);
            }
            cur = Some(RawCert { line: ln, source: Some(value.to_string()), m: 1, ..Default::default() });
            continue;
        }
        let c = cur.as_mut().ok_or_else(|| perr(file, ln, "certificate must start with source = NAME"))?;
        match key {
            "source_params" => c.source_params = Some((ln, value.to_string())),
            "target_params" => c.target_params = Some((ln, value.to_string())),
            "target" => c.target = Some(value.to_string()),
            "reparam m" => {
                c.m = value.parse().ok().filter(|m: &u32| *m >= 1).ok_or_else(|| perr(file, ln, "m must be a positive integer"))?
            }
            k if k.starts_with('E') && k[1..].parse::<usize>().is_ok() => {
                c.vectors.push((ln, k[1..].parse().unwrap(), value.to_string()));
            }
            _ => return Err(perr(file, ln, format!("unknown key '{}'", key))),
        }
    }
    if let Some(c) = cur.take() {
        out.push(finish_cert(c, file)?);
    }
    Ok(out)
}

pub const SHIPPED_CERTS: &str = include_str!("../data/certs.txt");
pub const SHIPPED_RSETS: &str = include_str!("../data/rsets.txt");

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Valid,
    Pole { at: (usize, usize, usize), order: i64 },
    LimitMismatch { at: (usize, usize, usize), got: Scalar, want: Scalar },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => f.write_str("valid"),
            Verdict::Pole { at: (i, j, k), order } => write!(f, "pole at ({},{},{}) of order {}", i, j, k, -order),
            Verdict::LimitMismatch { at: (i, j, k), got, want } => {
                write!(f, "limit mismatch at ({},{},{}): got {}, want {}", i, j, k, got, want)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertReport {
    pub verdict: Verdict,
    /// The solved constant, when the basis contained one.
    pub constant: Option<(String, Scalar)>,
    /// Structure constants in the basis E_i, as functions of s.
    pub deformed: Algebra,
}

fn resolve_pair(cat: &Catalog, cert: &Certificate) -> Result<(Algebra, Algebra, BTreeSet<Var>), DegenerationError> {
    let src = cat.algebra(&cert.source).map_err(|_| DegenerationError::UnknownAlgebra(cert.source.clone()))?;
    let tgt = cat.algebra(&cert.target).map_err(|_| DegenerationError::UnknownAlgebra(cert.target.clone()))?;
    let mut known: BTreeSet<Var> = src.params.iter().chain(tgt.params.iter()).cloned().collect();
    known.insert(s_var());
    let src = src.substitute(&Certificate::substitution(&cert.source_params))?;
    let tgt = tgt.substitute(&Certificate::substitution(&cert.target_params))?;
    if src.n != tgt.n || src.n != cert.basis.len() {
        return Err(DegenerationError::Dimension { src: src.n, tgt: tgt.n, basis: cert.basis.len() });
    }
    Ok((src, tgt, known))
}

fn deform(src: &Algebra, basis: &Matrix) -> Result<Algebra, DegenerationError> {
    if linalg::determinant(basis).is_zero() {
        return Err(DegenerationError::SingularDeformationBasis);
    }
    src.change_basis(basis).map_err(|e| match e {
        AlgebraError::SingularMatrix => DegenerationError::SingularDeformationBasis,
        e => e.into(),
    })
}

fn triple(n: usize, idx: usize) -> (usize, usize, usize) {
    (idx / (n * n) + 1, (idx / n) % n + 1, idx % n + 1)
}

/// First failing entry in (i,j,k) order, or Valid.
fn judge(c: &Algebra, tgt: &Algebra) -> Result<Verdict, DegenerationError> {
    let s = s_var();
    for (idx, (x, want)) in c.c.iter().zip(tgt.c.iter()).enumerate() {
        let at = triple(c.n, idx);
        if let Some(order) = x.order_in(s) {
            if order < 0 {
                return Ok(Verdict::Pole { at, order });
            }
        }
        let got = x.limit_at_zero(s).map_err(AlgebraError::from)?;
        if !got.equals(want) {
            return Ok(Verdict::LimitMismatch { at, got, want: want.clone() });
        }
    }
    Ok(Verdict::Valid)
}

/// Every condition that must vanish: leading coefficients of poles, then limit differences.
fn conditions(c: &Algebra, tgt: &Algebra) -> Result<Vec<Scalar>, DegenerationError> {
    let s = s_var();
    let sv = Scalar::from_poly(Poly::var(s));
    let mut out = Vec::new();
    for (x, want) in c.c.iter().zip(tgt.c.iter()) {
        match x.order_in(s) {
            Some(k) if k < 0 => {
                let lifted = x.mul(&sv.pow(-k as i32).map_err(AlgebraError::from)?);
                out.push(lifted.limit_at_zero(s).map_err(AlgebraError::from)?);
            }
            _ => {
                let d = x.limit_at_zero(s).map_err(AlgebraError::from)?.sub(want);
                if !d.is_zero() {
                    out.push(d);
                }
            }
        }
    }
    Ok(out)
}

/// Candidate values of v from the conditions that are linear in it.
fn linear_candidates(conds: &[Scalar], v: Var) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = Vec::new();
    for c in conds {
        let num = c.num();
        if num.degree_in(v) != 1 {
            continue;
        }
        let c1 = Scalar::from_poly(num.coeff_of(v, 1));
        let c0 = Scalar::from_poly(num.coeff_of(v, 0));
        if let Ok(x) = c0.neg().div(&c1) {
            if !x.vars().contains(&s_var()) && !out.iter().any(|y| y.equals(&x)) {
                out.push(x);
            }
        }
    }
    out
}

pub fn check_certificate(cat: &Catalog, cert: &Certificate) -> Result<CertReport, DegenerationError> {
    let (src, tgt, known) = resolve_pair(cat, cert)?;
    let mut unknown: BTreeSet<Var> = BTreeSet::new();
    for x in cert.basis.iter().flatten().chain(cert.source_params.iter().map(|(_, x)| x)) {
        unknown.extend(x.vars().into_iter().filter(|v| !known.contains(v)));
    }
    let mut unknown: Vec<Var> = unknown.into_iter().collect();
    unknown.sort_by_key(|v| v.name());
    if unknown.len() > 1 {
        let names: Vec<String> = unknown.iter().map(|v| v.name()).collect();
        return Err(DegenerationError::TooManyConstants(names.join(", ")));
    }
    let deformed = deform(&src, &cert.basis)?;
    let e = match unknown.first() {
        None => return Ok(CertReport { verdict: judge(&deformed, &tgt)?, constant: None, deformed }),
        Some(e) => *e,
    };
    let det = linalg::determinant(&cert.basis);
    for value in linear_candidates(&conditions(&deformed, &tgt)?, e) {
        let sub: HashMap<Var, Scalar> = [(e, value.clone())].into_iter().collect();
        match det.substitute(&sub) {
            Ok(d) if !d.is_zero() => {}
            _ => continue,
        }
        let fixed = match deformed.substitute(&sub) {
            Ok(a) => a,
            Err(_) => continue,
        };
        if judge(&fixed, &tgt)? == Verdict::Valid {
            return Ok(CertReport { verdict: Verdict::Valid, constant: Some((e.name(), value)), deformed: fixed });
        }
    }
    Err(DegenerationError::UnresolvedConstant(e.name()))
}

const SAMPLE_VALUES: [i64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

#[derive(Clone, Debug, PartialEq)]
pub struct DerRow {
    pub sample: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug)]
pub struct DerCheck {
    pub proper: bool,
    /// The index moves with t, so the source is a one-parameter family whose
    /// orbit closure has one more dimension than a single orbit: the bound
    /// becomes dim Der(A(f(t))) <= dim Der(B).
    pub family: bool,
    pub rows: Vec<DerRow>,
}

impl DerCheck {
    pub fn consistent(&self) -> bool {
        let ok = |r: &DerRow| if self.family { r.source <= r.target } else { r.source < r.target };
        !self.proper || (!self.rows.is_empty() && self.rows.iter().all(ok))
    }

    /// Whether the single-algebra bound dim Der(A) < dim Der(B) holds at every sample.
    pub fn strict(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.source < r.target)
    }
}

pub fn moving_index(cert: &Certificate) -> bool {
    cert.source_params.iter().any(|(_, x)| x.vars().contains(&s_var()))
}

/// Compare dim Der of source and target at up to k samples drawn from 2, 3, 5, ...
/// (every free symbol, the deformation variable included, gets a value).
pub fn check_derivation_necessary(cat: &Catalog, cert: &Certificate, k: usize) -> Result<DerCheck, DegenerationError> {
    let family = moving_index(cert);
    if !cert.proper() {
        return Ok(DerCheck { proper: false, family, rows: Vec::new() });
    }
    let (src, tgt, _) = resolve_pair(cat, cert)?;
    let mut vars: Vec<Var> = src.c.iter().chain(tgt.c.iter()).flat_map(|x| x.vars()).collect::<BTreeSet<_>>().into_iter().collect();
    vars.sort_by_key(|v| v.name());
    let mut rows = Vec::new();
    let mut j = 0;
    while rows.len() < k && j < 64 {
        let sample: HashMap<Var, Gq> = vars
            .iter()
            .enumerate()
            .map(|(p, v)| (*v, Gq::from_int(SAMPLE_VALUES[(j + p) % SAMPLE_VALUES.len()] + 20 * ((j + p) / SAMPLE_VALUES.len()) as i64)))
            .collect();
        j += 1;
        if !invariants::sample_is_allowed(&src, &sample) || !invariants::sample_is_allowed(&tgt, &sample) {
            continue;
        }
        let (a, b) = match (src.at(&sample), tgt.at(&sample)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        let label: Vec<String> = vars.iter().map(|v| format!("{}={}", v.name(), sample[v])).collect();
        rows.push(DerRow { sample: label.join(","), source: invariants::der_dim(&a)?, target: invariants::der_dim(&b)? });
        if vars.is_empty() {
            break;
        }
    }
    Ok(DerCheck { proper: true, family, rows })
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub text: String,
    pub poly: Poly,
    /// Structure-constant variables appearing in the relation, with their 0-based (i, j, k).
    pub vars: Vec<(Var, (usize, usize, usize))>,
}

#[derive(Clone, Debug)]
pub struct ClosedSet {
    pub name: String,
    pub dim: usize,
    pub source: Option<String>,
    pub targets: Vec<String>,
    /// f_i = e_{relabel[i]} (0-based), when a preliminary relabeling is given.
    pub relabel: Option<Vec<usize>>,
    /// A_p A_q ⊂ A_r as (p, q, r), 1-based; r = dim + 1 means the product vanishes.
    pub contains: Vec<(usize, usize, usize)>,
    pub relations: Vec<Relation>,
}

fn constant_var(name: &str, n: usize) -> Option<(usize, usize, usize)> {
    let rest = name.strip_prefix('c')?;
    let (ij, k) = rest.split_once('_')?;
    let d: Vec<usize> = ij.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>()?;
    let k: usize = k.parse().ok()?;
    if d.len() != 2 || [d[0], d[1], k].iter().any(|&x| x < 1 || x > n) {
        return None;
    }
    Some((d[0] - 1, d[1] - 1, k - 1))
}

pub fn parse_relation(text: &str, n: usize) -> Result<Relation, String> {
    let (l, r) = text.split_once('=').ok_or("relation needs '='")?;
    let none = |_: &str| None;
    let l = parse_scalar_with(l.trim(), &none).map_err(|e: ParseError| e.to_string())?;
    let r = parse_scalar_with(r.trim(), &none).map_err(|e: ParseError| e.to_string())?;
    let poly = l.sub(&r).as_poly().ok_or("relation must be polynomial")?;
    let mut vars = Vec::new();
    let mut names: Vec<Var> = poly.vars().into_iter().collect();
    names.sort_by_key(|v| v.name());
    for v in names {
        let idx = constant_var(&v.name(), n).ok_or_else(|| format!("'{}' is not a structure constant c<i><j>_<k>", v.name()))?;
        vars.push((v, idx));
    }
    Ok(Relation { text: text.trim().to_string(), poly, vars })
}

fn space_index(s: &str, n: usize) -> Option<usize> {
    let k: usize = s.strip_prefix('A')?.parse().ok()?;
    if k >= 1 && k <= n + 1 {
        Some(k)
    } else {
        None
    }
}

/// Blocks `rset NAME` ... `end` with source, targets, relabel, contain and relation lines.
pub fn parse_closed_sets(text: &str, file: &str) -> Result<Vec<ClosedSet>, DegenerationError> {
    let mut out = Vec::new();
    let mut cur: Option<ClosedSet> = None;
    let mut pending_relabel: Vec<(usize, usize, usize)> = Vec::new();
    for (ln, raw_line) in text.lines().enumerate() {
        let ln = ln + 1;
        let l = strip_comment(raw_line);
        if l.is_empty() {
            continue;
        }
        let (word, rest) = match l.split_once(char::is_whitespace) {
            Some((w, r)) => (w, r.trim()),
            None => (l, ""),
        };
        if word == "rset" {
            if cur.is_some() {
                return Err(perr(file, ln, "missing end"));
            }
            if rest.is_empty() {
                return Err(perr(file, ln, "rset needs a name"));
            }
            cur = Some(ClosedSet {
                name: rest.to_string(),
                dim: 5,
                source: None,
                targets: Vec::new(),
                relabel: None,
                contains: Vec::new(),
                relations: Vec::new(),
            });
            pending_relabel.clear();
            continue;
        }
        let c = cur.as_mut().ok_or_else(|| perr(file, ln, "expected rset NAME"))?;
        let n = c.dim;
        match word {
            "dim" => {
                if !c.contains.is_empty() || !c.relations.is_empty() || !pending_relabel.is_empty() {
                    return Err(perr(file, ln, "dim must come before the conditions"));
                }
                c.dim = rest.parse().ok().filter(|d: &usize| *d >= 1 && *d <= 9).ok_or_else(|| perr(file, ln, "bad dim"))?;
            }
            "source" => c.source = Some(rest.to_string()),
            "targets" => c.targets = rest.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            "relabel" => {
                let (f, e) = rest.split_once('=').ok_or_else(|| perr(file, ln, "expected relabel f<i> = e<j>"))?;
                let fi = f.trim().strip_prefix('f').and_then(|k| k.parse::<usize>().ok()).filter(|k| *k >= 1 && *k <= n);
                let ej = e.trim().strip_prefix('e').and_then(|k| k.parse::<usize>().ok()).filter(|k| *k >= 1 && *k <= n);
                match (fi, ej) {
                    (Some(i), Some(j)) => pending_relabel.push((ln, i - 1, j - 1)),
                    _ => return Err(perr(file, ln, "expected relabel f<i> = e<j> within the dimension")),
                }
            }
            "contain" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let r = match toks.as_slice() {
                    [_, _, "in", r] => space_index(r, n),
                    [_, _, "=", "0"] => Some(n + 1),
                    _ => None,
                };
                let p = toks.first().and_then(|t| space_index(t, n)).filter(|p| *p <= n);
                let q = toks.get(1).and_then(|t| space_index(t, n)).filter(|q| *q <= n);
                match (p, q, r) {
                    (Some(p), Some(q), Some(r)) => c.contains.push((p, q, r)),
                    _ => return Err(perr(file, ln, "expected contain A<p> A<q> in A<r>")),
                }
            }
            "relation" => c.relations.push(parse_relation(rest, n).map_err(|e| perr(file, ln, e))?),
            "end" => {
                let mut c = cur.take().unwrap();
                if !pending_relabel.is_empty() {
                    let mut map: Vec<usize> = (0..c.dim).collect();
                    for &(_, i, j) in &pending_relabel {
                        map[i] = j;
                    }
                    let mut seen = map.clone();
                    seen.sort_unstable();
                    if seen != (0..c.dim).collect::<Vec<_>>() {
                        return Err(perr(file, pending_relabel[0].0, "relabeling is not a permutation"));
                    }
                    c.relabel = Some(map);
                }
                pending_relabel.clear();
                out.push(c);
            }
            _ => return Err(perr(file, ln, format!("unknown directive '{}'", word))),
        }
    }
    if let Some(c) = cur {
        return Err(perr(file, text.lines().count(), format!("rset {} is missing end", c.name)));
    }
    Ok(out)
}

impl ClosedSet {
    pub fn apply_relabel(&self, a: &Algebra) -> Result<Algebra, AlgebraError> {
        match &self.relabel {
            None => Ok(a.clone()),
            Some(map) => {
                let p: Matrix = map.iter().map(|&j| crate::algebra::unit(a.n, j)).collect();
                a.change_basis(&p)
            }
        }
    }

    /// The entries forced to vanish by the containments, 0-based.
    pub fn forced_zeros(&self) -> Vec<(usize, usize, usize)> {
        let n = self.dim;
        let mut out = BTreeSet::new();
        for &(p, q, r) in &self.contains {
            for i in p - 1..n {
                for j in q - 1..n {
                    for k in 0..r - 1 {
                        out.insert((i, j, k));
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Same set with one condition removed (for negative controls).
    pub fn without_containment(&self, idx: usize) -> ClosedSet {
        let mut c = self.clone();
        c.contains.remove(idx);
        c.name = format!("{} without containment {}", self.name, idx + 1);
        c
    }
}

/// The conditions of R that fail for `a` (after the relabeling), as text.
pub fn membership_failures(a: &Algebra, r: &ClosedSet, sample: Option<&HashMap<Var, Gq>>) -> Result<Vec<String>, AlgebraError> {
    let mut a = r.apply_relabel(a)?;
    if let Some(s) = sample {
        a = a.at(s)?;
    }
    let mut bad = Vec::new();
    for (i, j, k) in r.forced_zeros() {
        if !a.get(i, j, k).is_zero() {
            bad.push(format!("c{}{}_{} = {}", i + 1, j + 1, k + 1, a.get(i, j, k)));
        }
    }
    for rel in &r.relations {
        let sub: HashMap<Var, Scalar> = rel.vars.iter().map(|(v, (i, j, k))| (*v, a.get(*i, *j, *k).clone())).collect();
        let val = Scalar::from_poly(rel.poly.clone()).substitute(&sub)?;
        if !val.is_zero() {
            bad.push(format!("{} (residual {})", rel.text, val));
        }
    }
    Ok(bad)
}

pub fn closed_set_membership(a: &Algebra, r: &ClosedSet, sample: Option<&HashMap<Var, Gq>>) -> Result<bool, AlgebraError> {
    Ok(membership_failures(a, r, sample)?.is_empty())
}

fn numeric_member(n: usize, c: &[Gq], r: &ClosedSet, zeros: &[(usize, usize, usize)]) -> bool {
    zeros.iter().all(|&(i, j, k)| c[(i * n + j) * n + k].is_zero())
        && r.relations.iter().all(|rel| {
            let at: HashMap<Var, Gq> = rel.vars.iter().map(|(v, (i, j, k))| (*v, c[(i * n + j) * n + k].clone())).collect();
            rel.poly.eval(&at).map(|x| x.is_zero()).unwrap_or(false)
        })
}

/// Structure constants of a constant tensor in the basis f_i = Σ_j P_ij e_j.
pub fn transform_constant(n: usize, c: &[Gq], p: &[Vec<Gq>]) -> Option<Vec<Gq>> {
    let pinv = linalg::inverse_gq(p)?;
    let mut out = vec![Gq::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            let mut v = vec![Gq::zero(); n];
            for a in 0..n {
                if p[i][a].is_zero() {
                    continue;
                }
                for b in 0..n {
                    if p[j][b].is_zero() {
                        continue;
                    }
                    let w = &p[i][a] * &p[j][b];
                    for (l, vl) in v.iter_mut().enumerate() {
                        let x = &c[(a * n + b) * n + l];
                        if !x.is_zero() {
                            *vl = &*vl + &(&w * x);
                        }
                    }
                }
            }
            for k in 0..n {
                let mut acc = Gq::zero();
                for (l, vl) in v.iter().enumerate() {
                    if !vl.is_zero() && !pinv[l][k].is_zero() {
                        acc = &acc + &(vl * &pinv[l][k]);
                    }
                }
                out[(i * n + j) * n + k] = acc;
            }
        }
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeOutcome {
    /// No trial produced the event looked for.
    Clean { trials: usize },
    /// The trial that did, with its parameter sample and matrix (rows are new vectors).
    Hit { trial: usize, sample: Vec<(String, Gq)>, matrix: Vec<Vec<Gq>> },
}

impl ProbeOutcome {
    pub fn is_clean(&self) -> bool {
        matches!(self, ProbeOutcome::Clean { .. })
    }
}

fn random_sample(a: &Algebra, rng: &mut ChaCha8Rng) -> Option<(Vec<(String, Gq)>, Vec<Gq>)> {
    let mut params = a.params.clone();
    params.sort_by_key(|v| v.name());
    for _ in 0..64 {
        let sample: HashMap<Var, Gq> = params
            .iter()
            .map(|v| {
                let mut x = 0;
                while x == 0 {
                    x = rng.gen_range(-6..=6);
                }
                (*v, Gq::from_int(x))
            })
            .collect();
        if !invariants::sample_is_allowed(a, &sample) {
            continue;
        }
        if let Ok(b) = a.at(&sample) {
            if let Some(c) = b.c.iter().map(|x| x.as_constant()).collect::<Option<Vec<Gq>>>() {
                let label = params.iter().map(|v| (v.name(), sample[v].clone())).collect();
                return Some((label, c));
            }
        }
    }
    None
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng, upper: bool) -> Vec<Vec<Gq>> {
    loop {
        let m: Vec<Vec<Gq>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if upper && j < i {
                            Gq::zero()
                        } else if upper && j == i {
                            let mut x = 0;
                            while x == 0 {
                                x = rng.gen_range(-4..=4);
                            }
                            Gq::from_int(x)
                        } else {
                            Gq::from_int(rng.gen_range(-4..=4))
                        }
                    })
                    .collect()
            })
            .collect();
        if linalg::inverse_gq(&m).is_some() {
            return m;
        }
    }
}

fn identity_gq(n: usize) -> Vec<Vec<Gq>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Gq::one() } else { Gq::zero() }).collect()).collect()
}

/// Random invertible upper-triangular changes of basis of samples of `a` (after
/// the relabeling) must stay in R. Trial 0 uses the identity.
pub fn borel_stability_probe(r: &ClosedSet, a: &Algebra, trials: usize, seed: u64) -> Result<ProbeOutcome, DegenerationError> {
    let a = r.apply_relabel(a)?;
    let plain = ClosedSet { relabel: None, ..r.clone() };
    if !closed_set_membership(&a, &plain, None)? {
        return Err(DegenerationError::NotInClosedSet(a.name.clone()));
    }
    let zeros = r.forced_zeros();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let (sample, c) = random_sample(&a, &mut rng).ok_or_else(|| DegenerationError::NotInClosedSet(a.name.clone()))?;
        let p = if trial == 0 { identity_gq(a.n) } else { random_matrix(a.n, &mut rng, true) };
        let moved = transform_constant(a.n, &c, &p).expect("matrix is invertible");
        if !numeric_member(a.n, &moved, r, &zeros) {
            return Ok(ProbeOutcome::Hit { trial, sample, matrix: p });
        }
    }
    Ok(ProbeOutcome::Clean { trials })
}

/// Random invertible changes of basis of samples of `b`; a hit means b was
/// represented inside R. Trial 0 uses the identity.
pub fn target_membership_probe(b: &Algebra, r: &ClosedSet, trials: usize, seed: u64) -> Result<ProbeOutcome, DegenerationError> {
    let zeros = r.forced_zeros();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let (sample, c) = random_sample(b, &mut rng).ok_or_else(|| DegenerationError::UnknownAlgebra(b.name.clone()))?;
        let p = if trial == 0 { identity_gq(b.n) } else { random_matrix(b.n, &mut rng, false) };
        let moved = transform_constant(b.n, &c, &p).expect("matrix is invertible");
        if numeric_member(b.n, &moved, r, &zeros) {
            return Ok(ProbeOutcome::Hit { trial, sample, matrix: p });
        }
    }
    Ok(ProbeOutcome::Clean { trials })
}

pub fn shipped_certificates() -> Vec<Certificate> {
    parse_certificates(SHIPPED_CERTS, "certs.txt").expect("shipped certificates parse")
}

pub fn shipped_closed_sets() -> Vec<ClosedSet> {
    parse_closed_sets(SHIPPED_RSETS, "rsets.txt").expect("shipped closed sets parse")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;

    fn one(src: &str) -> Certificate {
        parse_certificates(src, "test").unwrap().remove(0)
    }

    #[test]
    fn identity_certificate_is_valid_and_not_proper() {
        let cat = Catalog::shipped();
        let c = one("source = L04\ntarget = L04\nE1 = e1\nE2 = e2\nE3 = e3\nE4 = e4\nE5 = e5\n");
        assert_eq!(check_certificate(&cat, &c).unwrap().verdict, Verdict::Valid);
        assert!(!check_derivation_necessary(&cat, &c, 3).unwrap().proper);
    }

    #[test]
    fn first_row_and_its_der_check() {
        let cat = Catalog::shipped();
        let c = one("source = L04\ntarget = L01\nreparam m = 1\nE1 = t^-1*e1\nE2 = t^-2*e2\nE3 = t^-1*e3\nE4 = t^-3*e4\nE5 = t^-2*e5\n");
        assert_eq!(check_certificate(&cat, &c).unwrap().verdict, Verdict::Valid);
        let d = check_derivation_necessary(&cat, &c, 3).unwrap();
        assert!(d.consistent());
        assert!(d.rows[0].source < d.rows[0].target);
    }

    #[test]
    fn wrong_scaling_gives_a_pole() {
        let cat = Catalog::shipped();
        let c = one("source = L04\ntarget = L01\nE1 = t*e1\nE2 = e2\nE3 = e3\nE4 = e4\nE5 = e5\n");
        assert!(matches!(check_certificate(&cat, &c).unwrap().verdict, Verdict::Pole { .. } | Verdict::LimitMismatch { .. }));
    }

    #[test]
    fn singular_basis_is_an_error() {
        let cat = Catalog::shipped();
        let c = one("source = L04\ntarget = L01\nE1 = e1\nE2 = e1\nE3 = e3\nE4 = e4\nE5 = e5\n");
        assert_eq!(check_certificate(&cat, &c).unwrap_err(), DegenerationError::SingularDeformationBasis);
    }

    #[test]
    fn parse_errors_have_lines() {
        match parse_certificates("source = L01\ntarget = L01\nE1 = e1 +\n", "x") {
            Err(DegenerationError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{:?}", other),
        }
        assert!(parse_certificates("target = L01\n", "x").is_err());
        assert!(parse_closed_sets("rset X\ncontain A1 A7 in A2\nend\n", "x").is_err());
        assert!(parse_closed_sets("rset X\nrelation c11_3 = x\nend\n", "x").is_err());
    }

    #[test]
    fn zero_algebra_lies_in_any_containment_set() {
        let r = parse_closed_sets("rset Z\ncontain A1 A1 in A3\ncontain A1 A3 = 0\nend\n", "x").unwrap().remove(0);
        assert!(closed_set_membership(&Algebra::zero(5), &r, None).unwrap());
        assert!(borel_stability_probe(&r, &Algebra::zero(5), 5, 1).unwrap().is_clean());
    }

    #[test]
    fn identity_trial_enters_own_set() {
        let cat = Catalog::shipped();
        let r = shipped_closed_sets().into_iter().find(|r| r.name == "L79").unwrap();
        let a = cat.algebra("L79").unwrap();
        assert!(matches!(target_membership_probe(a, &r, 1, 0).unwrap(), ProbeOutcome::Hit { trial: 0, .. }));
    }

    #[test]
    fn transform_matches_symbolic_change_of_basis() {
        let cat = Catalog::shipped();
        let a = cat.algebra("L28").unwrap();
        let mut sample = HashMap::new();
        sample.insert(Var::new("alpha"), Gq::from_int(3));
        let b = a.at(&sample).unwrap();
        let p = vec![
            vec![1, 2, 0, 0, 1],
            vec![0, 1, 3, 0, 0],
            vec![0, 0, 1, 1, 0],
            vec![0, 0, 0, 2, 0],
            vec![1, 0, 0, 0, 3],
        ];
        let pg: Vec<Vec<Gq>> = p.iter().map(|r| r.iter().map(|&x| Gq::from_int(x)).collect()).collect();
        let ps: Matrix = p.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect();
        let c: Vec<Gq> = b.c.iter().map(|x| x.as_constant().unwrap()).collect();
        let num = transform_constant(5, &c, &pg).unwrap();
        let sym = b.change_basis(&ps).unwrap();
        for (x, y) in num.iter().zip(sym.c.iter()) {
            assert_eq!(Scalar::constant(x.clone()), *y);
        }
    }
}
