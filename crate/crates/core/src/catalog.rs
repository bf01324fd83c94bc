//! Text formats for algebras, orbit tables and action tables, and the
//! reconstruction of the five-dimensional catalog from bases and orbits.

use crate::action::{ActionTable, AutFamily};
use crate::algebra::{Algebra, AlgebraError};
use crate::cohomology::{self, BilinearForm, CohomologyError};
use crate::extension::{self, ExtensionError};
use crate::invariants;
use crate::linalg::LinalgError;
use crate::scalar::{parse_combination, parse_scalar, ParseError, Poly, Scalar, Var};
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

pub const SHIPPED_BASES: &str = include_str!("../data/bases.txt");
pub const SHIPPED_ORBITS: &str = include_str!("../data/orbits.txt");
pub const SHIPPED_FAMILIES: &str = include_str!("../data/families.txt");
pub const SHIPPED_CATALOG: &str = include_str!("../data/catalog.txt");
pub const SHIPPED_ACTIONS: &str = include_str!("../data/actions.txt");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("{file}:{line}:{col}: {msg}")]
    Parse { file: String, line: usize, col: usize, msg: String },
    #[error("{name}: {msg}")]
    Validation { name: String, msg: String },
    #[error("unknown algebra {0}")]
    Unknown(String),
    #[error("{name}: {source}")]
    Extension { name: String, source: ExtensionError },
    #[error("{0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryKind {
    Base,
    Extension,
    Symmetric,
    Split,
}

impl EntryKind {
    fn parse(s: &str) -> Option<EntryKind> {
        Some(match s {
            "base" => EntryKind::Base,
            "extension" => EntryKind::Extension,
            "symmetric" => EntryKind::Symmetric,
            "split" => EntryKind::Split,
            _ => return None,
        })
    }
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryKind::Base => "base",
            EntryKind::Extension => "extension",
            EntryKind::Symmetric => "symmetric",
            EntryKind::Split => "split",
        })
    }
}

/// `name = value` pairs, kept as source text.
pub type Assignments = Vec<(String, String)>;

fn fmt_assignments(a: &Assignments) -> String {
    a.iter().map(|(k, v)| format!("{} = {}", k, v)).collect::<Vec<_>>().join(", ")
}

fn parse_assignments(s: &str) -> Option<Assignments> {
    s.split(',')
        .map(|part| {
            let (k, v) = part.split_once('=')?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return None;
            }
            Some((k.to_string(), v.to_string()))
        })
        .collect()
}

/// Base plus representative <θ1, ..., θs>, optionally at fixed parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub base: String,
    pub reps: Vec<String>,
    pub at: Assignments,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}>", self.base, self.reps.join(", "))?;
        if !self.at.is_empty() {
            write!(f, " at {}", fmt_assignments(&self.at))?;
        }
        Ok(())
    }
}

fn parse_provenance(s: &str) -> Option<Provenance> {
    let (base, rest) = s.split_once('<')?;
    let (reps, tail) = rest.split_once('>')?;
    let tail = tail.trim();
    let at = if tail.is_empty() {
        Vec::new()
    } else {
        parse_assignments(tail.strip_prefix("at")?)?
    };
    Some(Provenance {
        base: base.trim().to_string(),
        reps: reps.split(',').map(|r| r.trim().to_string()).collect(),
        at,
    })
}

/// The member with parameters `map` (at `at`, when `condition` ≠ 0) is
/// isomorphic to the member with the original parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Identification {
    pub map: Vec<(String, String)>,
    pub at: Assignments,
    pub condition: Option<String>,
}

impl fmt::Display for Identification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.map.iter().map(|(k, v)| format!("{} -> {}", k, v)).collect();
        write!(f, "{}", m.join(", "))?;
        if !self.at.is_empty() {
            write!(f, " at {}", fmt_assignments(&self.at))?;
        }
        if let Some(c) = &self.condition {
            write!(f, " if {}", c)?;
        }
        Ok(())
    }
}

fn parse_identification(s: &str) -> Option<Identification> {
    let (s, condition) = match s.rsplit_once(" if ") {
        Some((a, c)) => (a, Some(c.trim().to_string())),
        None => (s, None),
    };
    let (s, at) = match s.split_once(" at ") {
        Some((a, b)) => (a, parse_assignments(b)?),
        None => (s, Vec::new()),
    };
    let map = s
        .split(',')
        .map(|p| {
            let (k, v) = p.split_once("->")?;
            Some((k.trim().to_string(), v.trim().to_string()))
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Identification { map, at, condition })
}

/// Parameter value at which a generic entry specialises to another entry.
#[derive(Clone, Debug, PartialEq)]
pub struct Special {
    pub param: String,
    pub value: String,
    pub entry: String,
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub algebra: Algebra,
    pub kind: EntryKind,
    pub declared: Vec<String>,
    pub h2: Option<usize>,
    pub nabla: Vec<String>,
    pub from: Option<Provenance>,
    pub split: Option<String>,
    pub specials: Vec<Special>,
    pub identify: Vec<Identification>,
    pub notes: Vec<String>,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Entry) -> bool {
        self.algebra.name == o.algebra.name
            && self.algebra.tensor_eq(&o.algebra)
            && self.algebra.constraints == o.algebra.constraints
            && self.kind == o.kind
            && self.declared == o.declared
            && self.h2 == o.h2
            && self.nabla == o.nabla
            && self.from == o.from
            && self.split == o.split
            && self.specials == o.specials
            && self.identify == o.identify
            && self.notes == o.notes
    }
}

impl Entry {
    pub fn new(algebra: Algebra, kind: EntryKind) -> Entry {
        let declared = algebra.params.iter().map(|v| v.name()).collect();
        Entry {
            algebra,
            kind,
            declared,
            h2: None,
            nabla: Vec::new(),
            from: None,
            split: None,
            specials: Vec::new(),
            identify: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.algebra.name
    }

    pub fn nabla_forms(&self) -> Result<Vec<BilinearForm>, ParseError> {
        self.nabla.iter().map(|s| BilinearForm::parse(self.algebra.n, s)).collect()
    }

    pub fn emit(&self) -> String {
        let a = &self.algebra;
        let mut out = format!("algebra {}\nkind {}\ndim {}\n", a.name, self.kind, a.n);
        if !self.declared.is_empty() {
            out += &format!("params {}\n", self.declared.join(", "));
        }
        for c in &a.constraints {
            out += &format!("nonzero {}\n", c);
        }
        if let Some(h) = self.h2 {
            out += &format!("h2 {}\n", h);
        }
        if !self.nabla.is_empty() {
            out += &format!("nabla {}\n", self.nabla.join("; "));
        }
        if let Some(p) = &self.from {
            out += &format!("from {}\n", p);
        }
        if let Some(s) = &self.split {
            out += &format!("split {}\n", s);
        }
        for s in &self.specials {
            out += &format!("special {} = {} : {}\n", s.param, s.value, s.entry);
        }
        for i in &self.identify {
            out += &format!("identify {}\n", i);
        }
        for n in &self.notes {
            out += &format!("note {}\n", n);
        }
        for l in a.product_lines() {
            out += &l;
            out.push('\n');
        }
        out += "end\n";
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Catalog {
    pub entries: Vec<Entry>,
}

impl Catalog {
    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name() == name)
    }

    pub fn algebra(&self, name: &str) -> Result<&Algebra, CatalogError> {
        self.get(name).map(|e| &e.algebra).ok_or_else(|| CatalogError::Unknown(name.to_string()))
    }

    pub fn of_kind(&self, kind: EntryKind) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(move |e| e.kind == kind)
    }

    pub fn emit(&self) -> String {
        self.entries.iter().map(|e| e.emit()).collect::<Vec<_>>().join("\n")
    }

    pub fn merge(mut self, o: Catalog) -> Catalog {
        self.entries.extend(o.entries);
        self
    }

    /// Bases, extensions, symmetric families and split algebras as shipped.
    pub fn shipped() -> Catalog {
        let bases = load_catalog_str(SHIPPED_BASES, "bases.txt").expect("shipped bases parse");
        let main = load_catalog_str(SHIPPED_CATALOG, "catalog.txt").expect("shipped catalog parses");
        bases.merge(main)
    }
}

fn perr(file: &str, line: usize, col: usize, msg: impl Into<String>) -> CatalogError {
    CatalogError::Parse { file: file.to_string(), line, col, msg: msg.into() }
}

fn scalar_err(file: &str, line: usize, offset: usize, e: ParseError) -> CatalogError {
    match e {
        ParseError::Syntax { col, msg } => perr(file, line, offset + col, msg),
        ParseError::Eval(msg) => perr(file, line, offset + 1, msg),
    }
}

fn basis_index(s: &str, n: usize) -> Option<usize> {
    let k: usize = s.strip_prefix('e')?.parse().ok()?;
    if k >= 1 && k <= n {
        Some(k)
    } else {
        None
    }
}

struct Block {
    name: String,
    kind: Option<EntryKind>,
    dim: Option<usize>,
    declared: Vec<String>,
    constraints: Vec<Poly>,
    h2: Option<usize>,
    nabla: Vec<String>,
    from: Option<Provenance>,
    split: Option<String>,
    specials: Vec<Special>,
    identify: Vec<Identification>,
    notes: Vec<String>,
    products: Vec<(usize, usize, usize, Scalar)>,
    start: usize,
}

/// Parse catalog-format text without validating the algebras.
pub fn parse_catalog(text: &str, file: &str) -> Result<Catalog, CatalogError> {
    let mut entries = Vec::new();
    let mut cur: Option<Block> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let t = body.trim();
        if t.is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        let (key, rest) = match t.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (t, ""),
        };
        let rest_col = indent + t.len() - rest.len() + 1;
        let Some(b) = cur.as_mut() else {
            if key != "algebra" || rest.is_empty() {
                return Err(perr(file, line, indent + 1, "expected 'algebra <name>'"));
            }
            cur = Some(Block {
                name: rest.to_string(),
                kind: None,
                dim: None,
                declared: Vec::new(),
                constraints: Vec::new(),
                h2: None,
                nabla: Vec::new(),
                from: None,
                split: None,
                specials: Vec::new(),
                identify: Vec::new(),
                notes: Vec::new(),
                products: Vec::new(),
                start: line,
            });
            continue;
        };
        match key {
            "end" => {
                let b = cur.take().unwrap();
                entries.push(finish_block(b, file)?);
            }
            "kind" => b.kind = Some(EntryKind::parse(rest).ok_or_else(|| perr(file, line, rest_col, "unknown kind"))?),
            "dim" => {
                let n: usize = rest.parse().map_err(|_| perr(file, line, rest_col, "bad dimension"))?;
                if n == 0 {
                    return Err(perr(file, line, rest_col, "dimension must be positive"));
                }
                b.dim = Some(n);
            }
            "params" => b.declared = rest.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            "nonzero" => {
                let s = parse_scalar(rest).map_err(|e| scalar_err(file, line, rest_col - 1, e))?;
                let p = s.as_poly().ok_or_else(|| perr(file, line, rest_col, "constraint must be a polynomial"))?;
                b.constraints.push(p);
            }
            "h2" => b.h2 = Some(rest.parse().map_err(|_| perr(file, line, rest_col, "bad h2 count"))?),
            "nabla" => b.nabla = rest.split(';').map(|s| s.trim().to_string()).collect(),
            "from" => b.from = Some(parse_provenance(rest).ok_or_else(|| perr(file, line, rest_col, "expected '<base> <reps> [at ...]'"))?),
            "split" => b.split = Some(rest.to_string()),
            "special" => {
                let (lhs, entry) = rest.split_once(':').ok_or_else(|| perr(file, line, rest_col, "expected 'param = value : entry'"))?;
                let (param, value) = lhs.split_once('=').ok_or_else(|| perr(file, line, rest_col, "expected 'param = value'"))?;
                b.specials.push(Special {
                    param: param.trim().to_string(),
                    value: value.trim().to_string(),
                    entry: entry.trim().to_string(),
                });
            }
            "identify" => b.identify.push(parse_identification(rest).ok_or_else(|| perr(file, line, rest_col, "bad identification"))?),
            "note" => b.notes.push(rest.to_string()),
            _ => {
                let n = b.dim.ok_or_else(|| perr(file, line, indent + 1, "products before 'dim'"))?;
                let (lhs, rhs) = t.split_once('=').ok_or_else(|| perr(file, line, indent + 1, format!("unknown directive '{}'", key)))?;
                let (x, y) = lhs.split_once('*').ok_or_else(|| perr(file, line, indent + 1, "expected 'ei*ej = ...'"))?;
                let i = basis_index(x.trim(), n).ok_or_else(|| perr(file, line, indent + 1, format!("bad basis vector '{}'", x.trim())))?;
                let j = basis_index(y.trim(), n).ok_or_else(|| perr(file, line, indent + 1, format!("bad basis vector '{}'", y.trim())))?;
                let is_atom = |s: &str| basis_index(s, n).is_some();
                let off = indent + lhs.len() + 1;
                let combo = parse_combination(rhs, &is_atom, &|_| None).map_err(|e| scalar_err(file, line, off, e))?;
                for (atom, c) in combo {
                    b.products.push((i, j, basis_index(&atom, n).unwrap(), c));
                }
            }
        }
    }
    if let Some(b) = cur {
        return Err(perr(file, b.start, 1, format!("algebra {} is missing 'end'", b.name)));
    }
    Ok(Catalog { entries })
}

fn finish_block(b: Block, file: &str) -> Result<Entry, CatalogError> {
    let n = b.dim.ok_or_else(|| perr(file, b.start, 1, format!("algebra {} has no 'dim'", b.name)))?;
    let mut a = Algebra::from_products(n, &b.products).named(&b.name);
    a.constraints = b.constraints;
    Ok(Entry {
        algebra: a,
        kind: b.kind.unwrap_or(EntryKind::Extension),
        declared: b.declared,
        h2: b.h2,
        nabla: b.nabla,
        from: b.from,
        split: b.split,
        specials: b.specials,
        identify: b.identify,
        notes: b.notes,
    })
}

/// Whether the algebra is nilpotent, sampling the parameters if the symbolic
/// rank is ambiguous.
pub fn nilpotent_generic(a: &Algebra) -> Result<bool, AlgebraError> {
    match a.is_nilpotent() {
        Err(AlgebraError::Linalg(LinalgError::ParameterRankAmbiguity { .. })) => {
            let s = invariants::default_samples(a, 1);
            a.at(&s[0])?.is_nilpotent()
        }
        r => r,
    }
}

pub fn validate_entry(e: &Entry) -> Result<(), CatalogError> {
    let a = &e.algebra;
    let bad = |msg: String| CatalogError::Validation { name: a.name.clone(), msg };
    for v in &a.params {
        if !e.declared.contains(&v.name()) {
            return Err(bad(format!("undeclared parameter {}", v.name())));
        }
    }
    if !nilpotent_generic(a).map_err(|x| bad(x.to_string()))? {
        return Err(bad("not nilpotent".into()));
    }
    if let Some(f) = a.check_right_leibniz() {
        return Err(bad(format!("right Leibniz identity fails: {}", f)));
    }
    Ok(())
}

pub fn load_catalog_str(text: &str, file: &str) -> Result<Catalog, CatalogError> {
    let cat = parse_catalog(text, file)?;
    let mut seen = std::collections::HashSet::new();
    for e in &cat.entries {
        if !seen.insert(e.name().to_string()) {
            return Err(CatalogError::Validation { name: e.name().to_string(), msg: "duplicate name".into() });
        }
    }
    let failures: Vec<CatalogError> = cat.entries.par_iter().filter_map(|e| validate_entry(e).err()).collect();
    if let Some(f) = failures.into_iter().next() {
        return Err(f);
    }
    Ok(cat)
}

pub fn load_catalog(path: &Path) -> Result<Catalog, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io(format!("{}: {}", path.display(), e)))?;
    load_catalog_str(&text, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRow {
    pub name: String,
    pub from: Provenance,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OrbitTable {
    pub rows: Vec<OrbitRow>,
    pub identify: Vec<(String, Identification)>,
}

pub fn parse_orbits(text: &str, file: &str) -> Result<OrbitTable, CatalogError> {
    let mut t = OrbitTable::default();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if let Some(rest) = s.strip_prefix("orbit ") {
            let (name, spec) = rest.split_once('=').ok_or_else(|| perr(file, line, 7, "expected 'orbit <name> = ...'"))?;
            let from = parse_provenance(spec).ok_or_else(|| perr(file, line, 7 + name.len(), "bad representative"))?;
            t.rows.push(OrbitRow { name: name.trim().to_string(), from });
        } else if let Some(rest) = s.strip_prefix("identify ") {
            let (name, body) = rest.split_once(' ').ok_or_else(|| perr(file, line, 10, "expected 'identify <name> ...'"))?;
            let id = parse_identification(body.trim()).ok_or_else(|| perr(file, line, 11 + name.len(), "bad identification"))?;
            t.identify.push((name.to_string(), id));
        } else {
            return Err(perr(file, line, 1, "expected 'orbit' or 'identify'"));
        }
    }
    Ok(t)
}

pub fn parse_value_map(at: &Assignments) -> Result<HashMap<Var, Scalar>, ParseError> {
    at.iter().map(|(k, v)| Ok((Var::new(k), parse_scalar(v)?))).collect()
}

pub fn substitute_form(f: &BilinearForm, sub: &HashMap<Var, Scalar>) -> Result<BilinearForm, ExtensionError> {
    let m = f
        .m
        .iter()
        .map(|x| x.substitute(sub))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ExtensionError::Algebra(e.into()))?;
    Ok(BilinearForm::from_flat(f.n, m))
}

/// The cocycles of a representative, in the base's nabla basis.
pub fn representative_forms(base: &Entry, p: &Provenance) -> Result<Vec<BilinearForm>, ExtensionError> {
    let nab = base
        .nabla_forms()
        .map_err(|e| ExtensionError::Cohomology(CohomologyError::Parse(e)))?;
    let is_atom = |s: &str| s.strip_prefix('N').and_then(|k| k.parse::<usize>().ok()).map(|k| k >= 1 && k <= nab.len()).unwrap_or(false);
    p.reps
        .iter()
        .map(|r| {
            if r.split(|c: char| !c.is_alphanumeric() && c != '_').any(|w| w.starts_with('N') && w.len() > 1 && w[1..].chars().all(|c| c.is_ascii_digit()) && !is_atom(w)) {
                return Err(ExtensionError::UnknownNabla(r.clone()));
            }
            let combo = parse_combination(r, &is_atom, &|_| None).map_err(|e| ExtensionError::Cohomology(CohomologyError::Parse(e)))?;
            let mut f = BilinearForm::zero(base.algebra.n);
            for (atom, c) in combo {
                let k: usize = atom[1..].parse().unwrap();
                f = f.add(&nab[k - 1].scale(&c));
            }
            Ok(f)
        })
        .collect()
}

/// T_s membership with independence, sampling when the symbolic rank is ambiguous.
pub fn ts_check(base: &Algebra, forms: &[BilinearForm]) -> Result<bool, ExtensionError> {
    match cohomology::ts_membership(base, forms) {
        Ok(r) => Ok(r.in_ts() && r.independent),
        Err(CohomologyError::Algebra(AlgebraError::Linalg(LinalgError::ParameterRankAmbiguity { .. }))) => {
            let ext = extension::extend_unchecked(base, forms);
            let s = invariants::default_samples(&ext, 1);
            let sub: HashMap<Var, Scalar> = s[0].iter().map(|(k, v)| (*k, Scalar::constant(v.clone()))).collect();
            let b = base.at(&s[0])?;
            let fs = forms.iter().map(|f| substitute_form(f, &sub)).collect::<Result<Vec<_>, _>>()?;
            let r = cohomology::ts_membership(&b, &fs)?;
            Ok(r.in_ts() && r.independent)
        }
        Err(e) => Err(e.into()),
    }
}

pub const OUTSIDE_TS_NOTE: &str = "outside T_s: Ann(theta) meets Ann(base), so Ann of the extension is larger than the added span";

/// Build one extension; the flag reports T_s membership of the representative.
pub fn build_extension(bases: &Catalog, row: &OrbitRow) -> Result<(Entry, bool), CatalogError> {
    let wrap = |source: ExtensionError| CatalogError::Extension { name: row.name.clone(), source };
    let base = bases.get(&row.from.base).ok_or_else(|| CatalogError::Unknown(row.from.base.clone()))?;
    let mut forms = representative_forms(base, &row.from).map_err(wrap)?;
    let mut b = base.algebra.clone();
    if !row.from.at.is_empty() {
        let sub = parse_value_map(&row.from.at).map_err(|e| wrap(ExtensionError::Cohomology(CohomologyError::Parse(e))))?;
        b = b.substitute(&sub).map_err(|e| wrap(e.into()))?;
        forms = forms.iter().map(|f| substitute_form(f, &sub)).collect::<Result<Vec<_>, _>>().map_err(wrap)?;
    }
    let in_ts = ts_check(&b, &forms).map_err(wrap)?;
    let a = extension::central_extension(&b, &forms).map_err(wrap)?.named(&row.name);
    let mut e = Entry::new(a, EntryKind::Extension);
    e.from = Some(row.from.clone());
    if !in_ts {
        e.notes.push(OUTSIDE_TS_NOTE.to_string());
    }
    Ok((e, in_ts))
}

/// Like `build_extension` but a representative outside T_s is an error.
pub fn build_extension_strict(bases: &Catalog, row: &OrbitRow) -> Result<Entry, CatalogError> {
    let (e, in_ts) = build_extension(bases, row)?;
    if !in_ts {
        return Err(CatalogError::Extension { name: row.name.clone(), source: ExtensionError::NotInTs(row.from.to_string()) });
    }
    Ok(e)
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub entries: Vec<Entry>,
    /// Rows whose representative is not in T_s (kept, with a note).
    pub outside_ts: Vec<String>,
}

/// Extend every base by its representative, in table order.
pub fn reconstruct_catalog(bases: &Catalog, orbits: &OrbitTable) -> Result<Reconstruction, CatalogError> {
    let built: Vec<(Entry, bool)> = orbits.rows.par_iter().map(|r| build_extension(bases, r)).collect::<Result<_, _>>()?;
    let outside_ts = built.iter().filter(|(_, ok)| !ok).map(|(e, _)| e.name().to_string()).collect();
    let mut entries: Vec<Entry> = built.into_iter().map(|(e, _)| e).collect();
    for (name, id) in &orbits.identify {
        let e = entries.iter_mut().find(|e| e.name() == name).ok_or_else(|| CatalogError::Unknown(name.clone()))?;
        e.identify.push(id.clone());
    }
    Ok(Reconstruction { entries, outside_ts })
}

/// The frozen catalog text: reconstructed extensions followed by the families file.
pub fn reconstruct_shipped() -> Result<Catalog, CatalogError> {
    let bases = load_catalog_str(SHIPPED_BASES, "bases.txt")?;
    let orbits = parse_orbits(SHIPPED_ORBITS, "orbits.txt")?;
    let mut entries = reconstruct_catalog(&bases, &orbits)?.entries;
    entries.extend(load_catalog_str(SHIPPED_FAMILIES, "families.txt")?.entries);
    Ok(Catalog { entries })
}

pub fn parse_action_tables(text: &str, file: &str, bases: &Catalog) -> Result<Vec<ActionTable>, CatalogError> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((ln, raw)) = lines.next() {
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        let name = s.strip_prefix("table ").ok_or_else(|| perr(file, ln + 1, 1, "expected 'table <name>'"))?.trim().to_string();
        let mut base: Option<Algebra> = None;
        let mut base_name = String::new();
        let mut nabla = Vec::new();
        let mut phi: Vec<Vec<Scalar>> = Vec::new();
        let mut claims: Vec<(usize, Scalar)> = Vec::new();
        let mut in_phi = false;
        loop {
            let (ln, raw) = lines.next().ok_or_else(|| perr(file, ln + 1, 1, format!("table {} is missing 'end'", name)))?;
            let line = ln + 1;
            let s = raw.split('#').next().unwrap_or("").trim();
            if s.is_empty() {
                continue;
            }
            if s == "end" {
                break;
            }
            if let Some(b) = s.strip_prefix("base ") {
                base_name = b.trim().to_string();
                base = Some(bases.algebra(&base_name)?.clone());
            } else if let Some(nb) = s.strip_prefix("nabla ") {
                let n = base.as_ref().ok_or_else(|| perr(file, line, 1, "nabla before base"))?.n;
                for part in nb.split(';') {
                    nabla.push(BilinearForm::parse(n, part.trim()).map_err(|e| scalar_err(file, line, 6, e))?);
                }
            } else if s == "phi" {
                in_phi = true;
            } else if let Some((lhs, rhs)) = s.split_once('=') {
                in_phi = false;
                let k: usize = lhs
                    .trim()
                    .strip_prefix('a')
                    .and_then(|x| x.strip_suffix('*'))
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| perr(file, line, 1, "expected 'aK* = ...'"))?;
                claims.push((k, parse_scalar(rhs).map_err(|e| scalar_err(file, line, lhs.len() + 1, e))?));
            } else if in_phi {
                let row = s
                    .split(',')
                    .map(|x| parse_scalar(x.trim()))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| scalar_err(file, line, 1, e))?;
                phi.push(row);
            } else {
                return Err(perr(file, line, 1, format!("unexpected line '{}'", s)));
            }
        }
        let a = base.ok_or_else(|| perr(file, ln + 1, 1, format!("table {} has no base", name)))?;
        if phi.len() != a.n || phi.iter().any(|r| r.len() != a.n) {
            return Err(perr(file, ln + 1, 1, format!("table {}: phi must be {}x{}", name, a.n, a.n)));
        }
        claims.sort_by_key(|c| c.0);
        if claims.iter().enumerate().any(|(i, c)| c.0 != i + 1) || claims.len() != nabla.len() {
            return Err(perr(file, ln + 1, 1, format!("table {}: one claim per nabla expected", name)));
        }
        out.push(ActionTable {
            name,
            base: base_name,
            nabla,
            family: AutFamily { phi },
            claims: claims.into_iter().map(|c| c.1).collect(),
        });
    }
    Ok(out)
}

pub fn shipped_action_tables() -> Vec<ActionTable> {
    let bases = load_catalog_str(SHIPPED_BASES, "bases.txt").expect("shipped bases parse");
    parse_action_tables(SHIPPED_ACTIONS, "actions.txt", &bases).expect("shipped action tables parse")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_an_empty_catalog() {
        assert_eq!(load_catalog_str("", "x").unwrap().entries.len(), 0);
        assert_eq!(load_catalog_str("# only a comment\n\n", "x").unwrap().entries.len(), 0);
    }

    #[test]
    fn idempotent_product_is_rejected() {
        let text = "algebra bad\ndim 1\ne1*e1 = e1\nend\n";
        match load_catalog_str(text, "x") {
            Err(CatalogError::Validation { name, msg }) => {
                assert_eq!(name, "bad");
                assert!(msg.contains("nilpotent"));
            }
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn leibniz_failure_names_the_triple() {
        // nilpotent but not right Leibniz: (e1e1)e1 = e2e1 = 0 while e1(e1e1) = e1e2 = e3
        let text = "algebra nl\ndim 3\ne1*e1 = e2\ne1*e2 = e3\nend\n";
        match load_catalog_str(text, "x") {
            Err(CatalogError::Validation { msg, .. }) => assert!(msg.contains("(1,1,1)"), "{}", msg),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_catalog("algebra a\ndim 2\ne1*e2 = e1 +* e2\nend\n", "f.txt") {
            Err(CatalogError::Parse { line, col, .. }) => {
                assert_eq!(line, 3);
                assert!(col > 7);
            }
            other => panic!("unexpected {:?}", other),
        }
        assert!(matches!(parse_catalog("algebra a\ndim 2\n", "f"), Err(CatalogError::Parse { line: 1, .. })));
        assert!(matches!(parse_catalog("algebra a\ndim 2\ne1*e3 = e1\nend\n", "f"), Err(CatalogError::Parse { line: 3, .. })));
    }

    #[test]
    fn undeclared_parameters_are_rejected() {
        let text = "algebra p\ndim 2\ne1*e1 = alpha*e2\nend\n";
        assert!(matches!(load_catalog_str(text, "x"), Err(CatalogError::Validation { .. })));
        let ok = "algebra p\ndim 2\nparams alpha\ne1*e1 = alpha*e2\nend\n";
        assert!(load_catalog_str(ok, "x").is_ok());
    }

    #[test]
    fn bases_load() {
        let b = load_catalog_str(SHIPPED_BASES, "bases.txt").unwrap();
        assert_eq!(b.entries.len(), 37);
        assert!(b.entries.iter().all(|e| e.h2.is_some()));
    }

    #[test]
    fn first_and_last_extensions() {
        let b = load_catalog_str(SHIPPED_BASES, "bases.txt").unwrap();
        let o = parse_orbits(SHIPPED_ORBITS, "orbits.txt").unwrap();
        let l01 = build_extension_strict(&b, &o.rows[0]).unwrap();
        let expect = Algebra::from_products(5, &[(1, 1, 2, Scalar::one()), (2, 1, 4, Scalar::one()), (3, 1, 5, Scalar::one())]);
        assert!(l01.algebra.tensor_eq(&expect));
        let l82 = build_extension_strict(&b, o.rows.last().unwrap()).unwrap();
        let expect: Vec<_> = (1..5).map(|k| (k, 1, k + 1, Scalar::one())).collect();
        assert!(l82.algebra.tensor_eq(&Algebra::from_products(5, &expect)));
    }

    #[test]
    fn unknown_nabla_and_non_ts_representatives() {
        let b = load_catalog_str(SHIPPED_BASES, "bases.txt").unwrap();
        let row = |s: &str| OrbitRow { name: "X".into(), from: parse_provenance(s).unwrap() };
        assert!(matches!(
            build_extension_strict(&b, &row("N3_01 <N2, N7>")),
            Err(CatalogError::Extension { source: ExtensionError::UnknownNabla(_), .. })
        ));
        assert!(matches!(
            build_extension_strict(&b, &row("N3_01 <N2>")),
            Err(CatalogError::Extension { source: ExtensionError::NotInTs(_), .. })
        ));
    }

    #[test]
    fn action_tables_parse() {
        let t = shipped_action_tables();
        assert_eq!(t.len(), 17);
        assert!(t.iter().all(|x| x.claims.len() == x.nabla.len()));
    }
}
