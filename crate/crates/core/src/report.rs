//! Verification suites and their hierarchical text report.

use crate::action::verify_action_table;
use crate::algebra::{Algebra, AlgebraError};
use crate::catalog::{self, Catalog, EntryKind, OUTSIDE_TS_NOTE};
use crate::cohomology::{check_h2_table, cohomology_basis, CohomologyError};
use crate::degeneration::{self, Certificate, ClosedSet, ProbeOutcome};
use crate::extension::{quotient_round_trip, ExtensionError};
use crate::ff;
use crate::invariants;
use crate::linalg::LinalgError;
use crate::scalar::{parse_scalar, Gq, Poly, Var};
use std::collections::HashMap;
use rayon::prelude::*;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Identities,
    H2,
    Actions,
    Degenerations,
    NondegenEvidence,
    Components,
    Ff,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Identities, Suite::H2, Suite::Actions, Suite::Degenerations, Suite::NondegenEvidence, Suite::Components, Suite::Ff];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::H2 => "h2",
            Suite::Actions => "actions",
            Suite::Degenerations => "degenerations",
            Suite::NondegenEvidence => "nondegen-evidence",
            Suite::Components => "theoremB",
            Suite::Ff => "ff",
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Suite, String> {
        Suite::ALL.iter().copied().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite '{}'", s))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Randomized or sampled support that is not a proof.
    Evidence,
    /// Recorded fact with no pass/fail meaning (e.g. a known erratum carried as a note).
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Evidence => "EVIDENCE",
            Status::Info => "info",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() }
    }

    fn with(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Check {
        Check { name: name.into(), status, detail: detail.into() }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub samples: usize,
    pub borel_trials: usize,
    pub target_trials: usize,
    pub ff_sizes: Vec<(usize, u32)>,
    pub certs: Vec<Certificate>,
    pub rsets: Vec<ClosedSet>,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            seed: 42,
            samples: 3,
            borel_trials: 100,
            target_trials: 500,
            ff_sizes: vec![(2, 2), (2, 3), (3, 2)],
            certs: degeneration::shipped_certificates(),
            rsets: degeneration::shipped_closed_sets(),
        }
    }
}

pub fn run_suite(cat: &Catalog, suite: Suite, opts: &Options) -> SuiteReport {
    let start = Instant::now();
    let checks = match suite {
        Suite::Identities => identities(cat),
        Suite::H2 => h2(cat),
        Suite::Actions => actions(cat),
        Suite::Degenerations => degenerations(cat, opts),
        Suite::NondegenEvidence => nondegen_evidence(cat, opts),
        Suite::Components => component_dimensions(cat),
        Suite::Ff => finite_fields(cat, opts),
    };
    SuiteReport { suite, checks, elapsed: start.elapsed() }
}

/// Errors that may come from a pivot strict elimination could not decide.
pub trait Ambiguity {
    fn ambiguous_entry(&self) -> Option<&str>;
}

impl Ambiguity for AlgebraError {
    fn ambiguous_entry(&self) -> Option<&str> {
        match self {
            AlgebraError::Linalg(LinalgError::ParameterRankAmbiguity { entry, .. }) => Some(entry),
            _ => None,
        }
    }
}

impl Ambiguity for CohomologyError {
    fn ambiguous_entry(&self) -> Option<&str> {
        match self {
            CohomologyError::Algebra(e) => e.ambiguous_entry(),
            _ => None,
        }
    }
}

impl Ambiguity for ExtensionError {
    fn ambiguous_entry(&self) -> Option<&str> {
        match self {
            ExtensionError::Algebra(e) => e.ambiguous_entry(),
            ExtensionError::Cohomology(e) => e.ambiguous_entry(),
            _ => None,
        }
    }
}

/// Run `f` at the generic member: each pivot that strict elimination cannot
/// decide is declared nonzero and the computation repeated. Returns the
/// result and the conditions that were added.
pub fn generically<T, E: Ambiguity + ToString>(a: &Algebra, f: impl Fn(&Algebra) -> Result<T, E>) -> (Result<T, String>, Vec<Poly>) {
    let mut a = a.clone();
    let mut added: Vec<Poly> = Vec::new();
    loop {
        match f(&a) {
            Ok(t) => return (Ok(t), added),
            Err(e) => {
                let poly = e.ambiguous_entry().and_then(|s| parse_scalar(s).ok()).map(|x| x.num().clone());
                match poly {
                    Some(p) if !p.is_constant() && !added.contains(&p) && added.len() < 8 => {
                        a.constraints.push(p.clone());
                        added.push(p);
                    }
                    _ => return (Err(e.to_string()), added),
                }
            }
        }
    }
}

/// Rational zeros of the added conditions: variables dividing a condition,
/// and conditions (after removing those) linear in a single parameter.
pub fn special_points(conds: &[Poly]) -> Vec<(Var, Gq)> {
    let mut out = Vec::new();
    let mut push = |v: Var, x: Gq| {
        if !out.contains(&(v, x.clone())) {
            out.push((v, x));
        }
    };
    for p in conds {
        let mc = p.mono_content();
        let mut p = p.clone();
        if !mc.is_one() {
            for &(v, _) in &mc.0 {
                push(Var(v), Gq::zero());
            }
            p = p.exact_div(&Poly::monomial(mc, Gq::one())).unwrap();
        }
        let vars = p.vars();
        if vars.len() != 1 {
            continue;
        }
        let v = *vars.iter().next().unwrap();
        if p.degree_in(v) != 1 {
            continue;
        }
        let (Some(c1), Some(c0)) = (p.coeff_of(v, 1).as_constant(), p.coeff_of(v, 0).as_constant()) else { continue };
        push(v, -&(&c0 / &c1));
    }
    out
}

fn fmt_conditions(conds: &[Poly]) -> String {
    conds.iter().map(|p| format!("{} != 0", p)).collect::<Vec<_>>().join(", ")
}

pub fn identities(cat: &Catalog) -> Vec<Check> {
    cat.entries
        .par_iter()
        .map(|e| {
            let a = &e.algebra;
            let mut out = Vec::new();
            let leib = a.check_right_leibniz();
            let detail = leib.as_ref().map(|f| f.to_string()).unwrap_or_default();
            out.push(Check::new(format!("{}/right-leibniz", a.name), leib.is_none(), detail));
            let nil = catalog::nilpotent_generic(a);
            out.push(Check::new(format!("{}/nilpotent", a.name), matches!(nil, Ok(true)), nil.err().map(|x| x.to_string()).unwrap_or_default()));
            if e.kind == EntryKind::Extension {
                out.push(quotient_round_trip_check(a));
                out.push(ts_check(cat, e));
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn quotient_round_trip_check(a: &Algebra) -> Check {
    let name = format!("{}/quotient-round-trip", a.name);
    let (res, conds) = generically(a, quotient_round_trip);
    match res {
        Ok(ok) => {
            let mut detail = String::new();
            if !conds.is_empty() {
                detail = format!("generic where {}", fmt_conditions(&conds));
                for (v, x) in special_points(&conds) {
                    let at: HashMap<Var, Gq> = [(v, x.clone())].into_iter().collect();
                    let r = a.at(&at).map_err(|e| e.to_string()).and_then(|b| generically(&b, quotient_round_trip).0);
                    let _ = write!(detail, "; at {} = {}: {}", v.name(), x, r.map_or_else(|e| e, |b| b.to_string()));
                }
            }
            Check::new(name, ok, detail)
        }
        Err(e) => Check::new(name, false, e),
    }
}

fn ts_check(cat: &Catalog, e: &catalog::Entry) -> Check {
    let name = format!("{}/representative-in-T_s", e.name());
    let Some(from) = &e.from else {
        return Check::with(name, Status::Info, "no provenance");
    };
    let noted = e.notes.iter().any(|n| n == OUTSIDE_TS_NOTE);
    let res = (|| {
        let base = cat.get(&from.base).ok_or_else(|| format!("unknown base {}", from.base))?;
        let mut forms = catalog::representative_forms(base, from).map_err(|x| x.to_string())?;
        let mut b = base.algebra.clone();
        if !from.at.is_empty() {
            let sub = catalog::parse_value_map(&from.at).map_err(|x| x.to_string())?;
            b = b.substitute(&sub).map_err(|x| x.to_string())?;
            forms = forms.iter().map(|f| catalog::substitute_form(f, &sub)).collect::<Result<_, _>>().map_err(|x| x.to_string())?;
        }
        catalog::ts_check(&b, &forms).map_err(|x| x.to_string())
    })();
    match res {
        Ok(true) if !noted => Check::new(name, true, ""),
        Ok(false) if noted => Check::with(name, Status::Info, format!("{}; entry kept with note", from)),
        Ok(inside) => Check::new(name, false, format!("computed in T_s = {}, note present = {}", inside, noted)),
        Err(msg) => Check::new(name, false, msg),
    }
}

pub fn h2(cat: &Catalog) -> Vec<Check> {
    let with_tables: Vec<&catalog::Entry> = cat.entries.iter().filter(|e| e.h2.is_some()).collect();
    with_tables
        .par_iter()
        .map(|e| {
            let want = e.h2.unwrap();
            let name = format!("{}/h2", e.name());
            let forms = match e.nabla_forms() {
                Ok(f) => f,
                Err(x) => return Check::new(name, false, x.to_string()),
            };
            let (res, conds) = generically(&e.algebra, |a| check_h2_table(a, &forms));
            match res {
                Ok(t) => {
                    let mut detail = format!("computed {} listed {} expected {}", t.computed_dim, t.listed, want);
                    if !conds.is_empty() {
                        let _ = write!(detail, "; generic where {}", fmt_conditions(&conds));
                        for (v, x) in special_points(&conds) {
                            let at: HashMap<Var, Gq> = [(v, x.clone())].into_iter().collect();
                            let d = e.algebra.at(&at).map_err(|e| e.to_string()).and_then(|b| generically(&b, cohomology_basis).0.map(|c| c.dim_h2()));
                            let _ = write!(detail, "; dim H2 at {} = {}: {}", v.name(), x, d.map_or_else(|e| e, |d| d.to_string()));
                        }
                    }
                    Check::new(name, t.ok(want) || (forms.is_empty() && t.computed_dim == want), detail)
                }
                Err(x) => Check::new(name, false, x),
            }
        })
        .collect()
}

pub fn actions(cat: &Catalog) -> Vec<Check> {
    let tables = catalog::shipped_action_tables();
    tables
        .par_iter()
        .map(|t| {
            let name = format!("{}/action", t.name);
            let Ok(a) = cat.algebra(&t.base) else {
                return Check::new(name, false, format!("unknown base {}", t.base));
            };
            match verify_action_table(a, t) {
                Ok(c) if c.matches() => Check::new(name, true, ""),
                Ok(c) => {
                    let mut d = String::new();
                    if let Some((i, j)) = c.aut_counterexample {
                        let _ = write!(d, "phi is not an automorphism at (e{}, e{}); ", i + 1, j + 1);
                    }
                    let bad: Vec<String> = c.mismatches.iter().map(|(k, x)| format!("a{}* off by {}", k, x)).collect();
                    d += &bad.join("; ");
                    Check::new(name, false, d)
                }
                Err(x) => Check::new(name, false, x.to_string()),
            }
        })
        .collect()
}

pub fn degenerations(cat: &Catalog, opts: &Options) -> Vec<Check> {
    opts.certs
        .par_iter()
        .map(|cert| {
            let label = format!("line {}: {}", cert.line, cert.label());
            let mut out = Vec::new();
            match degeneration::check_certificate(cat, cert) {
                Ok(r) => {
                    let mut d = r.verdict.to_string();
                    if let Some((k, v)) = &r.constant {
                        let _ = write!(d, "; solved {} = {}", k, v);
                    }
                    out.push(Check::new(format!("{}/limit", label), r.verdict == degeneration::Verdict::Valid, d));
                }
                Err(x) => out.push(Check::new(format!("{}/limit", label), false, x.to_string())),
            }
            if cert.proper() {
                match degeneration::check_derivation_necessary(cat, cert, opts.samples) {
                    Ok(dc) => {
                        let rows: Vec<String> = dc.rows.iter().map(|r| format!("[{}] {} vs {}", r.sample, r.source, r.target)).collect();
                        let bound = if dc.strict() {
                            "strict"
                        } else if dc.family {
                            "family bound <="
                        } else {
                            "violated"
                        };
                        out.push(Check::new(format!("{}/der", label), dc.consistent(), format!("{}: {}", bound, rows.join(", "))));
                    }
                    Err(x) => out.push(Check::new(format!("{}/der", label), false, x.to_string())),
                }
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn probe_detail(o: &ProbeOutcome) -> String {
    match o {
        ProbeOutcome::Clean { trials } => format!("clean after {} trials", trials),
        ProbeOutcome::Hit { trial, sample, matrix } => {
            let s: Vec<String> = sample.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
            let m: Vec<String> = matrix.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect();
            format!("hit at trial {} [{}] matrix [{}]", trial, s.join(","), m.join("; "))
        }
    }
}

pub fn nondegen_evidence(cat: &Catalog, opts: &Options) -> Vec<Check> {
    let mut jobs: Vec<(usize, Option<String>)> = Vec::new();
    for (i, r) in opts.rsets.iter().enumerate() {
        jobs.push((i, None));
        for t in &r.targets {
            jobs.push((i, Some(t.clone())));
        }
    }
    jobs.par_iter()
        .map(|(i, target)| {
            let r = &opts.rsets[*i];
            let src_name = r.source.clone().unwrap_or_default();
            match target {
                None => {
                    let mut out = Vec::new();
                    let src = match cat.algebra(&src_name) {
                        Ok(a) => a,
                        Err(x) => return vec![Check::new(format!("R({})/membership", r.name), false, x.to_string())],
                    };
                    let mem = r.apply_relabel(src).map_err(|x| x.to_string()).and_then(|a| {
                        let plain = ClosedSet { relabel: None, ..r.clone() };
                        degeneration::membership_failures(&a, &plain, None).map_err(|x| x.to_string())
                    });
                    match mem {
                        Ok(f) => out.push(Check::new(format!("R({})/membership", r.name), f.is_empty(), f.join("; "))),
                        Err(x) => out.push(Check::new(format!("R({})/membership", r.name), false, x)),
                    }
                    let name = format!("R({})/borel-probe seed {}", r.name, opts.seed);
                    match degeneration::borel_stability_probe(r, src, opts.borel_trials, opts.seed) {
                        Ok(o) => out.push(Check::with(name, if o.is_clean() { Status::Evidence } else { Status::Fail }, probe_detail(&o))),
                        Err(x) => out.push(Check::new(name, false, x.to_string())),
                    }
                    out
                }
                Some(t) => {
                    let name = format!("R({})/target-probe {} seed {}", r.name, t, opts.seed);
                    let c = match cat.algebra(t) {
                        Ok(b) => match degeneration::target_membership_probe(b, r, opts.target_trials, opts.seed) {
                            Ok(o) => Check::with(name, if o.is_clean() { Status::Evidence } else { Status::Fail }, probe_detail(&o)),
                            Err(x) => Check::new(name, false, x.to_string()),
                        },
                        Err(x) => Check::new(name, false, x.to_string()),
                    };
                    vec![c]
                }
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Dimensions of the closures of the families generating the components:
/// orbit dimension plus the number of effective parameters.
pub const ORBIT_DIMENSIONS: [(&str, usize); 10] = [
    ("V3+2", 24),
    ("L28", 22),
    ("L47", 22),
    ("L52", 22),
    ("L79", 22),
    ("S21", 21),
    ("S22", 21),
    ("S41", 20),
    ("V4+1", 20),
    ("L82", 20),
];

pub fn component_dimensions(cat: &Catalog) -> Vec<Check> {
    let mut out: Vec<Check> = ORBIT_DIMENSIONS
        .par_iter()
        .map(|(name, want)| {
            let label = format!("{}/closure-dimension", name);
            let Ok(a) = cat.algebra(name) else {
                return Check::new(label, false, "not in catalog");
            };
            let samples = invariants::default_samples(a, 3);
            let dims: Result<Vec<(usize, usize)>, _> = samples
                .iter()
                .map(|s| Ok::<_, AlgebraError>((invariants::orbit_dimension(a, s)?, invariants::family_closure_dimension(a, s)?)))
                .collect();
            match dims {
                Ok(d) => {
                    let shown: Vec<String> = d.iter().map(|(o, f)| format!("orbit {} closure {}", o, f)).collect();
                    Check::new(label, d.iter().all(|(_, f)| f == want), format!("{} expected {}", shown.join(", "), want))
                }
                Err(x) => Check::new(label, false, x.to_string()),
            }
        })
        .collect();
    let five: Vec<&catalog::Entry> = cat.entries.iter().filter(|e| e.algebra.n == 5).collect();
    let dims: Vec<(String, Option<usize>)> = five
        .par_iter()
        .map(|e| {
            let a = &e.algebra;
            let d = invariants::default_samples(a, 1).first().and_then(|s| invariants::family_closure_dimension(a, s).ok());
            (a.name.clone(), d)
        })
        .collect();
    let max = dims.iter().filter_map(|(_, d)| *d).max().unwrap_or(0);
    let at_max: Vec<&str> = dims.iter().filter(|(_, d)| *d == Some(max)).map(|(n, _)| n.as_str()).collect();
    out.push(Check::new("max-closure-dimension", max == 24 && at_max == ["V3+2"], format!("{} attained by {}", max, at_max.join(", "))));
    let gens: Vec<String> = five
        .par_iter()
        .filter(|e| invariants::one_generated(&e.algebra).unwrap_or(false))
        .map(|e| e.name().to_string())
        .collect();
    out.push(Check::new("one-generated", gens == ["L82"], format!("one-generated entries: {}", gens.join(", "))));
    out.push(Check::with(
        "components",
        Status::Info,
        "ten components and variety dimension 24 rest on the non-degeneration arguments; see the nondegen-evidence suite",
    ));
    out
}

pub fn finite_fields(cat: &Catalog, opts: &Options) -> Vec<Check> {
    let mut out = Vec::new();
    for &(n, p) in &opts.ff_sizes {
        let tag = format!("n={} p={}", n, p);
        match ff::run_oracle(n, p) {
            Ok((r, cl)) => {
                out.push(Check::new(format!("{}/class-count", tag), r.classes_a == r.classes_b, format!("orbit expansion {} union-find {}", r.classes_a, r.classes_b)));
                out.push(Check::new(format!("{}/canonical-sets", tag), r.same_canonicals, ""));
                out.push(Check::new(format!("{}/orbit-stabilizer", tag), r.orbit_stabilizer, format!("|GL| = {}", ff::gl_order(n, p))));
                match r.full_count {
                    Some(c) => out.push(Check::new(format!("{}/full-count", tag), c == r.orbit_sum, format!("scan {} orbit sum {}", c, r.orbit_sum))),
                    None => out.push(Check::with(format!("{}/full-count", tag), Status::Info, format!("space too large to scan; orbit sum {}", r.orbit_sum))),
                }
                let inv = ff::invariant_crosscheck(&cl);
                out.push(Check::new(format!("{}/invariants-constant", tag), inv.varying.is_empty(), inv.varying.join(" ")));
                if !inv.collisions.is_empty() {
                    let pairs: Vec<String> = inv.collisions.iter().map(|(a, b)| format!("{}~{}", a, b)).collect();
                    out.push(Check::with(format!("{}/fingerprint-collisions", tag), Status::Info, pairs.join(" ")));
                }
                if n == 3 && p == 3 {
                    out.extend(reductions(cat, &cl));
                }
            }
            Err(x) => out.push(Check::new(format!("{}/oracle", tag), false, x.to_string())),
        }
    }
    out
}

pub const REDUCED_BASES: [&str; 6] = ["N3_01", "N3_02", "N3_03", "N3_03_0", "N3_04", "L3_1"];

fn reductions(cat: &Catalog, cl: &ff::FfClassification) -> Vec<Check> {
    let algs: Vec<_> = REDUCED_BASES.iter().filter_map(|n| cat.algebra(n).ok()).collect();
    ff::base_reductions(&algs, cl)
        .into_iter()
        .map(|r| {
            let detail = format!("{} -> {}", r.tensor, r.canonical.unwrap_or_else(|| "none".into()));
            Check::new(format!("n=3 p=3/reduction {}", r.label), r.enumerated, detail)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

/// Render suites in order. Timings are omitted unless asked for so that
/// reports from equal inputs and seed are byte-identical.
pub fn render(reports: &[SuiteReport], format: Format, seed: u64, timings: bool) -> String {
    let mut out = String::new();
    match format {
        Format::Structured => {
            let _ = writeln!(out, "report:");
            let _ = writeln!(out, "  schema: {}", SCHEMA_VERSION);
            let _ = writeln!(out, "  seed: {}", seed);
            let _ = writeln!(out, "  passed: {}", reports.iter().all(|r| r.passed()));
            let _ = writeln!(out, "  suites:");
            for r in reports {
                let _ = writeln!(out, "    - suite: {}", r.suite);
                let _ = writeln!(out, "      passed: {}", r.passed());
                let _ = writeln!(out, "      counts:");
                for s in [Status::Pass, Status::Fail, Status::Evidence, Status::Info] {
                    let _ = writeln!(out, "        {}: {}", s.to_string().to_lowercase(), r.count(s));
                }
                if timings {
                    let _ = writeln!(out, "      seconds: {:.3}", r.elapsed.as_secs_f64());
                }
                let _ = writeln!(out, "      checks:");
                for c in &r.checks {
                    let _ = writeln!(out, "        - name: \"{}\"", escape(&c.name));
                    let _ = writeln!(out, "          status: {}", c.status.to_string().to_lowercase());
                    if !c.detail.is_empty() {
                        let _ = writeln!(out, "          detail: \"{}\"", escape(&c.detail));
                    }
                }
            }
        }
        Format::Text => {
            let _ = writeln!(out, "schema {} seed {}", SCHEMA_VERSION, seed);
            for r in reports {
                let _ = write!(
                    out,
                    "[{}] {}: {} pass, {} fail, {} evidence, {} info",
                    r.suite,
                    if r.passed() { "ok" } else { "FAILED" },
                    r.count(Status::Pass),
                    r.count(Status::Fail),
                    r.count(Status::Evidence),
                    r.count(Status::Info)
                );
                if timings {
                    let _ = write!(out, " ({:.2}s)", r.elapsed.as_secs_f64());
                }
                out.push('\n');
                for c in r.checks.iter().filter(|c| c.status != Status::Pass) {
                    let _ = writeln!(out, "  {:8} {} {}", c.status, c.name, c.detail);
                }
            }
        }
    }
    out
}
