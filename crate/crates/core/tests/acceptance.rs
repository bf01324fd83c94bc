//! One line per acceptance criterion. Exits nonzero when a criterion's outcome
//! differs from the recorded expectation.

use nilalg::catalog::{self, Catalog, EntryKind};
use nilalg::cohomology;
use nilalg::degeneration::{self, Verdict};
use nilalg::extension;
use nilalg::ff;
use nilalg::invariants;
use nilalg::report::{self, Options, Status};
use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Expected dim H² for every base table.
const H2_TABLE: [(&str, usize); 37] = [
    ("N3_01", 4),
    ("N3_02", 5),
    ("N3_03", 3),
    ("N3_03_0", 4),
    ("N3_04", 3),
    ("L3_1", 1),
    ("N4_01", 9),
    ("N4_02", 4),
    ("N4_03", 10),
    ("N4_04", 8),
    ("N4_04_0", 9),
    ("N4_05", 8),
    ("N4_06", 8),
    ("N4_07", 4),
    ("N4_08", 4),
    ("N4_08_1", 5),
    ("N4_09", 8),
    ("N4_10", 8),
    ("N4_11", 8),
    ("N4_12", 6),
    ("N4_13", 4),
    ("N4_14", 4),
    ("N4_14_m1", 6),
    ("N4_15", 8),
    ("L4_1", 4),
    ("L4_2", 5),
    ("L4_3", 3),
    ("L4_4", 4),
    ("L4_5", 3),
    ("L4_6", 4),
    ("L4_7", 4),
    ("L4_8", 3),
    ("L4_9", 4),
    ("L4_10", 4),
    ("L4_11", 4),
    ("L4_12", 4),
    ("L4_13", 1),
];

/// Shipped action tables whose stated formulas disagree with the computation.
const ACTION_ERRATA: [&str; 5] = ["N4_07", "N4_08", "N4_13_phi1", "N4_13_phi2", "N4_14_m1"];

fn identities(cat: &Catalog) -> Outcome {
    let start = Instant::now();
    let bad: Vec<&str> = cat.entries.iter().filter(|e| e.algebra.check_right_leibniz().is_some()).map(|e| e.name()).collect();
    let t = start.elapsed();
    let bases = cat.of_kind(EntryKind::Base).count();
    let ext = cat.of_kind(EntryKind::Extension).count();
    let sym = cat.of_kind(EntryKind::Symmetric).count();
    outcome(
        bad.is_empty() && ext == 82 && sym == 6 && t < Duration::from_secs(10),
        format!("{} entries ({} bases, {} extensions, {} symmetric families) in {:.2}s; failing: {:?}", cat.entries.len(), bases, ext, sym, t.as_secs_f64(), bad),
    )
}

fn h2(cat: &Catalog) -> Outcome {
    let mut bad = Vec::new();
    for (name, want) in H2_TABLE {
        let e = cat.get(name).expect("base present");
        let forms = e.nabla_forms().unwrap();
        let (res, _) = report::generically(&e.algebra, |a| cohomology::check_h2_table(a, &forms));
        let ok = match res {
            Ok(t) => t.computed_dim == want && (forms.is_empty() || t.ok(want)),
            Err(_) => false,
        };
        if !ok {
            bad.push(name);
        }
    }
    outcome(bad.is_empty(), format!("{} tables, mismatches: {:?}", H2_TABLE.len(), bad))
}

fn actions(cat: &Catalog) -> Outcome {
    let mut failing = Vec::new();
    let tables = catalog::shipped_action_tables();
    for t in &tables {
        let a = cat.algebra(&t.base).unwrap();
        if !nilalg::action::verify_action_table(a, t).map(|c| c.matches()).unwrap_or(false) {
            failing.push(t.name.clone());
        }
    }
    outcome(failing.is_empty(), format!("{} of {} tables match; mismatching: {}", tables.len() - failing.len(), tables.len(), failing.join(", ")))
}

fn degenerations(cat: &Catalog) -> Outcome {
    let start = Instant::now();
    let certs = degeneration::shipped_certificates();
    let mut bad = Vec::new();
    let mut solved = Vec::new();
    for c in &certs {
        match degeneration::check_certificate(cat, c) {
            Ok(r) if r.verdict == Verdict::Valid => {
                if let Some((k, v)) = r.constant {
                    solved.push(format!("{}: {} = {}", c.label(), k, v));
                }
            }
            Ok(r) => bad.push(format!("{} ({})", c.label(), r.verdict)),
            Err(e) => bad.push(format!("{} ({})", c.label(), e)),
        }
    }
    let t = start.elapsed();
    let sqrt_rows = certs.iter().filter(|c| c.m == 2).count();
    let moving = certs.iter().filter(|c| degeneration::moving_index(c)).count();
    outcome(
        bad.is_empty() && solved.len() == 1 && t < Duration::from_secs(30),
        format!("{} rows ({} at m = 2, {} with moving index) in {:.2}s; solved {}; invalid: {:?}", certs.len(), sqrt_rows, moving, t.as_secs_f64(), solved.join("; "), bad),
    )
}

fn derivations(cat: &Catalog) -> Outcome {
    let mut strict = 0;
    let mut family = 0;
    let mut bad = Vec::new();
    for c in degeneration::shipped_certificates().iter().filter(|c| c.proper()) {
        let d = degeneration::check_derivation_necessary(cat, c, 3).unwrap();
        if d.strict() {
            strict += 1;
        } else if d.consistent() {
            family += 1;
        } else {
            bad.push(c.label());
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} proper rows strict, {} moving-index rows with equal dimension (family bound), violations: {:?}", strict, family, bad),
    )
}

fn component_dimensions(cat: &Catalog) -> Outcome {
    let mut got = Vec::new();
    let mut ok = true;
    for (name, want) in report::ORBIT_DIMENSIONS {
        let a = cat.algebra(name).unwrap();
        let s = &invariants::default_samples(a, 1)[0];
        let d = invariants::family_closure_dimension(a, s).unwrap();
        ok &= d == want;
        got.push(format!("{}:{}", name, d));
    }
    let gens: Vec<&str> = cat
        .entries
        .iter()
        .filter(|e| e.algebra.n == 5 && invariants::one_generated(&e.algebra).unwrap_or(false))
        .map(|e| e.name())
        .collect();
    ok &= gens == ["L82"];
    outcome(ok, format!("{}; one-generated: {:?}", got.join(" "), gens))
}

fn evidence(cat: &Catalog) -> Outcome {
    let opts = Options::default();
    let checks = report::nondegen_evidence(cat, &opts);
    let members = checks.iter().filter(|c| c.name.ends_with("/membership") && c.status == Status::Pass).count();
    let clean = checks.iter().filter(|c| c.status == Status::Evidence).count();
    let failed: Vec<&str> = checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.as_str()).collect();
    outcome(
        failed.is_empty() && members == 4 && clean == 20,
        format!("EVIDENCE: {} sources in their sets, {} clean probes (Borel 100, target 500, seed 42); failed: {:?}", members, clean, failed),
    )
}

fn oracle() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, p) in [(2, 2), (2, 3), (3, 2)] {
        let (r, cl) = ff::run_oracle(n, p).unwrap();
        ok &= r.classes_a == r.classes_b && r.same_canonicals && r.orbit_stabilizer && r.passed();
        parts.push(format!("(n={},p={}) {} classes, {} tensors", n, p, cl.classes.len(), r.orbit_sum));
    }
    let t = start.elapsed();
    ok &= t < Duration::from_secs(300);
    outcome(ok, format!("{} in {:.2}s", parts.join("; "), t.as_secs_f64()))
}

fn quotient_round_trip(cat: &Catalog) -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for e in cat.of_kind(EntryKind::Extension) {
        n += 1;
        let (res, _) = report::generically(&e.algebra, extension::quotient_round_trip);
        if !matches!(res, Ok(true)) {
            bad.push(e.name());
        }
    }
    outcome(bad.is_empty(), format!("{} extension entries, failures: {:?}", n, bad))
}

fn main() -> ExitCode {
    let cat = Catalog::shipped();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "identities", identities(&cat)),
        (2, "h2 tables", h2(&cat)),
        (3, "action tables", actions(&cat)),
        (4, "degeneration table", degenerations(&cat)),
        (5, "der necessary condition", derivations(&cat)),
        (6, "component numbers", component_dimensions(&cat)),
        (7, "non-degeneration evidence", evidence(&cat)),
        (8, "finite-field oracle", oracle()),
        (9, "quotient round trip", quotient_round_trip(&cat)),
    ];
    let mut unexpected = false;
    for (k, name, o) in &results {
        println!("criterion {} {}: {} ({})", k, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        let expected_pass = *k != 3;
        if o.pass != expected_pass {
            unexpected = true;
        }
    }
    // criterion 3 is expected to fail on exactly the known errata and nowhere else
    let mismatching: BTreeSet<String> = catalog::shipped_action_tables()
        .iter()
        .filter(|t| !nilalg::action::verify_action_table(cat.algebra(&t.base).unwrap(), t).map(|c| c.matches()).unwrap_or(false))
        .map(|t| t.name.clone())
        .collect();
    let errata: BTreeSet<String> = ACTION_ERRATA.iter().map(|s| s.to_string()).collect();
    if mismatching != errata {
        println!("action mismatches differ from the recorded errata: {:?}", mismatching);
        unexpected = true;
    }
    if unexpected {
        println!("acceptance: outcome differs from expectation");
        ExitCode::FAILURE
    } else {
        println!("acceptance: 8 of 9 criteria pass; criterion 3 fails on the recorded action-table errata");
        ExitCode::SUCCESS
    }
}
