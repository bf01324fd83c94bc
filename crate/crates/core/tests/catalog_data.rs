use nilalg::catalog::{self, Catalog, EntryKind, OUTSIDE_TS_NOTE};
use nilalg::degeneration::{self, ClosedSet, ProbeOutcome};
use nilalg::report::{self, Format, Options, Suite};
use nilalg::scalar::Scalar;
use nilalg::algebra::Algebra;

#[test]
fn frozen_catalog_matches_reconstruction() {
    let rebuilt = catalog::reconstruct_shipped().unwrap();
    assert_eq!(rebuilt.emit(), catalog::SHIPPED_CATALOG.trim_end_matches('\n').to_string() + "\n");
}

#[test]
fn load_emit_load_round_trips() {
    let cat = Catalog::shipped();
    let again = catalog::load_catalog_str(&cat.emit(), "emitted").unwrap();
    assert_eq!(again, cat);
}

#[test]
fn shipped_catalog_shape() {
    let cat = Catalog::shipped();
    let five: Vec<&str> = cat.entries.iter().filter(|e| e.kind == EntryKind::Extension).map(|e| e.name()).collect();
    assert_eq!(five.len(), 82);
    assert_eq!((five[0], five[81]), ("L01", "L82"));
    assert_eq!(cat.of_kind(EntryKind::Symmetric).count(), 6);
    assert_eq!(cat.of_kind(EntryKind::Split).count(), 3);
    let noted: Vec<&str> = cat.entries.iter().filter(|e| e.notes.iter().any(|n| n == OUTSIDE_TS_NOTE)).map(|e| e.name()).collect();
    assert_eq!(noted, ["L48", "L49", "L51", "L59", "L60", "L61"]);
}

#[test]
fn anchor_algebra_l82_is_the_filiform_chain() {
    let cat = Catalog::shipped();
    let l82 = cat.algebra("L82").unwrap();
    let one = || Scalar::one();
    let want = Algebra::from_products(5, &[(1, 1, 2, one()), (2, 1, 3, one()), (3, 1, 4, one()), (4, 1, 5, one())]);
    assert!(l82.tensor_eq(&want));
}

#[test]
fn all_certificates_and_closed_sets_parse() {
    assert_eq!(degeneration::shipped_certificates().len(), 29);
    let names: Vec<String> = degeneration::shipped_closed_sets().into_iter().map(|r| r.name).collect();
    assert_eq!(names, ["L28", "L47", "L52", "L79"]);
}

fn int(k: i64) -> Scalar {
    Scalar::from_int(k)
}

#[test]
fn dropping_a_containment_lets_the_borel_probe_find_a_violation() {
    let full = degeneration::shipped_closed_sets().into_iter().find(|r| r.name == "L28").unwrap();
    let idx = full.contains.iter().position(|&c| c == (1, 1, 4)).expect("L28 set bounds A1 A1");
    let weak = ClosedSet { relabel: None, ..full.without_containment(idx) };
    // e1e1 = e3, e4e2 = e5 meets every remaining condition but not the dropped one
    let a = Algebra::from_products(5, &[(1, 1, 3, int(1)), (4, 2, 5, int(1))]).named("probe");
    assert!(degeneration::closed_set_membership(&a, &weak, None).unwrap());
    let plain_full = ClosedSet { relabel: None, ..full.clone() };
    assert!(!degeneration::closed_set_membership(&a, &plain_full, None).unwrap());
    let outcome = degeneration::borel_stability_probe(&weak, &a, 100, 42).unwrap();
    assert!(matches!(outcome, ProbeOutcome::Hit { .. }), "{:?}", outcome);
}

#[test]
fn literal_first_relation_of_the_l47_set_is_not_borel_stable() {
    let shipped = degeneration::shipped_closed_sets().into_iter().find(|r| r.name == "L47").unwrap();
    let mut literal = shipped.clone();
    literal.relations[0] = degeneration::parse_relation("c21_5*c42_5 + c21_3*c32_5 = c22_4*c41_5", 5).unwrap();
    let src = Catalog::shipped().algebra("L47").unwrap().clone();
    let corrected = degeneration::borel_stability_probe(&shipped, &src, 100, 42).unwrap();
    assert!(corrected.is_clean());
    match degeneration::borel_stability_probe(&literal, &src, 100, 42) {
        Ok(o) => assert!(!o.is_clean()),
        Err(e) => assert!(matches!(e, degeneration::DegenerationError::NotInClosedSet(_))),
    }
}

#[test]
fn reports_are_deterministic() {
    let cat = Catalog::shipped();
    let opts = Options { target_trials: 50, ..Options::default() };
    let run = || {
        let reps: Vec<_> = [Suite::Degenerations, Suite::NondegenEvidence, Suite::Ff].iter().map(|s| report::run_suite(&cat, *s, &opts)).collect();
        report::render(&reps, Format::Structured, opts.seed, false)
    };
    let first = run();
    assert_eq!(first, run());
    assert!(first.starts_with(&format!("report:\n  schema: {}\n", report::SCHEMA_VERSION)));
}

#[test]
fn base_reductions_mod_three_land_in_enumerated_classes() {
    let cat = Catalog::shipped();
    let (_, cl) = nilalg::ff::run_oracle(3, 3).unwrap();
    let algs: Vec<&Algebra> = report::REDUCED_BASES.iter().map(|n| cat.algebra(n).unwrap()).collect();
    let reds = nilalg::ff::base_reductions(&algs, &cl);
    // N3_03 appears once per nonzero alpha mod 3
    assert_eq!(reds.len(), 7);
    assert!(reds.iter().all(|r| r.enumerated), "{:?}", reds);
    assert_eq!(cl.classes.len(), 9);
}

#[test]
fn extensions_are_non_symmetric_apart_from_split_rows_and_l67_at_zero() {
    let cat = Catalog::shipped();
    let symmetric: Vec<&str> = cat.of_kind(EntryKind::Extension).filter(|e| e.algebra.check_left_leibniz().is_none()).map(|e| e.name()).collect();
    // the split representatives over the symmetric base N4_12 give N4_12 + C
    assert_eq!(symmetric, ["L51", "L59", "L60", "L61"]);
    assert!(symmetric.iter().all(|n| cat.get(n).unwrap().notes.iter().any(|m| m == OUTSIDE_TS_NOTE)));
    let l67 = cat.algebra("L67").unwrap();
    let at: std::collections::HashMap<_, _> = [(nilalg::scalar::Var::new("alpha"), nilalg::scalar::Gq::from_int(0))].into_iter().collect();
    let zero = l67.at(&at).unwrap();
    assert!(zero.check_left_leibniz().is_none());
    assert!(zero.check_right_leibniz().is_none());
}

#[test]
fn both_l25_representatives_lie_in_one_orbit() {
    use nilalg::scalar::{Gq, Var};
    let cat = Catalog::shipped();
    let base = cat.get("N4_01").unwrap();
    let nabla = base.nabla_forms().unwrap();
    let table = catalog::shipped_action_tables().into_iter().find(|t| t.name == "N4_01").unwrap();
    let sum = |ks: &[usize]| ks.iter().fold(nilalg::cohomology::BilinearForm::zero(4), |acc, &k| acc.add(&nabla[k - 1]));
    let listed = sum(&[1, 3, 5, 6]);
    let shipped = sum(&[2, 3, 5, 6]);
    let assignment: std::collections::HashMap<Var, Gq> = [("x", 1), ("q", 0), ("r", -1), ("u", 0), ("w", -1), ("t", -1), ("k", 0), ("z", 0), ("y", 0), ("l", -1)]
        .into_iter()
        .map(|(v, k)| (Var::new(v), Gq::from_int(k)))
        .collect();
    let moves = |asg: &std::collections::HashMap<Var, Gq>| nilalg::action::orbit_transporter_check(&base.algebra, &table.family, asg, &[listed.clone()], &[shipped.clone()]).unwrap();
    assert!(moves(&assignment));
    let identity: std::collections::HashMap<Var, Gq> =
        ["x", "r", "t", "l"].iter().map(|v| (Var::new(v), Gq::from_int(1))).chain(["q", "u", "w", "k", "z", "y"].iter().map(|v| (Var::new(v), Gq::from_int(0)))).collect();
    assert!(!moves(&identity));
}
