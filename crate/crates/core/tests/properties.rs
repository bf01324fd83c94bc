use nilalg::action::{act_on_cocycle, AutFamily};
use nilalg::algebra::Algebra;
use nilalg::catalog::{Catalog, Entry, EntryKind};
use nilalg::cohomology::{self, BilinearForm, SymmetricSplit};
use nilalg::degeneration::{self, Verdict};
use nilalg::extension;
use nilalg::ff;
use nilalg::invariants;
use nilalg::linalg::{self, Matrix, Pivoting};
use nilalg::scalar::{s_var, Gq, LaurentPoly, Scalar, Var};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::OnceLock;

fn gq() -> impl Strategy<Value = Gq> {
    (-20i64..=20, 1i64..=9, -5i64..=5).prop_map(|(p, q, im)| &Gq::from_ratio(p, q) + &(&Gq::i() * &Gq::from_int(im)))
}

/// Small rational functions in alpha and beta.
fn scalar() -> impl Strategy<Value = Scalar> {
    let atom = prop_oneof![
        gq().prop_map(Scalar::constant),
        Just(Scalar::var("alpha")),
        Just(Scalar::var("beta")),
        Just(Scalar::var("alpha").sub(&Scalar::one())),
        Just(Scalar::var("beta").add(&Scalar::from_int(2))),
    ];
    prop::collection::vec((atom, 0u8..4), 1..4).prop_map(|parts| {
        let mut acc = Scalar::zero();
        for (i, (x, op)) in parts.into_iter().enumerate() {
            acc = match (i, op) {
                (0, _) => x,
                (_, 0) => acc.add(&x),
                (_, 1) => acc.sub(&x),
                (_, 2) => acc.mul(&x),
                _ => acc.div(&x).unwrap_or(acc),
            };
        }
        acc
    })
}

fn int_matrix(n: usize, entries: &[i64]) -> Matrix {
    entries.chunks(n).take(n).map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect()
}

fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m: Matrix = (0..n).map(|_| (0..n).map(|_| Scalar::from_int(rng.gen_range(-2..=2))).collect()).collect();
        if !linalg::determinant(&m).is_zero() {
            return m;
        }
    }
}

/// Permutation, diagonal scaling and two shears. Keeps transformed tensors sparse,
/// which matters for the symbolic scalar path on 5-dimensional algebras.
fn sparse_invertible(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let scales = [-2i64, -1, 1, 2, 3];
    let mut m = linalg::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        m[i][j] = Scalar::from_int(scales[rng.gen_range(0..scales.len())]);
    }
    for _ in 0..2 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            let mut t = linalg::identity(n);
            t[i][j] = Scalar::from_int(rng.gen_range(1..=2));
            m = linalg::mat_mul(&t, &m);
        }
    }
    m
}

/// Catalog algebras with every parameter at its first default sample.
fn sampled_catalog() -> Vec<Algebra> {
    Catalog::shipped()
        .entries
        .iter()
        .map(|e| {
            let s = invariants::default_samples(&e.algebra, 1);
            e.algebra.at(&s[0]).unwrap()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn scalar_ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert!(a.add(&b).add(&c).equals(&a.add(&b.add(&c))));
        prop_assert!(a.mul(&b.add(&c)).equals(&a.mul(&b).add(&a.mul(&c))));
        prop_assert!(a.mul(&b).equals(&b.mul(&a)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in scalar(), b in scalar(), x in -7i64..=7, y in -7i64..=7) {
        let at: HashMap<Var, Gq> = [(Var::new("alpha"), Gq::from_int(x)), (Var::new("beta"), Gq::from_int(y))].into_iter().collect();
        if let (Ok(va), Ok(vb), Ok(vab)) = (a.eval(&at), b.eval(&at), a.mul(&b).eval(&at)) {
            prop_assert_eq!(vab, &va * &vb);
        }
        if let (Ok(va), Ok(vb), Ok(vab)) = (a.eval(&at), b.eval(&at), a.add(&b).eval(&at)) {
            prop_assert_eq!(vab, &va + &vb);
        }
    }

    #[test]
    fn laurent_arithmetic_commutes_with_evaluation(
        xs in prop::collection::vec((-3i64..=3, gq()), 1..4),
        ys in prop::collection::vec((-3i64..=3, gq()), 1..4),
        s0 in prop_oneof![-5i64..=-1, 1i64..=5],
    ) {
        let build = |v: &[(i64, Gq)]| v.iter().fold(LaurentPoly::zero(1), |acc, (k, c)| acc.add(&LaurentPoly::monomial(1, *k, Scalar::constant(c.clone()))));
        let (p, q) = (build(&xs), build(&ys));
        let s0 = Gq::from_int(s0);
        let none = HashMap::new();
        let (vp, vq) = (p.eval_at(&s0, &none).unwrap(), q.eval_at(&s0, &none).unwrap());
        prop_assert_eq!(p.mul(&q).eval_at(&s0, &none).unwrap(), &vp * &vq);
        prop_assert_eq!(p.add(&q).eval_at(&s0, &none).unwrap(), &vp + &vq);
    }
}

fn f3_data() -> &'static (Vec<ff::Tensor>, Vec<(ff::FfMatrix, ff::FfMatrix)>) {
    static DATA: OnceLock<(Vec<ff::Tensor>, Vec<(ff::FfMatrix, ff::FfMatrix)>)> = OnceLock::new();
    DATA.get_or_init(|| (ff::triangular_leibniz(3, 3), ff::general_linear_group(3, 3)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn change_of_basis_round_trips(idx in 0usize..200, entries in prop::collection::vec(-2i64..=2, 25)) {
        let cat = Catalog::shipped();
        let a = &cat.entries[idx % cat.entries.len()].algebra;
        let p = int_matrix(a.n, &entries);
        prop_assume!(!linalg::determinant(&p).is_zero());
        let pinv = linalg::inverse(&p).unwrap();
        let b = a.change_basis(&p).unwrap();
        prop_assert!(b.change_basis(&pinv).unwrap().tensor_eq(a));
    }

    #[test]
    fn canonical_forms_are_orbit_invariants(k in 0usize..10_000, g in 0usize..100_000) {
        let (n, p) = (3, 3);
        let (reps, group) = f3_data();
        let t = &reps[k % reps.len()];
        let (m, mi) = &group[g % group.len()];
        let moved = ff::change_basis(n, p, t, m, mi);
        prop_assert!(ff::is_right_leibniz(n, p, &moved));
        prop_assert_eq!(ff::canonical_form(n, p, t, group), ff::canonical_form(n, p, &moved, group));
        prop_assert_eq!(ff::fingerprint(n, p, t), ff::fingerprint(n, p, &moved));
    }
}

#[test]
fn leibniz_verdict_survives_change_of_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for a in sampled_catalog() {
        let mut broken = a.clone();
        let k = rng.gen_range(0..a.c.len());
        broken.c[k] = broken.c[k].add(&Scalar::one());
        let before = broken.check_right_leibniz().is_none();
        for _ in 0..8 {
            let p = sparse_invertible(a.n, &mut rng);
            assert!(a.change_basis(&p).unwrap().check_right_leibniz().is_none(), "{}", a.name);
            assert_eq!(broken.change_basis(&p).unwrap().check_right_leibniz().is_none(), before, "{} perturbed", a.name);
        }
    }
}

#[test]
fn annihilator_and_series_are_basis_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for a in sampled_catalog() {
        let ann = a.annihilator().unwrap().dim();
        let series = a.central_series_dims().unwrap();
        assert!(series.windows(2).all(|w| w[0] >= w[1]), "{}", a.name);
        for _ in 0..4 {
            let b = a.change_basis(&sparse_invertible(a.n, &mut rng)).unwrap();
            assert_eq!(b.annihilator().unwrap().dim(), ann, "{}", a.name);
            assert_eq!(b.central_series_dims().unwrap(), series, "{}", a.name);
        }
    }
}

#[test]
fn fingerprints_are_basis_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for a in sampled_catalog() {
        let f = invariants::fingerprint(&a, None).unwrap();
        for _ in 0..3 {
            let b = a.change_basis(&sparse_invertible(a.n, &mut rng)).unwrap();
            assert_eq!(invariants::fingerprint(&b, None).unwrap(), f, "{}", a.name);
        }
    }
}

#[test]
fn cohomology_dimensions_add_up_for_every_base() {
    let cat = Catalog::shipped();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for e in cat.of_kind(EntryKind::Base) {
        let a = &e.algebra;
        let s = invariants::default_samples(a, 1);
        let a = a.at(&s[0]).unwrap();
        let c = cohomology::cohomology_basis(&a).unwrap();
        assert_eq!(c.z2.len(), c.dim_h2() + c.b2.len(), "{}", a.name);
        let moved = a.change_basis(&random_invertible(a.n, &mut rng)).unwrap();
        assert_eq!(cohomology::cocycle_space(&moved).unwrap().len(), c.z2.len(), "{}", a.name);
    }
}

fn is_lie(a: &Algebra) -> bool {
    let n = a.n;
    (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| a.get(i, j, k).add(a.get(j, i, k)).is_zero())))
}

#[test]
fn symmetric_bases_have_symmetric_cocycles_inside_all_cocycles() {
    let cat = Catalog::shipped();
    let mut seen = 0;
    for e in cat.of_kind(EntryKind::Base).filter(|e| e.algebra.is_symmetric()) {
        let a = &e.algebra;
        let z: Vec<Vec<Scalar>> = cohomology::cocycle_space(a).unwrap().into_iter().map(|f| f.m).collect();
        for f in cohomology::symmetric_cocycle_space(a).unwrap() {
            assert!(linalg::express_in_span(&z, &f.m, &Pivoting::Generic).unwrap().is_some(), "{}", a.name);
        }
        if !is_lie(a) {
            for f in e.nabla_forms().unwrap() {
                if cohomology::rs_us_classify(a, std::slice::from_ref(&f)).unwrap() == SymmetricSplit::U {
                    let ext = extension::extend_unchecked(a, std::slice::from_ref(&f));
                    assert!(ext.check_left_leibniz().is_some(), "{} by {}", a.name, f);
                    seen += 1;
                }
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn extensions_have_large_enough_annihilators() {
    let cat = Catalog::shipped();
    for e in cat.of_kind(EntryKind::Extension) {
        let from = e.from.as_ref().unwrap();
        assert!(e.algebra.annihilator().map(|s| s.dim()).unwrap_or(usize::MAX) >= from.reps.len() || e.algebra.is_parametric(), "{}", e.name());
    }
}

fn sample_aut(t: &nilalg::action::ActionTable, rng: &mut ChaCha8Rng) -> AutFamily {
    let vars: Vec<Var> = t.family.phi.iter().flatten().flat_map(|x| x.vars()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let at: HashMap<Var, Scalar> = vars.into_iter().map(|v| (v, Scalar::from_int(rng.gen_range(1..=5)))).collect();
    t.family.instantiate(&at).unwrap()
}

#[test]
fn action_is_compatible_with_composition_and_preserves_coboundaries() {
    let cat = Catalog::shipped();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for t in nilalg::catalog::shipped_action_tables() {
        let a = cat.algebra(&t.base).unwrap();
        let sample = invariants::default_samples(a, 1);
        let a = a.at(&sample[0]).unwrap();
        let (phi, psi) = (sample_aut(&t, &mut rng), sample_aut(&t, &mut rng));
        let theta = BilinearForm::from_flat(a.n, (0..a.n * a.n).map(|_| Scalar::from_int(rng.gen_range(-3..=3))).collect());
        // φᵀ M φ is a right action: acting by φψ is acting by φ, then by ψ
        let lhs = act_on_cocycle(&phi.compose(&psi), &theta);
        let rhs = act_on_cocycle(&psi, &act_on_cocycle(&phi, &theta));
        assert!(lhs.sub(&rhs).is_zero(), "{}", t.name);
        if nilalg::action::verify_aut_family(&a, &phi).is_none() {
            let b2: Vec<Vec<Scalar>> = cohomology::coboundary_space(&a).unwrap().into_iter().map(|f| f.m).collect();
            for d in cohomology::coboundary_generators(&a) {
                let img = act_on_cocycle(&phi, &d);
                assert!(linalg::express_in_span(&b2, &img.m, &Pivoting::Generic).unwrap().is_some(), "{}", t.name);
            }
        }
    }
}

fn at_s(m: &Matrix, s: i64, extra: &HashMap<Var, Scalar>) -> Matrix {
    let mut sub = extra.clone();
    sub.insert(s_var(), Scalar::from_int(s));
    m.iter().map(|r| r.iter().map(|x| x.substitute(&sub).unwrap()).collect()).collect()
}

#[test]
fn deformation_at_s_equal_one_is_a_change_of_basis() {
    let cat = Catalog::shipped();
    for cert in degeneration::shipped_certificates() {
        let rep = degeneration::check_certificate(&cat, &cert).unwrap();
        assert_eq!(rep.verdict, Verdict::Valid, "{}", cert);
        let mut sub: HashMap<Var, Scalar> = HashMap::new();
        if let Some((name, v)) = &rep.constant {
            sub.insert(Var::new(name), v.clone());
        }
        let at_one: HashMap<Var, Scalar> = [(s_var(), Scalar::one())].into_iter().collect();
        let src_params: HashMap<Var, Scalar> = cert.source_params.iter().map(|(v, x)| (*v, x.substitute(&at_one).unwrap())).collect();
        let src = cat.algebra(&cert.source).unwrap().substitute(&src_params).unwrap();
        let expect = src.change_basis(&at_s(&cert.basis, 1, &sub)).unwrap();
        let got = rep.deformed.substitute(&at_one).unwrap();
        assert!(got.tensor_eq(&expect), "{}", cert);
    }
}

#[test]
fn certificates_survive_post_composition() {
    let base = Catalog::shipped();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for cert in degeneration::shipped_certificates() {
        let q = random_invertible(5, &mut rng);
        let target = base.algebra(&cert.target).unwrap().change_basis(&q).unwrap().named("moved");
        let mut cat = base.clone();
        cat.entries.push(Entry::new(target, EntryKind::Extension));
        let mut moved = cert.clone();
        moved.target = "moved".into();
        moved.basis = linalg::mat_mul(&q, &cert.basis);
        let rep = degeneration::check_certificate(&cat, &moved).unwrap();
        assert_eq!(rep.verdict, Verdict::Valid, "{}", cert);
    }
}

#[test]
fn mismatched_composition_is_rejected() {
    // the same certificate against an unmoved target after moving the basis
    let cat = Catalog::shipped();
    let cert = degeneration::shipped_certificates().into_iter().find(|c| c.source == "L82").unwrap();
    let mut moved = cert.clone();
    moved.basis = linalg::mat_mul(&int_matrix(5, &[0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1]), &cert.basis);
    let rep = degeneration::check_certificate(&cat, &moved).unwrap();
    assert_ne!(rep.verdict, Verdict::Valid);
}
