mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;

use common::*;
use rand::RngExt;
use setkr::ast::validate_structure;
use setkr::definitions::check_definitions;
use setkr::dl::{parse_dl, translate_expr, translate_kb, DlAxiom, DlError, DlExpr, DlInterpretation, DlKb, Role};
use setkr::semantics::{eval_term, models_kb};

fn names(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn family_fixture_translates_to_a_valid_kb() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/family.dl");
    let dl = parse_dl(&std::fs::read_to_string(path).unwrap(), "family.dl").unwrap();
    let kb = translate_kb(&dl).unwrap();
    assert!(validate_structure(&kb).is_empty(), "{:?}", validate_structure(&kb));
    assert!(check_definitions(&kb).is_empty());
    assert_eq!(kb.assertions.len(), dl.concepts.len() + dl.axioms.len());
}

#[test]
fn people_with_a_daughter() {
    let kb = DlKb {
        individuals: names(&["ann", "bob", "cat", "dan"]),
        concepts: names(&["Female"]),
        roles: names(&["parentOf"]),
        axioms: Vec::new(),
    };
    let mut interp = DlInterpretation::default();
    interp.concepts.insert("Female".into(), names(&["ann", "cat"]));
    interp.roles.insert(
        "parentOf".into(),
        [("ann", "bob"), ("bob", "cat"), ("dan", "ann"), ("dan", "bob")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    );
    let e = DlExpr::exists(Role::Named("parentOf".into()), DlExpr::atomic("Female"));
    let got = eval_term(&interp.to_interpretation(&kb), &translate_expr(&e, &kb).unwrap()).unwrap();
    let w = DlWorld { kb: kb.clone(), interp };
    assert_eq!(dl_extension(&e, &w), names(&["bob", "dan"]));
    assert_eq!(got, set_of_names(&names(&["bob", "dan"])));
}

#[test]
fn deep_random_expressions_agree_with_the_oracle() {
    let mut rng = rng(0xa9ee);
    for _ in 0..150 {
        let kb = dl_signature(rng.random_range(1..=4));
        let interp = random_dl_interpretation(&kb, &mut rng);
        let i = interp.to_interpretation(&kb);
        let w = DlWorld { kb: kb.clone(), interp };
        for _ in 0..4 {
            let e = random_dl_expr(&kb, 4, &mut rng);
            let got = eval_term(&i, &translate_expr(&e, &kb).unwrap()).unwrap();
            assert_eq!(got, set_of_names(&dl_extension(&e, &w)), "{e}");
        }
    }
}

fn random_axiom(kb: &DlKb, rng: &mut rand_chacha::ChaCha8Rng) -> DlAxiom {
    let inds: Vec<&String> = kb.individuals.iter().collect();
    let ind = |rng: &mut rand_chacha::ChaCha8Rng| inds[rng.random_range(0..inds.len())].clone();
    match rng.random_range(0..5) {
        0 => DlAxiom::Instance(ind(rng), random_dl_expr(kb, 2, rng)),
        1 => {
            let r = if rng.random_bool(0.5) { Role::Named("r".into()) } else { Role::Inverse("r".into()) };
            DlAxiom::Related(ind(rng), ind(rng), r)
        }
        2 => DlAxiom::Subsumption(random_dl_expr(kb, 2, rng), random_dl_expr(kb, 2, rng)),
        3 => DlAxiom::Equivalence(random_dl_expr(kb, 1, rng), random_dl_expr(kb, 1, rng)),
        _ => DlAxiom::SameAs(ind(rng), ind(rng)),
    }
}

fn satisfied(ax: &DlAxiom, w: &DlWorld) -> bool {
    match ax {
        DlAxiom::Instance(a, c) => dl_extension(c, w).contains(a),
        DlAxiom::Related(a, b, r) => {
            let pair = match r {
                Role::Named(_) => (a.clone(), b.clone()),
                Role::Inverse(_) => (b.clone(), a.clone()),
            };
            w.interp.roles.get(r.name()).is_some_and(|p| p.contains(&pair))
        }
        DlAxiom::Subsumption(c, d) => dl_extension(c, w).is_subset(&dl_extension(d, w)),
        DlAxiom::Equivalence(c, d) => dl_extension(c, w) == dl_extension(d, w),
        DlAxiom::SameAs(a, b) => a == b,
    }
}

#[test]
fn translated_axioms_hold_exactly_when_the_dl_axioms_do() {
    let mut rng = rng(0xa110);
    let (mut models, mut total) = (0, 0);
    for _ in 0..300 {
        let mut kb = dl_signature(rng.random_range(1..=3));
        kb.axioms = (0..rng.random_range(1..=2)).map(|_| random_axiom(&kb, &mut rng)).collect();
        let interp = random_dl_interpretation(&kb, &mut rng);
        let translated = translate_kb(&kb).unwrap();
        let got = models_kb(&interp.to_interpretation(&kb), &translated).unwrap().is_model();
        let w = DlWorld { kb: kb.clone(), interp };
        let want = kb.axioms.iter().all(|a| satisfied(a, &w));
        assert_eq!(got, want, "{:?}", kb.axioms);
        models += want as usize;
        total += 1;
    }
    assert!(models > 0 && models < total);
}

#[test]
fn displayed_expressions_reparse() {
    let mut rng = rng(0xd15);
    let kb = dl_signature(3);
    for _ in 0..200 {
        let e = random_dl_expr(&kb, 3, &mut rng);
        let src = format!("individual i0, i1, i2; concept A, B; role r, s; i0 : {e};");
        let back = parse_dl(&src, "e.dl").unwrap_or_else(|d| panic!("{src}: {d:?}"));
        assert_eq!(back.axioms, vec![DlAxiom::Instance("i0".into(), e)]);
    }
}

#[test]
fn undeclared_and_reserved_names() {
    let kb = dl_signature(1);
    assert_eq!(
        translate_expr(&DlExpr::atomic("Z"), &kb),
        Err(DlError::UndeclaredConcept("Z".into()))
    );
    assert!(matches!(
        translate_expr(&DlExpr::exists(Role::Named("q".into()), DlExpr::Top), &kb),
        Err(DlError::UndeclaredRole(_))
    ));
    let mut bad = kb.clone();
    bad.concepts.insert("Thing".into());
    assert!(matches!(translate_kb(&bad), Err(DlError::Reserved(_))));
}
