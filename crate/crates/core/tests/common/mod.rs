//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use setkr::ast::Term;
use setkr::dl::{DlExpr, DlInterpretation, DlKb, Role};
use setkr::semantics::Interpretation;
use setkr::{Assertion, Value};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every value of set-nesting depth below `depth` over `atoms`.
pub fn values(atoms: &[Value], depth: usize) -> Vec<Value> {
    let mut out: Vec<Value> = atoms.to_vec();
    if depth >= 2 {
        for mask in 0..(1u32 << atoms.len()) {
            out.push(Value::set(
                atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()),
            ));
        }
    }
    out
}

pub fn atoms(n: usize) -> Vec<Value> {
    (0..n).map(|i| Value::atom(format!("u{i}"))).collect()
}

/// All `len`-tuples over `domain`.
pub fn tuples<T: Clone>(domain: &[T], len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                domain.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

pub fn eq(l: &str, r: &str) -> Assertion {
    Assertion::new(Term::atomic(l), Term::atomic(r))
}

// ---- description logic --------------------------------------------------

pub struct DlWorld {
    pub kb: DlKb,
    pub interp: DlInterpretation,
}

fn role_pairs(w: &DlWorld, r: &Role) -> BTreeSet<(String, String)> {
    let pairs = w.interp.roles.get(r.name()).cloned().unwrap_or_default();
    match r {
        Role::Named(_) => pairs,
        Role::Inverse(_) => pairs.into_iter().map(|(a, b)| (b, a)).collect(),
    }
}

/// Textbook extension of `e`, computed on names.
pub fn dl_extension(e: &DlExpr, w: &DlWorld) -> BTreeSet<String> {
    let all = &w.kb.individuals;
    let fillers = |r: &Role, c: &DlExpr, x: &str| -> (usize, usize) {
        let ext = dl_extension(c, w);
        let succ: Vec<String> = role_pairs(w, r).into_iter().filter(|(a, _)| a == x).map(|(_, b)| b).collect();
        (succ.len(), succ.iter().filter(|y| ext.contains(*y)).count())
    };
    match e {
        DlExpr::Top => all.clone(),
        DlExpr::Bottom => BTreeSet::new(),
        DlExpr::Atomic(c) => w.interp.concepts.get(c).cloned().unwrap_or_default(),
        DlExpr::OneOf(xs) => xs.iter().cloned().collect(),
        DlExpr::Not(c) => all.difference(&dl_extension(c, w)).cloned().collect(),
        DlExpr::And(a, b) => dl_extension(a, w).intersection(&dl_extension(b, w)).cloned().collect(),
        DlExpr::Or(a, b) => dl_extension(a, w).union(&dl_extension(b, w)).cloned().collect(),
        DlExpr::Exists(r, c) => all.iter().filter(|x| fillers(r, c, x).1 > 0).cloned().collect(),
        DlExpr::Forall(r, c) => all
            .iter()
            .filter(|x| {
                let (n, hit) = fillers(r, c, x);
                n == hit
            })
            .cloned()
            .collect(),
        DlExpr::AtLeast(n, r, c) => all.iter().filter(|x| fillers(r, c, x).1 >= *n as usize).cloned().collect(),
    }
}

pub fn dl_signature(individuals: usize) -> DlKb {
    DlKb {
        individuals: (0..individuals).map(|i| format!("i{i}")).collect(),
        concepts: ["A", "B"].iter().map(|s| s.to_string()).collect(),
        roles: ["r", "s"].iter().map(|s| s.to_string()).collect(),
        axioms: Vec::new(),
    }
}

pub fn set_of_names(names: &BTreeSet<String>) -> Value {
    Value::set(names.iter().map(Value::atom))
}

fn subset_by_mask<T: Clone + Ord>(items: &[T], mask: u64) -> BTreeSet<T> {
    items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x.clone()).collect()
}

/// Every interpretation of A, B and r over the individuals of `kb`; `s` is
/// left empty.
pub fn all_dl_interpretations(kb: &DlKb) -> Vec<DlInterpretation> {
    let inds: Vec<String> = kb.individuals.iter().cloned().collect();
    let pairs: Vec<(String, String)> =
        inds.iter().flat_map(|a| inds.iter().map(move |b| (a.clone(), b.clone()))).collect();
    let n = inds.len() as u32;
    let mut out = Vec::new();
    for a in 0..(1u64 << n) {
        for b in 0..(1u64 << n) {
            for r in 0..(1u64 << pairs.len()) {
                let mut i = DlInterpretation::default();
                i.concepts.insert("A".into(), subset_by_mask(&inds, a));
                i.concepts.insert("B".into(), subset_by_mask(&inds, b));
                i.roles.insert("r".into(), subset_by_mask(&pairs, r));
                out.push(i);
            }
        }
    }
    out
}

pub fn random_dl_interpretation(kb: &DlKb, rng: &mut ChaCha8Rng) -> DlInterpretation {
    let inds: Vec<String> = kb.individuals.iter().cloned().collect();
    let mut i = DlInterpretation::default();
    for c in &kb.concepts {
        i.concepts.insert(c.clone(), inds.iter().filter(|_| rng.random_bool(0.5)).cloned().collect());
    }
    for r in &kb.roles {
        let density = rng.random_range(0.1..0.6);
        let pairs = inds
            .iter()
            .flat_map(|a| inds.iter().map(move |b| (a.clone(), b.clone())))
            .filter(|_| rng.random_bool(density))
            .collect();
        i.roles.insert(r.clone(), pairs);
    }
    i
}

fn random_role(rng: &mut ChaCha8Rng) -> Role {
    let name = if rng.random_bool(0.5) { "r" } else { "s" };
    if rng.random_bool(0.3) {
        Role::Inverse(name.into())
    } else {
        Role::Named(name.into())
    }
}

pub fn random_dl_expr(kb: &DlKb, depth: usize, rng: &mut ChaCha8Rng) -> DlExpr {
    let inds: Vec<&String> = kb.individuals.iter().collect();
    if depth == 0 || rng.random_bool(0.2) {
        return match rng.random_range(0..5) {
            0 => DlExpr::Top,
            1 => DlExpr::Bottom,
            2 => DlExpr::atomic("A"),
            3 => DlExpr::atomic("B"),
            _ => {
                let k = rng.random_range(1..=inds.len().min(2));
                DlExpr::OneOf((0..k).map(|_| inds[rng.random_range(0..inds.len())].clone()).collect())
            }
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_dl_expr(kb, depth - 1, rng);
    match rng.random_range(0..6) {
        0 => DlExpr::not(sub(rng)),
        1 => DlExpr::and(sub(rng), sub(rng)),
        2 => DlExpr::or(sub(rng), sub(rng)),
        3 => DlExpr::exists(random_role(rng), sub(rng)),
        4 => DlExpr::forall(random_role(rng), sub(rng)),
        _ => DlExpr::at_least(rng.random_range(0..=3), random_role(rng), sub(rng)),
    }
}

/// Atoms, `A`, `B`, `{i0}`, `{i0, i1}`, then every constructor applied once
/// to them, then the unary constructors applied to that layer.
pub fn small_dl_exprs() -> Vec<DlExpr> {
    let r = Role::Named("r".into());
    let inv = Role::Inverse("r".into());
    let base = vec![
        DlExpr::Top,
        DlExpr::Bottom,
        DlExpr::atomic("A"),
        DlExpr::atomic("B"),
        DlExpr::OneOf(vec!["i0".into()]),
        DlExpr::OneOf(vec!["i0".into(), "i1".into()]),
    ];
    let unary = |e: &DlExpr| {
        vec![
            DlExpr::not(e.clone()),
            DlExpr::exists(r.clone(), e.clone()),
            DlExpr::exists(inv.clone(), e.clone()),
            DlExpr::forall(r.clone(), e.clone()),
            DlExpr::forall(inv.clone(), e.clone()),
            DlExpr::at_least(1, r.clone(), e.clone()),
            DlExpr::at_least(2, inv.clone(), e.clone()),
        ]
    };
    let mut one = base.clone();
    for b in &base {
        one.extend(unary(b));
        for c in &base {
            one.push(DlExpr::and(b.clone(), c.clone()));
            one.push(DlExpr::or(b.clone(), c.clone()));
        }
    }
    let mut all = one.clone();
    for e in &one {
        all.push(DlExpr::not(e.clone()));
        all.push(DlExpr::exists(r.clone(), e.clone()));
        all.push(DlExpr::forall(inv.clone(), e.clone()));
        all.push(DlExpr::at_least(2, r.clone(), e.clone()));
        all.push(DlExpr::and(e.clone(), DlExpr::atomic("A")));
    }
    all
}

// ---- nested terms -------------------------------------------------------

pub const UNARY: &str = "Opp";
pub const BINARY: &str = "Op";

/// A term over individuals `i0..i3` and the operators `Op`/`Opp`, nested at
/// most `depth` applications deep.
pub fn random_nested_term(depth: usize, rng: &mut ChaCha8Rng) -> Term {
    if depth == 0 || rng.random_bool(0.25) {
        return Term::atomic(format!("i{}", rng.random_range(0..4)));
    }
    if rng.random_bool(0.5) {
        Term::apply(UNARY, vec![random_nested_term(depth - 1, rng)])
    } else {
        Term::apply(BINARY, vec![random_nested_term(depth - 1, rng), random_nested_term(depth - 1, rng)])
    }
}

/// Individuals `i0..i3` and total tables for `Op`/`Opp`, all over `atoms`.
pub fn random_op_interpretation(atoms: &[Value], rng: &mut ChaCha8Rng) -> Interpretation {
    let pick = |rng: &mut ChaCha8Rng| atoms[rng.random_range(0..atoms.len())].clone();
    let mut i = Interpretation::new();
    i.universe = atoms.to_vec();
    for k in 0..4 {
        let v = pick(rng);
        i = i.with_individual(format!("i{k}"), v);
    }
    for a in atoms {
        let v = pick(rng);
        i = i.with_entry(UNARY, vec![a.clone()], v);
        for b in atoms {
            let v = pick(rng);
            i = i.with_entry(BINARY, vec![a.clone(), b.clone()], v);
        }
    }
    i
}

/// Names of every individual in `a`.
pub fn names(a: &Assertion) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    a.names(&mut out);
    out
}

pub fn interpretation_with(i: &Interpretation, extra: &BTreeMap<String, Value>) -> Interpretation {
    let mut j = i.clone();
    for (k, v) in extra {
        j.individual_map.insert(k.clone(), v.clone());
    }
    j
}
