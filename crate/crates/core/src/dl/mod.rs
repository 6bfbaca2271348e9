//! Description-logic knowledge bases and their translation into set terms.
//!
//! Roles become Boolean binary operators over the universe concept `Thing`.
//! A role acts on concepts through its lifted form
//! `R̂(S) = {d ∈ Thing | {c ∈ Thing | R(c, d)} ∩ S ≠ ∅}`, so the
//! R-successors of `x` are `R̂({x})`.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ast::{Assertion, Builtin, Definition, Formula, KnowledgeBase, OperatorSig, Term, BOOL};
use crate::desugar::not_equal;
use crate::hfset::Value;
use crate::semantics::Interpretation;

pub use parse::parse_dl;

/// Name of the universe concept in translated knowledge bases.
pub const THING: &str = "Thing";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    Named(String),
    Inverse(String),
}

impl Role {
    pub fn name(&self) -> &str {
        match self {
            Role::Named(r) | Role::Inverse(r) => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum DlExpr {
    Top,
    Bottom,
    Atomic(String),
    OneOf(Vec<String>),
    Not(Box<DlExpr>),
    And(Box<DlExpr>, Box<DlExpr>),
    Or(Box<DlExpr>, Box<DlExpr>),
    Exists(Role, Box<DlExpr>),
    Forall(Role, Box<DlExpr>),
    AtLeast(u32, Role, Box<DlExpr>),
}

impl DlExpr {
    pub fn atomic(name: impl Into<String>) -> Self {
        DlExpr::Atomic(name.into())
    }

    pub fn not(e: DlExpr) -> Self {
        DlExpr::Not(Box::new(e))
    }

    pub fn and(a: DlExpr, b: DlExpr) -> Self {
        DlExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: DlExpr, b: DlExpr) -> Self {
        DlExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(r: Role, c: DlExpr) -> Self {
        DlExpr::Exists(r, Box::new(c))
    }

    pub fn forall(r: Role, c: DlExpr) -> Self {
        DlExpr::Forall(r, Box::new(c))
    }

    pub fn at_least(n: u32, r: Role, c: DlExpr) -> Self {
        DlExpr::AtLeast(n, r, Box::new(c))
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Named(r) => write!(f, "{r}"),
            Role::Inverse(r) => write!(f, "inv({r})"),
        }
    }
}

impl fmt::Display for DlExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Everything but and/or is printed tightly; binary nodes get parentheses.
        match self {
            DlExpr::Top => write!(f, "top"),
            DlExpr::Bottom => write!(f, "bottom"),
            DlExpr::Atomic(a) => write!(f, "{a}"),
            DlExpr::OneOf(xs) => write!(f, "{{{}}}", xs.join(", ")),
            DlExpr::Not(e) => write!(f, "not {e}"),
            DlExpr::And(a, b) => write!(f, "({a} and {b})"),
            DlExpr::Or(a, b) => write!(f, "({a} or {b})"),
            DlExpr::Exists(r, e) => write!(f, "some {r}. {e}"),
            DlExpr::Forall(r, e) => write!(f, "only {r}. {e}"),
            DlExpr::AtLeast(n, r, e) => write!(f, "atleast {n} {r}. {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DlAxiom {
    /// `a : C`
    Instance(String, DlExpr),
    /// `(a, b) : R`
    Related(String, String, Role),
    /// `C [= D`
    Subsumption(DlExpr, DlExpr),
    /// `C == D`
    Equivalence(DlExpr, DlExpr),
    /// `a == b`
    SameAs(String, String),
}

impl fmt::Display for DlAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DlAxiom::Instance(a, c) => write!(f, "{a} : {c}"),
            DlAxiom::Related(a, b, r) => write!(f, "({a}, {b}) : {r}"),
            DlAxiom::Subsumption(c, d) => write!(f, "{c} [= {d}"),
            DlAxiom::Equivalence(c, d) => write!(f, "{c} == {d}"),
            DlAxiom::SameAs(a, b) => write!(f, "{a} == {b}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DlKb {
    pub individuals: BTreeSet<String>,
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub axioms: Vec<DlAxiom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DlError {
    #[error("undeclared role {0}")]
    UndeclaredRole(String),
    #[error("undeclared concept {0}")]
    UndeclaredConcept(String),
    #[error("undeclared individual {0}")]
    UndeclaredIndividual(String),
    #[error("{0} is reserved for the universe concept")]
    Reserved(String),
}

fn thing(copy: u32) -> Term {
    Term::var(THING, copy)
}

/// `R̂(s)`: elements with an R-predecessor in `s`. For an inverse role the
/// arguments of R are swapped. `s` must not mention copies 2 or 3 of `Thing`.
pub fn hat_transform(role: &Role, s: Term) -> Term {
    let (c, d) = (thing(3), thing(2));
    let rel = match role {
        Role::Named(r) => Term::apply(r.clone(), vec![c, d]),
        Role::Inverse(r) => Term::apply(r.clone(), vec![d, c]),
    };
    let preds = Term::comprehension(THING, 3, Assertion::new(rel, Term::top()));
    Term::comprehension(
        THING,
        2,
        not_equal(Term::builtin(Builtin::Intersect, vec![preds, s]), Term::empty()),
    )
}

/// Successors of the element bound to `Thing^1`.
fn successors(role: &Role) -> Term {
    hat_transform(role, Term::set(vec![thing(1)]))
}

fn elements_where(filter: Assertion) -> Term {
    Term::comprehension(THING, 1, filter)
}

impl DlKb {
    fn check_role(&self, r: &Role) -> Result<(), DlError> {
        if self.roles.contains(r.name()) {
            Ok(())
        } else {
            Err(DlError::UndeclaredRole(r.name().to_string()))
        }
    }

    fn check_individual(&self, a: &str) -> Result<(), DlError> {
        if self.individuals.contains(a) {
            Ok(())
        } else {
            Err(DlError::UndeclaredIndividual(a.to_string()))
        }
    }
}

/// The set term denoting the extension of `e`.
pub fn translate_expr(e: &DlExpr, kb: &DlKb) -> Result<Term, DlError> {
    let bin = |b: Builtin, x: &DlExpr, y: &DlExpr| -> Result<Term, DlError> {
        Ok(Term::builtin(b, vec![translate_expr(x, kb)?, translate_expr(y, kb)?]))
    };
    Ok(match e {
        DlExpr::Top => Term::atomic(THING),
        DlExpr::Bottom => Term::empty(),
        DlExpr::Atomic(a) => {
            if !kb.concepts.contains(a) {
                return Err(DlError::UndeclaredConcept(a.clone()));
            }
            Term::atomic(a.clone())
        }
        DlExpr::OneOf(xs) => {
            for x in xs {
                kb.check_individual(x)?;
            }
            Term::set(xs.iter().map(Term::atomic).collect())
        }
        DlExpr::Not(c) => Term::builtin(Builtin::Difference, vec![Term::atomic(THING), translate_expr(c, kb)?]),
        DlExpr::And(a, b) => bin(Builtin::Intersect, a, b)?,
        DlExpr::Or(a, b) => bin(Builtin::Union, a, b)?,
        DlExpr::Exists(r, c) => {
            kb.check_role(r)?;
            let hit = Term::builtin(Builtin::Intersect, vec![successors(r), translate_expr(c, kb)?]);
            elements_where(not_equal(hit, Term::empty()))
        }
        DlExpr::Forall(r, c) => {
            kb.check_role(r)?;
            let inside = Term::builtin(Builtin::Subset, vec![successors(r), translate_expr(c, kb)?]);
            elements_where(Assertion::new(inside, Term::top()))
        }
        DlExpr::AtLeast(n, r, c) => {
            kb.check_role(r)?;
            let hit = Term::builtin(Builtin::Intersect, vec![successors(r), translate_expr(c, kb)?]);
            let count = Term::builtin(Builtin::Cardinality, vec![hit]);
            let enough = Term::builtin(Builtin::Geq, vec![count, Term::literal(Value::ordinal(*n as usize))]);
            elements_where(Assertion::new(enough, Term::top()))
        }
    })
}

pub fn translate_axiom(ax: &DlAxiom, kb: &DlKb) -> Result<Formula, DlError> {
    let is_true = |t: Term| Formula::prim(t, Term::top());
    Ok(match ax {
        DlAxiom::Instance(a, c) => {
            kb.check_individual(a)?;
            is_true(Term::builtin(Builtin::Member, vec![Term::atomic(a.clone()), translate_expr(c, kb)?]))
        }
        DlAxiom::Related(a, b, r) => {
            kb.check_role(r)?;
            kb.check_individual(a)?;
            kb.check_individual(b)?;
            let (x, y) = match r {
                Role::Named(_) => (a, b),
                Role::Inverse(_) => (b, a),
            };
            is_true(Term::apply(r.name(), vec![Term::atomic(x.clone()), Term::atomic(y.clone())]))
        }
        DlAxiom::Subsumption(c, d) => is_true(Term::builtin(
            Builtin::Subset,
            vec![translate_expr(c, kb)?, translate_expr(d, kb)?],
        )),
        DlAxiom::Equivalence(c, d) => Formula::prim(translate_expr(c, kb)?, translate_expr(d, kb)?),
        DlAxiom::SameAs(a, b) => {
            kb.check_individual(a)?;
            kb.check_individual(b)?;
            Formula::prim(Term::atomic(a.clone()), Term::atomic(b.clone()))
        }
    })
}

/// The whole knowledge base: `Thing` enumerates the individuals, every
/// concept is asserted to lie inside `Thing`, and each axiom is translated.
pub fn translate_kb(kb: &DlKb) -> Result<KnowledgeBase, DlError> {
    for name in kb.individuals.iter().chain(&kb.concepts).chain(&kb.roles) {
        if name == THING {
            return Err(DlError::Reserved(name.clone()));
        }
    }
    let mut out = KnowledgeBase::default();
    for a in &kb.individuals {
        out.structure.add_individual(a.clone());
    }
    for c in &kb.concepts {
        out.structure.add_concept(c.clone());
    }
    for r in &kb.roles {
        out.structure
            .add_operator(OperatorSig::new(r.clone(), vec![THING.into(), THING.into()]).with_range(BOOL));
    }
    out.definitions.push(Definition::ConceptEnum {
        target: THING.into(),
        members: kb.individuals.iter().map(Term::atomic).collect(),
    });
    for c in &kb.concepts {
        out.assertions.push(Formula::prim(
            Term::builtin(Builtin::Subset, vec![Term::atomic(c.clone()), Term::atomic(THING)]),
            Term::top(),
        ));
    }
    for ax in &kb.axioms {
        out.assertions.push(translate_axiom(ax, kb)?);
    }
    Ok(out)
}

/// A DL interpretation over the named individuals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DlInterpretation {
    pub concepts: BTreeMap<String, BTreeSet<String>>,
    pub roles: BTreeMap<String, BTreeSet<(String, String)>>,
}

impl DlInterpretation {
    /// The matching set interpretation: individuals are atoms, `Thing` is
    /// the set of all of them, and role tables are total over `Thing²`.
    pub fn to_interpretation(&self, kb: &DlKb) -> Interpretation {
        let atoms: Vec<Value> = kb.individuals.iter().map(Value::atom).collect();
        let mut i = Interpretation::new().with_concept(THING, Value::set(atoms.clone()));
        i.universe = atoms.clone();
        for a in &kb.individuals {
            i = i.with_individual(a.clone(), Value::atom(a));
        }
        for c in &kb.concepts {
            let ext = self.concepts.get(c).into_iter().flatten().map(Value::atom);
            i = i.with_concept(c.clone(), Value::set(ext));
        }
        let empty = BTreeSet::new();
        for r in &kb.roles {
            let pairs = self.roles.get(r).unwrap_or(&empty);
            for a in &kb.individuals {
                for b in &kb.individuals {
                    let holds = pairs.contains(&(a.clone(), b.clone()));
                    i = i.with_entry(r.clone(), vec![Value::atom(a), Value::atom(b)], Value::boolean(holds));
                }
            }
        }
        i
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::eval_term;

    fn family() -> DlKb {
        DlKb {
            individuals: ["ann", "bob", "cid"].iter().map(|s| s.to_string()).collect(),
            concepts: ["Person"].iter().map(|s| s.to_string()).collect(),
            roles: ["hasChild"].iter().map(|s| s.to_string()).collect(),
            axioms: Vec::new(),
        }
    }

    fn interp() -> DlInterpretation {
        let mut d = DlInterpretation::default();
        d.concepts.insert("Person".into(), ["ann", "bob"].iter().map(|s| s.to_string()).collect());
        d.roles.insert(
            "hasChild".into(),
            [("ann", "bob"), ("ann", "cid"), ("bob", "cid")]
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        );
        d
    }

    fn ext(names: &[&str]) -> Value {
        Value::set(names.iter().map(Value::atom))
    }

    fn eval(e: &DlExpr) -> Value {
        let kb = family();
        eval_term(&interp().to_interpretation(&kb), &translate_expr(e, &kb).unwrap()).unwrap()
    }

    #[test]
    fn restrictions() {
        let child = Role::Named("hasChild".into());
        let person = DlExpr::atomic("Person");
        assert_eq!(eval(&DlExpr::exists(child.clone(), person.clone())), ext(&["ann"]));
        assert_eq!(eval(&DlExpr::forall(child.clone(), person.clone())), ext(&["cid"]));
        assert_eq!(eval(&DlExpr::at_least(2, child.clone(), DlExpr::Top)), ext(&["ann"]));
        let parent_of = DlExpr::exists(Role::Inverse("hasChild".into()), DlExpr::Top);
        assert_eq!(eval(&parent_of), ext(&["bob", "cid"]));
        assert_eq!(eval(&DlExpr::not(person)), ext(&["cid"]));
    }

    #[test]
    fn hat_lifts_sets() {
        let kb = family();
        let i = interp().to_interpretation(&kb);
        let s = Term::set(vec![Term::atomic("ann"), Term::atomic("bob")]);
        let image = hat_transform(&Role::Named("hasChild".into()), s);
        assert_eq!(eval_term(&i, &image).unwrap(), ext(&["bob", "cid"]));
        let pre = hat_transform(&Role::Inverse("hasChild".into()), Term::set(vec![Term::atomic("cid")]));
        assert_eq!(eval_term(&i, &pre).unwrap(), ext(&["ann", "bob"]));
    }

    #[test]
    fn undeclared_names() {
        let kb = family();
        let bad = DlExpr::exists(Role::Named("likes".into()), DlExpr::Top);
        assert_eq!(translate_expr(&bad, &kb), Err(DlError::UndeclaredRole("likes".into())));
        assert_eq!(
            translate_expr(&DlExpr::atomic("Cat"), &kb),
            Err(DlError::UndeclaredConcept("Cat".into()))
        );
    }

    #[test]
    fn kb_translation_validates() {
        let mut kb = family();
        kb.axioms.push(DlAxiom::Instance("ann".into(), DlExpr::atomic("Person")));
        kb.axioms.push(DlAxiom::Related("ann".into(), "bob".into(), Role::Named("hasChild".into())));
        let skr = translate_kb(&kb).unwrap();
        assert!(crate::ast::validate_structure(&skr).is_empty());
        assert_eq!(skr.assertions.len(), 3);
    }
}
