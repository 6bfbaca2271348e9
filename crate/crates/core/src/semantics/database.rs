//! The database fragment: flat facts `Op(a₁, …, aₙ) = b` and memberships
//! `a ∈ C`, queried by lookup.

use serde::Serialize;
use thiserror::Error;

use crate::ast::{Assertion, Builtin, Formula, KnowledgeBase, Term};
use crate::hfset::TOP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fragment {
    Database,
    General,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FragmentViolation {
    #[error("knowledge base is outside the database fragment: {0}")]
    KnowledgeBase(String),
    #[error("query is not a flat fact or membership: {0}")]
    Query(String),
}

fn is_name(t: &Term) -> bool {
    matches!(t, Term::Atomic { .. })
}

/// Whether `a` is `Op(a₁, …, aₙ) = b` over named individuals, or
/// `∈(a, C) = ⊤` with `C` a declared concept.
pub fn is_fact(kb: &KnowledgeBase, a: &Assertion) -> bool {
    let Term::Apply { op, args } = &a.lhs else {
        return false;
    };
    if !is_name(&a.rhs) || !args.iter().all(is_name) {
        return false;
    }
    match Builtin::from_name(op) {
        None => args.iter().all(|t| !matches!(t, Term::Atomic { name } if kb.structure.is_concept(name))),
        Some(Builtin::Member) => {
            let concept = matches!(&args[1], Term::Atomic { name } if kb.structure.is_concept(name));
            let element = matches!(&args[0], Term::Atomic { name } if !kb.structure.is_concept(name));
            concept && element && matches!(&a.rhs, Term::Atomic { name } if name == TOP)
        }
        Some(_) => false,
    }
}

fn first_violation(kb: &KnowledgeBase) -> Option<String> {
    if let Some(d) = kb.definitions.first() {
        return Some(format!("definition of {}", d.target()));
    }
    if !kb.schema_assertions.is_empty() {
        return Some("schema assertion".to_string());
    }
    kb.assertions.iter().enumerate().find_map(|(i, f)| match f {
        Formula::Prim(a) if is_fact(kb, a) => None,
        _ => Some(format!("assertion {}", i + 1)),
    })
}

/// Database iff the KB holds only facts: no definitions, no schema
/// assertions, and every assertion flat or a membership.
pub fn classify_fragment(kb: &KnowledgeBase) -> Fragment {
    match first_violation(kb) {
        None => Fragment::Database,
        Some(_) => Fragment::General,
    }
}

/// Closed-world answer: true iff the query is one of the asserted facts.
/// One pass over the knowledge base, no interpretation search.
pub fn query_database(kb: &KnowledgeBase, q: &Assertion) -> Result<bool, FragmentViolation> {
    if let Some(what) = first_violation(kb) {
        return Err(FragmentViolation::KnowledgeBase(what));
    }
    if !is_fact(kb, q) {
        return Err(FragmentViolation::Query(format!("{} = {}", crate::printer::term(&q.lhs), crate::printer::term(&q.rhs))));
    }
    Ok(kb.assertions.iter().any(|f| matches!(f, Formula::Prim(a) if a == q)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn app(op: &str, args: &[&str]) -> Term {
        Term::apply(op, args.iter().map(|a| Term::atomic(*a)).collect())
    }

    fn fixture() -> KnowledgeBase {
        let mut kb = KnowledgeBase::default();
        kb.structure.add_concept("Human");
        kb.structure.add_individual("alice");
        kb.assertions.push(Formula::prim(app("Sex", &["alice"]), Term::atomic("female")));
        kb.assertions.push(Formula::prim(
            Term::builtin(Builtin::Member, vec![Term::atomic("alice"), Term::atomic("Human")]),
            Term::top(),
        ));
        kb
    }

    #[test]
    fn classification() {
        assert_eq!(classify_fragment(&fixture()), Fragment::Database);
        assert_eq!(classify_fragment(&KnowledgeBase::default()), Fragment::Database);
        let mut nested = KnowledgeBase::default();
        nested.assertions.push(Formula::prim(
            Term::apply("Op", vec![Term::atomic("a"), app("Op", &["b", "c"])]),
            Term::atomic("d"),
        ));
        assert_eq!(classify_fragment(&nested), Fragment::General);
    }

    #[test]
    fn lookup_queries() {
        let kb = fixture();
        let q = |l, r: &str| Assertion::new(l, Term::atomic(r));
        assert!(query_database(&kb, &q(app("Sex", &["alice"]), "female")).unwrap());
        assert!(!query_database(&kb, &q(app("Sex", &["alice"]), "male")).unwrap());
        let bob = Term::builtin(Builtin::Member, vec![Term::atomic("bob"), Term::atomic("Human")]);
        assert!(!query_database(&kb, &Assertion::new(bob, Term::top())).unwrap());
    }

    #[test]
    fn violations() {
        let kb = fixture();
        let nested = Assertion::new(app("Sex", &["alice"]), app("Sex", &["bob"]));
        assert!(matches!(query_database(&kb, &nested), Err(FragmentViolation::Query(_))));
        let mut general = fixture();
        general.assertions.push(Formula::not(Formula::prim(Term::atomic("a"), Term::atomic("b"))));
        assert!(matches!(
            query_database(&general, &Assertion::new(app("Sex", &["alice"]), Term::atomic("x"))),
            Err(FragmentViolation::KnowledgeBase(_))
        ));
    }
}
