//! Lowering of logic operators, quantifiers, nested terms and
//! multi-assertions into primitive `a = b` assertions.
//!
//! Connectives are encoded with singleton sets: `a = a'` holds exactly when
//! `{a} ∩ {a'}` is non-empty. Every encoding produces a single (possibly
//! nested) assertion; [`flatten_nested`] then removes the nesting with fresh
//! individuals.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ast::{Assertion, Builtin, Formula, KnowledgeBase, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesugarError {
    #[error("quantifier over {bound} mentions foreign concept {foreign}")]
    BodyMentionsForeignConcept { bound: String, foreign: String },
    #[error("not a quantified formula")]
    NotAQuantifier,
}

/// Source of fresh individual names `_v1`, `_v2`, … that avoid a given set.
#[derive(Debug, Clone)]
pub struct FreshNamer {
    prefix: String,
    counter: usize,
    taken: BTreeSet<String>,
}

impl FreshNamer {
    pub fn new(taken: BTreeSet<String>) -> Self {
        FreshNamer {
            prefix: "_v".to_string(),
            counter: 0,
            taken,
        }
    }

    /// Namer avoiding every name mentioned by `kb`.
    pub fn for_kb(kb: &KnowledgeBase) -> Self {
        FreshNamer::new(kb_names(kb))
    }

    pub fn fresh(&mut self) -> String {
        loop {
            self.counter += 1;
            let name = format!("{}{}", self.prefix, self.counter);
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

pub fn kb_names(kb: &KnowledgeBase) -> BTreeSet<String> {
    let s = &kb.structure;
    let mut names: BTreeSet<String> = s
        .individuals
        .iter()
        .chain(&s.concepts)
        .chain(s.operators.keys())
        .cloned()
        .collect();
    for d in &kb.definitions {
        names.insert(d.target().to_string());
        names.extend(d.mentions());
    }
    for f in &kb.assertions {
        f.names(&mut names);
    }
    for a in &kb.schema_assertions {
        a.names(&mut names);
    }
    names
}

fn single(t: Term) -> Term {
    Term::set(vec![t])
}

fn meet(a: Term, b: Term) -> Term {
    Term::builtin(Builtin::Intersect, vec![a, b])
}

fn join(a: Term, b: Term) -> Term {
    Term::builtin(Builtin::Union, vec![a, b])
}

/// `{a} ∩ {a'}`: non-empty iff the assertion `a = a'` holds.
fn witness(a: &Assertion) -> Term {
    meet(single(a.lhs.clone()), single(a.rhs.clone()))
}

/// `x ≠ y`, i.e. `{x} ∩ {y} = ∅`.
pub fn not_equal(x: Term, y: Term) -> Assertion {
    Assertion::new(meet(single(x), single(y)), Term::empty())
}

pub fn negation(a: &Assertion) -> Assertion {
    Assertion::new(witness(a), Term::empty())
}

pub fn conjunction(a: &Assertion, b: &Assertion) -> Assertion {
    Assertion::new(
        join(witness(a), witness(b)),
        Term::set(vec![a.lhs.clone(), a.rhs.clone(), b.lhs.clone(), b.rhs.clone()]),
    )
}

pub fn disjunction(a: &Assertion, b: &Assertion) -> Assertion {
    not_equal(join(witness(a), witness(b)), Term::empty())
}

/// `(({a, a'} ∖ ({a} ∩ {a'})) ∪ ({b} ∩ {b'})) ≠ ∅`. The difference is taken
/// against the whole witness of the antecedent.
pub fn implication(a: &Assertion, b: &Assertion) -> Assertion {
    let both = Term::set(vec![a.lhs.clone(), a.rhs.clone()]);
    let antecedent_fails = Term::builtin(Builtin::Difference, vec![both, witness(a)]);
    not_equal(join(antecedent_fails, witness(b)), Term::empty())
}

pub fn equivalence(a: &Assertion, b: &Assertion) -> Assertion {
    conjunction(&implication(a, b), &implication(b, a))
}

/// `C | A(C) = C`.
pub fn universal(concept: &str, filter: Assertion) -> Assertion {
    Assertion::new(Term::comprehension(concept, 1, filter), Term::atomic(concept))
}

/// `C | A(C) ≠ ∅`.
pub fn existential(concept: &str, filter: Assertion) -> Assertion {
    not_equal(Term::comprehension(concept, 1, filter), Term::empty())
}

/// Lowers connectives bottom-up and quantifiers innermost-first into one
/// (possibly nested) assertion with the same models.
pub fn lower_formula(f: &Formula) -> Assertion {
    match f {
        Formula::Prim(a) => a.clone(),
        Formula::Multi(parts) => {
            let lowered: Vec<Assertion> = parts.iter().map(lower_formula).collect();
            desugar_multi(&lowered)
        }
        Formula::Not(x) => negation(&lower_formula(x)),
        Formula::And(a, b) => conjunction(&lower_formula(a), &lower_formula(b)),
        Formula::Or(a, b) => disjunction(&lower_formula(a), &lower_formula(b)),
        Formula::Implies(a, b) => implication(&lower_formula(a), &lower_formula(b)),
        Formula::Equiv(a, b) => equivalence(&lower_formula(a), &lower_formula(b)),
        Formula::Forall(c, body) => universal(c, lower_formula(body)),
        Formula::Exists(c, body) => existential(c, lower_formula(body)),
    }
}

/// Encodes a quantifier-free formula. Quantifiers, if present, are lowered as
/// in [`lower_formula`].
pub fn desugar_logic(f: &Formula) -> Assertion {
    lower_formula(f)
}

/// Encodes `∀(C, A)` or `∃(C, A)`, rejecting bodies whose placeholders range
/// over other concepts.
pub fn desugar_quantifier(q: &Formula) -> Result<Assertion, DesugarError> {
    let (concept, body) = match q {
        Formula::Forall(c, b) | Formula::Exists(c, b) => (c, b),
        _ => return Err(DesugarError::NotAQuantifier),
    };
    let filter = lower_formula(body);
    if let Some(v) = filter.free_vars().into_iter().find(|v| v.concept != *concept) {
        return Err(DesugarError::BodyMentionsForeignConcept {
            bound: concept.clone(),
            foreign: v.concept,
        });
    }
    Ok(match q {
        Formula::Forall(..) => universal(concept, filter),
        _ => existential(concept, filter),
    })
}

/// `Mₙ(a₁=b₁, …, aₙ=bₙ)` as `(a₁, …, aₙ) = (b₁, …, bₙ)`. A single assertion is
/// returned unchanged; an empty list yields the tautology `∅ = ∅`.
pub fn desugar_multi(asserts: &[Assertion]) -> Assertion {
    match asserts {
        [] => Assertion::new(Term::empty(), Term::empty()),
        [one] => one.clone(),
        many => Assertion::new(
            Term::tuple(many.iter().map(|a| a.lhs.clone()).collect()),
            Term::tuple(many.iter().map(|a| a.rhs.clone()).collect()),
        ),
    }
}

/// Replaces every compound argument with a fresh individual defined by an
/// extra assertion. The first output is the rewritten assertion; definitions
/// of fresh individuals follow outermost first.
pub fn flatten_nested(a: &Assertion, namer: &mut FreshNamer) -> Vec<Assertion> {
    let mut extra = Vec::new();
    let lhs = shallow(&a.lhs, &mut extra, namer);
    let rhs = shallow(&a.rhs, &mut extra, namer);
    let mut out = Vec::with_capacity(extra.len() + 1);
    out.push(Assertion::new(lhs, rhs));
    out.extend(extra);
    out
}

fn shallow(t: &Term, extra: &mut Vec<Assertion>, namer: &mut FreshNamer) -> Term {
    let mut lift = |items: &[Term], extra: &mut Vec<Assertion>| -> Vec<Term> {
        items
            .iter()
            .map(|x| {
                if x.is_atomic() {
                    x.clone()
                } else {
                    extract(x, extra, namer)
                }
            })
            .collect()
    };
    match t {
        Term::Apply { op, args } => Term::apply(op.clone(), lift(args, extra)),
        Term::Set { items } => Term::set(lift(items, extra)),
        Term::Tuple { items } => Term::Tuple {
            items: lift(items, extra),
        },
        _ => t.clone(),
    }
}

fn extract(t: &Term, extra: &mut Vec<Assertion>, namer: &mut FreshNamer) -> Term {
    let name = namer.fresh();
    let slot = extra.len();
    extra.push(Assertion::new(Term::empty(), Term::empty()));
    let inner = shallow(t, extra, namer);
    extra[slot] = Assertion::new(Term::atomic(name.clone()), inner);
    Term::atomic(name)
}

/// Result of the full lowering pipeline for one formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lowered {
    /// Primitive assertions whose conjunction is equivalent to the formula.
    pub primitive: Vec<Assertion>,
    /// The same conjunction as one multi-assertion.
    pub combined: Assertion,
    /// Individuals introduced by flattening.
    pub fresh: Vec<String>,
}

/// Quantifiers, then connectives, then flattening, then `Mₙ`.
pub fn lower(f: &Formula, namer: &mut FreshNamer) -> Lowered {
    let nested = lower_formula(f);
    let primitive = flatten_nested(&nested, namer);
    let fresh = primitive[1..]
        .iter()
        .filter_map(|a| match &a.lhs {
            Term::Atomic { name } => Some(name.clone()),
            _ => None,
        })
        .collect();
    let combined = desugar_multi(&primitive);
    Lowered {
        primitive,
        combined,
        fresh,
    }
}

/// Rewrites every asserted statement into primitive assertions, declaring the
/// fresh individuals. Definitions and schema assertions are kept as is.
pub fn desugar_kb(kb: &KnowledgeBase) -> KnowledgeBase {
    let mut namer = FreshNamer::for_kb(kb);
    let mut out = KnowledgeBase {
        structure: kb.structure.clone(),
        definitions: kb.definitions.clone(),
        assertions: Vec::new(),
        schema_assertions: kb.schema_assertions.clone(),
        source_map: Default::default(),
    };
    for f in &kb.assertions {
        let lowered = lower(f, &mut namer);
        for name in lowered.fresh {
            out.structure.add_individual(name);
        }
        out.assertions
            .extend(lowered.primitive.into_iter().map(Formula::Prim));
    }
    out
}
