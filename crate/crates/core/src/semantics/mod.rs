//! Interpretations and model checking.
//!
//! An [`Interpretation`] maps individuals to values, concepts to sets and
//! operators to finite tables (or definition bodies). Terms evaluate to
//! [`Value`]s; an assertion holds when both sides evaluate to the same value.

mod database;
mod entail;

pub use database::{classify_fragment, is_fact, query_database, Fragment, FragmentViolation};
pub use entail::{
    check_entails, kb_constraints, InterpretationSpace, OpShape, SearchBound, SearchStats, Signature,
    Verdict,
};

use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ast::{
    Assertion, Builtin, ConceptCopy, Definition, KnowledgeBase, Term, EMPTY,
};
use crate::hfset::{self, Limits, SetError, Value, BOTTOM, TOP};

/// Operator table: argument tuple to result.
pub type OperatorTable = BTreeMap<Vec<Value>, Value>;

/// Operator given by a definition body over parameter placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorBody {
    pub params: Vec<ConceptCopy>,
    pub body: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound name {0}")]
    UnboundName(String),
    #[error("placeholder {}^{} has no extent to range over", .0.concept, .0.copy)]
    UnboundPlaceholder(ConceptCopy),
    #[error("operator {op} is not defined on ({})", fmt_args(.args))]
    PartialOperator { op: String, args: Vec<Value> },
    #[error("unknown operator {0}")]
    UnknownOperator(String),
    #[error("operator {op} takes {expected} argument(s), got {found}")]
    ArityMismatch {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("{op}: {message}")]
    Domain { op: String, message: String },
    #[error("operator definitions nest deeper than {0} calls")]
    RecursionLimit(usize),
    #[error(transparent)]
    Set(#[from] SetError),
}

fn fmt_args(args: &[Value]) -> String {
    args.iter().map(Value::to_string).collect::<Vec<_>>().join(", ")
}

const MAX_CALL_DEPTH: usize = 256;

pub(crate) fn serialize_tables<S: Serializer>(
    tables: &BTreeMap<String, OperatorTable>,
    s: S,
) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        args: &'a [Value],
        value: &'a Value,
    }
    struct Table<'a>(&'a OperatorTable);
    impl Serialize for Table<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(self.0.len()))?;
            for (args, value) in self.0 {
                seq.serialize_element(&Entry { args, value })?;
            }
            seq.end()
        }
    }
    let as_lists: BTreeMap<&String, Table<'_>> = tables.iter().map(|(k, t)| (k, Table(t))).collect();
    as_lists.serialize(s)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Interpretation {
    /// Δ as a set of values; informative for enumerated interpretations.
    pub universe: Vec<Value>,
    pub individual_map: BTreeMap<String, Value>,
    pub concept_map: BTreeMap<String, Value>,
    #[serde(serialize_with = "serialize_tables")]
    pub operator_map: BTreeMap<String, OperatorTable>,
    #[serde(skip)]
    pub operator_defs: BTreeMap<String, OperatorBody>,
    #[serde(skip)]
    pub limits: Limits,
}

impl Interpretation {
    pub fn new() -> Self {
        Interpretation::default()
    }

    pub fn with_individual(mut self, name: impl Into<String>, v: Value) -> Self {
        self.individual_map.insert(name.into(), v);
        self
    }

    pub fn with_concept(mut self, name: impl Into<String>, extent: Value) -> Self {
        debug_assert!(extent.is_set());
        self.concept_map.insert(name.into(), extent);
        self
    }

    pub fn with_entry(mut self, op: impl Into<String>, args: Vec<Value>, v: Value) -> Self {
        self.operator_map.entry(op.into()).or_default().insert(args, v);
        self
    }

    pub fn with_operator_body(mut self, op: impl Into<String>, body: OperatorBody) -> Self {
        self.operator_defs.insert(op.into(), body);
        self
    }

    /// Registers every operator definition of `defs`.
    pub fn with_operator_definitions<'a>(mut self, defs: impl IntoIterator<Item = &'a Definition>) -> Self {
        for d in defs {
            if let Definition::OperatorDef { target, params, body } = d {
                self.operator_defs.insert(
                    target.clone(),
                    OperatorBody {
                        params: params.clone(),
                        body: body.clone(),
                    },
                );
            }
        }
        self
    }

    /// Extent of a concept, also accepting individuals that denote sets.
    pub fn extent(&self, concept: &str) -> Option<&Value> {
        self.concept_map
            .get(concept)
            .or_else(|| self.individual_map.get(concept).filter(|v| v.is_set()))
    }
}

/// Variable bindings for schema placeholders, innermost last.
pub type Bindings = Vec<(ConceptCopy, Value)>;

fn lookup<'a>(env: &'a Bindings, cc: &ConceptCopy) -> Option<&'a Value> {
    env.iter().rev().find(|(k, _)| k == cc).map(|(_, v)| v)
}

pub fn eval_term(i: &Interpretation, t: &Term) -> Result<Value, EvalError> {
    Evaluator::new(i).eval(t, &mut Vec::new())
}

/// `I ⊨ a` for a ground assertion; free placeholders are read universally
/// over their concept extents.
pub fn models(i: &Interpretation, a: &Assertion) -> Result<bool, EvalError> {
    Evaluator::new(i).holds(a, &mut Vec::new())
}

/// Term evaluation with placeholder bindings.
pub struct Evaluator<'i> {
    interp: &'i Interpretation,
    calls: usize,
}

impl<'i> Evaluator<'i> {
    pub fn new(interp: &'i Interpretation) -> Self {
        Evaluator { interp, calls: 0 }
    }

    pub fn eval(&mut self, t: &Term, env: &mut Bindings) -> Result<Value, EvalError> {
        let limits = &self.interp.limits;
        match t {
            Term::Atomic { name } => self.lookup_name(name),
            Term::Literal { value } => Ok(value.clone()),
            Term::Concept { name, copy } => {
                let cc = ConceptCopy::new(name.clone(), *copy);
                lookup(env, &cc)
                    .cloned()
                    .ok_or(EvalError::UnboundPlaceholder(cc))
            }
            Term::Apply { op, args } => {
                let vals = args
                    .iter()
                    .map(|a| self.eval(a, env))
                    .collect::<Result<Vec<_>, _>>()?;
                self.apply(op, vals)
            }
            Term::Set { items } => {
                limits.check_size("set literal", items.len())?;
                let vals = items
                    .iter()
                    .map(|a| self.eval(a, env))
                    .collect::<Result<Vec<_>, _>>()?;
                let v = Value::set(vals);
                limits.check_depth(&v)?;
                Ok(v)
            }
            Term::Tuple { items } => {
                let vals = items
                    .iter()
                    .map(|a| self.eval(a, env))
                    .collect::<Result<Vec<_>, _>>()?;
                let v = Value::tuple(vals)?;
                limits.check_depth(&v)?;
                Ok(v)
            }
            Term::Comprehension { concept, copy, filter } => {
                let extent = self
                    .interp
                    .extent(concept)
                    .ok_or_else(|| EvalError::UnboundName(concept.clone()))?
                    .clone();
                let cc = ConceptCopy::new(concept.clone(), *copy);
                let mut kept = Vec::new();
                for x in extent.as_set().unwrap_or(&[]) {
                    env.push((cc.clone(), x.clone()));
                    let ok = self.holds(filter, env);
                    env.pop();
                    if ok? {
                        kept.push(x.clone());
                    }
                }
                Ok(Value::set(kept))
            }
        }
    }

    fn lookup_name(&self, name: &str) -> Result<Value, EvalError> {
        if let Some(v) = self.interp.individual_map.get(name) {
            return Ok(v.clone());
        }
        if let Some(v) = self.interp.concept_map.get(name) {
            return Ok(v.clone());
        }
        match name {
            EMPTY => Ok(Value::empty()),
            TOP => Ok(Value::top()),
            BOTTOM => Ok(Value::bottom()),
            _ => Err(EvalError::UnboundName(name.to_string())),
        }
    }

    /// Resolution order: table entry, definition body, built-in.
    pub fn apply(&mut self, op: &str, args: Vec<Value>) -> Result<Value, EvalError> {
        let table = self.interp.operator_map.get(op);
        if let Some(v) = table.and_then(|t| t.get(&args)) {
            return Ok(v.clone());
        }
        if let Some(def) = self.interp.operator_defs.get(op) {
            if def.params.len() != args.len() {
                return Err(EvalError::ArityMismatch {
                    op: op.to_string(),
                    expected: def.params.len(),
                    found: args.len(),
                });
            }
            if self.calls >= MAX_CALL_DEPTH {
                return Err(EvalError::RecursionLimit(MAX_CALL_DEPTH));
            }
            self.calls += 1;
            let mut env: Bindings = def.params.iter().cloned().zip(args).collect();
            let out = self.eval(&def.body, &mut env);
            self.calls -= 1;
            return out;
        }
        if let Some(b) = Builtin::from_name(op) {
            return apply_builtin(b, &args, &self.interp.limits);
        }
        if table.is_some() {
            Err(EvalError::PartialOperator {
                op: op.to_string(),
                args,
            })
        } else {
            Err(EvalError::UnknownOperator(op.to_string()))
        }
    }

    /// Whether `a` holds, grounding unbound placeholders universally.
    pub fn holds(&mut self, a: &Assertion, env: &mut Bindings) -> Result<bool, EvalError> {
        let free: Vec<ConceptCopy> = a
            .free_vars()
            .into_iter()
            .filter(|v| lookup(env, v).is_none())
            .collect();
        self.holds_grounding(a, &free, env)
    }

    fn holds_grounding(&mut self, a: &Assertion, free: &[ConceptCopy], env: &mut Bindings) -> Result<bool, EvalError> {
        let Some((first, rest)) = free.split_first() else {
            return Ok(self.eval(&a.lhs, env)? == self.eval(&a.rhs, env)?);
        };
        let extent = self
            .interp
            .extent(&first.concept)
            .ok_or_else(|| EvalError::UnboundPlaceholder(first.clone()))?
            .clone();
        for x in extent.as_set().unwrap_or(&[]) {
            env.push((first.clone(), x.clone()));
            let ok = self.holds_grounding(a, rest, env);
            env.pop();
            if !ok? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First grounding (as literal terms) under which `a` fails.
    pub fn failing_grounding(&mut self, a: &Assertion) -> Result<Option<Assertion>, EvalError> {
        let free = a.free_vars();
        let mut env = Vec::new();
        self.find_failing(a, &free, &mut env)
    }

    fn find_failing(&mut self, a: &Assertion, free: &[ConceptCopy], env: &mut Bindings) -> Result<Option<Assertion>, EvalError> {
        let Some((first, rest)) = free.split_first() else {
            if self.eval(&a.lhs, env)? == self.eval(&a.rhs, env)? {
                return Ok(None);
            }
            return Ok(Some(a.substitute(&|cc| lookup(env, cc).cloned().map(Term::literal))));
        };
        let extent = self
            .interp
            .extent(&first.concept)
            .ok_or_else(|| EvalError::UnboundPlaceholder(first.clone()))?
            .clone();
        for x in extent.as_set().unwrap_or(&[]) {
            env.push((first.clone(), x.clone()));
            let found = self.find_failing(a, rest, env);
            env.pop();
            if let Some(w) = found? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

pub fn apply_builtin(b: Builtin, args: &[Value], limits: &Limits) -> Result<Value, EvalError> {
    if args.len() != b.arity() {
        return Err(EvalError::ArityMismatch {
            op: b.name().to_string(),
            expected: b.arity(),
            found: args.len(),
        });
    }
    let v = match b {
        Builtin::Union => hfset::set_union(&args[0], &args[1])?,
        Builtin::Intersect => hfset::set_intersect(&args[0], &args[1])?,
        Builtin::Difference => hfset::set_difference(&args[0], &args[1])?,
        Builtin::Product => hfset::cartesian_product(&args[0], &args[1], limits)?,
        Builtin::PowerSet => hfset::power_set(&args[0], limits)?,
        Builtin::Cardinality => Value::ordinal(hfset::cardinality(&args[0])?),
        Builtin::Member => Value::boolean(hfset::member(&args[0], &args[1])?),
        Builtin::Subset => Value::boolean(hfset::subset(&args[0], &args[1])?),
        Builtin::Geq => {
            let ord = |v: &Value| {
                v.as_ordinal().ok_or_else(|| EvalError::Domain {
                    op: b.name().to_string(),
                    message: format!("{v} is not a natural number"),
                })
            };
            Value::boolean(ord(&args[0])? >= ord(&args[1])?)
        }
    };
    limits.check_depth(&v)?;
    Ok(v)
}

/// Outcome of checking an interpretation against a whole knowledge base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KbCheck {
    Model,
    /// The first violated assertion, grounded with literal values where it
    /// came from a schema.
    Violated(Assertion),
}

impl KbCheck {
    pub fn is_model(&self) -> bool {
        matches!(self, KbCheck::Model)
    }
}

/// `I ⊨ KB`: every assertion, every grounding of every schema assertion and
/// every individual definition (read as `a = t`) holds. Concept and operator
/// definitions are taken as part of the interpretation's construction.
pub fn models_kb(i: &Interpretation, kb: &KnowledgeBase) -> Result<KbCheck, EvalError> {
    let mut ev = Evaluator::new(i);
    for d in &kb.definitions {
        if let Definition::IndividualDef { target, body } = d {
            let a = Assertion::new(Term::atomic(target.clone()), body.clone());
            if let Some(w) = ev.failing_grounding(&a)? {
                return Ok(KbCheck::Violated(w));
            }
        }
    }
    for f in &kb.assertions {
        let a = crate::desugar::lower_formula(f);
        if let Some(w) = ev.failing_grounding(&a)? {
            return Ok(KbCheck::Violated(w));
        }
    }
    for sa in &kb.schema_assertions {
        if let Some(w) = ev.failing_grounding(sa)? {
            return Ok(KbCheck::Violated(w));
        }
    }
    Ok(KbCheck::Model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ConceptCopy;

    fn at(n: &str) -> Value {
        Value::atom(n)
    }

    fn arithmetic() -> Interpretation {
        Interpretation::new()
            .with_individual("0", Value::empty())
            .with_individual("1", Value::set([Value::empty(), Value::set([Value::empty()])]))
            .with_operator_body(
                "Succ",
                OperatorBody {
                    params: vec![ConceptCopy::new("N", 1)],
                    body: Term::set(vec![Term::var("N", 1), Term::set(vec![Term::var("N", 1)])]),
                },
            )
    }

    #[test]
    fn succ_of_zero() {
        let i = arithmetic();
        let v = eval_term(&i, &Term::apply("Succ", vec![Term::atomic("0")])).unwrap();
        assert_eq!(v, Value::set([Value::empty(), Value::set([Value::empty()])]));
    }

    #[test]
    fn zero_is_not_succ_of_one() {
        let i = arithmetic();
        let a = Assertion::new(Term::atomic("0"), Term::apply("Succ", vec![Term::atomic("1")]));
        assert!(!models(&i, &a).unwrap());
    }

    #[test]
    fn atomic_lookup_and_reflexivity() {
        let i = Interpretation::new().with_individual("a", at("e1"));
        assert_eq!(eval_term(&i, &Term::atomic("a")).unwrap(), at("e1"));
        assert!(models(&i, &Assertion::new(Term::atomic("a"), Term::atomic("a"))).unwrap());
    }

    #[test]
    fn union_of_concept_valued_terms() {
        let i = Interpretation::new()
            .with_concept("C1", Value::set([at("x")]))
            .with_concept("C2", Value::set([at("y")]));
        let t = Term::builtin(Builtin::Union, vec![Term::atomic("C1"), Term::atomic("C2")]);
        assert_eq!(eval_term(&i, &t).unwrap(), Value::set([at("x"), at("y")]));
    }

    #[test]
    fn membership_assertion() {
        let i = Interpretation::new()
            .with_individual("a", at("e1"))
            .with_individual("b", at("e2"))
            .with_concept("C", Value::set([at("e1")]));
        for (who, expect) in [("a", true), ("b", false)] {
            let a = Assertion::new(
                Term::builtin(Builtin::Member, vec![Term::atomic(who), Term::atomic("C")]),
                Term::top(),
            );
            assert_eq!(models(&i, &a).unwrap(), expect);
        }
    }

    #[test]
    fn partial_and_unknown_operators() {
        let i = Interpretation::new()
            .with_individual("a", at("e1"))
            .with_entry("f", vec![at("e2")], at("e2"));
        let err = eval_term(&i, &Term::apply("f", vec![Term::atomic("a")])).unwrap_err();
        assert!(matches!(err, EvalError::PartialOperator { .. }));
        let err = eval_term(&i, &Term::apply("g", vec![Term::atomic("a")])).unwrap_err();
        assert_eq!(err, EvalError::UnknownOperator("g".into()));
        let err = eval_term(&i, &Term::atomic("zz")).unwrap_err();
        assert_eq!(err, EvalError::UnboundName("zz".into()));
    }

    #[test]
    fn builtins_cannot_be_shadowed_by_missing_tables() {
        let i = Interpretation::new();
        let t = Term::builtin(Builtin::Cardinality, vec![Term::set(vec![Term::empty()])]);
        assert_eq!(eval_term(&i, &t).unwrap(), Value::ordinal(1));
        let g = Term::builtin(Builtin::Geq, vec![Term::literal(Value::ordinal(3)), Term::literal(Value::ordinal(2))]);
        assert_eq!(eval_term(&i, &g).unwrap(), Value::top());
    }

    #[test]
    fn schema_assertion_holds_universally() {
        let i = Interpretation::new().with_concept("C", Value::set([at("p"), at("q")]));
        let diag = Assertion::new(Term::var("C", 1), Term::var("C", 1));
        assert!(models(&i, &diag).unwrap());
        let all_eq = Assertion::new(Term::var("C", 1), Term::var("C", 2));
        assert!(!models(&i, &all_eq).unwrap());
        let w = Evaluator::new(&i).failing_grounding(&all_eq).unwrap().unwrap();
        assert_eq!(w, Assertion::new(Term::literal(at("p")), Term::literal(at("q"))));
    }

    #[test]
    fn comprehension_filters_elementwise() {
        let i = Interpretation::new()
            .with_concept("C", Value::set([at("p"), at("q")]))
            .with_entry("P", vec![at("p")], Value::top())
            .with_entry("P", vec![at("q")], Value::bottom());
        let t = Term::comprehension(
            "C",
            1,
            Assertion::new(Term::apply("P", vec![Term::var("C", 1)]), Term::top()),
        );
        assert_eq!(eval_term(&i, &t).unwrap(), Value::set([at("p")]));
    }

    #[test]
    fn empty_kb_is_modelled() {
        let kb = KnowledgeBase::default();
        assert!(models_kb(&Interpretation::new(), &kb).unwrap().is_model());
    }

    #[test]
    fn kb_violation_witness() {
        let i = Interpretation::new()
            .with_individual("0", at("e0"))
            .with_individual("1", at("e1"));
        let mut kb = KnowledgeBase::default();
        for (l, r) in [("0", "0"), ("1", "1")] {
            kb.assertions.push(crate::ast::Formula::prim(Term::atomic(l), Term::atomic(r)));
        }
        assert!(models_kb(&i, &kb).unwrap().is_model());
        let bad = Assertion::new(Term::atomic("0"), Term::atomic("1"));
        kb.assertions.push(crate::ast::Formula::Prim(bad.clone()));
        assert_eq!(models_kb(&i, &kb).unwrap(), KbCheck::Violated(bad));
    }
}
