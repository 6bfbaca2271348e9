//! Definition checking and evaluation.
//!
//! Non-replacement definitions must not depend on themselves, directly or
//! through other definitions. Replacement definitions may; they are applied
//! in rounds, each round unioning new images into the target.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::ast::{Assertion, Builtin, ConceptCopy, ConceptExpr, Definition, Formula, KnowledgeBase, SchemaAssertion, Term};
use crate::diagnostics::{Diagnostic, SourceSpan};
use crate::hfset::{self, Limits, SetError, Value};
use crate::semantics::{serialize_tables, EvalError, Evaluator, Interpretation, OperatorTable};

pub const DEFAULT_MAX_ROUNDS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DefError {
    #[error("duplicate definition of {0}")]
    DuplicateDefinition(String),
    #[error("recursive definition: {}", .0.join(" → "))]
    Cycle(Vec<String>),
    #[error(transparent)]
    SizeLimitExceeded(SetError),
    #[error("operator {op} is not defined on ({})", args.iter().map(Value::to_string).collect::<Vec<_>>().join(", "))]
    UndefinedOperatorApplication { op: String, args: Vec<Value> },
    #[error("while evaluating {target}: {source}")]
    Eval { target: String, source: EvalError },
    #[error("filter fails on element {element}: {source}")]
    Comprehension { element: Value, source: EvalError },
}

impl DefError {
    fn from_eval(target: &str, e: EvalError) -> DefError {
        match e {
            EvalError::Set(s @ SetError::SizeLimitExceeded { .. }) => DefError::SizeLimitExceeded(s),
            EvalError::PartialOperator { op, args } => DefError::UndefinedOperatorApplication { op, args },
            source => DefError::Eval {
                target: target.to_string(),
                source,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    /// Edges of replacement definitions are kept for reporting but ignored
    /// by the acyclicity check.
    pub replacement: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DependencyGraph {
    pub vertices: BTreeSet<String>,
    pub edges: BTreeSet<Edge>,
    /// Definition targets in declaration order.
    pub targets: Vec<String>,
}

impl DependencyGraph {
    pub fn successors<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges
            .iter()
            .filter(move |e| e.from == v && !e.replacement)
            .map(|e| e.to.as_str())
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.edges.iter().any(|e| e.from == from && e.to == to)
    }
}

pub fn build_dependency_graph(defs: &[Definition]) -> Result<DependencyGraph, DefError> {
    let mut g = DependencyGraph::default();
    for d in defs {
        let target = d.target().to_string();
        if g.targets.contains(&target) {
            return Err(DefError::DuplicateDefinition(target));
        }
        g.targets.push(target.clone());
        g.vertices.insert(target.clone());
        for m in d.mentions() {
            g.vertices.insert(m.clone());
            g.edges.insert(Edge {
                from: target.clone(),
                to: m,
                replacement: d.is_replacement(),
            });
        }
    }
    Ok(g)
}

/// A dependency cycle among non-replacement definitions, first vertex
/// repeated at the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleWitness(pub Vec<String>);

impl CycleWitness {
    pub fn to_diagnostic(&self, span: SourceSpan) -> Diagnostic {
        Diagnostic::error(
            format!("recursive definition outside replacement: {}", self.0.join(" → ")),
            span,
        )
    }
}

/// Depth-first search from each target in declaration order; the first back
/// edge found gives the witness.
pub fn check_nonrecursive(g: &DependencyGraph) -> Result<(), CycleWitness> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit<'a>(
        g: &'a DependencyGraph,
        v: &'a str,
        marks: &mut BTreeMap<&'a str, Mark>,
        path: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        match marks.get(v) {
            Some(Mark::Done) => return None,
            Some(Mark::Open) => {
                let start = path.iter().position(|p| *p == v).unwrap_or(0);
                let mut cycle: Vec<String> = path[start..].iter().map(|s| s.to_string()).collect();
                cycle.push(v.to_string());
                return Some(cycle);
            }
            None => {}
        }
        marks.insert(v, Mark::Open);
        path.push(v);
        for w in g.successors(v) {
            if let Some(c) = visit(g, w, marks, path) {
                return Some(c);
            }
        }
        path.pop();
        marks.insert(v, Mark::Done);
        None
    }
    let mut marks = BTreeMap::new();
    for t in &g.targets {
        if let Some(c) = visit(g, t, &mut marks, &mut Vec::new()) {
            return Err(CycleWitness(c));
        }
    }
    Ok(())
}

/// Targets of non-replacement definitions, dependencies first, ties broken
/// by declaration order.
pub fn evaluation_order(g: &DependencyGraph, defs: &[Definition]) -> Vec<usize> {
    let plain: Vec<usize> = (0..defs.len()).filter(|&i| !defs[i].is_replacement()).collect();
    let index: BTreeMap<&str, usize> = defs.iter().enumerate().map(|(i, d)| (d.target(), i)).collect();
    let mut pending: BTreeMap<usize, BTreeSet<usize>> = plain
        .iter()
        .map(|&i| {
            let deps = g
                .successors(defs[i].target())
                .filter_map(|m| index.get(m).copied())
                .filter(|&j| j != i && !defs[j].is_replacement())
                .collect();
            (i, deps)
        })
        .collect();
    let mut order = Vec::with_capacity(plain.len());
    while !pending.is_empty() {
        let ready = pending
            .iter()
            .find(|(_, deps)| deps.is_empty())
            .map(|(&i, _)| i)
            // a cycle: fall back to declaration order for the rest
            .unwrap_or_else(|| *pending.keys().next().unwrap());
        pending.remove(&ready);
        for deps in pending.values_mut() {
            deps.remove(&ready);
        }
        order.push(ready);
    }
    order
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EvaluationResult {
    pub individual_values: BTreeMap<String, Value>,
    pub concept_extents: BTreeMap<String, Value>,
    #[serde(serialize_with = "serialize_tables")]
    pub operator_tables: BTreeMap<String, OperatorTable>,
    pub rounds_executed: usize,
    pub fixpoint_reached: bool,
}

impl EvaluationResult {
    pub fn extent(&self, concept: &str) -> Option<&Value> {
        self.concept_extents.get(concept)
    }

    pub fn interpretation(&self) -> Interpretation {
        Interpretation {
            individual_map: self.individual_values.clone(),
            concept_map: self.concept_extents.clone(),
            operator_map: self.operator_tables.clone(),
            ..Interpretation::default()
        }
    }
}

/// Seed for evaluating a knowledge base on its own: each declared but
/// undefined individual denotes the atom of the same name, and undefined
/// concepts and operators take their extents and tables from the flat facts
/// `a ∈ C` and `Op(a₁, …) = b` among the assertions (closed world).
pub fn seed_from_kb(kb: &KnowledgeBase) -> EvaluationResult {
    let defined: BTreeSet<&str> = kb.definitions.iter().map(Definition::target).collect();
    let mut seed = EvaluationResult::default();
    for name in &kb.structure.individuals {
        if !defined.contains(name.as_str()) {
            seed.individual_values.insert(name.clone(), Value::atom(name));
        }
    }
    for name in &kb.structure.concepts {
        if !defined.contains(name.as_str()) {
            seed.concept_extents.insert(name.clone(), Value::empty());
        }
    }
    let value_of = |t: &Term, seed: &EvaluationResult| match t {
        Term::Atomic { name } => seed
            .individual_values
            .get(name)
            .cloned()
            .or_else(|| (!defined.contains(name.as_str())).then(|| Value::atom(name))),
        Term::Literal { value } => Some(value.clone()),
        _ => None,
    };
    for f in &kb.assertions {
        let Formula::Prim(a) = f else { continue };
        let Term::Apply { op, args } = &a.lhs else { continue };
        if defined.contains(op.as_str()) {
            continue;
        }
        if op == Builtin::Member.name() {
            let (Some(x), Term::Atomic { name: c }) = (value_of(&args[0], &seed), &args[1]) else {
                continue;
            };
            if !defined.contains(c.as_str()) && kb.structure.is_concept(c) && matches!(&a.rhs, Term::Atomic { name } if name == crate::hfset::TOP) {
                let ext = seed.concept_extents.entry(c.clone()).or_insert_with(Value::empty);
                *ext = hfset::set_union(ext, &Value::singleton(x)).expect("extents are sets");
            }
            continue;
        }
        if Builtin::from_name(op).is_some() {
            continue;
        }
        let vals: Option<Vec<Value>> = args.iter().map(|t| value_of(t, &seed)).collect();
        if let (Some(vals), Some(v)) = (vals, value_of(&a.rhs, &seed)) {
            seed.operator_tables.entry(op.clone()).or_default().insert(vals, v);
        }
    }
    seed
}

/// Filters `source_extent` by `filter`, whose placeholders all range over
/// one concept: copy 1 is the candidate, other copies range over the whole
/// source extent.
pub fn evaluate_comprehension(source_extent: &Value, filter: &SchemaAssertion, ctx: &EvaluationResult) -> Result<Value, DefError> {
    let source = filter
        .free_vars()
        .first()
        .map(|v| v.concept.clone())
        .unwrap_or_default();
    let mut interp = ctx.interpretation();
    interp.concept_map.insert(source.clone(), source_extent.clone());
    comprehension_in(&interp, &source, source_extent, filter)
}


fn comprehension_in(interp: &Interpretation, source: &str, extent: &Value, filter: &Assertion) -> Result<Value, DefError> {
    let elems = extent.as_set().ok_or_else(|| DefError::Eval {
        target: source.to_string(),
        source: EvalError::Set(SetError::NonSetOperand {
            op: "comprehension",
            found: extent.to_string(),
        }),
    })?;
    let mut ev = Evaluator::new(interp);
    let cc = ConceptCopy::new(source, 1);
    let mut kept = Vec::new();
    for x in elems {
        let mut env = vec![(cc.clone(), x.clone())];
        match ev.holds(filter, &mut env) {
            Ok(true) => kept.push(x.clone()),
            Ok(false) => {}
            Err(source) => {
                return Err(DefError::Comprehension {
                    element: x.clone(),
                    source,
                })
            }
        }
    }
    Ok(Value::set(kept))
}

/// Runs the definitions from `seed` for at most `max_rounds` rounds.
///
/// Before the first round every definition is evaluated once, replacement
/// images taken over empty or seeded sources. Each round then recomputes the
/// non-replacement definitions in dependency order and applies every
/// replacement definition once to the extents as they stood at the start of
/// the round. Evaluation stops early when a round changes nothing.
pub fn evaluate(defs: &[Definition], seed: &EvaluationResult, max_rounds: usize) -> Result<EvaluationResult, DefError> {
    evaluate_with_limits(defs, seed, max_rounds, &Limits::from_env())
}

pub fn evaluate_with_limits(
    defs: &[Definition],
    seed: &EvaluationResult,
    max_rounds: usize,
    limits: &Limits,
) -> Result<EvaluationResult, DefError> {
    let g = build_dependency_graph(defs)?;
    check_nonrecursive(&g).map_err(|c| DefError::Cycle(c.0))?;
    let order = evaluation_order(&g, defs);
    let mut interp = seed.interpretation().with_operator_definitions(defs);
    interp.limits = limits.clone();
    for d in defs {
        if d.defines_concept() {
            interp
                .concept_map
                .entry(d.target().to_string())
                .or_insert_with(Value::empty);
        }
    }

    let replacements: Vec<&Definition> = defs.iter().filter(|d| d.is_replacement()).collect();
    let round = |interp: &mut Interpretation| -> Result<(), DefError> {
        for &i in &order {
            apply_plain(&defs[i], interp)?;
        }
        let before = interp.clone();
        for d in &replacements {
            let image = replacement_image(d, &before)?;
            let target = d.target().to_string();
            let old = interp.concept_map.get(&target).cloned().unwrap_or_else(Value::empty);
            let grown = hfset::set_union(&old, &image).map_err(|e| DefError::from_eval(&target, e.into()))?;
            let size = grown.as_set().map_or(0, <[Value]>::len);
            limits
                .check_size("concept extent", size)
                .map_err(DefError::SizeLimitExceeded)?;
            interp.concept_map.insert(target, grown);
        }
        Ok(())
    };

    round(&mut interp)?;
    let mut rounds = 0;
    let mut fixpoint = false;
    while rounds < max_rounds {
        let before = (interp.individual_map.clone(), interp.concept_map.clone());
        round(&mut interp)?;
        rounds += 1;
        if before == (interp.individual_map.clone(), interp.concept_map.clone()) {
            fixpoint = true;
            break;
        }
    }

    let mut tables = seed.operator_tables.clone();
    for d in defs {
        if let Definition::OperatorDef { target, params, .. } = d {
            if let Some(t) = materialize(target, params, &interp, limits) {
                tables.insert(target.clone(), t);
            }
        }
    }
    Ok(EvaluationResult {
        individual_values: interp.individual_map,
        concept_extents: interp.concept_map,
        operator_tables: tables,
        rounds_executed: rounds,
        fixpoint_reached: fixpoint,
    })
}

fn apply_plain(d: &Definition, interp: &mut Interpretation) -> Result<(), DefError> {
    let target = d.target();
    let err = |e: EvalError| DefError::from_eval(target, e);
    match d {
        Definition::IndividualDef { body, .. } => {
            let v = Evaluator::new(interp).eval(body, &mut Vec::new()).map_err(err)?;
            interp.individual_map.insert(target.to_string(), v);
        }
        Definition::OperatorDef { .. } => {}
        Definition::ConceptEnum { members, .. } => {
            let mut ev = Evaluator::new(interp);
            let vals = members
                .iter()
                .map(|t| ev.eval(t, &mut Vec::new()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?;
            interp.concept_map.insert(target.to_string(), Value::set(vals));
        }
        Definition::ConceptOp { expr, .. } => {
            let v = eval_concept_expr(expr, interp).map_err(|e| match e {
                DefError::Eval { source, .. } => err(source),
                other => other,
            })?;
            interp.concept_map.insert(target.to_string(), v);
        }
        Definition::ConceptComprehension { source, filter, .. } => {
            let extent = interp
                .extent(source)
                .cloned()
                .ok_or_else(|| err(EvalError::UnboundName(source.clone())))?;
            let v = comprehension_in(interp, source, &extent, filter)?;
            interp.concept_map.insert(target.to_string(), v);
        }
        Definition::ConceptReplacement { .. } => {}
    }
    Ok(())
}

fn replacement_image(d: &Definition, interp: &Interpretation) -> Result<Value, DefError> {
    match d {
        Definition::ConceptReplacement { operator, source, .. } => {
            eval_concept_expr(&ConceptExpr::image(operator.clone(), source.clone()), interp)
        }
        Definition::ConceptOp { expr, .. } => eval_concept_expr(expr, interp),
        _ => Ok(Value::empty()),
    }
}

/// Evaluates a concept expression; `O(S)` is the image of `S` under `O`.
pub fn eval_concept_expr(e: &ConceptExpr, interp: &Interpretation) -> Result<Value, DefError> {
    let set = |r: Result<Value, SetError>| r.map_err(|s| DefError::from_eval("concept expression", s.into()));
    let limits = &interp.limits;
    match e {
        ConceptExpr::Concept(c) => interp
            .extent(c)
            .cloned()
            .ok_or_else(|| DefError::from_eval(c, EvalError::UnboundName(c.clone()))),
        ConceptExpr::Enum(items) => {
            let mut ev = Evaluator::new(interp);
            let vals = items
                .iter()
                .map(|t| ev.eval(t, &mut Vec::new()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| DefError::from_eval("enumeration", e))?;
            Ok(Value::set(vals))
        }
        ConceptExpr::Union(a, b) => set(hfset::set_union(&eval_concept_expr(a, interp)?, &eval_concept_expr(b, interp)?)),
        ConceptExpr::Intersect(a, b) => set(hfset::set_intersect(&eval_concept_expr(a, interp)?, &eval_concept_expr(b, interp)?)),
        ConceptExpr::Difference(a, b) => set(hfset::set_difference(&eval_concept_expr(a, interp)?, &eval_concept_expr(b, interp)?)),
        ConceptExpr::Product(a, b) => set(hfset::cartesian_product(
            &eval_concept_expr(a, interp)?,
            &eval_concept_expr(b, interp)?,
            limits,
        )),
        ConceptExpr::PowerSet(a) => set(hfset::power_set(&eval_concept_expr(a, interp)?, limits)),
        ConceptExpr::Image { operator, source } => {
            let src = eval_concept_expr(source, interp)?;
            let mut ev = Evaluator::new(interp);
            let mut out = Vec::new();
            for x in src.as_set().unwrap_or(&[]) {
                let y = ev
                    .apply(operator, vec![x.clone()])
                    .map_err(|e| match e {
                        EvalError::UnknownOperator(op) => DefError::UndefinedOperatorApplication {
                            op,
                            args: vec![x.clone()],
                        },
                        other => DefError::from_eval(operator, other),
                    })?;
                out.push(y);
            }
            limits
                .check_size("replacement image", out.len())
                .map_err(DefError::SizeLimitExceeded)?;
            Ok(Value::set(out))
        }
    }
}

/// Table of a defined operator over the current extents of its parameter
/// concepts; entries that fail to evaluate are left out.
fn materialize(op: &str, params: &[ConceptCopy], interp: &Interpretation, limits: &Limits) -> Option<OperatorTable> {
    let domains: Vec<Vec<Value>> = params
        .iter()
        .map(|p| interp.extent(&p.concept).and_then(Value::as_set).map(<[Value]>::to_vec))
        .collect::<Option<_>>()?;
    let total = domains.iter().try_fold(1usize, |acc, d| acc.checked_mul(d.len()))?;
    if total > limits.max_set_size {
        return None;
    }
    let mut ev = Evaluator::new(interp);
    let mut table = OperatorTable::new();
    for args in crate::ast::Odometer::new(domains) {
        if let Ok(v) = ev.apply(op, args.clone()) {
            table.insert(args, v);
        }
    }
    Some(table)
}

/// Graph construction plus recursion check as diagnostics for a whole KB.
pub fn check_definitions(kb: &KnowledgeBase) -> Vec<Diagnostic> {
    match build_dependency_graph(&kb.definitions) {
        // duplicates are reported by structure validation
        Err(_) => Vec::new(),
        Ok(g) => match check_nonrecursive(&g) {
            Ok(()) => Vec::new(),
            Err(c) => {
                let at = kb
                    .definitions
                    .iter()
                    .position(|d| Some(d.target()) == c.0.first().map(String::as_str))
                    .unwrap_or(0);
                vec![c.to_diagnostic(kb.definition_span(at))]
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Term;

    fn n(x: &str) -> Term {
        Term::atomic(x)
    }

    fn arithmetic() -> Vec<Definition> {
        vec![
            Definition::IndividualDef {
                target: "0".into(),
                body: Term::empty(),
            },
            Definition::OperatorDef {
                target: "Succ".into(),
                params: vec![ConceptCopy::new("N", 1)],
                body: Term::set(vec![Term::var("N", 1), Term::set(vec![Term::var("N", 1)])]),
            },
            Definition::ConceptOp {
                target: "N".into(),
                expr: ConceptExpr::union(
                    ConceptExpr::Enum(vec![n("0")]),
                    ConceptExpr::image("Succ", ConceptExpr::concept("N")),
                ),
            },
        ]
    }

    fn succ(v: &Value) -> Value {
        Value::set([v.clone(), Value::singleton(v.clone())])
    }

    #[test]
    fn footnote_edges() {
        let g = build_dependency_graph(&arithmetic()[..2]).unwrap();
        assert!(g.edges.is_empty());
        assert!(check_nonrecursive(&build_dependency_graph(&arithmetic()).unwrap()).is_ok());
    }

    #[test]
    fn self_loop_and_two_cycle() {
        let a = Definition::IndividualDef {
            target: "a".into(),
            body: Term::apply("+", vec![n("a"), n("1")]),
        };
        let g = build_dependency_graph(std::slice::from_ref(&a)).unwrap();
        assert!(g.has_edge("a", "a"));
        assert_eq!(check_nonrecursive(&g), Err(CycleWitness(vec!["a".into(), "a".into()])));

        let defs = vec![
            Definition::IndividualDef {
                target: "a".into(),
                body: Term::apply("f", vec![n("b")]),
            },
            Definition::IndividualDef {
                target: "b".into(),
                body: Term::apply("g", vec![n("a")]),
            },
        ];
        let g = build_dependency_graph(&defs).unwrap();
        assert_eq!(
            check_nonrecursive(&g),
            Err(CycleWitness(vec!["a".into(), "b".into(), "a".into()]))
        );
    }

    #[test]
    fn empty_and_duplicate() {
        let g = build_dependency_graph(&[]).unwrap();
        assert!(g.vertices.is_empty() && g.edges.is_empty());
        let d = Definition::ConceptEnum {
            target: "Man".into(),
            members: vec![],
        };
        assert_eq!(
            build_dependency_graph(&[d.clone(), d]),
            Err(DefError::DuplicateDefinition("Man".into()))
        );
    }

    #[test]
    fn naturals_after_three_rounds() {
        let r = evaluate(&arithmetic(), &EvaluationResult::default(), 3).unwrap();
        let zero = Value::empty();
        let expect = Value::set([zero.clone(), succ(&zero), succ(&succ(&zero)), succ(&succ(&succ(&zero)))]);
        assert_eq!(r.concept_extents["N"], expect);
        assert!(!r.fixpoint_reached);
        assert_eq!(r.rounds_executed, 3);
        assert_eq!(r.operator_tables["Succ"][&vec![zero.clone()]], succ(&zero));
    }

    #[test]
    fn digits_reach_fixpoint() {
        let digits = Definition::ConceptEnum {
            target: "Digits".into(),
            members: (0..10).map(|i| Term::literal(Value::ordinal(i))).collect(),
        };
        let r = evaluate(&[digits], &EvaluationResult::default(), 5).unwrap();
        assert_eq!(r.concept_extents["Digits"].as_set().unwrap().len(), 10);
        assert!(r.fixpoint_reached);
        assert_eq!(r.rounds_executed, 1);
    }

    #[test]
    fn replacement_over_empty_source() {
        let mut seed = EvaluationResult::default();
        seed.concept_extents.insert("S".into(), Value::empty());
        let defs = vec![
            Definition::OperatorDef {
                target: "F".into(),
                params: vec![ConceptCopy::new("S", 1)],
                body: Term::set(vec![Term::var("S", 1)]),
            },
            Definition::ConceptReplacement {
                target: "T".into(),
                operator: "F".into(),
                source: ConceptExpr::concept("S"),
            },
        ];
        let r = evaluate(&defs, &seed, 4).unwrap();
        assert_eq!(r.concept_extents["T"], Value::empty());
        assert!(r.fixpoint_reached);
        assert_eq!(r.rounds_executed, 1);
    }

    #[test]
    fn comprehension_trivial_filters() {
        let src = Value::set([Value::atom("p"), Value::atom("q")]);
        let ctx = EvaluationResult::default();
        let same = Assertion::new(Term::var("C", 1), Term::var("C", 1));
        assert_eq!(evaluate_comprehension(&src, &same, &ctx).unwrap(), src);
        let differ = crate::desugar::negation(&same);
        assert_eq!(evaluate_comprehension(&src, &differ, &ctx).unwrap(), Value::empty());
    }

    #[test]
    fn undefined_replacement_operator() {
        let mut seed = EvaluationResult::default();
        seed.concept_extents.insert("S".into(), Value::set([Value::atom("x")]));
        seed.operator_tables.insert("F".into(), OperatorTable::new());
        let d = Definition::ConceptReplacement {
            target: "T".into(),
            operator: "F".into(),
            source: ConceptExpr::concept("S"),
        };
        assert!(matches!(
            evaluate(&[d], &seed, 2),
            Err(DefError::UndefinedOperatorApplication { .. })
        ));
    }

    #[test]
    fn size_limit_stops_growth() {
        let limits = Limits {
            max_set_size: 4,
            ..Limits::default()
        };
        assert!(matches!(
            evaluate_with_limits(&arithmetic(), &EvaluationResult::default(), 10, &limits),
            Err(DefError::SizeLimitExceeded(_))
        ));
    }

    #[test]
    fn seeding_from_facts() {
        let mut kb = KnowledgeBase::default();
        kb.structure.add_individual("rex");
        kb.structure.add_concept("Animal");
        kb.assertions.push(Formula::prim(Term::apply("Sex", vec![n("rex")]), n("male")));
        kb.assertions.push(Formula::prim(Term::builtin(Builtin::Member, vec![n("rex"), n("Animal")]), Term::top()));
        let seed = seed_from_kb(&kb);
        assert_eq!(seed.individual_values["rex"], Value::atom("rex"));
        assert_eq!(seed.concept_extents["Animal"], Value::set([Value::atom("rex")]));
        assert_eq!(seed.operator_tables["Sex"][&vec![Value::atom("rex")]], Value::atom("male"));
    }
}
