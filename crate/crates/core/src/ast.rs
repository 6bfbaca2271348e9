//! Syntax of knowledge bases: structures, terms, assertions and definitions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{Diagnostic, SourceSpan};
use crate::hfset::{Value, BOTTOM, TOP};

/// Built-in constant for the empty set.
pub const EMPTY: &str = "∅";

/// Name of the built-in Boolean concept `{⊤, ⊥}` usable as an operator range.
pub const BOOL: &str = "Bool";

/// Set-theoretic operators with fixed meaning in every interpretation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Union,
    Intersect,
    Difference,
    Product,
    PowerSet,
    Cardinality,
    Member,
    Subset,
    Geq,
}

impl Builtin {
    pub const ALL: [Builtin; 9] = [
        Builtin::Union,
        Builtin::Intersect,
        Builtin::Difference,
        Builtin::Product,
        Builtin::PowerSet,
        Builtin::Cardinality,
        Builtin::Member,
        Builtin::Subset,
        Builtin::Geq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Union => "∪",
            Builtin::Intersect => "∩",
            Builtin::Difference => "∖",
            Builtin::Product => "×",
            Builtin::PowerSet => "pow",
            Builtin::Cardinality => "card",
            Builtin::Member => "∈",
            Builtin::Subset => "⊆",
            Builtin::Geq => "geq",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::PowerSet | Builtin::Cardinality => 1,
            _ => 2,
        }
    }

    /// Builtins printed between their operands.
    pub fn is_infix(self) -> bool {
        !matches!(self, Builtin::PowerSet | Builtin::Cardinality | Builtin::Geq)
    }
}

pub fn is_builtin_constant(name: &str) -> bool {
    matches!(name, EMPTY | TOP | BOTTOM)
}

/// Names that may never be declared or defined by a knowledge base.
pub fn is_reserved(name: &str) -> bool {
    is_builtin_constant(name) || Builtin::from_name(name).is_some() || name == BOOL
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConceptCopy {
    pub concept: String,
    pub copy: u32,
}

impl ConceptCopy {
    pub fn new(concept: impl Into<String>, copy: u32) -> Self {
        ConceptCopy {
            concept: concept.into(),
            copy,
        }
    }
}

/// A term. Ground terms contain no free [`Term::Concept`] placeholders; terms
/// with placeholders are schema terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Term {
    /// An atomic individual. Concept names used as values also land here.
    Atomic { name: String },
    /// An anonymous literal value.
    Literal { value: Value },
    /// Schema placeholder: copy `copy` of concept `name`.
    Concept { name: String, copy: u32 },
    Apply { op: String, args: Vec<Term> },
    Set { items: Vec<Term> },
    Tuple { items: Vec<Term> },
    /// `{x ∈ C | filter}` with `x` written as placeholder `(concept, copy)`.
    Comprehension {
        concept: String,
        copy: u32,
        filter: Box<Assertion>,
    },
}

impl Term {
    pub fn atomic(name: impl Into<String>) -> Term {
        Term::Atomic { name: name.into() }
    }

    pub fn literal(value: Value) -> Term {
        Term::Literal { value }
    }

    pub fn var(concept: impl Into<String>, copy: u32) -> Term {
        Term::Concept {
            name: concept.into(),
            copy,
        }
    }

    pub fn apply(op: impl Into<String>, args: Vec<Term>) -> Term {
        Term::Apply {
            op: op.into(),
            args,
        }
    }

    pub fn builtin(op: Builtin, args: Vec<Term>) -> Term {
        debug_assert_eq!(op.arity(), args.len());
        Term::apply(op.name(), args)
    }

    pub fn set(items: Vec<Term>) -> Term {
        Term::Set { items }
    }

    /// A tuple; a single item collapses to the item itself.
    pub fn tuple(mut items: Vec<Term>) -> Term {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Term::Tuple { items }
        }
    }

    pub fn comprehension(concept: impl Into<String>, copy: u32, filter: Assertion) -> Term {
        Term::Comprehension {
            concept: concept.into(),
            copy,
            filter: Box::new(filter),
        }
    }

    pub fn empty() -> Term {
        Term::atomic(EMPTY)
    }

    pub fn top() -> Term {
        Term::atomic(TOP)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Term::Atomic { .. } | Term::Literal { .. } | Term::Concept { .. })
    }

    /// Primitive: every operator argument (and collection item) is atomic.
    pub fn is_primitive(&self) -> bool {
        match self {
            Term::Atomic { .. } | Term::Literal { .. } | Term::Concept { .. } => true,
            Term::Comprehension { .. } => true,
            Term::Apply { args: items, .. } | Term::Set { items } | Term::Tuple { items } => {
                items.iter().all(Term::is_atomic)
            }
        }
    }

    /// Free placeholders in order of first occurrence.
    pub fn free_vars(&self) -> Vec<ConceptCopy> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<ConceptCopy>, out: &mut Vec<ConceptCopy>) {
        match self {
            Term::Concept { name, copy } => {
                let cc = ConceptCopy::new(name.clone(), *copy);
                if !bound.contains(&cc) && !out.contains(&cc) {
                    out.push(cc);
                }
            }
            Term::Atomic { .. } | Term::Literal { .. } => {}
            Term::Apply { args: items, .. } | Term::Set { items } | Term::Tuple { items } => {
                for t in items {
                    t.collect_free(bound, out);
                }
            }
            Term::Comprehension {
                concept,
                copy,
                filter,
            } => {
                bound.push(ConceptCopy::new(concept.clone(), *copy));
                filter.lhs.collect_free(bound, out);
                filter.rhs.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Replaces free placeholders for which `f` returns a term.
    pub fn substitute(&self, f: &dyn Fn(&ConceptCopy) -> Option<Term>) -> Term {
        self.subst_inner(f, &mut Vec::new())
    }

    fn subst_inner(&self, f: &dyn Fn(&ConceptCopy) -> Option<Term>, bound: &mut Vec<ConceptCopy>) -> Term {
        match self {
            Term::Concept { name, copy } => {
                let cc = ConceptCopy::new(name.clone(), *copy);
                if bound.contains(&cc) {
                    return self.clone();
                }
                f(&cc).unwrap_or_else(|| self.clone())
            }
            Term::Atomic { .. } | Term::Literal { .. } => self.clone(),
            Term::Apply { op, args } => Term::Apply {
                op: op.clone(),
                args: args.iter().map(|t| t.subst_inner(f, bound)).collect(),
            },
            Term::Set { items } => Term::Set {
                items: items.iter().map(|t| t.subst_inner(f, bound)).collect(),
            },
            Term::Tuple { items } => Term::Tuple {
                items: items.iter().map(|t| t.subst_inner(f, bound)).collect(),
            },
            Term::Comprehension {
                concept,
                copy,
                filter,
            } => {
                bound.push(ConceptCopy::new(concept.clone(), *copy));
                let filter = Assertion::new(filter.lhs.subst_inner(f, bound), filter.rhs.subst_inner(f, bound));
                bound.pop();
                Term::comprehension(concept.clone(), *copy, filter)
            }
        }
    }

    /// Every name the term refers to: atomic names, operators, concepts.
    pub fn names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Atomic { name } => {
                out.insert(name.clone());
            }
            Term::Literal { .. } => {}
            Term::Concept { name, .. } => {
                out.insert(name.clone());
            }
            Term::Apply { op, args } => {
                out.insert(op.clone());
                for t in args {
                    t.names(out);
                }
            }
            Term::Set { items } | Term::Tuple { items } => {
                for t in items {
                    t.names(out);
                }
            }
            Term::Comprehension { concept, filter, .. } => {
                out.insert(concept.clone());
                filter.lhs.names(out);
                filter.rhs.names(out);
            }
        }
    }

    /// Depth of operator/collection nesting; atomic terms are 0.
    pub fn nesting(&self) -> usize {
        match self {
            Term::Apply { args: items, .. } | Term::Set { items } | Term::Tuple { items } => {
                1 + items.iter().map(Term::nesting).max().unwrap_or(0)
            }
            _ => 0,
        }
    }
}

/// `lhs = rhs`. A schema assertion is an assertion with free placeholders.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Assertion {
    pub lhs: Term,
    pub rhs: Term,
}

pub type SchemaTerm = Term;
pub type SchemaAssertion = Assertion;

impl Assertion {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Assertion { lhs, rhs }
    }

    pub fn is_primitive(&self) -> bool {
        self.lhs.is_primitive() && self.rhs.is_primitive()
    }

    pub fn free_vars(&self) -> Vec<ConceptCopy> {
        let mut out = self.lhs.free_vars();
        for v in self.rhs.free_vars() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn substitute(&self, f: &dyn Fn(&ConceptCopy) -> Option<Term>) -> Assertion {
        Assertion::new(self.lhs.substitute(f), self.rhs.substitute(f))
    }

    pub fn names(&self, out: &mut BTreeSet<String>) {
        self.lhs.names(out);
        self.rhs.names(out);
    }
}

/// Assertions combined with logic operators, quantifiers and multi-assertions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "fields")]
pub enum Formula {
    Prim(Assertion),
    Multi(Vec<Formula>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn prim(lhs: Term, rhs: Term) -> Formula {
        Formula::Prim(Assertion::new(lhs, rhs))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn equiv(a: Formula, b: Formula) -> Formula {
        Formula::Equiv(Box::new(a), Box::new(b))
    }

    pub fn forall(concept: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(concept.into(), Box::new(body))
    }

    pub fn exists(concept: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(concept.into(), Box::new(body))
    }

    pub fn as_prim(&self) -> Option<&Assertion> {
        match self {
            Formula::Prim(a) => Some(a),
            _ => None,
        }
    }

    pub fn names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Prim(a) => a.names(out),
            Formula::Multi(parts) => parts.iter().for_each(|p| p.names(out)),
            Formula::Not(f) => f.names(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                a.names(out);
                b.names(out);
            }
            Formula::Forall(c, f) | Formula::Exists(c, f) => {
                out.insert(c.clone());
                f.names(out);
            }
        }
    }

    pub fn for_each_assertion(&self, f: &mut dyn FnMut(&Assertion)) {
        match self {
            Formula::Prim(a) => f(a),
            Formula::Multi(parts) => parts.iter().for_each(|p| p.for_each_assertion(f)),
            Formula::Not(x) | Formula::Forall(_, x) | Formula::Exists(_, x) => x.for_each_assertion(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                a.for_each_assertion(f);
                b.for_each_assertion(f);
            }
        }
    }
}

/// Set expressions over concepts, the right side of concept definitions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "fields")]
pub enum ConceptExpr {
    Concept(String),
    Enum(Vec<Term>),
    Union(Box<ConceptExpr>, Box<ConceptExpr>),
    Intersect(Box<ConceptExpr>, Box<ConceptExpr>),
    Difference(Box<ConceptExpr>, Box<ConceptExpr>),
    Product(Box<ConceptExpr>, Box<ConceptExpr>),
    PowerSet(Box<ConceptExpr>),
    /// `{O(x) | x ∈ source}`.
    Image { operator: String, source: Box<ConceptExpr> },
}

impl ConceptExpr {
    pub fn concept(name: impl Into<String>) -> Self {
        ConceptExpr::Concept(name.into())
    }

    pub fn union(a: ConceptExpr, b: ConceptExpr) -> Self {
        ConceptExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn intersect(a: ConceptExpr, b: ConceptExpr) -> Self {
        ConceptExpr::Intersect(Box::new(a), Box::new(b))
    }

    pub fn difference(a: ConceptExpr, b: ConceptExpr) -> Self {
        ConceptExpr::Difference(Box::new(a), Box::new(b))
    }

    pub fn image(operator: impl Into<String>, source: ConceptExpr) -> Self {
        ConceptExpr::Image {
            operator: operator.into(),
            source: Box::new(source),
        }
    }

    /// The expression as a term over concept-valued names; `None` when it
    /// contains an image, which has no single-term form.
    pub fn to_term(&self) -> Option<Term> {
        let bin = |b: Builtin, x: &ConceptExpr, y: &ConceptExpr| Some(Term::builtin(b, vec![x.to_term()?, y.to_term()?]));
        match self {
            ConceptExpr::Concept(c) => Some(Term::atomic(c.clone())),
            ConceptExpr::Enum(items) => Some(Term::set(items.clone())),
            ConceptExpr::Union(a, b) => bin(Builtin::Union, a, b),
            ConceptExpr::Intersect(a, b) => bin(Builtin::Intersect, a, b),
            ConceptExpr::Difference(a, b) => bin(Builtin::Difference, a, b),
            ConceptExpr::Product(a, b) => bin(Builtin::Product, a, b),
            ConceptExpr::PowerSet(a) => Some(Term::builtin(Builtin::PowerSet, vec![a.to_term()?])),
            ConceptExpr::Image { .. } => None,
        }
    }

    pub fn has_image(&self) -> bool {
        match self {
            ConceptExpr::Image { .. } => true,
            ConceptExpr::Concept(_) | ConceptExpr::Enum(_) => false,
            ConceptExpr::PowerSet(a) => a.has_image(),
            ConceptExpr::Union(a, b)
            | ConceptExpr::Intersect(a, b)
            | ConceptExpr::Difference(a, b)
            | ConceptExpr::Product(a, b) => a.has_image() || b.has_image(),
        }
    }

    pub fn names(&self, out: &mut BTreeSet<String>) {
        match self {
            ConceptExpr::Concept(c) => {
                out.insert(c.clone());
            }
            ConceptExpr::Enum(items) => items.iter().for_each(|t| t.names(out)),
            ConceptExpr::PowerSet(a) => a.names(out),
            ConceptExpr::Union(a, b)
            | ConceptExpr::Intersect(a, b)
            | ConceptExpr::Difference(a, b)
            | ConceptExpr::Product(a, b) => {
                a.names(out);
                b.names(out);
            }
            ConceptExpr::Image { operator, source } => {
                out.insert(operator.clone());
                source.names(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Definition {
    IndividualDef {
        target: String,
        body: Term,
    },
    OperatorDef {
        target: String,
        params: Vec<ConceptCopy>,
        body: Term,
    },
    ConceptEnum {
        target: String,
        members: Vec<Term>,
    },
    ConceptOp {
        target: String,
        expr: ConceptExpr,
    },
    /// `target ::= source | filter`, where copy 1 of `source` in the filter
    /// stands for the candidate element.
    ConceptComprehension {
        target: String,
        source: String,
        filter: Assertion,
    },
    ConceptReplacement {
        target: String,
        operator: String,
        source: ConceptExpr,
    },
}

impl Definition {
    pub fn target(&self) -> &str {
        match self {
            Definition::IndividualDef { target, .. }
            | Definition::OperatorDef { target, .. }
            | Definition::ConceptEnum { target, .. }
            | Definition::ConceptOp { target, .. }
            | Definition::ConceptComprehension { target, .. }
            | Definition::ConceptReplacement { target, .. } => target,
        }
    }

    /// Replacement-class definitions may be recursive and are applied once per
    /// round by the evaluator.
    pub fn is_replacement(&self) -> bool {
        match self {
            Definition::ConceptReplacement { .. } => true,
            Definition::ConceptOp { expr, .. } => expr.has_image(),
            _ => false,
        }
    }

    pub fn defines_concept(&self) -> bool {
        !matches!(
            self,
            Definition::IndividualDef { .. } | Definition::OperatorDef { .. }
        )
    }

    /// Names on the right side. Operator parameters are excluded since they
    /// are grounded into individuals.
    pub fn mentions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            Definition::IndividualDef { body, .. } => body.names(&mut out),
            Definition::OperatorDef { params, body, .. } => {
                // Parameter placeholders are dropped; a parameter concept used
                // as a value elsewhere in the body still counts.
                body.substitute(&|cc| params.contains(cc).then(|| Term::literal(Value::empty())))
                    .names(&mut out);
            }
            Definition::ConceptEnum { members, .. } => members.iter().for_each(|t| t.names(&mut out)),
            Definition::ConceptOp { expr, .. } => expr.names(&mut out),
            Definition::ConceptComprehension { source, filter, .. } => {
                out.insert(source.clone());
                filter.names(&mut out);
            }
            Definition::ConceptReplacement {
                operator, source, ..
            } => {
                out.insert(operator.clone());
                source.names(&mut out);
            }
        }
        out.retain(|n| !is_reserved(n));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperatorSig {
    pub name: String,
    pub domain: Vec<String>,
    pub declared_range: Option<String>,
    /// Declared with the `infix` keyword; requires arity 2.
    #[serde(default)]
    pub infix: bool,
}

impl OperatorSig {
    pub fn new(name: impl Into<String>, domain: Vec<String>) -> Self {
        OperatorSig {
            name: name.into(),
            domain,
            declared_range: None,
            infix: false,
        }
    }

    pub fn with_range(mut self, range: impl Into<String>) -> Self {
        self.declared_range = Some(range.into());
        self
    }

    pub fn arity(&self) -> usize {
        self.domain.len()
    }

    pub fn is_boolean(&self) -> bool {
        self.declared_range.as_deref() == Some(BOOL)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntacticStructure {
    pub individuals: BTreeSet<String>,
    pub concepts: BTreeSet<String>,
    pub operators: BTreeMap<String, OperatorSig>,
}

impl SyntacticStructure {
    pub fn add_individual(&mut self, name: impl Into<String>) {
        self.individuals.insert(name.into());
    }

    pub fn add_concept(&mut self, name: impl Into<String>) {
        self.concepts.insert(name.into());
    }

    pub fn add_operator(&mut self, sig: OperatorSig) {
        self.operators.insert(sig.name.clone(), sig);
    }

    pub fn is_concept(&self, name: &str) -> bool {
        self.concepts.contains(name)
    }

    pub fn operator(&self, name: &str) -> Option<&OperatorSig> {
        self.operators.get(name)
    }

    pub fn knows(&self, name: &str) -> bool {
        self.individuals.contains(name) || self.concepts.contains(name) || self.operators.contains_key(name)
    }
}

/// Statement locations recorded by the parser.
///
/// Comparison ignores the map so that ASTs compare by content only.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SourceMap {
    pub definitions: Vec<SourceSpan>,
    pub assertions: Vec<SourceSpan>,
    pub schema_assertions: Vec<SourceSpan>,
    pub declarations: BTreeMap<String, SourceSpan>,
}

impl PartialEq for SourceMap {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for SourceMap {}

fn span_at(spans: &[SourceSpan], i: usize) -> SourceSpan {
    spans.get(i).cloned().unwrap_or_else(SourceSpan::synthetic)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub structure: SyntacticStructure,
    pub definitions: Vec<Definition>,
    /// Asserted statements; plain `a = b` assertions are [`Formula::Prim`].
    pub assertions: Vec<Formula>,
    pub schema_assertions: Vec<Assertion>,
    #[serde(skip)]
    pub source_map: SourceMap,
}

impl KnowledgeBase {
    pub fn definition_span(&self, i: usize) -> SourceSpan {
        span_at(&self.source_map.definitions, i)
    }

    pub fn assertion_span(&self, i: usize) -> SourceSpan {
        span_at(&self.source_map.assertions, i)
    }

    pub fn schema_span(&self, i: usize) -> SourceSpan {
        span_at(&self.source_map.schema_assertions, i)
    }

    pub fn definition_of(&self, name: &str) -> Option<&Definition> {
        self.definitions.iter().find(|d| d.target() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("no extent given for concept {0}")]
    MissingExtent(String),
    #[error("extent of concept {0} is not a set")]
    NotASet(String),
}

/// Turns an extent element into a term: atoms become named individuals, other
/// values anonymous literals.
pub fn value_term(v: &Value) -> Term {
    match v.as_atom() {
        Some(name) => Term::atomic(name),
        None => Term::literal(v.clone()),
    }
}

/// All groundings of a schema assertion. Each distinct (concept, copy) pair is
/// bound to one element of its concept's extent, consistently across the
/// assertion. Bindings vary fastest in the last-occurring placeholder.
pub fn ground_schema<'a>(
    sa: &'a SchemaAssertion,
    extents: &BTreeMap<String, Value>,
) -> Result<impl Iterator<Item = Assertion> + 'a, GroundError> {
    let vars = sa.free_vars();
    let mut domains: Vec<Vec<Value>> = Vec::with_capacity(vars.len());
    for v in &vars {
        let ext = extents
            .get(&v.concept)
            .ok_or_else(|| GroundError::MissingExtent(v.concept.clone()))?;
        let elems = ext.as_set().ok_or_else(|| GroundError::NotASet(v.concept.clone()))?;
        domains.push(elems.to_vec());
    }
    Ok(Odometer::new(domains).map(move |choice| {
        sa.substitute(&|cc| {
            vars.iter()
                .position(|v| v == cc)
                .map(|i| value_term(&choice[i]))
        })
    }))
}

/// Iterates the cartesian product of a list of finite domains.
pub struct Odometer<T> {
    domains: Vec<Vec<T>>,
    idx: Vec<usize>,
    done: bool,
}

impl<T: Clone> Odometer<T> {
    pub fn new(domains: Vec<Vec<T>>) -> Self {
        let done = domains.iter().any(Vec::is_empty);
        Odometer {
            idx: vec![0; domains.len()],
            domains,
            done,
        }
    }
}

impl<T: Clone> Iterator for Odometer<T> {
    type Item = Vec<T>;

    fn next(&mut self) -> Option<Vec<T>> {
        if self.done {
            return None;
        }
        let item = self
            .idx
            .iter()
            .zip(&self.domains)
            .map(|(&i, d)| d[i].clone())
            .collect();
        let mut k = self.idx.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            if self.idx[k] < self.domains[k].len() {
                break;
            }
            self.idx[k] = 0;
        }
        Some(item)
    }
}

/// Checks names, arities and definition uniqueness. Returns every violation;
/// an empty list means the knowledge base is well-formed.
pub fn validate_structure(kb: &KnowledgeBase) -> Vec<Diagnostic> {
    let mut v = Validator {
        kb,
        defined: kb.definitions.iter().map(|d| d.target().to_string()).collect(),
        out: Vec::new(),
    };
    v.run();
    v.out
}

struct Validator<'a> {
    kb: &'a KnowledgeBase,
    defined: BTreeSet<String>,
    out: Vec<Diagnostic>,
}

impl Validator<'_> {
    fn run(&mut self) {
        let s = &self.kb.structure;
        for (name, sig) in &s.operators {
            let span = self.decl_span(name);
            if sig.domain.is_empty() {
                self.out.push(Diagnostic::error(format!("operator {name} has arity 0"), span.clone()));
            }
            if sig.infix && sig.arity() != 2 {
                self.out.push(Diagnostic::error(
                    format!("infix operator {name} must have arity 2, declared {}", sig.arity()),
                    span.clone(),
                ));
            }
            for c in sig.domain.iter().chain(sig.declared_range.iter()) {
                if !s.is_concept(c) && !self.defined.contains(c) && c != BOOL {
                    self.out.push(Diagnostic::error(
                        format!("operator {name} refers to unknown concept {c}"),
                        span.clone(),
                    ));
                }
            }
        }
        for name in s.individuals.iter().chain(&s.concepts).chain(s.operators.keys()) {
            if is_reserved(name) {
                self.out.push(Diagnostic::error(
                    format!("{name} is a built-in and cannot be declared"),
                    self.decl_span(name),
                ));
            }
        }

        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, d) in self.kb.definitions.iter().enumerate() {
            let span = self.kb.definition_span(i);
            if let Some(first) = seen.insert(d.target(), i) {
                let first_span = self.kb.definition_span(first);
                self.out.push(Diagnostic::error(
                    format!(
                        "duplicate definition of {} (first defined at {}:{})",
                        d.target(),
                        first_span.line,
                        first_span.column
                    ),
                    span.clone(),
                ));
            }
            if is_reserved(d.target()) {
                self.out.push(Diagnostic::error(
                    format!("{} is a built-in and cannot be defined", d.target()),
                    span.clone(),
                ));
            }
            self.check_definition(d, &span);
        }
        for (i, f) in self.kb.assertions.iter().enumerate() {
            let span = self.kb.assertion_span(i);
            self.check_formula(f, &[], &span);
        }
        for (i, a) in self.kb.schema_assertions.iter().enumerate() {
            let span = self.kb.schema_span(i);
            self.check_assertion(a, &[], &span);
        }
    }

    fn decl_span(&self, name: &str) -> SourceSpan {
        self.kb
            .source_map
            .declarations
            .get(name)
            .cloned()
            .unwrap_or_else(SourceSpan::synthetic)
    }

    fn check_definition(&mut self, d: &Definition, span: &SourceSpan) {
        match d {
            Definition::IndividualDef { body, .. } => self.check_term(body, &[], span),
            Definition::OperatorDef { target, params, body } => {
                if let Some(sig) = self.kb.structure.operator(target) {
                    if sig.arity() != params.len() {
                        self.out.push(Diagnostic::error(
                            format!(
                                "definition of {target} has {} parameters, declared arity {}",
                                params.len(),
                                sig.arity()
                            ),
                            span.clone(),
                        ));
                    }
                }
                for (i, p) in params.iter().enumerate() {
                    if params[..i].contains(p) {
                        self.out.push(Diagnostic::error(
                            format!(
                                "parameter {}^{} of {target} repeated; use distinct copies",
                                p.concept, p.copy
                            ),
                            span.clone(),
                        ));
                    }
                    self.check_concept_name(&p.concept, span);
                }
                for v in body.free_vars() {
                    if !params.contains(&v) {
                        self.out.push(Diagnostic::error(
                            format!(
                                "body of {target} mentions {}^{} which is not a parameter",
                                v.concept, v.copy
                            ),
                            span.clone(),
                        ));
                    }
                }
                self.check_term(body, params, span);
            }
            Definition::ConceptEnum { members, .. } => {
                for t in members {
                    self.check_term(t, &[], span);
                }
            }
            Definition::ConceptOp { expr, .. } => self.check_expr(expr, span),
            Definition::ConceptComprehension { target, source, filter } => {
                self.check_concept_name(source, span);
                for v in filter.free_vars() {
                    if v.concept != *source {
                        self.out.push(Diagnostic::error(
                            format!(
                                "filter of {target} mentions concept {} besides its source {source}",
                                v.concept
                            ),
                            span.clone(),
                        ));
                    }
                }
                let bound: Vec<ConceptCopy> = filter
                    .free_vars()
                    .into_iter()
                    .filter(|v| v.concept == *source)
                    .collect();
                self.check_assertion(filter, &bound, span);
            }
            Definition::ConceptReplacement { operator, source, .. } => {
                self.check_operator_use(operator, 1, span);
                self.check_expr(source, span);
            }
        }
    }

    fn check_expr(&mut self, e: &ConceptExpr, span: &SourceSpan) {
        match e {
            ConceptExpr::Concept(c) => self.check_concept_name(c, span),
            ConceptExpr::Enum(items) => {
                for t in items {
                    self.check_term(t, &[], span);
                }
            }
            ConceptExpr::PowerSet(a) => self.check_expr(a, span),
            ConceptExpr::Union(a, b)
            | ConceptExpr::Intersect(a, b)
            | ConceptExpr::Difference(a, b)
            | ConceptExpr::Product(a, b) => {
                self.check_expr(a, span);
                self.check_expr(b, span);
            }
            ConceptExpr::Image { operator, source } => {
                self.check_operator_use(operator, 1, span);
                self.check_expr(source, span);
            }
        }
    }

    fn check_concept_name(&mut self, c: &str, span: &SourceSpan) {
        if !self.kb.structure.is_concept(c) && !self.is_defined_concept(c) {
            self.out.push(Diagnostic::error(format!("unknown concept {c}"), span.clone()));
        }
    }

    fn is_defined_concept(&self, c: &str) -> bool {
        self.kb
            .definitions
            .iter()
            .any(|d| d.target() == c && d.defines_concept())
    }

    fn check_formula(&mut self, f: &Formula, bound: &[ConceptCopy], span: &SourceSpan) {
        match f {
            Formula::Prim(a) => self.check_assertion(a, bound, span),
            Formula::Multi(parts) => parts.iter().for_each(|p| self.check_formula(p, bound, span)),
            Formula::Not(x) => self.check_formula(x, bound, span),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                self.check_formula(a, bound, span);
                self.check_formula(b, bound, span);
            }
            Formula::Forall(c, body) | Formula::Exists(c, body) => {
                self.check_concept_name(c, span);
                let mut names = BTreeSet::new();
                body.names(&mut names);
                let mut vars = Vec::new();
                body.for_each_assertion(&mut |a| {
                    for v in a.free_vars() {
                        if !vars.contains(&v) {
                            vars.push(v);
                        }
                    }
                });
                for v in &vars {
                    if v.concept != *c && !bound.contains(v) {
                        self.out.push(Diagnostic::error(
                            format!("quantifier over {c} mentions foreign concept {}", v.concept),
                            span.clone(),
                        ));
                    }
                }
                let mut inner = bound.to_vec();
                inner.extend(vars.into_iter().filter(|v| v.concept == *c));
                self.check_formula(body, &inner, span);
            }
        }
    }

    fn check_assertion(&mut self, a: &Assertion, bound: &[ConceptCopy], span: &SourceSpan) {
        self.check_term(&a.lhs, bound, span);
        self.check_term(&a.rhs, bound, span);
    }

    fn check_term(&mut self, t: &Term, bound: &[ConceptCopy], span: &SourceSpan) {
        match t {
            Term::Atomic { name } => {
                if !is_builtin_constant(name) && !self.kb.structure.knows(name) && !self.defined.contains(name) {
                    self.out.push(Diagnostic::error(format!("unknown name {name}"), span.clone()));
                }
            }
            Term::Literal { .. } => {}
            Term::Concept { name, .. } => self.check_concept_name(name, span),
            Term::Apply { op, args } => {
                self.check_operator_use(op, args.len(), span);
                for a in args {
                    self.check_term(a, bound, span);
                }
            }
            Term::Set { items } => items.iter().for_each(|x| self.check_term(x, bound, span)),
            Term::Tuple { items } => {
                if items.len() < 2 {
                    self.out.push(Diagnostic::error("tuple needs at least two items", span.clone()));
                }
                items.iter().for_each(|x| self.check_term(x, bound, span));
            }
            Term::Comprehension { concept, copy, filter } => {
                self.check_concept_name(concept, span);
                let mut inner = bound.to_vec();
                inner.push(ConceptCopy::new(concept.clone(), *copy));
                self.check_assertion(filter, &inner, span);
            }
        }
    }

    fn check_operator_use(&mut self, op: &str, arity: usize, span: &SourceSpan) {
        if let Some(b) = Builtin::from_name(op) {
            if b.arity() != arity {
                self.out.push(Diagnostic::error(
                    format!("arity mismatch: {op} takes {} argument(s), used with {arity}", b.arity()),
                    span.clone(),
                ));
            }
            return;
        }
        let declared = self.kb.structure.operator(op).map(OperatorSig::arity).or_else(|| {
            self.kb.definitions.iter().find_map(|d| match d {
                Definition::OperatorDef { target, params, .. } if target == op => Some(params.len()),
                _ => None,
            })
        });
        match declared {
            Some(n) if n != arity => self.out.push(Diagnostic::error(
                format!("arity mismatch: {op} declared with arity {n}, used with {arity}"),
                span.clone(),
            )),
            Some(_) => {}
            None => self
                .out
                .push(Diagnostic::error(format!("unknown operator {op}"), span.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: &str) -> Term {
        Term::atomic(x)
    }

    #[test]
    fn primitive_vs_nested() {
        let flat = Term::apply("Op", vec![n("a"), n("b")]);
        assert!(flat.is_primitive());
        let nested = Term::apply("Op", vec![n("a"), Term::apply("Op", vec![n("b"), n("c")])]);
        assert!(!nested.is_primitive());
        assert!(n("a").is_primitive());
    }

    fn extents(vals: &[&str]) -> BTreeMap<String, Value> {
        let mut m = BTreeMap::new();
        m.insert("N".to_string(), Value::set(vals.iter().map(Value::atom)));
        m
    }

    #[test]
    fn grounding_distinct_copies() {
        let sa = Assertion::new(Term::var("N", 1), Term::var("N", 2));
        let got: Vec<Assertion> = ground_schema(&sa, &extents(&["0", "1"])).unwrap().collect();
        let expect: Vec<Assertion> = [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")]
            .iter()
            .map(|(l, r)| Assertion::new(n(l), n(r)))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn grounding_same_copy_is_diagonal() {
        let sa = Assertion::new(Term::var("N", 1), Term::var("N", 1));
        let got: Vec<Assertion> = ground_schema(&sa, &extents(&["0", "1"])).unwrap().collect();
        assert_eq!(got, vec![Assertion::new(n("0"), n("0")), Assertion::new(n("1"), n("1"))]);
    }

    #[test]
    fn grounding_empty_extent_and_missing() {
        let sa = Assertion::new(Term::var("N", 1), Term::var("N", 2));
        assert_eq!(ground_schema(&sa, &extents(&[])).unwrap().count(), 0);
        let other = Assertion::new(Term::var("M", 1), n("a"));
        assert!(matches!(
            ground_schema(&other, &extents(&["0"])).err(),
            Some(GroundError::MissingExtent(c)) if c == "M"
        ));
    }

    #[test]
    fn grounding_uses_literals_for_non_atoms() {
        let mut m = BTreeMap::new();
        m.insert("S".to_string(), Value::set([Value::empty()]));
        let sa = Assertion::new(Term::var("S", 1), n("a"));
        let got: Vec<Assertion> = ground_schema(&sa, &m).unwrap().collect();
        assert_eq!(got, vec![Assertion::new(Term::literal(Value::empty()), n("a"))]);
    }

    #[test]
    fn grounding_count_is_product_of_extents() {
        // exhaustive over extent sizes ≤ 4 for schemas with up to three placeholders
        for size_n in 0..=4usize {
            for size_m in 0..=4usize {
                let mut m = BTreeMap::new();
                m.insert("N".to_string(), Value::set((0..size_n).map(|i| Value::atom(format!("n{i}")))));
                m.insert("M".to_string(), Value::set((0..size_m).map(|i| Value::atom(format!("m{i}")))));
                let sa = Assertion::new(
                    Term::apply("f", vec![Term::var("N", 1), Term::var("M", 1)]),
                    Term::apply("g", vec![Term::var("N", 2), Term::var("N", 1)]),
                );
                let count = ground_schema(&sa, &m).unwrap().count();
                assert_eq!(count, size_n * size_m * size_n);
            }
        }
    }

    #[test]
    fn comprehension_binds_its_copy() {
        let filter = Assertion::new(Term::var("C", 1), Term::var("C", 2));
        let t = Term::comprehension("C", 1, filter);
        assert_eq!(t.free_vars(), vec![ConceptCopy::new("C", 2)]);
        let replaced = t.substitute(&|_| Some(n("z")));
        assert_eq!(
            replaced,
            Term::comprehension("C", 1, Assertion::new(Term::var("C", 1), n("z")))
        );
    }

    #[test]
    fn operator_def_mentions_skip_params() {
        let d = Definition::OperatorDef {
            target: "Succ".into(),
            params: vec![ConceptCopy::new("N", 1)],
            body: Term::set(vec![Term::var("N", 1), Term::set(vec![Term::var("N", 1)])]),
        };
        assert!(d.mentions().is_empty());
    }

    #[test]
    fn builtin_names_round_trip() {
        for b in Builtin::ALL {
            assert_eq!(Builtin::from_name(b.name()), Some(b));
        }
    }
}
