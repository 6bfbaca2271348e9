//! Bounded entailment: search for a model of the knowledge base that
//! falsifies the query, among interpretations over a few atoms.
//!
//! The search is lazy. An interpretation is built up only as far as
//! evaluation demands: whenever the query or a KB constraint reads an
//! individual, a concept extent or an operator table entry that has no value
//! yet, the search branches over its possible values. Anything never read can
//! be completed arbitrarily, so a partial countermodel is a countermodel.
//!
//! Atoms are interchangeable. A value that introduces atoms not used so far
//! must use them in index order (`e1`, `e2`, …), which visits one
//! representative per renaming class.

use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::{models, EvalError, Interpretation};
use crate::ast::{is_builtin_constant, Assertion, Builtin, Definition, KnowledgeBase, Term};
use crate::desugar::lower_formula;
use crate::hfset::{SetError, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBound {
    /// Maximum number of atoms in the universe.
    pub atoms: usize,
    /// Individuals and operator results range over values of set-nesting
    /// depth below this bound: 1 allows atoms only, 2 adds sets of atoms.
    pub depth: usize,
    /// Maximum number of assigned entries in one operator table.
    pub max_table_domain: usize,
    /// Search nodes allowed per parallel subtree.
    pub max_nodes: u64,
}

impl Default for SearchBound {
    fn default() -> Self {
        SearchBound {
            atoms: 3,
            depth: 2,
            max_table_domain: 4096,
            max_nodes: 2_000_000,
        }
    }
}

const MAX_ATOMS: usize = 16;
const MAX_DOMAIN: usize = 1 << 12;
const PARALLEL_LEVELS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub atoms: usize,
    pub depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "snake_case")]
pub enum Verdict {
    Holds(SearchStats),
    CounterModel(Box<Interpretation>),
    BoundExhausted(SearchStats),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn countermodel(&self) -> Option<&Interpretation> {
        match self {
            Verdict::CounterModel(i) => Some(i),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OpShape {
    pub arity: usize,
    /// Results are `⊤` or `⊥`.
    pub boolean: bool,
}

/// The symbols an interpretation has to give meaning to.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub individuals: BTreeSet<String>,
    pub concepts: BTreeSet<String>,
    pub operators: BTreeMap<String, OpShape>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn with_individual(mut self, name: impl Into<String>) -> Self {
        self.individuals.insert(name.into());
        self
    }

    pub fn with_concept(mut self, name: impl Into<String>) -> Self {
        self.concepts.insert(name.into());
        self
    }

    pub fn with_operator(mut self, name: impl Into<String>, arity: usize, boolean: bool) -> Self {
        self.operators.insert(name.into(), OpShape { arity, boolean });
        self
    }

    /// Undefined symbols of `kb` and `extra`. Operators with a definition
    /// body are excluded; undeclared atomic names count as individuals.
    pub fn of(kb: &KnowledgeBase, extra: &[&Assertion]) -> Signature {
        let s = &kb.structure;
        let defined_ops: BTreeSet<&str> = kb
            .definitions
            .iter()
            .filter_map(|d| match d {
                Definition::OperatorDef { target, .. } => Some(target.as_str()),
                _ => None,
            })
            .collect();
        let mut sig = Signature::new();
        sig.concepts.extend(s.concepts.iter().cloned());
        for d in &kb.definitions {
            if d.defines_concept() {
                sig.concepts.insert(d.target().to_string());
            }
        }
        for (name, op) in &s.operators {
            if !defined_ops.contains(name.as_str()) {
                sig.operators.insert(
                    name.clone(),
                    OpShape {
                        arity: op.arity(),
                        boolean: op.is_boolean(),
                    },
                );
            }
        }
        let mut atomic = BTreeSet::new();
        let mut walk = |t: &Term, sig: &mut Signature| collect(t, sig, &mut atomic, &defined_ops);
        for a in kb_constraints(kb).iter().chain(extra.iter().copied()) {
            walk(&a.lhs, &mut sig);
            walk(&a.rhs, &mut sig);
        }
        for d in &kb.definitions {
            if let Definition::OperatorDef { body, .. } = d {
                walk(body, &mut sig);
            }
        }
        drop(walk);
        atomic.extend(kb.definitions.iter().filter_map(|d| match d {
            Definition::IndividualDef { target, .. } => Some(target.clone()),
            _ => None,
        }));
        atomic.extend(s.individuals.iter().cloned());
        for name in atomic {
            if !sig.concepts.contains(&name) && !sig.operators.contains_key(&name) && !is_builtin_constant(&name) {
                sig.individuals.insert(name);
            }
        }
        sig
    }
}

fn collect(t: &Term, sig: &mut Signature, atomic: &mut BTreeSet<String>, defined_ops: &BTreeSet<&str>) {
    match t {
        Term::Atomic { name } => {
            atomic.insert(name.clone());
        }
        Term::Literal { .. } => {}
        Term::Concept { name, .. } => {
            sig.concepts.insert(name.clone());
        }
        Term::Apply { op, args } => {
            if Builtin::from_name(op).is_none() && !defined_ops.contains(op.as_str()) {
                sig.operators.entry(op.clone()).or_insert(OpShape {
                    arity: args.len(),
                    boolean: false,
                });
            }
            for a in args {
                collect(a, sig, atomic, defined_ops);
            }
        }
        Term::Set { items } | Term::Tuple { items } => {
            for a in items {
                collect(a, sig, atomic, defined_ops);
            }
        }
        Term::Comprehension { concept, filter, .. } => {
            sig.concepts.insert(concept.clone());
            collect(&filter.lhs, sig, atomic, defined_ops);
            collect(&filter.rhs, sig, atomic, defined_ops);
        }
    }
}

/// Everything a model of `kb` must satisfy, as assertions. Individual and
/// non-replacement concept definitions become equations; replacement
/// definitions describe an unbounded process and are not constrained.
pub fn kb_constraints(kb: &KnowledgeBase) -> Vec<Assertion> {
    let mut out = Vec::new();
    for d in &kb.definitions {
        let eq = |t: Term| Assertion::new(Term::atomic(d.target()), t);
        match d {
            Definition::IndividualDef { body, .. } => out.push(eq(body.clone())),
            Definition::ConceptEnum { members, .. } => out.push(eq(Term::set(members.clone()))),
            Definition::ConceptOp { expr, .. } => {
                if let Some(t) = expr.to_term() {
                    out.push(eq(t));
                }
            }
            Definition::ConceptComprehension { source, filter, .. } => {
                out.push(eq(Term::comprehension(source.clone(), 1, filter.clone())))
            }
            Definition::OperatorDef { .. } | Definition::ConceptReplacement { .. } => {}
        }
    }
    out.extend(kb.assertions.iter().map(lower_formula));
    out.extend(kb.schema_assertions.iter().cloned());
    out
}

fn atom_name(i: usize) -> String {
    format!("e{}", i + 1)
}

/// Values of nesting depth below `depth` over `n` atoms, in value order.
fn value_domain(n: usize, depth: usize) -> Result<Vec<Value>, String> {
    let mut dom: Vec<Value> = (0..n).map(|i| Value::atom(atom_name(i))).collect();
    for _ in 1..depth {
        if dom.len() > 20 {
            return Err(format!("value domain over {n} atoms at depth {depth} is too large"));
        }
        let subsets = 1usize << dom.len();
        if subsets + dom.len() > MAX_DOMAIN {
            return Err(format!("value domain over {n} atoms at depth {depth} is too large"));
        }
        let mut next: BTreeSet<Value> = dom.iter().cloned().collect();
        for mask in 0..subsets {
            next.insert(Value::set(
                dom.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.clone()),
            ));
        }
        dom = next.into_iter().collect();
    }
    Ok(dom)
}

fn atom_mask(v: &Value, index: &BTreeMap<Value, usize>) -> u64 {
    match v {
        Value::Atom(_) => index.get(v).map_or(0, |&i| 1 << i),
        Value::Set(items) => items.iter().fold(0, |m, x| m | atom_mask(x, index)),
        Value::Tuple(items) => items.iter().fold(0, |m, x| m | atom_mask(x, index)),
    }
}

fn mask_top(mask: u64) -> usize {
    64 - mask.leading_zeros() as usize
}

/// New atoms beyond the first `used` must form a prefix of the unused ones.
fn canonical_extension(mask: u64, used: usize) -> bool {
    let top = mask_top(mask);
    (used..top).all(|i| mask >> i & 1 == 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Key {
    Individual(String),
    Concept(String),
    Entry(String, Vec<Value>),
}

enum Truth {
    Known(bool),
    Miss(Key),
    Abort(String),
}

enum Step {
    Miss(Key),
    Prune,
    Counter,
    Abort(String),
}

enum Outcome {
    None,
    Found(Interpretation),
    Exhausted(String),
}

#[derive(Clone)]
struct Node {
    interp: Interpretation,
    used: usize,
    level: usize,
}

struct Search<'a> {
    sig: &'a Signature,
    query: &'a Assertion,
    constraints: Vec<Assertion>,
    bound: SearchBound,
    domain: Vec<(Value, u64)>,
    subsets: Vec<(Value, u64)>,
    atoms: Vec<Value>,
    nodes: AtomicU64,
}

/// Decides whether `query` holds in every model of `kb` within `bound`.
///
/// The first countermodel in search order is returned; the search order, and
/// hence the result, does not depend on thread scheduling.
pub fn check_entails(kb: &KnowledgeBase, query: &Assertion, bound: &SearchBound) -> Result<Verdict, EvalError> {
    let sig = Signature::of(kb, &[query]);
    let stats = |nodes, reason| SearchStats {
        nodes,
        atoms: bound.atoms,
        depth: bound.depth,
        reason,
    };
    if bound.atoms == 0 || bound.atoms > MAX_ATOMS || bound.depth == 0 {
        return Ok(Verdict::BoundExhausted(stats(
            0,
            Some(format!("atoms must be in 1..={MAX_ATOMS} and depth at least 1")),
        )));
    }
    let values = match value_domain(bound.atoms, bound.depth) {
        Ok(v) => v,
        Err(reason) => return Ok(Verdict::BoundExhausted(stats(0, Some(reason)))),
    };
    let atoms: Vec<Value> = (0..bound.atoms).map(|i| Value::atom(atom_name(i))).collect();
    let index: BTreeMap<Value, usize> = atoms.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let domain = values.into_iter().map(|v| {
        let m = atom_mask(&v, &index);
        (v, m)
    });
    let subsets = (0..1u64 << bound.atoms)
        .map(|mask| {
            let v = Value::set(atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()));
            (v, mask)
        })
        .collect();
    let mut constraints = kb_constraints(kb);
    // constraints sharing names with the query first: they prune soonest
    let mut qnames = BTreeSet::new();
    query.names(&mut qnames);
    constraints.sort_by_key(|a| {
        let mut n = BTreeSet::new();
        a.names(&mut n);
        std::cmp::Reverse(n.intersection(&qnames).count())
    });
    let search = Search {
        sig: &sig,
        query,
        constraints,
        bound: *bound,
        domain: domain.collect(),
        subsets,
        atoms,
        nodes: AtomicU64::new(0),
    };
    let mut root = Interpretation::new().with_operator_definitions(&kb.definitions);
    for op in sig.operators.keys() {
        root.operator_map.insert(op.clone(), Default::default());
    }
    let mut budget = bound.max_nodes;
    let outcome = search.run(
        Node {
            interp: root,
            used: 0,
            level: 0,
        },
        &mut budget,
    )?;
    let nodes = search.nodes.load(Ordering::Relaxed);
    Ok(match outcome {
        Outcome::None => Verdict::Holds(stats(nodes, None)),
        Outcome::Found(i) => Verdict::CounterModel(Box::new(i)),
        Outcome::Exhausted(reason) => Verdict::BoundExhausted(stats(nodes, Some(reason))),
    })
}

impl Search<'_> {
    fn run(&self, node: Node, budget: &mut u64) -> Result<Outcome, EvalError> {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        if *budget == 0 {
            return Ok(Outcome::Exhausted(format!(
                "search budget of {} nodes exhausted",
                self.bound.max_nodes
            )));
        }
        *budget -= 1;
        let key = match self.step(&node.interp)? {
            Step::Prune => return Ok(Outcome::None),
            Step::Counter => return Ok(Outcome::Found(self.complete(&node))),
            Step::Abort(reason) => return Ok(Outcome::Exhausted(reason)),
            Step::Miss(k) => k,
        };
        let children = match self.expand(&node, key) {
            Ok(c) => c,
            Err(reason) => return Ok(Outcome::Exhausted(reason)),
        };
        if node.level < PARALLEL_LEVELS {
            return children
                .into_par_iter()
                .map(|child| {
                    let mut own = self.bound.max_nodes;
                    self.run(child, &mut own)
                })
                .find_map_first(|r| match r {
                    Ok(Outcome::None) => None,
                    other => Some(other),
                })
                .unwrap_or(Ok(Outcome::None));
        }
        for child in children {
            match self.run(child, budget)? {
                Outcome::None => {}
                found => return Ok(found),
            }
        }
        Ok(Outcome::None)
    }

    fn truth(&self, i: &Interpretation, a: &Assertion) -> Result<Truth, EvalError> {
        match models(i, a) {
            Ok(b) => Ok(Truth::Known(b)),
            Err(EvalError::UnboundName(n)) => {
                if self.sig.concepts.contains(&n) {
                    Ok(Truth::Miss(Key::Concept(n)))
                } else if self.sig.individuals.contains(&n) {
                    Ok(Truth::Miss(Key::Individual(n)))
                } else {
                    Err(EvalError::UnboundName(n))
                }
            }
            Err(EvalError::UnboundPlaceholder(cc)) if self.sig.concepts.contains(&cc.concept) => {
                Ok(Truth::Miss(Key::Concept(cc.concept)))
            }
            Err(EvalError::PartialOperator { op, args }) if self.sig.operators.contains_key(&op) => {
                Ok(Truth::Miss(Key::Entry(op, args)))
            }
            Err(e @ EvalError::Set(SetError::SizeLimitExceeded { .. })) | Err(e @ EvalError::RecursionLimit(_)) => {
                Ok(Truth::Abort(e.to_string()))
            }
            Err(e @ (EvalError::UnknownOperator(_) | EvalError::UnboundPlaceholder(_) | EvalError::PartialOperator { .. })) => {
                Err(e)
            }
            // ill-typed applications denote nothing, so the equation fails
            Err(_) => Ok(Truth::Known(false)),
        }
    }

    fn step(&self, i: &Interpretation) -> Result<Step, EvalError> {
        match self.truth(i, self.query)? {
            Truth::Known(true) => return Ok(Step::Prune),
            Truth::Known(false) => {}
            Truth::Miss(k) => return Ok(Step::Miss(k)),
            Truth::Abort(r) => return Ok(Step::Abort(r)),
        }
        for c in &self.constraints {
            match self.truth(i, c)? {
                Truth::Known(true) => {}
                Truth::Known(false) => return Ok(Step::Prune),
                Truth::Miss(k) => return Ok(Step::Miss(k)),
                Truth::Abort(r) => return Ok(Step::Abort(r)),
            }
        }
        Ok(Step::Counter)
    }

    fn expand(&self, node: &Node, key: Key) -> Result<Vec<Node>, String> {
        let child = |interp: Interpretation, mask: u64| Node {
            interp,
            used: node.used.max(mask_top(mask)),
            level: node.level + 1,
        };
        let pick = |cands: &[(Value, u64)]| -> Vec<(Value, u64)> {
            cands
                .iter()
                .filter(|(_, m)| canonical_extension(*m, node.used))
                .cloned()
                .collect()
        };
        Ok(match key {
            Key::Individual(name) => pick(&self.domain)
                .into_iter()
                .map(|(v, m)| child(node.interp.clone().with_individual(name.clone(), v), m))
                .collect(),
            Key::Concept(name) => pick(&self.subsets)
                .into_iter()
                .map(|(v, m)| child(node.interp.clone().with_concept(name.clone(), v), m))
                .collect(),
            Key::Entry(op, args) => {
                let assigned = node.interp.operator_map.get(&op).map_or(0, |t| t.len());
                if assigned >= self.bound.max_table_domain {
                    return Err(format!(
                        "operator {op} needs more than {} table entries",
                        self.bound.max_table_domain
                    ));
                }
                let results = if self.sig.operators[&op].boolean {
                    vec![(Value::bottom(), 0), (Value::top(), 0)]
                } else {
                    pick(&self.domain)
                };
                results
                    .into_iter()
                    .map(|(v, m)| child(node.interp.clone().with_entry(op.clone(), args.clone(), v), m))
                    .collect()
            }
        })
    }

    /// Fills every symbol the search never read: individuals with the first
    /// atom, concepts with ∅, tables over the atoms with the first atom or ⊥.
    fn complete(&self, node: &Node) -> Interpretation {
        let n = node.used.max(1);
        let atoms = &self.atoms[..n];
        let mut i = node.interp.clone();
        i.universe = atoms.to_vec();
        for name in &self.sig.individuals {
            i.individual_map.entry(name.clone()).or_insert_with(|| atoms[0].clone());
        }
        for name in &self.sig.concepts {
            i.concept_map.entry(name.clone()).or_insert_with(Value::empty);
        }
        for (op, shape) in &self.sig.operators {
            let fill = if shape.boolean { Value::bottom() } else { atoms[0].clone() };
            let total = n.checked_pow(shape.arity as u32).unwrap_or(usize::MAX);
            let table = i.operator_map.entry(op.clone()).or_default();
            if total <= self.bound.max_table_domain {
                for args in crate::ast::Odometer::new(vec![atoms.to_vec(); shape.arity]) {
                    table.entry(args).or_insert_with(|| fill.clone());
                }
            }
        }
        i
    }
}

/// Explicit enumeration of all total interpretations of a signature within a
/// bound, one per class of atom renamings. Exponential; meant for small
/// signatures and as a cross-check of the lazy search.
#[derive(Debug, Clone)]
pub struct InterpretationSpace {
    sig: Signature,
    bound: SearchBound,
    template: Interpretation,
}

struct Layout {
    atoms: Vec<Value>,
    domain: Vec<Value>,
    radices: Vec<usize>,
    /// Index permutations of the value domain, one per atom permutation.
    perms: Vec<(Vec<usize>, Vec<usize>)>,
}

impl InterpretationSpace {
    pub fn new(sig: Signature, bound: &SearchBound) -> Self {
        InterpretationSpace {
            sig,
            bound: *bound,
            template: Interpretation::new(),
        }
    }

    /// Operator definitions shared by every enumerated interpretation.
    pub fn with_definitions<'a>(mut self, defs: impl IntoIterator<Item = &'a Definition>) -> Self {
        self.template = self.template.with_operator_definitions(defs);
        self
    }

    pub fn count(&self) -> usize {
        self.iter().count()
    }

    pub fn iter(&self) -> impl Iterator<Item = Interpretation> + '_ {
        (1..=self.bound.atoms).flat_map(move |n| {
            let layout = Rc::new(self.layout(n));
            let domains: Vec<Vec<usize>> = layout.radices.iter().map(|&r| (0..r).collect()).collect();
            let for_build = Rc::clone(&layout);
            crate::ast::Odometer::new(domains)
                .filter(move |digits| self.is_canonical(&layout, digits))
                .map(move |digits| self.build(&for_build, &digits))
        })
    }

    fn layout(&self, n: usize) -> Layout {
        let atoms: Vec<Value> = (0..n).map(|i| Value::atom(atom_name(i))).collect();
        let domain = value_domain(n, self.bound.depth).unwrap_or_else(|_| atoms.clone());
        let dom_index: BTreeMap<Value, usize> = domain.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let mut radices = Vec::new();
        radices.extend(self.sig.individuals.iter().map(|_| domain.len()));
        radices.extend(self.sig.concepts.iter().map(|_| 1usize << n));
        for shape in self.sig.operators.values() {
            let entries = domain.len().pow(shape.arity as u32);
            let r = if shape.boolean { 2 } else { domain.len() };
            radices.extend(std::iter::repeat_n(r, entries));
        }
        let perms = permutations(n)
            .into_iter()
            .map(|p| {
                let rename = |name: &str| {
                    let i: usize = name[1..].parse::<usize>().map_or(usize::MAX, |k| k - 1);
                    p.get(i).map_or_else(|| Value::atom(name), |&j| Value::atom(atom_name(j)))
                };
                let on_dom = domain.iter().map(|v| dom_index[&v.map_atoms(&rename)]).collect();
                (p, on_dom)
            })
            .collect();
        Layout {
            atoms,
            domain,
            radices,
            perms,
        }
    }

    fn permuted(&self, layout: &Layout, (atom_perm, dom_perm): &(Vec<usize>, Vec<usize>), digits: &[usize]) -> Vec<usize> {
        let mut out = digits.to_vec();
        let mut pos = 0;
        for _ in &self.sig.individuals {
            out[pos] = dom_perm[digits[pos]];
            pos += 1;
        }
        for _ in &self.sig.concepts {
            let mask = digits[pos];
            out[pos] = (0..atom_perm.len())
                .filter(|&i| mask >> i & 1 == 1)
                .fold(0, |m, i| m | 1 << atom_perm[i]);
            pos += 1;
        }
        let d = layout.domain.len();
        for shape in self.sig.operators.values() {
            let entries = d.pow(shape.arity as u32);
            for e in 0..entries {
                // argument k is digit k of the entry index, least significant first
                let mut rest = e;
                let mut target = 0;
                let mut scale = 1;
                for _ in 0..shape.arity {
                    target += dom_perm[rest % d] * scale;
                    rest /= d;
                    scale *= d;
                }
                let v = digits[pos + e];
                out[pos + target] = if shape.boolean { v } else { dom_perm[v] };
            }
            pos += entries;
        }
        out
    }

    fn is_canonical(&self, layout: &Layout, digits: &[usize]) -> bool {
        layout
            .perms
            .iter()
            .all(|p| self.permuted(layout, p, digits).as_slice() >= digits)
    }

    fn build(&self, layout: &Layout, digits: &[usize]) -> Interpretation {
        let n = layout.atoms.len();
        let mut i = self.template.clone();
        i.universe = layout.atoms.clone();
        let mut pos = 0;
        for name in &self.sig.individuals {
            i.individual_map.insert(name.clone(), layout.domain[digits[pos]].clone());
            pos += 1;
        }
        for name in &self.sig.concepts {
            let mask = digits[pos];
            let ext = Value::set((0..n).filter(|k| mask >> k & 1 == 1).map(|k| layout.atoms[k].clone()));
            i.concept_map.insert(name.clone(), ext);
            pos += 1;
        }
        let d = layout.domain.len();
        for (op, shape) in &self.sig.operators {
            let entries = d.pow(shape.arity as u32);
            let table = i.operator_map.entry(op.clone()).or_default();
            for e in 0..entries {
                let mut rest = e;
                let args = (0..shape.arity)
                    .map(|_| {
                        let a = layout.domain[rest % d].clone();
                        rest /= d;
                        a
                    })
                    .collect();
                let v = digits[pos + e];
                let value = if shape.boolean {
                    Value::boolean(v == 1)
                } else {
                    layout.domain[v].clone()
                };
                table.insert(args, value);
            }
            pos += entries;
        }
        i
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Formula, KnowledgeBase};

    fn eq(l: &str, r: &str) -> Assertion {
        Assertion::new(Term::atomic(l), Term::atomic(r))
    }

    fn kb_of(facts: Vec<Assertion>) -> KnowledgeBase {
        KnowledgeBase {
            assertions: facts.into_iter().map(Formula::Prim).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn tautology_holds() {
        let v = check_entails(&KnowledgeBase::default(), &eq("a", "a"), &SearchBound::default()).unwrap();
        assert!(v.holds());
    }

    #[test]
    fn symmetry_of_equality() {
        let v = check_entails(&kb_of(vec![eq("a", "b")]), &eq("b", "a"), &SearchBound::default()).unwrap();
        assert!(v.holds());
    }

    #[test]
    fn distinct_names_have_countermodel() {
        let v = check_entails(&KnowledgeBase::default(), &eq("a", "b"), &SearchBound::default()).unwrap();
        let i = v.countermodel().expect("countermodel");
        assert_ne!(i.individual_map["a"], i.individual_map["b"]);
        assert!(!models(i, &eq("a", "b")).unwrap());
        let atoms_used: BTreeSet<&Value> = i.individual_map.values().collect();
        assert!(atoms_used.len() <= 2);
    }

    #[test]
    fn canonical_extension_rule() {
        assert!(canonical_extension(0b001, 0));
        assert!(!canonical_extension(0b010, 0));
        assert!(canonical_extension(0b110, 1));
        assert!(canonical_extension(0b010, 2));
        assert!(!canonical_extension(0b100, 1));
        assert!(canonical_extension(0, 0));
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(3).len(), 6);
        let distinct: BTreeSet<Vec<usize>> = permutations(4).into_iter().collect();
        assert_eq!(distinct.len(), 24);
    }

    #[test]
    fn depth_two_domain() {
        let d = value_domain(2, 2).unwrap();
        // 2 atoms and the 4 subsets of them
        assert_eq!(d.len(), 6);
        assert!(d.contains(&Value::empty()));
    }

    #[test]
    fn bad_bound_is_exhausted() {
        let bound = SearchBound { atoms: 0, ..Default::default() };
        let v = check_entails(&KnowledgeBase::default(), &eq("a", "a"), &bound).unwrap();
        assert!(matches!(v, Verdict::BoundExhausted(_)));
    }
}
