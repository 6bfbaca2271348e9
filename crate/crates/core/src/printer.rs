//! Canonical text form. Everything printed here parses back to the same AST.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::ast::{Assertion, Builtin, ConceptExpr, Definition, Formula, KnowledgeBase, SyntacticStructure, Term};

pub fn term(t: &Term) -> String {
    Printer::default().term(t)
}

pub fn assertion(a: &Assertion) -> String {
    Printer::default().assertion(a)
}

pub fn formula(f: &Formula) -> String {
    Printer::default().formula(f)
}

pub fn kb(kb: &KnowledgeBase) -> String {
    Printer::new(&kb.structure).kb(kb)
}

// Term precedence levels, loosest first.
const MEMBER: u8 = 0;
const UNION: u8 = 1;
const INTER: u8 = 2;
const PRODUCT: u8 = 3;
const USER: u8 = 4;
const PRIMARY: u8 = 5;

// Formula precedence levels.
const EQUIV: u8 = 0;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const ATOM: u8 = 5;

#[derive(Debug, Clone, Default)]
pub struct Printer {
    infix: BTreeSet<String>,
    binders: Vec<String>,
}

impl Printer {
    pub fn new(s: &SyntacticStructure) -> Self {
        Printer {
            infix: s
                .operators
                .values()
                .filter(|o| o.infix && o.arity() == 2)
                .map(|o| o.name.clone())
                .collect(),
            binders: Vec::new(),
        }
    }

    fn level(&self, t: &Term) -> u8 {
        match t {
            Term::Apply { op, args } if args.len() == 2 => match Builtin::from_name(op) {
                Some(Builtin::Member | Builtin::Subset) => MEMBER,
                Some(Builtin::Union) => UNION,
                Some(Builtin::Intersect | Builtin::Difference) => INTER,
                Some(Builtin::Product) => PRODUCT,
                None if self.infix.contains(op) => USER,
                _ => PRIMARY,
            },
            _ => PRIMARY,
        }
    }

    fn at(&mut self, t: &Term, min: u8) -> String {
        let s = self.term(t);
        if self.level(t) < min {
            format!("({s})")
        } else {
            s
        }
    }

    fn list(&mut self, items: &[Term]) -> String {
        items.iter().map(|t| self.term(t)).collect::<Vec<_>>().join(", ")
    }

    pub fn term(&mut self, t: &Term) -> String {
        match t {
            Term::Atomic { name } if self.binders.contains(name) => format!("{name}^0"),
            Term::Atomic { name } => name.clone(),
            Term::Literal { value } => format!("`{value}`"),
            Term::Concept { name, copy } => format!("{name}^{copy}"),
            Term::Apply { op, args } => {
                let lvl = self.level(t);
                if lvl == PRIMARY {
                    return format!("{op}({})", self.list(args));
                }
                let (l, r) = if lvl == MEMBER { (UNION, UNION) } else { (lvl, lvl + 1) };
                format!("{} {op} {}", self.at(&args[0], l), self.at(&args[1], r))
            }
            Term::Set { items } => format!("{{{}}}", self.list(items)),
            Term::Tuple { items } => format!("({})", self.list(items)),
            Term::Comprehension { concept, copy, filter } => {
                self.binders.push(concept.clone());
                let body = self.assertion(filter);
                self.binders.pop();
                format!("{{{concept}^{copy} | {body}}}")
            }
        }
    }

    pub fn assertion(&mut self, a: &Assertion) -> String {
        format!("{} = {}", self.term(&a.lhs), self.term(&a.rhs))
    }

    fn formula_level(f: &Formula) -> u8 {
        match f {
            Formula::Equiv(..) => EQUIV,
            Formula::Implies(..) => IMPLIES,
            Formula::Or(..) => OR,
            Formula::And(..) => AND,
            Formula::Not(inner) if inner.as_prim().is_none() => NOT,
            _ => ATOM,
        }
    }

    fn fat(&mut self, f: &Formula, min: u8) -> String {
        let s = self.formula(f);
        if Self::formula_level(f) < min {
            format!("({s})")
        } else {
            s
        }
    }

    pub fn formula(&mut self, f: &Formula) -> String {
        match f {
            Formula::Prim(a) => self.assertion(a),
            Formula::Not(inner) => match inner.as_prim() {
                Some(a) => format!("{} ≠ {}", self.term(&a.lhs), self.term(&a.rhs)),
                None => format!("not {}", self.fat(inner, NOT)),
            },
            Formula::And(a, b) => format!("{} and {}", self.fat(a, AND), self.fat(b, AND + 1)),
            Formula::Or(a, b) => format!("{} or {}", self.fat(a, OR), self.fat(b, OR + 1)),
            Formula::Implies(a, b) => format!("{} implies {}", self.fat(a, IMPLIES + 1), self.fat(b, IMPLIES)),
            Formula::Equiv(a, b) => format!("{} equiv {}", self.fat(a, EQUIV), self.fat(b, EQUIV + 1)),
            Formula::Multi(parts) => {
                let inner: Vec<String> = parts.iter().map(|p| self.formula(p)).collect();
                format!("multi({})", inner.join(", "))
            }
            Formula::Forall(c, body) | Formula::Exists(c, body) => {
                let kw = if matches!(f, Formula::Forall(..)) { "forall" } else { "exists" };
                self.binders.push(c.clone());
                let b = self.formula(body);
                self.binders.pop();
                format!("{kw}({c}, {b})")
            }
        }
    }

    fn expr_level(e: &ConceptExpr) -> u8 {
        match e {
            ConceptExpr::Union(..) => UNION,
            ConceptExpr::Intersect(..) | ConceptExpr::Difference(..) => INTER,
            ConceptExpr::Product(..) => PRODUCT,
            _ => PRIMARY,
        }
    }

    fn eat(&mut self, e: &ConceptExpr, min: u8) -> String {
        let s = self.expr(e);
        if Self::expr_level(e) < min {
            format!("({s})")
        } else {
            s
        }
    }

    pub fn expr(&mut self, e: &ConceptExpr) -> String {
        let lvl = Self::expr_level(e);
        match e {
            ConceptExpr::Concept(c) => c.clone(),
            ConceptExpr::Enum(items) => format!("{{{}}}", self.list(items)),
            ConceptExpr::Union(a, b) => format!("{} ∪ {}", self.eat(a, lvl), self.eat(b, lvl + 1)),
            ConceptExpr::Intersect(a, b) => format!("{} ∩ {}", self.eat(a, lvl), self.eat(b, lvl + 1)),
            ConceptExpr::Difference(a, b) => format!("{} ∖ {}", self.eat(a, lvl), self.eat(b, lvl + 1)),
            ConceptExpr::Product(a, b) => format!("{} × {}", self.eat(a, lvl), self.eat(b, lvl + 1)),
            ConceptExpr::PowerSet(a) => format!("pow({})", self.expr(a)),
            ConceptExpr::Image { operator, source } => format!("{operator}({})", self.expr(source)),
        }
    }

    /// One `def` statement without the trailing semicolon. The kind keyword
    /// is emitted when the structure does not already fix it.
    pub fn definition(&mut self, d: &Definition, s: &SyntacticStructure) -> String {
        let target = d.target();
        let head = |kind: &str, declared: bool| {
            if declared {
                format!("def {target} ::=")
            } else {
                format!("def {kind} {target} ::=")
            }
        };
        match d {
            Definition::IndividualDef { body, .. } => {
                let h = head("individual", s.individuals.contains(target));
                format!("{h} {}", self.term(body))
            }
            Definition::OperatorDef { params, body, .. } => {
                let ps: Vec<String> = params.iter().map(|p| format!("{}^{}", p.concept, p.copy)).collect();
                let saved = self.binders.len();
                self.binders.extend(params.iter().map(|p| p.concept.clone()));
                let b = self.term(body);
                self.binders.truncate(saved);
                format!("def {target}({}) ::= {b}", ps.join(", "))
            }
            Definition::ConceptEnum { members, .. } => {
                let h = head("concept", s.is_concept(target));
                format!("{h} {{{}}}", self.list(members))
            }
            Definition::ConceptOp { expr, .. } => {
                let h = head("concept", s.is_concept(target));
                format!("{h} {}", self.expr(expr))
            }
            Definition::ConceptComprehension { source, filter, .. } => {
                let h = head("concept", s.is_concept(target));
                self.binders.push(source.clone());
                let f = self.assertion(filter);
                self.binders.pop();
                format!("{h} {source} | {f}")
            }
            Definition::ConceptReplacement { operator, source, .. } => {
                let h = head("concept", s.is_concept(target));
                format!("{h} {operator}({})", self.expr(source))
            }
        }
    }

    pub fn kb(&mut self, kb: &KnowledgeBase) -> String {
        let s = &kb.structure;
        let mut out = String::new();
        let names = |set: &BTreeSet<String>| set.iter().cloned().collect::<Vec<_>>().join(", ");
        if !s.individuals.is_empty() {
            let _ = writeln!(out, "individual {};", names(&s.individuals));
        }
        if !s.concepts.is_empty() {
            let _ = writeln!(out, "concept {};", names(&s.concepts));
        }
        for op in s.operators.values() {
            let infix = if op.infix { "infix " } else { "" };
            let range = op.declared_range.as_ref().map(|r| format!(" : {r}")).unwrap_or_default();
            let _ = writeln!(out, "op {infix}{}({}){range};", op.name, op.domain.join(", "));
        }
        let section = |out: &mut String, lines: Vec<String>| {
            if !lines.is_empty() {
                if !out.is_empty() {
                    out.push('\n');
                }
                for l in lines {
                    let _ = writeln!(out, "{l};");
                }
            }
        };
        let defs = kb.definitions.iter().map(|d| self.definition(d, s)).collect();
        section(&mut out, defs);
        let mut asserts: Vec<String> = kb.assertions.iter().map(|f| format!("assert {}", self.formula(f))).collect();
        asserts.extend(kb.schema_assertions.iter().map(|a| format!("assert {}", self.assertion(a))));
        section(&mut out, asserts);
        out
    }
}
