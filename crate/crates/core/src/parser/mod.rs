//! Parser for the `.skr` knowledge-base language.
//!
//! A file is a sequence of `;`-terminated statements. Declarations are read
//! in a first pass so later statements may use operators declared below them.

pub mod lexer;

use std::collections::BTreeSet;
use std::str::FromStr;

use crate::ast::{
    Assertion, Builtin, ConceptCopy, ConceptExpr, Definition, Formula, KnowledgeBase, OperatorSig, SyntacticStructure,
    Term, BOOL, EMPTY,
};
use crate::desugar::lower_formula;
use crate::diagnostics::{Diagnostic, SourceSpan};
use crate::hfset::{Value, BOTTOM, TOP};
use lexer::{lex, Tk, Token};

type PResult<T> = Result<T, Diagnostic>;

const KEYWORDS: &[&str] = &[
    "individual",
    "concept",
    "op",
    "def",
    "assert",
    "infix",
    "not",
    "and",
    "or",
    "implies",
    "equiv",
    "forall",
    "exists",
    "multi",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Parses a whole knowledge base. All syntax errors are reported, one per
/// failing statement at most.
pub fn parse_kb(src: &str, file: &str) -> Result<KnowledgeBase, Vec<Diagnostic>> {
    let (toks, mut diags) = lex(src, file);
    let mut stmts = Vec::new();
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        if t.is(";") {
            if i > start {
                stmts.push((start, i));
            }
            start = i + 1;
        } else if t.tk == Tk::Eof && i > start {
            diags.push(Diagnostic::error("expected `;` at end of statement", span_of(file, t)));
            stmts.push((start, i));
        }
    }

    let mut kb = KnowledgeBase::default();
    let is_decl = |s: usize| ["individual", "concept", "op"].iter().any(|w| toks[s].is_word(w));
    for &(s, e) in stmts.iter().filter(|(s, _)| is_decl(*s)) {
        let empty = BTreeSet::new();
        let mut p = Parser::new(&toks, s, e, file, &empty);
        if let Err(d) = p.declaration(&mut kb).and_then(|_| p.finish()) {
            diags.push(d);
        }
    }
    let infix: BTreeSet<String> = kb
        .structure
        .operators
        .values()
        .filter(|o| o.infix)
        .map(|o| o.name.clone())
        .collect();
    let mut concept_defs = BTreeSet::new();
    let mut individual_defs = BTreeSet::new();
    for &(s, e) in stmts.iter().filter(|(s, _)| !is_decl(*s)) {
        let mut p = Parser::new(&toks, s, e, file, &infix);
        let span = p.statement_span();
        let res = if toks[s].is_word("def") {
            p.definition(&kb.structure, &concept_defs, &individual_defs).and_then(|d| p.finish().map(|_| d)).map(|d| {
                if d.defines_concept() {
                    concept_defs.insert(d.target().to_string());
                } else {
                    individual_defs.insert(d.target().to_string());
                }
                kb.definitions.push(d);
                kb.source_map.definitions.push(span);
            })
        } else {
            if toks[s].is_word("assert") {
                p.pos += 1;
            }
            p.formula().and_then(|f| p.finish().map(|_| f)).map(|f| match f {
                Formula::Prim(a) if !a.is_ground() => {
                    kb.schema_assertions.push(a);
                    kb.source_map.schema_assertions.push(span);
                }
                f => {
                    kb.assertions.push(f);
                    kb.source_map.assertions.push(span);
                }
            })
        };
        if let Err(d) = res {
            diags.push(d);
        }
    }
    if diags.iter().any(Diagnostic::is_error) {
        diags.sort_by_key(|d| (d.span.line, d.span.column));
        Err(diags)
    } else {
        Ok(kb)
    }
}

fn single<T>(src: &str, s: &SyntacticStructure, f: impl FnOnce(&mut Parser) -> PResult<T>) -> Result<T, Vec<Diagnostic>> {
    let file = "<input>";
    let (toks, diags) = lex(src, file);
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut end = toks.len() - 1;
    if end > 0 && toks[end - 1].is(";") {
        end -= 1;
    }
    let infix = s.operators.values().filter(|o| o.infix).map(|o| o.name.clone()).collect();
    let mut p = Parser::new(&toks, 0, end, file, &infix);
    f(&mut p).and_then(|x| p.finish().map(|_| x)).map_err(|d| vec![d])
}

pub fn parse_formula(src: &str, s: &SyntacticStructure) -> Result<Formula, Vec<Diagnostic>> {
    single(src, s, |p| p.formula())
}

/// Parses one formula and lowers it to a single assertion.
pub fn parse_assertion(src: &str, s: &SyntacticStructure) -> Result<Assertion, Vec<Diagnostic>> {
    parse_formula(src, s).map(|f| into_assertion(&f))
}

pub fn parse_term(src: &str, s: &SyntacticStructure) -> Result<Term, Vec<Diagnostic>> {
    single(src, s, |p| p.term())
}

fn into_assertion(f: &Formula) -> Assertion {
    match f {
        Formula::Prim(a) => a.clone(),
        other => lower_formula(other),
    }
}

fn span_of(file: &str, t: &Token) -> SourceSpan {
    SourceSpan::new(file, t.line, t.col, t.len)
}

fn later(a: Diagnostic, b: Diagnostic) -> Diagnostic {
    if (b.span.line, b.span.column) > (a.span.line, a.span.column) {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DefKind {
    Individual,
    Concept,
    Infer,
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    start: usize,
    end: usize,
    file: &'a str,
    infix: &'a BTreeSet<String>,
    binders: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], start: usize, end: usize, file: &'a str, infix: &'a BTreeSet<String>) -> Self {
        Parser {
            toks,
            pos: start,
            start,
            end,
            file,
            infix,
            binders: Vec::new(),
        }
    }

    fn peek(&self) -> &'a Token {
        self.peek_at(0)
    }

    fn peek_at(&self, k: usize) -> &'a Token {
        let i = self.pos + k;
        if i < self.end {
            &self.toks[i]
        } else {
            &self.toks[self.end]
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.end
    }

    fn bump(&mut self) -> &'a Token {
        let t = self.peek();
        if !self.at_end() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, t: &Token, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(msg, span_of(self.file, t))
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        let t = self.peek();
        let found = if self.at_end() && t.tk != Tk::Eof {
            "end of statement".to_string()
        } else {
            format!("`{}`", t.text())
        };
        self.err(t, format!("expected {what}, found {found}"))
    }

    fn eat(&mut self, p: &str) -> bool {
        if !self.at_end() && self.peek().is(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if !self.at_end() && self.peek().is_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    fn finish(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of statement"))
        }
    }

    fn statement_span(&self) -> SourceSpan {
        let first = &self.toks[self.start];
        let last = &self.toks[self.end.max(self.start + 1) - 1];
        let len = if last.line == first.line {
            last.col + last.len - first.col
        } else {
            first.len
        };
        SourceSpan::new(self.file, first.line, first.col, len)
    }

    /// An identifier that is not a keyword, or an operator symbol.
    fn name(&mut self, what: &str) -> PResult<String> {
        if self.at_end() {
            return Err(self.unexpected(what));
        }
        match &self.peek().tk {
            Tk::Ident(s) if !is_keyword(s) => {
                self.pos += 1;
                Ok(s.clone())
            }
            Tk::Sym(s) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match &self.peek().tk {
            Tk::Ident(_) => self.name(what),
            _ => Err(self.unexpected(what)),
        }
    }

    fn copy(&mut self) -> PResult<Option<u32>> {
        if self.at_end() {
            return Ok(None);
        }
        match &self.peek().tk {
            Tk::Sup(n) => {
                self.pos += 1;
                Ok(Some(*n))
            }
            Tk::P("^") => {
                self.pos += 1;
                let t = self.peek();
                match &t.tk {
                    Tk::Ident(s) if !self.at_end() => match s.parse::<u32>() {
                        Ok(n) => {
                            self.pos += 1;
                            Ok(Some(n))
                        }
                        Err(_) => Err(self.err(t, format!("copy index must be a number, found `{s}`"))),
                    },
                    _ => Err(self.unexpected("a copy index")),
                }
            }
            _ => Ok(None),
        }
    }

    fn comma_list<T>(&mut self, close: &str, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    // ---- declarations

    fn declaration(&mut self, kb: &mut KnowledgeBase) -> PResult<()> {
        let kw = self.bump().text();
        if kw == "op" {
            let infix = self.eat_word("infix");
            let tok = self.peek();
            let name = self.name("an operator name")?;
            self.expect("(")?;
            let domain = self.comma_list(")", |p| p.ident("a concept name"))?;
            let mut sig = OperatorSig::new(name.clone(), domain);
            sig.infix = infix;
            if self.eat(":") || self.eat("→") {
                let range = self.ident("a range concept")?;
                sig = sig.with_range(range);
            }
            kb.structure.add_operator(sig);
            kb.source_map.declarations.insert(name, span_of(self.file, tok));
            return Ok(());
        }
        loop {
            let tok = self.peek();
            let name = self.ident(&format!("{kw} name"))?;
            if kw == "individual" {
                kb.structure.add_individual(name.clone());
            } else {
                kb.structure.add_concept(name.clone());
            }
            kb.source_map.declarations.insert(name, span_of(self.file, tok));
            if !self.eat(",") {
                return Ok(());
            }
        }
    }

    // ---- definitions

    fn definition(
        &mut self,
        s: &SyntacticStructure,
        concept_defs: &BTreeSet<String>,
        individual_defs: &BTreeSet<String>,
    ) -> PResult<Definition> {
        self.bump();
        let explicit = if self.eat_word("individual") {
            Some(DefKind::Individual)
        } else if self.eat_word("concept") {
            Some(DefKind::Concept)
        } else {
            None
        };
        let target = self.name("a definition target")?;
        if explicit.is_none() && self.peek().is("(") && !self.at_end() {
            self.bump();
            let params = self.comma_list(")", |p| {
                let c = p.ident("a parameter concept")?;
                let copy = p.copy()?.unwrap_or(1);
                Ok(ConceptCopy::new(c, copy))
            })?;
            self.expect("::=")?;
            self.binders.extend(params.iter().map(|p| p.concept.clone()));
            let body = self.term()?;
            return Ok(Definition::OperatorDef { target, params, body });
        }
        self.expect("::=")?;
        let kind = explicit.unwrap_or(if s.individuals.contains(&target) {
            DefKind::Individual
        } else if s.is_concept(&target) || concept_defs.contains(&target) {
            DefKind::Concept
        } else {
            DefKind::Infer
        });
        match kind {
            DefKind::Individual => Ok(Definition::IndividualDef {
                target,
                body: self.term()?,
            }),
            DefKind::Concept => self.concept_body(target),
            DefKind::Infer => {
                let save = self.pos;
                // A concept body is taken when every leaf is a known concept,
                // or, for image-free bodies, when no leaf is a known individual.
                let concept = |c: &str| c == target || s.is_concept(c) || concept_defs.contains(c);
                let individual = |c: &str| s.individuals.contains(c) || individual_defs.contains(c);
                if let Ok(d) = self.concept_body(target.clone()) {
                    let leaves = concept_leaves(&d);
                    let plain = !d.is_replacement() && !leaves.iter().any(|c| individual(c));
                    if self.at_end() && (leaves.iter().all(|c| concept(c)) || plain) {
                        return Ok(d);
                    }
                }
                self.pos = save;
                Ok(Definition::IndividualDef {
                    target,
                    body: self.term()?,
                })
            }
        }
    }

    fn concept_body(&mut self, target: String) -> PResult<Definition> {
        let e = self.c_union()?;
        if !self.at_end() && self.peek().is("|") {
            let ConceptExpr::Concept(source) = e else {
                return Err(self.err(self.peek(), "a comprehension source must be a single concept name"));
            };
            self.bump();
            self.binders.push(source.clone());
            let f = self.formula()?;
            self.binders.pop();
            return Ok(Definition::ConceptComprehension {
                target,
                source,
                filter: into_assertion(&f),
            });
        }
        Ok(match e {
            ConceptExpr::Enum(members) => Definition::ConceptEnum { target, members },
            ConceptExpr::Image { operator, source } => Definition::ConceptReplacement {
                target,
                operator,
                source: *source,
            },
            expr => Definition::ConceptOp { target, expr },
        })
    }

    fn c_union(&mut self) -> PResult<ConceptExpr> {
        let mut l = self.c_inter()?;
        while self.eat("∪") {
            l = ConceptExpr::union(l, self.c_inter()?);
        }
        Ok(l)
    }

    fn c_inter(&mut self) -> PResult<ConceptExpr> {
        let mut l = self.c_prod()?;
        loop {
            if self.eat("∩") {
                l = ConceptExpr::intersect(l, self.c_prod()?);
            } else if self.eat("∖") {
                l = ConceptExpr::difference(l, self.c_prod()?);
            } else {
                return Ok(l);
            }
        }
    }

    fn c_prod(&mut self) -> PResult<ConceptExpr> {
        let mut l = self.c_prim()?;
        while self.eat("×") || self.eat_word("x") {
            l = ConceptExpr::Product(Box::new(l), Box::new(self.c_prim()?));
        }
        Ok(l)
    }

    fn c_prim(&mut self) -> PResult<ConceptExpr> {
        if self.eat("(") {
            let e = self.c_union()?;
            self.expect(")")?;
            return Ok(e);
        }
        if self.eat("{") {
            let items = self.comma_list("}", |p| p.term())?;
            return Ok(ConceptExpr::Enum(items));
        }
        if !self.at_end() && self.peek().is_word("pow") && self.peek_at(1).is("(") {
            self.pos += 2;
            let e = self.c_union()?;
            self.expect(")")?;
            return Ok(ConceptExpr::PowerSet(Box::new(e)));
        }
        let name = self.name("a concept expression")?;
        if self.eat("(") {
            let source = self.c_union()?;
            self.expect(")")?;
            return Ok(ConceptExpr::image(name, source));
        }
        Ok(ConceptExpr::Concept(name))
    }

    // ---- formulas

    fn formula(&mut self) -> PResult<Formula> {
        let mut l = self.f_implies()?;
        while self.eat("≡") || self.eat_word("equiv") {
            l = Formula::equiv(l, self.f_implies()?);
        }
        Ok(l)
    }

    fn f_implies(&mut self) -> PResult<Formula> {
        let l = self.f_or()?;
        if self.eat("→") || self.eat_word("implies") {
            return Ok(Formula::implies(l, self.f_implies()?));
        }
        Ok(l)
    }

    fn f_or(&mut self) -> PResult<Formula> {
        let mut l = self.f_and()?;
        while self.eat("∨") || self.eat_word("or") {
            l = Formula::or(l, self.f_and()?);
        }
        Ok(l)
    }

    fn f_and(&mut self) -> PResult<Formula> {
        let mut l = self.f_not()?;
        while self.eat("∧") || self.eat_word("and") {
            l = Formula::and(l, self.f_not()?);
        }
        Ok(l)
    }

    fn f_not(&mut self) -> PResult<Formula> {
        if self.eat("¬") || self.eat_word("not") {
            return Ok(Formula::not(self.f_not()?));
        }
        self.f_atom()
    }

    fn f_atom(&mut self) -> PResult<Formula> {
        let t = self.peek();
        let opens = self.peek_at(1).is("(");
        if opens && (t.is("∀") || t.is_word("forall") || t.is("∃") || t.is_word("exists")) {
            let universal = t.is("∀") || t.is_word("forall");
            self.pos += 2;
            let c = self.ident("the quantified concept")?;
            self.expect(",")?;
            self.binders.push(c.clone());
            let body = self.formula()?;
            self.binders.pop();
            self.expect(")")?;
            return Ok(if universal {
                Formula::forall(c, body)
            } else {
                Formula::exists(c, body)
            });
        }
        if opens && t.is_word("multi") {
            self.pos += 2;
            let parts = self.comma_list(")", |p| p.formula())?;
            return Ok(Formula::Multi(parts));
        }
        let save = self.pos;
        match self.prim_assertion() {
            Ok(f) => Ok(f),
            Err(e) if t.is("(") => {
                self.pos = save + 1;
                let inner = self.formula().and_then(|f| self.expect(")").map(|_| f));
                inner.map_err(|e2| later(e, e2))
            }
            Err(e) => Err(e),
        }
    }

    fn prim_assertion(&mut self) -> PResult<Formula> {
        let l = self.term()?;
        if self.eat("=") {
            return Ok(Formula::prim(l, self.term()?));
        }
        if self.eat("≠") {
            return Ok(Formula::not(Formula::prim(l, self.term()?)));
        }
        // A bare term asserts that it is true.
        Ok(Formula::prim(l, Term::top()))
    }

    // ---- terms

    fn term(&mut self) -> PResult<Term> {
        let l = self.t_union()?;
        let op = if self.eat("∈") || self.eat_word("in") {
            Builtin::Member
        } else if self.eat("⊆") || self.eat_word("subseteq") {
            Builtin::Subset
        } else {
            return Ok(l);
        };
        Ok(Term::builtin(op, vec![l, self.t_union()?]))
    }

    fn t_union(&mut self) -> PResult<Term> {
        let mut l = self.t_inter()?;
        while self.eat("∪") {
            l = Term::builtin(Builtin::Union, vec![l, self.t_inter()?]);
        }
        Ok(l)
    }

    fn t_inter(&mut self) -> PResult<Term> {
        let mut l = self.t_prod()?;
        loop {
            let op = if self.eat("∩") {
                Builtin::Intersect
            } else if self.eat("∖") {
                Builtin::Difference
            } else {
                return Ok(l);
            };
            l = Term::builtin(op, vec![l, self.t_prod()?]);
        }
    }

    fn t_prod(&mut self) -> PResult<Term> {
        let mut l = self.t_user()?;
        while self.eat("×") || (!self.infix.contains("x") && self.eat_word("x")) {
            l = Term::builtin(Builtin::Product, vec![l, self.t_user()?]);
        }
        Ok(l)
    }

    fn t_user(&mut self) -> PResult<Term> {
        let mut l = self.t_post()?;
        loop {
            let op = match &self.peek().tk {
                Tk::Ident(s) | Tk::Sym(s) if !self.at_end() && self.infix.contains(s) => s.clone(),
                _ => return Ok(l),
            };
            self.pos += 1;
            l = Term::apply(op, vec![l, self.t_post()?]);
        }
    }

    fn t_post(&mut self) -> PResult<Term> {
        let mut t = self.t_prim()?;
        while self.eat(".") {
            let op = self.name("an operator name after `.`")?;
            t = Term::apply(op, vec![t]);
        }
        Ok(t)
    }

    fn t_prim(&mut self) -> PResult<Term> {
        if self.at_end() {
            return Err(self.unexpected("a term"));
        }
        let t = self.peek();
        match &t.tk {
            Tk::Lit(s) => {
                self.pos += 1;
                Value::from_str(s)
                    .map(Term::literal)
                    .map_err(|e| self.err(t, format!("bad literal: {e}")))
            }
            Tk::P(p @ ("∅" | "⊤" | "⊥")) => {
                self.pos += 1;
                Ok(Term::atomic(match *p {
                    "∅" => EMPTY,
                    "⊤" => TOP,
                    _ => BOTTOM,
                }))
            }
            Tk::P("{") => self.braces(),
            Tk::P("(") => {
                self.pos += 1;
                let items = self.comma_list(")", |p| p.term())?;
                if items.is_empty() {
                    return Err(self.err(t, "empty tuple"));
                }
                Ok(Term::tuple(items))
            }
            Tk::P(p) if Builtin::from_name(p).is_some() && self.peek_at(1).is("(") => {
                self.pos += 2;
                let args = self.comma_list(")", |p| p.term())?;
                Ok(Term::apply(*p, args))
            }
            Tk::Ident(_) | Tk::Sym(_) => {
                let name = self.name("a term")?;
                let copy = self.copy()?;
                if copy.is_none() && self.eat("(") {
                    let args = self.comma_list(")", |p| p.term())?;
                    return Ok(Term::apply(name, args));
                }
                if matches!(t.tk, Tk::Sym(_)) {
                    return Err(self.err(t, format!("operator `{name}` needs arguments")));
                }
                Ok(match copy {
                    Some(0) => Term::atomic(name),
                    Some(k) => Term::var(name, k),
                    None if self.binders.contains(&name) => Term::var(name, 1),
                    None => Term::atomic(name),
                })
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn braces(&mut self) -> PResult<Term> {
        let open = self.bump();
        if self.eat("}") {
            return Ok(Term::set(Vec::new()));
        }
        let first = self.term()?;
        if !self.at_end() && self.peek().is("|") {
            let (concept, copy) = match first {
                Term::Atomic { name } => (name, 1),
                Term::Concept { name, copy } => (name, copy),
                _ => return Err(self.err(open, "comprehension must start with a concept name")),
            };
            self.bump();
            self.binders.push(concept.clone());
            let f = self.formula()?;
            self.binders.pop();
            self.expect("}")?;
            return Ok(Term::comprehension(concept, copy, into_assertion(&f)));
        }
        let mut items = vec![first];
        while self.eat(",") {
            items.push(self.term()?);
        }
        self.expect("}")?;
        Ok(Term::set(items))
    }
}

fn concept_leaves(d: &Definition) -> Vec<String> {
    fn walk(e: &ConceptExpr, out: &mut Vec<String>) {
        match e {
            ConceptExpr::Concept(c) => out.push(c.clone()),
            ConceptExpr::Enum(_) => {}
            ConceptExpr::PowerSet(a) | ConceptExpr::Image { source: a, .. } => walk(a, out),
            ConceptExpr::Union(a, b)
            | ConceptExpr::Intersect(a, b)
            | ConceptExpr::Difference(a, b)
            | ConceptExpr::Product(a, b) => {
                walk(a, out);
                walk(b, out);
            }
        }
    }
    let mut out = Vec::new();
    match d {
        Definition::ConceptOp { expr, .. } => walk(expr, &mut out),
        Definition::ConceptReplacement { source, .. } => walk(source, &mut out),
        Definition::ConceptComprehension { source, .. } => out.push(source.clone()),
        _ => {}
    }
    out.retain(|c| c != BOOL);
    out
}
