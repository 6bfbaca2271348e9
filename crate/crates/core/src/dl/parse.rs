use crate::diagnostics::{Diagnostic, SourceSpan};
use crate::parser::lexer::{lex, Tk, Token};

use super::{DlAxiom, DlExpr, DlKb, Role};

type PResult<T> = Result<T, Diagnostic>;

const WORDS: &[&str] = &[
    "individual", "concept", "role", "and", "or", "not", "some", "only", "atleast", "inv", "top", "bottom", "Thing",
    "Nothing",
];

/// Parses the `.dl` text format:
///
/// ```text
/// individual ann, bob;  concept Person;  role hasChild;
/// ann : Person and some hasChild. top;
/// (ann, bob) : hasChild;
/// Parent == Person and some hasChild. Person;
/// Parent [= Person;
/// ```
pub fn parse_dl(src: &str, file: &str) -> Result<DlKb, Vec<Diagnostic>> {
    let (toks, mut diags) = lex(src, file);
    let mut kb = DlKb::default();
    let mut start = 0;
    let mut stmts = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        let end = t.is(";") || t.tk == Tk::Eof;
        if end && i > start {
            if t.tk == Tk::Eof {
                diags.push(Diagnostic::error(
                    "expected `;` at end of statement",
                    SourceSpan::new(file, t.line, t.col, 0),
                ));
            }
            stmts.push((start, i));
        }
        if end {
            start = i + 1;
        }
    }
    for (s, e) in stmts {
        let mut p = P {
            toks: &toks,
            pos: s,
            end: e,
            file,
        };
        match p.statement(&mut kb).and_then(|_| p.finish()) {
            Ok(()) => {}
            Err(d) => diags.push(d),
        }
    }
    if diags.is_empty() {
        Ok(kb)
    } else {
        Err(diags)
    }
}

struct P<'a> {
    toks: &'a [Token],
    pos: usize,
    end: usize,
    file: &'a str,
}

impl<'a> P<'a> {
    fn peek_at(&self, k: usize) -> &'a Token {
        &self.toks[(self.pos + k).min(self.end)]
    }

    fn peek(&self) -> &'a Token {
        self.peek_at(0)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.end
    }

    fn err(&self, what: &str) -> Diagnostic {
        let t = self.peek();
        let found = if self.at_end() {
            "end of statement".to_string()
        } else {
            format!("`{}`", t.text())
        };
        Diagnostic::error(format!("expected {what}, found {found}"), SourceSpan::new(self.file, t.line, t.col, t.len))
    }

    fn eat(&mut self, p: &str) -> bool {
        if !self.at_end() && self.peek().is(p) {
            self.pos += 1;
            return true;
        }
        false
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if !self.at_end() && self.peek().is_word(w) {
            self.pos += 1;
            return true;
        }
        false
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.err(&format!("`{p}`")))
        }
    }

    fn finish(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("end of statement"))
        }
    }

    fn name(&mut self) -> PResult<String> {
        match &self.peek().tk {
            Tk::Ident(s) if !self.at_end() && !WORDS.contains(&s.as_str()) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.err("a name")),
        }
    }

    fn names(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.name()?];
        while self.eat(",") {
            out.push(self.name()?);
        }
        Ok(out)
    }

    fn statement(&mut self, kb: &mut DlKb) -> PResult<()> {
        if self.eat_word("individual") {
            kb.individuals.extend(self.names()?);
            return Ok(());
        }
        if self.eat_word("concept") {
            kb.concepts.extend(self.names()?);
            return Ok(());
        }
        if self.eat_word("role") {
            kb.roles.extend(self.names()?);
            return Ok(());
        }
        if self.peek().is("(") && self.peek_at(2).is(",") {
            self.pos += 1;
            let a = self.name()?;
            self.expect(",")?;
            let b = self.name()?;
            self.expect(")")?;
            self.expect(":")?;
            let r = self.role()?;
            kb.axioms.push(DlAxiom::Related(a, b, r));
            return Ok(());
        }
        if self.peek_at(1).is(":") {
            let a = self.name()?;
            self.pos += 1;
            let c = self.expr()?;
            kb.axioms.push(DlAxiom::Instance(a, c));
            return Ok(());
        }
        let lhs = self.expr()?;
        if self.eat("[=") {
            let rhs = self.expr()?;
            kb.axioms.push(DlAxiom::Subsumption(lhs, rhs));
        } else if self.eat("==") {
            let rhs = self.expr()?;
            let ax = match (&lhs, &rhs) {
                (DlExpr::Atomic(a), DlExpr::Atomic(b)) if kb.individuals.contains(a) && kb.individuals.contains(b) => {
                    DlAxiom::SameAs(a.clone(), b.clone())
                }
                _ => DlAxiom::Equivalence(lhs, rhs),
            };
            kb.axioms.push(ax);
        } else {
            return Err(self.err("`[=` or `==`"));
        }
        Ok(())
    }

    fn role(&mut self) -> PResult<Role> {
        if self.eat_word("inv") {
            self.expect("(")?;
            let r = self.name()?;
            self.expect(")")?;
            return Ok(Role::Inverse(r));
        }
        Ok(Role::Named(self.name()?))
    }

    fn expr(&mut self) -> PResult<DlExpr> {
        let mut l = self.conj()?;
        while self.eat_word("or") {
            l = DlExpr::or(l, self.conj()?);
        }
        Ok(l)
    }

    fn conj(&mut self) -> PResult<DlExpr> {
        let mut l = self.unary()?;
        while self.eat_word("and") {
            l = DlExpr::and(l, self.unary()?);
        }
        Ok(l)
    }

    fn restriction(&mut self) -> PResult<(Role, DlExpr)> {
        let r = self.role()?;
        self.expect(".")?;
        Ok((r, self.unary()?))
    }

    fn unary(&mut self) -> PResult<DlExpr> {
        if self.eat_word("not") || self.eat("¬") {
            return Ok(DlExpr::not(self.unary()?));
        }
        if self.eat_word("some") || self.eat("∃") {
            let (r, c) = self.restriction()?;
            return Ok(DlExpr::exists(r, c));
        }
        if self.eat_word("only") || self.eat("∀") {
            let (r, c) = self.restriction()?;
            return Ok(DlExpr::forall(r, c));
        }
        if self.eat_word("atleast") {
            let n = match &self.peek().tk {
                Tk::Ident(s) if !self.at_end() => s.parse::<u32>().map_err(|_| self.err("a number"))?,
                _ => return Err(self.err("a number")),
            };
            self.pos += 1;
            let (r, c) = self.restriction()?;
            return Ok(DlExpr::at_least(n, r, c));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<DlExpr> {
        if self.eat_word("top") || self.eat_word("Thing") || self.eat("⊤") {
            return Ok(DlExpr::Top);
        }
        if self.eat_word("bottom") || self.eat_word("Nothing") || self.eat("⊥") {
            return Ok(DlExpr::Bottom);
        }
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        if self.eat("{") {
            let xs = self.names()?;
            self.expect("}")?;
            return Ok(DlExpr::OneOf(xs));
        }
        Ok(DlExpr::Atomic(self.name()?))
    }
}
