use proptest::prelude::*;
use proptest::sample::select;
use setkr::ast::{Builtin, ConceptCopy, OperatorSig, Term};
use setkr::dl::parse_dl;
use setkr::printer::{self, Printer};
use setkr::{parse_formula, parse_kb, parse_term, Assertion, ConceptExpr, Definition, Formula, KnowledgeBase, SyntacticStructure, Value};

fn structure() -> SyntacticStructure {
    let mut s = SyntacticStructure::default();
    for i in ["a", "b", "c"] {
        s.add_individual(i);
    }
    for c in ["C", "D"] {
        s.add_concept(c);
    }
    s.add_operator(OperatorSig::new("f", vec!["C".into()]));
    s.add_operator(OperatorSig::new("g", vec!["C".into(), "D".into()]));
    s.add_operator(OperatorSig::new("p", vec!["C".into()]).with_range("Bool"));
    let mut plus = OperatorSig::new("+", vec!["C".into(), "C".into()]);
    plus.infix = true;
    s.add_operator(plus);
    s
}

fn value() -> impl Strategy<Value = Value> {
    prop_oneof![
        (0usize..4).prop_map(Value::ordinal),
        select(vec!["x", "y"]).prop_map(Value::atom),
        (0usize..3, select(vec!["x", "y"])).prop_map(|(n, a)| Value::pair(Value::ordinal(n), Value::atom(a))),
    ]
}

fn leaf() -> impl Strategy<Value = Term> {
    prop_oneof![
        select(vec!["a", "b", "c", "C", "D", "∅", "⊤", "⊥"]).prop_map(Term::atomic),
        (select(vec!["C", "D"]), 1u32..4).prop_map(|(c, k)| Term::var(c, k)),
        value().prop_map(Term::literal),
    ]
}

fn term() -> impl Strategy<Value = Term> {
    leaf().prop_recursive(5, 48, 3, |t| {
        let builtin = select(Builtin::ALL.to_vec());
        prop_oneof![
            t.clone().prop_map(|x| Term::apply("f", vec![x])),
            t.clone().prop_map(|x| Term::apply("p", vec![x])),
            (t.clone(), t.clone()).prop_map(|(x, y)| Term::apply("g", vec![x, y])),
            (t.clone(), t.clone()).prop_map(|(x, y)| Term::apply("+", vec![x, y])),
            (builtin, t.clone(), t.clone()).prop_map(|(b, x, y)| {
                let args = if b.arity() == 1 { vec![x] } else { vec![x, y] };
                Term::builtin(b, args)
            }),
            prop::collection::vec(t.clone(), 0..3).prop_map(Term::set),
            prop::collection::vec(t.clone(), 2..4).prop_map(Term::tuple),
            (select(vec!["C", "D"]), 1u32..3, t.clone(), t).prop_map(|(c, k, x, y)| {
                Term::comprehension(c, k, Assertion::new(x, y))
            }),
        ]
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let prim = prop_oneof![
        (term(), term()).prop_map(|(l, r)| Formula::prim(l, r)),
        term().prop_map(|l| Formula::prim(l, Term::top())),
    ];
    prim.prop_recursive(4, 24, 3, |f| {
        prop_oneof![
            f.clone().prop_map(Formula::not),
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::equiv(a, b)),
            (select(vec!["C", "D"]), f.clone()).prop_map(|(c, b)| Formula::forall(c, b)),
            (select(vec!["C", "D"]), f.clone()).prop_map(|(c, b)| Formula::exists(c, b)),
            prop::collection::vec(f, 2..4).prop_map(Formula::Multi),
        ]
    })
}

fn ground(t: Term) -> Term {
    t.substitute(&|v| Some(Term::atomic(if v.concept == "C" { "a" } else { "b" })))
}

fn concept_expr() -> impl Strategy<Value = ConceptExpr> {
    let leaf = select(vec!["C", "D"]).prop_map(ConceptExpr::concept);
    let inner = leaf.prop_recursive(3, 12, 2, |e| {
        prop_oneof![
            (e.clone(), e.clone()).prop_map(|(a, b)| ConceptExpr::union(a, b)),
            (e.clone(), e.clone()).prop_map(|(a, b)| ConceptExpr::intersect(a, b)),
            (e.clone(), e.clone()).prop_map(|(a, b)| ConceptExpr::difference(a, b)),
            (e.clone(), e.clone()).prop_map(|(a, b)| ConceptExpr::Product(Box::new(a), Box::new(b))),
            e.clone().prop_map(|a| ConceptExpr::PowerSet(Box::new(a))),
            e.prop_map(|a| ConceptExpr::image("f", a)),
        ]
    });
    // an image at the top is a replacement definition
    inner.prop_filter("no top-level image", |e| !matches!(e, ConceptExpr::Image { .. }))
}

fn definition(k: usize) -> impl Strategy<Value = Definition> {
    let t = format!("T{k}");
    let (t1, t2, t3, t4, t5) = (t.clone(), t.clone(), t.clone(), t.clone(), t.clone());
    prop_oneof![
        term().prop_map(move |b| Definition::IndividualDef { target: format!("v{k}"), body: ground(b) }),
        (select(vec!["C", "D"]), term()).prop_map(move |(c, b)| Definition::OperatorDef {
            target: format!("h{k}"),
            params: vec![ConceptCopy::new(c, 1)],
            body: b.substitute(&|v| (v.concept != c).then(|| Term::atomic("a"))),
        }),
        prop::collection::vec(term(), 1..3).prop_map(move |m| Definition::ConceptEnum {
            target: t1.clone(),
            members: m.into_iter().map(ground).collect(),
        }),
        concept_expr().prop_map(move |e| Definition::ConceptOp { target: t2.clone(), expr: e }),
        (select(vec!["C", "D"]), term(), term()).prop_map(move |(c, l, r)| Definition::ConceptComprehension {
            target: t3.clone(),
            source: c.to_string(),
            filter: Assertion::new(l, r),
        }),
        concept_expr().prop_map(move |e| Definition::ConceptReplacement {
            target: t4.clone(),
            operator: "f".into(),
            source: e,
        }),
        Just(Definition::ConceptOp { target: t5, expr: ConceptExpr::concept("C") }),
    ]
}

fn knowledge_base() -> impl Strategy<Value = KnowledgeBase> {
    let defs = (0usize..4).prop_flat_map(|n| (0..n).map(definition).collect::<Vec<_>>());
    (defs, prop::collection::vec(formula(), 0..4)).prop_map(|(definitions, formulas)| {
        let mut kb = KnowledgeBase { structure: structure(), definitions, ..Default::default() };
        for f in formulas {
            match f {
                Formula::Prim(a) if !a.is_ground() => kb.schema_assertions.push(a),
                f => kb.assertions.push(f),
            }
        }
        kb
    })
}

fn same_content(a: &KnowledgeBase, b: &KnowledgeBase) -> bool {
    a.structure == b.structure
        && a.definitions == b.definitions
        && a.assertions == b.assertions
        && a.schema_assertions == b.schema_assertions
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn printed_terms_reparse(t in term()) {
        let s = structure();
        let text = Printer::new(&s).term(&t);
        let back = parse_term(&text, &s).map_err(|d| TestCaseError::fail(format!("{text}: {d:?}")))?;
        prop_assert_eq!(back, t, "{}", text);
    }

    #[test]
    fn printed_formulas_reparse(f in formula()) {
        let s = structure();
        let text = Printer::new(&s).formula(&f);
        let back = parse_formula(&text, &s).map_err(|d| TestCaseError::fail(format!("{text}: {d:?}")))?;
        prop_assert_eq!(back, f, "{}", text);
    }

    #[test]
    fn printed_kbs_reparse(kb in knowledge_base()) {
        let text = printer::kb(&kb);
        let back = parse_kb(&text, "gen.skr").map_err(|d| TestCaseError::fail(format!("{text}\n{d:?}")))?;
        prop_assert!(same_content(&back, &kb), "{}\n{:#?}", text, back);
        prop_assert_eq!(printer::kb(&back), text);
    }

    #[test]
    fn diagnostics_point_into_the_source(src in "[a-cCD ;:=(){}|,∪∩∀∃¬\\^0-9\n`∅⊤.+]{0,40}") {
        let lines: Vec<&str> = src.split('\n').collect();
        let check = |diags: Vec<setkr::Diagnostic>| -> Result<(), TestCaseError> {
            prop_assert!(!diags.is_empty());
            for d in diags {
                let (line, col) = (d.span.line as usize, d.span.column as usize);
                prop_assert!(line >= 1 && line <= lines.len(), "{:?} in {:?}", d, src);
                prop_assert!(col >= 1 && col <= lines[line - 1].chars().count() + 1, "{:?} in {:?}", d, src);
            }
            Ok(())
        };
        if let Err(d) = parse_kb(&src, "gen.skr") {
            check(d)?;
        }
        if let Err(d) = parse_dl(&src, "gen.dl") {
            check(d)?;
        }
    }
}

#[test]
fn declarations_survive_printing() {
    let src = "individual a, b;\nconcept C;\nop infix +(C, C);\nop p(C) : Bool;\n\nassert a + b = b;\n";
    let kb = parse_kb(src, "d.skr").unwrap();
    assert_eq!(printer::kb(&kb), src);
}
