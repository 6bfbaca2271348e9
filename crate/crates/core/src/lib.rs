//! Knowledge representation over hereditarily finite sets.

pub mod ast;
pub mod definitions;
pub mod desugar;
pub mod diagnostics;
pub mod dl;
pub mod hfset;
pub mod parser;
pub mod printer;
pub mod semantics;

pub use ast::{Assertion, ConceptExpr, Definition, Formula, KnowledgeBase, SyntacticStructure, Term};
pub use diagnostics::{Diagnostic, SourceSpan};
pub use hfset::{Limits, SetError, Value};
pub use parser::{parse_assertion, parse_formula, parse_kb, parse_term};
