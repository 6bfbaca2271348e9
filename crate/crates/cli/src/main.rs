use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value as Json};

use setkr::ast::{validate_structure, KnowledgeBase};
use setkr::definitions::{check_definitions, evaluate, seed_from_kb, EvaluationResult};
use setkr::desugar::desugar_kb;
use setkr::diagnostics::{Diagnostic, SourceSpan};
use setkr::dl::{parse_dl, translate_kb};
use setkr::hfset::Value;
use setkr::parser::{parse_assertion, parse_kb};
use setkr::printer;
use setkr::semantics::{check_entails, models_kb, query_database, Interpretation, KbCheck, SearchBound, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "setkr", version, about = "Knowledge bases over hereditarily finite sets")]
struct Cli {
    /// Report format on standard output.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a knowledge base and print its canonical form.
    Parse { file: PathBuf },
    /// Check names, arities and the definition dependency graph.
    Validate { file: PathBuf },
    /// Evaluate the definitions round by round.
    Eval {
        file: PathBuf,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
        max_rounds: u64,
    },
    /// Lower logic, quantifiers, multi-assertions and nesting to flat assertions.
    Desugar { file: PathBuf },
    /// Check whether an interpretation (JSON) is a model of a knowledge base.
    Check { model: PathBuf, kb: PathBuf },
    /// Bounded entailment check of a query assertion.
    Entail {
        file: PathBuf,
        #[arg(short, long)]
        query: String,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        atoms: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
    },
    /// Answer a fact query against a knowledge base in the database fragment.
    Query {
        file: PathBuf,
        #[arg(short, long)]
        query: String,
    },
    /// Translate a description-logic file into the set language.
    Dl2skr { file: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Parse { .. } => "parse",
            Command::Validate { .. } => "validate",
            Command::Eval { .. } => "eval",
            Command::Desugar { .. } => "desugar",
            Command::Check { .. } => "check",
            Command::Entail { .. } => "entail",
            Command::Query { .. } => "query",
            Command::Dl2skr { .. } => "dl2skr",
        }
    }
}

enum Failure {
    /// Exit 1: the input was read but rejected.
    Diagnostics(Vec<Diagnostic>),
    /// Exit 2: the input could not be read.
    Io(String),
}

struct Report {
    ok: bool,
    text: String,
    json: Json,
}

fn read_input(path: &Path) -> Result<(String, String), Failure> {
    let mut src = String::new();
    if path.as_os_str() == "-" {
        io::stdin()
            .read_to_string(&mut src)
            .map_err(|e| Failure::Io(format!("cannot read standard input: {e}")))?;
        return Ok((src, "<stdin>".into()));
    }
    src = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok((src, path.display().to_string()))
}

fn load_kb(path: &Path, validate: bool) -> Result<KnowledgeBase, Failure> {
    let (src, name) = read_input(path)?;
    let kb = parse_kb(&src, &name).map_err(Failure::Diagnostics)?;
    if validate {
        let mut diags = validate_structure(&kb);
        diags.extend(check_definitions(&kb));
        if diags.iter().any(Diagnostic::is_error) {
            return Err(Failure::Diagnostics(diags));
        }
    }
    Ok(kb)
}

fn error_at(file: &str, message: impl Into<String>) -> Failure {
    Failure::Diagnostics(vec![Diagnostic::error(message, SourceSpan::new(file, 1, 1, 0))])
}

fn interpretation_text(i: &Interpretation) -> String {
    let mut out = String::new();
    for (k, v) in &i.individual_map {
        let _ = writeln!(out, "  {k} = {v}");
    }
    for (k, v) in &i.concept_map {
        let _ = writeln!(out, "  {k} = {v}");
    }
    for (op, table) in &i.operator_map {
        for (args, v) in table {
            let a: Vec<String> = args.iter().map(Value::to_string).collect();
            let _ = writeln!(out, "  {op}({}) = {v}", a.join(", "));
        }
    }
    out
}

fn eval_text(r: &EvaluationResult) -> String {
    let i = r.interpretation();
    format!(
        "rounds: {}\nfixpoint: {}\n{}",
        r.rounds_executed,
        r.fixpoint_reached,
        interpretation_text(&i)
    )
}

/// Interpretation file: the same shape `entail --format json` prints for a
/// countermodel, with values in canonical text.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    #[serde(default)]
    universe: Vec<String>,
    #[serde(default)]
    individual_map: BTreeMap<String, String>,
    #[serde(default)]
    concept_map: BTreeMap<String, String>,
    #[serde(default)]
    operator_map: BTreeMap<String, Vec<Entry>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    args: Vec<String>,
    value: String,
}

fn load_model(path: &Path) -> Result<Interpretation, Failure> {
    let (src, name) = read_input(path)?;
    let m: ModelFile = serde_json::from_str(&src).map_err(|e| error_at(&name, format!("bad model file: {e}")))?;
    let val = |s: &str| Value::from_str(s).map_err(|e| error_at(&name, format!("bad value {s:?}: {e}")));
    let mut i = Interpretation::new();
    i.universe = m.universe.iter().map(|s| val(s)).collect::<Result<_, _>>()?;
    for (k, v) in &m.individual_map {
        i = i.with_individual(k.clone(), val(v)?);
    }
    for (k, v) in &m.concept_map {
        let ext = val(v)?;
        if !ext.is_set() {
            return Err(error_at(&name, format!("extent of {k} is not a set")));
        }
        i = i.with_concept(k.clone(), ext);
    }
    for (op, entries) in &m.operator_map {
        for e in entries {
            let args = e.args.iter().map(|a| val(a)).collect::<Result<Vec<_>, _>>()?;
            i = i.with_entry(op.clone(), args, val(&e.value)?);
        }
    }
    Ok(i)
}

fn run(cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Parse { file } => {
            let kb = load_kb(file, false)?;
            let text = printer::kb(&kb);
            Ok(Report {
                ok: true,
                json: json!({ "canonical": text, "kb": kb }),
                text,
            })
        }
        Command::Validate { file } => {
            load_kb(file, true)?;
            Ok(Report {
                ok: true,
                text: "ok\n".into(),
                json: json!({ "valid": true }),
            })
        }
        Command::Eval { file, max_rounds } => {
            let kb = load_kb(file, true)?;
            let name = file.display().to_string();
            let result = evaluate(&kb.definitions, &seed_from_kb(&kb), *max_rounds as usize)
                .map_err(|e| error_at(&name, e.to_string()))?;
            Ok(Report {
                ok: true,
                text: eval_text(&result),
                json: json!({ "result": result }),
            })
        }
        Command::Desugar { file } => {
            let kb = load_kb(file, true)?;
            let out = desugar_kb(&kb);
            let text = printer::kb(&out);
            Ok(Report {
                ok: true,
                json: json!({ "canonical": text, "kb": out }),
                text,
            })
        }
        Command::Check { model, kb } => {
            let interp = load_model(model)?;
            let kb = load_kb(kb, true)?;
            let interp = interp.with_operator_definitions(&kb.definitions);
            let name = model.display().to_string();
            match models_kb(&interp, &kb).map_err(|e| error_at(&name, e.to_string()))? {
                KbCheck::Model => Ok(Report {
                    ok: true,
                    text: "model\n".into(),
                    json: json!({ "model": true }),
                }),
                KbCheck::Violated(a) => {
                    let shown = printer::assertion(&a);
                    Ok(Report {
                        ok: false,
                        text: format!("not a model: {shown} fails\n"),
                        json: json!({ "model": false, "violated": shown }),
                    })
                }
            }
        }
        Command::Entail {
            file,
            query,
            atoms,
            depth,
        } => {
            let kb = load_kb(file, true)?;
            let q = parse_assertion(query, &kb.structure).map_err(Failure::Diagnostics)?;
            let bound = SearchBound {
                atoms: *atoms as usize,
                depth: *depth as usize,
                ..SearchBound::default()
            };
            let name = file.display().to_string();
            let verdict = check_entails(&kb, &q, &bound).map_err(|e| error_at(&name, e.to_string()))?;
            let text = match &verdict {
                Verdict::Holds(s) => format!("holds ({} nodes, up to {} atoms, depth {})\n", s.nodes, s.atoms, s.depth),
                Verdict::CounterModel(i) => format!("countermodel:\n{}", interpretation_text(i)),
                Verdict::BoundExhausted(s) => format!(
                    "bound exhausted after {} nodes: {}\n",
                    s.nodes,
                    s.reason.as_deref().unwrap_or("search budget")
                ),
            };
            Ok(Report {
                ok: verdict.holds(),
                json: json!({ "query": printer::assertion(&q), "bound": bound, "result": verdict }),
                text,
            })
        }
        Command::Query { file, query } => {
            let kb = load_kb(file, true)?;
            let q = parse_assertion(query, &kb.structure).map_err(Failure::Diagnostics)?;
            let name = file.display().to_string();
            let answer = query_database(&kb, &q).map_err(|e| error_at(&name, e.to_string()))?;
            Ok(Report {
                ok: answer,
                text: format!("{answer}\n"),
                json: json!({ "query": printer::assertion(&q), "answer": answer }),
            })
        }
        Command::Dl2skr { file } => {
            let (src, name) = read_input(file)?;
            let dl = parse_dl(&src, &name).map_err(Failure::Diagnostics)?;
            let kb = translate_kb(&dl).map_err(|e| error_at(&name, e.to_string()))?;
            let text = printer::kb(&kb);
            Ok(Report {
                ok: true,
                json: json!({ "canonical": text }),
                text,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command.name();
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    let (code, body) = match run(&cli.command) {
        Ok(r) => {
            let code = if r.ok { 0 } else { 1 };
            let body = match cli.format {
                Format::Text => r.text,
                Format::Json => {
                    let mut j = r.json;
                    j["command"] = json!(command);
                    j["status"] = json!(if r.ok { "ok" } else { "negative" });
                    format!("{}\n", serde_json::to_string_pretty(&j).expect("report serializes"))
                }
            };
            (code, body)
        }
        Err(Failure::Diagnostics(diags)) => {
            for d in &diags {
                let _ = writeln!(stderr, "{d}");
            }
            let body = match cli.format {
                Format::Text => String::new(),
                Format::Json => {
                    let j = json!({ "command": command, "status": "diagnostics", "diagnostics": diags });
                    format!("{}\n", serde_json::to_string_pretty(&j).expect("report serializes"))
                }
            };
            (1, body)
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "setkr: {msg}");
            let body = match cli.format {
                Format::Text => String::new(),
                Format::Json => {
                    let j = json!({ "command": command, "status": "error", "error": msg });
                    format!("{}\n", serde_json::to_string_pretty(&j).expect("report serializes"))
                }
            };
            (2, body)
        }
    };
    let _ = stdout.write_all(body.as_bytes());
    ExitCode::from(code)
}
