use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use rnmatrix::axioms::{schema, schemata};
use rnmatrix::formula::ordered_subformulas;
use rnmatrix::gen::{atoms, random_formula};
use rnmatrix::tableau::{ProveOptions, TableauError};
use rnmatrix::truthtable::{build_table_with, decide_with, render_table, TableError, TableOptions, DEFAULT_ROW_CAP};
use rnmatrix::{parse, prove_with, Formula, Logic, Multialgebra, Valuation};

const VALID: u8 = 0;
const INVALID: u8 = 1;
const USAGE: u8 = 2;
const CAP: u8 = 3;
const DISAGREE: u8 = 4;

#[derive(Parser)]
#[command(name = "rnmatrix", version, about = "Decide validity and entailment in C_n, mbCcl and Cila")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a formula, or one formula per stdin line when --formula is absent.
    Decide(DecideArgs),
    /// Print the full row-branching truth table.
    Table(TableArgs),
    /// Print the complete tableau.
    Tableau(TableauArgs),
    /// Dump the multialgebra and restriction clauses of a logic.
    Tables(TablesArgs),
    /// List axiom schemata or emit random instances, one per line.
    Axioms(AxiomsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Table,
    Tableau,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// C1..C9, mbCcl or Cila, any case.
    #[arg(long, short)]
    logic: Logic,
    /// Premises separated by `;`.
    #[arg(long, short)]
    premises: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, env = "RNMATRIX_ROW_CAP", default_value_t = DEFAULT_ROW_CAP)]
    row_cap: usize,
    #[arg(long, env = "RNMATRIX_NODE_CAP", default_value_t = rnmatrix::tableau::DEFAULT_NODE_CAP)]
    node_cap: usize,
}

#[derive(Args)]
struct DecideArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, short)]
    formula: Option<String>,
    #[arg(long, short, value_enum, default_value = "table")]
    method: Method,
    #[arg(long)]
    derived_rules: bool,
    /// Write the full truth table to this file.
    #[arg(long)]
    emit_table: Option<PathBuf>,
    /// Write the complete tableau (JSON) to this file.
    #[arg(long)]
    emit_tableau: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, short)]
    formula: String,
    /// Also print rows cut by a restriction clause.
    #[arg(long)]
    show_discarded: bool,
}

#[derive(Args)]
struct TableauArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, short)]
    formula: String,
    #[arg(long)]
    derived_rules: bool,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long, short)]
    logic: Logic,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct AxiomsArgs {
    #[arg(long, short)]
    logic: Logic,
    /// Emit this many random instances per schema instead of listing.
    #[arg(long)]
    instances: Option<usize>,
    /// Restrict to one schema.
    #[arg(long)]
    schema: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Connectives per substituted formula, at most.
    #[arg(long, default_value_t = 2)]
    max_connectives: u32,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: USAGE, message: message.into() }
    }
}

impl From<TableError> for Failure {
    fn from(e: TableError) -> Failure {
        let code = if matches!(e, TableError::RowCap { .. }) { CAP } else { USAGE };
        Failure { code, message: e.to_string() }
    }
}

impl From<TableauError> for Failure {
    fn from(e: TableauError) -> Failure {
        let code = if matches!(e, TableauError::NodeCap { .. }) { CAP } else { USAGE };
        Failure { code, message: e.to_string() }
    }
}

fn parse_formula(text: &str, logic: Logic) -> Result<Formula, Failure> {
    parse(text, logic).map_err(|e| Failure::usage(format!("in {text:?}: {e}")))
}

fn parse_premises(text: Option<&str>, logic: Logic) -> Result<Vec<Formula>, Failure> {
    let Some(text) = text else { return Ok(vec![]) };
    text.split(';').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse_formula(s, logic)).collect()
}

fn table_options(c: &Common) -> TableOptions {
    TableOptions { row_cap: c.row_cap, ..TableOptions::default() }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn render_countermodel(v: &Valuation, goal: &Formula, premises: &[Formula]) -> String {
    ordered_subformulas(goal, premises).iter().map(|f| format!("  {f} = {}\n", v.value(f))).collect()
}

fn countermodel_json(v: &Valuation, goal: &Formula, premises: &[Formula]) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> =
        ordered_subformulas(goal, premises).iter().map(|f| (f.to_string(), json!(v.value(f).to_string()))).collect();
    serde_json::Value::Object(map)
}

struct Outcome {
    code: u8,
    report: String,
}

fn decide_one(args: &DecideArgs, text: &str, premises: &[Formula]) -> Result<Outcome, Failure> {
    let c = &args.common;
    let logic = c.logic;
    let goal = parse_formula(text, logic)?;
    let with_premises = !premises.is_empty();
    let label = |valid: bool| match (valid, with_premises) {
        (true, false) => "valid",
        (false, false) => "invalid",
        (true, true) => "entailed",
        (false, true) => "not-entailed",
    };

    let table = match args.method {
        Method::Tableau => None,
        _ => Some(decide_with(logic, &goal, premises, &table_options(c))?),
    };
    let proof = match args.method {
        Method::Table => None,
        _ => {
            let opts = ProveOptions {
                use_derived: args.derived_rules,
                node_cap: c.node_cap,
                stop_at_first_open: args.emit_tableau.is_none(),
                record_tree: args.emit_tableau.is_some(),
                backjump: true,
            };
            Some(prove_with(logic, &goal, premises, &opts)?)
        }
    };
    if let Some(path) = &args.emit_table {
        let t = build_table_with(logic, &goal, premises, &table_options(c))?;
        let text = match c.format {
            Format::Text => render_table(&t, false),
            Format::Json => serde_json::to_string_pretty(&t.to_json()).expect("json"),
        };
        write_file(path, &text)?;
    }
    if let (Some(path), Some(p)) = (&args.emit_tableau, &proof) {
        let text = match c.format {
            Format::Text => p.tableau.render(),
            Format::Json => serde_json::to_string_pretty(&p.tableau.to_json()).expect("json"),
        };
        write_file(path, &text)?;
    }

    let verdicts: Vec<bool> =
        table.iter().map(|t| t.verdict.is_valid()).chain(proof.iter().map(|p| p.proved)).collect();
    let agree = verdicts.windows(2).all(|w| w[0] == w[1]);
    let valid = verdicts[0];
    let code = if !agree {
        DISAGREE
    } else if valid {
        VALID
    } else {
        INVALID
    };
    let countermodel = table.as_ref().and_then(|t| t.countermodel.as_ref()).or(proof.as_ref().and_then(|p| p.countermodel.as_ref()));

    let report = match c.format {
        Format::Json => {
            let mut v = json!({
                "logic": logic.to_string(),
                "goal": goal.to_string(),
                "premises": premises.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "verdict": if agree { json!(label(valid)) } else { json!("disagreement") },
                "countermodel": countermodel.map(|v| countermodel_json(v, &goal, premises)),
            });
            if let Some(t) = &table {
                v["table"] = json!({ "verdict": label(t.verdict.is_valid()), "stats": t.stats });
            }
            if let Some(p) = &proof {
                v["tableau"] = json!({
                    "verdict": label(p.proved),
                    "literal_closed": p.literal_closed,
                    "stats": p.tableau.stats,
                });
            }
            v.to_string() + "\n"
        }
        Format::Text => {
            let mut out = String::new();
            if agree {
                out += &format!("{}: {goal} in {logic}\n", label(valid));
            } else {
                out += &format!("disagreement on {goal} in {logic}:");
                if let Some(t) = &table {
                    out += &format!(" table says {}", label(t.verdict.is_valid()));
                }
                if let Some(p) = &proof {
                    out += &format!(", tableau says {}", label(p.proved));
                }
                out.push('\n');
            }
            if let Some(v) = countermodel {
                out += "countermodel:\n";
                out += &render_countermodel(v, &goal, premises);
            }
            out
        }
    };
    Ok(Outcome { code, report })
}

fn decide(args: &DecideArgs) -> Result<u8, Failure> {
    let premises = parse_premises(args.common.premises.as_deref(), args.common.logic)?;
    let mut out = io::stdout().lock();
    if let Some(text) = &args.formula {
        let o = decide_one(args, text, &premises)?;
        let _ = out.write_all(o.report.as_bytes());
        return Ok(o.code);
    }
    if args.emit_table.is_some() || args.emit_tableau.is_some() {
        return Err(Failure::usage("--emit-table and --emit-tableau need --formula"));
    }
    // Batch mode: the worst status wins.
    let mut worst = VALID;
    for line in io::stdin().lock().lines() {
        let line = line.map_err(|e| Failure::usage(e.to_string()))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let code = match decide_one(args, text, &premises) {
            Ok(o) => {
                let _ = out.write_all(o.report.as_bytes());
                o.code
            }
            Err(f) => {
                let _ = writeln!(out, "error: {}", f.message);
                f.code
            }
        };
        worst = worst.max(code);
    }
    Ok(worst)
}

fn table(args: &TableArgs) -> Result<u8, Failure> {
    let c = &args.common;
    let goal = parse_formula(&args.formula, c.logic)?;
    let premises = parse_premises(c.premises.as_deref(), c.logic)?;
    let opts = TableOptions { keep_discarded: args.show_discarded, ..table_options(c) };
    let t = build_table_with(c.logic, &goal, &premises, &opts)?;
    let refuted = t.live_rows().any(|r| {
        !r.values[t.goal].is_designated() && t.premises.iter().all(|&i| r.values[i].is_designated())
    });
    match c.format {
        Format::Text => emit(&render_table(&t, args.show_discarded)),
        Format::Json => emit(&format!("{}\n", t.to_json())),
    }
    Ok(if refuted { INVALID } else { VALID })
}

fn tableau(args: &TableauArgs) -> Result<u8, Failure> {
    let c = &args.common;
    let goal = parse_formula(&args.formula, c.logic)?;
    let premises = parse_premises(c.premises.as_deref(), c.logic)?;
    let opts = ProveOptions { use_derived: args.derived_rules, node_cap: c.node_cap, ..ProveOptions::default() };
    let r = prove_with(c.logic, &goal, &premises, &opts)?;
    match c.format {
        Format::Text => {
            let s = &r.tableau.stats;
            emit(&format!(
                "{}{} nodes, {} branches, {} closed, proved: {}\n",
                r.tableau.render(),
                s.nodes,
                s.branches,
                s.closures,
                if r.proved { "yes" } else { "no" }
            ));
        }
        Format::Json => {
            let mut v = r.to_json(&goal, &premises);
            v["tableau"] = r.tableau.to_json();
            emit(&format!("{v}\n"));
        }
    }
    Ok(if r.proved { VALID } else { INVALID })
}

fn tables(args: &TablesArgs) -> Result<u8, Failure> {
    let alg = Multialgebra::for_logic(args.logic);
    match args.format {
        Format::Text => emit(&alg.render()),
        Format::Json => emit(&format!("{}\n", alg.to_json())),
    }
    Ok(VALID)
}

fn axioms(args: &AxiomsArgs) -> Result<u8, Failure> {
    let list = match &args.schema {
        Some(name) => vec![schema(args.logic, name)
            .ok_or_else(|| Failure::usage(format!("{} has no schema named {name}", args.logic)))?],
        None => schemata(args.logic),
    };
    let mut out = io::stdout().lock();
    let Some(count) = args.instances else {
        for s in &list {
            let _ = writeln!(out, "{s}");
        }
        return Ok(VALID);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let pool = atoms(&["p", "q", "r"]);
    for s in &list {
        for _ in 0..count {
            let assignment: HashMap<String, Formula> = s
                .metavariables()
                .into_iter()
                .map(|m| (m.to_string(), random_formula(&mut rng, args.logic, &pool, args.max_connectives)))
                .collect();
            let f = s.instantiate(&assignment).expect("every metavariable assigned");
            let _ = writeln!(out, "{f}");
        }
    }
    Ok(VALID)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Decide(a) => decide(a),
        Command::Table(a) => table(a),
        Command::Tableau(a) => tableau(a),
        Command::Tables(a) => tables(a),
        Command::Axioms(a) => axioms(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
