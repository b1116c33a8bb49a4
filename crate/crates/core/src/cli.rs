//! The `hgp` command line.
//!
//! Machine-readable results go to standard output as JSON; summaries and
//! search progress go to standard error. Exit codes: 0 pass, 1 fail,
//! 2 input error.

use std::io::Write;
use std::thread;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::catalog::{Catalog, CatalogEntry};
use crate::certify::{build_proof_witness, check_certificate, Certificate};
use crate::form::solve_invariant_form;
use crate::group::{build_group, GroupPresentation};
use crate::params::{parse_rational_tuple, ParamTuple};
use crate::search::{
    search_certificate_with_progress, SearchConfig, DEFAULT_MAX_DEPTH, DEFAULT_MAX_ENTRY,
    DEFAULT_MAX_NODES,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hgp",
    version,
    about = "Arithmeticity certificates for symplectic hypergeometric groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a certificate word for one group.
    Verify(VerifyArgs),
    /// Breadth-first search for a certificate word.
    Search(SearchArgs),
    /// Print the invariant symplectic form, one row per line.
    Form(GroupArgs),
    /// Show the built-in catalog.
    Table(TableArgs),
    /// Verify every catalog row.
    BatchVerify(BatchArgs),
}

#[derive(Debug, Args)]
struct GroupArgs {
    /// Catalog label such as A-24, C-42 or 30.
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    label: Option<String>,
    /// Comma-separated rationals, e.g. 0,0,0,0,0,0.
    #[arg(long, requires = "beta")]
    alpha: Option<String>,
    /// Comma-separated rationals, same length as alpha.
    #[arg(long, requires = "alpha")]
    beta: Option<String>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Word in A, B, powers and parentheses; defaults to the catalog word.
    #[arg(long)]
    word: Option<String>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Discard orbit vectors with an entry larger than this.
    #[arg(long, default_value_t = DEFAULT_MAX_ENTRY)]
    max_entry: u64,
    /// Number of breadth-first levels to explore.
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    /// Cap on stored orbit vectors; 0 removes the cap.
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    /// Worker threads per level; the result does not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// One line per row: label, table, parameters and word.
    #[arg(long)]
    list: bool,
    /// The catalog in its JSON file format.
    #[arg(long, conflicts_with = "list")]
    json: bool,
}

#[derive(Debug, Args)]
struct BatchArgs {
    /// Also construct the unipotent witness for each row.
    #[arg(long)]
    witness: bool,
    /// Depth limit of the search for the third direction.
    #[arg(long, default_value_t = 8)]
    witness_depth: usize,
    /// Rows checked in parallel.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

/// A resolved `--label` or `--alpha/--beta` pair.
struct Target {
    label: Option<String>,
    entry: Option<CatalogEntry>,
    group: GroupPresentation,
}

fn resolve_target(args: &GroupArgs) -> Result<Target, InputError> {
    match (&args.label, &args.alpha, &args.beta) {
        (Some(label), None, None) => {
            let catalog = Catalog::from_env()?;
            let entry = catalog.lookup(label)?.clone();
            let resolved = entry.resolve()?;
            Ok(Target {
                label: Some(label.clone()),
                entry: Some(entry),
                group: resolved.group,
            })
        }
        (None, Some(alpha), Some(beta)) => {
            let alpha = parse_rational_tuple(alpha)?;
            let beta = parse_rational_tuple(beta)?;
            Ok(Target {
                label: None,
                entry: None,
                group: build_group(&alpha, &beta)?,
            })
        }
        _ => Err(InputError(
            "give either --label or both --alpha and --beta".to_string(),
        )),
    }
}

fn write_json(out: &mut dyn Write, value: &Value) -> std::io::Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(value).expect("json value")
    )
}

fn params_json(t: &ParamTuple) -> Value {
    json!(t.to_strings())
}

/// Runs the command line with `args` (including the program name) and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify(a) => verify(&a, out, err),
        Command::Search(a) => search(&a, out, err),
        Command::Form(a) => form(&a, out),
        Command::Table(a) => table(&a, out),
        Command::BatchVerify(a) => batch_verify(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, InputError> {
    let target = resolve_target(&args.group)?;
    let word = match (&args.word, &target.entry) {
        (Some(w), _) => w.clone(),
        (None, Some(entry)) => entry.word.clone(),
        (None, None) => return Err(InputError("--word is required with --alpha/--beta".into())),
    };
    let cert = Certificate::new(
        target.group.alpha.clone(),
        target.group.beta.clone(),
        &word,
        target.label.clone(),
    )?;
    let report = check_certificate(&cert)?;
    writeln!(
        err,
        "{}: {}",
        target.label.as_deref().unwrap_or("group"),
        report.checks.reason.as_deref().unwrap_or("pass")
    )?;
    write_json(out, &serde_json::to_value(&report)?)?;
    Ok(if report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn search(args: &SearchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, InputError> {
    let target = resolve_target(&args.group)?;
    let cfg = SearchConfig {
        max_entry: Some(args.max_entry),
        max_depth: args.max_depth,
        max_nodes: (args.max_nodes > 0).then_some(args.max_nodes),
        threads: args.threads,
    };
    let started = Instant::now();
    let mut progress = |l: &crate::search::LevelStats| {
        let _ = writeln!(
            err,
            "level {} frontier {} visited {}",
            l.depth, l.frontier, l.visited
        );
    };
    let outcome = search_certificate_with_progress(&target.group.gens, &cfg, &mut progress)?;
    let elapsed_ms = started.elapsed().as_millis() as u64;

    let mut value = match &outcome.found {
        Some((word, _)) => {
            let text = word.to_string();
            let cert = Certificate::new(
                target.group.alpha.clone(),
                target.group.beta.clone(),
                &text,
                target.label.clone(),
            )?;
            let mut v = serde_json::to_value(check_certificate(&cert)?)?;
            v["found_word"] = json!(text);
            v["found_length"] = json!(word.len());
            v
        }
        None => json!({
            "label": target.label,
            "alpha": params_json(&target.group.alpha),
            "beta": params_json(&target.group.beta),
            "found_word": null,
            "assumed_zariski_dense": true,
        }),
    };
    value["max_entry"] = json!(args.max_entry);
    value["max_depth"] = json!(args.max_depth);
    value["truncated"] = json!(outcome.truncated);
    value["levels"] = serde_json::to_value(&outcome.levels)?;
    value["elapsed_ms"] = json!(elapsed_ms);
    write_json(out, &value)?;
    let passed = outcome.found.is_some() && value["verdict"] == "pass";
    Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
}

fn form(args: &GroupArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let target = resolve_target(args)?;
    let form = solve_invariant_form(&target.group.gens)?;
    write!(out, "{}", form.matrix())?;
    Ok(EXIT_PASS)
}

fn table(args: &TableArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let catalog = Catalog::from_env()?;
    if args.json {
        writeln!(out, "{}", catalog.to_json())?;
    } else if args.list {
        for e in catalog.list_all() {
            writeln!(
                out,
                "{:<5} table {}  alpha=({})  beta=({})  word={}{}",
                e.label,
                e.table,
                e.alpha,
                e.beta,
                e.word,
                if e.suspect { "  [suspect]" } else { "" }
            )?;
        }
    } else {
        return Err(InputError("table needs --list or --json".into()));
    }
    Ok(EXIT_PASS)
}

fn batch_row(entry: &CatalogEntry, witness: Option<usize>) -> (bool, Value) {
    let fail = |msg: String| {
        (
            false,
            json!({ "label": entry.label, "verdict": "fail", "error": msg }),
        )
    };
    let resolved = match entry.resolve() {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let report = match check_certificate(&resolved.certificate) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let mut pass = report.passed();
    let mut row = serde_json::to_value(&report).expect("report serializes");
    row["table"] = json!(entry.table);
    row["suspect"] = json!(entry.suspect);
    row["used_corrected_beta"] = json!(resolved.used_corrected_beta);
    if let (Some(depth), true) = (witness, pass) {
        match build_proof_witness(&resolved.certificate, depth) {
            Ok(w) => row["witness"] = serde_json::to_value(&w).expect("witness serializes"),
            Err(e) => {
                pass = false;
                row["witness_error"] = json!(e.to_string());
            }
        }
    }
    (pass, row)
}

fn batch_verify(
    args: &BatchArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, InputError> {
    if args.threads == 0 {
        return Err(InputError("--threads must be positive".into()));
    }
    let catalog = Catalog::from_env()?;
    let entries = catalog.list_all();
    let witness = args.witness.then_some(args.witness_depth);
    let started = Instant::now();
    let chunk = entries.len().div_ceil(args.threads).max(1);
    let results: Vec<(bool, Value)> = thread::scope(|scope| {
        let handles: Vec<_> = entries
            .chunks(chunk)
            .map(|rows| {
                scope.spawn(move || {
                    rows.iter()
                        .map(|e| batch_row(e, witness))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("batch worker panicked"))
            .collect()
    });
    let elapsed_ms = started.elapsed().as_millis() as u64;
    let all_pass = results.iter().all(|(p, _)| *p);
    for (pass, row) in &results {
        writeln!(
            err,
            "{:<5} {}",
            row["label"].as_str().unwrap_or("?"),
            if *pass { "pass" } else { "FAIL" }
        )?;
    }
    let rows: Vec<Value> = results.into_iter().map(|(_, r)| r).collect();
    write_json(
        out,
        &json!({
            "rows": rows,
            "count": rows.len(),
            "all_pass": all_pass,
            "witness": args.witness,
            "elapsed_ms": elapsed_ms,
        }),
    )?;
    Ok(if all_pass { EXIT_PASS } else { EXIT_FAIL })
}
