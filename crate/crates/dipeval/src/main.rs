use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dipeval::align::{annotate_document, AnnotationOutcome, MatchPolicy};
use dipeval::io;
use dipeval::metrics::{evaluate, DipScope, EvaluationReport};
use dipeval::model::{validate_corpus, Corpus, LabelSet};
use dipeval::report::{
    compare, digest_file, fmt3, render_comparison, render_csv, render_failures, render_table,
    InputDigest, RunManifest,
};
use dipeval::sim::{generate_corpus, perturb, sweep, CorpusSpec, NoiseSpec};
use dipeval::split::{split, Scenario, SplitResult, SplitSpec};

#[derive(Parser)]
#[command(name = "dipeval", version, about = "Token-classification evaluation with Document Integrity Precision")]
struct Cli {
    /// Label-set JSON; the built-in receipt labels are used when omitted.
    #[arg(long, global = true)]
    labels: Option<PathBuf>,
    /// Suppress tables on stdout; files are still written.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate token-level ground truth by matching field values to OCR tokens.
    Align(AlignArgs),
    /// Split a corpus into train and test sets (S1 stratified, S2 creditor-disjoint).
    Split(SplitArgs),
    /// Compute per-class precision/recall/F1, macro-F1, and DIP.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic annotated corpus and noisy predictions.
    Simulate(SimulateArgs),
    /// Sweep the noise rate and emit (epsilon, avg_f1, dip, expected_dip) rows.
    Sweep(SweepArgs),
    /// Compare two evaluation report JSONs side by side.
    Compare(CompareArgs),
}

#[derive(Args)]
struct AlignArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    fields: PathBuf,
    #[arg(long)]
    policy: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    audit: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_parser = parse_scenario)]
    scenario: Scenario,
    #[arg(long = "train-frac", default_value_t = 0.8)]
    train_frac: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "out-train")]
    out_train: PathBuf,
    #[arg(long = "out-test")]
    out_test: PathBuf,
    #[arg(long = "out-manifest", default_value = "split_manifest.json")]
    out_manifest: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    preds: PathBuf,
    #[arg(long, value_parser = parse_scope, default_value = "non-none")]
    scope: DipScope,
    /// Report destination; `.csv` selects CSV, anything else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print up to N failure extracts per class.
    #[arg(long, default_value_t = 0)]
    failures: usize,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    noise: Option<PathBuf>,
    #[arg(long = "out-corpus")]
    out_corpus: PathBuf,
    #[arg(long = "out-preds")]
    out_preds: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Epsilon range as start:stop:step, e.g. 0:0.2:0.01.
    #[arg(long)]
    eps: String,
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_parser = parse_scope, default_value = "non-none")]
    scope: DipScope,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    report_a: PathBuf,
    report_b: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    match s.to_ascii_lowercase().as_str() {
        "s1" => Ok(Scenario::S1),
        "s2" => Ok(Scenario::S2),
        other => Err(format!("expected s1 or s2, got {other:?}")),
    }
}

fn parse_scope(s: &str) -> Result<DipScope, String> {
    match s {
        "all" => Ok(DipScope::AllTokens),
        "non-none" => Ok(DipScope::NonNoneOnly),
        other => Err(format!("expected all or non-none, got {other:?}")),
    }
}

enum CliError {
    /// Exit 1: semantic/validation failures and I/O problems.
    Invalid(String),
    /// Exit 2: malformed input files.
    Malformed(String),
}

impl From<io::ParseError> for CliError {
    fn from(e: io::ParseError) -> Self {
        match e {
            io::ParseError::Malformed { .. } => CliError::Malformed(e.to_string()),
            io::ParseError::Io { .. } => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<dipeval::Error> for CliError {
    fn from(e: dipeval::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(format!("io: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (kind, message, code) = match err {
                CliError::Invalid(m) => ("invalid", m, 1),
                CliError::Malformed(m) => ("malformed", m, 2),
            };
            eprintln!(
                "{}",
                serde_json::json!({ "error": kind, "message": message })
            );
            ExitCode::from(code)
        }
    }
}

fn load_labels(cli: &Cli) -> Result<LabelSet, CliError> {
    match &cli.labels {
        Some(path) => Ok(io::load_label_set(path)?),
        None => Ok(LabelSet::default_receipt_labels()),
    }
}

fn ensure_valid(corpus: &Corpus) -> Result<(), CliError> {
    let violations = validate_corpus(corpus);
    if violations.is_empty() {
        Ok(())
    } else {
        let detail = serde_json::to_string(&violations).unwrap_or_default();
        Err(CliError::Invalid(format!(
            "corpus validation failed with {} violation(s): {detail}",
            violations.len()
        )))
    }
}

fn write_output(
    path: &Path,
    contents: &[u8],
    command: &str,
    inputs: &[&Path],
) -> Result<(), CliError> {
    io::write_atomic(path, contents)?;
    let digests: Vec<InputDigest> = inputs
        .iter()
        .map(|p| digest_file(p))
        .collect::<Result<_, _>>()?;
    let args: Vec<String> = std::env::args().skip(1).collect();
    let manifest = RunManifest::new(command, args, digests);
    let manifest_path = manifest_path_for(path);
    io::write_atomic(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).unwrap().as_bytes(),
    )?;
    Ok(())
}

fn manifest_path_for(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Align(args) => cmd_align(cli, args),
        Command::Split(args) => cmd_split(cli, args),
        Command::Evaluate(args) => cmd_evaluate(cli, args),
        Command::Simulate(args) => cmd_simulate(cli, args),
        Command::Sweep(args) => cmd_sweep(cli, args),
        Command::Compare(args) => cmd_compare(cli, args),
    }
}

fn cmd_align(cli: &Cli, args: &AlignArgs) -> Result<(), CliError> {
    let labels = load_labels(cli)?;
    let corpus = io::load_corpus(&args.corpus, labels.clone())?;
    ensure_valid(&corpus)?;
    let records = io::load_fields(&args.fields)?;
    let policy = match &args.policy {
        Some(p) => io::load_policy(p)?,
        None => MatchPolicy::default(),
    };

    for rec in &records {
        for f in &rec.fields {
            if !labels.contains(&f.class_name) {
                return Err(CliError::Invalid(format!(
                    "schema: unknown field class {:?} for doc {}",
                    f.class_name, rec.doc_id
                )));
            }
        }
    }

    let mut annotated = Vec::new();
    let mut audit = String::new();
    let mut matched = 0usize;
    for doc in &corpus.documents {
        let fields = records
            .iter()
            .find(|r| r.doc_id == doc.doc_id)
            .map(|r| r.fields.as_slice())
            .unwrap_or(&[]);
        match annotate_document(doc, fields, &policy)? {
            AnnotationOutcome::Annotated(d) => {
                matched += 1;
                annotated.push(d);
            }
            AnnotationOutcome::Omitted { class, reason } => {
                audit.push_str(
                    &serde_json::json!({
                        "doc_id": doc.doc_id,
                        "class": class,
                        "reason": reason,
                    })
                    .to_string(),
                );
                audit.push('\n');
            }
        }
    }

    let out_corpus = Corpus {
        documents: annotated,
        label_set: labels,
    };
    let inputs: Vec<&Path> = [&args.corpus, &args.fields]
        .into_iter()
        .map(|p| p.as_path())
        .chain(args.policy.as_deref())
        .collect();
    write_output(&args.out, io::corpus_to_jsonl(&out_corpus).as_bytes(), "align", &inputs)?;
    write_output(&args.audit, audit.as_bytes(), "align", &inputs)?;
    if !cli.quiet {
        println!(
            "annotated {matched}/{} documents ({} omitted)",
            corpus.documents.len(),
            corpus.documents.len() - matched
        );
    }
    Ok(())
}

fn cmd_split(cli: &Cli, args: &SplitArgs) -> Result<(), CliError> {
    let labels = load_labels(cli)?;
    let corpus = io::load_corpus(&args.corpus, labels)?;
    ensure_valid(&corpus)?;
    let spec = SplitSpec::new(args.scenario, args.train_frac, args.seed)?;
    let result = split(&corpus, &spec)?;

    let side = |ids: &[String]| -> Corpus {
        Corpus {
            documents: ids
                .iter()
                .filter_map(|id| corpus.document(id).cloned())
                .collect(),
            label_set: corpus.label_set.clone(),
        }
    };
    let inputs = [args.corpus.as_path()];
    write_output(
        &args.out_train,
        io::corpus_to_jsonl(&side(&result.train_ids)).as_bytes(),
        "split",
        &inputs,
    )?;
    write_output(
        &args.out_test,
        io::corpus_to_jsonl(&side(&result.test_ids)).as_bytes(),
        "split",
        &inputs,
    )?;

    let manifest = split_manifest(&corpus, &spec, &result);
    write_output(
        &args.out_manifest,
        serde_json::to_string_pretty(&manifest).unwrap().as_bytes(),
        "split",
        &inputs,
    )?;
    if !cli.quiet {
        println!(
            "train {} docs, test {} docs, achieved fraction {}",
            result.train_ids.len(),
            result.test_ids.len(),
            fmt3(result.achieved_fraction())
        );
    }
    Ok(())
}

fn split_manifest(corpus: &Corpus, spec: &SplitSpec, result: &SplitResult) -> serde_json::Value {
    let creditor_count = |ids: &[String]| {
        ids.iter()
            .filter_map(|id| corpus.document(id))
            .map(|d| d.creditor_id.clone())
            .collect::<std::collections::HashSet<_>>()
            .len()
    };
    serde_json::json!({
        "spec": spec,
        "achieved_fraction": result.achieved_fraction(),
        "train_documents": result.train_ids.len(),
        "test_documents": result.test_ids.len(),
        "train_creditors": creditor_count(&result.train_ids),
        "test_creditors": creditor_count(&result.test_ids),
    })
}

fn cmd_evaluate(cli: &Cli, args: &EvaluateArgs) -> Result<(), CliError> {
    let labels = load_labels(cli)?;
    let corpus = io::load_corpus(&args.corpus, labels)?;
    ensure_valid(&corpus)?;
    let preds = io::load_predictions(&args.preds)?;
    let report = evaluate(&corpus, &preds, args.scope)?;

    if let Some(out) = &args.out {
        let is_csv = out.extension().map_or(false, |e| e == "csv");
        let contents = if is_csv {
            render_csv(&report)
        } else {
            serde_json::to_string_pretty(&report).unwrap()
        };
        write_output(
            out,
            contents.as_bytes(),
            "evaluate",
            &[args.corpus.as_path(), args.preds.as_path()],
        )?;
    }
    if !cli.quiet {
        print!("{}", render_table(&report));
        if args.failures > 0 {
            print!("{}", render_failures(&report, args.failures));
        }
    }
    Ok(())
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> Result<(), CliError> {
    let spec = match &args.spec {
        Some(p) => io::parse_corpus_spec(&std::fs::read_to_string(p)?).map_err(|e| {
            CliError::Malformed(format!("{}:1: {e}", p.display()))
        })?,
        None => CorpusSpec::default(),
    };
    let corpus = generate_corpus(&spec)?;
    let noise = match &args.noise {
        Some(p) => io::parse_noise_spec(&std::fs::read_to_string(p)?).map_err(|e| {
            CliError::Malformed(format!("{}:1: {e}", p.display()))
        })?,
        None => NoiseSpec::uniform(&corpus.label_set, 0.0, spec.seed),
    };
    let preds = perturb(&corpus, &noise)?;

    let inputs: Vec<&Path> = args
        .spec
        .iter()
        .chain(args.noise.iter())
        .map(|p| p.as_path())
        .collect();
    write_output(
        &args.out_corpus,
        io::corpus_to_jsonl(&corpus).as_bytes(),
        "simulate",
        &inputs,
    )?;
    write_output(
        &args.out_preds,
        io::predictions_to_jsonl(&corpus, &preds).as_bytes(),
        "simulate",
        &inputs,
    )?;
    if !cli.quiet {
        println!(
            "generated {} documents, {} creditors",
            corpus.documents.len(),
            spec.num_creditors
        );
    }
    Ok(())
}

fn parse_eps_range(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(CliError::Invalid(format!(
            "schema: --eps expects start:stop:step, got {s:?}"
        )));
    };
    let parse = |t: &str| {
        t.parse::<f64>()
            .map_err(|e| CliError::Invalid(format!("schema: bad number {t:?} in --eps: {e}")))
    };
    let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
    if step <= 0.0 || start < 0.0 || stop > 1.0 || start > stop {
        return Err(CliError::Invalid(format!("schema: bad --eps range {s:?}")));
    }
    let mut eps = Vec::new();
    let mut i = 0u32;
    loop {
        let e = start + step * i as f64;
        if e > stop + 1e-12 {
            break;
        }
        eps.push(e.min(1.0));
        i += 1;
    }
    Ok(eps)
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<(), CliError> {
    let spec = match &args.spec {
        Some(p) => io::parse_corpus_spec(&std::fs::read_to_string(p)?).map_err(|e| {
            CliError::Malformed(format!("{}:1: {e}", p.display()))
        })?,
        None => CorpusSpec::default(),
    };
    let eps = parse_eps_range(&args.eps)?;
    let rows = sweep(&spec, &eps, args.scope)?;

    let mut csv = String::from("epsilon,avg_f1,dip,expected_dip\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.epsilon, r.avg_f1, r.dip, r.expected_dip
        ));
    }
    let inputs: Vec<&Path> = args.spec.iter().map(|p| p.as_path()).collect();
    write_output(&args.out, csv.as_bytes(), "sweep", &inputs)?;
    if !cli.quiet {
        println!("{} sweep rows written to {}", rows.len(), args.out.display());
    }
    Ok(())
}

fn load_report(path: &Path) -> Result<EvaluationReport, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Malformed(format!("{}:1: {e}", path.display())))
}

fn cmd_compare(cli: &Cli, args: &CompareArgs) -> Result<(), CliError> {
    let a = load_report(&args.report_a)?;
    let b = load_report(&args.report_b)?;
    let cmp = compare(&a, &b)?;
    if let Some(out) = &args.out {
        write_output(
            out,
            serde_json::to_string_pretty(&cmp).unwrap().as_bytes(),
            "compare",
            &[args.report_a.as_path(), args.report_b.as_path()],
        )?;
    }
    if !cli.quiet {
        print!("{}", render_comparison(&cmp));
    }
    Ok(())
}
