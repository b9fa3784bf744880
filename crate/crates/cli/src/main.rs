use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use vrdkit::analyze::{self, AnalyzeError, Metric, Selection, VrCountFilter, VrPattern};
use vrdkit::kg::{self, ntriples, KgError, Schema};
use vrdkit::model::{
    self, io as corpus_io, AnnotationCorpus, CorpusError, CorpusPaths, MasterList,
};
use vrdkit::protocol;
use vrdkit::workflow::{self, WorkflowConfig, WorkflowError};

/// Visual-relationship annotation toolkit.
#[derive(Parser)]
#[command(name = "vrdkit", version)]
struct Cli {
    /// Output style for read-only commands.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct CorpusArgs {
    /// Annotations JSON file.
    #[arg(long)]
    annotations: PathBuf,
    #[command(flatten)]
    lists: ListArgs,
}

impl CorpusArgs {
    fn load(&self) -> Result<AnnotationCorpus, CliError> {
        Ok(model::load_corpus(&CorpusPaths::new(
            &self.annotations,
            &self.lists.classes,
            &self.lists.predicates,
        ))?)
    }
}

#[derive(Args)]
struct ListArgs {
    /// Object-class master list JSON file.
    #[arg(long)]
    classes: PathBuf,
    /// Predicate master list JSON file.
    #[arg(long)]
    predicates: PathBuf,
}

impl ListArgs {
    fn load(&self) -> Result<(MasterList, MasterList), CliError> {
        Ok((
            corpus_io::load_master_list(&self.classes)?,
            corpus_io::load_master_list(&self.predicates)?,
        ))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Load a corpus and check its invariants.
    Validate(CorpusArgs),
    /// Summary counts.
    Stats(CorpusArgs),
    /// Images containing a relationship pattern such as `(person, wear, *)`,
    /// or images by relationship count.
    Query {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Pattern `(subject, predicate, object)`; `*` is a wildcard.
        #[arg(required_unless_present = "vr_count")]
        pattern: Option<VrPattern>,
        /// Relationship-count filter: `N`, `N..`, or `N..M`.
        #[arg(long, conflicts_with = "pattern")]
        vr_count: Option<VrCountFilter>,
    },
    /// Per-image distribution of a metric.
    Histogram {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// vrs_per_image, distinct_classes_per_image or distinct_predicates_per_image.
        #[arg(long, default_value = "vrs_per_image")]
        metric: Metric,
    },
    /// Annotation quality checks.
    Lint {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// IoU at or above which same-class boxes count as near duplicates.
        #[arg(long, default_value_t = analyze::DEFAULT_NEAR_DUP_IOU)]
        threshold: f64,
        /// Exit with status 1 when there are findings.
        #[arg(long)]
        strict: bool,
    },
    /// Draw the objects of one image as an SVG overlay.
    Overlay {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Image filename key.
        #[arg(long)]
        image: String,
        /// Comma-separated relationship indices; all when omitted.
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<usize>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate and apply a protocol script; writes annotations only with --out.
    Apply {
        #[command(flatten)]
        corpus: CorpusArgs,
        script: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multi-step customization workflows.
    Workflow {
        #[command(subcommand)]
        action: WorkflowCommand,
    },
    /// Knowledge-graph bridge.
    Kg {
        #[command(subcommand)]
        action: KgCommand,
    },
    /// Per-image differences between two annotation files sharing master lists.
    Diff {
        #[command(flatten)]
        lists: ListArgs,
        before: PathBuf,
        after: PathBuf,
    },
}

#[derive(Subcommand)]
enum WorkflowCommand {
    /// Run every step of a TOML workflow config.
    Run { config: PathBuf },
}

#[derive(Args)]
struct SchemaArgs {
    /// Schema file.
    #[arg(long)]
    schema: PathBuf,
    /// Namespace overriding the one in the schema file.
    #[arg(long)]
    base: Option<String>,
}

impl SchemaArgs {
    fn load(&self) -> Result<Schema, CliError> {
        let mut schema = Schema::load(&self.schema)?;
        if let Some(ns) = &self.base {
            schema.namespace = ns.clone();
        }
        Ok(schema)
    }
}

#[derive(Subcommand)]
enum KgCommand {
    /// Lower annotations to N-Triples.
    Lower {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        schema: SchemaArgs,
        /// Lower only this image.
        #[arg(long)]
        image: Option<String>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add every triple the schema axioms entail.
    Materialize {
        graph: PathBuf,
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild annotations from a graph.
    Extract {
        graph: PathBuf,
        #[command(flatten)]
        schema: SchemaArgs,
        #[command(flatten)]
        lists: ListArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a schema declaring one term per master-list name.
    Scaffold {
        #[command(flatten)]
        lists: ListArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Data(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Io(m) => m,
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

impl From<AnalyzeError> for CliError {
    fn from(e: AnalyzeError) -> Self {
        match e {
            AnalyzeError::Io { .. } => CliError::Io(e.to_string()),
            AnalyzeError::InvalidThreshold(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<WorkflowError> for CliError {
    fn from(e: WorkflowError) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

impl From<KgError> for CliError {
    fn from(e: KgError) -> Self {
        match e {
            KgError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| io_error(path, e))
}

/// Writes to `out` when given, otherwise to standard output.
fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut String) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, bytes),
        None => {
            stdout.push_str(&String::from_utf8_lossy(bytes));
            Ok(())
        }
    }
}

fn structured(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("json value serializes");
    s.push('\n');
    s
}

/// Runs one command, appending its standard output to `out`.
/// Returns the exit status for successful runs.
fn run(cli: Cli, out: &mut String) -> Result<u8, CliError> {
    let fmt = cli.format;
    match cli.command {
        Command::Validate(args) => {
            let c = args.load()?;
            match fmt {
                Format::Text => writeln!(
                    out,
                    "ok\t{} images\t{} relationships",
                    c.image_count(),
                    c.vr_count()
                )
                .unwrap(),
                Format::Structured => out.push_str(&structured(json!({
                    "valid": true,
                    "images": c.image_count(),
                    "vrs": c.vr_count(),
                }))),
            }
        }
        Command::Stats(args) => {
            let stats = model::compute_stats(&args.load()?);
            match fmt {
                Format::Text => write!(out, "{stats}").unwrap(),
                Format::Structured => {
                    let mut v = serde_json::to_value(stats).expect("stats serialize");
                    v["mean_vrs_per_image"] = json!(stats.mean_display());
                    out.push_str(&structured(v));
                }
            }
        }
        Command::Query {
            corpus,
            pattern,
            vr_count,
        } => {
            let c = corpus.load()?;
            if let Some(filter) = vr_count {
                let images = analyze::images_with_vr_count(&c, filter);
                match fmt {
                    Format::Text => images.iter().for_each(|i| writeln!(out, "{i}").unwrap()),
                    Format::Structured => out.push_str(&structured(json!({ "images": images }))),
                }
            } else {
                let pattern = pattern.expect("clap requires a pattern");
                let result = analyze::query_images(&c, &pattern)?;
                match fmt {
                    Format::Text => {
                        for i in &result.images {
                            writeln!(out, "{i}").unwrap();
                        }
                        for (label, set) in [
                            ("subjects", &result.subjects),
                            ("predicates", &result.predicates),
                            ("objects", &result.objects),
                        ] {
                            if let Some(set) = set {
                                let names: Vec<&str> = set.iter().map(String::as_str).collect();
                                writeln!(out, "# {label}: {}", names.join(", ")).unwrap();
                            }
                        }
                    }
                    Format::Structured => {
                        out.push_str(&structured(serde_json::to_value(&result).unwrap()))
                    }
                }
            }
        }
        Command::Histogram { corpus, metric } => {
            let h = analyze::distribution(&corpus.load()?, metric);
            match fmt {
                Format::Text => {
                    writeln!(out, "{}\timages", h.metric.name()).unwrap();
                    for (value, count) in &h.buckets {
                        writeln!(out, "{value}\t{count}").unwrap();
                    }
                }
                Format::Structured => out.push_str(&structured(serde_json::to_value(&h).unwrap())),
            }
        }
        Command::Lint {
            corpus,
            threshold,
            strict,
        } => {
            let findings = analyze::lint(&corpus.load()?, threshold)?;
            match fmt {
                Format::Text => findings.iter().for_each(|f| writeln!(out, "{f}").unwrap()),
                Format::Structured => out.push_str(&structured(json!({ "findings": findings }))),
            }
            if strict && !findings.is_empty() {
                return Ok(1);
            }
        }
        Command::Overlay {
            corpus,
            image,
            indices,
            out: path,
        } => {
            let selection = indices.map_or(Selection::All, Selection::Indices);
            analyze::render_overlay(&corpus.load()?, &image, &selection, &path)?;
        }
        Command::Apply {
            corpus,
            script,
            out: path,
        } => {
            let c = corpus.load()?;
            let bytes = std::fs::read(&script).map_err(|e| io_error(&script, e))?;
            let blocks = protocol::parse_script_bytes(&bytes)
                .map_err(|e| CliError::Data(format!("{}: {e}", script.display())))?;
            let (applied, report) = protocol::validate_and_apply(&c, &blocks)
                .map_err(|e| CliError::Data(format!("{}: {e}", script.display())))?;
            if let Some(path) = path {
                write_file(&path, &corpus_io::annotations_to_canonical_bytes(&applied))?;
            }
            match fmt {
                Format::Text => writeln!(out, "{report}").unwrap(),
                Format::Structured => {
                    out.push_str(&structured(serde_json::to_value(report).unwrap()))
                }
            }
        }
        Command::Workflow {
            action: WorkflowCommand::Run { config },
        } => {
            let cfg = WorkflowConfig::load(&config)?;
            let report = workflow::run_workflow_files(&cfg)?;
            match fmt {
                Format::Text => write!(out, "{report}").unwrap(),
                Format::Structured => out.push_str(&structured(json!({ "steps": report.steps }))),
            }
            eprintln!("workflow finished in {:.3}s", report.elapsed.as_secs_f64());
        }
        Command::Kg { action } => run_kg(action, out)?,
        Command::Diff {
            lists,
            before,
            after,
        } => {
            let load = |p: &PathBuf| {
                model::load_corpus(&CorpusPaths::new(p, &lists.classes, &lists.predicates))
            };
            let d = analyze::diff_corpora(&load(&before)?, &load(&after)?);
            match fmt {
                Format::Text => write!(out, "{d}").unwrap(),
                Format::Structured => out.push_str(&structured(serde_json::to_value(&d).unwrap())),
            }
        }
    }
    Ok(0)
}

fn run_kg(action: KgCommand, out: &mut String) -> Result<(), CliError> {
    match action {
        KgCommand::Lower {
            corpus,
            schema,
            image,
            out: path,
        } => {
            let c = corpus.load()?;
            let schema = schema.load()?;
            let store = match image {
                Some(name) => kg::lower_image(&c, &schema, &name)?,
                None => kg::lower_annotations(&c, &schema)?,
            };
            emit(
                path.as_deref(),
                ntriples::to_ntriples(&store).as_bytes(),
                out,
            )?;
        }
        KgCommand::Materialize {
            graph,
            schema,
            out: path,
        } => {
            let schema = schema.load()?;
            let mut store = ntriples::load_ntriples(&graph)?;
            let added = kg::materialize(&mut store, &schema);
            emit(
                path.as_deref(),
                ntriples::to_ntriples(&store).as_bytes(),
                out,
            )?;
            eprintln!("{added} triples inferred, {} total", store.len());
        }
        KgCommand::Extract {
            graph,
            schema,
            lists,
            out: path,
        } => {
            let schema = schema.load()?;
            let (classes, predicates) = lists.load()?;
            let store = ntriples::load_ntriples(&graph)?;
            let corpus = kg::extract_annotations(&store, &schema, &classes, &predicates)?;
            emit(
                path.as_deref(),
                &corpus_io::annotations_to_canonical_bytes(&corpus),
                out,
            )?;
        }
        KgCommand::Scaffold { lists, out: path } => {
            let (classes, predicates) = lists.load()?;
            let schema = Schema::scaffold(&classes, &predicates)?;
            emit(path.as_deref(), schema.render().as_bytes(), out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut out = String::new();
    let result = run(cli, &mut out);
    let mut stdout = std::io::stdout().lock();
    if stdout
        .write_all(out.as_bytes())
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return ExitCode::from(4);
    }
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            if matches!(e, CliError::Usage(_)) {
                eprintln!(
                    "{}",
                    <Cli as clap::CommandFactory>::command().render_usage()
                );
            }
            ExitCode::from(e.code())
        }
    }
}
