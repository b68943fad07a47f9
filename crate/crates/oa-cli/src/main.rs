//! `annotate`: create, anchor, validate, convert, publish, and discover
//! web annotations from the command line.
//!
//! stdout carries data only (JSON documents, reports, records); every
//! diagnostic goes to stderr. Exit codes: 0 ok, 2 usage or validation,
//! 3 not found, 4 out of range, 5 partial conversion, 6 network.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oa_core::{
    export_annotea, from_document, import_annotea, new_annotation, resolve_text_position,
    resolve_text_quote, to_document, validate, Agent, AnchoredSpan, AnnoteaRecord, DocText, Iri,
    Motivation, Provenance, ResourceRef, SelectorError, VocabularyConfig,
};
use oa_server::{ConfigLayer, ServeError, ServiceConfig};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "annotate",
    version,
    about = "Work with web annotations as first-class objects"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an annotation document and print it
    Create(CreateArgs),
    /// Locate a text quote or position inside a document
    Anchor(AnchorArgs),
    /// Check an annotation document against the model rules
    Validate(ValidateArgs),
    /// Convert between Annotea records and annotation documents
    Convert(ConvertArgs),
    /// Query a running annotation service
    Query(QueryArgs),
    /// Run the annotation HTTP service
    Serve(ServeArgs),
}

#[derive(Args)]
struct CreateArgs {
    /// Annotated resource IRI; repeat for multiple targets
    #[arg(long, required = true)]
    target: Vec<String>,
    /// Embedded text body; repeatable
    #[arg(long)]
    body_text: Vec<String>,
    /// External resource body IRI; repeatable
    #[arg(long)]
    body_iri: Vec<String>,
    /// Semantic tag concept IRI; repeatable
    #[arg(long)]
    tag: Vec<String>,
    /// Motivation name: commenting, tagging, bookmarking, questioning,
    /// replying, or describing
    #[arg(long, conflicts_with = "motivation_iri")]
    motivation: Option<String>,
    /// Extension motivation IRI for motivations outside the named set
    #[arg(long)]
    motivation_iri: Option<String>,
    /// Author name recorded as annotatedBy
    #[arg(long)]
    author: Option<String>,
}

#[derive(Args)]
struct AnchorArgs {
    /// UTF-8 text document to anchor into
    #[arg(long)]
    doc: PathBuf,
    /// Exact text to find
    #[arg(long, required_unless_present = "start", conflicts_with_all = ["start", "end"])]
    quote: Option<String>,
    /// Context expected immediately before the quote
    #[arg(long, requires = "quote")]
    prefix: Option<String>,
    /// Context expected immediately after the quote
    #[arg(long, requires = "quote")]
    suffix: Option<String>,
    /// Code point offset where the span starts
    #[arg(long, requires = "end")]
    start: Option<usize>,
    /// Code point offset where the span ends (exclusive)
    #[arg(long, requires = "start")]
    end: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// JSON-LD annotation document to check
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConvertFormat {
    Annotea,
    Oa,
}

#[derive(Args)]
struct ConvertArgs {
    /// Format of the input file
    #[arg(long)]
    from: ConvertFormat,
    /// Format to produce
    #[arg(long)]
    to: ConvertFormat,
    /// Input file: a JSON array or concatenated JSON values
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    /// Base URL of a running annotation service
    #[arg(long)]
    server: String,
    /// Match annotations targeting this source IRI
    #[arg(long)]
    target: Option<String>,
    /// Match annotations carrying this semantic tag IRI
    #[arg(long)]
    tag: Option<String>,
    /// Match annotations by author name or IRI
    #[arg(long)]
    author: Option<String>,
    /// Match annotations made at or after this RFC 3339 timestamp
    #[arg(long)]
    since: Option<String>,
    /// Page size
    #[arg(long)]
    limit: Option<usize>,
    /// Matches to skip before the page starts
    #[arg(long)]
    offset: Option<usize>,
}

#[derive(Args)]
struct ServeArgs {
    /// Config file, JSON or key=value lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Address and port to listen on
    #[arg(long)]
    bind: Option<String>,
    /// IRI prefix for assigned annotation ids
    #[arg(long)]
    base_uri: Option<String>,
    /// Store directory
    #[arg(long)]
    store: Option<PathBuf>,
    /// Largest accepted request body in bytes
    #[arg(long)]
    max_body_bytes: Option<usize>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

const EXIT_USAGE: i32 = 2;
const EXIT_NOT_FOUND: i32 = 3;
const EXIT_RANGE: i32 = 4;
const EXIT_PARTIAL: i32 = 5;
const EXIT_NETWORK: i32 = 6;

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Create(args) => run_create(args),
        Command::Anchor(args) => run_anchor(args),
        Command::Validate(args) => run_validate(args),
        Command::Convert(args) => run_convert(args),
        Command::Query(args) => run_query(args),
        Command::Serve(args) => run_serve(args),
    };
    if let Err(failure) = outcome {
        if !failure.message.is_empty() {
            eprintln!("annotate: {}", failure.message);
        }
        std::process::exit(failure.code);
    }
}

fn vocabulary() -> VocabularyConfig {
    VocabularyConfig::default()
}

fn parse_iri(flag: &str, raw: &str) -> Result<Iri, Failure> {
    Iri::new(raw).map_err(|e| Failure::new(EXIT_USAGE, format!("--{flag} {raw:?}: {e}")))
}

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn print_document(doc: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(doc).expect("document serializes")
    );
}

fn run_create(args: CreateArgs) -> Result<(), Failure> {
    let mut targets = Vec::new();
    for raw in &args.target {
        targets.push(ResourceRef::external(parse_iri("target", raw)?));
    }

    let mut bodies = Vec::new();
    for raw in &args.body_iri {
        bodies.push(ResourceRef::external(parse_iri("body-iri", raw)?));
    }
    for text in &args.body_text {
        bodies.push(ResourceRef::embedded(oa_core::EmbeddedContent::text(text)));
    }
    for raw in &args.tag {
        bodies.push(ResourceRef::tag(parse_iri("tag", raw)?));
    }

    let motivation = match (&args.motivation, &args.motivation_iri) {
        (Some(name), _) => Some(Motivation::from_name(name).ok_or_else(|| {
            Failure::new(
                EXIT_USAGE,
                format!(
                    "--motivation {name:?} is not one of commenting, tagging, bookmarking, \
                     questioning, replying, describing; use --motivation-iri for extensions"
                ),
            )
        })?),
        (None, Some(raw)) => Some(Motivation::Extension(parse_iri("motivation-iri", raw)?)),
        (None, None) => None,
    };

    let provenance = Provenance {
        annotated_by: args.author.map(Agent::named),
        ..Provenance::default()
    };

    let annotation = new_annotation(targets, bodies, motivation, provenance)
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let doc = to_document(&annotation, &vocabulary())
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    print_document(&doc);
    Ok(())
}

fn run_anchor(args: AnchorArgs) -> Result<(), Failure> {
    let text = read_input(&args.doc)?;
    let doc = DocText::new(&text);

    let (span, ambiguous) = if let Some(quote) = &args.quote {
        let AnchoredSpan { span, ambiguous } =
            resolve_text_quote(&doc, quote, args.prefix.as_deref(), args.suffix.as_deref())
                .map_err(|e| Failure::new(selector_exit_code(&e), e.to_string()))?;
        (span, ambiguous)
    } else {
        let (start, end) = (
            args.start.expect("clap guarantees start"),
            args.end.expect("clap guarantees end"),
        );
        let span = resolve_text_position(&doc, start, end)
            .map_err(|e| Failure::new(selector_exit_code(&e), e.to_string()))?;
        (span, false)
    };

    let report = json!({
        "start": span.start,
        "end": span.end,
        "excerpt": doc.slice(span),
        "ambiguous": ambiguous,
    });
    println!("{report}");
    Ok(())
}

fn selector_exit_code(e: &SelectorError) -> i32 {
    match e {
        SelectorError::NotFound => EXIT_NOT_FOUND,
        SelectorError::OutOfRange { .. } | SelectorError::InvalidSpan { .. } => EXIT_RANGE,
        SelectorError::Malformed { .. } => EXIT_USAGE,
    }
}

fn run_validate(args: ValidateArgs) -> Result<(), Failure> {
    let text = read_input(&args.input)?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("input is not JSON: {e}")))?;
    let annotation =
        from_document(&doc, &vocabulary()).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let report = validate(&annotation);
    let violations: Vec<Value> = report
        .violations()
        .iter()
        .map(|v| json!({ "path": v.path, "message": v.message }))
        .collect();
    let valid = violations.is_empty();
    println!("{}", json!({ "valid": valid, "violations": violations }));
    if valid {
        Ok(())
    } else {
        Err(Failure::new(EXIT_USAGE, "annotation document is invalid"))
    }
}

fn read_json_values(path: &Path) -> Result<Vec<Value>, Failure> {
    let text = read_input(path)?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let parse_failure =
        |e: serde_json::Error| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display()));
    if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(parse_failure)
    } else {
        serde_json::Deserializer::from_str(&text)
            .into_iter()
            .collect::<Result<Vec<Value>, _>>()
            .map_err(parse_failure)
    }
}

fn run_convert(args: ConvertArgs) -> Result<(), Failure> {
    if args.from == args.to {
        return Err(Failure::new(EXIT_USAGE, "--from and --to must differ"));
    }
    let values = read_json_values(&args.input)?;

    match args.from {
        ConvertFormat::Annotea => {
            for (index, value) in values.iter().enumerate() {
                let record: AnnoteaRecord = serde_json::from_value(value.clone())
                    .map_err(|e| Failure::new(EXIT_USAGE, format!("record {}: {e}", index + 1)))?;
                let annotation = import_annotea(&record)
                    .map_err(|e| Failure::new(EXIT_USAGE, format!("record {}: {e}", index + 1)))?;
                let doc = to_document(&annotation, &vocabulary())
                    .map_err(|e| Failure::new(EXIT_USAGE, format!("record {}: {e}", index + 1)))?;
                println!("{doc}");
            }
            Ok(())
        }
        ConvertFormat::Oa => {
            let mut failed = 0usize;
            for (index, value) in values.iter().enumerate() {
                let annotation = from_document(value, &vocabulary()).map_err(|e| {
                    Failure::new(EXIT_USAGE, format!("document {}: {e}", index + 1))
                })?;
                match export_annotea(&annotation) {
                    Ok(record) => println!(
                        "{}",
                        serde_json::to_string(&record).expect("record serializes")
                    ),
                    Err(e) => {
                        eprintln!("annotate: document {}: {e}", index + 1);
                        failed += 1;
                    }
                }
            }
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::new(
                    EXIT_PARTIAL,
                    format!("{failed} of {} documents not representable", values.len()),
                ))
            }
        }
    }
}

fn run_query(args: QueryArgs) -> Result<(), Failure> {
    if let Some(raw) = &args.target {
        parse_iri("target", raw)?;
    }
    if let Some(raw) = &args.tag {
        parse_iri("tag", raw)?;
    }

    let mut params: Vec<(&str, String)> = Vec::new();
    if let Some(v) = args.target {
        params.push(("target", v));
    }
    if let Some(v) = args.tag {
        params.push(("tag", v));
    }
    if let Some(v) = args.author {
        params.push(("author", v));
    }
    if let Some(v) = args.since {
        params.push(("since", v));
    }
    if let Some(v) = args.limit {
        params.push(("limit", v.to_string()));
    }
    if let Some(v) = args.offset {
        params.push(("offset", v.to_string()));
    }

    let mut url = format!("{}/annotations", args.server.trim_end_matches('/'));
    if !params.is_empty() {
        let query = serde_urlencoded::to_string(&params)
            .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
        url.push('?');
        url.push_str(&query);
    }

    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(30)))
        .build()
        .new_agent();
    let mut response = agent
        .get(&url)
        .call()
        .map_err(|e| Failure::new(EXIT_NETWORK, format!("network error: {e}")))?;
    let status = response.status();
    let body = response
        .body_mut()
        .read_to_string()
        .map_err(|e| Failure::new(EXIT_NETWORK, format!("network error: {e}")))?;
    if status.as_u16() != 200 {
        return Err(Failure::new(
            EXIT_NETWORK,
            format!("server returned {status}: {}", body.trim_end()),
        ));
    }
    print!("{body}");
    if !body.ends_with('\n') {
        println!();
    }
    Ok(())
}

fn run_serve(args: ServeArgs) -> Result<(), Failure> {
    let overrides = ConfigLayer {
        bind: args.bind,
        base_uri: args.base_uri,
        store: args.store.map(|p| p.display().to_string()),
        max_body_bytes: args.max_body_bytes.map(|n| n.to_string()),
        ..ConfigLayer::default()
    };
    let cfg = ServiceConfig::load(args.config.as_deref(), overrides)
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    oa_server::run_blocking(cfg).map_err(|e| match e {
        ServeError::Store(inner) => Failure::new(EXIT_USAGE, inner.to_string()),
        ServeError::Io(inner) => Failure::new(EXIT_NETWORK, inner.to_string()),
    })
}
