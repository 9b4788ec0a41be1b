//! `oced`: validate, convert, flatten and inspect object-centric event data.
//!
//! Exit codes: 0 when nothing reaches the failing severity, 1 when findings
//! (or a data-level failure such as a broken precondition) do, 2 for usage
//! and IO errors that stop us before the data is looked at.

mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oced_core::finding::{sort_findings, Severity};
use oced_core::io::{self, FormatKind, IoError};
use oced_core::model::OcedInstance;
use oced_core::semantics::{derive_object_lifecycles_with, derive_relation_lifecycles_with, LifecycleOptions};
use oced_core::transform::{self, FlattenConfig, TransformError};
use oced_core::validate::{self, ReferenceAttributeMarker};
use oced_core::Finding;

use report::{Report, ReportFormat};

pub const EXIT_CLEAN: u8 = 0;
pub const EXIT_FINDINGS: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "oced", version, about = "Object-centric event data toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance and report findings
    Validate(ValidateArgs),
    /// Rewrite an instance in another format or modeling style
    Convert(ConvertArgs),
    /// Project an instance onto one case object type
    Flatten(FlattenArgs),
    /// Print derived object and relation lifecycles
    Lifecycle(LifecycleArgs),
    /// Print counts per type and qualifier
    Stats(InputArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Auto,
    Canonical,
    Bundle,
    Ocel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Canonical,
    Bundle,
    Ocel,
}

impl OutputFormat {
    fn kind(self) -> FormatKind {
        match self {
            OutputFormat::Canonical => FormatKind::CanonicalDoc,
            OutputFormat::Bundle => FormatKind::TableBundle,
            OutputFormat::Ocel => FormatKind::OcelInterchange,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExitPolicy {
    #[value(name = "errorsFail")]
    ErrorsFail,
    #[value(name = "warningsFail")]
    WarningsFail,
    #[value(name = "neverFail")]
    NeverFail,
}

impl ExitPolicy {
    fn exit_code(self, findings: &[Finding]) -> u8 {
        let failing = match self {
            ExitPolicy::ErrorsFail => Severity::Error,
            ExitPolicy::WarningsFail => Severity::Warning,
            ExitPolicy::NeverFail => return EXIT_CLEAN,
        };
        if oced_core::finding::count_at_least(findings, failing) > 0 {
            EXIT_FINDINGS
        } else {
            EXIT_CLEAN
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Canonical document, interchange document or bundle directory
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    input_format: InputFormat,
    /// Report style
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Also report the pair-reading and style warnings
    #[arg(long)]
    strict: bool,
    /// File with a JSON list of reference-attribute markers
    #[arg(long)]
    markers: Option<PathBuf>,
    /// Report co-observed pairs with no relation between them
    #[arg(long)]
    suggest: bool,
    #[arg(long, value_enum, default_value = "errorsFail")]
    exit_policy: ExitPolicy,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output file, or directory for a bundle
    #[arg(short, long)]
    output: PathBuf,
    /// Output format; guessed from the output path when omitted
    #[arg(long, value_enum)]
    to: Option<OutputFormat>,
    /// Split a timestamped instance into snapshot objects, using this
    /// JSON file mapping object type to identity attribute
    #[arg(long, value_name = "MAPPING", conflicts_with = "to_timestamped")]
    to_snapshots: Option<PathBuf>,
    /// Merge snapshot objects into a timestamped instance, using this
    /// JSON file mapping object type to identity attribute
    #[arg(long, value_name = "MAPPING")]
    to_timestamped: Option<PathBuf>,
}

#[derive(Args)]
struct FlattenArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    case_type: String,
    #[arg(long, default_value_t = 0)]
    hops: usize,
    /// Only traverse these relation types (repeatable)
    #[arg(long = "relation-type")]
    relation_types: Vec<String>,
    /// Directory for the case-log tables; the case log goes to stdout otherwise
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LifecycleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Cascade through a single CHILD_OF level only
    #[arg(long)]
    direct_only: bool,
    #[arg(long, value_enum, default_value = "errorsFail")]
    exit_policy: ExitPolicy,
}

/// Why a command stopped early.
enum Failure {
    Usage(String),
    Data(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Build { .. } => Failure::Data(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::HopLimit(_) => Failure::Usage(e.to_string()),
            TransformError::SnapshotChain(findings) => {
                Failure::Data(findings.iter().map(Finding::report_line).collect::<Vec<_>>().join("\n"))
            }
            other => Failure::Data(other.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate(a) => cmd_validate(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Flatten(a) => cmd_flatten(a),
        Command::Lifecycle(a) => cmd_lifecycle(a),
        Command::Stats(a) => cmd_stats(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("oced: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("oced: {msg}");
            ExitCode::from(EXIT_FINDINGS)
        }
    }
}

fn input_kind(args: &InputArgs) -> Result<FormatKind, Failure> {
    Ok(match args.input_format {
        InputFormat::Auto => io::detect_format(&args.input)?,
        InputFormat::Canonical => FormatKind::CanonicalDoc,
        InputFormat::Bundle => FormatKind::TableBundle,
        InputFormat::Ocel => FormatKind::OcelInterchange,
    })
}

fn read_input(args: &InputArgs) -> Result<OcedInstance, Failure> {
    Ok(io::read_path(&args.input, input_kind(args)?)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_validate(args: ValidateArgs) -> Outcome {
    let kind = input_kind(&args.input)?;
    let instance = io::read_path_lenient(&args.input.input, kind)?;
    let markers: Vec<ReferenceAttributeMarker> = match &args.markers {
        Some(path) => read_json(path)?,
        None => Vec::new(),
    };

    let mut findings = validate::validate_core(&instance, args.strict);
    // the remaining checks assume resolvable references
    if instance.violations().is_empty() {
        if instance.schema().is_some() {
            findings.extend(validate::validate_schema(&instance).unwrap_or_default());
        }
        findings.extend(validate::check_reference_consistency(&instance, &markers));
        findings.extend(validate::check_meta_consistency(&instance));
        if args.suggest {
            findings.extend(validate::implicit_relation_findings(&instance));
        }
    }
    sort_findings(&mut findings);
    findings.dedup();

    let mut out = Report::new("validate", args.input.format);
    out.findings(&findings);
    out.emit(&instance);
    Ok(args.exit_policy.exit_code(&findings))
}

fn output_kind(args: &ConvertArgs) -> Result<FormatKind, Failure> {
    if let Some(to) = args.to {
        return Ok(to.kind());
    }
    let name = args.output.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    if name.ends_with(".ocel.json") {
        Ok(FormatKind::OcelInterchange)
    } else if name.ends_with(".json") {
        Ok(FormatKind::CanonicalDoc)
    } else if args.output.is_dir() || !name.contains('.') {
        Ok(FormatKind::TableBundle)
    } else {
        Err(Failure::Usage(format!(
            "cannot tell the output format of {}; pass --to",
            args.output.display()
        )))
    }
}

fn cmd_convert(args: ConvertArgs) -> Outcome {
    let kind = output_kind(&args)?;
    let mut instance = read_input(&args.input)?;
    let mut findings = Vec::new();
    if let Some(path) = &args.to_snapshots {
        let identity: BTreeMap<String, String> = read_json(path)?;
        instance = transform::baseline_to_snapshots(&instance, &identity)?;
    }
    if let Some(path) = &args.to_timestamped {
        let identity: BTreeMap<String, String> = read_json(path)?;
        let (merged, warnings) = transform::snapshots_to_timestamped(&instance, &identity)?;
        instance = merged;
        findings = warnings;
    }
    if kind == FormatKind::TableBundle {
        std::fs::create_dir_all(&args.output).map_err(|e| Failure::Usage(format!("{}: {e}", args.output.display())))?;
    }
    match io::write_path(&instance, &args.output, kind) {
        Ok(()) => {}
        Err(e @ IoError::UnsupportedConstruct(_)) => return Err(Failure::Data(e.to_string())),
        Err(e) => return Err(e.into()),
    }

    let mut out = Report::new("convert", args.input.format);
    out.row(["wrote", kind.as_str(), &args.output.display().to_string()]);
    out.findings(&findings);
    out.emit(&instance);
    Ok(EXIT_CLEAN)
}

fn cmd_flatten(args: FlattenArgs) -> Outcome {
    let instance = read_input(&args.input)?;
    let mut config = FlattenConfig::new(&args.case_type, args.hops);
    if !args.relation_types.is_empty() {
        config.hop_relation_types = Some(args.relation_types.clone());
    }
    let log = transform::flatten_case_centric(&instance, &config)?;

    let rows = log.event_count();
    let distinct = log
        .traces
        .values()
        .flatten()
        .map(|e| e.event_id.as_str())
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    let duplication = if distinct == 0 {
        0.0
    } else {
        rows as f64 / distinct as f64
    };

    if let Some(dir) = &args.output {
        io::write_case_log(&log, dir)?;
    }
    let mut out = Report::new("flatten", args.input.format);
    out.row(["case_type", &log.case_type]);
    out.row(["traces", &log.traces.len().to_string()]);
    out.row(["events", &rows.to_string()]);
    out.row(["duplication", &format!("{duplication:.3}")]);
    out.emit(&instance);
    if args.output.is_none() {
        report::print_raw(&io::case_log_tables(&log).0);
    }
    Ok(EXIT_CLEAN)
}

fn cmd_lifecycle(args: LifecycleArgs) -> Outcome {
    let instance = read_input(&args.input)?;
    let options = LifecycleOptions {
        transitive: !args.direct_only,
    };
    let objects = derive_object_lifecycles_with(&instance, options);
    let relations = derive_relation_lifecycles_with(&instance, options);
    let mut findings: Vec<Finding> = objects.findings.iter().chain(&relations.findings).cloned().collect();
    sort_findings(&mut findings);
    findings.dedup();

    let mut out = Report::new("lifecycle", args.input.format);
    out.lifecycles(&objects, &relations);
    out.findings(&findings);
    out.emit(&instance);
    Ok(args.exit_policy.exit_code(&findings))
}

fn cmd_stats(args: InputArgs) -> Outcome {
    let instance = read_input(&args)?;
    let mut out = Report::new("stats", args.format);
    out.stats(&instance);
    out.emit(&instance);
    Ok(EXIT_CLEAN)
}
