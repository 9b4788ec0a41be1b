//! Serialization. Every writer is deterministic: the same instance always
//! produces the same bytes.

mod bundle;
mod canonical;
mod caselog;
mod interchange;
mod locate;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::{BuildError, OcedInstance, RecordRef};
use crate::time::OcedTime;

pub use bundle::{read_table_bundle, read_table_bundle_lenient, write_table_bundle, BUNDLE_FILES};
pub use canonical::{read_canonical, read_canonical_lenient, write_canonical, write_canonical_with_derived};
pub use caselog::{case_log_tables, write_case_log, CASES_FILE, CASE_LOG_FILE};
pub use interchange::{export_ocel, import_ocel, import_ocel_lenient, INTERCHANGE_FORMAT};

pub const FORMAT_VERSION: &str = "0.1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormatKind {
    CanonicalDoc,
    TableBundle,
    OcelInterchange,
    CaseLogTable,
}

impl FormatKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FormatKind::CanonicalDoc => "canonicalDoc",
            FormatKind::TableBundle => "tableBundle",
            FormatKind::OcelInterchange => "ocelInterchange",
            FormatKind::CaseLogTable => "caseLogTable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FormatDescriptor {
    pub kind: &'static str,
    pub version: &'static str,
}

impl FormatDescriptor {
    pub fn of(kind: FormatKind) -> Self {
        FormatDescriptor {
            kind: kind.as_str(),
            version: FORMAT_VERSION,
        }
    }
}

/// Where in the input a record came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Text { line: usize, column: usize },
    Row { file: String, line: u64 },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Text { line, column } => write!(f, "line {line}, column {column}"),
            Location::Row { file, line } => write!(f, "{file} line {line}"),
        }
    }
}

fn join_locations(locations: &[Location]) -> String {
    locations.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at {location}: expected {expected}")]
    Parse { location: Location, expected: String },
    #[error("{error} (at {})", join_locations(.locations))]
    Build {
        error: BuildError,
        locations: Vec<Location>,
    },
    #[error("missing file {0}")]
    MissingFile(String),
    #[error("{file}: header is {found:?}, expected {expected:?}")]
    HeaderMismatch {
        file: String,
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("{file} line {line}: {found} fields, expected {expected}")]
    RowArity {
        file: String,
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("unsupported interchange construct {0:?}")]
    UnsupportedConstruct(String),
    #[error("cannot tell the format of {0}")]
    UnknownFormat(PathBuf),
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub(crate) fn serialize_time<S: Serializer>(t: &OcedTime, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Time {
        timestamp: String,
        resolution: &'static str,
    }
    Time {
        timestamp: t.timestamp_string(),
        resolution: t.resolution().as_str(),
    }
    .serialize(s)
}

/// Attaches source locations to a build error.
fn locate_build_error(error: BuildError, locate: impl Fn(RecordRef) -> Option<Location>) -> IoError {
    let locations = error.records().into_iter().filter_map(locate).collect();
    IoError::Build { error, locations }
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| IoError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| IoError::io(path, e))?;
    tmp.persist(path).map_err(|e| IoError::io(path, e.error))?;
    Ok(())
}

fn read_file(path: &Path) -> Result<Vec<u8>, IoError> {
    std::fs::read(path).map_err(|e| IoError::io(path, e))
}

/// Guesses the format of `path`: directories are table bundles, JSON files
/// are told apart by their `format` field.
pub fn detect_format(path: &Path) -> Result<FormatKind, IoError> {
    if path.is_dir() {
        return Ok(FormatKind::TableBundle);
    }
    let bytes = read_file(path)?;
    let value: serde_json::Value =
        serde_json::from_slice(&bytes).map_err(|_| IoError::UnknownFormat(path.to_path_buf()))?;
    match value.get("format") {
        Some(serde_json::Value::String(s)) if s.starts_with("ocel-interchange/") => Ok(FormatKind::OcelInterchange),
        Some(serde_json::Value::Object(o)) if o.get("kind").and_then(|k| k.as_str()) == Some("canonicalDoc") => {
            Ok(FormatKind::CanonicalDoc)
        }
        _ => Err(IoError::UnknownFormat(path.to_path_buf())),
    }
}

/// Reads an instance from a file or bundle directory.
pub fn read_path(path: &Path, kind: FormatKind) -> Result<OcedInstance, IoError> {
    match kind {
        FormatKind::CanonicalDoc => read_canonical(&read_file(path)?),
        FormatKind::OcelInterchange => import_ocel(&read_file(path)?),
        FormatKind::TableBundle => read_table_bundle(path),
        FormatKind::CaseLogTable => Err(IoError::UnknownFormat(path.to_path_buf())),
    }
}

/// Like [`read_path`], but builds leniently so validators can report every
/// problem instead of the first one.
pub fn read_path_lenient(path: &Path, kind: FormatKind) -> Result<OcedInstance, IoError> {
    match kind {
        FormatKind::CanonicalDoc => read_canonical_lenient(&read_file(path)?),
        FormatKind::OcelInterchange => import_ocel_lenient(&read_file(path)?),
        FormatKind::TableBundle => read_table_bundle_lenient(path),
        FormatKind::CaseLogTable => Err(IoError::UnknownFormat(path.to_path_buf())),
    }
}

pub fn write_path(instance: &OcedInstance, path: &Path, kind: FormatKind) -> Result<(), IoError> {
    match kind {
        FormatKind::CanonicalDoc => write_atomic(path, &write_canonical(instance)),
        FormatKind::OcelInterchange => write_atomic(path, &export_ocel(instance)?),
        FormatKind::TableBundle => write_table_bundle(instance, path),
        FormatKind::CaseLogTable => Err(IoError::UnknownFormat(path.to_path_buf())),
    }
}
