//! Table bundle: one CSV file per concept plus a small manifest.
//!
//! | file                    | columns                                             |
//! |-------------------------|-----------------------------------------------------|
//! | `objects.csv`           | id, type, meta                                      |
//! | `object_attributes.csv` | object_id, name, value_type, value, at, at_resolution |
//! | `events.csv`            | id, type, timestamp, resolution                     |
//! | `event_attributes.csv`  | event_id, name, value_type, value                   |
//! | `o2o.csv`               | source, target, type                                |
//! | `e2o.csv`               | event_id, object_id, qualifier                      |
//!
//! `manifest.json` records the format version, the form and the schema. It
//! is optional on read: without it the form is inferred from the `at`
//! column and there is no schema.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::canonical::{json_error, parse_time, parse_value, schema_dto, schema_from_dto, SchemaDto, TimeDto};
use super::{locate_build_error, write_atomic, FormatDescriptor, FormatKind, IoError, Location, FORMAT_VERSION};
use crate::model::{
    build_instance, build_lenient, Event, EventAttribute, Form, InstanceParts, ObjectAttributeValue, ObjectMeta,
    ObjectRelation, OcedInstance, OcedObject, QualifiedLink, RecordRef,
};
use crate::time::OcedTime;

const OBJECTS: (&str, &[&str]) = ("objects.csv", &["id", "type", "meta"]);
const OBJECT_ATTRIBUTES: (&str, &[&str]) = (
    "object_attributes.csv",
    &["object_id", "name", "value_type", "value", "at", "at_resolution"],
);
const EVENTS: (&str, &[&str]) = ("events.csv", &["id", "type", "timestamp", "resolution"]);
const EVENT_ATTRIBUTES: (&str, &[&str]) = ("event_attributes.csv", &["event_id", "name", "value_type", "value"]);
const O2O: (&str, &[&str]) = ("o2o.csv", &["source", "target", "type"]);
const E2O: (&str, &[&str]) = ("e2o.csv", &["event_id", "object_id", "qualifier"]);
const MANIFEST: &str = "manifest.json";

pub const BUNDLE_FILES: [&str; 6] = [
    OBJECTS.0,
    OBJECT_ATTRIBUTES.0,
    EVENTS.0,
    EVENT_ATTRIBUTES.0,
    O2O.0,
    E2O.0,
];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    format: ManifestFormat,
    form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<SchemaDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFormat {
    kind: String,
    version: String,
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

/// The seven files of a bundle, in writing order.
fn bundle_files(instance: &OcedInstance) -> Vec<(&'static str, Vec<u8>)> {
    let objects = table(
        OBJECTS.1,
        instance
            .objects()
            .iter()
            .map(|o| vec![o.id.clone(), o.object_type.clone(), o.meta.as_str().to_string()]),
    );
    let object_attributes = table(
        OBJECT_ATTRIBUTES.1,
        instance.objects().iter().flat_map(|o| {
            o.attributes.iter().map(move |a| {
                vec![
                    o.id.clone(),
                    a.name.clone(),
                    a.value.scalar_type().as_str().to_string(),
                    a.value.lexical(),
                    a.at.map(|t| t.timestamp_string()).unwrap_or_default(),
                    a.at.map(|t| t.resolution().as_str().to_string()).unwrap_or_default(),
                ]
            })
        }),
    );
    let events = table(
        EVENTS.1,
        instance.events().iter().map(|e| {
            vec![
                e.id.clone(),
                e.event_type.clone(),
                e.time.timestamp_string(),
                e.time.resolution().as_str().to_string(),
            ]
        }),
    );
    let event_attributes = table(
        EVENT_ATTRIBUTES.1,
        instance.events().iter().flat_map(|e| {
            e.attributes.iter().map(move |a| {
                vec![
                    e.id.clone(),
                    a.name.clone(),
                    a.value.scalar_type().as_str().to_string(),
                    a.value.lexical(),
                ]
            })
        }),
    );
    let o2o = table(
        O2O.1,
        instance
            .relations()
            .iter()
            .map(|r| vec![r.source_id.clone(), r.target_id.clone(), r.relation_type.clone()]),
    );
    let e2o = table(
        E2O.1,
        instance.events().iter().flat_map(|e| {
            e.observes
                .iter()
                .map(move |l| vec![e.id.clone(), l.object_id.clone(), l.qualifier.clone()])
        }),
    );
    let descriptor = FormatDescriptor::of(FormatKind::TableBundle);
    let manifest = Manifest {
        format: ManifestFormat {
            kind: descriptor.kind.to_string(),
            version: descriptor.version.to_string(),
        },
        form: instance.form().as_str().to_string(),
        schema: instance.schema().map(schema_dto),
    };
    let mut manifest = serde_json::to_vec_pretty(&manifest).expect("plain data serializes");
    manifest.push(b'\n');
    vec![
        (OBJECTS.0, objects),
        (OBJECT_ATTRIBUTES.0, object_attributes),
        (EVENTS.0, events),
        (EVENT_ATTRIBUTES.0, event_attributes),
        (O2O.0, o2o),
        (E2O.0, e2o),
        (MANIFEST, manifest),
    ]
}

pub fn write_table_bundle(instance: &OcedInstance, directory: &Path) -> Result<(), IoError> {
    std::fs::create_dir_all(directory).map_err(|e| IoError::io(directory, e))?;
    for (name, bytes) in bundle_files(instance) {
        write_atomic(&directory.join(name), &bytes)?;
    }
    Ok(())
}

// The reader reports a record as starting at the previous terminator when
// lines end in CRLF, so count lines from the first byte of the record itself.
fn line_of(bytes: &[u8], byte: u64) -> u64 {
    let mut at = byte as usize;
    while matches!(bytes.get(at), Some(b'\r' | b'\n')) {
        at += 1;
    }
    bytes[..at.min(bytes.len())].iter().filter(|&&b| b == b'\n').count() as u64 + 1
}

/// Rows of one file with their line numbers.
fn read_table(directory: &Path, (name, header): (&str, &[&str])) -> Result<Vec<(u64, csv::StringRecord)>, IoError> {
    let path = directory.join(name);
    if !path.is_file() {
        return Err(IoError::MissingFile(name.to_string()));
    }
    let bytes = std::fs::read(&path).map_err(|e| IoError::io(&path, e))?;
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(bytes.as_slice());
    let csv_error = |e: csv::Error| IoError::Parse {
        location: Location::Row {
            file: name.to_string(),
            line: e.position().map_or(0, |p| p.line()),
        },
        expected: format!("valid CSV ({e})"),
    };
    let found: Vec<String> = r.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    if found != header {
        return Err(IoError::HeaderMismatch {
            file: name.to_string(),
            expected: header.iter().map(|s| s.to_string()).collect(),
            found,
        });
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| line_of(&bytes, p.byte()));
        if record.len() != header.len() {
            return Err(IoError::RowArity {
                file: name.to_string(),
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        rows.push((line, record));
    }
    Ok(rows)
}

struct Lines {
    objects: Vec<u64>,
    object_attributes: Vec<Vec<u64>>,
    events: Vec<u64>,
    event_attributes: Vec<Vec<u64>>,
    links: Vec<Vec<u64>>,
    relations: Vec<u64>,
}

impl Lines {
    fn locate(&self, r: RecordRef) -> Option<Location> {
        let (file, line) = match r {
            RecordRef::Object(i) => (OBJECTS.0, *self.objects.get(i)?),
            RecordRef::ObjectAttribute { object, attribute } => (
                OBJECT_ATTRIBUTES.0,
                *self.object_attributes.get(object)?.get(attribute)?,
            ),
            RecordRef::Event(i) => (EVENTS.0, *self.events.get(i)?),
            RecordRef::EventAttribute { event, attribute } => {
                (EVENT_ATTRIBUTES.0, *self.event_attributes.get(event)?.get(attribute)?)
            }
            RecordRef::Link { event, link } => (E2O.0, *self.links.get(event)?.get(link)?),
            RecordRef::Relation(i) => (O2O.0, *self.relations.get(i)?),
        };
        Some(Location::Row {
            file: file.to_string(),
            line,
        })
    }
}

fn row_at(file: &str, line: u64) -> Location {
    Location::Row {
        file: file.to_string(),
        line,
    }
}

fn read_parts(directory: &Path) -> Result<(InstanceParts, Lines), IoError> {
    if !directory.is_dir() {
        return Err(IoError::MissingFile(directory.display().to_string()));
    }
    let manifest_path = directory.join(MANIFEST);
    let manifest: Option<Manifest> = if manifest_path.is_file() {
        let bytes = std::fs::read(&manifest_path).map_err(|e| IoError::io(&manifest_path, e))?;
        let m: Manifest = serde_json::from_slice(&bytes).map_err(json_error)?;
        if m.format.kind != FormatKind::TableBundle.as_str() || m.format.version != FORMAT_VERSION {
            return Err(IoError::Parse {
                location: row_at(MANIFEST, 1),
                expected: format!("format tableBundle/{FORMAT_VERSION}"),
            });
        }
        Some(m)
    } else {
        None
    };

    let mut objects = Vec::new();
    let mut lines = Lines {
        objects: Vec::new(),
        object_attributes: Vec::new(),
        events: Vec::new(),
        event_attributes: Vec::new(),
        links: Vec::new(),
        relations: Vec::new(),
    };
    let mut object_index: HashMap<String, usize> = HashMap::new();
    for (line, row) in read_table(directory, OBJECTS)? {
        let meta = ObjectMeta::parse(&row[2]).ok_or_else(|| IoError::Parse {
            location: row_at(OBJECTS.0, line),
            expected: format!("an object meta kind, found {:?}", &row[2]),
        })?;
        object_index.entry(row[0].to_string()).or_insert(objects.len());
        objects.push(OcedObject::new(&row[0], &row[1]).with_meta(meta));
        lines.objects.push(line);
        lines.object_attributes.push(Vec::new());
    }
    let mut any_stamped = false;
    for (line, row) in read_table(directory, OBJECT_ATTRIBUTES)? {
        let here = row_at(OBJECT_ATTRIBUTES.0, line);
        let &i = object_index.get(&row[0]).ok_or_else(|| IoError::Parse {
            location: here.clone(),
            expected: format!("an object id listed in {}, found {:?}", OBJECTS.0, &row[0]),
        })?;
        let at = match (&row[4], &row[5]) {
            ("", "") => None,
            (ts, res) => Some(parse_time(
                &TimeDto {
                    timestamp: ts.to_string(),
                    resolution: if res.is_empty() {
                        "millisecond".into()
                    } else {
                        res.to_string()
                    },
                },
                &here,
            )?),
        };
        any_stamped |= at.is_some();
        objects[i].attributes.push(ObjectAttributeValue {
            name: row[1].to_string(),
            value: parse_value(&row[2], &row[3], &here)?,
            at,
        });
        lines.object_attributes[i].push(line);
    }

    let mut events = Vec::new();
    let mut event_index: HashMap<String, usize> = HashMap::new();
    for (line, row) in read_table(directory, EVENTS)? {
        let here = row_at(EVENTS.0, line);
        let time: OcedTime = parse_time(
            &TimeDto {
                timestamp: row[2].to_string(),
                resolution: row[3].to_string(),
            },
            &here,
        )?;
        event_index.entry(row[0].to_string()).or_insert(events.len());
        events.push(Event::new(&row[0], &row[1], time));
        lines.events.push(line);
        lines.event_attributes.push(Vec::new());
        lines.links.push(Vec::new());
    }
    let event_of = |id: &str, file: &str, line: u64| {
        event_index.get(id).copied().ok_or_else(|| IoError::Parse {
            location: row_at(file, line),
            expected: format!("an event id listed in {}, found {id:?}", EVENTS.0),
        })
    };
    for (line, row) in read_table(directory, EVENT_ATTRIBUTES)? {
        let i = event_of(&row[0], EVENT_ATTRIBUTES.0, line)?;
        events[i].attributes.push(EventAttribute {
            name: row[1].to_string(),
            value: parse_value(&row[2], &row[3], &row_at(EVENT_ATTRIBUTES.0, line))?,
        });
        lines.event_attributes[i].push(line);
    }
    for (line, row) in read_table(directory, E2O)? {
        let i = event_of(&row[0], E2O.0, line)?;
        events[i].observes.push(QualifiedLink::new(&row[1], &row[2]));
        lines.links[i].push(line);
    }

    let mut relations = Vec::new();
    for (line, row) in read_table(directory, O2O)? {
        relations.push(ObjectRelation::new(&row[0], &row[1], &row[2]));
        lines.relations.push(line);
    }

    let (form, schema) = match manifest {
        Some(m) => {
            let form = Form::parse(&m.form).ok_or_else(|| IoError::Parse {
                location: row_at(MANIFEST, 1),
                expected: format!("form \"baseline\" or \"timestamped\", found {:?}", m.form),
            })?;
            let schema = m
                .schema
                .map(|s| schema_from_dto(s, || row_at(MANIFEST, 1)))
                .transpose()?;
            (form, schema)
        }
        None if any_stamped => (Form::Timestamped, None),
        None => (Form::Baseline, None),
    };
    Ok((
        InstanceParts {
            objects,
            events,
            relations,
            schema,
            form,
        },
        lines,
    ))
}

pub fn read_table_bundle(directory: &Path) -> Result<OcedInstance, IoError> {
    let (parts, lines) = read_parts(directory)?;
    build_instance(parts).map_err(|e| locate_build_error(e, |r| lines.locate(r)))
}

pub fn read_table_bundle_lenient(directory: &Path) -> Result<OcedInstance, IoError> {
    Ok(build_lenient(read_parts(directory)?.0))
}
