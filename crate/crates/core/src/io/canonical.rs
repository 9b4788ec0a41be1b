//! The canonical JSON document.
//!
//! ```text
//! {
//!   "format": {"kind": "canonicalDoc", "version": "0.1"},
//!   "form": "baseline" | "timestamped",
//!   "schema": {...},          optional
//!   "objects": [{"id", "type", "meta"?, "attributes": [{"name", "valueType", "value", "at"?}]}],
//!   "events": [{"id", "type", "time": {"timestamp", "resolution"}, "attributes": [...], "observes": [{"object", "qualifier"}]}],
//!   "relations": [{"source", "target", "type"}],
//!   "derived": {...}          optional, written by tools, ignored on read
//! }
//! ```
//!
//! All scalar values are written as strings; `valueType` says how to read
//! them back.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::locate::{element_positions, Positions};
use super::{locate_build_error, FormatDescriptor, FormatKind, IoError, Location, FORMAT_VERSION};
use crate::model::{
    build_instance, build_lenient, Event, EventAttribute, Form, InstanceParts, ObjectAttributeValue, ObjectMeta,
    ObjectRelation, OcedInstance, OcedObject, QualifiedLink, RecordRef,
};
use crate::schema::{OcedSchema, RelationDecl};
use crate::time::{OcedTime, Resolution};
use crate::value::{ScalarType, ScalarValue};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormatDto {
    kind: String,
    version: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct TimeDto {
    pub timestamp: String,
    pub resolution: String,
}

impl From<OcedTime> for TimeDto {
    fn from(t: OcedTime) -> Self {
        TimeDto {
            timestamp: t.timestamp_string(),
            resolution: t.resolution().as_str().to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct AttrDto {
    name: String,
    value_type: String,
    value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    at: Option<TimeDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct EventAttrDto {
    name: String,
    value_type: String,
    value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectDto {
    id: String,
    #[serde(rename = "type")]
    object_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<String>,
    attributes: Vec<AttrDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkDto {
    object: String,
    qualifier: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventDto {
    id: String,
    #[serde(rename = "type")]
    event_type: String,
    time: TimeDto,
    attributes: Vec<EventAttrDto>,
    observes: Vec<LinkDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct RelationDto {
    source: String,
    target: String,
    #[serde(rename = "type")]
    relation_type: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub(super) struct SchemaDto {
    pub event_types: BTreeMap<String, BTreeMap<String, String>>,
    pub object_types: BTreeMap<String, BTreeMap<String, String>>,
    pub relation_types: Vec<RelationDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    format: FormatDto,
    form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<SchemaDto>,
    objects: Vec<ObjectDto>,
    events: Vec<EventDto>,
    relations: Vec<RelationDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    derived: Option<serde_json::Value>,
}

pub(super) fn schema_dto(schema: &OcedSchema) -> SchemaDto {
    let types = |m: &BTreeMap<String, BTreeMap<String, ScalarType>>| {
        m.iter()
            .map(|(k, v)| {
                (
                    k.clone(),
                    v.iter().map(|(a, t)| (a.clone(), t.as_str().to_string())).collect(),
                )
            })
            .collect()
    };
    SchemaDto {
        event_types: types(schema.event_types()),
        object_types: types(schema.object_types()),
        relation_types: schema
            .relation_types()
            .iter()
            .map(|d| RelationDto {
                source: d.source_type.clone(),
                target: d.target_type.clone(),
                relation_type: d.relation_type.clone(),
            })
            .collect(),
    }
}

pub(super) fn schema_from_dto(dto: SchemaDto, at: impl Fn() -> Location) -> Result<OcedSchema, IoError> {
    let bad = |expected: String| IoError::Parse {
        location: at(),
        expected,
    };
    let types =
        |m: BTreeMap<String, BTreeMap<String, String>>| -> Result<Vec<(String, Vec<(String, ScalarType)>)>, IoError> {
            m.into_iter()
                .map(|(k, v)| {
                    let attrs = v
                        .into_iter()
                        .map(|(a, t)| {
                            t.parse()
                                .map(|t| (a, t))
                                .map_err(|_| bad(format!("a value type, found {t:?}")))
                        })
                        .collect::<Result<_, _>>()?;
                    Ok((k, attrs))
                })
                .collect()
        };
    let event_types = types(dto.event_types)?;
    let object_types = types(dto.object_types)?;
    let relations = dto
        .relation_types
        .into_iter()
        .map(|r| RelationDecl::new(r.relation_type, r.source, r.target))
        .collect();
    OcedSchema::new(event_types, object_types, relations).map_err(|e| bad(format!("a valid schema ({e})")))
}

fn doc(instance: &OcedInstance, derived: Option<serde_json::Value>) -> Doc {
    Doc {
        format: FormatDto {
            kind: FormatDescriptor::of(FormatKind::CanonicalDoc).kind.to_string(),
            version: FORMAT_VERSION.to_string(),
        },
        form: instance.form().as_str().to_string(),
        schema: instance.schema().map(schema_dto),
        objects: instance
            .objects()
            .iter()
            .map(|o| ObjectDto {
                id: o.id.clone(),
                object_type: o.object_type.clone(),
                meta: (o.meta != ObjectMeta::Plain).then(|| o.meta.as_str().to_string()),
                attributes: o
                    .attributes
                    .iter()
                    .map(|a| AttrDto {
                        name: a.name.clone(),
                        value_type: a.value.scalar_type().as_str().to_string(),
                        value: a.value.lexical(),
                        at: a.at.map(TimeDto::from),
                    })
                    .collect(),
            })
            .collect(),
        events: instance
            .events()
            .iter()
            .map(|e| EventDto {
                id: e.id.clone(),
                event_type: e.event_type.clone(),
                time: e.time.into(),
                attributes: e
                    .attributes
                    .iter()
                    .map(|a| EventAttrDto {
                        name: a.name.clone(),
                        value_type: a.value.scalar_type().as_str().to_string(),
                        value: a.value.lexical(),
                    })
                    .collect(),
                observes: e
                    .observes
                    .iter()
                    .map(|l| LinkDto {
                        object: l.object_id.clone(),
                        qualifier: l.qualifier.clone(),
                    })
                    .collect(),
            })
            .collect(),
        relations: instance
            .relations()
            .iter()
            .map(|r| RelationDto {
                source: r.source_id.clone(),
                target: r.target_id.clone(),
                relation_type: r.relation_type.clone(),
            })
            .collect(),
        derived,
    }
}

fn to_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("plain data serializes");
    out.push(b'\n');
    out
}

pub fn write_canonical(instance: &OcedInstance) -> Vec<u8> {
    to_bytes(&doc(instance, None))
}

/// Canonical document with a `derived` section, which readers ignore.
pub fn write_canonical_with_derived(instance: &OcedInstance, derived: serde_json::Value) -> Vec<u8> {
    to_bytes(&doc(instance, Some(derived)))
}

pub(super) fn json_error(e: serde_json::Error) -> IoError {
    let expected = match e.classify() {
        serde_json::error::Category::Eof => "more input (document is truncated)".to_string(),
        _ => e.to_string(),
    };
    // serde_json appends its own position to the message
    let expected = match expected.rfind(" at line ") {
        Some(i) => expected[..i].to_string(),
        None => expected,
    };
    IoError::Parse {
        location: Location::Text {
            line: e.line(),
            column: e.column(),
        },
        expected,
    }
}

pub(super) fn parse_time(dto: &TimeDto, at: &Location) -> Result<OcedTime, IoError> {
    let resolution: Resolution = dto.resolution.parse().map_err(|_| IoError::Parse {
        location: at.clone(),
        expected: format!("a resolution, found {:?}", dto.resolution),
    })?;
    OcedTime::parse_with_resolution(&dto.timestamp, resolution).map_err(|e| IoError::Parse {
        location: at.clone(),
        expected: format!("a timestamp ({e})"),
    })
}

pub(super) fn parse_value(ty: &str, text: &str, at: &Location) -> Result<ScalarValue, IoError> {
    let ty: ScalarType = ty.parse().map_err(|_| IoError::Parse {
        location: at.clone(),
        expected: format!("a value type, found {ty:?}"),
    })?;
    ScalarValue::parse(ty, text).map_err(|e| IoError::Parse {
        location: at.clone(),
        expected: e.to_string(),
    })
}

fn parts_from_doc(doc: Doc, pos: &Positions) -> Result<InstanceParts, IoError> {
    let loc = |path: String| pos.get(&path).unwrap_or(Location::Text { line: 1, column: 1 });
    if doc.format.kind != FormatKind::CanonicalDoc.as_str() || doc.format.version != FORMAT_VERSION {
        return Err(IoError::Parse {
            location: Location::Text { line: 2, column: 3 },
            expected: format!(
                "format {{\"kind\": \"canonicalDoc\", \"version\": \"{FORMAT_VERSION}\"}}, found {:?}/{:?}",
                doc.format.kind, doc.format.version
            ),
        });
    }
    let form = Form::parse(&doc.form).ok_or_else(|| IoError::Parse {
        location: Location::Text { line: 1, column: 1 },
        expected: format!("form \"baseline\" or \"timestamped\", found {:?}", doc.form),
    })?;
    let schema = doc
        .schema
        .map(|s| schema_from_dto(s, || Location::Text { line: 1, column: 1 }))
        .transpose()?;

    let mut objects = Vec::with_capacity(doc.objects.len());
    for (i, o) in doc.objects.into_iter().enumerate() {
        let here = loc(format!("/objects/{i}"));
        let meta = match o.meta {
            None => ObjectMeta::Plain,
            Some(m) => ObjectMeta::parse(&m).ok_or_else(|| IoError::Parse {
                location: here.clone(),
                expected: format!("an object meta kind, found {m:?}"),
            })?,
        };
        let mut obj = OcedObject::new(o.id, o.object_type).with_meta(meta);
        for (j, a) in o.attributes.into_iter().enumerate() {
            let here = loc(format!("/objects/{i}/attributes/{j}"));
            obj.attributes.push(ObjectAttributeValue {
                value: parse_value(&a.value_type, &a.value, &here)?,
                at: a.at.as_ref().map(|t| parse_time(t, &here)).transpose()?,
                name: a.name,
            });
        }
        objects.push(obj);
    }

    let mut events = Vec::with_capacity(doc.events.len());
    for (i, e) in doc.events.into_iter().enumerate() {
        let here = loc(format!("/events/{i}"));
        let mut ev = Event::new(e.id, e.event_type, parse_time(&e.time, &here)?);
        for (j, a) in e.attributes.into_iter().enumerate() {
            let here = loc(format!("/events/{i}/attributes/{j}"));
            ev.attributes.push(EventAttribute {
                value: parse_value(&a.value_type, &a.value, &here)?,
                name: a.name,
            });
        }
        ev.observes = e
            .observes
            .into_iter()
            .map(|l| QualifiedLink::new(l.object, l.qualifier))
            .collect();
        events.push(ev);
    }

    let relations = doc
        .relations
        .into_iter()
        .map(|r| ObjectRelation::new(r.source, r.target, r.relation_type))
        .collect();
    Ok(InstanceParts {
        objects,
        events,
        relations,
        schema,
        form,
    })
}

fn record_path(r: RecordRef) -> String {
    match r {
        RecordRef::Object(i) => format!("/objects/{i}"),
        RecordRef::ObjectAttribute { object, attribute } => format!("/objects/{object}/attributes/{attribute}"),
        RecordRef::Event(i) => format!("/events/{i}"),
        RecordRef::EventAttribute { event, attribute } => format!("/events/{event}/attributes/{attribute}"),
        RecordRef::Link { event, link } => format!("/events/{event}/observes/{link}"),
        RecordRef::Relation(i) => format!("/relations/{i}"),
    }
}

fn parse_doc(bytes: &[u8]) -> Result<(InstanceParts, Positions), IoError> {
    let doc: Doc = serde_json::from_slice(bytes).map_err(json_error)?;
    let pos = element_positions(&String::from_utf8_lossy(bytes));
    Ok((parts_from_doc(doc, &pos)?, pos))
}

pub fn read_canonical(bytes: &[u8]) -> Result<OcedInstance, IoError> {
    let (parts, pos) = parse_doc(bytes)?;
    build_instance(parts).map_err(|e| locate_build_error(e, |r| pos.get(&record_path(r))))
}

pub fn read_canonical_lenient(bytes: &[u8]) -> Result<OcedInstance, IoError> {
    Ok(build_lenient(parse_doc(bytes)?.0))
}
