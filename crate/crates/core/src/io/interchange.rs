//! `ocel-interchange/0.1`: a document in the style of OCEL 2.0 JSON.
//!
//! ```text
//! {
//!   "format": "ocel-interchange/0.1",
//!   "form": "baseline" | "timestamped",        optional, default timestamped
//!   "schemaSource": "declared" | "synthesized",  optional, default synthesized
//!   "eventTypes":  [{"name", "attributes": [{"name", "type"}]}],
//!   "objectTypes": [{"name", "attributes": [{"name", "type"}]}],
//!   "relationTypes": [{"type", "source", "target"}],   declared schemas only
//!   "events":  [{"id", "type", "time", "resolution"?, "attributes": [{"name", "value"}],
//!                "relationships": [{"objectId", "qualifier"}]}],
//!   "objects": [{"id", "type", "meta"?, "attributes": [{"name", "value", "time"?, "resolution"?}],
//!                "relationships": [{"objectId", "qualifier"}]}]
//! }
//! ```
//!
//! Attribute values are strings typed by the declaration of their owner's
//! type. Object-to-object relationships carry the relation type as their
//! qualifier. In the timestamped form an object attribute value without a
//! `time` is valid from `1970-01-01T00:00:00.000Z`. A missing `resolution`
//! means millisecond.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::canonical::{json_error, parse_time, parse_value, TimeDto};
use super::locate::{element_positions, Positions};
use super::{locate_build_error, IoError, Location};
use crate::model::{
    build_instance, build_lenient, Event, EventAttribute, Form, InstanceParts, ObjectAttributeValue, ObjectMeta,
    ObjectRelation, OcedInstance, OcedObject, QualifiedLink, RecordRef,
};
use crate::schema::{OcedSchema, RelationDecl};
use crate::time::OcedTime;
use crate::value::ScalarType;

pub const INTERCHANGE_FORMAT: &str = "ocel-interchange/0.1";

const TOP_LEVEL: [&str; 8] = [
    "format",
    "form",
    "schemaSource",
    "eventTypes",
    "objectTypes",
    "relationTypes",
    "events",
    "objects",
];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttrDecl {
    name: String,
    #[serde(rename = "type")]
    value_type: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeDecl {
    name: String,
    attributes: Vec<AttrDecl>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelDecl {
    #[serde(rename = "type")]
    relation_type: String,
    source: String,
    target: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct Relationship {
    object_id: String,
    qualifier: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventAttr {
    name: String,
    value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectAttr {
    name: String,
    value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resolution: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventEntry {
    id: String,
    #[serde(rename = "type")]
    event_type: String,
    time: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resolution: Option<String>,
    #[serde(default)]
    attributes: Vec<EventAttr>,
    #[serde(default)]
    relationships: Vec<Relationship>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectEntry {
    id: String,
    #[serde(rename = "type")]
    object_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<String>,
    #[serde(default)]
    attributes: Vec<ObjectAttr>,
    #[serde(default)]
    relationships: Vec<Relationship>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct Doc {
    format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema_source: Option<String>,
    #[serde(default)]
    event_types: Vec<TypeDecl>,
    #[serde(default)]
    object_types: Vec<TypeDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    relation_types: Option<Vec<RelDecl>>,
    #[serde(default)]
    events: Vec<EventEntry>,
    #[serde(default)]
    objects: Vec<ObjectEntry>,
}

type Decls = BTreeMap<String, BTreeMap<String, ScalarType>>;

/// Per-type declarations observed in the data.
fn synthesize(instance: &OcedInstance) -> (Decls, Decls) {
    let mut events: Decls = BTreeMap::new();
    for e in instance.events() {
        let d = events.entry(e.event_type.clone()).or_default();
        for a in &e.attributes {
            d.insert(a.name.clone(), a.value.scalar_type());
        }
    }
    let mut objects: Decls = BTreeMap::new();
    for o in instance.objects() {
        let d = objects.entry(o.object_type.clone()).or_default();
        for a in &o.attributes {
            d.insert(a.name.clone(), a.value.scalar_type());
        }
    }
    (events, objects)
}

fn type_decls(d: &Decls) -> Vec<TypeDecl> {
    d.iter()
        .map(|(name, attrs)| TypeDecl {
            name: name.clone(),
            attributes: attrs
                .iter()
                .map(|(a, t)| AttrDecl {
                    name: a.clone(),
                    value_type: t.as_str().to_string(),
                })
                .collect(),
        })
        .collect()
}

/// Exports the instance. With an attached schema the type declarations are
/// the schema's, and every attribute must be declared for its owner's type
/// with its actual value type.
pub fn export_ocel(instance: &OcedInstance) -> Result<Vec<u8>, IoError> {
    let (event_decls, object_decls, relation_types, source) = match instance.schema() {
        Some(s) => {
            let (seen_events, seen_objects) = synthesize(instance);
            for (what, seen, declared) in [
                ("event", &seen_events, s.event_types()),
                ("object", &seen_objects, s.object_types()),
            ] {
                for (ty, attrs) in seen {
                    for (name, vt) in attrs {
                        if declared.get(ty).and_then(|d| d.get(name)) != Some(vt) {
                            return Err(IoError::UnsupportedConstruct(format!(
                                "{what} attribute {name:?} ({vt}) of type {ty:?} not covered by the declared schema"
                            )));
                        }
                    }
                }
            }
            let relations = s
                .relation_types()
                .iter()
                .map(|d| RelDecl {
                    relation_type: d.relation_type.clone(),
                    source: d.source_type.clone(),
                    target: d.target_type.clone(),
                })
                .collect();
            (
                s.event_types().clone(),
                s.object_types().clone(),
                Some(relations),
                "declared",
            )
        }
        None => {
            let (e, o) = synthesize(instance);
            (e, o, None, "synthesized")
        }
    };

    let mut outgoing: BTreeMap<&str, Vec<Relationship>> = BTreeMap::new();
    for r in instance.relations() {
        outgoing.entry(&r.source_id).or_default().push(Relationship {
            object_id: r.target_id.clone(),
            qualifier: r.relation_type.clone(),
        });
    }
    let resolution = |t: OcedTime| {
        (t.resolution() != crate::time::Resolution::Millisecond).then(|| t.resolution().as_str().to_string())
    };

    let doc = Doc {
        format: INTERCHANGE_FORMAT.to_string(),
        form: Some(instance.form().as_str().to_string()),
        schema_source: Some(source.to_string()),
        event_types: type_decls(&event_decls),
        object_types: type_decls(&object_decls),
        relation_types,
        events: instance
            .events()
            .iter()
            .map(|e| EventEntry {
                id: e.id.clone(),
                event_type: e.event_type.clone(),
                time: e.time.timestamp_string(),
                resolution: resolution(e.time),
                attributes: e
                    .attributes
                    .iter()
                    .map(|a| EventAttr {
                        name: a.name.clone(),
                        value: a.value.lexical(),
                    })
                    .collect(),
                relationships: e
                    .observes
                    .iter()
                    .map(|l| Relationship {
                        object_id: l.object_id.clone(),
                        qualifier: l.qualifier.clone(),
                    })
                    .collect(),
            })
            .collect(),
        objects: instance
            .objects()
            .iter()
            .map(|o| ObjectEntry {
                id: o.id.clone(),
                object_type: o.object_type.clone(),
                meta: (o.meta != ObjectMeta::Plain).then(|| o.meta.as_str().to_string()),
                attributes: o
                    .attributes
                    .iter()
                    .map(|a| ObjectAttr {
                        name: a.name.clone(),
                        value: a.value.lexical(),
                        time: a.at.map(|t| t.timestamp_string()),
                        resolution: a.at.and_then(resolution),
                    })
                    .collect(),
                relationships: outgoing.remove(o.id.as_str()).unwrap_or_default(),
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("plain data serializes");
    out.push(b'\n');
    Ok(out)
}

struct Origins {
    /// relation index -> (object index, relationship index)
    relations: Vec<(usize, usize)>,
}

fn parse(bytes: &[u8]) -> Result<(InstanceParts, Positions, Origins), IoError> {
    let raw: serde_json::Value = serde_json::from_slice(bytes).map_err(json_error)?;
    if let Some(map) = raw.as_object() {
        if let Some(key) = map.keys().find(|k| !TOP_LEVEL.contains(&k.as_str())) {
            return Err(IoError::UnsupportedConstruct(key.clone()));
        }
    }
    let doc: Doc = serde_json::from_slice(bytes).map_err(json_error)?;
    let pos = element_positions(&String::from_utf8_lossy(bytes));
    let loc = |path: String| pos.get(&path).unwrap_or(Location::Text { line: 1, column: 1 });
    let top = Location::Text { line: 1, column: 1 };

    if doc.format != INTERCHANGE_FORMAT {
        return Err(IoError::Parse {
            location: top,
            expected: format!("format {INTERCHANGE_FORMAT:?}, found {:?}", doc.format),
        });
    }
    let form = match doc.form.as_deref() {
        None => Form::Timestamped,
        Some(f) => Form::parse(f).ok_or_else(|| IoError::Parse {
            location: top.clone(),
            expected: format!("form \"baseline\" or \"timestamped\", found {f:?}"),
        })?,
    };
    let declared = match doc.schema_source.as_deref() {
        None | Some("synthesized") => false,
        Some("declared") => true,
        Some(other) => {
            return Err(IoError::Parse {
                location: top,
                expected: format!("schemaSource \"declared\" or \"synthesized\", found {other:?}"),
            })
        }
    };

    let decls = |list: &[TypeDecl], what: &str| -> Result<Decls, IoError> {
        let mut out = Decls::new();
        for (i, t) in list.iter().enumerate() {
            let here = loc(format!("/{what}/{i}"));
            let attrs = t
                .attributes
                .iter()
                .map(|a| {
                    a.value_type
                        .parse()
                        .map(|ty| (a.name.clone(), ty))
                        .map_err(|_| IoError::Parse {
                            location: here.clone(),
                            expected: format!("a value type, found {:?}", a.value_type),
                        })
                })
                .collect::<Result<_, _>>()?;
            out.insert(t.name.clone(), attrs);
        }
        Ok(out)
    };
    let event_decls = decls(&doc.event_types, "eventTypes")?;
    let object_decls = decls(&doc.object_types, "objectTypes")?;
    let value_type = |d: &Decls, ty: &str, name: &str, here: &Location| -> Result<ScalarType, IoError> {
        d.get(ty)
            .and_then(|a| a.get(name))
            .copied()
            .ok_or_else(|| IoError::Parse {
                location: here.clone(),
                expected: format!("attribute {name:?} declared for type {ty:?}"),
            })
    };
    let time = |ts: &str, res: &Option<String>, here: &Location| {
        parse_time(
            &TimeDto {
                timestamp: ts.to_string(),
                resolution: res.clone().unwrap_or_else(|| "millisecond".into()),
            },
            here,
        )
    };

    let mut events = Vec::with_capacity(doc.events.len());
    for (i, e) in doc.events.iter().enumerate() {
        let here = loc(format!("/events/{i}"));
        let mut ev = Event::new(&e.id, &e.event_type, time(&e.time, &e.resolution, &here)?);
        for (j, a) in e.attributes.iter().enumerate() {
            let here = loc(format!("/events/{i}/attributes/{j}"));
            let ty = value_type(&event_decls, &e.event_type, &a.name, &here)?;
            ev.attributes.push(EventAttribute {
                name: a.name.clone(),
                value: parse_value(ty.as_str(), &a.value, &here)?,
            });
        }
        ev.observes = e
            .relationships
            .iter()
            .map(|r| QualifiedLink::new(&r.object_id, &r.qualifier))
            .collect();
        events.push(ev);
    }

    let mut objects = Vec::with_capacity(doc.objects.len());
    let mut relations = Vec::new();
    let mut origins = Origins { relations: Vec::new() };
    for (i, o) in doc.objects.iter().enumerate() {
        let here = loc(format!("/objects/{i}"));
        let meta = match &o.meta {
            None => ObjectMeta::Plain,
            Some(m) => ObjectMeta::parse(m).ok_or_else(|| IoError::Parse {
                location: here.clone(),
                expected: format!("an object meta kind, found {m:?}"),
            })?,
        };
        let mut obj = OcedObject::new(&o.id, &o.object_type).with_meta(meta);
        for (j, a) in o.attributes.iter().enumerate() {
            let here = loc(format!("/objects/{i}/attributes/{j}"));
            let ty = value_type(&object_decls, &o.object_type, &a.name, &here)?;
            let at = match (&a.time, form) {
                (Some(ts), _) => Some(time(ts, &a.resolution, &here)?),
                (None, Form::Timestamped) => Some(OcedTime::EPOCH),
                (None, Form::Baseline) => None,
            };
            obj.attributes.push(ObjectAttributeValue {
                name: a.name.clone(),
                value: parse_value(ty.as_str(), &a.value, &here)?,
                at,
            });
        }
        for (j, r) in o.relationships.iter().enumerate() {
            relations.push(ObjectRelation::new(&o.id, &r.object_id, &r.qualifier));
            origins.relations.push((i, j));
        }
        objects.push(obj);
    }

    let schema = if declared {
        let pairs = |d: Decls| d.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect();
        let relation_types: BTreeSet<RelationDecl> = doc
            .relation_types
            .unwrap_or_default()
            .into_iter()
            .map(|r| RelationDecl::new(r.relation_type, r.source, r.target))
            .collect();
        Some(
            OcedSchema::new(
                pairs(event_decls),
                pairs(object_decls),
                relation_types.into_iter().collect(),
            )
            .map_err(|e| IoError::Parse {
                location: Location::Text { line: 1, column: 1 },
                expected: format!("a valid schema ({e})"),
            })?,
        )
    } else {
        None
    };

    Ok((
        InstanceParts {
            objects,
            events,
            relations,
            schema,
            form,
        },
        pos,
        origins,
    ))
}

fn record_path(origins: &Origins, r: RecordRef) -> Option<String> {
    Some(match r {
        RecordRef::Object(i) => format!("/objects/{i}"),
        RecordRef::ObjectAttribute { object, attribute } => format!("/objects/{object}/attributes/{attribute}"),
        RecordRef::Event(i) => format!("/events/{i}"),
        RecordRef::EventAttribute { event, attribute } => format!("/events/{event}/attributes/{attribute}"),
        RecordRef::Link { event, link } => format!("/events/{event}/relationships/{link}"),
        RecordRef::Relation(i) => {
            let (o, j) = origins.relations.get(i)?;
            format!("/objects/{o}/relationships/{j}")
        }
    })
}

pub fn import_ocel(bytes: &[u8]) -> Result<OcedInstance, IoError> {
    let (parts, pos, origins) = parse(bytes)?;
    build_instance(parts).map_err(|e| locate_build_error(e, |r| pos.get(&record_path(&origins, r)?)))
}

pub fn import_ocel_lenient(bytes: &[u8]) -> Result<OcedInstance, IoError> {
    Ok(build_lenient(parse(bytes)?.0))
}
