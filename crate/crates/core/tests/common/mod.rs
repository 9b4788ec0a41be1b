//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use chrono::{NaiveDate, NaiveTime};
use oced_core::model::{CHILD_OF, CREATE, DELETE, MODIFY, PARENT_OF};
use oced_core::{
    build_instance, Event, EventAttribute, Form, InstanceParts, ObjectAttributeValue, ObjectRelation, OcedInstance,
    OcedObject, OcedSchema, OcedTime, RelationDecl, Resolution, ScalarType, ScalarValue,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const OBJECT_TYPES: [&str; 4] = ["order", "item", "invoice", "pack, \"age\""];
pub const EVENT_TYPES: [&str; 4] = ["place order", "pick item", "send invoice", "ünïcode"];
pub const QUALIFIERS: [&str; 5] = [CREATE, MODIFY, DELETE, "approve", "ship"];
pub const RELATION_TYPES: [&str; 4] = [CHILD_OF, PARENT_OF, "RELATED_TO", "assigned to"];

/// Object attribute names with the one type each is used at.
pub const OBJECT_ATTRS: [(&str, ScalarType); 8] = [
    ("amount", ScalarType::Integer),
    ("price", ScalarType::Real),
    ("status", ScalarType::String),
    ("flag", ScalarType::Boolean),
    ("due", ScalarType::Date),
    ("slot", ScalarType::Time),
    ("seen", ScalarType::Timestamp),
    ("note, \"quoted\"", ScalarType::String),
];

pub const EVENT_ATTRS: [(&str, ScalarType); 4] = [
    ("cost", ScalarType::Real),
    ("resource", ScalarType::String),
    ("count", ScalarType::Integer),
    ("urgent", ScalarType::Boolean),
];

const STRINGS: [&str; 8] = [
    "",
    "X",
    "a,b",
    "say \"hi\"",
    "two\nlines",
    "crlf\r\nend",
    "ümlaut",
    "  padded ",
];

pub fn time(rng: &mut ChaCha8Rng) -> OcedTime {
    // 2020-01-01 .. 2026-01-01
    let millis = rng.gen_range(1_577_836_800_000i64..1_767_225_600_000);
    let resolution = *Resolution::ALL.choose(rng).unwrap();
    OcedTime::truncated(millis, resolution).unwrap()
}

pub fn value(rng: &mut ChaCha8Rng, ty: ScalarType) -> ScalarValue {
    match ty {
        ScalarType::String => {
            if rng.gen_bool(0.5) {
                ScalarValue::string(*STRINGS.choose(rng).unwrap())
            } else {
                ScalarValue::string(format!("v{}", rng.gen_range(0..1000)))
            }
        }
        ScalarType::Boolean => ScalarValue::Boolean(rng.gen()),
        ScalarType::Integer => ScalarValue::Integer(rng.gen_range(-1_000_000..1_000_000)),
        ScalarType::Real => ScalarValue::Real(rng.gen_range(-1e6..1e6)),
        ScalarType::Date => ScalarValue::Date(
            NaiveDate::from_ymd_opt(rng.gen_range(1990..2030), rng.gen_range(1..=12), rng.gen_range(1..=28)).unwrap(),
        ),
        ScalarType::Time => ScalarValue::Time(
            NaiveTime::from_hms_milli_opt(
                rng.gen_range(0..24),
                rng.gen_range(0..60),
                rng.gen_range(0..60),
                rng.gen_range(0..1000),
            )
            .unwrap(),
        ),
        // timestamp values serialize at millisecond resolution
        ScalarType::Timestamp => ScalarValue::Timestamp(
            OcedTime::from_millis(rng.gen_range(0..1_767_225_600_000i64), Resolution::Millisecond).unwrap(),
        ),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_objects: usize,
    pub max_events: usize,
    pub max_relations: usize,
    pub form: Form,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_objects: 8,
            max_events: 10,
            max_relations: 8,
            form: Form::Baseline,
        }
    }
}

fn object_id(i: usize, rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..6) {
        0 => format!("o{i}, \"x\""),
        1 => format!("Ö#{i}"),
        _ => format!("o{i}"),
    }
}

/// A random valid instance. Attribute names keep one type each, links and
/// relations are distinct, ids never use reserved prefixes.
pub fn instance_parts(rng: &mut ChaCha8Rng, shape: Shape) -> InstanceParts {
    let n_objects = rng.gen_range(1..=shape.max_objects);
    let mut objects = Vec::new();
    for i in 0..n_objects {
        let mut o = OcedObject::new(object_id(i, rng), *OBJECT_TYPES.choose(rng).unwrap());
        let n_attrs = rng.gen_range(0..=3);
        for &(name, ty) in OBJECT_ATTRS.choose_multiple(rng, n_attrs) {
            match shape.form {
                Form::Baseline => o.attributes.push(ObjectAttributeValue {
                    name: name.into(),
                    value: value(rng, ty),
                    at: None,
                }),
                Form::Timestamped => {
                    let mut stamps: Vec<OcedTime> = (0..rng.gen_range(1..=3)).map(|_| time(rng)).collect();
                    stamps.sort_by_key(|t| t.millis());
                    stamps.dedup_by_key(|t| t.millis());
                    for at in stamps {
                        o.attributes.push(ObjectAttributeValue {
                            name: name.into(),
                            value: value(rng, ty),
                            at: Some(at),
                        });
                    }
                }
            }
        }
        objects.push(o);
    }

    let mut events = Vec::new();
    for i in 0..rng.gen_range(0..=shape.max_events) {
        let mut e = Event::new(format!("e{i}"), *EVENT_TYPES.choose(rng).unwrap(), time(rng));
        let k = rng.gen_range(0..=2);
        for &(name, ty) in EVENT_ATTRS.choose_multiple(rng, k) {
            e.attributes.push(EventAttribute {
                name: name.into(),
                value: value(rng, ty),
            });
        }
        let k = rng.gen_range(0..=3.min(n_objects));
        for o in objects.choose_multiple(rng, k) {
            e = e.observing(&o.id, *QUALIFIERS.choose(rng).unwrap());
        }
        events.push(e);
    }

    let mut relations: Vec<ObjectRelation> = Vec::new();
    for _ in 0..rng.gen_range(0..=shape.max_relations) {
        let s = objects.choose(rng).unwrap();
        let t = objects.choose(rng).unwrap();
        let r = ObjectRelation::new(&s.id, &t.id, *RELATION_TYPES.choose(rng).unwrap());
        if !relations.contains(&r) {
            relations.push(r);
        }
    }

    InstanceParts {
        objects,
        events,
        relations,
        form: shape.form,
        schema: None,
    }
}

pub fn instance(rng: &mut ChaCha8Rng, shape: Shape) -> OcedInstance {
    build_instance(instance_parts(rng, shape)).expect("generated instance is valid")
}

/// The narrowest schema the instance conforms to.
pub fn observed_schema(parts: &InstanceParts) -> OcedSchema {
    let mut objects: BTreeMap<String, BTreeMap<String, ScalarType>> = BTreeMap::new();
    for o in &parts.objects {
        let decls = objects.entry(o.object_type.clone()).or_default();
        for a in &o.attributes {
            decls.insert(a.name.clone(), a.value.scalar_type());
        }
    }
    let mut events: BTreeMap<String, BTreeMap<String, ScalarType>> = BTreeMap::new();
    for e in &parts.events {
        let decls = events.entry(e.event_type.clone()).or_default();
        for a in &e.attributes {
            decls.insert(a.name.clone(), a.value.scalar_type());
        }
    }
    let type_of: BTreeMap<&str, &str> = parts
        .objects
        .iter()
        .map(|o| (o.id.as_str(), o.object_type.as_str()))
        .collect();
    let relations = parts
        .relations
        .iter()
        .map(|r| {
            RelationDecl::new(
                &r.relation_type,
                type_of[r.source_id.as_str()],
                type_of[r.target_id.as_str()],
            )
        })
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let flat = |m: BTreeMap<String, BTreeMap<String, ScalarType>>| {
        m.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect()
    };
    OcedSchema::new(flat(events), flat(objects), relations).expect("observed schema is valid")
}

/// A random instance, sometimes with its observed schema attached.
pub fn any_instance(rng: &mut ChaCha8Rng) -> OcedInstance {
    let form = if rng.gen_bool(0.5) {
        Form::Baseline
    } else {
        Form::Timestamped
    };
    let mut parts = instance_parts(
        rng,
        Shape {
            form,
            ..Shape::default()
        },
    );
    if rng.gen_bool(0.3) {
        parts.schema = Some(observed_schema(&parts));
    }
    build_instance(parts).expect("generated instance is valid")
}
