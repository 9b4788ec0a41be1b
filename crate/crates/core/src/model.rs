//! In-memory object-centric event data.
//!
//! An [`OcedInstance`] is built once from raw parts and is immutable
//! afterwards. All collections are kept in canonical order (objects and
//! events by id, attributes by `(name, at)`, links by `(object, qualifier)`,
//! relations by `(source, target, type)`), so structural equality of two
//! instances is canonical equality.
//!
//! [`build_instance`] enforces every model invariant and fails on the first
//! violation. [`build_lenient`] keeps whatever it is given so that the
//! validators can report all problems of a broken input at once.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schema::OcedSchema;
use crate::time::OcedTime;
use crate::value::{ScalarType, ScalarValue};

pub const CREATE: &str = "CREATE";
pub const MODIFY: &str = "MODIFY";
pub const DELETE: &str = "DELETE";
pub const CHILD_OF: &str = "CHILD_OF";
pub const PARENT_OF: &str = "PARENT_OF";

/// Id prefixes minted by the transforms. Plain input objects may not use them.
pub const REIFIED_PREFIX: &str = "rel:";
pub const MATERIALIZED_PREFIX: &str = "attr:";
pub const PROXY_PREFIX: &str = "proxy:";

/// Whether object attribute values carry their own timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    #[default]
    Baseline,
    Timestamped,
}

impl Form {
    pub fn as_str(self) -> &'static str {
        match self {
            Form::Baseline => "baseline",
            Form::Timestamped => "timestamped",
        }
    }

    pub fn parse(s: &str) -> Option<Form> {
        match s {
            "baseline" => Some(Form::Baseline),
            "timestamped" => Some(Form::Timestamped),
            _ => None,
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What an object stands for when it was minted by a transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ObjectMeta {
    #[default]
    Plain,
    ReifiedRelation,
    MaterializedAttribute,
    Proxy,
}

impl ObjectMeta {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectMeta::Plain => "plain",
            ObjectMeta::ReifiedRelation => "reifiedRelation",
            ObjectMeta::MaterializedAttribute => "materializedAttribute",
            ObjectMeta::Proxy => "proxy",
        }
    }

    pub fn parse(s: &str) -> Option<ObjectMeta> {
        [
            ObjectMeta::Plain,
            ObjectMeta::ReifiedRelation,
            ObjectMeta::MaterializedAttribute,
            ObjectMeta::Proxy,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
    }

    /// Id prefix reserved for objects of this kind.
    pub fn id_prefix(self) -> Option<&'static str> {
        match self {
            ObjectMeta::Plain => None,
            ObjectMeta::ReifiedRelation => Some(REIFIED_PREFIX),
            ObjectMeta::MaterializedAttribute => Some(MATERIALIZED_PREFIX),
            ObjectMeta::Proxy => Some(PROXY_PREFIX),
        }
    }
}

fn reserved_prefix_of(id: &str) -> Option<ObjectMeta> {
    [
        ObjectMeta::ReifiedRelation,
        ObjectMeta::MaterializedAttribute,
        ObjectMeta::Proxy,
    ]
    .into_iter()
    .find(|m| id.starts_with(m.id_prefix().unwrap_or_default()))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EventAttribute {
    pub name: String,
    pub value: ScalarValue,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QualifiedLink {
    pub object_id: String,
    pub qualifier: String,
}

impl QualifiedLink {
    pub fn new(object_id: impl Into<String>, qualifier: impl Into<String>) -> Self {
        QualifiedLink {
            object_id: object_id.into(),
            qualifier: qualifier.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub id: String,
    pub event_type: String,
    pub time: OcedTime,
    pub attributes: Vec<EventAttribute>,
    pub observes: Vec<QualifiedLink>,
}

impl Event {
    pub fn new(id: impl Into<String>, event_type: impl Into<String>, time: OcedTime) -> Self {
        Event {
            id: id.into(),
            event_type: event_type.into(),
            time,
            attributes: Vec::new(),
            observes: Vec::new(),
        }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<ScalarValue>) -> Self {
        self.attributes.push(EventAttribute {
            name: name.into(),
            value: value.into(),
        });
        self
    }

    pub fn observing(mut self, object_id: impl Into<String>, qualifier: impl Into<String>) -> Self {
        self.observes.push(QualifiedLink::new(object_id, qualifier));
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&ScalarValue> {
        self.attributes.iter().find(|a| a.name == name).map(|a| &a.value)
    }

    pub fn observes_object(&self, object_id: &str) -> bool {
        self.observes.iter().any(|l| l.object_id == object_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectAttributeValue {
    pub name: String,
    pub value: ScalarValue,
    pub at: Option<OcedTime>,
}

impl ObjectAttributeValue {
    fn sort_key(&self) -> (&str, Option<i64>, &ScalarValue) {
        (&self.name, self.at.map(|t| t.millis()), &self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OcedObject {
    pub id: String,
    pub object_type: String,
    pub attributes: Vec<ObjectAttributeValue>,
    pub meta: ObjectMeta,
}

impl OcedObject {
    pub fn new(id: impl Into<String>, object_type: impl Into<String>) -> Self {
        OcedObject {
            id: id.into(),
            object_type: object_type.into(),
            attributes: Vec::new(),
            meta: ObjectMeta::Plain,
        }
    }

    pub fn with_meta(mut self, meta: ObjectMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<ScalarValue>) -> Self {
        self.attributes.push(ObjectAttributeValue {
            name: name.into(),
            value: value.into(),
            at: None,
        });
        self
    }

    pub fn with_attr_at(mut self, name: impl Into<String>, value: impl Into<ScalarValue>, at: OcedTime) -> Self {
        self.attributes.push(ObjectAttributeValue {
            name: name.into(),
            value: value.into(),
            at: Some(at),
        });
        self
    }

    /// The single value of `name` in baseline form, or the latest stamped
    /// value in timestamped form.
    pub fn current_value(&self, name: &str) -> Option<&ScalarValue> {
        self.attributes
            .iter()
            .filter(|a| a.name == name)
            .max_by_key(|a| a.at.map(|t| t.millis()))
            .map(|a| &a.value)
    }

    pub fn values_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ObjectAttributeValue> + 'a {
        self.attributes.iter().filter(move |a| a.name == name)
    }

    pub fn has_attribute(&self, name: &str) -> bool {
        self.attributes.iter().any(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectRelation {
    pub source_id: String,
    pub target_id: String,
    pub relation_type: String,
}

impl ObjectRelation {
    pub fn new(source_id: impl Into<String>, target_id: impl Into<String>, relation_type: impl Into<String>) -> Self {
        ObjectRelation {
            source_id: source_id.into(),
            target_id: target_id.into(),
            relation_type: relation_type.into(),
        }
    }
}

impl fmt::Display for ObjectRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.source_id, self.target_id, self.relation_type)
    }
}

/// Raw material for an instance, in arbitrary order.
#[derive(Debug, Clone, Default)]
pub struct InstanceParts {
    pub objects: Vec<OcedObject>,
    pub events: Vec<Event>,
    pub relations: Vec<ObjectRelation>,
    pub schema: Option<OcedSchema>,
    pub form: Form,
}

/// Points at a record of the [`InstanceParts`] an instance was built from
/// (or, for findings on a built instance, at its canonical position).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RecordRef {
    Object(usize),
    ObjectAttribute { object: usize, attribute: usize },
    Event(usize),
    EventAttribute { event: usize, attribute: usize },
    Link { event: usize, link: usize },
    Relation(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdKind {
    Object,
    Event,
}

impl fmt::Display for IdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdKind::Object => "object",
            IdKind::Event => "event",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttributeOwner {
    Event,
    Object,
}

impl fmt::Display for AttributeOwner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttributeOwner::Event => "event",
            AttributeOwner::Object => "object",
        })
    }
}

/// A violated model invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("duplicate {kind} id {id:?}")]
    DuplicateId {
        kind: IdKind,
        id: String,
        first: RecordRef,
        second: RecordRef,
    },
    #[error("{from} refers to unknown object {to:?}")]
    DanglingReference { from: String, to: String, at: RecordRef },
    #[error("attribute {name:?} of object {object:?} does not match form {form}")]
    MixedForm {
        object: String,
        name: String,
        form: Form,
        at: RecordRef,
    },
    #[error("{owner} attribute {name:?} used as both {first} and {second}")]
    TypeClash {
        owner: AttributeOwner,
        name: String,
        first: ScalarType,
        second: ScalarType,
        at: RecordRef,
    },
    #[error("{owner} {owner_id:?} has attribute {name:?} more than once")]
    DuplicateAttribute {
        owner: AttributeOwner,
        owner_id: String,
        name: String,
        at: RecordRef,
    },
    #[error("relation {relation} recorded twice")]
    DuplicateRelation {
        relation: ObjectRelation,
        first: RecordRef,
        second: RecordRef,
    },
    #[error("event {event:?} observes {object:?} with qualifier {qualifier:?} twice")]
    DuplicateLink {
        event: String,
        object: String,
        qualifier: String,
        at: RecordRef,
    },
    #[error("empty {field}")]
    EmptyField { field: &'static str, at: RecordRef },
    #[error("object id {id:?} does not match its kind {meta}")]
    ReservedId {
        id: String,
        meta: &'static str,
        at: RecordRef,
    },
}

impl BuildError {
    /// Every record this error points at.
    pub fn records(&self) -> Vec<RecordRef> {
        match self {
            BuildError::DuplicateId { first, second, .. } | BuildError::DuplicateRelation { first, second, .. } => {
                vec![*first, *second]
            }
            BuildError::DanglingReference { at, .. }
            | BuildError::MixedForm { at, .. }
            | BuildError::TypeClash { at, .. }
            | BuildError::DuplicateAttribute { at, .. }
            | BuildError::DuplicateLink { at, .. }
            | BuildError::EmptyField { at, .. }
            | BuildError::ReservedId { at, .. } => vec![*at],
        }
    }

    fn map_records(self, f: impl Fn(RecordRef) -> RecordRef) -> Self {
        match self {
            BuildError::DuplicateId {
                kind,
                id,
                first,
                second,
            } => BuildError::DuplicateId {
                kind,
                id,
                first: f(first),
                second: f(second),
            },
            BuildError::DuplicateRelation {
                relation,
                first,
                second,
            } => BuildError::DuplicateRelation {
                relation,
                first: f(first),
                second: f(second),
            },
            BuildError::DanglingReference { from, to, at } => BuildError::DanglingReference { from, to, at: f(at) },
            BuildError::MixedForm { object, name, form, at } => BuildError::MixedForm {
                object,
                name,
                form,
                at: f(at),
            },
            BuildError::TypeClash {
                owner,
                name,
                first,
                second,
                at,
            } => BuildError::TypeClash {
                owner,
                name,
                first,
                second,
                at: f(at),
            },
            BuildError::DuplicateAttribute {
                owner,
                owner_id,
                name,
                at,
            } => BuildError::DuplicateAttribute {
                owner,
                owner_id,
                name,
                at: f(at),
            },
            BuildError::DuplicateLink {
                event,
                object,
                qualifier,
                at,
            } => BuildError::DuplicateLink {
                event,
                object,
                qualifier,
                at: f(at),
            },
            BuildError::EmptyField { field, at } => BuildError::EmptyField { field, at: f(at) },
            BuildError::ReservedId { id, meta, at } => BuildError::ReservedId { id, meta, at: f(at) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("object {object:?} has no attribute {name:?}")]
    UnknownAttribute { object: String, name: String },
    #[error("operation requires {expected} form")]
    WrongForm { expected: Form },
}

/// One dataset of object-centric event data.
#[derive(Debug, Clone)]
pub struct OcedInstance {
    objects: Vec<OcedObject>,
    events: Vec<Event>,
    relations: Vec<ObjectRelation>,
    schema: Option<OcedSchema>,
    form: Form,
    object_index: HashMap<String, usize>,
    event_index: HashMap<String, usize>,
    // object position -> (event position, link position)
    observers: Vec<Vec<(usize, usize)>>,
}

impl PartialEq for OcedInstance {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form
            && self.schema == other.schema
            && self.objects == other.objects
            && self.events == other.events
            && self.relations == other.relations
    }
}

impl Eq for OcedInstance {}

/// True iff both instances hold the same content, regardless of the order
/// in which it was supplied.
pub fn canonical_equal(a: &OcedInstance, b: &OcedInstance) -> bool {
    a == b
}

/// Builds an instance, rejecting any violated invariant. Record references
/// in the error point into `parts` as given.
pub fn build_instance(parts: InstanceParts) -> Result<OcedInstance, BuildError> {
    let (instance, perm) = canonicalize(parts);
    match instance.violations().into_iter().next() {
        None => Ok(instance),
        Some(err) => Err(err.map_records(|r| perm.original(r))),
    }
}

/// Builds an instance without checking invariants. Duplicate ids resolve to
/// their first occurrence in lookups; dangling references are kept.
pub fn build_lenient(parts: InstanceParts) -> OcedInstance {
    canonicalize(parts).0
}

/// Maps canonical positions back to positions in the original parts.
struct Permutation {
    objects: Vec<usize>,
    object_attrs: Vec<Vec<usize>>,
    events: Vec<usize>,
    event_attrs: Vec<Vec<usize>>,
    links: Vec<Vec<usize>>,
    relations: Vec<usize>,
}

impl Permutation {
    fn original(&self, r: RecordRef) -> RecordRef {
        match r {
            RecordRef::Object(i) => RecordRef::Object(self.objects[i]),
            RecordRef::ObjectAttribute { object, attribute } => RecordRef::ObjectAttribute {
                object: self.objects[object],
                attribute: self.object_attrs[object][attribute],
            },
            RecordRef::Event(i) => RecordRef::Event(self.events[i]),
            RecordRef::EventAttribute { event, attribute } => RecordRef::EventAttribute {
                event: self.events[event],
                attribute: self.event_attrs[event][attribute],
            },
            RecordRef::Link { event, link } => RecordRef::Link {
                event: self.events[event],
                link: self.links[event][link],
            },
            RecordRef::Relation(i) => RecordRef::Relation(self.relations[i]),
        }
    }
}

fn sorted_order<T>(items: &[T], mut cmp: impl FnMut(&T, &T) -> std::cmp::Ordering) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| cmp(&items[a], &items[b]));
    order
}

fn apply_order<T: Clone>(items: Vec<T>, order: &[usize]) -> Vec<T> {
    let mut slots: Vec<Option<T>> = items.into_iter().map(Some).collect();
    order.iter().map(|&i| slots[i].take().expect("permutation")).collect()
}

fn canonicalize(parts: InstanceParts) -> (OcedInstance, Permutation) {
    let InstanceParts {
        objects,
        events,
        relations,
        schema,
        form,
    } = parts;

    let object_order = sorted_order(&objects, |a, b| a.id.cmp(&b.id));
    let mut objects = apply_order(objects, &object_order);
    let mut object_attrs = Vec::with_capacity(objects.len());
    for o in &mut objects {
        let order = sorted_order(&o.attributes, |a, b| a.sort_key().cmp(&b.sort_key()));
        o.attributes = apply_order(std::mem::take(&mut o.attributes), &order);
        object_attrs.push(order);
    }

    let event_order = sorted_order(&events, |a, b| a.id.cmp(&b.id));
    let mut events = apply_order(events, &event_order);
    let mut event_attrs = Vec::with_capacity(events.len());
    let mut links = Vec::with_capacity(events.len());
    for e in &mut events {
        let order = sorted_order(&e.attributes, |a, b| a.cmp(b));
        e.attributes = apply_order(std::mem::take(&mut e.attributes), &order);
        event_attrs.push(order);
        let order = sorted_order(&e.observes, |a, b| a.cmp(b));
        e.observes = apply_order(std::mem::take(&mut e.observes), &order);
        links.push(order);
    }

    let relation_order = sorted_order(&relations, |a, b| a.cmp(b));
    let relations = apply_order(relations, &relation_order);

    let mut object_index = HashMap::with_capacity(objects.len());
    for (i, o) in objects.iter().enumerate() {
        object_index.entry(o.id.clone()).or_insert(i);
    }
    let mut event_index = HashMap::with_capacity(events.len());
    for (i, e) in events.iter().enumerate() {
        event_index.entry(e.id.clone()).or_insert(i);
    }
    let mut observers = vec![Vec::new(); objects.len()];
    for (ei, e) in events.iter().enumerate() {
        for (li, l) in e.observes.iter().enumerate() {
            if let Some(&oi) = object_index.get(&l.object_id) {
                observers[oi].push((ei, li));
            }
        }
    }

    let instance = OcedInstance {
        objects,
        events,
        relations,
        schema,
        form,
        object_index,
        event_index,
        observers,
    };
    let perm = Permutation {
        objects: object_order,
        object_attrs,
        events: event_order,
        event_attrs,
        links,
        relations: relation_order,
    };
    (instance, perm)
}

impl Default for OcedInstance {
    fn default() -> Self {
        build_lenient(InstanceParts::default())
    }
}

impl OcedInstance {
    pub fn objects(&self) -> &[OcedObject] {
        &self.objects
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn relations(&self) -> &[ObjectRelation] {
        &self.relations
    }

    pub fn schema(&self) -> Option<&OcedSchema> {
        self.schema.as_ref()
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty() && self.events.is_empty() && self.relations.is_empty()
    }

    pub fn object(&self, id: &str) -> Option<&OcedObject> {
        self.object_index.get(id).map(|&i| &self.objects[i])
    }

    pub fn event(&self, id: &str) -> Option<&Event> {
        self.event_index.get(id).map(|&i| &self.events[i])
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.object_index.contains_key(id) || self.event_index.contains_key(id)
    }

    /// `(event, link)` pairs observing the object, in event-id order.
    pub fn observations_of<'a>(&'a self, object_id: &str) -> impl Iterator<Item = (&'a Event, &'a QualifiedLink)> + 'a {
        let slots: &[(usize, usize)] = match self.object_index.get(object_id) {
            Some(&i) => &self.observers[i],
            None => &[],
        };
        slots
            .iter()
            .map(move |&(ei, li)| (&self.events[ei], &self.events[ei].observes[li]))
    }

    pub fn relations_from<'a>(&'a self, object_id: &'a str) -> impl Iterator<Item = &'a ObjectRelation> + 'a {
        // relations are sorted by source, so this could binary search; the
        // linear scan keeps it simple for the sizes we handle.
        self.relations.iter().filter(move |r| r.source_id == object_id)
    }

    pub fn relations_to<'a>(&'a self, object_id: &'a str) -> impl Iterator<Item = &'a ObjectRelation> + 'a {
        self.relations.iter().filter(move |r| r.target_id == object_id)
    }

    pub fn has_relation(&self, relation: &ObjectRelation) -> bool {
        self.relations.binary_search(relation).is_ok()
    }

    /// Copies the content out for modification; rebuild with
    /// [`build_instance`].
    pub fn to_parts(&self) -> InstanceParts {
        InstanceParts {
            objects: self.objects.clone(),
            events: self.events.clone(),
            relations: self.relations.clone(),
            schema: self.schema.clone(),
            form: self.form,
        }
    }

    pub fn into_parts(self) -> InstanceParts {
        InstanceParts {
            objects: self.objects,
            events: self.events,
            relations: self.relations,
            schema: self.schema,
            form: self.form,
        }
    }

    /// Value of an object attribute at instant `t`: the value with the
    /// latest stamp not after `t`. Stamps are left-closed, so a query at
    /// exactly a stamp sees the new value.
    pub fn value_at(&self, object_id: &str, name: &str, t: OcedTime) -> Result<Option<&'_ ScalarValue>, QueryError> {
        if self.form != Form::Timestamped {
            return Err(QueryError::WrongForm {
                expected: Form::Timestamped,
            });
        }
        let object = self
            .object(object_id)
            .ok_or_else(|| QueryError::UnknownObject(object_id.to_string()))?;
        if !object.has_attribute(name) {
            return Err(QueryError::UnknownAttribute {
                object: object_id.to_string(),
                name: name.to_string(),
            });
        }
        Ok(object
            .attributes
            .iter()
            .filter(|a| a.name == name)
            .filter_map(|a| a.at.map(|at| (at.millis(), &a.value)))
            .filter(|(at, _)| *at <= t.millis())
            .max_by_key(|(at, _)| *at)
            .map(|(_, v)| v))
    }

    /// Every observation of an object, ordered by time and then event id.
    pub fn timeline_of(&self, object_id: &str) -> Result<Vec<TimelineEntry>, QueryError> {
        if self.object(object_id).is_none() {
            return Err(QueryError::UnknownObject(object_id.to_string()));
        }
        let mut entries: Vec<TimelineEntry> = self
            .observations_of(object_id)
            .map(|(e, l)| TimelineEntry {
                event_id: e.id.clone(),
                qualifier: l.qualifier.clone(),
                time: e.time,
            })
            .collect();
        entries.sort_by(|a, b| {
            (a.time.millis(), &a.event_id, &a.qualifier).cmp(&(b.time.millis(), &b.event_id, &b.qualifier))
        });
        Ok(entries)
    }

    /// All invariant violations, in a fixed order. Record references are
    /// canonical positions in this instance.
    pub fn violations(&self) -> Vec<BuildError> {
        let mut out = Vec::new();
        self.check_ids(&mut out);
        self.check_form(&mut out);
        self.check_attributes(&mut out);
        self.check_references(&mut out);
        self.check_relations(&mut out);
        out
    }

    fn check_ids(&self, out: &mut Vec<BuildError>) {
        let mut seen: HashMap<&str, (IdKind, RecordRef)> = HashMap::new();
        for (i, o) in self.objects.iter().enumerate() {
            let at = RecordRef::Object(i);
            if o.id.is_empty() {
                out.push(BuildError::EmptyField { field: "object id", at });
            }
            if o.object_type.is_empty() {
                out.push(BuildError::EmptyField {
                    field: "object type",
                    at,
                });
            }
            match seen.get(o.id.as_str()) {
                Some(&(_, first)) => out.push(BuildError::DuplicateId {
                    kind: IdKind::Object,
                    id: o.id.clone(),
                    first,
                    second: at,
                }),
                None => {
                    seen.insert(&o.id, (IdKind::Object, at));
                }
            }
            let ok = match (o.meta.id_prefix(), reserved_prefix_of(&o.id)) {
                (None, None) => true,
                (Some(p), _) => o.id.starts_with(p),
                (None, Some(_)) => false,
            };
            if !ok {
                out.push(BuildError::ReservedId {
                    id: o.id.clone(),
                    meta: o.meta.as_str(),
                    at,
                });
            }
        }
        for (i, e) in self.events.iter().enumerate() {
            let at = RecordRef::Event(i);
            if e.id.is_empty() {
                out.push(BuildError::EmptyField { field: "event id", at });
            }
            if e.event_type.is_empty() {
                out.push(BuildError::EmptyField {
                    field: "event type",
                    at,
                });
            }
            match seen.get(e.id.as_str()) {
                Some(&(_, first)) => out.push(BuildError::DuplicateId {
                    kind: IdKind::Event,
                    id: e.id.clone(),
                    first,
                    second: at,
                }),
                None => {
                    seen.insert(&e.id, (IdKind::Event, at));
                }
            }
        }
    }

    fn check_form(&self, out: &mut Vec<BuildError>) {
        for (oi, o) in self.objects.iter().enumerate() {
            for (ai, a) in o.attributes.iter().enumerate() {
                let stamped = a.at.is_some();
                if stamped != (self.form == Form::Timestamped) {
                    out.push(BuildError::MixedForm {
                        object: o.id.clone(),
                        name: a.name.clone(),
                        form: self.form,
                        at: RecordRef::ObjectAttribute {
                            object: oi,
                            attribute: ai,
                        },
                    });
                }
            }
        }
    }

    fn check_attributes(&self, out: &mut Vec<BuildError>) {
        let mut event_types: HashMap<&str, ScalarType> = HashMap::new();
        for (ei, e) in self.events.iter().enumerate() {
            let mut names = HashSet::new();
            for (ai, a) in e.attributes.iter().enumerate() {
                let at = RecordRef::EventAttribute {
                    event: ei,
                    attribute: ai,
                };
                if a.name.is_empty() {
                    out.push(BuildError::EmptyField {
                        field: "attribute name",
                        at,
                    });
                }
                if !names.insert(a.name.as_str()) {
                    out.push(BuildError::DuplicateAttribute {
                        owner: AttributeOwner::Event,
                        owner_id: e.id.clone(),
                        name: a.name.clone(),
                        at,
                    });
                }
                let ty = a.value.scalar_type();
                let first = *event_types.entry(&a.name).or_insert(ty);
                if first != ty {
                    out.push(BuildError::TypeClash {
                        owner: AttributeOwner::Event,
                        name: a.name.clone(),
                        first,
                        second: ty,
                        at,
                    });
                }
            }
        }
        let mut object_types: HashMap<&str, ScalarType> = HashMap::new();
        for (oi, o) in self.objects.iter().enumerate() {
            let mut keys = HashSet::new();
            for (ai, a) in o.attributes.iter().enumerate() {
                let at = RecordRef::ObjectAttribute {
                    object: oi,
                    attribute: ai,
                };
                if a.name.is_empty() {
                    out.push(BuildError::EmptyField {
                        field: "attribute name",
                        at,
                    });
                }
                // baseline: one value per name; timestamped: one per (name, at)
                if !keys.insert((a.name.as_str(), a.at.map(|t| t.millis()))) {
                    out.push(BuildError::DuplicateAttribute {
                        owner: AttributeOwner::Object,
                        owner_id: o.id.clone(),
                        name: a.name.clone(),
                        at,
                    });
                }
                let ty = a.value.scalar_type();
                let first = *object_types.entry(&a.name).or_insert(ty);
                if first != ty {
                    out.push(BuildError::TypeClash {
                        owner: AttributeOwner::Object,
                        name: a.name.clone(),
                        first,
                        second: ty,
                        at,
                    });
                }
            }
        }
    }

    fn check_references(&self, out: &mut Vec<BuildError>) {
        for (ei, e) in self.events.iter().enumerate() {
            for (li, l) in e.observes.iter().enumerate() {
                let at = RecordRef::Link { event: ei, link: li };
                if l.qualifier.is_empty() {
                    out.push(BuildError::EmptyField { field: "qualifier", at });
                }
                if self.object(&l.object_id).is_none() {
                    out.push(BuildError::DanglingReference {
                        from: format!("event {}", e.id),
                        to: l.object_id.clone(),
                        at,
                    });
                }
                if li > 0 && e.observes[li - 1] == *l {
                    out.push(BuildError::DuplicateLink {
                        event: e.id.clone(),
                        object: l.object_id.clone(),
                        qualifier: l.qualifier.clone(),
                        at,
                    });
                }
            }
        }
        for (ri, r) in self.relations.iter().enumerate() {
            let at = RecordRef::Relation(ri);
            for end in [&r.source_id, &r.target_id] {
                if self.object(end).is_none() {
                    out.push(BuildError::DanglingReference {
                        from: format!("relation {r}"),
                        to: end.clone(),
                        at,
                    });
                }
            }
        }
    }

    fn check_relations(&self, out: &mut Vec<BuildError>) {
        for (ri, r) in self.relations.iter().enumerate() {
            let at = RecordRef::Relation(ri);
            if r.relation_type.is_empty() {
                out.push(BuildError::EmptyField {
                    field: "relation type",
                    at,
                });
            }
            if ri > 0 && self.relations[ri - 1] == *r {
                out.push(BuildError::DuplicateRelation {
                    relation: r.clone(),
                    first: RecordRef::Relation(ri - 1),
                    second: at,
                });
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimelineEntry {
    pub event_id: String,
    pub qualifier: String,
    pub time: OcedTime,
}
