//! Validators. None of them stop at the first problem: each returns the
//! complete list of findings for its concern.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finding::{codes::*, sort_findings, Finding, Subject};
use crate::model::{
    BuildError, ObjectMeta, ObjectRelation, OcedInstance, RecordRef, CHILD_OF, CREATE, DELETE, PARENT_OF,
};
use crate::semantics;
use crate::value::ScalarType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidateError {
    #[error("instance has no schema")]
    NoSchema,
}

/// Declares that an object attribute stores the id of a related object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReferenceAttributeMarker {
    pub object_type: String,
    pub attr_name: String,
    pub relation_type: String,
    pub target_object_type: String,
}

impl ReferenceAttributeMarker {
    pub fn new(
        object_type: impl Into<String>,
        attr_name: impl Into<String>,
        relation_type: impl Into<String>,
        target_object_type: impl Into<String>,
    ) -> Self {
        ReferenceAttributeMarker {
            object_type: object_type.into(),
            attr_name: attr_name.into(),
            relation_type: relation_type.into(),
            target_object_type: target_object_type.into(),
        }
    }
}

fn record_subject(instance: &OcedInstance, r: RecordRef) -> Subject {
    match r {
        RecordRef::Object(i) | RecordRef::ObjectAttribute { object: i, .. } => {
            Subject::Object(instance.objects()[i].id.clone())
        }
        RecordRef::Event(i) | RecordRef::EventAttribute { event: i, .. } => {
            Subject::Event(instance.events()[i].id.clone())
        }
        RecordRef::Link { event, link } => {
            let e = &instance.events()[event];
            Subject::Link {
                event: e.id.clone(),
                object: e.observes[link].object_id.clone(),
            }
        }
        RecordRef::Relation(i) => Subject::Relation(instance.relations()[i].clone()),
    }
}

fn violation_finding(instance: &OcedInstance, v: &BuildError) -> Finding {
    let code = match v {
        BuildError::DuplicateId { .. } => E_DUPID,
        BuildError::DanglingReference { .. } => E_DANGLE,
        BuildError::MixedForm { .. } => E_FORM,
        BuildError::TypeClash { .. } => E_TYPECLASH,
        BuildError::DuplicateAttribute { .. } => E_DUPATTR,
        BuildError::DuplicateRelation { .. } => E_DUPREL,
        BuildError::DuplicateLink { .. } => E_DUPLINK,
        BuildError::EmptyField { .. } => E_EMPTY,
        BuildError::ReservedId { .. } => E_RESERVED_ID,
    };
    let subject = match v {
        BuildError::TypeClash { name, .. } => Subject::Attribute(name.clone()),
        _ => record_subject(instance, *v.records().last().expect("every violation names a record")),
    };
    Finding::new(code, subject, v.to_string())
}

/// Core invariants. `strict` adds the strict readings: one relation per
/// object pair, every declared event type instantiated, hierarchy hygiene,
/// and `_unit` pairing notes.
pub fn validate_core(instance: &OcedInstance, strict: bool) -> Vec<Finding> {
    let mut out: Vec<Finding> = instance
        .violations()
        .iter()
        .map(|v| violation_finding(instance, v))
        .collect();
    if strict {
        strict_pairs(instance, &mut out);
        strict_empty_types(instance, &mut out);
        strict_hierarchy(instance, &mut out);
        unit_pairs(instance, &mut out);
    }
    sort_findings(&mut out);
    out.dedup();
    out
}

fn strict_pairs(instance: &OcedInstance, out: &mut Vec<Finding>) {
    let mut pairs: BTreeMap<(&str, &str), Vec<&ObjectRelation>> = BTreeMap::new();
    for r in instance.relations() {
        pairs.entry((&r.source_id, &r.target_id)).or_default().push(r);
    }
    for rels in pairs.values() {
        let types: BTreeSet<&str> = rels.iter().map(|r| r.relation_type.as_str()).collect();
        if types.len() > 1 {
            let listed: Vec<&str> = types.into_iter().collect();
            out.push(Finding::new(
                W_PAIR,
                Subject::Relation(rels[1].clone()),
                format!(
                    "{} and {} are related in {} ways: {}",
                    rels[0].source_id,
                    rels[0].target_id,
                    listed.len(),
                    listed.join(", ")
                ),
            ));
        }
    }
}

fn strict_empty_types(instance: &OcedInstance, out: &mut Vec<Finding>) {
    let Some(schema) = instance.schema() else { return };
    let used: HashSet<&str> = instance.events().iter().map(|e| e.event_type.as_str()).collect();
    for name in schema.event_types().keys() {
        if !used.contains(name.as_str()) {
            out.push(Finding::new(
                W_EMPTYTYPE,
                Subject::EventType(name.clone()),
                format!("event type {name:?} is declared but has no events"),
            ));
        }
    }
}

fn strict_hierarchy(instance: &OcedInstance, out: &mut Vec<Finding>) {
    for r in instance.relations().iter().filter(|r| r.relation_type == CHILD_OF) {
        let mirrored = ObjectRelation::new(&r.target_id, &r.source_id, PARENT_OF);
        if instance.has_relation(&mirrored) {
            out.push(Finding::new(
                W_HIERARCHY_REDUNDANT,
                Subject::Relation(r.clone()),
                format!("also recorded as {mirrored}"),
            ));
        }
    }
    let mut parents: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (child, parent) in semantics::child_parent_edges(instance) {
        parents.entry(child).or_default().insert(parent);
    }
    for (child, ps) in parents {
        if ps.len() > 1 {
            let listed: Vec<&str> = ps.into_iter().collect();
            out.push(Finding::new(
                W_MULTI_PARENT,
                Subject::Object(child.to_string()),
                format!("child of {}", listed.join(", ")),
            ));
        }
    }
}

fn unit_pairs(instance: &OcedInstance, out: &mut Vec<Finding>) {
    let mut names: BTreeSet<&str> = BTreeSet::new();
    for e in instance.events() {
        names.extend(e.attributes.iter().map(|a| a.name.as_str()));
    }
    for o in instance.objects() {
        names.extend(o.attributes.iter().map(|a| a.name.as_str()));
    }
    for name in &names {
        if let Some(base) = name.strip_suffix("_unit") {
            if names.contains(base) {
                out.push(Finding::new(
                    I_UNIT_PAIR,
                    Subject::Attribute(base.to_string()),
                    format!("{name:?} holds the unit of {base:?}"),
                ));
            }
        }
    }
}

/// Conformance to the attached schema.
pub fn validate_schema(instance: &OcedInstance) -> Result<Vec<Finding>, ValidateError> {
    let schema = instance.schema().ok_or(ValidateError::NoSchema)?;
    let mut out = Vec::new();

    for e in instance.events() {
        let Some(decls) = schema.event_type(&e.event_type) else {
            out.push(Finding::new(
                E_SCHEMA_TYPE,
                Subject::EventType(e.event_type.clone()),
                format!("event type {:?} is not declared", e.event_type),
            ));
            continue;
        };
        for a in &e.attributes {
            check_declared(
                decls.get(&a.name).copied(),
                a.value.scalar_type(),
                &a.name,
                &e.event_type,
            )
            .map(|msg| out.push(Finding::new(E_SCHEMA_ATTR, Subject::Event(e.id.clone()), msg)));
        }
    }

    for o in instance.objects() {
        let Some(decls) = schema.object_type(&o.object_type) else {
            out.push(Finding::new(
                E_SCHEMA_TYPE,
                Subject::ObjectType(o.object_type.clone()),
                format!("object type {:?} is not declared", o.object_type),
            ));
            continue;
        };
        let mut reported = HashSet::new();
        for a in &o.attributes {
            if let Some(msg) = check_declared(
                decls.get(&a.name).copied(),
                a.value.scalar_type(),
                &a.name,
                &o.object_type,
            ) {
                if reported.insert(a.name.as_str()) {
                    out.push(Finding::new(E_SCHEMA_ATTR, Subject::Object(o.id.clone()), msg));
                }
            }
        }
    }

    for r in instance.relations() {
        let (Some(source), Some(target)) = (instance.object(&r.source_id), instance.object(&r.target_id)) else {
            continue;
        };
        if !schema.allows_relation(&r.relation_type, &source.object_type, &target.object_type) {
            out.push(Finding::new(
                E_SCHEMA_REL,
                Subject::Relation(r.clone()),
                format!(
                    "{} is not declared from {:?} to {:?}",
                    r.relation_type, source.object_type, target.object_type
                ),
            ));
        }
    }

    sort_findings(&mut out);
    out.dedup();
    Ok(out)
}

fn check_declared(declared: Option<ScalarType>, actual: ScalarType, name: &str, owner_type: &str) -> Option<String> {
    match declared {
        None => Some(format!("attribute {name:?} is not declared for {owner_type:?}")),
        Some(ty) if ty != actual => Some(format!(
            "attribute {name:?} of {owner_type:?} is declared {ty} but holds {actual}"
        )),
        Some(_) => None,
    }
}

/// Checks marked reference attributes against the explicit relations, and
/// flags unmarked attributes that look like references.
pub fn check_reference_consistency(instance: &OcedInstance, markers: &[ReferenceAttributeMarker]) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut covered: HashSet<(&str, &str)> = HashSet::new();

    for m in markers {
        covered.insert((&m.object_type, &m.attr_name));
        for o in instance.objects().iter().filter(|o| o.object_type == m.object_type) {
            // timestamped objects are checked against their latest value
            let Some(value) = o.current_value(&m.attr_name) else {
                continue;
            };
            let subject = Subject::Object(o.id.clone());
            let Some(target_id) = value.as_str() else {
                out.push(Finding::new(
                    E_REF_CONFLICT,
                    subject,
                    format!(
                        "reference attribute {:?} holds a {} value",
                        m.attr_name,
                        value.scalar_type()
                    ),
                ));
                continue;
            };
            match instance.object(target_id) {
                None => {
                    out.push(Finding::new(
                        E_REF_CONFLICT,
                        subject,
                        format!("{:?} = {target_id:?} does not resolve to an object", m.attr_name),
                    ));
                    continue;
                }
                Some(target) if target.object_type != m.target_object_type => {
                    out.push(Finding::new(
                        E_REF_CONFLICT,
                        subject,
                        format!(
                            "{:?} = {target_id:?} refers to a {:?}, expected {:?}",
                            m.attr_name, target.object_type, m.target_object_type
                        ),
                    ));
                    continue;
                }
                Some(_) => {}
            }
            let explicit: Vec<&str> = instance
                .relations_from(&o.id)
                .filter(|r| r.relation_type == m.relation_type)
                .map(|r| r.target_id.as_str())
                .collect();
            if explicit.is_empty() {
                // the attribute alone is a valid serialization of the relation
                continue;
            }
            if explicit.contains(&target_id) {
                out.push(Finding::new(
                    I_REF_OK,
                    subject,
                    format!("{:?} = {target_id:?} matches relation {}", m.attr_name, m.relation_type),
                ));
            } else {
                out.push(Finding::new(
                    E_REF_CONFLICT,
                    subject,
                    format!(
                        "{:?} = {target_id:?} but {} relations point to {}",
                        m.attr_name,
                        m.relation_type,
                        explicit.join(", ")
                    ),
                ));
            }
        }
    }

    for o in instance.objects() {
        let mut reported = HashSet::new();
        for a in &o.attributes {
            if covered.contains(&(o.object_type.as_str(), a.name.as_str())) {
                continue;
            }
            let Some(text) = a.value.as_str() else { continue };
            if text != o.id && instance.object(text).is_some() && reported.insert(a.name.as_str()) {
                out.push(Finding::new(
                    W_REF_UNMARKED,
                    Subject::Object(o.id.clone()),
                    format!(
                        "{:?} = {text:?} equals an object id but is not marked as a reference",
                        a.name
                    ),
                ));
            }
        }
    }

    sort_findings(&mut out);
    out.dedup();
    out
}

/// Consistency of objects minted by reification and materialization.
pub fn check_meta_consistency(instance: &OcedInstance) -> Vec<Finding> {
    let mut out = Vec::new();

    let mut endpoints: HashMap<&str, (Vec<&str>, Vec<&str>)> = HashMap::new();
    for r in instance.relations() {
        let entry = endpoints.entry(r.source_id.as_str()).or_default();
        match r.relation_type.as_str() {
            "from" => entry.0.push(&r.target_id),
            "to" => entry.1.push(&r.target_id),
            _ => {}
        }
    }
    let reified: Vec<&str> = instance
        .objects()
        .iter()
        .filter(|o| o.meta == ObjectMeta::ReifiedRelation)
        .map(|o| o.id.as_str())
        .collect();
    for id in &reified {
        let (from, to) = endpoints.get(id).cloned().unwrap_or_default();
        let subject = Subject::Object(id.to_string());
        if from.len() != 1 || to.len() != 1 {
            out.push(Finding::new(
                E_META_CYCLE,
                subject,
                format!(
                    "reified relation has {} `from` and {} `to` endpoints, expected one each",
                    from.len(),
                    to.len()
                ),
            ));
            continue;
        }
        if let Some(missing) = [from[0], to[0]].into_iter().find(|e| instance.object(e).is_none()) {
            out.push(Finding::new(
                E_META_CYCLE,
                subject,
                format!("endpoint {missing:?} does not resolve"),
            ));
            continue;
        }
        if reaches_itself(instance, &endpoints, id) {
            out.push(Finding::new(
                E_META_CYCLE,
                subject,
                "endpoints lead back to this reified relation".to_string(),
            ));
        }
    }

    // carrier of each materialized attribute object
    let mut carrier: HashMap<&str, Vec<&str>> = HashMap::new();
    for r in instance.relations().iter().filter(|r| r.relation_type == CHILD_OF) {
        if instance.object(&r.source_id).map(|o| o.meta) == Some(ObjectMeta::MaterializedAttribute) {
            carrier.entry(r.source_id.as_str()).or_default().push(&r.target_id);
        }
    }
    for e in instance.events() {
        for link in &e.observes {
            let Some(carriers) = carrier.get(link.object_id.as_str()) else {
                continue;
            };
            for c in carriers {
                for other in e.observes.iter().filter(|l| l.object_id == *c) {
                    let pair = (other.qualifier.as_str(), link.qualifier.as_str());
                    if pair == (CREATE, DELETE) || pair == (DELETE, CREATE) {
                        out.push(Finding::new(
                            W_META_QUALIFIER,
                            Subject::Event(e.id.clone()),
                            format!(
                                "{} {c} together with {} {}",
                                other.qualifier, link.qualifier, link.object_id
                            ),
                        ));
                    }
                }
            }
        }
    }

    sort_findings(&mut out);
    out.dedup();
    out
}

fn reaches_itself(instance: &OcedInstance, endpoints: &HashMap<&str, (Vec<&str>, Vec<&str>)>, start: &str) -> bool {
    let mut stack: Vec<&str> = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();
    if let Some((from, to)) = endpoints.get(start) {
        stack.extend(from.iter().chain(to.iter()));
    }
    while let Some(node) = stack.pop() {
        if node == start {
            return true;
        }
        if !seen.insert(node) {
            continue;
        }
        let is_reified = instance.object(node).map(|o| o.meta) == Some(ObjectMeta::ReifiedRelation);
        if is_reified {
            if let Some((from, to)) = endpoints.get(node) {
                stack.extend(from.iter().chain(to.iter()));
            }
        }
    }
    false
}

/// Co-observation suggestions as warnings.
pub fn implicit_relation_findings(instance: &OcedInstance) -> Vec<Finding> {
    semantics::infer_co_observation_relations(instance)
        .into_iter()
        .map(|s| {
            Finding::new(
                W_IMPLICIT_REL,
                Subject::Link {
                    event: s.witness_event_id.clone(),
                    object: s.source_id.clone(),
                },
                format!(
                    "{} and {} are observed together by {} but not related",
                    s.source_id, s.target_id, s.witness_event_id
                ),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{build_instance, build_lenient, Event, InstanceParts, OcedObject, MODIFY};
    use crate::time::OcedTime;

    fn codes(fs: &[Finding]) -> Vec<&'static str> {
        fs.iter().map(|f| f.code).collect()
    }

    fn with_relation(r: ObjectRelation) -> OcedInstance {
        let mut parts = fixtures::p2p_parts();
        parts.relations.push(r);
        build_instance(parts).unwrap()
    }

    #[test]
    fn fixture_is_clean() {
        assert!(validate_core(&fixtures::p2p(), false).is_empty());
        assert!(validate_core(&fixtures::p2p(), true).is_empty());
    }

    #[test]
    fn strict_pair_reading() {
        let i = with_relation(ObjectRelation::new(fixtures::INVOICE, fixtures::PO, "OWNED_BY"));
        assert!(validate_core(&i, false).is_empty());
        assert_eq!(codes(&validate_core(&i, true)), vec![W_PAIR]);
    }

    #[test]
    fn type_clash_is_reported() {
        let parts = InstanceParts {
            objects: vec![
                OcedObject::new("a", "t").with_attr("weight", 80),
                OcedObject::new("b", "t").with_attr("weight", "80"),
            ],
            ..Default::default()
        };
        let fs = validate_core(&build_lenient(parts), false);
        assert_eq!(codes(&fs), vec![E_TYPECLASH]);
        assert_eq!(fs[0].subject, Subject::Attribute("weight".into()));
    }

    #[test]
    fn lenient_instances_report_everything() {
        let parts = InstanceParts {
            objects: vec![
                OcedObject::new("a", "t"),
                OcedObject::new("a", "t"),
                OcedObject::new("rel:x", "t"),
            ],
            events: vec![Event::new("e", "x", fixtures::po_created_at()).observing("zz", CREATE)],
            relations: vec![ObjectRelation::new("a", "nope", "R")],
            ..Default::default()
        };
        let fs = validate_core(&build_lenient(parts), false);
        let got: BTreeSet<&str> = codes(&fs).into_iter().collect();
        assert_eq!(got, BTreeSet::from([E_DANGLE, E_DUPID, E_RESERVED_ID]));
        assert_eq!(fs.iter().filter(|f| f.code == E_DANGLE).count(), 2);
    }

    #[test]
    fn strict_empty_event_type() {
        let mut parts = fixtures::p2p_parts();
        let mut schema = fixtures::p2p_schema();
        schema = crate::schema::OcedSchema::new(
            schema
                .event_types()
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|(a, t)| (a.clone(), *t)).collect()))
                .chain([("Invoice cleared".to_string(), vec![])])
                .collect(),
            schema
                .object_types()
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|(a, t)| (a.clone(), *t)).collect()))
                .collect(),
            schema.relation_types().iter().cloned().collect(),
        )
        .unwrap();
        parts.schema = Some(schema);
        let i = build_instance(parts).unwrap();
        assert!(validate_core(&i, false).is_empty());
        assert_eq!(codes(&validate_core(&i, true)), vec![W_EMPTYTYPE]);
    }

    #[test]
    fn strict_hierarchy_and_units() {
        let parts = InstanceParts {
            objects: vec![
                OcedObject::new("line", "l")
                    .with_attr("weight", 3)
                    .with_attr("weight_unit", "kg"),
                OcedObject::new("po", "p"),
                OcedObject::new("po2", "p"),
            ],
            relations: vec![
                ObjectRelation::new("line", "po", CHILD_OF),
                ObjectRelation::new("po", "line", PARENT_OF),
                ObjectRelation::new("line", "po2", CHILD_OF),
            ],
            ..Default::default()
        };
        let i = build_instance(parts).unwrap();
        assert!(validate_core(&i, false).is_empty());
        assert_eq!(
            codes(&validate_core(&i, true)),
            vec![I_UNIT_PAIR, W_HIERARCHY_REDUNDANT, W_MULTI_PARENT]
        );
    }

    #[test]
    fn schema_conformance() {
        assert!(validate_schema(&fixtures::p2p_with_schema()).unwrap().is_empty());
        assert_eq!(validate_schema(&fixtures::p2p()), Err(ValidateError::NoSchema));

        let mut parts = fixtures::p2p_with_schema().into_parts();
        parts.events[0].attributes.push(crate::model::EventAttribute {
            name: "currency".into(),
            value: "EUR".into(),
        });
        let fs = validate_schema(&build_instance(parts).unwrap()).unwrap();
        assert_eq!(codes(&fs), vec![E_SCHEMA_ATTR]);

        let mut parts = fixtures::p2p_with_schema().into_parts();
        parts
            .relations
            .push(ObjectRelation::new(fixtures::LINE, fixtures::PO, CHILD_OF));
        let fs = validate_schema(&build_instance(parts).unwrap()).unwrap();
        assert_eq!(codes(&fs), vec![E_SCHEMA_REL]);

        let mut parts = fixtures::p2p_with_schema().into_parts();
        parts.objects.push(OcedObject::new("v1", "vendor"));
        parts.events[1].event_type = "PO approved".into();
        let fs = validate_schema(&build_instance(parts).unwrap()).unwrap();
        assert_eq!(codes(&fs), vec![E_SCHEMA_TYPE, E_SCHEMA_TYPE]);

        let mut parts = fixtures::p2p_with_schema().into_parts();
        let po = parts.objects.iter_mut().find(|o| o.id == fixtures::PO).unwrap();
        po.attributes[0].value = crate::value::ScalarValue::Integer(1);
        let fs = validate_schema(&build_instance(parts).unwrap()).unwrap();
        assert_eq!(codes(&fs), vec![E_SCHEMA_ATTR]);
    }

    fn marker() -> ReferenceAttributeMarker {
        ReferenceAttributeMarker::new("package", "assigned-to", "assigned-to", "delivery tour")
    }

    #[test]
    fn reference_attribute_agrees() {
        let i = fixtures::package_assignment("tour#17");
        assert_eq!(codes(&check_reference_consistency(&i, &[marker()])), vec![I_REF_OK]);
    }

    #[test]
    fn reference_attribute_conflicts() {
        let i = fixtures::package_assignment("tour#23");
        assert_eq!(
            codes(&check_reference_consistency(&i, &[marker()])),
            vec![E_REF_CONFLICT]
        );
    }

    #[test]
    fn unmarked_reference_like_attribute() {
        let i = fixtures::package_assignment("tour#17");
        let fs = check_reference_consistency(&i, &[]);
        assert_eq!(codes(&fs), vec![W_REF_UNMARKED]);
    }

    #[test]
    fn unresolved_or_mistyped_reference() {
        let parts = InstanceParts {
            objects: vec![
                OcedObject::new("package#5", "package").with_attr("assigned-to", "tour#99"),
                OcedObject::new("package#6", "package").with_attr("assigned-to", "package#5"),
            ],
            ..Default::default()
        };
        let i = build_instance(parts).unwrap();
        let fs = check_reference_consistency(&i, &[marker()]);
        assert_eq!(codes(&fs), vec![E_REF_CONFLICT, E_REF_CONFLICT]);
    }

    fn materialized(order_q: &str, price_q: &str) -> OcedInstance {
        let parts = InstanceParts {
            objects: vec![
                OcedObject::new("Order17", "Order"),
                OcedObject::new("attr:Order17:price", "Order+price")
                    .with_meta(ObjectMeta::MaterializedAttribute)
                    .with_attr("price", crate::value::ScalarValue::Real(48.76)),
            ],
            events: vec![Event::new("e", "Create Order", fixtures::po_created_at())
                .observing("Order17", order_q)
                .observing("attr:Order17:price", price_q)],
            relations: vec![ObjectRelation::new("attr:Order17:price", "Order17", CHILD_OF)],
            ..Default::default()
        };
        build_instance(parts).unwrap()
    }

    #[test]
    fn meta_qualifier_pairs() {
        // enumerate every qualifier pair; only CREATE/DELETE in either order fires
        let qs = [CREATE, MODIFY, DELETE, "READ"];
        for a in qs {
            for b in qs {
                let fired = !check_meta_consistency(&materialized(a, b)).is_empty();
                let expected = (a == CREATE && b == DELETE) || (a == DELETE && b == CREATE);
                assert_eq!(fired, expected, "{a} / {b}");
            }
        }
        assert_eq!(
            codes(&check_meta_consistency(&materialized(CREATE, DELETE))),
            vec![W_META_QUALIFIER]
        );
    }

    #[test]
    fn reified_relation_endpoints() {
        let base = || InstanceParts {
            objects: vec![
                OcedObject::new("a", "t"),
                OcedObject::new("b", "t"),
                OcedObject::new("rel:R:a:b", "R").with_meta(ObjectMeta::ReifiedRelation),
            ],
            relations: vec![ObjectRelation::new("rel:R:a:b", "a", "from")],
            ..Default::default()
        };
        let i = build_instance(base()).unwrap();
        assert_eq!(codes(&check_meta_consistency(&i)), vec![E_META_CYCLE]);

        let mut parts = base();
        parts.relations.push(ObjectRelation::new("rel:R:a:b", "b", "to"));
        assert!(check_meta_consistency(&build_instance(parts).unwrap()).is_empty());

        // two reified relations whose endpoints point at each other
        let parts = InstanceParts {
            objects: vec![
                OcedObject::new("a", "t"),
                OcedObject::new("rel:1", "R").with_meta(ObjectMeta::ReifiedRelation),
                OcedObject::new("rel:2", "R").with_meta(ObjectMeta::ReifiedRelation),
            ],
            relations: vec![
                ObjectRelation::new("rel:1", "a", "from"),
                ObjectRelation::new("rel:1", "rel:2", "to"),
                ObjectRelation::new("rel:2", "a", "from"),
                ObjectRelation::new("rel:2", "rel:1", "to"),
            ],
            ..Default::default()
        };
        let fs = check_meta_consistency(&build_instance(parts).unwrap());
        assert_eq!(codes(&fs), vec![E_META_CYCLE, E_META_CYCLE]);
    }

    #[test]
    fn implicit_relations_as_findings() {
        let fs = implicit_relation_findings(&fixtures::clear_invoice());
        assert_eq!(fs.len(), 3);
        assert!(fs.iter().all(|f| f.code == W_IMPLICIT_REL));
    }

    #[test]
    fn dup_link_and_form_findings() {
        let parts = InstanceParts {
            objects: vec![OcedObject::new("o", "t").with_attr_at("w", 1, OcedTime::EPOCH)],
            events: vec![Event::new("e", "x", fixtures::po_created_at())
                .observing("o", MODIFY)
                .observing("o", MODIFY)],
            ..Default::default()
        };
        let fs = validate_core(&build_lenient(parts), false);
        assert_eq!(codes(&fs), vec![E_DUPLINK, E_FORM]);
    }
}
