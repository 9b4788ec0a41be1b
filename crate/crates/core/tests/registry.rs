//! One minimal scenario per finding code.

use std::collections::{BTreeMap, BTreeSet};

use oced_core::finding::{codes::*, severity_of, REGISTRY};
use oced_core::fixtures;
use oced_core::model::{CHILD_OF, CREATE, DELETE, MODIFY, PARENT_OF};
use oced_core::semantics::{derive_object_lifecycles, derive_relation_lifecycles, validate_snapshot_chain};
use oced_core::transform::{materialize_attribute, snapshots_to_timestamped};
use oced_core::validate::{
    check_meta_consistency, check_reference_consistency, implicit_relation_findings, validate_core, validate_schema,
    ReferenceAttributeMarker,
};
use oced_core::{
    build_instance, build_lenient, Event, Finding, InstanceParts, ObjectMeta, ObjectRelation, OcedInstance, OcedObject,
    OcedSchema, OcedTime, RelationDecl, ScalarType,
};

fn at(day: u32) -> OcedTime {
    OcedTime::ymd_hms_ms(2024, 1, day, 0, 0, 0, 0).unwrap()
}

fn lenient(objects: Vec<OcedObject>, events: Vec<Event>, relations: Vec<ObjectRelation>) -> OcedInstance {
    build_lenient(InstanceParts {
        objects,
        events,
        relations,
        ..Default::default()
    })
}

fn core(i: OcedInstance) -> Vec<Finding> {
    validate_core(&i, false)
}

fn strict(i: OcedInstance) -> Vec<Finding> {
    validate_core(&i, true)
}

fn identity() -> BTreeMap<String, String> {
    [("t".to_string(), "key".to_string())].into()
}

fn tour_marker() -> ReferenceAttributeMarker {
    ReferenceAttributeMarker::new("package", "assigned-to", "assigned-to", "delivery tour")
}

fn schema_violations() -> Vec<Finding> {
    let schema = OcedSchema::new(
        vec![],
        vec![("t".into(), vec![("w".into(), ScalarType::Integer)])],
        vec![RelationDecl::new("R", "t", "u")],
    )
    .unwrap();
    let parts = InstanceParts {
        objects: vec![
            OcedObject::new("a", "t").with_attr("w", "heavy").with_attr("extra", 1),
            OcedObject::new("b", "t"),
            OcedObject::new("c", "vendor"),
        ],
        relations: vec![ObjectRelation::new("a", "b", "S")],
        schema: Some(schema),
        ..Default::default()
    };
    validate_schema(&build_lenient(parts)).unwrap()
}

fn meta_qualifier_clash() -> Vec<Finding> {
    let m = materialize_attribute(&fixtures::order_with_price(), "Order", "price").unwrap();
    let attr = m
        .objects()
        .iter()
        .find(|o| o.meta == ObjectMeta::MaterializedAttribute)
        .unwrap()
        .id
        .clone();
    let mut parts = m.into_parts();
    parts.events.push(
        Event::new("e9", "Cancel Order", at(9))
            .observing("Order17", CREATE)
            .observing(&attr, DELETE),
    );
    check_meta_consistency(&build_lenient(parts))
}

fn snapshots(objects: Vec<OcedObject>, events: Vec<Event>) -> OcedInstance {
    build_instance(InstanceParts {
        objects,
        events,
        ..Default::default()
    })
    .unwrap()
}

fn scenarios() -> Vec<(&'static str, Vec<Finding>)> {
    vec![
        (
            E_DUPID,
            core(lenient(
                vec![OcedObject::new("a", "t"), OcedObject::new("a", "t")],
                vec![],
                vec![],
            )),
        ),
        (
            E_DANGLE,
            core(lenient(
                vec![],
                vec![Event::new("e", "x", at(1)).observing("ghost", MODIFY)],
                vec![],
            )),
        ),
        (
            E_FORM,
            core(lenient(
                vec![OcedObject::new("a", "t").with_attr_at("w", 1, at(1))],
                vec![],
                vec![],
            )),
        ),
        (
            E_TYPECLASH,
            core(lenient(
                vec![
                    OcedObject::new("a", "t").with_attr("w", 1),
                    OcedObject::new("b", "t").with_attr("w", "1"),
                ],
                vec![],
                vec![],
            )),
        ),
        (
            E_DUPATTR,
            core(lenient(
                vec![],
                vec![Event::new("e", "x", at(1)).with_attr("c", 1).with_attr("c", 2)],
                vec![],
            )),
        ),
        (
            E_DUPREL,
            core(lenient(
                vec![OcedObject::new("a", "t"), OcedObject::new("b", "t")],
                vec![],
                vec![ObjectRelation::new("a", "b", "R"), ObjectRelation::new("a", "b", "R")],
            )),
        ),
        (
            E_DUPLINK,
            core(lenient(
                vec![OcedObject::new("a", "t")],
                vec![Event::new("e", "x", at(1))
                    .observing("a", MODIFY)
                    .observing("a", MODIFY)],
                vec![],
            )),
        ),
        (
            E_EMPTY,
            core(lenient(
                vec![OcedObject::new("a", "t")],
                vec![Event::new("e", "x", at(1)).observing("a", "")],
                vec![],
            )),
        ),
        (
            E_RESERVED_ID,
            core(lenient(vec![OcedObject::new("rel:x", "t")], vec![], vec![])),
        ),
        (
            W_PAIR,
            strict(lenient(
                vec![OcedObject::new("a", "t"), OcedObject::new("b", "t")],
                vec![],
                vec![ObjectRelation::new("a", "b", "R"), ObjectRelation::new("a", "b", "S")],
            )),
        ),
        (W_EMPTYTYPE, {
            let schema = OcedSchema::new(vec![("never".into(), vec![])], vec![], vec![]).unwrap();
            strict(build_lenient(InstanceParts {
                schema: Some(schema),
                ..Default::default()
            }))
        }),
        (
            W_HIERARCHY_REDUNDANT,
            strict(lenient(
                vec![OcedObject::new("a", "t"), OcedObject::new("b", "t")],
                vec![],
                vec![
                    ObjectRelation::new("a", "b", CHILD_OF),
                    ObjectRelation::new("b", "a", PARENT_OF),
                ],
            )),
        ),
        (
            W_MULTI_PARENT,
            strict(lenient(
                vec![
                    OcedObject::new("a", "t"),
                    OcedObject::new("b", "t"),
                    OcedObject::new("c", "t"),
                ],
                vec![],
                vec![
                    ObjectRelation::new("a", "b", CHILD_OF),
                    ObjectRelation::new("a", "c", CHILD_OF),
                ],
            )),
        ),
        (I_UNIT_PAIR, strict(fixtures::weight_series())),
        (E_SCHEMA_ATTR, schema_violations()),
        (E_SCHEMA_TYPE, schema_violations()),
        (E_SCHEMA_REL, schema_violations()),
        (
            E_REF_CONFLICT,
            check_reference_consistency(&fixtures::package_assignment("tour#23"), &[tour_marker()]),
        ),
        (
            I_REF_OK,
            check_reference_consistency(&fixtures::package_assignment("tour#17"), &[tour_marker()]),
        ),
        (
            W_REF_UNMARKED,
            check_reference_consistency(&fixtures::package_assignment("tour#17"), &[]),
        ),
        (
            E_META_CYCLE,
            check_meta_consistency(&lenient(
                vec![OcedObject::new("rel:x", "t").with_meta(ObjectMeta::ReifiedRelation)],
                vec![],
                vec![],
            )),
        ),
        (W_META_QUALIFIER, meta_qualifier_clash()),
        (W_IMPLICIT_REL, implicit_relation_findings(&fixtures::clear_invoice())),
        (
            E_LIFECYCLE,
            derive_object_lifecycles(&lenient(
                vec![OcedObject::new("a", "t")],
                vec![
                    Event::new("e1", "x", at(1)).observing("a", DELETE),
                    Event::new("e2", "x", at(2)).observing("a", CREATE),
                ],
                vec![],
            ))
            .findings,
        ),
        (
            W_LIFECYCLE_OPEN,
            derive_relation_lifecycles(&lenient(
                vec![OcedObject::new("a", "t"), OcedObject::new("b", "t")],
                vec![],
                vec![ObjectRelation::new("a", "b", "R")],
            ))
            .findings,
        ),
        (
            E_SNAPSHOT_IDENTITY,
            validate_snapshot_chain(
                &snapshots(
                    vec![
                        OcedObject::new("a-1", "t").with_attr("key", "a"),
                        OcedObject::new("a-2", "t"),
                    ],
                    vec![],
                ),
                &identity(),
            )
            .unwrap(),
        ),
        (
            E_SNAPSHOT_CONFLICT,
            validate_snapshot_chain(
                &snapshots(
                    vec![
                        OcedObject::new("a-1", "t").with_attr("key", "a").with_attr("w", 1),
                        OcedObject::new("a-2", "t").with_attr("key", "a").with_attr("w", 2),
                    ],
                    vec![Event::new("e", "x", at(1))
                        .observing("a-1", MODIFY)
                        .observing("a-2", MODIFY)],
                ),
                &identity(),
            )
            .unwrap(),
        ),
        (
            W_SNAPSHOT_UNOBSERVED,
            snapshots_to_timestamped(
                &snapshots(
                    vec![OcedObject::new("a-1", "t").with_attr("key", "a").with_attr("w", 1)],
                    vec![],
                ),
                &identity(),
            )
            .unwrap()
            .1,
        ),
    ]
}

#[test]
fn every_scenario_raises_its_code() {
    for (code, findings) in scenarios() {
        let hit: Vec<&Finding> = findings.iter().filter(|f| f.code == code).collect();
        assert!(!hit.is_empty(), "{code} not raised, got {findings:?}");
        for f in hit {
            assert_eq!(Some(f.severity), severity_of(code), "{code}");
        }
    }
}

#[test]
fn scenarios_cover_the_registry() {
    let covered: BTreeSet<&str> = scenarios().into_iter().map(|(c, _)| c).collect();
    let registered: BTreeSet<&str> = REGISTRY.iter().map(|(c, _, _)| *c).collect();
    assert_eq!(covered, registered);
}

#[test]
fn findings_carry_registered_codes_only() {
    for (_, findings) in scenarios() {
        for f in findings {
            assert!(severity_of(f.code).is_some(), "{} is not registered", f.code);
        }
    }
}
