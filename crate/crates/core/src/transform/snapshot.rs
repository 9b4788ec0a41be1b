use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::finding::{codes::W_SNAPSHOT_UNOBSERVED, Finding, Severity, Subject};
use crate::model::{
    build_instance, Form, InstanceParts, ObjectAttributeValue, ObjectRelation, OcedInstance, OcedObject, QualifiedLink,
};
use crate::semantics::validate_snapshot_chain;
use crate::time::OcedTime;
use crate::value::ScalarValue;

use super::TransformError;

fn dedup_links(links: &mut Vec<QualifiedLink>) {
    let mut seen = HashSet::new();
    links.retain(|l| seen.insert((l.object_id.clone(), l.qualifier.clone())));
}

/// Merges snapshot objects that share an identity value into one object
/// with timestamped values. Objects of types without an identity attribute
/// are treated as single-snapshot groups. Each value is stamped with the
/// earliest event observing its snapshot; unobserved snapshots are stamped
/// with the epoch and reported.
pub fn snapshots_to_timestamped(
    instance: &OcedInstance,
    identity: &BTreeMap<String, String>,
) -> Result<(OcedInstance, Vec<Finding>), TransformError> {
    if instance.form() != Form::Baseline {
        return Err(TransformError::WrongForm {
            expected: Form::Baseline,
        });
    }
    let chain = validate_snapshot_chain(instance, identity)?;
    let errors: Vec<Finding> = chain.into_iter().filter(|f| f.severity == Severity::Error).collect();
    if !errors.is_empty() {
        return Err(TransformError::SnapshotChain(errors));
    }

    let mut findings = Vec::new();
    // merged id -> (type, members)
    let mut groups: BTreeMap<String, (&str, Vec<&OcedObject>)> = BTreeMap::new();
    let mut merged_of: HashMap<&str, String> = HashMap::new();
    for o in instance.objects() {
        let merged = match identity.get(&o.object_type) {
            Some(attr) => o
                .current_value(attr)
                .map(|v| v.lexical())
                .unwrap_or_else(|| o.id.clone()),
            None => o.id.clone(),
        };
        let group = groups.entry(merged.clone()).or_insert((&o.object_type, Vec::new()));
        if group.0 != o.object_type || (identity.get(&o.object_type).is_none() && !group.1.is_empty()) {
            return Err(TransformError::IdCollision(merged));
        }
        group.1.push(o);
        merged_of.insert(&o.id, merged);
    }

    let mut objects = Vec::new();
    for (merged, (ty, members)) in &groups {
        let id_attr = identity.get(*ty);
        let mut values: BTreeMap<(&str, i64), (OcedTime, &ScalarValue)> = BTreeMap::new();
        for s in members {
            let stamp = instance
                .observations_of(&s.id)
                .map(|(e, _)| e.time)
                .min_by_key(|t| t.millis());
            let carried: Vec<_> = s.attributes.iter().filter(|a| Some(&a.name) != id_attr).collect();
            let stamp = match stamp {
                Some(t) => t,
                None => {
                    if !carried.is_empty() {
                        findings.push(Finding::new(
                            W_SNAPSHOT_UNOBSERVED,
                            Subject::Object(s.id.clone()),
                            "no event observes this snapshot; its values are stamped 1970-01-01T00:00:00.000Z",
                        ));
                    }
                    OcedTime::EPOCH
                }
            };
            for a in carried {
                match values.get(&(a.name.as_str(), stamp.millis())) {
                    Some((_, v)) if *v != &a.value => {
                        return Err(TransformError::SnapshotConflict {
                            object: merged.clone(),
                            attr: a.name.clone(),
                            at: stamp.timestamp_string(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        values.insert((a.name.as_str(), stamp.millis()), (stamp, &a.value));
                    }
                }
            }
        }
        let mut obj = OcedObject::new(merged, *ty).with_meta(members[0].meta);
        obj.attributes = values
            .into_iter()
            .map(|((name, _), (at, value))| ObjectAttributeValue {
                name: name.to_string(),
                value: value.clone(),
                at: Some(at),
            })
            .collect();
        objects.push(obj);
    }

    let relations: BTreeSet<ObjectRelation> = instance
        .relations()
        .iter()
        .map(|r| {
            ObjectRelation::new(
                &merged_of[r.source_id.as_str()],
                &merged_of[r.target_id.as_str()],
                &r.relation_type,
            )
        })
        .collect();

    let mut events = instance.events().to_vec();
    for e in events.iter_mut() {
        for l in e.observes.iter_mut() {
            l.object_id = merged_of[l.object_id.as_str()].clone();
        }
        dedup_links(&mut e.observes);
    }

    let out = build_instance(InstanceParts {
        objects,
        events,
        relations: relations.into_iter().collect(),
        schema: instance.schema().cloned(),
        form: Form::Timestamped,
    })?;
    findings.sort();
    Ok((out, findings))
}

/// Splits every object of a timestamped instance into snapshots `<id>-1`,
/// `<id>-2`, ... one per distinct stamp, each carrying the values stamped at
/// that instant plus the identity attribute. An initial snapshot without
/// values comes first when the object has no stamps or is observed before
/// its first stamp. Events observe the latest snapshot at or before their
/// time; relations connect the latest snapshots.
pub fn baseline_to_snapshots(
    instance: &OcedInstance,
    identity: &BTreeMap<String, String>,
) -> Result<OcedInstance, TransformError> {
    if instance.form() != Form::Timestamped {
        return Err(TransformError::WrongForm {
            expected: Form::Timestamped,
        });
    }

    // object id -> [(start millis, snapshot id)] in time order
    let mut chains: HashMap<&str, Vec<(Option<i64>, String)>> = HashMap::new();
    let mut minted: HashSet<String> = HashSet::new();
    let mut objects = Vec::new();
    for o in instance.objects() {
        let attr = identity
            .get(&o.object_type)
            .ok_or_else(|| TransformError::MissingIdentityAttr(o.object_type.clone()))?;
        if o.has_attribute(attr) {
            return Err(TransformError::IdentityClash {
                object: o.id.clone(),
                attr: attr.clone(),
            });
        }
        let mut by_stamp: BTreeMap<i64, Vec<&ObjectAttributeValue>> = BTreeMap::new();
        for a in &o.attributes {
            let at = a.at.expect("timestamped form");
            by_stamp.entry(at.millis()).or_default().push(a);
        }
        let first_seen = instance.observations_of(&o.id).map(|(e, _)| e.time.millis()).min();
        let needs_initial = match by_stamp.keys().next() {
            None => true,
            Some(first) => first_seen.is_some_and(|t| t < *first),
        };

        let mut chain = Vec::new();
        let mut push = |start: Option<i64>, values: &[&ObjectAttributeValue]| -> Result<(), TransformError> {
            let id = format!("{}-{}", o.id, chain.len() + 1);
            if instance.event(&id).is_some() || !minted.insert(id.clone()) {
                return Err(TransformError::IdCollision(id));
            }
            let mut snap = OcedObject::new(&id, &o.object_type)
                .with_meta(o.meta)
                .with_attr(attr.as_str(), ScalarValue::String(o.id.clone()));
            snap.attributes.extend(values.iter().map(|a| ObjectAttributeValue {
                name: a.name.clone(),
                value: a.value.clone(),
                at: None,
            }));
            objects.push(snap);
            chain.push((start, id));
            Ok(())
        };
        if needs_initial {
            push(None, &[])?;
        }
        for (stamp, values) in &by_stamp {
            push(Some(*stamp), values)?;
        }
        chains.insert(&o.id, chain);
    }

    let target = |object: &str, t: Option<i64>| -> String {
        let chain = &chains[object];
        let pick = match t {
            None => chain.last(),
            Some(t) => chain.iter().rev().find(|(start, _)| start.map_or(true, |s| s <= t)),
        };
        pick.unwrap_or(&chain[0]).1.clone()
    };

    let mut events = instance.events().to_vec();
    for e in events.iter_mut() {
        let t = e.time.millis();
        for l in e.observes.iter_mut() {
            l.object_id = target(&l.object_id, Some(t));
        }
        dedup_links(&mut e.observes);
    }
    let relations: BTreeSet<ObjectRelation> = instance
        .relations()
        .iter()
        .map(|r| ObjectRelation::new(target(&r.source_id, None), target(&r.target_id, None), &r.relation_type))
        .collect();

    Ok(build_instance(InstanceParts {
        objects,
        events,
        relations: relations.into_iter().collect(),
        schema: instance.schema().cloned(),
        form: Form::Baseline,
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, PO};
    use crate::model::{canonical_equal, Event, CREATE};
    use crate::time::Resolution;

    #[test]
    fn fig6_to_fig7_and_back() {
        let ids = fixtures::snapshot_identity();
        let (ts, findings) = snapshots_to_timestamped(&fixtures::p2p_snapshots(), &ids).unwrap();
        assert!(findings.is_empty());
        assert!(canonical_equal(&ts, &fixtures::p2p_timestamped()));
        let back = baseline_to_snapshots(&ts, &ids).unwrap();
        assert!(canonical_equal(&back, &fixtures::p2p_snapshots()));
    }

    #[test]
    fn wrong_forms() {
        let ids = fixtures::snapshot_identity();
        assert!(matches!(
            baseline_to_snapshots(&fixtures::p2p(), &ids),
            Err(TransformError::WrongForm { .. })
        ));
        assert!(matches!(
            snapshots_to_timestamped(&fixtures::p2p_timestamped(), &ids),
            Err(TransformError::WrongForm { .. })
        ));
    }

    #[test]
    fn object_without_stamps_gives_one_snapshot() {
        let ids: BTreeMap<String, String> = [("parcel".to_string(), "itemId".to_string())].into();
        let parts = InstanceParts {
            objects: vec![OcedObject::new("item", "parcel")],
            form: Form::Timestamped,
            ..Default::default()
        };
        let out = baseline_to_snapshots(&build_instance(parts).unwrap(), &ids).unwrap();
        assert_eq!(out.objects().len(), 1);
        assert_eq!(out.objects()[0].id, "item-1");
    }

    #[test]
    fn event_between_stamps_targets_earlier_snapshot() {
        let ids: BTreeMap<String, String> = [("parcel".to_string(), "itemId".to_string())].into();
        let mid = OcedTime::ymd_hms_ms(2024, 6, 1, 0, 0, 0, 0).unwrap();
        let mut parts = fixtures::weight_series().into_parts();
        parts
            .events
            .push(Event::new("weigh", "weigh", mid).observing("item", "READ"));
        let out = baseline_to_snapshots(&build_instance(parts).unwrap(), &ids).unwrap();
        assert_eq!(out.objects().len(), 3);
        assert_eq!(out.event("weigh").unwrap().observes[0].object_id, "item-2");
    }

    #[test]
    fn unobserved_snapshot_gets_epoch() {
        let ids: BTreeMap<String, String> = [("t".to_string(), "key".to_string())].into();
        let parts = InstanceParts {
            objects: vec![OcedObject::new("a-1", "t").with_attr("key", "a").with_attr("w", 1)],
            ..Default::default()
        };
        let (out, findings) = snapshots_to_timestamped(&build_instance(parts).unwrap(), &ids).unwrap();
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].code, W_SNAPSHOT_UNOBSERVED);
        assert_eq!(out.object("a").unwrap().attributes[0].at, Some(OcedTime::EPOCH));
    }

    #[test]
    fn conflicting_unobserved_snapshots() {
        let ids: BTreeMap<String, String> = [("t".to_string(), "key".to_string())].into();
        let parts = InstanceParts {
            objects: vec![
                OcedObject::new("a-1", "t").with_attr("key", "a").with_attr("w", 1),
                OcedObject::new("a-2", "t").with_attr("key", "a").with_attr("w", 2),
            ],
            ..Default::default()
        };
        assert!(matches!(
            snapshots_to_timestamped(&build_instance(parts).unwrap(), &ids),
            Err(TransformError::SnapshotConflict { .. })
        ));
    }

    #[test]
    fn single_snapshot_group() {
        let ids = fixtures::snapshot_identity();
        let at = OcedTime::from_millis(5000, Resolution::Second).unwrap();
        let parts = InstanceParts {
            objects: vec![OcedObject::new("x-1", fixtures::PO_TYPE)
                .with_attr("POid", PO)
                .with_attr("release status", "X")],
            events: vec![Event::new("e", "PO created", at).observing("x-1", CREATE)],
            ..Default::default()
        };
        let (out, _) = snapshots_to_timestamped(&build_instance(parts).unwrap(), &ids).unwrap();
        let po = out.object(PO).unwrap();
        assert_eq!(po.attributes.len(), 1);
        assert_eq!(po.attributes[0].at, Some(at));
    }
}
