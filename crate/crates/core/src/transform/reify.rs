use std::collections::{BTreeMap, HashSet};

use crate::model::{
    build_instance, ObjectMeta, ObjectRelation, OcedInstance, OcedObject, CHILD_OF, MATERIALIZED_PREFIX, REIFIED_PREFIX,
};

use super::TransformError;

/// Replaces every relation of `relation_type` by an object of that type with
/// `from` and `to` relations to the original endpoints.
pub fn reify_relations(instance: &OcedInstance, relation_type: &str) -> Result<OcedInstance, TransformError> {
    if relation_type == "from" || relation_type == "to" {
        return Err(TransformError::ReservedType(relation_type.to_string()));
    }
    let mut parts = instance.to_parts();
    let (chosen, mut kept): (Vec<_>, Vec<_>) = parts
        .relations
        .into_iter()
        .partition(|r| r.relation_type == relation_type);
    if chosen.is_empty() {
        return Ok(instance.clone());
    }
    let mut minted = HashSet::new();
    for r in chosen {
        let id = format!("{REIFIED_PREFIX}{relation_type}:{}:{}", r.source_id, r.target_id);
        if instance.contains_id(&id) || !minted.insert(id.clone()) {
            return Err(TransformError::IdCollision(id));
        }
        parts
            .objects
            .push(OcedObject::new(&id, relation_type).with_meta(ObjectMeta::ReifiedRelation));
        kept.push(ObjectRelation::new(&id, &r.source_id, "from"));
        kept.push(ObjectRelation::new(&id, &r.target_id, "to"));
    }
    parts.relations = kept;
    Ok(build_instance(parts)?)
}

/// Collapses reified objects of `relation_type` back into plain relations.
pub fn dereify_relations(instance: &OcedInstance, relation_type: &str) -> Result<OcedInstance, TransformError> {
    let not_reified = |object: &str, reason: &str| TransformError::NotReified {
        object: object.to_string(),
        reason: reason.to_string(),
    };
    let mut dropped: HashSet<&str> = HashSet::new();
    let mut restored = Vec::new();
    for o in instance.objects().iter().filter(|o| o.object_type == relation_type) {
        if o.meta != ObjectMeta::ReifiedRelation {
            return Err(not_reified(&o.id, "not a reified relation"));
        }
        if !o.attributes.is_empty() {
            return Err(not_reified(&o.id, "carries attributes"));
        }
        if let Some((e, _)) = instance.observations_of(&o.id).next() {
            return Err(TransformError::EventAttached {
                object: o.id.clone(),
                event: e.id.clone(),
            });
        }
        if instance.relations_to(&o.id).next().is_some() {
            return Err(not_reified(&o.id, "is the target of a relation"));
        }
        let mut from = Vec::new();
        let mut to = Vec::new();
        for r in instance.relations_from(&o.id) {
            match r.relation_type.as_str() {
                "from" => from.push(&r.target_id),
                "to" => to.push(&r.target_id),
                other => return Err(not_reified(&o.id, &format!("has a {other} relation"))),
            }
        }
        if from.len() != 1 || to.len() != 1 {
            return Err(not_reified(
                &o.id,
                &format!("has {} `from` and {} `to` relations", from.len(), to.len()),
            ));
        }
        dropped.insert(&o.id);
        restored.push(ObjectRelation::new(from[0], to[0], relation_type));
    }
    if dropped.is_empty() {
        return Ok(instance.clone());
    }
    let mut parts = instance.to_parts();
    parts.objects.retain(|o| !dropped.contains(o.id.as_str()));
    parts.relations.retain(|r| !dropped.contains(r.source_id.as_str()));
    parts.relations.extend(restored);
    Ok(build_instance(parts)?)
}

fn materialized_type(object_type: &str, attr: &str) -> String {
    format!("{object_type}+{attr}")
}

/// Moves `attr` of every `object_type` object into its own object, related
/// to the carrier by `CHILD_OF`.
pub fn materialize_attribute(
    instance: &OcedInstance,
    object_type: &str,
    attr: &str,
) -> Result<OcedInstance, TransformError> {
    let owners = instance
        .objects()
        .iter()
        .filter(|o| o.object_type == object_type && o.has_attribute(attr));
    if owners.clone().next().is_none() {
        return Err(TransformError::UnknownAttribute {
            object_type: object_type.to_string(),
            attr: attr.to_string(),
        });
    }
    let mut carriers: BTreeMap<&str, String> = BTreeMap::new();
    for o in owners {
        let id = format!("{MATERIALIZED_PREFIX}{}:{attr}", o.id);
        if instance.contains_id(&id) || carriers.values().any(|v| *v == id) {
            return Err(TransformError::IdCollision(id));
        }
        carriers.insert(&o.id, id);
    }

    let mut parts = instance.to_parts();
    let ty = materialized_type(object_type, attr);
    let mut minted = Vec::new();
    for o in parts.objects.iter_mut() {
        let Some(id) = carriers.get(o.id.as_str()) else {
            continue;
        };
        let mut child = OcedObject::new(id, &ty).with_meta(ObjectMeta::MaterializedAttribute);
        let (moved, kept) = std::mem::take(&mut o.attributes)
            .into_iter()
            .partition(|a| a.name == attr);
        child.attributes = moved;
        o.attributes = kept;
        parts.relations.push(ObjectRelation::new(id, &o.id, CHILD_OF));
        minted.push(child);
    }
    parts.objects.extend(minted);
    Ok(build_instance(parts)?)
}

/// Inverse of [`materialize_attribute`].
pub fn inline_attribute(
    instance: &OcedInstance,
    object_type: &str,
    attr: &str,
) -> Result<OcedInstance, TransformError> {
    let ty = materialized_type(object_type, attr);
    let not_materialized = |object: &str, reason: String| TransformError::NotMaterialized {
        object: object.to_string(),
        reason,
    };
    let mut moves: BTreeMap<String, &OcedObject> = BTreeMap::new();
    for o in instance.objects().iter().filter(|o| o.object_type == ty) {
        if o.meta != ObjectMeta::MaterializedAttribute {
            return Err(not_materialized(&o.id, "not a materialized attribute".into()));
        }
        if let Some((e, _)) = instance.observations_of(&o.id).next() {
            return Err(TransformError::EventAttached {
                object: o.id.clone(),
                event: e.id.clone(),
            });
        }
        if o.attributes.iter().any(|a| a.name != attr) {
            return Err(not_materialized(
                &o.id,
                format!("carries attributes other than {attr:?}"),
            ));
        }
        if instance.relations_to(&o.id).next().is_some() {
            return Err(not_materialized(&o.id, "is the target of a relation".into()));
        }
        let out: Vec<&ObjectRelation> = instance.relations_from(&o.id).collect();
        let [r] = out.as_slice() else {
            return Err(not_materialized(
                &o.id,
                format!("has {} relations, expected one CHILD_OF", out.len()),
            ));
        };
        let carrier = instance.object(&r.target_id);
        if r.relation_type != CHILD_OF || carrier.map(|c| c.object_type.as_str()) != Some(object_type) {
            return Err(not_materialized(
                &o.id,
                format!("is not CHILD_OF a {object_type:?} object"),
            ));
        }
        if carrier.is_some_and(|c| c.has_attribute(attr)) || moves.contains_key(&r.target_id) {
            return Err(not_materialized(
                &o.id,
                format!("carrier {} already has {attr:?}", r.target_id),
            ));
        }
        moves.insert(r.target_id.clone(), o);
    }
    if moves.is_empty() {
        return Ok(instance.clone());
    }
    let dropped: HashSet<&str> = moves.values().map(|o| o.id.as_str()).collect();
    let mut parts = instance.to_parts();
    parts.objects.retain(|o| !dropped.contains(o.id.as_str()));
    parts.relations.retain(|r| !dropped.contains(r.source_id.as_str()));
    for o in parts.objects.iter_mut() {
        if let Some(m) = moves.get(&o.id) {
            o.attributes.extend(m.attributes.iter().cloned());
        }
    }
    Ok(build_instance(parts)?)
}
