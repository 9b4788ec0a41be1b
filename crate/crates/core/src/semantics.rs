//! Implicit semantics of qualifiers and hierarchy relations: object and
//! relation lifecycles, co-observation suggestions and snapshot chains.
//!
//! Lifecycle rules, in the order they are applied:
//!
//! * an object is created by the earliest event observing it with `CREATE`;
//! * a child (`CHILD_OF` source, or `PARENT_OF` target) without a `CREATE` of
//!   its own is created implicitly with its parent;
//! * an object is deleted by its first `DELETE` at or after its creation, or
//!   implicitly with its parent if that comes first;
//! * a relation lives while both endpoints live. Hierarchy relations are
//!   attributed to the child's events.
//!
//! `MODIFY` and any other qualifier leave lifecycles untouched.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::finding::{codes::*, sort_findings, Finding, Subject};
use crate::model::{Form, ObjectMeta, ObjectRelation, OcedInstance, CHILD_OF, CREATE, DELETE, PARENT_OF};
use crate::time::OcedTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Explicitness {
    Explicit,
    Implicit,
}

impl Explicitness {
    pub fn as_str(self) -> &'static str {
        match self {
            Explicitness::Explicit => "explicit",
            Explicitness::Implicit => "implicit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LifecyclePoint {
    #[serde(serialize_with = "crate::io::serialize_time")]
    pub time: OcedTime,
    pub event_id: String,
    pub explicitness: Explicitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LifecycleInterval {
    pub created_at: Option<LifecyclePoint>,
    pub deleted_at: Option<LifecyclePoint>,
}

impl LifecycleInterval {
    pub const OPEN: LifecycleInterval = LifecycleInterval {
        created_at: None,
        deleted_at: None,
    };
}

/// Derived intervals plus the inconsistencies found while deriving them.
#[derive(Debug, Clone, PartialEq)]
pub struct Lifecycles<K: Ord> {
    pub intervals: BTreeMap<K, LifecycleInterval>,
    pub findings: Vec<Finding>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LifecycleOptions {
    /// Cascade implicit creation and deletion through whole `CHILD_OF` chains
    /// instead of one level.
    pub transitive: bool,
}

impl Default for LifecycleOptions {
    fn default() -> Self {
        LifecycleOptions { transitive: true }
    }
}

/// Normalized hierarchy edges `(child, parent)`, deduplicated.
pub fn child_parent_edges(instance: &OcedInstance) -> Vec<(&str, &str)> {
    let set: BTreeSet<(&str, &str)> = instance
        .relations()
        .iter()
        .filter_map(|r| match r.relation_type.as_str() {
            CHILD_OF => Some((r.source_id.as_str(), r.target_id.as_str())),
            PARENT_OF => Some((r.target_id.as_str(), r.source_id.as_str())),
            _ => None,
        })
        .collect();
    set.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Index-based engine. Points are positions in the (time, event id) order of
// events, so comparisons are plain integer comparisons.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Create,
    Delete,
}

/// One lifecycle-relevant observation: `object` observed with `kind` by the
/// event at position `pos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub pos: u32,
    pub object: usize,
    pub kind: StepKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IndexedInterval {
    /// `(position, explicit)`
    pub created: Option<(u32, bool)>,
    pub deleted: Option<(u32, bool)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anomaly {
    DeleteBeforeCreate { object: usize, pos: u32 },
    RepeatedCreate { object: usize, pos: u32 },
}

/// Derives object intervals. `steps` must be sorted by position, and within
/// one position creations come before deletions. `parents[c]` lists the
/// parents of object `c`.
pub fn derive_indexed(
    object_count: usize,
    steps: &[Step],
    parents: &[Vec<usize>],
    options: LifecycleOptions,
) -> (Vec<IndexedInterval>, Vec<Anomaly>) {
    let mut out = vec![IndexedInterval::default(); object_count];
    let mut own_create = vec![false; object_count];
    for s in steps {
        if s.kind == StepKind::Create {
            own_create[s.object] = true;
            if out[s.object].created.is_none() {
                out[s.object].created = Some((s.pos, true));
            }
        }
    }

    let usable = |p: Option<(u32, bool)>| p.filter(|&(_, explicit)| explicit || options.transitive);

    loop {
        let mut changed = false;
        for child in 0..object_count {
            if own_create[child] {
                continue;
            }
            for &parent in &parents[child] {
                if let Some((pos, _)) = usable(out[parent].created) {
                    if out[child].created.map_or(true, |(c, _)| pos < c) {
                        out[child].created = Some((pos, false));
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut anomalies = Vec::new();
    let mut alive_by_own = vec![false; object_count];
    for s in steps {
        let iv = &mut out[s.object];
        let created = iv.created.map(|(p, _)| p);
        match s.kind {
            StepKind::Create => {
                if alive_by_own[s.object] {
                    anomalies.push(Anomaly::RepeatedCreate {
                        object: s.object,
                        pos: s.pos,
                    });
                }
                alive_by_own[s.object] = true;
            }
            StepKind::Delete => {
                alive_by_own[s.object] = false;
                if created.is_some_and(|c| s.pos < c) {
                    anomalies.push(Anomaly::DeleteBeforeCreate {
                        object: s.object,
                        pos: s.pos,
                    });
                } else if iv.deleted.is_none() {
                    iv.deleted = Some((s.pos, true));
                }
            }
        }
    }

    // Recomputed from scratch each round: a parent's point can still move
    // below the child's creation, which must withdraw it as a candidate.
    let own_delete: Vec<Option<(u32, bool)>> = out.iter().map(|iv| iv.deleted).collect();
    for _ in 0..=object_count {
        let mut changed = false;
        for child in 0..object_count {
            let created = out[child].created.map(|(c, _)| c);
            let mut best = own_delete[child];
            for &parent in &parents[child] {
                let Some((pos, _)) = usable(out[parent].deleted) else {
                    continue;
                };
                if created.is_some_and(|c| pos < c) {
                    continue;
                }
                if best.map_or(true, |(d, _)| pos < d) {
                    best = Some((pos, false));
                }
            }
            if best != out[child].deleted {
                out[child].deleted = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    (out, anomalies)
}

// ---------------------------------------------------------------------------

struct Indexed<'a> {
    ids: Vec<&'a str>,
    index: HashMap<&'a str, usize>,
    /// events in (time, id) order
    events: Vec<(&'a str, OcedTime)>,
}

impl<'a> Indexed<'a> {
    fn point(&self, (pos, explicit): (u32, bool)) -> LifecyclePoint {
        let (id, time) = self.events[pos as usize];
        LifecyclePoint {
            time,
            event_id: id.to_string(),
            explicitness: if explicit {
                Explicitness::Explicit
            } else {
                Explicitness::Implicit
            },
        }
    }
}

fn run_engine(instance: &OcedInstance, options: LifecycleOptions) -> (Indexed<'_>, Vec<IndexedInterval>, Vec<Anomaly>) {
    let ids: Vec<&str> = instance.objects().iter().map(|o| o.id.as_str()).collect();
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();

    let mut order: Vec<&crate::model::Event> = instance.events().iter().collect();
    order.sort_by(|a, b| (a.time.millis(), &a.id).cmp(&(b.time.millis(), &b.id)));

    let mut steps = Vec::new();
    let mut events = Vec::with_capacity(order.len());
    for (pos, e) in order.iter().enumerate() {
        events.push((e.id.as_str(), e.time));
        let mut here: Vec<Step> = e
            .observes
            .iter()
            .filter_map(|l| {
                let kind = match l.qualifier.as_str() {
                    CREATE => StepKind::Create,
                    DELETE => StepKind::Delete,
                    _ => return None,
                };
                let object = *index.get(l.object_id.as_str())?;
                Some(Step {
                    pos: pos as u32,
                    object,
                    kind,
                })
            })
            .collect();
        here.sort_by_key(|s| (s.kind == StepKind::Delete, s.object));
        steps.extend(here);
    }

    let mut parents = vec![Vec::new(); ids.len()];
    for (child, parent) in child_parent_edges(instance) {
        if let (Some(&c), Some(&p)) = (index.get(child), index.get(parent)) {
            parents[c].push(p);
        }
    }

    let (intervals, anomalies) = derive_indexed(ids.len(), &steps, &parents, options);
    (Indexed { ids, index, events }, intervals, anomalies)
}

fn object_intervals(idx: &Indexed<'_>, intervals: &[IndexedInterval], anomalies: &[Anomaly]) -> Lifecycles<String> {
    let intervals_out = idx
        .ids
        .iter()
        .zip(intervals)
        .map(|(id, iv)| {
            (
                id.to_string(),
                LifecycleInterval {
                    created_at: iv.created.map(|p| idx.point(p)),
                    deleted_at: iv.deleted.map(|p| idx.point(p)),
                },
            )
        })
        .collect();
    let mut findings: Vec<Finding> = anomalies
        .iter()
        .map(|a| match *a {
            Anomaly::DeleteBeforeCreate { object, pos } => Finding::new(
                E_LIFECYCLE,
                Subject::Object(idx.ids[object].to_string()),
                format!("DELETE by {} precedes the creation", idx.events[pos as usize].0),
            ),
            Anomaly::RepeatedCreate { object, pos } => Finding::new(
                E_LIFECYCLE,
                Subject::Object(idx.ids[object].to_string()),
                format!("CREATE by {} without an intervening DELETE", idx.events[pos as usize].0),
            ),
        })
        .collect();
    sort_findings(&mut findings);
    Lifecycles {
        intervals: intervals_out,
        findings,
    }
}

pub fn derive_object_lifecycles(instance: &OcedInstance) -> Lifecycles<String> {
    derive_object_lifecycles_with(instance, LifecycleOptions::default())
}

pub fn derive_object_lifecycles_with(instance: &OcedInstance, options: LifecycleOptions) -> Lifecycles<String> {
    let (idx, intervals, anomalies) = run_engine(instance, options);
    object_intervals(&idx, &intervals, &anomalies)
}

pub fn derive_relation_lifecycles(instance: &OcedInstance) -> Lifecycles<ObjectRelation> {
    derive_relation_lifecycles_with(instance, LifecycleOptions::default())
}

pub fn derive_relation_lifecycles_with(
    instance: &OcedInstance,
    options: LifecycleOptions,
) -> Lifecycles<ObjectRelation> {
    let (idx, objs, _) = run_engine(instance, options);
    let mut intervals = BTreeMap::new();
    let mut findings = Vec::new();

    let mut derive = |relation: ObjectRelation, own: Option<IndexedInterval>| {
        let (Some(&s), Some(&t)) = (
            idx.index.get(relation.source_id.as_str()),
            idx.index.get(relation.target_id.as_str()),
        ) else {
            return;
        };
        // hierarchy relations follow the child, so ties go to the child's event
        let (first, second) = match relation.relation_type.as_str() {
            CHILD_OF => (s, t),
            PARENT_OF => (t, s),
            _ => (s, t),
        };
        let (a, b) = (objs[first], objs[second]);
        let hierarchy = relation.relation_type == CHILD_OF || relation.relation_type == PARENT_OF;

        let mut created = match (a.created, b.created) {
            (Some(x), Some(y)) => {
                let later = if hierarchy {
                    let tx = idx.events[x.0 as usize].1.millis();
                    let ty = idx.events[y.0 as usize].1.millis();
                    if ty > tx {
                        y
                    } else {
                        x
                    }
                } else {
                    x.max(y)
                };
                Some((later.0, false))
            }
            _ => None,
        };
        let mut deleted = match (a.deleted, b.deleted) {
            (Some(x), Some(y)) => Some((x.0.min(y.0), false)),
            (Some(x), None) | (None, Some(x)) => Some((x.0, false)),
            (None, None) => None,
        };
        if let Some(own) = own {
            if let Some(c) = own.created.filter(|c| c.1) {
                created = Some(c);
            }
            if let Some(d) = own.deleted.filter(|d| d.1) {
                deleted = Some(d);
            }
        }

        if instance.form() == Form::Baseline {
            for (end, ix) in [(&relation.source_id, s), (&relation.target_id, t)] {
                if objs[ix].created.is_none() {
                    findings.push(Finding::new(
                        W_LIFECYCLE_OPEN,
                        Subject::Relation(relation.clone()),
                        format!("endpoint {end} has no derivable creation"),
                    ));
                }
            }
        }
        if let (Some(c), Some(d)) = (created, deleted) {
            if d.0 < c.0 {
                findings.push(Finding::new(
                    E_LIFECYCLE,
                    Subject::Relation(relation.clone()),
                    format!(
                        "endpoints never coexist: created by {}, an endpoint deleted by {}",
                        idx.events[c.0 as usize].0, idx.events[d.0 as usize].0
                    ),
                ));
                deleted = None;
            }
        }
        intervals.insert(
            relation,
            LifecycleInterval {
                created_at: created.map(|p| idx.point(p)),
                deleted_at: deleted.map(|p| idx.point(p)),
            },
        );
    };

    for r in instance.relations() {
        if r.relation_type == "from" || r.relation_type == "to" {
            let reified = instance.object(&r.source_id).map(|o| o.meta) == Some(ObjectMeta::ReifiedRelation);
            if reified {
                continue;
            }
        }
        derive(r.clone(), None);
    }

    // reified relations: the relation object may carry its own CREATE/DELETE
    for o in instance
        .objects()
        .iter()
        .filter(|o| o.meta == ObjectMeta::ReifiedRelation)
    {
        let ends = |ty: &str| -> Vec<&str> {
            instance
                .relations_from(&o.id)
                .filter(|r| r.relation_type == ty)
                .map(|r| r.target_id.as_str())
                .collect()
        };
        let (from, to) = (ends("from"), ends("to"));
        if from.len() == 1 && to.len() == 1 {
            let own = objs[idx.index[o.id.as_str()]];
            derive(ObjectRelation::new(from[0], to[0], &o.object_type), Some(own));
        }
    }

    sort_findings(&mut findings);
    findings.dedup();
    Lifecycles { intervals, findings }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Confidence {
    CoObserved,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuggestedRelation {
    pub witness_event_id: String,
    pub source_id: String,
    pub target_id: String,
    pub confidence: Confidence,
}

/// Suggests a relation for every pair of objects observed together by an
/// event and not related in either direction. Advisory only.
pub fn infer_co_observation_relations(instance: &OcedInstance) -> Vec<SuggestedRelation> {
    let related: HashSet<(&str, &str)> = instance
        .relations()
        .iter()
        .map(|r| {
            let (a, b) = (r.source_id.as_str(), r.target_id.as_str());
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    let mut out = Vec::new();
    for e in instance.events() {
        let objects: BTreeSet<&str> = e.observes.iter().map(|l| l.object_id.as_str()).collect();
        let objects: Vec<&str> = objects.into_iter().collect();
        for (i, a) in objects.iter().enumerate() {
            for b in &objects[i + 1..] {
                if !related.contains(&(*a, *b)) {
                    out.push(SuggestedRelation {
                        witness_event_id: e.id.clone(),
                        source_id: a.to_string(),
                        target_id: b.to_string(),
                        confidence: Confidence::CoObserved,
                    });
                }
            }
        }
    }
    out.sort();
    out
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnapshotError {
    #[error("no {object_type:?} object carries the identity attribute {attr:?}")]
    UnknownIdentityAttr { object_type: String, attr: String },
}

/// Checks that snapshots sharing an identity value form a consistent chain.
pub fn validate_snapshot_chain(
    instance: &OcedInstance,
    identity: &BTreeMap<String, String>,
) -> Result<Vec<Finding>, SnapshotError> {
    for (ty, attr) in identity {
        let mut of_type = instance.objects().iter().filter(|o| &o.object_type == ty).peekable();
        if of_type.peek().is_none() {
            continue;
        }
        let declared = instance
            .schema()
            .and_then(|s| s.object_type(ty))
            .is_some_and(|d| d.contains_key(attr));
        if !declared && !of_type.any(|o| o.has_attribute(attr)) {
            return Err(SnapshotError::UnknownIdentityAttr {
                object_type: ty.clone(),
                attr: attr.clone(),
            });
        }
    }

    let mut out = Vec::new();
    let mut groups: BTreeMap<(&str, String), Vec<&crate::model::OcedObject>> = BTreeMap::new();
    for o in instance.objects() {
        let Some(attr) = identity.get(&o.object_type) else {
            continue;
        };
        match o.current_value(attr) {
            Some(v) => groups.entry((&o.object_type, v.lexical())).or_default().push(o),
            None => out.push(Finding::new(
                E_SNAPSHOT_IDENTITY,
                Subject::Object(o.id.clone()),
                format!("snapshot lacks identity attribute {attr:?}"),
            )),
        }
    }

    for ((ty, _), members) in &groups {
        let attr = &identity[*ty];
        let instants: Vec<BTreeSet<i64>> = members
            .iter()
            .map(|o| instance.observations_of(&o.id).map(|(e, _)| e.time.millis()).collect())
            .collect();
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                let Some(&at) = instants[i].intersection(&instants[j]).next() else {
                    continue;
                };
                let (a, b) = (members[i], members[j]);
                for v in &a.attributes {
                    if &v.name == attr {
                        continue;
                    }
                    if let Some(other) = b.current_value(&v.name) {
                        if Some(other) != a.current_value(&v.name) {
                            out.push(Finding::new(
                                E_SNAPSHOT_CONFLICT,
                                Subject::Object(b.id.clone()),
                                format!(
                                    "{:?} differs from snapshot {} observed at the same instant {}",
                                    v.name,
                                    a.id,
                                    OcedTime::truncated(at, crate::time::Resolution::Millisecond)
                                        .map(|t| t.timestamp_string())
                                        .unwrap_or_default()
                                ),
                            ));
                        }
                    }
                }
            }
        }
    }

    sort_findings(&mut out);
    out.dedup();
    Ok(out)
}
