use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use crate::model::{EventAttribute, OcedInstance};
use crate::time::OcedTime;

use super::TransformError;

pub const MAX_HOPS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlattenConfig {
    pub case_object_type: String,
    /// 0 keeps only events observing the case object itself.
    pub relation_hops: usize,
    /// Relation types that may be traversed; `None` allows all.
    pub hop_relation_types: Option<Vec<String>>,
}

impl FlattenConfig {
    pub fn new(case_object_type: impl Into<String>, relation_hops: usize) -> Self {
        FlattenConfig {
            case_object_type: case_object_type.into(),
            relation_hops,
            hop_relation_types: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub event_id: String,
    pub activity: String,
    pub time: OcedTime,
    pub attributes: Vec<EventAttribute>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseLog {
    pub case_type: String,
    pub traces: BTreeMap<String, Vec<TraceEntry>>,
}

impl CaseLog {
    pub fn event_count(&self) -> usize {
        self.traces.values().map(Vec::len).sum()
    }
}

/// Projects the instance onto one case object type. An event joins the
/// trace of every case object it reaches within the hop bound; relations are
/// traversed in both directions.
pub fn flatten_case_centric(instance: &OcedInstance, config: &FlattenConfig) -> Result<CaseLog, TransformError> {
    if config.relation_hops > MAX_HOPS {
        return Err(TransformError::HopLimit(config.relation_hops));
    }
    let cases: Vec<&str> = instance
        .objects()
        .iter()
        .filter(|o| o.object_type == config.case_object_type)
        .map(|o| o.id.as_str())
        .collect();
    if cases.is_empty() {
        return Err(TransformError::UnknownCaseType(config.case_object_type.clone()));
    }

    let allowed = |ty: &str| {
        config
            .hop_relation_types
            .as_ref()
            .map_or(true, |list| list.iter().any(|t| t == ty))
    };
    let mut neighbours: HashMap<&str, Vec<&str>> = HashMap::new();
    for r in instance.relations().iter().filter(|r| allowed(&r.relation_type)) {
        neighbours.entry(&r.source_id).or_default().push(&r.target_id);
        neighbours.entry(&r.target_id).or_default().push(&r.source_id);
    }

    let mut traces = BTreeMap::new();
    for case in cases {
        let mut reached: HashSet<&str> = HashSet::from([case]);
        let mut queue = VecDeque::from([(case, 0usize)]);
        while let Some((node, depth)) = queue.pop_front() {
            if depth == config.relation_hops {
                continue;
            }
            for next in neighbours.get(node).into_iter().flatten() {
                if reached.insert(next) {
                    queue.push_back((next, depth + 1));
                }
            }
        }
        let mut trace: Vec<TraceEntry> = instance
            .events()
            .iter()
            .filter(|e| e.observes.iter().any(|l| reached.contains(l.object_id.as_str())))
            .map(|e| TraceEntry {
                event_id: e.id.clone(),
                activity: e.event_type.clone(),
                time: e.time,
                attributes: e.attributes.clone(),
            })
            .collect();
        trace.sort_by(|a, b| (a.time.millis(), &a.event_id).cmp(&(b.time.millis(), &b.event_id)));
        traces.insert(case.to_string(), trace);
    }
    Ok(CaseLog {
        case_type: config.case_object_type.clone(),
        traces,
    })
}
