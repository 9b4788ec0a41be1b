use std::collections::HashSet;

use crate::model::{
    build_instance, Form, ObjectAttributeValue, ObjectMeta, OcedInstance, OcedObject, QualifiedLink, PROXY_PREFIX,
};
use crate::value::ScalarValue;

use super::TransformError;

/// Adds a proxy object `proxy:<type>:<n>` observed by each listed event with
/// `qualifier`. For exactly two events the proxy records `start`, `end` and
/// `duration_ms`.
pub fn group_events_via_proxy(
    instance: &OcedInstance,
    event_ids: &[&str],
    proxy_type: &str,
    qualifier: &str,
) -> Result<OcedInstance, TransformError> {
    if event_ids.is_empty() {
        return Err(TransformError::EmptyGroup);
    }
    let mut seen = HashSet::new();
    for id in event_ids {
        if instance.event(id).is_none() {
            return Err(TransformError::UnknownEvent(id.to_string()));
        }
        if !seen.insert(*id) {
            return Err(TransformError::DuplicateEvent(id.to_string()));
        }
    }
    let id = (1..)
        .map(|n| format!("{PROXY_PREFIX}{proxy_type}:{n}"))
        .find(|id| !instance.contains_id(id))
        .expect("some index is free");

    let mut proxy = OcedObject::new(&id, proxy_type).with_meta(ObjectMeta::Proxy);
    if let [a, b] = event_ids {
        let (ta, tb) = (instance.event(a).unwrap().time, instance.event(b).unwrap().time);
        let (start, end) = if tb.millis() < ta.millis() { (tb, ta) } else { (ta, tb) };
        let at = (instance.form() == Form::Timestamped).then_some(start);
        proxy.attributes = [
            ("start", ScalarValue::Timestamp(start)),
            ("end", ScalarValue::Timestamp(end)),
            ("duration_ms", ScalarValue::Integer(end.millis() - start.millis())),
        ]
        .into_iter()
        .map(|(name, value)| ObjectAttributeValue {
            name: name.to_string(),
            value,
            at,
        })
        .collect();
    }

    let mut parts = instance.to_parts();
    for e in parts.events.iter_mut().filter(|e| seen.contains(e.id.as_str())) {
        e.observes.push(QualifiedLink::new(&id, qualifier));
    }
    parts.objects.push(proxy);
    Ok(build_instance(parts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Event, InstanceParts, OcedObject};
    use crate::time::OcedTime;

    fn activity(n: usize) -> OcedInstance {
        let names = ["scheduled", "started", "completed", "archived"];
        let parts = InstanceParts {
            objects: vec![OcedObject::new("job", "job")],
            events: (0..n)
                .map(|i| {
                    Event::new(
                        names[i],
                        names[i],
                        OcedTime::ymd_hms_ms(2023, 1, 1, 8, 0, 10 * i as u32, 0).unwrap(),
                    )
                    .observing("job", "MODIFY")
                })
                .collect(),
            ..Default::default()
        };
        build_instance(parts).unwrap()
    }

    #[test]
    fn start_end_pair_records_duration() {
        let i = activity(3);
        let out = group_events_via_proxy(&i, &["completed", "started"], "activity-span", "span").unwrap();
        let proxy = out.object("proxy:activity-span:1").unwrap();
        assert_eq!(proxy.current_value("duration_ms"), Some(&ScalarValue::Integer(10_000)));
        assert_eq!(out.objects().len(), 2);
        assert_eq!(out.observations_of("proxy:activity-span:1").count(), 2);
    }

    #[test]
    fn singleton_and_four_event_groups() {
        let i = activity(4);
        let one = group_events_via_proxy(&i, &["started"], "span", "span").unwrap();
        assert!(one.object("proxy:span:1").unwrap().attributes.is_empty());
        let all =
            group_events_via_proxy(&one, &["scheduled", "started", "completed", "archived"], "span", "span").unwrap();
        assert_eq!(all.observations_of("proxy:span:2").count(), 4);
        assert!(matches!(
            group_events_via_proxy(&i, &["nope"], "span", "span"),
            Err(TransformError::UnknownEvent(_))
        ));
        assert_eq!(
            group_events_via_proxy(&i, &[], "span", "span"),
            Err(TransformError::EmptyGroup)
        );
    }
}
