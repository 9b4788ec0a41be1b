//! Structured validation findings and the registry of finding codes.

use std::fmt;

use serde::Serialize;

use crate::model::ObjectRelation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The element a finding is about.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Instance,
    Event(String),
    Object(String),
    Relation(ObjectRelation),
    Link { event: String, object: String },
    Attribute(String),
    EventType(String),
    ObjectType(String),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Instance => f.write_str("instance"),
            Subject::Event(id) => write!(f, "event:{id}"),
            Subject::Object(id) => write!(f, "object:{id}"),
            Subject::Relation(r) => write!(f, "relation:{}->{}[{}]", r.source_id, r.target_id, r.relation_type),
            Subject::Link { event, object } => write!(f, "link:{event}->{object}"),
            Subject::Attribute(name) => write!(f, "attribute:{name}"),
            Subject::EventType(name) => write!(f, "event-type:{name}"),
            Subject::ObjectType(name) => write!(f, "object-type:{name}"),
        }
    }
}

impl Serialize for Subject {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Finding {
    pub code: &'static str,
    pub severity: Severity,
    pub subject: Subject,
    pub message: String,
}

impl Finding {
    /// A finding for a registered code; severity comes from the registry.
    pub fn new(code: &'static str, subject: Subject, message: impl Into<String>) -> Self {
        let severity = severity_of(code).unwrap_or_else(|| panic!("unregistered finding code {code}"));
        Finding {
            code,
            severity,
            subject,
            message: message.into(),
        }
    }

    /// `code<TAB>severity<TAB>subject<TAB>message`, tabs and newlines in the
    /// message replaced by spaces.
    pub fn report_line(&self) -> String {
        let clean = |s: String| s.replace(['\t', '\n', '\r'], " ");
        format!(
            "{}\t{}\t{}\t{}",
            self.code,
            self.severity,
            clean(self.subject.to_string()),
            clean(self.message.clone())
        )
    }
}

pub mod codes {
    pub const E_DUPID: &str = "E-DUPID";
    pub const E_DANGLE: &str = "E-DANGLE";
    pub const E_FORM: &str = "E-FORM";
    pub const E_TYPECLASH: &str = "E-TYPECLASH";
    pub const E_DUPATTR: &str = "E-DUPATTR";
    pub const E_DUPREL: &str = "E-DUPREL";
    pub const E_DUPLINK: &str = "E-DUPLINK";
    pub const E_EMPTY: &str = "E-EMPTY";
    pub const E_RESERVED_ID: &str = "E-RESERVED-ID";
    pub const W_PAIR: &str = "W-PAIR";
    pub const W_EMPTYTYPE: &str = "W-EMPTYTYPE";
    pub const W_HIERARCHY_REDUNDANT: &str = "W-HIERARCHY-REDUNDANT";
    pub const W_MULTI_PARENT: &str = "W-MULTI-PARENT";
    pub const I_UNIT_PAIR: &str = "I-UNIT-PAIR";
    pub const E_SCHEMA_ATTR: &str = "E-SCHEMA-ATTR";
    pub const E_SCHEMA_TYPE: &str = "E-SCHEMA-TYPE";
    pub const E_SCHEMA_REL: &str = "E-SCHEMA-REL";
    pub const E_REF_CONFLICT: &str = "E-REF-CONFLICT";
    pub const I_REF_OK: &str = "I-REF-OK";
    pub const W_REF_UNMARKED: &str = "W-REF-UNMARKED";
    pub const E_META_CYCLE: &str = "E-META-CYCLE";
    pub const W_META_QUALIFIER: &str = "W-META-QUALIFIER";
    pub const W_IMPLICIT_REL: &str = "W-IMPLICIT-REL";
    pub const E_LIFECYCLE: &str = "E-LIFECYCLE";
    pub const W_LIFECYCLE_OPEN: &str = "W-LIFECYCLE-OPEN";
    pub const E_SNAPSHOT_IDENTITY: &str = "E-SNAPSHOT-IDENTITY";
    pub const E_SNAPSHOT_CONFLICT: &str = "E-SNAPSHOT-CONFLICT";
    pub const W_SNAPSHOT_UNOBSERVED: &str = "W-SNAPSHOT-UNOBSERVED";
}

use codes::*;

/// Every finding code with its severity and a one-line description.
pub const REGISTRY: &[(&str, Severity, &str)] = &[
    (E_DUPID, Severity::Error, "event or object id used more than once"),
    (
        E_DANGLE,
        Severity::Error,
        "observation or relation refers to an unknown object",
    ),
    (
        E_FORM,
        Severity::Error,
        "attribute timestamp presence does not match the instance form",
    ),
    (
        E_TYPECLASH,
        Severity::Error,
        "attribute name used with more than one value type",
    ),
    (
        E_DUPATTR,
        Severity::Error,
        "attribute repeated within one event or object",
    ),
    (E_DUPREL, Severity::Error, "relation triple recorded twice"),
    (
        E_DUPLINK,
        Severity::Error,
        "event observes the same object with the same qualifier twice",
    ),
    (E_EMPTY, Severity::Error, "empty id, type, name or qualifier"),
    (
        E_RESERVED_ID,
        Severity::Error,
        "object id prefix does not match the object kind",
    ),
    (
        W_PAIR,
        Severity::Warning,
        "object pair related in more than one way (strict reading)",
    ),
    (
        W_EMPTYTYPE,
        Severity::Warning,
        "declared event type without events (strict reading)",
    ),
    (
        W_HIERARCHY_REDUNDANT,
        Severity::Warning,
        "pair expressed as both CHILD_OF and PARENT_OF (strict reading)",
    ),
    (
        W_MULTI_PARENT,
        Severity::Warning,
        "child object with more than one parent (strict reading)",
    ),
    (
        I_UNIT_PAIR,
        Severity::Info,
        "attribute has a matching _unit attribute (strict reading)",
    ),
    (
        E_SCHEMA_ATTR,
        Severity::Error,
        "attribute not declared for its owner's type or of the wrong type",
    ),
    (
        E_SCHEMA_TYPE,
        Severity::Error,
        "event or object type not declared in the schema",
    ),
    (
        E_SCHEMA_REL,
        Severity::Error,
        "relation type not declared between these object types",
    ),
    (
        E_REF_CONFLICT,
        Severity::Error,
        "reference attribute disagrees with explicit relations or does not resolve",
    ),
    (
        I_REF_OK,
        Severity::Info,
        "reference attribute agrees with an explicit relation",
    ),
    (
        W_REF_UNMARKED,
        Severity::Warning,
        "unmarked attribute value equals an object id",
    ),
    (
        E_META_CYCLE,
        Severity::Error,
        "reified relation with missing endpoints or cyclic endpoints",
    ),
    (
        W_META_QUALIFIER,
        Severity::Warning,
        "event creates an object and deletes its materialized attribute (or vice versa)",
    ),
    (
        W_IMPLICIT_REL,
        Severity::Warning,
        "co-observed objects without an explicit relation",
    ),
    (
        E_LIFECYCLE,
        Severity::Error,
        "DELETE before CREATE, repeated CREATE, or relation endpoints never coexist",
    ),
    (
        W_LIFECYCLE_OPEN,
        Severity::Warning,
        "relation endpoint without derivable creation",
    ),
    (
        E_SNAPSHOT_IDENTITY,
        Severity::Error,
        "snapshot lacks its identity attribute",
    ),
    (
        E_SNAPSHOT_CONFLICT,
        Severity::Error,
        "snapshots of one object disagree at the same instant",
    ),
    (
        W_SNAPSHOT_UNOBSERVED,
        Severity::Warning,
        "snapshot never observed; values stamped with the epoch",
    ),
];

pub fn severity_of(code: &str) -> Option<Severity> {
    REGISTRY.iter().find(|(c, _, _)| *c == code).map(|(_, s, _)| *s)
}

/// Sorts findings into report order: code, subject, message.
pub fn sort_findings(findings: &mut [Finding]) {
    findings.sort_by(|a, b| (a.code, &a.subject, &a.message).cmp(&(b.code, &b.subject, &b.message)));
}

pub fn count_at_least(findings: &[Finding], severity: Severity) -> usize {
    findings.iter().filter(|f| f.severity <= severity).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn registry_codes_are_unique_and_prefixed_by_severity() {
        let mut seen = HashSet::new();
        for (code, severity, _) in REGISTRY {
            assert!(seen.insert(*code), "{code} twice");
            let prefix = match severity {
                Severity::Error => "E-",
                Severity::Warning => "W-",
                Severity::Info => "I-",
            };
            assert!(code.starts_with(prefix), "{code}");
        }
    }

    #[test]
    fn report_line_is_tab_separated() {
        let f = Finding::new(E_DANGLE, Subject::Event("e\t1".into()), "bad\nthing");
        assert_eq!(f.report_line(), "E-DANGLE\terror\tevent:e 1\tbad thing");
    }

    #[test]
    fn severity_ordering() {
        let fs = vec![
            Finding::new(I_REF_OK, Subject::Instance, ""),
            Finding::new(W_PAIR, Subject::Instance, ""),
            Finding::new(E_DUPID, Subject::Instance, ""),
        ];
        assert_eq!(count_at_least(&fs, Severity::Error), 1);
        assert_eq!(count_at_least(&fs, Severity::Warning), 2);
        assert_eq!(count_at_least(&fs, Severity::Info), 3);
    }
}
