//! Standard-output reports. Text reports are tab-separated lines under a
//! versioned header; `--format doc` wraps the same content into the
//! `derived` section of a canonical document.

use std::collections::BTreeMap;
use std::io::{IsTerminal, Write};

use clap::ValueEnum;
use oced_core::io::{write_canonical_with_derived, FORMAT_VERSION};
use oced_core::model::ObjectRelation;
use oced_core::semantics::{LifecycleInterval, LifecyclePoint, Lifecycles};
use oced_core::{Finding, OcedInstance, Severity};
use serde_json::{json, Map, Value};

pub const REPORT_KIND: &str = "oced-report";

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Doc,
}

pub struct Report {
    command: &'static str,
    format: ReportFormat,
    lines: Vec<String>,
    derived: Map<String, Value>,
}

fn color_enabled() -> bool {
    std::env::var("OCED_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal()
}

fn paint(severity: Severity) -> String {
    if !color_enabled() {
        return severity.to_string();
    }
    let code = match severity {
        Severity::Error => "31",
        Severity::Warning => "33",
        Severity::Info => "36",
    };
    format!("\x1b[{code}m{severity}\x1b[0m")
}

fn point_cells(p: &Option<LifecyclePoint>) -> [String; 3] {
    match p {
        Some(p) => [
            p.time.timestamp_string(),
            p.event_id.clone(),
            p.explicitness.as_str().to_string(),
        ],
        None => ["-".into(), "-".into(), "-".into()],
    }
}

fn relation_subject(r: &ObjectRelation) -> String {
    format!("{}->{}[{}]", r.source_id, r.target_id, r.relation_type)
}

impl Report {
    pub fn new(command: &'static str, format: ReportFormat) -> Self {
        Report {
            command,
            format,
            lines: vec![format!("# {REPORT_KIND}/{FORMAT_VERSION} {command}")],
            derived: Map::new(),
        }
    }

    pub fn row<'a>(&mut self, cells: impl IntoIterator<Item = &'a str>) {
        let cells: Vec<&str> = cells.into_iter().collect();
        self.lines.push(cells.join("\t"));
        if let Some((key, rest)) = cells.split_first() {
            let value = match rest {
                [one] => json!(one),
                _ => json!(rest),
            };
            self.derived.insert(key.to_string(), value);
        }
    }

    pub fn findings(&mut self, findings: &[Finding]) {
        for f in findings {
            let mut line = f.report_line();
            if self.format == ReportFormat::Text {
                line = line.replacen(&format!("\t{}\t", f.severity), &format!("\t{}\t", paint(f.severity)), 1);
            }
            self.lines.push(line);
        }
        self.derived.insert("findings".into(), json!(findings));
    }

    pub fn lifecycles(&mut self, objects: &Lifecycles<String>, relations: &Lifecycles<ObjectRelation>) {
        let header = "subject\tcreated_at\tcreated_by\tcreated\tdeleted_at\tdeleted_by\tdeleted";
        let table = |rows: Vec<(String, &LifecycleInterval)>| -> Vec<String> {
            rows.into_iter()
                .map(|(subject, iv)| {
                    let mut cells = vec![subject];
                    cells.extend(point_cells(&iv.created_at));
                    cells.extend(point_cells(&iv.deleted_at));
                    cells.join("\t")
                })
                .collect()
        };
        let mut rel_rows: Vec<(String, &LifecycleInterval)> = relations
            .intervals
            .iter()
            .map(|(r, iv)| (relation_subject(r), iv))
            .collect();
        rel_rows.sort_by(|a, b| a.0.cmp(&b.0));

        self.lines.push("## objects".into());
        self.lines.push(header.into());
        self.lines
            .extend(table(objects.intervals.iter().map(|(k, v)| (k.clone(), v)).collect()));
        self.lines.push("## relations".into());
        self.lines.push(header.into());
        self.lines.extend(table(rel_rows.clone()));

        self.derived.insert("objectLifecycles".into(), json!(objects.intervals));
        let rels: BTreeMap<String, &LifecycleInterval> = rel_rows.into_iter().collect();
        self.derived.insert("relationLifecycles".into(), json!(rels));
    }

    pub fn stats(&mut self, instance: &OcedInstance) {
        let mut event_types: BTreeMap<&str, usize> = BTreeMap::new();
        let mut object_types: BTreeMap<&str, usize> = BTreeMap::new();
        let mut relation_types: BTreeMap<&str, usize> = BTreeMap::new();
        let mut qualifiers: BTreeMap<&str, usize> = BTreeMap::new();
        for e in instance.events() {
            *event_types.entry(&e.event_type).or_default() += 1;
            for l in &e.observes {
                *qualifiers.entry(&l.qualifier).or_default() += 1;
            }
        }
        for o in instance.objects() {
            *object_types.entry(&o.object_type).or_default() += 1;
        }
        for r in instance.relations() {
            *relation_types.entry(&r.relation_type).or_default() += 1;
        }
        let first = instance.events().iter().map(|e| e.time).min();
        let last = instance.events().iter().map(|e| e.time).max();
        let stamp = |t: Option<oced_core::OcedTime>| t.map_or("-".to_string(), |t| t.timestamp_string());

        self.row(["form", instance.form().as_str()]);
        self.row(["events", &instance.events().len().to_string()]);
        self.row(["objects", &instance.objects().len().to_string()]);
        self.row(["relations", &instance.relations().len().to_string()]);
        self.row(["links", &qualifiers.values().sum::<usize>().to_string()]);
        self.row(["time_span", &stamp(first), &stamp(last)]);
        for (label, key, counts) in [
            ("event_type", "eventTypes", &event_types),
            ("object_type", "objectTypes", &object_types),
            ("relation_type", "relationTypes", &relation_types),
            ("qualifier", "qualifiers", &qualifiers),
        ] {
            for (name, n) in counts.iter() {
                self.lines.push(format!("{label}\t{name}\t{n}"));
            }
            self.derived.insert(key.into(), json!(counts));
        }
    }

    pub fn emit(self, instance: &OcedInstance) {
        match self.format {
            ReportFormat::Text => {
                let mut text = self.lines.join("\n");
                text.push('\n');
                print_raw(text.as_bytes());
            }
            ReportFormat::Doc => {
                let mut derived = Map::new();
                derived.insert(
                    "report".into(),
                    json!({"kind": REPORT_KIND, "version": FORMAT_VERSION, "command": self.command}),
                );
                derived.extend(self.derived);
                print_raw(&write_canonical_with_derived(instance, Value::Object(derived)));
            }
        }
    }
}

pub fn print_raw(bytes: &[u8]) {
    let mut out = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = out.write_all(bytes).and_then(|_| out.flush());
}
