//! Case-log table: one row per (case, event).
//!
//! `case_log.csv` has the columns `case_id, activity, timestamp, event_id`
//! followed by one column per event attribute name (sorted, blank when the
//! event lacks it). Rows are sorted by case, time and event id, so an event
//! shared by two cases appears twice. `cases.csv` lists every case with its
//! type and event count, including cases with empty traces.

use std::collections::BTreeSet;
use std::path::Path;

use super::{write_atomic, IoError};
use crate::transform::CaseLog;

pub const CASE_LOG_FILE: &str = "case_log.csv";
pub const CASES_FILE: &str = "cases.csv";

fn csv_bytes(rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

/// The case-log table and the companion cases table.
pub fn case_log_tables(log: &CaseLog) -> (Vec<u8>, Vec<u8>) {
    let names: Vec<&str> = log
        .traces
        .values()
        .flatten()
        .flat_map(|t| t.attributes.iter().map(|a| a.name.as_str()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut header: Vec<String> = ["case_id", "activity", "timestamp", "event_id"]
        .map(String::from)
        .to_vec();
    header.extend(names.iter().map(|n| n.to_string()));
    let mut rows = vec![header];
    for (case, trace) in &log.traces {
        for entry in trace {
            let mut row = vec![
                case.clone(),
                entry.activity.clone(),
                entry.time.timestamp_string(),
                entry.event_id.clone(),
            ];
            row.extend(names.iter().map(|n| {
                entry
                    .attributes
                    .iter()
                    .find(|a| a.name == *n)
                    .map(|a| a.value.lexical())
                    .unwrap_or_default()
            }));
            rows.push(row);
        }
    }

    let mut cases = vec![["case_id", "case_type", "event_count"].map(String::from).to_vec()];
    cases.extend(
        log.traces
            .iter()
            .map(|(case, trace)| vec![case.clone(), log.case_type.clone(), trace.len().to_string()]),
    );
    (csv_bytes(rows), csv_bytes(cases))
}

/// Writes both tables into `directory` and returns the case-log bytes.
pub fn write_case_log(log: &CaseLog, directory: &Path) -> Result<Vec<u8>, IoError> {
    std::fs::create_dir_all(directory).map_err(|e| IoError::io(directory, e))?;
    let (table, cases) = case_log_tables(log);
    write_atomic(&directory.join(CASE_LOG_FILE), &table)?;
    write_atomic(&directory.join(CASES_FILE), &cases)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, PO_TYPE};
    use crate::transform::{flatten_case_centric, FlattenConfig};

    #[test]
    fn fixture_case_log() {
        let log = flatten_case_centric(&fixtures::p2p(), &FlattenConfig::new(PO_TYPE, 1)).unwrap();
        let (table, cases) = case_log_tables(&log);
        let text = String::from_utf8(table).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "case_id,activity,timestamp,event_id");
        assert!(lines[1..].iter().all(|l| l.starts_with("PO#4829,")));
        assert_eq!(lines[3], "PO#4829,Invoice receipt,2022-07-02T14:21:57.000Z,e3");
        assert_eq!(
            String::from_utf8(cases).unwrap(),
            "case_id,case_type,event_count\r\nPO#4829,purchase order,3\r\n"
        );
    }
}
