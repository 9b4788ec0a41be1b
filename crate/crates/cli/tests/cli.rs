use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use oced_core::io::{read_canonical, read_table_bundle, write_canonical};
use oced_core::model::{CREATE, DELETE};
use oced_core::{
    build_instance, canonical_equal, fixtures, Event, InstanceParts, ObjectRelation, OcedObject, OcedTime,
};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn oced(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oced"))
        .args(args)
        .env("OCED_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> (i32, String) {
    let out = oced(args);
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn lines(stdout: &str) -> Vec<&str> {
    stdout.lines().collect()
}

fn write_doc(dir: &Path, name: &str, instance: &oced_core::OcedInstance) -> String {
    let path = dir.join(name);
    std::fs::write(&path, write_canonical(instance)).unwrap();
    path.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_clean_fixture() {
    let (code, out) = run(&["validate", s(&data("p2p.json"))]);
    assert_eq!(code, 0);
    assert_eq!(lines(&out), vec!["# oced-report/0.1 validate"]);
}

#[test]
fn validate_pair_reading_follows_policy() {
    let dir = tempfile::tempdir().unwrap();
    let mut parts = fixtures::p2p_parts();
    parts
        .relations
        .push(ObjectRelation::new(fixtures::INVOICE, fixtures::PO, "BILLED_FOR"));
    let doc = write_doc(dir.path(), "pair.json", &build_instance(parts).unwrap());

    let (code, out) = run(&["validate", &doc]);
    assert_eq!(code, 0);
    assert!(!out.contains("W-PAIR"));

    let (code, out) = run(&["validate", "--strict", &doc]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.starts_with("W-PAIR\twarning\t")), "{out}");

    let (code, _) = run(&["validate", "--strict", "--exit-policy", "warningsFail", &doc]);
    assert_eq!(code, 1);
}

#[test]
fn validate_reports_dangling_links_as_findings() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("p2p.json"))
        .unwrap()
        .replace("\"object\": \"Invoice#8990\"", "\"object\": \"X\"");
    let doc = dir.path().join("bad.json");
    std::fs::write(&doc, text).unwrap();

    let (code, out) = run(&["validate", s(&doc)]);
    assert_eq!(code, 1);
    assert!(out.contains("E-DANGLE"), "{out}");
    let (code, _) = run(&["validate", "--exit-policy", "neverFail", s(&doc)]);
    assert_eq!(code, 0);
    // other commands refuse the document outright
    let out = oced(&["stats", s(&doc)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn validate_with_markers() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write_doc(dir.path(), "pkg.json", &fixtures::package_assignment("tour#23"));
    let markers = dir.path().join("markers.json");
    std::fs::write(
        &markers,
        r#"[{"objectType": "package", "attrName": "assigned-to", "relationType": "assigned-to", "targetObjectType": "delivery tour"}]"#,
    )
    .unwrap();
    let (code, out) = run(&["validate", "--markers", s(&markers), &doc]);
    assert_eq!(code, 1);
    assert!(out.contains("E-REF-CONFLICT\terror\tobject:package#5"), "{out}");

    let (code, out) = run(&["validate", &doc]);
    assert_eq!(code, 0);
    assert!(out.contains("W-REF-UNMARKED"));
}

#[test]
fn validate_suggest() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write_doc(dir.path(), "clear.json", &fixtures::clear_invoice());
    let (_, out) = run(&["validate", &doc]);
    assert!(!out.contains("W-IMPLICIT-REL"));
    let (code, out) = run(&["validate", "--suggest", &doc]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("W-IMPLICIT-REL").count(), 3, "{out}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["validate", "/no/such/file.json"]).0, 2);
    assert_eq!(run(&["stats", "/no/such/file.json"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.xml");
    assert_eq!(
        run(&["convert", s(&data("p2p.json")), "-o", s(&out), "--to", "xml"]).0,
        2
    );
    assert_eq!(run(&["convert", s(&data("p2p.json")), "-o", s(&out)]).0, 2);
    assert!(!out.exists());
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"hello\": 1}").unwrap();
    assert_eq!(run(&["stats", s(&junk)]).0, 2);
}

#[test]
fn convert_round_trips_through_every_format() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("bundle");
    let ocel = dir.path().join("p2p.ocel.json");
    let back = dir.path().join("back.json");
    assert_eq!(run(&["convert", s(&data("p2p.json")), "-o", s(&bundle)]).0, 0);
    assert!(canonical_equal(&read_table_bundle(&bundle).unwrap(), &fixtures::p2p()));
    assert_eq!(run(&["convert", s(&bundle), "-o", s(&ocel)]).0, 0);
    assert!(std::fs::read_to_string(&ocel).unwrap().contains("ocel-interchange/0.1"));
    assert_eq!(run(&["convert", s(&ocel), "-o", s(&back)]).0, 0);
    assert_eq!(std::fs::read(&back).unwrap(), std::fs::read(data("p2p.json")).unwrap());
}

#[test]
fn convert_snapshots_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let mapping = dir.path().join("identity.json");
    std::fs::write(
        &mapping,
        r#"{"purchase order": "POid", "invoice": "InvoiceID", "invoice line item": "InvoiceLineID"}"#,
    )
    .unwrap();
    let merged = dir.path().join("merged.json");
    let (code, _) = run(&[
        "convert",
        s(&data("p2p_snapshots.json")),
        "-o",
        s(&merged),
        "--to-timestamped",
        s(&mapping),
    ]);
    assert_eq!(code, 0);
    let got = read_canonical(&std::fs::read(&merged).unwrap()).unwrap();
    assert!(canonical_equal(&got, &fixtures::p2p_timestamped()));
    let po = got.object(fixtures::PO).unwrap();
    let stamps: Vec<(String, String)> = po
        .values_of("release status")
        .map(|v| (v.value.lexical(), v.at.unwrap().timestamp_string()))
        .collect();
    assert_eq!(
        stamps,
        vec![
            ("".to_string(), "2022-06-01T22:00:43.000Z".to_string()),
            ("X".to_string(), "2022-06-03T09:10:15.000Z".to_string())
        ]
    );

    let split = dir.path().join("split.json");
    let (code, _) = run(&["convert", s(&merged), "-o", s(&split), "--to-snapshots", s(&mapping)]);
    assert_eq!(code, 0);
    assert_eq!(
        std::fs::read(&split).unwrap(),
        std::fs::read(data("p2p_snapshots.json")).unwrap()
    );

    // wrong form is a precondition failure, not a usage error
    let out = oced(&[
        "convert",
        s(&data("p2p.json")),
        "-o",
        s(&split),
        "--to-snapshots",
        s(&mapping),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("timestamped form"));
}

#[test]
fn flatten_reports_traces() {
    let p2p = data("p2p.json");
    let (code, out) = run(&["flatten", s(&p2p), "--case-type", "purchase order", "--hops", "1"]);
    assert_eq!(code, 0);
    assert!(
        out.contains("traces\t1\n") && out.contains("events\t3\n") && out.contains("duplication\t1.000\n"),
        "{out}"
    );
    let (_, out) = run(&["flatten", s(&p2p), "--case-type", "purchase order", "--hops", "0"]);
    assert!(out.contains("traces\t1\n") && out.contains("events\t2\n"), "{out}");
    assert!(!out.contains(",e3"));

    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&[
        "flatten",
        s(&p2p),
        "--case-type",
        "purchase order",
        "--hops",
        "1",
        "-o",
        s(dir.path()),
    ]);
    assert_eq!(code, 0);
    let table = std::fs::read_to_string(dir.path().join("case_log.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(table.lines().skip(1).all(|l| l.starts_with("PO#4829,")));

    assert_eq!(run(&["flatten", s(&p2p), "--case-type", "no such"]).0, 1);
    assert_eq!(
        run(&["flatten", s(&p2p), "--case-type", "purchase order", "--hops", "99"]).0,
        2
    );
}

#[test]
fn lifecycle_tables() {
    let (code, out) = run(&["lifecycle", s(&data("p2p.json"))]);
    assert_eq!(code, 0);
    assert!(
        out.contains("InvLine#777524\t2022-07-02T14:21:57.000Z\te3\timplicit\t-\t-\t-\n"),
        "{out}"
    );
    assert!(out.contains("Invoice#8990->PO#4829[RELATED_TO]\t2022-07-02T14:21:57.000Z\te3\timplicit"));

    let dir = tempfile::tempdir().unwrap();
    let empty = write_doc(
        dir.path(),
        "empty.json",
        &build_instance(InstanceParts::default()).unwrap(),
    );
    let (code, out) = run(&["lifecycle", &empty]);
    assert_eq!(code, 0);
    assert_eq!(
        out.lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("subject"))
            .count(),
        0
    );

    let t = |h| OcedTime::ymd_hms_ms(2024, 1, 1, h, 0, 0, 0).unwrap();
    let parts = InstanceParts {
        objects: vec![OcedObject::new("o", "thing")],
        events: vec![
            Event::new("a", "drop", t(1)).observing("o", DELETE),
            Event::new("b", "make", t(2)).observing("o", CREATE),
        ],
        ..Default::default()
    };
    let bad = write_doc(dir.path(), "bad.json", &build_instance(parts).unwrap());
    let (code, out) = run(&["lifecycle", &bad]);
    assert_eq!(code, 1);
    assert!(out.contains("E-LIFECYCLE\terror\tobject:o"), "{out}");
    assert_eq!(run(&["lifecycle", "--exit-policy", "neverFail", &bad]).0, 0);
}

#[test]
fn stats_counts() {
    let (code, out) = run(&["stats", s(&data("p2p.json"))]);
    assert_eq!(code, 0);
    for line in [
        "form\tbaseline",
        "events\t3",
        "event_type\tPO created\t1",
        "event_type\tPO released\t1",
        "event_type\tInvoice receipt\t1",
        "object_type\tpurchase order\t1",
        "qualifier\tCREATE\t2",
        "qualifier\tMODIFY\t1",
    ] {
        assert!(out.lines().any(|l| l == line), "{line} missing from {out}");
    }
    assert_eq!(out.lines().filter(|l| l.starts_with("object_type\t")).count(), 3);

    let dir = tempfile::tempdir().unwrap();
    let empty = write_doc(
        dir.path(),
        "empty.json",
        &build_instance(InstanceParts::default()).unwrap(),
    );
    let (_, out) = run(&["stats", &empty]);
    for line in ["events\t0", "objects\t0", "relations\t0", "links\t0", "time_span\t-\t-"] {
        assert!(out.lines().any(|l| l == line), "{line} missing from {out}");
    }

    let (_, out) = run(&["stats", s(&data("p2p_timestamped.json"))]);
    assert!(out.lines().any(|l| l == "form\ttimestamped"));
}

#[test]
fn doc_format_wraps_the_instance() {
    let (code, out) = run(&["lifecycle", "--format", "doc", s(&data("p2p.json"))]);
    assert_eq!(code, 0);
    let instance = read_canonical(out.as_bytes()).unwrap();
    assert!(canonical_equal(&instance, &fixtures::p2p()));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["derived"]["report"]["command"], "lifecycle");
    assert_eq!(
        v["derived"]["objectLifecycles"]["InvLine#777524"]["createdAt"]["explicitness"],
        "implicit"
    );
}

#[test]
fn output_is_stable_and_uncolored() {
    let input = data("p2p_snapshots.json");
    let args = ["validate", "--strict", "--suggest", s(&input)];
    let a = oced(&args);
    let b = oced(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.contains(&0x1b));
}

#[test]
fn inputs_are_left_alone() {
    let before = std::fs::read(data("p2p.json")).unwrap();
    for cmd in ["validate", "lifecycle", "stats"] {
        oced(&[cmd, s(&data("p2p.json"))]);
    }
    assert_eq!(std::fs::read(data("p2p.json")).unwrap(), before);
}
