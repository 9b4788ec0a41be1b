//! The purchase-to-pay fixture against its checked-in canonical document.

use oced_core::canonical_equal;
use oced_core::fixtures;
use oced_core::io::{export_ocel, import_ocel, read_canonical, read_table_bundle, write_canonical, write_table_bundle};

const GOLDEN: &[u8] = include_bytes!("data/p2p.json");

#[test]
fn writer_matches_golden_bytes() {
    let got = write_canonical(&fixtures::p2p());
    assert_eq!(String::from_utf8(got).unwrap(), std::str::from_utf8(GOLDEN).unwrap());
}

#[test]
fn golden_reads_back_as_fixture() {
    let read = read_canonical(GOLDEN).unwrap();
    assert!(canonical_equal(&read, &fixtures::p2p()));
    assert_eq!(write_canonical(&read), GOLDEN);
}

#[test]
fn golden_survives_every_format() {
    let read = read_canonical(GOLDEN).unwrap();

    let dir = tempfile::tempdir().unwrap();
    write_table_bundle(&read, dir.path()).unwrap();
    assert_eq!(write_canonical(&read_table_bundle(dir.path()).unwrap()), GOLDEN);

    let ocel = import_ocel(&export_ocel(&read).unwrap()).unwrap();
    assert_eq!(write_canonical(&ocel), GOLDEN);
}
