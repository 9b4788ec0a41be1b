//! Small hand-built instances of the purchase-to-pay running example and a
//! few related scenarios. Used by the tests and handy for trying the CLI.
//!
//! The invoice-to-PO relation type is not named in the source scenario;
//! `RELATED_TO` is this crate's choice.

use std::collections::BTreeMap;

use crate::model::{
    build_instance, Event, Form, InstanceParts, ObjectRelation, OcedInstance, OcedObject, CHILD_OF, CREATE, MODIFY,
};
use crate::schema::{OcedSchema, RelationDecl};
use crate::time::OcedTime;
use crate::value::{ScalarType, ScalarValue};

pub const PO: &str = "PO#4829";
pub const INVOICE: &str = "Invoice#8990";
pub const LINE: &str = "InvLine#777524";
pub const RELATED_TO: &str = "RELATED_TO";

pub const PO_TYPE: &str = "purchase order";
pub const INVOICE_TYPE: &str = "invoice";
pub const LINE_TYPE: &str = "invoice line item";

pub fn po_created_at() -> OcedTime {
    OcedTime::ymd_hms_ms(2022, 6, 1, 22, 0, 43, 0).expect("valid")
}

pub fn po_released_at() -> OcedTime {
    OcedTime::ymd_hms_ms(2022, 6, 3, 9, 10, 15, 0).expect("valid")
}

pub fn invoice_received_at() -> OcedTime {
    OcedTime::ymd_hms_ms(2022, 7, 2, 14, 21, 57, 0).expect("valid")
}

fn p2p_events() -> Vec<Event> {
    vec![
        Event::new("e1", "PO created", po_created_at()).observing(PO, CREATE),
        Event::new("e2", "PO released", po_released_at()).observing(PO, MODIFY),
        Event::new("e3", "Invoice receipt", invoice_received_at()).observing(INVOICE, CREATE),
    ]
}

fn p2p_relations(po: &str, invoice: &str, line: &str) -> Vec<ObjectRelation> {
    vec![
        ObjectRelation::new(line, invoice, CHILD_OF),
        ObjectRelation::new(invoice, po, RELATED_TO),
    ]
}

/// Scenarios A to C in the baseline interpretation: every object once, with
/// its latest attribute values.
pub fn p2p() -> OcedInstance {
    build_instance(p2p_parts()).expect("fixture is valid")
}

pub fn p2p_parts() -> InstanceParts {
    InstanceParts {
        objects: vec![
            OcedObject::new(PO, PO_TYPE).with_attr("release status", "X"),
            OcedObject::new(INVOICE, INVOICE_TYPE).with_attr("payment block", "X"),
            OcedObject::new(LINE, LINE_TYPE),
        ],
        events: p2p_events(),
        relations: p2p_relations(PO, INVOICE, LINE),
        schema: None,
        form: Form::Baseline,
    }
}

/// Schema matching [`p2p`].
pub fn p2p_schema() -> OcedSchema {
    OcedSchema::new(
        vec![
            ("PO created".into(), vec![]),
            ("PO released".into(), vec![]),
            ("Invoice receipt".into(), vec![]),
        ],
        vec![
            (PO_TYPE.into(), vec![("release status".into(), ScalarType::String)]),
            (INVOICE_TYPE.into(), vec![("payment block".into(), ScalarType::String)]),
            (LINE_TYPE.into(), vec![]),
        ],
        vec![
            RelationDecl::new(CHILD_OF, LINE_TYPE, INVOICE_TYPE),
            RelationDecl::new(RELATED_TO, INVOICE_TYPE, PO_TYPE),
        ],
    )
    .expect("fixture schema is valid")
}

pub fn p2p_with_schema() -> OcedInstance {
    let mut parts = p2p_parts();
    parts.schema = Some(p2p_schema());
    build_instance(parts).expect("fixture is valid")
}

/// The running example with timestamped object attribute values: the PO's
/// release status goes from "" to "X".
pub fn p2p_timestamped() -> OcedInstance {
    let parts = InstanceParts {
        objects: vec![
            OcedObject::new(PO, PO_TYPE)
                .with_attr_at("release status", "", po_created_at())
                .with_attr_at("release status", "X", po_released_at()),
            OcedObject::new(INVOICE, INVOICE_TYPE).with_attr_at("payment block", "X", invoice_received_at()),
            OcedObject::new(LINE, LINE_TYPE),
        ],
        events: p2p_events(),
        relations: p2p_relations(PO, INVOICE, LINE),
        schema: None,
        form: Form::Timestamped,
    };
    build_instance(parts).expect("fixture is valid")
}

/// Identity attribute per object type for the snapshot fixture.
pub fn snapshot_identity() -> BTreeMap<String, String> {
    [
        (PO_TYPE, "POid"),
        (INVOICE_TYPE, "InvoiceID"),
        (LINE_TYPE, "InvoiceLineID"),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect()
}

/// The running example where every observed state is its own object.
pub fn p2p_snapshots() -> OcedInstance {
    let po1 = format!("{PO}-1");
    let po2 = format!("{PO}-2");
    let inv1 = format!("{INVOICE}-1");
    let line1 = format!("{LINE}-1");
    let parts = InstanceParts {
        objects: vec![
            OcedObject::new(&po1, PO_TYPE)
                .with_attr("POid", PO)
                .with_attr("release status", ""),
            OcedObject::new(&po2, PO_TYPE)
                .with_attr("POid", PO)
                .with_attr("release status", "X"),
            OcedObject::new(&inv1, INVOICE_TYPE)
                .with_attr("InvoiceID", INVOICE)
                .with_attr("payment block", "X"),
            OcedObject::new(&line1, LINE_TYPE).with_attr("InvoiceLineID", LINE),
        ],
        events: vec![
            Event::new("e1", "PO created", po_created_at()).observing(&po1, CREATE),
            Event::new("e2", "PO released", po_released_at()).observing(&po2, MODIFY),
            Event::new("e3", "Invoice receipt", invoice_received_at()).observing(&inv1, CREATE),
        ],
        relations: p2p_relations(&po2, &inv1, &line1),
        schema: None,
        form: Form::Baseline,
    };
    build_instance(parts).expect("fixture is valid")
}

/// An item whose weight is 80 from 2023, 90 from 2024 and 85 from 2025.
pub fn weight_series() -> OcedInstance {
    let year = |y| OcedTime::ymd_hms_ms(y, 1, 1, 0, 0, 0, 0).expect("valid");
    let parts = InstanceParts {
        objects: vec![OcedObject::new("item", "parcel")
            .with_attr_at("weight", 80, year(2023))
            .with_attr_at("weight", 90, year(2024))
            .with_attr_at("weight", 85, year(2025))
            .with_attr_at("weight_unit", "kg", year(2023))],
        form: Form::Timestamped,
        ..Default::default()
    };
    build_instance(parts).expect("fixture is valid")
}

/// A package whose `assigned-to` attribute refers to a delivery tour, backed
/// by an explicit relation of the same type.
pub fn package_assignment(relation_target: &str) -> OcedInstance {
    let parts = InstanceParts {
        objects: vec![
            OcedObject::new("package#5", "package").with_attr("assigned-to", "tour#17"),
            OcedObject::new("tour#17", "delivery tour"),
            OcedObject::new("tour#23", "delivery tour"),
        ],
        relations: vec![ObjectRelation::new("package#5", relation_target, "assigned-to")],
        ..Default::default()
    };
    build_instance(parts).expect("fixture is valid")
}

/// A clearing event observing one payment and two invoices, without any
/// explicit object relations.
pub fn clear_invoice() -> OcedInstance {
    let at = OcedTime::ymd_hms_ms(2023, 3, 1, 12, 0, 0, 0).expect("valid");
    let parts = InstanceParts {
        objects: vec![
            OcedObject::new("P1", "payment"),
            OcedObject::new("I1", "invoice"),
            OcedObject::new("I2", "invoice"),
        ],
        events: vec![Event::new("#e17", "Clear Invoice", at)
            .observing("P1", MODIFY)
            .observing("I1", MODIFY)
            .observing("I2", MODIFY)],
        ..Default::default()
    };
    build_instance(parts).expect("fixture is valid")
}

/// `Order17` with a price, before materialization.
pub fn order_with_price() -> OcedInstance {
    let parts = InstanceParts {
        objects: vec![OcedObject::new("Order17", "Order").with_attr("price", ScalarValue::Real(48.76))],
        events: vec![Event::new(
            "e1",
            "Create Order",
            OcedTime::ymd_hms_ms(2023, 5, 4, 8, 0, 0, 0).expect("valid"),
        )
        .observing("Order17", CREATE)],
        ..Default::default()
    };
    build_instance(parts).expect("fixture is valid")
}
