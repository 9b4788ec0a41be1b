//! Conversions between modeling styles. Every transform is a pure function
//! from one instance to a new one.

mod flatten;
mod proxy;
mod reify;
mod snapshot;

use thiserror::Error;

use crate::finding::Finding;
use crate::model::{BuildError, Form};
use crate::semantics::SnapshotError;

pub use flatten::{flatten_case_centric, CaseLog, FlattenConfig, TraceEntry, MAX_HOPS};
pub use proxy::group_events_via_proxy;
pub use reify::{dereify_relations, inline_attribute, materialize_attribute, reify_relations};
pub use snapshot::{baseline_to_snapshots, snapshots_to_timestamped};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("generated id {0:?} is already taken")]
    IdCollision(String),
    #[error("relation type {0:?} is reserved for reified endpoints")]
    ReservedType(String),
    #[error("object {object} cannot be collapsed back into a relation: {reason}")]
    NotReified { object: String, reason: String },
    #[error("object {object} cannot be inlined into its carrier: {reason}")]
    NotMaterialized { object: String, reason: String },
    #[error("object {object} is observed by event {event}; the inversion would lose that observation")]
    EventAttached { object: String, event: String },
    #[error("no {object_type:?} object has attribute {attr:?}")]
    UnknownAttribute { object_type: String, attr: String },
    #[error("instance must be in {expected} form")]
    WrongForm { expected: Form },
    #[error("snapshot chain is inconsistent: {}", .0.iter().map(|f| f.message.clone()).collect::<Vec<_>>().join("; "))]
    SnapshotChain(Vec<Finding>),
    #[error("snapshots of {object} disagree on {attr:?} at {at}")]
    SnapshotConflict { object: String, attr: String, at: String },
    #[error("no identity attribute given for object type {0:?}")]
    MissingIdentityAttr(String),
    #[error("object {object} already has an attribute named {attr:?}")]
    IdentityClash { object: String, attr: String },
    #[error("unknown event {0:?}")]
    UnknownEvent(String),
    #[error("event {0:?} listed twice")]
    DuplicateEvent(String),
    #[error("a proxy needs at least one event")]
    EmptyGroup,
    #[error("no object has type {0:?}")]
    UnknownCaseType(String),
    #[error("relation hops {0} exceed the limit of {MAX_HOPS}")]
    HopLimit(usize),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    Build(#[from] BuildError),
}
