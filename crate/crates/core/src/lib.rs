//! Object-centric event data (OCED) core model.
//!
//! * [`model`]: events, objects, relations and qualified observations, built
//!   once and immutable afterwards.
//! * [`validate`]: invariant, schema and consistency checks returning
//!   [`Finding`](finding::Finding) lists.
//! * [`semantics`]: object and relation lifecycles derived from
//!   `CREATE`/`DELETE` qualifiers and `CHILD_OF`/`PARENT_OF` hierarchies.
//! * [`transform`]: reification, attribute materialization, snapshot and
//!   timestamped conversions, proxy grouping, case-centric flattening.
//! * [`io`]: canonical document, CSV table bundle, interchange document and
//!   case-log table formats.

pub mod finding;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod schema;
pub mod semantics;
pub mod time;
pub mod transform;
pub mod validate;
pub mod value;

pub use finding::{Finding, Severity, Subject};
pub use model::{
    build_instance, build_lenient, canonical_equal, BuildError, Event, EventAttribute, Form, InstanceParts,
    ObjectAttributeValue, ObjectMeta, ObjectRelation, OcedInstance, OcedObject, QualifiedLink, QueryError,
};
pub use schema::{OcedSchema, RelationDecl};
pub use time::{OcedTime, Resolution};
pub use value::{ScalarType, ScalarValue};
