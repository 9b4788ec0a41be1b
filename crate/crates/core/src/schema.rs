//! Optional data schema: attributes allowed per event type and object type,
//! and which relation types may connect which object types.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::value::ScalarType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("empty {0} name in schema")]
    EmptyName(&'static str),
    #[error("{kind} type {name:?} declared twice")]
    DuplicateType { kind: &'static str, name: String },
    #[error("attribute {attribute:?} declared twice for type {owner:?}")]
    DuplicateAttribute { owner: String, attribute: String },
    #[error("relation triple ({relation_type}, {source_type}, {target_type}) declared twice")]
    DuplicateRelation {
        relation_type: String,
        source_type: String,
        target_type: String,
    },
}

/// A declared `(relation type, source object type, target object type)` triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationDecl {
    pub relation_type: String,
    pub source_type: String,
    pub target_type: String,
}

impl RelationDecl {
    pub fn new(
        relation_type: impl Into<String>,
        source_type: impl Into<String>,
        target_type: impl Into<String>,
    ) -> Self {
        RelationDecl {
            relation_type: relation_type.into(),
            source_type: source_type.into(),
            target_type: target_type.into(),
        }
    }
}

pub type AttributeDecls = BTreeMap<String, ScalarType>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OcedSchema {
    event_types: BTreeMap<String, AttributeDecls>,
    object_types: BTreeMap<String, AttributeDecls>,
    relation_types: BTreeSet<RelationDecl>,
}

fn collect_types(
    kind: &'static str,
    input: Vec<(String, Vec<(String, ScalarType)>)>,
) -> Result<BTreeMap<String, AttributeDecls>, SchemaError> {
    let mut out = BTreeMap::new();
    for (name, attrs) in input {
        if name.is_empty() {
            return Err(SchemaError::EmptyName(kind));
        }
        let mut decls = AttributeDecls::new();
        for (attr, ty) in attrs {
            if attr.is_empty() {
                return Err(SchemaError::EmptyName("attribute"));
            }
            if decls.insert(attr.clone(), ty).is_some() {
                return Err(SchemaError::DuplicateAttribute {
                    owner: name,
                    attribute: attr,
                });
            }
        }
        if out.insert(name.clone(), decls).is_some() {
            return Err(SchemaError::DuplicateType { kind, name });
        }
    }
    Ok(out)
}

impl OcedSchema {
    pub fn new(
        event_types: Vec<(String, Vec<(String, ScalarType)>)>,
        object_types: Vec<(String, Vec<(String, ScalarType)>)>,
        relation_types: Vec<RelationDecl>,
    ) -> Result<Self, SchemaError> {
        let event_types = collect_types("event", event_types)?;
        let object_types = collect_types("object", object_types)?;
        let mut relations = BTreeSet::new();
        for decl in relation_types {
            if decl.relation_type.is_empty() {
                return Err(SchemaError::EmptyName("relation"));
            }
            if decl.source_type.is_empty() || decl.target_type.is_empty() {
                return Err(SchemaError::EmptyName("object"));
            }
            if relations.contains(&decl) {
                return Err(SchemaError::DuplicateRelation {
                    relation_type: decl.relation_type,
                    source_type: decl.source_type,
                    target_type: decl.target_type,
                });
            }
            relations.insert(decl);
        }
        Ok(OcedSchema {
            event_types,
            object_types,
            relation_types: relations,
        })
    }

    pub fn event_types(&self) -> &BTreeMap<String, AttributeDecls> {
        &self.event_types
    }

    pub fn object_types(&self) -> &BTreeMap<String, AttributeDecls> {
        &self.object_types
    }

    pub fn relation_types(&self) -> &BTreeSet<RelationDecl> {
        &self.relation_types
    }

    pub fn event_type(&self, name: &str) -> Option<&AttributeDecls> {
        self.event_types.get(name)
    }

    pub fn object_type(&self, name: &str) -> Option<&AttributeDecls> {
        self.object_types.get(name)
    }

    pub fn allows_relation(&self, relation_type: &str, source_type: &str, target_type: &str) -> bool {
        self.relation_types
            .iter()
            .any(|d| d.relation_type == relation_type && d.source_type == source_type && d.target_type == target_type)
    }
}
