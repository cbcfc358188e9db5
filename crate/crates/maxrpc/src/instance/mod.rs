//! Instance ingestion and generation: the native text format, an equivalent
//! JSON form, an XCSP 2.1 subset reader, and seeded generators for the
//! random, geometric, and queens benchmark families.

mod generate;
mod native;
mod xcsp;

pub use generate::{gen_geometric, gen_model_b, gen_queens, GenError, GeometricParams, ModelBParams};
pub use native::{parse_native, serialize_native, ParseError};
pub use xcsp::{parse_xcsp, XcspError};

use serde::{Deserialize, Serialize};

use crate::network::{BuildError, ConstraintNetwork, Relation};

/// One binary constraint at the document level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub x: usize,
    pub y: usize,
    pub relation: Relation,
}

/// A problem instance as ingested or generated: the unit the native format
/// round-trips losslessly. Domains are strictly increasing value lists;
/// provenance records where the instance came from (format, seed, generator
/// parameters) as ordered key-value pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub name: String,
    pub domains: Vec<Vec<i32>>,
    pub constraints: Vec<ConstraintSpec>,
    pub provenance: Vec<(String, String)>,
}

impl InstanceDoc {
    pub fn new(name: impl Into<String>) -> Self {
        InstanceDoc {
            name: name.into(),
            domains: Vec::new(),
            constraints: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.provenance
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Compiles the document into a validated network.
    pub fn to_network(&self) -> Result<ConstraintNetwork, BuildError> {
        ConstraintNetwork::new(
            self.name.clone(),
            self.domains.clone(),
            self.constraints
                .iter()
                .map(|c| (c.x, c.y, c.relation.clone()))
                .collect(),
        )
    }

    /// Structured-object serialization, accepted anywhere the native text
    /// format is.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance docs always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
