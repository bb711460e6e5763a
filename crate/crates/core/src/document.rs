//! JSON interchange format for sequences, concrete or parametrized.
//!
//! A document carries the device (by name or inline), the register, the
//! declared variables, and the ordered builder-call list. Replaying the
//! calls against the resolved device reconstructs the sequence, so a
//! parsed document goes through exactly the same validation as one built
//! through the API.

use crate::device::Device;
use crate::register::Register;
use crate::sequence::{SeqOp, Sequence, SequenceError};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("document is not valid JSON: {0}")]
    Json(String),
    #[error("unsupported schema_version {0}, this build reads version {SCHEMA_VERSION}")]
    UnsupportedSchemaVersion(u32),
    #[error("unknown device `{0}`")]
    UnknownDevice(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// Device reference: the name of a known device or a full inline spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeviceRef {
    Named(String),
    Inline(Box<Device>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDocument {
    pub schema_version: u32,
    pub device: DeviceRef,
    pub register: Register,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub variables: IndexMap<String, usize>,
    pub operations: Vec<SeqOp>,
}

impl SequenceDocument {
    pub fn parse(json: &str) -> Result<SequenceDocument, DocumentError> {
        let doc: SequenceDocument =
            serde_json::from_str(json).map_err(|e| DocumentError::Json(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::UnsupportedSchemaVersion(doc.schema_version));
        }
        Ok(doc)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// Snapshot of a sequence: its blueprint, register, and device. The
    /// built-in reference device is stored by name, anything else inline.
    pub fn from_sequence(seq: &Sequence) -> SequenceDocument {
        let reference = Device::reference();
        let device = if *seq.device() == reference {
            DeviceRef::Named(reference.name)
        } else {
            DeviceRef::Inline(Box::new(seq.device().clone()))
        };
        SequenceDocument {
            schema_version: SCHEMA_VERSION,
            device,
            register: seq.register().clone(),
            variables: seq.variables().clone(),
            operations: seq.recorded_ops().to_vec(),
        }
    }

    /// Rebuild the sequence, resolving named devices through `lookup`
    /// (the built-in reference device is always known).
    pub fn to_sequence(
        &self,
        lookup: impl Fn(&str) -> Option<Device>,
    ) -> Result<Sequence, DocumentError> {
        let device = match &self.device {
            DeviceRef::Inline(dev) => (**dev).clone(),
            DeviceRef::Named(name) => {
                let reference = Device::reference();
                if *name == reference.name {
                    reference
                } else {
                    lookup(name).ok_or_else(|| DocumentError::UnknownDevice(name.clone()))?
                }
            }
        };
        let mut seq = Sequence::new(self.register.clone(), device)?;
        for (name, size) in &self.variables {
            seq.declare_variable(name, *size)?;
        }
        for op in &self.operations {
            seq.apply_op(op.clone())?;
        }
        Ok(seq)
    }
}
