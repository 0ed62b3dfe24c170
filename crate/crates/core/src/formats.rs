//! JSON file formats: colorings, witnesses, certificates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Coloring, DomainKind, SpencerWitness, UnionWitness};

/// On-disk coloring: `assign[t-1]` colors integer `t` (interval) or
/// bitmask `t` (subsets, bit b is block b).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoringFile {
    pub kind: DomainKind,
    pub k: u32,
    pub colors: u32,
    pub assign: Vec<u32>,
}

impl TryFrom<ColoringFile> for Coloring {
    type Error = Error;

    fn try_from(f: ColoringFile) -> Result<Self> {
        Coloring::new(f.kind, f.k, f.colors, f.assign)
    }
}

impl From<Coloring> for ColoringFile {
    fn from(c: Coloring) -> Self {
        ColoringFile { kind: c.kind(), k: c.k(), colors: c.colors(), assign: c.assign().to_vec() }
    }
}

/// On-disk witness, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WitnessFile {
    Spencer(SpencerWitness),
    Union(UnionWitness),
}

pub fn parse_coloring(text: &str) -> Result<Coloring> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed coloring: {e}")))
}

pub fn parse_witness(text: &str) -> Result<WitnessFile> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed witness: {e}")))
}

pub fn parse_certificate(text: &str) -> Result<crate::search::BadColoringCertificate> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed certificate: {e}")))
}

/// Compact single-line JSON, as written by every command.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}
