//! The 22-slot feature vector of a candidate paper.
//!
//! Sixteen slots are computable at publication time `T`; the remaining six
//! (the early-citer aggregates, the early citation count and the two
//! citation-context features) read the early window `[T, T+δ]`.

mod extract;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Year;
use crate::error::{Error, Result};
use crate::persist;

pub use extract::{h_index, rank_normalize, recency, FeatureExtractor, FeatureOptions};

pub const N_SLOTS: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureSlot {
    Ecpc,
    Eccc,
    Ecca,
    Ecc,
    Pcn,
    Pctr,
    Pcd,
    Achi,
    Acar,
    AcpiMax,
    AcpiTotal,
    Acp,
    Acs,
    Aca,
    Acv,
    Vcvr,
    Vcvc,
    VcpiMax,
    VcpiTotal,
    Pr,
    Ccac,
    Ccaw,
}

impl FeatureSlot {
    pub const ALL: [FeatureSlot; N_SLOTS] = [
        FeatureSlot::Ecpc,
        FeatureSlot::Eccc,
        FeatureSlot::Ecca,
        FeatureSlot::Ecc,
        FeatureSlot::Pcn,
        FeatureSlot::Pctr,
        FeatureSlot::Pcd,
        FeatureSlot::Achi,
        FeatureSlot::Acar,
        FeatureSlot::AcpiMax,
        FeatureSlot::AcpiTotal,
        FeatureSlot::Acp,
        FeatureSlot::Acs,
        FeatureSlot::Aca,
        FeatureSlot::Acv,
        FeatureSlot::Vcvr,
        FeatureSlot::Vcvc,
        FeatureSlot::VcpiMax,
        FeatureSlot::VcpiTotal,
        FeatureSlot::Pr,
        FeatureSlot::Ccac,
        FeatureSlot::Ccaw,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureSlot::Ecpc => "ECPC",
            FeatureSlot::Eccc => "ECCC",
            FeatureSlot::Ecca => "ECCA",
            FeatureSlot::Ecc => "ECC",
            FeatureSlot::Pcn => "PCN",
            FeatureSlot::Pctr => "PCTR",
            FeatureSlot::Pcd => "PCD",
            FeatureSlot::Achi => "ACHI",
            FeatureSlot::Acar => "ACAR",
            FeatureSlot::AcpiMax => "ACPI_max",
            FeatureSlot::AcpiTotal => "ACPI_total",
            FeatureSlot::Acp => "ACP",
            FeatureSlot::Acs => "ACS",
            FeatureSlot::Aca => "ACA",
            FeatureSlot::Acv => "ACV",
            FeatureSlot::Vcvr => "VCVR",
            FeatureSlot::Vcvc => "VCVC",
            FeatureSlot::VcpiMax => "VCPI_max",
            FeatureSlot::VcpiTotal => "VCPI_total",
            FeatureSlot::Pr => "PR",
            FeatureSlot::Ccac => "CCAC",
            FeatureSlot::Ccaw => "CCAW",
        }
    }

    pub fn from_name(name: &str) -> Result<FeatureSlot> {
        FeatureSlot::ALL
            .into_iter()
            .find(|s| s.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown feature `{name}`")))
    }

    /// True when the slot only reads events up to the publication year.
    pub fn at_publication(self) -> bool {
        !matches!(
            self,
            FeatureSlot::Ecpc
                | FeatureSlot::Eccc
                | FeatureSlot::Ecca
                | FeatureSlot::Ecc
                | FeatureSlot::Ccac
                | FeatureSlot::Ccaw
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub paper_id: String,
    pub year: Year,
    pub delta: i32,
    pub reference_year: Year,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: [f64; N_SLOTS],
    pub meta: FeatureMeta,
}

impl FeatureVector {
    pub fn get(&self, slot: FeatureSlot) -> f64 {
        self.values[slot.index()]
    }

    pub fn select(&self, slots: &[FeatureSlot]) -> Vec<f64> {
        slots.iter().map(|&s| self.get(s)).collect()
    }

    /// Bitwise comparison, so `NaN`s and signed zeros count.
    pub fn bits_eq(&self, other: &FeatureVector) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

const MAGIC: &[u8; 8] = b"ECFEATS\0";
const VERSION: u32 = 1;

/// Feature vectors of many papers, in extraction order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub rows: Vec<FeatureVector>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, paper_id: &str) -> Option<&FeatureVector> {
        self.rows.iter().find(|r| r.meta.paper_id == paper_id)
    }

    /// Row-major values restricted to `slots`.
    pub fn select(&self, slots: &[FeatureSlot]) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.select(slots)).collect()
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let to_err = |e: csv::Error| Error::Format(e.to_string());
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["paper_id", "year", "delta", "reference_year"];
        header.extend(FeatureSlot::ALL.iter().map(|s| s.name()));
        out.write_record(&header).map_err(to_err)?;
        for r in &self.rows {
            let mut rec = vec![
                r.meta.paper_id.clone(),
                r.meta.year.to_string(),
                r.meta.delta.to_string(),
                r.meta.reference_year.to_string(),
            ];
            if r.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Format(format!("non-finite feature for {}", r.meta.paper_id)));
            }
            rec.extend(r.values.iter().map(|v| v.to_string()));
            out.write_record(&rec).map_err(to_err)?;
        }
        out.flush().map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        persist::save(path, MAGIC, VERSION, self)
    }

    pub fn load(path: &Path) -> Result<FeatureMatrix> {
        persist::load(path, MAGIC, VERSION)
    }
}
