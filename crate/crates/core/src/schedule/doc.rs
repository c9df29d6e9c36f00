//! JSON schedule documents.
//!
//! ```json
//! {
//!   "d": 1,
//!   "kind": "explicit" | "homogeneous" | "family",
//!   "prefix": [[0.5, 0.25], [0.5, 0.5]],
//!   "tail_period": [[0.5, 0.25]],
//!   "family": {"name": "power-pair", "params": {"alpha": 1.0, "beta": 2.0}},
//!   "hints": {"c_star": 0.333, "n_sup": 2, "note": "..."}
//! }
//! ```
//!
//! Explicit prefixes list one ratio vector per level; `tail_period` repeats
//! cyclically after the prefix. Family parameters are family-specific.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::schedule::{Family, Hints, RatioSchedule};

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
pub struct HintsDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sup: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

/// Serializable schedule definition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub d: u32,
    pub kind: String,
    #[serde(default)]
    pub prefix: Vec<Vec<f64>>,
    #[serde(default)]
    pub tail_period: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hints: Option<HintsDoc>,
}

impl ScheduleDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("schedule document: {e}")))
    }

    /// Builds the schedule. `cover` sizes defaulted unbounded sequences
    /// (only the block family uses it).
    pub fn build<F: Real>(&self, cover: u64) -> Result<RatioSchedule<F>> {
        let hints = match &self.hints {
            Some(h) => Hints {
                c_star: h.c_star,
                n_sup: h.n_sup,
                note: h.note.clone(),
            },
            None => Hints::default(),
        };
        match self.kind.as_str() {
            "explicit" | "homogeneous" => RatioSchedule::explicit_with_hints(
                self.d,
                self.prefix.clone(),
                self.tail_period.clone(),
                hints,
                self.kind == "homogeneous",
            ),
            "family" => {
                let doc = self
                    .family
                    .as_ref()
                    .ok_or_else(|| Error::Config("kind \"family\" needs a family object".into()))?;
                let family = parse_family(doc, cover)?;
                RatioSchedule::family_with_hints(self.d, family, hints)
            }
            other => Err(Error::Config(format!("unknown schedule kind {other:?}"))),
        }
    }
}

fn num_param(doc: &FamilyDoc, key: &str) -> Result<f64> {
    doc.params
        .get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::Config(format!("family {:?}: missing numeric param {key:?}", doc.name)))
}

fn parse_family(doc: &FamilyDoc, cover: u64) -> Result<Family> {
    match doc.name.as_str() {
        "cantor" | "middle-cantor" => {
            let gap = doc
                .params
                .get("gap")
                .and_then(|v| v.as_f64())
                .unwrap_or(1.0 / 3.0);
            Ok(Family::middle_cantor(gap))
        }
        "double-exp" => Ok(Family::DoubleExp),
        "harmonic-branch" => Ok(Family::HarmonicBranch),
        "triangular" => Ok(Family::Triangular),
        "phase-blocks" => match doc.params.get("breaks") {
            Some(v) => {
                let breaks: Vec<u64> = v
                    .as_array()
                    .ok_or_else(|| Error::Config("phase-blocks: breaks must be an array".into()))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .ok_or_else(|| Error::Config("phase-blocks: breaks must be integers".into()))
                    })
                    .collect::<Result<_>>()?;
                Ok(Family::phase_blocks(breaks))
            }
            None => Ok(Family::phase_blocks_default(cover)),
        },
        "power-pair" => Ok(Family::power_pair(
            num_param(doc, "alpha")?,
            num_param(doc, "beta")?,
        )),
        other => Err(Error::Config(format!("unknown family {other:?}"))),
    }
}
