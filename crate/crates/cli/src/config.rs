//! Run configuration: schedule document plus truncation, condition,
//! solver, and geometry sections. Every field has a default, so a config
//! may specify only the schedule. The effective (default-filled,
//! flag-overridden) config is what gets hashed into reports.

use moran_core::schedule::ScheduleDoc;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

fn d_k_max() -> usize {
    256
}
fn d_l_max() -> usize {
    256
}
fn d_eta_grid() -> Vec<f64> {
    vec![0.5, 0.2, 0.1, 0.05, 0.02, 0.01]
}
fn d_tail_fraction() -> f64 {
    0.5
}
fn d_tau_conv() -> f64 {
    0.02
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanSection {
    #[serde(default = "d_k_max")]
    pub k_max: usize,
    #[serde(default = "d_l_max")]
    pub l_max: usize,
    /// Deeper horizon for the first-row trends, when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row1_l_max: Option<usize>,
    #[serde(default = "d_eta_grid")]
    pub eta_grid: Vec<f64>,
    #[serde(default = "d_tail_fraction")]
    pub tail_fraction: f64,
    #[serde(default = "d_tau_conv")]
    pub tau_conv: f64,
}

impl Default for PlanSection {
    fn default() -> Self {
        PlanSection {
            k_max: d_k_max(),
            l_max: d_l_max(),
            row1_l_max: None,
            eta_grid: d_eta_grid(),
            tail_fraction: d_tail_fraction(),
            tau_conv: d_tau_conv(),
        }
    }
}

fn d_cond_k() -> usize {
    4096
}
fn d_cond_l() -> usize {
    64
}
fn d_eps_ratio() -> f64 {
    0.05
}
fn d_eps_product() -> f64 {
    1e-3
}
fn d_liminf_floor() -> f64 {
    0.01
}
fn d_b_cap() -> usize {
    64
}
fn d_near_one() -> f64 {
    0.9
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionsSection {
    #[serde(default = "d_cond_k")]
    pub k: usize,
    #[serde(default = "d_cond_l")]
    pub l: usize,
    #[serde(default = "d_eps_ratio")]
    pub eps_ratio: f64,
    #[serde(default = "d_eps_product")]
    pub eps_product: f64,
    #[serde(default = "d_liminf_floor")]
    pub liminf_floor: f64,
    #[serde(default = "d_b_cap")]
    pub b_cap: usize,
    #[serde(default = "d_near_one")]
    pub near_one: f64,
}

impl Default for ConditionsSection {
    fn default() -> Self {
        ConditionsSection {
            k: d_cond_k(),
            l: d_cond_l(),
            eps_ratio: d_eps_ratio(),
            eps_product: d_eps_product(),
            liminf_floor: d_liminf_floor(),
            b_cap: d_b_cap(),
            near_one: d_near_one(),
        }
    }
}

fn d_tau_s() -> f64 {
    1e-12
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverSection {
    #[serde(default = "d_tau_s")]
    pub tau_s: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection { tau_s: d_tau_s() }
    }
}

fn d_policy() -> String {
    "endpoints-aligned".into()
}
fn d_node_cap() -> usize {
    4_000_000
}
fn d_box_scales() -> Vec<f64> {
    (2..=10).map(|m| 2f64.powi(-m)).collect()
}
fn d_bnc_deltas() -> Vec<f64> {
    // log grid, two points per decade; deep thresholds are per-fixture choices
    (1..=4)
        .flat_map(|e| [10f64.powi(-e), 3.0 * 10f64.powi(-e)])
        .filter(|&d| d <= 0.1)
        .collect()
}
fn d_spectrum_etas() -> Vec<f64> {
    vec![0.1, 0.05, 0.02]
}
fn d_spectrum_scales() -> Vec<f64> {
    // geometric from 10^-1.5 down to 10^-6
    let mut v = Vec::new();
    let mut x = 10f64.powf(-1.5);
    while x >= 1e-6 {
        v.push(x);
        x *= 10f64.powf(-0.35);
    }
    v
}
fn d_probe_cap() -> usize {
    128
}
fn d_render_depth() -> usize {
    6
}
fn d_bnc_radius_scale() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometrySection {
    #[serde(default = "d_policy")]
    pub policy: String,
    #[serde(default = "d_node_cap")]
    pub node_cap: usize,
    #[serde(default = "d_box_scales")]
    pub box_scales: Vec<f64>,
    #[serde(default = "d_bnc_deltas")]
    pub bnc_deltas: Vec<f64>,
    #[serde(default = "d_spectrum_etas")]
    pub spectrum_etas: Vec<f64>,
    #[serde(default = "d_spectrum_scales")]
    pub spectrum_scales: Vec<f64>,
    #[serde(default = "d_probe_cap")]
    pub probe_cap: usize,
    #[serde(default = "d_render_depth")]
    pub render_depth: usize,
    /// Ball radius for neighbour counts, as a fraction of the cut threshold.
    #[serde(default = "d_bnc_radius_scale")]
    pub bnc_radius_scale: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection {
            policy: d_policy(),
            node_cap: d_node_cap(),
            box_scales: d_box_scales(),
            bnc_deltas: d_bnc_deltas(),
            spectrum_etas: d_spectrum_etas(),
            spectrum_scales: d_spectrum_scales(),
            probe_cap: d_probe_cap(),
            render_depth: d_render_depth(),
            bnc_radius_scale: d_bnc_radius_scale(),
        }
    }
}

/// One run's full configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub schedule: ScheduleDoc,
    #[serde(default)]
    pub plan: PlanSection,
    #[serde(default)]
    pub conditions: ConditionsSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub geometry: GeometrySection,
}

impl RunConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Horizon the derived sequences must cover for every consumer.
    pub fn horizon_needed(&self) -> usize {
        let plan = self.plan.k_max + self.plan.l_max + 2;
        let row1 = self.plan.row1_l_max.unwrap_or(0) + 1;
        let cond = self.conditions.k + self.conditions.l.max(self.conditions.b_cap) + 2;
        plan.max(row1).max(cond)
    }

    /// SHA-256 of the canonical (effective) config serialization.
    pub fn sha256(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn plan(&self) -> moran_core::Plan {
        let mut p = moran_core::Plan::new(self.plan.k_max, self.plan.l_max);
        p.row1_l_max = self.plan.row1_l_max;
        p.eta_grid = self.plan.eta_grid.clone();
        p.tail_fraction = self.plan.tail_fraction;
        p.tau_conv = self.plan.tau_conv;
        p
    }

    pub fn condition_config(&self) -> moran_core::ConditionConfig {
        let mut c = moran_core::ConditionConfig::new(self.conditions.k, self.conditions.l);
        c.eps_ratio = self.conditions.eps_ratio;
        c.eps_product = self.conditions.eps_product;
        c.liminf_floor = self.conditions.liminf_floor;
        c.b_cap = self.conditions.b_cap;
        c.near_one = self.conditions.near_one;
        c
    }
}
