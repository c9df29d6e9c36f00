//! Canonical example fixtures, one per structured family worth studying.

use moran_core::schedule::ScheduleDoc;
use serde_json::json;

use crate::config::{ConditionsSection, GeometrySection, PlanSection, RunConfig};

/// `(name, description)` pairs for the `examples` listing.
pub fn fixture_names() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "cantor3",
            "homogeneous middle-thirds schedule: every dimension equals log 2 / log 3",
        ),
        (
            "exa-prime",
            "three-phase block family: all four dimensions differ",
        ),
        (
            "exa",
            "power-pair family (alpha, beta): formula values near alpha/beta, geometry saturates at 1",
        ),
        (
            "rutar",
            "triangular-index pair family: full-interval realization, bounded neighbours, unbounded block lengths",
        ),
        (
            "bbc-holds-club-fails",
            "double-exponential homogeneous family: bounded branching, thin/fat ratio does not vanish",
        ),
        (
            "club-holds-bbc-fails",
            "harmonic-branch family: vanishing thin/fat ratio, branching grows without bound",
        ),
    ]
}

fn schedule_doc(value: serde_json::Value) -> ScheduleDoc {
    serde_json::from_value(value).expect("fixture schedule document")
}

/// Builds the named fixture, or `None` for an unknown name.
pub fn fixture(name: &str) -> Option<RunConfig> {
    let cfg = match name {
        "cantor3" => RunConfig {
            schedule: schedule_doc(json!({
                "d": 1,
                "kind": "family",
                "family": {"name": "cantor", "params": {"gap": 1.0 / 3.0}},
                "hints": {"c_star": 1.0 / 3.0, "n_sup": 2, "note": "middle-thirds"}
            })),
            plan: PlanSection {
                k_max: 64,
                l_max: 256,
                ..Default::default()
            },
            conditions: ConditionsSection::default(),
            solver: Default::default(),
            geometry: GeometrySection {
                box_scales: (1..=8).map(|m| 3f64.powi(-m)).collect(),
                ..Default::default()
            },
        },
        "exa-prime" => RunConfig {
            schedule: schedule_doc(json!({
                "d": 1,
                "kind": "family",
                "family": {"name": "phase-blocks"},
                "hints": {"c_star": 0.125, "n_sup": 2}
            })),
            plan: PlanSection {
                k_max: 6000,
                l_max: 2000,
                row1_l_max: Some(1_995_839),
                tail_fraction: 0.2,
                ..Default::default()
            },
            conditions: ConditionsSection {
                k: 16384,
                ..Default::default()
            },
            solver: Default::default(),
            geometry: GeometrySection {
                render_depth: 8,
                ..Default::default()
            },
        },
        "exa" => RunConfig {
            schedule: schedule_doc(json!({
                "d": 1,
                "kind": "family",
                "family": {"name": "power-pair", "params": {"alpha": 1.0, "beta": 2.0}}
            })),
            plan: PlanSection {
                k_max: 2000,
                l_max: 2000,
                ..Default::default()
            },
            conditions: ConditionsSection {
                k: 20000,
                l: 256,
                ..Default::default()
            },
            solver: Default::default(),
            geometry: GeometrySection {
                box_scales: (2..=14).map(|m| 2f64.powi(-m)).collect(),
                // the leftmost accumulation chain makes refinement linear in
                // 1/r; keep the finest base scale at 1e-5
                spectrum_scales: {
                    let mut v = Vec::new();
                    let mut x = 10f64.powf(-1.5);
                    while x >= 1e-5 {
                        v.push(x);
                        x *= 10f64.powf(-0.35);
                    }
                    v
                },
                probe_cap: 48,
                ..Default::default()
            },
        },
        "rutar" => RunConfig {
            schedule: schedule_doc(json!({
                "d": 1,
                "kind": "family",
                "family": {"name": "triangular"},
                "hints": {"n_sup": 2}
            })),
            plan: PlanSection {
                k_max: 512,
                l_max: 512,
                ..Default::default()
            },
            conditions: ConditionsSection::default(),
            solver: Default::default(),
            geometry: GeometrySection {
                box_scales: (2..=11).map(|m| 2f64.powi(-m)).collect(),
                bnc_deltas: (1..=6)
                    .flat_map(|e| [10f64.powi(-e), 3.0 * 10f64.powi(-e)])
                    .filter(|&d| d <= 0.1)
                    .collect(),
                // the classical bounded-neighbour constant for this
                // construction is stated at a quarter of the cut threshold
                bnc_radius_scale: 0.25,
                render_depth: 8,
                ..Default::default()
            },
        },
        "bbc-holds-club-fails" => RunConfig {
            schedule: schedule_doc(json!({
                "d": 1,
                "kind": "family",
                "family": {"name": "double-exp"},
                "hints": {"n_sup": 2}
            })),
            plan: PlanSection {
                k_max: 24,
                l_max: 48,
                ..Default::default()
            },
            conditions: ConditionsSection {
                k: 700,
                l: 16,
                ..Default::default()
            },
            solver: Default::default(),
            geometry: GeometrySection {
                box_scales: vec![0.2, 0.1, 0.05, 0.02],
                bnc_deltas: vec![0.1, 0.03, 0.01],
                spectrum_scales: vec![0.05, 0.02, 0.01, 0.005],
                render_depth: 4,
                ..Default::default()
            },
        },
        "club-holds-bbc-fails" => RunConfig {
            schedule: schedule_doc(json!({
                "d": 1,
                "kind": "family",
                "family": {"name": "harmonic-branch"}
            })),
            plan: PlanSection {
                k_max: 128,
                l_max: 128,
                ..Default::default()
            },
            conditions: ConditionsSection {
                k: 2048,
                l: 32,
                ..Default::default()
            },
            solver: Default::default(),
            geometry: GeometrySection {
                box_scales: vec![0.2, 0.1, 0.05, 0.02, 0.01],
                bnc_deltas: vec![0.1, 0.03, 0.01, 0.003],
                spectrum_scales: vec![0.03, 0.01, 0.003, 0.001],
                render_depth: 5,
                ..Default::default()
            },
        },
        _ => return None,
    };
    Some(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_build() {
        for (name, _) in fixture_names() {
            let cfg = fixture(name).unwrap();
            let horizon = cfg.horizon_needed();
            let schedule = cfg.schedule.build::<f64>(horizon as u64).unwrap();
            // fast sanity: level 1 exists and is admissible at the declared d
            let lv = schedule.level(1).unwrap();
            assert!(lv.branching() >= 2, "{name}");
        }
    }

    #[test]
    fn unknown_fixture_is_none() {
        assert!(fixture("nope").is_none());
    }
}
