//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! and asserting every stated tolerance.
//!
//! Timings are asserted per criterion, so run the suite serially:
//!
//! ```text
//! cargo test -p moran-dim --release --test acceptance -- --test-threads=1 --nocapture
//! ```

use std::sync::Arc;
use std::time::Instant;

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config as PtConfig, TestRunner};
use serde_json::Value;

use moran_core::conditions::{ConditionConfig, Status};
use moran_core::dims::{self, IndexSetKind, TruncationPlan};
use moran_core::geometry::{realize, Expansion, Placement};
use moran_core::pressure;
use moran_core::schedule::{DerivedSequences, RatioSchedule};
use moran_dim::fixtures::fixture;
use moran_dim::Session;

const TAU: f64 = 1e-12;

fn session(name: &str) -> Session {
    Session::open(fixture(name).expect("fixture exists")).expect("session opens")
}

fn verdict_line(done: &mut Vec<String>, criterion: &str, pass: bool, detail: &str, secs: f64) {
    let line = format!(
        "{}: {criterion} ({detail}; {secs:.1} s)",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(pass, "{line}");
    done.push(line);
}

fn get<'a>(v: &'a Value, path: &str) -> &'a Value {
    let mut cur = v;
    for part in path.split('.') {
        cur = cur.get(part).unwrap_or_else(|| panic!("missing {path}"));
    }
    cur
}

fn getf(v: &Value, path: &str) -> f64 {
    get(v, path).as_f64().unwrap_or_else(|| panic!("{path} not a number"))
}

/// Scalar bisection oracle on a decreasing function.
fn scalar_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn criterion_1_cantor() {
    let t0 = Instant::now();
    let mut lines = Vec::new();
    let s = session("cantor3");
    let dims_v = s.run_dims().unwrap();
    let validate_v = s.run_validate().unwrap();
    let expect = 2f64.ln() / 3f64.ln();

    let values = [
        getf(&dims_v, "dims.hausdorff.value"),
        getf(&dims_v, "dims.upper_box.value"),
        getf(&dims_v, "dims.quasi_assouad.t_star.value"),
        getf(&dims_v, "dims.quasi_assouad.t.value"),
        getf(&dims_v, "dims.quasi_assouad.t_upper.value"),
        getf(&dims_v, "dims.assouad.sup_k.value"),
    ];
    let formulas_ok = values.iter().all(|v| (v - expect).abs() <= 1e-9);

    let slope = getf(&validate_v, "empirical.box.slope");
    let slope_ok = (slope - expect).abs() <= 0.05;

    let certified: Vec<String> = get(&dims_v, "dims.certified")
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect();
    let chain_ok = [
        "qa-triple-cstar",
        "qa-pair-quasi-normal-club",
        "qa-triple-quasi-normal-z",
        "qa-pair-normal-bbc",
        "assouad-formula-bbc",
        "qa-lower-bound",
        "box-lower-bound",
    ]
    .iter()
    .all(|id| certified.iter().any(|c| c.starts_with(id)));

    let secs = t0.elapsed().as_secs_f64();
    verdict_line(
        &mut lines,
        "criterion 1 (middle-thirds fixture)",
        formulas_ok && slope_ok && chain_ok && secs < 5.0,
        &format!(
            "max formula error {:.1e}, box slope {slope:.4}, chain {chain_ok}",
            values
                .iter()
                .map(|v| (v - expect).abs())
                .fold(0f64, f64::max)
        ),
        secs,
    );
}

#[test]
fn criterion_2_block_phases() {
    let t0 = Instant::now();
    let mut lines = Vec::new();

    // independent scalar oracles for the three dimension targets
    let p = scalar_root(|x| 1.0 - x - x.powi(3), 0.0, 1.0);
    let q = scalar_root(|x| 1.0 - (x + x * x) * (x + x.powi(3)), 0.0, 1.0);
    let r = scalar_root(|x| 1.0 - x - x * x, 0.0, 1.0);
    assert!((p - 0.68233).abs() < 1e-5);
    assert!((q - 0.65182).abs() < 1e-5);
    assert!((r - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
    let h_target = -p.log2();
    let b_target = -q.log2();
    let qa_target = -r.log2();
    assert!((qa_target - 0.6942419136306174).abs() < 1e-12);

    let s = session("exa-prime");
    let report = s.run_dims().unwrap();

    let h = getf(&report, "dims.hausdorff.value");
    let b = getf(&report, "dims.upper_box.value");
    let qa = get(&report, "dims.quasi_assouad.t_star");
    let qa_value = getf(qa, "value");
    let smallest_eta = get(qa, "eta_profile").as_array().unwrap().last().unwrap();
    let eta = getf(smallest_eta, "eta");
    // plan guarantees: eta reaches 0.01 and the trend window reaches 2000
    let l_max = get(&report, "meta.config.plan.l_max").as_u64().unwrap();
    let sup_k_trend_max = get(&report, "dims.assouad.sup_k.trend")
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p[1].as_f64().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    let normal = get(&report, "conditions.normal.status").as_str().unwrap();

    let ok = (h - h_target).abs() <= 0.02
        && (b - b_target).abs() <= 0.02
        && (qa_value - qa_target).abs() <= 0.02
        && eta <= 0.01
        && l_max >= 2000
        && sup_k_trend_max >= 0.95
        && normal == "holds";
    let secs = t0.elapsed().as_secs_f64();
    verdict_line(
        &mut lines,
        "criterion 2 (three-phase block fixture)",
        ok && secs < 60.0,
        &format!(
            "H err {:.4}, box err {:.4}, t_* err {:.4} at eta {eta}, sup-k trend max {sup_k_trend_max:.3}, normal {normal}",
            (h - h_target).abs(),
            (b - b_target).abs(),
            (qa_value - qa_target).abs()
        ),
        secs,
    );
}

#[test]
fn criterion_3_contrasting_pair() {
    let t0 = Instant::now();
    let mut lines = Vec::new();

    let s1 = session("bbc-holds-club-fails");
    let v1 = s1.verdicts().unwrap();
    let thin_tail = v1
        .club
        .evidence
        .iter()
        .find(|s| s.name == "thin_ratio")
        .unwrap()
        .points
        .last()
        .unwrap()
        .1;
    let fixture1_ok = v1.bbc.status == Status::Holds
        && v1.club.status == Status::Fails
        && (thin_tail - 0.5).abs() <= 0.01;

    let s2 = session("club-holds-bbc-fails");
    let v2 = s2.verdicts().unwrap();
    let fixture2_ok = v2.club.status == Status::Holds
        && v2.bbc.status == Status::Fails
        && v2.bbc.basis.as_deref().unwrap_or("").contains("branching");

    let secs = t0.elapsed().as_secs_f64();
    verdict_line(
        &mut lines,
        "criterion 3 (contrasting condition pair)",
        fixture1_ok && fixture2_ok && secs < 5.0,
        &format!("thin-ratio tail {thin_tail:.4}, bases as expected {fixture2_ok}"),
        secs,
    );
}

#[test]
fn criterion_4_triangular() {
    let t0 = Instant::now();
    let mut lines = Vec::new();
    let cfg = fixture("rutar").unwrap();
    let schedule = Arc::new(cfg.schedule.build::<f64>(4096).unwrap());
    let real = realize(
        Arc::clone(&schedule),
        Placement::EndpointsAligned,
        Expansion::Depth(1),
        1 << 22,
    )
    .unwrap();

    // the realized union fills the unit interval at every depth
    let mut union_ok = true;
    let mut worst_gap = 0f64;
    for depth in 1..=20usize {
        let gap = (1.0 - real.depth_measure(depth).unwrap()).abs();
        worst_gap = worst_gap.max(gap);
        union_ok &= gap <= 1e-9;
    }

    // neighbour counts stay within the classical constant over the log grid
    let mut count_max = 0usize;
    for &delta in &cfg.geometry.bnc_deltas {
        let rep = real
            .neighbour_count_scaled(&[], delta, cfg.geometry.bnc_radius_scale, None)
            .unwrap();
        count_max = count_max.max(rep.count);
    }
    let bnc_ok = count_max <= 5;

    // block lengths grow with the triangular order
    let s = Session::open(cfg).unwrap();
    let verdicts = s.verdicts().unwrap();
    let bbc_fails = verdicts.bbc.status == Status::Fails;
    let records = verdicts
        .bbc
        .evidence
        .iter()
        .find(|s| s.name == "b_records")
        .unwrap();
    let mut evidence_ok = true;
    for n in 2u64..=40 {
        let k = n * (n + 1) / 2;
        match records.points.iter().find(|(kk, _)| *kk == k) {
            Some(&(_, b)) => evidence_ok &= b == n as f64,
            None => evidence_ok = false,
        }
    }

    let secs = t0.elapsed().as_secs_f64();
    verdict_line(
        &mut lines,
        "criterion 4 (triangular-pair fixture)",
        union_ok && bnc_ok && bbc_fails && evidence_ok && secs < 30.0,
        &format!("worst union gap {worst_gap:.2e}, max neighbour count {count_max}, block-length records at triangular indices {evidence_ok}"),
        secs,
    );
}

#[test]
fn criterion_5_power_pair() {
    let t0 = Instant::now();
    let mut lines = Vec::new();
    let s = session("exa");
    let report = s.run_dims().unwrap();

    let diag = get(&report, "dims.assouad.diag_m");
    let diag_value = getf(diag, "value");
    let diag_m = get(diag, "trend")
        .as_array()
        .unwrap()
        .last()
        .unwrap()[0]
        .as_u64()
        .unwrap();
    let diag_ok = diag_m >= 200 && (diag_value - 0.5).abs() <= 0.05;

    let certified: Vec<String> = get(&report, "dims.certified")
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect();
    let no_qa_identity = !dims::qa_identity_certified(&certified);
    let qn = get(&report, "conditions.quasi_normal.status").as_str().unwrap();

    let validate = s.run_validate().unwrap();
    let flag = get(&validate, "discrepancy.flag").as_bool().unwrap();
    let spectra = get(&validate, "empirical.spectrum").as_array().unwrap();
    let at_002 = spectra
        .iter()
        .find(|s| (getf(s, "eta") - 0.02).abs() < 1e-12)
        .expect("eta 0.02 in the grid");
    let spectrum_002 = getf(at_002, "ratio_max_tail");

    let ok = diag_ok && no_qa_identity && qn == "fails" && flag && spectrum_002 > 0.6;
    let secs = t0.elapsed().as_secs_f64();
    verdict_line(
        &mut lines,
        "criterion 5 (power-pair fixture, alpha=1 beta=2)",
        ok && secs < 120.0,
        &format!(
            "diag {diag_value:.4} at m={diag_m}, quasi-normal {qn}, flag {flag}, spectrum@0.02 {spectrum_002:.2}"
        ),
        secs,
    );
}

// --- criterion 6: randomized property suites ---

fn random_derived(runner: &mut TestRunner) -> Arc<DerivedSequences<f64>> {
    let level = (
        proptest::collection::vec(0.1f64..1.0, 2..=4usize),
        0.4f64..0.98,
    )
        .prop_map(|(weights, target): (Vec<f64>, f64)| {
            let total: f64 = weights.iter().sum();
            weights
                .iter()
                .map(|w| w / total * target)
                .collect::<Vec<f64>>()
        });
    let levels = proptest::collection::vec(level, 8..14usize)
        .new_tree(runner)
        .unwrap()
        .current();
    let tail = vec![levels.last().unwrap().clone()];
    let s = Arc::new(RatioSchedule::explicit(1, levels, tail).unwrap());
    Arc::new(DerivedSequences::build(s, 256).unwrap())
}

fn suite<Fun: FnMut(&mut TestRunner, usize)>(cases: usize, mut f: Fun) {
    let mut runner = TestRunner::new(PtConfig {
        cases: cases as u32,
        ..PtConfig::default()
    });
    for i in 0..cases {
        f(&mut runner, i);
    }
}

#[test]
fn criterion_6_property_suites() {
    let t0 = Instant::now();
    let mut lines = Vec::new();
    const CASES: usize = 1000;

    // pressure root residuals
    suite(CASES, |r, _| {
        let d = random_derived(r);
        for k in 1..=4usize {
            for l in 0..=6usize {
                let root = pressure::solve_root(&d, k, l, TAU).unwrap();
                assert!(root.residual <= 1e-10, "residual {}", root.residual);
            }
        }
    });
    println!("  suite: pressure root residual <= 1e-10 ... done");

    // two-block and general block bracketing
    suite(CASES, |r, _| {
        let d = random_derived(r);
        for k in 1..=4usize {
            for l in 1..=6usize {
                let whole = pressure::solve_root(&d, k, l, TAU).unwrap().value;
                let singles: Vec<f64> = (k..=k + l)
                    .map(|i| pressure::solve_root(&d, i, 0, TAU).unwrap().value)
                    .collect();
                let lo = singles.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = singles.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert!(whole >= lo - 1e-9 && whole <= hi + 1e-9, "general bracketing");
                let tail = pressure::solve_root(&d, k + 1, l - 1, TAU).unwrap().value;
                assert!(
                    whole >= singles[0].min(tail) - 1e-9
                        && whole <= singles[0].max(tail) + 1e-9,
                    "two-block bracketing"
                );
            }
        }
    });
    println!("  suite: block bracketing ... done");

    // index-set nesting
    suite(CASES, |r, i| {
        let d = random_derived(r);
        let eta = 0.01 + 0.85 * ((i % 17) as f64 / 17.0);
        for l in 1..=6usize {
            let lower = dims::index_members(&d, l, eta, IndexSetKind::Lower, 24).unwrap();
            let middle = dims::index_members(&d, l, eta, IndexSetKind::Middle, 24).unwrap();
            let upper = dims::index_members(&d, l, eta, IndexSetKind::Upper, 24).unwrap();
            let upper_next = dims::index_members(&d, l + 1, eta, IndexSetKind::Upper, 24).unwrap();
            assert!(lower.iter().all(|k| middle.contains(k)));
            assert!(middle.iter().filter(|&&k| k >= 2).all(|k| upper.contains(k)));
            assert!(upper.iter().all(|k| upper_next.contains(k)));
        }
    });
    println!("  suite: index-set nesting ... done");

    // proxy ordering chain at equal windows
    suite(CASES, |r, _| {
        let d = random_derived(r);
        let plan = TruncationPlan::new(12, 6);
        let (h, b) = dims::row_estimates(&d, &plan, TAU).unwrap();
        let t_star = dims::quasi_assouad_formula(&d, &plan, IndexSetKind::Lower, TAU).unwrap();
        let t_mid = dims::quasi_assouad_formula(&d, &plan, IndexSetKind::Middle, TAU).unwrap();
        let t_up = dims::quasi_assouad_formula(&d, &plan, IndexSetKind::Upper, TAU).unwrap();
        let a = dims::assouad_formula(&d, &plan, dims::AssouadVariant::SupK, TAU).unwrap();
        let eps = 1e-9;
        assert!(h.value <= b.value + eps);
        assert!(b.value <= t_star.value + eps);
        assert!(t_star.value <= t_mid.value + eps);
        assert!(t_mid.value <= t_up.value + eps);
        assert!(t_up.value <= a.value + eps);
    });
    println!("  suite: proxy ordering chain ... done");

    // 1-D ball-intersection bound against brute-force counting
    suite(CASES, |r, _| {
        let params = (
            0.2f64..1.5,        // a1
            0.0f64..2.0,        // a2 - a1
            0.01f64..0.4,       // r
            proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..20usize),
            0.0f64..1.0,        // ball position fraction
        )
            .new_tree(r)
            .unwrap()
            .current();
        let (a1, extra, rad, layout, frac) = params;
        let a2 = a1 + extra;
        let mut intervals = Vec::new();
        let mut x = 0.0f64;
        for (gap_frac, len_frac) in layout {
            x += gap_frac * rad; // nonnegative gaps keep the open sets disjoint
            let len = (2.0 * a1 * rad) + len_frac * 2.0 * (a2 - a1) * rad;
            intervals.push((x, x + len));
            x += len;
        }
        let center = frac * (x + 2.0 * rad) - rad;
        let hits = intervals
            .iter()
            .filter(|(a, b)| *a <= center + rad && *b >= center - rad)
            .count();
        let bound = (1.0 + 2.0 * a2) / a1;
        assert!(
            (hits as f64) <= bound + 1e-9,
            "{hits} intervals hit, bound {bound}"
        );
    });
    println!("  suite: ball-intersection bound ... done");

    // covering-number monotonicity in r and R
    suite(CASES, |r, i| {
        let d = random_derived(r);
        let real = realize(
            Arc::clone(d.schedule()),
            Placement::EndpointsAligned,
            Expansion::Depth(1),
            1 << 20,
        )
        .unwrap();
        let x = 0.05 + 0.9 * ((i % 13) as f64 / 13.0);
        let radii = [0.01f64, 0.02, 0.04, 0.08];
        let mut last = usize::MAX;
        for &rr in &radii {
            let n = real.covering_number(x, 0.3, rr).unwrap();
            assert!(n <= last, "nonincreasing in r");
            last = n;
        }
        let mut prev = 0usize;
        for &big in &[0.1f64, 0.2, 0.35] {
            let n = real.covering_number(x, big, 0.005).unwrap();
            assert!(n >= prev, "nondecreasing in R");
            prev = n;
        }
    });
    println!("  suite: covering monotonicity ... done");

    // implication chain: a positive infimum never coexists with failed
    // bounded-branching, contraction, or normality verdicts
    suite(CASES, |r, _| {
        let d = random_derived(r);
        let cfg = ConditionConfig::new(128, 16);
        let v = moran_core::conditions::run_all(&d, &cfg).unwrap();
        if v.c_star.status == Status::Holds {
            assert!(v.bbc.status != Status::Fails);
            assert!(v.locally_contracting.status != Status::Fails);
            assert!(v.normal.status != Status::Fails);
        }
        if v.bbc.status == Status::Holds {
            assert!(v.locally_contracting.status != Status::Fails);
        }
    });
    println!("  suite: condition implications ... done");

    let secs = t0.elapsed().as_secs_f64();
    verdict_line(
        &mut lines,
        "criterion 6 (randomized property suites, 1000 cases each)",
        secs < 120.0,
        "7 suites",
        secs,
    );
}

#[test]
fn criterion_7_determinism() {
    let t0 = Instant::now();
    let mut lines = Vec::new();
    let bin = env!("CARGO_BIN_EXE_moran-dim");
    let fixtures = [
        "cantor3",
        "exa-prime",
        "exa",
        "rutar",
        "bbc-holds-club-fails",
        "club-holds-bbc-fails",
    ];
    let mut identical = true;
    for name in fixtures {
        for cmd in ["dims", "check"] {
            let run = |threads: &str| {
                let output = std::process::Command::new(bin)
                    .args([cmd, "--example", name, "--kmax", "48", "--lmax", "64"])
                    .env("MORAN_DIM_THREADS", threads)
                    .output()
                    .expect("binary runs");
                assert!(
                    output.status.success(),
                    "{cmd} {name} failed: {}",
                    String::from_utf8_lossy(&output.stdout)
                );
                output.stdout
            };
            let one = run("1");
            let eight = run("8");
            if one != eight {
                identical = false;
                println!("  MISMATCH: {cmd} {name}");
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict_line(
        &mut lines,
        "criterion 7 (byte-identical reports across thread counts)",
        identical,
        "6 fixtures x dims/check, threads 1 vs 8",
        secs,
    );
}
