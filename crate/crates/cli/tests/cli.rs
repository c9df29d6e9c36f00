//! End-to-end checks of the binary surface: flags, exit codes, file outputs.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moran-dim"))
}

#[test]
fn inadmissible_config_exits_2_naming_level() {
    let dir = std::env::temp_dir().join("moran-dim-bad-config");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        r#"{"schedule": {"d": 1, "kind": "explicit", "prefix": [], "tail_period": [[0.6, 0.6]]},
           "plan": {"k_max": 1, "l_max": 2}, "conditions": {"k": 8, "l": 8}}"#,
    )
    .unwrap();
    let out = bin()
        .args(["dims", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("inadmissible") && text.contains("level 1"), "{text}");
}

#[test]
fn unknown_example_exits_2() {
    let out = bin().args(["dims", "--example", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("unknown example"));
}

#[test]
fn missing_source_exits_2() {
    let out = bin().args(["check"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn render_writes_files_and_rejects_zero_depth() {
    let dir = std::env::temp_dir().join("moran-dim-render-test");
    let _ = std::fs::remove_dir_all(&dir);
    let out = bin()
        .args([
            "render",
            "--example",
            "cantor3",
            "--depth",
            "5",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let svg = std::fs::read_to_string(dir.join("render.svg")).unwrap();
    assert_eq!(svg.matches("<rect").count(), 2 + 4 + 8 + 16 + 32);
    let csv = std::fs::read_to_string(dir.join("realization.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 + 4 + 8 + 16 + 32);
    assert!(csv.starts_with("word,depth,left,length"));

    let out = bin()
        .args(["render", "--example", "cantor3", "--depth", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dims_out_dir_gets_report_trends_grid() {
    let dir = std::env::temp_dir().join("moran-dim-dims-out");
    let _ = std::fs::remove_dir_all(&dir);
    let out = bin()
        .args([
            "dims",
            "--example",
            "cantor3",
            "--kmax",
            "16",
            "--lmax",
            "32",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    for name in ["report.json", "trends.csv", "grid.csv"] {
        assert!(dir.join(name).is_file(), "missing {name}");
    }
    let grid = std::fs::read_to_string(dir.join("grid.csv")).unwrap();
    assert!(grid.starts_with("k,l,s,residual\n"));
    assert_eq!(grid.lines().count(), 1 + 16 * 33);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    // every report embeds hash, horizon, and version
    assert!(report["meta"]["config_sha256"].as_str().unwrap().len() == 64);
    assert!(report["meta"]["horizon"].as_u64().unwrap() > 0);
    assert!(report["meta"]["version"].is_string());
}

#[test]
fn csv_format_prints_trend_rows() {
    let out = bin()
        .args([
            "dims",
            "--example",
            "cantor3",
            "--kmax",
            "8",
            "--lmax",
            "16",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("quantity,index,value\n"));
    assert!(text.contains("hausdorff,"));
    assert!(text.contains("t_star@eta="));
}

#[test]
fn examples_lists_registry() {
    let out = bin().arg("examples").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "cantor3",
        "exa-prime",
        "exa",
        "rutar",
        "bbc-holds-club-fails",
        "club-holds-bbc-fails",
    ] {
        assert!(text.contains(name));
    }
}

#[test]
fn eta_grid_flag_is_applied_and_hashed() {
    let run = |eta: &str| {
        let out = bin()
            .args([
                "check",
                "--example",
                "cantor3",
                "--eta-grid",
                eta,
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["meta"]["config_sha256"].as_str().unwrap().to_string()
    };
    assert_ne!(run("0.5,0.1"), run("0.5,0.2"));
}
