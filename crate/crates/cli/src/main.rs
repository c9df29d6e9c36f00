//! `moran-dim`: formula-based fractal dimensions of Moran structures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use moran_dim::config::RunConfig;
use moran_dim::fixtures;
use moran_dim::pipeline::{trends_csv, Session};

#[derive(Parser)]
#[command(
    name = "moran-dim",
    version,
    about = "Formula-based fractal dimensions of Moran structures, structural condition checks, and empirical cross-validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long, conflicts_with = "example")]
    config: Option<PathBuf>,
    /// Named fixture from the registry (see `examples`).
    #[arg(long)]
    example: Option<String>,
    /// Override the plan's k window.
    #[arg(long)]
    kmax: Option<usize>,
    /// Override the plan's l window (also clamps the deep first-row horizon).
    #[arg(long)]
    lmax: Option<usize>,
    /// Comma-separated strictly decreasing eta grid, e.g. "0.5,0.2,0.1".
    #[arg(long)]
    eta_grid: Option<String>,
    /// Directory for report files; stdout always gets the report too.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stdout format.
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: validate, dimension formulas, conditions, certification.
    Dims(RunArgs),
    /// Structural condition verdicts only.
    Check(RunArgs),
    /// Formula estimates beside empirical covering-number estimates.
    Validate(RunArgs),
    /// Static SVG and CSV of the first K levels.
    Render {
        #[command(flatten)]
        run: RunArgs,
        /// Number of levels to draw.
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// List the fixture registry.
    Examples,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_LIMITS: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

fn exit_code_for(err: &moran_core::Error) -> u8 {
    use moran_core::Error::*;
    match err {
        Config(_) | Inadmissible { .. } | HintMismatch { .. } | Precondition(_) => EXIT_CONFIG,
        Horizon { .. } | CapExceeded { .. } => EXIT_LIMITS,
        Internal(_) => EXIT_INTERNAL,
    }
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "error": {"kind": kind, "message": message, "exit": code}
        }))
        .expect("error object serializes")
    );
    ExitCode::from(code)
}

fn load_config(args: &RunArgs) -> Result<RunConfig, ExitCode> {
    let mut cfg = match (&args.config, &args.example) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                fail("io", format!("cannot read {}: {e}", path.display()), 1)
            })?;
            RunConfig::from_json(&text)
                .map_err(|e| fail("config", format!("{e}"), EXIT_CONFIG))?
        }
        (None, Some(name)) => fixtures::fixture(name).ok_or_else(|| {
            fail(
                "config",
                format!("unknown example {name:?}; run `moran-dim examples`"),
                EXIT_CONFIG,
            )
        })?,
        _ => {
            return Err(fail(
                "config",
                "exactly one of --config or --example is required".into(),
                EXIT_CONFIG,
            ))
        }
    };
    if let Some(k) = args.kmax {
        cfg.plan.k_max = k;
    }
    if let Some(l) = args.lmax {
        cfg.plan.l_max = l;
        cfg.plan.row1_l_max = None;
    }
    if let Some(grid) = &args.eta_grid {
        let parsed: Result<Vec<f64>, _> = grid.split(',').map(|s| s.trim().parse()).collect();
        match parsed {
            Ok(v) if !v.is_empty() => cfg.plan.eta_grid = v,
            _ => {
                return Err(fail(
                    "config",
                    format!("cannot parse eta grid {grid:?}"),
                    EXIT_CONFIG,
                ))
            }
        }
    }
    Ok(cfg)
}

fn write_out(dir: &PathBuf, name: &str, content: &str) -> Result<(), ExitCode> {
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(dir.join(name), content))
        .map_err(|e| fail("io", format!("cannot write {name}: {e}"), 1))
}

fn emit(args: &RunArgs, report: &serde_json::Value, extra: &[(&str, String)]) -> ExitCode {
    let pretty = serde_json::to_string_pretty(report).expect("report serializes");
    if args.format == "csv" {
        print!("{}", trends_csv(report));
    } else {
        println!("{pretty}");
    }
    if let Some(dir) = &args.out {
        if write_out(dir, "report.json", &pretty).is_err() {
            return ExitCode::from(1);
        }
        for (name, content) in extra {
            if write_out(dir, name, content).is_err() {
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}

fn run(command: Command) -> ExitCode {
    match command {
        Command::Examples => {
            for (name, description) in fixtures::fixture_names() {
                println!("{name:<24} {description}");
            }
            ExitCode::SUCCESS
        }
        Command::Dims(args) => {
            let cfg = match load_config(&args) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let session = match Session::open(cfg) {
                Ok(s) => s,
                Err(e) => return fail("open", e.to_string(), exit_code_for(&e)),
            };
            match session.run_dims() {
                Ok(report) => {
                    let mut extra = vec![("trends.csv", trends_csv(&report))];
                    if args.out.is_some() {
                        match session.grid_csv() {
                            Ok(csv) => extra.push(("grid.csv", csv)),
                            Err(e) => return fail("grid", e.to_string(), exit_code_for(&e)),
                        }
                    }
                    emit(&args, &report, &extra)
                }
                Err(e) => fail("dims", e.to_string(), exit_code_for(&e)),
            }
        }
        Command::Check(args) => {
            let cfg = match load_config(&args) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let session = match Session::open(cfg) {
                Ok(s) => s,
                Err(e) => return fail("open", e.to_string(), exit_code_for(&e)),
            };
            match session.run_check() {
                Ok(report) => emit(&args, &report, &[]),
                Err(e) => fail("check", e.to_string(), exit_code_for(&e)),
            }
        }
        Command::Validate(args) => {
            let cfg = match load_config(&args) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let session = match Session::open(cfg) {
                Ok(s) => s,
                Err(e) => return fail("open", e.to_string(), exit_code_for(&e)),
            };
            match session.run_validate() {
                Ok(report) => emit(&args, &report, &[]),
                Err(e) => fail("validate", e.to_string(), exit_code_for(&e)),
            }
        }
        Command::Render { run: args, depth } => {
            let cfg = match load_config(&args) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let session = match Session::open(cfg) {
                Ok(s) => s,
                Err(e) => return fail("open", e.to_string(), exit_code_for(&e)),
            };
            match session.run_render(depth) {
                Ok((summary, svg, csv)) => emit(
                    &args,
                    &summary,
                    &[("render.svg", svg), ("realization.csv", csv)],
                ),
                Err(e) => fail("render", e.to_string(), exit_code_for(&e)),
            }
        }
    }
}

fn main() -> ExitCode {
    // worker cap; any value yields identical output
    if let Ok(threads) = std::env::var("MORAN_DIM_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
    run(Cli::parse().command)
}
