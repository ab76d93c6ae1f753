use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nullitylab::verify::{
    build_surface, default_config, list_scenarios, parse_grid, run_scenario_with_outputs, surface_grid,
    surface_kinds, with_thread_pool, write_mesh, write_records_csv, ScenarioConfig, VerifyError,
};

/// Builds immersions and verifies their relative-nullity geometry numerically.
#[derive(Debug, Parser)]
#[command(name = "nullitylab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write an OBJ mesh of a surface over a parameter grid.
    Build(SurfaceArgs),
    /// Run a verification scenario and write its JSON report.
    Verify(VerifyArgs),
    /// Write per-point mean curvature and nullity of a surface as CSV.
    Export(SurfaceArgs),
    /// List the bundled scenarios.
    ListScenarios,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Scenario configuration (JSON).
    #[arg(long, required_unless_present = "scenario", conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Run a bundled scenario with its default configuration.
    #[arg(long)]
    scenario: Option<String>,
    /// Grid counts, e.g. 21x21 or 9x9x16.
    #[arg(long)]
    grid: Option<String>,
    /// Tolerance override `key=value`; may be repeated.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tol: Vec<String>,
    /// Seed for grid jitter.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path (default: the config's report path, else `<scenario>-report.json`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SurfaceArgs {
    /// Surface kind; see `--surface help`.
    #[arg(long)]
    surface: String,
    /// Mixing angle φ of orthogonal-sum surfaces.
    #[arg(long)]
    phi: Option<f64>,
    /// Associated-family angle θ.
    #[arg(long)]
    theta: Option<f64>,
    /// Surface parameter `key=value`; may be repeated.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Grid counts, e.g. 21x21 or 9x9x16.
    #[arg(long, default_value = "21x21")]
    grid: String,
    /// Output path (default: `<surface>.obj` or `<surface>.csv`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_params(items: &[String]) -> Result<BTreeMap<String, f64>, VerifyError> {
    items
        .iter()
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| config_error("--param", format!("expected key=value, got `{s}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| config_error(&format!("--param {k}"), format!("`{v}` is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn config_error(key: &str, message: String) -> VerifyError {
    VerifyError::Config {
        key: key.to_string(),
        message,
    }
}

fn load_config(args: &VerifyArgs) -> Result<ScenarioConfig, VerifyError> {
    let mut config = match (&args.config, &args.scenario) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| VerifyError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            ScenarioConfig::from_json(&text)?
        }
        (None, Some(name)) => default_config(name)?,
        (None, None) => unreachable!("clap requires one of --config and --scenario"),
    };
    if let Some(g) = &args.grid {
        config.set_grid(g)?;
    }
    for t in &args.tol {
        config.set_tolerance(t)?;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    let out = match (&args.out, &config.outputs.report_path) {
        (Some(p), _) => p.display().to_string(),
        (None, Some(p)) => p.clone(),
        (None, None) => format!("{}-report.json", config.scenario),
    };
    config.outputs.report_path = Some(out);
    Ok(config)
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, VerifyError> {
    let config = load_config(args)?;
    let report = run_scenario_with_outputs(&config)?;
    for c in &report.checks {
        println!(
            "{:<6} {:<40} {:>12.3e} {} {:.3e}",
            format!("{:?}", c.status).to_lowercase(),
            c.name,
            c.residual,
            match c.bound {
                nullitylab::verify::Bound::AtMost => "<=",
                nullitylab::verify::Bound::AtLeast => ">=",
            },
            c.tolerance
        );
    }
    for m in &report.informational {
        println!("info   {:<40} {:>12.3e} {}", m.name, m.value, m.note);
    }
    println!(
        "{}: {} (report: {})",
        report.scenario,
        if report.pass { "pass" } else { "FAIL" },
        config.outputs.report_path.as_deref().unwrap_or_default()
    );
    Ok(report.pass)
}

fn surface(args: &SurfaceArgs) -> Result<nullitylab::Chart64, VerifyError> {
    if args.surface == "help" {
        return Err(config_error(
            "--surface",
            format!("known kinds: {}", surface_kinds().join(", ")),
        ));
    }
    build_surface(&args.surface, &parse_params(&args.params)?, args.phi, args.theta)
}

fn default_out(args: &SurfaceArgs, ext: &str) -> PathBuf {
    args.out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.{ext}", args.surface)))
}

fn cmd_build(args: &SurfaceArgs) -> Result<bool, VerifyError> {
    let chart = surface(args)?;
    let counts = parse_grid(&args.grid)?;
    if counts.len() < 2 && chart.dim() >= 2 {
        return Err(config_error("--grid", "a mesh needs two counts".into()));
    }
    let out = default_out(args, "obj");
    let n = write_mesh(&chart, [counts[0], counts.get(1).copied().unwrap_or(1)], &out)?;
    println!("wrote {n} vertices to {}", out.display());
    Ok(true)
}

fn cmd_export(args: &SurfaceArgs) -> Result<bool, VerifyError> {
    let chart = surface(args)?;
    let counts = parse_grid(&args.grid)?;
    let grid = surface_grid(&chart, &counts)?;
    let out = default_out(args, "csv");
    let rows = with_thread_pool(|| write_records_csv(&chart, &grid, Path::new(&out)))??;
    let total: usize = counts.iter().product();
    println!("wrote {rows} rows to {} ({} points skipped as singular)", out.display(), total - rows);
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Export(a) => cmd_export(a),
        Command::ListScenarios => {
            for s in list_scenarios() {
                println!("{:<16} {}", s.name, s.description);
            }
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() || matches!(e, VerifyError::Io { .. }) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
