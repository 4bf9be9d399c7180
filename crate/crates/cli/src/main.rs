//! `stit`: command-line front end of the STIT workbench.
//!
//! Exit codes: 0 success, 1 validation or property failure, 2 bad input.

mod config;
mod svg;
mod validate;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use stit_core::capacity::{
    analytic_missing, mc_missing, mc_missing_nested, query_window, write_capacity_csv, CapacityRow,
};
use stit_core::mixing::{sweep, write_sweep_csv};
use stit_core::stit::simulate;
use stit_core::{Direction, SimulationParams};

use config::{CapacityConfig, IterateConfig, MeasureConfig, MixingConfig, SimulateConfig};

#[derive(Parser, Debug)]
#[command(name = "stit", version, about = "Planar STIT tessellation workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed of the configuration file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the Monte Carlo sample count.
    #[arg(long, global = true)]
    n: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// SVG rendering of the tessellation (simulate only).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Leave the timestamp out of output headers.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Λ([K]), ζ on a direction grid, κ and ν(S¹).
    Measure,
    /// Simulate a tessellation; JSON dump and optional SVG.
    Simulate,
    /// Monte Carlo missing probability, with the closed form when K is connected.
    Capacity,
    /// Mixing-rate sweep table.
    Mixing,
    /// Nesting stability: missing probability under nesting vs the closed form.
    Iterate,
    /// Run a built-in property suite.
    Validate {
        #[arg(value_enum, default_value = "fast")]
        suite: validate::Suite,
    },
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    Failed,
}

struct Output<'a> {
    cli: &'a Cli,
    command: &'static str,
}

impl Output<'_> {
    fn header(&self, config: &impl Serialize) -> Value {
        let mut h = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
        });
        if !self.cli.no_timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            h["timestamp_unix"] = json!(secs);
        }
        h
    }

    fn write(&self, bytes: &[u8]) -> anyhow::Result<()> {
        match &self.cli.out {
            Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
            None => {
                std::io::stdout().write_all(bytes)?;
                Ok(())
            }
        }
    }

    fn json(&self, config: &impl Serialize, body: Value) -> anyhow::Result<()> {
        self.json_with(config, body, true)
    }

    fn json_with(&self, config: &impl Serialize, body: Value, pretty: bool) -> anyhow::Result<()> {
        let mut doc = json!({ "header": self.header(config) });
        if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
            d.extend(b);
        }
        let mut text = if pretty {
            serde_json::to_vec_pretty(&doc)?
        } else {
            serde_json::to_vec(&doc)?
        };
        text.push(b'\n');
        self.write(&text)
    }

    /// CSV body preceded by `#` comment lines holding the header.
    fn csv(&self, config: &impl Serialize, body: Vec<u8>) -> anyhow::Result<()> {
        let header = self.header(config);
        let mut text = format!(
            "# stit {} {}\n",
            self.command,
            header["version"].as_str().unwrap_or_default()
        )
        .into_bytes();
        writeln!(text, "# config: {}", serde_json::to_string(&header["config"])?)?;
        if let Some(t) = header.get("timestamp_unix") {
            writeln!(text, "# timestamp_unix: {t}")?;
        }
        text.extend(body);
        self.write(&text)
    }
}

fn config_path(cli: &Cli) -> anyhow::Result<&Path> {
    cli.config
        .as_deref()
        .context("--config PATH is required for this command")
}

fn cmd_measure(cli: &Cli) -> anyhow::Result<Status> {
    let cfg: MeasureConfig = config::load(config_path(cli)?)?;
    cfg.measure.validate()?;
    let k = cfg.set.resolve();
    let lambda = if k.is_connected() {
        Some(cfg.measure.lambda_hit_report(&k)?)
    } else {
        None
    };
    let zeta: Vec<Value> = (0..cfg.directions)
        .map(|j| {
            let theta = j as f64 * std::f64::consts::TAU / cfg.directions as f64;
            json!({ "angle_radians": theta, "zeta": cfg.measure.zeta(Direction::from_angle(theta)) })
        })
        .collect();
    let body = json!({
        "lambda_hit": lambda.as_ref().map(|r| r.lambda_hit),
        "lambda_hit_parts": lambda,
        "lambda_hit_hull": cfg.measure.lambda_hit_convex(&k.hull()),
        "connected": k.is_connected(),
        "zeta": zeta,
        "kappa": cfg.measure.kappa()?,
        "total_mass": cfg.measure.total_mass(),
    });
    Output {
        cli,
        command: "measure",
    }
    .json(&cfg, body)?;
    Ok(Status::Ok)
}

fn cmd_simulate(cli: &Cli) -> anyhow::Result<Status> {
    let mut cfg: SimulateConfig = config::load(config_path(cli)?)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let mut params = SimulationParams::new(cfg.window.clone(), cfg.time, cfg.measure.clone(), cfg.seed);
    params.retain_lineage = cfg.retain_lineage;
    params.validate()?;
    let t = simulate(&params)?;
    log::info!("{} cells after {} events", t.live_cells.len(), t.events);
    if let Some(p) = &cli.svg {
        fs::write(p, svg::render(&t)).with_context(|| format!("writing {}", p.display()))?;
    }
    Output {
        cli,
        command: "simulate",
    }
    .json_with(&cfg, json!({ "tessellation": t }), false)?;
    Ok(Status::Ok)
}

fn cmd_capacity(cli: &Cli) -> anyhow::Result<Status> {
    let mut cfg: CapacityConfig = config::load(config_path(cli)?)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    config::check_count(cfg.n)?;
    cfg.measure.validate()?;
    let k = cfg.set.resolve();
    let window = cfg.window.clone().unwrap_or_else(|| query_window(&k));
    let est = mc_missing(&k, &window, cfg.time, &cfg.measure, cfg.n, cfg.seed)?;
    let analytic = if k.is_connected() {
        Some(analytic_missing(&k, cfg.time, &cfg.measure)?)
    } else {
        None
    };
    let mut body = Vec::new();
    write_capacity_csv(
        &[CapacityRow::new(cfg.query_id.clone(), cfg.time, &est, analytic)],
        &mut body,
    )?;
    Output {
        cli,
        command: "capacity",
    }
    .csv(&cfg, body)?;
    Ok(Status::Ok)
}

fn cmd_mixing(cli: &Cli) -> anyhow::Result<Status> {
    let mut cfg: MixingConfig = config::load(config_path(cli)?)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.n {
        cfg.mc_n = Some(config::check_count(n)?);
    }
    let entries = sweep(&cfg.to_sweep())?;
    let mut body = Vec::new();
    write_sweep_csv(&entries, &mut body)?;
    Output { cli, command: "mixing" }.csv(&cfg, body)?;
    Ok(Status::Ok)
}

fn cmd_iterate(cli: &Cli) -> anyhow::Result<Status> {
    let mut cfg: IterateConfig = config::load(config_path(cli)?)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    config::check_count(cfg.n)?;
    cfg.measure.validate()?;
    let k = cfg.set.resolve();
    let window = cfg.window.clone().unwrap_or_else(|| query_window(&k));
    let est = mc_missing_nested(&k, &window, cfg.time, cfg.extra_time, &cfg.measure, cfg.n, cfg.seed)?;
    let analytic = analytic_missing(&k, cfg.time + cfg.extra_time, &cfg.measure)?;
    let pass = est.agrees_with_probability(analytic, 3.0);
    let body = json!({
        "estimate": est,
        "analytic": analytic,
        "stderr_under_analytic": est.stderr_under(analytic),
        "pass": pass,
    });
    Output {
        cli,
        command: "iterate",
    }
    .json(&cfg, body)?;
    Ok(if pass { Status::Ok } else { Status::Failed })
}

fn cmd_validate(cli: &Cli, suite: validate::Suite) -> anyhow::Result<Status> {
    let report = validate::run(suite);
    let passed = report.passed;
    Output {
        cli,
        command: "validate",
    }
    .json(&json!({ "suite": suite }), serde_json::to_value(&report)?)?;
    Ok(if passed { Status::Ok } else { Status::Failed })
}

fn run(cli: &Cli) -> anyhow::Result<Status> {
    match &cli.command {
        Command::Measure => cmd_measure(cli),
        Command::Simulate => cmd_simulate(cli),
        Command::Capacity => cmd_capacity(cli),
        Command::Mixing => cmd_mixing(cli),
        Command::Iterate => cmd_iterate(cli),
        Command::Validate { suite } => cmd_validate(cli, *suite),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
