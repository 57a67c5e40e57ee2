use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jamsched::geometry::WorldModel;
use jamsched::greedy::{build_slot_ilp, greedy_schedule};
use jamsched::harness::{emit_csv, run_experiment, ExperimentSpec, Scenario};
use jamsched::ilp::export_model;
use jamsched::lifetime::{baseline_schedule, infinite_lifetime_certificate};
use jamsched::mrs::mrs_schedule;
use jamsched::schedule::Schedule;
use jamsched::sinr::{active_count_bounds, is_reliable, NetworkConfig};
use serde_json::json;

/// Friendly-jammer scheduling: deploy worlds, build schedules, analyze
/// lifetimes and run parameter sweeps.
#[derive(Parser)]
#[command(name = "jamsched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deploy jammers from a config and write the world as JSON.
    Deploy {
        #[command(flatten)]
        source: ConfigSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Schedule a world and write one line (or JSON object) per slot.
    Schedule {
        #[command(flatten)]
        input: WorldInput,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Greedy)]
        algorithm: AlgorithmArg,
        /// Defaults to the config's `max_slots`.
        #[arg(long)]
        max_slots: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Lines)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report initial reliability, L_jam, active-count bounds and the
    /// unbounded-lifetime certificate as JSON.
    Analyze {
        #[command(flatten)]
        input: WorldInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the sweep described by a spec file and write CSV.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the first slot's integer program in the text model format.
    ExportIlp {
        #[command(flatten)]
        input: WorldInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConfigSource {
    /// Experiment spec (TOML). Without it the built-in profile is used.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    profile: Profile,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct WorldInput {
    #[command(flatten)]
    source: ConfigSource,
    /// World JSON written by `deploy`; overrides config-based deployment.
    #[arg(long, conflicts_with = "config")]
    world: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Desk,
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Greedy,
    Mrs,
    Baseline,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Lines,
    Jsonl,
}

impl ConfigSource {
    fn spec(&self) -> Result<ExperimentSpec> {
        match &self.config {
            Some(path) => {
                let text = read(path)?;
                ExperimentSpec::from_toml_str(&text).with_context(|| format!("in {}", path.display()))
            }
            None => Ok(match self.profile {
                Profile::Desk => ExperimentSpec::desk(),
                Profile::Paper => ExperimentSpec::paper(),
            }),
        }
    }
}

impl WorldInput {
    /// The world, its config and the default slot cap.
    fn load(&self) -> Result<(WorldModel, NetworkConfig, usize)> {
        let spec = self.source.spec()?;
        if let Some(path) = &self.world {
            let scenario = Scenario::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?;
            return Ok((scenario.world()?, scenario.network, spec.sweep.max_slots));
        }
        let (world, cfg) = spec.deploy(self.source.seed)?;
        Ok((world, cfg, spec.sweep.max_slots))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_out(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())),
        None => {
            io::stdout().lock().write_all(bytes)?;
            Ok(())
        }
    }
}

fn render(schedule: &Schedule, format: Format) -> String {
    match format {
        Format::Lines => schedule.to_lines(),
        Format::Jsonl => schedule
            .slots
            .iter()
            .zip(&schedule.slot_deltas)
            .enumerate()
            .map(|(t, (slot, delta))| format!("{}\n", json!({ "slot": t, "active": slot, "delta": delta })))
            .collect(),
    }
}

fn schedule(world: &WorldModel, cfg: &NetworkConfig, algorithm: AlgorithmArg, max_slots: usize) -> Result<Schedule> {
    Ok(match algorithm {
        AlgorithmArg::Greedy => greedy_schedule(world, cfg, max_slots)?,
        AlgorithmArg::Mrs => mrs_schedule(world, cfg)?,
        AlgorithmArg::Baseline => baseline_schedule(world, cfg, max_slots)?,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Deploy { source, out } => {
            let spec = source.spec()?;
            let (world, cfg) = spec.deploy(source.seed)?;
            let mut text = Scenario::new(&world, cfg).to_json();
            text.push('\n');
            write_out(out.as_deref(), text.as_bytes())
        }
        Command::Schedule {
            input,
            algorithm,
            max_slots,
            format,
            out,
        } => {
            let (world, cfg, default_cap) = input.load()?;
            let cap = max_slots.unwrap_or(default_cap);
            if cap == 0 {
                bail!("--max-slots must be at least 1");
            }
            let s = schedule(&world, &cfg, algorithm, cap)?;
            eprintln!("lifetime {} ({:?})", s.lifetime, s.termination);
            write_out(out.as_deref(), render(&s, format).as_bytes())
        }
        Command::Analyze { input, out } => {
            let (world, cfg, _) = input.load()?;
            let all: Vec<usize> = (0..world.len()).collect();
            let report = is_reliable(&all, &world, &cfg)?;
            let certificate = infinite_lifetime_certificate(&world, &cfg)?;
            let bounds = active_count_bounds(&world, &cfg)?;
            let value = json!({
                "jammers": world.len(),
                "rechargeable": world.jammers.iter().filter(|j| j.is_rechargeable()).count(),
                "full_set_reliable": report.reliable,
                "l_jam": certificate.l_jam,
                "bounds": bounds,
                "certificate": certificate.label(),
                "verdict": certificate.verdict,
            });
            let mut text = serde_json::to_string_pretty(&value)?;
            text.push('\n');
            write_out(out.as_deref(), text.as_bytes())
        }
        Command::Sweep { spec, out } => {
            let text = read(&spec)?;
            let spec = ExperimentSpec::from_toml_str(&text).with_context(|| format!("in {}", spec.display()))?;
            let records = run_experiment(&spec)?;
            let mut buf = Vec::new();
            emit_csv(&records, &mut buf)?;
            write_out(out.as_deref(), &buf)
        }
        Command::ExportIlp { input, out } => {
            let (world, cfg, _) = input.load()?;
            let slot = build_slot_ilp(&world, &cfg)?;
            write_out(out.as_deref(), export_model(&slot.model).as_bytes())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
