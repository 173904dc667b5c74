use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use pipestab::certificate::{compute_constants, Verdict};
use pipestab::execute;
use pipestab_cli::config::{self, ScenarioConfig};
use pipestab_cli::output::{self, write_artifacts};
use pipestab_cli::sweep::{self, Axis};

#[derive(Parser)]
#[command(
    name = "pipestab",
    version,
    about = "Boundary feedback stability runs for gas pipe flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its CSV, report and JSON summary.
    Run { config: PathBuf },
    /// Run the cartesian product of overrides on top of a scenario.
    Sweep {
        config: PathBuf,
        /// `section.key=v1,v2,...`; repeat for more axes.
        #[arg(long = "set", value_name = "KEY=V1,V2,...")]
        set: Vec<Axis>,
        /// Summary CSV; defaults to `<csv stem>.sweep.csv` beside the run CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the certificate constants of a scenario.
    Constants { config: PathBuf },
    /// Print the stationary profile on the solver grid.
    Stationary { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path) -> anyhow::Result<(ScenarioConfig, PathBuf, pipestab::Scenario)> {
    let (config, base) = config::load(path)?;
    let scenario = config
        .to_scenario()
        .with_context(|| format!("invalid scenario {}", path.display()))?;
    Ok((config, base, scenario))
}

fn dispatch(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Run { config } => {
            let (cfg, base, scenario) = load(&config)?;
            let out = execute(&scenario)?;
            let paths = cfg.resolve_outputs(&base);
            let summary = write_artifacts(&paths, &cfg, &out)?;
            let c = &summary.constants;
            println!("verdict: {}", summary.verdict.as_str());
            println!("mu = {}, Cg = {}, delta = {}", c.mu, c.cg, c.delta);
            println!(
                "worst margin: E = {}, H = {}",
                summary.bounds.energy.worst_margin, summary.bounds.h1.worst_margin
            );
            for p in [&paths.csv, &paths.report, &paths.summary] {
                println!("wrote {}", p.display());
            }
            Ok(match summary.verdict {
                Verdict::BoundViolated => ExitCode::from(2),
                _ => ExitCode::SUCCESS,
            })
        }
        Command::Sweep {
            config,
            set,
            summary,
            jobs,
        } => {
            sweep::grid(&set)?;
            let (doc, base) = config::read_document(&config)?;
            let base_config = ScenarioConfig::from_value(doc.clone())
                .with_context(|| format!("invalid scenario {}", config.display()))?;
            let summary_path = summary.unwrap_or_else(|| {
                let csv = base_config.resolve_outputs(&base).csv;
                csv.with_extension("sweep.csv")
            });
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.unwrap_or(0))
                .build()?;
            let rows = pool.install(|| sweep::run_sweep(&doc, &base, &set))?;
            let mut buffer = Vec::new();
            sweep::write_summary(&set, &rows, &mut buffer)?;
            output::write_text(&summary_path, std::str::from_utf8(&buffer)?)?;
            print!("{}", String::from_utf8(buffer)?);
            println!("wrote {}", summary_path.display());
            let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
            if failed > 0 {
                eprintln!("error: {failed} of {} runs failed", rows.len());
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Constants { config } => {
            let (_, _, scenario) = load(&config)?;
            let d = &scenario.disturbance;
            let constants = compute_constants(&scenario.params, scenario.lambda, d.nu, d.c_nu)?;
            print!("{}", output::constants_text(&constants)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Stationary { config } => {
            let (_, _, scenario) = load(&config)?;
            print!("{}", output::profile_table(&scenario.profile()?));
            Ok(ExitCode::SUCCESS)
        }
    }
}
