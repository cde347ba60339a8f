use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ossd_sim::cli::{
    cmd_plotdata, cmd_run, gen_scenario, summary_table, write_scenario, ExperimentConfig,
    GeneratorParams, ScenarioSource,
};
use ossd_sim::engine::PolicyMode;
use ossd_sim::Error;

const DEFAULT_SEED: u64 = 20_100_101;

#[derive(Parser)]
#[command(
    name = "ossd-sim",
    version,
    about = "Project scheduling and workforce assignment simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scenario file.
    GenScenario {
        #[command(flatten)]
        generator: GeneratorArgs,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Output file.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run replicated experiments and write result tables.
    Run {
        /// Scenario file; a scenario is generated from the generator flags when omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[command(flatten)]
        generator: GeneratorArgs,
        /// Seed for scenario generation (defaults to --seed).
        #[arg(long)]
        scenario_seed: Option<u64>,
        #[arg(long, default_value_t = 10)]
        replications: u32,
        /// Base seed; replication r uses seed + r in every mode.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [PolicyMode::Dynamic, PolicyMode::Fifo])]
        modes: Vec<PolicyMode>,
        #[arg(long, short, default_value = "results")]
        out: PathBuf,
    },
    /// Write paired per-replication series for charting.
    PlotData {
        /// Directory written by `run`.
        #[arg(long)]
        run_dir: PathBuf,
        /// Output directory (defaults to the run directory).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GeneratorArgs {
    #[arg(long, default_value_t = 30)]
    projects: usize,
    #[arg(long, default_value_t = 46)]
    developers: usize,
    /// Minimum project duration in years.
    #[arg(long, default_value_t = 0.3)]
    duration_min: f64,
    #[arg(long, default_value_t = 0.7)]
    duration_max: f64,
    #[arg(long, default_value_t = 30.0)]
    mean_interarrival: f64,
    #[arg(long, default_value_t = 1095.0)]
    horizon: f64,
    #[arg(long, default_value_t = 1)]
    effort_min: u32,
    #[arg(long, default_value_t = 5)]
    effort_max: u32,
    #[arg(long, default_value_t = 0.5)]
    expertise_min: f64,
    #[arg(long, default_value_t = 2.5)]
    expertise_max: f64,
    #[arg(long, default_value_t = 1.5)]
    slack_min: f64,
    #[arg(long, default_value_t = 3.0)]
    slack_max: f64,
    /// Concurrent projects per developer.
    #[arg(long, default_value_t = 2)]
    concurrency_cap: u32,
}

impl GeneratorArgs {
    fn params(&self) -> GeneratorParams {
        GeneratorParams {
            n_projects: self.projects,
            n_developers: self.developers,
            duration_min_years: self.duration_min,
            duration_max_years: self.duration_max,
            mean_interarrival_days: self.mean_interarrival,
            horizon_days: self.horizon,
            effort_range: (self.effort_min, self.effort_max),
            expertise_range: (self.expertise_min, self.expertise_max),
            deadline_slack_range: (self.slack_min, self.slack_max),
            concurrency_cap: self.concurrency_cap,
        }
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::GenScenario {
            generator,
            seed,
            out,
        } => {
            let scenario = gen_scenario(&generator.params(), seed)?;
            write_scenario(&out, &scenario)?;
            println!("seed={seed}");
            println!("wrote {}", out.display());
        }
        Command::Run {
            scenario,
            generator,
            scenario_seed,
            replications,
            seed,
            modes,
            out,
        } => {
            let source = match scenario {
                Some(path) => ScenarioSource::File(path),
                None => ScenarioSource::Generate {
                    params: generator.params(),
                    seed: scenario_seed.unwrap_or(seed),
                },
            };
            let config = ExperimentConfig {
                source,
                replications,
                base_seed: seed,
                modes,
                output_dir: out,
            };
            if let Ok(s) = config.source.load() {
                if !s.slim.is_typical() {
                    eprintln!(
                        "warning: technology constant {} is outside the typical range",
                        s.slim.technology_constant
                    );
                }
            }
            let report = cmd_run(&config)?;
            println!("seed={seed}");
            print!("{}", summary_table(&report));
            println!("wrote {}", config.output_dir.display());
        }
        Command::PlotData { run_dir, out } => {
            let out = out.unwrap_or_else(|| run_dir.clone());
            for path in cmd_plotdata(&run_dir, &out)? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
