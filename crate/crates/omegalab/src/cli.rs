use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::cache::CACHE_DIR_ENV;
use crate::config::{Experiment, ExperimentConfig, MachineSource, PrefixSource};
use crate::error::{Error, Result};
use crate::experiments::{run_experiment, write_documents};
use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "omegalab",
    version,
    about = "Halting probabilities, program-size complexity and uncertainty products"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the halting programs found within the budget.
    Enumerate(Common),
    /// Print Ω (or its lower bound).
    Omega(Common),
    /// H, ∇ and Δ for given strings, or for every output found.
    Complexity {
        #[command(flatten)]
        common: Common,
        /// Strings to look up; all outputs when omitted.
        #[arg(long = "x", value_delimiter = ',')]
        strings: Vec<String>,
    },
    /// Assign a prefix-free code to a list of lengths.
    Kraft {
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
        #[arg(long)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Products Δ_s·Δ_C over the first s bits of a prefix source.
    Uncertainty {
        #[command(flatten)]
        common: Common,
        /// Take the bits from another machine's Ω.
        #[arg(long, conflicts_with = "spec")]
        prefix_machine: Option<String>,
        /// Take the bits, and the machine unless given, from a scattered spec.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Also tabulate which products reach this threshold.
        #[arg(long)]
        growth: Option<u64>,
    },
    /// Observable pairs and energy moments for prefixes with 0 < p < 1.
    Observables {
        #[command(flatten)]
        common: Common,
        #[arg(long = "x", value_delimiter = ',')]
        strings: Vec<String>,
    },
    /// Build, verify and report on a scattered-bits machine.
    Scattered {
        #[arg(long, required = true)]
        spec: PathBuf,
        /// Randomness line ε₁ as num/den.
        #[arg(long, default_value = "1")]
        epsilon: String,
        /// Last level of the contradiction table (default k_max).
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        format: Option<Format>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment from a saved JSON config.
    Report {
        #[arg(long, required = true)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Built-in machine name, or U for the universal machine.
    #[arg(long, default_value = "M1", conflicts_with = "machine_file")]
    pub machine: String,
    /// Machine description file.
    #[arg(long)]
    pub machine_file: Option<PathBuf>,
    /// Padding bits in front of every program.
    #[arg(long, default_value_t = 0)]
    pub pad: usize,
    /// Steps per path.
    #[arg(long, default_value_t = 1000)]
    pub budget: u64,
    #[arg(long, default_value_t = omegalab_core::enumerate::EnumerationLimits::DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
    #[arg(long, default_value_t = 8)]
    pub s_max: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long, env = CACHE_DIR_ENV)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the experiment config here as JSON before running.
    #[arg(long)]
    pub save_config: Option<PathBuf>,
}

impl Common {
    fn source(&self) -> MachineSource {
        match &self.machine_file {
            Some(path) => MachineSource::File(path.clone()),
            None => MachineSource::Builtin(self.machine.clone()),
        }
    }

    fn config(&self, experiment: Experiment) -> ExperimentConfig {
        ExperimentConfig {
            experiment,
            machine: self.source(),
            pad: self.pad,
            budget: self.budget,
            max_nodes: self.max_nodes,
            s_max: self.s_max,
            prefix: PrefixSource::Own,
            threads: self.threads,
            format: self.format,
            out: self.out.clone(),
            cache_dir: self.cache_dir.clone(),
        }
    }
}

/// The config a command line describes, and where to save it if asked.
pub fn config_from(command: Command) -> Result<(ExperimentConfig, Option<PathBuf>)> {
    let (config, save) = match command {
        Command::Enumerate(c) => (c.config(Experiment::Enumerate), c.save_config),
        Command::Omega(c) => (c.config(Experiment::Omega), c.save_config),
        Command::Complexity { common, strings } => {
            (common.config(Experiment::Complexity { strings }), common.save_config)
        }
        Command::Kraft { lengths, format, out } => {
            let mut config =
                ExperimentConfig::new(Experiment::Kraft { lengths }, MachineSource::Builtin("M1".into()), 0);
            config.format = format;
            config.out = out;
            (config, None)
        }
        Command::Uncertainty {
            common,
            prefix_machine,
            spec,
            growth,
        } => {
            let mut config = common.config(Experiment::Uncertainty {
                growth_threshold: growth,
            });
            if let Some(name) = prefix_machine {
                config.prefix = PrefixSource::Machine(MachineSource::Builtin(name));
            }
            if let Some(spec) = spec {
                if common.machine_file.is_none() && common.machine == "M1" {
                    config.machine = MachineSource::Scattered(spec.clone());
                }
                config.prefix = PrefixSource::Scattered(spec);
            }
            (config, common.save_config)
        }
        Command::Observables { common, strings } => {
            (common.config(Experiment::Observables { strings }), common.save_config)
        }
        Command::Scattered {
            spec,
            epsilon,
            horizon,
            format,
            out,
        } => {
            let mut config = ExperimentConfig::new(
                Experiment::Scattered {
                    spec: spec.clone(),
                    epsilon,
                    horizon,
                },
                MachineSource::Scattered(spec),
                0,
            );
            config.format = format;
            config.out = out;
            (config, None)
        }
        Command::Report { config } => (ExperimentConfig::load(&config)?, None),
    };
    Ok((config, save))
}

pub fn execute(config: &ExperimentConfig) -> Result<Option<String>> {
    let documents = run_experiment(config)?;
    write_documents(&documents, config.out.as_deref())
}

pub fn run_cli<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("omegalab: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (config, save) = config_from(cli.command)?;
    if let Some(path) = save {
        std::fs::write(&path, config.to_json()).map_err(|e| Error::io(path, e))?;
    }
    if let Some(text) = execute(&config)? {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}
