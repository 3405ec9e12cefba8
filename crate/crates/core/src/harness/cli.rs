//! Argument parsing for the `xy-qcr` binary.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::commands::{
    cmd_evolve, cmd_map_qcr, cmd_quench_length, cmd_sweep_temperature, cmd_validate, Outcome,
};
use super::config::{RunConfig, Values};
use super::{exit_code, EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION};
use crate::error::{Error, Result};
use crate::qcr::QuantityKind;

#[derive(Debug, Parser)]
#[command(
    name = "xy-qcr",
    version,
    about = "Quench dynamics of the XY chain and quantum critical region detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time series of one sudden quench (and pulse energies) at fixed temperature.
    Evolve,
    /// Maximal and scaled responses against temperature for several initial fields.
    SweepTemperature,
    /// Scaled responses for several (h0, h1) pairs.
    QuenchLength,
    /// Boundary temperature T*(h0) of the critical region for each quantity.
    MapQcr,
    /// Cross-check the solution against exact diagonalisation.
    Validate,
}

/// Overrides for [`RunConfig`] fields.
#[derive(Debug, Args, Default)]
pub struct Flags {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Quantities: energy, log-negativity, mutual-information (repeat or comma-separate).
    #[arg(long, global = true, value_delimiter = ',')]
    pub quantity: Vec<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub h0: Option<f64>,
    /// Comma-separated list of initial fields.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub h0_grid: Vec<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub h1: Option<f64>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Use gamma = |1 - |h0|| and a 0.01 temperature window.
    #[arg(long, global = true)]
    pub multicritical: bool,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub temperature: Option<f64>,
    /// Comma-separated temperature grid.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub temperatures: Vec<f64>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub t_hi: Option<f64>,
    /// Horizon of the maximisation over time.
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    /// Coarse step of the maximisation over time.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true)]
    pub evolve_t_max: Option<f64>,
    #[arg(long, global = true)]
    pub evolve_dt: Option<f64>,
    #[arg(long, global = true)]
    pub grid_nodes: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all logical cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

impl Flags {
    fn overrides(&self) -> Result<RunConfig> {
        let quantities = if self.quantity.is_empty() {
            None
        } else {
            Some(
                self.quantity
                    .iter()
                    .map(|q| q.parse::<QuantityKind>())
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        let non_empty = |v: &Vec<f64>| (!v.is_empty()).then(|| Values::List(v.clone()));
        Ok(RunConfig {
            quantities,
            h0: self.h0,
            h0_grid: non_empty(&self.h0_grid),
            h1: self.h1,
            gamma: self.gamma,
            multicritical: self.multicritical.then_some(true),
            temperature: self.temperature,
            temperatures: non_empty(&self.temperatures),
            eta: self.eta,
            t_hi: self.t_hi,
            evolve_t_max: self.evolve_t_max,
            evolve_dt: self.evolve_dt,
            grid_nodes: self.grid_nodes,
            sizes: (!self.sizes.is_empty()).then(|| self.sizes.clone()),
            samples: self.samples,
            seed: self.seed,
            workers: self.workers,
            output: self.output.clone(),
            ..Default::default()
        })
    }

    /// The file configuration (if any) with flag overrides applied.
    pub fn resolve(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let mut cfg = base.merge(self.overrides()?);
        if self.t_max.is_some() || self.dt.is_some() {
            let mut ts = cfg.time_search.unwrap_or_default();
            ts.t_max = self.t_max.unwrap_or(ts.t_max);
            ts.dt = self.dt.unwrap_or(ts.dt);
            cfg.time_search = Some(ts);
        }
        Ok(cfg)
    }
}

fn dispatch(command: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match command {
        Command::Evolve => cmd_evolve(cfg),
        Command::SweepTemperature => cmd_sweep_temperature(cfg),
        Command::QuenchLength => cmd_quench_length(cfg),
        Command::MapQcr => cmd_map_qcr(cfg),
        Command::Validate => {
            let (outcome, report) = cmd_validate(cfg)?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!(
                    "FAILED {}: residual {:e} > tolerance {:e}",
                    c.name, c.residual, c.tolerance
                );
            }
            Ok(outcome)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = cli.flags.resolve().and_then(|cfg| {
        let threads = cfg.workers.unwrap_or(0);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config {
                field: "workers".into(),
                reason: e.to_string(),
            })?;
        pool.install(|| dispatch(&cli.command, &cfg))
    });
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.passed {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcr::TimeSearchConfig;

    #[test]
    fn flags_override_defaults() {
        let cli = Cli::try_parse_from([
            "xy-qcr",
            "map-qcr",
            "--multicritical",
            "--quantity",
            "energy,mi",
            "--dt",
            "0.01",
        ])
        .unwrap();
        let cfg = cli.flags.resolve().unwrap();
        assert!(cfg.multicritical());
        assert_eq!(
            cfg.quantities(),
            vec![
                QuantityKind::AbsorbedEnergy,
                QuantityKind::MutualInformation
            ]
        );
        assert_eq!(
            cfg.time_search().unwrap(),
            TimeSearchConfig {
                dt: 0.01,
                ..Default::default()
            }
        );
    }

    #[test]
    fn bad_input_exit_codes() {
        assert_eq!(run(["xy-qcr", "frobnicate"]), EXIT_CONFIG);
        assert_eq!(
            run(["xy-qcr", "evolve", "--quantity", "entropy"]),
            EXIT_CONFIG
        );
        assert_eq!(run(["xy-qcr", "evolve", "--gamma", "2"]), EXIT_CONFIG);
    }
}
