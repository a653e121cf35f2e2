use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qswitch_core::cqs::{Branch, SwitchMode};
use qswitch_core::experiments::{run, Experiment, ExperimentConfig};
use qswitch_core::Error;

/// Quantum switch divisibility experiments, written as CSV.
#[derive(Debug, Parser)]
#[command(name = "qswitch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Switched depolarizing pair: trace distance of |0> and |1> over time.
    Fig2,
    /// Switched depolarizing and amplitude damping pair.
    Fig3,
    /// Switched depolarizing and phase damping pair.
    Fig4,
    /// Helstrom error for detecting a rotation behind phase damping.
    Fig5,
    /// Universal switch on the two coupled-qubit dynamics.
    Fig6,
    /// Commutativity certificate for two phase damping channels.
    PdcCert,
    /// Commutativity certificate for two amplitude damping channels.
    AdcCert,
    /// Commutativity certificates for all five channel pairs.
    Certificates,
    /// Trace-distance revivals of the coupled-qubit reduced dynamics.
    HxPind,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Fig2 => Experiment::Fig2,
            Command::Fig3 => Experiment::Fig3,
            Command::Fig4 => Experiment::Fig4,
            Command::Fig5 => Experiment::Fig5,
            Command::Fig6 => Experiment::Fig6,
            Command::PdcCert => Experiment::PdcCert,
            Command::AdcCert => Experiment::AdcCert,
            Command::Certificates => Experiment::Certificates,
            Command::HxPind => Experiment::HxPind,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Static,
    Timesplit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
}

#[derive(Debug, Args)]
struct Flags {
    /// Lindblad coefficient of the first channel
    #[arg(long, global = true)]
    gamma1: Option<f64>,
    /// Lindblad coefficient of the second channel in the unequal-rate case
    #[arg(long, global = true)]
    gamma2: Option<f64>,
    /// Phase damping strength for fig5
    #[arg(long, global = true)]
    noise_p: Option<f64>,
    /// End of the time axis
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Number of time samples
    #[arg(long, global = true)]
    t_steps: Option<usize>,
    /// Number of angle samples for fig5
    #[arg(long, global = true)]
    theta_steps: Option<usize>,
    /// How channels occupy the switch slots
    #[arg(long, global = true, value_enum)]
    switch_mode: Option<ModeArg>,
    /// Control post-selection branch
    #[arg(long, global = true, value_enum)]
    branch: Option<BranchArg>,
    /// Output CSV path (stdout if omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

fn config(command: Command, flags: &Flags) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::defaults(command.into());
    if let Some(x) = flags.gamma1 {
        cfg.gamma1 = x;
    }
    if let Some(x) = flags.gamma2 {
        cfg.gamma2 = x;
    }
    if let Some(x) = flags.noise_p {
        cfg.noise_p = x;
    }
    if let Some(x) = flags.t_max {
        cfg.t_max = x;
    }
    if let Some(x) = flags.t_steps {
        cfg.t_steps = x;
    }
    if let Some(x) = flags.theta_steps {
        cfg.theta_steps = x;
    }
    if let Some(m) = flags.switch_mode {
        cfg.switch_mode = match m {
            ModeArg::Static => SwitchMode::Static,
            ModeArg::Timesplit => SwitchMode::TimeSplit,
        };
    }
    if let Some(b) = flags.branch {
        cfg.branch = match b {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        };
    }
    cfg
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let cfg = config(cli.command, &cli.flags);
    let result = run(&cfg).and_then(|table| match &cli.flags.out {
        Some(path) => table.write_to(path),
        None => std::io::stdout()
            .write_all(table.render().as_bytes())
            .map_err(|e| Error::Io {
                path: "<stdout>".into(),
                message: e.to_string(),
            }),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
