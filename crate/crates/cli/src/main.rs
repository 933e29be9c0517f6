//! `relaysel`: SER sweeps, battery runs, policy training and evaluation,
//! noise traces.

mod args;

use args::{Cli, Command, Common};
use clap::Parser;
use relaysel_core::harness::{
    evaluate_policy, run_battery_experiment, run_ser_sweep, run_training, ExperimentConfig, NoiseModel,
    Strategy,
};
use relaysel_core::noise::{generate_awgn, generate_tsmg};
use relaysel_core::rl::{Checkpoint, RlAgent};
use relaysel_core::{substream, Error, Purpose};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DIVERGED: u8 = 3;

enum Failure {
    Config(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::ShapeMismatch(_) | Error::LengthMismatch { .. } | Error::Json(_) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(Error::Io(e))
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Divergence(_) | Error::NetworkDepleted { .. } | Error::NoEligibleRelay | Error::DepletedRelay(_) => {
                    ExitCode::from(EXIT_DIVERGED)
                }
                _ => ExitCode::from(EXIT_RUNTIME),
            }
        }
    }
}

fn config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::parse_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    common.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn writer(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_agent(path: &Path) -> Result<RlAgent, Failure> {
    let cp = Checkpoint::load(path).map_err(|e| Failure::Config(format!("cannot load policy {}: {e}", path.display())))?;
    Ok(RlAgent::from_checkpoint(cp)?)
}

fn save_layout(cfg: &ExperimentConfig, path: Option<&Path>) -> Outcome {
    if let Some(p) = path {
        cfg.layout()?.save(p)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Sweep {
            common,
            out,
            frames_out,
            policy,
            layout_out,
        } => {
            let cfg = config(&common)?;
            let agent = policy.as_deref().map(load_agent).transpose()?;
            if cfg.strategy == Strategy::Rl && agent.is_none() {
                return Err(Failure::Config("strategy rl needs --policy".into()));
            }
            save_layout(&cfg, layout_out.as_deref())?;
            let result = run_ser_sweep(&cfg, agent.as_ref())?;
            result.write_csv(writer(out.as_deref())?)?;
            if let Some(p) = frames_out {
                result.write_frames_csv(cfg.strategy, writer(Some(&p))?)?;
            }
        }
        Command::Battery {
            common,
            ebno,
            num_frames,
            sample_every,
            policy,
            out,
        } => {
            let cfg = config(&common)?;
            let agent = policy.as_deref().map(load_agent).transpose()?;
            if cfg.strategy == Strategy::Rl && agent.is_none() {
                return Err(Failure::Config("strategy rl needs --policy".into()));
            }
            let run = run_battery_experiment(&cfg, ebno, num_frames, sample_every, agent.as_ref())?;
            run.write_csv(writer(out.as_deref())?)?;
            eprintln!(
                "min/max remaining {:.4}, coefficient of variation {:.4}",
                run.min_max_ratio(),
                run.coefficient_of_variation()
            );
        }
        Command::Train {
            common,
            policy_out,
            curve_out,
            last_out,
        } => {
            let cfg = config(&common)?;
            let report = run_training(&cfg)?;
            report.best.to_checkpoint().save(&policy_out)?;
            if let Some(p) = last_out {
                report.last.to_checkpoint().save(p)?;
            }
            report.write_curve_csv(writer(curve_out.as_deref())?)?;
            eprintln!("best validation SER {:.4e}", report.best_eval_ser);
        }
        Command::Eval {
            common,
            policy,
            ebno,
            num_frames,
            out,
        } => {
            let cfg = config(&common)?;
            let agent = load_agent(&policy)?;
            let grid = match ebno {
                Some(e) => vec![e],
                None => cfg.ebno_grid.clone(),
            };
            let frames = num_frames.unwrap_or_else(|| cfg.frames_per_point());
            let rows = grid
                .iter()
                .map(|&e| evaluate_policy(&agent, &cfg, e, frames))
                .collect::<Result<Vec<_>, _>>()?;
            let result = relaysel_core::harness::SweepResult { rows, frames: Vec::new() };
            result.write_csv(writer(out.as_deref())?)?;
        }
        Command::NoiseTrace { common, ebno, len, out } => {
            let cfg = config(&common)?;
            let sigma_g2 = cfg.sigma_g2(ebno);
            let mut rng = substream(cfg.seed, Purpose::RelayStates, 0, 0);
            let trace = match cfg.noise {
                NoiseModel::Tsmg => generate_tsmg(&cfg.tsmg(sigma_g2), len, &mut rng)?,
                NoiseModel::Awgn => generate_awgn(sigma_g2, len, &mut rng)?,
            };
            trace.write_csv(writer(out.as_deref())?)?;
        }
    }
    Ok(())
}
