use std::fs;
use std::path::Path;

use carleman_core::par;
use carleman_core::suite::{checks_csv, run_stage, Stage, StageOutput, SuiteConfig};
use serde::Serialize;

use crate::args::{Cli, Command, Regime};
use crate::error::CliError;

pub const WORKERS_ENV: &str = "CARLEMAN_WORKERS";

/// Everything a run used, echoed to manifest.json.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub subcommand: &'a str,
    pub version: &'a str,
    pub seed: u64,
    pub workers: usize,
    pub parallel: bool,
    pub stages: Vec<&'static str>,
    pub config: &'a SuiteConfig,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    subcommand: &'a str,
    pass: bool,
    stages: &'a [StageOutput],
}

fn load_config(path: Option<&Path>) -> Result<SuiteConfig, CliError> {
    let Some(p) = path else {
        return Ok(SuiteConfig::default());
    };
    let text = fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
}

fn workers(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(w) = flag {
        return Ok(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{WORKERS_ENV} must be a worker count, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

/// Applies flags on top of the file configuration and picks the stages.
pub fn resolve(cli: &Cli) -> Result<(SuiteConfig, Vec<Stage>), CliError> {
    let mut cfg = load_config(cli.common.config.as_deref())?;
    if let Some(s) = cli.common.seed {
        cfg.seed = s;
    }
    cfg.carleman_beta_neg.sweep.seed = cfg.seed;
    cfg.carleman_beta_zero.sweep.seed = cfg.seed;
    if let Some(p) = cli.common.panels {
        cfg.carleman_beta_neg.sweep.panels = p;
        cfg.carleman_beta_zero.sweep.panels = p;
    }
    let stages = match &cli.command {
        Command::VerifyDecomposition { points } => {
            if let Some(p) = points {
                cfg.decomposition.points = *p;
            }
            vec![Stage::VerifyDecomposition]
        }
        Command::VerifyIdentities { ids, trials } => {
            if let Some(ids) = ids {
                cfg.identities.ids = ids.clone();
            }
            if let Some(t) = trials {
                cfg.identities.trials = *t;
            }
            vec![Stage::VerifyIdentities]
        }
        Command::VerifyPointwise { fields } => {
            if let Some(f) = fields {
                cfg.pointwise.lemma_fields = *f;
            }
            vec![Stage::VerifyPointwise]
        }
        Command::CarlemanSweep { regime, lambda, mu, fields } => {
            let (st, stage) = match regime {
                Regime::BetaNeg => (&mut cfg.carleman_beta_neg, Stage::CarlemanBetaNeg),
                Regime::BetaZero => (&mut cfg.carleman_beta_zero, Stage::CarlemanBetaZero),
            };
            if let Some(l) = lambda {
                st.sweep.lambdas = l.clone();
            }
            if let Some(m) = mu {
                st.sweep.mus = m.clone();
            }
            if let Some(f) = fields {
                st.sweep.fields = *f;
            }
            vec![stage]
        }
        Command::PlateDecay { modes, horizon } => {
            if let Some(n) = modes {
                cfg.decay.modes = *n;
                cfg.decay.refined_modes = 2 * n;
            }
            if let Some(t) = horizon {
                cfg.decay.horizon = *t;
            }
            vec![Stage::PlateDecay]
        }
        Command::PlateResolvent { modes, gamma_max, samples } => {
            if let Some(n) = modes {
                cfg.resolvent.modes = *n;
                cfg.resolvent.refined_modes = 2 * n;
            }
            if let Some(g) = gamma_max {
                cfg.resolvent.gamma_max = *g;
            }
            if let Some(s) = samples {
                cfg.resolvent.samples = *s;
            }
            vec![Stage::PlateResolvent]
        }
        Command::HumControl { modes, epsilon, horizon } => {
            if let Some(n) = modes {
                cfg.control.problem.modes = *n;
            }
            if let Some(e) = epsilon {
                cfg.control.problem.epsilon = *e;
            }
            if let Some(t) = horizon {
                cfg.control.problem.horizon = *t;
            }
            vec![Stage::HumControl]
        }
        Command::All => Stage::ALL.to_vec(),
    };
    cfg.validate()?;
    Ok((cfg, stages))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Runs the command and writes its artifacts; returns whether every check
/// passed.
pub fn execute(cli: &Cli) -> Result<bool, CliError> {
    let (cfg, stages) = resolve(cli)?;
    let nworkers = workers(cli.common.workers)?;
    let out = &cli.common.out;
    fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.display().to_string(),
        source,
    })?;
    let manifest = Manifest {
        subcommand: cli.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        workers: nworkers,
        parallel: cfg!(feature = "parallel"),
        stages: stages.iter().map(|s| s.name()).collect(),
        config: &cfg,
    };
    write(out, "manifest.json", &serde_json::to_string_pretty(&manifest)?)?;

    let outputs = par::with_workers(nworkers, || {
        stages.iter().map(|&s| run_stage(s, &cfg)).collect::<Result<Vec<_>, _>>()
    })?;
    let pass = outputs.iter().all(|o| o.pass());
    let results = match (&cli.command, outputs.as_slice()) {
        (Command::All, _) => {
            for o in &outputs {
                if let Some(t) = &o.table {
                    write(out, &format!("{}.csv", o.stage.name()), t)?;
                }
            }
            checks_csv(&outputs)
        }
        (_, [one]) => one.table.clone().unwrap_or_else(|| checks_csv(&outputs)),
        _ => checks_csv(&outputs),
    };
    write(out, "results.csv", &results)?;
    let summary = Summary {
        subcommand: cli.command.name(),
        pass,
        stages: &outputs,
    };
    write(out, "summary.json", &serde_json::to_string_pretty(&summary)?)?;
    for o in &outputs {
        for c in &o.checks {
            eprintln!(
                "[{}] {:<12} {:<36} {:>12.4e} (threshold {:.3e})",
                if c.pass { "PASS" } else { "FAIL" },
                o.stage.name(),
                c.name,
                c.value,
                c.threshold
            );
        }
    }
    Ok(pass)
}
