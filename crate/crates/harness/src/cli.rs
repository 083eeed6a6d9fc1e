//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use opjensen_core::jensen_checks::{
    ablation_search, replay, AblationResult, AblationTarget, Branch, CheckReport,
};
use opjensen_core::linalg::ToleranceConfig;

use crate::campaign::{run_campaign, CampaignRun};
use crate::config::{CampaignConfig, DimSpec};
use crate::{HarnessError, EXIT_NUMERIC, EXIT_PASS, EXIT_USAGE, EXIT_VIOLATION};

/// Relative agreement required of a replayed witness.
pub const REPLAY_RTOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "opjensen", version, about = "Seeded checks of operator Jensen trace inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a campaign from a JSON config, or the built-in default campaign.
    Campaign {
        #[arg(long)]
        config: Option<PathBuf>,
        /// JSON Lines output; overrides the config's out_path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides the master seed of the config and of OPJENSEN_SEED.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run one check on a single parameter cell.
    Check {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 2)]
        d1: usize,
        #[arg(long, default_value_t = 2)]
        d2: usize,
        /// Catalog name with optional parameters, e.g. `shifted_square:-1`.
        #[arg(long, default_value = "square")]
        function: String,
        #[arg(long, default_value = "ucp_stinespring")]
        map: String,
        #[arg(long, default_value_t = 1.0)]
        w1: f64,
        #[arg(long, default_value_t = 1.0)]
        w2: f64,
        /// `normalized` or `subnormalized`.
        #[arg(long, default_value = "normalized")]
        branch: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Sets both the absolute and the relative tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Search for violations with one hypothesis dropped.
    Search {
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 2)]
        d1: usize,
        #[arg(long, default_value_t = 2)]
        d2: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute a serialized failing report and print its sides.
    Replay {
        #[arg(long)]
        witness: PathBuf,
    },
}

/// Runs the CLI on `argv` (program name first) and returns the process exit code.
/// `env_seed` is the value of OPJENSEN_SEED, if set.
pub fn cli_entry<I, T>(argv: I, env_seed: Option<u64>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, env_seed) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, env_seed: Option<u64>) -> Result<i32, HarnessError> {
    match command {
        Command::Campaign { config, out, jobs, seed } => {
            let mut cfg = match config {
                Some(path) => CampaignConfig::from_path(&path)?,
                None => CampaignConfig::default_campaign(),
            };
            if let Some(s) = seed.or(env_seed) {
                cfg.master_seed = s;
            }
            if out.is_some() {
                cfg.out_path = out;
            }
            finish_campaign(&cfg, jobs)
        }
        Command::Check {
            name,
            d1,
            d2,
            function,
            map,
            w1,
            w2,
            branch,
            seed,
            trials,
            tol,
            out,
            jobs,
        } => {
            let branch = match branch.as_str() {
                "normalized" => Branch::Normalized,
                "subnormalized" => Branch::Subnormalized,
                other => {
                    return Err(HarnessError::Usage(format!(
                        "unknown branch `{other}`; expected normalized or subnormalized"
                    )))
                }
            };
            let tolerances = match tol {
                Some(t) => ToleranceConfig { atol: t, rtol: t, ..ToleranceConfig::default() },
                None => ToleranceConfig::default(),
            };
            let cfg = CampaignConfig {
                checks: vec![name],
                trials,
                dims: vec![DimSpec::Pair(d1, d2)],
                functions: vec![function],
                map_kinds: vec![map],
                weights: vec![(w1, w2)],
                branches: vec![branch],
                master_seed: seed.or(env_seed).unwrap_or(0),
                tolerances,
                out_path: out,
            };
            finish_campaign(&cfg, jobs)
        }
        Command::Search { target, trials, seed, d1, d2, out } => {
            let target = AblationTarget::parse(&target)?;
            let result = ablation_search(target, trials, (d1, d2), seed.or(env_seed).unwrap_or(0))?;
            let text = serde_json::to_string(&result).map_err(std::io::Error::from)?;
            println!("{text}");
            if let Some(path) = out {
                std::fs::write(path, format!("{text}\n"))?;
            }
            Ok(EXIT_PASS)
        }
        Command::Replay { witness } => replay_file(&witness),
    }
}

fn finish_campaign(cfg: &CampaignConfig, jobs: Option<usize>) -> Result<i32, HarnessError> {
    let CampaignRun { summary, .. } = run_campaign(cfg, jobs)?;
    println!(
        "{}",
        serde_json::to_string(&summary).map_err(std::io::Error::from)?
    );
    Ok(if summary.failed > 0 { EXIT_VIOLATION } else { EXIT_PASS })
}

/// Loads a failing [`CheckReport`], or an [`AblationResult`] and its worst report.
pub fn load_witness(path: &Path) -> Result<CheckReport, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    let text = text.trim();
    if let Ok(report) = serde_json::from_str::<CheckReport>(text) {
        return Ok(report);
    }
    match serde_json::from_str::<AblationResult>(text) {
        Ok(AblationResult { witness: Some(report), .. }) => Ok(report),
        Ok(_) => Err(HarnessError::Usage("search result carries no violation witness".into())),
        Err(e) => Err(HarnessError::Usage(format!("{}: not a report: {e}", path.display()))),
    }
}

fn agrees(a: f64, b: f64) -> bool {
    (a - b).abs() <= REPLAY_RTOL * a.abs().max(b.abs()).max(1.0)
}

fn replay_file(path: &Path) -> Result<i32, HarnessError> {
    let original = load_witness(path)?;
    if original.witness.is_none() {
        return Err(HarnessError::Usage(format!(
            "{}: report carries no witness",
            path.display()
        )));
    }
    let again = replay(&original)?;
    println!(
        "check={} lhs={:e} rhs={:e} gap={:e} pass={}",
        again.check_name, again.lhs, again.rhs, again.gap, again.pass
    );
    let reproduced = agrees(original.lhs, again.lhs)
        && agrees(original.rhs, again.rhs)
        && agrees(original.gap, again.gap);
    if reproduced {
        Ok(EXIT_PASS)
    } else {
        eprintln!(
            "replay differs: recorded lhs={:e} rhs={:e} gap={:e}",
            original.lhs, original.rhs, original.gap
        );
        Ok(EXIT_NUMERIC)
    }
}
