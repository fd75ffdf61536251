//! `bps`: generate scenarios, play the power game, simulate policies,
//! run oracle suites and compare BPS against eICIC-lite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 IO error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bps_core::runner::{self, Command, Invocation, Suite};
use bps_core::scenario::TimeOfDay;
use bps_core::simulate::Policy;
use bps_core::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bps", version, about = "Team best-reply downlink power setting")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Seed for every random stream of the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for parallel search.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a scenario and write its tables and attenuation tensor.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Scenario TOML; defaults to a 7-cell desk layout.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "time-of-day")]
        time_of_day: Option<TimeOfDay>,
    },
    /// Play the multi-carrier game (or emit a fixed profile) on a scenario.
    Play {
        /// Directory written by `generate`.
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Keep only the N highest-frequency carriers.
        #[arg(long)]
        carriers: Option<usize>,
        /// bps, min or max.
        #[arg(long, default_value = "bps")]
        policy: Policy,
        #[arg(long = "time-of-day")]
        time_of_day: Option<TimeOfDay>,
    },
    /// Simulate one or more power policies and write metrics.csv.
    Simulate {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Comma-separated policies; all four when omitted.
        #[arg(long, value_delimiter = ',')]
        policy: Vec<Policy>,
        #[arg(long = "duration-s", default_value_t = 10.0)]
        duration_s: f64,
        #[arg(long)]
        carriers: Option<usize>,
        /// Repopulate users for this time of day before simulating.
        #[arg(long = "time-of-day")]
        time_of_day: Option<TimeOfDay>,
    },
    /// Run an oracle suite: ne, substitutes, closedform, welfare or fixed.
    Verify {
        suite: Suite,
        #[command(flatten)]
        common: Common,
        /// Number of random cases; suite default when omitted.
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Paired BPS versus eICIC-lite simulations over several seeds.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of consecutive seeds starting at --seed.
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long = "duration-s", default_value_t = 10.0)]
        duration_s: f64,
        #[arg(long = "time-of-day")]
        time_of_day: Option<TimeOfDay>,
    },
    /// Re-run the command recorded in a manifest into a new directory.
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn absolute(p: &Path) -> std::io::Result<PathBuf> {
    std::path::absolute(p)
}

fn base(command: Command, common: &Common) -> std::io::Result<Invocation> {
    let mut inv = Invocation::new(command, absolute(&common.out)?);
    inv.seed = common.seed;
    inv.threads = common.threads;
    Ok(inv)
}

fn invocation(cmd: Cmd) -> std::io::Result<Result<Invocation, (PathBuf, PathBuf)>> {
    let inv = match cmd {
        Cmd::Generate { common, config, time_of_day } => {
            let mut inv = base(Command::Generate, &common)?;
            inv.config = config.as_deref().map(absolute).transpose()?;
            inv.time_of_day = time_of_day;
            inv
        }
        Cmd::Play { scenario, common, carriers, policy, time_of_day } => {
            let mut inv = base(Command::Play, &common)?;
            inv.input = Some(absolute(&scenario)?);
            inv.carriers = carriers;
            inv.policies = vec![policy];
            inv.time_of_day = time_of_day;
            inv
        }
        Cmd::Simulate { scenario, common, policy, duration_s, carriers, time_of_day } => {
            let mut inv = base(Command::Simulate, &common)?;
            inv.input = Some(absolute(&scenario)?);
            inv.policies = policy;
            inv.duration_s = duration_s;
            inv.carriers = carriers;
            inv.time_of_day = time_of_day;
            inv
        }
        Cmd::Verify { suite, common, cases } => {
            let mut inv = base(Command::Verify, &common)?;
            inv.suite = Some(suite);
            inv.cases = cases;
            inv
        }
        Cmd::Compare { common, config, seeds, duration_s, time_of_day } => {
            let mut inv = base(Command::Compare, &common)?;
            inv.config = config.as_deref().map(absolute).transpose()?;
            inv.seeds = seeds;
            inv.duration_s = duration_s;
            inv.time_of_day = time_of_day;
            inv
        }
        Cmd::Replay { manifest, out } => return Ok(Err((manifest, absolute(&out)?))),
    };
    Ok(Ok(inv))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Csv(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match invocation(cli.command) {
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
        Ok(Ok(inv)) => runner::execute(&inv),
        Ok(Err((manifest, out))) => runner::replay(&manifest, &out),
    };
    match result {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            for (k, v) in &summary.facts {
                println!("{k} = {v}");
            }
            match summary.verified {
                Some(false) => {
                    eprintln!("verification failed");
                    ExitCode::from(1)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
