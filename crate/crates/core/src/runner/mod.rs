//! Batch commands behind the `bps` binary. Every command writes CSV outputs
//! and a plain-text `manifest.txt` from which it can be replayed.

mod manifest;
mod verify;

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use statrs::distribution::{Binomial, DiscreteCDF};

use crate::game::{write_trace_csv, Game, GameParams};
use crate::propagation::{build_attenuation_tensor, AttenuationTensor};
use crate::scenario::{
    build_scenario, export_scenario, import_scenario, populate_ues, Scenario, ScenarioConfig, TimeOfDay,
};
use crate::simulate::{run_simulation, write_metrics_csv, MetricsReport, Policy, SimConfig};
use crate::{Error, Result};

pub use manifest::{Command, Invocation, RunManifest, MANIFEST_FILE};
pub use verify::{
    random_toy_game, run_suite, verify_closed_form, verify_fixed, verify_ne, verify_substitutes, verify_welfare,
    CheckRow, Suite, VerifyReport, GRID_POINTS, SWEEP_POINTS,
};

/// What a finished command reports back to the caller.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunSummary {
    /// `Some(false)` when a verification or comparison failed its check.
    pub verified: Option<bool>,
    pub warnings: Vec<String>,
    /// Key/value facts also written to the manifest.
    pub facts: Vec<(String, String)>,
}

/// Runs an invocation, optionally on a bounded thread pool, then writes the
/// manifest next to its outputs.
pub fn execute(inv: &Invocation) -> Result<RunSummary> {
    std::fs::create_dir_all(&inv.out)?;
    let summary = match inv.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            pool.install(|| dispatch(inv))?
        }
        None => dispatch(inv)?,
    };
    RunManifest::new(inv.clone(), summary.facts.clone()).write(&inv.out)?;
    Ok(summary)
}

/// Re-runs the invocation recorded in `manifest_path`, writing into `out`.
pub fn replay(manifest_path: &Path, out: &Path) -> Result<RunSummary> {
    let manifest = RunManifest::read(manifest_path)?;
    let mut inv = manifest.invocation;
    inv.out = out.to_path_buf();
    execute(&inv)
}

fn dispatch(inv: &Invocation) -> Result<RunSummary> {
    match inv.command {
        Command::Generate => cmd_generate(inv),
        Command::Play => cmd_play(inv),
        Command::Simulate => cmd_simulate(inv),
        Command::Verify => cmd_verify(inv),
        Command::Compare => cmd_compare(inv),
    }
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig> {
    match path {
        Some(p) => ScenarioConfig::from_path(p),
        None => Ok(ScenarioConfig::desk(7, 50.0)),
    }
}

/// Builds, populates and attenuates a scenario from a configuration.
pub fn generate_scenario(
    config: &ScenarioConfig,
    time_of_day: TimeOfDay,
    seed: u64,
) -> Result<(Scenario, AttenuationTensor)> {
    let s = build_scenario(config, seed)?;
    let s = populate_ues(&s, time_of_day, seed);
    let t = build_attenuation_tensor(&s, s.propagation(), seed)?;
    Ok((s, t))
}

/// File holding the attenuation tensor inside a scenario directory.
pub const ATTENUATION_FILE: &str = "attenuation.csv";

pub fn save_scenario_dir(scenario: &Scenario, tensor: &AttenuationTensor, dir: &Path) -> Result<()> {
    export_scenario(scenario, dir)?;
    let mut w = BufWriter::new(File::create(dir.join(ATTENUATION_FILE))?);
    tensor.write_csv(&mut w)?;
    Ok(())
}

pub fn load_scenario_dir(dir: &Path) -> Result<(Scenario, AttenuationTensor)> {
    let s = import_scenario(dir)?;
    let dims = (s.locations().len(), s.tiles().len(), s.carriers().len());
    let t = AttenuationTensor::read_csv(File::open(dir.join(ATTENUATION_FILE))?, dims)?;
    Ok((s, t))
}

/// Keeps the `n` highest-frequency carriers, in their original order.
pub fn restrict_carriers(
    scenario: &Scenario,
    tensor: &AttenuationTensor,
    n: usize,
) -> Result<(Scenario, AttenuationTensor)> {
    let nc = scenario.carriers().len();
    if n == 0 || n > nc {
        return Err(Error::InvalidInput(format!("--carriers must be in 1..={nc}, got {n}")));
    }
    let mut keep = scenario.carriers_by_descending_frequency()[..n].to_vec();
    keep.sort_unstable();
    let mut parts = scenario.parts().clone();
    parts.carriers = keep.iter().map(|&c| scenario.carriers()[c].clone()).collect();
    let s = Scenario::from_parts(parts)?;
    let (nl, nz, _) = tensor.dims();
    let mut data = Vec::with_capacity(nl * nz * n);
    for l in 0..nl {
        for z in 0..nz {
            for &c in &keep {
                data.push(tensor.get(l, z, c));
            }
        }
    }
    let t = AttenuationTensor::from_vec(nl, nz, n, data)?;
    Ok((s, t))
}

fn input_dir(inv: &Invocation) -> Result<&Path> {
    inv.input
        .as_deref()
        .ok_or_else(|| Error::InvalidInput(format!("`{}` needs a scenario directory", inv.command.as_str())))
}

fn load_input(inv: &Invocation) -> Result<(Scenario, AttenuationTensor)> {
    let (mut s, mut t) = load_scenario_dir(input_dir(inv)?)?;
    if let Some(tod) = inv.time_of_day {
        if tod != s.time_of_day() {
            s = populate_ues(&s, tod, inv.seed);
        }
    }
    if let Some(n) = inv.carriers {
        (s, t) = restrict_carriers(&s, &t, n)?;
    }
    Ok((s, t))
}

/// `generate`: scenario tables, `scenario.toml` and the attenuation tensor.
pub fn cmd_generate(inv: &Invocation) -> Result<RunSummary> {
    let config = load_config(inv.config.as_deref())?;
    let (s, t) = generate_scenario(&config, inv.time_of_day.unwrap_or_default(), inv.seed)?;
    save_scenario_dir(&s, &t, &inv.out)?;
    Ok(RunSummary {
        facts: vec![
            ("locations".into(), s.locations().len().to_string()),
            ("tiles".into(), s.tiles().len().to_string()),
            ("teams".into(), s.teams().len().to_string()),
            ("ues".into(), s.total_ues().to_string()),
        ],
        ..RunSummary::default()
    })
}

/// `play`: `strategy.csv`, plus `trace.csv` when the game is played.
pub fn cmd_play(inv: &Invocation) -> Result<RunSummary> {
    let (s, t) = load_input(inv)?;
    let policy = match inv.policies.as_slice() {
        [] => Policy::Bps,
        [p] => *p,
        _ => return Err(Error::InvalidInput("`play` takes a single policy".into())),
    };
    let g = Game::new(&s, &t, GameParams::defaults_for(&s))?;
    let mut summary = RunSummary::default();
    let (profile, prices) = match policy {
        Policy::Bps => {
            let out = g.run_multi_carrier_game()?;
            write_trace_csv(&out.trace, BufWriter::new(File::create(inv.out.join("trace.csv"))?))?;
            summary.facts.push(("converged".into(), out.converged.to_string()));
            summary.facts.push(("iterations".into(), out.iterations.to_string()));
            summary.facts.push(("evaluations".into(), out.evaluations().to_string()));
            if !out.converged {
                summary.warnings.push("best-reply dynamics hit the round limit before converging".into());
            }
            (out.profile, out.prices)
        }
        Policy::MaxPower | Policy::EicicLite => {
            let p = g.max_power_profile();
            let prices = g.compute_prices(&g.min_power_profile())?;
            (p, prices)
        }
        Policy::MinPower => {
            let p = g.min_power_profile();
            let prices = g.compute_prices(&p)?;
            (p, prices)
        }
    };
    profile.write_csv(&s, BufWriter::new(File::create(inv.out.join("strategy.csv"))?))?;
    summary.facts.push(("policy".into(), policy.to_string()));
    summary.facts.push(("welfare".into(), g.welfare(&profile, &prices)?.to_string()));
    summary.facts.push(("total_radiated_w".into(), profile.total_radiated_w(&s).to_string()));
    Ok(summary)
}

fn policies_or_all(inv: &Invocation) -> Vec<Policy> {
    if inv.policies.is_empty() {
        Policy::ALL.to_vec()
    } else {
        inv.policies.clone()
    }
}

/// `simulate`: one `metrics.csv` covering every requested policy.
pub fn cmd_simulate(inv: &Invocation) -> Result<RunSummary> {
    let (s, t) = load_input(inv)?;
    let cfg = SimConfig::new(inv.duration_s);
    let mut reports = Vec::new();
    let mut summary = RunSummary::default();
    for policy in policies_or_all(inv) {
        let r = run_simulation(&s, &t, policy, &cfg, inv.seed)?;
        if r.game_converged == Some(false) {
            summary.warnings.push(format!("{policy}: power game did not converge"));
        }
        reports.push(r);
    }
    write_metrics_csv(&reports, BufWriter::new(File::create(inv.out.join("metrics.csv"))?))?;
    summary.facts.push(("policies".into(), reports.len().to_string()));
    Ok(summary)
}

/// `verify`: `verify.csv`; the summary fails when any enforced row fails.
pub fn cmd_verify(inv: &Invocation) -> Result<RunSummary> {
    let suite = inv
        .suite
        .ok_or_else(|| Error::InvalidInput("`verify` needs a suite".into()))?;
    let cases = inv.cases.unwrap_or(suite.default_cases());
    let report = run_suite(suite, cases, inv.seed)?;
    report.write_csv(BufWriter::new(File::create(inv.out.join("verify.csv"))?))?;
    Ok(RunSummary {
        verified: Some(report.passed()),
        facts: vec![
            ("checks".into(), report.rows.len().to_string()),
            ("violations".into(), report.violations().to_string()),
        ],
        ..RunSummary::default()
    })
}

/// Paired BPS against eICIC-lite outcome for one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedRun {
    pub seed: u64,
    pub bps: MetricsReport,
    pub eicic: MetricsReport,
}

/// One-sided sign test on paired differences: wins, non-tied pairs and
/// `P(X >= wins)` for `X ~ Binomial(n, 1/2)`.
pub fn sign_test(differences: &[f64]) -> (usize, usize, f64) {
    let wins = differences.iter().filter(|d| **d > 0.0).count();
    let n = differences.iter().filter(|d| **d != 0.0).count();
    if n == 0 {
        return (0, 0, 1.0);
    }
    let b = Binomial::new(0.5, n as u64).expect("valid binomial");
    let p = if wins == 0 { 1.0 } else { b.sf(wins as u64 - 1) };
    (wins, n, p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub runs: Vec<PairedRun>,
    pub energy_efficiency: (usize, usize, f64),
    pub throughput: (usize, usize, f64),
}

impl Comparison {
    /// BPS ahead on both metrics with sign-test p below `alpha`.
    pub fn bps_ahead(&self, alpha: f64) -> bool {
        self.energy_efficiency.2 < alpha && self.throughput.2 < alpha
    }
}

/// Builds a fresh scenario per seed and simulates BPS and eICIC-lite on it.
pub fn compare_policies(
    config: &ScenarioConfig,
    time_of_day: TimeOfDay,
    seeds: &[u64],
    duration_s: f64,
) -> Result<Comparison> {
    let cfg = SimConfig::new(duration_s);
    let mut runs = Vec::new();
    for &seed in seeds {
        let (s, t) = generate_scenario(config, time_of_day, seed)?;
        let bps = run_simulation(&s, &t, Policy::Bps, &cfg, seed)?;
        let eicic = run_simulation(&s, &t, Policy::EicicLite, &cfg, seed)?;
        runs.push(PairedRun { seed, bps, eicic });
    }
    let ee: Vec<f64> = runs
        .iter()
        .map(|r| r.bps.micro_tier.energy_efficiency() - r.eicic.micro_tier.energy_efficiency())
        .collect();
    let tp: Vec<f64> = runs
        .iter()
        .map(|r| r.bps.mean_ue_throughput_bps - r.eicic.mean_ue_throughput_bps)
        .collect();
    Ok(Comparison {
        runs,
        energy_efficiency: sign_test(&ee),
        throughput: sign_test(&tp),
    })
}

/// Significance level of the comparison's sign tests.
pub const COMPARE_ALPHA: f64 = 0.05;

/// `compare`: `compare.csv` (paired per-seed values) and `metrics.csv`.
pub fn cmd_compare(inv: &Invocation) -> Result<RunSummary> {
    let config = load_config(inv.config.as_deref())?;
    let seeds: Vec<u64> = (0..inv.seeds.max(1) as u64).map(|k| inv.seed.wrapping_add(k)).collect();
    let cmp = compare_policies(&config, inv.time_of_day.unwrap_or_default(), &seeds, inv.duration_s)?;

    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(inv.out.join("compare.csv"))?));
    w.write_record(["seed", "metric", "bps", "eicic", "difference"])?;
    for r in &cmp.runs {
        for (metric, b, e) in [
            ("micro_energy_efficiency_bits_per_j", r.bps.micro_tier.energy_efficiency(), r.eicic.micro_tier.energy_efficiency()),
            ("mean_ue_throughput_bps", r.bps.mean_ue_throughput_bps, r.eicic.mean_ue_throughput_bps),
        ] {
            w.write_record(&[r.seed.to_string(), metric.to_string(), b.to_string(), e.to_string(), (b - e).to_string()])?;
        }
    }
    w.flush()?;
    let reports: Vec<MetricsReport> = cmp.runs.iter().flat_map(|r| [r.bps.clone(), r.eicic.clone()]).collect();
    write_metrics_csv(&reports, BufWriter::new(File::create(inv.out.join("metrics.csv"))?))?;

    let fmt = |(w, n, p): (usize, usize, f64)| format!("{w}/{n} p={p:.4}");
    Ok(RunSummary {
        verified: Some(cmp.bps_ahead(COMPARE_ALPHA)),
        facts: vec![
            ("seeds".into(), seeds.len().to_string()),
            ("sign_test_micro_energy_efficiency".into(), fmt(cmp.energy_efficiency)),
            ("sign_test_mean_ue_throughput".into(), fmt(cmp.throughput)),
        ],
        ..RunSummary::default()
    })
}

/// Paths a command writes, relative to its output directory.
pub fn outputs_of(command: Command) -> &'static [&'static str] {
    match command {
        Command::Generate => &["tiles.csv", "locations.csv", "scenario.toml", ATTENUATION_FILE],
        Command::Play => &["strategy.csv", "trace.csv"],
        Command::Simulate => &["metrics.csv"],
        Command::Verify => &["verify.csv"],
        Command::Compare => &["compare.csv", "metrics.csv"],
    }
}

