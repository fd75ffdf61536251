use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use super::Suite;
use crate::scenario::TimeOfDay;
use crate::simulate::Policy;
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Play,
    Simulate,
    Verify,
    Compare,
}

impl Command {
    pub const ALL: [Command; 5] = [Command::Generate, Command::Play, Command::Simulate, Command::Verify, Command::Compare];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Play => "play",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
            Command::Compare => "compare",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Everything a command needs; also what the manifest records.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub command: Command,
    pub config: Option<PathBuf>,
    /// Scenario directory read by `play` and `simulate`.
    pub input: Option<PathBuf>,
    pub seed: u64,
    pub out: PathBuf,
    pub carriers: Option<usize>,
    pub policies: Vec<Policy>,
    pub duration_s: f64,
    pub time_of_day: Option<TimeOfDay>,
    pub threads: Option<usize>,
    pub suite: Option<Suite>,
    pub cases: Option<usize>,
    /// Seeds used by `compare`.
    pub seeds: usize,
}

impl Invocation {
    pub fn new(command: Command, out: impl Into<PathBuf>) -> Self {
        Self {
            command,
            config: None,
            input: None,
            seed: 0,
            out: out.into(),
            carriers: None,
            policies: Vec::new(),
            duration_s: 10.0,
            time_of_day: None,
            threads: None,
            suite: None,
            cases: None,
            seeds: 10,
        }
    }
}

/// Plain-text `key = value` record written next to every output set.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub invocation: Invocation,
    pub version: String,
    pub timestamp_unix_s: u64,
    /// Outcome facts such as convergence; not needed for replay.
    pub facts: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(invocation: Invocation, facts: Vec<(String, String)>) -> Self {
        Self {
            invocation,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            facts,
        }
    }

    pub fn to_text(&self) -> String {
        let inv = &self.invocation;
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("command", inv.command.as_str().into());
        line("version", self.version.clone());
        line("timestamp_unix_s", self.timestamp_unix_s.to_string());
        line("seed", inv.seed.to_string());
        line("out", inv.out.display().to_string());
        if let Some(p) = &inv.config {
            line("config", p.display().to_string());
        }
        if let Some(p) = &inv.input {
            line("input", p.display().to_string());
        }
        if let Some(c) = inv.carriers {
            line("carriers", c.to_string());
        }
        if !inv.policies.is_empty() {
            line(
                "policy",
                inv.policies.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(","),
            );
        }
        line("duration_s", inv.duration_s.to_string());
        if let Some(t) = inv.time_of_day {
            line("time_of_day", t.as_str().into());
        }
        if let Some(t) = inv.threads {
            line("threads", t.to_string());
        }
        if let Some(s) = inv.suite {
            line("suite", s.as_str().into());
        }
        if let Some(c) = inv.cases {
            line("cases", c.to_string());
        }
        line("seeds", inv.seeds.to_string());
        for (k, v) in &self.facts {
            line(&format!("result.{k}"), v.clone());
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(MANIFEST_FILE), self.to_text())?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let perr = |m: String| Error::Parse {
            file: MANIFEST_FILE.into(),
            message: m,
        };
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Parse {
                file: MANIFEST_FILE.into(),
                message: format!("bad value `{v}` for `{key}`"),
            })
        }
        let mut command = None;
        let mut inv = Invocation::new(Command::Generate, PathBuf::new());
        let mut version = String::new();
        let mut timestamp = 0;
        let mut facts = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let (k, v) = raw
                .split_once(" = ")
                .ok_or_else(|| perr(format!("line {}: expected `key = value`", n + 1)))?;
            match k {
                "command" => command = Some(v.parse::<Command>().map_err(perr)?),
                "version" => version = v.to_string(),
                "timestamp_unix_s" => timestamp = num(k, v)?,
                "seed" => inv.seed = num(k, v)?,
                "out" => inv.out = PathBuf::from(v),
                "config" => inv.config = Some(PathBuf::from(v)),
                "input" => inv.input = Some(PathBuf::from(v)),
                "carriers" => inv.carriers = Some(num(k, v)?),
                "policy" => {
                    inv.policies = v
                        .split(',')
                        .map(|p| p.parse::<Policy>().map_err(perr))
                        .collect::<Result<_>>()?
                }
                "duration_s" => inv.duration_s = num(k, v)?,
                "time_of_day" => inv.time_of_day = Some(v.parse::<TimeOfDay>().map_err(perr)?),
                "threads" => inv.threads = Some(num(k, v)?),
                "suite" => inv.suite = Some(v.parse::<Suite>().map_err(perr)?),
                "cases" => inv.cases = Some(num(k, v)?),
                "seeds" => inv.seeds = num(k, v)?,
                other => match other.strip_prefix("result.") {
                    Some(key) => facts.push((key.to_string(), v.to_string())),
                    None => return Err(perr(format!("unknown key `{other}`"))),
                },
            }
        }
        inv.command = command.ok_or_else(|| perr("missing `command`".into()))?;
        Ok(Self {
            invocation: inv,
            version,
            timestamp_unix_s: timestamp,
            facts,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
