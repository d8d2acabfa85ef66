use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::{usage, CliError};

#[derive(Parser, Debug)]
#[command(
    name = "he",
    version,
    about = "Floor-orbit ergodic averages: exponential sums, variation norms, jump counts and arc decompositions",
    long_about = None
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Common {
    /// JSON file with parameters; command-line flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for every randomized step [default: 0]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Worker threads (0 or unset: all cores); output does not depend on it
    #[arg(long, global = true, env = "HE_THREADS")]
    pub threads: Option<String>,
    /// Output format [default: csv, json for `variation`]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Scan |m_N(xi)| of the upper-half average over a jittered frequency grid,
    /// flagging points inside the major-arc box of width 2^l/|P_i(N)|
    #[command(name = "expsum-scan")]
    ExpsumScan(ScanArgs),
    /// r-variation norm (and optional jump counts) of a sequence of values
    Variation(VariationArgs),
    /// Jump counts of the averages m_N(xi) over lacunary or all scales,
    /// with a log-log fit of count against delta
    Jumps(JumpsArgs),
    /// Fraction of a torus-rotation orbit along floor(P(n)) that lands in a
    /// product of arcs, at each requested scale
    Equi(EquiArgs),
    /// Norm ratio of the averaging operator on random functions with
    /// frequencies removed from the major-arc box, or (with --lattice) the
    /// major-arc projection of a stored lattice function
    Arcs(ArcsArgs),
    /// Floor orbits floor(P_i(n)) for n = 1..nmax, with the family's class
    Orbit(OrbitArgs),
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Hardy functions separated by ';', e.g. "t^1.5; 2*t^2.5*log^1"
    #[arg(long)]
    pub family: Option<String>,
    /// Scale N
    #[arg(long = "N")]
    pub n: Option<String>,
    /// Major-arc exponent l
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<String>,
    /// Grid points per dimension (at least 8)
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Args, Debug)]
pub struct VariationArgs {
    /// Comma-separated values; complex entries as re:im
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
    /// Comma-separated strictly increasing indices [default: 1, 2, ...]
    #[arg(long)]
    pub indices: Option<String>,
    /// Variation exponent r >= 1 [default: 2]
    #[arg(long)]
    pub r: Option<String>,
    /// Comma-separated jump sizes to count
    #[arg(long)]
    pub deltas: Option<String>,
}

#[derive(Args, Debug)]
pub struct JumpsArgs {
    #[arg(long)]
    pub family: Option<String>,
    /// Frequency vector, comma-separated
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    /// Lacunarity; without it every scale up to nmax is used
    #[arg(long)]
    pub lambda: Option<String>,
    /// Largest scale
    #[arg(long)]
    pub nmax: Option<String>,
    /// Comma-separated jump sizes
    #[arg(long)]
    pub deltas: Option<String>,
    /// Variation exponent r > 2 reported alongside [default: 3]
    #[arg(long)]
    pub r: Option<String>,
}

#[derive(Args, Debug)]
pub struct EquiArgs {
    #[arg(long)]
    pub family: Option<String>,
    /// Rotation amounts, comma-separated
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: Option<String>,
    /// Integer observable frequencies, comma-separated [default: 1, ...]
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Starting point [default: origin]
    #[arg(long)]
    pub x0: Option<String>,
    /// One arc lo:hi per dimension, comma-separated, e.g. "0:0.25"
    #[arg(long)]
    pub arcs: Option<String>,
    /// Comma-separated increasing scales [default: nmax]
    #[arg(long)]
    pub scales: Option<String>,
    #[arg(long)]
    pub nmax: Option<String>,
}

#[derive(Args, Debug)]
pub struct ArcsArgs {
    #[arg(long)]
    pub family: Option<String>,
    /// Scale N, or comma-separated scales
    #[arg(long = "N")]
    pub n: Option<String>,
    /// Box exponent l, or comma-separated exponents
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<String>,
    /// Per-dimension grid size, a power of two [default: 256]
    #[arg(long)]
    pub grid: Option<String>,
    /// Random trials per (N, l), at least 8 [default: 32]
    #[arg(long)]
    pub trials: Option<String>,
    /// Binary lattice file to project onto the major arcs instead
    #[arg(long, value_name = "FILE")]
    pub lattice: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub nmax: Option<String>,
}

/// Flag values backed by the optional config file.
pub struct Params {
    file: BTreeMap<String, Value>,
    seed: Option<String>,
    threads: Option<String>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

const CONFIG_KEYS: &[&str] = &[
    "family", "N", "l", "grid", "lambda", "nmax", "n_max", "deltas", "r", "xi", "alphas", "beta", "x0", "arcs",
    "scales", "values", "indices", "trials", "seed", "threads", "format", "out",
];

impl Params {
    pub fn new(cli: &Cli) -> Result<Self, CliError> {
        let file = match &cli.common.config {
            None => BTreeMap::new(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
                let v: Value = serde_json::from_str(&text)
                    .map_err(|e| usage(format!("config {} is not JSON: {e}", path.display())))?;
                let Value::Object(map) = v else {
                    return Err(usage("config must be a JSON object"));
                };
                if let Some(k) = map.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
                    return Err(usage(format!("unknown config key '{k}'")));
                }
                map.into_iter().collect()
            }
        };
        Ok(Self {
            file,
            seed: cli.common.seed.clone(),
            threads: cli.common.threads.clone(),
            format: cli.common.format,
            out: cli.common.out.clone(),
        })
    }

    /// The flag if given, else the config entry rendered as flag text.
    pub fn raw(&self, flag: &Option<String>, key: &str) -> Option<String> {
        if let Some(v) = flag {
            return Some(v.clone());
        }
        let v = self
            .file
            .get(key)
            .or_else(|| if key == "nmax" { self.file.get("n_max") } else { None })?;
        let sep = if key == "family" { ";" } else { "," };
        Some(render(v, sep))
    }

    pub fn get<T: FromStr>(&self, flag: &Option<String>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(flag, key)
            .map(|s| {
                s.trim()
                    .parse::<T>()
                    .map_err(|e| usage(format!("invalid --{key} '{s}': {e}")))
            })
            .transpose()
    }

    pub fn require<T: FromStr>(&self, flag: &Option<String>, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(flag, key)?
            .ok_or_else(|| usage(format!("missing required --{key}")))
    }

    pub fn list<T: FromStr>(&self, flag: &Option<String>, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(flag, key).map(|s| parse_list(&s, key)).transpose()
    }

    pub fn require_list<T: FromStr>(&self, flag: &Option<String>, key: &str) -> Result<Vec<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.list(flag, key)?
            .ok_or_else(|| usage(format!("missing required --{key}")))
    }

    pub fn family(&self, flag: &Option<String>) -> Result<Vec<he_core::hardy::HardyFunction>, CliError> {
        let s = self
            .raw(flag, "family")
            .ok_or_else(|| usage("missing required --family"))?;
        he_core::hardy::parse_family(&s).map_err(|e| usage(format!("invalid --family '{s}': {e}")))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        Ok(self.get(&self.seed, "seed")?.unwrap_or(0))
    }

    pub fn threads(&self) -> Result<Option<usize>, CliError> {
        self.get(&self.threads, "threads")
    }

    pub fn format(&self, default: Format) -> Result<Format, CliError> {
        if let Some(f) = self.format {
            return Ok(f);
        }
        match self.raw(&None, "format").as_deref() {
            None => Ok(default),
            Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(other) => Err(usage(format!("invalid format '{other}' (csv or json)"))),
        }
    }

    pub fn out(&self) -> Result<Option<PathBuf>, CliError> {
        Ok(self.out.clone().or_else(|| self.raw(&None, "out").map(PathBuf::from)))
    }
}

fn render(v: &Value, sep: &str) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(|x| render(x, ",")).collect::<Vec<_>>().join(sep),
        other => other.to_string(),
    }
}

pub fn parse_list<T: FromStr>(s: &str, key: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|e| usage(format!("invalid entry '{tok}' in --{key}: {e}")))
        })
        .collect()
}
