//! The `macaevlab` batch front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 violated invariant or rejected
//! certificate, 3 resource cap, 64 usage or precondition error.

pub mod cache;
mod commands;

use crate::error::Error;
use crate::groups::{GroupSpec, DEFAULT_BALL_CAP};
use crate::kphi::{Action, Method};
use crate::norms::NormingFunction;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub use cache::{cache_key, cache_path, load_ball, load_or_build, save_ball, BallSource};

/// Environment variable naming the ball cache directory.
pub const CACHE_ENV: &str = "MACAEVLAB_CACHE";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser, Serialize)]
#[command(name = "macaevlab", version, about = "Minimax bounds for rearrangement-invariant norms on Cayley balls")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Ball cache directory (falls back to $MACAEVLAB_CACHE).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Largest ball (in elements) any command may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_BALL_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub ball_cap: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Evaluate a norm on a file of values.
    Norm(NormArgs),
    /// Certified lower and optimized upper bounds on c_Φ(G, K, R).
    Estimate(EstimateArgs),
    /// Build or validate a dual certificate.
    Certify(CertifyArgs),
    /// Push a lower bound through a Lipschitz injection.
    Transfer(TransferArgs),
    /// Schedule, tree commutators, tensor orbit and diagonal bound.
    Counterexample(CounterexampleArgs),
    /// Compare commutator singular values with left differences.
    Crosscheck(CrosscheckArgs),
}

fn parse_phi(s: &str) -> Result<NormingFunction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_group(s: &str) -> Result<GroupSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_action(s: &str) -> Result<Action, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

mod as_string {
    use serde::Serializer;
    use std::fmt::Display;

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct NormArgs {
    /// macaev, dual_plus, trace, schatten:p or kyfan:k.
    #[arg(long, value_parser = parse_phi)]
    #[serde(with = "as_string")]
    pub phi: NormingFunction,
    /// JSON array of numbers, JSON list of [value, count] pairs, or plain
    /// numbers separated by whitespace or commas. Plain lists are taken in
    /// absolute value.
    #[arg(long)]
    pub values: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long, value_parser = parse_group)]
    #[serde(with = "as_string")]
    pub group: GroupSpec,
    #[arg(long, value_parser = parse_phi)]
    #[serde(with = "as_string")]
    pub phi: NormingFunction,
    #[arg(long, conflicts_with = "radii", required_unless_present = "radii")]
    pub radius: Option<usize>,
    /// Comma-separated radii.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<usize>>,
    /// Depth of the built-in free(2) witness.
    #[arg(long, default_value_t = 20)]
    pub witness_depth: usize,
    /// Certificate file replacing the built-in witness.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    #[arg(long, default_value = "subgradient", value_parser = parse_method)]
    #[serde(with = "as_string")]
    pub method: Method,
    #[arg(long, default_value_t = 400)]
    pub iterations: usize,
    /// Per-radius CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyArgs {
    /// Validate an existing certificate file instead of building one.
    #[arg(long, conflicts_with_all = ["half_line", "depth"])]
    pub validate: Option<PathBuf>,
    /// Half-line certificate on zd:1 under the trace norm, support [0, T].
    #[arg(long, value_name = "T")]
    pub half_line: Option<usize>,
    /// Depth of the free(2) witness.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value = "right", value_parser = parse_action)]
    #[serde(with = "as_string")]
    pub action: Action,
    #[arg(long, default_value = "macaev", value_parser = parse_phi)]
    #[serde(with = "as_string")]
    pub phi: NormingFunction,
    /// Where to write the built certificate.
    #[arg(long)]
    pub cert_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TransferArgs {
    /// Embedding table file.
    #[arg(long, conflicts_with_all = ["inclusion", "reexpress"])]
    pub embedding: Option<PathBuf>,
    /// Generator inclusion free(2) into free(N).
    #[arg(long, value_name = "N", conflicts_with = "reexpress")]
    pub inclusion: Option<u8>,
    /// Identity of free(2) onto the generators given by these words.
    #[arg(long, value_delimiter = ',')]
    pub reexpress: Option<Vec<String>>,
    #[arg(long, default_value_t = 4)]
    pub domain_radius: usize,
    #[arg(long, default_value = "macaev", value_parser = parse_phi)]
    #[serde(with = "as_string")]
    pub phi: NormingFunction,
    /// Source certificate; the built-in free(2) witness otherwise.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub witness_depth: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CounterexampleArgs {
    #[arg(long, default_value = "macaev", value_parser = parse_phi)]
    #[serde(with = "as_string")]
    pub phi: NormingFunction,
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,
    /// Longest monoid word in the tensor orbit.
    #[arg(long, default_value_t = 8)]
    pub orbit_depth: usize,
    /// Orbit depth used for the dense-SVD check.
    #[arg(long, default_value_t = 6)]
    pub explicit_depth: usize,
    #[arg(long, default_value_t = 20)]
    pub witness_depth: usize,
    /// Write the schedule and level table here.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Number of depths in the level table.
    #[arg(long, default_value_t = 64)]
    pub dump_depth: u64,
    /// Per-n CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CrosscheckArgs {
    #[arg(long, default_value = "free:2", value_parser = parse_group)]
    #[serde(with = "as_string")]
    pub group: GroupSpec,
    #[arg(long, default_value = "macaev", value_parser = parse_phi)]
    #[serde(with = "as_string")]
    pub phi: NormingFunction,
    /// Support radius of the random functions.
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    /// Group element g in [λ(g), M_f].
    #[arg(long, default_value = "a")]
    pub generator: String,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

/// Process exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) | Error::InvertedSandwich { .. } | Error::InvalidCertificate(_) => EXIT_INVARIANT,
        Error::ResourceCap { .. } => EXIT_RESOURCE,
        Error::Io(_) => EXIT_IO,
        Error::InvalidInput(_)
        | Error::UnknownGenerator(_)
        | Error::Unsupported(_)
        | Error::NegativeValue(_)
        | Error::Precondition(_)
        | Error::DomainExceeded(_)
        | Error::RadiusTooLarge { .. }
        | Error::NoSchedule(_)
        | Error::DepthInsufficient { .. }
        | Error::Json(_) => EXIT_USAGE,
    }
}

impl Cli {
    pub fn cache_dir(&self) -> Option<PathBuf> {
        self.global.cache.clone().or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
    }

    pub fn ball_cap(&self) -> usize {
        usize::try_from(self.global.ball_cap).unwrap_or(usize::MAX)
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Run a parsed command and write its report.
pub fn execute(cli: &Cli) -> crate::Result<()> {
    let body = match &cli.command {
        Command::Norm(a) => commands::norm(a)?,
        Command::Estimate(a) => commands::estimate(cli, a)?,
        Command::Certify(a) => commands::certify(a)?,
        Command::Transfer(a) => commands::transfer(a)?,
        Command::Counterexample(a) => commands::counterexample(a)?,
        Command::Crosscheck(a) => commands::crosscheck(cli, a)?,
    };
    let report = finish_report(cli, body)?;
    write_report(&report, cli.global.out.as_deref())
}

fn finish_report(cli: &Cli, body: Value) -> crate::Result<Value> {
    let mut map = match body {
        Value::Object(m) => m,
        other => {
            let mut m = serde_json::Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    map.insert("config".into(), serde_json::to_value(cli)?);
    map.insert("version".into(), Value::from(crate::VERSION));
    Ok(Value::Object(map))
}

fn write_report(report: &Value, out: Option<&Path>) -> crate::Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn parser_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvertedSandwich { lower: 1.0, upper: 0.5 }), 2);
        assert_eq!(exit_code(&Error::ResourceCap { cap: 3 }), 3);
        assert_eq!(exit_code(&Error::NoSchedule("trace".into())), 64);
        for args in [
            &["macaevlab", "estimate", "--group", "torus", "--phi", "macaev", "--radius", "1"][..],
            &["macaevlab", "norm", "--phi", "schatten:0.5", "--values", "x"],
            &["macaevlab", "--ball-cap", "0", "norm", "--phi", "trace", "--values", "x"],
        ] {
            let e = Cli::try_parse_from(args).unwrap_err();
            assert!(e.use_stderr(), "{args:?}");
        }
    }

    #[test]
    fn config_is_embedded() {
        let cli =
            Cli::try_parse_from(["macaevlab", "estimate", "--group", "free:2", "--phi", "macaev", "--radius", "1"])
                .unwrap();
        let v = finish_report(&cli, serde_json::json!({"x": 1})).unwrap();
        assert_eq!(v["config"]["command"]["command"], "estimate");
        assert_eq!(v["config"]["command"]["group"], "free:2");
        assert_eq!(v["config"]["global"]["seed"], 0x5eed);
        assert_eq!(v["version"], crate::VERSION);
    }
}
