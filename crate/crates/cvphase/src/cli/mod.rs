//! Command-line front end.
//!
//! Parameter precedence: a JSON config (`--config`) overrides flags, and
//! flags override built-in defaults. Exit codes: 0 success, 1 failed
//! verification, 2 configuration error, 3 numerical failure.

mod commands;
mod output;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub use commands::*;
pub use output::{format_float, Output, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const PRECEDENCE: &str = "Parameter precedence: values in the JSON file given by --config override \
flags, and flags override defaults. A config file has the shape \
{\"command\": \"chsh-bell\", \"parameters\": {...}, \"output\": \"out.csv\", \"seed\": 1}; \
every key is optional and unknown keys are rejected.";

#[derive(Debug, Parser)]
#[command(name = "cvphase", version, about = "Phase-space and CHSH computations for squeezed states", after_help = PRECEDENCE)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for commands that sample.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discord of the two-mode squeezed state against r.
    DiscordCurve(DiscordCurve),
    /// Bogoliubov evolution of one mode and the extracted (r, φ).
    SqueezeEvolve(SqueezeEvolve),
    /// Curvature power spectrum and spectral index.
    PowerSpectrum(PowerSpectrum),
    /// Wigner function of a cat state on a grid.
    WignerCat(WignerCat),
    /// Slice of the two-mode squeezed Wigner function.
    WignerTmss(WignerTmss),
    /// One-mode squeezed Wigner function or Berry's semiclassical form.
    WignerWkb(WignerWkb),
    /// CHSH scan for the EPR wavepacket.
    ChshEpr(ChshEpr),
    /// CHSH combination for the Bell-letter state.
    ChshBell(ChshBell),
    /// Naive and corrected CHSH combinations for Johansen's state.
    ChshJohansen(ChshJohansen),
    /// Optimized pseudo-spin CHSH value.
    PseudospinBell(PseudospinBell),
    /// Quantum against stochastic averages of random operator expressions.
    WeylCheck(WeylCheck),
    /// Run a command described entirely by --config.
    Run,
    /// Acceptance suite.
    Verify {
        #[arg(value_enum, default_value_t = Suite::Fast)]
        suite: Suite,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Fast,
    Full,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

/// Maps a library error raised while running `command`.
pub(crate) fn lib_error(command: &str, e: crate::Error) -> CliError {
    use crate::Error::*;
    match e {
        Invalid(_) | Range(_) | Config(_) => CliError::Config(format!("{command}: {e}")),
        _ => CliError::Numerical(format!("{command}: {e}")),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub fn read_config(path: &std::path::Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Overlays `overrides` on the flag values and deserializes the result,
/// naming the first offending key on failure.
pub fn resolve<P: Serialize + DeserializeOwned>(flags: &P, overrides: &Map<String, Value>) -> Result<P, CliError> {
    let base = match serde_json::to_value(flags) {
        Ok(Value::Object(m)) => m,
        _ => return Err(CliError::Config("parameters must serialize to an object".into())),
    };
    for (k, v) in overrides {
        if !base.contains_key(k) {
            let known: Vec<&str> = base.keys().map(String::as_str).collect();
            return Err(CliError::Config(format!("unknown parameter `{k}` (expected one of {})", known.join(", "))));
        }
        let mut single = base.clone();
        single.insert(k.clone(), v.clone());
        if let Err(e) = serde_json::from_value::<P>(Value::Object(single)) {
            return Err(CliError::Config(format!("parameter `{k}`: {e}")));
        }
    }
    let mut merged = base;
    merged.extend(overrides.clone());
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(e.to_string()))
}

/// Runs the parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("cvphase: {e}");
            e.exit_code()
        }
    }
}

pub fn main_from_env() -> i32 {
    run(Cli::parse())
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(p) => read_config(p)?,
        None => ConfigFile::default(),
    };
    if let Command::Verify { suite } = cli.command {
        let report = verify::run_suite(suite);
        print!("{}", report.render());
        return Ok(if report.all_passed() { 0 } else { 1 });
    }
    let name = match &cli.command {
        Command::Run => file
            .command
            .clone()
            .ok_or_else(|| CliError::Config("`command` is required when using `run`".into()))?,
        c => command_name(c).to_string(),
    };
    if let Some(c) = &file.command {
        if *c != name {
            return Err(CliError::Config(format!("`command` is {c} but {name} was requested")));
        }
    }
    let seed = file.seed.or(cli.seed);
    let output = file.output.clone().or(cli.output.clone());
    let out = execute(&cli.command, &name, &file.parameters, seed)?;
    out.write(output.as_deref())?;
    Ok(0)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::DiscordCurve(_) => "discord-curve",
        Command::SqueezeEvolve(_) => "squeeze-evolve",
        Command::PowerSpectrum(_) => "power-spectrum",
        Command::WignerCat(_) => "wigner-cat",
        Command::WignerTmss(_) => "wigner-tmss",
        Command::WignerWkb(_) => "wigner-wkb",
        Command::ChshEpr(_) => "chsh-epr",
        Command::ChshBell(_) => "chsh-bell",
        Command::ChshJohansen(_) => "chsh-johansen",
        Command::PseudospinBell(_) => "pseudospin-bell",
        Command::WeylCheck(_) => "weyl-check",
        Command::Run => "run",
        Command::Verify { .. } => "verify",
    }
}

/// Resolves parameters for `name` (flags from `cmd` when it carries them,
/// defaults otherwise) and runs it.
pub fn execute(cmd: &Command, name: &str, overrides: &Map<String, Value>, seed: Option<u64>) -> Result<Output, CliError> {
    macro_rules! go {
        ($flags:expr, $f:path) => {{
            let p = resolve($flags, overrides)?;
            $f(&p, seed)
        }};
    }
    match (cmd, name) {
        (Command::DiscordCurve(p), _) => go!(p, discord_curve),
        (Command::SqueezeEvolve(p), _) => go!(p, squeeze_evolve),
        (Command::PowerSpectrum(p), _) => go!(p, power_spectrum),
        (Command::WignerCat(p), _) => go!(p, wigner_cat),
        (Command::WignerTmss(p), _) => go!(p, wigner_tmss),
        (Command::WignerWkb(p), _) => go!(p, wigner_wkb),
        (Command::ChshEpr(p), _) => go!(p, chsh_epr),
        (Command::ChshBell(p), _) => go!(p, chsh_bell),
        (Command::ChshJohansen(p), _) => go!(p, chsh_johansen),
        (Command::PseudospinBell(p), _) => go!(p, pseudospin_bell),
        (Command::WeylCheck(p), _) => go!(p, weyl_check),
        (Command::Run, "discord-curve") => go!(&default_of::<DiscordCurve>(), discord_curve),
        (Command::Run, "squeeze-evolve") => go!(&default_of::<SqueezeEvolve>(), squeeze_evolve),
        (Command::Run, "power-spectrum") => go!(&default_of::<PowerSpectrum>(), power_spectrum),
        (Command::Run, "wigner-cat") => go!(&default_of::<WignerCat>(), wigner_cat),
        (Command::Run, "wigner-tmss") => go!(&default_of::<WignerTmss>(), wigner_tmss),
        (Command::Run, "wigner-wkb") => go!(&default_of::<WignerWkb>(), wigner_wkb),
        (Command::Run, "chsh-epr") => go!(&default_of::<ChshEpr>(), chsh_epr),
        (Command::Run, "chsh-bell") => go!(&default_of::<ChshBell>(), chsh_bell),
        (Command::Run, "chsh-johansen") => go!(&default_of::<ChshJohansen>(), chsh_johansen),
        (Command::Run, "pseudospin-bell") => go!(&default_of::<PseudospinBell>(), pseudospin_bell),
        (Command::Run, "weyl-check") => go!(&default_of::<WeylCheck>(), weyl_check),
        (_, other) => Err(CliError::Config(format!("unknown command `{other}`"))),
    }
}

/// Defaults of a parameter struct, taken from its clap definitions.
pub fn default_of<P: clap::Args + clap::FromArgMatches>() -> P {
    let cmd = P::augment_args(clap::Command::new("defaults"));
    let m = cmd.get_matches_from(["defaults"]);
    P::from_arg_matches(&m).expect("defaults parse")
}
