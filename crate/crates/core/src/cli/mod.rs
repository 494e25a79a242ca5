//! Command-line front end.
//!
//! Every command reads a JSON [`RunConfig`] and is a pure function of the
//! config and the seed. Exit codes: [`EXIT_OK`], [`EXIT_CONFIG`] for bad
//! arguments, configs or input files, [`EXIT_NUMERIC`] for numerical
//! failures. Errors are reported on standard error as one JSON line.
//! `FLOWCORR_THREADS` caps the worker threads.

mod commands;
mod config;
mod error;
mod table;

pub use commands::{
    cmd_hhd, cmd_mc, cmd_paths, cmd_rho, cmd_sweep, path_file_name, Output, Settings,
};
pub use config::{
    Format, Grid, HhdConfig, McConfig, PathsConfig, Range, RhoConfig, RhoMethod, RunConfig,
    SweepConfig, SweepFamily, SweepMethod,
};
pub use error::{CliError, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK};
pub use table::{format_number, Cell, Table};

use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Environment variable that caps worker threads.
pub const THREADS_ENV: &str = "FLOWCORR_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "flowcorr",
    version,
    about = "Edge-flow correlation, sweeps, Monte Carlo checks and Hodge decompositions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (directory for `paths`); standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format overriding the config.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// rho and sigma2 for one kernel and trait model.
    Rho,
    /// Routes evaluated over a roughness, order and dimension grid.
    Sweep,
    /// Monte Carlo estimate against the deterministic route.
    Mc,
    /// Helmholtz-Hodge decomposition of an edge flow.
    Hhd {
        /// Edge list `i j [flow]`, used instead of the config's input.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Matérn sample paths at nested zoom levels.
    Paths,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Rho => "rho",
            Command::Sweep => "sweep",
            Command::Mc => "mc",
            Command::Hhd { .. } => "hhd",
            Command::Paths => "paths",
        }
    }
}

fn read_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Config(format!("{THREADS_ENV}: {e}"))),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Runs a parsed command and returns its outputs without writing them.
pub fn execute(cli: &Cli) -> Result<Vec<Output>, CliError> {
    let config = match (&cli.config, &cli.command) {
        (Some(p), _) => Some(read_config(p)?),
        (None, Command::Hhd { input: Some(_) }) => None,
        (None, c) => return Err(CliError::Config(format!("{} needs --config", c.name()))),
    };
    let config = match config {
        Some(c) if c.command() != cli.command.name() => {
            return Err(CliError::Config(format!(
                "config is for `{}` but the command is `{}`",
                c.command(),
                cli.command.name()
            )))
        }
        Some(c) => c,
        None => RunConfig::Hhd(HhdConfig {
            input: None,
            graph: None,
            kernel: None,
            traits: None,
            dim: None,
            replicates: None,
            seed: None,
            out: None,
            format: None,
        }),
    };
    let (seed, out, format) = config.common();
    let settings = Settings {
        seed: cli.seed.or(*seed).unwrap_or(0),
        out: cli.out.clone().or_else(|| out.clone()),
        format: cli.format.or(*format).unwrap_or_default(),
    };
    let threads = thread_cap()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Numeric(format!("thread pool: {e}")))?;
    pool.install(|| match (&config, &cli.command) {
        (RunConfig::Rho(c), _) => cmd_rho(c, &settings),
        (RunConfig::Sweep(c), _) => cmd_sweep(c, &settings),
        (RunConfig::Mc(c), _) => cmd_mc(c, &settings),
        (RunConfig::Hhd(c), Command::Hhd { input }) => {
            let mut c = c.clone();
            if let Some(p) = input {
                c.input = Some(p.clone());
                c.graph = None;
            }
            cmd_hhd(&c, &settings)
        }
        (RunConfig::Hhd(c), _) => cmd_hhd(c, &settings),
        (RunConfig::Paths(c), _) => cmd_paths(c, &settings),
    })
}

fn write_outputs(outputs: &[Output]) -> Result<(), CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Config(format!("{}: {e}", p.display()));
    for o in outputs {
        match &o.path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
                }
                std::fs::write(p, &o.contents).map_err(|e| io(p, e))?;
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(o.contents.as_bytes())
                    .map_err(|e| io(Path::new("<stdout>"), e))?;
            }
        }
    }
    Ok(())
}

/// Parses `args`, runs the command, writes its outputs and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli).and_then(|o| write_outputs(&o)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            e.exit_code()
        }
    }
}
