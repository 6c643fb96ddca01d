//! Command-line options, config files and the config hash.
//!
//! A config file is TOML with one table per command. Its entries are
//! turned into flags placed before the ones given on the command line,
//! so flags given explicitly win.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Parser)]
#[command(name = "thinstrip", version, about = "Spectra of the Laplacian on thin curved strips")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues of one strip.
    Spectrum(Options),
    /// Scaled eigenvalues and remainders against the 1D operator over an eps sweep.
    Sweep(Options),
    /// Lowest eigenvalue of the weighted transverse operator.
    Transverse(Options),
    /// Eigenvalues of the one-dimensional comparison operator.
    Effective1d(Options),
    /// Resolvent gap between the flat and the reference operator.
    Resolvent(Options),
    /// Dirichlet strip against the -kappa^2/4 operator.
    Dirichlet(Options),
    /// Robin strip against the (kappa + 2 alpha)/eps operator.
    Robin(Options),
    /// Number of eigenvalues below the threshold.
    Count(Options),
    /// Annular sector eigenvalues from Bessel cross products.
    Oracle(Options),
    /// Coordinates of the reference and parallel curves.
    Embed(Options),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Sweep(_) => "sweep",
            Command::Transverse(_) => "transverse",
            Command::Effective1d(_) => "effective1d",
            Command::Resolvent(_) => "resolvent",
            Command::Dirichlet(_) => "dirichlet",
            Command::Robin(_) => "robin",
            Command::Count(_) => "count",
            Command::Oracle(_) => "oracle",
            Command::Embed(_) => "embed",
        }
    }

    pub fn options(&self) -> &Options {
        match self {
            Command::Spectrum(o)
            | Command::Sweep(o)
            | Command::Transverse(o)
            | Command::Effective1d(o)
            | Command::Resolvent(o)
            | Command::Dirichlet(o)
            | Command::Robin(o)
            | Command::Count(o)
            | Command::Oracle(o)
            | Command::Embed(o) => o,
        }
    }
}

/// Options shared by all commands; each command reads the ones it needs.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Options {
    /// Config file with a table per command.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Curvature preset, `name` or `name:p1,p2,...`.
    #[arg(long)]
    pub profile: Option<String>,
    /// Parameter interval `a,b`.
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<String>,
    /// Treat the interval as a truncation of the real line.
    #[arg(long)]
    pub truncated: Option<bool>,
    /// Width, or a decreasing comma-separated list for sweeps.
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<String>,
    /// Outer boundary condition for `spectrum`: dn, dd or robin.
    #[arg(long)]
    pub bc: Option<String>,
    /// Robin coefficient as a preset spec, e.g. `constant:-0.5`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Comparison potential for `effective1d`: dn, dirichlet or robin.
    #[arg(long)]
    pub variant: Option<String>,

    /// Cells along the curve (coarsest level for sweeps).
    #[arg(long)]
    pub ns: Option<usize>,
    /// Cells across the strip (coarsest level for sweeps).
    #[arg(long)]
    pub nt: Option<usize>,
    /// Grid levels extrapolated in sweeps.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Cells of the coarsest 1D grid.
    #[arg(long)]
    pub ns1d: Option<usize>,
    #[arg(long)]
    pub levels1d: Option<usize>,

    /// Number of eigenvalues per sweep point.
    #[arg(long)]
    pub jmax: Option<usize>,
    /// Number of eigenvalues for single problems and angular orders for `oracle`.
    #[arg(long)]
    pub m: Option<usize>,
    /// Shift of the resolvent comparison.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Argument of the transverse operator.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Relative solver tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Margin below the threshold for `count`.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Domain-doubling check on truncated intervals in sweeps (default true).
    #[arg(long)]
    pub truncation_check: Option<bool>,

    /// Dirichlet radius for `oracle`.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Opening angle for `oracle`.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Side of the Neumann arc for `oracle`: inner or outer.
    #[arg(long)]
    pub side: Option<String>,
    /// Sample points for `embed`.
    #[arg(long)]
    pub points: Option<usize>,

    /// Worker threads for sweeps.
    #[arg(long)]
    #[serde(skip)]
    pub workers: Option<usize>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// JSON summary path.
    #[arg(long)]
    #[serde(skip)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config file {path}: {source}")]
    Parse { path: PathBuf, source: Box<toml::de::Error> },
    #[error("config file {path}: {message}")]
    Entry { path: PathBuf, message: String },
}

fn config_path(argv: &[String]) -> Option<PathBuf> {
    argv.iter().enumerate().find_map(|(i, a)| {
        if let Some(p) = a.strip_prefix("--config=") {
            Some(PathBuf::from(p))
        } else if a == "--config" {
            argv.get(i + 1).map(PathBuf::from)
        } else {
            None
        }
    })
}

fn value_to_arg(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(f.to_string()),
        toml::Value::Boolean(b) => Some(b.to_string()),
        toml::Value::Array(items) => items
            .iter()
            .map(value_to_arg)
            .collect::<Option<Vec<_>>>()
            .map(|v| v.join(",")),
        _ => None,
    }
}

/// Inserts the flags from the config file section of the command named
/// in `argv[1]` right after it.
pub fn expand_config(argv: Vec<String>) -> Result<Vec<String>, ConfigError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let Some(command) = argv.get(1).cloned() else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|source| ConfigError::Read {
        path: path.clone(),
        source,
    })?;
    let table: toml::Table = text.parse().map_err(|source| ConfigError::Parse {
        path: path.clone(),
        source: Box::new(source),
    })?;
    let mut flags = Vec::new();
    if let Some(section) = table.get(&command) {
        let section = section.as_table().ok_or_else(|| ConfigError::Entry {
            path: path.clone(),
            message: format!("`{command}` must be a table"),
        })?;
        for (key, value) in section {
            if key == "config" {
                continue;
            }
            let arg = value_to_arg(value).ok_or_else(|| ConfigError::Entry {
                path: path.clone(),
                message: format!("unsupported value for `{key}`"),
            })?;
            flags.push(format!("--{}", key.replace('_', "-")));
            flags.push(arg);
        }
    }
    let mut out = argv[..2].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[2..]);
    Ok(out)
}

/// First 16 hex digits of the SHA-256 of the command and the options that
/// affect results (paths and the worker count are left out).
pub fn config_hash(command: &Command) -> String {
    let json = serde_json::to_string(&(command.name(), command.options())).expect("options serialize");
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn provenance(command: &Command) -> String {
    format!(
        "thinstrip {} command={} config={}",
        env!("CARGO_PKG_VERSION"),
        command.name(),
        config_hash(command)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn flags_parse_with_negative_values() {
        let cli = Cli::try_parse_from(args("thinstrip sweep --interval -6,6 --eps 0.2,0.1 --k -1")).unwrap();
        let o = cli.command.options();
        assert_eq!(o.interval.as_deref(), Some("-6,6"));
        assert_eq!(o.k, Some(-1.0));
    }

    #[test]
    fn config_section_is_expanded_and_overridden() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            "[sweep]\nprofile = \"negcos\"\neps = [0.2, 0.1]\njmax = 2\n[count]\nns = 7\n",
        )
        .unwrap();
        let argv = args(&format!("thinstrip sweep --config {} --jmax 3", path.display()));
        let cli = Cli::try_parse_from(expand_config(argv).unwrap()).unwrap();
        let o = cli.command.options();
        assert_eq!(o.profile.as_deref(), Some("negcos"));
        assert_eq!(o.eps.as_deref(), Some("0.2,0.1"));
        assert_eq!(o.jmax, Some(3));
        assert_eq!(o.ns, None);
    }

    #[test]
    fn hash_ignores_paths_and_workers() {
        let a = Cli::try_parse_from(args("thinstrip sweep --eps 0.1 --out a.csv --workers 1")).unwrap();
        let b = Cli::try_parse_from(args("thinstrip sweep --eps 0.1 --out b.csv --workers 4")).unwrap();
        let c = Cli::try_parse_from(args("thinstrip sweep --eps 0.2")).unwrap();
        assert_eq!(config_hash(&a.command), config_hash(&b.command));
        assert_ne!(config_hash(&a.command), config_hash(&c.command));
        assert_eq!(config_hash(&a.command).len(), 16);
    }
}
