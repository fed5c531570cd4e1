use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Transverse spectral stability of MTM and GN line solitons.
#[derive(Debug, Parser)]
#[command(name = "dirac-stability", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the soliton profile on a uniform x grid.
    Soliton(SolitonArgs),
    /// Tabulate the small-p slopes Λ_r, Λ_i (and GN corrections α, β) over ω.
    Asymptotics(AsymptoticsArgs),
    /// Eigenvalues of the stability operator at one (ω, p).
    Spectrum(SpectrumArgs),
    /// Track isolated eigenvalue branches over a p range.
    Sweep(SweepArgs),
    /// Recompute the spurious-eigenvalue tables and compare with reference ceilings.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Model: `mtm` or `gn`.
    #[arg(long)]
    pub model: Option<String>,

    /// Frequency, or a comma-separated list; fractions like `2/3` are accepted.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,

    /// Transverse wavenumber.
    #[arg(long)]
    pub p: Option<String>,

    /// `start:stop:step` segments, comma-separated; `stop` is inclusive.
    #[arg(long)]
    pub p_range: Option<String>,

    /// Chebyshev degree N (default 300 for MTM, 400 for GN).
    #[arg(long)]
    pub n: Option<usize>,

    /// Mapping scale L.
    #[arg(long)]
    pub scale: Option<f64>,

    /// Output file. Defaults to `$DIRAC_STABILITY_OUT/<command>.<ext>` when
    /// that variable is set, stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for parameter-point parallelism; 1 runs sequentially.
    #[arg(long)]
    pub jobs: Option<usize>,

    /// JSON file with one key per flag (`p_range` for `--p-range`).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolitonArgs {
    #[command(flatten)]
    pub common: Common,

    /// Number of samples; odd counts include x = 0.
    #[arg(long)]
    pub points: Option<usize>,

    /// Half-width of the sampling window (default 20/μ, capped at 200).
    #[arg(long)]
    pub x_max: Option<f64>,

    /// Permit ω = −1 for MTM, where the profile becomes algebraic.
    #[arg(long)]
    pub allow_limit: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AsymptoticsArgs {
    #[command(flatten)]
    pub common: Common,

    /// ω grid as `start:stop:step` segments (ignored when --omega is given).
    #[arg(long, allow_hyphen_values = true)]
    pub omega_range: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,

    /// Also write the nonzero matrix entries as `row,col,re,im` CSV.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,

    /// Comma-separated grid degrees to recompute.
    #[arg(long)]
    pub ns: Option<String>,
}
