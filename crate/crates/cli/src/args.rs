//! The command-line surface: subcommands, flags, and small resolution
//! helpers shared by the command implementations.
//!
//! Conventions: all couplings and frequencies are given in units of the
//! bare transition frequency `omega0`, and all output frequencies are
//! reported in the same units; `omega0` itself only sets the scale.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use usctopo::hamiltonian::Boundary;

#[derive(Parser)]
#[command(
    name = "usctopo",
    version,
    about = "Exact diagonalization of dimerized chains of two-level systems",
    long_about = "Exact diagonalization of dimerized chains of two-level systems, with or \
                  without the counter-rotating terms of the ultrastrong coupling regime. \
                  Subcommands emit long-format CSV/JSON records or standalone SVG plots, \
                  plus a <out>.meta.json sidecar carrying the resolved configuration."
)]
pub struct Cli {
    /// Run the analytic-oracle self-test (random two-site eigensystems
    /// against their closed forms) and exit.
    #[arg(long)]
    pub seed_check: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Two-site eigenvalue ladder, at one coupling or swept over a coupling range
    DimerSpectrum(DimerSpectrumArgs),
    /// Closed-form two-site excitation dynamics (mean site correlations)
    DimerDynamics(DimerDynamicsArgs),
    /// Chain eigenvalues with per-state localization diagnostics over a dimerization grid
    ChainSpectrum(ChainArgs),
    /// Bare-state / eigenstate overlap table at a single parameter point
    EigenstateMap(PointArgs),
    /// Participation-ratio-resolved spectra over a dimerization grid
    PrMap(ChainArgs),
    /// Ground-state occupancy over a dimerization grid
    Occupancy(ChainArgs),
    /// Continuum two-band dispersion and bow-tie boundaries at fixed couplings
    Dispersion(DispersionArgs),
    /// Batch sweep driven by a JSON plan file
    Sweep(SweepArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum BoundaryArg {
    Open,
    Periodic,
}

impl BoundaryArg {
    pub fn to_model(self) -> Boundary {
        match self {
            Self::Open => Boundary::Open,
            Self::Periodic => Boundary::Periodic,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Open => "open",
            Self::Periodic => "periodic",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Svg,
}

impl FormatArg {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Svg => "svg",
        }
    }
}

/// Explicit `--format` wins; otherwise the extension of `--out` decides,
/// falling back to CSV.
pub fn resolve_format(format: Option<FormatArg>, out: &Path) -> FormatArg {
    if let Some(f) = format {
        return f;
    }
    match out.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => FormatArg::Json,
        Some(e) if e.eq_ignore_ascii_case("svg") => FormatArg::Svg,
        _ => FormatArg::Csv,
    }
}

/// Flags shared by the grid-sweeping chain commands.
#[derive(Args)]
pub struct ChainArgs {
    /// Number of two-level sites (dense diagonalization; up to 12)
    #[arg(long, default_value_t = 8)]
    pub n: usize,

    /// Bare transition frequency, the unit of all reported frequencies
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,

    /// Mean coupling(s) in units of omega0, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5")]
    pub jbar: Vec<f64>,

    /// Single dimerization value in [-1, 1], replacing the grid
    #[arg(long, allow_negative_numbers = true, conflicts_with = "eps_grid")]
    pub eps: Option<f64>,

    /// Number of uniform dimerization points covering [-1, 1]
    #[arg(long, default_value_t = 201)]
    pub eps_grid: usize,

    /// Intra-cell coupling in units of omega0; with --j2 replaces --eps/--jbar
    #[arg(long, requires = "j2", conflicts_with_all = ["eps", "eps_grid", "jbar"])]
    pub j1: Option<f64>,

    /// Inter-cell coupling in units of omega0; with --j1 replaces --eps/--jbar
    #[arg(long, requires = "j1")]
    pub j2: Option<f64>,

    /// Keep only excitation-number-conserving terms
    #[arg(long, conflicts_with = "no_rwa")]
    pub rwa: bool,

    /// Keep the counter-rotating terms (the default)
    #[arg(long)]
    pub no_rwa: bool,

    /// Chain termination
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    pub boundary: BoundaryArg,

    /// Output file path; a <path>.meta.json sidecar is written next to it
    #[arg(long)]
    pub out: PathBuf,

    /// Output format; inferred from the extension of --out when omitted
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    /// Upper frequency cut, in units of omega0, applied to plotted spectra
    #[arg(long, default_value_t = 2.0)]
    pub cut: f64,
}

impl ChainArgs {
    pub fn rwa_resolved(&self) -> bool {
        self.rwa
    }
}

/// Flags for single-point commands (eigenstate map).
#[derive(Args)]
pub struct PointArgs {
    /// Number of two-level sites (dense diagonalization; up to 12)
    #[arg(long, default_value_t = 4)]
    pub n: usize,

    /// Bare transition frequency, the unit of all reported frequencies
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,

    /// Mean coupling in units of omega0
    #[arg(long, default_value_t = 0.5)]
    pub jbar: f64,

    /// Dimerization in [-1, 1]
    #[arg(long, default_value_t = -0.8, allow_negative_numbers = true)]
    pub eps: f64,

    /// Keep only excitation-number-conserving terms
    #[arg(long, conflicts_with = "no_rwa")]
    pub rwa: bool,

    /// Keep the counter-rotating terms (the default)
    #[arg(long)]
    pub no_rwa: bool,

    /// Chain termination
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    pub boundary: BoundaryArg,

    /// Output file path; a <path>.meta.json sidecar is written next to it
    #[arg(long)]
    pub out: PathBuf,

    /// Output format; inferred from the extension of --out when omitted
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Args)]
pub struct DimerSpectrumArgs {
    /// Bare transition frequency, the unit of all reported frequencies
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,

    /// Single coupling in units of omega0, replacing the coupling sweep
    #[arg(long, conflicts_with_all = ["j_max", "j_grid"])]
    pub j: Option<f64>,

    /// Upper end of the coupling sweep, in units of omega0
    #[arg(long, default_value_t = 5.0)]
    pub j_max: f64,

    /// Number of sweep points covering [0, j-max]
    #[arg(long, default_value_t = 201)]
    pub j_grid: usize,

    /// Keep only excitation-number-conserving terms
    #[arg(long, conflicts_with = "no_rwa")]
    pub rwa: bool,

    /// Keep the counter-rotating terms (the default)
    #[arg(long)]
    pub no_rwa: bool,

    /// Output file path; a <path>.meta.json sidecar is written next to it
    #[arg(long)]
    pub out: PathBuf,

    /// Output format; inferred from the extension of --out when omitted
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Args)]
pub struct DimerDynamicsArgs {
    /// Bare transition frequency, the unit of all reported frequencies
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,

    /// Coupling in units of omega0 (must be positive: time is measured in Jt)
    #[arg(long, default_value_t = 0.1)]
    pub j: f64,

    /// End of the time window, in units of Jt
    #[arg(long, default_value_t = 7.0)]
    pub t_max: f64,

    /// Number of uniformly spaced time samples
    #[arg(long, default_value_t = 1000)]
    pub points: usize,

    /// Output file path; a <path>.meta.json sidecar is written next to it
    #[arg(long)]
    pub out: PathBuf,

    /// Output format; inferred from the extension of --out when omitted
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Args)]
pub struct DispersionArgs {
    /// Bare transition frequency, the unit of all reported frequencies
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,

    /// Mean coupling in units of omega0
    #[arg(long, default_value_t = 0.5)]
    pub jbar: f64,

    /// Dimerization in [-1, 1]
    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    pub eps: f64,

    /// Number of momentum samples covering qd in [-pi, pi]
    #[arg(long, default_value_t = 201)]
    pub points: usize,

    /// Output file path; a <path>.meta.json sidecar is written next to it
    #[arg(long)]
    pub out: PathBuf,

    /// Output format; inferred from the extension of --out when omitted
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// JSON plan file (see the README for the schema)
    #[arg(long)]
    pub plan: PathBuf,

    /// Output file path; multi-output plans derive sibling paths from it
    #[arg(long)]
    pub out: PathBuf,

    /// Output format (csv or json); inferred from --out when omitted
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}
