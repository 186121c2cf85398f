use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use wigner_core::field::{Grid, Method, Normalization};
use wigner_core::phase::parse_complex;
use wigner_core::{ChannelParams, StateSpec};

/// A bad flag value or combination; exits like a clap usage error.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Parser, Debug)]
#[command(name = "wigner", version, about = "Wigner functions and photon statistics of single-mode states in loss, gain and thermal channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample the evolved Wigner function on a grid (CSV + JSON sidecar).
    Wigner(WignerArgs),
    /// Tabulate the evolved photon-number distribution by every available method.
    Pnd(PndArgs),
    /// Print the time after which the evolved photon-added coherent state is nonnegative.
    Tc(TcArgs),
    /// Run the closed-form / quadrature / oracle cross-validation matrix.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Number,
    Coherent,
    Pacs,
    Thermal,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelArg {
    Damping,
    Laser,
    Thermal,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Closed,
    Quadrature,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Closed => Method::Closed,
            MethodArg::Quadrature => Method::Quadrature,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

fn complex(s: &str) -> Result<Complex64, String> {
    parse_complex(s).ok_or_else(|| format!("expected a complex literal like 1.0+0.5i, got {s:?}"))
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    #[arg(long, value_enum)]
    pub state: StateKind,
    /// Photon number of a number state.
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    /// Coherent amplitude, e.g. `1.0+0.5i`.
    #[arg(long, value_parser = complex, default_value = "0", allow_hyphen_values = true)]
    pub z: Complex64,
    /// Photons added to the coherent state.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Mean occupation of a thermal state, and of the thermal bath unless --bath-nbar is given.
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
}

impl StateArgs {
    pub fn spec(&self) -> Result<StateSpec> {
        let spec = match self.state {
            StateKind::Number => StateSpec::Number { n: self.n },
            StateKind::Coherent => StateSpec::Coherent { z: self.z },
            StateKind::Pacs => StateSpec::Pacs { m: self.m, z: self.z },
            StateKind::Thermal => StateSpec::Thermal { nbar: self.nbar },
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args, Debug, Clone)]
pub struct ChannelArgs {
    #[arg(long, value_enum, default_value = "damping")]
    pub channel: ChannelArg,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// Gain rate of the laser channel.
    #[arg(long, default_value_t = 0.0)]
    pub g: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// Bath occupation of the thermal channel (defaults to --nbar).
    #[arg(long)]
    pub bath_nbar: Option<f64>,
}

impl ChannelArgs {
    pub fn params(&self, state_nbar: f64) -> Result<ChannelParams> {
        let p = match self.channel {
            ChannelArg::Damping => ChannelParams::damping(self.kappa, self.t),
            ChannelArg::Laser => ChannelParams::laser(self.kappa, self.g, self.t),
            ChannelArg::Thermal => ChannelParams::thermal(self.kappa, self.bath_nbar.unwrap_or(state_nbar), self.t),
        };
        if self.channel != ChannelArg::Laser && self.g != 0.0 {
            return Err(Usage("--g only applies to the laser channel".into()).into());
        }
        if self.channel != ChannelArg::Thermal && self.bath_nbar.is_some() {
            return Err(Usage("--bath-nbar only applies to the thermal channel".into()).into());
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output CSV path (`-` for stdout); the sidecar is written to PATH.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Double every Wigner value so that it integrates to 1.
    #[arg(long)]
    pub std_normalization: bool,
}

impl OutputArgs {
    pub fn normalization(&self) -> Normalization {
        if self.std_normalization {
            Normalization::Standard
        } else {
            Normalization::Half
        }
    }
}

#[derive(Args, Debug)]
pub struct WignerArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, default_value = "quadrature")]
    pub method: MethodArg,
    /// `XMIN:XMAX:NX[,YMIN:YMAX:NY]`
    #[arg(long, default_value = "-3:3:61", allow_hyphen_values = true)]
    pub grid: String,
    /// Also evaluate with this method and report the largest difference.
    #[arg(long, value_enum)]
    pub compare: Option<MethodArg>,
    /// Fail when the --compare difference exceeds this.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Minimum Gauss-Legendre order per axis.
    #[arg(long, default_value_t = wigner_core::quad::DEFAULT_ORDER)]
    pub order: usize,
    /// Repeat every quadrature at twice the order and fail on disagreement.
    #[arg(long)]
    pub check_quadrature: bool,
}

impl WignerArgs {
    pub fn grid(&self) -> Result<Grid> {
        self.grid.parse().map_err(|e| Usage(format!("--grid: {e}")).into())
    }
}

#[derive(Args, Debug)]
pub struct PndArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Number of photon-number terms, `n = 0 .. n_cut-1`.
    #[arg(long, default_value_t = 16)]
    pub n_cut: usize,
    /// Largest allowed difference between any two columns.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Skip the Fock-space oracle column.
    #[arg(long)]
    pub no_oracle: bool,
}

#[derive(Args, Debug)]
pub struct TcArgs {
    /// Bath occupation.
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    /// Scan the evolved Wigner function at 0.5, 1 and 1.2 t_c.
    #[arg(long)]
    pub verify: bool,
    /// Photons added to the coherent state scanned by --verify.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, value_parser = complex, default_value = "1", allow_hyphen_values = true)]
    pub z: Complex64,
    /// Evaluation method for --verify; `closed` is the general evolved closed form.
    #[arg(long, value_enum, default_value = "closed")]
    pub method: MethodArg,
    /// `XMIN:XMAX:NX[,YMIN:YMAX:NY]` scanned by --verify.
    #[arg(long, default_value = "-3:3:41", allow_hyphen_values = true)]
    pub grid: String,
    /// Largest tolerated negativity at t >= t_c.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Damping-only subset.
    #[arg(long)]
    pub quick: bool,
    /// Let the published thermal closed form fail the run.
    #[arg(long)]
    pub strict: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
