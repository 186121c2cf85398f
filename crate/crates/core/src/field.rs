//! Sampled Wigner functions on rectangular grids, and the three evaluation
//! methods that fill them.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve_pacs_damping, evolve_pacs_thermal, ChannelKind, ChannelParams, Evolved};
use crate::oracle::{run_oracle, wigner_from_density};
use crate::phase::{PhasePoint, PhaseSpaceFn};
use crate::quad::QuadSettings;
use crate::states::StateSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::Domain(format!("grid axis needs finite min < max, got {min}:{max}")));
        }
        if count < 2 {
            return Err(Error::Domain(format!("grid axis needs at least 2 points, got {count}")));
        }
        Ok(Self { min, max, count })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    /// The `i`-th coordinate; the last one is exactly `max`.
    pub fn at(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + self.step() * i as f64
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("malformed grid axis {s:?}, expected MIN:MAX:COUNT"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [min, max, count] = parts[..] else {
            return Err(bad());
        };
        Axis::new(
            min.parse().map_err(|_| bad())?,
            max.parse().map_err(|_| bad())?,
            count.parse().map_err(|_| bad())?,
        )
    }
}

/// A rectangular grid in phase space; `x` is the real part of α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x: Axis,
    pub y: Axis,
}

impl Grid {
    pub fn square(half: f64, count: usize) -> Result<Self> {
        let axis = Axis::new(-half, half, count)?;
        Ok(Self { x: axis, y: axis })
    }

    pub fn len(&self) -> usize {
        self.x.count * self.y.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Point `k` in row-major order, `y` outer.
    pub fn point(&self, k: usize) -> PhasePoint {
        PhasePoint::new(self.x.at(k % self.x.count), self.y.at(k / self.x.count))
    }

    pub fn points(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }
}

/// `XMIN:XMAX:NX` or `XMIN:XMAX:NX,YMIN:YMAX:NY`; a single axis is used for
/// both directions.
impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(',') {
            Some((x, y)) => Ok(Self { x: x.parse()?, y: y.parse()? }),
            None => {
                let axis: Axis = s.parse()?;
                Ok(Self { x: axis, y: axis })
            }
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{},{}:{}:{}",
            self.x.min, self.x.max, self.x.count, self.y.min, self.y.max, self.y.count
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `∫W d²α = 1/2`.
    #[default]
    Half,
    /// `∫W d²α = 1`.
    Standard,
}

impl Normalization {
    pub fn factor(self) -> f64 {
        match self {
            Normalization::Half => 1.0,
            Normalization::Standard => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Closed,
    Quadrature,
    Oracle,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Method::Closed),
            "quadrature" => Ok(Method::Quadrature),
            "oracle" => Ok(Method::Oracle),
            _ => Err(Error::Domain(format!("unknown method {s:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Closed => "closed",
            Method::Quadrature => "quadrature",
            Method::Oracle => "oracle",
        })
    }
}

/// Which closed form `Method::Closed` uses for a state and channel, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    Damping,
    PublishedThermal,
}

pub fn closed_form_for(state: &StateSpec, channel: &ChannelParams) -> Option<ClosedForm> {
    match (state, channel.kind) {
        (StateSpec::Number { .. } | StateSpec::Coherent { .. } | StateSpec::Pacs { .. }, ChannelKind::Damping) => {
            Some(ClosedForm::Damping)
        }
        (StateSpec::Pacs { .. }, ChannelKind::Thermal) if channel.t > 0.0 => Some(ClosedForm::PublishedThermal),
        _ => None,
    }
}

/// Diagnostics from filling a field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldDiagnostics {
    pub closed_form: Option<ClosedForm>,
    pub oracle_n_max: Option<usize>,
    pub oracle_steps: Option<usize>,
    pub oracle_dt: Option<f64>,
    pub oracle_trace_drift: Option<f64>,
    pub quadrature_order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub state: StateSpec,
    pub channel: ChannelParams,
    pub method: Method,
    pub normalization: Normalization,
    pub version: String,
}

/// Wigner values on a grid, row-major with `y` outer, in the half
/// normalization unless `meta.normalization` says otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub meta: FieldMeta,
    pub diagnostics: FieldDiagnostics,
}

/// Evaluates `f` at every grid point, in parallel when the `parallel`
/// feature is on; the result is in grid order either way.
pub fn sample_grid<F>(grid: &Grid, f: F) -> Result<Vec<f64>>
where
    F: Fn(PhasePoint) -> Result<f64> + Sync,
{
    #[cfg(feature = "parallel")]
    let values: Result<Vec<f64>> = {
        use rayon::prelude::*;
        (0..grid.len()).into_par_iter().map(|k| f(grid.point(k))).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let values: Result<Vec<f64>> = (0..grid.len()).map(|k| f(grid.point(k))).collect();
    let values = values?;
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite Wigner value at {}", grid.point(k))));
    }
    Ok(values)
}

impl WignerField {
    /// Samples the evolved Wigner function of `state` after `channel` with
    /// the chosen method.
    pub fn compute(
        state: &StateSpec,
        channel: &ChannelParams,
        method: Method,
        grid: &Grid,
        normalization: Normalization,
        settings: &QuadSettings,
    ) -> Result<Self> {
        state.validate()?;
        channel.validate()?;
        let mut diagnostics = FieldDiagnostics::default();
        let mut values = match method {
            Method::Closed => {
                let form = closed_form_for(state, channel).ok_or_else(|| {
                    Error::Refused(format!("no closed form for {} under {:?}", state.kind_name(), channel.kind))
                })?;
                diagnostics.closed_form = Some(form);
                let (m, z) = state.pacs_parameters().expect("closed forms exist only for photon-added states");
                let p = *channel;
                match form {
                    ClosedForm::Damping => sample_grid(grid, |a| evolve_pacs_damping(m, z, p.kappa, p.t, a))?,
                    ClosedForm::PublishedThermal => {
                        sample_grid(grid, |a| evolve_pacs_thermal(m, z, p.kappa, p.nbar, p.t, a))?
                    }
                }
            }
            Method::Quadrature => {
                let evolved = Evolved::new(*state, *channel, *settings)?;
                diagnostics.quadrature_order = Some(settings.rule_for(&state.envelope())?.order());
                if settings.verify {
                    sample_grid(grid, |a| crate::evolution::evolve_wigner(state, channel, a, settings))?
                } else {
                    sample_grid(grid, |a| Ok(evolved.value(a)))?
                }
            }
            Method::Oracle => {
                let run = run_oracle(state, channel)?;
                diagnostics.oracle_n_max = Some(run.state.n_max());
                diagnostics.oracle_steps = Some(run.steps);
                diagnostics.oracle_dt = Some(run.dt);
                diagnostics.oracle_trace_drift = Some(run.trace_drift);
                sample_grid(grid, |a| wigner_from_density(&run.state, a))?
            }
        };
        let factor = normalization.factor();
        if factor != 1.0 {
            values.iter_mut().for_each(|v| *v *= factor);
        }
        Ok(Self {
            grid: *grid,
            values,
            meta: FieldMeta {
                state: *state,
                channel: *channel,
                method,
                normalization,
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            diagnostics,
        })
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.x.count + ix]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest pointwise difference to a field on the same grid.
    pub fn max_abs_diff(&self, other: &WignerField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Domain("fields are sampled on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `alpha_re,alpha_im,w` rows, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "alpha_re,alpha_im,w")?;
        for (k, v) in self.values.iter().enumerate() {
            let a = self.grid.point(k);
            writeln!(out, "{},{},{}", sig17(a.re), sig17(a.im), sig17(*v))?;
        }
        out.flush()
    }
}

/// A float with 17 significant digits, enough to round-trip.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}
