//! Cross-checks between the closed forms, kernel quadrature and the
//! Fock-space oracle, collected into a serializable report.
//!
//! Every comparison is a [`Cell`] with a tolerance. Cells of the
//! `thermal-closed` suite test a published formula rather than this crate;
//! they are marked `suspect` and only count towards [`VerifyReport::ok`] in
//! strict mode.

use std::f64::consts::LN_2;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evolution::{
    evolve_pacs, evolve_pacs_damping, evolve_pacs_thermal, evolve_wigner, positivity_time, ChannelParams,
};
use crate::field::{sample_grid, Grid};
use crate::oracle::{default_steps, evolve_density, oracle_n_max, pnd_from_density, run_oracle, wigner_from_density};
use crate::photon::{pnd_evolved, pnd_pacs_closed};
use crate::quad::QuadSettings;
use crate::states::{fock_density, wigner_integral, StateSpec};

pub const CLOSED_TOL: f64 = 1e-8;
pub const ORACLE_WIGNER_TOL: f64 = 1e-4;
pub const PND_TOL: f64 = 1e-5;
pub const STEP_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-9;
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// Highest photon number compared between distributions.
pub const PND_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub suite: String,
    pub name: String,
    /// Largest absolute deviation, or the measured minimum for positivity
    /// cells; absent when the computation itself failed.
    pub max_deviation: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub suspect: bool,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SuiteStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub quick: bool,
    pub strict: bool,
    pub cells: Vec<Cell>,
    pub passed: usize,
    pub failed: usize,
    /// Outcome of the published thermal closed form against quadrature.
    #[serde(rename = "eq412_status")]
    pub thermal_closed_status: SuiteStatus,
    pub thermal_closed_max_deviation: Option<f64>,
    /// All non-suspect cells pass (all cells in strict mode).
    pub ok: bool,
    pub elapsed_seconds: f64,
}

impl VerifyReport {
    pub fn suite(&self, name: &str) -> impl Iterator<Item = &Cell> {
        let name = name.to_string();
        self.cells.iter().filter(move |c| c.suite == name)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Damping-channel cells only.
    pub quick: bool,
    /// Count the suspect suite towards the exit status.
    pub strict: bool,
}

fn cell(suite: &str, name: String, outcome: Result<(f64, usize)>, tol: f64) -> Cell {
    match outcome {
        Ok((dev, points)) => Cell {
            suite: suite.into(),
            name,
            max_deviation: Some(dev),
            tol,
            pass: dev <= tol,
            suspect: false,
            points,
            note: None,
        },
        Err(e) => Cell {
            suite: suite.into(),
            name,
            max_deviation: None,
            tol,
            pass: false,
            suspect: false,
            points: 0,
            note: Some(e.to_string()),
        },
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn grid_diff<F, G>(grid: &Grid, f: F, g: G) -> Result<(f64, usize)>
where
    F: Fn(crate::PhasePoint) -> Result<f64> + Sync,
    G: Fn(crate::PhasePoint) -> Result<f64> + Sync,
{
    let a = sample_grid(grid, f)?;
    let b = sample_grid(grid, g)?;
    Ok((max_diff(&a, &b), grid.len()))
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn comparison_grid() -> Grid {
    Grid::square(2.0, 5).expect("fixed grid")
}

#[cfg(feature = "parallel")]
fn par_flat_map<T: Sync, F: Fn(&T) -> Vec<Cell> + Sync + Send>(items: &[T], f: F) -> Vec<Cell> {
    use rayon::prelude::*;
    items.par_iter().flat_map_iter(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_flat_map<T: Sync, F: Fn(&T) -> Vec<Cell> + Sync + Send>(items: &[T], f: F) -> Vec<Cell> {
    items.iter().flat_map(f).collect()
}

fn normalization_cells() -> Vec<Cell> {
    let states = [
        StateSpec::Number { n: 3 },
        StateSpec::Coherent { z: Complex64::new(1.2, -1.6) },
        StateSpec::Pacs { m: 2, z: Complex64::new(1.0, 1.0) },
        StateSpec::Thermal { nbar: 1.0 },
    ];
    let s = QuadSettings::default();
    states
        .iter()
        .map(|st| {
            let r = wigner_integral(st, &s).map(|v| ((v - 0.5).abs(), 1));
            cell("normalization", format!("{st:?}"), r, NORMALIZATION_TOL)
        })
        .collect()
}

fn damping_closed_cells() -> Vec<Cell> {
    let grid = comparison_grid();
    let s = QuadSettings::default();
    let mut cases = Vec::new();
    for m in 1..=3 {
        for kt in [0.1, LN_2 / 2.0, 1.0, 3.0] {
            cases.push((m, kt));
        }
    }
    par_flat_map(&cases, |&(m, kt)| {
        let p = ChannelParams::damping(1.0, kt);
        let st = StateSpec::Pacs { m, z: one() };
        let r = grid_diff(
            &grid,
            |a| evolve_pacs_damping(m, one(), 1.0, kt, a),
            |a| evolve_wigner(&st, &p, a, &s),
        );
        vec![cell("damping-closed", format!("m={m} kt={kt:.6}"), r, CLOSED_TOL)]
    })
}

fn general_closed_cells() -> Vec<Cell> {
    let grid = comparison_grid();
    let s = QuadSettings::default();
    let channels = [
        ChannelParams::laser(1.0, 0.5, 0.5),
        ChannelParams::laser(1.0, 1.0, 0.3),
        ChannelParams::laser(0.5, 1.0, 0.2),
        ChannelParams::thermal(1.0, 0.5, 0.2),
        ChannelParams::thermal(1.0, 0.5, 1.0),
        ChannelParams::thermal(1.0, 1.0, LN_2 / 2.0),
    ];
    par_flat_map(&channels, |p| {
        (1..=2)
            .map(|m| {
                let st = StateSpec::Pacs { m, z: one() };
                let r = grid_diff(&grid, |a| evolve_pacs(m, one(), p, a), |a| evolve_wigner(&st, p, a, &s));
                cell("general-closed", format!("m={m} {}", channel_label(p)), r, CLOSED_TOL)
            })
            .collect()
    })
}

fn channel_label(p: &ChannelParams) -> String {
    use crate::ChannelKind::*;
    match p.kind {
        Damping => format!("damping kt={:.6}", p.kappa * p.t),
        Laser => format!("laser kappa={} g={} t={}", p.kappa, p.g, p.t),
        Thermal => format!("thermal nbar={} kt={:.6}", p.nbar, p.kappa * p.t),
    }
}

fn oracle_cells(quick: bool) -> Vec<Cell> {
    let states = [
        StateSpec::Number { n: 1 },
        StateSpec::Coherent { z: one() },
        StateSpec::Pacs { m: 1, z: one() },
        StateSpec::Pacs { m: 2, z: one() },
    ];
    let mut channels = vec![
        ChannelParams::damping(1.0, 0.2),
        ChannelParams::damping(1.0, LN_2 / 2.0),
        ChannelParams::damping(1.0, 1.0),
    ];
    if !quick {
        channels.push(ChannelParams::thermal(1.0, 0.5, 0.2));
        channels.push(ChannelParams::thermal(1.0, 0.5, 1.0));
    }
    let mut cases = Vec::new();
    for st in states {
        for p in &channels {
            cases.push((st, *p));
        }
    }
    let grid = comparison_grid();
    let s = QuadSettings::default();
    par_flat_map(&cases, |(st, p)| {
        let label = format!("{} {}", state_label(st), channel_label(p));
        let run = match run_oracle(st, p) {
            Ok(run) => run,
            Err(e) => {
                return vec![
                    cell("oracle-wigner", label.clone(), Err(e.clone()), ORACLE_WIGNER_TOL),
                    cell("oracle-pnd", label, Err(e), PND_TOL),
                ]
            }
        };
        let w = grid_diff(&grid, |a| wigner_from_density(&run.state, a), |a| evolve_wigner(st, p, a, &s));
        let oracle_pnd = pnd_from_density(&run.state);
        let pnd = pnd_evolved(st, p, PND_N + 1, &s)
            .map(|q| (max_diff(&oracle_pnd.probs()[..=PND_N], q.probs()), PND_N + 1));
        vec![
            cell("oracle-wigner", label.clone(), w, ORACLE_WIGNER_TOL),
            cell("oracle-pnd", label, pnd, PND_TOL),
        ]
    })
}

fn state_label(st: &StateSpec) -> String {
    match *st {
        StateSpec::Number { n } => format!("number n={n}"),
        StateSpec::Coherent { z } => format!("coherent z={z}"),
        StateSpec::Pacs { m, z } => format!("pacs m={m} z={z}"),
        StateSpec::Thermal { nbar } => format!("thermal nbar={nbar}"),
    }
}

fn pnd_closed_cells(quick: bool) -> Vec<Cell> {
    let mut channels = vec![ChannelParams::damping(1.0, 0.3), ChannelParams::damping(1.0, 1.0)];
    if !quick {
        channels.push(ChannelParams::thermal(1.0, 0.5, 0.5));
        channels.push(ChannelParams::laser(1.0, 0.4, 0.5));
    }
    let mut cases = Vec::new();
    for m in 1..=2 {
        for p in &channels {
            cases.push((m, *p));
        }
    }
    let s = QuadSettings::default();
    par_flat_map(&cases, |&(m, p)| {
        let label = format!("m={m} {}", channel_label(&p));
        let st = StateSpec::Pacs { m, z: one() };
        let closed: Result<Vec<f64>> = (0..=PND_N).map(|n| pnd_pacs_closed(m, one(), &p, n).map(|c| c.value)).collect();
        let closed = match closed {
            Ok(v) => v,
            Err(e) => {
                return vec![
                    cell("pnd-closed-quadrature", label.clone(), Err(e.clone()), PND_TOL),
                    cell("pnd-closed-oracle", label, Err(e), PND_TOL),
                ]
            }
        };
        let quad = pnd_evolved(&st, &p, PND_N + 1, &s).map(|q| (max_diff(&closed, q.probs()), PND_N + 1));
        let oracle = run_oracle(&st, &p)
            .map(|run| (max_diff(&closed, &pnd_from_density(&run.state).probs()[..=PND_N]), PND_N + 1));
        vec![
            cell("pnd-closed-quadrature", label.clone(), quad, PND_TOL),
            cell("pnd-closed-oracle", label, oracle, PND_TOL),
        ]
    })
}

/// Grid minimum over `[-3,3]²` (41 × 41) of the evolved photon-added
/// coherent state at `factor · t_c`.
pub fn positivity_minimum(m: usize, nbar: f64, factor: f64) -> Result<f64> {
    let tc = positivity_time(nbar)?;
    let p = if nbar == 0.0 {
        ChannelParams::damping(1.0, factor * tc)
    } else {
        ChannelParams::thermal(1.0, nbar, factor * tc)
    };
    let grid = Grid::square(3.0, 41)?;
    let values = sample_grid(&grid, |a| evolve_pacs(m, one(), &p, a))?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}

fn positivity_cells() -> Vec<Cell> {
    let mut cells = Vec::new();
    for m in 1..=2 {
        for nbar in [0.0, 0.5, 1.0] {
            for factor in [1.0, 1.2] {
                let r = positivity_minimum(m, nbar, factor).map(|min| (-min, 41 * 41));
                let mut c = cell("positivity", format!("m={m} nbar={nbar} t={factor}tc"), r, POSITIVITY_TOL);
                c.max_deviation = c.max_deviation.map(|d| -d);
                cells.push(c);
            }
        }
    }
    let r = positivity_minimum(1, 0.0, 0.5).map(|min| (min + 1e-3, 41 * 41));
    let mut c = cell("positivity", "m=1 nbar=0 t=0.5tc negative".into(), r, 0.0);
    c.pass = c.max_deviation.is_some_and(|d| d < 0.0);
    c.max_deviation = c.max_deviation.map(|d| d - 1e-3);
    c.note = Some("measured minimum must be below -1e-3".into());
    cells.push(c);
    cells
}

fn step_cells() -> Vec<Cell> {
    let cases = [
        (StateSpec::Pacs { m: 1, z: one() }, ChannelParams::damping(1.0, 1.0)),
        (StateSpec::Pacs { m: 2, z: one() }, ChannelParams::thermal(1.0, 0.5, 1.0)),
    ];
    let grid = comparison_grid();
    par_flat_map(&cases, |(st, p)| {
        let r = (|| {
            let rho0 = fock_density(st, oracle_n_max(st, p)?)?;
            let steps = default_steps(p, rho0.dim());
            let coarse = evolve_density(&rho0, p, steps)?;
            let fine = evolve_density(&rho0, p, 2 * steps)?;
            let (w, n) = grid_diff(
                &grid,
                |a| wigner_from_density(&coarse.state, a),
                |a| wigner_from_density(&fine.state, a),
            )?;
            let pnd = max_diff(pnd_from_density(&coarse.state).probs(), pnd_from_density(&fine.state).probs());
            Ok((w.max(pnd), n + rho0.dim()))
        })();
        vec![cell("oracle-step-halving", format!("{} {}", state_label(st), channel_label(p)), r, STEP_TOL)]
    })
}

fn thermal_closed_cells() -> Vec<Cell> {
    let grid = comparison_grid();
    let s = QuadSettings::default();
    let cases = [(1, 0.5, 1.0), (2, 0.5, 1.0), (1, 1.0, 0.5), (1, 0.0, 1.0)];
    let mut cells: Vec<Cell> = cases
        .iter()
        .map(|&(m, nbar, kt)| {
            let p = ChannelParams::thermal(1.0, nbar, kt);
            let st = StateSpec::Pacs { m, z: one() };
            let r = grid_diff(
                &grid,
                |a| evolve_pacs_thermal(m, one(), 1.0, nbar, kt, a),
                |a| evolve_wigner(&st, &p, a, &s),
            );
            cell("thermal-closed", format!("m={m} nbar={nbar} kt={kt}"), r, CLOSED_TOL)
        })
        .collect();
    for c in &mut cells {
        c.suspect = true;
    }
    cells
}

pub fn run_verify(opts: VerifyOptions) -> VerifyReport {
    let start = Instant::now();
    let mut cells = Vec::new();
    cells.extend(normalization_cells());
    cells.extend(damping_closed_cells());
    cells.extend(oracle_cells(opts.quick));
    cells.extend(pnd_closed_cells(opts.quick));
    if !opts.quick {
        cells.extend(general_closed_cells());
        cells.extend(positivity_cells());
        cells.extend(step_cells());
        cells.extend(thermal_closed_cells());
    }
    let passed = cells.iter().filter(|c| c.pass).count();
    let failed = cells.len() - passed;
    let suspect: Vec<&Cell> = cells.iter().filter(|c| c.suspect).collect();
    let thermal_closed_status = if suspect.iter().all(|c| c.pass) {
        SuiteStatus::Pass
    } else {
        SuiteStatus::Fail
    };
    let thermal_closed_max_deviation = suspect
        .iter()
        .filter_map(|c| c.max_deviation)
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
    let ok = cells.iter().all(|c| c.pass || (c.suspect && !opts.strict));
    VerifyReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        quick: opts.quick,
        strict: opts.strict,
        cells,
        passed,
        failed,
        thermal_closed_status,
        thermal_closed_max_deviation,
        ok,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_report_structure() {
        let report = run_verify(VerifyOptions { quick: true, strict: false });
        assert!(report.cells.len() >= 20);
        assert!(report.cells.iter().all(|c| !c.suspect));
        assert_eq!(report.thermal_closed_status, SuiteStatus::Pass);
        let json = serde_json::to_value(&report).unwrap();
        assert!(json.get("eq412_status").is_some());
        for c in &report.cells {
            assert!(c.pass, "{c:?}");
        }
        assert!(report.ok);
    }
}
