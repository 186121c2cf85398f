use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use wigner_core::evolution::{evolve_pacs, positivity_time, Evolved};
use wigner_core::field::{closed_form_for, sample_grid, sig17, ClosedForm, Grid, Method, WignerField};
use wigner_core::oracle::{pnd_from_density, run_oracle, wigner_from_density};
use wigner_core::photon::{pnd_evolved, pnd_pacs_closed, PndRegime};
use wigner_core::verify::{run_verify, SuiteStatus, VerifyOptions};
use wigner_core::{ChannelParams, PhaseSpaceFn, QuadSettings, StateSpec};

use crate::args::{Usage, MethodArg, PndArgs, TcArgs, VerifyArgs, WignerArgs};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes the CSV to `out` (stdout for `-`) and, for files, the JSON
/// sidecar next to it.
fn write_outputs<F>(out: &Path, csv: F, sidecar: &Value) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    if out == Path::new("-") {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        csv(&mut lock)?;
        return Ok(());
    }
    let mut w = BufWriter::new(File::create(out).with_context(|| format!("creating {}", out.display()))?);
    csv(&mut w)?;
    w.flush()?;
    let side = sidecar_path(out);
    let mut text = serde_json::to_string_pretty(sidecar)?;
    text.push('\n');
    std::fs::write(&side, text).with_context(|| format!("writing {}", side.display()))?;
    eprintln!("wrote {} and {}", out.display(), side.display());
    Ok(())
}

fn warnings_for(state: &StateSpec, p: &ChannelParams, method: Option<Method>) -> Vec<String> {
    let mut w = Vec::new();
    if p.is_amplifying() {
        w.push(format!(
            "gain exceeds loss ({} > {}): the field spreads without bound, widen the grid and expect the oracle to need a large Fock block",
            p.gain_rate(),
            p.loss_rate()
        ));
    }
    if method == Some(Method::Closed) && closed_form_for(state, p) == Some(ClosedForm::PublishedThermal) {
        w.push(
            "the published thermal closed form disagrees with quadrature for nbar > 0; see `wigner verify` (thermal-closed suite)"
                .into(),
        );
    }
    for msg in &w {
        eprintln!("warning: {msg}");
    }
    w
}

#[derive(Serialize)]
struct WignerConfig<'a> {
    state: StateSpec,
    channel: ChannelParams,
    method: Method,
    grid: Grid,
    grid_spec: &'a str,
    order: usize,
    check_quadrature: bool,
    compare: Option<Method>,
    tol: Option<f64>,
}

/// Trapezoid estimate of `∫W d²α` over the grid.
fn grid_integral(f: &WignerField) -> f64 {
    let (nx, ny) = (f.grid.x.count, f.grid.y.count);
    let mut sum = 0.0;
    for iy in 0..ny {
        let wy = if iy == 0 || iy + 1 == ny { 0.5 } else { 1.0 };
        for ix in 0..nx {
            let wx = if ix == 0 || ix + 1 == nx { 0.5 } else { 1.0 };
            sum += wx * wy * f.get(ix, iy);
        }
    }
    sum * f.grid.x.step() * f.grid.y.step()
}

pub fn wigner(a: WignerArgs) -> Result<bool> {
    let state = a.state.spec()?;
    let channel = a.channel.params(a.state.nbar)?;
    let grid = a.grid()?;
    let method: Method = a.method.into();
    let normalization = a.output.normalization();
    let settings = QuadSettings {
        order: a.order,
        verify: a.check_quadrature,
        ..QuadSettings::default()
    };
    let warnings = warnings_for(&state, &channel, Some(method));
    let field = WignerField::compute(&state, &channel, method, &grid, normalization, &settings)?;

    let mut ok = true;
    let compare = match a.compare {
        Some(other) => {
            let other: Method = other.into();
            let reference = WignerField::compute(&state, &channel, other, &grid, normalization, &settings)?;
            let diff = field.max_abs_diff(&reference)?;
            let pass = a.tol.map(|t| diff <= t);
            if pass == Some(false) {
                eprintln!("{method} vs {other}: max |dW| = {diff:e} exceeds tolerance {}", a.tol.unwrap());
                ok = false;
            } else {
                eprintln!("{method} vs {other}: max |dW| = {diff:e}");
            }
            Some(json!({
                "method": other,
                "max_abs_diff": diff,
                "tol": a.tol,
                "pass": pass,
                "reference_diagnostics": reference.diagnostics,
            }))
        }
        None => None,
    };

    let sidecar = json!({
        "tool": "wigner",
        "version": VERSION,
        "command": "wigner",
        "config": WignerConfig {
            state,
            channel,
            method,
            grid,
            grid_spec: &a.grid,
            order: a.order,
            check_quadrature: a.check_quadrature,
            compare: a.compare.map(Into::into),
            tol: a.tol,
        },
        "normalization": normalization,
        "normalization_integral": 0.5 * normalization.factor(),
        "diagnostics": {
            "field": field.diagnostics,
            "min": field.min(),
            "max": field.max(),
            "grid_integral": grid_integral(&field),
            "compare": compare,
        },
        "warnings": warnings,
    });
    let out = a.output.out.unwrap_or_else(|| PathBuf::from("wigner.csv"));
    write_outputs(&out, |w| field.write_csv(w), &sidecar)?;
    Ok(ok)
}

struct Column {
    name: &'static str,
    values: Vec<f64>,
}

fn pad(mut v: Vec<f64>, len: usize) -> Vec<f64> {
    v.resize(len, 0.0);
    v
}

pub fn pnd(a: PndArgs) -> Result<bool> {
    if a.n_cut == 0 {
        return Err(Usage("--n-cut must be positive".into()).into());
    }
    let state = a.state.spec()?;
    let channel = a.channel.params(a.state.nbar)?;
    let settings = QuadSettings::default();
    let warnings = warnings_for(&state, &channel, None);
    let n_cut = a.n_cut;

    let mut columns = Vec::new();
    let mut regimes: Vec<PndRegime> = Vec::new();
    if let Some((m, z)) = state.pacs_parameters() {
        let closed: Vec<f64> = (0..n_cut)
            .map(|n| {
                pnd_pacs_closed(m, z, &channel, n).map(|c| {
                    if !regimes.contains(&c.regime) {
                        regimes.push(c.regime);
                    }
                    c.value
                })
            })
            .collect::<wigner_core::Result<_>>()?;
        columns.push(Column { name: "p_closed", values: closed });
    }
    let quad = pnd_evolved(&state, &channel, n_cut, &settings)?;
    let quad_tail = quad.tail_bound();
    columns.push(Column { name: "p_quadrature", values: quad.probs().to_vec() });
    let mut oracle_diag = Value::Null;
    if !a.no_oracle {
        let run = run_oracle(&state, &channel)?;
        let dist = pnd_from_density(&run.state);
        oracle_diag = json!({
            "n_max": run.state.n_max(),
            "steps": run.steps,
            "dt": run.dt,
            "trace_drift": run.trace_drift,
        });
        columns.push(Column { name: "p_oracle", values: pad(dist.probs().to_vec(), n_cut) });
    }

    let mut deviations = Vec::new();
    let mut ok = true;
    for i in 0..columns.len() {
        for j in i + 1..columns.len() {
            let d = columns[i]
                .values
                .iter()
                .zip(&columns[j].values)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            let pass = d <= a.tol;
            if !pass {
                eprintln!("{} vs {}: max |dp| = {d:e} exceeds tolerance {}", columns[i].name, columns[j].name, a.tol);
                ok = false;
            }
            deviations.push(json!({
                "a": columns[i].name,
                "b": columns[j].name,
                "max_abs_diff": d,
                "pass": pass,
            }));
        }
    }

    let sidecar = json!({
        "tool": "wigner",
        "version": VERSION,
        "command": "pnd",
        "config": {
            "state": state,
            "channel": channel,
            "n_cut": n_cut,
            "tol": a.tol,
            "oracle": !a.no_oracle,
        },
        "normalization": a.output.normalization(),
        "normalization_note": "photon-number probabilities do not depend on the Wigner normalization",
        "diagnostics": {
            "closed_regimes": regimes,
            "quadrature_tail_bound": quad_tail,
            "oracle": oracle_diag,
            "deviations": deviations,
        },
        "warnings": warnings,
    });
    let out = a.output.out.clone().unwrap_or_else(|| PathBuf::from("pnd.csv"));
    write_outputs(
        &out,
        |w| {
            let names: Vec<&str> = columns.iter().map(|c| c.name).collect();
            writeln!(w, "n,{}", names.join(","))?;
            for n in 0..n_cut {
                let row: Vec<String> = columns.iter().map(|c| sig17(c.values[n])).collect();
                writeln!(w, "{n},{}", row.join(","))?;
            }
            let sums: Vec<String> = columns.iter().map(|c| sig17(c.values.iter().sum())).collect();
            writeln!(w, "sum,{}", sums.join(","))
        },
        &sidecar,
    )?;
    Ok(ok)
}

pub fn tc(a: TcArgs) -> Result<bool> {
    let tc = positivity_time(a.nbar)?;
    println!("nbar {}", a.nbar);
    println!("kappa_t_c {tc:.15}");
    if !a.verify {
        return Ok(true);
    }
    let grid: Grid = a.grid.parse().map_err(|e| Usage(format!("--grid: {e}")))?;
    let state = StateSpec::Pacs { m: a.m, z: a.z };
    state.validate()?;
    let mut ok = true;
    println!("factor kappa_t min_w");
    for factor in [0.5, 1.0, 1.2] {
        let t = factor * tc;
        let p = if a.nbar == 0.0 {
            ChannelParams::damping(1.0, t)
        } else {
            ChannelParams::thermal(1.0, a.nbar, t)
        };
        let values = match a.method {
            MethodArg::Closed => sample_grid(&grid, |alpha| evolve_pacs(a.m, a.z, &p, alpha))?,
            MethodArg::Quadrature => {
                let evolved = Evolved::new(state, p, QuadSettings::default())?;
                sample_grid(&grid, |alpha| Ok(evolved.value(alpha)))?
            }
            MethodArg::Oracle => {
                let run = run_oracle(&state, &p)?;
                sample_grid(&grid, |alpha| wigner_from_density(&run.state, alpha))?
            }
        };
        let min = values.into_iter().fold(f64::INFINITY, f64::min);
        println!("{factor} {t:.15} {min:.6e}");
        if factor >= 1.0 && min < -a.tol {
            eprintln!("negativity {min:e} at {factor} t_c exceeds tolerance {}", a.tol);
            ok = false;
        }
    }
    Ok(ok)
}

pub fn verify(a: VerifyArgs) -> Result<bool> {
    let report = run_verify(VerifyOptions { quick: a.quick, strict: a.strict });
    let mut suites: Vec<&str> = Vec::new();
    for c in &report.cells {
        if !suites.contains(&c.suite.as_str()) {
            suites.push(&c.suite);
        }
    }
    for s in suites {
        let cells: Vec<_> = report.suite(s).collect();
        let pass = cells.iter().filter(|c| c.pass).count();
        let worst = cells
            .iter()
            .filter_map(|c| c.max_deviation.map(f64::abs))
            .fold(0.0, f64::max);
        eprintln!("{s:<24} {pass:>3}/{:<3} worst {worst:.3e}", cells.len());
        for c in cells.iter().filter(|c| !c.pass) {
            eprintln!("  FAIL {} ({:?} > {:e}){}", c.name, c.max_deviation, c.tol,
                c.note.as_deref().map(|n| format!(": {n}")).unwrap_or_default());
        }
    }
    let status = match report.thermal_closed_status {
        SuiteStatus::Pass => "PASS",
        SuiteStatus::Fail => "FAIL",
    };
    if !a.quick {
        eprintln!(
            "published thermal closed form: {status} (max deviation {:.3e}){}",
            report.thermal_closed_max_deviation.unwrap_or(f64::NAN),
            if a.strict { "" } else { ", not counted" }
        );
    }
    eprintln!("{} passed, {} failed, {:.1} s", report.passed, report.failed, report.elapsed_seconds);
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match a.out {
        Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(report.ok)
}
