use num_complex::Complex64;
use wasm_bindgen::prelude::*;
use wigner_core::evolution::{evolve_pacs, Evolved};
use wigner_core::field::{sample_grid, Grid};
use wigner_core::photon::pnd_evolved;
use wigner_core::{ChannelParams, PhaseSpaceFn, QuadSettings, StateSpec};

pub fn state(kind: &str, n: usize, m: usize, z: Complex64, nbar: f64) -> wigner_core::Result<StateSpec> {
    let s = match kind {
        "number" => StateSpec::Number { n },
        "coherent" => StateSpec::Coherent { z },
        "pacs" => StateSpec::Pacs { m, z },
        "thermal" => StateSpec::Thermal { nbar },
        _ => return Err(wigner_core::Error::InvalidState(format!("unknown state {kind:?}"))),
    };
    s.validate()?;
    Ok(s)
}

pub fn channel(kind: &str, kappa: f64, g: f64, nbar: f64, t: f64) -> wigner_core::Result<ChannelParams> {
    let p = match kind {
        "damping" => ChannelParams::damping(kappa, t),
        "laser" => ChannelParams::laser(kappa, g, t),
        "thermal" => ChannelParams::thermal(kappa, nbar, t),
        _ => return Err(wigner_core::Error::InvalidChannel(format!("unknown channel {kind:?}"))),
    };
    p.validate()?;
    Ok(p)
}

/// Evolved Wigner values on an `n × n` grid over `[-half, half]²`, `y` outer.
pub fn grid_values(s: &StateSpec, p: &ChannelParams, half: f64, n: usize) -> wigner_core::Result<Vec<f64>> {
    let grid = Grid::square(half, n)?;
    match s.pacs_parameters() {
        Some((m, z)) if m <= wigner_core::states::MAX_ADDED => sample_grid(&grid, |a| evolve_pacs(m, z, p, a)),
        _ => {
            let evolved = Evolved::new(*s, *p, QuadSettings::default())?;
            sample_grid(&grid, |a| Ok(evolved.value(a)))
        }
    }
}

fn js(e: wigner_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Wigner function of the chosen state after the channel, sampled on an
/// `n × n` grid; row-major, `y` outer.
#[wasm_bindgen(js_name = wignerGrid)]
#[allow(clippy::too_many_arguments)]
pub fn wigner_grid(
    state_kind: &str,
    n: usize,
    m: usize,
    z_re: f64,
    z_im: f64,
    nbar: f64,
    channel_kind: &str,
    kappa: f64,
    g: f64,
    bath_nbar: f64,
    t: f64,
    half: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let s = state(state_kind, n, m, Complex64::new(z_re, z_im), nbar).map_err(js)?;
    let p = channel(channel_kind, kappa, g, bath_nbar, t).map_err(js)?;
    grid_values(&s, &p, half, points).map_err(js)
}

/// `p(0) .. p(n_cut - 1)` after the channel.
#[wasm_bindgen(js_name = photonNumbers)]
#[allow(clippy::too_many_arguments)]
pub fn photon_numbers(
    state_kind: &str,
    n: usize,
    m: usize,
    z_re: f64,
    z_im: f64,
    nbar: f64,
    channel_kind: &str,
    kappa: f64,
    g: f64,
    bath_nbar: f64,
    t: f64,
    n_cut: usize,
) -> Result<Vec<f64>, JsError> {
    let s = state(state_kind, n, m, Complex64::new(z_re, z_im), nbar).map_err(js)?;
    let p = channel(channel_kind, kappa, g, bath_nbar, t).map_err(js)?;
    let d = pnd_evolved(&s, &p, n_cut, &QuadSettings::default()).map_err(js)?;
    Ok(d.probs().to_vec())
}

/// `κ t_c` for a bath with mean occupation `nbar`.
#[wasm_bindgen(js_name = positivityTime)]
pub fn positivity_time(nbar: f64) -> Result<f64, JsError> {
    wigner_core::evolution::positivity_time(nbar).map_err(js)
}
