//! Gaussian evolution kernels for the loss, laser (gain + loss) and thermal
//! channels, and closed forms for photon-added coherent states.
//!
//! Every channel acts on the Wigner function as
//!
//! ```text
//! W(α, t) = (2/A) ∫ d²β/π  exp[-(2/A) |α - β·d|²]  W(β, 0)
//! ```
//!
//! with amplitude factor `d = e^{-(κ_eff - g_eff) t}` and kernel width `A`
//! from [`kernel_factors`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::{Envelope, PhaseSpaceFn, PhasePoint};
use crate::quad::{integrate_enveloped, QuadSettings};
use crate::special::{laguerre_unchecked, scaled_laguerre};
use crate::states::MAX_ADDED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    /// Pure photon loss at rate κ.
    Damping,
    /// Gain g and loss κ.
    Laser,
    /// Loss into a bath with mean occupation n̄.
    Thermal,
}

/// Channel selection, rates and evolution time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub kind: ChannelKind,
    pub kappa: f64,
    pub g: f64,
    pub nbar: f64,
    pub t: f64,
}

impl ChannelParams {
    pub fn damping(kappa: f64, t: f64) -> Self {
        Self { kind: ChannelKind::Damping, kappa, g: 0.0, nbar: 0.0, t }
    }

    pub fn laser(kappa: f64, g: f64, t: f64) -> Self {
        Self { kind: ChannelKind::Laser, kappa, g, nbar: 0.0, t }
    }

    pub fn thermal(kappa: f64, nbar: f64, t: f64) -> Self {
        Self { kind: ChannelKind::Thermal, kappa, g: 0.0, nbar, t }
    }

    /// Same channel, different time.
    pub fn at(self, t: f64) -> Self {
        Self { t, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidChannel(msg));
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return bad(format!("t must be >= 0, got {}", self.t));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return bad(format!("g must be >= 0, got {}", self.g));
        }
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return bad(format!("nbar must be >= 0, got {}", self.nbar));
        }
        match self.kind {
            ChannelKind::Damping if self.g != 0.0 || self.nbar != 0.0 => {
                bad("damping channel requires g = 0 and nbar = 0".into())
            }
            ChannelKind::Laser if self.nbar != 0.0 => bad("laser channel takes g, not nbar".into()),
            ChannelKind::Thermal if self.g != 0.0 => bad("thermal channel takes nbar, not g".into()),
            _ => Ok(()),
        }
    }

    /// Rate multiplying the `2aρa† - a†aρ - ρa†a` term.
    pub fn loss_rate(&self) -> f64 {
        match self.kind {
            ChannelKind::Thermal => self.kappa * (self.nbar + 1.0),
            _ => self.kappa,
        }
    }

    /// Rate multiplying the `2a†ρa - aa†ρ - ρaa†` term.
    pub fn gain_rate(&self) -> f64 {
        match self.kind {
            ChannelKind::Damping => 0.0,
            ChannelKind::Laser => self.g,
            ChannelKind::Thermal => self.kappa * self.nbar,
        }
    }

    /// Gain exceeds loss: amplitudes grow without bound.
    pub fn is_amplifying(&self) -> bool {
        self.gain_rate() > self.loss_rate()
    }
}

/// Per-time factors of the evolution kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelFactors {
    /// `T = 1 - e^{-2κt}` (for the laser channel, `1 - d²`).
    pub t_factor: f64,
    /// Kernel width `A`; equals `T` for damping and `(2n̄+1)T` for thermal.
    pub kernel_a: f64,
    /// Amplitude factor `d`.
    pub decay: f64,
}

/// Kernel factors of `p`, continuous through `κ_eff = g_eff`.
pub fn kernel_factors(p: &ChannelParams) -> KernelFactors {
    let (loss, gain) = (p.loss_rate(), p.gain_rate());
    let net = loss - gain;
    let decay = (-net * p.t).exp();
    let t_factor = match p.kind {
        ChannelKind::Laser => -(-2.0 * net * p.t).exp_m1(),
        _ => -(-2.0 * p.kappa * p.t).exp_m1(),
    };
    let kernel_a = match p.kind {
        ChannelKind::Damping => t_factor,
        ChannelKind::Thermal => (2.0 * p.nbar + 1.0) * t_factor,
        ChannelKind::Laser => {
            if net == 0.0 {
                2.0 * (loss + gain) * p.t
            } else {
                (loss + gain) * (-(-2.0 * net * p.t).exp_m1()) / net
            }
        }
    };
    KernelFactors { t_factor, kernel_a, decay }
}

/// Envelope of the evolved function given the initial envelope.
fn evolved_envelope(initial: &Envelope, k: &KernelFactors) -> Envelope {
    let w2 = k.decay * k.decay * initial.width * initial.width + k.kernel_a / 2.0;
    Envelope::new(initial.center * k.decay, w2.sqrt(), initial.degree)
}

fn evolve_with_factors<W: PhaseSpaceFn + ?Sized>(
    w0: &W,
    k: &KernelFactors,
    alpha: PhasePoint,
    settings: &QuadSettings,
) -> Result<f64> {
    let a = alpha.to_complex();
    let d = k.decay;
    let width = k.kernel_a;
    let kernel_env = Envelope::new(a / d, (width / 2.0).sqrt() / d, 0);
    let env = kernel_env.product(&w0.envelope());
    let integral = integrate_enveloped(
        |beta| (-2.0 / width * (a - beta.to_complex() * d).norm_sqr()).exp() * w0.value(beta),
        &env,
        settings,
    )?;
    Ok(2.0 / (width * PI) * integral)
}

/// Wigner function at time `p.t` by quadrature of the channel kernel
/// against `w0`. At `t = 0` returns `w0(alpha)`.
pub fn evolve_wigner<W: PhaseSpaceFn + ?Sized>(
    w0: &W,
    p: &ChannelParams,
    alpha: PhasePoint,
    settings: &QuadSettings,
) -> Result<f64> {
    p.validate()?;
    if p.t == 0.0 {
        return Ok(w0.value(alpha));
    }
    evolve_with_factors(w0, &kernel_factors(p), alpha, settings)
}

/// An initial Wigner function carried through a channel; evaluates by
/// quadrature.
#[derive(Debug, Clone)]
pub struct Evolved<W> {
    initial: W,
    channel: ChannelParams,
    factors: KernelFactors,
    settings: QuadSettings,
}

impl<W: PhaseSpaceFn> Evolved<W> {
    pub fn new(initial: W, channel: ChannelParams, settings: QuadSettings) -> Result<Self> {
        channel.validate()?;
        Ok(Self {
            initial,
            channel,
            factors: kernel_factors(&channel),
            settings: QuadSettings { verify: false, ..settings },
        })
    }

    pub fn channel(&self) -> &ChannelParams {
        &self.channel
    }
}

impl<W: PhaseSpaceFn> PhaseSpaceFn for Evolved<W> {
    fn value(&self, alpha: PhasePoint) -> f64 {
        if self.channel.t == 0.0 {
            return self.initial.value(alpha);
        }
        // verification is off, so only a malformed rule can fail, and the
        // envelope-derived box is always well formed
        evolve_with_factors(&self.initial, &self.factors, alpha, &self.settings)
            .expect("quadrature rule from a valid envelope")
    }

    fn envelope(&self) -> Envelope {
        evolved_envelope(&self.initial.envelope(), &self.factors)
    }
}

fn check_added(m: usize) -> Result<()> {
    if m > MAX_ADDED {
        return Err(Error::InvalidState(format!("photon-added state m = {m} exceeds {MAX_ADDED}")));
    }
    Ok(())
}

/// Closed-form Wigner function of the photon-added coherent state
/// `∝ a†^m|z⟩` after photon loss at rate `kappa` for time `t`:
///
/// ```text
/// W = c^m e^{-2|α - z e^{-κt}|²} L_m(-|2α e^{-κt} + c z|² / c) / (π L_m(-|z|²)),
/// c = 1 - 2e^{-2κt}
/// ```
///
/// `c^m L_m(-x/c)` is evaluated in a form that is regular at `c = 0`.
pub fn evolve_pacs_damping(m: usize, z: Complex64, kappa: f64, t: f64, alpha: PhasePoint) -> Result<f64> {
    check_added(m)?;
    ChannelParams::damping(kappa, t).validate()?;
    let d = (-kappa * t).exp();
    let c = 1.0 - 2.0 * d * d;
    let a = alpha.to_complex();
    let b = 2.0 * a * d + c * z;
    let gauss = (-2.0 * (a - z * d).norm_sqr()).exp();
    Ok(scaled_laguerre(m, c, b.norm_sqr()) * gauss / (PI * laguerre_unchecked(m, -z.norm_sqr())))
}

/// Closed-form evolved Wigner function of `∝ a†^m|z⟩` for any of the three
/// channels, from the kernel factors `A`, `d`:
///
/// ```text
/// s = d² + A,   c = (A - d²) / s
/// W = c^m e^{-2|α - d z|²/s} L_m(-|2αd/s + c z|² / c) / (π s L_m(-|z|²))
/// ```
///
/// Reduces to [`evolve_pacs_damping`] when `s = 1`. `c ≥ 0` exactly when
/// the evolved function is nonnegative for every `m`.
pub fn evolve_pacs(m: usize, z: Complex64, p: &ChannelParams, alpha: PhasePoint) -> Result<f64> {
    check_added(m)?;
    p.validate()?;
    let k = kernel_factors(p);
    Ok(pacs_from_factors(m, z, &k, alpha))
}

pub(crate) fn pacs_from_factors(m: usize, z: Complex64, k: &KernelFactors, alpha: PhasePoint) -> f64 {
    let d = k.decay;
    let s = d * d + k.kernel_a;
    let c = (k.kernel_a - d * d) / s;
    let a = alpha.to_complex();
    let b = 2.0 * a * d / s + c * z;
    let gauss = (-2.0 * (a - z * d).norm_sqr() / s).exp();
    scaled_laguerre(m, c, b.norm_sqr()) * gauss / (PI * s * laguerre_unchecked(m, -z.norm_sqr()))
}

/// The published closed form for `∝ a†^m|z⟩` in a thermal bath, transcribed
/// term by term (its `A`, `B`, `C` are local to this formula and unrelated
/// to the kernel width).
///
/// This expression is checked against quadrature rather than trusted; see
/// [`crate::verify`]. It agrees with [`evolve_pacs_damping`] at `nbar = 0`.
pub fn evolve_pacs_thermal(
    m: usize,
    z: Complex64,
    kappa: f64,
    nbar: f64,
    t: f64,
    alpha: PhasePoint,
) -> Result<f64> {
    check_added(m)?;
    ChannelParams::thermal(kappa, nbar, t).validate()?;
    if t == 0.0 {
        return Err(Error::Domain("closed thermal form requires t > 0".into()));
    }
    let e = (-kappa * t).exp();
    let tt = -(-2.0 * kappa * t).exp_m1();
    let n = nbar;
    let beta = alpha.to_complex();
    let zc = z.conj();
    let bc = beta.conj();

    let pacs_a = 1.0 - (e * e / tt) / ((2.0 * tt * n + 1.0) * (n + 1.0));
    let pacs_b = ((n + 1.0) * tt / (n * tt + 1.0)).sqrt() * zc
        + (n * tt + 1.0).sqrt() * e * (2.0 * bc - zc * e / (n * tt + 1.0))
            / ((2.0 * n * tt + 1.0) * ((n + 1.0) * tt).sqrt());
    let cross = (z * bc + beta * zc).re;
    let pacs_c = ((3.0 * n * tt + 2.0) / (tt * n + 1.0) * (z * e).norm_sqr()
        + 4.0 * tt * tt * n * n * beta.norm_sqr())
        / (2.0 * n * tt + 1.0)
        - 2.0 * e * (tt * n + 1.0) / (2.0 * n * tt + 1.0) * cross;

    let ratio = (n + 1.0) * tt / (n * tt + 1.0);
    let value = (-pacs_c - 2.0 * beta.norm_sqr()).exp() / (PI * laguerre_unchecked(m, -z.norm_sqr()))
        / (2.0 * n * tt + 1.0)
        * ratio.powi(m as i32)
        * scaled_laguerre(m, pacs_a, pacs_b.norm_sqr());
    Ok(value)
}

/// `κ t_c = ½ ln(2(n̄+1) / (2n̄+1))`: from this time on the evolved
/// photon-added coherent state has a nonnegative Wigner function.
pub fn positivity_time(nbar: f64) -> Result<f64> {
    if !(nbar >= 0.0) {
        return Err(Error::Domain(format!("nbar must be >= 0, got {nbar}")));
    }
    if nbar.is_infinite() {
        return Ok(0.0);
    }
    Ok(0.5 * (2.0 * (nbar + 1.0) / (2.0 * nbar + 1.0)).ln())
}

/// Minimum of `f` over an `n × n` grid on `[-half, half]²`.
pub fn grid_minimum<F: Fn(PhasePoint) -> f64>(f: F, half: f64, n: usize) -> f64 {
    let step = 2.0 * half / (n - 1) as f64;
    let mut min = f64::INFINITY;
    for j in 0..n {
        for i in 0..n {
            let v = f(PhasePoint::new(-half + step * i as f64, -half + step * j as f64));
            min = min.min(v);
        }
    }
    min
}
