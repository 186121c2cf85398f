//! Photon-number distributions from Wigner functions: the phase-space
//! overlap with number states, its channel-evolved generalization, and a
//! closed form for photon-added coherent states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{kernel_factors, ChannelKind, ChannelParams};
use crate::phase::{Envelope, PhaseSpaceFn};
use crate::quad::{integrate_enveloped_vec, QuadSettings};
use crate::special::{hermite2, laguerre_sequence, laguerre_unchecked, ln_binomial, ln_factorial};
use crate::states::{StateSpec, MAX_ADDED};

/// Quadrature noise tolerated outside `[0, 1]` before a probability is
/// clamped.
pub const PROB_EPS: f64 = 1e-9;
/// Largest photon number the closed form is evaluated for.
pub const MAX_CLOSED_N: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonNumberDistribution {
    probs: Vec<f64>,
    n_cut: usize,
    tail_bound: f64,
}

impl PhotonNumberDistribution {
    pub(crate) fn from_probs(probs: Vec<f64>, tail_bound: f64) -> Self {
        Self { n_cut: probs.len(), probs, tail_bound }
    }

    /// Checks and clamps computed probabilities; the tail beyond the last
    /// term is extrapolated geometrically from the final two terms.
    pub fn from_computed(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Domain("empty photon-number distribution".into()));
        }
        let mut probs = Vec::with_capacity(raw.len());
        for p in raw {
            if !(-PROB_EPS..=1.0 + PROB_EPS).contains(&p) {
                return Err(Error::Accuracy {
                    what: "probability outside [0, 1]",
                    deviation: if p < 0.0 { -p } else { p - 1.0 },
                    tol: PROB_EPS,
                });
            }
            probs.push(p.clamp(0.0, 1.0));
        }
        let tail_bound = geometric_tail(&probs);
        Ok(Self::from_probs(probs, tail_bound))
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_cut(&self) -> usize {
        self.n_cut
    }

    /// Estimated probability mass at `n ≥ n_cut`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

fn geometric_tail(probs: &[f64]) -> f64 {
    let n = probs.len();
    let last = probs[n - 1];
    if last <= 1e-15 {
        return 0.0;
    }
    if n < 2 || probs[n - 2] <= 0.0 {
        return (1.0 - probs.iter().sum::<f64>()).max(0.0);
    }
    let ratio = last / probs[n - 2];
    if ratio < 1.0 {
        last * ratio / (1.0 - ratio)
    } else {
        (1.0 - probs.iter().sum::<f64>()).max(last)
    }
}

/// Number of terms to compute for a state with the given mean photon number.
pub fn default_n_cut(mean: f64) -> usize {
    ((mean + 8.0 * (mean + 1.0).sqrt()).ceil() as usize).max(16)
}

/// `p(n) = 4π ∫ d²α W_{|n⟩⟨n|}(α) W(α)` for `n < n_cut`.
pub fn pnd_overlap<W: PhaseSpaceFn + ?Sized>(
    w: &W,
    n_cut: usize,
    settings: &QuadSettings,
) -> Result<PhotonNumberDistribution> {
    if n_cut == 0 {
        return Err(Error::Domain("n_cut must be positive".into()));
    }
    let number_env = Envelope::new(Complex64::new(0.0, 0.0), 0.5f64.sqrt(), 2 * (n_cut - 1));
    let env = number_env.product(&w.envelope());
    let mut out = vec![0.0; n_cut];
    integrate_enveloped_vec(
        |alpha, buf: &mut [f64]| {
            let r2 = alpha.norm_sqr();
            let weight = 4.0 * (-2.0 * r2).exp() * w.value(alpha);
            laguerre_sequence(4.0 * r2, buf);
            for (n, b) in buf.iter_mut().enumerate() {
                *b *= if n % 2 == 0 { weight } else { -weight };
            }
        },
        &env,
        settings,
        &mut out,
    )?;
    PhotonNumberDistribution::from_computed(out)
}

/// `(A-1)^n L_n(y / (1 - A²))` for all `n < buf.len()`, continuous through
/// `A = 1`.
fn channel_laguerre(a: f64, y: f64, buf: &mut [f64]) {
    if (1.0 - a).abs() > 1e-6 {
        laguerre_sequence(y / (1.0 - a * a), buf);
        let mut pow = 1.0;
        for b in buf.iter_mut() {
            *b *= pow;
            pow *= a - 1.0;
        }
    } else {
        // Σ_k C(n,k) y^k / k! (A-1)^(n-k) / (1+A)^k
        for (n, b) in buf.iter_mut().enumerate() {
            *b = (0..=n)
                .map(|k| {
                    let coeff = (ln_binomial(n, k) - ln_factorial(k)).exp();
                    coeff * (y / (1.0 + a)).powi(k as i32) * (a - 1.0).powi((n - k) as i32)
                })
                .sum();
        }
    }
}

/// Photon-number distribution after the channel `p`, directly from the
/// initial Wigner function:
///
/// ```text
/// p(n) = 4(A-1)^n / (A+1)^{n+1} ∫ d²β e^{-2d²|β|²/(A+1)} L_n(4d²|β|² / (1-A²)) W₀(β)
/// ```
pub fn pnd_evolved<W: PhaseSpaceFn + ?Sized>(
    w0: &W,
    p: &ChannelParams,
    n_cut: usize,
    settings: &QuadSettings,
) -> Result<PhotonNumberDistribution> {
    p.validate()?;
    if p.t == 0.0 {
        return pnd_overlap(w0, n_cut, settings);
    }
    if n_cut == 0 {
        return Err(Error::Domain("n_cut must be positive".into()));
    }
    let k = kernel_factors(p);
    let (a, d2) = (k.kernel_a, k.decay * k.decay);
    let weight_env = Envelope::new(
        Complex64::new(0.0, 0.0),
        ((a + 1.0) / (2.0 * d2)).sqrt(),
        2 * (n_cut - 1),
    );
    let env = weight_env.product(&w0.envelope());
    let mut out = vec![0.0; n_cut];
    integrate_enveloped_vec(
        |beta, buf: &mut [f64]| {
            let r2 = beta.norm_sqr();
            let weight = (-2.0 * d2 * r2 / (a + 1.0)).exp() * w0.value(beta);
            channel_laguerre(a, 4.0 * d2 * r2, buf);
            for b in buf.iter_mut() {
                *b *= weight;
            }
        },
        &env,
        settings,
        &mut out,
    )?;
    let mut scale = 4.0 / (a + 1.0);
    for v in out.iter_mut() {
        *v *= scale;
        scale /= a + 1.0;
    }
    PhotonNumberDistribution::from_computed(out)
}

/// How a closed-form photon-number value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PndRegime {
    /// Loss-only single sum.
    LossSeries,
    /// General gain/loss double sum.
    GainLossSeries,
    /// `t = 0`: the initial distribution.
    Initial,
    /// Kernel width `A ≥ 1`, where the series has no real form; the value
    /// comes from [`pnd_evolved`] instead.
    QuadratureFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedPnd {
    pub value: f64,
    pub regime: PndRegime,
}

/// `ω, λ, σ, μ` and the prefactor `N` of the gain/loss series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PndFactors {
    pub omega: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub mu: f64,
    /// `N` without its `n`-dependent `(A-1)^n / (A+1)^{n+1}` part:
    /// `4 (-1)^m / L_m(-|z|²)`.
    pub n_base: f64,
}

/// Series factors for `∝ a†^m|z⟩` in channel `p`; `None` when `A ≥ 1`.
pub fn pnd_factors(m: usize, z: Complex64, p: &ChannelParams) -> Option<PndFactors> {
    let k = kernel_factors(p);
    let (a, d) = (k.kernel_a, k.decay);
    if !(a < 1.0) {
        return None;
    }
    let sigma = d / (1.0 - a * a).sqrt();
    let mu = 1.0 + d * d / (a + 1.0);
    let omega = (2.0 - mu) / mu;
    let lambda = 2.0 * sigma / mu;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some(PndFactors {
        omega,
        lambda,
        sigma,
        mu,
        n_base: 4.0 * sign / laguerre_unchecked(m, -z.norm_sqr()),
    })
}

fn hermite_abs2(a: usize, b: usize, root_omega: Complex64, z: Complex64) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    hermite2(a, b, i * root_omega * z, i * root_omega * z.conj()).norm_sqr()
}

fn ln_abs(x: f64) -> f64 {
    x.abs().ln()
}

/// Photon-number distribution of `∝ a†^m|z⟩` at `t = 0`.
fn pacs_initial(m: usize, z: Complex64, n: usize) -> f64 {
    if n < m {
        return 0.0;
    }
    let r2 = z.norm_sqr();
    let k = n - m;
    let ln_pow = if k == 0 { 0.0 } else { k as f64 * r2.ln() };
    (-r2 + ln_pow + ln_factorial(n) - 2.0 * ln_factorial(k) - ln_factorial(m)).exp()
        / laguerre_unchecked(m, -r2)
}

/// Loss-only single sum (`ω = T`, `λσ = 1`):
///
/// ```text
/// p(n) = m!/n! (1-ω)^n / L_m(-|z|²) Σ_l ω^{m-n} e^{-d²|z|²} |H_{m-l,n}(i√ω z, i√ω z*)|² / (l! (m-l)!²)
/// ```
pub(crate) fn pacs_loss_series(m: usize, z: Complex64, kappa: f64, t: f64, n: usize) -> f64 {
    let d2 = (-2.0 * kappa * t).exp();
    let omega = -(-2.0 * kappa * t).exp_m1();
    let root = Complex64::new(omega, 0.0).sqrt();
    let ln_pref = ln_factorial(m) - ln_factorial(n) + n as f64 * (1.0 - omega).ln()
        - laguerre_unchecked(m, -z.norm_sqr()).ln()
        + (m as f64 - n as f64) * omega.ln()
        - d2 * z.norm_sqr();
    (0..=m)
        .map(|l| {
            let h2 = hermite_abs2(m - l, n, root, z);
            if h2 == 0.0 {
                return 0.0;
            }
            (ln_pref - ln_factorial(l) - 2.0 * ln_factorial(m - l) + h2.ln()).exp()
        })
        .sum()
}

/// General gain/loss double sum:
///
/// ```text
/// p(n) = N λ^{2n} e^{(2-2μ)|z|²/μ} / (2μ (-ω)^{n-m})
///        Σ_{l,k} m! n! [ω(λσ-1)/λ²]^k |H_{m-l,n-k}(i√ω z, i√ω z*)|² / (l! k! [(m-l)! (n-k)!]²)
/// ```
///
/// Accumulated as sign times log-magnitude. `root_sign` selects the branch
/// of `√ω`; the result does not depend on it.
pub(crate) fn pacs_gain_loss_series(
    m: usize,
    z: Complex64,
    f: &PndFactors,
    a: f64,
    n: usize,
    root_sign: f64,
) -> f64 {
    let (omega, lambda, sigma, mu) = (f.omega, f.lambda, f.sigma, f.mu);
    let root = Complex64::new(omega, 0.0).sqrt() * root_sign;
    let (nf, mf) = (n as f64, m as f64);

    // prefactor
    let ln_pref = 4f64.ln() + nf * ln_abs(a - 1.0) - (nf + 1.0) * (a + 1.0).ln()
        - ln_abs(laguerre_unchecked(m, -z.norm_sqr()))
        + 2.0 * nf * ln_abs(lambda)
        + (2.0 - 2.0 * mu) * z.norm_sqr() / mu
        - (2.0 * mu).ln()
        - (nf - mf) * ln_abs(omega);
    let mut sign = f.n_base.signum();
    if a < 1.0 && n % 2 == 1 {
        sign = -sign;
    }
    // (-ω)^{-(n-m)}
    let exponent = n as i64 - m as i64;
    if (-omega).signum() < 0.0 && exponent.rem_euclid(2) == 1 {
        sign = -sign;
    }

    let q = omega * (lambda * sigma - 1.0) / (lambda * lambda);
    let ln_fact = ln_factorial(m) + ln_factorial(n);
    let mut sum = 0.0;
    for l in 0..=m {
        for k in 0..=n {
            if k > 0 && q == 0.0 {
                break;
            }
            let h2 = hermite_abs2(m - l, n - k, root, z);
            if h2 == 0.0 {
                continue;
            }
            let ln_q = if k == 0 { 0.0 } else { k as f64 * ln_abs(q) };
            let ln_term = ln_fact + ln_q - ln_factorial(l) - ln_factorial(k)
                - 2.0 * (ln_factorial(m - l) + ln_factorial(n - k))
                + h2.ln();
            let term_sign = if q < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            sum += term_sign * (ln_pref + ln_term).exp();
        }
    }
    sign * sum
}

/// Closed-form `p(n)` for `∝ a†^m|z⟩` after channel `p`.
///
/// Damping uses the loss-only single sum; laser and thermal channels use the
/// gain/loss double sum (thermal through its effective gain and loss rates).
/// Where the kernel width reaches `A ≥ 1` the series has no real form and
/// the value is computed by [`pnd_evolved`] instead, flagged as
/// [`PndRegime::QuadratureFallback`].
pub fn pnd_pacs_closed(m: usize, z: Complex64, p: &ChannelParams, n: usize) -> Result<ClosedPnd> {
    if m > MAX_ADDED {
        return Err(Error::InvalidState(format!("photon-added state m = {m} exceeds {MAX_ADDED}")));
    }
    if n > MAX_CLOSED_N {
        return Err(Error::Unsupported { what: "photon number", value: n as f64, limit: MAX_CLOSED_N as f64 });
    }
    p.validate()?;
    if p.t == 0.0 {
        return Ok(ClosedPnd { value: pacs_initial(m, z, n), regime: PndRegime::Initial });
    }
    if p.kind == ChannelKind::Damping {
        return Ok(ClosedPnd {
            value: pacs_loss_series(m, z, p.kappa, p.t, n),
            regime: PndRegime::LossSeries,
        });
    }
    let a = kernel_factors(p).kernel_a;
    match pnd_factors(m, z, p) {
        Some(f) if f.omega != 0.0 => Ok(ClosedPnd {
            value: pacs_gain_loss_series(m, z, &f, a, n, 1.0),
            regime: PndRegime::GainLossSeries,
        }),
        _ => {
            let spec = StateSpec::Pacs { m, z };
            let dist = pnd_evolved(&spec, p, n + 1, &QuadSettings::default())?;
            Ok(ClosedPnd { value: dist.probs()[n], regime: PndRegime::QuadratureFallback })
        }
    }
}

/// `Σ n p(n)`; refuses distributions whose estimated tail exceeds 1e-6.
pub fn mean_photon(pnd: &PhotonNumberDistribution) -> Result<f64> {
    if pnd.tail_bound() >= 1e-6 {
        return Err(Error::Accuracy {
            what: "photon-number tail too heavy for a mean",
            deviation: pnd.tail_bound(),
            tol: 1e-6,
        });
    }
    Ok(pnd.probs().iter().enumerate().map(|(n, p)| n as f64 * p).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{pnd_from_density, run_oracle};
    use crate::states::StateSpec;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poisson(mean: f64, n: usize) -> f64 {
        (-mean + n as f64 * mean.ln() - ln_factorial(n)).exp()
    }

    #[test]
    fn overlap_examples() {
        let s = QuadSettings::default();
        let vac = pnd_overlap(&StateSpec::Number { n: 0 }, 12, &s).unwrap();
        assert!((vac.probs()[0] - 1.0).abs() < 1e-12);
        assert!(vac.probs()[1..].iter().all(|p| p.abs() < 1e-12));

        let two = pnd_overlap(&StateSpec::Number { n: 2 }, 12, &s).unwrap();
        for (n, p) in two.probs().iter().enumerate() {
            let want = if n == 2 { 1.0 } else { 0.0 };
            assert!((p - want).abs() < 1e-8, "n={n}: {p}");
        }

        let coh = pnd_overlap(&StateSpec::Coherent { z: c(1.0, 0.0) }, 16, &s).unwrap();
        for (n, p) in coh.probs().iter().enumerate() {
            assert!((p - poisson(1.0, n)).abs() < 1e-10);
        }
        assert!((coh.total() + coh.tail_bound() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn evolved_examples() {
        let s = QuadSettings::default();
        let vac = pnd_evolved(&StateSpec::Number { n: 0 }, &ChannelParams::damping(1.0, 0.7), 10, &s).unwrap();
        assert!((vac.probs()[0] - 1.0).abs() < 1e-12);

        for &kt in &[0.2, 0.5, 1.5] {
            let one = pnd_evolved(&StateSpec::Number { n: 1 }, &ChannelParams::damping(1.0, kt), 10, &s).unwrap();
            let e = (-2.0 * kt).exp();
            assert!((one.probs()[1] - e).abs() < 1e-12);
            assert!((one.probs()[0] - (1.0 - e)).abs() < 1e-12);
        }

        let spec = StateSpec::Pacs { m: 2, z: c(0.5, 0.5) };
        let at0 = pnd_evolved(&spec, &ChannelParams::thermal(1.0, 0.5, 0.0), 12, &s).unwrap();
        let direct = pnd_overlap(&spec, 12, &s).unwrap();
        assert_eq!(at0, direct);
        // and continuity as t -> 0
        let tiny = pnd_evolved(&spec, &ChannelParams::thermal(1.0, 0.5, 1e-9), 12, &s).unwrap();
        for (a, b) in tiny.probs().iter().zip(direct.probs()) {
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn evolved_handles_unit_kernel_width() {
        // thermal n̄ = 0.5: A = 2T crosses 1 at T = 1/2
        let t_unit = 0.5 * 2f64.ln() / 1.0;
        let spec = StateSpec::Pacs { m: 1, z: c(1.0, 0.0) };
        let s = QuadSettings::default();
        let at = pnd_evolved(&spec, &ChannelParams::thermal(1.0, 0.5, t_unit), 20, &s).unwrap();
        let near = pnd_evolved(&spec, &ChannelParams::thermal(1.0, 0.5, t_unit + 1e-7), 20, &s).unwrap();
        for (a, b) in at.probs().iter().zip(near.probs()) {
            assert!((a - b).abs() < 1e-6);
        }
        assert!((at.total() + at.tail_bound() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn evolved_matches_overlap_of_evolved_wigner() {
        use crate::evolution::Evolved;
        let spec = StateSpec::Pacs { m: 1, z: c(1.0, 0.0) };
        for p in [ChannelParams::damping(1.0, 0.4), ChannelParams::thermal(1.0, 0.5, 0.6), ChannelParams::laser(1.0, 0.3, 0.5)] {
            let s = QuadSettings::with_order(40);
            let direct = pnd_evolved(&spec, &p, 9, &QuadSettings::default()).unwrap();
            let ev = Evolved::new(spec, p, s).unwrap();
            let two_step = pnd_overlap(&ev, 9, &s).unwrap();
            for n in 0..9 {
                assert!((direct.probs()[n] - two_step.probs()[n]).abs() < 1e-8, "{p:?} n={n}");
            }
        }
    }

    #[test]
    fn closed_examples() {
        let p = ChannelParams::damping(1.0, 0.6);
        assert_relative_eq!(pnd_pacs_closed(0, c(0.0, 0.0), &p, 0).unwrap().value, 1.0, epsilon = 1e-14);
        for &kt in &[0.2, 0.9] {
            let p = ChannelParams::damping(1.0, kt);
            let v = pnd_pacs_closed(1, c(0.0, 0.0), &p, 1).unwrap();
            assert_eq!(v.regime, PndRegime::LossSeries);
            assert_relative_eq!(v.value, (-2.0 * kt).exp(), epsilon = 1e-13);
        }
        let p = ChannelParams::damping(1.0, 0.3);
        let spec = StateSpec::Pacs { m: 1, z: c(1.0, 0.0) };
        let quad = pnd_evolved(&spec, &p, 7, &QuadSettings::default()).unwrap();
        for n in 0..=6 {
            let v = pnd_pacs_closed(1, c(1.0, 0.0), &p, n).unwrap().value;
            assert!((v - quad.probs()[n]).abs() < 1e-6, "n={n}");
        }
    }

    #[test]
    fn closed_at_zero_time_is_initial_distribution() {
        let (m, z) = (2, c(0.8, -0.3));
        let spec = StateSpec::Pacs { m, z };
        let direct = pnd_overlap(&spec, 12, &QuadSettings::default()).unwrap();
        for n in 0..12 {
            let v = pnd_pacs_closed(m, z, &ChannelParams::damping(1.0, 0.0), n).unwrap();
            assert_eq!(v.regime, PndRegime::Initial);
            assert!((v.value - direct.probs()[n]).abs() < 1e-10);
        }
    }

    #[test]
    fn single_and_double_sums_agree_without_gain() {
        for m in 0..=3 {
            for &kt in &[0.05, 0.3, 1.0, 2.5] {
                let z = c(1.0, 0.4);
                let p = ChannelParams::laser(1.0, 0.0, kt);
                let a = kernel_factors(&p).kernel_a;
                let f = pnd_factors(m, z, &p).unwrap();
                assert!((f.lambda * f.sigma - 1.0).abs() < 1e-12);
                assert!((f.omega - a).abs() < 1e-12);
                for n in 0..=10 {
                    let single = pacs_loss_series(m, z, 1.0, kt, n);
                    let double = pacs_gain_loss_series(m, z, &f, a, n, 1.0);
                    assert!((single - double).abs() < 1e-10, "m={m} κt={kt} n={n}: {single} vs {double}");
                }
            }
        }
    }

    #[test]
    fn root_branch_does_not_matter() {
        let z = c(1.0, 0.0);
        let p = ChannelParams::laser(1.0, 0.3, 0.4);
        let a = kernel_factors(&p).kernel_a;
        let f = pnd_factors(2, z, &p).unwrap();
        for n in 0..8 {
            let plus = pacs_gain_loss_series(2, z, &f, a, n, 1.0);
            let minus = pacs_gain_loss_series(2, z, &f, a, n, -1.0);
            assert!((plus - minus).abs() < 1e-14 * plus.abs().max(1.0));
        }
    }

    #[test]
    fn gain_loss_series_matches_quadrature() {
        let channels = [ChannelParams::laser(1.0, 0.3, 0.4), ChannelParams::thermal(1.0, 0.5, 0.2), ChannelParams::laser(1.0, 0.6, 0.2)];
        for p in channels {
            assert!(kernel_factors(&p).kernel_a < 1.0);
            for m in 0..=2 {
                let z = c(1.0, 0.0);
                let quad = pnd_evolved(&StateSpec::Pacs { m, z }, &p, 10, &QuadSettings::default()).unwrap();
                for n in 0..10 {
                    let v = pnd_pacs_closed(m, z, &p, n).unwrap();
                    assert_eq!(v.regime, PndRegime::GainLossSeries);
                    assert!((v.value - quad.probs()[n]).abs() < 1e-9, "{p:?} m={m} n={n}: {} vs {}", v.value, quad.probs()[n]);
                }
            }
        }
    }

    #[test]
    fn wide_kernel_falls_back_to_quadrature() {
        let p = ChannelParams::thermal(1.0, 0.5, 1.0);
        assert!(kernel_factors(&p).kernel_a > 1.0);
        let v = pnd_pacs_closed(1, c(1.0, 0.0), &p, 2).unwrap();
        assert_eq!(v.regime, PndRegime::QuadratureFallback);
        let quad = pnd_evolved(&StateSpec::Pacs { m: 1, z: c(1.0, 0.0) }, &p, 3, &QuadSettings::default()).unwrap();
        assert_eq!(v.value, quad.probs()[2]);
    }

    #[test]
    fn mean_photon_examples() {
        let s = QuadSettings::default();
        let vac = pnd_overlap(&StateSpec::Number { n: 0 }, 16, &s).unwrap();
        assert!(mean_photon(&vac).unwrap().abs() < 1e-12);
        let coh = pnd_overlap(&StateSpec::Coherent { z: c(1.0, 0.0) }, 24, &s).unwrap();
        assert!((mean_photon(&coh).unwrap() - 1.0).abs() < 1e-9);
        for &kt in &[0.3, 1.0] {
            let one = pnd_evolved(&StateSpec::Number { n: 1 }, &ChannelParams::damping(1.0, kt), 16, &s).unwrap();
            assert!((mean_photon(&one).unwrap() - (-2.0 * kt).exp()).abs() < 1e-10);
        }
        let heavy = PhotonNumberDistribution::from_computed(vec![0.5, 0.3, 0.2]).unwrap();
        assert!(mean_photon(&heavy).is_err());
    }

    #[test]
    fn from_computed_checks_range() {
        assert!(PhotonNumberDistribution::from_computed(vec![1.1]).is_err());
        assert!(PhotonNumberDistribution::from_computed(vec![-1e-3, 1.0]).is_err());
        let d = PhotonNumberDistribution::from_computed(vec![1.0 + 1e-12, -1e-12]).unwrap();
        assert_eq!(d.probs(), &[1.0, 0.0]);
        assert!(PhotonNumberDistribution::from_computed(vec![]).is_err());
    }

    #[test]
    fn thermal_bath_relaxes_to_bose_einstein() {
        let nbar = 0.5;
        let p = ChannelParams::thermal(1.0, nbar, 6.0);
        let d = pnd_evolved(&StateSpec::Pacs { m: 1, z: c(1.0, 0.0) }, &p, 20, &QuadSettings::default()).unwrap();
        for n in 0..20 {
            let be = nbar.powi(n as i32) / (nbar + 1.0f64).powi(n as i32 + 1);
            assert!((d.probs()[n] - be).abs() < 1e-4);
        }
    }

    #[test]
    fn damping_mean_decays_exponentially() {
        let spec = StateSpec::Pacs { m: 2, z: c(1.0, 0.0) };
        let s = QuadSettings::default();
        let m0 = mean_photon(&pnd_overlap(&spec, 32, &s).unwrap()).unwrap();
        assert!((m0 - spec.mean_photons()).abs() < 1e-8);
        for &kt in &[0.25, 0.8] {
            let d = pnd_evolved(&spec, &ChannelParams::damping(1.0, kt), 32, &s).unwrap();
            assert!((mean_photon(&d).unwrap() - m0 * (-2.0 * kt).exp()).abs() < 1e-5);
        }
    }

    #[test]
    fn oracle_diagonal_matches_evolved_distribution() {
        let spec = StateSpec::Pacs { m: 2, z: c(1.0, 0.0) };
        let p = ChannelParams::thermal(1.0, 0.5, 0.4);
        let oracle = pnd_from_density(&run_oracle(&spec, &p).unwrap().state);
        let quad = pnd_evolved(&spec, &p, 9, &QuadSettings::default()).unwrap();
        for n in 0..9 {
            assert!((oracle.probs()[n] - quad.probs()[n]).abs() < 1e-5);
        }
    }
}
