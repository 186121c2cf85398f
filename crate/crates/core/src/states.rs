//! Initial-state Wigner functions and their truncated Fock-basis density
//! matrices.
//!
//! Wigner values use the `W = Tr[Δ(α) ρ]`, `Δ(α) = D(2α)(-1)^{a†a} / π`
//! convention, so every Wigner function here integrates to 1/2 over the
//! plane. Multiply by 2 for the usual unit normalization.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::FockDensityMatrix;
use crate::phase::{Envelope, PhaseSpaceFn, PhasePoint};
use crate::quad::{integrate_enveloped, QuadSettings};
use crate::special::{laguerre_unchecked, ln_factorial, MAX_LAGUERRE_ORDER};

/// Largest photon number accepted for number states.
pub const MAX_NUMBER: usize = MAX_LAGUERRE_ORDER;
/// Largest number of added photons accepted for photon-added coherent states.
pub const MAX_ADDED: usize = 30;
/// Population allowed outside a truncated Fock block.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Initial state of the mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    /// Fock state `|n⟩`.
    Number { n: usize },
    /// Coherent state `|z⟩`.
    Coherent { z: Complex64 },
    /// Photon-added coherent state `∝ a†^m |z⟩`.
    Pacs { m: usize, z: Complex64 },
    /// Thermal state with mean occupation `nbar`.
    Thermal { nbar: f64 },
}

impl StateSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StateSpec::Number { n } if n > MAX_NUMBER => Err(Error::InvalidState(format!(
                "number state n = {n} exceeds {MAX_NUMBER}"
            ))),
            StateSpec::Pacs { m, .. } if m > MAX_ADDED => Err(Error::InvalidState(format!(
                "photon-added state m = {m} exceeds {MAX_ADDED}"
            ))),
            StateSpec::Coherent { z } | StateSpec::Pacs { z, .. } if !(z.re.is_finite() && z.im.is_finite()) => {
                Err(Error::InvalidState(format!("amplitude {z} is not finite")))
            }
            StateSpec::Thermal { nbar } if !(nbar >= 0.0 && nbar.is_finite()) => Err(Error::InvalidState(
                format!("thermal occupation {nbar} must be finite and >= 0"),
            )),
            _ => Ok(()),
        }
    }

    /// `(m, z)` when the state is a photon-added coherent state, counting
    /// number (`z = 0`) and coherent (`m = 0`) states.
    pub fn pacs_parameters(&self) -> Option<(usize, Complex64)> {
        match *self {
            StateSpec::Number { n } => Some((n, Complex64::new(0.0, 0.0))),
            StateSpec::Coherent { z } => Some((0, z)),
            StateSpec::Pacs { m, z } => Some((m, z)),
            StateSpec::Thermal { .. } => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            StateSpec::Number { .. } => "number",
            StateSpec::Coherent { .. } => "coherent",
            StateSpec::Pacs { .. } => "pacs",
            StateSpec::Thermal { .. } => "thermal",
        }
    }

    /// Wigner function at `alpha` (half-normalized convention).
    pub fn wigner(&self, alpha: PhasePoint) -> f64 {
        match *self {
            StateSpec::Number { n } => wigner_number(n, alpha),
            StateSpec::Coherent { z } => wigner_coherent(z, alpha),
            StateSpec::Pacs { m, z } => wigner_pacs(m, z, alpha),
            StateSpec::Thermal { nbar } => wigner_thermal(nbar, alpha),
        }
    }

    /// Mean photon number `⟨a†a⟩`.
    pub fn mean_photons(&self) -> f64 {
        match *self {
            StateSpec::Number { n } => n as f64,
            StateSpec::Coherent { z } => z.norm_sqr(),
            StateSpec::Thermal { nbar } => nbar,
            StateSpec::Pacs { m, z } => {
                // ⟨a†a⟩ = ⟨a a†⟩ - 1 with ⟨z|a^{m+1} a†^{m+1}|z⟩ = (m+1)! L_{m+1}(-|z|²)
                let x = -z.norm_sqr();
                (m as f64 + 1.0) * laguerre_unchecked(m + 1, x) / laguerre_unchecked(m, x) - 1.0
            }
        }
    }

    /// Truncation heuristic for the oracle's Fock block.
    pub fn default_n_max(&self) -> usize {
        let from_mean = |mean: f64| -> usize {
            let n = (mean + 8.0 * (mean + 1.0).sqrt()).ceil() as usize;
            n.max(16)
        };
        match *self {
            StateSpec::Number { n } => from_mean(n as f64),
            StateSpec::Coherent { z } => from_mean(z.norm_sqr()),
            StateSpec::Pacs { m, z } => from_mean(z.norm_sqr() + m as f64),
            StateSpec::Thermal { nbar } => thermal_n_max(nbar),
        }
    }
}

/// Smallest block (at least 16 levels) holding all but 1e-12 of a thermal
/// distribution with mean `nbar`.
pub fn thermal_n_max(nbar: f64) -> usize {
    if nbar <= 0.0 {
        return 16;
    }
    let ratio = nbar / (nbar + 1.0);
    let n = (1e-12f64.ln() / ratio.ln()).ceil() as usize;
    n.max(16)
}

impl PhaseSpaceFn for StateSpec {
    fn value(&self, alpha: PhasePoint) -> f64 {
        self.wigner(alpha)
    }

    fn envelope(&self) -> Envelope {
        let half = 0.5f64.sqrt();
        match *self {
            StateSpec::Number { n } => Envelope::new(Complex64::new(0.0, 0.0), half, 2 * n),
            StateSpec::Coherent { z } => Envelope::new(z, half, 0),
            StateSpec::Pacs { m, z } => Envelope::new(z, half, 2 * m),
            StateSpec::Thermal { nbar } => {
                Envelope::new(Complex64::new(0.0, 0.0), ((2.0 * nbar + 1.0) / 2.0).sqrt(), 0)
            }
        }
    }
}

/// `W = ((-1)^n / π) e^{-2|α|²} L_n(4|α|²)`.
pub fn wigner_number(n: usize, alpha: PhasePoint) -> f64 {
    let r2 = alpha.norm_sqr();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign / PI * (-2.0 * r2).exp() * laguerre_unchecked(n, 4.0 * r2)
}

/// `W = e^{-2|α - z|²} / π`.
pub fn wigner_coherent(z: Complex64, alpha: PhasePoint) -> f64 {
    (-2.0 * (alpha.to_complex() - z).norm_sqr()).exp() / PI
}

/// Photon-added coherent state `∝ a†^m |z⟩`:
/// `W = (-1)^m e^{-2|α-z|²} L_m(|2α-z|²) / (π L_m(-|z|²))`.
pub fn wigner_pacs(m: usize, z: Complex64, alpha: PhasePoint) -> f64 {
    let a = alpha.to_complex();
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let norm = laguerre_unchecked(m, -z.norm_sqr());
    sign * (-2.0 * (a - z).norm_sqr()).exp() * laguerre_unchecked(m, (2.0 * a - z).norm_sqr()) / (PI * norm)
}

/// `W = e^{-2|α|²/(2n̄+1)} / (π (2n̄+1))`.
pub fn wigner_thermal(nbar: f64, alpha: PhasePoint) -> f64 {
    let s = 2.0 * nbar + 1.0;
    (-2.0 * alpha.norm_sqr() / s).exp() / (PI * s)
}

/// `∫ W d²α` by quadrature over the state's envelope box (1/2 for a
/// physical state in this convention).
pub fn wigner_integral<W: PhaseSpaceFn + ?Sized>(w: &W, settings: &QuadSettings) -> Result<f64> {
    integrate_enveloped(|a| w.value(a), &w.envelope(), settings)
}

/// `ln |⟨k|z⟩|`-style coherent amplitudes `e^{-|z|²/2} z^k / √k!` for `k ≤ n_max`.
fn coherent_amplitudes(z: Complex64, n_max: usize) -> Vec<Complex64> {
    let r2 = z.norm_sqr();
    if r2 == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); n_max + 1];
        v[0] = Complex64::new(1.0, 0.0);
        return v;
    }
    let (r, phi) = z.to_polar();
    (0..=n_max)
        .map(|k| {
            let ln_mag = -r2 / 2.0 + k as f64 * r.ln() - 0.5 * ln_factorial(k);
            Complex64::from_polar(ln_mag.exp(), k as f64 * phi)
        })
        .collect()
}

/// Pure-state density matrix `|ψ⟩⟨ψ|`.
fn outer(psi: &[Complex64]) -> nalgebra::DMatrix<Complex64> {
    let dim = psi.len();
    nalgebra::DMatrix::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj())
}

/// Truncated density matrix of `spec` on the number states `0..=n_max`.
///
/// The kept block is renormalized to unit trace; a [`Error::Truncation`] is
/// returned if more than [`TAIL_TOLERANCE`] of the population falls outside it.
pub fn fock_density(spec: &StateSpec, n_max: usize) -> Result<FockDensityMatrix> {
    spec.validate()?;
    let dim = n_max + 1;
    let (matrix, tail) = match *spec {
        StateSpec::Number { n } => {
            if n > n_max {
                return Err(Error::Truncation { n_max, tail: 1.0 });
            }
            let mut psi = vec![Complex64::new(0.0, 0.0); dim];
            psi[n] = Complex64::new(1.0, 0.0);
            (outer(&psi), 0.0)
        }
        StateSpec::Coherent { z } => {
            let psi = coherent_amplitudes(z, n_max);
            let kept: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
            (outer(&psi), 1.0 - kept)
        }
        StateSpec::Pacs { m, z } => {
            let mut psi = coherent_amplitudes(z, n_max);
            for _ in 0..m {
                // a† |k⟩ = √(k+1) |k+1⟩, dropping the component pushed past n_max
                for k in (1..dim).rev() {
                    psi[k] = psi[k - 1] * (k as f64).sqrt();
                }
                psi[0] = Complex64::new(0.0, 0.0);
            }
            // ‖a†^m |z⟩‖² = m! L_m(-|z|²)
            let exact = (ln_factorial(m)).exp() * laguerre_unchecked(m, -z.norm_sqr());
            let kept: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
            (outer(&psi), 1.0 - kept / exact)
        }
        StateSpec::Thermal { nbar } => {
            let ratio = nbar / (nbar + 1.0);
            let diag: Vec<f64> = (0..dim).map(|k| ratio.powi(k as i32) / (nbar + 1.0)).collect();
            let tail = if nbar == 0.0 { 0.0 } else { ratio.powi(dim as i32) };
            let m = nalgebra::DMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    Complex64::new(diag[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            (m, tail)
        }
    };
    if tail > TAIL_TOLERANCE {
        return Err(Error::Truncation { n_max, tail });
    }
    let trace: f64 = (0..dim).map(|i| matrix[(i, i)].re).sum();
    Ok(FockDensityMatrix::from_matrix_unchecked(matrix / Complex64::new(trace, 0.0)))
}
