//! Brute-force reference path: truncated Fock-space master-equation
//! integration and Wigner reconstruction by displaced parity.
//!
//! Nothing here uses the Gaussian kernels of [`crate::evolution`]; the two
//! paths share only the special-function primitives.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::ChannelParams;
use crate::phase::PhasePoint;
use crate::photon::PhotonNumberDistribution;
use crate::special::ln_factorial;
use crate::states::{fock_density, thermal_n_max, StateSpec};

/// Largest Fock block the oracle will integrate.
pub const MAX_ORACLE_N: usize = 256;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-8;
const EIGEN_TOL: f64 = 1e-9;
/// Trace drift above this aborts an integration.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-5;

/// Density matrix on the number states `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    rho: DMatrix<Complex64>,
}

impl FockDensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(rho: DMatrix<Complex64>) -> Result<Self> {
        if !rho.is_square() || rho.nrows() == 0 {
            return Err(Error::Domain(format!("density matrix must be square, got {:?}", rho.shape())));
        }
        let herm = (&rho - rho.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::Accuracy { what: "Hermiticity", deviation: herm, tol: HERMITIAN_TOL });
        }
        let out = Self { rho };
        let drift = (out.trace() - 1.0).abs();
        if drift > TRACE_TOL {
            return Err(Error::Accuracy { what: "unit trace", deviation: drift, tol: TRACE_TOL });
        }
        let min = out.min_eigenvalue();
        if min < -EIGEN_TOL {
            return Err(Error::Accuracy { what: "positivity", deviation: -min, tol: EIGEN_TOL });
        }
        Ok(out)
    }

    pub(crate) fn from_matrix_unchecked(rho: DMatrix<Complex64>) -> Self {
        Self { rho }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rho[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(self.rho.clone());
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Re-embeds into a block with `n_max` as its top level (zero padded).
    pub fn padded(&self, n_max: usize) -> Self {
        let dim = n_max + 1;
        let old = self.dim();
        let rho = DMatrix::from_fn(dim, dim, |i, j| {
            if i < old && j < old {
                self.rho[(i, j)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { rho }
    }
}

/// Right-hand side of
/// `dρ/dt = G(2a†ρa - aa†ρ - ρaa†) + L(2aρa† - a†aρ - ρa†a)`
/// with loss rate `L` and gain rate `G` from the channel.
///
/// `a` and `a†` are the truncated ladder matrices, so `aa†` has a zero in its
/// top diagonal entry and the truncated generator is exactly trace-free.
pub fn lindblad_rhs(rho: &FockDensityMatrix, p: &ChannelParams) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(rho.dim(), rho.dim());
    rhs_into(&rho.rho, p.loss_rate(), p.gain_rate(), &mut out);
    out
}

fn rhs_into(rho: &DMatrix<Complex64>, loss: f64, gain: f64, out: &mut DMatrix<Complex64>) {
    let dim = rho.nrows();
    let top = dim - 1;
    let sq: Vec<f64> = (0..=dim).map(|k| (k as f64).sqrt()).collect();
    // diagonal of aa† in the truncated block
    let aad = |i: usize| if i == top { 0.0 } else { (i + 1) as f64 };
    for j in 0..dim {
        for i in 0..dim {
            let r = rho[(i, j)];
            let mut v = -(loss * (i + j) as f64 + gain * (aad(i) + aad(j))) * r;
            if i < top && j < top {
                v += 2.0 * loss * sq[i + 1] * sq[j + 1] * rho[(i + 1, j + 1)];
            }
            if i > 0 && j > 0 {
                v += 2.0 * gain * sq[i] * sq[j] * rho[(i - 1, j - 1)];
            }
            out[(i, j)] = v;
        }
    }
}

fn hermitize(m: &mut DMatrix<Complex64>) {
    let dim = m.nrows();
    for j in 0..dim {
        m[(j, j)].im = 0.0;
        for i in (j + 1)..dim {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Result of a fixed-step integration.
#[derive(Debug, Clone)]
pub struct DensityEvolution {
    pub state: FockDensityMatrix,
    pub steps: usize,
    pub dt: f64,
    /// `|Tr ρ(t) - Tr ρ(0)|`.
    pub trace_drift: f64,
}

/// Step count for `p`: `dt = min(0.01/κ, t/100)`, further capped so that
/// `dt` times the largest decay rate of the block stays below 0.25.
pub fn default_steps(p: &ChannelParams, dim: usize) -> usize {
    if p.t == 0.0 {
        return 1;
    }
    let fastest = 2.0 * (p.loss_rate() + p.gain_rate()) * dim as f64;
    let dt = (0.01 / p.kappa).min(p.t / 100.0).min(0.25 / fastest);
    (p.t / dt).ceil() as usize
}

/// Classic fourth-order Runge–Kutta integration of the master equation over
/// `[0, p.t]` in `steps` equal steps, re-Hermitizing after every step.
pub fn evolve_density(rho0: &FockDensityMatrix, p: &ChannelParams, steps: usize) -> Result<DensityEvolution> {
    p.validate()?;
    if steps == 0 {
        return Err(Error::Domain("steps must be positive".into()));
    }
    let dt = p.t / steps as f64;
    if p.kappa * dt > 0.01 * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "step too coarse: κ·dt = {} exceeds 0.01",
            p.kappa * dt
        )));
    }
    let (loss, gain) = (p.loss_rate(), p.gain_rate());
    let dim = rho0.dim();
    let mut rho = rho0.rho.clone();
    let mut k1 = DMatrix::zeros(dim, dim);
    let mut k2 = DMatrix::zeros(dim, dim);
    let mut k3 = DMatrix::zeros(dim, dim);
    let mut k4 = DMatrix::zeros(dim, dim);
    let h = Complex64::new(dt, 0.0);
    let half = Complex64::new(dt / 2.0, 0.0);
    for _ in 0..steps {
        rhs_into(&rho, loss, gain, &mut k1);
        rhs_into(&(&rho + &k1 * half), loss, gain, &mut k2);
        rhs_into(&(&rho + &k2 * half), loss, gain, &mut k3);
        rhs_into(&(&rho + &k3 * h), loss, gain, &mut k4);
        rho += (&k1 + &k2 * Complex64::new(2.0, 0.0) + &k3 * Complex64::new(2.0, 0.0) + &k4) * (h / 6.0);
        hermitize(&mut rho);
    }
    let state = FockDensityMatrix { rho };
    let trace_drift = (state.trace() - rho0.trace()).abs();
    if trace_drift > TRACE_DRIFT_LIMIT {
        return Err(Error::Accuracy {
            what: "trace drift during integration",
            deviation: trace_drift,
            tol: TRACE_DRIFT_LIMIT,
        });
    }
    Ok(DensityEvolution { state, steps, dt, trace_drift })
}

/// Fock block size for evolving `spec` through `p`: the state heuristic, the
/// bath occupation, and for amplifying channels the growth `e^{2(g-κ)t}`,
/// plus 8 levels of headroom.
pub fn oracle_n_max(spec: &StateSpec, p: &ChannelParams) -> Result<usize> {
    let mut n = spec.default_n_max();
    let (loss, gain) = (p.loss_rate(), p.gain_rate());
    if gain > 0.0 && loss > gain {
        // stationary occupation of the gain-loss channel
        n = n.max(thermal_n_max(gain / (loss - gain)));
    }
    if gain >= loss {
        let growth = (2.0 * (gain - loss) * p.t).exp();
        let mean = (spec.mean_photons() + 1.0) * growth + 2.0 * (loss + gain) * p.t;
        let inflated = (n as f64 * growth).max(mean + 8.0 * (mean + 1.0).sqrt());
        if !(inflated <= MAX_ORACLE_N as f64) {
            return Err(Error::Refused(format!(
                "amplifying channel needs a Fock block of ~{inflated:.0} levels (cap {MAX_ORACLE_N})"
            )));
        }
        n = inflated.ceil() as usize;
    }
    let n = n + 8;
    if n > MAX_ORACLE_N {
        return Err(Error::Refused(format!("Fock block {n} exceeds cap {MAX_ORACLE_N}")));
    }
    Ok(n)
}

/// Builds the initial density matrix and integrates it through `p` with the
/// default block size and step count.
pub fn run_oracle(spec: &StateSpec, p: &ChannelParams) -> Result<DensityEvolution> {
    let n_max = oracle_n_max(spec, p)?;
    let rho0 = fock_density(spec, n_max)?;
    if p.t == 0.0 {
        return Ok(DensityEvolution { state: rho0, steps: 0, dt: 0.0, trace_drift: 0.0 });
    }
    evolve_density(&rho0, p, default_steps(p, n_max + 1))
}

/// `W(α) = Tr[D(2α)(-1)^{a†a} ρ] / π` from the matrix elements
/// `⟨m|D(β)|n⟩ = √(n!/m!) β^{m-n} e^{-|β|²/2} L_n^{(m-n)}(|β|²)` (`m ≥ n`).
pub fn wigner_from_density(rho: &FockDensityMatrix, alpha: PhasePoint) -> Result<f64> {
    let dim = rho.dim();
    let beta = 2.0 * alpha.to_complex();
    let x = beta.norm_sqr();
    let (r, phi) = beta.to_polar();
    let ln_r = if r > 0.0 { r.ln() } else { f64::NEG_INFINITY };
    let mut lag = vec![0.0; dim];
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..dim {
        // L_n^{(k)}(x) for n = 0..dim-k by upward recurrence in n
        let len = dim - k;
        let kf = k as f64;
        lag[0] = 1.0;
        if len > 1 {
            lag[1] = 1.0 + kf - x;
        }
        for n in 1..len.saturating_sub(1) {
            let nf = n as f64;
            lag[n + 1] = ((2.0 * nf + 1.0 + kf - x) * lag[n] - (nf + kf) * lag[n - 1]) / (nf + 1.0);
        }
        for n in 0..len {
            let m = n + k;
            let ln_mag = 0.5 * (ln_factorial(n) - ln_factorial(m)) - x / 2.0
                + if k == 0 { 0.0 } else { kf * ln_r };
            let mag = ln_mag.exp() * lag[n];
            let parity_n = if n % 2 == 0 { 1.0 } else { -1.0 };
            // ⟨m|D|n⟩ with m = n + k
            let d_mn = Complex64::from_polar(1.0, kf * phi) * mag;
            acc += rho.rho[(n, m)] * d_mn * parity_n;
            if k > 0 {
                // ⟨n|D|m⟩ = √(n!/m!) (-β*)^k e^{-x/2} L_n^{(k)}(x)
                let d_nm = Complex64::from_polar(1.0, -kf * phi) * mag * if k % 2 == 0 { 1.0 } else { -1.0 };
                let parity_m = if m % 2 == 0 { 1.0 } else { -1.0 };
                acc += rho.rho[(m, n)] * d_nm * parity_m;
            }
        }
    }
    let w = acc / PI;
    if w.im.abs() > 1e-10 {
        return Err(Error::Accuracy { what: "imaginary Wigner residue", deviation: w.im.abs(), tol: 1e-10 });
    }
    Ok(w.re)
}

/// Photon-number distribution `p(n) = ⟨n|ρ|n⟩` of the kept block.
pub fn pnd_from_density(rho: &FockDensityMatrix) -> PhotonNumberDistribution {
    let probs: Vec<f64> = (0..rho.dim()).map(|i| rho.rho[(i, i)].re).collect();
    let tail = (1.0 - probs.iter().sum::<f64>()).abs();
    PhotonNumberDistribution::from_probs(probs, tail)
}
