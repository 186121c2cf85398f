//! Envelope-driven quadrature: box placement, order selection and the
//! optional order-doubling self-check.

use crate::error::{Error, Result};
use crate::phase::{Envelope, PhasePoint};
use crate::special::{integrate_2d_real, integrate_2d_vec, QuadratureRule};

/// Default Gauss–Legendre order per axis.
pub const DEFAULT_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    /// Minimum order per axis; raised automatically for high-degree integrands.
    pub order: usize,
    /// Re-run every integral at twice the order and fail on disagreement.
    pub verify: bool,
    /// Absolute tolerance of the order-doubling check.
    pub tol: f64,
    /// Overrides the envelope-derived box half-width.
    pub half_width: Option<f64>,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            verify: false,
            tol: 1e-10,
            half_width: None,
        }
    }
}

impl QuadSettings {
    pub fn verified() -> Self {
        Self {
            verify: true,
            ..Self::default()
        }
    }

    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    pub fn rule_for(&self, env: &Envelope) -> Result<QuadratureRule> {
        let order = self.order.max(3 * env.degree + 48);
        let half_width = self.half_width.unwrap_or_else(|| env.box_half_width());
        QuadratureRule::new(order, PhasePoint::from(env.center), half_width)
    }
}

pub(crate) fn integrate_enveloped<F>(f: F, env: &Envelope, settings: &QuadSettings) -> Result<f64>
where
    F: Fn(PhasePoint) -> f64,
{
    let rule = settings.rule_for(env)?;
    let value = integrate_2d_real(&f, &rule);
    if settings.verify {
        let fine = integrate_2d_real(&f, &rule.refined());
        let deviation = (fine - value).abs();
        if !(deviation <= settings.tol) {
            return Err(Error::Accuracy {
                what: "quadrature order doubling",
                deviation,
                tol: settings.tol,
            });
        }
    }
    Ok(value)
}

pub(crate) fn integrate_enveloped_vec<F>(
    f: F,
    env: &Envelope,
    settings: &QuadSettings,
    out: &mut [f64],
) -> Result<()>
where
    F: Fn(PhasePoint, &mut [f64]),
{
    let rule = settings.rule_for(env)?;
    integrate_2d_vec(&f, &rule, out);
    if settings.verify {
        let mut fine = vec![0.0; out.len()];
        integrate_2d_vec(&f, &rule.refined(), &mut fine);
        let deviation = fine
            .iter()
            .zip(out.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if !(deviation <= settings.tol) {
            return Err(Error::Accuracy {
                what: "quadrature order doubling",
                deviation,
                tol: settings.tol,
            });
        }
    }
    Ok(())
}
