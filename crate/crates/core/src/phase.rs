use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point `α = re + i·im` of single-mode phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub re: f64,
    pub im: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { re: 0.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl From<Complex64> for PhasePoint {
    fn from(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }
}

impl From<PhasePoint> for Complex64 {
    fn from(p: PhasePoint) -> Self {
        p.to_complex()
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < 0.0 {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Gaussian envelope bounding a phase-space function:
/// `|f(β)| ≲ poly_degree(β) · exp(-|β - center|² / width²)`.
///
/// Used to place quadrature boxes; it never enters a function value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub center: Complex64,
    pub width: f64,
    pub degree: usize,
}

impl Envelope {
    pub fn new(center: Complex64, width: f64, degree: usize) -> Self {
        Self { center, width, degree }
    }

    /// Envelope of the pointwise product of two enveloped functions.
    pub fn product(&self, other: &Envelope) -> Envelope {
        let p1 = 1.0 / (self.width * self.width);
        let p2 = 1.0 / (other.width * other.width);
        let p = p1 + p2;
        Envelope {
            center: (self.center * p1 + other.center * p2) / p,
            width: (1.0 / p).sqrt(),
            degree: self.degree + other.degree,
        }
    }

    /// Half-side of a square box outside which the enveloped integrand is
    /// negligible at double precision.
    pub fn box_half_width(&self) -> f64 {
        self.width * (7.0 + (self.degree as f64 / 2.0).sqrt())
    }
}

/// A real function on phase space with a known envelope.
pub trait PhaseSpaceFn {
    fn value(&self, alpha: PhasePoint) -> f64;
    fn envelope(&self) -> Envelope;
}

impl<T: PhaseSpaceFn + ?Sized> PhaseSpaceFn for &T {
    fn value(&self, alpha: PhasePoint) -> f64 {
        (**self).value(alpha)
    }
    fn envelope(&self) -> Envelope {
        (**self).envelope()
    }
}

/// Wraps a closure together with a caller-supplied envelope.
#[derive(Clone)]
pub struct Enveloped<F> {
    f: F,
    envelope: Envelope,
}

impl<F: Fn(PhasePoint) -> f64> Enveloped<F> {
    pub fn new(f: F, envelope: Envelope) -> Self {
        Self { f, envelope }
    }
}

impl<F: Fn(PhasePoint) -> f64> PhaseSpaceFn for Enveloped<F> {
    fn value(&self, alpha: PhasePoint) -> f64 {
        (self.f)(alpha)
    }
    fn envelope(&self) -> Envelope {
        self.envelope
    }
}

/// Parses `1.5`, `-2i`, `1.0+0.5i`, `0.3-1e-2i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    // Split at the last sign that is not an exponent sign or the leading sign.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().ok()?,
    };
    Some(Complex64::new(re.parse::<f64>().ok()?, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_literals() {
        assert_eq!(parse_complex("1.0+0.5i"), Some(Complex64::new(1.0, 0.5)));
        assert_eq!(parse_complex("1"), Some(Complex64::new(1.0, 0.0)));
        assert_eq!(parse_complex("-2i"), Some(Complex64::new(0.0, -2.0)));
        assert_eq!(parse_complex("0.3-1e-2i"), Some(Complex64::new(0.3, -0.01)));
        assert_eq!(parse_complex("1e-3+2E+1i"), Some(Complex64::new(1e-3, 20.0)));
        assert_eq!(parse_complex("-1-i"), Some(Complex64::new(-1.0, -1.0)));
        assert_eq!(parse_complex("i"), Some(Complex64::new(0.0, 1.0)));
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex(""), None);
    }

    #[test]
    fn envelope_product_is_gaussian_product() {
        let a = Envelope::new(Complex64::new(1.0, 0.0), 0.5f64.sqrt(), 2);
        let b = Envelope::new(Complex64::new(-1.0, 0.0), 0.5f64.sqrt(), 0);
        let p = a.product(&b);
        assert!((p.center.re).abs() < 1e-15);
        assert!((p.width - 0.5).abs() < 1e-15);
        assert_eq!(p.degree, 2);
    }
}
