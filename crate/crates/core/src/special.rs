//! Special functions and 2-D quadrature over the complex plane.
//!
//! Laguerre polynomials are evaluated by upward three-term recurrence, which
//! is stable for the non-negative and moderately negative arguments that
//! appear in phase-space formulas. Orders above [`MAX_LAGUERRE_ORDER`] are
//! rejected; no asymptotic branch is provided.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::PhasePoint;

/// Highest polynomial order accepted by the Laguerre routines.
pub const MAX_LAGUERRE_ORDER: usize = 64;

/// Highest index for which `ln n!` is tabulated.
const LN_FACTORIAL_TABLE: usize = 1024;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACTORIAL_TABLE + 1);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..=LN_FACTORIAL_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`. Panics above the tabulated range (n > 1024).
pub fn ln_factorial(n: usize) -> f64 {
    ln_factorial_table()[n]
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn check_finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {x}")))
    }
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_LAGUERRE_ORDER {
        return Err(Error::Unsupported {
            what: "Laguerre order",
            value: n as f64,
            limit: MAX_LAGUERRE_ORDER as f64,
        });
    }
    Ok(())
}

/// Laguerre polynomial `L_n(x)`.
pub fn laguerre(n: usize, x: f64) -> Result<f64> {
    check_order(n)?;
    check_finite("x", x)?;
    Ok(laguerre_unchecked(n, x))
}

pub(crate) fn laguerre_unchecked(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[k] = L_k(x)` for `k < out.len()`.
pub(crate) fn laguerre_sequence(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 1.0 - x;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// Generalized Laguerre polynomial `L_n^{(k)}(x)` for integer `k >= -n`.
pub fn assoc_laguerre(n: usize, k: i64, x: f64) -> Result<f64> {
    check_order(n)?;
    check_finite("x", x)?;
    if k < -(n as i64) {
        return Err(Error::Domain(format!(
            "associated Laguerre parameter k={k} below -n={}",
            -(n as i64)
        )));
    }
    Ok(assoc_laguerre_unchecked(n, k as f64, x))
}

pub(crate) fn assoc_laguerre_unchecked(n: usize, k: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + k - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + k - x) * cur - (jf + k) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `c^m · L_m(-x / c)`, which stays finite as `c -> 0` (limit `x^m / m!`).
///
/// Away from `c = 0` this is the Laguerre recurrence; near it the finite
/// expansion `Σ_k C(m,k) x^k c^(m-k) / k!` is summed directly.
pub(crate) fn scaled_laguerre(m: usize, c: f64, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if c.abs() >= 1e-6 {
        return c.powi(m as i32) * laguerre_unchecked(m, -x / c);
    }
    (0..=m)
        .map(|k| {
            let coeff = (ln_binomial(m, k) - ln_factorial(k)).exp();
            coeff * x.powi(k as i32) * c.powi((m - k) as i32)
        })
        .sum()
}

/// Two-variable Hermite polynomial `H_{m,n}(x, y)`.
///
/// `H_{m,n}(x,y) = Σ_l (-1)^l m! n! x^(m-l) y^(n-l) / (l! (m-l)! (n-l)!)`.
/// The integer coefficients are built by their ratio recurrence, so they are
/// exact while below 2^53.
pub fn hermite2(m: usize, n: usize, x: Complex64, y: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut coeff = 1.0;
    for l in 0..=m.min(n) {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * coeff * x.powu((m - l) as u32) * y.powu((n - l) as u32);
        coeff = coeff * ((m - l) * (n - l)) as f64 / (l + 1) as f64;
    }
    acc
}

/// Gauss–Legendre abscissae and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    let mut nodes = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_{n-1}(x) by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = (-x, w);
        nodes[n - 1 - i] = (x, w);
    }
    nodes
}

/// Tensor-product Gauss–Legendre rule on the square box
/// `center ± half_width` (both axes).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<(f64, f64)>,
    order: usize,
    center: PhasePoint,
    half_width: f64,
}

impl QuadratureRule {
    pub fn new(order: usize, center: PhasePoint, half_width: f64) -> Result<Self> {
        if order < 2 {
            return Err(Error::Domain(format!("quadrature order must be >= 2, got {order}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Domain(format!(
                "quadrature half-width must be positive, got {half_width}"
            )));
        }
        Ok(Self {
            nodes: gauss_legendre(order),
            order,
            center,
            half_width,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn center(&self) -> PhasePoint {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Unscaled `(abscissa, weight)` pairs on `[-1, 1]`.
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// Same box, twice the order.
    pub fn refined(&self) -> Self {
        Self {
            nodes: gauss_legendre(2 * self.order),
            order: 2 * self.order,
            center: self.center,
            half_width: self.half_width,
        }
    }

    /// Scaled 1-D points along each axis: `(re offsets, im offsets, weights)`.
    fn axes(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let h = self.half_width;
        let xs = self.nodes.iter().map(|(x, _)| self.center.re + h * x).collect();
        let ys = self.nodes.iter().map(|(x, _)| self.center.im + h * x).collect();
        let ws = self.nodes.iter().map(|(_, w)| h * w).collect();
        (xs, ys, ws)
    }
}

/// `∫∫ f(x + iy) dx dy` over the rule's box.
pub fn integrate_2d<F>(f: F, rule: &QuadratureRule) -> Complex64
where
    F: Fn(PhasePoint) -> Complex64,
{
    let (xs, ys, ws) = rule.axes();
    let mut total = Complex64::new(0.0, 0.0);
    for (y, wy) in ys.iter().zip(&ws) {
        let mut row = Complex64::new(0.0, 0.0);
        for (x, wx) in xs.iter().zip(&ws) {
            row += f(PhasePoint::new(*x, *y)) * *wx;
        }
        total += row * *wy;
    }
    total
}

/// Real-valued specialization of [`integrate_2d`].
pub fn integrate_2d_real<F>(f: F, rule: &QuadratureRule) -> f64
where
    F: Fn(PhasePoint) -> f64,
{
    let (xs, ys, ws) = rule.axes();
    let mut total = 0.0;
    for (y, wy) in ys.iter().zip(&ws) {
        let mut row = 0.0;
        for (x, wx) in xs.iter().zip(&ws) {
            row += f(PhasePoint::new(*x, *y)) * wx;
        }
        total += row * wy;
    }
    total
}

/// Integrates a vector-valued integrand; `f` writes `out.len()` components
/// into its scratch slice and the integrals are accumulated into `out`.
pub(crate) fn integrate_2d_vec<F>(f: F, rule: &QuadratureRule, out: &mut [f64])
where
    F: Fn(PhasePoint, &mut [f64]),
{
    let (xs, ys, ws) = rule.axes();
    let mut scratch = vec![0.0; out.len()];
    out.iter_mut().for_each(|o| *o = 0.0);
    for (y, wy) in ys.iter().zip(&ws) {
        for (x, wx) in xs.iter().zip(&ws) {
            f(PhasePoint::new(*x, *y), &mut scratch);
            let w = wx * wy;
            for (o, s) in out.iter_mut().zip(&scratch) {
                *o += w * s;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Explicit series L_n(x) = Σ_k C(n,k) (-x)^k / k!, exact rational
    // coefficients accumulated in f64.
    fn laguerre_series(n: usize, x: f64) -> f64 {
        let mut sum = 0.0;
        let mut binom = 1.0f64;
        let mut fact = 1.0f64;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
                fact *= k as f64;
            }
            sum += binom * (-x).powi(k as i32) / fact;
        }
        sum
    }

    fn assoc_series(n: usize, a: f64, x: f64) -> f64 {
        // L_n^{(a)}(x) = Σ_j (-1)^j C(n+a, n-j) x^j / j!
        let mut sum = 0.0;
        for j in 0..=n {
            let mut binom = 1.0;
            for i in 0..(n - j) {
                binom *= (n as f64 + a - i as f64) / (i as f64 + 1.0);
            }
            let mut fact = 1.0;
            for i in 1..=j {
                fact *= i as f64;
            }
            sum += (-1f64).powi(j as i32) * binom * x.powi(j as i32) / fact;
        }
        sum
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre(0, 7.3).unwrap(), 1.0);
        assert_relative_eq!(laguerre(1, 2.0).unwrap(), -1.0);
        assert_relative_eq!(laguerre(2, 1.0).unwrap(), laguerre_series(2, 1.0), epsilon = 1e-15);
        assert_relative_eq!(laguerre(2, 1.0).unwrap(), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn laguerre_rejects_bad_input() {
        assert!(matches!(laguerre(3, f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(laguerre(3, f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(laguerre(65, 1.0), Err(Error::Unsupported { .. })));
        assert!(laguerre(64, 1.0).is_ok());
    }

    // Exact rational evaluation of the explicit series at x = p/2.
    fn laguerre_exact(n: usize, half_units: i64) -> f64 {
        use num_rational::BigRational;
        use num_traits::ToPrimitive;
        let x = BigRational::new(half_units.into(), 2.into());
        let mut sum = BigRational::from_integer(0.into());
        let mut term = BigRational::from_integer(1.into());
        for k in 0..=n {
            if k > 0 {
                // term_k = term_{k-1} * (-(n-k+1) x) / k^2
                term = term * BigRational::from_integer((-((n - k + 1) as i64)).into()) * &x
                    / BigRational::from_integer(((k * k) as i64).into());
            }
            sum += &term;
        }
        sum.to_f64().unwrap()
    }

    #[test]
    fn laguerre_matches_series() {
        for n in 0..=30 {
            for p in -40..=40 {
                let x = p as f64 / 2.0;
                let got = laguerre(n, x).unwrap();
                let want = laguerre_exact(n, p);
                assert_relative_eq!(laguerre_series(n, x.min(0.0)), laguerre_exact(n, p.min(0)), max_relative = 1e-12);
                // absolute floor scaled by the recurrence's running magnitude
                let mut seq = vec![0.0; n + 1];
                laguerre_sequence(x, &mut seq);
                let scale = seq.iter().fold(1.0f64, |a, v| a.max(v.abs()));
                let tol = 1e-10 * want.abs() + 1e-12 * scale;
                assert!((got - want).abs() <= tol, "n={n} x={x} got={got} want={want}");
            }
        }
    }

    #[test]
    fn laguerre_sequence_matches_single() {
        let mut buf = [0.0; 12];
        laguerre_sequence(3.7, &mut buf);
        for (n, v) in buf.iter().enumerate() {
            assert_relative_eq!(*v, laguerre(n, 3.7).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn assoc_laguerre_examples() {
        assert_eq!(assoc_laguerre(0, 3, 5.0).unwrap(), 1.0);
        assert_relative_eq!(assoc_laguerre(1, 1, 1.0).unwrap(), 1.0);
        assert_relative_eq!(assoc_laguerre(2, 1, 0.5).unwrap(), 1.625, epsilon = 1e-15);
        assert_relative_eq!(assoc_laguerre(2, 1, 0.5).unwrap(), assoc_series(2, 1.0, 0.5), epsilon = 1e-15);
        assert!(assoc_laguerre(2, -3, 1.0).is_err());
        assert!(assoc_laguerre(2, 1, f64::NAN).is_err());
    }

    #[test]
    fn assoc_laguerre_matches_series() {
        for n in 0..=12 {
            for k in -(n as i64)..=6 {
                for &x in &[0.0, 0.3, 1.7, 4.0, 9.5] {
                    let got = assoc_laguerre(n, k, x).unwrap();
                    let want = assoc_series(n, k as f64, x);
                    assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "n={n} k={k} x={x}");
                }
            }
        }
    }

    #[test]
    fn scaled_laguerre_is_continuous_through_zero() {
        for m in 0..6 {
            let x: f64 = 2.3;
            let limit = x.powi(m as i32) / ln_factorial(m).exp();
            assert_relative_eq!(scaled_laguerre(m, 0.0, x), limit, max_relative = 1e-14);
            for &c in &[1e-7f64, -1e-7, 2e-6, -2e-6, 0.3, -0.4] {
                let direct = if m == 0 { 1.0 } else { c.powi(m as i32) * laguerre_series(m, -x / c) };
                let got = scaled_laguerre(m, c, x);
                assert!((got - direct).abs() < 1e-8 * direct.abs().max(1.0), "m={m} c={c}");
            }
        }
    }

    #[test]
    fn hermite2_examples() {
        let c = |re| Complex64::new(re, 0.0);
        assert_eq!(hermite2(0, 0, c(3.1), Complex64::new(0.2, -9.0)), c(1.0));
        assert!((hermite2(3, 0, c(2.0), c(9.0)) - c(8.0)).norm() < 1e-12);
        assert!((hermite2(1, 1, c(2.0), c(3.0)) - c(5.0)).norm() < 1e-12);
    }

    // Taylor coefficients of exp(t x + t' y - t t') in exact integer
    // arithmetic: coefficient of t^m t'^n times m! n!.
    fn hermite_from_generating_function(m: usize, n: usize, x: i64, y: i64) -> i64 {
        // exp(tx) exp(t'y) exp(-tt') = Σ_{a,b,l} x^a y^b (-1)^l t^(a+l) t'^(b+l) / (a! b! l!)
        // coefficient of t^m t'^n: Σ_l (-1)^l x^(m-l) y^(n-l) / ((m-l)! (n-l)! l!)
        // times m! n! is an integer.
        fn fact(k: usize) -> i128 {
            (1..=k as i128).product::<i128>().max(1)
        }
        let mut acc: i128 = 0;
        for l in 0..=m.min(n) {
            let num = fact(m) * fact(n);
            let den = fact(m - l) * fact(n - l) * fact(l);
            let sign = if l % 2 == 0 { 1 } else { -1 };
            acc += sign * (num / den) * (x as i128).pow((m - l) as u32) * (y as i128).pow((n - l) as u32);
        }
        acc as i64
    }

    #[test]
    fn hermite2_matches_generating_function_coefficients() {
        for m in 0..=4 {
            for n in 0..=4 {
                for &(x, y) in &[(2, 3), (-1, 4), (0, 5), (3, -2)] {
                    let want = hermite_from_generating_function(m, n, x, y);
                    let got = hermite2(m, n, Complex64::new(x as f64, 0.0), Complex64::new(y as f64, 0.0));
                    assert_eq!(got.re.round() as i64, want, "m={m} n={n}");
                    assert!((got.re - want as f64).abs() < 1e-9 && got.im == 0.0);
                }
            }
        }
    }

    #[test]
    fn hermite2_laguerre_bridge() {
        // H_{n,n}(x, y) = (-1)^n n! L_n(xy) when xy is real.
        for n in 0..=15 {
            for &(r, phi) in &[(0.7, 0.3), (1.3, -1.1), (2.0, 2.5), (0.2, 0.0)] {
                let x = Complex64::from_polar(r, phi);
                let y = x.conj() * 1.1;
                let xy = (x * y).re;
                let got = hermite2(n, n, x, y);
                let want = (-1f64).powi(n as i32) * ln_factorial(n).exp() * laguerre(n, xy).unwrap();
                assert!(
                    (got.re - want).abs() <= 1e-9 * want.abs().max(1e-300) && got.im.abs() <= 1e-9 * want.abs().max(1.0),
                    "n={n} got={got} want={want}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn hermite2_conjugate_symmetry(m in 0usize..8, n in 0usize..8, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let x = Complex64::new(re, im);
            let y = x.conj();
            let a = hermite2(m, n, x, y);
            let b = hermite2(n, m, y.conj(), x.conj()).conj();
            prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
        }

        #[test]
        fn gauss_legendre_integrates_polynomials(order in 2usize..40, deg in 0usize..10) {
            prop_assume!(deg < 2 * order);
            let rule = gauss_legendre(order);
            let got: f64 = rule.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            prop_assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn quadrature_rule_invariants() {
        assert!(QuadratureRule::new(1, PhasePoint::ORIGIN, 1.0).is_err());
        assert!(QuadratureRule::new(8, PhasePoint::ORIGIN, 0.0).is_err());
        let rule = QuadratureRule::new(64, PhasePoint::new(0.3, -1.0), 2.5).unwrap();
        assert!(rule.nodes().iter().all(|(_, w)| *w > 0.0));
        let sum: f64 = rule.nodes().iter().map(|(_, w)| w).sum();
        assert_relative_eq!(sum, 2.0, epsilon = 1e-14);
        let area = integrate_2d_real(|_| 1.0, &rule);
        assert_relative_eq!(area, 25.0, epsilon = 1e-12);
    }

    #[test]
    fn integrate_examples() {
        let unit = QuadratureRule::new(8, PhasePoint::ORIGIN, 1.0).unwrap();
        assert_relative_eq!(integrate_2d(|_| Complex64::new(1.0, 0.0), &unit).re, 4.0, epsilon = 1e-14);

        let rule = QuadratureRule::new(80, PhasePoint::ORIGIN, 8.0).unwrap();
        let g = integrate_2d(|b| Complex64::new((-b.norm_sqr()).exp() / std::f64::consts::PI, 0.0), &rule);
        assert!((g.re - 1.0).abs() < 1e-10 && g.im.abs() < 1e-15);
    }

    fn gaussian_identity(zeta: f64, xi: Complex64, eta: Complex64, order: usize) -> Complex64 {
        let rule = QuadratureRule::new(order, PhasePoint::ORIGIN, 8.0).unwrap();
        integrate_2d(
            |b| {
                let z = b.to_complex();
                (zeta * z.norm_sqr() + xi * z + eta * z.conj()).exp() / std::f64::consts::PI
            },
            &rule,
        )
    }

    #[test]
    fn gaussian_integral_identity() {
        let xi = Complex64::new(0.3, 0.0);
        let eta = Complex64::new(0.2, 0.0);
        let got = gaussian_identity(-1.0, xi, eta, 64);
        let want = (-1.0f64 / -1.0) * (0.06f64).exp();
        assert!((got.re - want).abs() < 1e-10 && got.im.abs() < 1e-12);
        assert_relative_eq!(want, 1.061837, epsilon = 1e-6);

        // complex ξ, η and a different ζ
        let xi = Complex64::new(0.4, -0.7);
        let eta = Complex64::new(-0.1, 0.5);
        let zeta = -1.7;
        let got = gaussian_identity(zeta, xi, eta, 64);
        let want = (-xi * eta / zeta).exp() * (-1.0 / zeta);
        assert!((got - want).norm() < 1e-10);

        let doubled = gaussian_identity(zeta, xi, eta, 128);
        assert!((doubled - got).norm() < 1e-12);
    }
}
