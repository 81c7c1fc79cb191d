//! Algebraic relations between the spatial rate `a` and temporal rate `b` of
//! exponential solutions `u = exp(a x + b t)`.
//!
//! For the delayed heat equation `u_t(x, t + tau) = D u_xx(x, t)` the pair must
//! satisfy `b exp(b tau) = D a^2`; with delayed advection
//! `u_t(x, t + tau) + eps u_x(x, t) = D u_xx(x, t)` it becomes
//! `D a^2 - eps a - b exp(b tau) = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical coefficients shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Diffusivity `D > 0` (length^2 / time).
    pub diffusivity: f64,
    /// Delay `tau >= 0` (time).
    pub delay: f64,
    /// Advection speed `eps >= 0` (length / time); zero for pure diffusion.
    pub advection: f64,
}

impl PhysicalParams {
    pub fn new(diffusivity: f64, delay: f64, advection: f64) -> Result<Self> {
        if !(diffusivity.is_finite() && diffusivity > 0.0) {
            return Err(Error::invalid(
                "D",
                format!("must be > 0 and finite, got {diffusivity}"),
            ));
        }
        if !(delay.is_finite() && delay >= 0.0) {
            return Err(Error::invalid(
                "tau",
                format!("must be >= 0 and finite, got {delay}"),
            ));
        }
        if !(advection.is_finite() && advection >= 0.0) {
            return Err(Error::invalid(
                "epsilon",
                format!("must be >= 0 and finite, got {advection}"),
            ));
        }
        Ok(Self {
            diffusivity,
            delay,
            advection,
        })
    }

    /// Pure delayed diffusion (`epsilon = 0`).
    pub fn heat(diffusivity: f64, delay: f64) -> Result<Self> {
        Self::new(diffusivity, delay, 0.0)
    }

    /// `b exp(b tau)`, the temporal side of both dispersion relations.
    pub fn delayed_rate(&self, b: Complex64) -> Complex64 {
        b * (b * self.delay).exp()
    }
}

/// A spatial/temporal exponent pair `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub a: Complex64,
    pub b: Complex64,
}

impl RatePair {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn real(a: f64, b: f64) -> Self {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }
}

/// Spatial rates of the delayed heat equation for a real temporal rate `b`.
///
/// `b > 0` gives `{+a_plus, -a_plus}` with `a_plus = sqrt(b/D) exp(b tau / 2)`;
/// `b < 0` gives `{+i a_minus, -i a_minus}` with
/// `a_minus = sqrt(|b|/D) exp(-|b| tau / 2)`. `b = 0` is the degenerate double
/// root `a = 0` and is returned as a single entry.
pub fn a_from_b_heat(params: &PhysicalParams, b: f64) -> Result<Vec<Complex64>> {
    if params.advection != 0.0 {
        return Err(Error::invalid(
            "epsilon",
            "pure heat dispersion requires epsilon = 0; use a_from_b_advection",
        ));
    }
    if !b.is_finite() {
        return Err(Error::invalid("b", format!("must be finite, got {b}")));
    }
    if b == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0)]);
    }
    let magnitude = (b.abs() / params.diffusivity).sqrt() * (b * params.delay / 2.0).exp();
    let roots = if b > 0.0 {
        vec![
            Complex64::new(magnitude, 0.0),
            Complex64::new(-magnitude, 0.0),
        ]
    } else {
        vec![
            Complex64::new(0.0, magnitude),
            Complex64::new(0.0, -magnitude),
        ]
    };
    Ok(roots)
}

/// `|b exp(b tau) - D a^2|`.
pub fn dispersion_residual_heat(params: &PhysicalParams, pair: &RatePair) -> f64 {
    (params.delayed_rate(pair.b) - params.diffusivity * pair.a * pair.a).norm()
}

/// Both roots of `D a^2 - eps a - b exp(b tau) = 0`, ordered `[a_plus, a_minus]`.
///
/// A negative discriminant yields a complex-conjugate pair. For `b > 0` the
/// roots are real with `a_minus < 0 < a_plus` and `a_plus > |a_minus|`.
pub fn a_from_b_advection(params: &PhysicalParams, b: f64) -> Result<[Complex64; 2]> {
    if !b.is_finite() {
        return Err(Error::invalid("b", format!("must be finite, got {b}")));
    }
    let d = params.diffusivity;
    let eps = params.advection;
    let forcing = b * (b * params.delay).exp();
    let disc = eps * eps + 4.0 * d * forcing;
    if disc >= 0.0 {
        let plus = (eps + disc.sqrt()) / (2.0 * d);
        // Product of roots is -forcing / D; avoids cancellation in eps - sqrt(disc).
        let minus = if plus == 0.0 {
            0.0
        } else {
            -forcing / (d * plus)
        };
        Ok([Complex64::new(plus, 0.0), Complex64::new(minus, 0.0)])
    } else {
        let re = eps / (2.0 * d);
        let im = (-disc).sqrt() / (2.0 * d);
        Ok([Complex64::new(re, im), Complex64::new(re, -im)])
    }
}

/// `|D a^2 - eps a - b exp(b tau)|`.
pub fn dispersion_residual_advection(params: &PhysicalParams, pair: &RatePair) -> f64 {
    (params.diffusivity * pair.a * pair.a - params.advection * pair.a - params.delayed_rate(pair.b))
        .norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn heat(d: f64, tau: f64) -> PhysicalParams {
        PhysicalParams::heat(d, tau).unwrap()
    }

    fn close(a: Complex64, re: f64, im: f64) -> bool {
        (a - Complex64::new(re, im)).norm() <= 1e-14 * (re.abs() + im.abs()).max(1.0)
    }

    #[test]
    fn heat_examples() {
        let r = a_from_b_heat(&heat(1.0, 0.0), 1.0).unwrap();
        assert!(close(r[0], 1.0, 0.0) && close(r[1], -1.0, 0.0));
        let r = a_from_b_heat(&heat(1.0, 2.0), 1.0).unwrap();
        assert!(close(r[0], E, 0.0) && close(r[1], -E, 0.0));
        let r = a_from_b_heat(&heat(4.0, 0.0), -1.0).unwrap();
        assert!(close(r[0], 0.0, 0.5) && close(r[1], 0.0, -0.5));
        assert_eq!(r[0].re, 0.0);
    }

    #[test]
    fn heat_degenerate_and_invalid() {
        assert_eq!(
            a_from_b_heat(&heat(1.0, 1.0), 0.0).unwrap(),
            vec![Complex64::new(0.0, 0.0)]
        );
        let adv = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        assert!(a_from_b_heat(&adv, 1.0).is_err());
        assert!(a_from_b_heat(&heat(1.0, 0.0), f64::NAN).is_err());
    }

    #[test]
    fn heat_residual_examples() {
        assert_eq!(
            dispersion_residual_heat(&heat(1.0, 0.0), &RatePair::real(1.0, 1.0)),
            0.0
        );
        let r = dispersion_residual_heat(&heat(1.0, 1.0), &RatePair::real(E.sqrt(), 1.0));
        assert!(r <= 1e-15);
        let r = dispersion_residual_heat(&heat(1.0, 1.0), &RatePair::real(1.0, 1.0));
        assert!((r - (E - 1.0)).abs() <= 1e-15);
    }

    #[test]
    fn advection_examples() {
        let r = a_from_b_advection(&heat(1.0, 0.0), 1.0).unwrap();
        assert!(close(r[0], 1.0, 0.0) && close(r[1], -1.0, 0.0));
        let p = PhysicalParams::new(1.0, 0.0, 3.0).unwrap();
        let r = a_from_b_advection(&p, -2.0).unwrap();
        assert!(close(r[0], 2.0, 0.0) && close(r[1], 1.0, 0.0));

        // Quadratic-formula oracle for r^2 - r - e = 0.
        let p = PhysicalParams::new(1.0, 1.0, 1.0).unwrap();
        let r = a_from_b_advection(&p, 1.0).unwrap();
        let oracle = [
            (1.0 + (1.0 + 4.0 * E).sqrt()) / 2.0,
            (1.0 - (1.0 + 4.0 * E).sqrt()) / 2.0,
        ];
        for (root, expected) in r.iter().zip(oracle) {
            assert!((root.re - expected).abs() <= 1e-14);
            assert!((root * root - root - E).norm() <= 1e-12);
        }
    }

    #[test]
    fn advection_residual_examples() {
        let r = dispersion_residual_advection(&heat(1.0, 0.0), &RatePair::real(1.0, 1.0));
        assert_eq!(r, 0.0);
        let p = PhysicalParams::new(1.0, 0.0, 2.0).unwrap();
        assert_eq!(
            dispersion_residual_advection(&p, &RatePair::real(2.0, 0.0)),
            0.0
        );
        let p = PhysicalParams::new(2.0, 1.0, 1.0).unwrap();
        let r = dispersion_residual_advection(&p, &RatePair::real(1.0, 1.0));
        assert!((r - (E - 1.0)).abs() <= 1e-15);
    }

    #[test]
    fn advection_negative_discriminant_is_conjugate_pair() {
        let p = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        let r = a_from_b_advection(&p, -1.0).unwrap();
        assert_eq!(r[0], r[1].conj());
        assert!(r[0].im > 0.0);
        for a in r {
            let res =
                dispersion_residual_advection(&p, &RatePair::new(a, Complex64::new(-1.0, 0.0)));
            assert!(res <= 1e-14);
        }
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::new(0.0, 1.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, -1.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.0, -0.1).is_err());
        assert!(PhysicalParams::new(f64::NAN, 0.0, 0.0).is_err());
    }
}
