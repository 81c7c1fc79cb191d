//! Closed-form separable solutions built from a single temporal rate `b`.

use crate::dispersion::{a_from_b_advection, a_from_b_heat, PhysicalParams};
use crate::error::{Error, Result};

/// `exp(b t) (A1 cosh(a x) + A2 sinh(a x))` for `b > 0`, or
/// `exp(b t) (B1 cos(a x) + B2 sin(a x))` for `b < 0`, where `a` is the
/// magnitude of the spatial rate paired with `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialSolution {
    pub params: PhysicalParams,
    pub b: f64,
    /// Magnitude of the spatial rate.
    pub a: f64,
    /// `[A1, A2, B1, B2]`; the pair not matching the sign of `b` is unused.
    pub coefficients: [f64; 4],
}

impl ExponentialSolution {
    pub fn evaluate(&self, x: f64, t: f64) -> f64 {
        let [a1, a2, b1, b2] = self.coefficients;
        let ax = self.a * x;
        let shape = if self.b > 0.0 {
            a1 * ax.cosh() + a2 * ax.sinh()
        } else {
            b1 * ax.cos() + b2 * ax.sin()
        };
        (self.b * t).exp() * shape
    }

    /// `u_t(x, t + tau) - D u_xx(x, t)` by central differences of step `h`.
    pub fn delayed_heat_residual(&self, x: f64, t: f64, h: f64) -> f64 {
        let tau = self.params.delay;
        let u_t = (self.evaluate(x, t + tau + h) - self.evaluate(x, t + tau - h)) / (2.0 * h);
        let u_xx = (self.evaluate(x + h, t) - 2.0 * self.evaluate(x, t) + self.evaluate(x - h, t))
            / (h * h);
        u_t - self.params.diffusivity * u_xx
    }
}

/// Builds the separable delayed-heat solution for a nonzero real rate `b`.
///
/// `coefficients` is `[A1, A2, B1, B2]`. Requires `epsilon = 0`.
pub fn construct_exponential(
    params: &PhysicalParams,
    b: f64,
    coefficients: [f64; 4],
) -> Result<ExponentialSolution> {
    if b == 0.0 {
        return Err(Error::invalid(
            "b",
            "must be nonzero; b = 0 is the trivial family",
        ));
    }
    if let Some(c) = coefficients.iter().find(|c| !c.is_finite()) {
        return Err(Error::invalid(
            "coefficients",
            format!("must be finite, got {c}"),
        ));
    }
    let roots = a_from_b_heat(params, b)?;
    let a = roots[0].norm();
    Ok(ExponentialSolution {
        params: *params,
        b,
        a,
        coefficients,
    })
}

/// `exp(b t) (A1 exp(a_plus x) + A2 exp(a_minus x))` for the delayed
/// advection-diffusion equation. When the spatial rates form a conjugate pair
/// `alpha +- i beta` the real form `exp(b t + alpha x) (A1 cos(beta x) +
/// A2 sin(beta x))` is used instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvectionExponential {
    pub params: PhysicalParams,
    pub b: f64,
    /// `[a_plus, a_minus]` when real, `[alpha, beta]` when complex.
    pub rates: [f64; 2],
    pub oscillatory: bool,
    pub coefficients: [f64; 2],
}

impl AdvectionExponential {
    pub fn evaluate(&self, x: f64, t: f64) -> f64 {
        let [c1, c2] = self.coefficients;
        let [r1, r2] = self.rates;
        let shape = if self.oscillatory {
            (r1 * x).exp() * (c1 * (r2 * x).cos() + c2 * (r2 * x).sin())
        } else {
            c1 * (r1 * x).exp() + c2 * (r2 * x).exp()
        };
        (self.b * t).exp() * shape
    }

    /// `u_t(x, t + tau) + eps u_x(x, t) - D u_xx(x, t)` by central differences.
    pub fn delayed_residual(&self, x: f64, t: f64, h: f64) -> f64 {
        let tau = self.params.delay;
        let u_t = (self.evaluate(x, t + tau + h) - self.evaluate(x, t + tau - h)) / (2.0 * h);
        let u_x = (self.evaluate(x + h, t) - self.evaluate(x - h, t)) / (2.0 * h);
        let u_xx = (self.evaluate(x + h, t) - 2.0 * self.evaluate(x, t) + self.evaluate(x - h, t))
            / (h * h);
        u_t + self.params.advection * u_x - self.params.diffusivity * u_xx
    }
}

pub fn construct_advection_exponential(
    params: &PhysicalParams,
    b: f64,
    coefficients: [f64; 2],
) -> Result<AdvectionExponential> {
    if b == 0.0 {
        return Err(Error::invalid(
            "b",
            "must be nonzero; b = 0 is the trivial family",
        ));
    }
    if let Some(c) = coefficients.iter().find(|c| !c.is_finite()) {
        return Err(Error::invalid(
            "coefficients",
            format!("must be finite, got {c}"),
        ));
    }
    let [plus, minus] = a_from_b_advection(params, b)?;
    let oscillatory = plus.im != 0.0;
    let rates = if oscillatory {
        [plus.re, plus.im]
    } else {
        [plus.re, minus.re]
    };
    Ok(AdvectionExponential {
        params: *params,
        b,
        rates,
        oscillatory,
        coefficients,
    })
}
