//! Lambert W function on every integer branch.
//!
//! `W_k(z)` is the `k`-th solution `w` of `w e^w = z`. Branch cuts follow the
//! usual convention: `W_0` is cut along `(-inf, -1/e)`, every other branch
//! along `(-inf, 0)`, and values on a cut are the limits taken from above
//! (`Im z -> 0+`). With that convention `W_k(conj z) = conj W_{-k}(z)` for `z`
//! off the negative real axis, and `W_{-1}` is real on `[-1/e, 0)`.
//!
//! Evaluation is Halley's method started from a branch-aware initial guess:
//! the series in `p = sqrt(2(e z + 1))` near the branch point, a Padé
//! approximant near the origin on the principal branch, and the asymptotic
//! form `L - ln L` with `L = ln z + 2 pi i k` elsewhere.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest branch index accepted by [`lambert_w`].
pub const MAX_BRANCH: i32 = 1_000_000;

/// Halley iteration cap.
pub const MAX_ITERATIONS: usize = 64;

/// Defining-identity tolerance of the complex evaluator, relative for `|z| > 1`.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// Defining-identity tolerance of the real evaluator, relative for `|x| > 1`.
pub const REAL_RESIDUAL_TOL: f64 = 1e-14;

const INV_E: f64 = 1.0 / E;

/// Inputs within this distance of `-1/e` are treated as the branch point itself.
const BRANCH_POINT_BAND: f64 = 4.0 * f64::EPSILON * INV_E;

/// Below this `|p|` the branch-point series is already exact to rounding.
const SERIES_ONLY_RADIUS: f64 = 1e-3;

const SCALED_BELOW: f64 = 1e-100;
const SCALED_ABOVE: f64 = 1e100;

// Coefficients of W = sum mu_j p^j around the branch point.
const BRANCH_SERIES: [f64; 12] = [
    -1.0,
    1.0,
    -1.0 / 3.0,
    11.0 / 72.0,
    -43.0 / 540.0,
    769.0 / 17280.0,
    -221.0 / 8505.0,
    680863.0 / 43545600.0,
    -1963.0 / 204120.0,
    226287557.0 / 37623398400.0,
    -0.003811298034892,
    0.002440877991143983,
];

/// Evaluates `W_k(z)`.
///
/// Fails with [`Error::Domain`] for `z = 0` on a non-principal branch (a
/// logarithmic singularity), for non-finite input, and for `|k| > MAX_BRANCH`.
/// If the iteration does not reach `|w e^w - z| <= 1e-12 max(1, |z|)` the
/// result is [`Error::NoConvergence`] carrying the last iterate.
pub fn lambert_w(k: i32, z: Complex64) -> Result<Complex64> {
    if k.unsigned_abs() > MAX_BRANCH as u32 {
        return Err(Error::Domain {
            branch: k,
            z,
            reason: "branch index exceeds MAX_BRANCH",
        });
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain {
            branch: k,
            z,
            reason: "argument is not finite",
        });
    }
    // -0.0 would select the value below the cut.
    let z = Complex64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im });

    if z.re == 0.0 && z.im == 0.0 {
        return if k == 0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::Domain {
                branch: k,
                z,
                reason: "W_k(0) is singular for k != 0",
            })
        };
    }

    // Real-valued segments go through the real evaluator so both agree exactly.
    if z.im == 0.0 {
        let x = z.re;
        let on_real_segment = match k {
            0 => x >= -INV_E - BRANCH_POINT_BAND,
            -1 => (-INV_E - BRANCH_POINT_BAND..0.0).contains(&x),
            _ => false,
        };
        if on_real_segment {
            return lambert_w_real(k, x).map(|w| Complex64::new(w, 0.0));
        }
    }

    let near_branch_point = (z + INV_E).norm() < 0.3;
    let mut w =
        if near_branch_point && (k == 0 || (k == -1 && z.im >= 0.0) || (k == 1 && z.im < 0.0)) {
            let p = (2.0 * (E * z + 1.0)).sqrt();
            let p = if k == 0 { p } else { -p };
            let series = branch_series(p);
            if p.norm() < SERIES_ONLY_RADIUS {
                return verified(k, z, series, 0);
            }
            series
        } else if k == 0 && in_pade_region(z) {
            pade_near_origin(z)
        } else {
            let l1 = z.ln() + Complex64::new(0.0, 2.0 * PI * f64::from(k));
            l1 - l1.ln()
        };

    // For extreme |z| the products below leave the f64 range, so the iteration
    // runs on g(w) = w - exp(ln z - w) = e^{-w} f(w) instead.
    let scaled = !(SCALED_BELOW..=SCALED_ABOVE).contains(&z.norm());
    let ln_z = z.ln();

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let wp1 = w + 1.0;
        let delta = if scaled {
            let g = w - (ln_z - w).exp();
            g / (wp1 - (w + 2.0) * g / (2.0 * wp1))
        } else {
            let ew = w.exp();
            let f = w * ew - z;
            if f.re == 0.0 && f.im == 0.0 {
                break;
            }
            f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        };
        if !delta.re.is_finite() || !delta.im.is_finite() {
            break;
        }
        w -= delta;
        if delta.norm() <= 4.0 * f64::EPSILON * w.norm() {
            break;
        }
    }
    verified(k, z, w, iterations)
}

/// Evaluates `W_k(x)` for real `x` on the two real branches.
///
/// `k = 0` accepts `x >= -1/e`; `k = -1` accepts `-1/e <= x < 0`. Any other
/// branch, or `x` below `-1/e`, is a domain error since no real solution exists.
pub fn lambert_w_real(k: i32, x: f64) -> Result<f64> {
    let domain = |reason| Error::Domain {
        branch: k,
        z: Complex64::new(x, 0.0),
        reason,
    };
    if k != 0 && k != -1 {
        return Err(domain(
            "real evaluation is only defined on branches 0 and -1",
        ));
    }
    if !x.is_finite() {
        return Err(domain("argument is not finite"));
    }
    if (x + INV_E).abs() <= BRANCH_POINT_BAND {
        return Ok(-1.0);
    }
    if x < -INV_E {
        return Err(domain("no real solution below -1/e"));
    }
    if k == 0 && x == 0.0 {
        return Ok(0.0);
    }
    if k == -1 && x >= 0.0 {
        return Err(domain("W_-1 is real only on [-1/e, 0)"));
    }

    let p = (2.0 * (E * x + 1.0)).sqrt();
    let mut w = if p < 0.5 {
        let p = if k == 0 { p } else { -p };
        let series = branch_series_real(p);
        if p.abs() < SERIES_ONLY_RADIUS {
            return verified_real(k, x, series, 0);
        }
        series
    } else if k == 0 {
        if x < 1.0 {
            pade_near_origin(Complex64::new(x, 0.0)).re
        } else if x < 3.0 {
            // Winitzki's approximation, good to a few percent on [1, 3].
            let l = x.ln_1p();
            l * (1.0 - (1.0 + l).ln() / (2.0 + l))
        } else {
            let l1 = x.ln();
            let l2 = l1.ln();
            l1 - l2 + l2 / l1
        }
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        let delta = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        if !delta.is_finite() {
            break;
        }
        w -= delta;
        if delta.abs() <= 4.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    verified_real(k, x, w, iterations)
}

/// `|w e^w - z|`, the defining-identity residual.
pub fn residual(w: Complex64, z: Complex64) -> f64 {
    (w * w.exp() - z).norm()
}

fn verified(k: i32, z: Complex64, w: Complex64, iterations: usize) -> Result<Complex64> {
    let res = residual(w, z);
    if res.is_finite() && res <= RESIDUAL_TOL * z.norm().max(1.0) {
        Ok(w)
    } else {
        Err(Error::NoConvergence {
            branch: k,
            z,
            last: w,
            residual: res,
            iterations,
        })
    }
}

fn verified_real(k: i32, x: f64, w: f64, iterations: usize) -> Result<f64> {
    let res = (w * w.exp() - x).abs();
    if res.is_finite() && res <= REAL_RESIDUAL_TOL * x.abs().max(1.0) {
        Ok(w)
    } else {
        Err(Error::NoConvergence {
            branch: k,
            z: Complex64::new(x, 0.0),
            last: Complex64::new(w, 0.0),
            residual: res,
            iterations,
        })
    }
}

fn branch_series(p: Complex64) -> Complex64 {
    BRANCH_SERIES
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * p + c)
}

fn branch_series_real(p: f64) -> f64 {
    BRANCH_SERIES.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

fn in_pade_region(z: Complex64) -> bool {
    z.re > -1.0 && z.re < 1.5 && z.im.abs() < 1.0 && -2.5 * z.im.abs() - 0.2 < z.re
}

// (3,2) Padé approximant of W_0 about the origin.
fn pade_near_origin(z: Complex64) -> Complex64 {
    let num = 12.851_063_829_787_234 + z * (12.340_425_531_914_894 + z);
    let den = 32.531_914_893_617_02 + z * (14.340_425_531_914_894 + z);
    z * num / den
}
