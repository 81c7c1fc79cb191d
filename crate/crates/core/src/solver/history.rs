//! Initial data on the history band `-tau <= t <= 0`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Relative tolerance for `f(0) = f(L) = 0`.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// A spatial profile `f(x)` on `[0, L]`.
///
/// Textual form (used on the command line and in problem files):
///
/// | form                  | profile                                  |
/// |-----------------------|------------------------------------------|
/// | `zero`                | `0`                                      |
/// | `sine:N` / `sine:N:A` | `A sin(N pi x / L)` (`A = 1` by default) |
/// | `sines:N=A,N=A,...`   | sum of sine modes                        |
/// | `parabola[:A]`        | `A x (L - x)`                            |
/// | `pwl:x=y,x=y,...`     | piecewise linear through the knots       |
/// | `samples:v0,v1,...`   | uniform samples over `[0, L]`, linear    |
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Zero,
    Sine { n: u32, amplitude: f64 },
    SineSum(Vec<(u32, f64)>),
    Parabola { amplitude: f64 },
    PiecewiseLinear(Vec<(f64, f64)>),
    Samples(Vec<f64>),
}

impl Profile {
    pub fn eval(&self, x: f64, length: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Sine { n, amplitude } => amplitude * sine_basis(u64::from(*n), x, length),
            Profile::SineSum(terms) => terms
                .iter()
                .map(|&(n, a)| a * sine_basis(u64::from(n), x, length))
                .sum(),
            Profile::Parabola { amplitude } => amplitude * x * (length - x),
            Profile::PiecewiseLinear(knots) => piecewise_linear(knots, x),
            Profile::Samples(values) => {
                let h = length / (values.len() - 1) as f64;
                let knots: Vec<(f64, f64)> = values
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (i as f64 * h, v))
                    .collect();
                piecewise_linear(&knots, x)
            }
        }
    }

    fn check_shape(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        let ok = match self {
            Profile::Zero => true,
            Profile::Sine { n, amplitude } => *n >= 1 && finite(*amplitude),
            Profile::SineSum(terms) => terms.iter().all(|&(n, a)| n >= 1 && finite(a)),
            Profile::Parabola { amplitude } => finite(*amplitude),
            Profile::PiecewiseLinear(knots) => {
                knots.len() >= 2
                    && knots.iter().all(|&(x, y)| finite(x) && finite(y))
                    && knots.windows(2).all(|w| w[0].0 < w[1].0)
            }
            Profile::Samples(values) => values.len() >= 2 && values.iter().all(|&v| finite(v)),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(
                "profile",
                format!("malformed profile `{self}` (need n >= 1, finite values, increasing knots, >= 2 samples)"),
            ))
        }
    }
}

/// `sin(n pi x / L)`, exactly zero at and beyond the endpoints.
pub fn sine_basis(n: u64, x: f64, length: f64) -> f64 {
    if x <= 0.0 || x >= length {
        0.0
    } else {
        (n as f64 * PI * x / length).sin()
    }
}

fn piecewise_linear(knots: &[(f64, f64)], x: f64) -> f64 {
    let (first, last) = (knots[0], knots[knots.len() - 1]);
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = knots.partition_point(|&(kx, _)| kx <= x);
    let (x0, y0) = knots[i - 1];
    let (x1, y1) = knots[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = |items: &mut dyn Iterator<Item = String>| items.collect::<Vec<_>>().join(",");
        match self {
            Profile::Zero => write!(f, "zero"),
            Profile::Sine { n, amplitude } => write!(f, "sine:{n}:{amplitude:?}"),
            Profile::SineSum(terms) => write!(
                f,
                "sines:{}",
                pairs(&mut terms.iter().map(|(n, a)| format!("{n}={a:?}")))
            ),
            Profile::Parabola { amplitude } => write!(f, "parabola:{amplitude:?}"),
            Profile::PiecewiseLinear(knots) => write!(
                f,
                "pwl:{}",
                pairs(&mut knots.iter().map(|(x, y)| format!("{x:?}={y:?}")))
            ),
            Profile::Samples(values) => {
                write!(
                    f,
                    "samples:{}",
                    pairs(&mut values.iter().map(|v| format!("{v:?}")))
                )
            }
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: String| Error::invalid("profile", format!("`{s}`: {why}"));
        let num = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("`{v}` is not a number")))
        };
        let index = |v: &str| -> Result<u32> {
            v.trim()
                .parse::<u32>()
                .map_err(|_| bad(format!("`{v}` is not a mode index")))
        };
        let pair_list = |body: &str| -> Result<Vec<(String, String)>> {
            body.split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    p.split_once('=')
                        .map(|(a, b)| (a.to_string(), b.to_string()))
                        .ok_or_else(|| bad(format!("expected key=value, got `{p}`")))
                })
                .collect()
        };

        let (kind, body) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let profile = match kind {
            "zero" if body.is_empty() => Profile::Zero,
            "sine" => {
                let mut parts = body.split(':');
                let n = index(parts.next().unwrap_or(""))?;
                let amplitude = parts.next().map(num).transpose()?.unwrap_or(1.0);
                if parts.next().is_some() {
                    return Err(bad("expected sine:N or sine:N:A".into()));
                }
                Profile::Sine { n, amplitude }
            }
            "sines" => Profile::SineSum(
                pair_list(body)?
                    .iter()
                    .map(|(n, a)| Ok((index(n)?, num(a)?)))
                    .collect::<Result<_>>()?,
            ),
            "parabola" => Profile::Parabola {
                amplitude: if body.is_empty() { 1.0 } else { num(body)? },
            },
            "pwl" => Profile::PiecewiseLinear(
                pair_list(body)?
                    .iter()
                    .map(|(x, y)| Ok((num(x)?, num(y)?)))
                    .collect::<Result<_>>()?,
            ),
            "samples" => Profile::Samples(body.split(',').map(num).collect::<Result<_>>()?),
            _ => return Err(bad("unknown profile kind".into())),
        };
        profile.check_shape()?;
        Ok(profile)
    }
}

/// History data on `[-tau, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub enum HistorySpec {
    /// `u(x, t) = f(x)` throughout the history band.
    ConstantInTime(Profile),
    /// Values on a uniform grid: rows span `t` in `[-tau, 0]` (a single row
    /// means constant in time), columns span `x` in `[0, L]`. Interpolated
    /// bilinearly.
    Sampled(Array2<f64>),
}

impl HistorySpec {
    pub fn constant(profile: Profile) -> Self {
        HistorySpec::ConstantInTime(profile)
    }

    /// Checks shape, finiteness and `f(0) = f(L) = 0` within [`BOUNDARY_TOL`].
    pub fn validate(&self, length: f64) -> Result<()> {
        match self {
            HistorySpec::ConstantInTime(profile) => {
                profile.check_shape()?;
                let scale = (0..=256)
                    .map(|i| profile.eval(length * i as f64 / 256.0, length).abs())
                    .fold(1.0, f64::max);
                let (left, right) = (profile.eval(0.0, length), profile.eval(length, length));
                if left.abs() > BOUNDARY_TOL * scale || right.abs() > BOUNDARY_TOL * scale {
                    return Err(Error::invalid(
                        "history",
                        format!(
                            "profile `{profile}` violates the Dirichlet conditions: f(0) = {left:e}, f(L) = {right:e}"
                        ),
                    ));
                }
                Ok(())
            }
            HistorySpec::Sampled(values) => {
                let (nt, nx) = values.dim();
                if nt == 0 || nx < 2 {
                    return Err(Error::invalid(
                        "history",
                        format!(
                            "sampled history needs >= 1 time row and >= 2 x samples, got {nt}x{nx}"
                        ),
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid(
                        "history",
                        "sampled history has non-finite values",
                    ));
                }
                let scale = values.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
                for (j, row) in values.rows().into_iter().enumerate() {
                    if row[0].abs() > BOUNDARY_TOL * scale
                        || row[nx - 1].abs() > BOUNDARY_TOL * scale
                    {
                        return Err(Error::invalid(
                            "history",
                            format!("sampled history row {j} is nonzero at a boundary"),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// `u(x, t)` for `t` in `[-tau, 0]`.
    pub fn value_at(&self, x: f64, t: f64, length: f64, delay: f64) -> f64 {
        match self {
            HistorySpec::ConstantInTime(profile) => profile.eval(x, length),
            HistorySpec::Sampled(values) => {
                let (nt, nx) = values.dim();
                let (i0, i1, wx) = bracket(x / length, nx);
                let (j0, j1, wt) = if nt == 1 || delay <= 0.0 {
                    (0, 0, 0.0)
                } else {
                    bracket((t + delay) / delay, nt)
                };
                let lerp = |j: usize| values[[j, i0]] * (1.0 - wx) + values[[j, i1]] * wx;
                lerp(j0) * (1.0 - wt) + lerp(j1) * wt
            }
        }
    }

    pub fn profile(&self) -> Option<&Profile> {
        match self {
            HistorySpec::ConstantInTime(p) => Some(p),
            HistorySpec::Sampled(_) => None,
        }
    }
}

// Neighbouring sample indices and weight for a position s in [0, 1] over n samples.
fn bracket(s: f64, n: usize) -> (usize, usize, f64) {
    let pos = (s.clamp(0.0, 1.0)) * (n - 1) as f64;
    let i0 = (pos.floor() as usize).min(n - 2);
    (i0, i0 + 1, pos - i0 as f64)
}
