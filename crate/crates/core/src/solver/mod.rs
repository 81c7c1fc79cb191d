//! Exact modal solution of the Dirichlet problem.
//!
//! The history is expanded in sine modes; each modal amplitude obeys
//! `T'(t) = -lambda_n T(t - tau)` with `T = c_n` on `[-tau, 0]`, which the
//! method of steps integrates exactly: on every delay interval the amplitude
//! is a polynomial obtained by integrating the previous one.

mod exponential;
mod history;

use ndarray::Array2;
use rayon::prelude::*;

use crate::dispersion::PhysicalParams;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::spectrum::{Mode, Problem};

pub use exponential::{
    construct_advection_exponential, construct_exponential, AdvectionExponential,
    ExponentialSolution,
};
pub use history::{sine_basis, HistorySpec, Profile, BOUNDARY_TOL};

/// Composite Simpson node count used by [`sine_decompose`].
pub const SIMPSON_NODES: usize = 2049;

/// Default number of sine modes.
pub const DEFAULT_N_MAX: usize = 32;

/// Largest number of delay intervals [`evolve_mode`] will integrate.
pub const MAX_SEGMENTS: usize = 10_000;

// Trailing coefficients below this fraction of the largest are dropped; the
// discarded mass sits far under the rounding error of Horner evaluation.
const TRIM_RATIO: f64 = 1e-22;

/// Sine coefficients `c_n`, `n = 1..=n_max` stored at index `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalCoefficients {
    pub coeffs: Vec<f64>,
}

impl ModalCoefficients {
    pub fn get(&self, n: usize) -> f64 {
        self.coeffs[n - 1]
    }

    /// Truncated series `sum c_n sin(n pi x / L)`.
    pub fn reconstruct(&self, x: f64, length: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * sine_basis(i as u64 + 1, x, length))
            .sum()
    }
}

/// `c_n = (2/L) int_0^L f(x) sin(n pi x / L) dx` by composite Simpson on
/// [`SIMPSON_NODES`] nodes, for `n = 1..=problem.n_max`.
pub fn sine_decompose(problem: &Problem, history: &HistorySpec) -> Result<ModalCoefficients> {
    let length = problem.length;
    history.validate(length)?;
    let profile = history.profile().ok_or_else(|| {
        Error::Unsupported("sine decomposition needs a history that is constant in time".into())
    })?;

    let intervals = SIMPSON_NODES - 1;
    let h = length / intervals as f64;
    let weighted: Vec<(f64, f64)> = (0..SIMPSON_NODES)
        .map(|i| {
            let x = i as f64 * h;
            let w = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (x, w * profile.eval(x, length))
        })
        .collect();

    let coeffs = (1..=problem.n_max as u64)
        .map(|n| {
            let sum: f64 = weighted
                .iter()
                .map(|&(x, wf)| wf * sine_basis(n, x, length))
                .sum();
            2.0 / length * h / 3.0 * sum
        })
        .collect();
    Ok(ModalCoefficients { coeffs })
}

/// One delay interval of a modal trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// Left end `(m - 1) tau` of the interval.
    pub start: f64,
    /// Coefficients in the local variable `s = (t - start) / tau` in `[0, 1]`,
    /// lowest degree first.
    pub coefficients: Vec<f64>,
}

impl Segment {
    pub fn eval(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * s + c)
    }

    /// Derivative with respect to the local variable `s`.
    pub fn eval_derivative(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (j, &c)| acc * s + j as f64 * c)
    }
}

/// Piecewise-polynomial amplitude of one mode under constant history.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrajectory {
    pub mode: Mode,
    pub delay: f64,
    pub history_value: f64,
    pub segments: Vec<Segment>,
}

impl ModeTrajectory {
    /// Right end of the last segment.
    pub fn t_end(&self) -> f64 {
        self.segments.len() as f64 * self.delay
    }

    /// `T(t)`; the history value for `t <= 0`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(self.history_value);
        }
        let (segment, s) = self.locate(t)?;
        Ok(segment.eval(s))
    }

    /// `T'(t)` for `t > 0`.
    pub fn derivative_at(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let (segment, s) = self.locate(t)?;
        Ok(segment.eval_derivative(s) / self.delay)
    }

    /// Amplitude samples at the requested times.
    pub fn sample(&self, times: &[f64]) -> Result<Vec<f64>> {
        times.iter().map(|&t| self.value_at(t)).collect()
    }

    fn locate(&self, t: f64) -> Result<(&Segment, f64)> {
        let last = self.segments.len();
        let reach = self.t_end() * (1.0 + 4.0 * f64::EPSILON);
        if t.is_nan() || t > reach {
            return Err(Error::invalid(
                "t",
                format!(
                    "time {t} is beyond the integrated range [0, {}]",
                    self.t_end()
                ),
            ));
        }
        let m = ((t / self.delay).ceil() as usize).clamp(1, last);
        let segment = &self.segments[m - 1];
        Ok((segment, (t - segment.start) / self.delay))
    }
}

/// Integrates `T'(t) = -lambda T(t - tau)` with `T = c` on `[-tau, 0]` up to
/// `t_end` by the method of steps.
///
/// On `[0, tau]` the amplitude is `c (1 - lambda t)`; every later interval is
/// the previous polynomial integrated once more, so the result is exact up to
/// rounding. Fails with [`Error::ResourceLimit`] beyond [`MAX_SEGMENTS`]
/// intervals.
pub fn evolve_mode(
    mode: &Mode,
    params: &PhysicalParams,
    c: f64,
    t_end: f64,
) -> Result<ModeTrajectory> {
    let tau = params.delay;
    if tau <= 0.0 {
        return Err(Error::invalid("tau", "method of steps needs tau > 0"));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::invalid(
            "t_end",
            format!("must be > 0 and finite, got {t_end}"),
        ));
    }
    if !c.is_finite() {
        return Err(Error::invalid("c", format!("must be finite, got {c}")));
    }
    let ratio = t_end / tau;
    if ratio > MAX_SEGMENTS as f64 {
        return Err(Error::ResourceLimit(format!(
            "t_end / tau = {ratio:.0} delay intervals exceeds the cap of {MAX_SEGMENTS}"
        ))
        .in_mode(mode.n));
    }
    let count = ((ratio * (1.0 - 4.0 * f64::EPSILON)).ceil() as usize).max(1);
    // Each step scales by q because the local variable is normalised to [0, 1].
    let q = mode.delay_product;

    let mut previous = vec![c];
    let mut segments = Vec::with_capacity(count);
    for m in 0..count {
        let start_value = previous.iter().rev().fold(0.0, |acc, &a| acc + a);
        let mut coefficients = Vec::with_capacity(previous.len() + 1);
        coefficients.push(start_value);
        coefficients.extend(
            previous
                .iter()
                .enumerate()
                .map(|(j, &a)| -q * a / (j + 1) as f64),
        );
        let scale = coefficients.iter().fold(0.0, |mx: f64, a| mx.max(a.abs()));
        while coefficients.len() > 1
            && coefficients
                .last()
                .is_some_and(|a| a.abs() <= TRIM_RATIO * scale)
        {
            coefficients.pop();
        }
        segments.push(Segment {
            start: m as f64 * tau,
            coefficients: coefficients.clone(),
        });
        previous = coefficients;
    }

    Ok(ModeTrajectory {
        mode: *mode,
        delay: tau,
        history_value: c,
        segments,
    })
}

/// Samples `u(x, t) = sum_n T_n(t) sin(n pi x / L)` on the given grid.
///
/// Needs a history that is constant in time. Without delay the amplitudes are
/// `c_n exp(-lambda_n t)`. Sample times may reach back into `[-tau, 0]`.
pub fn solve_ibvp(problem: &Problem, t_samples: &[f64], x_samples: &[f64]) -> Result<Field> {
    let length = problem.length;
    let params = problem.params;
    if let Some(&x) = x_samples.iter().find(|&&x| !(0.0..=length).contains(&x)) {
        return Err(Error::invalid(
            "x",
            format!("sample {x} lies outside [0, {length}]"),
        ));
    }
    if let Some(&t) = t_samples
        .iter()
        .find(|&&t| !t.is_finite() || t < -params.delay)
    {
        return Err(Error::invalid(
            "t",
            format!("sample {t} lies before the history band [-tau, 0]"),
        ));
    }
    let coefficients = sine_decompose(problem, &problem.history)?;
    let t_max = t_samples.iter().copied().fold(0.0, f64::max);

    let amplitudes = (1..=problem.n_max as u64)
        .into_par_iter()
        .map(|n| {
            let mode = problem.mode(n)?;
            let c = coefficients.get(n as usize);
            if params.delay == 0.0 {
                return Ok(t_samples
                    .iter()
                    .map(|&t| {
                        if t <= 0.0 {
                            c
                        } else {
                            c * (-mode.decay_rate * t).exp()
                        }
                    })
                    .collect::<Vec<_>>());
            }
            if t_max <= 0.0 {
                return Ok(vec![c; t_samples.len()]);
            }
            evolve_mode(&mode, &params, c, t_max)?.sample(t_samples)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let basis: Vec<Vec<f64>> = (1..=problem.n_max as u64)
        .map(|n| {
            x_samples
                .iter()
                .map(|&x| sine_basis(n, x, length))
                .collect()
        })
        .collect();

    let mut u = Array2::zeros((t_samples.len(), x_samples.len()));
    for (j, mut row) in u.rows_mut().into_iter().enumerate() {
        for (amplitude, shape) in amplitudes.iter().zip(&basis) {
            let a = amplitude[j];
            for (value, s) in row.iter_mut().zip(shape) {
                *value += a * s;
            }
        }
    }
    if u.iter().any(|v: &f64| !v.is_finite()) {
        return Err(Error::ResourceLimit(
            "modal solution overflowed f64; unstable modes grow too fast over this horizon".into(),
        ));
    }
    Field::new(x_samples.to_vec(), t_samples.to_vec(), u)
}
