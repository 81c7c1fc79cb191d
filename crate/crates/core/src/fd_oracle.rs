//! Explicit finite-difference solver used to cross-check the modal path.
//!
//! The equation is stepped as `u_t(x, s) = D u_xx(x, s - tau)` with forward
//! Euler in time and central differences in space. The time step divides the
//! delay exactly, so the lagged level is always a stored row and no history
//! interpolation is needed.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::solver::HistorySpec;
use crate::spectrum::Problem;
use crate::PhysicalParams;

/// Largest number of stored field values (`nx` times stored rows).
pub const MAX_CELLS: usize = 30_000_000;

/// Largest admissible `D dt / dx^2`.
pub const DIFFUSION_NUMBER_LIMIT: f64 = 0.5;

/// Uniform space-time grid whose time step divides the delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// Node count including both boundary nodes.
    pub nx: usize,
    pub dx: f64,
    pub dt: f64,
    /// `tau / dt`, exact.
    pub steps_per_delay: usize,
    /// Steps after `t = 0`; the last row sits at `n_steps * dt >= t_end`.
    pub n_steps: usize,
    pub t_end: f64,
}

impl Grid {
    /// Builds a grid on `[0, length]`. With a delay the requested step is
    /// shrunk to `tau / ceil(tau / dt_requested)`.
    pub fn new(
        nx: usize,
        length: f64,
        params: &PhysicalParams,
        dt_requested: f64,
        t_end: f64,
    ) -> Result<Self> {
        if nx < 3 {
            return Err(Error::invalid("nx", format!("must be >= 3, got {nx}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid(
                "L",
                format!("must be > 0 and finite, got {length}"),
            ));
        }
        if !(dt_requested.is_finite() && dt_requested > 0.0) {
            return Err(Error::invalid(
                "dt",
                format!("must be > 0 and finite, got {dt_requested}"),
            ));
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::invalid(
                "t_end",
                format!("must be > 0 and finite, got {t_end}"),
            ));
        }
        let tau = params.delay;
        let (dt, steps_per_delay) = if tau > 0.0 {
            let m = (tau / dt_requested).ceil();
            if m > MAX_CELLS as f64 {
                return Err(Error::ResourceLimit(format!(
                    "tau / dt = {m:.3e} history steps exceeds the cap of {MAX_CELLS}"
                )));
            }
            (tau / m, m as usize)
        } else {
            (dt_requested, 0)
        };
        let dx = length / (nx - 1) as f64;
        let number = params.diffusivity * dt / (dx * dx);
        if number > DIFFUSION_NUMBER_LIMIT {
            return Err(Error::invalid(
                "dt",
                format!(
                    "D dt / dx^2 = {number:.6} exceeds {DIFFUSION_NUMBER_LIMIT}; \
                     need dt <= {:.6e}",
                    DIFFUSION_NUMBER_LIMIT * dx * dx / params.diffusivity
                ),
            ));
        }
        let steps = (t_end / dt * (1.0 - 4.0 * f64::EPSILON)).ceil();
        if steps > MAX_CELLS as f64 {
            return Err(Error::ResourceLimit(format!(
                "t_end / dt = {steps:.3e} steps exceeds the cap of {MAX_CELLS}"
            )));
        }
        Ok(Self {
            nx,
            dx,
            dt,
            steps_per_delay,
            n_steps: steps as usize,
            t_end,
        })
    }

    /// Rows stored by a full run: history band plus every step.
    pub fn rows(&self) -> usize {
        self.steps_per_delay + self.n_steps + 1
    }

    pub fn cells(&self) -> usize {
        self.rows().saturating_mul(self.nx)
    }

    pub fn x(&self) -> Vec<f64> {
        (0..self.nx).map(|i| i as f64 * self.dx).collect()
    }

    /// Row times `-tau, ..., 0, ..., n_steps dt`.
    pub fn t(&self) -> Vec<f64> {
        let m = self.steps_per_delay as f64;
        (0..self.rows()).map(|r| (r as f64 - m) * self.dt).collect()
    }

    /// Row index of time step `j` (time `j dt`).
    pub fn row_of_step(&self, j: usize) -> usize {
        j + self.steps_per_delay
    }
}

/// A field with the history band `[-tau, 0]` filled in and no steps taken.
pub fn initial_field(grid: &Grid, problem: &Problem) -> Result<Field> {
    check_grid(grid, problem)?;
    let cells = grid.cells();
    if cells > MAX_CELLS {
        return Err(Error::ResourceLimit(format!(
            "grid needs {cells} values ({} nodes x {} rows, about {} MiB), cap is {MAX_CELLS}",
            grid.nx,
            grid.rows(),
            cells * 8 / (1 << 20)
        )));
    }
    let mut field = Field::empty(grid.x(), grid.t());
    let length = problem.length;
    let delay = problem.params.delay;
    let band = grid.steps_per_delay + 1;
    let last = grid.nx - 1;
    for r in 0..band {
        let t = field.t[r];
        for i in 1..last {
            let x = field.x[i];
            field.u[[r, i]] = match &problem.history {
                HistorySpec::ConstantInTime(profile) => profile.eval(x, length),
                sampled => sampled.value_at(x, t, length, delay),
            };
        }
    }
    field.mark_filled(band);
    Ok(field)
}

/// Advances time step `j` to `j + 1` for the delayed heat equation.
///
/// Needs every row up to step `j` populated, including the history band.
pub fn step_heat(grid: &Grid, problem: &Problem, field: &mut Field, j: usize) -> Result<()> {
    advance(grid, &problem.params, 0.0, field, j)
}

/// Full run of the delayed heat equation from `t = -tau` to `t_end`.
pub fn run_heat(grid: &Grid, problem: &Problem) -> Result<Field> {
    run(grid, problem, 0.0)
}

/// Delayed advection-diffusion, with upwind differencing of `eps u_x` at the
/// delayed level. Identical to [`run_heat`] when `epsilon = 0`.
pub fn run_advection(grid: &Grid, problem: &Problem) -> Result<Field> {
    let eps = problem.params.advection;
    let courant = eps * grid.dt / grid.dx;
    if courant > 1.0 {
        return Err(Error::invalid(
            "dt",
            format!("advective number eps dt / dx = {courant:.6} exceeds 1"),
        ));
    }
    run(grid, problem, eps)
}

fn run(grid: &Grid, problem: &Problem, eps: f64) -> Result<Field> {
    let mut field = initial_field(grid, problem)?;
    for j in 0..grid.n_steps {
        advance(grid, &problem.params, eps, &mut field, j)?;
    }
    if !field.u.iter().all(|v| v.is_finite()) {
        return Err(Error::ResourceLimit(
            "finite-difference field overflowed f64; unstable modes grow too fast over this horizon"
                .into(),
        ));
    }
    Ok(field)
}

fn check_grid(grid: &Grid, problem: &Problem) -> Result<()> {
    let expected_dx = problem.length / (grid.nx - 1) as f64;
    if (grid.dx - expected_dx).abs() > 1e-12 * expected_dx {
        return Err(Error::invalid(
            "dx",
            "grid spacing does not match the problem length",
        ));
    }
    let tau = problem.params.delay;
    if (grid.steps_per_delay as f64 * grid.dt - tau).abs() > 1e-12 * tau.max(grid.dt) {
        return Err(Error::invalid("dt", "time step does not divide the delay"));
    }
    Ok(())
}

fn advance(
    grid: &Grid,
    params: &PhysicalParams,
    eps: f64,
    field: &mut Field,
    j: usize,
) -> Result<()> {
    let current = grid.row_of_step(j);
    let next = current + 1;
    if next >= field.t.len() || field.x.len() != grid.nx {
        return Err(Error::State(format!(
            "step {j} does not fit a field with {} rows and {} columns",
            field.t.len(),
            field.x.len()
        )));
    }
    if field.filled_rows() <= current {
        return Err(Error::State(format!(
            "step {j} needs rows 0..={current} populated, only {} are",
            field.filled_rows()
        )));
    }
    // The lagged level sits steps_per_delay rows below the current one.
    let lagged = j;
    let diffusion = grid.dt * params.diffusivity / (grid.dx * grid.dx);
    let advection = grid.dt * eps / grid.dx;
    let last = grid.nx - 1;
    for i in 1..last {
        let u = &field.u;
        let (left, centre, right) = (u[[lagged, i - 1]], u[[lagged, i]], u[[lagged, i + 1]]);
        let mut update = diffusion * (right - 2.0 * centre + left);
        if eps != 0.0 {
            update -= advection * (centre - left);
        }
        let value = u[[current, i]] + update;
        field.u[[next, i]] = value;
    }
    field.u[[next, 0]] = 0.0;
    field.u[[next, last]] = 0.0;
    field.mark_filled(next + 1);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Profile;
    use std::f64::consts::PI;

    fn problem(tau: f64, profile: &str) -> Problem {
        let params = PhysicalParams::heat(1.0, tau).unwrap();
        Problem::new(
            PI,
            params,
            HistorySpec::constant(profile.parse().unwrap()),
            8,
        )
        .unwrap()
    }

    #[test]
    fn grid_adjusts_dt_to_divide_delay() {
        let params = PhysicalParams::heat(1.0, 1.0).unwrap();
        let g = Grid::new(33, PI, &params, 0.003, 2.0).unwrap();
        assert_eq!(g.steps_per_delay, 334);
        assert_eq!(g.dt * g.steps_per_delay as f64, 1.0);
        assert!(g.n_steps as f64 * g.dt >= 2.0);
        assert!(Grid::new(33, PI, &params, 0.01, 1.0).is_err());
        assert!(Grid::new(2, PI, &params, 1e-3, 1.0).is_err());
    }

    #[test]
    fn single_step_without_delay_scales_sine() {
        let p = problem(0.0, "sine:1");
        let g = Grid::new(21, PI, &p.params, 1e-3, 1e-3).unwrap();
        let mut field = initial_field(&g, &p).unwrap();
        step_heat(&g, &p, &mut field, 0).unwrap();
        let factor = 1.0 - g.dt * (2.0 - 2.0 * g.dx.cos()) / (g.dx * g.dx);
        for i in 1..20 {
            let expected = factor * field.u[[0, i]];
            assert!((field.u[[1, i]] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn step_needs_populated_history() {
        let p = problem(1.0, "sine:1");
        let g = Grid::new(11, PI, &p.params, 0.04, 1.0).unwrap();
        let mut field = Field::empty(g.x(), g.t());
        assert!(matches!(
            step_heat(&g, &p, &mut field, 0),
            Err(Error::State(_))
        ));
        let mut field = initial_field(&g, &p).unwrap();
        assert!(matches!(
            step_heat(&g, &p, &mut field, 1),
            Err(Error::State(_))
        ));
        step_heat(&g, &p, &mut field, 0).unwrap();
        step_heat(&g, &p, &mut field, 1).unwrap();
    }

    #[test]
    fn zero_history_stays_zero() {
        let p = problem(0.5, "zero");
        let g = Grid::new(17, PI, &p.params, 0.01, 2.0).unwrap();
        assert!(run_heat(&g, &p).unwrap().u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn first_delay_interval_is_linear_decay() {
        // Exact answer on [0, tau] is (1 - t) sin x; the scheme errs by O(dx^2).
        let p = problem(1.0, "sine:1");
        let g = Grid::new(65, PI, &p.params, 1e-3, 1.0).unwrap();
        let field = run_heat(&g, &p).unwrap();
        let row = field.at_time(0.5);
        for (i, &x) in field.x.iter().enumerate() {
            assert!((row[i] - 0.5 * x.sin()).abs() < 1e-3);
        }
        assert!(field.at_time(1.0).iter().all(|v| v.abs() < 1e-3));
    }

    #[test]
    fn advection_with_zero_speed_matches_heat() {
        let p = problem(0.4, "sines:1=1,3=0.2");
        let g = Grid::new(33, PI, &p.params, 2e-3, 1.5).unwrap();
        assert_eq!(run_heat(&g, &p).unwrap(), run_advection(&g, &p).unwrap());
    }

    #[test]
    fn advection_translates_bump() {
        let params = PhysicalParams::new(1e-8, 0.0, 1.0).unwrap();
        let profile = Profile::PiecewiseLinear(vec![
            (0.0, 0.0),
            (0.8, 0.0),
            (1.0, 1.0),
            (1.2, 0.0),
            (4.0, 0.0),
        ]);
        let p = Problem::new(4.0, params, HistorySpec::constant(profile), 8).unwrap();
        let g = Grid::new(801, 4.0, &params, 2.5e-3, 1.5).unwrap();
        let field = run_advection(&g, &p).unwrap();
        let row = field.at_time(1.5);
        let peak = (0..row.len())
            .max_by(|&a, &b| row[a].total_cmp(&row[b]))
            .unwrap();
        assert!(
            (field.x[peak] - 2.5).abs() < 0.05,
            "peak at {}",
            field.x[peak]
        );
    }

    #[test]
    fn courant_guard() {
        let params = PhysicalParams::new(1.0, 0.0, 50.0).unwrap();
        let p = Problem::new(PI, params, HistorySpec::constant(Profile::Zero), 4).unwrap();
        let g = Grid::new(11, PI, &params, 0.04, 1.0).unwrap();
        assert!(run_advection(&g, &p).is_err());
    }

    #[test]
    fn resource_cap_reports_estimate() {
        let p = problem(1.0, "sine:1");
        let g = Grid::new(1001, PI, &p.params, 4e-6, 10.0).unwrap();
        let err = run_heat(&g, &p).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
        assert!(err.to_string().contains("cap"));
    }

    #[test]
    fn sampled_history_band_is_used() {
        let params = PhysicalParams::heat(1.0, 0.5).unwrap();
        // Two history rows at t = -0.5 and t = 0 on three nodes.
        let samples = ndarray::array![[0.0, 2.0, 0.0], [0.0, 1.0, 0.0]];
        let p = Problem::new(2.0, params, HistorySpec::Sampled(samples), 2).unwrap();
        let g = Grid::new(3, 2.0, &params, 0.25, 0.25).unwrap();
        let field = initial_field(&g, &p).unwrap();
        assert_eq!(field.u[[0, 1]], 2.0);
        assert_eq!(field.u[[1, 1]], 1.5);
        assert_eq!(field.u[[2, 1]], 1.0);
    }
}
