//! Acceptance suite. Runs every criterion at its stated tolerance and runtime
//! budget, prints one PASS/FAIL line each and exits nonzero on any failure.

use std::f64::consts::{E, FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use delayheat::dispersion::{
    a_from_b_advection, a_from_b_heat, dispersion_residual_advection, dispersion_residual_heat,
};
use delayheat::fd_oracle::{run_heat, Grid};
use delayheat::growth::fit_growth_rate;
use delayheat::lambert_w::{lambert_w, lambert_w_real, residual};
use delayheat::solver::{construct_exponential, evolve_mode, solve_ibvp};
use delayheat::spectrum::{characteristic_roots, stability_table};
use delayheat::{Complex64, HistorySpec, Mode, PhysicalParams, Problem, Profile, RatePair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "lambert-w identity",
            budget: Duration::from_secs(5),
            run: lambert_identity,
        },
        Criterion {
            id: 2,
            name: "stability criterion",
            budget: Duration::from_secs(10),
            run: stability_criterion,
        },
        Criterion {
            id: 3,
            name: "mode-table instability",
            budget: Duration::from_secs(5),
            run: mode_table,
        },
        Criterion {
            id: 4,
            name: "limit recovery",
            budget: Duration::from_secs(5),
            run: limit_recovery,
        },
        Criterion {
            id: 5,
            name: "cross-oracle agreement",
            budget: Duration::from_secs(60),
            run: cross_oracle,
        },
        Criterion {
            id: 6,
            name: "growth-rate match",
            budget: Duration::from_secs(30),
            run: growth_rate,
        },
        Criterion {
            id: 7,
            name: "dispersion residuals",
            budget: Duration::from_secs(2),
            run: dispersion_residuals,
        },
        Criterion {
            id: 8,
            name: "exponential PDE residual",
            budget: Duration::from_secs(5),
            run: exponential_residual,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let pass = outcome.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "acceptance {} {:<26} {} ({:.2} s of {} s{}) {}",
            c.id,
            c.name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            if in_time { "" } else { ", over budget" },
            outcome.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn lambert_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut errors = 0;
    for _ in 0..10_000 {
        let k = rng.gen_range(-5..=5);
        let modulus = 10f64.powf(rng.gen_range(-6.0..=6.0));
        let z = Complex64::from_polar(modulus, rng.gen_range(-PI..=PI));
        match lambert_w(k, z) {
            Ok(w) => worst = worst.max(residual(w, z) / modulus.max(1.0)),
            Err(_) => errors += 1,
        }
    }
    let w0 = lambert_w(0, Complex64::new(0.0, 0.0)).unwrap();
    let w1 = lambert_w(0, Complex64::new(E, 0.0)).unwrap();
    let wb = lambert_w(-1, Complex64::new(-1.0 / E, 0.0)).unwrap();
    let analytic = [
        (w0 - Complex64::new(0.0, 0.0)).norm(),
        (w1 - Complex64::new(1.0, 0.0)).norm(),
        (wb - Complex64::new(-1.0, 0.0)).norm(),
    ];
    let analytic_worst = analytic.iter().fold(0.0f64, |m, &v| m.max(v));
    Outcome::new(
        errors == 0 && worst <= 1e-12 && analytic_worst <= 1e-14,
        format!("max scaled residual {worst:.2e}, {errors} errors, analytic points off by {analytic_worst:.1e}"),
    )
}

// Mode 1 on a domain of length pi / sqrt(q) with D = tau = 1 has q_1 = q.
fn mode_with_q(q: f64) -> (Mode, PhysicalParams) {
    let params = PhysicalParams::heat(1.0, 1.0).unwrap();
    (Mode::new(1, PI / q.sqrt(), &params).unwrap(), params)
}

fn stability_criterion() -> Outcome {
    let mut disagreements = Vec::new();
    let mut checked = 0;
    for i in 1..=400 {
        let q = 0.01 + (4.0 - 0.01) * i as f64 / 400.0;
        if (q - FRAC_PI_2).abs() <= 1e-6 {
            continue;
        }
        let (mode, params) = mode_with_q(q);
        // Branches -9..=8 cover |k| <= 8 together with the conjugate of k = 8.
        let roots = match characteristic_roots(&mode, &params, 8) {
            Ok(r) => r,
            Err(e) => return Outcome::new(false, format!("q={q}: {e}")),
        };
        checked += 1;
        if (roots.rightmost_re() < 0.0) != (q < FRAC_PI_2) {
            disagreements.push(q);
        }
    }
    let (mode, params) = mode_with_q(FRAC_PI_2);
    let marginal = characteristic_roots(&mode, &params, 8).unwrap();
    let up = (marginal.roots[&0] - Complex64::new(0.0, FRAC_PI_2)).norm();
    let down = (marginal.roots[&-1] - Complex64::new(0.0, -FRAC_PI_2)).norm();
    Outcome::new(
        disagreements.is_empty() && up <= 1e-10 && down <= 1e-10,
        format!(
            "{checked} points, {} disagreements, marginal roots off by {:.1e}",
            disagreements.len(),
            up.max(down)
        ),
    )
}

fn mode_table() -> Outcome {
    let base = |length: f64, d: f64, tau: f64, n_max: usize| {
        let params = PhysicalParams::heat(d, tau).unwrap();
        let history = HistorySpec::constant(Profile::Sine {
            n: 1,
            amplitude: 1.0,
        });
        Problem::new(length, params, history, n_max).unwrap()
    };
    let table = stability_table(&base(PI, 1.0, 1.0, 3)).unwrap();
    let reference_ok =
        table.rows[0].roots.regime.is_stable() && !table.rows[1].roots.regime.is_stable();

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    for _ in 0..50 {
        let length = rng.gen_range(0.5..10.0);
        let d = rng.gen_range(0.1..5.0);
        let tau = rng.gen_range(0.01..2.0);
        let boundary = length / PI * (PI / (2.0 * tau * d)).sqrt();
        let closed_form = boundary.ceil() as u64;
        let table = stability_table(&base(length, d, tau, 2)).unwrap();
        // The boundary check: the closed-form index is unstable and its
        // predecessor is not, evaluated directly on q_n.
        let q = |n: u64| tau * d * (n as f64 * PI / length).powi(2);
        let boundary_ok =
            q(closed_form) > FRAC_PI_2 && (closed_form == 1 || q(closed_form - 1) < FRAC_PI_2);
        if table.smallest_unstable != Some(closed_form) || !boundary_ok {
            mismatches += 1;
        }
    }
    Outcome::new(
        reference_ok && mismatches == 0,
        format!("L=pi D=1 tau=1 n=1 stable, n=2 unstable: {reference_ok}; {mismatches} of 50 random triples mismatched"),
    )
}

fn limit_recovery() -> Outcome {
    let tau = 1e-4;
    let ratios: Vec<f64> = [1.0f64, 4.0, 9.0]
        .iter()
        .map(|&lambda| {
            let b = lambert_w_real(0, -tau * lambda).unwrap() / tau;
            (b + lambda).abs() / (tau * lambda * lambda)
        })
        .collect();
    let ratios_ok = ratios.iter().all(|r| (0.9..=1.1).contains(r));

    let params = PhysicalParams::heat(1.0, 1e-3).unwrap();
    let mode = Mode::new(1, PI, &params).unwrap();
    let t1 = evolve_mode(&mode, &params, 1.0, 1.0)
        .unwrap()
        .value_at(1.0)
        .unwrap();
    let rel = (t1 - (-1.0f64).exp()).abs() / (-1.0f64).exp();
    Outcome::new(
        ratios_ok && rel <= 1e-2,
        format!(
            "rate-shift ratios {ratios:.4?}, modal vs exp(-t) at t=1 off by {rel:.2e} relative"
        ),
    )
}

// Max-norm discrepancy between the finite-difference field and the modal
// solution over the rows at the listed times.
fn fd_error(problem: &Problem, intervals: usize, steps_per_delay: usize, times: &[f64]) -> f64 {
    let grid = Grid::new(
        intervals + 1,
        PI,
        &problem.params,
        1.0 / steps_per_delay as f64,
        3.0,
    )
    .unwrap();
    let fd = run_heat(&grid, problem).unwrap();
    let rows: Vec<usize> = times.iter().map(|&t| fd.nearest_time_index(t)).collect();
    let exact_times: Vec<f64> = rows.iter().map(|&r| fd.t[r]).collect();
    let exact = solve_ibvp(problem, &exact_times, &fd.x).unwrap();
    rows.iter()
        .enumerate()
        .flat_map(|(j, &r)| (0..fd.x.len()).map(move |i| (j, r, i)))
        .map(|(j, r, i)| (fd.u[[r, i]] - exact.u[[j, i]]).abs())
        .fold(0.0, f64::max)
}

fn fd_field_at(problem: &Problem, intervals: usize, steps_per_delay: usize, t: f64) -> Vec<f64> {
    let grid = Grid::new(
        intervals + 1,
        PI,
        &problem.params,
        1.0 / steps_per_delay as f64,
        t,
    )
    .unwrap();
    let fd = run_heat(&grid, problem).unwrap();
    fd.at_time(t).to_vec()
}

fn cross_oracle() -> Outcome {
    let params = PhysicalParams::heat(1.0, 1.0).unwrap();
    let history = HistorySpec::constant(Profile::SineSum(vec![(1, 1.0), (2, 0.5)]));
    let problem = Problem::new(PI, params, history, 32).unwrap();
    let times: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();

    // Parabolic refinement: dx halves and dt quarters, so D dt / dx^2 is fixed
    // and the error model C1 dt + C2 dx^2 shrinks fourfold per level.
    let levels = [(32, 256), (64, 1024), (128, 4096)];
    let errors: Vec<f64> = levels
        .iter()
        .map(|&(n, m)| fd_error(&problem, n, m, &times))
        .collect();
    let dx_orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    let dt_orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log(4.0)).collect();

    // Time-only study at fixed dx: differences between successive dt levels
    // cancel the spatial error and expose the temporal order alone.
    let fields: Vec<Vec<f64>> = [512, 1024, 2048]
        .iter()
        .map(|&m| fd_field_at(&problem, 32, m, 3.0))
        .collect();
    let diff = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let isolated_dt = (diff(&fields[0], &fields[1]) / diff(&fields[1], &fields[2])).log2();

    let pass = dx_orders.iter().all(|o| (1.8..=2.2).contains(o))
        && dt_orders.iter().all(|o| (0.9..=1.1).contains(o))
        && (0.9..=1.1).contains(&isolated_dt);
    Outcome::new(
        pass,
        format!(
            "max errors [{}], dx orders {dx_orders:.3?}, dt orders {dt_orders:.3?}, \
             fixed-dx dt order {isolated_dt:.3}",
            errors
                .iter()
                .map(|e| format!("{e:.3e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn growth_rate() -> Outcome {
    let w = match lambert_w(0, Complex64::new(-4.0, 0.0)) {
        Ok(w) => w,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let check = (w * w.exp() + 4.0).norm();
    let reference = w.re;
    let confirmed = check <= 1e-12 * 4.0;

    let params = PhysicalParams::heat(1.0, 1.0).unwrap();
    let mode = Mode::new(2, PI, &params).unwrap();
    let t_end = (15.0 / reference).ceil() + 8.0;
    let trajectory = evolve_mode(&mode, &params, 1.0, t_end).unwrap();
    let times: Vec<f64> = (0..=2000)
        .map(|i| t_end * (0.6 + 0.4 * i as f64 / 2000.0))
        .collect();
    let values = trajectory.sample(&times).unwrap();
    let modal = fit_growth_rate(&times, &values).unwrap();
    let modal_rel = (modal - reference).abs() / reference;

    // Coarse grid: discrete high modes are unstable too and would swamp the
    // signal over a long horizon, so the amplitude of sin(2x) is extracted by
    // projection and the window kept moderate.
    let history = HistorySpec::constant(Profile::Sine {
        n: 2,
        amplitude: 1.0,
    });
    let problem = Problem::new(PI, params, history, 4).unwrap();
    let fd_end = 20.0;
    let grid = Grid::new(17, PI, &params, 1.0 / 64.0, fd_end).unwrap();
    let field = run_heat(&grid, &problem).unwrap();
    let basis: Vec<f64> = field.x.iter().map(|x| (2.0 * x).sin()).collect();
    let start = field.nearest_time_index(0.6 * fd_end);
    let fd_times = field.t[start..].to_vec();
    let amplitudes: Vec<f64> = (start..field.t.len())
        .map(|r| {
            field
                .row(r)
                .iter()
                .zip(&basis)
                .map(|(u, s)| u * s)
                .sum::<f64>()
        })
        .collect();
    let fd = fit_growth_rate(&fd_times, &amplitudes).unwrap();
    let fd_rel = (fd - reference).abs() / reference;

    Outcome::new(
        confirmed && modal_rel <= 0.02 && fd_rel <= 0.03,
        format!(
            "Re W0(-4) = {reference:.12} (check {check:.1e}); modal slope {modal:.6} ({:.3}%), \
             fd slope {fd:.6} ({:.3}%)",
            100.0 * modal_rel,
            100.0 * fd_rel
        ),
    )
}

fn dispersion_residuals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut ordering_failures = 0;
    let mut ordering_checked = 0;
    for _ in 0..1000 {
        let d = rng.gen_range(0.1..10.0);
        let tau = rng.gen_range(0.0..2.0);
        let eps = rng.gen_range(0.01..5.0);
        let mut b: f64 = rng.gen_range(-3.0..3.0);
        if b == 0.0 {
            b = 1.0;
        }
        let heat = PhysicalParams::heat(d, tau).unwrap();
        let adv = PhysicalParams::new(d, tau, eps).unwrap();
        let scale = (b * (b * tau).exp()).abs().max(1.0);
        let bc = Complex64::new(b, 0.0);
        for a in a_from_b_heat(&heat, b).unwrap() {
            worst = worst.max(dispersion_residual_heat(&heat, &RatePair::new(a, bc)) / scale);
        }
        let roots = a_from_b_advection(&adv, b).unwrap();
        for a in roots {
            worst = worst.max(dispersion_residual_advection(&adv, &RatePair::new(a, bc)) / scale);
        }
        if b > 0.0 {
            ordering_checked += 1;
            let [plus, minus] = roots;
            let ordered = plus.im == 0.0
                && minus.im == 0.0
                && minus.re < 0.0
                && 0.0 < plus.re
                && plus.re > minus.re.abs();
            if !ordered {
                ordering_failures += 1;
            }
        }
    }
    Outcome::new(
        worst <= 1e-12 && ordering_failures == 0,
        format!("max relative residual {worst:.2e}; ordering failed {ordering_failures} of {ordering_checked}"),
    )
}

fn exponential_residual() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let magnitude = rng.gen_range(0.05..=1.0);
        let b = if rng.gen_bool(0.5) {
            magnitude
        } else {
            -magnitude
        };
        let tau = rng.gen_range(0.0..=0.5);
        let d = rng.gen_range(0.5..=1.0);
        let coefficients: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        let params = PhysicalParams::heat(d, tau).unwrap();
        let u = construct_exponential(&params, b, coefficients).unwrap();
        for i in 0..50 {
            for j in 0..50 {
                let x = i as f64 / 49.0;
                let t = j as f64 / 49.0;
                worst = worst.max(u.delayed_heat_residual(x, t, 1e-4).abs());
            }
        }
    }
    Outcome::new(
        worst <= 1e-6,
        format!("max residual {worst:.2e} over 20 draws x 2500 points"),
    )
}
