//! Dirichlet modes, their characteristic roots and stability.
//!
//! Substituting `sin(n pi x / L) T(t)` into the delayed heat equation leaves
//! `T'(t) = -lambda_n T(t - tau)`. Exponential solutions `T = exp(b t)` need
//! `tau b exp(b tau) = -q_n` with `q_n = tau lambda_n`, so every root is
//! `b = W_k(-q_n) / tau` for some branch `k`. All roots have negative real part
//! exactly when `0 < q_n < pi/2`.
//!
//! `-q_n` sits on the negative real axis, where branch values are taken from
//! above. There branch `k` and branch `-1 - k` are complex conjugates, so a
//! root set built over `k = -(K + 1) ..= K` is closed under conjugation.

use std::collections::BTreeMap;
use std::f64::consts::{E, FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::PhysicalParams;
use crate::error::{Error, Result};
use crate::lambert_w::lambert_w;
use crate::solver::HistorySpec;

/// Default number of conjugate branch pairs beyond the principal pair.
pub const DEFAULT_BRANCH_COUNT: u32 = 8;

/// Relative half-width of the band around `q = pi/2` classified as marginal.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Characteristic-equation residual tolerance, relative for `q > 1`.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;

/// One Dirichlet spatial mode `sin(n pi x / L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub n: u64,
    /// `n pi / L`.
    pub wavenumber: f64,
    /// `D (n pi / L)^2`, the mode's decay rate without delay.
    pub decay_rate: f64,
    /// `tau * decay_rate`, the dimensionless number that decides stability.
    pub delay_product: f64,
}

impl Mode {
    pub fn new(n: u64, length: f64, params: &PhysicalParams) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "mode index must be >= 1"));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid(
                "L",
                format!("must be > 0 and finite, got {length}"),
            ));
        }
        let wavenumber = n as f64 * PI / length;
        let decay_rate = params.diffusivity * wavenumber * wavenumber;
        Ok(Self {
            n,
            wavenumber,
            decay_rate,
            delay_product: params.delay * decay_rate,
        })
    }
}

/// Qualitative behaviour of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    /// `0 < q <= 1/e`: the rightmost roots are real and negative.
    RealDecay,
    /// `1/e < q < pi/2`: complex rightmost pair with negative real part.
    OscillatoryDecay,
    /// `q = pi/2` within tolerance: rightmost pair on the imaginary axis.
    Marginal,
    /// `q > pi/2`: a root with positive real part.
    Unstable,
    /// No delay: the single root `-lambda_n`.
    Classical,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::RealDecay => "REAL_DECAY",
            Regime::OscillatoryDecay => "OSCILLATORY_DECAY",
            Regime::Marginal => "MARGINAL",
            Regime::Unstable => "UNSTABLE",
            Regime::Classical => "CLASSICAL",
        }
    }

    /// True for regimes in which every root has negative real part.
    pub fn is_stable(self) -> bool {
        matches!(
            self,
            Regime::RealDecay | Regime::OscillatoryDecay | Regime::Classical
        )
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "REAL_DECAY" => Regime::RealDecay,
            "OSCILLATORY_DECAY" => Regime::OscillatoryDecay,
            "MARGINAL" => Regime::Marginal,
            "UNSTABLE" => Regime::Unstable,
            "CLASSICAL" => Regime::Classical,
            other => {
                return Err(Error::invalid(
                    "regime",
                    format!("unknown regime `{other}`"),
                ))
            }
        })
    }
}

/// Characteristic roots of one mode, keyed by Lambert-W branch.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub mode: Mode,
    pub roots: BTreeMap<i32, Complex64>,
    pub regime: Regime,
}

impl RootSet {
    /// The rightmost root and its branch. Between a conjugate pair the member
    /// with non-negative imaginary part is reported.
    pub fn dominant(&self) -> (i32, Complex64) {
        let max_re = self
            .roots
            .values()
            .map(|b| b.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let band = 1e-12 * max_re.abs().max(1.0);
        self.roots
            .iter()
            .filter(|(_, b)| b.re >= max_re - band)
            .max_by(|(ka, a), (kb, b)| a.im.total_cmp(&b.im).then(ka.cmp(kb)))
            .map(|(&k, &b)| (k, b))
            .expect("root set is never empty")
    }

    pub fn rightmost_re(&self) -> f64 {
        self.dominant().1.re
    }
}

/// Decay rate of a mode without delay: `b = -lambda_n`.
pub fn classical_root(mode: &Mode) -> Complex64 {
    Complex64::new(-mode.decay_rate, 0.0)
}

/// Roots `b_k = W_k(-q_n) / tau` for `k = -(branch_count + 1) ..= branch_count`.
pub fn characteristic_roots(
    mode: &Mode,
    params: &PhysicalParams,
    branch_count: u32,
) -> Result<RootSet> {
    if branch_count == 0 {
        return Err(Error::invalid("branch_count", "must be >= 1"));
    }
    if params.delay <= 0.0 {
        return Err(Error::invalid(
            "tau",
            "characteristic roots need tau > 0; use classical_root for tau = 0",
        ));
    }
    let tau = params.delay;
    let q = mode.delay_product;
    let z = Complex64::new(-q, 0.0);
    let top = branch_count as i32;

    let mut roots = BTreeMap::new();
    for k in -(top + 1)..=top {
        let w = lambert_w(k, z).map_err(|e| e.in_mode(mode.n))?;
        let b = w / tau;
        let res = (tau * b * (b * tau).exp() + q).norm();
        if res.is_nan() || res > ROOT_RESIDUAL_TOL * q.max(1.0) {
            return Err(Error::Inconsistent(format!(
                "mode {}: branch {k} root {b} has characteristic residual {res:e}",
                mode.n
            )));
        }
        roots.insert(k, b);
    }
    let mut set = RootSet {
        mode: *mode,
        roots,
        regime: Regime::Classical,
    };
    set.regime =
        classify_regime(q, set.rightmost_re(), MARGINAL_TOL).map_err(|e| e.in_mode(mode.n))?;
    Ok(set)
}

/// Classifies a mode from its delay product `q`, cross-checked against the
/// real part of its rightmost root.
///
/// `tol` is the relative half-width of the marginal band around `pi/2`. Outside
/// that band the sign of `rightmost_re` must agree with `q < pi/2`; a mismatch
/// means the root computation is wrong and is reported as
/// [`Error::Inconsistent`].
pub fn classify_regime(q: f64, rightmost_re: f64, tol: f64) -> Result<Regime> {
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::invalid(
            "q",
            format!("must be >= 0 and finite, got {q}"),
        ));
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::invalid(
            "tol",
            format!("must be >= 0 and finite, got {tol}"),
        ));
    }
    let regime = if q == 0.0 {
        Regime::Classical
    } else if (q - FRAC_PI_2).abs() <= tol * FRAC_PI_2 {
        return Ok(Regime::Marginal);
    } else if q < FRAC_PI_2 {
        if q <= 1.0 / E {
            Regime::RealDecay
        } else {
            Regime::OscillatoryDecay
        }
    } else {
        Regime::Unstable
    };
    let root_says_stable = rightmost_re < 0.0;
    if root_says_stable != regime.is_stable() {
        return Err(Error::Inconsistent(format!(
            "q = {q} classifies as {regime} but the rightmost root has real part {rightmost_re:e}"
        )));
    }
    Ok(regime)
}

/// A Dirichlet initial/boundary-value problem on `0 <= x <= L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub length: f64,
    pub params: PhysicalParams,
    pub history: HistorySpec,
    /// Number of sine modes kept.
    pub n_max: usize,
}

impl Problem {
    pub fn new(
        length: f64,
        params: PhysicalParams,
        history: HistorySpec,
        n_max: usize,
    ) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid(
                "L",
                format!("must be > 0 and finite, got {length}"),
            ));
        }
        if n_max == 0 {
            return Err(Error::invalid("n_max", "must be >= 1"));
        }
        history.validate(length)?;
        Ok(Self {
            length,
            params,
            history,
            n_max,
        })
    }

    pub fn mode(&self, n: u64) -> Result<Mode> {
        Mode::new(n, self.length, &self.params)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRow {
    pub mode: Mode,
    pub roots: RootSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityTable {
    pub rows: Vec<StabilityRow>,
    /// Largest `n` with `q_n < pi/2` (0 if none). `None` without delay, where
    /// every mode is stable.
    pub critical_index: Option<u64>,
    /// Smallest `n` whose regime is unstable, whether or not it lies within
    /// `n_max`. `None` without delay.
    pub smallest_unstable: Option<u64>,
}

/// Stability of modes `1..=n_max` with [`DEFAULT_BRANCH_COUNT`] branch pairs.
pub fn stability_table(problem: &Problem) -> Result<StabilityTable> {
    stability_table_with(problem, DEFAULT_BRANCH_COUNT)
}

pub fn stability_table_with(problem: &Problem, branch_count: u32) -> Result<StabilityTable> {
    let params = problem.params;
    let rows = (1..=problem.n_max as u64)
        .into_par_iter()
        .map(|n| {
            let mode = problem.mode(n)?;
            let roots = if params.delay > 0.0 {
                characteristic_roots(&mode, &params, branch_count)?
            } else {
                RootSet {
                    mode,
                    roots: BTreeMap::from([(0, classical_root(&mode))]),
                    regime: Regime::Classical,
                }
            };
            Ok(StabilityRow { mode, roots })
        })
        .collect::<Result<Vec<_>>>()?;

    if params.delay == 0.0 {
        return Ok(StabilityTable {
            rows,
            critical_index: None,
            smallest_unstable: None,
        });
    }

    let q_of = |n: u64| problem.mode(n).map(|m| m.delay_product);
    // q_n crosses pi/2 near n = (L / pi) sqrt(pi / (2 tau D)); refine by direct evaluation.
    let estimate = problem.length / PI * (FRAC_PI_2 / (params.delay * params.diffusivity)).sqrt();
    let mut critical = if estimate.is_finite() {
        estimate.floor() as u64
    } else {
        u64::MAX / 2
    };
    while critical > 0 && q_of(critical)? >= FRAC_PI_2 {
        critical -= 1;
    }
    while q_of(critical + 1)? < FRAC_PI_2 {
        critical += 1;
    }
    let mut unstable = critical + 1;
    while classify_q(q_of(unstable)?) != Regime::Unstable {
        unstable += 1;
    }

    Ok(StabilityTable {
        rows,
        critical_index: Some(critical),
        smallest_unstable: Some(unstable),
    })
}

fn classify_q(q: f64) -> Regime {
    if (q - FRAC_PI_2).abs() <= MARGINAL_TOL * FRAC_PI_2 {
        Regime::Marginal
    } else if q > FRAC_PI_2 {
        Regime::Unstable
    } else {
        Regime::OscillatoryDecay
    }
}
