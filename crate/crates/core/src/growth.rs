//! Exponential growth-rate estimation from a sampled amplitude history.

use crate::error::{Error, Result};

/// Fits `sigma` in `|v(t)| ~ C exp(sigma t)`.
///
/// Oscillating signals are fitted through their envelope: local maxima of
/// `|v|` are refined by a parabola through the three surrounding samples and
/// `ln(peak)` is regressed on peak time. With fewer than two peaks (monotone
/// growth or decay) the regression runs over `ln|v|` at every nonzero sample.
pub fn fit_growth_rate(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::invalid(
            "values",
            format!("{} values for {} times", values.len(), times.len()),
        ));
    }
    if times
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::invalid("times", "must be strictly increasing"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("values", "must be finite"));
    }
    let magnitude: Vec<f64> = values.iter().map(|v| v.abs()).collect();

    let peaks: Vec<(f64, f64)> = (1..magnitude.len().saturating_sub(1))
        .filter(|&i| {
            magnitude[i] > 0.0
                && magnitude[i] >= magnitude[i - 1]
                && magnitude[i] > magnitude[i + 1]
        })
        .map(|i| refine_peak(&times[i - 1..=i + 1], &magnitude[i - 1..=i + 1]))
        .collect();

    let points: Vec<(f64, f64)> = if peaks.len() >= 2 {
        peaks.into_iter().map(|(t, v)| (t, v.ln())).collect()
    } else {
        times
            .iter()
            .zip(&magnitude)
            .filter(|(_, &v)| v > 0.0)
            .map(|(&t, &v)| (t, v.ln()))
            .collect()
    };
    if points.len() < 2 {
        return Err(Error::invalid(
            "values",
            "need at least two nonzero samples to fit a rate",
        ));
    }
    Ok(least_squares_slope(&points))
}

// Vertex of the parabola through three samples; falls back to the middle
// sample when the samples are collinear or the vertex leaves the bracket.
fn refine_peak(t: &[f64], v: &[f64]) -> (f64, f64) {
    let (t0, t1, t2) = (t[0], t[1], t[2]);
    let (v0, v1, v2) = (v[0], v[1], v[2]);
    let d01 = (v1 - v0) / (t1 - t0);
    let d12 = (v2 - v1) / (t2 - t1);
    let curvature = (d12 - d01) / (t2 - t0);
    if curvature >= 0.0 {
        return (t1, v1);
    }
    // v(t) = v1 + d (t - t1) + curvature (t - t1)^2 with d the slope at t1.
    let slope = d01 + curvature * (t1 - t0);
    let offset = -slope / (2.0 * curvature);
    if !(t0 - t1..=t2 - t1).contains(&offset) {
        return (t1, v1);
    }
    (t1 + offset, v1 + slope * offset / 2.0)
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (sty, stt) = points.iter().fold((0.0, 0.0), |(sty, stt), &(t, y)| {
        let dt = t - mean_t;
        (sty + dt * (y - mean_y), stt + dt * dt)
    });
    sty / stt
}
