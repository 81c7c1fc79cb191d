use ndarray::{s, Array2, ArrayView1};

use crate::error::{Error, Result};

/// A sampled space-time solution `u(x_i, t_j)`, one row per time.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    /// Shape `(t.len(), x.len())`.
    pub u: Array2<f64>,
    filled_rows: usize,
}

impl Field {
    /// A field with every row populated.
    pub fn new(x: Vec<f64>, t: Vec<f64>, u: Array2<f64>) -> Result<Self> {
        if u.dim() != (t.len(), x.len()) {
            return Err(Error::State(format!(
                "field values have shape {:?}, expected ({}, {})",
                u.dim(),
                t.len(),
                x.len()
            )));
        }
        let filled_rows = t.len();
        Ok(Self {
            x,
            t,
            u,
            filled_rows,
        })
    }

    /// A zeroed field whose rows are populated incrementally by a time stepper.
    pub fn empty(x: Vec<f64>, t: Vec<f64>) -> Self {
        let u = Array2::zeros((t.len(), x.len()));
        Self {
            x,
            t,
            u,
            filled_rows: 0,
        }
    }

    /// Number of leading rows that hold valid data.
    pub fn filled_rows(&self) -> usize {
        self.filled_rows
    }

    pub(crate) fn mark_filled(&mut self, rows: usize) {
        self.filled_rows = self.filled_rows.max(rows.min(self.t.len()));
    }

    pub fn row(&self, j: usize) -> ArrayView1<'_, f64> {
        self.u.row(j)
    }

    /// Index of the stored time closest to `t`.
    pub fn nearest_time_index(&self, t: f64) -> usize {
        self.t
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (*a - t).abs().total_cmp(&(*b - t).abs()))
            .map(|(j, _)| j)
            .unwrap_or(0)
    }

    /// Values at every `x` for the stored time closest to `t`.
    pub fn at_time(&self, t: f64) -> ArrayView1<'_, f64> {
        self.u.row(self.nearest_time_index(t))
    }

    /// Largest absolute value over the populated rows.
    pub fn max_abs(&self) -> f64 {
        self.u
            .slice(s![..self.filled_rows, ..])
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}
