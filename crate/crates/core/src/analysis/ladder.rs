//! Grid ladders and Romberg extrapolation in the mesh size.

use serde::{Deserialize, Serialize};

use crate::discretize::{build_grid, TensorGrid};
use crate::error::{Error, Result};
use crate::geometry::Interval;

/// Sequence of grids, each with both cell counts doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridLadder {
    pub ns: usize,
    pub nt: usize,
    pub levels: usize,
}

impl GridLadder {
    pub fn new(ns: usize, nt: usize, levels: usize) -> Result<Self> {
        if ns < 2 || nt < 2 || levels == 0 {
            return Err(Error::DegenerateGrid(format!(
                "ladder needs Ns, Nt >= 2 and at least one level, got {ns} x {nt} x {levels}"
            )));
        }
        Ok(Self { ns, nt, levels })
    }

    pub fn grids(&self, interval: Interval) -> Result<Vec<TensorGrid>> {
        (0..self.levels)
            .map(|l| build_grid(interval, self.ns << l, self.nt << l))
            .collect()
    }

    pub fn finest(&self) -> (usize, usize) {
        (self.ns << (self.levels - 1), self.nt << (self.levels - 1))
    }

    pub fn tag(&self) -> String {
        let (ns, nt) = self.finest();
        if self.levels == 1 {
            format!("{ns}x{nt}")
        } else {
            format!("{}x{}..{ns}x{nt}/{}", self.ns, self.nt, self.levels)
        }
    }
}

/// Romberg extrapolation of values computed on successively halved mesh
/// sizes, assuming an error expansion in even powers of `h`. Returns the
/// extrapolated value and an error estimate: the difference between the
/// two highest-order entries of the last row. A single value has an
/// infinite error estimate.
pub fn romberg(values: &[f64]) -> (f64, f64) {
    match values.len() {
        0 => (f64::NAN, f64::INFINITY),
        1 => (values[0], f64::INFINITY),
        n => {
            let mut prev: Vec<f64> = vec![values[0]];
            for (i, &v) in values.iter().enumerate().skip(1) {
                let mut row = vec![v];
                for k in 1..=i {
                    let f = 4f64.powi(k as i32) - 1.0;
                    let t = row[k - 1] + (row[k - 1] - prev[k - 1]) / f;
                    row.push(t);
                }
                prev = row;
            }
            (prev[n - 1], (prev[n - 1] - prev[n - 2]).abs())
        }
    }
}

/// Observed convergence order from three values on halved meshes.
pub fn observed_order(coarse: f64, medium: f64, fine: f64) -> f64 {
    ((coarse - medium) / (medium - fine)).abs().log2()
}
