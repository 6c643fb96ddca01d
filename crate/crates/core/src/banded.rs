//! Symmetric banded storage.

use std::io::{self, Write};

/// Symmetric matrix storing the lower band row by row: entry `(i, j)` with
/// `i - hb <= j <= i` sits at `data[i * (hb + 1) + (j + hb - i)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBand {
    n: usize,
    hb: usize,
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        Self {
            n,
            hb: half_bandwidth,
            data: vec![0.0; n * (half_bandwidth + 1)],
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), 0);
        m.data.copy_from_slice(diag);
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.hb
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.hb {
            None
        } else {
            Some(i * (self.hb + 1) + (j + self.hb - i))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.offset(i, j).map_or(0.0, |k| self.data[k])
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    ///
    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .offset(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {}", self.hb));
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .offset(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {}", self.hb));
        self.data[k] = v;
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let w = self.hb + 1;
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let row = &self.data[i * w..(i + 1) * w];
            let j0 = i.saturating_sub(self.hb);
            let mut acc = row[self.hb] * x[i];
            for j in j0..i {
                let a = row[j + self.hb - i];
                acc += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += acc;
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul(x))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self + c * other`; both must share dimension and bandwidth.
    pub fn axpy(&self, c: f64, other: &SymBand) -> SymBand {
        assert_eq!(self.n, other.n);
        assert_eq!(self.hb, other.hb);
        SymBand {
            n: self.n,
            hb: self.hb,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + c * b).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Symmetric coordinate listing of the lower triangle (1-based).
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> io::Result<()> {
        let entries: Vec<(usize, usize, f64)> = (0..self.n)
            .flat_map(|i| (i.saturating_sub(self.hb)..=i).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.get(i, j)))
            .filter(|e| e.2 != 0.0)
            .collect();
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(w, "{} {} {}", self.n, self.n, entries.len())?;
        for (i, j, v) in entries {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
