//! Tridiagonal operators `a K + b M` on the interior nodes `0..n−1`.

use crate::grid::RadialGrid;

/// `a K + b M` restricted to the free nodes; the Dirichlet node stays zero.
pub(crate) struct ShiftedStiffness {
    diag: Vec<f64>,
    /// `off[i]` couples nodes `i` and `i+1`
    off: Vec<f64>,
}

impl ShiftedStiffness {
    pub fn new(grid: &RadialGrid, a: f64, b: f64) -> Self {
        let k = grid.face_coefficients();
        let m = grid.cell_volumes();
        let free = grid.len() - 1;
        let diag = (0..free)
            .map(|i| {
                let left = if i > 0 { k[i - 1] } else { 0.0 };
                a * (left + k[i]) + b * m[i]
            })
            .collect();
        let off = (0..free - 1).map(|i| -a * k[i]).collect();
        Self { diag, off }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let free = self.diag.len();
        let mut y = vec![0.0; x.len()];
        for i in 0..free {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < free {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// Thomas algorithm; the operator is symmetric positive definite when
    /// `a > 0` and `b > 0`.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let free = self.diag.len();
        let mut c = vec![0.0; free];
        let mut d = vec![0.0; free];
        let mut denom = self.diag[0];
        c[0] = if free > 1 { self.off[0] / denom } else { 0.0 };
        d[0] = rhs[0] / denom;
        for i in 1..free {
            denom = self.diag[i] - self.off[i - 1] * c[i - 1];
            if i + 1 < free {
                c[i] = self.off[i] / denom;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = vec![0.0; rhs.len()];
        x[free - 1] = d[free - 1];
        for i in (0..free - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
