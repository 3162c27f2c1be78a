//! Radial discretization of ℝᴺ.
//!
//! A radially symmetric `u(x) = u(|x|)` is sampled on the uniform mesh
//! `r_i = i·h`, `i = 0..n`, with `u(r_max) = 0` standing in for decay at
//! infinity. Two quadrature rules live on the grid:
//!
//! * composite Simpson weights (with the `N·ω_N·r^{N-1}` measure folded in),
//!   used by [`integrate`] for generic radial integrands;
//! * finite-volume cell weights, used by every energy-type functional. Cell
//!   `i` is the shell `r_{i-1/2} < |x| < r_{i+1/2}` (a ball for `i = 0`), and
//!   the Dirichlet term is a sum of squared differences over the dual faces.
//!   With this pairing the residual operator returned by [`pde_residual`] is
//!   exactly the gradient of the discrete energy.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{NonlinearitySpec, PotentialSpec};

/// Smallest admissible node count.
pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone)]
pub struct RadialGrid {
    dim: usize,
    r_max: f64,
    n: usize,
    h: f64,
    omega: f64,
    sobolev: f64,
    nodes: Vec<f64>,
    simpson: Vec<f64>,
    cells: Vec<f64>,
    faces: Vec<f64>,
    inv_sq_cells: Vec<f64>,
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.r_max.to_bits() == other.r_max.to_bits()
    }
}

/// Builds a uniform grid on `[0, r_max]` with `n` nodes for radial functions on ℝᴺ.
pub fn make_grid(dim: usize, r_max: f64, n: usize) -> Result<Arc<RadialGrid>> {
    RadialGrid::new(dim, r_max, n).map(Arc::new)
}

impl RadialGrid {
    pub fn new(dim: usize, r_max: f64, n: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidDimension(dim));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidSize(format!(
                "r_max must be positive, got {r_max}"
            )));
        }
        if n < MIN_NODES {
            return Err(Error::InvalidSize(format!(
                "need at least {MIN_NODES} nodes, got {n}"
            )));
        }
        let h = r_max / (n - 1) as f64;
        let nf = dim as f64;
        let omega = unit_ball_volume(dim);
        let area = nf * omega;
        let nodes: Vec<f64> = (0..n)
            .map(|i| if i == n - 1 { r_max } else { i as f64 * h })
            .collect();

        let simpson = simpson_weights(n, h)
            .into_iter()
            .zip(&nodes)
            .map(|(w, &r)| w * area * r.powi(dim as i32 - 1))
            .collect();

        let half = |i: usize| (i as f64 + 0.5) * h;
        let cells = (0..n)
            .map(|i| {
                let outer = if i == n - 1 { r_max } else { half(i) };
                let inner = if i == 0 { 0.0 } else { half(i - 1) };
                omega * (outer.powi(dim as i32) - inner.powi(dim as i32))
            })
            .collect();
        let faces = (0..n - 1)
            .map(|i| area * half(i).powi(dim as i32 - 1) / h)
            .collect();
        // ∫_cell |x|^{-2} dx, finite for N >= 3
        let inv_sq_cells = (0..n)
            .map(|i| {
                let outer = if i == n - 1 { r_max } else { half(i) };
                let inner = if i == 0 { 0.0 } else { half(i - 1) };
                area * (outer.powi(dim as i32 - 2) - inner.powi(dim as i32 - 2)) / (nf - 2.0)
            })
            .collect();

        Ok(Self {
            dim,
            r_max,
            n,
            h,
            omega,
            sobolev: sobolev_constant(dim),
            nodes,
            simpson,
            cells,
            faces,
            inv_sq_cells,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Volume of the unit ball in ℝᴺ.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Best constant `S` in `S‖u‖²_{2*} ≤ ‖∇u‖²₂`.
    pub fn sobolev_constant(&self) -> f64 {
        self.sobolev
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Simpson weights including the `N·ω_N·r^{N-1}` measure.
    pub fn simpson_weights(&self) -> &[f64] {
        &self.simpson
    }

    /// Finite-volume cell volumes.
    pub fn cell_volumes(&self) -> &[f64] {
        &self.cells
    }

    /// Face coefficients `N·ω_N·r_{i+1/2}^{N-1} / h`, one per dual face.
    pub fn face_coefficients(&self) -> &[f64] {
        &self.faces
    }

    /// Cell integrals of `|x|^{-2}`.
    pub fn inverse_square_cells(&self) -> &[f64] {
        &self.inv_sq_cells
    }

    /// `Σ m_i g_i`: cell quadrature of nodal values.
    pub fn cell_sum(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.cells.iter().zip(values).map(|(m, g)| m * g).sum()
    }

    /// Applies the stiffness matrix: `(K u)_i = ∂(½ Σ κ (Δu)²)/∂u_i`.
    pub fn stiffness_apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (i, &k) in self.faces.iter().enumerate() {
            let flux = k * (u[i + 1] - u[i]);
            out[i] -= flux;
            out[i + 1] += flux;
        }
        out
    }

    /// `Σ κ_{i+1/2} (u_{i+1} - u_i)²`.
    pub fn dirichlet_form(&self, u: &[f64]) -> f64 {
        self.faces
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let d = u[i + 1] - u[i];
                k * d * d
            })
            .sum()
    }
}

/// `π^{N/2} / Γ(N/2 + 1)`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    PI.powf(dim as f64 / 2.0) / gamma_half(dim + 2)
}

/// Γ(k/2) for a positive integer `k`.
fn gamma_half(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        (1..k / 2).map(|j| j as f64).product()
    } else {
        // Γ(1/2) = √π, Γ(x + 1) = xΓ(x)
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < k as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Aubin–Talenti constant `π N (N-2) (Γ(N/2)/Γ(N))^{2/N}`.
fn sobolev_constant(dim: usize) -> f64 {
    let nf = dim as f64;
    PI * nf * (nf - 2.0) * (gamma_half(dim) / gamma_half(2 * dim)).powf(2.0 / nf)
}

fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let intervals = n - 1;
    let mut w = vec![0.0; n];
    let simpson_end = if intervals.is_multiple_of(2) {
        intervals
    } else {
        intervals - 3
    };
    for i in (0..simpson_end).step_by(2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if simpson_end < intervals {
        // Simpson 3/8 on the last three intervals
        let s = simpson_end;
        for (k, c) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
            w[s + k] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// A radial function sampled on a [`RadialGrid`].
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl PartialEq for RadialFunction {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl RadialFunction {
    /// Wraps nodal values; the last value must be zero and all values finite.
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidSize(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if values[values.len() - 1] != 0.0 {
            return Err(Error::InvalidParameter(
                "radial function must vanish at r_max".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    /// Samples `g` at the nodes and pins the outer node to zero.
    pub fn from_fn(grid: Arc<RadialGrid>, g: impl Fn(f64) -> f64) -> Self {
        let mut values: Vec<f64> = grid.nodes().iter().map(|&r| g(r)).collect();
        let last = values.len() - 1;
        values[last] = 0.0;
        Self { grid, values }
    }

    pub(crate) fn from_raw(grid: Arc<RadialGrid>, mut values: Vec<f64>) -> Self {
        let last = values.len() - 1;
        values[last] = 0.0;
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: f64, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        Ok(Self::from_raw(self.grid.clone(), values))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖u‖²₂` with cell quadrature.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.cell_sum(self.values.iter().map(|v| v * v))
    }

    /// `‖u‖² = ‖∇u‖²₂ + ‖u‖²₂`.
    pub fn h1_norm_sq(&self) -> f64 {
        grad_seminorm_sq(self) + self.l2_norm_sq()
    }

    /// Cell-quadrature inner product `Σ m_i u_i v_i`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .grid
            .cell_sum(self.values.iter().zip(&other.values).map(|(a, b)| a * b)))
    }
}

/// Simpson quadrature of `∫_{ℝᴺ} g(|x|) dx = N ω_N ∫₀^{r_max} g(r) r^{N-1} dr`.
pub fn integrate(g: &RadialFunction) -> f64 {
    g.grid
        .simpson_weights()
        .iter()
        .zip(&g.values)
        .map(|(w, v)| w * v)
        .sum()
}

/// `‖∇u‖²₂` from face-centred differences.
pub fn grad_seminorm_sq(u: &RadialFunction) -> f64 {
    u.grid.dirichlet_form(&u.values)
}

/// `u_t(x) = u(x/t)` by four-point Lagrange interpolation, even reflection at
/// the origin and zero extension past `r_max`.
pub fn dilate(u: &RadialFunction, t: f64) -> Result<RadialFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonpositiveDilation(t));
    }
    if t == 1.0 {
        return Ok(u.clone());
    }
    let grid = &u.grid;
    let n = grid.len();
    let h = grid.spacing();
    let at = |k: isize| -> f64 {
        let k = k.unsigned_abs();
        if k < n {
            u.values[k]
        } else {
            0.0
        }
    };
    let values = grid
        .nodes()
        .iter()
        .map(|&r| {
            let s = r / t / h;
            if s >= (n - 1) as f64 {
                return 0.0;
            }
            let j = s.floor();
            let d = s - j;
            let j = j as isize;
            let w_m1 = -d * (d - 1.0) * (d - 2.0) / 6.0;
            let w_0 = (d + 1.0) * (d - 1.0) * (d - 2.0) / 2.0;
            let w_1 = -(d + 1.0) * d * (d - 2.0) / 2.0;
            let w_2 = (d + 1.0) * d * (d - 1.0) / 6.0;
            w_m1 * at(j - 1) + w_0 * at(j) + w_1 * at(j + 1) + w_2 * at(j + 2)
        })
        .collect();
    Ok(RadialFunction::from_raw(grid.clone(), values))
}

/// Strong-form residual `−Δu + V u − λ f(u)`, zero at the Dirichlet node.
///
/// Equals `M⁻¹ ∇E_h(u)` for the discrete energy with cell masses `M`, so its
/// cell-quadrature pairing with a direction is the directional derivative of
/// the energy. At the origin it reduces to `−2N(u_1 − u_0)/h² ≈ −N u''(0)`.
pub fn pde_residual(
    u: &RadialFunction,
    potential: &PotentialSpec,
    f: &NonlinearitySpec,
    lambda: f64,
) -> RadialFunction {
    let grid = &u.grid;
    let ku = grid.stiffness_apply(&u.values);
    let n = grid.len();
    let values = (0..n)
        .map(|i| {
            if i == n - 1 {
                return 0.0;
            }
            let r = grid.nodes()[i];
            let ui = u.values[i];
            ku[i] / grid.cell_volumes()[i] + potential.value(r) * ui - lambda * f.f(ui)
        })
        .collect();
    RadialFunction::from_raw(grid.clone(), values)
}
