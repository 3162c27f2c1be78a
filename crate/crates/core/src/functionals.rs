//! Energies, Pohožaev functionals and the inequalities that tie them together.
//!
//! All integrals use the grid's cell quadrature, so identities such as
//! `Ψ = I − P/N` hold to round-off, and the residual operator in
//! [`crate::grid::pde_residual`] is the exact gradient of [`energy`].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{grad_seminorm_sq, RadialFunction, RadialGrid};
use crate::model::{resolve_theta, NonlinearitySpec, PotentialSpec};

/// Everything a functional needs besides `u`: grid, `V`, `f`, λ and θ.
#[derive(Debug, Clone)]
pub struct FunctionalContext {
    grid: Arc<RadialGrid>,
    potential: PotentialSpec,
    nonlinearity: NonlinearitySpec,
    lambda: f64,
    theta: f64,
    v_nodes: Vec<f64>,
    moment_nodes: Vec<f64>,
}

impl FunctionalContext {
    /// Context with λ = 1 and θ declared on `potential` or estimated from it.
    pub fn new(
        grid: Arc<RadialGrid>,
        potential: PotentialSpec,
        nonlinearity: NonlinearitySpec,
    ) -> Self {
        let theta = resolve_theta(&potential, grid.dim(), grid.r_max());
        let v_nodes = grid.nodes().iter().map(|&r| potential.value(r)).collect();
        let moment_nodes = grid
            .nodes()
            .iter()
            .map(|&r| potential.radial_moment(r))
            .collect();
        Self {
            grid,
            potential,
            nonlinearity,
            lambda: 1.0,
            theta,
            v_nodes,
            moment_nodes,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in [0,1], got {lambda}"
            )));
        }
        self.lambda = lambda;
        Ok(self)
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0,1), got {theta}"
            )));
        }
        self.theta = theta;
        Ok(self)
    }

    /// The autonomous context: same grid, `f` and λ, with `V ≡ V∞`.
    pub fn limit(&self) -> Self {
        let potential = self.potential.limit();
        let v_inf = potential.v_inf();
        Self {
            grid: self.grid.clone(),
            potential,
            nonlinearity: self.nonlinearity,
            lambda: self.lambda,
            theta: 0.0,
            v_nodes: vec![v_inf; self.grid.len()],
            moment_nodes: vec![0.0; self.grid.len()],
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn nonlinearity(&self) -> &NonlinearitySpec {
        &self.nonlinearity
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn v_inf(&self) -> f64 {
        self.potential.v_inf()
    }

    /// `V(r_i)` at the grid nodes.
    pub fn v_nodes(&self) -> &[f64] {
        &self.v_nodes
    }

    /// `r_i V′(r_i)` at the grid nodes.
    pub fn moment_nodes(&self) -> &[f64] {
        &self.moment_nodes
    }

    fn check(&self, u: &RadialFunction) {
        assert!(
            **u.grid() == *self.grid,
            "function and context live on different grids"
        );
    }

    /// The quadrature values every functional is assembled from.
    pub fn parts(&self, u: &RadialFunction) -> Parts {
        self.check(u);
        let m = self.grid.cell_volumes();
        let mut p = Parts {
            grad: grad_seminorm_sq(u),
            ..Parts::default()
        };
        for (i, &ui) in u.values().iter().enumerate() {
            if ui == 0.0 {
                continue;
            }
            let w = m[i] * ui * ui;
            p.mass += w;
            p.potential += w * self.v_nodes[i];
            p.moment += w * self.moment_nodes[i];
            p.primitive += m[i] * self.nonlinearity.primitive(ui);
        }
        p
    }
}

/// `‖∇u‖²`, `‖u‖²₂`, `∫V u²`, `∫(∇V·x)u²` and `∫F(u)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Parts {
    pub grad: f64,
    pub mass: f64,
    pub potential: f64,
    pub moment: f64,
    pub primitive: f64,
}

impl Parts {
    pub fn h1_sq(&self) -> f64 {
        self.grad + self.mass
    }
}

/// `½∫(|∇u|² + V u²) − λ∫F(u)`.
pub fn energy(ctx: &FunctionalContext, u: &RadialFunction) -> f64 {
    let p = ctx.parts(u);
    0.5 * p.grad + 0.5 * p.potential - ctx.lambda * p.primitive
}

/// [`energy`] with `V` replaced by `V∞`.
pub fn energy_limit(ctx: &FunctionalContext, u: &RadialFunction) -> f64 {
    let p = ctx.parts(u);
    0.5 * p.grad + 0.5 * ctx.v_inf() * p.mass - ctx.lambda * p.primitive
}

/// `(N−2)/2‖∇u‖² + ½∫(N V + ∇V·x)u² − Nλ∫F(u)`.
pub fn pohozaev(ctx: &FunctionalContext, u: &RadialFunction) -> f64 {
    pohozaev_from(ctx, &ctx.parts(u))
}

pub(crate) fn pohozaev_from(ctx: &FunctionalContext, p: &Parts) -> f64 {
    let nf = ctx.dim() as f64;
    0.5 * (nf - 2.0) * p.grad + 0.5 * (nf * p.potential + p.moment) - nf * ctx.lambda * p.primitive
}

/// [`pohozaev`] with `N V + ∇V·x` replaced by `N V∞`.
pub fn pohozaev_limit(ctx: &FunctionalContext, u: &RadialFunction) -> f64 {
    let nf = ctx.dim() as f64;
    let p = ctx.parts(u);
    0.5 * (nf - 2.0) * p.grad + 0.5 * nf * ctx.v_inf() * p.mass - nf * ctx.lambda * p.primitive
}

/// `Ψ(u) = ‖∇u‖²/N − ∫(∇V·x)u²/(2N)`, equal to `I − P/N`.
pub fn psi(ctx: &FunctionalContext, u: &RadialFunction) -> f64 {
    let nf = ctx.dim() as f64;
    let p = ctx.parts(u);
    p.grad / nf - p.moment / (2.0 * nf)
}

pub(crate) fn g_poly(t: f64, dim: usize) -> f64 {
    let nf = dim as f64;
    2.0 - nf * t.powi(dim as i32 - 2) + (nf - 2.0) * t.powi(dim as i32)
}

/// `g(t) = 2 − N t^{N−2} + (N−2) t^N`, positive for `t ≠ 1`.
pub fn g_of_t(t: f64, dim: usize) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeT(t));
    }
    Ok(g_poly(t, dim))
}

/// Evaluates `I_λ(u_t)` and `P_λ(u_t)` through the exact scaling laws.
///
/// Only the potential term depends on `t` beyond a power law; it is
/// evaluated at `t·r_i` on the original nodes, so no interpolation enters.
#[derive(Debug, Clone)]
pub struct Fiber<'a> {
    ctx: &'a FunctionalContext,
    grad: f64,
    primitive: f64,
    mass: f64,
    /// `(r_i, m_i u_i²)` for the nonzero nodes
    weights: Vec<(f64, f64)>,
}

impl<'a> Fiber<'a> {
    pub fn new(ctx: &'a FunctionalContext, u: &RadialFunction) -> Self {
        let p = ctx.parts(u);
        let m = ctx.grid.cell_volumes();
        let weights = if ctx.potential.is_constant() {
            Vec::new()
        } else {
            ctx.grid
                .nodes()
                .iter()
                .zip(u.values())
                .zip(m)
                .filter(|((_, &v), _)| v != 0.0)
                .map(|((&r, &v), &mi)| (r, mi * v * v))
                .collect()
        };
        Self {
            ctx,
            grad: p.grad,
            primitive: p.primitive,
            mass: p.mass,
            weights,
        }
    }

    pub fn grad(&self) -> f64 {
        self.grad
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn primitive(&self) -> f64 {
        self.primitive
    }

    /// `(∫V(tx)u², ∫(∇V(tx)·tx)u²)`.
    fn potential_terms(&self, t: f64) -> (f64, f64) {
        let v = &self.ctx.potential;
        if v.is_constant() {
            return (v.v_inf() * self.mass, 0.0);
        }
        self.weights.iter().fold((0.0, 0.0), |(a, b), &(r, w)| {
            (a + w * v.value(t * r), b + w * v.radial_moment(t * r))
        })
    }

    /// `ζ(t) = I_λ(u_t)`.
    pub fn energy(&self, t: f64) -> f64 {
        let n = self.ctx.dim() as i32;
        let (pot, _) = self.potential_terms(t);
        let tn = t.powi(n);
        0.5 * t.powi(n - 2) * self.grad + tn * (0.5 * pot - self.ctx.lambda * self.primitive)
    }

    /// `P_λ(u_t) = t ζ′(t)`.
    pub fn pohozaev(&self, t: f64) -> f64 {
        let n = self.ctx.dim() as i32;
        let nf = n as f64;
        let (pot, mom) = self.potential_terms(t);
        let tn = t.powi(n);
        0.5 * (nf - 2.0) * t.powi(n - 2) * self.grad
            + tn * (0.5 * (nf * pot + mom) - nf * self.ctx.lambda * self.primitive)
    }

    /// `‖u_t‖² = t^{N−2}‖∇u‖² + t^N‖u‖²₂`.
    pub fn h1_sq(&self, t: f64) -> f64 {
        let n = self.ctx.dim() as i32;
        t.powi(n - 2) * self.grad + t.powi(n) * self.mass
    }
}

/// Slack granted to [`iip_gap`] for discretisation error.
pub fn iip_tolerance(u: &RadialFunction) -> f64 {
    1e-6 * (1.0 + u.h1_norm_sq())
}

/// `I(u) − I(u_t) − (1−t^N)/N·P(u) − (1−θ) g(t)/(2N)·‖∇u‖²`, nonnegative
/// whenever (V3) holds with the context's θ.
pub fn iip_gap(ctx: &FunctionalContext, u: &RadialFunction, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonpositiveDilation(t));
    }
    if t == 1.0 {
        return Ok(0.0);
    }
    let n = ctx.dim();
    let nf = n as f64;
    let p = ctx.parts(u);
    let i0 = 0.5 * p.grad + 0.5 * p.potential - ctx.lambda * p.primitive;
    let p0 = pohozaev_from(ctx, &p);
    let it = Fiber::new(ctx, u).energy(t);
    let tn = t.powi(n as i32);
    Ok(i0 - it - (1.0 - tn) / nf * p0 - (1.0 - ctx.theta) * g_poly(t, n) / (2.0 * nf) * p.grad)
}

/// `‖∇u‖² − (N−2)²/4·∫u²/|x|²`.
pub fn hardy_gap(u: &RadialFunction) -> f64 {
    let grid = u.grid();
    let k = grid.dim() as f64 - 2.0;
    let weighted: f64 = grid
        .inverse_square_cells()
        .iter()
        .zip(u.values())
        .map(|(q, v)| q * v * v)
        .sum();
    grad_seminorm_sq(u) - 0.25 * k * k * weighted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{dilate, make_grid, pde_residual};
    use crate::model::Profile;
    use std::f64::consts::PI;

    fn cubic() -> NonlinearitySpec {
        NonlinearitySpec::power(4.0).unwrap()
    }

    fn autonomous() -> FunctionalContext {
        FunctionalContext::new(
            make_grid(3, 30.0, 4096).unwrap(),
            PotentialSpec::constant(1.0),
            cubic(),
        )
    }

    fn well() -> FunctionalContext {
        let v = PotentialSpec::algebraic_well(1.0, 0.2, 2.0).unwrap();
        FunctionalContext::new(make_grid(3, 30.0, 4096).unwrap(), v, cubic())
    }

    fn bump(ctx: &FunctionalContext, a: f64, s: f64) -> RadialFunction {
        RadialFunction::from_fn(ctx.grid().clone(), |r| a * (-r * r / (s * s)).exp())
    }

    #[test]
    fn zero_function() {
        let ctx = well();
        let z = RadialFunction::zeros(ctx.grid().clone());
        assert_eq!(energy(&ctx, &z), 0.0);
        assert_eq!(energy_limit(&ctx, &z), 0.0);
        assert_eq!(pohozaev(&ctx, &z), 0.0);
        assert_eq!(pohozaev_limit(&ctx, &z), 0.0);
        assert_eq!(psi(&ctx, &z), 0.0);
        assert_eq!(hardy_gap(&z), 0.0);
        for t in [0.5, 2.0] {
            assert_eq!(iip_gap(&ctx, &z, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn autonomous_functionals_agree_with_limit_forms() {
        let ctx = autonomous();
        let u = bump(&ctx, 1.3, 1.7);
        assert_eq!(energy(&ctx, &u), energy_limit(&ctx, &u));
        assert_eq!(pohozaev(&ctx, &u), pohozaev_limit(&ctx, &u));
        let p = ctx.parts(&u);
        assert_eq!(psi(&ctx, &u), p.grad / 3.0);
    }

    #[test]
    fn gaussian_limit_energy_matches_closed_form() {
        // u = e^{-r²}: ‖∇u‖² = 3π^{3/2}/(2√2), ‖u‖² = (π/2)^{3/2}, ∫u⁴ = (π/4)^{3/2}
        let ctx = autonomous();
        let u = bump(&ctx, 1.0, 1.0);
        let grad = 3.0 * PI.powf(1.5) / (2.0 * 2f64.sqrt());
        let exact = 0.5 * grad + 0.5 * (PI / 2.0).powf(1.5) - 0.25 * (PI / 4.0).powf(1.5);
        let err = (energy_limit(&ctx, &u) - exact).abs();
        assert!(err < 2e-5, "{err}");
        // cell quadrature is second order: refining halves h and quarters the error
        let fine = FunctionalContext::new(
            make_grid(3, 30.0, 8191).unwrap(),
            PotentialSpec::constant(1.0),
            cubic(),
        );
        let uf = bump(&fine, 1.0, 1.0);
        let err_fine = (energy_limit(&fine, &uf) - exact).abs();
        assert!(err_fine < err / 3.0, "{err} -> {err_fine}");
    }

    #[test]
    fn limit_energy_dominates() {
        let ctx = well();
        let u = bump(&ctx, 2.0, 1.5);
        let gap = energy_limit(&ctx, &u) - energy(&ctx, &u);
        let p = ctx.parts(&u);
        assert!(gap > 0.0);
        assert!((gap - 0.5 * (p.mass - p.potential)).abs() < 1e-12 * gap.abs().max(1.0));
    }

    #[test]
    fn psi_identity() {
        let ctx = well();
        for (a, s) in [(0.5, 1.0), (3.0, 2.5), (7.0, 0.6)] {
            let u = bump(&ctx, a, s);
            let lhs = psi(&ctx, &u);
            let rhs = energy(&ctx, &u) - pohozaev(&ctx, &u) / 3.0;
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs(), "{lhs} {rhs}");
        }
    }

    #[test]
    fn psi_lower_bound() {
        let ctx = well();
        let theta = ctx.theta();
        for (a, s) in [(0.5, 1.0), (3.0, 2.5), (7.0, 0.6), (1.0, 4.0)] {
            let u = bump(&ctx, a, s);
            let g = ctx.parts(&u).grad;
            assert!(psi(&ctx, &u) >= (1.0 - theta) / 3.0 * g);
        }
    }

    #[test]
    fn g_values() {
        assert_eq!(g_of_t(1.0, 3).unwrap(), 0.0);
        assert_eq!(g_of_t(0.0, 3).unwrap(), 2.0);
        assert_eq!(g_of_t(2.0, 3).unwrap(), 4.0);
        assert!(matches!(g_of_t(-0.1, 3), Err(Error::NegativeT(_))));
        for n in [3, 4, 5] {
            assert_eq!(g_of_t(1.0, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn iip_gap_trivial_cases() {
        let ctx = autonomous();
        let u = bump(&ctx, 2.0, 1.0);
        assert_eq!(iip_gap(&ctx, &u, 1.0).unwrap(), 0.0);
        assert!(matches!(
            iip_gap(&ctx, &u, 0.0),
            Err(Error::NonpositiveDilation(_))
        ));
        for t in [0.5, 2.0] {
            assert!(iip_gap(&ctx, &u, t).unwrap() >= -1e-8);
        }
    }

    #[test]
    fn hardy_gap_of_exponential() {
        let g = make_grid(3, 30.0, 4096).unwrap();
        let u = RadialFunction::from_fn(g, |r| (-r).exp());
        assert!((hardy_gap(&u) - PI / 2.0).abs() < 1e-3);
    }

    #[test]
    fn fiber_matches_dilation_scaling_law() {
        let ctx = well();
        let u = bump(&ctx, 2.0, 1.0);
        let fiber = Fiber::new(&ctx, &u);
        for t in [0.25, 0.6, 1.0, 1.9, 4.0] {
            let direct = energy(&ctx, &dilate(&u, t).unwrap());
            let law = fiber.energy(t);
            assert!(
                (direct - law).abs() < 1e-3 * (1.0 + law.abs()),
                "t={t}: {direct} vs {law}"
            );
        }
        assert_eq!(fiber.pohozaev(1.0), pohozaev(&ctx, &u));
        assert_eq!(fiber.energy(1.0), energy(&ctx, &u));
    }

    #[test]
    fn fiber_derivative_is_pohozaev_over_t() {
        let v = PotentialSpec::perturbed(1.0, 0.3, Profile::Gaussian).unwrap();
        let ctx = FunctionalContext::new(make_grid(3, 30.0, 2048).unwrap(), v, cubic());
        let u = bump(&ctx, 2.5, 1.3);
        let fiber = Fiber::new(&ctx, &u);
        for t in [0.3, 0.9, 1.7] {
            let e = 1e-5 * t;
            let d = (fiber.energy(t + e) - fiber.energy(t - e)) / (2.0 * e);
            assert!((d - fiber.pohozaev(t) / t).abs() < 1e-6 * (1.0 + d.abs()));
        }
    }

    #[test]
    fn residual_is_energy_gradient() {
        let ctx = well();
        let u = bump(&ctx, 1.8, 1.2);
        let phi = RadialFunction::from_fn(ctx.grid().clone(), |r| (1.0 + r) * (-r * r / 4.0).exp());
        let res = pde_residual(&u, ctx.potential(), ctx.nonlinearity(), 1.0);
        let pairing = res.inner(&phi).unwrap();
        let e = 1e-5;
        let plus = energy(&ctx, &u.axpy(e, &phi).unwrap());
        let minus = energy(&ctx, &u.axpy(-e, &phi).unwrap());
        let fd = (plus - minus) / (2.0 * e);
        assert!(
            (fd - pairing).abs() < 1e-6 * pairing.abs(),
            "{fd} vs {pairing}"
        );
    }

    #[test]
    fn lambda_and_theta_validation() {
        let ctx = autonomous();
        assert!(ctx.clone().with_lambda(1.2).is_err());
        assert!(ctx.clone().with_theta(1.0).is_err());
        assert_eq!(ctx.with_lambda(0.5).unwrap().lambda(), 0.5);
    }
}
