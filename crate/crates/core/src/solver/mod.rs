//! Ground states by three independent routes, plus the λ-continuation sweep.
//!
//! * [`solve_fiber_descent`]: minimise `J(w) = max_t I(w_t)` (route A).
//! * [`solve_limit_bl`]: constrained minimisation for the autonomous problem (route B).
//! * [`shoot_oracle`]: radial ODE shooting for the autonomous problem (route C).
//! * [`sweep_lambda`]: autonomous levels `m_λ^∞` against the path bound `c̄_λ`.

mod constrained;
mod descent;
mod linalg;
mod shooting;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::FunctionalContext;
use crate::grid::{make_grid, pde_residual, RadialFunction};

pub use constrained::solve_limit_bl;
pub use descent::{initial_guess, solve_fiber_descent};
pub use shooting::{shoot_oracle, ShootingOutcome};
pub use sweep::{sweep_lambda, SweepReport, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Initial trial step of every line search.
    pub step: f64,
    /// Step shrink factor on a failed Armijo test.
    pub backtrack: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Tolerance on the optimality residual.
    pub grad_tol: f64,
    /// Tolerance on `|P(u)|/‖u‖²`.
    pub pohozaev_tol: f64,
    /// Initial Gaussian bump `A e^{−r²/σ²}`: amplitude A.
    pub amplitude: f64,
    /// Initial Gaussian bump width σ.
    pub width: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            grad_tol: 1e-6,
            pohozaev_tol: 1e-3,
            amplitude: 1.0,
            width: 2.0,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        let ok = self.max_iters >= 1
            && positive(self.step)
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.armijo > 0.0
            && self.armijo < 1.0
            && positive(self.grad_tol)
            && positive(self.pohozaev_tol)
            && positive(self.amplitude)
            && positive(self.width);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "bad solver options {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    FiberDescent,
    BlConstrained,
    Shooting,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::FiberDescent => "fiber-descent",
            Route::BlConstrained => "bl-constrained",
            Route::Shooting => "shooting",
        }
    }
}

/// Outcome of one ground-state solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub route: Route,
    pub converged: bool,
    /// `m̂`: the route's certified energy level
    pub energy: f64,
    /// `|P(u*)|/‖u*‖²` on the grid
    pub pohozaev_residual: f64,
    /// The stopping certificate: KKT residual for routes A and B, relative
    /// bisection width for shooting
    pub optimality_residual: f64,
    /// `‖−Δu* + V u* − λ f(u*)‖₂ / ‖u*‖₂`, a diagnostic
    pub pde_residual: f64,
    pub iterations: usize,
    pub u_at_zero: f64,
    #[serde(with = "solution_serde")]
    pub u_star: RadialFunction,
}

/// Relative strong-form residual `‖R(u)‖₂/‖u‖₂` in the cell quadrature.
pub fn relative_pde_residual(ctx: &FunctionalContext, u: &RadialFunction) -> f64 {
    let r = pde_residual(u, ctx.potential(), ctx.nonlinearity(), ctx.lambda());
    (r.l2_norm_sq() / u.l2_norm_sq()).sqrt()
}

/// Stores a solution with enough grid metadata to rebuild it.
mod solution_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Stored {
        dim: usize,
        r_max: f64,
        n: usize,
        values: Vec<f64>,
    }

    pub fn serialize<S: Serializer>(u: &RadialFunction, s: S) -> Result<S::Ok, S::Error> {
        let g = u.grid();
        Stored {
            dim: g.dim(),
            r_max: g.r_max(),
            n: g.len(),
            values: u.values().to_vec(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RadialFunction, D::Error> {
        use serde::de::Error as _;
        let st = Stored::deserialize(d)?;
        let grid = make_grid(st.dim, st.r_max, st.n).map_err(D::Error::custom)?;
        RadialFunction::new(grid, st.values).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn option_validation() {
        assert!(SolveOptions::default().validate().is_ok());
        let bad = SolveOptions {
            max_iters: 0,
            ..SolveOptions::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolveOptions {
            backtrack: 1.0,
            ..SolveOptions::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn report_round_trips_through_json() {
        let grid = make_grid(3, 10.0, 64).unwrap();
        let u = RadialFunction::from_fn(grid, |r| (-r * r).exp());
        let rep = SolveReport {
            route: Route::Shooting,
            converged: true,
            energy: 1.5,
            pohozaev_residual: 1e-4,
            optimality_residual: 1e-12,
            pde_residual: 1e-3,
            iterations: 3,
            u_at_zero: 1.0,
            u_star: u,
        };
        let s = serde_json::to_string(&rep).unwrap();
        assert!(s.contains("\"route\":\"shooting\""));
        let back: SolveReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back.u_star.values(), rep.u_star.values());
        assert!(back.u_star.same_grid(&rep.u_star));
    }
}
