use std::sync::Arc;

use super::{relative_pde_residual, Route, SolveReport};
use crate::error::{Error, Result};
use crate::functionals::{energy, pohozaev, FunctionalContext};
use crate::grid::{RadialFunction, RadialGrid};
use crate::model::{log_space, NonlinearitySpec, PotentialSpec};

/// Largest ODE step allowed.
const MAX_STEP: f64 = 1e-3;
/// Trajectories with `|u| > BLOW_UP · u(0)` count as undershoots.
const BLOW_UP: f64 = 10.0;
const SCAN: (f64, f64, usize) = (1e-3, 1e3, 121);

/// How a trajectory from `u(0)` ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShootingOutcome {
    /// Crosses zero: `u(0)` too large.
    Overshoot,
    /// Turns back up or blows up while positive: `u(0)` too small.
    Undershoot,
}

struct Shooter<'a> {
    dim: f64,
    v_inf: f64,
    lambda: f64,
    f: &'a NonlinearitySpec,
    h_ode: f64,
    substeps: usize,
    cells: usize,
}

impl Shooter<'_> {
    fn rhs(&self, r: f64, u: f64, v: f64) -> (f64, f64) {
        let src = self.v_inf * u - self.lambda * self.f.f(u);
        if r == 0.0 {
            // (N−1)u′/r → (N−1)u″(0)
            (v, src / self.dim)
        } else {
            (v, src - (self.dim - 1.0) / r * v)
        }
    }

    /// Integrates from `u(0) = u0`, optionally recording `u` at grid nodes
    /// up to the end of the monotone decreasing part.
    fn run(&self, u0: f64, mut record: Option<&mut Vec<f64>>) -> Result<ShootingOutcome> {
        let (mut u, mut v) = (u0, 0.0);
        if let Some(rec) = record.as_deref_mut() {
            rec.clear();
            rec.push(u0);
        }
        let h = self.h_ode;
        let mut outcome = ShootingOutcome::Undershoot;
        'cells: for cell in 0..self.cells {
            for s in 0..self.substeps {
                let r = (cell * self.substeps + s) as f64 * h;
                let (k1u, k1v) = self.rhs(r, u, v);
                let (k2u, k2v) = self.rhs(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
                let (k3u, k3v) = self.rhs(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
                let (k4u, k4v) = self.rhs(r + h, u + h * k3u, v + h * k3v);
                u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
                v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
                if !(u.is_finite() && v.is_finite()) {
                    return Err(Error::StiffFailure(format!(
                        "non-finite state at r = {:.3e} from u(0) = {u0:.6e}",
                        r + h
                    )));
                }
                if u < 0.0 {
                    outcome = ShootingOutcome::Overshoot;
                    break 'cells;
                }
                if v > 0.0 || u.abs() > BLOW_UP * u0 {
                    break 'cells;
                }
            }
            if let Some(rec) = record.as_deref_mut() {
                rec.push(u);
            }
        }
        Ok(outcome)
    }
}

/// Ground state of `−Δu + V∞u = λ f(u)` by shooting on `u(0)`.
///
/// The returned profile is the undershooting trajectory at the end of a
/// bisection carried to f64 resolution, cut to zero past its turning point.
pub fn shoot_oracle(
    grid: &Arc<RadialGrid>,
    v_inf: f64,
    f: &NonlinearitySpec,
    lambda: f64,
) -> Result<SolveReport> {
    let ctx = FunctionalContext::new(grid.clone(), PotentialSpec::constant(v_inf), *f)
        .with_lambda(lambda)?;
    let h = grid.spacing();
    let substeps = (h / MAX_STEP).ceil().max(1.0) as usize;
    let shooter = Shooter {
        dim: grid.dim() as f64,
        v_inf,
        lambda,
        f,
        h_ode: h / substeps as f64,
        substeps,
        cells: grid.len() - 1,
    };

    let mut trials = 0;
    let mut bracket = None;
    let mut prev: Option<(f64, ShootingOutcome)> = None;
    for u0 in log_space(SCAN.0, SCAN.1, SCAN.2) {
        let out = shooter.run(u0, None)?;
        trials += 1;
        if let Some((p, ShootingOutcome::Undershoot)) = prev {
            if out == ShootingOutcome::Overshoot {
                bracket = Some((p, u0));
                break;
            }
        }
        prev = Some((u0, out));
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::BracketNotFound(format!(
            "no undershoot/overshoot transition for u(0) in [{:e}, {:e}]",
            SCAN.0, SCAN.1
        ))
    })?;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        trials += 1;
        match shooter.run(mid, None)? {
            ShootingOutcome::Undershoot => lo = mid,
            ShootingOutcome::Overshoot => hi = mid,
        }
    }

    let mut values = Vec::with_capacity(grid.len());
    shooter.run(lo, Some(&mut values))?;
    values.resize(grid.len(), 0.0);
    values[grid.len() - 1] = 0.0;
    let u = RadialFunction::new(grid.clone(), values)?;
    let width = (hi - lo) / lo;
    Ok(SolveReport {
        route: Route::Shooting,
        converged: width < 1e-10,
        energy: energy(&ctx, &u),
        pohozaev_residual: pohozaev(&ctx, &u).abs() / u.h1_norm_sq(),
        optimality_residual: width,
        pde_residual: relative_pde_residual(&ctx, &u),
        iterations: trials,
        u_at_zero: lo,
        u_star: u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn cubic_ground_state_is_positive_and_decreasing() {
        let grid = make_grid(3, 30.0, 4096).unwrap();
        let f = NonlinearitySpec::power(4.0).unwrap();
        let rep = shoot_oracle(&grid, 1.0, &f, 1.0).unwrap();
        assert!(rep.converged);
        let u = rep.u_star.values();
        assert!(u.windows(2).all(|w| w[1] <= w[0]));
        let cut = u.iter().position(|&x| x == 0.0).unwrap();
        // the undershoot turns back only once the decaying mode is at round-off
        assert!(grid.nodes()[cut] > 15.0 && u[cut - 1] < 1e-6);
        assert!((rep.u_at_zero - 4.337_387_68).abs() < 1e-8);
        assert!(rep.pohozaev_residual < 1e-3, "{}", rep.pohozaev_residual);
        assert!(rep.energy > 0.0);
    }

    #[test]
    fn linear_problem_has_no_bracket() {
        let grid = make_grid(3, 30.0, 1024).unwrap();
        let f = NonlinearitySpec::power_with_coefficient(4.0, 0.0).unwrap();
        assert!(matches!(
            shoot_oracle(&grid, 1.0, &f, 1.0),
            Err(Error::BracketNotFound(_))
        ));
    }

    #[test]
    fn pure_power_scaling_in_lambda() {
        // u solves the λ problem iff λ^{1/2} u solves the λ = 1 problem
        let grid = make_grid(3, 30.0, 2048).unwrap();
        let f = NonlinearitySpec::power(4.0).unwrap();
        let one = shoot_oracle(&grid, 1.0, &f, 1.0).unwrap();
        let half = shoot_oracle(&grid, 1.0, &f, 0.5).unwrap();
        assert!((half.u_at_zero * 0.5f64.sqrt() - one.u_at_zero).abs() < 1e-9);
        assert!((half.energy * 0.5 - one.energy).abs() < 1e-9 * one.energy);
    }
}
