//! Route B: minimise `G(w) = ‖∇w‖²` on `{C(w) = ∫[λF(w) − ½V∞w²] = 1}`.
//!
//! Steps are preconditioned gradients projected onto the tangent space of
//! the constraint; the constraint is restored by an amplitude rescaling.
//! The minimiser `ŵ` is turned into a ground state by the dilation
//! `ū = ŵ(·/t)` with `t = sqrt((N−2)/(2N)·G(ŵ))`, which is also the fiber
//! maximiser of `ŵ` for the autonomous energy.

use super::linalg::{dot, ShiftedStiffness};
use super::{relative_pde_residual, Route, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::functionals::{pohozaev, FunctionalContext};
use crate::grid::{dilate, RadialFunction};

const MAX_DOUBLINGS: usize = 60;

struct Constraint<'a> {
    ctx: &'a FunctionalContext,
    level: f64,
}

impl Constraint<'_> {
    fn value(&self, w: &[f64]) -> f64 {
        let f = self.ctx.nonlinearity();
        let (lambda, v_inf) = (self.ctx.lambda(), self.ctx.v_inf());
        self.ctx
            .grid()
            .cell_volumes()
            .iter()
            .zip(w)
            .map(|(m, &x)| m * (lambda * f.primitive(x) - 0.5 * v_inf * x * x))
            .sum()
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let f = self.ctx.nonlinearity();
        let (lambda, v_inf) = (self.ctx.lambda(), self.ctx.v_inf());
        let mut c: Vec<f64> = self
            .ctx
            .grid()
            .cell_volumes()
            .iter()
            .zip(w)
            .map(|(m, &x)| m * (lambda * f.f(x) - v_inf * x))
            .collect();
        let last = c.len() - 1;
        c[last] = 0.0;
        c
    }

    /// Amplitude `a` closest to 1 with `C(a w) = level`, if one is reachable.
    fn retract(&self, w: &[f64]) -> Option<Vec<f64>> {
        const GROW: f64 = 1.1;
        let at = |a: f64| self.value(&w.iter().map(|x| a * x).collect::<Vec<_>>()) - self.level;
        let (mut lo, mut hi) = (1.0, 1.0);
        if at(1.0) < 0.0 {
            while at(hi) < 0.0 {
                lo = hi;
                hi *= GROW;
                if hi > 1e6 {
                    return None;
                }
            }
        } else {
            while at(lo) >= 0.0 {
                hi = lo;
                lo /= GROW;
                if lo < 1e-6 {
                    return None;
                }
            }
        }
        // C(lo w) < level ≤ C(hi w)
        while hi - lo > 1e-15 * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if at(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(w.iter().map(|x| hi * x).collect())
    }
}

/// Gaussian bump on the constraint set: amplitude doubled until `C > 0`,
/// then the width rescaled by `C^{−1/N}` and the amplitude fine-tuned.
fn initial_guess(
    ctx: &FunctionalContext,
    con: &Constraint,
    opts: &SolveOptions,
) -> Result<Vec<f64>> {
    let grid = ctx.grid();
    let bump = |a: f64, s: f64| -> Vec<f64> {
        RadialFunction::from_fn(grid.clone(), |r| a * (-(r / s).powi(2)).exp()).into_values()
    };
    let mut amp = opts.amplitude;
    for _ in 0..=MAX_DOUBLINGS {
        let c = con.value(&bump(amp, opts.width));
        if c > 0.0 {
            let width = opts.width * c.powf(-1.0 / ctx.dim() as f64);
            return con.retract(&bump(amp, width)).ok_or_else(|| {
                Error::ConstraintInfeasible(format!(
                    "rescaled bump of width {width:.3e} cannot reach C = 1"
                ))
            });
        }
        amp *= 2.0;
    }
    Err(Error::ConstraintInfeasible(format!(
        "C(A e^(-r^2/s^2)) <= 0 for every amplitude up to {amp:.3e}"
    )))
}

struct Minimum {
    w: Vec<f64>,
    obj: f64,
    kkt: f64,
    iterations: usize,
    stalled: bool,
}

/// Projected preconditioned descent on the constraint set from `w`.
fn minimise(
    con: &Constraint,
    sigma: f64,
    mut w: Vec<f64>,
    opts: &SolveOptions,
    budget: usize,
) -> Minimum {
    let grid = con.ctx.grid();
    let masses = grid.cell_volumes();
    let m_norm = |v: &[f64]| -> f64 {
        v.iter()
            .zip(masses)
            .map(|(x, m)| x * x / m)
            .sum::<f64>()
            .sqrt()
    };
    let mut obj = grid.dirichlet_form(&w);
    let mut kkt = f64::INFINITY;
    let mut iterations = 0;
    let mut stalled = false;
    // Hessian of the Lagrangian at high frequency is 2K + μσM; μ starts at 2,
    // its value at a ground state on the calibrated level
    let mut mu: f64 = 2.0;
    while iterations < budget {
        let op = ShiftedStiffness::new(grid, 2.0, mu.max(1e-8) * sigma);
        let mut g = grid.stiffness_apply(&w);
        g.iter_mut().for_each(|x| *x *= 2.0);
        let last = g.len() - 1;
        g[last] = 0.0;
        let c = con.gradient(&w);
        let ag = op.solve(&g);
        let ac = op.solve(&c);
        mu = dot(&c, &ag) / dot(&c, &ac);
        let p: Vec<f64> = g.iter().zip(&c).map(|(gi, ci)| gi - mu * ci).collect();
        kkt = m_norm(&p) / m_norm(&g);
        if kkt < opts.grad_tol {
            break;
        }

        let d: Vec<f64> = ag.iter().zip(&ac).map(|(a, b)| a - mu * b).collect();
        let slope = dot(&p, &d);
        let mut alpha = opts.step;
        let mut accepted = None;
        while alpha > 1e-14 {
            let trial: Vec<f64> = w.iter().zip(&d).map(|(wi, di)| wi - alpha * di).collect();
            if let Some(next) = con.retract(&trial) {
                let value = grid.dirichlet_form(&next);
                if value <= obj - opts.armijo * alpha * slope {
                    accepted = Some((next, value));
                    break;
                }
            }
            alpha *= opts.backtrack;
        }
        iterations += 1;
        match accepted {
            Some((next, value)) => {
                w = next;
                obj = value;
            }
            None => {
                stalled = true;
                break;
            }
        }
    }
    Minimum {
        w,
        obj,
        kkt,
        iterations,
        stalled,
    }
}

/// `t` with `ŵ(·/t)` on the autonomous Pohožaev manifold, given `C(ŵ) = c`.
fn fiber_scale(obj: f64, c: f64, dim: i32) -> f64 {
    let nf = dim as f64;
    ((nf - 2.0) / (2.0 * nf) * obj / c).sqrt()
}

/// Ground state of the autonomous problem `−Δu + V∞u = λ f(u)` for the
/// context's `V∞`, `f` and λ. The context's own potential is ignored.
///
/// The constrained problem is solved first at level `C = 1`. Its minimiser
/// is usually much narrower or wider than the ground state, so the solve is
/// repeated from the dilated minimiser at level `C = t^N`, whose continuum
/// minimiser is the ground state itself. The final dilation is then close to
/// the identity and adds almost no interpolation error.
pub fn solve_limit_bl(ctx: &FunctionalContext, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let lim = ctx.limit();
    let grid = lim.grid().clone();
    let n = lim.dim() as i32;
    let sigma = if lim.v_inf() > 0.0 { lim.v_inf() } else { 1.0 };

    let unit = Constraint {
        ctx: &lim,
        level: 1.0,
    };
    let first = minimise(
        &unit,
        sigma,
        initial_guess(&lim, &unit, opts)?,
        opts,
        opts.max_iters,
    );
    let mut iterations = first.iterations;
    let mut result = first;
    if !result.stalled && result.kkt < opts.grad_tol {
        let t = fiber_scale(result.obj, 1.0, n);
        let level = t.powi(n);
        let calibrated = Constraint { ctx: &lim, level };
        let start = dilate(&RadialFunction::new(grid.clone(), result.w.clone())?, t)?;
        if let Some(start) = calibrated.retract(start.values()) {
            let second = minimise(&calibrated, sigma, start, opts, opts.max_iters - iterations);
            iterations += second.iterations;
            result = second;
        }
    }
    let Minimum {
        w,
        obj,
        kkt,
        stalled,
        ..
    } = result;

    let w_hat = RadialFunction::new(grid.clone(), w)?;
    let c = {
        let con = Constraint {
            ctx: &lim,
            level: 1.0,
        };
        con.value(w_hat.values())
    };
    let t = fiber_scale(obj, c, n);
    let u = dilate(&w_hat, t)?;
    let energy = 0.5 * t.powi(n - 2) * obj - t.powi(n) * c;
    let pohozaev_residual = pohozaev(&lim, &u).abs() / u.h1_norm_sq();
    let converged =
        !stalled && kkt < opts.grad_tol && pohozaev_residual < opts.pohozaev_tol && energy > 0.0;
    let report = SolveReport {
        route: Route::BlConstrained,
        converged,
        energy,
        pohozaev_residual,
        optimality_residual: kkt,
        pde_residual: relative_pde_residual(&lim, &u),
        iterations,
        u_at_zero: u.values()[0],
        u_star: u,
    };
    if converged {
        Ok(report)
    } else {
        Err(Error::NonConvergence {
            iterations,
            residual: kkt,
            report: Box::new(report),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::model::{NonlinearitySpec, PotentialSpec};

    #[test]
    fn autonomous_cubic_matches_shooting() {
        let grid = make_grid(3, 30.0, 4096).unwrap();
        let f = NonlinearitySpec::power(4.0).unwrap();
        let ctx = FunctionalContext::new(grid.clone(), PotentialSpec::constant(1.0), f);
        let rep = solve_limit_bl(&ctx, &SolveOptions::default()).unwrap();
        let shot = super::super::shoot_oracle(&grid, 1.0, &f, 1.0).unwrap();
        assert!(rep.pohozaev_residual < 1e-6);
        assert!((rep.energy - shot.energy).abs() < 1e-3 * shot.energy);
    }

    #[test]
    fn bounded_primitive_is_infeasible() {
        let grid = make_grid(3, 30.0, 512).unwrap();
        let f = NonlinearitySpec::damped_power(4.0, 1e-3).unwrap();
        let ctx = FunctionalContext::new(grid, PotentialSpec::constant(1.0), f);
        assert!(matches!(
            solve_limit_bl(&ctx, &SolveOptions::default()),
            Err(Error::ConstraintInfeasible(_))
        ));
    }
}
