//! λ-continuation: autonomous levels `m_λ^∞` against the path bound `c̄_λ`.
//!
//! The path is `γ0(t) = (u₁^∞)_{tT}` with `u₁^∞` the autonomous ground state at
//! λ = 1, so `c̄_λ = max_{s∈(0,T]} I_λ((u₁^∞)_s)` is an upper bound for the
//! mountain-pass level `c_λ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{shoot_oracle, solve_limit_bl, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::functionals::{g_poly, Fiber, FunctionalContext};
use crate::grid::RadialFunction;
use crate::manifold::bisect_fiber;
use crate::model::log_space;

/// Log-spaced samples of `s ∈ [T·1e-4, T]` used before refining `c̄_λ`.
const PATH_SAMPLES: usize = 2048;
/// Samples of `s ∈ [1−ζ0, 1+ζ0]` for the potential-gap minimum.
const GAP_SAMPLES: usize = 65;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    /// `m̂_λ^∞`
    pub m_inf: f64,
    /// `c̄_λ`
    pub c_bar: f64,
    /// `m̂_λ^∞ − c̄_λ`
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub lambda_bar: f64,
    /// Endpoint dilation of the path.
    #[serde(rename = "T")]
    pub t: f64,
    pub zeta0: f64,
    /// `|x̄|`: the ball centre is any point at this radius
    pub x_bar: f64,
    pub r_bar: f64,
    /// `m₁^∞ = I^∞(u₁^∞)`
    pub m_one: f64,
    pub u_one_at_zero: f64,
    /// Rows with λ in `(λ̄, 1]`.
    pub rows: Vec<SweepRow>,
    /// Every grid λ, including those at or below λ̄.
    pub limit_levels: Vec<SweepRow>,
}

/// `max_{s ∈ (0, T]} I_λ(u_s)`.
fn path_bound(fiber: &Fiber, t_end: f64) -> f64 {
    let ss = log_space(t_end * 1e-4, t_end, PATH_SAMPLES);
    let (k, best) = ss.iter().map(|&s| fiber.energy(s)).enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, e)| if e > acc.1 { (i, e) } else { acc },
    );
    if k == 0 || k + 1 == ss.len() {
        return best;
    }
    let (lo, hi) = (ss[k - 1], ss[k + 1]);
    if fiber.pohozaev(lo) > 0.0 && fiber.pohozaev(hi) <= 0.0 {
        best.max(fiber.energy(bisect_fiber(fiber, lo, hi)))
    } else {
        best
    }
}

/// Ball on which `V∞ − V > 0` and `u ≠ 0`, as `(|x̄|, r̄)`.
///
/// `x̄ = 0` when `V(0) < V∞`, otherwise the sampled minimiser of `V`; `r̄` is
/// the largest grid radius for which the ball condition holds at all nodes.
fn positivity_ball(ctx: &FunctionalContext, u: &RadialFunction) -> Result<(f64, f64)> {
    let grid = ctx.grid();
    let r = grid.nodes();
    let v = ctx.v_nodes();
    let v_inf = ctx.v_inf();
    let good: Vec<bool> = v
        .iter()
        .zip(u.values())
        .map(|(&vi, &ui)| v_inf - vi > 0.0 && ui != 0.0)
        .collect();
    let centre = if v[0] < v_inf {
        0
    } else {
        v.iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    };
    if !good[centre] {
        return Err(Error::NoPositivityBall);
    }
    // the ball around a point at radius r[c] covers radii [r[c] − r̄, r[c] + r̄]
    let mut k = 0;
    while centre + k + 1 < r.len()
        && good[centre + k + 1]
        && (centre < k + 1 || good[centre - k - 1])
    {
        k += 1;
    }
    if k == 0 {
        return Err(Error::NoPositivityBall);
    }
    Ok((r[centre], r[centre + k] - r[centre]))
}

/// Autonomous ground state for `λ f`: shooting first, constrained
/// minimisation when no shooting bracket exists.
fn limit_ground_state(ctx: &FunctionalContext, lambda: f64) -> Result<SolveReport> {
    let lim = ctx.limit().with_lambda(lambda)?;
    match shoot_oracle(lim.grid(), lim.v_inf(), lim.nonlinearity(), lambda) {
        Err(Error::BracketNotFound(_)) => solve_limit_bl(&lim, &SolveOptions::default()),
        other => other,
    }
}

/// Runs the sweep over a strictly increasing `lambda_grid ⊂ [1/2, 1]`.
pub fn sweep_lambda(
    ctx: &FunctionalContext,
    lambda_grid: &[f64],
    t_cap: f64,
) -> Result<SweepReport> {
    if lambda_grid.is_empty()
        || lambda_grid.iter().any(|&l| !(0.5..=1.0).contains(&l))
        || lambda_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidParameter(
            "lambda grid must be non-empty, strictly increasing and inside [1/2, 1]".into(),
        ));
    }
    if !(t_cap >= 1.0 && t_cap.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "T cap must be at least 1, got {t_cap}"
        )));
    }
    if ctx.potential().is_constant() {
        return Err(Error::NoPositivityBall);
    }
    let one = limit_ground_state(ctx, 1.0)?;
    let u1 = &one.u_star;
    let (x_bar, r_bar) = positivity_ball(ctx, u1)?;

    let contexts: Vec<FunctionalContext> = lambda_grid
        .iter()
        .map(|&l| ctx.clone().with_lambda(l))
        .collect::<Result<_>>()?;
    let fibers: Vec<Fiber> = contexts.iter().map(|c| Fiber::new(c, u1)).collect();

    let mut t_end = 1.0;
    while fibers.iter().any(|f| f.energy(t_end) >= 0.0) {
        t_end *= 2.0;
        if t_end > t_cap {
            return Err(Error::InvalidParameter(format!(
                "no T <= {t_cap} makes I_lambda((u_1)_T) negative for every grid lambda"
            )));
        }
    }

    let levels: Vec<SweepRow> = lambda_grid
        .par_iter()
        .zip(fibers.par_iter())
        .map(|(&lambda, fiber)| {
            let m_inf = limit_ground_state(ctx, lambda)?.energy;
            let c_bar = path_bound(fiber, t_end);
            Ok(SweepRow {
                lambda,
                m_inf,
                c_bar,
                margin: m_inf - c_bar,
            })
        })
        .collect::<Result<_>>()?;

    let n = ctx.dim();
    let zeta0 = (3.0 * r_bar / (8.0 * (1.0 + x_bar))).min(0.25);
    let m = ctx.grid().cell_volumes();
    let v = ctx.potential();
    let v_inf = ctx.v_inf();
    // min over s ∈ [1−ζ0, 1+ζ0] of ∫[V∞ − V(sx)]u₁²
    let gap_min = (0..GAP_SAMPLES)
        .map(|k| 1.0 - zeta0 + 2.0 * zeta0 * k as f64 / (GAP_SAMPLES - 1) as f64)
        .map(|s| {
            ctx.grid()
                .nodes()
                .iter()
                .zip(u1.values())
                .zip(m)
                .map(|((&r, &ui), &mi)| mi * (v_inf - v.value(s * r)) * ui * ui)
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    let base = ctx.clone().with_lambda(1.0)?;
    let p1 = base.parts(u1);
    let tn = t_end.powi(n as i32);
    let nf = n as f64;
    let first = 1.0 - (1.0 - zeta0).powi(n as i32) * gap_min / (tn * p1.primitive);
    let g_min = g_poly(1.0 - zeta0, n).min(g_poly(1.0 + zeta0, n));
    let second = 1.0 - g_min * p1.grad / (nf * tn * p1.primitive);
    let lambda_bar = 0.5f64.max(first).max(second);

    Ok(SweepReport {
        lambda_bar,
        t: t_end,
        zeta0,
        x_bar,
        r_bar,
        m_one: one.energy,
        u_one_at_zero: one.u_at_zero,
        rows: levels
            .iter()
            .copied()
            .filter(|r| r.lambda > lambda_bar)
            .collect(),
        limit_levels: levels,
    })
}
