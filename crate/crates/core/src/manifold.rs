//! The admissible set Λ, dilation fibers and projection onto the Pohožaev
//! manifold `{u ≠ 0 : P(u) = 0}`.
//!
//! Fibers are evaluated through the scaling laws in [`Fiber`], so the sign
//! pattern of `t ↦ P(u_t)` is free of interpolation noise. Only the final
//! projected function is produced by an actual grid dilation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{pohozaev, Fiber, FunctionalContext};
use crate::grid::{dilate, RadialFunction};
use crate::model::log_space;

/// Bracket for the fiber root, in `t`.
pub const FIBER_BRACKET: (f64, f64) = (1e-3, 1e3);
/// Number of log-spaced probes used to count sign changes.
pub const SCAN_POINTS: usize = 128;
/// Bisection stops once the bracket is this narrow in `log t`.
pub const LOG_T_TOL: f64 = 1e-12;

/// Returns `(q(u) < −1e-10‖u‖², q(u))` with `q(u) = ∫[½V∞u² − λF(u)]`.
pub fn lambda_membership(ctx: &FunctionalContext, u: &RadialFunction) -> Result<(bool, f64)> {
    if u.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let p = ctx.parts(u);
    let q = 0.5 * ctx.v_inf() * p.mass - ctx.lambda() * p.primitive;
    Ok((q < -1e-10 * p.h1_sq(), q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberPoint {
    pub t: f64,
    pub zeta: f64,
    #[serde(rename = "P")]
    pub pohozaev: f64,
}

/// Tabulates `ζ(t) = I(u_t)` and `P(u_t)` along the fiber.
pub fn fiber_profile(
    ctx: &FunctionalContext,
    u: &RadialFunction,
    t_grid: &[f64],
) -> Result<Vec<FiberPoint>> {
    if u.is_zero() {
        return Err(Error::ZeroFunction);
    }
    if t_grid.iter().any(|&t| !(t > 0.0 && t.is_finite()))
        || t_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidParameter(
            "fiber grid must be positive and strictly increasing".into(),
        ));
    }
    let fiber = Fiber::new(ctx, u);
    Ok(t_grid
        .iter()
        .map(|&t| FiberPoint {
            t,
            zeta: fiber.energy(t),
            pohozaev: fiber.pohozaev(t),
        })
        .collect())
}

/// The scalar outcome of locating the fiber maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberRoot {
    pub t: f64,
    /// `I(u_t)` at the root: the fiber maximum
    pub energy: f64,
    /// `‖u_t‖²`
    pub h1_sq: f64,
    /// `|P(u_t)|` from the scaling law
    pub residual: f64,
    pub bracket: (f64, f64),
    pub sign_changes: usize,
}

/// Bisection on `log t` for a root of `P(u_t)` inside `[lo, hi]`, where the
/// sign at `lo` is positive and at `hi` negative.
pub(crate) fn bisect_fiber(fiber: &Fiber, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    while b - a > LOG_T_TOL {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if fiber.pohozaev(mid.exp()) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    (0.5 * (a + b)).exp()
}

/// Finds the unique `t_u` with `P(u_{t_u}) = 0`, counting sign changes on a
/// log-spaced scan of the bracket as a uniqueness witness.
pub fn fiber_root(ctx: &FunctionalContext, u: &RadialFunction) -> Result<FiberRoot> {
    let (member, q) = lambda_membership(ctx, u)?;
    if !member {
        return Err(Error::NotInLambda { q });
    }
    let fiber = Fiber::new(ctx, u);
    let scan = log_space(FIBER_BRACKET.0, FIBER_BRACKET.1, SCAN_POINTS);
    let values: Vec<f64> = scan.iter().map(|&t| fiber.pohozaev(t)).collect();
    let changes: Vec<usize> = values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] > 0.0) != (w[1] > 0.0))
        .map(|(i, _)| i)
        .collect();
    match changes.len() {
        0 => Err(Error::NoSignChange {
            lo: FIBER_BRACKET.0,
            hi: FIBER_BRACKET.1,
        }),
        1 => {
            let i = changes[0];
            if values[i] <= 0.0 {
                // P must go from positive to negative along the fiber
                return Err(Error::NoSignChange {
                    lo: scan[i],
                    hi: scan[i + 1],
                });
            }
            let t = bisect_fiber(&fiber, scan[i], scan[i + 1]);
            Ok(FiberRoot {
                t,
                energy: fiber.energy(t),
                h1_sq: fiber.h1_sq(t),
                residual: fiber.pohozaev(t).abs(),
                bracket: (scan[i], scan[i + 1]),
                sign_changes: 1,
            })
        }
        count => Err(Error::MultipleSignChanges { count }),
    }
}

/// Result of projecting `u` onto the manifold along its fiber.
#[derive(Debug, Clone)]
pub struct FiberProjection {
    pub t_u: f64,
    /// `dilate(u, t_u)`
    pub projected: RadialFunction,
    /// `|P(u_{t_u})|` certified by the root finder
    pub residual: f64,
    /// `|P|` of the projected grid function, including interpolation error
    pub grid_residual: f64,
    pub bracket: (f64, f64),
    pub sign_changes: usize,
    /// `I(u_{t_u})`
    pub energy: f64,
}

/// Projects `u ∈ Λ` onto the manifold: `u ↦ u_{t_u}`.
pub fn project_to_m(ctx: &FunctionalContext, u: &RadialFunction) -> Result<FiberProjection> {
    let root = fiber_root(ctx, u)?;
    let projected = dilate(u, root.t)?;
    let grid_residual = pohozaev(ctx, &projected).abs();
    Ok(FiberProjection {
        t_u: root.t,
        projected,
        residual: root.residual,
        grid_residual,
        bracket: root.bracket,
        sign_changes: root.sign_changes,
        energy: root.energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{energy, pohozaev_limit};
    use crate::grid::make_grid;
    use crate::model::{NonlinearitySpec, PotentialSpec};

    fn ctx(v: PotentialSpec) -> FunctionalContext {
        FunctionalContext::new(
            make_grid(3, 30.0, 4096).unwrap(),
            v,
            NonlinearitySpec::power(4.0).unwrap(),
        )
    }

    fn bump(ctx: &FunctionalContext, a: f64, s: f64) -> RadialFunction {
        RadialFunction::from_fn(ctx.grid().clone(), |r| a * (-r * r / (s * s)).exp())
    }

    #[test]
    fn membership_by_amplitude() {
        let c = ctx(PotentialSpec::constant(1.0));
        let (big, q) = lambda_membership(&c, &bump(&c, 3.0, 1.0)).unwrap();
        assert!(big && q < 0.0);
        let (small, q) = lambda_membership(&c, &bump(&c, 0.1, 1.0)).unwrap();
        assert!(!small && q > 0.0);
        let zero = RadialFunction::zeros(c.grid().clone());
        assert!(matches!(
            lambda_membership(&c, &zero),
            Err(Error::ZeroFunction)
        ));
    }

    #[test]
    fn nonpositive_limit_pohozaev_implies_membership() {
        let c = ctx(PotentialSpec::constant(1.0));
        for (a, s) in [(2.0, 0.5), (3.0, 1.0), (5.0, 3.0), (1.6, 4.0)] {
            let u = bump(&c, a, s);
            if pohozaev_limit(&c, &u) <= 0.0 {
                assert!(lambda_membership(&c, &u).unwrap().0);
            }
        }
    }

    #[test]
    fn fiber_shape_for_members() {
        let c = ctx(PotentialSpec::algebraic_well(1.0, 0.2, 2.0).unwrap());
        let u = bump(&c, 3.0, 1.0);
        let ts = log_space(1e-3, 1e2, 200);
        let prof = fiber_profile(&c, &u, &ts).unwrap();
        assert!(prof[0].zeta > 0.0 && prof[0].zeta < 1e-3 * u.h1_norm_sq());
        assert!(prof[199].zeta < 0.0);
        for w in prof.windows(2) {
            let d = (w[1].zeta - w[0].zeta) / (w[1].t - w[0].t);
            let mid = 0.5 * (w[0].pohozaev / w[0].t + w[1].pohozaev / w[1].t);
            if mid.abs() > 1e-3 * d.abs().max(1.0) {
                assert_eq!(d > 0.0, mid > 0.0);
            }
        }
        let zero = RadialFunction::zeros(c.grid().clone());
        assert!(fiber_profile(&c, &zero, &ts).is_err());
        assert!(fiber_profile(&c, &u, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn projection_lands_on_manifold_and_maximises_fiber() {
        let c = ctx(PotentialSpec::algebraic_well(1.0, 0.2, 2.0).unwrap());
        let u = bump(&c, 2.5, 1.5);
        let proj = project_to_m(&c, &u).unwrap();
        assert_eq!(proj.sign_changes, 1);
        assert!(proj.residual < 1e-9 * (1.0 + u.h1_norm_sq()));
        assert!(proj.grid_residual < 1e-3 * proj.projected.h1_norm_sq());
        let fiber = Fiber::new(&c, &u);
        for t in log_space(0.05, 20.0, 64) {
            assert!(fiber.energy(t) <= proj.energy + 1e-12);
        }
        assert!((energy(&c, &proj.projected) - proj.energy).abs() < 1e-3 * proj.energy);

        let again = project_to_m(&c, &proj.projected).unwrap();
        assert!((again.t_u - 1.0).abs() < 1e-4, "{}", again.t_u);
    }

    #[test]
    fn dilation_group_law_on_fibers() {
        let c = ctx(PotentialSpec::constant(1.0));
        let u = project_to_m(&c, &bump(&c, 2.5, 1.5)).unwrap().projected;
        for s in [0.5, 2.0] {
            let v = dilate(&u, s).unwrap();
            let t = project_to_m(&c, &v).unwrap().t_u;
            assert!((t * s - 1.0).abs() < 1e-4, "s={s}: t={t}");
        }
    }

    #[test]
    fn projection_rejects_non_members() {
        let c = ctx(PotentialSpec::constant(1.0));
        assert!(matches!(
            project_to_m(&c, &bump(&c, 0.1, 1.0)),
            Err(Error::NotInLambda { .. })
        ));
    }
}
