//! Sampled checkers for the hypotheses on `V`, `f` and `h`.
//!
//! Every checker evaluates an inequality on a finite sample and reports the
//! worst margin together with the point where it occurs. A failing report is
//! a genuine refutation; a passing one only certifies the sample.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::nonlinearity::{critical_exponent, gauss_legendre, NonlinearitySpec};
use super::potential::PotentialSpec;
use crate::functionals::g_poly;

/// Relative slack allowed for round-off in pointwise inequalities.
const ROUND_OFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub pass: bool,
    /// Sample point with the worst margin.
    pub witness: Option<BTreeMap<String, f64>>,
    pub margin: f64,
    pub samples: usize,
    /// Fitted constant, when the check produces one (θ, C₀, s₀).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
}

impl ConditionReport {
    fn new(condition: &str, pass: bool, margin: f64, samples: usize) -> Self {
        Self {
            condition: condition.to_string(),
            pass,
            witness: None,
            margin,
            samples,
            estimate: None,
        }
    }

    fn witness(mut self, pairs: &[(&str, f64)]) -> Self {
        self.witness = Some(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect());
        self
    }

    fn estimate(mut self, value: f64) -> Self {
        self.estimate = Some(value);
        self
    }
}

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                a
            } else if k + 1 == n {
                b
            } else {
                (la + (lb - la) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// `0` followed by 255 log-spaced radii in `[1e-3, r_max]`.
pub fn default_radii(r_max: f64) -> Vec<f64> {
    let mut r = vec![0.0];
    r.extend(log_space(1e-3, r_max, 255));
    r
}

/// Sample set of dilation factors and radii for conditions quantified over both.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
}

impl Lattice {
    /// 128 log-spaced `t ∈ [1e-2, 1e2]` × 256 log-spaced `r ∈ [1e-3, r_max]`.
    pub fn standard(r_max: f64) -> Self {
        Self {
            t: log_space(1e-2, 1e2, 128),
            r: log_space(1e-3, r_max, 256),
        }
    }

    fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t
            .iter()
            .filter(|&&t| t != 1.0)
            .flat_map(move |&t| self.r.iter().map(move |&r| (t, r)))
    }
}

/// Nonnegativity and `V ≤ V∞`, plus `V(r_max) ≈ V∞` at the last sample.
pub fn check_v1_v2(v: &PotentialSpec, radii: &[f64]) -> ConditionReport {
    let v_inf = v.v_inf();
    let mut worst = (f64::INFINITY, 0.0);
    for &r in radii {
        let val = v.value(r);
        let m = val.min(v_inf - val);
        if m < worst.0 {
            worst = (m, r);
        }
    }
    let last = radii.last().copied().unwrap_or(0.0);
    let tail = (v.value(last) - v_inf).abs();
    let tail_ok = tail <= 1e-2 * (1.0 + v_inf.abs());
    let tol = ROUND_OFF * (1.0 + v_inf.abs());
    ConditionReport::new("V1V2", worst.0 >= -tol && tail_ok, worst.0, radii.len())
        .witness(&[("r", worst.1), ("tail_gap", tail)])
}

/// Smallest θ for which `r V′(r) ≤ (N−2)²θ/(2r²)` holds on the sample.
pub fn theta_min_v4(v: &PotentialSpec, dim: usize, radii: &[f64]) -> (f64, f64) {
    let k = ((dim - 2) * (dim - 2)) as f64;
    radii
        .iter()
        .filter(|&&r| r > 0.0)
        .map(|&r| (2.0 * r * r * v.radial_moment(r) / k, r))
        .fold(
            (0.0, 0.0),
            |best, cur| if cur.0 > best.0 { cur } else { best },
        )
}

/// Reports the sampled θ_min of (V4); passes iff θ_min < 1.
pub fn estimate_theta_v4(v: &PotentialSpec, dim: usize, radii: &[f64]) -> ConditionReport {
    let (theta, r) = theta_min_v4(v, dim, radii);
    let samples = radii.iter().filter(|&&r| r > 0.0).count();
    ConditionReport::new("V4", theta < 1.0, 1.0 - theta, samples)
        .witness(&[("r", r)])
        .estimate(theta)
}

struct V3Sample {
    /// pointwise form: sign(t−1)·(D + θc)
    pointwise: f64,
    pointwise_scale: f64,
    /// integrated form, LHS − RHS
    integrated: f64,
    integrated_scale: f64,
    theta_pointwise: f64,
    theta_integrated: f64,
}

fn v3_sample(v: &PotentialSpec, dim: usize, theta: f64, t: f64, r: f64) -> V3Sample {
    let nf = dim as f64;
    let k = nf - 2.0;
    let (vr, vtr) = (v.value(r), v.value(t * r));
    let (mr, mtr) = (v.radial_moment(r), v.radial_moment(t * r));
    let d = nf * (vr - vtr) + (mr - mtr);
    let c = k * k * k * (t * t - 1.0) / (4.0 * t * t * r * r);
    let sign = if t > 1.0 { 1.0 } else { -1.0 };
    let tn = t.powi(dim as i32);
    let lhs = nf * tn * (vr - vtr) + (tn - 1.0) * mr;
    let g = g_poly(t, dim);
    let w = k * k / (4.0 * r * r);
    V3Sample {
        pointwise: sign * (d + theta * c),
        pointwise_scale: nf * (vr.abs() + vtr.abs()) + mr.abs() + mtr.abs() + (theta * c).abs(),
        integrated: lhs + theta * w * g,
        integrated_scale: nf * tn * (vr.abs() + vtr.abs()) + (tn + 1.0) * mr.abs() + theta * w * g,
        theta_pointwise: -d / c,
        theta_integrated: if g > 0.0 { -lhs / (w * g) } else { 0.0 },
    }
}

/// Smallest θ ≥ 0 for which both forms of (V3) hold on the lattice, with the
/// `(t, r)` pair that forces it.
pub fn estimate_theta_v3(v: &PotentialSpec, dim: usize, lattice: &Lattice) -> (f64, f64, f64) {
    lattice
        .pairs()
        .map(|(t, r)| {
            let s = v3_sample(v, dim, 0.0, t, r);
            (s.theta_pointwise.max(s.theta_integrated), t, r)
        })
        .fold(
            (0.0, 1.0, 0.0),
            |best, cur| if cur.0 > best.0 { cur } else { best },
        )
}

/// Checks (V3) pointwise and in its integrated form on the lattice.
pub fn check_v3(v: &PotentialSpec, dim: usize, theta: f64, lattice: &Lattice) -> ConditionReport {
    let mut worst = (f64::INFINITY, 1.0, 0.0, 0.0);
    let mut pass = (0.0..1.0).contains(&theta);
    let mut count = 0;
    for (t, r) in lattice.pairs() {
        count += 1;
        let s = v3_sample(v, dim, theta, t, r);
        for (m, scale, form) in [
            (s.pointwise, s.pointwise_scale, 0.0),
            (s.integrated, s.integrated_scale, 1.0),
        ] {
            if m < -ROUND_OFF * scale {
                pass = false;
            }
            if m < worst.0 {
                worst = (m, t, r, form);
            }
        }
    }
    ConditionReport::new("V3", pass, worst.0, count)
        .witness(&[("t", worst.1), ("r", worst.2), ("integrated", worst.3)])
        .estimate(theta)
}

/// The two-sided bound on `N V + ∇V·x` implied by (V3) as `t → 0` and `t → ∞`.
pub fn check_potential_bounds(
    v: &PotentialSpec,
    dim: usize,
    theta: f64,
    radii: &[f64],
) -> ConditionReport {
    let nf = dim as f64;
    let k = nf - 2.0;
    let v_inf = v.v_inf();
    let mut worst = (f64::INFINITY, 0.0, 0.0);
    let mut pass = true;
    let mut count = 0;
    for &r in radii.iter().filter(|&&r| r > 0.0) {
        count += 1;
        let mid = nf * v.value(r) + v.radial_moment(r);
        let lower = mid - nf * v_inf + k * k * k * theta / (4.0 * r * r);
        let upper = nf * v_inf + k * k * theta / (2.0 * r * r) - mid;
        let scale = mid.abs() + nf * v_inf.abs() + theta / (r * r);
        for (m, side) in [(lower, 0.0), (upper, 1.0)] {
            if m < -ROUND_OFF * scale {
                pass = false;
            }
            if m < worst.0 {
                worst = (m, r, side);
            }
        }
    }
    ConditionReport::new("potential-bounds", pass, worst.0, count)
        .witness(&[("r", worst.1), ("upper", worst.2)])
        .estimate(theta)
}

/// Declared θ, or the larger of the sampled (V4) and (V3) requirements.
pub fn resolve_theta(v: &PotentialSpec, dim: usize, r_max: f64) -> f64 {
    if let Some(theta) = v.theta {
        return theta;
    }
    if v.is_constant() {
        return 0.0;
    }
    let (t4, _) = theta_min_v4(v, dim, &default_radii(r_max));
    let (t3, _, _) = estimate_theta_v3(v, dim, &Lattice::standard(r_max));
    t4.max(t3)
}

/// Decay margin for the two limits of (F2).
pub const F2_MARGIN: f64 = 1e-3;

/// (F1), (F2), (F3) and consistency of the primitive, one report each.
pub fn check_f(f: &NonlinearitySpec, dim: usize, v_inf: f64) -> Vec<ConditionReport> {
    let mags = log_space(1e-6, 1e6, 241);
    let signed: Vec<f64> = mags.iter().flat_map(|&t| [t, -t]).collect();
    let crit = critical_exponent(dim);

    // (F1): fit C₀ and refute growth faster than |t|^{2*-1}
    let ratio = |t: f64| f.f(t).abs() / (1.0 + t.abs().powf(crit - 1.0));
    let (c0, c0_at) = signed
        .iter()
        .map(|&t| (ratio(t), t))
        .fold((0.0, 0.0), |b, c| if c.0 > b.0 { c } else { b });
    let top = mags[mags.len() - 1];
    let decade = mags[mags.len() - 21];
    let growth = [1.0, -1.0]
        .iter()
        .map(|s| {
            (ratio(s * decade) * (1.0 + 1e-9) - ratio(s * top)) / ratio(s * decade).max(1e-300)
        })
        .fold(f64::INFINITY, f64::min);
    let f1 = ConditionReport::new("F1", growth >= 0.0 && c0.is_finite(), growth, signed.len())
        .witness(&[("t", c0_at)])
        .estimate(c0);

    // (F2): f(t)/t small near 0 and f(t)/|t|^{(N+2)/(N-2)} small at infinity
    let sup_exp = (dim as f64 + 2.0) / (dim as f64 - 2.0);
    let small = signed
        .iter()
        .filter(|t| t.abs() <= 1e-4)
        .map(|&t| ((f.f(t) / t).abs(), t))
        .fold((0.0, 0.0), |b, c| if c.0 > b.0 { c } else { b });
    let large = signed
        .iter()
        .filter(|t| t.abs() >= 1e4)
        .map(|&t| (f.f(t).abs() / t.abs().powf(sup_exp), t))
        .fold((0.0, 0.0), |b, c| if c.0 > b.0 { c } else { b });
    let worst2 = if small.0 >= large.0 { small } else { large };
    let f2 = ConditionReport::new(
        "F2",
        worst2.0 <= F2_MARGIN,
        F2_MARGIN - worst2.0,
        signed.len(),
    )
    .witness(&[("t", worst2.1), ("ratio", worst2.0)]);

    // (F3): scan for s₀ with F(s₀) > ½V∞s₀²
    let scan = log_space(1e-3, 1e3, 241);
    let excess = |s: f64| f.primitive(s) - 0.5 * v_inf * s * s;
    let first = scan.iter().copied().find(|&s| excess(s) > 0.0);
    let best = scan
        .iter()
        .map(|&s| (excess(s), s))
        .fold(
            (f64::NEG_INFINITY, 0.0),
            |b, c| if c.0 > b.0 { c } else { b },
        );
    let mut f3 = ConditionReport::new("F3", first.is_some(), best.0, scan.len());
    f3 = match first {
        Some(s0) => f3.witness(&[("s0", s0)]).estimate(s0),
        None => f3.witness(&[("s0", best.1)]),
    };

    // primitive consistency
    let probe: Vec<f64> = log_space(1e-3, 1e2, 61)
        .into_iter()
        .flat_map(|t| [t, -t])
        .collect();
    let worst_prim = probe
        .iter()
        .map(|&t| {
            let exact = gauss_legendre(|x| f.f(x), 0.0, t, 64);
            (
                1e-8 * (1.0 + exact.abs()) - (f.primitive(t) - exact).abs(),
                t,
            )
        })
        .fold((f64::INFINITY, 0.0), |b, c| if c.0 < b.0 { c } else { b });
    let prim = ConditionReport::new(
        "F-primitive",
        worst_prim.0 >= 0.0,
        worst_prim.0,
        probe.len(),
    )
    .witness(&[("t", worst_prim.1)]);

    vec![f1, f2, f3, prim]
}

/// Cap on `sup −r³h′(r)` used by [`check_h`] by default.
pub const H2_CAP: f64 = 1e3;

/// Log-spaced radii in `[1e-3, 1e4]` for tail conditions on analytic profiles.
pub fn tail_radii() -> Vec<f64> {
    log_space(1e-3, 1e4, 281)
}

/// (H1) `h ≥ 0` with decay at the largest sample, and (H2) `sup −r³h′ ≤ cap`.
pub fn check_h(
    h: &dyn Fn(f64) -> f64,
    dh: &dyn Fn(f64) -> f64,
    radii: &[f64],
    cap: f64,
) -> ConditionReport {
    let (min_h, min_at) = radii
        .iter()
        .map(|&r| (h(r), r))
        .fold((f64::INFINITY, 0.0), |b, c| if c.0 < b.0 { c } else { b });
    let max_abs = radii.iter().map(|&r| h(r).abs()).fold(0.0, f64::max);
    let last = radii.last().copied().unwrap_or(0.0);
    let decay = 1e-3 * max_abs - h(last).abs();
    let (sup, sup_at) =
        radii
            .iter()
            .map(|&r| (-r * r * r * dh(r), r))
            .fold(
                (f64::NEG_INFINITY, 0.0),
                |b, c| if c.0 > b.0 { c } else { b },
            );
    let parts = [
        (min_h, min_at, 0.0),
        (decay, last, 1.0),
        (cap - sup, sup_at, 2.0),
    ];
    let worst =
        parts.iter().copied().fold(
            (f64::INFINITY, 0.0, 0.0),
            |b, c| if c.0 < b.0 { c } else { b },
        );
    ConditionReport::new(
        "H1H2",
        min_h >= 0.0 && decay >= 0.0 && sup <= cap,
        worst.0,
        radii.len(),
    )
    .witness(&[("r", worst.1), ("part", worst.2)])
    .estimate(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn well(b: f64) -> PotentialSpec {
        PotentialSpec::algebraic_well(1.0, b, 2.0).unwrap()
    }

    fn steep(r: f64) -> f64 {
        1.0 - (-r).exp()
    }

    fn steep_d(r: f64) -> f64 {
        (-r).exp()
    }

    #[test]
    fn v1v2_examples() {
        let radii = default_radii(30.0);
        assert!(check_v1_v2(&PotentialSpec::constant(1.0), &radii).pass);
        assert!(check_v1_v2(&well(0.2), &radii).pass);
        let bumped = PotentialSpec::new(super::super::PotentialFamily::Custom {
            v: |r| 1.0 + 0.1 * (-r).exp(),
            dv: |r| -0.1 * (-r).exp(),
            v_inf: 1.0,
        })
        .unwrap();
        let rep = check_v1_v2(&bumped, &radii);
        assert!(!rep.pass);
        assert_eq!(rep.witness.unwrap()["r"], 0.0);
    }

    #[test]
    fn theta_v4_matches_four_b() {
        let radii = default_radii(30.0);
        let rep = estimate_theta_v4(&well(0.2), 3, &radii);
        let theta = rep.estimate.unwrap();
        assert!(rep.pass);
        assert!((theta - 0.8).abs() < 0.008, "{theta}");
        let rep = estimate_theta_v4(&well(0.3), 3, &radii);
        assert!(!rep.pass);
        assert!((rep.estimate.unwrap() - 1.2).abs() < 0.012);
        assert_eq!(
            estimate_theta_v4(&PotentialSpec::constant(1.0), 3, &radii).estimate,
            Some(0.0)
        );
    }

    #[test]
    fn theta_v3_matches_analytic_supremum() {
        // monotonicity of b·φ(z) − θ/(4z) requires θ ≥ 4b·max z²(5+z)/(1+z)³ = 4b·250/216
        let lattice = Lattice::standard(30.0);
        let (theta, _, _) = estimate_theta_v3(&well(0.2), 3, &lattice);
        let exact = 0.8 * 250.0 / 216.0;
        assert!(
            theta <= exact + 1e-9 && theta > exact - 0.01,
            "{theta} vs {exact}"
        );
        assert!(check_v3(&well(0.2), 3, theta, &lattice).pass);
        assert!(!check_v3(&well(0.2), 3, 0.8, &lattice).pass);
    }

    #[test]
    fn v3_constant_and_failures() {
        let lattice = Lattice::standard(30.0);
        for theta in [0.0, 0.5, 0.99] {
            assert!(check_v3(&PotentialSpec::constant(1.0), 3, theta, &lattice).pass);
        }
        let steep = PotentialSpec::new(super::super::PotentialFamily::Custom {
            v: steep,
            dv: steep_d,
            v_inf: 1.0,
        })
        .unwrap();
        let rep = check_v3(&steep, 3, 0.0, &lattice);
        assert!(!rep.pass);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn small_wells_pass_v3() {
        let lattice = Lattice::standard(30.0);
        let v = PotentialSpec::algebraic_well(1.0, 0.05, 2.0).unwrap();
        let (theta, _, _) = estimate_theta_v3(&v, 3, &lattice);
        assert!(theta < 0.25);
        assert!(check_v3(&v, 3, theta, &lattice).pass);
    }

    #[test]
    fn potential_bounds_thresholds() {
        // lower side needs θ ≥ 4b·max z(3+z)/(1+z)² = 4.5b; upper side needs θ ≥ 4b
        let radii = default_radii(30.0);
        assert!(check_potential_bounds(&PotentialSpec::constant(1.0), 3, 0.0, &radii).pass);
        assert!(check_potential_bounds(&well(0.2), 3, 0.91, &radii).pass);
        let rep = check_potential_bounds(&well(0.2), 3, 0.8, &radii);
        assert!(!rep.pass);
        let w = rep.witness.unwrap();
        assert_eq!(w["upper"], 0.0);
        // raw margin θ/(4r²) − b(3+r²)/(1+r²)² is most negative near r ≈ 1.34
        assert!(w["r"] > 1.0 && w["r"] < 2.0, "{w:?}");
        let rep = check_potential_bounds(&well(0.2), 3, 0.7, &radii);
        assert!(!rep.pass);
    }

    #[test]
    fn f_checks_on_cubic() {
        let f = NonlinearitySpec::power(4.0).unwrap();
        let reports = check_f(&f, 3, 1.0);
        assert!(reports.iter().all(|r| r.pass), "{reports:?}");
        let s0 = reports[2].estimate.unwrap();
        assert!(f.primitive(s0) > 0.5 * s0 * s0);
        assert!(f.primitive(2.0) > 2.0);
        assert!(reports[0].estimate.unwrap() > 0.0);
    }

    #[test]
    fn f_checks_refute() {
        let linear_like = NonlinearitySpec::power(2.000_001).unwrap();
        assert!(!check_f(&linear_like, 3, 1.0)[1].pass);
        let supercritical = NonlinearitySpec::power(8.0).unwrap();
        let reps = check_f(&supercritical, 3, 1.0);
        assert!(!reps[0].pass);
        let damped = NonlinearitySpec::damped_power(4.0, 0.5).unwrap();
        let reps = check_f(&damped, 3, 1.0);
        assert!(reps[0].pass && reps[1].pass && !reps[2].pass);
    }

    #[test]
    fn c0_is_stable_under_refinement() {
        let f = NonlinearitySpec::power(4.0).unwrap();
        let coarse = check_f(&f, 3, 1.0)[0].estimate.unwrap();
        let fine = log_space(1e-6, 1e6, 2401)
            .iter()
            .map(|&t| f.f(t).abs() / (1.0 + t.powi(5)))
            .fold(0.0, f64::max);
        assert!((coarse - fine).abs() / fine < 0.05);
    }

    #[test]
    fn h_examples() {
        let radii = tail_radii();
        let iq = |r: f64| 1.0 / (1.0 + r * r);
        let iq_d = |r: f64| -2.0 * r / ((1.0 + r * r) * (1.0 + r * r));
        let rep = check_h(&iq, &iq_d, &radii, H2_CAP);
        assert!(rep.pass);
        assert!(rep.estimate.unwrap() <= 2.0);
        assert!(check_h(&|_| 0.0, &|_| 0.0, &radii, H2_CAP).pass);
        let neg = |r: f64| -(-r).exp();
        let neg_d = |r: f64| (-r).exp();
        assert!(!check_h(&neg, &neg_d, &radii, H2_CAP).pass);
        let slow = |r: f64| 1.0 / (1.0 + r);
        let slow_d = |r: f64| -1.0 / ((1.0 + r) * (1.0 + r));
        assert!(!check_h(&slow, &slow_d, &radii, H2_CAP).pass);
    }

    #[test]
    fn log_space_endpoints() {
        let s = log_space(1e-2, 1e2, 128);
        assert_eq!(s[0], 1e-2);
        assert_eq!(s[127], 1e2);
        assert!(s.iter().all(|&t| t != 1.0));
    }
}
