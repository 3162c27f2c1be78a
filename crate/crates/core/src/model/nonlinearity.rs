use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NonlinearityFamily {
    /// `f(t) = c|t|^{p-2}t`.
    Power { p: f64, coef: f64 },
    /// `f(t) = a|t|^{p-2}t − b|t|^{q-2}t`.
    DoublePower { p: f64, q: f64, a: f64, b: f64 },
    /// `f(t) = c|t|^{p-2}t e^{-t²}`; bounded primitive, so large-s witnesses fail.
    DampedPower { p: f64, coef: f64 },
}

/// The nonlinearity `f` with its primitive `F(t) = ∫₀ᵗ f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearitySpec {
    pub family: NonlinearityFamily,
}

/// Eight-point Gauss–Legendre rule on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Composite Gauss–Legendre quadrature of `g` over `[a, b]`.
pub fn gauss_legendre(g: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let width = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * width;
            let half = 0.5 * width;
            GL_NODES
                .iter()
                .zip(GL_WEIGHTS)
                .map(|(x, w)| w * g(mid + half * x))
                .sum::<f64>()
                * half
        })
        .sum()
}

fn odd_power(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.abs().powf(p - 2.0) * t
    }
}

impl NonlinearitySpec {
    pub fn new(family: NonlinearityFamily) -> Result<Self> {
        let ok = match family {
            NonlinearityFamily::Power { p, coef } => p > 2.0 && coef.is_finite(),
            NonlinearityFamily::DoublePower { p, q, a, b } => {
                p > 2.0 && q > 2.0 && a.is_finite() && b.is_finite()
            }
            NonlinearityFamily::DampedPower { p, coef } => p > 2.0 && coef.is_finite(),
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "bad nonlinearity parameters {family:?} (need exponents > 2)"
            )));
        }
        Ok(Self { family })
    }

    /// `f(t) = |t|^{p-2}t`.
    pub fn power(p: f64) -> Result<Self> {
        Self::power_with_coefficient(p, 1.0)
    }

    pub fn power_with_coefficient(p: f64, coef: f64) -> Result<Self> {
        Self::new(NonlinearityFamily::Power { p, coef })
    }

    pub fn double_power(p: f64, q: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(NonlinearityFamily::DoublePower { p, q, a, b })
    }

    pub fn damped_power(p: f64, coef: f64) -> Result<Self> {
        Self::new(NonlinearityFamily::DampedPower { p, coef })
    }

    pub fn f(&self, t: f64) -> f64 {
        match self.family {
            NonlinearityFamily::Power { p, coef } => coef * odd_power(t, p),
            NonlinearityFamily::DoublePower { p, q, a, b } => {
                a * odd_power(t, p) - b * odd_power(t, q)
            }
            NonlinearityFamily::DampedPower { p, coef } => coef * odd_power(t, p) * (-t * t).exp(),
        }
    }

    /// Primitive `F(t)`, with `F(0) = 0`.
    pub fn primitive(&self, t: f64) -> f64 {
        let s = t.abs();
        match self.family {
            NonlinearityFamily::Power { p, coef } => coef * s.powf(p) / p,
            NonlinearityFamily::DoublePower { p, q, a, b } => a * s.powf(p) / p - b * s.powf(q) / q,
            NonlinearityFamily::DampedPower { .. } => {
                // the integrand is below 1e-40 past s = 10
                let upper = s.min(10.0);
                if upper == 0.0 {
                    0.0
                } else {
                    gauss_legendre(|x| self.f(x), 0.0, upper, 32)
                }
            }
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            NonlinearityFamily::Power { .. } => "power",
            NonlinearityFamily::DoublePower { .. } => "double-power",
            NonlinearityFamily::DampedPower { .. } => "damped-power",
        }
    }
}

/// Critical Sobolev exponent `2N/(N−2)`.
pub fn critical_exponent(dim: usize) -> f64 {
    2.0 * dim as f64 / (dim as f64 - 2.0)
}
