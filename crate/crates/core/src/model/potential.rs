use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonnegative bump `h` used by the perturbed family `V∞ − ε h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `1/(1+r²)`
    InverseQuadratic,
    /// `e^{-r²}`
    Gaussian,
}

impl Profile {
    pub fn value(self, r: f64) -> f64 {
        match self {
            Profile::InverseQuadratic => 1.0 / (1.0 + r * r),
            Profile::Gaussian => (-r * r).exp(),
        }
    }

    pub fn deriv(self, r: f64) -> f64 {
        match self {
            Profile::InverseQuadratic => {
                let d = 1.0 + r * r;
                -2.0 * r / (d * d)
            }
            Profile::Gaussian => -2.0 * r * (-r * r).exp(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::InverseQuadratic => "inverse-quadratic",
            Profile::Gaussian => "gaussian",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "inverse-quadratic" => Ok(Profile::InverseQuadratic),
            "gaussian" => Ok(Profile::Gaussian),
            other => Err(Error::InvalidParameter(format!(
                "unknown profile `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum PotentialFamily {
    /// `V ≡ V∞`.
    Constant { v_inf: f64 },
    /// `V(r) = a − b/(1+r^α)`, with `V∞ = a`.
    AlgebraicWell { a: f64, b: f64, alpha: f64 },
    /// `V(r) = V∞ − ε h(r)`.
    Perturbed {
        v_inf: f64,
        eps: f64,
        profile: Profile,
    },
    /// Arbitrary radial potential given as a pair of function pointers.
    Custom {
        v: fn(f64) -> f64,
        dv: fn(f64) -> f64,
        v_inf: f64,
    },
}

/// A radial potential `V(|x|)` with its limit at infinity and an optional
/// declared decay parameter θ.
#[derive(Debug, Clone, Copy)]
pub struct PotentialSpec {
    pub family: PotentialFamily,
    pub theta: Option<f64>,
}

impl PotentialSpec {
    pub fn new(family: PotentialFamily) -> Result<Self> {
        let finite = |x: f64| x.is_finite();
        let ok = match family {
            PotentialFamily::Constant { v_inf } => finite(v_inf),
            PotentialFamily::AlgebraicWell { a, b, alpha } => {
                finite(a) && finite(b) && finite(alpha) && alpha > 0.0
            }
            PotentialFamily::Perturbed { v_inf, eps, .. } => finite(v_inf) && finite(eps),
            PotentialFamily::Custom { v_inf, .. } => finite(v_inf),
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "bad potential parameters {family:?}"
            )));
        }
        Ok(Self {
            family,
            theta: None,
        })
    }

    pub fn constant(v_inf: f64) -> Self {
        Self {
            family: PotentialFamily::Constant { v_inf },
            theta: None,
        }
    }

    pub fn algebraic_well(a: f64, b: f64, alpha: f64) -> Result<Self> {
        Self::new(PotentialFamily::AlgebraicWell { a, b, alpha })
    }

    pub fn perturbed(v_inf: f64, eps: f64, profile: Profile) -> Result<Self> {
        Self::new(PotentialFamily::Perturbed {
            v_inf,
            eps,
            profile,
        })
    }

    /// Declares θ instead of letting callers estimate it.
    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0,1), got {theta}"
            )));
        }
        self.theta = Some(theta);
        Ok(self)
    }

    pub fn value(&self, r: f64) -> f64 {
        match self.family {
            PotentialFamily::Constant { v_inf } => v_inf,
            PotentialFamily::AlgebraicWell { a, b, alpha } => a - b / (1.0 + r.powf(alpha)),
            PotentialFamily::Perturbed {
                v_inf,
                eps,
                profile,
            } => v_inf - eps * profile.value(r),
            PotentialFamily::Custom { v, .. } => v(r),
        }
    }

    /// `V′(r)`.
    pub fn deriv(&self, r: f64) -> f64 {
        match self.family {
            PotentialFamily::Constant { .. } => 0.0,
            PotentialFamily::AlgebraicWell { b, alpha, .. } => {
                if r == 0.0 {
                    return 0.0;
                }
                let ra = r.powf(alpha);
                b * alpha * ra / r / ((1.0 + ra) * (1.0 + ra))
            }
            PotentialFamily::Perturbed { eps, profile, .. } => -eps * profile.deriv(r),
            PotentialFamily::Custom { dv, .. } => dv(r),
        }
    }

    /// `∇V(x)·x = r V′(r)`.
    pub fn radial_moment(&self, r: f64) -> f64 {
        match self.family {
            PotentialFamily::Constant { .. } => 0.0,
            PotentialFamily::AlgebraicWell { b, alpha, .. } => {
                let ra = r.powf(alpha);
                b * alpha * ra / ((1.0 + ra) * (1.0 + ra))
            }
            _ => r * self.deriv(r),
        }
    }

    pub fn v_inf(&self) -> f64 {
        match self.family {
            PotentialFamily::Constant { v_inf }
            | PotentialFamily::Perturbed { v_inf, .. }
            | PotentialFamily::Custom { v_inf, .. } => v_inf,
            PotentialFamily::AlgebraicWell { a, .. } => a,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self.family {
            PotentialFamily::Constant { .. } => true,
            PotentialFamily::AlgebraicWell { b, .. } => b == 0.0,
            PotentialFamily::Perturbed { eps, .. } => eps == 0.0,
            PotentialFamily::Custom { .. } => false,
        }
    }

    /// The autonomous potential `V ≡ V∞`.
    pub fn limit(&self) -> Self {
        Self {
            family: PotentialFamily::Constant {
                v_inf: self.v_inf(),
            },
            theta: Some(0.0),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            PotentialFamily::Constant { .. } => "constant",
            PotentialFamily::AlgebraicWell { .. } => "algebraic-well",
            PotentialFamily::Perturbed { .. } => "perturbed",
            PotentialFamily::Custom { .. } => "custom",
        }
    }
}
