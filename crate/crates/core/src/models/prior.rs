//! Prior densities on the estimated parameter.

use serde::{Deserialize, Serialize};
use statrs::function::{erf::erf, gamma};

use super::quadrature::QuadratureSpec;
use crate::error::{precondition, Result};

const TAU: f64 = std::f64::consts::TAU;

/// Tail mass left out when truncating a Gamma prior's support.
pub const GAMMA_TAIL_MASS: f64 = 1e-6;

/// A normalized density over a bounded support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prior {
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Gaussian restricted to `[lo, hi]` and renormalized.
    Gaussian {
        mean: f64,
        std: f64,
        lo: f64,
        hi: f64,
        mass: f64,
    },
    /// Gamma density `x^{k−1} e^{−x/s} / (Γ(k) s^k)` on `[0, hi]`, renormalized.
    Gamma {
        shape: f64,
        scale: f64,
        hi: f64,
        mass: f64,
    },
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

impl Prior {
    /// Uniform on `[0, 2π)`.
    pub fn uniform_circle() -> Self {
        Prior::Uniform { lo: 0.0, hi: TAU }
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || hi <= lo {
            return Err(precondition(format!("uniform prior needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Prior::Uniform { lo, hi })
    }

    pub fn trimmed_gaussian(mean: f64, std: f64, lo: f64, hi: f64) -> Result<Self> {
        if std.is_nan() || std <= 0.0 || lo.is_nan() || hi.is_nan() || hi <= lo {
            return Err(precondition("Gaussian prior needs std > 0 and lo < hi"));
        }
        let mass = std_normal_cdf((hi - mean) / std) - std_normal_cdf((lo - mean) / std);
        Ok(Prior::Gaussian {
            mean,
            std,
            lo,
            hi,
            mass,
        })
    }

    /// Effectively untrimmed: support `mean ± 12 std`.
    pub fn gaussian(mean: f64, std: f64) -> Result<Self> {
        Self::trimmed_gaussian(mean, std, mean - 12.0 * std, mean + 12.0 * std)
    }

    /// Gaussian centred at π with standard deviation π/4, trimmed to `(0, 2π)`.
    pub fn phase_gaussian() -> Self {
        Self::trimmed_gaussian(std::f64::consts::PI, std::f64::consts::FRAC_PI_4, 0.0, TAU).expect("valid constants")
    }

    /// Gamma prior truncated where the upper tail drops below [`GAMMA_TAIL_MASS`].
    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        if shape.is_nan() || shape < 1.0 || scale.is_nan() || scale <= 0.0 {
            return Err(precondition(
                "Gamma prior needs shape >= 1 (bounded density) and scale > 0",
            ));
        }
        // Upper regularized incomplete gamma is decreasing in x.
        let tail = |x: f64| gamma::gamma_ur(shape, x / scale);
        let mut hi = shape * scale;
        while tail(hi) >= GAMMA_TAIL_MASS {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if tail(mid) >= GAMMA_TAIL_MASS {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Prior::Gamma {
            shape,
            scale,
            hi,
            mass: 1.0 - tail(hi),
        })
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Prior::Uniform { lo, hi } => (lo, hi),
            Prior::Gaussian { lo, hi, .. } => (lo, hi),
            Prior::Gamma { hi, .. } => (0.0, hi),
        }
    }

    pub fn pdf(&self, theta: f64) -> f64 {
        let (lo, hi) = self.support();
        if theta < lo || theta > hi {
            return 0.0;
        }
        match *self {
            Prior::Uniform { lo, hi } => 1.0 / (hi - lo),
            Prior::Gaussian { mean, std, mass, .. } => {
                let z = (theta - mean) / std;
                (-0.5 * z * z).exp() / (std * TAU.sqrt() * mass)
            }
            Prior::Gamma { shape, scale, mass, .. } => {
                if theta == 0.0 {
                    return if shape == 1.0 { 1.0 / (scale * mass) } else { 0.0 };
                }
                let log = (shape - 1.0) * theta.ln() - theta / scale - shape * scale.ln() - gamma::ln_gamma(shape);
                log.exp() / mass
            }
        }
    }

    /// `∂ ln λ / ∂θ` on the interior of the support.
    pub fn log_derivative(&self, theta: f64) -> f64 {
        match *self {
            Prior::Uniform { .. } => 0.0,
            Prior::Gaussian { mean, std, .. } => -(theta - mean) / (std * std),
            Prior::Gamma { shape, scale, .. } => (shape - 1.0) / theta - 1.0 / scale,
        }
    }

    /// `(θ_k, w_k λ(θ_k))` so that `Σ_k W_k f(θ_k) ≈ ∫ f λ dθ`.
    pub fn weighted_nodes(&self, q: &QuadratureSpec) -> Vec<(f64, f64)> {
        let (lo, hi) = self.support();
        q.rule(lo, hi).into_iter().map(|(t, w)| (t, w * self.pdf(t))).collect()
    }
}

/// Fisher information of the prior itself, `∫ (∂ ln λ/∂θ)² λ dθ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PriorFisher {
    pub value: f64,
    /// Interior nodes where the density vanished and the integrand was skipped.
    pub skipped_nodes: usize,
}

pub fn prior_fisher(prior: &Prior, q: &QuadratureSpec) -> PriorFisher {
    let mut value = 0.0;
    let mut skipped_nodes = 0;
    for (theta, w) in prior.weighted_nodes(q) {
        if w <= 0.0 {
            skipped_nodes += 1;
            continue;
        }
        let s = prior.log_derivative(theta);
        value += w * s * s;
    }
    PriorFisher { value, skipped_nodes }
}
