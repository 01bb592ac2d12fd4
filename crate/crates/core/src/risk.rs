//! Loss multipliers `psi` and the mean/SD forms of VaR and CVaR.
//!
//! Both measures under both return models reduce to `-mu + psi(u) sigma`.
//! All four multipliers are defined for loss-tail levels `u < 1/2` only.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Result, domain};
use crate::special::{Probability, gauss_pdf, gauss_quantile, ln_gamma_ratio};
use crate::tquantile::{DegreesOfFreedom, t_quantile, t_quantile_beta};

/// Return model: Gaussian, or Student-T with `nu > 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Gaussian,
    StudentT(DegreesOfFreedom),
}

impl Distribution {
    pub fn student_t(nu: f64) -> Result<Self> {
        let nu = DegreesOfFreedom::new(nu)?.require_finite_variance()?;
        Ok(Self::StudentT(nu))
    }

    /// Degrees of freedom, `None` for the Gaussian.
    pub fn nu(&self) -> Option<f64> {
        match self {
            Self::Gaussian => None,
            Self::StudentT(nu) => Some(nu.get()),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian => f.write_str("gaussian"),
            Self::StudentT(nu) => write!(f, "student-t({})", nu.get()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    VaR,
    CVaR,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::VaR => "var",
            Self::CVaR => "cvar",
        })
    }
}

/// A distribution paired with a risk measure; selects one `psi` function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskSpec {
    distribution: Distribution,
    measure: Measure,
}

impl RiskSpec {
    pub fn new(distribution: Distribution, measure: Measure) -> Result<Self> {
        if let Distribution::StudentT(nu) = distribution {
            nu.require_finite_variance()?;
        }
        Ok(Self {
            distribution,
            measure,
        })
    }

    pub fn gaussian(measure: Measure) -> Self {
        Self {
            distribution: Distribution::Gaussian,
            measure,
        }
    }

    pub fn student_t(nu: f64, measure: Measure) -> Result<Self> {
        Self::new(Distribution::student_t(nu)?, measure)
    }

    pub fn distribution(&self) -> Distribution {
        self.distribution
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn with_measure(self, measure: Measure) -> Self {
        Self { measure, ..self }
    }
}

/// Mean and standard deviation of a return distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentParams {
    mu: f64,
    sigma: f64,
}

impl MomentParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(domain("mean", mu, "finite"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain("standard deviation", sigma, "sigma > 0"));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Which quantile evaluation feeds the Student-T multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuantileRoute {
    /// [`t_quantile`]: closed forms for nu in {1, 2, 4}, inverse beta otherwise.
    #[default]
    Canonical,
    /// [`t_quantile_beta`] for every nu.
    InverseBeta,
}

/// The loss multiplier `psi(u)` for a distribution and measure.
///
/// * Gaussian VaR: `-Q_G(u)`
/// * Gaussian CVaR: `phi(Q_G(u)) / u`
/// * T VaR: `-sqrt((nu-2)/nu) Q_T(u, nu)`
/// * T CVaR: `sqrt((nu-2)/nu) k(Q_T(u, nu), nu) / u`
pub fn psi(spec: RiskSpec, u: Probability) -> Result<f64> {
    psi_via(spec, u, QuantileRoute::Canonical)
}

pub fn psi_via(spec: RiskSpec, u: Probability, route: QuantileRoute) -> Result<f64> {
    let p = u.get();
    if p >= 0.5 {
        return Err(domain("psi", p, "loss tail u < 1/2"));
    }
    match spec.distribution {
        Distribution::Gaussian => {
            let q = gauss_quantile(u);
            Ok(match spec.measure {
                Measure::VaR => -q,
                Measure::CVaR => gauss_pdf(q) / p,
            })
        }
        Distribution::StudentT(nu) => {
            let scale = nu.unit_variance_scale()?;
            let q = match route {
                QuantileRoute::Canonical => t_quantile(u, nu)?,
                QuantileRoute::InverseBeta => t_quantile_beta(u, nu)?,
            };
            Ok(match spec.measure {
                Measure::VaR => -scale * q,
                Measure::CVaR => scale * k_function(q, nu)? / p,
            })
        }
    }
}

/// Tail first moment of the standard T law, `k(t, nu) = -∫_{-∞}^{t} s h(s, nu) ds`
/// for `t <= 0`:
///
/// `k(t, nu) = nu^{nu/2} Γ((nu-1)/2) (nu + t^2)^{(1-nu)/2} / (2 sqrt(pi) Γ(nu/2))`.
///
/// Evaluated in log space; `nu^{nu/2}` alone overflows near `nu ≈ 300`.
pub fn k_function(t: f64, nu: DegreesOfFreedom) -> Result<f64> {
    let n = nu.get();
    if n <= 1.0 {
        return Err(domain("k_function", n, "nu > 1"));
    }
    // nu^{nu/2} (nu + t^2)^{(1-nu)/2} = sqrt(nu) (1 + t^2/nu)^{(1-nu)/2}
    let log_k = 0.5 * n.ln() - 0.5 * (n - 1.0) * (t * t / n).ln_1p()
        - ln_gamma_ratio(0.5 * (n - 1.0), 0.5)
        - (2.0 * PI.sqrt()).ln();
    Ok(log_k.exp())
}

/// `VaR(u) = -mu + psi_V(u) sigma`.
pub fn value_at_risk(m: MomentParams, spec: RiskSpec, u: Probability) -> Result<f64> {
    Ok(-m.mu + psi(spec.with_measure(Measure::VaR), u)? * m.sigma)
}

/// `CVaR(u) = -mu + psi_C(u) sigma`.
pub fn conditional_value_at_risk(m: MomentParams, spec: RiskSpec, u: Probability) -> Result<f64> {
    Ok(-m.mu + psi(spec.with_measure(Measure::CVaR), u)? * m.sigma)
}

/// Total kurtosis `3 + 6 / (nu - 4)` of the T law, defined for `nu > 4`.
pub fn total_kurtosis(nu: DegreesOfFreedom) -> Result<f64> {
    let n = nu.get();
    if n <= 4.0 {
        return Err(domain("total_kurtosis", n, "nu > 4"));
    }
    Ok(3.0 + 6.0 / (n - 4.0))
}
