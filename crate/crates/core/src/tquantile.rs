//! Student-T density, CDF and quantile for real degrees of freedom.
//!
//! The quantile has one canonical route per `nu`: the closed forms for
//! `nu` in {1, 2, 4}, otherwise inversion of the regularized incomplete
//! beta function. The deep-tail series is exposed separately and never
//! substituted silently.

use std::f64::consts::PI;

use crate::error::{Error, Result, domain};
use crate::special::{BetaParams, Probability, inc_beta_pair, inv_inc_beta_pair, ln_gamma_ratio};

/// Degrees of freedom `nu > 0` of a Student-T law.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DegreesOfFreedom(f64);

impl DegreesOfFreedom {
    pub fn new(nu: f64) -> Result<Self> {
        if nu > 0.0 && nu.is_finite() {
            Ok(Self(nu))
        } else {
            Err(domain("degrees of freedom", nu, "nu > 0"))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Fails unless the variance `nu / (nu - 2)` exists.
    pub fn require_finite_variance(self) -> Result<Self> {
        if self.0 > 2.0 {
            Ok(self)
        } else {
            Err(domain("degrees of freedom", self.0, "nu > 2 (finite variance)"))
        }
    }

    /// `sqrt((nu - 2) / nu)`, the factor mapping a standard T variate to
    /// unit variance.
    pub fn unit_variance_scale(self) -> Result<f64> {
        let nu = self.require_finite_variance()?.0;
        Ok(((nu - 2.0) / nu).sqrt())
    }

    fn beta_params(self) -> BetaParams {
        BetaParams::new(0.5 * self.0, 0.5).expect("nu > 0")
    }
}

impl TryFrom<f64> for DegreesOfFreedom {
    type Error = Error;

    fn try_from(nu: f64) -> Result<Self> {
        Self::new(nu)
    }
}

/// Student-T density `h(t, nu)`.
pub fn t_pdf(t: f64, nu: DegreesOfFreedom) -> f64 {
    let nu = nu.get();
    let log_norm = ln_gamma_ratio(0.5 * nu, 0.5) - 0.5 * (nu * PI).ln();
    (log_norm - 0.5 * (nu + 1.0) * (t * t / nu).ln_1p()).exp()
}

/// Student-T CDF through the regularized incomplete beta function,
/// `F(t) = 1/2 (1 + sgn(t) (1 - I_{nu/(nu+t^2)}(nu/2, 1/2)))`.
pub fn t_cdf(t: f64, nu: DegreesOfFreedom) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.5);
    }
    if t.is_nan() {
        return Err(domain("t_cdf", t, "finite t"));
    }
    let lower = lower_tail(t.abs(), nu)?;
    Ok(if t < 0.0 { lower } else { 1.0 - lower })
}

/// `P(T <= -|t|)`, accurate deep in the tail.
fn lower_tail(abs_t: f64, nu: DegreesOfFreedom) -> Result<f64> {
    let v = nu.get();
    let t2 = abs_t * abs_t;
    let x = v / (v + t2);
    let xc = 1.0 / (1.0 + v / t2);
    Ok(0.5 * inc_beta_pair(x, xc, nu.beta_params())?.0)
}

/// The closed-form quantiles for `nu` in {1, 2, 4}.
pub fn t_quantile_closed(u: Probability, nu: f64) -> Result<f64> {
    let p = u.get();
    if nu == 1.0 {
        Ok((PI * (p - 0.5)).tan())
    } else if nu == 2.0 {
        Ok((2.0 * p - 1.0) / (2.0 * p * (1.0 - p)).sqrt())
    } else if nu == 4.0 {
        // alpha = 4u(1-u), q = (4/sqrt(alpha)) cos(acos(sqrt(alpha))/3), Q = sgn(u-1/2) sqrt(q-4).
        // With phi = acos(sqrt(alpha)) = asin(|1-2u|), q - 4 equals
        // 8 sin(2phi/3) sin(phi/3) / sqrt(alpha), which avoids the
        // cancellation in q - 4 near the median.
        let root_alpha = 2.0 * (p * (1.0 - p)).sqrt();
        let d = (1.0 - 2.0 * p).abs();
        let phi = if d < 0.5 { d.asin() } else { root_alpha.min(1.0).acos() };
        let q_minus_4 = 8.0 * (2.0 * phi / 3.0).sin() * (phi / 3.0).sin() / root_alpha;
        Ok(sign(p - 0.5) * q_minus_4.sqrt())
    } else {
        Err(domain("t_quantile_closed", nu, "nu in {1, 2, 4}"))
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Student-T quantile `Q(u, nu)`.
///
/// Dispatches to [`t_quantile_closed`] when `nu` is exactly 1, 2 or 4 and
/// to [`t_quantile_beta`] otherwise.
pub fn t_quantile(u: Probability, nu: DegreesOfFreedom) -> Result<f64> {
    let v = nu.get();
    if v == 1.0 || v == 2.0 || v == 4.0 {
        t_quantile_closed(u, v)
    } else {
        t_quantile_beta(u, nu)
    }
}

/// Quantile through the inverse incomplete beta function,
/// `Q = sgn(u - 1/2) sqrt(nu (1/x - 1))` with `I_x(nu/2, 1/2) = 2 min(u, 1-u)`.
pub fn t_quantile_beta(u: Probability, nu: DegreesOfFreedom) -> Result<f64> {
    let p = u.get();
    if p == 0.5 {
        return Ok(0.0);
    }
    let y = 2.0 * u.tail();
    let (x, xc) = inv_inc_beta_pair(y, 1.0 - y, nu.beta_params())?;
    Ok(sign(p - 0.5) * (nu.get() * xc / x).sqrt())
}

/// The six coefficients `d_1..d_6` of the deep-tail quantile series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSeriesCoefficients {
    pub d: [f64; 6],
}

/// Coefficients of the tail series, each a rational function of `nu`.
pub fn tail_series_coeffs(nu: DegreesOfFreedom) -> TailSeriesCoefficients {
    let n = nu.get();
    let n2 = n * n;
    let n3 = n2 * n;
    let n4 = n3 * n;
    let n5 = n4 * n;
    let n6 = n5 * n;
    let n7 = n6 * n;
    let p2 = n + 2.0;
    let p4 = n + 4.0;
    let p6 = n + 6.0;
    let p8 = n + 8.0;
    let p10 = n + 10.0;
    let m2 = n - 2.0;

    let d1 = 1.0;
    let d2 = -1.0 / p2;
    let d3 = -m2 * (n + 3.0) / (2.0 * p2.powi(2) * p4);
    let d4 = -m2 * (n3 + 6.0 * n2 + 2.0 * n - 18.0) / (3.0 * p2.powi(3) * p4 * p6);
    let d5 = -m2
        * (n + 5.0)
        * (6.0 * n5 + 59.0 * n4 + 95.0 * n3 - 284.0 * n2 - 380.0 * n + 576.0)
        / (24.0 * p2.powi(4) * p4.powi(2) * p6 * p8);
    let d6 = -m2
        * (n + 3.0)
        * (2.0 * n7 + 37.0 * n6 + 192.0 * n5 + 26.0 * n4 - 1430.0 * n3 - 48.0 * n2 + 3576.0 * n
            - 2400.0)
        / (10.0 * p2.powi(5) * p4.powi(2) * p6 * p8 * p10);
    TailSeriesCoefficients {
        d: [d1, d2, d3, d4, d5, d6],
    }
}

/// Six-term deep-tail approximation of the T quantile, valid for
/// `0 < u <= 0.025` and `2 <= nu <= 11`.
pub fn t_quantile_tail_series(u: Probability, nu: DegreesOfFreedom) -> Result<f64> {
    let p = u.get();
    let n = nu.get();
    if p > 0.025 {
        return Err(domain("t_quantile_tail_series", p, "0 < u <= 0.025"));
    }
    if !(2.0..=11.0).contains(&n) {
        return Err(domain("t_quantile_tail_series", n, "2 <= nu <= 11"));
    }
    // w = (u nu sqrt(pi) Γ(nu/2) / Γ((nu+1)/2))^(2/nu)
    let log_w =
        (2.0 / n) * (p.ln() + n.ln() + 0.5 * PI.ln() - ln_gamma_ratio(0.5 * n, 0.5));
    let w = log_w.exp();
    let coeffs = tail_series_coeffs(nu);
    let beta = coeffs.d.iter().rev().fold(0.0, |acc, &d| (acc + d) * w);
    Ok(-(n * (1.0 / beta - 1.0)).sqrt())
}
