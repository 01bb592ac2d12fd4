//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Degrees of freedom follow one convention throughout: a non-finite `nu`
//! (JavaScript `Infinity`) selects the Gaussian model. Tables come back as
//! flat `Float64Array`s in row-major order.

use tailrisk::linalg::Covariance;
use tailrisk::portfolio::frontier as sweep;
use tailrisk::{Distribution, Measure, PortfolioProblem, Probability, RiskSpec, SolverOptions, psi};
use wasm_bindgen::prelude::*;

fn distribution(nu: f64) -> Result<Distribution, String> {
    if nu.is_infinite() && nu > 0.0 {
        Ok(Distribution::Gaussian)
    } else {
        Distribution::student_t(nu).map_err(|e| e.to_string())
    }
}

fn measure(name: &str) -> Result<Measure, String> {
    match name {
        "var" => Ok(Measure::VaR),
        "cvar" => Ok(Measure::CVaR),
        other => Err(format!("unknown measure {other:?}")),
    }
}

fn level(u: f64) -> Result<Probability, String> {
    if !(u > 0.0 && u < 0.5) {
        return Err(format!("tail level must satisfy 0 < u < 1/2, got {u}"));
    }
    Probability::new(u).map_err(|e| e.to_string())
}

fn linspace(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..points)
            .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

pub fn psi_value(nu: f64, measure_name: &str, u: f64) -> Result<f64, String> {
    let spec = RiskSpec::new(distribution(nu)?, measure(measure_name)?).map_err(|e| e.to_string())?;
    psi(spec, level(u)?).map_err(|e| e.to_string())
}

/// Rows `[x, psi_var, psi_cvar]` at `points` values of `x` from `x_from` to
/// `x_to`, with `u = 10^-x`.
pub fn loss_curve_rows(nu: f64, x_from: f64, x_to: f64, points: usize) -> Result<Vec<f64>, String> {
    let d = distribution(nu)?;
    let var = RiskSpec::new(d, Measure::VaR).map_err(|e| e.to_string())?;
    let cvar = RiskSpec::new(d, Measure::CVaR).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * points);
    for x in linspace(x_from, x_to, points) {
        let u = level(10f64.powf(-x))?;
        out.extend([
            x,
            psi(var, u).map_err(|e| e.to_string())?,
            psi(cvar, u).map_err(|e| e.to_string())?,
        ]);
    }
    Ok(out)
}

/// Rows `[x, psi, expected_return, variance, risk, w_1..w_N]` for optima at
/// `u = 10^-x`. `cov` is the row-major `N x N` covariance.
pub fn frontier_rows(
    mu: &[f64],
    cov: &[f64],
    nu: f64,
    measure_name: &str,
    x_from: f64,
    x_to: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let n = mu.len();
    if cov.len() != n * n {
        return Err(format!("covariance has {} entries, expected {}", cov.len(), n * n));
    }
    let rows = cov.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
    let cov = Covariance::new(rows).map_err(|e| e.to_string())?;
    let spec = RiskSpec::new(distribution(nu)?, measure(measure_name)?).map_err(|e| e.to_string())?;
    let xs = linspace(x_from, x_to, points);
    for &x in &xs {
        level(10f64.powf(-x))?;
    }
    let problem = PortfolioProblem::new(mu.to_vec(), cov, spec, level(0.1)?).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(points * (5 + n));
    for pt in sweep(&problem, &xs, &SolverOptions::default()).map_err(|e| e.to_string())? {
        let r = pt.result.map_err(|e| e.to_string())?;
        out.extend([pt.x, pt.psi, r.expected_return, r.variance, r.risk]);
        out.extend_from_slice(r.weights.as_slice());
    }
    Ok(out)
}

/// `psi(u)` for degrees of freedom `nu` (`Infinity` for Gaussian) and
/// measure `"var"` or `"cvar"`.
#[wasm_bindgen]
pub fn multiplier(nu: f64, measure: &str, u: f64) -> Result<f64, JsError> {
    psi_value(nu, measure, u).map_err(|e| JsError::new(&e))
}

/// Flat `[x, psi_var, psi_cvar]` rows.
#[wasm_bindgen]
pub fn loss_curves(nu: f64, x_from: f64, x_to: f64, points: usize) -> Result<Vec<f64>, JsError> {
    loss_curve_rows(nu, x_from, x_to, points).map_err(|e| JsError::new(&e))
}

/// Flat `[x, psi, expected_return, variance, risk, w_1..w_N]` rows.
#[wasm_bindgen]
pub fn frontier(
    mu: Vec<f64>,
    cov: Vec<f64>,
    nu: f64,
    measure: &str,
    x_from: f64,
    x_to: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    frontier_rows(&mu, &cov, nu, measure, x_from, x_to, points).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multipliers() {
        assert!((psi_value(f64::INFINITY, "var", 0.025).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((psi_value(3.0, "cvar", 1e-4).unwrap() - 19.3).abs() < 0.05);
        assert!(psi_value(2.0, "var", 0.01).is_err());
        assert!(psi_value(4.0, "es", 0.01).is_err());
        assert!(psi_value(4.0, "var", 0.5).is_err());
    }

    #[test]
    fn curve_layout() {
        let rows = loss_curve_rows(4.0, 1.0, 6.0, 51).unwrap();
        assert_eq!(rows.len(), 153);
        assert_eq!(rows[0], 1.0);
        assert!((rows[150] - 6.0).abs() < 1e-12);
        assert!(rows.chunks(3).all(|r| r[2] >= r[1]));
        assert!(loss_curve_rows(4.0, 0.1, 2.0, 5).is_err());
    }

    #[test]
    fn frontier_layout() {
        let mu = [0.08, 0.05, 0.03];
        let cov = Covariance::from_uniform_correlation(&[0.04, 0.02, 0.01], 0.3).unwrap();
        let flat: Vec<f64> = cov.rows().concat();
        let rows = frontier_rows(&mu, &flat, 3.0, "cvar", 1.0, 5.0, 9).unwrap();
        assert_eq!(rows.len(), 9 * 8);
        for pair in rows.chunks(8).collect::<Vec<_>>().windows(2) {
            assert!(pair[1][1] > pair[0][1]);
            assert!(pair[1][3] <= pair[0][3] + 1e-12);
        }
        assert!(frontier_rows(&mu, &flat[..8], 3.0, "cvar", 1.0, 5.0, 9).is_err());
    }
}
