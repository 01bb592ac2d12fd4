//! Mean-SD risk minimization over the long-only, fully invested simplex.
//!
//! Under jointly Gaussian or standard multivariate T returns every VaR and
//! CVaR objective has the form
//!
//! ```text
//! risk(w) = -mu·w + psi(u) sqrt(wᵀ C w)
//! ```
//!
//! which is convex on the simplex. It is minimized by projected gradient
//! descent with exact Euclidean projection, Barzilai-Borwein trial steps and
//! Armijo backtracking; every result carries a KKT certificate.

use crate::error::{Error, Result};
use crate::linalg::{Covariance, solve};
use crate::risk::{RiskSpec, psi};
use crate::special::Probability;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-10;
/// Weights above this count as part of the support in KKT checks.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

/// Long-only, fully invested weights: `w_i >= 0`, `sum w_i = 1` (to 1e-10).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        if let Some(i) = w.iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidWeights(format!("weight {} is {}", i + 1, w[i])));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        Ok(Self(w))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Expected returns, covariance and the loss multiplier of one risk problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioProblem {
    mu: Vec<f64>,
    cov: Covariance,
    spec: Option<(RiskSpec, Probability)>,
    psi: f64,
}

impl PortfolioProblem {
    /// `psi` is evaluated once here; it does not depend on the weights.
    pub fn new(mu: Vec<f64>, cov: Covariance, spec: RiskSpec, u: Probability) -> Result<Self> {
        check_dims(&mu, &cov)?;
        let psi = psi(spec, u)?;
        Ok(Self {
            mu,
            cov,
            spec: Some((spec, u)),
            psi,
        })
    }

    /// A problem with an explicit multiplier, e.g. a value read off a table.
    pub fn with_psi(mu: Vec<f64>, cov: Covariance, psi: f64) -> Result<Self> {
        check_dims(&mu, &cov)?;
        if !(psi >= 0.0 && psi.is_finite()) {
            return Err(crate::error::domain("psi", psi, "psi >= 0"));
        }
        Ok(Self {
            mu,
            cov,
            spec: None,
            psi,
        })
    }

    /// Same returns, covariance and risk spec at another tail level.
    pub fn at_level(&self, u: Probability) -> Result<Self> {
        let (spec, _) = self.spec.ok_or_else(|| {
            Error::Dimension("problem was built from an explicit psi, not a risk spec".into())
        })?;
        Self::new(self.mu.clone(), self.cov.clone(), spec, u)
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn cov(&self) -> &Covariance {
        &self.cov
    }

    pub fn spec(&self) -> Option<RiskSpec> {
        self.spec.map(|(s, _)| s)
    }

    pub fn level(&self) -> Option<Probability> {
        self.spec.map(|(_, u)| u)
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub(crate) fn value(&self, w: &[f64]) -> f64 {
        -dot(&self.mu, w) + self.psi * self.cov.quad_form(w).sqrt()
    }

    pub(crate) fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let cw = self.cov.mul_vec(w);
        let sigma = dot(&cw, w).sqrt();
        self.mu
            .iter()
            .zip(&cw)
            .map(|(m, c)| -m + self.psi * c / sigma)
            .collect()
    }
}

fn check_dims(mu: &[f64], cov: &Covariance) -> Result<()> {
    if mu.len() != cov.dim() {
        return Err(Error::Dimension(format!(
            "{} expected returns but covariance is {}x{}",
            mu.len(),
            cov.dim(),
            cov.dim()
        )));
    }
    if let Some(i) = mu.iter().position(|m| !m.is_finite()) {
        return Err(Error::Dimension(format!("expected return {} is not finite", i + 1)));
    }
    Ok(())
}

fn check_weights(p: &PortfolioProblem, w: &WeightVector) -> Result<()> {
    if w.len() != p.dim() {
        return Err(Error::Dimension(format!(
            "{} weights for a {}-asset problem",
            w.len(),
            p.dim()
        )));
    }
    Ok(())
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `-sum mu_i w_i + psi sqrt(sum C_ij w_i w_j)`
pub fn risk_objective(p: &PortfolioProblem, w: &WeightVector) -> Result<f64> {
    check_weights(p, w)?;
    Ok(p.value(w.as_slice()))
}

/// `-mu + psi C w / sqrt(wᵀ C w)`
pub fn risk_gradient(p: &PortfolioProblem, w: &WeightVector) -> Result<Vec<f64>> {
    check_weights(p, w)?;
    Ok(p.gradient(w.as_slice()))
}

/// Euclidean projection onto `{w : w >= 0, sum w = 1}`.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        cumulative += x;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if x - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop when `||P(w - g) - w||_2` falls to this.
    pub gradient_tolerance: f64,
    /// Stop when an accepted step moves no weight by more than this.
    pub step_tolerance: f64,
    /// Starting point; uniform weights when `None`.
    pub initial: Option<WeightVector>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            gradient_tolerance: 1e-9,
            step_tolerance: 1e-12,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub weights: WeightVector,
    pub risk: f64,
    pub expected_return: f64,
    pub variance: f64,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_residual: f64,
}

impl OptimizationResult {
    pub(crate) fn evaluate(p: &PortfolioProblem, w: Vec<f64>, iterations: usize, converged: bool) -> Self {
        let g = p.gradient(&w);
        let kkt_residual = kkt_residual(&w, &g);
        Self {
            risk: p.value(&w),
            expected_return: dot(&p.mu, &w),
            variance: p.cov.quad_form(&w),
            weights: WeightVector(w),
            iterations,
            converged,
            kkt_residual,
        }
    }
}

/// Largest violation of the simplex KKT conditions: gradient components on
/// the support equal a common multiplier, those off the support are no
/// smaller than it.
pub fn kkt_residual(w: &[f64], grad: &[f64]) -> f64 {
    let (mut mass, mut weighted) = (0.0, 0.0);
    for (&wi, &gi) in w.iter().zip(grad) {
        if wi > SUPPORT_THRESHOLD {
            mass += wi;
            weighted += wi * gi;
        }
    }
    if mass == 0.0 {
        return f64::INFINITY;
    }
    let lambda = weighted / mass;
    w.iter()
        .zip(grad)
        .map(|(&wi, &gi)| {
            if wi > SUPPORT_THRESHOLD {
                (gi - lambda).abs()
            } else {
                (lambda - gi).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-30;

/// Minimizes [`risk_objective`] over the simplex.
///
/// Non-convergence within `max_iterations` is not an error: the best
/// iterate is returned with `converged = false`.
pub fn optimize(p: &PortfolioProblem, opts: &SolverOptions) -> Result<OptimizationResult> {
    let n = p.dim();
    let mut w = match &opts.initial {
        Some(start) => {
            check_weights(p, start)?;
            start.as_slice().to_vec()
        }
        None => WeightVector::uniform(n).into_vec(),
    };
    if n == 1 {
        return Ok(OptimizationResult::evaluate(p, vec![1.0], 0, true));
    }

    let mut f = p.value(&w);
    let mut g = p.gradient(&w);
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        let full: Vec<f64> = w.iter().zip(&g).map(|(x, gi)| x - gi).collect();
        let projected = project_to_simplex(&full);
        let pg_norm = projected
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if pg_norm <= opts.gradient_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let mut t = step;
        let (trial, f_trial) = loop {
            let moved: Vec<f64> = w.iter().zip(&g).map(|(x, gi)| x - t * gi).collect();
            let trial = project_to_simplex(&moved);
            let descent: f64 = g.iter().zip(trial.iter().zip(&w)).map(|(gi, (a, b))| gi * (a - b)).sum();
            let f_trial = p.value(&trial);
            // The slack absorbs rounding once f has converged to machine precision.
            if f_trial <= f + ARMIJO * descent + 4.0 * f64::EPSILON * f.abs() {
                break (trial, f_trial);
            }
            t *= 0.5;
            if t < MIN_STEP {
                break (w.clone(), f);
            }
        };
        if t < MIN_STEP {
            break;
        }

        let g_trial = p.gradient(&trial);
        let s: Vec<f64> = trial.iter().zip(&w).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_trial.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        step = if sy > 0.0 { dot(&s, &s) / sy } else { 2.0 * t };
        step = step.clamp(1e-10, 1e10);

        let max_move = s.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        w = trial;
        f = f_trial;
        g = g_trial;
        if max_move <= opts.step_tolerance {
            converged = true;
            break;
        }
    }
    Ok(OptimizationResult::evaluate(p, w, iterations, converged))
}

/// The `x` grid `1, 1.5, ..., 5` for `u = 10^-x`.
pub fn default_frontier_grid() -> Vec<f64> {
    (0..9).map(|i| 1.0 + 0.5 * i as f64).collect()
}

/// One optimum of a frontier sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint {
    pub x: f64,
    pub u: f64,
    pub psi: f64,
    pub result: Result<OptimizationResult>,
}

/// Optimizes `p` at each `u = 10^-x`, keeping returns, covariance,
/// distribution and measure fixed. A failing point does not stop the sweep.
pub fn frontier(p: &PortfolioProblem, x_grid: &[f64], opts: &SolverOptions) -> Result<Vec<FrontierPoint>> {
    let spec = p
        .spec()
        .ok_or_else(|| Error::Dimension("frontier needs a problem built from a risk spec".into()))?;
    Ok(x_grid
        .iter()
        .map(|&x| {
            let u = 10f64.powf(-x);
            let problem = Probability::new(u)
                .and_then(|level| PortfolioProblem::new(p.mu.clone(), p.cov.clone(), spec, level));
            match problem {
                Ok(problem) => FrontierPoint {
                    x,
                    u,
                    psi: problem.psi,
                    result: optimize(&problem, opts),
                },
                Err(e) => FrontierPoint {
                    x,
                    u,
                    psi: f64::NAN,
                    result: Err(e),
                },
            }
        })
        .collect())
}

/// Minimizer of `wᵀ C w` over the simplex.
pub fn min_variance_weights(cov: &Covariance) -> Result<WeightVector> {
    let p = PortfolioProblem::with_psi(vec![0.0; cov.dim()], cov.clone(), 1.0)?;
    let result = optimize(&p, &SolverOptions::default())?;
    if !result.converged {
        return Err(Error::NoConvergence {
            routine: "minimum-variance projected gradient",
            iterations: result.iterations,
            residual: result.kkt_residual,
        });
    }
    Ok(result.weights)
}

/// Largest portfolio handled by [`min_variance_at_return`].
pub const EXACT_FRONTIER_MAX_ASSETS: usize = 16;

/// Exact minimum variance over `{w in simplex : mu·w >= target}`.
///
/// Enumerates every support set and both states of the return constraint,
/// solving the equality-constrained KKT system on each face and keeping the
/// feasible candidate of least variance. Exponential in the asset count, so
/// it serves as an independent check for small problems. Returns the
/// weights and their variance.
pub fn min_variance_at_return(mu: &[f64], cov: &Covariance, target: f64) -> Result<(WeightVector, f64)> {
    let n = mu.len();
    check_dims(mu, cov)?;
    if n > EXACT_FRONTIER_MAX_ASSETS {
        return Err(Error::Dimension(format!(
            "exact frontier search supports at most {EXACT_FRONTIER_MAX_ASSETS} assets, got {n}"
        )));
    }
    let slack = 1e-12 * (1.0 + target.abs());
    let mut best: Option<(Vec<f64>, f64)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        for return_active in [false, true] {
            let Some(ws) = face_minimizer(mu, cov, &support, return_active.then_some(target)) else {
                continue;
            };
            if ws.iter().any(|&x| x < -1e-12) {
                continue;
            }
            let mut w = vec![0.0; n];
            for (&i, &x) in support.iter().zip(&ws) {
                w[i] = x.max(0.0);
            }
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
            if dot(mu, &w) < target - slack {
                continue;
            }
            let var = cov.quad_form(&w);
            if best.as_ref().is_none_or(|(_, v)| var < *v) {
                best = Some((w, var));
            }
        }
    }
    let (w, var) = best.ok_or_else(|| {
        Error::InvalidWeights(format!("no long-only portfolio reaches expected return {target}"))
    })?;
    Ok((WeightVector(w), var))
}

/// Stationary point of `wᵀCw` on the affine face `{sum w = 1, (mu·w = r)}`
/// restricted to `support`.
fn face_minimizer(mu: &[f64], cov: &Covariance, support: &[usize], target: Option<f64>) -> Option<Vec<f64>> {
    let k = support.len();
    let m = k + 1 + usize::from(target.is_some());
    let mut a = vec![0.0; m * m];
    let mut b = vec![0.0; m];
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[r * m + c] = 2.0 * cov.get(i, j);
        }
        a[r * m + k] = -1.0;
        a[k * m + r] = 1.0;
        if target.is_some() {
            a[r * m + k + 1] = -mu[i];
            a[(k + 1) * m + r] = mu[i];
        }
    }
    b[k] = 1.0;
    if let Some(t) = target {
        b[k + 1] = t;
    }
    solve(a, b).map(|x| x[..k].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::Measure;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn test_cov() -> Covariance {
        Covariance::from_uniform_correlation(&[0.04, 0.02, 0.01], 0.3).unwrap()
    }

    fn test_mu() -> Vec<f64> {
        vec![0.08, 0.05, 0.03]
    }

    fn prob(u: f64) -> Probability {
        Probability::new(u).unwrap()
    }

    fn random_simplex(rng: &mut impl Rng, n: usize) -> WeightVector {
        let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let s: f64 = e.iter().sum();
        WeightVector::new(e.iter().map(|x| x / s).collect()).unwrap()
    }

    fn random_pd(rng: &mut impl Rng, n: usize) -> Covariance {
        let a: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>() - 0.5).collect();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let s: f64 = (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum();
                        0.1 * s + if i == j { 0.01 } else { 0.0 }
                    })
                    .collect()
            })
            .collect();
        Covariance::new(rows).unwrap()
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(vec![]).is_err());
        assert!(WeightVector::new(vec![0.5, 0.6]).is_err());
        assert!(WeightVector::new(vec![1.5, -0.5]).is_err());
        assert!(WeightVector::new(vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn problem_dimension_checks() {
        assert!(PortfolioProblem::with_psi(vec![0.1, 0.2], test_cov(), 1.0).is_err());
        let p = PortfolioProblem::with_psi(test_mu(), test_cov(), 1.0).unwrap();
        assert!(risk_objective(&p, &WeightVector::uniform(2)).is_err());
        assert!(risk_gradient(&p, &WeightVector::uniform(4)).is_err());
    }

    #[test]
    fn objective_single_asset() {
        let cov = Covariance::new(vec![vec![0.0004]]).unwrap();
        let spec = RiskSpec::gaussian(Measure::VaR);
        let p = PortfolioProblem::new(vec![0.01], cov, spec, prob(0.025)).unwrap();
        let r = risk_objective(&p, &WeightVector::new(vec![1.0]).unwrap()).unwrap();
        assert!((r - (-0.01 + 1.959_963_984_540_054 * 0.02)).abs() < 1e-15);
        assert!((r - 0.029_199_2).abs() < 1e-6);
    }

    #[test]
    fn objective_two_assets_identity() {
        let p = PortfolioProblem::with_psi(vec![0.0, 0.0], Covariance::identity(2), 3.7).unwrap();
        let r = risk_objective(&p, &WeightVector::uniform(2)).unwrap();
        assert!((r - 3.7 * 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gradient_special_cases() {
        let cov = Covariance::new(vec![vec![0.09]]).unwrap();
        let p = PortfolioProblem::with_psi(vec![0.04], cov, 2.0).unwrap();
        let g = risk_gradient(&p, &WeightVector::new(vec![1.0]).unwrap()).unwrap();
        assert!((g[0] - (-0.04 + 2.0 * 0.3)).abs() < 1e-15);

        let cov = Covariance::new(vec![vec![0.04, 0.0], vec![0.0, 0.04]]).unwrap();
        let p = PortfolioProblem::with_psi(vec![0.05, 0.05], cov, 2.0).unwrap();
        let g = risk_gradient(&p, &WeightVector::uniform(2)).unwrap();
        assert_eq!(g[0], g[1]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-6;
        for _ in 0..20 {
            let cov = random_pd(&mut rng, 5);
            let mu: Vec<f64> = (0..5).map(|_| rng.random::<f64>() * 0.1).collect();
            let p = PortfolioProblem::with_psi(mu, cov, 1.0 + 10.0 * rng.random::<f64>()).unwrap();
            for _ in 0..5 {
                let w = random_simplex(&mut rng, 5);
                let g = risk_gradient(&p, &w).unwrap();
                for i in 0..5 {
                    let mut up = w.as_slice().to_vec();
                    let mut dn = up.clone();
                    up[i] += h;
                    dn[i] -= h;
                    let fd = (p.value(&up) - p.value(&dn)) / (2.0 * h);
                    assert!((fd - g[i]).abs() < 1e-6, "component {i}: {fd} vs {}", g[i]);
                }
            }
        }
    }

    #[test]
    fn simplex_projection() {
        assert_eq!(project_to_simplex(&[0.2, 0.3, 0.5]), vec![0.2, 0.3, 0.5]);
        assert_eq!(project_to_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_to_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-16));
        let p = project_to_simplex(&[-3.0, 0.1, 0.4]);
        assert_eq!(p[0], 0.0);
        assert!((p[1] - 0.35).abs() < 1e-15 && (p[2] - 0.65).abs() < 1e-15);
    }

    #[test]
    fn optimize_single_asset() {
        let cov = Covariance::new(vec![vec![0.01]]).unwrap();
        let p = PortfolioProblem::with_psi(vec![0.02], cov, 2.0).unwrap();
        let r = optimize(&p, &SolverOptions::default()).unwrap();
        assert_eq!(r.weights.as_slice(), &[1.0]);
        assert!(r.converged);
    }

    #[test]
    fn optimize_symmetric_pair() {
        let cov = Covariance::new(vec![vec![0.04, 0.0], vec![0.0, 0.04]]).unwrap();
        let p = PortfolioProblem::with_psi(vec![0.03, 0.03], cov, 2.5).unwrap();
        let r = optimize(&p, &SolverOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.weights.as_slice()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn optimize_result_is_consistent() {
        let spec = RiskSpec::student_t(3.0, Measure::CVaR).unwrap();
        let p = PortfolioProblem::new(test_mu(), test_cov(), spec, prob(1e-4)).unwrap();
        let r = optimize(&p, &SolverOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.kkt_residual <= 1e-6);
        let recomputed = -dot(&p.mu, r.weights.as_slice()) + p.psi * r.variance.sqrt();
        assert!((recomputed - r.risk).abs() <= 1e-10);
        let sum: f64 = r.weights.as_slice().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn restarts_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in [
            RiskSpec::gaussian(Measure::VaR),
            RiskSpec::student_t(3.0, Measure::CVaR).unwrap(),
        ] {
            let p = PortfolioProblem::new(test_mu(), test_cov(), spec, prob(0.01)).unwrap();
            let base = optimize(&p, &SolverOptions::default()).unwrap().risk;
            for _ in 0..10 {
                let opts = SolverOptions {
                    initial: Some(random_simplex(&mut rng, 3)),
                    ..SolverOptions::default()
                };
                let r = optimize(&p, &opts).unwrap();
                assert!((r.risk - base).abs() <= 1e-8, "{} vs {base}", r.risk);
            }
        }
    }

    #[test]
    fn min_variance_examples() {
        let w = min_variance_weights(&Covariance::identity(3)).unwrap();
        assert!(w.as_slice().iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-9));

        let diag = Covariance::new(vec![vec![1.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let w = min_variance_weights(&diag).unwrap();
        assert!((w.as_slice()[0] - 0.8).abs() < 1e-9 && (w.as_slice()[1] - 0.2).abs() < 1e-9);
    }

    #[test]
    fn min_variance_matches_exact_enumeration() {
        let cov = test_cov();
        let w = min_variance_weights(&cov).unwrap();
        let (exact, var) = min_variance_at_return(&[0.0; 3], &cov, 0.0).unwrap();
        for (a, b) in w.as_slice().iter().zip(exact.as_slice()) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!((cov.quad_form(w.as_slice()) - var).abs() < 1e-14);
    }

    #[test]
    fn exact_frontier_enumeration() {
        // Diagonal two-asset: unconstrained min variance is (0.8, 0.2), return 0.2.
        let cov = Covariance::new(vec![vec![1.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let mu = [0.0, 1.0];
        let (w, var) = min_variance_at_return(&mu, &cov, 0.1).unwrap();
        assert!((w.as_slice()[0] - 0.8).abs() < 1e-12 && (var - 0.8).abs() < 1e-12);
        // Target 0.5 binds: w = (0.5, 0.5), variance 1.25.
        let (w, var) = min_variance_at_return(&mu, &cov, 0.5).unwrap();
        assert!((w.as_slice()[1] - 0.5).abs() < 1e-12 && (var - 1.25).abs() < 1e-12);
        assert!(min_variance_at_return(&mu, &cov, 1.5).is_err());
    }

    #[test]
    fn frontier_grid_and_single_asset() {
        let grid = default_frontier_grid();
        assert_eq!(grid, vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0]);
        let cov = Covariance::new(vec![vec![0.01]]).unwrap();
        let spec = RiskSpec::gaussian(Measure::CVaR);
        let p = PortfolioProblem::new(vec![0.05], cov, spec, prob(0.1)).unwrap();
        let points = frontier(&p, &grid, &SolverOptions::default()).unwrap();
        assert_eq!(points.len(), 9);
        for pt in &points {
            assert_eq!(pt.result.as_ref().unwrap().weights.as_slice(), &[1.0]);
        }
    }

    #[test]
    fn frontier_reports_bad_levels_and_continues() {
        let spec = RiskSpec::gaussian(Measure::VaR);
        let p = PortfolioProblem::new(test_mu(), test_cov(), spec, prob(0.1)).unwrap();
        let points = frontier(&p, &[0.1, 2.0], &SolverOptions::default()).unwrap();
        assert!(points[0].result.is_err());
        assert!(points[1].result.is_ok());
        let explicit = PortfolioProblem::with_psi(test_mu(), test_cov(), 2.0).unwrap();
        assert!(frontier(&explicit, &[2.0], &SolverOptions::default()).is_err());
    }

    #[test]
    fn variance_decreases_with_risk_aversion() {
        for spec in [
            RiskSpec::gaussian(Measure::VaR),
            RiskSpec::student_t(3.0, Measure::CVaR).unwrap(),
        ] {
            let p = PortfolioProblem::new(test_mu(), test_cov(), spec, prob(0.1)).unwrap();
            let points = frontier(&p, &default_frontier_grid(), &SolverOptions::default()).unwrap();
            for pair in points.windows(2) {
                assert!(pair[1].psi > pair[0].psi);
                let (a, b) = (pair[0].result.as_ref().unwrap(), pair[1].result.as_ref().unwrap());
                assert!(b.variance <= a.variance + 1e-10, "{} then {}", a.variance, b.variance);
            }
        }
        // Large psi approaches minimum variance.
        let cov = test_cov();
        let mv = min_variance_weights(&cov).unwrap();
        let p = PortfolioProblem::with_psi(test_mu(), cov.clone(), 1e4).unwrap();
        let r = optimize(&p, &SolverOptions::default()).unwrap();
        for (a, b) in r.weights.as_slice().iter().zip(mv.as_slice()) {
            assert!((a - b).abs() < 1e-3);
        }
    }
}
