//! Seeded Monte Carlo samplers and empirical tail estimators.
//!
//! T variates are built as `Z sqrt(nu / G)` with `Z` standard normal and `G`
//! chi-squared with `nu` degrees of freedom, drawn as twice a gamma(nu/2)
//! variate (Marsaglia-Tsang rejection, exact).
//!
//! # Streams
//!
//! Output is split into chunks of [`CHUNK`] draws. Chunk `c` is generated by
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `c`, so results are
//! identical for a given `(n, seed)` whatever the number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::portfolio::{OptimizationResult, PortfolioProblem, SolverOptions, WeightVector, optimize};
use crate::risk::Distribution;
use crate::special::Probability;
use crate::tquantile::DegreesOfFreedom;

/// Draws per independent stream.
pub const CHUNK: usize = 1 << 16;

/// Smallest `n * u` accepted by [`empirical_tail`].
pub const MIN_TAIL_POINTS: f64 = 100.0;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn fill_chunked<T, F>(out: &mut [T], seed: u64, fill: F)
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, &mut [T]) + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| fill(&mut stream_rng(seed, c as u64), chunk));
    }
    #[cfg(not(feature = "parallel"))]
    for (c, chunk) in out.chunks_mut(CHUNK).enumerate() {
        fill(&mut stream_rng(seed, c as u64), chunk);
    }
}

fn chi_squared(nu: DegreesOfFreedom) -> Gamma<f64> {
    Gamma::new(0.5 * nu.get(), 1.0).expect("positive shape")
}

#[inline]
fn mixer(rng: &mut ChaCha8Rng, gamma: &Gamma<f64>, nu: f64) -> f64 {
    (nu / (2.0 * gamma.sample(rng))).sqrt()
}

/// `n` i.i.d. standard T draws with `nu` degrees of freedom.
pub fn sample_t(nu: DegreesOfFreedom, n: usize, seed: u64) -> Vec<f64> {
    let gamma = chi_squared(nu);
    let nu = nu.get();
    let mut out = vec![0.0; n];
    fill_chunked(&mut out, seed, |rng, chunk| {
        for x in chunk {
            let z: f64 = rng.sample(StandardNormal);
            *x = z * mixer(rng, &gamma, nu);
        }
    });
    out
}

/// `n` i.i.d. standard normal draws.
pub fn sample_gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    fill_chunked(&mut out, seed, |rng, chunk| {
        for x in chunk {
            *x = rng.sample(StandardNormal);
        }
    });
    out
}

/// `n` draws with zero mean and unit variance from `dist`.
pub fn sample_unit_variance(dist: Distribution, n: usize, seed: u64) -> Result<Vec<f64>> {
    match dist {
        Distribution::Gaussian => Ok(sample_gaussian(n, seed)),
        Distribution::StudentT(nu) => {
            let scale = nu.unit_variance_scale()?;
            let mut x = sample_t(nu, n, seed);
            x.iter_mut().for_each(|v| *v *= scale);
            Ok(x)
        }
    }
}

/// `T = mu + A Z sqrt(nu / G)` with one mixer `G` shared by all components.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateTSpec {
    mixing: Vec<Vec<f64>>,
    nu: DegreesOfFreedom,
    mu: Vec<f64>,
}

impl MultivariateTSpec {
    pub fn new(mixing: Vec<Vec<f64>>, nu: DegreesOfFreedom, mu: Vec<f64>) -> Result<Self> {
        let n = mixing.len();
        if n == 0 || mixing.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("mixing matrix must be square and non-empty".into()));
        }
        if mu.len() != n {
            return Err(Error::Dimension(format!("{} location offsets for {n} components", mu.len())));
        }
        if mixing.iter().flatten().chain(&mu).any(|v| !v.is_finite()) {
            return Err(Error::Dimension("non-finite entry in multivariate T spec".into()));
        }
        Ok(Self { mixing, nu, mu })
    }

    /// Zero location, given mixing matrix.
    pub fn centered(mixing: Vec<Vec<f64>>, nu: DegreesOfFreedom) -> Result<Self> {
        let n = mixing.len();
        Self::new(mixing, nu, vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn nu(&self) -> DegreesOfFreedom {
        self.nu
    }

    pub fn mixing(&self) -> &[Vec<f64>] {
        &self.mixing
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// `nu / (nu - 2) A Aᵀ`
    pub fn covariance(&self) -> Result<Vec<Vec<f64>>> {
        self.nu.require_finite_variance()?;
        let nu = self.nu.get();
        let factor = nu / (nu - 2.0);
        let a = &self.mixing;
        Ok(a.iter()
            .map(|ri| a.iter().map(|rj| factor * ri.iter().zip(rj).map(|(x, y)| x * y).sum::<f64>()).collect())
            .collect())
    }
}

/// `n` draws of the multivariate T in `spec`.
pub fn sample_mvt(spec: &MultivariateTSpec, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let gamma = chi_squared(spec.nu);
    let nu = spec.nu.get();
    let d = spec.dim();
    let mut out = vec![Vec::new(); n];
    fill_chunked(&mut out, seed, |rng, chunk| {
        let mut z = vec![0.0; d];
        for draw in chunk {
            z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            let m = mixer(rng, &gamma, nu);
            *draw = spec
                .mixing
                .iter()
                .zip(&spec.mu)
                .map(|(row, mu)| mu + m * row.iter().zip(&z).map(|(a, zk)| a * zk).sum::<f64>())
                .collect();
        }
    });
    out
}

/// Empirical left-tail VaR and CVaR of a return sample, both as positive
/// losses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalTailEstimate {
    pub var_hat: f64,
    pub cvar_hat: f64,
    pub n_samples: usize,
    /// Standard error of `cvar_hat`.
    pub standard_error: f64,
    /// Standard error of `var_hat` from a spacing estimate of the density
    /// at the quantile.
    pub var_standard_error: f64,
}

/// Tail estimates at level `u` with `k = ceil(n u)` tail points:
/// `var_hat = -x_(k)`, `cvar_hat = -mean(x_(1..=k))`.
pub fn empirical_tail(returns: &[f64], u: Probability) -> Result<EmpiricalTailEstimate> {
    let n = returns.len();
    let u = u.get();
    let tail_points = n as f64 * u;
    if tail_points < MIN_TAIL_POINTS {
        return Err(Error::InsufficientTail { tail_points });
    }
    let k = (tail_points.ceil() as usize).min(n);
    let m = ((k as f64).sqrt().ceil() as usize).min(k - 1).min(n - k);

    let mut x = returns.to_vec();
    let hi = k + m - 1;
    x.select_nth_unstable_by(hi, f64::total_cmp);
    let upper = x[hi];
    let (left, _) = x.split_at_mut(hi);
    let q = if k - 1 < hi {
        *left.select_nth_unstable_by(k - 1, f64::total_cmp).1
    } else {
        upper
    };
    let lower = if m > 0 {
        *x[..k - 1].select_nth_unstable_by(k - 1 - m, f64::total_cmp).1
    } else {
        q
    };

    let tail = &x[..k];
    let mean = q + tail.iter().map(|v| v - q).sum::<f64>() / k as f64;
    let tail_var = if k > 1 {
        tail.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64
    } else {
        0.0
    };
    let nf = n as f64;
    let excess = mean - q;
    let standard_error = ((tail_var + (1.0 - u) * excess * excess) / (nf * u)).sqrt();

    let spacing = upper - lower;
    let var_standard_error = if m > 0 && spacing > 0.0 {
        let density = 2.0 * m as f64 / (nf * spacing);
        (u * (1.0 - u) / nf).sqrt() / density
    } else {
        0.0
    };

    Ok(EmpiricalTailEstimate {
        var_hat: -q,
        cvar_hat: -mean,
        n_samples: n,
        standard_error,
        var_standard_error,
    })
}

/// Empirical loss multipliers: [`empirical_tail`] of `n` unit-variance draws.
pub fn empirical_psi(dist: Distribution, u: Probability, n: usize, seed: u64) -> Result<EmpiricalTailEstimate> {
    let tail_points = n as f64 * u.get();
    if tail_points < MIN_TAIL_POINTS {
        return Err(Error::InsufficientTail { tail_points });
    }
    empirical_tail(&sample_unit_variance(dist, n, seed)?, u)
}

/// One uniform point of the simplex from normalized exponential variates.
pub fn uniform_simplex_point(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.sample(Exp1)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Best of `n` uniform random portfolios, optionally polished by one
/// projected-gradient run started from it.
///
/// `iterations` counts portfolios evaluated (plus polishing steps) and
/// `converged` reports whether the KKT residual is at most 1e-6.
pub fn random_portfolio_search(
    p: &PortfolioProblem,
    n: usize,
    seed: u64,
    polish: bool,
) -> Result<OptimizationResult> {
    if n == 0 {
        return Err(crate::error::domain("sample count", 0.0, "n >= 1"));
    }
    let d = p.dim();
    let mut rng = stream_rng(seed, 0);
    let mut best = vec![1.0 / d as f64; d];
    let mut best_value = f64::INFINITY;
    for _ in 0..n {
        let w = uniform_simplex_point(&mut rng, d);
        let v = p.value(&w);
        if v < best_value {
            best_value = v;
            best = w;
        }
    }
    let mut result = OptimizationResult::evaluate(p, best, n, false);
    if polish {
        let opts = SolverOptions {
            initial: Some(WeightVector::new(result.weights.as_slice().to_vec())?),
            ..SolverOptions::default()
        };
        let polished = optimize(p, &opts)?;
        if polished.risk <= result.risk {
            result = OptimizationResult {
                iterations: n + polished.iterations,
                ..polished
            };
        }
    }
    result.converged = result.kkt_residual <= 1e-6;
    Ok(result)
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0_f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic two-sample critical value at significance `alpha`.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(0.5 * alpha).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Covariance;
    use crate::risk::{Measure, RiskSpec};
    use crate::tquantile::t_quantile;

    fn dof(nu: f64) -> DegreesOfFreedom {
        DegreesOfFreedom::new(nu).unwrap()
    }

    fn prob(u: f64) -> Probability {
        Probability::new(u).unwrap()
    }

    fn mean_var(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        (m, x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0))
    }

    #[test]
    fn deterministic_per_seed() {
        let a = sample_t(dof(3.0), 200_000, 5);
        assert_eq!(a, sample_t(dof(3.0), 200_000, 5));
        assert_ne!(a, sample_t(dof(3.0), 200_000, 6));
        // A shorter run is a prefix of a longer one.
        assert_eq!(&a[..1000], &sample_t(dof(3.0), 1000, 5)[..]);
    }

    #[test]
    fn t4_variance() {
        let x = sample_t(dof(4.0), 1_000_000, 1);
        let (_, v) = mean_var(&x);
        // The fourth moment is infinite at nu = 4, so no standard error exists.
        assert!((v - 2.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn t3_mean() {
        let x = sample_t(dof(3.0), 1_000_000, 2);
        let (m, v) = mean_var(&x);
        assert!(m.abs() < 3.0 * (v / x.len() as f64).sqrt());
    }

    #[test]
    fn t4_cdf_consistency() {
        let n = 1_000_000;
        let x = sample_t(dof(4.0), n, 3);
        let q = t_quantile(prob(0.025), dof(4.0)).unwrap();
        let frac = x.iter().filter(|&&v| v < q).count() as f64 / n as f64;
        assert!((frac - 0.025).abs() < 3.0 * (0.025 * 0.975 / n as f64).sqrt(), "{frac}");
    }

    #[test]
    fn mvt_identity_covariance() {
        let n = 1_000_000;
        let spec = MultivariateTSpec::centered(vec![vec![1.0, 0.0], vec![0.0, 1.0]], dof(5.0)).unwrap();
        let draws = sample_mvt(&spec, n, 4);
        let x: Vec<f64> = draws.iter().map(|d| d[0]).collect();
        let y: Vec<f64> = draws.iter().map(|d| d[1]).collect();
        let prod: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
        let (c, vc) = mean_var(&prod);
        assert!(c.abs() < 3.0 * (vc / n as f64).sqrt(), "{c}");
        let (_, vx) = mean_var(&x);
        assert!((vx - 5.0 / 3.0).abs() < 0.02, "{vx}");
        assert_eq!(spec.covariance().unwrap()[0][0], 5.0 / 3.0);
    }

    #[test]
    fn mvt_linear_closure() {
        let n = 100_000;
        let a = vec![vec![1.0, 0.0, 0.0], vec![0.5, 0.8, 0.0], vec![-0.3, 0.2, 0.6]];
        for nu in [3.0, 5.0] {
            let spec = MultivariateTSpec::centered(a.clone(), dof(nu)).unwrap();
            let mut rng = stream_rng(99, 0);
            let w = uniform_simplex_point(&mut rng, 3);
            let aw: Vec<f64> = (0..3).map(|k| (0..3).map(|i| w[i] * a[i][k]).sum()).collect();
            let scale = aw.iter().map(|v| v * v).sum::<f64>().sqrt();
            let sums: Vec<f64> = sample_mvt(&spec, n, 10)
                .iter()
                .map(|d| d.iter().zip(&w).map(|(x, wi)| x * wi).sum::<f64>() / scale)
                .collect();
            let reference = sample_t(dof(nu), n, 20);
            let d = ks_statistic(&sums, &reference);
            assert!(d < ks_critical_value(n, n, 0.01), "nu {nu}: {d}");
        }
    }

    #[test]
    fn ks_detects_shift() {
        let a = sample_gaussian(20_000, 1);
        let b: Vec<f64> = sample_gaussian(20_000, 2).iter().map(|v| v + 0.1).collect();
        assert!(ks_statistic(&a, &b) > ks_critical_value(20_000, 20_000, 0.01));
        assert!((ks_critical_value(100, 100, 0.01) - 1.6276 * 0.02f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn empirical_tail_small_cases() {
        let x = vec![0.3; 10_000];
        let e = empirical_tail(&x, prob(0.025)).unwrap();
        assert_eq!(e.var_hat, -0.3);
        assert_eq!(e.cvar_hat, -0.3);
        assert_eq!(e.standard_error, 0.0);

        let x: Vec<f64> = (1..=1000).map(f64::from).collect();
        let e = empirical_tail(&x, prob(0.1)).unwrap();
        assert_eq!(e.var_hat, -100.0);
        assert_eq!(e.cvar_hat, -50.5);

        let err = empirical_tail(&x, prob(0.05)).unwrap_err();
        assert!(matches!(err, Error::InsufficientTail { .. }));
    }

    #[test]
    fn gaussian_var_bracket() {
        let e = empirical_psi(Distribution::Gaussian, prob(0.025), 10_000_000, 8).unwrap();
        assert!(e.cvar_hat >= e.var_hat);
        assert!((e.var_hat - 1.95996).abs() < 3.0 * e.var_standard_error, "{e:?}");
        assert!(e.var_standard_error > 1e-4 && e.var_standard_error < 3e-3);
    }

    #[test]
    fn random_search_single_asset() {
        let cov = Covariance::new(vec![vec![0.01]]).unwrap();
        let p = PortfolioProblem::with_psi(vec![0.02], cov, 2.0).unwrap();
        let r = random_portfolio_search(&p, 10, 1, false).unwrap();
        assert_eq!(r.weights.as_slice(), &[1.0]);
    }

    #[test]
    fn random_search_symmetric_pair() {
        let cov = Covariance::new(vec![vec![0.04, 0.01], vec![0.01, 0.04]]).unwrap();
        let spec = RiskSpec::gaussian(Measure::VaR);
        let p = PortfolioProblem::new(vec![0.05, 0.05], cov, spec, prob(0.025)).unwrap();
        let r = random_portfolio_search(&p, 100_000, 3, false).unwrap();
        assert!((r.weights.as_slice()[0] - 0.5).abs() < 0.02);
        let polished = random_portfolio_search(&p, 1000, 3, true).unwrap();
        assert!(polished.converged);
        assert!((polished.weights.as_slice()[0] - 0.5).abs() < 1e-8);
        assert_eq!(r, random_portfolio_search(&p, 100_000, 3, false).unwrap());
    }
}
