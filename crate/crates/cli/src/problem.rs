//! Problem files.
//!
//! ```toml
//! returns = [0.08, 0.05, 0.03]
//! covariance = [[0.04, 0.0085, 0.006], [0.0085, 0.02, 0.0042], [0.006, 0.0042, 0.01]]
//!
//! [spec]
//! nu = 3              # or "gaussian"
//! measure = "cvar"    # or "var"
//! tail_levels = [1e-4]
//! ```

use serde::Deserialize;
use tailrisk::linalg::Covariance;
use tailrisk::{Distribution, Measure, Probability, RiskSpec};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    returns: Vec<f64>,
    covariance: Vec<Vec<f64>>,
    spec: RawSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    nu: RawNu,
    measure: String,
    tail_levels: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawNu {
    Number(f64),
    Token(String),
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub returns: Vec<f64>,
    pub covariance: Covariance,
    pub spec: RiskSpec,
    pub tail_levels: Vec<Probability>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawProblem = toml::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
        let distribution = match raw.spec.nu {
            RawNu::Number(nu) => Distribution::student_t(nu)?,
            RawNu::Token(t) => parse_distribution(&t)?,
        };
        let spec = RiskSpec::new(distribution, parse_measure(&raw.spec.measure)?)?;
        if raw.spec.tail_levels.is_empty() {
            return Err(CliError::Input("spec.tail_levels is empty".into()));
        }
        let tail_levels = raw
            .spec
            .tail_levels
            .into_iter()
            .map(parse_level)
            .collect::<Result<_, _>>()?;
        let covariance = Covariance::new(raw.covariance)?;
        if raw.returns.len() != covariance.dim() {
            return Err(CliError::Input(format!(
                "{} returns but a {}x{} covariance matrix",
                raw.returns.len(),
                covariance.dim(),
                covariance.dim()
            )));
        }
        Ok(Self {
            returns: raw.returns,
            covariance,
            spec,
            tail_levels,
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// `gaussian` or a positive number of degrees of freedom.
pub fn parse_distribution(token: &str) -> Result<Distribution, CliError> {
    let token = token.trim();
    if token.eq_ignore_ascii_case("gaussian") {
        return Ok(Distribution::Gaussian);
    }
    let nu: f64 = token
        .parse()
        .map_err(|_| CliError::Input(format!("degrees of freedom must be a number or \"gaussian\", got {token:?}")))?;
    Ok(Distribution::student_t(nu)?)
}

/// A loss-tail level, `0 < u < 1/2`.
pub fn parse_level(u: f64) -> Result<Probability, CliError> {
    if !(u > 0.0 && u < 0.5) {
        return Err(CliError::Input(format!("tail level must satisfy 0 < u < 1/2, got {u}")));
    }
    Ok(Probability::new(u)?)
}

pub fn parse_measure(token: &str) -> Result<Measure, CliError> {
    match token.trim().to_ascii_lowercase().as_str() {
        "var" => Ok(Measure::VaR),
        "cvar" => Ok(Measure::CVaR),
        other => Err(CliError::Input(format!("measure must be \"var\" or \"cvar\", got {other:?}"))),
    }
}
