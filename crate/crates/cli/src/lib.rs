//! The `tailrisk` command line: loss-multiplier tables, loss curves,
//! portfolio optimization, frontier sampling and Monte Carlo verification.
//!
//! Machine output goes to stdout as CSV or JSON with fixed column order and
//! field names; numbers use the shortest representation that round-trips.
//! Diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 file I/O, 2 input validation, 3 solver
//! non-convergence, 4 verification failure.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Value, json};
use tailrisk::mc_oracle::{empirical_tail, random_portfolio_search, sample_unit_variance};
use tailrisk::portfolio::{default_frontier_grid, frontier};
use tailrisk::{Distribution, Measure, PortfolioProblem, Probability, RiskSpec, SolverOptions, optimize, psi};

pub mod problem;

use problem::{ProblemFile, parse_distribution, parse_level, parse_measure};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Input(String),
    Core(tailrisk::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => EXIT_IO,
            Self::Input(_) => EXIT_INPUT,
            Self::Core(tailrisk::Error::NoConvergence { .. }) => EXIT_NOT_CONVERGED,
            Self::Core(_) => EXIT_INPUT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(m) | Self::Input(m) => f.write_str(m),
            Self::Core(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tailrisk::Error> for CliError {
    fn from(e: tailrisk::Error) -> Self {
        Self::Core(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "tailrisk", version, about = "Gaussian and Student-T VaR/CVaR multipliers and portfolio optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Loss multipliers psi(u) for each distribution, measure and tail level.
    PsiTable(TableArgs),
    /// psi_var and psi_cvar against x, where u = 10^-x.
    LossCurves(CurveArgs),
    /// Minimize the risk objective of a problem file at each tail level.
    Optimize(OptimizeArgs),
    /// Optima at u = 10^-x for the problem's spec and a Gaussian VaR baseline.
    Frontier(FrontierArgs),
    /// Monte Carlo cross-checks of the multipliers and the optimizer.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Comma-separated degrees of freedom; "gaussian" for the normal model.
    #[arg(long, value_delimiter = ',')]
    nu: Vec<String>,
    /// "var" or "cvar"; both when omitted.
    #[arg(long)]
    measure: Option<String>,
    /// Comma-separated tail levels.
    #[arg(long, value_delimiter = ',')]
    u: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(long, value_delimiter = ',', default_value = "gaussian,4,2.25")]
    nu: Vec<String>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    x_from: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    x_to: f64,
    #[arg(long, default_value_t = 0.1)]
    x_step: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct SpecOverrides {
    /// Replaces the problem's degrees of freedom.
    #[arg(long)]
    nu: Option<String>,
    /// Replaces the problem's risk measure.
    #[arg(long)]
    measure: Option<String>,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    problem: PathBuf,
    /// Replaces the problem's tail levels.
    #[arg(long, value_delimiter = ',')]
    u: Vec<f64>,
    #[command(flatten)]
    overrides: SpecOverrides,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct FrontierArgs {
    problem: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    x_from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x_to: Option<f64>,
    #[arg(long)]
    x_step: Option<f64>,
    #[command(flatten)]
    overrides: SpecOverrides,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    problem: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    overrides: SpecOverrides,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// Text for stdout plus the exit status it should carry.
struct Outcome {
    text: String,
    code: i32,
    note: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self {
            text,
            code: EXIT_OK,
            note: None,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    let result = match cli.command {
        Command::PsiTable(a) => psi_table(&a),
        Command::LossCurves(a) => loss_curves(&a),
        Command::Optimize(a) => cmd_optimize(&a),
        Command::Frontier(a) => cmd_frontier(&a),
        Command::Verify(a) => cmd_verify(&a),
    };
    match result {
        Ok(outcome) => {
            if let Err(e) = out.write_all(outcome.text.as_bytes()) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_IO;
            }
            if let Some(note) = outcome.note {
                let _ = writeln!(err, "{note}");
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

const GAUSSIAN_LEVELS: [f64; 5] = [0.1, 0.025, 0.01, 1e-4, 1e-6];
const STUDENT_T_LEVELS: [f64; 4] = [0.025, 0.01, 1e-3, 1e-4];
const STUDENT_T_NU: [f64; 6] = [6.0, 5.0, 4.0, 3.0, 2.5, 2.25];

fn nu_label(d: Distribution) -> String {
    d.nu().map_or_else(|| "inf".to_string(), |nu| nu.to_string())
}

fn family_label(d: Distribution) -> &'static str {
    match d {
        Distribution::Gaussian => "gaussian",
        Distribution::StudentT(_) => "student-t",
    }
}

fn nu_json(d: Distribution) -> Value {
    d.nu().map_or(Value::Null, |nu| json!(nu))
}

fn parse_distributions(tokens: &[String]) -> Result<Vec<Distribution>, CliError> {
    tokens.iter().map(|t| parse_distribution(t)).collect()
}

fn parse_levels(values: &[f64]) -> Result<Vec<Probability>, CliError> {
    values.iter().map(|&u| parse_level(u)).collect()
}

fn measures(choice: &Option<String>) -> Result<Vec<Measure>, CliError> {
    match choice {
        None => Ok(vec![Measure::VaR, Measure::CVaR]),
        Some(m) => Ok(vec![parse_measure(m)?]),
    }
}

/// Shortest round-trip text; exponent form for very small or large values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn csv(header: &str, rows: &[Vec<String>]) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn psi_table(a: &TableArgs) -> Result<Outcome, CliError> {
    let dists = if a.nu.is_empty() {
        std::iter::once(Ok(Distribution::Gaussian))
            .chain(STUDENT_T_NU.iter().map(|&nu| Distribution::student_t(nu)))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        parse_distributions(&a.nu)?
    };
    let custom_levels = parse_levels(&a.u)?;
    let measures = measures(&a.measure)?;

    let mut rows = Vec::new();
    for &dist in &dists {
        let levels = if !custom_levels.is_empty() {
            custom_levels.clone()
        } else if dist == Distribution::Gaussian {
            parse_levels(&GAUSSIAN_LEVELS)?
        } else {
            parse_levels(&STUDENT_T_LEVELS)?
        };
        for &measure in &measures {
            let spec = RiskSpec::new(dist, measure)?;
            for &u in &levels {
                rows.push((dist, measure, u.get(), psi(spec, u)?));
            }
        }
    }

    let text = match a.format {
        Format::Csv => csv(
            "distribution,nu,measure,u,psi",
            &rows
                .iter()
                .map(|&(d, m, u, p)| {
                    vec![family_label(d).into(), nu_label(d), m.to_string(), num(u), num(p)]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Json => json_text(&Value::Array(
            rows.iter()
                .map(|&(d, m, u, p)| {
                    json!({"distribution": family_label(d), "nu": nu_json(d), "measure": m.to_string(), "u": u, "psi": p})
                })
                .collect(),
        )),
    };
    Ok(Outcome::ok(text))
}

/// `from, from + step, ..., <= to`, rounded to 12 decimals.
fn x_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && from.is_finite() && to.is_finite() && to >= from) {
        return Err(CliError::Input(format!(
            "x range needs x_from <= x_to and x_step > 0, got {from}..{to} step {step}"
        )));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(CliError::Input(format!("x range has {count} points, at most 1000000 allowed")));
    }
    Ok((0..count)
        .map(|i| ((from + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn level_from_x(x: f64) -> Result<Probability, CliError> {
    parse_level(10f64.powf(-x)).map_err(|_| CliError::Input(format!("x = {x} gives u = 10^-x outside (0, 1/2)")))
}

fn loss_curves(a: &CurveArgs) -> Result<Outcome, CliError> {
    let dists = parse_distributions(&a.nu)?;
    let xs = x_grid(a.x_from, a.x_to, a.x_step)?;
    let levels = xs.iter().map(|&x| level_from_x(x)).collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    for &d in &dists {
        let var = RiskSpec::new(d, Measure::VaR)?;
        let cvar = RiskSpec::new(d, Measure::CVaR)?;
        for (&x, &u) in xs.iter().zip(&levels) {
            rows.push((x, d, psi(var, u)?, psi(cvar, u)?));
        }
    }
    let text = match a.format {
        Format::Csv => csv(
            "x,distribution,nu,psi_var,psi_cvar",
            &rows
                .iter()
                .map(|&(x, d, v, c)| vec![num(x), family_label(d).into(), nu_label(d), num(v), num(c)])
                .collect::<Vec<_>>(),
        ),
        Format::Json => json_text(&Value::Array(
            rows.iter()
                .map(|&(x, d, v, c)| {
                    json!({"x": x, "distribution": family_label(d), "nu": nu_json(d), "psi_var": v, "psi_cvar": c})
                })
                .collect(),
        )),
    };
    Ok(Outcome::ok(text))
}

fn load(path: &std::path::Path, overrides: &SpecOverrides) -> Result<ProblemFile, CliError> {
    let mut p = ProblemFile::read(path)?;
    let dist = match &overrides.nu {
        Some(t) => parse_distribution(t)?,
        None => p.spec.distribution(),
    };
    let measure = match &overrides.measure {
        Some(m) => parse_measure(m)?,
        None => p.spec.measure(),
    };
    p.spec = RiskSpec::new(dist, measure)?;
    Ok(p)
}

fn not_converged_note(count: usize) -> Option<String> {
    (count > 0).then(|| format!("error: {count} optimization(s) did not converge"))
}

fn cmd_optimize(a: &OptimizeArgs) -> Result<Outcome, CliError> {
    let p = load(&a.problem, &a.overrides)?;
    let levels = if a.u.is_empty() { p.tail_levels.clone() } else { parse_levels(&a.u)? };
    let opts = SolverOptions::default();
    let mut results = Vec::new();
    for &u in &levels {
        let problem = PortfolioProblem::new(p.returns.clone(), p.covariance.clone(), p.spec, u)?;
        let r = optimize(&problem, &opts)?;
        results.push((u.get(), problem.psi(), r));
    }
    let failures = results.iter().filter(|(_, _, r)| !r.converged).count();
    let dist = p.spec.distribution();

    let text = match a.format {
        Format::Json => json_text(&json!({
            "distribution": family_label(dist),
            "nu": nu_json(dist),
            "measure": p.spec.measure().to_string(),
            "results": results.iter().map(|(u, psi, r)| json!({
                "u": u,
                "psi": psi,
                "weights": r.weights.as_slice(),
                "expected_return": r.expected_return,
                "variance": r.variance,
                "risk": r.risk,
                "kkt_residual": r.kkt_residual,
                "iterations": r.iterations,
                "converged": r.converged,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let n = p.returns.len();
            let header = format!(
                "u,psi,{},expected_return,variance,risk,kkt_residual,iterations,converged",
                weight_columns(n)
            );
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|(u, psi, r)| {
                    let mut row = vec![num(*u), num(*psi)];
                    row.extend(r.weights.as_slice().iter().map(|&w| num(w)));
                    row.extend([
                        num(r.expected_return),
                        num(r.variance),
                        num(r.risk),
                        num(r.kkt_residual),
                        r.iterations.to_string(),
                        r.converged.to_string(),
                    ]);
                    row
                })
                .collect();
            csv(&header, &rows)
        }
    };
    Ok(Outcome {
        text,
        code: if failures > 0 { EXIT_NOT_CONVERGED } else { EXIT_OK },
        note: not_converged_note(failures),
    })
}

fn weight_columns(n: usize) -> String {
    (1..=n).map(|i| format!("w_{i}")).collect::<Vec<_>>().join(",")
}

fn cmd_frontier(a: &FrontierArgs) -> Result<Outcome, CliError> {
    let p = load(&a.problem, &a.overrides)?;
    let xs = match (a.x_from, a.x_to, a.x_step) {
        (None, None, None) => default_frontier_grid(),
        (from, to, step) => x_grid(from.unwrap_or(1.0), to.unwrap_or(5.0), step.unwrap_or(0.5))?,
    };
    for &x in &xs {
        level_from_x(x)?;
    }
    let opts = SolverOptions::default();
    let anchor = p.tail_levels[0];
    let series = [("problem", p.spec), ("baseline", RiskSpec::gaussian(Measure::VaR))];

    let mut rows = Vec::new();
    for (name, spec) in series {
        let problem = PortfolioProblem::new(p.returns.clone(), p.covariance.clone(), spec, anchor)?;
        for pt in frontier(&problem, &xs, &opts)? {
            let r = pt.result?;
            rows.push((name, spec, pt.x, pt.u, pt.psi, r));
        }
    }
    let failures = rows.iter().filter(|row| !row.5.converged).count();

    let text = match a.format {
        Format::Csv => {
            let header = format!(
                "series,distribution,nu,measure,x,u,psi,{},expected_return,variance,risk,converged",
                weight_columns(p.returns.len())
            );
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(name, spec, x, u, psi, r)| {
                    let d = spec.distribution();
                    let mut row = vec![
                        name.to_string(),
                        family_label(d).into(),
                        nu_label(d),
                        spec.measure().to_string(),
                        num(*x),
                        num(*u),
                        num(*psi),
                    ];
                    row.extend(r.weights.as_slice().iter().map(|&w| num(w)));
                    row.extend([
                        num(r.expected_return),
                        num(r.variance),
                        num(r.risk),
                        r.converged.to_string(),
                    ]);
                    row
                })
                .collect();
            csv(&header, &body)
        }
        Format::Json => json_text(&Value::Array(
            rows.iter()
                .map(|(name, spec, x, u, psi, r)| {
                    let d = spec.distribution();
                    json!({
                        "series": name,
                        "distribution": family_label(d),
                        "nu": nu_json(d),
                        "measure": spec.measure().to_string(),
                        "x": x,
                        "u": u,
                        "psi": psi,
                        "weights": r.weights.as_slice(),
                        "expected_return": r.expected_return,
                        "variance": r.variance,
                        "risk": r.risk,
                        "converged": r.converged,
                    })
                })
                .collect(),
        )),
    };
    Ok(Outcome {
        text,
        code: if failures > 0 { EXIT_NOT_CONVERGED } else { EXIT_OK },
        note: not_converged_note(failures),
    })
}

/// Smallest sample count accepted by `verify`.
pub const MIN_VERIFY_SAMPLES: usize = 10_000;
/// Objective agreement required between the optimizer and random search.
pub const RANDOM_SEARCH_TOLERANCE: f64 = 1e-3;

struct Check {
    name: &'static str,
    u: f64,
    expected: f64,
    observed: f64,
    standard_error: Option<f64>,
    tolerance: f64,
}

impl Check {
    fn discrepancy(&self) -> f64 {
        (self.observed - self.expected).abs()
    }

    fn pass(&self) -> bool {
        self.discrepancy() <= self.tolerance
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let p = load(&a.problem, &a.overrides)?;
    let n = a.samples;
    for u in &p.tail_levels {
        let tail_points = n as f64 * u.get();
        if tail_points < tailrisk::mc_oracle::MIN_TAIL_POINTS {
            return Err(tailrisk::Error::InsufficientTail { tail_points }.into());
        }
    }
    if n < MIN_VERIFY_SAMPLES {
        return Err(CliError::Input(format!("verify needs at least {MIN_VERIFY_SAMPLES} samples, got {n}")));
    }

    let dist = p.spec.distribution();
    let draws = sample_unit_variance(dist, n, a.seed)?;
    let mut checks = Vec::new();
    for &u in &p.tail_levels {
        let est = empirical_tail(&draws, u)?;
        checks.push(Check {
            name: "psi_var",
            u: u.get(),
            expected: psi(RiskSpec::new(dist, Measure::VaR)?, u)?,
            observed: est.var_hat,
            standard_error: Some(est.var_standard_error),
            tolerance: 3.0 * est.var_standard_error,
        });
        checks.push(Check {
            name: "psi_cvar",
            u: u.get(),
            expected: psi(RiskSpec::new(dist, Measure::CVaR)?, u)?,
            observed: est.cvar_hat,
            standard_error: Some(est.standard_error),
            tolerance: 3.0 * est.standard_error,
        });
        let problem = PortfolioProblem::new(p.returns.clone(), p.covariance.clone(), p.spec, u)?;
        let opt = optimize(&problem, &SolverOptions::default())?;
        let search = random_portfolio_search(&problem, n, a.seed, false)?;
        checks.push(Check {
            name: "random_portfolio",
            u: u.get(),
            expected: opt.risk,
            observed: search.risk,
            standard_error: None,
            tolerance: RANDOM_SEARCH_TOLERANCE,
        });
    }
    let failures = checks.iter().filter(|c| !c.pass()).count();

    let text = match a.format {
        Format::Json => json_text(&json!({
            "distribution": family_label(dist),
            "nu": nu_json(dist),
            "measure": p.spec.measure().to_string(),
            "samples": n,
            "seed": a.seed,
            "checks": checks.iter().map(|c| json!({
                "check": c.name,
                "u": c.u,
                "expected": c.expected,
                "observed": c.observed,
                "standard_error": c.standard_error,
                "discrepancy": c.discrepancy(),
                "tolerance": c.tolerance,
                "pass": c.pass(),
            })).collect::<Vec<_>>(),
            "pass": failures == 0,
        })),
        Format::Csv => csv(
            "check,u,expected,observed,standard_error,discrepancy,tolerance,pass",
            &checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.into(),
                        num(c.u),
                        num(c.expected),
                        num(c.observed),
                        c.standard_error.map_or_else(String::new, num),
                        num(c.discrepancy()),
                        num(c.tolerance),
                        c.pass().to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Outcome {
        text,
        code: if failures > 0 { EXIT_VERIFY_FAILED } else { EXIT_OK },
        note: (failures > 0).then(|| format!("error: {failures} verification check(s) failed")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = x_grid(1.0, 6.0, 0.1).unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g[2], 1.2);
        assert_eq!(*g.last().unwrap(), 6.0);
        assert_eq!(x_grid(1.0, 5.0, 0.5).unwrap(), default_frontier_grid());
        assert!(x_grid(2.0, 1.0, 0.1).is_err());
        assert!(x_grid(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn level_bounds() {
        assert!(level_from_x(0.2).is_err());
        assert!((level_from_x(2.0).unwrap().get() - 0.01).abs() < 1e-18);
    }
}
