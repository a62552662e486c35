//! Absolute errors, maximum absolute errors and temporal convergence rates.

use crate::assembly::eval_ansatz;
use crate::error::{OafmError, Result};
use crate::pde_core::{ProblemSpec, SolveConfig, SolveReport};
use crate::solver::solve_coefficients;

/// One `(x, t)` entry of an error table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTableRow {
    pub x: f64,
    pub t: f64,
    pub approx: f64,
    pub exact: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub t: f64,
    pub mae: f64,
    /// Absent on the first row of a sweep.
    pub rate: Option<f64>,
}

/// Which time level the coefficients are solved at.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CoefficientSchedule {
    /// Solve the Galerkin conditions separately at every evaluated `t`.
    #[default]
    PerTime,
    /// Solve once at the given time level and reuse those coefficients for
    /// every evaluated `t`.
    Frozen(f64),
}

pub fn absolute_error(exact: f64, approx: f64) -> f64 {
    (exact - approx).abs()
}

/// `log(e1/e2) / log(t1/t2)`.
pub fn convergence_rate(e1: f64, e2: f64, t1: f64, t2: f64) -> Result<f64> {
    let positive = |v: f64| v > 0.0 && v.is_finite();
    if !(positive(e1) && positive(e2)) {
        return Err(OafmError::RateDomain(format!(
            "errors must be positive, got {e1} and {e2}"
        )));
    }
    if !(positive(t1) && positive(t2)) {
        return Err(OafmError::RateDomain(format!(
            "time levels must be positive, got {t1} and {t2}"
        )));
    }
    if t1 == t2 {
        return Err(OafmError::RateDomain("time levels must differ".into()));
    }
    Ok((e1 / e2).ln() / (t1 / t2).ln())
}

/// Least-squares slope of `log(mae)` against `log(t)`.
pub fn loglog_slope(ts: &[f64], maes: &[f64]) -> Result<f64> {
    if ts.len() != maes.len() || ts.len() < 2 {
        return Err(OafmError::RateDomain(
            "need at least two (t, error) pairs".into(),
        ));
    }
    if ts.iter().chain(maes).any(|v| v.is_nan() || *v <= 0.0) {
        return Err(OafmError::RateDomain("all values must be positive".into()));
    }
    let lx: Vec<f64> = ts.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = maes.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(OafmError::RateDomain("time levels must differ".into()));
    }
    Ok(sxy / sxx)
}

fn annotate<T>(t: f64, r: Result<T>) -> Result<T> {
    r.map_err(|e| OafmError::AtTime {
        t,
        source: Box::new(e),
    })
}

fn check_grid(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(OafmError::InvalidParameter(format!("{name} grid is empty")));
    }
    Ok(())
}

/// Solves once per distinct fit time and evaluates the resulting ansatz.
struct Evaluator<'a> {
    problem: &'a ProblemSpec,
    config: &'a SolveConfig,
    schedule: CoefficientSchedule,
    frozen: Option<SolveReport>,
}

impl<'a> Evaluator<'a> {
    fn new(
        problem: &'a ProblemSpec,
        config: &'a SolveConfig,
        schedule: CoefficientSchedule,
    ) -> Result<Self> {
        let frozen = match schedule {
            CoefficientSchedule::PerTime => None,
            CoefficientSchedule::Frozen(tf) => {
                Some(annotate(tf, solve_coefficients(problem, tf, config))?)
            }
        };
        Ok(Self {
            problem,
            config,
            schedule,
            frozen,
        })
    }

    fn rows_at(&self, t: f64, xs: &[f64]) -> Result<Vec<ErrorTableRow>> {
        let exact = self
            .problem
            .exact()
            .ok_or_else(|| OafmError::MissingExactSolution(self.problem.name().into()))?;
        let owned;
        let report = match (&self.frozen, self.schedule) {
            (Some(r), _) => r,
            (None, _) => {
                owned = annotate(t, solve_coefficients(self.problem, t, self.config))?;
                &owned
            }
        };
        xs.iter()
            .map(|&x| {
                let approx =
                    annotate(t, eval_ansatz(self.problem, &report.coefficients, x, t))?.value;
                let ex = exact.value(x, t);
                Ok(ErrorTableRow {
                    x,
                    t,
                    approx,
                    exact: ex,
                    abs_error: absolute_error(ex, approx),
                })
            })
            .collect()
    }
}

/// One row per `(x, t)`, grouped by `t` in input order.
pub fn error_table(
    problem: &ProblemSpec,
    ts: &[f64],
    xs: &[f64],
    config: &SolveConfig,
) -> Result<Vec<ErrorTableRow>> {
    error_table_with(problem, ts, xs, config, CoefficientSchedule::PerTime)
}

pub fn error_table_with(
    problem: &ProblemSpec,
    ts: &[f64],
    xs: &[f64],
    config: &SolveConfig,
    schedule: CoefficientSchedule,
) -> Result<Vec<ErrorTableRow>> {
    check_grid("t", ts)?;
    check_grid("x", xs)?;
    if problem.exact().is_none() {
        return Err(OafmError::MissingExactSolution(problem.name().into()));
    }
    let eval = Evaluator::new(problem, config, schedule)?;
    let mut rows = Vec::with_capacity(ts.len() * xs.len());
    for &t in ts {
        rows.extend(eval.rows_at(t, xs)?);
    }
    Ok(rows)
}

/// Largest absolute error over `xs` at time level `t`.
pub fn max_absolute_error(
    problem: &ProblemSpec,
    t: f64,
    xs: &[f64],
    config: &SolveConfig,
) -> Result<f64> {
    max_absolute_error_with(problem, t, xs, config, CoefficientSchedule::PerTime)
}

pub fn max_absolute_error_with(
    problem: &ProblemSpec,
    t: f64,
    xs: &[f64],
    config: &SolveConfig,
    schedule: CoefficientSchedule,
) -> Result<f64> {
    let rows = error_table_with(problem, &[t], xs, config, schedule)?;
    Ok(rows.iter().map(|r| r.abs_error).fold(0.0, f64::max))
}

/// MAE per time level and the rate between consecutive levels.
pub fn convergence_table(
    problem: &ProblemSpec,
    ts: &[f64],
    xs: &[f64],
    config: &SolveConfig,
    schedule: CoefficientSchedule,
) -> Result<Vec<ConvergenceRow>> {
    if ts.len() < 2 {
        return Err(OafmError::InvalidParameter(
            "a convergence table needs at least two time levels".into(),
        ));
    }
    let rows = error_table_with(problem, ts, xs, config, schedule)?;
    let maes: Vec<f64> = rows
        .chunks(xs.len())
        .map(|chunk| chunk.iter().map(|r| r.abs_error).fold(0.0, f64::max))
        .collect();
    let mut out = Vec::with_capacity(ts.len());
    for (i, (&t, &mae)) in ts.iter().zip(&maes).enumerate() {
        let rate = if i == 0 {
            None
        } else {
            Some(annotate(
                t,
                convergence_rate(maes[i - 1], mae, ts[i - 1], t),
            )?)
        };
        out.push(ConvergenceRow { t, mae, rate });
    }
    Ok(out)
}
