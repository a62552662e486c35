//! Root finding for the Galerkin conditions `G(C; t) = 0`.
//!
//! The linear part `K·C = F` gives the starting point; Newton's method
//! refines it. If the residual grows on two consecutive Newton steps the
//! solver falls back to a frozen-coupling fixed-point iteration.

use crate::assembly::{
    central_difference_jacobian, galerkin_raw, linear_init_system, GalerkinLinearSystem,
    QuadraticForm,
};
use crate::error::{OafmError, Result};
use crate::pde_core::{
    inf_norm, CoefficientVector, JacobianKind, Matrix, ProblemSpec, QuadratureRule, SolveConfig,
    SolveReport,
};
use crate::quadrature::rule_for;

const SINGULAR_PIVOT_RATIO: f64 = 1e-14;
const FIXED_POINT_ITERATIONS: usize = 100;

/// Solves `k·c = f` by Gaussian elimination with partial pivoting.
pub fn linear_solve(k: &Matrix, f: &[f64]) -> Result<Vec<f64>> {
    let n = k.dim();
    if f.len() != n {
        return Err(OafmError::DimensionMismatch {
            expected: n,
            got: f.len(),
        });
    }
    if !k.is_finite() || f.iter().any(|v| !v.is_finite()) {
        return Err(OafmError::InvalidParameter(
            "linear system has non-finite entries".into(),
        ));
    }
    let threshold = SINGULAR_PIVOT_RATIO * k.inf_norm();
    let mut a = k.clone();
    let mut b = f.to_vec();
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a[(r, col)]))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .expect("non-empty range");
        if pivot.abs() < threshold || pivot == 0.0 {
            return Err(OafmError::SingularMatrix { column: col, pivot });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = tmp;
            }
            b.swap(col, pivot_row);
        }
        for r in col + 1..n {
            let factor = a[(r, col)] / a[(col, col)];
            if factor == 0.0 {
                continue;
            }
            a[(r, col)] = 0.0;
            for j in col + 1..n {
                a[(r, j)] -= factor * a[(col, j)];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let tail: f64 = (i + 1..n).map(|j| a[(i, j)] * x[j]).sum();
        x[i] = (b[i] - tail) / a[(i, i)];
    }
    Ok(x)
}

/// Central-difference Jacobian of the Galerkin vector at `c`, column step
/// `h·(1 + |c_j|)`.
pub fn numeric_jacobian(
    problem: &ProblemSpec,
    c: &CoefficientVector,
    t: f64,
    rule: &QuadratureRule,
    h: f64,
) -> Result<Matrix> {
    if c.len() != problem.n() {
        return Err(OafmError::DimensionMismatch {
            expected: problem.n(),
            got: c.len(),
        });
    }
    central_difference_jacobian(problem, c.as_slice(), t, rule, h)
}

/// Either the exact quadratic form or generic evaluation plus numeric
/// Jacobians.
enum Model<'a> {
    Quadratic(QuadraticForm),
    Generic {
        problem: &'a ProblemSpec,
        rule: QuadratureRule,
        t: f64,
        h: f64,
    },
}

impl Model<'_> {
    fn residual(&self, c: &[f64]) -> Result<Vec<f64>> {
        match self {
            Model::Quadratic(qf) => Ok(qf.eval(c)),
            Model::Generic {
                problem, rule, t, ..
            } => galerkin_raw(problem, c, *t, rule),
        }
    }

    fn jacobian(&self, c: &[f64]) -> Result<Matrix> {
        match self {
            Model::Quadratic(qf) => Ok(qf.jacobian(c)),
            Model::Generic {
                problem,
                rule,
                t,
                h,
            } => central_difference_jacobian(problem, c, *t, rule, *h),
        }
    }

    fn linear_system(&self) -> Result<GalerkinLinearSystem> {
        match self {
            Model::Quadratic(qf) => Ok(qf.linear_system()),
            Model::Generic {
                problem, rule, t, ..
            } => linear_init_system(problem, *t, rule),
        }
    }
}

struct Best {
    c: Vec<f64>,
    norm: f64,
}

impl Best {
    fn offer(&mut self, c: &[f64], norm: f64) {
        if norm < self.norm {
            self.c = c.to_vec();
            self.norm = norm;
        }
    }
}

/// Solves the Galerkin conditions at time level `t`.
pub fn solve_coefficients(
    problem: &ProblemSpec,
    t: f64,
    config: &SolveConfig,
) -> Result<SolveReport> {
    config.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(OafmError::InvalidTime { t });
    }
    let rule = rule_for(config.quad_order, problem.domain())?;
    let model = match config.jacobian {
        JacobianKind::Auto if problem.is_quadratic() => {
            Model::Quadratic(QuadraticForm::assemble(problem, t, &rule)?)
        }
        _ => Model::Generic {
            problem,
            rule,
            t,
            h: config.fd_step,
        },
    };
    let linear = model.linear_system()?;
    let mut c = linear_solve(&linear.k, &linear.f)?;
    let mut g = model.residual(&c)?;
    let mut norm = inf_norm(&g);
    let mut best = Best { c: c.clone(), norm };
    let mut iterations = 0;
    let mut growth = 0;
    let report = |c: Vec<f64>, norm: f64, iterations: usize, converged: bool| SolveReport {
        coefficients: CoefficientVector::from(c),
        residual_inf_norm: norm,
        iterations,
        converged,
    };

    while norm > config.newton_tol && iterations < config.max_iter {
        let jac = model.jacobian(&c)?;
        let minus_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let step = linear_solve(&jac, &minus_g)?;
        for (ci, si) in c.iter_mut().zip(&step) {
            *ci += si;
        }
        iterations += 1;
        g = model.residual(&c)?;
        let next = inf_norm(&g);
        if !next.is_finite() {
            break;
        }
        growth = if next > norm { growth + 1 } else { 0 };
        norm = next;
        best.offer(&c, norm);
        if growth >= 2 {
            break;
        }
    }
    if norm <= config.newton_tol {
        return Ok(report(c, norm, iterations, true));
    }

    // frozen-coupling fixed point: c ← A(c)⁻¹F with A(c) = K + (J(c) - K)/2,
    // which is K + Q(c, ·) for a quadratic residual
    let mut c = best.c.clone();
    for _ in 0..FIXED_POINT_ITERATIONS {
        let jac = model.jacobian(&c)?;
        let mut frozen = linear.k.clone();
        for i in 0..frozen.dim() {
            for j in 0..frozen.dim() {
                frozen[(i, j)] += 0.5 * (jac[(i, j)] - linear.k[(i, j)]);
            }
        }
        c = match linear_solve(&frozen, &linear.f) {
            Ok(next) => next,
            Err(_) => break,
        };
        iterations += 1;
        let g = model.residual(&c)?;
        let norm = inf_norm(&g);
        if !norm.is_finite() {
            break;
        }
        best.offer(&c, norm);
        if norm <= config.newton_tol {
            return Ok(report(c, norm, iterations, true));
        }
    }
    Err(OafmError::NoConvergence {
        best: Box::new(report(best.c, best.norm, iterations, false)),
    })
}
