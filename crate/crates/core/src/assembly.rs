//! Ansatz evaluation and Galerkin assembly.
//!
//! The Galerkin vector at time level `t` is
//!
//! ```text
//! G_i(C) = ∫_D R(x, t; C) φ_i(x) dx,    R = Λ[M̃] + Υ[M̃] + g
//! ```
//!
//! assembled generically from the problem's pointwise residual. Its root in
//! `C` is the Galerkin approximation at `t`. Writing `G(C) = -F + K·C +
//! (higher order)`, the linear-part system `K·C = F` supplies the Newton
//! starting point.

use crate::error::{OafmError, Result};
use crate::pde_core::{AnsatzEval, CoefficientVector, Matrix, ProblemSpec, QuadratureRule};

/// `K` and `F` of the linear-part system `K·C = F`.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinLinearSystem {
    pub k: Matrix,
    pub f: Vec<f64>,
}

fn check_coefficients(problem: &ProblemSpec, c: &CoefficientVector) -> Result<()> {
    if c.len() != problem.n() {
        return Err(OafmError::DimensionMismatch {
            expected: problem.n(),
            got: c.len(),
        });
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(OafmError::InvalidTime { t })
    }
}

/// `M̃ = M0 + t·Σ c_j φ_j` and its derivatives at `(x, t)`.
pub fn eval_ansatz(
    problem: &ProblemSpec,
    c: &CoefficientVector,
    x: f64,
    t: f64,
) -> Result<AnsatzEval> {
    problem.domain().check(x)?;
    check_time(t)?;
    check_coefficients(problem, c)?;
    Ok(eval_unchecked(problem, c.as_slice(), x, t))
}

fn eval_unchecked(problem: &ProblemSpec, c: &[f64], x: f64, t: f64) -> AnsatzEval {
    let (mut s, mut s_dx, mut s_dxx) = (0.0, 0.0, 0.0);
    for (cj, phi) in c.iter().zip(problem.basis()) {
        if *cj != 0.0 {
            s += cj * phi.value(x);
            s_dx += cj * phi.dx(x);
            s_dxx += cj * phi.dxx(x);
        }
    }
    let m0 = problem.initial();
    AnsatzEval {
        value: m0.value(x) + t * s,
        dt: s,
        dx: m0.dx(x) + t * s_dx,
        dxx: m0.dxx(x) + t * s_dxx,
        dxxt: s_dxx,
    }
}

/// `R(x, t)` for the ansatz with coefficients `c`.
pub fn pointwise_residual(
    problem: &ProblemSpec,
    c: &CoefficientVector,
    x: f64,
    t: f64,
) -> Result<f64> {
    let e = eval_ansatz(problem, c, x, t)?;
    problem.pde_residual(&e, x, t)
}

/// `G_i = ∫ R φ_i dx` for every coordinate function.
pub fn galerkin_vector(
    problem: &ProblemSpec,
    c: &CoefficientVector,
    t: f64,
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    check_time(t)?;
    check_coefficients(problem, c)?;
    galerkin_raw(problem, c.as_slice(), t, rule)
}

pub(crate) fn galerkin_raw(
    problem: &ProblemSpec,
    c: &[f64],
    t: f64,
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    let mut g = vec![0.0; problem.n()];
    for (x, w) in rule.iter() {
        let e = eval_unchecked(problem, c, x, t);
        let r = problem.pde_residual(&e, x, t)?;
        if !r.is_finite() {
            return Err(OafmError::NonFiniteIntegrand { x });
        }
        for (gi, phi) in g.iter_mut().zip(problem.basis()) {
            let term = w * r * phi.value(x);
            if !term.is_finite() {
                return Err(OafmError::NonFiniteIntegrand { x });
            }
            *gi += term;
        }
    }
    Ok(g)
}

/// Central-difference Jacobian of the Galerkin vector with per-column step
/// `h·(1 + |c_j|)`.
pub fn central_difference_jacobian(
    problem: &ProblemSpec,
    c: &[f64],
    t: f64,
    rule: &QuadratureRule,
    h: f64,
) -> Result<Matrix> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(OafmError::InvalidParameter(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let n = problem.n();
    let mut jac = Matrix::zeros(n);
    let mut probe = c.to_vec();
    for j in 0..n {
        let hj = h * (1.0 + c[j].abs());
        probe[j] = c[j] + hj;
        let plus = galerkin_raw(problem, &probe, t, rule)?;
        probe[j] = c[j] - hj;
        let minus = galerkin_raw(problem, &probe, t, rule)?;
        probe[j] = c[j];
        let col: Vec<f64> = plus
            .iter()
            .zip(&minus)
            .map(|(p, m)| (p - m) / (2.0 * hj))
            .collect();
        jac.set_column(j, &col);
    }
    Ok(jac)
}

/// `K = ∂G/∂C` and `F = -G` at `C = 0`.
///
/// For quadratic problems a unit central-difference step is exact; other
/// problems use a small step.
pub fn linear_init_system(
    problem: &ProblemSpec,
    t: f64,
    rule: &QuadratureRule,
) -> Result<GalerkinLinearSystem> {
    check_time(t)?;
    let zero = vec![0.0; problem.n()];
    let h = if problem.is_quadratic() { 1.0 } else { 1e-6 };
    let k = central_difference_jacobian(problem, &zero, t, rule, h)?;
    let f = galerkin_raw(problem, &zero, t, rule)?
        .into_iter()
        .map(|g| -g)
        .collect();
    Ok(GalerkinLinearSystem { k, f })
}

/// Exact decomposition `G(C) = g0 + K·C + Q(C, C)` of a Galerkin vector that
/// is quadratic in the coefficients, recovered by polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub g0: Vec<f64>,
    pub k: Matrix,
    /// `q[i]` is the symmetric matrix of the bilinear form `Q_i`.
    pub q: Vec<Matrix>,
}

impl QuadraticForm {
    pub fn assemble(problem: &ProblemSpec, t: f64, rule: &QuadratureRule) -> Result<Self> {
        check_time(t)?;
        let n = problem.n();
        let g = |c: &[f64]| galerkin_raw(problem, c, t, rule);
        let unit = |j: usize, s: f64| {
            let mut v = vec![0.0; n];
            v[j] = s;
            v
        };
        let g0 = g(&vec![0.0; n])?;
        let mut plus = Vec::with_capacity(n);
        let mut minus = Vec::with_capacity(n);
        for j in 0..n {
            plus.push(g(&unit(j, 1.0))?);
            minus.push(g(&unit(j, -1.0))?);
        }
        let mut k = Matrix::zeros(n);
        let mut q = vec![Matrix::zeros(n); n];
        for j in 0..n {
            for i in 0..n {
                k[(i, j)] = 0.5 * (plus[j][i] - minus[j][i]);
                q[i][(j, j)] = 0.5 * (plus[j][i] + minus[j][i]) - g0[i];
            }
        }
        for j in 0..n {
            for l in j + 1..n {
                let mut c = vec![0.0; n];
                c[j] = 1.0;
                c[l] = 1.0;
                let both = g(&c)?;
                for i in 0..n {
                    let v = 0.5 * (both[i] - plus[j][i] - plus[l][i] + g0[i]);
                    q[i][(j, l)] = v;
                    q[i][(l, j)] = v;
                }
            }
        }
        Ok(Self { g0, k, q })
    }

    pub fn n(&self) -> usize {
        self.g0.len()
    }

    /// `Q(u, v)` componentwise.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        self.q
            .iter()
            .map(|qi| qi.mul_vec(v).iter().zip(u).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn eval(&self, c: &[f64]) -> Vec<f64> {
        let kc = self.k.mul_vec(c);
        let qc = self.bilinear(c, c);
        (0..self.n()).map(|i| self.g0[i] + kc[i] + qc[i]).collect()
    }

    /// `J(C) = K + 2·Q(C, ·)`.
    pub fn jacobian(&self, c: &[f64]) -> Matrix {
        let n = self.n();
        let mut jac = self.k.clone();
        for i in 0..n {
            let qc = self.q[i].mul_vec(c);
            for j in 0..n {
                jac[(i, j)] += 2.0 * qc[j];
            }
        }
        jac
    }

    pub fn linear_system(&self) -> GalerkinLinearSystem {
        GalerkinLinearSystem {
            k: self.k.clone(),
            f: self.g0.iter().map(|g| -g).collect(),
        }
    }
}
