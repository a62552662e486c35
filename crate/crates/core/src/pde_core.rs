//! Shared domain types: the spatial domain, problem description, ansatz
//! evaluations, coefficient vectors, quadrature rules and solver settings.
//!
//! A problem is posed as `Λ[M] + Υ[M] + g = 0` on a finite interval with an
//! initial condition. The first-order ansatz is
//!
//! ```text
//! M̃(x, t) = M0(x) + t · Σ_j C_j φ_j(x)
//! ```
//!
//! where `M0` is the initial approximation (time-independent for every
//! problem shipped here) and `φ_j` are the coordinate functions.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};
use std::sync::Arc;

use crate::error::{OafmError, Result};

/// Finite spatial interval `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceDomain {
    a: f64,
    b: f64,
}

impl SpaceDomain {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(OafmError::InvalidDomain { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(OafmError::OutOfDomain {
                x,
                a: self.a,
                b: self.b,
            })
        }
    }

    /// `points` equally spaced samples including both endpoints.
    pub fn linspace(&self, points: usize) -> Vec<f64> {
        match points {
            0 => Vec::new(),
            1 => vec![self.a],
            _ => {
                let h = self.length() / (points - 1) as f64;
                (0..points)
                    .map(|i| {
                        if i + 1 == points {
                            self.b
                        } else {
                            self.a + i as f64 * h
                        }
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for SpaceDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A spatial function together with its first two derivatives, all in
/// closed form.
#[derive(Clone)]
pub struct SmoothFn {
    value: ScalarFn,
    dx: ScalarFn,
    dxx: ScalarFn,
}

impl SmoothFn {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dx: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dxx: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            dx: Arc::new(dx),
            dxx: Arc::new(dxx),
        }
    }

    /// Builds the three callbacks from one function returning
    /// `(f, f', f'')`.
    pub fn from_jet(jet: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        let jet = Arc::new(jet);
        let (j0, j1, j2) = (jet.clone(), jet.clone(), jet);
        Self::new(move |x| j0(x)[0], move |x| j1(x)[1], move |x| j2(x)[2])
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn dx(&self, x: f64) -> f64 {
        (self.dx)(x)
    }

    pub fn dxx(&self, x: f64) -> f64 {
        (self.dxx)(x)
    }
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SmoothFn")
    }
}

/// The ansatz `M̃` and the partial derivatives any residual operator here
/// needs, at a single point `(x, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnsatzEval {
    pub value: f64,
    pub dt: f64,
    pub dx: f64,
    pub dxx: f64,
    /// Mixed derivative ∂³/∂x²∂t.
    pub dxxt: f64,
}

pub type ResidualFn = Arc<dyn Fn(&AnsatzEval, f64, f64) -> Result<f64> + Send + Sync>;

/// Closed-form reference solution with its derivative jet.
#[derive(Clone)]
pub struct ExactSolution {
    jet: Arc<dyn Fn(f64, f64) -> AnsatzEval + Send + Sync>,
}

impl ExactSolution {
    pub fn new(jet: impl Fn(f64, f64) -> AnsatzEval + Send + Sync + 'static) -> Self {
        Self { jet: Arc::new(jet) }
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        (self.jet)(x, t).value
    }

    pub fn jet(&self, x: f64, t: f64) -> AnsatzEval {
        (self.jet)(x, t)
    }
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ExactSolution")
    }
}

/// One benchmark PDE with its initial approximation, coordinate functions
/// and pointwise residual operator.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    name: String,
    domain: SpaceDomain,
    initial: SmoothFn,
    basis: Vec<SmoothFn>,
    residual: ResidualFnDebug,
    exact: Option<ExactSolution>,
    params: BTreeMap<String, f64>,
    quadratic: bool,
}

#[derive(Clone)]
struct ResidualFnDebug(ResidualFn);

impl fmt::Debug for ResidualFnDebug {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ResidualFn")
    }
}

impl ProblemSpec {
    pub fn new(
        name: impl Into<String>,
        domain: SpaceDomain,
        initial: SmoothFn,
        basis: Vec<SmoothFn>,
        residual: impl Fn(&AnsatzEval, f64, f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if basis.is_empty() {
            return Err(OafmError::InvalidParameter(
                "a problem needs at least one coordinate function".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            domain,
            initial,
            basis,
            residual: ResidualFnDebug(Arc::new(residual)),
            exact: None,
            params: BTreeMap::new(),
            quadratic: false,
        })
    }

    pub fn with_exact(mut self, exact: ExactSolution) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn with_param(mut self, key: impl Into<String>, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    /// Declares that the residual is at most quadratic in the coefficients,
    /// which enables the exact quadratic-form Jacobian.
    pub fn with_quadratic_nonlinearity(mut self, quadratic: bool) -> Self {
        self.quadratic = quadratic;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> SpaceDomain {
        self.domain
    }

    /// Number of coordinate functions.
    pub fn n(&self) -> usize {
        self.basis.len()
    }

    /// The initial approximation `M0`.
    pub fn initial(&self) -> &SmoothFn {
        &self.initial
    }

    pub fn basis(&self) -> &[SmoothFn] {
        &self.basis
    }

    pub fn exact(&self) -> Option<&ExactSolution> {
        self.exact.as_ref()
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn is_quadratic(&self) -> bool {
        self.quadratic
    }

    /// Evaluates `Λ[M̃] + Υ[M̃] + g` at `(x, t)` from an ansatz jet.
    pub fn pde_residual(&self, e: &AnsatzEval, x: f64, t: f64) -> Result<f64> {
        (self.residual.0)(e, x, t)
    }
}

/// Convergence-control parameters `C_1..C_n` at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector(Vec<f64>);

impl CoefficientVector {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if let Some(bad) = c.iter().find(|v| !v.is_finite()) {
            return Err(OafmError::InvalidParameter(format!(
                "coefficient {bad} is not finite"
            )));
        }
        Ok(Self(c))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// Unit vector `e_j` scaled by `scale`.
    pub fn unit(n: usize, j: usize, scale: f64) -> Self {
        let mut c = vec![0.0; n];
        c[j] = scale;
        Self(c)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for CoefficientVector {
    fn from(c: Vec<f64>) -> Self {
        Self(c)
    }
}

impl Index<usize> for CoefficientVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Gauss–Legendre nodes and weights mapped onto a finite interval.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub(crate) nodes: Vec<f64>,
    pub(crate) weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JacobianKind {
    /// Exact quadratic-form Jacobian when the problem declares quadratic
    /// nonlinearity, central differences otherwise.
    #[default]
    Auto,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub quad_order: usize,
    /// Infinity-norm tolerance on the Galerkin vector.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Relative step of the central-difference Jacobian.
    pub fd_step: f64,
    pub jacobian: JacobianKind,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            quad_order: 32,
            newton_tol: 1e-12,
            max_iter: 50,
            fd_step: 1e-7,
            jacobian: JacobianKind::Auto,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.quad_order == 0 {
            return Err(OafmError::InvalidOrder);
        }
        if !(self.newton_tol > 0.0 && self.newton_tol.is_finite()) {
            return Err(OafmError::InvalidParameter(format!(
                "newton tolerance must be positive, got {}",
                self.newton_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(OafmError::InvalidParameter(
                "max_iter must be positive".into(),
            ));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(OafmError::InvalidParameter(format!(
                "finite-difference step must be positive, got {}",
                self.fd_step
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub coefficients: CoefficientVector,
    pub residual_inf_norm: f64,
    /// Newton steps taken (fixed-point fallback steps are added on top).
    pub iterations: usize,
    pub converged: bool,
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(OafmError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn set_column(&mut self, j: usize, col: &[f64]) {
        for (i, v) in col.iter().enumerate() {
            self[(i, j)] = *v;
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
