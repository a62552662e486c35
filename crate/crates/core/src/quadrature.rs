//! Gauss–Legendre quadrature on an arbitrary finite interval.
//!
//! Nodes are the roots of `P_n`, found by Newton iteration from the
//! Chebyshev-like guess `cos(π(i - 1/4)/(n + 1/2))`; weights are
//! `2 / ((1 - x²) P_n'(x)²)`. The reference rule on `[-1, 1]` is then mapped
//! affinely onto `[a, b]`.

use std::f64::consts::PI;

use crate::error::{OafmError, Result};
use crate::pde_core::{QuadratureRule, SpaceDomain};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let k = k as f64;
        let p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Order-point rule on `[-1, 1]`, nodes ascending.
fn reference_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    if order == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let half = order.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                let (_, d) = legendre_with_derivative(order, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // symmetric pair; the guess for i lands on the i-th largest root
        nodes[order - 1 - i] = x;
        nodes[i] = -x;
        weights[order - 1 - i] = w;
        weights[i] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    (nodes, weights)
}

/// Order-point Gauss–Legendre rule on `[a, b]`, exact for polynomials of
/// degree up to `2·order - 1`.
pub fn gauss_legendre_rule(order: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    let domain = SpaceDomain::new(a, b)?;
    if order == 0 {
        return Err(OafmError::InvalidOrder);
    }
    let (ref_nodes, ref_weights) = reference_rule(order);
    let half = 0.5 * domain.length();
    let mid = 0.5 * (a + b);
    Ok(QuadratureRule {
        nodes: ref_nodes.iter().map(|x| mid + half * x).collect(),
        weights: ref_weights.iter().map(|w| half * w).collect(),
    })
}

pub fn rule_for(order: usize, domain: SpaceDomain) -> Result<QuadratureRule> {
    gauss_legendre_rule(order, domain.a(), domain.b())
}

/// `Σ w_i f(x_i)`; fails if the integrand is not finite at a node.
pub fn integrate(f: impl Fn(f64) -> f64, rule: &QuadratureRule) -> Result<f64> {
    let mut sum = 0.0;
    for (x, w) in rule.iter() {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(OafmError::NonFiniteIntegrand { x });
        }
        sum += w * fx;
    }
    Ok(sum)
}
