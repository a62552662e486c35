//! The four benchmark problems: Benjamin–Bona–Mahony, Fisher, the
//! uniformly propagating shock, and generalized Burgers–Fisher.
//!
//! Every problem uses its initial condition as `M0` and four coordinate
//! functions built from powers of `M0` (or, for BBM, of `sech(x/4)`).
//! All derivatives are closed form.

use crate::error::{OafmError, Result};
use crate::pde_core::{AnsatzEval, ExactSolution, ProblemSpec, SmoothFn, SpaceDomain};

/// CLI identifiers, alphabetical.
pub const PROBLEM_IDS: [&str; 4] = ["bbm", "burgers-fisher", "fisher", "shock"];

/// `sech z` without overflowing `cosh` for large `|z|`.
fn sech(z: f64) -> f64 {
    let e = (-z.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// Powers of a logistic-type function `σ` with `σ' = rate·σ(1 - σ)`.
///
/// The k-th derivative of `σ^a` is `σ^a · P_k(σ)` with `P_0 = 1` and
/// `P_{k+1} = rate·(1 - σ)·(a·P_k + σ·P_k')`.
#[derive(Debug, Clone)]
struct LogisticPower {
    a: f64,
    polys: [Vec<f64>; 4],
}

impl LogisticPower {
    fn new(a: f64, rate: f64) -> Self {
        let step = |p: &[f64]| -> Vec<f64> {
            // inner = a·P + σ·P'
            let mut inner = vec![0.0; p.len()];
            for (k, c) in p.iter().enumerate() {
                inner[k] += a * c + k as f64 * c;
            }
            // rate·(1 - σ)·inner
            let mut out = vec![0.0; p.len() + 1];
            for (k, c) in inner.iter().enumerate() {
                out[k] += rate * c;
                out[k + 1] -= rate * c;
            }
            out
        };
        let p0 = vec![1.0];
        let p1 = step(&p0);
        let p2 = step(&p1);
        let p3 = step(&p2);
        Self {
            a,
            polys: [p0, p1, p2, p3],
        }
    }

    /// `[g, g', g'', g''']` at a point where the logistic takes value `sigma`.
    fn jet(&self, sigma: f64) -> [f64; 4] {
        let base = sigma.powf(self.a);
        let horner = |p: &[f64]| p.iter().rev().fold(0.0, |acc, c| acc * sigma + c);
        [
            base,
            base * horner(&self.polys[1]),
            base * horner(&self.polys[2]),
            base * horner(&self.polys[3]),
        ]
    }
}

/// `-σ^a` as a coordinate function, plus its derivatives.
fn negated_logistic_power(
    sigma: impl Fn(f64) -> f64 + Send + Sync + 'static,
    a: f64,
    rate: f64,
) -> SmoothFn {
    let lp = LogisticPower::new(a, rate);
    SmoothFn::from_jet(move |x| {
        let j = lp.jet(sigma(x));
        [-j[0], -j[1], -j[2]]
    })
}

fn logistic_power(
    sigma: impl Fn(f64) -> f64 + Send + Sync + 'static,
    a: f64,
    rate: f64,
) -> SmoothFn {
    let lp = LogisticPower::new(a, rate);
    SmoothFn::from_jet(move |x| {
        let j = lp.jet(sigma(x));
        [j[0], j[1], j[2]]
    })
}

/// Benjamin–Bona–Mahony (regularized long-wave) equation
///
/// ```text
/// M_t - M_xxt + M_x + M·M_x = 0,   M(x, 0) = sech²(x/4),   x ∈ [0, 0.07]
/// ```
///
/// with exact solution `sech²(x/4 - t/3)`.
pub fn bbm() -> ProblemSpec {
    // s = sech(x/4), th = tanh(x/4); d/dx s = -s·th/4, d/dx th = s²/4.
    let st = |x: f64| (sech(x / 4.0), (x / 4.0).tanh());
    // s^n
    let sech_pow = move |n: i32| {
        move |x: f64| {
            let (s, th) = st(x);
            let nf = n as f64;
            let sn = s.powi(n);
            [
                sn,
                -nf / 4.0 * sn * th,
                nf * nf / 16.0 * sn - nf * (nf + 1.0) / 16.0 * sn * s * s,
            ]
        }
    };
    // s^n · th
    let sech_pow_tanh = move |n: i32| {
        move |x: f64| {
            let (s, th) = st(x);
            let nf = n as f64;
            let sn = s.powi(n);
            let sn2 = sn * s * s;
            [
                sn * th,
                -nf / 4.0 * sn + (nf + 1.0) / 4.0 * sn2,
                nf * nf / 16.0 * sn * th - (nf + 1.0) * (nf + 2.0) / 16.0 * sn2 * th,
            ]
        }
    };
    let half_sum = move |p: i32, q: i32| {
        SmoothFn::from_jet(move |x| {
            let (u, v) = (sech_pow_tanh(p)(x), sech_pow_tanh(q)(x));
            [
                0.5 * (u[0] + v[0]),
                0.5 * (u[1] + v[1]),
                0.5 * (u[2] + v[2]),
            ]
        })
    };
    let negated = move |n: i32| {
        SmoothFn::from_jet(move |x| {
            let g = sech_pow(n)(x);
            [-g[0], -g[1], -g[2]]
        })
    };
    let basis = vec![half_sum(4, 6), half_sum(6, 8), negated(6), negated(8)];
    let initial = SmoothFn::from_jet(sech_pow(2));

    let exact = ExactSolution::new(|x, t| {
        let z = x / 4.0 - t / 3.0;
        let (s, th) = (sech(z), z.tanh());
        let s2 = s * s;
        let d1 = -2.0 * s2 * th;
        let d2 = 4.0 * s2 * th * th - 2.0 * s2 * s2;
        let d3 = -8.0 * s2 * th.powi(3) + 16.0 * s2 * s2 * th;
        AnsatzEval {
            value: s2,
            dt: -d1 / 3.0,
            dx: d1 / 4.0,
            dxx: d2 / 16.0,
            dxxt: -d3 / 48.0,
        }
    });

    ProblemSpec::new(
        "bbm",
        SpaceDomain::new(0.0, 0.07).expect("static domain"),
        initial,
        basis,
        |e, _, _| Ok(e.dt - e.dxxt + e.dx + e.value * e.dx),
    )
    .expect("static problem")
    .with_exact(exact)
    .with_quadratic_nonlinearity(true)
}

/// Fisher's equation
///
/// ```text
/// M_t = M_xx + 6M(1 - M),   M(x, 0) = (1 + eˣ)⁻²,   x ∈ [0, 1]
/// ```
///
/// with exact solution `(1 + e^(x - 5t))⁻²`.
pub fn fisher() -> ProblemSpec {
    // p = (1 + eˣ)⁻¹ satisfies p' = -p(1 - p)
    let p = |x: f64| 1.0 / (1.0 + x.exp());
    let initial = logistic_power(p, 2.0, -1.0);
    let basis = (1..=4)
        .map(|j| negated_logistic_power(p, 2.0 * j as f64, -1.0))
        .collect();

    let shape = LogisticPower::new(2.0, -1.0);
    let exact = ExactSolution::new(move |x, t| {
        let j = shape.jet(p(x - 5.0 * t));
        AnsatzEval {
            value: j[0],
            dt: -5.0 * j[1],
            dx: j[1],
            dxx: j[2],
            dxxt: -5.0 * j[3],
        }
    });

    ProblemSpec::new(
        "fisher",
        SpaceDomain::new(0.0, 1.0).expect("static domain"),
        initial,
        basis,
        |e, _, _| Ok(e.dt - e.dxx - 6.0 * e.value * (1.0 - e.value)),
    )
    .expect("static problem")
    .with_exact(exact)
    .with_quadratic_nonlinearity(true)
}

/// Uniformly propagating shock
///
/// ```text
/// M_t = M_xx / Re - M·M_x,   M(x, 0) = (x - 4)/(x - 2),   x ∈ [-1, 1]
/// ```
///
/// The exact solution `1 - 2/(x - t - 2)` holds only for `Re = 1` and is
/// attached only in that case.
pub fn shock(re: f64) -> Result<ProblemSpec> {
    if !(re > 0.0 && re.is_finite()) {
        return Err(OafmError::InvalidParameter(format!(
            "Reynolds number must be positive, got {re}"
        )));
    }
    let ratio_pow = |j: i32, sign: f64| {
        SmoothFn::from_jet(move |x| {
            let w = x - 2.0;
            let r = 1.0 - 2.0 / w;
            let r1 = 2.0 / (w * w);
            let r2 = -4.0 / (w * w * w);
            let jf = j as f64;
            let (v, d1, d2) = match j {
                1 => (r, r1, r2),
                _ => (
                    r.powi(j),
                    jf * r.powi(j - 1) * r1,
                    jf * (jf - 1.0) * r.powi(j - 2) * r1 * r1 + jf * r.powi(j - 1) * r2,
                ),
            };
            [sign * v, sign * d1, sign * d2]
        })
    };
    let initial = ratio_pow(1, 1.0);
    let basis = (1..=4).map(|j| ratio_pow(j, -1.0)).collect();
    let inv_re = 1.0 / re;

    let spec = ProblemSpec::new(
        "shock",
        SpaceDomain::new(-1.0, 1.0).expect("static domain"),
        initial,
        basis,
        move |e, _, _| Ok(e.dt - inv_re * e.dxx + e.value * e.dx),
    )?
    .with_param("re", re)
    .with_quadratic_nonlinearity(true);

    if re == 1.0 {
        let exact = ExactSolution::new(|x, t| {
            let w = x - t - 2.0;
            AnsatzEval {
                value: 1.0 - 2.0 / w,
                dt: -2.0 / (w * w),
                dx: 2.0 / (w * w),
                dxx: -4.0 / (w * w * w),
                dxxt: -12.0 / (w * w * w * w),
            }
        });
        Ok(spec.with_exact(exact))
    } else {
        Ok(spec)
    }
}

fn bf_power(v: f64, omega: f64) -> Result<f64> {
    if omega == 1.0 {
        Ok(v)
    } else if omega.fract() == 0.0 && omega <= i32::MAX as f64 {
        Ok(v.powi(omega as i32))
    } else if v > 0.0 {
        Ok(v.powf(omega))
    } else {
        Err(OafmError::InvalidParameter(format!(
            "ansatz value {v} is not positive; cannot raise it to the power {omega}"
        )))
    }
}

fn bf_parts(alpha: f64, beta: f64, omega: f64) -> Result<(f64, f64)> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("omega", omega)] {
        if !v.is_finite() {
            return Err(OafmError::InvalidParameter(format!(
                "{name} must be finite"
            )));
        }
    }
    if omega <= 0.0 {
        return Err(OafmError::InvalidParameter(format!(
            "omega must be positive, got {omega}"
        )));
    }
    if alpha == 0.0 {
        return Err(OafmError::InvalidParameter("alpha must be non-zero".into()));
    }
    let kappa = -alpha * omega / (2.0 * (omega + 1.0));
    let speed = alpha / (omega + 1.0) + beta * (omega + 1.0) / alpha;
    Ok((kappa, speed))
}

fn bf_spec(
    name: &str,
    alpha: f64,
    beta: f64,
    omega: f64,
    residual: impl Fn(&AnsatzEval, f64, f64) -> Result<f64> + Send + Sync + 'static,
) -> Result<ProblemSpec> {
    let (kappa, speed) = bf_parts(alpha, beta, omega)?;
    // h = ½ + ½tanh(κx) satisfies h' = 2κ·h(1 - h)
    let h = move |x: f64| 0.5 + 0.5 * (kappa * x).tanh();
    let rate = 2.0 * kappa;
    let initial = logistic_power(h, 1.0 / omega, rate);
    let basis = (1..=4)
        .map(|j| negated_logistic_power(h, j as f64 / omega, rate))
        .collect();
    let shape = LogisticPower::new(1.0 / omega, rate);
    let exact = ExactSolution::new(move |x, t| {
        let j = shape.jet(h(x - speed * t));
        AnsatzEval {
            value: j[0],
            dt: -speed * j[1],
            dx: j[1],
            dxx: j[2],
            dxxt: -speed * j[3],
        }
    });
    Ok(ProblemSpec::new(
        name,
        SpaceDomain::new(0.0, 1.0).expect("static domain"),
        initial,
        basis,
        residual,
    )?
    .with_param("alpha", alpha)
    .with_param("beta", beta)
    .with_param("omega", omega)
    .with_exact(exact)
    .with_quadratic_nonlinearity(omega == 1.0))
}

/// Generalized Burgers–Fisher equation
///
/// ```text
/// M_t + α·M^ω·M_x - M_xx = β·M(1 - M^ω),
/// M(x, 0) = (½ + ½tanh(-αω x / (2(ω + 1))))^(1/ω),   x ∈ [0, 1]
/// ```
///
/// For non-integer `ω` the residual refuses non-positive ansatz values.
pub fn burgers_fisher(alpha: f64, beta: f64, omega: f64) -> Result<ProblemSpec> {
    bf_spec("burgers-fisher", alpha, beta, omega, move |e, _, _| {
        let vw = bf_power(e.value, omega)?;
        Ok(e.dt + alpha * vw * e.dx - e.dxx - beta * e.value * (1.0 - vw))
    })
}

/// Burgers–Fisher (`ω = 1`) with the linearized advection coupling
/// `+α·t·φ_j·M0'` replaced by `-α·t·φ_j·M0'`, i.e. the residual
/// `R - 2α(M̃ - M0)·M0'`.
///
/// This is not the PDE residual. The reference Burgers–Fisher error and
/// convergence-rate tables were computed with this form, so it is kept for
/// reproducing them.
pub fn burgers_fisher_flipped_coupling(alpha: f64, beta: f64) -> Result<ProblemSpec> {
    let (kappa, _) = bf_parts(alpha, beta, 1.0)?;
    let m0 = LogisticPower::new(1.0, 2.0 * kappa);
    let h = move |x: f64| 0.5 + 0.5 * (kappa * x).tanh();
    bf_spec(
        "burgers-fisher-flipped",
        alpha,
        beta,
        1.0,
        move |e, x, _| {
            let j = m0.jet(h(x));
            let r = e.dt + alpha * e.value * e.dx - e.dxx - beta * e.value * (1.0 - e.value);
            Ok(r - 2.0 * alpha * (e.value - j[0]) * j[1])
        },
    )
    .map(|p| p.with_param("flipped_coupling", 1.0))
}

/// Constructor parameters for [`by_id`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub re: f64,
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub flip_coupling: bool,
}

impl Default for ProblemParams {
    fn default() -> Self {
        Self {
            re: 1.0,
            alpha: 1.0,
            beta: 1.0,
            omega: 1.0,
            flip_coupling: false,
        }
    }
}

pub fn by_id(id: &str, params: &ProblemParams) -> Result<ProblemSpec> {
    if params.flip_coupling && id != "burgers-fisher" {
        return Err(OafmError::InvalidParameter(
            "the flipped coupling only applies to burgers-fisher".into(),
        ));
    }
    match id {
        "bbm" => Ok(bbm()),
        "fisher" => Ok(fisher()),
        "shock" => shock(params.re),
        "burgers-fisher" if params.flip_coupling => {
            if params.omega != 1.0 {
                return Err(OafmError::InvalidParameter(
                    "the flipped coupling requires omega = 1".into(),
                ));
            }
            burgers_fisher_flipped_coupling(params.alpha, params.beta)
        }
        "burgers-fisher" => burgers_fisher(params.alpha, params.beta, params.omega),
        other => Err(OafmError::InvalidParameter(format!(
            "unknown problem `{other}` (expected one of {})",
            PROBLEM_IDS.join(", ")
        ))),
    }
}

/// Spatial grid of the reference tables for each problem.
pub fn default_x_grid(id: &str) -> Vec<f64> {
    let steps = |a: f64, h: f64, n: usize| (0..=n).map(|i| round_grid(a + i as f64 * h)).collect();
    match id {
        "bbm" => vec![0.03, 0.04],
        "shock" => steps(-1.0, 0.2, 10),
        _ => steps(0.0, 0.1, 10),
    }
}

/// Snaps accumulated grid arithmetic (`0.30000000000000004`) to the
/// nearest 12-decimal value.
pub(crate) fn round_grid(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}
