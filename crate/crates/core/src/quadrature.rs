//! Gauss rules for the normalized measures `dΠ_ν(w) = c_ν (1 − w²)^{ν−1/2} dw`
//! and product rules for the normalized weights on the solid cone and on the
//! conic surface.
//!
//! Nodes come from the Golub–Welsch eigenproblem of the Jacobi matrix and are
//! then refined by Newton steps on the orthonormal polynomial of degree `m`;
//! weights are the Christoffel numbers `1 / Σ_{k<m} q_k(x)²`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::{ConeParams, SurfaceParams};
use crate::numeric::special::{ln_beta, ln_gamma, ln_sphere_area};
use crate::numeric::CompensatedSum;

/// A rule on a line segment whose weights sum to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(*x));
        }
        acc.value()
    }

    /// The same rule pulled back to `[lo, hi]` from `[-1, 1]`.
    pub fn affine(&self, lo: f64, hi: f64) -> LineRule {
        let h = 0.5 * (hi - lo);
        LineRule {
            nodes: self.nodes.iter().map(|x| lo + h * (x + 1.0)).collect(),
            weights: self.weights.clone(),
        }
    }
}

/// A rule for `dΠ_ν` on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadRule {
    pub nu: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_dirac(&self) -> bool {
        self.nu == -0.5
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(*x));
        }
        acc.value()
    }
}

/// `ln c_ν` with `c_ν = Γ(ν+1) / (√π Γ(ν+1/2))`, for `ν > -1/2`.
pub fn ln_pi_normalization(nu: f64) -> f64 {
    ln_gamma(nu + 1.0) - 0.5 * PI.ln() - ln_gamma(nu + 0.5)
}

/// `∫_{-1}^{1} (1−x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)`.
pub fn jacobi_mass(a: f64, b: f64) -> f64 {
    ((a + b + 1.0) * std::f64::consts::LN_2 + ln_beta(a + 1.0, b + 1.0)).exp()
}

fn recurrence(k: usize, a: f64, b: f64) -> (f64, f64) {
    // (α_k, β_k) of the monic Jacobi polynomials; β_0 is unused
    let kf = k as f64;
    let s = 2.0 * kf + a + b;
    let alpha = if k == 0 {
        (b - a) / (a + b + 2.0)
    } else if a == b {
        0.0
    } else {
        (b * b - a * a) / (s * (s + 2.0))
    };
    let beta = match k {
        0 => 0.0,
        1 => 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b)),
        _ => 4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0)),
    };
    (alpha, beta)
}

/// Orthonormal polynomials at `x`; returns `(q_m, q_m', Σ_{k<m} q_k²)`.
fn orthonormal(m: usize, x: f64, alpha: &[f64], sqrt_beta: &[f64]) -> (f64, f64, f64) {
    let (mut q_prev, mut q) = (0.0, 1.0);
    let (mut d_prev, mut dq) = (0.0, 0.0);
    let mut sumsq = 0.0;
    for k in 0..m {
        sumsq += q * q;
        let next = ((x - alpha[k]) * q - sqrt_beta[k] * q_prev) / sqrt_beta[k + 1];
        let dnext = ((x - alpha[k]) * dq + q - sqrt_beta[k] * d_prev) / sqrt_beta[k + 1];
        q_prev = q;
        q = next;
        d_prev = dq;
        dq = dnext;
    }
    (q, dq, sumsq)
}

/// `m`-point Gauss rule on `[-1, 1]` for the weight `(1−x)^a (1+x)^b`,
/// normalized so the weights sum to one. Requires `a, b > -1`.
pub fn gauss_jacobi(m: usize, a: f64, b: f64) -> Result<LineRule> {
    if m == 0 {
        return Err(invalid!("quadrature order must be at least 1"));
    }
    if !(a > -1.0 && b > -1.0) || !a.is_finite() || !b.is_finite() {
        return Err(invalid!("Jacobi exponents must exceed -1, got a = {a}, b = {b}"));
    }
    let mut alpha = Vec::with_capacity(m + 1);
    let mut sqrt_beta = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let (al, be) = recurrence(k, a, b);
        alpha.push(al);
        sqrt_beta.push(be.sqrt());
    }
    let jm = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            sqrt_beta[j]
        } else if j + 1 == i {
            sqrt_beta[i]
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jm).eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.total_cmp(y));

    let gap = |i: usize, nodes: &[f64]| -> f64 {
        let left = if i > 0 { nodes[i] - nodes[i - 1] } else { 1.0 + nodes[i] };
        let right = if i + 1 < nodes.len() { nodes[i + 1] - nodes[i] } else { 1.0 - nodes[i] };
        left.min(right).max(0.0)
    };
    let mut weights = vec![0.0; m];
    let snapshot = nodes.clone();
    for i in 0..m {
        let mut x = nodes[i];
        let limit = 0.25 * gap(i, &snapshot);
        for _ in 0..4 {
            let (q, dq, _) = orthonormal(m, x, &alpha, &sqrt_beta);
            if dq == 0.0 {
                break;
            }
            let step = q / dq;
            if !step.is_finite() || step.abs() > limit {
                break;
            }
            x -= step;
            if step.abs() <= 1e-17 * x.abs().max(1e-300) {
                break;
            }
        }
        nodes[i] = x;
        let (_, _, sumsq) = orthonormal(m, x, &alpha, &sqrt_beta);
        weights[i] = 1.0 / sumsq;
    }
    if a == b {
        symmetrize(&mut nodes, &mut weights);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(LineRule { nodes, weights })
}

fn symmetrize(nodes: &mut [f64], weights: &mut [f64]) {
    let m = nodes.len();
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
}

/// `m`-point Gauss–Legendre rule on `[-1, 1]` with weights summing to one.
pub fn gauss_legendre(m: usize) -> Result<LineRule> {
    gauss_jacobi(m, 0.0, 0.0)
}

/// Rule for `dΠ_ν`: the `m`-point Gauss rule for `(1−w²)^{ν−1/2}` when
/// `ν > -1/2`, and the two-point Dirac mean `{-1, 1}` when `ν = -1/2`.
pub fn pi_rule(nu: f64, m: usize) -> Result<QuadRule> {
    if !(nu >= -0.5) || !nu.is_finite() {
        return Err(invalid!("nu = {nu} must be finite and >= -1/2"));
    }
    if m == 0 {
        return Err(invalid!("quadrature order must be at least 1"));
    }
    if nu == -0.5 {
        return Ok(QuadRule {
            nu,
            nodes: vec![-1.0, 1.0],
            weights: vec![0.5, 0.5],
        });
    }
    let r = gauss_jacobi(m, nu - 0.5, nu - 0.5)?;
    Ok(QuadRule {
        nu,
        nodes: r.nodes,
        weights: r.weights,
    })
}

/// A rule on the unit sphere `S^{d−1}` with weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereRule {
    pub dirs: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Exact for spherical polynomials of degree `< m` (trapezoid in the angle for
/// `d = 2`; Gauss–Legendre in `cos θ` times trapezoid in `φ` for `d = 3`).
pub fn sphere_rule(d: usize, m: usize) -> Result<SphereRule> {
    if m == 0 {
        return Err(invalid!("angular order must be at least 1"));
    }
    match d {
        2 => {
            let w = 1.0 / m as f64;
            let dirs = (0..m)
                .map(|j| {
                    let th = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect();
            Ok(SphereRule {
                dirs,
                weights: vec![w; m],
            })
        }
        3 => {
            let polar = gauss_legendre(m.div_ceil(2))?;
            let mut dirs = Vec::with_capacity(polar.len() * m);
            let mut weights = Vec::with_capacity(polar.len() * m);
            for (z, wz) in polar.nodes.iter().zip(&polar.weights) {
                let rho = (1.0 - z * z).max(0.0).sqrt();
                for j in 0..m {
                    let ph = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    dirs.push(vec![rho * ph.cos(), rho * ph.sin(), *z]);
                    weights.push(wz / m as f64);
                }
            }
            Ok(SphereRule { dirs, weights })
        }
        _ => Err(invalid!("d = {d} is not supported (supported: 2, 3)")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "domain", rename_all = "lowercase")]
pub enum RuleParams {
    Cone(ConeParams),
    Surface(SurfaceParams),
}

/// Product rule for the normalized weight on the cone or on its surface,
/// in the coordinates `x = t √σ ω` (cone) or `x = t ω` (surface).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeQuadRule {
    pub params: RuleParams,
    /// Nodes in `t ∈ [0, 1]`.
    pub t_rule: LineRule,
    /// Nodes in `σ = ‖x‖²/t² ∈ [0, 1]` (the single node `σ = 1` on the surface).
    pub radial_rule: LineRule,
    pub angular_rule: SphereRule,
    /// `c_{μ,γ}` resp. `c_γ`.
    pub normalization: f64,
}

/// A quadrature point `(x, t)` with its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPoint {
    pub x: Vec<f64>,
    pub t: f64,
    pub weight: f64,
}

impl ConeQuadRule {
    pub fn len(&self) -> usize {
        self.t_rule.len() * self.radial_rule.len() * self.angular_rule.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<WeightedPoint> {
        let mut out = Vec::with_capacity(self.len());
        for (t, wt) in self.t_rule.nodes.iter().zip(&self.t_rule.weights) {
            for (sg, ws) in self.radial_rule.nodes.iter().zip(&self.radial_rule.weights) {
                let r = t * sg.sqrt();
                for (om, wo) in self.angular_rule.dirs.iter().zip(&self.angular_rule.weights) {
                    out.push(WeightedPoint {
                        x: om.iter().map(|c| c * r).collect(),
                        t: *t,
                        weight: wt * ws * wo,
                    });
                }
            }
        }
        out
    }

    pub fn integrate(&self, mut f: impl FnMut(&[f64], f64) -> f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for p in self.points() {
            acc.add(p.weight * f(&p.x, p.t));
        }
        acc.value()
    }
}

/// Rule for `t ∈ [0, 1]` with weight `t^b (1 − t)^a`.
fn unit_interval_rule(m: usize, a: f64, b: f64) -> Result<LineRule> {
    Ok(gauss_jacobi(m, a, b)?.affine(0.0, 1.0))
}

/// `c_{μ,γ} = 1 / (B(d+2μ, γ+1) · ½|S^{d−1}| · B(d/2, μ+1/2))`.
pub fn cone_normalization(p: &ConeParams) -> f64 {
    let d = p.d as f64;
    (-(ln_beta(d + 2.0 * p.mu, p.gamma + 1.0) + ln_sphere_area(p.d) - std::f64::consts::LN_2
        + ln_beta(d / 2.0, p.mu + 0.5)))
        .exp()
}

/// `c_γ = 1 / (√2 |S^{d−1}| B(d−1, γ+1))`.
pub fn surface_normalization(p: &SurfaceParams) -> f64 {
    let d = p.d as f64;
    (-(0.5 * std::f64::consts::LN_2 + ln_sphere_area(p.d) + ln_beta(d - 1.0, p.gamma + 1.0))).exp()
}

/// Cone rule with orders `[t, radial, angular]`.
pub fn cone_rule(params: &ConeParams, orders: [usize; 3]) -> Result<ConeQuadRule> {
    let d = params.d as f64;
    let t_rule = unit_interval_rule(orders[0], params.gamma, d + 2.0 * params.mu - 1.0)?;
    let radial_rule = unit_interval_rule(orders[1], params.mu - 0.5, d / 2.0 - 1.0)?;
    let angular_rule = sphere_rule(params.d, orders[2])?;
    Ok(ConeQuadRule {
        params: RuleParams::Cone(*params),
        t_rule,
        radial_rule,
        angular_rule,
        normalization: cone_normalization(params),
    })
}

/// Surface rule with orders `[t, angular]`.
pub fn surface_rule(params: &SurfaceParams, orders: [usize; 2]) -> Result<ConeQuadRule> {
    let d = params.d as f64;
    let t_rule = unit_interval_rule(orders[0], params.gamma, d - 2.0)?;
    let angular_rule = sphere_rule(params.d, orders[1])?;
    Ok(ConeQuadRule {
        params: RuleParams::Surface(*params),
        t_rule,
        radial_rule: LineRule {
            nodes: vec![1.0],
            weights: vec![1.0],
        },
        angular_rule,
        normalization: surface_normalization(params),
    })
}

/// Smallest cone orders exact for polynomials of total degree `deg` in `(x, t)`.
pub fn cone_orders_for_degree(deg: usize) -> [usize; 3] {
    [deg / 2 + 1, deg / 4 + 1, deg + 1]
}

/// Smallest surface orders exact for polynomials of total degree `deg`.
pub fn surface_orders_for_degree(deg: usize) -> [usize; 2] {
    [deg / 2 + 1, deg + 1]
}
