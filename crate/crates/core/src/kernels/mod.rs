//! Reproducing kernels and heat kernels on the solid cone and on the conic
//! surface.
//!
//! Two independent evaluations are provided for each heat kernel:
//!
//! * `series`: the spectral sum `Σ_n e^{-τ λ_n} P_n(p, q)` where each `P_n` is a
//!   tensor quadrature of `Z_{2n}(ξ)`. `P_j` comes from the Jacobi recurrence
//!   and the normalization `P_j(1)/h_j` from an exact product of rational
//!   factors, both in double-double.
//! * `integral`: the folded form `∫ G_{τ/4}(1, ξ)`, with the 1-d kernel taken
//!   from a precomputed piecewise Chebyshev table.
//!
//! The truncated integrands are polynomials in `ξ`, and `ξ` is linear in the
//! `v` variables and (after the odd powers cancel) polynomial in `u`, so the
//! symmetric Gauss rules below are exact once their orders reach the degree
//! bounds computed here. The requested orders act as lower bounds.

mod table;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::{ConeParams, ConePoint, SurfaceParams, SurfacePoint, XiCone, XiSurface, XI_FAIL_TOL};
use crate::numeric::{CompensatedSum, Dd, Scalar};
use crate::orthopoly::{jacobi_at_one, jacobi_norm_sq, PolyParam, SeriesBudget, MAX_TERMS};
use crate::quadrature::{pi_rule, QuadRule};

use table::HeatTable;

/// A kernel value with its error budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    /// Tail bound plus quadrature/interpolation and rounding estimates.
    pub error_budget: f64,
    pub meta: EvalMeta,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EvalMeta {
    pub truncation_n: usize,
    pub orders: Vec<usize>,
    pub precision_bits: u32,
}

/// Evaluation settings shared by both representations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelConfig {
    /// Absolute bound on the dropped 1-d series tail.
    pub tail_tol: f64,
    /// Lower bounds on the per-axis orders (`[u, v₁, v₂]` on the cone,
    /// `[v₁, v₂, -]` on the surface).
    pub min_orders: [usize; 3],
    pub max_terms: usize,
    /// Relative perturbation of `h_n` (`n >= 1`) in the series route; zero
    /// except for fault-injection runs.
    pub norm_fault: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            tail_tol: 1e-40,
            min_orders: [60, 60, 60],
            max_terms: MAX_TERMS,
            norm_fault: 0.0,
        }
    }
}

impl KernelConfig {
    /// Orders driven only by exactness.
    pub fn minimal() -> Self {
        KernelConfig {
            min_orders: [1, 1, 1],
            ..KernelConfig::default()
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid!("tau = {tau} must be positive and finite"));
    }
    Ok(())
}

/// Gauss orders exact for a polynomial of degree `deg` in `ξ`: `(m_u, m_v)`.
fn exact_orders(deg: usize) -> (usize, usize) {
    ((deg / 2 + 2) / 2, deg / 2 + 1)
}

/// Normalizations, recurrence coefficients and spectral weights for the
/// series route, all in double-double.
#[derive(Clone, Debug)]
struct SeriesCoeffs {
    ns: usize,
    lam1: Dd,
    a: Vec<Dd>,
    b: Vec<Dd>,
    /// `e^{-τ λ_k} Z_{2k}(1) / P_{2k}(1)`
    scale: Vec<Dd>,
    /// `Σ_k e^{-τ λ_k} Z_{2k}(1)`
    mass: f64,
}

impl SeriesCoeffs {
    fn new(lambda: f64, tau: f64, eig: impl Fn(usize) -> f64, ns: usize, fault: f64) -> Self {
        let l = Dd::from(lambda);
        let mut a = vec![Dd::ZERO; 2 * ns + 1];
        let mut b = vec![Dd::ZERO; 2 * ns + 1];
        for j in 2..=2 * ns {
            let jf = Dd::from(j as f64);
            let den = jf * (jf + l + l);
            a[j] = (Dd::from(2.0 * j as f64 - 1.0) + l + l) * (jf + l) / den;
            b[j] = (Dd::from(j as f64 - 1.0) + l) * (jf + l) / den;
        }
        // c_j = Z_j(1)/P_j(1) = P_j(1)/h_j, c_j/c_{j-1} = (2j+2λ+1)(j+2λ) / ((2j+2λ-1)(j+λ))
        let mut c = Dd::ONE;
        let mut z1 = Dd::ONE;
        let mut scale = Vec::with_capacity(ns + 1);
        let mut mass = CompensatedSum::new();
        for j in 0..=2 * ns {
            if j >= 1 {
                let jf = Dd::from(j as f64);
                let num = (Dd::from(2.0 * j as f64 + 1.0) + l + l) * (jf + l + l);
                c = c * num / ((Dd::from(2.0 * j as f64 - 1.0) + l + l) * (jf + l));
                z1 = z1 * num / ((Dd::from(2.0 * j as f64 - 1.0) + l + l) * jf);
            }
            if j % 2 == 0 {
                let k = j / 2;
                let e = <Dd as Scalar>::exp(&Dd::from(-tau * eig(k)));
                let cf = if j >= 1 { c / Dd::from(1.0 + fault) } else { c };
                scale.push(e * cf);
                mass.add((e * z1).to_f64());
            }
        }
        SeriesCoeffs {
            ns,
            lam1: l + Dd::ONE,
            a,
            b,
            scale,
            mass: mass.value(),
        }
    }

    /// Adds `w · P_{2k}(ξ)` to `acc[k]` for `k = 0..=ns`.
    #[inline]
    fn accumulate(&self, xi: f64, w: f64, acc: &mut [Dd]) {
        let x = Dd::from(xi);
        let wd = Dd::from(w);
        acc[0] = acc[0] + wd;
        if self.ns == 0 {
            return;
        }
        let mut prev = Dd::ONE;
        let mut cur = self.lam1 * x;
        for j in 2..=2 * self.ns {
            let next = self.a[j] * (x * cur) - self.b[j] * prev;
            prev = cur;
            cur = next;
            if j % 2 == 0 {
                acc[j / 2] = acc[j / 2] + wd * cur;
            }
        }
    }

    fn finish(&self, acc: &[Dd]) -> (f64, f64) {
        let mut s = Dd::ZERO;
        for (k, v) in acc.iter().enumerate() {
            s = s + self.scale[k] * *v;
        }
        let rounding = 16.0 * (2 * self.ns + 2) as f64 * Dd::EPSILON * self.mass;
        (s.to_f64(), rounding)
    }
}

/// The domain-independent part of a kernel at fixed `τ`.
#[derive(Clone, Debug)]
struct Folded {
    tau: f64,
    budget: SeriesBudget,
    table: HeatTable,
    int_rules: Vec<QuadRule>,
    ser_rules: Vec<QuadRule>,
    series: SeriesCoeffs,
}

impl Folded {
    /// `nus` are the measure indices per axis, `u` axis first when present.
    fn new(
        tau: f64,
        lambda: f64,
        nus: &[f64],
        has_u: bool,
        eig: impl Fn(usize) -> f64,
        cfg: &KernelConfig,
    ) -> Result<Self> {
        check_tau(tau)?;
        let lp = PolyParam::new(lambda)?;
        let tq = tau / 4.0;
        let budget = SeriesBudget::for_heat(tq, lp, cfg.tail_tol, cfg.max_terms)?;
        let n = budget.truncation_n;
        let ns = n.div_ceil(2);
        let table = HeatTable::build(tq, lambda, &budget)?;
        let rules = |deg: usize| -> Result<Vec<QuadRule>> {
            let (mu_, mv) = exact_orders(deg);
            nus.iter()
                .enumerate()
                .map(|(i, nu)| {
                    let need = if has_u && i == 0 { mu_ } else { mv };
                    pi_rule(*nu, need.max(cfg.min_orders[i]))
                })
                .collect()
        };
        Ok(Folded {
            tau,
            budget,
            table,
            int_rules: rules(n)?,
            ser_rules: rules(2 * ns)?,
            series: SeriesCoeffs::new(lambda, tau, eig, ns, cfg.norm_fault),
        })
    }

    fn orders(rules: &[QuadRule]) -> Vec<usize> {
        rules.iter().map(|r| r.len()).collect()
    }

    /// Rounding of `ξ` itself, propagated through `G` (whose logarithmic
    /// derivative in `ξ` is at most of order `1/τ` where `G` is not negligible).
    fn xi_rounding(&self, value: f64) -> f64 {
        (8.0 / self.tau + 16.0) * f64::EPSILON * value.abs()
    }

    fn integral(&self, nodes: impl Fn(&[QuadRule], &mut dyn FnMut(f64, f64))) -> KernelValue {
        let mut acc = CompensatedSum::new();
        let mut interp = 0.0;
        nodes(&self.int_rules, &mut |xi, w| {
            let (g, e) = self.table.eval(xi);
            acc.add(w * g);
            interp += w * e;
        });
        let value = acc.value();
        KernelValue {
            value,
            error_budget: self.budget.tail_bound
                + interp
                + self.xi_rounding(value)
                + 4.0 * f64::EPSILON * acc.abs_total(),
            meta: EvalMeta {
                truncation_n: self.budget.truncation_n,
                orders: Folded::orders(&self.int_rules),
                precision_bits: self.table.max_bits(),
            },
        }
    }

    fn series(&self, nodes: impl Fn(&[QuadRule], &mut dyn FnMut(f64, f64))) -> KernelValue {
        let mut acc = vec![Dd::ZERO; self.series.ns + 1];
        nodes(&self.ser_rules, &mut |xi, w| self.series.accumulate(xi, w, &mut acc));
        let (value, rounding) = self.series.finish(&acc);
        KernelValue {
            value,
            error_budget: self.budget.tail_bound + rounding + self.xi_rounding(value),
            meta: EvalMeta {
                truncation_n: self.series.ns,
                orders: Folded::orders(&self.ser_rules),
                precision_bits: 106,
            },
        }
    }
}

fn check_xi_max(m: f64) -> Result<()> {
    if m > 1.0 + XI_FAIL_TOL {
        return Err(invalid!("ξ reaches {m}, beyond 1 + {XI_FAIL_TOL:e}; points are invalid"));
    }
    Ok(())
}

#[inline]
fn clamp1(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

fn cone_nodes(xi: &XiCone, rules: &[QuadRule], f: &mut dyn FnMut(f64, f64)) {
    let (ru, r1, r2) = (&rules[0], &rules[1], &rules[2]);
    for (u, wu) in ru.nodes.iter().zip(&ru.weights) {
        let a = xi.a(*u);
        for (v1, w1) in r1.nodes.iter().zip(&r1.weights) {
            let base = v1 * a;
            let w01 = wu * w1;
            for (v2, w2) in r2.nodes.iter().zip(&r2.weights) {
                f(clamp1(base + v2 * xi.b), w01 * w2);
            }
        }
    }
}

fn surface_nodes(xi: &XiSurface, rules: &[QuadRule], f: &mut dyn FnMut(f64, f64)) {
    let (r1, r2) = (&rules[0], &rules[1]);
    for (v1, w1) in r1.nodes.iter().zip(&r1.weights) {
        let base = v1 * xi.a;
        for (v2, w2) in r2.nodes.iter().zip(&r2.weights) {
            f(clamp1(base + v2 * xi.b), w1 * w2);
        }
    }
}

fn cone_nus(p: &ConeParams) -> [f64; 3] {
    [p.mu - 0.5, p.alpha - 0.5, p.gamma]
}

fn surface_nus(p: &SurfaceParams) -> [f64; 2] {
    [(p.d as f64 - 3.0) / 2.0, p.gamma]
}

/// Heat kernel on the solid cone at a fixed `τ`.
#[derive(Clone, Debug)]
pub struct ConeKernel {
    pub params: ConeParams,
    inner: Folded,
}

impl ConeKernel {
    pub fn new(params: &ConeParams, tau: f64, cfg: &KernelConfig) -> Result<Self> {
        let pr = *params;
        let inner = Folded::new(tau, params.lambda(), &cone_nus(params), true, move |k| pr.eigenvalue(k), cfg)?;
        Ok(ConeKernel { params: *params, inner })
    }

    pub fn tau(&self) -> f64 {
        self.inner.tau
    }

    pub fn budget(&self) -> SeriesBudget {
        self.inner.budget
    }

    fn xi(&self, p: &ConePoint, q: &ConePoint) -> Result<XiCone> {
        if p.dim() != self.params.d || q.dim() != self.params.d {
            return Err(invalid!("points must have dimension d = {}", self.params.d));
        }
        let xi = XiCone::new(p, q)?;
        check_xi_max(xi.a(1.0) + xi.b)?;
        Ok(xi)
    }

    /// Folded representation `∫ G_{τ/4}(1, ξ) dΠ_{μ−1/2}(u) dΠ_{α−1/2}(v₁) dΠ_γ(v₂)`.
    pub fn integral(&self, p: &ConePoint, q: &ConePoint) -> Result<KernelValue> {
        let xi = self.xi(p, q)?;
        Ok(self.inner.integral(|r, f| cone_nodes(&xi, r, f)))
    }

    /// Spectral representation `Σ_n e^{-τ n(n+2μ+γ+d)} P_n(p, q)`.
    pub fn series(&self, p: &ConePoint, q: &ConePoint) -> Result<KernelValue> {
        let xi = self.xi(p, q)?;
        Ok(self.inner.series(|r, f| cone_nodes(&xi, r, f)))
    }
}

/// Heat kernel on the conic surface at a fixed `τ`.
#[derive(Clone, Debug)]
pub struct SurfaceKernel {
    pub params: SurfaceParams,
    inner: Folded,
}

impl SurfaceKernel {
    pub fn new(params: &SurfaceParams, tau: f64, cfg: &KernelConfig) -> Result<Self> {
        let pr = *params;
        let mut cfg = cfg.clone();
        cfg.min_orders = [cfg.min_orders[0], cfg.min_orders[1], 1];
        let inner = Folded::new(
            tau,
            params.lambda(),
            &surface_nus(params),
            false,
            move |k| pr.eigenvalue(k),
            &cfg,
        )?;
        Ok(SurfaceKernel { params: *params, inner })
    }

    pub fn tau(&self) -> f64 {
        self.inner.tau
    }

    pub fn budget(&self) -> SeriesBudget {
        self.inner.budget
    }

    fn xi(&self, p: &SurfacePoint, q: &SurfacePoint) -> Result<XiSurface> {
        if p.dim() != self.params.d || q.dim() != self.params.d {
            return Err(invalid!("points must have dimension d = {}", self.params.d));
        }
        let xi = XiSurface::new(p, q)?;
        check_xi_max(xi.a + xi.b)?;
        Ok(xi)
    }

    /// Folded representation `∫ G_{τ/4}(1, ξ) dΠ_{(d−3)/2}(v₁) dΠ_γ(v₂)`.
    pub fn integral(&self, p: &SurfacePoint, q: &SurfacePoint) -> Result<KernelValue> {
        let xi = self.xi(p, q)?;
        Ok(self.inner.integral(|r, f| surface_nodes(&xi, r, f)))
    }

    /// Spectral representation `Σ_n e^{-τ n(n+γ+d−1)} P_n(p, q)`.
    pub fn series(&self, p: &SurfacePoint, q: &SurfacePoint) -> Result<KernelValue> {
        let xi = self.xi(p, q)?;
        Ok(self.inner.series(|r, f| surface_nodes(&xi, r, f)))
    }
}

pub fn heat_cone_series(
    tau: f64,
    params: &ConeParams,
    p: &ConePoint,
    q: &ConePoint,
    cfg: &KernelConfig,
) -> Result<KernelValue> {
    ConeKernel::new(params, tau, cfg)?.series(p, q)
}

pub fn heat_cone_integral(
    tau: f64,
    params: &ConeParams,
    p: &ConePoint,
    q: &ConePoint,
    cfg: &KernelConfig,
) -> Result<KernelValue> {
    ConeKernel::new(params, tau, cfg)?.integral(p, q)
}

pub fn heat_surface_series(
    tau: f64,
    params: &SurfaceParams,
    p: &SurfacePoint,
    q: &SurfacePoint,
    cfg: &KernelConfig,
) -> Result<KernelValue> {
    SurfaceKernel::new(params, tau, cfg)?.series(p, q)
}

pub fn heat_surface_integral(
    tau: f64,
    params: &SurfaceParams,
    p: &SurfacePoint,
    q: &SurfacePoint,
    cfg: &KernelConfig,
) -> Result<KernelValue> {
    SurfaceKernel::new(params, tau, cfg)?.integral(p, q)
}

/// Tensor quadrature of `Z_deg^{λ+1/2}(ξ)` with `Z` from the Jacobi recurrence
/// and the closed-form norm.
fn z_quadrature(
    deg: usize,
    lambda: f64,
    rules: &[QuadRule],
    nodes: impl Fn(&[QuadRule], &mut dyn FnMut(f64, f64)),
) -> Result<KernelValue> {
    let lp = PolyParam::new(lambda)?;
    let c = jacobi_at_one(deg, lp) / jacobi_norm_sq(deg, lp);
    let mut acc = CompensatedSum::new();
    nodes(rules, &mut |xi, w| {
        let p = crate::orthopoly::jacobi_recurrence(deg, lambda, xi, |_, _| {});
        acc.add(w * c * p);
    });
    let value = acc.value();
    Ok(KernelValue {
        value,
        error_budget: (4 * deg + 8) as f64 * f64::EPSILON * acc.abs_total() + 1e-13 * value.abs(),
        meta: EvalMeta {
            truncation_n: deg,
            orders: rules.iter().map(|r| r.len()).collect(),
            precision_bits: 53,
        },
    })
}

fn rules_for(nus: &[f64], has_u: bool, deg: usize, orders: &[usize]) -> Result<Vec<QuadRule>> {
    let (mu_, mv) = exact_orders(deg);
    nus.iter()
        .enumerate()
        .map(|(i, nu)| {
            let need = if has_u && i == 0 { mu_ } else { mv };
            pi_rule(*nu, need.max(orders.get(i).copied().unwrap_or(1)))
        })
        .collect()
}

/// Reproducing kernel `P_n(W_{μ,γ}; p, q)` of the degree-`n` cone polynomials.
pub fn reproducing_cone(
    n: usize,
    params: &ConeParams,
    p: &ConePoint,
    q: &ConePoint,
    orders: [usize; 3],
) -> Result<KernelValue> {
    let xi = XiCone::new(p, q)?;
    check_xi_max(xi.a(1.0) + xi.b)?;
    let rules = rules_for(&cone_nus(params), true, 2 * n, &orders)?;
    z_quadrature(2 * n, params.lambda(), &rules, |r, f| cone_nodes(&xi, r, f))
}

/// Reproducing kernel `P_n(φ_γ; p, q)` on the surface.
pub fn reproducing_surface(
    n: usize,
    params: &SurfaceParams,
    p: &SurfacePoint,
    q: &SurfacePoint,
    orders: [usize; 2],
) -> Result<KernelValue> {
    let xi = XiSurface::new(p, q)?;
    check_xi_max(xi.a + xi.b)?;
    let rules = rules_for(&surface_nus(params), false, 2 * n, &orders)?;
    z_quadrature(2 * n, params.lambda(), &rules, |r, f| surface_nodes(&xi, r, f))
}

fn check_odd(n: usize) -> Result<()> {
    if n.is_multiple_of(2) {
        return Err(invalid!("odd_term_residual needs an odd degree, got {n}"));
    }
    Ok(())
}

/// `∫ Z_n(ξ)` over the cone measures for odd `n`; vanishes by the symmetry
/// `ξ(u, −v₁, −v₂) = −ξ(u, v₁, v₂)`.
pub fn odd_term_residual_cone(
    n: usize,
    params: &ConeParams,
    p: &ConePoint,
    q: &ConePoint,
    orders: [usize; 3],
) -> Result<f64> {
    check_odd(n)?;
    let xi = XiCone::new(p, q)?;
    check_xi_max(xi.a(1.0) + xi.b)?;
    let rules = rules_for(&cone_nus(params), true, n, &orders)?;
    Ok(z_quadrature(n, params.lambda(), &rules, |r, f| cone_nodes(&xi, r, f))?.value)
}

/// Surface counterpart of [`odd_term_residual_cone`].
pub fn odd_term_residual_surface(
    n: usize,
    params: &SurfaceParams,
    p: &SurfacePoint,
    q: &SurfacePoint,
    orders: [usize; 2],
) -> Result<f64> {
    check_odd(n)?;
    let xi = XiSurface::new(p, q)?;
    check_xi_max(xi.a + xi.b)?;
    let rules = rules_for(&surface_nus(params), false, n, &orders)?;
    Ok(z_quadrature(n, params.lambda(), &rules, |r, f| surface_nodes(&xi, r, f))?.value)
}
