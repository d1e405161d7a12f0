//! Closed-form comparable expressions for the cone and surface heat kernels,
//! the auxiliary one-dimensional estimates they are built from, and seeded
//! ratio scans.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::{
    dist_cone, dist_surface, sample_pairs, ConeParams, ConePoint, Domain, PointPair, SamplerSpec, SurfaceParams,
    SurfacePoint, XiCone,
};
use crate::kernels::{ConeKernel, KernelConfig, KernelValue, SurfaceKernel};
use crate::numeric::special::ln_gamma;
use crate::numeric::CompensatedSum;
use crate::orthopoly::{heat_1d, PolyParam, SeriesBudget, MAX_TERMS};
use crate::quadrature::{gauss_jacobi, gauss_legendre, LineRule};

fn check_bound_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid!("tau = {tau} must be positive and finite"));
    }
    if tau > 4.0 {
        return Err(invalid!(
            "tau = {tau} outside (0, 4]: the two-sided estimate is stated there; for tau >= 4 the kernel is compared with 1"
        ));
    }
    Ok(())
}

/// `ln` of the cone expression
/// `τ^{−α+μ−1} (√(1−t)√(1−s) ∨ τ)^{−γ−1/2} (√(st+⟨x,y⟩) ∨ τ)^{−α}
///  (√((t²−‖x‖²)(s²−‖y‖²)/(st+⟨x,y⟩)) ∨ τ)^{−μ} e^{−dist²/τ}`.
pub fn ln_bound_cone(tau: f64, params: &ConeParams, p: &ConePoint, q: &ConePoint) -> Result<f64> {
    check_bound_tau(tau)?;
    let xi = XiCone::new(p, q)?;
    let dist = dist_cone(p, q)?;
    let (mu, gamma, alpha) = (params.mu, params.gamma, params.alpha);
    let lateral = if xi.c > 0.0 { xi.r / xi.c.sqrt() } else { 0.0 };
    let mut l = (-alpha + mu - 1.0) * tau.ln();
    l += (-gamma - 0.5) * xi.b.max(tau).ln();
    l += -alpha * xi.c.max(0.0).sqrt().max(tau).ln();
    if mu != 0.0 {
        l += -mu * lateral.max(tau).ln();
    }
    Ok(l - dist * dist / tau)
}

pub fn bound_cone(tau: f64, params: &ConeParams, p: &ConePoint, q: &ConePoint) -> Result<f64> {
    Ok(ln_bound_cone(tau, params, p, q)?.exp())
}

/// `ln` of `τ^{−d/2} (√(1−t)√(1−s) ∨ τ)^{−γ−1/2} (√(st+⟨x,y⟩) ∨ τ)^{−d/2+1} e^{−dist²/τ}`.
pub fn ln_bound_surface(tau: f64, params: &SurfaceParams, p: &SurfacePoint, q: &SurfacePoint) -> Result<f64> {
    check_bound_tau(tau)?;
    let dist = dist_surface(p, q)?;
    let half_d = params.d as f64 / 2.0;
    let b = ((1.0 - p.t()) * (1.0 - q.t())).sqrt();
    let c: f64 = p.t() * q.t() + p.x().iter().zip(q.x()).map(|(a, b)| a * b).sum::<f64>();
    let mut l = -half_d * tau.ln();
    l += (-params.gamma - 0.5) * b.max(tau).ln();
    if params.d != 2 {
        l += (1.0 - half_d) * c.max(0.0).sqrt().max(tau).ln();
    }
    Ok(l - dist * dist / tau)
}

pub fn bound_surface(tau: f64, params: &SurfaceParams, p: &SurfacePoint, q: &SurfacePoint) -> Result<f64> {
    Ok(ln_bound_surface(tau, params, p, q)?.exp())
}

/// Both sides of a one-dimensional estimate, with their logarithms (the
/// values themselves may underflow).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LemmaPair {
    pub lhs: f64,
    pub rhs: f64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
}

impl LemmaPair {
    fn from_logs(ln_lhs: f64, ln_rhs: f64) -> Self {
        LemmaPair {
            lhs: ln_lhs.exp(),
            rhs: ln_rhs.exp(),
            ln_lhs,
            ln_rhs,
        }
    }

    pub fn ratio(&self) -> f64 {
        (self.ln_lhs - self.ln_rhs).exp()
    }
}

const PANEL_ORDER: usize = 24;
const GRADING_LEVELS: i32 = 56;

/// Composite rule on `[0, h]` for `∫ f(σ) σ^b dσ`, `b > -1`, graded
/// geometrically toward both ends. Weights include `σ^b`.
fn graded_rule(h: f64, b: f64) -> Result<LineRule> {
    let gl = gauss_legendre(PANEL_ORDER)?;
    let gj = gauss_jacobi(PANEL_ORDER, 0.0, b)?;
    let mut cuts = Vec::new();
    for k in (1..=GRADING_LEVELS).rev() {
        cuts.push(h * 2f64.powi(-k));
    }
    for k in 1..=GRADING_LEVELS {
        cuts.push(h * (1.0 - 2f64.powi(-k)));
    }
    cuts.push(h);
    cuts.dedup();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    // first panel: Gauss–Jacobi for σ^b on [0, c0]
    let c0 = cuts[0];
    let mass = c0.powf(b + 1.0) / (b + 1.0);
    for (x, w) in gj.nodes.iter().zip(&gj.weights) {
        nodes.push(0.5 * c0 * (x + 1.0));
        weights.push(w * mass);
    }
    for win in cuts.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        if hi <= lo {
            continue;
        }
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let s = lo + 0.5 * (hi - lo) * (x + 1.0);
            nodes.push(s);
            weights.push(w * (hi - lo) * s.powf(b));
        }
    }
    Ok(LineRule { nodes, weights })
}

fn log_sum(rule: &LineRule, f: impl Fn(f64) -> f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc.add(w * f(*x));
    }
    acc.value().ln()
}

/// `(ln c_ν)` of `dΠ_ν`.
fn ln_c_nu(nu: f64) -> f64 {
    ln_gamma(nu + 1.0) - 0.5 * PI.ln() - ln_gamma(nu + 0.5)
}

/// `∫_{[0,1]} e^{−Φ²(w)/D} dΠ_ν(w)` against
/// `D^{ν+1/2} (B/(π − Φ(1)) + D)^{−ν−1/2} e^{−Φ²(1)/D}`, `Φ(w) = arccos(A + Bw)`.
///
/// The measure is `dΠ_ν` restricted to `[0, 1]` (mass 1/2); at `ν = −1/2`
/// that is the atom of weight 1/2 at `w = 1`.
pub fn lnss1_pair(nu: f64, a: f64, b: f64, d: f64) -> Result<LemmaPair> {
    if !(nu >= -0.5) || !nu.is_finite() {
        return Err(invalid!("nu = {nu} must be finite and >= -1/2"));
    }
    if !(0.0..=1.0).contains(&b) {
        return Err(invalid!("B = {b} outside [0, 1]"));
    }
    if !(a >= -1.0 && a <= 1.0 - b) {
        return Err(invalid!("A = {a} outside [-1, 1 - B]"));
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(invalid!("D = {d} must be positive"));
    }
    let phi = |w: f64| (a + b * w).clamp(-1.0, 1.0).acos();
    let phi1 = phi(1.0);
    let peak = -phi1 * phi1 / d;
    let ln_rhs = {
        let s = if b == 0.0 { 0.0 } else { b / (PI - phi1) };
        (nu + 0.5) * (d.ln() - (s + d).ln()) + peak
    };
    let ln_lhs = if nu == -0.5 || b == 0.0 {
        0.5f64.ln() + peak
    } else {
        // ∫_0^1 g(w) (1−w)^{ν−1/2} (1+w)^{ν−1/2} dw with σ = 1 − w
        let rule = graded_rule(1.0, nu - 0.5)?;
        let g = |sigma: f64| {
            let w = 1.0 - sigma;
            let p = phi(w);
            (-(p - phi1) * (p + phi1) / d).exp() * (2.0 - sigma).powf(nu - 0.5)
        };
        ln_c_nu(nu) + log_sum(&rule, g) + peak
    };
    Ok(LemmaPair::from_logs(ln_lhs, ln_rhs))
}

/// `∫_{φ₁}^{φ₀} e^{−ψ²/D} (cos φ₁ − cos ψ)^{ν−1/2} sin ψ dψ` against
/// `D^{ν+1/2} (π−φ₁)^{ν+1/2} ((φ₀−φ₁)φ₀ / ((φ₀−φ₁)φ₀ + D))^{ν+1/2} e^{−φ₁²/D}`.
///
/// Evaluated in `σ = cos φ₁ − cos ψ`. Requires `ν > −1/2` (the integral
/// diverges at `ν = −1/2`).
pub fn lnss2_pair(nu: f64, phi0: f64, phi1: f64, d: f64) -> Result<LemmaPair> {
    if !(nu > -0.5) || !nu.is_finite() {
        return Err(invalid!("nu = {nu} must exceed -1/2 (the integral diverges at -1/2)"));
    }
    if !(0.0 <= phi1 && phi1 < phi0 && phi0 <= PI) {
        return Err(invalid!("need 0 <= phi1 < phi0 <= pi, got phi1 = {phi1}, phi0 = {phi0}"));
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(invalid!("D = {d} must be positive"));
    }
    let delta = 2.0 * (0.5 * (phi0 + phi1)).sin() * (0.5 * (phi0 - phi1)).sin();
    let c1 = phi1.cos();
    let rule = graded_rule(delta, nu - 0.5)?;
    let g = |sigma: f64| {
        let psi = (c1 - sigma).clamp(-1.0, 1.0).acos();
        (-(psi - phi1) * (psi + phi1) / d).exp()
    };
    let peak = -phi1 * phi1 / d;
    let ln_lhs = log_sum(&rule, g) + peak;
    let x = (phi0 - phi1) * phi0;
    let ln_rhs = (nu + 0.5) * (d.ln() + (PI - phi1).ln() + x.ln() - (x + d).ln()) + peak;
    Ok(LemmaPair::from_logs(ln_lhs, ln_rhs))
}

/// `G_{τ/4}^{λ,λ}(1, cos ψ)` against `τ^{−λ−1} (τ + π − ψ)^{−λ−1/2} e^{−ψ²/τ}`.
pub fn lnss3_pair(tau: f64, lambda: f64, psi: f64) -> Result<LemmaPair> {
    check_bound_tau(tau)?;
    if !(0.0..=PI).contains(&psi) {
        return Err(invalid!("psi = {psi} outside [0, pi]"));
    }
    let lp = PolyParam::new(lambda)?;
    let ln_rhs = (-lambda - 1.0) * tau.ln() + (-lambda - 0.5) * (tau + PI - psi).ln() - psi * psi / tau;
    let tail_tol = (ln_rhs - 16.0 * std::f64::consts::LN_10).exp().max(1e-300);
    let budget = SeriesBudget::for_heat(tau / 4.0, lp, tail_tol, MAX_TERMS)?;
    let w = if psi == PI { -1.0 } else { psi.cos() };
    let g = heat_1d(tau / 4.0, lp, w, &budget)?;
    if !(g.value > 0.0) {
        return Err(invalid!("heat series at psi = {psi}, tau = {tau} is not positive ({})", g.value));
    }
    Ok(LemmaPair::from_logs(g.value.ln(), ln_rhs))
}

/// `(τ + π − η)^κ e^{−η²/τ}` against `(τ + π − θ)^κ e^{−θ²/τ}` for `θ <= η`.
pub fn lnss4_check(kappa: f64, tau: f64, theta: f64, eta: f64) -> Result<LemmaPair> {
    if !(tau > 0.0) || !tau.is_finite() || !kappa.is_finite() {
        return Err(invalid!("tau must be positive and kappa finite"));
    }
    if !(0.0 <= theta && theta <= eta && eta <= PI) {
        return Err(invalid!("need 0 <= theta <= eta <= pi"));
    }
    let ln_lhs = kappa * (tau + PI - eta).ln() - eta * eta / tau;
    let ln_rhs = kappa * (tau + PI - theta).ln() - theta * theta / tau;
    Ok(LemmaPair::from_logs(ln_lhs, ln_rhs))
}

/// What the kernel is divided by in a scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparator {
    /// The closed-form expression (`τ <= 4`).
    Estimate,
    /// The constant 1 (the `τ >= 4` regime).
    One,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSpec {
    pub domain: Domain,
    pub d: usize,
    /// Ignored on the surface.
    pub mu: f64,
    pub gamma: f64,
    pub tau_grid: Vec<f64>,
    pub samples: usize,
    pub sampler: SamplerSpec,
    pub seed: u64,
    pub comparator: Comparator,
    pub kernel: KernelConfig,
}

impl ScanSpec {
    pub fn new(domain: Domain, d: usize, mu: f64, gamma: f64) -> Self {
        ScanSpec {
            domain,
            d,
            mu,
            gamma,
            tau_grid: log_grid(0.05, 4.0, 16),
            samples: 320,
            sampler: SamplerSpec::new(domain),
            seed: 20_240_601,
            comparator: Comparator::Estimate,
            kernel: KernelConfig::minimal(),
        }
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// A number together with its error budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Budgeted {
    pub value: f64,
    pub error_budget: f64,
}

/// One `(pair, τ)` evaluation of a scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRecord {
    pub tau: f64,
    pub pair_index: usize,
    pub pair: PointPair,
    pub kernel: KernelValue,
    pub comparator: f64,
    pub ratio: Budgeted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extremum {
    pub ratio: Budgeted,
    pub tau: f64,
    pub pair: PointPair,
    pub kernel: Budgeted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanParams {
    pub domain: Domain,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    pub gamma: f64,
    pub comparator: Comparator,
    pub tau_grid: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

/// Summary of a ratio scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub schema: u32,
    pub params: ScanParams,
    pub window: Budgeted,
    pub min_ratio: Budgeted,
    pub max_ratio: Budgeted,
    pub argmin: Extremum,
    pub argmax: Extremum,
    pub n_evals: usize,
    /// Largest `error_budget / value` over all kernel evaluations.
    pub max_relative_budget: f64,
    /// Seconds; omitted from deterministic output.
    pub wall_time: Option<f64>,
}

enum Prepared {
    Cone(ConeParams, Vec<(ConePoint, ConePoint)>),
    Surface(SurfaceParams, Vec<(SurfacePoint, SurfacePoint)>),
}

/// Runs a seeded ratio scan. Output does not depend on the thread count.
pub fn scan(spec: &ScanSpec) -> Result<(RatioReport, Vec<ScanRecord>)> {
    let started = Instant::now();
    if spec.tau_grid.is_empty() {
        return Err(invalid!("empty tau grid"));
    }
    for &tau in &spec.tau_grid {
        if spec.comparator == Comparator::Estimate {
            check_bound_tau(tau)?;
        } else if !(tau > 0.0) || !tau.is_finite() {
            return Err(invalid!("tau = {tau} must be positive and finite"));
        }
    }
    let pairs = sample_pairs(spec.domain, spec.d, &spec.sampler, spec.samples, spec.seed)?;
    let prepared = match spec.domain {
        Domain::Cone => Prepared::Cone(
            ConeParams::new(spec.d, spec.mu, spec.gamma)?,
            pairs.iter().map(|p| p.cone()).collect::<Result<_>>()?,
        ),
        Domain::Surface => Prepared::Surface(
            SurfaceParams::new(spec.d, spec.gamma)?,
            pairs.iter().map(|p| p.surface()).collect::<Result<_>>()?,
        ),
    };
    let mut records = Vec::with_capacity(pairs.len() * spec.tau_grid.len());
    for &tau in &spec.tau_grid {
        let evals: Vec<(KernelValue, f64)> = match &prepared {
            Prepared::Cone(pr, pts) => {
                let k = ConeKernel::new(pr, tau, &spec.kernel)?;
                pts.par_iter()
                    .map(|(p, q)| {
                        let kv = k.integral(p, q)?;
                        let c = match spec.comparator {
                            Comparator::Estimate => ln_bound_cone(tau, pr, p, q)?,
                            Comparator::One => 0.0,
                        };
                        Ok((kv, c))
                    })
                    .collect::<Result<_>>()?
            }
            Prepared::Surface(pr, pts) => {
                let k = SurfaceKernel::new(pr, tau, &spec.kernel)?;
                pts.par_iter()
                    .map(|(p, q)| {
                        let kv = k.integral(p, q)?;
                        let c = match spec.comparator {
                            Comparator::Estimate => ln_bound_surface(tau, pr, p, q)?,
                            Comparator::One => 0.0,
                        };
                        Ok((kv, c))
                    })
                    .collect::<Result<_>>()?
            }
        };
        for (i, (kv, ln_c)) in evals.into_iter().enumerate() {
            if !(kv.value > 0.0) {
                return Err(crate::Error::Tolerance(format!(
                    "non-positive kernel value {} at tau = {tau}, pair {i}",
                    kv.value
                )));
            }
            let ratio = (kv.value.ln() - ln_c).exp();
            let rel = kv.error_budget / kv.value;
            records.push(ScanRecord {
                tau,
                pair_index: i,
                pair: pairs[i].clone(),
                comparator: ln_c.exp(),
                ratio: Budgeted {
                    value: ratio,
                    error_budget: ratio * rel,
                },
                kernel: kv,
            });
        }
    }
    let mut imin = 0;
    let mut imax = 0;
    let mut max_rel: f64 = 0.0;
    for (i, r) in records.iter().enumerate() {
        if r.ratio.value < records[imin].ratio.value {
            imin = i;
        }
        if r.ratio.value > records[imax].ratio.value {
            imax = i;
        }
        max_rel = max_rel.max(r.kernel.error_budget / r.kernel.value);
    }
    let ext = |r: &ScanRecord| Extremum {
        ratio: r.ratio,
        tau: r.tau,
        pair: r.pair.clone(),
        kernel: Budgeted {
            value: r.kernel.value,
            error_budget: r.kernel.error_budget,
        },
    };
    let (lo, hi) = (records[imin].ratio, records[imax].ratio);
    let window = hi.value / lo.value;
    let report = RatioReport {
        schema: 1,
        params: ScanParams {
            domain: spec.domain,
            d: spec.d,
            mu: (spec.domain == Domain::Cone).then_some(spec.mu),
            gamma: spec.gamma,
            comparator: spec.comparator,
            tau_grid: spec.tau_grid.clone(),
            samples: spec.samples,
            seed: spec.seed,
        },
        window: Budgeted {
            value: window,
            error_budget: window * (lo.error_budget / lo.value + hi.error_budget / hi.value),
        },
        min_ratio: lo,
        max_ratio: hi,
        argmin: ext(&records[imin]),
        argmax: ext(&records[imax]),
        n_evals: records.len(),
        max_relative_budget: max_rel,
        wall_time: None,
    };
    let _ = started;
    Ok((report, records))
}

/// Like [`scan`], recording the elapsed wall time in the report.
pub fn scan_timed(spec: &ScanSpec) -> Result<(RatioReport, Vec<ScanRecord>)> {
    let started = Instant::now();
    let (mut report, records) = scan(spec)?;
    report.wall_time = Some(started.elapsed().as_secs_f64());
    Ok((report, records))
}

/// Writes scan records as CSV: `tau, pair, stratum, x…, t, y…, s, kernel,
/// kernel_budget, comparator, ratio, ratio_budget`.
pub fn write_records_csv<W: std::io::Write>(records: &[ScanRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = records.first() {
        let d = first.pair.x.len();
        let mut header = vec!["tau".to_string(), "pair".into(), "stratum".into()];
        header.extend((1..=d).map(|i| format!("x{i}")));
        header.push("t".into());
        header.extend((1..=d).map(|i| format!("y{i}")));
        header.push("s".into());
        for h in ["kernel", "kernel_budget", "comparator", "ratio", "ratio_budget"] {
            header.push(h.into());
        }
        w.write_record(&header)?;
    }
    for r in records {
        let mut rec = vec![format!("{:e}", r.tau), r.pair_index.to_string(), r.pair.stratum.name().into()];
        rec.extend(r.pair.x.iter().map(|v| format!("{v:e}")));
        rec.push(format!("{:e}", r.pair.t));
        rec.extend(r.pair.y.iter().map(|v| format!("{v:e}")));
        rec.push(format!("{:e}", r.pair.s));
        for v in [
            r.kernel.value,
            r.kernel.error_budget,
            r.comparator,
            r.ratio.value,
            r.ratio.error_budget,
        ] {
            rec.push(format!("{v:e}"));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Ratio extremes over the configurations sharing one leading parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaGroup {
    pub key: f64,
    pub n_configs: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub ln_min_ratio: f64,
    pub ln_max_ratio: f64,
    /// `max_ratio / min_ratio`; infinite when the minimum underflows.
    pub window: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
}

/// Extremes of a lemma grid, overall and grouped by the first coordinate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub name: String,
    pub n_configs: usize,
    pub overall: LemmaGroup,
    pub groups: Vec<LemmaGroup>,
}

fn extremes(configs: &[&Vec<f64>], ln_ratios: &[f64]) -> LemmaGroup {
    let (mut imin, mut imax) = (0, 0);
    for (i, r) in ln_ratios.iter().enumerate() {
        if *r < ln_ratios[imin] {
            imin = i;
        }
        if *r > ln_ratios[imax] {
            imax = i;
        }
    }
    let (lo, hi) = (ln_ratios[imin], ln_ratios[imax]);
    LemmaGroup {
        key: configs[0][0],
        n_configs: configs.len(),
        min_ratio: lo.exp(),
        max_ratio: hi.exp(),
        ln_min_ratio: lo,
        ln_max_ratio: hi,
        window: (hi - lo).exp(),
        argmin: configs[imin].clone(),
        argmax: configs[imax].clone(),
    }
}

/// Evaluates `f` on every configuration and records the ratio extremes.
pub fn lemma_scan(
    name: &str,
    configs: &[Vec<f64>],
    f: impl Fn(&[f64]) -> Result<LemmaPair> + Sync,
) -> Result<LemmaReport> {
    if configs.is_empty() || configs.iter().any(|c| c.is_empty()) {
        return Err(invalid!("empty lemma grid or configuration"));
    }
    let ln_ratios: Vec<f64> = configs
        .par_iter()
        .map(|c| f(c).map(|p| p.ln_lhs - p.ln_rhs))
        .collect::<Result<_>>()?;
    if let Some(i) = ln_ratios.iter().position(|r| !r.is_finite()) {
        return Err(crate::Error::Tolerance(format!(
            "{name}: log ratio {} at {:?}",
            ln_ratios[i], configs[i]
        )));
    }
    let all: Vec<&Vec<f64>> = configs.iter().collect();
    let mut keys: Vec<f64> = Vec::new();
    for c in configs {
        if !keys.contains(&c[0]) {
            keys.push(c[0]);
        }
    }
    let groups = keys
        .iter()
        .map(|k| {
            let idx: Vec<usize> = (0..configs.len()).filter(|&i| configs[i][0] == *k).collect();
            let cs: Vec<&Vec<f64>> = idx.iter().map(|&i| &configs[i]).collect();
            let rs: Vec<f64> = idx.iter().map(|&i| ln_ratios[i]).collect();
            extremes(&cs, &rs)
        })
        .collect();
    Ok(LemmaReport {
        name: name.into(),
        n_configs: configs.len(),
        overall: extremes(&all, &ln_ratios),
        groups,
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Default LNSS1 grid `(ν, A, B, D)`; `dirac` selects only `ν = −1/2`.
pub fn lnss1_grid(dirac: bool) -> Vec<Vec<f64>> {
    let nus: Vec<f64> = if dirac { vec![-0.5] } else { vec![-0.25, 0.0, 0.5, 1.0, 2.5] };
    let mut out = Vec::new();
    for &nu in &nus {
        for &b in &[0.0, 1e-3, 0.05, 0.2, 0.5, 0.8, 1.0] {
            for a in linspace(-1.0, 1.0 - b, 6) {
                for d in log_grid(1e-3, 1e2, 8) {
                    out.push(vec![nu, a, b, d]);
                }
            }
        }
    }
    out
}

/// Default LNSS2 grid `(ν, φ₀, φ₁, D)`.
pub fn lnss2_grid() -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for &nu in &[-0.25, 0.0, 0.5, 1.0, 2.5] {
        for &phi1 in &[0.0, 0.3, 1.0, 2.0, 3.0] {
            for &frac in &[1e-3, 0.05, 0.3, 0.7, 1.0] {
                let phi0 = (phi1 + frac * (PI - phi1)).min(PI);
                for d in log_grid(1e-3, 1e2, 10) {
                    out.push(vec![nu, phi0, phi1, d]);
                }
            }
        }
    }
    out
}

/// Default LNSS3 grid `(λ, τ, ψ)`.
pub fn lnss3_grid() -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for &lambda in &[0.0, 0.5, 1.0, 2.5, 5.5] {
        for tau in log_grid(0.05, 4.0, 12) {
            for psi in linspace(0.0, PI, 20) {
                out.push(vec![lambda, tau, psi]);
            }
        }
    }
    out
}

/// Default LNSS4 grid `(κ, τ, θ, η)` for one `κ`.
pub fn lnss4_grid(kappa: f64) -> Vec<Vec<f64>> {
    let angles = linspace(0.0, PI, 9);
    let mut out = Vec::new();
    for tau in log_grid(1e-3, 1e3, 25) {
        for (i, &theta) in angles.iter().enumerate() {
            for &eta in &angles[i..] {
                out.push(vec![kappa, tau, theta, eta]);
            }
        }
    }
    out
}
