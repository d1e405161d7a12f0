//! Piecewise Chebyshev interpolant of `ξ ↦ G_s^{λ,λ}(1, ξ)` on `[-1, 1]`.
//!
//! Panels are uniform in `ψ = arccos ξ`. On each panel the truncated series is
//! sampled at the Chebyshev–Lobatto points, converted to Chebyshev coefficients,
//! and compared with direct evaluations at interior check points; the observed
//! deviation (times a safety factor) plus the sampling rounding is stored as the
//! panel's absolute error.

use std::f64::consts::PI;

use crate::error::Result;
use crate::orthopoly::{HeatEvaluator, SeriesBudget};

const DEG: usize = 16;
const CHECKS: [f64; 5] = [0.03, 0.21, 0.5, 0.79, 0.97];
const SAFETY: f64 = 8.0;
const NODE_REL_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub(crate) struct HeatTable {
    bounds: Vec<f64>,
    coeffs: Vec<[f64; DEG + 1]>,
    err: Vec<f64>,
    max_bits: u32,
}

impl HeatTable {
    pub(crate) fn build(tau_quarter: f64, lambda: f64, budget: &SeriesBudget) -> Result<Self> {
        let n = budget.truncation_n;
        let tau = 4.0 * tau_quarter;
        let k = ((PI * n as f64 / 6.0).max(PI * PI / (4.0 * tau)).ceil() as usize).clamp(32, 4096);
        let mut ev = HeatEvaluator::new(tau_quarter, lambda, n);
        // G(1, ·) is increasing; below ξ = 0 an absolute floor relative to G(1, 0) suffices
        let (g0, _, _) = ev.eval(0.0, |v| (NODE_REL_TOL * v.abs()).max(f64::MIN_POSITIVE))?;
        let mut max_bits = 0;
        let mut sample = |ev: &mut HeatEvaluator, xi: f64| -> Result<(f64, f64)> {
            let floor = if xi < 0.0 { NODE_REL_TOL * g0 } else { 0.0 };
            let (v, r, bits) = ev.eval(xi, |v| (NODE_REL_TOL * v.abs()).max(floor).max(f64::MIN_POSITIVE))?;
            max_bits = max_bits.max(bits);
            Ok((v, r))
        };

        let bounds: Vec<f64> = (0..=k).map(|i| -(PI * i as f64 / k as f64).cos()).collect();
        let mut bounds = bounds;
        bounds[0] = -1.0;
        bounds[k] = 1.0;
        let cheb: Vec<f64> = (0..=DEG).map(|j| (PI * j as f64 / DEG as f64).cos()).collect();
        let mut coeffs = Vec::with_capacity(k);
        let mut err = Vec::with_capacity(k);
        for i in 0..k {
            let (lo, hi) = (bounds[i], bounds[i + 1]);
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            let mut vals = [0.0; DEG + 1];
            let mut round: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for (j, c) in cheb.iter().enumerate() {
                let (v, r) = sample(&mut ev, mid + half * c)?;
                vals[j] = v;
                round = round.max(r);
                scale = scale.max(v.abs());
            }
            let c = chebyshev_coefficients(&vals);
            let mut dev: f64 = 0.0;
            for &f in &CHECKS {
                let y = (PI * f).cos();
                let (v, r) = sample(&mut ev, mid + half * y)?;
                round = round.max(r);
                dev = dev.max((clenshaw(&c, y) - v).abs());
            }
            coeffs.push(c);
            err.push(SAFETY * dev + round + 4.0 * f64::EPSILON * scale);
        }
        Ok(HeatTable {
            bounds,
            coeffs,
            err,
            max_bits,
        })
    }

    /// Interpolated value and the absolute error bound of its panel.
    #[inline]
    pub(crate) fn eval(&self, xi: f64) -> (f64, f64) {
        let k = self.coeffs.len();
        let i = self.bounds.partition_point(|b| *b <= xi).saturating_sub(1).min(k - 1);
        let (lo, hi) = (self.bounds[i], self.bounds[i + 1]);
        let y = ((2.0 * xi - lo - hi) / (hi - lo)).clamp(-1.0, 1.0);
        (clenshaw(&self.coeffs[i], y), self.err[i])
    }

    pub(crate) fn max_bits(&self) -> u32 {
        self.max_bits
    }
}

/// Chebyshev coefficients from values at `cos(jπ/DEG)`, `j = 0..=DEG`.
fn chebyshev_coefficients(vals: &[f64; DEG + 1]) -> [f64; DEG + 1] {
    let mut c = [0.0; DEG + 1];
    let n = DEG as f64;
    for (k, ck) in c.iter_mut().enumerate() {
        let mut s = 0.0;
        for (j, v) in vals.iter().enumerate() {
            let h = if j == 0 || j == DEG { 0.5 } else { 1.0 };
            s += h * v * (PI * (j * k) as f64 / n).cos();
        }
        let h = if k == 0 || k == DEG { 0.5 } else { 1.0 };
        *ck = 2.0 * h * s / n;
    }
    c
}

#[inline]
fn clenshaw(c: &[f64; DEG + 1], y: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for ck in c[1..].iter().rev() {
        let b0 = ck + 2.0 * y * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + y * b1 - b2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::{heat_1d, PolyParam, MAX_TERMS};

    #[test]
    fn chebyshev_reproduces_polynomials() {
        let f = |x: f64| 3.0 * x.powi(5) - x * x + 0.25;
        let vals: [f64; DEG + 1] = std::array::from_fn(|j| f((PI * j as f64 / DEG as f64).cos()));
        let c = chebyshev_coefficients(&vals);
        for &y in &[-0.9, -0.1, 0.33, 0.8] {
            assert!((clenshaw(&c, y) - f(y)).abs() < 1e-14);
        }
    }

    #[test]
    fn table_matches_direct_series() {
        for &(tau, lam) in &[(0.3, 2.5), (1.0, 0.0), (0.05, 1.0)] {
            let s = tau / 4.0;
            let lp = PolyParam::new(lam).unwrap();
            let b = SeriesBudget::for_heat(s, lp, 1e-40, MAX_TERMS).unwrap();
            let table = HeatTable::build(s, lam, &b).unwrap();
            for i in 0..=200 {
                let xi = -1.0 + 2.0 * i as f64 / 200.0 + 1e-3 * (i as f64).sin();
                let xi = xi.clamp(-1.0, 1.0);
                let (v, e) = table.eval(xi);
                let direct = heat_1d(s, lp, xi, &b).unwrap();
                let diff = (v - direct.value).abs();
                assert!(diff <= e + direct.error_budget, "tau={tau} xi={xi} diff={diff:e} e={e:e}");
                assert!(diff <= 1e-10 * direct.value.abs() + 1e-12 * table.eval(0.0).0, "tau={tau} xi={xi}");
            }
        }
    }
}
