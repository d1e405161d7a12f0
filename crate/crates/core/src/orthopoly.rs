//! Symmetric Jacobi polynomials `P_n^{λ,λ}`, their norms under the normalized
//! measure `dΠ_{λ+1/2}`, the kernel function `Z_n^{λ+1/2}` and the 1-d Jacobi
//! heat kernel `G_s^{λ,λ}(1, w) = Σ_n e^{-s n(n+2λ+1)} Z_n^{λ+1/2}(w)`.
//!
//! # Tail control
//!
//! `Z_n(1) = (2n+2λ+1)/(2λ+1) · Γ(n+2λ+1)/(n! Γ(2λ+1))` and `|Z_n(w)| <= Z_n(1)`
//! on `[-1, 1]`. The binomial factor satisfies
//! `Γ(n+a+1)/(n! Γ(a+1)) = Π_{j<=n} (1 + a/j) <= (n+1)^{max(a,1)}`
//! (Bernoulli's inequality for `a >= 1`, monotonicity in `a` below), which gives
//! the polynomial growth bound used to pick a truncation. The reported tail bound
//! itself is sharper: the term ratio `t_{m+1}/t_m` of `t_m = e^{-s λ_m} Z_m(1)` is
//! decreasing in `m`, so `Σ_{m>N} t_m <= t_{N+1} / (1 - t_{N+2}/t_{N+1})`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::kernels::{EvalMeta, KernelValue};
use crate::numeric::special::ln_gamma;
use crate::numeric::{Dd, Mp, Scalar};

/// Inputs with `|w| ∈ (1, 1 + CLAMP_TOL]` are clamped to `±1`.
pub const CLAMP_TOL: f64 = 1e-12;

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 100_000;

/// The common Jacobi index `λ >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct PolyParam(f64);

impl PolyParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(invalid!("Jacobi index must be finite and >= 0, got {lambda}"));
        }
        Ok(PolyParam(lambda))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Clamps `w` into `[-1, 1]` if it overshoots by at most [`CLAMP_TOL`].
pub fn clamp_unit(w: f64) -> Result<f64> {
    if w.abs() <= 1.0 {
        Ok(w)
    } else if w.abs() <= 1.0 + CLAMP_TOL {
        Ok(w.signum())
    } else {
        Err(invalid!("argument {w} outside [-1, 1]"))
    }
}

/// `P_n^{λ,λ}(w)` by the three-term recurrence
/// `n(n+2λ) P_n = (2n+2λ-1)(n+λ) w P_{n-1} - (n+λ-1)(n+λ) P_{n-2}`.
pub fn eval_jacobi(n: usize, lambda: PolyParam, w: f64) -> Result<f64> {
    let w = clamp_unit(w)?;
    Ok(jacobi_recurrence(n, lambda.get(), w, |_, _| {}))
}

/// Runs the recurrence up to degree `n`, calling `visit(k, P_k(w))` for each
/// degree, and returns `P_n(w)`.
#[inline]
pub(crate) fn jacobi_recurrence(n: usize, lambda: f64, w: f64, mut visit: impl FnMut(usize, f64)) -> f64 {
    let mut prev = 1.0;
    visit(0, prev);
    if n == 0 {
        return prev;
    }
    let mut cur = (lambda + 1.0) * w;
    visit(1, cur);
    for k in 2..=n {
        let kf = k as f64;
        let a = (2.0 * kf + 2.0 * lambda - 1.0) * (kf + lambda);
        let b = (kf + lambda - 1.0) * (kf + lambda);
        let c = kf * (kf + 2.0 * lambda);
        let next = (a * w * cur - b * prev) / c;
        prev = cur;
        cur = next;
        visit(k, cur);
    }
    cur
}

/// `P_n^{λ,λ}(1) = Γ(n+λ+1) / (n! Γ(λ+1))`.
pub fn jacobi_at_one(n: usize, lambda: PolyParam) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let l = lambda.get();
    let nf = n as f64;
    (ln_gamma(nf + l + 1.0) - ln_gamma(nf + 1.0) - ln_gamma(l + 1.0)).exp()
}

/// Squared norm `h_n^{λ,λ} = ∫ (P_n^{λ,λ})² dΠ_{λ+1/2}` in the normalized measure:
///
/// `h_n = Γ(n+λ+1)² Γ(2λ+2) / ((2n+2λ+1) Γ(n+2λ+1) n! Γ(λ+1)²)`.
pub fn jacobi_norm_sq(n: usize, lambda: PolyParam) -> f64 {
    if n == 0 {
        return 1.0;
    }
    ln_jacobi_norm_sq(n, lambda.get()).exp()
}

pub(crate) fn ln_jacobi_norm_sq(n: usize, l: f64) -> f64 {
    let nf = n as f64;
    2.0 * ln_gamma(nf + l + 1.0) + ln_gamma(2.0 * l + 2.0)
        - (2.0 * nf + 2.0 * l + 1.0).ln()
        - ln_gamma(nf + 2.0 * l + 1.0)
        - ln_gamma(nf + 1.0)
        - 2.0 * ln_gamma(l + 1.0)
}

/// `Z_n^{λ+1/2}(w) = P_n^{λ,λ}(1) P_n^{λ,λ}(w) / h_n^{λ,λ}`.
pub fn eval_z(n: usize, lambda: PolyParam, w: f64) -> Result<f64> {
    let p1 = eval_jacobi(n, lambda, 1.0)?;
    let pw = eval_jacobi(n, lambda, w)?;
    Ok(p1 * pw / jacobi_norm_sq(n, lambda))
}

/// Closed form of `Z_n^{λ+1/2}(1)`.
pub fn z_at_one(n: usize, lambda: PolyParam) -> f64 {
    ln_z_at_one(n, lambda.get()).exp()
}

fn ln_z_at_one(n: usize, l: f64) -> f64 {
    let nf = n as f64;
    ((2.0 * nf + 2.0 * l + 1.0) / (2.0 * l + 1.0)).ln() + ln_gamma(nf + 2.0 * l + 1.0)
        - ln_gamma(nf + 1.0)
        - ln_gamma(2.0 * l + 1.0)
}

/// Polynomial majorant `(2n+2λ+1)/(2λ+1) · (n+1)^{max(2λ,1)}` of `Z_n(1)`.
pub fn z_at_one_bound(n: usize, lambda: PolyParam) -> f64 {
    let l = lambda.get();
    let nf = n as f64;
    (2.0 * nf + 2.0 * l + 1.0) / (2.0 * l + 1.0) * (nf + 1.0).powf((2.0 * l).max(1.0))
}

/// Truncation of the 1-d heat series together with a rigorous bound on the
/// dropped tail, valid uniformly in `w ∈ [-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesBudget {
    pub truncation_n: usize,
    pub tail_bound: f64,
}

impl SeriesBudget {
    /// Smallest truncation (from the default rule, grown as needed) whose tail
    /// bound does not exceed `tail_tol`.
    pub fn for_heat(tau_quarter: f64, lambda: PolyParam, tail_tol: f64, max_terms: usize) -> Result<Self> {
        check_tau(tau_quarter)?;
        if !(tail_tol > 0.0) {
            return Err(invalid!("tail tolerance must be positive, got {tail_tol}"));
        }
        let mut n = 10;
        for _ in 0..3 {
            let zbar = z_at_one_bound(n, lambda);
            let arg = (zbar / tail_tol).ln().max(1.0);
            n = (arg / tau_quarter).sqrt().ceil() as usize + 10;
        }
        loop {
            if n > max_terms {
                return Err(Error::Tolerance(format!(
                    "heat series needs more than {max_terms} terms for tail {tail_tol:e} at s = {tau_quarter}"
                )));
            }
            let tail = heat_tail_bound(tau_quarter, lambda, n);
            if tail <= tail_tol {
                return Ok(SeriesBudget { truncation_n: n, tail_bound: tail });
            }
            n += (n / 8).max(1);
        }
    }

    /// Budget for a caller-chosen truncation.
    pub fn with_truncation(tau_quarter: f64, lambda: PolyParam, truncation_n: usize) -> Result<Self> {
        check_tau(tau_quarter)?;
        Ok(SeriesBudget {
            truncation_n,
            tail_bound: heat_tail_bound(tau_quarter, lambda, truncation_n),
        })
    }
}

fn check_tau(tau_quarter: f64) -> Result<()> {
    if !(tau_quarter > 0.0) || !tau_quarter.is_finite() {
        return Err(invalid!("time parameter must be positive and finite, got {tau_quarter}"));
    }
    Ok(())
}

/// Bound on `Σ_{m>n} e^{-s λ_m} Z_m(1)`; `+∞` if the geometric majorant does
/// not yet converge at `n`.
pub fn heat_tail_bound(tau_quarter: f64, lambda: PolyParam, n: usize) -> f64 {
    let l = lambda.get();
    let m = (n + 1) as f64;
    let ln_t = -tau_quarter * m * (m + 2.0 * l + 1.0) + ln_z_at_one(n + 1, l);
    let rho = (2.0 * m + 2.0 * l + 3.0) / (2.0 * m + 2.0 * l + 1.0) * (m + 2.0 * l + 1.0) / (m + 1.0);
    let q = rho * (-tau_quarter * (2.0 * m + 2.0 * l + 2.0)).exp();
    if q >= 1.0 {
        return f64::INFINITY;
    }
    ln_t.exp() / (1.0 - q)
}

/// Coefficient tables for `Σ_{n<=N} e^{-s λ_n} Z_n(w)` in a given scalar type.
///
/// `Z_n` is generated by its own recurrence (the Jacobi recurrence with the
/// normalization folded in, so every coefficient is rational in `n` and `λ`):
/// `Z_n = (2n+2λ+1)/n · w Z_{n-1} - (n+2λ-1)(2n+2λ+1)/(n(2n+2λ-3)) · Z_{n-2}`.
pub(crate) struct HeatSeries<S: Scalar> {
    prec: S::Prec,
    z1: S,
    a: Vec<S>,
    b: Vec<S>,
    weight: Vec<S>,
}

impl<S: Scalar> HeatSeries<S> {
    pub(crate) fn new(tau_quarter: f64, lambda: f64, n: usize, prec: S::Prec) -> Self {
        let lift = |x: f64| S::from_f64(x, prec);
        let two_l = lift(2.0 * lambda);
        let z1 = two_l.clone() + lift(3.0);
        let mut a = Vec::with_capacity(n + 1);
        let mut b = Vec::with_capacity(n + 1);
        let mut weight = Vec::with_capacity(n + 1);
        // e^{-s(λ_k - λ_{k-1})} = e^{-2λs} (e^{-2s})^k
        let step_l = S::exp(&(lift(-2.0 * tau_quarter) * lift(lambda)));
        let step_r = S::exp(&lift(-2.0 * tau_quarter));
        let mut rk = lift(1.0);
        let mut w = lift(1.0);
        for k in 0..=n {
            if k >= 1 {
                rk = rk * step_r.clone();
                w = w * step_l.clone() * rk.clone();
            }
            weight.push(w.clone());
            if k >= 2 {
                let kk = lift(k as f64);
                let num_a = lift(2.0 * k as f64 + 1.0) + two_l.clone();
                a.push(num_a.clone() / kk.clone());
                let num_b = (lift(k as f64 - 1.0) + two_l.clone()) * num_a;
                let den_b = kk * (lift(2.0 * k as f64 - 3.0) + two_l.clone());
                b.push(num_b / den_b);
            } else {
                a.push(lift(0.0));
                b.push(lift(0.0));
            }
        }
        HeatSeries { prec, z1, a, b, weight }
    }

    pub(crate) fn truncation(&self) -> usize {
        self.weight.len() - 1
    }

    /// Returns the partial sum and the sum of absolute values of its terms.
    pub(crate) fn eval(&self, w: f64) -> (S, f64) {
        let n = self.truncation();
        let ws = S::from_f64(w, self.prec);
        let mut sum = self.weight[0].clone();
        let mut abs = self.weight[0].to_f64().abs();
        if n == 0 {
            return (sum, abs);
        }
        let mut prev = S::from_f64(1.0, self.prec);
        let mut cur = self.z1.clone() * ws.clone();
        let t = self.weight[1].clone() * cur.clone();
        abs += t.to_f64().abs();
        sum = sum + t;
        for k in 2..=n {
            let next = self.a[k].clone() * ws.clone() * cur.clone() - self.b[k].clone() * prev;
            prev = cur;
            cur = next;
            let t = self.weight[k].clone() * cur.clone();
            abs += t.to_f64().abs();
            sum = sum + t;
        }
        (sum, abs)
    }

    /// Rounding error estimate for a partial sum with absolute mass `abs`.
    pub(crate) fn rounding_estimate(&self, abs: f64) -> f64 {
        6.0 * (self.truncation() as f64 + 2.0) * S::unit_roundoff(self.prec) * abs
    }
}

/// Working precision used by [`heat_1d`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    DoubleDouble,
    Bits(usize),
}

impl Precision {
    pub fn bits(self) -> u32 {
        match self {
            Precision::Double => 53,
            Precision::DoubleDouble => 106,
            Precision::Bits(b) => b as u32,
        }
    }
}

/// Relative rounding error accepted by [`heat_1d`] before it escalates precision.
pub const HEAT_1D_REL_TOL: f64 = 1e-10;

const ESCALATION_BITS: [usize; 4] = [256, 512, 1024, 2048];

/// Evaluates one truncated 1-d heat series at many points, escalating from
/// double-double to multiprecision only where cancellation requires it.
pub(crate) struct HeatEvaluator {
    tau_quarter: f64,
    lambda: f64,
    n: usize,
    dd: HeatSeries<Dd>,
    mp: Vec<HeatSeries<Mp>>,
}

impl HeatEvaluator {
    pub(crate) fn new(tau_quarter: f64, lambda: f64, n: usize) -> Self {
        HeatEvaluator {
            tau_quarter,
            lambda,
            n,
            dd: HeatSeries::new(tau_quarter, lambda, n, ()),
            mp: Vec::new(),
        }
    }

    /// Returns `(value, rounding estimate, bits)` for the first precision whose
    /// rounding estimate is at most `tol(value)`.
    pub(crate) fn eval(&mut self, w: f64, tol: impl Fn(f64) -> f64) -> Result<(f64, f64, u32)> {
        let (v, abs) = self.dd.eval(w);
        let (value, rounding) = (v.to_f64(), self.dd.rounding_estimate(abs));
        if rounding <= tol(value) {
            return Ok((value, rounding, Precision::DoubleDouble.bits()));
        }
        for (level, bits) in ESCALATION_BITS.into_iter().enumerate() {
            if self.mp.len() <= level {
                self.mp.push(HeatSeries::new(self.tau_quarter, self.lambda, self.n, bits));
            }
            let s = &self.mp[level];
            let (v, abs) = s.eval(w);
            let (value, rounding) = (v.to_f64(), s.rounding_estimate(abs));
            if rounding <= tol(value) {
                return Ok((value, rounding, bits as u32));
            }
        }
        Err(Error::Tolerance(format!(
            "heat series at w = {w} not resolved at {} bits",
            ESCALATION_BITS[ESCALATION_BITS.len() - 1]
        )))
    }
}

/// `G_s^{λ,λ}(1, w)` with `s = τ/4`, truncated per `budget`.
///
/// Evaluated in double-double; if the cancellation in the series leaves less
/// than [`HEAT_1D_REL_TOL`] relative accuracy the evaluation is repeated in
/// multiprecision (256 up to 2048 bits).
pub fn heat_1d(tau_quarter: f64, lambda: PolyParam, w: f64, budget: &SeriesBudget) -> Result<KernelValue> {
    check_tau(tau_quarter)?;
    let w = clamp_unit(w)?;
    let mut ev = HeatEvaluator::new(tau_quarter, lambda.get(), budget.truncation_n);
    let (value, rounding, bits) = ev.eval(w, |v| (HEAT_1D_REL_TOL * v.abs()).max(f64::MIN_POSITIVE))?;
    Ok(KernelValue {
        value,
        error_budget: budget.tail_bound + rounding,
        meta: EvalMeta {
            truncation_n: budget.truncation_n,
            orders: Vec::new(),
            precision_bits: bits,
        },
    })
}

/// [`heat_1d`] at a fixed working precision. Also returns the rounding part of
/// the error budget.
pub fn heat_1d_at(
    tau_quarter: f64,
    lambda: PolyParam,
    w: f64,
    budget: &SeriesBudget,
    prec: Precision,
) -> Result<(KernelValue, f64)> {
    check_tau(tau_quarter)?;
    let w = clamp_unit(w)?;
    let n = budget.truncation_n;
    let l = lambda.get();
    let (value, rounding) = match prec {
        Precision::Double => {
            let s = HeatSeries::<f64>::new(tau_quarter, l, n, ());
            let (v, abs) = s.eval(w);
            (v, s.rounding_estimate(abs))
        }
        Precision::DoubleDouble => {
            let s = HeatSeries::<Dd>::new(tau_quarter, l, n, ());
            let (v, abs) = s.eval(w);
            (v.to_f64(), s.rounding_estimate(abs))
        }
        Precision::Bits(bits) => {
            let s = HeatSeries::<Mp>::new(tau_quarter, l, n, bits);
            let (v, abs) = s.eval(w);
            (v.to_f64(), s.rounding_estimate(abs))
        }
    };
    let kv = KernelValue {
        value,
        error_budget: budget.tail_bound + rounding,
        meta: EvalMeta {
            truncation_n: n,
            orders: Vec::new(),
            precision_bits: prec.bits(),
        },
    };
    Ok((kv, rounding))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(l: f64) -> PolyParam {
        PolyParam::new(l).unwrap()
    }

    /// Legendre values via Bonnet's recurrence in exact rational steps
    /// (independent oracle: evaluated in multiprecision).
    fn legendre_oracle(n: usize, w: f64) -> f64 {
        let x = Mp::new(w, 200);
        let mut p0 = Mp::new(1.0, 200);
        let mut p1 = x.clone();
        if n == 0 {
            return 1.0;
        }
        for k in 2..=n {
            let kf = k as f64;
            let p2 = (Mp::new(2.0 * kf - 1.0, 200) * x.clone() * p1.clone() - Mp::new(kf - 1.0, 200) * p0)
                / Mp::new(kf, 200);
            p0 = p1;
            p1 = p2;
        }
        p1.to_f64()
    }

    #[test]
    fn degree_zero_is_one() {
        for &l in &[0.0, 0.5, 3.7] {
            for &w in &[-1.0, -0.2, 0.9] {
                assert_eq!(eval_jacobi(0, lam(l), w).unwrap(), 1.0);
                assert_eq!(eval_z(0, lam(l), w).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn legendre_cubic() {
        let v = eval_jacobi(3, lam(0.0), 0.5).unwrap();
        assert!((v - (-0.4375)).abs() < 1e-15);
        assert!((legendre_oracle(3, 0.5) - (-0.4375)).abs() < 1e-15);
        for n in 0..40 {
            for &w in &[-0.93, -0.31, 0.0, 0.47, 0.99] {
                let a = eval_jacobi(n, lam(0.0), w).unwrap();
                assert!((a - legendre_oracle(n, w)).abs() < 1e-13, "n={n} w={w}");
            }
        }
    }

    #[test]
    fn parity_example() {
        let a = eval_jacobi(4, lam(1.5), -0.3).unwrap();
        let b = eval_jacobi(4, lam(1.5), 0.3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn norm_examples() {
        for &l in &[0.0, 0.5, 2.0, 6.5] {
            assert!((jacobi_norm_sq(0, lam(l)) - 1.0).abs() < 1e-14);
        }
        assert!((jacobi_norm_sq(1, lam(0.0)) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn z_examples() {
        let z = eval_z(1, lam(0.0), 0.5).unwrap();
        assert!((z - 1.5).abs() < 1e-14);
        let a = eval_z(5, lam(2.0), -0.7).unwrap();
        let b = eval_z(5, lam(2.0), 0.7).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn z_closed_form_at_one() {
        for &l in &[0.0, 0.5, 1.0, 2.5, 6.5] {
            for n in 0..60 {
                let direct = eval_z(n, lam(l), 1.0).unwrap();
                let closed = z_at_one(n, lam(l));
                assert!((direct / closed - 1.0).abs() < 1e-11, "n={n} l={l}");
                assert!(closed <= z_at_one_bound(n, lam(l)) * (1.0 + 1e-12));
            }
        }
        assert_eq!(z_at_one(7, lam(0.0)).round(), 15.0);
    }

    #[test]
    fn folded_recurrence_matches_quotient_form() {
        for &l in &[0.0, 0.5, 1.0, 3.25] {
            for &w in &[-0.8, 0.1, 0.77, 1.0] {
                // unit weights (s -> 0) are not available; compare term by term instead
                let n = 25;
                let mut z_prev = 1.0;
                let mut z_cur = (2.0 * l + 3.0) * w;
                for k in 2..=n {
                    let kf = k as f64;
                    let a = (2.0 * kf + 2.0 * l + 1.0) / kf;
                    let b = (kf + 2.0 * l - 1.0) * (2.0 * kf + 2.0 * l + 1.0) / (kf * (2.0 * kf + 2.0 * l - 3.0));
                    let next = a * w * z_cur - b * z_prev;
                    z_prev = z_cur;
                    z_cur = next;
                    let reference = eval_z(k, lam(l), w).unwrap();
                    let scale = z_at_one(k, lam(l));
                    assert!((z_cur - reference).abs() <= 1e-12 * scale, "k={k} l={l} w={w}");
                }
            }
        }
    }

    #[test]
    fn rejects_outside_interval() {
        assert!(eval_jacobi(3, lam(1.0), 1.0 + 1e-9).is_err());
        assert_eq!(
            eval_jacobi(3, lam(1.0), 1.0 + 1e-13).unwrap(),
            eval_jacobi(3, lam(1.0), 1.0).unwrap()
        );
        assert!(PolyParam::new(-0.1).is_err());
    }

    #[test]
    fn heat_1d_legendre_at_one() {
        // Σ e^{-0.5 n(n+1)} (2n+1), summed directly
        let b = SeriesBudget::for_heat(0.5, lam(0.0), 1e-30, MAX_TERMS).unwrap();
        let g = heat_1d(0.5, lam(0.0), 1.0, &b).unwrap();
        let direct: f64 = (0..40).map(|n| (-0.5 * (n * (n + 1)) as f64).exp() * (2 * n + 1) as f64).sum();
        assert!((g.value - direct).abs() < 1e-14);
        assert!(g.error_budget < 1e-14);
    }

    #[test]
    fn heat_1d_large_time_tends_to_one() {
        let b = SeriesBudget::for_heat(25.0, lam(1.0), 1e-30, MAX_TERMS).unwrap();
        let g = heat_1d(25.0, lam(1.0), 0.2, &b).unwrap();
        assert!((g.value - 1.0).abs() < 1e-20_f64.max(5.0 * (-25.0f64 * 4.0).exp() * 5.0));
    }

    #[test]
    fn tail_bound_is_sound() {
        for &(s, l) in &[(0.0125, 6.5), (0.075, 1.0), (0.5, 0.0), (1.0, 2.5)] {
            let b = SeriesBudget::for_heat(s, lam(l), 1e-20, MAX_TERMS).unwrap();
            let wide = SeriesBudget::with_truncation(s, lam(l), 2 * b.truncation_n).unwrap();
            for &w in &[1.0, 0.3, -0.6] {
                let short = heat_1d_at(s, lam(l), w, &b, Precision::Bits(256)).unwrap().0.value;
                let long = heat_1d_at(s, lam(l), w, &wide, Precision::Bits(256)).unwrap().0.value;
                assert!((short - long).abs() <= b.tail_bound.max(1e-300), "s={s} l={l} w={w}");
            }
        }
    }

    #[test]
    fn double_double_rounding_estimate_holds() {
        for &(s, l) in &[(0.0125, 6.5), (0.0125, 1.0), (0.075, 2.5)] {
            let b = SeriesBudget::for_heat(s, lam(l), 1e-40, MAX_TERMS).unwrap();
            for &w in &[1.0, 0.5, 0.0, -0.5, -1.0] {
                let (dd, round) = heat_1d_at(s, lam(l), w, &b, Precision::DoubleDouble).unwrap();
                let (mp, _) = heat_1d_at(s, lam(l), w, &b, Precision::Bits(512)).unwrap();
                assert!((dd.value - mp.value).abs() <= round + 1e-300, "s={s} l={l} w={w}");
            }
        }
    }

    #[test]
    fn escalates_precision_far_from_the_pole() {
        // s = τ/4 with τ = 0.05, ψ = π: value ~ e^{-π²/τ} is far below the
        // double-double resolution of the series.
        let s = 0.0125;
        let lam = lam(0.0);
        let b = SeriesBudget::for_heat(s, lam, 1e-200, MAX_TERMS).unwrap();
        let g = heat_1d(s, lam, -1.0, &b).unwrap();
        assert!(g.value > 0.0);
        assert!(g.meta.precision_bits > 106);
        let log_expected = -(std::f64::consts::PI.powi(2)) / 0.05;
        assert!((g.value.ln() - log_expected).abs() < 10.0, "{}", g.value);
    }

    #[test]
    fn truncation_failure_is_reported() {
        let r = SeriesBudget::for_heat(1e-9, lam(1.0), 1e-30, 1000);
        assert!(matches!(r, Err(Error::Tolerance(_))));
    }
}
