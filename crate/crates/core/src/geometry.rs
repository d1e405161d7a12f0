//! Points of the solid cone `V^{d+1} = {(x, t): ‖x‖ <= t <= 1}` and of its
//! lateral surface `V_0^{d+1} = {‖x‖ = t}`, the `ξ` argument maps, the two
//! intrinsic distances, and a seeded stratified pair sampler.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative slack allowed when validating point membership.
pub const POINT_TOL: f64 = 1e-12;
/// Overshoot of `|ξ|` past 1 that is treated as rounding and clamped.
pub const XI_CLAMP_TOL: f64 = 1e-12;
/// Overshoot past which `ξ` is reported as an error.
pub const XI_FAIL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Cone,
    Surface,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Cone => "cone",
            Domain::Surface => "surface",
        })
    }
}

impl FromStr for Domain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cone" => Ok(Domain::Cone),
            "surface" => Ok(Domain::Surface),
            _ => Err(invalid!("unknown domain '{s}' (expected cone|surface)")),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_coords(x: &[f64], t: f64) -> Result<()> {
    if x.len() < 2 {
        return Err(invalid!("point dimension d = {} must be at least 2", x.len()));
    }
    if !t.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(invalid!("point coordinates must be finite"));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid!("t = {t} outside [0, 1]"));
    }
    Ok(())
}

/// A point of the solid cone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConePoint {
    x: Vec<f64>,
    t: f64,
}

impl ConePoint {
    pub fn new(x: Vec<f64>, t: f64) -> Result<Self> {
        check_coords(&x, t)?;
        let r = norm(&x);
        if r > t * (1.0 + POINT_TOL) + f64::MIN_POSITIVE {
            return Err(invalid!("cone point violates ‖x‖ <= t: ‖x‖ = {r}, t = {t}"));
        }
        Ok(ConePoint { x, t })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `√(t² − ‖x‖²)`, clamped at zero.
    pub fn lateral(&self) -> f64 {
        let r = norm(&self.x);
        ((self.t - r).max(0.0) * (self.t + r)).sqrt()
    }
}

/// A point of the conic surface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfacePoint {
    x: Vec<f64>,
    t: f64,
}

impl SurfacePoint {
    pub fn new(x: Vec<f64>, t: f64) -> Result<Self> {
        check_coords(&x, t)?;
        let r = norm(&x);
        if (r - t).abs() > POINT_TOL {
            return Err(invalid!("surface point violates ‖x‖ = t: ‖x‖ = {r}, t = {t}"));
        }
        Ok(SurfacePoint { x, t })
    }

    /// Rescales `x` so that `‖x‖ = t`.
    pub fn project(x: Vec<f64>, t: f64) -> Result<Self> {
        check_coords(&x, t)?;
        let r = norm(&x);
        if t == 0.0 {
            return SurfacePoint::new(vec![0.0; x.len()], 0.0);
        }
        if r == 0.0 {
            return Err(invalid!("cannot project x = 0 onto the surface at t = {t}"));
        }
        let x = x.into_iter().map(|v| v * t / r).collect();
        Ok(SurfacePoint { x, t })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Cone weight parameters `(d, μ, γ)` with `α = μ + (d − 1)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeParams {
    pub d: usize,
    pub mu: f64,
    pub gamma: f64,
    pub alpha: f64,
}

impl ConeParams {
    pub fn new(d: usize, mu: f64, gamma: f64) -> Result<Self> {
        if d < 2 {
            return Err(invalid!("d = {d} must be at least 2"));
        }
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(invalid!("mu = {mu} must be finite and >= 0"));
        }
        if !(gamma >= -0.5) || !gamma.is_finite() {
            return Err(invalid!("gamma = {gamma} must be finite and >= -1/2"));
        }
        Ok(ConeParams {
            d,
            mu,
            gamma,
            alpha: mu + (d as f64 - 1.0) / 2.0,
        })
    }

    /// Index of the folded 1-d heat kernel, `2α + γ + 1/2`.
    pub fn lambda(&self) -> f64 {
        2.0 * self.alpha + self.gamma + 0.5
    }

    /// Eigenvalue magnitude `n(n + 2μ + γ + d)` of degree `n`.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        let n = n as f64;
        n * (n + 2.0 * self.mu + self.gamma + self.d as f64)
    }
}

/// Surface weight parameters `(d, γ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfaceParams {
    pub d: usize,
    pub gamma: f64,
}

impl SurfaceParams {
    pub fn new(d: usize, gamma: f64) -> Result<Self> {
        if d < 2 {
            return Err(invalid!("d = {d} must be at least 2"));
        }
        if !(gamma >= -0.5) || !gamma.is_finite() {
            return Err(invalid!("gamma = {gamma} must be finite and >= -1/2"));
        }
        Ok(SurfaceParams { d, gamma })
    }

    /// `γ + d − 3/2`.
    pub fn lambda(&self) -> f64 {
        self.gamma + self.d as f64 - 1.5
    }

    /// `n(n + γ + d − 1)`.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        let n = n as f64;
        n * (n + self.gamma + self.d as f64 - 1.0)
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(invalid!("points have different dimensions {a} and {b}"));
    }
    Ok(())
}

fn clamp_xi(xi: f64) -> Result<f64> {
    let a = xi.abs();
    if a <= 1.0 {
        Ok(xi)
    } else if a <= 1.0 + XI_FAIL_TOL {
        Ok(xi.signum())
    } else {
        Err(invalid!("ξ = {xi} exceeds 1 by more than {XI_FAIL_TOL:e}; points are invalid"))
    }
}

/// The `(u, v₁, v₂)`-independent pieces of the cone `ξ` map:
/// `ξ = v₁ √(½(c + r u)) + v₂ b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiCone {
    pub c: f64,
    pub r: f64,
    pub b: f64,
}

impl XiCone {
    pub fn new(p: &ConePoint, q: &ConePoint) -> Result<Self> {
        same_dim(p.dim(), q.dim())?;
        let c = p.t * q.t + dot(&p.x, &q.x);
        let r = p.lateral() * q.lateral();
        let b = ((1.0 - p.t) * (1.0 - q.t)).sqrt();
        Ok(XiCone { c, r, b })
    }

    #[inline]
    pub fn a(&self, u: f64) -> f64 {
        (0.5 * (self.c + self.r * u)).max(0.0).sqrt()
    }

    #[inline]
    pub fn eval(&self, u: f64, v1: f64, v2: f64) -> f64 {
        v1 * self.a(u) + v2 * self.b
    }
}

/// `ξ = v₁ a + v₂ b` for the surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiSurface {
    pub a: f64,
    pub b: f64,
}

impl XiSurface {
    pub fn new(p: &SurfacePoint, q: &SurfacePoint) -> Result<Self> {
        same_dim(p.dim(), q.dim())?;
        let a = (0.5 * (p.t * q.t + dot(&p.x, &q.x))).max(0.0).sqrt();
        let b = ((1.0 - p.t) * (1.0 - q.t)).sqrt();
        Ok(XiSurface { a, b })
    }

    #[inline]
    pub fn eval(&self, v1: f64, v2: f64) -> f64 {
        v1 * self.a + v2 * self.b
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&v) {
        return Err(invalid!("{name} = {v} outside [-1, 1]"));
    }
    Ok(())
}

/// `v₁√(½(st + ⟨x,y⟩ + √(t²−‖x‖²)√(s²−‖y‖²) u)) + v₂√(1−t)√(1−s)`.
pub fn xi_cone(p: &ConePoint, q: &ConePoint, u: f64, v1: f64, v2: f64) -> Result<f64> {
    check_unit("u", u)?;
    check_unit("v1", v1)?;
    check_unit("v2", v2)?;
    clamp_xi(XiCone::new(p, q)?.eval(u, v1, v2))
}

/// `v₁√(½(st + ⟨x,y⟩)) + v₂√(1−t)√(1−s)`.
pub fn xi_surface(p: &SurfacePoint, q: &SurfacePoint, v1: f64, v2: f64) -> Result<f64> {
    check_unit("v1", v1)?;
    check_unit("v2", v2)?;
    clamp_xi(XiSurface::new(p, q)?.eval(v1, v2))
}

fn arccos_unit(c: f64) -> f64 {
    c.clamp(0.0, 1.0).acos()
}

/// Intrinsic distance on the solid cone, in `[0, π/2]`.
pub fn dist_cone(p: &ConePoint, q: &ConePoint) -> Result<f64> {
    if p == q {
        return Ok(0.0);
    }
    let xi = XiCone::new(p, q)?;
    let arg = clamp_xi(xi.eval(1.0, 1.0, 1.0))?;
    Ok(arccos_unit(arg).min(FRAC_PI_2))
}

/// Intrinsic distance on the conic surface, in `[0, π/2]`.
pub fn dist_surface(p: &SurfacePoint, q: &SurfacePoint) -> Result<f64> {
    if p == q {
        return Ok(0.0);
    }
    let xi = XiSurface::new(p, q)?;
    let arg = clamp_xi(xi.eval(1.0, 1.0))?;
    Ok(arccos_unit(arg).min(FRAC_PI_2))
}

/// `(st + ⟨x,y⟩, √(t²−‖x‖²)√(s²−‖y‖²))`; the first dominates the second.
pub fn cs_gap(p: &ConePoint, q: &ConePoint) -> Result<(f64, f64)> {
    let xi = XiCone::new(p, q)?;
    Ok((xi.c, xi.r))
}

/// Sampling strata for verification scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stratum {
    Interior,
    NearApex,
    NearBase,
    NearLateral,
    Antipodal,
    Coincident,
}

impl Stratum {
    pub const ALL: [Stratum; 6] = [
        Stratum::Interior,
        Stratum::NearApex,
        Stratum::NearBase,
        Stratum::NearLateral,
        Stratum::Antipodal,
        Stratum::Coincident,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stratum::Interior => "interior",
            Stratum::NearApex => "near-apex",
            Stratum::NearBase => "near-base",
            Stratum::NearLateral => "near-lateral",
            Stratum::Antipodal => "antipodal",
            Stratum::Coincident => "coincident",
        }
    }

    /// Strata that make sense for a domain.
    pub fn defaults(domain: Domain) -> Vec<Stratum> {
        Stratum::ALL
            .into_iter()
            .filter(|s| domain == Domain::Cone || *s != Stratum::NearLateral)
            .collect()
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stratum {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Stratum::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid!("unknown stratum '{s}'"))
    }
}

/// Which strata to sample and their thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub strata: Vec<Stratum>,
    pub delta: f64,
    pub eps: f64,
}

impl SamplerSpec {
    pub fn new(domain: Domain) -> Self {
        SamplerSpec {
            strata: Stratum::defaults(domain),
            delta: 1e-3,
            eps: 1e-4,
        }
    }
}

/// A sampled pair of points in raw coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointPair {
    pub x: Vec<f64>,
    pub t: f64,
    pub y: Vec<f64>,
    pub s: f64,
    pub stratum: Stratum,
}

impl PointPair {
    pub fn cone(&self) -> Result<(ConePoint, ConePoint)> {
        Ok((ConePoint::new(self.x.clone(), self.t)?, ConePoint::new(self.y.clone(), self.s)?))
    }

    pub fn surface(&self) -> Result<(SurfacePoint, SurfacePoint)> {
        Ok((
            SurfacePoint::new(self.x.clone(), self.t)?,
            SurfacePoint::new(self.y.clone(), self.s)?,
        ))
    }
}

fn direction(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-8 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

fn scaled(dir: &[f64], r: f64) -> Vec<f64> {
    dir.iter().map(|c| c * r).collect()
}

/// Seeded stratified pairs; strata are visited round-robin.
pub fn sample_pairs(domain: Domain, d: usize, spec: &SamplerSpec, count: usize, seed: u64) -> Result<Vec<PointPair>> {
    if count == 0 {
        return Err(invalid!("sample count must be at least 1"));
    }
    if d < 2 {
        return Err(invalid!("d = {d} must be at least 2"));
    }
    if spec.strata.is_empty() {
        return Err(invalid!("no strata requested"));
    }
    if !(spec.delta > 0.0 && spec.delta < 0.5) || !(spec.eps > 0.0 && spec.eps < 0.5) {
        return Err(invalid!("delta and eps must lie in (0, 1/2)"));
    }
    if domain == Domain::Surface && spec.strata.contains(&Stratum::NearLateral) {
        return Err(invalid!("the near-lateral stratum exists only on the solid cone"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let stratum = spec.strata[i % spec.strata.len()];
        out.push(sample_one(&mut rng, domain, d, spec, stratum));
    }
    Ok(out)
}

fn sample_one(rng: &mut ChaCha8Rng, domain: Domain, d: usize, spec: &SamplerSpec, stratum: Stratum) -> PointPair {
    let delta = spec.delta;
    let cone = domain == Domain::Cone;
    // relative radius ‖x‖/t
    let radius = |rng: &mut ChaCha8Rng, lateral: bool| -> f64 {
        if !cone {
            1.0
        } else if lateral {
            1.0 - delta * rng.random::<f64>()
        } else {
            rng.random::<f64>().sqrt()
        }
    };
    let (t, s, lat) = match stratum {
        Stratum::Interior | Stratum::Antipodal | Stratum::Coincident => {
            (rng.random_range(delta..1.0 - delta), rng.random_range(delta..1.0 - delta), false)
        }
        Stratum::NearApex => (delta * rng.random::<f64>(), delta * rng.random::<f64>(), false),
        Stratum::NearBase => (
            1.0 - delta * rng.random::<f64>(),
            1.0 - delta * rng.random::<f64>(),
            false,
        ),
        Stratum::NearLateral => (rng.random_range(delta..1.0), rng.random_range(delta..1.0), true),
    };
    let dx = direction(rng, d);
    let rx = radius(rng, lat);
    let x = scaled(&dx, t * rx);
    match stratum {
        Stratum::Antipodal => {
            let ry = radius(rng, lat);
            let dy: Vec<f64> = dx.iter().map(|c| -c).collect();
            PointPair { y: scaled(&dy, s * ry), x, t, s, stratum }
        }
        Stratum::Coincident => {
            // perturb p by at most eps and pull the result back into the domain
            let eps = spec.eps;
            let s = (t + eps * (2.0 * rng.random::<f64>() - 1.0)).clamp(0.0, 1.0);
            let jitter = direction(rng, d);
            let mut y: Vec<f64> = x.iter().zip(&jitter).map(|(a, j)| a + eps * j * rng.random::<f64>()).collect();
            let ny = norm(&y);
            let target = if cone { ny.min(s) } else { s };
            if ny > 0.0 {
                y.iter_mut().for_each(|c| *c *= target / ny);
            }
            PointPair { x, t, y, s, stratum }
        }
        _ => {
            let dy = direction(rng, d);
            let ry = radius(rng, lat);
            PointPair { y: scaled(&dy, s * ry), x, t, s, stratum }
        }
    }
}

/// Writes pairs as CSV with columns `x1..xd, t, y1..yd, s, stratum`.
pub fn write_pairs_csv<W: std::io::Write>(pairs: &[PointPair], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = pairs.first() {
        let d = first.x.len();
        let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        header.push("t".into());
        header.extend((1..=d).map(|i| format!("y{i}")));
        header.push("s".into());
        header.push("stratum".into());
        w.write_record(&header)?;
    }
    for p in pairs {
        let mut rec: Vec<String> = p.x.iter().map(|v| format!("{v:e}")).collect();
        rec.push(format!("{:e}", p.t));
        rec.extend(p.y.iter().map(|v| format!("{v:e}")));
        rec.push(format!("{:e}", p.s));
        rec.push(p.stratum.name().into());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cp(x: &[f64], t: f64) -> ConePoint {
        ConePoint::new(x.to_vec(), t).unwrap()
    }

    fn sp(x: &[f64], t: f64) -> SurfacePoint {
        SurfacePoint::new(x.to_vec(), t).unwrap()
    }

    #[test]
    fn point_validation() {
        assert!(ConePoint::new(vec![0.6, 0.0], 0.5).is_err());
        assert!(ConePoint::new(vec![0.0, 0.0], 1.2).is_err());
        assert!(SurfacePoint::new(vec![0.3, 0.0], 0.5).is_err());
        let p = SurfacePoint::project(vec![0.3, 0.4], 0.2).unwrap();
        assert!((norm(p.x()) - 0.2).abs() < 1e-15);
        assert!(ConeParams::new(1, 0.0, 0.0).is_err());
        assert!(ConeParams::new(2, -0.1, 0.0).is_err());
        assert!(SurfaceParams::new(2, -0.6).is_err());
        assert_eq!(ConeParams::new(3, 0.5, 0.0).unwrap().alpha, 1.5);
    }

    #[test]
    fn xi_examples() {
        let p = cp(&[0.2, -0.1], 0.7);
        assert!((xi_cone(&p, &p, 1.0, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(xi_cone(&p, &p, 0.0, 0.0, 0.0).unwrap(), 0.0);
        let s = sp(&[0.6, 0.0], 0.6);
        assert!((xi_surface(&s, &s, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(xi_surface(&s, &s, 0.0, 0.0).unwrap(), 0.0);
        let a = sp(&[1.0, 0.0], 1.0);
        let b = sp(&[-1.0, 0.0], 1.0);
        assert_eq!(xi_surface(&a, &b, 1.0, 1.0).unwrap(), 0.0);
        assert!(xi_cone(&p, &p, 1.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn distance_examples() {
        let p = cp(&[0.2, -0.1], 0.7);
        assert_eq!(dist_cone(&p, &p).unwrap(), 0.0);
        let apex = cp(&[0.0, 0.0], 0.0);
        let base = cp(&[0.0, 0.0], 1.0);
        assert!((dist_cone(&apex, &base).unwrap() - PI / 2.0).abs() < 1e-15);
        let a = sp(&[1.0, 0.0], 1.0);
        let b = sp(&[-1.0, 0.0], 1.0);
        assert!((dist_surface(&a, &b).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(dist_surface(&a, &a).unwrap(), 0.0);
        let sa = sp(&[0.0, 0.0], 0.0);
        let sb = sp(&[0.0, 1.0], 1.0);
        assert!((dist_surface(&sa, &sb).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn cs_gap_examples() {
        let p = cp(&[0.3, 0.1], 0.6);
        let (l, r) = cs_gap(&p, &p).unwrap();
        assert!((l - (0.36 + 0.1)).abs() < 1e-15);
        assert!((r - (0.36 - 0.1)).abs() < 1e-15);
        let a = cp(&[0.6, 0.0], 0.6);
        let b = cp(&[0.0, 0.4], 0.4);
        assert_eq!(cs_gap(&a, &b).unwrap().1, 0.0);
    }

    #[test]
    fn sampler_is_deterministic_and_stratified() {
        let spec = SamplerSpec {
            strata: vec![Stratum::NearBase],
            delta: 1e-3,
            eps: 1e-4,
        };
        let a = sample_pairs(Domain::Cone, 2, &spec, 10, 7).unwrap();
        let b = sample_pairs(Domain::Cone, 2, &spec, 10, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|p| p.t.min(p.s) >= 1.0 - 1e-3));
        let all = sample_pairs(Domain::Surface, 3, &SamplerSpec::new(Domain::Surface), 100, 1).unwrap();
        for p in &all {
            assert!((norm(&p.x) - p.t).abs() < 1e-12);
            assert!((norm(&p.y) - p.s).abs() < 1e-12);
            p.surface().unwrap();
        }
        let cone = sample_pairs(Domain::Cone, 3, &SamplerSpec::new(Domain::Cone), 120, 3).unwrap();
        for p in &cone {
            p.cone().unwrap();
            match p.stratum {
                Stratum::NearApex => assert!(p.t.max(p.s) <= 1e-3),
                Stratum::NearLateral => {
                    assert!(p.t - norm(&p.x) <= 1e-3 * p.t + 1e-15);
                    assert!(p.s - norm(&p.y) <= 1e-3 * p.s + 1e-15);
                }
                Stratum::Antipodal => {
                    let c = dot(&p.x, &p.y) + norm(&p.x) * norm(&p.y);
                    assert!(c.abs() < 1e-14);
                }
                Stratum::Coincident => {
                    let dx: f64 = p.x.iter().zip(&p.y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    assert!(dx <= 3e-4 && (p.t - p.s).abs() <= 1e-4);
                }
                _ => {}
            }
        }
        assert!(sample_pairs(Domain::Cone, 2, &spec, 0, 1).is_err());
        let lat = SamplerSpec {
            strata: vec![Stratum::NearLateral],
            ..SamplerSpec::new(Domain::Cone)
        };
        assert!(sample_pairs(Domain::Surface, 2, &lat, 5, 1).is_err());
    }

    #[test]
    fn pairs_round_trip_through_csv() {
        let pairs = sample_pairs(Domain::Cone, 2, &SamplerSpec::new(Domain::Cone), 12, 5).unwrap();
        let mut buf = Vec::new();
        write_pairs_csv(&pairs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x1,x2,t,y1,y2,s,stratum");
        assert_eq!(lines.count(), 12);
    }
}
