//! Quadrature of the Gagliardo-Nirenberg functional
//!
//! ```text
//! L(f) = |grad f|_2^{2n/k} |f|_2^{2m/k} / |f|_{p_k}^2
//! ```
//!
//! on radial functions `f(x) = h(|x|)` of `R^n`. Each integral carries the
//! surface measure of `S^{n-1}`.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geomconst::{sphere_measure, Dims};
use crate::ode::RadialProfile;
use crate::quadrature::{composite_gl, gl16};

/// Simpson sub-intervals per stored integration step.
pub const DEFAULT_REFINE: usize = 8;

/// SHA-256 of the bundled (2, 2) test-function data file.
pub const BUNDLED_PROFILE_SHA256: &str = "da55c1c55b78bec74f56dd54c3c4605f2a9ad50d5dc5b5fd4219ec57b53e3534";

/// Raw text of the bundled (2, 2) test function.
pub const BUNDLED_PROFILE_DATA: &str = include_str!("../data/profile_2_2.dat");

/// The three integrals over `R^n`, each including the factor `Vol(S^{n-1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialIntegrals {
    /// `int |grad f|^2`
    pub grad: f64,
    /// `int f^2`
    pub sq: f64,
    /// `int |f|^{p_k}`
    pub pow: f64,
}

/// Value of the functional together with its constituent norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GNResult {
    pub d: Dims,
    pub grad_sq: f64,
    pub l2_sq: f64,
    pub lp_norm: f64,
    pub sigma_inv: f64,
}

impl GNResult {
    /// Recomputes `L` from the stored norms.
    pub fn recompute(&self) -> f64 {
        let (m, n, k) = (self.d.m() as f64, self.d.n() as f64, self.d.k() as f64);
        self.grad_sq.powf(n / k) * self.l2_sq.powf(m / k) / (self.lp_norm * self.lp_norm)
    }
}

/// A radial profile the functional can be evaluated on.
pub trait RadialFunction: Sized {
    /// Radial dimension baked into the profile, if any.
    fn radial_dim(&self) -> Option<usize> {
        None
    }

    /// `int_0^inf (h'^2, h^2, |h|^p) t^{n-1} dt`, without the sphere factor.
    fn moments(&self, n: usize, p: f64) -> [f64; 3];

    /// `t -> h(lambda t)`.
    fn dilate(&self, lambda: f64) -> Self;

    /// `t -> c h(t)`.
    fn scaled(&self, c: f64) -> Self;
}

impl RadialFunction for RadialProfile {
    fn radial_dim(&self) -> Option<usize> {
        Some(self.n())
    }

    fn moments(&self, n: usize, p: f64) -> [f64; 3] {
        sampled_moments(self, n, p, DEFAULT_REFINE)
    }

    fn dilate(&self, lambda: f64) -> Self {
        RadialProfile::dilate(self, lambda)
    }

    fn scaled(&self, c: f64) -> Self {
        RadialProfile::scaled(self, c)
    }
}

/// Composite Simpson on each stored step, re-densified by quintic Hermite
/// interpolation into `refine` sub-intervals, plus the analytic tail.
fn sampled_moments(profile: &RadialProfile, n: usize, p: f64, refine: usize) -> [f64; 3] {
    let refine = refine.max(2) + refine % 2;
    let w = n as f64 - 1.0;
    let mut acc = [0.0; 3];
    let ts = profile.ts();
    for i in 0..ts.len() - 1 {
        let (a, b) = (ts[i], ts[i + 1]);
        let dt = (b - a) / refine as f64;
        let mut seg = [0.0; 3];
        for j in 0..=refine {
            let t = if j == refine { b } else { a + dt * j as f64 };
            let (h, dh) = if j == 0 {
                (profile.hs()[i], profile.dhs()[i])
            } else if j == refine {
                (profile.hs()[i + 1], profile.dhs()[i + 1])
            } else {
                profile.hermite(i, t)
            };
            let coef = if j == 0 || j == refine {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let jac = if w == 0.0 { 1.0 } else { t.powf(w) };
            seg[0] += coef * dh * dh * jac;
            seg[1] += coef * h * h * jac;
            seg[2] += coef * h.abs().powf(p) * jac;
        }
        for k in 0..3 {
            acc[k] += seg[k] * dt / 3.0;
        }
    }
    if let Some(tail) = profile.tail() {
        let span = 40.0 / tail.rate;
        let t0 = tail.t_cut;
        let integrand = |t: f64| {
            let jac = if w == 0.0 { 1.0 } else { t.powf(w) };
            (tail.value(t), tail.derivative(t), jac)
        };
        acc[0] += composite_gl(t0, t0 + span, 40, |t| {
            let (_, dh, jac) = integrand(t);
            dh * dh * jac
        });
        acc[1] += composite_gl(t0, t0 + span, 40, |t| {
            let (h, _, jac) = integrand(t);
            h * h * jac
        });
        acc[2] += composite_gl(t0, t0 + span, 40, |t| {
            let (h, _, jac) = integrand(t);
            h.abs().powf(p) * jac
        });
    }
    acc
}

/// Compactly supported piecewise-linear radial profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearProfile {
    ts: Vec<f64>,
    hs: Vec<f64>,
}

impl PiecewiseLinearProfile {
    pub fn new(ts: Vec<f64>, hs: Vec<f64>) -> Result<Self> {
        if ts.len() < 2 || ts.len() != hs.len() {
            return Err(Error::DegenerateProfile(format!(
                "need >= 2 breakpoints with matching values ({} radii, {} values)",
                ts.len(),
                hs.len()
            )));
        }
        if ts[0] != 0.0 {
            return Err(Error::DegenerateProfile("first breakpoint must be t = 0".into()));
        }
        if let Some(i) = ts.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::DegenerateProfile(format!("radii not increasing at breakpoint {}", i + 1)));
        }
        if let Some(i) = hs.iter().position(|h| !(*h >= 0.0)) {
            return Err(Error::DegenerateProfile(format!("negative value at breakpoint {i}")));
        }
        if *hs.last().unwrap() != 0.0 {
            return Err(Error::DegenerateProfile("final value must be 0".into()));
        }
        Ok(Self { ts, hs })
    }

    /// The bundled (2, 2) test function.
    pub fn bundled() -> Self {
        BUNDLED_PROFILE_DATA.parse().expect("bundled profile is valid")
    }

    /// Samples `f` at `ts`, with `f(ts.last())` forced to 0.
    pub fn sample<F: Fn(f64) -> f64>(ts: Vec<f64>, f: F) -> Result<Self> {
        let mut hs: Vec<f64> = ts.iter().map(|&t| f(t).max(0.0)).collect();
        if let Some(last) = hs.last_mut() {
            *last = 0.0;
        }
        Self::new(ts, hs)
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn hs(&self) -> &[f64] {
        &self.hs
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t >= *self.ts.last().unwrap() {
            return 0.0;
        }
        let i = self.ts.partition_point(|&x| x <= t) - 1;
        let s = (t - self.ts[i]) / (self.ts[i + 1] - self.ts[i]);
        self.hs[i] + s * (self.hs[i + 1] - self.hs[i])
    }

    /// Plain-text `t h` rows.
    pub fn write_rows<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for (t, h) in self.ts.iter().zip(&self.hs) {
            writeln!(w, "{t} {h}")?;
        }
        Ok(())
    }
}

impl FromStr for PiecewiseLinearProfile {
    type Err = Error;

    /// One `t h` pair per line; blank lines and `#` comments are skipped.
    fn from_str(text: &str) -> Result<Self> {
        let mut ts = Vec::new();
        let mut hs = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Parse { line, msg: format!("expected `t h`, found {} fields", fields.len()) });
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse { line, msg: format!("not a number: `{s}`") })
            };
            let (t, h) = (parse(fields[0])?, parse(fields[1])?);
            if ts.is_empty() && t != 0.0 {
                return Err(Error::Parse { line, msg: format!("first radius must be 0, found {t}") });
            }
            if let Some(&prev) = ts.last() {
                if !(t > prev) {
                    return Err(Error::Parse { line, msg: format!("radius {t} does not increase (previous {prev})") });
                }
            }
            if h < 0.0 {
                return Err(Error::Parse { line, msg: format!("negative value {h}") });
            }
            ts.push(t);
            hs.push(h);
            last_line = line;
        }
        if ts.len() < 2 {
            return Err(Error::Parse { line: last_line.max(1), msg: "need at least two rows".into() });
        }
        if *hs.last().unwrap() != 0.0 {
            return Err(Error::Parse { line: last_line, msg: "final value must be 0".into() });
        }
        Self::new(ts, hs)
    }
}

impl RadialFunction for PiecewiseLinearProfile {
    fn moments(&self, n: usize, p: f64) -> [f64; 3] {
        let rule = gl16();
        let w = n as f64 - 1.0;
        let mut acc = [0.0; 3];
        for i in 0..self.ts.len() - 1 {
            let (a, b) = (self.ts[i], self.ts[i + 1]);
            let (ha, hb) = (self.hs[i], self.hs[i + 1]);
            let slope = (hb - ha) / (b - a);
            let h = |t: f64| ha + slope * (t - a);
            let jac = |t: f64| if w == 0.0 { 1.0 } else { t.powf(w) };
            acc[0] += slope * slope * rule.integrate(a, b, jac);
            acc[1] += rule.integrate(a, b, |t| h(t).powi(2) * jac(t));
            acc[2] += rule.integrate(a, b, |t| h(t).abs().powf(p) * jac(t));
        }
        acc
    }

    fn dilate(&self, lambda: f64) -> Self {
        Self { ts: self.ts.iter().map(|t| t / lambda).collect(), hs: self.hs.clone() }
    }

    fn scaled(&self, c: f64) -> Self {
        Self { ts: self.ts.clone(), hs: self.hs.iter().map(|h| c * h).collect() }
    }
}

fn check_dim<P: RadialFunction>(profile: &P, d: Dims) -> Result<()> {
    match profile.radial_dim() {
        Some(found) if found != d.n() => Err(Error::DimensionMismatch { expected: d.n(), found }),
        _ => Ok(()),
    }
}

fn finish(raw: [f64; 3], n: usize) -> Result<RadialIntegrals> {
    let omega = sphere_measure(n - 1);
    let out = RadialIntegrals { grad: omega * raw[0], sq: omega * raw[1], pow: omega * raw[2] };
    if !(out.grad > 0.0 && out.sq > 0.0 && out.pow > 0.0) {
        return Err(Error::DegenerateProfile(format!("non-positive integrals {out:?}")));
    }
    Ok(out)
}

/// The three integrals over `R^n` of the radial function `f(x) = h(|x|)`.
pub fn radial_integrals<P: RadialFunction>(profile: &P, d: Dims) -> Result<RadialIntegrals> {
    check_dim(profile, d)?;
    finish(profile.moments(d.n(), d.p()), d.n())
}

/// As [`radial_integrals`] for a sampled profile, with an explicit number of
/// Simpson sub-intervals per stored step.
pub fn radial_integrals_refined(profile: &RadialProfile, d: Dims, refine: usize) -> Result<RadialIntegrals> {
    check_dim(profile, d)?;
    finish(sampled_moments(profile, d.n(), d.p(), refine), d.n())
}

/// Assembles `L = I_grad^{n/k} I_sq^{m/k} / I_p^{2/p}` from the integrals.
pub fn gn_from_integrals(ints: &RadialIntegrals, d: Dims) -> GNResult {
    let (m, n, k) = (d.m() as f64, d.n() as f64, d.k() as f64);
    let lp_norm = ints.pow.powf(1.0 / d.p());
    let sigma_inv = ints.grad.powf(n / k) * ints.sq.powf(m / k) / (lp_norm * lp_norm);
    GNResult { d, grad_sq: ints.grad, l2_sq: ints.sq, lp_norm, sigma_inv }
}

/// Evaluates the Gagliardo-Nirenberg functional on `profile`.
pub fn gn_value<P: RadialFunction>(profile: &P, d: Dims) -> Result<GNResult> {
    Ok(gn_from_integrals(&radial_integrals(profile, d)?, d))
}

/// Yamabe quotient `(a_k I_grad + s_g I_sq) / I_p^{2/p}` of a function of
/// the second factor of `M x R^n` with `Vol(M) = 1`.
pub fn yamabe_quotient<P: RadialFunction>(profile: &P, d: Dims, s_g: f64) -> Result<f64> {
    if !(s_g > 0.0) {
        return Err(Error::InvalidArgument(format!("scalar curvature must be positive, got {s_g}")));
    }
    let ints = radial_integrals(profile, d)?;
    Ok((d.a() * ints.grad + s_g * ints.sq) / ints.pow.powf(2.0 / d.p()))
}

/// `f_lambda(x) = f(lambda x)`.
pub fn dilate<P: RadialFunction>(profile: &P, lambda: f64) -> Result<P> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("dilation factor must be positive, got {lambda}")));
    }
    Ok(profile.dilate(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn d(m: usize, n: usize) -> Dims {
        Dims::new(m, n).unwrap()
    }

    fn triangle() -> PiecewiseLinearProfile {
        PiecewiseLinearProfile::new(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap()
    }

    #[test]
    fn triangle_integrals() {
        let ints = radial_integrals(&triangle(), d(2, 2)).unwrap();
        assert!((ints.sq - PI / 6.0).abs() < 1e-14);
        assert!((ints.grad - PI).abs() < 1e-14);
        assert!((ints.pow - PI / 15.0).abs() < 1e-14);
    }

    #[test]
    fn triangle_quotient() {
        let q = yamabe_quotient(&triangle(), d(2, 2), 8.0 * PI).unwrap();
        let want = (6.0 * PI + 4.0 * PI * PI / 3.0) / (PI / 15.0).sqrt();
        assert!(((q - want) / want).abs() < 1e-14);
        assert!(yamabe_quotient(&triangle(), d(2, 2), 0.0).is_err());
    }

    #[test]
    fn bundled_profile_value() {
        let p = PiecewiseLinearProfile::bundled();
        assert_eq!(p.ts().len(), 22);
        let l = gn_value(&p, d(2, 2)).unwrap().sigma_inv;
        assert!(l < 2.427458 && l > 2.41877, "L = {l}");
    }

    #[test]
    fn stored_norms_recompute() {
        let r = gn_value(&PiecewiseLinearProfile::bundled(), d(2, 2)).unwrap();
        assert!(((r.recompute() - r.sigma_inv) / r.sigma_inv).abs() < 1e-12);
    }

    #[test]
    fn dilation_norm_scaling() {
        let p = PiecewiseLinearProfile::bundled();
        let base = radial_integrals(&p, d(2, 2)).unwrap();
        for lambda in [0.5, 2.0, 10.0] {
            let di = radial_integrals(&dilate(&p, lambda).unwrap(), d(2, 2)).unwrap();
            assert!((di.sq / base.sq - lambda.powi(-2)).abs() < 1e-12);
        }
        assert_eq!(dilate(&p, 1.0).unwrap(), p);
        assert!(dilate(&p, 0.0).is_err());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = "0 1\n0.5 0.4\n0.3 0.2\n1 0\n".parse::<PiecewiseLinearProfile>().unwrap_err();
        assert_eq!(err, Error::Parse { line: 3, msg: "radius 0.3 does not increase (previous 0.5)".into() });
        let err = "0 1\n# c\n1 0.5 2\n".parse::<PiecewiseLinearProfile>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = "0 1\n1 0.5\n".parse::<PiecewiseLinearProfile>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = "0.1 1\n1 0\n".parse::<PiecewiseLinearProfile>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = "0 1\n1 x\n".parse::<PiecewiseLinearProfile>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn mismatched_dimension() {
        let p = RadialProfile::new(vec![0.0, 1.0], vec![1.0, 0.5], vec![0.0, -1.0], vec![0.0; 2], 3, None).unwrap();
        assert!(matches!(gn_value(&p, d(2, 2)), Err(Error::DimensionMismatch { expected: 2, found: 3 })));
    }
}
