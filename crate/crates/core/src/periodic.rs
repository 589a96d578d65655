//! Positive periodic solutions of
//!
//! ```text
//! u'' - (n-2)^2/4 u + n(n-2)/4 u^{(n+2)/(n-2)} = 0
//! ```
//!
//! the Yamabe equation for functions of the circle factor of
//! `S^{n-1} x S^1(r)`. The equation is conservative with
//! `H = u'^2/2 + V(u)`, `V(u) = (n-2)^2/8 (u^{2n/(n-2)} - u^2)`; closed
//! orbits around the constant solution `u_c` fill the energy window
//! `(V(u_c), 0)`, i.e. maxima `u_max` in `(u_c, 1)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geomconst;
use crate::quadrature::{adaptive_gl, bisect};
use crate::rk45::{self, Finish, StepControl};

const PERIOD_QUAD_TOL: f64 = 1e-13;

fn check_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidDimension { what: "n", value: n, min: 3 });
    }
    Ok(())
}

#[inline]
fn exponent(n: usize) -> f64 {
    2.0 * n as f64 / (n as f64 - 2.0)
}

#[inline]
fn coupling(n: usize) -> f64 {
    let nm2 = n as f64 - 2.0;
    nm2 * nm2 / 8.0
}

/// Potential `V(u)`, written as `c u^2 (u^{p-2} - 1)` so that it keeps its
/// relative accuracy near both zeros `u = 0` and `u = 1`.
pub fn potential(n: usize, u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    coupling(n) * u * u * ((exponent(n) - 2.0) * u.abs().ln()).exp_m1()
}

/// Conserved energy `u'^2/2 + V(u)`.
pub fn energy(n: usize, u: f64, du: f64) -> f64 {
    0.5 * du * du + potential(n, u)
}

/// `u''` from the equation of motion.
pub fn acceleration(n: usize, u: f64) -> f64 {
    let nf = n as f64;
    let q = (nf + 2.0) / (nf - 2.0);
    0.25 * (nf - 2.0).powi(2) * u - 0.25 * nf * (nf - 2.0) * u.abs().powf(q - 1.0) * u
}

/// The positive equilibrium `u_c = ((n-2)/n)^{(n-2)/4}`.
pub fn constant_solution(n: usize) -> Result<f64> {
    check_dim(n)?;
    let nf = n as f64;
    Ok(((nf - 2.0) / nf).powf((nf - 2.0) / 4.0))
}

/// `V''(u_c)`.
pub fn potential_curvature(n: usize) -> Result<f64> {
    let uc = constant_solution(n)?;
    Ok(potential_second(n, uc))
}

/// Infimum of the orbit periods, `2 pi / sqrt(V''(u_c))`, approached in the
/// small-amplitude limit.
pub fn minimal_period(n: usize) -> Result<f64> {
    Ok(2.0 * PI / potential_curvature(n)?.sqrt())
}

/// A closed phase-plane orbit oscillating between `u_min` and `u_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleOrbit {
    pub n: usize,
    pub u_min: f64,
    pub u_max: f64,
    pub period: f64,
    pub energy: f64,
}

fn potential_slope(n: usize, u: f64) -> f64 {
    let p = exponent(n);
    coupling(n) * (p * u.powf(p - 1.0) - 2.0 * u)
}

fn potential_second(n: usize, u: f64) -> f64 {
    let p = exponent(n);
    coupling(n) * (p * (p - 1.0) * u.powf(p - 2.0) - 2.0)
}

fn potential_third(n: usize, u: f64) -> f64 {
    let p = exponent(n);
    coupling(n) * p * (p - 1.0) * (p - 2.0) * u.powf(p - 3.0)
}

/// Difference quotient `(V(x + h) - V(x)) / h` by its Taylor expansion;
/// `slope` is `V'(x)`, supplied by the caller at the accuracy it can manage.
fn slope_expansion(n: usize, x: f64, slope: f64, h: f64) -> f64 {
    slope + 0.5 * potential_second(n, x) * h + potential_third(n, x) * h * h / 6.0
}

/// `V'(u_c + x) = 2 c u (u^{p-2}/u_c^{p-2} - 1)`, accurate for small `x`.
fn potential_slope_offset(n: usize, uc: f64, x: f64) -> f64 {
    let p = exponent(n);
    2.0 * coupling(n) * (uc + x) * ((p - 2.0) * (x / uc).ln_1p()).exp_m1()
}

/// `V(u_c + x) - V(u_c)`. With `s = x/u_c` and `u_c^{p-2} = 2/p` this is
/// `c u_c^2 ((2/p)((1+s)^p - 1 - p s) - s^2)`; the binomial tail is summed
/// directly for small `s` so the quadratic leading term is never the
/// remainder of a cancellation.
fn potential_above_min(n: usize, uc: f64, x: f64) -> f64 {
    let p = exponent(n);
    let s = x / uc;
    let bracket = if s.abs() < 0.1 {
        let mut term = 0.5 * p * (p - 1.0) * s * s;
        let mut tail = 0.0;
        for j in 3..60 {
            term *= (p - (j - 1) as f64) / j as f64 * s;
            tail += term;
            if term.abs() <= 1e-18 * tail.abs() {
                break;
            }
        }
        (p - 2.0) * s * s + 2.0 / p * tail
    } else {
        2.0 / p * ((p * s.ln_1p()).exp_m1() - p * s) - s * s
    };
    coupling(n) * uc * uc * bracket
}

/// An energy level inside the potential well. Deep levels are measured from
/// the bottom of the well, shallow ones from the separatrix `E = 0`.
#[derive(Debug, Clone, Copy)]
struct Level {
    n: usize,
    uc: f64,
    deep: bool,
    value: f64,
}

impl Level {
    fn through(n: usize, uc: f64, u: f64) -> Self {
        let deep = potential(n, u) < 0.5 * potential(n, uc);
        let value = if deep { potential_above_min(n, uc, u - uc) } else { potential(n, u) };
        Self { n, uc, deep, value }
    }

    /// `V(u) - E`.
    fn excess(&self, u: f64) -> f64 {
        self.excess_at(u, u - self.uc)
    }

    fn slope(&self, u: f64) -> f64 {
        if self.deep {
            potential_slope_offset(self.n, self.uc, u - self.uc)
        } else {
            potential_slope(self.n, u)
        }
    }

    /// `V(u) - E` with the offset `x = u - u_c` supplied separately; deep
    /// levels use `x`, which can be carried more accurately than `u`.
    fn excess_at(&self, u: f64, x: f64) -> f64 {
        if self.deep {
            potential_above_min(self.n, self.uc, x) - self.value
        } else {
            potential(self.n, u) - self.value
        }
    }
}

/// `(E - V(u)) / ((u - a)(b - u))` for turning points `a < b`, from the two
/// difference quotients of `V` toward them. `da = u - a` and `db = b - u`
/// are passed separately to keep them exact when `a` is tiny. Close to a
/// turning point the quotient is replaced by its Taylor expansion.
fn normalized_gap(level: &Level, ends: [(f64, f64); 2], (u, x): (f64, f64), da: f64, db: f64) -> f64 {
    let [(a, wa), (b, wb)] = ends;
    let n = level.n;
    let near = 1e-4 * (b - a);
    let toward_b =
        if db < near { slope_expansion(n, b, level.slope(b), -db) } else { (wb - level.excess_at(u, x)) / db };
    let from_a = if da < near.min(1e-4 * a) {
        slope_expansion(n, a, level.slope(a), da)
    } else {
        (level.excess_at(u, x) - wa) / da
    };
    (toward_b - from_a) / (b - a)
}

/// Integrates `weight(u, |u'|) du` over `[a, b]` with the substitution
/// `u = a + (b - a)(1 - cos theta)/2`, which removes the square-root
/// singularities of `1 / |u'|` at both turning points.
fn turning_point_integral<W: Fn(f64, f64) -> f64>(level: &Level, a: f64, b: f64, weight: W) -> f64 {
    let half = 0.5 * (b - a);
    // The turning points are only level crossings to within rounding; using
    // their own residuals makes the gap a true second divided difference.
    let ends = [(a, level.excess(a)), (b, level.excess(b))];
    adaptive_gl(0.0, PI, PERIOD_QUAD_TOL, |theta| {
        let da = 2.0 * half * (0.5 * theta).sin().powi(2);
        let db = 2.0 * half * (0.5 * theta).cos().powi(2);
        let (u, x) = if theta < FRAC_PI_2 { (a + da, (a - level.uc) + da) } else { (b - db, (b - level.uc) - db) };
        let jac = half * theta.sin();
        let root = (2.0 * normalized_gap(level, ends, (u, x), da, db)).sqrt();
        // |u'| = sqrt(2 (E - V(u))) = jac * root
        weight(u, jac * root) * jac
    })
}

fn closed_orbit(n: usize, level: Level, u_min: f64, u_max: f64) -> CircleOrbit {
    let period = 2.0 * turning_point_integral(&level, u_min, u_max, |_, speed| 1.0 / speed);
    let energy = if level.deep { potential(n, u_max) } else { level.value };
    CircleOrbit { n, u_min, u_max, period, energy }
}

/// The orbit through `(u_max, 0)`, `u_c < u_max < 1`, with its period from
/// turning-point quadrature of `dt = du / |u'|`.
pub fn orbit(n: usize, u_max: f64) -> Result<CircleOrbit> {
    let uc = constant_solution(n)?;
    if !(u_max > uc && u_max < 1.0) {
        return Err(Error::OrbitWindow { u_max, lo: uc, hi: 1.0 });
    }
    let level = Level::through(n, uc, u_max);
    let (lo, hi) = bisect(0.0, uc, 0.0, |u| level.excess(u));
    Ok(closed_orbit(n, level, 0.5 * (lo + hi), u_max))
}

/// Smallest resolvable orbit minimum; below this `u^2` loses its exponent
/// range inside the quadrature.
pub const MIN_ORBIT_DEPTH: f64 = 1e-120;

/// The orbit through `(u_min, 0)`, `0 < u_min < u_c`. Orbits close to the
/// separatrix are only resolvable from this side.
pub fn orbit_from_min(n: usize, u_min: f64) -> Result<CircleOrbit> {
    let uc = constant_solution(n)?;
    if !(u_min >= MIN_ORBIT_DEPTH && u_min < uc) {
        return Err(Error::InvalidArgument(format!("u_min = {u_min} outside [{MIN_ORBIT_DEPTH:e}, {uc})")));
    }
    let level = Level::through(n, uc, u_min);
    let (lo, hi) = bisect(uc, 1.0, 0.0, |u| level.excess(u));
    let orbit = closed_orbit(n, level, u_min, 0.5 * (lo + hi));
    if !orbit.period.is_finite() {
        return Err(Error::Consistency(format!("period quadrature failed at u_min = {u_min}")));
    }
    Ok(orbit)
}

/// Period of the closed orbit with maximum `u_max`.
pub fn orbit_period(n: usize, u_max: f64) -> Result<f64> {
    orbit(n, u_max).map(|o| o.period)
}

/// The closed orbit of the given period, by bisection on `ln u_min` (the
/// period decreases monotonically in `u_min`). Periods longer than that of
/// the orbit through [`MIN_ORBIT_DEPTH`] follow from the logarithmic
/// asymptote; `u_min` may then underflow to zero and `u_max` rounds to 1.
pub fn orbit_with_period(n: usize, period: f64) -> Result<CircleOrbit> {
    let uc = constant_solution(n)?;
    let t_min = minimal_period(n)?;
    if !(period > t_min) {
        return Err(Error::InvalidArgument(format!("period {period} is not above the minimal period {t_min}")));
    }
    let floor = MIN_ORBIT_DEPTH.ln();
    let deepest = orbit_from_min(n, MIN_ORBIT_DEPTH)?;
    if period > deepest.period {
        // Below the deepest resolvable orbit all extra time is spent near
        // u = 0, where u'' = kappa^2 u: each unit of ln(1/u_min) adds 2/kappa
        // to the period, up to corrections of order u_min^2.
        let kappa = 0.5 * (n as f64 - 2.0);
        let u_min = (floor - 0.5 * kappa * (period - deepest.period)).exp();
        return Ok(CircleOrbit { u_min, period, energy: potential(n, u_min), ..deepest });
    }
    let (lo, hi) = bisect(floor, uc.ln(), 1e-15, |x| {
        let u = x.exp();
        if u >= uc {
            -1.0
        } else {
            orbit_from_min(n, u).map(|o| o.period - period).unwrap_or(-1.0)
        }
    });
    orbit_from_min(n, (0.5 * (lo + hi)).exp())
}

/// Number of nonconstant positive `2 pi r`-periodic solutions up to time
/// translation: one for each `k >= 1` with `2 pi r / k` above the minimal
/// period.
pub fn count_periodic_solutions(n: usize, r: f64) -> Result<usize> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let ratio = 2.0 * PI * r / minimal_period(n)?;
    Ok(if ratio <= 1.0 { 0 } else { ratio.ceil() as usize - 1 })
}

/// The nonconstant solutions counted by [`count_periodic_solutions`], as
/// `(k, orbit)` pairs with `k * orbit.period = 2 pi r`.
pub fn periodic_solutions(n: usize, r: f64) -> Result<Vec<(usize, CircleOrbit)>> {
    let count = count_periodic_solutions(n, r)?;
    (1..=count).into_par_iter().map(|k| orbit_with_period(n, 2.0 * PI * r / k as f64).map(|o| (k, o))).collect()
}

/// One period of an orbit integrated in time.
#[derive(Debug, Clone)]
pub struct OrbitTrace {
    /// `(t, u, u')` at every accepted step.
    pub samples: Vec<[f64; 3]>,
    /// Period measured by the integration.
    pub return_time: f64,
    /// Maximal `|H - H_0| / |V(u_c)|` along the trajectory.
    pub max_energy_drift: f64,
}

/// Integrates the orbit through `(u_max, 0)` in time until it closes.
pub fn integrate_orbit(n: usize, u_max: f64, rtol: f64, atol: f64) -> Result<OrbitTrace> {
    let uc = constant_solution(n)?;
    if !(u_max > uc && u_max < 1.0) {
        return Err(Error::OrbitWindow { u_max, lo: uc, hi: 1.0 });
    }
    let e0 = potential(n, u_max);
    // Orbits near the separatrix have e0 -> 0; measure drift against the well depth.
    let depth = potential(n, uc).abs();
    let ctrl = StepControl { rtol, atol, h_init: 1e-3, h_max: 0.1, ..StepControl::default() };
    let mut samples = vec![[0.0, u_max, 0.0]];
    let mut drift: f64 = 0.0;
    let mut turned = false;
    let t_end = 1e3 * minimal_period(n)?;
    let finish = rk45::integrate(
        |_, y| [y[1], acceleration(n, y[0])],
        0.0,
        [u_max, 0.0],
        t_end,
        &ctrl,
        |s| {
            let [u, du] = s.y1;
            drift = drift.max(((energy(n, u, du) - e0) / depth).abs());
            if !turned && du > 0.0 && s.y0[1] <= 0.0 {
                turned = true;
            } else if turned && du <= 0.0 {
                let t = s.locate(|y| y[1], 1e-13);
                let y = s.eval(t);
                samples.push([t, y[0], y[1]]);
                return ControlFlow::Break(t);
            }
            samples.push([s.t1, u, du]);
            ControlFlow::Continue(())
        },
    )?;
    match finish {
        Finish::Stopped(return_time) => Ok(OrbitTrace { samples, return_time, max_energy_drift: drift }),
        Finish::Completed { t, y } => Err(Error::Unclassified { t, h: y[0], dh: y[1] }),
    }
}

/// Integrates `orbit` in time from its minimum `(u_min, 0)` up to its
/// maximum and completes the period by time reversal, `u(T - t) = u(t)`.
/// Unlike [`integrate_orbit`] this stays well conditioned near the
/// separatrix: energy errors picked up near `u = 1` would otherwise be
/// amplified on the way back past the saddle at `u = 0`.
pub fn trace_orbit(orbit: &CircleOrbit, rtol: f64, atol: f64) -> Result<OrbitTrace> {
    let n = orbit.n;
    let uc = constant_solution(n)?;
    if !(orbit.u_min >= MIN_ORBIT_DEPTH && orbit.u_min < uc) {
        return Err(Error::InvalidArgument(format!("u_min = {} outside [{MIN_ORBIT_DEPTH:e}, {uc})", orbit.u_min)));
    }
    let e0 = potential(n, orbit.u_min);
    let depth = potential(n, uc).abs();
    let atol = atol.min(rtol * orbit.u_min);
    let ctrl = StepControl { rtol, atol, h_init: 1e-3, h_max: 0.1, ..StepControl::default() };
    let mut half = vec![[0.0, orbit.u_min, 0.0]];
    let mut drift: f64 = 0.0;
    let finish = rk45::integrate(
        |_, y| [y[1], acceleration(n, y[0])],
        0.0,
        [orbit.u_min, 0.0],
        1e3 * minimal_period(n)?,
        &ctrl,
        |s| {
            let [u, du] = s.y1;
            drift = drift.max(((energy(n, u, du) - e0) / depth).abs());
            if du <= 0.0 {
                let t = s.locate(|y| y[1], 1e-13);
                let y = s.eval(t);
                half.push([t, y[0], y[1]]);
                return ControlFlow::Break(t);
            }
            half.push([s.t1, u, du]);
            ControlFlow::Continue(())
        },
    )?;
    let t_half = match finish {
        Finish::Stopped(t) => t,
        Finish::Completed { t, y } => return Err(Error::Unclassified { t, h: y[0], dh: y[1] }),
    };
    let mut samples = half.clone();
    samples.extend(half.iter().rev().skip(1).map(|&[t, u, du]| [2.0 * t_half - t, u, 0.0 - du]));
    Ok(OrbitTrace { samples, return_time: 2.0 * t_half, max_energy_drift: drift })
}

/// `(int u'^2, int u^2, int u^p)` over one period of the orbit.
pub fn orbit_integrals(orbit: &CircleOrbit) -> [f64; 3] {
    let (n, a, b) = (orbit.n, orbit.u_min, orbit.u_max);
    let uc = constant_solution(n).expect("orbit dimension is valid");
    let level = Level::through(n, uc, a);
    let p = exponent(n);
    [
        2.0 * turning_point_integral(&level, a, b, |_, speed| speed),
        2.0 * turning_point_integral(&level, a, b, |u, speed| u * u / speed),
        2.0 * turning_point_integral(&level, a, b, |u, speed| u.powf(p) / speed),
    ]
}

/// Yamabe quotient on `M^{n-1} x S^1(r)` with `Vol(M) = Vol(S^{n-1})` and
/// `s_g = (n-1)(n-2)` of a function of the circle with given integrals
/// over `[0, 2 pi r]`.
fn circle_quotient(n: usize, grad: f64, sq: f64, pow: f64) -> Result<f64> {
    let nf = n as f64;
    let vol = geomconst::sphere_volume(n - 1)?;
    let a = 4.0 * (nf - 1.0) / (nf - 2.0);
    let s = (nf - 1.0) * (nf - 2.0);
    let p = exponent(n);
    Ok(vol * (a * grad + s * sq) / (vol * pow).powf(2.0 / p))
}

/// `S^1`-Yamabe constant of `M^{n-1} x S^1(r)` (`Vol(M) = Vol(S^{n-1})`,
/// `s_g = (n-1)(n-2)`): the least quotient among the constant solution and
/// the nonconstant periodic solutions.
pub fn s1_yamabe_constant(n: usize, r: f64) -> Result<f64> {
    let uc = constant_solution(n)?;
    let len = 2.0 * PI * r;
    let mut best = circle_quotient(n, 0.0, uc * uc * len, uc.powf(exponent(n)) * len)?;
    // A winding longer than the deepest resolvable orbit is a chain of `k`
    // bubbles to within rounding, with quotient `k^{2/n} Y_n`.
    let longest = orbit_from_min(n, MIN_ORBIT_DEPTH)?.period;
    for k in 1..=count_periodic_solutions(n, r)? {
        let kf = k as f64;
        if len / kf >= longest {
            best = best.min(kf.powf(2.0 / n as f64) * crate::geomconst::yamabe_sphere(n)?);
            continue;
        }
        let orbit = orbit_with_period(n, len / kf)?;
        let [g, s, p] = orbit_integrals(&orbit);
        best = best.min(circle_quotient(n, kf * g, kf * s, kf * p)?);
    }
    Ok(best)
}
