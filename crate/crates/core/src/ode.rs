//! Radial ground-state ODE `h'' + ((n-1)/t) h' - h + |h|^{q-1} h = 0` and the
//! classification of single shots from `h(0) = alpha`, `h'(0) = 0`.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::geomconst::Dims;
use crate::rk45::{self, DenseStep, Finish, StepControl};

/// Far-field continuation `h(t) = h_cut e^{-rate (t - t_cut)} (t_cut / t)^power`
/// attached beyond the last stored sample of a truncated profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTail {
    pub t_cut: f64,
    pub h_cut: f64,
    pub rate: f64,
    pub power: f64,
}

impl ExpTail {
    pub fn value(&self, t: f64) -> f64 {
        self.h_cut * (-self.rate * (t - self.t_cut)).exp() * (self.t_cut / t).powf(self.power)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        -self.value(t) * (self.rate + self.power / t)
    }
}

/// A radial function sampled on a strictly increasing grid starting at 0,
/// with first and second derivatives at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    ts: Vec<f64>,
    hs: Vec<f64>,
    dhs: Vec<f64>,
    ddhs: Vec<f64>,
    n: usize,
    tail: Option<ExpTail>,
}

impl RadialProfile {
    pub fn new(
        ts: Vec<f64>,
        hs: Vec<f64>,
        dhs: Vec<f64>,
        ddhs: Vec<f64>,
        n: usize,
        tail: Option<ExpTail>,
    ) -> Result<Self> {
        let len = ts.len();
        if len < 2 || hs.len() != len || dhs.len() != len || ddhs.len() != len {
            return Err(Error::DegenerateProfile(format!(
                "need >= 2 nodes with matching arrays (t: {}, h: {}, h': {}, h'': {})",
                ts.len(),
                hs.len(),
                dhs.len(),
                ddhs.len()
            )));
        }
        if ts[0] != 0.0 || dhs[0] != 0.0 {
            return Err(Error::DegenerateProfile("profile must start at t = 0 with h'(0) = 0".into()));
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateProfile("radii must be strictly increasing".into()));
        }
        if n < 1 {
            return Err(Error::InvalidDimension { what: "n", value: n, min: 1 });
        }
        Ok(Self { ts, hs, dhs, ddhs, n, tail })
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn hs(&self) -> &[f64] {
        &self.hs
    }

    pub fn dhs(&self) -> &[f64] {
        &self.dhs
    }

    pub fn ddhs(&self) -> &[f64] {
        &self.ddhs
    }

    /// Initial value `h(0)`.
    pub fn alpha(&self) -> f64 {
        self.hs[0]
    }

    /// Radial (Euclidean) dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tail(&self) -> Option<&ExpTail> {
        self.tail.as_ref()
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    /// Last stored radius.
    pub fn t_end(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    /// `(h, h')` on node interval `i` at `t`, by quintic Hermite interpolation
    /// of `(h, h', h'')` at both ends.
    pub fn hermite(&self, i: usize, t: f64) -> (f64, f64) {
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let dt = t1 - t0;
        let s = (t - t0) / dt;
        let (s2, s3) = (s * s, s * s * s);
        let (s4, s5) = (s3 * s, s3 * s2);
        let h00 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h10 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h20 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
        let h01 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let h11 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let h21 = 0.5 * (s3 - 2.0 * s4 + s5);
        let d00 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let d10 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let d20 = 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4);
        let d01 = -d00;
        let d11 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let d21 = 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4);
        let (y0, y1) = (self.hs[i], self.hs[i + 1]);
        let (p0, p1) = (self.dhs[i] * dt, self.dhs[i + 1] * dt);
        let (a0, a1) = (self.ddhs[i] * dt * dt, self.ddhs[i + 1] * dt * dt);
        let h = h00 * y0 + h10 * p0 + h20 * a0 + h01 * y1 + h11 * p1 + h21 * a1;
        let dh = (d00 * y0 + d10 * p0 + d20 * a0 + d01 * y1 + d11 * p1 + d21 * a1) / dt;
        (h, dh)
    }

    /// Evaluates `(h, h')` anywhere on `[0, inf)`: interpolated on the stored
    /// grid, the attached tail beyond it, zero past the end without a tail.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let t_end = self.t_end();
        if t >= t_end {
            return match &self.tail {
                Some(tail) if t > t_end => (tail.value(t), tail.derivative(t)),
                _ if t == t_end => (*self.hs.last().unwrap(), *self.dhs.last().unwrap()),
                _ => (0.0, 0.0),
            };
        }
        let i = match self.ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return (self.hs[i], self.dhs[i]),
            Err(i) => i - 1,
        };
        self.hermite(i, t)
    }

    /// `h(lambda t)`, represented on the grid `t_i / lambda`.
    pub fn dilate(&self, lambda: f64) -> Self {
        Self {
            ts: self.ts.iter().map(|t| t / lambda).collect(),
            hs: self.hs.clone(),
            dhs: self.dhs.iter().map(|d| d * lambda).collect(),
            ddhs: self.ddhs.iter().map(|d| d * lambda * lambda).collect(),
            n: self.n,
            tail: self.tail.map(|tl| ExpTail { t_cut: tl.t_cut / lambda, rate: tl.rate * lambda, ..tl }),
        }
    }

    /// `c h(t)`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            ts: self.ts.clone(),
            hs: self.hs.iter().map(|h| c * h).collect(),
            dhs: self.dhs.iter().map(|d| c * d).collect(),
            ddhs: self.ddhs.iter().map(|d| c * d).collect(),
            n: self.n,
            tail: self.tail.map(|tl| ExpTail { h_cut: c * tl.h_cut, ..tl }),
        }
    }

    /// Adds `eps * b(t)` where `bump(t)` returns `(b, b', b'')`. The bump must
    /// satisfy `b'(0) = 0` and be negligible past the stored grid.
    pub fn perturbed<B: Fn(f64) -> (f64, f64, f64)>(&self, eps: f64, bump: B) -> Self {
        let mut out = self.clone();
        for i in 0..out.ts.len() {
            let (b, db, ddb) = bump(out.ts[i]);
            out.hs[i] += eps * b;
            out.dhs[i] += eps * db;
            out.ddhs[i] += eps * ddb;
        }
        out.dhs[0] = 0.0;
        out
    }

    /// Plain-text `t h h'` rows.
    pub fn write_rows<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.ts.len() {
            writeln!(w, "{:.16e} {:.16e} {:.16e}", self.ts[i], self.hs[i], self.dhs[i])?;
        }
        Ok(())
    }

    /// Keeps nodes `0..len` and attaches the linearised far-field tail
    /// `h ~ e^{-t} t^{-(n-1)/2}` at the new last node.
    pub(crate) fn truncate_with_tail(&mut self, len: usize) {
        self.ts.truncate(len);
        self.hs.truncate(len);
        self.dhs.truncate(len);
        self.ddhs.truncate(len);
        self.tail = Some(ExpTail {
            t_cut: self.t_end(),
            h_cut: *self.hs.last().unwrap(),
            rate: 1.0,
            power: (self.n as f64 - 1.0) / 2.0,
        });
    }
}

/// Outcome of one shot.
#[derive(Debug, Clone, PartialEq)]
pub enum ShotOutcome {
    /// `h` reached zero with `h' < 0`: `alpha` is above the ground-state value.
    CrossedZero { t_cross: f64 },
    /// `h'` reached zero with `0 < h < 1`: `alpha` is below it.
    TurnedUp { t_turn: f64, h_at_turn: f64 },
    /// Decayed below the threshold with `h' < 0` at `t_max`.
    Candidate(RadialProfile),
}

impl ShotOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            ShotOutcome::CrossedZero { .. } => "crossed-zero",
            ShotOutcome::TurnedUp { .. } => "turned-up",
            ShotOutcome::Candidate(_) => "candidate",
        }
    }
}

/// Integration controls for a shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationControls {
    pub t_max: f64,
    pub rtol: f64,
    pub atol: f64,
    pub decay_threshold: f64,
    /// Radius of the Taylor start.
    pub t0: f64,
    pub max_step: f64,
    /// Resolution of event times.
    pub event_tol: f64,
}

impl Default for IntegrationControls {
    fn default() -> Self {
        Self {
            t_max: 50.0,
            rtol: 1e-11,
            atol: 1e-13,
            decay_threshold: 1e-6,
            t0: 1e-4,
            max_step: 0.25,
            event_tol: 1e-10,
        }
    }
}

impl IntegrationControls {
    /// Tolerances scaled by `factor` (e.g. `0.1` for a 10x tighter run).
    pub fn with_tolerance_factor(self, factor: f64) -> Self {
        Self { rtol: self.rtol * factor, atol: self.atol * factor, ..self }
    }

    fn step_control(&self) -> StepControl {
        StepControl {
            rtol: self.rtol,
            atol: self.atol,
            h_init: self.t0,
            h_max: self.max_step,
            ..StepControl::default()
        }
    }
}

#[inline]
fn odd_power(h: f64, q: f64) -> f64 {
    h.abs().powf(q - 1.0) * h
}

#[inline]
fn second_derivative(t: f64, h: f64, dh: f64, n: f64, q: f64) -> f64 {
    -((n - 1.0) / t) * dh + h - odd_power(h, q)
}

/// Right-hand side `(h', h'')` of the first-order system at `t > 0`.
pub fn rhs(t: f64, h: f64, dh: f64, d: Dims) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("rhs needs t > 0, got {t}")));
    }
    Ok((dh, second_derivative(t, h, dh, d.n() as f64, d.q())))
}

/// Second-order Taylor start `h(t0) = alpha + c t0^2`, `h'(t0) = 2 c t0` with
/// `c = (alpha - alpha^q) / (2n)`.
pub fn series_start(alpha: f64, t0: f64, d: Dims) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    if !(t0 > 0.0 && t0 <= 1e-3) {
        return Err(Error::InvalidArgument(format!("series start needs 0 < t0 <= 1e-3, got {t0}")));
    }
    let c = series_coefficient(alpha, d);
    Ok((alpha + c * t0 * t0, 2.0 * c * t0))
}

fn series_coefficient(alpha: f64, d: Dims) -> f64 {
    (alpha - alpha.powf(d.q())) / (2.0 * d.n() as f64)
}

/// Integrates one shot from `h(0) = alpha` and classifies it.
pub fn integrate_shot(alpha: f64, d: Dims, ctrl: &IntegrationControls) -> Result<ShotOutcome> {
    shoot(alpha, d, ctrl, false).map(|(outcome, _)| outcome)
}

/// As [`integrate_shot`], also returning every accepted node up to the event.
pub(crate) fn shoot(
    alpha: f64,
    d: Dims,
    ctrl: &IntegrationControls,
    keep_trace: bool,
) -> Result<(ShotOutcome, Option<RadialProfile>)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    if alpha <= 1.0 {
        return Ok((ShotOutcome::TurnedUp { t_turn: 0.0, h_at_turn: alpha }, None));
    }
    let nf = d.n() as f64;
    let q = d.q();
    let (h0, dh0) = series_start(alpha, ctrl.t0, d)?;

    let mut ts = vec![0.0, ctrl.t0];
    let mut hs = vec![alpha, h0];
    let mut dhs = vec![0.0, dh0];
    let mut ddhs = vec![2.0 * series_coefficient(alpha, d), second_derivative(ctrl.t0, h0, dh0, nf, q)];

    let f = |t: f64, y: &rk45::State| [y[1], second_derivative(t, y[0], y[1], nf, q)];
    let tol = ctrl.event_tol;
    let finish = rk45::integrate(f, ctrl.t0, [h0, dh0], ctrl.t_max, &ctrl.step_control(), |s: &DenseStep| {
        let [h1, dh1] = s.y1;
        if h1 <= 0.0 {
            let t_cross = s.locate(|y| y[0], tol);
            return ControlFlow::Break(ShotOutcome::CrossedZero { t_cross });
        }
        if dh1 >= 0.0 && h1 < 1.0 {
            let t_turn = s.locate(|y| y[1], tol);
            let h_at_turn = s.eval(t_turn)[0];
            return ControlFlow::Break(ShotOutcome::TurnedUp { t_turn, h_at_turn });
        }
        ts.push(s.t1);
        hs.push(h1);
        dhs.push(dh1);
        ddhs.push(s.f1[1]);
        ControlFlow::Continue(())
    })?;

    let make_profile = |ts, hs, dhs, ddhs| RadialProfile::new(ts, hs, dhs, ddhs, d.n(), None);
    match finish {
        Finish::Stopped(outcome) => {
            let trace = if keep_trace { Some(make_profile(ts, hs, dhs, ddhs)?) } else { None };
            Ok((outcome, trace))
        }
        Finish::Completed { t, y: [h, dh] } => {
            if h > 0.0 && h < ctrl.decay_threshold && dh < 0.0 {
                let mut profile = make_profile(ts, hs, dhs, ddhs)?;
                let len = profile.len();
                profile.truncate_with_tail(len);
                let trace = keep_trace.then(|| profile.clone());
                Ok((ShotOutcome::Candidate(profile), trace))
            } else {
                Err(Error::Unclassified { t, h, dh })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: usize, n: usize) -> Dims {
        Dims::new(m, n).unwrap()
    }

    #[test]
    fn rhs_examples() {
        for t in [0.1, 1.0, 7.0] {
            assert_eq!(rhs(t, 1.0, 0.0, d(3, 2)).unwrap().1, 0.0);
        }
        let (_, dd) = rhs(2.0, 0.0, 0.5, d(2, 3)).unwrap();
        assert!((dd - (-(2.0 / 2.0) * 0.5)).abs() < 1e-15);
        let (dh, dd) = rhs(1.0, 2.0, 0.0, d(2, 2)).unwrap();
        assert_eq!(dh, 0.0);
        assert!((dd + 6.0).abs() < 1e-14);
        assert!(rhs(0.0, 1.0, 0.0, d(2, 2)).is_err());
        // odd extension below zero
        let (_, dd) = rhs(1.0, -2.0, 0.0, d(2, 2)).unwrap();
        assert!((dd - 6.0).abs() < 1e-14);
    }

    #[test]
    fn series_start_examples() {
        assert_eq!(series_start(1.0, 1e-4, d(2, 2)).unwrap(), (1.0, 0.0));
        let (h, dh) = series_start(2.0, 1e-3, d(2, 2)).unwrap();
        assert!((h - (2.0 - 1.5e-6)).abs() < 1e-15);
        assert!((dh + 3e-3).abs() < 1e-15);
        let (h, dh) = series_start(0.5, 1e-3, d(2, 2)).unwrap();
        assert!(h > 0.5 && dh > 0.0);
        assert!(series_start(0.0, 1e-4, d(2, 2)).is_err());
        assert!(series_start(1.0, 1e-2, d(2, 2)).is_err());
    }

    #[test]
    fn shots_around_the_22_ground_state() {
        let ctrl = IntegrationControls::default();
        let above = integrate_shot(2.208, d(2, 2), &ctrl).unwrap();
        assert!(matches!(above, ShotOutcome::CrossedZero { .. }), "{above:?}");
        let below = integrate_shot(2.205, d(2, 2), &ctrl).unwrap();
        match below {
            ShotOutcome::TurnedUp { t_turn, h_at_turn } => {
                assert!(t_turn > 0.0);
                assert!(h_at_turn > 0.0 && h_at_turn < 1.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn alpha_at_most_one_turns_up() {
        let ctrl = IntegrationControls::default();
        for a in [0.3, 1.0] {
            assert!(matches!(integrate_shot(a, d(2, 2), &ctrl).unwrap(), ShotOutcome::TurnedUp { .. }));
        }
        assert!(integrate_shot(-1.0, d(2, 2), &ctrl).is_err());
    }

    #[test]
    fn crossing_has_negative_slope() {
        let ctrl = IntegrationControls::default();
        let (out, trace) = shoot(6.0, d(3, 3), &ctrl, true).unwrap();
        let ShotOutcome::CrossedZero { t_cross } = out else { panic!("{out:?}") };
        let trace = trace.unwrap();
        assert!(trace.t_end() < t_cross);
        assert!(*trace.dhs().last().unwrap() < 0.0);
    }

    #[test]
    fn hermite_reproduces_quintics() {
        let p = |t: f64| 1.0 + 0.5 * t * t - 0.3 * t.powi(3) + 0.1 * t.powi(4) - 0.02 * t.powi(5);
        let dp = |t: f64| t - 0.9 * t * t + 0.4 * t.powi(3) - 0.1 * t.powi(4);
        let ddp = |t: f64| 1.0 - 1.8 * t + 1.2 * t * t - 0.4 * t.powi(3);
        let ts = vec![0.0, 0.7, 1.5];
        let prof = RadialProfile::new(
            ts.clone(),
            ts.iter().map(|&t| p(t)).collect(),
            ts.iter().map(|&t| dp(t)).collect(),
            ts.iter().map(|&t| ddp(t)).collect(),
            2,
            None,
        )
        .unwrap();
        for j in 0..=30 {
            let t = 1.5 * j as f64 / 30.0;
            let (h, dh) = prof.eval(t);
            assert!((h - p(t)).abs() < 1e-13);
            assert!((dh - dp(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn profile_validation() {
        let ok = RadialProfile::new(vec![0.0, 1.0], vec![1.0, 0.5], vec![0.0, -1.0], vec![0.0; 2], 2, None);
        assert!(ok.is_ok());
        let bad = RadialProfile::new(vec![0.0, 0.0], vec![1.0, 0.5], vec![0.0, -1.0], vec![0.0; 2], 2, None);
        assert!(bad.is_err());
        let bad = RadialProfile::new(vec![0.0], vec![1.0], vec![0.0], vec![0.0], 2, None);
        assert!(bad.is_err());
    }
}
