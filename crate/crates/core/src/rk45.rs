//! Dormand-Prince 5(4) embedded pair with the classical fourth-order dense
//! output, specialised to planar systems `y = (u, u')`.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

pub type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step control for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { rtol: 1e-11, atol: 1e-13, h_init: 1e-3, h_max: 0.25, max_steps: 2_000_000 }
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep {
    pub t0: f64,
    pub t1: f64,
    pub y0: State,
    pub y1: State,
    /// `f(t1, y1)`.
    pub f1: State,
    rcont: [State; 5],
}

impl DenseStep {
    /// Interpolated state at `t` in `[t0, t1]`.
    pub fn eval(&self, t: f64) -> State {
        let theta = (t - self.t0) / (self.t1 - self.t0);
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
        }
        out
    }

    /// Locates a sign change of `g(eval(t))` inside the step by bisection
    /// down to `tol` in `t`. Assumes `g` changes sign between `t0` and `t1`.
    pub fn locate<G: Fn(&State) -> f64>(&self, g: G, tol: f64) -> f64 {
        let (lo, hi) = crate::quadrature::bisect(self.t0, self.t1, tol, |t| g(&self.eval(t)));
        0.5 * (lo + hi)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Finish<T> {
    /// Reached `t_end`.
    Completed { t: f64, y: State },
    /// The step callback requested a stop.
    Stopped(T),
}

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` to `t_end`, calling `on_step`
/// after every accepted step.
pub fn integrate<F, C, T>(f: F, t0: f64, y0: State, t_end: f64, ctrl: &StepControl, mut on_step: C) -> Result<Finish<T>>
where
    F: Fn(f64, &State) -> State,
    C: FnMut(&DenseStep) -> ControlFlow<T>,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = ctrl.h_init.min(ctrl.h_max).min(t_end - t0);
    let mut steps = 0usize;
    let mut rejected_last = false;

    while t < t_end {
        if steps >= ctrl.max_steps {
            return Err(Error::MaxStepsExceeded { t });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y1);

        let mut err_sq = 0.0;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = ctrl.atol + ctrl.rtol * y[i].abs().max(y1[i].abs());
            err_sq += (e / sc).powi(2);
        }
        let err = (err_sq / 2.0).sqrt();
        steps += 1;

        if !err.is_finite() {
            h *= 0.1;
            rejected_last = true;
            continue;
        }

        if err <= 1.0 {
            let mut rcont = [[0.0; 2]; 5];
            for i in 0..2 {
                let ydiff = y1[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k7[i] - bspl;
                rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let t1 = if last { t_end } else { t + h };
            let step = DenseStep { t0: t, t1, y0: y, y1, f1: k7, rcont };
            if let ControlFlow::Break(v) = on_step(&step) {
                return Ok(Finish::Stopped(v));
            }
            t = t1;
            y = y1;
            k1 = k7;
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 5.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(ctrl.h_max);
            rejected_last = false;
        } else {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h *= fac;
            rejected_last = true;
        }
    }
    Ok(Finish::Completed { t, y })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let ctrl = StepControl { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let two_pi = 2.0 * std::f64::consts::PI;
        let out = integrate(|_, y| [y[1], -y[0]], 0.0, [1.0, 0.0], two_pi, &ctrl, |_| ControlFlow::<()>::Continue(()))
            .unwrap();
        match out {
            Finish::Completed { t, y } => {
                assert_eq!(t, two_pi);
                assert!((y[0] - 1.0).abs() < 1e-10);
                assert!(y[1].abs() < 1e-10);
            }
            Finish::Stopped(_) => unreachable!(),
        }
    }

    #[test]
    fn dense_output_and_event_location() {
        let ctrl = StepControl { rtol: 1e-12, atol: 1e-14, h_max: 0.5, ..Default::default() };
        let out = integrate(
            |_, y| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            10.0,
            &ctrl,
            |s| {
                for j in 0..=4 {
                    let t = s.t0 + (s.t1 - s.t0) * j as f64 / 4.0;
                    let y = s.eval(t);
                    assert!((y[0] - t.cos()).abs() < 1e-9);
                    assert!((y[1] + t.sin()).abs() < 1e-9);
                }
                if s.y1[0] <= 0.0 {
                    ControlFlow::Break(s.locate(|y| y[0], 1e-13))
                } else {
                    ControlFlow::Continue(())
                }
            },
        )
        .unwrap();
        let Finish::Stopped(t) = out else { panic!("no event") };
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }
}
