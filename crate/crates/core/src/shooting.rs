//! Bisection on the initial value `alpha` for the positive decaying solution.
//!
//! Shots above the ground-state value cross zero, shots below it turn up
//! before decaying. The bracket keeps those labels on its two sides.

use crate::error::{Error, Result};
use crate::geomconst::Dims;
use crate::ode::{self, IntegrationControls, RadialProfile, ShotOutcome};

pub const DEFAULT_TOL_ALPHA: f64 = 1e-12;
const MIN_TOL_ALPHA: f64 = 1e-14;
const MAX_BRACKET_ALPHA: f64 = (1u64 << 20) as f64;

/// A located ground state.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub d: Dims,
    pub alpha0: f64,
    /// Final bracket: turned up at `.0`, crossed zero at `.1`.
    pub bracket: (f64, f64),
    pub profile: RadialProfile,
    pub shots: usize,
}

fn is_crossing(o: &ShotOutcome) -> bool {
    matches!(o, ShotOutcome::CrossedZero { .. })
}

fn is_turn(o: &ShotOutcome) -> bool {
    matches!(o, ShotOutcome::TurnedUp { .. })
}

/// Returns `(1, alpha_hi)` where `alpha_hi` is the first of `2, 4, 8, ...`
/// whose shot crosses zero.
pub fn bracket_alpha(d: Dims, ctrl: &IntegrationControls) -> Result<(f64, f64)> {
    let mut hi = 2.0;
    while hi <= MAX_BRACKET_ALPHA {
        if is_crossing(&ode::integrate_shot(hi, d, ctrl)?) {
            return Ok((1.0, hi));
        }
        hi *= 2.0;
    }
    Err(Error::BracketNotFound { alpha: MAX_BRACKET_ALPHA })
}

/// Locates `alpha0(m, n)` to within `tol_alpha` and returns the truncated
/// ground-state profile with its exponential tail attached.
pub fn find_ground_state(d: Dims, tol_alpha: f64, ctrl: &IntegrationControls) -> Result<GroundState> {
    if !(tol_alpha >= MIN_TOL_ALPHA) {
        return Err(Error::InvalidArgument(format!("tol_alpha must be >= {MIN_TOL_ALPHA:e}, got {tol_alpha:e}")));
    }
    let (mut lo, mut hi) = bracket_alpha(d, ctrl)?;
    let mut shots = 0usize;

    while hi - lo > tol_alpha {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (outcome, trace) = ode::shoot(mid, d, ctrl, false)?;
        shots += 1;
        match outcome {
            ShotOutcome::CrossedZero { .. } => hi = mid,
            ShotOutcome::TurnedUp { .. } => lo = mid,
            ShotOutcome::Candidate(profile) => {
                debug_assert!(trace.is_none());
                return Ok(GroundState { d, alpha0: mid, bracket: (lo, hi), profile, shots });
            }
        }
    }

    // The labels are maintained by construction; re-check the endpoints of
    // the final bracket (alpha_lo = 1 short-circuits without integration).
    let lo_shot = ode::integrate_shot(lo, d, ctrl)?;
    let hi_shot = ode::integrate_shot(hi, d, ctrl)?;
    if !is_turn(&lo_shot) {
        return Err(Error::BracketInvariant { alpha: lo, detail: format!("lo side is {}", lo_shot.label()) });
    }
    if !is_crossing(&hi_shot) {
        return Err(Error::BracketInvariant { alpha: hi, detail: format!("hi side is {}", hi_shot.label()) });
    }

    let alpha0 = 0.5 * (lo + hi);
    let (outcome, trace) = ode::shoot(alpha0, d, ctrl, true)?;
    shots += 1;
    let mut profile = match (outcome, trace) {
        (ShotOutcome::Candidate(p), _) => p,
        (_, Some(p)) => p,
        (o, None) => return Err(Error::Consistency(format!("no trace for {} shot", o.label()))),
    };
    let cut = (1..profile.len())
        .find(|&i| profile.hs()[i] < ctrl.decay_threshold || profile.dhs()[i] >= 0.0)
        .unwrap_or(profile.len());
    if cut < 2 {
        return Err(Error::DegenerateProfile(format!("ground-state profile truncated at node {cut}")));
    }
    profile.truncate_with_tail(cut);
    Ok(GroundState { d, alpha0, bracket: (lo, hi), profile, shots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: usize, n: usize) -> Dims {
        Dims::new(m, n).unwrap()
    }

    #[test]
    fn bracket_contains_22_value() {
        let ctrl = IntegrationControls::default();
        let (lo, hi) = bracket_alpha(d(2, 2), &ctrl).unwrap();
        assert_eq!(lo, 1.0);
        assert!(lo < 2.2062 && 2.2062 < hi);
        assert!(matches!(ode::integrate_shot(lo, d(2, 2), &ctrl).unwrap(), ShotOutcome::TurnedUp { .. }));
    }

    #[test]
    fn ground_state_22() {
        let ctrl = IntegrationControls::default();
        let gs = find_ground_state(d(2, 2), DEFAULT_TOL_ALPHA, &ctrl).unwrap();
        assert!((gs.alpha0 - 2.2062).abs() < 5e-5, "alpha0 = {}", gs.alpha0);
        let (lo, hi) = gs.bracket;
        assert!(lo < gs.alpha0 && gs.alpha0 <= hi && hi - lo <= DEFAULT_TOL_ALPHA);
        let p = &gs.profile;
        assert!(p.hs().iter().all(|&h| h > 0.0));
        assert!(p.hs()[1..].windows(2).all(|w| w[1] < w[0]));
        assert!(p.tail().is_some());
        assert!(p.t_end() > 8.0);
    }

    #[test]
    fn rejects_tiny_tolerance() {
        let ctrl = IntegrationControls::default();
        assert!(find_ground_state(d(2, 2), 1e-20, &ctrl).is_err());
    }
}
