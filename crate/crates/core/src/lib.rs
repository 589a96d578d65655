//! Best Gagliardo-Nirenberg constants `sigma_{m,n}` computed by shooting on
//! the radial ground-state equation, and the limiting Yamabe constants of
//! Riemannian products `M^m x N^n` they determine.
//!
//! The pieces, bottom up:
//!
//! * [`geomconst`]: sphere volumes, `Y_k`, `C(m, n)`.
//! * [`ode`]: single shots of `h'' + (n-1)/t h' - h + h^q = 0`.
//! * [`shooting`]: bisection on `h(0)` for the ground state.
//! * [`functional`]: quadrature of `L_{m,n}` and the Yamabe quotient.
//! * [`products`]: `Y^inf`, test-function bounds and the constants table.
//! * [`periodic`]: closed orbits of the Yamabe ODE on `S^{n-1} x S^1`.

// `!(x > 0.0)` is used throughout to reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod functional;
pub mod geomconst;
pub mod ode;
pub mod periodic;
pub mod products;
pub mod quadrature;
pub mod report;
pub mod rk45;
pub mod shooting;

pub use error::{Error, Result};
pub use functional::{
    dilate, gn_value, radial_integrals, yamabe_quotient, GNResult, PiecewiseLinearProfile, RadialFunction,
    RadialIntegrals,
};
pub use geomconst::{
    product_constant, sobolev_constant, sphere_volume, unit_volume_sphere_scalar, yamabe_sphere, Dims,
};
pub use ode::{integrate_shot, rhs, series_start, IntegrationControls, RadialProfile, ShotOutcome};
pub use periodic::{constant_solution, count_periodic_solutions, orbit_period, CircleOrbit};
pub use products::{
    bound_from_profile, build_table, optimal_dilation, reference_constants, y_infinity, ConstantsRow, TableControls,
};
pub use shooting::{bracket_alpha, find_ground_state, GroundState};
