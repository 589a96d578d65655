//! Limiting N-Yamabe constants of products `M^m x R^n` and the table of
//! `(sigma^{-1}, Y^inf, Y_{m+n})` over small dimensions.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::{self, RadialFunction};
use crate::geomconst::{self, Dims};
use crate::ode::IntegrationControls;
use crate::shooting::{self, DEFAULT_TOL_ALPHA};

/// One row of the constants table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsRow {
    pub m: usize,
    pub n: usize,
    pub alpha0: f64,
    pub sigma_inv: f64,
    pub y_inf: f64,
    pub y_sphere: f64,
}

impl ConstantsRow {
    pub fn below_sphere(&self) -> bool {
        self.y_inf < self.y_sphere
    }
}

/// A row that could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct RowFailure {
    pub d: Dims,
    pub error: Error,
}

/// `Y^inf = C(m, n) s_g^{m/k} sigma^{-1}`.
pub fn y_infinity(d: Dims, s_g: f64, sigma_inv: f64) -> f64 {
    let (m, k) = (d.m() as f64, d.k() as f64);
    geomconst::product_constant(d) * s_g.powf(m / k) * sigma_inv
}

/// Minimiser and minimum of `F(lambda) = lambda^{2m/k} A + lambda^{-2n/k} B`.
pub fn optimal_dilation(a: f64, b: f64, d: Dims) -> Result<(f64, f64)> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument(format!("A and B must be positive, got {a}, {b}")));
    }
    let (m, n, k) = (d.m() as f64, d.n() as f64, d.k() as f64);
    let lambda0 = (n * b / (m * a)).sqrt();
    let f_min = a.powf(n / k) * b.powf(m / k) * m.powf(-m / k) * n.powf(-n / k) * k;
    Ok((lambda0, f_min))
}

/// `F(lambda)` for the same `A`, `B`.
pub fn dilation_quotient(a: f64, b: f64, d: Dims, lambda: f64) -> f64 {
    let (m, n, k) = (d.m() as f64, d.n() as f64, d.k() as f64);
    lambda.powf(2.0 * m / k) * a + lambda.powf(-2.0 * n / k) * b
}

/// Upper bound on `Y^inf` obtained from a single test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileBound {
    /// `L_{m,n}` of the test function.
    pub l_value: f64,
    /// `C(m, n) s_g^{m/k} L`.
    pub bound: f64,
    pub lambda0: f64,
    /// Minimum over dilations of the Yamabe quotient, from `A` and `B`.
    pub f_min: f64,
}

/// Bounds `Y^inf` from above by `C(m, n) s_g^{m/k} L(f)`, cross-checked
/// against the minimum over dilations of the Yamabe quotient of `f`.
pub fn bound_from_profile<P: RadialFunction>(profile: &P, d: Dims, s_g: f64) -> Result<ProfileBound> {
    if !(s_g > 0.0) {
        return Err(Error::InvalidArgument(format!("scalar curvature must be positive, got {s_g}")));
    }
    let ints = functional::radial_integrals(profile, d)?;
    let gn = functional::gn_from_integrals(&ints, d);
    let norm = ints.pow.powf(2.0 / d.p());
    let (lambda0, f_min) = optimal_dilation(d.a() * ints.grad / norm, s_g * ints.sq / norm, d)?;
    let bound = y_infinity(d, s_g, gn.sigma_inv);
    if ((f_min - bound) / bound).abs() > 1e-9 {
        return Err(Error::Consistency(format!("dilation minimum {f_min} disagrees with C s^(m/k) L = {bound}")));
    }
    Ok(ProfileBound { l_value: gn.sigma_inv, bound, lambda0, f_min })
}

/// Controls for [`build_table`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableControls {
    pub tol_alpha: f64,
    pub integration: IntegrationControls,
}

impl Default for TableControls {
    fn default() -> Self {
        Self { tol_alpha: DEFAULT_TOL_ALPHA, integration: IntegrationControls::default() }
    }
}

/// All `(m, n)` with `m, n >= 2` and `m + n <= max_total_dim`, ordered by
/// increasing `m + n`, then decreasing `n`.
pub fn table_dims(max_total_dim: usize) -> Vec<Dims> {
    let mut out = Vec::new();
    for k in 4..=max_total_dim {
        for n in (2..=k - 2).rev() {
            out.push(Dims::new(k - n, n).expect("m, n >= 2"));
        }
    }
    out
}

/// Computes one table row with a round-sphere first factor.
pub fn compute_row(d: Dims, ctrl: &TableControls) -> Result<ConstantsRow> {
    let gs = shooting::find_ground_state(d, ctrl.tol_alpha, &ctrl.integration)?;
    let gn = functional::gn_value(&gs.profile, d)?;
    let s_g = geomconst::unit_volume_sphere_scalar(d.m())?;
    Ok(ConstantsRow {
        m: d.m(),
        n: d.n(),
        alpha0: gs.alpha0,
        sigma_inv: gn.sigma_inv,
        y_inf: y_infinity(d, s_g, gn.sigma_inv),
        y_sphere: geomconst::yamabe_sphere(d.k())?,
    })
}

/// Builds the table for `m, n >= 2`, `m + n <= max_total_dim`. Rows are
/// computed in parallel and returned in table order; failed rows carry
/// their diagnostic.
pub fn build_table(
    max_total_dim: usize,
    ctrl: &TableControls,
) -> Result<Vec<std::result::Result<ConstantsRow, RowFailure>>> {
    if max_total_dim < 4 {
        return Err(Error::InvalidDimension { what: "max total dimension", value: max_total_dim, min: 4 });
    }
    Ok(table_dims(max_total_dim)
        .into_par_iter()
        .map(|d| compute_row(d, ctrl).map_err(|error| RowFailure { d, error }))
        .collect())
}

/// Yamabe constants quoted for comparison in dimension 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceConstants {
    /// `Y(CP^2) = 12 sqrt(2) pi`, realised by the Fubini-Study metric.
    pub y_cp2: f64,
    /// `Y(S^2 x S^2, [g + g]) = 16 pi`.
    pub y_s2xs2_product: f64,
}

pub fn reference_constants() -> ReferenceConstants {
    ReferenceConstants { y_cp2: 12.0 * 2f64.sqrt() * PI, y_s2xs2_product: 16.0 * PI }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: usize, n: usize) -> Dims {
        Dims::new(m, n).unwrap()
    }

    #[test]
    fn y_infinity_examples() {
        let y = y_infinity(d(2, 2), 8.0 * PI, 2.41877);
        assert!((y - 59.40481).abs() < 5e-3, "{y}");
        let s5 = geomconst::unit_volume_sphere_scalar(5).unwrap();
        let y = y_infinity(d(5, 2), s5, 1.75469);
        assert!((y - 113.2670).abs() < 5e-3, "{y}");
        assert_eq!(y_infinity(d(3, 3), 1.0, 0.0), 0.0);
    }

    #[test]
    fn optimal_dilation_examples() {
        let (l, f) = optimal_dilation(3.0, 3.0, d(3, 3)).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (f - 6.0).abs() < 1e-14);
        let (l, f) = optimal_dilation(4.0, 1.0, d(2, 2)).unwrap();
        assert!((l - 0.5).abs() < 1e-15 && (f - 4.0).abs() < 1e-14);
        for (a, b, dd) in [(4.0, 1.0, d(2, 2)), (0.3, 7.0, d(5, 2)), (2.0, 0.01, d(2, 7))] {
            let (l, f) = optimal_dilation(a, b, dd).unwrap();
            assert!(((dilation_quotient(a, b, dd, l) - f) / f).abs() < 1e-13);
            assert!(f <= dilation_quotient(a, b, dd, 0.5 * l));
            assert!(f <= dilation_quotient(a, b, dd, 2.0 * l));
        }
        assert!(optimal_dilation(0.0, 1.0, d(2, 2)).is_err());
    }

    #[test]
    fn table_ordering() {
        let dims = table_dims(9);
        assert_eq!(dims.len(), 21);
        let pairs: Vec<(usize, usize)> = dims.iter().map(|d| (d.m(), d.n())).collect();
        assert_eq!(&pairs[..6], &[(2, 2), (2, 3), (3, 2), (2, 4), (3, 3), (4, 2)]);
        assert_eq!(pairs[20], (7, 2));
        assert_eq!(table_dims(4).len(), 1);
        assert!(build_table(3, &TableControls::default()).is_err());
    }

    #[test]
    fn reference_values() {
        let r = reference_constants();
        assert!((r.y_cp2 - 53.31459).abs() < 1e-5);
        assert!((r.y_s2xs2_product - 50.26548).abs() < 1e-5);
        assert!(r.y_s2xs2_product < r.y_cp2);
    }

    #[test]
    fn bundled_profile_bound() {
        let p = functional::PiecewiseLinearProfile::bundled();
        let b = bound_from_profile(&p, d(2, 2), 8.0 * PI).unwrap();
        assert!(b.bound < 8.0 * (3.0 * PI).sqrt() * 2.427458);
        assert!(b.bound < geomconst::yamabe_sphere(4).unwrap());
        assert!(b.bound > 59.405);
    }
}
