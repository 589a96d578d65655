//! Closed-form dimensional constants: round sphere volumes, Yamabe invariants
//! of spheres, best Sobolev constants and the product constant `C(m, n)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensions `(m, n)` of the two factors of a product `M^m x N^n`.
///
/// The total dimension `k = m + n` must be at least 3 so that the critical
/// Sobolev exponent `p_k = 2k/(k-2)` is finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dims {
    m: usize,
    n: usize,
}

impl Dims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidDimension { what: "m", value: m, min: 1 });
        }
        if n < 1 {
            return Err(Error::InvalidDimension { what: "n", value: n, min: 1 });
        }
        if m + n < 3 {
            return Err(Error::InvalidDimension { what: "m + n", value: m + n, min: 3 });
        }
        Ok(Self { m, n })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total dimension `m + n`.
    #[inline]
    pub fn k(&self) -> usize {
        self.m + self.n
    }

    /// Coefficient of the conformal Laplacian, `4(k-1)/(k-2)`.
    pub fn a(&self) -> f64 {
        let k = self.k() as f64;
        4.0 * (k - 1.0) / (k - 2.0)
    }

    /// Critical Sobolev exponent `2k/(k-2)`.
    pub fn p(&self) -> f64 {
        let k = self.k() as f64;
        2.0 * k / (k - 2.0)
    }

    /// Nonlinearity exponent `(k+2)/(k-2) = p - 1`.
    pub fn q(&self) -> f64 {
        let k = self.k() as f64;
        (k + 2.0) / (k - 2.0)
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

/// `Gamma(j/2)` for a positive integer `j`, by the recurrence
/// `Gamma(x + 1) = x Gamma(x)` from `Gamma(1) = 1` or `Gamma(1/2) = sqrt(pi)`.
fn gamma_half(j: usize) -> f64 {
    debug_assert!(j >= 1);
    let (mut x, mut g) = if j.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = j as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface measure of the unit sphere `S^k` for `k >= 0`; `S^0` is two points.
pub(crate) fn sphere_measure(k: usize) -> f64 {
    2.0 * PI.powf((k as f64 + 1.0) / 2.0) / gamma_half(k + 1)
}

/// Volume of the unit round sphere `S^k`, `2 pi^{(k+1)/2} / Gamma((k+1)/2)`.
pub fn sphere_volume(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidDimension { what: "k", value: k, min: 1 });
    }
    Ok(sphere_measure(k))
}

/// Yamabe invariant of the round sphere, `Y_k = k(k-1) Vol(S^k)^{2/k}`.
pub fn yamabe_sphere(k: usize) -> Result<f64> {
    if k < 3 {
        return Err(Error::InvalidDimension { what: "k", value: k, min: 3 });
    }
    let kf = k as f64;
    Ok(kf * (kf - 1.0) * sphere_measure(k).powf(2.0 / kf))
}

/// Best `n`-dimensional Sobolev constant `a_n / Y_n`.
pub fn sobolev_constant(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidDimension { what: "n", value: n, min: 3 });
    }
    let nf = n as f64;
    let a = 4.0 * (nf - 1.0) / (nf - 2.0);
    Ok(a / yamabe_sphere(n)?)
}

/// The constant `C(m, n) = a_k^{n/k} k n^{-n/k} m^{-m/k}` relating the
/// limiting Yamabe constant of `M x R^n` to the Gagliardo-Nirenberg constant.
///
/// Evaluated in log-space and exponentiated once.
pub fn product_constant(d: Dims) -> f64 {
    let (m, n, k) = (d.m() as f64, d.n() as f64, d.k() as f64);
    let log_c = (n / k) * d.a().ln() + k.ln() - (n / k) * n.ln() - (m / k) * m.ln();
    log_c.exp()
}

/// Scalar curvature of the round metric on `S^m` rescaled to unit volume.
///
/// Under `g -> c g` the volume scales by `c^{m/2}` and the scalar curvature by
/// `1/c`, so `s = m(m-1) Vol(S^m)^{2/m}`.
pub fn unit_volume_sphere_scalar(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidDimension { what: "m", value: m, min: 2 });
    }
    let mf = m as f64;
    Ok(mf * (mf - 1.0) * sphere_measure(m).powf(2.0 / mf))
}
