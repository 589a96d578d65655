//! Gauss-Legendre rules and a few small one-dimensional helpers shared by the
//! functional and periodic modules.

use std::sync::OnceLock;

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre three-term
    /// recurrence, starting from the Chebyshev-like guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    #[inline]
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Shared 16-point rule.
pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// Composite 16-point Gauss-Legendre over `panels` equal panels of `[a, b]`.
pub fn composite_gl<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let rule = gl16();
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + w * i as f64;
            rule.integrate(lo, lo + w, &mut f)
        })
        .sum()
}

/// Adaptive Gauss-Legendre: a panel is accepted when its 16-point estimate
/// agrees with the sum over its two halves to its share of `abs_tol` (or to
/// rounding level relative to the running total).
pub fn adaptive_gl<F: FnMut(f64) -> f64>(a: f64, b: f64, abs_tol: f64, mut f: F) -> f64 {
    const MAX_PANELS: usize = 200_000;
    let rule = gl16();
    let width = b - a;
    let whole = rule.integrate(a, b, &mut f);
    let mut total: f64 = 0.0;
    let mut stack = vec![(a, b, whole)];
    let mut panels = 0usize;
    while let Some((lo, hi, est)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &mut f);
        let right = rule.integrate(mid, hi, &mut f);
        let sum = left + right;
        panels += 1;
        let share = abs_tol * (hi - lo) / width;
        let floor = 1e-15 * whole.abs().max(total.abs());
        if (sum - est).abs() <= share.max(floor) || panels >= MAX_PANELS || mid <= lo || mid >= hi {
            total += sum;
        } else {
            stack.push((mid, hi, right));
            stack.push((lo, mid, left));
        }
    }
    total
}

/// Bisection for a sign change of `f` on `[lo, hi]`; returns the final
/// bracket once it is no wider than `tol` (or stops shrinking).
pub fn bisect<F: FnMut(f64) -> f64>(mut lo: f64, mut hi: f64, tol: f64, mut f: F) -> (f64, f64) {
    let f_lo = f(lo);
    let lo_negative = f_lo < 0.0;
    for _ in 0..400 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if (f(mid) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}
