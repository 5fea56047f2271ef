//! Shared numerical building blocks: vector helpers, half-integer gamma
//! values, sphere surface measures, and adaptive quadrature.

use crate::error::{Error, Result};

/// Dot product of two equal-length slices.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Squared Euclidean distance between two points.
#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Γ(k/2) for integer `k ≥ 1`, computed exactly by the recursion
/// Γ(x+1) = xΓ(x) from Γ(1/2) = √π and Γ(1) = 1.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "gamma_half requires k >= 1");
    let mut value = if k % 2 == 1 {
        std::f64::consts::PI.sqrt()
    } else {
        1.0
    };
    let mut two_x = if k % 2 == 1 { 1 } else { 2 };
    while two_x < k {
        value *= two_x as f64 / 2.0;
        two_x += 2;
    }
    value
}

/// Surface measure of the unit sphere S^{p-1} in ℝ^p: 2π^{p/2}/Γ(p/2).
pub fn sphere_surface_area(p: usize) -> f64 {
    assert!(p >= 1);
    2.0 * std::f64::consts::PI.powf(p as f64 / 2.0) / gamma_half(p as u32)
}

/// ω_{p-1} = 2π^{(p-1)/2}/Γ((p-1)/2), the surface measure of S^{p-2}.
pub fn omega(p: usize) -> f64 {
    assert!(p >= 2);
    2.0 * std::f64::consts::PI.powf((p as f64 - 1.0) / 2.0) / gamma_half(p as u32 - 1)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to relative tolerance
/// `rel_tol`.
///
/// Subintervals are bisected until the local Richardson estimate meets the
/// budget; splitting is forced to a minimum depth so narrow features near
/// the initial sample points are not accepted prematurely. Discontinuous
/// integrands are handled by bisection down to the depth cap, below which
/// the residual is negligible. Returns an error only if the accumulated
/// unresolved residual exceeds the requested budget.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::parameter(format!(
            "invalid integration interval [{a}, {b}]"
        )));
    }
    // Coarse pre-pass to set the absolute budget.
    let panels = 64;
    let h = (b - a) / panels as f64;
    let mut coarse = 0.0;
    for k in 0..panels {
        let x0 = a + k as f64 * h;
        coarse += simpson(&f, x0, x0 + h).0;
    }
    let budget = rel_tol * coarse.abs().max(1e-300);

    let mut state = SimpsonState {
        f: &f,
        unresolved: 0.0,
    };
    let (s, fa, fm, fb) = simpson(&f, a, b);
    let value = state.refine(a, b, fa, fm, fb, s, budget, 0);
    if state.unresolved > budget.max(1e-290) {
        return Err(Error::numerical(format!(
            "quadrature failed to converge: unresolved residual {:.3e} exceeds budget {:.3e}",
            state.unresolved, budget
        )));
    }
    Ok(value)
}

const MIN_DEPTH: u32 = 6;
const MAX_DEPTH: u32 = 52;

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fa, fm, fb)
}

struct SimpsonState<'a, F> {
    f: &'a F,
    unresolved: f64,
}

impl<F: Fn(f64) -> f64> SimpsonState<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        budget: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth >= MIN_DEPTH && (delta.abs() <= 15.0 * budget || depth >= MAX_DEPTH) {
            if depth >= MAX_DEPTH && delta.abs() > 15.0 * budget {
                self.unresolved += delta.abs() / 15.0;
            }
            return left + right + delta / 15.0;
        }
        self.refine(a, m, fa, flm, fm, left, budget / 2.0, depth + 1)
            + self.refine(m, b, fm, frm, fb, right, budget / 2.0, depth + 1)
    }
}

/// Median of a slice (averaging the two middle order statistics for even
/// lengths). Panics on empty input.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}
