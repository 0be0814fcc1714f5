//! Finite-difference stencils, interpolation and quadrature on the uniform s-grid.
//!
//! First and second derivatives are fourth order: centered 5-point stencils in
//! the interior, one-sided stencils of the same order at the two ends.

use std::ops::{Add, Mul, Sub};

/// Values that the stencils can act on (`f64` and `Complex64`).
pub trait GridValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl GridValue for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl GridValue for num_complex::Complex64 {
    fn zero() -> Self {
        num_complex::Complex64::new(0.0, 0.0)
    }
}

/// Formal order of accuracy of [`first_derivative`] and [`second_derivative`].
pub const FD_ORDER: u32 = 4;

fn combine<T: GridValue>(f: &[T], offset: usize, weights: &[f64], scale: f64) -> T {
    let mut acc = T::zero();
    for (i, &w) in weights.iter().enumerate() {
        if w != 0.0 {
            acc = acc + f[offset + i] * w;
        }
    }
    acc * scale
}

const D1_CENTER: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const D1_EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const D1_EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];

const D2_CENTER: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
const D2_EDGE0: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
const D2_EDGE1: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];

/// Fourth-order first derivative of grid samples with spacing `h`.
///
/// Needs at least 5 samples.
pub fn first_derivative<T: GridValue>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 5, "first_derivative needs 5 samples, got {n}");
    let s = 1.0 / (12.0 * h);
    let mut out = vec![T::zero(); n];
    out[0] = combine(f, 0, &D1_EDGE0, s);
    out[1] = combine(f, 0, &D1_EDGE1, s);
    for j in 2..n - 2 {
        out[j] = combine(f, j - 2, &D1_CENTER, s);
    }
    // mirrored one-sided stencils: reversing the samples flips the sign
    let rev = |w: &[f64; 5]| -> [f64; 5] {
        let mut r = [0.0; 5];
        for i in 0..5 {
            r[i] = -w[4 - i];
        }
        r
    };
    out[n - 1] = combine(f, n - 5, &rev(&D1_EDGE0), s);
    out[n - 2] = combine(f, n - 5, &rev(&D1_EDGE1), s);
    out
}

/// Fourth-order second derivative of grid samples with spacing `h`.
///
/// Needs at least 6 samples.
pub fn second_derivative<T: GridValue>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 6, "second_derivative needs 6 samples, got {n}");
    let s = 1.0 / (12.0 * h * h);
    let mut out = vec![T::zero(); n];
    out[0] = combine(f, 0, &D2_EDGE0, s);
    out[1] = combine(f, 0, &D2_EDGE1, s);
    for j in 2..n - 2 {
        out[j] = combine(f, j - 2, &D2_CENTER, s);
    }
    let rev = |w: &[f64; 6]| -> [f64; 6] {
        let mut r = [0.0; 6];
        for i in 0..6 {
            r[i] = w[5 - i];
        }
        r
    };
    out[n - 1] = combine(f, n - 6, &rev(&D2_EDGE0), s);
    out[n - 2] = combine(f, n - 6, &rev(&D2_EDGE1), s);
    out
}

/// Base index and weights of the four-point Lagrange interpolant at position
/// `x` (in grid units from sample 0) on a grid of `n >= 4` samples. Clamped to
/// the sample range.
pub fn lagrange_weights(n: usize, x: f64) -> (usize, [f64; 4]) {
    assert!(n >= 4, "interpolation needs 4 samples, got {n}");
    let x = x.clamp(0.0, (n - 1) as f64);
    let j = x.floor() as usize;
    let base = j.saturating_sub(1).min(n - 4);
    let mut w = [0.0; 4];
    for (m, wm) in w.iter_mut().enumerate() {
        let xm = (base + m) as f64;
        let mut l = 1.0;
        for q in 0..4 {
            if q != m {
                let xq = (base + q) as f64;
                l *= (x - xq) / (xm - xq);
            }
        }
        *wm = l;
    }
    (base, w)
}

/// Four-point Lagrange interpolation of grid samples at position `x`
/// (measured in grid units from sample 0). Clamped to the sample range.
pub fn interpolate<T: GridValue>(f: &[T], x: f64) -> T {
    let (base, w) = lagrange_weights(f.len(), x);
    (0..4).fold(T::zero(), |acc, m| acc + f[base + m] * w[m])
}

/// Integral over `[lo, hi]` of the piecewise-linear interpolant of samples
/// `g_j` located at `x0 + j h`. Reduces to the trapezoid rule when `lo`, `hi`
/// are grid points and is additive over adjacent intervals.
pub fn trapezoid(g: &[f64], x0: f64, h: f64, lo: f64, hi: f64) -> f64 {
    if g.len() < 2 || hi <= lo {
        return 0.0;
    }
    let last = (g.len() - 1) as f64;
    let a = ((lo - x0) / h).clamp(0.0, last);
    let b = ((hi - x0) / h).clamp(0.0, last);
    if b <= a {
        return 0.0;
    }
    let lin = |x: f64| -> f64 {
        let j = (x.floor() as usize).min(g.len() - 2);
        let w = x - j as f64;
        g[j] * (1.0 - w) + g[j + 1] * w
    };
    let ja = a.ceil() as usize;
    let jb = b.floor() as usize;
    if ja > jb {
        return 0.5 * (lin(a) + lin(b)) * (b - a) * h;
    }
    let mut total = 0.5 * (lin(a) + g[ja]) * (ja as f64 - a);
    for j in ja..jb {
        total += 0.5 * (g[j] + g[j + 1]);
    }
    total += 0.5 * (g[jb] + lin(b)) * (b - jb as f64);
    total * h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(x: f64, deg: i32) -> f64 {
        (0..=deg).map(|p| (p as f64 + 1.0) * x.powi(p)).sum()
    }

    fn dpoly(x: f64, deg: i32) -> f64 {
        (1..=deg).map(|p| (p as f64 + 1.0) * p as f64 * x.powi(p - 1)).sum()
    }

    fn ddpoly(x: f64, deg: i32) -> f64 {
        (2..=deg).map(|p| (p as f64 + 1.0) * (p * (p - 1)) as f64 * x.powi(p - 2)).sum()
    }

    #[test]
    fn first_derivative_exact_on_quartics() {
        let h = 0.1;
        let xs: Vec<f64> = (0..12).map(|j| -0.5 + j as f64 * h).collect();
        let f: Vec<f64> = xs.iter().map(|&x| poly(x, 4)).collect();
        let d = first_derivative(&f, h);
        for (x, v) in xs.iter().zip(d) {
            assert!((v - dpoly(*x, 4)).abs() < 1e-10, "at {x}: {v} vs {}", dpoly(*x, 4));
        }
    }

    #[test]
    fn second_derivative_exact_on_quintics() {
        let h = 0.1;
        let xs: Vec<f64> = (0..12).map(|j| -0.5 + j as f64 * h).collect();
        // the one-sided 6-point stencils are exact through degree 5, the centered through 5
        let f: Vec<f64> = xs.iter().map(|&x| poly(x, 5)).collect();
        let d = second_derivative(&f, h);
        for (x, v) in xs.iter().zip(d) {
            assert!((v - ddpoly(*x, 5)).abs() < 1e-8, "at {x}: {v} vs {}", ddpoly(*x, 5));
        }
    }

    #[test]
    fn derivative_convergence_order() {
        let err = |n: usize| {
            let h = 1.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|j| (3.0 * j as f64 * h).sin()).collect();
            first_derivative(&f, h)
                .iter()
                .enumerate()
                .map(|(j, v)| (v - 3.0 * (3.0 * j as f64 * h).cos()).abs())
                .fold(0.0, f64::max)
        };
        let order = (err(41) / err(81)).log2();
        assert!(order > 3.7 && order < 4.6, "order {order}");
    }

    #[test]
    fn interpolation_exact_on_cubics() {
        let f: Vec<f64> = (0..10).map(|j| poly(j as f64, 3)).collect();
        for &x in &[0.0, 0.3, 4.5, 8.7, 9.0] {
            assert!((interpolate(&f, x) - poly(x, 3)).abs() < 1e-9);
        }
    }

    #[test]
    fn trapezoid_partial_cells_and_additivity() {
        let g = vec![1.0; 11];
        assert!((trapezoid(&g, 0.0, 0.1, 0.05, 0.77) - 0.72).abs() < 1e-14);
        let g: Vec<f64> = (0..11).map(|j| j as f64 * 0.1).collect(); // g(x) = x
        assert!((trapezoid(&g, 0.0, 0.1, 0.0, 1.0) - 0.5).abs() < 1e-14);
        let whole = trapezoid(&g, 0.0, 0.1, 0.13, 0.91);
        let parts = trapezoid(&g, 0.0, 0.1, 0.13, 0.42) + trapezoid(&g, 0.0, 0.1, 0.42, 0.91);
        assert!((whole - parts).abs() < 1e-14);
        assert!((whole - 0.5 * (0.91f64.powi(2) - 0.13f64.powi(2))).abs() < 1e-14);
    }
}
