//! End pieces `u^-(s, t) = u(s - r, t)`, `u^+(s, t) = u(s + r, t)`, their
//! Cauchy distances across a family, and the circle averages at `s = -+(r - rho)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::{norm_c, PhysicalGrid, SpectralField};

/// Translated restriction of a field to an end plate. For the left piece the
/// coordinate runs over `[0, rho]`, for the right one over `[-rho, 0]`.
#[derive(Debug, Clone, Copy)]
pub struct EndPiece<'a> {
    field: &'a SpectralField,
    shift: f64,
    pub lo: f64,
    pub hi: f64,
}

impl<'a> EndPiece<'a> {
    /// Coefficients `[mode][component]` of the piece at coordinate `sigma`.
    pub fn coeffs_at(&self, sigma: f64) -> Vec<Complex64> {
        self.field.coeffs_at(sigma + self.shift)
    }
}

pub fn end_pieces(u: &SpectralField, r: f64, rho: f64) -> (EndPiece<'_>, EndPiece<'_>) {
    (
        EndPiece { field: u, shift: -r, lo: 0.0, hi: rho },
        EndPiece { field: u, shift: r, lo: -rho, hi: 0.0 },
    )
}

/// `sup_t |a(sigma, t) - b(sigma, t)|` at each `sigma`.
pub fn piece_distance(a: &EndPiece, b: &EndPiece, sigmas: &[f64], grid: &PhysicalGrid, dim: usize) -> Vec<f64> {
    sigmas
        .iter()
        .map(|&s| {
            let ca = a.coeffs_at(s);
            let cb = b.coeffs_at(s);
            let diff: Vec<Complex64> = ca.iter().zip(&cb).map(|(x, y)| x - y).collect();
            grid.synthesize(&diff).chunks(dim).map(norm_c).fold(0.0, f64::max)
        })
        .collect()
}

/// Cauchy proxy `d(k)`, `k = 1..=k_max`: sup distance between `u` and the
/// reference member on the two end windows of length `k`, sampled every `step`.
pub fn cauchy_profile(u: &SpectralField, reference: &SpectralField, k_max: usize, step: f64) -> Vec<f64> {
    let cyl = u.cylinder();
    let grid = PhysicalGrid::new(cyl, 2 * cyl.t_modes());
    let (r_u, r_ref) = (cyl.half_length(), reference.cylinder().half_length());
    let (um, up) = end_pieces(u, r_u, k_max as f64);
    let (rm, rp) = end_pieces(reference, r_ref, k_max as f64);
    let count = ((k_max as f64) / step).ceil() as usize;
    let sig: Vec<f64> = (0..=count).map(|i| (i as f64 * step).min(k_max as f64)).collect();
    let left = piece_distance(&um, &rm, &sig, &grid, cyl.ambient_dim());
    let neg: Vec<f64> = sig.iter().map(|s| -s).collect();
    let right = piece_distance(&up, &rp, &neg, &grid, cyl.ambient_dim());
    (1..=k_max)
        .map(|k| {
            sig.iter()
                .zip(left.iter().zip(&right))
                .filter(|(s, _)| **s <= k as f64 + 1e-12)
                .map(|(_, (a, b))| a.max(*b))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Circle averages and oscillations at `s = -(r - rho)` and `s = r - rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndLimits {
    /// Real coordinates of `x_-` and `x_+`.
    pub x_minus: Vec<f64>,
    pub x_plus: Vec<f64>,
    /// `sup_t |u - q|` on the two circles.
    pub osc_minus: f64,
    pub osc_plus: f64,
}

impl EndLimits {
    pub fn gap(&self) -> f64 {
        self.x_minus.iter().zip(&self.x_plus).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }
}

fn circle_summary(u: &SpectralField, s: f64, grid: &PhysicalGrid) -> (Vec<f64>, f64) {
    let cyl = u.cylinder();
    let n = cyl.ambient_dim();
    let mut coeffs = u.coeffs_at(s);
    let zero = cyl.mode_index(0).expect("zero mode in band");
    let q: Vec<Complex64> = coeffs[zero * n..(zero + 1) * n].to_vec();
    coeffs[zero * n..(zero + 1) * n].iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
    let osc = grid.synthesize(&coeffs).chunks(n).map(norm_c).fold(0.0, f64::max);
    let mut x = vec![0.0; 2 * n];
    crate::field::to_real(&q, &mut x);
    (x, osc)
}

pub fn estimate_endpoints(u: &SpectralField, r: f64, rho: f64) -> EndLimits {
    let cyl = u.cylinder();
    let grid = PhysicalGrid::new(cyl, 2 * cyl.t_modes());
    let (x_minus, osc_minus) = circle_summary(u, -(r - rho), &grid);
    let (x_plus, osc_plus) = circle_summary(u, r - rho, &grid);
    EndLimits { x_minus, x_plus, osc_minus, osc_plus }
}

/// `sup |u - q|` over the neck `[-(r - rho), r - rho] x R/Z`.
pub fn neck_oscillation(u: &SpectralField, r: f64, rho: f64) -> f64 {
    let cyl = u.cylinder();
    let osc = u.oscillating_part();
    let inner = osc.sup_abs(cyl.indices_between(-(r - rho), r - rho), 2 * cyl.t_modes());
    let grid = PhysicalGrid::new(cyl, 2 * cyl.t_modes());
    let n = cyl.ambient_dim();
    [-(r - rho), r - rho]
        .iter()
        .map(|&s| grid.synthesize(&osc.coeffs_at(s)).chunks(n).map(norm_c).fold(0.0, f64::max))
        .fold(inner, f64::max)
}
