//! The bump function `rho` (equal to 1 on `[-1/2, 1/2]`, supported in
//! `[-1, 1]`) and the convolved differential inequality
//! `rho'' * gamma - delta^2 rho * gamma >= 3/4 rho * ||d_s(u-q)||^2 + 1/4 rho * ||d_t(u-q)||^2`.
//!
//! Each ramp is `0.5 - 0.5 cos(2 pi y)`, `y in [0, 1/2]`, placed on
//! `1/2 + eta <= |x| <= 1 - eta` and mollified with radius `eta`. The ramp is
//! C^1 with a jump in its second derivative, so `||rho''||_{L^1}` stays at
//! `2 pi / (1/2 - 2 eta)` (about `4 pi`), well under `4 pi^2`.

use serde::{Deserialize, Serialize};

use super::gamma::GammaProfile;
use super::{two_sided_decay, DELTA};
use crate::calculus::{integrate_density, sobolev_density};
use crate::cylinder::Window;
use crate::field::SpectralField;
use crate::stencil;

/// Mollifier radius `eta`.
pub const BUMP_MOLLIFIER_RADIUS: f64 = 0.01;
const BUMP_SAMPLES: usize = 4001;
/// Upper bound used for `||rho''||_{L^1}` in the derived window constant.
const DD_L1_BOUND: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpFunction {
    /// Uniform grid on `[-1, 1]`.
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub rho_dd: Vec<f64>,
    pub eta: f64,
    pub l1: f64,
    pub dd_l1: f64,
}

impl BumpFunction {
    pub fn spacing(&self) -> f64 {
        2.0 / (self.x.len() - 1) as f64
    }

    fn sample(&self, v: &[f64], x: f64) -> f64 {
        if !(-1.0..=1.0).contains(&x) {
            return 0.0;
        }
        let y = (x + 1.0) / self.spacing();
        let j = (y.floor() as usize).min(v.len() - 2);
        let w = y - j as f64;
        v[j] * (1.0 - w) + v[j + 1] * w
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sample(&self.rho, x)
    }

    pub fn eval_dd(&self, x: f64) -> f64 {
        self.sample(&self.rho_dd, x)
    }

    /// `(f * g)(s) = int f(y) g(s - y) dy` for `f = rho` or `rho''`, with `g`
    /// given on the cylinder grid and interpolated to the bump grid.
    fn convolve(&self, kernel: &[f64], g: &[f64], s0: f64, h: f64, s: f64) -> f64 {
        let dx = self.spacing();
        let n = self.x.len();
        let mut acc = 0.0;
        for (i, (&y, &k)) in self.x.iter().zip(kernel).enumerate() {
            if k == 0.0 {
                continue;
            }
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * k * stencil::interpolate(g, (s - y - s0) / h);
        }
        acc * dx
    }
}

/// Unsmoothed profile and its first derivative, ramps on `[1/2 + eta, 1 - eta]`.
fn raw_bump(x: f64, eta: f64) -> (f64, f64) {
    use std::f64::consts::PI;
    let a = x.abs();
    let len = 0.5 - 2.0 * eta;
    if a <= 0.5 + eta {
        (1.0, 0.0)
    } else if a >= 1.0 - eta {
        (0.0, 0.0)
    } else {
        // y runs from 1/2 at the plateau edge to 0 at the outer edge.
        let y = 0.5 * (1.0 - eta - a) / len;
        let dy_dx = -0.5 / len * x.signum();
        (0.5 - 0.5 * (2.0 * PI * y).cos(), PI * (2.0 * PI * y).sin() * dy_dx)
    }
}

pub fn build_bump() -> BumpFunction {
    let eta = BUMP_MOLLIFIER_RADIUS;
    let n = BUMP_SAMPLES;
    let dx = 2.0 / (n - 1) as f64;
    let x: Vec<f64> = (0..n).map(|i| -1.0 + i as f64 * dx).collect();
    // Mollifier phi(y) = exp(-1 / (1 - (y/eta)^2)) on a finer sub-grid. The
    // raw ramp is only C^1, so rho'' = rho' * phi' keeps one derivative on phi.
    let sub = 8usize;
    let half = ((eta / dx) as usize) * sub;
    let step = eta / half as f64;
    let kernel: Vec<(f64, f64, f64)> = (1..2 * half)
        .map(|m| {
            let y = (m as f64 - half as f64) * step;
            let z = y / eta;
            let phi = (-1.0 / (1.0 - z * z)).exp();
            let dphi = phi * (-2.0 * z / (1.0 - z * z).powi(2)) / eta;
            (y, phi, dphi)
        })
        .collect();
    let total: f64 = kernel.iter().map(|(_, w, _)| w).sum();
    let mut rho = vec![0.0; n];
    let mut rho_dd = vec![0.0; n];
    for (i, &xi) in x.iter().enumerate() {
        let (mut v, mut d) = (0.0, 0.0);
        for &(y, phi, dphi) in &kernel {
            let (a, da) = raw_bump(xi - y, eta);
            v += phi * a;
            d += dphi * da;
        }
        rho[i] = (v / total).clamp(0.0, 1.0);
        rho_dd[i] = d / total;
    }
    let l1 = stencil::trapezoid(&rho, -1.0, dx, -1.0, 1.0);
    let abs_dd: Vec<f64> = rho_dd.iter().map(|v| v.abs()).collect();
    let dd_l1 = stencil::trapezoid(&abs_dd, -1.0, dx, -1.0, 1.0);
    BumpFunction { x, rho, rho_dd, eta, l1, dd_l1 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionCheck {
    pub centers: Vec<f64>,
    /// `(rho'' * gamma - delta^2 rho * gamma) - (3/4 rho * ||d_s||^2 + 1/4 rho * ||d_t||^2)`.
    pub margin: Vec<f64>,
    pub worst_margin: f64,
    pub inequality_holds: bool,
    /// `C = 6 (40 + 2 delta^2) c`.
    pub derived_constant: f64,
    /// Largest `W(s) / (C (e^{-delta(r+s)} + e^{-delta(r-s)}))` over the centers.
    pub worst_window_ratio: f64,
    pub pass: bool,
}

/// Evaluates the convolved inequality at centers in `[-r+1, r-1]` (at most
/// `max_centers`, evenly strided) and compares the measured `W^{1,2}` windows
/// with the derived bound `C = 6 (40 + 2 delta^2) fitted_c`.
pub fn convolution_window_check(
    u: &SpectralField,
    p: &GammaProfile,
    bump: &BumpFunction,
    fitted_c: f64,
    slack: f64,
    max_centers: usize,
) -> ConvolutionCheck {
    let cyl = p.cylinder;
    let r = cyl.half_length();
    let (s0, h) = (cyl.s_min(), cyl.h());
    let idx: Vec<usize> = cyl.indices_between(-r + 1.0, r - 1.0).collect();
    let stride = idx.len().div_ceil(max_centers.max(1)).max(1);
    let picked: Vec<usize> = idx.iter().copied().step_by(stride).collect();
    let interp_budget = interpolation_budget(p);
    let density = sobolev_density(&u.oscillating_part(), true);
    let derived = 6.0 * (DD_L1_BOUND + 2.0 * DELTA * DELTA) * fitted_c;
    let mut centers = Vec::with_capacity(picked.len());
    let mut margin = Vec::with_capacity(picked.len());
    let mut worst = f64::INFINITY;
    let mut holds = true;
    let mut worst_ratio = 0.0f64;
    for j in picked {
        let s = cyl.s(j);
        let lhs = bump.convolve(&bump.rho_dd, &p.gamma, s0, h, s) - DELTA * DELTA * bump.convolve(&bump.rho, &p.gamma, s0, h, s);
        let rhs = bump.convolve(&bump.rho, &p.rhs, s0, h, s);
        let m = lhs - rhs;
        let lo = cyl.indices_between(s - 1.0, s + 1.0);
        let local_budget = lo.clone().map(|i| interp_budget[i] + p.stencil_budget[i]).fold(0.0, f64::max);
        let tol = slack * bump.l1 + local_budget * (bump.dd_l1 + (DELTA * DELTA + 1.0) * bump.l1);
        holds &= m >= -tol;
        worst = worst.min(m);
        let w = integrate_density(&cyl, &density, Window::new(s, 0.5));
        let bound = derived * two_sided_decay(DELTA, r, s);
        if w > 0.0 {
            worst_ratio = worst_ratio.max(if bound > 0.0 { w / bound } else { f64::INFINITY });
        }
        centers.push(s);
        margin.push(m);
    }
    if centers.is_empty() {
        worst = 0.0;
    }
    ConvolutionCheck {
        centers,
        margin,
        worst_margin: worst,
        inequality_holds: holds,
        derived_constant: derived,
        worst_window_ratio: worst_ratio,
        pass: holds && worst_ratio <= 1.0,
    }
}

/// Cubic-interpolation error bound for `gamma` and the energies:
/// `h^4 / 40 sum_k |u_k|^2 (4 pi k)^4` with a safety factor 4.
fn interpolation_budget(p: &GammaProfile) -> Vec<f64> {
    let cyl = p.cylinder;
    let kmax = cyl.k_max().max(-cyl.k_min()) as f64;
    let w4 = (2.0 * std::f64::consts::TAU * kmax).powi(4);
    let h4 = cyl.h().powi(4);
    p.gamma
        .iter()
        .zip(&p.ds_energy)
        .zip(&p.dt_energy)
        .map(|((g, a), b)| 4.0 * h4 / 40.0 * w4 * (2.0 * g + a + b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::Cylinder;
    use crate::estimates::gamma::{exp_bound_check, gamma_profile};
    use num_complex::Complex64;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn bump_shape_and_norms() {
        let b = build_bump();
        assert_eq!(b.eval(0.0), 1.0);
        assert!(b.x.iter().zip(&b.rho).all(|(x, r)| (0.0..=1.0).contains(r) && (x.abs() > 0.5 || *r == 1.0)));
        assert_eq!(b.eval(-1.0), 0.0);
        assert_eq!(b.eval(1.0), 0.0);
        assert!(b.l1 <= 2.0 && b.l1 > 1.0);
        // Symmetric ramps: the L^1 norm is 1/2 + 1/2 + 2 int ramp = 1.5 exactly.
        assert!((b.l1 - 1.5).abs() < 1e-6, "{}", b.l1);
        let ramp_bound = 2.0 * PI / (0.5 - 2.0 * BUMP_MOLLIFIER_RADIUS);
        assert!(b.dd_l1 <= ramp_bound + 1e-3 && b.dd_l1 > 0.95 * ramp_bound, "{}", b.dd_l1);
        assert!(b.dd_l1 <= 40.0);
        // rho'' integrates to zero.
        let total = stencil::trapezoid(&b.rho_dd, -1.0, b.spacing(), -1.0, 1.0);
        assert!(total.abs() < 1e-8);
    }

    #[test]
    fn zero_gamma_is_trivial() {
        let cyl = Cylinder::new(3.0, 301, 8, 1).unwrap();
        let u = SpectralField::zeros(cyl);
        let p = gamma_profile(&u);
        let c = convolution_window_check(&u, &p, &build_bump(), 0.0, 0.0, 100);
        assert!(c.pass && c.worst_margin == 0.0);
    }

    #[test]
    fn single_mode_convolution() {
        let cyl = Cylinder::new(4.0, 1601, 8, 1).unwrap();
        let a = 0.1;
        let u = SpectralField::from_modes(cyl, |s, k, _| {
            if k == 1 {
                Complex64::new(a, 0.0) * (TAU * (s - 5.0)).exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let p = gamma_profile(&u);
        let bump = build_bump();
        let fit = exp_bound_check(&p, 4.0, 4.0);
        let c = convolution_window_check(&u, &p, &bump, fit.fitted_c, 0.0, 50);
        assert!(c.pass, "{c:?}");
        // gamma = g0 e^{4 pi s}: rho * gamma = g0 e^{4 pi s} int rho(y) e^{-4 pi y} dy,
        // so the margin is (16 pi^2 - pi^2 - 8 pi^2) (rho * gamma).
        let s = c.centers[c.centers.len() / 2];
        let g0 = 0.5 * a * a * (-20.0 * PI).exp();
        let dx = bump.spacing();
        let transform: f64 = bump.x.iter().zip(&bump.rho).map(|(y, r)| r * (-4.0 * PI * y).exp()).sum::<f64>() * dx;
        let expect = 7.0 * PI * PI * g0 * (4.0 * PI * s).exp() * transform;
        let got = c.margin[c.centers.len() / 2];
        assert!((got - expect).abs() < 1e-3 * expect, "{got} vs {expect}");
    }
}
