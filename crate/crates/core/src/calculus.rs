//! Spectral calculus on the cylinder: the `delbar` operator, sup norms of
//! derivatives, windowed Sobolev norms and the Poincare inequality on loops.

use num_complex::Complex64;

use crate::cylinder::{Cylinder, Window};
use crate::error::{CylError, Result};
use crate::field::{norm_c, FourierLoop, PhysicalGrid, SpectralField};
use crate::stencil;

/// Poincare constant of `R/Z`: `||f||^2 <= C_PC ||f'||^2` for mean-zero `f`.
pub const C_PC: f64 = 1.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI);

/// Highest derivative order accepted by [`sup_derivative_norm`].
pub const MAX_DERIVATIVE_ORDER: usize = 4;

/// `(d_s + J_0 d_t) u`. Per mode this is `u_k'(s) - 2 pi k u_k(s)`, exact in t
/// and fourth order in s.
pub fn apply_delbar(u: &SpectralField) -> Result<SpectralField> {
    let cyl = u.cylinder();
    if cyl.s_samples() < 5 {
        return Err(CylError::InvalidGrid(format!("apply_delbar needs 5 s-samples, got {}", cyl.s_samples())));
    }
    let ds = u.ds();
    let mut out = ds;
    for j in 0..cyl.s_samples() {
        for k in cyl.modes() {
            let factor = -std::f64::consts::TAU * k as f64;
            for c in 0..cyl.ambient_dim() {
                let v = u.coeff(j, k, c) * factor;
                *out.coeff_mut(j, k, c) += v;
            }
        }
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn partial_derivatives(u: &SpectralField, k: usize) -> Vec<(f64, SpectralField)> {
    (0..=k).map(|a| (binomial(k, a), u.ds_pow(a).dt_pow(k - a))).collect()
}

fn frobenius_on_circle(grid: &PhysicalGrid, n: usize, slices: &[(f64, &[Complex64])]) -> Vec<f64> {
    let mut acc = vec![0.0; grid.points()];
    for (w, coeffs) in slices {
        let phys = grid.synthesize(coeffs);
        for (p, pt) in phys.chunks(n).enumerate() {
            acc[p] += w * norm_c(pt).powi(2);
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

/// Pointwise Frobenius norm `|nabla^k u|(s_j, t)` on an `m`-point t-grid, for
/// each sample index in `range`. Mixed partials `d_s^a d_t^{k-a}` enter with
/// multiplicity `binom(k, a)`.
pub fn derivative_norms(
    u: &SpectralField,
    k: usize,
    range: std::ops::Range<usize>,
    m: usize,
) -> Result<Vec<Vec<f64>>> {
    if k > MAX_DERIVATIVE_ORDER {
        return Err(CylError::UnsupportedOrder(k));
    }
    let cyl = u.cylinder();
    let grid = PhysicalGrid::new(cyl, m);
    let partials = partial_derivatives(u, k);
    let n = cyl.ambient_dim();
    Ok(range
        .map(|j| {
            let slices: Vec<(f64, &[Complex64])> = partials.iter().map(|(w, d)| (*w, d.slice(j))).collect();
            frobenius_on_circle(&grid, n, &slices)
        })
        .collect())
}

/// `sup |nabla^k u|` over `region x R/Z`, measured on a `2T`-point t-grid at the
/// samples inside the region and at its two (interpolated) edge circles.
/// The region must lie in the interior `[-r, r]`.
pub fn sup_derivative_norm(u: &SpectralField, k: usize, region: Window) -> Result<f64> {
    if k > MAX_DERIVATIVE_ORDER {
        return Err(CylError::UnsupportedOrder(k));
    }
    let cyl = u.cylinder();
    region.check_in_interior(cyl)?;
    let m = 2 * cyl.t_modes();
    let range = cyl.indices_between(region.lo(), region.hi());
    let mut sup = derivative_norms(u, k, range, m)?.iter().flatten().copied().fold(0.0, f64::max);
    let grid = PhysicalGrid::new(cyl, m);
    let partials = partial_derivatives(u, k);
    for s in [region.lo(), region.hi()] {
        let edge: Vec<(f64, Vec<Complex64>)> = partials.iter().map(|(w, d)| (*w, d.coeffs_at(s))).collect();
        let slices: Vec<(f64, &[Complex64])> = edge.iter().map(|(w, c)| (*w, c.as_slice())).collect();
        sup = frobenius_on_circle(&grid, cyl.ambient_dim(), &slices).into_iter().fold(sup, f64::max);
    }
    Ok(sup)
}

/// Per-sample integrand `||u||^2 (+ ||d_s u||^2 + ||d_t u||^2)` with
/// `||f||^2 = int_{R/Z} |f|^2 dt` evaluated by Parseval.
pub fn sobolev_density(u: &SpectralField, include_derivs: bool) -> Vec<f64> {
    let mut g = u.circle_energy();
    if include_derivs {
        let es = u.ds().circle_energy();
        let et = u.dt().circle_energy();
        for (j, v) in g.iter_mut().enumerate() {
            *v += es[j] + et[j];
        }
    }
    g
}

/// `int_w ||u||^2 (+ ||d_s u||^2 + ||d_t u||^2) ds`; t-integrals by Parseval,
/// the s-integral by the trapezoid rule.
pub fn window_sobolev_sq(u: &SpectralField, w: Window, include_derivs: bool) -> Result<f64> {
    let cyl = u.cylinder();
    w.check_in_domain(cyl)?;
    let g = sobolev_density(u, include_derivs);
    Ok(integrate_density(cyl, &g, w))
}

/// Trapezoid integral of a per-sample density over a window.
pub fn integrate_density(cyl: &Cylinder, g: &[f64], w: Window) -> f64 {
    stencil::trapezoid(g, cyl.s_min(), cyl.h(), w.lo(), w.hi())
}

/// Both sides of the Poincare inequality for a mean-zero loop:
/// `(||f||^2, C_PC ||d_t f||^2)`.
pub fn poincare_check(f: &FourierLoop) -> Result<(f64, f64)> {
    let total: f64 = f.coeffs.iter().map(|z| z.norm_sqr()).sum();
    let mean: f64 = f.mode(0).iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if mean > 1e-14 * total.sqrt().max(1.0) {
        return Err(CylError::Precondition(format!("loop has nonzero mean (|f_0| = {mean:e})")));
    }
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for k in f.modes() {
        let e: f64 = f.mode(k).iter().map(Complex64::norm_sqr).sum();
        let w = std::f64::consts::TAU * k as f64;
        lhs += e;
        rhs += w * w * e;
    }
    Ok((lhs, C_PC * rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mode_field(cyl: Cylinder, k0: i64, a: Complex64, rate: f64) -> SpectralField {
        SpectralField::from_modes(cyl, |s, k, comp| {
            if k == k0 && comp == 0 {
                a * (rate * s).exp()
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn delbar_kills_holomorphic_mode() {
        let cyl = Cylinder::new(2.0, 1201, 8, 1).unwrap();
        let u = mode_field(cyl, 1, c(0.3, -0.2), TAU);
        let d = apply_delbar(&u).unwrap();
        // relative to |u'| = 2 pi |u|; fourth-order error ~ (2 pi h)^4 / 5 at the ends
        let scale = TAU * u.max_coeff();
        assert!(d.max_coeff() / scale < 1e-6, "{}", d.max_coeff() / scale);
    }

    #[test]
    fn delbar_of_linear_zero_mode_is_constant() {
        let cyl = Cylinder::new(1.0, 41, 4, 2).unwrap();
        let u = SpectralField::from_modes(cyl, |s, k, comp| if k == 0 && comp == 0 { c(s, 0.0) } else { c(0.0, 0.0) });
        let d = apply_delbar(&u).unwrap();
        for j in 0..41 {
            assert!((d.coeff(j, 0, 0) - c(1.0, 0.0)).norm() < 1e-12);
            assert!(d.coeff(j, 0, 1).norm() < 1e-12);
        }
    }

    #[test]
    fn delbar_of_antiholomorphic_mode() {
        // u = e^{2 pi (s - i t)}: mode k = -1 with profile e^{2 pi s}; delbar u = 4 pi u
        let cyl = Cylinder::new(1.0, 2001, 4, 1).unwrap();
        let u = mode_field(cyl, -1, c(1.0, 0.0), TAU);
        let d = apply_delbar(&u).unwrap();
        for j in (0..2001).step_by(50) {
            let expected = 4.0 * PI * (TAU * cyl.s(j)).exp();
            assert!(((d.coeff(j, -1, 0).re - expected) / expected).abs() < 1e-8);
        }
    }

    #[test]
    fn sup_derivative_norms() {
        let cyl = Cylinder::new(2.0, 1601, 8, 2).unwrap();
        let cst = SpectralField::from_modes(cyl, |_, k, comp| if k == 0 { c(0.3 * comp as f64 + 0.1, 0.2) } else { c(0.0, 0.0) });
        let expect = (0.1f64.powi(2) + 0.04 + 0.4f64.powi(2) + 0.04).sqrt();
        let w = Window::new(0.0, 1.0);
        assert!((sup_derivative_norm(&cst, 0, w).unwrap() - expect).abs() < 1e-14);
        assert!(sup_derivative_norm(&cst, 1, w).unwrap() < 1e-12);

        let u = mode_field(cyl, 1, c(1.0, 0.0), TAU);
        let got = sup_derivative_norm(&u, 1, w).unwrap();
        let exact = TAU * 2f64.sqrt() * TAU.exp();
        assert!(((got - exact) / exact).abs() < 1e-7, "{got} vs {exact}");
    }

    #[test]
    fn sup_derivative_rejects_collar_and_high_orders() {
        let cyl = Cylinder::new(2.0, 81, 4, 1).unwrap();
        let u = SpectralField::zeros(cyl);
        assert!(matches!(sup_derivative_norm(&u, 1, Window::new(1.5, 1.0)), Err(CylError::OutOfWindow { .. })));
        assert!(matches!(sup_derivative_norm(&u, 5, Window::new(0.0, 1.0)), Err(CylError::UnsupportedOrder(5))));
    }

    #[test]
    fn window_norms_closed_forms() {
        let cyl = Cylinder::new(2.0, 4001, 4, 1).unwrap();
        let zero = SpectralField::zeros(cyl);
        assert_eq!(window_sobolev_sq(&zero, Window::new(0.3, 0.5), true).unwrap(), 0.0);

        let a = c(0.6, -0.8);
        let flat = mode_field(cyl, 1, a, 0.0);
        let got = window_sobolev_sq(&flat, Window::new(0.37, 0.5), true).unwrap();
        let exact = (1.0 + 4.0 * PI * PI) * a.norm_sqr();
        assert!(((got - exact) / exact).abs() < 1e-12);

        let grow = mode_field(cyl, 1, a, TAU);
        let got = window_sobolev_sq(&grow, Window::new(0.0, 0.5), false).unwrap();
        let exact = a.norm_sqr() * (TAU.exp() - (-TAU).exp()) / (4.0 * PI);
        // trapezoid error h^2 (4 pi)^2 / 12
        assert!(((got - exact) / exact).abs() < 5e-5, "{got} vs {exact}");
    }

    #[test]
    fn window_norm_additive() {
        let cyl = Cylinder::new(2.0, 301, 8, 2).unwrap();
        let u = SpectralField::random_smooth(cyl, 9, 3, 3, 1.0);
        let whole = window_sobolev_sq(&u, Window::span(-1.23, 1.71), true).unwrap();
        let left = window_sobolev_sq(&u, Window::span(-1.23, 0.4), true).unwrap();
        let right = window_sobolev_sq(&u, Window::span(0.4, 1.71), true).unwrap();
        assert!((whole - left - right).abs() < 1e-12 * whole);
    }

    #[test]
    fn poincare_examples() {
        let f = FourierLoop::from_modes(8, &[(1, c(1.0, 0.0))]).unwrap();
        let (l, r) = poincare_check(&f).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (r - 1.0).abs() < 1e-14);
        let f = FourierLoop::from_modes(8, &[(2, c(1.0, 0.0))]).unwrap();
        let (l, r) = poincare_check(&f).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (r - 4.0).abs() < 1e-13);
        let (l, r) = poincare_check(&FourierLoop::zeros(8, 2)).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        let f = FourierLoop::from_modes(8, &[(0, c(0.1, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        assert!(matches!(poincare_check(&f), Err(CylError::Precondition(_))));
    }
}
