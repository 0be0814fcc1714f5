//! `gamma(s) = 1/2 int |u - q|^2 dt`, its differential inequality
//! `gamma'' - delta^2 gamma >= 3/4 ||d_s(u - q)||^2 + 1/4 ||d_t(u - q)||^2`
//! and the exponential bound it implies.

use serde::{Deserialize, Serialize};

use super::{two_sided_decay, DELTA, RELATIVE_SLACK};
use crate::calculus::{sup_derivative_norm, C_PC};
use crate::cylinder::{Cylinder, Window};
use crate::error::{CylError, Result};
use crate::field::SpectralField;
use crate::stencil;
use crate::vfield::VectorFieldModel;

const TWO_PI: f64 = std::f64::consts::TAU;
/// Safety factor on the stencil error budget.
const BUDGET_SAFETY: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaProfile {
    pub cylinder: Cylinder,
    pub s: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Five-point (fourth-order) second difference of `gamma`.
    pub gamma_dd: Vec<f64>,
    /// `3/4 ||d_s(u - q)||^2 + 1/4 ||d_t(u - q)||^2`.
    pub rhs: Vec<f64>,
    /// `||d_s(u - q)||^2` and `||d_t(u - q)||^2` separately.
    pub ds_energy: Vec<f64>,
    pub dt_energy: Vec<f64>,
    /// Per-sample bound on the stencil error in `gamma'' - rhs`, from the mode
    /// content: `h^4 sum_k |u_k|^2 ((4 pi k)^6 / 180 + (2 pi k)^6 / 20)` times a safety factor.
    pub stencil_budget: Vec<f64>,
}

impl GammaProfile {
    pub fn max_gamma(&self) -> f64 {
        self.gamma.iter().copied().fold(0.0, f64::max)
    }

    /// `gamma` at an arbitrary `s` by cubic interpolation.
    pub fn gamma_at(&self, s: f64) -> f64 {
        let cyl = &self.cylinder;
        stencil::interpolate(&self.gamma, (s - cyl.s_min()) / cyl.h())
    }

    /// `gamma'' - delta^2 gamma - rhs` per sample.
    pub fn margin(&self) -> Vec<f64> {
        (0..self.gamma.len()).map(|j| self.gamma_dd[j] - DELTA * DELTA * self.gamma[j] - self.rhs[j]).collect()
    }
}

pub fn gamma_profile(u: &SpectralField) -> GammaProfile {
    let cyl = *u.cylinder();
    let h = cyl.h();
    let n = cyl.ambient_dim();
    let s_n = cyl.s_samples();
    let mut gamma = vec![0.0; s_n];
    let mut ds_energy = vec![0.0; s_n];
    let mut dt_energy = vec![0.0; s_n];
    let mut budget = vec![0.0; s_n];
    for k in cyl.modes().filter(|k| *k != 0) {
        let w = TWO_PI * k as f64;
        let weight = h.powi(4) * ((2.0 * w).powi(6) / 180.0 + w.powi(6) / 20.0) * BUDGET_SAFETY;
        for c in 0..n {
            let p = u.profile(k, c);
            let dp = stencil::first_derivative(&p, h);
            for j in 0..s_n {
                let e = p[j].norm_sqr();
                gamma[j] += 0.5 * e;
                ds_energy[j] += dp[j].norm_sqr();
                dt_energy[j] += w * w * e;
                budget[j] += weight * e;
            }
        }
    }
    let gamma_dd = stencil::second_derivative(&gamma, h);
    let rhs = ds_energy.iter().zip(&dt_energy).map(|(a, b)| 0.75 * a + 0.25 * b).collect();
    GammaProfile { cylinder: cyl, s: cyl.s_grid(), gamma, gamma_dd, rhs, ds_energy, dt_energy, stencil_budget: budget }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffInequalityCheck {
    /// `min (gamma'' - delta^2 gamma - rhs)` over `[-r, r]`.
    pub worst_margin: f64,
    pub worst_s: f64,
    /// `min (margin + stencil budget)` over `[-r, r]`; compared against `-slack`.
    pub worst_budgeted_margin: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Pass iff `margin(s) + budget(s) >= -slack` at every sample of `[-r, r]`.
pub fn check_diff_inequality(p: &GammaProfile, slack: f64) -> DiffInequalityCheck {
    let margin = p.margin();
    let mut worst = (f64::INFINITY, 0.0);
    let mut worst_budgeted = f64::INFINITY;
    for j in p.cylinder.interior() {
        if margin[j] < worst.0 {
            worst = (margin[j], p.s[j]);
        }
        worst_budgeted = worst_budgeted.min(margin[j] + p.stencil_budget[j]);
    }
    DiffInequalityCheck {
        worst_margin: worst.0,
        worst_s: worst.1,
        worst_budgeted_margin: worst_budgeted,
        slack,
        pass: worst_budgeted >= -slack,
    }
}

/// Default slack `1e-6 max gamma`.
pub fn default_slack(p: &GammaProfile) -> f64 {
    RELATIVE_SLACK * p.max_gamma()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Precondition {
    /// `C2_est = 2 max(8 sup|D^2 V| G, 2 C1)`, `G = sup |nabla u|` on `[-r, r]`.
    pub c2_estimate: f64,
    pub gradient_sup: f64,
    /// `eps C2_est`.
    pub value: f64,
    /// `min(0.25 / c_pc, 0.25)`.
    pub limit: f64,
}

/// The largeness condition `eps C2_est <= min(0.25 / c_pc, 0.25)` under which
/// the inequality is claimed; `Inapplicable` otherwise.
pub fn diff_inequality_precondition(u: &SpectralField, model: &VectorFieldModel, eps: f64) -> Result<Precondition> {
    let cyl = u.cylinder();
    let r = cyl.half_length();
    let g = sup_derivative_norm(u, 1, Window::span(-r, r))?;
    let b = model.bounds();
    let c2 = 2.0 * (8.0 * b.sup_d2v * g).max(2.0 * model.reported_c1_bound());
    let limit = (0.25 / C_PC).min(0.25);
    let pre = Precondition { c2_estimate: c2, gradient_sup: g, value: eps * c2, limit };
    if pre.value > limit {
        return Err(CylError::Inapplicable(format!(
            "eps C2 = {:.3e} exceeds {limit}: the differential inequality is not claimed",
            pre.value
        )));
    }
    Ok(pre)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpBoundCheck {
    /// Smallest `c` with `gamma(s) <= c (e^{-delta(r+s)} + e^{-delta(r-s)})` on `[-r, r]`.
    pub fitted_c: f64,
    /// `c_0 = max(gamma(-r), gamma(r))`.
    pub boundary_scale: f64,
    pub kappa: f64,
    pub pass: bool,
}

impl ExpBoundCheck {
    pub fn ratio(&self) -> f64 {
        if self.fitted_c == 0.0 {
            0.0
        } else {
            self.fitted_c / self.boundary_scale
        }
    }
}

pub fn exp_bound_check(p: &GammaProfile, r: f64, kappa: f64) -> ExpBoundCheck {
    let mut fitted = 0.0f64;
    for j in p.cylinder.indices_between(-r, r) {
        fitted = fitted.max(p.gamma[j] / two_sided_decay(DELTA, r, p.s[j]));
    }
    let (gl, gr) = (p.gamma_at(-r), p.gamma_at(r));
    for (s, g) in [(-r, gl), (r, gr)] {
        fitted = fitted.max(g / two_sided_decay(DELTA, r, s));
    }
    let c0 = gl.max(gr);
    ExpBoundCheck { fitted_c: fitted, boundary_scale: c0, kappa, pass: fitted <= kappa * c0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PhysicalGrid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn single_mode(cyl: Cylinder, a: f64) -> SpectralField {
        SpectralField::from_modes(cyl, |s, k, c| {
            if k == 1 && c == 0 {
                Complex64::new(a, 0.0) * (TWO_PI * s).exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn gamma_examples() {
        let cyl = Cylinder::new(1.0, 2001, 8, 1).unwrap();
        let a = 0.1;
        let p = gamma_profile(&single_mode(cyl, a));
        for j in cyl.interior() {
            let g = 0.5 * a * a * (4.0 * PI * p.s[j]).exp();
            assert!((p.gamma[j] - g).abs() <= 1e-14 * g);
            assert!((p.gamma_dd[j] - 16.0 * PI * PI * g).abs() <= 1e-8 * 16.0 * PI * PI * g, "{}", (p.gamma_dd[j] / (16.0 * PI * PI * g) - 1.0));
            assert!((p.ds_energy[j] - 8.0 * PI * PI * g).abs() <= 1e-8 * 8.0 * PI * PI * g);
            assert!((p.dt_energy[j] - 8.0 * PI * PI * g).abs() <= 1e-12 * 8.0 * PI * PI * g);
        }
        let check = check_diff_inequality(&p, default_slack(&p));
        assert!(check.pass && check.worst_margin > 0.0);

        let flat = SpectralField::from_modes(cyl, |_, k, _| if k == 1 { Complex64::new(0.3, 0.4) } else { Complex64::new(0.0, 0.0) });
        let p = gamma_profile(&flat);
        assert!(p.gamma.iter().all(|g| (g - 0.125).abs() < 1e-15));
        assert!(p.gamma_dd.iter().all(|g| g.abs() < 1e-9));

        let cst = SpectralField::from_modes(cyl, |_, k, _| if k == 0 { Complex64::new(0.3, 0.4) } else { Complex64::new(0.0, 0.0) });
        let p = gamma_profile(&cst);
        assert!(p.gamma.iter().all(|g| *g == 0.0));
        let check = check_diff_inequality(&p, 0.0);
        assert!(check.pass && check.worst_margin == 0.0);
        let exp = exp_bound_check(&p, 1.0, 4.0);
        assert!(exp.pass && exp.fitted_c == 0.0);
    }

    #[test]
    fn parseval_matches_physical_quadrature() {
        let cyl = Cylinder::new(1.0, 51, 16, 2).unwrap();
        let u = SpectralField::random_smooth(cyl, 4, 7, 3, 0.4);
        let p = gamma_profile(&u);
        let grid = PhysicalGrid::new(&cyl, 32);
        for j in 0..cyl.s_samples() {
            let osc: Vec<Complex64> = u.oscillating_part().slice(j).to_vec();
            let phys = grid.synthesize(&osc);
            let quad = 0.5 * phys.iter().map(|z| z.norm_sqr()).sum::<f64>() / 32.0;
            assert!((quad - p.gamma[j]).abs() <= 1e-12 * p.gamma[j].max(1e-300));
        }
    }

    #[test]
    fn single_mode_exponential_bound() {
        let cyl = Cylinder::new(3.0, 1201, 8, 1).unwrap();
        let p = gamma_profile(&single_mode(cyl, 1e-3));
        let exp = exp_bound_check(&p, 3.0, 4.0);
        let g_r = 0.5 * 1e-6 * (12.0 * PI).exp();
        assert!((exp.boundary_scale - g_r).abs() < 1e-6 * g_r);
        assert!(exp.fitted_c <= g_r * (1.0 + 1e-6) && exp.pass);
    }

    #[test]
    fn precondition_rejects_large_eps() {
        let cyl = Cylinder::new(2.0, 201, 8, 1).unwrap();
        let u = single_mode(cyl, 1e-3);
        let model = VectorFieldModel::scalar(0.5, 2);
        let ok = diff_inequality_precondition(&u, &model, 0.01).unwrap();
        assert!((ok.c2_estimate - 2.0).abs() < 1e-12);
        assert!(matches!(diff_inequality_precondition(&u, &model, 0.2), Err(CylError::Inapplicable(_))));
    }
}
