//! Exponential decay of `u - q`: windowed `W^{1,2}` norms against
//! `C (e^{-delta(r+s)} + e^{-delta(r-s)})` and pointwise `|nabla^k (u - q)|`
//! against `M_k (e^{-c(r+s)} + e^{-c(r-s)})`, for centers in `[-r+1, r-1]`.

use serde::{Deserialize, Serialize};

use super::{two_sided_decay, DECAY_C, DELTA};
use crate::calculus::{derivative_norms, integrate_density, sobolev_density};
use crate::cylinder::Window;
use crate::error::{CylError, Result};
use crate::field::SpectralField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCheck {
    /// Smallest constant making the bound hold at every sampled center.
    pub fitted: f64,
    /// Largest of the two ratios at the extreme centers `s = -r+1` and `s = r-1`.
    pub boundary_scale: f64,
    pub kappa: f64,
    pub pass: bool,
    pub centers: Vec<f64>,
    /// Measured quantity per center.
    pub measured: Vec<f64>,
}

impl DecayCheck {
    pub fn ratio(&self) -> f64 {
        if self.fitted == 0.0 {
            0.0
        } else {
            self.fitted / self.boundary_scale
        }
    }

    fn fit(centers: Vec<f64>, measured: Vec<f64>, rate: f64, r: f64, kappa: f64) -> Self {
        let ratios: Vec<f64> = centers.iter().zip(&measured).map(|(s, m)| m / two_sided_decay(rate, r, *s)).collect();
        let fitted = ratios.iter().copied().fold(0.0, f64::max);
        let boundary_scale = match (ratios.first(), ratios.last()) {
            (Some(a), Some(b)) => a.max(*b),
            _ => 0.0,
        };
        DecayCheck { fitted, boundary_scale, kappa, pass: fitted <= kappa * boundary_scale, centers, measured }
    }
}

/// Centers: `s = -r+1`, the samples strictly inside, and `s = r-1`.
fn centers(u: &SpectralField, r: f64) -> Result<Vec<f64>> {
    let cyl = u.cylinder();
    if r > cyl.half_length() + 1e-12 || r < 1.0 {
        return Err(CylError::Precondition(format!(
            "decay checks need 1 <= r <= {} (got {r})",
            cyl.half_length()
        )));
    }
    let mut out = vec![-r + 1.0];
    let inner = cyl.indices_between(-r + 1.0, r - 1.0);
    out.extend(inner.map(|j| cyl.s(j)).filter(|s| *s > -r + 1.0 && *s < r - 1.0));
    if r > 1.0 {
        out.push(r - 1.0);
    }
    Ok(out)
}

/// `int_{s-1/2}^{s+1/2} ||u-q||^2 + ||d_s(u-q)||^2 + ||d_t(u-q)||^2` against the
/// `delta`-rate bound.
pub fn window_decay_check(u: &SpectralField, r: f64, kappa: f64) -> Result<DecayCheck> {
    let cyl = *u.cylinder();
    let cs = centers(u, r)?;
    let density = sobolev_density(&u.oscillating_part(), true);
    let measured = cs.iter().map(|&s| integrate_density(&cyl, &density, Window::new(s, 0.5))).collect();
    Ok(DecayCheck::fit(cs, measured, DELTA, r, kappa))
}

/// `sup_t |nabla^k (u - q)|(s)` against the `c = delta/2`-rate bound; the
/// fitted constant is `M_k`. Only sample centers are used; the extreme centers
/// are the first and last samples inside `[-r+1, r-1]`.
pub fn pointwise_decay_check(u: &SpectralField, r: f64, k: usize, kappa: f64) -> Result<DecayCheck> {
    let cyl = *u.cylinder();
    centers(u, r)?;
    let range = cyl.indices_between(-r + 1.0, r - 1.0);
    let norms = derivative_norms(&u.oscillating_part(), k, range.clone(), 2 * cyl.t_modes())?;
    let cs = range.map(|j| cyl.s(j)).collect();
    let measured = norms.iter().map(|row| row.iter().copied().fold(0.0, f64::max)).collect();
    Ok(DecayCheck::fit(cs, measured, DECAY_C, r, kappa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::Cylinder;
    use num_complex::Complex64;
    use std::f64::consts::{PI, TAU};

    fn single_mode(cyl: Cylinder, a: f64) -> SpectralField {
        SpectralField::from_modes(cyl, |s, k, c| {
            if k == 1 && c == 0 {
                Complex64::new(a, 0.0) * (TAU * (s - cyl.half_length() - 1.0)).exp()
            } else if k == 0 {
                Complex64::new(0.2, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn constant_part_is_ignored() {
        let cyl = Cylinder::new(3.0, 301, 8, 1).unwrap();
        let u = SpectralField::from_modes(cyl, |_, k, _| if k == 0 { Complex64::new(0.5, 0.0) } else { Complex64::new(0.0, 0.0) });
        let w = window_decay_check(&u, 3.0, 4.0).unwrap();
        assert!(w.pass && w.fitted == 0.0);
        for k in 0..2 {
            let p = pointwise_decay_check(&u, 3.0, k, 4.0).unwrap();
            assert!(p.pass && p.fitted == 0.0);
        }
    }

    #[test]
    fn single_mode_closed_forms() {
        let cyl = Cylinder::new(4.0, 1601, 8, 1).unwrap();
        let a = 0.1;
        let u = single_mode(cyl, a);
        let w = window_decay_check(&u, 4.0, 4.0).unwrap();
        assert!(w.pass, "{} vs {}", w.fitted, w.boundary_scale);
        // Window of |a|^2 e^{4 pi (s - 5)} (1 + 8 pi^2) over [s - 1/2, s + 1/2].
        let s = 0.0;
        let idx = w.centers.iter().position(|c| (c - s).abs() < 1e-12).unwrap();
        let exact = a * a * (1.0 + 8.0 * PI * PI) * (4.0 * PI * (s - 5.0)).exp() * ((2.0 * PI).exp() - (-2.0 * PI).exp()) / (4.0 * PI);
        // Trapezoid rule: relative error about (4 pi h)^2 / 12.
        assert!((w.measured[idx] - exact).abs() < 1e-3 * exact);

        let p0 = pointwise_decay_check(&u, 4.0, 0, 4.0).unwrap();
        for (s, m) in p0.centers.iter().zip(&p0.measured) {
            let exact = a * (TAU * (s - 5.0)).exp();
            assert!((m - exact).abs() < 1e-12 * exact.max(1e-300) + 1e-300);
        }
        assert!(p0.pass);
        let p1 = pointwise_decay_check(&u, 4.0, 1, 4.0).unwrap();
        assert!(p1.pass && p1.fitted > 0.0);
    }

    #[test]
    fn radius_is_validated() {
        let cyl = Cylinder::new(2.0, 201, 4, 1).unwrap();
        let u = SpectralField::zeros(cyl);
        assert!(window_decay_check(&u, 3.0, 4.0).is_err());
        assert!(pointwise_decay_check(&u, 0.5, 0, 4.0).is_err());
    }
}
