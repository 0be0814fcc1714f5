//! Empirical lower bound for the elliptic constant in
//! `||u||_{W^{k+1,2}(s + Omega(delta))} <= C (||delbar u||_{W^{k,2}(s + Omega(2 delta))} + ||u||_{W^{k,2}(s + Omega(2 delta))})`,
//! with `Omega(delta) = [-delta, delta] x R/Z`.

use rayon::prelude::*;

use crate::calculus::{apply_delbar, integrate_density};
use crate::cylinder::Window;
use crate::error::{CylError, Result};
use crate::field::SpectralField;

/// Window centers probed per field.
const CENTERS_PER_FIELD: usize = 32;

/// Per-sample density of `sum_{a + b <= k} ||d_s^a d_t^b u||^2`.
fn sobolev_density_k(u: &SpectralField, k: usize) -> Vec<f64> {
    let mut acc = vec![0.0; u.cylinder().s_samples()];
    let mut ds = u.clone();
    for a in 0..=k {
        if a > 0 {
            ds = ds.ds();
        }
        for b in 0..=(k - a) {
            let e = ds.dt_pow(b).circle_energy();
            acc.iter_mut().zip(&e).for_each(|(x, y)| *x += y);
        }
    }
    acc
}

/// `||u||^2_{W^{k,2}(w)}`.
pub fn sobolev_norm_sq(u: &SpectralField, k: usize, w: Window) -> Result<f64> {
    w.check_in_domain(u.cylinder())?;
    Ok(integrate_density(u.cylinder(), &sobolev_density_k(u, k), w))
}

/// Largest observed ratio LHS / RHS over the corpus and window centers. Centers
/// are chosen so that `s + Omega(2 delta)` lies in `[-r, r]`.
pub fn elliptic_constant_probe(corpus: &[SpectralField], k: usize, delta: f64) -> Result<f64> {
    if corpus.is_empty() {
        return Err(CylError::Precondition("elliptic probe needs a nonempty corpus".into()));
    }
    if !(delta > 0.0) {
        return Err(CylError::Precondition(format!("window radius {delta} must be positive")));
    }
    let ratios: Vec<Result<f64>> = corpus
        .par_iter()
        .map(|u| {
            let cyl = *u.cylinder();
            let r = cyl.half_length();
            if 2.0 * delta > r {
                return Err(CylError::OutOfWindow { lo: -2.0 * delta, hi: 2.0 * delta, min: -r, max: r });
            }
            let lhs_density = sobolev_density_k(u, k + 1);
            let du = apply_delbar(u)?;
            let rhs_du = sobolev_density_k(&du, k);
            let rhs_u = sobolev_density_k(u, k);
            let span = r - 2.0 * delta;
            let mut worst = 0.0f64;
            for i in 0..CENTERS_PER_FIELD {
                let s = -span + 2.0 * span * i as f64 / (CENTERS_PER_FIELD - 1) as f64;
                let small = Window::new(s, delta);
                let big = Window::new(s, 2.0 * delta);
                let lhs = integrate_density(&cyl, &lhs_density, small).sqrt();
                let rhs = integrate_density(&cyl, &rhs_du, big).sqrt() + integrate_density(&cyl, &rhs_u, big).sqrt();
                if rhs > 0.0 {
                    worst = worst.max(lhs / rhs);
                }
            }
            Ok(worst)
        })
        .collect();
    ratios.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}
