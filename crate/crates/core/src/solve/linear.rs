//! Mode-split solver for `(d_s + J_0 d_t) u = f`.
//!
//! Mode `k` obeys `u_k' - 2 pi k u_k = f_k`. Each mode is propagated in its
//! decaying direction (left to right for `k <= 0`, right to left for `k > 0`)
//! with an exponential integrator: the homogeneous factor `e^{lambda h}` is exact
//! and the forcing is replaced by its cubic Lagrange interpolant, integrated
//! exactly against the exponential. Every intermediate value is bounded by the
//! data and the forcing, whatever `r`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::boundary::SpectralBoundaryData;
use crate::cylinder::Cylinder;
use crate::error::{CylError, Result};
use crate::field::SpectralField;

const TWO_PI: f64 = std::f64::consts::TAU;

/// `nu_q(z) = int_0^1 y^q e^{z y} dy` for `q = 0..=3`.
fn moments(z: f64) -> [f64; 4] {
    let mut nu = [0.0; 4];
    if z.abs() < 1.0 {
        // Series: nu_q = sum_m z^m / (m! (q + m + 1)).
        for (q, out) in nu.iter_mut().enumerate() {
            let mut term = 1.0;
            let mut acc = 0.0;
            for m in 0..30 {
                if m > 0 {
                    term *= z / m as f64;
                }
                acc += term / (q + m + 1) as f64;
            }
            *out = acc;
        }
    } else {
        let ez = z.exp();
        nu[0] = (ez - 1.0) / z;
        for q in 1..4 {
            nu[q] = (ez - q as f64 * nu[q - 1]) / z;
        }
    }
    nu
}

/// Monomial coefficients of the four Lagrange basis polynomials on `nodes`.
fn lagrange_basis(nodes: [f64; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for m in 0..4 {
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for (l, &yl) in nodes.iter().enumerate() {
            if l == m {
                continue;
            }
            denom *= nodes[m] - yl;
            let mut next = vec![0.0; poly.len() + 1];
            for (p, c) in poly.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= c * yl;
            }
            poly = next;
        }
        for p in 0..4 {
            out[m][p] = poly[p] / denom;
        }
    }
    out
}

/// Weights `w_m = int_0^1 e^{z (1 - y)} L_m(y) dy` for interpolation nodes at `nodes`.
fn forcing_weights(z: f64, nodes: [f64; 4]) -> [f64; 4] {
    let nu = moments(z);
    // int_0^1 e^{z(1-y)} y^q dy = int_0^1 e^{z x} (1 - x)^q dx.
    const BINOM: [[f64; 4]; 4] = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    let mut mu = [0.0; 4];
    for q in 0..4 {
        for p in 0..=q {
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            mu[q] += BINOM[q][p] * sign * nu[p];
        }
    }
    let basis = lagrange_basis(nodes);
    let mut w = [0.0; 4];
    for m in 0..4 {
        w[m] = (0..4).map(|q| basis[m][q] * mu[q]).sum();
    }
    w
}

/// Per-mode propagation constants for one grid.
#[derive(Debug, Clone)]
struct ModeStepper {
    decay: f64,
    first: [f64; 4],
    interior: [f64; 4],
    last: [f64; 4],
}

impl ModeStepper {
    /// `rate <= 0` is the decay rate in the direction of propagation.
    fn new(rate: f64, h: f64) -> Self {
        let z = rate * h;
        ModeStepper {
            decay: z.exp(),
            first: forcing_weights(z, [0.0, 1.0, 2.0, 3.0]),
            interior: forcing_weights(z, [-1.0, 0.0, 1.0, 2.0]),
            last: forcing_weights(z, [-2.0, -1.0, 0.0, 1.0]),
        }
    }

    /// `out[0] = a`, `out[j+1] = decay out[j] + h int (...) f`, for forcing
    /// samples `f` in propagation order. `f = None` means zero forcing.
    fn propagate(&self, a: Complex64, f: Option<&[Complex64]>, h: f64, out: &mut [Complex64]) {
        let n = out.len();
        out[0] = a;
        for j in 0..n - 1 {
            let mut next = out[j] * self.decay;
            if let Some(f) = f {
                let (base, w) = if j == 0 {
                    (0, &self.first)
                } else if j + 2 >= n {
                    (n - 4, &self.last)
                } else {
                    (j - 1, &self.interior)
                };
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..4 {
                    acc += f[base + m] * w[m];
                }
                next += acc * h;
            }
            out[j + 1] = next;
        }
    }
}

/// Reusable solver for a fixed grid.
#[derive(Debug, Clone)]
pub struct LinearSolver {
    cyl: Cylinder,
    steppers: Vec<ModeStepper>,
}

impl LinearSolver {
    pub fn new(cyl: Cylinder) -> Result<Self> {
        if cyl.s_samples() < 4 {
            return Err(CylError::InvalidGrid("the exponential integrator needs at least 4 samples".into()));
        }
        let h = cyl.h();
        let steppers = cyl.modes().map(|k| ModeStepper::new(-(TWO_PI * k as f64).abs(), h)).collect();
        Ok(LinearSolver { cyl, steppers })
    }

    pub fn cylinder(&self) -> &Cylinder {
        &self.cyl
    }

    /// Solves `delbar u = f` with the given boundary data. `f = None` yields the
    /// homogeneous solution `H(bdata)`.
    pub fn solve(&self, bdata: &SpectralBoundaryData, f: Option<&SpectralField>) -> Result<SpectralField> {
        let cyl = self.cyl;
        bdata.check_against(&cyl)?;
        if let Some(f) = f {
            if !f.cylinder().same_grid(&cyl) {
                return Err(CylError::GridMismatch);
            }
        }
        let (s_n, n) = (cyl.s_samples(), cyl.ambient_dim());
        let h = cyl.h();
        let jobs: Vec<(i64, usize)> = cyl.modes().flat_map(|k| (0..n).map(move |c| (k, c))).collect();
        let profiles: Vec<Vec<Complex64>> = jobs
            .par_iter()
            .map(|&(k, c)| {
                let stepper = &self.steppers[cyl.mode_index(k).expect("mode in band")];
                let a = bdata.get(k).map(|e| e.value()[c]).unwrap_or_default();
                let forcing = f.map(|f| f.profile(k, c));
                if forcing.is_none() && a == Complex64::new(0.0, 0.0) {
                    return vec![Complex64::new(0.0, 0.0); s_n];
                }
                let mut out = vec![Complex64::new(0.0, 0.0); s_n];
                if k <= 0 {
                    stepper.propagate(a, forcing.as_deref(), h, &mut out);
                } else {
                    // sigma = -s turns u' - lambda u = f into v' + lambda v = -f(-sigma).
                    let rev: Option<Vec<Complex64>> = forcing.map(|p| p.iter().rev().map(|z| -z).collect());
                    stepper.propagate(a, rev.as_deref(), h, &mut out);
                    out.reverse();
                }
                out
            })
            .collect();
        let mut u = SpectralField::zeros(cyl);
        for ((k, c), p) in jobs.into_iter().zip(&profiles) {
            u.set_profile(k, c, p);
        }
        Ok(u)
    }
}

/// Solves `(d_s + J_0 d_t) u = f` with spectral boundary data.
pub fn solve_linear(cyl: Cylinder, bdata: &SpectralBoundaryData, f: &SpectralField) -> Result<SpectralField> {
    LinearSolver::new(cyl)?.solve(bdata, Some(f))
}

/// The homogeneous solution `H(bdata)`: mode `k` equals `a_k e^{2 pi k (s - s_edge)}`.
pub fn homogeneous(cyl: Cylinder, bdata: &SpectralBoundaryData) -> Result<SpectralField> {
    LinearSolver::new(cyl)?.solve(bdata, None)
}
