//! Center of mass `q(s) = int u(s, t) dt` and the residual of its equation
//! `q' - eps V(q) = eps int (V(u) - V(q)) dt`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::{norm_c, SpectralField};
use crate::solve::NonlinearTerm;
use crate::stencil;
use crate::vfield::VectorFieldModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterOfMassCurve {
    pub s: Vec<f64>,
    /// `q[j][c]`: zero mode of component `c` at sample `j`.
    pub q: Vec<Vec<Complex64>>,
    pub q_prime: Vec<Vec<Complex64>>,
}

impl CenterOfMassCurve {
    pub fn sup_norm(&self) -> f64 {
        self.q.iter().map(|p| norm_c(p)).fold(0.0, f64::max)
    }
}

pub fn center_of_mass(u: &SpectralField) -> CenterOfMassCurve {
    let cyl = u.cylinder();
    let n = cyl.ambient_dim();
    let profiles: Vec<Vec<Complex64>> = (0..n).map(|c| u.profile(0, c)).collect();
    let derivs: Vec<Vec<Complex64>> = profiles.iter().map(|p| stencil::first_derivative(p, cyl.h())).collect();
    let gather = |ps: &[Vec<Complex64>]| (0..cyl.s_samples()).map(|j| ps.iter().map(|p| p[j]).collect()).collect();
    CenterOfMassCurve { s: cyl.s_grid(), q: gather(&profiles), q_prime: gather(&derivs) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComResidual {
    pub s: Vec<f64>,
    /// `|q' - eps V(q) - eps int (V(u) - V(q)) dt|` per sample.
    pub residual: Vec<f64>,
    /// `|eps int (V(u) - V(q)) dt|` per sample: the averaged term on its own.
    pub averaged_term: Vec<f64>,
    /// Maximum residual over `[-r, r]`.
    pub interior_max: f64,
}

/// The averaged term `int V(u) dt` is the zero mode of the dealiased
/// pseudo-spectral evaluation of `V(u)`.
pub fn com_residual(u: &SpectralField, model: &VectorFieldModel, eps: f64) -> Result<ComResidual> {
    let cyl = *u.cylinder();
    let n = cyl.ambient_dim();
    let com = center_of_mass(u);
    let vu = NonlinearTerm::new(cyl, model)?.apply(u);
    let mut vq = vec![Complex64::new(0.0, 0.0); n];
    let mut residual = Vec::with_capacity(cyl.s_samples());
    let mut averaged_term = Vec::with_capacity(cyl.s_samples());
    for j in 0..cyl.s_samples() {
        model.value_complex(&com.q[j], &mut vq);
        let mut res = vec![Complex64::new(0.0, 0.0); n];
        let mut avg = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            let mean_vu = vu.coeff(j, 0, c);
            avg[c] = (mean_vu - vq[c]) * eps;
            res[c] = com.q_prime[j][c] - vq[c] * eps - avg[c];
        }
        residual.push(norm_c(&res));
        averaged_term.push(norm_c(&avg));
    }
    let interior_max = cyl.interior().map(|j| residual[j]).fold(0.0, f64::max);
    Ok(ComResidual { s: com.s, residual, averaged_term, interior_max })
}
