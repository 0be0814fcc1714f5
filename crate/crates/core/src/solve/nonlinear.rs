//! Newton/Picard solver for `delbar u = eps V(u)` with spectral boundary data.
//!
//! The fixed-point map is `Phi(u) = H(bdata) + L_0(eps P[V(u)])`, where `L_0`
//! solves the linear problem with zero data and `P[V(u)]` is the band-truncated
//! pseudo-spectral evaluation of `V` on a `2T`-point circle grid. Affine
//! fields are applied mode by mode instead, which is exact and keeps transform
//! roundoff out of the exponentially small modes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boundary::SpectralBoundaryData;
use super::linear::LinearSolver;
use crate::calculus::apply_delbar;
use crate::cylinder::Cylinder;
use crate::error::{CylError, Result};
use crate::field::{from_real, to_real, PhysicalGrid, SpectralField};
use crate::vfield::{VectorFieldModel, VectorFieldSequence};

pub const MAX_ITERATIONS: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-10;
/// Largest admissible value of the contraction estimate `eps C1 (2r + 2)`.
pub const CONTRACTION_LIMIT: f64 = 0.9;
/// Slack on `sup |u| <= 1` when generating instances.
pub const BALL_SLACK: f64 = 1e-9;

const INNER_ITERATIONS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Outer iterations; each evaluates `Phi` once at the current iterate.
    pub iterations: usize,
    /// `sup |delbar u - eps P[V(u)]|` over `[-r, r] x R/Z`, with `d_s` from the
    /// fourth-order stencil.
    pub final_residual: f64,
    /// Fixed-point residual `|u - Phi(u)|` of the discrete problem.
    pub discrete_residual: f64,
    /// `max(0, sup |u| - 1)`.
    pub ball_violation: f64,
    /// Estimated contraction factor `eps C1 (2r + 2)`.
    pub contraction_estimate: f64,
    pub residual_history: Vec<f64>,
    /// Outer iterations that fell back to a plain Picard step.
    pub picard_fallbacks: usize,
}

/// Pointwise evaluation of `V` (or of `DV(u) delta`) on circle grids.
pub struct NonlinearTerm<'a> {
    model: &'a VectorFieldModel,
    grid: PhysicalGrid,
    cyl: Cylinder,
    affine: Option<AffineParts>,
}

/// `V(z) = lin z + ant conj(z) + offset` on `C^n` for affine `V`; the matrices
/// are complex `n x n`, row-major.
struct AffineParts {
    lin: Vec<Complex64>,
    ant: Vec<Complex64>,
    offset: Vec<Complex64>,
}

impl AffineParts {
    /// Splits the real-linear part `A` as `A z = (A z - i A(i z)) / 2 + (A z + i A(i z)) / 2`;
    /// column `l` of each matrix is that half evaluated at `e_l`.
    fn new(model: &VectorFieldModel) -> Self {
        let d = model.real_dim();
        let n = d / 2;
        let zero = vec![0.0; d];
        let mut b = vec![0.0; d];
        model.value_into(&zero, &mut b);
        let linear_part = |z: &[Complex64]| {
            let mut x = vec![0.0; d];
            let mut y = vec![0.0; d];
            to_real(z, &mut x);
            model.value_into(&x, &mut y);
            y.iter_mut().zip(&b).for_each(|(v, o)| *v -= o);
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            from_real(&y, &mut out);
            out
        };
        let i = Complex64::i();
        let (mut lin, mut ant) = (vec![Complex64::new(0.0, 0.0); n * n], vec![Complex64::new(0.0, 0.0); n * n]);
        for l in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[l] = Complex64::new(1.0, 0.0);
            let ae = linear_part(&e);
            e[l] = i;
            let aie = linear_part(&e);
            for row in 0..n {
                lin[row * n + l] = 0.5 * (ae[row] - i * aie[row]);
                ant[row * n + l] = 0.5 * (ae[row] + i * aie[row]);
            }
        }
        let mut offset = vec![Complex64::new(0.0, 0.0); n];
        from_real(&b, &mut offset);
        AffineParts { lin, ant, offset }
    }
}

impl<'a> NonlinearTerm<'a> {
    pub fn new(cyl: Cylinder, model: &'a VectorFieldModel) -> Result<Self> {
        if model.real_dim() != cyl.real_dim() {
            return Err(CylError::Dimension { expected: cyl.real_dim(), got: model.real_dim() });
        }
        let affine = model.is_linear().then(|| AffineParts::new(model));
        Ok(NonlinearTerm { model, grid: PhysicalGrid::new(&cyl, 2 * cyl.t_modes()), cyl, affine })
    }

    /// `(V u)^_k = lin u_k + ant conj(u_{-k})`, plus the offset on the zero mode.
    fn apply_affine(&self, u: &SpectralField, parts: &AffineParts, with_offset: bool) -> SpectralField {
        let cyl = self.cyl;
        let n = cyl.ambient_dim();
        let chunk = cyl.t_modes() * n;
        let mut out = SpectralField::zeros(cyl);
        out.raw_mut().par_chunks_mut(chunk).enumerate().for_each(|(j, dst)| {
            let src = u.slice(j);
            for (idx, tgt) in dst.chunks_mut(n).enumerate() {
                let k = cyl.mode_at(idx);
                let z = &src[idx * n..(idx + 1) * n];
                let mirror = cyl.mode_index(-k).map(|m| &src[m * n..(m + 1) * n]);
                for (row, t) in tgt.iter_mut().enumerate() {
                    let mut acc: Complex64 = (0..n).map(|l| parts.lin[row * n + l] * z[l]).sum();
                    if let Some(w) = mirror {
                        acc += (0..n).map(|l| parts.ant[row * n + l] * w[l].conj()).sum::<Complex64>();
                    }
                    if with_offset && k == 0 {
                        acc += parts.offset[row];
                    }
                    *t = acc;
                }
            }
        });
        out
    }

    fn map_slices(&self, u: &SpectralField, per_point: impl Fn(usize, usize, &[f64], &mut [f64]) + Sync) -> SpectralField {
        let cyl = self.cyl;
        let n = cyl.ambient_dim();
        let d = cyl.real_dim();
        let chunk = cyl.t_modes() * n;
        let mut out = SpectralField::zeros(cyl);
        out.raw_mut().par_chunks_mut(chunk).enumerate().for_each(|(j, dst)| {
            let phys = self.grid.synthesize(u.slice(j));
            let mut vals = vec![Complex64::new(0.0, 0.0); phys.len()];
            let mut x = vec![0.0; d];
            let mut v = vec![0.0; d];
            for (p, (src, tgt)) in phys.chunks(n).zip(vals.chunks_mut(n)).enumerate() {
                to_real(src, &mut x);
                per_point(j, p, &x, &mut v);
                from_real(&v, tgt);
            }
            dst.copy_from_slice(&self.grid.analyze(&vals));
        });
        out
    }

    /// `P[V(u)]`.
    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        if let Some(parts) = &self.affine {
            return self.apply_affine(u, parts, true);
        }
        self.map_slices(u, |_, _, x, v| self.model.value_into(x, v))
    }

    /// `P[DV(base) delta]`; the Jacobians are taken on the circle grid of `base`.
    pub fn linearized(&self, base: &SpectralField, delta: &SpectralField) -> SpectralField {
        if let Some(parts) = &self.affine {
            return self.apply_affine(delta, parts, false);
        }
        let cyl = self.cyl;
        let n = cyl.ambient_dim();
        let d = cyl.real_dim();
        let chunk = cyl.t_modes() * n;
        let mut out = SpectralField::zeros(cyl);
        out.raw_mut().par_chunks_mut(chunk).enumerate().for_each(|(j, dst)| {
            let pb = self.grid.synthesize(base.slice(j));
            let pd = self.grid.synthesize(delta.slice(j));
            let mut vals = vec![Complex64::new(0.0, 0.0); pb.len()];
            let (mut x, mut dx, mut v) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
            let mut jac = vec![0.0; d * d];
            for ((b, dl), tgt) in pb.chunks(n).zip(pd.chunks(n)).zip(vals.chunks_mut(n)) {
                to_real(b, &mut x);
                to_real(dl, &mut dx);
                self.model.jacobian_into(&x, &mut jac);
                for i in 0..d {
                    v[i] = (0..d).map(|l| jac[i * d + l] * dx[l]).sum();
                }
                from_real(&v, tgt);
            }
            dst.copy_from_slice(&self.grid.analyze(&vals));
        });
        out
    }
}

/// `sup_j max_c sum_k |F_k(s_j)|`, which dominates the physical sup norm of `F`.
pub fn coefficient_sup(f: &SpectralField) -> f64 {
    let cyl = f.cylinder();
    let n = cyl.ambient_dim();
    (0..cyl.s_samples())
        .map(|j| {
            let sl = f.slice(j);
            (0..n).map(|c| sl.iter().skip(c).step_by(n).map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// `sup |u|` on the `2T`-point circle grids of all samples.
pub fn sup_norm(u: &SpectralField) -> f64 {
    let cyl = u.cylinder();
    u.sup_abs(0..cyl.s_samples(), 2 * cyl.t_modes())
}

/// `sup |delbar u - eps P[V(u)]|` over the samples in `range` (physical grid of `2T` points).
pub fn pde_residual(u: &SpectralField, model: &VectorFieldModel, eps: f64, range: std::ops::Range<usize>) -> Result<f64> {
    let cyl = *u.cylinder();
    let term = NonlinearTerm::new(cyl, model)?;
    let lhs = apply_delbar(u)?;
    let res = lhs.axpy(-eps, &term.apply(u))?;
    Ok(res.sup_abs(range, 2 * cyl.t_modes()))
}

/// Solves `delbar u = eps V(u)` with data `bdata`; success means the discrete
/// fixed-point residual reached `tol`.
pub fn solve_nonlinear(
    cyl: Cylinder,
    bdata: &SpectralBoundaryData,
    model: &VectorFieldModel,
    eps: f64,
    tol: f64,
) -> Result<(SpectralField, SolveReport)> {
    if !(tol > 0.0) {
        return Err(CylError::Precondition(format!("tolerance {tol} must be positive")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(CylError::Precondition(format!("eps {eps} must be a nonnegative number")));
    }
    let factor = eps * model.reported_c1_bound() * 2.0 * (cyl.half_length() + 1.0);
    if factor >= CONTRACTION_LIMIT {
        return Err(CylError::NoContraction { factor });
    }
    let term = NonlinearTerm::new(cyl, model)?;
    let solver = LinearSolver::new(cyl)?;
    let zero = SpectralBoundaryData::empty();
    let h = solver.solve(bdata, None)?;
    let phi = |u: &SpectralField| -> Result<SpectralField> {
        if eps == 0.0 {
            return Ok(h.clone());
        }
        let forced = solver.solve(&zero, Some(&term.apply(u).scaled(eps)))?;
        forced.axpy(1.0, &h)
    };

    let mut u = h.clone();
    let mut history = Vec::new();
    let mut fallbacks = 0;
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let pu = phi(&u)?;
        let f = u.axpy(-1.0, &pu)?;
        let res = coefficient_sup(&f);
        history.push(res);
        if res <= tol {
            converged = true;
            break;
        }
        // Newton step: delta = -F + L_0(eps DV(u) delta), by inner fixed-point
        // iteration started from the Picard step delta = -F.
        let minus_f = f.scaled(-1.0);
        let mut delta = minus_f.clone();
        let inner_tol = (0.01 * res * res).max(0.01 * tol);
        let mut prev_change = f64::INFINITY;
        let mut newton_ok = model.is_linear();
        for _ in 0..INNER_ITERATIONS {
            let lin = solver.solve(&zero, Some(&term.linearized(&u, &delta).scaled(eps)))?;
            let next = minus_f.axpy(1.0, &lin)?;
            let change = coefficient_sup(&next.axpy(-1.0, &delta)?);
            delta = next;
            if change <= inner_tol {
                newton_ok = true;
                break;
            }
            if change > 0.9 * prev_change {
                newton_ok = false;
                break;
            }
            prev_change = change;
        }
        if newton_ok && delta.raw().iter().all(|z| z.is_finite()) {
            u = u.axpy(1.0, &delta)?;
        } else {
            fallbacks += 1;
            u = pu;
        }
    }
    let discrete_residual = *history.last().unwrap_or(&f64::INFINITY);
    if !converged {
        return Err(CylError::NonConvergence { iterations: history.len(), residual: discrete_residual });
    }
    let final_residual = pde_residual(&u, model, eps, cyl.interior())?;
    let ball_violation = (sup_norm(&u) - 1.0).max(0.0);
    let report = SolveReport {
        iterations: history.len(),
        final_residual,
        discrete_residual,
        ball_violation,
        contraction_estimate: factor,
        residual_history: history,
        picard_fallbacks: fallbacks,
    };
    Ok((u, report))
}

/// Generates the family member `u_n` on `cyl` (half-length `r_n`) with `eps_n`
/// and `V_n` from `sequence`; fails unless `sup |u| <= 1`.
pub fn make_instance(
    cyl: Cylinder,
    eps: f64,
    template: &SpectralBoundaryData,
    sequence: &VectorFieldSequence,
    n: usize,
    tol: f64,
) -> Result<(SpectralField, SolveReport)> {
    let model = sequence.member(n);
    let (mut u, report) = solve_nonlinear(cyl, template, &model, eps, tol)?;
    if report.ball_violation > BALL_SLACK {
        return Err(CylError::BallViolation { violation: report.ball_violation });
    }
    u.ball_constrained = true;
    Ok((u, report))
}
