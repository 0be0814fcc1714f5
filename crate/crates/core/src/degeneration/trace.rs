//! The rescaled center of mass `p(sigma) = q(sigma / eps)` on the neck and its
//! comparison with the RK4 flow line of the limit field.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ends::EndLimits;
use crate::error::{CylError, Result};
use crate::field::{to_real, SpectralField};
use crate::stencil;
use crate::vfield::{rk4_step, VectorFieldModel, BALL_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledTrace {
    pub eps: f64,
    /// `eps (r - rho)`: the trace lives on `[-half_length, half_length]`.
    pub half_length: f64,
    /// Rescaled coordinates, increasing; the first and last are the neck ends.
    pub sigma: Vec<f64>,
    /// `p(sigma)` in real coordinates.
    pub p: Vec<Vec<f64>>,
    /// `p'(sigma) = q'(sigma / eps) / eps`.
    pub p_prime: Vec<Vec<f64>>,
    /// `|p' - V_n(p)|` per point.
    pub residual: Vec<f64>,
    pub sup_residual: f64,
}

impl RescaledTrace {
    /// `sup |p' - V(p)|` for another field `V` (e.g. the limit).
    pub fn residual_against(&self, model: &VectorFieldModel) -> Vec<f64> {
        let d = model.real_dim();
        let mut v = vec![0.0; d];
        self.p
            .iter()
            .zip(&self.p_prime)
            .map(|(p, dp)| {
                model.value_into(p, &mut v);
                dp.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
            })
            .collect()
    }
}

fn zero_mode_real(u: &SpectralField, coeffs_q: impl Fn(usize) -> Complex64) -> Vec<f64> {
    let n = u.cylinder().ambient_dim();
    let q: Vec<Complex64> = (0..n).map(coeffs_q).collect();
    let mut x = vec![0.0; 2 * n];
    to_real(&q, &mut x);
    x
}

/// Samples `p` at every grid point strictly inside the neck plus the two
/// (interpolated) neck ends; residuals are taken against `model` (`V_n`).
pub fn rescale_trace(u: &SpectralField, model: &VectorFieldModel, eps: f64, r: f64, rho: f64) -> Result<RescaledTrace> {
    if !(eps > 0.0) {
        return Err(CylError::Precondition("rescaling needs eps > 0".into()));
    }
    let cyl = *u.cylinder();
    let n = cyl.ambient_dim();
    let end = r - rho;
    if !(end > 0.0) {
        return Err(CylError::Precondition(format!("rho = {rho} leaves no neck on r = {r}")));
    }
    let h = cyl.h();
    let q: Vec<Vec<Complex64>> = (0..n).map(|c| u.profile(0, c)).collect();
    let dq: Vec<Vec<Complex64>> = q.iter().map(|p| stencil::first_derivative(p, h)).collect();
    let pos = |s: f64| (s - cyl.s_min()) / h;
    let mut s_points = vec![-end];
    s_points.extend(cyl.indices_between(-end, end).map(|j| cyl.s(j)).filter(|s| *s > -end && *s < end));
    s_points.push(end);
    let mut sigma = Vec::with_capacity(s_points.len());
    let mut p = Vec::with_capacity(s_points.len());
    let mut p_prime = Vec::with_capacity(s_points.len());
    for &s in &s_points {
        let x = pos(s);
        sigma.push(eps * s);
        p.push(zero_mode_real(u, |c| stencil::interpolate(&q[c], x)));
        let mut d = zero_mode_real(u, |c| stencil::interpolate(&dq[c], x));
        d.iter_mut().for_each(|v| *v /= eps);
        p_prime.push(d);
    }
    let mut trace = RescaledTrace { eps, half_length: eps * end, sigma, p, p_prime, residual: vec![], sup_residual: 0.0 };
    trace.residual = trace.residual_against(model);
    trace.sup_residual = trace.residual.iter().copied().fold(0.0, f64::max);
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowComparison {
    /// `sup |p(sigma) - v(sigma)|` over the trace points.
    pub sup_error: f64,
    /// `|v(-+end) - x_-+|`: oracle end values against the circle averages.
    pub endpoint_error_minus: f64,
    pub endpoint_error_plus: f64,
    /// `|p(-+end) - x_-+|`; zero up to interpolation since both read `q(-+(r - rho))`.
    pub trace_endpoint_minus: f64,
    pub trace_endpoint_plus: f64,
    /// `sup |p' - V(p)|` against the limit field.
    pub limit_residual: f64,
    /// `limit_residual * 2L * e^{Lip * 2L}` with `L = max(ell, half_length)`.
    pub gronwall_budget: f64,
    pub within_budget: bool,
    pub oracle_escaped: bool,
    /// Oracle values at the trace points.
    pub oracle: Vec<Vec<f64>>,
}

/// Integrates `x' = V(x)` from the trace point nearest `sigma = 0` through all
/// trace points in both directions (step = trace spacing) and compares.
pub fn compare_flowline(trace: &RescaledTrace, limits: &EndLimits, model: &VectorFieldModel, ell: f64) -> Result<FlowComparison> {
    let m = trace.sigma.len();
    if m < 2 {
        return Err(CylError::Precondition("trace too short".into()));
    }
    let d = model.real_dim();
    let mid = (0..m)
        .min_by(|&a, &b| trace.sigma[a].abs().total_cmp(&trace.sigma[b].abs()))
        .expect("nonempty trace");
    let mut oracle = vec![vec![0.0; d]; m];
    oracle[mid] = trace.p[mid].clone();
    let mut escaped = false;
    for i in mid + 1..m {
        let (prev, rest) = oracle.split_at_mut(i);
        rk4_step(model, &prev[i - 1], trace.sigma[i] - trace.sigma[i - 1], &mut rest[0]);
    }
    for i in (0..mid).rev() {
        let (head, tail) = oracle.split_at_mut(i + 1);
        rk4_step(model, &tail[0], trace.sigma[i] - trace.sigma[i + 1], &mut head[i]);
    }
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let mut sup_error = 0.0f64;
    for (o, p) in oracle.iter().zip(&trace.p) {
        escaped |= o.iter().map(|v| v * v).sum::<f64>().sqrt() > 1.0 + BALL_TOL;
        sup_error = sup_error.max(dist(o, p));
    }
    let limit_residual = trace.residual_against(model).into_iter().fold(0.0, f64::max);
    let len = ell.max(trace.half_length);
    let gronwall_budget = limit_residual * 2.0 * len * (model.lipschitz() * 2.0 * len).exp();
    Ok(FlowComparison {
        sup_error,
        endpoint_error_minus: dist(&oracle[0], &limits.x_minus),
        endpoint_error_plus: dist(&oracle[m - 1], &limits.x_plus),
        trace_endpoint_minus: dist(&trace.p[0], &limits.x_minus),
        trace_endpoint_plus: dist(&trace.p[m - 1], &limits.x_plus),
        limit_residual,
        gronwall_budget,
        // Allow for the RK4 and interpolation floor.
        within_budget: sup_error <= gronwall_budget + 1e-9,
        oracle_escaped: escaped,
        oracle,
    })
}
