//! Vector fields `V : B(1) ⊂ R^d -> R^d` (with `d = 2n`, `R^{2n} = C^n`), the
//! sequences `V_n = V + a_n W`, the RK4 flow oracle and the mean-value matrix.
//!
//! Points are real vectors; a complex point `(z_1, .., z_n)` has real coordinates
//! `(Re z_1, Im z_1, .., Re z_n, Im z_n)`.

mod flow;
pub mod quadrature;

pub use flow::{flow_ode, flow_ode_directed, rk4_step, FlowSegment};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CylError, Result};

/// Slack on the unit-ball test for evaluation points.
pub const BALL_TOL: f64 = 1e-9;

/// Model description as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// `V(x) = A x + b`, `A` given by rows.
    Linear { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    /// Gradient of the separable polynomial
    /// `f = sum_i quadratic_i x_i^2/2 + cubic_i x_i^3/3 + quartic_i x_i^4/4`.
    Gradient {
        quadratic: Vec<f64>,
        #[serde(default)]
        cubic: Vec<f64>,
        #[serde(default)]
        quartic: Vec<f64>,
    },
    /// `V(x) = rate (-x_2, x_1, 0, ..)`.
    Rotation { rate: f64, real_dim: usize },
    /// Multilinear interpolation of node values on the uniform grid of
    /// `nodes_per_axis^d` points in `[-1, 1]^d`; `values[node][component]`,
    /// nodes ordered with the first axis fastest. Queries are clamped to the cube.
    Tabulated { real_dim: usize, nodes_per_axis: usize, values: Vec<f64> },
    /// `base + weight * perturbation`.
    Perturbed { base: Box<ModelKind>, perturbation: Box<ModelKind>, weight: f64 },
}

/// Bounds on the closed unit ball: `sup|V|`, `sup|DV|` and `sup|D^2 V|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldBounds {
    pub sup_v: f64,
    pub sup_dv: f64,
    pub sup_d2v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelKind", into = "ModelKind")]
pub struct VectorFieldModel {
    kind: ModelKind,
    dim: usize,
    bounds: FieldBounds,
}

impl TryFrom<ModelKind> for VectorFieldModel {
    type Error = CylError;
    fn try_from(kind: ModelKind) -> Result<Self> {
        VectorFieldModel::new(kind)
    }
}

impl From<VectorFieldModel> for ModelKind {
    fn from(m: VectorFieldModel) -> Self {
        m.kind
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(CylError::InvalidModel(msg.into()))
}

fn validate(kind: &ModelKind) -> Result<usize> {
    let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
    match kind {
        ModelKind::Linear { matrix, offset } => {
            let d = offset.len();
            if d == 0 || matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
                return invalid(format!("linear model needs a {d}x{d} matrix matching the offset"));
            }
            if !finite(offset) || matrix.iter().any(|row| !finite(row)) {
                return invalid("linear model has non-finite entries");
            }
            Ok(d)
        }
        ModelKind::Gradient { quadratic, cubic, quartic } => {
            let d = quadratic.len();
            if d == 0 {
                return invalid("gradient model needs at least one quadratic coefficient");
            }
            for (name, v) in [("cubic", cubic), ("quartic", quartic)] {
                if !v.is_empty() && v.len() != d {
                    return invalid(format!("gradient model: {name} has length {} (expected {d})", v.len()));
                }
            }
            if !finite(quadratic) || !finite(cubic) || !finite(quartic) {
                return invalid("gradient model has non-finite coefficients");
            }
            Ok(d)
        }
        ModelKind::Rotation { rate, real_dim } => {
            if *real_dim < 2 || !rate.is_finite() {
                return invalid("rotation model needs real_dim >= 2 and a finite rate");
            }
            Ok(*real_dim)
        }
        ModelKind::Tabulated { real_dim, nodes_per_axis, values } => {
            let d = *real_dim;
            if d == 0 || *nodes_per_axis < 2 {
                return invalid("tabulated model needs real_dim >= 1 and nodes_per_axis >= 2");
            }
            let nodes = nodes_per_axis
                .checked_pow(d as u32)
                .filter(|n| *n <= 1 << 24)
                .ok_or_else(|| CylError::InvalidModel("tabulated grid too large".into()))?;
            if values.len() != nodes * d {
                return invalid(format!("tabulated model expects {} values, got {}", nodes * d, values.len()));
            }
            if !finite(values) {
                return invalid("tabulated model has non-finite values");
            }
            Ok(d)
        }
        ModelKind::Perturbed { base, perturbation, weight } => {
            let d = validate(base)?;
            let e = validate(perturbation)?;
            if d != e {
                return invalid(format!("perturbation dimension {e} differs from base dimension {d}"));
            }
            if !weight.is_finite() {
                return invalid("perturbation weight must be finite");
            }
            Ok(d)
        }
    }
}

fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.iter().all(|x| *x == 0.0) {
        return 0.0;
    }
    m.singular_values().max()
}

fn compute_bounds(kind: &ModelKind, d: usize) -> FieldBounds {
    match kind {
        ModelKind::Linear { matrix, offset } => {
            let a = DMatrix::from_fn(d, d, |i, j| matrix[i][j]);
            let na = op_norm(&a);
            let nb = offset.iter().map(|x| x * x).sum::<f64>().sqrt();
            FieldBounds { sup_v: na + nb, sup_dv: na, sup_d2v: 0.0 }
        }
        ModelKind::Gradient { quadratic, cubic, quartic } => {
            let get = |v: &Vec<f64>, i: usize| v.get(i).copied().unwrap_or(0.0).abs();
            let mut b = FieldBounds { sup_v: 0.0, sup_dv: 0.0, sup_d2v: 0.0 };
            for i in 0..d {
                let (l, k, m) = (get(quadratic, i), get(cubic, i), get(quartic, i));
                // |V_i| <= |x_i| (l + k + m), so |V| <= max_i (l + k + m) |x|.
                b.sup_v = b.sup_v.max(l + k + m);
                b.sup_dv = b.sup_dv.max(l + 2.0 * k + 3.0 * m);
                b.sup_d2v = b.sup_d2v.max(2.0 * k + 6.0 * m);
            }
            b
        }
        ModelKind::Rotation { rate, .. } => FieldBounds { sup_v: rate.abs(), sup_dv: rate.abs(), sup_d2v: 0.0 },
        ModelKind::Tabulated { nodes_per_axis, values, .. } => {
            let n = *nodes_per_axis;
            let dx = 2.0 / (n - 1) as f64;
            let strides: Vec<usize> = (0..d).map(|a| n.pow(a as u32)).collect();
            let nodes = n.pow(d as u32);
            let at = |node: usize, c: usize| values[node * d + c];
            let norm_diff = |a: usize, b: usize| (0..d).map(|c| (at(a, c) - at(b, c)).powi(2)).sum::<f64>().sqrt();
            let mut sup_v: f64 = 0.0;
            let mut edge = vec![0.0f64; d];
            let mut mixed = vec![0.0f64; d * d];
            let mut idx = vec![0usize; d];
            for node in 0..nodes {
                let mut rem = node;
                for a in 0..d {
                    idx[a] = rem % n;
                    rem /= n;
                }
                sup_v = sup_v.max((0..d).map(|c| at(node, c).powi(2)).sum::<f64>().sqrt());
                for a in 0..d {
                    if idx[a] + 1 >= n {
                        continue;
                    }
                    let na = node + strides[a];
                    edge[a] = edge[a].max(norm_diff(na, node) / dx);
                    for b in a + 1..d {
                        if idx[b] + 1 >= n {
                            continue;
                        }
                        let nb = node + strides[b];
                        let nab = na + strides[b];
                        let m = (0..d)
                            .map(|c| (at(nab, c) - at(na, c) - at(nb, c) + at(node, c)).powi(2))
                            .sum::<f64>()
                            .sqrt()
                            / (dx * dx);
                        mixed[a * d + b] = mixed[a * d + b].max(m);
                    }
                }
            }
            FieldBounds {
                // Interpolated values are convex combinations of node values.
                sup_v,
                sup_dv: edge.iter().map(|x| x * x).sum::<f64>().sqrt(),
                sup_d2v: (2.0 * mixed.iter().map(|x| x * x).sum::<f64>()).sqrt(),
            }
        }
        ModelKind::Perturbed { base, perturbation, weight } => {
            let b = compute_bounds(base, d);
            let p = compute_bounds(perturbation, d);
            let w = weight.abs();
            FieldBounds {
                sup_v: b.sup_v + w * p.sup_v,
                sup_dv: b.sup_dv + w * p.sup_dv,
                sup_d2v: b.sup_d2v + w * p.sup_d2v,
            }
        }
    }
}

fn value_kind(kind: &ModelKind, d: usize, x: &[f64], out: &mut [f64]) {
    match kind {
        ModelKind::Linear { matrix, offset } => {
            for i in 0..d {
                out[i] = offset[i] + matrix[i].iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        ModelKind::Gradient { quadratic, cubic, quartic } => {
            for i in 0..d {
                let xi = x[i];
                let k = cubic.get(i).copied().unwrap_or(0.0);
                let m = quartic.get(i).copied().unwrap_or(0.0);
                out[i] = xi * (quadratic[i] + xi * (k + xi * m));
            }
        }
        ModelKind::Rotation { rate, .. } => {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[0] = -rate * x[1];
            out[1] = rate * x[0];
        }
        ModelKind::Tabulated { nodes_per_axis, values, .. } => tabulated(*nodes_per_axis, values, d, x, out, None),
        ModelKind::Perturbed { base, perturbation, weight } => {
            value_kind(base, d, x, out);
            let mut tmp = vec![0.0; d];
            value_kind(perturbation, d, x, &mut tmp);
            out.iter_mut().zip(&tmp).for_each(|(o, t)| *o += weight * t);
        }
    }
}

/// Row-major Jacobian `out[i * d + j] = dV_i / dx_j`.
fn jacobian_kind(kind: &ModelKind, d: usize, x: &[f64], out: &mut [f64]) {
    match kind {
        ModelKind::Linear { matrix, .. } => {
            for i in 0..d {
                out[i * d..(i + 1) * d].copy_from_slice(&matrix[i]);
            }
        }
        ModelKind::Gradient { quadratic, cubic, quartic } => {
            out.iter_mut().for_each(|v| *v = 0.0);
            for i in 0..d {
                let xi = x[i];
                let k = cubic.get(i).copied().unwrap_or(0.0);
                let m = quartic.get(i).copied().unwrap_or(0.0);
                out[i * d + i] = quadratic[i] + xi * (2.0 * k + 3.0 * m * xi);
            }
        }
        ModelKind::Rotation { rate, .. } => {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[1] = -rate;
            out[d] = *rate;
        }
        ModelKind::Tabulated { nodes_per_axis, values, .. } => {
            let mut scratch = vec![0.0; d];
            tabulated(*nodes_per_axis, values, d, x, &mut scratch, Some(out))
        }
        ModelKind::Perturbed { base, perturbation, weight } => {
            jacobian_kind(base, d, x, out);
            let mut tmp = vec![0.0; d * d];
            jacobian_kind(perturbation, d, x, &mut tmp);
            out.iter_mut().zip(&tmp).for_each(|(o, t)| *o += weight * t);
        }
    }
}

/// Multilinear interpolation; when `jac` is given it receives the derivative
/// of the interpolant inside the containing cell.
fn tabulated(n: usize, values: &[f64], d: usize, x: &[f64], out: &mut [f64], mut jac: Option<&mut [f64]>) {
    let dx = 2.0 / (n - 1) as f64;
    let mut base = vec![0usize; d];
    let mut frac = vec![0.0f64; d];
    for a in 0..d {
        let y = ((x[a].clamp(-1.0, 1.0) + 1.0) / dx).min((n - 1) as f64);
        let i = (y.floor() as usize).min(n - 2);
        base[a] = i;
        frac[a] = y - i as f64;
    }
    out.iter_mut().for_each(|v| *v = 0.0);
    if let Some(j) = jac.as_deref_mut() {
        j.iter_mut().for_each(|v| *v = 0.0);
    }
    for corner in 0..(1usize << d) {
        let mut node = 0usize;
        let mut stride = 1usize;
        let mut w = 1.0;
        for a in 0..d {
            let bit = (corner >> a) & 1;
            node += (base[a] + bit) * stride;
            stride *= n;
            w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
        }
        let v = &values[node * d..(node + 1) * d];
        for c in 0..d {
            out[c] += w * v[c];
        }
        if let Some(j) = jac.as_deref_mut() {
            for a in 0..d {
                // Derivative of the weight with respect to x_a.
                let mut dw = if (corner >> a) & 1 == 1 { 1.0 } else { -1.0 } / dx;
                for b in 0..d {
                    if b != a {
                        dw *= if (corner >> b) & 1 == 1 { frac[b] } else { 1.0 - frac[b] };
                    }
                }
                for c in 0..d {
                    j[c * d + a] += dw * v[c];
                }
            }
        }
    }
}

fn check_ball(x: &[f64]) -> Result<()> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 + BALL_TOL || !norm.is_finite() {
        return Err(CylError::OutOfBall { norm });
    }
    Ok(())
}

impl VectorFieldModel {
    pub fn new(kind: ModelKind) -> Result<Self> {
        let dim = validate(&kind)?;
        let bounds = compute_bounds(&kind, dim);
        Ok(VectorFieldModel { kind, dim, bounds })
    }

    pub fn zero(real_dim: usize) -> Self {
        Self::linear(DMatrix::zeros(real_dim, real_dim), DVector::zeros(real_dim))
    }

    /// `V(x) = lambda x`.
    pub fn scalar(lambda: f64, real_dim: usize) -> Self {
        Self::linear(DMatrix::identity(real_dim, real_dim) * lambda, DVector::zeros(real_dim))
    }

    /// `V(x) = w`.
    pub fn constant(w: &[f64]) -> Self {
        let d = w.len();
        Self::linear(DMatrix::zeros(d, d), DVector::from_column_slice(w))
    }

    pub fn linear(matrix: DMatrix<f64>, offset: DVector<f64>) -> Self {
        let rows = (0..matrix.nrows()).map(|i| matrix.row(i).iter().copied().collect()).collect();
        Self::new(ModelKind::Linear { matrix: rows, offset: offset.iter().copied().collect() })
            .expect("linear model from nalgebra parts")
    }

    /// `V = grad(sum_i lambda_i x_i^2 / 2)`.
    pub fn quadratic_gradient(lambdas: &[f64]) -> Result<Self> {
        Self::new(ModelKind::Gradient { quadratic: lambdas.to_vec(), cubic: vec![], quartic: vec![] })
    }

    pub fn rotation(rate: f64, real_dim: usize) -> Result<Self> {
        Self::new(ModelKind::Rotation { rate, real_dim })
    }

    /// Samples `f` on the `nodes_per_axis^d` grid of `[-1, 1]^d`.
    pub fn tabulate(real_dim: usize, nodes_per_axis: usize, f: impl Fn(&[f64], &mut [f64])) -> Result<Self> {
        let d = real_dim;
        let n = nodes_per_axis;
        let nodes = n.checked_pow(d as u32).ok_or_else(|| CylError::InvalidModel("grid too large".into()))?;
        let dx = 2.0 / (n.max(2) - 1) as f64;
        let mut values = vec![0.0; nodes * d];
        let mut x = vec![0.0; d];
        for node in 0..nodes {
            let mut rem = node;
            for xa in x.iter_mut() {
                *xa = -1.0 + (rem % n) as f64 * dx;
                rem /= n;
            }
            f(&x, &mut values[node * d..(node + 1) * d]);
        }
        Self::new(ModelKind::Tabulated { real_dim, nodes_per_axis, values })
    }

    /// `self + weight * other`.
    pub fn perturbed(&self, other: &VectorFieldModel, weight: f64) -> Result<Self> {
        Self::new(ModelKind::Perturbed {
            base: Box::new(self.kind.clone()),
            perturbation: Box::new(other.kind.clone()),
            weight,
        })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Real dimension `d = 2n`.
    pub fn real_dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> FieldBounds {
        self.bounds
    }

    pub fn reported_c1_bound(&self) -> f64 {
        self.bounds.sup_v.max(self.bounds.sup_dv)
    }

    pub fn reported_c2_bound(&self) -> f64 {
        self.reported_c1_bound().max(self.bounds.sup_d2v)
    }

    /// Lipschitz constant on the ball (operator-norm bound on `DV`).
    pub fn lipschitz(&self) -> f64 {
        self.bounds.sup_dv
    }

    pub fn is_linear(&self) -> bool {
        fn lin(k: &ModelKind) -> bool {
            match k {
                ModelKind::Linear { .. } | ModelKind::Rotation { .. } => true,
                ModelKind::Gradient { cubic, quartic, .. } => {
                    cubic.iter().all(|x| *x == 0.0) && quartic.iter().all(|x| *x == 0.0)
                }
                ModelKind::Tabulated { .. } => false,
                ModelKind::Perturbed { base, perturbation, weight } => lin(base) && (*weight == 0.0 || lin(perturbation)),
            }
        }
        lin(&self.kind)
    }

    /// Unchecked evaluation; valid for any finite `x`.
    pub fn value_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert!(x.len() == self.dim && out.len() == self.dim);
        value_kind(&self.kind, self.dim, x, out)
    }

    /// Unchecked row-major Jacobian.
    pub fn jacobian_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert!(x.len() == self.dim && out.len() == self.dim * self.dim);
        jacobian_kind(&self.kind, self.dim, x, out)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(CylError::Dimension { expected: self.dim, got });
        }
        Ok(())
    }

    pub fn eval_v(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x.len())?;
        check_ball(x.as_slice())?;
        let mut out = DVector::zeros(self.dim);
        self.value_into(x.as_slice(), out.as_mut_slice());
        Ok(out)
    }

    pub fn eval_dv(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_dim(x.len())?;
        check_ball(x.as_slice())?;
        let mut buf = vec![0.0; self.dim * self.dim];
        self.jacobian_into(x.as_slice(), &mut buf);
        Ok(DMatrix::from_row_slice(self.dim, self.dim, &buf))
    }

    /// Evaluation at a complex point of `C^n`.
    pub fn value_complex(&self, p: &[Complex64], out: &mut [Complex64]) {
        let mut x = vec![0.0; self.dim];
        let mut v = vec![0.0; self.dim];
        crate::field::to_real(p, &mut x);
        self.value_into(&x, &mut v);
        crate::field::from_real(&v, out);
    }

    /// `Ã = ∫_0^1 DV((1 - τ) q + τ u(t)) dτ` for each loop point `u(t)`, so that
    /// `V(u(t)) - V(q) = Ã(t) (u(t) - q)`.
    pub fn mean_value_matrix(&self, q: &[f64], loop_points: &[Vec<f64>]) -> Result<Vec<DMatrix<f64>>> {
        self.check_dim(q.len())?;
        check_ball(q)?;
        let rule = quadrature::gauss_legendre_unit(quadrature::MEAN_VALUE_NODES);
        let d = self.dim;
        let mut x = vec![0.0; d];
        let mut jac = vec![0.0; d * d];
        loop_points
            .iter()
            .map(|u| {
                self.check_dim(u.len())?;
                check_ball(u)?;
                let mut acc = vec![0.0; d * d];
                for &(tau, w) in &rule {
                    for i in 0..d {
                        x[i] = (1.0 - tau) * q[i] + tau * u[i];
                    }
                    self.jacobian_into(&x, &mut jac);
                    acc.iter_mut().zip(&jac).for_each(|(a, j)| *a += w * j);
                }
                Ok(DMatrix::from_row_slice(d, d, &acc))
            })
            .collect()
    }

    /// Largest sampled `|V|` and operator norm of `DV` over `samples` random
    /// points of the closed ball; used to spot-check the reported bounds.
    pub fn sampled_sup(&self, samples: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.dim;
        let mut v = vec![0.0; d];
        let mut jac = vec![0.0; d * d];
        let (mut sv, mut sdv) = (0.0f64, 0.0f64);
        for _ in 0..samples {
            let x = random_ball_point(&mut rng, d);
            self.value_into(&x, &mut v);
            self.jacobian_into(&x, &mut jac);
            sv = sv.max(v.iter().map(|a| a * a).sum::<f64>().sqrt());
            sdv = sdv.max(op_norm(&DMatrix::from_row_slice(d, d, &jac)));
        }
        (sv, sdv)
    }
}

/// A point of the closed unit ball in `R^d`; radius distributed as `U^{1/d}`.
pub fn random_ball_point<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            let r = rng.random_range(0.0f64..=1.0).powf(1.0 / d as f64);
            return x.into_iter().map(|a| a * r / n).collect();
        }
    }
}

/// Decay law of the perturbation weight `a_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum WeightSchedule {
    /// `a_n = scale / n`.
    #[default]
    Harmonic,
    /// `a_n = ratio^n`, `0 < ratio < 1`.
    Geometric { ratio: f64 },
    /// `a_n = 0`: the sequence is constant.
    Constant,
}

impl WeightSchedule {
    pub fn weight(&self, n: usize) -> f64 {
        let n = n.max(1);
        match self {
            WeightSchedule::Harmonic => 1.0 / n as f64,
            WeightSchedule::Geometric { ratio } => ratio.powi(n as i32),
            WeightSchedule::Constant => 0.0,
        }
    }
}

/// `V_n = limit + a_n * perturbation`, indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFieldSequence {
    pub limit: VectorFieldModel,
    pub perturbation: VectorFieldModel,
    #[serde(default)]
    pub schedule: WeightSchedule,
}

impl VectorFieldSequence {
    pub fn new(limit: VectorFieldModel, perturbation: VectorFieldModel, schedule: WeightSchedule) -> Result<Self> {
        if limit.real_dim() != perturbation.real_dim() {
            return Err(CylError::Dimension { expected: limit.real_dim(), got: perturbation.real_dim() });
        }
        if let WeightSchedule::Geometric { ratio } = schedule {
            if !(ratio > 0.0 && ratio < 1.0) {
                return invalid(format!("geometric ratio {ratio} outside (0, 1)"));
            }
        }
        Ok(VectorFieldSequence { limit, perturbation, schedule })
    }

    /// The constant sequence `V_n = V`.
    pub fn constant(limit: VectorFieldModel) -> Self {
        let d = limit.real_dim();
        VectorFieldSequence { limit, perturbation: VectorFieldModel::zero(d), schedule: WeightSchedule::Constant }
    }

    pub fn weight(&self, n: usize) -> f64 {
        self.schedule.weight(n)
    }

    pub fn member(&self, n: usize) -> VectorFieldModel {
        self.limit
            .perturbed(&self.perturbation, self.weight(n))
            .expect("dimensions validated at construction")
    }

    /// Sampled `(C^0, C^1)` distances of `V_n` to the limit on the ball.
    pub fn sampled_distance(&self, n: usize, samples: usize, seed: u64) -> (f64, f64) {
        let (sv, sdv) = self.perturbation.sampled_sup(samples, seed);
        let a = self.weight(n).abs();
        (a * sv, a * sdv)
    }
}
