//! Fixed-step RK4 integration of `x' = V(x)`; the independent flow-line oracle.

use serde::{Deserialize, Serialize};

use super::{check_ball, VectorFieldModel, BALL_TOL};
use crate::error::{CylError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSegment {
    pub start: Vec<f64>,
    pub duration: f64,
    /// Step actually used: `duration / ceil(duration / requested_step)`.
    pub step: f64,
    /// `samples[i]` approximates the flow at time `±i * step` (sign set by the direction).
    pub samples: Vec<Vec<f64>>,
    /// Set when some sample left the closed unit ball.
    pub escaped: bool,
}

impl FlowSegment {
    pub fn end(&self) -> &[f64] {
        self.samples.last().expect("a segment holds at least its start")
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|i| i as f64 * self.step).collect()
    }
}

/// One classical RK4 step of size `h` (negative `h` integrates backwards).
pub fn rk4_step(model: &VectorFieldModel, x: &[f64], h: f64, out: &mut [f64]) {
    let d = x.len();
    let mut k1 = vec![0.0; d];
    let mut k2 = vec![0.0; d];
    let mut k3 = vec![0.0; d];
    let mut k4 = vec![0.0; d];
    let mut y = vec![0.0; d];
    model.value_into(x, &mut k1);
    for i in 0..d {
        y[i] = x[i] + 0.5 * h * k1[i];
    }
    model.value_into(&y, &mut k2);
    for i in 0..d {
        y[i] = x[i] + 0.5 * h * k2[i];
    }
    model.value_into(&y, &mut k3);
    for i in 0..d {
        y[i] = x[i] + h * k3[i];
    }
    model.value_into(&y, &mut k4);
    for i in 0..d {
        out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Forward flow over `[0, duration]` with fixed step at most `step`.
pub fn flow_ode(model: &VectorFieldModel, start: &[f64], duration: f64, step: f64) -> Result<FlowSegment> {
    flow_ode_directed(model, start, duration, step, false)
}

/// As [`flow_ode`]; with `backward` set the samples follow `x' = -V(x)`, i.e.
/// the flow at negative times.
pub fn flow_ode_directed(
    model: &VectorFieldModel,
    start: &[f64],
    duration: f64,
    step: f64,
    backward: bool,
) -> Result<FlowSegment> {
    if start.len() != model.real_dim() {
        return Err(CylError::Dimension { expected: model.real_dim(), got: start.len() });
    }
    check_ball(start)?;
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(CylError::Precondition(format!("flow duration {duration} must be a nonnegative number")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(CylError::Precondition(format!("flow step {step} must be positive")));
    }
    if duration > 0.0 && step > duration * (1.0 + 1e-12) {
        return Err(CylError::Precondition(format!("flow step {step} exceeds duration {duration}")));
    }
    let steps = if duration == 0.0 { 0 } else { (duration / step - 1e-9).ceil().max(1.0) as usize };
    let h = if steps == 0 { step } else { duration / steps as f64 };
    let signed = if backward { -h } else { h };
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(start.to_vec());
    let mut escaped = false;
    let mut next = vec![0.0; start.len()];
    for _ in 0..steps {
        rk4_step(model, samples.last().unwrap(), signed, &mut next);
        escaped |= next.iter().map(|v| v * v).sum::<f64>().sqrt() > 1.0 + BALL_TOL;
        samples.push(next.clone());
    }
    Ok(FlowSegment { start: start.to_vec(), duration, step: h, samples, escaped })
}
