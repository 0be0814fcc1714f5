//! Family schedules `(r_n, eps_n)` with `eps_n r_n -> ell`, and the choice of
//! the end-plate width `rho_n`.

use serde::{Deserialize, Serialize};

use crate::error::{CylError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub r: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySchedule {
    pub ell: f64,
    pub entries: Vec<FamilyEntry>,
}

impl FamilySchedule {
    /// `eps_n = ell / r_n`, or `eps_n = r_n^{-3/2}` when `ell = 0`.
    pub fn from_radii(ell: f64, radii: &[f64]) -> Result<Self> {
        let entries = radii
            .iter()
            .map(|&r| FamilyEntry { r, eps: if ell > 0.0 { ell / r } else { r.powf(-1.5) } })
            .collect();
        let s = FamilySchedule { ell, entries };
        s.validate()?;
        Ok(s)
    }

    /// `r_n = r_0 2^n`, `n = 0..count`.
    pub fn doubling(ell: f64, r0: f64, count: usize) -> Result<Self> {
        let radii: Vec<f64> = (0..count).map(|n| r0 * 2f64.powi(n as i32)).collect();
        Self::from_radii(ell, &radii)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CylError::Precondition(m));
        if !(self.ell >= 0.0 && self.ell.is_finite()) {
            return bad(format!("ell = {} must be a nonnegative number", self.ell));
        }
        if self.entries.is_empty() {
            return bad("empty schedule".into());
        }
        for e in &self.entries {
            if !(e.r >= 2.0 && e.r.is_finite()) || !(e.eps >= 0.0 && e.eps.is_finite()) {
                return bad(format!("invalid entry r = {}, eps = {}", e.r, e.eps));
            }
        }
        for w in self.entries.windows(2) {
            if !(w[1].eps < w[0].eps) || !(w[1].r > w[0].r) {
                return bad("eps_n must decrease strictly and r_n increase strictly".into());
            }
        }
        Ok(())
    }
}

/// Largest integer `k` with `eps k <= sqrt(eps)`, `d(k) <= 1/k` and `k < r`.
/// `d[k - 1]` holds `d(k)`; values of `k` beyond the profile do not qualify.
pub fn select_rho(eps: f64, r: f64, d: &[f64]) -> Result<usize> {
    let cap = if eps > 0.0 { eps.sqrt() / eps } else { f64::INFINITY };
    let ok = |k: usize| {
        let kf = k as f64;
        kf <= cap * (1.0 + 1e-12) && d[k - 1] <= 1.0 / kf && kf < r
    };
    (1..=d.len())
        .rev()
        .find(|&k| ok(k))
        .ok_or_else(|| CylError::Inapplicable(format!("no admissible rho for eps = {eps}, r = {r}")))
}
