//! Discretized finite cylinders `[-r-1, r+1] x R/Z`.
//!
//! The s-direction is a uniform grid of `S` samples including both boundary
//! circles; the t-direction is represented by `T` Fourier modes
//! `k = -T/2+1, ..., T/2`.

use serde::{Deserialize, Serialize};

use crate::error::{CylError, Result};

/// Width of the collar between the interior window `[-r, r]` and the ends.
pub const PADDING: f64 = 1.0;

/// Grid points closer than this (relative to `h`) to a window edge count as inside.
const EDGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CylinderSpec", into = "CylinderSpec")]
pub struct Cylinder {
    half_length: f64,
    s_samples: usize,
    t_modes: usize,
    ambient_dim: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct CylinderSpec {
    half_length: f64,
    s_samples: usize,
    t_modes: usize,
    ambient_dim: usize,
}

impl TryFrom<CylinderSpec> for Cylinder {
    type Error = CylError;
    fn try_from(c: CylinderSpec) -> Result<Self> {
        Cylinder::new(c.half_length, c.s_samples, c.t_modes, c.ambient_dim)
    }
}

impl From<Cylinder> for CylinderSpec {
    fn from(c: Cylinder) -> Self {
        CylinderSpec {
            half_length: c.half_length,
            s_samples: c.s_samples,
            t_modes: c.t_modes,
            ambient_dim: c.ambient_dim,
        }
    }
}

impl Cylinder {
    /// `half_length` is the `r` of `[-r-1, r+1]`, `ambient_dim` the complex
    /// dimension `n` of the target `C^n`.
    pub fn new(half_length: f64, s_samples: usize, t_modes: usize, ambient_dim: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(CylError::InvalidGrid(format!("half length must be positive, got {half_length}")));
        }
        if t_modes < 2 || t_modes % 2 != 0 {
            return Err(CylError::InvalidGrid(format!("t_modes must be even and >= 2, got {t_modes}")));
        }
        if ambient_dim == 0 {
            return Err(CylError::InvalidGrid("ambient dimension must be >= 1".into()));
        }
        if s_samples < 5 {
            return Err(CylError::InvalidGrid(format!("need at least 5 s-samples, got {s_samples}")));
        }
        let cyl = Cylinder { half_length, s_samples, t_modes, ambient_dim };
        let interior = cyl.indices_between(-half_length, half_length).len();
        if interior < 8 {
            return Err(CylError::InvalidGrid(format!(
                "interior window [-r, r] holds {interior} samples, need at least 8"
            )));
        }
        Ok(cyl)
    }

    /// Cylinder whose s-spacing is close to `1 / samples_per_unit`.
    pub fn with_density(half_length: f64, samples_per_unit: f64, t_modes: usize, ambient_dim: usize) -> Result<Self> {
        let length = 2.0 * (half_length + PADDING);
        let s_samples = (length * samples_per_unit).ceil() as usize + 1;
        Self::new(half_length, s_samples, t_modes, ambient_dim)
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn s_samples(&self) -> usize {
        self.s_samples
    }

    pub fn t_modes(&self) -> usize {
        self.t_modes
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Real dimension `2n` of the target.
    pub fn real_dim(&self) -> usize {
        2 * self.ambient_dim
    }

    pub fn s_min(&self) -> f64 {
        -self.half_length - PADDING
    }

    pub fn s_max(&self) -> f64 {
        self.half_length + PADDING
    }

    /// Grid spacing `h = (2r + 2) / (S - 1)`.
    pub fn h(&self) -> f64 {
        (self.s_max() - self.s_min()) / (self.s_samples - 1) as f64
    }

    pub fn s(&self, j: usize) -> f64 {
        self.s_min() + j as f64 * self.h()
    }

    pub fn s_grid(&self) -> Vec<f64> {
        (0..self.s_samples).map(|j| self.s(j)).collect()
    }

    /// Lowest Fourier mode, `-T/2 + 1`.
    pub fn k_min(&self) -> i64 {
        -(self.t_modes as i64) / 2 + 1
    }

    /// Highest Fourier mode, `T/2`.
    pub fn k_max(&self) -> i64 {
        self.t_modes as i64 / 2
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> + Clone {
        self.k_min()..=self.k_max()
    }

    pub fn mode_index(&self, k: i64) -> Option<usize> {
        (self.k_min()..=self.k_max()).contains(&k).then(|| (k - self.k_min()) as usize)
    }

    pub fn mode_at(&self, idx: usize) -> i64 {
        self.k_min() + idx as i64
    }

    /// Grid indices with `lo <= s_j <= hi` (edges included up to rounding).
    pub fn indices_between(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let h = self.h();
        let slack = EDGE_SLACK * h;
        let first = ((lo - slack - self.s_min()) / h).ceil().max(0.0) as usize;
        let last = ((hi + slack - self.s_min()) / h).floor();
        if last < 0.0 {
            return 0..0;
        }
        let last = (last as usize).min(self.s_samples - 1);
        if first > last {
            0..0
        } else {
            first..last + 1
        }
    }

    /// Indices of the interior window `[-r, r]` where the estimates are claimed.
    pub fn interior(&self) -> std::ops::Range<usize> {
        self.indices_between(-self.half_length, self.half_length)
    }

    pub fn same_grid(&self, other: &Cylinder) -> bool {
        self == other
    }
}

/// A sub-cylinder `[center - half_width, center + half_width] x R/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: f64,
    pub half_width: f64,
}

impl Window {
    pub fn new(center: f64, half_width: f64) -> Self {
        Window { center, half_width }
    }

    /// The window `[lo, hi]`.
    pub fn span(lo: f64, hi: f64) -> Self {
        Window { center: 0.5 * (lo + hi), half_width: 0.5 * (hi - lo) }
    }

    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }

    fn check_inside(&self, min: f64, max: f64, h: f64) -> Result<()> {
        let slack = EDGE_SLACK * h.max(1.0);
        if !(self.half_width > 0.0) || self.lo() < min - slack || self.hi() > max + slack {
            return Err(CylError::OutOfWindow { lo: self.lo(), hi: self.hi(), min, max });
        }
        Ok(())
    }

    /// Fails unless the window lies inside the whole domain `[-r-1, r+1]`.
    pub fn check_in_domain(&self, cyl: &Cylinder) -> Result<()> {
        self.check_inside(cyl.s_min(), cyl.s_max(), cyl.h())
    }

    /// Fails unless the window lies inside the interior `[-r, r]`.
    pub fn check_in_interior(&self, cyl: &Cylinder) -> Result<()> {
        self.check_inside(-cyl.half_length(), cyl.half_length(), cyl.h())
    }
}
