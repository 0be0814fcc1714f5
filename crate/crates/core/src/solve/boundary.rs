//! Spectral boundary data: modes `k <= 0` prescribed on the left circle
//! `s = -r-1`, modes `k > 0` on the right circle `s = r+1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cylinder::Cylinder;
use crate::error::{CylError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// The side on which mode `k` must be prescribed.
    pub fn for_mode(k: i64) -> Side {
        if k <= 0 {
            Side::Left
        } else {
            Side::Right
        }
    }
}

/// One prescribed coefficient vector; `re` and `im` hold the `n` components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEntry {
    pub side: Side,
    pub k: i64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl BoundaryEntry {
    pub fn new(k: i64, value: &[Complex64]) -> Self {
        BoundaryEntry {
            side: Side::for_mode(k),
            k,
            re: value.iter().map(|z| z.re).collect(),
            im: value.iter().map(|z| z.im).collect(),
        }
    }

    pub fn value(&self) -> Vec<Complex64> {
        self.re.iter().zip(&self.im).map(|(a, b)| Complex64::new(*a, *b)).collect()
    }

    pub fn norm(&self) -> f64 {
        self.re.iter().chain(&self.im).map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<BoundaryEntry>", into = "Vec<BoundaryEntry>")]
pub struct SpectralBoundaryData {
    entries: Vec<BoundaryEntry>,
}

impl TryFrom<Vec<BoundaryEntry>> for SpectralBoundaryData {
    type Error = CylError;
    fn try_from(entries: Vec<BoundaryEntry>) -> Result<Self> {
        SpectralBoundaryData::new(entries)
    }
}

impl From<SpectralBoundaryData> for Vec<BoundaryEntry> {
    fn from(b: SpectralBoundaryData) -> Self {
        b.entries
    }
}

impl SpectralBoundaryData {
    /// Validates sides, component counts and uniqueness; entries are kept sorted by mode.
    pub fn new(mut entries: Vec<BoundaryEntry>) -> Result<Self> {
        let bad = |m: String| Err(CylError::InvalidBoundaryData(m));
        let dim = entries.first().map(|e| e.re.len());
        for e in &entries {
            if e.side != Side::for_mode(e.k) {
                return bad(format!("mode {} must be prescribed on the {:?} circle", e.k, Side::for_mode(e.k)));
            }
            if e.re.len() != e.im.len() || Some(e.re.len()) != dim || e.re.is_empty() {
                return bad(format!("mode {}: inconsistent component counts", e.k));
            }
            if e.re.iter().chain(&e.im).any(|x| !x.is_finite()) {
                return bad(format!("mode {}: non-finite coefficient", e.k));
            }
        }
        entries.sort_by_key(|e| e.k);
        if entries.windows(2).any(|w| w[0].k == w[1].k) {
            return bad("duplicate mode".into());
        }
        Ok(SpectralBoundaryData { entries })
    }

    pub fn empty() -> Self {
        SpectralBoundaryData::default()
    }

    /// Data from `(k, value)` pairs; the side follows from the sign of `k`.
    pub fn from_modes(modes: &[(i64, Vec<Complex64>)]) -> Result<Self> {
        Self::new(modes.iter().map(|(k, v)| BoundaryEntry::new(*k, v)).collect())
    }

    pub fn entries(&self) -> &[BoundaryEntry] {
        &self.entries
    }

    pub fn get(&self, k: i64) -> Option<&BoundaryEntry> {
        self.entries.iter().find(|e| e.k == k)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.re.iter_mut().chain(e.im.iter_mut()).for_each(|x| *x *= alpha);
        }
        out
    }

    /// `sum_k |a_k|`, an upper bound for `sup |u|` of the homogeneous solution
    /// since every mode decays away from the circle carrying its datum.
    pub fn amplitude_bound(&self) -> f64 {
        self.entries.iter().map(BoundaryEntry::norm).sum()
    }

    pub fn ball_safe(&self) -> bool {
        self.amplitude_bound() <= 1.0
    }

    pub fn check_against(&self, cyl: &Cylinder) -> Result<()> {
        for e in &self.entries {
            if cyl.mode_index(e.k).is_none() {
                return Err(CylError::Band { k: e.k, lo: cyl.k_min(), hi: cyl.k_max() });
            }
            if e.re.len() != cyl.ambient_dim() {
                return Err(CylError::Dimension { expected: cyl.ambient_dim(), got: e.re.len() });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_and_validation() {
        let json = r#"[{"side":"right","k":1,"re":[0.1,0.0],"im":[0.0,0.0]},
                       {"side":"left","k":0,"re":[0.3,0.0],"im":[0.0,0.1]}]"#;
        let b: SpectralBoundaryData = serde_json::from_str(json).unwrap();
        assert_eq!(b.entries()[0].k, 0);
        let again: SpectralBoundaryData = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        assert_eq!(again, b);
        assert!((b.amplitude_bound() - (0.1 + 0.1f64.hypot(0.3))).abs() < 1e-15);

        let wrong_side = r#"[{"side":"left","k":2,"re":[0.1],"im":[0.0]}]"#;
        assert!(serde_json::from_str::<SpectralBoundaryData>(wrong_side).is_err());
        let dup = r#"[{"side":"left","k":0,"re":[0.1],"im":[0.0]},{"side":"left","k":0,"re":[0.1],"im":[0.0]}]"#;
        assert!(serde_json::from_str::<SpectralBoundaryData>(dup).is_err());
    }

    #[test]
    fn band_and_dimension_checks() {
        let cyl = Cylinder::new(1.0, 41, 4, 1).unwrap();
        let b = SpectralBoundaryData::from_modes(&[(3, vec![Complex64::new(0.1, 0.0)])]).unwrap();
        assert!(matches!(b.check_against(&cyl), Err(CylError::Band { .. })));
        let b = SpectralBoundaryData::from_modes(&[(1, vec![Complex64::new(0.1, 0.0); 2])]).unwrap();
        assert!(matches!(b.check_against(&cyl), Err(CylError::Dimension { .. })));
    }
}
