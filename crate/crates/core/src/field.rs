//! Spectral fields `u : [-r-1, r+1] x R/Z -> C^n`.
//!
//! A field stores, for every s-sample, the Fourier coefficients `u_k(s)` of
//! `t -> u(s, t) = sum_k u_k(s) e^{2 pi i k t}` for each of the `n` complex
//! components. `R^{2n}` is identified with `C^n` componentwise, so `J_0` is
//! multiplication by `i`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};

use crate::cylinder::Cylinder;
use crate::error::{CylError, Result};
use crate::stencil;

const TWO_PI: f64 = std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    cyl: Cylinder,
    coeffs: Vec<Complex64>,
    /// Set when the field is required to map into the closed unit ball.
    pub ball_constrained: bool,
}

impl SpectralField {
    pub fn zeros(cyl: Cylinder) -> Self {
        let len = cyl.s_samples() * cyl.t_modes() * cyl.ambient_dim();
        SpectralField { cyl, coeffs: vec![Complex64::new(0.0, 0.0); len], ball_constrained: false }
    }

    /// Builds a field from its coefficients `f(s, k, component)`.
    pub fn from_modes(cyl: Cylinder, mut f: impl FnMut(f64, i64, usize) -> Complex64) -> Self {
        let mut out = Self::zeros(cyl);
        for j in 0..cyl.s_samples() {
            let s = cyl.s(j);
            for k in cyl.modes() {
                for c in 0..cyl.ambient_dim() {
                    *out.coeff_mut(j, k, c) = f(s, k, c);
                }
            }
        }
        out
    }

    /// Wraps a raw coefficient vector laid out as `[s][mode][component]`.
    pub fn from_raw(cyl: Cylinder, coeffs: Vec<Complex64>) -> Result<Self> {
        let len = cyl.s_samples() * cyl.t_modes() * cyl.ambient_dim();
        if coeffs.len() != len {
            return Err(CylError::Dimension { expected: len, got: coeffs.len() });
        }
        Ok(SpectralField { cyl, coeffs, ball_constrained: false })
    }

    pub fn cylinder(&self) -> &Cylinder {
        &self.cyl
    }

    pub fn raw(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn raw_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    fn slice_len(&self) -> usize {
        self.cyl.t_modes() * self.cyl.ambient_dim()
    }

    fn index(&self, j: usize, k: i64, c: usize) -> usize {
        let m = self.cyl.mode_index(k).expect("mode outside band");
        (j * self.cyl.t_modes() + m) * self.cyl.ambient_dim() + c
    }

    pub fn coeff(&self, j: usize, k: i64, c: usize) -> Complex64 {
        self.coeffs[self.index(j, k, c)]
    }

    pub fn coeff_mut(&mut self, j: usize, k: i64, c: usize) -> &mut Complex64 {
        let i = self.index(j, k, c);
        &mut self.coeffs[i]
    }

    /// All coefficients at s-sample `j`, laid out `[mode][component]`.
    pub fn slice(&self, j: usize) -> &[Complex64] {
        let n = self.slice_len();
        &self.coeffs[j * n..(j + 1) * n]
    }

    pub fn slice_mut(&mut self, j: usize) -> &mut [Complex64] {
        let n = self.slice_len();
        &mut self.coeffs[j * n..(j + 1) * n]
    }

    /// The loop `t -> u(s_j, t)` as a standalone Fourier loop.
    pub fn circle(&self, j: usize) -> FourierLoop {
        FourierLoop {
            t_modes: self.cyl.t_modes(),
            dim: self.cyl.ambient_dim(),
            coeffs: self.slice(j).to_vec(),
        }
    }

    /// The s-profile of mode `k`, component `c`.
    pub fn profile(&self, k: i64, c: usize) -> Vec<Complex64> {
        (0..self.cyl.s_samples()).map(|j| self.coeff(j, k, c)).collect()
    }

    pub fn set_profile(&mut self, k: i64, c: usize, values: &[Complex64]) {
        for (j, v) in values.iter().enumerate() {
            *self.coeff_mut(j, k, c) = *v;
        }
    }

    fn check_same(&self, other: &SpectralField) -> Result<()> {
        if self.cyl.same_grid(&other.cyl) {
            Ok(())
        } else {
            Err(CylError::GridMismatch)
        }
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &SpectralField) -> Result<SpectralField> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b * alpha).collect();
        Ok(SpectralField { cyl: self.cyl, coeffs, ball_constrained: false })
    }

    pub fn scaled(&self, alpha: f64) -> SpectralField {
        SpectralField {
            cyl: self.cyl,
            coeffs: self.coeffs.iter().map(|a| a * alpha).collect(),
            ball_constrained: false,
        }
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Field with every mode except `k = 0` removed (the center of mass as a field).
    pub fn zero_mode_part(&self) -> SpectralField {
        let mut out = SpectralField::zeros(self.cyl);
        for j in 0..self.cyl.s_samples() {
            for c in 0..self.cyl.ambient_dim() {
                *out.coeff_mut(j, 0, c) = self.coeff(j, 0, c);
            }
        }
        out
    }

    /// `u - q`: the field with its zero mode removed.
    pub fn oscillating_part(&self) -> SpectralField {
        let mut out = self.clone();
        out.ball_constrained = false;
        for j in 0..self.cyl.s_samples() {
            for c in 0..self.cyl.ambient_dim() {
                *out.coeff_mut(j, 0, c) = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    fn map_profiles(&self, f: impl Fn(&[Complex64]) -> Vec<Complex64>) -> SpectralField {
        let mut out = SpectralField::zeros(self.cyl);
        for k in self.cyl.modes() {
            for c in 0..self.cyl.ambient_dim() {
                let p = f(&self.profile(k, c));
                out.set_profile(k, c, &p);
            }
        }
        out
    }

    /// `d/ds` by the fourth-order stencil, applied mode by mode.
    pub fn ds(&self) -> SpectralField {
        let h = self.cyl.h();
        self.map_profiles(|p| stencil::first_derivative(p, h))
    }

    /// `d^2/ds^2` by the fourth-order 5-point stencil.
    pub fn dss(&self) -> SpectralField {
        let h = self.cyl.h();
        self.map_profiles(|p| stencil::second_derivative(p, h))
    }

    /// `(d/ds)^a` by repeated application of the first-derivative stencil.
    pub fn ds_pow(&self, a: usize) -> SpectralField {
        let mut out = self.clone();
        out.ball_constrained = false;
        for _ in 0..a {
            out = out.ds();
        }
        out
    }

    /// `(d/dt)^b`, exact: mode `k` is multiplied by `(2 pi i k)^b`.
    pub fn dt_pow(&self, b: usize) -> SpectralField {
        let mut out = self.clone();
        out.ball_constrained = false;
        for j in 0..self.cyl.s_samples() {
            for k in self.cyl.modes() {
                let factor = Complex64::new(0.0, TWO_PI * k as f64).powu(b as u32);
                for c in 0..self.cyl.ambient_dim() {
                    *out.coeff_mut(j, k, c) *= factor;
                }
            }
        }
        out
    }

    pub fn dt(&self) -> SpectralField {
        self.dt_pow(1)
    }

    /// `sum_k |u_k(s_j)|^2 = int |u(s_j, t)|^2 dt` for each sample (Parseval).
    pub fn circle_energy(&self) -> Vec<f64> {
        (0..self.cyl.s_samples()).map(|j| self.slice(j).iter().map(|z| z.norm_sqr()).sum()).collect()
    }

    /// Coefficients at an arbitrary `s` by four-point interpolation in s.
    pub fn coeffs_at(&self, s: f64) -> Vec<Complex64> {
        let (base, weights) = stencil::lagrange_weights(self.cyl.s_samples(), (s - self.cyl.s_min()) / self.cyl.h());
        let mut out = vec![Complex64::new(0.0, 0.0); self.slice_len()];
        for (m, w) in weights.iter().enumerate() {
            for (o, z) in out.iter_mut().zip(self.slice(base + m)) {
                *o += z * *w;
            }
        }
        out
    }

    /// Point value `u(s, t)` in `C^n`.
    pub fn eval(&self, s: f64, t: f64) -> Vec<Complex64> {
        let coeffs = self.coeffs_at(s);
        let n = self.cyl.ambient_dim();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (m, k) in self.cyl.modes().enumerate() {
            let phase = Complex64::from_polar(1.0, TWO_PI * k as f64 * t);
            for c in 0..n {
                out[c] += coeffs[m * n + c] * phase;
            }
        }
        out
    }

    /// Sup of `|u(s_j, t)|` over samples `j` in `range` and `t` on an `m`-point grid.
    pub fn sup_abs(&self, range: std::ops::Range<usize>, m: usize) -> f64 {
        let grid = PhysicalGrid::new(&self.cyl, m);
        let n = self.cyl.ambient_dim();
        range
            .map(|j| {
                let phys = grid.synthesize(self.slice(j));
                phys.chunks(n).map(|p| norm_c(p)).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Random field with smooth s-dependence, used for probe corpora and tests.
    ///
    /// Mode `k` with `|k| <= max_mode` gets a profile that is a sum of
    /// `s_waves` random cosines/sines of wavelength at least the domain length.
    pub fn random_smooth(cyl: Cylinder, seed: u64, max_mode: i64, s_waves: usize, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = cyl.s_max() - cyl.s_min();
        let mut out = SpectralField::zeros(cyl);
        for k in cyl.modes().filter(|k| k.abs() <= max_mode) {
            for c in 0..cyl.ambient_dim() {
                let waves: Vec<(Complex64, f64, f64)> = (0..s_waves)
                    .map(|w| {
                        let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                        let freq = std::f64::consts::PI * w as f64 / len;
                        let phase = rng.random_range(0.0..TWO_PI);
                        (a, freq, phase)
                    })
                    .collect();
                let prof: Vec<Complex64> = (0..cyl.s_samples())
                    .map(|j| {
                        let s = cyl.s(j) - cyl.s_min();
                        waves.iter().map(|(a, f, p)| a * (f * s + p).cos()).sum::<Complex64>() * amplitude
                    })
                    .collect();
                out.set_profile(k, c, &prof);
            }
        }
        out
    }
}

/// Euclidean norm of a point of `C^n = R^{2n}`.
pub fn norm_c(p: &[Complex64]) -> f64 {
    p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `C^n -> R^{2n}`: component `c` becomes real coordinates `2c, 2c + 1`.
pub fn to_real(p: &[Complex64], out: &mut [f64]) {
    for (c, z) in p.iter().enumerate() {
        out[2 * c] = z.re;
        out[2 * c + 1] = z.im;
    }
}

pub fn from_real(x: &[f64], out: &mut [Complex64]) {
    for (c, z) in out.iter_mut().enumerate() {
        *z = Complex64::new(x[2 * c], x[2 * c + 1]);
    }
}

/// A loop `R/Z -> C^n` given by `T` Fourier coefficients per component.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierLoop {
    pub t_modes: usize,
    pub dim: usize,
    /// Laid out `[mode][component]`, modes `-T/2+1 ..= T/2`.
    pub coeffs: Vec<Complex64>,
}

impl FourierLoop {
    pub fn zeros(t_modes: usize, dim: usize) -> Self {
        FourierLoop { t_modes, dim, coeffs: vec![Complex64::new(0.0, 0.0); t_modes * dim] }
    }

    /// Loop with a single component and the given `(k, coefficient)` modes.
    pub fn from_modes(t_modes: usize, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut out = Self::zeros(t_modes, 1);
        for &(k, a) in modes {
            let idx = out.mode_index(k)?;
            out.coeffs[idx] += a;
        }
        Ok(out)
    }

    pub fn k_min(&self) -> i64 {
        -(self.t_modes as i64) / 2 + 1
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        self.k_min()..=self.t_modes as i64 / 2
    }

    fn mode_index(&self, k: i64) -> Result<usize> {
        let hi = self.t_modes as i64 / 2;
        if k < self.k_min() || k > hi {
            return Err(CylError::Band { k, lo: self.k_min(), hi });
        }
        Ok((k - self.k_min()) as usize * self.dim)
    }

    pub fn mode(&self, k: i64) -> &[Complex64] {
        let i = self.mode_index(k).expect("mode outside band");
        &self.coeffs[i..i + self.dim]
    }
}

/// Uniform grid of `m` points on `R/Z` with FFT plans for synthesis and analysis
/// of band-limited loops.
pub struct PhysicalGrid {
    m: usize,
    t_modes: usize,
    dim: usize,
    k_min: i64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl PhysicalGrid {
    /// `m` must be at least `T`; the pseudo-spectral products use `m = 2T`.
    pub fn new(cyl: &Cylinder, m: usize) -> Self {
        Self::for_band(cyl.t_modes(), cyl.ambient_dim(), m)
    }

    pub fn for_band(t_modes: usize, dim: usize, m: usize) -> Self {
        assert!(m >= t_modes, "physical grid of {m} points cannot hold {t_modes} modes");
        let mut planner = FftPlanner::new();
        PhysicalGrid {
            m,
            t_modes,
            dim,
            k_min: -(t_modes as i64) / 2 + 1,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        }
    }

    pub fn points(&self) -> usize {
        self.m
    }

    fn bin(&self, k: i64) -> usize {
        k.rem_euclid(self.m as i64) as usize
    }

    /// Band coefficients `[mode][component]` to physical values `[point][component]`.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.m * self.dim];
        let mut buf = vec![Complex64::new(0.0, 0.0); self.m];
        for c in 0..self.dim {
            buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for mi in 0..self.t_modes {
                let k = self.k_min + mi as i64;
                buf[self.bin(k)] = coeffs[mi * self.dim + c];
            }
            self.inv.process(&mut buf);
            for (p, z) in buf.iter().enumerate() {
                out[p * self.dim + c] = *z;
            }
        }
        out
    }

    /// Physical values `[point][component]` to band coefficients; modes outside
    /// the band are discarded (dealiasing truncation).
    pub fn analyze(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.t_modes * self.dim];
        let mut buf = vec![Complex64::new(0.0, 0.0); self.m];
        let scale = 1.0 / self.m as f64;
        for c in 0..self.dim {
            for p in 0..self.m {
                buf[p] = values[p * self.dim + c];
            }
            self.fwd.process(&mut buf);
            for mi in 0..self.t_modes {
                let k = self.k_min + mi as i64;
                out[mi * self.dim + c] = buf[self.bin(k)] * scale;
            }
        }
        out
    }
}
