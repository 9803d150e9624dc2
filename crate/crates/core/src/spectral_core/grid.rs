use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Square periodic lattice of Fourier modes on the torus `[0, L)^2`.
///
/// Coefficients are stored row-major with the x wavenumber as the slow
/// index: `idx = ix * n + iy`, where storage index `i` maps to the integer
/// wavenumber `i` for `i < n/2` and `i - n` otherwise.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridData>,
}

struct GridData {
    n: usize,
    period: f64,
    xi_x: Vec<f64>,
    xi_y: Vec<f64>,
    xi_sq: Vec<f64>,
    xi_norm: Vec<f64>,
    retained: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(n_modes: usize, period: f64) -> Result<Self> {
        if n_modes < 8 || !n_modes.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_modes must be even and >= 8, got {n_modes}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period must be positive, got {period}"
            )));
        }
        let n = n_modes;
        let scale = 2.0 * std::f64::consts::PI / period;
        let len = n * n;
        let mut xi_x = Vec::with_capacity(len);
        let mut xi_y = Vec::with_capacity(len);
        let mut retained = Vec::with_capacity(len);
        for ix in 0..n {
            let kx = wavenumber(ix, n);
            for iy in 0..n {
                let ky = wavenumber(iy, n);
                xi_x.push(scale * kx as f64);
                xi_y.push(scale * ky as f64);
                retained.push(3 * kx.unsigned_abs() < n as u64 && 3 * ky.unsigned_abs() < n as u64);
            }
        }
        let xi_sq: Vec<f64> = xi_x.iter().zip(&xi_y).map(|(a, b)| a * a + b * b).collect();
        let xi_norm = xi_sq.iter().map(|v| v.sqrt()).collect();

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridData {
                n,
                period,
                xi_x,
                xi_y,
                xi_sq,
                xi_norm,
                retained,
                forward,
                inverse,
            }),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.inner.n
    }

    pub fn period(&self) -> f64 {
        self.inner.period
    }

    /// Number of lattice points, `n_modes^2`.
    pub fn len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `2π / L`, the spacing of the frequency lattice.
    pub fn wavenumber_scale(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.inner.period
    }

    /// Integer wavenumber pair of a storage index.
    pub fn mode(&self, idx: usize) -> (i64, i64) {
        let n = self.inner.n;
        (wavenumber(idx / n, n), wavenumber(idx % n, n))
    }

    /// Storage index of an integer wavenumber pair (taken modulo `n`).
    pub fn index_of(&self, kx: i64, ky: i64) -> usize {
        let n = self.inner.n as i64;
        let ix = kx.rem_euclid(n) as usize;
        let iy = ky.rem_euclid(n) as usize;
        ix * self.inner.n + iy
    }

    /// Storage index of `-k`.
    pub fn partner(&self, idx: usize) -> usize {
        let n = self.inner.n;
        let (ix, iy) = (idx / n, idx % n);
        ((n - ix) % n) * n + (n - iy) % n
    }

    /// True for modes with a component equal to `-n/2`; they have no
    /// distinct Hermitian partner.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let n = self.inner.n;
        idx / n == n / 2 || idx % n == n / 2
    }

    pub fn xi(&self, idx: usize) -> (f64, f64) {
        (self.inner.xi_x[idx], self.inner.xi_y[idx])
    }

    pub fn xi_x(&self) -> &[f64] {
        &self.inner.xi_x
    }

    pub fn xi_y(&self) -> &[f64] {
        &self.inner.xi_y
    }

    /// `|ξ_k|^2` per storage index.
    pub fn xi_sq(&self) -> &[f64] {
        &self.inner.xi_sq
    }

    /// `|ξ_k|` per storage index.
    pub fn xi_norm(&self) -> &[f64] {
        &self.inner.xi_norm
    }

    /// Modes kept by the 2/3 rule: every component satisfies `3|k_i| < n`.
    pub fn retained(&self) -> &[bool] {
        &self.inner.retained
    }

    /// Largest |ξ| among retained modes.
    pub fn max_retained_xi(&self) -> f64 {
        self.inner
            .xi_norm
            .iter()
            .zip(&self.inner.retained)
            .filter(|(_, &r)| r)
            .map(|(v, _)| *v)
            .fold(0.0, f64::max)
    }

    /// Physical sample coordinate `x_j = j L / n`.
    pub fn coordinate(&self, j: usize) -> f64 {
        j as f64 * self.inner.period / self.inner.n as f64
    }

    /// In-place unnormalized 2D DFT. `inverse = true` evaluates
    /// `Σ_k c_k e^{+i ξ_k·x}` on the sample grid.
    pub(crate) fn fft2(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.inner.n;
        debug_assert_eq!(data.len(), n * n);
        let plan = if inverse {
            &self.inner.inverse
        } else {
            &self.inner.forward
        };
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, n);
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, n);
    }
}

fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.period == other.inner.period)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_modes", &self.inner.n)
            .field("period", &self.inner.period)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid::new(6, 1.0).is_err());
        assert!(Grid::new(9, 1.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, -1.0).is_err());
        assert!(Grid::new(8, 1.0).is_ok());
    }

    #[test]
    fn wavenumber_layout() {
        let g = Grid::new(8, 2.0 * std::f64::consts::PI).unwrap();
        assert_eq!(g.mode(0), (0, 0));
        assert_eq!(g.mode(g.index_of(-1, 3)), (-1, 3));
        assert_eq!(g.mode(g.index_of(-4, -4)), (-4, -4));
        let idx = g.index_of(2, -3);
        assert_eq!(g.mode(g.partner(idx)), (-2, 3));
        assert!((g.xi_norm()[g.index_of(3, 4)] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn nonzero_modes_have_positive_frequency() {
        let g = Grid::new(16, 3.0).unwrap();
        for idx in 1..g.len() {
            assert!(g.xi_norm()[idx] > 0.0);
        }
    }

    #[test]
    fn two_thirds_mask() {
        let g = Grid::new(16, 1.0).unwrap();
        assert!(g.retained()[g.index_of(5, -5)]);
        assert!(!g.retained()[g.index_of(6, 0)]);
        assert!(!g.retained()[g.index_of(0, -6)]);
    }
}
