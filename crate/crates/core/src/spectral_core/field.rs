use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Common surface of scalar and vector spectral fields: a fixed number of
/// coefficient arrays on one grid.
pub trait Spectral: Clone + Send + Sync {
    fn grid(&self) -> &Grid;

    fn components(&self) -> Vec<&[Complex64]>;

    fn components_mut(&mut self) -> Vec<&mut [Complex64]>;

    /// Modulus of the coefficient at `idx`; Euclidean over components.
    fn mode_magnitude(&self, idx: usize) -> f64 {
        self.components()
            .iter()
            .map(|c| c[idx].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn magnitudes(&self) -> Vec<f64> {
        let comps = self.components();
        (0..self.grid().len())
            .map(|idx| comps.iter().map(|c| c[idx].norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    fn zeroed(&self) -> Self {
        let mut out = self.clone();
        for c in out.components_mut() {
            c.fill(ZERO);
        }
        out
    }

    /// Multiply mode `k` of every component by `factors[k]`.
    fn scale_modes(&mut self, factors: &[f64]) {
        for c in self.components_mut() {
            for (v, f) in c.iter_mut().zip(factors) {
                *v *= *f;
            }
        }
    }

    fn scale(&mut self, a: f64) {
        for c in self.components_mut() {
            for v in c.iter_mut() {
                *v *= a;
            }
        }
    }

    /// `self += a * other`.
    fn axpy(&mut self, a: f64, other: &Self) {
        let src = other.components();
        for (dst, s) in self.components_mut().into_iter().zip(src) {
            for (d, v) in dst.iter_mut().zip(s) {
                *d += a * v;
            }
        }
    }

    fn is_mean_free(&self) -> bool {
        self.components().iter().all(|c| c[0] == ZERO)
    }

    /// Largest `|c_{-k} - conj(c_k)|` over non-Nyquist modes.
    fn hermitian_defect(&self) -> f64 {
        let grid = self.grid();
        let mut worst: f64 = 0.0;
        for c in self.components() {
            for idx in 0..grid.len() {
                if grid.is_nyquist(idx) {
                    continue;
                }
                worst = worst.max((c[grid.partner(idx)] - c[idx].conj()).norm());
            }
        }
        worst
    }

    fn max_magnitude(&self) -> f64 {
        self.magnitudes().into_iter().fold(0.0, f64::max)
    }
}

/// Complex Fourier coefficients `c_k` of `f(x) = Σ_k c_k e^{i ξ_k·x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![ZERO; grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// A single complex exponential `c e^{i ξ_k·x}` (not real-valued).
    pub fn single_mode(grid: &Grid, kx: i64, ky: i64, c: Complex64) -> Self {
        let mut f = Self::zeros(grid);
        f.set(kx, ky, c);
        f
    }

    /// The real field `c e^{i ξ_k·x} + conj(c) e^{-i ξ_k·x}`.
    pub fn real_mode(grid: &Grid, kx: i64, ky: i64, c: Complex64) -> Self {
        let mut f = Self::zeros(grid);
        f.set(kx, ky, c);
        f.set(-kx, -ky, c.conj());
        f
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, kx: i64, ky: i64) -> Complex64 {
        self.coeffs[self.grid.index_of(kx, ky)]
    }

    pub fn set(&mut self, kx: i64, ky: i64, c: Complex64) {
        let idx = self.grid.index_of(kx, ky);
        self.coeffs[idx] = c;
    }

    /// Map every coefficient through `f(idx, c)`.
    pub fn map_modes(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| f(i, *c))
                .collect(),
        }
    }

    /// Copy onto another lattice of the same period: shared modes are kept,
    /// modes outside the target lattice are dropped.
    pub fn resample(&self, target: &Grid) -> Result<Self> {
        if target.period() != self.grid.period() {
            return Err(Error::GridMismatch);
        }
        let mut out = Self::zeros(target);
        let half = target.n_modes() as i64 / 2;
        for (idx, c) in self.coeffs.iter().enumerate() {
            let (kx, ky) = self.grid.mode(idx);
            if (-half..half).contains(&kx) && (-half..half).contains(&ky) {
                out.set(kx, ky, *c);
            }
        }
        Ok(out)
    }
}

impl Spectral for SpectralField {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn components(&self) -> Vec<&[Complex64]> {
        vec![&self.coeffs]
    }

    fn components_mut(&mut self) -> Vec<&mut [Complex64]> {
        vec![&mut self.coeffs]
    }

    fn mode_magnitude(&self, idx: usize) -> f64 {
        self.coeffs[idx].norm()
    }
}

/// Two-component vector field; both components share one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub x: SpectralField,
    pub y: SpectralField,
}

impl VectorField {
    pub fn new(x: SpectralField, y: SpectralField) -> Result<Self> {
        if x.grid() != y.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { x, y })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            x: SpectralField::zeros(grid),
            y: SpectralField::zeros(grid),
        }
    }

    /// Coefficient pair at storage index `idx`.
    pub fn at(&self, idx: usize) -> (Complex64, Complex64) {
        (self.x.coeffs[idx], self.y.coeffs[idx])
    }

    pub fn resample(&self, target: &Grid) -> Result<Self> {
        Ok(Self {
            x: self.x.resample(target)?,
            y: self.y.resample(target)?,
        })
    }
}

impl Spectral for VectorField {
    fn grid(&self) -> &Grid {
        self.x.grid()
    }

    fn components(&self) -> Vec<&[Complex64]> {
        vec![&self.x.coeffs, &self.y.coeffs]
    }

    fn components_mut(&mut self) -> Vec<&mut [Complex64]> {
        vec![&mut self.x.coeffs, &mut self.y.coeffs]
    }

    fn mode_magnitude(&self, idx: usize) -> f64 {
        (self.x.coeffs[idx].norm_sqr() + self.y.coeffs[idx].norm_sqr()).sqrt()
    }
}

/// Velocity `u` and magnetic field `b` at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePair {
    pub u: VectorField,
    pub b: VectorField,
}

impl StatePair {
    pub fn new(u: VectorField, b: VectorField) -> Result<Self> {
        if u.grid() != b.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { u, b })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            u: VectorField::zeros(grid),
            b: VectorField::zeros(grid),
        }
    }

    /// `max_k |ξ_k·ĉ(ξ_k)| / max_k |ĉ|`, worst of the two fields.
    pub fn divergence_defect(&self) -> f64 {
        let grid = self.grid();
        let mut worst: f64 = 0.0;
        for v in [&self.u, &self.b] {
            let scale = v.max_magnitude();
            if scale == 0.0 {
                continue;
            }
            for idx in 0..grid.len() {
                let (cx, cy) = v.at(idx);
                let (ax, ay) = grid.xi(idx);
                worst = worst.max((cx * ax + cy * ay).norm() / scale);
            }
        }
        worst
    }

    /// Checks the admissibility conditions required by the solvers:
    /// real-valued, mean-free and divergence-free to `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if !self.is_mean_free() {
            return Err(Error::InvalidState("zero mode must vanish".into()));
        }
        let scale = self.u.max_magnitude().max(self.b.max_magnitude());
        if self.hermitian_defect() > tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidState(
                "coefficients are not Hermitian-symmetric".into(),
            ));
        }
        let defect = self.divergence_defect();
        if defect > tol {
            return Err(Error::InvalidState(format!(
                "fields are not divergence-free (relative defect {defect:e})"
            )));
        }
        if self
            .components()
            .iter()
            .any(|c| c.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()))
        {
            return Err(Error::InvalidState("non-finite coefficient".into()));
        }
        Ok(())
    }

    pub fn resample(&self, target: &Grid) -> Result<Self> {
        Ok(Self {
            u: self.u.resample(target)?,
            b: self.b.resample(target)?,
        })
    }
}

impl Spectral for StatePair {
    fn grid(&self) -> &Grid {
        self.u.grid()
    }

    fn components(&self) -> Vec<&[Complex64]> {
        vec![
            &self.u.x.coeffs,
            &self.u.y.coeffs,
            &self.b.x.coeffs,
            &self.b.y.coeffs,
        ]
    }

    fn components_mut(&mut self) -> Vec<&mut [Complex64]> {
        vec![
            &mut self.u.x.coeffs,
            &mut self.u.y.coeffs,
            &mut self.b.x.coeffs,
            &mut self.b.y.coeffs,
        ]
    }
}
