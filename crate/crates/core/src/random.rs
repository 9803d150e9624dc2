//! Seeded random spectral fields with power-law amplitude decay.
//!
//! Every mode draws its phase from a generator keyed by `(seed, component,
//! k)`, so refining the lattice adds modes without changing the shared ones.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_core::{leray_project, Grid, SpectralField, StatePair, VectorField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomFieldSpec {
    pub seed: u64,
    /// Decay exponent: `|c_k| = A |k|^{-β}`.
    pub beta: f64,
    pub amplitude: f64,
    pub divergence_free: bool,
    pub n_modes: usize,
    pub period: f64,
    /// Optional band limit `|k|_∞ <= K` on integer wavenumbers.
    pub max_wavenumber: Option<i64>,
    /// Optional radial support `r_lo <= |k| <= r_hi` on integer wavenumbers.
    #[serde(default)]
    pub annulus: Option<(f64, f64)>,
}

impl RandomFieldSpec {
    pub fn new(seed: u64, n_modes: usize) -> Self {
        Self {
            seed,
            beta: 3.0,
            amplitude: 1.0,
            divergence_free: true,
            n_modes,
            period: 2.0 * std::f64::consts::PI,
            max_wavenumber: None,
            annulus: None,
        }
    }

    pub fn beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn divergence_free(mut self, yes: bool) -> Self {
        self.divergence_free = yes;
        self
    }

    pub fn band_limit(mut self, k: i64) -> Self {
        self.max_wavenumber = Some(k);
        self
    }

    pub fn annulus(mut self, r_lo: f64, r_hi: f64) -> Self {
        self.annulus = Some((r_lo, r_hi));
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n_modes, self.period)
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "decay exponent must exceed 1, got {}",
                self.beta
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidParameter("amplitude must be finite".into()));
        }
        Ok(())
    }
}

fn mode_rng(seed: u64, component: u64, kx: i64, ky: i64) -> ChaCha8Rng {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for v in [component, kx as u64, ky as u64] {
        h = splitmix(h ^ v.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    }
    ChaCha8Rng::seed_from_u64(h)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn component_field(spec: &RandomFieldSpec, grid: &Grid, component: u64) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    for idx in 1..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let (kx, ky) = grid.mode(idx);
        // one representative per {k, -k}
        if !(kx > 0 || (kx == 0 && ky > 0)) {
            continue;
        }
        if let Some(limit) = spec.max_wavenumber {
            if kx.abs() > limit || ky.abs() > limit {
                continue;
            }
        }
        let k = ((kx * kx + ky * ky) as f64).sqrt();
        if let Some((lo, hi)) = spec.annulus {
            if k < lo || k > hi {
                continue;
            }
        }
        let theta = mode_rng(spec.seed, component, kx, ky).gen::<f64>() * std::f64::consts::TAU;
        let c = Complex64::from_polar(spec.amplitude * k.powf(-spec.beta), theta);
        f.set(kx, ky, c);
        f.set(-kx, -ky, c.conj());
    }
    f
}

/// Real, mean-free scalar field `A |k|^{-β} e^{iθ_k}`.
pub fn random_scalar(spec: &RandomFieldSpec) -> Result<SpectralField> {
    spec.validate()?;
    let grid = spec.grid()?;
    Ok(component_field(spec, &grid, 0))
}

/// Vector field with independent components; Leray-projected when
/// `divergence_free` is set.
pub fn random_vector(spec: &RandomFieldSpec) -> Result<VectorField> {
    spec.validate()?;
    let grid = spec.grid()?;
    let v = VectorField::new(
        component_field(spec, &grid, 1),
        component_field(spec, &grid, 2),
    )?;
    Ok(if spec.divergence_free {
        leray_project(&v)
    } else {
        v
    })
}

/// Admissible state whose velocity uses `spec.seed` and whose magnetic field
/// uses the next seed.
pub fn random_state(spec: &RandomFieldSpec) -> Result<StatePair> {
    let spec = RandomFieldSpec {
        divergence_free: true,
        ..spec.clone()
    };
    let u = random_vector(&spec)?;
    let b = random_vector(&spec.clone().seed(spec.seed.wrapping_add(0x5EED_0000_0001)))?;
    StatePair::new(u, b)
}
