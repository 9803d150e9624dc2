//! Closed-form initial data.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral_core::{Grid, SpectralField, StatePair, VectorField};

/// `A (sin x cos y, -cos x sin y)` on the lowest lattice shell, with
/// `x, y` scaled by `2π/L`.
pub fn taylor_green(grid: &Grid, amplitude: f64) -> VectorField {
    let q = Complex64::new(0.0, 0.25 * amplitude);
    let mut x = SpectralField::zeros(grid);
    let mut y = SpectralField::zeros(grid);
    for (kx, ky, sx, sy) in [
        (1, 1, -1.0, 1.0),
        (1, -1, -1.0, -1.0),
        (-1, 1, 1.0, 1.0),
        (-1, -1, 1.0, -1.0),
    ] {
        x.set(kx, ky, q * sx);
        y.set(kx, ky, q * sy);
    }
    VectorField { x, y }
}

/// Divergence-free shear `A (sin(k y), 0)`.
pub fn shear(grid: &Grid, k: i64, amplitude: f64) -> VectorField {
    let q = Complex64::new(0.0, 0.5 * amplitude);
    let mut x = SpectralField::zeros(grid);
    x.set(0, k, -q);
    x.set(0, -k, q);
    VectorField {
        x,
        y: SpectralField::zeros(grid),
    }
}

/// Taylor-Green velocity with a shear magnetic field, a smooth state with a
/// nontrivial nonlinearity.
pub fn taylor_green_sheared(grid: &Grid, u_amp: f64, b_amp: f64) -> Result<StatePair> {
    StatePair::new(taylor_green(grid, u_amp), shear(grid, 2, b_amp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::{from_physical, to_physical, Spectral};
    use std::f64::consts::PI;

    #[test]
    fn taylor_green_samples_match_formula() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let tg = taylor_green(&g, 1.5);
        let (px, py) = (to_physical(&tg.x), to_physical(&tg.y));
        for ix in 0..16 {
            for iy in 0..16 {
                let (x, y) = (g.coordinate(ix), g.coordinate(iy));
                let p = ix * 16 + iy;
                assert!((px[p].re - 1.5 * x.sin() * y.cos()).abs() < 1e-14);
                assert!((py[p].re + 1.5 * x.cos() * y.sin()).abs() < 1e-14);
                assert!(px[p].im.abs() < 1e-15);
            }
        }
        let back = from_physical(&g, &px).unwrap();
        assert!((back.get(1, 1) - tg.x.get(1, 1)).norm() < 1e-15);
    }

    #[test]
    fn shear_is_admissible() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let s = taylor_green_sheared(&g, 1.0, 0.5).unwrap();
        s.validate(1e-14).unwrap();
        assert!(s.b.hermitian_defect() == 0.0);
    }
}
