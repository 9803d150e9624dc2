use num_complex::Complex64;

use super::field::{Spectral, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

/// Samples `f(x_i, y_j) = Σ_k c_k e^{i ξ_k·x}` at `x_i = i L/n`, stored
/// with the same `i * n + j` layout as the coefficients.
pub fn to_physical(f: &SpectralField) -> Vec<Complex64> {
    let mut data = f.coeffs().to_vec();
    f.grid().fft2(&mut data, true);
    data
}

/// Inverse of [`to_physical`].
pub fn from_physical(grid: &Grid, samples: &[Complex64]) -> Result<SpectralField> {
    if samples.len() != grid.len() {
        return Err(Error::SizeMismatch {
            expected: grid.len(),
            found: samples.len(),
        });
    }
    let mut data = samples.to_vec();
    grid.fft2(&mut data, false);
    let norm = 1.0 / grid.len() as f64;
    for v in &mut data {
        *v *= norm;
    }
    SpectralField::from_coeffs(grid, data)
}

/// Real samples of two Hermitian fields from a single complex transform.
pub(crate) fn to_physical_real_pair(a: &SpectralField, b: &SpectralField) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let mut data: Vec<Complex64> = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x + i * y)
        .collect();
    a.grid().fft2(&mut data, true);
    (
        data.iter().map(|z| z.re).collect(),
        data.iter().map(|z| z.im).collect(),
    )
}

/// Spectra of two real sample arrays from a single complex transform.
pub(crate) fn from_physical_real_pair(
    grid: &Grid,
    p: &[f64],
    q: &[f64],
) -> (SpectralField, SpectralField) {
    let mut data: Vec<Complex64> = p
        .iter()
        .zip(q)
        .map(|(x, y)| Complex64::new(*x, *y))
        .collect();
    grid.fft2(&mut data, false);
    let norm = 1.0 / grid.len() as f64;
    let mut fp = Vec::with_capacity(grid.len());
    let mut fq = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let z = data[idx] * norm;
        let zc = data[grid.partner(idx)].conj() * norm;
        fp.push((z + zc) * 0.5);
        fq.push((z - zc) * Complex64::new(0.0, -0.5));
    }
    (
        SpectralField::from_coeffs(grid, fp).expect("sizes match"),
        SpectralField::from_coeffs(grid, fq).expect("sizes match"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_samples_complex_exponential() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let f = SpectralField::single_mode(&g, 2, -1, Complex64::new(1.0, 0.0));
        let phys = to_physical(&f);
        for i in 0..8 {
            for j in 0..8 {
                let phase = 2.0 * g.coordinate(i) - g.coordinate(j);
                let expect = Complex64::from_polar(1.0, phase);
                assert!((phys[i * 8 + j] - expect).norm() < 1e-13);
            }
        }
        let back = from_physical(&g, &phys).unwrap();
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_round_trip() {
        let g = Grid::new(8, 1.0).unwrap();
        let z = SpectralField::zeros(&g);
        let phys = to_physical(&z);
        assert!(phys.iter().all(|v| v.norm() == 0.0));
        assert_eq!(from_physical(&g, &phys).unwrap(), z);
    }

    #[test]
    fn size_mismatch() {
        let g = Grid::new(8, 1.0).unwrap();
        assert!(matches!(
            from_physical(&g, &[Complex64::new(0.0, 0.0); 10]),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn real_pair_packing_matches_separate_transforms() {
        let g = Grid::new(16, 3.0).unwrap();
        let a = SpectralField::real_mode(&g, 1, 3, Complex64::new(0.2, -0.4));
        let b = SpectralField::real_mode(&g, -2, 5, Complex64::new(-1.0, 0.1));
        let (pa, pb) = to_physical_real_pair(&a, &b);
        let sa = to_physical(&a);
        let sb = to_physical(&b);
        for idx in 0..g.len() {
            assert!((pa[idx] - sa[idx].re).abs() < 1e-13);
            assert!((pb[idx] - sb[idx].re).abs() < 1e-13);
        }
        let (fa, fb) = from_physical_real_pair(&g, &pa, &pb);
        assert!(fa
            .coeffs()
            .iter()
            .zip(a.coeffs())
            .all(|(x, y)| (x - y).norm() < 1e-14));
        assert!(fb
            .coeffs()
            .iter()
            .zip(b.coeffs())
            .all(|(x, y)| (x - y).norm() < 1e-14));
        assert!(fa.hermitian_defect() < 1e-15);
    }
}
