use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_core::{Grid, Spectral, StatePair};

/// `r^s` with the common exponents special-cased.
#[inline]
pub(crate) fn weight(r: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if s == 1.0 {
        r
    } else if s == -1.0 {
        1.0 / r
    } else if s == 2.0 {
        r * r
    } else if s == -0.5 {
        1.0 / r.sqrt()
    } else {
        r.powf(s)
    }
}

/// `Σ_{k≠0} |ξ_k|^s m_k` for precomputed per-mode magnitudes.
pub fn chi_sum(grid: &Grid, magnitudes: &[f64], s: f64) -> f64 {
    grid.xi_norm()
        .iter()
        .zip(magnitudes)
        .skip(1)
        .map(|(r, m)| if *m == 0.0 { 0.0 } else { weight(*r, s) * m })
        .sum()
}

/// Fourier-Lebesgue norm `‖f‖_{χ^s} = Σ_{k≠0} |ξ_k|^s |f̂(ξ_k)|`.
pub fn chi_norm<F: Spectral>(f: &F, s: f64) -> Result<f64> {
    if s < 0.0 && !f.is_mean_free() {
        return Err(Error::NonzeroMean { s });
    }
    Ok(chi_sum(f.grid(), &f.magnitudes(), s))
}

/// `(a^p + b^p)^{1/p}`; `p = ∞` gives the maximum.
pub fn combine_pair(a: f64, b: f64, p: f64) -> f64 {
    if p.is_infinite() {
        a.max(b)
    } else if p == 1.0 {
        a + b
    } else if p == 2.0 {
        (a * a + b * b).sqrt()
    } else {
        (a.powf(p) + b.powf(p)).powf(1.0 / p)
    }
}

/// `‖(u, b)‖_{χ^s} = (‖u‖^p_{χ^s} + ‖b‖^p_{χ^s})^{1/p}`.
pub fn pair_norm(st: &StatePair, s: f64, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "pair exponent must be positive, got {p}"
        )));
    }
    Ok(combine_pair(chi_norm(&st.u, s)?, chi_norm(&st.b, s)?, p))
}

/// `L sqrt(Σ |c_k|²)`.
pub fn l2_norm<F: Spectral>(f: &F) -> f64 {
    let sum: f64 = f
        .components()
        .iter()
        .map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>())
        .sum();
    f.grid().period() * sum.sqrt()
}

/// `L sqrt(Σ |ξ_k|² |c_k|²)`.
pub fn h1_seminorm<F: Spectral>(f: &F) -> f64 {
    let xi_sq = f.grid().xi_sq();
    let sum: f64 = f
        .components()
        .iter()
        .map(|c| {
            c.iter()
                .zip(xi_sq)
                .map(|(v, w)| w * v.norm_sqr())
                .sum::<f64>()
        })
        .sum();
    f.grid().period() * sum.sqrt()
}

/// Norms of one field at one instant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChannelNorms {
    pub chi_m1: f64,
    pub chi_mhalf: f64,
    pub chi0: f64,
    pub chi1: f64,
    pub l2: f64,
    pub h1: f64,
}

impl ChannelNorms {
    pub fn of<F: Spectral>(f: &F) -> Self {
        let grid = f.grid();
        let mags = f.magnitudes();
        let mut out = Self::default();
        let (mut l2, mut h1) = (0.0, 0.0);
        for ((r, r2), m) in grid.xi_norm().iter().zip(grid.xi_sq()).zip(&mags).skip(1) {
            if *m == 0.0 {
                continue;
            }
            out.chi_m1 += m / r;
            out.chi_mhalf += m / r.sqrt();
            out.chi0 += m;
            out.chi1 += m * r;
            l2 += m * m;
            h1 += r2 * m * m;
        }
        l2 += mags[0] * mags[0];
        out.l2 = grid.period() * l2.sqrt();
        out.h1 = grid.period() * h1.sqrt();
        out
    }

    /// The stored `χ^s` value, for `s ∈ {-1, -1/2, 0, 1}`.
    pub fn chi(&self, s: f64) -> Option<f64> {
        match s {
            x if x == -1.0 => Some(self.chi_m1),
            x if x == -0.5 => Some(self.chi_mhalf),
            x if x == 0.0 => Some(self.chi0),
            x if x == 1.0 => Some(self.chi1),
            _ => None,
        }
    }
}

/// Norms of a state pair; pair values follow `‖(u,b)‖^p = ‖u‖^p + ‖b‖^p`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub u: ChannelNorms,
    pub b: ChannelNorms,
}

impl NormReport {
    pub fn of(st: &StatePair) -> Self {
        Self {
            u: ChannelNorms::of(&st.u),
            b: ChannelNorms::of(&st.b),
        }
    }

    pub fn pair_chi(&self, s: f64, p: f64) -> Option<f64> {
        Some(combine_pair(self.u.chi(s)?, self.b.chi(s)?, p))
    }

    /// `‖(u, b)‖²_{L²}`.
    pub fn energy(&self) -> f64 {
        self.u.l2 * self.u.l2 + self.b.l2 * self.b.l2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::{SpectralField, VectorField};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(16, 2.0 * PI).unwrap()
    }

    #[test]
    fn single_mode_chi_norm() {
        let f = SpectralField::single_mode(&grid(), 2, 0, Complex64::new(0.0, 3.0));
        assert!((chi_norm(&f, -1.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn zero_field_norms_vanish() {
        let z = VectorField::zeros(&grid());
        for s in [-1.0, -0.5, 0.0, 1.0, 2.7] {
            assert_eq!(chi_norm(&z, s).unwrap(), 0.0);
        }
        assert_eq!(l2_norm(&z), 0.0);
        assert_eq!(h1_seminorm(&z), 0.0);
    }

    #[test]
    fn disjoint_modes_add() {
        let g = grid();
        let a = SpectralField::single_mode(&g, 1, 2, Complex64::new(0.5, 0.0));
        let b = SpectralField::single_mode(&g, -3, 1, Complex64::new(0.0, 2.0));
        let mut sum = a.clone();
        sum.axpy(1.0, &b);
        for s in [-1.0, 0.0, 1.0, 0.3] {
            let lhs = chi_norm(&sum, s).unwrap();
            let rhs = chi_norm(&a, s).unwrap() + chi_norm(&b, s).unwrap();
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_mean_with_negative_exponent() {
        let f = SpectralField::single_mode(&grid(), 0, 0, Complex64::new(1.0, 0.0));
        assert!(matches!(chi_norm(&f, -1.0), Err(Error::NonzeroMean { .. })));
        assert_eq!(chi_norm(&f, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn pair_conventions() {
        let g = grid();
        let u = VectorField::new(
            SpectralField::real_mode(&g, 1, 1, Complex64::new(0.3, 0.0)),
            SpectralField::real_mode(&g, 1, 1, Complex64::new(-0.3, 0.0)),
        )
        .unwrap();
        let nu = chi_norm(&u, -1.0).unwrap();
        let only_u = StatePair::new(u.clone(), VectorField::zeros(&g)).unwrap();
        for p in [1.0, 2.0, 3.5] {
            assert!((pair_norm(&only_u, -1.0, p).unwrap() - nu).abs() < 1e-15);
        }
        let same = StatePair::new(u.clone(), u).unwrap();
        assert!((pair_norm(&same, -1.0, 2.0).unwrap() - 2f64.sqrt() * nu).abs() < 1e-14);
        assert!((pair_norm(&same, -1.0, 1.0).unwrap() - 2.0 * nu).abs() < 1e-14);
        assert!(pair_norm(&same, -1.0, 0.0).is_err());
    }

    #[test]
    fn parseval_values() {
        let g = grid();
        let f = SpectralField::single_mode(&g, 1, 0, Complex64::new(1.0, 0.0));
        assert!((l2_norm(&f) - 2.0 * PI).abs() < 1e-14);
        let h = SpectralField::single_mode(&g, 0, 2, Complex64::new(0.0, 1.0));
        assert!((h1_seminorm(&h) - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn channel_norms_match_direct() {
        let g = grid();
        let f = SpectralField::real_mode(&g, 2, -3, Complex64::new(0.2, 0.9));
        let c = ChannelNorms::of(&f);
        for s in [-1.0, -0.5, 0.0, 1.0] {
            assert!((c.chi(s).unwrap() - chi_norm(&f, s).unwrap()).abs() < 1e-14);
        }
        assert!((c.l2 - l2_norm(&f)).abs() < 1e-14);
        assert!((c.h1 - h1_seminorm(&f)).abs() < 1e-13);
    }
}
