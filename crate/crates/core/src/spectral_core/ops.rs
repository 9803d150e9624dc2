use num_complex::Complex64;

use super::field::{Spectral, SpectralField, StatePair, VectorField};
use super::transform::{from_physical_real_pair, to_physical_real_pair};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sign pattern of the quadratic terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coupling {
    /// The MHD right-hand side:
    /// `(-ℙ∇·(u⊗u) + ℙ∇·(b⊗b), -∇·(u⊗b) + ∇·(b⊗u))`.
    Mhd,
    /// All signs positive:
    /// `(ℙ∇·(u⊗u + b⊗b), ∇·(u⊗b + b⊗u))`.
    Symmetric,
}

/// Applies `I - ξξᵀ/|ξ|²` per mode and clears the zero mode.
pub fn leray_project(v: &VectorField) -> VectorField {
    let mut out = v.clone();
    project_in_place(&mut out);
    out
}

fn project_in_place(v: &mut VectorField) {
    let grid = v.grid().clone();
    let (xi_x, xi_y, xi_sq) = (grid.xi_x(), grid.xi_y(), grid.xi_sq());
    let VectorField { x, y } = v;
    let (px, py) = (x.coeffs_mut(), y.coeffs_mut());
    px[0] = ZERO;
    py[0] = ZERO;
    for idx in 1..grid.len() {
        let dot = (px[idx] * xi_x[idx] + py[idx] * xi_y[idx]) / xi_sq[idx];
        px[idx] -= dot * xi_x[idx];
        py[idx] -= dot * xi_y[idx];
    }
}

/// `i ξ_k · v̂(ξ_k)` per mode.
pub fn divergence(v: &VectorField) -> SpectralField {
    let grid = v.grid();
    let (xi_x, xi_y) = (grid.xi_x(), grid.xi_y());
    v.x.map_modes(|idx, cx| I * (cx * xi_x[idx] + v.y.coeffs()[idx] * xi_y[idx]))
}

/// `i ξ_k f̂(ξ_k)` per mode.
pub fn gradient(f: &SpectralField) -> VectorField {
    let grid = f.grid();
    let (xi_x, xi_y) = (grid.xi_x(), grid.xi_y());
    VectorField {
        x: f.map_modes(|idx, c| I * c * xi_x[idx]),
        y: f.map_modes(|idx, c| I * c * xi_y[idx]),
    }
}

/// Zeros every mode outside the 2/3-rule set.
pub fn dealias<F: Spectral>(f: &F) -> F {
    let mut out = f.clone();
    let retained = f.grid().retained().to_vec();
    for c in out.components_mut() {
        for (v, keep) in c.iter_mut().zip(&retained) {
            if !keep {
                *v = ZERO;
            }
        }
    }
    out
}

/// Real `L²` inner product `L² Σ_k Re(f̂_k conj(ĝ_k))`, summed over components.
pub fn inner_product<F: Spectral>(f: &F, g: &F) -> f64 {
    let area = f.grid().period() * f.grid().period();
    let sum: f64 = f
        .components()
        .iter()
        .zip(g.components())
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>())
        .sum();
    area * sum
}

/// The MHD nonlinearity `(N_u, N_b)` of a divergence-free state.
pub fn nonlinear_rhs(s: &StatePair) -> Result<(VectorField, VectorField)> {
    quadratic_terms(s, Coupling::Mhd)
}

/// Pseudo-spectral evaluation of the quadratic terms with the 2/3 rule:
/// inputs are truncated to the retained set, products are formed on the
/// sample grid (alias-free on retained modes), and outputs are truncated.
pub fn quadratic_terms(s: &StatePair, coupling: Coupling) -> Result<(VectorField, VectorField)> {
    if s.u.grid() != s.b.grid() || s.u.x.grid() != s.u.y.grid() || s.b.x.grid() != s.b.y.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = s.grid().clone();
    let u = dealias(&s.u);
    let b = dealias(&s.b);
    let (ux, uy) = to_physical_real_pair(&u.x, &u.y);
    let (bx, by) = to_physical_real_pair(&b.x, &b.y);
    let len = grid.len();
    let (xi_x, xi_y) = (grid.xi_x(), grid.xi_y());

    let (flux_u, flux_b) = match coupling {
        Coupling::Mhd => {
            let mut txx = vec![0.0; len];
            let mut txy = vec![0.0; len];
            let mut tyy = vec![0.0; len];
            let mut e = vec![0.0; len];
            for p in 0..len {
                txx[p] = ux[p] * ux[p] - bx[p] * bx[p];
                txy[p] = ux[p] * uy[p] - bx[p] * by[p];
                tyy[p] = uy[p] * uy[p] - by[p] * by[p];
                e[p] = ux[p] * by[p] - bx[p] * uy[p];
            }
            let (txx, txy) = from_physical_real_pair(&grid, &txx, &txy);
            let (tyy, e) = from_physical_real_pair(&grid, &tyy, &e);
            // N_u = -ℙ ∂_i T_ij ; N_b = (∂_y E, -∂_x E)
            let fu = VectorField {
                x: txx.map_modes(|k, c| -I * (c * xi_x[k] + txy.coeffs()[k] * xi_y[k])),
                y: txy.map_modes(|k, c| -I * (c * xi_x[k] + tyy.coeffs()[k] * xi_y[k])),
            };
            let fb = VectorField {
                x: e.map_modes(|k, c| I * c * xi_y[k]),
                y: e.map_modes(|k, c| -I * c * xi_x[k]),
            };
            (fu, fb)
        }
        Coupling::Symmetric => {
            let mut sxx = vec![0.0; len];
            let mut sxy = vec![0.0; len];
            let mut syy = vec![0.0; len];
            let mut qxx = vec![0.0; len];
            let mut qxy = vec![0.0; len];
            let mut qyy = vec![0.0; len];
            for p in 0..len {
                sxx[p] = ux[p] * ux[p] + bx[p] * bx[p];
                sxy[p] = ux[p] * uy[p] + bx[p] * by[p];
                syy[p] = uy[p] * uy[p] + by[p] * by[p];
                qxx[p] = 2.0 * ux[p] * bx[p];
                qxy[p] = ux[p] * by[p] + bx[p] * uy[p];
                qyy[p] = 2.0 * uy[p] * by[p];
            }
            let (sxx, sxy) = from_physical_real_pair(&grid, &sxx, &sxy);
            let (syy, qxx) = from_physical_real_pair(&grid, &syy, &qxx);
            let (qxy, qyy) = from_physical_real_pair(&grid, &qxy, &qyy);
            let fu = VectorField {
                x: sxx.map_modes(|k, c| I * (c * xi_x[k] + sxy.coeffs()[k] * xi_y[k])),
                y: sxy.map_modes(|k, c| I * (c * xi_x[k] + syy.coeffs()[k] * xi_y[k])),
            };
            let fb = VectorField {
                x: qxx.map_modes(|k, c| I * (c * xi_x[k] + qxy.coeffs()[k] * xi_y[k])),
                y: qxy.map_modes(|k, c| I * (c * xi_x[k] + qyy.coeffs()[k] * xi_y[k])),
            };
            (fu, fb)
        }
    };
    let mut nu = dealias(&flux_u);
    project_in_place(&mut nu);
    Ok((nu, dealias(&flux_b)))
}

/// Dealiased advective term `(v·∇)w`.
pub fn advect(v: &VectorField, w: &VectorField) -> Result<VectorField> {
    if v.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = v.grid().clone();
    let v = dealias(v);
    let w = dealias(w);
    let gx = gradient(&w.x);
    let gy = gradient(&w.y);
    let (vx, vy) = to_physical_real_pair(&v.x, &v.y);
    let (dxwx, dywx) = to_physical_real_pair(&gx.x, &gx.y);
    let (dxwy, dywy) = to_physical_real_pair(&gy.x, &gy.y);
    let len = grid.len();
    let mut ax = vec![0.0; len];
    let mut ay = vec![0.0; len];
    for p in 0..len {
        ax[p] = vx[p] * dxwx[p] + vy[p] * dywx[p];
        ay[p] = vx[p] * dxwy[p] + vy[p] * dywy[p];
    }
    let (ax, ay) = from_physical_real_pair(&grid, &ax, &ay);
    Ok(dealias(&VectorField { x: ax, y: ay }))
}
