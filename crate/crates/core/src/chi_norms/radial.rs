use crate::error::{Error, Result};

const ABS_TOL: f64 = 1e-9;
const TAIL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialIntegral {
    pub value: f64,
    /// Quadrature error estimate plus the extrapolated tail, if truncated.
    pub error_estimate: f64,
    /// Radius at which an infinite range was truncated.
    pub outer_radius: f64,
}

/// `2π ∫_{r_min}^{r_max} r^{s+1} φ(r) dr`, the `χ^s` norm of a radial
/// Fourier profile `|f̂(ξ)| = φ(|ξ|)` on the plane.
///
/// `r_max = ∞` is handled by integrating dyadic shells `[R, 2R]` until the
/// geometric tail estimate drops below `1e-10`; shells that stop shrinking
/// are reported as divergence.
pub fn continuum_radial_chi_norm<F>(
    profile: F,
    s: f64,
    r_min: f64,
    r_max: f64,
) -> Result<RadialIntegral>
where
    F: Fn(f64) -> f64,
{
    if !(r_min >= 0.0) || !(r_max > r_min) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= r_min < r_max, got ({r_min}, {r_max})"
        )));
    }
    let integrand = |r: f64| {
        let phi = profile(r);
        if phi == 0.0 {
            0.0
        } else {
            std::f64::consts::TAU * r.powf(s + 1.0) * phi
        }
    };

    if r_max.is_finite() {
        let out = quadrature::integrate(integrand, r_min, r_max, ABS_TOL);
        return Ok(RadialIntegral {
            value: out.integral,
            error_estimate: out.error_estimate,
            outer_radius: r_max,
        });
    }

    let mut radius = if r_min > 0.0 { 2.0 * r_min } else { 1.0 };
    let first = quadrature::integrate(integrand, r_min, radius, ABS_TOL);
    let mut total = first.integral;
    let mut err = first.error_estimate;
    let mut prev_shell: Option<f64> = None;
    let mut stalled = 0;
    loop {
        let shell = quadrature::integrate(integrand, radius, 2.0 * radius, ABS_TOL);
        total += shell.integral;
        err += shell.error_estimate;
        radius *= 2.0;
        let inc = shell.integral.abs();
        if inc == 0.0 && prev_shell.is_none_or(|p| p == 0.0) {
            break;
        }
        if let Some(prev) = prev_shell {
            let ratio = inc / prev;
            if ratio < 1.0 {
                stalled = 0;
                let tail = inc * ratio / (1.0 - ratio);
                if tail < TAIL_TOL {
                    total += shell.integral.signum() * tail;
                    err += tail;
                    break;
                }
            } else {
                stalled += 1;
                if stalled >= 4 {
                    return Err(Error::DivergentIntegral { radius });
                }
            }
        }
        if !total.is_finite() || radius > 1e150 {
            return Err(Error::DivergentIntegral { radius });
        }
        prev_shell = Some(inc);
    }
    Ok(RadialIntegral {
        value: total,
        error_estimate: err,
        outer_radius: radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn inverse_square_profile_has_chi_minus_one_norm_pi() {
        let r = continuum_radial_chi_norm(|r| r.powi(-2), -1.0, 2.0, f64::INFINITY).unwrap();
        assert!((r.value - PI).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn squared_modulus_integral_is_quarter_pi() {
        let r = continuum_radial_chi_norm(|r| r.powi(-4), 0.0, 2.0, f64::INFINITY).unwrap();
        assert!((r.value - PI / 4.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn zero_profile() {
        let r = continuum_radial_chi_norm(|_| 0.0, -1.0, 2.0, f64::INFINITY).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn finite_range() {
        // 2π ∫_1^3 r dr = 8π
        let r = continuum_radial_chi_norm(|_| 1.0, 0.0, 1.0, 3.0).unwrap();
        assert!((r.value - 8.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn detects_divergence() {
        // 2π ∫ r^{-1} dr diverges logarithmically
        let r = continuum_radial_chi_norm(|r| r.powi(-2), 0.0, 2.0, f64::INFINITY);
        assert!(matches!(r, Err(Error::DivergentIntegral { .. })));
    }
}
