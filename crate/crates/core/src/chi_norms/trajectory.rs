use serde::Serialize;

use super::norms::{chi_sum, combine_pair, weight};
use crate::error::{Error, Result};
use crate::spectral_core::{Grid, Spectral};

/// Exponents recorded for every sample.
pub const BASE_EXPONENTS: [f64; 4] = [-1.0, -0.5, 0.0, 1.0];

/// Running norm record of a time-sampled field with one or more channels
/// (a scalar or vector field is one channel; a state pair is two).
///
/// Every sample stores the `χ^s` norms of each tracked exponent, `L²` and
/// `Ḣ¹`. Per-mode suprema feed the tilde norms; cumulative trapezoid
/// integrals cover dissipation, the blow-up functional and any requested
/// `(p, s)` pair.
#[derive(Clone, Debug)]
pub struct TrajectoryNorms {
    grid: Grid,
    channels: usize,
    exponents: Vec<f64>,
    times: Vec<f64>,
    // [sample][channel][exponent]
    chi: Vec<Vec<Vec<f64>>>,
    l2: Vec<Vec<f64>>,
    h1: Vec<Vec<f64>>,
    sup: Vec<Vec<f64>>,
    dissipation: Vec<Vec<f64>>,
    blowup: Vec<f64>,
    integrals: Vec<TrackedIntegral>,
}

#[derive(Clone, Debug)]
struct TrackedIntegral {
    p: f64,
    s: f64,
    cumulative: Vec<f64>,
}

/// One CSV row of the norm series of a two-channel trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormRow {
    pub t: f64,
    pub l2_u: f64,
    pub l2_b: f64,
    pub h1_u: f64,
    pub h1_b: f64,
    pub chi_m1: f64,
    pub chi_mhalf: f64,
    pub chi0: f64,
    pub chi1: f64,
    pub energy: f64,
    pub blowup_integral: f64,
}

impl TrajectoryNorms {
    pub fn new(grid: &Grid, channels: usize) -> Self {
        assert!(channels > 0, "at least one channel");
        Self {
            grid: grid.clone(),
            channels,
            exponents: BASE_EXPONENTS.to_vec(),
            times: Vec::new(),
            chi: Vec::new(),
            l2: Vec::new(),
            h1: Vec::new(),
            sup: vec![vec![0.0; grid.len()]; channels],
            dissipation: Vec::new(),
            blowup: Vec::new(),
            integrals: Vec::new(),
        }
    }

    /// Also record `χ^s` for the given exponents. Must precede the first push.
    pub fn with_exponents(mut self, extra: &[f64]) -> Self {
        assert!(
            self.times.is_empty(),
            "exponents must be fixed before pushing"
        );
        for &s in extra {
            if !self.exponents.contains(&s) {
                self.exponents.push(s);
            }
        }
        self
    }

    /// Accumulate `Σ_ch ∫ ‖ch‖^p_{χ^s} dτ` alongside the samples.
    pub fn with_integral(mut self, p: f64, s: f64) -> Self {
        assert!(
            self.times.is_empty(),
            "integrals must be fixed before pushing"
        );
        self = self.with_exponents(&[s]);
        self.integrals.push(TrackedIntegral {
            p,
            s,
            cumulative: Vec::new(),
        });
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push<F: Spectral>(&mut self, t: f64, fields: &[&F]) -> Result<()> {
        if fields.len() != self.channels {
            return Err(Error::SizeMismatch {
                expected: self.channels,
                found: fields.len(),
            });
        }
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::InvalidParameter(format!(
                    "sample times must increase strictly ({t} after {last})"
                )));
            }
        }
        let grid = self.grid.clone();
        let mut chi = Vec::with_capacity(self.channels);
        let mut l2 = Vec::with_capacity(self.channels);
        let mut h1 = Vec::with_capacity(self.channels);
        for (ch, f) in fields.iter().enumerate() {
            if f.grid() != &grid {
                return Err(Error::GridMismatch);
            }
            let mags = f.magnitudes();
            chi.push(
                self.exponents
                    .iter()
                    .map(|&s| chi_sum(&grid, &mags, s))
                    .collect::<Vec<_>>(),
            );
            let (mut a, mut b) = (0.0, 0.0);
            for (m, w) in mags.iter().zip(grid.xi_sq()) {
                a += m * m;
                b += w * m * m;
            }
            l2.push(grid.period() * a.sqrt());
            h1.push(grid.period() * b.sqrt());
            for (sup, m) in self.sup[ch].iter_mut().zip(&mags) {
                if *m > *sup {
                    *sup = *m;
                }
            }
        }

        let chi0_idx = self.exponent_index(0.0).expect("base exponent");
        let blow_now: f64 = chi.iter().map(|c| c[chi0_idx] * c[chi0_idx]).sum();
        let diss_now: Vec<f64> = h1.iter().map(|v| v * v).collect();
        match self.times.last() {
            None => {
                self.blowup.push(0.0);
                self.dissipation.push(vec![0.0; self.channels]);
                for tr in &mut self.integrals {
                    tr.cumulative.push(0.0);
                }
            }
            Some(&last) => {
                let h = t - last;
                let m = self.times.len() - 1;
                let prev_chi = &self.chi[m];
                let blow_prev: f64 = prev_chi.iter().map(|c| c[chi0_idx] * c[chi0_idx]).sum();
                self.blowup
                    .push(self.blowup[m] + 0.5 * h * (blow_prev + blow_now));
                let diss: Vec<f64> = (0..self.channels)
                    .map(|c| {
                        let prev = self.h1[m][c] * self.h1[m][c];
                        self.dissipation[m][c] + 0.5 * h * (prev + diss_now[c])
                    })
                    .collect();
                self.dissipation.push(diss);
                for tr in &mut self.integrals {
                    let k = self
                        .exponents
                        .iter()
                        .position(|&e| e == tr.s)
                        .expect("tracked");
                    let g =
                        |row: &Vec<Vec<f64>>| -> f64 { row.iter().map(|c| powp(c[k], tr.p)).sum() };
                    let next = tr.cumulative[m] + 0.5 * h * (g(prev_chi) + g(&chi));
                    tr.cumulative.push(next);
                }
            }
        }
        self.times.push(t);
        self.chi.push(chi);
        self.l2.push(l2);
        self.h1.push(h1);
        Ok(())
    }

    fn exponent_index(&self, s: f64) -> Option<usize> {
        self.exponents.iter().position(|&e| e == s)
    }

    /// `‖ch(t_m)‖_{χ^s}` for every sample.
    pub fn channel_chi(&self, ch: usize, s: f64) -> Result<Vec<f64>> {
        let k = self.exponent_index(s).ok_or(Error::UntrackedExponent(s))?;
        Ok(self.chi.iter().map(|row| row[ch][k]).collect())
    }

    /// Pair value `(Σ_ch ‖ch(t_m)‖^p_{χ^s})^{1/p}` for every sample.
    pub fn pair_chi(&self, s: f64, p: f64) -> Result<Vec<f64>> {
        let k = self.exponent_index(s).ok_or(Error::UntrackedExponent(s))?;
        Ok(self
            .chi
            .iter()
            .map(|row| {
                row.iter()
                    .skip(1)
                    .fold(row[0][k], |acc, c| combine_pair(acc, c[k], p))
            })
            .collect())
    }

    pub fn channel_l2(&self, ch: usize) -> Vec<f64> {
        self.l2.iter().map(|r| r[ch]).collect()
    }

    pub fn channel_h1(&self, ch: usize) -> Vec<f64> {
        self.h1.iter().map(|r| r[ch]).collect()
    }

    /// `Σ_ch ‖ch(t_m)‖²_{L²}` per sample.
    pub fn energy(&self) -> Vec<f64> {
        self.l2
            .iter()
            .map(|r| r.iter().map(|v| v * v).sum())
            .collect()
    }

    /// Cumulative trapezoid `∫_0^{t_m} ‖∇ch‖²_{L²} dτ`.
    pub fn dissipation(&self, ch: usize) -> Vec<f64> {
        self.dissipation.iter().map(|r| r[ch]).collect()
    }

    /// Cumulative trapezoid `∫_0^{t_m} Σ_ch ‖ch‖²_{χ⁰} dτ`.
    pub fn blowup_series(&self) -> &[f64] {
        &self.blowup
    }

    pub fn blowup_integral(&self) -> f64 {
        self.blowup.last().copied().unwrap_or(0.0)
    }

    /// Cumulative integral registered with [`with_integral`](Self::with_integral).
    pub fn integral_series(&self, p: f64, s: f64) -> Option<&[f64]> {
        self.integrals
            .iter()
            .find(|tr| tr.p == p && tr.s == s)
            .map(|tr| tr.cumulative.as_slice())
    }

    /// `L^p([0,T]; χ^s)` norm by composite trapezoid, with the pair
    /// convention `‖·‖^p = Σ_ch ‖ch‖^p`. For `p = ∞` the maximum over samples
    /// of `Σ_ch ‖ch‖_{χ^s}` is returned.
    pub fn time_lp_norm(&self, p: f64, s: f64) -> Result<f64> {
        if self.times.is_empty() {
            return Err(Error::EmptyTrajectory("no samples".into()));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "time exponent must be >= 1, got {p}"
            )));
        }
        if p.is_infinite() {
            return Ok(self.pair_chi(s, 1.0)?.into_iter().fold(0.0, f64::max));
        }
        if self.times.len() < 2 {
            return Err(Error::EmptyTrajectory("need at least two samples".into()));
        }
        let k = self.exponent_index(s).ok_or(Error::UntrackedExponent(s))?;
        let values: Vec<f64> = self
            .chi
            .iter()
            .map(|row| row.iter().map(|c| powp(c[k], p)).sum())
            .collect();
        Ok(trapezoid(&self.times, &values).powf(1.0 / p))
    }

    /// Same as [`time_lp_norm`](Self::time_lp_norm) for a single channel.
    pub fn channel_lp_norm(&self, ch: usize, p: f64, s: f64) -> Result<f64> {
        let values = self.channel_chi(ch, s)?;
        if values.is_empty() {
            return Err(Error::EmptyTrajectory("no samples".into()));
        }
        if p.is_infinite() {
            return Ok(values.into_iter().fold(0.0, f64::max));
        }
        if values.len() < 2 {
            return Err(Error::EmptyTrajectory("need at least two samples".into()));
        }
        let pow: Vec<f64> = values.iter().map(|v| powp(*v, p)).collect();
        Ok(trapezoid(&self.times, &pow).powf(1.0 / p))
    }

    /// `‖·‖_{L̃^∞(χ^s)} = Σ_ch Σ_{k≠0} |ξ_k|^s sup_m |ĉ(t_m, ξ_k)|`.
    pub fn tilde_linf_norm(&self, s: f64) -> Result<f64> {
        if self.times.is_empty() {
            return Err(Error::EmptyTrajectory("no samples".into()));
        }
        Ok((0..self.channels).map(|ch| self.tilde_channel(ch, s)).sum())
    }

    pub fn tilde_channel(&self, ch: usize, s: f64) -> f64 {
        chi_sum(&self.grid, &self.sup[ch], s)
    }

    /// Per-mode running suprema of one channel.
    pub fn sup_magnitudes(&self, ch: usize) -> &[f64] {
        &self.sup[ch]
    }

    /// Tail `Σ_{|ξ|>ρ} |ξ|^{-1} Σ_ch sup |ĉ|` of the tilde `χ^{-1}` norm.
    pub fn tilde_tail(&self, rho: f64) -> f64 {
        let xi = self.grid.xi_norm();
        (1..self.grid.len())
            .filter(|&k| xi[k] > rho)
            .map(|k| weight(xi[k], -1.0) * self.sup.iter().map(|s| s[k]).sum::<f64>())
            .sum()
    }

    /// Norm rows of a two-channel (velocity, magnetic) record.
    pub fn rows(&self) -> Vec<NormRow> {
        assert_eq!(self.channels, 2, "rows() needs a (u, b) record");
        let ks: Vec<usize> = BASE_EXPONENTS
            .iter()
            .map(|&s| self.exponent_index(s).expect("base exponent"))
            .collect();
        (0..self.times.len())
            .map(|m| {
                let pair = |k: usize| self.chi[m][0][k] + self.chi[m][1][k];
                NormRow {
                    t: self.times[m],
                    l2_u: self.l2[m][0],
                    l2_b: self.l2[m][1],
                    h1_u: self.h1[m][0],
                    h1_b: self.h1[m][1],
                    chi_m1: pair(ks[0]),
                    chi_mhalf: pair(ks[1]),
                    chi0: pair(ks[2]),
                    chi1: pair(ks[3]),
                    energy: self.l2[m][0].powi(2) + self.l2[m][1].powi(2),
                    blowup_integral: self.blowup[m],
                }
            })
            .collect()
    }
}

fn powp(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v
    } else if p == 2.0 {
        v * v
    } else {
        v.powf(p)
    }
}

/// Composite trapezoid rule on a (possibly nonuniform) grid.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}
