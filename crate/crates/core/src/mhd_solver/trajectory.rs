use std::io::Write;

use super::config::SolverConfig;
use crate::chi_norms::{NormRow, TrajectoryNorms};
use crate::error::{Error, Result};
use crate::spectral_core::{Spectral, StatePair, VectorField};

/// A solver run: strided snapshots plus norms recorded at every step.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: SolverConfig,
    times: Vec<f64>,
    snapshots: Vec<StatePair>,
    norms: TrajectoryNorms,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[StatePair] {
        &self.snapshots
    }

    pub fn norms(&self) -> &TrajectoryNorms {
        &self.norms
    }

    pub fn initial(&self) -> &StatePair {
        &self.snapshots[0]
    }

    pub fn final_state(&self) -> &StatePair {
        self.snapshots.last().expect("nonempty trajectory")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("nonempty trajectory")
    }

    pub fn rows(&self) -> Vec<NormRow> {
        self.norms.rows()
    }

    /// Writes the norm series as CSV after a commented header naming the
    /// conventions.
    pub fn write_norms_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# period={} mu={} nu={} dt={}; chi columns use the sum pair convention (p=1); energy and blowup_integral use squared norms (p=2)",
            self.config.period, self.config.mu, self.config.nu, self.config.dt
        )?;
        let mut w = csv::Writer::from_writer(out);
        for row in self.rows() {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Accumulates a trajectory sample by sample.
pub(crate) struct Recorder {
    config: SolverConfig,
    times: Vec<f64>,
    snapshots: Vec<StatePair>,
    norms: TrajectoryNorms,
    since_snapshot: usize,
    pending: Option<(f64, StatePair)>,
}

impl Recorder {
    pub fn new(config: &SolverConfig, t0: f64, s0: &StatePair) -> Result<Self> {
        let mut norms = TrajectoryNorms::new(s0.grid(), 2);
        norms.push::<VectorField>(t0, &[&s0.u, &s0.b])?;
        Ok(Self {
            config: config.clone(),
            times: vec![t0],
            snapshots: vec![s0.clone()],
            norms,
            since_snapshot: 0,
            pending: None,
        })
    }

    pub fn last_time(&self) -> f64 {
        self.norms.times().last().copied().unwrap_or(0.0)
    }

    /// Record one step; returns the running blow-up integral.
    pub fn record(&mut self, t: f64, s: &StatePair) -> Result<f64> {
        if s.components()
            .iter()
            .any(|c| c.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()))
        {
            return Err(Error::NonFinite {
                last_valid_time: self.last_time(),
            });
        }
        let last_valid_time = self.last_time();
        self.norms.push::<VectorField>(t, &[&s.u, &s.b])?;
        let integral = self.norms.blowup_integral();
        if !integral.is_finite() {
            return Err(Error::NonFinite { last_valid_time });
        }
        if integral > self.config.blowup_guard {
            return Err(Error::BlowupGuardTripped {
                last_valid_time: t,
                integral,
                guard: self.config.blowup_guard,
            });
        }
        self.since_snapshot += 1;
        if self.since_snapshot == self.config.snapshot_stride {
            self.since_snapshot = 0;
            self.times.push(t);
            self.snapshots.push(s.clone());
            self.pending = None;
        } else {
            self.pending = Some((t, s.clone()));
        }
        Ok(integral)
    }

    /// Closes the record; the final state is always kept as a snapshot.
    pub fn finish(mut self) -> Trajectory {
        if let Some((t, s)) = self.pending.take() {
            self.times.push(t);
            self.snapshots.push(s);
        }
        Trajectory {
            config: self.config,
            times: self.times,
            snapshots: self.snapshots,
            norms: self.norms,
        }
    }
}
