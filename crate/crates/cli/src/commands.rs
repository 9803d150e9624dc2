//! Subcommand implementations. Every command computes its results before
//! touching the output directory, so failed runs leave nothing behind.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use chi_mhd::chi_norms::NormRow;
use chi_mhd::mhd_solver::{
    continuation_solve, integrate, picard_solve, stability_bound, write_checkpoint,
    ContinuationReport, PicardDiagnostics, Trajectory,
};
use chi_mhd::random::{random_state, RandomFieldSpec};
use chi_mhd::verification::calibration::FROZEN;
use chi_mhd::verification::{
    check_energy_equality, energy_residuals, run_suite, weak_strong_experiment, CheckResult, Suite,
};
use chi_mhd::{Spectral, StatePair};
use rayon::prelude::*;
use serde::Serialize;
use toml::{Table, Value};

use crate::config::{load_table, parse_seeds, parse_value, RunConfig};
use crate::error::CliError;

/// Seed offset and band limit of the weak-strong perturbation.
const PERTURBATION_OFFSET: u64 = 1000;
const PERTURBATION_BAND: i64 = 4;

/// Flags shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct Common {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seeds: Option<String>,
    pub preset: Option<String>,
}

impl Common {
    fn overrides(&self) -> Result<Vec<(&'static str, Value)>, CliError> {
        let mut out = Vec::new();
        if let Some(p) = &self.preset {
            p.parse::<crate::config::Preset>()?;
            out.push(("preset", Value::String(p.clone())));
        }
        if let Some(s) = &self.seeds {
            let seeds = parse_seeds(s)?;
            if seeds.len() != 1 {
                return Err(CliError::Config(format!(
                    "this command takes a single seed, got {} from {s:?}",
                    seeds.len()
                )));
            }
            out.push(("seed", Value::Integer(seeds[0] as i64)));
        }
        Ok(out)
    }

    fn table(&self) -> Result<Table, CliError> {
        load_table(self.config.as_deref(), &self.overrides()?)
    }

    fn run_config(&self) -> Result<RunConfig, CliError> {
        RunConfig::from_table(self.table()?)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config: Table,
    inputs: Vec<String>,
    outputs: Vec<String>,
    seeds: Vec<u64>,
    timestamp: u64,
}

/// Output directory with the list of files written so far.
struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, bytes)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn checkpoint(&mut self, stem: &str, traj: &Trajectory) -> Result<(), CliError> {
        write_checkpoint(
            &self.dir.join(stem),
            &traj.config,
            traj.final_time(),
            traj.final_state(),
        )?;
        self.files.push(format!("{stem}.json"));
        self.files.push(format!("{stem}.bin"));
        Ok(())
    }

    fn finish(
        mut self,
        command: &str,
        common: &Common,
        config: Table,
        seeds: Vec<u64>,
    ) -> Result<(), CliError> {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or_else(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs())
            });
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            inputs: common
                .config
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
            outputs: self.files.clone(),
            seeds,
            timestamp,
        };
        self.json("manifest.json", &manifest)
    }
}

fn norms_csv(traj: &Trajectory) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    traj.write_norms_csv(&mut buf)?;
    Ok(buf)
}

#[derive(Serialize)]
struct Summary<'a> {
    preset: &'a str,
    seed: u64,
    final_time: f64,
    initial_norms: NormRow,
    final_norms: NormRow,
    energy_residual_max: f64,
    energy_check: CheckResult,
    blowup_integral: f64,
    continuation: Option<&'a ContinuationReport>,
}

impl<'a> Summary<'a> {
    fn of(
        cfg: &'a RunConfig,
        traj: &Trajectory,
        continuation: Option<&'a ContinuationReport>,
    ) -> Self {
        let rows = traj.rows();
        Summary {
            preset: cfg.initial.preset.name(),
            seed: cfg.initial.seed,
            final_time: traj.final_time(),
            initial_norms: rows[0],
            final_norms: rows[rows.len() - 1],
            energy_residual_max: energy_residuals(traj).into_iter().fold(0.0, f64::max),
            energy_check: check_energy_equality(traj),
            blowup_integral: traj.norms().blowup_integral(),
            continuation,
        }
    }
}

/// Initial state plus the up-front step-size check of a direct run.
fn prepare(cfg: &RunConfig, continuation: bool) -> Result<StatePair, CliError> {
    let s0 = cfg.initial_state()?;
    let bound = stability_bound(&s0);
    if !continuation && cfg.solver.dt > bound {
        return Err(CliError::Config(format!(
            "dt = {} exceeds the advective stability bound {bound} of the initial data",
            cfg.solver.dt
        )));
    }
    Ok(s0)
}

fn solve(
    cfg: &RunConfig,
    s0: &StatePair,
    continuation: bool,
) -> Result<(Trajectory, Option<ContinuationReport>), CliError> {
    if continuation {
        let (traj, rep) = continuation_solve(&cfg.solver, s0)?;
        Ok((traj, Some(rep)))
    } else {
        Ok((integrate(&cfg.solver, s0)?, None))
    }
}

pub fn simulate(common: &Common, continuation: bool) -> Result<(), CliError> {
    let cfg = common.run_config()?;
    let s0 = prepare(&cfg, continuation)?;
    let (traj, report) = solve(&cfg, &s0, continuation)?;
    let summary = Summary::of(&cfg, &traj, report.as_ref());

    let mut out = Outputs::create(&common.out)?;
    out.write("norms.csv", &norms_csv(&traj)?)?;
    out.checkpoint("final", &traj)?;
    out.json("summary.json", &summary)?;
    out.write("resolved.toml", cfg.to_toml().as_bytes())?;
    out.finish("simulate", common, cfg.to_table(), vec![cfg.initial.seed])?;
    println!(
        "simulate: t = {} energy {:.6e} -> {:.6e}, blow-up integral {:.6e}",
        summary.final_time,
        summary.initial_norms.energy,
        summary.final_norms.energy,
        summary.blowup_integral
    );
    Ok(())
}

pub fn picard(common: &Common) -> Result<(), CliError> {
    let cfg = common.run_config()?;
    let s0 = cfg.initial_state()?;
    let (traj, diag): (Trajectory, PicardDiagnostics) = picard_solve(&cfg.solver, &s0)?;

    let mut out = Outputs::create(&common.out)?;
    out.json("picard.json", &diag)?;
    out.write("norms.csv", &norms_csv(&traj)?)?;
    out.write("resolved.toml", cfg.to_toml().as_bytes())?;
    out.finish("picard", common, cfg.to_table(), vec![cfg.initial.seed])?;
    println!(
        "picard: converged = {} after {} iterations, contraction ratio {:.4}, small data = {}",
        diag.converged, diag.iterations, diag.contraction_ratio, diag.small_data
    );
    if diag.converged {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(
            "Picard iteration did not converge".into(),
        ))
    }
}

pub fn verify(common: &Common, suite: &str) -> Result<(), CliError> {
    let suite: Suite = suite
        .parse()
        .map_err(|e: chi_mhd::Error| CliError::Config(e.to_string()))?;
    let seeds = parse_seeds(common.seeds.as_deref().unwrap_or("0..99"))?;
    let table = load_table(common.config.as_deref(), &[])?;
    let cfg = RunConfig::from_table(table)?;
    let report = run_suite(suite, cfg.solver.n_modes, &seeds)?;

    let mut out = Outputs::create(&common.out)?;
    out.json("report.json", &report)?;
    out.finish("verify", common, cfg.to_table(), seeds.clone())?;
    let failures: Vec<&CheckResult> = report.failures().collect();
    println!(
        "verify {suite}: {} checks in {} families over {} seeds, {} failures",
        report.checks.len(),
        report.families().len(),
        seeds.len(),
        failures.len()
    );
    for f in &failures {
        println!(
            "  FAIL {}: lhs {:.6e} rhs {:.6e} ratio {:.4}",
            f.name, f.lhs, f.rhs, f.ratio
        );
    }
    if report.pass {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(format!(
            "{} of {} checks failed",
            failures.len(),
            report.checks.len()
        )))
    }
}

pub fn weakstrong(common: &Common, delta: f64) -> Result<(), CliError> {
    if !delta.is_finite() {
        return Err(CliError::Config(format!(
            "delta must be finite, got {delta}"
        )));
    }
    let cfg = common.run_config()?;
    let s0 = prepare(&cfg, false)?;
    let mut spec = RandomFieldSpec::new(cfg.initial.seed + PERTURBATION_OFFSET, cfg.solver.n_modes)
        .band_limit(PERTURBATION_BAND);
    spec.period = cfg.solver.period;
    let mut perturbation = random_state(&spec)?;
    perturbation.scale(delta);
    let limit = FROZEN.limits().weak_strong;
    let outcome = weak_strong_experiment(&cfg.solver, &s0, &perturbation, limit)?;

    let mut csv_bytes = format!(
        "# period={} mu={} nu={} delta={delta} C={limit}; lhs = ‖(w,g)‖² + ½min(mu,nu)∫(‖∇w‖² + ‖∇g‖²), rhs = ‖(w0,g0)‖² exp(C∫‖(u,b)‖²_chi0); squared L2 norms (p=2)\n",
        cfg.solver.period, cfg.solver.mu, cfg.solver.nu
    )
    .into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut csv_bytes);
        for row in &outcome.rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    let checks = outcome.checks();

    let mut out = Outputs::create(&common.out)?;
    out.write("weakstrong.csv", &csv_bytes)?;
    out.json("weakstrong.json", &outcome)?;
    out.write("resolved.toml", cfg.to_toml().as_bytes())?;
    out.finish("weakstrong", common, cfg.to_table(), vec![cfg.initial.seed])?;
    println!(
        "weakstrong: delta = {delta}, empirical constant {:.4e} (limit {limit:.4e}), {} rows",
        outcome.empirical_constant,
        outcome.rows.len()
    );
    match checks.iter().find(|c| !c.pass) {
        None => Ok(()),
        Some(c) => Err(CliError::ChecksFailed(format!(
            "check {} failed (ratio {:.4})",
            c.name, c.ratio
        ))),
    }
}

#[derive(Serialize)]
struct SweepRow {
    value: String,
    t_end: f64,
    final_energy: f64,
    final_chi_m1: f64,
    final_chi0: f64,
    blowup_integral: f64,
    energy_residual_max: f64,
    segments: usize,
}

pub fn sweep(
    common: &Common,
    param: &str,
    values: &[String],
    continuation: bool,
) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Config("--values needs at least one entry".into()));
    }
    if param == "seed" && common.seeds.is_some() {
        return Err(CliError::Config(
            "--seeds conflicts with sweeping seed".into(),
        ));
    }
    let base = common.table()?;
    let runs: Vec<(RunConfig, StatePair)> = values
        .iter()
        .map(|v| {
            let mut table = base.clone();
            table.insert(param.to_string(), parse_value(v));
            let cfg = RunConfig::from_table(table)?;
            let s0 = prepare(&cfg, continuation)?;
            Ok((cfg, s0))
        })
        .collect::<Result<_, CliError>>()?;

    let results: Vec<(Trajectory, Option<ContinuationReport>)> = runs
        .par_iter()
        .map(|(cfg, s0)| solve(cfg, s0, continuation))
        .collect::<Result<_, CliError>>()?;

    let mut out = Outputs::create(&common.out)?;
    let mut rows = Vec::with_capacity(values.len());
    for (i, ((cfg, _), (traj, rep))) in runs.iter().zip(&results).enumerate() {
        let dir = format!("run-{i:03}");
        let summary = Summary::of(cfg, traj, rep.as_ref());
        out.write(&format!("{dir}/norms.csv"), &norms_csv(traj)?)?;
        out.json(&format!("{dir}/summary.json"), &summary)?;
        out.write(&format!("{dir}/resolved.toml"), cfg.to_toml().as_bytes())?;
        rows.push(SweepRow {
            value: values[i].trim().to_string(),
            t_end: summary.final_time,
            final_energy: summary.final_norms.energy,
            final_chi_m1: summary.final_norms.chi_m1,
            final_chi0: summary.final_norms.chi0,
            blowup_integral: summary.blowup_integral,
            energy_residual_max: summary.energy_residual_max,
            segments: rep.as_ref().map_or(1, |r| r.segments.len()),
        });
    }
    let mut csv_bytes = format!(
        "# sweep over {param}; chi columns use the sum pair convention (p=1); energy and blowup_integral use squared norms (p=2); per-run series in run-NNN/norms.csv\n"
    )
    .into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(&mut csv_bytes);
        w.write_record([
            param,
            "t_end",
            "final_energy",
            "final_chi_m1",
            "final_chi0",
            "blowup_integral",
            "energy_residual_max",
            "segments",
        ])?;
        for row in &rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    out.write("sweep.csv", &csv_bytes)?;
    let seeds = runs.iter().map(|(c, _)| c.initial.seed).collect();
    let mut table = runs[0].0.to_table();
    table.insert(
        param.to_string(),
        Value::Array(values.iter().map(|v| parse_value(v)).collect()),
    );
    out.finish("sweep", common, table, seeds)?;
    println!("sweep over {param}: {} runs", rows.len());
    Ok(())
}
