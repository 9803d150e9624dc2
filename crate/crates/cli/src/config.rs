//! Flat TOML run configuration: solver keys plus initial-data keys.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chi_mhd::initial::{shear, taylor_green};
use chi_mhd::mhd_solver::SolverConfig;
use chi_mhd::random::{random_state, RandomFieldSpec};
use chi_mhd::{Spectral, StatePair, VectorField};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Taylor-Green velocity, optional `sin(2y)` magnetic shear.
    TaylorGreen,
    /// Identical random velocity and magnetic field (pure heat flow).
    Aligned,
    /// Independent random power-law velocity and magnetic field.
    RandomBeta,
    Zero,
}

impl Preset {
    pub const NAMES: [&'static str; 4] = ["taylor-green", "aligned", "random-beta", "zero"];

    pub fn name(self) -> &'static str {
        match self {
            Preset::TaylorGreen => "taylor-green",
            Preset::Aligned => "aligned",
            Preset::RandomBeta => "random-beta",
            Preset::Zero => "zero",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "taylor-green" => Ok(Preset::TaylorGreen),
            "aligned" => Ok(Preset::Aligned),
            "random-beta" => Ok(Preset::RandomBeta),
            "zero" => Ok(Preset::Zero),
            other => Err(CliError::Config(format!(
                "unknown preset {other:?} (expected one of {})",
                Preset::NAMES.join(", ")
            ))),
        }
    }
}

/// Initial-data keys of the configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialData {
    pub preset: Preset,
    pub seed: u64,
    /// Velocity amplitude.
    pub amplitude: f64,
    /// Magnetic amplitude (the `sin(2y)` shear for `taylor-green`).
    pub magnetic_amplitude: f64,
    pub beta: f64,
    /// Optional `|k|_∞` band limit of random data; 0 means none.
    pub band_limit: i64,
}

impl Default for InitialData {
    fn default() -> Self {
        Self {
            preset: Preset::TaylorGreen,
            seed: 0,
            amplitude: 1.0,
            magnetic_amplitude: 0.0,
            beta: 3.0,
            band_limit: 0,
        }
    }
}

const INITIAL_KEYS: [&str; 6] = [
    "preset",
    "seed",
    "amplitude",
    "magnetic_amplitude",
    "beta",
    "band_limit",
];

/// Fully resolved configuration of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub initial: InitialData,
}

impl RunConfig {
    pub fn from_table(table: Table) -> Result<Self, CliError> {
        let (mut initial, mut solver) = (Table::new(), Table::new());
        for (k, v) in table {
            if INITIAL_KEYS.contains(&k.as_str()) {
                initial.insert(k, v);
            } else {
                solver.insert(k, v);
            }
        }
        let solver: SolverConfig = Value::Table(solver)
            .try_into()
            .map_err(|e| CliError::Config(format!("invalid solver key: {e}")))?;
        let initial: InitialData = Value::Table(initial)
            .try_into()
            .map_err(|e| CliError::Config(format!("invalid initial-data key: {e}")))?;
        solver
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self { solver, initial })
    }

    /// Flat table with every key materialized.
    pub fn to_table(&self) -> Table {
        let mut table = match Value::try_from(&self.solver) {
            Ok(Value::Table(t)) => t,
            _ => unreachable!("solver config serializes to a table"),
        };
        if let Ok(Value::Table(t)) = Value::try_from(&self.initial) {
            table.extend(t);
        }
        table
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_table()).expect("flat table serializes")
    }

    /// Builds and validates the initial state.
    pub fn initial_state(&self) -> Result<StatePair, CliError> {
        let grid = self
            .solver
            .grid()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let d = &self.initial;
        let spec = |seed: u64| {
            let mut s = RandomFieldSpec::new(seed, self.solver.n_modes)
                .beta(d.beta)
                .amplitude(d.amplitude);
            s.period = self.solver.period;
            if d.band_limit > 0 {
                s = s.band_limit(d.band_limit);
            }
            s
        };
        let state = match d.preset {
            Preset::TaylorGreen => StatePair::new(
                taylor_green(&grid, d.amplitude),
                shear(&grid, 2, d.magnetic_amplitude),
            ),
            Preset::Aligned => {
                random_state(&spec(d.seed)).and_then(|s| StatePair::new(s.u.clone(), s.u))
            }
            Preset::RandomBeta => random_state(&spec(d.seed)).map(|mut s| {
                let ratio = if d.amplitude == 0.0 {
                    0.0
                } else {
                    d.magnetic_amplitude / d.amplitude
                };
                s.b.scale(ratio);
                s
            }),
            Preset::Zero => StatePair::new(VectorField::zeros(&grid), VectorField::zeros(&grid)),
        }
        .map_err(|e| CliError::Config(e.to_string()))?;
        state
            .validate(chi_mhd::mhd_solver::ADMISSIBLE_TOL)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(state)
    }
}

/// Reads the configuration file (if any) and applies the flag overrides.
pub fn load_table(path: Option<&Path>, overrides: &[(&str, Value)]) -> Result<Table, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            text.parse::<Table>()
                .map_err(|e| CliError::Config(format!("malformed config {}: {e}", p.display())))?
        }
        None => Table::new(),
    };
    if let Some((k, _)) = table.iter().find(|(_, v)| v.is_table() || v.is_array()) {
        return Err(CliError::Config(format!(
            "config must be flat; key {k:?} is nested"
        )));
    }
    for (k, v) in overrides {
        table.insert((*k).to_string(), v.clone());
    }
    Ok(table)
}

/// Parses `A..B` (inclusive of both ends) or a single seed.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Config(format!("invalid seed range {text:?} (expected A..B or N)"));
    match text.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?;
            if b < a {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![text.trim().parse().map_err(|_| bad())?]),
    }
}

/// Integer-looking strings become TOML integers, other numbers floats and
/// everything else strings.
pub fn parse_value(text: &str) -> Value {
    let t = text.trim();
    if let Ok(i) = t.parse::<i64>() {
        Value::Integer(i)
    } else if let Ok(x) = t.parse::<f64>() {
        Value::Float(x)
    } else {
        Value::String(t.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds() {
        assert_eq!(parse_seeds("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_seeds("5").unwrap(), vec![5]);
        assert_eq!(parse_seeds("2..=2").unwrap(), vec![2]);
        assert!(parse_seeds("3..1").is_err());
        assert!(parse_seeds("a..b").is_err());
    }

    #[test]
    fn values() {
        assert_eq!(parse_value("3"), Value::Integer(3));
        assert_eq!(parse_value("0.25"), Value::Float(0.25));
        assert_eq!(parse_value("zero"), Value::String("zero".into()));
    }

    #[test]
    fn table_round_trip() {
        let table: Table = "mu = 0.5\npreset = \"aligned\"\nseed = 4\nn_modes = 16\n"
            .parse()
            .unwrap();
        let cfg = RunConfig::from_table(table).unwrap();
        assert_eq!(cfg.solver.mu, 0.5);
        assert_eq!(cfg.initial.preset, Preset::Aligned);
        let back = RunConfig::from_table(cfg.to_toml().parse().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        let t: Table = "viscosity = 1.0\n".parse().unwrap();
        assert!(RunConfig::from_table(t).is_err());
        let t: Table = "mu = -1.0\n".parse().unwrap();
        assert!(RunConfig::from_table(t).is_err());
        let t: Table = "preset = \"vortex\"\n".parse().unwrap();
        assert!(RunConfig::from_table(t).is_err());
    }

    #[test]
    fn presets_build_admissible_states() {
        for name in Preset::NAMES {
            let mut t = Table::new();
            t.insert("preset".into(), Value::String(name.into()));
            t.insert("n_modes".into(), Value::Integer(16));
            let cfg = RunConfig::from_table(t).unwrap();
            let s = cfg.initial_state().unwrap();
            assert_eq!(s.grid().n_modes(), 16);
        }
    }
}
