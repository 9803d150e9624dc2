//! Named verification suites over seed ranges.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::calibration::{lemma_constant_checks, run_checks, FROZEN};
use super::checks::{
    check_blowup_majorant, check_cancellations, check_free_evolution, check_interpolation,
    check_product,
};
use super::result::{CheckResult, Report};
use crate::error::{Error, Result};
use crate::random::{random_scalar, random_state, RandomFieldSpec};

const PARTNER_OFFSET: u64 = 7_777;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Field-level inequalities and identities.
    Lemmas,
    /// Energy equality, a priori estimate and blow-up functional on runs.
    Theorem1,
    /// Twin-run weak-strong envelope.
    Theorem2,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemmas" => Ok(Suite::Lemmas),
            "theorem1" => Ok(Suite::Theorem1),
            "theorem2" => Ok(Suite::Theorem2),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidParameter(format!(
                "unknown suite {other:?} (expected lemmas, theorem1, theorem2 or all)"
            ))),
        }
    }
}

/// Constant-1 field checks for one seed: both interpolation triples, the
/// product inequality, the pointwise blow-up majorant and the three
/// transport cancellations.
pub fn exact_checks(n: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let f = random_scalar(&RandomFieldSpec::new(seed, n))?;
    let g = random_scalar(&RandomFieldSpec::new(seed + PARTNER_OFFSET, n).beta(1.5))?;
    let s = random_state(&RandomFieldSpec::new(seed, n).beta(1.5))?;
    let d = random_state(&RandomFieldSpec::new(seed + PARTNER_OFFSET, n))?;
    let mut out = vec![
        check_interpolation(&f, -1.0, -0.5, 1.0)?,
        check_interpolation(&f, -1.0, 0.0, 1.0)?,
        check_product(&f, &g)?,
        check_blowup_majorant(&s)?,
    ];
    out.extend(check_cancellations(&s.u, &s.b, &d.u, &d.b)?);
    Ok(out)
}

fn lemma_checks(n: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = exact_checks(n, seed)?;
    let s = random_state(&RandomFieldSpec::new(seed, n))?;
    out.push(check_free_evolution(&s.u, &s.b, 0.5, 1.0, 1.0)?);
    for c in &mut out {
        c.name = format!("{} [n={n} seed={seed}]", c.name);
        c.meta.insert("seed".into(), seed.into());
        c.meta.insert("n_modes".into(), n.into());
    }
    out.extend(lemma_constant_checks(n, seed, &FROZEN.limits())?);
    Ok(out)
}

fn seed_checks(suite: Suite, n: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let limits = FROZEN.limits();
    match suite {
        Suite::Lemmas => lemma_checks(n, seed),
        Suite::Theorem1 => run_checks(n, seed, &limits, false),
        Suite::Theorem2 => Ok(run_checks(n, seed, &limits, true)?
            .into_iter()
            .filter(|c| c.name.starts_with("weak_strong") || c.name.starts_with("cancellation"))
            .collect()),
        Suite::All => {
            let mut out = lemma_checks(n, seed)?;
            out.extend(run_checks(n, seed, &limits, true)?);
            Ok(out)
        }
    }
}

/// Runs `suite` at resolution `n` over `seeds`. Seeds are processed in
/// parallel on the current rayon pool; the report keeps seed order.
pub fn run_suite(suite: Suite, n: usize, seeds: &[u64]) -> Result<Report> {
    let per_seed: Vec<Vec<CheckResult>> = seeds
        .par_iter()
        .map(|&seed| seed_checks(suite, n, seed))
        .collect::<Result<_>>()?;
    Ok(Report::new(
        suite.name(),
        per_seed.into_iter().flatten().collect(),
    ))
}
