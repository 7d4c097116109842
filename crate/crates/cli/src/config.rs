//! Validated settings for the `run` subcommand.

use std::path::PathBuf;

use dmaxwell::maxwell::{CouplingFactor, PhysicalScale, StepBackend};
use dmaxwell::{Probe, PrunePolicy};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum FactorSource {
    Direct(f64),
    Scale { c: f64, dt: f64, ds: f64 },
}

impl FactorSource {
    pub fn resolve(&self) -> Result<CouplingFactor, CliError> {
        Ok(match *self {
            FactorSource::Direct(p) => CouplingFactor::new(p)?,
            FactorSource::Scale { c, dt, ds } => PhysicalScale::new(c, dt, ds)?.coupling_factor()?,
        })
    }
}

/// Parses `c,dt,ds`.
pub fn parse_scale(s: &str) -> Result<FactorSource, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("expected `c,dt,ds`, got `{s}`"))?;
    match parts[..] {
        [c, dt, ds] => Ok(FactorSource::Scale { c, dt, ds }),
        _ => Err(format!("expected three values `c,dt,ds`, got `{s}`")),
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Absent only when a custom table supplies its own factors.
    pub factor: Option<CouplingFactor>,
    pub steps: u64,
    pub backend: StepBackend,
    pub prune: PrunePolicy,
    pub probes: Vec<Probe>,
    pub out: PathBuf,
    pub table: Option<PathBuf>,
    pub init: Vec<PathBuf>,
    pub save_final: bool,
}

impl RunConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p: Option<f64>,
        scale: Option<FactorSource>,
        steps: u64,
        backend: StepBackend,
        prune_budget: Option<usize>,
        probes: Vec<Probe>,
        out: PathBuf,
        table: Option<PathBuf>,
        init: Vec<PathBuf>,
        save_final: bool,
    ) -> Result<Self, CliError> {
        let source = match (p, scale) {
            (Some(_), Some(_)) => {
                return Err(CliError::validation("give either --p or --scale, not both"))
            }
            (Some(p), None) => Some(FactorSource::Direct(p)),
            (None, s) => s,
        };
        let factor = match (&source, &table) {
            (Some(s), _) => Some(s.resolve()?),
            (None, Some(_)) => None,
            (None, None) => {
                return Err(CliError::validation(
                    "one of --p or --scale is required unless --table is given",
                ))
            }
        };
        let prune = match prune_budget {
            Some(b) => PrunePolicy::budget(b)?,
            None => PrunePolicy::disabled(),
        };
        Ok(RunConfig {
            factor,
            steps,
            backend,
            prune,
            probes,
            out,
            table,
            init,
            save_final,
        })
    }
}
