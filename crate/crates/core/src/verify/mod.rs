//! Scenario harness: sample grids, residual checks against tolerances and
//! deterministic JSON reports.

mod checks;
mod config;
mod grid;
mod report;
mod scenarios;

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::error::GeometryError;

pub use checks::{
    check_bipolar_structure, check_composition_identity, check_nullity_and_leaf_constancy,
    check_prop_ricci, check_sanity, check_delaunay, hat_radii_ratio,
    BipolarTolerances, CompositionCase, PropRicciTolerances,
};
pub use config::{parse_grid, GridSpec, OutputSpec, ScenarioConfig, SurfaceSpec};
pub use grid::SampleGrid;
pub use report::{Bound, CheckResult, CheckStatus, GridMetadata, Measurement, VerificationReport};
pub use scenarios::{
    build_surface, composition_cases, default_config, list_scenarios, run_scenario,
    run_scenario_with_outputs, sample_records, surface_grid, surface_kinds, write_mesh,
    write_records_csv, ScenarioInfo, SCENARIOS,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "NULLITYLAB_THREADS";

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("unknown surface kind `{0}`")]
    UnknownSurface(String),
    #[error("all {0} grid points are singular")]
    AllSingular(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl VerifyError {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        VerifyError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Whether the failure lies in the input rather than in the computation.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            VerifyError::Config { .. } | VerifyError::UnknownScenario(_) | VerifyError::UnknownSurface(_)
        )
    }
}

pub type VerifyResult<T> = std::result::Result<T, VerifyError>;

/// Writes `bytes` to `path` through a temporary file in the same directory and
/// an atomic rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> VerifyResult<()> {
    let io_err = |source| VerifyError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Runs `f` on a rayon pool sized by [`THREADS_ENV`] (default: all cores).
pub fn with_thread_pool<R: Send>(f: impl FnOnce() -> R + Send) -> VerifyResult<R> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| VerifyError::config(THREADS_ENV, format!("expected a positive integer, got `{v}`")))?,
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| VerifyError::config(THREADS_ENV, e.to_string()))?;
    Ok(pool.install(f))
}
