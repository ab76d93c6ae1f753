use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{VerifyError, VerifyResult};

/// Which surface a scenario is built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub counts: Option<Vec<usize>>,
    #[serde(default)]
    pub ranges: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub jitter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub report_path: Option<String>,
    #[serde(default)]
    pub mesh_path: Option<String>,
    #[serde(default)]
    pub csv_path: Option<String>,
}

/// A scenario run description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default)]
    pub surface: Option<SurfaceSpec>,
    #[serde(default)]
    pub phi: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: OutputSpec,
}

impl ScenarioConfig {
    /// Parses JSON; errors name the offending key path.
    pub fn from_json(text: &str) -> VerifyResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." { "<root>".to_string() } else { path };
            VerifyError::config(key, e.into_inner().to_string())
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Applies a `key=value` tolerance override.
    pub fn set_tolerance(&mut self, assignment: &str) -> VerifyResult<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| VerifyError::config("--tol", format!("expected key=value, got `{assignment}`")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| VerifyError::config(format!("tolerances.{}", k.trim()), format!("`{v}` is not a number")))?;
        if !value.is_finite() {
            return Err(VerifyError::config(format!("tolerances.{}", k.trim()), "tolerance must be finite"));
        }
        self.tolerances.insert(k.trim().to_string(), value);
        Ok(())
    }

    /// Parses `9x9x16` into grid counts.
    pub fn set_grid(&mut self, spec: &str) -> VerifyResult<()> {
        let counts = parse_grid(spec)?;
        self.grid.counts = Some(counts);
        Ok(())
    }

    /// Resolves tolerances against `defaults`; unknown keys are errors.
    pub fn resolve_tolerances(&self, defaults: &[(&str, f64)]) -> VerifyResult<BTreeMap<String, f64>> {
        let mut out: BTreeMap<String, f64> = defaults.iter().map(|&(k, v)| (k.to_string(), v)).collect();
        for (k, &v) in &self.tolerances {
            if !out.contains_key(k) {
                let known: Vec<&str> = defaults.iter().map(|d| d.0).collect();
                return Err(VerifyError::config(
                    format!("tolerances.{k}"),
                    format!("unknown tolerance for scenario `{}`; known: {}", self.scenario, known.join(", ")),
                ));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return Err(VerifyError::config(format!("tolerances.{k}"), "tolerance must be finite and non-negative"));
            }
            out.insert(k.clone(), v);
        }
        Ok(out)
    }
}

/// Parses grid counts such as `9x9x16`.
pub fn parse_grid(spec: &str) -> VerifyResult<Vec<usize>> {
    spec.split(['x', 'X'])
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| VerifyError::config("--grid", format!("expected counts like 21x21, got `{spec}`")))
        })
        .collect()
}
