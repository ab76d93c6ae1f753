use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_6, PI};
use std::path::Path;
use std::sync::Arc;

use super::checks::{
    check_bipolar_structure, check_composition_identity, check_delaunay, check_prop_ricci,
    check_sanity, BipolarTolerances, CompositionCase, PropRicciTolerances,
};
use super::config::{GridSpec, OutputSpec, ScenarioConfig, SurfaceSpec};
use super::grid::SampleGrid;
use super::report::VerificationReport;
use super::{with_thread_pool, write_atomic, VerifyError, VerifyResult};
use crate::constructions::{
    bipolar_chart, compose_with_curve_cylinder, plane_curve_from_curvature, CurvatureFn,
};
use crate::error::Result;
use crate::immersion::export::{point_record, write_obj, write_point_csv, PointRecord};
use crate::immersion::{stock, AmbientSpace, Chart};
use crate::jets::Jet;
use crate::minimal::{
    delaunay_profile, orthogonal_sum_hat, weierstrass_chart, DelaunayParams, RotationLayout,
    WeierstrassData,
};

/// Name and one-line description of a built-in scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
}

pub const SCENARIOS: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "cylinder-sanity",
        description: "nullity index and mean curvature of the cylinder, plane and sphere; rulings of an elliptic cylinder",
    },
    ScenarioInfo {
        name: "prop-ricci",
        description: "minimality and curvature ellipses of cos φ g_θ ⊕ sin φ g_{θ+π/2} for an associated family",
    },
    ScenarioInfo {
        name: "bipolar-full",
        description: "fiber nullity, complex splitting tensor and its identities on the unit-tangent chart of ĝ",
    },
    ScenarioInfo {
        name: "composition",
        description: "mean curvature of hypersurfaces composed with curve cylinders",
    },
    ScenarioInfo {
        name: "delaunay",
        description: "Delaunay-type profile and the constant mean curvature of its composition",
    },
];

pub fn list_scenarios() -> &'static [ScenarioInfo] {
    SCENARIOS
}

/// Surface kinds accepted by [`build_surface`].
pub fn surface_kinds() -> &'static [&'static str] {
    &[
        "plane",
        "sphere",
        "cylinder",
        "elliptic-cylinder",
        "catenoid",
        "saddle",
        "enneper",
        "enneper-hat",
        "catenoid-hat",
        "bipolar",
        "bipolar-catenoid",
        "delaunay",
    ]
}

fn param(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn check_params(params: &BTreeMap<String, f64>, known: &[&str]) -> VerifyResult<()> {
    match params.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(VerifyError::config(
            format!("surface.params.{k}"),
            format!("unknown parameter; known: {}", known.join(", ")),
        )),
        None => Ok(()),
    }
}

fn delaunay_params(params: &BTreeMap<String, f64>) -> VerifyResult<DelaunayParams> {
    check_params(params, &["h", "c0", "n", "sign", "phi0", "dphi0"])?;
    let d = DelaunayParams::default();
    let n = param(params, "n", d.n as f64);
    if !(n == 2.0 || n == 3.0) {
        return Err(VerifyError::config("surface.params.n", "charts support n = 2 or n = 3"));
    }
    Ok(DelaunayParams {
        h: param(params, "h", d.h),
        c0: param(params, "c0", d.c0),
        n: n as usize,
        sign: param(params, "sign", d.sign),
        phi0: param(params, "phi0", d.phi0),
        dphi0: param(params, "dphi0", d.dphi0),
        ..d
    })
}

fn weierstrass(kind: &str) -> VerifyResult<WeierstrassData> {
    match kind {
        "enneper" | "catenoid" => Ok(WeierstrassData::stock(kind)?),
        other => Err(VerifyError::UnknownSurface(other.to_string())),
    }
}

/// Builds a chart by kind name. `phi` and `theta` are used by the minimal
/// surface kinds (defaults π/6 and 0).
pub fn build_surface(
    kind: &str,
    params: &BTreeMap<String, f64>,
    phi: Option<f64>,
    theta: Option<f64>,
) -> VerifyResult<Chart<f64>> {
    let phi = phi.unwrap_or(FRAC_PI_6);
    let theta = theta.unwrap_or(0.0);
    let chart = match kind {
        "plane" | "sphere" | "catenoid" | "saddle" => {
            check_params(params, &[])?;
            match kind {
                "plane" => stock::plane()?,
                "sphere" => stock::round_sphere()?,
                "catenoid" => stock::catenoid()?,
                _ => stock::saddle_graph()?,
            }
        }
        "cylinder" => {
            check_params(params, &["r"])?;
            stock::circular_cylinder(param(params, "r", 1.0))?
        }
        "elliptic-cylinder" => {
            check_params(params, &["a", "b"])?;
            stock::elliptic_cylinder(param(params, "a", 2.0), param(params, "b", 1.0))?
        }
        "enneper" => {
            check_params(params, &[])?;
            weierstrass_chart(&WeierstrassData::enneper(), theta)?.chart
        }
        "enneper-hat" | "catenoid-hat" => {
            check_params(params, &[])?;
            orthogonal_sum_hat(&weierstrass(kind.trim_end_matches("-hat"))?, theta, phi)?
        }
        "bipolar" | "bipolar-catenoid" => {
            check_params(params, &[])?;
            let base = if kind == "bipolar" { "enneper" } else { "catenoid" };
            bipolar_chart(&orthogonal_sum_hat(&weierstrass(base)?, theta, phi)?)?.chart
        }
        "delaunay" => {
            let p = delaunay_params(params)?;
            let prof = Arc::new(delaunay_profile(p)?);
            prof.chart(DELAUNAY_X, DELAUNAY_THETA, RotationLayout::AboutFirstAxis)?
        }
        other => return Err(VerifyError::UnknownSurface(other.to_string())),
    };
    Ok(chart)
}

const DELAUNAY_X: (f64, f64) = (0.05, 0.45);
const DELAUNAY_THETA: (f64, f64) = (-1.0, 1.0);

/// Tensor grid over `chart`'s domain with `counts` points per axis; angle
/// axes of circle-bundle charts (range `2π`) are sampled periodically.
pub fn surface_grid(chart: &Chart<f64>, counts: &[usize]) -> VerifyResult<SampleGrid> {
    if counts.len() != chart.dim() {
        return Err(VerifyError::config(
            "grid.counts",
            format!("{} counts for a {}-parameter chart", counts.len(), chart.dim()),
        ));
    }
    let mut grid = SampleGrid::new(counts.to_vec(), chart.domain().to_vec())?;
    for (k, &(a, b)) in chart.domain().iter().enumerate() {
        if k == 2 && ((b - a) - 2.0 * PI).abs() < 1e-12 {
            grid = grid.with_periodic(k);
        }
    }
    Ok(grid)
}

/// Mean curvature and nullity at every grid point; singular points are skipped.
pub fn sample_records(chart: &Chart<f64>, grid: &SampleGrid) -> Vec<PointRecord> {
    use rayon::prelude::*;
    let points = grid.points();
    points
        .par_iter()
        .filter_map(|p| point_record(chart, p))
        .collect()
}

/// Writes the per-point CSV for `chart` over `grid` and returns the row count.
pub fn write_records_csv(chart: &Chart<f64>, grid: &SampleGrid, path: &Path) -> VerifyResult<usize> {
    let rows = sample_records(chart, grid);
    let names: &[&str] = match chart.dim() {
        1 => &["u"],
        2 => &["u", "v"],
        _ => &["u", "v", "theta"],
    };
    let mut buf = Vec::new();
    write_point_csv(names, &rows, &mut buf).expect("writing to memory");
    write_atomic(path, &buf)?;
    Ok(rows.len())
}

/// Writes an OBJ mesh of `chart` and returns the vertex count.
pub fn write_mesh(chart: &Chart<f64>, counts: [usize; 2], path: &Path) -> VerifyResult<usize> {
    let mut buf = Vec::new();
    let n = write_obj(chart, counts, &mut buf).map_err(|e| VerifyError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    write_atomic(path, &buf)?;
    Ok(n)
}

fn info(name: &str) -> VerifyResult<&'static ScenarioInfo> {
    SCENARIOS
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| VerifyError::UnknownScenario(name.to_string()))
}

/// The built-in configuration of a scenario.
pub fn default_config(name: &str) -> VerifyResult<ScenarioConfig> {
    info(name)?;
    let surface = |kind: &str| {
        Some(SurfaceSpec {
            kind: kind.to_string(),
            params: BTreeMap::new(),
        })
    };
    let (surface, phi, theta, counts) = match name {
        "cylinder-sanity" => (None, None, None, vec![9, 9]),
        "prop-ricci" => (surface("enneper"), Some(FRAC_PI_6), Some(0.0), vec![21, 21]),
        "bipolar-full" => (surface("enneper"), Some(FRAC_PI_6), Some(0.0), vec![9, 9, 16]),
        "composition" => (None, None, None, vec![15, 15]),
        _ => (surface("delaunay"), None, None, vec![9, 9, 5]),
    };
    Ok(ScenarioConfig {
        scenario: name.to_string(),
        surface,
        phi,
        theta,
        grid: GridSpec {
            counts: Some(counts),
            ranges: None,
            jitter: None,
        },
        tolerances: BTreeMap::new(),
        seed: 0,
        outputs: OutputSpec::default(),
    })
}

struct Resolved {
    counts: Vec<usize>,
    ranges: Option<Vec<(f64, f64)>>,
    jitter: f64,
}

fn resolve_grid(config: &ScenarioConfig, default_counts: &[usize]) -> VerifyResult<Resolved> {
    let counts = config.grid.counts.clone().unwrap_or_else(|| default_counts.to_vec());
    if counts.len() != default_counts.len() {
        return Err(VerifyError::config(
            "grid.counts",
            format!("scenario `{}` needs {} axes, got {}", config.scenario, default_counts.len(), counts.len()),
        ));
    }
    if let Some(r) = &config.grid.ranges {
        if r.len() != counts.len() {
            return Err(VerifyError::config("grid.ranges", format!("{} ranges for {} axes", r.len(), counts.len())));
        }
    }
    Ok(Resolved {
        counts,
        ranges: config.grid.ranges.clone(),
        jitter: config.grid.jitter.unwrap_or(0.0),
    })
}

fn angle(key: &'static str, value: Option<f64>, default: f64) -> VerifyResult<f64> {
    let v = value.unwrap_or(default);
    if !v.is_finite() {
        return Err(VerifyError::config(key, "must be finite"));
    }
    Ok(v)
}

fn minimal_kind(config: &ScenarioConfig) -> VerifyResult<WeierstrassData> {
    let spec = config.surface.clone().unwrap_or(SurfaceSpec {
        kind: "enneper".into(),
        params: BTreeMap::new(),
    });
    check_params(&spec.params, &[])?;
    match spec.kind.as_str() {
        "enneper" | "catenoid" => weierstrass(&spec.kind),
        other => Err(VerifyError::config(
            "surface.kind",
            format!("`{other}` is not an associated-family seed; use enneper or catenoid"),
        )),
    }
}

fn torus_like(a: f64, b: f64) -> Result<Chart<f64>> {
    Chart::new("torus-like", AmbientSpace::Euclidean(3), vec![(-1.0, 1.0), (-PI, PI)], move |p| {
        let r = &p[0].cos().scale(b) + a;
        let (s, c) = p[1].sin_cos();
        Ok(vec![&r * &c, &r * &s, p[0].sin().scale(b)])
    })
}

/// Sphere, torus-like and saddle hypersurfaces against constant, linear and
/// oscillating curvature functions.
pub fn composition_cases() -> VerifyResult<Vec<CompositionCase>> {
    let bases = [
        ("sphere", stock::round_sphere()?),
        ("torus-like", torus_like(2.0, 0.5)?),
        ("saddle", stock::saddle_graph()?),
    ];
    let curvatures: [(&str, CurvatureFn); 3] = [
        ("k=1", Arc::new(|s: &Jet<f64>| Ok(s.constant_like(1.0)))),
        ("k=s/2", Arc::new(|s: &Jet<f64>| Ok(s.scale(0.5)))),
        ("k=0.5+0.3sin2s", Arc::new(|s: &Jet<f64>| Ok(&s.scale(2.0).sin().scale(0.3) + 0.5))),
    ];
    let mut out = Vec::new();
    for (klabel, k) in &curvatures {
        let curve = Arc::new(plane_curve_from_curvature(k.clone(), (-3.0, 3.0), 601)?);
        for (blabel, base) in &bases {
            out.push(CompositionCase {
                label: format!("{blabel} {klabel}"),
                data: compose_with_curve_cylinder(base, curve.clone(), 0)?,
            });
        }
    }
    Ok(out)
}

fn run_inner(config: &ScenarioConfig) -> VerifyResult<VerificationReport> {
    info(&config.scenario)?;
    match config.scenario.as_str() {
        "cylinder-sanity" => {
            if config.surface.is_some() {
                return Err(VerifyError::config("surface", "cylinder-sanity uses its own fixtures"));
            }
            let tol = config.resolve_tolerances(&[("mean_curvature", 1e-9)])?;
            let g = resolve_grid(config, &[9, 9])?;
            if g.ranges.is_some() {
                return Err(VerifyError::config("grid.ranges", "cylinder-sanity uses the fixture domains"));
            }
            check_sanity(&g.counts, g.jitter, config.seed, tol["mean_curvature"])
        }
        "prop-ricci" => {
            let data = minimal_kind(config)?;
            let phi = angle("phi", config.phi, FRAC_PI_6)?;
            let theta = angle("theta", config.theta, 0.0)?;
            let d = PropRicciTolerances::defaults(phi);
            let tol = config.resolve_tolerances(&[
                ("minimality", d.minimality),
                ("first_ellipse", d.first_ellipse),
                ("first_ellipse_oracle", d.first_ellipse_oracle),
                ("second_ellipse", d.second_ellipse),
            ])?;
            let g = resolve_grid(config, &[21, 21])?;
            let ranges = g.ranges.unwrap_or_else(|| data.domain.to_vec());
            let grid = SampleGrid::new(g.counts, ranges)?.with_jitter(g.jitter, config.seed)?;
            let tol = PropRicciTolerances {
                minimality: tol["minimality"],
                first_ellipse: tol["first_ellipse"],
                first_ellipse_oracle: tol["first_ellipse_oracle"],
                second_ellipse: tol["second_ellipse"],
            };
            check_prop_ricci(&data, theta, phi, &grid, &tol)
        }
        "bipolar-full" => {
            let data = minimal_kind(config)?;
            let phi = angle("phi", config.phi, FRAC_PI_6)?;
            let theta = angle("theta", config.theta, 0.0)?;
            let d = BipolarTolerances::default();
            let tol = config.resolve_tolerances(&[
                ("membership", d.membership),
                ("leaf_constancy", d.leaf_constancy),
                ("complex_structure", d.complex_structure),
                ("ellipticity", d.ellipticity),
                ("first_ellipse", d.first_ellipse),
                ("c1", d.c1),
                ("c3", d.c3),
            ])?;
            let g = resolve_grid(config, &[9, 9, 16])?;
            let mut ranges = g.ranges.unwrap_or_else(|| {
                let mut r = data.domain.to_vec();
                r.push((0.0, 2.0 * PI));
                r
            });
            ranges[2] = (0.0, 2.0 * PI);
            let grid = SampleGrid::new(g.counts, ranges)?
                .with_periodic(2)
                .with_jitter(g.jitter, config.seed)?;
            let hat = orthogonal_sum_hat(&data, theta, phi)?;
            let hat = hat.with_domain(grid.ranges[..2].to_vec())?;
            let tol = BipolarTolerances {
                membership: tol["membership"],
                leaf_constancy: tol["leaf_constancy"],
                complex_structure: tol["complex_structure"],
                ellipticity: tol["ellipticity"],
                first_ellipse: tol["first_ellipse"],
                c1: tol["c1"],
                c3: tol["c3"],
            };
            check_bipolar_structure(&hat, &grid, &tol)
        }
        "composition" => {
            if config.surface.is_some() {
                return Err(VerifyError::config("surface", "composition uses its own fixtures"));
            }
            let tol = config.resolve_tolerances(&[("identity", 1e-8), ("gradient", 1e-9)])?;
            let g = resolve_grid(config, &[15, 15])?;
            if g.ranges.is_some() {
                return Err(VerifyError::config("grid.ranges", "composition uses the fixture domains"));
            }
            check_composition_identity(&composition_cases()?, &g.counts, g.jitter, config.seed, tol["identity"], tol["gradient"])
        }
        _ => {
            let spec = config.surface.clone().unwrap_or(SurfaceSpec {
                kind: "delaunay".into(),
                params: BTreeMap::new(),
            });
            if spec.kind != "delaunay" {
                return Err(VerifyError::config("surface.kind", "the delaunay scenario needs kind `delaunay`"));
            }
            let params = delaunay_params(&spec.params)?;
            let tol = config.resolve_tolerances(&[("ode_residual", 1e-7), ("mean_curvature", 1e-5)])?;
            let default_counts: Vec<usize> = if params.n == 3 { vec![9, 9, 5] } else { vec![9, 9] };
            let g = resolve_grid(config, &default_counts)?;
            let (x, t) = match &g.ranges {
                Some(r) => (r[0], r[1]),
                None => (DELAUNAY_X, DELAUNAY_THETA),
            };
            check_delaunay(params, x, t, &g.counts, g.jitter, config.seed, tol["ode_residual"], tol["mean_curvature"])
        }
    }
}

/// Runs a scenario on a thread pool sized by the environment.
pub fn run_scenario(config: &ScenarioConfig) -> VerifyResult<VerificationReport> {
    with_thread_pool(|| run_inner(config))?
}

/// The chart a scenario is about, for mesh and CSV output.
fn scenario_surface(config: &ScenarioConfig) -> VerifyResult<Option<Chart<f64>>> {
    let chart = match config.scenario.as_str() {
        "cylinder-sanity" => Some(stock::circular_cylinder(1.0)?),
        "prop-ricci" => {
            let kind = config.surface.as_ref().map_or("enneper", |s| s.kind.as_str());
            Some(build_surface(&format!("{kind}-hat"), &BTreeMap::new(), config.phi, config.theta)?)
        }
        "bipolar-full" => {
            let kind = config.surface.as_ref().map_or("enneper", |s| s.kind.as_str());
            let kind = if kind == "catenoid" { "bipolar-catenoid" } else { "bipolar" };
            Some(build_surface(kind, &BTreeMap::new(), config.phi, config.theta)?)
        }
        "delaunay" => {
            let params = config.surface.as_ref().map(|s| s.params.clone()).unwrap_or_default();
            Some(build_surface("delaunay", &params, None, None)?)
        }
        _ => None,
    };
    Ok(chart)
}

/// [`run_scenario`], then writes the outputs named in `config.outputs`.
pub fn run_scenario_with_outputs(config: &ScenarioConfig) -> VerifyResult<VerificationReport> {
    let report = run_scenario(config)?;
    let out = &config.outputs;
    if let Some(p) = &out.report_path {
        write_atomic(Path::new(p), report.to_json().as_bytes())?;
    }
    if out.mesh_path.is_some() || out.csv_path.is_some() {
        if let Some(chart) = scenario_surface(config)? {
            let counts = resolve_grid(config, &config.grid.counts.clone().unwrap_or_else(|| vec![9; chart.dim()]))?.counts;
            if let Some(p) = &out.mesh_path {
                write_mesh(&chart, [counts[0], counts.get(1).copied().unwrap_or(1)], Path::new(p))?;
            }
            if let Some(p) = &out.csv_path {
                let mut c = counts.clone();
                c.resize(chart.dim(), 9);
                with_thread_pool(|| write_records_csv(&chart, &surface_grid(&chart, &c)?, Path::new(p)))??;
            }
        }
    }
    Ok(report)
}
