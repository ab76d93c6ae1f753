use std::f64::consts::PI;

use crate::error::{GeometryError, Result};
use crate::immersion::export::{linspace, point_record, PointRecord};
use crate::immersion::{check_regular, evaluate_tower, AmbientSpace, Chart};
use crate::linalg::{dot, Matrix};
use crate::jets::Jet;

/// Relative tolerance of the conformality check on the base surface.
pub const CONFORMAL_TOL: f64 = 1e-8;

/// The unit-tangent-bundle chart `Φ(u, v, θ) = (cos θ ∂_u g + sin θ ∂_v g)/λ`
/// of a conformal surface `g`, landing in the unit sphere.
#[derive(Debug, Clone)]
pub struct UnitTangentChart {
    pub base: Chart<f64>,
    pub chart: Chart<f64>,
    /// Construction-grid points where the induced metric degenerates.
    pub singular_points: Vec<[f64; 3]>,
}

/// `(λ², relative conformality defect)` of a surface chart at a point.
pub fn conformality(g: &Chart<f64>, p: &[f64]) -> Result<(f64, f64)> {
    let t = evaluate_tower(g, p, 1)?;
    let d = t.first_derivatives()?;
    let e = d[0].iter().map(|x| x * x).sum::<f64>();
    let gg = d[1].iter().map(|x| x * x).sum::<f64>();
    let f = d[0].iter().zip(&d[1]).map(|(a, b)| a * b).sum::<f64>();
    let l2 = 0.5 * (e + gg);
    Ok((l2, ((e - gg).abs() + 2.0 * f.abs()) / l2))
}

/// Builds `Φ_g` and scans a `9 × 9 × 8` construction grid for singular points.
pub fn bipolar_chart(g: &Chart<f64>) -> Result<UnitTangentChart> {
    bipolar_chart_scanned(g, [9, 9, 8])
}

/// [`bipolar_chart`] with an explicit scan grid over `(u, v, θ ∈ [0, 2π))`.
pub fn bipolar_chart_scanned(g: &Chart<f64>, scan: [usize; 3]) -> Result<UnitTangentChart> {
    if g.dim() != 2 {
        return Err(GeometryError::InvalidInput("bipolar charts need a surface".into()));
    }
    let AmbientSpace::Euclidean(q) = g.ambient() else {
        return Err(GeometryError::InvalidInput("base surface must lie in Euclidean space".into()));
    };
    if q < 4 {
        return Err(GeometryError::InvalidInput(format!(
            "base surface lies in ℝ^{q}, need q ≥ 4"
        )));
    }
    let dom = g.domain().to_vec();
    for u in linspace(dom[0].0, dom[0].1, scan[0]) {
        for v in linspace(dom[1].0, dom[1].1, scan[1]) {
            let (l2, defect) = conformality(g, &[u, v])?;
            if !(l2 > 0.0) || !(defect <= CONFORMAL_TOL) {
                return Err(GeometryError::HypothesisViolation(format!(
                    "base surface is not conformal at ({u}, {v}): defect {defect:e}"
                )));
            }
        }
    }
    let base = g.clone();
    let inner = g.clone();
    let chart = Chart::new(
        format!("bipolar of {}", g.label()),
        AmbientSpace::Sphere(q - 1),
        vec![dom[0], dom[1], (0.0, 2.0 * PI)],
        move |p| bipolar_eval(&inner, p),
    )?;
    let mut singular_points = Vec::new();
    for u in linspace(dom[0].0, dom[0].1, scan[0]) {
        for v in linspace(dom[1].0, dom[1].1, scan[1]) {
            for k in 0..scan[2] {
                let th = 2.0 * PI * k as f64 / scan[2] as f64;
                let p = [u, v, th];
                let d = evaluate_tower(&chart, &p, 1)?.first_derivatives()?;
                let mut g = Matrix::zeros(3, 3);
                for i in 0..3 {
                    for j in 0..3 {
                        g[(i, j)] = dot(&d[i], &d[j]);
                    }
                }
                let singular = check_regular(&g, &p).is_err();
                if singular {
                    singular_points.push(p);
                }
            }
        }
    }
    Ok(UnitTangentChart {
        base,
        chart,
        singular_points,
    })
}

fn bipolar_eval(g: &Chart<f64>, p: &[Jet<f64>]) -> Result<Vec<Jet<f64>>> {
    let order = p[0].order();
    let base = [p[0].value(), p[1].value()];
    let tower = evaluate_tower(g, &base, order + 1)?;
    let uv = [p[0].clone(), p[1].clone()];
    let mut du = Vec::with_capacity(tower.coords.len());
    let mut dv = Vec::with_capacity(tower.coords.len());
    for c in &tower.coords {
        du.push(c.derivative(0)?.compose_multivariate(&uv)?);
        dv.push(c.derivative(1)?.compose_multivariate(&uv)?);
    }
    let e = crate::jets::dot(&du, &du).expect("nonempty coordinates");
    let gg = crate::jets::dot(&dv, &dv).expect("nonempty coordinates");
    let inv_l = (&e + &gg).scale(0.5).sqrt()?.recip()?;
    let (s, c) = p[2].sin_cos();
    let cl = &c * &inv_l;
    let sl = &s * &inv_l;
    Ok(du.iter().zip(&dv).map(|(a, b)| &(a * &cl) + &(b * &sl)).collect())
}

impl UnitTangentChart {
    pub fn is_singular(&self, p: &[f64]) -> bool {
        self.singular_points
            .iter()
            .any(|s| s.iter().zip(p).all(|(a, b)| (a - b).abs() < 1e-12))
    }

    /// Conformal factor `λ` of the base surface.
    pub fn conformal_factor(&self, u: f64, v: f64) -> Result<f64> {
        Ok(conformality(&self.base, &[u, v])?.0.sqrt())
    }

    /// Mean curvature and nullity on `counts[0] × counts[1]` base points with
    /// `counts[2]` fiber angles in `[0, 2π)`; singular points are skipped.
    pub fn fiber_scan(&self, counts: [usize; 3]) -> Vec<PointRecord> {
        let dom = self.chart.domain();
        let mut rows = Vec::new();
        for u in linspace(dom[0].0, dom[0].1, counts[0]) {
            for v in linspace(dom[1].0, dom[1].1, counts[1]) {
                for k in 0..counts[2] {
                    let th = 2.0 * PI * k as f64 / counts[2] as f64;
                    if let Some(r) = point_record(&self.chart, &[u, v, th]) {
                        rows.push(r);
                    }
                }
            }
        }
        rows
    }
}
