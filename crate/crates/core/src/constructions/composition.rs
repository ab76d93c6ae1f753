use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::immersion::export::linspace;
use crate::immersion::{evaluate_tower, fundamental_forms, AmbientSpace, Chart};
use crate::linalg::dot;

use super::curve::PlaneCurve;

/// Product chart `g × id_{ℝ^k}`: the extra parameters are appended to the
/// ambient coordinates of `g`, each ranging over `[−1, 1]`.
pub fn cylinder_chart(g: &Chart<f64>, k: usize) -> Result<Chart<f64>> {
    let AmbientSpace::Euclidean(q) = g.ambient() else {
        return Err(GeometryError::InvalidInput("cylinders are built over Euclidean charts".into()));
    };
    if k == 0 || g.dim() + k > 3 {
        return Err(GeometryError::InvalidInput(format!(
            "cylinder over a {}-chart with {k} extra directions exceeds three parameters",
            g.dim()
        )));
    }
    let n = g.dim();
    let mut domain = g.domain().to_vec();
    domain.extend(std::iter::repeat((-1.0, 1.0)).take(k));
    let inner = g.clone();
    Chart::new(
        format!("{} × ℝ^{k}", g.label()),
        AmbientSpace::Euclidean(q + k),
        domain,
        move |p| {
            let mut out = inner.evaluate(&p[..n])?;
            out.extend(p[n..].iter().cloned());
            Ok(out)
        },
    )
}

/// `f = h ∘ F` with `h = γ × id`, replacing the `axis` coordinate of a
/// hypersurface `F` by the two coordinates of `γ(F_a)`.
#[derive(Debug, Clone)]
pub struct CompositionData {
    pub base: Chart<f64>,
    pub curve: Arc<PlaneCurve>,
    pub axis: usize,
    pub chart: Chart<f64>,
}

/// Pointwise quantities entering the mean-curvature identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionPoint {
    pub point: Vec<f64>,
    /// Height `F_a = ⟨F, a⟩`.
    pub height: f64,
    /// `⟨ξ, a⟩` for the unit normal `ξ` of `F`.
    pub normal_height: f64,
    /// `‖grad F_a‖²`.
    pub grad_height_sq: f64,
    pub curvature: f64,
    pub mean_curvature_base: f64,
    pub mean_curvature: f64,
    /// `|H_f² − H_F² − k²(1 − ⟨ξ,a⟩²)²/n²| / (1 + H_f²)`.
    pub identity_residual: f64,
    /// `|‖grad F_a‖² − (1 − ⟨ξ,a⟩²)|`.
    pub frame_residual: f64,
}

/// Builds `h ∘ F`; errors when `F_a` leaves the arclength range of `γ` on a
/// `9^n` scan of the domain.
pub fn compose_with_curve_cylinder(
    f: &Chart<f64>,
    curve: Arc<PlaneCurve>,
    axis: usize,
) -> Result<CompositionData> {
    let AmbientSpace::Euclidean(m) = f.ambient() else {
        return Err(GeometryError::InvalidInput("compositions need a Euclidean hypersurface".into()));
    };
    if m != f.dim() + 1 {
        return Err(GeometryError::InvalidInput(format!(
            "{}-chart in ℝ^{m} is not a hypersurface",
            f.dim()
        )));
    }
    if axis >= m {
        return Err(GeometryError::InvalidInput(format!("axis {axis} outside ℝ^{m}")));
    }
    let (a, b) = curve.s_range();
    for p in scan_points(f.domain(), 9) {
        let h = f.position(&p)?[axis];
        if !(h >= a && h <= b) {
            return Err(GeometryError::RangeViolation { value: h, min: a, max: b });
        }
    }
    let inner = f.clone();
    let gamma = curve.clone();
    let chart = Chart::new(
        format!("{} composed with a curve cylinder", f.label()),
        AmbientSpace::Euclidean(m + 1),
        f.domain().to_vec(),
        move |p| {
            let mut out = inner.evaluate(p)?;
            let [x, y] = gamma.position_jet(&out[axis])?;
            out[axis] = x;
            out.insert(axis + 1, y);
            Ok(out)
        },
    )?;
    Ok(CompositionData {
        base: f.clone(),
        curve,
        axis,
        chart,
    })
}

/// Tensor grid with `count` points per parameter, endpoints included.
pub(crate) fn scan_points(domain: &[(f64, f64)], count: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for &(a, b) in domain {
        let axis = linspace(a, b, count);
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

impl CompositionData {
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Evaluates both immersions at `p` and the identity residuals.
    pub fn evaluate(&self, p: &[f64]) -> Result<CompositionPoint> {
        let n = self.dim();
        let tf = evaluate_tower(&self.base, p, 2)?;
        let ff = fundamental_forms(&tf, self.base.ambient())?;
        let th = evaluate_tower(&self.chart, p, 2)?;
        let fh = fundamental_forms(&th, self.chart.ambient())?;
        let height = ff.position[self.axis];
        let xi = &ff.normal_frame[0];
        let normal_height = xi[self.axis];
        // grad F_a = g^{-1} dF_a with dF_a = (∂_i F)_a
        let dfa: Vec<f64> = ff.jacobian.iter().map(|col| col[self.axis]).collect();
        let ginv = ff.metric.inverse().ok_or_else(|| GeometryError::SingularPoint {
            point: p.to_vec(),
            ratio: 0.0,
        })?;
        let w = ginv.matvec(&dfa);
        let grad_height_sq = dot(&dfa, &w);
        let k = self.curve.curvature_at(height)?;
        let hf = fh.mean_curvature;
        let hb = ff.mean_curvature;
        let corr = k * (1.0 - normal_height * normal_height) / n as f64;
        let identity_residual = (hf * hf - hb * hb - corr * corr).abs() / (1.0 + hf * hf);
        let frame_residual = (grad_height_sq - (1.0 - normal_height * normal_height)).abs();
        Ok(CompositionPoint {
            point: p.to_vec(),
            height,
            normal_height,
            grad_height_sq,
            curvature: k,
            mean_curvature_base: hb,
            mean_curvature: hf,
            identity_residual,
            frame_residual,
        })
    }
}
