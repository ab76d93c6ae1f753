//! OBJ meshes over parameter grids and per-point CSV tables.

use std::io::{self, Write};

use crate::Scalar;

use super::chart::Chart;
use super::forms::{fundamental_forms, relative_nullity, NULLITY_REL_TOL};
use super::chart::evaluate_tower;

/// Evenly spaced samples of `[a, b]`, endpoints included.
pub fn linspace<T: Scalar>(a: T, b: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![(a + b) * T::lit(0.5)],
        _ => {
            let step = (b - a) / T::from_usize_lossy(count - 1);
            (0..count)
                .map(|i| if i + 1 == count { b } else { a + step * T::from_usize_lossy(i) })
                .collect()
        }
    }
}

/// Writes an OBJ quad mesh of `chart` over a `counts[0] × counts[1]` grid of
/// its first two parameters. A third parameter, if any, is held at the lower
/// end of its range (the θ = 0 cross-section for circle-bundle charts). Only
/// the first three ambient coordinates are written; the header says so when
/// the ambient space is larger. Returns the vertex count.
pub fn write_obj<T: Scalar, W: Write>(
    chart: &Chart<T>,
    counts: [usize; 2],
    out: &mut W,
) -> io::Result<usize> {
    let dom = chart.domain();
    let us = linspace(dom[0].0, dom[0].1, counts[0]);
    let vs = if chart.dim() >= 2 {
        linspace(dom[1].0, dom[1].1, counts[1])
    } else {
        vec![T::zero()]
    };
    writeln!(out, "# {}", chart.label())?;
    let m = chart.ambient().coord_dim();
    if m > 3 {
        writeln!(out, "# projected from R^{m} onto the first three coordinates")?;
    }
    let mut written = 0;
    for &u in &us {
        for &v in &vs {
            let mut p = vec![u];
            if chart.dim() >= 2 {
                p.push(v);
            }
            if chart.dim() == 3 {
                p.push(dom[2].0);
            }
            let x = chart
                .position(&p)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
            let c = |k: usize| x.get(k).map_or(0.0, |t| t.to_f64_lossy());
            writeln!(out, "v {} {} {}", c(0), c(1), c(2))?;
            written += 1;
        }
    }
    let nv = vs.len();
    if chart.dim() >= 2 {
        for i in 0..us.len().saturating_sub(1) {
            for j in 0..nv.saturating_sub(1) {
                let a = i * nv + j + 1;
                writeln!(out, "f {} {} {} {}", a, a + nv, a + nv + 1, a + 1)?;
            }
        }
    } else {
        for i in 1..us.len() {
            writeln!(out, "l {} {}", i, i + 1)?;
        }
    }
    Ok(written)
}

/// One CSV row of per-point data.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub params: Vec<f64>,
    pub mean_curvature: f64,
    pub nullity: usize,
}

/// Mean curvature and nullity at a point; `None` at singular points.
pub fn point_record<T: Scalar>(chart: &Chart<T>, point: &[T]) -> Option<PointRecord> {
    let tower = evaluate_tower(chart, point, 2).ok()?;
    let ff = fundamental_forms(&tower, chart.ambient()).ok()?;
    let nu = relative_nullity(&ff, T::lit(NULLITY_REL_TOL));
    Some(PointRecord {
        params: point.iter().map(|x| x.to_f64_lossy()).collect(),
        mean_curvature: ff.mean_curvature.to_f64_lossy(),
        nullity: nu.index,
    })
}

/// `param names..., H, nu`.
pub fn write_point_csv<W: Write>(
    param_names: &[&str],
    rows: &[PointRecord],
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "{},H,nu", param_names.join(","))?;
    for r in rows {
        let params: Vec<String> = r.params.iter().map(f64::to_string).collect();
        writeln!(out, "{},{},{}", params.join(","), r.mean_curvature, r.nullity)?;
    }
    Ok(())
}
