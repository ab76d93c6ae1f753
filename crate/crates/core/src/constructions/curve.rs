use std::io::{self, Write};
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::jets::{series, Jet, MAX_ORDER};

/// Jet-evaluable signed curvature `s ↦ k(s)`.
pub type CurvatureFn = Arc<dyn Fn(&Jet<f64>) -> Result<Jet<f64>> + Send + Sync>;

/// Largest RK4 step used between stored samples.
pub const CURVE_MAX_STEP: f64 = 1e-3;

/// Unit-speed plane curve integrated from its signed curvature, starting at
/// the origin with tangent `(1, 0)` at the left end of `s_range`.
#[derive(Clone)]
pub struct PlaneCurve {
    pub s: Vec<f64>,
    pub positions: Vec<[f64; 2]>,
    pub tangents: Vec<[f64; 2]>,
    pub normals: Vec<[f64; 2]>,
    /// Largest deviation of `‖T‖` from 1 seen before renormalization.
    pub max_speed_drift: f64,
    curvature: CurvatureFn,
    /// Taylor coefficients of `(ψ, γ_x, γ_y)` at each sample, `ψ` the tangent angle.
    node_series: Vec<[Vec<f64>; 3]>,
}

impl std::fmt::Debug for PlaneCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PlaneCurve")
            .field("s_range", &self.s_range())
            .field("samples", &self.s.len())
            .finish_non_exhaustive()
    }
}

fn scalar_curvature(k: &CurvatureFn, s: f64) -> Result<f64> {
    let v = k(&Jet::variable(s, 0, 1, 0)?)?.value();
    if !v.is_finite() {
        return Err(GeometryError::Integration(format!("curvature is not finite at s = {s}")));
    }
    Ok(v)
}

type Frenet = [f64; 6];

fn frenet_rhs(k: f64, y: &Frenet) -> Frenet {
    [y[2], y[3], k * y[4], k * y[5], -k * y[2], -k * y[3]]
}

fn axpy(a: f64, x: &Frenet, y: &Frenet) -> Frenet {
    std::array::from_fn(|i| y[i] + a * x[i])
}

/// `(ψ, γ_x, γ_y)` series about `s0` from the curvature series and the values there.
fn local_series(k: &CurvatureFn, s0: f64, psi0: f64, pos: [f64; 2]) -> Result<[Vec<f64>; 3]> {
    let kj = k(&Jet::variable(s0, 0, 1, MAX_ORDER - 1)?)?;
    let psi = series::integrate(&[kj.coeffs(), &[0.0]].concat(), psi0);
    let psi_jet = Jet::from_coeffs(1, MAX_ORDER, psi.clone())?;
    let (sin, cos) = psi_jet.sin_cos();
    let x = series::integrate(&[cos.coeffs(), &[0.0]].concat(), pos[0]);
    let y = series::integrate(&[sin.coeffs(), &[0.0]].concat(), pos[1]);
    Ok([psi, x[..=MAX_ORDER].to_vec(), y[..=MAX_ORDER].to_vec()])
}

/// Integrates `γ′ = T`, `T′ = kN`, `N′ = −kT` by RK4 over `s_range`, storing
/// `samples` evenly spaced points. The frame is renormalized after every step.
pub fn plane_curve_from_curvature(
    k: CurvatureFn,
    s_range: (f64, f64),
    samples: usize,
) -> Result<PlaneCurve> {
    let (a, b) = s_range;
    if !(b > a) || samples < 2 {
        return Err(GeometryError::InvalidInput("need a nonempty range and two samples".into()));
    }
    let spacing = (b - a) / (samples - 1) as f64;
    let sub = (spacing / CURVE_MAX_STEP).ceil().max(1.0) as usize;
    let h = spacing / sub as f64;
    let mut y: Frenet = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0];
    let mut s_vals = vec![a];
    let mut positions = vec![[0.0, 0.0]];
    let mut tangents = vec![[1.0, 0.0]];
    let mut normals = vec![[0.0, 1.0]];
    let mut drift: f64 = 0.0;
    for i in 1..samples {
        let s_start = a + spacing * (i - 1) as f64;
        for j in 0..sub {
            let s = s_start + h * j as f64;
            let k0 = scalar_curvature(&k, s)?;
            let km = scalar_curvature(&k, s + 0.5 * h)?;
            let k1 = scalar_curvature(&k, s + h)?;
            let d1 = frenet_rhs(k0, &y);
            let d2 = frenet_rhs(km, &axpy(0.5 * h, &d1, &y));
            let d3 = frenet_rhs(km, &axpy(0.5 * h, &d2, &y));
            let d4 = frenet_rhs(k1, &axpy(h, &d3, &y));
            y = std::array::from_fn(|c| y[c] + h / 6.0 * (d1[c] + 2.0 * d2[c] + 2.0 * d3[c] + d4[c]));
            let speed = y[2].hypot(y[3]);
            drift = drift.max((speed - 1.0).abs());
            y[2] /= speed;
            y[3] /= speed;
            y[4] = -y[3];
            y[5] = y[2];
            if !y.iter().all(|v| v.is_finite()) {
                return Err(GeometryError::Integration(format!("Frenet system blew up at s = {s}")));
            }
        }
        s_vals.push(if i == samples - 1 { b } else { a + spacing * i as f64 });
        positions.push([y[0], y[1]]);
        tangents.push([y[2], y[3]]);
        normals.push([y[4], y[5]]);
    }
    let node_series = s_vals
        .iter()
        .zip(positions.iter().zip(&tangents))
        .map(|(&s, (&p, t))| local_series(&k, s, t[1].atan2(t[0]), p))
        .collect::<Result<Vec<_>>>()?;
    Ok(PlaneCurve {
        s: s_vals,
        positions,
        tangents,
        normals,
        max_speed_drift: drift,
        curvature: k,
        node_series,
    })
}

impl PlaneCurve {
    pub fn s_range(&self) -> (f64, f64) {
        (self.s[0], *self.s.last().expect("at least two samples"))
    }

    fn nearest(&self, s: f64) -> Result<usize> {
        let (a, b) = self.s_range();
        let slack = 1e-9 * (b - a);
        if !(s >= a - slack && s <= b + slack) {
            return Err(GeometryError::RangeViolation { value: s, min: a, max: b });
        }
        let t = (s - a) / (b - a) * (self.s.len() - 1) as f64;
        Ok((t.round().max(0.0) as usize).min(self.s.len() - 1))
    }

    /// `(ψ(s), γ(s))` from the Taylor expansion at the nearest sample.
    fn state(&self, s: f64) -> Result<(f64, [f64; 2])> {
        let i = self.nearest(s)?;
        let d = s - self.s[i];
        let [psi, x, y] = &self.node_series[i];
        Ok((series::eval(psi, d), [series::eval(x, d), series::eval(y, d)]))
    }

    pub fn curvature(&self, s: &Jet<f64>) -> Result<Jet<f64>> {
        (self.curvature)(s)
    }

    pub fn curvature_at(&self, s: f64) -> Result<f64> {
        scalar_curvature(&self.curvature, s)
    }

    pub fn position(&self, s: f64) -> Result<[f64; 2]> {
        Ok(self.state(s)?.1)
    }

    /// Unit tangent `(cos ψ, sin ψ)`.
    pub fn tangent(&self, s: f64) -> Result<[f64; 2]> {
        let (psi, _) = self.state(s)?;
        Ok([psi.cos(), psi.sin()])
    }

    /// Jets of `γ(s)` for a jet `s`.
    pub fn position_jet(&self, s: &Jet<f64>) -> Result<[Jet<f64>; 2]> {
        let s0 = s.value();
        let (psi0, pos) = self.state(s0)?;
        let [_, x, y] = local_series(&self.curvature, s0, psi0, pos)?;
        Ok([s.compose_series(&x), s.compose_series(&y)])
    }

    /// CSV `s,x,y,tx,ty` at the stored samples.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "s,x,y,tx,ty")?;
        for (i, s) in self.s.iter().enumerate() {
            let p = self.positions[i];
            let t = self.tangents[i];
            writeln!(out, "{s},{},{},{},{}", p[0], p[1], t[0], t[1])?;
        }
        Ok(())
    }
}
