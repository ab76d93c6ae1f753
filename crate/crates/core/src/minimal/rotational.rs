use std::io::{self, Write};
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::immersion::{AmbientSpace, Chart};
use crate::jets::{series, Jet, MAX_ORDER};

/// A jet-evaluable profile function `x ↦ φ(x)`.
pub type ProfileFn = Arc<dyn Fn(&Jet<f64>) -> Result<Jet<f64>> + Send + Sync>;

/// How a profile is revolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationLayout {
    /// `(x cos θ, x sin θ, φ(x))`: radius `x`, height `φ`.
    AboutHeightAxis,
    /// `(x, φ(x) cos θ, φ(x) sin θ)`: revolved about the first axis with radius `φ`.
    AboutFirstAxis,
}

/// Surface of revolution of `profile` over `domain = [x range, θ range]`.
pub fn rotational_surface(
    profile: ProfileFn,
    domain: Vec<(f64, f64)>,
    layout: RotationLayout,
) -> Result<Chart<f64>> {
    if domain.len() != 2 {
        return Err(GeometryError::InvalidInput("rotational chart needs (x, θ) ranges".into()));
    }
    if layout == RotationLayout::AboutHeightAxis && !(domain[0].0 > 0.0) {
        return Err(GeometryError::InvalidInput(format!(
            "radius x must be positive, domain starts at {}",
            domain[0].0
        )));
    }
    let label = match layout {
        RotationLayout::AboutHeightAxis => "rotational (height axis)",
        RotationLayout::AboutFirstAxis => "rotational (first axis)",
    };
    Chart::new(label, AmbientSpace::Euclidean(3), domain, move |p| {
        let phi = profile(&p[0])?;
        let (s, c) = p[1].sin_cos();
        match layout {
            RotationLayout::AboutHeightAxis => Ok(vec![&p[0] * &c, &p[0] * &s, phi]),
            RotationLayout::AboutFirstAxis => {
                if !(phi.value() > 0.0) {
                    return Err(GeometryError::OutsideDomain {
                        point: vec![p[0].value(), p[1].value()],
                    });
                }
                Ok(vec![p[0].clone(), &phi * &c, &phi * &s])
            }
        }
    })
}

/// Parameters of the profile ODE
/// `φφ″ − 1 − φ′² = ±φ √((1 + φ′²)(n²H²(1 + φ′²)² − k²))`, `k = c₀(1 + φ′²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaunayParams {
    pub h: f64,
    pub c0: f64,
    pub n: usize,
    /// `+1` or `−1`, the branch of the square root.
    pub sign: f64,
    pub phi0: f64,
    pub dphi0: f64,
    pub x_range: (f64, f64),
    /// Number of dense-output intervals.
    pub nodes: usize,
}

impl Default for DelaunayParams {
    fn default() -> Self {
        Self {
            h: 0.2,
            c0: 0.3,
            n: 3,
            sign: 1.0,
            phi0: 1.0,
            dphi0: 0.0,
            x_range: (0.0, 0.5),
            nodes: 400,
        }
    }
}

const ODE_TOL: f64 = 1e-13;
const CLAMP_EPS: f64 = 1e-12;
const BLOWUP: f64 = 1e8;

/// Integrated profile with Taylor expansions at the dense-output nodes.
#[derive(Debug, Clone)]
pub struct DelaunayProfile {
    pub params: DelaunayParams,
    pub nodes: Vec<f64>,
    /// `(φ, φ′)` at each node.
    pub states: Vec<[f64; 2]>,
    /// Taylor coefficients of `φ` at each node.
    series: Vec<Vec<f64>>,
    /// Number of square-root arguments clamped from tiny negative values.
    pub clamp_events: usize,
}

impl DelaunayParams {
    fn nh(&self) -> f64 {
        self.n as f64 * self.h
    }

    /// `(1 + p²)(n²H²(1 + p²)² − k²)` with `k = c₀(1 + p²)`.
    fn sqrt_arg(&self, p: f64) -> f64 {
        let q = 1.0 + p * p;
        let k = self.c0 * q;
        let nh = self.nh();
        q * (nh * nh * q * q - k * k)
    }

    fn accel(&self, phi: f64, p: f64, clamps: &mut usize) -> Result<f64> {
        let mut arg = self.sqrt_arg(p);
        if arg < 0.0 {
            if arg > -CLAMP_EPS {
                arg = 0.0;
                *clamps += 1;
            } else {
                return Err(GeometryError::Integration(format!(
                    "square-root argument {arg:e} is negative"
                )));
            }
        }
        Ok((1.0 + p * p + self.sign * phi * arg.sqrt()) / phi)
    }

    /// Same right-hand side on truncated power series.
    fn accel_series(&self, phi: &[f64]) -> Result<Vec<f64>> {
        let p = series::derivative(phi);
        let mut q = series::mul(&p, &p);
        q[0] += 1.0;
        let nh = self.nh();
        let q2 = series::mul(&q, &q);
        let inner: Vec<f64> = q2.iter().map(|x| (nh * nh - self.c0 * self.c0) * x).collect();
        let arg = series::mul(&q, &inner);
        if !(arg[0] > 0.0) {
            return Err(GeometryError::Integration(format!(
                "square-root argument {:e} is not positive",
                arg[0]
            )));
        }
        let root = series::powf(&arg, 0.5);
        let mut num = series::mul(phi, &root);
        for (x, &a) in num.iter_mut().zip(&q) {
            *x = self.sign * *x + a;
        }
        Ok(series::mul(&num, &series::recip(phi)))
    }
}

fn rk4(params: &DelaunayParams, y: [f64; 2], h: f64, clamps: &mut usize) -> Result<[f64; 2]> {
    let f = |y: [f64; 2], c: &mut usize| -> Result<[f64; 2]> { Ok([y[1], params.accel(y[0], y[1], c)?]) };
    let k1 = f(y, clamps)?;
    let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]], clamps)?;
    let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]], clamps)?;
    let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]], clamps)?;
    Ok([
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ])
}

/// Adaptive step-doubling RK4 from `x0` to `x1`.
fn integrate_interval(
    params: &DelaunayParams,
    mut y: [f64; 2],
    x0: f64,
    x1: f64,
    h_guess: &mut f64,
    clamps: &mut usize,
) -> Result<[f64; 2]> {
    let mut x = x0;
    while x < x1 {
        let mut h = h_guess.min(x1 - x);
        loop {
            let full = rk4(params, y, h, clamps)?;
            let half = rk4(params, rk4(params, y, 0.5 * h, clamps)?, 0.5 * h, clamps)?;
            let err = ((half[0] - full[0]).abs() + (half[1] - full[1]).abs()) / 15.0;
            let scale = 1.0 + half[0].abs() + half[1].abs();
            if err <= ODE_TOL * scale {
                y = [half[0] + (half[0] - full[0]) / 15.0, half[1] + (half[1] - full[1]) / 15.0];
                x += h;
                let grow = if err == 0.0 { 2.0 } else { (0.9 * (ODE_TOL * scale / err).powf(0.2)).min(2.0) };
                *h_guess = h * grow;
                break;
            }
            h *= (0.9 * (ODE_TOL * scale / err).powf(0.2)).max(0.1);
            if h < 1e-14 {
                return Err(GeometryError::Integration(format!("step size collapsed at x = {x}")));
            }
        }
        if !(y[0] > 0.0) || !(y[1].abs() < BLOWUP) {
            return Err(GeometryError::Integration(format!(
                "profile leaves the admissible region at x = {x} (φ = {}, φ′ = {})",
                y[0], y[1]
            )));
        }
    }
    Ok(y)
}

/// Integrates the profile ODE over `params.x_range` from `(φ₀, φ′₀)` at its left end.
pub fn delaunay_profile(params: DelaunayParams) -> Result<DelaunayProfile> {
    let nh = params.nh();
    if !(params.c0 != 0.0 && params.c0.abs() < nh) {
        return Err(GeometryError::InvalidInput(format!(
            "need 0 < |c₀| < nH, got c₀ = {}, nH = {nh}",
            params.c0
        )));
    }
    if params.sign.abs() != 1.0 || !(params.phi0 > 0.0) || params.nodes < 2 {
        return Err(GeometryError::InvalidInput(
            "sign must be ±1, φ₀ positive and at least two nodes".into(),
        ));
    }
    let (a, b) = params.x_range;
    if !(b > a) {
        return Err(GeometryError::InvalidInput("empty x range".into()));
    }
    let mut clamps = 0;
    let mut y = [params.phi0, params.dphi0];
    let mut nodes = vec![a];
    let mut states = vec![y];
    let mut h = (b - a) / params.nodes as f64;
    for i in 1..=params.nodes {
        let x0 = nodes[i - 1];
        let x1 = if i == params.nodes { b } else { a + (b - a) * i as f64 / params.nodes as f64 };
        y = integrate_interval(&params, y, x0, x1, &mut h, &mut clamps)?;
        nodes.push(x1);
        states.push(y);
    }
    let series = states
        .iter()
        .map(|s| taylor_at(&params, *s))
        .collect::<Result<Vec<_>>>()?;
    Ok(DelaunayProfile {
        params,
        nodes,
        states,
        series,
        clamp_events: clamps,
    })
}

/// Taylor coefficients of the solution through `(φ, φ′)` by Picard iteration.
fn taylor_at(params: &DelaunayParams, state: [f64; 2]) -> Result<Vec<f64>> {
    let len = MAX_ORDER + 1;
    let mut phi = vec![0.0; len];
    phi[0] = state[0];
    phi[1] = state[1];
    for _ in 0..len {
        let acc = params.accel_series(&phi)?;
        let mut next = series::integrate(&series::integrate(&acc, state[1]), state[0]);
        next.truncate(len);
        phi = next;
    }
    Ok(phi)
}

fn horner_jet(coeffs: &[f64], delta: &Jet<f64>) -> Jet<f64> {
    let mut out = delta.constant_like(*coeffs.last().unwrap_or(&0.0));
    for &c in coeffs.iter().rev().skip(1) {
        out = &(&out * delta) + c;
    }
    out
}

impl DelaunayProfile {
    fn nearest(&self, x: f64) -> Result<usize> {
        let (a, b) = self.params.x_range;
        let slack = 1e-9 * (b - a);
        if !(x >= a - slack && x <= b + slack) {
            return Err(GeometryError::OutsideDomain { point: vec![x] });
        }
        let t = (x - a) / (b - a) * self.params.nodes as f64;
        Ok((t.round().max(0.0) as usize).min(self.params.nodes))
    }

    /// `φ` as a jet in the same variables as `x`.
    pub fn phi_jet(&self, x: &Jet<f64>) -> Result<Jet<f64>> {
        let i = self.nearest(x.value())?;
        Ok(horner_jet(&self.series[i], &(x - self.nodes[i])))
    }

    /// `φ′` as a jet in the same variables as `x`.
    pub fn dphi_jet(&self, x: &Jet<f64>) -> Result<Jet<f64>> {
        let i = self.nearest(x.value())?;
        Ok(horner_jet(&series::derivative(&self.series[i]), &(x - self.nodes[i])))
    }

    pub fn phi(&self, x: f64) -> Result<f64> {
        let i = self.nearest(x)?;
        Ok(series::eval(&self.series[i], x - self.nodes[i]))
    }

    pub fn dphi(&self, x: f64) -> Result<f64> {
        let i = self.nearest(x)?;
        Ok(series::eval(&series::derivative(&self.series[i]), x - self.nodes[i]))
    }

    /// `k = c₀(1 + φ′²)` as a jet.
    pub fn curvature_jet(&self, x: &Jet<f64>) -> Result<Jet<f64>> {
        let p = self.dphi_jet(x)?;
        Ok((&(&p * &p) + 1.0).scale(self.params.c0))
    }

    /// Max over `samples` interior points of `|φφ″ − 1 − φ′² ∓ φ√(…)|`, with
    /// `φ″` from a fourth-order central difference of `φ′`.
    pub fn ode_residual(&self, samples: usize) -> Result<f64> {
        let (a, b) = self.params.x_range;
        let h = 1e-3 * (b - a);
        let mut worst: f64 = 0.0;
        let mut clamps = 0;
        for i in 0..samples {
            let x = a + 2.0 * h + (b - a - 4.0 * h) * i as f64 / (samples.max(2) - 1) as f64;
            let d = |t: f64| self.dphi(x + t * h);
            let ddphi = (-d(2.0)? + 8.0 * d(1.0)? - 8.0 * d(-1.0)? + d(-2.0)?) / (12.0 * h);
            let phi = self.phi(x)?;
            let p = self.dphi(x)?;
            let expect = self.params.accel(phi, p, &mut clamps)?;
            worst = worst.max((phi * ddphi - phi * expect).abs());
        }
        Ok(worst)
    }

    /// Jet-evaluable profile for [`rotational_surface`].
    pub fn profile_fn(self: &Arc<Self>) -> ProfileFn {
        let me = self.clone();
        Arc::new(move |x| me.phi_jet(x))
    }

    /// Rotational chart over `x_range × theta_range`.
    pub fn chart(
        self: &Arc<Self>,
        x_range: (f64, f64),
        theta_range: (f64, f64),
        layout: RotationLayout,
    ) -> Result<Chart<f64>> {
        let (a, b) = self.params.x_range;
        if x_range.0 < a || x_range.1 > b {
            return Err(GeometryError::InvalidInput(format!(
                "chart range {x_range:?} exceeds the integrated range {:?}",
                self.params.x_range
            )));
        }
        rotational_surface(self.profile_fn(), vec![x_range, theta_range], layout)
            .map(|c| c.with_label("delaunay profile"))
    }

    /// CSV `x,phi,dphi` at `samples` evenly spaced points.
    pub fn write_csv<W: Write>(&self, samples: usize, out: &mut W) -> io::Result<()> {
        writeln!(out, "x,phi,dphi")?;
        let (a, b) = self.params.x_range;
        for i in 0..samples {
            let x = a + (b - a) * i as f64 / (samples.max(2) - 1) as f64;
            let phi = self.phi(x).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
            let p = self.dphi(x).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
            writeln!(out, "{x},{phi},{p}")?;
        }
        Ok(())
    }
}
