//! Closed-form charts used as fixtures and sanity scenarios.

use std::f64::consts::PI;

use crate::error::Result;
use crate::Scalar;

use super::chart::{AmbientSpace, Chart};

fn box2<T: Scalar>(a: f64, b: f64, c: f64, d: f64) -> Vec<(T, T)> {
    vec![(T::lit(a), T::lit(b)), (T::lit(c), T::lit(d))]
}

/// `(u, v) ↦ (u, v, 0)`.
pub fn plane<T: Scalar>() -> Result<Chart<T>> {
    Chart::new("plane", AmbientSpace::Euclidean(3), box2(-1.0, 1.0, -1.0, 1.0), |p| {
        Ok(vec![p[0].clone(), p[1].clone(), p[0].zero_like()])
    })
}

/// Flat plane in polar coordinates, `(r, θ) ↦ (r cos θ, r sin θ, 0)`.
pub fn polar_plane<T: Scalar>() -> Result<Chart<T>> {
    Chart::new("polar plane", AmbientSpace::Euclidean(3), box2(0.5, 2.0, -PI, PI), |p| {
        let (s, c) = p[1].sin_cos();
        Ok(vec![&p[0] * &c, &p[0] * &s, p[0].zero_like()])
    })
}

/// Unit sphere in ℝ³ by latitude and longitude; `(0, 0) ↦ (1, 0, 0)`.
pub fn round_sphere<T: Scalar>() -> Result<Chart<T>> {
    Chart::new("round sphere", AmbientSpace::Euclidean(3), box2(-1.2, 1.2, -PI, PI), |p| {
        let (sl, cl) = p[0].sin_cos();
        let (so, co) = p[1].sin_cos();
        Ok(vec![&cl * &co, &cl * &so, sl])
    })
}

/// Totally geodesic great 2-sphere inside `S³`.
pub fn great_sphere<T: Scalar>() -> Result<Chart<T>> {
    Chart::new("great sphere in S3", AmbientSpace::Sphere(3), box2(-1.2, 1.2, -PI, PI), |p| {
        let (sl, cl) = p[0].sin_cos();
        let (so, co) = p[1].sin_cos();
        Ok(vec![&cl * &co, &cl * &so, sl, p[0].zero_like()])
    })
}

/// Cylinder over the circle of radius `r`: `(t, s) ↦ (r cos t, r sin t, s)`.
pub fn circular_cylinder<T: Scalar>(r: f64) -> Result<Chart<T>> {
    elliptic_cylinder(r, r).map(|c| c.with_label(format!("circular cylinder r={r}")))
}

/// Cylinder over the ellipse with semi-axes `a`, `b`.
pub fn elliptic_cylinder<T: Scalar>(a: f64, b: f64) -> Result<Chart<T>> {
    let (a, b) = (T::lit(a), T::lit(b));
    Chart::new("elliptic cylinder", AmbientSpace::Euclidean(3), box2(-PI, PI, -1.0, 1.0), move |p| {
        let (s, c) = p[0].sin_cos();
        Ok(vec![c * a, s * b, p[1].clone()])
    })
}

/// Graph of `z = (x² - y²)/2`.
pub fn saddle_graph<T: Scalar>() -> Result<Chart<T>> {
    Chart::new("saddle graph", AmbientSpace::Euclidean(3), box2(-1.0, 1.0, -1.0, 1.0), |p| {
        let z = (&(&p[0] * &p[0]) - &(&p[1] * &p[1])).scale(T::lit(0.5));
        Ok(vec![p[0].clone(), p[1].clone(), z])
    })
}

/// Graph of `z = h(x, y)` for an arbitrary jet-evaluable height function.
pub fn graph<T: Scalar, F>(label: &str, domain: Vec<(T, T)>, height: F) -> Result<Chart<T>>
where
    F: Fn(&crate::jets::Jet<T>, &crate::jets::Jet<T>) -> crate::jets::Jet<T> + Send + Sync + 'static,
{
    Chart::new(label, AmbientSpace::Euclidean(3), domain, move |p| {
        Ok(vec![p[0].clone(), p[1].clone(), height(&p[0], &p[1])])
    })
}

/// Catenoid `(cosh u cos v, cosh u sin v, u)`.
pub fn catenoid<T: Scalar>() -> Result<Chart<T>> {
    Chart::new("catenoid", AmbientSpace::Euclidean(3), box2(-1.0, 1.0, -PI, PI), |p| {
        let ch = p[0].cosh();
        let (s, c) = p[1].sin_cos();
        Ok(vec![&ch * &c, &ch * &s, p[0].clone()])
    })
}

/// Identity chart of ℝ³.
pub fn flat_space<T: Scalar>() -> Result<Chart<T>> {
    Chart::new(
        "flat R3",
        AmbientSpace::Euclidean(3),
        vec![(T::lit(-1.0), T::lit(1.0)); 3],
        |p| Ok(p.to_vec()),
    )
}

/// The flat plane as a 2-chart into ℝ² (codimension zero).
pub fn flat_plane<T: Scalar>() -> Result<Chart<T>> {
    Chart::new("flat R2", AmbientSpace::Euclidean(2), box2(-1.0, 1.0, -1.0, 1.0), |p| {
        Ok(p.to_vec())
    })
}
