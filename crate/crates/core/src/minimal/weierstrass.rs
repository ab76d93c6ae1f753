use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::immersion::{AmbientSpace, Chart};
use crate::jets::{ComplexJet, Jet};

/// Number of terms kept for transcendental holomorphic data.
pub const SERIES_TERMS: usize = 64;
/// Largest admissible truncation-tail estimate on the chart domain.
pub const TAIL_TOL: f64 = 1e-12;

/// Truncated power series `Σ c_k (z − base)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicSeries {
    coeffs: Vec<Complex64>,
    base: Complex64,
    /// Radius of convergence of the represented function.
    radius: f64,
    /// True when the coefficients are a polynomial, so no tail exists.
    exact: bool,
}

impl HolomorphicSeries {
    pub fn new(coeffs: Vec<Complex64>, base: Complex64, radius: f64) -> Result<Self> {
        if coeffs.is_empty() || !(radius > 0.0) {
            return Err(GeometryError::InvalidInput(
                "holomorphic series needs coefficients and a positive radius".into(),
            ));
        }
        Ok(Self {
            coeffs,
            base,
            radius,
            exact: false,
        })
    }

    /// A polynomial in `z − base`.
    pub fn polynomial(coeffs: Vec<Complex64>, base: Complex64) -> Self {
        Self {
            coeffs: if coeffs.is_empty() { vec![Complex64::new(0.0, 0.0)] } else { coeffs },
            base,
            radius: f64::INFINITY,
            exact: true,
        }
    }

    pub fn constant(c: Complex64, base: Complex64) -> Self {
        Self::polynomial(vec![c], base)
    }

    /// `e^{a z}` expanded about `base`.
    pub fn exp_affine(a: Complex64, base: Complex64, terms: usize) -> Self {
        let mut coeffs = Vec::with_capacity(terms);
        let mut c = (a * base).exp();
        for k in 0..terms {
            coeffs.push(c);
            c = c * a / (k as f64 + 1.0);
        }
        Self {
            coeffs,
            base,
            radius: f64::INFINITY,
            exact: false,
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(GeometryError::InvalidInput(
                "holomorphic series expanded about different points".into(),
            ));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, coeffs: Vec<Complex64>) -> Self {
        Self {
            coeffs,
            base: self.base,
            radius: self.radius.min(other.radius),
            exact: self.exact && other.exact,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let n = if self.exact && other.exact {
            self.coeffs.len().max(other.coeffs.len())
        } else {
            self.truncated_len(other)
        };
        let get = |s: &Self, k: usize| s.coeffs.get(k).copied().unwrap_or_default();
        let coeffs = (0..n).map(|k| get(self, k) + get(other, k)).collect();
        Ok(self.combine(other, coeffs))
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
            ..self.clone()
        }
    }

    fn truncated_len(&self, other: &Self) -> usize {
        match (self.exact, other.exact) {
            (true, true) => self.coeffs.len() + other.coeffs.len() - 1,
            (true, false) => other.coeffs.len(),
            (false, true) => self.coeffs.len(),
            (false, false) => self.coeffs.len().min(other.coeffs.len()),
        }
    }

    /// Cauchy product, truncated to the shorter inexact length.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let n = self.truncated_len(other);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                out[i + j] += a * b;
            }
        }
        Ok(self.combine(other, out))
    }

    /// Antiderivative vanishing at `base`.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / (k as f64 + 1.0));
        }
        Self {
            coeffs,
            ..self.clone()
        }
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        Self {
            coeffs: if coeffs.is_empty() { vec![Complex64::new(0.0, 0.0)] } else { coeffs },
            ..self.clone()
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let d = z - self.base;
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * d + c)
    }

    pub fn eval_jet(&self, z: &ComplexJet<f64>) -> ComplexJet<f64> {
        let c: Vec<(f64, f64)> = self.coeffs.iter().map(|c| (c.re, c.im)).collect();
        z.eval_polynomial((self.base.re, self.base.im), &c)
    }

    /// Estimate of the truncation error at distance `rho` from the base:
    /// the last three terms, inflated by a geometric factor.
    pub fn tail_estimate(&self, rho: f64) -> f64 {
        if self.exact {
            return 0.0;
        }
        let n = self.coeffs.len();
        let last: f64 = self.coeffs[n.saturating_sub(3)..]
            .iter()
            .enumerate()
            .map(|(i, c)| c.norm() * rho.powi((n.saturating_sub(3) + i) as i32))
            .sum();
        let ratio = rho / self.radius;
        if ratio >= 1.0 {
            f64::INFINITY
        } else {
            last / (1.0 - ratio)
        }
    }
}

/// Holomorphic data `(f, g)` of a Weierstrass representation over a parameter box.
#[derive(Debug, Clone)]
pub struct WeierstrassData {
    pub label: String,
    pub f: HolomorphicSeries,
    pub g: HolomorphicSeries,
    pub domain: [(f64, f64); 2],
    /// Antiderivatives of `((1 − g²)/2, i(1 + g²)/2, g) f`.
    primitives: [HolomorphicSeries; 3],
}

impl WeierstrassData {
    pub fn new(
        label: impl Into<String>,
        f: HolomorphicSeries,
        g: HolomorphicSeries,
        domain: [(f64, f64); 2],
    ) -> Result<Self> {
        let one = HolomorphicSeries::constant(Complex64::new(1.0, 0.0), f.base());
        let g2 = g.mul(&g)?;
        let half = Complex64::new(0.5, 0.0);
        let p1 = one.add(&g2.scale(-Complex64::new(1.0, 0.0)))?.mul(&f)?.scale(half);
        let p2 = one.add(&g2)?.mul(&f)?.scale(Complex64::new(0.0, 0.5));
        let p3 = g.mul(&f)?;
        let primitives = [p1.integrate(), p2.integrate(), p3.integrate()];

        let base = f.base();
        let rho = corners(&domain)
            .iter()
            .map(|&(u, v)| (Complex64::new(u, v) - base).norm())
            .fold(0.0, f64::max);
        for s in primitives.iter().chain([&f, &g]) {
            if !(rho < s.radius()) {
                return Err(GeometryError::InvalidInput(format!(
                    "domain reaches {rho} from the expansion point, radius is {}",
                    s.radius()
                )));
            }
            let tail = s.tail_estimate(rho);
            if !(tail < TAIL_TOL) {
                return Err(GeometryError::InvalidInput(format!(
                    "series tail {tail:e} exceeds {TAIL_TOL:e} on the domain"
                )));
            }
        }
        let data = Self {
            label: label.into(),
            f,
            g,
            domain,
            primitives,
        };
        for i in 0..=8 {
            for j in 0..=8 {
                let u = domain[0].0 + (domain[0].1 - domain[0].0) * i as f64 / 8.0;
                let v = domain[1].0 + (domain[1].1 - domain[1].0) * j as f64 / 8.0;
                if !(data.conformal_factor(u, v) > 1e-10) {
                    return Err(GeometryError::InvalidInput(format!(
                        "branch point of the Weierstrass data near ({u}, {v})"
                    )));
                }
            }
        }
        Ok(data)
    }

    /// Enneper's surface: `f = 2`, `g = z` on `[−0.8, 0.8]²`.
    pub fn enneper() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let f = HolomorphicSeries::constant(Complex64::new(2.0, 0.0), o);
        let g = HolomorphicSeries::polynomial(vec![o, Complex64::new(1.0, 0.0)], o);
        Self::new("enneper", f, g, [(-0.8, 0.8), (-0.8, 0.8)]).expect("valid stock data")
    }

    /// Catenoid: `f = e^{−z}`, `g = e^{z}` on `[−1, 1] × [−3, 3]`.
    pub fn catenoid() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let f = HolomorphicSeries::exp_affine(Complex64::new(-1.0, 0.0), o, SERIES_TERMS);
        let g = HolomorphicSeries::exp_affine(Complex64::new(1.0, 0.0), o, SERIES_TERMS);
        Self::new("catenoid", f, g, [(-1.0, 1.0), (-3.0, 3.0)]).expect("valid stock data")
    }

    /// Stock data by name: `enneper`, `catenoid`.
    pub fn stock(kind: &str) -> Result<Self> {
        match kind {
            "enneper" => Ok(Self::enneper()),
            "catenoid" | "helicoid" => Ok(Self::catenoid()),
            other => Err(GeometryError::InvalidInput(format!("unknown Weierstrass data '{other}'"))),
        }
    }

    /// `λ = |f|(1 + |g|²)/2`.
    pub fn conformal_factor(&self, u: f64, v: f64) -> f64 {
        let z = Complex64::new(u, v);
        self.f.eval(z).norm() * (1.0 + self.g.eval(z).norm_sqr()) / 2.0
    }

    /// Principal curvature `k = 4|g′| / (|f|(1 + |g|²)²)`, so `K = −k²`.
    pub fn principal_curvature(&self, u: f64, v: f64) -> f64 {
        let z = Complex64::new(u, v);
        let g = self.g.eval(z);
        let dg = self.g.derivative().eval(z);
        let s = 1.0 + g.norm_sqr();
        4.0 * dg.norm() / (self.f.eval(z).norm() * s * s)
    }

    /// Unit normal `(2 Re g, 2 Im g, |g|² − 1)/(1 + |g|²)`, shared by the whole
    /// associated family.
    pub fn gauss_map(&self, u: f64, v: f64) -> [f64; 3] {
        let g = self.g.eval(Complex64::new(u, v));
        let s = 1.0 + g.norm_sqr();
        [2.0 * g.re / s, 2.0 * g.im / s, (g.norm_sqr() - 1.0) / s]
    }

    /// Jets of `Re[e^{−iθ} ∫ φ_k dz]` at `z = u + i v`.
    fn coordinates(&self, u: &Jet<f64>, v: &Jet<f64>, theta: f64) -> Result<Vec<Jet<f64>>> {
        let z = ComplexJet::from_parts(u, v)?;
        let (s, c) = theta.sin_cos();
        Ok(self
            .primitives
            .iter()
            .map(|p| {
                let w = p.eval_jet(&z);
                &w.re.scale(c) + &w.im.scale(s)
            })
            .collect())
    }
}

fn corners(domain: &[(f64, f64); 2]) -> [(f64, f64); 4] {
    [
        (domain[0].0, domain[1].0),
        (domain[0].0, domain[1].1),
        (domain[0].1, domain[1].0),
        (domain[0].1, domain[1].1),
    ]
}

fn domain_vec(d: &[(f64, f64); 2]) -> Vec<(f64, f64)> {
    d.to_vec()
}

/// A member of the associated family as a chart into ℝ³, with its data.
#[derive(Debug, Clone)]
pub struct MinimalSurfaceChart {
    pub chart: Chart<f64>,
    pub data: Arc<WeierstrassData>,
    pub theta: f64,
}

impl MinimalSurfaceChart {
    pub fn conformal_factor(&self, u: f64, v: f64) -> f64 {
        self.data.conformal_factor(u, v)
    }

    /// `k ≥ 0` with `A E = k Ē` for `E = e₁ + i e₂`.
    pub fn principal_curvature(&self, u: f64, v: f64) -> f64 {
        self.data.principal_curvature(u, v)
    }

    pub fn gaussian_curvature(&self, u: f64, v: f64) -> f64 {
        let k = self.principal_curvature(u, v);
        -k * k
    }

    pub fn gauss_map(&self, u: f64, v: f64) -> [f64; 3] {
        self.data.gauss_map(u, v)
    }
}

/// Member `θ` of the associated family, `(u, v) ↦ Re[e^{−iθ} ∫ ((1−g²)/2, i(1+g²)/2, g) f dz]`.
pub fn weierstrass_chart(data: &WeierstrassData, theta: f64) -> Result<MinimalSurfaceChart> {
    if !(0.0..PI).contains(&theta) {
        return Err(GeometryError::InvalidInput(format!("θ = {theta} outside [0, π)")));
    }
    let data = Arc::new(data.clone());
    let d = data.clone();
    let chart = Chart::new(
        format!("{} θ={theta}", data.label),
        AmbientSpace::Euclidean(3),
        domain_vec(&data.domain),
        move |p| d.coordinates(&p[0], &p[1], theta),
    )?;
    Ok(MinimalSurfaceChart { chart, data, theta })
}

/// `ĝ = (cos φ · g_θ, sin φ · g_{θ+π/2})` into ℝ⁶.
pub fn orthogonal_sum_hat(data: &WeierstrassData, theta: f64, phi: f64) -> Result<Chart<f64>> {
    if !(phi > 0.0 && phi < FRAC_PI_2) {
        return Err(GeometryError::InvalidInput(format!("φ = {phi} outside (0, π/2)")));
    }
    let dom = data.domain;
    for i in 0..=8 {
        for j in 0..=8 {
            let u = dom[0].0 + (dom[0].1 - dom[0].0) * i as f64 / 8.0;
            let v = dom[1].0 + (dom[1].1 - dom[1].0) * j as f64 / 8.0;
            if !(data.principal_curvature(u, v) > 1e-10) {
                return Err(GeometryError::InvalidInput(format!(
                    "flat point of the seed surface near ({u}, {v})"
                )));
            }
        }
    }
    let d = Arc::new(data.clone());
    let (sp, cp) = phi.sin_cos();
    Chart::new(
        format!("{} hat θ={theta} φ={phi}", data.label),
        AmbientSpace::Euclidean(6),
        domain_vec(&dom),
        move |p| {
            let a = d.coordinates(&p[0], &p[1], theta)?;
            let b = d.coordinates(&p[0], &p[1], theta + FRAC_PI_2)?;
            Ok(a.iter()
                .map(|x| x.scale(cp))
                .chain(b.iter().map(|x| x.scale(sp)))
                .collect())
        },
    )
}
