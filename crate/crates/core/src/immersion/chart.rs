use std::fmt;
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::jets::{seed_variables, Jet, JetBudget, MultiIndex};
use crate::Scalar;

/// Space form the immersion lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmbientSpace {
    /// `ℝ^m`, curvature 0.
    Euclidean(usize),
    /// Unit sphere `S^m ⊂ ℝ^{m+1}`, curvature 1.
    Sphere(usize),
}

impl AmbientSpace {
    /// Number of Cartesian coordinates a chart into this space produces.
    pub fn coord_dim(&self) -> usize {
        match *self {
            AmbientSpace::Euclidean(m) => m,
            AmbientSpace::Sphere(m) => m + 1,
        }
    }

    /// Intrinsic dimension `m`.
    pub fn dim(&self) -> usize {
        match *self {
            AmbientSpace::Euclidean(m) | AmbientSpace::Sphere(m) => m,
        }
    }

    pub fn curvature(&self) -> f64 {
        match self {
            AmbientSpace::Euclidean(_) => 0.0,
            AmbientSpace::Sphere(_) => 1.0,
        }
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, AmbientSpace::Sphere(_))
    }
}

/// Maps parameter jets to ambient-coordinate jets.
pub type Evaluator<T> = Arc<dyn Fn(&[Jet<T>]) -> Result<Vec<Jet<T>>> + Send + Sync>;

/// A local parametrization of an immersion over a box of parameters.
#[derive(Clone)]
pub struct Chart<T: Scalar> {
    label: String,
    dim: usize,
    ambient: AmbientSpace,
    domain: Vec<(T, T)>,
    evaluator: Evaluator<T>,
}

impl<T: Scalar> fmt::Debug for Chart<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("ambient", &self.ambient)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> Chart<T> {
    pub fn new<F>(
        label: impl Into<String>,
        ambient: AmbientSpace,
        domain: Vec<(T, T)>,
        evaluator: F,
    ) -> Result<Self>
    where
        F: Fn(&[Jet<T>]) -> Result<Vec<Jet<T>>> + Send + Sync + 'static,
    {
        let dim = domain.len();
        if !(1..=3).contains(&dim) {
            return Err(GeometryError::InvalidInput(format!(
                "charts have 1 to 3 parameters, got {dim}"
            )));
        }
        if dim > ambient.dim() {
            return Err(GeometryError::InvalidInput(format!(
                "{dim}-dimensional chart cannot immerse into a {}-dimensional space",
                ambient.dim()
            )));
        }
        if domain.iter().any(|&(a, b)| !(a < b)) {
            return Err(GeometryError::InvalidInput("empty parameter interval".into()));
        }
        Ok(Self {
            label: label.into(),
            dim,
            ambient,
            domain,
            evaluator: Arc::new(evaluator),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> AmbientSpace {
        self.ambient
    }

    pub fn domain(&self) -> &[(T, T)] {
        &self.domain
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_domain(mut self, domain: Vec<(T, T)>) -> Result<Self> {
        if domain.len() != self.dim {
            return Err(GeometryError::InvalidInput("domain dimension changed".into()));
        }
        self.domain = domain;
        Ok(self)
    }

    /// Closed-box membership with a relative slack of 1e-9 per side.
    pub fn contains(&self, point: &[T]) -> bool {
        point.len() == self.dim
            && point.iter().zip(&self.domain).all(|(&x, &(a, b))| {
                let slack = (b - a) * T::lit(1e-9);
                x >= a - slack && x <= b + slack
            })
    }

    /// Runs the evaluator on arbitrary parameter jets.
    pub fn evaluate(&self, params: &[Jet<T>]) -> Result<Vec<Jet<T>>> {
        if params.len() != self.dim {
            return Err(GeometryError::InvalidInput(format!(
                "chart takes {} parameters, got {}",
                self.dim,
                params.len()
            )));
        }
        let out = (self.evaluator)(params)?;
        if out.len() != self.ambient.coord_dim() {
            return Err(GeometryError::WrongOutputDim {
                expected: self.ambient.coord_dim(),
                got: out.len(),
            });
        }
        Ok(out)
    }

    /// Ambient position at a parameter point.
    pub fn position(&self, point: &[T]) -> Result<Vec<T>> {
        let seeds = seed_variables(point, JetBudget::new(self.dim, 0))?;
        Ok(self.evaluate(&seeds)?.iter().map(Jet::value).collect())
    }

    /// Precomposes with a parameter map `ψ`, giving the chart `Φ∘ψ` over `domain`.
    pub fn reparametrize<F>(&self, domain: Vec<(T, T)>, map: F) -> Result<Self>
    where
        F: Fn(&[Jet<T>]) -> Result<Vec<Jet<T>>> + Send + Sync + 'static,
    {
        let inner = self.clone();
        Chart::new(
            format!("{} (reparametrized)", self.label),
            self.ambient,
            domain,
            move |p| inner.evaluate(&map(p)?),
        )
    }
}

/// Taylor data of a chart at one parameter point.
#[derive(Debug, Clone)]
pub struct DerivativeTower<T: Scalar> {
    pub point: Vec<T>,
    pub order: usize,
    /// One jet per ambient coordinate, all of shape `(n, order)`.
    pub coords: Vec<Jet<T>>,
}

impl<T: Scalar> DerivativeTower<T> {
    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn coord_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn position(&self) -> Vec<T> {
        self.coords.iter().map(Jet::value).collect()
    }

    /// Ambient vector `∂^α Φ`.
    pub fn partial_vector(&self, idx: &MultiIndex) -> Result<Vec<T>> {
        self.coords
            .iter()
            .map(|c| c.partial(idx).map_err(GeometryError::from))
            .collect()
    }

    /// Coordinate tangent vectors `∂_i Φ`.
    pub fn first_derivatives(&self) -> Result<Vec<Vec<T>>> {
        (0..self.dim())
            .map(|i| self.partial_vector(&MultiIndex::unit(i)))
            .collect()
    }

    /// `∂_i ∂_j Φ`.
    pub fn second_derivative(&self, i: usize, j: usize) -> Result<Vec<T>> {
        let mut e = [0usize; 3];
        e[i] += 1;
        e[j] += 1;
        self.partial_vector(&MultiIndex::new(&e)?)
    }

    /// Ambient Taylor vector `Σ_{|β|=s} c_β z^β` for a parameter direction `z`;
    /// `s!` times it is the `s`-th derivative of `t ↦ Φ(p + t z)`.
    pub fn homogeneous_vector(&self, degree: usize, z: &[T]) -> Vec<T> {
        self.coords.iter().map(|c| c.homogeneous_part(degree, z)).collect()
    }

    /// Same at a complex direction; returns real and imaginary ambient parts.
    pub fn homogeneous_vector_complex(&self, degree: usize, zr: &[T], zi: &[T]) -> (Vec<T>, Vec<T>) {
        self.coords
            .iter()
            .map(|c| c.homogeneous_part_complex(degree, zr, zi))
            .unzip()
    }

    /// Metric coefficients `g_ij = ⟨∂_iΦ, ∂_jΦ⟩` as jets one order lower.
    pub fn metric_jets(&self) -> Result<Vec<Vec<Jet<T>>>> {
        let n = self.dim();
        let d: Vec<Vec<Jet<T>>> = (0..n)
            .map(|i| {
                self.coords
                    .iter()
                    .map(|c| c.derivative(i))
                    .collect::<std::result::Result<_, _>>()
            })
            .collect::<std::result::Result<_, _>>()?;
        let mut g = vec![Vec::<Jet<T>>::with_capacity(n); n];
        for i in 0..n {
            for j in 0..n {
                let v = if j < i {
                    g[j][i].clone()
                } else {
                    crate::jets::dot(&d[i], &d[j]).expect("nonempty coordinates")
                };
                g[i].push(v);
            }
        }
        Ok(g)
    }
}

/// Taylor data of `chart` at `point` up to `order`.
pub fn evaluate_tower<T: Scalar>(
    chart: &Chart<T>,
    point: &[T],
    order: usize,
) -> Result<DerivativeTower<T>> {
    if !chart.contains(point) {
        return Err(GeometryError::OutsideDomain {
            point: point.iter().map(|x| x.to_f64_lossy()).collect(),
        });
    }
    evaluate_tower_unchecked(chart, point, order)
}

/// [`evaluate_tower`] without the domain check; used by finite-difference
/// stencils that may step just past the box.
pub(crate) fn evaluate_tower_unchecked<T: Scalar>(
    chart: &Chart<T>,
    point: &[T],
    order: usize,
) -> Result<DerivativeTower<T>> {
    let seeds = seed_variables(point, JetBudget::new(chart.dim(), order))?;
    let coords = chart.evaluate(&seeds)?;
    if chart.ambient().is_sphere() {
        let norm = coords
            .iter()
            .map(|c| c.value() * c.value())
            .sum::<T>()
            .sqrt();
        if (norm - T::one()).abs() > T::lit(1e-10) {
            return Err(GeometryError::SphereNormalization {
                norm: norm.to_f64_lossy(),
            });
        }
    }
    Ok(DerivativeTower {
        point: point.to_vec(),
        order,
        coords,
    })
}
