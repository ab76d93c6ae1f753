//! Distributions inside the relative nullity, the splitting tensor and
//! residuals of the structural identities it satisfies.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::immersion::{
    christoffel, evaluate_tower, evaluate_tower_unchecked, fundamental_forms,
    nullity_membership_residual, Chart, Christoffel, FundamentalForms,
};
use crate::jets::{seed_variables, Jet, JetBudget, MultiIndex};
use crate::linalg::{self, dot, gram_schmidt_pivoted, norm, Matrix};
use crate::Scalar;

/// Default tolerance for the totally-geodesic residual.
pub const TOTALLY_GEODESIC_TOL: f64 = 1e-6;
/// Default tolerance for the hypotheses checked before the identity residuals.
pub const HYPOTHESIS_TOL: f64 = 1e-6;
/// Default tolerance for the derivative identity of the splitting tensor.
pub const C1_TOL: f64 = 1e-5;
/// Default tolerance for the symmetry of `A_ξ ∘ C_T`.
pub const C3_TOL: f64 = 1e-5;
/// Parameter-space step of the Richardson-extrapolated directional derivative.
pub const FD_STEP: f64 = 1e-3;

const INDEPENDENCE_TOL: f64 = 1e-10;

/// A tangent vector field given by its parameter components as jets.
pub type VectorField<T> = Arc<dyn Fn(&[Jet<T>]) -> Result<Vec<Jet<T>>> + Send + Sync>;

/// A smooth distribution `D` spanned by `rank` vector fields.
#[derive(Clone)]
pub struct Distribution<T: Scalar> {
    fields: Vec<VectorField<T>>,
    normalize: bool,
}

impl<T: Scalar> fmt::Debug for Distribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Distribution")
            .field("rank", &self.fields.len())
            .field("normalize", &self.normalize)
            .finish()
    }
}

impl<T: Scalar> Distribution<T> {
    pub fn new(fields: Vec<VectorField<T>>) -> Result<Self> {
        if fields.is_empty() {
            return Err(GeometryError::InvalidInput("a distribution needs at least one field".into()));
        }
        Ok(Self {
            fields,
            normalize: false,
        })
    }

    /// Rank-one distribution spanned by `field`.
    pub fn from_fn<F>(field: F) -> Self
    where
        F: Fn(&[Jet<T>]) -> Result<Vec<Jet<T>>> + Send + Sync + 'static,
    {
        Self {
            fields: vec![Arc::new(field)],
            normalize: false,
        }
    }

    pub fn with_field<F>(mut self, field: F) -> Self
    where
        F: Fn(&[Jet<T>]) -> Result<Vec<Jet<T>>> + Send + Sync + 'static,
    {
        self.fields.push(Arc::new(field));
        self
    }

    /// Spanned by the coordinate fields `∂_i`, `i ∈ axes`.
    pub fn coordinate(axes: &[usize]) -> Result<Self> {
        let fields = axes
            .iter()
            .map(|&axis| -> VectorField<T> {
                Arc::new(move |p: &[Jet<T>]| {
                    if axis >= p.len() {
                        return Err(GeometryError::InvalidInput(format!(
                            "coordinate field {axis} on a {}-parameter chart",
                            p.len()
                        )));
                    }
                    let mut v: Vec<Jet<T>> = p.iter().map(Jet::zero_like).collect();
                    v[axis] = p[0].constant_like(T::one());
                    Ok(v)
                })
            })
            .collect();
        Self::new(fields)
    }

    /// Divides every field by its length in the induced metric.
    pub fn normalized(mut self) -> Self {
        self.normalize = true;
        self
    }

    /// Multiplies every field by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let fields = self
            .fields
            .iter()
            .map(|f| -> VectorField<T> {
                let f = f.clone();
                Arc::new(move |p: &[Jet<T>]| Ok(f(p)?.iter().map(|c| c.scale(factor)).collect()))
            })
            .collect();
        Self {
            fields,
            normalize: self.normalize,
        }
    }

    pub fn rank(&self) -> usize {
        self.fields.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalize
    }
}

/// Matrices of `C_T` for each basis field `T` of `D`, in an orthonormal basis of `D^⊥`.
#[derive(Debug, Clone)]
pub struct SplittingTensorData<T> {
    pub point: Vec<T>,
    /// `matrices[t][(a, b)] = ⟨C_{T_t} X_b, X_a⟩`.
    pub matrices: Vec<Matrix<T>>,
    /// Orthonormal basis `X_a` of `D^⊥` in ambient coordinates.
    pub perp_frame: Vec<Vec<T>>,
    /// The basis fields of `D` in ambient coordinates.
    pub fields: Vec<Vec<T>>,
}

/// Outcome of one identity check at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidualReport<T> {
    pub name: String,
    pub residual: T,
    pub tolerance: T,
    pub pass: bool,
    pub point: Vec<T>,
}

impl<T: Scalar> IdentityResidualReport<T> {
    pub fn new(name: impl Into<String>, residual: T, tolerance: T, point: Vec<T>) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual < tolerance,
            point,
        }
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self.pass = self.residual < tolerance;
        self
    }
}

/// Pointwise geometry of the chart together with `D` and a frame of `D^⊥`.
struct LocalFrame<T: Scalar> {
    ff: FundamentalForms<T>,
    gamma: Christoffel<T>,
    /// Parameter components of each field.
    values: Vec<Vec<T>>,
    /// `dfield[t][k][i] = ∂_i T_t^k`.
    dfield: Vec<Vec<Vec<T>>>,
    ambient: Vec<Vec<T>>,
    perp: Vec<Vec<T>>,
    perp_params: Vec<Vec<T>>,
}

impl<T: Scalar> LocalFrame<T> {
    fn build(
        chart: &Chart<T>,
        point: &[T],
        dist: &Distribution<T>,
        pivots: Option<&[usize]>,
        checked: bool,
    ) -> Result<(Self, Vec<usize>)> {
        let n = chart.dim();
        let k = dist.rank();
        if k >= n {
            return Err(GeometryError::InvalidInput(format!(
                "distribution of rank {k} leaves no complement in dimension {n}"
            )));
        }
        let tower = if checked {
            evaluate_tower(chart, point, 2)?
        } else {
            evaluate_tower_unchecked(chart, point, 2)?
        };
        let ff = fundamental_forms(&tower, chart.ambient())?;
        let gamma = christoffel(&tower)?;

        let seeds = seed_variables(point, JetBudget::new(n, 1))?;
        let metric = if dist.normalize {
            Some(tower.metric_jets()?)
        } else {
            None
        };
        let mut values = Vec::with_capacity(k);
        let mut dfield = Vec::with_capacity(k);
        for f in &dist.fields {
            let mut comps = f(&seeds)?;
            if comps.len() != n {
                return Err(GeometryError::InvalidInput(format!(
                    "vector field returned {} components, chart has {n} parameters",
                    comps.len()
                )));
            }
            if let Some(g) = &metric {
                let mut sq = comps[0].zero_like();
                for i in 0..n {
                    for j in 0..n {
                        sq += &(&(&comps[i] * &g[i][j]) * &comps[j]);
                    }
                }
                let inv = sq.sqrt()?.recip()?;
                comps = comps.iter().map(|c| c * &inv).collect();
            }
            values.push(comps.iter().map(Jet::value).collect::<Vec<_>>());
            let d = comps
                .iter()
                .map(|c| {
                    (0..n)
                        .map(|i| c.partial(&MultiIndex::unit(i)))
                        .collect::<std::result::Result<Vec<_>, _>>()
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            dfield.push(d);
        }
        let ambient: Vec<Vec<T>> = values.iter().map(|v| ff.from_params(v)).collect();
        let order: Vec<usize> = (0..k).collect();
        let d_frame = ordered_orthonormal(&ambient, &order)
            .ok_or_else(|| degenerate(point))?;

        let candidates: Vec<Vec<T>> = ff
            .jacobian
            .iter()
            .map(|c| {
                let mut v = c.clone();
                linalg::project_out(&mut v, &d_frame);
                linalg::project_out(&mut v, &d_frame);
                v
            })
            .collect();
        let pivots = match pivots {
            Some(p) => p.to_vec(),
            None => {
                let gs = gram_schmidt_pivoted(&candidates, T::lit(INDEPENDENCE_TOL));
                if gs.pivots.len() < n - k {
                    return Err(degenerate(point));
                }
                gs.pivots[..n - k].to_vec()
            }
        };
        let perp = ordered_orthonormal(&candidates, &pivots).ok_or_else(|| degenerate(point))?;
        let perp_params = perp
            .iter()
            .map(|x| ff.frame_to_params(&ff.to_frame(x)))
            .collect();
        Ok((
            Self {
                ff,
                gamma,
                values,
                dfield,
                ambient,
                perp,
                perp_params,
            },
            pivots,
        ))
    }

    /// Parameter components of `∇_X T_t` for `X` given by parameter components.
    fn covariant(&self, x: &[T], t: usize) -> Vec<T> {
        let n = x.len();
        let tv = &self.values[t];
        (0..n)
            .map(|k| {
                let mut s = T::zero();
                for i in 0..n {
                    let mut inner = self.dfield[t][k][i];
                    for j in 0..n {
                        inner += self.gamma[k][i][j] * tv[j];
                    }
                    s += x[i] * inner;
                }
                s
            })
            .collect()
    }

    fn splitting_matrix(&self, t: usize, perp: &[Vec<T>], perp_params: &[Vec<T>]) -> Matrix<T> {
        let r = perp.len();
        let mut c = Matrix::zeros(r, r);
        for b in 0..r {
            let nabla = self.ff.from_params(&self.covariant(&perp_params[b], t));
            for a in 0..r {
                c[(a, b)] = -dot(&nabla, &perp[a]);
            }
        }
        c
    }

    fn matrices(&self) -> Vec<Matrix<T>> {
        (0..self.values.len())
            .map(|t| self.splitting_matrix(t, &self.perp, &self.perp_params))
            .collect()
    }

    fn horizontal_norm(&self, v: &[T]) -> T {
        self.perp
            .iter()
            .map(|x| {
                let d = dot(v, x);
                d * d
            })
            .sum::<T>()
            .sqrt()
    }

    fn check_membership(&self, point: &[T]) -> Result<()> {
        for (t, v) in self.ambient.iter().enumerate() {
            let r = nullity_membership_residual(&self.ff, v);
            if !(r <= T::lit(HYPOTHESIS_TOL)) {
                return Err(GeometryError::HypothesisViolation(format!(
                    "field {t} is not in the relative nullity at {:?}: residual {:e}",
                    to_f64(point),
                    r.to_f64_lossy()
                )));
            }
        }
        Ok(())
    }

    fn totally_geodesic_residual(&self) -> T {
        let k = self.values.len();
        let mut worst = T::zero();
        for t in 0..k {
            for s in 0..k {
                let v = self.ff.from_params(&self.covariant(&self.values[t], s));
                let r = self.horizontal_norm(&v) / (T::one() + norm(&v));
                worst = worst.max(r);
            }
        }
        worst
    }
}

fn to_f64<T: Scalar>(p: &[T]) -> Vec<f64> {
    p.iter().map(|x| x.to_f64_lossy()).collect()
}

fn degenerate<T: Scalar>(point: &[T]) -> GeometryError {
    GeometryError::DegenerateDistribution { point: to_f64(point) }
}

/// Gram–Schmidt in a fixed input order, without sign normalization, so
/// frames vary smoothly with the point.
fn ordered_orthonormal<T: Scalar>(inputs: &[Vec<T>], order: &[usize]) -> Option<Vec<Vec<T>>> {
    let scale = inputs.iter().map(|v| norm(v)).fold(T::zero(), T::max);
    let mut out: Vec<Vec<T>> = Vec::with_capacity(order.len());
    for &i in order {
        let mut q = inputs.get(i)?.clone();
        linalg::project_out(&mut q, &out);
        linalg::project_out(&mut q, &out);
        let nq = norm(&q);
        if !(nq > T::lit(INDEPENDENCE_TOL) * scale) {
            return None;
        }
        out.push(linalg::scaled(nq.recip(), &q));
    }
    Some(out)
}

/// `C_T X = −(∇_X T)^h` for each basis field of `D`, in a frame of `D^⊥`.
pub fn splitting_tensor<T: Scalar>(
    chart: &Chart<T>,
    point: &[T],
    dist: &Distribution<T>,
) -> Result<SplittingTensorData<T>> {
    let (lf, _) = LocalFrame::build(chart, point, dist, None, true)?;
    Ok(SplittingTensorData {
        point: point.to_vec(),
        matrices: lf.matrices(),
        perp_frame: lf.perp.clone(),
        fields: lf.ambient.clone(),
    })
}

/// [`splitting_tensor`] expressed in a caller-supplied orthonormal basis of `D^⊥`.
pub fn splitting_tensor_in_frame<T: Scalar>(
    chart: &Chart<T>,
    point: &[T],
    dist: &Distribution<T>,
    perp_frame: &[Vec<T>],
) -> Result<SplittingTensorData<T>> {
    let (lf, _) = LocalFrame::build(chart, point, dist, None, true)?;
    if perp_frame.len() != lf.perp.len() {
        return Err(GeometryError::InvalidInput(format!(
            "D^⊥ has dimension {}, got {} vectors",
            lf.perp.len(),
            perp_frame.len()
        )));
    }
    for (a, x) in perp_frame.iter().enumerate() {
        let inside: T = lf.perp.iter().map(|y| dot(x, y) * dot(x, y)).sum();
        let unit = (norm(x) - T::one()).abs();
        let orth = perp_frame[..a]
            .iter()
            .map(|y| dot(x, y).abs())
            .fold(T::zero(), T::max);
        if unit > T::lit(1e-9) || (inside - T::one()).abs() > T::lit(1e-9) || orth > T::lit(1e-9) {
            return Err(GeometryError::InvalidInput(
                "supplied frame is not an orthonormal basis of D^⊥".into(),
            ));
        }
    }
    let params: Vec<Vec<T>> = perp_frame
        .iter()
        .map(|x| lf.ff.frame_to_params(&lf.ff.to_frame(x)))
        .collect();
    let matrices = (0..dist.rank())
        .map(|t| lf.splitting_matrix(t, perp_frame, &params))
        .collect();
    Ok(SplittingTensorData {
        point: point.to_vec(),
        matrices,
        perp_frame: perp_frame.to_vec(),
        fields: lf.ambient.clone(),
    })
}

/// `‖C² + I‖` (spectral norm); zero exactly when `C` is a complex structure.
pub fn complex_structure_defect<T: Scalar>(c: &Matrix<T>) -> T {
    c.matmul(c).add(&Matrix::identity(c.rows())).spectral_norm()
}

/// `max ‖(∇_T S)^h‖ / (1 + ‖∇_T S‖)` over pairs of basis fields.
pub fn check_totally_geodesic<T: Scalar>(
    chart: &Chart<T>,
    point: &[T],
    dist: &Distribution<T>,
) -> Result<IdentityResidualReport<T>> {
    let (lf, _) = LocalFrame::build(chart, point, dist, None, true)?;
    Ok(IdentityResidualReport::new(
        "totally geodesic",
        lf.totally_geodesic_residual(),
        T::lit(TOTALLY_GEODESIC_TOL),
        point.to_vec(),
    ))
}

/// Largest nullity-membership residual `‖α(T, ·)‖ / σ_max(α)` over the
/// normalized basis fields `T` of `D`.
pub fn membership_residual<T: Scalar>(
    chart: &Chart<T>,
    point: &[T],
    dist: &Distribution<T>,
) -> Result<IdentityResidualReport<T>> {
    let (lf, _) = LocalFrame::build(chart, point, dist, None, true)?;
    let worst = lf
        .ambient
        .iter()
        .map(|v| nullity_membership_residual(&lf.ff, v))
        .fold(T::zero(), T::max);
    Ok(IdentityResidualReport::new(
        "nullity membership",
        worst,
        T::lit(HYPOTHESIS_TOL),
        point.to_vec(),
    ))
}

/// Residual of `∇^h_S C_T = C_T C_S + C_{∇_S T} + c⟨S, T⟩ I`, maximized over
/// pairs of basis fields, relative to `1 + ‖right-hand side‖`.
///
/// `D` must be totally geodesic and inside the relative nullity at `point`;
/// otherwise a [`GeometryError::HypothesisViolation`] is returned.
pub fn residual_c1<T: Scalar>(
    chart: &Chart<T>,
    point: &[T],
    dist: &Distribution<T>,
    c: T,
) -> Result<IdentityResidualReport<T>> {
    let (base, pivots) = LocalFrame::build(chart, point, dist, None, true)?;
    base.check_membership(point)?;
    let tg = base.totally_geodesic_residual();
    if !(tg <= T::lit(HYPOTHESIS_TOL)) {
        return Err(GeometryError::HypothesisViolation(format!(
            "distribution is not totally geodesic at {:?}: residual {:e}",
            to_f64(point),
            tg.to_f64_lossy()
        )));
    }
    let k = dist.rank();
    let r = base.perp.len();
    let mats = base.matrices();

    // Gram matrix of D for decomposing ∇_S T over the basis fields.
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = dot(&base.ambient[i], &base.ambient[j]);
        }
    }
    let gram_inv = gram.inverse().ok_or_else(|| degenerate(point))?;

    let mut worst = T::zero();
    for s in 0..k {
        let dir = &base.values[s];
        let len = norm(dir);
        if len == T::zero() {
            return Err(degenerate(point));
        }
        let h = T::lit(FD_STEP) / len;
        let diff = |step: T| -> Result<(Vec<Matrix<T>>, Vec<Vec<T>>)> {
            let shifted = |sign: T| -> Result<LocalFrame<T>> {
                let q: Vec<T> = point
                    .iter()
                    .zip(dir)
                    .map(|(&p, &d)| p + sign * step * d)
                    .collect();
                Ok(LocalFrame::build(chart, &q, dist, Some(&pivots), false)?.0)
            };
            let plus = shifted(T::one())?;
            let minus = shifted(-T::one())?;
            let inv = (step + step).recip();
            let dm = plus
                .matrices()
                .iter()
                .zip(minus.matrices())
                .map(|(a, b)| a.sub(&b).scale(inv))
                .collect();
            let dx = plus
                .perp
                .iter()
                .zip(&minus.perp)
                .map(|(a, b)| linalg::scaled(inv, &linalg::sub(a, b)))
                .collect();
            Ok((dm, dx))
        };
        let (dm1, dx1) = diff(h)?;
        let (dm2, dx2) = diff(h * T::lit(0.5))?;
        let third = T::lit(1.0 / 3.0);
        let four = T::lit(4.0);
        let dm: Vec<Matrix<T>> = dm1
            .iter()
            .zip(&dm2)
            .map(|(a, b)| b.scale(four).sub(a).scale(third))
            .collect();
        let mut w = Matrix::zeros(r, r);
        for b in 0..r {
            let dxb: Vec<T> = dx1[b]
                .iter()
                .zip(&dx2[b])
                .map(|(&a, &bb)| (four * bb - a) * third)
                .collect();
            for a in 0..r {
                w[(a, b)] = dot(&dxb, &base.perp[a]);
            }
        }
        for t in 0..k {
            let ct = &mats[t];
            let lhs = dm[t].add(&w.matmul(ct)).sub(&ct.matmul(&w));

            let nabla = base.ff.from_params(&base.covariant(dir, t));
            let proj: Vec<T> = base.ambient.iter().map(|f| dot(f, &nabla)).collect();
            let beta = gram_inv.matvec(&proj);
            let mut rhs = ct.matmul(&mats[s]);
            for (j, &bj) in beta.iter().enumerate() {
                rhs = rhs.add(&mats[j].scale(bj));
            }
            let st = dot(&base.ambient[s], &base.ambient[t]);
            rhs = rhs.add(&Matrix::identity(r).scale(c * st));

            let res = lhs.sub(&rhs).spectral_norm() / (T::one() + rhs.spectral_norm());
            worst = worst.max(res);
        }
    }
    Ok(IdentityResidualReport::new(
        "splitting tensor derivative identity",
        worst,
        T::lit(C1_TOL),
        point.to_vec(),
    ))
}

/// `‖M − Mᵀ‖ / (1 + ‖M‖)` for `M = A C` (spectral norms).
pub fn symmetry_residual<T: Scalar>(a: &Matrix<T>, c: &Matrix<T>) -> T {
    let m = a.matmul(c);
    m.sub(&m.transpose()).spectral_norm() / (T::one() + m.spectral_norm())
}

/// Symmetry residual of `A_ξ ∘ C_T` on `D^⊥`, maximized over the basis of `D`
/// and over `xi` (a single unit normal) or, when `None`, the normal frame.
pub fn residual_codazzi_symmetry<T: Scalar>(
    chart: &Chart<T>,
    point: &[T],
    dist: &Distribution<T>,
    xi: Option<&[T]>,
) -> Result<IdentityResidualReport<T>> {
    let (lf, _) = LocalFrame::build(chart, point, dist, None, true)?;
    lf.check_membership(point)?;
    let normals: Vec<Vec<T>> = match xi {
        Some(v) => {
            let proj = lf.ff.normal_projection(v);
            let off = norm(&linalg::sub(v, &proj)).max((norm(v) - T::one()).abs());
            if off > T::lit(1e-8) {
                return Err(GeometryError::NotNormal {
                    residual: off.to_f64_lossy(),
                });
            }
            vec![v.to_vec()]
        }
        None => lf.ff.normal_frame.clone(),
    };
    let r = lf.perp.len();
    let mats = lf.matrices();
    let mut worst = T::zero();
    for nu in &normals {
        let mut a = Matrix::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                a[(i, j)] = dot(&lf.ff.sff_ambient(&lf.perp[i], &lf.perp[j]), nu);
            }
        }
        for ct in &mats {
            worst = worst.max(symmetry_residual(&a, ct));
        }
    }
    Ok(IdentityResidualReport::new(
        "shape operator and splitting tensor commute symmetrically",
        worst,
        T::lit(C3_TOL),
        point.to_vec(),
    ))
}

#[cfg(test)]
mod tests;
