use crate::error::{GeometryError, Result};
use crate::jets::Jet;
use crate::linalg::{self, dot, gram_schmidt_pivoted, norm, orthogonal_complement, svd, Matrix};
use crate::Scalar;

use super::chart::{AmbientSpace, DerivativeTower};

/// Metric eigenvalue ratio below which a point is declared singular.
pub const SINGULAR_RATIO: f64 = 1e-8;
/// Default relative rank tolerance for the relative nullity.
pub const NULLITY_REL_TOL: f64 = 1e-7;

/// First and second fundamental form data at one point.
#[derive(Debug, Clone)]
pub struct FundamentalForms<T: Scalar> {
    pub point: Vec<T>,
    pub ambient: AmbientSpace,
    pub position: Vec<T>,
    /// `∂_i Φ`.
    pub jacobian: Vec<Vec<T>>,
    /// `g_ij = ⟨∂_iΦ, ∂_jΦ⟩`.
    pub metric: Matrix<T>,
    /// Orthonormal tangent frame `e_a` in ambient coordinates.
    pub tangent_frame: Vec<Vec<T>>,
    /// `frame_coeffs[(a, i)]`: parameter components of `e_a`.
    pub frame_coeffs: Matrix<T>,
    /// Orthonormal basis of the normal space (orthogonal to `Φ` as well for sphere charts).
    pub normal_frame: Vec<Vec<T>>,
    /// `sff[a][b] = α(e_a, e_b)` in ambient coordinates.
    pub sff: Vec<Vec<Vec<T>>>,
    pub mean_curvature_vector: Vec<T>,
    pub mean_curvature: T,
    /// Largest `‖∂²Φ(e_a, e_b)‖` before projection; absolute scale for rank decisions.
    pub second_order_scale: T,
}

impl<T: Scalar> FundamentalForms<T> {
    pub fn dim(&self) -> usize {
        self.tangent_frame.len()
    }

    pub fn codim(&self) -> usize {
        self.normal_frame.len()
    }

    /// Frame components `⟨v, e_a⟩` of an ambient tangent vector.
    pub fn to_frame(&self, v: &[T]) -> Vec<T> {
        self.tangent_frame.iter().map(|e| dot(e, v)).collect()
    }

    pub fn from_frame(&self, c: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.position.len()];
        for (ci, e) in c.iter().zip(&self.tangent_frame) {
            linalg::axpy(*ci, e, &mut out);
        }
        out
    }

    /// Ambient tangent vector `Σ p_i ∂_iΦ`.
    pub fn from_params(&self, p: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.position.len()];
        for (pi, d) in p.iter().zip(&self.jacobian) {
            linalg::axpy(*pi, d, &mut out);
        }
        out
    }

    /// Parameter components of a vector given in frame components.
    pub fn frame_to_params(&self, c: &[T]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|a| c[a] * self.frame_coeffs[(a, i)]).sum())
            .collect()
    }

    /// `α(X, Y)` for vectors given in frame components.
    pub fn sff_frame(&self, x: &[T], y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.position.len()];
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                let w = x[a] * y[b];
                if w != T::zero() {
                    linalg::axpy(w, &self.sff[a][b], &mut out);
                }
            }
        }
        out
    }

    /// `α(X, Y)` for ambient tangent vectors.
    pub fn sff_ambient(&self, x: &[T], y: &[T]) -> Vec<T> {
        self.sff_frame(&self.to_frame(x), &self.to_frame(y))
    }

    /// Largest `‖α(e_a, e_b)‖`.
    pub fn sff_scale(&self) -> T {
        self.sff
            .iter()
            .flatten()
            .map(|v| norm(v))
            .fold(T::zero(), T::max)
    }

    /// Removes tangent (and, on spheres, radial) components.
    pub fn normal_projection(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); v.len()];
        for xi in &self.normal_frame {
            linalg::axpy(dot(v, xi), xi, &mut out);
        }
        out
    }
}

/// Metric, frames, second fundamental form and mean curvature at the tower's point.
pub fn fundamental_forms<T: Scalar>(
    tower: &DerivativeTower<T>,
    ambient: AmbientSpace,
) -> Result<FundamentalForms<T>> {
    if tower.order < 2 {
        return Err(GeometryError::InsufficientOrder {
            needed: 2,
            got: tower.order,
        });
    }
    let n = tower.dim();
    let m = tower.coord_dim();
    let jacobian = tower.first_derivatives()?;
    let mut metric = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            metric[(i, j)] = dot(&jacobian[i], &jacobian[j]);
        }
    }
    check_regular(&metric, &tower.point)?;

    let gs = gram_schmidt_pivoted(&jacobian, T::lit(1e-12));
    if gs.basis.len() < n {
        return Err(singular(&tower.point, 0.0));
    }
    let tangent_frame = gs.basis;
    let mut frame_coeffs = Matrix::zeros(n, n);
    for a in 0..n {
        for i in 0..n {
            frame_coeffs[(a, i)] = gs.coeffs[a][i];
        }
    }

    let position = tower.position();
    let mut excluded = tangent_frame.clone();
    if ambient.is_sphere() {
        let mut radial = position.clone();
        linalg::project_out(&mut radial, &tangent_frame);
        let r = norm(&radial);
        excluded.push(linalg::scaled(r.recip(), &radial));
    }
    let normal_frame = orthogonal_complement(&excluded, m);

    let mut param_sff = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in i..n {
            let d2 = tower.second_derivative(i, j)?;
            param_sff[i][j] = d2.clone();
            param_sff[j][i] = d2;
        }
    }
    let mut second_order_scale = T::zero();
    let mut sff = vec![vec![vec![T::zero(); m]; n]; n];
    for a in 0..n {
        for b in a..n {
            let mut raw = vec![T::zero(); m];
            for i in 0..n {
                for j in 0..n {
                    let w = frame_coeffs[(a, i)] * frame_coeffs[(b, j)];
                    linalg::axpy(w, &param_sff[i][j], &mut raw);
                }
            }
            second_order_scale = second_order_scale.max(norm(&raw));
            let mut proj = vec![T::zero(); m];
            for xi in &normal_frame {
                linalg::axpy(dot(&raw, xi), xi, &mut proj);
            }
            sff[a][b] = proj.clone();
            sff[b][a] = proj;
        }
    }

    let mut hvec = vec![T::zero(); m];
    for a in 0..n {
        linalg::axpy(T::one(), &sff[a][a], &mut hvec);
    }
    let inv_n = T::from_usize_lossy(n).recip();
    for x in hvec.iter_mut() {
        *x *= inv_n;
    }
    let h = norm(&hvec);

    Ok(FundamentalForms {
        point: tower.point.clone(),
        ambient,
        position,
        jacobian,
        metric,
        tangent_frame,
        frame_coeffs,
        normal_frame,
        sff,
        mean_curvature_vector: hvec,
        mean_curvature: h,
        second_order_scale,
    })
}

fn singular<T: Scalar>(point: &[T], ratio: f64) -> GeometryError {
    GeometryError::SingularPoint {
        point: point.iter().map(|x| x.to_f64_lossy()).collect(),
        ratio,
    }
}

/// Errors when the smallest metric eigenvalue is below [`SINGULAR_RATIO`] times the largest.
pub fn check_regular<T: Scalar>(metric: &Matrix<T>, point: &[T]) -> Result<()> {
    let s = svd(metric).sigma;
    let (max, min) = (s[0], s[s.len() - 1]);
    if !(max > T::zero()) || !(min > T::lit(SINGULAR_RATIO) * max) {
        let ratio = if max > T::zero() { (min / max).to_f64_lossy() } else { 0.0 };
        return Err(singular(point, ratio));
    }
    Ok(())
}

/// `A_ξ[a][b] = ⟨α(e_a, e_b), ξ⟩` for a unit normal `ξ`.
pub fn shape_operator<T: Scalar>(ff: &FundamentalForms<T>, xi: &[T]) -> Result<Matrix<T>> {
    let proj = ff.normal_projection(xi);
    let residual = norm(&linalg::sub(xi, &proj)).max((norm(xi) - T::one()).abs());
    if residual > T::lit(1e-8) {
        return Err(GeometryError::NotNormal {
            residual: residual.to_f64_lossy(),
        });
    }
    let n = ff.dim();
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = dot(&ff.sff[i][j], xi);
        }
    }
    Ok(a)
}

/// Kernel of the second fundamental form at a point.
#[derive(Debug, Clone)]
pub struct NullityData<T> {
    /// Index of relative nullity `ν`.
    pub index: usize,
    /// Orthonormal ambient tangent vectors spanning the kernel.
    pub basis: Vec<Vec<T>>,
    /// The same vectors in frame components.
    pub basis_frame: Vec<Vec<T>>,
    /// Spectrum of the flattened operator `X ↦ (⟨α(e_a, X), ξ_r⟩)_{a,r}`, descending.
    pub singular_values: Vec<T>,
    pub rel_tol: T,
}

/// Relative nullity by SVD of the flattened second fundamental form.
///
/// A singular value counts as zero when it is below `rel_tol · σ_max`, or
/// below `1e-10` of the unprojected second-derivative scale (so that a flat
/// immersion in curvilinear coordinates is not mistaken for a curved one).
pub fn relative_nullity<T: Scalar>(ff: &FundamentalForms<T>, rel_tol: T) -> NullityData<T> {
    let n = ff.dim();
    let q = ff.codim();
    let mut flat = Matrix::zeros(n * q.max(1), n);
    for (r, xi) in ff.normal_frame.iter().enumerate() {
        for a in 0..n {
            for b in 0..n {
                flat[(r * n + a, b)] = dot(&ff.sff[a][b], xi);
            }
        }
    }
    let s = svd(&flat);
    let sigma_max = s.sigma.first().copied().unwrap_or_else(T::zero);
    let floor = (rel_tol * sigma_max).max(T::lit(1e-10) * ff.second_order_scale);
    let mut basis_frame = Vec::new();
    for (k, &sv) in s.sigma.iter().enumerate() {
        if sigma_max == T::zero() || sv <= floor {
            let mut v = s.v.column(k);
            linalg::fix_sign(&mut v);
            basis_frame.push(v);
        }
    }
    let basis = basis_frame.iter().map(|c| ff.from_frame(c)).collect();
    NullityData {
        index: basis_frame.len(),
        basis,
        basis_frame,
        singular_values: s.sigma,
        rel_tol,
    }
}

/// Largest `‖α(v, e_b)‖ / σ_max(α)` for a unit tangent `v` (ambient coordinates).
pub fn nullity_membership_residual<T: Scalar>(ff: &FundamentalForms<T>, v: &[T]) -> T {
    let nv = norm(v);
    let c = linalg::scaled(nv.recip(), &ff.to_frame(v));
    let data = relative_nullity(ff, T::lit(NULLITY_REL_TOL));
    let sigma_max = data.singular_values.first().copied().unwrap_or_else(T::zero);
    let mut worst = T::zero();
    for b in 0..ff.dim() {
        let mut eb = vec![T::zero(); ff.dim()];
        eb[b] = T::one();
        worst = worst.max(norm(&ff.sff_frame(&c, &eb)));
    }
    if sigma_max == T::zero() {
        T::zero()
    } else {
        worst / sigma_max
    }
}

/// `gamma[k][i][j] = Γ^k_ij` at the tower's point.
pub type Christoffel<T> = Vec<Vec<Vec<T>>>;

/// Christoffel symbols of the induced metric.
pub fn christoffel<T: Scalar>(tower: &DerivativeTower<T>) -> Result<Christoffel<T>> {
    let jets = christoffel_jets(tower)?;
    Ok(jets
        .iter()
        .map(|gk| gk.iter().map(|row| row.iter().map(Jet::value).collect()).collect())
        .collect())
}

/// Christoffel symbols as jets of order `tower.order - 2`, for curvature computations.
pub fn christoffel_jets<T: Scalar>(tower: &DerivativeTower<T>) -> Result<Vec<Vec<Vec<Jet<T>>>>> {
    if tower.order < 2 {
        return Err(GeometryError::InsufficientOrder {
            needed: 2,
            got: tower.order,
        });
    }
    let n = tower.dim();
    let g = tower.metric_jets()?;
    let mut g0 = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g0[(i, j)] = g[i][j].value();
        }
    }
    check_regular(&g0, &tower.point)?;
    let low = tower.order - 2;
    let ginv = invert_jet_matrix(&g)?;
    let ginv: Vec<Vec<Jet<T>>> = ginv
        .iter()
        .map(|r| r.iter().map(|x| x.truncate(low)).collect::<std::result::Result<_, _>>())
        .collect::<std::result::Result<_, _>>()?;
    // dg[l][i][j] = ∂_l g_ij
    let dg: Vec<Vec<Vec<Jet<T>>>> = (0..n)
        .map(|l| {
            g.iter()
                .map(|row| {
                    row.iter()
                        .map(|x| x.derivative(l))
                        .collect::<std::result::Result<Vec<_>, _>>()
                })
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<_, _>>()?;
    let half = T::lit(0.5);
    let mut gamma = vec![vec![Vec::with_capacity(n); n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = ginv[0][0].zero_like();
                for l in 0..n {
                    let bracket = &(&dg[i][j][l] + &dg[j][i][l]) - &dg[l][i][j];
                    acc += &(&ginv[k][l] * &bracket);
                }
                gamma[k][i].push(acc.scale(half));
            }
        }
    }
    Ok(gamma)
}

/// Inverse of a symmetric 1×1, 2×2 or 3×3 matrix of jets by cofactors.
pub(crate) fn invert_jet_matrix<T: Scalar>(g: &[Vec<Jet<T>>]) -> Result<Vec<Vec<Jet<T>>>> {
    let n = g.len();
    match n {
        1 => Ok(vec![vec![g[0][0].recip()?]]),
        2 => {
            let det = &(&g[0][0] * &g[1][1]) - &(&g[0][1] * &g[1][0]);
            let inv = det.recip()?;
            Ok(vec![
                vec![&g[1][1] * &inv, -(&g[0][1] * &inv)],
                vec![-(&g[1][0] * &inv), &g[0][0] * &inv],
            ])
        }
        3 => {
            let cof = |i: usize, j: usize| {
                let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
                let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
                let m = &(&g[r[0]][c[0]] * &g[r[1]][c[1]]) - &(&g[r[0]][c[1]] * &g[r[1]][c[0]]);
                if (i + j) % 2 == 0 {
                    m
                } else {
                    -m
                }
            };
            let c: Vec<Vec<Jet<T>>> = (0..3).map(|i| (0..3).map(|j| cof(i, j)).collect()).collect();
            let det = &(&(&g[0][0] * &c[0][0]) + &(&g[0][1] * &c[0][1])) + &(&g[0][2] * &c[0][2]);
            let inv = det.recip()?;
            Ok((0..3)
                .map(|i| (0..3).map(|j| &c[j][i] * &inv).collect())
                .collect())
        }
        _ => Err(GeometryError::InvalidInput(format!("cannot invert {n}x{n} jet matrix"))),
    }
}

/// Gaussian curvature of a surface chart from the Christoffel symbols and
/// their derivatives (needs a tower of order ≥ 3).
pub fn intrinsic_gaussian_curvature<T: Scalar>(tower: &DerivativeTower<T>) -> Result<T> {
    if tower.dim() != 2 {
        return Err(GeometryError::InvalidInput("Gaussian curvature needs a surface chart".into()));
    }
    if tower.order < 3 {
        return Err(GeometryError::InsufficientOrder {
            needed: 3,
            got: tower.order,
        });
    }
    let gj = christoffel_jets(tower)?;
    let gv = |k: usize, i: usize, j: usize| gj[k][i][j].value();
    let dv = |k: usize, i: usize, j: usize, l: usize| -> Result<T> {
        Ok(gj[k][i][j].derivative(l)?.value())
    };
    // R(∂_1, ∂_2)∂_2 = R^l ∂_l
    let mut r = [T::zero(); 2];
    for (l, rl) in r.iter_mut().enumerate() {
        let mut v = dv(l, 1, 1, 0)? - dv(l, 0, 1, 1)?;
        for m in 0..2 {
            v += gv(m, 1, 1) * gv(l, 0, m) - gv(m, 0, 1) * gv(l, 1, m);
        }
        *rl = v;
    }
    let d1 = tower.first_derivatives()?;
    let g = |i: usize, j: usize| dot(&d1[i], &d1[j]);
    let det = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
    Ok((g(0, 0) * r[0] + g(0, 1) * r[1]) / det)
}
