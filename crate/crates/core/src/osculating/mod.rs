//! Higher normal spaces, higher fundamental forms and curvature ellipses.

use crate::error::{GeometryError, Result};
use crate::immersion::{
    evaluate_tower, fundamental_forms, AmbientSpace, Chart, DerivativeTower, FundamentalForms,
};
use crate::jets::MultiIndex;
use crate::linalg::{self, dot, gram_schmidt_pivoted, norm, svd, Matrix};
use crate::Scalar;

/// Default relative rank tolerance for each flag stage.
pub const FLAG_REL_TOL: f64 = 1e-6;
/// Parameter offset of the nicely-curved probe stencil.
pub const PROBE_RADIUS: f64 = 1e-3;
/// Default number of ellipse samples.
pub const ELLIPSE_SAMPLES: usize = 32;

/// Osculating flag `N_1 ⊕ N_2 ⊕ …` at a point.
#[derive(Debug, Clone)]
pub struct OsculatingFlag<T> {
    pub point: Vec<T>,
    pub ambient: AmbientSpace,
    /// `ranks[ℓ - 1] = dim N_ℓ`.
    pub ranks: Vec<usize>,
    /// Orthonormal ambient bases of each `N_ℓ`.
    pub bases: Vec<Vec<Vec<T>>>,
    /// Number of nonempty normal spaces.
    pub tau: usize,
    /// False when a probe around the point found different ranks.
    pub nicely_curved_ok: bool,
    /// True when the flag ended because the normal space was exhausted or
    /// a stage came out empty, rather than because the tower ran out of order.
    pub complete: bool,
}

impl<T: Scalar> OsculatingFlag<T> {
    /// `τ°`: `τ − 1` when the codimension is odd, else `τ`.
    pub fn tau_circ(&self) -> usize {
        let codim = self.ambient.dim().saturating_sub(self.dim());
        if codim % 2 == 1 {
            self.tau.saturating_sub(1)
        } else {
            self.tau
        }
    }

    fn dim(&self) -> usize {
        self.point.len()
    }

    /// Orthogonal projection onto `N_ℓ`.
    pub fn project(&self, ell: usize, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); v.len()];
        if ell >= 1 {
            if let Some(basis) = self.bases.get(ell - 1) {
                for b in basis {
                    linalg::axpy(dot(v, b), b, &mut out);
                }
            }
        }
        out
    }
}

/// Computes the flag from a derivative tower.
///
/// Stage `ℓ` takes every order-`ℓ+1` partial derivative, removes the tangent
/// space, the earlier stages and (on spheres) the position, and keeps the
/// singular directions above `rel_tol · σ_max`. A stage whose `σ_max` is
/// below `rel_tol` times the raw derivative size counts as empty.
pub fn osculating_flag<T: Scalar>(
    tower: &DerivativeTower<T>,
    ambient: AmbientSpace,
    rel_tol: T,
) -> Result<OsculatingFlag<T>> {
    let n = tower.dim();
    let m = tower.coord_dim();
    let jac = tower.first_derivatives()?;
    let gs = gram_schmidt_pivoted(&jac, T::lit(1e-12));
    if gs.basis.len() < n {
        return Err(GeometryError::SingularPoint {
            point: tower.point.iter().map(|x| x.to_f64_lossy()).collect(),
            ratio: 0.0,
        });
    }
    let mut excluded = gs.basis;
    if ambient.is_sphere() {
        let mut radial = tower.position();
        linalg::project_out(&mut radial, &excluded);
        let r = norm(&radial);
        excluded.push(linalg::scaled(r.recip(), &radial));
    }
    let mut flag = OsculatingFlag {
        point: tower.point.clone(),
        ambient,
        ranks: Vec::new(),
        bases: Vec::new(),
        tau: 0,
        nicely_curved_ok: true,
        complete: false,
    };
    let mut s = 2;
    loop {
        if excluded.len() >= m {
            flag.complete = true;
            break;
        }
        if s > tower.order {
            break;
        }
        let indices = multi_indices_of_degree(n, s)?;
        let mut raw_scale = T::zero();
        let mut rows = Vec::with_capacity(indices.len());
        for idx in &indices {
            let mut v = tower.partial_vector(idx)?;
            raw_scale = raw_scale.max(norm(&v));
            linalg::project_out(&mut v, &excluded);
            linalg::project_out(&mut v, &excluded);
            rows.push(v);
        }
        let dec = svd(&Matrix::from_rows(&rows));
        let smax = dec.sigma.first().copied().unwrap_or_else(T::zero);
        if !(smax > rel_tol * raw_scale) {
            flag.complete = true;
            break;
        }
        let rank = dec.sigma.iter().filter(|&&x| x > rel_tol * smax).count();
        let basis: Vec<Vec<T>> = (0..rank)
            .map(|k| {
                let mut b = dec.v.column(k);
                linalg::project_out(&mut b, &excluded);
                let nb = norm(&b);
                let mut b = linalg::scaled(nb.recip(), &b);
                linalg::fix_sign(&mut b);
                b
            })
            .collect();
        excluded.extend(basis.iter().cloned());
        flag.ranks.push(rank);
        flag.bases.push(basis);
        flag.tau += 1;
        s += 1;
    }
    Ok(flag)
}

fn multi_indices_of_degree(n: usize, s: usize) -> Result<Vec<MultiIndex>> {
    let mut out = Vec::new();
    let mut e = [0usize; 3];
    fn rec(pos: usize, n: usize, left: usize, e: &mut [usize; 3], out: &mut Vec<[usize; 3]>) {
        if pos + 1 == n {
            e[pos] = left;
            out.push(*e);
            e[pos] = 0;
            return;
        }
        for k in (0..=left).rev() {
            e[pos] = k;
            rec(pos + 1, n, left - k, e, out);
        }
        e[pos] = 0;
    }
    let mut raw = Vec::new();
    rec(0, n, s, &mut e, &mut raw);
    for r in raw {
        out.push(MultiIndex::new(&r[..n])?);
    }
    Ok(out)
}

/// Flag at `point` of `chart`, with ranks probed on a five-point stencil.
pub fn osculating_flag_at<T: Scalar>(
    chart: &Chart<T>,
    point: &[T],
    order: usize,
    rel_tol: T,
) -> Result<OsculatingFlag<T>> {
    let tower = evaluate_tower(chart, point, order)?;
    let mut flag = osculating_flag(&tower, chart.ambient(), rel_tol)?;
    let r = T::lit(PROBE_RADIUS);
    for axis in 0..chart.dim().min(2) {
        for sign in [-T::one(), T::one()] {
            let mut q = point.to_vec();
            q[axis] += sign * r;
            let same = evaluate_tower(chart, &q, order)
                .and_then(|t| osculating_flag(&t, chart.ambient(), rel_tol))
                .map(|f| f.ranks == flag.ranks)
                .unwrap_or(false);
            if !same {
                flag.nicely_curved_ok = false;
            }
        }
    }
    Ok(flag)
}

/// `α_s(Z, …, Z)`: the `s`-th derivative of the chart along the parameter
/// direction `z`, projected onto `N_{s-1}`. Returns the zero vector when the
/// flag ended before `N_{s-1}`.
pub fn higher_form<T: Scalar>(
    tower: &DerivativeTower<T>,
    flag: &OsculatingFlag<T>,
    s: usize,
    z: &[T],
) -> Result<Vec<T>> {
    if s < 2 {
        return Err(GeometryError::InvalidInput(format!("higher form of order {s}")));
    }
    if s > tower.order {
        return Err(GeometryError::InsufficientOrder {
            needed: s,
            got: tower.order,
        });
    }
    if s - 1 > flag.tau {
        if flag.complete {
            return Ok(vec![T::zero(); tower.coord_dim()]);
        }
        return Err(GeometryError::InsufficientOrder {
            needed: s,
            got: tower.order,
        });
    }
    let v = linalg::scaled(factorial::<T>(s), &tower.homogeneous_vector(s, z));
    Ok(flag.project(s - 1, &v))
}

fn factorial<T: Scalar>(s: usize) -> T {
    (1..=s).fold(T::one(), |acc, k| acc * T::from_usize_lossy(k))
}

/// An almost complex structure on a tangent plane (`TM` of a surface, or `D^⊥`).
#[derive(Debug, Clone)]
pub struct EllipticStructure<T> {
    /// `J` in the orthonormal frame below.
    pub j: Matrix<T>,
    /// Orthonormal ambient frame of the plane.
    pub frame: Vec<Vec<T>>,
    /// Frame components of the unit `Z` with `⟨Z, JZ⟩ = 0`.
    pub z: Vec<T>,
    /// `‖JZ‖`, so that `J e₁ = b e₂`, `J e₂ = −e₁/b` for `e₁ = Z`, `e₂ = JZ/b`.
    pub b: T,
}

impl<T: Scalar> EllipticStructure<T> {
    pub fn new(j: Matrix<T>, frame: Vec<Vec<T>>) -> Result<Self> {
        if j.rows() != 2 || j.cols() != 2 || frame.len() != 2 {
            return Err(GeometryError::InvalidInput(
                "an elliptic structure lives on a plane".into(),
            ));
        }
        let defect = j.matmul(&j).add(&Matrix::identity(2)).max_abs();
        let scale = T::one().max(j.max_abs() * j.max_abs());
        if !(defect <= T::lit(1e-10) * scale) {
            return Err(GeometryError::InvalidInput(format!(
                "J² ≠ −I (defect {:e})",
                defect.to_f64_lossy()
            )));
        }
        // ⟨Z, JZ⟩ = a cos 2t + c sin 2t for Z = (cos t, sin t)
        let a = (j[(0, 0)] - j[(1, 1)]) * T::lit(0.5);
        let c = (j[(0, 1)] + j[(1, 0)]) * T::lit(0.5);
        let t = (-a).atan2(c) * T::lit(0.5);
        let z = vec![t.cos(), t.sin()];
        let b = norm(&j.matvec(&z));
        Ok(Self { j, frame, z, b })
    }

    /// Rotation by a right angle in `frame`.
    pub fn rotation(frame: Vec<Vec<T>>) -> Result<Self> {
        Self::new(
            Matrix::from_rows(&[vec![T::zero(), -T::one()], vec![T::one(), T::zero()]]),
            frame,
        )
    }

    /// Rotation in the tangent plane of a surface.
    pub fn tangent_rotation(ff: &FundamentalForms<T>) -> Result<Self> {
        Self::rotation(ff.tangent_frame.clone())
    }

    /// Ambient vector with frame components `c`.
    pub fn ambient(&self, c: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.frame[0].len()];
        for (ci, e) in c.iter().zip(&self.frame) {
            linalg::axpy(*ci, e, &mut out);
        }
        out
    }

    /// Frame components of `Z_θ = cos θ Z + sin θ JZ`.
    pub fn z_theta(&self, theta: T) -> Vec<T> {
        let jz = self.j.matvec(&self.z);
        let (s, c) = theta.sin_cos();
        vec![c * self.z[0] + s * jz[0], c * self.z[1] + s * jz[1]]
    }
}

/// Semi-axes and circularity of a curvature ellipse.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureEllipse<T> {
    pub order: usize,
    pub kappa: T,
    pub mu: T,
    pub circle_defect: T,
    pub center_norm: T,
}

/// `(κ² − μ²)/(κ² + μ²)`, zero for a degenerate point ellipse.
pub fn circle_defect<T: Scalar>(kappa: T, mu: T) -> T {
    let den = kappa * kappa + mu * mu;
    if den == T::zero() {
        T::zero()
    } else {
        (kappa * kappa - mu * mu) / den
    }
}

/// Ellipse through the sampled points, by SVD of the centered samples.
///
/// `samples` must be equally spaced over a full period.
pub fn ellipse_from_samples<T: Scalar>(order: usize, samples: &[Vec<T>]) -> CurvatureEllipse<T> {
    let n = samples.len();
    let dim = samples[0].len();
    let inv_n = T::from_usize_lossy(n).recip();
    let mut center = vec![T::zero(); dim];
    for s in samples {
        linalg::axpy(inv_n, s, &mut center);
    }
    let rows: Vec<Vec<T>> = samples.iter().map(|s| linalg::sub(s, &center)).collect();
    let sigma = svd(&Matrix::from_rows(&rows)).sigma;
    let scale = (T::lit(2.0) * inv_n).sqrt();
    let kappa = sigma.first().copied().unwrap_or_else(T::zero) * scale;
    let mu = sigma.get(1).copied().unwrap_or_else(T::zero) * scale;
    CurvatureEllipse {
        order,
        kappa,
        mu,
        circle_defect: circle_defect(kappa, mu),
        center_norm: norm(&center),
    }
}

/// Curvature ellipse `ℰ_ℓ = {α_{ℓ+1}(Z_θ, …, Z_θ)}` sampled at `n_samples`
/// equally spaced `θ ∈ [0, 2π)`. `ℓ = 0` is the image of `Z_θ` itself.
pub fn curvature_ellipse<T: Scalar>(
    tower: &DerivativeTower<T>,
    flag: &OsculatingFlag<T>,
    ell: usize,
    j: &EllipticStructure<T>,
    n_samples: usize,
) -> Result<CurvatureEllipse<T>> {
    curvature_ellipse_from(tower, flag, ell, j, n_samples, T::zero())
}

/// [`curvature_ellipse`] started from `Z_{θ₀}` instead of `Z`.
pub fn curvature_ellipse_from<T: Scalar>(
    tower: &DerivativeTower<T>,
    flag: &OsculatingFlag<T>,
    ell: usize,
    j: &EllipticStructure<T>,
    n_samples: usize,
    theta0: T,
) -> Result<CurvatureEllipse<T>> {
    if n_samples < 16 {
        return Err(GeometryError::InvalidInput(format!(
            "{n_samples} ellipse samples, need at least 16"
        )));
    }
    if ell > flag.tau_circ() {
        return Err(GeometryError::InvalidInput(format!(
            "ellipse of order {ell} beyond τ° = {}",
            flag.tau_circ()
        )));
    }
    let ff = fundamental_forms(tower, flag.ambient)?;
    let two_pi = T::PI() + T::PI();
    let mut samples = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let theta = theta0 + two_pi * T::from_usize_lossy(k) / T::from_usize_lossy(n_samples);
        let zt = j.ambient(&j.z_theta(theta));
        let sample = if ell == 0 {
            zt
        } else {
            let zp = ff.frame_to_params(&ff.to_frame(&zt));
            higher_form(tower, flag, ell + 1, &zp)?
        };
        samples.push(sample);
    }
    Ok(ellipse_from_samples(ell, &samples))
}

/// `|⟨ξ, ξ⟩_ℂ| / ⟨ξ, ξ̄⟩` for `ξ = α_r(E, …, E)`, `E = (∂_u + i ∂_v)/λ`, on a
/// conformal minimal surface chart. Zero exactly when `ℰ_{r-1}` is a circle.
pub fn isotropy_defect<T: Scalar>(
    tower: &DerivativeTower<T>,
    flag: &OsculatingFlag<T>,
    r: usize,
) -> Result<T> {
    if tower.dim() != 2 {
        return Err(GeometryError::InvalidInput("isotropy needs a surface chart".into()));
    }
    let ff = fundamental_forms(tower, flag.ambient)?;
    let g = &ff.metric;
    let l2 = (g[(0, 0)] + g[(1, 1)]) * T::lit(0.5);
    let off = (g[(0, 0)] - g[(1, 1)]).abs() + g[(0, 1)].abs() * T::lit(2.0);
    if !(off <= T::lit(1e-8) * l2) {
        return Err(GeometryError::InvalidInput(format!(
            "chart is not conformal (relative defect {:e})",
            (off / l2).to_f64_lossy()
        )));
    }
    if !(ff.mean_curvature <= T::lit(1e-8) * ff.second_order_scale.max(T::one())) {
        return Err(GeometryError::InvalidInput(format!(
            "chart is not minimal (H = {:e})",
            ff.mean_curvature.to_f64_lossy()
        )));
    }
    if r < 2 || r - 1 > flag.tau || r > tower.order {
        return Err(GeometryError::InvalidInput(format!(
            "isotropy of order {r} outside the flag (τ = {}, tower order {})",
            flag.tau, tower.order
        )));
    }
    let inv_l = l2.sqrt().recip();
    let (re, im) = tower.homogeneous_vector_complex(r, &[inv_l, T::zero()], &[T::zero(), inv_l]);
    let f = factorial::<T>(r);
    let re = flag.project(r - 1, &linalg::scaled(f, &re));
    let im = flag.project(r - 1, &linalg::scaled(f, &im));
    let herm = dot(&re, &re) + dot(&im, &im);
    if herm == T::zero() {
        return Err(GeometryError::InvalidInput(format!("α_{r}(E, …, E) vanishes")));
    }
    let bil_re = dot(&re, &re) - dot(&im, &im);
    let bil_im = T::lit(2.0) * dot(&re, &im);
    Ok(bil_re.hypot(bil_im) / herm)
}

/// `max_X ‖α(X,X) + α(JX,JX)‖ / max_X (‖α(X,X)‖ + ‖α(JX,JX)‖)` over unit `X`
/// at eight directions of the plane carrying `J`.
pub fn ellipticity_defect<T: Scalar>(ff: &FundamentalForms<T>, j: &EllipticStructure<T>) -> Result<T> {
    if j.frame.len() != 2 {
        return Err(GeometryError::InvalidInput("D^⊥ is not a plane".into()));
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for k in 0..8 {
        let psi = T::PI() * T::from_usize_lossy(k) / T::lit(8.0);
        let (s, c) = psi.sin_cos();
        let x = j.ambient(&[c, s]);
        let jx = j.ambient(&j.j.matvec(&[c, s]));
        let a = ff.sff_ambient(&x, &x);
        let b = ff.sff_ambient(&jx, &jx);
        num = num.max(norm(&linalg::add(&a, &b)));
        den = den.max(norm(&a) + norm(&b));
    }
    Ok(if den == T::zero() { T::zero() } else { num / den })
}

#[cfg(test)]
mod tests;
