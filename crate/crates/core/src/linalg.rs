//! Small dense linear algebra over [`Scalar`]: Jacobi SVD, pivoted
//! Gram–Schmidt, orthogonal complements and inverses for matrices of a few
//! dozen entries.

use std::ops::{Index, IndexMut};

use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, &x) in col.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        svd(self).sigma.first().copied().unwrap_or_else(T::zero)
    }

    /// Gauss–Jordan inverse with partial pivoting; `None` if numerically singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        if scale == T::zero() {
            return None;
        }
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[(i, col)].abs().partial_cmp(&a[(j, col)].abs()).unwrap())
                .unwrap();
            if a[(piv, col)].abs() <= scale * T::epsilon() * T::lit(16.0) {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let d = a[(col, col)].recip();
            for j in 0..n {
                a[(col, j)] *= d;
                inv[(col, j)] *= d;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let (acol, icol) = (a[(col, j)], inv[(col, j)]);
                    a[(i, j)] -= f * acol;
                    inv[(i, j)] -= f * icol;
                }
            }
        }
        Some(inv)
    }

    /// Symmetric part `(A + Aᵀ)/2`.
    pub fn symmetric_part(&self) -> Self {
        self.add(&self.transpose()).scale(T::lit(0.5))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Thin singular value decomposition `A = U Σ Vᵀ`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// Left singular vectors (columns); a zero column where `σ = 0`.
    pub u: Matrix<T>,
    pub sigma: Vec<T>,
    /// Right singular vectors (columns), always a full orthogonal `n × n` matrix.
    pub v: Matrix<T>,
}

/// One-sided Jacobi SVD. Accurate to working precision for the small,
/// possibly rank-deficient matrices the geometry code produces.
pub fn svd<T: Scalar>(a: &Matrix<T>) -> Svd<T> {
    let (m, n) = (a.rows, a.cols);
    let mut w = a.clone();
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    let (wp, wq) = (w[(i, p)], w[(i, q)]);
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = (T::one() + t * t).sqrt().recip();
                let s = c * t;
                for i in 0..m {
                    let (wp, wq) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
                for i in 0..n {
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)] * w[(i, j)]).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));

    let mut u = Matrix::zeros(m, n);
    let mut vs = Matrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        for i in 0..n {
            vs[(i, k)] = v[(i, j)];
        }
        if s > T::zero() {
            for i in 0..m {
                u[(i, k)] = w[(i, j)] / s;
            }
        }
    }
    Svd { u, sigma, v: vs }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled<T: Scalar>(alpha: T, x: &[T]) -> Vec<T> {
    x.iter().map(|&v| alpha * v).collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

/// Removes from `v` its components along the orthonormal vectors `basis`
/// (two passes for stability).
pub fn project_out<T: Scalar>(v: &mut [T], basis: &[Vec<T>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            axpy(-c, b, v);
        }
    }
}

/// Flips `v` so its first component with magnitude above `tol` is positive.
pub fn fix_sign<T: Scalar>(v: &mut [T]) {
    let scale = v.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    let tol = scale * T::lit(1e-8);
    if let Some(&first) = v.iter().find(|x| x.abs() > tol) {
        if first < T::zero() {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

/// Result of [`gram_schmidt_pivoted`].
#[derive(Debug, Clone)]
pub struct Orthonormalized<T> {
    /// Orthonormal vectors, in pivot order.
    pub basis: Vec<Vec<T>>,
    /// Input index chosen at each step.
    pub pivots: Vec<usize>,
    /// `coeffs[a][i]`: `basis[a] = Σ_i coeffs[a][i] · input[i]`.
    pub coeffs: Vec<Vec<T>>,
}

/// Gram–Schmidt that always takes the input with largest remaining norm next.
/// Stops early when every remaining residual falls below `rel_tol` times the
/// largest input norm. Frames are sign-normalized with [`fix_sign`].
pub fn gram_schmidt_pivoted<T: Scalar>(inputs: &[Vec<T>], rel_tol: T) -> Orthonormalized<T> {
    let k = inputs.len();
    let scale = inputs.iter().map(|v| norm(v)).fold(T::zero(), T::max);
    // residual[i] = inputs[i] - projection, with coefficient rows tracked
    let mut resid: Vec<Vec<T>> = inputs.to_vec();
    let mut resid_coeffs: Vec<Vec<T>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let mut used = vec![false; k];
    let mut out = Orthonormalized {
        basis: Vec::new(),
        pivots: Vec::new(),
        coeffs: Vec::new(),
    };
    if scale == T::zero() {
        return out;
    }
    loop {
        let best = (0..k)
            .filter(|&i| !used[i])
            .map(|i| (i, norm(&resid[i])))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)));
        let Some((p, nrm)) = best else { break };
        if nrm <= rel_tol * scale {
            break;
        }
        used[p] = true;
        let mut q = resid[p].clone();
        let mut c = resid_coeffs[p].clone();
        // one re-orthogonalization pass
        for (b, bc) in out.basis.iter().zip(&out.coeffs) {
            let d = dot(&q, b);
            axpy(-d, b, &mut q);
            axpy(-d, bc, &mut c);
        }
        let nq = norm(&q);
        let inv = nq.recip();
        for x in q.iter_mut() {
            *x *= inv;
        }
        for x in c.iter_mut() {
            *x *= inv;
        }
        let before = q.clone();
        fix_sign(&mut q);
        if q != before {
            for x in c.iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..k {
            if used[i] {
                continue;
            }
            let d = dot(&resid[i], &q);
            let qc = c.clone();
            axpy(-d, &q, &mut resid[i]);
            axpy(-d, &qc, &mut resid_coeffs[i]);
        }
        out.basis.push(q);
        out.pivots.push(p);
        out.coeffs.push(c);
    }
    out
}

/// Orthonormal basis of the orthogonal complement of span(`basis`) in ℝ^dim.
/// `basis` must be orthonormal. Candidates are the standard basis vectors,
/// taken in order of largest residual.
pub fn orthogonal_complement<T: Scalar>(basis: &[Vec<T>], dim: usize) -> Vec<Vec<T>> {
    let mut current: Vec<Vec<T>> = basis.to_vec();
    let mut out = Vec::new();
    let target = dim.saturating_sub(basis.len());
    let mut used = vec![false; dim];
    while out.len() < target {
        let mut best: Option<(usize, Vec<T>, T)> = None;
        for i in 0..dim {
            if used[i] {
                continue;
            }
            let mut e = vec![T::zero(); dim];
            e[i] = T::one();
            project_out(&mut e, &current);
            let n = norm(&e);
            if best.as_ref().map_or(true, |b| n > b.2) {
                best = Some((i, e, n));
            }
        }
        let Some((i, mut e, n)) = best else { break };
        used[i] = true;
        if n <= T::lit(1e-6) {
            break;
        }
        for x in e.iter_mut() {
            *x /= n;
        }
        fix_sign(&mut e);
        current.push(e.clone());
        out.push(e);
    }
    out
}
