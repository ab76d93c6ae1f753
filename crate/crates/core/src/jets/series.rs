//! Truncated univariate power series `Σ c_k t^k`, used to build the
//! elementary-function compositions and the ODE Taylor expansions.

use crate::Scalar;

pub fn mul<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().min(b.len());
    let mut out = vec![T::zero(); n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// Series reciprocal by the recursion `b_0 = 1/a_0`, `b_k = -(Σ_{j≥1} a_j b_{k-j}) / a_0`.
/// Caller guarantees `a[0] != 0`.
pub fn recip<T: Scalar>(a: &[T]) -> Vec<T> {
    let n = a.len();
    let mut b = vec![T::zero(); n];
    b[0] = a[0].recip();
    for k in 1..n {
        let mut acc = T::zero();
        for j in 1..=k {
            acc += a[j] * b[k - j];
        }
        b[k] = -acc * b[0];
    }
    b
}

/// `a^p` for real `p` (Miller recurrence). Caller guarantees `a[0] > 0`.
pub fn powf<T: Scalar>(a: &[T], p: T) -> Vec<T> {
    let n = a.len();
    let mut b = vec![T::zero(); n];
    b[0] = a[0].powf(p);
    for k in 1..n {
        let kt = T::from_usize_lossy(k);
        let mut acc = T::zero();
        for j in 1..=k {
            let jt = T::from_usize_lossy(j);
            acc += ((p + T::one()) * jt - kt) * a[j] * b[k - j];
        }
        b[k] = acc / (kt * a[0]);
    }
    b
}

/// Antiderivative with the given constant term; keeps the input length.
pub fn integrate<T: Scalar>(a: &[T], constant: T) -> Vec<T> {
    let n = a.len();
    let mut out = vec![T::zero(); n];
    if n == 0 {
        return out;
    }
    out[0] = constant;
    for k in 1..n {
        out[k] = a[k - 1] / T::from_usize_lossy(k);
    }
    out
}

pub fn derivative<T: Scalar>(a: &[T]) -> Vec<T> {
    let n = a.len();
    let mut out = vec![T::zero(); n];
    for k in 1..n {
        out[k - 1] = a[k] * T::from_usize_lossy(k);
    }
    out
}

pub fn eval<T: Scalar>(a: &[T], t: T) -> T {
    a.iter().rev().fold(T::zero(), |acc, &c| acc * t + c)
}

// Taylor coefficients of elementary functions about a base value, length `n`.

pub fn exp_at<T: Scalar>(x0: T, n: usize) -> Vec<T> {
    let e = x0.exp();
    let mut out = Vec::with_capacity(n);
    let mut fact = T::one();
    for k in 0..n {
        if k > 0 {
            fact *= T::from_usize_lossy(k);
        }
        out.push(e / fact);
    }
    out
}

pub fn sin_cos_at<T: Scalar>(x0: T, n: usize) -> (Vec<T>, Vec<T>) {
    let (s, c) = x0.sin_cos();
    let sin_cycle = [s, c, -s, -c];
    let cos_cycle = [c, -s, -c, s];
    let mut sin = Vec::with_capacity(n);
    let mut cos = Vec::with_capacity(n);
    let mut fact = T::one();
    for k in 0..n {
        if k > 0 {
            fact *= T::from_usize_lossy(k);
        }
        sin.push(sin_cycle[k % 4] / fact);
        cos.push(cos_cycle[k % 4] / fact);
    }
    (sin, cos)
}

pub fn sinh_cosh_at<T: Scalar>(x0: T, n: usize) -> (Vec<T>, Vec<T>) {
    let (s, c) = (x0.sinh(), x0.cosh());
    let mut sinh = Vec::with_capacity(n);
    let mut cosh = Vec::with_capacity(n);
    let mut fact = T::one();
    for k in 0..n {
        if k > 0 {
            fact *= T::from_usize_lossy(k);
        }
        let (a, b) = if k % 2 == 0 { (s, c) } else { (c, s) };
        sinh.push(a / fact);
        cosh.push(b / fact);
    }
    (sinh, cosh)
}

pub fn ln_at<T: Scalar>(x0: T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    out.push(x0.ln());
    let inv = x0.recip();
    let mut pow = T::one();
    for k in 1..n {
        pow *= inv;
        let sign = if k % 2 == 1 { T::one() } else { -T::one() };
        out.push(sign * pow / T::from_usize_lossy(k));
    }
    out
}

/// `(x0 + t)^p`; binomial coefficients for real `p`.
pub fn powf_at<T: Scalar>(x0: T, p: T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    let mut binom = T::one();
    for k in 0..n {
        if k > 0 {
            binom = binom * (p - T::from_usize_lossy(k - 1)) / T::from_usize_lossy(k);
        }
        out.push(binom * x0.powf(p - T::from_usize_lossy(k)));
    }
    out
}

/// `(x0 + t)^p` for integer `p`; exact at `x0 = 0` when `p ≥ 0`.
pub fn powi_at<T: Scalar>(x0: T, p: i32, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    let mut binom = T::one();
    let pt = T::from_i32(p).expect("i32 exponent");
    for k in 0..n {
        if k > 0 {
            binom = binom * (pt - T::from_usize_lossy(k - 1)) / T::from_usize_lossy(k);
        }
        let e = p - k as i32;
        let term = if p >= 0 && e < 0 {
            T::zero()
        } else {
            binom * x0.powi(e)
        };
        out.push(term);
    }
    out
}

pub fn atan_at<T: Scalar>(x0: T, n: usize) -> Vec<T> {
    // d/dt atan(x0 + t) = 1 / (1 + x0² + 2 x0 t + t²)
    let mut q = vec![T::zero(); n.max(1)];
    q[0] = T::one() + x0 * x0;
    if n > 1 {
        q[1] = x0 + x0;
    }
    if n > 2 {
        q[2] = T::one();
    }
    let d = recip(&q);
    let mut out = integrate(&d, x0.atan());
    out.truncate(n);
    out
}
