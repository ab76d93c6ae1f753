//! Forward-mode truncated Taylor arithmetic in up to three variables.
//!
//! A [`Jet`] stores the Taylor coefficients `∂^α f / α!` of a scalar function
//! for every multi-index `|α| ≤ K`. Products are plain truncated convolutions
//! and [`Jet::partial`] rescales by `α!` on the way out.

mod complex;
mod layout;
pub mod series;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

use crate::Scalar;

pub use complex::ComplexJet;
pub use layout::{monomial_count, MultiIndex, MAX_DIMS, MAX_ORDER};
pub(crate) use layout::Layout;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("expected {expected} coordinates, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("jets of shape ({0}, {1}) and ({2}, {3}) cannot be combined")]
    LayoutMismatch(usize, usize, usize, usize),
    #[error("division by a jet with zero constant term")]
    ZeroDivisor,
    #[error("{function} is not defined at {value}")]
    Domain { function: &'static str, value: f64 },
    #[error("derivative order {requested} exceeds jet order {available}")]
    OrderOverflow { requested: usize, available: usize },
    #[error("jets support 1 to {max} variables, got {0}", max = MAX_DIMS)]
    UnsupportedDims(usize),
}

/// Variable count and truncation order used when seeding jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JetBudget {
    pub max_order: usize,
    pub dims: usize,
}

impl JetBudget {
    pub fn new(dims: usize, max_order: usize) -> Self {
        Self { max_order, dims }
    }
}

impl Default for JetBudget {
    fn default() -> Self {
        Self {
            max_order: 5,
            dims: 2,
        }
    }
}

/// Seeds one jet per coordinate: constant term `point[i]`, unit slope in variable `i`.
pub fn seed_variables<T: Scalar>(point: &[T], budget: JetBudget) -> Result<Vec<Jet<T>>, JetError> {
    if point.len() != budget.dims {
        return Err(JetError::DimensionMismatch {
            expected: budget.dims,
            found: point.len(),
        });
    }
    let layout = layout::layout(budget.dims, budget.max_order)?;
    Ok(point
        .iter()
        .enumerate()
        .map(|(i, &x)| Jet::variable_in(layout, x, i))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    PowInt(i32),
    Atan,
}

/// Applies a binary (or, for `Neg`, unary in `a`) operation with shape checks.
pub fn jet_arith<T: Scalar>(op: ArithOp, a: &Jet<T>, b: &Jet<T>) -> Result<Jet<T>, JetError> {
    if op != ArithOp::Neg {
        a.check_same(b)?;
    }
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.try_div(b)?,
        ArithOp::Neg => -a,
    })
}

pub fn jet_elementary<T: Scalar>(f: Elementary, a: &Jet<T>) -> Result<Jet<T>, JetError> {
    match f {
        Elementary::Sin => Ok(a.sin()),
        Elementary::Cos => Ok(a.cos()),
        Elementary::Exp => Ok(a.exp()),
        Elementary::Log => a.ln(),
        Elementary::Sqrt => a.sqrt(),
        Elementary::PowInt(n) => a.powi(n),
        Elementary::Atan => Ok(a.atan()),
    }
}

/// Truncated multivariate Taylor expansion of a real scalar.
#[derive(Clone)]
pub struct Jet<T> {
    layout: &'static Layout,
    coeffs: Vec<T>,
}

impl<T: Scalar> Jet<T> {
    pub(crate) fn constant_in(layout: &'static Layout, value: T) -> Self {
        let mut coeffs = vec![T::zero(); layout.len()];
        coeffs[0] = value;
        Self { layout, coeffs }
    }

    fn variable_in(layout: &'static Layout, value: T, var: usize) -> Self {
        let mut j = Self::constant_in(layout, value);
        if layout.order > 0 {
            j.coeffs[1 + var] = T::one();
        }
        j
    }

    pub fn constant(value: T, dims: usize, order: usize) -> Result<Self, JetError> {
        Ok(Self::constant_in(layout::layout(dims, order)?, value))
    }

    pub fn variable(value: T, var: usize, dims: usize, order: usize) -> Result<Self, JetError> {
        if var >= dims {
            return Err(JetError::DimensionMismatch {
                expected: dims,
                found: var + 1,
            });
        }
        Ok(Self::variable_in(layout::layout(dims, order)?, value, var))
    }

    /// Builds a jet from Taylor coefficients listed in graded-lex order.
    pub fn from_coeffs(dims: usize, order: usize, coeffs: Vec<T>) -> Result<Self, JetError> {
        let layout = layout::layout(dims, order)?;
        if coeffs.len() != layout.len() {
            return Err(JetError::DimensionMismatch {
                expected: layout.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self { layout, coeffs })
    }

    /// Constant jet with the same shape as `self`.
    pub fn constant_like(&self, value: T) -> Self {
        Self::constant_in(self.layout, value)
    }

    pub fn zero_like(&self) -> Self {
        self.constant_like(T::zero())
    }

    pub fn dims(&self) -> usize {
        self.layout.dims
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// Taylor coefficients in graded-lex order.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn multi_indices(&self) -> &'static [MultiIndex] {
        &self.layout.indices
    }

    /// Taylor coefficient `∂^α f / α!`, or `None` past the truncation order.
    pub fn coeff(&self, idx: &MultiIndex) -> Option<T> {
        self.layout.position(idx).map(|p| self.coeffs[p])
    }

    /// `∂^α f` at the base point.
    pub fn partial(&self, idx: &MultiIndex) -> Result<T, JetError> {
        let p = self
            .layout
            .position(idx)
            .ok_or(JetError::OrderOverflow {
                requested: idx.order(),
                available: self.order(),
            })?;
        Ok(self.coeffs[p] * T::lit(idx.factorial()))
    }

    /// Monomials of a single total degree with their Taylor coefficients.
    pub fn terms_of_degree(&self, degree: usize) -> impl Iterator<Item = (MultiIndex, T)> + '_ {
        let range = if degree <= self.order() {
            self.layout.degree_range(degree)
        } else {
            0..0
        };
        range.map(move |p| (self.layout.indices[p], self.coeffs[p]))
    }

    /// `Σ_{|β|=s} c_β z^β`, i.e. `(1/s!) d^s/dt^s f(x0 + t z)` at `t = 0`.
    pub fn homogeneous_part(&self, degree: usize, direction: &[T]) -> T {
        self.terms_of_degree(degree)
            .map(|(idx, c)| {
                let mut m = c;
                for (v, &z) in direction.iter().enumerate().take(self.dims()) {
                    m *= z.powi(idx.exponent(v) as i32);
                }
                m
            })
            .sum()
    }

    /// Same polynomial evaluated at a complex direction `z = zr + i zi`; returns `(re, im)`.
    pub fn homogeneous_part_complex(&self, degree: usize, zr: &[T], zi: &[T]) -> (T, T) {
        let mut re = T::zero();
        let mut im = T::zero();
        for (idx, c) in self.terms_of_degree(degree) {
            let (mut pr, mut pi) = (c, T::zero());
            for v in 0..self.dims() {
                for _ in 0..idx.exponent(v) {
                    let nr = pr * zr[v] - pi * zi[v];
                    let ni = pr * zi[v] + pi * zr[v];
                    pr = nr;
                    pi = ni;
                }
            }
            re += pr;
            im += pi;
        }
        (re, im)
    }

    /// `∂f/∂x_var` as a jet one order lower.
    pub fn derivative(&self, var: usize) -> Result<Self, JetError> {
        if var >= self.dims() {
            return Err(JetError::DimensionMismatch {
                expected: self.dims(),
                found: var + 1,
            });
        }
        if self.order() == 0 {
            return Err(JetError::OrderOverflow {
                requested: 1,
                available: 0,
            });
        }
        let target = layout::layout(self.dims(), self.order() - 1)?;
        let mut coeffs = vec![T::zero(); target.len()];
        for (p, idx) in self.layout.indices.iter().enumerate() {
            let e = idx.exponent(var);
            if e == 0 {
                continue;
            }
            let mut exps = idx.exponents();
            exps[var] -= 1;
            let lower = MultiIndex::new(&exps).expect("valid lowered index");
            if let Some(q) = target.position(&lower) {
                coeffs[q] += self.coeffs[p] * T::from_usize_lossy(e);
            }
        }
        Ok(Self {
            layout: target,
            coeffs,
        })
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Result<Self, JetError> {
        if order > self.order() {
            return Err(JetError::OrderOverflow {
                requested: order,
                available: self.order(),
            });
        }
        let target = layout::layout(self.dims(), order)?;
        let coeffs = self.coeffs[..target.len()].to_vec();
        Ok(Self {
            layout: target,
            coeffs,
        })
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        std::ptr::eq(self.layout, other.layout)
    }

    fn check_same(&self, other: &Self) -> Result<(), JetError> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(JetError::LayoutMismatch(
                self.dims(),
                self.order(),
                other.dims(),
                other.order(),
            ))
        }
    }

    fn assert_same(&self, other: &Self) {
        assert!(
            self.same_shape(other),
            "jet shape mismatch: ({}, {}) vs ({}, {})",
            self.dims(),
            self.order(),
            other.dims(),
            other.order()
        );
    }

    /// Composes a univariate series `Σ c_k t^k` about `self.value()` with `self`.
    ///
    /// `series[k]` must be the k-th Taylor coefficient of the outer function at
    /// the constant term; extra entries past the jet order are ignored.
    pub fn compose_series(&self, series: &[T]) -> Self {
        let k = self.order().min(series.len().saturating_sub(1));
        let mut delta = self.clone();
        delta.coeffs[0] = T::zero();
        let mut out = self.constant_like(series[k]);
        for c in series[..k].iter().rev() {
            out = &out * &delta;
            out.coeffs[0] += *c;
        }
        out
    }

    /// Treats `self` as the Taylor polynomial of `g` about `inputs[..].value()`
    /// and returns the jet of `g(inputs)`.
    ///
    /// `self.dims()` must equal `inputs.len()`; the result has the shape of the
    /// inputs, which may have a different variable count than `self`.
    pub fn compose_multivariate(&self, inputs: &[Jet<T>]) -> Result<Jet<T>, JetError> {
        if inputs.len() != self.dims() {
            return Err(JetError::DimensionMismatch {
                expected: self.dims(),
                found: inputs.len(),
            });
        }
        let first = &inputs[0];
        for j in inputs {
            first.check_same(j)?;
        }
        if first.order() > self.order() {
            return Err(JetError::OrderOverflow {
                requested: first.order(),
                available: self.order(),
            });
        }
        let top = first.order();
        // powers[v][p] = δ_v^p
        let powers: Vec<Vec<Jet<T>>> = inputs
            .iter()
            .map(|j| {
                let mut d = j.clone();
                d.coeffs[0] = T::zero();
                let mut pw = vec![j.constant_like(T::one())];
                for p in 1..=top {
                    let next = &pw[p - 1] * &d;
                    pw.push(next);
                }
                pw
            })
            .collect();
        let mut out = first.zero_like();
        for (p, idx) in self.layout.indices.iter().enumerate() {
            if idx.order() > top || self.coeffs[p] == T::zero() {
                continue;
            }
            let mut term: Option<Jet<T>> = None;
            for (v, pw) in powers.iter().enumerate() {
                let e = idx.exponent(v);
                if e == 0 {
                    continue;
                }
                term = Some(match term {
                    None => pw[e].clone(),
                    Some(t) => &t * &pw[e],
                });
            }
            match term {
                None => out.coeffs[0] += self.coeffs[p],
                Some(t) => out.axpy(self.coeffs[p], &t),
            }
        }
        Ok(out)
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: T, x: &Self) {
        self.assert_same(x);
        for (s, &v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += a * v;
        }
    }

    pub fn scale(&self, a: T) -> Self {
        Self {
            layout: self.layout,
            coeffs: self.coeffs.iter().map(|&c| c * a).collect(),
        }
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        let x0 = self.value();
        if x0 == T::zero() {
            return Err(JetError::ZeroDivisor);
        }
        // 1/(x0 + t) = Σ (-1)^k t^k / x0^{k+1}
        let n = self.order() + 1;
        let mut s = Vec::with_capacity(n);
        let inv = x0.recip();
        let mut term = inv;
        for _ in 0..n {
            s.push(term);
            term = -term * inv;
        }
        Ok(self.compose_series(&s))
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self, JetError> {
        self.check_same(rhs)?;
        Ok(self * &rhs.recip()?)
    }

    pub fn exp(&self) -> Self {
        self.compose_series(&series::exp_at(self.value(), self.order() + 1))
    }

    pub fn sin(&self) -> Self {
        self.compose_series(&series::sin_cos_at(self.value(), self.order() + 1).0)
    }

    pub fn cos(&self) -> Self {
        self.compose_series(&series::sin_cos_at(self.value(), self.order() + 1).1)
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let (s, c) = series::sin_cos_at(self.value(), self.order() + 1);
        (self.compose_series(&s), self.compose_series(&c))
    }

    pub fn sinh(&self) -> Self {
        self.compose_series(&series::sinh_cosh_at(self.value(), self.order() + 1).0)
    }

    pub fn cosh(&self) -> Self {
        self.compose_series(&series::sinh_cosh_at(self.value(), self.order() + 1).1)
    }

    pub fn ln(&self) -> Result<Self, JetError> {
        let x0 = self.value();
        if !(x0 > T::zero()) {
            return Err(JetError::Domain {
                function: "log",
                value: x0.to_f64_lossy(),
            });
        }
        Ok(self.compose_series(&series::ln_at(x0, self.order() + 1)))
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        let x0 = self.value();
        if !(x0 > T::zero()) && !(x0 == T::zero() && self.order() == 0) {
            return Err(JetError::Domain {
                function: "sqrt",
                value: x0.to_f64_lossy(),
            });
        }
        let mut s = series::powf_at(x0, T::lit(0.5), self.order() + 1);
        s[0] = x0.sqrt();
        Ok(self.compose_series(&s))
    }

    pub fn powf(&self, p: T) -> Result<Self, JetError> {
        let x0 = self.value();
        if !(x0 > T::zero()) {
            return Err(JetError::Domain {
                function: "powf",
                value: x0.to_f64_lossy(),
            });
        }
        Ok(self.compose_series(&series::powf_at(x0, p, self.order() + 1)))
    }

    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        let x0 = self.value();
        if n < 0 && x0 == T::zero() {
            return Err(JetError::Domain {
                function: "powi",
                value: 0.0,
            });
        }
        Ok(self.compose_series(&series::powi_at(x0, n, self.order() + 1)))
    }

    pub fn atan(&self) -> Self {
        self.compose_series(&series::atan_at(self.value(), self.order() + 1))
    }

    /// `acosh(x) = ln(x + sqrt(x² - 1))`, defined for `x > 1`.
    pub fn acosh(&self) -> Result<Self, JetError> {
        if !(self.value() > T::one()) {
            return Err(JetError::Domain {
                function: "acosh",
                value: self.value().to_f64_lossy(),
            });
        }
        let inner = (self * self - T::one()).sqrt()?;
        (self + &inner).ln()
    }
}

impl<T: Scalar> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("dims", &self.dims())
            .field("order", &self.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<T: Scalar> PartialEq for Jet<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_shape(other) && self.coeffs == other.coeffs
    }
}

impl<T: Scalar> Add<&Jet<T>> for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: &Jet<T>) -> Jet<T> {
        self.assert_same(rhs);
        Jet {
            layout: self.layout,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Scalar> Sub<&Jet<T>> for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: &Jet<T>) -> Jet<T> {
        self.assert_same(rhs);
        Jet {
            layout: self.layout,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Scalar> Mul<&Jet<T>> for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: &Jet<T>) -> Jet<T> {
        self.assert_same(rhs);
        let mut coeffs = vec![T::zero(); self.coeffs.len()];
        for &(i, j, k) in &self.layout.products {
            coeffs[k as usize] += self.coeffs[i as usize] * rhs.coeffs[j as usize];
        }
        Jet {
            layout: self.layout,
            coeffs,
        }
    }
}

impl<T: Scalar> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet {
            layout: self.layout,
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr<Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Scalar> $tr<&Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: &Jet<T>) -> Jet<T> {
                (&self).$m(rhs)
            }
        }
        impl<T: Scalar> $tr<Jet<T>> for &Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Scalar> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        -&self
    }
}

impl<T: Scalar> AddAssign<&Jet<T>> for Jet<T> {
    fn add_assign(&mut self, rhs: &Jet<T>) {
        self.assert_same(rhs);
        for (a, &b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl<T: Scalar> SubAssign<&Jet<T>> for Jet<T> {
    fn sub_assign(&mut self, rhs: &Jet<T>) {
        self.assert_same(rhs);
        for (a, &b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl<T: Scalar> MulAssign<T> for Jet<T> {
    fn mul_assign(&mut self, rhs: T) {
        for a in self.coeffs.iter_mut() {
            *a *= rhs;
        }
    }
}

impl<T: Scalar> Add<T> for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: T) -> Jet<T> {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}

impl<T: Scalar> Add<T> for Jet<T> {
    type Output = Jet<T>;
    fn add(mut self, rhs: T) -> Jet<T> {
        self.coeffs[0] += rhs;
        self
    }
}

impl<T: Scalar> Sub<T> for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: T) -> Jet<T> {
        self + (-rhs)
    }
}

impl<T: Scalar> Sub<T> for Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: T) -> Jet<T> {
        self + (-rhs)
    }
}

impl<T: Scalar> Mul<T> for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: T) -> Jet<T> {
        self.scale(rhs)
    }
}

impl<T: Scalar> Mul<T> for Jet<T> {
    type Output = Jet<T>;
    fn mul(mut self, rhs: T) -> Jet<T> {
        self *= rhs;
        self
    }
}

/// Sum of jets of equal shape; `None` for an empty slice.
pub fn sum<T: Scalar>(jets: &[Jet<T>]) -> Option<Jet<T>> {
    let mut it = jets.iter();
    let mut acc = it.next()?.clone();
    for j in it {
        acc += j;
    }
    Some(acc)
}

/// `Σ a_i b_i` over paired jets.
pub fn dot<T: Scalar>(a: &[Jet<T>], b: &[Jet<T>]) -> Option<Jet<T>> {
    let mut acc: Option<Jet<T>> = None;
    for (x, y) in a.iter().zip(b) {
        let p = x * y;
        acc = Some(match acc {
            None => p,
            Some(s) => s + p,
        });
    }
    acc
}
