use std::ops::{Add, Mul, Neg, Sub};

use super::{Jet, JetError};
use crate::Scalar;

/// Jet with complex coefficients, stored as a pair of real coefficient tables.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexJet<T: Scalar> {
    pub re: Jet<T>,
    pub im: Jet<T>,
}

impl<T: Scalar> ComplexJet<T> {
    pub fn new(re: Jet<T>, im: Jet<T>) -> Result<Self, JetError> {
        if !re.same_shape(&im) {
            return Err(JetError::LayoutMismatch(
                re.dims(),
                re.order(),
                im.dims(),
                im.order(),
            ));
        }
        Ok(Self { re, im })
    }

    pub fn from_real(re: Jet<T>) -> Self {
        let im = re.zero_like();
        Self { re, im }
    }

    /// `z = u + i v` from two real jets.
    pub fn from_parts(u: &Jet<T>, v: &Jet<T>) -> Result<Self, JetError> {
        Self::new(u.clone(), v.clone())
    }

    pub fn constant_like(&self, re: T, im: T) -> Self {
        Self {
            re: self.re.constant_like(re),
            im: self.re.constant_like(im),
        }
    }

    pub fn value(&self) -> (T, T) {
        (self.re.value(), self.im.value())
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// Multiplication by the complex scalar `a + i b`.
    pub fn scale(&self, a: T, b: T) -> Self {
        Self {
            re: &self.re.scale(a) - &self.im.scale(b),
            im: &self.re.scale(b) + &self.im.scale(a),
        }
    }

    /// Adds the complex scalar `a + i b` to the constant term.
    pub fn shift(&self, a: T, b: T) -> Self {
        Self {
            re: &self.re + a,
            im: &self.im + b,
        }
    }

    /// Horner evaluation of `Σ c_k (self - base)^k` with complex coefficients `(re, im)`.
    pub fn eval_polynomial(&self, base: (T, T), coeffs: &[(T, T)]) -> Self {
        let delta = self.shift(-base.0, -base.1);
        let mut out = match coeffs.last() {
            Some(&(a, b)) => self.constant_like(a, b),
            None => return self.constant_like(T::zero(), T::zero()),
        };
        for &(a, b) in coeffs.iter().rev().skip(1) {
            out = (&out * &delta).shift(a, b);
        }
        out
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Self {
            re: &m * &c,
            im: &m * &s,
        }
    }

    /// `|z|²` as a real jet.
    pub fn norm_sqr(&self) -> Jet<T> {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }
}

impl<T: Scalar> Add<&ComplexJet<T>> for &ComplexJet<T> {
    type Output = ComplexJet<T>;
    fn add(self, rhs: &ComplexJet<T>) -> ComplexJet<T> {
        ComplexJet {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl<T: Scalar> Sub<&ComplexJet<T>> for &ComplexJet<T> {
    type Output = ComplexJet<T>;
    fn sub(self, rhs: &ComplexJet<T>) -> ComplexJet<T> {
        ComplexJet {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl<T: Scalar> Mul<&ComplexJet<T>> for &ComplexJet<T> {
    type Output = ComplexJet<T>;
    fn mul(self, rhs: &ComplexJet<T>) -> ComplexJet<T> {
        ComplexJet {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl<T: Scalar> Neg for &ComplexJet<T> {
    type Output = ComplexJet<T>;
    fn neg(self) -> ComplexJet<T> {
        ComplexJet {
            re: -&self.re,
            im: -&self.im,
        }
    }
}
