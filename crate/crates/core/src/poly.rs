//! Bivariate polynomials in the island frequencies `(X, Y)`.

use alloc::vec::Vec;
use core::ops::{Add, Mul};

use crate::scalar::Scalar;

/// Dense bivariate polynomial `sum c[i][j] X^i Y^j` with `i + j <= degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPoly<T> {
    degree: usize,
    // (degree + 1)^2 entries, row i holds the X^i coefficients.
    coeffs: Vec<T>,
}

impl<T: Scalar> BiPoly<T> {
    pub fn zero() -> Self {
        Self::with_degree(0)
    }

    fn with_degree(degree: usize) -> Self {
        Self {
            degree,
            coeffs: alloc::vec![T::zero(); (degree + 1) * (degree + 1)],
        }
    }

    pub fn constant(c: T) -> Self {
        let mut p = Self::with_degree(0);
        p.coeffs[0] = c;
        p
    }

    /// `c0 + cx X + cy Y`.
    pub fn affine(c0: T, cx: T, cy: T) -> Self {
        let mut p = Self::with_degree(1);
        p.set(0, 0, c0);
        p.set(1, 0, cx);
        p.set(0, 1, cy);
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `X^i Y^j` (zero outside the stored range).
    pub fn coeff(&self, i: usize, j: usize) -> T {
        if i > self.degree || j > self.degree {
            return T::zero();
        }
        self.coeffs[i * (self.degree + 1) + j].clone()
    }

    fn set(&mut self, i: usize, j: usize, v: T) {
        let d = self.degree + 1;
        self.coeffs[i * d + j] = v;
    }

    /// Largest total degree carrying a nonzero coefficient.
    pub fn effective_degree(&self) -> usize {
        let mut best = 0;
        for i in 0..=self.degree {
            for j in 0..=self.degree - i {
                if !self.coeff(i, j).is_zero() {
                    best = best.max(i + j);
                }
            }
        }
        best
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(T::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        let mut total = T::zero();
        let mut xp = T::one();
        for i in 0..=self.degree {
            let mut yp = T::one();
            for j in 0..=self.degree - i {
                let c = self.coeff(i, j);
                if !c.is_zero() {
                    total = total + c * xp.clone() * yp.clone();
                }
                yp = yp * y.clone();
            }
            xp = xp * x.clone();
        }
        total
    }

    /// Nonzero terms as `((i, j), coefficient)` in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        (0..=self.degree).flat_map(move |i| {
            (0..=self.degree - i).filter_map(move |j| {
                let c = self.coeff(i, j);
                (!c.is_zero()).then_some(((i, j), c))
            })
        })
    }
}

impl<T: Scalar> Add for &BiPoly<T> {
    type Output = BiPoly<T>;
    fn add(self, rhs: &BiPoly<T>) -> BiPoly<T> {
        let degree = self.degree.max(rhs.degree);
        let mut out = BiPoly::with_degree(degree);
        for i in 0..=degree {
            for j in 0..=degree - i {
                out.set(i, j, self.coeff(i, j) + rhs.coeff(i, j));
            }
        }
        out
    }
}

impl<T: Scalar> Mul for &BiPoly<T> {
    type Output = BiPoly<T>;
    fn mul(self, rhs: &BiPoly<T>) -> BiPoly<T> {
        let degree = self.degree + rhs.degree;
        let mut out = BiPoly::with_degree(degree);
        for ((i1, j1), a) in self.terms() {
            for ((i2, j2), b) in rhs.terms() {
                let prev = out.coeff(i1 + i2, j1 + j2);
                out.set(i1 + i2, j1 + j2, prev + a.clone() * b);
            }
        }
        out
    }
}
