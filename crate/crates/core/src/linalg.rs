//! Small dense linear solves.
//!
//! The moment systems are solved one degree block at a time, so the largest
//! system seen in practice has a dozen unknowns. Gaussian elimination with
//! partial pivoting is all that is needed, and it has to run over rationals
//! as well as floats.

use alloc::vec::Vec;

use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: alloc::vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }
}

impl<T> core::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> core::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Solves `a x = b`; `None` when a pivot vanishes.
pub fn solve<T: Scalar>(mut a: DenseMatrix<T>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = a.n;
    assert_eq!(b.len(), n);
    let scale = a
        .data
        .iter()
        .map(Scalar::magnitude)
        .fold(0.0_f64, f64::max);
    if scale == 0.0 && n > 0 {
        return None;
    }

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                a[(i, col)]
                    .magnitude()
                    .partial_cmp(&a[(j, col)].magnitude())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if a[(pivot_row, col)].is_negligible(scale) {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.data.swap(pivot_row * n + k, col * n + k);
            }
            b.swap(pivot_row, col);
        }
        let pivot = a[(col, col)].clone();
        for row in col + 1..n {
            if a[(row, col)].is_zero() {
                continue;
            }
            let factor = a[(row, col)].clone() / pivot.clone();
            for k in col..n {
                let delta = factor.clone() * a[(col, k)].clone();
                a[(row, k)] = a[(row, k)].clone() - delta;
            }
            b[row] = b[row].clone() - factor * b[col].clone();
        }
    }

    let mut x = alloc::vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - a[(row, k)].clone() * x[k].clone();
        }
        x[row] = acc / a[(row, row)].clone();
    }
    Some(x)
}
