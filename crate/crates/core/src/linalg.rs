//! Small dense complex linear algebra.
//!
//! The largest system solved here is 15×15, so everything is a direct
//! dense method on row-major storage.

use std::ops::{Add, Index, IndexMut, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Relative pivot threshold below which a matrix is declared singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexVector(pub Vec<C64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if let Some(bad) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::validation("matrix", format!("entry {bad} is not finite")));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix { data: self.data.iter().map(|z| z * s).collect(), ..*self }
    }

    /// `self + s·I`.
    pub fn shifted(&self, s: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += s;
        }
        m
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()
        }))
    }
}

impl std::ops::Deref for ComplexMatrix {
    type Target = [C64];
    fn deref(&self) -> &[C64] {
        &self.data
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shapes differ");
        ComplexMatrix {
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
            ..*self
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shapes differ");
        ComplexMatrix {
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
            ..*self
        }
    }
}

impl ComplexVector {
    pub fn zeros(n: usize) -> Self {
        ComplexVector(vec![C64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexVector(self.0.iter().map(|z| z * s).collect())
    }

    /// `self + s·other`, in place.
    pub fn axpy(&mut self, s: C64, other: &ComplexVector) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }
}

impl std::ops::Deref for ComplexVector {
    type Target = [C64];
    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl std::ops::DerefMut for ComplexVector {
    fn deref_mut(&mut self) -> &mut [C64] {
        &mut self.0
    }
}

impl From<Vec<C64>> for ComplexVector {
    fn from(v: Vec<C64>) -> Self {
        ComplexVector(v)
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.len(), rhs.len(), "vector lengths differ");
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.len(), rhs.len(), "vector lengths differ");
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

pub fn matvec(a: &ComplexMatrix, x: &ComplexVector) -> Result<ComplexVector> {
    if a.cols != x.len() {
        return Err(Error::DimensionMismatch { expected: a.cols, found: x.len() });
    }
    Ok(ComplexVector(
        (0..a.rows)
            .map(|i| a.row(i).iter().zip(x.iter()).map(|(aij, xj)| aij * xj).sum())
            .collect(),
    ))
}

/// `y += a·x` without allocating.
pub(crate) fn matvec_acc(a: &ComplexMatrix, x: &[C64], scale: C64, y: &mut [C64]) {
    for (i, yi) in y.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (aij, xj) in a.row(i).iter().zip(x) {
            acc += aij * xj;
        }
        *yi += scale * acc;
    }
}

/// LU factorization with partial pivoting, `P·A = L·U` packed in place.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows, found: a.cols });
        }
        let n = a.rows;
        let threshold = PIVOT_TOLERANCE * a.max_abs();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmag <= threshold || pmag == 0.0 {
                return Err(Error::Singular { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != C64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = lu[k * n + j];
                        lu[i * n + j] -= f * u;
                    }
                }
            }
        }
        Ok(Lu { n, lu, perm })
    }

    pub fn solve(&self, b: &ComplexVector) -> Result<ComplexVector> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        Ok(ComplexVector(x))
    }
}

/// Solve `A·x = b` by LU with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexVector) -> Result<ComplexVector> {
    if a.rows != b.len() {
        return Err(Error::DimensionMismatch { expected: a.rows, found: b.len() });
    }
    Lu::factor(a)?.solve(b)
}

/// Max-norm of `A·x − b`.
pub fn residual(a: &ComplexMatrix, x: &ComplexVector, b: &ComplexVector) -> Result<f64> {
    let ax = matvec(a, x)?;
    Ok((&ax - b).max_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_system(rng: &mut ChaCha8Rng, n: usize) -> (ComplexMatrix, ComplexVector) {
        // Diagonally weighted so the conditioning stays modest.
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if i == j { z + c(n as f64, 0.0) } else { z }
        });
        let b = ComplexVector((0..n).map(|_| c(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0))).collect());
        (a, b)
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = ComplexVector(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, -1.0)]);
        assert_eq!(solve(&ComplexMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn diagonal_solve() {
        let a = ComplexMatrix::from_row_major(2, 2, vec![c(0.0, 2.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let b = ComplexVector(vec![c(0.0, 2.0), c(3.0, 0.0)]);
        let x = solve(&a, &b).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((x[1] - c(-3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn random_15x15_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (a, b) = random_system(&mut rng, 15);
            let x = solve(&a, &b).unwrap();
            assert!(residual(&a, &x, &b).unwrap() <= 1e-10 * (1.0 + b.max_norm()));
        }
    }

    #[test]
    fn needs_pivoting() {
        let a = ComplexMatrix::from_row_major(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let b = ComplexVector(vec![c(2.0, 0.0), c(5.0, 0.0)]);
        assert_eq!(solve(&a, &b).unwrap(), ComplexVector(vec![c(5.0, 0.0), c(2.0, 0.0)]));
    }

    #[test]
    fn singular_matrix_reports_pivot() {
        let a = ComplexMatrix::from_row_major(3, 3, vec![
            c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0),
            c(2.0, 0.0), c(4.0, 0.0), c(6.0, 0.0),
            c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
        ]).unwrap();
        let err = solve(&a, &ComplexVector::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::Singular { pivot: 1 }), "{err:?}");
        assert!(matches!(solve(&ComplexMatrix::zeros(2, 2), &ComplexVector::zeros(2)), Err(Error::Singular { pivot: 0 })));
    }

    #[test]
    fn dimension_errors() {
        assert!(matches!(solve(&ComplexMatrix::zeros(2, 3), &ComplexVector::zeros(2)), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(solve(&ComplexMatrix::identity(2), &ComplexVector::zeros(3)), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(matvec(&ComplexMatrix::identity(2), &ComplexVector::zeros(3)), Err(Error::DimensionMismatch { .. })));
        assert!(ComplexMatrix::from_row_major(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::from_row_major(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn matvec_examples() {
        let x = ComplexVector(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(matvec(&ComplexMatrix::identity(2), &x).unwrap(), x);
        assert_eq!(matvec(&ComplexMatrix::zeros(2, 2), &x).unwrap(), ComplexVector::zeros(2));
        let ones = ComplexMatrix::from_fn(2, 2, |_, _| c(1.0, 0.0));
        assert_eq!(matvec(&ones, &x).unwrap(), ComplexVector(vec![c(1.0, 1.0), c(1.0, 1.0)]));
    }

    proptest! {
        #[test]
        fn solve_is_linear(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b1) = random_system(&mut rng, 15);
            let (_, b2) = random_system(&mut rng, 15);
            let lhs = solve(&a, &(&b1 + &b2)).unwrap();
            let rhs = &solve(&a, &b1).unwrap() + &solve(&a, &b2).unwrap();
            prop_assert!((&lhs - &rhs).max_norm() <= 1e-9);
            // residual property for every successful solve
            let x = solve(&a, &b1).unwrap();
            prop_assert!(residual(&a, &x, &b1).unwrap() <= 1e-10 * (1.0 + b1.max_norm()));
        }
    }
}
