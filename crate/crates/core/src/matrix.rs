//! Small dense row-major matrices for residue and Jacobian data.

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }
}

pub type CMatrix = Matrix<Complex64>;

/// k×n matrix of residues (coefficients of 1/w_β per component).
pub type ResidueMatrix = CMatrix;

/// k×n matrix of first-order analytic coefficients at the origin.
pub type JacobianMatrix = CMatrix;

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, Complex64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    /// Tr(A*A), the squared Frobenius norm.
    pub fn gram_trace(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| *self.get(i, i)).sum()
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        Self::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).map(|j| self.get(r, j) * rhs.get(j, c)).sum()
        })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        Self::from_fn(self.rows, self.cols, |r, c| self.get(r, c) - other.get(r, c))
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        Self::from_fn(self.rows, self.cols, |r, c| self.get(r, c) + other.get(r, c))
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    /// Returns `None` when a pivot falls below `eps`.
    pub fn inverse(&self, eps: f64) -> Option<CMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| a.get(i, col).norm().total_cmp(&a.get(j, col).norm()))?;
            if a.get(pivot, col).norm() < eps {
                return None;
            }
            for c in 0..n {
                a.data.swap(col * n + c, pivot * n + c);
                inv.data.swap(col * n + c, pivot * n + c);
            }
            let p = *a.get(col, col);
            for c in 0..n {
                a.set(col, c, a.get(col, c) / p);
                inv.set(col, c, inv.get(col, c) / p);
            }
            for r in 0..n {
                if r != col {
                    let factor = *a.get(r, col);
                    if factor.norm() == 0.0 {
                        continue;
                    }
                    for c in 0..n {
                        a.set(r, c, a.get(r, c) - factor * a.get(col, c));
                        inv.set(r, c, inv.get(r, c) - factor * inv.get(col, c));
                    }
                }
            }
        }
        Some(inv)
    }

    /// Determinant by LU elimination.
    pub fn determinant(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a.get(i, col).norm().total_cmp(&a.get(j, col).norm()))
                .unwrap_or(col);
            if a.get(pivot, col).norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for c in 0..n {
                    a.data.swap(col * n + c, pivot * n + c);
                }
                det = -det;
            }
            let p = *a.get(col, col);
            det *= p;
            for r in col + 1..n {
                let factor = a.get(r, col) / p;
                for c in col..n {
                    a.set(r, c, a.get(r, c) - factor * a.get(col, c));
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_roundtrip() {
        let m = CMatrix::from_rows(vec![vec![c(2.0, 0.0), c(1.0, 1.0)], vec![c(0.0, -1.0), c(3.0, 0.0)]]);
        let inv = m.inverse(1e-12).unwrap();
        assert!(m.matmul(&inv).max_abs_diff(&CMatrix::identity(2)) < 1e-14);
        let det = m.determinant();
        assert!((det - (c(6.0, 0.0) - c(1.0, 1.0) * c(0.0, -1.0))).norm() < 1e-14);
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = CMatrix::from_rows(vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]]);
        assert!(m.inverse(1e-9).is_none());
    }

    #[test]
    fn gram_trace_is_frobenius() {
        let m = CMatrix::from_rows(vec![vec![c(1.0, 2.0), c(0.0, 0.0), c(3.0, 0.0)]]);
        assert_eq!(m.gram_trace(), 14.0);
    }
}
