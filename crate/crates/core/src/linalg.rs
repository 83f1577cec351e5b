//! Exact linear algebra over the rationals and over the [`DiffExpr`] field.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::DiffExpr;

pub type QVector = Vec<BigRational>;

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        QMatrix::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| BigRational::from_integer(x.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Appends a row; a matrix with zero columns adopts the row's width.
    pub fn push_row(&mut self, row: Vec<BigRational>) {
        if self.rows == 0 && self.cols == 0 {
            self.cols = row.len();
        }
        assert_eq!(row.len(), self.cols, "row width");
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> QVector {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .fold(BigRational::zero(), |acc, x| acc + x)
            })
            .collect()
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    /// Integer row echelon form by fraction-free (Bareiss) elimination.
    /// Pivots are the first nonzero entry in column order. Returns the
    /// echelon rows and pivot columns.
    fn bareiss(&self) -> (Vec<Vec<BigInt>>, Vec<usize>) {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == m.len() {
                break;
            }
            let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let piv = m[r][c].clone();
            for i in r + 1..m.len() {
                let a = m[i][c].clone();
                for j in c..self.cols {
                    let v = (&piv * &m[i][j] - &a * &m[r][j]) / &prev;
                    m[i][j] = v;
                }
                // Columns left of c are already zero below the pivot row.
            }
            prev = piv;
            pivots.push(c);
            r += 1;
        }
        m.truncate(r);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.bareiss().1.len()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn determinant(&self) -> BigRational {
        assert_eq!(self.rows, self.cols, "square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return BigRational::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            for i in c + 1..n {
                let a = m.get(i, c) / &piv;
                if a.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j) - &a * m.get(c, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn invert(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols, "square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMatrix::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&i| !a.get(i, c).is_zero())?;
            if p != c {
                for j in 0..n {
                    a.data.swap(c * n + j, p * n + j);
                    inv.data.swap(c * n + j, p * n + j);
                }
            }
            let piv = a.get(c, c).clone();
            for j in 0..n {
                let v = a.get(c, j) / &piv;
                a.set(c, j, v);
                let w = inv.get(c, j) / &piv;
                inv.set(c, j, w);
            }
            for i in 0..n {
                if i == c || a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                for j in 0..n {
                    let v = a.get(i, j) - &f * a.get(c, j);
                    a.set(i, j, v);
                    let w = inv.get(i, j) - &f * inv.get(c, j);
                    inv.set(i, j, w);
                }
            }
        }
        Some(inv)
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<QVector> {
        let (ech, pivots) = self.bareiss();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![BigRational::zero(); self.cols];
            v[fc] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate().rev() {
                let mut s = BigRational::zero();
                for j in pc + 1..self.cols {
                    if !ech[r][j].is_zero() && !v[j].is_zero() {
                        s += BigRational::from_integer(ech[r][j].clone()) * &v[j];
                    }
                }
                v[pc] = -s / BigRational::from_integer(ech[r][pc].clone());
            }
            basis.push(v);
        }
        basis
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dense matrix of [`DiffExpr`] entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExprMatrix {
    rows: usize,
    cols: usize,
    data: Vec<DiffExpr>,
}

impl ExprMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExprMatrix {
            rows,
            cols,
            data: vec![DiffExpr::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExprMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, DiffExpr::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<DiffExpr>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ExprMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> DiffExpr) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExprMatrix { rows, cols, data }
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

    pub fn get(&self, i: usize, j: usize) -> &DiffExpr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: DiffExpr) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[DiffExpr] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<DiffExpr> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(DiffExpr::is_zero)
    }

    pub fn transpose(&self) -> ExprMatrix {
        ExprMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&DiffExpr) -> DiffExpr) -> ExprMatrix {
        ExprMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &ExprMatrix) -> ExprMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ExprMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ExprMatrix) -> ExprMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ExprMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &ExprMatrix) -> ExprMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = ExprMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[DiffExpr]) -> Vec<DiffExpr> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = DiffExpr::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form, first nonzero pivot in column order.
    /// Returns the reduced matrix, pivot columns and the determinant of the
    /// square part when the matrix is square.
    fn rref(&self) -> (ExprMatrix, Vec<usize>, DiffExpr) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut det = DiffExpr::one();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                det = DiffExpr::zero();
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
                det = -det;
            }
            let piv = m.get(r, c).clone();
            det = &det * &piv;
            let inv = piv.recip().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let a = m.get(i, c).clone();
                if a.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let rj = m.get(r, j);
                    if rj.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &(&a * rj);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        if pivots.len() < m.rows.min(m.cols) {
            det = DiffExpr::zero();
        }
        (m, pivots, det)
    }

    pub fn det(&self) -> Result<DiffExpr> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(self.rref().2)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Inverse by Gauss-Jordan elimination on `[M | I]`.
    pub fn invert(&self) -> Result<ExprMatrix> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "inverse of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let aug = ExprMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                DiffExpr::one()
            } else {
                DiffExpr::zero()
            }
        });
        let (red, pivots, _) = aug.rref();
        if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
            return Err(Error::Singular {
                det: "0".to_string(),
            });
        }
        Ok(ExprMatrix::from_fn(n, n, |i, j| red.get(i, n + j).clone()))
    }

    /// Solves `M x = b` for square invertible `M`.
    pub fn solve(&self, b: &[DiffExpr]) -> Result<Vec<DiffExpr>> {
        Ok(self.invert()?.mul_vec(b))
    }

    /// Null-space basis over the fraction field, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<DiffExpr>> {
        let (red, pivots, _) = self.rref();
        let mut basis = Vec::new();
        for fc in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![DiffExpr::zero(); self.cols];
            v[fc] = DiffExpr::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -red.get(r, fc);
            }
            basis.push(v);
        }
        basis
    }
}
