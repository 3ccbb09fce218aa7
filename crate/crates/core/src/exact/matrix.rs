//! Dense matrices over an exact field.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::gauss::GaussRational;
use super::rational::{Field, Rational};
use crate::error::{HmsError, Result};

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RatMatrix = Matrix<Rational>;
pub type GaussMatrix = Matrix<GaussRational>;

/// Row-reduced echelon form plus the pivot column of each nonzero row.
#[derive(Clone)]
pub struct Echelon<T> {
    pub matrix: Matrix<T>,
    pub pivots: Vec<usize>,
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(HmsError::Dimension("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(HmsError::Dimension("ragged matrix columns".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| cols[j][i].clone()))
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

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let v = self.get(r, c);
                    if r == c {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_skew(&self) -> bool {
        self.is_square() && *self == self.transpose().neg()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(HmsError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = r * other.cols + c;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    /// Product for operands whose shapes are known to agree.
    pub fn dot(&self, other: &Self) -> Self {
        self.mul(other).expect("matrix shapes agree")
    }

    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(HmsError::Dimension(format!(
                "vector of length {} for {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(HmsError::Dimension(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, T::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, T::sub)
    }

    pub fn neg(&self) -> Self {
        self.map(T::neg)
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.mul(s))
    }

    /// Copy of the block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self.get(r0 + r, c0 + c).clone())
    }

    /// `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(HmsError::Dimension("incompatible block shapes".into()));
        }
        let (top, left) = (a.rows, a.cols);
        Ok(Self::from_fn(a.rows + c.rows, a.cols + b.cols, |r, col| {
            match (r < top, col < left) {
                (true, true) => a.get(r, col).clone(),
                (true, false) => b.get(r, col - left).clone(),
                (false, true) => c.get(r - top, col).clone(),
                (false, false) => d.get(r - top, col - left).clone(),
            }
        }))
    }

    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let z1 = Self::zeros(a.rows, b.cols);
        let z2 = Self::zeros(b.rows, a.cols);
        Self::from_blocks(a, &z1, &z2, b).expect("block_diag shapes")
    }

    /// Reduced row echelon form. Row operations skip zero entries so block
    /// structure in sparse inputs is preserved.
    pub fn echelon(&self) -> Echelon<T> {
        let mut rows: Vec<Vec<T>> = self.to_rows();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == rows.len() {
                break;
            }
            let Some(p) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(next, p);
            let inv = rows[next][col].inv();
            if !inv.is_one() {
                for x in rows[next].iter_mut() {
                    if !x.is_zero() {
                        *x = x.mul(&inv);
                    }
                }
            }
            let support: Vec<usize> =
                (col..self.cols).filter(|&c| !rows[next][c].is_zero()).collect();
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == next || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for &c in &support {
                    row[c].sub_mul_assign(&factor, &pivot_row[c]);
                }
            }
            pivots.push(col);
            next += 1;
        }
        let data = rows.into_iter().flatten().collect();
        Echelon { matrix: Matrix { rows: self.rows, cols: self.cols, data }, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of the right null space, one vector per free column, with a 1 in
    /// that column and 0 in every other free column.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let ech = self.echelon();
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &ech.pivots {
                v[p] = true;
            }
            v
        };
        (0..self.cols)
            .filter(|&c| !pivot_set[c])
            .map(|free| {
                let mut v = vec![T::zero(); self.cols];
                v[free] = T::one();
                for (k, &p) in ech.pivots.iter().enumerate() {
                    let e = ech.matrix.get(k, free);
                    if !e.is_zero() {
                        v[p] = e.neg();
                    }
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Self::from_blocks(self, &Self::identity(n), &Self::zeros(0, n), &Self::zeros(0, n))
            .expect("augment");
        let ech = aug.echelon();
        if ech.pivots.len() < n || ech.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(ech.matrix.block(0, n, n, n))
    }

    pub fn determinant(&self) -> Result<T> {
        if !self.is_square() {
            return Err(HmsError::Dimension("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let mut rows = self.to_rows();
        let mut det = T::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
                return Ok(T::zero());
            };
            if p != col {
                rows.swap(p, col);
                det = det.neg();
            }
            let pivot = rows[col][col].clone();
            det = det.mul(&pivot);
            let pivot_row = rows[col].clone();
            for row in rows.iter_mut().skip(col + 1) {
                if row[col].is_zero() {
                    continue;
                }
                let factor = row[col].div(&pivot);
                for c in col..n {
                    row[c].sub_mul_assign(&factor, &pivot_row[c]);
                }
            }
        }
        Ok(det)
    }

    /// One solution of `self · x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[T]) -> Result<Option<Vec<T>>> {
        if b.len() != self.rows {
            return Err(HmsError::Dimension("right-hand side length".into()));
        }
        let rhs = Self::from_fn(self.rows, 1, |r, _| b[r].clone());
        let aug = Self::from_blocks(self, &rhs, &Self::zeros(0, self.cols), &Self::zeros(0, 1))?;
        let ech = aug.echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![T::zero(); self.cols];
        for (k, &p) in ech.pivots.iter().enumerate() {
            x[p] = ech.matrix.get(k, self.cols).clone();
        }
        Ok(Some(x))
    }

    /// Solve `x · self = b` for a matrix `x` (right division).
    pub fn solve_left(&self, b: &Self) -> Result<Option<Self>> {
        let t = self.transpose();
        let mut cols = Vec::with_capacity(b.rows);
        for r in 0..b.rows {
            match t.solve(b.row(r))? {
                Some(x) => cols.push(x),
                None => return Ok(None),
            }
        }
        Ok(Some(Self::from_columns(&cols)?.transpose()))
    }

    /// Leading principal minors, from the 1×1 corner up.
    pub fn leading_minors(&self) -> Result<Vec<T>> {
        if !self.is_square() {
            return Err(HmsError::Dimension("minors of non-square matrix".into()));
        }
        (1..=self.rows).map(|k| self.block(0, 0, k, k).determinant()).collect()
    }

    /// Row space basis (nonzero rows of the echelon form).
    pub fn row_space(&self) -> Vec<Vec<T>> {
        let ech = self.echelon();
        (0..ech.pivots.len()).map(|r| ech.matrix.row(r).to_vec()).collect()
    }
}

impl RatMatrix {
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect();
        Matrix::from_rows(rows).expect("rectangular literal")
    }

    pub fn diag(values: &[Rational]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, c| if r == c { values[r].clone() } else { Rational::zero() })
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(Rational::is_integer)
    }

    /// Symmetric and all leading principal minors positive.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric()
            && self.leading_minors().map(|m| m.iter().all(Rational::is_positive)).unwrap_or(false)
    }

    pub fn to_gauss(&self) -> GaussMatrix {
        self.map(|x| GaussRational::real(x.clone()))
    }

    /// Integer entries, if every entry is an integer fitting in `i64`.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(Rational::to_i64).collect::<Option<Vec<_>>>())
            .collect()
    }

    /// Bilinear form value `uᵗ · self · v`.
    pub fn bilinear(&self, u: &[Rational], v: &[Rational]) -> Result<Rational> {
        let mv = self.apply(v)?;
        if u.len() != mv.len() {
            return Err(HmsError::Dimension("bilinear form argument".into()));
        }
        Ok(u.iter().zip(&mv).fold(Rational::zero(), |acc, (a, b)| acc.add(&a.mul(b))))
    }
}

impl<T: Field> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl<T: Field + Serialize> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de, T: Field + Deserialize<'de>> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<T>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(D::Error::custom)
    }
}
