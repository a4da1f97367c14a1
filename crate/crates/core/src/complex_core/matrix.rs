//! Dense complex matrices: LU determinant and inverse, complementary minors,
//! the cofactor coefficients C^{ab}_{ij}, and SVD-based numerical rank.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tol;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    sign: f64,
    /// a pivot was exactly zero
    singular: bool,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
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

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(ComplexMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
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

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|l| self[(i, l)] * other[(l, j)]).sum()
        }))
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix difference".into()));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Product of the row norms, an upper bound for `|det|`.
    pub fn hadamard_bound(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .product()
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn lu(&self) -> Lu {
        let n = self.rows;
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&a, &b| lu[(a, k)].norm().total_cmp(&lu[(b, k)].norm()))
                .unwrap();
            if lu[(p, k)].norm() == 0.0 || !lu[(p, k)].norm().is_finite() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(p * n + j, k * n + j);
                }
                perm.swap(p, k);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] -= f * t;
                }
            }
        }
        Lu {
            lu,
            perm,
            sign,
            singular,
        }
    }

    /// Determinant by LU with partial pivoting; the 0x0 determinant is 1.
    pub fn det(&self) -> Result<C64> {
        self.require_square()?;
        let f = self.lu();
        if f.singular {
            return Ok(C64::new(0.0, 0.0));
        }
        let mut d = C64::new(f.sign, 0.0);
        for k in 0..self.rows {
            d *= f.lu[(k, k)];
        }
        Ok(d)
    }

    /// Solves `self * x = b`.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        self.require_square()?;
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch("right-hand side length".into()));
        }
        let f = self.lu();
        if f.singular {
            return Err(Error::SingularMatrix { det_abs: 0.0 });
        }
        Ok(f.solve(b))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let f = self.lu();
        if f.singular {
            return Err(Error::SingularMatrix { det_abs: 0.0 });
        }
        let mut inv = Self::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
            e[j] = C64::new(1.0, 0.0);
            for (i, x) in f.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = x;
            }
        }
        Ok(inv)
    }

    /// Submatrix keeping the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Determinant of the submatrix with the given rows and columns deleted.
    pub fn minor_omitting(&self, rows: &[usize], cols: &[usize]) -> Result<C64> {
        for &i in rows {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange(format!("row {i} of {}", self.rows)));
            }
        }
        for &j in cols {
            if j >= self.cols {
                return Err(Error::IndexOutOfRange(format!("column {j} of {}", self.cols)));
            }
        }
        let keep_r: Vec<usize> = (0..self.rows).filter(|i| !rows.contains(i)).collect();
        let keep_c: Vec<usize> = (0..self.cols).filter(|j| !cols.contains(j)).collect();
        if keep_r.len() != keep_c.len() {
            return Err(Error::NonSquare {
                rows: keep_r.len(),
                cols: keep_c.len(),
            });
        }
        self.select(&keep_r, &keep_c).det()
    }
}

impl Lu {
    fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = b.len();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
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

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|c| format!("{c:.6}")).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn det(m: &ComplexMatrix) -> Result<C64> {
    m.det()
}

/// `|det|` small relative to the Hadamard bound.
pub fn is_numerically_singular(m: &ComplexMatrix, det: C64) -> bool {
    !(det.norm() > tol::SINGULAR_RTOL * m.hadamard_bound())
}

fn sign(x: isize) -> f64 {
    match x.cmp(&0) {
        std::cmp::Ordering::Less => -1.0,
        std::cmp::Ordering::Equal => 0.0,
        std::cmp::Ordering::Greater => 1.0,
    }
}

fn check_index(k: &ComplexMatrix, idx: &[usize]) -> Result<()> {
    match idx.iter().find(|&&i| i >= k.rows) {
        Some(i) => Err(Error::IndexOutOfRange(format!("index {i} for a {}x{} matrix", k.rows, k.cols))),
        None => Ok(()),
    }
}

/// E^{ij}_{ab}: determinant of K with rows i, j and columns a, b deleted.
/// Zero when the row pair or the column pair coincides.
pub fn complementary_minor(k: &ComplexMatrix, i: usize, j: usize, a: usize, b: usize) -> Result<C64> {
    k.require_square()?;
    check_index(k, &[i, j, a, b])?;
    if i == j || a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    k.minor_omitting(&[i, j], &[a, b])
}

/// C^{ab}_{ij} = (1/det K) (-1)^{i+j+a+b} sign(j-i) sign(b-a) E^{ij}_{ab}.
///
/// With A = K^{-1} this equals `A[a][i] A[b][j] - A[b][i] A[a][j]`.
pub fn cofactor_c(k: &ComplexMatrix, i: usize, j: usize, a: usize, b: usize) -> Result<C64> {
    k.require_square()?;
    check_index(k, &[i, j, a, b])?;
    if i == j || a == b {
        return Err(Error::IndexCoincidence(format!("i={i}, j={j}, a={a}, b={b}")));
    }
    let d = k.det()?;
    if is_numerically_singular(k, d) {
        return Err(Error::SingularMatrix { det_abs: d.norm() });
    }
    let parity = if (i + j + a + b) % 2 == 0 { 1.0 } else { -1.0 };
    let s = parity * sign(j as isize - i as isize) * sign(b as isize - a as isize);
    Ok(complementary_minor(k, i, j, a, b)? * s / d)
}

/// Both sides of E^{12}_{1r} E^{12}_{2s} - E^{12}_{1s} E^{12}_{2r} = E^{12}_{12} sign(s-r) E^{12}_{rs}
/// (zero-based: rows and columns 0, 1 play the roles of 1, 2).
pub fn sylvester_identity_sides(k: &ComplexMatrix, r: usize, s: usize) -> Result<(C64, C64)> {
    k.require_square()?;
    let n = k.rows;
    if n < 3 {
        return Err(Error::IndexOutOfRange(format!("need k >= 3, got {n}")));
    }
    if r == 0 || s == 0 || r >= n || s >= n || r == s {
        return Err(Error::IndexOutOfRange(format!("r={r}, s={s} for k={n}")));
    }
    let e = |a, b| complementary_minor(k, 0, 1, a, b);
    let lhs = e(0, r)? * e(1, s)? - e(0, s)? * e(1, r)?;
    let rhs = e(0, 1)? * sign(s as isize - r as isize) * e(r, s)?;
    Ok((lhs, rhs))
}

pub fn sylvester_identity_check(k: &ComplexMatrix, r: usize, s: usize) -> Result<f64> {
    let (lhs, rhs) = sylvester_identity_sides(k, r, s)?;
    Ok((lhs - rhs).norm())
}

fn stack(vectors: &[Vec<C64>]) -> Result<DMatrix<C64>> {
    let first = vectors.first().ok_or(Error::EmptySample)?;
    let d = first.len();
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} among vectors of length {d}",
            v.len()
        )));
    }
    Ok(DMatrix::from_fn(vectors.len(), d, |i, j| vectors[i][j]))
}

/// Singular values of the matrix whose rows are `vectors`, largest first.
pub fn singular_values(vectors: &[Vec<C64>]) -> Result<Vec<f64>> {
    let a = stack(vectors)?;
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Rank of the stacked vectors; singular values below `tol * s_max` count as
/// zero. `tol` defaults to 1e-8.
pub fn numerical_rank(vectors: &[Vec<C64>], tol: Option<f64>) -> Result<usize> {
    let tol = tol.unwrap_or(tol::RANK_TOL);
    let s = singular_values(vectors)?;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&x| x > tol * top).count())
}

/// Orthonormal basis of the span of `vectors` (as row vectors).
pub fn span_basis(vectors: &[Vec<C64>], tol: f64) -> Result<Vec<Vec<C64>>> {
    let a = stack(vectors)?;
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top > 0.0 && svd.singular_values[i] > tol * top)
        .collect();
    idx.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    Ok(idx
        .into_iter()
        .map(|i| v_t.row(i).iter().copied().collect())
        .collect())
}
