//! Small dense integer and rational matrix helpers.
//!
//! Everything here is exact. Matrices are at most 20x20, so clarity wins over
//! speed; rational work goes through `BigRational` to rule out overflow.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds from row vectors; panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        Self::try_from_rows(rows).expect("ragged matrix")
    }

    pub fn try_from_rows(rows: &[Vec<i64>]) -> Result<Self, String> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err("rows have different lengths".into());
        }
        Ok(IMat { rows: r, cols: c, data: rows.iter().flatten().copied().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
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

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &IMat) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn add(&self, other: &IMat) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &IMat) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Self {
        IMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn block_diag(blocks: &[&IMat]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> i64 {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> =
            (0..n).map(|i| self.row(i).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        i64::try_from(sign * a[n - 1][n - 1]).expect("determinant overflow")
    }

    pub fn to_rational(&self) -> RMat {
        RMat::from_fn(self.rows, self.cols, |i, j| BigRational::from_integer(self[(i, j)].into()))
    }

    /// Integer inverse, if the matrix is invertible over Z.
    pub fn inverse(&self) -> Option<IMat> {
        self.to_rational().inverse()?.to_integer()
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl TryFrom<Vec<Vec<i64>>> for IMat {
    type Error = String;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, String> {
        Self::try_from_rows(&rows)
    }
}

impl From<IMat> for Vec<Vec<i64>> {
    fn from(m: IMat) -> Self {
        m.to_rows()
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RMat {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RMat {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RMat { rows, cols, data }
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

    fn get_mut(&mut self, i: usize, j: usize) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }

    pub fn mul(&self, other: &RMat) -> RMat {
        assert_eq!(self.cols, other.rows);
        RMat::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(BigRational::zero(), |acc, k| acc + self.get(i, k) * other.get(k, j))
        })
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(BigRational::zero(), |acc, k| acc + self.get(i, k) * &v[k]))
            .collect()
    }

    pub fn transpose(&self) -> RMat {
        RMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<RMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RMat::from_fn(n, n, |i, j| {
            if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        });
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                *a.get_mut(col, j) /= &p;
                *inv.get_mut(col, j) /= &p;
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let da = a.get(col, j) * &factor;
                    let di = inv.get(col, j) * &factor;
                    *a.get_mut(r, j) -= da;
                    *inv.get_mut(r, j) -= di;
                }
            }
        }
        Some(inv)
    }

    pub fn to_integer(&self) -> Option<IMat> {
        let mut out = IMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                if !x.is_integer() {
                    return None;
                }
                out[(i, j)] = x.to_integer().to_i64()?;
            }
        }
        Some(out)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| ratio_to_f64(self.get(i, j))).collect())
            .collect()
    }
}

pub fn ratio_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Inertia (positive, negative, zero) of a symmetric matrix by exact
/// congruence diagonalization over the rationals.
pub fn inertia(gram: &IMat) -> (usize, usize, usize) {
    assert!(gram.is_symmetric(), "inertia needs a symmetric matrix");
    let n = gram.rows();
    let mut a = gram.to_rational();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    let mut k = 0;
    while k < n {
        let diag = (k..n).find(|&i| !a.get(i, i).is_zero());
        let p = match diag {
            Some(p) => p,
            None => {
                // All remaining diagonal entries vanish; e_i <- e_i + e_j
                // makes the (i,i) entry 2 a_ij.
                let off = (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a.get(i, j).is_zero());
                match off {
                    Some((i, j)) => {
                        add_congruence(&mut a, i, j);
                        i
                    }
                    None => {
                        zero += n - k;
                        break;
                    }
                }
            }
        };
        swap_congruence(&mut a, k, p);
        let pivot = a.get(k, k).clone();
        if pivot.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        // Schur complement on the trailing block.
        for i in k + 1..n {
            if a.get(i, k).is_zero() {
                continue;
            }
            let factor = a.get(i, k) / &pivot;
            for j in k + 1..n {
                let d = a.get(k, j) * &factor;
                *a.get_mut(i, j) -= d;
            }
        }
        for i in k + 1..n {
            *a.get_mut(i, k) = BigRational::zero();
            *a.get_mut(k, i) = BigRational::zero();
        }
        k += 1;
    }
    (pos, neg, zero)
}

fn swap_congruence(a: &mut RMat, i: usize, j: usize) {
    if i == j {
        return;
    }
    let n = a.rows;
    for c in 0..n {
        a.data.swap(i * n + c, j * n + c);
    }
    for r in 0..n {
        a.data.swap(r * n + i, r * n + j);
    }
}

/// Basis change e_i <- e_i + e_j applied as a congruence.
fn add_congruence(a: &mut RMat, i: usize, j: usize) {
    let n = a.rows;
    for c in 0..n {
        let v = a.get(j, c).clone();
        *a.get_mut(i, c) += v;
    }
    for r in 0..n {
        let v = a.get(r, j).clone();
        *a.get_mut(r, i) += v;
    }
}

/// Exact rational LDL^T-style data for a positive-definite Gram matrix:
/// returns (q, mu) with  x^T G x = sum_i q_i (x_i + sum_{j>i} mu_ij x_j)^2.
pub fn completed_squares(gram: &IMat) -> Option<(Vec<BigRational>, Vec<Vec<BigRational>>)> {
    let n = gram.rows();
    let mut a = gram.to_rational();
    let mut q = vec![BigRational::zero(); n];
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        let p = a.get(i, i).clone();
        if !p.is_positive() {
            return None;
        }
        for j in i + 1..n {
            mu[i][j] = a.get(i, j) / &p;
        }
        for r in i + 1..n {
            for c in i + 1..n {
                let d = a.get(i, r) * a.get(i, c) / &p;
                *a.get_mut(r, c) -= d;
            }
        }
        q[i] = p;
    }
    Some((q, mu))
}
