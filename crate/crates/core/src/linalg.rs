//! Dense exact linear algebra over `Rat`.
//!
//! Row reduction clears denominators and eliminates over the integers with
//! primitive-row normalization, then divides out the pivots once at the end,
//! so intermediate entries never carry fractions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rat::{lcm_of_denominators, Rat};

pub type Vector = Vec<Rat>;

pub fn zeros(n: usize) -> Vector {
    vec![Rat::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

pub fn is_zero(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `acc += s * v`
pub fn axpy(acc: &mut [Rat], s: &Rat, v: &[Rat]) {
    if s.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += s * b;
        }
    }
}

pub fn scaled(v: &[Rat], s: &Rat) -> Vector {
    v.iter().map(|x| x * s).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rat], b: &[Rat]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix row");
            data.extend(r);
        }
        Matrix { rows: n, cols, data }
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vector], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn apply(&self, v: &[Rat]) -> Vector {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, s: &Rat) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn rank(&self) -> usize {
        Echelon::from_rows(self.row_vecs(), self.cols).rank()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn nullspace(&self) -> Vec<Vector> {
        Echelon::from_rows(self.row_vecs(), self.cols).kernel_basis()
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * &other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.data.iter().enumerate().map(move |(k, x)| (k / self.cols.max(1), k % self.cols.max(1), x))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form of a row space, with pivots chosen along a fixed
/// column order. Two inputs spanning the same space under the same order
/// produce identical echelon rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    order: Vec<usize>,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

fn primitive(row: &[Rat]) -> Vec<BigInt> {
    let l = lcm_of_denominators(row.iter());
    let ints: Vec<BigInt> = row.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    make_primitive(ints)
}

fn make_primitive(mut ints: Vec<BigInt>) -> Vec<BigInt> {
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in ints.iter_mut() {
            *x /= &g;
        }
    }
    ints
}

impl Echelon {
    pub fn empty(dim: usize) -> Self {
        Echelon {
            dim,
            order: (0..dim).collect(),
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows(rows: Vec<Vector>, dim: usize) -> Self {
        Self::with_order(rows, (0..dim).collect())
    }

    /// Row-reduces with pivot preference following `order` (a permutation of
    /// the column indices).
    pub fn with_order(rows: Vec<Vector>, order: Vec<usize>) -> Self {
        let dim = order.len();
        let mut ints: Vec<Vec<BigInt>> = rows
            .iter()
            .filter(|r| !is_zero(r))
            .map(|r| {
                assert_eq!(r.len(), dim);
                primitive(r)
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in &order {
            if r == ints.len() {
                break;
            }
            let Some(p) = (r..ints.len()).filter(|&i| !ints[i][c].is_zero()).min_by_key(|&i| ints[i][c].abs()) else {
                continue;
            };
            ints.swap(r, p);
            let (before, rest) = ints.split_at_mut(r);
            let (mid, tail) = rest.split_at_mut(1);
            let prow = &mid[0];
            let pv = prow[c].clone();
            let fix = |row: &mut Vec<BigInt>| {
                let a = row[c].clone();
                if a.is_zero() {
                    return;
                }
                let g = pv.gcd(&a);
                let (mp, ma) = (&pv / &g, &a / &g);
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x = &*x * &mp - y * &ma;
                }
                let taken = std::mem::take(row);
                *row = make_primitive(taken);
            };
            tail.iter_mut().for_each(fix);
            before.iter_mut().for_each(fix);
            pivots.push(c);
            r += 1;
            // drop rows that became zero
            let (keep, rest): (Vec<_>, Vec<_>) = ints.drain(r..).partition(|row| row.iter().any(|x| !x.is_zero()));
            drop(rest);
            ints.extend(keep);
        }
        ints.truncate(r);
        let rows = ints
            .into_iter()
            .zip(&pivots)
            .map(|(row, &c)| {
                let p = Rat::from_integer(row[c].clone());
                row.into_iter().map(|x| Rat::from_integer(x) / &p).collect()
            })
            .collect();
        Echelon { dim, order, rows, pivots }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Columns that are not pivots, in the elimination order.
    pub fn free_columns(&self) -> Vec<usize> {
        self.order.iter().copied().filter(|c| !self.pivots.contains(c)).collect()
    }

    /// The canonical representative of `v` modulo the row space: zero on every
    /// pivot column.
    pub fn reduce(&self, v: &[Rat]) -> Vector {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let s = out[p].clone();
            if !s.is_zero() {
                axpy(&mut out, &-s, row);
            }
        }
        out
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        is_zero(&self.reduce(v))
    }

    /// Coordinates of `v` in the echelon rows, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn extend(&self, more: impl IntoIterator<Item = Vector>) -> Echelon {
        let mut rows = self.rows.clone();
        rows.extend(more);
        Echelon::with_order(rows, self.order.clone())
    }

    pub fn contains_space(&self, other: &Echelon) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Basis of the kernel of the matrix whose rows span this space.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut x = unit(self.dim, f);
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    x[p] = -row[f].clone();
                }
                x
            })
            .collect()
    }

    /// Intersection of two row spaces in the same ambient space.
    pub fn intersect(&self, other: &Echelon) -> Echelon {
        // x = sum a_i r_i = sum b_j s_j: kernel of [R; -S]^T
        let n = self.rank() + other.rank();
        if n == 0 {
            return Echelon::with_order(vec![], self.order.clone());
        }
        let mut cols: Vec<Vector> = self.rows.clone();
        cols.extend(other.rows.iter().map(|r| scaled(r, &-Rat::one())));
        let m = Matrix::from_cols(&cols, self.dim);
        let kernel = m.nullspace();
        let vecs = kernel
            .into_iter()
            .map(|k| {
                let mut v = zeros(self.dim);
                for (a, r) in k.iter().zip(&self.rows) {
                    axpy(&mut v, a, r);
                }
                v
            })
            .collect();
        Echelon::with_order(vecs, self.order.clone())
    }
}

impl PartialEq for Echelon {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rank() == other.rank() && self.contains_space(other)
    }
}

/// Solves `m x = b`, returning one solution if any.
/// `dim {X : X A = B X}` over all pairs `(A, B)`, for `X` of shape `m × n`.
pub fn commutant_dim(pairs: &[(Matrix, Matrix)], n: usize, m: usize) -> usize {
    if n == 0 || m == 0 {
        return 0;
    }
    // column-major vec: vec(X A) = (Aᵀ ⊗ I) vec X, vec(B X) = (I ⊗ B) vec X
    let mut rows = Vec::new();
    for (a, b) in pairs {
        let lhs = a.transpose().kron(&Matrix::identity(m));
        let rhs = Matrix::identity(n).kron(b);
        rows.extend(lhs.sub(&rhs).row_vecs().into_iter().filter(|r| !is_zero(r)));
    }
    if rows.is_empty() {
        return n * m;
    }
    n * m - Matrix::from_rows(rows, n * m).rank()
}

pub fn solve(m: &Matrix, b: &[Rat]) -> Option<Vector> {
    let aug: Vec<Vector> = (0..m.rows)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let e = Echelon::from_rows(aug, m.cols + 1);
    if e.pivots.contains(&m.cols) {
        return None;
    }
    let mut x = zeros(m.cols);
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        x[p] = row[m.cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let m = Matrix::from_rows(vec![v(&[1, 2, 3]), v(&[2, 4, 6]), v(&[1, 0, 1])], 3);
        assert_eq!(m.rank(), 2);
        let k = m.nullspace();
        assert_eq!(k.len(), 1);
        assert!(is_zero(&m.apply(&k[0])));
    }

    #[test]
    fn echelon_is_canonical() {
        let a = Echelon::from_rows(vec![v(&[1, 1, 0]), v(&[0, 1, 1])], 3);
        let b = Echelon::from_rows(vec![v(&[1, 2, 1]), v(&[3, 1, -2])], 3);
        assert_eq!(a.rows(), b.rows());
    }

    #[test]
    fn ordered_pivots_prefer_given_columns() {
        let e = Echelon::with_order(vec![v(&[1, 1, 0])], vec![2, 1, 0]);
        assert_eq!(e.pivots(), &[1]);
        assert_eq!(e.free_columns(), vec![2, 0]);
        let r = e.reduce(&v(&[0, 1, 0]));
        assert_eq!(r, v(&[-1, 0, 0]));
    }

    #[test]
    fn solve_and_intersect() {
        let m = Matrix::from_rows(vec![vec![int(2), int(0)], vec![int(0), rat(1, 3)]], 2);
        assert_eq!(solve(&m, &v(&[4, 1])).unwrap(), v(&[2, 3]));
        let sing = Matrix::from_rows(vec![v(&[1, 1]), v(&[1, 1])], 2);
        assert!(solve(&sing, &v(&[1, 2])).is_none());

        let a = Echelon::from_rows(vec![v(&[1, 0, 0]), v(&[0, 1, 0])], 3);
        let b = Echelon::from_rows(vec![v(&[0, 1, 0]), v(&[0, 0, 1])], 3);
        let i = a.intersect(&b);
        assert_eq!(i.rank(), 1);
        assert!(i.contains(&v(&[0, 5, 0])));
    }
}
