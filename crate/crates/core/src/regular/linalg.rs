//! Exact linear algebra over the rationals.
//!
//! Rank and solve use fraction-free (Bareiss) elimination over the integers after clearing
//! denominators row by row. Pivots are chosen as the first nonzero entry, scanning columns
//! left to right and rows top to bottom, so no decision depends on a floating tolerance.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub type Vector = Vec<Rational>;

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub_vec(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn kron_vec(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|row| row.iter().map(|&x| rat(x)).collect()).collect())
            .expect("rows of equal length")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector], rows: usize) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for i in 0..rows {
                m[(i, j)] = col[i].clone();
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

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
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

    /// `M x` for a column vector.
    pub fn mul_vec(&self, x: &[Rational]) -> Vector {
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `x^t M` for a row vector.
    pub fn vec_mul(&self, x: &[Rational]) -> Vector {
        let mut out = vec![Rational::zero(); self.cols];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let m = &self[(i, j)];
                if !m.is_zero() {
                    *o += xi * m;
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * &other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    /// Outer product `a b^t`.
    pub fn outer(a: &[Rational], b: &[Rational]) -> Matrix {
        let mut m = Matrix::zeros(a.len(), b.len());
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                m[(i, j)] = x * y;
            }
        }
        m
    }

    /// Block-diagonal matrix `diag(self, other)`.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(crate::value::rational_to_f64).collect()
    }

    pub fn rank(&self) -> usize {
        let (rows, _) = to_integer_rows(self);
        bareiss_echelon(rows, self.cols).rank
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// Scales each row by the lcm of its denominators. Returns the integer rows and the scale factors.
fn to_integer_rows(m: &Matrix) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut rows = Vec::with_capacity(m.rows);
    let mut scales = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let row = m.row(i);
        let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        rows.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
        scales.push(l);
    }
    (rows, scales)
}

struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<(usize, usize)>,
    rank: usize,
}

/// Bareiss fraction-free elimination to row echelon form. Every division is exact.
fn bareiss_echelon(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Echelon {
    let n = rows.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        for i in r + 1..n {
            for j in c + 1..cols {
                let v = &rows[r][c] * &rows[i][j] - &rows[i][c] * &rows[r][j];
                rows[i][j] = v / &prev;
            }
            rows[i][c] = BigInt::zero();
        }
        // entries of earlier columns in rows below r are zero already
        prev = rows[r][c].clone();
        pivots.push((r, c));
        r += 1;
    }
    Echelon { rows, pivots, rank: r }
}

/// Solves `A x = b` for square nonsingular `A`. Returns `None` when `A` is singular.
pub fn solve(a: &Matrix, b: &[Rational]) -> Option<Vector> {
    assert!(a.is_square() && a.rows == b.len());
    let n = a.rows;
    // augmented system, each row cleared of denominators
    let mut aug = Matrix::zeros(n, n + 1);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let (rows, _) = to_integer_rows(&aug);
    let ech = bareiss_echelon(rows, n + 1);
    if ech.pivots.len() < n || ech.pivots.iter().any(|&(_, c)| c >= n) {
        return None;
    }
    let rows = ech.rows;
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(rows[i][n].clone());
        for j in i + 1..n {
            if !rows[i][j].is_zero() {
                acc -= Rational::from_integer(rows[i][j].clone()) * &x[j];
            }
        }
        x[i] = acc / Rational::from_integer(rows[i][i].clone());
    }
    Some(x)
}

/// Incrementally built basis of a subspace of `Q^d`, kept in reduced row echelon form.
#[derive(Debug, Clone, Default)]
pub struct Span {
    dim: usize,
    /// reduced basis rows, pivot entry 1
    rows: Vec<Vector>,
    pivots: Vec<usize>,
    /// the vectors as inserted, in insertion order
    generators: Vec<Vector>,
}

impl Span {
    pub fn new(dim: usize) -> Self {
        Span { dim, ..Default::default() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Generators in insertion order; they form a basis of the span.
    pub fn basis(&self) -> &[Vector] {
        &self.generators
    }

    fn reduce(&self, v: &[Rational]) -> Vector {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let c = w[p].clone();
                for (wi, ri) in w.iter_mut().zip(row) {
                    if !ri.is_zero() {
                        *wi -= &c * ri;
                    }
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Adds `v` if it is linearly independent of the current basis. Returns whether it was added.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else { return false };
        let inv = w[p].recip();
        for x in w.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let c = row[p].clone();
                for (ri, wi) in row.iter_mut().zip(&w) {
                    if !wi.is_zero() {
                        *ri -= &c * wi;
                    }
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(p);
        self.generators.push(v.to_vec());
        true
    }

    /// Coordinates of `v` with respect to the reduced basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// The reduced basis (each vector has a 1 in its own pivot and 0 in all other pivots).
    pub fn reduced_basis(&self) -> &[Vector] {
        &self.rows
    }
}

/// Plain LU solve with partial pivoting for small dense `f64` systems.
pub fn solve_f64(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))?;
        if m[p * n + c] == 0.0 {
            return None;
        }
        if p != c {
            for j in 0..n {
                m.swap(c * n + j, p * n + j);
            }
            x.swap(c, p);
        }
        for i in c + 1..n {
            let f = m[i * n + c] / m[c * n + c];
            if f != 0.0 {
                for j in c..n {
                    m[i * n + j] -= f * m[c * n + j];
                }
                x[i] -= f * x[c];
            }
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc -= m[i * n + j] * x[j];
        }
        x[i] = acc / m[i * n + i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn solves_small_system() {
        let a = Matrix::from_rows(vec![vec![q(0, 1), q(2, 1)], vec![q(1, 2), q(1, 3)]]).unwrap();
        let x = solve(&a, &[q(4, 1), q(1, 1)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![q(4, 1), q(1, 1)]);
        assert_eq!(x, vec![q(2, 3), q(2, 1)]);
        let singular = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(solve(&singular, &[rat(1), rat(1)]).is_none());
        assert_eq!(singular.rank(), 1);
    }

    #[test]
    fn remark_matrix_rank() {
        let m0 = Matrix::from_i64(&[&[1, 13], &[0, 2]]);
        for r in 0..=10 {
            assert_eq!(m0.pow(r).rank(), 2);
        }
    }

    #[test]
    fn span_membership() {
        let mut s = Span::new(3);
        assert!(s.insert(&[rat(1), rat(2), rat(3)]));
        assert!(!s.insert(&[rat(2), rat(4), rat(6)]));
        assert!(s.insert(&[rat(0), rat(1), rat(1)]));
        assert!(s.contains(&[rat(1), rat(3), rat(4)]));
        assert!(!s.contains(&[rat(0), rat(0), rat(1)]));
        let c = s.coordinates(&[rat(1), rat(3), rat(4)]).unwrap();
        let rebuilt: Vector = (0..3)
            .map(|j| s.reduced_basis().iter().zip(&c).fold(rat(0), |acc, (row, cj)| acc + &row[j] * cj))
            .collect();
        assert_eq!(rebuilt, vec![rat(1), rat(3), rat(4)]);
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Matrix> {
        prop::collection::vec(-4i64..5, n * n).prop_map(move |v| {
            Matrix::from_rows(v.chunks(n).map(|c| c.iter().map(|&x| rat(x)).collect()).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn solve_round_trips(a in small_matrix(4), b in prop::collection::vec(-5i64..6, 4)) {
            let b: Vector = b.into_iter().map(rat).collect();
            match solve(&a, &b) {
                Some(x) => prop_assert_eq!(a.mul_vec(&x), b),
                None => prop_assert!(a.rank() < 4),
            }
        }

        #[test]
        fn rank_matches_span_dimension(a in small_matrix(4)) {
            let mut s = Span::new(4);
            for i in 0..4 { s.insert(a.row(i)); }
            prop_assert_eq!(a.rank(), s.dim());
            prop_assert_eq!(a.transpose().rank(), s.dim());
        }

        #[test]
        fn f64_solve_agrees(a in small_matrix(3), b in prop::collection::vec(-5i64..6, 3)) {
            let bq: Vector = b.iter().map(|&x| rat(x)).collect();
            if let Some(x) = solve(&a, &bq) {
                let bf: Vec<f64> = b.iter().map(|&x| x as f64).collect();
                let xf = solve_f64(&a.to_f64(), &bf, 3).unwrap();
                for (e, f) in x.iter().zip(&xf) {
                    prop_assert!((crate::value::rational_to_f64(e) - f).abs() < 1e-6 * (1.0 + f.abs()));
                }
            }
        }
    }
}
