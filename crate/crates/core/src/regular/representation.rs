use std::collections::VecDeque;

use num_traits::{One, Zero};

use super::linalg::{dot, is_zero_vec, kron_vec, Matrix, Rational, Span, Vector};
use crate::digits::{check_base, digits_msd};
use crate::error::{Error, Result};

/// A linear representation `(u, (M_i), v)` of a q-regular sequence:
/// `f(n) = u^t M_{n_0} M_{n_1} ... M_{n_L} v` where `n_0` is the least significant digit,
/// so that the vector sequence satisfies `F(qn + i) = M_i F(n)` with `F(0) = v`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRepresentation {
    q: u32,
    u: Vector,
    m: Vec<Matrix>,
    v: Vector,
}

impl LinearRepresentation {
    pub fn new(q: u32, u: Vector, m: Vec<Matrix>, v: Vector) -> Result<Self> {
        check_base(q)?;
        let d = u.len();
        if m.len() != q as usize {
            return Err(Error::MalformedRepresentation(format!("expected {q} digit matrices, found {}", m.len())));
        }
        if v.len() != d {
            return Err(Error::MalformedRepresentation(format!("u has length {d} but v has length {}", v.len())));
        }
        if let Some((i, mi)) = m.iter().enumerate().find(|(_, mi)| mi.rows() != d || mi.cols() != d) {
            return Err(Error::MalformedRepresentation(format!(
                "M_{i} is {}x{}, expected {d}x{d}",
                mi.rows(),
                mi.cols()
            )));
        }
        Ok(LinearRepresentation { q, u, m, v })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &[Rational] {
        &self.u
    }

    pub fn v(&self) -> &[Rational] {
        &self.v
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.m
    }

    pub fn matrix(&self, digit: u32) -> &Matrix {
        &self.m[digit as usize]
    }

    /// `f(n)`; `f(0) = u^t v`.
    pub fn eval(&self, n: u64) -> Rational {
        let mut row = self.u.clone();
        let mut m = n;
        while m > 0 {
            let d = (m % self.q as u64) as usize;
            row = self.m[d].vec_mul(&row);
            m /= self.q as u64;
        }
        dot(&row, &self.v)
    }

    /// The vector `F(n) = M_{n_0} ... M_{n_L} v`.
    pub fn eval_vector(&self, n: u64) -> Vector {
        let mut col = self.v.clone();
        for d in digits_msd(n, self.q) {
            col = self.m[d as usize].mul_vec(&col);
        }
        col
    }

    pub fn is_zero_insensitive(&self) -> bool {
        self.m[0].mul_vec(&self.v) == self.v
    }

    pub fn is_integral(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_integer()) && self.m.iter().all(Matrix::is_integral)
    }

    /// Representation of `f^2` (more generally `f g`) through Kronecker products.
    pub fn kron(&self, other: &LinearRepresentation) -> Result<LinearRepresentation> {
        if self.q != other.q {
            return Err(Error::Composition(format!("bases differ: {} vs {}", self.q, other.q)));
        }
        let m = self.m.iter().zip(&other.m).map(|(a, b)| a.kron(b)).collect();
        LinearRepresentation::new(self.q, kron_vec(&self.u, &other.u), m, kron_vec(&self.v, &other.v))
    }

    /// Representation of `alpha f + beta g` as a direct sum.
    pub fn linear_combination(
        &self,
        other: &LinearRepresentation,
        alpha: &Rational,
        beta: &Rational,
    ) -> Result<LinearRepresentation> {
        if self.q != other.q {
            return Err(Error::Composition(format!("bases differ: {} vs {}", self.q, other.q)));
        }
        let u = self.u.iter().map(|x| x * alpha).chain(other.u.iter().map(|x| x * beta)).collect();
        let v = self.v.iter().chain(&other.v).cloned().collect();
        let m = self.m.iter().zip(&other.m).map(|(a, b)| a.direct_sum(b)).collect();
        LinearRepresentation::new(self.q, u, m, v)
    }

    /// Reduction to minimal dimension: restrict to the space reachable from `v`, then
    /// project onto the space reachable from `u^t`.
    pub fn minimize(&self) -> Result<LinearRepresentation> {
        let reduced = self.reduce_right().reduce_left();
        if self.is_zero_insensitive() && !reduced.is_zero_insensitive() {
            return Err(Error::MinimizationConflict);
        }
        Ok(reduced)
    }

    fn reduce_right(&self) -> LinearRepresentation {
        let d = self.dim();
        let mut span = Span::new(d);
        let mut queue = VecDeque::new();
        if span.insert(&self.v) {
            queue.push_back(self.v.clone());
        }
        while let Some(x) = queue.pop_front() {
            for mi in &self.m {
                let y = mi.mul_vec(&x);
                if span.insert(&y) {
                    queue.push_back(y);
                }
            }
        }
        let basis = span.reduced_basis().to_vec();
        let coords = |x: &[Rational]| span.coordinates(x).expect("vector lies in the reachable space");
        let m = self
            .m
            .iter()
            .map(|mi| {
                let cols: Vec<Vector> = basis.iter().map(|b| coords(&mi.mul_vec(b))).collect();
                Matrix::from_columns(&cols, basis.len())
            })
            .collect();
        let u = basis.iter().map(|b| dot(&self.u, b)).collect();
        let v = coords(&self.v);
        LinearRepresentation { q: self.q, u, m, v }
    }

    fn reduce_left(&self) -> LinearRepresentation {
        let d = self.dim();
        let mut span = Span::new(d);
        let mut queue = VecDeque::new();
        if span.insert(&self.u) {
            queue.push_back(self.u.clone());
        }
        while let Some(x) = queue.pop_front() {
            for mi in &self.m {
                let y = mi.vec_mul(&x);
                if span.insert(&y) {
                    queue.push_back(y);
                }
            }
        }
        let basis = span.reduced_basis().to_vec();
        let coords = |x: &[Rational]| span.coordinates(x).expect("vector lies in the reachable space");
        let m = self
            .m
            .iter()
            .map(|mi| {
                let rows: Vec<Vector> = basis.iter().map(|c| coords(&mi.vec_mul(c))).collect();
                Matrix::from_rows(rows).unwrap_or_else(|| Matrix::zeros(0, 0))
            })
            .collect();
        let u = coords(&self.u);
        let v = basis.iter().map(|c| dot(c, &self.v)).collect();
        LinearRepresentation { q: self.q, u, m, v }
    }

    /// `M_0^r = v u^t` on this representation as given, without canonicalization.
    pub fn check_quasimultiplicative_raw(&self, r: u32) -> bool {
        self.m[0].pow(r) == Matrix::outer(&self.v, &self.u)
    }

    /// Decides q-quasimultiplicativity with parameter `r`: minimizes, re-verifies
    /// zero-insensitivity, then tests `M_0^r = v u^t` exactly.
    pub fn check_quasimultiplicative(&self, r: u32) -> Result<bool> {
        Ok(self.canonical()?.check_quasimultiplicative_raw(r))
    }

    /// Smallest `r <= dim` with `M_0^r = v u^t` on the minimized representation.
    pub fn find_quasimultiplicative_parameter(&self) -> Result<Option<u32>> {
        let canonical = self.canonical()?;
        let outer = Matrix::outer(&canonical.v, &canonical.u);
        let mut power = Matrix::identity(canonical.dim());
        for r in 0..=canonical.dim() as u32 {
            if power == outer {
                return Ok(Some(r));
            }
            power = &power * &canonical.m[0];
        }
        Ok(None)
    }

    /// The minimized representation, required to be zero-insensitive.
    pub fn canonical(&self) -> Result<LinearRepresentation> {
        let minimal = self.minimize().map_err(|e| match e {
            Error::MinimizationConflict => Error::NotCanonical("minimization broke zero-insensitivity".into()),
            other => other,
        })?;
        if !minimal.is_zero_insensitive() {
            return Err(Error::NotCanonical("minimal representation is not zero-insensitive".into()));
        }
        Ok(minimal)
    }

    /// Whether all entries of `u` are zero, i.e. the sequence vanishes identically.
    pub fn is_trivially_zero(&self) -> bool {
        is_zero_vec(&self.u) || is_zero_vec(&self.v)
    }

    pub fn to_f64(&self) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
        let f = crate::value::rational_to_f64;
        (self.u.iter().map(f).collect(), self.m.iter().map(Matrix::to_f64).collect(), self.v.iter().map(f).collect())
    }

    /// Scalar representation of a constant-one multiplicative or constant-zero additive function.
    pub fn constant(q: u32, value: Rational) -> Result<LinearRepresentation> {
        let m = (0..q).map(|_| Matrix::identity(1)).collect();
        LinearRepresentation::new(q, vec![value], m, vec![Rational::one()])
    }

    pub fn zero(q: u32, dim: usize) -> Result<LinearRepresentation> {
        let m = (0..q).map(|_| Matrix::identity(dim)).collect();
        LinearRepresentation::new(q, vec![Rational::zero(); dim], m, vec![Rational::zero(); dim])
    }
}
