//! Small dense complex linear algebra.
//!
//! The whole library works with modest matrix sizes (spin matrices up to
//! ~10x10, regular representations of finite groups up to ~100x100, Fock
//! operators up to a configurable bound), so a hand-rolled row-major dense
//! type keeps the scalar type fully generic without pulling in a linear
//! algebra framework.

use crate::error::{Error, Result};
use crate::scalar::{czero, creal, Scalar, C};
use num_complex::Complex;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = creal(T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from a nested array of `(re, im)` pairs; rows must be equal length.
    pub fn from_rows(rows: &[Vec<C<T>>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
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

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn scale(&self, z: C<T>) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= z;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = v.conj();
        }
        out
    }

    pub fn trace(&self) -> C<T> {
        let n = self.rows.min(self.cols);
        (0..n).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest absolute value of any entry.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Difference measured relative to the magnitude of the operands,
    /// `max|a - b| / max(1, |a|, |b|)`; equals the absolute difference for
    /// unit-scale matrices.
    pub fn relative_diff(&self, other: &Self) -> T {
        let scale = T::one().max(self.max_abs()).max(other.max_abs());
        self.max_abs_diff(other) / scale
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = czero();
                for j in 0..self.cols {
                    acc += self[(i, j)] * v[j];
                }
                acc
            })
            .collect()
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Residual of unitarity, `max |A^dag A - 1|`.
    pub fn unitarity_residual(&self) -> T {
        assert_eq!(self.rows, self.cols);
        (self.adjoint() * self.clone()).max_abs_diff(&Self::identity(self.rows))
    }

    /// Solve `A X = B` by Gauss-Jordan with partial pivoting. `A` is consumed as a copy.
    pub fn solve(&self, b: &CMat<T>) -> Result<CMat<T>> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(self.rows, b.rows);
        let n = self.rows;
        let m = b.cols;
        let mut a = self.clone();
        let mut x = b.clone();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[(col, col)].norm();
            for r in col + 1..n {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best <= T::real(1e-300) {
                return Err(Error::SingularMatrix);
            }
            if piv != col {
                for j in 0..n {
                    let (u, v) = (a[(col, j)], a[(piv, j)]);
                    a[(col, j)] = v;
                    a[(piv, j)] = u;
                }
                for j in 0..m {
                    let (u, v) = (x[(col, j)], x[(piv, j)]);
                    x[(col, j)] = v;
                    x[(piv, j)] = u;
                }
            }
            let inv = creal(T::one()) / a[(col, col)];
            for j in 0..n {
                a[(col, j)] *= inv;
            }
            for j in 0..m {
                x[(col, j)] *= inv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.norm() == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let s = a[(col, j)];
                    a[(r, j)] -= f * s;
                }
                for j in 0..m {
                    let s = x[(col, j)];
                    x[(r, j)] -= f * s;
                }
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMat<T>> {
        self.solve(&Self::identity(self.rows))
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> C<T> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = creal(T::one());
        for col in 0..n {
            let mut piv = col;
            let mut best = a[(col, col)].norm();
            for r in col + 1..n {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == T::zero() {
                return czero();
            }
            if piv != col {
                det = -det;
                for j in 0..n {
                    let (u, v) = (a[(col, j)], a[(piv, j)]);
                    a[(col, j)] = v;
                    a[(piv, j)] = u;
                }
            }
            det *= a[(col, col)];
            let inv = creal(T::one()) / a[(col, col)];
            for r in col + 1..n {
                let f = a[(r, col)] * inv;
                for j in col..n {
                    let s = a[(col, j)];
                    a[(r, j)] -= f * s;
                }
            }
        }
        det
    }

    /// Eigen-decomposition of a hermitian matrix by the cyclic Jacobi method.
    ///
    /// Returns `(eigenvalues, V)` with columns of `V` orthonormal eigenvectors,
    /// `A = V diag(w) V^dag`. Eigenvalues are returned in ascending order.
    pub fn hermitian_eigen(&self) -> (Vec<T>, CMat<T>) {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut v = Self::identity(n);
        let tol = T::real(1e-30);
        for _sweep in 0..60 {
            let mut off = T::zero();
            for p in 0..n {
                for q in p + 1..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off < tol {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq.norm_sqr() < tol * T::real(1e-4) {
                        continue;
                    }
                    // Phase-rotate so the pivot is real, then a real Jacobi rotation.
                    let phase = apq / creal(apq.norm());
                    let g = apq.norm();
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let tau = (aqq - app) / (T::real(2.0) * g);
                    let t = {
                        let s = if tau >= T::zero() { T::one() } else { -T::one() };
                        s / (tau.abs() + (tau * tau + T::one()).sqrt())
                    };
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    // Column rotation: col_p' = c*col_p - s*conj(phase)... combined
                    // unitary J with J[(p,p)]=c, J[(q,p)]=-s*conj(phase),
                    // J[(p,q)]=s*phase, J[(q,q)]=c applied as A <- J^dag A J, V <- V J.
                    let jpp = creal(c);
                    let jpq = phase * creal(s);
                    let jqp = -phase.conj() * creal(s);
                    let jqq = creal(c);
                    for r in 0..n {
                        let (arp, arq) = (a[(r, p)], a[(r, q)]);
                        a[(r, p)] = arp * jpp + arq * jqp;
                        a[(r, q)] = arp * jpq + arq * jqq;
                    }
                    for cidx in 0..n {
                        let (apc, aqc) = (a[(p, cidx)], a[(q, cidx)]);
                        a[(p, cidx)] = jpp.conj() * apc + jqp.conj() * aqc;
                        a[(q, cidx)] = jpq.conj() * apc + jqq.conj() * aqc;
                    }
                    for r in 0..n {
                        let (vrp, vrq) = (v[(r, p)], v[(r, q)]);
                        v[(r, p)] = vrp * jpp + vrq * jqp;
                        v[(r, q)] = vrp * jpq + vrq * jqq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        let evals: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
        let sorted: Vec<T> = order.iter().map(|&i| evals[i]).collect();
        let vecs = Self::from_fn(n, n, |r, c| v[(r, order[c])]);
        (sorted, vecs)
    }
}

impl<T: Scalar> Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for CMat<T> {
    type Output = CMat<T>;
    fn mul(self, rhs: CMat<T>) -> CMat<T> {
        &self * &rhs
    }
}

impl<T: Scalar> Mul for &CMat<T> {
    type Output = CMat<T>;
    fn mul(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Scalar> Add for &CMat<T> {
    type Output = CMat<T>;
    fn add(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += *b;
        }
        out
    }
}

impl<T: Scalar> Sub for &CMat<T> {
    type Output = CMat<T>;
    fn sub(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= *b;
        }
        out
    }
}

impl<T: Scalar> Neg for &CMat<T> {
    type Output = CMat<T>;
    fn neg(self) -> CMat<T> {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = -*a;
        }
        out
    }
}

/// Fixed 2x2 complex matrix; the workhorse for SL(2,C) and hermitian
/// momentum encodings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T> {
    pub e: [[C<T>; 2]; 2],
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> Self {
        Mat2 { e: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        Self::new(czero(), czero(), czero(), czero())
    }

    pub fn identity() -> Self {
        Self::new(creal(T::one()), czero(), czero(), creal(T::one()))
    }

    pub fn diag(a: C<T>, d: C<T>) -> Self {
        Self::new(a, czero(), czero(), d)
    }

    pub fn det(&self) -> C<T> {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    pub fn trace(&self) -> C<T> {
        self.e[0][0] + self.e[1][1]
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.e[0][0].conj(),
            self.e[1][0].conj(),
            self.e[0][1].conj(),
            self.e[1][1].conj(),
        )
    }

    pub fn conj(&self) -> Self {
        Self::new(
            self.e[0][0].conj(),
            self.e[0][1].conj(),
            self.e[1][0].conj(),
            self.e[1][1].conj(),
        )
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.e[0][0], self.e[1][0], self.e[0][1], self.e[1][1])
    }

    pub fn scale(&self, z: C<T>) -> Self {
        Self::new(
            self.e[0][0] * z,
            self.e[0][1] * z,
            self.e[1][0] * z,
            self.e[1][1] * z,
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() <= T::real(1e-300) {
            return Err(Error::SingularMatrix);
        }
        let inv = creal(T::one()) / d;
        Ok(Self::new(
            self.e[1][1] * inv,
            -self.e[0][1] * inv,
            -self.e[1][0] * inv,
            self.e[0][0] * inv,
        ))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn max_abs(&self) -> T {
        self.e
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.e[i][j] - other.e[i][j]).norm());
            }
        }
        m
    }

    /// Exponential of a traceless 2x2 matrix, via `M^2 = -det(M) 1`:
    /// `exp(M) = cosh(d) 1 + (sinh(d)/d) M` with `d^2 = -det M`.
    pub fn exp_traceless(&self) -> Self {
        let d2 = -self.det();
        let d = d2.sqrt();
        let (ch, sh_over_d) = if d.norm() < T::real(1e-8) {
            // series: cosh(d) ~ 1 + d^2/2, sinh(d)/d ~ 1 + d^2/6
            (
                creal(T::one()) + d2 / creal(T::real(2.0)),
                creal(T::one()) + d2 / creal(T::real(6.0)),
            )
        } else {
            (d.cosh(), d.sinh() / d)
        };
        let mut out = Self::identity().scale(ch);
        let m = self.scale(sh_over_d);
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] += m.e[i][j];
            }
        }
        out
    }

    pub fn to_cmat(&self) -> CMat<T> {
        CMat::from_fn(2, 2, |i, j| self.e[i][j])
    }

    pub fn mul_vec(&self, v: [C<T>; 2]) -> [C<T>; 2] {
        [
            self.e[0][0] * v[0] + self.e[0][1] * v[1],
            self.e[1][0] * v[0] + self.e[1][1] * v[1],
        ]
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, r: Mat2<T>) -> Mat2<T> {
        Mat2::new(
            self.e[0][0] * r.e[0][0] + self.e[0][1] * r.e[1][0],
            self.e[0][0] * r.e[0][1] + self.e[0][1] * r.e[1][1],
            self.e[1][0] * r.e[0][0] + self.e[1][1] * r.e[1][0],
            self.e[1][0] * r.e[0][1] + self.e[1][1] * r.e[1][1],
        )
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Mat2<T>;
    fn add(self, r: Mat2<T>) -> Mat2<T> {
        Mat2::new(
            self.e[0][0] + r.e[0][0],
            self.e[0][1] + r.e[0][1],
            self.e[1][0] + r.e[1][0],
            self.e[1][1] + r.e[1][1],
        )
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Mat2<T>;
    fn sub(self, r: Mat2<T>) -> Mat2<T> {
        Mat2::new(
            self.e[0][0] - r.e[0][0],
            self.e[0][1] - r.e[0][1],
            self.e[1][0] - r.e[1][0],
            self.e[1][1] - r.e[1][1],
        )
    }
}

/// The Pauli matrices `sigma_1, sigma_2, sigma_3`.
pub fn pauli<T: Scalar>() -> [Mat2<T>; 3] {
    let o = czero();
    let one = creal(T::one());
    let i = Complex::new(T::zero(), T::one());
    [
        Mat2::new(o, one, one, o),
        Mat2::new(o, -i, i, o),
        Mat2::new(one, o, o, -one),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = CMat<f64>;

    #[test]
    fn solve_and_inverse() {
        let a = M::from_fn(3, 3, |i, j| {
            Complex::new((i * 3 + j) as f64 + if i == j { 5.0 } else { 0.0 }, (i as f64) - (j as f64))
        });
        let inv = a.inverse().unwrap();
        let id = &a * &inv;
        assert!(id.max_abs_diff(&M::identity(3)) < 1e-12);
    }

    #[test]
    fn det_of_triangular() {
        let mut a = M::identity(3);
        a[(0, 0)] = Complex::new(2.0, 0.0);
        a[(1, 1)] = Complex::new(0.0, 3.0);
        a[(0, 2)] = Complex::new(7.0, -1.0);
        let d = a.det();
        assert!((d - Complex::new(0.0, 6.0)).norm() < 1e-13);
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 8;
        let mut h = M::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let z = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                if i == j {
                    h[(i, j)] = Complex::new(z.re, 0.0);
                } else {
                    h[(i, j)] = z;
                    h[(j, i)] = z.conj();
                }
            }
        }
        let (w, v) = h.hermitian_eigen();
        assert!(v.unitarity_residual() < 1e-12);
        let mut d = M::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = Complex::new(w[i], 0.0);
        }
        let rec = &(&v * &d) * &v.adjoint();
        assert!(rec.max_abs_diff(&h) < 1e-12);
        for i in 1..n {
            assert!(w[i] >= w[i - 1]);
        }
    }

    #[test]
    fn mat2_exp_traceless_det_one() {
        let m = Mat2::new(
            Complex::new(0.3, -0.2),
            Complex::new(1.1, 0.4),
            Complex::new(-0.5, 0.9),
            Complex::new(-0.3, 0.2),
        );
        let e = m.exp_traceless();
        assert!((e.det() - Complex::new(1.0, 0.0)).norm() < 1e-14);
    }
}
