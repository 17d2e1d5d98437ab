//! Minkowski geometry and the two-fold covering homomorphism
//! `SL(2,C) -> restricted Lorentz group`.
//!
//! A four-vector `x` is encoded as the hermitian matrix
//! `x_her = x^mu sigma_mu` with `sigma_mu = (1, sigma_k)`, so that
//! `det x_her = x . x` in the metric `diag(1,-1,-1,-1)`. The covering map
//! `lambda(A)` is defined by `(lambda(A) x)_her = A x_her A^dag`; its kernel
//! is `{1, -1}`.

use crate::error::{Error, Result};
use crate::linalg::{pauli, Mat2};
use crate::scalar::{creal, czero, Scalar};
use num_complex::Complex;
use rand::Rng;
use std::ops::{Add, Index, Mul, Neg, Sub};

/// Real four-vector `(x^0, x^1, x^2, x^3)` in natural units.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FourVector<T>(pub [T; 4]);

impl<T: Scalar> FourVector<T> {
    pub fn new(t: T, x: T, y: T, z: T) -> Self {
        FourVector([t, x, y, z])
    }

    pub fn zero() -> Self {
        FourVector([T::zero(); 4])
    }

    pub fn basis(mu: usize) -> Self {
        let mut v = Self::zero();
        v.0[mu] = T::one();
        v
    }

    pub fn t(&self) -> T {
        self.0[0]
    }

    pub fn spatial(&self) -> [T; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn spatial_norm(&self) -> T {
        (self.0[1] * self.0[1] + self.0[2] * self.0[2] + self.0[3] * self.0[3]).sqrt()
    }

    /// Minkowski square `x . x`.
    pub fn norm_sq(&self) -> T {
        minkowski_dot(self, self)
    }

    pub fn scale(&self, s: T) -> Self {
        FourVector([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (0..4)
            .map(|i| (self.0[i] - other.0[i]).abs())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

impl<T: Scalar> Index<usize> for FourVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Scalar> Add for FourVector<T> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        FourVector([
            self.0[0] + r.0[0],
            self.0[1] + r.0[1],
            self.0[2] + r.0[2],
            self.0[3] + r.0[3],
        ])
    }
}

impl<T: Scalar> Sub for FourVector<T> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        FourVector([
            self.0[0] - r.0[0],
            self.0[1] - r.0[1],
            self.0[2] - r.0[2],
            self.0[3] - r.0[3],
        ])
    }
}

impl<T: Scalar> Neg for FourVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        FourVector([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

/// `x . y = x^0 y^0 - x^1 y^1 - x^2 y^2 - x^3 y^3`.
pub fn minkowski_dot<T: Scalar>(x: &FourVector<T>, y: &FourVector<T>) -> T {
    x.0[0] * y.0[0] - x.0[1] * y.0[1] - x.0[2] * y.0[2] - x.0[3] * y.0[3]
}

/// Hermitian encoding `x^mu sigma_mu = [[x0+x3, x1-i x2], [x1+i x2, x0-x3]]`.
pub fn to_hermitian<T: Scalar>(x: &FourVector<T>) -> Mat2<T> {
    let [t, x1, x2, x3] = x.0;
    Mat2::new(
        creal(t + x3),
        Complex::new(x1, -x2),
        Complex::new(x1, x2),
        creal(t - x3),
    )
}

/// Inverse of [`to_hermitian`]. Rejects matrices that are not hermitian
/// within `tol`.
pub fn from_hermitian<T: Scalar>(m: &Mat2<T>, tol: T) -> Result<FourVector<T>> {
    let residual = m.max_abs_diff(&m.adjoint());
    if residual > tol {
        return Err(Error::NotHermitian {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(from_hermitian_unchecked(m))
}

/// Extract the four-vector from a (assumed) hermitian matrix.
pub fn from_hermitian_unchecked<T: Scalar>(m: &Mat2<T>) -> FourVector<T> {
    let half = T::real(0.5);
    FourVector([
        (m.e[0][0].re + m.e[1][1].re) * half,
        (m.e[0][1].re + m.e[1][0].re) * half,
        (m.e[1][0].im - m.e[0][1].im) * half,
        (m.e[0][0].re - m.e[1][1].re) * half,
    ])
}

/// The standard symplectic matrix `eps = [[0, 1], [-1, 0]]`.
///
/// This is the unique antisymmetric convention for which
/// `hat(A) = (A^dag)^{-1}` holds on SL(2,C); see the tests.
pub fn epsilon<T: Scalar>() -> Mat2<T> {
    Mat2::new(czero(), creal(T::one()), creal(-T::one()), czero())
}

/// The hat operation `hat(M) = eps conj(M) eps^{-1}` on arbitrary 2x2 matrices.
///
/// For `det M = 1` this equals `(M^dag)^{-1}`; for a hermitian momentum
/// encoding `p_her` on the mass shell, `p_her hat(p_her) = m^2`.
pub fn hat<T: Scalar>(m: &Mat2<T>) -> Mat2<T> {
    let eps = epsilon::<T>();
    let eps_inv = Mat2::new(czero(), creal(-T::one()), creal(T::one()), czero());
    eps * m.conj() * eps_inv
}

/// An element of SL(2,C): a 2x2 complex matrix of determinant 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SL2C<T>(Mat2<T>);

impl<T: Scalar> SL2C<T> {
    /// Checked constructor; rejects matrices with `|det - 1| > tol`.
    pub fn new(m: Mat2<T>, tol: T) -> Result<Self> {
        let residual = (m.det() - creal(T::one())).norm();
        if residual > tol {
            return Err(Error::NotUnimodular {
                residual: residual.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(SL2C(m))
    }

    /// Construct without a determinant check; for internal group operations
    /// that preserve unimodularity.
    pub fn new_unchecked(m: Mat2<T>) -> Self {
        SL2C(m)
    }

    pub fn identity() -> Self {
        SL2C(Mat2::identity())
    }

    pub fn mat(&self) -> &Mat2<T> {
        &self.0
    }

    /// `exp` of a traceless matrix lands in SL(2,C).
    pub fn from_traceless_exp(m: &Mat2<T>) -> Self {
        SL2C(m.exp_traceless())
    }

    pub fn inverse(&self) -> Self {
        // det = 1, so the adjugate is the inverse.
        let m = &self.0;
        SL2C(Mat2::new(m.e[1][1], -m.e[0][1], -m.e[1][0], m.e[0][0]))
    }

    pub fn adjoint(&self) -> Self {
        SL2C(self.0.adjoint())
    }

    /// `hat(A) = eps conj(A) eps^{-1} = (A^dag)^{-1}`.
    pub fn hat(&self) -> Self {
        SL2C(hat(&self.0))
    }

    pub fn det_residual(&self) -> T {
        (self.0.det() - creal(T::one())).norm()
    }

    pub fn is_su2(&self, tol: T) -> bool {
        let u = self.0 * self.0.adjoint();
        u.max_abs_diff(&Mat2::identity()) <= tol && self.det_residual() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.0.max_abs_diff(&other.0)
    }

    /// Random element: exponential of a random traceless complex matrix with
    /// entries bounded by 1, which keeps conditioning benign.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut c = || {
            Complex::new(
                T::real(rng.random_range(-1.0..1.0)),
                T::real(rng.random_range(-1.0..1.0)),
            )
        };
        let a = c();
        let b = c();
        let d = c();
        Self::from_traceless_exp(&Mat2::new(a, b, d, -a))
    }

    /// Random SU(2) element: exponential of `-i theta (n . sigma) / 2`.
    pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let s = pauli::<T>();
        let theta = T::real(rng.random_range(0.0..std::f64::consts::PI));
        let mut n = [
            T::real(rng.random_range(-1.0..1.0)),
            T::real(rng.random_range(-1.0..1.0)),
            T::real(rng.random_range(-1.0..1.0)),
        ];
        let nn = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let nn = if nn < T::real(1e-6) { T::one() } else { nn };
        for v in &mut n {
            *v /= nn;
        }
        let mut gen = Mat2::zero();
        for k in 0..3 {
            let f = Complex::new(T::zero(), -n[k] * theta / T::real(2.0));
            for i in 0..2 {
                for j in 0..2 {
                    gen.e[i][j] += s[k].e[i][j] * f;
                }
            }
        }
        Self::from_traceless_exp(&gen)
    }
}

impl<T: Scalar> Mul for SL2C<T> {
    type Output = SL2C<T>;
    fn mul(self, r: SL2C<T>) -> SL2C<T> {
        SL2C(self.0 * r.0)
    }
}

impl<T: Scalar> Neg for SL2C<T> {
    type Output = SL2C<T>;
    fn neg(self) -> SL2C<T> {
        SL2C(self.0.scale(creal(-T::one())))
    }
}

/// A 4x4 real matrix of the restricted Lorentz group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzMatrix<T> {
    pub e: [[T; 4]; 4],
}

impl<T: Scalar> LorentzMatrix<T> {
    pub fn identity() -> Self {
        let mut e = [[T::zero(); 4]; 4];
        for i in 0..4 {
            e[i][i] = T::one();
        }
        LorentzMatrix { e }
    }

    pub fn apply(&self, x: &FourVector<T>) -> FourVector<T> {
        let mut out = [T::zero(); 4];
        for (mu, row) in self.e.iter().enumerate() {
            let mut acc = T::zero();
            for nu in 0..4 {
                acc += row[nu] * x.0[nu];
            }
            out[mu] = acc;
        }
        FourVector(out)
    }

    pub fn compose(&self, other: &Self) -> Self {
        let mut e = [[T::zero(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = T::zero();
                for k in 0..4 {
                    acc += self.e[i][k] * other.e[k][j];
                }
                e[i][j] = acc;
            }
        }
        LorentzMatrix { e }
    }

    /// Inverse via `Lambda^{-1} = eta Lambda^T eta`.
    pub fn inverse(&self) -> Self {
        let mut e = [[T::zero(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let sign = if (i == 0) == (j == 0) { T::one() } else { -T::one() };
                e[i][j] = sign * self.e[j][i];
            }
        }
        LorentzMatrix { e }
    }

    /// Residual of `Lambda^T eta Lambda = eta`.
    pub fn metric_residual(&self) -> T {
        let mut worst = T::zero();
        for mu in 0..4 {
            for nu in 0..4 {
                let mut acc = T::zero();
                for k in 0..4 {
                    let eta_k = if k == 0 { T::one() } else { -T::one() };
                    acc += self.e[k][mu] * eta_k * self.e[k][nu];
                }
                let expect = if mu != nu {
                    T::zero()
                } else if mu == 0 {
                    T::one()
                } else {
                    -T::one()
                };
                worst = worst.max((acc - expect).abs());
            }
        }
        worst
    }

    pub fn det(&self) -> T {
        // Cofactor expansion along the first row.
        fn det3<T: Scalar>(m: [[T; 3]; 3]) -> T {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        let mut acc = T::zero();
        for j in 0..4 {
            let mut minor = [[T::zero(); 3]; 3];
            for (r, row) in self.e[1..].iter().enumerate() {
                let mut cc = 0;
                for (c, v) in row.iter().enumerate() {
                    if c == j {
                        continue;
                    }
                    minor[r][cc] = *v;
                    cc += 1;
                }
            }
            let sign = if j % 2 == 0 { T::one() } else { -T::one() };
            acc += sign * self.e[0][j] * det3(minor);
        }
        acc
    }

    /// Member of the restricted group: metric-preserving, det 1, orthochronous.
    /// Each defect is normalized by the power of the matrix scale entering it,
    /// so the residual reads as a relative error for large boosts.
    pub fn restricted_residual(&self) -> T {
        let ortho = if self.e[0][0] >= T::one() {
            T::zero()
        } else {
            T::one() - self.e[0][0]
        };
        let scale = T::one().max(self.max_abs());
        let s2 = scale * scale;
        (self.metric_residual() / s2)
            .max((self.det() - T::one()).abs() / (s2 * s2))
            .max(ortho)
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for row in &self.e {
            for v in row {
                m = m.max(v.abs());
            }
        }
        m
    }

    /// Scale-relative version of [`Self::max_abs_diff`].
    pub fn relative_diff(&self, other: &Self) -> T {
        let scale = T::one().max(self.max_abs()).max(other.max_abs());
        self.max_abs_diff(other) / scale
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.e[i][j] - other.e[i][j]).abs());
            }
        }
        m
    }

    /// The spatial 3x3 block.
    pub fn spatial_block(&self) -> [[T; 3]; 3] {
        let mut b = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i][j] = self.e[i + 1][j + 1];
            }
        }
        b
    }

    /// Residual against being a pure spatial rotation.
    pub fn rotation_residual(&self) -> T {
        let mut worst = (self.e[0][0] - T::one()).abs();
        for k in 1..4 {
            worst = worst.max(self.e[0][k].abs()).max(self.e[k][0].abs());
        }
        worst.max(self.metric_residual())
    }
}

/// The covering homomorphism `lambda: SL(2,C) -> restricted Lorentz group`,
/// read off column by column from `A (e_nu)_her A^dag`.
pub fn covering_map<T: Scalar>(a: &SL2C<T>) -> LorentzMatrix<T> {
    let m = *a.mat();
    let mdag = m.adjoint();
    let mut e = [[T::zero(); 4]; 4];
    for nu in 0..4 {
        let x = to_hermitian(&FourVector::<T>::basis(nu));
        let y = m * x * mdag;
        let col = from_hermitian_unchecked(&y);
        for mu in 0..4 {
            e[mu][nu] = col.0[mu];
        }
    }
    LorentzMatrix { e }
}
