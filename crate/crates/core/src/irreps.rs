//! Finite-dimensional representations `D^(s,0)`, `D^(0,s)` of SL(2,C) and the
//! generalized sigma/gamma matrices.
//!
//! `D^(s,0)(A)` is realized on the space of degree-2s homogeneous polynomials
//! in two spinor variables `u, v`, in the orthonormal monomial basis
//! `u^{s+lam} v^{s-lam} / sqrt((s+lam)!(s-lam)!)`, ordered `lam = s` down to
//! `-s`. Matrix elements come from the binomial expansion of
//! `(a u + c v), (b u + d v)`; this is exact for SU(2) and SL(2,C) alike,
//! restricts to the canonical unitary irrep on SU(2), and reduces to `A`
//! itself at `s = 1/2`.

use crate::error::{Error, Result};
use crate::linalg::{CMat, Mat2};
use crate::minkowski::{hat, to_hermitian, FourVector, SL2C};
use crate::scalar::{creal, czero, factorial, Scalar, C};
use num_complex::Complex;

/// Spin stored as a non-negative integer `2s`, so half-integers are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinLabel {
    twice_s: u32,
}

/// Largest supported `2s`; factorials stay exactly representable and the
/// polarization systems stay small.
pub const MAX_TWICE_SPIN: u32 = 12;

impl SpinLabel {
    pub fn from_twice(twice_s: u32) -> Result<Self> {
        if twice_s > MAX_TWICE_SPIN {
            return Err(Error::InvalidSpin(format!(
                "twice_s = {twice_s} exceeds the supported maximum {MAX_TWICE_SPIN}"
            )));
        }
        Ok(SpinLabel { twice_s })
    }

    pub fn twice(&self) -> u32 {
        self.twice_s
    }

    /// Dimension `2s + 1` of the carrier space.
    pub fn dim(&self) -> usize {
        self.twice_s as usize + 1
    }

    /// Basis labels `2*lambda`, ordered `s` down to `-s`.
    pub fn two_lambdas(&self) -> impl Iterator<Item = i32> + '_ {
        let n = self.twice_s as i32;
        (0..=n).map(move |i| n - 2 * i)
    }

    /// Row/column index of the basis vector with given `2*lambda`.
    pub fn index_of(&self, two_lambda: i32) -> usize {
        ((self.twice_s as i32 - two_lambda) / 2) as usize
    }
}

/// The symmetric-power functor `Sym^{2s}` applied to an arbitrary 2x2 matrix,
/// in the normalized monomial basis. Multiplicative: `sym_power(M N) =
/// sym_power(M) sym_power(N)`; homogeneous of degree `2s` in the entries.
pub fn sym_power<T: Scalar>(twice_s: u32, m: &Mat2<T>) -> CMat<T> {
    let n = twice_s as usize;
    let dim = n + 1;
    let a = m.e[0][0];
    let b = m.e[0][1];
    let c = m.e[1][0];
    let d = m.e[1][1];
    // powers up to n of each entry
    let pow = |z: C<T>| -> Vec<C<T>> {
        let mut v = Vec::with_capacity(n + 1);
        let mut acc = creal(T::one());
        for _ in 0..=n {
            v.push(acc);
            acc *= z;
        }
        v
    };
    let (pa, pb, pc, pd) = (pow(a), pow(b), pow(c), pow(d));
    let binom = |n: u32, k: u32| -> T { factorial::<T>(n) / (factorial::<T>(k) * factorial::<T>(n - k)) };
    let mut out = CMat::zeros(dim, dim);
    // column j corresponds to k = n - j u's in the source monomial,
    // row i to k' = n - i in the target.
    for j in 0..dim {
        let k = n - j;
        for i in 0..dim {
            let kp = n - i;
            // coefficient of u^{kp} v^{n-kp} in (a u + c v)^k (b u + d v)^{n-k}
            let mut coeff: C<T> = czero();
            for acnt in 0..=k.min(kp) {
                let bcnt = kp - acnt;
                if bcnt > n - k {
                    continue;
                }
                let term = creal(binom(k as u32, acnt as u32) * binom((n - k) as u32, bcnt as u32))
                    * pa[acnt]
                    * pc[k - acnt]
                    * pb[bcnt]
                    * pd[n - k - bcnt];
                coeff += term;
            }
            let norm = (factorial::<T>(kp as u32) * factorial::<T>((n - kp) as u32)
                / (factorial::<T>(k as u32) * factorial::<T>((n - k) as u32)))
            .sqrt();
            out[(i, j)] = coeff * creal(norm);
        }
    }
    out
}

/// `D^(s,0)(A)`, the holomorphic extension of the spin-s irrep to SL(2,C).
pub fn spin_rep<T: Scalar>(s: SpinLabel, a: &SL2C<T>) -> CMat<T> {
    sym_power(s.twice(), a.mat())
}

/// `D^(0,s)(A) = D^(s,0)(hat(A)) = (D^(s,0)(A)^dag)^{-1}`.
pub fn hat_rep<T: Scalar>(s: SpinLabel, a: &SL2C<T>) -> CMat<T> {
    sym_power(s.twice(), a.hat().mat())
}

/// Angular momentum matrices `(J_1, J_2, J_3)` in the canonical spin-s basis,
/// built from the standard ladder coefficients.
pub fn spin_j_matrices<T: Scalar>(s: SpinLabel) -> [CMat<T>; 3] {
    let dim = s.dim();
    let n = s.twice() as i32;
    let mut jp = CMat::zeros(dim, dim);
    for tl in (-n..n).step_by(2) {
        // J+ |lam> = sqrt((s - lam)(s + lam + 1)) |lam + 1>
        let coeff = T::real(((n - tl) as f64 * (n + tl + 2) as f64) / 4.0).sqrt();
        jp[(s.index_of(tl + 2), s.index_of(tl))] = creal(coeff);
    }
    let jm = jp.adjoint();
    let half = creal(T::real(0.5));
    let ihalf = Complex::new(T::zero(), T::real(-0.5));
    let j1 = (&jp + &jm).scale(half);
    let j2 = (&jp - &jm).scale(ihalf);
    let mut j3 = CMat::zeros(dim, dim);
    for tl in s.two_lambdas() {
        j3[(s.index_of(tl), s.index_of(tl))] = creal(T::real(tl as f64 / 2.0));
    }
    [j1, j2, j3]
}

/// Exponent multi-indices `alpha` with `|alpha| = degree` over four variables,
/// in a fixed deterministic order.
pub fn symmetric_monomials(degree: u32) -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    let d = degree as i32;
    for a0 in (0..=d).rev() {
        for a1 in (0..=d - a0).rev() {
            for a2 in (0..=d - a0 - a1).rev() {
                let a3 = d - a0 - a1 - a2;
                out.push([a0 as u8, a1 as u8, a2 as u8, a3 as u8]);
            }
        }
    }
    out
}

/// Number of distinct orderings of the multiset `alpha` (multinomial).
pub fn monomial_multiplicity(alpha: &[u8; 4]) -> u64 {
    let n: u32 = alpha.iter().map(|&x| x as u32).sum();
    let mut num = 1u64;
    for k in 2..=n as u64 {
        num *= k;
    }
    let mut den = 1u64;
    for &a in alpha {
        for k in 2..=a as u64 {
            den *= k;
        }
    }
    num / den
}

/// Coefficient tensors of `D^(s)` as a degree-2s polynomial in the momentum.
///
/// `coeffs[m]` is the matrix coefficient of the monomial
/// `prod_mu (p^mu)^{alpha_mu}` in `D^(s)(p_her)`, and `hat_coeffs[m]` the same
/// for `D^(s)(hat(p_her))`; contraction with the monomials in the
/// contravariant components reproduces the matrices exactly. The upper-index
/// symmetric tensors (the family contracting covariant `p_mu`) are exposed
/// by [`GeneralizedSigma::tensor_upper`].
#[derive(Clone, Debug)]
pub struct GeneralizedSigma<T> {
    pub spin: SpinLabel,
    pub monomials: Vec<[u8; 4]>,
    pub coeffs: Vec<CMat<T>>,
    pub hat_coeffs: Vec<CMat<T>>,
}

fn monomial_value<T: Scalar>(p: &FourVector<T>, alpha: &[u8; 4]) -> T {
    let mut acc = T::one();
    for mu in 0..4 {
        for _ in 0..alpha[mu] {
            acc *= p[mu];
        }
    }
    acc
}

/// Extract the sigma and hat-sigma coefficient families by polarization:
/// evaluate `D^(s)` of the hermitian encoding on the unisolvent simplex
/// lattice `(1, b1, b2, b3)`, `b >= 0`, `|b| <= 2s`, and solve the integer
/// linear system for the monomial coefficients.
pub fn extract_sigma<T: Scalar>(s: SpinLabel) -> Result<GeneralizedSigma<T>> {
    let degree = s.twice();
    let monomials = symmetric_monomials(degree);
    let count = monomials.len();
    let dim = s.dim();

    // Nodes: dehomogenized principal lattice of the simplex.
    let mut nodes: Vec<FourVector<T>> = Vec::with_capacity(count);
    let d = degree as i32;
    for b1 in 0..=d {
        for b2 in 0..=d - b1 {
            for b3 in 0..=d - b1 - b2 {
                nodes.push(FourVector::new(
                    T::one(),
                    T::real(b1 as f64),
                    T::real(b2 as f64),
                    T::real(b3 as f64),
                ));
            }
        }
    }
    debug_assert_eq!(nodes.len(), count);

    let mut system = CMat::zeros(count, count);
    for (r, node) in nodes.iter().enumerate() {
        for (c, alpha) in monomials.iter().enumerate() {
            system[(r, c)] = creal(monomial_value(node, alpha));
        }
    }

    // One right-hand-side column per matrix entry, for both families.
    let entries = dim * dim;
    let mut rhs = CMat::zeros(count, 2 * entries);
    for (r, node) in nodes.iter().enumerate() {
        let ph = to_hermitian(node);
        let dmat = sym_power(degree, &ph);
        let dhat = sym_power(degree, &hat(&ph));
        for i in 0..dim {
            for j in 0..dim {
                rhs[(r, i * dim + j)] = dmat[(i, j)];
                rhs[(r, entries + i * dim + j)] = dhat[(i, j)];
            }
        }
    }
    let sol = system.solve(&rhs).map_err(|_| Error::SingularPolarization)?;

    let mut coeffs = Vec::with_capacity(count);
    let mut hat_coeffs = Vec::with_capacity(count);
    for m in 0..count {
        let mut cm = CMat::zeros(dim, dim);
        let mut hm = CMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                cm[(i, j)] = sol[(m, i * dim + j)];
                hm[(i, j)] = sol[(m, entries + i * dim + j)];
            }
        }
        coeffs.push(cm);
        hat_coeffs.push(hm);
    }
    Ok(GeneralizedSigma {
        spin: s,
        monomials,
        coeffs,
        hat_coeffs,
    })
}

impl<T: Scalar> GeneralizedSigma<T> {
    /// `sum_alpha coeff_alpha prod (p^mu)^alpha = D^(s)(p_her)`.
    pub fn contract(&self, p: &FourVector<T>) -> CMat<T> {
        let dim = self.spin.dim();
        let mut out = CMat::zeros(dim, dim);
        for (alpha, coeff) in self.monomials.iter().zip(&self.coeffs) {
            let v = creal(monomial_value(p, alpha));
            out = &out + &coeff.scale(v);
        }
        out
    }

    /// Same contraction for the hat family, `= D^(s)(hat(p_her))`.
    pub fn contract_hat(&self, p: &FourVector<T>) -> CMat<T> {
        let dim = self.spin.dim();
        let mut out = CMat::zeros(dim, dim);
        for (alpha, coeff) in self.monomials.iter().zip(&self.hat_coeffs) {
            let v = creal(monomial_value(p, alpha));
            out = &out + &coeff.scale(v);
        }
        out
    }

    /// Entry of the totally symmetric upper-index tensor `sigma^{mu_1...mu_2s}`
    /// (the family contracting covariant components): the monomial coefficient
    /// divided by the multiset multiplicity, with one metric sign per spatial
    /// index.
    pub fn tensor_upper(&self, m: usize, hat_family: bool) -> CMat<T> {
        let alpha = &self.monomials[m];
        let spatial: u32 = (alpha[1] as u32) + (alpha[2] as u32) + (alpha[3] as u32);
        let sign = if spatial.is_multiple_of(2) { T::one() } else { -T::one() };
        let mult = T::real(monomial_multiplicity(alpha) as f64);
        let base = if hat_family {
            &self.hat_coeffs[m]
        } else {
            &self.coeffs[m]
        };
        base.scale(creal(sign / mult))
    }
}

/// Generalized Dirac matrices: block matrices of size `2(2s+1)` with the
/// sigma family in the upper-right block and the hat family in the
/// lower-left, one for each symmetric multi-index.
#[derive(Clone, Debug)]
pub struct GammaSet<T> {
    pub spin: SpinLabel,
    pub sigma: GeneralizedSigma<T>,
}

pub fn gamma_matrices<T: Scalar>(s: SpinLabel) -> Result<GammaSet<T>> {
    Ok(GammaSet {
        spin: s,
        sigma: extract_sigma(s)?,
    })
}

impl<T: Scalar> GammaSet<T> {
    pub fn block_dim(&self) -> usize {
        2 * self.spin.dim()
    }

    fn assemble(&self, upper_right: &CMat<T>, lower_left: &CMat<T>) -> CMat<T> {
        let d = self.spin.dim();
        let mut out = CMat::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                out[(i, d + j)] = upper_right[(i, j)];
                out[(d + i, j)] = lower_left[(i, j)];
            }
        }
        out
    }

    /// Block gamma for one monomial, as coefficient of the contravariant
    /// monomial (see [`GeneralizedSigma::coeffs`]).
    pub fn coeff(&self, m: usize) -> CMat<T> {
        self.assemble(&self.sigma.coeffs[m], &self.sigma.hat_coeffs[m])
    }

    /// Upper-index symmetric tensor entry `gamma^{mu_1...mu_2s}`.
    pub fn tensor_upper(&self, m: usize) -> CMat<T> {
        self.assemble(
            &self.sigma.tensor_upper(m, false),
            &self.sigma.tensor_upper(m, true),
        )
    }

    /// Full contraction with a momentum:
    /// `[[0, D(p_her)], [D(hat(p_her)), 0]]`.
    pub fn contract(&self, p: &FourVector<T>) -> CMat<T> {
        self.assemble(&self.sigma.contract(p), &self.sigma.contract_hat(p))
    }

    /// The four upper-index Dirac matrices for `s = 1/2` (chiral basis).
    pub fn dirac_gammas(&self) -> Option<[CMat<T>; 4]> {
        if self.spin.twice() != 1 {
            return None;
        }
        let mut out: Vec<CMat<T>> = Vec::with_capacity(4);
        for mu in 0..4 {
            let mut alpha = [0u8; 4];
            alpha[mu] = 1;
            let m = self
                .sigma
                .monomials
                .iter()
                .position(|a| *a == alpha)
                .expect("degree-1 monomial present");
            out.push(self.tensor_upper(m));
        }
        Some([
            out[0].clone(),
            out[1].clone(),
            out[2].clone(),
            out[3].clone(),
        ])
    }
}
