//! Exact root-of-unity arithmetic for the finite Mackey checks.
//!
//! Character values of finite abelian groups are roots of unity, stored as
//! reduced rational phases `e^{2 pi i num/den}`. Sums of such values live in
//! the ring of cyclotomic integers `Z[zeta_N]`; equality tests reduce the
//! integer coefficient vector modulo the N-th cyclotomic polynomial, so the
//! assertions "character norm = |G|" and "inner product = 0" are exact.

use crate::scalar::{cis, Scalar, C};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The exact root of unity `e^{2 pi i num / den}`, reduced, `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootPhase {
    num: u64,
    den: u64,
}

impl RootPhase {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0);
        let num = num.rem_euclid(den as i64) as u64;
        let g = gcd(num, den).max(1);
        let (num, den) = (num / g, den / g);
        if num == 0 {
            RootPhase { num: 0, den: 1 }
        } else {
            RootPhase { num, den }
        }
    }

    pub fn one() -> Self {
        RootPhase { num: 0, den: 1 }
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    /// Multiplicative order (the reduced denominator).
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn mul(&self, other: &RootPhase) -> RootPhase {
        let den = self.den / gcd(self.den, other.den) * other.den;
        let num = self.num * (den / self.den) + other.num * (den / other.den);
        RootPhase::new(num as i64, den)
    }

    pub fn conj(&self) -> RootPhase {
        RootPhase::new(-(self.num as i64), self.den)
    }

    pub fn pow(&self, k: u64) -> RootPhase {
        RootPhase::new((self.num * (k % self.den)) as i64, self.den)
    }

    pub fn value<T: Scalar>(&self) -> C<T> {
        cis(T::real(2.0 * std::f64::consts::PI * self.num as f64 / self.den as f64))
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Integer polynomial division `num / den` with monic divisor; returns the
/// remainder coefficients.
fn poly_rem(mut num: Vec<i64>, den: &[i64]) -> Vec<i64> {
    let d = den.len() - 1;
    debug_assert_eq!(den[d], 1, "divisor must be monic");
    while num.len() > d {
        let lead = *num.last().unwrap();
        let k = num.len() - 1 - d;
        if lead != 0 {
            for (i, c) in den.iter().enumerate() {
                num[k + i] -= lead * c;
            }
        }
        num.pop();
    }
    num
}

fn poly_divide_exact(num: Vec<i64>, den: &[i64]) -> Vec<i64> {
    let d = den.len() - 1;
    let mut num = num;
    let mut quot = vec![0i64; num.len().saturating_sub(d)];
    while num.len() > d {
        let lead = *num.last().unwrap();
        let k = num.len() - 1 - d;
        quot[k] = lead;
        if lead != 0 {
            for (i, c) in den.iter().enumerate() {
                num[k + i] -= lead * c;
            }
        }
        num.pop();
    }
    debug_assert!(num.iter().all(|&c| c == 0), "division not exact");
    quot
}

/// N-th cyclotomic polynomial over the integers, computed by dividing
/// `X^N - 1` by the cyclotomic polynomials of the proper divisors.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    let mut out = num;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_polynomial(d);
            out = poly_divide_exact(out, &phi_d);
        }
    }
    out
}

/// Element of `Z[zeta_N]` as an integer coefficient vector over
/// `1, zeta, ..., zeta^{N-1}`.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    pub order: u64,
    pub coeffs: Vec<i64>,
}

impl Cyclotomic {
    pub fn zero(order: u64) -> Self {
        Cyclotomic {
            order,
            coeffs: vec![0; order as usize],
        }
    }

    pub fn from_phase(p: &RootPhase, order: u64) -> Self {
        assert_eq!(order % p.order(), 0, "phase does not embed in Z[zeta_N]");
        let mut c = Self::zero(order);
        c.coeffs[(p.num() * (order / p.order())) as usize % order as usize] = 1;
        c
    }

    pub fn add_assign(&mut self, other: &Cyclotomic) {
        assert_eq!(self.order, other.order);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn mul(&self, other: &Cyclotomic) -> Cyclotomic {
        assert_eq!(self.order, other.order);
        let n = self.order as usize;
        let mut out = Cyclotomic::zero(self.order);
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if *b == 0 {
                    continue;
                }
                out.coeffs[(i + j) % n] += a * b;
            }
        }
        out
    }

    pub fn conj(&self) -> Cyclotomic {
        let n = self.order as usize;
        let mut out = Cyclotomic::zero(self.order);
        for (i, a) in self.coeffs.iter().enumerate() {
            out.coeffs[(n - i) % n] += a;
        }
        out
    }

    /// Canonical residue modulo the N-th cyclotomic polynomial.
    fn reduced(&self) -> Vec<i64> {
        let phi = cyclotomic_polynomial(self.order);
        poly_rem(self.coeffs.clone(), &phi)
    }

    pub fn equals_integer(&self, m: i64) -> bool {
        let mut r = self.reduced();
        if r.is_empty() {
            return m == 0;
        }
        r[0] -= m;
        r.iter().all(|&c| c == 0)
    }

    pub fn value<T: Scalar>(&self) -> C<T> {
        let mut acc = C::new(T::zero(), T::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                let p = RootPhase::new(k as i64, self.order);
                acc += p.value::<T>() * C::new(T::real(*c as f64), T::zero());
            }
        }
        acc
    }
}

/// Least common multiple of phase orders, used to choose N.
pub fn common_order<'a>(phases: impl Iterator<Item = &'a RootPhase>) -> u64 {
    phases.fold(1u64, |acc, p| lcm(acc, p.order()))
}
