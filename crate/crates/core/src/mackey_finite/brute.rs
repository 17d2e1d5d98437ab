//! Brute-force irreducible representations of a finite group, used as the
//! independent oracle against the induced-representation construction.
//!
//! The regular representation is block-diagonalized through the eigenspaces
//! of a random group-averaged hermitian operator: averaging makes the
//! operator commute with the representation, so its eigenspaces are invariant
//! subspaces, and for a generic starting matrix each eigenspace carries a
//! single irreducible, with every irreducible of dimension `d` appearing `d`
//! times. Duplicates are merged by comparing characters.

use super::{FiniteGroup, UnitaryRep};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::{creal, Scalar};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Permutation matrices of the left regular representation.
pub fn regular_representation<T: Scalar>(group: &FiniteGroup) -> UnitaryRep<T> {
    let n = group.order();
    let mats = (0..n)
        .map(|g| {
            let mut m = CMat::zeros(n, n);
            for h in 0..n {
                m[(group.mul(g, h), h)] = creal(T::one());
            }
            m
        })
        .collect();
    UnitaryRep { dim: n, mats }
}

fn random_hermitian<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat<T> {
    let mut h = CMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z = Complex::new(
                T::real(rng.random_range(-1.0..1.0)),
                T::real(rng.random_range(-1.0..1.0)),
            );
            if i == j {
                h[(i, j)] = Complex::new(z.re, T::zero());
            } else {
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
    }
    h
}

/// All irreducible unitary representations of `group`, up to equivalence.
pub fn brute_force_irreps<T: Scalar>(group: &FiniteGroup, seed: u64) -> Result<Vec<UnitaryRep<T>>> {
    let n = group.order();
    let reg = regular_representation::<T>(group);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    'attempt: for _attempt in 0..8 {
        let m = random_hermitian::<T, _>(n, &mut rng);
        // group average: commutes with the regular representation
        let mut avg = CMat::zeros(n, n);
        for g in 0..n {
            let rg = &reg.mats[g];
            let rginv = &reg.mats[group.inverse(g)];
            avg = &avg + &(&(rg * &m) * rginv);
        }
        avg = avg.scale(creal(T::one() / T::real(n as f64)));

        let (evals, evecs) = avg.hermitian_eigen();
        // cluster eigenvalues
        let tol = T::real(1e-8);
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for (i, ev) in evals.iter().enumerate() {
            match clusters.last_mut() {
                Some(c) if (*ev - evals[c[c.len() - 1]]).abs() < tol => c.push(i),
                _ => clusters.push(vec![i]),
            }
        }

        let mut reps: Vec<UnitaryRep<T>> = Vec::new();
        for cluster in &clusters {
            let d = cluster.len();
            let q = CMat::from_fn(n, d, |r, c| evecs[(r, cluster[c])]);
            let qdag = q.adjoint();
            let mats: Vec<CMat<T>> = (0..n).map(|g| &(&qdag * &reg.mats[g]) * &q).collect();
            let sub = UnitaryRep { dim: d, mats };
            // invariance of the eigenspace
            let mut invariance = T::zero();
            for g in 0..n {
                let lhs = &reg.mats[g] * &q;
                let rhs = &q * &sub.mats[g];
                invariance = invariance.max(lhs.max_abs_diff(&rhs));
            }
            if invariance > T::real(1e-8) {
                continue 'attempt;
            }
            // irreducibility: character norm 1 (an accidental eigenvalue
            // collision merges irreducibles and fails this test)
            let norm = sub.character_inner(&sub);
            if (norm - creal(T::one())).norm() > T::real(1e-6) {
                continue 'attempt;
            }
            reps.push(sub);
        }

        // merge equivalent copies by character
        let mut unique: Vec<UnitaryRep<T>> = Vec::new();
        for rep in reps {
            let chi = rep.character();
            let dup = unique.iter().any(|u| {
                u.character()
                    .iter()
                    .zip(&chi)
                    .map(|(a, b)| (*a - *b).norm())
                    .fold(T::zero(), |x, y| x.max(y))
                    < T::real(1e-6)
            });
            if !dup {
                unique.push(rep);
            }
        }
        let sum_sq: usize = unique.iter().map(|r| r.dim * r.dim).sum();
        if sum_sq != n {
            continue 'attempt;
        }
        unique.sort_by_key(|r| r.dim);
        return Ok(unique);
    }
    Err(Error::NoConvergence(
        "random-invariant-operator decomposition kept producing degenerate spectra".into(),
    ))
}
