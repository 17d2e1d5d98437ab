//! Truncated Fock space, mode-sum quantum fields, and the numerical
//! spin-statistics verdict.
//!
//! The bracket kernel of the `2s+1`-component field,
//!
//! ```text
//! K_sigma(xi) = (2 pi)^-3 int dOmega_m D^(s)(p_her/m)
//!               [ e^{-i p.xi} + sigma e^{+i p.xi} ],
//! ```
//!
//! with `sigma = +1` for the anticommutator and `-1` for the commutator,
//! vanishes at spacelike separation exactly when `sigma (-1)^{2s} = -1`,
//! i.e. commutators for integer spin and anticommutators for half-integer
//! spin. The distributional statement is rendered at desk scale by Gaussian
//! damping `e^{-eps |p|^2}` with Richardson extrapolation `eps -> 0`; an
//! independent one-dimensional radial oracle (angular integral done
//! analytically) validates the three-dimensional pipeline for `s = 0`.

use crate::error::{Error, Result};
use crate::irreps::{sym_power, SpinLabel};
use crate::linalg::CMat;
use crate::minkowski::{covering_map, epsilon, minkowski_dot, to_hermitian, FourVector};
use crate::orbits::{boost, polar_angles, su2_from_polar, wigner_rotation, BoostChoice, MassShell};
use crate::scalar::{cis, creal, czero, geom_tol, Scalar, C};
use crate::wigner_rep::MomentumGrid;
use crate::wigner_rep::{gauss_legendre, PoincareElement};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

// ---------------------------------------------------------------------------
// one-dimensional radial oracle (built before the 3-D pipeline)
// ---------------------------------------------------------------------------

/// Sign of the operator bracket: `-1` commutator, `+1` anticommutator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BracketSign {
    Commutator,
    Anticommutator,
}

impl BracketSign {
    pub fn sigma<T: Scalar>(&self) -> T {
        match self {
            BracketSign::Commutator => -T::one(),
            BracketSign::Anticommutator => T::one(),
        }
    }

    /// The sign for which the spin-s kernel is local:
    /// `sigma (-1)^{2s} = -1`.
    pub fn locality_compatible(spin: SpinLabel) -> BracketSign {
        if spin.twice().is_multiple_of(2) {
            BracketSign::Commutator
        } else {
            BracketSign::Anticommutator
        }
    }

    pub fn opposite(&self) -> BracketSign {
        match self {
            BracketSign::Commutator => BracketSign::Anticommutator,
            BracketSign::Anticommutator => BracketSign::Commutator,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BracketSign::Commutator => "commutator",
            BracketSign::Anticommutator => "anticommutator",
        }
    }
}

/// Adaptive Simpson quadrature on `[a, b]`.
fn adaptive_simpson<T: Scalar>(f: &dyn Fn(T) -> C<T>, a: T, b: T, tol: T, depth: usize) -> C<T> {
    fn simpson<T: Scalar>(f: &dyn Fn(T) -> C<T>, a: T, b: T) -> C<T> {
        let mid = (a + b) / T::real(2.0);
        (f(a) + f(mid) * creal(T::real(4.0)) + f(b)) * creal((b - a) / T::real(6.0))
    }
    fn recurse<T: Scalar>(
        f: &dyn Fn(T) -> C<T>,
        a: T,
        b: T,
        whole: C<T>,
        tol: T,
        depth: usize,
    ) -> C<T> {
        let mid = (a + b) / T::real(2.0);
        let left = simpson(f, a, mid);
        let right = simpson(f, mid, b);
        let diff = left + right - whole;
        if depth == 0 || diff.norm() < T::real(15.0) * tol {
            left + right + diff * creal(T::one() / T::real(15.0))
        } else {
            let half = tol / T::real(2.0);
            recurse(f, a, mid, left, half, depth - 1) + recurse(f, mid, b, right, half, depth - 1)
        }
    }
    let whole = simpson(f, a, b);
    recurse(f, a, b, whole, tol, depth)
}

/// Momentum cutoff where the Gaussian damping has decayed to
/// `e^{-sigma_decades}`.
fn damped_cutoff<T: Scalar>(eps_abs: T, sigma_decades: T) -> T {
    (sigma_decades / eps_abs).sqrt()
}

/// One-dimensional radial oracle for the `s = 0` damped bracket kernel: the
/// angular integral is done analytically, leaving
/// `(4 pi / (2 pi)^3) int dp p^2/(2E) sinc(p r) [e^{-iEt} + sigma e^{iEt}]
/// e^{-eps p^2}`, evaluated by adaptive quadrature.
pub fn radial_oracle_s0<T: Scalar>(
    mass: T,
    xi: &FourVector<T>,
    sign: BracketSign,
    eps_abs: T,
) -> C<T> {
    let t = xi.t();
    let r = xi.spatial_norm();
    let sigma = sign.sigma::<T>();
    let p_cut = damped_cutoff(eps_abs, T::real(42.0));
    let pref = T::real(4.0 * std::f64::consts::PI / (2.0 * std::f64::consts::PI).powi(3));
    let integrand = move |p: T| -> C<T> {
        let e = (mass * mass + p * p).sqrt();
        let sinc = if (p * r).abs() < T::real(1e-8) {
            T::one()
        } else {
            (p * r).sin() / (p * r)
        };
        let osc = cis(-e * t) + cis(e * t) * creal(sigma);
        osc * creal(pref * p * p / (T::real(2.0) * e) * sinc * (-eps_abs * p * p).exp())
    };
    adaptive_simpson(&integrand, T::zero(), p_cut, T::real(1e-12), 28)
}

/// Polynomial (Neville) extrapolation of tabulated values to `x = 0`.
pub fn richardson_zero<T: Scalar>(points: &[(T, C<T>)]) -> C<T> {
    let n = points.len();
    let mut table: Vec<C<T>> = points.iter().map(|(_, v)| *v).collect();
    let xs: Vec<T> = points.iter().map(|(x, _)| *x).collect();
    for level in 1..n {
        for i in 0..n - level {
            let xi = xs[i];
            let xj = xs[i + level];
            let num = table[i + 1] * creal(xi) - table[i] * creal(xj);
            table[i] = num * creal(T::one() / (xi - xj));
        }
    }
    table[0]
}

/// Damped 1-D oracle extrapolated over the eps sequence (units `1/m^2`).
pub fn radial_oracle_extrapolated<T: Scalar>(
    mass: T,
    xi: &FourVector<T>,
    sign: BracketSign,
    eps_seq: &[T],
) -> C<T> {
    let pts: Vec<(T, C<T>)> = eps_seq
        .iter()
        .map(|eh| {
            let eps_abs = *eh / (mass * mass);
            (*eh, radial_oracle_s0(mass, xi, sign, eps_abs))
        })
        .collect();
    richardson_zero(&pts)
}

// ---------------------------------------------------------------------------
// three-dimensional kernel quadrature
// ---------------------------------------------------------------------------

/// Configuration of the damped oscillatory-kernel quadrature.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelConfig<T> {
    /// Damping parameters in units of `1/m^2`, ordered decreasing.
    pub eps_seq: Vec<T>,
    /// Lower bounds for the node counts; the rule scales them up with the
    /// oscillation bandwidth `p_cut * |xi|`.
    pub base_radial: usize,
    pub base_theta: usize,
    pub base_phi: usize,
    /// Damping decades retained before the radial cutoff.
    pub decay_decades: T,
    /// Scale the damping sequence with the squared distance to the light
    /// cone (see [`effective_eps_seq`]); without this the extrapolation
    /// noise of the super-polynomially decaying right-statistics kernel
    /// swamps the locality signal at small separations.
    pub adapt_separation: bool,
}

impl<T: Scalar> Default for KernelConfig<T> {
    fn default() -> Self {
        KernelConfig {
            eps_seq: vec![T::real(0.2), T::real(0.1), T::real(0.05), T::real(0.025)],
            base_radial: 48,
            base_theta: 24,
            base_phi: 8,
            decay_decades: T::real(42.0),
            adapt_separation: true,
        }
    }
}

/// Characteristic invariant length of a separation: the distance to the
/// light cone for spacelike `xi`, the proper time for timelike `xi`.
pub fn characteristic_length<T: Scalar>(xi: &FourVector<T>) -> T {
    let r = xi.spatial_norm();
    let t = xi.t().abs();
    if r > t {
        r - t
    } else {
        minkowski_dot(xi, xi).abs().sqrt()
    }
}

/// The damping sequence actually used for a given separation: the base
/// sequence scaled by `min(1, (m L)^2 / 20)` with `L` the characteristic
/// length, so that the Gaussian smearing resolves the distance to the cone.
pub fn effective_eps_seq<T: Scalar>(cfg: &KernelConfig<T>, mass: T, xi: &FourVector<T>) -> Vec<T> {
    if !cfg.adapt_separation {
        return cfg.eps_seq.clone();
    }
    let l = characteristic_length(xi) * mass;
    let scale = (l * l / T::real(20.0)).min(T::one()).max(T::real(1e-4));
    cfg.eps_seq.iter().map(|e| *e * scale).collect()
}

fn bandwidth_nodes(base: usize, k: f64) -> usize {
    base.max((0.55 * k).ceil() as usize + 16)
}

/// Damped kernel at a single damping value:
/// `(2 pi)^-3 int dOmega_m D^(s)(p_her/m) [e^{-i p.xi} + sigma e^{i p.xi}]
/// e^{-eps |p|^2}`.
///
/// The quadrature runs in the frame where the spatial separation points
/// along z (the kernel transforms covariantly,
/// `K(Lambda_A xi) = D(A) K(xi) D(A)^dag`), which removes the azimuthal
/// oscillation.
pub fn bracket_kernel_damped<T: Scalar>(
    spin: SpinLabel,
    mass: T,
    xi: &FourVector<T>,
    sign: BracketSign,
    eps_hat: T,
    cfg: &KernelConfig<T>,
) -> CMat<T> {
    let eps_abs = eps_hat / (mass * mass);
    let p_cut = damped_cutoff(eps_abs, cfg.decay_decades);
    let r = xi.spatial_norm();
    let t = xi.t();
    let sigma = sign.sigma::<T>();

    let rot = if r > T::zero() {
        let (theta, phi) = polar_angles(xi.spatial());
        Some(su2_from_polar(theta, phi))
    } else {
        None
    };

    let band_r = (p_cut * (r + t.abs()) / T::real(2.0)).to_f64().unwrap_or(0.0);
    let band_c = (p_cut * r).to_f64().unwrap_or(0.0);
    let n_rad = bandwidth_nodes(cfg.base_radial, band_r);
    let n_theta = bandwidth_nodes(cfg.base_theta, band_c);
    let n_phi = cfg.base_phi.max(2 * spin.twice() as usize + 4);

    let (ru, rw) = gauss_legendre::<T>(n_rad);
    let (cu, cw) = gauss_legendre::<T>(n_theta);
    let dim = spin.dim();
    let mut acc = CMat::zeros(dim, dim);
    let pref = T::real(1.0 / (2.0 * std::f64::consts::PI).powi(3))
        * (T::real(2.0) * T::PI() / T::real(n_phi as f64));
    let half = T::real(0.5);
    for (u, wu) in ru.iter().zip(&rw) {
        let p = p_cut * (*u + T::one()) * half;
        let wp = *wu * p_cut * half;
        let e = (mass * mass + p * p).sqrt();
        let damp = (-eps_abs * p * p).exp();
        let radial_w = wp * p * p / (T::real(2.0) * e) * damp * pref;
        for (c, wc) in cu.iter().zip(&cw) {
            let sin_t = (T::one() - *c * *c).max(T::zero()).sqrt();
            // p . xi in the aligned frame
            let psi = e * t - p * *c * r;
            let osc = cis(-psi) + cis(psi) * creal(sigma);
            let weight = osc * creal(radial_w * *wc);
            for k in 0..n_phi {
                let phi = T::real(2.0 * std::f64::consts::PI * k as f64 / n_phi as f64);
                let pv = FourVector::new(e, p * sin_t * phi.cos(), p * sin_t * phi.sin(), p * *c);
                let d = sym_power(
                    spin.twice(),
                    &to_hermitian(&pv).scale(creal(T::one() / mass)),
                );
                acc = &acc + &d.scale(weight);
            }
        }
    }
    match rot {
        None => acc,
        Some(a) => {
            let da = sym_power(spin.twice(), a.mat());
            &(&da * &acc) * &da.adjoint()
        }
    }
}

/// Kernel values across the damping sequence plus the Richardson limit.
#[derive(Clone, Debug)]
pub struct BracketResult<T> {
    pub per_eps: Vec<(T, CMat<T>)>,
    pub extrapolated: CMat<T>,
    /// Difference between extrapolating with and without the coarsest
    /// damping value, relative to the kernel scale.
    pub extrapolation_tail: T,
    pub converged: bool,
}

/// Damped-extrapolated evaluation of the bracket kernel.
pub fn bracket_kernel<T: Scalar>(
    spin: SpinLabel,
    mass: T,
    xi: &FourVector<T>,
    sign: BracketSign,
    cfg: &KernelConfig<T>,
) -> Result<BracketResult<T>> {
    if cfg.eps_seq.len() < 2 {
        return Err(Error::InvalidConfig("need at least two damping values".into()));
    }
    if !cfg
        .eps_seq
        .windows(2)
        .all(|w| w[1] > T::zero() && w[1] < w[0])
        || cfg.eps_seq[0] <= T::zero()
    {
        return Err(Error::InvalidConfig(
            "damping sequence must be positive and strictly decreasing".into(),
        ));
    }
    let eps_used = effective_eps_seq(cfg, mass, xi);
    let per_eps: Vec<(T, CMat<T>)> = eps_used
        .iter()
        .map(|eh| (*eh, bracket_kernel_damped(spin, mass, xi, sign, *eh, cfg)))
        .collect();
    let dim = spin.dim();
    let mut extrapolated = CMat::zeros(dim, dim);
    let mut shortened = CMat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let pts: Vec<(T, C<T>)> = per_eps.iter().map(|(e, m)| (*e, m[(i, j)])).collect();
            extrapolated[(i, j)] = richardson_zero(&pts);
            shortened[(i, j)] = richardson_zero(&pts[1..]);
        }
    }
    let scale = per_eps
        .iter()
        .map(|(_, m)| m.max_abs())
        .fold(T::zero(), |a, b| a.max(b))
        .max(T::real(1e-300));
    let tail = extrapolated.max_abs_diff(&shortened) / scale;
    Ok(BracketResult {
        per_eps,
        extrapolated,
        converged: tail < T::real(0.05),
        extrapolation_tail: tail,
    })
}

/// The Jordan-Pauli function evaluated through the kernel pipeline:
/// `i Delta(xi) = K_commutator(s = 0, xi)`; vanishes at spacelike `xi`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JordanPauliValue<T> {
    pub value: T,
    /// `|xi . xi|` fell below the configured floor: the distribution is
    /// singular on the light cone and the quadrature is unreliable there.
    pub light_cone_warning: bool,
}

pub fn jordan_pauli_delta<T: Scalar>(
    mass: T,
    xi: &FourVector<T>,
    cfg: &KernelConfig<T>,
    cone_floor: T,
) -> Result<JordanPauliValue<T>> {
    let s0 = SpinLabel::from_twice(0)?;
    let res = bracket_kernel(s0, mass, xi, BracketSign::Commutator, cfg)?;
    let k = res.extrapolated[(0, 0)];
    // i Delta = K, so Delta = -i K; the kernel is purely imaginary
    Ok(JordanPauliValue {
        value: k.im,
        light_cone_warning: minkowski_dot(xi, xi).abs() < cone_floor,
    })
}

/// One row of the spin-statistics scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictRow {
    pub twice_spin: u32,
    pub xi: [f64; 4],
    pub proper_distance: f64,
    pub local_sign: String,
    pub local_mags: Vec<f64>,
    pub nonlocal_mags: Vec<f64>,
    pub local_extrapolated: f64,
    pub nonlocal_extrapolated: f64,
    pub ratio: f64,
    pub monotone: bool,
    pub pass: bool,
}

/// Scan report: PASS iff for every spin and every point the wrong-statistics
/// kernel exceeds the right-statistics kernel by the required ratio and the
/// right-statistics magnitudes decrease monotonically along the damping
/// sequence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictReport {
    pub rows: Vec<VerdictRow>,
    pub required_ratio: f64,
    pub pass: bool,
    pub inconclusive: Vec<String>,
}

pub fn spin_statistics_verdict<T: Scalar>(
    twice_spins: &[u32],
    mass: T,
    points: &[FourVector<T>],
    cfg: &KernelConfig<T>,
    required_ratio: f64,
) -> Result<VerdictReport> {
    let mut rows = Vec::new();
    let mut inconclusive = Vec::new();
    for &twice in twice_spins {
        let spin = SpinLabel::from_twice(twice)?;
        let local = BracketSign::locality_compatible(spin);
        for xi in points {
            // deep sequence for the extrapolated ratio
            let k_local = bracket_kernel(spin, mass, xi, local, cfg)?;
            let k_wrong = bracket_kernel(spin, mass, xi, local.opposite(), cfg)?;
            // moderate sequence for the refinement diagnostic: the damping
            // exponent at the coarsest value is ~3 and doubles with each
            // halving, so every damped magnitude stays above the quadrature
            // noise floor and the decrease is visible step by step
            let mono_cfg = {
                let mut c = cfg.clone();
                c.adapt_separation = false;
                let l = characteristic_length(xi) * mass;
                let scale = (l * l / T::real(2.4)).max(T::real(1e-3));
                c.eps_seq = cfg.eps_seq.iter().map(|e| *e * scale).collect();
                c
            };
            let k_local_mono = bracket_kernel(spin, mass, xi, local, &mono_cfg)?;
            let k_wrong_mono = bracket_kernel(spin, mass, xi, local.opposite(), &mono_cfg)?;
            let local_mags: Vec<f64> = k_local_mono
                .per_eps
                .iter()
                .map(|(_, m)| m.max_abs().to_f64().unwrap_or(f64::NAN))
                .collect();
            let nonlocal_mags: Vec<f64> = k_wrong_mono
                .per_eps
                .iter()
                .map(|(_, m)| m.max_abs().to_f64().unwrap_or(f64::NAN))
                .collect();
            let le = k_local.extrapolated.max_abs().to_f64().unwrap_or(f64::NAN);
            let ne = k_wrong.extrapolated.max_abs().to_f64().unwrap_or(f64::NAN);
            let ratio = ne / le.max(1e-300);
            // strict decrease step by step, except once the magnitude has
            // reached the quadrature noise floor (exact-zero kernels, e.g.
            // the equal-time commutator, sit there from the start)
            let monotone = local_mags
                .iter()
                .zip(&nonlocal_mags)
                .map(|(l, n)| (*l, 1e-12 * n.max(1e-300)))
                .collect::<Vec<_>>()
                .windows(2)
                .all(|w| w[1].0 < w[0].0 || w[1].0 < w[1].1);
            if !k_wrong.converged {
                inconclusive.push(format!(
                    "twice_spin {twice} at xi = {:?}: nonlocal extrapolation tail {:.2e}",
                    xi,
                    k_wrong.extrapolation_tail.to_f64().unwrap_or(f64::NAN)
                ));
            }
            let pass = ratio > required_ratio && monotone;
            rows.push(VerdictRow {
                twice_spin: twice,
                xi: [
                    xi[0].to_f64().unwrap_or(f64::NAN),
                    xi[1].to_f64().unwrap_or(f64::NAN),
                    xi[2].to_f64().unwrap_or(f64::NAN),
                    xi[3].to_f64().unwrap_or(f64::NAN),
                ],
                proper_distance: (-minkowski_dot(xi, xi))
                    .to_f64()
                    .unwrap_or(f64::NAN)
                    .max(0.0)
                    .sqrt(),
                local_sign: local.label().to_string(),
                local_mags,
                nonlocal_mags,
                local_extrapolated: le,
                nonlocal_extrapolated: ne,
                ratio,
                monotone,
                pass,
            });
        }
    }
    let pass = rows.iter().all(|r| r.pass) && inconclusive.is_empty();
    Ok(VerdictReport {
        rows,
        required_ratio,
        pass,
        inconclusive,
    })
}

/// Bargmann-Wigner bracket kernel. The positive-frequency pair sum is
/// `M+(p) = (tensor_j B)(P_sym)(tensor_j B)^dag (tensor_j gamma^0)`
/// (`(gamma.p + m)/m` at `s = 1/2`); the negative-frequency solutions carry
/// the chirality twist `gamma^5 B`, giving
/// `M-(p) = (tensor_j gamma^5) M+(p) (tensor-conjugated)` = `(gamma.p - m)/m`
/// at `s = 1/2`, the standard `sum_lambda v vbar`;
/// `K_sigma(xi) = (2 pi)^-3 int dOmega_m [M+ e^{-i p.xi} + sigma M- e^{i p.xi}]
/// e^{-eps |p|^2}`.
pub fn bw_bracket_damped<T: Scalar>(
    spin: SpinLabel,
    mass: T,
    xi: &FourVector<T>,
    sign: BracketSign,
    eps_hat: T,
    cfg: &KernelConfig<T>,
) -> Result<CMat<T>> {
    let n = spin.twice() as usize;
    if n == 0 || n > 2 {
        return Err(Error::InvalidSpin(
            "Bargmann-Wigner brackets are provided for s = 1/2 and s = 1".into(),
        ));
    }
    let eps_abs = eps_hat / (mass * mass);
    let p_cut = damped_cutoff(eps_abs, cfg.decay_decades);
    let r = xi.spatial_norm();
    let rho = (xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
    let t = xi.t();
    let sigma = sign.sigma::<T>();
    let band_r = (p_cut * (r + t.abs()) / T::real(2.0)).to_f64().unwrap_or(0.0);
    let band_c = (p_cut * r).to_f64().unwrap_or(0.0);
    let band_phi = (p_cut * rho).to_f64().unwrap_or(0.0);
    let n_rad = bandwidth_nodes(cfg.base_radial, band_r);
    let n_theta = bandwidth_nodes(cfg.base_theta, band_c);
    let n_phi = bandwidth_nodes(cfg.base_phi, band_phi);

    // symmetric projector on (C^2)^{tensor n}
    let dim2 = 1usize << n;
    let mut proj = CMat::<T>::zeros(dim2, dim2);
    if n == 1 {
        proj = CMat::identity(2);
    } else {
        for a in 0..4usize {
            let (d0, d1) = (a % 2, (a / 2) % 2);
            let swapped = d1 + 2 * d0;
            proj[(a, a)] += creal(T::real(0.5));
            proj[(a, swapped)] += creal(T::real(0.5));
        }
    }
    let dim4 = 4usize.pow(n as u32);
    let (ru, rw) = gauss_legendre::<T>(n_rad);
    let (cu, cw) = gauss_legendre::<T>(n_theta);
    let mut acc = CMat::zeros(dim4, dim4);
    let pref = T::real(1.0 / (2.0 * std::f64::consts::PI).powi(3))
        * (T::real(2.0) * T::PI() / T::real(n_phi as f64));
    let half = T::real(0.5);
    let g0 = {
        let mut g = CMat::<T>::zeros(4, 4);
        g[(0, 2)] = creal(T::one());
        g[(1, 3)] = creal(T::one());
        g[(2, 0)] = creal(T::one());
        g[(3, 1)] = creal(T::one());
        g
    };
    let mut g0_big = g0.clone();
    let g5 = {
        // chiral basis: gamma^5 = diag(-1, -1, 1, 1) with the undotted block first
        let mut g = CMat::<T>::identity(4);
        g[(0, 0)] = creal(-T::one());
        g[(1, 1)] = creal(-T::one());
        g
    };
    let mut g5_big = g5.clone();
    for _ in 1..n {
        g0_big = g0_big.kron(&g0);
        g5_big = g5_big.kron(&g5);
    }
    for (u, wu) in ru.iter().zip(&rw) {
        let p = p_cut * (*u + T::one()) * half;
        let wp = *wu * p_cut * half;
        let e = (mass * mass + p * p).sqrt();
        let damp = (-eps_abs * p * p).exp();
        let radial_w = wp * p * p / (T::real(2.0) * e) * damp * pref;
        for (c, wc) in cu.iter().zip(&cw) {
            let sin_t = (T::one() - *c * *c).max(T::zero()).sqrt();
            for k in 0..n_phi {
                let phi = T::real(2.0 * std::f64::consts::PI * k as f64 / n_phi as f64);
                let pv = FourVector::new(e, p * sin_t * phi.cos(), p * sin_t * phi.sin(), p * *c);
                let psi = minkowski_dot(&pv, xi);
                let b = crate::fields::b_matrix(mass, &pv)?;
                let mut b_big = b.clone();
                for _ in 1..n {
                    b_big = b_big.kron(&b);
                }
                let pair = &(&b_big * &proj) * &b_big.adjoint();
                let m_plus = &pair * &g0_big;
                let m_minus = &(&(&g5_big * &pair) * &g5_big) * &g0_big;
                let w_plus = cis(-psi) * creal(radial_w * *wc);
                let w_minus = cis(psi) * creal(radial_w * *wc * sigma);
                acc = &acc + &m_plus.scale(w_plus);
                acc = &acc + &m_minus.scale(w_minus);
            }
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// truncated Fock space
// ---------------------------------------------------------------------------

/// Statistics of the mode set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistics {
    Bose,
    Fermi,
}

impl Statistics {
    pub fn bracket_sign(&self) -> BracketSign {
        match self {
            Statistics::Bose => BracketSign::Commutator,
            Statistics::Fermi => BracketSign::Anticommutator,
        }
    }
}

/// A finite set of `(node, 2 lambda)` mode labels on a grid.
#[derive(Clone, Debug)]
pub struct ModeSet<T> {
    pub grid: Arc<MomentumGrid<T>>,
    pub spin: SpinLabel,
    pub modes: Vec<(usize, i32)>,
    pub stat: Statistics,
    /// Boson occupation cutoff (ignored for fermions).
    pub n_max: usize,
}

impl<T: Scalar> ModeSet<T> {
    /// All `2s+1` helicity components at each listed node.
    pub fn at_nodes(
        grid: Arc<MomentumGrid<T>>,
        spin: SpinLabel,
        nodes: &[usize],
        stat: Statistics,
        n_max: usize,
    ) -> Result<Self> {
        let mut modes = Vec::new();
        for &i in nodes {
            for tl in spin.two_lambdas() {
                modes.push((i, tl));
            }
        }
        let set = ModeSet {
            grid,
            spin,
            modes,
            stat,
            n_max,
        };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::InvalidConfig("boson cutoff must be at least 1".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for m in &self.modes {
            if !seen.insert(*m) {
                return Err(Error::InvalidConfig("duplicate mode label".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mass(&self) -> Result<T> {
        match self.grid.shell {
            MassShell::Massive { mass } => Ok(mass),
            MassShell::Massless => Err(Error::InvalidConfig(
                "quantum fields are built over massive grids".into(),
            )),
        }
    }
}

/// Creation/annihilation operators of a truncated Fock space as explicit
/// matrices. Fermions: dimension `2^M`, exact CAR via Jordan-Wigner sign
/// strings. Bosons: dimension `(n_max+1)^M`, CCR exact below the occupation
/// cutoff with the defect confined to the top state.
#[derive(Clone, Debug)]
pub struct FockAlgebra<T> {
    pub stat: Statistics,
    pub n_modes: usize,
    pub n_max: usize,
    pub dim: usize,
    annihilators: Vec<CMat<T>>,
}

/// Hard bound on the Fock dimension.
pub const DEFAULT_FOCK_DIM_BOUND: usize = 4096;

pub fn fock_build<T: Scalar>(modes: &ModeSet<T>, dim_bound: usize) -> Result<FockAlgebra<T>> {
    let m = modes.len();
    let dim = match modes.stat {
        Statistics::Fermi => 1usize.checked_shl(m as u32).ok_or(Error::FockDimension {
            dim: usize::MAX,
            bound: dim_bound,
        })?,
        Statistics::Bose => (modes.n_max + 1)
            .checked_pow(m as u32)
            .ok_or(Error::FockDimension {
                dim: usize::MAX,
                bound: dim_bound,
            })?,
    };
    if dim > dim_bound {
        return Err(Error::FockDimension { dim, bound: dim_bound });
    }
    let mut annihilators = Vec::with_capacity(m);
    match modes.stat {
        Statistics::Fermi => {
            for k in 0..m {
                let mut a = CMat::zeros(dim, dim);
                let bit = 1usize << k;
                for s in 0..dim {
                    if s & bit != 0 {
                        let sign = if ((s & (bit - 1)).count_ones()).is_multiple_of(2) {
                            T::one()
                        } else {
                            -T::one()
                        };
                        a[(s & !bit, s)] = creal(sign);
                    }
                }
                annihilators.push(a);
            }
        }
        Statistics::Bose => {
            let d1 = modes.n_max + 1;
            let mut single = CMat::<T>::zeros(d1, d1);
            for n in 1..d1 {
                single[(n - 1, n)] = creal(T::real(n as f64).sqrt());
            }
            let id1 = CMat::<T>::identity(d1);
            for k in 0..m {
                // mode 0 is the least significant factor
                let mut op = CMat::identity(1);
                for j in (0..m).rev() {
                    op = op.kron(if j == k { &single } else { &id1 });
                }
                annihilators.push(op);
            }
        }
    }
    Ok(FockAlgebra {
        stat: modes.stat,
        n_modes: m,
        n_max: modes.n_max,
        dim,
        annihilators,
    })
}

impl<T: Scalar> FockAlgebra<T> {
    pub fn a(&self, k: usize) -> &CMat<T> {
        &self.annihilators[k]
    }

    pub fn a_dag(&self, k: usize) -> CMat<T> {
        self.annihilators[k].adjoint()
    }

    /// Basis index of the Fock vacuum.
    pub fn vacuum(&self) -> usize {
        0
    }

    /// Occupation numbers of a basis state.
    pub fn occupations(&self, index: usize) -> Vec<usize> {
        match self.stat {
            Statistics::Fermi => (0..self.n_modes).map(|k| (index >> k) & 1).collect(),
            Statistics::Bose => {
                let d1 = self.n_max + 1;
                let mut idx = index;
                (0..self.n_modes)
                    .map(|_| {
                        let n = idx % d1;
                        idx /= d1;
                        n
                    })
                    .collect()
            }
        }
    }

    /// Basis indices whose occupations are all strictly below the cutoff;
    /// the CCR hold exactly on their span.
    pub fn below_cutoff(&self) -> Vec<usize> {
        match self.stat {
            Statistics::Fermi => (0..self.dim).collect(),
            Statistics::Bose => (0..self.dim)
                .filter(|&i| self.occupations(i).iter().all(|&n| n < self.n_max))
                .collect(),
        }
    }

    /// Largest residual of the canonical (anti)commutation relations:
    /// exact for fermions; for bosons measured on the below-cutoff span.
    pub fn ccr_residual(&self) -> T {
        let mut worst = T::zero();
        let keep = self.below_cutoff();
        for j in 0..self.n_modes {
            for k in 0..self.n_modes {
                let a_j = &self.annihilators[j];
                let adag_k = self.a_dag(k);
                let sign = match self.stat {
                    Statistics::Fermi => T::one(),
                    Statistics::Bose => -T::one(),
                };
                let br = &(a_j * &adag_k) + &(&adag_k * a_j).scale(creal(sign));
                let expect = if j == k { creal(T::one()) } else { czero() };
                for &col in &keep {
                    for row in 0..self.dim {
                        let want = if row == col { expect } else { czero() };
                        worst = worst.max((br[(row, col)] - want).norm());
                    }
                }
                let br2 = &(a_j * &self.annihilators[k])
                    + &(&self.annihilators[k] * a_j).scale(creal(sign));
                worst = worst.max(br2.max_abs());
            }
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// the quantum field and its covariance
// ---------------------------------------------------------------------------

/// Mode coefficients of the field:
/// `u_k(x) = (2 pi)^{-3/2} sqrt(w) D(L(p)) e^{-i p.x}` and the charge-twisted
/// `v_k(x) = (2 pi)^{-3/2} sqrt(w) D(L(p) eps) e^{+i p.x}`.
fn mode_coefficients<T: Scalar>(
    modes: &ModeSet<T>,
    x: &FourVector<T>,
) -> Result<(Vec<Vec<C<T>>>, Vec<Vec<C<T>>>)> {
    let mass = modes.mass()?;
    let dim = modes.spin.dim();
    let norm = T::real((2.0 * std::f64::consts::PI).powf(-1.5));
    let eps = epsilon::<T>();
    let mut us = Vec::with_capacity(modes.len());
    let mut vs = Vec::with_capacity(modes.len());
    for &(node, tl) in &modes.modes {
        let p = modes.grid.node(node);
        let w = modes.grid.weight(node).sqrt() * norm;
        let l = boost(BoostChoice::Canonical, mass, p)?;
        let d_l = sym_power(modes.spin.twice(), l.mat());
        let d_le = sym_power(modes.spin.twice(), &(*l.mat() * eps));
        let col = modes.spin.index_of(tl);
        let phase_u = cis(-minkowski_dot(p, x)) * creal(w);
        let phase_v = cis(minkowski_dot(p, x)) * creal(w);
        us.push((0..dim).map(|a| d_l[(a, col)] * phase_u).collect());
        vs.push((0..dim).map(|a| d_le[(a, col)] * phase_v).collect());
    }
    Ok((us, vs))
}

/// The mode-sum field operator
/// `phi_alpha(x) = sum_k [ a_k u_k_alpha(x) + a_k^dag v_k_alpha(x) ]`
/// as one Fock-space matrix per component.
pub fn field_operator<T: Scalar>(
    alg: &FockAlgebra<T>,
    modes: &ModeSet<T>,
    x: &FourVector<T>,
) -> Result<Vec<CMat<T>>> {
    assert_eq!(alg.n_modes, modes.len());
    let dim = modes.spin.dim();
    let (us, vs) = mode_coefficients(modes, x)?;
    let mut out = vec![CMat::zeros(alg.dim, alg.dim); dim];
    for k in 0..modes.len() {
        let adag = alg.a_dag(k);
        for (alpha, slot) in out.iter_mut().enumerate() {
            *slot = &*slot + &alg.a(k).scale(us[k][alpha]);
            *slot = &*slot + &adag.scale(vs[k][alpha]);
        }
    }
    Ok(out)
}

/// One-particle unitary induced on the mode labels by a grid-preserving
/// element: node permutation from the rotation, Wigner matrix on the
/// helicity indices, translation phase.
pub fn one_particle_unitary<T: Scalar>(
    modes: &ModeSet<T>,
    element: &PoincareElement<T>,
) -> Result<CMat<T>> {
    let mass = modes.mass()?;
    let lambda = covering_map(&element.a);
    let m = modes.len();
    let mut u = CMat::zeros(m, m);
    let is_identity =
        lambda.max_abs_diff(&crate::minkowski::LorentzMatrix::identity()) < geom_tol(1e-14);
    for (k, &(node, tl)) in modes.modes.iter().enumerate() {
        let p = modes.grid.node(node);
        if is_identity {
            u[(k, k)] = cis(minkowski_dot(p, &element.translation));
            continue;
        }
        let target = lambda.apply(p);
        // the Wigner matrix mixes the helicity column into all rows at the
        // target node; every (target node, lambda') mode must be present
        let w = wigner_rotation(BoostChoice::Canonical, mass, p, &element.a)?;
        let dw = sym_power(modes.spin.twice(), w.mat());
        let phase = cis(minkowski_dot(&target, &element.translation));
        let col = modes.spin.index_of(tl);
        for tlp in modes.spin.two_lambdas() {
            let row_mode = modes
                .modes
                .iter()
                .position(|&(nj, tlj)| {
                    tlj == tlp && modes.grid.node(nj).max_abs_diff(&target) < geom_tol(1e-9)
                })
                .ok_or(Error::ModeSetNotClosed)?;
            u[(row_mode, k)] = phase * dw[(modes.spin.index_of(tlp), col)];
        }
    }
    Ok(u)
}

/// Second quantization of a one-particle unitary on the truncated Fock space.
///
/// Fermions: the exterior-power matrix, `<T| Gamma(U) |S> = det U[T, S]`.
/// Bosons: supported for monomial `U` (permutation times phases), which
/// covers translations and `s = 0` rotations.
pub fn second_quantize<T: Scalar>(alg: &FockAlgebra<T>, u1: &CMat<T>) -> Result<CMat<T>> {
    assert_eq!(u1.rows(), alg.n_modes);
    match alg.stat {
        Statistics::Fermi => {
            let m = alg.n_modes;
            let mut out = CMat::zeros(alg.dim, alg.dim);
            for s in 0..alg.dim {
                let s_bits: Vec<usize> = (0..m).filter(|k| s & (1 << k) != 0).collect();
                for t in 0..alg.dim {
                    if t.count_ones() != s.count_ones() {
                        continue;
                    }
                    let t_bits: Vec<usize> = (0..m).filter(|k| t & (1 << k) != 0).collect();
                    let n = s_bits.len();
                    if n == 0 {
                        out[(t, s)] = creal(T::one());
                        continue;
                    }
                    let sub = CMat::from_fn(n, n, |r, c| u1[(t_bits[r], s_bits[c])]);
                    out[(t, s)] = sub.det();
                }
            }
            Ok(out)
        }
        Statistics::Bose => {
            let m = alg.n_modes;
            let mut perm = vec![usize::MAX; m];
            let mut phases = vec![czero(); m];
            for c in 0..m {
                for r in 0..m {
                    let v = u1[(r, c)];
                    if v.norm() > T::real(1e-12) {
                        if perm[c] != usize::MAX {
                            return Err(Error::InvalidConfig(
                                "bosonic second quantization needs a monomial one-particle map"
                                    .into(),
                            ));
                        }
                        perm[c] = r;
                        phases[c] = v;
                    }
                }
                if perm[c] == usize::MAX {
                    return Err(Error::InvalidConfig(
                        "one-particle map has a zero column".into(),
                    ));
                }
            }
            let d1 = alg.n_max + 1;
            let mut out = CMat::zeros(alg.dim, alg.dim);
            for s in 0..alg.dim {
                let occ = alg.occupations(s);
                let mut phase = creal(T::one());
                let mut target = 0usize;
                for (k, &n) in occ.iter().enumerate() {
                    for _ in 0..n {
                        phase *= phases[k];
                    }
                    target += n * d1.pow(perm[k] as u32);
                }
                out[(target, s)] = phase;
            }
            Ok(out)
        }
    }
}

/// Residual of the field covariance
/// `U phi_alpha(x) U^{-1} = sum_beta D_{alpha beta}(A^{-1}) phi_beta(Lambda x + a)`
/// on the truncated Fock space, maximized over components and the supplied
/// spacetime points.
pub fn covariance_residual<T: Scalar>(
    alg: &FockAlgebra<T>,
    modes: &ModeSet<T>,
    element: &PoincareElement<T>,
    points: &[FourVector<T>],
) -> Result<T> {
    let u1 = one_particle_unitary(modes, element)?;
    let big_u = second_quantize(alg, &u1)?;
    let big_u_dag = big_u.adjoint();
    let d_inv = sym_power(modes.spin.twice(), element.a.inverse().mat());
    let lambda = covering_map(&element.a);
    let dim = modes.spin.dim();
    let mut worst = T::zero();
    for x in points {
        let phi_x = field_operator(alg, modes, x)?;
        let moved = lambda.apply(x) + element.translation;
        let phi_moved = field_operator(alg, modes, &moved)?;
        for alpha in 0..dim {
            let lhs = &(&big_u * &phi_x[alpha]) * &big_u_dag;
            let mut rhs = CMat::zeros(alg.dim, alg.dim);
            for beta in 0..dim {
                rhs = &rhs + &phi_moved[beta].scale(d_inv[(alpha, beta)]);
            }
            let scale = T::one().max(lhs.max_abs()).max(rhs.max_abs());
            worst = worst.max(lhs.max_abs_diff(&rhs) / scale);
        }
    }
    Ok(worst)
}

/// Result of the smeared-bracket factorization check.
pub struct SmearedBracketCheck<T> {
    pub operator_scalar: C<T>,
    pub kernel_scalar: C<T>,
    pub off_identity_residual: T,
}

/// With `phi(f) = sum_{i,alpha} f_{i,alpha} phi_alpha(x_i)`, the bracket
/// `[phi(f), phi(g)^dag]` (statistics of the mode set) is a multiple of the
/// identity on the truncated space (below the Bose cutoff), and the scalar
/// equals the mode-restricted quadrature of the bracket kernel against the
/// smearing data.
pub fn smeared_bracket_check<T: Scalar>(
    alg: &FockAlgebra<T>,
    modes: &ModeSet<T>,
    smear_f: &[(FourVector<T>, Vec<C<T>>)],
    smear_g: &[(FourVector<T>, Vec<C<T>>)],
) -> Result<SmearedBracketCheck<T>> {
    let dim = modes.spin.dim();
    let mass = modes.mass()?;
    let mut op_f = CMat::zeros(alg.dim, alg.dim);
    for (x, coeffs) in smear_f {
        let phi = field_operator(alg, modes, x)?;
        for (alpha, c) in coeffs.iter().enumerate() {
            op_f = &op_f + &phi[alpha].scale(*c);
        }
    }
    let mut op_g = CMat::zeros(alg.dim, alg.dim);
    for (y, coeffs) in smear_g {
        let phi = field_operator(alg, modes, y)?;
        for (beta, c) in coeffs.iter().enumerate() {
            op_g = &op_g + &phi[beta].scale(*c);
        }
    }
    let op_g_dag = op_g.adjoint();
    let sigma = modes.stat.bracket_sign().sigma::<T>();
    let bracket = &(&op_f * &op_g_dag) + &(&op_g_dag * &op_f).scale(creal(sigma));

    // kernel route: mode-restricted quadrature of the bracket integrand;
    // iterate over distinct nodes (the lambda sum is the D(p_her/m) factor)
    let mut kernel_scalar: C<T> = czero();
    let pref = T::real(1.0 / (2.0 * std::f64::consts::PI).powi(3));
    let first_tl = modes.spin.two_lambdas().next().unwrap();
    for (x, cf) in smear_f {
        for (y, cg) in smear_g {
            for &(node, _tl) in modes.modes.iter().filter(|(_, tl)| *tl == first_tl) {
                let p = modes.grid.node(node);
                let w = modes.grid.weight(node) * pref;
                let d = sym_power(
                    modes.spin.twice(),
                    &to_hermitian(p).scale(creal(T::one() / mass)),
                );
                let xi_phase = minkowski_dot(p, x) - minkowski_dot(p, y);
                let osc = cis(-xi_phase) + cis(xi_phase) * creal(sigma);
                for alpha in 0..dim {
                    for beta in 0..dim {
                        kernel_scalar += cf[alpha] * cg[beta].conj() * d[(alpha, beta)] * osc * creal(w);
                    }
                }
            }
        }
    }

    let keep = alg.below_cutoff();
    let scalar = bracket[(alg.vacuum(), alg.vacuum())];
    let mut off = T::zero();
    for &col in &keep {
        for row in 0..alg.dim {
            let want = if row == col { scalar } else { czero() };
            off = off.max((bracket[(row, col)] - want).norm());
        }
    }
    Ok(SmearedBracketCheck {
        operator_scalar: scalar,
        kernel_scalar,
        off_identity_residual: off,
    })
}

/// All helicity modes on the axis nodes fixed by rotations about z, up to
/// `max_nodes` of them; convenient closed mode sets for covariance tests.
pub fn z_axis_nodes<T: Scalar>(grid: &MomentumGrid<T>, max_nodes: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..grid.len() {
        let p = grid.node(i);
        if p[1].abs() < T::real(1e-13) && p[2].abs() < T::real(1e-13) && p[3] > T::zero() {
            out.push(i);
            if out.len() == max_nodes {
                break;
            }
        }
    }
    out
}
