//! Mass-shell orbits, standard momenta, boost sections, little groups, and
//! Wigner rotations.
//!
//! Massive orbit: `p.p = m^2, p0 > 0` with standard momentum `(m, 0, 0, 0)`
//! and little group SU(2). Massless orbit: the forward cone without the
//! origin, standard momentum `(1/2, 0, 0, 1/2)`, little group the double
//! cover of the Euclidean motions of the plane.

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::minkowski::{covering_map, to_hermitian, FourVector, SL2C};
use crate::scalar::{cis, creal, czero, Scalar, C};

/// Which orbit a grid or state lives on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MassShell<T> {
    Massive { mass: T },
    Massless,
}

impl<T: Scalar> MassShell<T> {
    pub fn standard_momentum(&self) -> FourVector<T> {
        match self {
            MassShell::Massive { mass } => FourVector::new(*mass, T::zero(), T::zero(), T::zero()),
            MassShell::Massless => {
                let h = T::real(0.5);
                FourVector::new(h, T::zero(), T::zero(), h)
            }
        }
    }

    pub fn mass(&self) -> T {
        match self {
            MassShell::Massive { mass } => *mass,
            MassShell::Massless => T::zero(),
        }
    }

    /// Relative off-shell residual of a candidate momentum.
    pub fn residual(&self, p: &FourVector<T>) -> T {
        match self {
            MassShell::Massive { mass } => {
                let m2 = *mass * *mass;
                ((p.norm_sq() - m2) / m2).abs()
            }
            MassShell::Massless => {
                let scale = p.t() * p.t();
                (p.norm_sq() / scale).abs()
            }
        }
    }

    pub fn energy(&self, spatial: [T; 3]) -> T {
        let r2 = spatial[0] * spatial[0] + spatial[1] * spatial[1] + spatial[2] * spatial[2];
        match self {
            MassShell::Massive { mass } => (*mass * *mass + r2).sqrt(),
            MassShell::Massless => r2.sqrt(),
        }
    }
}

/// Default relative on-shell tolerance: forgiving enough for round-tripped
/// grid data, widened with the machine epsilon at lower precision.
pub fn on_shell_tol<T: Scalar>() -> T {
    crate::scalar::geom_tol(1e-9)
}

fn check_massive<T: Scalar>(m: T, p: &FourVector<T>) -> Result<()> {
    let shell = MassShell::Massive { mass: m };
    let res = shell.residual(p);
    if res > on_shell_tol() || p.t() <= T::zero() {
        return Err(Error::OffShell {
            residual: res.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Polar angles `(theta, phi)` of a spatial vector, `theta in [0, pi]`,
/// `phi in [0, 2 pi)`. At the pole the azimuth is taken to be 0.
pub fn polar_angles<T: Scalar>(v: [T; 3]) -> (T, T) {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if r == T::zero() {
        return (T::zero(), T::zero());
    }
    let theta = (v[2] / r).min(T::one()).max(-T::one()).acos();
    let mut phi = v[1].atan2(v[0]);
    if phi < T::zero() {
        phi += T::real(2.0) * T::PI();
    }
    (theta, phi)
}

/// The SU(2) element `e^{-i phi sigma_3 / 2} e^{-i theta sigma_2 / 2}`
/// rotating the z-axis into the direction with polar angles `(theta, phi)`.
pub fn su2_from_polar<T: Scalar>(theta: T, phi: T) -> SL2C<T> {
    let half = T::real(0.5);
    let (c, s) = ((theta * half).cos(), (theta * half).sin());
    let em = cis(-phi * half);
    let ep = cis(phi * half);
    SL2C::new_unchecked(Mat2::new(
        em * creal(c),
        -(em * creal(s)),
        ep * creal(s),
        ep * creal(c),
    ))
}

/// Canonical boost: the positive hermitian square root
/// `L(p) = (m + p_her) / sqrt(2 m (m + p0))`, satisfying
/// `L(p) L(p)^dag = p_her / m`.
pub fn canonical_boost<T: Scalar>(m: T, p: &FourVector<T>) -> Result<SL2C<T>> {
    check_massive(m, p)?;
    let ph = to_hermitian(p);
    let denom = (T::real(2.0) * m * (m + p.t())).sqrt();
    let num = Mat2::identity().scale(creal(m)) + ph;
    Ok(SL2C::new_unchecked(num.scale(creal(T::one() / denom))))
}

/// Helicity boost: polar decomposition `L(p) = R(p) H(p)` with
/// `H = diag(sqrt((p0+|p|)/m), sqrt((p0-|p|)/m))` and `R` the rotation
/// carrying the z-axis into the momentum direction. At `|p| = 0` the
/// rotation is the identity by convention (continuity along the +z axis).
pub fn helicity_boost<T: Scalar>(m: T, p: &FourVector<T>) -> Result<(SL2C<T>, SL2C<T>)> {
    check_massive(m, p)?;
    let sp = p.spatial();
    let r = p.spatial_norm();
    let hp = ((p.t() + r) / m).sqrt();
    let hm = ((p.t() - r).max(T::zero()) / m).sqrt();
    let h = SL2C::new_unchecked(Mat2::diag(creal(hp), creal(hm)));
    let rot = if r == T::zero() {
        SL2C::identity()
    } else {
        let (theta, phi) = polar_angles(sp);
        su2_from_polar(theta, phi)
    };
    Ok((rot, h))
}

/// Choice of boost section.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoostChoice {
    Canonical,
    Helicity,
}

pub fn boost<T: Scalar>(choice: BoostChoice, m: T, p: &FourVector<T>) -> Result<SL2C<T>> {
    match choice {
        BoostChoice::Canonical => canonical_boost(m, p),
        BoostChoice::Helicity => {
            let (r, h) = helicity_boost(m, p)?;
            Ok(r * h)
        }
    }
}

/// Massive Wigner rotation `W(p, A) = L(Lambda_A p)^{-1} A L(p)`, an element
/// of the little group SU(2).
///
/// The transported momentum is re-projected onto the shell (its energy is
/// recomputed from the spatial part), which removes the rounding drift of
/// the 4x4 transport for large boosts.
pub fn wigner_rotation<T: Scalar>(
    choice: BoostChoice,
    m: T,
    p: &FourVector<T>,
    a: &SL2C<T>,
) -> Result<SL2C<T>> {
    let lp = boost(choice, m, p)?;
    let moved = covering_map(a).apply(p);
    let sp = moved.spatial();
    let moved = FourVector::new(MassShell::Massive { mass: m }.energy(sp), sp[0], sp[1], sp[2]);
    let lq = boost(choice, m, &moved)?;
    Ok(lq.inverse() * *a * lp)
}

/// Minimum energy accepted on the forward cone.
pub fn default_cone_floor<T: Scalar>() -> T {
    T::real(1e-9)
}

/// Massless boost section: rotation carrying the z-axis to the momentum
/// direction, composed with the dilation `diag(t, 1/t)`, `t = sqrt(2 p0)`,
/// so that `L(p) pi_her L(p)^dag = p_her` with `pi = (1/2, 0, 0, 1/2)`.
pub fn massless_boost<T: Scalar>(p: &FourVector<T>, floor: T) -> Result<SL2C<T>> {
    if p.t() < floor {
        return Err(Error::NearConeTip {
            p0: p.t().to_f64().unwrap_or(f64::NAN),
            floor: floor.to_f64().unwrap_or(f64::NAN),
        });
    }
    let shell = MassShell::Massless;
    let res = shell.residual(p);
    if res > on_shell_tol() {
        return Err(Error::OffShell {
            residual: res.to_f64().unwrap_or(f64::NAN),
        });
    }
    let t = (T::real(2.0) * p.t()).sqrt();
    let dil = SL2C::new_unchecked(Mat2::diag(creal(t), creal(T::one() / t)));
    let (theta, phi) = polar_angles(p.spatial());
    Ok(su2_from_polar(theta, phi) * dil)
}

/// Little-group element of the massless orbit,
/// `W(p, A) = L(Lambda_A p)^{-1} A L(p)`; stabilizes the standard momentum.
pub fn massless_wigner_element<T: Scalar>(
    p: &FourVector<T>,
    a: &SL2C<T>,
    floor: T,
) -> Result<SL2C<T>> {
    let lp = massless_boost(p, floor)?;
    let moved = covering_map(a).apply(p);
    let sp = moved.spatial();
    let moved = FourVector::new(MassShell::<T>::Massless.energy(sp), sp[0], sp[1], sp[2]);
    let lq = massless_boost(&moved, floor)?;
    Ok(lq.inverse() * *a * lp)
}

/// Decompose a stabilizer element of the massless standard momentum into the
/// parameters `(a, phi)` of
/// `[[e^{i phi/2}, a e^{-i phi/2}], [0, e^{-i phi/2}]]`.
///
/// The map `(a, e^{i phi/2}) -> (Re a, Im a; R_phi)` is the 2:1 covering of
/// the Euclidean motions of the plane, with kernel `(0, 0; +-1)`.
pub fn massless_little_group_decompose<T: Scalar>(a: &SL2C<T>) -> Result<(C<T>, T)> {
    let pi_her = to_hermitian(&MassShell::<T>::Massless.standard_momentum());
    let m = *a.mat();
    let resid = (m * pi_her * m.adjoint()).max_abs_diff(&pi_her);
    if resid > crate::scalar::geom_tol(1e-10) {
        return Err(Error::NotStabilizer {
            residual: resid.to_f64().unwrap_or(f64::NAN),
        });
    }
    let a00 = m.e[0][0];
    // |a00| = 1 for exact stabilizers; phi = 2 arg(a00) in (-2 pi, 2 pi].
    let phi = T::real(2.0) * a00.im.atan2(a00.re);
    let trans = m.e[0][1] * a00;
    Ok((trans, phi))
}

/// Reassemble a stabilizer element from `(a, phi)`.
pub fn massless_little_group_compose<T: Scalar>(a: C<T>, phi: T) -> SL2C<T> {
    let half = T::real(0.5);
    let ep = cis(phi * half);
    let em = cis(-phi * half);
    SL2C::new_unchecked(Mat2::new(ep, a * em, czero(), em))
}

/// A random on-shell massive momentum with spatial components bounded by
/// `p_scale`.
pub fn random_massive_momentum<T: Scalar, R: rand::Rng + ?Sized>(
    rng: &mut R,
    m: T,
    p_scale: f64,
) -> FourVector<T> {
    let x = T::real(rng.random_range(-p_scale..p_scale));
    let y = T::real(rng.random_range(-p_scale..p_scale));
    let z = T::real(rng.random_range(-p_scale..p_scale));
    let e = (m * m + x * x + y * y + z * z).sqrt();
    FourVector::new(e, x, y, z)
}

/// A random momentum on the forward cone with energy in `(floor, e_scale)`.
pub fn random_massless_momentum<T: Scalar, R: rand::Rng + ?Sized>(
    rng: &mut R,
    e_scale: f64,
) -> FourVector<T> {
    let x = T::real(rng.random_range(-1.0..1.0));
    let y = T::real(rng.random_range(-1.0..1.0));
    let z = T::real(rng.random_range(-1.0..1.0));
    let r = (x * x + y * y + z * z).sqrt();
    let r = if r < T::real(1e-3) { T::one() } else { r };
    let e = T::real(rng.random_range(0.1..e_scale));
    let f = e / r;
    FourVector::new(e, x * f, y * f, z * f)
}
