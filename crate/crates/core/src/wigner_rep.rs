//! The unitary representation `(m, s)` realized on quadrature grids over the
//! mass shell, its covariant form, and the massless helicity representation.
//!
//! Wave functions are sampled on a product grid: a radial Gauss-Legendre rule
//! in `|p|` times an angular point set. Two angular schemes are provided:
//!
//! - a 26-point octahedrally invariant rule (face centers, edge midpoints and
//!   vertices of the cube), closed under the full 24-element octahedral
//!   rotation group, so that a nontrivial subgroup of rotations acts by exact
//!   node permutation and the representation property is testable without
//!   interpolation error;
//! - a Gauss-Legendre (in `cos theta`) times uniform (in `phi`) product rule,
//!   which supports trilinear interpolation for non-grid rotations and
//!   boosts, and is spectrally accurate for smooth integrands.
//!
//! Both are closed under spatial reflection `p -> -p`.

use crate::error::{Error, Result};
use crate::irreps::{spin_rep, SpinLabel};
use crate::linalg::{pauli, Mat2};
use crate::minkowski::{covering_map, minkowski_dot, FourVector, LorentzMatrix, SL2C};
use crate::orbits::{
    boost, default_cone_floor, massless_boost, massless_little_group_decompose, BoostChoice,
    MassShell,
};
use crate::scalar::{cis, creal, czero, geom_tol, Scalar, C};
use num_complex::Complex;
use std::sync::Arc;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::real(n as f64);
    for i in 0..n.div_ceil(2) {
        let mut x = T::real((std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos());
        let mut dp = T::one();
        for _ in 0..100 {
            let mut p0 = T::one();
            let mut p1 = x;
            for k in 2..=n {
                let kf = T::real(k as f64);
                let p2 = ((T::real(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
            dp = nf * (x * p1 - p0) / (x * x - T::one());
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < T::real(1e-16) {
                break;
            }
        }
        let w = T::real(2.0) / ((T::one() - x * x) * dp * dp);
        let xv = if n % 2 == 1 && i == n / 2 { T::zero() } else { -x.abs() };
        nodes[i] = xv;
        nodes[n - 1 - i] = -xv;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Angular quadrature scheme on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngularScheme {
    /// 26-point octahedral rule: 6 face centers (weight 1/21), 12 edge
    /// midpoints (4/105), 8 vertices (9/280); weights sum to 1.
    Lebedev26,
    /// Gauss-Legendre in `cos theta` times uniform azimuth.
    Product { n_theta: usize, n_phi: usize },
}

fn angular_points<T: Scalar>(scheme: AngularScheme) -> (Vec<[T; 3]>, Vec<T>) {
    match scheme {
        AngularScheme::Lebedev26 => {
            let mut dirs = Vec::with_capacity(26);
            let mut w = Vec::with_capacity(26);
            let one = T::one();
            let zero = T::zero();
            for k in 0..3 {
                for s in [one, -one] {
                    let mut d = [zero; 3];
                    d[k] = s;
                    dirs.push(d);
                    w.push(T::real(1.0 / 21.0));
                }
            }
            let r = T::real(1.0 / std::f64::consts::SQRT_2);
            for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
                for si in [one, -one] {
                    for sj in [one, -one] {
                        let mut d = [zero; 3];
                        d[i] = si * r;
                        d[j] = sj * r;
                        dirs.push(d);
                        w.push(T::real(4.0 / 105.0));
                    }
                }
            }
            let t = T::real(1.0 / 3.0f64.sqrt());
            for si in [one, -one] {
                for sj in [one, -one] {
                    for sk in [one, -one] {
                        dirs.push([si * t, sj * t, sk * t]);
                        w.push(T::real(9.0 / 280.0));
                    }
                }
            }
            (dirs, w)
        }
        AngularScheme::Product { n_theta, n_phi } => {
            let (cn, cw) = gauss_legendre::<T>(n_theta);
            let mut dirs = Vec::with_capacity(n_theta * n_phi);
            let mut w = Vec::with_capacity(n_theta * n_phi);
            for (c, cweight) in cn.iter().zip(&cw) {
                let s = (T::one() - *c * *c).max(T::zero()).sqrt();
                for k in 0..n_phi {
                    let phi = T::real(2.0 * std::f64::consts::PI * k as f64 / n_phi as f64);
                    dirs.push([s * phi.cos(), s * phi.sin(), *c]);
                    w.push(*cweight / T::real(2.0 * n_phi as f64));
                }
            }
            (dirs, w)
        }
    }
}

/// A spatial rotation under which the grid is exactly invariant, together
/// with its SU(2) lift and the induced permutation of angular points.
#[derive(Clone, Debug)]
pub struct GridRotation<T> {
    pub matrix: [[T; 3]; 3],
    pub su2: SL2C<T>,
    pub angular_perm: Vec<usize>,
}

fn rot_apply<T: Scalar>(r: &[[T; 3]; 3], v: &[T; 3]) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for i in 0..3 {
        out[i] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
    }
    out
}

fn rot_mul<T: Scalar>(a: &[[T; 3]; 3], b: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// SU(2) lift of a proper rotation via axis-angle.
pub fn su2_from_rotation<T: Scalar>(r: &[[T; 3]; 3]) -> SL2C<T> {
    let tr = r[0][0] + r[1][1] + r[2][2];
    let cos_t = ((tr - T::one()) / T::real(2.0)).min(T::one()).max(-T::one());
    let theta = cos_t.acos();
    let axis: [T; 3];
    if theta < T::real(1e-9) {
        return SL2C::identity();
    } else if (T::PI() - theta).abs() < T::real(1e-6) {
        // half turn: axis magnitudes from the diagonal, signs from the
        // off-diagonal entries relative to the largest component
        let mut n = [
            ((r[0][0] + T::one()) / T::real(2.0)).max(T::zero()).sqrt(),
            ((r[1][1] + T::one()) / T::real(2.0)).max(T::zero()).sqrt(),
            ((r[2][2] + T::one()) / T::real(2.0)).max(T::zero()).sqrt(),
        ];
        let k = if n[0] >= n[1] && n[0] >= n[2] {
            0
        } else if n[1] >= n[2] {
            1
        } else {
            2
        };
        for j in 0..3 {
            if j != k {
                let sym = (r[k][j] + r[j][k]) / T::real(2.0);
                if sym < T::zero() {
                    n[j] = -n[j];
                }
            }
        }
        axis = n;
    } else {
        let f = T::one() / (T::real(2.0) * theta.sin());
        axis = [
            (r[2][1] - r[1][2]) * f,
            (r[0][2] - r[2][0]) * f,
            (r[1][0] - r[0][1]) * f,
        ];
    }
    let s = pauli::<T>();
    let half = theta / T::real(2.0);
    let mut m = Mat2::identity().scale(creal(half.cos()));
    for k in 0..3 {
        let f = Complex::new(T::zero(), -axis[k] * half.sin());
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] += s[k].e[i][j] * f;
            }
        }
    }
    SL2C::new_unchecked(m)
}

fn find_angular_perm<T: Scalar>(dirs: &[[T; 3]], r: &[[T; 3]; 3], tol: T) -> Option<Vec<usize>> {
    let mut perm = vec![usize::MAX; dirs.len()];
    let mut used = vec![false; dirs.len()];
    for (j, d) in dirs.iter().enumerate() {
        let image = rot_apply(r, d);
        let mut found = None;
        for (i, t) in dirs.iter().enumerate() {
            if used[i] {
                continue;
            }
            let dist = (image[0] - t[0])
                .abs()
                .max((image[1] - t[1]).abs())
                .max((image[2] - t[2]).abs());
            if dist < tol {
                found = Some(i);
                break;
            }
        }
        let i = found?;
        perm[j] = i; // rotation maps direction j to direction i
        used[i] = true;
    }
    Some(perm)
}

/// The 24 proper rotations of the octahedral group, generated by quarter
/// turns about z and x.
pub fn octahedral_rotations<T: Scalar>() -> Vec<[[T; 3]; 3]> {
    let z = T::zero();
    let o = T::one();
    let rz: [[T; 3]; 3] = [[z, -o, z], [o, z, z], [z, z, o]];
    let rx: [[T; 3]; 3] = [[o, z, z], [z, z, -o], [z, o, z]];
    let mut group: Vec<[[T; 3]; 3]> = vec![[[o, z, z], [z, o, z], [z, z, o]]];
    let close = |a: &[[T; 3]; 3], b: &[[T; 3]; 3]| -> bool {
        let mut d = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((a[i][j] - b[i][j]).abs());
            }
        }
        d < T::real(1e-9)
    };
    let mut frontier = group.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in frontier {
            for gen in [&rz, &rx] {
                let h = rot_mul(gen, &g);
                if !group.iter().any(|k| close(k, &h)) {
                    group.push(h);
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    group
}

/// Quadrature grid over a mass-shell orbit.
#[derive(Debug)]
pub struct MomentumGrid<T> {
    pub shell: MassShell<T>,
    pub p_max: T,
    pub n_radial: usize,
    pub angular: AngularScheme,
    radial_nodes: Vec<T>,
    directions: Vec<[T; 3]>,
    nodes: Vec<FourVector<T>>,
    weights: Vec<T>,
    rotations: Vec<GridRotation<T>>,
    parity_perm: Vec<usize>,
}

impl<T: Scalar> MomentumGrid<T> {
    pub fn build(
        shell: MassShell<T>,
        p_max: T,
        n_radial: usize,
        angular: AngularScheme,
    ) -> Result<Arc<Self>> {
        if p_max <= T::zero() || n_radial == 0 {
            return Err(Error::InvalidConfig(
                "grid needs p_max > 0 and at least one radial node".into(),
            ));
        }
        if let AngularScheme::Product { n_theta, n_phi } = angular {
            if n_theta == 0 || n_phi == 0 {
                return Err(Error::InvalidConfig(
                    "product rule needs nonzero node counts".into(),
                ));
            }
        }
        let (gl_nodes, gl_weights) = gauss_legendre::<T>(n_radial);
        let half = T::real(0.5);
        let radial_nodes: Vec<T> = gl_nodes
            .iter()
            .map(|u| p_max * (*u + T::one()) * half)
            .collect();
        let radial_weights: Vec<T> = gl_weights.iter().map(|w| *w * p_max * half).collect();
        let (directions, angular_weights) = angular_points::<T>(angular);

        let four_pi = T::real(4.0 * std::f64::consts::PI);
        let mut nodes = Vec::with_capacity(n_radial * directions.len());
        let mut weights = Vec::with_capacity(n_radial * directions.len());
        for (r, rw) in radial_nodes.iter().zip(&radial_weights) {
            let e = shell.energy([*r, T::zero(), T::zero()]);
            for (d, aw) in directions.iter().zip(&angular_weights) {
                nodes.push(FourVector::new(e, *r * d[0], *r * d[1], *r * d[2]));
                // dOmega_m = |p|^2 d|p| dOmega / (2 p0)
                weights.push(*rw * *r * *r / (T::real(2.0) * e) * four_pi * *aw);
            }
        }

        let candidate_rotations: Vec<[[T; 3]; 3]> = match angular {
            AngularScheme::Lebedev26 => octahedral_rotations::<T>(),
            AngularScheme::Product { n_phi, .. } => {
                let mut rots = Vec::new();
                for k in 0..n_phi {
                    let a = T::real(2.0 * std::f64::consts::PI * k as f64 / n_phi as f64);
                    let (c, s) = (a.cos(), a.sin());
                    let z = T::zero();
                    let o = T::one();
                    let rz = [[c, -s, z], [s, c, z], [z, z, o]];
                    rots.push(rz);
                    let rx = [[o, z, z], [z, -o, z], [z, z, -o]];
                    rots.push(rot_mul(&rz, &rx));
                }
                rots
            }
        };
        let mut rotations = Vec::new();
        for r in candidate_rotations {
            if let Some(perm) = find_angular_perm(&directions, &r, geom_tol(1e-10)) {
                let su2 = su2_from_rotation(&r);
                let cov = covering_map(&su2);
                let mut ok = true;
                for i in 0..3 {
                    for j in 0..3 {
                        if (cov.e[i + 1][j + 1] - r[i][j]).abs() > geom_tol(1e-10) {
                            ok = false;
                        }
                    }
                }
                if ok {
                    rotations.push(GridRotation {
                        matrix: r,
                        su2,
                        angular_perm: perm,
                    });
                }
            }
        }

        let minus: [[T; 3]; 3] = {
            let z = T::zero();
            let o = T::one();
            [[-o, z, z], [z, -o, z], [z, z, -o]]
        };
        let parity_perm = find_angular_perm(&directions, &minus, geom_tol(1e-12))
            .ok_or_else(|| Error::InvalidConfig("angular set is not antipodally closed".into()))?;

        Ok(Arc::new(MomentumGrid {
            shell,
            p_max,
            n_radial,
            angular,
            radial_nodes,
            directions,
            nodes,
            weights,
            rotations,
            parity_perm,
        }))
    }

    /// Default massive grid: `p_max = 6 m`, 32 radial nodes, 26-point angular.
    pub fn default_massive(mass: T) -> Result<Arc<Self>> {
        Self::build(
            MassShell::Massive { mass },
            T::real(6.0) * mass,
            32,
            AngularScheme::Lebedev26,
        )
    }

    pub fn n_angular(&self) -> usize {
        self.directions.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &FourVector<T> {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[FourVector<T>] {
        &self.nodes
    }

    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn rotations(&self) -> &[GridRotation<T>] {
        &self.rotations
    }

    pub fn radial_nodes(&self) -> &[T] {
        &self.radial_nodes
    }

    pub fn directions(&self) -> &[[T; 3]] {
        &self.directions
    }

    fn node_index(&self, i_rad: usize, i_ang: usize) -> usize {
        i_rad * self.directions.len() + i_ang
    }

    /// Node permutation induced by an angular permutation: maps node `j` to
    /// the index of the rotated node.
    pub fn node_perm_of(&self, angular_perm: &[usize]) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for ir in 0..self.n_radial {
            for (ia, &target) in angular_perm.iter().enumerate() {
                out[self.node_index(ir, ia)] = self.node_index(ir, target);
            }
        }
        out
    }

    /// Node permutation of the spatial reflection `p -> -p`.
    pub fn parity_node_perm(&self) -> Vec<usize> {
        self.node_perm_of(&self.parity_perm)
    }

    /// Angular permutation realizing a spatial rotation on this grid, if the
    /// rotation is an exact symmetry.
    pub fn match_rotation(&self, spatial: &[[T; 3]; 3]) -> Option<Vec<usize>> {
        find_angular_perm(&self.directions, spatial, geom_tol(1e-9))
    }

    /// Quadrature of a scalar function from per-node values.
    pub fn integrate(&self, values: &[C<T>]) -> C<T> {
        values
            .iter()
            .zip(&self.weights)
            .fold(czero(), |acc, (v, w)| acc + *v * creal(*w))
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.shell == other.shell
            && self.p_max == other.p_max
            && self.n_radial == other.n_radial
            && self.angular == other.angular
    }

    /// Trilinear interpolation (in `|p|`, `cos theta`, `phi`) of strided
    /// per-node amplitudes at an off-grid spatial momentum; only available on
    /// product grids. Points outside the radial support evaluate to zero.
    pub fn interpolate(
        &self,
        values: &[C<T>],
        stride: usize,
        comp: usize,
        q: [T; 3],
    ) -> Result<C<T>> {
        let (n_theta, n_phi) = match self.angular {
            AngularScheme::Product { n_theta, n_phi } => (n_theta, n_phi),
            AngularScheme::Lebedev26 => return Err(Error::NotGridSymmetry),
        };
        let r = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
        if r > self.p_max || r == T::zero() {
            return Ok(czero());
        }
        let cos_t = (q[2] / r).min(T::one()).max(-T::one());
        let mut phi = q[1].atan2(q[0]);
        if phi < T::zero() {
            phi += T::real(2.0) * T::PI();
        }

        let locate = |grid: &[T], x: T| -> (usize, usize, T) {
            if x <= grid[0] {
                return (0, 0, T::zero());
            }
            if x >= grid[grid.len() - 1] {
                return (grid.len() - 1, grid.len() - 1, T::zero());
            }
            let mut lo = 0;
            while lo + 1 < grid.len() && grid[lo + 1] < x {
                lo += 1;
            }
            let hi = lo + 1;
            let f = (x - grid[lo]) / (grid[hi] - grid[lo]);
            (lo, hi, f)
        };
        let (r0, r1, fr) = locate(&self.radial_nodes, r);
        let cos_nodes: Vec<T> = (0..n_theta).map(|i| self.directions[i * n_phi][2]).collect();
        let (c0, c1, fc) = locate(&cos_nodes, cos_t);
        let dphi = T::real(2.0 * std::f64::consts::PI / n_phi as f64);
        let ip = (phi / dphi).floor();
        let fp = phi / dphi - ip;
        let p0 = (ip.to_f64().unwrap() as usize) % n_phi;
        let p1 = (p0 + 1) % n_phi;

        let value = |ir: usize, ic: usize, ipp: usize| -> C<T> {
            let node = self.node_index(ir, ic * n_phi + ipp);
            values[node * stride + comp]
        };
        let lerp = |a: C<T>, b: C<T>, f: T| a * creal(T::one() - f) + b * creal(f);
        let c00 = lerp(value(r0, c0, p0), value(r1, c0, p0), fr);
        let c01 = lerp(value(r0, c0, p1), value(r1, c0, p1), fr);
        let c10 = lerp(value(r0, c1, p0), value(r1, c1, p0), fr);
        let c11 = lerp(value(r0, c1, p1), value(r1, c1, p1), fr);
        let c0v = lerp(c00, c01, fp);
        let c1v = lerp(c10, c11, fp);
        Ok(lerp(c0v, c1v, fc))
    }
}

/// Momentum-space wave function `f_lambda(p)` sampled on a grid.
#[derive(Clone, Debug)]
pub struct WaveFunction<T> {
    pub grid: Arc<MomentumGrid<T>>,
    pub spin: SpinLabel,
    /// Row-major `[node][lambda]`, lambda ordered `s` down to `-s`.
    pub amps: Vec<C<T>>,
}

impl<T: Scalar> WaveFunction<T> {
    pub fn zero(grid: Arc<MomentumGrid<T>>, spin: SpinLabel) -> Self {
        let len = grid.len() * spin.dim();
        WaveFunction {
            grid,
            spin,
            amps: vec![czero(); len],
        }
    }

    pub fn from_fn(
        grid: Arc<MomentumGrid<T>>,
        spin: SpinLabel,
        mut f: impl FnMut(&FourVector<T>, i32) -> C<T>,
    ) -> Self {
        let mut wf = Self::zero(grid, spin);
        for i in 0..wf.grid.len() {
            let p = *wf.grid.node(i);
            for (k, tl) in spin.two_lambdas().enumerate() {
                wf.amps[i * spin.dim() + k] = f(&p, tl);
            }
        }
        wf
    }

    /// Smooth Gaussian profile with a mild component-dependent modulation.
    pub fn gaussian(grid: Arc<MomentumGrid<T>>, spin: SpinLabel, width: T) -> Self {
        Self::from_fn(grid, spin, |p, tl| {
            let r2 = p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
            let base = (-r2 / (width * width)).exp();
            let tilt = T::one() + T::real(0.2) * p[1] + T::real(0.1) * p[3] * T::real(tl as f64);
            Complex::new(base * tilt, base * T::real(0.3) * p[2])
        })
    }

    pub fn random<R: rand::Rng + ?Sized>(
        grid: Arc<MomentumGrid<T>>,
        spin: SpinLabel,
        rng: &mut R,
    ) -> Self {
        let mut wf = Self::zero(grid, spin);
        for a in wf.amps.iter_mut() {
            *a = Complex::new(
                T::real(rng.random_range(-1.0..1.0)),
                T::real(rng.random_range(-1.0..1.0)),
            );
        }
        wf
    }

    pub fn amp(&self, node: usize, comp: usize) -> C<T> {
        self.amps[node * self.spin.dim() + comp]
    }

    pub fn node_vec(&self, node: usize) -> &[C<T>] {
        let d = self.spin.dim();
        &self.amps[node * d..(node + 1) * d]
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn max_abs(&self) -> T {
        self.amps
            .iter()
            .map(|a| a.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Quadrature approximation of the invariant scalar product
/// `sum_lambda int dOmega_m conj(f_lambda) g_lambda`.
pub fn inner_product<T: Scalar>(f: &WaveFunction<T>, g: &WaveFunction<T>) -> Result<C<T>> {
    if f.spin != g.spin || !f.grid.same_layout(&g.grid) {
        return Err(Error::GridMismatch);
    }
    let d = f.spin.dim();
    let mut acc = czero();
    for i in 0..f.grid.len() {
        let w = creal(f.grid.weight(i));
        for k in 0..d {
            acc += f.amp(i, k).conj() * g.amp(i, k) * w;
        }
    }
    Ok(acc)
}

pub fn norm_sq<T: Scalar>(f: &WaveFunction<T>) -> T {
    inner_product(f, f).expect("same grid").re
}

/// Element `(a, A)` of the inhomogeneous group; composition
/// `(a, A)(b, B) = (a + Lambda_A b, A B)`.
#[derive(Clone, Copy, Debug)]
pub struct PoincareElement<T> {
    pub translation: FourVector<T>,
    pub a: SL2C<T>,
}

impl<T: Scalar> PoincareElement<T> {
    pub fn identity() -> Self {
        PoincareElement {
            translation: FourVector::zero(),
            a: SL2C::identity(),
        }
    }

    pub fn translation(a: FourVector<T>) -> Self {
        PoincareElement {
            translation: a,
            a: SL2C::identity(),
        }
    }

    pub fn homogeneous(a: SL2C<T>) -> Self {
        PoincareElement {
            translation: FourVector::zero(),
            a,
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        PoincareElement {
            translation: self.translation + covering_map(&self.a).apply(&other.translation),
            a: self.a * other.a,
        }
    }

    pub fn inverse(&self) -> Self {
        let inv = self.a.inverse();
        PoincareElement {
            translation: -covering_map(&inv).apply(&self.translation),
            a: inv,
        }
    }
}

enum Pullback {
    Identity,
    /// `perm[j]` = index of the node `Lambda p_j`; stored with its inverse.
    Perm { inverse: Vec<usize> },
    Interpolate,
}

fn plan_pullback<T: Scalar>(grid: &MomentumGrid<T>, lambda: &LorentzMatrix<T>) -> Result<Pullback> {
    if lambda.max_abs_diff(&LorentzMatrix::identity()) < geom_tol(1e-14) {
        return Ok(Pullback::Identity);
    }
    if lambda.rotation_residual() < geom_tol(1e-10) {
        let mut spatial = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                spatial[i][j] = lambda.e[i + 1][j + 1];
            }
        }
        if let Some(aperm) = grid.match_rotation(&spatial) {
            let perm = grid.node_perm_of(&aperm);
            let mut inverse = vec![0usize; perm.len()];
            for (j, &t) in perm.iter().enumerate() {
                inverse[t] = j;
            }
            return Ok(Pullback::Perm { inverse });
        }
    }
    match grid.angular {
        AngularScheme::Product { .. } => Ok(Pullback::Interpolate),
        AngularScheme::Lebedev26 => Err(Error::NotGridSymmetry),
    }
}

/// The unitary representation `(m, s)` acting on wave functions:
/// `(U(a, A) f)(p) = e^{i p.a} D^(s)(R(p, A)) f(Lambda_A^{-1} p)` with the
/// Wigner rotation `R(p, A) = L(p)^{-1} A L(Lambda_A^{-1} p)`.
///
/// Grid-preserving rotations and translations are evaluated exactly by node
/// permutation; other elements fall back to trilinear interpolation on
/// product grids.
pub fn rep_apply<T: Scalar>(
    choice: BoostChoice,
    element: &PoincareElement<T>,
    f: &WaveFunction<T>,
) -> Result<WaveFunction<T>> {
    let mass = match f.grid.shell {
        MassShell::Massive { mass } => mass,
        MassShell::Massless => {
            return Err(Error::InvalidConfig(
                "rep_apply needs a massive grid; use rep_apply_massless".into(),
            ))
        }
    };
    let spin = f.spin;
    let d = spin.dim();
    let lambda = covering_map(&element.a);
    let lambda_inv = lambda.inverse();
    let plan = plan_pullback(&f.grid, &lambda)?;
    let mut out = WaveFunction::zero(f.grid.clone(), spin);
    for i in 0..f.grid.len() {
        let p = *f.grid.node(i);
        let phase = cis(minkowski_dot(&p, &element.translation));
        let (source_vec, q): (Vec<C<T>>, FourVector<T>) = match &plan {
            Pullback::Identity => (f.node_vec(i).to_vec(), p),
            Pullback::Perm { inverse } => {
                let j = inverse[i];
                (f.node_vec(j).to_vec(), *f.grid.node(j))
            }
            Pullback::Interpolate => {
                let q4 = lambda_inv.apply(&p);
                let mut v = vec![czero(); d];
                for (k, slot) in v.iter_mut().enumerate() {
                    *slot = f.grid.interpolate(&f.amps, d, k, [q4[1], q4[2], q4[3]])?;
                }
                (v, q4)
            }
        };
        let rotated = if matches!(plan, Pullback::Identity) {
            source_vec
        } else {
            let lp = boost(choice, mass, &p)?;
            let lq = boost(choice, mass, &q)?;
            spin_rep(spin, &(lp.inverse() * element.a * lq)).mul_vec(&source_vec)
        };
        for k in 0..d {
            out.amps[i * d + k] = phase * rotated[k];
        }
    }
    Ok(out)
}

/// The covariant form `psi(p) = D^(s)(L(p)) f(p)`.
pub fn covariant_form<T: Scalar>(
    choice: BoostChoice,
    f: &WaveFunction<T>,
) -> Result<WaveFunction<T>> {
    let mass = f.grid.shell.mass();
    let d = f.spin.dim();
    let mut out = WaveFunction::zero(f.grid.clone(), f.spin);
    for i in 0..f.grid.len() {
        let l = boost(choice, mass, f.grid.node(i))?;
        let v = spin_rep(f.spin, &l).mul_vec(f.node_vec(i));
        out.amps[i * d..(i + 1) * d].copy_from_slice(&v);
    }
    Ok(out)
}

/// Inverse of [`covariant_form`].
pub fn covariant_to_f<T: Scalar>(
    choice: BoostChoice,
    psi: &WaveFunction<T>,
) -> Result<WaveFunction<T>> {
    let mass = psi.grid.shell.mass();
    let d = psi.spin.dim();
    let mut out = WaveFunction::zero(psi.grid.clone(), psi.spin);
    for i in 0..psi.grid.len() {
        let l = boost(choice, mass, psi.grid.node(i))?;
        let v = spin_rep(psi.spin, &l.inverse()).mul_vec(psi.node_vec(i));
        out.amps[i * d..(i + 1) * d].copy_from_slice(&v);
    }
    Ok(out)
}

/// Covariant transformation law
/// `(U(a,A) psi)(p) = e^{i p.a} D(A) psi(Lambda^{-1} p)`.
pub fn covariant_apply<T: Scalar>(
    element: &PoincareElement<T>,
    psi: &WaveFunction<T>,
) -> Result<WaveFunction<T>> {
    let d = psi.spin.dim();
    let lambda = covering_map(&element.a);
    let plan = plan_pullback(&psi.grid, &lambda)?;
    let da = spin_rep(psi.spin, &element.a);
    let mut out = WaveFunction::zero(psi.grid.clone(), psi.spin);
    for i in 0..psi.grid.len() {
        let p = *psi.grid.node(i);
        let phase = cis(minkowski_dot(&p, &element.translation));
        let source: Vec<C<T>> = match &plan {
            Pullback::Identity => psi.node_vec(i).to_vec(),
            Pullback::Perm { inverse } => psi.node_vec(inverse[i]).to_vec(),
            Pullback::Interpolate => {
                let q4 = lambda.inverse().apply(&p);
                let mut v = vec![czero(); d];
                for (k, slot) in v.iter_mut().enumerate() {
                    *slot = psi.grid.interpolate(&psi.amps, d, k, [q4[1], q4[2], q4[3]])?;
                }
                v
            }
        };
        let rotated = da.mul_vec(&source);
        for k in 0..d {
            out.amps[i * d + k] = phase * rotated[k];
        }
    }
    Ok(out)
}

/// Massless helicity representation: scalar amplitudes transported with the
/// phase `e^{i lambda phi(p, A)}` of the little-group element,
/// `(U(a,A) f)(p) = e^{i p.a} e^{i lambda phi} f(Lambda_A^{-1} p)`.
pub fn rep_apply_massless<T: Scalar>(
    two_lambda: i32,
    element: &PoincareElement<T>,
    f: &WaveFunction<T>,
) -> Result<WaveFunction<T>> {
    if f.grid.shell != MassShell::Massless {
        return Err(Error::InvalidConfig(
            "massless representation needs a cone grid".into(),
        ));
    }
    if f.spin.dim() != 1 {
        return Err(Error::InvalidSpin(
            "massless states carry a single helicity component".into(),
        ));
    }
    let lambda = covering_map(&element.a);
    let plan = plan_pullback(&f.grid, &lambda)?;
    let floor = default_cone_floor::<T>();
    let mut out = WaveFunction::zero(f.grid.clone(), f.spin);
    for i in 0..f.grid.len() {
        let p = *f.grid.node(i);
        let phase = cis(minkowski_dot(&p, &element.translation));
        let (source, q) = match &plan {
            Pullback::Identity => (f.amps[i], p),
            Pullback::Perm { inverse } => (f.amps[inverse[i]], *f.grid.node(inverse[i])),
            Pullback::Interpolate => {
                let q4 = lambda.inverse().apply(&p);
                (
                    f.grid.interpolate(&f.amps, 1, 0, [q4[1], q4[2], q4[3]])?,
                    q4,
                )
            }
        };
        let wig = if matches!(plan, Pullback::Identity) {
            creal(T::one())
        } else {
            let lp = massless_boost(&p, floor)?;
            let lq = massless_boost(&q, floor)?;
            let w = lp.inverse() * element.a * lq;
            let (_trans, phi) = massless_little_group_decompose(&w)?;
            cis(T::real(two_lambda as f64 / 2.0) * phi)
        };
        out.amps[i] = phase * wig * source;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(5)
    }

    fn small_grid() -> Arc<MomentumGrid<f64>> {
        MomentumGrid::build(
            MassShell::Massive { mass: 1.0 },
            6.0,
            8,
            AngularScheme::Lebedev26,
        )
        .unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre::<f64>(12);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((integral - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn lebedev26_weights_and_degree() {
        let (dirs, w) = angular_points::<f64>(AngularScheme::Lebedev26);
        assert_eq!(dirs.len(), 26);
        let total: f64 = w.iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
        let avg = |f: &dyn Fn(&[f64; 3]) -> f64| -> f64 {
            dirs.iter().zip(&w).map(|(d, w)| w * f(d)).sum()
        };
        assert!((avg(&|d| d[0] * d[0]) - 1.0 / 3.0).abs() < 1e-14);
        assert!((avg(&|d| d[0].powi(4)) - 1.0 / 5.0).abs() < 1e-14);
        assert!((avg(&|d| d[0] * d[0] * d[1] * d[1]) - 1.0 / 15.0).abs() < 1e-14);
        assert!((avg(&|d| d[0].powi(6)) - 1.0 / 7.0).abs() < 1e-14);
        assert!((avg(&|d| d[0].powi(4) * d[1] * d[1]) - 1.0 / 35.0).abs() < 1e-14);
        assert!((avg(&|d| (d[0] * d[1] * d[2]).powi(2)) - 1.0 / 105.0).abs() < 1e-14);
    }

    #[test]
    fn octahedral_group_order_and_lifts() {
        let rots = octahedral_rotations::<f64>();
        assert_eq!(rots.len(), 24);
        let grid = small_grid();
        assert_eq!(grid.rotations().len(), 24);
        for r in grid.rotations() {
            assert!(r.su2.is_su2(1e-12));
        }
    }

    #[test]
    fn product_grid_registers_dihedral_rotations() {
        let grid = MomentumGrid::build(
            MassShell::Massive { mass: 1.0 },
            6.0,
            6,
            AngularScheme::Product {
                n_theta: 8,
                n_phi: 8,
            },
        )
        .unwrap();
        assert_eq!(grid.rotations().len(), 16);
    }

    #[test]
    fn nodes_are_on_shell() {
        let grid = small_grid();
        for i in 0..grid.len() {
            assert!(grid.shell.residual(grid.node(i)) < 1e-12);
        }
    }

    #[test]
    fn inner_product_gaussian_converges() {
        let spin = SpinLabel::from_twice(0).unwrap();
        let mut values: Vec<f64> = Vec::new();
        for n_rad in [8, 16, 32] {
            let grid = MomentumGrid::build(
                MassShell::Massive { mass: 1.0 },
                6.0,
                n_rad,
                AngularScheme::Lebedev26,
            )
            .unwrap();
            let f = WaveFunction::gaussian(grid, spin, 1.0);
            values.push(norm_sq(&f));
        }
        let rel = ((values[2] - values[1]) / values[2]).abs();
        assert!(rel < 1e-4, "relative change {rel:e}");
    }

    #[test]
    fn inner_product_is_sesquilinear() {
        let grid = small_grid();
        let spin = SpinLabel::from_twice(2).unwrap();
        let mut rng = rng();
        let f = WaveFunction::random(grid.clone(), spin, &mut rng);
        let g = WaveFunction::random(grid.clone(), spin, &mut rng);
        let fg = inner_product(&f, &g).unwrap();
        let gf = inner_product(&g, &f).unwrap();
        assert!((fg - gf.conj()).norm() < 1e-14);
        let zero = WaveFunction::zero(grid, spin);
        assert_eq!(inner_product(&zero, &zero).unwrap().norm(), 0.0);
    }

    #[test]
    fn translation_is_a_pointwise_phase() {
        let grid = small_grid();
        let spin = SpinLabel::from_twice(1).unwrap();
        let mut rng = rng();
        let f = WaveFunction::random(grid.clone(), spin, &mut rng);
        let a = FourVector::new(0.3, -0.7, 0.2, 1.1);
        let out = rep_apply(BoostChoice::Canonical, &PoincareElement::translation(a), &f).unwrap();
        for i in 0..grid.len() {
            let expect = cis(minkowski_dot(grid.node(i), &a));
            for k in 0..spin.dim() {
                assert!((out.amp(i, k) - expect * f.amp(i, k)).norm() < 1e-14);
            }
        }
        let id = rep_apply(BoostChoice::Canonical, &PoincareElement::identity(), &f).unwrap();
        assert!(id.max_abs_diff(&f) < 1e-15);
    }

    #[test]
    fn representation_property_on_grid_subgroup() {
        let grid = small_grid();
        let spin = SpinLabel::from_twice(1).unwrap();
        let mut rng = rng();
        use rand::Rng;
        let f = WaveFunction::random(grid.clone(), spin, &mut rng);
        let r1 = grid.rotations()[5].su2;
        let r2 = grid.rotations()[17].su2;
        let mut rv = || {
            FourVector::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
        };
        let g1 = PoincareElement {
            translation: rv(),
            a: r1,
        };
        let g2 = PoincareElement {
            translation: rv(),
            a: r2,
        };
        let seq = rep_apply(
            BoostChoice::Canonical,
            &g1,
            &rep_apply(BoostChoice::Canonical, &g2, &f).unwrap(),
        )
        .unwrap();
        let combined = rep_apply(BoostChoice::Canonical, &g1.compose(&g2), &f).unwrap();
        assert!(seq.max_abs_diff(&combined) < 1e-12);
        let n0 = norm_sq(&f);
        let n1 = norm_sq(&seq);
        assert!((n0 - n1).abs() / n0 < 1e-12);
    }

    #[test]
    fn covariant_form_roundtrip_and_pointwise_norm() {
        let grid = small_grid();
        let spin = SpinLabel::from_twice(2).unwrap();
        let mut rng = rng();
        let f = WaveFunction::random(grid.clone(), spin, &mut rng);
        let psi = covariant_form(BoostChoice::Canonical, &f).unwrap();
        let back = covariant_to_f(BoostChoice::Canonical, &psi).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-12);
        // s = 0: psi = f identically
        let s0 = SpinLabel::from_twice(0).unwrap();
        let f0 = WaveFunction::random(grid.clone(), s0, &mut rng);
        let psi0 = covariant_form(BoostChoice::Canonical, &f0).unwrap();
        assert!(psi0.max_abs_diff(&f0) < 1e-15);
        // pointwise norm equality in the p-dependent inner product
        let mass = 1.0;
        for i in 0..grid.len() {
            let p = grid.node(i);
            let weight = crate::irreps::sym_power(
                spin.twice(),
                &crate::minkowski::hat(&crate::minkowski::to_hermitian(p))
                    .scale(creal(1.0 / mass)),
            );
            let v = psi.node_vec(i);
            let wv = weight.mul_vec(v);
            let mut lhs = Complex::new(0.0, 0.0);
            let mut rhs = Complex::new(0.0, 0.0);
            for k in 0..spin.dim() {
                lhs += v[k].conj() * wv[k];
                rhs += f.amp(i, k).conj() * f.amp(i, k);
            }
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn covariant_route_matches_direct_rep() {
        let grid = small_grid();
        let spin = SpinLabel::from_twice(1).unwrap();
        let mut rng = rng();
        let f = WaveFunction::random(grid.clone(), spin, &mut rng);
        let g = PoincareElement {
            translation: FourVector::new(0.2, 0.1, -0.3, 0.5),
            a: grid.rotations()[9].su2,
        };
        let direct = rep_apply(BoostChoice::Canonical, &g, &f).unwrap();
        let psi = covariant_form(BoostChoice::Canonical, &f).unwrap();
        let via =
            covariant_to_f(BoostChoice::Canonical, &covariant_apply(&g, &psi).unwrap()).unwrap();
        assert!(via.max_abs_diff(&direct) < 1e-10);
    }

    #[test]
    fn boost_section_equivalence() {
        // U_can(g) M = M U_hel(g) with (M f)(p) = D(L_can^{-1} L_hel) f(p)
        let grid = small_grid();
        let spin = SpinLabel::from_twice(1).unwrap();
        let mass = 1.0;
        let mut rng = rng();
        let f = WaveFunction::random(grid.clone(), spin, &mut rng);
        let intertwine = |wf: &WaveFunction<f64>| -> WaveFunction<f64> {
            let mut out = WaveFunction::zero(wf.grid.clone(), wf.spin);
            for i in 0..wf.grid.len() {
                let p = wf.grid.node(i);
                let lc = boost(BoostChoice::Canonical, mass, p).unwrap();
                let lh = boost(BoostChoice::Helicity, mass, p).unwrap();
                let k = spin_rep(spin, &(lc.inverse() * lh));
                let v = k.mul_vec(wf.node_vec(i));
                out.amps[i * spin.dim()..(i + 1) * spin.dim()].copy_from_slice(&v);
            }
            out
        };
        let g = PoincareElement {
            translation: FourVector::new(0.4, 0.0, 0.2, -0.1),
            a: grid.rotations()[13].su2,
        };
        let lhs = rep_apply(BoostChoice::Canonical, &g, &intertwine(&f)).unwrap();
        let rhs = intertwine(&rep_apply(BoostChoice::Helicity, &g, &f).unwrap());
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn boost_unitarity_improves_under_refinement() {
        let spin = SpinLabel::from_twice(0).unwrap();
        let rapidity = 0.15f64;
        let a = SL2C::new_unchecked(Mat2::diag(
            creal((rapidity / 2.0f64).exp()),
            creal((-rapidity / 2.0f64).exp()),
        ));
        let mut errors = Vec::new();
        for (n_rad, n_theta, n_phi) in [(32, 16, 12), (80, 32, 16)] {
            let grid = MomentumGrid::build(
                MassShell::Massive { mass: 1.0 },
                8.0,
                n_rad,
                AngularScheme::Product { n_theta, n_phi },
            )
            .unwrap();
            let f = WaveFunction::gaussian(grid, spin, 1.5);
            let uf = rep_apply(BoostChoice::Canonical, &PoincareElement::homogeneous(a), &f).unwrap();
            errors.push(((norm_sq(&uf) - norm_sq(&f)) / norm_sq(&f)).abs());
        }
        assert!(errors[1] < 1e-3, "finest unitarity error {:e}", errors[1]);
        assert!(errors[1] < errors[0] / 2.5, "no improvement: {errors:?}");
    }

    #[test]
    fn non_symmetry_rejected_on_lebedev_grid() {
        let grid = small_grid();
        let spin = SpinLabel::from_twice(0).unwrap();
        let f = WaveFunction::zero(grid, spin);
        let a = SL2C::new_unchecked(Mat2::diag(creal(1.2), creal(1.0 / 1.2)));
        let res = rep_apply(BoostChoice::Canonical, &PoincareElement::homogeneous(a), &f);
        assert!(matches!(res, Err(Error::NotGridSymmetry)));
    }

    #[test]
    fn massless_stabilizer_phases() {
        let grid = MomentumGrid::build(
            MassShell::<f64>::Massless,
            4.0,
            8,
            AngularScheme::Lebedev26,
        )
        .unwrap();
        let spin = SpinLabel::from_twice(0).unwrap();
        let mut rng = rng();
        let f = WaveFunction::random(grid.clone(), spin, &mut rng);
        // A = diag(e^{i phi/2}, e^{-i phi/2}) with phi = pi/2 covers the
        // quarter turn about z, a grid symmetry; nodes along +z are fixed
        // and pick up exactly e^{i lambda phi}.
        let phi = std::f64::consts::FRAC_PI_2;
        let a = SL2C::new_unchecked(Mat2::diag(cis(phi / 2.0), cis(-phi / 2.0)));
        for two_lambda in [-2i32, -1, 0, 1, 2] {
            let out = rep_apply_massless(two_lambda, &PoincareElement::homogeneous(a), &f).unwrap();
            for i in 0..grid.len() {
                let p = grid.node(i);
                if p[1].abs() < 1e-14 && p[2].abs() < 1e-14 && p[3] > 0.0 {
                    let expect = cis(two_lambda as f64 / 2.0 * phi) * f.amps[i];
                    assert!((out.amps[i] - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn massless_composition_phases_add() {
        fn phase_element(phi: f64) -> SL2C<f64> {
            SL2C::new_unchecked(Mat2::diag(cis(phi / 2.0), cis(-phi / 2.0)))
        }
        let phis = [0.7, 1.9];
        let w = phase_element(phis[0]) * phase_element(phis[1]);
        let (_a, phi12) = massless_little_group_decompose(&w).unwrap();
        let diff = (phi12 - phis[0] - phis[1]) / (4.0 * std::f64::consts::PI);
        assert!((diff - diff.round()).abs() < 1e-12);
    }

    #[test]
    fn parity_permutation_negates_spatial_parts() {
        for angular in [
            AngularScheme::Lebedev26,
            AngularScheme::Product { n_theta: 6, n_phi: 8 },
        ] {
            let grid = MomentumGrid::<f64>::build(MassShell::Massive { mass: 1.0 }, 6.0, 4, angular)
                .unwrap();
            let perm = grid.parity_node_perm();
            for i in 0..grid.len() {
                let p = grid.node(i);
                let q = grid.node(perm[i]);
                assert!((p[0] - q[0]).abs() < 1e-15);
                for mu in 1..4 {
                    assert!((p[mu] + q[mu]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn grid_mismatch_rejected() {
        let g1 = small_grid();
        let g2 = MomentumGrid::build(
            MassShell::Massive { mass: 1.0 },
            6.0,
            9,
            AngularScheme::Lebedev26,
        )
        .unwrap();
        let s0 = SpinLabel::from_twice(0).unwrap();
        let f = WaveFunction::zero(g1, s0);
        let g = WaveFunction::zero(g2, s0);
        assert!(matches!(inner_product(&f, &g), Err(Error::GridMismatch)));
    }
}
