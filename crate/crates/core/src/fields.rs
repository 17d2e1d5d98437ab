//! Classical free fields for arbitrary spin and positive mass.
//!
//! Four equivalent carriers of the representation `(m, s)` are constructed
//! from a Wigner wave function `f_lambda(p)`:
//!
//! - the `2s+1`-component field `phi(p) = D^(s)(L(p)) f(p)` and its dotted
//!   partner `chi(p) = D^(0,s)(L(p)) f(p)`;
//! - the `2(2s+1)`-component bispinor `(phi, chi)` obeying the generalized
//!   Dirac equation through the gamma matrices of [`crate::irreps`];
//! - the totally symmetric multi-Dirac (Bargmann-Wigner) spinor built from
//!   one `B(p) = (L(p); hat(L(p)))` factor per index;
//! - the mixed dotted/undotted (Pauli-Fierz) spinors for any split
//!   `dotted + undotted = 2s`.
//!
//! Each construction carries residual checks against its field equations,
//! all of which reduce to the boost identities `p_her hat(L) = m L` and
//! `hat(p_her) L = m hat(L)`.

use crate::error::{Error, Result};
use crate::irreps::{gamma_matrices, spin_rep, sym_power, SpinLabel};
use crate::linalg::CMat;
use crate::minkowski::{covering_map, hat, minkowski_dot, to_hermitian, FourVector};
use crate::orbits::{boost, BoostChoice, MassShell};
use crate::scalar::{cis, creal, czero, factorial, Scalar, C};
use crate::wigner_rep::{MomentumGrid, WaveFunction};
use std::sync::Arc;

/// Component layout of a spinor field sampled on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldLayout {
    /// `2s+1` undotted components.
    Phi,
    /// `2s+1` dotted components.
    Chi,
    /// Stacked `(phi, chi)`.
    Bispinor,
    /// Full `4^{2s}` multi-Dirac tensor.
    BargmannWigner,
    /// Full `2^{2s}` two-spinor tensor, slots `[undotted.., dotted..]`.
    PauliFierz { dotted: u32, undotted: u32 },
    /// Vector-spinor `psi^mu`, 16 components per node, laid out `[mu][dirac]`.
    VectorSpinor,
}

impl FieldLayout {
    pub fn components(&self, spin: SpinLabel) -> usize {
        let n = spin.twice() as usize;
        match self {
            FieldLayout::Phi | FieldLayout::Chi => n + 1,
            FieldLayout::Bispinor => 2 * (n + 1),
            FieldLayout::BargmannWigner => 4usize.pow(n as u32),
            FieldLayout::PauliFierz { .. } => 2usize.pow(n as u32),
            FieldLayout::VectorSpinor => 16,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FieldLayout::Phi => "phi",
            FieldLayout::Chi => "chi",
            FieldLayout::Bispinor => "bispinor",
            FieldLayout::BargmannWigner => "bw",
            FieldLayout::PauliFierz { .. } => "pf",
            FieldLayout::VectorSpinor => "rs",
        }
    }
}

/// A spinor-valued field on a momentum grid.
#[derive(Clone, Debug)]
pub struct SpinorField<T> {
    pub grid: Arc<MomentumGrid<T>>,
    pub spin: SpinLabel,
    pub layout: FieldLayout,
    pub comps: usize,
    /// Row-major `[node][component]`.
    pub values: Vec<C<T>>,
}

impl<T: Scalar> SpinorField<T> {
    fn zero(grid: Arc<MomentumGrid<T>>, spin: SpinLabel, layout: FieldLayout) -> Self {
        let comps = layout.components(spin);
        let len = grid.len() * comps;
        SpinorField {
            grid,
            spin,
            layout,
            comps,
            values: vec![czero(); len],
        }
    }

    pub fn node_vec(&self, node: usize) -> &[C<T>] {
        &self.values[node * self.comps..(node + 1) * self.comps]
    }

    fn node_vec_mut(&mut self, node: usize) -> &mut [C<T>] {
        &mut self.values[node * self.comps..(node + 1) * self.comps]
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

fn require_massive<T: Scalar>(grid: &MomentumGrid<T>) -> Result<T> {
    match grid.shell {
        MassShell::Massive { mass } => Ok(mass),
        MassShell::Massless => Err(Error::InvalidConfig(
            "field constructions require a massive grid".into(),
        )),
    }
}

/// Apply a rectangular operator to one slot of a mixed tensor.
/// `dims` are the per-slot dimensions; the slot dimension becomes `op.rows()`.
pub fn apply_to_slot<T: Scalar>(
    values: &[C<T>],
    dims: &[usize],
    slot: usize,
    op: &CMat<T>,
) -> (Vec<C<T>>, Vec<usize>) {
    assert_eq!(dims[slot], op.cols());
    let stride_after: usize = dims[slot + 1..].iter().product();
    let chunk = dims[slot] * stride_after;
    let out_chunk = op.rows() * stride_after;
    let outer = values.len() / chunk;
    let mut out = vec![czero(); outer * out_chunk];
    for o in 0..outer {
        for a in 0..stride_after {
            for r in 0..op.rows() {
                let mut acc = czero();
                for c in 0..op.cols() {
                    acc += op[(r, c)] * values[o * chunk + c * stride_after + a];
                }
                out[o * out_chunk + r * stride_after + a] = acc;
            }
        }
    }
    let mut new_dims = dims.to_vec();
    new_dims[slot] = op.rows();
    (out, new_dims)
}

fn binom<T: Scalar>(n: u32, k: u32) -> T {
    factorial::<T>(n) / (factorial::<T>(k) * factorial::<T>(n - k))
}

/// Embed a canonical spin vector into the symmetric subspace of
/// `(C^2)^{tensor 2s}` (tensor index bit set means the lowered basis spinor).
pub fn symmetric_embed<T: Scalar>(spin: SpinLabel, f: &[C<T>]) -> Vec<C<T>> {
    let n = spin.twice() as usize;
    let dim = 1usize << n;
    let mut out = vec![czero(); dim];
    for (idx, slot) in out.iter_mut().enumerate() {
        let ones = idx.count_ones() as usize;
        let k = n - ones; // number of raised spinors
        let r = n - k; // canonical basis index (lambda = s - r)
        let norm = binom::<T>(n as u32, k as u32).sqrt();
        *slot = f[r] / creal(norm);
    }
    out
}

/// Inverse of [`symmetric_embed`] on symmetric tensors.
pub fn symmetric_project<T: Scalar>(spin: SpinLabel, tensor: &[C<T>]) -> Vec<C<T>> {
    let n = spin.twice() as usize;
    let dim = spin.dim();
    let mut out = vec![czero(); dim];
    for (idx, v) in tensor.iter().enumerate() {
        let ones = idx.count_ones() as usize;
        let k = n - ones;
        out[n - k] += *v;
    }
    for (r, slot) in out.iter_mut().enumerate() {
        let k = n - r;
        let norm = binom::<T>(n as u32, k as u32).sqrt();
        *slot /= creal(norm);
    }
    out
}

/// `phi(p) = D^(s)(L(p)) f(p)`.
pub fn phi_from_f<T: Scalar>(f: &WaveFunction<T>) -> Result<SpinorField<T>> {
    let mass = require_massive(&f.grid)?;
    let mut out = SpinorField::zero(f.grid.clone(), f.spin, FieldLayout::Phi);
    for i in 0..f.grid.len() {
        let l = boost(BoostChoice::Canonical, mass, f.grid.node(i))?;
        let v = spin_rep(f.spin, &l).mul_vec(f.node_vec(i));
        out.node_vec_mut(i).copy_from_slice(&v);
    }
    Ok(out)
}

/// `chi(p) = D^(0,s)(L(p)) f(p)`.
pub fn chi_from_f<T: Scalar>(f: &WaveFunction<T>) -> Result<SpinorField<T>> {
    let mass = require_massive(&f.grid)?;
    let mut out = SpinorField::zero(f.grid.clone(), f.spin, FieldLayout::Chi);
    for i in 0..f.grid.len() {
        let l = boost(BoostChoice::Canonical, mass, f.grid.node(i))?;
        let v = sym_power(f.spin.twice(), l.hat().mat()).mul_vec(f.node_vec(i));
        out.node_vec_mut(i).copy_from_slice(&v);
    }
    Ok(out)
}

/// Stacked bispinor `(phi, chi)`.
pub fn bispinor_from_f<T: Scalar>(f: &WaveFunction<T>) -> Result<SpinorField<T>> {
    let phi = phi_from_f(f)?;
    let chi = chi_from_f(f)?;
    let mut out = SpinorField::zero(f.grid.clone(), f.spin, FieldLayout::Bispinor);
    let d = f.spin.dim();
    for i in 0..f.grid.len() {
        out.node_vec_mut(i)[..d].copy_from_slice(phi.node_vec(i));
        out.node_vec_mut(i)[d..].copy_from_slice(chi.node_vec(i));
    }
    Ok(out)
}

/// Recover the Wigner wave function from `phi` or `chi`.
pub fn field_to_f<T: Scalar>(field: &SpinorField<T>) -> Result<WaveFunction<T>> {
    let mass = require_massive(&field.grid)?;
    let mut out = WaveFunction::zero(field.grid.clone(), field.spin);
    let d = field.spin.dim();
    for i in 0..field.grid.len() {
        let l = boost(BoostChoice::Canonical, mass, field.grid.node(i))?;
        let m = match field.layout {
            FieldLayout::Phi => spin_rep(field.spin, &l.inverse()),
            FieldLayout::Chi => sym_power(field.spin.twice(), l.hat().inverse().mat()),
            _ => return Err(Error::InvalidConfig("field_to_f expects phi or chi".into())),
        };
        let v = m.mul_vec(field.node_vec(i));
        out.amps[i * d..(i + 1) * d].copy_from_slice(&v);
    }
    Ok(out)
}

/// Largest residual of the duality relations
/// `chi = D^(s)(hat(p_her)/m) phi` and `phi = D^(s)(p_her/m) chi`
/// (the generalized momentum-space Dirac equations), relative to the field
/// magnitude.
pub fn duality_residual<T: Scalar>(phi: &SpinorField<T>, chi: &SpinorField<T>) -> Result<T> {
    let mass = require_massive(&phi.grid)?;
    if phi.layout != FieldLayout::Phi || chi.layout != FieldLayout::Chi {
        return Err(Error::InvalidConfig(
            "duality_residual expects (phi, chi)".into(),
        ));
    }
    let twice = phi.spin.twice();
    let scale = T::one().max(phi.max_abs()).max(chi.max_abs());
    let mut worst = T::zero();
    for i in 0..phi.grid.len() {
        let p = phi.grid.node(i);
        let ph = to_hermitian(p).scale(creal(T::one() / mass));
        let d_p = sym_power(twice, &ph);
        let d_ph = sym_power(twice, &hat(&ph));
        let chi_pred = d_ph.mul_vec(phi.node_vec(i));
        let phi_pred = d_p.mul_vec(chi.node_vec(i));
        for k in 0..phi.comps {
            worst = worst.max((chi_pred[k] - chi.node_vec(i)[k]).norm());
            worst = worst.max((phi_pred[k] - phi.node_vec(i)[k]).norm());
        }
    }
    Ok(worst / scale)
}

/// Norm of the field in the covariant scalar product; for `phi` the weight is
/// `D^(s)(hat(p_her)/m)`, for `chi` it is `D^(s)(p_her/m)`. Equals the Wigner
/// norm of the generating wave function.
pub fn field_norm_sq<T: Scalar>(field: &SpinorField<T>) -> Result<T> {
    let mass = require_massive(&field.grid)?;
    let twice = field.spin.twice();
    let mut acc = T::zero();
    for i in 0..field.grid.len() {
        let p = field.grid.node(i);
        let ph = to_hermitian(p).scale(creal(T::one() / mass));
        let weight = match field.layout {
            FieldLayout::Phi => sym_power(twice, &hat(&ph)),
            FieldLayout::Chi => sym_power(twice, &ph),
            _ => {
                return Err(Error::InvalidConfig(
                    "field_norm_sq expects phi or chi".into(),
                ))
            }
        };
        let v = field.node_vec(i);
        let wv = weight.mul_vec(v);
        let mut s: C<T> = czero();
        for k in 0..field.comps {
            s += v[k].conj() * wv[k];
        }
        acc += s.re * field.grid.weight(i);
    }
    Ok(acc)
}

/// Residual of the generalized momentum-space Dirac equation
/// `gamma^{mu_1...mu_2s} p_{mu_1}...p_{mu_2s} psi = m^{2s} psi` on a bispinor
/// field, relative to `m^{2s} |psi|`.
pub fn generalized_dirac_residual<T: Scalar>(field: &SpinorField<T>) -> Result<T> {
    let mass = require_massive(&field.grid)?;
    if field.layout != FieldLayout::Bispinor {
        return Err(Error::InvalidConfig(
            "generalized_dirac_residual expects a bispinor field".into(),
        ));
    }
    let gamma = gamma_matrices::<T>(field.spin)?;
    let m2s = mass.powi(field.spin.twice() as i32);
    let scale = (T::one().max(field.max_abs())) * m2s;
    let mut worst = T::zero();
    for i in 0..field.grid.len() {
        let slash = gamma.contract(field.grid.node(i));
        let v = field.node_vec(i);
        let sv = slash.mul_vec(v);
        for k in 0..field.comps {
            worst = worst.max((sv[k] - v[k] * creal(m2s)).norm());
        }
    }
    Ok(worst / scale)
}

/// The generalized Dirac spinor block `B(p) = (L(p); hat(L(p)))`, a `4 x 2`
/// matrix satisfying `(gamma . p / m) B = B`.
pub fn b_matrix<T: Scalar>(mass: T, p: &FourVector<T>) -> Result<CMat<T>> {
    let l = boost(BoostChoice::Canonical, mass, p)?;
    let lh = l.hat();
    let mut b = CMat::zeros(4, 2);
    for r in 0..2 {
        for c in 0..2 {
            b[(r, c)] = l.mat().e[r][c];
            b[(2 + r, c)] = lh.mat().e[r][c];
        }
    }
    Ok(b)
}

/// Bargmann-Wigner multispinor `psi = (tensor_j B(p)) F` with `F` the
/// symmetric embedding of the Wigner amplitude.
pub fn bw_construct<T: Scalar>(f: &WaveFunction<T>) -> Result<SpinorField<T>> {
    let mass = require_massive(&f.grid)?;
    let n = f.spin.twice() as usize;
    if n == 0 {
        return Err(Error::InvalidSpin(
            "Bargmann-Wigner fields need s >= 1/2".into(),
        ));
    }
    let mut out = SpinorField::zero(f.grid.clone(), f.spin, FieldLayout::BargmannWigner);
    for i in 0..f.grid.len() {
        let b = b_matrix(mass, f.grid.node(i))?;
        let mut values = symmetric_embed(f.spin, f.node_vec(i));
        let mut dims = vec![2usize; n];
        for slot in 0..n {
            let (new_values, new_dims) = apply_to_slot(&values, &dims, slot, &b);
            values = new_values;
            dims = new_dims;
        }
        out.node_vec_mut(i).copy_from_slice(&values);
    }
    Ok(out)
}

/// Per-index residuals of the Bargmann-Wigner equations
/// `(gamma^mu_(j) p_mu - m) psi = 0`, relative to `m |psi|`.
pub fn bw_residual<T: Scalar>(field: &SpinorField<T>) -> Result<Vec<T>> {
    let mass = require_massive(&field.grid)?;
    if field.layout != FieldLayout::BargmannWigner {
        return Err(Error::InvalidConfig(
            "bw_residual expects a Bargmann-Wigner field".into(),
        ));
    }
    let n = field.spin.twice() as usize;
    let half = SpinLabel::from_twice(1)?;
    let gamma = gamma_matrices::<T>(half)?;
    let scale = (T::one().max(field.max_abs())) * mass;
    let mut out = vec![T::zero(); n];
    let dims = vec![4usize; n];
    for i in 0..field.grid.len() {
        let p = field.grid.node(i);
        let mut op = gamma.contract(p);
        for d in 0..4 {
            op[(d, d)] -= creal(mass);
        }
        for (j, worst) in out.iter_mut().enumerate() {
            let (res, _) = apply_to_slot(field.node_vec(i), &dims, j, &op);
            let r = res
                .iter()
                .map(|z| z.norm())
                .fold(T::zero(), |a, b| a.max(b));
            *worst = worst.max(r / scale);
        }
    }
    Ok(out)
}

/// Pointwise Bargmann-Wigner scalar product
/// `2^{-2s} psi_1^dag (tensor_j gamma^0) psi_2`, whose quadrature reproduces
/// the Wigner norm.
pub fn bw_inner_at_node<T: Scalar>(
    field1: &SpinorField<T>,
    field2: &SpinorField<T>,
    node: usize,
) -> Result<C<T>> {
    let n = field1.spin.twice() as usize;
    let half = SpinLabel::from_twice(1)?;
    let gamma = gamma_matrices::<T>(half)?;
    let g0 = gamma.dirac_gammas().expect("spin 1/2")[0].clone();
    let mut v = field2.node_vec(node).to_vec();
    let dims = vec![4usize; n];
    for slot in 0..n {
        let (nv, _) = apply_to_slot(&v, &dims, slot, &g0);
        v = nv;
    }
    let mut acc: C<T> = czero();
    for (a, b) in field1.node_vec(node).iter().zip(&v) {
        acc += a.conj() * *b;
    }
    Ok(acc * creal(T::one() / T::real(2f64.powi(n as i32)))
)
}

/// Quadrature of [`bw_inner_at_node`] over the grid.
pub fn bw_norm_sq<T: Scalar>(field: &SpinorField<T>) -> Result<T> {
    let mut acc = T::zero();
    for i in 0..field.grid.len() {
        acc += bw_inner_at_node(field, field, i)?.re * field.grid.weight(i);
    }
    Ok(acc)
}

/// Recover the Wigner amplitude from a Bargmann-Wigner field via
/// `F = 2^{-2s} (tensor_j B^dag gamma^0) psi`.
pub fn bw_to_f<T: Scalar>(field: &SpinorField<T>) -> Result<WaveFunction<T>> {
    let mass = require_massive(&field.grid)?;
    let n = field.spin.twice() as usize;
    let half = SpinLabel::from_twice(1)?;
    let g0 = gamma_matrices::<T>(half)?.dirac_gammas().expect("spin 1/2")[0].clone();
    let mut out = WaveFunction::zero(field.grid.clone(), field.spin);
    let d = field.spin.dim();
    for i in 0..field.grid.len() {
        let b = b_matrix(mass, field.grid.node(i))?;
        let bg = &b.adjoint() * &g0;
        let mut values = field.node_vec(i).to_vec();
        let mut dims = vec![4usize; n];
        for slot in 0..n {
            let (nv, nd) = apply_to_slot(&values, &dims, slot, &bg);
            values = nv;
            dims = nd;
        }
        let factor = creal(T::one() / T::real(2f64.powi(n as i32)));
        let scaled: Vec<C<T>> = values.iter().map(|z| *z * factor).collect();
        let f = symmetric_project(field.spin, &scaled);
        out.amps[i * d..(i + 1) * d].copy_from_slice(&f);
    }
    Ok(out)
}

/// Pauli-Fierz field for the split `(dotted, undotted)`, slots laid out
/// `[undotted.., dotted..]`: `L(p)` on each undotted slot, `hat(L(p))` on
/// each dotted slot, applied to the symmetric embedding of `f`.
pub fn pf_construct<T: Scalar>(
    f: &WaveFunction<T>,
    dotted: u32,
    undotted: u32,
) -> Result<SpinorField<T>> {
    let mass = require_massive(&f.grid)?;
    if dotted + undotted != f.spin.twice() {
        return Err(Error::InvalidSplit);
    }
    let n = f.spin.twice() as usize;
    if n == 0 {
        return Err(Error::InvalidSpin("Pauli-Fierz fields need s >= 1/2".into()));
    }
    let layout = FieldLayout::PauliFierz { dotted, undotted };
    let mut out = SpinorField::zero(f.grid.clone(), f.spin, layout);
    for i in 0..f.grid.len() {
        let l = boost(BoostChoice::Canonical, mass, f.grid.node(i))?;
        let lm = l.mat().to_cmat();
        let lh = l.hat().mat().to_cmat();
        let mut values = symmetric_embed(f.spin, f.node_vec(i));
        let dims = vec![2usize; n];
        for slot in 0..n {
            let op = if slot < undotted as usize { &lm } else { &lh };
            let (nv, _) = apply_to_slot(&values, &dims, slot, op);
            values = nv;
        }
        out.node_vec_mut(i).copy_from_slice(&values);
    }
    Ok(out)
}

/// Residuals of the Pauli-Fierz equations, phrased through the boost
/// identities: contracting the last undotted slot with `hat(p_her)` gives
/// `m` times the `(dotted+1, undotted-1)` field, and contracting the first
/// dotted slot with `p_her` gives `m` times the `(dotted-1, undotted+1)`
/// field. Returns `(undotted_side, dotted_side)` relative residuals; sides
/// that do not apply report zero.
pub fn pf_residual<T: Scalar>(f: &WaveFunction<T>, field: &SpinorField<T>) -> Result<(T, T)> {
    let mass = require_massive(&field.grid)?;
    let (dotted, undotted) = match field.layout {
        FieldLayout::PauliFierz { dotted, undotted } => (dotted, undotted),
        _ => {
            return Err(Error::InvalidConfig(
                "pf_residual expects a Pauli-Fierz field".into(),
            ))
        }
    };
    let n = field.spin.twice() as usize;
    let dims = vec![2usize; n];
    let scale = (T::one().max(field.max_abs())) * mass;
    let mut res_undotted = T::zero();
    let mut res_dotted = T::zero();
    if undotted >= 1 {
        let target = pf_construct(f, dotted + 1, undotted - 1)?;
        for i in 0..field.grid.len() {
            let ph_hat = hat(&to_hermitian(field.grid.node(i))).to_cmat();
            let (contracted, _) =
                apply_to_slot(field.node_vec(i), &dims, undotted as usize - 1, &ph_hat);
            for (a, b) in contracted.iter().zip(target.node_vec(i)) {
                res_undotted = res_undotted.max((*a - *b * creal(mass)).norm());
            }
        }
    }
    if dotted >= 1 {
        let target = pf_construct(f, dotted - 1, undotted + 1)?;
        for i in 0..field.grid.len() {
            let ph = to_hermitian(field.grid.node(i)).to_cmat();
            let (contracted, _) = apply_to_slot(field.node_vec(i), &dims, undotted as usize, &ph);
            for (a, b) in contracted.iter().zip(target.node_vec(i)) {
                res_dotted = res_dotted.max((*a - *b * creal(mass)).norm());
            }
        }
    }
    Ok((res_undotted / scale, res_dotted / scale))
}

/// Recover the Wigner amplitude from a Pauli-Fierz field.
pub fn pf_to_f<T: Scalar>(field: &SpinorField<T>) -> Result<WaveFunction<T>> {
    let mass = require_massive(&field.grid)?;
    let undotted = match field.layout {
        FieldLayout::PauliFierz { undotted, .. } => undotted,
        _ => {
            return Err(Error::InvalidConfig(
                "pf_to_f expects a Pauli-Fierz field".into(),
            ))
        }
    };
    let n = field.spin.twice() as usize;
    let d = field.spin.dim();
    let mut out = WaveFunction::zero(field.grid.clone(), field.spin);
    for i in 0..field.grid.len() {
        let l = boost(BoostChoice::Canonical, mass, field.grid.node(i))?;
        let lm_inv = l.inverse().mat().to_cmat();
        let lh_inv = l.hat().inverse().mat().to_cmat();
        let mut values = field.node_vec(i).to_vec();
        let dims = vec![2usize; n];
        for slot in 0..n {
            let op = if slot < undotted as usize { &lm_inv } else { &lh_inv };
            let (nv, _) = apply_to_slot(&values, &dims, slot, op);
            values = nv;
        }
        let f = symmetric_project(field.spin, &values);
        out.amps[i * d..(i + 1) * d].copy_from_slice(&f);
    }
    Ok(out)
}

/// The little-space intertwiner of the spin-3/2 vector-spinor: an isometric
/// map from the canonical spin-3/2 basis into
/// `{g in C^3 tensor C^2 : sigma . g = 0}`, built by lowering the highest
/// weight vector `e_+ tensor chi_up`. Returns a `6 x 4` matrix (rows indexed
/// `[cartesian][spinor]`), scaled so the vector-spinor map at the standard
/// momentum is an isometry.
fn rs_little_intertwiner<T: Scalar>() -> CMat<T> {
    // J_- on C^3 (cartesian, (J_k)_{lm} = -i eps_{klm}) tensor C^2
    let eps = |k: usize, l: usize, m: usize| -> f64 {
        match (k, l, m) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    let mut jv = [CMat::<T>::zeros(3, 3), CMat::<T>::zeros(3, 3)];
    for (k, mat) in jv.iter_mut().enumerate() {
        for l in 0..3 {
            for m in 0..3 {
                mat[(l, m)] = C::new(T::zero(), -T::real(eps(k, l, m)));
            }
        }
    }
    let jv_minus = &jv[0] - &jv[1].scale(C::new(T::zero(), T::one()));
    let mut js_minus = CMat::<T>::zeros(2, 2);
    js_minus[(1, 0)] = creal(T::one());
    let jminus = &jv_minus.kron(&CMat::identity(2)) + &CMat::identity(3).kron(&js_minus);

    // highest weight: e_+ tensor chi_up with e_+ = (-1, -i, 0)/sqrt(2)
    let inv_sqrt2 = T::real(1.0 / std::f64::consts::SQRT_2);
    let mut v = vec![czero::<T>(); 6];
    v[0] = C::new(-inv_sqrt2, T::zero());
    v[2] = C::new(T::zero(), -inv_sqrt2);
    let mut columns = vec![v];
    for _ in 0..3 {
        let next = jminus.mul_vec(columns.last().unwrap());
        let norm = next
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        columns.push(next.iter().map(|z| *z / creal(norm)).collect());
    }
    // the Dirac doubling at the standard momentum duplicates each spinor
    let mut g = CMat::zeros(6, 4);
    for (c, col) in columns.iter().enumerate() {
        for (r, val) in col.iter().enumerate() {
            g[(r, c)] = *val * creal(inv_sqrt2);
        }
    }
    g
}

/// Rarita-Schwinger vector-spinor for `s = 3/2`:
/// `psi^mu(p) = Lambda(L(p))^mu_nu B(p) g^nu` with `g` the little-space
/// solution. Satisfies the Dirac equation in the spinor index and the
/// constraint `gamma_mu psi^mu = 0`.
pub fn rarita_schwinger<T: Scalar>(f: &WaveFunction<T>) -> Result<SpinorField<T>> {
    let mass = require_massive(&f.grid)?;
    if f.spin.twice() != 3 {
        return Err(Error::InvalidSpin(
            "Rarita-Schwinger construction needs s = 3/2".into(),
        ));
    }
    let g_little = rs_little_intertwiner::<T>();
    let mut out = SpinorField::zero(f.grid.clone(), f.spin, FieldLayout::VectorSpinor);
    for i in 0..f.grid.len() {
        let p = f.grid.node(i);
        let l = boost(BoostChoice::Canonical, mass, p)?;
        let lam = covering_map(&l);
        let b = b_matrix(mass, p)?;
        let g6 = g_little.mul_vec(f.node_vec(i));
        // g^0 = 0, spatial spinors from the little-space solution
        let mut dirac_per_nu: Vec<Vec<C<T>>> = Vec::with_capacity(4);
        dirac_per_nu.push(vec![czero(); 4]);
        for k in 0..3 {
            let spinor = [g6[2 * k], g6[2 * k + 1]];
            dirac_per_nu.push(b.mul_vec(&spinor));
        }
        let node = out.node_vec_mut(i);
        for mu in 0..4 {
            for d in 0..4 {
                let mut acc = czero();
                for (nu, dn) in dirac_per_nu.iter().enumerate() {
                    acc += dn[d] * creal(lam.e[mu][nu]);
                }
                node[mu * 4 + d] = acc;
            }
        }
    }
    Ok(out)
}

/// `(max Dirac residual over mu, gamma-trace residual)` of a vector-spinor
/// field, both relative to `m |psi|`.
pub fn rs_residuals<T: Scalar>(field: &SpinorField<T>) -> Result<(T, T)> {
    let mass = require_massive(&field.grid)?;
    if field.layout != FieldLayout::VectorSpinor {
        return Err(Error::InvalidConfig(
            "rs_residuals expects a vector-spinor field".into(),
        ));
    }
    let half = SpinLabel::from_twice(1)?;
    let gammaset = gamma_matrices::<T>(half)?;
    let gam = gammaset.dirac_gammas().expect("spin 1/2");
    let scale = (T::one().max(field.max_abs())) * mass;
    let mut dirac_res = T::zero();
    let mut trace_res = T::zero();
    for i in 0..field.grid.len() {
        let p = field.grid.node(i);
        let mut slash = gammaset.contract(p);
        for d in 0..4 {
            slash[(d, d)] -= creal(mass);
        }
        let node = field.node_vec(i);
        let mut trace = vec![czero(); 4];
        for mu in 0..4 {
            let psi_mu = &node[mu * 4..(mu + 1) * 4];
            let r = slash.mul_vec(psi_mu);
            for v in &r {
                dirac_res = dirac_res.max(v.norm());
            }
            let eta = if mu == 0 { T::one() } else { -T::one() };
            let gv = gam[mu].mul_vec(psi_mu);
            for (t, g) in trace.iter_mut().zip(&gv) {
                *t += *g * creal(eta);
            }
        }
        for v in &trace {
            trace_res = trace_res.max(v.norm());
        }
    }
    Ok((dirac_res / scale, trace_res / scale))
}

/// Recover the Wigner amplitude from a vector-spinor field by inverting each
/// stage of the construction.
pub fn rs_to_f<T: Scalar>(field: &SpinorField<T>) -> Result<WaveFunction<T>> {
    let mass = require_massive(&field.grid)?;
    if field.layout != FieldLayout::VectorSpinor {
        return Err(Error::InvalidConfig(
            "rs_to_f expects a vector-spinor field".into(),
        ));
    }
    let g_little = rs_little_intertwiner::<T>();
    // columns are orthogonal with norm 1/sqrt(2)
    let g_pinv = g_little.adjoint().scale(creal(T::real(2.0)));
    let mut out = WaveFunction::zero(field.grid.clone(), field.spin);
    for i in 0..field.grid.len() {
        let p = field.grid.node(i);
        let l = boost(BoostChoice::Canonical, mass, p)?;
        let lam_inv = covering_map(&l).inverse();
        let b = b_matrix(mass, p)?;
        let b_pinv = {
            let btb = &b.adjoint() * &b;
            &btb.inverse()? * &b.adjoint()
        };
        let node = field.node_vec(i);
        let mut g6 = vec![czero(); 6];
        for nu in 1..4 {
            let mut dirac = vec![czero(); 4];
            for mu in 0..4 {
                for (d, slot) in dirac.iter_mut().enumerate() {
                    *slot += node[mu * 4 + d] * creal(lam_inv.e[nu][mu]);
                }
            }
            let spinor = b_pinv.mul_vec(&dirac);
            g6[2 * (nu - 1)] = spinor[0];
            g6[2 * (nu - 1) + 1] = spinor[1];
        }
        let f = g_pinv.mul_vec(&g6);
        out.amps[i * 4..(i + 1) * 4].copy_from_slice(&f);
    }
    Ok(out)
}

/// Quadrature Fourier transform
/// `phi(x) = (2 pi)^{-3/2} sum_nodes w phi(p) e^{-i p.x}` at the given
/// spacetime points; returns `[point][component]`.
pub fn x_space_transform<T: Scalar>(
    field: &SpinorField<T>,
    points: &[FourVector<T>],
) -> Vec<Vec<C<T>>> {
    let norm = creal(T::real((2.0 * std::f64::consts::PI).powf(-1.5)));
    points
        .iter()
        .map(|x| {
            let mut acc = vec![czero(); field.comps];
            for i in 0..field.grid.len() {
                let p = field.grid.node(i);
                let phase = cis(-minkowski_dot(p, x)) * creal(field.grid.weight(i));
                for (a, v) in acc.iter_mut().zip(field.node_vec(i)) {
                    *a += *v * phase;
                }
            }
            for a in acc.iter_mut() {
                *a *= norm;
            }
            acc
        })
        .collect()
}

/// Klein-Gordon residual of the x-space field at a point, by five-point
/// second differences with step `h`: `max_c |(box + m^2) phi_c(x)|`.
pub fn klein_gordon_residual<T: Scalar>(
    field: &SpinorField<T>,
    x: &FourVector<T>,
    h: T,
) -> Result<T> {
    let mass = require_massive(&field.grid)?;
    let mut points = vec![*x];
    for mu in 0..4 {
        let mut xp = *x;
        let mut xm = *x;
        xp.0[mu] += h;
        xm.0[mu] -= h;
        points.push(xp);
        points.push(xm);
    }
    let vals = x_space_transform(field, &points);
    let mut worst = T::zero();
    for c in 0..field.comps {
        let center = vals[0][c];
        let mut box_phi: C<T> = czero();
        for mu in 0..4 {
            let second = (vals[1 + 2 * mu][c] + vals[2 + 2 * mu][c] - center - center)
                * creal(T::one() / (h * h));
            let sign = if mu == 0 { T::one() } else { -T::one() };
            box_phi += second * creal(sign);
        }
        worst = worst.max((box_phi + center * creal(mass * mass)).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner_rep::{norm_sq, rep_apply, AngularScheme, PoincareElement};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(21)
    }

    fn grid() -> Arc<MomentumGrid<f64>> {
        MomentumGrid::build(
            MassShell::Massive { mass: 1.0 },
            6.0,
            6,
            AngularScheme::Lebedev26,
        )
        .unwrap()
    }

    fn spin(t: u32) -> SpinLabel {
        SpinLabel::from_twice(t).unwrap()
    }

    #[test]
    fn scalar_field_is_f() {
        let mut rng = rng();
        let f = WaveFunction::random(grid(), spin(0), &mut rng);
        let phi = phi_from_f(&f).unwrap();
        for i in 0..f.grid.len() {
            assert!((phi.node_vec(i)[0] - f.amp(i, 0)).norm() < 1e-15);
        }
        let chi = chi_from_f(&f).unwrap();
        assert!(phi.max_abs_diff(&chi) < 1e-12);
    }

    #[test]
    fn field_norms_match_wigner_norm() {
        let mut rng = rng();
        for twice in [1u32, 2, 3] {
            let f = WaveFunction::random(grid(), spin(twice), &mut rng);
            let phi = phi_from_f(&f).unwrap();
            let chi = chi_from_f(&f).unwrap();
            let n = norm_sq(&f);
            assert!((field_norm_sq(&phi).unwrap() - n).abs() / n < 1e-10);
            assert!((field_norm_sq(&chi).unwrap() - n).abs() / n < 1e-10);
        }
    }

    #[test]
    fn duality_holds() {
        let mut rng = rng();
        for twice in [2u32, 3] {
            let f = WaveFunction::random(grid(), spin(twice), &mut rng);
            let phi = phi_from_f(&f).unwrap();
            let chi = chi_from_f(&f).unwrap();
            let res = duality_residual(&phi, &chi).unwrap();
            assert!(res < 1e-10, "spin {twice}/2 duality residual {res:e}");
        }
        // s = 1/2: the momentum-space Dirac pair at 1e-12
        let f = WaveFunction::random(grid(), spin(1), &mut rng);
        let phi = phi_from_f(&f).unwrap();
        let chi = chi_from_f(&f).unwrap();
        assert!(duality_residual(&phi, &chi).unwrap() < 1e-12);
    }

    #[test]
    fn roundtrip_phi_chi() {
        let mut rng = rng();
        let f = WaveFunction::random(grid(), spin(2), &mut rng);
        let phi = phi_from_f(&f).unwrap();
        let chi = chi_from_f(&f).unwrap();
        assert!(field_to_f(&phi).unwrap().max_abs_diff(&f) < 1e-10);
        assert!(field_to_f(&chi).unwrap().max_abs_diff(&f) < 1e-10);
    }

    #[test]
    fn generalized_dirac_equation() {
        let mut rng = rng();
        for twice in [1u32, 2] {
            let f = WaveFunction::random(grid(), spin(twice), &mut rng);
            let psi = bispinor_from_f(&f).unwrap();
            let res = generalized_dirac_residual(&psi).unwrap();
            let tol = if twice == 1 { 1e-12 } else { 1e-10 };
            assert!(res < tol, "spin {twice}/2 residual {res:e}");
        }
    }

    #[test]
    fn b_matrix_is_dirac_eigenvector() {
        // (gamma . p / m) B(p) = B(p), the identity behind every construction
        let mut rng = rng();
        let g = grid();
        let gamma = gamma_matrices::<f64>(spin(1)).unwrap();
        use rand::Rng;
        for _ in 0..20 {
            let i = rng.random_range(0..g.len());
            let p = g.node(i);
            let b = b_matrix(1.0, p).unwrap();
            let slash = gamma.contract(p);
            let lhs = &slash * &b;
            assert!(lhs.max_abs_diff(&b) < 1e-12 * (1.0 + b.max_abs()));
        }
    }

    #[test]
    fn bw_field_properties() {
        let mut rng = rng();
        for twice in [1u32, 2, 3] {
            let f = WaveFunction::random(grid(), spin(twice), &mut rng);
            let psi = bw_construct(&f).unwrap();
            for (j, r) in bw_residual(&psi).unwrap().into_iter().enumerate() {
                assert!(r < 1e-10, "spin {twice}/2 index {j} residual {r:e}");
            }
            // symmetric under transposing the first Dirac index pair
            let n = twice as usize;
            if n >= 2 {
                for i in 0..psi.grid.len().min(8) {
                    let v = psi.node_vec(i);
                    for a in 0..4usize.pow(n as u32) {
                        let d0 = a % 4;
                        let d1 = (a / 4) % 4;
                        let swapped = a - d0 - d1 * 4 + d1 + d0 * 4;
                        assert!((v[a] - v[swapped]).norm() < 1e-14);
                    }
                }
            }
            let n0 = norm_sq(&f);
            assert!((bw_norm_sq(&psi).unwrap() - n0).abs() / n0 < 1e-10);
            assert!(bw_to_f(&psi).unwrap().max_abs_diff(&f) < 1e-10);
        }
    }

    #[test]
    fn bw_spin_half_is_the_dirac_bispinor() {
        let mut rng = rng();
        let f = WaveFunction::random(grid(), spin(1), &mut rng);
        let psi = bw_construct(&f).unwrap();
        let stacked = bispinor_from_f(&f).unwrap();
        assert!(psi.max_abs_diff(&stacked) < 1e-12);
    }

    #[test]
    fn pf_fields_and_equations() {
        let mut rng = rng();
        for twice in [1u32, 2, 3] {
            let f = WaveFunction::random(grid(), spin(twice), &mut rng);
            for dotted in 0..=twice {
                let undotted = twice - dotted;
                let field = pf_construct(&f, dotted, undotted).unwrap();
                let (ru, rd) = pf_residual(&f, &field).unwrap();
                assert!(
                    ru < 1e-10 && rd < 1e-10,
                    "split ({dotted},{undotted}): {ru:e} {rd:e}"
                );
                assert!(pf_to_f(&field).unwrap().max_abs_diff(&f) < 1e-9);
            }
        }
        let f = WaveFunction::random(grid(), spin(2), &mut rng);
        assert!(matches!(pf_construct(&f, 2, 2), Err(Error::InvalidSplit)));
    }

    #[test]
    fn pf_all_undotted_is_phi() {
        // the (0, 2s) split is the symmetric unfolding of phi
        let mut rng = rng();
        for twice in [1u32, 2] {
            let f = WaveFunction::random(grid(), spin(twice), &mut rng);
            let field = pf_construct(&f, 0, twice).unwrap();
            let phi = phi_from_f(&f).unwrap();
            for i in 0..f.grid.len() {
                let unfolded = symmetric_embed(f.spin, phi.node_vec(i));
                for (a, b) in field.node_vec(i).iter().zip(&unfolded) {
                    assert!((*a - *b).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pf_weyl_halves_at_spin_half() {
        let mut rng = rng();
        let f = WaveFunction::random(grid(), spin(1), &mut rng);
        let phi = phi_from_f(&f).unwrap();
        let chi = chi_from_f(&f).unwrap();
        let undotted_half = pf_construct(&f, 0, 1).unwrap();
        let dotted_half = pf_construct(&f, 1, 0).unwrap();
        assert!(undotted_half.max_abs_diff(&phi) < 1e-13);
        assert!(dotted_half.max_abs_diff(&chi) < 1e-13);
    }

    #[test]
    fn boost_identities() {
        // p_her hat(L) = m L and hat(p_her) L = m hat(L)
        let g = grid();
        let m = 1.0;
        for i in (0..g.len()).step_by(17) {
            let p = g.node(i);
            let l = boost(BoostChoice::Canonical, m, p).unwrap();
            let lhs = to_hermitian(p) * *l.hat().mat();
            let rhs = l.mat().scale(creal(m));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12 * (1.0 + rhs.max_abs()));
            let lhs2 = hat(&to_hermitian(p)) * *l.mat();
            let rhs2 = l.hat().mat().scale(creal(m));
            assert!(lhs2.max_abs_diff(&rhs2) < 1e-12 * (1.0 + rhs2.max_abs()));
        }
    }

    #[test]
    fn rarita_schwinger_constraints() {
        let mut rng = rng();
        let f = WaveFunction::random(grid(), spin(3), &mut rng);
        let psi = rarita_schwinger(&f).unwrap();
        let (dirac, trace) = rs_residuals(&psi).unwrap();
        assert!(dirac < 1e-10, "Dirac residual {dirac:e}");
        assert!(trace < 1e-10, "gamma-trace residual {trace:e}");
        assert!(rs_to_f(&psi).unwrap().max_abs_diff(&f) < 1e-9);
        assert!(rarita_schwinger(&WaveFunction::random(grid(), spin(1), &mut rng)).is_err());
    }

    #[test]
    fn rs_little_map_is_isometric_kernel_basis() {
        // columns scaled by 1/sqrt(2), orthogonal, and annihilated by sigma.g
        let g = rs_little_intertwiner::<f64>();
        let gram = &g.adjoint() * &g;
        let expect = CMat::identity(4).scale(num_complex::Complex::new(0.5, 0.0));
        assert!(gram.max_abs_diff(&expect) < 1e-13);
        let pauli = crate::linalg::pauli::<f64>();
        for c in 0..4 {
            // sigma . g = sum_k sigma_k g^k must vanish
            let mut out = [czero::<f64>(); 2];
            for k in 0..3 {
                let spinor = [g[(2 * k, c)], g[(2 * k + 1, c)]];
                let v = pauli[k].mul_vec(spinor);
                out[0] += v[0];
                out[1] += v[1];
            }
            assert!(out[0].norm() < 1e-14 && out[1].norm() < 1e-14);
        }
    }

    #[test]
    fn covariance_of_phi_under_grid_rotations() {
        // transporting f with the Wigner representation matches the covariant
        // transformation of the field
        let mut rng = rng();
        let g = grid();
        let s = spin(2);
        let f = WaveFunction::random(g.clone(), s, &mut rng);
        let rot = g.rotations()[7].clone();
        let a = FourVector::new(0.3, -0.2, 0.5, 0.1);
        let element = PoincareElement {
            translation: a,
            a: rot.su2,
        };
        let f2 = rep_apply(BoostChoice::Canonical, &element, &f).unwrap();
        let phi2 = phi_from_f(&f2).unwrap();
        let phi = phi_from_f(&f).unwrap();
        let d_a = spin_rep(s, &rot.su2);
        let node_perm = g.node_perm_of(&rot.angular_perm);
        let mut inverse = vec![0usize; node_perm.len()];
        for (j, &t) in node_perm.iter().enumerate() {
            inverse[t] = j;
        }
        for i in 0..g.len() {
            let p = g.node(i);
            let phase = cis(minkowski_dot(p, &a));
            let expect = d_a.mul_vec(phi.node_vec(inverse[i]));
            for k in 0..s.dim() {
                let got = phi2.node_vec(i)[k];
                assert!((got - phase * expect[k]).norm() < 1e-12 * (1.0 + expect[k].norm()));
            }
        }
    }

    #[test]
    fn x_space_single_mode_is_plane_wave() {
        let g = grid();
        let mut f = WaveFunction::zero(g.clone(), spin(0));
        let i0 = 42;
        f.amps[i0] = num_complex::Complex::new(1.0, 0.0);
        let phi = phi_from_f(&f).unwrap();
        let p = *g.node(i0);
        let xs = [
            FourVector::new(0.0, 0.0, 0.0, 0.0),
            FourVector::new(0.7, 0.1, -0.4, 0.2),
        ];
        let vals = x_space_transform(&phi, &xs);
        let norm = (2.0 * std::f64::consts::PI).powf(-1.5) * g.weight(i0);
        for (x, v) in xs.iter().zip(&vals) {
            let expect = cis(-minkowski_dot(&p, x)) * norm;
            assert!((v[0] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn x_space_value_at_origin_is_weighted_sum() {
        let mut rng = rng();
        let f = WaveFunction::random(grid(), spin(0), &mut rng);
        let phi = phi_from_f(&f).unwrap();
        let vals = x_space_transform(&phi, &[FourVector::zero()]);
        let direct =
            phi.grid.integrate(&phi.values) * creal((2.0 * std::f64::consts::PI).powf(-1.5));
        assert!((vals[0][0] - direct).norm() < 1e-13);
    }

    #[test]
    fn klein_gordon_second_difference_convergence() {
        let g = grid();
        let f = WaveFunction::gaussian(g, spin(0), 1.0);
        let phi = phi_from_f(&f).unwrap();
        let x = FourVector::new(0.3, 0.2, -0.1, 0.4);
        let scale = x_space_transform(&phi, &[x])[0][0].norm();
        let r1 = klein_gordon_residual(&phi, &x, 0.04).unwrap() / scale;
        let r2 = klein_gordon_residual(&phi, &x, 0.02).unwrap() / scale;
        // every node is an exact solution, so the only error is O(h^2)
        let ratio = r1 / r2;
        assert!(ratio > 3.0 && ratio < 5.0, "second-order ratio {ratio}");
        assert!(r2 < 1e-2);
    }

    #[test]
    fn all_constructions_recover_f() {
        let mut rng = rng();
        let f = WaveFunction::random(grid(), spin(3), &mut rng);
        let routes: Vec<WaveFunction<f64>> = vec![
            field_to_f(&phi_from_f(&f).unwrap()).unwrap(),
            field_to_f(&chi_from_f(&f).unwrap()).unwrap(),
            bw_to_f(&bw_construct(&f).unwrap()).unwrap(),
            pf_to_f(&pf_construct(&f, 1, 2).unwrap()).unwrap(),
            rs_to_f(&rarita_schwinger(&f).unwrap()).unwrap(),
        ];
        for (k, r) in routes.iter().enumerate() {
            let d = r.max_abs_diff(&f);
            assert!(d < 1e-9, "route {k} differs by {d:e}");
        }
    }
}
