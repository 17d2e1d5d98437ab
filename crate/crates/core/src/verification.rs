//! Named invariant suites for every module, consumed by the command-line
//! `verify` subcommand and by the acceptance tests.
//!
//! Each check reports its tolerance and the measured residual; residuals of
//! algebraic identities are scale-relative (see the module docs), so a
//! reported value is comparable to its tolerance regardless of operand size.

use crate::error::Result;
use crate::fields;
use crate::irreps::{self, spin_rep, SpinLabel};
use crate::linalg::{CMat, Mat2};
use crate::mackey_finite::{self, SemidirectProduct};
use crate::minkowski::{
    covering_map, minkowski_dot, to_hermitian, FourVector, SL2C,
};
use crate::orbits::{
    boost, default_cone_floor, helicity_boost, massless_boost,
    massless_little_group_decompose, massless_wigner_element, random_massive_momentum,
    random_massless_momentum, wigner_rotation, BoostChoice, MassShell,
};
use crate::scalar::{cis, creal, czero};
use crate::spinstat::{
    self, effective_eps_seq, fock_build, radial_oracle_extrapolated, BracketSign, KernelConfig,
    ModeSet, Statistics,
};
use crate::wigner_rep::{
    covariant_apply, covariant_form, covariant_to_f, inner_product, norm_sq, rep_apply,
    rep_apply_massless, AngularScheme, MomentumGrid, PoincareElement, WaveFunction,
};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Configuration of the verification run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub mass: f64,
    pub p_max_factor: f64,
    pub n_radial: usize,
    pub eps_seq: Vec<f64>,
    /// Test hook: corrupt the symplectic-matrix convention and watch the
    /// named invariant fail.
    pub corrupt_epsilon: bool,
    /// Reduce trial counts for fast smoke runs.
    pub quick: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 7,
            mass: 1.0,
            p_max_factor: 6.0,
            n_radial: 32,
            eps_seq: vec![0.2, 0.1, 0.05, 0.025],
            corrupt_epsilon: false,
            quick: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvariantResult {
    pub module: String,
    pub name: String,
    pub tolerance: f64,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub seed: u64,
    pub results: Vec<InvariantResult>,
    pub pass: bool,
}

struct Suite {
    results: Vec<InvariantResult>,
}

impl Suite {
    fn new() -> Self {
        Suite {
            results: Vec::new(),
        }
    }

    fn push(&mut self, module: &str, name: &str, tolerance: f64, residual: f64) {
        self.results.push(InvariantResult {
            module: module.into(),
            name: name.into(),
            tolerance,
            residual,
            pass: residual < tolerance,
        });
    }
}

/// Independent oracle for the spin representations: project the 2s-fold
/// Kronecker power onto the symmetric subspace in the normalized occupation
/// basis.
pub fn kron_symmetrization_oracle(twice_s: u32, a: &SL2C<f64>) -> CMat<f64> {
    let n = twice_s as usize;
    let dim2n = 1usize << n;
    let mut big = CMat::identity(1);
    for _ in 0..n {
        big = big.kron(&a.mat().to_cmat());
    }
    let mut basis = CMat::zeros(dim2n, n + 1);
    for k in 0..=n {
        let count = (0..dim2n)
            .filter(|idx| idx.count_ones() as usize == n - k)
            .count();
        let norm = 1.0 / (count as f64).sqrt();
        for idx in 0..dim2n {
            if idx.count_ones() as usize == n - k {
                basis[(idx, n - k)] = Complex::new(norm, 0.0);
            }
        }
    }
    &(&basis.adjoint() * &big) * &basis
}

fn random_vec(rng: &mut ChaCha8Rng, scale: f64) -> FourVector<f64> {
    FourVector::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

fn verify_minkowski(cfg: &VerifyConfig, suite: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x11);
    let pairs = if cfg.quick { 100 } else { 1000 };

    let mut worst_hom: f64 = 0.0;
    let mut worst_kernel: f64 = 0.0;
    let mut worst_member: f64 = 0.0;
    for _ in 0..pairs {
        let a = SL2C::<f64>::random(&mut rng);
        let b = SL2C::<f64>::random(&mut rng);
        let lhs = covering_map(&(a * b));
        let rhs = covering_map(&a).compose(&covering_map(&b));
        worst_hom = worst_hom.max(lhs.relative_diff(&rhs));
        worst_member = worst_member.max(lhs.restricted_residual());
        worst_kernel = worst_kernel.max(covering_map(&a).max_abs_diff(&covering_map(&-a)));
    }
    suite.push("minkowski", "covering_homomorphism", 1e-12, worst_hom);
    suite.push("minkowski", "covering_kernel_plus_minus", 1e-15, worst_kernel);
    suite.push("minkowski", "restricted_group_membership", 1e-12, worst_member);

    let mut worst_rot: f64 = 0.0;
    for _ in 0..(pairs / 10).max(20) {
        let u = SL2C::<f64>::random_su2(&mut rng);
        worst_rot = worst_rot.max(covering_map(&u).rotation_residual());
    }
    suite.push("minkowski", "su2_maps_to_rotations", 1e-12, worst_rot);

    let mut worst_det: f64 = 0.0;
    for _ in 0..pairs {
        let x = random_vec(&mut rng, 2.0);
        let d = to_hermitian(&x).det();
        worst_det = worst_det.max((d.re - x.norm_sq()).abs().max(d.im.abs()));
    }
    suite.push("minkowski", "det_equals_minkowski_square", 1e-12, worst_det);

    // hat operation; the corruption hook replaces the antisymmetric
    // convention with a symmetric matrix, which breaks hat(A) = (A^dag)^{-1}
    let eps = if cfg.corrupt_epsilon {
        Mat2::new(czero(), creal(1.0), creal(1.0), czero())
    } else {
        crate::minkowski::epsilon::<f64>()
    };
    let eps_inv = eps.inverse().unwrap();
    let mut worst_hat: f64 = 0.0;
    for _ in 0..(pairs / 10).max(20) {
        let a = SL2C::<f64>::random(&mut rng);
        let hat_a = eps * a.mat().conj() * eps_inv;
        let prod = hat_a * a.mat().adjoint();
        worst_hat = worst_hat
            .max(prod.max_abs_diff(&Mat2::identity()) / (1.0f64).max(prod.max_abs()));
    }
    suite.push("minkowski", "hat_is_adjoint_inverse", 1e-12, worst_hat);
}

fn verify_irreps(cfg: &VerifyConfig, suite: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x22);
    let pairs = if cfg.quick { 30 } else { 200 };
    let mut worst_rep: f64 = 0.0;
    let mut worst_unit: f64 = 0.0;
    let mut worst_det: f64 = 0.0;
    for twice in 1..=6u32 {
        let s = SpinLabel::from_twice(twice).unwrap();
        for _ in 0..pairs / 4 {
            let a = SL2C::<f64>::random(&mut rng);
            let b = SL2C::<f64>::random(&mut rng);
            let lhs = spin_rep(s, &(a * b));
            let rhs = &spin_rep(s, &a) * &spin_rep(s, &b);
            worst_rep = worst_rep.max(lhs.relative_diff(&rhs));
            let u = SL2C::<f64>::random_su2(&mut rng);
            worst_unit = worst_unit.max(spin_rep(s, &u).unitarity_residual());
            let d = spin_rep(s, &a);
            let scale = d.max_abs().powi(d.rows() as i32).max(1.0);
            worst_det = worst_det.max((d.det() - Complex::new(1.0, 0.0)).norm() / scale);
        }
    }
    suite.push("irreps", "representation_property", 1e-12, worst_rep);
    suite.push("irreps", "su2_restriction_unitary", 1e-12, worst_unit);
    suite.push("irreps", "determinant_one", 1e-10, worst_det);

    let trials = if cfg.quick { 10 } else { 50 };
    let mut worst_oracle: f64 = 0.0;
    for twice in [1u32, 2, 3, 4] {
        let s = SpinLabel::from_twice(twice).unwrap();
        for _ in 0..trials {
            let a = SL2C::<f64>::random(&mut rng);
            let d = spin_rep(s, &a);
            let o = kron_symmetrization_oracle(twice, &a);
            worst_oracle = worst_oracle.max(d.relative_diff(&o));
        }
    }
    suite.push("irreps", "kronecker_symmetrization_oracle", 1e-10, worst_oracle);

    let mut count_ok = true;
    for twice in 0..=6u32 {
        let s = SpinLabel::from_twice(twice).unwrap();
        let sig = irreps::extract_sigma::<f64>(s).unwrap();
        let n = twice as usize;
        if sig.monomials.len() != (n + 1) * (n + 2) * (n + 3) / 6 {
            count_ok = false;
        }
    }
    suite.push("irreps", "sigma_symmetric_count", 0.5, if count_ok { 0.0 } else { 1.0 });
}

fn verify_orbits(cfg: &VerifyConfig, suite: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x33);
    let m = cfg.mass;
    let trials = if cfg.quick { 100 } else { 1000 };
    let mut worst_boost: f64 = 0.0;
    for _ in 0..trials {
        let p = random_massive_momentum::<f64, _>(&mut rng, m, 3.0 * m);
        for choice in [BoostChoice::Canonical, BoostChoice::Helicity] {
            let l = boost(choice, m, &p).unwrap();
            let target = to_hermitian(&p).scale(creal(1.0 / m));
            let prod = *l.mat() * l.mat().adjoint();
            worst_boost = worst_boost.max(prod.max_abs_diff(&target));
        }
    }
    suite.push("orbits", "boost_defining_identity", 1e-12, worst_boost);

    let mut worst_su2: f64 = 0.0;
    for _ in 0..(trials / 5).max(50) {
        let p = random_massive_momentum::<f64, _>(&mut rng, m, 3.0 * m);
        let a = SL2C::<f64>::random(&mut rng);
        let w = wigner_rotation(BoostChoice::Canonical, m, &p, &a).unwrap();
        let unit = (*w.mat() * w.mat().adjoint()).max_abs_diff(&Mat2::identity());
        worst_su2 = worst_su2.max(unit).max(w.det_residual());
    }
    suite.push("orbits", "wigner_rotation_in_su2", 1e-12, worst_su2);

    let cocycle_trials = if cfg.quick { 40 } else { 200 };
    let mut worst_cocycle: f64 = 0.0;
    for _ in 0..cocycle_trials {
        let p = random_massive_momentum::<f64, _>(&mut rng, m, 2.0 * m);
        let a = SL2C::<f64>::random(&mut rng);
        let b = SL2C::<f64>::random(&mut rng);
        let lhs = wigner_rotation(BoostChoice::Canonical, m, &p, &(a * b)).unwrap();
        let bp = covering_map(&b).apply(&p);
        let rhs = wigner_rotation(BoostChoice::Canonical, m, &bp, &a).unwrap()
            * wigner_rotation(BoostChoice::Canonical, m, &p, &b).unwrap();
        worst_cocycle = worst_cocycle.max(lhs.max_abs_diff(&rhs));
    }
    suite.push("orbits", "wigner_cocycle", 1e-10, worst_cocycle);

    // helicity: conjugated J3 equals J . p_hat
    let mut worst_hel: f64 = 0.0;
    for twice in [1u32, 2, 3] {
        let s = SpinLabel::from_twice(twice).unwrap();
        let [j1, j2, j3] = irreps::spin_j_matrices::<f64>(s);
        for _ in 0..if cfg.quick { 5 } else { 25 } {
            let p = random_massive_momentum::<f64, _>(&mut rng, m, 3.0 * m);
            let (r, _h) = helicity_boost(m, &p).unwrap();
            let d = spin_rep(s, &r);
            let lhs = &(&d * &j3) * &d.inverse().unwrap();
            let sp = p.spatial();
            let nr = p.spatial_norm();
            let mut rhs = CMat::zeros(s.dim(), s.dim());
            for (jk, nk) in [&j1, &j2, &j3].into_iter().zip([sp[0] / nr, sp[1] / nr, sp[2] / nr]) {
                rhs = &rhs + &jk.scale(creal(nk));
            }
            worst_hel = worst_hel.max(lhs.max_abs_diff(&rhs));
        }
    }
    suite.push("orbits", "helicity_conjugation", 1e-10, worst_hel);

    let mut worst_massless: f64 = 0.0;
    let pi_her = to_hermitian(&MassShell::<f64>::Massless.standard_momentum());
    for _ in 0..(trials / 5).max(50) {
        let p = random_massless_momentum::<f64, _>(&mut rng, 4.0);
        let l = massless_boost(&p, default_cone_floor()).unwrap();
        let lhs = *l.mat() * pi_her * l.mat().adjoint();
        worst_massless = worst_massless.max(lhs.max_abs_diff(&to_hermitian(&p)));
        let a = SL2C::<f64>::random(&mut rng);
        let w = massless_wigner_element(&p, &a, default_cone_floor()).unwrap();
        let stab = (*w.mat() * pi_her * w.mat().adjoint()).max_abs_diff(&pi_her);
        worst_massless = worst_massless.max(stab);
        let (trans, phi) = massless_little_group_decompose(&w).unwrap();
        let rebuilt = crate::orbits::massless_little_group_compose(trans, phi);
        worst_massless = worst_massless.max(rebuilt.max_abs_diff(&w).min(
            // the (a, phi) chart is 2:1; allow the sign partner
            rebuilt.max_abs_diff(&-w),
        ));
    }
    suite.push("orbits", "massless_section_and_little_group", 1e-10, worst_massless);
}

fn verify_wigner_rep(cfg: &VerifyConfig, suite: &mut Suite) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x44);
    let m = cfg.mass;
    let n_rad = if cfg.quick { 6 } else { 12 };
    let grid = MomentumGrid::build(
        MassShell::Massive { mass: m },
        cfg.p_max_factor * m,
        n_rad,
        AngularScheme::Lebedev26,
    )?;
    let spin = SpinLabel::from_twice(1).unwrap();
    let f = WaveFunction::random(grid.clone(), spin, &mut rng);
    let g1 = PoincareElement {
        translation: random_vec(&mut rng, 1.0),
        a: grid.rotations()[5].su2,
    };
    let g2 = PoincareElement {
        translation: random_vec(&mut rng, 1.0),
        a: grid.rotations()[17].su2,
    };
    let seq = rep_apply(
        BoostChoice::Canonical,
        &g1,
        &rep_apply(BoostChoice::Canonical, &g2, &f)?,
    )?;
    let combined = rep_apply(BoostChoice::Canonical, &g1.compose(&g2), &f)?;
    suite.push(
        "wigner_rep",
        "representation_property_grid_subgroup",
        1e-12,
        seq.max_abs_diff(&combined) / f.max_abs().max(1.0),
    );
    let n0 = norm_sq(&f);
    suite.push(
        "wigner_rep",
        "unitarity_grid_subgroup",
        1e-12,
        ((norm_sq(&seq) - n0) / n0).abs(),
    );
    let h = WaveFunction::random(grid.clone(), spin, &mut rng);
    let fg = inner_product(&f, &h)?;
    let ufug = inner_product(
        &rep_apply(BoostChoice::Canonical, &g1, &f)?,
        &rep_apply(BoostChoice::Canonical, &g1, &h)?,
    )?;
    suite.push(
        "wigner_rep",
        "inner_product_preserved",
        1e-12,
        (fg - ufug).norm() / fg.norm().max(1.0),
    );

    // covariant route equals the direct representation
    let psi = covariant_form(BoostChoice::Canonical, &f)?;
    let via = covariant_to_f(BoostChoice::Canonical, &covariant_apply(&g1, &psi)?)?;
    let direct = rep_apply(BoostChoice::Canonical, &g1, &f)?;
    suite.push(
        "wigner_rep",
        "covariant_form_route",
        1e-10,
        via.max_abs_diff(&direct) / f.max_abs().max(1.0),
    );

    // boost-section equivalence through the pointwise intertwiner
    let intertwine = |wf: &WaveFunction<f64>| -> WaveFunction<f64> {
        let mut out = WaveFunction::zero(wf.grid.clone(), wf.spin);
        for i in 0..wf.grid.len() {
            let p = wf.grid.node(i);
            let lc = boost(BoostChoice::Canonical, m, p).unwrap();
            let lh = boost(BoostChoice::Helicity, m, p).unwrap();
            let k = spin_rep(wf.spin, &(lc.inverse() * lh));
            let v = k.mul_vec(wf.node_vec(i));
            out.amps[i * wf.spin.dim()..(i + 1) * wf.spin.dim()].copy_from_slice(&v);
        }
        out
    };
    let lhs = rep_apply(BoostChoice::Canonical, &g1, &intertwine(&f))?;
    let rhs = intertwine(&rep_apply(BoostChoice::Helicity, &g1, &f)?);
    suite.push(
        "wigner_rep",
        "boost_section_equivalence",
        1e-10,
        lhs.max_abs_diff(&rhs) / f.max_abs().max(1.0),
    );

    // massless stabilizer phases: quarter turn about z on axis nodes
    let cone = MomentumGrid::build(
        MassShell::<f64>::Massless,
        4.0,
        n_rad,
        AngularScheme::Lebedev26,
    )?;
    let s0 = SpinLabel::from_twice(0).unwrap();
    let fm = WaveFunction::random(cone.clone(), s0, &mut rng);
    let phi_angle = std::f64::consts::FRAC_PI_2;
    let a = SL2C::new_unchecked(Mat2::diag(cis(phi_angle / 2.0), cis(-phi_angle / 2.0)));
    let mut worst_phase: f64 = 0.0;
    for two_lambda in [-2i32, 1, 2] {
        let out = rep_apply_massless(two_lambda, &PoincareElement::homogeneous(a), &fm)?;
        for i in 0..cone.len() {
            let p = cone.node(i);
            if p[1].abs() < 1e-14 && p[2].abs() < 1e-14 && p[3] > 0.0 {
                let expect = cis(two_lambda as f64 / 2.0 * phi_angle) * fm.amps[i];
                worst_phase = worst_phase.max((out.amps[i] - expect).norm());
            }
        }
    }
    suite.push("wigner_rep", "massless_stabilizer_phases", 1e-12, worst_phase);
    Ok(())
}

fn verify_mackey_module(cfg: &VerifyConfig, suite: &mut Suite) -> Result<()> {
    let groups = if cfg.quick {
        vec![SemidirectProduct::s3(), SemidirectProduct::d4()]
    } else {
        vec![
            SemidirectProduct::s3(),
            SemidirectProduct::d4(),
            SemidirectProduct::a4(),
            SemidirectProduct::z5_rtimes_z4(),
            SemidirectProduct::heisenberg_z3(),
        ]
    };
    for g in groups {
        let report = mackey_finite::verify_mackey(&g, true, cfg.seed)?;
        let worst = report
            .checks
            .iter()
            .map(|c| if c.pass { c.residual } else { c.residual.max(1.0) })
            .fold(0.0f64, f64::max);
        suite.push(
            "mackey_finite",
            &format!("classification_{}", g.name),
            1e-12,
            worst,
        );
        suite.push(
            "mackey_finite",
            &format!("exact_mode_{}", g.name),
            0.5,
            if report.exact_mode { 0.0 } else { 1.0 },
        );
    }
    Ok(())
}

fn verify_fields(cfg: &VerifyConfig, suite: &mut Suite) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x55);
    let m = cfg.mass;
    let grid = MomentumGrid::build(
        MassShell::Massive { mass: m },
        cfg.p_max_factor * m,
        if cfg.quick { 4 } else { 6 },
        AngularScheme::Lebedev26,
    )?;

    let f_half = WaveFunction::random(grid.clone(), SpinLabel::from_twice(1).unwrap(), &mut rng);
    let psi = fields::bispinor_from_f(&f_half)?;
    suite.push(
        "fields",
        "dirac_residual_spin_half",
        1e-12,
        fields::generalized_dirac_residual(&psi)?,
    );

    let mut worst_dual: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for twice in [1u32, 2, 3] {
        let f = WaveFunction::random(grid.clone(), SpinLabel::from_twice(twice).unwrap(), &mut rng);
        let phi = fields::phi_from_f(&f)?;
        let chi = fields::chi_from_f(&f)?;
        worst_dual = worst_dual.max(fields::duality_residual(&phi, &chi)?);
        let n = norm_sq(&f);
        worst_norm = worst_norm
            .max(((fields::field_norm_sq(&phi)? - n) / n).abs())
            .max(((fields::field_norm_sq(&chi)? - n) / n).abs());
        let bw = fields::bw_construct(&f)?;
        worst_norm = worst_norm.max(((fields::bw_norm_sq(&bw)? - n) / n).abs());
    }
    suite.push("fields", "duality_relations", 1e-10, worst_dual);
    suite.push("fields", "norm_equalities", 1e-10, worst_norm);

    let mut worst_bw: f64 = 0.0;
    for twice in [1u32, 2, 3] {
        let f = WaveFunction::random(grid.clone(), SpinLabel::from_twice(twice).unwrap(), &mut rng);
        let bw = fields::bw_construct(&f)?;
        for r in fields::bw_residual(&bw)? {
            worst_bw = worst_bw.max(r);
        }
    }
    suite.push("fields", "bargmann_wigner_equations", 1e-10, worst_bw);

    let mut worst_pf: f64 = 0.0;
    for twice in [1u32, 2, 3] {
        let f = WaveFunction::random(grid.clone(), SpinLabel::from_twice(twice).unwrap(), &mut rng);
        for dotted in 0..=twice {
            let field = fields::pf_construct(&f, dotted, twice - dotted)?;
            let (ru, rd) = fields::pf_residual(&f, &field)?;
            worst_pf = worst_pf.max(ru).max(rd);
        }
    }
    suite.push("fields", "pauli_fierz_equations", 1e-10, worst_pf);

    let f32_ = WaveFunction::random(grid.clone(), SpinLabel::from_twice(3).unwrap(), &mut rng);
    let rs = fields::rarita_schwinger(&f32_)?;
    let (dirac, trace) = fields::rs_residuals(&rs)?;
    suite.push("fields", "rarita_schwinger_constraints", 1e-10, dirac.max(trace));

    // equivalence: every construction recovers the Wigner amplitude
    let mut worst_eq: f64 = 0.0;
    let scale = f32_.max_abs().max(1.0);
    worst_eq = worst_eq
        .max(fields::field_to_f(&fields::phi_from_f(&f32_)?)?.max_abs_diff(&f32_) / scale)
        .max(fields::field_to_f(&fields::chi_from_f(&f32_)?)?.max_abs_diff(&f32_) / scale)
        .max(fields::bw_to_f(&fields::bw_construct(&f32_)?)?.max_abs_diff(&f32_) / scale)
        .max(fields::pf_to_f(&fields::pf_construct(&f32_, 1, 2)?)?.max_abs_diff(&f32_) / scale)
        .max(fields::rs_to_f(&rs)?.max_abs_diff(&f32_) / scale);
    suite.push("fields", "construction_equivalence", 1e-9, worst_eq);

    // covariance of phi under a grid rotation (transport f, compare fields)
    let s1 = SpinLabel::from_twice(2).unwrap();
    let f1 = WaveFunction::random(grid.clone(), s1, &mut rng);
    let rot = grid.rotations()[7].clone();
    let a_vec = random_vec(&mut rng, 0.7);
    let element = PoincareElement {
        translation: a_vec,
        a: rot.su2,
    };
    let phi2 = fields::phi_from_f(&rep_apply(BoostChoice::Canonical, &element, &f1)?)?;
    let phi1 = fields::phi_from_f(&f1)?;
    let d_a = spin_rep(s1, &rot.su2);
    let node_perm = grid.node_perm_of(&rot.angular_perm);
    let mut inverse = vec![0usize; node_perm.len()];
    for (j, &t) in node_perm.iter().enumerate() {
        inverse[t] = j;
    }
    let mut worst_cov: f64 = 0.0;
    for i in 0..grid.len() {
        let p = grid.node(i);
        let phase = cis(minkowski_dot(p, &a_vec));
        let expect = d_a.mul_vec(phi1.node_vec(inverse[i]));
        for k in 0..s1.dim() {
            worst_cov = worst_cov
                .max((phi2.node_vec(i)[k] - phase * expect[k]).norm() / f1.max_abs().max(1.0));
        }
    }
    suite.push("fields", "momentum_space_covariance", 1e-12, worst_cov);
    Ok(())
}

fn verify_spinstat(cfg: &VerifyConfig, suite: &mut Suite) -> Result<()> {
    let m = cfg.mass;
    let kcfg = KernelConfig::<f64> {
        eps_seq: cfg.eps_seq.clone(),
        ..KernelConfig::default()
    };

    let grid = MomentumGrid::build(
        MassShell::Massive { mass: m },
        cfg.p_max_factor * m,
        4,
        AngularScheme::Lebedev26,
    )?;
    let nodes = spinstat::z_axis_nodes(&grid, 2);

    // CAR / CCR
    let fermi = ModeSet::at_nodes(
        grid.clone(),
        SpinLabel::from_twice(1).unwrap(),
        &nodes,
        Statistics::Fermi,
        1,
    )?;
    let alg_f = fock_build(&fermi, spinstat::DEFAULT_FOCK_DIM_BOUND)?;
    suite.push("spinstat", "car_exact", 1e-14, alg_f.ccr_residual());
    let bose = ModeSet::at_nodes(
        grid.clone(),
        SpinLabel::from_twice(0).unwrap(),
        &nodes,
        Statistics::Bose,
        3,
    )?;
    let alg_b = fock_build(&bose, spinstat::DEFAULT_FOCK_DIM_BOUND)?;
    suite.push("spinstat", "ccr_below_cutoff", 1e-12, alg_b.ccr_residual());

    // covariance under a translation and a z-quarter-turn on a 2-mode space
    let fermi1 = ModeSet::at_nodes(
        grid.clone(),
        SpinLabel::from_twice(1).unwrap(),
        &nodes[..1],
        Statistics::Fermi,
        1,
    )?;
    let alg1 = fock_build(&fermi1, 64)?;
    let points = [
        FourVector::zero(),
        FourVector::new(0.3, -0.5, 0.2, 0.7),
    ];
    let shift = PoincareElement::translation(FourVector::new(0.9, 0.1, -0.4, 0.2));
    let res_t = spinstat::covariance_residual(&alg1, &fermi1, &shift, &points)?;
    let rot = grid
        .rotations()
        .iter()
        .find(|r| (r.matrix[2][2] - 1.0).abs() < 1e-12 && (r.matrix[0][1] + 1.0).abs() < 1e-12)
        .expect("quarter turn about z")
        .clone();
    let element = PoincareElement {
        translation: FourVector::new(0.2, 0.0, 0.1, -0.3),
        a: rot.su2,
    };
    let res_r = spinstat::covariance_residual(&alg1, &fermi1, &element, &points)?;
    suite.push("spinstat", "field_covariance_translation", 1e-12, res_t);
    suite.push("spinstat", "field_covariance_rotation", 1e-10, res_r);

    // smeared-bracket factorization
    let mk = |dim: usize| -> Vec<(FourVector<f64>, Vec<num_complex::Complex<f64>>)> {
        vec![(
            FourVector::new(0.1, 0.2, -0.1, 0.3),
            (0..dim)
                .map(|k| Complex::new(1.0 + 0.3 * k as f64, 0.2 - 0.1 * k as f64))
                .collect(),
        )]
    };
    let check = spinstat::smeared_bracket_check(&alg_f, &fermi, &mk(2), &mk(2))?;
    let denom = 1.0 + check.kernel_scalar.norm();
    suite.push(
        "spinstat",
        "smeared_bracket_factorization",
        1e-10,
        ((check.operator_scalar - check.kernel_scalar).norm() / denom)
            .max(check.off_identity_residual / denom),
    );

    // sign dichotomy and refinement monotonicity
    let chi = 0.25f64;
    let distances = if cfg.quick { vec![2.0] } else { vec![1.0, 2.0, 4.0] };
    let pts: Vec<FourVector<f64>> = distances
        .iter()
        .map(|d| FourVector::new(d * chi.sinh() / m, 0.0, 0.0, d * chi.cosh() / m))
        .collect();
    let spins: &[u32] = if cfg.quick { &[0, 1] } else { &[0, 1, 2] };
    let verdict = spinstat::spin_statistics_verdict(spins, m, &pts, &kcfg, 1e3)?;
    let worst_ratio = verdict
        .rows
        .iter()
        .map(|r| 1.0 / r.ratio.max(1e-300))
        .fold(0.0f64, f64::max);
    suite.push("spinstat", "sign_dichotomy_ratio", 1e-3, worst_ratio);
    suite.push(
        "spinstat",
        "right_sign_monotone_refinement",
        0.5,
        if verdict.rows.iter().all(|r| r.monotone) {
            0.0
        } else {
            1.0
        },
    );

    // Jordan-Pauli: antisymmetry, spacelike suppression, oracle agreement
    let xi_space = FourVector::new(0.5 / m, 2.2 / m, 0.0, 0.0);
    let d_plus = spinstat::jordan_pauli_delta(m, &xi_space, &kcfg, 0.05)?;
    let d_minus = spinstat::jordan_pauli_delta(m, &(-xi_space), &kcfg, 0.05)?;
    suite.push(
        "spinstat",
        "delta_antisymmetry",
        1e-12,
        (d_plus.value + d_minus.value).abs(),
    );
    let anti = spinstat::bracket_kernel(
        SpinLabel::from_twice(0).unwrap(),
        m,
        &xi_space,
        BracketSign::Anticommutator,
        &kcfg,
    )?
    .extrapolated
    .max_abs();
    suite.push(
        "spinstat",
        "delta_spacelike_suppression",
        1e-3,
        d_plus.value.abs() / anti,
    );
    // Delta_1 against the 1-D radial oracle at m r = 2
    let xi_d1 = FourVector::new(0.0, 0.0, 0.0, 2.0 / m);
    let eps_used = effective_eps_seq(&kcfg, m, &xi_d1);
    let oracle = radial_oracle_extrapolated(m, &xi_d1, BracketSign::Anticommutator, &eps_used);
    let pipeline = spinstat::bracket_kernel(
        SpinLabel::from_twice(0).unwrap(),
        m,
        &xi_d1,
        BracketSign::Anticommutator,
        &kcfg,
    )?
    .extrapolated[(0, 0)];
    suite.push(
        "spinstat",
        "delta1_matches_radial_oracle",
        1e-2,
        (pipeline - oracle).norm() / oracle.norm(),
    );
    let xi_time = FourVector::new(2.0 / m, 0.0, 0.0, 0.0);
    let d_time = spinstat::jordan_pauli_delta(m, &xi_time, &kcfg, 0.05)?;
    let eps_time = effective_eps_seq(&kcfg, m, &xi_time);
    let oracle_time =
        radial_oracle_extrapolated(m, &xi_time, BracketSign::Commutator, &eps_time).im;
    suite.push(
        "spinstat",
        "timelike_delta_matches_oracle",
        5e-3,
        (d_time.value - oracle_time).abs() / oracle_time.abs(),
    );
    Ok(())
}

/// Run every module suite and collect the named results.
pub fn run_all(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut suite = Suite::new();
    verify_minkowski(cfg, &mut suite);
    verify_irreps(cfg, &mut suite);
    verify_orbits(cfg, &mut suite);
    verify_wigner_rep(cfg, &mut suite)?;
    verify_mackey_module(cfg, &mut suite)?;
    verify_fields(cfg, &mut suite)?;
    verify_spinstat(cfg, &mut suite)?;
    let pass = suite.results.iter().all(|r| r.pass);
    Ok(VerifyReport {
        schema: crate::schema::SCHEMA_VERSION,
        seed: cfg.seed,
        results: suite.results,
        pass,
    })
}
