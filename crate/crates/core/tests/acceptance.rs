//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Every tolerance is pinned here; no threshold is deferred to runtime
//! configuration.

use num_complex::Complex;
use poincare_core::fields;
use poincare_core::irreps::{spin_j_matrices, spin_rep, SpinLabel};
use poincare_core::linalg::{CMat, Mat2};
use poincare_core::mackey_finite::{verify_mackey, SemidirectProduct};
use poincare_core::minkowski::{covering_map, to_hermitian, FourVector, SL2C};
use poincare_core::orbits::{
    boost, helicity_boost, wigner_rotation, BoostChoice, MassShell,
};
use poincare_core::scalar::{cis, creal};
use poincare_core::spinstat::{
    self, effective_eps_seq, fock_build, radial_oracle_extrapolated, BracketSign, KernelConfig,
    ModeSet, Statistics,
};
use poincare_core::verification::kron_symmetrization_oracle;
use poincare_core::wigner_rep::{
    inner_product, norm_sq, rep_apply, rep_apply_massless, AngularScheme, MomentumGrid,
    PoincareElement, WaveFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

struct Criterion {
    number: u32,
    name: &'static str,
    checks: Vec<(String, f64, f64)>,
    started: Instant,
    budget: Option<f64>,
}

impl Criterion {
    fn new(number: u32, name: &'static str, budget_secs: Option<f64>) -> Self {
        Criterion {
            number,
            name,
            checks: Vec::new(),
            started: Instant::now(),
            budget: budget_secs,
        }
    }

    fn check(&mut self, label: impl Into<String>, residual: f64, tolerance: f64) {
        self.checks.push((label.into(), residual, tolerance));
    }

    fn finish(mut self) {
        if let Some(budget) = self.budget {
            let elapsed = self.started.elapsed().as_secs_f64();
            self.checks
                .push((format!("runtime {elapsed:.2}s (budget {budget}s)"), elapsed, budget));
        }
        let pass = self.checks.iter().all(|(_, r, t)| r < t);
        println!(
            "criterion {} ({}): {}",
            self.number,
            self.name,
            if pass { "PASS" } else { "FAIL" }
        );
        for (label, residual, tol) in &self.checks {
            if residual >= tol {
                println!("    FAIL {label}: residual {residual:e} >= tolerance {tol:e}");
            }
        }
        assert!(pass, "criterion {} failed", self.number);
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn criterion_1_covering_map() {
    let mut c = Criterion::new(1, "covering map", Some(5.0));
    let mut r = rng(101);
    let mut hom: f64 = 0.0;
    let mut kernel: f64 = 0.0;
    for _ in 0..1000 {
        let a = SL2C::<f64>::random(&mut r);
        let b = SL2C::<f64>::random(&mut r);
        let lhs = covering_map(&(a * b));
        let rhs = covering_map(&a).compose(&covering_map(&b));
        hom = hom.max(lhs.relative_diff(&rhs));
        kernel = kernel.max(covering_map(&a).max_abs_diff(&covering_map(&-a)));
    }
    c.check("homomorphism over 1000 random pairs", hom, 1e-12);
    c.check("kernel lambda(A) = lambda(-A)", kernel, 1e-15);
    let mut det: f64 = 0.0;
    for _ in 0..1000 {
        let x = FourVector::new(
            r.random_range(-2.0..2.0),
            r.random_range(-2.0..2.0),
            r.random_range(-2.0..2.0),
            r.random_range(-2.0..2.0),
        );
        let d: Complex<f64> = to_hermitian(&x).det();
        det = det.max((d.re - x.norm_sq()).abs().max(d.im.abs()));
    }
    c.check("det(x_her) = x.x over 1000 random x", det, 1e-12);
    c.finish();
}

#[test]
fn criterion_2_irreps() {
    let mut c = Criterion::new(2, "finite-dimensional irreps", Some(10.0));
    let mut r = rng(102);
    let mut oracle: f64 = 0.0;
    let mut unitary: f64 = 0.0;
    for twice in [1u32, 2, 3, 4] {
        let s = SpinLabel::from_twice(twice).unwrap();
        for _ in 0..50 {
            let a = SL2C::<f64>::random(&mut r);
            let d = spin_rep(s, &a);
            oracle = oracle.max(d.relative_diff(&kron_symmetrization_oracle(twice, &a)));
            let u = SL2C::<f64>::random_su2(&mut r);
            unitary = unitary.max(spin_rep(s, &u).unitarity_residual());
        }
    }
    c.check("Kronecker-symmetrization oracle, 50 each", oracle, 1e-10);
    c.check("SU(2) restriction unitary", unitary, 1e-12);
    c.finish();
}

#[test]
fn criterion_3_boosts_and_wigner_rotations() {
    let mut c = Criterion::new(3, "boosts and Wigner rotations", None);
    let mut r = rng(103);
    let m = 1.0;
    let random_p = |r: &mut ChaCha8Rng| {
        let x: f64 = r.random_range(-3.0..3.0);
        let y: f64 = r.random_range(-3.0..3.0);
        let z: f64 = r.random_range(-3.0..3.0);
        FourVector::new((m * m + x * x + y * y + z * z).sqrt(), x, y, z)
    };
    let mut defining: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_p(&mut r);
        for choice in [BoostChoice::Canonical, BoostChoice::Helicity] {
            let l = boost(choice, m, &p).unwrap();
            let prod = *l.mat() * l.mat().adjoint();
            defining = defining.max(prod.max_abs_diff(&to_hermitian(&p).scale(creal(1.0 / m))));
        }
    }
    c.check("L L^dag = p_her/m on 1000 momenta, both sections", defining, 1e-12);

    let mut in_su2: f64 = 0.0;
    for _ in 0..200 {
        let p = random_p(&mut r);
        let a = SL2C::<f64>::random(&mut r);
        let w = wigner_rotation(BoostChoice::Canonical, m, &p, &a).unwrap();
        in_su2 = in_su2
            .max((*w.mat() * w.mat().adjoint()).max_abs_diff(&Mat2::identity()))
            .max(w.det_residual());
        let wh = wigner_rotation(BoostChoice::Helicity, m, &p, &a).unwrap();
        in_su2 = in_su2
            .max((*wh.mat() * wh.mat().adjoint()).max_abs_diff(&Mat2::identity()))
            .max(wh.det_residual());
    }
    c.check("massive Wigner rotation lands in SU(2)", in_su2, 1e-12);

    let mut cocycle: f64 = 0.0;
    for _ in 0..200 {
        let p = random_p(&mut r);
        let a = SL2C::<f64>::random(&mut r);
        let b = SL2C::<f64>::random(&mut r);
        let lhs = wigner_rotation(BoostChoice::Canonical, m, &p, &(a * b)).unwrap();
        let bp = covering_map(&b).apply(&p);
        let rhs = wigner_rotation(BoostChoice::Canonical, m, &bp, &a).unwrap()
            * wigner_rotation(BoostChoice::Canonical, m, &p, &b).unwrap();
        cocycle = cocycle.max(lhs.max_abs_diff(&rhs));
    }
    c.check("cocycle identity on 200 random triples", cocycle, 1e-10);

    let mut helicity: f64 = 0.0;
    for twice in [1u32, 2, 3] {
        let s = SpinLabel::from_twice(twice).unwrap();
        let [j1, j2, j3] = spin_j_matrices::<f64>(s);
        for _ in 0..25 {
            let p = random_p(&mut r);
            let (rot, _h) = helicity_boost(m, &p).unwrap();
            let d = spin_rep(s, &rot);
            let lhs = &(&d * &j3) * &d.inverse().unwrap();
            let sp = p.spatial();
            let nr = p.spatial_norm();
            let mut rhs = CMat::zeros(s.dim(), s.dim());
            for (jk, nk) in [&j1, &j2, &j3]
                .into_iter()
                .zip([sp[0] / nr, sp[1] / nr, sp[2] / nr])
            {
                rhs = &rhs + &jk.scale(creal(nk));
            }
            helicity = helicity.max(lhs.max_abs_diff(&rhs));
        }
    }
    c.check("helicity conjugation D(R) J3 D(R)^-1 = J.n", helicity, 1e-10);
    c.finish();
}

#[test]
fn criterion_4_wigner_representation() {
    let mut c = Criterion::new(4, "Wigner representation on grids", None);
    let mut r = rng(104);
    let m = 1.0;
    let grid = MomentumGrid::build(
        MassShell::Massive { mass: m },
        6.0,
        12,
        AngularScheme::Lebedev26,
    )
    .unwrap();
    let spin = SpinLabel::from_twice(1).unwrap();
    let f = WaveFunction::random(grid.clone(), spin, &mut r);
    let rv = |r: &mut ChaCha8Rng| {
        FourVector::new(
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        )
    };
    let mut rep_res: f64 = 0.0;
    let mut unit_res: f64 = 0.0;
    for (i, j) in [(3usize, 11usize), (7, 20), (15, 9)] {
        let g1 = PoincareElement {
            translation: rv(&mut r),
            a: grid.rotations()[i].su2,
        };
        let g2 = PoincareElement {
            translation: rv(&mut r),
            a: grid.rotations()[j].su2,
        };
        let seq = rep_apply(
            BoostChoice::Canonical,
            &g1,
            &rep_apply(BoostChoice::Canonical, &g2, &f).unwrap(),
        )
        .unwrap();
        let combined = rep_apply(BoostChoice::Canonical, &g1.compose(&g2), &f).unwrap();
        rep_res = rep_res.max(seq.max_abs_diff(&combined) / f.max_abs());
        unit_res = unit_res.max(((norm_sq(&seq) - norm_sq(&f)) / norm_sq(&f)).abs());
    }
    c.check("representation property, translation x octahedral", rep_res, 1e-12);
    c.check("unitarity on the exact subgroup", unit_res, 1e-12);

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
    let g = PoincareElement {
        translation: rv(&mut r),
        a: grid.rotations()[13].su2,
    };
    let lhs = rep_apply(BoostChoice::Canonical, &g, &intertwine(&f)).unwrap();
    let rhs = intertwine(&rep_apply(BoostChoice::Helicity, &g, &f).unwrap());
    c.check(
        "boost-section equivalence intertwiner",
        lhs.max_abs_diff(&rhs) / f.max_abs(),
        1e-10,
    );

    // massless stabilizer phases
    let cone = MomentumGrid::build(MassShell::<f64>::Massless, 4.0, 8, AngularScheme::Lebedev26)
        .unwrap();
    let s0 = SpinLabel::from_twice(0).unwrap();
    let fm = WaveFunction::random(cone.clone(), s0, &mut r);
    let phi = std::f64::consts::FRAC_PI_2;
    let a = SL2C::new_unchecked(Mat2::diag(cis(phi / 2.0), cis(-phi / 2.0)));
    let mut phase_res: f64 = 0.0;
    for two_lambda in [-3i32, -1, 0, 2] {
        let out = rep_apply_massless(two_lambda, &PoincareElement::homogeneous(a), &fm).unwrap();
        for i in 0..cone.len() {
            let p = cone.node(i);
            if p[1].abs() < 1e-14 && p[2].abs() < 1e-14 && p[3] > 0.0 {
                let expect = cis(two_lambda as f64 / 2.0 * phi) * fm.amps[i];
                phase_res = phase_res.max((out.amps[i] - expect).norm());
            }
        }
    }
    c.check("massless stabilizer phases e^{i lambda phi}", phase_res, 1e-12);
    c.finish();
}

#[test]
fn criterion_5_mackey_exact() {
    let mut c = Criterion::new(5, "finite Mackey classification (exact)", Some(30.0));
    for group in [
        SemidirectProduct::s3(),
        SemidirectProduct::d4(),
        SemidirectProduct::a4(),
        SemidirectProduct::z5_rtimes_z4(),
        SemidirectProduct::heisenberg_z3(),
    ] {
        let name = group.name.clone();
        let report = verify_mackey(&group, true, 105).unwrap();
        c.check(
            format!("{name}: exact mode available"),
            if report.exact_mode { 0.0 } else { 1.0 },
            0.5,
        );
        for chk in &report.checks {
            // irreducibility / inequivalence / completeness are exact;
            // multiplicativity, unitarity and the imprimitivity system carry
            // the 1e-12 float tolerance; the restriction multiplicities are
            // a quadrature-free character sum at 1e-10
            let tol: f64 = if chk.name.contains("imprimitivity") || chk.name.contains("induced_is")
            {
                1e-12
            } else if chk.name.contains("restriction") {
                1e-10
            } else {
                0.5
            };
            c.check(
                format!("{name}: {}", chk.name),
                if chk.pass { chk.residual } else { chk.residual.max(1.0) },
                tol,
            );
        }
        let total: usize = report
            .orbits
            .iter()
            .flat_map(|o| o.induced_dims.iter().map(|d| d * d))
            .sum();
        c.check(
            format!("{name}: sum of squared dimensions = |G|"),
            (total as f64 - report.order as f64).abs(),
            0.5,
        );
    }
    c.finish();
}

#[test]
fn criterion_6_fields() {
    let mut c = Criterion::new(6, "classical fields for arbitrary spin", None);
    let mut r = rng(106);
    let grid = MomentumGrid::build(
        MassShell::Massive { mass: 1.0 },
        6.0,
        6,
        AngularScheme::Lebedev26,
    )
    .unwrap();

    let f_half = WaveFunction::random(grid.clone(), SpinLabel::from_twice(1).unwrap(), &mut r);
    let bispinor = fields::bispinor_from_f(&f_half).unwrap();
    c.check(
        "Dirac residual at s = 1/2",
        fields::generalized_dirac_residual(&bispinor).unwrap(),
        1e-12,
    );

    let mut duality: f64 = 0.0;
    let mut bw: f64 = 0.0;
    let mut pf: f64 = 0.0;
    let mut norms: f64 = 0.0;
    for twice in [1u32, 2, 3] {
        let s = SpinLabel::from_twice(twice).unwrap();
        let f = WaveFunction::random(grid.clone(), s, &mut r);
        let phi = fields::phi_from_f(&f).unwrap();
        let chi = fields::chi_from_f(&f).unwrap();
        duality = duality.max(fields::duality_residual(&phi, &chi).unwrap());
        let n = norm_sq(&f);
        norms = norms
            .max(((fields::field_norm_sq(&phi).unwrap() - n) / n).abs())
            .max(((fields::field_norm_sq(&chi).unwrap() - n) / n).abs());
        let psi = fields::bw_construct(&f).unwrap();
        for res in fields::bw_residual(&psi).unwrap() {
            bw = bw.max(res);
        }
        norms = norms.max(((fields::bw_norm_sq(&psi).unwrap() - n) / n).abs());
        for dotted in 0..=twice {
            let field = fields::pf_construct(&f, dotted, twice - dotted).unwrap();
            let (ru, rd) = fields::pf_residual(&f, &field).unwrap();
            pf = pf.max(ru).max(rd);
        }
    }
    c.check("duality relations, s <= 3/2", duality, 1e-10);
    c.check("Bargmann-Wigner equations, s <= 3/2", bw, 1e-10);
    c.check("Pauli-Fierz equations, all splits, s <= 3/2", pf, 1e-10);
    c.check("norm equalities under quadrature", norms, 1e-10);

    let f32_ = WaveFunction::random(grid, SpinLabel::from_twice(3).unwrap(), &mut r);
    let rs = fields::rarita_schwinger(&f32_).unwrap();
    let (dirac, trace) = fields::rs_residuals(&rs).unwrap();
    c.check("Rarita-Schwinger Dirac equation per index", dirac, 1e-10);
    c.check("Rarita-Schwinger gamma-trace constraint", trace, 1e-10);
    c.finish();
}

#[test]
fn criterion_7_spin_statistics() {
    let mut c = Criterion::new(7, "spin-statistics dichotomy", Some(120.0));
    let m = 1.0;
    let cfg = KernelConfig::<f64>::default();
    let chi = 0.25f64;
    let points: Vec<FourVector<f64>> = [1.0, 2.0, 4.0]
        .iter()
        .map(|d| FourVector::new(d * chi.sinh() / m, 0.0, 0.0, d * chi.cosh() / m))
        .collect();
    let verdict = spinstat::spin_statistics_verdict(&[0, 1, 2], m, &points, &cfg, 1e3).unwrap();
    for row in &verdict.rows {
        c.check(
            format!(
                "s = {}/2 at m d = {:.0}: wrong/right ratio {:.2e}",
                row.twice_spin, row.proper_distance, row.ratio
            ),
            1e3 / row.ratio.max(1e-300),
            1.0,
        );
        c.check(
            format!(
                "s = {}/2 at m d = {:.0}: right-sign magnitudes decrease",
                row.twice_spin, row.proper_distance
            ),
            if row.monotone { 0.0 } else { 1.0 },
            0.5,
        );
    }

    // Delta_1 against the independent radial oracle at the test points
    let s0 = SpinLabel::from_twice(0).unwrap();
    for d in [1.0f64, 2.0, 4.0] {
        let xi = FourVector::new(0.0, 0.0, 0.0, d);
        let eps_used = effective_eps_seq(&cfg, m, &xi);
        let oracle = radial_oracle_extrapolated(m, &xi, BracketSign::Anticommutator, &eps_used);
        let pipeline =
            spinstat::bracket_kernel(s0, m, &xi, BracketSign::Anticommutator, &cfg).unwrap();
        c.check(
            format!("Delta_1 vs radial oracle at m r = {d}"),
            (pipeline.extrapolated[(0, 0)] - oracle).norm() / oracle.norm(),
            1e-2,
        );
    }

    // timelike Delta against the oracle
    let xi_t = FourVector::new(2.0, 0.0, 0.0, 0.0);
    let delta = spinstat::jordan_pauli_delta(m, &xi_t, &cfg, 0.05).unwrap();
    let eps_t = effective_eps_seq(&cfg, m, &xi_t);
    let oracle_t = radial_oracle_extrapolated(m, &xi_t, BracketSign::Commutator, &eps_t).im;
    c.check(
        "timelike Delta vs radial oracle",
        (delta.value - oracle_t).abs() / oracle_t.abs(),
        5e-3,
    );
    c.finish();
}

#[test]
fn criterion_8_fock_algebra() {
    let mut c = Criterion::new(8, "Fock algebra and field covariance", None);
    let grid = MomentumGrid::build(
        MassShell::Massive { mass: 1.0 },
        6.0,
        4,
        AngularScheme::Lebedev26,
    )
    .unwrap();
    let nodes = spinstat::z_axis_nodes(&grid, 2);

    let fermi = ModeSet::at_nodes(
        grid.clone(),
        SpinLabel::from_twice(1).unwrap(),
        &nodes,
        Statistics::Fermi,
        1,
    )
    .unwrap();
    let alg_f = fock_build(&fermi, 4096).unwrap();
    c.check("CAR exact", alg_f.ccr_residual(), 1e-14);

    let bose = ModeSet::at_nodes(
        grid.clone(),
        SpinLabel::from_twice(0).unwrap(),
        &nodes,
        Statistics::Bose,
        3,
    )
    .unwrap();
    let alg_b = fock_build(&bose, 4096).unwrap();
    c.check("CCR exact below the cutoff", alg_b.ccr_residual(), 1e-12);

    // smeared-bracket factorization against the kernel quadrature
    let mk = |dim: usize| -> Vec<(FourVector<f64>, Vec<Complex<f64>>)> {
        vec![
            (
                FourVector::new(0.1, 0.2, -0.1, 0.3),
                (0..dim)
                    .map(|k| Complex::new(1.0 + 0.3 * k as f64, 0.2 - 0.1 * k as f64))
                    .collect(),
            ),
            (
                FourVector::new(-0.2, 0.0, 0.4, 0.1),
                (0..dim)
                    .map(|k| Complex::new(-0.5 + 0.1 * k as f64, 0.6))
                    .collect(),
            ),
        ]
    };
    let check_f = spinstat::smeared_bracket_check(&alg_f, &fermi, &mk(2), &mk(2)).unwrap();
    let denom = 1.0 + check_f.kernel_scalar.norm();
    c.check(
        "smeared bracket scalar matches kernel quadrature (Fermi)",
        (check_f.operator_scalar - check_f.kernel_scalar).norm() / denom,
        1e-10,
    );
    c.check(
        "smeared bracket proportional to the identity (Fermi)",
        check_f.off_identity_residual / denom,
        1e-10,
    );
    let check_b = spinstat::smeared_bracket_check(&alg_b, &bose, &mk(1), &mk(1)).unwrap();
    let denom_b = 1.0 + check_b.kernel_scalar.norm();
    c.check(
        "smeared bracket scalar matches kernel quadrature (Bose, below cutoff)",
        (check_b.operator_scalar - check_b.kernel_scalar).norm() / denom_b,
        1e-10,
    );

    // covariance on a 2-mode Fermi space: translations and a z-quarter-turn
    let fermi1 = ModeSet::at_nodes(
        grid.clone(),
        SpinLabel::from_twice(1).unwrap(),
        &nodes[..1],
        Statistics::Fermi,
        1,
    )
    .unwrap();
    let alg1 = fock_build(&fermi1, 64).unwrap();
    let points = [FourVector::zero(), FourVector::new(0.3, -0.5, 0.2, 0.7)];
    let shift = PoincareElement::translation(FourVector::new(0.9, 0.1, -0.4, 0.2));
    c.check(
        "covariance under translations",
        spinstat::covariance_residual(&alg1, &fermi1, &shift, &points).unwrap(),
        1e-10,
    );
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
    c.check(
        "covariance under an octahedral rotation (2-mode Fermi)",
        spinstat::covariance_residual(&alg1, &fermi1, &element, &points).unwrap(),
        1e-10,
    );
    c.finish();
}

#[test]
fn inner_products_are_consistent_across_reports() {
    // small glue check: the inner product used by the criteria above is the
    // quadrature scalar product
    let grid = MomentumGrid::build(
        MassShell::Massive { mass: 1.0 },
        6.0,
        4,
        AngularScheme::Lebedev26,
    )
    .unwrap();
    let s = SpinLabel::from_twice(0).unwrap();
    let mut r = rng(1);
    let f = WaveFunction::random(grid.clone(), s, &mut r);
    let n = norm_sq(&f);
    let ip: Complex<f64> = inner_product(&f, &f).unwrap();
    assert!((ip.re - n).abs() < 1e-14 * n);
    assert!(ip.im.abs() < 1e-14 * n);
}
