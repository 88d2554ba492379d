mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use common::{disc, landau_state};
use vadg::diagnostics::{kinetic_energy, modified_energy_s3, total_energy, total_mass};
use vadg::harness::initial_state;
use vadg::integrators::{
    cfl_dt, scheme_a, scheme_b, step, step_scheme3_detailed, Scheme, SchemeConfig, SystemState,
};
use vadg::{BasisSpec, DistributionField, FluxMode, PhaseMesh, SpaceKind, XField};

fn config(scheme: Scheme, kind: SpaceKind, flux: FluxMode) -> SchemeConfig {
    SchemeConfig::new(scheme, flux, BasisSpec::new(2, kind).unwrap(), 1.0).unwrap()
}

fn equilibrium(kind: SpaceKind) -> SystemState {
    let d = disc(4.0 * PI, 6.0, 6, 12, 2, kind);
    let f = DistributionField::project(&d, |_, v| (-(v * v) / 2.0).exp());
    SystemState::new(f, XField::zeros(&d), 0.0).unwrap()
}

#[test]
fn cfl_step_examples() {
    let mesh = PhaseMesh::new(4.0 * PI, 8.0, 100, 200).unwrap();
    let dt = cfl_dt(&mesh, 1.0, 0.13);
    let expected = 0.13 / (8.0 / (4.0 * PI / 100.0) + 1.0 / 0.08);
    assert_abs_diff_eq!(dt, expected, epsilon = 1e-16);
    assert_abs_diff_eq!(dt, 1.706888e-3, epsilon = 1e-9);
    assert_abs_diff_eq!(cfl_dt(&mesh, 1.0, 0.26), 2.0 * dt, epsilon = 1e-16);
}

#[test]
fn equilibrium_is_stationary_for_every_scheme() {
    for scheme in Scheme::ALL {
        let kind = if scheme.requires_tensor() { SpaceKind::TensorQ } else { SpaceKind::TotalDegreeP };
        let s0 = equilibrium(kind);
        let (s1, _) = step(&s0, 0.1, &config(scheme, kind, FluxMode::Upwind)).unwrap();
        assert!(s1.f.l2_distance(&s0.f).unwrap() <= 1e-12, "{}", scheme.as_str());
        assert!(s1.e.norm_sq() <= 1e-24, "{}", scheme.as_str());
        assert_abs_diff_eq!(s1.t, 0.1, epsilon = 1e-15);
    }
}

#[test]
fn zero_step_is_identity() {
    for scheme in [Scheme::S2, Scheme::S4] {
        let kind = if scheme == Scheme::S4 { SpaceKind::TensorQ } else { SpaceKind::TotalDegreeP };
        let (_, s0) = landau_state(scheme, 2, kind, 6, 12);
        let (s1, _) = step(&s0, 0.0, &config(scheme, kind, FluxMode::Upwind)).unwrap();
        assert!(s1.f.l2_distance(&s0.f).unwrap() <= 1e-14);
        assert!(s1.e.l2_distance(&s0.e).unwrap() <= 1e-14);
    }
}

#[test]
fn explicit_step_conserves_energy_for_quadratic_degree() {
    let (c, mut s) = landau_state(Scheme::S1, 2, SpaceKind::TotalDegreeP, 16, 32);
    let dt = cfl_dt(&s.f.disc().mesh, s.e.max_abs_nodal(), c.scheme.cfl);
    let te0 = total_energy(&s.f, &s.e);
    for _ in 0..20 {
        let prev = total_energy(&s.f, &s.e);
        s = step(&s, dt, &c.scheme).unwrap().0;
        assert!((total_energy(&s.f, &s.e) - prev).abs() / te0 <= 1e-11);
    }
}

#[test]
fn implicit_midpoint_conserves_energy() {
    for (scheme, kind) in [(Scheme::S2, SpaceKind::TotalDegreeP), (Scheme::S4, SpaceKind::TensorQ)] {
        let (_, s0) = landau_state(scheme, 2, kind, 8, 40);
        let (s1, _) = step(&s0, 0.3, &config(scheme, kind, FluxMode::Upwind)).unwrap();
        let (te0, te1) = (total_energy(&s0.f, &s0.e), total_energy(&s1.f, &s1.e));
        assert!((te1 - te0).abs() / te0 <= 1e-10, "{}: {}", scheme.as_str(), (te1 - te0) / te0);
        assert!((total_mass(&s1.f) - total_mass(&s0.f)).abs() <= 1e-10);
    }
}

/// Difference between two schemes after one step shrinks like dt^3.
fn local_agreement_rate(a: Scheme, b: Scheme, kind: SpaceKind) -> f64 {
    let (_, s0) = landau_state(a, 2, kind, 8, 16);
    let diff = |dt: f64| {
        let (sa, _) = step(&s0, dt, &config(a, kind, FluxMode::Upwind)).unwrap();
        let (sb, _) = step(&s0, dt, &config(b, kind, FluxMode::Upwind)).unwrap();
        sa.f.l2_distance(&sb.f).unwrap()
    };
    (diff(0.02) / diff(0.01)).log2()
}

#[test]
fn second_order_schemes_agree_locally() {
    let r = local_agreement_rate(Scheme::S2, Scheme::S1, SpaceKind::TotalDegreeP);
    assert!(r > 2.7, "S2 vs S1 rate {r}");
    let r = local_agreement_rate(Scheme::S4, Scheme::S2, SpaceKind::TensorQ);
    assert!(r > 2.7, "S4 vs S2 rate {r}");
}

#[test]
fn scheme3_modified_energy_identity() {
    let (_, s0) = landau_state(Scheme::S3, 2, SpaceKind::TotalDegreeP, 8, 40);
    let cfg = config(Scheme::S3, SpaceKind::TotalDegreeP, FluxMode::Upwind);
    let dt = 0.4;
    let a = step_scheme3_detailed(&s0, dt, &cfg).unwrap();
    let b = step_scheme3_detailed(&a.state, dt, &cfg).unwrap();
    let f1 = &a.state.f;
    let m1 = modified_energy_s3(f1, &a.e_half, &b.e_half).unwrap();
    let j = f1.current();
    let plain = 2.0 * total_energy(f1, &a.state.e) - 0.25 * dt * dt * j.norm_sq();
    assert!((m1 - plain).abs() / plain <= 1e-12);
    // constant along the trajectory
    let m0 = modified_energy_s3(&s0.f, &s0.e.axpy(0.5 * dt, &s0.f.current()).unwrap(), &a.e_half).unwrap();
    assert!((m1 - m0).abs() / m0 <= 1e-10, "{}", (m1 - m0) / m0);
}

#[test]
fn scheme3_without_current_is_stationary() {
    let s0 = equilibrium(SpaceKind::TotalDegreeP);
    let out = step_scheme3_detailed(&s0, 0.2, &config(Scheme::S3, SpaceKind::TotalDegreeP, FluxMode::Central)).unwrap();
    assert!(out.e_half.norm_sq() <= 1e-26);
    assert!(out.state.f.l2_distance(&s0.f).unwrap() <= 1e-12);
}

#[test]
fn x_advection_leaves_zero_speed_line_and_energy() {
    let d = disc(2.0 * PI, 3.0, 8, 3, 2, SpaceKind::TensorQ);
    let f = DistributionField::project(&d, |x, v| (1.5 + x.sin()) * (1.0 + v * v) * (2.0 + (v + x).cos()));
    let cfg = config(Scheme::S4, SpaceKind::TensorQ, FluxMode::Upwind);
    let (g, stats) = scheme_a(&f, 0.3, &cfg).unwrap();
    assert!((kinetic_energy(&g) - kinetic_energy(&f)).abs() / kinetic_energy(&f) <= 1e-12);
    assert!((total_mass(&g) - total_mass(&f)).abs() / total_mass(&f) <= 1e-12);
    // nv = 3, k = 2: the middle element's middle node sits at v = 0
    assert_eq!(stats.linear_solves, 3 * 3 - 1);
    let n = d.n();
    let node = |field: &DistributionField, i: usize, l: usize| {
        let x = d.mesh.x_at(i, d.line.rule.nodes[l]);
        field.eval(x, 0.0)
    };
    for i in 0..8 {
        for l in 0..n {
            assert_abs_diff_eq!(node(&g, i, l), node(&f, i, l), epsilon = 1e-13);
        }
    }
    let flat = DistributionField::project(&d, |_, v| 1.0 + v * v);
    let (h, _) = scheme_a(&flat, 0.3, &cfg).unwrap();
    assert!(h.l2_distance(&flat).unwrap() <= 1e-13);
}

#[test]
fn acceleration_step_conserves_node_energy() {
    // a long step carries the Vc = 8 tail out of the box, so widen it
    let mut c = common::landau_config(Scheme::S4, 2, SpaceKind::TensorQ, 6, 40);
    c.problem.vmax = 12.0;
    let s = initial_state(&c).unwrap();
    let cfg = config(Scheme::S4, SpaceKind::TensorQ, FluxMode::Upwind);
    let (f1, e1, _) = scheme_b(&s.f, &s.e, 0.5, &cfg).unwrap();
    let te = |f: &DistributionField, e: &XField| total_energy(f, e);
    let drift = (te(&f1, &e1) - te(&s.f, &s.e)).abs() / te(&s.f, &s.e);
    assert!(drift <= 1e-11, "{drift}");
    let zero = equilibrium(SpaceKind::TensorQ);
    let (f2, e2, _) = scheme_b(&zero.f, &zero.e, 0.5, &cfg).unwrap();
    assert!(f2.l2_distance(&zero.f).unwrap() <= 1e-13 && e2.norm_sq() <= 1e-26);
}

#[test]
fn triple_jump_with_central_flux_is_fourth_order() {
    // central flux: the reversed substep uses the same flux
    let (_, s0) = landau_state(Scheme::S4F, 2, SpaceKind::TensorQ, 6, 12);
    let cfg = config(Scheme::S4F, SpaceKind::TensorQ, FluxMode::Central);
    let run = |dt: f64, n: usize| {
        let mut s = s0.clone();
        for _ in 0..n {
            s = step(&s, dt, &cfg).unwrap().0;
        }
        s
    };
    let reference = run(0.025, 16);
    let e1 = run(0.2, 2).f.l2_distance(&reference.f).unwrap();
    let e2 = run(0.1, 4).f.l2_distance(&reference.f).unwrap();
    let rate = (e1 / e2).log2();
    assert!(rate > 3.5, "observed temporal order {rate}");
}

#[test]
fn split_scheme_rejects_total_degree_space() {
    let s = equilibrium(SpaceKind::TotalDegreeP);
    let mut cfg = config(Scheme::S2, SpaceKind::TotalDegreeP, FluxMode::Upwind);
    cfg.scheme = Scheme::S4;
    assert!(matches!(step(&s, 0.1, &cfg), Err(vadg::Error::InvalidConfig(_))));
}
