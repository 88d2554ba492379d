mod common;

use std::f64::consts::PI;
use std::fs;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use vadg::harness::output::read_series;
use vadg::harness::{
    cfl_sweep, initial_condition, reversibility_study, run_simulation, InitialField, ProblemKind,
    ProblemParams, RunConfig,
};
use vadg::integrators::Scheme;
use vadg::{BasisSpec, Error, FluxMode, SpaceKind};

fn small(kind: ProblemKind) -> RunConfig {
    let mut c = RunConfig::preset(kind);
    // dv = 0.4 keeps the truncated velocity boundary negligible
    c.nx = 8;
    c.nv = 40;
    c.t_final = 0.5;
    c
}

#[test]
fn presets_pin_benchmark_parameters() {
    let cases = [
        (ProblemKind::Landau, 0.5, 0.5, 4.0 * PI, 8.0),
        (ProblemKind::TwoStream, 0.05, 0.5, 4.0 * PI, 8.0),
        (ProblemKind::BumpOnTail, 0.04, 0.3, 20.0 * PI / 3.0, 13.0),
    ];
    for (kind, a, k, l, vc) in cases {
        let p = ProblemParams::preset(kind);
        assert_eq!((p.amplitude, p.wavenumber, p.length, p.vmax), (a, k, l, vc));
        assert_eq!(p.e0, InitialField::Analytic);
    }
}

#[test]
fn initial_condition_examples() {
    let landau = initial_condition(&ProblemParams::preset(ProblemKind::Landau)).unwrap();
    assert_abs_diff_eq!(landau(0.0, 0.0), 1.5 / (2.0 * PI).sqrt(), epsilon = 1e-15);
    assert_abs_diff_eq!(landau(0.0, 0.0), 0.5984, epsilon = 1e-4);
    let ts = initial_condition(&ProblemParams::preset(ProblemKind::TwoStream)).unwrap();
    assert_eq!(ts(3.0, 0.0), 0.0);
}

#[test]
fn zero_horizon_writes_single_record() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::preset(ProblemKind::Landau);
    c.t_final = 0.0;
    c.output_dir = Some(dir.path().to_path_buf());
    c.snapshot_times = vec![0.0];
    let out = run_simulation(&c).unwrap();
    assert_eq!(out.records.len(), 1);
    assert_abs_diff_eq!(out.records[0].total_energy, 3.0 * PI, epsilon = 1e-6);
    let series = read_series(&dir.path().join("series.csv")).unwrap();
    assert_eq!(series, out.records);
    for name in ["f_t0000.0000.txt", "e_t0000.0000.txt", "rho_t0000.0000.txt", "summary.txt", "config.txt"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let back: RunConfig = fs::read_to_string(dir.path().join("config.txt")).unwrap().parse().unwrap();
    assert_eq!(back, c);
}

#[test]
fn identical_runs_write_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let mut c = small(ProblemKind::TwoStream);
        c.scheme.scheme = Scheme::S4;
        c.scheme.basis = BasisSpec::new(2, SpaceKind::TensorQ).unwrap();
        c.scheme.cfl = 2.0;
        c.output_dir = Some(dir.path().to_path_buf());
        c.snapshot_times = vec![0.25];
        run_simulation(&c).unwrap();
    }
    for name in ["series.csv", "summary.txt", "f_t0000.2500.txt", "e_t0000.2500.txt", "rho_t0000.2500.txt"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(!x.is_empty() && x == y, "{name} differs");
    }
}

#[test]
fn sampling_cadence_and_summary() {
    let mut c = small(ProblemKind::Landau);
    c.sample_interval = 0.1;
    let out = run_simulation(&c).unwrap();
    let times: Vec<f64> = out.records.iter().map(|r| r.t).collect();
    assert_eq!(times.len(), 6);
    for (i, t) in times.iter().enumerate() {
        assert_abs_diff_eq!(*t, 0.1 * i as f64, epsilon = 1e-12);
    }
    assert!(out.summary.max("mass").unwrap() <= 1e-12, "{}", out.summary);
    assert!(out.summary.max("modified_energy").is_none());
    assert!(out.summary.to_string().starts_with("quantity,min_relative_drift,max_relative_drift\n"));
}

#[test]
fn scheme3_runs_record_modified_energy() {
    let mut c = small(ProblemKind::Landau);
    c.scheme.scheme = Scheme::S3;
    c.scheme.cfl = 5.0;
    c.sample_interval = 0.25;
    let out = run_simulation(&c).unwrap();
    assert!(out.records.iter().all(|r| r.modified_energy.is_some()));
    assert!(out.summary.max("modified_energy").unwrap() <= 1e-10, "{}", out.summary);
}

#[test]
fn custom_problem_uses_gauss_consistent_field() {
    let mut c = small(ProblemKind::Custom);
    c.problem.populations[0].density = 0.5;
    c.problem.populations[1].density = 0.5;
    c.problem.populations[0].drift = -2.0;
    c.problem.populations[1].drift = 2.0;
    c.problem.amplitude = 0.05;
    c.problem.vmax = 12.0;
    c.nv = 60;
    c.scheme.flux = FluxMode::Central;
    c.scheme.cfl = 0.05;
    c.t_final = 0.2;
    let out = run_simulation(&c).unwrap();
    assert!(out.summary.max_gauss_law_defect <= 1e-10, "{}", out.summary.max_gauss_law_defect);
}

#[test]
fn sweep_reports_counts_and_failures() {
    let mut c = small(ProblemKind::Landau);
    c.scheme.scheme = Scheme::S4;
    c.scheme.basis = BasisSpec::new(1, SpaceKind::TensorQ).unwrap();
    c.t_final = 0.3;
    let rows = cfl_sweep(&c, &[1.0]).unwrap();
    assert!(rows[0].failure.is_none() && rows[0].nni >= 1.0 && rows[0].nli >= 0.0);

    c.scheme.solver.max_newton = 1;
    let rows = cfl_sweep(&c, &[1.0, 50.0]).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().any(|r| r.failure.is_some()));

    c.scheme.scheme = Scheme::S1;
    c.scheme.basis = BasisSpec::new(1, SpaceKind::TotalDegreeP).unwrap();
    assert!(cfl_sweep(&c, &[1.0]).is_err());
}

#[test]
fn solver_failures_carry_time_and_cfl() {
    let mut c = small(ProblemKind::Landau);
    c.scheme.scheme = Scheme::S4;
    c.scheme.basis = BasisSpec::new(1, SpaceKind::TensorQ).unwrap();
    c.scheme.solver.max_newton = 1;
    c.scheme.cfl = 50.0;
    c.sample_interval = 0.5;
    match run_simulation(&c) {
        Err(e @ Error::StepFailed { .. }) => {
            assert!(e.is_solver_failure());
            let Error::StepFailed { t, cfl, .. } = e else { unreachable!() };
            assert_eq!(t, 0.0);
            assert!(cfl > 0.0);
        }
        other => panic!("expected a step failure, got {other:?}"),
    }
}

#[test]
fn halving_retry_recovers_from_stalls() {
    let mut c = small(ProblemKind::Landau);
    c.scheme.scheme = Scheme::S4;
    c.scheme.basis = BasisSpec::new(1, SpaceKind::TensorQ).unwrap();
    c.scheme.solver.max_newton = 3;
    c.scheme.cfl = 20.0;
    c.sample_interval = 0.5;
    c.t_final = 0.5;
    let strict = run_simulation(&c);
    c.retry_halved_dt = true;
    let relaxed = run_simulation(&c);
    assert!(strict.is_err(), "the configuration should stall without retries");
    let out = relaxed.unwrap();
    assert!(out.steps > 1);
}

#[test]
fn reversibility_at_small_steps_is_spatially_limited() {
    let mut c = RunConfig::preset(ProblemKind::TwoStream);
    c.scheme.cfl = 0.05;
    let rows = reversibility_study(&c, 0.5, &[8, 16]).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].order_f.is_none());
    let order = rows[1].order_f.unwrap();
    assert!(order > 2.0, "order {order}");
    assert!(rows.iter().all(|r| r.error_f > 0.0 && r.error_e >= 0.0));
}

fn arb_config() -> impl Strategy<Value = RunConfig> {
    (
        prop_oneof![
            Just(ProblemKind::Landau),
            Just(ProblemKind::TwoStream),
            Just(ProblemKind::BumpOnTail),
            Just(ProblemKind::Custom)
        ],
        1usize..200,
        1usize..200,
        prop_oneof![Just(Scheme::S1), Just(Scheme::S2), Just(Scheme::S3), Just(Scheme::S4), Just(Scheme::S4F)],
        prop_oneof![Just(FluxMode::Upwind), Just(FluxMode::Central), Just(FluxMode::Downwind)],
        1usize..4,
        (1e-3f64..100.0, 0.0f64..100.0, 1e-3f64..10.0),
        prop::collection::vec(0.0f64..100.0, 0..4),
        (1e-2f64..2.0, -3.0f64..3.0, any::<bool>()),
    )
        .prop_map(|(kind, nx, nv, scheme, flux, degree, (cfl, t, dt_s), snaps, (a, drift, retry))| {
            let mut c = RunConfig::preset(kind);
            c.nx = nx;
            c.nv = nv;
            c.scheme.scheme = scheme;
            c.scheme.flux = flux;
            let kind = if scheme.requires_tensor() { SpaceKind::TensorQ } else { SpaceKind::TotalDegreeP };
            c.scheme.basis = BasisSpec::new(degree, kind).unwrap();
            c.scheme.cfl = cfl;
            c.t_final = t;
            c.sample_interval = dt_s;
            c.snapshot_times = snaps;
            c.problem.amplitude = a;
            c.problem.populations[1].drift = drift;
            c.retry_halved_dt = retry;
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips_through_text(c in arb_config()) {
        let back: RunConfig = c.to_string().parse().unwrap();
        prop_assert_eq!(back, c);
    }
}
