use slowfast_core::analysis::{
    estimate_period, find_equilibria, seed_grid, segment_slow_fast, Section, SpeedLabel,
    DEFAULT_PERIOD_WINDOW,
};
use slowfast_core::systems::SystemId;
use slowfast_core::{integrate, IntegratorConfig, State, SystemSpec, Trajectory};

fn vdp_run(t_final: f64, rtol: f64, refine: usize) -> Trajectory {
    let cfg = IntegratorConfig {
        t_final,
        rtol,
        atol: rtol * 1e-3,
        refine,
        ..IntegratorConfig::default()
    };
    integrate(
        &SystemSpec::vanderpol(0.05),
        &State::new(0.0, vec![2.0, 0.0]),
        &cfg,
        None,
    )
    .unwrap()
}

fn vdp_period(rtol: f64, refine: usize) -> f64 {
    let traj = vdp_run(30.0, rtol, refine);
    let spec = SystemSpec::vanderpol(0.05);
    let est = estimate_period(&traj, &Section::default_for(&spec), DEFAULT_PERIOD_WINDOW).unwrap();
    assert!(est.converged);
    est.period.unwrap()
}

#[test]
fn period_is_stable_across_tolerance_and_refine() {
    let base = vdp_period(1e-6, 4);
    assert!((vdp_period(1e-8, 4) - base).abs() < 1e-3);
    for refine in [1, 10] {
        assert!((vdp_period(1e-6, refine) - base).abs() < 1e-3);
    }
}

#[test]
fn equilibrium_at_origin_has_no_crossings() {
    let cfg = IntegratorConfig {
        t_final: 10.0,
        ..IntegratorConfig::default()
    };
    let spec = SystemSpec::vanderpol(0.05);
    let traj = integrate(&spec, &State::new(0.0, vec![0.0, 0.0]), &cfg, None).unwrap();
    let est = estimate_period(&traj, &Section::default_for(&spec), 5).unwrap();
    assert!(!est.converged);
    assert!(est.period.is_none());
}

#[test]
fn segmentation_partitions_and_alternates() {
    let traj = vdp_run(20.0, 1e-6, 4);
    let seg = segment_slow_fast(&SystemSpec::vanderpol(0.05), &traj, None).unwrap();
    assert_eq!(seg.segments[0].start, 0);
    assert_eq!(seg.segments.last().unwrap().end, traj.refined_points.len() - 1);
    for w in seg.segments.windows(2) {
        assert_eq!(w[1].start, w[0].end + 1);
        assert_ne!(w[0].label, w[1].label);
    }
    let ratio = seg.mean_speed(SpeedLabel::Fast).unwrap() / seg.mean_speed(SpeedLabel::Slow).unwrap();
    assert!(ratio > 5.0, "ratio {ratio}");
}

#[test]
fn segmentation_is_robust_to_small_threshold_changes() {
    let spec = SystemSpec::vanderpol(0.05);
    let traj = vdp_run(20.0, 1e-6, 4);
    let base = segment_slow_fast(&spec, &traj, None).unwrap();
    let labels = base.labels();
    for factor in [0.99, 1.01] {
        let other = segment_slow_fast(&spec, &traj, Some(base.threshold * factor)).unwrap();
        let changed = labels
            .iter()
            .zip(other.labels())
            .filter(|(a, b)| *a != b)
            .count();
        let frac = changed as f64 / labels.len() as f64;
        assert!(frac < 0.02, "factor {factor}: {frac}");
    }
}

#[test]
fn lorenz_stays_in_trapping_region() {
    let cfg = IntegratorConfig {
        t_final: 1000.0,
        refine: 1,
        ..IntegratorConfig::default()
    };
    let traj = integrate(
        &SystemSpec::preset(SystemId::Lorenz),
        &State::new(0.0, vec![0.0, 1.0, 0.0]),
        &cfg,
        None,
    )
    .unwrap();
    let max = traj
        .refined_points
        .iter()
        .flat_map(|p| p.x.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(max < 100.0, "max-norm {max}");
}

#[test]
fn equilibria_survive_denser_seeds() {
    for id in SystemId::ALL {
        let spec = SystemSpec::preset(id);
        let a = find_equilibria(&spec, &seed_grid(&spec, 1)).unwrap();
        let b = find_equilibria(&spec, &seed_grid(&spec, 2)).unwrap();
        assert_eq!(a.equilibria.len(), b.equilibria.len(), "{id:?}");
        for (p, q) in a.equilibria.iter().zip(&b.equilibria) {
            for (u, v) in p.x.iter().zip(&q.x) {
                assert!((u - v).abs() < 1e-8);
            }
        }
        for e in &a.equilibria {
            let r = spec.eval_rhs(&State::new(0.0, e.x.clone())).unwrap();
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm < 1e-10);
            assert_eq!(e.eigenvalues.len(), spec.dimension());
        }
    }
}
