use pulsefront_core::fronts::{
    extract_pulsating_front, front_like_initial, measure_reverse_speed, measure_speed, profile_error, width_stats,
    zeta_residual, FrontConfig, FrontRecord, FrontRun, Lattice, SpeedEstimate,
};
use pulsefront_core::homowave::{limit_speed, WaveFamily, WaveOptions};
use pulsefront_core::medium::{make_a4_medium, make_cubic_medium, Periodic};
use pulsefront_core::{Error, PeriodicMedium};
use std::sync::OnceLock;

const C_HOM: f64 = 0.353_553_390_593_273_8;

fn homogeneous() -> PeriodicMedium {
    make_cubic_medium(Periodic::Constant(1.0), Periodic::Constant(0.25)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

struct Case {
    speed: SpeedEstimate,
    record: FrontRecord,
}

fn run_case(medium: &PeriodicMedium, l: f64) -> Case {
    let cfg = FrontConfig::default();
    let mut run = FrontRun::new(medium, l, front_like_initial(l, &cfg).unwrap(), &cfg).unwrap();
    let speed = run.measure().unwrap();
    assert!(speed.converged, "{speed:?}");
    let record = run.record(speed.c_l, 1.2, 20.0).unwrap();
    Case { speed, record }
}

fn homogeneous_case() -> &'static Case {
    static CASE: OnceLock<Case> = OnceLock::new();
    CASE.get_or_init(|| run_case(&homogeneous(), 16.0))
}

fn a4_medium() -> PeriodicMedium {
    make_a4_medium(0.4, 0.02, 0.1).unwrap()
}

fn a4_case() -> &'static Case {
    static CASE: OnceLock<Case> = OnceLock::new();
    CASE.get_or_init(|| run_case(&a4_medium(), 48.0))
}

fn lattice(n_y: usize, half: f64) -> Lattice {
    Lattice { n_y, dxi: 0.05, xi_lo: -half, xi_hi: half }
}

#[test]
fn homogeneous_speed() {
    let s = &homogeneous_case().speed;
    assert!(rel(s.c_l, C_HOM) < 0.01, "{}", s.c_l);
    assert!(s.rel_spread <= 0.01);
    assert!(s.crossing_times.windows(2).all(|w| w[1] > w[0]));
    assert!(s.per_period_speeds.len() >= 3);
    assert!(s.boundary_deviation < 1e-8);
    assert!(!s.stalled);
}

#[test]
fn homogeneous_reverse_speed() {
    let s = measure_reverse_speed(&homogeneous(), 16.0, &FrontConfig::default()).unwrap();
    assert!(rel(s.c_l, C_HOM) < 0.01, "{}", s.c_l);
}

#[test]
fn homogeneous_profile_is_flat_in_y() {
    let f = extract_pulsating_front(&homogeneous_case().record, &lattice(8, 15.0)).unwrap();
    for j in 0..f.n_y {
        let d = f.row(j).iter().zip(f.row(0)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(d <= 5e-3, "row {j}: {d}");
        assert!(f.zeta[j].abs() <= 5e-3);
    }
    assert_eq!(f.zeta[0], 0.0);
    assert!(f.first_non_monotone().is_none());
    let fam = WaveFamily::solve(&homogeneous(), 8, &WaveOptions::default()).unwrap();
    assert!(profile_error(&f, &fam, 8.0).unwrap() < 2e-3);
    let c = |_: f64| C_HOM;
    let res = zeta_residual(&f, &c, f.c_l, 4.0);
    let bias = 4.0 * (1.0 - f.c_l / C_HOM).abs();
    assert!((res - bias).abs() < 1e-5, "{res} {bias}");
    let matched = |_: f64| f.c_l;
    assert!(zeta_residual(&f, &matched, f.c_l, 4.0) < 1e-5);
}

#[test]
fn homogeneous_widths() {
    let w = width_stats(&homogeneous_case().record, 0.1).unwrap();
    let exact = 2.0 * 2f64.sqrt() * 9f64.ln();
    assert!(rel(w.max_space_diam, exact) < 0.01, "{w:?}");
    assert!(rel(w.max_time_diam, exact / C_HOM) < 0.02, "{w:?}");
    assert!(w.min_dt_u > 0.0);
}

#[test]
fn extraction_rejects_bad_lattices() {
    let rec = &homogeneous_case().record;
    assert!(matches!(extract_pulsating_front(rec, &lattice(7, 10.0)), Err(Error::InvalidArgument(_))));
    let mut short = rec.clone();
    short.snapshots.truncate(3);
    assert!(matches!(extract_pulsating_front(&short, &lattice(8, 10.0)), Err(Error::EmptyBin { .. })));
}

#[test]
fn negative_medium_recedes() {
    let m = make_cubic_medium(Periodic::Constant(1.0), Periodic::Constant(0.75)).unwrap();
    let s = measure_speed(&m, 32.0, None, &FrontConfig::default()).unwrap();
    assert!(s.converged);
    assert!(rel(s.c_l, -C_HOM) < 0.01, "{}", s.c_l);
}

#[test]
fn balanced_medium_stalls() {
    let m = make_a4_medium(0.5, 0.03, 0.1).unwrap();
    let s = measure_speed(&m, 48.0, None, &FrontConfig::default()).unwrap();
    assert!(!s.converged);
    assert!(s.stalled);
    assert!(s.c_l.abs() <= 0.02, "{}", s.c_l);
}

#[test]
fn a4_front_is_monotone_and_consistent() {
    let case = a4_case();
    let s = &case.speed;
    let w = s.per_period_speeds.windows(2).skip(s.per_period_speeds.len().saturating_sub(3));
    for p in w {
        assert!(rel(p[1], p[0]) <= 0.01);
    }
    let f = extract_pulsating_front(&case.record, &lattice(16, 30.0)).unwrap();
    assert!(f.first_non_monotone().is_none());
    for j in 0..f.n_y {
        let y = j as f64 / 16.0;
        assert!((f.eval(f.zeta[j], y).unwrap() - 0.5).abs() < 1e-3);
    }
    assert!((f.zeta_at(1.0) - f.zeta_at(0.0)).abs() < 1e-12);
    let ws = width_stats(&case.record, 0.1).unwrap();
    assert!(ws.min_dt_u > 0.0 && ws.max_space_diam > 0.0 && ws.max_time_diam > 0.0);
}

#[test]
fn reverse_front_speeds_share_the_limit() {
    let b = Periodic::Fourier { mean: 0.25, cos: vec![], sin: vec![0.08, 0.05] };
    let m = make_cubic_medium(Periodic::Constant(1.0), b).unwrap();
    let cfg = FrontConfig::default();
    let fwd = measure_speed(&m, 48.0, None, &cfg).unwrap();
    let rev = measure_reverse_speed(&m, 48.0, &cfg).unwrap();
    let c_star = limit_speed(&m, 32, 1e-8).unwrap().c_star;
    assert!(rel(fwd.c_l, c_star) < 0.05, "{} {c_star}", fwd.c_l);
    assert!(rel(rev.c_l, c_star) < 0.05, "{} {c_star}", rev.c_l);
}

#[test]
fn even_medium_has_symmetric_speeds() {
    let b = Periodic::Fourier { mean: 0.25, cos: vec![0.1], sin: vec![] };
    let m = make_cubic_medium(Periodic::Constant(1.0), b).unwrap();
    let cfg = FrontConfig::default();
    let fwd = measure_speed(&m, 24.0, None, &cfg).unwrap();
    let rev = measure_reverse_speed(&m, 24.0, &cfg).unwrap();
    assert!(rel(rev.c_l, fwd.c_l) < 0.01, "{} {}", fwd.c_l, rev.c_l);
}

#[test]
fn moving_window_needs_aligned_grid() {
    let cfg = FrontConfig { h: 0.07, ..Default::default() };
    let init = front_like_initial(16.0, &cfg).unwrap();
    assert!(FrontRun::new(&homogeneous(), 16.0, init, &cfg).is_err());
}

fn a4_profile(m: &PeriodicMedium, l: f64) -> (f64, f64, f64) {
    let case = run_case(m, l);
    let f = extract_pulsating_front(&case.record, &lattice(16, 40.0)).unwrap();
    let fam = WaveFamily::solve(m, 16, &WaveOptions::default()).unwrap();
    let c = |s: f64| fam.speed(s);
    let zmax = f.zeta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    (profile_error(&f, &fam, 8.0).unwrap(), zeta_residual(&f, &c, f.c_l, 4.0), zmax)
}

#[test]
fn a4_profiles_converge_along_the_sweep() {
    let m = a4_medium();
    let (p12, z12, m12) = a4_profile(&m, 12.0);
    let case = a4_case();
    let f = extract_pulsating_front(&case.record, &lattice(16, 40.0)).unwrap();
    let fam = WaveFamily::solve(&m, 16, &WaveOptions::default()).unwrap();
    let c = |s: f64| fam.speed(s);
    let p48 = profile_error(&f, &fam, 8.0).unwrap();
    let z48 = zeta_residual(&f, &c, f.c_l, 4.0);
    let m48 = f.zeta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    assert!(p48 < p12, "{p12} {p48}");
    assert!(z48 < z12, "{z12} {z48}");
    assert!(m48 > 2.0 * m12, "{m12} {m48}");
}

#[test]
fn profile_error_grows_with_amplitude() {
    let flat = make_a4_medium(0.4, 0.0, 0.1).unwrap();
    let (p0, _, z0) = a4_profile(&flat, 24.0);
    let (p2, _, _) = a4_profile(&make_a4_medium(0.4, 0.02, 0.1).unwrap(), 24.0);
    let (p3, _, _) = a4_profile(&make_a4_medium(0.4, 0.03, 0.1).unwrap(), 24.0);
    assert!(p0 < 2e-3 && z0 < 1e-4, "{p0} {z0}");
    assert!(p0 < p2 && p2 < p3, "{p0} {p2} {p3}");
}

#[test]
fn front_eval_reproduces_lattice_rows() {
    let f = extract_pulsating_front(&a4_case().record, &lattice(16, 30.0)).unwrap();
    let xs = f.xi_grid();
    for j in [0, 5, 15] {
        let y = j as f64 / 16.0;
        for k in [10, 200, xs.len() - 1] {
            assert_eq!(f.eval(xs[k], y).unwrap(), f.row(j)[k]);
        }
    }
    // Midway between rows the half level stays on the interpolated zeta.
    for j in 0..16 {
        let y = (j as f64 + 0.5) / 16.0;
        assert!((f.eval(f.zeta_at(y), y).unwrap() - 0.5).abs() < 2e-2);
    }
}
