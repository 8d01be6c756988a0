use proptest::prelude::*;
use pulsefront_core::medium::{make_cubic_medium, Periodic};
use pulsefront_core::pdesolver::{evolve, Field, SolverConfig};
use pulsefront_core::zeros::{
    calibrated_band, classify_stationary, classify_with_band, decay_rate, is_subword, sign_word, solve_stationary,
    zero_monotonicity_report, SignWord, StationaryOptions, StationarySolution, StationaryType,
};
use pulsefront_core::{Error, PeriodicMedium};
use std::f64::consts::PI;

fn homogeneous() -> PeriodicMedium {
    make_cubic_medium(Periodic::Constant(1.0), Periodic::Constant(0.25)).unwrap()
}

fn sinusoidal() -> PeriodicMedium {
    make_cubic_medium(Periodic::Constant(1.0), Periodic::sinusoid(0.25, 0.1)).unwrap()
}

fn w(s: &str) -> SignWord {
    SignWord::parse(s).unwrap()
}

#[test]
fn sign_words_of_simple_samples() {
    let empty = sign_word(&[0.0; 10], 0.0);
    assert!(empty.is_empty() && empty.z() == -1);
    let sines: Vec<f64> = (0..100).map(|i| (2.0 * PI * i as f64 / 100.0).sin()).collect();
    let s = sign_word(&sines, 1e-12);
    assert_eq!(s, w("+-"));
    assert_eq!(s.z(), 1);
    let t = sign_word(&[1.0, -1.0, 1.0], 0.0);
    assert_eq!(t.to_word_string(), "+-+");
    assert_eq!(t.z(), 2);
    assert_eq!(sign_word(&[1.0, 1e-3, -1e-3, 2.0], 1e-2).to_word_string(), "+");
    assert_eq!(SignWord::parse("++--").unwrap().to_word_string(), "+-");
    assert!(SignWord::parse("+x").is_err());
    assert_eq!(format!("{}", w("-+-")), "-+-");
}

#[test]
fn subword_relation() {
    assert!(is_subword(&w("+-"), &w("+-+")));
    assert!(!is_subword(&w("-+"), &w("+-")));
    assert!(is_subword(&w(""), &w("")));
    assert!(is_subword(&w(""), &w("-+-")));
    assert!(is_subword(&w("-"), &w("+-+")));
    assert!(!is_subword(&w("+-+"), &w("+-")));
}

#[test]
fn decay_rate_from_margin() {
    let m = homogeneous().with_margins(0.2, 0.1);
    let g = pulsefront_core::pdesolver::Grid1D::spanning(0.0, 50.0, 0.05).unwrap();
    for l in [1.0, 7.0, 1e4] {
        assert!((decay_rate(&m, l, &g) - 0.2f64.sqrt()).abs() < 1e-14);
    }
}

// Decaying orbit of w'' + f(w) = 0: w' = -sqrt(-2 F(w)), F(w) = int_0^w f.
fn first_integral_orbit(delta: f64, x_end: f64, h: f64) -> Vec<f64> {
    let b = 0.25;
    let big_f = |u: f64| -b * u * u / 2.0 + (1.0 + b) * u.powi(3) / 3.0 - u.powi(4) / 4.0;
    let rhs = |u: f64| -(-2.0 * big_f(u)).max(0.0).sqrt();
    let sub = 20;
    let k = h / sub as f64;
    let mut u = delta;
    let mut out = vec![u];
    for _ in 0..(x_end / h).round() as usize {
        for _ in 0..sub {
            let k1 = rhs(u);
            let k2 = rhs(u + 0.5 * k * k1);
            let k3 = rhs(u + 0.5 * k * k2);
            let k4 = rhs(u + k * k3);
            u += k * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        }
        out.push(u);
    }
    out
}

fn hom_stationary(delta: f64) -> StationarySolution {
    solve_stationary(&homogeneous(), 1.0, delta, 60.0, &StationaryOptions::default()).unwrap()
}

#[test]
fn homogeneous_stationary_matches_first_integral() {
    let s = hom_stationary(0.05);
    assert_eq!(s.w[0], 0.05);
    assert_eq!(*s.w.last().unwrap(), 0.0);
    assert!(s.w.windows(2).all(|p| p[1] < p[0]));
    assert!(s.residual_norm < 1e-8, "{}", s.residual_norm);
    for (x, v) in s.x_grid().iter().zip(&s.w) {
        assert!(*v <= 0.05 * (-s.mu * x).exp() * (1.0 + 1e-9) + 1e-12);
    }
    let orbit = first_integral_orbit(0.05, 30.0, s.grid.h);
    let err = orbit.iter().zip(&s.w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 2e-4, "{err}");
}

#[test]
fn stationary_preconditions() {
    let m = homogeneous();
    let opts = StationaryOptions::default();
    assert!(matches!(solve_stationary(&m, 1.0, 0.9, 60.0, &opts), Err(Error::OutOfRange { .. })));
    assert!(solve_stationary(&m, 1.0, 0.05, 5.0, &opts).is_err());
    assert!(matches!(
        solve_stationary(&m, 1.0, 0.05, 60.0, &StationaryOptions { max_iter: 3, ..opts }),
        Err(Error::NotConverged { .. })
    ));
}

#[test]
fn periodic_stationary_solutions_decay() {
    let m = sinusoidal();
    for l in [2.0, 8.0] {
        for delta in [0.02, 0.5 * m.delta0(), m.delta0()] {
            let s = solve_stationary(&m, l, delta, 80.0, &StationaryOptions::default()).unwrap();
            assert_eq!(s.w[0], delta);
            assert!(s.w[1..s.w.len() - 1].iter().all(|v| *v > 0.0 && *v < 1.0));
            assert!(s.residual_norm < 1e-8);
            let slack = StationaryOptions::default().tol / m.gamma0();
            for (x, v) in s.x_grid().iter().zip(&s.w) {
                assert!(*v <= delta * (-s.mu * x).exp() * (1.0 + 1e-9) + slack);
            }
        }
    }
}

#[test]
fn classification() {
    let s = hom_stationary(0.05);
    let interior = &s.w[..s.w.len() - 1];
    assert!(matches!(classify_stationary(interior).unwrap(), StationaryType::B | StationaryType::C));
    assert_eq!(classify_stationary(&[0.25; 50]).unwrap(), StationaryType::B);
    let dip: Vec<f64> = (0..200).map(|i| 0.5 * (PI * i as f64 / 199.0).sin() - 0.1).collect();
    assert_eq!(classify_stationary(&dip).unwrap(), StationaryType::E);
    let up: Vec<f64> = (0..100).map(|i| -0.1 + i as f64 / 200.0).collect();
    assert_eq!(classify_stationary(&up).unwrap().tag(), 'c');
    let down: Vec<f64> = up.iter().rev().copied().collect();
    assert_eq!(classify_stationary(&down).unwrap().tag(), 'd');
    let wave: Vec<f64> = (0..300).map(|i| 0.5 + 0.7 * (2.0 * PI * i as f64 / 299.0).cos()).collect();
    assert!(matches!(classify_stationary(&wave), Err(Error::Unclassified)));
    let a_like: Vec<f64> = (0..300).map(|i| 1.0 - 2.0 * (PI * i as f64 / 299.0).sin()).collect();
    assert!(classify_with_band(&a_like, 1e-9).is_err());
    assert_eq!(classify_with_band(&[-0.5, 0.5, 1.5], 1e-9).unwrap(), StationaryType::A);
}

fn front_run(medium: &PeriodicMedium, l: f64, s: &StationarySolution, t_end: f64) -> Vec<Field> {
    let init = Field::from_fn(s.grid, 0.0, |x| 1.0 / (1.0 + ((x - 8.0) / 2f64.sqrt()).exp()));
    let steps = (t_end / 0.01).round() as usize;
    let mut snaps = Vec::new();
    evolve(medium, l, init, t_end, &SolverConfig::new(0.01).with_stride(steps / 19), &mut |f| snaps.push(f.clone()))
        .unwrap();
    snaps
}

#[test]
fn zero_number_against_decaying_solutions() {
    let m = sinusoidal();
    let band = calibrated_band(0.05, 0.01).unwrap();
    assert!(band > 0.0 && band < 0.05, "{band}");
    let l = 8.0;
    for delta in [0.02, 0.05, m.delta0()] {
        let s = solve_stationary(&m, l, delta, 80.0, &StationaryOptions::default()).unwrap();
        let snaps = front_run(&m, l, &s, 60.0);
        assert!(snaps.len() >= 20);
        let r = zero_monotonicity_report(&snaps, &s.w, band);
        assert!(r.holds(), "delta={delta} {:?}", r.entries.iter().map(|e| e.word.to_word_string()).collect::<Vec<_>>());
        assert!(is_subword(&r.last().unwrap().word, &w("+-")));
    }
}

#[test]
fn zero_number_against_constant_state() {
    let m = homogeneous();
    let s = hom_stationary(0.05);
    let snaps = front_run(&m, 1.0, &s, 40.0);
    let c = vec![0.25; s.grid.n];
    let r = zero_monotonicity_report(&snaps, &c, 1e-9);
    assert!(r.holds());
    let last = &r.last().unwrap().word;
    assert!(last.z() <= 2);
    if last.z() == 2 {
        assert_eq!(*last, w("+-+"));
    }
}

#[test]
fn identical_states_have_empty_words() {
    let s = hom_stationary(0.05);
    let f = Field { grid: s.grid, t: 0.0, u: s.w.clone() };
    let r = zero_monotonicity_report(&[f.clone(), f], &s.w, 0.0);
    assert!(r.entries.iter().all(|e| e.z == -1 && e.word.is_empty()));
    assert!(r.holds());
}

proptest! {
    #[test]
    fn halving_band_never_lowers_z(values in prop::collection::vec(-1.0f64..1.0, 0..60), band in 0.0f64..0.5) {
        let coarse = sign_word(&values, band);
        let fine = sign_word(&values, 0.5 * band);
        prop_assert!(fine.z() >= coarse.z());
        prop_assert!(is_subword(&coarse, &fine));
    }

    #[test]
    fn words_are_compressed(values in prop::collection::vec(-1.0f64..1.0, 0..60)) {
        let s = sign_word(&values, 0.0);
        prop_assert!(s.signs().windows(2).all(|p| p[0] != p[1]));
        prop_assert_eq!(SignWord::parse(&s.to_word_string()).unwrap(), s);
    }
}
