//! The seven experiments. Each returns a [`Table`]; cases run in parallel and
//! rows come back in config order (media, then `L`, then comparator).

use std::fmt::Write;

use pulsefront_core::envelopes::{estimate_constants, run_containment, ContainmentRun};
use pulsefront_core::fronts::{
    extract_pulsating_front, front_like_initial, measure_reverse_speed, measure_speed, profile_error, width_stats,
    zeta_residual, FrontRecord, FrontRun, Lattice, PulsatingFront, SpeedEstimate, WidthStats,
};
use pulsefront_core::homowave::{limit_speed, solve_frozen_wave, WaveFamily, WaveOptions};
use pulsefront_core::pdesolver::{evolve, Field, Grid1D, SolverConfig};
use pulsefront_core::zeros::{
    calibrated_band, is_subword, solve_stationary, zero_monotonicity_report, SignWord, StationaryOptions,
    StationarySolution, ZeroReport,
};
use pulsefront_core::PeriodicMedium;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::formats;
use crate::table::{Artifact, Cell, Table};
use crate::Error;

/// Envelope and Fife-McLeod violations accepted as numerical noise.
pub const VIOLATION_TOL: f64 = 5e-3;
/// Sweeps must keep each diameter within this factor across `L`.
pub const WIDTH_BAND: f64 = 2.0;
/// Crossing-time gaps may grow at most by this factor along the sweep.
pub const GAP_FACTOR: f64 = 1.5;
/// Largest relative speed error at `L >= 48`.
pub const SPEED_REL_TOL: f64 = 0.05;
/// Homogeneous media: relative speed error and profile error floors.
pub const HOMOGENEOUS_SPEED_TOL: f64 = 0.01;
pub const PROFILE_FLOOR: f64 = 2e-3;
/// Pacing ODE must return to the lattice this closely.
pub const PACING_TOL: f64 = 1e-6;
/// Front record: periods to record and half width around the front.
const RECORD_PERIODS: f64 = 1.2;
const RECORD_HALF_WIDTH: f64 = 25.0;
const LIMIT_NODES: usize = 32;
const LIMIT_TOL: f64 = 1e-8;

type Media = [(String, PeriodicMedium)];

fn cases(media: &Media, ls: &[f64]) -> Vec<(usize, f64)> {
    (0..media.len()).flat_map(|m| ls.iter().map(move |l| (m, *l))).collect()
}

fn name_l(name: &str, l: f64) -> String {
    format!("{name}_L{l}")
}

/// Runs the configured experiment on a pool of `cfg.jobs` threads.
pub fn run(cfg: &ExperimentConfig) -> Result<Table, Error> {
    let media = cfg.build_media()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        Ok(match cfg.experiment {
            ExperimentKind::SpeedSweep => speed_sweep(cfg, &media),
            ExperimentKind::ProfileSweep => profile_sweep(cfg, &media),
            ExperimentKind::WidthSweep => width_sweep(cfg, &media),
            ExperimentKind::SignClassify => sign_classify(cfg, &media),
            ExperimentKind::EnvelopeAudit => envelope_audit(cfg, &media),
            ExperimentKind::ZerosAudit => zeros_audit(cfg, &media),
            ExperimentKind::ReverseSpeed => reverse_speed(cfg, &media),
        })
    })
}

fn new_table(cfg: &ExperimentConfig, columns: Vec<&'static str>) -> Table {
    Table::new(cfg.experiment.name(), &cfg.hash(), cfg.solver, columns)
}

/// Indices of the rows belonging to medium `name`, sorted by `L`.
fn rows_by_l(t: &Table, name: &str) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..t.rows.len())
        .filter(|&i| t.rows[i].error.is_none() && t.rows[i].cells[0] == Cell::Text(name.to_string()))
        .collect();
    idx.sort_by(|a, b| t.value(*a, "L").partial_cmp(&t.value(*b, "L")).unwrap());
    idx
}

pub fn speed_sweep(cfg: &ExperimentConfig, media: &Media) -> Table {
    let fc = cfg.solver.front_config();
    let mut t = new_table(
        cfg,
        vec!["medium", "L", "c_L", "c_star", "abs_error", "rel_error", "converged", "stalled", "rel_spread"],
    );
    let limits: Vec<_> = media.par_iter().map(|(_, m)| limit_speed(m, LIMIT_NODES, LIMIT_TOL)).collect();
    let waves: Vec<_> = media.par_iter().map(|(_, m)| solve_frozen_wave(m, 0.0, &WaveOptions::default())).collect();
    let cs = cases(media, &cfg.l);
    let out: Vec<_> = cs.par_iter().map(|&(m, l)| measure_speed(&media[m].1, l, None, &fc)).collect();
    for (&(m, l), r) in cs.iter().zip(out) {
        let name = media[m].0.as_str();
        let c_star = limits[m].as_ref().map(|r| r.c_star).unwrap_or(f64::NAN);
        match r {
            Ok(s) => {
                let err = (s.c_l - c_star).abs();
                t.reports.push(json!({ "medium": name, "speed": formats::speed_report(l, &s) }));
                t.push(
                    vec![
                        name.into(),
                        l.into(),
                        s.c_l.into(),
                        c_star.into(),
                        err.into(),
                        (err / c_star.abs()).into(),
                        s.converged.into(),
                        s.stalled.into(),
                        s.rel_spread.into(),
                    ],
                    s.converged,
                );
            }
            Err(e) => t.push_error(vec![name.into(), l.into()], e.to_string()),
        }
    }
    for (m, (name, medium)) in media.iter().enumerate() {
        match &limits[m] {
            Ok(r) => t.reports.push(json!({ "medium": name, "limit_speed": formats::limit_speed_report(r) })),
            Err(e) => t.check(format!("{name}: limit speed"), false, e.to_string()),
        }
        if let Ok(w) = &waves[m] {
            if let Ok(csv) = formats::wave_csv(w) {
                t.artifacts.push(Artifact { name: format!("wave_{name}_y0.csv"), contents: csv });
            }
        }
        let idx = rows_by_l(&t, name);
        let errs: Vec<f64> = idx.iter().map(|&i| t.value(i, "abs_error").unwrap()).collect();
        let rels: Vec<f64> = idx.iter().map(|&i| t.value(i, "rel_error").unwrap()).collect();
        if medium.is_homogeneous() {
            let worst = rels.iter().cloned().fold(0.0, f64::max);
            t.check(
                format!("{name}: rel_error <= {HOMOGENEOUS_SPEED_TOL}"),
                worst <= HOMOGENEOUS_SPEED_TOL,
                format!("max {worst:.3e}"),
            );
        } else if errs.len() >= 2 {
            let dec = errs.windows(2).all(|w| w[1] < w[0]);
            t.check(format!("{name}: abs_error strictly decreasing in L"), dec, format!("{errs:?}"));
            let l_max = t.value(*idx.last().unwrap(), "L").unwrap();
            if l_max >= 48.0 {
                let r = *rels.last().unwrap();
                t.check(
                    format!("{name}: rel_error at L={l_max} <= {SPEED_REL_TOL}"),
                    r <= SPEED_REL_TOL,
                    format!("{r:.3e}"),
                );
            }
        }
        writeln!(t.dat, "# medium {name}\n# L c_L c_star abs_error").unwrap();
        for &i in &idx {
            let v = |c| t.value(i, c).unwrap();
            writeln!(t.dat, "{} {} {} {}", v("L"), v("c_L"), v("c_star"), v("abs_error")).unwrap();
        }
        t.dat.push_str("\n\n");
    }
    t
}

struct Recorded {
    speed: SpeedEstimate,
    record: FrontRecord,
}

fn record_front(medium: &PeriodicMedium, l: f64, cfg: &ExperimentConfig) -> Result<Recorded, Error> {
    let fc = cfg.solver.front_config();
    let mut run = FrontRun::new(medium, l, front_like_initial(l, &fc)?, &fc)?;
    let speed = run.measure()?;
    if !speed.converged {
        return Err(Error::Config(format!("front did not converge (c_L = {})", speed.c_l)));
    }
    let record = run.record(speed.c_l, RECORD_PERIODS, RECORD_HALF_WIDTH)?;
    Ok(Recorded { speed, record })
}

struct ProfileCase {
    rec: Recorded,
    front: PulsatingFront,
    profile: f64,
    zeta: f64,
    zeta_max: f64,
}

pub fn profile_sweep(cfg: &ExperimentConfig, media: &Media) -> Table {
    let p = &cfg.params;
    let mut t = new_table(
        cfg,
        vec!["medium", "L", "c_L", "profile_sup_error", "zeta_residual", "zeta_max", "monotone"],
    );
    let families: Vec<_> = media
        .par_iter()
        .map(|(_, m)| {
            m.require_a4()?;
            Ok::<_, Error>(WaveFamily::solve(m, p.n_y, &WaveOptions::default())?)
        })
        .collect();
    let lattice = Lattice { n_y: p.n_y, dxi: cfg.solver.h, xi_lo: -40.0, xi_hi: 40.0 };
    let cs = cases(media, &cfg.l);
    let out: Vec<Result<ProfileCase, Error>> = cs
        .par_iter()
        .map(|&(m, l)| {
            let fam = families[m].as_ref().map_err(|e| Error::Config(e.to_string()))?;
            let rec = record_front(&media[m].1, l, cfg)?;
            let front = extract_pulsating_front(&rec.record, &lattice)?;
            let profile = profile_error(&front, fam, p.profile_window)?;
            let cfun = |s: f64| fam.speed(s);
            let zeta = zeta_residual(&front, &cfun, front.c_l, p.zeta_window);
            let zeta_max = front.zeta.iter().fold(0.0f64, |a, z| a.max(z.abs()));
            Ok(ProfileCase { rec, front, profile, zeta, zeta_max })
        })
        .collect();
    for (&(m, l), r) in cs.iter().zip(out) {
        let name = media[m].0.as_str();
        match r {
            Ok(c) => {
                let monotone = c.front.first_non_monotone().is_none();
                t.push(
                    vec![
                        name.into(),
                        l.into(),
                        c.rec.speed.c_l.into(),
                        c.profile.into(),
                        c.zeta.into(),
                        c.zeta_max.into(),
                        monotone.into(),
                    ],
                    monotone,
                );
                let stem = name_l(name, l);
                if let Ok(csv) = formats::front_lattice_csv(&c.front) {
                    t.artifacts.push(Artifact { name: format!("front_{stem}.csv"), contents: csv });
                }
                if let Ok(csv) = formats::zeta_csv(&c.front) {
                    t.artifacts.push(Artifact { name: format!("zeta_{stem}.csv"), contents: csv });
                }
                t.artifacts.push(Artifact { name: format!("zeta_{stem}.dat"), contents: formats::zeta_dat(&c.front) });
                if cfg.output.snapshots {
                    if let Ok(csv) = formats::snapshots_csv(&c.rec.record) {
                        t.artifacts.push(Artifact { name: format!("snapshots_{stem}.csv"), contents: csv });
                    }
                }
            }
            Err(e) => t.push_error(vec![name.into(), l.into()], e.to_string()),
        }
    }
    for (name, medium) in media {
        let idx = rows_by_l(&t, name);
        let col = |c: &str| idx.iter().map(|&i| t.value(i, c).unwrap()).collect::<Vec<f64>>();
        let (pe, zr, zm) = (col("profile_sup_error"), col("zeta_residual"), col("zeta_max"));
        if medium.is_homogeneous() {
            let worst = pe.iter().cloned().fold(0.0, f64::max);
            t.check(format!("{name}: profile error <= {PROFILE_FLOOR}"), worst <= PROFILE_FLOOR, format!("{worst:.3e}"));
        } else if idx.len() >= 2 {
            let n = idx.len() - 1;
            t.check(format!("{name}: profile error smaller at largest L"), pe[n] < pe[0], format!("{pe:?}"));
            t.check(format!("{name}: zeta residual smaller at largest L"), zr[n] < zr[0], format!("{zr:?}"));
            t.check(format!("{name}: max |zeta| grows with L"), zm.windows(2).all(|w| w[1] > w[0]), format!("{zm:?}"));
        }
        writeln!(t.dat, "# medium {name}\n# L profile_sup_error zeta_residual zeta_max").unwrap();
        for k in 0..idx.len() {
            writeln!(t.dat, "{} {} {} {}", t.value(idx[k], "L").unwrap(), pe[k], zr[k], zm[k]).unwrap();
        }
        t.dat.push_str("\n\n");
    }
    t
}

pub fn width_sweep(cfg: &ExperimentConfig, media: &Media) -> Table {
    let delta = cfg.params.delta;
    let mut t =
        new_table(cfg, vec!["medium", "L", "c_L", "delta", "max_time_diam", "max_space_diam", "min_dt_u"]);
    let cs = cases(media, &cfg.l);
    let out: Vec<Result<(f64, WidthStats), Error>> = cs
        .par_iter()
        .map(|&(m, l)| {
            let rec = record_front(&media[m].1, l, cfg)?;
            Ok((rec.speed.c_l, width_stats(&rec.record, delta)?))
        })
        .collect();
    for (&(m, l), r) in cs.iter().zip(out) {
        let name = media[m].0.as_str();
        match r {
            Ok((c, w)) => t.push(
                vec![
                    name.into(),
                    l.into(),
                    c.into(),
                    delta.into(),
                    w.max_time_diam.into(),
                    w.max_space_diam.into(),
                    w.min_dt_u.into(),
                ],
                w.min_dt_u > 0.0,
            ),
            Err(e) => t.push_error(vec![name.into(), l.into(), f64::NAN.into(), delta.into()], e.to_string()),
        }
    }
    for (name, _) in media {
        let idx = rows_by_l(&t, name);
        if idx.len() >= 2 {
            for c in ["max_time_diam", "max_space_diam"] {
                let v: Vec<f64> = idx.iter().map(|&i| t.value(i, c).unwrap()).collect();
                let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = v.iter().cloned().fold(0.0, f64::max);
                t.check(
                    format!("{name}: {c} within a factor {WIDTH_BAND}"),
                    hi <= WIDTH_BAND * lo,
                    format!("[{lo:.4}, {hi:.4}]"),
                );
            }
        }
        writeln!(t.dat, "# medium {name}\n# L max_time_diam max_space_diam min_dt_u").unwrap();
        for &i in &idx {
            let v = |c| t.value(i, c).unwrap();
            writeln!(t.dat, "{} {} {} {}", v("L"), v("max_time_diam"), v("max_space_diam"), v("min_dt_u")).unwrap();
        }
        t.dat.push_str("\n\n");
    }
    t
}

/// `+` when every position has positive mean reaction, `-` when every one is
/// negative, `0` otherwise.
pub fn predicted_sign(medium: &PeriodicMedium) -> &'static str {
    let (lo, hi) = medium.validate(128, 512).mean_reaction_range;
    if lo > 0.0 {
        "+"
    } else if hi < 0.0 {
        "-"
    } else {
        "0"
    }
}

pub fn observed_sign(s: &SpeedEstimate, stall_threshold: f64) -> &'static str {
    if s.stalled && s.c_l.abs() <= stall_threshold {
        "0"
    } else if s.converged && s.c_l > 0.0 {
        "+"
    } else if s.converged && s.c_l < 0.0 {
        "-"
    } else {
        "?"
    }
}

pub fn sign_classify(cfg: &ExperimentConfig, media: &Media) -> Table {
    let fc = cfg.solver.front_config();
    let mut t = new_table(
        cfg,
        vec!["medium", "L", "mass_min", "mass_max", "predicted", "c_L", "converged", "stalled", "observed"],
    );
    let cs = cases(media, &cfg.l);
    let out: Vec<_> = cs.par_iter().map(|&(m, l)| measure_speed(&media[m].1, l, None, &fc)).collect();
    for (&(m, l), r) in cs.iter().zip(out) {
        let (name, medium) = (&media[m].0, &media[m].1);
        let (lo, hi) = medium.validate(128, 512).mean_reaction_range;
        let pred = predicted_sign(medium);
        match r {
            Ok(s) => {
                let obs = observed_sign(&s, fc.stall_threshold);
                t.reports.push(json!({ "medium": name, "speed": formats::speed_report(l, &s) }));
                t.push(
                    vec![
                        name.as_str().into(),
                        l.into(),
                        lo.into(),
                        hi.into(),
                        pred.into(),
                        s.c_l.into(),
                        s.converged.into(),
                        s.stalled.into(),
                        obs.into(),
                    ],
                    obs == pred,
                );
            }
            Err(e) => {
                t.push_error(vec![name.as_str().into(), l.into(), lo.into(), hi.into(), pred.into()], e.to_string())
            }
        }
    }
    t.dat.push_str("# medium L c_L\n");
    for r in &t.rows {
        if r.error.is_none() {
            writeln!(t.dat, "{} {} {}", r.cells[0].as_text(), r.cells[1].as_f64().unwrap(), r.cells[5].as_f64().unwrap())
                .unwrap();
        }
    }
    t
}

fn pacing_error(run: &ContainmentRun, l: f64) -> f64 {
    let tr = &run.trajectory;
    let e1 = tr.eval(run.t_l).map(|x| (x - l).abs()).unwrap_or(f64::INFINITY);
    let e2 = tr.eval(2.0 * run.t_l).map(|x| (x - 2.0 * l).abs()).unwrap_or(f64::INFINITY);
    e1.max(e2)
}

pub fn envelope_audit(cfg: &ExperimentConfig, media: &Media) -> Table {
    let p = &cfg.params;
    let s = &cfg.solver;
    let mut t = new_table(
        cfg,
        vec![
            "medium",
            "eps",
            "L",
            "y",
            "L1eps",
            "max_violation_lower",
            "max_violation_upper",
            "T_tilde",
            "T_L",
            "crossing_gap",
            "pacing_error",
        ],
    );
    let setups: Vec<Result<_, Error>> = media
        .par_iter()
        .map(|(_, m)| {
            m.require_a4()?;
            let waves = WaveFamily::solve(m, p.n_y, &WaveOptions::default())?;
            let params = estimate_constants(m, &waves, p.eps)?;
            Ok((waves, params))
        })
        .collect();
    let cs = cases(media, &cfg.l);
    let out: Vec<Result<ContainmentRun, Error>> = cs
        .par_iter()
        .map(|&(m, l)| {
            let (waves, params) = setups[m].as_ref().map_err(|e| Error::Config(e.to_string()))?;
            let grid = Grid1D::spanning(-s.domain_pad, 2.0 * l + s.domain_pad, s.h)?;
            let init = Field::from_fn(grid, 0.0, |x| waves.eval(x, p.y).0);
            Ok(run_containment(&media[m].1, waves, params, p.y, l, init, None, s.dt, 10)?)
        })
        .collect();
    for (&(m, l), r) in cs.iter().zip(out) {
        let name = media[m].0.as_str();
        let l1 = setups[m].as_ref().map(|(_, q)| q.l1eps).unwrap_or(f64::NAN);
        match r {
            Ok(run) => {
                let gap = run.t_tilde.map(|tt| (run.t_l - tt).abs()).unwrap_or(f64::NAN);
                let pe = pacing_error(&run, l);
                let pass = run.max_violation_lower <= VIOLATION_TOL
                    && run.max_violation_upper <= VIOLATION_TOL
                    && run.t_tilde.is_some()
                    && l >= l1
                    && pe <= PACING_TOL;
                t.reports.push(json!({ "medium": name, "envelope": formats::envelope_report(p.eps, l, &run) }));
                t.push(
                    vec![
                        name.into(),
                        p.eps.into(),
                        l.into(),
                        p.y.into(),
                        l1.into(),
                        run.max_violation_lower.into(),
                        run.max_violation_upper.into(),
                        run.t_tilde.unwrap_or(f64::NAN).into(),
                        run.t_l.into(),
                        gap.into(),
                        pe.into(),
                    ],
                    pass,
                );
            }
            Err(e) => t.push_error(vec![name.into(), p.eps.into(), l.into(), p.y.into(), l1.into()], e.to_string()),
        }
    }
    for (name, _) in media {
        let idx = rows_by_l(&t, name);
        if idx.len() >= 2 {
            let gaps: Vec<f64> = idx.iter().map(|&i| t.value(i, "crossing_gap").unwrap()).collect();
            let bound = GAP_FACTOR * gaps[0];
            t.check(
                format!("{name}: |T_L - T_tilde| <= {GAP_FACTOR} x value at smallest L"),
                gaps.iter().all(|g| *g <= bound),
                format!("{gaps:?}"),
            );
        }
        writeln!(t.dat, "# medium {name}\n# L crossing_gap max_violation_lower max_violation_upper").unwrap();
        for &i in &idx {
            let v = |c| t.value(i, c).unwrap();
            writeln!(t.dat, "{} {} {} {}", v("L"), v("crossing_gap"), v("max_violation_lower"), v("max_violation_upper"))
                .unwrap();
        }
        t.dat.push_str("\n\n");
    }
    t
}

/// Front-like datum with a notch down to 0 at `x = 1.5`, where the
/// decaying comparators still exceed the dead zone, so the initial word
/// against them is `+-+` rather than `+`.
pub fn notched_front(x: f64) -> f64 {
    let front = 1.0 / (1.0 + ((x - 8.0) / 2f64.sqrt()).exp());
    front * (1.0 - (-((x - 1.5) / 0.4).powi(2)).exp())
}

/// Run from [`notched_front`] on the stationary solution's grid,
/// `checkpoints` snapshots evenly spread over `[0, t_end]`.
pub fn zeros_run(
    medium: &PeriodicMedium,
    l: f64,
    w: &StationarySolution,
    dt: f64,
    t_end: f64,
    checkpoints: usize,
) -> Result<Vec<Field>, Error> {
    let init = Field::from_fn(w.grid, 0.0, notched_front);
    let steps = (t_end / dt).round() as usize;
    let stride = (steps / (checkpoints - 1)).max(1);
    let mut snaps = Vec::new();
    evolve(medium, l, init, t_end, &SolverConfig::new(dt).with_stride(stride), &mut |f| snaps.push(f.clone()))?;
    Ok(snaps)
}

pub fn zeros_audit(cfg: &ExperimentConfig, media: &Media) -> Table {
    let p = &cfg.params;
    let s = &cfg.solver;
    let mut t = new_table(
        cfg,
        vec![
            "medium",
            "L",
            "delta",
            "mu",
            "residual",
            "band",
            "checkpoints",
            "z_first",
            "z_last",
            "last_word",
            "z_non_increasing",
            "subword_chain",
            "terminal_ok",
        ],
    );
    let band = match p.band {
        Some(b) => Ok(b),
        None => calibrated_band(s.h, s.dt),
    };
    let band = match band {
        Ok(b) => b,
        Err(e) => {
            t.check("dead-zone band calibration", false, e.to_string());
            return t;
        }
    };
    let cs: Vec<(usize, f64, f64)> = cases(media, &cfg.l)
        .into_iter()
        .flat_map(|(m, l)| p.delta_fractions.iter().map(move |f| (m, l, *f)))
        .collect();
    let plus_minus = SignWord::parse("+-").unwrap();
    let out: Vec<Result<(StationarySolution, ZeroReport), Error>> = cs
        .par_iter()
        .map(|&(m, l, frac)| {
            let medium = &media[m].1;
            let opts = StationaryOptions { h: s.h, ..Default::default() };
            let w = solve_stationary(medium, l, frac * medium.delta0(), p.half_length, &opts)?;
            let snaps = zeros_run(medium, l, &w, s.dt, p.zeros_t_end, p.checkpoints)?;
            let rep = zero_monotonicity_report(&snaps, &w.w, band);
            Ok((w, rep))
        })
        .collect();
    for (&(m, l, frac), r) in cs.iter().zip(out) {
        let (name, medium) = (media[m].0.as_str(), &media[m].1);
        match r {
            Ok((w, rep)) => {
                let last = rep.last().unwrap();
                let terminal = is_subword(&last.word, &plus_minus);
                t.reports.push(json!({
                    "medium": name,
                    "L": l,
                    "delta": w.delta,
                    "band": band,
                    "entries": formats::zero_report(&rep),
                }));
                t.push(
                    vec![
                        name.into(),
                        l.into(),
                        w.delta.into(),
                        w.mu.into(),
                        w.residual_norm.into(),
                        band.into(),
                        rep.entries.len().into(),
                        rep.entries[0].z.into(),
                        last.z.into(),
                        last.word.to_word_string().into(),
                        rep.z_non_increasing.into(),
                        rep.subword_chain.into(),
                        terminal.into(),
                    ],
                    rep.holds() && terminal && rep.entries.len() >= p.checkpoints,
                );
            }
            Err(e) => t.push_error(vec![name.into(), l.into(), (frac * medium.delta0()).into()], e.to_string()),
        }
    }
    t.dat.push_str("# comparator-index t z\n");
    for (k, r) in t.reports.iter().enumerate() {
        for e in r["entries"].as_array().unwrap() {
            writeln!(t.dat, "{k} {} {}", e["t"], e["z"]).unwrap();
        }
    }
    t
}

pub fn reverse_speed(cfg: &ExperimentConfig, media: &Media) -> Table {
    let fc = cfg.solver.front_config();
    let mut t = new_table(cfg, vec!["medium", "L", "c_forward", "c_reverse", "c_star", "rel_diff"]);
    let limits: Vec<_> = media.par_iter().map(|(_, m)| limit_speed(m, LIMIT_NODES, LIMIT_TOL)).collect();
    let cs = cases(media, &cfg.l);
    let out: Vec<_> = cs
        .par_iter()
        .map(|&(m, l)| {
            let medium = &media[m].1;
            let (f, r) = rayon::join(|| measure_speed(medium, l, None, &fc), || measure_reverse_speed(medium, l, &fc));
            Ok::<_, Error>((f?, r?))
        })
        .collect();
    for (&(m, l), r) in cs.iter().zip(out) {
        let name = media[m].0.as_str();
        let c_star = limits[m].as_ref().map(|r| r.c_star).unwrap_or(f64::NAN);
        match r {
            Ok((f, rv)) => t.push(
                vec![
                    name.into(),
                    l.into(),
                    f.c_l.into(),
                    rv.c_l.into(),
                    c_star.into(),
                    ((rv.c_l - f.c_l).abs() / f.c_l.abs()).into(),
                ],
                f.converged && rv.converged,
            ),
            Err(e) => t.push_error(vec![name.into(), l.into()], e.to_string()),
        }
    }
    t.dat.push_str("# medium L c_forward c_reverse c_star\n");
    for r in &t.rows {
        if r.error.is_none() {
            let v = |j: usize| r.cells[j].as_f64().unwrap();
            writeln!(t.dat, "{} {} {} {} {}", r.cells[0].as_text(), v(1), v(2), v(3), v(4)).unwrap();
        }
    }
    t
}
