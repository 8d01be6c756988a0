//! Sub- and super-solutions around frozen waves paced by `X' = c(y + X/L)`,
//! the Fife-McLeod bounds for the rescaled problem, and the interface
//! distance `rho`.
//!
//! The proofs only assert that suitable constants exist. Here they are
//! estimated from the medium and the wave family (or fitted at `t = 0`) and
//! then checked forward against actual runs.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fronts::PulsatingFront;
use crate::homowave::{dpsi_dy, WaveFamily, WaveOptions};
use crate::interp::hermite3;
use crate::medium::{LocalReaction, PeriodicMedium};
use crate::pdesolver::Field;
use crate::quad::adaptive_simpson;

const NX_SCAN: usize = 64;
const NU_SCAN: usize = 400;

/// Sampled solution of the pacing ODE from `X(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PacedTrajectory {
    pub y: f64,
    pub l: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    /// `X'` at the samples.
    pub dx: Vec<f64>,
    pub c_star: f64,
    /// `L / c_star`.
    pub t_l: f64,
    /// First time with `X = L`, if reached.
    pub first_crossing: Option<f64>,
}

impl PacedTrajectory {
    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// `X(t)` by cubic Hermite interpolation of the samples.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let n = self.times.len();
        if !(0.0..=self.t_end() * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::OutOfRange { value: t, lo: 0.0, hi: self.t_end() });
        }
        let i = ((t / self.dt).floor() as usize).min(n - 2);
        Ok(hermite3(self.times[i], self.times[i + 1], self.x[i], self.x[i + 1], self.dx[i], self.dx[i + 1], t).0)
    }
}

/// `c_* = 1 / int_0^1 ds / c(s)`; `c` must stay positive.
pub fn harmonic_mean_speed(cfun: &dyn Fn(f64) -> f64) -> Result<f64> {
    if (0..512).any(|k| !(cfun(k as f64 / 512.0) > 0.0)) {
        return Err(Error::InvalidArgument("speed profile is not positive".into()));
    }
    Ok(1.0 / adaptive_simpson(|s| 1.0 / cfun(s), 0.0, 1.0, 1e-13))
}

/// Classical RK4 for `X' = c(y + X/L)` on `[0, t_end]` with step `dt`.
pub fn solve_x(cfun: &dyn Fn(f64) -> f64, y: f64, l: f64, t_end: f64, dt: f64) -> Result<PacedTrajectory> {
    let c_max = (0..256).map(|k| cfun(k as f64 / 256.0)).fold(f64::NEG_INFINITY, f64::max);
    let c_min = (0..256).map(|k| cfun(k as f64 / 256.0)).fold(f64::INFINITY, f64::min);
    if !(c_min > 0.0) {
        return Err(Error::InvalidArgument("pacing speed must be positive".into()));
    }
    if !(dt > 0.0) || dt > 0.01 * l / c_max * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(alloc::format!("pacing step {dt} above 0.01 L / max c")));
    }
    let rhs = |x: f64| cfun(y + x / l);
    let steps = (t_end / dt).ceil() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut xs = Vec::with_capacity(steps + 1);
    let mut dxs = Vec::with_capacity(steps + 1);
    let mut x = 0.0;
    times.push(0.0);
    xs.push(0.0);
    dxs.push(rhs(0.0));
    for k in 1..=steps {
        let k1 = rhs(x);
        let k2 = rhs(x + 0.5 * dt * k1);
        let k3 = rhs(x + 0.5 * dt * k2);
        let k4 = rhs(x + dt * k3);
        let next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !(next > x) {
            return Err(Error::NonMonotone { index: k });
        }
        x = next;
        times.push(k as f64 * dt);
        xs.push(x);
        dxs.push(rhs(x));
    }
    let c_star = harmonic_mean_speed(cfun)?;
    let mut traj = PacedTrajectory {
        y,
        l,
        dt,
        times,
        x: xs,
        dx: dxs,
        c_star,
        t_l: l / c_star,
        first_crossing: None,
    };
    traj.first_crossing = traj.x.iter().position(|v| *v >= l).map(|i| {
        if i == 0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (traj.times[i - 1], traj.times[i]);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if traj.eval(mid).unwrap() < l {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    });
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeParams {
    pub eps: f64,
    pub gamma1: f64,
    pub delta1: f64,
    pub m1: f64,
    pub beta1: f64,
    /// `sup |d_y f|` in the medium variable.
    pub k1: f64,
    /// `sup |d_u f|`.
    pub k2: f64,
    pub c1: f64,
    /// Admissibility threshold `2 C1 / (gamma1 eps)`.
    pub l1eps: f64,
}

impl EnvelopeParams {
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self.l1eps = 2.0 * self.c1 / (self.gamma1 * eps);
        self
    }

    /// `C2`, with the `K1 -> 0` divergence left to [`q_eta`].
    pub fn c2_tail(&self) -> f64 {
        self.m1 * self.beta1 / (self.k2 + self.gamma1)
    }

    pub fn c3(&self, l: f64) -> f64 {
        (self.eps - self.c1 / (l * self.gamma1)) / (self.gamma1 + self.k1 / (l * self.beta1))
    }
}

fn df_band_sup(lr: &LocalReaction, delta: f64, nu: usize) -> f64 {
    let mut m = lr.slope0().max(lr.slope1());
    for k in 0..=nu {
        let u = delta * k as f64 / nu as f64;
        m = m.max(lr.df(u)).max(lr.df(1.0 - u));
    }
    m
}

/// `-sup d_u f` over all `x` and `u` within `delta` of 0 or 1.
pub fn band_rate(medium: &PeriodicMedium, delta: f64) -> f64 {
    let nx = if medium.is_homogeneous() { 1 } else { NX_SCAN };
    let nu = ((delta * NU_SCAN as f64).ceil() as usize).max(8);
    -(0..nx).map(|i| df_band_sup(&medium.local(i as f64 / nx as f64), delta, nu)).fold(f64::NEG_INFINITY, f64::max)
}

/// `(delta1, gamma1)`. With a plateau `delta0'` the width is `delta0'`;
/// otherwise the widest band keeping half the rate at the equilibria.
pub fn choose_delta1(medium: &PeriodicMedium) -> Result<(f64, f64)> {
    let r0 = band_rate(medium, 0.0);
    if !(r0 > 0.0) {
        return Err(Error::AssumptionViolated("d_u f must be negative at 0 and 1"));
    }
    let delta1 = match medium.delta0p() {
        Some(d) if band_rate(medium, d) > 0.0 => d,
        _ => {
            let mut best = 0.0;
            for k in 1..=100 {
                let d = 0.25 * k as f64 / 100.0;
                if band_rate(medium, d) >= 0.5 * r0 {
                    best = d;
                } else {
                    break;
                }
            }
            best
        }
    };
    if delta1 == 0.0 {
        return Err(Error::AssumptionViolated("no band with negative d_u f"));
    }
    Ok((delta1, 0.9 * band_rate(medium, delta1)))
}

/// Estimates every constant of the envelope construction at amplitude `eps`.
pub fn estimate_constants(medium: &PeriodicMedium, waves: &WaveFamily, eps: f64) -> Result<EnvelopeParams> {
    if waves.len() < 8 {
        return Err(Error::InvalidArgument("need waves at eight or more y-nodes".into()));
    }
    let (delta1, gamma1) = choose_delta1(medium)?;
    let limit = (0.5 * delta1).min(medium.delta0());
    if !(eps > 0.0) || eps > limit * (1.0 + 1e-12) {
        return Err(Error::EpsilonTooLarge { eps, limit });
    }
    let mut m1: f64 = 0.0;
    let mut beta: f64 = f64::INFINITY;
    let band = (2.0 * eps).min(0.5 * delta1);
    for w in waves.waves() {
        let right = w.xi_grid().into_iter().zip(&w.psi).find(|(_, p)| **p <= 0.5 * delta1).map(|(x, _)| x);
        let left = w.xi_grid().into_iter().zip(&w.psi).rev().find(|(_, p)| **p >= 1.0 - 0.5 * delta1).map(|(x, _)| x);
        let (Some(r), Some(l)) = (right, left) else {
            return Err(Error::ShortTail { points: w.psi.len() });
        };
        m1 = m1.max(r).max(-l);
        let s = w.steepness(band).ok_or(Error::BandNotSampled { delta: band })?;
        beta = beta.min(-s);
    }
    let k1 = medium.x_lipschitz(NX_SCAN, 256);
    let k2 = medium.lipschitz();
    let opts = WaveOptions::default();
    let n = waves.len();
    let mut dy: f64 = 0.0;
    if !medium.is_homogeneous() {
        for j in 0..n {
            dy = dy.max(dpsi_dy(medium, j as f64 / n as f64, 1e-3, &opts)?);
        }
    }
    let c_max = waves.waves().iter().map(|w| w.c.abs()).fold(0.0, f64::max);
    let c1 = c_max * dy;
    Ok(EnvelopeParams {
        eps,
        gamma1,
        delta1,
        m1,
        beta1: 0.9 * beta,
        k1,
        k2,
        c1,
        l1eps: 2.0 * c1 / (gamma1 * eps),
    })
}

/// `expm1(k1 t / (L beta1)) / k1`, continuous at `k1 = 0`.
fn growth_over_k1(p: &EnvelopeParams, l: f64, t: f64) -> f64 {
    let s = t / (l * p.beta1);
    if p.k1 < 1e-12 {
        s * (1.0 + 0.5 * p.k1 * s)
    } else {
        (p.k1 * s).exp_m1() / p.k1
    }
}

/// Closed forms of `q` and `eta`.
pub fn q_eta(p: &EnvelopeParams, l: f64, t: f64) -> Result<(f64, f64)> {
    if l < p.l1eps {
        return Err(Error::Inadmissible { l, threshold: p.l1eps });
    }
    if t < 0.0 {
        return Err(Error::OutOfRange { value: t, lo: 0.0, hi: f64::INFINITY });
    }
    let floor = p.c1 / (l * p.gamma1);
    let decay = (-p.gamma1 * t).exp();
    let q = floor + (p.eps - floor) * decay;
    let kt = p.k1 * t / (l * p.beta1);
    let c3 = p.c3(l);
    // (C2 + C3) e^{kt} - C3 e^{-g t} - C2, with C2 split so its 1/K1 part
    // multiplies expm1 directly.
    let bracket = p.c1 * p.beta1 / p.gamma1 * growth_over_k1(p, l, t)
        + p.c2_tail() * kt.exp_m1()
        + c3 * (kt.exp() - decay);
    Ok((q, -(p.gamma1 + p.k2) / p.beta1 * bracket))
}

/// The `L`-uniform lower band for `eta` on `[0, k T_L + tau]`.
pub fn eta_floor(p: &EnvelopeParams, c_star: f64, eps0: f64, k: f64, tau: f64) -> f64 {
    let g = (p.gamma1 + p.k2) / p.beta1;
    let c2 = if p.k1 == 0.0 { 0.0 } else { p.c1 * p.beta1 / (p.gamma1 * p.k1) } + p.c2_tail();
    let a1 = g * c2;
    let a2 = g * (c2 + eps0 / p.gamma1);
    let tau_term = if p.k1 == 0.0 {
        0.0
    } else if p.c1 == 0.0 {
        f64::INFINITY
    } else {
        p.k1 * tau * p.gamma1 * eps0 / (2.0 * p.c1 * p.beta1)
    };
    a1 - a2 * (p.k1 * k / (c_star * p.beta1) + tau_term).exp()
}

/// `(v_minus, v_plus)` at `(t, x)`.
pub fn envelope_values(p: &EnvelopeParams, waves: &WaveFamily, traj: &PacedTrajectory, t: f64, x: f64) -> Result<(f64, f64)> {
    let xt = traj.eval(t)?;
    let (q, eta) = q_eta(p, traj.l, t)?;
    let z = traj.y + xt / traj.l;
    let hi = waves.eval(x - xt + eta, z).0 + q;
    let lo = waves.eval(x - xt - eta, z).0 - q;
    Ok((lo, hi))
}

/// Largest `(max(v-,0) - v, v - min(v+,1))` over one snapshot; negative
/// entries mean the snapshot is inside the envelope.
pub fn containment_violation(
    p: &EnvelopeParams,
    waves: &WaveFamily,
    traj: &PacedTrajectory,
    field: &Field,
) -> Result<(f64, f64)> {
    let xt = traj.eval(field.t)?;
    let (q, eta) = q_eta(p, traj.l, field.t)?;
    let z = traj.y + xt / traj.l;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for (i, v) in field.u.iter().enumerate() {
        let x = field.grid.x(i);
        let hi = (waves.eval(x - xt + eta, z).0 + q).min(1.0);
        let lo = (waves.eval(x - xt - eta, z).0 - q).max(0.0);
        lower = lower.max(lo - v);
        upper = upper.max(v - hi);
    }
    Ok((lower, upper))
}

/// First time the samples `(t, v(t, L))` reach 1/2, linear in `t`.
pub fn crossing_time_tilde(samples: &[(f64, f64)], t_max: f64) -> Result<f64> {
    for w in samples.windows(2) {
        let ((t0, v0), (t1, v1)) = (w[0], w[1]);
        if t0 > t_max {
            break;
        }
        if v0 < 0.5 && v1 >= 0.5 {
            let t = t0 + (t1 - t0) * (0.5 - v0) / (v1 - v0);
            return if t <= t_max { Ok(t) } else { Err(Error::NoCrossing("no 1/2 crossing at x = L before 2 T_L")) };
        }
    }
    Err(Error::NoCrossing("no 1/2 crossing at x = L before 2 T_L"))
}

/// `|X(t + T~) - X(T_L) - c(y) (t + T~ - T_L)|`.
pub fn pacing_defect(traj: &PacedTrajectory, c_y: f64, t_tilde: f64, t: f64) -> Result<f64> {
    Ok((traj.eval(t + t_tilde)? - traj.eval(traj.t_l)? - c_y * (t + t_tilde - traj.t_l)).abs())
}

/// `rho(x, set) = inf over x2 in set of int_{x2}^{x} ds / c(s)`.
pub fn interface_distance(cfun: &dyn Fn(f64) -> f64, x: f64, set: &[f64]) -> f64 {
    set.iter()
        .map(|&x2| adaptive_simpson(|s| 1.0 / cfun(s), x2, x, 1e-12))
        .fold(f64::INFINITY, f64::min)
}

/// `(min v where rho < t - margin, max v where rho > t + margin)` over one
/// snapshot of a rescaled run; `rho` is given per grid node.
pub fn dichotomy(field: &Field, rho: &[f64], margin: f64) -> (f64, f64) {
    let t = field.t;
    let mut behind = f64::INFINITY;
    let mut ahead = f64::NEG_INFINITY;
    for (v, r) in field.u.iter().zip(rho) {
        if *r < t - margin {
            behind = behind.min(*v);
        } else if *r > t + margin {
            ahead = ahead.max(*v);
        }
    }
    (behind, ahead)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FifeMcLeodParams {
    pub eps0: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub k0: f64,
    /// Steepness floor of the front on `{eps0 <= phi <= 1 - eps0}`.
    pub beta: f64,
    pub gamma0: f64,
}

/// Largest `eps0 <= delta0 / 2` with `d_u f <= -gamma0 / 2` within `2 eps0`
/// of the equilibria.
pub fn choose_eps0(medium: &PeriodicMedium) -> Result<f64> {
    let target = 0.5 * medium.gamma0();
    let mut best = 0.0;
    for k in 1..=200 {
        let e = 0.5 * medium.delta0() * k as f64 / 200.0;
        if band_rate(medium, 2.0 * e) >= target {
            best = e;
        } else {
            break;
        }
    }
    if best == 0.0 {
        return Err(Error::AssumptionViolated("no eps0 with d_u f <= -gamma0/2"));
    }
    Ok(best)
}

fn front_value(front: &PulsatingFront, xi: f64, y: f64) -> f64 {
    if xi <= front.xi0 {
        1.0
    } else if xi >= front.xi_max() {
        0.0
    } else {
        front.eval(xi, y).unwrap()
    }
}

/// Minimum of `-d_xi phi` by differences on `{eps0 <= phi <= 1 - eps0}`.
pub fn front_steepness(front: &PulsatingFront, eps0: f64) -> Option<f64> {
    let mut m: Option<f64> = None;
    for j in 0..front.n_y {
        let r = front.row(j);
        for k in 0..r.len() - 1 {
            let mid = 0.5 * (r[k] + r[k + 1]);
            if mid >= eps0 && mid <= 1.0 - eps0 {
                let s = (r[k] - r[k + 1]) / front.dxi;
                m = Some(m.map_or(s, |v: f64| v.min(s)));
            }
        }
    }
    m
}

fn fm_lower(front: &PulsatingFront, p: &FifeMcLeodParams, t: f64, x: f64) -> f64 {
    let l = front.l;
    front_value(front, l * (x - front.c_l * t + p.c_minus) + p.k0 * p.eps0, x) - p.eps0 * (-p.gamma0 * l * t / 2.0).exp()
}

fn fm_upper(front: &PulsatingFront, p: &FifeMcLeodParams, t: f64, x: f64) -> f64 {
    let l = front.l;
    front_value(front, l * (x - front.c_l * t - p.c_plus) - p.k0 * p.eps0, x) + p.eps0 * (-p.gamma0 * l * t / 2.0).exp()
}

/// Largest violation of the two bounds on one rescaled snapshot.
pub fn fife_mcleod_violation(front: &PulsatingFront, p: &FifeMcLeodParams, field: &Field) -> (f64, f64) {
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for (i, v) in field.u.iter().enumerate() {
        let x = field.grid.x(i);
        lower = lower.max(fm_lower(front, p, field.t, x) - v);
        upper = upper.max(v - fm_upper(front, p, field.t, x));
    }
    (lower, upper)
}

/// Fits the smallest `C+-` (within `1e-6`) making the initial data `g`
/// satisfy both bounds at `t = 0`.
pub fn fit_fife_mcleod(medium: &PeriodicMedium, front: &PulsatingFront, g: &Field) -> Result<FifeMcLeodParams> {
    let eps0 = choose_eps0(medium)?;
    let beta = front_steepness(front, eps0).ok_or(Error::BandNotSampled { delta: eps0 })?;
    let gamma0 = medium.gamma0();
    let k2 = medium.lipschitz();
    let mut p = FifeMcLeodParams { eps0, c_plus: 0.0, c_minus: 0.0, k0: (gamma0 + 2.0 * k2) / (beta * gamma0), beta, gamma0 };
    let span = g.grid.x_max() - g.grid.x_min + 1.0;
    let fit = |p: &mut FifeMcLeodParams, upper: bool| -> Result<()> {
        let set = |p: &mut FifeMcLeodParams, c: f64| {
            if upper {
                p.c_plus = c
            } else {
                p.c_minus = c
            }
        };
        let ok = |p: &FifeMcLeodParams| {
            let f = Field { grid: g.grid, t: 0.0, u: g.u.clone() };
            let (lo, hi) = fife_mcleod_violation(front, p, &f);
            if upper {
                hi <= 0.0
            } else {
                lo <= 0.0
            }
        };
        set(p, 0.0);
        if ok(p) {
            return Ok(());
        }
        set(p, span);
        if !ok(p) {
            return Err(Error::Fit("initial data cannot be placed between shifted fronts"));
        }
        let (mut lo, mut hi) = (0.0, span);
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            set(p, mid);
            if ok(p) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        set(p, hi);
        Ok(())
    };
    fit(&mut p, true)?;
    fit(&mut p, false)?;
    Ok(p)
}

/// Outcome of one offset run checked against the envelopes.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentRun {
    pub eps: f64,
    pub l: f64,
    pub max_violation_lower: f64,
    pub max_violation_upper: f64,
    /// First crossing of 1/2 at `x = L`, when it happens before `2 T_L`.
    pub t_tilde: Option<f64>,
    pub t_l: f64,
    pub trajectory: PacedTrajectory,
    /// The state at the end of the run.
    pub last: Field,
}

/// Runs the offset equation from `init` up to `t_end` (default `2 T_L`),
/// checking containment every `check_stride` steps and sampling `v(t, L)`
/// at every step.
#[allow(clippy::too_many_arguments)]
pub fn run_containment(
    medium: &PeriodicMedium,
    waves: &WaveFamily,
    params: &EnvelopeParams,
    y: f64,
    l: f64,
    init: Field,
    t_end: Option<f64>,
    dt: f64,
    check_stride: usize,
) -> Result<ContainmentRun> {
    if l < params.l1eps {
        return Err(Error::Inadmissible { l, threshold: params.l1eps });
    }
    let cfun = |s: f64| waves.speed(s);
    let c_max = (0..256).map(|k| cfun(k as f64 / 256.0)).fold(0.0, f64::max);
    let c_star = harmonic_mean_speed(&cfun)?;
    let t_l = l / c_star;
    let t_end = t_end.unwrap_or(2.0 * t_l);
    let traj = solve_x(&cfun, y, l, t_end.max(2.0 * t_l) * 1.05, 0.005 * l / c_max)?;
    let il = init.grid.index_of(l).ok_or(Error::OutOfRange {
        value: l,
        lo: init.grid.x_min,
        hi: init.grid.x_max(),
    })?;
    let cfg = crate::pdesolver::SolverConfig::new(dt);
    let mut samples = Vec::new();
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::NEG_INFINITY;
    let mut err = None;
    let mut k = 0usize;
    let stride = check_stride.max(1);
    let last = crate::pdesolver::evolve_offset(medium, y, l, init, t_end, &cfg, &mut |f| {
        samples.push((f.t, f.u[il]));
        if k % stride == 0 || f.t >= t_end {
            match containment_violation(params, waves, &traj, f) {
                Ok((a, b)) => {
                    lower = lower.max(a);
                    upper = upper.max(b);
                }
                Err(e) => err = Some(e),
            }
        }
        k += 1;
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(ContainmentRun {
        eps: params.eps,
        l,
        max_violation_lower: lower,
        max_violation_upper: upper,
        t_tilde: crossing_time_tilde(&samples, 2.0 * t_l).ok(),
        t_l,
        trajectory: traj,
        last,
    })
}
