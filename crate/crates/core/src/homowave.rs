//! Frozen-coefficient traveling waves `a psi'' + c psi' + f(y, psi) = 0`,
//! `psi(-inf) = 1`, `psi(+inf) = 0`, `psi(0) = 1/2`, and the harmonic-mean
//! limit speed built from them.
//!
//! The speed is found by bisection on a shooting predicate: the orbit leaving
//! the state 1 along its unstable direction either turns back (`psi' >= 0`
//! while `psi > 0`, speed too large) or crosses below 0 (speed too small).
//! Media with negative mass are handled by the reflection
//! `g(v) = -f(1 - v)`, which flips the sign of the speed.

use alloc::boxed::Box;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::interp::{frac, hermite3, hermite5, lagrange4_weights, PeriodicSamples};
use crate::medium::{LocalReaction, PeriodicMedium};
use crate::ode::{dopri5, AdaptiveOptions, Flow};
use crate::quad::{periodic_mean, simpson};

#[derive(Debug, Clone, Copy)]
pub struct WaveOptions {
    /// Bisection stops once the speed bracket is this narrow.
    pub tol: f64,
    /// Spacing of the stored profile.
    pub dxi: f64,
    /// Profiles are integrated until `psi` is this close to 0 or 1.
    pub tail: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_iter: usize,
    /// Acceptance bound on the finite-difference ODE residual.
    pub residual_tol: f64,
}

impl Default for WaveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            dxi: 0.05,
            tail: 1e-9,
            rtol: 1e-11,
            atol: 1e-16,
            max_iter: 200,
            residual_tol: 1e-3,
        }
    }
}

/// Profile of a frozen wave on a uniform grid plus exponential tails.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelingWave {
    pub y: f64,
    pub c: f64,
    pub a: f64,
    pub xi0: f64,
    pub dxi: f64,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub residual_norm: f64,
    /// `psi ~ exp(-mu_right xi)` as `xi -> +inf`.
    pub mu_right: f64,
    /// `1 - psi ~ exp(lam_left xi)` as `xi -> -inf`.
    pub lam_left: f64,
}

impl TravelingWave {
    pub fn xi_grid(&self) -> Vec<f64> {
        (0..self.psi.len()).map(|k| self.xi0 + k as f64 * self.dxi).collect()
    }

    pub fn xi_max(&self) -> f64 {
        self.xi0 + (self.psi.len() - 1) as f64 * self.dxi
    }

    /// `(psi, psi')` at any `xi`; exponential tails outside the grid.
    pub fn eval(&self, xi: f64) -> (f64, f64) {
        let n = self.psi.len();
        let s = (xi - self.xi0) / self.dxi;
        if s <= 0.0 {
            let q = (1.0 - self.psi[0]) * (self.lam_left * (xi - self.xi0)).exp();
            return (1.0 - q, -self.lam_left * q);
        }
        if s >= (n - 1) as f64 {
            let p = self.psi[n - 1] * (-self.mu_right * (xi - self.xi_max())).exp();
            return (p, -self.mu_right * p);
        }
        let k = s.floor() as usize;
        let x0 = self.xi0 + k as f64 * self.dxi;
        hermite3(x0, x0 + self.dxi, self.psi[k], self.psi[k + 1], self.dpsi[k], self.dpsi[k + 1], xi)
    }

    pub fn psi_at(&self, xi: f64) -> f64 {
        self.eval(xi).0
    }

    /// `max psi'` over grid nodes with `delta <= psi <= 1 - delta`; negative
    /// for a steep profile. `None` when the band has no nodes.
    pub fn steepness(&self, delta: f64) -> Option<f64> {
        self.psi
            .iter()
            .zip(&self.dpsi)
            .filter(|(p, _)| **p >= delta && **p <= 1.0 - delta)
            .map(|(_, d)| *d)
            .reduce(f64::max)
    }

    /// The adjoint kernel `exp(c xi / a) psi'(xi)`.
    pub fn adjoint_kernel(&self, xi: f64) -> f64 {
        (self.c * xi / self.a).exp() * self.eval(xi).1
    }
}

/// Tail rates and fitted slopes of one wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBounds {
    pub mu1: f64,
    pub mu2: f64,
    pub mu1_tilde: f64,
    pub empirical_right_slope: f64,
    pub empirical_left_slope: f64,
    /// `exp` of the fitted intercepts.
    pub right_prefactor: f64,
    pub left_prefactor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSpeedResult {
    pub c_star: f64,
    pub quad_error_estimate: f64,
    pub n_samples: usize,
    /// Frozen speeds at the nodes `j / n_samples`.
    pub speeds: Vec<f64>,
}

/// The frozen problem in shooting form, already reflected if needed.
struct Frozen<'a> {
    a: f64,
    lr: &'a LocalReaction,
    reflected: bool,
}

impl Frozen<'_> {
    #[inline]
    fn f(&self, u: f64) -> f64 {
        if self.reflected {
            -self.lr.f_ext(1.0 - u)
        } else {
            self.lr.f_ext(u)
        }
    }

    fn slope0(&self) -> f64 {
        if self.reflected {
            self.lr.slope1()
        } else {
            self.lr.slope0()
        }
    }

    fn slope1(&self) -> f64 {
        if self.reflected {
            self.lr.slope0()
        } else {
            self.lr.slope1()
        }
    }

    /// `1 - psi ~ exp(lam xi)` near the state 1.
    fn lam(&self, c: f64) -> f64 {
        (-c + (c * c - 4.0 * self.a * self.slope1()).sqrt()) / (2.0 * self.a)
    }

    /// `psi ~ exp(-mu xi)` near the state 0.
    fn mu(&self, c: f64) -> f64 {
        (c + (c * c - 4.0 * self.a * self.slope0()).sqrt()) / (2.0 * self.a)
    }

    fn rhs(&self, c: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        move |_, y| [y[1], -(c * y[1] + self.f(y[0])) / self.a]
    }

    /// `true` when the speed is too large (the orbit turns back).
    fn too_fast(&self, c: f64, opts: &WaveOptions) -> Result<bool> {
        let eps = opts.tail;
        let lam = self.lam(c);
        let ode = AdaptiveOptions {
            rtol: opts.rtol,
            atol: opts.atol,
            h_init: 1e-2,
            h_max: 1.0,
            max_steps: 400_000,
        };
        let mut verdict = None;
        let span = 60.0 / lam.min(self.mu(c)) + 400.0 * self.a.sqrt();
        dopri5(self.rhs(c), 0.0, [1.0 - eps, -lam * eps], span, &ode, |_, y, _| {
            if y[0] < 0.0 {
                verdict = Some(false);
                Flow::Stop
            } else if y[1] >= 0.0 {
                verdict = Some(true);
                Flow::Stop
            } else {
                Flow::Continue
            }
        })?;
        Ok(verdict.unwrap_or(false))
    }

    /// Integrates one branch from a tail until `psi` crosses 1/2 and returns
    /// the dense samples `(xi, [psi, psi', psi''])` shifted so the crossing
    /// sits at `xi = 0`.
    fn branch(&self, c: f64, from_one: bool, opts: &WaveOptions) -> Result<Vec<(f64, [f64; 3])>> {
        let eps = opts.tail;
        let (y0, t_end) = if from_one {
            ([1.0 - eps, -self.lam(c) * eps], 1e6)
        } else {
            ([eps, -self.mu(c) * eps], -1e6)
        };
        let ode = AdaptiveOptions {
            rtol: opts.rtol,
            atol: opts.atol,
            h_init: 1e-2,
            h_max: opts.dxi.max(0.01),
            max_steps: 400_000,
        };
        let rhs = self.rhs(c);
        let mut pts: Vec<(f64, [f64; 3])> = Vec::new();
        dopri5(&rhs, 0.0, y0, t_end, &ode, |t, y, dy| {
            pts.push((t, [y[0], y[1], dy[1]]));
            if (from_one && y[0] <= 0.5) || (!from_one && y[0] >= 0.5) {
                Flow::Stop
            } else {
                Flow::Continue
            }
        })?;
        let n = pts.len();
        if n < 2 || (pts[n - 1].1[0] - 0.5) * (pts[n - 2].1[0] - 0.5) > 0.0 {
            return Err(Error::NoCrossing("frozen wave branch never reached 1/2"));
        }
        let (ta, ya) = pts[n - 2];
        let (tb, yb) = pts[n - 1];
        let (mut lo, mut hi) = (ta, tb);
        let g = |t: f64| hermite5(ta, tb, ya, yb, t).0 - 0.5;
        let ga = g(ta);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if (g(m) > 0.0) == (ga > 0.0) {
                lo = m;
            } else {
                hi = m;
            }
        }
        let t_half = 0.5 * (lo + hi);
        for p in pts.iter_mut() {
            p.0 -= t_half;
        }
        if !from_one {
            pts.reverse();
        }
        Ok(pts)
    }
}

/// Largest partial mass `int_0^{s0} f(u) du` over 64 candidates `s0`.
fn best_partial_mass(f: &dyn Fn(f64) -> f64) -> f64 {
    (1..=64)
        .map(|k| k as f64 / 65.0)
        .map(|s0| simpson(f, 0.0, s0, 128))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max|f| / sqrt(2 a^{-1} int_0^{s0} f)` for the best scanned `s0`.
fn a_priori_bound(fr: &Frozen) -> Option<f64> {
    let f = |u: f64| fr.f(u);
    let mass = best_partial_mass(&f);
    if !(mass > 0.0) {
        return None;
    }
    let fmax = (0..=512).map(|k| fr.f(k as f64 / 512.0).abs()).fold(0.0, f64::max);
    Some(fmax / (2.0 * mass / fr.a).sqrt())
}

/// Doubles `high` until the shooting predicate says it is too fast.
fn confirm_upper(fr: &Frozen, mut high: f64, opts: &WaveOptions) -> Result<f64> {
    let mut tries = 0;
    while !fr.too_fast(high, opts)? {
        high *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::NotConverged { what: "speed bracket expansion", iterations: tries });
        }
    }
    Ok(high)
}

/// A speed bracket `(0, high]` for a positive-mass position.
///
/// `high` starts from `max|f| / sqrt(2 a^{-1} int_0^{s0} f)` for the best
/// scanned `s0` and is doubled until the shooting predicate confirms it is
/// an upper bound (the formula alone can undershoot).
pub fn frozen_speed_bracket(medium: &PeriodicMedium, y: f64) -> Result<(f64, f64)> {
    let lr = medium.local(y);
    let fr = Frozen { a: medium.a(y), lr: &lr, reflected: false };
    let start = a_priori_bound(&fr).ok_or(Error::NoPositiveMass { y })?;
    Ok((0.0, confirm_upper(&fr, start, &WaveOptions::default())?))
}

/// The a-priori formula value alone, before any doubling.
pub fn a_priori_speed_bound(medium: &PeriodicMedium, y: f64) -> Result<f64> {
    let lr = medium.local(y);
    let fr = Frozen { a: medium.a(y), lr: &lr, reflected: false };
    a_priori_bound(&fr).ok_or(Error::NoPositiveMass { y })
}

fn bisect_speed(fr: &Frozen, high: f64, opts: &WaveOptions) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = high;
    let mut it = 0;
    while hi - lo > opts.tol {
        if it >= opts.max_iter {
            return Err(Error::NotConverged { what: "speed bisection", iterations: it });
        }
        it += 1;
        let m = 0.5 * (lo + hi);
        if fr.too_fast(m, opts)? {
            hi = m;
        } else {
            lo = m;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn setup(medium: &PeriodicMedium, y: f64) -> (LocalReaction, f64, bool) {
    let lr = medium.local(y);
    let reflected = lr.mass() < 0.0;
    (lr, medium.a(y), reflected)
}

fn positive_speed(fr: &Frozen, opts: &WaveOptions) -> Result<f64> {
    let start = a_priori_bound(fr).unwrap_or(0.1 * fr.a.sqrt());
    let high = confirm_upper(fr, start, opts)?;
    bisect_speed(fr, high, opts)
}

/// Frozen speed `c(y)` only (no profile).
pub fn frozen_speed(medium: &PeriodicMedium, y: f64, opts: &WaveOptions) -> Result<f64> {
    let (lr, a, reflected) = setup(medium, y);
    let fr = Frozen { a, lr: &lr, reflected };
    let c = positive_speed(&fr, opts).map_err(|e| Error::Wave { y, source: Box::new(e) })?;
    Ok(if reflected { -c } else { c })
}

/// Solves the frozen wave at `y`; `opts.tol` is the speed bracket width.
pub fn solve_frozen_wave(medium: &PeriodicMedium, y: f64, opts: &WaveOptions) -> Result<TravelingWave> {
    solve_inner(medium, y, opts).map_err(|e| match e {
        Error::Wave { .. } => e,
        other => Error::Wave { y, source: Box::new(other) },
    })
}

fn solve_inner(medium: &PeriodicMedium, y: f64, opts: &WaveOptions) -> Result<TravelingWave> {
    let (lr, a, reflected) = setup(medium, y);
    let fr = Frozen { a, lr: &lr, reflected };
    let c = positive_speed(&fr, opts)?;
    let left = fr.branch(c, true, opts)?;
    let right = fr.branch(c, false, opts)?;
    let (mut pts, lam, mu) = (left, fr.lam(c), fr.mu(c));
    pts.extend(right.into_iter().skip(1));

    let dxi = opts.dxi;
    let k_lo = (pts[0].0 / dxi).ceil() as i64;
    let k_hi = (pts[pts.len() - 1].0 / dxi).floor() as i64;
    let mut psi = Vec::with_capacity((k_hi - k_lo + 1) as usize);
    let mut dpsi = Vec::with_capacity(psi.capacity());
    let mut seg = 0usize;
    for k in k_lo..=k_hi {
        let xi = k as f64 * dxi;
        while seg + 2 < pts.len() && pts[seg + 1].0 < xi {
            seg += 1;
        }
        let (xa, ya) = pts[seg];
        let (xb, yb) = pts[seg + 1];
        let (v, d) = if xb > xa { hermite5(xa, xb, ya, yb, xi) } else { (ya[0], ya[1]) };
        psi.push(v);
        dpsi.push(d);
    }

    // In the reflected frame psi(xi) = 1 - psi_g(-xi).
    let (psi, dpsi, xi0, lam_left, mu_right) = if reflected {
        let psi: Vec<f64> = psi.iter().rev().map(|p| 1.0 - p).collect();
        let dpsi: Vec<f64> = dpsi.iter().rev().copied().collect();
        (psi, dpsi, -(k_hi as f64) * dxi, mu, lam)
    } else {
        (psi, dpsi, k_lo as f64 * dxi, lam, mu)
    };
    let c = if reflected { -c } else { c };

    for (i, d) in dpsi.iter().enumerate().skip(1).take(dpsi.len().saturating_sub(2)) {
        if !(*d < 0.0) {
            return Err(Error::NonMonotone { index: i });
        }
    }
    let mut residual: f64 = 0.0;
    for k in 1..psi.len() - 1 {
        let d2 = (dpsi[k + 1] - dpsi[k - 1]) / (2.0 * dxi);
        residual = residual.max((a * d2 + c * dpsi[k] + lr.f(psi[k])).abs());
    }
    if residual > opts.residual_tol {
        return Err(Error::NotConverged { what: "wave residual", iterations: 0 });
    }
    Ok(TravelingWave { y, c, a, xi0, dxi, psi, dpsi, residual_norm: residual, mu_right, lam_left })
}

/// Harmonic mean of frozen speeds by the periodic trapezoid rule on `n_y`
/// nodes; the error estimate compares against the rule on every other node.
pub fn limit_speed(medium: &PeriodicMedium, n_y: usize, tol: f64) -> Result<LimitSpeedResult> {
    let opts = WaveOptions { tol, ..Default::default() };
    let speeds = (0..n_y)
        .map(|j| frozen_speed(medium, j as f64 / n_y as f64, &opts))
        .collect::<Result<Vec<f64>>>()?;
    limit_speed_from(speeds)
}

/// The reduction step of [`limit_speed`] for precomputed node speeds.
pub fn limit_speed_from(speeds: Vec<f64>) -> Result<LimitSpeedResult> {
    let n = speeds.len();
    if n == 0 {
        return Err(Error::InvalidArgument("limit speed needs at least one node".into()));
    }
    if let Some(j) = speeds.iter().position(|c| !(*c > 0.0)) {
        return Err(Error::InvalidArgument(alloc::format!(
            "harmonic mean needs positive speeds; c = {} at node {j}",
            speeds[j]
        )));
    }
    let inv: Vec<f64> = speeds.iter().map(|c| 1.0 / c).collect();
    let c_star = 1.0 / periodic_mean(&inv);
    let err = if n % 2 == 0 && n >= 2 {
        let half: Vec<f64> = inv.iter().step_by(2).copied().collect();
        (1.0 / periodic_mean(&half) - c_star).abs()
    } else {
        0.0
    };
    Ok(LimitSpeedResult { c_star, quad_error_estimate: err, n_samples: n, speeds })
}

fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Analytic tail rates at the wave's own `y` and least-squares log slopes
/// over the stored tails (`psi < delta0`, resp. `psi > 1 - delta0`).
pub fn decay_bounds(medium: &PeriodicMedium, wave: &TravelingWave) -> Result<DecayBounds> {
    let g = medium.gamma0();
    let d0 = medium.delta0();
    let (a, c) = (wave.a, wave.c);
    let disc = (c * c + 4.0 * g * a).sqrt();
    let mu1 = (c + disc) / (2.0 * a);
    let mu2 = (-c + disc) / (2.0 * a);
    let grid = wave.xi_grid();
    let right: Vec<(f64, f64)> = grid
        .iter()
        .zip(&wave.psi)
        .filter(|(x, p)| **p < d0 && **x > 0.0)
        .map(|(x, p)| (*x, p.ln()))
        .collect();
    let left: Vec<(f64, f64)> = grid
        .iter()
        .zip(&wave.psi)
        .filter(|(x, p)| **p > 1.0 - d0 && **x < 0.0)
        .map(|(x, p)| (*x, (1.0 - p).ln()))
        .collect();
    for w in [&right, &left] {
        if w.len() < 20 {
            return Err(Error::ShortTail { points: w.len() });
        }
    }
    let (rs, ri) = fit_line(&right);
    let (ls, li) = fit_line(&left);
    Ok(DecayBounds {
        mu1,
        mu2,
        mu1_tilde: mu2,
        empirical_right_slope: rs,
        empirical_left_slope: ls,
        right_prefactor: ri.exp(),
        left_prefactor: li.exp(),
    })
}

/// Sup norm of the centered difference `(psi(., y+dy) - psi(., y-dy)) / 2dy`.
pub fn dpsi_dy(medium: &PeriodicMedium, y: f64, dy: f64, opts: &WaveOptions) -> Result<f64> {
    let wp = solve_frozen_wave(medium, y + dy, opts)?;
    let wm = solve_frozen_wave(medium, y - dy, opts)?;
    Ok(profile_difference(&wp, &wm) / (2.0 * dy))
}

/// `sup_xi |psi_1 - psi_2|` over the union of the two grids.
pub fn profile_difference(w1: &TravelingWave, w2: &TravelingWave) -> f64 {
    let lo = w1.xi0.min(w2.xi0);
    let hi = w1.xi_max().max(w2.xi_max());
    let dxi = w1.dxi.min(w2.dxi);
    let n = ((hi - lo) / dxi).ceil() as usize;
    (0..=n)
        .map(|k| lo + k as f64 * dxi)
        .map(|x| (w1.psi_at(x) - w2.psi_at(x)).abs())
        .fold(0.0, f64::max)
}

/// Frozen waves on the nodes `j / n`, interpolated in `y` by periodic
/// four-point Lagrange weights.
#[derive(Debug, Clone)]
pub struct WaveFamily {
    waves: Vec<TravelingWave>,
    speeds: PeriodicSamples,
}

impl WaveFamily {
    pub fn solve(medium: &PeriodicMedium, n: usize, opts: &WaveOptions) -> Result<Self> {
        let waves = (0..n)
            .map(|j| solve_frozen_wave(medium, j as f64 / n as f64, opts))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_waves(waves))
    }

    /// `waves[j]` must be the wave at `y = j / waves.len()`.
    pub fn from_waves(waves: Vec<TravelingWave>) -> Self {
        let speeds = PeriodicSamples::new(waves.iter().map(|w| w.c).collect());
        Self { waves, speeds }
    }

    pub fn waves(&self) -> &[TravelingWave] {
        &self.waves
    }

    pub fn len(&self) -> usize {
        self.waves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }

    /// `c(y)` by trigonometric interpolation of the node speeds.
    pub fn speed(&self, y: f64) -> f64 {
        self.speeds.eval(frac(y))
    }

    pub fn speeds(&self) -> &PeriodicSamples {
        &self.speeds
    }

    /// `(psi, d_xi psi)` at `(xi, y)`.
    pub fn eval(&self, xi: f64, y: f64) -> (f64, f64) {
        let n = self.waves.len();
        if n == 1 {
            return self.waves[0].eval(xi);
        }
        let s = frac(y) * n as f64;
        let j = (s.floor() as usize).min(n - 1);
        let w = lagrange4_weights(s - j as f64);
        let mut v = 0.0;
        let mut d = 0.0;
        for (k, wk) in w.iter().enumerate() {
            let (p, dp) = self.waves[(j + n + k - 1) % n].eval(xi);
            v += wk * p;
            d += wk * dp;
        }
        (v, d)
    }

    /// Sup over the nodes and a `xi` window of `|d_y psi|`, by centered
    /// differences between neighbouring nodes.
    pub fn sup_dy(&self) -> f64 {
        let n = self.waves.len();
        if n < 2 {
            return 0.0;
        }
        let mut m = 0.0f64;
        for j in 0..n {
            let d = profile_difference(&self.waves[(j + 1) % n], &self.waves[(j + n - 1) % n]);
            m = m.max(d * n as f64 / 2.0);
        }
        m
    }
}
