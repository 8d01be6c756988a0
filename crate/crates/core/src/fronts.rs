//! Pulsating fronts by direct simulation: speed from level-1/2 crossing
//! times at the probes `x = kL`, profile and phase shift from one recorded
//! period, width diagnostics and the convergence residuals against frozen
//! waves.
//!
//! Runs use a moving window that jumps by exactly one period `L` whenever the
//! front drifts out of its middle part. Since `L / h` is an integer the
//! coefficients are unchanged by the jump, so one [`Stepper`] serves the
//! whole run.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::homowave::{frozen_speed, WaveFamily, WaveOptions};
use crate::interp::{frac, lagrange4_weights};
use crate::medium::PeriodicMedium;
use crate::pdesolver::{Boundary, Equation, Field, Grid1D, Stepper};
use crate::quad::adaptive_simpson;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontConfig {
    pub h: f64,
    pub dt: f64,
    /// Minimum distance between the front and either window end.
    pub pad: f64,
    pub burn_in_periods: usize,
    pub measured_periods: usize,
    pub spread_tol: f64,
    pub stall_threshold: f64,
    /// Time budget; defaults to ten periods at the reference speed.
    pub max_time: Option<f64>,
    /// Steps between snapshots; defaults to the front moving at most `h`.
    pub snapshot_stride: Option<usize>,
}

impl Default for FrontConfig {
    fn default() -> Self {
        Self {
            h: 0.05,
            dt: 0.01,
            pad: 30.0,
            burn_in_periods: 3,
            measured_periods: 3,
            spread_tol: 0.01,
            stall_threshold: 0.02,
            max_time: None,
            snapshot_stride: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedEstimate {
    pub c_l: f64,
    /// Crossing times and probe positions, in time order.
    pub crossing_times: Vec<f64>,
    pub crossing_positions: Vec<f64>,
    /// Signed speeds between consecutive kept crossings.
    pub per_period_speeds: Vec<f64>,
    pub converged: bool,
    pub rel_spread: f64,
    pub stalled: bool,
    /// Largest deviation of the boundary-adjacent cells from the clamps.
    pub boundary_deviation: f64,
    pub final_time: f64,
}

/// Front-like data `1 / (1 + e^x)` on a window aligned for [`FrontRun`].
pub fn front_like_initial(l: f64, cfg: &FrontConfig) -> Result<Field> {
    let h = cfg.h;
    let x_min = (-(cfg.pad + 0.5 * l) / h).floor() * h;
    let cells = ((2.0 * cfg.pad + 2.0 * l) / h).ceil() as usize;
    let grid = Grid1D::new(x_min, h, cells + 1)?;
    Ok(Field::from_fn(grid, 0.0, |x| 1.0 / (1.0 + x.exp())))
}

/// One stored snapshot near the front: values on `x0 + i h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub x0: f64,
    pub u: Vec<f64>,
}

/// Snapshots over (a bit more than) one period after the speed is known.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontRecord {
    pub l: f64,
    pub c_l: f64,
    pub h: f64,
    /// A crossing `U(t_c, x_c) = 1/2` with `x_c` a multiple of `L`.
    pub t_c: f64,
    pub x_c: f64,
    pub snapshots: Vec<Snapshot>,
}

/// A long run on a moving window.
pub struct FrontRun<'m> {
    medium: &'m PeriodicMedium,
    l: f64,
    cfg: FrontConfig,
    stepper: Stepper,
    field: Field,
    cells_per_period: usize,
    stride: usize,
    scratch: Vec<f64>,
    probes: BTreeMap<i64, (f64, f64)>,
    crossings: Vec<(f64, f64)>,
    crossed: alloc::collections::BTreeSet<i64>,
    x_start: f64,
    c_ref: f64,
    boundary_dev: f64,
    steps: usize,
    history: Vec<(f64, f64)>,
}

fn is_integer(v: f64) -> bool {
    (v - v.round()).abs() < 1e-6
}

impl<'m> FrontRun<'m> {
    pub fn new(medium: &'m PeriodicMedium, l: f64, init: Field, cfg: &FrontConfig) -> Result<Self> {
        let h = init.grid.h;
        if !is_integer(l / h) || !is_integer(init.grid.x_min / h) {
            return Err(Error::InvalidArgument(alloc::format!(
                "moving window needs L/h and x_min/h integral (L={l}, h={h}, x_min={})",
                init.grid.x_min
            )));
        }
        let cells_per_period = (l / h).round() as usize;
        if init.grid.n < 2 * cells_per_period {
            return Err(Error::InvalidArgument("window shorter than two periods".into()));
        }
        let stepper = Stepper::new(medium, Equation::Original { l }, init.grid, cfg.dt, Boundary::FRONT, None)?;
        let opts = WaveOptions { tol: 1e-8, ..Default::default() };
        let speeds: Vec<f64> =
            (0..8).filter_map(|j| frozen_speed(medium, j as f64 / 8.0, &opts).ok()).collect();
        let c_max = speeds.iter().map(|c| c.abs()).fold(0.0, f64::max);
        let same_sign = !speeds.is_empty()
            && (speeds.iter().all(|c| *c > 0.0) || speeds.iter().all(|c| *c < 0.0));
        let c_ref = if same_sign {
            speeds.len() as f64 / speeds.iter().map(|c| 1.0 / c.abs()).sum::<f64>()
        } else {
            c_max
        }
        .max(0.02);
        let stride = cfg
            .snapshot_stride
            .unwrap_or_else(|| ((h / (c_max.max(0.02) * cfg.dt)).floor() as usize).max(1));
        let x_start = init.level_position(0.5).ok_or(Error::NoCrossing("initial data has no 1/2 level"))?;
        Ok(Self {
            medium,
            l,
            cfg: *cfg,
            stepper,
            cells_per_period,
            stride,
            scratch: Vec::with_capacity(init.u.len()),
            field: init,
            probes: BTreeMap::new(),
            crossings: Vec::new(),
            crossed: Default::default(),
            x_start,
            c_ref,
            boundary_dev: 0.0,
            steps: 0,
            history: Vec::new(),
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn reference_speed(&self) -> f64 {
        self.c_ref
    }

    /// Advance `stride` steps, then update probes and the window.
    fn snapshot_step(&mut self) -> Result<()> {
        for _ in 0..self.stride {
            self.steps += 1;
            if !self.stepper.step(&mut self.field.u, &mut self.scratch) {
                return Err(Error::NonFinite { step: self.steps });
            }
        }
        self.field.t += self.stride as f64 * self.cfg.dt;
        self.observe();
        self.recenter();
        Ok(())
    }

    fn observe(&mut self) {
        let g = self.field.grid;
        let t = self.field.t;
        let u = &self.field.u;
        let n = u.len();
        self.boundary_dev = self.boundary_dev.max((1.0 - u[1]).abs()).max(u[n - 2].abs());
        let k_lo = (g.x_min / self.l).ceil() as i64;
        let k_hi = (g.x_max() / self.l).floor() as i64;
        self.probes.retain(|k, _| *k >= k_lo && *k <= k_hi);
        for k in k_lo..=k_hi {
            let Some(i) = g.index_of(k as f64 * self.l) else { continue };
            let cur = u[i];
            if let Some(&(tp, prev)) = self.probes.get(&k) {
                let (a, b) = (prev - 0.5, cur - 0.5);
                if !self.crossed.contains(&k) && (a * b < 0.0 || (b == 0.0 && a != 0.0)) {
                    let tc = tp + (t - tp) * a / (a - b);
                    self.crossings.push((tc, k as f64 * self.l));
                    self.crossed.insert(k);
                }
            }
            self.probes.insert(k, (t, cur));
        }
        if let Some(p) = self.field.level_position(0.5) {
            self.history.push((t, p));
        }
    }

    fn recenter(&mut self) {
        let Some(p) = self.field.level_position(0.5) else { return };
        let g = self.field.grid;
        let m = self.cells_per_period;
        let lo = g.x_min + self.cfg.pad + 0.5 * self.l;
        let hi = g.x_min + self.cfg.pad + 1.5 * self.l;
        let u = &mut self.field.u;
        let n = u.len();
        if p > hi {
            u.copy_within(m.., 0);
            for v in &mut u[n - m..] {
                *v = 0.0;
            }
            self.field.grid.x_min += self.l;
        } else if p < lo {
            u.copy_within(..n - m, m);
            for v in &mut u[..m] {
                *v = 1.0;
            }
            self.field.grid.x_min -= self.l;
        }
    }

    fn time_budget(&self) -> f64 {
        let periods = (10).max(self.cfg.burn_in_periods + self.cfg.measured_periods + 4) as f64;
        self.cfg.max_time.unwrap_or(periods * self.l / self.c_ref)
    }

    fn kept(&self) -> Vec<(f64, f64)> {
        let burn = self.cfg.burn_in_periods as f64 * self.l - 1e-9;
        self.crossings
            .iter()
            .copied()
            .filter(|(_, x)| (x - self.x_start).abs() >= burn)
            .collect()
    }

    /// Runs until enough crossings are collected or the budget is spent.
    pub fn measure(&mut self) -> Result<SpeedEstimate> {
        let budget = self.time_budget();
        let need = self.cfg.measured_periods + 1;
        self.observe();
        while self.field.t < budget && self.kept().len() < need {
            self.snapshot_step()?;
        }
        Ok(self.estimate())
    }

    fn estimate(&self) -> SpeedEstimate {
        let kept = self.kept();
        let speeds: Vec<f64> =
            kept.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        let need = self.cfg.measured_periods;
        let (c_l, spread, enough) = if speeds.len() >= need && need > 0 {
            let last = &speeds[speeds.len() - need..];
            let mean = last.iter().sum::<f64>() / need as f64;
            let lo = last.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = last.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (mean, (hi - lo) / mean.abs(), true)
        } else {
            // No clean period sequence: fall back to the drift of the 1/2
            // level over the second half of the run.
            let h = &self.history;
            let tail = &h[h.len() / 2..];
            let drift = if tail.len() >= 2 {
                let (t0, p0) = tail[0];
                let (t1, p1) = tail[tail.len() - 1];
                (p1 - p0) / (t1 - t0)
            } else {
                0.0
            };
            (drift, f64::INFINITY, false)
        };
        let converged = enough && spread <= self.cfg.spread_tol;
        SpeedEstimate {
            c_l,
            crossing_times: self.crossings.iter().map(|c| c.0).collect(),
            crossing_positions: self.crossings.iter().map(|c| c.1).collect(),
            per_period_speeds: speeds,
            converged,
            rel_spread: spread,
            stalled: !converged && c_l.abs() <= self.cfg.stall_threshold,
            boundary_deviation: self.boundary_dev,
            final_time: self.field.t,
        }
    }

    /// Continues the run for `periods` periods at speed `c_l`, storing the
    /// window `[p - half_width, p + half_width]` around the 1/2 level `p` at
    /// every snapshot.
    pub fn record(&mut self, c_l: f64, periods: f64, half_width: f64) -> Result<FrontRecord> {
        if c_l == 0.0 {
            return Err(Error::InvalidArgument("cannot record a front with zero speed".into()));
        }
        let &(t_c, x_c) = self.crossings.last().ok_or(Error::NoCrossing("no probe crossing before recording"))?;
        let h = self.field.grid.h;
        let span = periods * self.l / c_l.abs();
        let t_end = self.field.t + span;
        let k = (half_width / h).ceil() as i64;
        let mut snapshots = Vec::new();
        loop {
            let g = self.field.grid;
            if let Some(p) = self.field.level_position(0.5) {
                let ic = ((p - g.x_min) / h).round() as i64;
                let lo = (ic - k).max(0) as usize;
                let hi = ((ic + k) as usize).min(g.n - 1);
                snapshots.push(Snapshot { t: self.field.t, x0: g.x(lo), u: self.field.u[lo..=hi].to_vec() });
            }
            if self.field.t >= t_end {
                break;
            }
            self.snapshot_step()?;
        }
        Ok(FrontRecord { l: self.l, c_l, h, t_c, x_c, snapshots })
    }

    pub fn medium(&self) -> &PeriodicMedium {
        self.medium
    }
}

/// Speed of the front invading 0 from the left, starting from
/// [`front_like_initial`] data unless `init` is given.
pub fn measure_speed(medium: &PeriodicMedium, l: f64, init: Option<Field>, cfg: &FrontConfig) -> Result<SpeedEstimate> {
    let init = match init {
        Some(f) => f,
        None => front_like_initial(l, cfg)?,
    };
    FrontRun::new(medium, l, init, cfg)?.measure()
}

/// Speed of the reversed front (0 on the left, 1 on the right), positive
/// when 1 invades leftward. Runs the mirrored medium.
pub fn measure_reverse_speed(medium: &PeriodicMedium, l: f64, cfg: &FrontConfig) -> Result<SpeedEstimate> {
    let mirrored = medium.reflected();
    measure_speed(&mirrored, l, None, cfg)
}

/// Sampled `phi_L(xi, y)` on a lattice plus `zeta_L(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulsatingFront {
    pub l: f64,
    pub c_l: f64,
    pub xi0: f64,
    pub dxi: f64,
    pub n_xi: usize,
    pub n_y: usize,
    /// Row-major in `y`: `phi[j * n_xi + k] = phi_L(xi0 + k dxi, j / n_y)`.
    pub phi: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl PulsatingFront {
    pub fn xi_grid(&self) -> Vec<f64> {
        (0..self.n_xi).map(|k| self.xi0 + k as f64 * self.dxi).collect()
    }

    pub fn y_grid(&self) -> Vec<f64> {
        (0..self.n_y).map(|j| j as f64 / self.n_y as f64).collect()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.phi[j * self.n_xi..(j + 1) * self.n_xi]
    }

    pub fn xi_max(&self) -> f64 {
        self.xi0 + (self.n_xi - 1) as f64 * self.dxi
    }

    /// Row `j` at `xi`, held at its end values outside the lattice.
    fn row_eval(&self, j: usize, xi: f64) -> f64 {
        let xi = xi.clamp(self.xi0, self.xi_max());
        crate::interp::linear_uniform(self.xi0, self.dxi, self.row(j), xi)
    }

    /// Interpolation in `y` along the level-set-aligned coordinate
    /// `xi - zeta(y)`, linear in `xi` within a row. Plain bilinear
    /// interpolation smears the front once `zeta` moves by more than a few
    /// `dxi` between rows, which happens for large `L`.
    pub fn eval(&self, xi: f64, y: f64) -> Result<f64> {
        if !(xi >= self.xi0 - 1e-9 && xi <= self.xi_max() + 1e-9) {
            return Err(Error::OutOfRange { value: xi, lo: self.xi0, hi: self.xi_max() });
        }
        let s = frac(y) * self.n_y as f64;
        let j = (s.floor() as usize).min(self.n_y - 1);
        let w = s - j as f64;
        let k = (j + 1) % self.n_y;
        let rel = xi - if w == 0.0 { self.zeta[j] } else { self.zeta_at(y) };
        let a = self.row_eval(j, rel + self.zeta[j]);
        if w == 0.0 {
            return Ok(a);
        }
        let b = self.row_eval(k, rel + self.zeta[k]);
        Ok(a * (1.0 - w) + b * w)
    }

    /// `zeta_L(y)` by periodic four-point interpolation.
    pub fn zeta_at(&self, y: f64) -> f64 {
        let n = self.n_y;
        let s = frac(y) * n as f64;
        let j = (s.floor() as usize).min(n - 1);
        let w = lagrange4_weights(s - j as f64);
        (0..4).map(|k| w[k] * self.zeta[(j + n + k - 1) % n]).sum()
    }

    /// First lattice position where some row fails to decrease strictly.
    pub fn first_non_monotone(&self) -> Option<(usize, usize)> {
        (0..self.n_y).find_map(|j| {
            let r = self.row(j);
            (1..r.len()).find(|&k| !(r[k] < r[k - 1])).map(|k| (j, k))
        })
    }
}

/// Lattice choice for [`extract_pulsating_front`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub n_y: usize,
    pub dxi: f64,
    /// Requested `xi` range; clipped to what the record covers.
    pub xi_lo: f64,
    pub xi_hi: f64,
}

/// Bins every snapshot sample `(xi = x - x_c - c_L (t - t_c), y = frac(x/L), u)`
/// at lattice positions `x = x_c + L (y_j + m)` and interpolates linearly in
/// `xi`. `zeta` is found by inverting each row at 1/2, seeded by the previous
/// row, and the `xi` origin is moved so `zeta(0) = 0` exactly.
pub fn extract_pulsating_front(record: &FrontRecord, lattice: &Lattice) -> Result<PulsatingFront> {
    let l = record.l;
    let h = record.h;
    let n_y = lattice.n_y;
    let step = l / n_y as f64 / h;
    if !is_integer(step) || n_y == 0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "lattice spacing L/n_y = {} must be a multiple of h = {h}",
            l / n_y as f64
        )));
    }
    let step = step.round() as i64;
    let cells_per_period = (l / h).round() as i64;
    let xc_idx = (record.x_c / h).round() as i64;
    let mut samples: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n_y];
    for s in &record.snapshots {
        let i0 = (s.x0 / h).round() as i64;
        for (i, &u) in s.u.iter().enumerate() {
            let gi = i0 + i as i64;
            let rel = (gi - xc_idx).rem_euclid(cells_per_period);
            if rel % step != 0 {
                continue;
            }
            let j = (rel / step) as usize;
            let x = gi as f64 * h;
            let xi = x - record.x_c - record.c_l * (s.t - record.t_c);
            samples[j].push((xi, u));
        }
    }
    for row in samples.iter_mut() {
        row.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let mut lo = lattice.xi_lo;
    let mut hi = lattice.xi_hi;
    for row in &samples {
        let (Some(first), Some(last)) = (row.first(), row.last()) else {
            return Err(Error::EmptyBin { index: 0 });
        };
        lo = lo.max(first.0);
        hi = hi.min(last.0);
    }
    let dxi = lattice.dxi;
    let k_lo = (lo / dxi).ceil() as i64;
    let k_hi = (hi / dxi).floor() as i64;
    if k_hi - k_lo < 2 {
        return Err(Error::EmptyBin { index: 0 });
    }
    let n_xi = (k_hi - k_lo + 1) as usize;
    let max_gap = 4.0 * dxi.max(h);
    let mut phi = vec![0.0; n_y * n_xi];
    for (j, row) in samples.iter().enumerate() {
        let mut p = 0usize;
        for k in 0..n_xi {
            let xi = (k_lo + k as i64) as f64 * dxi;
            while p + 2 < row.len() && row[p + 1].0 < xi {
                p += 1;
            }
            let (a, b) = (row[p], row[p + 1]);
            if !(a.0 <= xi + 1e-12 && xi <= b.0 + 1e-12) || b.0 - a.0 > max_gap {
                return Err(Error::EmptyBin { index: j * n_xi + k });
            }
            let w = if b.0 > a.0 { (xi - a.0) / (b.0 - a.0) } else { 0.0 };
            phi[j * n_xi + k] = a.1 * (1.0 - w) + b.1 * w;
        }
    }
    let xi0 = k_lo as f64 * dxi;
    let mut zeta = vec![0.0; n_y];
    let mut seed = 0.0;
    for j in 0..n_y {
        let r = &phi[j * n_xi..(j + 1) * n_xi];
        let mut best: Option<f64> = None;
        for k in 0..n_xi - 1 {
            let (a, b) = (r[k] - 0.5, r[k + 1] - 0.5);
            if a == 0.0 || a * b < 0.0 {
                let z = xi0 + (k as f64 + a / (a - b)) * dxi;
                if best.map_or(true, |bz| (z - seed).abs() < (bz - seed).abs()) {
                    best = Some(z);
                }
            }
        }
        let z = best.ok_or(Error::NoCrossing("profile row never crosses 1/2"))?;
        zeta[j] = z;
        seed = z;
    }
    let shift = zeta[0];
    for z in zeta.iter_mut() {
        *z -= shift;
    }
    Ok(PulsatingFront { l, c_l: record.c_l, xi0: xi0 - shift, dxi, n_xi, n_y, phi, zeta })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthStats {
    pub delta: f64,
    pub max_time_diam: f64,
    pub max_space_diam: f64,
    pub min_dt_u: f64,
}

/// Width diagnostics over a record: the time each stored node spends in
/// `[delta, 1 - delta]`, the spatial extent of that band per snapshot and
/// the minimum forward-difference `U_t` on the band.
pub fn width_stats(record: &FrontRecord, delta: f64) -> Result<WidthStats> {
    let h = record.h;
    let lo_band = delta;
    let hi_band = 1.0 - delta;
    let in_band = |v: f64| v >= lo_band && v <= hi_band;
    let mut space: f64 = 0.0;
    let mut sampled = false;
    for s in &record.snapshots {
        let u = &s.u;
        let Some(first) = u.iter().position(|v| in_band(*v)) else { continue };
        let last = u.iter().rposition(|v| in_band(*v)).unwrap();
        sampled = true;
        let edge = |i_out: usize, i_in: usize| -> f64 {
            let (a, b) = (u[i_out], u[i_in]);
            let level = if a > hi_band { hi_band } else { lo_band };
            let w = (level - a) / (b - a);
            s.x0 + (i_out as f64 + w * (i_in as f64 - i_out as f64)) * h
        };
        let left = if first > 0 { edge(first - 1, first) } else { s.x0 };
        let right = if last + 1 < u.len() { edge(last + 1, last) } else { s.x0 + last as f64 * h };
        space = space.max(right - left);
    }
    if !sampled {
        return Err(Error::BandNotSampled { delta });
    }

    // Per-node time series on global node indices.
    struct Track {
        prev: Option<(f64, f64)>,
        enter: Option<f64>,
        exit: Option<f64>,
        seen_below: bool,
    }
    let mut tracks: BTreeMap<i64, Track> = BTreeMap::new();
    let mut min_dt = f64::INFINITY;
    let mut prev_snap: Option<&Snapshot> = None;
    for s in &record.snapshots {
        let i0 = (s.x0 / h).round() as i64;
        for (i, &v) in s.u.iter().enumerate() {
            let tr = tracks.entry(i0 + i as i64).or_insert(Track { prev: None, enter: None, exit: None, seen_below: false });
            if let Some((tp, vp)) = tr.prev {
                if tr.enter.is_none() && vp < lo_band && v >= lo_band {
                    tr.enter = Some(tp + (s.t - tp) * (lo_band - vp) / (v - vp));
                }
                if tr.enter.is_some() && tr.exit.is_none() && vp <= hi_band && v > hi_band {
                    tr.exit = Some(tp + (s.t - tp) * (hi_band - vp) / (v - vp));
                }
            }
            if v < lo_band {
                tr.seen_below = true;
            }
            tr.prev = Some((s.t, v));
        }
        if let Some(p) = prev_snap {
            let dt = s.t - p.t;
            let pi0 = (p.x0 / h).round() as i64;
            for (i, &v) in s.u.iter().enumerate() {
                let gi = i0 + i as i64;
                let pj = gi - pi0;
                if pj < 0 || pj as usize >= p.u.len() {
                    continue;
                }
                let vp = p.u[pj as usize];
                if in_band(v) && in_band(vp) {
                    min_dt = min_dt.min((v - vp) / dt);
                }
            }
        }
        prev_snap = Some(s);
    }
    let time = tracks
        .values()
        .filter(|t| t.seen_below)
        .filter_map(|t| Some(t.exit? - t.enter?))
        .fold(0.0, f64::max);
    if time == 0.0 || !min_dt.is_finite() {
        return Err(Error::BandNotSampled { delta });
    }
    Ok(WidthStats { delta, max_time_diam: time, max_space_diam: space, min_dt_u: min_dt })
}

/// `sup |phi_L(xi + zeta_L(y), y + xi/L) - psi(xi, y)|` over lattice rows
/// and `|xi| <= window`.
pub fn profile_error(front: &PulsatingFront, waves: &WaveFamily, window: f64) -> Result<f64> {
    let mut err: f64 = 0.0;
    let kmax = (window / front.dxi).floor() as i64;
    for j in 0..front.n_y {
        let y = j as f64 / front.n_y as f64;
        let z = front.zeta[j];
        for k in -kmax..=kmax {
            let xi = k as f64 * front.dxi;
            let v = front.eval(xi + z, y + xi / front.l)?;
            err = err.max((v - waves.eval(xi, y).0).abs());
        }
    }
    Ok(err)
}

/// `sup |zeta(y + x/L) - zeta(y) - L int_y^{y+x/L} (1 - c_L/c(s)) ds|` over
/// lattice rows and `x` in `[-window, window]` (step `dxi`).
pub fn zeta_residual(front: &PulsatingFront, cfun: &dyn Fn(f64) -> f64, c_l: f64, window: f64) -> f64 {
    let l = front.l;
    let kmax = (window / front.dxi).floor() as i64;
    let mut res: f64 = 0.0;
    for j in 0..front.n_y {
        let y = j as f64 / front.n_y as f64;
        let zy = front.zeta_at(y);
        for k in -kmax..=kmax {
            let x = k as f64 * front.dxi;
            let integral = adaptive_simpson(|s| 1.0 - c_l / cfun(s), y, y + x / l, 1e-12);
            res = res.max((front.zeta_at(y + x / l) - zy - l * integral).abs());
        }
    }
    res
}
