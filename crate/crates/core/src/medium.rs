//! Spatially periodic bistable media `(a, f, b)` and their validation.
//!
//! A medium is built from closed-form pieces (a constant, a short Fourier
//! series or a periodic table for the diffusivity, and one of three reaction
//! kinds). Positions are in units of the period, so every coefficient has
//! period 1 in `x`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::interp::frac;
use crate::quad::simpson;

/// Finite-difference step for user-supplied reaction tables.
const FD_STEP: f64 = 1e-6;

/// A 1-periodic scalar coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum Periodic {
    Constant(f64),
    /// `mean + sum_k cos[k] cos(2pi(k+1)x) + sin[k] sin(2pi(k+1)x)`.
    Fourier { mean: f64, cos: Vec<f64>, sin: Vec<f64> },
    /// Samples at `j/n`, interpolated by periodic Catmull-Rom splines.
    Table(Vec<f64>),
}

impl Periodic {
    /// `mean + amp sin(2 pi x)`.
    pub fn sinusoid(mean: f64, amp: f64) -> Self {
        Periodic::Fourier { mean, cos: Vec::new(), sin: alloc::vec![amp] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Periodic::Constant(c) => *c,
            Periodic::Fourier { mean, cos, sin } => {
                let mut s = *mean;
                for (k, c) in cos.iter().enumerate() {
                    s += c * (2.0 * PI * (k + 1) as f64 * x).cos();
                }
                for (k, c) in sin.iter().enumerate() {
                    s += c * (2.0 * PI * (k + 1) as f64 * x).sin();
                }
                s
            }
            Periodic::Table(v) => catmull_periodic(v, x).0,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Periodic::Constant(_) => 0.0,
            Periodic::Fourier { cos, sin, .. } => {
                let mut s = 0.0;
                for (k, c) in cos.iter().enumerate() {
                    let w = 2.0 * PI * (k + 1) as f64;
                    s -= c * w * (w * x).sin();
                }
                for (k, c) in sin.iter().enumerate() {
                    let w = 2.0 * PI * (k + 1) as f64;
                    s += c * w * (w * x).cos();
                }
                s
            }
            Periodic::Table(v) => catmull_periodic(v, x).1,
        }
    }

    /// `x -> g(-x)`.
    pub fn reflected(&self) -> Self {
        match self {
            Periodic::Constant(c) => Periodic::Constant(*c),
            Periodic::Fourier { mean, cos, sin } => Periodic::Fourier {
                mean: *mean,
                cos: cos.clone(),
                sin: sin.iter().map(|c| -c).collect(),
            },
            Periodic::Table(v) => {
                let n = v.len();
                Periodic::Table((0..n).map(|j| v[(n - j) % n]).collect())
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Periodic::Constant(_) => true,
            Periodic::Fourier { cos, sin, .. } => cos.iter().chain(sin).all(|c| *c == 0.0),
            Periodic::Table(v) => v.iter().all(|c| *c == v[0]),
        }
    }

    fn sampled_range(&self, n: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let v = self.eval(i as f64 / n as f64);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Periodic Catmull-Rom on nodes `j/n`: value and derivative.
fn catmull_periodic(v: &[f64], x: f64) -> (f64, f64) {
    let n = v.len();
    if n == 1 {
        return (v[0], 0.0);
    }
    let s = frac(x) * n as f64;
    let i = (s.floor() as usize).min(n - 1);
    let t = s - i as f64;
    let p0 = v[(i + n - 1) % n];
    let p1 = v[i];
    let p2 = v[(i + 1) % n];
    let p3 = v[(i + 2) % n];
    catmull(p0, p1, p2, p3, t, n as f64)
}

/// Catmull-Rom segment between `p1` and `p2`; `scale` converts the local
/// parameter derivative to the physical one.
fn catmull(p0: f64, p1: f64, p2: f64, p3: f64, t: f64, scale: f64) -> (f64, f64) {
    let m1 = 0.5 * (p2 - p0);
    let m2 = 0.5 * (p3 - p1);
    crate::interp::hermite3(0.0, 1.0, p1, p2, m1, m2, t).map2(scale)
}

trait Map2 {
    fn map2(self, scale: f64) -> (f64, f64);
}

impl Map2 for (f64, f64) {
    fn map2(self, scale: f64) -> (f64, f64) {
        (self.0, self.1 * scale)
    }
}

/// Reaction terms supported by the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Reaction {
    /// `u(1-u)(u-b(x))`.
    Cubic { b: Periodic },
    /// `u(1-u)(u-base_b) + amp sin(2 pi x) w(u)` with a bump `w` supported
    /// on `[delta0p, 1-delta0p]`.
    A4 { base_b: f64, amp: f64, delta0p: f64 },
    /// Tabulated `f`, periodic in `x`.
    Table(ReactionTable),
}

/// `values[i * nu + j] = f(i / nx, j / (nu - 1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionTable {
    pub nx: usize,
    pub nu: usize,
    pub values: Vec<f64>,
}

impl ReactionTable {
    pub fn new(nx: usize, nu: usize, values: Vec<f64>) -> Result<Self> {
        if nx == 0 || nu < 4 || values.len() != nx * nu {
            return Err(Error::InvalidMedium(format!(
                "reaction table needs nx >= 1, nu >= 4 and nx*nu values (got {nx}x{nu}, {} values)",
                values.len()
            )));
        }
        Ok(Self { nx, nu, values })
    }

    fn row(&self, x: f64) -> Vec<f64> {
        let nx = self.nx;
        let nu = self.nu;
        if nx == 1 {
            return self.values.clone();
        }
        let s = frac(x) * nx as f64;
        let i = (s.floor() as usize).min(nx - 1);
        let t = s - i as f64;
        let r = |k: usize| &self.values[k * nu..(k + 1) * nu];
        let (r0, r1, r2, r3) = (r((i + nx - 1) % nx), r(i), r((i + 1) % nx), r((i + 2) % nx));
        (0..nu).map(|j| catmull(r0[j], r1[j], r2[j], r3[j], t, 1.0).0).collect()
    }
}

/// The bump used by [`Reaction::A4`]: quintic smoothstep ramps meeting at
/// `u = 1/2` (value 1), zero outside `[d, 1-d]`. Returns value and slope.
pub fn a4_bump(u: f64, d: f64) -> (f64, f64) {
    let w = 0.5 - d;
    let (s, ds) = if u <= 0.5 { ((u - d) / w, 1.0 / w) } else { ((1.0 - d - u) / w, -1.0 / w) };
    if s <= 0.0 {
        return (0.0, 0.0);
    }
    let s = s.min(1.0);
    let v = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
    let dv = 30.0 * s * s * (1.0 - s) * (1.0 - s);
    (v, dv * ds)
}

/// The reaction frozen at one position: a function of the state alone.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalReaction {
    Cubic { b: f64 },
    A4 { b: f64, s: f64, d: f64 },
    Table { row: Vec<f64> },
}

impl LocalReaction {
    /// `f(u)` for `u` in `[0, 1]`.
    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        match self {
            LocalReaction::Cubic { b } => u * (1.0 - u) * (u - b),
            LocalReaction::A4 { b, s, d } => u * (1.0 - u) * (u - b) + s * a4_bump(u, *d).0,
            LocalReaction::Table { row } => table_row_eval(row, u),
        }
    }

    /// `df/du` for `u` in `[0, 1]`.
    pub fn df(&self, u: f64) -> f64 {
        match self {
            LocalReaction::Cubic { b } => -3.0 * u * u + 2.0 * (1.0 + b) * u - b,
            LocalReaction::A4 { b, s, d } => {
                -3.0 * u * u + 2.0 * (1.0 + b) * u - b + s * a4_bump(u, *d).1
            }
            LocalReaction::Table { row } => {
                let lo = (u - FD_STEP).max(0.0);
                let hi = (u + FD_STEP).min(1.0);
                (table_row_eval(row, hi) - table_row_eval(row, lo)) / (hi - lo)
            }
        }
    }

    pub fn slope0(&self) -> f64 {
        match self {
            LocalReaction::Cubic { b } | LocalReaction::A4 { b, .. } => -b,
            LocalReaction::Table { .. } => self.df(0.0),
        }
    }

    pub fn slope1(&self) -> f64 {
        match self {
            LocalReaction::Cubic { b } | LocalReaction::A4 { b, .. } => b - 1.0,
            LocalReaction::Table { .. } => self.df(1.0),
        }
    }

    /// `f` continued linearly outside `[0, 1]` with the endpoint slopes.
    #[inline]
    pub fn f_ext(&self, u: f64) -> f64 {
        if u < 0.0 {
            self.slope0() * u
        } else if u > 1.0 {
            self.slope1() * (u - 1.0)
        } else {
            self.f(u)
        }
    }

    /// Intermediate zero: the sign change from negative to positive in (0,1).
    pub fn root(&self) -> Option<f64> {
        if let LocalReaction::Cubic { b } = self {
            return Some(*b);
        }
        let n = 512;
        let mut prev = self.f(1.0 / n as f64);
        for k in 2..n {
            let u = k as f64 / n as f64;
            let v = self.f(u);
            if prev < 0.0 && v >= 0.0 {
                let (mut lo, mut hi) = ((k - 1) as f64 / n as f64, u);
                for _ in 0..80 {
                    let m = 0.5 * (lo + hi);
                    if self.f(m) < 0.0 {
                        lo = m;
                    } else {
                        hi = m;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
            prev = v;
        }
        None
    }

    /// `sup |f'|` on `[0, 1]` sampled at `n + 1` points.
    pub fn lipschitz(&self, n: usize) -> f64 {
        (0..=n).map(|k| self.df(k as f64 / n as f64).abs()).fold(0.0, f64::max)
    }

    /// `int_0^1 f(u) du`.
    pub fn mass(&self) -> f64 {
        simpson(|u| self.f(u), 0.0, 1.0, 512)
    }
}

fn table_row_eval(row: &[f64], u: f64) -> f64 {
    let nu = row.len();
    let s = u.clamp(0.0, 1.0) * (nu - 1) as f64;
    let i = (s.floor() as usize).min(nu - 2);
    let t = s - i as f64;
    let p1 = row[i];
    let p2 = row[i + 1];
    let p0 = if i == 0 { 2.0 * p1 - p2 } else { row[i - 1] };
    let p3 = if i + 2 >= nu { 2.0 * p2 - p1 } else { row[i + 2] };
    catmull(p0, p1, p2, p3, t, 1.0).0
}

/// Outcome of [`PeriodicMedium::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub passed_a1: bool,
    pub passed_a2: bool,
    pub passed_a3: bool,
    pub passed_a4: bool,
    pub estimated_gamma0: f64,
    pub estimated_delta0: f64,
    pub mean_reaction_range: (f64, f64),
}

/// A bistable medium with period 1 in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicMedium {
    a: Periodic,
    reaction: Reaction,
    gamma0: f64,
    delta0: f64,
    delta0p: Option<f64>,
    a_is_constant: bool,
}

/// Sample counts used when a constructor estimates margins.
const NX_BUILD: usize = 128;
const NU_BUILD: usize = 512;

/// `f(u) = u(1-u)(u-b(x))` with diffusivity `a(x)`.
pub fn make_cubic_medium(a: Periodic, b: Periodic) -> Result<PeriodicMedium> {
    let (lo, hi) = b.sampled_range(1024);
    if !(lo > 0.0 && hi < 1.0) {
        return Err(Error::InvalidMedium(format!("b must stay in (0,1), sampled range [{lo}, {hi}]")));
    }
    PeriodicMedium::new(a, Reaction::Cubic { b })
}

/// Constant-diffusivity (a = 1) medium satisfying (A4) by construction.
pub fn make_a4_medium(base_b: f64, amp: f64, delta0p: f64) -> Result<PeriodicMedium> {
    make_a4_medium_with(1.0, base_b, amp, delta0p)
}

pub fn make_a4_medium_with(a: f64, base_b: f64, amp: f64, delta0p: f64) -> Result<PeriodicMedium> {
    if !(base_b > 0.0 && base_b < 1.0) {
        return Err(Error::InvalidMedium(format!("base_b = {base_b} outside (0,1)")));
    }
    if !(delta0p > 0.0 && delta0p < 0.5) {
        return Err(Error::InvalidMedium(format!("delta0p = {delta0p} outside (0,1/2)")));
    }
    let m = PeriodicMedium::new(Periodic::Constant(a), Reaction::A4 { base_b, amp, delta0p })?;
    if !m.validate(NX_BUILD, NU_BUILD).passed_a1 {
        return Err(Error::InvalidMedium(format!("amp = {amp} destroys bistability")));
    }
    Ok(m)
}

impl PeriodicMedium {
    pub fn new(a: Periodic, reaction: Reaction) -> Result<Self> {
        let (alo, _) = a.sampled_range(1024);
        if !(alo > 0.0) {
            return Err(Error::InvalidMedium(format!("diffusivity must be positive, min sample {alo}")));
        }
        let delta0p = match &reaction {
            Reaction::A4 { delta0p, .. } => Some(*delta0p),
            _ => None,
        };
        let a_is_constant = a.is_constant();
        let mut m = Self { a, reaction, gamma0: 0.0, delta0: 0.0, delta0p, a_is_constant };
        let (g, d) = m.estimate_margins(NX_BUILD, NU_BUILD);
        m.gamma0 = g;
        m.delta0 = d;
        Ok(m)
    }

    /// The mirror image `x -> -x`; margins are unchanged.
    pub fn reflected(&self) -> Self {
        let reaction = match &self.reaction {
            Reaction::Cubic { b } => Reaction::Cubic { b: b.reflected() },
            Reaction::A4 { base_b, amp, delta0p } => {
                Reaction::A4 { base_b: *base_b, amp: -amp, delta0p: *delta0p }
            }
            Reaction::Table(t) => {
                let (nx, nu) = (t.nx, t.nu);
                let mut values = Vec::with_capacity(t.values.len());
                for i in 0..nx {
                    let src = (nx - i) % nx;
                    values.extend_from_slice(&t.values[src * nu..(src + 1) * nu]);
                }
                Reaction::Table(ReactionTable { nx, nu, values })
            }
        };
        Self { a: self.a.reflected(), reaction, ..self.clone() }
    }

    /// Replace the estimated (A2) margins, e.g. with textbook values.
    pub fn with_margins(mut self, gamma0: f64, delta0: f64) -> Self {
        self.gamma0 = gamma0;
        self.delta0 = delta0;
        self
    }

    pub fn diffusivity(&self) -> &Periodic {
        &self.a
    }

    pub fn reaction(&self) -> &Reaction {
        &self.reaction
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn delta0p(&self) -> Option<f64> {
        self.delta0p
    }

    pub fn a_is_constant(&self) -> bool {
        self.a_is_constant
    }

    #[inline]
    pub fn a(&self, x: f64) -> f64 {
        self.a.eval(x)
    }

    pub fn a_prime(&self, x: f64) -> f64 {
        self.a.derivative(x)
    }

    /// The reaction frozen at position `x`.
    pub fn local(&self, x: f64) -> LocalReaction {
        match &self.reaction {
            Reaction::Cubic { b } => LocalReaction::Cubic { b: b.eval(x) },
            Reaction::A4 { base_b, amp, delta0p } => LocalReaction::A4 {
                b: *base_b,
                s: amp * (2.0 * PI * x).sin(),
                d: *delta0p,
            },
            Reaction::Table(t) => LocalReaction::Table { row: t.row(x) },
        }
    }

    pub fn f(&self, x: f64, u: f64) -> f64 {
        self.local(x).f(u)
    }

    pub fn extended_f(&self, x: f64, u: f64) -> f64 {
        self.local(x).f_ext(u)
    }

    pub fn df_du(&self, x: f64, u: f64) -> f64 {
        self.local(x).df(u)
    }

    pub fn df_dx(&self, x: f64, u: f64) -> f64 {
        match &self.reaction {
            Reaction::Cubic { b } => -u * (1.0 - u) * b.derivative(x),
            Reaction::A4 { amp, delta0p, .. } => {
                amp * 2.0 * PI * (2.0 * PI * x).cos() * a4_bump(u, *delta0p).0
            }
            Reaction::Table(_) => {
                (self.f(x + FD_STEP, u) - self.f(x - FD_STEP, u)) / (2.0 * FD_STEP)
            }
        }
    }

    /// The unstable zero `b(x)`.
    pub fn b(&self, x: f64) -> Option<f64> {
        self.local(x).root()
    }

    /// `int_0^1 f(x, u) du`.
    pub fn mean_reaction(&self, x: f64) -> f64 {
        self.local(x).mass()
    }

    /// True when neither `a` nor `f` depends on `x`.
    pub fn is_homogeneous(&self) -> bool {
        self.a_is_constant
            && match &self.reaction {
                Reaction::Cubic { b } => b.is_constant(),
                Reaction::A4 { amp, .. } => *amp == 0.0,
                Reaction::Table(t) => {
                    t.values.chunks(t.nu).all(|r| r == &t.values[..t.nu])
                }
            }
    }

    /// `sup |d_u f|` over sampled positions and states.
    pub fn lipschitz(&self) -> f64 {
        let nx = if self.is_homogeneous() { 1 } else { 64 };
        (0..nx).map(|i| self.local(i as f64 / nx as f64).lipschitz(256)).fold(0.0, f64::max)
    }

    /// `sup |d_x f|` over sampled positions and states.
    pub fn x_lipschitz(&self, nx: usize, nu: usize) -> f64 {
        let mut m = 0.0f64;
        for i in 0..nx {
            let x = i as f64 / nx as f64;
            for j in 0..=nu {
                m = m.max(self.df_dx(x, j as f64 / nu as f64).abs());
            }
        }
        m
    }

    /// Scanned infimum over `x` of `-f/u` on `(0, delta]` and `f/(1-u)` on
    /// `[1-delta, 1)`, i.e. the best (A2) rate for a given width.
    pub fn margin_at(&self, delta: f64, nx: usize, nu: usize) -> f64 {
        let locals = self.locals(nx);
        let mut g = f64::INFINITY;
        for lr in &locals {
            g = g.min(-lr.slope0()).min(-lr.slope1());
            for k in 1..=nu {
                let u = delta * k as f64 / nu as f64;
                g = g.min(-lr.f(u) / u).min(lr.f(1.0 - u) / u);
            }
        }
        g
    }

    fn locals(&self, nx: usize) -> Vec<LocalReaction> {
        let nx = if self.is_homogeneous() { 1 } else { nx };
        (0..nx).map(|i| self.local(i as f64 / nx as f64)).collect()
    }

    /// Margin rule: `delta0` is the widest `delta <= 1/4` whose scanned rate
    /// keeps at least half of the rate at `0+`; `gamma0` is 0.9 times that
    /// rate. Returns `(gamma0, delta0)`, zeros if no positive rate exists.
    pub fn estimate_margins(&self, nx: usize, nu: usize) -> (f64, f64) {
        let locals = self.locals(nx);
        let g0 = locals.iter().map(|l| (-l.slope0()).min(-l.slope1())).fold(f64::INFINITY, f64::min);
        if !(g0 > 0.0) {
            return (0.0, 0.0);
        }
        let mut running = g0;
        let mut best = (0.0, 0.0);
        for k in 1..=nu {
            let u = 0.25 * k as f64 / nu as f64;
            for lr in &locals {
                running = running.min(-lr.f(u) / u).min(lr.f(1.0 - u) / u);
            }
            if running >= 0.5 * g0 {
                best = (0.9 * running, u);
            } else {
                break;
            }
        }
        best
    }

    /// Grid check of (A1)-(A4) with `nx` positions and `nu` states.
    pub fn validate(&self, nx: usize, nu: usize) -> ValidationReport {
        let locals: Vec<(f64, LocalReaction)> =
            (0..nx).map(|i| i as f64 / nx as f64).map(|x| (x, self.local(x))).collect();
        let mut a1 = true;
        let mut a3 = true;
        let mut mlo = f64::INFINITY;
        let mut mhi = f64::NEG_INFINITY;
        for (x, lr) in &locals {
            if (self.a(*x) - self.a(x + 1.0)).abs() > 1e-12 || !(self.a(*x) > 0.0) {
                a1 = false;
            }
            let Some(b) = lr.root() else {
                a1 = false;
                a3 = false;
                continue;
            };
            if lr.f(0.0).abs() > 1e-12 || lr.f(1.0).abs() > 1e-12 || lr.f(b).abs() > 1e-9 {
                a1 = false;
            }
            for j in 1..nu {
                let u = j as f64 / nu as f64;
                if (u - b).abs() < 1e-9 {
                    continue;
                }
                let v = lr.f(u);
                if (u < b && !(v < 0.0)) || (u > b && !(v > 0.0)) {
                    a1 = false;
                }
            }
            let mass = lr.mass();
            mlo = mlo.min(mass);
            mhi = mhi.max(mass);
            if !(mass > 0.0 && lr.df(b) > 0.0) {
                a3 = false;
            }
        }
        let (g, d) = self.estimate_margins(nx, nu);
        ValidationReport {
            passed_a1: a1,
            passed_a2: g > 0.0,
            passed_a3: a3,
            passed_a4: self.check_a4(nx, nu),
            estimated_gamma0: g,
            estimated_delta0: d,
            mean_reaction_range: (mlo, mhi),
        }
    }

    fn check_a4(&self, nx: usize, nu: usize) -> bool {
        if !self.a_is_constant {
            return false;
        }
        if self.is_homogeneous() {
            return true;
        }
        let Some(d) = self.delta0p else { return false };
        let us: Vec<f64> = (0..=nu)
            .map(|j| d * j as f64 / nu as f64)
            .flat_map(|u| [u, 1.0 - u])
            .collect();
        let reference = self.local(0.0);
        (1..nx).all(|i| {
            let lr = self.local(i as f64 / nx as f64);
            us.iter().all(|&u| lr.f(u) == reference.f(u))
        })
    }

    /// Rejects media violating (A4); the offset equation and the envelope
    /// machinery need it.
    pub fn require_a4(&self) -> Result<()> {
        if self.check_a4(64, 64) {
            Ok(())
        } else {
            Err(Error::AssumptionViolated("(A4): constant diffusivity and x-independent f near 0 and 1"))
        }
    }
}
