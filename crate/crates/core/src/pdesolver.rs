//! Monotone finite-difference solver for the three equation forms used in
//! the experiments:
//!
//! - original scale: `u_t = (a(x/L) u_x)_x + f(x/L, u)`,
//! - rescaled:       `v_t = (1/L)(a(x) v_x)_x + L f(x, v)`,
//! - offset:         `z_t = a z_xx + f(y + x/L, z)` (constant `a`).
//!
//! One step is backward-Euler diffusion in conservative three-point flux form
//! (a tridiagonal M-matrix solve) followed by an explicit reaction step with
//! the linearly extended `f`. Both substeps are monotone, so the scheme obeys
//! a discrete comparison principle whenever `dt` times the reaction Lipschitz
//! constant stays below 1.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::medium::{LocalReaction, PeriodicMedium};

/// Uniform grid `x_i = x_min + i h`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub h: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, h: f64, n: usize) -> Result<Self> {
        if n < 3 || !(h > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("grid needs n >= 3 and h > 0 (n={n}, h={h})")));
        }
        Ok(Self { x_min, h, n })
    }

    /// Grid covering `[x_min, x_max]` with spacing as close to `h` as the
    /// length allows (exact when `(x_max - x_min) / h` is an integer).
    pub fn spanning(x_min: f64, x_max: f64, h: f64) -> Result<Self> {
        let cells = ((x_max - x_min) / h).round().max(2.0) as usize;
        Self::new(x_min, (x_max - x_min) / cells as f64, cells + 1)
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + (self.n - 1) as f64 * self.h
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Index of the node nearest to `x`, if inside the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let s = ((x - self.x_min) / self.h).round();
        if s < 0.0 || s >= self.n as f64 {
            None
        } else {
            Some(s as usize)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid1D,
    pub t: f64,
    pub u: Vec<f64>,
}

impl Field {
    pub fn from_fn(grid: Grid1D, t: f64, f: impl Fn(f64) -> f64) -> Self {
        Self { grid, t, u: grid.points().into_iter().map(f).collect() }
    }

    /// Linear interpolation at `x`, clamped to the end values.
    pub fn value_at(&self, x: f64) -> f64 {
        crate::interp::linear_uniform(self.grid.x_min, self.grid.h, &self.u, x)
    }

    /// First position (scanning left to right) where the data crosses
    /// `level`, linearly interpolated.
    pub fn level_position(&self, level: f64) -> Option<f64> {
        let u = &self.u;
        (0..u.len() - 1).find_map(|i| {
            let (a, b) = (u[i] - level, u[i + 1] - level);
            if a == 0.0 {
                Some(self.grid.x(i))
            } else if a * b < 0.0 {
                Some(self.grid.x(i) + self.grid.h * a / (a - b))
            } else {
                None
            }
        })
    }
}

/// Dirichlet clamp values at the two ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary {
    pub left: f64,
    pub right: f64,
}

impl Boundary {
    /// Front-like data: 1 on the left, 0 on the right.
    pub const FRONT: Boundary = Boundary { left: 1.0, right: 0.0 };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub boundary: Boundary,
    pub snapshot_stride: usize,
    /// `sup |d_u f|`; computed from the medium when absent.
    pub reaction_lipschitz: Option<f64>,
}

impl SolverConfig {
    pub fn new(dt: f64) -> Self {
        Self { dt, boundary: Boundary::FRONT, snapshot_stride: 1, reaction_lipschitz: None }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride.max(1);
        self
    }
}

/// Which equation a [`Stepper`] discretizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equation {
    Original { l: f64 },
    Rescaled { l: f64 },
    Offset { y: f64, l: f64 },
}

impl Equation {
    fn diffusivity(&self, medium: &PeriodicMedium, x: f64) -> f64 {
        match *self {
            Equation::Original { l } => medium.a(x / l),
            Equation::Rescaled { l } => medium.a(x) / l,
            Equation::Offset { y, l } => medium.a(y + x / l),
        }
    }

    fn reaction_at(&self, medium: &PeriodicMedium, x: f64) -> LocalReaction {
        match *self {
            Equation::Original { l } => medium.local(x / l),
            Equation::Rescaled { .. } => medium.local(x),
            Equation::Offset { y, l } => medium.local(y + x / l),
        }
    }

    fn reaction_scale(&self) -> f64 {
        match *self {
            Equation::Rescaled { l } => l,
            _ => 1.0,
        }
    }
}

/// Precomputed single-step operator for a fixed grid, equation and `dt`.
#[derive(Debug, Clone)]
pub struct Stepper {
    dt: f64,
    boundary: Boundary,
    /// Off-diagonal entries `-dt k_{i-1/2}` and `-dt k_{i+1/2}` per node.
    lower: Vec<f64>,
    upper: Vec<f64>,
    diag: Vec<f64>,
    cprime: Vec<f64>,
    inv_denom: Vec<f64>,
    locals: Vec<LocalReaction>,
    reaction_scale: f64,
}

impl Stepper {
    pub fn new(
        medium: &PeriodicMedium,
        eq: Equation,
        grid: Grid1D,
        dt: f64,
        boundary: Boundary,
        lipschitz: Option<f64>,
    ) -> Result<Self> {
        if let Equation::Offset { .. } = eq {
            medium.require_a4()?;
        }
        let scale = eq.reaction_scale();
        let lip = lipschitz.unwrap_or_else(|| medium.lipschitz()) * scale;
        let cap = 0.9 / lip;
        if !(dt > 0.0) || dt > cap * (1.0 + 1e-12) {
            return Err(Error::TimeStep { dt, cap });
        }
        let n = grid.n;
        let h2 = grid.h * grid.h;
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut diag = vec![1.0; n];
        for i in 1..n - 1 {
            let x = grid.x(i);
            let kl = eq.diffusivity(medium, x - 0.5 * grid.h) / h2;
            let kr = eq.diffusivity(medium, x + 0.5 * grid.h) / h2;
            lower[i] = -dt * kl;
            upper[i] = -dt * kr;
            diag[i] = 1.0 + dt * (kl + kr);
        }
        let mut cprime = vec![0.0; n];
        let mut inv_denom = vec![0.0; n];
        for i in 1..n - 1 {
            let prev = if i == 1 { 0.0 } else { cprime[i - 1] };
            let lo = if i == 1 { 0.0 } else { lower[i] };
            let d = 1.0 / (diag[i] - lo * prev);
            inv_denom[i] = d;
            cprime[i] = upper[i] * d;
        }
        let locals = (0..n).map(|i| eq.reaction_at(medium, grid.x(i))).collect();
        Ok(Self { dt, boundary, lower, upper, diag, cprime, inv_denom, locals, reaction_scale: scale })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// The tridiagonal diffusion matrix rows `(lower, diag, upper)`.
    pub fn matrix(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.lower, &self.diag, &self.upper)
    }

    /// The implicit diffusion substep alone.
    pub fn diffuse(&self, u: &mut [f64], scratch: &mut Vec<f64>) {
        let n = u.len();
        u[0] = self.boundary.left;
        u[n - 1] = self.boundary.right;
        scratch.resize(n, 0.0);
        let d = scratch.as_mut_slice();
        for i in 1..n - 1 {
            let mut rhs = u[i];
            if i == 1 {
                rhs -= self.lower[i] * u[0];
            }
            if i == n - 2 {
                rhs -= self.upper[i] * u[n - 1];
            }
            let prev = if i == 1 { 0.0 } else { self.lower[i] * d[i - 1] };
            d[i] = (rhs - prev) * self.inv_denom[i];
        }
        for i in (1..n - 1).rev() {
            u[i] = if i == n - 2 { d[i] } else { d[i] - self.cprime[i] * u[i + 1] };
        }
    }

    /// Advances `u` by one step in place; returns false on a non-finite value.
    pub fn step(&self, u: &mut [f64], scratch: &mut Vec<f64>) -> bool {
        let n = u.len();
        u[0] = self.boundary.left;
        u[n - 1] = self.boundary.right;
        scratch.resize(n, 0.0);
        let d = scratch.as_mut_slice();
        // Forward sweep on the interior; boundary values move to the rhs.
        for i in 1..n - 1 {
            let mut rhs = u[i];
            if i == 1 {
                rhs -= self.lower[i] * u[0];
            }
            if i == n - 2 {
                rhs -= self.upper[i] * u[n - 1];
            }
            let prev = if i == 1 { 0.0 } else { self.lower[i] * d[i - 1] };
            d[i] = (rhs - prev) * self.inv_denom[i];
        }
        let mut next = u[n - 1];
        let mut ok = true;
        let dt = self.dt * self.reaction_scale;
        for i in (1..n - 1).rev() {
            let v = if i == n - 2 { d[i] } else { d[i] - self.cprime[i] * next };
            next = v;
            let w = v + dt * self.locals[i].f_ext(v);
            ok &= w.is_finite();
            u[i] = w;
        }
        ok
    }
}

/// Shared driver: advances `field` to `t_end`, calling `on_snapshot` on the
/// initial state, after every `snapshot_stride` steps and on the final state.
fn drive(
    medium: &PeriodicMedium,
    eq: Equation,
    mut field: Field,
    t_end: f64,
    config: &SolverConfig,
    on_snapshot: &mut dyn FnMut(&Field),
) -> Result<Field> {
    if t_end < field.t {
        return Err(Error::InvalidArgument(alloc::format!("t_end {t_end} before t {}", field.t)));
    }
    let stepper = Stepper::new(medium, eq, field.grid, config.dt, config.boundary, config.reaction_lipschitz)?;
    let span = t_end - field.t;
    let full = (span / config.dt * (1.0 + 1e-12)).floor() as usize;
    let rest = span - full as f64 * config.dt;
    let tail = if rest > 1e-12 * config.dt.max(1.0) {
        Some(Stepper::new(medium, eq, field.grid, rest, config.boundary, config.reaction_lipschitz)?)
    } else {
        None
    };
    let stride = config.snapshot_stride.max(1);
    let t0 = field.t;
    let mut scratch = Vec::with_capacity(field.u.len());
    on_snapshot(&field);
    let total = full + tail.is_some() as usize;
    for k in 1..=total {
        let s = if k > full { tail.as_ref().unwrap() } else { &stepper };
        if !s.step(&mut field.u, &mut scratch) {
            return Err(Error::NonFinite { step: k });
        }
        field.t = if k > full { t_end } else { t0 + k as f64 * config.dt };
        if k % stride == 0 || k == total {
            on_snapshot(&field);
        }
    }
    Ok(field)
}

/// Original-scale equation with period `l`.
pub fn evolve(
    medium: &PeriodicMedium,
    l: f64,
    field: Field,
    t_end: f64,
    config: &SolverConfig,
    on_snapshot: &mut dyn FnMut(&Field),
) -> Result<Field> {
    drive(medium, Equation::Original { l }, field, t_end, config, on_snapshot)
}

/// Rescaled equation; the reaction cap uses `l` times the Lipschitz constant.
pub fn evolve_rescaled(
    medium: &PeriodicMedium,
    l: f64,
    field: Field,
    t_end: f64,
    config: &SolverConfig,
    on_snapshot: &mut dyn FnMut(&Field),
) -> Result<Field> {
    drive(medium, Equation::Rescaled { l }, field, t_end, config, on_snapshot)
}

/// Offset equation with frozen diffusivity; requires (A4).
pub fn evolve_offset(
    medium: &PeriodicMedium,
    y: f64,
    l: f64,
    field: Field,
    t_end: f64,
    config: &SolverConfig,
    on_snapshot: &mut dyn FnMut(&Field),
) -> Result<Field> {
    drive(medium, Equation::Offset { y, l }, field, t_end, config, on_snapshot)
}
