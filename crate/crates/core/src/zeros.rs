//! Sign-change counting with a dead zone, sign words and the subword
//! relation, the decaying stationary solution on `[0, n]`, the five-way
//! classification of stationary solutions and zero-number monotonicity
//! reports.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::medium::PeriodicMedium;
use crate::pdesolver::{Boundary, Equation, Field, Grid1D, Stepper};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Run-length compressed signs; adjacent entries always differ.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SignWord {
    signs: Vec<Sign>,
}

impl SignWord {
    /// Compresses `signs`, dropping repeats.
    pub fn new(signs: impl IntoIterator<Item = Sign>) -> Self {
        let mut out: Vec<Sign> = Vec::new();
        for s in signs {
            if out.last() != Some(&s) {
                out.push(s);
            }
        }
        Self { signs: out }
    }

    /// Parses words like `"+-+"`; the empty string is the empty word.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(Error::InvalidArgument(alloc::format!("bad sign character {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// Number of sign changes; `-1` for the empty word.
    pub fn z(&self) -> i64 {
        self.signs.len() as i64 - 1
    }

    pub fn to_word_string(&self) -> String {
        self.signs.iter().map(|s| s.as_char()).collect()
    }
}

impl fmt::Display for SignWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// Signs of `values` outside the dead zone `|v| <= band`.
pub fn sign_word(values: &[f64], band: f64) -> SignWord {
    SignWord::new(values.iter().filter(|v| v.abs() > band).map(|v| if *v > 0.0 { Sign::Plus } else { Sign::Minus }))
}

/// True when `b` embeds order-preservingly in `a`.
pub fn is_subword(b: &SignWord, a: &SignWord) -> bool {
    let mut it = a.signs.iter();
    b.signs.iter().all(|s| it.any(|t| t == s))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution {
    pub l: f64,
    pub delta: f64,
    pub grid: Grid1D,
    pub w: Vec<f64>,
    pub mu: f64,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl StationarySolution {
    pub fn x_grid(&self) -> Vec<f64> {
        self.grid.points()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryOptions {
    pub h: f64,
    /// Pseudo-time step; capped by the reaction Lipschitz bound.
    pub dt: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self { h: 0.05, dt: 0.5, tol: 1e-10, max_iter: 200_000 }
    }
}

/// Largest `mu` with `a(x/L) mu^2 - a'(x/L) mu / L - gamma0 <= 0` at every
/// grid point.
pub fn decay_rate(medium: &PeriodicMedium, l: f64, grid: &Grid1D) -> f64 {
    let g0 = medium.gamma0();
    (0..grid.n)
        .map(|i| {
            let y = grid.x(i) / l;
            let a = medium.a(y);
            let b = medium.a_prime(y) / l;
            (b + (b * b + 4.0 * a * g0).sqrt()) / (2.0 * a)
        })
        .fold(f64::INFINITY, f64::min)
}

fn residual(medium: &PeriodicMedium, l: f64, grid: &Grid1D, w: &[f64]) -> f64 {
    let h = grid.h;
    let mut r: f64 = 0.0;
    for i in 1..w.len() - 1 {
        let x = grid.x(i);
        let kl = medium.a((x - 0.5 * h) / l);
        let kr = medium.a((x + 0.5 * h) / l);
        let lap = (kr * (w[i + 1] - w[i]) - kl * (w[i] - w[i - 1])) / (h * h);
        r = r.max((lap + medium.extended_f(x / l, w[i])).abs());
    }
    r
}

/// Decaying solution of the stationary problem on `[0, n]` with `w(0) =
/// delta`, `w(n) = 0`, by pseudo-time marching down from the super-solution
/// `delta`.
pub fn solve_stationary(
    medium: &PeriodicMedium,
    l: f64,
    delta: f64,
    n: f64,
    opts: &StationaryOptions,
) -> Result<StationarySolution> {
    if !(delta > 0.0) || delta > medium.delta0() * (1.0 + 1e-12) {
        return Err(Error::OutOfRange { value: delta, lo: 0.0, hi: medium.delta0() });
    }
    let grid = Grid1D::spanning(0.0, n, opts.h)?;
    let mu = decay_rate(medium, l, &grid);
    if n * mu < 10.0 {
        return Err(Error::InvalidArgument(alloc::format!("half-length {n} shorter than ten decay lengths")));
    }
    let lip = medium.lipschitz();
    let dt = opts.dt.min(0.9 / lip);
    let stepper = Stepper::new(medium, Equation::Original { l }, grid, dt, Boundary { left: delta, right: 0.0 }, None)?;
    let mut w = vec![delta; grid.n];
    w[grid.n - 1] = 0.0;
    let mut prev = w.clone();
    let mut scratch = Vec::new();
    for it in 1..=opts.max_iter {
        if !stepper.step(&mut w, &mut scratch) {
            return Err(Error::NonFinite { step: it });
        }
        let mut change: f64 = 0.0;
        for (a, b) in w.iter().zip(&prev) {
            if *a > *b + 1e-14 {
                return Err(Error::NonMonotoneIterate { iteration: it });
            }
            change = change.max(b - a);
        }
        prev.copy_from_slice(&w);
        if change / dt < opts.tol {
            // A fixed point of the split step is off by dt f; its diffused
            // state solves the discrete stationary equation.
            stepper.diffuse(&mut w, &mut scratch);
            let res = residual(medium, l, &grid, &w);
            // Distance to the fixed point is at most the last rate over gamma0.
            let slack = opts.tol / medium.gamma0();
            for (i, v) in w.iter().enumerate() {
                let x = grid.x(i);
                if *v > delta * (-mu * x).exp() * (1.0 + 1e-9) + slack {
                    return Err(Error::AssumptionViolated("decay certificate fails on the grid"));
                }
            }
            return Ok(StationarySolution { l, delta, grid, w, mu, residual_norm: res, iterations: it });
        }
    }
    Err(Error::NotConverged { what: "stationary pseudo-time march", iterations: opts.max_iter })
}

/// Types of stationary solutions by their crossings of 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StationaryType {
    A,
    B,
    C,
    D,
    E,
}

impl StationaryType {
    pub fn tag(self) -> char {
        match self {
            StationaryType::A => 'a',
            StationaryType::B => 'b',
            StationaryType::C => 'c',
            StationaryType::D => 'd',
            StationaryType::E => 'e',
        }
    }
}

/// Dead zone used by [`classify_stationary`].
pub const DEFAULT_BAND: f64 = 1e-9;

pub fn classify_stationary(w: &[f64]) -> Result<StationaryType> {
    classify_with_band(w, DEFAULT_BAND)
}

pub fn classify_with_band(w: &[f64], band: f64) -> Result<StationaryType> {
    let shifted: Vec<f64> = w.iter().map(|v| v - 1.0).collect();
    let above = sign_word(&shifted, band);
    let word = sign_word(w, band);
    let below_one = above.signs() == [Sign::Minus];
    use Sign::{Minus as M, Plus as P};
    match (above.z(), word.z()) {
        (1, 1) => Ok(StationaryType::A),
        (0, 0) if below_one && word.signs() == [P] => Ok(StationaryType::B),
        (0, 1) if below_one && word.signs() == [M, P] => Ok(StationaryType::C),
        (0, 1) if below_one && word.signs() == [P, M] => Ok(StationaryType::D),
        (0, 2) if below_one && word.signs() == [M, P, M] => Ok(StationaryType::E),
        _ => Err(Error::Unclassified),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroEntry {
    pub t: f64,
    pub z: i64,
    pub word: SignWord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroReport {
    pub entries: Vec<ZeroEntry>,
    pub z_non_increasing: bool,
    /// Every later word is a subword of every earlier one.
    pub subword_chain: bool,
}

impl ZeroReport {
    pub fn holds(&self) -> bool {
        self.z_non_increasing && self.subword_chain
    }

    pub fn last(&self) -> Option<&ZeroEntry> {
        self.entries.last()
    }
}

/// Words of `u(t) - w` per checkpoint. `w` is sampled on the run's grid.
pub fn zero_monotonicity_report(snapshots: &[Field], w: &[f64], band: f64) -> ZeroReport {
    let entries: Vec<ZeroEntry> = snapshots
        .iter()
        .map(|f| {
            let d: Vec<f64> = f.u.iter().zip(w).map(|(a, b)| a - b).collect();
            let word = sign_word(&d, band);
            ZeroEntry { t: f.t, z: word.z(), word }
        })
        .collect();
    let z_non_increasing = entries.windows(2).all(|p| p[1].z <= p[0].z);
    let subword_chain =
        (0..entries.len()).all(|i| (i + 1..entries.len()).all(|j| is_subword(&entries[j].word, &entries[i].word)));
    ZeroReport { entries, z_non_increasing, subword_chain }
}

/// Dead-zone band for a run on `(h, dt)`: ten times the sup difference at
/// `t = 10` between the exact homogeneous front evolved on `(h, dt)` and on
/// the halved grid.
pub fn calibrated_band(h: f64, dt: f64) -> Result<f64> {
    use crate::medium::{make_cubic_medium, Periodic};
    use crate::pdesolver::{evolve, SolverConfig};
    let medium = make_cubic_medium(Periodic::Constant(1.0), Periodic::Constant(0.25))?;
    let s = 2f64.sqrt();
    let run = |h: f64, dt: f64| -> Result<Field> {
        let grid = Grid1D::spanning(-20.0, 40.0, h)?;
        let init = Field::from_fn(grid, 0.0, |x| 1.0 / (1.0 + (x / s).exp()));
        evolve(&medium, 1.0, init, 10.0, &SolverConfig::new(dt), &mut |_| {})
    };
    let coarse = run(h, dt)?;
    let fine = run(0.5 * h, 0.5 * dt)?;
    let diff = coarse.u.iter().enumerate().map(|(i, v)| (v - fine.u[2 * i]).abs()).fold(0.0, f64::max);
    Ok(10.0 * diff)
}
