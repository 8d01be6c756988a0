//! Numerical core for bistable fronts in slowly oscillating periodic media.
//!
//! Everything here is `no_std` with `alloc`: media and their validation,
//! frozen-coefficient traveling waves, a monotone finite-difference solver,
//! pulsating-front diagnostics, sub/super-solution envelopes and zero-number
//! bookkeeping. File formats, configuration and the command line live in the
//! `pulsefront` crate.
#![no_std]

extern crate alloc;

pub mod envelopes;
pub mod error;
pub mod fronts;
pub mod homowave;
pub mod interp;
pub mod medium;
pub mod ode;
pub mod pdesolver;
pub mod quad;
pub mod zeros;

pub use error::{Error, Result};
pub use medium::{Periodic, PeriodicMedium, Reaction, ValidationReport};
