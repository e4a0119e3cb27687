//! Mean-field model of a gain/loss-balanced pair of coupled optical
//! microresonators, one of which carries a mechanical mode.
//!
//! The crate is `no_std` (with `alloc`). File formats, sweeps and the
//! command-line front end live in the `ptphonon` crate.

#![no_std]
// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod linear_response;
pub mod math;
pub mod model;
pub mod poly;
pub mod steady_state;
pub mod supermodes;
pub mod units;

pub use error::ModelError;
pub use model::{derive_rates, DerivedRates, InputCoupling, OpticalConvention, SystemParams};
pub use steady_state::{Branch, PolynomialForm, SteadyState};
pub use supermodes::{Regime, SupermodePopulations, SupermodeSpectrum};
