//! WCDMA cell capacity and call admission control.
//!
//! The crate is `no_std` (it needs `alloc`) and has no IO. It covers:
//!
//! - [`coding`]: BER models for uncoded BPSK and calibrated coded curves, and
//!   the inversion from a BER target to the minimum Eb/N0.
//! - [`load`]: per-user uplink/downlink load factors and threshold capacities.
//! - [`cac`]: cell state bookkeeping and the single-threshold, partitioned and
//!   utility-shared admission policies.
//! - [`sim`]: arrival sequences, scenario runs, capacity sweeps and policy
//!   comparisons.
//!
//! ```
//! use wcdma_cac::coding::EbN0Target;
//! use wcdma_cac::load::{dl_user_load, max_users_at_threshold, BoundaryRule, LoadFactor, RadioParams, ServiceClass};
//!
//! let radio = RadioParams::new(3.84e6, 0.55, 0.9).unwrap();
//! let video = ServiceClass::new("video", 64_000.0, 1.0, 1e-5, EbN0Target::new(6.5).unwrap()).unwrap();
//! let delta = dl_user_load(&video, &radio);
//! assert!((delta.value() - 0.04839).abs() < 1e-4);
//! let n = max_users_at_threshold(&video, &radio, LoadFactor::new(0.7).unwrap(), BoundaryRule::StrictNewLoad);
//! assert_eq!(n, 14);
//! ```

#![no_std]

extern crate alloc;

pub mod cac;
pub mod coding;
mod error;
pub mod load;
pub mod sim;

pub use error::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;
