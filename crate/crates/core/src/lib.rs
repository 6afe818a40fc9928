//! Uncoordinated avoidance of terrestrial/LEO-satellite interference by
//! proactive PRB blanking.
//!
//! Base-station sectors own Voronoi cells on a local plane. Satellites fly
//! known ground tracks; each slot, a sector whose cell will touch a
//! satellite footprint in the next slot blanks the PRBs that the satellite's
//! Doppler-corrected carrier lands on. The crate simulates this policy next
//! to an equal-power-allocation baseline and measures collisions and sum
//! rate.
//!
//! ```
//! use coexist::spectrum::{BandPlan, Direction, PrbIndex};
//!
//! let plan = BandPlan::c_band_default();
//! let f = plan.prb_start_frequency(PrbIndex::new(50, Direction::Downlink)).unwrap();
//! assert_eq!(f, 3.7e9 + 9e6 / 50.0 * 49.0);
//! ```

// `!(x > 0.0)` is deliberate: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod metrics;
pub mod orbit;
pub mod radio;
pub mod results;
pub mod rng;
pub mod scenario;
pub mod spectrum;

pub use error::{Error, Result};

/// Keeps the guide's snippets compiling.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/orbit.md")]
    mod orbit {}
    #[doc = include_str!("../../../book/src/radio.md")]
    mod radio {}
    #[doc = include_str!("../../../book/src/engine.md")]
    mod engine {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/scenario.md")]
    mod scenario {}
}
