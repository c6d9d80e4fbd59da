//! Infrastructure-to-vehicle message latency over a 5G backhaul and a
//! traffic-light VLC downlink.
//!
//! - [`stats`]: t-location-scale and companion families, MLE fitting, BIC
//!   model selection, CDF error and histogram estimates.
//! - [`phy`]: framing, Manchester/OOK line coding and airtime.
//! - [`channel`]: Lambertian LOS gain, SNR, BER/PER and range.
//! - [`pipeline`]: segment latency models chained end to end.
//! - [`sim`]: discrete-event simulation of lights, vehicles and sources.
//! - [`scenario`] and [`io`]: scenario files, traces and reports.

pub mod channel;
pub mod error;
pub mod io;
pub mod phy;
pub mod pipeline;
pub mod scenario;
pub mod sim;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
