//! Modeling and optimization toolkit for LR-FHSS uplink networks.
//!
//! An LR-FHSS end-device transmits each packet as a burst of header replicas
//! followed by coded payload fragments, hopping across the physical channels
//! of a frequency grid. The gateway recovers a packet when it decodes at
//! least one header replica and enough payload fragments for the code rate in
//! use. A network server hands every device a probability distribution over
//! (header-replica count, code rate) setups, and devices draw a setup
//! independently for each transmission.
//!
//! This crate provides the three layers needed to study and tune such a
//! network:
//!
//! - [`model`]: domain types — setup catalog, allocation distribution,
//!   network scenario.
//! - [`analytic`]: closed-form packet-success, goodput and energy-efficiency
//!   model for any scenario and allocation.
//! - [`sim`]: seeded discrete-event simulator producing empirical
//!   counterparts of the analytic metrics.
//! - [`optim`]: exhaustive search over a discretized probability simplex for
//!   the allocation maximizing goodput or energy efficiency, plus the
//!   quantized two-setup variant that fits in a single downlink octet.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable the default
//! `std` feature for embedded use. All floating-point transcendentals go
//! through `libm`, so results are identical with and without `std`.
//!
//! ```
//! use lrfhss_core::analytic::evaluate;
//! use lrfhss_core::optim::{optimize, Objective};
//! use lrfhss_core::sim::simulate;
//! use lrfhss_core::{AllocationDistribution, NetworkConfig, SetupCatalog};
//!
//! let cfg = NetworkConfig::new(5_000);
//! let catalog = SetupCatalog::default();
//!
//! // Closed form for the standardized DR8 allocation.
//! let dr8 = AllocationDistribution::dr8(&catalog)?;
//! let report = evaluate(&cfg, &catalog, &dr8)?;
//! assert!(report.packet_success > 0.0 && report.packet_success <= 1.0);
//!
//! // Best allocation on the 5% simplex grid never does worse.
//! let best = optimize(&cfg, &catalog, Objective::Goodput, 20)?;
//! assert!(best.best_value >= report.goodput_bps);
//!
//! // Empirical counterpart from one seeded run.
//! let run = simulate(&cfg, &catalog, &best.best_delta, 1)?;
//! assert!(run.attempted > 0);
//! # Ok::<(), lrfhss_core::Error>(())
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analytic;
mod error;
mod math;
pub mod model;
pub mod optim;
pub mod sim;

pub use error::Error;
pub use model::{
    dbm_to_watts, AllocationDistribution, CodeRate, NetworkConfig, Setup, SetupCatalog,
    TxPowerWatts,
};
