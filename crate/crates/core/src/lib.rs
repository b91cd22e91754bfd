//! Age of information in a two-way amplify-and-forward relay network.
//!
//! Two sources exchange status updates through one relay in two-slot
//! physical-layer network coding rounds over Rayleigh block fading. The
//! crate covers:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`model`] | SNRs, high-SNR success probabilities, average and weighted age |
//! | [`fading`] | Rayleigh draws and Monte Carlo success probabilities |
//! | [`optimizer`] | Peak-power-constrained allocation, convexity checks, grid oracle |
//! | [`simulator`] | Slot-level age process and renewal checks |
//! | [`experiment`] | Scenario files and the analyze / optimize / simulate / sweep / grid commands |
//!
//! ```
//! use relay_aoi::model::SystemParams;
//! use relay_aoi::optimizer::{theorem1_optimize, OptimizerOptions};
//!
//! let params = SystemParams::default();
//! let best = theorem1_optimize(&params, &OptimizerOptions::default()).unwrap();
//! assert_eq!(best.p_a_star, 1.0);
//! assert!((best.aoi_star - 3.636).abs() < 1e-3);
//! ```

pub mod error;
pub mod experiment;
pub mod fading;
pub mod model;
pub mod optimizer;
pub mod simulator;

pub use error::{Error, Result};
pub use model::{AoiSummary, Destination, PowerProfile, SuccessPair, SystemParams};
