//! Differentiable, learnable process-based hydrologic modeling.
//!
//! The crate couples a time-discrete HBV water-balance backbone with neural
//! networks trained end-to-end against streamflow: an LSTM maps basin
//! attributes and meteorological forcings to (optionally time-varying) HBV
//! parameters, a small MLP can replace the effective-rainfall relation, and
//! a gamma-density unit hydrograph routes runoff to the gauge. Everything is
//! differentiated by the crate's own reverse-mode tape, so network weights
//! receive gradients through the full simulation.
//!
//! Modules:
//! - [`autodiff`]: tape-based reverse-mode differentiation over scalars and
//!   dense matrices, plus a finite-difference gradient checker.
//! - [`neural`]: linear, MLP, and LSTM layers built on the tape; the
//!   parameterization network, the effective-rainfall network, and a purely
//!   data-driven LSTM streamflow baseline.
//! - [`hbv`]: the water-balance model (snow, soil, two subsurface zones)
//!   with the learnable variants.
//! - [`routing`]: differentiable gamma unit-hydrograph convolution.
//! - [`data`]: dataset ingestion, Hargreaves potential ET, unit conversion,
//!   normalization, and a seeded synthetic dataset generator.
//! - [`training`]: minibatch sampling, the composite RMSE loss, optimizers,
//!   checkpointing, and the end-to-end training loop.
//! - [`evaluation`]: NSE and related metrics, baseflow index, 8-day ET
//!   composites, and report writers.

pub mod autodiff;
pub mod data;
pub mod evaluation;
pub mod hbv;
pub mod neural;
pub mod routing;
pub mod training;

pub(crate) mod rng;

pub use autodiff::{Mat, Tape, Value, Var};
pub use data::Dataset;
pub use hbv::{
    DynamicParams, Fluxes, HbvState, ModelVariant, ParamRanges, SimulationOutput, StaticParams,
};
pub use training::{Checkpoint, TrainingConfig};

