//! Oil leak source terms for a breached ship tank.
//!
//! Three families of models share one [`Scenario`] input and one
//! [`LeakTimeSeries`] output:
//!
//! - [`estimators`]: spill quantity from inventory records, slick
//!   observations or a measured outflow speed, plus reduction of any leak
//!   history to an instantaneous or constant-rate release;
//! - [`orifice`] and [`two_stage`]: Bernoulli orifice draining and the
//!   two-stage submerged discharge with wave-driven exchange;
//! - [`cfd`]: a 2D two-phase volume-of-fluid solver on a staggered grid.
//!
//! [`harness`] runs any of them on a scenario, exports the results and
//! tabulates a comparison.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cfd;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod orifice;
pub mod scenario;
pub mod series;
pub mod two_stage;

pub use error::{
    CfdError, ErrorKind, EstimateError, HarnessError, OrificeError, ScenarioError, TwoStageError,
};
pub use scenario::Scenario;
pub use series::LeakTimeSeries;
