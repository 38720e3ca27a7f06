//! Simulation library for a Stern-Gerlach single-particle entanglement and
//! steering experiment: the entangled spinor wavepacket, its four
//! measurement/collapse channels, a discrete two-qubit boxes model, and the
//! Alice-to-Bob steering protocol with reproducible Monte Carlo runs.

// Quadrature node tables keep their full published precision, negated
// float comparisons reject NaN inputs, and indexed loops mirror the
// matrix algebra they implement.
#![allow(clippy::excessive_precision)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod boxes;
pub mod error;
pub mod fmt;
pub mod measurement;
pub mod numerics;
pub mod protocol;
pub mod validation;
pub mod wavefunction;

pub use error::{Error, Result};
pub use measurement::{CollapsedState, Outcome, Setting};
pub use numerics::{Complex, RngStream};
pub use protocol::{RunConfig, RunRecord, Tally};
pub use wavefunction::{PhysParams, Sign, SpinorAmplitude};
