//! Run-time assurance for a fixed-wing aircraft modelled as a 3D Dubins vehicle.
//!
//! Three safety filters share one constraint description:
//! - [`extended_rta`]: velocity-extended barrier, filters `A_T` and `Q`;
//! - [`backstepping_rta`]: backstepped barrier that also engages the roll rate;
//! - [`modelfree_rta`]: a safe velocity handed to the [`tracking_controller`].
//!
//! [`sim`] wraps them in a fixed-step closed-loop simulator driven by JSON
//! scenario files.

// `!(x >= lo)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aircraft_model;
pub mod backstepping_rta;
pub mod constraints;
pub mod dual;
pub mod error;
pub mod extended_rta;
pub mod linalg;
pub mod modelfree_rta;
pub mod safety_filter;
pub mod sim;
pub mod tracking_controller;

pub use error::{Result, RtaError};
