//! Optimal execution across a lit exchange and a dark pool.
//!
//! The agent holds inventory in a dark pool where client orders arrive at
//! commission-dependent Poisson rates, and may at any time trade on the lit
//! exchange with a market order (certain fill, half-spread plus fee) or a
//! limit order (uncertain fill, earns the half-spread plus a premium).
//!
//! * [`toy`]: the discrete model with closed-form stage values.
//! * [`qvi`]: backward explicit scheme for the impulse-control problem.
//! * [`policy`]: region tables, band checks and boundary curves.
//! * [`sim`]: Monte-Carlo evaluation of a policy.

pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod policy;
pub mod qvi;
pub mod sim;
pub mod toy;

pub use config::Config;
pub use error::{Error, Result};
