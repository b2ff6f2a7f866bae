//! Leakage-robust Bayesian persuasion with exact rational arithmetic.
//!
//! A sender commits to a signaling scheme `(mu0, mu1)` over joint signal
//! profiles; each receiver adopts when the `w0` mass of what it observes is at
//! most `theta_i` times the `w1` mass. Leaked signals between receivers change
//! those observations.

pub mod appendix_c;
pub mod construct;
pub mod downstream;
pub mod error;
pub mod lab;
pub mod lp;
pub mod model;
pub mod par;
pub mod persuasive;
pub mod rational;
pub mod report;
pub mod response;

pub use error::{Error, ErrorKind, Result};
pub use model::*;
pub use rational::{q, Rational};
pub use response::BestResponseMode;
