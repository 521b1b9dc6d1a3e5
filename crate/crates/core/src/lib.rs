//! Minimum-input controls for the two-point boundary value problem of the
//! one-dimensional wave equation `u_tt = u_xx`: prescribe `u(0, ·) = f0` and
//! `u(T, ·) = fT` on a finite window and find the initial velocity with the
//! smallest L¹ or L² norm.

pub mod approx;
pub mod error;
pub mod funcmodel;
pub mod l1min;
pub mod l2min;
pub mod oracle;
pub mod problem;
pub mod verify;

pub use error::{Error, Result};
