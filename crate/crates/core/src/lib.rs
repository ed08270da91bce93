//! Decides whether a homogeneous space `G/H` of a real reductive group is
//! unimodular and of reductive type, and produces checkable volume-growth
//! certificates for it.
//!
//! The algebraic layers ([`exact`], [`lie`], [`reductivity`], [`grading`],
//! [`witness`]) work over Q and never round. The [`volume`] layer estimates
//! `vol(B z)` by Monte Carlo on a few concrete models of `SL(2,R)` spaces.

pub mod catalog;
pub mod error;
pub mod exact;
pub mod grading;
pub mod io;
pub mod lie;
pub mod reductivity;
pub mod selfcheck;
pub mod volume;
pub mod witness;

pub use error::{Error, Result};
