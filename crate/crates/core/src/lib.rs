//! Threshold secret sharing over GF(2^l) with exact leakage analysis.
//!
//! The crate provides field arithmetic, Shamir and additive sharing, per-bit
//! expansion of the recovery equation, entropy tools, leakage channels, an
//! exhaustive mutual-information oracle, and closed-form leakage bounds.

pub mod bitexpand;
pub mod bounds;
pub mod channels;
pub mod cli;
pub mod config;
pub mod error;
pub mod field;
pub mod infotheory;
pub mod oracle;
pub mod plot;
pub mod scheme;
pub mod sweep;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use scheme::{LinearScheme, ShamirParams, ShareMap};
