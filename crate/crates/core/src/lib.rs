//! Minimum-color paths on color-connected planar graphs.
//!
//! The pipeline: whiten the terminals ([`instance::normalize_terminals`]),
//! solve the hitting LP by cutting planes with the minimum-weight color
//! separator as oracle ([`lp`], [`separator`]), round the fractional
//! solution through a small-diameter decomposition of the color
//! intersection graph ([`decomp`], [`round`]) and extract the paths.
//!
//! [`exact`] holds brute-force oracles for small instances and [`gen`]
//! the instance generators. The command-line front end lives in [`cli`].

pub mod cli;
pub mod config;
pub mod decomp;
pub mod error;
pub mod exact;
pub mod gen;
pub mod instance;
pub mod lp;
pub mod planar;
pub mod round;
pub mod separator;

pub use config::{Config, Mode};
pub use decomp::Strategy;
pub use error::{Error, Result};
pub use instance::{ColorSet, ColoredPlanarGraph, Instance, TerminalPair};
pub use round::Solution;
