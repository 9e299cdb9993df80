//! Embedding bounded operators into strongly continuous semigroups.
//!
//! An operator `T` is *embeddable* when some C₀-semigroup satisfies
//! `T(1) = T`. This crate classifies structured operators (dense matrices
//! and symbolic infinite-dimensional families such as block shifts, the
//! Volterra operator and multiplication operators), constructs explicit
//! embedding semigroups where they exist, and verifies the constructions
//! numerically.
//!
//! - [`opcore`]: representations, rank/kernel analysis, spectra.
//! - [`funcalc`]: contour-integral functional calculus (logarithms,
//!   fractional powers, Riesz projections), matrix exponential, sectoriality.
//! - [`wold`]: Wold decomposition of truncated isometries.
//! - [`embed`]: the classifier and the semigroup constructors.
//! - [`verify`]: semigroup-law, endpoint and continuity checks.
//! - [`corpus`]: the built-in demo operators and their expected verdicts.
//! - [`specfile`] and [`cli`]: the operator spec file and the command line.

pub mod cli;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod funcalc;
pub mod opcore;
pub mod samples;
pub mod specfile;
pub mod verify;
pub mod wold;

pub use error::{Error, Result};
