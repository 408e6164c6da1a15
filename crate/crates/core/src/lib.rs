//! Exact construction and verification of complementary measure pairs.
//!
//! A ladder `N₁, N₂, …` of integers `≥ 2` splits normalized Lebesgue measure on
//! `[0,1]` into an infinite convolution of uniform discrete factors. Grouping
//! the odd- and even-indexed factors gives two measures `μ`, `ν` with
//! `μ ∗ ν = L_[0,1]`. This crate builds those factors exactly, produces
//! spectra for them, checks orthogonality, completeness and tiling of the
//! integers, factors tiling pairs back into ladders, and extracts translates
//! from grid-resolved tilings.
//!
//! Exact data (measures, spectra, sets) uses rational and integer arithmetic
//! only; floating point is confined to [`fourier`] and the numeric checks
//! built on it, where every truncated quantity comes with an explicit bound.

pub mod error;
pub mod factorizer;
pub mod fourier;
pub mod ladder;
pub mod measures;
pub mod rational;
pub mod spectra;
pub mod tiling;

pub use error::{Error, Result};
pub use ladder::{Decomposition, FactorSpec, Ladder, Side};
pub use measures::DiscreteMeasure;
pub use rational::Rational;
