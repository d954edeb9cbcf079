//! Generalized spinning-switches puzzles modelled as wreath products `G wr H`.
//!
//! A puzzle is a [`WreathContext`]: switches behaving like a finite group (or
//! loop) `G`, sitting at the positions of a finite set on which a spinning
//! group `H` acts faithfully. The solver's moves are elements of the base
//! `K = G^positions`; a strategy is *surjective* when it reaches the winning
//! state against every sequence of spins.

pub mod error;
pub mod group;
pub mod action;
pub mod wreath;
pub mod strategy;
pub mod search;
pub mod synthesis;
pub mod decision;
pub mod analysis;

pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupKind, Homomorphism, PGroupStatus, Subgroup};
