//! Limited Voting: elections where each voter may vote for at most `l` of
//! the `k` seats, compared against approval-based committee rules.
//!
//! The crate covers the election model, voting rules with complete tie
//! sets, representation metrics and closed forms on party-list profiles,
//! proportionality axioms, synthetic profile generators, the strategic game
//! parties play under Limited Voting, a brute-force oracle for small
//! instances and a sweep harness.

pub mod error;
pub mod election;
pub mod numeric;
pub mod par;
pub mod profile;
pub mod rules;
pub mod metrics;
pub mod axioms;
pub mod generate;
pub mod games;
pub mod oracle;
pub mod harness;
pub mod fixtures;

pub use error::{Error, Result};
