//! Quiver mutation and the combinatorics of reddening sequences.
//!
//! The crate is organised bottom-up:
//!
//! * [`quiver`] holds the exchange-matrix representation, mutation, framing
//!   and graph-level queries, with [`canon`] providing isomorphism-invariant
//!   canonical forms.
//! * [`sequence`] verifies and searches maximal green and reddening
//!   sequences and explores mutation classes under [`SearchLimits`].
//! * [`structure`] covers covering pairs, triangular extensions, Banff
//!   certificates and class-P construction trees.
//! * [`synthesis`] turns those certificates into verified reddening sequences.
//! * [`laurent`] and [`seed`] implement seed mutation with principal
//!   coefficients over the tropical semifield.

pub mod canon;
pub mod error;
pub mod laurent;
pub mod quiver;
pub mod search;
pub mod seed;
pub mod sequence;
pub mod structure;
pub mod synthesis;

pub use canon::{CanonicalForm, Labeling};
pub use error::{Error, Result};
pub use quiver::{Acyclicity, Arrow, Condensation, Framing, MutationSequence, Quiver, VertexColor};
pub use search::{Answer, Closure, ExhaustReason, Exhausted, MoveRule, SearchLimits, TriState};
pub use sequence::Verdict;
