//! Core model for a deterministic, provenance-preserving fact graph.
//!
//! Everything in this crate is a pure function over immutable values: given
//! the same inputs and configuration it produces the same bytes, on any
//! platform. IO, file formats and the CLI live in the companion `factforge`
//! crate; this crate is `no_std` (with `alloc`) so the algorithmic core can
//! be embedded anywhere.
//!
//! The main layers, bottom up:
//!
//! * [`canon`] / [`decimal`] - canonical JSON with exact decimals, the byte
//!   form every identifier and output record is defined over.
//! * [`ids`] - domain-separated content-addressed identifiers.
//! * [`model`] - statements, manifests and the shared domain types.
//! * [`policy`] - the versioned normalization policy, aggregation keys and
//!   merge reasons.
//! * [`pack`] / [`views`] - language packs and the three provenance-stable
//!   text views (sentences, infobox fields, table cells).
//! * [`grounding`] - statement-to-evidence alignment with re-locatable
//!   pointers and deterministic confidence scores.
//! * [`synsets`] / [`relations`] - equivalence classes and rule-derived
//!   typed edges.
//! * [`release`] - shard assignment and pointer re-localization.
//! * [`bench`] - split hashing, KGC projection and filtered ranking, the
//!   logical-form grammar and executor, claim generation and metrics.
//! * [`diag`] - concentration metrics and the grounding funnel.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bench;
pub mod canon;
pub mod decimal;
pub mod diag;
pub mod grounding;
pub mod ids;
pub mod model;
pub mod pack;
pub mod policy;
pub mod release;
pub mod relations;
pub mod rng;
pub mod statements;
pub mod synsets;
pub mod views;

pub use canon::Value;
pub use decimal::Decimal;
