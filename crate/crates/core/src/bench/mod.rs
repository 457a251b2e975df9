//! The three-task benchmark over the released graph: global hash splits,
//! leakage-controlled link prediction, executable question answering,
//! and closed-context fact checking.

pub mod kgc;
pub mod mfc;
pub mod mkqa;
pub mod split;
pub mod text;

pub use kgc::{filtered_rank, project_kgc, KgcEntry, KgcProjection, RankMetrics, Triple};
pub use mfc::{generate_mfc_claims, mfc_metrics, GoldEvidence, MfcClaim, MfcLabel, MfcPrediction};
pub use mkqa::{execute_lf, parse_lf, score_mkqa, KnowledgeGraph, LogicalForm, MkqaInstance};
pub use split::{assign_split, Split, SplitAssignment};
pub use text::{build_entity_description, mask_predicate, Description};
