//! Release-side primitives: stateless shard assignment and the pointer
//! re-localization check. The shard writer and manifest assembly live in
//! the std companion crate; everything here is pure.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::grounding::EvidencePointer;
use crate::model::RawPage;
use crate::pack::LanguagePack;
use crate::views::{build_page_views, cp_len, cp_slice, norm_id};

/// Default seed for the shard hash; recorded per plan in the manifest.
pub const DEFAULT_SHARD_SEED: u64 = 0x0066_2e31_00c0_ffee;

/// Deterministic shard layout for one record family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardPlan {
    pub family: String,
    pub shard_count: u32,
    pub seed: u64,
}

impl ShardPlan {
    pub fn new(family: &str, shard_count: u32) -> Self {
        ShardPlan { family: family.to_string(), shard_count: shard_count.max(1), seed: DEFAULT_SHARD_SEED }
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x100_0000_01b3;

/// Seeded 64-bit FNV-1a over the record id.
pub fn fnv1a64(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET ^ seed;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// `shard(r) = H(id(r)) mod N`; stateless and order-independent.
pub fn assign_shard(record_id: &str, plan: &ShardPlan) -> u32 {
    (fnv1a64(plan.seed, record_id.as_bytes()) % plan.shard_count as u64) as u32
}

/// Outcome classes of pointer re-localization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RelocalizationClass {
    /// Regenerated string bitwise identical and span equal.
    Exact,
    /// Semantically identical but differing in whitespace or invisible
    /// control characters.
    Drift,
    /// The unit cannot be located under the pinned configuration.
    Fail,
}

impl RelocalizationClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RelocalizationClass::Exact => "Exact",
            RelocalizationClass::Drift => "Drift",
            RelocalizationClass::Fail => "Fail",
        }
    }
}

/// Classified re-localization outcome with a human-readable detail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelocalizationOutcome {
    pub class: RelocalizationClass,
    pub detail: String,
}

fn drift_normalize(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace() && !c.is_control()).collect()
}

/// Re-locate a pointer against a page from the dumps: rebuild the view,
/// select the unit by locator, slice the span, and classify against the
/// recorded span text. Failures are classified outcomes, never errors.
pub fn relocate_pointer(
    pointer: &EvidencePointer,
    page: &RawPage,
    pack: &LanguagePack,
    infobox_allowlist: &BTreeSet<String>,
    expected_span: &str,
) -> (RelocalizationOutcome, Option<String>) {
    if pointer.revision_id != page.revision_id {
        return (
            RelocalizationOutcome {
                class: RelocalizationClass::Fail,
                detail: alloc::format!(
                    "revision mismatch: pointer {} vs dump {}",
                    pointer.revision_id, page.revision_id
                ),
            },
            None,
        );
    }
    if pointer.norm_id != norm_id(pack, pointer.view) {
        return (
            RelocalizationOutcome {
                class: RelocalizationClass::Fail,
                detail: "normalization configuration mismatch".to_string(),
            },
            None,
        );
    }
    let views = match build_page_views(&page.wikitext, pack, infobox_allowlist) {
        Ok(v) => v,
        Err(e) => {
            return (
                RelocalizationOutcome {
                    class: RelocalizationClass::Fail,
                    detail: alloc::format!("view rebuild failed: {}", e),
                },
                None,
            )
        }
    };
    let Some(unit_text) = views.unit_text(&pointer.locator) else {
        return (
            RelocalizationOutcome {
                class: RelocalizationClass::Fail,
                detail: "unit not locatable".to_string(),
            },
            None,
        );
    };
    let len = cp_len(unit_text);
    if pointer.start > pointer.end || pointer.end > len {
        return (
            RelocalizationOutcome {
                class: RelocalizationClass::Fail,
                detail: alloc::format!("span [{}, {}) outside unit of length {}", pointer.start, pointer.end, len),
            },
            None,
        );
    }
    let regenerated = cp_slice(unit_text, pointer.start, pointer.end);
    if regenerated == expected_span {
        (
            RelocalizationOutcome { class: RelocalizationClass::Exact, detail: String::new() },
            Some(regenerated),
        )
    } else if drift_normalize(&regenerated) == drift_normalize(expected_span) {
        (
            RelocalizationOutcome {
                class: RelocalizationClass::Drift,
                detail: "whitespace or control-character drift".to_string(),
            },
            Some(regenerated),
        )
    } else {
        (
            RelocalizationOutcome {
                class: RelocalizationClass::Fail,
                detail: "span text mismatch".to_string(),
            },
            Some(regenerated),
        )
    }
}

/// Spread statistics for shard assignment tests.
pub fn shard_loads(ids: &[String], plan: &ShardPlan) -> Vec<u64> {
    let mut loads = alloc::vec![0u64; plan.shard_count as usize];
    for id in ids {
        loads[assign_shard(id, plan) as usize] += 1;
    }
    loads
}
