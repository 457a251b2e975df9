//! Deterministic corpus diagnostics recomputed from released shards and
//! logs alone.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use factforge_core::canon::{self, Value};
use factforge_core::diag::{DiagnosticsReport, FunnelRecord};

use crate::release_io;

/// Compute the diagnostics report from a build directory.
pub fn stats(build_dir: &Path) -> Result<DiagnosticsReport> {
    let senses = release_io::read_family(build_dir, "structural", "factsenses")?;
    let mut sense_counts: BTreeMap<String, u64> = BTreeMap::new();
    for record in &senses {
        if let Some(lang) = record.get("language").and_then(Value::as_str) {
            *sense_counts.entry(lang.to_string()).or_insert(0) += 1;
        }
    }

    let synsets = release_io::read_family(build_dir, "structural", "synsets")?;
    let synset_sizes: Vec<u64> = synsets
        .iter()
        .map(|record| {
            record.get("members").and_then(Value::as_arr).map(|m| m.len() as u64).unwrap_or(0)
        })
        .collect();

    let ungrounded = release_io::read_family(build_dir, "structural", "ungrounded")?;
    let mut reasons: BTreeMap<String, u64> = BTreeMap::new();
    for record in &ungrounded {
        if let Some(code) = record.get("code").and_then(Value::as_str) {
            *reasons.entry(code.to_string()).or_insert(0) += 1;
        }
    }

    let funnel_path = build_dir.join("logs").join("funnel.jsonl");
    let funnel_text = std::fs::read_to_string(&funnel_path)
        .with_context(|| format!("reading {}", funnel_path.display()))?;
    let mut funnel = Vec::new();
    for line in funnel_text.lines().filter(|l| !l.is_empty()) {
        let value = canon::parse(line).map_err(|e| anyhow::anyhow!("funnel line: {}", e))?;
        if let Some(record) = FunnelRecord::from_canon(&value) {
            funnel.push(record);
        }
    }

    DiagnosticsReport::compute(sense_counts, &funnel, &synset_sizes, reasons)
        .map_err(|e| anyhow::anyhow!("{}", e))
}
