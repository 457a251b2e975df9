//! Sharded release writer: canonical JSONL shards sorted by id, per-shard
//! checksums, the dual structural/evidence packaging, and the final
//! manifest file. Byte-for-byte reconstructible given the same inputs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use factforge_core::canon::{canon_serialize, canon_string, Value};
use factforge_core::grounding::{sense_to_canon, FactSense, UngroundedReason};
use factforge_core::ids::sha256_hex;
use factforge_core::model::{BuildManifest, FactStatement};
use factforge_core::relations::RelationEdge;
use factforge_core::release::{assign_shard, ShardPlan};
use factforge_core::synsets::FactSynset;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReleaseError {
    #[error("shard write failed for {path}: {source}")]
    ShardWrite { path: PathBuf, source: std::io::Error },
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Checksummed shard entry for the manifest.
#[derive(Clone, Debug)]
pub struct ShardInfo {
    pub path: String,
    pub sha256: String,
    pub records: u64,
}

/// One written family.
#[derive(Clone, Debug)]
pub struct FamilyManifest {
    pub name: String,
    pub pack: String,
    pub shard_count: u32,
    pub shards: Vec<ShardInfo>,
}

impl FamilyManifest {
    fn to_canon(&self) -> Value {
        let shards: Vec<Value> = self
            .shards
            .iter()
            .map(|s| {
                Value::map([
                    ("path", Value::str(s.path.clone())),
                    ("sha256", Value::str(s.sha256.clone())),
                    ("records", Value::int(s.records as i64)),
                ])
            })
            .collect();
        Value::map([
            ("name", Value::str(self.name.clone())),
            ("pack", Value::str(self.pack.clone())),
            ("shard_count", Value::int(self.shard_count as i64)),
            ("shards", Value::Arr(shards)),
        ])
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ReleaseError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| ReleaseError::Io { path: parent.to_path_buf(), source: e })?;
    }
    let mut file = fs::File::create(path)
        .map_err(|e| ReleaseError::ShardWrite { path: path.to_path_buf(), source: e })?;
    file.write_all(bytes)
        .map_err(|e| ReleaseError::ShardWrite { path: path.to_path_buf(), source: e })?;
    Ok(())
}

/// Write one record family into `pack/family/shard-{i:05}.jsonl` under
/// the output root: records routed by the stateless shard hash, each
/// shard sorted by primary id, one canonical JSON record per LF line.
pub fn write_family(
    out_root: &Path,
    pack: &str,
    plan: &ShardPlan,
    records: Vec<(String, Value)>,
) -> Result<FamilyManifest, ReleaseError> {
    let mut by_shard: Vec<Vec<(String, Value)>> =
        (0..plan.shard_count).map(|_| Vec::new()).collect();
    for (id, value) in records {
        let shard = assign_shard(&id, plan) as usize;
        by_shard[shard].push((id, value));
    }
    let mut shards = Vec::with_capacity(by_shard.len());
    for (i, mut shard_records) in by_shard.into_iter().enumerate() {
        shard_records.sort_by(|a, b| a.0.cmp(&b.0));
        let mut bytes = Vec::new();
        for (_, value) in &shard_records {
            bytes.extend_from_slice(&canon_serialize(value));
            bytes.push(b'\n');
        }
        let rel = format!("{}/{}/shard-{:05}.jsonl", pack, plan.family, i);
        write_atomic(&out_root.join(&rel), &bytes)?;
        shards.push(ShardInfo { path: rel, sha256: sha256_hex(&bytes), records: shard_records.len() as u64 });
    }
    Ok(FamilyManifest {
        name: plan.family.clone(),
        pack: pack.to_string(),
        shard_count: plan.shard_count,
        shards,
    })
}

/// Attribution metadata for the evidence-text pack.
pub struct Attribution<'a> {
    /// `(language, page_id)` to `(title, revision_id)`.
    pub pages: &'a BTreeMap<(String, u64), (String, u64)>,
    pub license: &'a str,
}

/// Render every family of a build into the structural pack plus the
/// evidence-text pack for senses. Returns family manifests in write
/// order.
#[allow(clippy::too_many_arguments)]
pub fn write_release(
    out_root: &Path,
    shard_counts: &BTreeMap<String, u32>,
    statements: &[FactStatement],
    senses: &[FactSense],
    synsets: &[FactSynset],
    edges: &[RelationEdge],
    reasons: &[UngroundedReason],
    attribution: &Attribution<'_>,
) -> Result<Vec<FamilyManifest>, ReleaseError> {
    let plan = |family: &str| {
        ShardPlan::new(family, shard_counts.get(family).copied().unwrap_or(1))
    };
    let mut families = Vec::new();

    let statement_records: Vec<(String, Value)> =
        statements.iter().map(|s| (s.statement_id.clone(), s.to_canon())).collect();
    families.push(write_family(out_root, "structural", &plan("statements"), statement_records)?);

    let structural_senses: Vec<(String, Value)> = senses
        .iter()
        .map(|s| (s.factsense_id.clone(), sense_to_canon(s, false)))
        .collect();
    families.push(write_family(out_root, "structural", &plan("factsenses"), structural_senses)?);

    let evidence_senses: Vec<(String, Value)> = senses
        .iter()
        .map(|s| {
            let mut record = match sense_to_canon(s, true) {
                Value::Map(m) => m,
                _ => unreachable!(),
            };
            let (title, revision) = attribution
                .pages
                .get(&(s.language.clone(), s.pointer.page_id))
                .cloned()
                .unwrap_or_default();
            record.insert(
                "attribution".to_string(),
                Value::map([
                    ("source_title", Value::str(title)),
                    ("revision_id", Value::int(revision as i64)),
                    ("license", Value::str(attribution.license)),
                ]),
            );
            (s.factsense_id.clone(), Value::Map(record))
        })
        .collect();
    families.push(write_family(out_root, "evidence", &plan("factsenses"), evidence_senses)?);

    let synset_records: Vec<(String, Value)> =
        synsets.iter().map(|s| (s.synset_id.clone(), s.to_canon())).collect();
    families.push(write_family(out_root, "structural", &plan("synsets"), synset_records)?);

    let edge_records: Vec<(String, Value)> =
        edges.iter().map(|e| (e.relation_id.clone(), e.to_canon())).collect();
    families.push(write_family(out_root, "structural", &plan("relations"), edge_records)?);

    let reason_records: Vec<(String, Value)> = reasons
        .iter()
        .map(|r| {
            let id = format!("{}:{}", r.statement_id, r.language);
            (
                id.clone(),
                Value::map([
                    ("id", Value::str(id.clone())),
                    ("statement_id", Value::str(r.statement_id.clone())),
                    ("language", Value::str(r.language.clone())),
                    ("code", Value::str(r.code.as_str())),
                ]),
            )
        })
        .collect();
    families.push(write_family(out_root, "structural", &plan("ungrounded"), reason_records)?);

    Ok(families)
}

/// Write `manifest.json`: the pinned build manifest plus the family
/// shard checksums. Written last; its presence marks a complete build.
pub fn write_manifest(
    out_root: &Path,
    manifest: &BuildManifest,
    families: &[FamilyManifest],
) -> Result<(), ReleaseError> {
    let mut body = match manifest.to_canon() {
        Value::Map(m) => m,
        _ => unreachable!(),
    };
    let fams: Vec<Value> = families.iter().map(FamilyManifest::to_canon).collect();
    body.insert("families".to_string(), Value::Arr(fams));
    let bytes = canon_string(&Value::Map(body)) + "\n";
    write_atomic(&out_root.join("manifest.json"), bytes.as_bytes())
}

/// Write a deterministic JSONL log stream.
pub fn write_log(
    out_root: &Path,
    name: &str,
    records: impl IntoIterator<Item = Value>,
) -> Result<(), ReleaseError> {
    let mut bytes = Vec::new();
    for record in records {
        bytes.extend_from_slice(&canon_serialize(&record));
        bytes.push(b'\n');
    }
    write_atomic(&out_root.join("logs").join(name), &bytes)
}

/// Read back a family's records from a build directory.
pub fn read_family(
    out_root: &Path,
    pack: &str,
    family: &str,
) -> Result<Vec<Value>, ReleaseError> {
    let dir = out_root.join(pack).join(family);
    let mut shard_paths: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(|e| ReleaseError::Io { path: dir.clone(), source: e })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    shard_paths.sort();
    let mut out = Vec::new();
    for path in shard_paths {
        let text = fs::read_to_string(&path)
            .map_err(|e| ReleaseError::Io { path: path.clone(), source: e })?;
        for line in text.lines() {
            if line.is_empty() {
                continue;
            }
            let value = factforge_core::canon::parse(line).map_err(|e| ReleaseError::Io {
                path: path.clone(),
                source: std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()),
            })?;
            out.push(value);
        }
    }
    Ok(out)
}

/// Read the manifest of a completed build.
pub fn read_manifest(out_root: &Path) -> Result<Value, ReleaseError> {
    let path = out_root.join("manifest.json");
    let text =
        fs::read_to_string(&path).map_err(|e| ReleaseError::Io { path: path.clone(), source: e })?;
    factforge_core::canon::parse(&text).map_err(|e| ReleaseError::Io {
        path,
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shards_are_sorted_and_checksummed() {
        let dir = tempfile::tempdir().unwrap();
        let plan = ShardPlan::new("things", 2);
        let records: Vec<(String, Value)> = (0..20)
            .map(|i| {
                let id = format!("id-{:02}", 19 - i);
                (id.clone(), Value::map([("id", Value::str(id.clone()))]))
            })
            .collect();
        let fam = write_family(dir.path(), "structural", &plan, records).unwrap();
        assert_eq!(fam.shards.len(), 2);
        let total: u64 = fam.shards.iter().map(|s| s.records).sum();
        assert_eq!(total, 20);
        for shard in &fam.shards {
            let text = fs::read_to_string(dir.path().join(&shard.path)).unwrap();
            let ids: Vec<&str> = text.lines().map(|l| &l[7..12]).collect();
            let mut sorted = ids.clone();
            sorted.sort();
            assert_eq!(ids, sorted);
            assert_eq!(sha256_hex(text.as_bytes()), shard.sha256);
        }
        // Round trip.
        let back = read_family(dir.path(), "structural", "things").unwrap();
        assert_eq!(back.len(), 20);
    }
}
