//! Build manifest assembly: every input pinned by SHA-256, the build id
//! derived from the manifest body.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use factforge_core::canon::canon_serialize;
use factforge_core::ids::{hex_lower, sha1_digest, UNIT_SEP};
use factforge_core::model::{BuildManifest, ManifestInput};
use sha2::{Digest, Sha256};

use crate::ingest::IngestError;

/// Streaming SHA-256 of a file.
pub fn hash_file(path: &Path) -> Result<String, IngestError> {
    let mut file =
        File::open(path).map_err(|_| IngestError::MissingInput(path.to_path_buf()))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file
            .read(&mut buf)
            .map_err(|e| IngestError::Io { path: path.to_path_buf(), source: e })?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex_lower(&hasher.finalize()))
}

/// Pin all inputs and derive the build id. Identical inputs plus
/// configuration always produce the identical manifest and id; the
/// recorded per-input timestamp is the snapshot date, so the manifest
/// stays a pure function of content.
pub fn build_manifest(
    inputs: &[(String, PathBuf)],
    snapshot_date: &str,
    policy_version: &str,
    pack_ids: std::collections::BTreeMap<String, String>,
    tool_version: &str,
    config_hash: &str,
) -> Result<BuildManifest, IngestError> {
    let mut pinned = Vec::with_capacity(inputs.len());
    let mut sorted: Vec<&(String, PathBuf)> = inputs.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    for (label, path) in sorted {
        pinned.push(ManifestInput {
            path: label.clone(),
            sha256: hash_file(path)?,
            timestamp: snapshot_date.to_string(),
        });
    }
    let mut manifest = BuildManifest {
        build_id: String::new(),
        inputs: pinned,
        policy_version: policy_version.to_string(),
        pack_ids,
        tool_version: tool_version.to_string(),
        config_hash: config_hash.to_string(),
    };
    let body = canon_serialize(&manifest.body_canon());
    let digest = sha1_digest(&[b"manifest", &[UNIT_SEP], &body]);
    manifest.build_id = hex_lower(&digest);
    Ok(manifest)
}
