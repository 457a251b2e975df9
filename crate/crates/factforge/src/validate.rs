//! Pointer re-localization validation: regenerate every sampled sense's
//! span from the source dumps under the pinned configuration and
//! classify Exact / Drift / Fail.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use factforge_core::canon::{self, Value};
use factforge_core::grounding::EvidencePointer;
use factforge_core::model::RawPage;
use factforge_core::pack::LanguagePack;
use factforge_core::release::{relocate_pointer, RelocalizationClass};

use crate::config::{infobox_allowlist, parse_schema_map, BuildConfig};
use crate::ingest;
use crate::release_io;

/// Aggregated validation outcome.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub exact: u64,
    pub drift: u64,
    pub fail: u64,
    /// `(factsense_id, class, detail)` for every non-exact pointer.
    pub defects: Vec<(String, RelocalizationClass, String)>,
}

impl ValidationReport {
    pub fn total(&self) -> u64 {
        self.exact + self.drift + self.fail
    }
}

/// Validate pointers for a completed build. `sample` limits the count,
/// taking senses in id order so runs are comparable.
pub fn validate_pointers(
    config: &BuildConfig,
    build_dir: &Path,
    sample: Option<usize>,
) -> Result<ValidationReport> {
    let schema_text = std::fs::read_to_string(&config.schema_map)?;
    let schema = parse_schema_map(&schema_text).map_err(|e| anyhow::anyhow!("{}", e))?;

    // Page indexes per language keyed by page id.
    let mut pages_by_lang: BTreeMap<String, BTreeMap<u64, RawPage>> = BTreeMap::new();
    let mut packs: BTreeMap<String, LanguagePack> = BTreeMap::new();
    for lang in &config.languages {
        let pages = ingest::collect_pages(&lang.pages)?;
        pages_by_lang
            .insert(lang.language.clone(), pages.into_iter().map(|p| (p.page_id, p)).collect());
        let pack_text = std::fs::read_to_string(&lang.pack)?;
        let pack = LanguagePack::from_canon(&canon::parse(&pack_text)?)
            .map_err(|e| anyhow::anyhow!("{}", e))?;
        packs.insert(lang.language.clone(), pack);
    }

    let mut records = release_io::read_family(build_dir, "evidence", "factsenses")?;
    records.sort_by(|a, b| {
        let ka = a.get("factsense_id").and_then(Value::as_str).unwrap_or("");
        let kb = b.get("factsense_id").and_then(Value::as_str).unwrap_or("");
        ka.cmp(kb)
    });
    if let Some(n) = sample {
        records.truncate(n);
    }

    let mut report = ValidationReport::default();
    for record in &records {
        let id = record
            .get("factsense_id")
            .and_then(Value::as_str)
            .context("record missing factsense_id")?
            .to_string();
        let language = record
            .get("language")
            .and_then(Value::as_str)
            .context("record missing language")?;
        let sentence = record.get("sentence").and_then(Value::as_str).unwrap_or("");
        let pointer = record
            .get("pointer")
            .and_then(EvidencePointer::from_canon)
            .context("record missing pointer")?;

        let outcome = match (
            pages_by_lang.get(language).and_then(|m| m.get(&pointer.page_id)),
            packs.get(language),
        ) {
            (Some(page), Some(pack)) => {
                let allow = infobox_allowlist(&schema, language);
                relocate_pointer(&pointer, page, pack, &allow, sentence).0
            }
            _ => factforge_core::release::RelocalizationOutcome {
                class: RelocalizationClass::Fail,
                detail: "page not present in dumps".to_string(),
            },
        };
        match outcome.class {
            RelocalizationClass::Exact => report.exact += 1,
            RelocalizationClass::Drift => {
                report.drift += 1;
                report.defects.push((id, RelocalizationClass::Drift, outcome.detail));
            }
            RelocalizationClass::Fail => {
                report.fail += 1;
                report.defects.push((id, RelocalizationClass::Fail, outcome.detail));
            }
        }
    }
    Ok(report)
}
