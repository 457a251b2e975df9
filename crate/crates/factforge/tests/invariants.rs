//! Corpus-wide invariant checks over the demo fixture: view round
//! trips, reader re-read identity, extraction losslessness, and pack
//! consistency details that the per-module unit tests cover only on
//! toy inputs.

use std::collections::BTreeSet;

use factforge::config::{infobox_allowlist, parse_schema_map};
use factforge::defaults;
use factforge::fixture::{self, FixtureSpec};
use factforge::ingest;
use factforge_core::canon::{canon_serialize, Value};
use factforge_core::policy::NormalizationPolicy;
use factforge_core::statements::extract_statements;
use factforge_core::views::{build_page_views, cp_slice};

fn small_spec() -> FixtureSpec {
    FixtureSpec { people: 80, cities: 24, countries: 6, occupations: 8, ..Default::default() }
}

/// For every sentence of every fixture page in every language, slicing
/// the stored interval out of the normalized stream reproduces the
/// sentence text exactly, indices are strictly ordered, and links stay
/// inside their units.
#[test]
fn sentence_round_trip_over_all_fixture_pages() {
    let dir = tempfile::tempdir().unwrap();
    let paths = fixture::generate(dir.path(), &small_spec()).unwrap();
    let schema = parse_schema_map(&defaults::schema_map_tsv()).unwrap();

    let mut pages_checked = 0usize;
    let mut sentences_checked = 0usize;
    for (lang, path) in &paths.pages {
        let pack = defaults::language_pack(lang).unwrap();
        let allow = infobox_allowlist(&schema, lang);
        for page in ingest::collect_pages(path).unwrap() {
            if page.namespace != 0 || page.is_redirect {
                continue;
            }
            let views = build_page_views(&page.wikitext, &pack, &allow).unwrap();
            let mut last_end = 0usize;
            for (i, s) in views.sentence.sentences.iter().enumerate() {
                assert_eq!(s.index, i, "indices must be dense and ordered");
                assert!(s.start >= last_end || i == 0);
                assert!(s.start < s.end);
                assert_eq!(
                    cp_slice(&views.sentence.stream, s.start, s.end),
                    s.text,
                    "round trip failed on {} page {}",
                    lang,
                    page.title
                );
                let unit_len = s.text.chars().count();
                for link in &s.links {
                    assert!(link.start < link.end && link.end <= unit_len);
                }
                last_end = s.end;
                sentences_checked += 1;
            }
            // Repeatability: a second build yields identical boundaries.
            let again = build_page_views(&page.wikitext, &pack, &allow).unwrap();
            let a: Vec<(usize, usize)> =
                views.sentence.sentences.iter().map(|s| (s.start, s.end)).collect();
            let b: Vec<(usize, usize)> =
                again.sentence.sentences.iter().map(|s| (s.start, s.end)).collect();
            assert_eq!(a, b);
            pages_checked += 1;
        }
    }
    assert!(pages_checked > 100, "only {} pages checked", pages_checked);
    assert!(sentences_checked > 300, "only {} sentences checked", sentences_checked);
}

/// Re-reading the same entity dump yields a bit-identical record
/// sequence under canonical serialization.
#[test]
fn entity_reader_rereads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let paths = fixture::generate(dir.path(), &small_spec()).unwrap();

    let record_bytes = |()| -> Vec<Vec<u8>> {
        let (records, _) = ingest::collect_entities(&paths.entities).unwrap();
        records
            .iter()
            .map(|r| {
                let claims: Vec<Value> = r.claims.values().flatten().cloned().collect();
                let sitelinks: std::collections::BTreeMap<String, Value> = r
                    .sitelinks
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::str(v.clone())))
                    .collect();
                canon_serialize(&Value::map([
                    ("id", Value::str(r.entity_id.clone())),
                    ("claims", Value::Arr(claims)),
                    ("sitelinks", Value::Map(sitelinks)),
                    ("modified", Value::str(r.last_modified.clone())),
                ]))
            })
            .collect()
    };
    assert_eq!(record_bytes(()), record_bytes(()));
}

/// Extraction is lossless on qualifiers, references, rank and sitelinks:
/// counts in the projected statements match the raw claim JSON across
/// the whole fixture.
#[test]
fn extraction_losslessness_over_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let paths = fixture::generate(dir.path(), &small_spec()).unwrap();
    let (records, _) = ingest::collect_entities(&paths.entities).unwrap();
    let policy = NormalizationPolicy::default_policy();

    let mut statements_total = 0usize;
    for record in records.iter().filter(|r| r.entity_id.starts_with('Q')) {
        let (stmts, skipped) = extract_statements(record, &policy);
        assert!(skipped.is_empty(), "fixture claims must all extract: {:?}", skipped);
        let mut by_id: std::collections::BTreeMap<&str, &factforge_core::model::FactStatement> =
            stmts.iter().map(|s| (s.statement_id.as_str(), s)).collect();
        for claims in record.claims.values() {
            for claim in claims {
                let id = claim.get("id").and_then(Value::as_str).unwrap();
                let stmt = by_id.remove(id).expect("statement for claim");
                let raw_quals: usize = claim
                    .get("qualifiers")
                    .and_then(Value::as_map)
                    .map(|m| m.values().filter_map(Value::as_arr).map(<[Value]>::len).sum())
                    .unwrap_or(0);
                assert_eq!(stmt.qualifiers.len(), raw_quals, "qualifier loss on {}", id);
                let raw_refs =
                    claim.get("references").and_then(Value::as_arr).map(<[Value]>::len).unwrap_or(0);
                assert_eq!(stmt.references.len(), raw_refs, "reference loss on {}", id);
                assert_eq!(
                    stmt.rank.as_str(),
                    claim.get("rank").and_then(Value::as_str).unwrap_or("normal"),
                );
                assert_eq!(stmt.sitelinks, record.sitelinks);
                statements_total += 1;
            }
        }
        assert!(by_id.is_empty(), "statements without source claims: {:?}", by_id.keys());
    }
    assert!(statements_total > 500);
}

/// The priority ladder in grounding provenance: a kept sense's class
/// priority is never below any suppressed alternative's, across the
/// whole fixture build.
#[test]
fn priority_soundness_over_full_build() {
    let dir = tempfile::tempdir().unwrap();
    let paths = fixture::generate(dir.path(), &small_spec()).unwrap();
    let mut config = factforge::config::BuildConfig::load(&paths.config).unwrap();
    config.out = dir.path().join("out");
    let outputs = factforge::build::run_build(&config, false, 1).unwrap();
    assert!(!outputs.senses.is_empty());

    let mut units_seen: BTreeSet<(String, u64, String)> = BTreeSet::new();
    for sense in &outputs.senses {
        for alt in &sense.provenance.alternatives {
            assert!(
                sense.match_type.class_priority() >= alt.class_priority(),
                "sense {} keeps {:?} under alternative {:?}",
                sense.factsense_id,
                sense.match_type,
                alt
            );
        }
        // One sense per (statement, language, unit).
        let key = (
            format!("{}:{}", sense.statement_id, sense.language),
            sense.pointer.page_id,
            format!("{:?}", sense.pointer.locator),
        );
        assert!(units_seen.insert(key), "duplicate unit sense for {}", sense.factsense_id);
    }
}
