//! The build pipeline: ingest, statement extraction, view construction,
//! grounding, synset aggregation, relation derivation, release writing
//! and optional benchmark generation, in a fixed stage order. Integrity
//! violations are logged, never repaired; the manifest is written last.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use anyhow::{Context, Result};
use factforge_core::canon;
use factforge_core::diag::FunnelRecord;
use factforge_core::grounding::{
    ground_statement, resolve_subject_page, FactSense, GroundContext, LinkResolver, PageStore,
    UngroundedCode, UngroundedReason,
};
use factforge_core::model::{
    BuildManifest, EntityId, FactStatement, LinkTables, RawPage, TypedValue,
};
use factforge_core::pack::LanguagePack;
use factforge_core::policy::{norm_value, NormalizationPolicy};
use factforge_core::relations::{derive_all, index_nodes, RelationEdge};
use factforge_core::statements::extract_statements;
use factforge_core::synsets::{attach_canonical_mentions, build_synsets, FactSynset};
use factforge_core::views::{build_page_views, PageViews};

use crate::config::{infobox_allowlist, parse_schema_map, BuildConfig, SchemaMap};
use crate::ingest::{self, SkipReport};
use crate::manifest::build_manifest;
use crate::release_io::{self, Attribution};

/// Everything a completed build produced, for downstream stages and
/// tests.
pub struct BuildOutputs {
    pub manifest: BuildManifest,
    pub out_dir: PathBuf,
    pub statements: Vec<FactStatement>,
    pub senses: Vec<FactSense>,
    pub reasons: Vec<UngroundedReason>,
    pub synsets: Vec<FactSynset>,
    pub stmt_to_synset: BTreeMap<String, String>,
    pub edges: Vec<RelationEdge>,
    pub funnel: Vec<FunnelRecord>,
    pub skips: Vec<SkipReport>,
    /// `(language, page_id)` to `(title, revision_id)`.
    pub page_titles: BTreeMap<(String, u64), (String, u64)>,
    /// Entity and property labels: `(id, language)` to label.
    pub labels: BTreeMap<(String, String), String>,
    /// Exact-value probe per `(subject, language)`: strict canonical
    /// forms of every literal parsed from the subject page's units plus
    /// resolved link targets.
    pub unit_value_probe: BTreeMap<(String, String), BTreeSet<String>>,
}

struct LanguageState {
    language: String,
    pack: LanguagePack,
    pages: Vec<RawPage>,
    tables: LinkTables,
    title_to_entity: BTreeMap<String, EntityId>,
}

/// Load assets, pin inputs, and run every stage in order. With `bench`
/// set the benchmark artifacts are generated after the release is
/// written.
pub fn run_build(config: &BuildConfig, bench: bool, jobs: usize) -> Result<BuildOutputs> {
    let policy = load_policy(&config.policy)?;
    let schema = load_schema(&config.schema_map)?;
    let relation_map = load_relation_map(&config.relation_map)?;

    // Pin all upstream inputs.
    let mut inputs: Vec<(String, PathBuf)> = vec![
        ("entities".to_string(), config.entities.clone()),
        ("schema_map".to_string(), config.schema_map.clone()),
        ("relation_map".to_string(), config.relation_map.clone()),
    ];
    let mut pack_ids = BTreeMap::new();
    let mut languages: Vec<LanguageState> = Vec::new();
    for lang in &config.languages {
        inputs.push((format!("pages:{}", lang.language), lang.pages.clone()));
        if let Some(r) = &lang.redirects {
            inputs.push((format!("redirects:{}", lang.language), r.clone()));
        }
        if let Some(d) = &lang.disambiguations {
            inputs.push((format!("disambiguations:{}", lang.language), d.clone()));
        }
        let pack_text = std::fs::read_to_string(&lang.pack)
            .with_context(|| format!("reading pack {}", lang.pack.display()))?;
        let pack_value = canon::parse(&pack_text).context("parsing language pack")?;
        let pack = LanguagePack::from_canon(&pack_value)
            .map_err(|e| anyhow::anyhow!("pack {}: {}", lang.language, e))?;
        pack_ids.insert(lang.language.clone(), pack.pack_id.clone());
        let pages = ingest::collect_pages(&lang.pages)?;
        let tables =
            ingest::read_link_tables(lang.redirects.as_deref(), lang.disambiguations.as_deref())?;
        languages.push(LanguageState {
            language: lang.language.clone(),
            pack,
            pages,
            tables,
            title_to_entity: BTreeMap::new(),
        });
    }

    let manifest = build_manifest(
        &inputs,
        &config.snapshot_date,
        &policy.version,
        pack_ids,
        crate::TOOL_VERSION,
        &config.config_hash,
    )?;
    let build_id = manifest.build_id.clone();

    // Ingest entities; property records feed the label catalog only.
    let (records, skips) = ingest::collect_entities(&config.entities)?;
    let mut labels: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut statements: Vec<FactStatement> = Vec::new();
    let mut claim_skips: Vec<SkipReport> = Vec::new();
    for record in &records {
        for (lang, label) in &record.labels {
            labels.insert((record.entity_id.clone(), lang.clone()), label.clone());
        }
        if record.entity_id.starts_with('Q') {
            let (mut stmts, malformed) = extract_statements(record, &policy);
            statements.append(&mut stmts);
            claim_skips.extend(malformed.into_iter().map(|m| SkipReport {
                input: "entities".to_string(),
                line: 0,
                reason: format!("claim skipped: {}", m),
            }));
        }
    }
    statements.sort_by(|a, b| a.statement_id.cmp(&b.statement_id));

    // Per-language page indexes and reverse sitelink maps.
    for state in languages.iter_mut() {
        let store = PageStore::build(&state.pages, &state.tables, &state.pack);
        let mut title_to_entity: BTreeMap<String, EntityId> = BTreeMap::new();
        for record in &records {
            let Ok(qid) = EntityId::new(record.entity_id.clone()) else { continue };
            let Some(title) = record.sitelinks.get(&state.language) else { continue };
            title_to_entity.entry(title.clone()).or_insert_with(|| qid.clone());
            if let Some((page, _)) = store.lookup(title) {
                title_to_entity.entry(page.title.clone()).or_insert_with(|| qid.clone());
            }
        }
        state.title_to_entity = title_to_entity;
    }

    // Views for every main-namespace, non-redirect page; degenerate
    // parses yield empty views and surface as NO_VALID_TEXT downstream.
    let mut views_by_lang: BTreeMap<String, BTreeMap<u64, PageViews>> = BTreeMap::new();
    let mut page_titles: BTreeMap<(String, u64), (String, u64)> = BTreeMap::new();
    for state in &languages {
        let allow = infobox_allowlist(&schema, &state.language);
        let mut views = BTreeMap::new();
        for page in &state.pages {
            page_titles.insert(
                (state.language.clone(), page.page_id),
                (page.title.clone(), page.revision_id),
            );
            if page.namespace != 0 || page.is_redirect {
                continue;
            }
            let built = build_page_views(&page.wikitext, &state.pack, &allow).unwrap_or_default();
            views.insert(page.page_id, built);
        }
        views_by_lang.insert(state.language.clone(), views);
    }

    // Grounding, parallel over statement chunks with deterministic
    // merge order.
    let empty_labels: BTreeMap<EntityId, String> = BTreeMap::new();
    let mut value_labels_by_lang: BTreeMap<String, BTreeMap<EntityId, String>> = BTreeMap::new();
    for state in &languages {
        let mut map = BTreeMap::new();
        for ((id, lang), label) in &labels {
            if lang == &state.language {
                if let Ok(qid) = EntityId::new(id.clone()) {
                    map.insert(qid, label.clone());
                }
            }
        }
        value_labels_by_lang.insert(state.language.clone(), map);
    }

    struct ChunkOut {
        senses: Vec<FactSense>,
        reasons: Vec<UngroundedReason>,
        funnel: Vec<FunnelRecord>,
    }

    let stores: BTreeMap<String, PageStore<'_>> = languages
        .iter()
        .map(|s| (s.language.clone(), PageStore::build(&s.pages, &s.tables, &s.pack)))
        .collect();
    let resolvers: BTreeMap<String, LinkResolver<'_>> = languages
        .iter()
        .map(|s| {
            (s.language.clone(), LinkResolver::new(&stores[&s.language], &s.title_to_entity))
        })
        .collect();

    let empty_schema: BTreeMap<(String, String), factforge_core::model::PropertyId> =
        BTreeMap::new();
    let ground_chunk = |chunk: &[FactStatement]| -> ChunkOut {
        let mut out =
            ChunkOut { senses: Vec::new(), reasons: Vec::new(), funnel: Vec::new() };
        for stmt in chunk {
            for state in &languages {
                let lang = &state.language;
                if !stmt.sitelinks.contains_key(lang) {
                    continue;
                }
                let label = labels
                    .get(&(stmt.subject.as_str().to_string(), lang.clone()))
                    .map(String::as_str);
                let resolved = resolve_subject_page(
                    &stmt.sitelinks,
                    lang,
                    label,
                    &stores[lang],
                    &state.pack,
                    config.title_fallback,
                );
                let Some((page, resolution)) = resolved else {
                    out.funnel.push(FunnelRecord {
                        language: lang.clone(),
                        statement_id: stmt.statement_id.clone(),
                        page_ok: false,
                        units_ok: false,
                        matched: false,
                    });
                    // Page retrieval failures leave no text to ground in.
                    out.reasons.push(UngroundedReason {
                        code: UngroundedCode::NoValidText,
                        statement_id: stmt.statement_id.clone(),
                        language: lang.clone(),
                    });
                    continue;
                };
                let views = views_by_lang[lang].get(&page.page_id);
                let empty = PageViews::default();
                let views = views.unwrap_or(&empty);
                let ctx = GroundContext {
                    language: lang,
                    store: &stores[lang],
                    resolver: &resolvers[lang],
                    schema: schema.get(lang).unwrap_or(&empty_schema),
                    labels: value_labels_by_lang.get(lang).unwrap_or(&empty_labels),
                    pack: &state.pack,
                    policy: &policy,
                    build_id: &build_id,
                    tool_version: crate::TOOL_VERSION,
                };
                match ground_statement(stmt, page, views, resolution, &ctx) {
                    Ok(mut senses) => {
                        out.funnel.push(FunnelRecord {
                            language: lang.clone(),
                            statement_id: stmt.statement_id.clone(),
                            page_ok: true,
                            units_ok: true,
                            matched: true,
                        });
                        out.senses.append(&mut senses);
                    }
                    Err(code) => {
                        out.funnel.push(FunnelRecord {
                            language: lang.clone(),
                            statement_id: stmt.statement_id.clone(),
                            page_ok: true,
                            units_ok: code != UngroundedCode::NoValidText,
                            matched: false,
                        });
                        out.reasons.push(UngroundedReason {
                            code,
                            statement_id: stmt.statement_id.clone(),
                            language: lang.clone(),
                        });
                    }
                }
            }
        }
        out
    };

    let jobs = jobs.max(1);
    let chunk_size = statements.len().div_ceil(jobs).max(1);
    let chunks: Vec<&[FactStatement]> = statements.chunks(chunk_size).collect();
    let chunk_outputs: Vec<ChunkOut> = if jobs == 1 || chunks.len() == 1 {
        chunks.iter().map(|c| ground_chunk(c)).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> =
                chunks.iter().map(|chunk| scope.spawn(|| ground_chunk(chunk))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut senses = Vec::new();
    let mut reasons = Vec::new();
    let mut funnel = Vec::new();
    for mut chunk in chunk_outputs {
        senses.append(&mut chunk.senses);
        reasons.append(&mut chunk.reasons);
        funnel.append(&mut chunk.funnel);
    }
    funnel.sort_by(|a, b| (&a.language, &a.statement_id).cmp(&(&b.language, &b.statement_id)));
    senses.sort_by(|a, b| a.factsense_id.cmp(&b.factsense_id));
    reasons.sort_by(|a, b| {
        (&a.statement_id, &a.language).cmp(&(&b.statement_id, &b.language))
    });

    // Synsets and relations.
    let (mut synsets, stmt_to_synset) = build_synsets(&statements, &policy, &build_id)
        .map_err(|e| anyhow::anyhow!("synset construction: {}", e))?;
    attach_canonical_mentions(&mut synsets, &stmt_to_synset, &senses);
    let statements_by_id: BTreeMap<String, &FactStatement> =
        statements.iter().map(|s| (s.statement_id.clone(), s)).collect();
    let nodes = index_nodes(&synsets, &statements_by_id, &policy);
    let mut edges = derive_all(&nodes, &relation_map, config.hop_cap, &build_id);
    if let Some(min_tier) = config.relation_min_tier {
        edges = factforge_core::relations::filter_by_tier(edges, &relation_map, min_tier);
    }
    if config.hub_downweight {
        factforge_core::relations::hub_downweight(&mut edges);
    }

    // Exact-value probe per (subject, language) for claim generation.
    let mut unit_value_probe: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
    if bench {
        for state in &languages {
            let lang = &state.language;
            for record in &records {
                let Ok(_) = EntityId::new(record.entity_id.clone()) else { continue };
                let Some(title) = record.sitelinks.get(lang) else { continue };
                let Some((page, _)) = stores[lang].lookup(title) else { continue };
                let Some(views) = views_by_lang[lang].get(&page.page_id) else { continue };
                let probe = probe_unit_values(views, &state.pack, &resolvers[lang]);
                unit_value_probe.insert((record.entity_id.clone(), lang.clone()), probe);
            }
        }
    }

    // Release writing; the manifest lands last.
    let out_dir = config.out.clone();
    let attribution = Attribution { pages: &page_titles, license: "CC-BY-SA-4.0" };
    let families = release_io::write_release(
        &out_dir,
        &config.shards,
        &statements,
        &senses,
        &synsets,
        &edges,
        &reasons,
        &attribution,
    )?;
    let mut skip_log: Vec<SkipReport> = skips;
    skip_log.extend(claim_skips);
    release_io::write_log(&out_dir, "funnel.jsonl", funnel.iter().map(|r| r.to_canon()))?;
    release_io::write_log(&out_dir, "skips.jsonl", skip_log.iter().map(|s| s.to_canon()))?;

    let outputs = BuildOutputs {
        manifest: manifest.clone(),
        out_dir: out_dir.clone(),
        statements,
        senses,
        reasons,
        synsets,
        stmt_to_synset,
        edges,
        funnel,
        skips: skip_log,
        page_titles,
        labels,
        unit_value_probe,
    };

    if bench {
        crate::bench_io::write_bench(config, &outputs)?;
    }

    release_io::write_manifest(&out_dir, &manifest, &families)?;
    Ok(outputs)
}

/// Strict canonical forms of every literal and resolved link target in a
/// page's units, for the NEI exact-value verification.
fn probe_unit_values(
    views: &PageViews,
    pack: &LanguagePack,
    resolver: &LinkResolver<'_>,
) -> BTreeSet<String> {
    use factforge_core::grounding::{find_coordinates, find_dates, find_quantities};
    let mut out = BTreeSet::new();
    let strict = NormalizationPolicy::default_policy();
    let probe_property = factforge_core::model::PropertyId::new("P0000001").unwrap();
    let mut texts: Vec<&str> = Vec::new();
    for s in &views.sentence.sentences {
        texts.push(&s.text);
        for link in &s.links {
            if let Some(qid) = resolver.resolve(&link.target) {
                out.insert(qid.as_str().to_string());
            }
        }
    }
    for unit in views.infobox.iter().chain(views.table.iter()) {
        texts.push(&unit.text);
    }
    let mut found_values: Vec<TypedValue> = Vec::new();
    for text in texts {
        found_values.extend(find_dates(text, pack).into_iter().map(|f| TypedValue::Time(f.value)));
        found_values
            .extend(find_quantities(text, pack).into_iter().map(|f| TypedValue::Quantity(f.value)));
        found_values
            .extend(find_coordinates(text, pack).into_iter().map(|f| TypedValue::Coordinate(f.value)));
    }
    for value in found_values {
        if let Ok((norm, _)) = norm_value(&probe_property, &value, &strict) {
            out.insert(norm);
        }
    }
    out
}

fn load_policy(path: &std::path::Path) -> Result<NormalizationPolicy> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading policy {}", path.display()))?;
    let value = canon::parse(&text).context("parsing policy JSON")?;
    NormalizationPolicy::from_canon(&value).map_err(|e| anyhow::anyhow!("policy: {}", e))
}

fn load_schema(path: &std::path::Path) -> Result<SchemaMap> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading schema map {}", path.display()))?;
    parse_schema_map(&text).map_err(|e| anyhow::anyhow!("schema map: {}", e))
}

fn load_relation_map(path: &std::path::Path) -> Result<factforge_core::relations::PropertyRelationMap> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading relation map {}", path.display()))?;
    let value = canon::parse(&text).context("parsing relation map")?;
    factforge_core::relations::PropertyRelationMap::from_canon(&value)
        .map_err(|e| anyhow::anyhow!("relation map: {}", e))
}
