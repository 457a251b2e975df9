//! Benchmark generation and evaluation IO: split files, triple TSVs,
//! question and claim JSONL, and the prediction readers for the three
//! evaluators.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::{Context, Result};
use factforge_core::bench::kgc::{filtered_rank, CandidateScorer, Direction, KgcEntry, RankMetrics, Triple};
use factforge_core::bench::mfc::{
    generate_mfc_claims, mfc_metrics, ClaimSource, GoldEvidence, MfcClaim, MfcLabel,
    MfcPrediction, MfcScores,
};
use factforge_core::bench::mkqa::{
    generate_mkqa, score_mkqa_batch, KnowledgeGraph, MkqaScores, MkqaSource,
};
use factforge_core::bench::split::{assign_split, Split};
use factforge_core::bench::project_kgc;
use factforge_core::canon::{self, canon_string, Value};
use factforge_core::grounding::EvidencePointer;
use factforge_core::model::{EntityId, PropertyId, Rank, TypedValue};
use factforge_core::policy::norm_value;
use factforge_core::policy::NormalizationPolicy;
use factforge_core::relations::POTENTIAL_CONFLICT;

use crate::build::BuildOutputs;
use crate::config::BuildConfig;

fn write_lines(path: &Path, lines: &[String]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut bytes = lines.join("\n");
    if !bytes.is_empty() {
        bytes.push('\n');
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Generate every benchmark artifact from a completed build.
pub fn write_bench(config: &BuildConfig, outputs: &BuildOutputs) -> Result<()> {
    let bench_dir = outputs.out_dir.join("bench");
    let build_id = &outputs.manifest.build_id;
    let policy_text = std::fs::read_to_string(&config.policy)?;
    let policy = NormalizationPolicy::from_canon(&canon::parse(&policy_text)?)
        .map_err(|e| anyhow::anyhow!("policy: {}", e))?;

    let statements_by_id: BTreeMap<&str, &factforge_core::model::FactStatement> =
        outputs.statements.iter().map(|s| (s.statement_id.as_str(), s)).collect();

    // Global splits.
    let splits: BTreeMap<&str, Split> = outputs
        .synsets
        .iter()
        .map(|s| (s.synset_id.as_str(), assign_split(&s.synset_id, build_id).split))
        .collect();
    let split_lines: Vec<String> = outputs
        .synsets
        .iter()
        .map(|s| {
            let a = assign_split(&s.synset_id, build_id);
            format!("{}\t{}\t{}", s.synset_id, a.split.as_str(), a.h)
        })
        .collect();
    write_lines(&bench_dir.join("splits.tsv"), &split_lines)?;

    // KGC projection.
    let mut entries = Vec::new();
    for synset in &outputs.synsets {
        let Some(stmt) = statements_by_id.get(synset.canonical_statement_id.as_str()) else {
            continue;
        };
        if stmt.rank == Rank::Deprecated {
            continue;
        }
        let TypedValue::Entity(object) = &stmt.value else { continue };
        entries.push(KgcEntry {
            triple: Triple {
                s: stmt.subject.clone(),
                p: stmt.property.clone(),
                o: object.clone(),
            },
            split: splits[synset.synset_id.as_str()],
        });
    }
    let projection = project_kgc(&entries, config.vocab_size);
    let kgc_dir = bench_dir.join("kgc");
    let tsv = |triples: &[Triple]| -> Vec<String> { triples.iter().map(Triple::tsv_line).collect() };
    write_lines(&kgc_dir.join("train.tsv"), &tsv(&projection.train))?;
    write_lines(&kgc_dir.join("dev.tsv"), &tsv(&projection.dev))?;
    write_lines(&kgc_dir.join("test.tsv"), &tsv(&projection.test))?;
    write_lines(&kgc_dir.join("all_true.tsv"), &tsv(&projection.all_true))?;

    // MKQA instances.
    let mut graph = KnowledgeGraph::new();
    let mut group_splits: BTreeMap<(EntityId, PropertyId), BTreeSet<Split>> = BTreeMap::new();
    for synset in &outputs.synsets {
        let Some(stmt) = statements_by_id.get(synset.canonical_statement_id.as_str()) else {
            continue;
        };
        if stmt.rank == Rank::Deprecated {
            continue;
        }
        graph.insert_typed(&stmt.subject, &stmt.property, &stmt.value, &policy);
        group_splits
            .entry((stmt.subject.clone(), stmt.property.clone()))
            .or_default()
            .insert(splits[synset.synset_id.as_str()]);
    }
    let languages: Vec<String> = config.languages.iter().map(|l| l.language.clone()).collect();
    let mut subject_labels: BTreeMap<(EntityId, String), String> = BTreeMap::new();
    let mut property_labels: BTreeMap<(PropertyId, String), String> = BTreeMap::new();
    for ((id, lang), label) in &outputs.labels {
        if let Ok(qid) = EntityId::new(id.clone()) {
            subject_labels.insert((qid, lang.clone()), label.clone());
        } else if let Ok(pid) = PropertyId::new(id.clone()) {
            property_labels.insert((pid, lang.clone()), label.clone());
        }
    }
    let source = MkqaSource {
        graph: &graph,
        group_splits: &group_splits,
        labels: &subject_labels,
        property_labels: &property_labels,
        languages: &languages,
    };
    let instances = generate_mkqa(&source);
    let question_lines: Vec<String> = instances
        .iter()
        .map(|i| {
            let answers: Vec<Value> =
                i.answers.iter().map(|a| Value::str(a.clone())).collect();
            canon_string(&Value::map([
                ("question_id", Value::str(i.question_id.clone())),
                ("language", Value::str(i.language.clone())),
                ("question", Value::str(i.question.clone())),
                ("lf", Value::str(i.lf.render())),
                ("answers", Value::Arr(answers)),
                ("split", Value::str(i.split.as_str())),
            ]))
        })
        .collect();
    write_lines(&bench_dir.join("mkqa").join("questions.jsonl"), &question_lines)?;

    // Leakage-controlled entity descriptions for text-aware training.
    let mut excluded_units = BTreeSet::new();
    let mut train_senses_by_subject: BTreeMap<&str, Vec<&factforge_core::grounding::FactSense>> =
        BTreeMap::new();
    for sense in &outputs.senses {
        let Some(synset_id) = outputs.stmt_to_synset.get(&sense.statement_id) else { continue };
        let Some(stmt) = statements_by_id.get(sense.statement_id.as_str()) else { continue };
        match splits[synset_id.as_str()] {
            Split::Train => train_senses_by_subject
                .entry(stmt.subject.as_str())
                .or_default()
                .push(sense),
            _ => {
                excluded_units.insert(factforge_core::bench::text::unit_key(&sense.pointer));
            }
        }
    }
    let description_lines: Vec<String> = train_senses_by_subject
        .iter()
        .filter_map(|(entity, senses)| {
            let description = factforge_core::bench::build_entity_description(
                senses,
                &excluded_units,
                config.description_units,
                config.description_token_cap,
            );
            if description.lines.is_empty() {
                return None;
            }
            Some(canon_string(&Value::map([
                ("entity", Value::str(*entity)),
                ("units", Value::int(description.lines.len() as i64)),
                ("description", Value::str(description.text())),
            ])))
        })
        .collect();
    write_lines(&bench_dir.join("kgc").join("descriptions.jsonl"), &description_lines)?;

    // MFC claims.
    let sources = claim_sources(config, outputs, &policy, &splits)?;
    let claims = match generate_mfc_claims(&sources, config.mfc_total, config.mfc_ratio) {
        Ok(claims) => claims,
        Err(starved) => {
            // Reported, never padded: emit what exists and surface the
            // starvation in the log.
            eprintln!("claim generation starved: {}", starved);
            Vec::new()
        }
    };
    let claim_lines: Vec<String> = claims.iter().map(claim_to_line).collect();
    write_lines(&bench_dir.join("mfc").join("claims.jsonl"), &claim_lines)?;
    Ok(())
}

fn claim_to_line(c: &MfcClaim) -> String {
    let evidence: Vec<Value> = c
        .gold_evidence
        .iter()
        .map(|g| {
            let spans: Vec<Value> = g
                .spans
                .iter()
                .map(|(b, e)| Value::Arr(vec![Value::int(*b as i64), Value::int(*e as i64)]))
                .collect();
            Value::map([
                ("pointer", g.pointer.to_canon()),
                ("spans", Value::Arr(spans)),
                ("unit_text", Value::str(g.unit_text.clone())),
            ])
        })
        .collect();
    canon_string(&Value::map([
        ("claim_id", Value::str(c.claim_id.clone())),
        ("language", Value::str(c.language.clone())),
        ("text", Value::str(c.text.clone())),
        ("label", Value::str(c.label.as_str())),
        ("source_synset_id", Value::str(c.source_synset_id.clone())),
        ("gold_evidence", Value::Arr(evidence)),
        ("split", Value::str(c.split.as_str())),
    ]))
}

/// Assemble per-(synset, language) claim sources from the build.
fn claim_sources(
    config: &BuildConfig,
    outputs: &BuildOutputs,
    policy: &NormalizationPolicy,
    splits: &BTreeMap<&str, Split>,
) -> Result<Vec<ClaimSource>> {
    let statements_by_id: BTreeMap<&str, &factforge_core::model::FactStatement> =
        outputs.statements.iter().map(|s| (s.statement_id.as_str(), s)).collect();
    let senses_by_id: BTreeMap<&str, &factforge_core::grounding::FactSense> =
        outputs.senses.iter().map(|s| (s.factsense_id.as_str(), s)).collect();
    let synsets_by_id: BTreeMap<&str, &factforge_core::synsets::FactSynset> =
        outputs.synsets.iter().map(|s| (s.synset_id.as_str(), s)).collect();

    // Conflict partners per synset.
    let mut conflict_partners: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for edge in &outputs.edges {
        if edge.relation_type == POTENTIAL_CONFLICT {
            conflict_partners
                .entry(edge.source_synset_id.as_str())
                .or_default()
                .push(edge.target_synset_id.as_str());
            conflict_partners
                .entry(edge.target_synset_id.as_str())
                .or_default()
                .push(edge.source_synset_id.as_str());
        }
    }

    // Value pools and supported sets per property.
    let mut swap_pools: BTreeMap<&PropertyId, Vec<(String, String)>> = BTreeMap::new();
    let mut supported: BTreeMap<(&EntityId, &PropertyId), BTreeSet<String>> = BTreeMap::new();
    for synset in &outputs.synsets {
        let Some(stmt) = statements_by_id.get(synset.canonical_statement_id.as_str()) else {
            continue;
        };
        let Ok((norm, _)) = norm_value(&stmt.property, &stmt.value, policy) else { continue };
        supported.entry((&stmt.subject, &stmt.property)).or_default().insert(norm.clone());
        let pool = swap_pools.entry(&stmt.property).or_default();
        if pool.len() < 64 {
            let surface = value_surface(&stmt.value, "en", &outputs.labels);
            if !pool.iter().any(|(_, n)| n == &norm) {
                pool.push((surface, norm));
            }
        }
    }

    let mut sources = Vec::new();
    for synset in &outputs.synsets {
        let Some(stmt) = statements_by_id.get(synset.canonical_statement_id.as_str()) else {
            continue;
        };
        let Ok((norm_val, _)) = norm_value(&stmt.property, &stmt.value, policy) else { continue };
        for (language, mention_ids) in &synset.canonical_mentions {
            if !config.languages.iter().any(|l| &l.language == language) {
                continue;
            }
            let evidence: Vec<GoldEvidence> = mention_ids
                .iter()
                .filter_map(|id| senses_by_id.get(id.as_str()))
                .map(|sense| GoldEvidence {
                    pointer: sense.pointer.clone(),
                    spans: vec![(sense.pointer.start, sense.pointer.end)],
                    unit_text: sense.unit_text.clone(),
                })
                .collect();
            if evidence.is_empty() {
                continue;
            }
            let subject_surface = outputs
                .labels
                .get(&(stmt.subject.as_str().to_string(), language.clone()))
                .cloned()
                .unwrap_or_else(|| stmt.subject.as_str().to_string());
            let property_surface = outputs
                .labels
                .get(&(stmt.property.as_str().to_string(), language.clone()))
                .or_else(|| outputs.labels.get(&(stmt.property.as_str().to_string(), "en".into())))
                .cloned()
                .unwrap_or_else(|| stmt.property.as_str().to_string());
            let conflict_values: Vec<(String, String)> = conflict_partners
                .get(synset.synset_id.as_str())
                .map(|partners| {
                    partners
                        .iter()
                        .filter_map(|sid| synsets_by_id.get(sid))
                        .filter_map(|current| {
                            statements_by_id.get(current.canonical_statement_id.as_str())
                        })
                        .filter_map(|partner_stmt| {
                            let (norm, _) =
                                norm_value(&partner_stmt.property, &partner_stmt.value, policy)
                                    .ok()?;
                            Some((
                                value_surface(&partner_stmt.value, language, &outputs.labels),
                                norm,
                            ))
                        })
                        .collect()
                })
                .unwrap_or_default();
            sources.push(ClaimSource {
                synset_id: synset.synset_id.clone(),
                split: splits[synset.synset_id.as_str()],
                language: language.clone(),
                subject_surface,
                property_surface,
                value_surface: value_surface(&stmt.value, language, &outputs.labels),
                norm_value: norm_val.clone(),
                evidence,
                conflict_values,
                swap_pool: swap_pools.get(&stmt.property).cloned().unwrap_or_default(),
                supported_values: supported
                    .get(&(&stmt.subject, &stmt.property))
                    .cloned()
                    .unwrap_or_default(),
                unit_values: outputs
                    .unit_value_probe
                    .get(&(stmt.subject.as_str().to_string(), language.clone()))
                    .cloned()
                    .unwrap_or_default(),
            });
        }
    }
    Ok(sources)
}

/// Human-facing surface form of a value from snapshot labels.
fn value_surface(
    value: &TypedValue,
    language: &str,
    labels: &BTreeMap<(String, String), String>,
) -> String {
    match value {
        TypedValue::Entity(q) => labels
            .get(&(q.as_str().to_string(), language.to_string()))
            .or_else(|| labels.get(&(q.as_str().to_string(), "en".to_string())))
            .cloned()
            .unwrap_or_else(|| q.as_str().to_string()),
        TypedValue::Time(t) => t.iso_truncated(t.precision),
        TypedValue::Quantity(q) => {
            if q.unit == "1" {
                q.amount.to_string()
            } else {
                format!("{} {}", q.amount, q.unit)
            }
        }
        TypedValue::Coordinate(c) => format!("{}, {}", c.latitude, c.longitude),
        TypedValue::Str { text, .. } | TypedValue::MonoText { text, .. } => text.clone(),
        TypedValue::ExternalId(s) => s.clone(),
        TypedValue::NoValue => "no value".to_string(),
        TypedValue::SomeValue => "some value".to_string(),
    }
}

// Evaluation-side readers.

fn parse_triple(line: &str) -> Result<Triple> {
    let cols: Vec<&str> = line.split('\t').collect();
    let [s, p, o] = cols.as_slice() else {
        anyhow::bail!("triple line must have 3 columns: {:?}", line);
    };
    Ok(Triple {
        s: EntityId::new(*s).map_err(|e| anyhow::anyhow!("{}", e))?,
        p: PropertyId::new(*p).map_err(|e| anyhow::anyhow!("{}", e))?,
        o: EntityId::new(*o).map_err(|e| anyhow::anyhow!("{}", e))?,
    })
}

fn read_triples(path: &Path) -> Result<Vec<Triple>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    text.lines().filter(|l| !l.is_empty()).map(parse_triple).collect()
}

/// Stored KGC prediction scores keyed by query.
pub struct KgcPredictions {
    scores: BTreeMap<(Triple, u8), BTreeMap<EntityId, f64>>,
}

impl CandidateScorer for KgcPredictions {
    fn score(&self, direction: Direction, triple: &Triple, candidate: &EntityId) -> f64 {
        let dir = match direction {
            Direction::Tail => 0u8,
            Direction::Head => 1u8,
        };
        self.scores
            .get(&(triple.clone(), dir))
            .and_then(|m| m.get(candidate))
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }
}

/// Evaluate KGC predictions against the released split files.
pub fn eval_kgc(gold_dir: &Path, predictions: &Path) -> Result<RankMetrics> {
    let test = read_triples(&gold_dir.join("test.tsv"))?;
    let all_true: BTreeSet<Triple> =
        read_triples(&gold_dir.join("all_true.tsv"))?.into_iter().collect();
    let mut entities: BTreeSet<EntityId> = BTreeSet::new();
    for t in &all_true {
        entities.insert(t.s.clone());
        entities.insert(t.o.clone());
    }
    let text = std::fs::read_to_string(predictions)
        .with_context(|| format!("reading {}", predictions.display()))?;
    let mut scores: BTreeMap<(Triple, u8), BTreeMap<EntityId, f64>> = BTreeMap::new();
    for line in text.lines().filter(|l| !l.is_empty()) {
        let v = canon::parse(line).map_err(|e| anyhow::anyhow!("prediction line: {}", e))?;
        let triple = Triple {
            s: EntityId::new(v.get("s").and_then(Value::as_str).context("s")?)
                .map_err(|e| anyhow::anyhow!("{}", e))?,
            p: PropertyId::new(v.get("p").and_then(Value::as_str).context("p")?)
                .map_err(|e| anyhow::anyhow!("{}", e))?,
            o: EntityId::new(v.get("o").and_then(Value::as_str).context("o")?)
                .map_err(|e| anyhow::anyhow!("{}", e))?,
        };
        let dir = match v.get("direction").and_then(Value::as_str) {
            Some("tail") => 0u8,
            Some("head") => 1u8,
            other => anyhow::bail!("bad direction {:?}", other),
        };
        let mut map = BTreeMap::new();
        if let Some(list) = v.get("scores").and_then(Value::as_arr) {
            for pair in list {
                let Some([e, s]) = pair.as_arr() else {
                    anyhow::bail!("score entry must be [entity, score]");
                };
                let entity = EntityId::new(e.as_str().context("entity")?)
                    .map_err(|e| anyhow::anyhow!("{}", e))?;
                entities.insert(entity.clone());
                map.insert(entity, s.as_num().context("score")?.to_f64());
            }
        }
        scores.insert((triple, dir), map);
    }
    let entities: Vec<EntityId> = entities.into_iter().collect();
    let scorer = KgcPredictions { scores };
    Ok(filtered_rank(&test, &entities, &all_true, &scorer))
}

/// Rebuild the execution graph from a released build directory.
pub fn graph_from_build(build_dir: &Path, policy: &NormalizationPolicy) -> Result<KnowledgeGraph> {
    let statements = crate::release_io::read_family(build_dir, "structural", "statements")?;
    let synsets = crate::release_io::read_family(build_dir, "structural", "synsets")?;
    let canonical: BTreeSet<String> = synsets
        .iter()
        .filter_map(|s| s.get("canonical_statement_id").and_then(Value::as_str))
        .map(str::to_string)
        .collect();
    let mut graph = KnowledgeGraph::new();
    for record in &statements {
        let Some(id) = record.get("statement_id").and_then(Value::as_str) else { continue };
        if !canonical.contains(id) {
            continue;
        }
        if record.get("rank").and_then(Value::as_str) == Some("deprecated") {
            continue;
        }
        let Some(subject) = record.get("subject").and_then(Value::as_str) else { continue };
        let Some(property) = record.get("property").and_then(Value::as_str) else { continue };
        let (Ok(subject), Ok(property)) =
            (EntityId::new(subject), PropertyId::new(property))
        else {
            continue;
        };
        let Some(value) = record.get("value") else { continue };
        let Some(typed) = typed_value_from_record(value) else { continue };
        graph.insert_typed(&subject, &property, &typed, policy);
    }
    Ok(graph)
}

fn typed_value_from_record(v: &Value) -> Option<TypedValue> {
    match v.get("kind").and_then(Value::as_str)? {
        "entity" => Some(TypedValue::Entity(EntityId::new(v.get("entity")?.as_str()?).ok()?)),
        "time" => {
            let time = v.get("time")?.as_str()?;
            let precision = v.get("precision")?.as_num()?.to_f64() as u32;
            let calendar = v.get("calendar")?.as_str()?;
            factforge_core::model::TimeValue::parse_iso(time, precision, calendar)
                .ok()
                .map(TypedValue::Time)
        }
        "quantity" => Some(TypedValue::Quantity(factforge_core::model::QuantityValue {
            amount: v.get("amount")?.as_num()?.clone(),
            unit: v.get("unit")?.as_str()?.to_string(),
        })),
        "coordinate" => Some(TypedValue::Coordinate(factforge_core::model::CoordinateValue {
            latitude: v.get("latitude")?.as_num()?.clone(),
            longitude: v.get("longitude")?.as_num()?.clone(),
            precision: v.get("precision").and_then(Value::as_num).cloned(),
        })),
        "string" => Some(TypedValue::Str {
            text: v.get("text")?.as_str()?.to_string(),
            language: v.get("language").and_then(Value::as_str).map(str::to_string),
        }),
        "monotext" => Some(TypedValue::MonoText {
            text: v.get("text")?.as_str()?.to_string(),
            language: v.get("language")?.as_str()?.to_string(),
        }),
        "external_id" => Some(TypedValue::ExternalId(v.get("text")?.as_str()?.to_string())),
        "novalue" => Some(TypedValue::NoValue),
        "somevalue" => Some(TypedValue::SomeValue),
        _ => None,
    }
}

/// Evaluate MKQA predictions (`{"question_id", "output"}` JSONL) against
/// the released question file, executing over the build's graph.
pub fn eval_mkqa(build_dir: &Path, gold: &Path, predictions: &Path) -> Result<MkqaScores> {
    let policy = NormalizationPolicy::default_policy();
    let graph = graph_from_build(build_dir, &policy)?;
    let gold_text = std::fs::read_to_string(gold)?;
    let mut gold_by_id: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for line in gold_text.lines().filter(|l| !l.is_empty()) {
        let v = canon::parse(line).map_err(|e| anyhow::anyhow!("gold line: {}", e))?;
        let id = v.get("question_id").and_then(Value::as_str).context("question_id")?;
        let answers: BTreeSet<String> = v
            .get("answers")
            .and_then(Value::as_arr)
            .map(|a| a.iter().filter_map(Value::as_str).map(str::to_string).collect())
            .unwrap_or_default();
        gold_by_id.insert(id.to_string(), answers);
    }
    let pred_text = std::fs::read_to_string(predictions)?;
    let mut outputs: BTreeMap<String, String> = BTreeMap::new();
    for line in pred_text.lines().filter(|l| !l.is_empty()) {
        let v = canon::parse(line).map_err(|e| anyhow::anyhow!("prediction line: {}", e))?;
        let id = v.get("question_id").and_then(Value::as_str).context("question_id")?;
        let output = v.get("output").and_then(Value::as_str).unwrap_or("");
        outputs.insert(id.to_string(), output.to_string());
    }
    let batch: Vec<(String, BTreeSet<String>)> = gold_by_id
        .into_iter()
        .map(|(id, answers)| (outputs.get(&id).cloned().unwrap_or_default(), answers))
        .collect();
    Ok(score_mkqa_batch(&batch, &graph))
}

fn gold_evidence_from_record(v: &Value) -> Option<GoldEvidence> {
    let pointer = EvidencePointer::from_canon(v.get("pointer")?)?;
    let spans = v
        .get("spans")
        .and_then(Value::as_arr)
        .map(|list| {
            list.iter()
                .filter_map(|pair| {
                    let arr = pair.as_arr()?;
                    Some((
                        arr.first()?.as_num()?.to_f64() as usize,
                        arr.get(1)?.as_num()?.to_f64() as usize,
                    ))
                })
                .collect()
        })
        .unwrap_or_default();
    Some(GoldEvidence {
        pointer,
        spans,
        unit_text: v.get("unit_text").and_then(Value::as_str).unwrap_or("").to_string(),
    })
}

/// Read released claims back into memory.
pub fn read_claims(path: &Path) -> Result<Vec<MfcClaim>> {
    let text = std::fs::read_to_string(path)?;
    let mut claims = Vec::new();
    for line in text.lines().filter(|l| !l.is_empty()) {
        let v = canon::parse(line).map_err(|e| anyhow::anyhow!("claim line: {}", e))?;
        let label = MfcLabel::parse(v.get("label").and_then(Value::as_str).context("label")?)
            .context("unknown label")?;
        let gold_evidence: Vec<GoldEvidence> = v
            .get("gold_evidence")
            .and_then(Value::as_arr)
            .map(|list| list.iter().filter_map(gold_evidence_from_record).collect())
            .unwrap_or_default();
        claims.push(MfcClaim {
            claim_id: v.get("claim_id").and_then(Value::as_str).context("claim_id")?.to_string(),
            language: v.get("language").and_then(Value::as_str).unwrap_or("").to_string(),
            text: v.get("text").and_then(Value::as_str).unwrap_or("").to_string(),
            label,
            source_synset_id: v
                .get("source_synset_id")
                .and_then(Value::as_str)
                .unwrap_or("")
                .to_string(),
            gold_evidence,
            split: Split::parse(v.get("split").and_then(Value::as_str).unwrap_or("test"))
                .unwrap_or(Split::Test),
        });
    }
    Ok(claims)
}

/// Evaluate MFC predictions (`{"claim_id", "label", "evidence": [{...}]}`
/// JSONL) against released claims.
pub fn eval_mfc(gold: &Path, predictions: &Path) -> Result<MfcScores> {
    let claims = read_claims(gold)?;
    let text = std::fs::read_to_string(predictions)?;
    let mut preds = Vec::new();
    for line in text.lines().filter(|l| !l.is_empty()) {
        let v = canon::parse(line).map_err(|e| anyhow::anyhow!("prediction line: {}", e))?;
        let label = MfcLabel::parse(v.get("label").and_then(Value::as_str).unwrap_or(""))
            .unwrap_or(MfcLabel::Nei);
        let evidence: Vec<(EvidencePointer, Vec<(usize, usize)>)> = v
            .get("evidence")
            .and_then(Value::as_arr)
            .map(|list| {
                list.iter()
                    .filter_map(|entry| {
                        let g = gold_evidence_from_record(entry)?;
                        Some((g.pointer, g.spans))
                    })
                    .collect()
            })
            .unwrap_or_default();
        preds.push(MfcPrediction {
            claim_id: v
                .get("claim_id")
                .and_then(Value::as_str)
                .unwrap_or("")
                .to_string(),
            label,
            evidence,
        });
    }
    Ok(mfc_metrics(&preds, &claims))
}
