//! Statement equivalence classes: bucketing by claim hash, full-key
//! verification, canonical statement and per-language canonical mention
//! selection, and confidence aggregation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::canon::Value;
use crate::decimal::Decimal;
use crate::grounding::{FactSense, MatchType};
use crate::ids::{derive_id, DomainTag, UNIT_SEP};
use crate::model::FactStatement;
use crate::policy::{aggregation_key_with_reasons, claim_hash, MergeReason, NormalizationPolicy, PolicyError};
use crate::views::ViewKind;

/// An equivalence class of statements under the normalization policy.
#[derive(Clone, Debug)]
pub struct FactSynset {
    pub synset_id: String,
    pub aggregation_key: String,
    /// Member statement ids, sorted.
    pub members: Vec<String>,
    pub canonical_statement_id: String,
    /// Best mentions per language, ranked best-first.
    pub canonical_mentions: BTreeMap<String, Vec<String>>,
    pub merge_reasons: Vec<MergeReason>,
    /// Max over member confidences.
    pub aggregate_confidence: Decimal,
}

impl FactSynset {
    pub fn to_canon(&self) -> Value {
        let members: Vec<Value> = self.members.iter().map(|m| Value::str(m.clone())).collect();
        let mentions: BTreeMap<String, Value> = self
            .canonical_mentions
            .iter()
            .map(|(lang, ids)| {
                (
                    lang.clone(),
                    Value::Arr(ids.iter().map(|i| Value::str(i.clone())).collect()),
                )
            })
            .collect();
        let reasons: Vec<Value> = self.merge_reasons.iter().map(MergeReason::to_canon).collect();
        Value::map([
            ("synset_id", Value::str(self.synset_id.clone())),
            ("aggregation_key", Value::str(self.aggregation_key.clone())),
            ("members", Value::Arr(members)),
            ("canonical_statement_id", Value::str(self.canonical_statement_id.clone())),
            ("canonical_mentions", Value::Map(mentions)),
            ("merge_reasons", Value::Arr(reasons)),
            ("aggregate_confidence", Value::Num(self.aggregate_confidence.clone())),
        ])
    }
}

/// Choose the canonical statement: lexicographic maximization over
/// (rank score, reference-block count, last edit, then the smallest
/// statement id as the final tie-breaker).
pub fn select_canonical_statement<'a>(members: &[&'a FactStatement]) -> &'a FactStatement {
    members
        .iter()
        .copied()
        .reduce(|best, cand| {
            let key_best = (best.rank.score(), best.reference_count(), best.last_edit.as_str());
            let key_cand = (cand.rank.score(), cand.reference_count(), cand.last_edit.as_str());
            match key_cand.cmp(&key_best) {
                core::cmp::Ordering::Greater => cand,
                core::cmp::Ordering::Less => best,
                core::cmp::Ordering::Equal => {
                    if cand.statement_id < best.statement_id {
                        cand
                    } else {
                        best
                    }
                }
            }
        })
        .expect("members nonempty")
}

fn unit_type_rank(view: ViewKind) -> u8 {
    match view {
        ViewKind::InfoboxField => 0,
        ViewKind::TableCell => 1,
        ViewKind::Sentence => 2,
    }
}

fn match_class_rank(m: MatchType) -> u8 {
    // Link-based beats lexical inside a unit type.
    match m {
        MatchType::InfoboxField => 0,
        MatchType::WikilinkEntity => 1,
        MatchType::LexicalValue => 2,
        MatchType::LeadWeak => 3,
    }
}

/// Rank one language's senses best-first: dedup by pointer, infobox
/// fields over table cells over sentences, link-based over lexical, then
/// confidence, then pointer order.
pub fn select_canonical_mention(senses: &[&FactSense]) -> Vec<String> {
    let mut ranked: Vec<&FactSense> = Vec::new();
    let mut seen: Vec<&crate::grounding::EvidencePointer> = Vec::new();
    let mut sorted: Vec<&FactSense> = senses.to_vec();
    sorted.sort_by(|a, b| {
        unit_type_rank(a.pointer.view)
            .cmp(&unit_type_rank(b.pointer.view))
            .then_with(|| match_class_rank(a.match_type).cmp(&match_class_rank(b.match_type)))
            .then_with(|| b.confidence.partial_cmp(&a.confidence).expect("finite"))
            .then_with(|| a.pointer.cmp(&b.pointer))
    });
    for s in sorted {
        if seen.iter().any(|p| **p == s.pointer) {
            continue;
        }
        seen.push(&s.pointer);
        ranked.push(s);
    }
    ranked.into_iter().map(|s| s.factsense_id.clone()).collect()
}

/// Group statements into synsets: bucket by claim hash, verify full key
/// equality before any merge, then derive ids from key and policy
/// version. Returns synsets sorted by id plus the statement-to-synset
/// index.
pub fn build_synsets(
    statements: &[FactStatement],
    policy: &NormalizationPolicy,
    build_id: &str,
) -> Result<(Vec<FactSynset>, BTreeMap<String, String>), PolicyError> {
    // claim_hash -> full key -> member indexes. The nested map re-checks
    // full key equality, so hash collisions can never merge.
    let mut buckets: BTreeMap<String, BTreeMap<String, Vec<usize>>> = BTreeMap::new();
    let mut reasons_by_stmt: Vec<Vec<MergeReason>> = Vec::with_capacity(statements.len());
    for (i, stmt) in statements.iter().enumerate() {
        let (key, reasons) = aggregation_key_with_reasons(stmt, policy)?;
        let bucket = claim_hash(&key);
        buckets.entry(bucket).or_default().entry(key).or_default().push(i);
        reasons_by_stmt.push(reasons);
    }

    let mut synsets = Vec::new();
    let mut index = BTreeMap::new();
    for (_, by_key) in buckets {
        for (key, idxs) in by_key {
            let members: Vec<&FactStatement> = idxs.iter().map(|&i| &statements[i]).collect();
            let mut member_ids: Vec<String> =
                members.iter().map(|m| m.statement_id.clone()).collect();
            member_ids.sort();
            let canonical = select_canonical_statement(&members);
            let mut merge_reasons: Vec<MergeReason> = idxs
                .iter()
                .flat_map(|&i| reasons_by_stmt[i].iter().cloned())
                .collect();
            merge_reasons.sort();
            merge_reasons.dedup();
            let aggregate_confidence = members
                .iter()
                .map(|m| m.confidence.clone())
                .max()
                .expect("members nonempty");
            let id_input = alloc::format!(
                "{}{}{}",
                key,
                char::from(UNIT_SEP),
                policy.version
            );
            let synset_id = derive_id(DomainTag::Synset, build_id, &Value::str(id_input))
                .expect("string canonicalizes");
            for m in &member_ids {
                index.insert(m.clone(), synset_id.clone());
            }
            synsets.push(FactSynset {
                synset_id,
                aggregation_key: key,
                members: member_ids,
                canonical_statement_id: canonical.statement_id.clone(),
                canonical_mentions: BTreeMap::new(),
                merge_reasons,
                aggregate_confidence,
            });
        }
    }
    synsets.sort_by(|a, b| a.synset_id.cmp(&b.synset_id));
    Ok((synsets, index))
}

/// Fill per-language canonical mentions from grounded senses.
pub fn attach_canonical_mentions(
    synsets: &mut [FactSynset],
    stmt_to_synset: &BTreeMap<String, String>,
    senses: &[FactSense],
) {
    let mut by_synset_lang: BTreeMap<(String, String), Vec<&FactSense>> = BTreeMap::new();
    for sense in senses {
        if let Some(sid) = stmt_to_synset.get(&sense.statement_id) {
            by_synset_lang
                .entry((sid.clone(), sense.language.clone()))
                .or_default()
                .push(sense);
        }
    }
    let pos: BTreeMap<String, usize> =
        synsets.iter().enumerate().map(|(i, s)| (s.synset_id.clone(), i)).collect();
    for ((sid, lang), group) in by_synset_lang {
        if let Some(&i) = pos.get(&sid) {
            let ranked = select_canonical_mention(&group);
            synsets[i].canonical_mentions.insert(lang, ranked);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounding::{EvidencePointer, Provenance};
    use crate::model::{EntityId, PropertyId, Rank, TimePrecision, TimeValue, TypedValue};
    use crate::policy::{MergeReasonKind, Relaxations};
    use crate::statements::statement_confidence;
    use crate::views::Locator;
    use alloc::vec;

    fn stmt(id: &str, subject: &str, value: TypedValue, rank: Rank, refs: usize) -> FactStatement {
        FactStatement {
            statement_id: id.to_string(),
            subject: EntityId::new(subject).unwrap(),
            property: PropertyId::new("P569").unwrap(),
            value,
            qualifiers: vec![],
            rank,
            references: (0..refs).map(|i| Value::map([("r", Value::int(i as i64))])).collect(),
            last_edit: "2025-11-01T00:00:00Z".to_string(),
            sitelinks: BTreeMap::new(),
            confidence: statement_confidence(rank, refs as u32),
            claim_hash: String::new(),
            synthetic_id: false,
        }
    }

    fn day(y: i64, m: u8, d: u8) -> TypedValue {
        TypedValue::Time(TimeValue::ymd(y, m, d, TimePrecision::Day))
    }

    #[test]
    fn identical_strict_keys_merge_without_reasons() {
        let policy = NormalizationPolicy::default_policy();
        let a = stmt("Q1$a", "Q1", day(1999, 5, 12), Rank::Normal, 0);
        let b = stmt("Q1$b", "Q1", day(1999, 5, 12), Rank::Normal, 1);
        let (synsets, index) = build_synsets(&[a, b], &policy, "B1").unwrap();
        assert_eq!(synsets.len(), 1);
        assert_eq!(synsets[0].members, vec!["Q1$a".to_string(), "Q1$b".to_string()]);
        assert!(synsets[0].merge_reasons.is_empty());
        assert_eq!(index.len(), 2);
        // Aggregate confidence is the max of members.
        assert_eq!(synsets[0].aggregate_confidence.to_string(), "0.75");
    }

    #[test]
    fn relaxed_merge_carries_reason() {
        let mut relax = BTreeMap::new();
        relax.insert(
            PropertyId::new("P569").unwrap(),
            Relaxations { time_precision: Some(TimePrecision::Month), ..Default::default() },
        );
        let policy = NormalizationPolicy::from_parts("relaxed", relax, BTreeMap::new());
        let a = stmt("Q1$a", "Q1", day(1999, 5, 12), Rank::Normal, 0);
        let b = stmt(
            "Q1$b",
            "Q1",
            TypedValue::Time(TimeValue::ymd(1999, 5, 0, TimePrecision::Month)),
            Rank::Normal,
            0,
        );
        let (synsets, _) = build_synsets(&[a, b], &policy, "B1").unwrap();
        assert_eq!(synsets.len(), 1);
        assert_eq!(synsets[0].merge_reasons.len(), 1);
        assert_eq!(synsets[0].merge_reasons[0].kind, MergeReasonKind::TimePrecisionRelax);
    }

    #[test]
    fn different_subjects_never_merge() {
        let policy = NormalizationPolicy::default_policy();
        let a = stmt("Q1$a", "Q1", day(1999, 5, 12), Rank::Normal, 0);
        let b = stmt("Q2$b", "Q2", day(1999, 5, 12), Rank::Normal, 0);
        let (synsets, _) = build_synsets(&[a, b], &policy, "B1").unwrap();
        assert_eq!(synsets.len(), 2);
    }

    #[test]
    fn policy_version_changes_every_synset_id() {
        let p1 = NormalizationPolicy::from_parts("v1", BTreeMap::new(), BTreeMap::new());
        let mut relax = BTreeMap::new();
        relax.insert(PropertyId::new("P9999").unwrap(), Relaxations::default());
        let p2 = NormalizationPolicy::from_parts("v2", relax, BTreeMap::new());
        let stmts = vec![
            stmt("Q1$a", "Q1", day(1999, 5, 12), Rank::Normal, 0),
            stmt("Q2$b", "Q2", day(1980, 1, 1), Rank::Normal, 0),
        ];
        let (s1, _) = build_synsets(&stmts, &p1, "B1").unwrap();
        let (s2, _) = build_synsets(&stmts, &p2, "B1").unwrap();
        // Keys are unchanged (the relaxation touches another property),
        // yet every id moves with the policy version.
        for (a, b) in s1.iter().zip(s2.iter()) {
            assert_ne!(a.synset_id, b.synset_id);
        }
    }

    #[test]
    fn partition_property_every_statement_in_exactly_one_synset() {
        let policy = NormalizationPolicy::default_policy();
        let stmts: Vec<FactStatement> = (0..40)
            .map(|i| {
                stmt(
                    &alloc::format!("Q{}$s{}", i % 7 + 1, i),
                    &alloc::format!("Q{}", i % 7 + 1),
                    day(1900 + (i % 5) as i64, 1, 1),
                    Rank::Normal,
                    0,
                )
            })
            .collect();
        let (synsets, index) = build_synsets(&stmts, &policy, "B1").unwrap();
        let total: usize = synsets.iter().map(|s| s.members.len()).sum();
        assert_eq!(total, stmts.len());
        assert_eq!(index.len(), stmts.len());
        for s in &synsets {
            for m in &s.members {
                assert_eq!(index.get(m), Some(&s.synset_id));
            }
        }
    }

    #[test]
    fn canonical_statement_selection_ladder() {
        let preferred = stmt("Q1$pref", "Q1", day(1999, 5, 12), Rank::Preferred, 0);
        let referenced = stmt("Q1$refs", "Q1", day(1999, 5, 12), Rank::Normal, 3);
        let plain = stmt("Q1$plain", "Q1", day(1999, 5, 12), Rank::Normal, 1);
        // Preferred beats better-referenced normal.
        assert_eq!(
            select_canonical_statement(&[&referenced, &preferred, &plain]).statement_id,
            "Q1$pref"
        );
        // Equal rank: more reference blocks win.
        assert_eq!(
            select_canonical_statement(&[&plain, &referenced]).statement_id,
            "Q1$refs"
        );
        // Full tie: lexicographically smallest id.
        let t1 = stmt("Q1$aa", "Q1", day(1999, 5, 12), Rank::Normal, 1);
        let t2 = stmt("Q1$ab", "Q1", day(1999, 5, 12), Rank::Normal, 1);
        assert_eq!(select_canonical_statement(&[&t2, &t1]).statement_id, "Q1$aa");
        // Later edits outrank earlier ones at equal rank and references.
        let mut newer = stmt("Q1$zz", "Q1", day(1999, 5, 12), Rank::Normal, 1);
        newer.last_edit = "2025-12-01T00:00:00Z".to_string();
        assert_eq!(select_canonical_statement(&[&t1, &newer]).statement_id, "Q1$zz");
    }

    fn sense(id: &str, view: ViewKind, match_type: MatchType, confidence: f64, idx: usize) -> FactSense {
        let locator = match view {
            ViewKind::Sentence => Locator::Sentence { index: idx },
            ViewKind::InfoboxField => {
                Locator::Infobox { template_path: "Infobox person#0".into(), param: alloc::format!("p{}", idx) }
            }
            ViewKind::TableCell => Locator::Table { table: 0, row: idx, col: 0 },
        };
        FactSense {
            factsense_id: id.to_string(),
            statement_id: "Q1$a".to_string(),
            language: "en".to_string(),
            pointer: EvidencePointer {
                page_id: 1,
                revision_id: 10,
                view,
                locator,
                start: 0,
                end: 4,
                norm_id: "n".to_string(),
            },
            sentence: "text".to_string(),
            unit_text: "text here".to_string(),
            match_type,
            confidence,
            provenance: Provenance {
                pack_id: "p".into(),
                tool_version: "0".into(),
                alternatives: vec![],
            },
        }
    }

    #[test]
    fn canonical_mention_ranking() {
        let infobox = sense("f-info", ViewKind::InfoboxField, MatchType::InfoboxField, 0.9, 0);
        let link = sense("f-link", ViewKind::Sentence, MatchType::WikilinkEntity, 0.95, 1);
        let lex = sense("f-lex", ViewKind::Sentence, MatchType::LexicalValue, 0.8, 2);
        // Infobox beats the sentence senses even at lower confidence.
        let ranked = select_canonical_mention(&[&lex, &link, &infobox]);
        assert_eq!(ranked, vec!["f-info".to_string(), "f-link".to_string(), "f-lex".to_string()]);

        // Within sentence units, link-based beats lexical.
        let ranked = select_canonical_mention(&[&lex, &link]);
        assert_eq!(ranked[0], "f-link");

        // Duplicate pointers collapse to a single entry.
        let dup = sense("f-dup", ViewKind::Sentence, MatchType::WikilinkEntity, 0.95, 1);
        let ranked = select_canonical_mention(&[&link, &dup]);
        assert_eq!(ranked.len(), 1);
    }

    #[test]
    fn mentions_attach_per_language() {
        let policy = NormalizationPolicy::default_policy();
        let a = stmt("Q1$a", "Q1", day(1999, 5, 12), Rank::Normal, 0);
        let (mut synsets, index) = build_synsets(&[a], &policy, "B1").unwrap();
        let mut en = sense("f-en", ViewKind::Sentence, MatchType::LexicalValue, 0.8, 0);
        en.language = "en".into();
        let mut de = sense("f-de", ViewKind::Sentence, MatchType::LexicalValue, 0.8, 0);
        de.language = "de".into();
        attach_canonical_mentions(&mut synsets, &index, &[en, de]);
        assert_eq!(synsets[0].canonical_mentions.len(), 2);
        assert_eq!(synsets[0].canonical_mentions["en"], vec!["f-en".to_string()]);
        assert_eq!(synsets[0].canonical_mentions["de"], vec!["f-de".to_string()]);
    }
}
