//! Closed-context fact checking: deterministic claim generation from
//! synsets with snapshot-verified labels, and the metric suite
//! (accuracy, macro F1, evidence Recall@5, span F1).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::canon::{canon_serialize, Value};
use crate::grounding::EvidencePointer;
use crate::ids::sha1_hex;
use crate::rng::SplitMix64;
use crate::views::{cp_len, ViewKind};

use super::split::Split;

/// Veracity labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MfcLabel {
    Supported,
    Refuted,
    Nei,
}

impl MfcLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            MfcLabel::Supported => "Supported",
            MfcLabel::Refuted => "Refuted",
            MfcLabel::Nei => "NEI",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Supported" => Some(MfcLabel::Supported),
            "Refuted" => Some(MfcLabel::Refuted),
            "NEI" => Some(MfcLabel::Nei),
            _ => None,
        }
    }
}

/// One gold evidence unit with its character spans and normalized text.
#[derive(Clone, Debug, PartialEq)]
pub struct GoldEvidence {
    pub pointer: EvidencePointer,
    /// Half-open codepoint spans into the unit text.
    pub spans: Vec<(usize, usize)>,
    pub unit_text: String,
}

/// A generated claim.
#[derive(Clone, Debug)]
pub struct MfcClaim {
    pub claim_id: String,
    pub language: String,
    pub text: String,
    pub label: MfcLabel,
    pub source_synset_id: String,
    /// Verifiable labels carry at least one gold unit; NEI carries none.
    pub gold_evidence: Vec<GoldEvidence>,
    pub split: Split,
}

/// A claim stratum could not be filled; reported, never padded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationStarved {
    pub label: &'static str,
    pub missing: usize,
}

impl fmt::Display for GenerationStarved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "claim stratum {} short by {}", self.label, self.missing)
    }
}

impl core::error::Error for GenerationStarved {}

/// Everything claim generation needs to know about one candidate
/// (synset, language) pair.
#[derive(Clone, Debug)]
pub struct ClaimSource {
    pub synset_id: String,
    pub split: Split,
    pub language: String,
    /// Realized surface forms from snapshot labels.
    pub subject_surface: String,
    pub property_surface: String,
    pub value_surface: String,
    /// Normalized value, for exact-value verification.
    pub norm_value: String,
    /// Gold evidence for the true synset in this language.
    pub evidence: Vec<GoldEvidence>,
    /// Conflicting values from POTENTIAL_CONFLICT partners:
    /// (surface form, normalized value).
    pub conflict_values: Vec<(String, String)>,
    /// Same-datatype value pool for swaps: (surface, normalized).
    pub swap_pool: Vec<(String, String)>,
    /// Normalized values supported for this (subject, property) in the
    /// snapshot, for verifying that a swapped claim is unsupported.
    pub supported_values: BTreeSet<String>,
    /// Exact-value retrieval probe: normalized values of every literal
    /// and link found in the subject's evidence units.
    pub unit_values: BTreeSet<String>,
}

/// One declarative template per language; the value slot is filled with
/// the (possibly swapped) surface form.
pub fn realize_claim(language: &str, subject: &str, property: &str, value: &str) -> String {
    match language {
        "de" => alloc::format!("{} von {} ist {}.", property, subject, value),
        "fr" => alloc::format!("{} de {} est {}.", property, subject, value),
        "zh" => alloc::format!("{}的{}是{}。", subject, property, value),
        _ => alloc::format!("The {} of {} is {}.", property, subject, value),
    }
}

fn claim_id(label: MfcLabel, source: &ClaimSource, text: &str) -> String {
    let seed = Value::map([
        ("label", Value::str(label.as_str())),
        ("language", Value::str(source.language.clone())),
        ("synset", Value::str(source.synset_id.clone())),
        ("text", Value::str(text.to_string())),
    ]);
    sha1_hex(&[b"mfc:".as_slice(), &canon_serialize(&seed)].concat())
}

fn supported_claim(source: &ClaimSource) -> Option<MfcClaim> {
    if source.evidence.is_empty() {
        return None;
    }
    let text = realize_claim(
        &source.language,
        &source.subject_surface,
        &source.property_surface,
        &source.value_surface,
    );
    Some(MfcClaim {
        claim_id: claim_id(MfcLabel::Supported, source, &text),
        language: source.language.clone(),
        text,
        label: MfcLabel::Supported,
        source_synset_id: source.synset_id.clone(),
        gold_evidence: source.evidence.clone(),
        split: source.split,
    })
}

/// A refuted claim swaps in a conflicting value, preferring an actual
/// conflict partner, else a same-datatype sample verified unsupported in
/// the snapshot. Gold evidence is the true synset's evidence, which
/// contradicts the claim.
fn refuted_claim(source: &ClaimSource, rng: &mut SplitMix64) -> Option<MfcClaim> {
    if source.evidence.is_empty() {
        return None;
    }
    let swap = source
        .conflict_values
        .iter()
        .find(|(_, norm)| norm != &source.norm_value)
        .cloned()
        .or_else(|| {
            let candidates: Vec<&(String, String)> = source
                .swap_pool
                .iter()
                .filter(|(_, norm)| {
                    norm != &source.norm_value && !source.supported_values.contains(norm)
                })
                .collect();
            if candidates.is_empty() {
                None
            } else {
                Some(candidates[rng.below(candidates.len() as u64) as usize].clone())
            }
        })?;
    let text = realize_claim(
        &source.language,
        &source.subject_surface,
        &source.property_surface,
        &swap.0,
    );
    Some(MfcClaim {
        claim_id: claim_id(MfcLabel::Refuted, source, &text),
        language: source.language.clone(),
        text,
        label: MfcLabel::Refuted,
        source_synset_id: source.synset_id.clone(),
        gold_evidence: source.evidence.clone(),
        split: source.split,
    })
}

/// An NEI claim injects a datatype-valid value with verified absence of
/// any exact-value match: the value is supported nowhere for the pair
/// and datatype-aware retrieval over the subject's units finds nothing.
fn nei_claim(source: &ClaimSource, rng: &mut SplitMix64) -> Option<MfcClaim> {
    let candidates: Vec<&(String, String)> = source
        .swap_pool
        .iter()
        .filter(|(_, norm)| {
            norm != &source.norm_value
                && !source.supported_values.contains(norm)
                && !source.unit_values.contains(norm)
        })
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let pick = candidates[rng.below(candidates.len() as u64) as usize].clone();
    let text = realize_claim(
        &source.language,
        &source.subject_surface,
        &source.property_surface,
        &pick.0,
    );
    Some(MfcClaim {
        claim_id: claim_id(MfcLabel::Nei, source, &text),
        language: source.language.clone(),
        text,
        label: MfcLabel::Nei,
        source_synset_id: source.synset_id.clone(),
        gold_evidence: Vec::new(),
        split: source.split,
    })
}

/// Generate a label-balanced claim set. Sources are consumed in sorted
/// (synset, language) order; the per-claim sampling seed derives from
/// content, so the output is a pure function of the inputs. A stratum
/// that cannot be filled is reported via `GenerationStarved`.
pub fn generate_mfc_claims(
    sources: &[ClaimSource],
    total: usize,
    ratio: (f64, f64, f64),
) -> Result<Vec<MfcClaim>, GenerationStarved> {
    let mut ordered: Vec<&ClaimSource> = sources.iter().collect();
    ordered.sort_by(|a, b| {
        (&a.synset_id, &a.language).cmp(&(&b.synset_id, &b.language))
    });

    let targets = [
        (MfcLabel::Supported, libm::round(total as f64 * ratio.0) as usize),
        (MfcLabel::Refuted, libm::round(total as f64 * ratio.1) as usize),
        (MfcLabel::Nei, total.saturating_sub(
            libm::round(total as f64 * ratio.0) as usize + libm::round(total as f64 * ratio.1) as usize,
        )),
    ];
    let mut claims: Vec<MfcClaim> = Vec::with_capacity(total);
    let mut assigned = [0usize; 3];
    // Round-robin over labels by largest remaining deficit keeps the
    // stream balanced even when generation ends early.
    let mut cursor = [0usize; 3];
    loop {
        let mut best: Option<usize> = None;
        let mut best_deficit = 0i64;
        for (i, (_, target)) in targets.iter().enumerate() {
            let deficit = *target as i64 - assigned[i] as i64;
            if deficit > best_deficit {
                best_deficit = deficit;
                best = Some(i);
            }
        }
        let Some(label_idx) = best else { break };
        let label = targets[label_idx].0;
        let mut made = None;
        while cursor[label_idx] < ordered.len() {
            let source = ordered[cursor[label_idx]];
            cursor[label_idx] += 1;
            let mut rng = SplitMix64::from_bytes(
                alloc::format!("{}:{}:{}", label.as_str(), source.synset_id, source.language)
                    .as_bytes(),
            );
            made = match label {
                MfcLabel::Supported => supported_claim(source),
                MfcLabel::Refuted => refuted_claim(source, &mut rng),
                MfcLabel::Nei => nei_claim(source, &mut rng),
            };
            if made.is_some() {
                break;
            }
        }
        match made {
            Some(c) => {
                claims.push(c);
                assigned[label_idx] += 1;
            }
            None => {
                return Err(GenerationStarved {
                    label: label.as_str(),
                    missing: targets[label_idx].1 - assigned[label_idx],
                });
            }
        }
    }
    claims.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    Ok(claims)
}

/// One system prediction: a label plus ranked evidence pointers with
/// optional spans.
#[derive(Clone, Debug)]
pub struct MfcPrediction {
    pub claim_id: String,
    pub label: MfcLabel,
    pub evidence: Vec<(EvidencePointer, Vec<(usize, usize)>)>,
}

/// Metric suite output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MfcScores {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub recall_at_5: f64,
    pub span_f1: f64,
    pub claims: usize,
    pub verifiable: usize,
}

fn unit_key(p: &EvidencePointer) -> (u64, u64, ViewKind, crate::views::Locator, String) {
    (p.page_id, p.revision_id, p.view, p.locator.clone(), p.norm_id.clone())
}

/// Whitespace tokens of a normalized unit string as codepoint intervals.
fn tokens(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, i));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, cp_len(text)));
    }
    out
}

fn span_tokens(text: &str, spans: &[(usize, usize)]) -> BTreeSet<usize> {
    let toks = tokens(text);
    let mut out = BTreeSet::new();
    for &(b, e) in spans {
        for (ti, &(ts, te)) in toks.iter().enumerate() {
            if b < te && e > ts {
                out.insert(ti);
            }
        }
    }
    out
}

fn token_f1(pred: &BTreeSet<usize>, gold: &BTreeSet<usize>) -> f64 {
    if gold.is_empty() {
        return if pred.is_empty() { 1.0 } else { 0.0 };
    }
    if pred.is_empty() {
        return 0.0;
    }
    let inter = pred.intersection(gold).count() as f64;
    if inter == 0.0 {
        return 0.0;
    }
    let p = inter / pred.len() as f64;
    let r = inter / gold.len() as f64;
    2.0 * p * r / (p + r)
}

/// Score predictions against gold claims. Recall@5 and span F1 run over
/// verifiable instances only; a missing prediction counts as a wrong
/// label and empty evidence.
pub fn mfc_metrics(predictions: &[MfcPrediction], gold: &[MfcClaim]) -> MfcScores {
    if gold.is_empty() {
        return MfcScores::default();
    }
    let by_id: BTreeMap<&str, &MfcPrediction> =
        predictions.iter().map(|p| (p.claim_id.as_str(), p)).collect();

    let mut correct = 0usize;
    // Per-label true positives, predicted counts, gold counts.
    let mut tp = BTreeMap::new();
    let mut pred_count = BTreeMap::new();
    let mut gold_count = BTreeMap::new();
    let mut recall_hits = 0usize;
    let mut span_sum = 0.0;
    let mut verifiable = 0usize;

    for claim in gold {
        *gold_count.entry(claim.label).or_insert(0usize) += 1;
        let pred = by_id.get(claim.claim_id.as_str());
        if let Some(p) = pred {
            *pred_count.entry(p.label).or_insert(0usize) += 1;
            if p.label == claim.label {
                correct += 1;
                *tp.entry(claim.label).or_insert(0usize) += 1;
            }
        }
        if claim.label == MfcLabel::Nei {
            continue;
        }
        verifiable += 1;
        let Some(p) = pred else { continue };

        // Recall@5: any of the top five predicted unit pointers matches
        // any gold unit pointer.
        let gold_units: BTreeSet<_> =
            claim.gold_evidence.iter().map(|g| unit_key(&g.pointer)).collect();
        let hit =
            p.evidence.iter().take(5).any(|(ptr, _)| gold_units.contains(&unit_key(ptr)));
        recall_hits += hit as usize;

        // Span F1: token-level within pointer-matched units, maximized
        // over matched units; 0 when nothing matches or spans are
        // omitted.
        let mut best = 0.0f64;
        for g in &claim.gold_evidence {
            let gk = unit_key(&g.pointer);
            for (ptr, spans) in &p.evidence {
                if unit_key(ptr) != gk || spans.is_empty() {
                    continue;
                }
                let gold_toks = span_tokens(&g.unit_text, &g.spans);
                let pred_toks = span_tokens(&g.unit_text, spans);
                best = best.max(token_f1(&pred_toks, &gold_toks));
            }
        }
        span_sum += best;
    }

    let labels = [MfcLabel::Supported, MfcLabel::Refuted, MfcLabel::Nei];
    let mut f1_sum = 0.0;
    for label in labels {
        let tp = *tp.get(&label).unwrap_or(&0) as f64;
        let p_n = *pred_count.get(&label).unwrap_or(&0) as f64;
        let g_n = *gold_count.get(&label).unwrap_or(&0) as f64;
        let precision = if p_n > 0.0 { tp / p_n } else { 0.0 };
        let recall = if g_n > 0.0 { tp / g_n } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        f1_sum += f1;
    }

    MfcScores {
        accuracy: correct as f64 / gold.len() as f64,
        macro_f1: f1_sum / labels.len() as f64,
        recall_at_5: if verifiable > 0 { recall_hits as f64 / verifiable as f64 } else { 0.0 },
        span_f1: if verifiable > 0 { span_sum / verifiable as f64 } else { 0.0 },
        claims: gold.len(),
        verifiable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::views::Locator;
    use alloc::vec;

    fn pointer(idx: usize) -> EvidencePointer {
        EvidencePointer {
            page_id: 1,
            revision_id: 10,
            view: ViewKind::Sentence,
            locator: Locator::Sentence { index: idx },
            start: 0,
            end: 4,
            norm_id: "n".to_string(),
        }
    }

    fn gold_unit(idx: usize, text: &str, spans: Vec<(usize, usize)>) -> GoldEvidence {
        GoldEvidence { pointer: pointer(idx), spans, unit_text: text.to_string() }
    }

    fn source(i: usize, conflicts: bool) -> ClaimSource {
        ClaimSource {
            synset_id: alloc::format!("syn-{:04}", i),
            split: Split::Train,
            language: "en".to_string(),
            subject_surface: alloc::format!("Subject{}", i),
            property_surface: "birth date".to_string(),
            value_surface: "1999-05-12".to_string(),
            norm_value: "1999-05-12/prec11".to_string(),
            evidence: vec![gold_unit(i, "born on 12 May 1999 here", vec![(8, 19)])],
            conflict_values: if conflicts {
                vec![("1981-01-01".to_string(), "1981-01-01/prec11".to_string())]
            } else {
                vec![]
            },
            swap_pool: vec![
                ("1970-02-03".to_string(), "1970-02-03/prec11".to_string()),
                ("1960-04-05".to_string(), "1960-04-05/prec11".to_string()),
                ("1950-06-07".to_string(), "1950-06-07/prec11".to_string()),
            ],
            supported_values: BTreeSet::from(["1999-05-12/prec11".to_string()]),
            unit_values: BTreeSet::from(["1999-05-12/prec11".to_string()]),
        }
    }

    #[test]
    fn label_ratio_on_large_fixture() {
        let sources: Vec<ClaimSource> = (0..4000).map(|i| source(i, i % 3 == 0)).collect();
        let claims = generate_mfc_claims(&sources, 3000, (0.34, 0.33, 0.33)).unwrap();
        assert_eq!(claims.len(), 3000);
        let count = |l: MfcLabel| claims.iter().filter(|c| c.label == l).count() as f64 / 3000.0;
        assert!((count(MfcLabel::Supported) - 0.34).abs() <= 0.02);
        assert!((count(MfcLabel::Refuted) - 0.33).abs() <= 0.02);
        assert!((count(MfcLabel::Nei) - 0.33).abs() <= 0.02);
        // Deterministic regeneration.
        let again = generate_mfc_claims(&sources, 3000, (0.34, 0.33, 0.33)).unwrap();
        assert_eq!(claims.len(), again.len());
        assert!(claims.iter().zip(again.iter()).all(|(a, b)| a.claim_id == b.claim_id));
    }

    #[test]
    fn refuted_prefers_conflict_partner_and_keeps_true_evidence() {
        let src = source(1, true);
        let mut rng = SplitMix64::new(1);
        let claim = refuted_claim(&src, &mut rng).unwrap();
        assert!(claim.text.contains("1981-01-01"));
        assert_eq!(claim.gold_evidence, src.evidence);
    }

    #[test]
    fn nei_claims_verify_absence() {
        let mut src = source(1, false);
        // Poison the retrieval probe with every swap value: no NEI claim
        // can be built.
        for (_, norm) in &src.swap_pool.clone() {
            src.unit_values.insert(norm.clone());
        }
        let mut rng = SplitMix64::new(1);
        assert!(nei_claim(&src, &mut rng).is_none());

        let clean = source(2, false);
        let mut rng = SplitMix64::new(1);
        let claim = nei_claim(&clean, &mut rng).unwrap();
        assert!(claim.gold_evidence.is_empty());
        assert!(!clean.unit_values.contains(&claim.text));
    }

    #[test]
    fn starvation_is_reported_not_padded() {
        // No conflict partners and a fully poisoned pool: Refuted and
        // NEI both starve.
        let mut src = source(1, false);
        src.swap_pool.clear();
        let err = generate_mfc_claims(&[src], 3, (0.34, 0.33, 0.33)).unwrap_err();
        assert!(err.missing > 0);
    }

    fn claim(id: &str, label: MfcLabel, evidence: Vec<GoldEvidence>) -> MfcClaim {
        MfcClaim {
            claim_id: id.to_string(),
            language: "en".to_string(),
            text: "claim".to_string(),
            label,
            source_synset_id: "syn".to_string(),
            gold_evidence: evidence,
            split: Split::Test,
        }
    }

    #[test]
    fn recall_at_5_rank_boundary() {
        let gold = vec![claim(
            "c1",
            MfcLabel::Supported,
            vec![gold_unit(0, "born on 12 May 1999 here", vec![(8, 19)])],
        )];
        // Correct pointer at rank 5 counts.
        let mut evidence: Vec<(EvidencePointer, Vec<(usize, usize)>)> =
            (1..5).map(|i| (pointer(i), vec![])).collect();
        evidence.push((pointer(0), vec![]));
        let at5 = MfcPrediction { claim_id: "c1".into(), label: MfcLabel::Supported, evidence };
        let scores = mfc_metrics(&[at5], &gold);
        assert_eq!(scores.recall_at_5, 1.0);

        // At rank 6 it does not.
        let mut evidence: Vec<(EvidencePointer, Vec<(usize, usize)>)> =
            (1..6).map(|i| (pointer(i), vec![])).collect();
        evidence.push((pointer(0), vec![]));
        let at6 = MfcPrediction { claim_id: "c1".into(), label: MfcLabel::Supported, evidence };
        let scores = mfc_metrics(&[at6], &gold);
        assert_eq!(scores.recall_at_5, 0.0);
    }

    #[test]
    fn span_f1_conventions() {
        let unit = "born on 12 May 1999 here";
        let gold = vec![claim("c1", MfcLabel::Supported, vec![gold_unit(0, unit, vec![(8, 19)])])];
        // Identical spans: 1.0.
        let exact = MfcPrediction {
            claim_id: "c1".into(),
            label: MfcLabel::Supported,
            evidence: vec![(pointer(0), vec![(8, 19)])],
        };
        assert_eq!(mfc_metrics(&[exact], &gold).span_f1, 1.0);

        // Omitted spans: 0.
        let no_spans = MfcPrediction {
            claim_id: "c1".into(),
            label: MfcLabel::Supported,
            evidence: vec![(pointer(0), vec![])],
        };
        assert_eq!(mfc_metrics(&[no_spans], &gold).span_f1, 0.0);

        // Wrong unit: 0.
        let wrong_unit = MfcPrediction {
            claim_id: "c1".into(),
            label: MfcLabel::Supported,
            evidence: vec![(pointer(3), vec![(8, 19)])],
        };
        assert_eq!(mfc_metrics(&[wrong_unit], &gold).span_f1, 0.0);

        // Partial overlap: "12 May 1999" is tokens 2..5; predicting just
        // "12" gives P=1, R=1/3, F1=0.5.
        let partial = MfcPrediction {
            claim_id: "c1".into(),
            label: MfcLabel::Supported,
            evidence: vec![(pointer(0), vec![(8, 10)])],
        };
        assert!((mfc_metrics(&[partial], &gold).span_f1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn accuracy_and_macro_f1() {
        let gold = vec![
            claim("c1", MfcLabel::Supported, vec![gold_unit(0, "u", vec![(0, 1)])]),
            claim("c2", MfcLabel::Refuted, vec![gold_unit(1, "u", vec![(0, 1)])]),
            claim("c3", MfcLabel::Nei, vec![]),
        ];
        let preds = vec![
            MfcPrediction { claim_id: "c1".into(), label: MfcLabel::Supported, evidence: vec![] },
            MfcPrediction { claim_id: "c2".into(), label: MfcLabel::Nei, evidence: vec![] },
            MfcPrediction { claim_id: "c3".into(), label: MfcLabel::Nei, evidence: vec![] },
        ];
        let scores = mfc_metrics(&preds, &gold);
        assert!((scores.accuracy - 2.0 / 3.0).abs() < 1e-12);
        // Supported: P=1, R=1 -> F1 1. Refuted: no predictions -> 0.
        // NEI: P=0.5, R=1 -> F1 2/3. Macro = (1 + 0 + 2/3) / 3.
        assert!((scores.macro_f1 - (1.0 + 0.0 + 2.0 / 3.0) / 3.0).abs() < 1e-12);
        assert_eq!(scores.verifiable, 2);
    }

    #[test]
    fn token_f1_empty_gold_conventions() {
        let empty: BTreeSet<usize> = BTreeSet::new();
        let some: BTreeSet<usize> = [1].into();
        assert_eq!(token_f1(&empty, &empty), 1.0);
        assert_eq!(token_f1(&some, &empty), 0.0);
        assert_eq!(token_f1(&empty, &some), 0.0);
    }
}
