//! Deterministic corpus diagnostics: language concentration metrics and
//! the grounding attribution funnel. Pure functions of released records,
//! recomputable by third parties from outputs alone.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::canon::Value;

/// Diagnostics over an empty corpus are undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptyCorpus;

impl fmt::Display for EmptyCorpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "empty corpus: no counts to summarize")
    }
}

impl core::error::Error for EmptyCorpus {}

/// Gini coefficient, Shannon entropy (nats) and the effective number of
/// languages `exp(H)` over per-language counts. Zero-count languages
/// participate in the Gini denominator.
pub fn compute_concentration(counts: &[u64]) -> Result<(f64, f64, f64), EmptyCorpus> {
    let total: u64 = counts.iter().sum();
    if counts.is_empty() || total == 0 {
        return Err(EmptyCorpus);
    }
    let k = counts.len() as f64;
    let shares: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let mut abs_diff_sum = 0.0;
    for a in &shares {
        for b in &shares {
            abs_diff_sum += (a - b).abs();
        }
    }
    let gini = abs_diff_sum / (2.0 * k);
    let entropy: f64 =
        shares.iter().filter(|p| **p > 0.0).map(|p| -p * libm::log(*p)).sum();
    let n_eff = libm::exp(entropy);
    Ok((gini, entropy, n_eff))
}

/// One sitelink-conditioned grounding attempt: which funnel stages the
/// (statement, language) candidate survived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunnelRecord {
    pub language: String,
    pub statement_id: String,
    pub page_ok: bool,
    pub units_ok: bool,
    pub matched: bool,
}

impl FunnelRecord {
    pub fn to_canon(&self) -> Value {
        Value::map([
            ("event", Value::str("funnel")),
            ("language", Value::str(self.language.clone())),
            ("statement_id", Value::str(self.statement_id.clone())),
            ("page_ok", Value::Bool(self.page_ok)),
            ("units_ok", Value::Bool(self.units_ok)),
            ("matched", Value::Bool(self.matched)),
        ])
    }

    pub fn from_canon(v: &Value) -> Option<Self> {
        Some(FunnelRecord {
            language: v.get("language")?.as_str()?.to_string(),
            statement_id: v.get("statement_id")?.as_str()?.to_string(),
            page_ok: v.get("page_ok")?.as_bool()?,
            units_ok: v.get("units_ok")?.as_bool()?,
            matched: v.get("matched")?.as_bool()?,
        })
    }
}

/// Retention at the four funnel stages, conditioned on sitelink
/// existence.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FunnelStages {
    pub sitelink: f64,
    pub page_retrieval: f64,
    pub unit_construction: f64,
    pub matching: f64,
}

impl FunnelStages {
    fn to_canon(&self) -> Value {
        Value::map([
            ("sitelink", Value::try_f64(self.sitelink).expect("finite")),
            ("page_retrieval", Value::try_f64(self.page_retrieval).expect("finite")),
            ("unit_construction", Value::try_f64(self.unit_construction).expect("finite")),
            ("matching", Value::try_f64(self.matching).expect("finite")),
        ])
    }
}

/// Funnel retention report: macro (unweighted mean over languages) and
/// micro (candidate-weighted) averages plus the per-language breakdown.
#[derive(Clone, Debug, Default)]
pub struct FunnelReport {
    pub macro_stages: FunnelStages,
    pub micro_stages: FunnelStages,
    pub per_language: BTreeMap<String, FunnelStages>,
    pub candidates: u64,
}

/// Compute per-stage retention from funnel records.
pub fn compute_funnel(records: &[FunnelRecord]) -> FunnelReport {
    #[derive(Default)]
    struct Tally {
        n: u64,
        page: u64,
        units: u64,
        matched: u64,
    }
    let mut by_lang: BTreeMap<String, Tally> = BTreeMap::new();
    for r in records {
        let t = by_lang.entry(r.language.clone()).or_default();
        t.n += 1;
        // Stages are cumulative: a later stage implies the earlier ones.
        let page = r.page_ok;
        let units = page && r.units_ok;
        let matched = units && r.matched;
        t.page += page as u64;
        t.units += units as u64;
        t.matched += matched as u64;
    }
    let stages = |t: &Tally| {
        if t.n == 0 {
            FunnelStages::default()
        } else {
            FunnelStages {
                sitelink: 1.0,
                page_retrieval: t.page as f64 / t.n as f64,
                unit_construction: t.units as f64 / t.n as f64,
                matching: t.matched as f64 / t.n as f64,
            }
        }
    };
    let per_language: BTreeMap<String, FunnelStages> =
        by_lang.iter().map(|(l, t)| (l.clone(), stages(t))).collect();
    let langs = per_language.len() as f64;
    let macro_stages = if langs == 0.0 {
        FunnelStages::default()
    } else {
        FunnelStages {
            sitelink: 1.0,
            page_retrieval: per_language.values().map(|s| s.page_retrieval).sum::<f64>() / langs,
            unit_construction: per_language.values().map(|s| s.unit_construction).sum::<f64>()
                / langs,
            matching: per_language.values().map(|s| s.matching).sum::<f64>() / langs,
        }
    };
    let total = Tally {
        n: by_lang.values().map(|t| t.n).sum(),
        page: by_lang.values().map(|t| t.page).sum(),
        units: by_lang.values().map(|t| t.units).sum(),
        matched: by_lang.values().map(|t| t.matched).sum(),
    };
    FunnelReport {
        macro_stages,
        micro_stages: stages(&total),
        per_language,
        candidates: total.n,
    }
}

/// The full diagnostics report over released shards.
#[derive(Clone, Debug)]
pub struct DiagnosticsReport {
    pub sense_counts: BTreeMap<String, u64>,
    pub shares: BTreeMap<String, f64>,
    pub gini: f64,
    pub entropy: f64,
    pub n_eff: f64,
    pub funnel: FunnelReport,
    pub synset_size_histogram: BTreeMap<u64, u64>,
    pub ungrounded_reasons: BTreeMap<String, u64>,
}

impl DiagnosticsReport {
    pub fn compute(
        sense_counts: BTreeMap<String, u64>,
        funnel_records: &[FunnelRecord],
        synset_sizes: &[u64],
        ungrounded_reasons: BTreeMap<String, u64>,
    ) -> Result<Self, EmptyCorpus> {
        let counts: Vec<u64> = sense_counts.values().copied().collect();
        let (gini, entropy, n_eff) = compute_concentration(&counts)?;
        let total: u64 = counts.iter().sum();
        let shares = sense_counts
            .iter()
            .map(|(l, &c)| (l.clone(), c as f64 / total as f64))
            .collect();
        let mut synset_size_histogram: BTreeMap<u64, u64> = BTreeMap::new();
        for &size in synset_sizes {
            *synset_size_histogram.entry(size).or_insert(0) += 1;
        }
        Ok(DiagnosticsReport {
            sense_counts,
            shares,
            gini,
            entropy,
            n_eff,
            funnel: compute_funnel(funnel_records),
            synset_size_histogram,
            ungrounded_reasons,
        })
    }

    pub fn to_canon(&self) -> Value {
        let counts: BTreeMap<String, Value> = self
            .sense_counts
            .iter()
            .map(|(l, &c)| (l.clone(), Value::int(c as i64)))
            .collect();
        let shares: BTreeMap<String, Value> = self
            .shares
            .iter()
            .map(|(l, &s)| (l.clone(), Value::try_f64(s).expect("finite")))
            .collect();
        let hist: BTreeMap<String, Value> = self
            .synset_size_histogram
            .iter()
            .map(|(size, &n)| (size.to_string(), Value::int(n as i64)))
            .collect();
        let reasons: BTreeMap<String, Value> = self
            .ungrounded_reasons
            .iter()
            .map(|(code, &n)| (code.clone(), Value::int(n as i64)))
            .collect();
        let per_lang: BTreeMap<String, Value> = self
            .funnel
            .per_language
            .iter()
            .map(|(l, s)| (l.clone(), s.to_canon()))
            .collect();
        Value::map([
            ("sense_counts", Value::Map(counts)),
            ("shares", Value::Map(shares)),
            ("gini", Value::try_f64(self.gini).expect("finite")),
            ("entropy", Value::try_f64(self.entropy).expect("finite")),
            ("n_eff", Value::try_f64(self.n_eff).expect("finite")),
            (
                "funnel",
                Value::map([
                    ("macro", self.funnel.macro_stages.to_canon()),
                    ("micro", self.funnel.micro_stages.to_canon()),
                    ("per_language", Value::Map(per_lang)),
                    ("candidates", Value::int(self.funnel.candidates as i64)),
                ]),
            ),
            ("synset_size_histogram", Value::Map(hist)),
            ("ungrounded_reasons", Value::Map(reasons)),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const EPS: f64 = 1e-12;

    #[test]
    fn uniform_distribution_closed_forms() {
        for k in [2usize, 5, 16] {
            let counts: Vec<u64> = core::iter::repeat(7).take(k).collect();
            let (gini, _h, n_eff) = compute_concentration(&counts).unwrap();
            assert!(gini.abs() < EPS);
            assert!((n_eff - k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn single_language_closed_forms() {
        // One language holds everything among k slots.
        let counts = [100u64, 0, 0, 0];
        let (gini, h, n_eff) = compute_concentration(&counts).unwrap();
        let k = 4.0;
        assert!((gini - (k - 1.0) / k).abs() < EPS);
        assert!(h.abs() < EPS);
        assert!((n_eff - 1.0).abs() < EPS);
    }

    #[test]
    fn half_quarter_quarter_entropy() {
        // Shares {0.5, 0.25, 0.25}: H = 1.5 ln 2, N_eff = 2^1.5.
        let counts = [2u64, 1, 1];
        let (_gini, h, n_eff) = compute_concentration(&counts).unwrap();
        let expected_h = 1.5 * core::f64::consts::LN_2;
        assert!((h - expected_h).abs() < EPS);
        assert!((n_eff - libm::exp(expected_h)).abs() < EPS);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert_eq!(compute_concentration(&[]), Err(EmptyCorpus));
        assert_eq!(compute_concentration(&[0, 0]), Err(EmptyCorpus));
    }

    fn rec(lang: &str, id: &str, page: bool, units: bool, matched: bool) -> FunnelRecord {
        FunnelRecord {
            language: lang.to_string(),
            statement_id: id.to_string(),
            page_ok: page,
            units_ok: units,
            matched,
        }
    }

    #[test]
    fn funnel_all_stages_succeed() {
        let records = vec![rec("en", "s1", true, true, true), rec("en", "s2", true, true, true)];
        let report = compute_funnel(&records);
        assert_eq!(report.micro_stages.sitelink, 1.0);
        assert_eq!(report.micro_stages.page_retrieval, 1.0);
        assert_eq!(report.micro_stages.unit_construction, 1.0);
        assert_eq!(report.micro_stages.matching, 1.0);
    }

    #[test]
    fn funnel_partial_losses() {
        let records = vec![rec("en", "s1", true, true, true), rec("en", "s2", false, false, false)];
        let report = compute_funnel(&records);
        assert_eq!(report.micro_stages.page_retrieval, 0.5);
        assert_eq!(report.micro_stages.matching, 0.5);
    }

    #[test]
    fn macro_and_micro_diverge_on_unequal_volumes() {
        // en: 4 candidates, all matched. de: 1 candidate, unmatched.
        let mut records: Vec<FunnelRecord> =
            (0..4).map(|i| rec("en", &alloc::format!("s{}", i), true, true, true)).collect();
        records.push(rec("de", "d0", true, true, false));
        let report = compute_funnel(&records);
        // Hand-computed: macro matching = (1.0 + 0.0) / 2; micro = 4/5.
        assert!((report.macro_stages.matching - 0.5).abs() < EPS);
        assert!((report.micro_stages.matching - 0.8).abs() < EPS);
    }

    #[test]
    fn funnel_round_trips_through_canon() {
        let r = rec("fr", "s9", true, false, false);
        let v = r.to_canon();
        assert_eq!(FunnelRecord::from_canon(&v).unwrap(), r);
    }

    #[test]
    fn report_shares_sum_to_one() {
        let mut counts = BTreeMap::new();
        counts.insert("en".to_string(), 6u64);
        counts.insert("de".to_string(), 3u64);
        counts.insert("fr".to_string(), 1u64);
        let report = DiagnosticsReport::compute(counts, &[], &[1, 1, 2], BTreeMap::new()).unwrap();
        let sum: f64 = report.shares.values().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!((report.n_eff - libm::exp(report.entropy)).abs() < EPS);
        assert_eq!(report.synset_size_histogram[&1], 2);
        assert_eq!(report.synset_size_histogram[&2], 1);
    }
}
