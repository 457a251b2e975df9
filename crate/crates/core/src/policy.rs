//! The versioned normalization policy: value and qualifier normalization,
//! aggregation keys, claim hashes and merge-reason emission.
//!
//! The default policy authorizes zero relaxations, so normalization is a
//! verbatim canonical rendering (NFC and trim on strings aside) and no
//! merge reason is ever emitted. Relaxations are gated per property and
//! every relaxation that actually changes a value emits a structured
//! reason.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use unicode_normalization::{is_nfc, UnicodeNormalization};

use crate::canon::{canon_serialize, canon_string, Value};
use crate::decimal::Decimal;
use crate::ids::{join_key, sha256_hex};
use crate::model::{FactStatement, PropertyId, TimePrecision, TypedValue, CALENDAR_GREGORIAN};

/// Reserved constants for valueless snaks; the leading NUL guarantees no
/// collision with literal text.
pub const NOVALUE_CONST: &str = "\u{0000}NOVALUE";
pub const SOMEVALUE_CONST: &str = "\u{0000}SOMEVALUE";

/// The kinds of policy relaxation that can authorize a non-strict merge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MergeReasonKind {
    TimePrecisionRelax,
    UnitConvert,
    CoordRound,
    StringCanon,
}

impl MergeReasonKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MergeReasonKind::TimePrecisionRelax => "TIME_PRECISION_RELAX",
            MergeReasonKind::UnitConvert => "UNIT_CONVERT",
            MergeReasonKind::CoordRound => "COORD_ROUND",
            MergeReasonKind::StringCanon => "STRING_CANON",
        }
    }
}

/// A machine-readable token recording which relaxation changed a value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MergeReason {
    pub kind: MergeReasonKind,
    pub detail: String,
}

impl MergeReason {
    pub fn to_canon(&self) -> Value {
        Value::map([
            ("kind", Value::str(self.kind.as_str())),
            ("detail", Value::str(self.detail.clone())),
        ])
    }
}

/// Per-property relaxation allowlist entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Relaxations {
    /// Truncate finer time values to this precision.
    pub time_precision: Option<TimePrecision>,
    /// Convert quantities to the canonical unit from the unit table.
    pub unit_convert: bool,
    /// Round coordinates to this many decimal places.
    pub coord_round: Option<u32>,
    /// Case-fold string values (dormant in the shipped policy).
    pub string_fold: bool,
}

/// Exact conversion into a canonical unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitConversion {
    pub canonical_unit: String,
    /// Exact decimal factor; only units with exact decimal factors are
    /// eligible for conversion.
    pub factor: Decimal,
}

/// The versioned normalization policy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationPolicy {
    /// `label+<sha256 of canonical content>`; the suffix is recomputable
    /// from the content.
    pub version: String,
    pub label: String,
    pub relaxations: BTreeMap<PropertyId, Relaxations>,
    pub unit_table: BTreeMap<String, UnitConversion>,
}

/// Policy application failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicyError {
    /// A unit conversion was authorized for the property but the unit has
    /// no table entry.
    MissingUnitConversion { property: String, unit: String },
    /// Policy file content did not match the expected schema.
    BadPolicy(String),
}

impl fmt::Display for PolicyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyError::MissingUnitConversion { property, unit } => write!(
                f,
                "unit conversion requested for {} but unit {} has no table entry",
                property, unit
            ),
            PolicyError::BadPolicy(msg) => write!(f, "invalid policy: {}", msg),
        }
    }
}

impl core::error::Error for PolicyError {}

fn nfc_trim(s: &str) -> String {
    let t = s.trim();
    if is_nfc(t) {
        t.to_string()
    } else {
        t.nfc().collect()
    }
}

impl NormalizationPolicy {
    /// The conservative default: no relaxations, empty unit table.
    pub fn default_policy() -> Self {
        Self::from_parts("default", BTreeMap::new(), BTreeMap::new())
    }

    pub fn from_parts(
        label: &str,
        relaxations: BTreeMap<PropertyId, Relaxations>,
        unit_table: BTreeMap<String, UnitConversion>,
    ) -> Self {
        let mut policy = NormalizationPolicy {
            version: String::new(),
            label: label.to_string(),
            relaxations,
            unit_table,
        };
        policy.version = alloc::format!("{}+{}", policy.label, policy.content_hash());
        policy
    }

    /// SHA-256 of the canonical policy content; equals the version suffix.
    pub fn content_hash(&self) -> String {
        sha256_hex(&canon_serialize(&self.body_canon()))
    }

    fn body_canon(&self) -> Value {
        let relax: BTreeMap<String, Value> = self
            .relaxations
            .iter()
            .map(|(p, r)| {
                let mut fields: Vec<(&'static str, Value)> = Vec::new();
                if let Some(tp) = r.time_precision {
                    fields.push(("time_precision", Value::int(tp.level() as i64)));
                }
                if r.unit_convert {
                    fields.push(("unit_convert", Value::Bool(true)));
                }
                if let Some(dp) = r.coord_round {
                    fields.push(("coord_round", Value::int(dp as i64)));
                }
                if r.string_fold {
                    fields.push(("string_fold", Value::Bool(true)));
                }
                (p.as_str().to_string(), Value::map(fields))
            })
            .collect();
        let units: BTreeMap<String, Value> = self
            .unit_table
            .iter()
            .map(|(u, conv)| {
                (
                    u.clone(),
                    Value::map([
                        ("canonical_unit", Value::str(conv.canonical_unit.clone())),
                        ("factor", Value::Num(conv.factor.clone())),
                    ]),
                )
            })
            .collect();
        Value::map([
            ("label", Value::str(self.label.clone())),
            ("relaxations", Value::Map(relax)),
            ("unit_table", Value::Map(units)),
        ])
    }

    pub fn to_canon(&self) -> Value {
        self.body_canon()
    }

    /// Load a policy from parsed canonical JSON; the version is computed
    /// from the content, never trusted from the file.
    pub fn from_canon(v: &Value) -> Result<Self, PolicyError> {
        let label = v
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| PolicyError::BadPolicy("missing label".to_string()))?;
        let mut relaxations = BTreeMap::new();
        if let Some(Value::Map(m)) = v.get("relaxations") {
            for (pid, entry) in m {
                let property = PropertyId::new(pid.clone())
                    .map_err(|e| PolicyError::BadPolicy(e.to_string()))?;
                let mut r = Relaxations::default();
                if let Some(tp) = entry.get("time_precision").and_then(Value::as_num) {
                    let level = tp.to_f64() as u32;
                    r.time_precision = Some(
                        TimePrecision::from_level(level)
                            .map_err(|e| PolicyError::BadPolicy(e.to_string()))?,
                    );
                }
                r.unit_convert =
                    entry.get("unit_convert").and_then(Value::as_bool).unwrap_or(false);
                if let Some(dp) = entry.get("coord_round").and_then(Value::as_num) {
                    r.coord_round = Some(dp.to_f64() as u32);
                }
                r.string_fold =
                    entry.get("string_fold").and_then(Value::as_bool).unwrap_or(false);
                relaxations.insert(property, r);
            }
        }
        let mut unit_table = BTreeMap::new();
        if let Some(Value::Map(m)) = v.get("unit_table") {
            for (unit, entry) in m {
                let canonical = entry
                    .get("canonical_unit")
                    .and_then(Value::as_str)
                    .ok_or_else(|| PolicyError::BadPolicy("unit entry missing canonical_unit".to_string()))?;
                let factor = entry
                    .get("factor")
                    .and_then(Value::as_num)
                    .ok_or_else(|| PolicyError::BadPolicy("unit entry missing factor".to_string()))?;
                unit_table.insert(
                    unit.clone(),
                    UnitConversion { canonical_unit: canonical.to_string(), factor: factor.clone() },
                );
            }
        }
        Ok(Self::from_parts(label, relaxations, unit_table))
    }

    fn relax_for(&self, p: &PropertyId) -> Option<&Relaxations> {
        self.relaxations.get(p)
    }
}

/// Strict canonical rendering of a value, before any relaxation.
fn strict_value_string(value: &TypedValue) -> String {
    match value {
        TypedValue::Entity(q) => q.as_str().to_string(),
        TypedValue::Time(t) => {
            let mut s = alloc::format!(
                "{}/prec{}",
                t.iso_truncated(t.precision),
                t.precision.level()
            );
            if t.calendar != CALENDAR_GREGORIAN {
                s.push_str("/cal=");
                s.push_str(&t.calendar);
            }
            s
        }
        TypedValue::Quantity(q) => alloc::format!("{}@{}", q.amount, q.unit),
        TypedValue::Coordinate(c) => alloc::format!("{},{}", c.latitude, c.longitude),
        TypedValue::Str { text, .. } => nfc_trim(text),
        TypedValue::MonoText { text, language } => {
            alloc::format!("{}@{}", nfc_trim(text), language)
        }
        TypedValue::ExternalId(s) => s.clone(),
        TypedValue::NoValue => NOVALUE_CONST.to_string(),
        TypedValue::SomeValue => SOMEVALUE_CONST.to_string(),
    }
}

/// Normalize a value under the policy. Returns the canonical string and
/// any merge reasons; a reason appears iff the relaxed output differs
/// from the strict output.
pub fn norm_value(
    property: &PropertyId,
    value: &TypedValue,
    policy: &NormalizationPolicy,
) -> Result<(String, Vec<MergeReason>), PolicyError> {
    let strict = strict_value_string(value);
    let Some(relax) = policy.relax_for(property) else {
        return Ok((strict, Vec::new()));
    };
    let mut reasons = Vec::new();
    let relaxed = match value {
        TypedValue::Time(t) => {
            let target = relax.time_precision.filter(|&tp| tp < t.precision);
            match target {
                Some(tp) => {
                    let mut s =
                        alloc::format!("{}/prec{}", t.iso_truncated(tp), tp.level());
                    if t.calendar != CALENDAR_GREGORIAN {
                        s.push_str("/cal=");
                        s.push_str(&t.calendar);
                    }
                    if s != strict {
                        reasons.push(MergeReason {
                            kind: MergeReasonKind::TimePrecisionRelax,
                            detail: alloc::format!(
                                "{}: prec{}->prec{}",
                                property,
                                t.precision.level(),
                                tp.level()
                            ),
                        });
                    }
                    s
                }
                None => strict.clone(),
            }
        }
        TypedValue::Quantity(q) if relax.unit_convert => {
            let conv = policy.unit_table.get(&q.unit).ok_or_else(|| {
                PolicyError::MissingUnitConversion {
                    property: property.as_str().to_string(),
                    unit: q.unit.clone(),
                }
            })?;
            let amount = q.amount.mul(&conv.factor);
            let s = alloc::format!("{}@{}", amount, conv.canonical_unit);
            if s != strict {
                reasons.push(MergeReason {
                    kind: MergeReasonKind::UnitConvert,
                    detail: alloc::format!("{}: {}->{}", property, q.unit, conv.canonical_unit),
                });
            }
            s
        }
        TypedValue::Coordinate(c) => match relax.coord_round {
            Some(dp) => {
                let s = alloc::format!("{},{}", c.latitude.round_dp(dp), c.longitude.round_dp(dp));
                if s != strict {
                    reasons.push(MergeReason {
                        kind: MergeReasonKind::CoordRound,
                        detail: alloc::format!("{}: rounded to {}dp", property, dp),
                    });
                }
                s
            }
            None => strict.clone(),
        },
        TypedValue::Str { .. } | TypedValue::MonoText { .. } if relax.string_fold => {
            let s: String = strict.chars().flat_map(|c| c.to_lowercase()).collect();
            if s != strict {
                reasons.push(MergeReason {
                    kind: MergeReasonKind::StringCanon,
                    detail: alloc::format!("{}: case-folded", property),
                });
            }
            s
        }
        _ => strict.clone(),
    };
    Ok((relaxed, reasons))
}

/// Order-invariant qualifier normalization: each pair is normalized, the
/// pair list sorted by (PID string, normalized value string), then
/// canon-serialized. Duplicates are retained (multiset semantics).
pub fn norm_quals(
    qualifiers: &[(PropertyId, TypedValue)],
    policy: &NormalizationPolicy,
) -> Result<(String, Vec<MergeReason>), PolicyError> {
    let mut pairs: Vec<(String, String)> = Vec::with_capacity(qualifiers.len());
    let mut reasons = Vec::new();
    for (p, v) in qualifiers {
        let (s, mut r) = norm_value(p, v, policy)?;
        reasons.append(&mut r);
        pairs.push((p.as_str().to_string(), s));
    }
    pairs.sort();
    let arr = Value::Arr(
        pairs
            .into_iter()
            .map(|(p, v)| Value::Arr(alloc::vec![Value::Str(p), Value::Str(v)]))
            .collect(),
    );
    Ok((canon_string(&arr), reasons))
}

/// The identity of a synset: subject, property, normalized value and
/// normalized qualifiers joined with the unit separator. Rank, references
/// and sitelinks are excluded by construction.
pub fn aggregation_key(
    f: &FactStatement,
    policy: &NormalizationPolicy,
) -> Result<String, PolicyError> {
    Ok(aggregation_key_with_reasons(f, policy)?.0)
}

/// Aggregation key plus the merge reasons its normalization emitted.
pub fn aggregation_key_with_reasons(
    f: &FactStatement,
    policy: &NormalizationPolicy,
) -> Result<(String, Vec<MergeReason>), PolicyError> {
    let (value, mut reasons) = norm_value(&f.property, &f.value, policy)?;
    let (quals, mut qreasons) = norm_quals(&f.qualifiers, policy)?;
    reasons.append(&mut qreasons);
    let key = join_key(&[f.subject.as_str(), f.property.as_str(), &value, &quals]);
    Ok((key, reasons))
}

/// SHA-256 of the aggregation key, used only as an index bucket; full key
/// equality is re-verified before any merge.
pub fn claim_hash(key: &str) -> String {
    sha256_hex(key.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CoordinateValue, EntityId, QuantityValue, Rank, TimeValue};
    use alloc::vec;

    fn pid(s: &str) -> PropertyId {
        PropertyId::new(s).unwrap()
    }

    fn dec(s: &str) -> Decimal {
        Decimal::parse(s).unwrap()
    }

    fn stmt(value: TypedValue, qualifiers: Vec<(PropertyId, TypedValue)>) -> FactStatement {
        FactStatement {
            statement_id: "Q1$s1".to_string(),
            subject: EntityId::new("Q1").unwrap(),
            property: pid("P10"),
            value,
            qualifiers,
            rank: Rank::Normal,
            references: vec![],
            last_edit: "2025-11-01T00:00:00Z".to_string(),
            sitelinks: BTreeMap::new(),
            confidence: dec("0.7"),
            claim_hash: String::new(),
            synthetic_id: false,
        }
    }

    #[test]
    fn entities_pass_through_under_default_policy() {
        let p = NormalizationPolicy::default_policy();
        let (s, reasons) =
            norm_value(&pid("P10"), &TypedValue::Entity(EntityId::new("Q42").unwrap()), &p)
                .unwrap();
        assert_eq!(s, "Q42");
        assert!(reasons.is_empty());
    }

    #[test]
    fn time_truncation_emits_reason_only_when_it_changes_the_value() {
        let mut relax = BTreeMap::new();
        relax.insert(
            pid("P10"),
            Relaxations { time_precision: Some(TimePrecision::Month), ..Default::default() },
        );
        let p = NormalizationPolicy::from_parts("relaxed", relax, BTreeMap::new());

        let day = TypedValue::Time(TimeValue::ymd(1999, 5, 12, TimePrecision::Day));
        let (s, reasons) = norm_value(&pid("P10"), &day, &p).unwrap();
        assert_eq!(s, "1999-05/prec10");
        assert_eq!(reasons.len(), 1);
        assert_eq!(reasons[0].kind, MergeReasonKind::TimePrecisionRelax);

        // Already at month precision: no change, no reason.
        let month = TypedValue::Time(TimeValue::ymd(1999, 5, 0, TimePrecision::Month));
        let (s2, reasons2) = norm_value(&pid("P10"), &month, &p).unwrap();
        assert_eq!(s2, "1999-05/prec10");
        assert!(reasons2.is_empty());

        // Coarser than the target is never refined.
        let year = TypedValue::Time(TimeValue::ymd(1999, 0, 0, TimePrecision::Year));
        let (s3, reasons3) = norm_value(&pid("P10"), &year, &p).unwrap();
        assert_eq!(s3, "1999/prec9");
        assert!(reasons3.is_empty());
    }

    #[test]
    fn string_normalization_is_nfc_and_trim() {
        let p = NormalizationPolicy::default_policy();
        let v = TypedValue::Str { text: "  x\u{0301} ".to_string(), language: None };
        let (s, reasons) = norm_value(&pid("P10"), &v, &p).unwrap();
        // NFC reference: "x" + COMBINING ACUTE composes to U+1E8B? It does
        // not; x́ has no precomposed form, so NFC keeps the sequence.
        assert_eq!(s, "x\u{0301}");
        assert!(reasons.is_empty());

        let v2 = TypedValue::Str { text: " e\u{0301}".to_string(), language: None };
        let (s2, _) = norm_value(&pid("P10"), &v2, &p).unwrap();
        assert_eq!(s2, "\u{00e9}");
    }

    #[test]
    fn unit_conversion_under_allowlist() {
        let mut relax = BTreeMap::new();
        relax.insert(pid("P10"), Relaxations { unit_convert: true, ..Default::default() });
        let mut units = BTreeMap::new();
        units.insert(
            "Q174728".to_string(),
            UnitConversion { canonical_unit: "Q11573".to_string(), factor: dec("0.01") },
        );
        units.insert(
            "Q11573".to_string(),
            UnitConversion { canonical_unit: "Q11573".to_string(), factor: dec("1") },
        );
        let p = NormalizationPolicy::from_parts("units", relax, units);

        // 170 cm converts to 1.7 m; exact rational conversion oracle:
        // 170 * 1/100 = 17/10 = 1.7 exactly.
        let cm = TypedValue::Quantity(QuantityValue { amount: dec("170"), unit: "Q174728".into() });
        let (s, reasons) = norm_value(&pid("P10"), &cm, &p).unwrap();
        assert_eq!(s, "1.7@Q11573");
        assert_eq!(reasons.len(), 1);
        assert_eq!(reasons[0].kind, MergeReasonKind::UnitConvert);

        // Already metres: identity conversion, no reason.
        let m = TypedValue::Quantity(QuantityValue { amount: dec("1.7"), unit: "Q11573".into() });
        let (s2, reasons2) = norm_value(&pid("P10"), &m, &p).unwrap();
        assert_eq!(s2, "1.7@Q11573");
        assert!(reasons2.is_empty());

        // Unknown unit with conversion authorized: policy violation.
        let odd = TypedValue::Quantity(QuantityValue { amount: dec("3"), unit: "Q999".into() });
        assert!(matches!(
            norm_value(&pid("P10"), &odd, &p),
            Err(PolicyError::MissingUnitConversion { .. })
        ));
    }

    #[test]
    fn coordinate_rounding() {
        let mut relax = BTreeMap::new();
        relax.insert(pid("P10"), Relaxations { coord_round: Some(2), ..Default::default() });
        let p = NormalizationPolicy::from_parts("coord", relax, BTreeMap::new());
        let v = TypedValue::Coordinate(CoordinateValue {
            latitude: dec("52.5167"),
            longitude: dec("13.3833"),
            precision: Some(dec("0.0001")),
        });
        let (s, reasons) = norm_value(&pid("P10"), &v, &p).unwrap();
        assert_eq!(s, "52.52,13.38");
        assert_eq!(reasons.len(), 1);
        assert_eq!(reasons[0].kind, MergeReasonKind::CoordRound);
    }

    #[test]
    fn qualifier_normalization_is_order_invariant_and_multiset() {
        let p = NormalizationPolicy::default_policy();
        let q1 = (pid("P1"), TypedValue::Str { text: "v1".into(), language: None });
        let q2 = (pid("P2"), TypedValue::Str { text: "v2".into(), language: None });
        let (a, _) = norm_quals(&[q2.clone(), q1.clone()], &p).unwrap();
        let (b, _) = norm_quals(&[q1.clone(), q2.clone()], &p).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, r#"[["P1","v1"],["P2","v2"]]"#);

        // Empty multiset canonical form.
        let (e, _) = norm_quals(&[], &p).unwrap();
        assert_eq!(e, "[]");

        // Duplicates retained in sorted order.
        let (d, _) = norm_quals(&[q1.clone(), q1.clone()], &p).unwrap();
        assert_eq!(d, r#"[["P1","v1"],["P1","v1"]]"#);
    }

    #[test]
    fn aggregation_key_ignores_rank_and_qualifier_order() {
        let p = NormalizationPolicy::default_policy();
        let q1 = (pid("P1"), TypedValue::Str { text: "a".into(), language: None });
        let q2 = (pid("P2"), TypedValue::Str { text: "b".into(), language: None });
        let v = TypedValue::Entity(EntityId::new("Q9").unwrap());

        let mut s1 = stmt(v.clone(), vec![q1.clone(), q2.clone()]);
        let mut s2 = stmt(v.clone(), vec![q2, q1]);
        s2.rank = Rank::Preferred;
        s1.statement_id = "Q1$a".into();
        s2.statement_id = "Q1$b".into();

        let k1 = aggregation_key(&s1, &p).unwrap();
        let k2 = aggregation_key(&s2, &p).unwrap();
        assert_eq!(k1, k2);
        assert!(k1.contains('\u{1F}'));
    }

    #[test]
    fn claim_hash_is_sha256() {
        assert_eq!(
            claim_hash(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(claim_hash("abc"), claim_hash("abc"));
        assert_ne!(claim_hash("abc"), claim_hash("abd"));
    }

    #[test]
    fn novalue_and_somevalue_reserved_constants() {
        let p = NormalizationPolicy::default_policy();
        let (nv, _) = norm_value(&pid("P10"), &TypedValue::NoValue, &p).unwrap();
        let (sv, _) = norm_value(&pid("P10"), &TypedValue::SomeValue, &p).unwrap();
        assert_eq!(nv, "\u{0000}NOVALUE");
        assert_eq!(sv, "\u{0000}SOMEVALUE");
        assert_ne!(nv, sv);
    }

    #[test]
    fn version_suffix_is_content_hash() {
        let p = NormalizationPolicy::default_policy();
        let (label, hash) = p.version.split_once('+').unwrap();
        assert_eq!(label, "default");
        assert_eq!(hash, p.content_hash());

        // Round trip through canonical form preserves the version.
        let reloaded = NormalizationPolicy::from_canon(&p.to_canon()).unwrap();
        assert_eq!(reloaded.version, p.version);
    }
}
