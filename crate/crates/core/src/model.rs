//! Shared domain types: statements, typed values, manifests, raw inputs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::canon::Value;
use crate::decimal::Decimal;

/// Validation failure for a domain identifier or value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelError(pub String);

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl core::error::Error for ModelError {}

fn is_id(s: &str, prefix: u8) -> bool {
    let b = s.as_bytes();
    b.len() >= 2 && b[0] == prefix && b[1..].iter().all(|c| c.is_ascii_digit())
}

/// Entity identifier in the source namespace, `Q[0-9]+`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(s: impl Into<String>) -> Result<Self, ModelError> {
        let s = s.into();
        if is_id(&s, b'Q') {
            Ok(EntityId(s))
        } else {
            Err(ModelError(alloc::format!("invalid entity id '{}'", s)))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Property identifier, `P[0-9]+`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropertyId(String);

impl PropertyId {
    pub fn new(s: impl Into<String>) -> Result<Self, ModelError> {
        let s = s.into();
        if is_id(&s, b'P') {
            Ok(PropertyId(s))
        } else {
            Err(ModelError(alloc::format!("invalid property id '{}'", s)))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Statement rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Deprecated,
    Normal,
    Preferred,
}

impl Rank {
    pub fn as_str(self) -> &'static str {
        match self {
            Rank::Preferred => "preferred",
            Rank::Normal => "normal",
            Rank::Deprecated => "deprecated",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ModelError> {
        match s {
            "preferred" => Ok(Rank::Preferred),
            "normal" => Ok(Rank::Normal),
            "deprecated" => Ok(Rank::Deprecated),
            other => Err(ModelError(alloc::format!("unknown rank '{}'", other))),
        }
    }

    /// Monotone integer score used by canonical selection.
    pub fn score(self) -> u8 {
        match self {
            Rank::Preferred => 2,
            Rank::Normal => 1,
            Rank::Deprecated => 0,
        }
    }
}

/// Calendar-date precision levels, numbered as in the source dumps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimePrecision {
    Year = 9,
    Month = 10,
    Day = 11,
    Hour = 12,
    Minute = 13,
    Second = 14,
}

impl TimePrecision {
    pub fn from_level(level: u32) -> Result<Self, ModelError> {
        Ok(match level {
            9 => TimePrecision::Year,
            10 => TimePrecision::Month,
            11 => TimePrecision::Day,
            12 => TimePrecision::Hour,
            13 => TimePrecision::Minute,
            14 => TimePrecision::Second,
            other => return Err(ModelError(alloc::format!("unsupported time precision {}", other))),
        })
    }

    pub fn level(self) -> u32 {
        self as u32
    }
}

/// Default calendar model; other calendars are tagged, never converted.
pub const CALENDAR_GREGORIAN: &str = "Q1985727";

/// A calendar timestamp with explicit precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TimeValue {
    pub year: i64,
    pub month: u8,
    pub day: u8,
    pub hour: u8,
    pub minute: u8,
    pub second: u8,
    pub precision: TimePrecision,
    /// Calendar model QID, `Q1985727` for proleptic Gregorian.
    pub calendar: String,
}

impl TimeValue {
    pub fn ymd(year: i64, month: u8, day: u8, precision: TimePrecision) -> Self {
        TimeValue {
            year,
            month,
            day,
            hour: 0,
            minute: 0,
            second: 0,
            precision,
            calendar: CALENDAR_GREGORIAN.to_string(),
        }
    }

    /// Parse the dump form `+1999-05-12T00:00:00Z` (sign optional in
    /// tolerant mode, mandatory in dumps).
    pub fn parse_iso(s: &str, precision: u32, calendar: &str) -> Result<Self, ModelError> {
        let precision = TimePrecision::from_level(precision)?;
        let bad = || ModelError(alloc::format!("invalid time literal '{}'", s));
        let (sign, rest) = match s.as_bytes().first() {
            Some(b'+') => (1i64, &s[1..]),
            Some(b'-') => (-1i64, &s[1..]),
            _ => (1i64, s),
        };
        let rest = rest.strip_suffix('Z').unwrap_or(rest);
        let (date, time) = match rest.split_once('T') {
            Some((d, t)) => (d, Some(t)),
            None => (rest, None),
        };
        let mut dp = date.split('-');
        let year: i64 = dp.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let month: u8 = dp.next().unwrap_or("0").parse().map_err(|_| bad())?;
        let day: u8 = dp.next().unwrap_or("0").parse().map_err(|_| bad())?;
        if dp.next().is_some() || month > 12 || day > 31 {
            return Err(bad());
        }
        let (mut hour, mut minute, mut second) = (0u8, 0u8, 0u8);
        if let Some(t) = time {
            let mut tp = t.split(':');
            hour = tp.next().unwrap_or("0").parse().map_err(|_| bad())?;
            minute = tp.next().unwrap_or("0").parse().map_err(|_| bad())?;
            second = tp.next().unwrap_or("0").parse().map_err(|_| bad())?;
            if tp.next().is_some() || hour > 23 || minute > 59 || second > 60 {
                return Err(bad());
            }
        }
        Ok(TimeValue {
            year: sign * year,
            month,
            day,
            hour,
            minute,
            second,
            precision,
            calendar: calendar.to_string(),
        })
    }

    /// ISO-8601 form truncated at the given precision, e.g. `1999-05`
    /// for month precision. Negative years keep their sign; years are
    /// zero-padded to four digits.
    pub fn iso_truncated(&self, precision: TimePrecision) -> String {
        let mut out = String::new();
        let y = self.year;
        if y < 0 {
            out.push('-');
        }
        let abs = y.unsigned_abs();
        let ys = abs.to_string();
        for _ in ys.len()..4 {
            out.push('0');
        }
        out.push_str(&ys);
        if precision >= TimePrecision::Month {
            out.push_str(&alloc::format!("-{:02}", self.month));
        }
        if precision >= TimePrecision::Day {
            out.push_str(&alloc::format!("-{:02}", self.day));
        }
        if precision >= TimePrecision::Hour {
            out.push_str(&alloc::format!("T{:02}", self.hour));
        }
        if precision >= TimePrecision::Minute {
            out.push_str(&alloc::format!(":{:02}", self.minute));
        }
        if precision >= TimePrecision::Second {
            out.push_str(&alloc::format!(":{:02}", self.second));
        }
        out
    }
}

/// An exact quantity with its source unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuantityValue {
    pub amount: Decimal,
    /// Unit entity QID, or `"1"` for dimensionless quantities.
    pub unit: String,
}

/// A globe coordinate as exact decimal degrees. The stated precision is
/// carried as metadata; it never enters the normalized value string.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordinateValue {
    pub latitude: Decimal,
    pub longitude: Decimal,
    pub precision: Option<Decimal>,
}

/// A typed statement value.
#[derive(Clone, Debug, PartialEq)]
pub enum TypedValue {
    Entity(EntityId),
    Time(TimeValue),
    Quantity(QuantityValue),
    Coordinate(CoordinateValue),
    Str { text: String, language: Option<String> },
    MonoText { text: String, language: String },
    ExternalId(String),
    NoValue,
    SomeValue,
}

impl TypedValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            TypedValue::Entity(_) => ValueKind::Entity,
            TypedValue::Time(_) => ValueKind::Time,
            TypedValue::Quantity(_) => ValueKind::Quantity,
            TypedValue::Coordinate(_) => ValueKind::Coordinate,
            TypedValue::Str { .. } => ValueKind::Str,
            TypedValue::MonoText { .. } => ValueKind::MonoText,
            TypedValue::ExternalId(_) => ValueKind::ExternalId,
            TypedValue::NoValue => ValueKind::NoValue,
            TypedValue::SomeValue => ValueKind::SomeValue,
        }
    }

    /// Record form for serialization into output shards.
    pub fn to_canon(&self) -> Value {
        match self {
            TypedValue::Entity(q) => Value::map([
                ("kind", Value::str("entity")),
                ("entity", Value::str(q.as_str())),
            ]),
            TypedValue::Time(t) => Value::map([
                ("kind", Value::str("time")),
                ("time", Value::str(t.iso_truncated(t.precision))),
                ("precision", Value::int(t.precision.level() as i64)),
                ("calendar", Value::str(t.calendar.clone())),
            ]),
            TypedValue::Quantity(q) => Value::map([
                ("kind", Value::str("quantity")),
                ("amount", Value::Num(q.amount.clone())),
                ("unit", Value::str(q.unit.clone())),
            ]),
            TypedValue::Coordinate(c) => {
                let mut fields = alloc::vec![
                    ("kind", Value::str("coordinate")),
                    ("latitude", Value::Num(c.latitude.clone())),
                    ("longitude", Value::Num(c.longitude.clone())),
                ];
                if let Some(p) = &c.precision {
                    fields.push(("precision", Value::Num(p.clone())));
                }
                Value::map(fields)
            }
            TypedValue::Str { text, language } => {
                let mut m = alloc::vec![
                    ("kind", Value::str("string")),
                    ("text", Value::str(text.clone())),
                ];
                if let Some(lang) = language {
                    m.push(("language", Value::str(lang.clone())));
                }
                Value::map(m)
            }
            TypedValue::MonoText { text, language } => Value::map([
                ("kind", Value::str("monotext")),
                ("text", Value::str(text.clone())),
                ("language", Value::str(language.clone())),
            ]),
            TypedValue::ExternalId(s) => Value::map([
                ("kind", Value::str("external_id")),
                ("text", Value::str(s.clone())),
            ]),
            TypedValue::NoValue => Value::map([("kind", Value::str("novalue"))]),
            TypedValue::SomeValue => Value::map([("kind", Value::str("somevalue"))]),
        }
    }
}

/// Value kind discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueKind {
    Entity,
    Time,
    Quantity,
    Coordinate,
    Str,
    MonoText,
    ExternalId,
    NoValue,
    SomeValue,
}

/// One atomic assertion, keyed by an external statement id.
#[derive(Clone, Debug, PartialEq)]
pub struct FactStatement {
    pub statement_id: String,
    pub subject: EntityId,
    pub property: PropertyId,
    pub value: TypedValue,
    /// Qualifier multiset in source order; order only matters for
    /// faithful re-serialization, never for identity.
    pub qualifiers: Vec<(PropertyId, TypedValue)>,
    pub rank: Rank,
    /// Opaque reference blocks, canonicalized verbatim.
    pub references: Vec<Value>,
    pub last_edit: String,
    pub sitelinks: BTreeMap<String, String>,
    pub confidence: Decimal,
    pub claim_hash: String,
    /// True when the source claim lacked a statement id and one was
    /// synthesized from content.
    pub synthetic_id: bool,
}

impl FactStatement {
    pub fn reference_count(&self) -> u32 {
        self.references.len() as u32
    }

    pub fn to_canon(&self) -> Value {
        let quals: Vec<Value> = self
            .qualifiers
            .iter()
            .map(|(p, v)| Value::Arr(alloc::vec![Value::str(p.as_str()), v.to_canon()]))
            .collect();
        let sitelinks: BTreeMap<String, Value> = self
            .sitelinks
            .iter()
            .map(|(k, v)| (k.clone(), Value::str(v.clone())))
            .collect();
        Value::map([
            ("statement_id", Value::str(self.statement_id.clone())),
            ("subject", Value::str(self.subject.as_str())),
            ("property", Value::str(self.property.as_str())),
            ("value", self.value.to_canon()),
            ("qualifiers", Value::Arr(quals)),
            ("rank", Value::str(self.rank.as_str())),
            ("references", Value::Arr(self.references.clone())),
            ("last_edit", Value::str(self.last_edit.clone())),
            ("sitelinks", Value::Map(sitelinks)),
            ("confidence", Value::Num(self.confidence.clone())),
            ("claim_hash", Value::str(self.claim_hash.clone())),
            ("synthetic_id", Value::Bool(self.synthetic_id)),
        ])
    }
}

/// One pinned input file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestInput {
    pub path: String,
    pub sha256: String,
    /// Snapshot date of the pinned dump set; identical for all inputs of
    /// a build so the manifest stays content-derived.
    pub timestamp: String,
}

/// The pinned record of inputs, checksums and configuration versions from
/// which the entire output is reconstructible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildManifest {
    pub build_id: String,
    pub inputs: Vec<ManifestInput>,
    pub policy_version: String,
    pub pack_ids: BTreeMap<String, String>,
    pub tool_version: String,
    pub config_hash: String,
}

impl BuildManifest {
    /// The manifest body whose hash defines `build_id`.
    pub fn body_canon(&self) -> Value {
        let inputs: Vec<Value> = self
            .inputs
            .iter()
            .map(|i| {
                Value::map([
                    ("path", Value::str(i.path.clone())),
                    ("sha256", Value::str(i.sha256.clone())),
                    ("timestamp", Value::str(i.timestamp.clone())),
                ])
            })
            .collect();
        let packs: BTreeMap<String, Value> =
            self.pack_ids.iter().map(|(k, v)| (k.clone(), Value::str(v.clone()))).collect();
        Value::map([
            ("inputs", Value::Arr(inputs)),
            ("policy_version", Value::str(self.policy_version.clone())),
            ("pack_ids", Value::Map(packs)),
            ("tool_version", Value::str(self.tool_version.clone())),
            ("config_hash", Value::str(self.config_hash.clone())),
        ])
    }

    pub fn to_canon(&self) -> Value {
        let mut m = match self.body_canon() {
            Value::Map(m) => m,
            _ => unreachable!(),
        };
        m.insert("build_id".to_string(), Value::str(self.build_id.clone()));
        Value::Map(m)
    }
}

/// One raw entity record from the JSON dump. The id stays a raw string
/// here; subject validation happens at statement extraction.
#[derive(Clone, Debug, Default)]
pub struct RawEntityRecord {
    pub entity_id: String,
    /// Raw claim JSON per property, exactly as parsed from the dump.
    pub claims: BTreeMap<String, Vec<Value>>,
    pub sitelinks: BTreeMap<String, String>,
    pub labels: BTreeMap<String, String>,
    pub aliases: BTreeMap<String, Vec<String>>,
    pub last_modified: String,
}

/// One raw page from the XML dump; wikitext preserved byte-exact.
#[derive(Clone, Debug)]
pub struct RawPage {
    pub page_id: u64,
    pub revision_id: u64,
    pub title: String,
    pub namespace: i64,
    pub wikitext: String,
    pub is_redirect: bool,
    pub redirect_target: Option<String>,
}

/// Redirect and disambiguation link tables for one language edition.
#[derive(Clone, Debug, Default)]
pub struct LinkTables {
    pub redirects: BTreeMap<String, String>,
    pub disambiguation_pages: BTreeSet<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_validation() {
        assert!(EntityId::new("Q42").is_ok());
        assert!(EntityId::new("Q").is_err());
        assert!(EntityId::new("P42").is_err());
        assert!(EntityId::new("Q42x").is_err());
        assert!(PropertyId::new("P569").is_ok());
        assert!(PropertyId::new("Q569").is_err());
    }

    #[test]
    fn time_parse_and_truncate() {
        let t = TimeValue::parse_iso("+1999-05-12T00:00:00Z", 11, CALENDAR_GREGORIAN).unwrap();
        assert_eq!(t.iso_truncated(TimePrecision::Day), "1999-05-12");
        assert_eq!(t.iso_truncated(TimePrecision::Month), "1999-05");
        assert_eq!(t.iso_truncated(TimePrecision::Year), "1999");

        let bce = TimeValue::parse_iso("-0044-03-15T00:00:00Z", 11, CALENDAR_GREGORIAN).unwrap();
        assert_eq!(bce.iso_truncated(TimePrecision::Day), "-0044-03-15");

        let sec = TimeValue::parse_iso("+2020-01-02T03:04:05Z", 14, CALENDAR_GREGORIAN).unwrap();
        assert_eq!(sec.iso_truncated(TimePrecision::Second), "2020-01-02T03:04:05");
        assert_eq!(sec.iso_truncated(TimePrecision::Hour), "2020-01-02T03");

        assert!(TimeValue::parse_iso("+1999-13-01T00:00:00Z", 11, CALENDAR_GREGORIAN).is_err());
        assert!(TimeValue::parse_iso("nonsense", 11, CALENDAR_GREGORIAN).is_err());
    }

    #[test]
    fn rank_ordering() {
        assert!(Rank::Preferred.score() > Rank::Normal.score());
        assert!(Rank::Normal.score() > Rank::Deprecated.score());
    }
}
