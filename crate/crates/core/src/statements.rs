//! Projection of raw entity records into statements with heuristic
//! confidence.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::canon::{canon_serialize, Value};
use crate::decimal::Decimal;
use crate::ids::sha1_hex;
use crate::model::{
    EntityId, FactStatement, PropertyId, QuantityValue, Rank, RawEntityRecord, TimeValue,
    TypedValue,
};
use crate::policy::{aggregation_key, claim_hash, NormalizationPolicy};

/// A claim that could not be projected; counted, never repaired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimMalformed {
    pub entity_id: String,
    pub property: String,
    pub reason: String,
}

impl fmt::Display for ClaimMalformed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.entity_id, self.property, self.reason)
    }
}

impl core::error::Error for ClaimMalformed {}

/// Heuristic statement confidence from rank and reference-block count:
/// base `{preferred: 0.9, normal: 0.7, deprecated: 0.3}` plus
/// `0.05 * min(ref_count, 2)`, capped at 1.0. Computed in integer
/// hundredths so the decimal is exact.
pub fn statement_confidence(rank: Rank, ref_count: u32) -> Decimal {
    let base: i64 = match rank {
        Rank::Preferred => 90,
        Rank::Normal => 70,
        Rank::Deprecated => 30,
    };
    let centi = (base + 5 * ref_count.min(2) as i64).min(100);
    Decimal::from_i64(centi).mul(&Decimal::parse("0.01").unwrap())
}

fn typed_value_from_snak(snak: &Value) -> Result<TypedValue, String> {
    let snaktype = snak.get("snaktype").and_then(Value::as_str).unwrap_or("value");
    match snaktype {
        "novalue" => return Ok(TypedValue::NoValue),
        "somevalue" => return Ok(TypedValue::SomeValue),
        "value" => {}
        other => return Err(alloc::format!("unknown snaktype '{}'", other)),
    }
    let dv = snak.get("datavalue").ok_or("missing datavalue")?;
    let dtype = dv.get("type").and_then(Value::as_str).ok_or("missing datavalue type")?;
    let val = dv.get("value").ok_or("missing datavalue value")?;
    match dtype {
        "wikibase-entityid" => {
            let id = val
                .get("id")
                .and_then(Value::as_str)
                .ok_or("entity value missing id")?;
            let qid = EntityId::new(id).map_err(|e| e.to_string())?;
            Ok(TypedValue::Entity(qid))
        }
        "time" => {
            let time = val.get("time").and_then(Value::as_str).ok_or("time missing literal")?;
            let precision = val
                .get("precision")
                .and_then(Value::as_num)
                .map(|d| d.to_f64() as u32)
                .ok_or("time missing precision")?;
            let calendar = val
                .get("calendarmodel")
                .and_then(Value::as_str)
                .map(strip_entity_uri)
                .unwrap_or("Q1985727");
            TimeValue::parse_iso(time, precision, calendar)
                .map(TypedValue::Time)
                .map_err(|e| e.to_string())
        }
        "quantity" => {
            let amount = val.get("amount").and_then(Value::as_str).ok_or("quantity missing amount")?;
            let amount = Decimal::parse(amount).map_err(|_| "bad quantity amount".to_string())?;
            let unit = val
                .get("unit")
                .and_then(Value::as_str)
                .map(strip_entity_uri)
                .unwrap_or("1");
            Ok(TypedValue::Quantity(QuantityValue { amount, unit: unit.to_string() }))
        }
        "globecoordinate" => {
            let lat = val.get("latitude").and_then(Value::as_num).ok_or("coordinate missing latitude")?;
            let lon = val.get("longitude").and_then(Value::as_num).ok_or("coordinate missing longitude")?;
            Ok(TypedValue::Coordinate(crate::model::CoordinateValue {
                latitude: lat.clone(),
                longitude: lon.clone(),
                precision: val.get("precision").and_then(Value::as_num).cloned(),
            }))
        }
        "monolingualtext" => {
            let text = val.get("text").and_then(Value::as_str).ok_or("monotext missing text")?;
            let language =
                val.get("language").and_then(Value::as_str).ok_or("monotext missing language")?;
            Ok(TypedValue::MonoText { text: text.to_string(), language: language.to_string() })
        }
        "string" => {
            let text = val.as_str().ok_or("string value not a string")?;
            // External ids arrive with datatype external-id on the snak.
            if snak.get("datatype").and_then(Value::as_str) == Some("external-id") {
                Ok(TypedValue::ExternalId(text.to_string()))
            } else {
                Ok(TypedValue::Str { text: text.to_string(), language: None })
            }
        }
        other => Err(alloc::format!("unsupported datatype '{}'", other)),
    }
}

fn strip_entity_uri(uri: &str) -> &str {
    uri.rsplit('/').next().unwrap_or(uri)
}

fn qualifiers_from_claim(claim: &Value) -> Result<Vec<(PropertyId, TypedValue)>, String> {
    let mut out = Vec::new();
    let Some(Value::Map(quals)) = claim.get("qualifiers") else {
        return Ok(out);
    };
    for (pid, snaks) in quals {
        let property = PropertyId::new(pid.clone()).map_err(|e| e.to_string())?;
        let Some(list) = snaks.as_arr() else {
            return Err("qualifier snaks not a list".to_string());
        };
        for snak in list {
            out.push((property.clone(), typed_value_from_snak(snak)?));
        }
    }
    Ok(out)
}

/// Project a raw entity record into statements. Qualifiers, references,
/// rank and sitelinks are preserved verbatim; the claim hash is computed
/// under the given policy. Malformed claims are skipped with a reason
/// record. Claims without a statement id get one synthesized from
/// content and are flagged.
pub fn extract_statements(
    rec: &RawEntityRecord,
    policy: &NormalizationPolicy,
) -> (Vec<FactStatement>, Vec<ClaimMalformed>) {
    let mut statements = Vec::new();
    let mut skipped = Vec::new();

    let subject = match EntityId::new(rec.entity_id.clone()) {
        Ok(q) => q,
        Err(e) => {
            skipped.push(ClaimMalformed {
                entity_id: rec.entity_id.clone(),
                property: String::new(),
                reason: e.to_string(),
            });
            return (statements, skipped);
        }
    };

    for (pid, claims) in &rec.claims {
        let property = match PropertyId::new(pid.clone()) {
            Ok(p) => p,
            Err(e) => {
                skipped.push(ClaimMalformed {
                    entity_id: rec.entity_id.clone(),
                    property: pid.clone(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        for claim in claims {
            match project_claim(rec, &subject, &property, claim, policy) {
                Ok(stmt) => statements.push(stmt),
                Err(reason) => skipped.push(ClaimMalformed {
                    entity_id: rec.entity_id.clone(),
                    property: pid.clone(),
                    reason,
                }),
            }
        }
    }
    (statements, skipped)
}

fn project_claim(
    rec: &RawEntityRecord,
    subject: &EntityId,
    property: &PropertyId,
    claim: &Value,
    policy: &NormalizationPolicy,
) -> Result<FactStatement, String> {
    let mainsnak = claim.get("mainsnak").ok_or("missing mainsnak")?;
    let value = typed_value_from_snak(mainsnak)?;
    let qualifiers = qualifiers_from_claim(claim)?;
    let rank = match claim.get("rank").and_then(Value::as_str) {
        Some(r) => Rank::parse(r).map_err(|e| e.to_string())?,
        None => Rank::Normal,
    };
    let references: Vec<Value> = claim
        .get("references")
        .and_then(Value::as_arr)
        .map(|a| a.to_vec())
        .unwrap_or_default();

    let (statement_id, synthetic_id) = match claim.get("id").and_then(Value::as_str) {
        Some(id) if !id.is_empty() => (id.to_string(), false),
        _ => {
            // Deterministic synthesis from (entity, property, canonical
            // value); flagged so downstream users can filter.
            let seed = Value::map([
                ("entity", Value::str(subject.as_str())),
                ("property", Value::str(property.as_str())),
                ("value", value.to_canon()),
            ]);
            (
                alloc::format!("{}$synth-{}", subject, sha1_hex(&canon_serialize(&seed))),
                true,
            )
        }
    };

    let mut stmt = FactStatement {
        statement_id,
        subject: subject.clone(),
        property: property.clone(),
        value,
        qualifiers,
        rank,
        references,
        last_edit: rec.last_modified.clone(),
        sitelinks: rec.sitelinks.clone(),
        confidence: statement_confidence(rank, 0),
        claim_hash: String::new(),
        synthetic_id,
    };
    stmt.confidence = statement_confidence(rank, stmt.reference_count());
    let key = aggregation_key(&stmt, policy).map_err(|e| e.to_string())?;
    stmt.claim_hash = claim_hash(&key);
    Ok(stmt)
}
