//! Shipped default assets: language packs, normalization policies, the
//! schema map and the property-relation map. Rendered programmatically
//! through the canonical serializer so the files on disk are canonical
//! bytes.

use std::collections::{BTreeMap, BTreeSet};

use factforge_core::model::{EntityId, PropertyId, TimePrecision};
use factforge_core::pack::{LanguagePack, LexicalRules, SegmenterBackend, WikiRules};
use factforge_core::policy::{NormalizationPolicy, Relaxations, UnitConversion};
use factforge_core::relations::{MapRule, PropertyRelationMap, Tier};
use factforge_core::Decimal;

fn pid(s: &str) -> PropertyId {
    PropertyId::new(s).expect("valid pid constant")
}

fn dec(s: &str) -> Decimal {
    Decimal::parse(s).expect("valid decimal constant")
}

/// Unit table shared by the relaxed policy: centimetre and metre onto
/// metre, gram and kilogram onto kilogram. Exact decimal factors only.
fn unit_table() -> BTreeMap<String, UnitConversion> {
    [
        ("Q174728".to_string(), UnitConversion { canonical_unit: "Q11573".into(), factor: dec("0.01") }),
        ("Q11573".to_string(), UnitConversion { canonical_unit: "Q11573".into(), factor: dec("1") }),
        ("Q41803".to_string(), UnitConversion { canonical_unit: "Q11570".into(), factor: dec("0.001") }),
        ("Q11570".to_string(), UnitConversion { canonical_unit: "Q11570".into(), factor: dec("1") }),
    ]
    .into()
}

/// The conservative default policy: zero relaxations.
pub fn default_policy() -> NormalizationPolicy {
    NormalizationPolicy::default_policy()
}

/// A relaxed policy for merge-provenance exercises: month truncation on
/// birth and death dates, unit conversion on height, coordinate rounding
/// on locations.
pub fn relaxed_policy() -> NormalizationPolicy {
    let mut relax = BTreeMap::new();
    relax.insert(
        pid("P569"),
        Relaxations { time_precision: Some(TimePrecision::Month), ..Default::default() },
    );
    relax.insert(
        pid("P570"),
        Relaxations { time_precision: Some(TimePrecision::Month), ..Default::default() },
    );
    relax.insert(pid("P2048"), Relaxations { unit_convert: true, ..Default::default() });
    relax.insert(pid("P625"), Relaxations { coord_round: Some(2), ..Default::default() });
    NormalizationPolicy::from_parts("relaxed", relax, unit_table())
}

fn en_months() -> Vec<String> {
    ["January", "February", "March", "April", "May", "June", "July", "August", "September", "October", "November", "December"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn de_months() -> Vec<String> {
    ["Januar", "Februar", "März", "April", "Mai", "Juni", "Juli", "August", "September", "Oktober", "November", "Dezember"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn fr_months() -> Vec<String> {
    ["janvier", "février", "mars", "avril", "mai", "juin", "juillet", "août", "septembre", "octobre", "novembre", "décembre"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn units_en() -> BTreeMap<String, String> {
    [
        ("cm".to_string(), "Q174728".to_string()),
        ("m".to_string(), "Q11573".to_string()),
        ("kg".to_string(), "Q11570".to_string()),
        ("g".to_string(), "Q41803".to_string()),
    ]
    .into()
}

/// The shipped language packs. Terminal punctuation, suppression pairs,
/// abbreviation exceptions and excluded sections per edition; month and
/// unit tables for the lexical matchers.
pub fn language_pack(language: &str) -> Option<LanguagePack> {
    let pack = match language {
        "en" => LanguagePack::new(
            "en",
            SegmenterBackend::RuleBased,
            vec!['.', '!', '?'],
            vec![('(', ')'), ('[', ']'), ('"', '"')],
            ["Dr.", "Mr.", "Mrs.", "Ms.", "Prof.", "St.", "Jr.", "Sr.", "vs.", "etc.", "e.g.", "i.e."]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            vec!["See also".into(), "References".into(), "External links".into()],
            WikiRules { capitalize_first: true },
            LexicalRules {
                month_names: en_months(),
                approximation_markers: vec!["about".into(), "circa".into(), "around".into(), "approximately".into(), "~".into()],
                unit_surface_forms: units_en(),
                decimal_comma: false,
            },
        ),
        "de" => LanguagePack::new(
            "de",
            SegmenterBackend::RuleBased,
            vec!['.', '!', '?'],
            vec![('(', ')'), ('[', ']'), ('\u{201E}', '\u{201C}')],
            ["Dr.", "Prof.", "z. B.", "z.B.", "bzw.", "usw.", "ca.", "Nr.", "St."]
                .iter()
                .map(|s| s.to_string())
                // Ordinal day dots ("23. April") must not end sentences.
                .chain((1..=31).map(|d| format!("{}.", d)))
                .collect(),
            vec!["Siehe auch".into(), "Einzelnachweise".into(), "Weblinks".into(), "Literatur".into()],
            WikiRules { capitalize_first: true },
            LexicalRules {
                month_names: de_months(),
                approximation_markers: vec!["etwa".into(), "circa".into(), "ca".into(), "ungefähr".into(), "rund".into(), "~".into()],
                unit_surface_forms: units_en(),
                decimal_comma: true,
            },
        ),
        "fr" => LanguagePack::new(
            "fr",
            SegmenterBackend::RuleBased,
            vec!['.', '!', '?'],
            vec![('(', ')'), ('[', ']'), ('\u{00AB}', '\u{00BB}')],
            ["M.", "Mme.", "Dr.", "St.", "av.", "etc.", "p. ex."]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            vec!["Voir aussi".into(), "Références".into(), "Liens externes".into(), "Notes et références".into()],
            WikiRules { capitalize_first: true },
            LexicalRules {
                month_names: fr_months(),
                approximation_markers: vec!["environ".into(), "vers".into(), "autour".into(), "~".into()],
                unit_surface_forms: units_en(),
                decimal_comma: true,
            },
        ),
        "zh" => LanguagePack::new(
            "zh",
            SegmenterBackend::RuleBased,
            vec!['\u{3002}', '\u{FF01}', '\u{FF1F}'],
            vec![('\u{FF08}', '\u{FF09}'), ('\u{300C}', '\u{300D}'), ('\u{201C}', '\u{201D}')],
            vec![],
            vec!["参见".into(), "参考文献".into(), "外部链接".into()],
            WikiRules { capitalize_first: false },
            LexicalRules {
                month_names: vec![],
                approximation_markers: vec!["约".into(), "大约".into(), "~".into()],
                unit_surface_forms: units_en(),
                decimal_comma: false,
            },
        ),
        _ => return None,
    };
    Some(pack)
}

/// The shipped schema map: infobox parameter to property rows for the
/// fixture languages.
pub fn schema_map_tsv() -> String {
    let rows = [
        ("en", "Infobox person", "birth_date", "P569"),
        ("en", "Infobox person", "death_date", "P570"),
        ("en", "Infobox person", "birth_place", "P19"),
        ("en", "Infobox person", "spouse", "P26"),
        ("en", "Infobox person", "height", "P2048"),
        ("en", "Infobox person", "occupation", "P106"),
        ("en", "Infobox settlement", "population", "P1082"),
        ("en", "Infobox settlement", "country", "P17"),
        ("en", "Infobox settlement", "coordinates", "P625"),
        ("en", "Infobox settlement", "established", "P571"),
        ("de", "Infobox Person", "geburtsdatum", "P569"),
        ("de", "Infobox Person", "sterbedatum", "P570"),
        ("de", "Infobox Person", "geburtsort", "P19"),
        ("de", "Infobox Person", "ehepartner", "P26"),
        ("de", "Infobox Person", "größe", "P2048"),
        ("de", "Infobox Ort", "einwohner", "P1082"),
        ("de", "Infobox Ort", "staat", "P17"),
        ("fr", "Infobox Personne", "date de naissance", "P569"),
        ("fr", "Infobox Personne", "date de décès", "P570"),
        ("fr", "Infobox Personne", "lieu de naissance", "P19"),
        ("fr", "Infobox Personne", "conjoint", "P26"),
        ("fr", "Infobox Commune", "population", "P1082"),
        ("fr", "Infobox Commune", "pays", "P17"),
    ];
    let mut out = String::from("# language\ttemplate\tparam\tproperty\n");
    for (lang, template, param, prop) in rows {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", lang, template, param, prop));
    }
    out
}

/// The exemplar property-relation map: family, geographic and temporal
/// relations over the fixture properties, with reliability tiers.
pub fn relation_map() -> PropertyRelationMap {
    let rules = vec![
        MapRule {
            rule_id: "map:P26:family_birth_context".into(),
            source_pid: pid("P26"),
            relation_type: "family_birth_context".into(),
            pivot_pid: Some(pid("P40")),
            target_pid: pid("P569"),
            max_hop: 2,
            tier: Tier::Medium,
            tier_weight: 0.8,
            subject_type: Some(EntityId::new("Q5").expect("valid qid")),
        },
        MapRule {
            rule_id: "map:P40:child_birth".into(),
            source_pid: pid("P40"),
            relation_type: "family_birth".into(),
            pivot_pid: None,
            target_pid: pid("P569"),
            max_hop: 0,
            tier: Tier::High,
            tier_weight: 0.95,
            subject_type: Some(EntityId::new("Q5").expect("valid qid")),
        },
        MapRule {
            rule_id: "map:P26:spouse_occupation".into(),
            source_pid: pid("P26"),
            relation_type: "family_occupation".into(),
            pivot_pid: None,
            target_pid: pid("P106"),
            max_hop: 0,
            tier: Tier::Medium,
            tier_weight: 0.8,
            subject_type: None,
        },
        MapRule {
            rule_id: "map:P19:birthplace_country".into(),
            source_pid: pid("P19"),
            relation_type: "geo_containment".into(),
            pivot_pid: None,
            target_pid: pid("P17"),
            max_hop: 0,
            tier: Tier::High,
            tier_weight: 0.95,
            subject_type: None,
        },
        MapRule {
            rule_id: "map:P19:birthplace_capital".into(),
            source_pid: pid("P19"),
            relation_type: "geo_context".into(),
            pivot_pid: Some(pid("P17")),
            target_pid: pid("P36"),
            max_hop: 1,
            tier: Tier::Low,
            tier_weight: 0.6,
            subject_type: None,
        },
        MapRule {
            rule_id: "map:P17:country_capital".into(),
            source_pid: pid("P17"),
            relation_type: "geo_capital".into(),
            pivot_pid: None,
            target_pid: pid("P36"),
            max_hop: 0,
            tier: Tier::High,
            tier_weight: 0.95,
            subject_type: None,
        },
    ];
    let functional: BTreeSet<PropertyId> =
        ["P569", "P570", "P19", "P21", "P36"].iter().map(|p| pid(p)).collect();
    let descriptive: BTreeSet<PropertyId> =
        ["P31", "P569", "P570", "P106", "P17", "P36", "P625", "P1082"]
            .iter()
            .map(|p| pid(p))
            .collect();
    PropertyRelationMap::from_parts("exemplar", rules, functional, descriptive)
        .expect("shipped map is valid")
}
