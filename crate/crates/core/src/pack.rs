//! Versioned per-language configuration of text normalization, sentence
//! segmentation, title rules and lexical matching data.
//!
//! A pack is serialized as canonical JSON and identified by the SHA-256
//! of its content; every grounded sense records the pack id it was built
//! under, so segmentation decisions stay reconstructible even if code
//! defaults move.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::canon::{canon_serialize, Value};
use crate::ids::sha256_hex;

/// Segmentation engine selection. The external backend is an adapter
/// interface; this repository ships only the rule-based engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmenterBackend {
    RuleBased,
    External,
}

impl SegmenterBackend {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmenterBackend::RuleBased => "rule_based",
            SegmenterBackend::External => "external",
        }
    }
}

/// Title normalization rules for one language edition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WikiRules {
    /// MediaWiki-style first-letter capitalization.
    pub capitalize_first: bool,
}

/// Lexical matching data: locale-dependent date and number surface forms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LexicalRules {
    /// Month names, index 0 = January. Used by the date grammar.
    pub month_names: Vec<String>,
    /// Tokens that mark an approximate value and block strict quantity
    /// and time matches ("about", "circa", "~").
    pub approximation_markers: Vec<String>,
    /// Surface forms of measurement units mapped to unit entity ids.
    pub unit_surface_forms: BTreeMap<String, String>,
    /// Decimal comma locale (e.g. German "1,7").
    pub decimal_comma: bool,
}

/// A versioned language pack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguagePack {
    pub language: String,
    pub backend: SegmenterBackend,
    /// Unicode normalization form tag; the pipeline implements `nfc`.
    pub unicode_form: String,
    /// Sentence-terminal characters.
    pub terminal_punct: Vec<char>,
    /// Paired delimiters that suppress boundaries while open.
    pub suppression_pairs: Vec<(char, char)>,
    /// Literal token exceptions: a terminal character ending one of
    /// these tokens is not a boundary ("Dr.", "z. B.").
    pub abbreviation_exceptions: Vec<String>,
    /// Fragments shorter than this many non-space codepoints merge into
    /// the following sentence.
    pub min_sentence_len: usize,
    /// Section headings whose content is out of grounding scope.
    pub excluded_sections: Vec<String>,
    pub wiki_rules: WikiRules,
    pub lexical: LexicalRules,
    /// SHA-256 of the canonical pack content.
    pub pack_id: String,
}

/// Pack file schema violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackError(pub String);

impl fmt::Display for PackError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid language pack: {}", self.0)
    }
}

impl core::error::Error for PackError {}

impl LanguagePack {
    /// Build a pack and compute its content id.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        language: &str,
        backend: SegmenterBackend,
        terminal_punct: Vec<char>,
        suppression_pairs: Vec<(char, char)>,
        abbreviation_exceptions: Vec<String>,
        excluded_sections: Vec<String>,
        wiki_rules: WikiRules,
        lexical: LexicalRules,
    ) -> Self {
        let mut pack = LanguagePack {
            language: language.to_string(),
            backend,
            unicode_form: "nfc".to_string(),
            terminal_punct,
            suppression_pairs,
            abbreviation_exceptions,
            min_sentence_len: 2,
            excluded_sections,
            wiki_rules,
            lexical,
            pack_id: String::new(),
        };
        pack.pack_id = pack.content_hash();
        pack
    }

    /// SHA-256 over the canonical pack content (the id field excluded).
    pub fn content_hash(&self) -> String {
        sha256_hex(&canon_serialize(&self.body_canon()))
    }

    fn body_canon(&self) -> Value {
        let punct: Vec<Value> =
            self.terminal_punct.iter().map(|c| Value::str(c.to_string())).collect();
        let pairs: Vec<Value> = self
            .suppression_pairs
            .iter()
            .map(|(o, c)| {
                Value::Arr(alloc::vec![Value::str(o.to_string()), Value::str(c.to_string())])
            })
            .collect();
        let abbr: Vec<Value> =
            self.abbreviation_exceptions.iter().map(|s| Value::str(s.clone())).collect();
        let excl: Vec<Value> =
            self.excluded_sections.iter().map(|s| Value::str(s.clone())).collect();
        let months: Vec<Value> =
            self.lexical.month_names.iter().map(|s| Value::str(s.clone())).collect();
        let markers: Vec<Value> =
            self.lexical.approximation_markers.iter().map(|s| Value::str(s.clone())).collect();
        let units: BTreeMap<String, Value> = self
            .lexical
            .unit_surface_forms
            .iter()
            .map(|(k, v)| (k.clone(), Value::str(v.clone())))
            .collect();
        Value::map([
            ("language", Value::str(self.language.clone())),
            ("backend", Value::str(self.backend.as_str())),
            (
                "normalization",
                Value::map([
                    ("unicode_form", Value::str(self.unicode_form.clone())),
                    ("min_sentence_len", Value::int(self.min_sentence_len as i64)),
                ]),
            ),
            ("terminal_punct", Value::Arr(punct)),
            ("suppression_pairs", Value::Arr(pairs)),
            ("abbreviation_exceptions", Value::Arr(abbr)),
            ("excluded_sections", Value::Arr(excl)),
            (
                "wiki_rules",
                Value::map([("capitalize_first", Value::Bool(self.wiki_rules.capitalize_first))]),
            ),
            (
                "lexical",
                Value::map([
                    ("month_names", Value::Arr(months)),
                    ("approximation_markers", Value::Arr(markers)),
                    ("unit_surface_forms", Value::Map(units)),
                    ("decimal_comma", Value::Bool(self.lexical.decimal_comma)),
                ]),
            ),
        ])
    }

    pub fn to_canon(&self) -> Value {
        self.body_canon()
    }

    /// Load from parsed canonical JSON; the id is always recomputed.
    pub fn from_canon(v: &Value) -> Result<Self, PackError> {
        let str_list = |val: Option<&Value>| -> Vec<String> {
            val.and_then(Value::as_arr)
                .map(|a| a.iter().filter_map(Value::as_str).map(str::to_string).collect())
                .unwrap_or_default()
        };
        let language = v
            .get("language")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| PackError("missing 'language'".to_string()))?;
        let backend = match v.get("backend").and_then(Value::as_str) {
            Some("rule_based") | None => SegmenterBackend::RuleBased,
            Some("external") => SegmenterBackend::External,
            Some(other) => return Err(PackError(alloc::format!("unknown backend '{}'", other))),
        };
        let terminal_punct: Vec<char> = str_list(v.get("terminal_punct"))
            .iter()
            .filter_map(|s| s.chars().next())
            .collect();
        let mut suppression_pairs = Vec::new();
        if let Some(pairs) = v.get("suppression_pairs").and_then(Value::as_arr) {
            for p in pairs {
                let pair = p.as_arr().filter(|a| a.len() == 2).ok_or_else(|| {
                    PackError("suppression pair must be [open, close]".to_string())
                })?;
                let open = pair[0].as_str().and_then(|s| s.chars().next());
                let close = pair[1].as_str().and_then(|s| s.chars().next());
                match (open, close) {
                    (Some(oc), Some(cc)) => suppression_pairs.push((oc, cc)),
                    _ => return Err(PackError("empty suppression delimiter".to_string())),
                }
            }
        }
        let norm = v.get("normalization");
        let min_sentence_len = norm
            .and_then(|n| n.get("min_sentence_len"))
            .and_then(Value::as_num)
            .map(|d| d.to_f64() as usize)
            .unwrap_or(2);
        let unicode_form = norm
            .and_then(|n| n.get("unicode_form"))
            .and_then(Value::as_str)
            .unwrap_or("nfc")
            .to_string();
        let wiki_rules = WikiRules {
            capitalize_first: v
                .get("wiki_rules")
                .and_then(|w| w.get("capitalize_first"))
                .and_then(Value::as_bool)
                .unwrap_or(true),
        };
        let lex = v.get("lexical");
        let mut unit_surface_forms = BTreeMap::new();
        if let Some(Value::Map(m)) = lex.and_then(|l| l.get("unit_surface_forms")) {
            for (k, val) in m {
                if let Some(s) = val.as_str() {
                    unit_surface_forms.insert(k.clone(), s.to_string());
                }
            }
        }
        let lexical = LexicalRules {
            month_names: str_list(lex.and_then(|l| l.get("month_names"))),
            approximation_markers: str_list(lex.and_then(|l| l.get("approximation_markers"))),
            unit_surface_forms,
            decimal_comma: lex
                .and_then(|l| l.get("decimal_comma"))
                .and_then(Value::as_bool)
                .unwrap_or(false),
        };
        let mut pack = LanguagePack {
            language,
            backend,
            unicode_form,
            terminal_punct,
            suppression_pairs,
            abbreviation_exceptions: str_list(v.get("abbreviation_exceptions")),
            min_sentence_len,
            excluded_sections: str_list(v.get("excluded_sections")),
            wiki_rules,
            lexical,
            pack_id: String::new(),
        };
        pack.pack_id = pack.content_hash();
        Ok(pack)
    }

    /// Deterministic title normalization: underscores to spaces, collapsed
    /// whitespace, trimmed, first letter capitalized where the edition
    /// does so.
    pub fn title_norm(&self, title: &str) -> String {
        let mut out = String::with_capacity(title.len());
        let mut last_space = true;
        for c in title.chars() {
            let c = if c == '_' { ' ' } else { c };
            if c.is_whitespace() {
                if !last_space {
                    out.push(' ');
                }
                last_space = true;
            } else {
                out.push(c);
                last_space = false;
            }
        }
        while out.ends_with(' ') {
            out.pop();
        }
        if self.wiki_rules.capitalize_first {
            let mut chars = out.chars();
            if let Some(first) = chars.next() {
                let rest: String = chars.collect();
                out = first.to_uppercase().collect::<String>() + &rest;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_pack() -> LanguagePack {
        LanguagePack::new(
            "en",
            SegmenterBackend::RuleBased,
            alloc::vec!['.', '!', '?'],
            alloc::vec![('(', ')'), ('"', '"')],
            alloc::vec!["Dr.".to_string()],
            alloc::vec!["See also".to_string()],
            WikiRules { capitalize_first: true },
            LexicalRules::default(),
        )
    }

    #[test]
    fn pack_id_is_recomputable_and_round_trips() {
        let pack = minimal_pack();
        assert_eq!(pack.pack_id, pack.content_hash());
        let reloaded = LanguagePack::from_canon(&pack.to_canon()).unwrap();
        assert_eq!(reloaded, pack);
        assert_eq!(reloaded.pack_id, pack.pack_id);
    }

    #[test]
    fn pack_id_tracks_content() {
        let a = minimal_pack();
        let mut b = minimal_pack();
        b.abbreviation_exceptions.push("Prof.".to_string());
        b.pack_id = b.content_hash();
        assert_ne!(a.pack_id, b.pack_id);
    }

    #[test]
    fn title_norm_rules() {
        let pack = minimal_pack();
        assert_eq!(pack.title_norm("alice_müller"), "Alice müller");
        assert_eq!(pack.title_norm("  spaced   out "), "Spaced out");
        assert_eq!(pack.title_norm(""), "");
    }
}
