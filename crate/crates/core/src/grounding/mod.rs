//! Statement-to-evidence alignment: subject page resolution, the ordered
//! datatype-aware matchers, per-unit deduplication, confidence scoring
//! and deterministic ungrounded reasons.
//!
//! Grounding is strictly scoped to the subject page. Matchers run in
//! priority order (structure, then entity links, then lexical) and the
//! best candidate per evidence unit wins; suppressed candidates stay in
//! the sense's provenance.

mod lexical;

pub use lexical::{
    find_coordinates, find_dates, find_quantities, find_string_occurrences, FoundLiteral,
};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::canon::Value;
use crate::ids::{derive_id, DomainTag};
use crate::model::{EntityId, FactStatement, LinkTables, PropertyId, RawPage, TypedValue, ValueKind};
use crate::pack::LanguagePack;
use crate::policy::{norm_value, NormalizationPolicy};
use crate::views::{cp_slice, Locator, PageViews, SentenceInfo, ViewKind, ViewUnit};

/// A snapshot-anchored, re-locatable span of evidence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EvidencePointer {
    pub page_id: u64,
    pub revision_id: u64,
    pub view: ViewKind,
    pub locator: Locator,
    /// Half-open codepoint span into the normalized unit text.
    pub start: usize,
    pub end: usize,
    pub norm_id: String,
}

impl EvidencePointer {
    pub fn to_canon(&self) -> Value {
        Value::map([
            ("page_id", Value::int(self.page_id as i64)),
            ("revision_id", Value::int(self.revision_id as i64)),
            ("view", Value::str(self.view.as_str())),
            ("locator", self.locator.to_canon()),
            ("start", Value::int(self.start as i64)),
            ("end", Value::int(self.end as i64)),
            ("norm_id", Value::str(self.norm_id.clone())),
        ])
    }

    pub fn from_canon(v: &Value) -> Option<Self> {
        let view = ViewKind::parse(v.get("view")?.as_str()?)?;
        Some(EvidencePointer {
            page_id: v.get("page_id")?.as_num()?.to_f64() as u64,
            revision_id: v.get("revision_id")?.as_num()?.to_f64() as u64,
            view,
            locator: Locator::from_canon(view, v.get("locator")?)?,
            start: v.get("start")?.as_num()?.to_f64() as usize,
            end: v.get("end")?.as_num()?.to_f64() as usize,
            norm_id: v.get("norm_id")?.as_str()?.to_string(),
        })
    }
}

/// Extraction mechanism tier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatchType {
    WikilinkEntity,
    InfoboxField,
    LexicalValue,
    LeadWeak,
}

impl MatchType {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchType::WikilinkEntity => "WIKILINK_ENTITY",
            MatchType::InfoboxField => "INFOBOX_FIELD",
            MatchType::LexicalValue => "LEXICAL_VALUE",
            MatchType::LeadWeak => "LEAD_WEAK",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "WIKILINK_ENTITY" => Some(MatchType::WikilinkEntity),
            "INFOBOX_FIELD" => Some(MatchType::InfoboxField),
            "LEXICAL_VALUE" => Some(MatchType::LexicalValue),
            "LEAD_WEAK" => Some(MatchType::LeadWeak),
            _ => None,
        }
    }

    /// Dedup class priority: structure beats links beats lexical beats
    /// weak lead matches.
    pub fn class_priority(self) -> u8 {
        match self {
            MatchType::InfoboxField => 3,
            MatchType::WikilinkEntity => 2,
            MatchType::LexicalValue => 1,
            MatchType::LeadWeak => 0,
        }
    }

    /// Base confidence factor; values respect the empirical precision
    /// ordering of the four tiers.
    pub fn base_confidence(self) -> f64 {
        match self {
            MatchType::WikilinkEntity => 0.95,
            MatchType::InfoboxField => 0.90,
            MatchType::LexicalValue => 0.80,
            MatchType::LeadWeak => 0.65,
        }
    }
}

/// Sense provenance: the processing configuration plus suppressed
/// alternative match types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub pack_id: String,
    pub tool_version: String,
    pub alternatives: Vec<MatchType>,
}

/// A grounded mention of a statement in one language edition.
#[derive(Clone, Debug)]
pub struct FactSense {
    pub factsense_id: String,
    pub statement_id: String,
    pub language: String,
    pub pointer: EvidencePointer,
    /// The evidence span text (the slice `[start, end)` of the unit).
    pub sentence: String,
    /// Full normalized unit text; released only in the evidence pack.
    pub unit_text: String,
    pub match_type: MatchType,
    pub confidence: f64,
    pub provenance: Provenance,
}

/// Why a sitelinked statement produced no sense in a language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum UngroundedCode {
    NoMatchFound,
    NoValidText,
    DatatypeMismatch,
    ScopeExcluded,
}

impl UngroundedCode {
    pub fn as_str(self) -> &'static str {
        match self {
            UngroundedCode::NoMatchFound => "NO_MATCH_FOUND",
            UngroundedCode::NoValidText => "NO_VALID_TEXT",
            UngroundedCode::DatatypeMismatch => "DATATYPE_MISMATCH",
            UngroundedCode::ScopeExcluded => "SCOPE_EXCLUDED",
        }
    }
}

/// Reason record emitted when grounding yields zero senses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UngroundedReason {
    pub code: UngroundedCode,
    pub statement_id: String,
    pub language: String,
}

/// How the subject page was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionKind {
    Direct,
    Redirect,
    TitleFallback,
    TitleFallbackRedirect,
}

impl ResolutionKind {
    /// Resolution confidence factor: below 1 iff redirects or title
    /// fallback were involved.
    pub fn factor(self) -> f64 {
        match self {
            ResolutionKind::Direct => 1.0,
            ResolutionKind::Redirect => 0.97,
            ResolutionKind::TitleFallback => 0.92,
            ResolutionKind::TitleFallbackRedirect => 0.90,
        }
    }
}

/// Scoring input out of range.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorOutOfRange(pub &'static str, pub f64);

impl fmt::Display for FactorOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "confidence factor {} = {} outside (0, 1]", self.0, self.1)
    }
}

impl core::error::Error for FactorOutOfRange {}

/// Datatype reliability factor for the confidence product.
pub fn dtype_factor(kind: ValueKind) -> f64 {
    match kind {
        ValueKind::Entity => 1.0,
        ValueKind::Time => 0.97,
        ValueKind::ExternalId => 0.96,
        ValueKind::Quantity | ValueKind::Coordinate => 0.95,
        ValueKind::Str | ValueKind::MonoText => 0.92,
        ValueKind::NoValue | ValueKind::SomeValue => 0.9,
    }
}

/// Datatype sanity factor: 1.0 when the value passes its invariant
/// checks, 0.8 otherwise.
pub fn sanity_factor(value: &TypedValue) -> f64 {
    let ok = match value {
        TypedValue::Coordinate(c) => {
            let lat = c.latitude.to_f64();
            let lon = c.longitude.to_f64();
            (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)
        }
        TypedValue::Time(t) => t.month <= 12 && t.day <= 31,
        TypedValue::Quantity(q) => !q.unit.is_empty(),
        _ => true,
    };
    if ok {
        1.0
    } else {
        0.8
    }
}

/// Deterministic sense confidence:
/// `clip[0.5, 0.95](c_base * c_dtype * c_resolve * c_amb * c_sanity)`
/// where `c_amb = 1 / (1 + log2(1 + k))` for `k` competing same-surface
/// candidates in the unit.
pub fn score_confidence(
    match_type: MatchType,
    c_dtype: f64,
    resolution: ResolutionKind,
    ambiguity: u32,
    c_sanity: f64,
) -> Result<f64, FactorOutOfRange> {
    let c_base = match_type.base_confidence();
    let c_resolve = resolution.factor();
    let c_amb = 1.0 / (1.0 + libm::log2(1.0 + ambiguity as f64));
    for (name, v) in [
        ("c_base", c_base),
        ("c_dtype", c_dtype),
        ("c_resolve", c_resolve),
        ("c_amb", c_amb),
        ("c_sanity", c_sanity),
    ] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(FactorOutOfRange(name, v));
        }
    }
    let c = c_base * c_dtype * c_resolve * c_amb * c_sanity;
    Ok(c.clamp(0.5, 0.95))
}

/// Title-keyed page index with redirect and disambiguation handling for
/// one language edition. Built once, then shared read-only.
pub struct PageStore<'a> {
    by_title: BTreeMap<&'a str, &'a RawPage>,
    by_norm_title: BTreeMap<String, Vec<&'a str>>,
    links: &'a LinkTables,
}

const MAX_REDIRECT_HOPS: usize = 16;

impl<'a> PageStore<'a> {
    pub fn build(pages: &'a [RawPage], links: &'a LinkTables, pack: &LanguagePack) -> Self {
        let mut by_title = BTreeMap::new();
        let mut by_norm_title: BTreeMap<String, Vec<&'a str>> = BTreeMap::new();
        for p in pages {
            by_title.insert(p.title.as_str(), p);
            by_norm_title.entry(pack.title_norm(&p.title)).or_default().push(p.title.as_str());
        }
        PageStore { by_title, by_norm_title, links }
    }

    fn is_disambiguation(&self, page: &RawPage) -> bool {
        self.links.disambiguation_pages.contains(&page.page_id)
    }

    /// Follow redirect chains from an exact title to a namespace-0,
    /// non-disambiguation page. Cycles are reported as misses, never
    /// followed.
    pub fn lookup(&self, title: &str) -> Option<(&'a RawPage, bool)> {
        let mut current = title.to_string();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        let mut used_redirect = false;
        for _ in 0..MAX_REDIRECT_HOPS {
            if !seen.insert(current.clone()) {
                return None; // cycle
            }
            if let Some(target) = self.links.redirects.get(&current) {
                current = target.clone();
                used_redirect = true;
                continue;
            }
            let page = *self.by_title.get(current.as_str())?;
            if page.is_redirect {
                let target = page.redirect_target.clone()?;
                current = target;
                used_redirect = true;
                continue;
            }
            if page.namespace != 0 || self.is_disambiguation(page) {
                return None;
            }
            return Some((page, used_redirect));
        }
        None
    }

    /// All distinct final resolutions whose normalized title equals the
    /// given normalized form.
    fn resolve_norm(&self, norm_title: &str) -> Vec<(&'a RawPage, bool)> {
        let mut out: Vec<(&'a RawPage, bool)> = Vec::new();
        if let Some(titles) = self.by_norm_title.get(norm_title) {
            for t in titles {
                if let Some((page, redir)) = self.lookup(t) {
                    if !out.iter().any(|(p, _)| p.page_id == page.page_id) {
                        out.push((page, redir));
                    }
                }
            }
        }
        out
    }
}

/// Resolve the subject page for a statement in one language. The
/// sitelink wins; the conservative title fallback accepts only a unique
/// non-disambiguation namespace-0 resolution. Absence is a value.
pub fn resolve_subject_page<'a>(
    sitelinks: &BTreeMap<String, String>,
    language: &str,
    label: Option<&str>,
    store: &PageStore<'a>,
    pack: &LanguagePack,
    fallback_enabled: bool,
) -> Option<(&'a RawPage, ResolutionKind)> {
    if let Some(title) = sitelinks.get(language) {
        return store.lookup(title).map(|(page, redir)| {
            (page, if redir { ResolutionKind::Redirect } else { ResolutionKind::Direct })
        });
    }
    if !fallback_enabled {
        return None;
    }
    let label = label?;
    let resolved = store.resolve_norm(&pack.title_norm(label));
    match resolved.as_slice() {
        [(page, redir)] => Some((
            *page,
            if *redir { ResolutionKind::TitleFallbackRedirect } else { ResolutionKind::TitleFallback },
        )),
        _ => None, // zero or ambiguous
    }
}

/// Wikilink target resolution: title to entity through redirect chains.
pub struct LinkResolver<'a> {
    store: &'a PageStore<'a>,
    /// Final page title to entity id (reverse sitelink map).
    title_to_entity: &'a BTreeMap<String, EntityId>,
}

impl<'a> LinkResolver<'a> {
    pub fn new(store: &'a PageStore<'a>, title_to_entity: &'a BTreeMap<String, EntityId>) -> Self {
        LinkResolver { store, title_to_entity }
    }

    pub fn resolve(&self, target: &str) -> Option<EntityId> {
        // Direct reverse-sitelink hit first, then through the page store.
        if let Some(q) = self.title_to_entity.get(target) {
            return Some(q.clone());
        }
        let (page, _) = self.store.lookup(target)?;
        self.title_to_entity.get(&page.title).cloned()
    }
}

/// One raw match candidate prior to per-unit deduplication.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub view: ViewKind,
    pub locator: Locator,
    pub unit_text: String,
    pub match_type: MatchType,
    pub start: usize,
    pub end: usize,
    /// Competing same-surface candidates in the unit (the `k` of the
    /// ambiguity factor).
    pub ambiguity: u32,
    /// Unit ordinal for deterministic ordering.
    pub unit_order: usize,
}

impl Candidate {
    fn view_order(&self) -> u8 {
        match self.view {
            ViewKind::InfoboxField => 0,
            ViewKind::TableCell => 1,
            ViewKind::Sentence => 2,
        }
    }

    fn order_key(&self) -> (u8, usize, usize, usize) {
        (self.view_order(), self.unit_order, self.start, self.end)
    }
}

/// Accumulated matcher output for one (statement, page) pair.
#[derive(Default)]
pub struct MatchOutcome {
    pub candidates: Vec<Candidate>,
    /// A literal parsed but was rejected solely by type constraints.
    pub type_rejections: u32,
}

/// The per-language read-only grounding context.
pub struct GroundContext<'a> {
    pub language: &'a str,
    pub store: &'a PageStore<'a>,
    pub resolver: &'a LinkResolver<'a>,
    /// `(template name, param) -> property` for this language.
    pub schema: &'a BTreeMap<(String, String), PropertyId>,
    /// Entity labels in this language, for weak lead matching.
    pub labels: &'a BTreeMap<EntityId, String>,
    pub pack: &'a LanguagePack,
    pub policy: &'a NormalizationPolicy,
    pub build_id: &'a str,
    pub tool_version: &'a str,
}

fn normalized_value(f: &FactStatement, policy: &NormalizationPolicy) -> Option<String> {
    norm_value(&f.property, &f.value, policy).ok().map(|(s, _)| s)
}

fn value_matches(
    property: &PropertyId,
    statement_norm: &str,
    candidate: &TypedValue,
    policy: &NormalizationPolicy,
) -> bool {
    match norm_value(property, candidate, policy) {
        Ok((s, _)) => s == statement_norm,
        Err(_) => false,
    }
}

/// Structure-based matching: infobox fields whose mapped property equals
/// the statement property and whose content normalizes equal to the
/// statement value.
pub fn match_structure(
    f: &FactStatement,
    units: &[ViewUnit],
    ctx: &GroundContext<'_>,
    outcome: &mut MatchOutcome,
) {
    let Some(statement_norm) = normalized_value(f, ctx.policy) else { return };
    for (unit_order, unit) in units.iter().enumerate() {
        let Locator::Infobox { template_path, param } = &unit.locator else { continue };
        let template = template_path.split('#').next().unwrap_or("");
        let Some(mapped) = ctx.schema.get(&(template.to_string(), param.clone())) else {
            continue;
        };
        if mapped != &f.property {
            continue;
        }
        let spans = find_value_spans(f, &unit.text, statement_norm.as_str(), ctx, outcome, true);
        push_spans(outcome, unit, unit_order, MatchType::InfoboxField, spans);
    }
}

/// Link-based matching: sentences containing a wikilink that resolves to
/// exactly the statement's entity value.
pub fn match_link(
    f: &FactStatement,
    sentences: &[&SentenceInfo],
    ctx: &GroundContext<'_>,
    outcome: &mut MatchOutcome,
) {
    let TypedValue::Entity(target) = &f.value else { return };
    for s in sentences {
        let hits: Vec<&crate::views::UnitLink> = s
            .links
            .iter()
            .filter(|l| ctx.resolver.resolve(&l.target).as_ref() == Some(target))
            .collect();
        if hits.is_empty() {
            continue;
        }
        // Ambiguity counts other links sharing the anchor surface.
        for hit in &hits {
            let surface = cp_slice(&s.text, hit.start, hit.end);
            let same_surface = s
                .links
                .iter()
                .filter(|l| cp_slice(&s.text, l.start, l.end) == surface)
                .count() as u32;
            outcome.candidates.push(Candidate {
                view: ViewKind::Sentence,
                locator: Locator::Sentence { index: s.index },
                unit_text: s.text.clone(),
                match_type: MatchType::WikilinkEntity,
                start: hit.start,
                end: hit.end,
                ambiguity: same_surface.saturating_sub(1),
                unit_order: s.index,
            });
        }
    }
}

/// Lexical matching: strict type-aware literal parses inside sentence
/// and table units. String-equality support in the lead is tagged
/// LEAD_WEAK; everything else is LEXICAL_VALUE.
pub fn match_lexical(
    f: &FactStatement,
    sentences: &[&SentenceInfo],
    table_units: &[ViewUnit],
    ctx: &GroundContext<'_>,
    outcome: &mut MatchOutcome,
) {
    let Some(statement_norm) = normalized_value(f, ctx.policy) else { return };

    for s in sentences {
        let spans =
            find_value_spans(f, &s.text, statement_norm.as_str(), ctx, outcome, false);
        let weak = matches!(
            f.value.kind(),
            ValueKind::Str | ValueKind::MonoText | ValueKind::ExternalId
        );
        let match_type = if s.lead && weak { MatchType::LeadWeak } else { MatchType::LexicalValue };
        push_sentence_spans(outcome, s, match_type, spans);

        // Weak entity-label support, lead sentences only.
        if s.lead {
            if let TypedValue::Entity(q) = &f.value {
                if let Some(label) = ctx.labels.get(q) {
                    let occurrences = find_string_occurrences(&s.text, label);
                    let k = occurrences.len().saturating_sub(1) as u32;
                    let spans: Vec<(usize, usize, u32)> =
                        occurrences.into_iter().map(|(a, b)| (a, b, k)).collect();
                    push_sentence_spans(outcome, s, MatchType::LeadWeak, spans);
                }
            }
        }
    }

    for (unit_order, unit) in table_units.iter().enumerate() {
        let spans = find_value_spans(f, &unit.text, statement_norm.as_str(), ctx, outcome, false);
        push_spans(outcome, unit, unit_order, MatchType::LexicalValue, spans);
    }
}

/// Typed literal spans in a unit whose normalized form equals the
/// statement's. Returns `(start, end, ambiguity)` triples.
fn find_value_spans(
    f: &FactStatement,
    text: &str,
    statement_norm: &str,
    ctx: &GroundContext<'_>,
    outcome: &mut MatchOutcome,
    structure_unit: bool,
) -> Vec<(usize, usize, u32)> {
    let mut hits: Vec<(usize, usize)> = Vec::new();
    match &f.value {
        TypedValue::Entity(target) => {
            // Entity values inside structured units: wikilinks in the raw
            // parameter text, or the bare title.
            if structure_unit {
                for (start, end, link_target) in raw_links(text) {
                    if ctx.resolver.resolve(&link_target).as_ref() == Some(target) {
                        hits.push((start, end));
                    }
                }
                if hits.is_empty() {
                    let trimmed = text.trim();
                    if !trimmed.is_empty()
                        && ctx.resolver.resolve(trimmed).as_ref() == Some(target)
                    {
                        let lead_ws = text.chars().take_while(|c| c.is_whitespace()).count();
                        hits.push((lead_ws, lead_ws + trimmed.chars().count()));
                    }
                }
            }
        }
        TypedValue::Time(_) => {
            for found in find_dates(text, ctx.pack) {
                if found.approximate {
                    continue;
                }
                if value_matches(&f.property, statement_norm, &TypedValue::Time(found.value.clone()), ctx.policy)
                {
                    hits.push((found.start, found.end));
                }
            }
        }
        TypedValue::Quantity(expected) => {
            for found in find_quantities(text, ctx.pack) {
                if found.approximate {
                    continue;
                }
                let cand = TypedValue::Quantity(found.value.clone());
                if value_matches(&f.property, statement_norm, &cand, ctx.policy) {
                    hits.push((found.start, found.end));
                } else if found.value.amount == expected.amount
                    || amounts_equal_under_conversion(ctx, &found.value, expected)
                {
                    // Right number, wrong unit under the policy: a type
                    // constraint rejection.
                    outcome.type_rejections += 1;
                }
            }
        }
        TypedValue::Coordinate(_) => {
            for found in find_coordinates(text, ctx.pack) {
                if found.approximate {
                    continue;
                }
                let cand = TypedValue::Coordinate(found.value.clone());
                if value_matches(&f.property, statement_norm, &cand, ctx.policy) {
                    hits.push((found.start, found.end));
                }
            }
        }
        TypedValue::Str { .. } | TypedValue::MonoText { .. } | TypedValue::ExternalId(_) => {
            // The normalized value is plain text for these kinds (the
            // monotext language tag is stripped for surface search).
            let needle = statement_norm.split('@').next().unwrap_or(statement_norm);
            hits.extend(find_string_occurrences(text, needle));
        }
        TypedValue::NoValue | TypedValue::SomeValue => {}
    }
    let k = hits.len().saturating_sub(1) as u32;
    hits.into_iter().map(|(a, b)| (a, b, k)).collect()
}

fn amounts_equal_under_conversion(
    ctx: &GroundContext<'_>,
    found: &crate::model::QuantityValue,
    expected: &crate::model::QuantityValue,
) -> bool {
    let convert = |q: &crate::model::QuantityValue| match ctx.policy.unit_table.get(&q.unit) {
        Some(conv) => (q.amount.mul(&conv.factor), conv.canonical_unit.clone()),
        None => (q.amount.clone(), q.unit.clone()),
    };
    let (fa, _) = convert(found);
    let (ea, _) = convert(expected);
    fa == ea
}

/// Minimal wikilink scan over raw parameter text: `(start, end, target)`
/// with the span covering the full `[[...]]` markup.
fn raw_links(text: &str) -> Vec<(usize, usize, String)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i + 1 < chars.len() {
        if chars[i] == '[' && chars[i + 1] == '[' {
            let mut j = i + 2;
            while j + 1 < chars.len() && !(chars[j] == ']' && chars[j + 1] == ']') {
                j += 1;
            }
            if j + 1 < chars.len() {
                let inner: String = chars[i + 2..j].iter().collect();
                let target = inner.split('|').next().unwrap_or("").split('#').next().unwrap_or("");
                let target = target.trim();
                if !target.is_empty() {
                    out.push((i, j + 2, target.to_string()));
                }
                i = j + 2;
                continue;
            }
        }
        i += 1;
    }
    out
}

fn push_spans(
    outcome: &mut MatchOutcome,
    unit: &ViewUnit,
    unit_order: usize,
    match_type: MatchType,
    spans: Vec<(usize, usize, u32)>,
) {
    for (start, end, ambiguity) in spans {
        outcome.candidates.push(Candidate {
            view: unit.view,
            locator: unit.locator.clone(),
            unit_text: unit.text.clone(),
            match_type,
            start,
            end,
            ambiguity,
            unit_order,
        });
    }
}

fn push_sentence_spans(
    outcome: &mut MatchOutcome,
    s: &SentenceInfo,
    match_type: MatchType,
    spans: Vec<(usize, usize, u32)>,
) {
    for (start, end, ambiguity) in spans {
        outcome.candidates.push(Candidate {
            view: ViewKind::Sentence,
            locator: Locator::Sentence { index: s.index },
            unit_text: s.text.clone(),
            match_type,
            start,
            end,
            ambiguity,
            unit_order: s.index,
        });
    }
}

/// Per-unit deduplication: one kept candidate per evidence unit, highest
/// class priority first, ties broken by (view order, locator order,
/// start offset). Returns the keepers paired with their suppressed
/// alternatives' match types.
pub fn dedup_candidates(mut candidates: Vec<Candidate>) -> Vec<(Candidate, Vec<MatchType>)> {
    candidates.sort_by_key(|c| (core::cmp::Reverse(c.match_type.class_priority()), c.order_key()));
    // Best-first over the whole list; the first candidate seen per unit
    // is the keeper.
    let mut by_unit: BTreeMap<(u8, Locator), (Candidate, Vec<MatchType>)> = BTreeMap::new();
    for c in candidates {
        let key = (c.view_order(), c.locator.clone());
        match by_unit.get_mut(&key) {
            None => {
                by_unit.insert(key, (c, Vec::new()));
            }
            Some((kept, alternatives)) => {
                // Identical duplicates collapse silently.
                let identical = kept.match_type == c.match_type
                    && kept.start == c.start
                    && kept.end == c.end;
                if !identical {
                    alternatives.push(c.match_type);
                }
            }
        }
    }
    let mut out: Vec<(Candidate, Vec<MatchType>)> = by_unit.into_values().collect();
    for (_, alts) in out.iter_mut() {
        alts.sort_by_key(|m| core::cmp::Reverse(m.class_priority()));
        alts.dedup();
    }
    out.sort_by_key(|(kept, _)| kept.order_key());
    out
}

/// Ground one statement against its resolved subject page. Exactly one
/// of senses or a reason code comes back.
pub fn ground_statement(
    f: &FactStatement,
    page: &RawPage,
    views: &PageViews,
    resolution: ResolutionKind,
    ctx: &GroundContext<'_>,
) -> Result<Vec<FactSense>, UngroundedCode> {
    if views.is_empty() {
        return Err(UngroundedCode::NoValidText);
    }

    let excluded: BTreeSet<String> =
        ctx.pack.excluded_sections.iter().map(|s| s.to_lowercase()).collect();
    let in_scope: Vec<&SentenceInfo> = views
        .sentence
        .sentences
        .iter()
        .filter(|s| !is_excluded(s, &excluded))
        .collect();
    let out_of_scope: Vec<&SentenceInfo> = views
        .sentence
        .sentences
        .iter()
        .filter(|s| is_excluded(s, &excluded))
        .collect();

    let mut outcome = MatchOutcome::default();
    match_structure(f, &views.infobox, ctx, &mut outcome);
    match_link(f, &in_scope, ctx, &mut outcome);
    match_lexical(f, &in_scope, &views.table, ctx, &mut outcome);

    if outcome.candidates.is_empty() {
        // Scan excluded sections only to explain the absence.
        let mut shadow = MatchOutcome::default();
        match_link(f, &out_of_scope, ctx, &mut shadow);
        match_lexical(f, &out_of_scope, &[], ctx, &mut shadow);
        if !shadow.candidates.is_empty() {
            return Err(UngroundedCode::ScopeExcluded);
        }
        if outcome.type_rejections > 0 {
            return Err(UngroundedCode::DatatypeMismatch);
        }
        return Err(UngroundedCode::NoMatchFound);
    }

    let kept = dedup_candidates(core::mem::take(&mut outcome.candidates));
    let c_dtype = dtype_factor(f.value.kind());
    let c_sanity = sanity_factor(&f.value);
    let mut senses = Vec::with_capacity(kept.len());
    for (cand, alternatives) in kept {
        let confidence =
            score_confidence(cand.match_type, c_dtype, resolution, cand.ambiguity, c_sanity)
                .expect("factors in range");
        let pointer = EvidencePointer {
            page_id: page.page_id,
            revision_id: page.revision_id,
            view: cand.view,
            locator: cand.locator.clone(),
            start: cand.start,
            end: cand.end,
            norm_id: crate::views::norm_id(ctx.pack, cand.view),
        };
        let id_record = Value::map([
            ("statement_id", Value::str(f.statement_id.clone())),
            ("page_id", Value::int(page.page_id as i64)),
            ("pointer", pointer.to_canon()),
        ]);
        let factsense_id = derive_id(DomainTag::FactSense, ctx.build_id, &id_record)
            .expect("pointer canonicalizes");
        senses.push(FactSense {
            factsense_id,
            statement_id: f.statement_id.clone(),
            language: ctx.language.to_string(),
            sentence: cp_slice(&cand.unit_text, cand.start, cand.end),
            unit_text: cand.unit_text,
            pointer,
            match_type: cand.match_type,
            confidence,
            provenance: Provenance {
                pack_id: ctx.pack.pack_id.clone(),
                tool_version: ctx.tool_version.to_string(),
                alternatives,
            },
        });
    }
    Ok(senses)
}

fn is_excluded(s: &SentenceInfo, excluded: &BTreeSet<String>) -> bool {
    s.section.as_ref().is_some_and(|sec| excluded.contains(&sec.to_lowercase()))
}

/// Record form of a sense. The structural pack omits the text fields;
/// the evidence pack carries them plus attribution metadata.
pub fn sense_to_canon(sense: &FactSense, include_text: bool) -> Value {
    let alts: Vec<Value> = sense
        .provenance
        .alternatives
        .iter()
        .map(|m| Value::str(m.as_str()))
        .collect();
    let mut fields = alloc::vec![
        ("factsense_id", Value::str(sense.factsense_id.clone())),
        ("statement_id", Value::str(sense.statement_id.clone())),
        ("language", Value::str(sense.language.clone())),
        ("pointer", sense.pointer.to_canon()),
        ("match_type", Value::str(sense.match_type.as_str())),
        (
            "confidence",
            Value::try_f64(sense.confidence).expect("confidence finite"),
        ),
        (
            "provenance",
            Value::map([
                ("pack_id", Value::str(sense.provenance.pack_id.clone())),
                ("tool_version", Value::str(sense.provenance.tool_version.clone())),
                ("alternatives", Value::Arr(alts)),
            ]),
        ),
    ];
    if include_text {
        fields.push(("sentence", Value::str(sense.sentence.clone())));
        fields.push(("unit_text", Value::str(sense.unit_text.clone())));
    }
    Value::map(fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decimal::Decimal;
    use crate::model::{QuantityValue, Rank, TimePrecision, TimeValue};
    use crate::pack::{LexicalRules, SegmenterBackend, WikiRules};
    use crate::statements::statement_confidence;
    use crate::views::build_page_views;
    use alloc::vec;

    fn pack() -> LanguagePack {
        let months = [
            "January", "February", "March", "April", "May", "June", "July", "August",
            "September", "October", "November", "December",
        ];
        let mut units = BTreeMap::new();
        units.insert("cm".to_string(), "Q174728".to_string());
        units.insert("m".to_string(), "Q11573".to_string());
        LanguagePack::new(
            "en",
            SegmenterBackend::RuleBased,
            vec!['.', '!', '?'],
            vec![('(', ')')],
            vec!["Dr.".to_string()],
            vec!["See also".to_string(), "References".to_string(), "External links".to_string()],
            WikiRules { capitalize_first: true },
            LexicalRules {
                month_names: months.iter().map(|s| s.to_string()).collect(),
                approximation_markers: vec!["about".into(), "circa".into(), "~".into()],
                unit_surface_forms: units,
                decimal_comma: false,
            },
        )
    }

    fn page(page_id: u64, title: &str, text: &str) -> RawPage {
        RawPage {
            page_id,
            revision_id: page_id * 10,
            title: title.to_string(),
            namespace: 0,
            wikitext: text.to_string(),
            is_redirect: false,
            redirect_target: None,
        }
    }

    fn statement(id: &str, subject: &str, property: &str, value: TypedValue) -> FactStatement {
        FactStatement {
            statement_id: id.to_string(),
            subject: EntityId::new(subject).unwrap(),
            property: PropertyId::new(property).unwrap(),
            value,
            qualifiers: vec![],
            rank: Rank::Normal,
            references: vec![],
            last_edit: "2025-11-01T00:00:00Z".to_string(),
            sitelinks: BTreeMap::new(),
            confidence: statement_confidence(Rank::Normal, 0),
            claim_hash: String::new(),
            synthetic_id: false,
        }
    }

    struct Fixture {
        pages: Vec<RawPage>,
        links: LinkTables,
        titles: BTreeMap<String, EntityId>,
        schema: BTreeMap<(String, String), PropertyId>,
        labels: BTreeMap<EntityId, String>,
        pack: LanguagePack,
        policy: NormalizationPolicy,
    }

    impl Fixture {
        fn new(pages: Vec<RawPage>) -> Self {
            let mut titles = BTreeMap::new();
            titles.insert("Berlin".to_string(), EntityId::new("Q64").unwrap());
            titles.insert("Alice".to_string(), EntityId::new("Q1").unwrap());
            titles.insert("Bob".to_string(), EntityId::new("Q2").unwrap());
            let mut schema = BTreeMap::new();
            schema.insert(
                ("Infobox person".to_string(), "birth_date".to_string()),
                PropertyId::new("P569").unwrap(),
            );
            schema.insert(
                ("Infobox person".to_string(), "height".to_string()),
                PropertyId::new("P2048").unwrap(),
            );
            schema.insert(
                ("Infobox person".to_string(), "birth_place".to_string()),
                PropertyId::new("P19").unwrap(),
            );
            let mut labels = BTreeMap::new();
            labels.insert(EntityId::new("Q64").unwrap(), "Berlin".to_string());
            Fixture {
                pages,
                links: LinkTables::default(),
                titles,
                schema,
                labels,
                pack: pack(),
                policy: NormalizationPolicy::default_policy(),
            }
        }

        fn ground(&self, f: &FactStatement) -> Result<Vec<FactSense>, UngroundedCode> {
            let store = PageStore::build(&self.pages, &self.links, &self.pack);
            let resolver = LinkResolver::new(&store, &self.titles);
            let ctx = GroundContext {
                language: "en",
                store: &store,
                resolver: &resolver,
                schema: &self.schema,
                labels: &self.labels,
                pack: &self.pack,
                policy: &self.policy,
                build_id: "test-build",
                tool_version: "0.0.0",
            };
            let allow: BTreeSet<String> = ["Infobox person".to_string()].into();
            let views = build_page_views(&self.pages[0].wikitext, &self.pack, &allow).unwrap();
            ground_statement(f, &self.pages[0], &views, ResolutionKind::Direct, &ctx)
        }
    }

    #[test]
    fn wikilink_match_produces_sense_with_anchor_span() {
        let fx = Fixture::new(vec![page(
            1,
            "Alice",
            "Alice lives happily. She was born in [[Berlin]] long ago.",
        )]);
        let f = statement("Q1$s1", "Q1", "P19", TypedValue::Entity(EntityId::new("Q64").unwrap()));
        let senses = fx.ground(&f).unwrap();
        assert_eq!(senses.len(), 1);
        let s = &senses[0];
        assert_eq!(s.match_type, MatchType::WikilinkEntity);
        assert_eq!(s.sentence, "Berlin");
        assert_eq!(s.pointer.view, ViewKind::Sentence);
        assert!(s.confidence >= 0.5 && s.confidence <= 0.95);
    }

    #[test]
    fn redirect_chains_are_followed_for_link_targets() {
        let mut fx = Fixture::new(vec![page(
            1,
            "Alice",
            "Some intro. She was born in [[The capital]] long ago.",
        )]);
        fx.links.redirects.insert("The capital".to_string(), "Berlin".to_string());
        fx.pages.push(page(2, "Berlin", "Berlin is a city."));
        let f = statement("Q1$s1", "Q1", "P19", TypedValue::Entity(EntityId::new("Q64").unwrap()));
        let senses = fx.ground(&f).unwrap();
        assert_eq!(senses[0].match_type, MatchType::WikilinkEntity);
    }

    #[test]
    fn infobox_match_beats_lexical_on_same_unit() {
        let fx = Fixture::new(vec![page(
            1,
            "Alice",
            "{{Infobox person|birth_date=12 May 1999}}\nAlice was born on 12 May 1999 in town.",
        )]);
        let f = statement(
            "Q1$s1",
            "Q1",
            "P569",
            TypedValue::Time(TimeValue::ymd(1999, 5, 12, TimePrecision::Day)),
        );
        let senses = fx.ground(&f).unwrap();
        // One sense on the infobox unit, one on the sentence.
        assert_eq!(senses.len(), 2);
        let infobox = senses.iter().find(|s| s.pointer.view == ViewKind::InfoboxField).unwrap();
        assert_eq!(infobox.match_type, MatchType::InfoboxField);
        let sent = senses.iter().find(|s| s.pointer.view == ViewKind::Sentence).unwrap();
        assert_eq!(sent.match_type, MatchType::LexicalValue);
        assert_eq!(sent.sentence, "12 May 1999");
    }

    #[test]
    fn approximation_marker_blocks_quantity_match() {
        let fx = Fixture::new(vec![page(
            1,
            "Alice",
            "Her height is about 1.7 m according to fans.",
        )]);
        let f = statement(
            "Q1$s1",
            "Q1",
            "P2048",
            TypedValue::Quantity(QuantityValue {
                amount: Decimal::parse("1.7").unwrap(),
                unit: "Q11573".to_string(),
            }),
        );
        assert_eq!(fx.ground(&f).unwrap_err(), UngroundedCode::NoMatchFound);
    }

    #[test]
    fn unit_mismatch_reports_datatype_rejection() {
        let fx = Fixture::new(vec![page(1, "Alice", "Her height is 170 cm on record.")]);
        // Statement says 170 metres; the text says 170 cm. Same number,
        // failing unit constraint.
        let f = statement(
            "Q1$s1",
            "Q1",
            "P2048",
            TypedValue::Quantity(QuantityValue {
                amount: Decimal::parse("170").unwrap(),
                unit: "Q11573".to_string(),
            }),
        );
        assert_eq!(fx.ground(&f).unwrap_err(), UngroundedCode::DatatypeMismatch);
    }

    #[test]
    fn empty_views_yield_no_valid_text() {
        let fx = Fixture::new(vec![page(1, "Alice", "{{OnlyTemplate|x=1}}")]);
        let f = statement("Q1$s1", "Q1", "P19", TypedValue::Entity(EntityId::new("Q64").unwrap()));
        assert_eq!(fx.ground(&f).unwrap_err(), UngroundedCode::NoValidText);
    }

    #[test]
    fn excluded_section_hit_yields_scope_excluded() {
        let fx = Fixture::new(vec![page(
            1,
            "Alice",
            "An intro sentence here.\n\n== See also ==\nRelated is [[Berlin]] too.\n",
        )]);
        let f = statement("Q1$s1", "Q1", "P19", TypedValue::Entity(EntityId::new("Q64").unwrap()));
        assert_eq!(fx.ground(&f).unwrap_err(), UngroundedCode::ScopeExcluded);
    }

    #[test]
    fn lead_weak_entity_label_match() {
        let fx = Fixture::new(vec![page(
            1,
            "Alice",
            "Alice comes from Berlin originally. Later she moved away.\n\n== Life ==\nMore Berlin text.",
        )]);
        let f = statement("Q1$s1", "Q1", "P19", TypedValue::Entity(EntityId::new("Q64").unwrap()));
        let senses = fx.ground(&f).unwrap();
        // Label match in the lead only; the Life-section mention is not a
        // link and entity labels match weakly only in the lead.
        assert_eq!(senses.len(), 1);
        assert_eq!(senses[0].match_type, MatchType::LeadWeak);
        assert_eq!(senses[0].sentence, "Berlin");
    }

    #[test]
    fn confidence_examples_and_bounds() {
        // All factors 1 with the link tier base lands on the upper clip.
        let c = score_confidence(MatchType::WikilinkEntity, 1.0, ResolutionKind::Direct, 0, 1.0)
            .unwrap();
        assert_eq!(c, 0.95);
        // A product below 0.5 clips up to 0.5.
        let c = score_confidence(MatchType::LeadWeak, 0.92, ResolutionKind::TitleFallbackRedirect, 7, 0.8)
            .unwrap();
        assert_eq!(c, 0.5);
        // Lower base with identical factors scores strictly lower while
        // the products stay inside the clip band.
        let hi = score_confidence(MatchType::WikilinkEntity, 0.97, ResolutionKind::Redirect, 0, 1.0)
            .unwrap();
        let lo = score_confidence(MatchType::LexicalValue, 0.97, ResolutionKind::Redirect, 0, 1.0)
            .unwrap();
        assert!(lo < hi);
    }

    #[test]
    fn priority_soundness_no_unit_carries_two_senses() {
        let fx = Fixture::new(vec![page(
            1,
            "Alice",
            "{{Infobox person|birth_place=[[Berlin]]}}\nShe was born in [[Berlin]] and stayed.",
        )]);
        let f = statement("Q1$s1", "Q1", "P19", TypedValue::Entity(EntityId::new("Q64").unwrap()));
        let senses = fx.ground(&f).unwrap();
        let mut units: Vec<&Locator> = senses.iter().map(|s| &s.pointer.locator).collect();
        units.sort();
        units.dedup();
        assert_eq!(units.len(), senses.len());
        for s in &senses {
            for alt in &s.provenance.alternatives {
                assert!(s.match_type.class_priority() >= alt.class_priority());
            }
        }
    }

    #[test]
    fn resolve_subject_page_modes() {
        let mut pages = vec![page(1, "Alice", "Text."), page(2, "Alicia", "Other.")];
        pages.push(RawPage {
            page_id: 3,
            revision_id: 30,
            title: "Alice Redirect".to_string(),
            namespace: 0,
            wikitext: "#REDIRECT [[Alice]]".to_string(),
            is_redirect: true,
            redirect_target: Some("Alice".to_string()),
        });
        let links = LinkTables::default();
        let p = pack();
        let store = PageStore::build(&pages, &links, &p);

        // Sitelink present and page exists.
        let mut sitelinks = BTreeMap::new();
        sitelinks.insert("en".to_string(), "Alice".to_string());
        let (hit, kind) =
            resolve_subject_page(&sitelinks, "en", None, &store, &p, false).unwrap();
        assert_eq!(hit.page_id, 1);
        assert_eq!(kind, ResolutionKind::Direct);

        // Sitelink through a redirect.
        let mut sl2 = BTreeMap::new();
        sl2.insert("en".to_string(), "Alice Redirect".to_string());
        let (hit, kind) = resolve_subject_page(&sl2, "en", None, &store, &p, false).unwrap();
        assert_eq!(hit.page_id, 1);
        assert_eq!(kind, ResolutionKind::Redirect);

        // No sitelink, fallback disabled: none.
        let empty = BTreeMap::new();
        assert!(resolve_subject_page(&empty, "en", Some("Alice"), &store, &p, false).is_none());

        // Fallback enabled, unique resolution.
        let (hit, kind) =
            resolve_subject_page(&empty, "en", Some("alice"), &store, &p, true).unwrap();
        assert_eq!(hit.page_id, 1);
        assert_eq!(kind, ResolutionKind::TitleFallback);
    }

    #[test]
    fn ambiguous_fallback_is_rejected() {
        // Both titles normalize to "Mercury"; the fallback must refuse to
        // pick between them.
        let pages = vec![page(1, "Mercury", "Planet."), page(2, "mercury", "Element.")];
        let links = LinkTables::default();
        let p = pack();
        let store = PageStore::build(&pages, &links, &p);
        let empty = BTreeMap::new();
        assert!(resolve_subject_page(&empty, "en", Some("mercury"), &store, &p, true).is_none());
    }

    #[test]
    fn disambiguation_pages_are_rejected() {
        let pages = vec![page(1, "Alice", "Alice may refer to several people.")];
        let mut links = LinkTables::default();
        links.disambiguation_pages.insert(1);
        let p = pack();
        let store = PageStore::build(&pages, &links, &p);
        let mut sitelinks = BTreeMap::new();
        sitelinks.insert("en".to_string(), "Alice".to_string());
        assert!(resolve_subject_page(&sitelinks, "en", None, &store, &p, false).is_none());
    }

    #[test]
    fn redirect_cycles_are_reported_not_followed() {
        let pages = vec![page(1, "Real", "Content.")];
        let mut links = LinkTables::default();
        links.redirects.insert("A".to_string(), "B".to_string());
        links.redirects.insert("B".to_string(), "A".to_string());
        let p = pack();
        let store = PageStore::build(&pages, &links, &p);
        assert!(store.lookup("A").is_none());
        assert!(store.lookup("Real").is_some());
    }

    #[test]
    fn confidence_monotone_in_each_factor() {
        let base = score_confidence(MatchType::LexicalValue, 0.9, ResolutionKind::Redirect, 2, 0.8)
            .unwrap();
        let better_dtype =
            score_confidence(MatchType::LexicalValue, 0.95, ResolutionKind::Redirect, 2, 0.8)
                .unwrap();
        let better_resolve =
            score_confidence(MatchType::LexicalValue, 0.9, ResolutionKind::Direct, 2, 0.8).unwrap();
        let better_amb = score_confidence(MatchType::LexicalValue, 0.9, ResolutionKind::Redirect, 1, 0.8)
            .unwrap();
        let better_sanity =
            score_confidence(MatchType::LexicalValue, 0.9, ResolutionKind::Redirect, 2, 1.0)
                .unwrap();
        for c in [better_dtype, better_resolve, better_amb, better_sanity] {
            assert!(c >= base);
        }
    }

    #[test]
    fn factor_out_of_range_is_an_error() {
        assert!(score_confidence(MatchType::LexicalValue, 0.0, ResolutionKind::Direct, 0, 1.0)
            .is_err());
        assert!(score_confidence(MatchType::LexicalValue, 1.2, ResolutionKind::Direct, 0, 1.0)
            .is_err());
    }
}
