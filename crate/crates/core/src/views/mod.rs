//! The three provenance-stable text views of a page: sentences, infobox
//! fields and table cells.
//!
//! Offsets everywhere in this module are Unicode codepoint offsets into
//! normalized strings, half-open. Slicing a stored interval out of the
//! view's normalized stream reproduces the unit text exactly; that
//! round-trip property is what makes evidence pointers re-locatable.

mod segment;
mod wikitext;

pub use segment::{segment_rule_based, RuleBasedSegmenter, SentenceSegmenter};
pub use wikitext::{
    extract_tables, extract_templates, normalize_template_name, ParseDegenerate, TemplateCall,
};

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use unicode_normalization::{is_nfc, UnicodeNormalization};

use crate::canon::Value;
use crate::pack::LanguagePack;

/// Codepoint length of a string.
pub fn cp_len(s: &str) -> usize {
    s.chars().count()
}

/// Slice by codepoint offsets; clamps to the string length.
pub fn cp_slice(s: &str, start: usize, end: usize) -> String {
    s.chars().skip(start).take(end.saturating_sub(start)).collect()
}

/// The three view kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViewKind {
    Sentence,
    InfoboxField,
    TableCell,
}

impl ViewKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViewKind::Sentence => "SENTENCE",
            ViewKind::InfoboxField => "INFOBOX_FIELD",
            ViewKind::TableCell => "TABLE_CELL",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "SENTENCE" => Some(ViewKind::Sentence),
            "INFOBOX_FIELD" => Some(ViewKind::InfoboxField),
            "TABLE_CELL" => Some(ViewKind::TableCell),
            _ => None,
        }
    }
}

/// View-specific unit address.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Locator {
    Sentence { index: usize },
    Infobox { template_path: String, param: String },
    Table { table: usize, row: usize, col: usize },
}

impl Locator {
    pub fn to_canon(&self) -> Value {
        match self {
            Locator::Sentence { index } => {
                Value::map([("sentence_index", Value::int(*index as i64))])
            }
            Locator::Infobox { template_path, param } => Value::map([
                ("template_path", Value::str(template_path.clone())),
                ("param", Value::str(param.clone())),
            ]),
            Locator::Table { table, row, col } => Value::map([
                ("table", Value::int(*table as i64)),
                ("row", Value::int(*row as i64)),
                ("col", Value::int(*col as i64)),
            ]),
        }
    }

    pub fn from_canon(view: ViewKind, v: &Value) -> Option<Self> {
        match view {
            ViewKind::Sentence => Some(Locator::Sentence {
                index: v.get("sentence_index")?.as_num()?.to_f64() as usize,
            }),
            ViewKind::InfoboxField => Some(Locator::Infobox {
                template_path: v.get("template_path")?.as_str()?.to_string(),
                param: v.get("param")?.as_str()?.to_string(),
            }),
            ViewKind::TableCell => Some(Locator::Table {
                table: v.get("table")?.as_num()?.to_f64() as usize,
                row: v.get("row")?.as_num()?.to_f64() as usize,
                col: v.get("col")?.as_num()?.to_f64() as usize,
            }),
        }
    }
}

/// One evidence unit: `(page, view, locator)` identifies it uniquely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViewUnit {
    pub view: ViewKind,
    pub locator: Locator,
    pub text: String,
    /// Identifier of the normalization configuration the text was
    /// produced under.
    pub norm_id: String,
}

/// Normalization configuration id: the pack content hash plus the view's
/// whitespace policy tag.
pub fn norm_id(pack: &LanguagePack, view: ViewKind) -> String {
    alloc::format!("{}:{}", pack.pack_id, view.as_str())
}

/// Normalize raw unit text: NFC, LF newlines, zero-width characters
/// removed, the bounded entity set decoded, whitespace collapsed
/// maximally for sentences and structure-preservingly for fields and
/// cells. Total function.
pub fn norm_text(raw: &str, view: ViewKind, _pack: &LanguagePack) -> String {
    let chars: Vec<char> = raw.chars().collect();
    let mut decoded = String::with_capacity(raw.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '&' {
            if let Some((repl, n)) = wikitext::decode_entity(&chars, i) {
                decoded.push(repl);
                i += n;
                continue;
            }
        }
        if wikitext::is_zero_width(c) {
            i += 1;
            continue;
        }
        if c == '\r' {
            if i + 1 < chars.len() && chars[i + 1] == '\n' {
                i += 1;
                continue;
            }
            decoded.push('\n');
            i += 1;
            continue;
        }
        decoded.push(c);
        i += 1;
    }
    let collapsed = match view {
        ViewKind::Sentence => collapse_all(&decoded),
        ViewKind::InfoboxField | ViewKind::TableCell => collapse_preserving(&decoded),
    };
    if is_nfc(&collapsed) {
        collapsed
    } else {
        collapsed.nfc().collect()
    }
}

fn collapse_all(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut last_space = true;
    for c in s.chars() {
        if c.is_whitespace() {
            if !last_space {
                out.push(' ');
                last_space = true;
            }
        } else {
            out.push(c);
            last_space = false;
        }
    }
    while out.ends_with(' ') {
        out.pop();
    }
    out
}

fn collapse_preserving(s: &str) -> String {
    let lines: Vec<String> =
        s.split('\n').map(collapse_all).filter(|l| !l.is_empty()).collect();
    lines.join("\n")
}

/// A wikilink anchor within one sentence unit, in-unit codepoint span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitLink {
    pub start: usize,
    pub end: usize,
    pub target: String,
}

/// One segmented sentence with provenance.
#[derive(Clone, Debug)]
pub struct SentenceInfo {
    pub index: usize,
    /// Interval into the page's normalized sentence stream.
    pub start: usize,
    pub end: usize,
    pub text: String,
    pub links: Vec<UnitLink>,
    /// True for sentences before the first heading.
    pub lead: bool,
    /// Enclosing section title; `None` in the lead.
    pub section: Option<String>,
}

/// The sentence view of one page.
#[derive(Clone, Debug, Default)]
pub struct SentenceView {
    /// Normalized plain-text stream, blocks joined by LF.
    pub stream: String,
    pub sentences: Vec<SentenceInfo>,
}

impl SentenceView {
    pub fn units(&self, pack: &LanguagePack) -> Vec<ViewUnit> {
        let nid = norm_id(pack, ViewKind::Sentence);
        self.sentences
            .iter()
            .map(|s| ViewUnit {
                view: ViewKind::Sentence,
                locator: Locator::Sentence { index: s.index },
                text: s.text.clone(),
                norm_id: nid.clone(),
            })
            .collect()
    }
}

/// Build the sentence view: markup stripped without template expansion,
/// sentences indexed in stream order, boundaries as half-open codepoint
/// intervals.
pub fn build_sentence_view(
    wikitext: &str,
    pack: &LanguagePack,
) -> Result<SentenceView, ParseDegenerate> {
    let stripped = wikitext::strip_page(wikitext)?;
    let stream_chars: Vec<char> = stripped.stream.chars().collect();
    let lead_end = stripped.lead_end.unwrap_or(stream_chars.len());

    // Segment per block so block boundaries are sentence boundaries
    // regardless of the pack's terminal set.
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    let mut block_start = 0usize;
    for (off, &c) in stream_chars.iter().enumerate().chain([(stream_chars.len(), &'\n')]) {
        if c != '\n' {
            continue;
        }
        if off > block_start {
            let block: String = stream_chars[block_start..off].iter().collect();
            for (s, e) in segment_rule_based(&block, pack) {
                intervals.push((block_start + s, block_start + e));
            }
        }
        block_start = off + 1;
    }

    let mut sentences = Vec::with_capacity(intervals.len());
    for (index, (start, end)) in intervals.into_iter().enumerate() {
        let text: String = stream_chars[start..end].iter().collect();
        let links = stripped
            .links
            .iter()
            .filter(|l| l.start >= start && l.start < end)
            .map(|l| UnitLink {
                start: l.start - start,
                end: l.end.min(end) - start,
                target: l.target.clone(),
            })
            .collect();
        let section = stripped
            .sections
            .iter()
            .rev()
            .find(|sec| sec.start <= start)
            .map(|sec| sec.title.clone());
        sentences.push(SentenceInfo {
            index,
            start,
            end,
            text,
            links,
            lead: start < lead_end,
            section,
        });
    }
    Ok(SentenceView { stream: stripped.stream, sentences })
}

/// Build the infobox view: one unit per named parameter of each
/// allowlisted template, values normalized but never expanded. The
/// template path disambiguates repeats by traversal order.
pub fn build_template_view(
    wikitext: &str,
    allowlist: &BTreeSet<String>,
    pack: &LanguagePack,
) -> Vec<ViewUnit> {
    let calls = extract_templates(wikitext);
    let nid = norm_id(pack, ViewKind::InfoboxField);
    let mut counters: alloc::collections::BTreeMap<String, usize> =
        alloc::collections::BTreeMap::new();
    let mut units = Vec::new();
    for call in calls {
        let ordinal = {
            let counter = counters.entry(call.name.clone()).or_insert(0);
            let v = *counter;
            *counter += 1;
            v
        };
        if !allowlist.contains(&call.name) {
            continue;
        }
        let template_path = alloc::format!("{}#{}", call.name, ordinal);
        for (key, value) in &call.params {
            let Some(param) = key else { continue };
            units.push(ViewUnit {
                view: ViewKind::InfoboxField,
                locator: Locator::Infobox {
                    template_path: template_path.clone(),
                    param: param.clone(),
                },
                text: norm_text(value, ViewKind::InfoboxField, pack),
                norm_id: nid.clone(),
            });
        }
    }
    units
}

/// Build the table view: cells addressed `(table, row, col)` on the
/// post-span-resolution grid, content anchored at the top-left
/// coordinate only. Malformed tables are skipped and counted.
pub fn build_table_view(wikitext: &str, pack: &LanguagePack) -> (Vec<ViewUnit>, u32) {
    let (tables, skipped) = extract_tables(wikitext);
    let nid = norm_id(pack, ViewKind::TableCell);
    let mut units = Vec::new();
    for (ti, table) in tables.iter().enumerate() {
        for (row, col, raw) in &table.cells {
            units.push(ViewUnit {
                view: ViewKind::TableCell,
                locator: Locator::Table { table: ti, row: *row, col: *col },
                text: norm_text(raw, ViewKind::TableCell, pack),
                norm_id: nid.clone(),
            });
        }
    }
    (units, skipped)
}

/// All three views of one page.
#[derive(Clone, Debug, Default)]
pub struct PageViews {
    pub sentence: SentenceView,
    pub infobox: Vec<ViewUnit>,
    pub table: Vec<ViewUnit>,
    pub skipped_tables: u32,
}

impl PageViews {
    pub fn is_empty(&self) -> bool {
        self.sentence.sentences.is_empty() && self.infobox.is_empty() && self.table.is_empty()
    }

    /// Look up a unit's normalized text by locator.
    pub fn unit_text(&self, locator: &Locator) -> Option<&str> {
        match locator {
            Locator::Sentence { index } => {
                self.sentence.sentences.get(*index).map(|s| s.text.as_str())
            }
            Locator::Infobox { .. } => self
                .infobox
                .iter()
                .find(|u| &u.locator == locator)
                .map(|u| u.text.as_str()),
            Locator::Table { .. } => {
                self.table.iter().find(|u| &u.locator == locator).map(|u| u.text.as_str())
            }
        }
    }
}

/// Build every view of a page under one pack and infobox allowlist.
pub fn build_page_views(
    wikitext: &str,
    pack: &LanguagePack,
    infobox_allowlist: &BTreeSet<String>,
) -> Result<PageViews, ParseDegenerate> {
    let sentence = build_sentence_view(wikitext, pack)?;
    let infobox = build_template_view(wikitext, infobox_allowlist, pack);
    let (table, skipped_tables) = build_table_view(wikitext, pack);
    Ok(PageViews { sentence, infobox, table, skipped_tables })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pack::{LexicalRules, SegmenterBackend, WikiRules};
    use alloc::vec;

    fn en_pack() -> LanguagePack {
        LanguagePack::new(
            "en",
            SegmenterBackend::RuleBased,
            vec!['.', '!', '?'],
            vec![('(', ')'), ('"', '"')],
            vec!["Dr.".to_string()],
            vec!["See also".to_string(), "References".to_string()],
            WikiRules { capitalize_first: true },
            LexicalRules::default(),
        )
    }

    #[test]
    fn norm_text_examples() {
        let p = en_pack();
        assert_eq!(norm_text("a\u{200B}b", ViewKind::Sentence, &p), "ab");
        assert_eq!(norm_text("a  \n b", ViewKind::Sentence, &p), "a b");
        assert_eq!(norm_text("x&amp;y", ViewKind::Sentence, &p), "x&y");
        assert_eq!(norm_text("a&nbsp;b", ViewKind::Sentence, &p), "a b");
        // Structure-preserving mode keeps line boundaries.
        assert_eq!(norm_text("a  b\n\n c ", ViewKind::TableCell, &p), "a b\nc");
        assert_eq!(norm_text("e\u{0301}", ViewKind::Sentence, &p), "\u{00e9}");
    }

    #[test]
    fn sentence_view_basic() {
        let p = en_pack();
        let v = build_sentence_view("Hello world. Bye.", &p).unwrap();
        assert_eq!(v.sentences.len(), 2);
        assert_eq!(v.sentences[0].index, 0);
        assert_eq!(v.sentences[0].text, "Hello world.");
        assert_eq!(v.sentences[1].index, 1);
        assert_eq!(v.sentences[1].text, "Bye.");
    }

    #[test]
    fn template_only_page_has_no_sentences() {
        let p = en_pack();
        let v = build_sentence_view("{{Infobox person|birth_date=1980}}", &p).unwrap();
        assert!(v.sentences.is_empty());
    }

    #[test]
    fn abbreviation_exception_keeps_single_sentence() {
        let p = en_pack();
        let v = build_sentence_view("Dr. Smith arrived.", &p).unwrap();
        assert_eq!(v.sentences.len(), 1);
        assert_eq!(v.sentences[0].text, "Dr. Smith arrived.");
    }

    #[test]
    fn round_trip_interval_slices_reproduce_text() {
        let p = en_pack();
        let page = "Lead one. Lead two!\n\n== Life ==\nBody with [[Berlin|a link]]. More text here.\n* item one.\n* item two.\n";
        let v = build_sentence_view(page, &p).unwrap();
        assert!(!v.sentences.is_empty());
        for s in &v.sentences {
            assert_eq!(cp_slice(&v.stream, s.start, s.end), s.text);
        }
    }

    #[test]
    fn lead_and_section_provenance() {
        let p = en_pack();
        let page = "Lead sentence. Another lead.\n\n== Life ==\nBody text.\n\n== See also ==\nTrailer link text.\n";
        let v = build_sentence_view(page, &p).unwrap();
        let leads: Vec<bool> = v.sentences.iter().map(|s| s.lead).collect();
        assert_eq!(leads, vec![true, true, false, false]);
        assert_eq!(v.sentences[2].section.as_deref(), Some("Life"));
        assert_eq!(v.sentences[3].section.as_deref(), Some("See also"));
    }

    #[test]
    fn links_carry_in_unit_spans() {
        let p = en_pack();
        let v = build_sentence_view("Intro words. Born in [[Berlin]] today.", &p).unwrap();
        let s = &v.sentences[1];
        assert_eq!(s.links.len(), 1);
        let l = &s.links[0];
        assert_eq!(cp_slice(&s.text, l.start, l.end), "Berlin");
        assert_eq!(l.target, "Berlin");
    }

    #[test]
    fn template_view_allowlist_and_paths() {
        let p = en_pack();
        let allow: BTreeSet<String> = ["Infobox person".to_string()].into();
        let page = "{{Infobox person|birth_date=1980|name=Alice}}\n{{Infobox person|birth_date=1990}}\n{{Sidebar|x=1}}";
        let units = build_template_view(page, &allow, &p);
        assert_eq!(units.len(), 3);
        assert_eq!(
            units[0].locator,
            Locator::Infobox { template_path: "Infobox person#0".into(), param: "birth_date".into() }
        );
        assert_eq!(units[0].text, "1980");
        assert_eq!(
            units[2].locator,
            Locator::Infobox { template_path: "Infobox person#1".into(), param: "birth_date".into() }
        );
        // Non-allowlisted template contributes nothing.
        assert!(!units.iter().any(|u| match &u.locator {
            Locator::Infobox { template_path, .. } => template_path.starts_with("Sidebar"),
            _ => false,
        }));
    }

    #[test]
    fn table_view_units() {
        let p = en_pack();
        let page = "{|\n|-\n| a || b\n|-\n| c || d\n|}\n\n{|\n| second\n|}\n";
        let (units, skipped) = build_table_view(page, &p);
        assert_eq!(skipped, 0);
        assert_eq!(units.len(), 5);
        assert_eq!(units[0].locator, Locator::Table { table: 0, row: 0, col: 0 });
        assert_eq!(units[4].locator, Locator::Table { table: 1, row: 0, col: 0 });
        assert_eq!(units[4].text, "second");
    }

    #[test]
    fn segmentation_is_pure_and_repeatable() {
        let p = en_pack();
        let page = "One. Two. Three! (Or so.) \"Quoted. Inner\" end.";
        let a = build_sentence_view(page, &p).unwrap();
        let b = build_sentence_view(page, &p).unwrap();
        let ia: Vec<(usize, usize)> = a.sentences.iter().map(|s| (s.start, s.end)).collect();
        let ib: Vec<(usize, usize)> = b.sentences.iter().map(|s| (s.start, s.end)).collect();
        assert_eq!(ia, ib);
    }
}
