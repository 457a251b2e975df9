//! Wikitext scanning: markup stripping for the sentence view, template
//! calls for the infobox view, and table grids for the table view.
//!
//! Templates are never expanded. The scanner walks the markup once,
//! collapses it into normalized plain-text blocks, and records link
//! anchors and section boundaries as codepoint offsets into the output
//! stream.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use unicode_normalization::{is_nfc, UnicodeNormalization};

/// The scanner aborted on degenerate markup (nesting beyond any sane
/// page); the page yields zero units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDegenerate(pub String);

impl core::fmt::Display for ParseDegenerate {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "degenerate wikitext: {}", self.0)
    }
}

impl core::error::Error for ParseDegenerate {}

const MAX_NESTING: usize = 64;

/// Zero-width characters removed during normalization.
pub fn is_zero_width(c: char) -> bool {
    matches!(c, '\u{200B}' | '\u{200C}' | '\u{200D}' | '\u{2060}' | '\u{FEFF}')
}

/// Bounded named-entity table: amp, lt, gt, quot, apos, nbsp.
pub fn decode_entity(chars: &[char], i: usize) -> Option<(char, usize)> {
    debug_assert_eq!(chars[i], '&');
    let table: [(&str, char); 6] = [
        ("&amp;", '&'),
        ("&lt;", '<'),
        ("&gt;", '>'),
        ("&quot;", '"'),
        ("&apos;", '\''),
        ("&nbsp;", ' '),
    ];
    for (name, repl) in table {
        let n = name.chars().count();
        if i + n <= chars.len() && chars[i..i + n].iter().copied().eq(name.chars()) {
            return Some((repl, n));
        }
    }
    None
}

/// A wikilink anchor in the stripped stream, codepoint offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawLink {
    pub start: usize,
    pub end: usize,
    /// Link target title, fragment stripped, not yet title-normalized.
    pub target: String,
}

/// A section boundary: content from `start` belongs to `title`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub title: String,
    pub start: usize,
}

/// Markup-stripped page text with link and section provenance.
#[derive(Clone, Debug, Default)]
pub struct Stripped {
    /// Normalized plain text; blocks joined by single LF.
    pub stream: String,
    pub links: Vec<RawLink>,
    pub sections: Vec<Section>,
    /// Codepoint offset where the content before the first heading ends;
    /// equals the stream length when the page has no headings.
    pub lead_end: Option<usize>,
}

/// Media and category namespaces whose links render no anchor text.
const SKIPPED_LINK_NS: &[&str] =
    &["File", "Image", "Category", "Datei", "Bild", "Kategorie", "Fichier", "Catégorie"];

/// Paired tags whose content is dropped from the sentence stream.
const DROP_CONTENT_TAGS: &[&str] = &["ref", "gallery", "math", "syntaxhighlight", "timeline", "score", "pre"];

struct Builder {
    stream: String,
    out_cp: usize,
    links: Vec<RawLink>,
    sections: Vec<Section>,
    lead_end: Option<usize>,
    block: String,
    block_cp: usize,
    block_links: Vec<RawLink>,
    last_space: bool,
    block_is_list: bool,
}

impl Builder {
    fn new() -> Self {
        Builder {
            stream: String::new(),
            out_cp: 0,
            links: Vec::new(),
            sections: Vec::new(),
            lead_end: None,
            block: String::new(),
            block_cp: 0,
            block_links: Vec::new(),
            last_space: false,
            block_is_list: false,
        }
    }

    fn push_char(&mut self, c: char) {
        if is_zero_width(c) || c == '\r' {
            return;
        }
        if c.is_whitespace() {
            if !self.block.is_empty() && !self.last_space {
                self.block.push(' ');
                self.block_cp += 1;
                self.last_space = true;
            }
        } else {
            self.block.push(c);
            self.block_cp += 1;
            self.last_space = false;
        }
    }

    fn push_cleaned(&mut self, raw: &[char]) {
        let mut i = 0;
        while i < raw.len() {
            let c = raw[i];
            if c == '&' {
                if let Some((repl, n)) = decode_entity(raw, i) {
                    self.push_char(repl);
                    i += n;
                    continue;
                }
            }
            self.push_char(c);
            i += 1;
        }
    }

    fn flush_block(&mut self) {
        while self.block.ends_with(' ') {
            self.block.pop();
            self.block_cp -= 1;
        }
        if self.block.is_empty() {
            self.block_links.clear();
            self.last_space = false;
            self.block_is_list = false;
            return;
        }
        // Normalization form check: composition across appended segment
        // boundaries is pathological, so the fast path assumes NFC held;
        // when it did not, the block is re-normalized and its link
        // offsets are kept only if the codepoint count is unchanged.
        if !is_nfc(&self.block) {
            let renorm: String = self.block.nfc().collect();
            let renorm_cp = renorm.chars().count();
            if renorm_cp != self.block_cp {
                self.block_links.clear();
            }
            self.block = renorm;
            self.block_cp = renorm_cp;
        }
        let mut base = self.out_cp;
        if !self.stream.is_empty() {
            self.stream.push('\n');
            base += 1;
        }
        self.stream.push_str(&self.block);
        self.out_cp = base + self.block_cp;
        for link in self.block_links.drain(..) {
            self.links.push(RawLink {
                start: link.start + base,
                end: link.end + base,
                target: link.target,
            });
        }
        self.block.clear();
        self.block_cp = 0;
        self.last_space = false;
        self.block_is_list = false;
    }
}

/// Find the matching close for an opening two-char token starting at `i`,
/// counting nested opens. Returns the index just past the close.
fn matching(chars: &[char], mut i: usize, open: [char; 2], close: [char; 2]) -> Option<(usize, usize)> {
    let mut depth = 0usize;
    let mut max_depth = 0usize;
    while i + 1 < chars.len() {
        if chars[i] == open[0] && chars[i + 1] == open[1] {
            depth += 1;
            max_depth = max_depth.max(depth);
            i += 2;
        } else if chars[i] == close[0] && chars[i + 1] == close[1] {
            depth -= 1;
            if depth == 0 {
                return Some((i + 2, max_depth));
            }
            i += 2;
        } else {
            i += 1;
        }
    }
    None
}

fn starts_with(chars: &[char], i: usize, s: &str) -> bool {
    let mut rest = chars[i.min(chars.len())..].iter();
    s.chars().all(|c| rest.next() == Some(&c))
}

fn starts_with_ci(chars: &[char], i: usize, s: &str) -> bool {
    let mut rest = chars[i.min(chars.len())..].iter();
    s.chars().all(|c| rest.next().is_some_and(|r| r.eq_ignore_ascii_case(&c)))
}

/// Split template or link content at top-level pipes, respecting nested
/// `{{ }}` and `[[ ]]`.
fn split_top_level(content: &[char], sep: char) -> Vec<Vec<char>> {
    let mut parts: Vec<Vec<char>> = alloc::vec![Vec::new()];
    let mut tdepth = 0usize;
    let mut ldepth = 0usize;
    let mut i = 0;
    while i < content.len() {
        if starts_with(content, i, "{{") {
            tdepth += 1;
            parts.last_mut().unwrap().extend_from_slice(&content[i..i + 2]);
            i += 2;
        } else if starts_with(content, i, "}}") && tdepth > 0 {
            tdepth -= 1;
            parts.last_mut().unwrap().extend_from_slice(&content[i..i + 2]);
            i += 2;
        } else if starts_with(content, i, "[[") {
            ldepth += 1;
            parts.last_mut().unwrap().extend_from_slice(&content[i..i + 2]);
            i += 2;
        } else if starts_with(content, i, "]]") && ldepth > 0 {
            ldepth -= 1;
            parts.last_mut().unwrap().extend_from_slice(&content[i..i + 2]);
            i += 2;
        } else {
            if content[i] == sep && tdepth == 0 && ldepth == 0 {
                parts.push(Vec::new());
            } else {
                parts.last_mut().unwrap().push(content[i]);
            }
            i += 1;
        }
    }
    parts
}

fn trim_chars(s: &[char]) -> &[char] {
    let start = s.iter().take_while(|c| c.is_whitespace()).count();
    let end = s.len() - s.iter().rev().take_while(|c| c.is_whitespace()).count();
    if start >= end {
        &[]
    } else {
        &s[start..end]
    }
}

fn chars_to_string(s: &[char]) -> String {
    s.iter().collect()
}

/// Strip markup into normalized plain-text blocks.
pub fn strip_page(wikitext: &str) -> Result<Stripped, ParseDegenerate> {
    let chars: Vec<char> = wikitext.chars().collect();
    let mut b = Builder::new();
    let mut i = 0usize;
    let mut at_line_start = true;

    while i < chars.len() {
        let c = chars[i];
        if at_line_start {
            // Structural line prefixes.
            if c == '=' && starts_with(&chars, i, "==") {
                // Heading: collect to end of line, strip '=' runs.
                let eol = line_end(&chars, i);
                let line = &chars[i..eol];
                let inner = trim_chars(
                    trim_eq_runs(line),
                );
                b.flush_block();
                if b.lead_end.is_none() {
                    b.lead_end = Some(b.out_cp);
                }
                let mut title_b = Builder::new();
                title_b.push_cleaned(inner);
                title_b.flush_block();
                b.sections.push(Section { title: title_b.stream, start: b.out_cp });
                i = eol;
                continue;
            }
            if starts_with(&chars, i, "{|") {
                b.flush_block();
                i = skip_table(&chars, i)?;
                at_line_start = true;
                continue;
            }
            if starts_with(&chars, i, "----") {
                b.flush_block();
                i = line_end(&chars, i);
                continue;
            }
            if matches!(c, '*' | '#' | ':' | ';') {
                // List item: strip marker run, item text forms its own block.
                b.flush_block();
                while i < chars.len() && matches!(chars[i], '*' | '#' | ':' | ';') {
                    i += 1;
                }
                while i < chars.len() && chars[i] == ' ' {
                    i += 1;
                }
                b.block_is_list = true;
                at_line_start = false;
                continue;
            }
            if c == ' ' {
                // Leading-space preformatted line: treat as plain text.
                i += 1;
                continue;
            }
        }
        match c {
            '\n' => {
                // Blank line or list end: block boundary. A single
                // newline inside a paragraph reads as a space.
                let mut j = i + 1;
                let mut blank = false;
                while j < chars.len() && (chars[j] == ' ' || chars[j] == '\t' || chars[j] == '\r') {
                    j += 1;
                }
                if j < chars.len() && chars[j] == '\n' {
                    blank = true;
                }
                if blank || b.block_is_list {
                    b.flush_block();
                } else {
                    b.push_char(' ');
                }
                i += 1;
                at_line_start = true;
                continue;
            }
            '<' => {
                if starts_with(&chars, i, "<!--") {
                    i = find_seq(&chars, i + 4, "-->").map(|p| p + 3).unwrap_or(chars.len());
                    continue;
                }
                if starts_with_ci(&chars, i, "<nowiki>") {
                    let start = i + 8;
                    let end = find_seq_ci(&chars, start, "</nowiki>");
                    let content_end = end.unwrap_or(chars.len());
                    b.push_cleaned(&chars[start..content_end]);
                    i = end.map(|p| p + 9).unwrap_or(chars.len());
                    continue;
                }
                if starts_with_ci(&chars, i, "<nowiki/>") || starts_with_ci(&chars, i, "<nowiki />") {
                    i += if chars[i + 7] == '/' { 9 } else { 10 };
                    continue;
                }
                if starts_with_ci(&chars, i, "<br") {
                    b.push_char(' ');
                    i = find_char(&chars, i, '>').map(|p| p + 1).unwrap_or(chars.len());
                    continue;
                }
                let mut handled = false;
                for tag in DROP_CONTENT_TAGS {
                    if starts_with_ci(&chars, i, &alloc::format!("<{}", tag)) {
                        let tag_close = find_char(&chars, i, '>');
                        match tag_close {
                            Some(p) if chars[p - 1] == '/' => i = p + 1,
                            Some(p) => {
                                let close = alloc::format!("</{}>", tag);
                                i = find_seq_ci(&chars, p + 1, &close)
                                    .map(|q| q + close.chars().count())
                                    .unwrap_or(chars.len());
                            }
                            None => i = chars.len(),
                        }
                        handled = true;
                        break;
                    }
                }
                if handled {
                    continue;
                }
                // Unknown tag: drop the tag itself, keep surrounding text.
                i = find_char(&chars, i, '>').map(|p| p + 1).unwrap_or(i + 1);
                continue;
            }
            '{' if starts_with(&chars, i, "{{") => match matching(&chars, i, ['{', '{'], ['}', '}']) {
                Some((end, depth)) => {
                    if depth > MAX_NESTING {
                        return Err(ParseDegenerate(alloc::format!(
                            "template nesting depth {} exceeds {}",
                            depth, MAX_NESTING
                        )));
                    }
                    i = end;
                    continue;
                }
                None => {
                    // Unclosed template call swallows the rest.
                    i = chars.len();
                    continue;
                }
            },
            '[' if starts_with(&chars, i, "[[") => {
                match matching(&chars, i, ['[', '['], [']', ']']) {
                    Some((end, depth)) => {
                        if depth > MAX_NESTING {
                            return Err(ParseDegenerate(alloc::format!(
                                "link nesting depth {} exceeds {}",
                                depth, MAX_NESTING
                            )));
                        }
                        let inner = &chars[i + 2..end - 2];
                        emit_link(&mut b, inner);
                        i = end;
                        continue;
                    }
                    None => {
                        b.push_char('[');
                        b.push_char('[');
                        i += 2;
                        continue;
                    }
                }
            }
            '[' if starts_with_ci(&chars, i, "[http://")
                || starts_with_ci(&chars, i, "[https://")
                || starts_with_ci(&chars, i, "[ftp://") =>
            {
                let end = find_char(&chars, i, ']').unwrap_or(chars.len());
                let inner = &chars[i + 1..end.min(chars.len())];
                if let Some(sp) = inner.iter().position(|c| c.is_whitespace()) {
                    b.push_cleaned(trim_chars(&inner[sp + 1..]));
                }
                i = (end + 1).min(chars.len());
                continue;
            }
            '\'' if starts_with(&chars, i, "''") => {
                while i < chars.len() && chars[i] == '\'' {
                    i += 1;
                }
                continue;
            }
            '&' => {
                if let Some((repl, n)) = decode_entity(&chars, i) {
                    b.push_char(repl);
                    i += n;
                } else {
                    b.push_char('&');
                    i += 1;
                }
                at_line_start = false;
                continue;
            }
            _ => {
                b.push_char(c);
                i += 1;
                at_line_start = false;
                continue;
            }
        }
    }
    b.flush_block();
    let stream_cp_len = b.out_cp;
    Ok(Stripped {
        stream: b.stream,
        links: b.links,
        sections: b.sections,
        lead_end: Some(b.lead_end.unwrap_or(stream_cp_len)),
    })
}

fn emit_link(b: &mut Builder, inner: &[char]) {
    let parts = split_top_level(inner, '|');
    let target_raw = trim_chars(&parts[0]);
    if target_raw.is_empty() {
        return;
    }
    let target_str = chars_to_string(target_raw);
    if let Some((ns, _)) = target_str.split_once(':') {
        if SKIPPED_LINK_NS.iter().any(|s| s.eq_ignore_ascii_case(ns.trim())) {
            return;
        }
    }
    let target = target_str.split('#').next().unwrap_or("").trim().to_string();
    if target.is_empty() {
        return;
    }
    let label: Vec<char> = if parts.len() > 1 {
        let last = trim_chars(parts.last().unwrap());
        if last.is_empty() {
            // Pipe trick: display the target without parenthetical.
            target.split('(').next().unwrap_or(&target).trim().chars().collect()
        } else {
            last.to_vec()
        }
    } else {
        target_raw.to_vec()
    };
    let start = b.block_cp;
    b.push_cleaned(&label);
    let end = b.block_cp;
    if end > start {
        b.block_links.push(RawLink { start, end, target });
    }
}

fn trim_eq_runs(line: &[char]) -> &[char] {
    let line = trim_chars(line);
    let lead = line.iter().take_while(|&&c| c == '=').count();
    let trail = line.iter().rev().take_while(|&&c| c == '=').count();
    if lead + trail >= line.len() {
        &[]
    } else {
        &line[lead..line.len() - trail]
    }
}

fn line_end(chars: &[char], i: usize) -> usize {
    let mut j = i;
    while j < chars.len() && chars[j] != '\n' {
        j += 1;
    }
    j
}

fn find_seq(chars: &[char], from: usize, s: &str) -> Option<usize> {
    let pat: Vec<char> = s.chars().collect();
    if pat.is_empty() || chars.len() < pat.len() {
        return None;
    }
    (from..=chars.len() - pat.len()).find(|&i| chars[i..i + pat.len()] == pat[..])
}

fn find_seq_ci(chars: &[char], from: usize, s: &str) -> Option<usize> {
    let pat: Vec<char> = s.chars().collect();
    if pat.is_empty() || chars.len() < pat.len() {
        return None;
    }
    (from..=chars.len() - pat.len()).find(|&i| {
        chars[i..i + pat.len()]
            .iter()
            .zip(pat.iter())
            .all(|(a, b)| a.eq_ignore_ascii_case(b))
    })
}

fn find_char(chars: &[char], from: usize, c: char) -> Option<usize> {
    (from..chars.len()).find(|&i| chars[i] == c)
}

/// Skip a table block `{| .. |}` (nested tables included); returns the
/// index just past the closing marker.
fn skip_table(chars: &[char], i: usize) -> Result<usize, ParseDegenerate> {
    let mut depth = 0usize;
    let mut j = i;
    while j + 1 < chars.len() {
        if starts_with(chars, j, "{|") {
            depth += 1;
            if depth > MAX_NESTING {
                return Err(ParseDegenerate("table nesting too deep".to_string()));
            }
            j += 2;
        } else if starts_with(chars, j, "|}") {
            depth -= 1;
            j += 2;
            if depth == 0 {
                return Ok(j);
            }
        } else {
            j += 1;
        }
    }
    Ok(chars.len())
}

/// One template call with parameters, document order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateCall {
    pub name: String,
    /// `(key, raw value)`; positional parameters carry `None` keys.
    pub params: Vec<(Option<String>, String)>,
}

/// Normalize a template name the way the wiki does: underscores to
/// spaces, collapsed whitespace, first letter uppercased.
pub fn normalize_template_name(name: &str) -> String {
    let mut out = String::new();
    let mut last_space = true;
    for c in name.chars() {
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
    let mut chars = out.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => out,
    }
}

/// Extract template calls in depth-first document order.
pub fn extract_templates(wikitext: &str) -> Vec<TemplateCall> {
    let chars: Vec<char> = wikitext.chars().collect();
    let mut out = Vec::new();
    walk_templates(&chars, &mut out, 0);
    out
}

fn walk_templates(chars: &[char], out: &mut Vec<TemplateCall>, depth: usize) {
    if depth > MAX_NESTING {
        return;
    }
    let mut i = 0usize;
    while i + 1 < chars.len() {
        if starts_with(chars, i, "<!--") {
            i = find_seq(chars, i + 4, "-->").map(|p| p + 3).unwrap_or(chars.len());
            continue;
        }
        if starts_with_ci(chars, i, "<nowiki>") {
            i = find_seq_ci(chars, i + 8, "</nowiki>").map(|p| p + 9).unwrap_or(chars.len());
            continue;
        }
        if starts_with(chars, i, "{{") {
            let Some((end, _)) = matching(chars, i, ['{', '{'], ['}', '}']) else {
                return;
            };
            let inner = &chars[i + 2..end - 2];
            let parts = split_top_level(inner, '|');
            let name = normalize_template_name(&chars_to_string(trim_chars(&parts[0])));
            let mut params = Vec::new();
            for part in &parts[1..] {
                let eq = top_level_eq(part);
                match eq {
                    Some(pos) => {
                        let key = chars_to_string(trim_chars(&part[..pos]));
                        let value = chars_to_string(trim_chars(&part[pos + 1..]));
                        if key.is_empty() {
                            params.push((None, value));
                        } else {
                            params.push((Some(key), value));
                        }
                    }
                    None => params.push((None, chars_to_string(trim_chars(part)))),
                }
            }
            if !name.is_empty() {
                out.push(TemplateCall { name, params });
            }
            // Nested calls inside parameter values, in document order.
            walk_templates(inner, out, depth + 1);
            i = end;
            continue;
        }
        i += 1;
    }
}

fn top_level_eq(part: &[char]) -> Option<usize> {
    let mut tdepth = 0usize;
    let mut ldepth = 0usize;
    let mut i = 0;
    while i < part.len() {
        if starts_with(part, i, "{{") {
            tdepth += 1;
            i += 2;
        } else if starts_with(part, i, "}}") && tdepth > 0 {
            tdepth -= 1;
            i += 2;
        } else if starts_with(part, i, "[[") {
            ldepth += 1;
            i += 2;
        } else if starts_with(part, i, "]]") && ldepth > 0 {
            ldepth -= 1;
            i += 2;
        } else {
            if part[i] == '=' && tdepth == 0 && ldepth == 0 {
                return Some(i);
            }
            i += 1;
        }
    }
    None
}

/// A parsed table: raw cell content anchored at post-span-resolution grid
/// coordinates. Spanned cells occupy their top-left coordinate only.
#[derive(Clone, Debug, Default)]
pub struct WikiTable {
    pub cells: Vec<(usize, usize, String)>,
}

/// Extract top-level tables in document order. Nested tables stay inside
/// their host cell's raw content. Returns the tables and the count of
/// malformed tables that were skipped.
pub fn extract_tables(wikitext: &str) -> (Vec<WikiTable>, u32) {
    let chars: Vec<char> = wikitext.chars().collect();
    let mut tables = Vec::new();
    let mut skipped = 0u32;
    let mut i = 0usize;
    let mut at_line_start = true;
    while i < chars.len() {
        if at_line_start && starts_with(&chars, i, "{|") {
            match table_span(&chars, i) {
                Some(end) => {
                    match parse_table(&chars[i..end]) {
                        Some(t) => tables.push(t),
                        None => skipped += 1,
                    }
                    i = end;
                    at_line_start = true;
                    continue;
                }
                None => {
                    skipped += 1;
                    break;
                }
            }
        }
        at_line_start = chars[i] == '\n';
        i += 1;
    }
    (tables, skipped)
}

fn table_span(chars: &[char], i: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut j = i;
    while j + 1 < chars.len() {
        if starts_with(chars, j, "{|") {
            depth += 1;
            j += 2;
        } else if starts_with(chars, j, "|}") {
            depth = depth.checked_sub(1)?;
            j += 2;
            if depth == 0 {
                return Some(j);
            }
        } else {
            j += 1;
        }
    }
    None
}

struct PendingSpan {
    col: usize,
    width: usize,
    remaining_rows: usize,
}

fn parse_table(chars: &[char]) -> Option<WikiTable> {
    // Drop the surrounding "{|" .. "|}".
    let text = chars_to_string(chars);
    let body = text.strip_prefix("{|")?.strip_suffix("|}")?;
    let mut lines = body.lines();
    let _attrs = lines.next(); // table attribute line

    #[derive(Default)]
    struct RowCell {
        raw: String,
    }
    let mut rows: Vec<Vec<RowCell>> = Vec::new();
    let mut current: Vec<RowCell> = Vec::new();
    let mut row_open = false;
    let mut nested = 0usize;

    let push_cells = |current: &mut Vec<RowCell>, line: &str, header: bool| {
        let line = line.trim_start();
        let rest = &line[1..];
        let parts: Vec<&str> = if header { rest.split("!!").collect() } else { rest.split("||").collect() };
        for p in parts {
            current.push(RowCell { raw: p.to_string() });
        }
    };

    for line in lines {
        let trimmed = line.trim_start();
        if nested > 0 {
            if trimmed.starts_with("|}") {
                nested -= 1;
            } else if trimmed.starts_with("{|") {
                nested += 1;
            }
            if let Some(cell) = current.last_mut() {
                cell.raw.push('\n');
                cell.raw.push_str(line);
            }
            continue;
        }
        if trimmed.starts_with("{|") {
            nested += 1;
            if let Some(cell) = current.last_mut() {
                cell.raw.push('\n');
                cell.raw.push_str(line);
            }
            continue;
        }
        if trimmed.starts_with("|-") {
            if row_open {
                rows.push(core::mem::take(&mut current));
            }
            row_open = true;
            continue;
        }
        if trimmed.starts_with("|+") {
            continue; // caption
        }
        if trimmed.starts_with('!') {
            row_open = true;
            push_cells(&mut current, trimmed, true);
            continue;
        }
        if trimmed.starts_with('|') {
            row_open = true;
            push_cells(&mut current, trimmed, false);
            continue;
        }
        // Continuation of the previous cell.
        if let Some(cell) = current.last_mut() {
            cell.raw.push('\n');
            cell.raw.push_str(line);
        }
    }
    if row_open && !current.is_empty() {
        rows.push(current);
    }

    // Span resolution onto the grid; content anchors at the top-left
    // coordinate only.
    let mut table = WikiTable::default();
    let mut carries: Vec<PendingSpan> = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        // Spans carried into this row block their columns here; spans
        // opened by this row start covering from the next one.
        let occupied: Vec<(usize, usize)> = carries.iter().map(|p| (p.col, p.width)).collect();
        let taken = |col: usize| occupied.iter().any(|&(c, w)| col >= c && col < c + w);
        let mut opened: Vec<PendingSpan> = Vec::new();
        let mut col = 0usize;
        for cell in row {
            while taken(col) {
                col += 1;
            }
            let (attrs, content) = split_cell_attrs(&cell.raw);
            let colspan = parse_span_attr(attrs, "colspan").unwrap_or(1).max(1);
            let rowspan = parse_span_attr(attrs, "rowspan").unwrap_or(1).max(1);
            table.cells.push((r, col, content.to_string()));
            if rowspan > 1 {
                opened.push(PendingSpan { col, width: colspan, remaining_rows: rowspan - 1 });
            }
            col += colspan;
        }
        for p in carries.iter_mut() {
            p.remaining_rows = p.remaining_rows.saturating_sub(1);
        }
        carries.retain(|p| p.remaining_rows > 0);
        carries.extend(opened);
    }
    Some(table)
}

/// Cell text may start with an attribute segment before a single pipe:
/// `colspan="2" | content`. The prefix counts as attributes only when it
/// contains '=' and no wiki markup.
fn split_cell_attrs(raw: &str) -> (&str, &str) {
    if let Some(pos) = raw.find('|') {
        let prefix = &raw[..pos];
        if prefix.contains('=') && !prefix.contains("[[") && !prefix.contains("{{") {
            return (prefix, raw[pos + 1..].trim());
        }
    }
    ("", raw.trim())
}

fn parse_span_attr(attrs: &str, name: &str) -> Option<usize> {
    let lower = attrs.to_lowercase();
    let pos = lower.find(name)?;
    let rest = &attrs[pos + name.len()..];
    let rest = rest.trim_start().strip_prefix('=')?.trim_start();
    let rest = rest.trim_start_matches(['"', '\'']);
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}
