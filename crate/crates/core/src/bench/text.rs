//! Leakage-controlled entity descriptions and query-time predicate
//! masking for text-aware link prediction.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::grounding::{EvidencePointer, FactSense};
use crate::views::ViewKind;

/// Masking sentinel token.
pub const MASK: &str = "[MASK]";

/// Unit identity of a pointer: everything except the span.
pub fn unit_key(p: &EvidencePointer) -> (u64, u64, ViewKind, crate::views::Locator, String) {
    (p.page_id, p.revision_id, p.view, p.locator.clone(), p.norm_id.clone())
}

/// One line of a description, tracking its source unit.
#[derive(Clone, Debug)]
pub struct DescriptionLine {
    pub pointer: EvidencePointer,
    pub text: String,
}

/// An entity description assembled from training-aligned evidence units.
#[derive(Clone, Debug, Default)]
pub struct Description {
    pub lines: Vec<DescriptionLine>,
    pub token_cap: usize,
}

impl Description {
    /// Newline-joined text truncated at the whitespace-token cap.
    pub fn text(&self) -> String {
        let joined: String = self
            .lines
            .iter()
            .map(|l| l.text.as_str())
            .collect::<Vec<&str>>()
            .join("\n");
        truncate_tokens(&joined, self.token_cap)
    }
}

fn truncate_tokens(s: &str, cap: usize) -> String {
    if cap == 0 {
        return String::new();
    }
    let mut tokens = 0usize;
    let mut in_token = false;
    for (i, c) in s.char_indices() {
        if c.is_whitespace() {
            in_token = false;
        } else if !in_token {
            in_token = true;
            tokens += 1;
            if tokens > cap {
                return s[..i].trim_end().to_string();
            }
        }
    }
    s.to_string()
}

fn unit_priority(view: ViewKind) -> u8 {
    match view {
        ViewKind::InfoboxField => 0,
        ViewKind::TableCell => 1,
        ViewKind::Sentence => 2,
    }
}

/// Build a training-time description for one entity from its
/// Train-aligned senses. Units are prioritized infobox fields, then
/// table cells, then sentences, then confidence; deduplicated by
/// pointer; any unit whose pointer also supports a Dev or Test synset is
/// excluded entirely.
pub fn build_entity_description(
    train_senses: &[&FactSense],
    excluded_units: &BTreeSet<(u64, u64, ViewKind, crate::views::Locator, String)>,
    max_units: usize,
    token_cap: usize,
) -> Description {
    let mut pool: Vec<&FactSense> = train_senses
        .iter()
        .copied()
        .filter(|s| !excluded_units.contains(&unit_key(&s.pointer)))
        .collect();
    pool.sort_by(|a, b| {
        unit_priority(a.pointer.view)
            .cmp(&unit_priority(b.pointer.view))
            .then_with(|| b.confidence.partial_cmp(&a.confidence).expect("finite"))
            .then_with(|| a.pointer.cmp(&b.pointer))
    });
    let mut seen: BTreeSet<(u64, u64, ViewKind, crate::views::Locator, String)> = BTreeSet::new();
    let mut lines = Vec::new();
    for sense in pool {
        if lines.len() >= max_units {
            break;
        }
        let key = unit_key(&sense.pointer);
        if !seen.insert(key) {
            continue;
        }
        lines.push(DescriptionLine { pointer: sense.pointer.clone(), text: sense.unit_text.clone() });
    }
    Description { lines, token_cap }
}

/// Mask the value mentions of one property inside a description, using
/// only Train-aligned sense offsets. Sentence spans are replaced by the
/// sentinel; infobox and table lines are masked entirely.
pub fn mask_predicate(description: &Description, property_senses: &[&FactSense]) -> Description {
    let mut lines = Vec::with_capacity(description.lines.len());
    for line in &description.lines {
        let line_key = unit_key(&line.pointer);
        let spans: Vec<(usize, usize)> = property_senses
            .iter()
            .filter(|s| unit_key(&s.pointer) == line_key)
            .map(|s| (s.pointer.start, s.pointer.end))
            .collect();
        if spans.is_empty() {
            lines.push(line.clone());
            continue;
        }
        let masked = match line.pointer.view {
            ViewKind::Sentence => {
                let mut chars: Vec<char> = line.text.chars().collect();
                let mut ordered = spans;
                ordered.sort();
                ordered.dedup();
                // Replace right to left so earlier offsets stay valid.
                for &(start, end) in ordered.iter().rev() {
                    if start <= end && end <= chars.len() {
                        let replacement: Vec<char> = MASK.chars().collect();
                        chars.splice(start..end, replacement);
                    }
                }
                chars.into_iter().collect()
            }
            // Templated formatting leaks through partial masking, so the
            // whole extracted value string goes.
            ViewKind::InfoboxField | ViewKind::TableCell => MASK.to_string(),
        };
        lines.push(DescriptionLine { pointer: line.pointer.clone(), text: masked });
    }
    Description { lines, token_cap: description.token_cap }
}
