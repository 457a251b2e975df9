//! Deterministic rule-based sentence boundary detection.
//!
//! A boundary falls after a terminal-punctuation character unless an
//! open suppression pair covers it or a literal exception token matches.
//! Fragments shorter than the pack's floor merge into the following
//! sentence. The external (model-based) backend plugs in behind
//! [`SentenceSegmenter`]; only the rule-based engine ships here.

use alloc::string::String;
use alloc::vec::Vec;

use crate::pack::LanguagePack;

/// Adapter interface for segmentation backends.
pub trait SentenceSegmenter {
    /// Sentence boundaries as half-open codepoint intervals over `text`.
    fn segment(&self, text: &str, pack: &LanguagePack) -> Vec<(usize, usize)>;
}

/// The shipped rule-based engine.
pub struct RuleBasedSegmenter;

impl SentenceSegmenter for RuleBasedSegmenter {
    fn segment(&self, text: &str, pack: &LanguagePack) -> Vec<(usize, usize)> {
        segment_rule_based(text, pack)
    }
}

// TODO: context-aware exception patterns (numeric-internal periods,
// regex exceptions); only literal token exceptions are supported.
/// Rule-based segmentation over normalized text. Returns trimmed,
/// non-empty half-open codepoint intervals in stream order.
pub fn segment_rule_based(text: &str, pack: &LanguagePack) -> Vec<(usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return Vec::new();
    }

    // Raw cut positions (exclusive end of a sentence candidate).
    let mut cuts: Vec<usize> = Vec::new();
    let mut stack: Vec<char> = Vec::new(); // expected closers
    for (i, &c) in chars.iter().enumerate() {
        // Suppression stack over paired delimiters. Symmetric pairs
        // (quotes) toggle.
        if let Some(&expected) = stack.last() {
            if c == expected {
                stack.pop();
                continue;
            }
        }
        if let Some(&(_, close)) = pack.suppression_pairs.iter().find(|&&(open, _)| open == c) {
            stack.push(close);
            continue;
        }
        if !pack.terminal_punct.contains(&c) {
            continue;
        }
        if !stack.is_empty() {
            continue;
        }
        if exception_covers(&chars, i, &pack.abbreviation_exceptions) {
            continue;
        }
        cuts.push(i + 1);
    }
    if cuts.last() != Some(&chars.len()) {
        cuts.push(chars.len());
    }

    // Trim fragments and merge the ones under the length floor into the
    // following sentence; a trailing short fragment stays as-is since
    // nothing follows it.
    let mut intervals = Vec::new();
    let mut start = 0usize;
    let mut pending: Option<usize> = None; // merged-run start
    for &cut in &cuts {
        let run_start = pending.take().unwrap_or(start);
        if let Some((s, e)) = trim_interval(&chars, run_start, cut) {
            let visible = chars[s..e].iter().filter(|c| !c.is_whitespace()).count();
            if visible < pack.min_sentence_len && cut != chars.len() {
                pending = Some(run_start);
            } else {
                intervals.push((s, e));
            }
        } else if run_start < cut && cut != chars.len() {
            // Whitespace-only fragment: fold into the next one.
            pending = Some(run_start);
        }
        start = cut;
    }
    intervals
}

/// True when the terminal character at `i` sits inside an occurrence of
/// a literal exception token that starts at a word boundary.
fn exception_covers(chars: &[char], i: usize, exceptions: &[String]) -> bool {
    for exc in exceptions {
        let exc_chars: Vec<char> = exc.chars().collect();
        if exc_chars.is_empty() {
            continue;
        }
        // The punct may match any of its positions inside the token.
        for (rel, &ec) in exc_chars.iter().enumerate() {
            if ec != chars[i] {
                continue;
            }
            if i < rel {
                continue;
            }
            let from = i - rel;
            if from + exc_chars.len() > chars.len() {
                continue;
            }
            if chars[from..from + exc_chars.len()] != exc_chars[..] {
                continue;
            }
            let at_word_start = from == 0 || chars[from - 1].is_whitespace();
            if at_word_start {
                return true;
            }
        }
    }
    false
}

fn trim_interval(chars: &[char], mut s: usize, mut e: usize) -> Option<(usize, usize)> {
    while s < e && chars[s].is_whitespace() {
        s += 1;
    }
    while e > s && chars[e - 1].is_whitespace() {
        e -= 1;
    }
    if s >= e {
        None
    } else {
        Some((s, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pack::{LexicalRules, SegmenterBackend, WikiRules};
    use alloc::string::ToString;
    use alloc::vec;

    fn pack(punct: Vec<char>, pairs: Vec<(char, char)>, exceptions: Vec<&str>) -> LanguagePack {
        LanguagePack::new(
            "xx",
            SegmenterBackend::RuleBased,
            punct,
            pairs,
            exceptions.into_iter().map(|s| s.to_string()).collect(),
            vec![],
            WikiRules { capitalize_first: true },
            LexicalRules::default(),
        )
    }

    fn texts(input: &str, p: &LanguagePack) -> Vec<String> {
        let chars: Vec<char> = input.chars().collect();
        segment_rule_based(input, p)
            .into_iter()
            .map(|(s, e)| chars[s..e].iter().collect())
            .collect()
    }

    #[test]
    fn splits_after_terminal_punct() {
        let p = pack(vec!['.'], vec![], vec![]);
        assert_eq!(texts("A. B.", &p), vec!["A.", "B."]);
    }

    #[test]
    fn suppression_inside_parentheses() {
        let p = pack(vec!['.'], vec![('(', ')')], vec![]);
        // Boundary only after the final period.
        assert_eq!(texts("(A. B.) C.", &p), vec!["(A. B.) C."]);
    }

    #[test]
    fn cjk_terminal_punct() {
        let p = pack(vec!['\u{3002}'], vec![], vec![]);
        assert_eq!(texts("你好。再见。", &p), vec!["你好。", "再见。"]);
    }

    #[test]
    fn abbreviation_exception_blocks_boundary() {
        let p = pack(vec!['.'], vec![], vec!["Dr."]);
        assert_eq!(texts("Dr. Smith arrived.", &p), vec!["Dr. Smith arrived."]);
        // Exception must begin at a word boundary.
        assert_eq!(texts("XDr. Smith stayed.", &p), vec!["XDr.", "Smith stayed."]);
    }

    #[test]
    fn multiword_exception_covers_internal_punct() {
        let p = pack(vec!['.'], vec![], vec!["z. B."]);
        assert_eq!(texts("Viele, z. B. Anna, kamen.", &p), vec!["Viele, z. B. Anna, kamen."]);
    }

    #[test]
    fn short_fragments_merge_forward() {
        let mut p = pack(vec!['.'], vec![], vec![]);
        p.min_sentence_len = 3;
        // "A." has two visible codepoints, below the floor of 3.
        assert_eq!(texts("A. Long tail here.", &p), vec!["A. Long tail here."]);
        // A trailing short fragment has nothing to merge into.
        assert_eq!(texts("Long head here. B.", &p), vec!["Long head here.", "B."]);
    }

    #[test]
    fn deterministic_over_repeats() {
        let p = pack(vec!['.', '!', '?'], vec![('(', ')'), ('"', '"')], vec!["Dr."]);
        let text = "He said \"Go.\" Then (a. b.) happened! Dr. No? Yes.";
        let a = segment_rule_based(text, &p);
        let b = segment_rule_based(text, &p);
        assert_eq!(a, b);
    }

    #[test]
    fn unterminated_text_yields_final_interval() {
        let p = pack(vec!['.'], vec![], vec![]);
        assert_eq!(texts("No terminal here", &p), vec!["No terminal here"]);
        assert!(texts("", &p).is_empty());
        assert!(texts("   ", &p).is_empty());
    }
}
