//! Strict type-aware literal parsers for lexical matching.
//!
//! No fuzzy matching: dates must parse under the pack's month table,
//! quantities under its unit surface forms, and an approximation marker
//! directly before a literal blocks the match.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::decimal::Decimal;
use crate::model::{CoordinateValue, QuantityValue, TimePrecision, TimeValue};
use crate::pack::LanguagePack;

/// A literal found in unit text: codepoint span plus parsed value.
#[derive(Clone, Debug)]
pub struct FoundLiteral<T> {
    pub start: usize,
    pub end: usize,
    pub value: T,
    /// True when an approximation marker directly precedes the literal.
    pub approximate: bool,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// The whitespace-delimited token ending just before `start`, lowercased
/// and stripped of punctuation.
fn preceding_token(chars: &[char], start: usize) -> String {
    let mut end = start;
    while end > 0 && chars[end - 1].is_whitespace() {
        end -= 1;
    }
    let mut begin = end;
    while begin > 0 && !chars[begin - 1].is_whitespace() {
        begin -= 1;
    }
    chars[begin..end]
        .iter()
        .filter(|c| c.is_alphanumeric() || **c == '~')
        .flat_map(|c| c.to_lowercase())
        .collect()
}

fn is_approx(chars: &[char], start: usize, pack: &LanguagePack) -> bool {
    if start > 0 && chars[start - 1] == '~' {
        return true;
    }
    let tok = preceding_token(chars, start);
    !tok.is_empty()
        && pack
            .lexical
            .approximation_markers
            .iter()
            .any(|m| m.to_lowercase().trim_matches(|c: char| !c.is_alphanumeric() && c != '~') == tok || m == "~" && tok == "~")
}

fn digits_at(chars: &[char], i: usize, min: usize, max: usize) -> Option<(usize, u32)> {
    let mut n = 0usize;
    let mut v: u32 = 0;
    while i + n < chars.len() && chars[i + n].is_ascii_digit() && n < max {
        v = v * 10 + (chars[i + n] as u32 - '0' as u32);
        n += 1;
    }
    if n < min || (i + n < chars.len() && chars[i + n].is_ascii_digit()) {
        return None;
    }
    Some((n, v))
}

fn month_at(chars: &[char], i: usize, pack: &LanguagePack) -> Option<(usize, u8)> {
    for (idx, name) in pack.lexical.month_names.iter().enumerate() {
        let name_chars: Vec<char> = name.chars().collect();
        if name_chars.is_empty() || i + name_chars.len() > chars.len() {
            continue;
        }
        let matches = chars[i..i + name_chars.len()]
            .iter()
            .zip(name_chars.iter())
            .all(|(a, b)| a.to_lowercase().eq(b.to_lowercase()));
        if matches {
            let after = i + name_chars.len();
            if after < chars.len() && is_word_char(chars[after]) {
                continue;
            }
            return Some((name_chars.len(), idx as u8 + 1));
        }
    }
    None
}

fn skip_spaces(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() && chars[i] == ' ' {
        i += 1;
    }
    i
}

/// Find date expressions under the pack's date grammar: ISO dates,
/// `12 May 1999`, `May 12, 1999`, `May 1999`, bare years. Precision
/// follows the surface form.
pub fn find_dates(text: &str, pack: &LanguagePack) -> Vec<FoundLiteral<TimeValue>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        if i > 0 && is_word_char(chars[i - 1]) {
            i += 1;
            continue;
        }
        if let Some((len, tv)) = date_at(&chars, i, pack) {
            out.push(FoundLiteral {
                start: i,
                end: i + len,
                value: tv,
                approximate: is_approx(&chars, i, pack),
            });
            i += len;
            continue;
        }
        i += 1;
    }
    out
}

fn date_at(chars: &[char], i: usize, pack: &LanguagePack) -> Option<(usize, TimeValue)> {
    // ISO YYYY-MM-DD.
    if let Some((4, year)) = digits_at(chars, i, 4, 4) {
        let mut j = i + 4;
        if j + 5 < chars.len() && chars[j] == '-' {
            if let Some((2, month)) = digits_at(chars, j + 1, 2, 2) {
                j += 3;
                if j < chars.len() && chars[j] == '-' {
                    if let Some((2, day)) = digits_at(chars, j + 1, 2, 2) {
                        j += 3;
                        if (j >= chars.len() || !is_word_char(chars[j]))
                            && (1..=12).contains(&month)
                            && (1..=31).contains(&day)
                        {
                            return Some((
                                j - i,
                                TimeValue::ymd(year as i64, month as u8, day as u8, TimePrecision::Day),
                            ));
                        }
                    }
                }
            }
        }
    }
    // D Month YYYY, with the optional ordinal dot ("23. April 1967").
    if let Some((dlen, day)) = digits_at(chars, i, 1, 2) {
        if (1..=31).contains(&day) {
            let mut after_day = i + dlen;
            if after_day < chars.len() && chars[after_day] == '.' {
                after_day += 1;
            }
            let j = skip_spaces(chars, after_day);
            if j > after_day {
                if let Some((mlen, month)) = month_at(chars, j, pack) {
                    let k = skip_spaces(chars, j + mlen);
                    if k > j + mlen {
                        if let Some((4, year)) = digits_at(chars, k, 4, 4) {
                            let end = k + 4;
                            if end >= chars.len() || !is_word_char(chars[end]) {
                                return Some((
                                    end - i,
                                    TimeValue::ymd(year as i64, month, day as u8, TimePrecision::Day),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    // Month D, YYYY.
    if let Some((mlen, month)) = month_at(chars, i, pack) {
        let j = skip_spaces(chars, i + mlen);
        if let Some((dlen, day)) = digits_at(chars, j, 1, 2) {
            let mut k = j + dlen;
            if k < chars.len() && chars[k] == ',' {
                k = skip_spaces(chars, k + 1);
                if let Some((4, year)) = digits_at(chars, k, 4, 4) {
                    let end = k + 4;
                    if (end >= chars.len() || !is_word_char(chars[end])) && (1..=31).contains(&day) {
                        return Some((
                            end - i,
                            TimeValue::ymd(year as i64, month, day as u8, TimePrecision::Day),
                        ));
                    }
                }
            }
        }
        // Month YYYY.
        if let Some((4, year)) = digits_at(chars, j, 4, 4) {
            let end = j + 4;
            if end >= chars.len() || !is_word_char(chars[end]) {
                return Some((end - i, TimeValue::ymd(year as i64, month, 0, TimePrecision::Month)));
            }
        }
    }
    // Bare year.
    if let Some((4, year)) = digits_at(chars, i, 4, 4) {
        let end = i + 4;
        if (end >= chars.len() || !is_word_char(chars[end])) && (1000..=2999).contains(&year) {
            return Some((4, TimeValue::ymd(year as i64, 0, 0, TimePrecision::Year)));
        }
    }
    None
}

/// Find quantity literals: a decimal number optionally followed by a unit
/// surface form from the pack.
pub fn find_quantities(text: &str, pack: &LanguagePack) -> Vec<FoundLiteral<QuantityValue>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        if !chars[i].is_ascii_digit() || (i > 0 && is_word_char(chars[i - 1])) {
            i += 1;
            continue;
        }
        let Some((nlen, literal)) = number_at(&chars, i, pack) else {
            i += 1;
            continue;
        };
        let mut end = i + nlen;
        let mut unit = "1".to_string();
        // Optional unit word after at most one space.
        let j = skip_spaces(&chars, end);
        if j > end || (j < chars.len() && chars[j].is_alphabetic()) {
            let mut k = j;
            while k < chars.len() && chars[k].is_alphabetic() {
                k += 1;
            }
            if k > j {
                let word: String = chars[j..k].iter().collect();
                if let Some(unit_id) = pack.lexical.unit_surface_forms.get(&word) {
                    unit = unit_id.clone();
                    end = k;
                }
            }
        }
        out.push(FoundLiteral {
            start: i,
            end,
            value: QuantityValue { amount: literal, unit },
            approximate: is_approx(&chars, i, pack),
        });
        i = end.max(i + 1);
    }
    out
}

fn number_at(chars: &[char], i: usize, pack: &LanguagePack) -> Option<(usize, Decimal)> {
    let sep = if pack.lexical.decimal_comma { ',' } else { '.' };
    let mut j = i;
    while j < chars.len() && chars[j].is_ascii_digit() {
        j += 1;
    }
    if j == i {
        return None;
    }
    let mut text: String = chars[i..j].iter().collect();
    if j + 1 < chars.len() && chars[j] == sep && chars[j + 1].is_ascii_digit() {
        let mut k = j + 1;
        while k < chars.len() && chars[k].is_ascii_digit() {
            k += 1;
        }
        text.push('.');
        text.extend(chars[j + 1..k].iter());
        j = k;
    }
    if j < chars.len() && is_word_char(chars[j]) {
        return None;
    }
    Decimal::parse(&text).ok().map(|d| (j - i, d))
}

/// Find coordinate pairs `lat, lon` in decimal degrees.
pub fn find_coordinates(text: &str, pack: &LanguagePack) -> Vec<FoundLiteral<CoordinateValue>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        let signed_start = i;
        let (neg_lat, p) = sign_at(&chars, i);
        let bad_prefix = signed_start > 0
            && (is_word_char(chars[signed_start - 1]) || chars[signed_start - 1] == '.');
        if !chars.get(p).is_some_and(|c| c.is_ascii_digit()) || bad_prefix {
            i += 1;
            continue;
        }
        let Some((lat_len, lat)) = decimal_dot_at(&chars, p) else {
            i += 1;
            continue;
        };
        let mut j = p + lat_len;
        if j < chars.len() && chars[j] == ',' {
            j = skip_spaces(&chars, j + 1);
            let (neg_lon, q) = sign_at(&chars, j);
            if let Some((lon_len, lon)) = decimal_dot_at(&chars, q) {
                let end = q + lon_len;
                let lat = if neg_lat { negate(&lat) } else { lat };
                let lon = if neg_lon { negate(&lon) } else { lon };
                if in_range(&lat, 90) && in_range(&lon, 180) && lat_len + lon_len > 2 {
                    out.push(FoundLiteral {
                        start: signed_start,
                        end,
                        value: CoordinateValue { latitude: lat, longitude: lon, precision: None },
                        approximate: is_approx(&chars, signed_start, pack),
                    });
                    i = end;
                    continue;
                }
            }
        }
        i += 1;
    }
    out
}

fn sign_at(chars: &[char], i: usize) -> (bool, usize) {
    if i < chars.len() && chars[i] == '-' {
        (true, i + 1)
    } else {
        (false, i)
    }
}

fn decimal_dot_at(chars: &[char], i: usize) -> Option<(usize, Decimal)> {
    let mut j = i;
    while j < chars.len() && chars[j].is_ascii_digit() {
        j += 1;
    }
    if j == i {
        return None;
    }
    if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
        j += 1;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
    }
    let text: String = chars[i..j].iter().collect();
    Decimal::parse(&text).ok().map(|d| (j - i, d))
}

fn negate(d: &Decimal) -> Decimal {
    Decimal::parse(&alloc::format!("-{}", d)).unwrap_or_else(|_| d.clone())
}

fn in_range(d: &Decimal, bound: i64) -> bool {
    let v = d.to_f64();
    v >= -(bound as f64) && v <= bound as f64
}

/// Find word-boundary-guarded occurrences of `needle` in `haystack`;
/// returns codepoint spans.
pub fn find_string_occurrences(haystack: &str, needle: &str) -> Vec<(usize, usize)> {
    if needle.is_empty() {
        return Vec::new();
    }
    let h: Vec<char> = haystack.chars().collect();
    let n: Vec<char> = needle.chars().collect();
    let mut out = Vec::new();
    if n.len() > h.len() {
        return out;
    }
    let edge_word_start = n.first().is_some_and(|c| is_word_char(*c));
    let edge_word_end = n.last().is_some_and(|c| is_word_char(*c));
    for i in 0..=h.len() - n.len() {
        if h[i..i + n.len()] != n[..] {
            continue;
        }
        if edge_word_start && i > 0 && is_word_char(h[i - 1]) {
            continue;
        }
        let end = i + n.len();
        if edge_word_end && end < h.len() && is_word_char(h[end]) {
            continue;
        }
        out.push((i, end));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pack::{LexicalRules, SegmenterBackend, WikiRules};
    use alloc::collections::BTreeMap;
    use alloc::vec;

    fn en_pack() -> LanguagePack {
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
            vec![],
            vec![],
            WikiRules { capitalize_first: true },
            LexicalRules {
                month_names: months.iter().map(|s| s.to_string()).collect(),
                approximation_markers: vec!["about".into(), "circa".into(), "~".into()],
                unit_surface_forms: units,
                decimal_comma: false,
            },
        )
    }

    #[test]
    fn date_grammar_forms() {
        let p = en_pack();
        let text = "Born on 12 May 1999 in town.";
        let found = find_dates(text, &p);
        assert_eq!(found.len(), 1);
        let f = &found[0];
        assert_eq!(f.value, TimeValue::ymd(1999, 5, 12, TimePrecision::Day));
        let span: String = text.chars().skip(f.start).take(f.end - f.start).collect();
        assert_eq!(span, "12 May 1999");

        let found = find_dates("Opened May 12, 1999 formally.", &p);
        assert_eq!(found[0].value, TimeValue::ymd(1999, 5, 12, TimePrecision::Day));

        let found = find_dates("Around May 1999 it rained.", &p);
        assert_eq!(found[0].value, TimeValue::ymd(1999, 5, 0, TimePrecision::Month));

        let found = find_dates("Built 1999-05-12 exactly.", &p);
        assert_eq!(found[0].value, TimeValue::ymd(1999, 5, 12, TimePrecision::Day));

        let found = find_dates("The year 1999 mattered.", &p);
        assert_eq!(found[0].value, TimeValue::ymd(1999, 0, 0, TimePrecision::Year));
    }

    #[test]
    fn approximation_markers_flag_literals() {
        let p = en_pack();
        let found = find_dates("Born circa 1950 probably.", &p);
        assert!(found[0].approximate);
        let found = find_quantities("It is about 1.7 m tall.", &p);
        assert!(found[0].approximate);
        let found = find_quantities("It is 1.7 m tall.", &p);
        assert!(!found[0].approximate);
        let found = find_quantities("Roughly ~170 cm here.", &p);
        assert!(found[0].approximate);
    }

    #[test]
    fn quantities_with_units() {
        let p = en_pack();
        let found = find_quantities("She is 170 cm tall.", &p);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].value.amount.to_string(), "170");
        assert_eq!(found[0].value.unit, "Q174728");

        let found = find_quantities("It weighs 42 pounds.", &p);
        // Unknown unit word: number parses as dimensionless.
        assert_eq!(found[0].value.unit, "1");
        assert_eq!(found[0].value.amount.to_string(), "42");
    }

    #[test]
    fn decimal_comma_locale() {
        let mut p = en_pack();
        p.lexical.decimal_comma = true;
        let found = find_quantities("Sie ist 1,7 m groß.", &p);
        assert_eq!(found[0].value.amount.to_string(), "1.7");
        assert_eq!(found[0].value.unit, "Q11573");
    }

    #[test]
    fn coordinates_pairs() {
        let p = en_pack();
        let found = find_coordinates("Located at 52.52, 13.405 in the north.", &p);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].value.latitude.to_string(), "52.52");
        assert_eq!(found[0].value.longitude.to_string(), "13.405");

        let found = find_coordinates("At -33.86, 151.21 exactly.", &p);
        assert_eq!(found[0].value.latitude.to_string(), "-33.86");
        // Out-of-range latitudes never match.
        assert!(find_coordinates("At 123.0, 45.0 here.", &p).is_empty());
    }

    #[test]
    fn string_occurrences_respect_word_boundaries() {
        assert_eq!(find_string_occurrences("the Born identity", "Born"), vec![(4, 8)]);
        assert!(find_string_occurrences("Osborne here", "Born").is_empty());
        assert_eq!(find_string_occurrences("a b a b a", "a").len(), 3);
    }
}
