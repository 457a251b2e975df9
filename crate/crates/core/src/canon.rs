//! Canonical JSON: the byte form all identifiers and outputs are defined
//! over.
//!
//! Serialization rules: object keys sorted by Unicode code point,
//! no insignificant whitespace, numbers as exact decimals in
//! shortest-round-trip form, strings NFC-normalized with minimal escaping.
//! Inherited identifiers (QIDs, statement ids, timestamps) are ASCII and
//! pass through NFC untouched, so a single blanket rule covers both
//! derived text and verbatim identifiers.
//!
//! The canonical byte form doubles as the line payload of JSONL outputs:
//! one record per line, LF terminated, UTF-8.
//!
//! ```
//! use factforge_core::canon::{canon_string, parse};
//!
//! let a = parse("{\"b\": 1.50, \"a\": \"e\\u0301\"}").unwrap();
//! let b = parse("{\"a\":\"\u{00e9}\",\"b\":1.5}").unwrap();
//! assert_eq!(canon_string(&a), canon_string(&b));
//! ```

use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use unicode_normalization::{is_nfc, UnicodeNormalization};

use crate::decimal::Decimal;

/// A structured value restricted to the canonicalizable kinds: maps,
/// lists, strings, exact decimals, booleans and null.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Num(Decimal),
    Str(String),
    Arr(Vec<Value>),
    Map(BTreeMap<String, Value>),
}

/// Canonicalization failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonError {
    /// A value kind outside the allowed set (for example a non-finite
    /// float) was handed to the serializer.
    NonCanonicalizable(String),
    /// Input text is not a single well-formed JSON document.
    Parse { offset: usize, message: String },
}

impl fmt::Display for CanonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonError::NonCanonicalizable(what) => {
                write!(f, "value cannot be canonicalized: {}", what)
            }
            CanonError::Parse { offset, message } => {
                write!(f, "canonical JSON parse error at byte {}: {}", offset, message)
            }
        }
    }
}

impl core::error::Error for CanonError {}

impl Value {
    pub fn str(s: impl Into<String>) -> Value {
        Value::Str(s.into())
    }

    pub fn int(v: i64) -> Value {
        Value::Num(Decimal::from_i64(v))
    }

    /// Floats enter the canonical world through their shortest
    /// round-trip decimal form; NaN and infinities are rejected.
    pub fn try_f64(v: f64) -> Result<Value, CanonError> {
        Decimal::from_f64(v)
            .map(Value::Num)
            .ok_or_else(|| CanonError::NonCanonicalizable("non-finite float".to_string()))
    }

    pub fn map(entries: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
        Value::Map(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&BTreeMap<String, Value>> {
        match self {
            Value::Map(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_arr(&self) -> Option<&[Value]> {
        match self {
            Value::Arr(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<&Decimal> {
        match self {
            Value::Num(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Map field access helper; `None` for non-maps and missing keys.
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.as_map().and_then(|m| m.get(key))
    }
}

fn nfc(s: &str) -> Cow<'_, str> {
    if is_nfc(s) {
        Cow::Borrowed(s)
    } else {
        Cow::Owned(s.nfc().collect())
    }
}

fn escape_into(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\u{0008}' => out.push_str("\\b"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\u{000C}' => out.push_str("\\f"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                const HEX: &[u8; 16] = b"0123456789abcdef";
                let v = c as u32;
                out.push_str("\\u00");
                out.push(HEX[(v >> 4) as usize] as char);
                out.push(HEX[(v & 0xF) as usize] as char);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(true) => out.push_str("true"),
        Value::Bool(false) => out.push_str("false"),
        Value::Num(d) => out.push_str(&d.to_string()),
        Value::Str(s) => escape_into(out, &nfc(s)),
        Value::Arr(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Map(entries) => {
            // Keys are NFC-normalized before ordering; the map is keyed on
            // the stored form, so normalization may in principle fold two
            // keys together. Re-sorting after normalization keeps the
            // output ordered by code point either way.
            let mut normed: Vec<(Cow<'_, str>, &Value)> =
                entries.iter().map(|(k, v)| (nfc(k), v)).collect();
            normed.sort_by(|a, b| a.0.cmp(&b.0));
            out.push('{');
            for (i, (k, v)) in normed.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                escape_into(out, k);
                out.push(':');
                write_value(out, v);
            }
            out.push('}');
        }
    }
}

/// Serialize a record to its canonical byte sequence.
pub fn canon_serialize(record: &Value) -> Vec<u8> {
    canon_string(record).into_bytes()
}

/// Canonical form as a string; identical content to [`canon_serialize`].
pub fn canon_string(record: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, record);
    out
}

const MAX_DEPTH: usize = 512;

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, CanonError> {
        Err(CanonError::Parse { offset: self.pos, message: message.into() })
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == b' ' || c == b'\t' || c == b'\n' || c == b'\r' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), CanonError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(alloc::format!("expected '{}'", c as char))
        }
    }

    fn parse_value(&mut self, depth: usize) -> Result<Value, CanonError> {
        if depth > MAX_DEPTH {
            return self.err("nesting too deep");
        }
        self.skip_ws();
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'{') => self.parse_map(depth),
            Some(b'[') => self.parse_arr(depth),
            Some(b'"') => Ok(Value::Str(self.parse_string()?)),
            Some(b't') => self.parse_lit("true", Value::Bool(true)),
            Some(b'f') => self.parse_lit("false", Value::Bool(false)),
            Some(b'n') => self.parse_lit("null", Value::Null),
            Some(c) if c == b'-' || c.is_ascii_digit() => self.parse_number(),
            Some(c) => self.err(alloc::format!("unexpected byte 0x{:02x}", c)),
        }
    }

    fn parse_lit(&mut self, lit: &str, v: Value) -> Result<Value, CanonError> {
        if self.bytes[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            Ok(v)
        } else {
            self.err(alloc::format!("expected '{}'", lit))
        }
    }

    fn parse_number(&mut self) -> Result<Value, CanonError> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        // JSON forbids leading zeros on the integer part.
        if self.peek() == Some(b'0')
            && self.bytes.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit())
        {
            return self.err("leading zero in number");
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || c == b'+' || c == b'-' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = core::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| CanonError::Parse { offset: start, message: "bad utf-8".to_string() })?;
        match Decimal::parse(text) {
            Ok(d) => Ok(Value::Num(d)),
            Err(_) => Err(CanonError::Parse {
                offset: start,
                message: alloc::format!("invalid number literal '{}'", text),
            }),
        }
    }

    fn parse_string(&mut self) -> Result<String, CanonError> {
        self.expect(b'"')?;
        let mut out = String::new();
        loop {
            let Some(c) = self.peek() else {
                return self.err("unterminated string");
            };
            self.pos += 1;
            match c {
                b'"' => return Ok(out),
                b'\\' => {
                    let Some(esc) = self.peek() else {
                        return self.err("unterminated escape");
                    };
                    self.pos += 1;
                    match esc {
                        b'"' => out.push('"'),
                        b'\\' => out.push('\\'),
                        b'/' => out.push('/'),
                        b'b' => out.push('\u{0008}'),
                        b'f' => out.push('\u{000C}'),
                        b'n' => out.push('\n'),
                        b'r' => out.push('\r'),
                        b't' => out.push('\t'),
                        b'u' => {
                            let hi = self.parse_hex4()?;
                            let cp = if (0xD800..0xDC00).contains(&hi) {
                                if self.peek() == Some(b'\\') {
                                    self.pos += 1;
                                    self.expect(b'u')?;
                                    let lo = self.parse_hex4()?;
                                    if !(0xDC00..0xE000).contains(&lo) {
                                        return self.err("invalid low surrogate");
                                    }
                                    0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00)
                                } else {
                                    return self.err("lone high surrogate");
                                }
                            } else if (0xDC00..0xE000).contains(&hi) {
                                return self.err("lone low surrogate");
                            } else {
                                hi
                            };
                            match char::from_u32(cp) {
                                Some(ch) => out.push(ch),
                                None => return self.err("invalid code point"),
                            }
                        }
                        _ => return self.err("invalid escape"),
                    }
                }
                c if c < 0x20 => return self.err("raw control character in string"),
                c if c < 0x80 => out.push(c as char),
                _ => {
                    // Multi-byte UTF-8 sequence; re-decode from the byte
                    // before the one just consumed.
                    let start = self.pos - 1;
                    let take = Self::utf8_len(c).min(self.bytes.len() - start);
                    let s = core::str::from_utf8(&self.bytes[start..start + take]).map_err(
                        |_| CanonError::Parse { offset: start, message: "bad utf-8".to_string() },
                    )?;
                    let ch = s.chars().next().ok_or(CanonError::Parse {
                        offset: start,
                        message: "bad utf-8".to_string(),
                    })?;
                    out.push(ch);
                    self.pos = start + ch.len_utf8();
                }
            }
        }
    }

    fn utf8_len(first: u8) -> usize {
        match first {
            0xC0..=0xDF => 2,
            0xE0..=0xEF => 3,
            _ => 4,
        }
    }

    fn parse_hex4(&mut self) -> Result<u32, CanonError> {
        let mut v = 0u32;
        for _ in 0..4 {
            let Some(c) = self.peek() else {
                return self.err("truncated \\u escape");
            };
            self.pos += 1;
            let d = match c {
                b'0'..=b'9' => (c - b'0') as u32,
                b'a'..=b'f' => (c - b'a') as u32 + 10,
                b'A'..=b'F' => (c - b'A') as u32 + 10,
                _ => return self.err("bad hex digit"),
            };
            v = (v << 4) | d;
        }
        Ok(v)
    }

    fn parse_arr(&mut self, depth: usize) -> Result<Value, CanonError> {
        self.expect(b'[')?;
        let mut items = Vec::new();
        self.skip_ws();
        if self.peek() == Some(b']') {
            self.pos += 1;
            return Ok(Value::Arr(items));
        }
        loop {
            items.push(self.parse_value(depth + 1)?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b']') => {
                    self.pos += 1;
                    return Ok(Value::Arr(items));
                }
                _ => return self.err("expected ',' or ']'"),
            }
        }
    }

    fn parse_map(&mut self, depth: usize) -> Result<Value, CanonError> {
        self.expect(b'{')?;
        let mut entries = BTreeMap::new();
        self.skip_ws();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Ok(Value::Map(entries));
        }
        loop {
            self.skip_ws();
            let key = self.parse_string()?;
            self.skip_ws();
            self.expect(b':')?;
            let value = self.parse_value(depth + 1)?;
            if entries.insert(key, value).is_some() {
                return self.err("duplicate object key");
            }
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(Value::Map(entries));
                }
                _ => return self.err("expected ',' or '}'"),
            }
        }
    }
}

/// Parse a JSON document into a [`Value`]. Accepts any well-formed
/// JSON (not only canonical bytes); numbers keep their exact decimal
/// digits, so parse followed by [`canon_serialize`] canonicalizes.
pub fn parse(text: &str) -> Result<Value, CanonError> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0 };
    let v = p.parse_value(0)?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return p.err("trailing content after document");
    }
    Ok(v)
}
