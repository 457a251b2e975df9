//! Exact decimal numbers.
//!
//! Quantities, coordinates and confidence values are carried as exact
//! decimals, never as binary floating point, so that canonical byte output
//! is identical on every platform. A value is stored as
//! `sign * digits * 10^exp` where `digits` has no leading or trailing
//! zeros; zero is the empty digit string.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// An arbitrary-precision decimal with an exact base-10 representation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Decimal {
    neg: bool,
    /// Significant digits, each 0..=9, no leading or trailing zeros.
    digits: Vec<u8>,
    /// Power of ten applied to the digit string read as an integer.
    exp: i32,
}

/// Error parsing a decimal literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDecimalError;

impl fmt::Display for ParseDecimalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid decimal literal")
    }
}

impl core::error::Error for ParseDecimalError {}

impl Decimal {
    pub fn zero() -> Self {
        Decimal { neg: false, digits: Vec::new(), exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    pub fn from_i64(v: i64) -> Self {
        let mut s = String::new();
        fmt::write(&mut s, format_args!("{}", v)).unwrap();
        Self::parse(&s).unwrap()
    }

    /// Exact conversion from a float by way of its shortest round-trip
    /// decimal rendering. NaN and infinities have no decimal form.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        let mut s = String::new();
        fmt::write(&mut s, format_args!("{}", v)).unwrap();
        Some(Self::parse(&s).unwrap())
    }

    /// Nearest-f64 view of the value. Lossy for more than ~17 significant
    /// digits; used only where a metric is defined over floats.
    pub fn to_f64(&self) -> f64 {
        let mut s = String::new();
        fmt::write(&mut s, format_args!("{}", self)).unwrap();
        s.parse::<f64>().unwrap_or(0.0)
    }

    /// Parse a JSON-style number literal: optional sign, integer part,
    /// optional fraction, optional exponent.
    pub fn parse(s: &str) -> Result<Self, ParseDecimalError> {
        let b = s.as_bytes();
        let mut i = 0usize;
        let mut neg = false;
        if i < b.len() && (b[i] == b'-' || b[i] == b'+') {
            neg = b[i] == b'-';
            i += 1;
        }
        let int_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == int_start {
            return Err(ParseDecimalError);
        }
        let int_part = &b[int_start..i];
        let mut frac_part: &[u8] = &[];
        if i < b.len() && b[i] == b'.' {
            i += 1;
            let fs = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if i == fs {
                return Err(ParseDecimalError);
            }
            frac_part = &b[fs..i];
        }
        let mut exp10: i64 = 0;
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            i += 1;
            let mut eneg = false;
            if i < b.len() && (b[i] == b'-' || b[i] == b'+') {
                eneg = b[i] == b'-';
                i += 1;
            }
            let es = i;
            let mut acc: i64 = 0;
            while i < b.len() && b[i].is_ascii_digit() {
                acc = acc.saturating_mul(10).saturating_add((b[i] - b'0') as i64);
                i += 1;
            }
            if i == es || acc > i32::MAX as i64 {
                return Err(ParseDecimalError);
            }
            exp10 = if eneg { -acc } else { acc };
        }
        if i != b.len() {
            return Err(ParseDecimalError);
        }
        let mut digits: Vec<u8> = Vec::with_capacity(int_part.len() + frac_part.len());
        digits.extend(int_part.iter().map(|c| c - b'0'));
        digits.extend(frac_part.iter().map(|c| c - b'0'));
        let exp = exp10 - frac_part.len() as i64;
        if exp < i32::MIN as i64 || exp > i32::MAX as i64 {
            return Err(ParseDecimalError);
        }
        Ok(Self::normalized(neg, digits, exp as i32))
    }

    fn normalized(neg: bool, mut digits: Vec<u8>, mut exp: i32) -> Self {
        let lead = digits.iter().take_while(|&&d| d == 0).count();
        digits.drain(..lead);
        while let Some(&0) = digits.last() {
            digits.pop();
            exp += 1;
        }
        if digits.is_empty() {
            Decimal::zero()
        } else {
            Decimal { neg, digits, exp }
        }
    }

    /// Exact product. Digit-vector schoolbook multiplication; inputs stay
    /// short in practice (statement quantities and unit factors).
    pub fn mul(&self, other: &Decimal) -> Decimal {
        if self.is_zero() || other.is_zero() {
            return Decimal::zero();
        }
        let mut acc = vec![0u32; self.digits.len() + other.digits.len()];
        for (i, &a) in self.digits.iter().rev().enumerate() {
            for (j, &b) in other.digits.iter().rev().enumerate() {
                acc[i + j] += a as u32 * b as u32;
            }
        }
        let mut carry = 0u32;
        for cell in acc.iter_mut() {
            let v = *cell + carry;
            *cell = v % 10;
            carry = v / 10;
        }
        while carry > 0 {
            acc.push(carry % 10);
            carry /= 10;
        }
        let digits: Vec<u8> = acc.iter().rev().map(|&d| d as u8).collect();
        Self::normalized(self.neg != other.neg, digits, self.exp + other.exp)
    }

    /// Round to `dp` decimal places, half away from zero. The result is
    /// re-normalized, so trailing zeros introduced by rounding do not
    /// survive into the canonical rendering.
    pub fn round_dp(&self, dp: u32) -> Decimal {
        let dp = dp as i32;
        if self.is_zero() || self.exp >= -dp {
            return self.clone();
        }
        let drop = (-dp - self.exp) as usize;
        if drop >= self.digits.len() {
            // All significant digits sit below the rounding point.
            let first = self.digits.first().copied().unwrap_or(0);
            let round_up = drop == self.digits.len() && first >= 5;
            return if round_up {
                Self::normalized(self.neg, vec![1], -dp)
            } else {
                Decimal::zero()
            };
        }
        let mut kept: Vec<u8> = self.digits[..self.digits.len() - drop].to_vec();
        let first_dropped = self.digits[self.digits.len() - drop];
        if first_dropped >= 5 {
            let mut i = kept.len();
            loop {
                if i == 0 {
                    kept.insert(0, 1);
                    break;
                }
                i -= 1;
                if kept[i] == 9 {
                    kept[i] = 0;
                } else {
                    kept[i] += 1;
                    break;
                }
            }
        }
        Self::normalized(self.neg, kept, -dp)
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    /// Numeric ordering.
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        use core::cmp::Ordering;
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return if other.neg { Ordering::Greater } else { Ordering::Less },
            (false, true) => return if self.neg { Ordering::Less } else { Ordering::Greater },
            _ => {}
        }
        match (self.neg, other.neg) {
            (false, true) => return Ordering::Greater,
            (true, false) => return Ordering::Less,
            _ => {}
        }
        let mag = self.cmp_magnitude(other);
        if self.neg {
            mag.reverse()
        } else {
            mag
        }
    }
}

impl Decimal {
    fn cmp_magnitude(&self, other: &Self) -> core::cmp::Ordering {
        let adj_a = self.exp as i64 + self.digits.len() as i64 - 1;
        let adj_b = other.exp as i64 + other.digits.len() as i64 - 1;
        adj_a.cmp(&adj_b).then_with(|| {
            let n = self.digits.len().max(other.digits.len());
            for i in 0..n {
                let a = self.digits.get(i).copied().unwrap_or(0);
                let b = other.digits.get(i).copied().unwrap_or(0);
                match a.cmp(&b) {
                    core::cmp::Ordering::Equal => continue,
                    other => return other,
                }
            }
            core::cmp::Ordering::Equal
        })
    }
}

impl fmt::Display for Decimal {
    /// Canonical rendering: shortest digit string, explicit leading zero,
    /// plain notation while the adjusted exponent is within +/-20 and
    /// lowercase `e` scientific form beyond that.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        if self.neg {
            out.push('-');
        }
        let n = self.digits.len() as i32;
        let adj = self.exp + n - 1;
        let push_digits = |out: &mut String, ds: &[u8]| {
            for &d in ds {
                out.push((b'0' + d) as char);
            }
        };
        if adj > -21 && adj < 21 {
            if self.exp >= 0 {
                push_digits(&mut out, &self.digits);
                for _ in 0..self.exp {
                    out.push('0');
                }
            } else {
                let point = n + self.exp;
                if point > 0 {
                    push_digits(&mut out, &self.digits[..point as usize]);
                    out.push('.');
                    push_digits(&mut out, &self.digits[point as usize..]);
                } else {
                    out.push_str("0.");
                    for _ in 0..(-point) {
                        out.push('0');
                    }
                    push_digits(&mut out, &self.digits);
                }
            }
        } else {
            out.push((b'0' + self.digits[0]) as char);
            if self.digits.len() > 1 {
                out.push('.');
                push_digits(&mut out, &self.digits[1..]);
            }
            out.push('e');
            fmt::write(&mut out, format_args!("{}", adj))?;
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Decimal({})", self)
    }
}
