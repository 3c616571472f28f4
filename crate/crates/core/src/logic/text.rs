use super::{Bit, Logic, LogicError};
use std::str::FromStr;

impl FromStr for Logic {
    type Err = LogicError;

    /// Parses `<width>'<base><digits>` with base `b`, `h` or `d`. Binary and
    /// hex digits may be `x`/`X`; a hex X sets four unknown bits. Underscores
    /// are ignored.
    fn from_str(text: &str) -> Result<Logic, LogicError> {
        let malformed = || LogicError::Malformed(text.to_string());
        let (w, rest) = text.trim().split_once('\'').ok_or_else(malformed)?;
        let width: usize = w.trim().parse().map_err(|_| malformed())?;
        if width == 0 {
            return Err(LogicError::ZeroWidth);
        }
        let mut chars = rest.chars();
        let base = chars.next().ok_or_else(malformed)?.to_ascii_lowercase();
        let digits: Vec<char> = chars.filter(|c| *c != '_').collect();
        if digits.is_empty() {
            return Err(malformed());
        }
        match base {
            'b' => parse_radix_pow2(text, width, &digits, 1),
            'h' => parse_radix_pow2(text, width, &digits, 4),
            'd' => parse_decimal(text, width, &digits),
            _ => Err(malformed()),
        }
    }
}

fn parse_radix_pow2(
    text: &str,
    width: usize,
    digits: &[char],
    bits_per_digit: usize,
) -> Result<Logic, LogicError> {
    let mut out = Logic::zeros(width);
    for (pos, c) in digits.iter().rev().enumerate() {
        let digit = if c.eq_ignore_ascii_case(&'x') {
            None
        } else {
            let d = c
                .to_digit(1 << bits_per_digit)
                .ok_or_else(|| LogicError::Malformed(text.to_string()))?;
            Some(d)
        };
        for k in 0..bits_per_digit {
            let i = pos * bits_per_digit + k;
            let bit = match digit {
                None => Bit::X,
                Some(d) if d >> k & 1 == 1 => Bit::One,
                Some(_) => Bit::Zero,
            };
            if i < width {
                out.set_bit(i, bit);
            } else if bit == Bit::One {
                return Err(LogicError::Overflow(text.to_string()));
            }
        }
    }
    Ok(out)
}

fn parse_decimal(text: &str, width: usize, digits: &[char]) -> Result<Logic, LogicError> {
    let n = super::word_count(width);
    // one spare word catches overflow past the top word
    let mut words = vec![0u64; n + 1];
    for c in digits {
        if c.eq_ignore_ascii_case(&'x') {
            return Err(LogicError::DecimalX(text.to_string()));
        }
        let d = c
            .to_digit(10)
            .ok_or_else(|| LogicError::Malformed(text.to_string()))? as u128;
        let mut carry = d;
        for w in words.iter_mut() {
            let t = (*w as u128) * 10 + carry;
            *w = t as u64;
            carry = t >> 64;
        }
        if carry != 0 || words[n] != 0 {
            return Err(LogicError::Overflow(text.to_string()));
        }
    }
    if words[n - 1] & !super::top_mask(width) != 0 {
        return Err(LogicError::Overflow(text.to_string()));
    }
    Ok(Logic::from_planes(width, &words[..n], &[]))
}
