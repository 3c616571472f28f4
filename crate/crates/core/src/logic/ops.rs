//! Value-level operations with three-state semantics.
//!
//! Bitwise operations follow the per-bit tables (0 dominates AND, 1
//! dominates OR, any X poisons XOR). Arithmetic is pessimistic: a single X
//! operand bit makes the whole result X. Comparisons return a definite bit
//! whenever every resolution of the X bits agrees.

use super::{top_mask, word_count, Bit, Logic, LogicError, Words};
use smallvec::SmallVec;
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReduceKind {
    And,
    Or,
    Xor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

fn check_widths(a: &Logic, b: &Logic) -> Result<(), LogicError> {
    if a.width != b.width {
        Err(LogicError::WidthMismatch(a.width, b.width))
    } else {
        Ok(())
    }
}

fn planes_with(width: usize, f: impl Fn(usize) -> (u64, u64)) -> Logic {
    let n = word_count(width);
    let mut v: Words = SmallVec::with_capacity(n);
    let mut x: Words = SmallVec::with_capacity(n);
    for i in 0..n {
        let (vi, xi) = f(i);
        v.push(vi);
        x.push(xi);
    }
    let mut out = Logic { width, v, x };
    out.canonicalize();
    out
}

/// Unsigned comparison of equal-length little-endian word slices.
fn cmp_words(a: &[u64], b: &[u64]) -> Ordering {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// `out = a + b + carry_in` over equal-length slices, wrapping.
fn add_words(a: &[u64], b: &[u64], carry_in: bool) -> Words {
    let mut out: Words = SmallVec::with_capacity(a.len());
    let mut carry = carry_in as u64;
    for (x, y) in a.iter().zip(b) {
        let (s1, c1) = x.overflowing_add(*y);
        let (s2, c2) = s1.overflowing_add(carry);
        out.push(s2);
        carry = (c1 | c2) as u64;
    }
    out
}

/// Truncating schoolbook product: `n` output words.
fn mul_words(a: &[u64], b: &[u64], n: usize) -> Words {
    let mut out: Words = SmallVec::from_elem(0, n);
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 || i >= n {
            continue;
        }
        let mut carry: u128 = 0;
        for (j, &bj) in b.iter().enumerate() {
            if i + j >= n {
                break;
            }
            let t = (ai as u128) * (bj as u128) + out[i + j] as u128 + carry;
            out[i + j] = t as u64;
            carry = t >> 64;
        }
        let mut k = i + b.len();
        while carry != 0 && k < n {
            let t = out[k] as u128 + carry;
            out[k] = t as u64;
            carry = t >> 64;
            k += 1;
        }
    }
    out
}

fn get_bit(words: &[u64], i: usize) -> bool {
    words[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit_word(words: &mut [u64], i: usize, b: bool) {
    let m = 1u64 << (i % 64);
    if b {
        words[i / 64] |= m;
    } else {
        words[i / 64] &= !m;
    }
}

/// `count` bits of `words` starting at `low`; bits at or past `limit` read
/// as `fill`.
fn extract(words: &[u64], limit: usize, low: usize, count: usize, fill: bool) -> Words {
    let n = word_count(count);
    let mut out: Words = SmallVec::from_elem(0, n);
    for i in 0..count {
        let src = low.checked_add(i);
        let b = match src {
            Some(s) if s < limit => get_bit(words, s),
            _ => fill,
        };
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

impl Logic {
    pub fn not(&self) -> Logic {
        let m = top_mask(self.width);
        let n = self.v.len();
        planes_with(self.width, |i| {
            let mask = if i == n - 1 { m } else { u64::MAX };
            (!self.v[i] & !self.x[i] & mask, self.x[i])
        })
    }

    pub fn and(&self, other: &Logic) -> Result<Logic, LogicError> {
        check_widths(self, other)?;
        Ok(planes_with(self.width, |i| {
            let (av, ax, bv, bx) = (self.v[i], self.x[i], other.v[i], other.x[i]);
            let known0 = (!av & !ax) | (!bv & !bx);
            let x = (ax | bx) & !known0;
            (av & bv & !x, x)
        }))
    }

    pub fn or(&self, other: &Logic) -> Result<Logic, LogicError> {
        check_widths(self, other)?;
        Ok(planes_with(self.width, |i| {
            let (av, ax, bv, bx) = (self.v[i], self.x[i], other.v[i], other.x[i]);
            let known1 = (av & !ax) | (bv & !bx);
            let x = (ax | bx) & !known1;
            ((av | bv) & !x, x)
        }))
    }

    pub fn xor(&self, other: &Logic) -> Result<Logic, LogicError> {
        check_widths(self, other)?;
        Ok(planes_with(self.width, |i| {
            let x = self.x[i] | other.x[i];
            ((self.v[i] ^ other.v[i]) & !x, x)
        }))
    }

    /// Bitwise agreement: bits equal in both operands keep their value,
    /// differing bits become X. Models an unresolved choice between two
    /// alternatives.
    pub fn merge(&self, other: &Logic) -> Result<Logic, LogicError> {
        check_widths(self, other)?;
        Ok(planes_with(self.width, |i| {
            let x = self.x[i] | other.x[i] | (self.v[i] ^ other.v[i]);
            (self.v[i] & !x, x)
        }))
    }

    pub fn reduce(&self, kind: ReduceKind) -> Logic {
        let n = self.v.len();
        let m = top_mask(self.width);
        let any_x = self.has_x();
        let bit = match kind {
            ReduceKind::And => {
                let any_known0 = (0..n).any(|i| {
                    let mask = if i == n - 1 { m } else { u64::MAX };
                    !self.v[i] & !self.x[i] & mask != 0
                });
                if any_known0 {
                    Bit::Zero
                } else if any_x {
                    Bit::X
                } else {
                    Bit::One
                }
            }
            ReduceKind::Or => {
                if self.v.iter().any(|w| *w != 0) {
                    Bit::One
                } else if any_x {
                    Bit::X
                } else {
                    Bit::Zero
                }
            }
            ReduceKind::Xor => {
                if any_x {
                    Bit::X
                } else if self.v.iter().map(|w| w.count_ones()).sum::<u32>() % 2 == 1 {
                    Bit::One
                } else {
                    Bit::Zero
                }
            }
        };
        Logic::from_bit(bit)
    }

    /// Zero- or sign-extends, or truncates, to `width`. A sign-extension
    /// copies an X sign bit as X.
    pub fn resize(&self, width: usize, signed: bool) -> Logic {
        assert!(width > 0, "resize to zero width");
        if width == self.width {
            return self.clone();
        }
        let sign = if signed { self.bit(self.width - 1) } else { Bit::Zero };
        let v = extract(&self.v, self.width, 0, width, sign == Bit::One);
        let x = extract(&self.x, self.width, 0, width, sign == Bit::X);
        let mut out = Logic { width, v, x };
        out.canonicalize();
        out
    }

    fn arith_unknown(&self, other: &Logic) -> bool {
        self.has_x() || other.has_x()
    }

    /// Sum of width `w + 1`.
    pub fn add(&self, other: &Logic, signed: bool) -> Result<Logic, LogicError> {
        check_widths(self, other)?;
        let w = self.width + 1;
        if self.arith_unknown(other) {
            return Ok(Logic::unknown(w));
        }
        let a = self.resize(w, signed);
        let b = other.resize(w, signed);
        let v = add_words(&a.v, &b.v, false);
        Ok(Logic::from_planes(w, &v, &[]))
    }

    /// Difference of width `w + 1` (two's complement, borrow in the top bit
    /// for unsigned operands).
    pub fn sub(&self, other: &Logic, signed: bool) -> Result<Logic, LogicError> {
        check_widths(self, other)?;
        let w = self.width + 1;
        if self.arith_unknown(other) {
            return Ok(Logic::unknown(w));
        }
        let a = self.resize(w, signed);
        let nb = other.resize(w, signed).not();
        let v = add_words(&a.v, &nb.v, true);
        Ok(Logic::from_planes(w, &v, &[]))
    }

    /// Product of width `2w`.
    pub fn mul(&self, other: &Logic, signed: bool) -> Result<Logic, LogicError> {
        check_widths(self, other)?;
        let w = self.width * 2;
        if self.arith_unknown(other) {
            return Ok(Logic::unknown(w));
        }
        let a = self.resize(w, signed);
        let b = other.resize(w, signed);
        let v = mul_words(&a.v, &b.v, word_count(w));
        Ok(Logic::from_planes(w, &v, &[]))
    }

    /// Unsigned quotient and remainder, each of the operand width. A zero
    /// divisor or any X operand bit yields all-X for both.
    pub fn divmod(&self, other: &Logic) -> Result<(Logic, Logic), LogicError> {
        check_widths(self, other)?;
        let w = self.width;
        if self.arith_unknown(other) || other.v.iter().all(|x| *x == 0) {
            return Ok((Logic::unknown(w), Logic::unknown(w)));
        }
        let n = word_count(w);
        if n == 1 {
            let (a, b) = (self.v[0], other.v[0]);
            return Ok((Logic::from_u64(w, a / b), Logic::from_u64(w, a % b)));
        }
        // restoring long division, one bit per step
        let mut q: Words = SmallVec::from_elem(0, n);
        let mut r: Words = SmallVec::from_elem(0, n + 1);
        let mut d: Words = other.v.clone();
        d.push(0);
        for i in (0..w).rev() {
            // r = (r << 1) | bit
            let mut carry = get_bit(&self.v, i) as u64;
            for word in r.iter_mut() {
                let next = *word >> 63;
                *word = *word << 1 | carry;
                carry = next;
            }
            if cmp_words(&r, &d) != Ordering::Less {
                let nd: Words = d.iter().map(|x| !x).collect();
                r = add_words(&r, &nd, true);
                set_bit_word(&mut q, i, true);
            }
        }
        Ok((
            Logic::from_planes(w, &q, &[]),
            Logic::from_planes(w, &r[..n], &[]),
        ))
    }

    fn eq_bit(&self, other: &Logic) -> Bit {
        let differs = (0..self.v.len()).any(|i| {
            let known = !self.x[i] & !other.x[i];
            known & (self.v[i] ^ other.v[i]) != 0
        });
        if differs {
            Bit::Zero
        } else if self.arith_unknown(other) {
            Bit::X
        } else {
            Bit::One
        }
    }

    /// Planes of the smallest and largest values reachable by resolving X
    /// bits, in an order-preserving unsigned encoding. For signed operands
    /// the sign bit is flipped so that two's-complement order becomes
    /// unsigned order.
    fn range_words(&self, signed: bool) -> (Words, Words) {
        let mut v = self.v.clone();
        if signed {
            let top = self.width - 1;
            if !get_bit(&self.x, top) {
                let b = get_bit(&v, top);
                set_bit_word(&mut v, top, !b);
            }
        }
        let max: Words = v.iter().zip(&self.x).map(|(v, x)| v | x).collect();
        (v, max)
    }

    /// `self < other` resolved three-way.
    fn lt_bit(&self, other: &Logic, signed: bool, or_equal: bool) -> Bit {
        let (amin, amax) = self.range_words(signed);
        let (bmin, bmax) = other.range_words(signed);
        let definitely = match cmp_words(&amax, &bmin) {
            Ordering::Less => true,
            Ordering::Equal => or_equal,
            Ordering::Greater => false,
        };
        if definitely {
            return Bit::One;
        }
        let impossible = match cmp_words(&amin, &bmax) {
            Ordering::Greater => true,
            Ordering::Equal => !or_equal,
            Ordering::Less => false,
        };
        if impossible {
            Bit::Zero
        } else {
            Bit::X
        }
    }

    /// One-bit comparison result. `signed` selects two's-complement order
    /// for the relational operators.
    pub fn cmp(&self, op: CmpOp, other: &Logic, signed: bool) -> Result<Logic, LogicError> {
        check_widths(self, other)?;
        let bit = match op {
            CmpOp::Eq => self.eq_bit(other),
            CmpOp::Ne => match self.eq_bit(other) {
                Bit::Zero => Bit::One,
                Bit::One => Bit::Zero,
                Bit::X => Bit::X,
            },
            CmpOp::Lt => self.lt_bit(other, signed, false),
            CmpOp::Le => self.lt_bit(other, signed, true),
            CmpOp::Gt => other.lt_bit(self, signed, false),
            CmpOp::Ge => other.lt_bit(self, signed, true),
        };
        Ok(Logic::from_bit(bit))
    }

    /// Concatenation with the first part at the least-significant end.
    pub fn cat(parts: &[Logic]) -> Result<Logic, LogicError> {
        if parts.is_empty() {
            return Err(LogicError::EmptyCat);
        }
        let width: usize = parts.iter().map(|p| p.width).sum();
        let mut out = Logic::zeros(width);
        let mut offset = 0;
        for p in parts {
            out.deposit(offset, p);
            offset += p.width;
        }
        Ok(out)
    }

    /// Writes `src` into bits `[offset, offset + src.width)`, dropping bits
    /// that fall past the top.
    pub(crate) fn deposit(&mut self, offset: usize, src: &Logic) {
        if offset.is_multiple_of(64) {
            let base = offset / 64;
            let n = src.v.len();
            for i in 0..n {
                if base + i >= self.v.len() {
                    break;
                }
                let mask = if i == n - 1 { top_mask(src.width) } else { u64::MAX };
                self.v[base + i] = (self.v[base + i] & !mask) | src.v[i];
                self.x[base + i] = (self.x[base + i] & !mask) | src.x[i];
            }
            self.canonicalize();
            return;
        }
        for i in 0..src.width {
            let dst = offset + i;
            if dst >= self.width {
                break;
            }
            self.set_bit(dst, src.bit(i));
        }
    }

    /// Static part-select of bits `[low, low + count)`. Positions past the
    /// top read as X.
    pub fn select(&self, low: usize, count: usize) -> Logic {
        assert!(count > 0, "select of zero bits");
        let v = extract(&self.v, self.width, low, count, false);
        let x = extract(&self.x, self.width, low, count, true);
        let mut out = Logic { width: count, v, x };
        out.canonicalize();
        out
    }

    /// Part-select at a runtime index. Any X in the index gives all-X.
    pub fn dyn_select(&self, idx: &Logic, count: usize) -> Logic {
        match idx.index_value() {
            Some(low) => self.select(low, count),
            None if idx.has_x() => Logic::unknown(count),
            // index beyond usize: entirely out of range
            None => Logic::unknown(count),
        }
    }

    /// Replaces bits `[idx, idx + value.width)` with `value`. An X index makes
    /// the whole result X; bits that land past the top are dropped.
    pub fn insert(&self, idx: &Logic, value: &Logic) -> Logic {
        if idx.has_x() {
            return Logic::unknown(self.width);
        }
        let mut out = self.clone();
        if let Some(low) = idx.index_value() {
            if low < self.width {
                out.deposit(low, value);
            }
        }
        out
    }

    /// Binary index as `usize`, if representable.
    pub(crate) fn index_value(&self) -> Option<usize> {
        if self.has_x() || self.v.iter().skip(1).any(|w| *w != 0) {
            return None;
        }
        usize::try_from(self.v[0]).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::super::lit;
    use super::*;

    #[test]
    fn not_examples() {
        assert_eq!(lit("1'b0").not(), lit("1'b1"));
        assert_eq!(lit("3'b1x0").not(), lit("3'b0x1"));
        let a = lit("7'b1010011");
        assert_eq!(a.not().not(), a);
    }

    #[test]
    fn bitwise_examples() {
        assert_eq!(lit("3'b1x0").and(&lit("3'b110")).unwrap(), lit("3'b1x0"));
        assert_eq!(lit("3'b1x0").or(&lit("3'b010")).unwrap(), lit("3'b110"));
        assert_eq!(lit("2'b1x").xor(&lit("2'b11")).unwrap(), lit("2'b0x"));
        assert_eq!(
            lit("2'b1x").and(&lit("3'b111")),
            Err(LogicError::WidthMismatch(2, 3))
        );
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(lit("4'b1x00").reduce(ReduceKind::Or), lit("1'b1"));
        assert_eq!(lit("4'b1x11").reduce(ReduceKind::And), lit("1'bx"));
        assert_eq!(lit("4'b0000").reduce(ReduceKind::Xor), lit("1'b0"));
        assert_eq!(lit("4'b0x11").reduce(ReduceKind::And), lit("1'b0"));
        assert_eq!(lit("3'b111").reduce(ReduceKind::Xor), lit("1'b1"));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(lit("4'b0011").add(&lit("4'b0001"), false).unwrap(), lit("5'b00100"));
        assert_eq!(lit("4'b00x1").add(&lit("4'b0001"), false).unwrap(), lit("5'bxxxxx"));
        assert_eq!(lit("4'd7").mul(&lit("4'd9"), false).unwrap(), lit("8'd63"));
        assert_eq!(lit("4'd2").sub(&lit("4'd3"), false).unwrap(), lit("5'b11111"));
        // signed: -1 + -1 = -2
        assert_eq!(lit("4'b1111").add(&lit("4'b1111"), true).unwrap(), lit("5'b11110"));
        // signed: -2 * 3 = -6
        assert_eq!(lit("4'b1110").mul(&lit("4'b0011"), true).unwrap().to_i128(), Some(-6));
    }

    #[test]
    fn divmod_examples() {
        assert_eq!(
            lit("8'd100").divmod(&lit("8'd7")).unwrap(),
            (lit("8'd14"), lit("8'd2"))
        );
        let all_x = Logic::unknown(8);
        assert_eq!(lit("8'd5").divmod(&lit("8'd0")).unwrap(), (all_x.clone(), all_x.clone()));
        assert_eq!(lit("8'd5").divmod(&lit("8'b000000x0")).unwrap(), (all_x.clone(), all_x));
    }

    #[test]
    fn wide_divmod() {
        let a = Logic::from_u128(100, 0x1234_5678_9abc_def0_1122_3344u128);
        let b = Logic::from_u128(100, 0x1_0000_0003u128);
        let (q, r) = a.divmod(&b).unwrap();
        let (av, bv) = (0x1234_5678_9abc_def0_1122_3344u128, 0x1_0000_0003u128);
        assert_eq!(q.to_u128(), Some(av / bv));
        assert_eq!(r.to_u128(), Some(av % bv));
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(lit("4'b1010").cmp(CmpOp::Eq, &lit("4'b1010"), false).unwrap(), lit("1'b1"));
        assert_eq!(lit("4'b1x10").cmp(CmpOp::Eq, &lit("4'b0x10"), false).unwrap(), lit("1'b0"));
        assert_eq!(lit("4'b1x10").cmp(CmpOp::Eq, &lit("4'b1x10"), false).unwrap(), lit("1'bx"));
        assert_eq!(lit("4'b1xxx").cmp(CmpOp::Lt, &lit("4'b0100"), false).unwrap(), lit("1'b0"));
        assert_eq!(lit("4'b0xxx").cmp(CmpOp::Lt, &lit("4'b0100"), false).unwrap(), lit("1'bx"));
        // signed: 4'b1000 is -8
        assert_eq!(lit("4'b1000").cmp(CmpOp::Lt, &lit("4'b0001"), true).unwrap(), lit("1'b1"));
        assert_eq!(lit("4'b1000").cmp(CmpOp::Lt, &lit("4'b0001"), false).unwrap(), lit("1'b0"));
        assert_eq!(lit("4'bx000").cmp(CmpOp::Ge, &lit("4'b0000"), true).unwrap(), lit("1'bx"));
    }

    #[test]
    fn cat_examples() {
        assert_eq!(Logic::cat(&[lit("1'b1"), lit("1'b0")]).unwrap(), lit("2'b01"));
        assert_eq!(Logic::cat(&[lit("4'hA")]).unwrap(), lit("4'hA"));
        assert_eq!(Logic::cat(&[lit("2'bx0"), lit("2'b11")]).unwrap(), lit("4'b11x0"));
        assert_eq!(Logic::cat(&[]), Err(LogicError::EmptyCat));
        let wide = Logic::cat(&[Logic::ones(64), lit("2'b10"), Logic::zeros(64)]).unwrap();
        assert_eq!(wide.width(), 130);
        assert_eq!(wide.select(63, 4), lit("4'b0101"));
    }

    #[test]
    fn select_examples() {
        assert_eq!(lit("8'hA5").select(0, 4), lit("4'h5"));
        assert_eq!(lit("4'b1010").select(2, 4), lit("4'bxx10"));
        assert_eq!(lit("4'b1x10").select(1, 2), lit("2'bx1"));
        assert_eq!(lit("8'hA5").dyn_select(&lit("3'd4"), 4), lit("4'hA"));
        assert_eq!(lit("8'hA5").dyn_select(&lit("3'bx00"), 4), lit("4'bxxxx"));
        assert_eq!(lit("8'hA5").dyn_select(&lit("3'd6"), 4), lit("4'bxx10"));
    }

    #[test]
    fn insert_examples() {
        let a = lit("16'h0000");
        assert_eq!(a.insert(&lit("4'd4"), &lit("8'hFF")), lit("16'h0FF0"));
        assert_eq!(a.insert(&lit("4'bx100"), &lit("8'hFF")), Logic::unknown(16));
        assert_eq!(a.insert(&lit("4'd12"), &lit("8'hFF")), lit("16'hF000"));
    }

    #[test]
    fn resize_examples() {
        assert_eq!(lit("4'b1010").resize(6, false), lit("6'b001010"));
        assert_eq!(lit("4'b1010").resize(6, true), lit("6'b111010"));
        assert_eq!(lit("4'bx010").resize(6, true), lit("6'bxxx010"));
        assert_eq!(lit("4'b1010").resize(2, true), lit("2'b10"));
    }

    #[test]
    fn merge_examples() {
        assert_eq!(lit("4'b1010").merge(&lit("4'b1000")).unwrap(), lit("4'b10x0"));
    }
}
