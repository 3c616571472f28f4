//! Arbitrary-width three-state values.
//!
//! A [`Logic`] stores two bit planes: the value plane `v` and the unknown
//! plane `x`. A bit is X when its `x` bit is set. Values are kept canonical:
//! wherever `x` is 1 the `v` bit is 0, and bits at or above `width` are zero
//! in both planes. Canonical form makes structural equality coincide with
//! value equality.

mod bitpat;
mod ops;
mod text;

pub use bitpat::BitPat;
pub use ops::{CmpOp, ReduceKind};

use smallvec::SmallVec;
use std::fmt;

pub(crate) type Words = SmallVec<[u64; 2]>;

/// Errors produced while constructing or combining values.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("malformed literal `{0}`")]
    Malformed(String),
    #[error("literal `{0}` does not fit in its declared width")]
    Overflow(String),
    #[error("X digit in decimal literal `{0}`")]
    DecimalX(String),
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("concatenation of zero parts")]
    EmptyCat,
    #[error("zero width")]
    ZeroWidth,
}

/// One three-state bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bit {
    Zero,
    One,
    X,
}

impl Bit {
    pub const ALL: [Bit; 3] = [Bit::Zero, Bit::One, Bit::X];

    pub fn to_char(self) -> char {
        match self {
            Bit::Zero => '0',
            Bit::One => '1',
            Bit::X => 'x',
        }
    }
}

#[inline]
pub(crate) fn word_count(width: usize) -> usize {
    width.div_ceil(64)
}

/// Mask of the valid bits in the top word of a `width`-bit plane.
#[inline]
pub(crate) fn top_mask(width: usize) -> u64 {
    match width % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Mask for a single-word value of `width` bits (`width` ≤ 64).
#[inline]
pub fn mask64(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Arbitrary-width three-state value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Logic {
    width: usize,
    v: Words,
    x: Words,
}

impl Logic {
    /// All-zero value. Panics on zero width.
    pub fn zeros(width: usize) -> Logic {
        assert!(width > 0, "Logic width must be at least 1");
        let n = word_count(width);
        Logic {
            width,
            v: SmallVec::from_elem(0, n),
            x: SmallVec::from_elem(0, n),
        }
    }

    /// All-X value.
    pub fn unknown(width: usize) -> Logic {
        let mut l = Logic::zeros(width);
        l.x.iter_mut().for_each(|w| *w = u64::MAX);
        l.canonicalize();
        l
    }

    pub fn ones(width: usize) -> Logic {
        let mut l = Logic::zeros(width);
        l.v.iter_mut().for_each(|w| *w = u64::MAX);
        l.canonicalize();
        l
    }

    /// Value from the low `width` bits of `value`; higher bits are dropped.
    pub fn from_u64(width: usize, value: u64) -> Logic {
        let mut l = Logic::zeros(width);
        l.v[0] = value;
        l.canonicalize();
        l
    }

    pub fn from_u128(width: usize, value: u128) -> Logic {
        let mut l = Logic::zeros(width);
        l.v[0] = value as u64;
        if l.v.len() > 1 {
            l.v[1] = (value >> 64) as u64;
        }
        l.canonicalize();
        l
    }

    /// Like [`Logic::from_u64`] but rejects values that do not fit.
    pub fn try_from_u64(width: usize, value: u64) -> Result<Logic, LogicError> {
        if width == 0 {
            return Err(LogicError::ZeroWidth);
        }
        if width < 64 && value >> width != 0 {
            return Err(LogicError::Overflow(format!("{width}'d{value}")));
        }
        Ok(Logic::from_u64(width, value))
    }

    pub fn from_bool(b: bool) -> Logic {
        Logic::from_u64(1, b as u64)
    }

    pub fn from_bit(b: Bit) -> Logic {
        let mut l = Logic::zeros(1);
        l.set_bit(0, b);
        l
    }

    /// Builds a value from raw planes; the result is canonicalized.
    pub fn from_planes(width: usize, v: &[u64], x: &[u64]) -> Logic {
        let mut l = Logic::zeros(width);
        for (dst, src) in l.v.iter_mut().zip(v) {
            *dst = *src;
        }
        for (dst, src) in l.x.iter_mut().zip(x) {
            *dst = *src;
        }
        l.canonicalize();
        l
    }

    /// Bits listed most-significant first.
    pub fn from_bits_msb(bits: &[Bit]) -> Logic {
        let width = bits.len();
        let mut l = Logic::zeros(width);
        for (i, b) in bits.iter().rev().enumerate() {
            l.set_bit(i, *b);
        }
        l
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn value_plane(&self) -> &[u64] {
        &self.v
    }

    #[inline]
    pub fn unknown_plane(&self) -> &[u64] {
        &self.x
    }

    /// True when no bit is X.
    #[inline]
    pub fn is_binary(&self) -> bool {
        self.x.iter().all(|w| *w == 0)
    }

    #[inline]
    pub fn has_x(&self) -> bool {
        !self.is_binary()
    }

    /// True when every bit is X.
    pub fn is_all_x(&self) -> bool {
        *self == Logic::unknown(self.width)
    }

    pub fn bit(&self, i: usize) -> Bit {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        let (w, b) = (i / 64, i % 64);
        if self.x[w] >> b & 1 == 1 {
            Bit::X
        } else if self.v[w] >> b & 1 == 1 {
            Bit::One
        } else {
            Bit::Zero
        }
    }

    pub fn set_bit(&mut self, i: usize, bit: Bit) {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        let (w, b) = (i / 64, i % 64);
        let m = 1u64 << b;
        self.v[w] &= !m;
        self.x[w] &= !m;
        match bit {
            Bit::Zero => {}
            Bit::One => self.v[w] |= m,
            Bit::X => self.x[w] |= m,
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = Bit> + '_ {
        (0..self.width).map(|i| self.bit(i))
    }

    /// Low 64 bits of a binary value; `None` if any bit is X or the value
    /// needs more than 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        if self.has_x() || self.v.iter().skip(1).any(|w| *w != 0) {
            return None;
        }
        Some(self.v[0])
    }

    pub fn to_u128(&self) -> Option<u128> {
        if self.has_x() || self.v.iter().skip(2).any(|w| *w != 0) {
            return None;
        }
        let lo = self.v[0] as u128;
        let hi = self.v.get(1).copied().unwrap_or(0) as u128;
        Some(lo | hi << 64)
    }

    /// Two's-complement interpretation of a binary value of width ≤ 128.
    pub fn to_i128(&self) -> Option<i128> {
        if self.width > 128 {
            return None;
        }
        let u = self.to_u128()?;
        if self.width == 128 {
            return Some(u as i128);
        }
        let sign = 1u128 << (self.width - 1);
        Some(if u & sign != 0 {
            (u as i128) - (1i128 << self.width)
        } else {
            u as i128
        })
    }

    /// Truthiness as a condition: 1 if any bit is a known 1, 0 if all bits
    /// are known 0, X otherwise.
    pub fn truth(&self) -> Bit {
        self.reduce(ReduceKind::Or).bit(0)
    }

    pub(crate) fn canonicalize(&mut self) {
        let n = self.v.len();
        for i in 0..n {
            self.v[i] &= !self.x[i];
        }
        let m = top_mask(self.width);
        self.v[n - 1] &= m;
        self.x[n - 1] &= m;
    }

    /// Checks the canonical-form invariant; used by tests and audits.
    pub fn is_canonical(&self) -> bool {
        let n = word_count(self.width);
        if self.v.len() != n || self.x.len() != n {
            return false;
        }
        let m = top_mask(self.width);
        self.v.iter().zip(&self.x).all(|(v, x)| v & x == 0)
            && self.v[n - 1] & !m == 0
            && self.x[n - 1] & !m == 0
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}'b", self.width)?;
        for i in (0..self.width).rev() {
            write!(f, "{}", self.bit(i).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Logic({self})")
    }
}

/// Shorthand for parsing a literal in tests and examples. Panics on malformed
/// text.
pub fn lit(text: &str) -> Logic {
    text.parse()
        .unwrap_or_else(|e| panic!("bad literal {text:?}: {e}"))
}
