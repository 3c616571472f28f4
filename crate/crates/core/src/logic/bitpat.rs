use super::{Bit, Logic, LogicError};
use std::fmt;
use std::str::FromStr;

/// A match pattern of 0, 1 and don't-care positions, used only in
/// comparisons.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitPat {
    /// 1 where the position must match.
    care: Logic,
    /// Required bits; zero at don't-care positions.
    value: Logic,
}

impl BitPat {
    pub fn new(care: Logic, value: Logic) -> Result<BitPat, LogicError> {
        if care.width() != value.width() {
            return Err(LogicError::WidthMismatch(care.width(), value.width()));
        }
        if care.has_x() || value.has_x() {
            return Err(LogicError::Malformed("BitPat planes must be binary".into()));
        }
        let value = value.and(&care)?;
        Ok(BitPat { care, value })
    }

    pub fn width(&self) -> usize {
        self.care.width()
    }

    pub fn care(&self) -> &Logic {
        &self.care
    }

    pub fn value(&self) -> &Logic {
        &self.value
    }

    /// 1 if every care position matches with a known bit, 0 if any care
    /// position is a definite mismatch, X otherwise.
    pub fn matches(&self, a: &Logic) -> Result<Logic, LogicError> {
        if a.width() != self.width() {
            return Err(LogicError::WidthMismatch(self.width(), a.width()));
        }
        let (av, ax) = (a.value_plane(), a.unknown_plane());
        let (cv, pv) = (self.care.value_plane(), self.value.value_plane());
        let mut mismatch = false;
        let mut unknown = false;
        for i in 0..av.len() {
            mismatch |= cv[i] & !ax[i] & (av[i] ^ pv[i]) != 0;
            unknown |= cv[i] & ax[i] != 0;
        }
        let bit = if mismatch {
            Bit::Zero
        } else if unknown {
            Bit::X
        } else {
            Bit::One
        };
        Ok(Logic::from_bit(bit))
    }
}

impl FromStr for BitPat {
    type Err = LogicError;

    /// `<width>'b<digits>` where `?` marks a don't-care position.
    fn from_str(text: &str) -> Result<BitPat, LogicError> {
        let malformed = || LogicError::Malformed(text.to_string());
        let (w, rest) = text.trim().split_once('\'').ok_or_else(malformed)?;
        let width: usize = w.trim().parse().map_err(|_| malformed())?;
        if width == 0 {
            return Err(LogicError::ZeroWidth);
        }
        let digits: Vec<char> = rest
            .strip_prefix(['b', 'B'])
            .ok_or_else(malformed)?
            .chars()
            .filter(|c| *c != '_')
            .collect();
        if digits.len() != width {
            return Err(malformed());
        }
        let mut care = Logic::zeros(width);
        let mut value = Logic::zeros(width);
        for (i, c) in digits.iter().rev().enumerate() {
            match c {
                '0' => care.set_bit(i, Bit::One),
                '1' => {
                    care.set_bit(i, Bit::One);
                    value.set_bit(i, Bit::One);
                }
                '?' => {}
                _ => return Err(malformed()),
            }
        }
        BitPat::new(care, value)
    }
}

impl fmt::Display for BitPat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}'b", self.width())?;
        for i in (0..self.width()).rev() {
            let c = match (self.care.bit(i), self.value.bit(i)) {
                (Bit::One, Bit::One) => '1',
                (Bit::One, _) => '0',
                _ => '?',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitPat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPat({self})")
    }
}
