use crate::logic::Logic;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnumId(pub u32);

/// Type information carried on graph edges. The same signal may be read
/// through different types (casts are free).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SignalType {
    UInt(usize),
    SInt(usize),
    /// Packed array, element 0 at the least-significant end.
    Vector(Box<SignalType>, usize),
    Struct(StructType),
    /// Width is resolved when the enum is frozen.
    Enum(EnumId),
    /// Unpacked array; storage is a set of word signals, see `Circuit::mem`.
    MemArray(Box<SignalType>, Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructField {
    pub name: String,
    pub ty: SignalType,
    pub offset: usize,
}

/// Named bit fields; the first field sits at offset 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructType {
    pub fields: Vec<StructField>,
}

impl StructType {
    /// Packs fields in declaration order.
    pub fn packed(fields: Vec<(String, SignalType)>) -> StructType {
        let mut offset = 0;
        let fields = fields
            .into_iter()
            .map(|(name, ty)| {
                let f = StructField {
                    name,
                    offset,
                    ty: ty.clone(),
                };
                offset += ty.fixed_width().expect("struct fields need a fixed width");
                f
            })
            .collect();
        StructType { fields }
    }

    pub fn field(&self, name: &str) -> Option<&StructField> {
        self.fields.iter().find(|f| f.name == name)
    }

    /// Field ranges must be disjoint and fit the struct width.
    pub fn is_well_formed(&self) -> bool {
        let mut ranges: Vec<(usize, usize)> = self
            .fields
            .iter()
            .filter_map(|f| f.ty.fixed_width().map(|w| (f.offset, f.offset + w)))
            .collect();
        if ranges.len() != self.fields.len() {
            return false;
        }
        ranges.sort();
        ranges.windows(2).all(|w| w[0].1 <= w[1].0)
    }
}

impl SignalType {
    /// Bit width, or `None` for enums (resolved at freeze).
    pub fn fixed_width(&self) -> Option<usize> {
        match self {
            SignalType::UInt(w) | SignalType::SInt(w) => Some(*w),
            SignalType::Vector(t, n) => t.fixed_width().map(|w| w * n),
            SignalType::Struct(s) => s
                .fields
                .iter()
                .map(|f| f.ty.fixed_width().map(|w| f.offset + w))
                .try_fold(0, |acc, end| end.map(|e| acc.max(e))),
            SignalType::Enum(_) => None,
            SignalType::MemArray(t, dims) => t.fixed_width().map(|w| w * dims.iter().product::<usize>()),
        }
    }

    pub fn is_signed(&self) -> bool {
        matches!(self, SignalType::SInt(_))
    }

    pub fn enum_id(&self) -> Option<EnumId> {
        match self {
            SignalType::Enum(e) => Some(*e),
            _ => None,
        }
    }

    /// Same kind of type with a different width (for `UInt`/`SInt`); other
    /// types are returned unchanged.
    pub fn with_width(&self, w: usize) -> SignalType {
        match self {
            SignalType::SInt(_) => SignalType::SInt(w),
            SignalType::UInt(_) => SignalType::UInt(w),
            other => other.clone(),
        }
    }
}

impl fmt::Display for SignalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalType::UInt(w) => write!(f, "UInt[{w}]"),
            SignalType::SInt(w) => write!(f, "SInt[{w}]"),
            SignalType::Vector(t, n) => write!(f, "Vector[{t}; {n}]"),
            SignalType::Struct(s) => {
                write!(f, "Struct{{")?;
                for (i, fld) in s.fields.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}: {}", fld.name, fld.ty)?;
                }
                write!(f, "}}")
            }
            SignalType::Enum(e) => write!(f, "Enum#{}", e.0),
            SignalType::MemArray(t, d) => write!(f, "MemArray[{t}; {d:?}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnumEncoding {
    Binary,
    OneHot,
    Gray,
}

/// Enum state table. States are interned in order of first use; the width
/// grows with the state count until the enum is frozen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumDef {
    pub name: String,
    pub encoding: EnumEncoding,
    states: Vec<String>,
    frozen: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumError {
    #[error("enum `{0}` is frozen; cannot intern state `{1}`")]
    Frozen(String, String),
    #[error("enum `{0}` has no states")]
    Empty(String),
}

impl EnumDef {
    pub fn new(name: impl Into<String>, encoding: EnumEncoding) -> EnumDef {
        EnumDef {
            name: name.into(),
            encoding,
            states: Vec::new(),
            frozen: false,
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn index_of(&self, state: &str) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    /// Returns the index and current code of `state`, appending it if new.
    pub fn intern(&mut self, state: &str) -> Result<(usize, Logic), EnumError> {
        if let Some(i) = self.index_of(state) {
            return Ok((i, self.code(i)));
        }
        if self.frozen {
            return Err(EnumError::Frozen(self.name.clone(), state.to_string()));
        }
        self.states.push(state.to_string());
        let i = self.states.len() - 1;
        Ok((i, self.code(i)))
    }

    pub fn freeze(&mut self) -> Result<usize, EnumError> {
        if self.states.is_empty() {
            return Err(EnumError::Empty(self.name.clone()));
        }
        self.frozen = true;
        Ok(self.width())
    }

    /// Width implied by the current state count.
    pub fn width(&self) -> usize {
        let n = self.states.len().max(1);
        match self.encoding {
            EnumEncoding::OneHot => n,
            EnumEncoding::Binary | EnumEncoding::Gray => {
                (usize::BITS - (n - 1).leading_zeros()).max(1) as usize
            }
        }
    }

    /// Code of state `index` at the current width.
    pub fn code(&self, index: usize) -> Logic {
        let w = self.width();
        match self.encoding {
            EnumEncoding::Binary => Logic::from_u64(w, index as u64),
            EnumEncoding::Gray => Logic::from_u64(w, (index ^ (index >> 1)) as u64),
            EnumEncoding::OneHot => {
                let mut l = Logic::zeros(w);
                l.set_bit(index, crate::logic::Bit::One);
                l
            }
        }
    }

    /// Codes are pairwise distinct and consistent with the encoding.
    pub fn is_consistent(&self) -> bool {
        let codes: Vec<Logic> = (0..self.states.len()).map(|i| self.code(i)).collect();
        for (i, a) in codes.iter().enumerate() {
            if codes[i + 1..].contains(a) {
                return false;
            }
            let ones = a.bits().filter(|b| *b == crate::logic::Bit::One).count();
            if self.encoding == EnumEncoding::OneHot && ones != 1 {
                return false;
            }
        }
        if self.encoding == EnumEncoding::Gray {
            return codes.windows(2).all(|w| {
                let d = w[0].xor(&w[1]).unwrap();
                d.to_u64().map(u64::count_ones) == Some(1)
            });
        }
        true
    }
}
