//! Bit-level encoding of field values and intervals.
//!
//! Field `f` of width `w` is represented by bit variables `(f, 0) ..
//! (f, w - 1)`, bit 0 being the most significant. An interval is covered by
//! the canonical segment-tree decomposition into aligned binary prefixes,
//! each prefix becoming one conjunction of literals.

use std::fmt;

use crate::error::EncodingError;
use crate::policy::{FieldConfig, Interval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitVariable {
    pub field: usize,
    /// Position within the field, 0 is the most significant bit.
    pub bit: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: BitVariable,
    pub positive: bool,
}

impl Literal {
    pub fn new(field: usize, bit: u32, positive: bool) -> Self {
        Literal {
            var: BitVariable { field, bit },
            positive,
        }
    }

    pub fn negated(self) -> Self {
        Literal {
            positive: !self.positive,
            ..self
        }
    }

    /// Truth value of this literal for a field value of width `width`.
    pub fn holds_for(&self, value: u64, width: u32) -> bool {
        let bit = (value >> (width - 1 - self.var.bit)) & 1 == 1;
        bit == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        write!(f, "x{}.{}", self.var.field, self.var.bit)
    }
}

/// A node of the implicit segment tree over one field: the values whose
/// leading bits equal `bits`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Prefix {
    pub field: usize,
    pub bits: Vec<bool>,
}

impl Prefix {
    /// The block of values this prefix denotes in a field of `width` bits.
    pub fn range(&self, width: u32) -> Interval {
        let free = width - self.bits.len() as u32;
        let head = self
            .bits
            .iter()
            .fold(0u128, |acc, &b| (acc << 1) | u128::from(b));
        let lo = head << free;
        let hi = lo + (1u128 << free) - 1;
        Interval::new(lo as u64, hi as u64).unwrap()
    }

    /// One literal per fixed bit.
    pub fn term(&self) -> Vec<Literal> {
        self.bits
            .iter()
            .enumerate()
            .map(|(k, &b)| Literal::new(self.field, k as u32, b))
            .collect()
    }

    pub fn bit_string(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// Disjoint prefixes whose blocks together form one interval, in ascending
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCover {
    pub field: usize,
    pub width: u32,
    pub prefixes: Vec<Prefix>,
}

impl PrefixCover {
    pub fn len(&self) -> usize {
        self.prefixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    pub fn contains(&self, value: u64) -> bool {
        self.prefixes
            .iter()
            .any(|p| p.range(self.width).contains(value))
    }
}

fn width_of(config: &FieldConfig, field: usize) -> Result<u32, EncodingError> {
    config
        .widths()
        .get(field)
        .copied()
        .ok_or(EncodingError::NoSuchField(field))
}

/// Conjunction of `w` literals satisfied only by `value`'s bit pattern.
pub fn encode_value(
    value: u64,
    field: usize,
    config: &FieldConfig,
) -> Result<Vec<Literal>, EncodingError> {
    let width = width_of(config, field)?;
    if value > config.domain_max(field) {
        return Err(EncodingError::ValueOutOfRange {
            field,
            value,
            width,
        });
    }
    Ok((0..width)
        .map(|k| Literal::new(field, k, (value >> (width - 1 - k)) & 1 == 1))
        .collect())
}

/// Canonical segment-tree decomposition of `interval`: the maximal aligned
/// blocks inside it. At most two blocks are taken per tree level, so the
/// cover never exceeds `2w` prefixes.
pub fn canonical_cover(
    interval: Interval,
    field: usize,
    config: &FieldConfig,
) -> Result<PrefixCover, EncodingError> {
    let width = width_of(config, field)?;
    if interval.hi() > config.domain_max(field) {
        return Err(EncodingError::ValueOutOfRange {
            field,
            value: interval.hi(),
            width,
        });
    }
    let mut prefixes = Vec::new();
    let mut bits = Vec::with_capacity(width as usize);
    decompose(
        0,
        width,
        u128::from(interval.lo()),
        u128::from(interval.hi()),
        &mut bits,
        &mut |bits| {
            prefixes.push(Prefix {
                field,
                bits: bits.to_vec(),
            })
        },
    );
    Ok(PrefixCover {
        field,
        width,
        prefixes,
    })
}

/// Visits the node whose block starts at `base` and spans `2^free` values.
fn decompose(
    base: u128,
    free: u32,
    lo: u128,
    hi: u128,
    bits: &mut Vec<bool>,
    emit: &mut dyn FnMut(&[bool]),
) {
    let top = base + (1u128 << free) - 1;
    if hi < base || top < lo {
        return;
    }
    if lo <= base && top <= hi {
        emit(bits);
        return;
    }
    let half = 1u128 << (free - 1);
    bits.push(false);
    decompose(base, free - 1, lo, hi, bits, emit);
    bits.pop();
    bits.push(true);
    decompose(base + half, free - 1, lo, hi, bits, emit);
    bits.pop();
}

/// Disjunction of one conjunction per canonical prefix. The full domain
/// yields a single empty conjunction.
pub fn interval_to_terms(
    interval: Interval,
    field: usize,
    config: &FieldConfig,
) -> Result<Vec<Vec<Literal>>, EncodingError> {
    Ok(canonical_cover(interval, field, config)?
        .prefixes
        .iter()
        .map(Prefix::term)
        .collect())
}
