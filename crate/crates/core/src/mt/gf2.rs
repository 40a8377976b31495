//! 32-bit vectors and 32×32 matrices over the two-element field.
//!
//! Component 1 is the most significant bit of the underlying `u32`, matching
//! `y_n = (y_{n,1}, …, y_{n,32})` with `y_{n,1}` the top bit.

use std::fmt;
use std::ops::{BitXor, Mul};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Gf2Vector32(pub u32);

impl Gf2Vector32 {
    /// Component `i` for `i` in `1..=32`.
    pub fn component(self, i: usize) -> u8 {
        assert!((1..=32).contains(&i));
        ((self.0 >> (32 - i)) & 1) as u8
    }

    pub fn dot(self, other: Gf2Vector32) -> u8 {
        ((self.0 & other.0).count_ones() & 1) as u8
    }

    /// `Y = Σ_{i=1}^{8} y_i 2^{8−i}`, the top byte.
    pub fn top8(self) -> u8 {
        (self.0 >> 24) as u8
    }
}

impl BitXor for Gf2Vector32 {
    type Output = Gf2Vector32;

    fn bitxor(self, rhs: Self) -> Self {
        Gf2Vector32(self.0 ^ rhs.0)
    }
}

impl From<u32> for Gf2Vector32 {
    fn from(x: u32) -> Self {
        Gf2Vector32(x)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gf2Matrix32 {
    rows: [Gf2Vector32; 32],
}

impl Gf2Matrix32 {
    pub fn zero() -> Self {
        Gf2Matrix32 {
            rows: [Gf2Vector32(0); 32],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..32 {
            m.rows[i] = Gf2Vector32(0x8000_0000 >> i);
        }
        m
    }

    pub fn from_rows(rows: [u32; 32]) -> Self {
        Gf2Matrix32 {
            rows: rows.map(Gf2Vector32),
        }
    }

    /// Row `i` for `i` in `1..=32`.
    pub fn row(&self, i: usize) -> Gf2Vector32 {
        self.rows[i - 1]
    }

    pub fn rows(&self) -> &[Gf2Vector32; 32] {
        &self.rows
    }

    pub fn set_row(&mut self, i: usize, row: Gf2Vector32) {
        self.rows[i - 1] = row;
    }

    pub fn apply(&self, v: Gf2Vector32) -> Gf2Vector32 {
        let mut out = 0u32;
        for (i, row) in self.rows.iter().enumerate() {
            out |= u32::from(row.dot(v)) << (31 - i);
        }
        Gf2Vector32(out)
    }

    /// Rows as 32-character `'0'`/`'1'` strings.
    pub fn to_row_strings(&self) -> Vec<String> {
        self.rows.iter().map(|r| format!("{:032b}", r.0)).collect()
    }

    pub fn from_row_strings<S: AsRef<str>>(lines: &[S]) -> Result<Self> {
        if lines.len() != 32 {
            return Err(Error::DataCorrupt(format!("expected 32 rows, found {}", lines.len())));
        }
        let mut rows = [0u32; 32];
        for (k, line) in lines.iter().enumerate() {
            let line = line.as_ref();
            if line.len() != 32 || !line.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::DataCorrupt(format!("row {} is not 32 binary digits", k + 1)));
            }
            rows[k] = u32::from_str_radix(line, 2).unwrap();
        }
        Ok(Self::from_rows(rows))
    }

    /// Number of positions where two matrices differ.
    pub fn hamming(&self, other: &Gf2Matrix32) -> u32 {
        self.rows
            .iter()
            .zip(other.rows.iter())
            .map(|(a, b)| (a.0 ^ b.0).count_ones())
            .sum()
    }
}

impl Mul<Gf2Vector32> for &Gf2Matrix32 {
    type Output = Gf2Vector32;

    fn mul(self, v: Gf2Vector32) -> Gf2Vector32 {
        self.apply(v)
    }
}

impl fmt::Debug for Gf2Matrix32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix32 [")?;
        for r in self.to_row_strings() {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Incremental Gaussian elimination for a system `x · coeffs = rhs` with 64
/// unknowns per right-hand column and 32 right-hand columns solved together.
///
/// Each equation row is a 64-bit coefficient word with an attached 32-bit
/// right-hand side. Pivot rows are kept fully reduced so that once rank 64
/// is reached the solution can be read off directly.
pub(crate) struct Gf2System64 {
    // pivot[bit] = (coefficients, rhs) with leading bit `bit`
    pivots: [Option<(u64, u32)>; 64],
    rank: usize,
    inconsistent: bool,
}

impl Gf2System64 {
    pub fn new() -> Self {
        Gf2System64 {
            pivots: [None; 64],
            rank: 0,
            inconsistent: false,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Add one equation. Returns true if it increased the rank.
    pub fn add(&mut self, mut coeffs: u64, mut rhs: u32) -> bool {
        // clear every pivot column; pivot rows are zero on each other's columns
        let mut lead = None;
        for bit in (0..64).rev() {
            if coeffs >> bit & 1 == 0 {
                continue;
            }
            match self.pivots[bit] {
                Some((pc, pr)) => {
                    coeffs ^= pc;
                    rhs ^= pr;
                }
                None => {
                    lead.get_or_insert(bit);
                }
            }
        }
        let Some(bit) = lead else {
            if rhs != 0 {
                self.inconsistent = true;
            }
            return false;
        };
        let mask = 1u64 << bit;
        for slot in self.pivots.iter_mut().flatten() {
            if slot.0 & mask != 0 {
                slot.0 ^= coeffs;
                slot.1 ^= rhs;
            }
        }
        self.pivots[bit] = Some((coeffs, rhs));
        self.rank += 1;
        true
    }

    /// Whether some equation contradicted the others.
    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    /// `rhs` of the unit equation for each unknown, once full rank.
    pub fn solution(&self) -> Option<[u32; 64]> {
        if self.rank < 64 {
            return None;
        }
        let mut out = [0u32; 64];
        for (bit, slot) in self.pivots.iter().enumerate() {
            let (c, r) = slot.unwrap();
            debug_assert_eq!(c, 1u64 << bit);
            out[bit] = r;
        }
        Some(out)
    }
}
