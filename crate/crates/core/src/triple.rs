//! Coefficient triples `(b, c, d)` standing for the unique real root of
//! `x³ + bx² + cx + d` in the open unit interval.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Condition, Error, Result};

/// Which half of the unit interval the root lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Root in `(0, 1/2)`, emits bit 0.
    Left,
    /// Root in `(1/2, 1)`, emits bit 1.
    Right,
}

impl Branch {
    pub fn bit(self) -> u8 {
        match self {
            Branch::Left => 0,
            Branch::Right => 1,
        }
    }
}

/// Sign class of `b² − 3c`. Both classes are invariant under the map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiscriminantClass {
    Negative,
    Zero,
}

/// An admissible coefficient triple.
///
/// Construction always goes through [`CoeffTriple::new`], which checks
///
/// 1. `b² − 3c ≤ 0`
/// 2. `d < 0`
/// 3. `1 + b + c + d > 0`
///
/// and additionally rejects `1 + 2b + 4c + 8d = 0`. Such a triple describes a
/// strictly increasing cubic with exactly one real root `α ∈ (0, 1)`, and the
/// map from triples to roots is a bijection, so the triple *is* the number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoeffTriple {
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl CoeffTriple {
    pub fn new(b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let t = CoeffTriple {
            b: b.into(),
            c: c.into(),
            d: d.into(),
        };
        t.check()?;
        Ok(t)
    }

    /// Skips validation. Callers guarantee admissibility (images of valid
    /// triples under the map are valid).
    pub(crate) fn from_parts_unchecked(b: BigInt, c: BigInt, d: BigInt) -> Self {
        CoeffTriple { b, c, d }
    }

    fn check(&self) -> Result<()> {
        let (b, c, d) = (&self.b, &self.c, &self.d);
        if b * b - c * 3u32 > BigInt::zero() {
            return Err(Error::ConditionViolation(Condition::I));
        }
        if !d.is_negative() {
            return Err(Error::ConditionViolation(Condition::Ii));
        }
        if (b + c + d + 1u32).is_positive() {
            if half_value(b, c, d).is_zero() {
                return Err(Error::HalfRoot);
            }
            Ok(())
        } else {
            Err(Error::ConditionViolation(Condition::Iii))
        }
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn into_parts(self) -> (BigInt, BigInt, BigInt) {
        (self.b, self.c, self.d)
    }

    /// `1 + 2b + 4c + 8d`, i.e. `8·f(1/2)`.
    pub fn half_value(&self) -> BigInt {
        half_value(&self.b, &self.c, &self.d)
    }

    /// Largest coefficient bit length.
    pub fn max_bits(&self) -> u64 {
        self.b.bits().max(self.c.bits()).max(self.d.bits())
    }

    pub fn discriminant_class(&self) -> DiscriminantClass {
        if (&self.b * &self.b - &self.c * 3u32).is_zero() {
            DiscriminantClass::Zero
        } else {
            DiscriminantClass::Negative
        }
    }

    /// Polynomial discriminant `18bcd − 4b³d + b²c² − 4c³ − 27d²`.
    pub fn poly_discriminant(&self) -> BigInt {
        let (b, c, d) = (&self.b, &self.c, &self.d);
        let b2 = b * b;
        let c2 = c * c;
        BigInt::from(18) * b * c * d - BigInt::from(4) * &b2 * b * d + &b2 * &c2
            - BigInt::from(4) * &c2 * c
            - BigInt::from(27) * d * d
    }

    pub fn branch(&self) -> Branch {
        branch_sign(self)
    }

    /// One application of the map; see [`step`].
    pub fn step(&self) -> (CoeffTriple, u8) {
        step(self)
    }

    /// Advance in place, reusing `scratch` for the branch test. Returns the
    /// emitted bit. This is the hot loop of the generator: two or three
    /// small shifts and additions per coefficient, no multiplication.
    pub(crate) fn step_in_place(&mut self, scratch: &mut BigInt) -> u8 {
        // scratch = ((2d + c)·2 + b)·2 + 1 = 1 + 2b + 4c + 8d
        scratch.clone_from(&self.d);
        *scratch <<= 1usize;
        *scratch += &self.c;
        *scratch <<= 1usize;
        *scratch += &self.b;
        *scratch <<= 1usize;
        *scratch += 1u32;
        debug_assert!(!scratch.is_zero(), "1 + 2b + 4c + 8d vanished on a valid triple");
        if scratch.is_negative() {
            // d' = 1 + 2b + 4c + 8d, c' = 4(b + c) + 3, b' = 2b + 3
            std::mem::swap(&mut self.d, scratch);
            self.c += &self.b;
            self.c <<= 2usize;
            self.c += 3u32;
            self.b <<= 1usize;
            self.b += 3u32;
            1
        } else {
            self.d <<= 3usize;
            self.c <<= 2usize;
            self.b <<= 1usize;
            0
        }
    }
}

fn half_value(b: &BigInt, c: &BigInt, d: &BigInt) -> BigInt {
    let mut s: BigInt = d << 1usize;
    s += c;
    s <<= 1usize;
    s += b;
    s <<= 1usize;
    s + 1u32
}

/// Left iff `1 + 2b + 4c + 8d > 0`.
pub fn branch_sign(t: &CoeffTriple) -> Branch {
    let s = t.half_value();
    debug_assert!(!s.is_zero());
    if s.is_positive() {
        Branch::Left
    } else {
        Branch::Right
    }
}

/// The Bernoulli map `α ↦ 2α mod 1` acting on the triple, together with the
/// bit emitted from the current state.
///
/// Left: `(2b, 4c, 8d)`. Right: `(2b + 3, 4b + 4c + 3, 2b + 4c + 8d + 1)`.
pub fn step(t: &CoeffTriple) -> (CoeffTriple, u8) {
    let mut next = t.clone();
    let mut scratch = BigInt::zero();
    let bit = next.step_in_place(&mut scratch);
    (next, bit)
}

/// Unique preimage under the map, or `None` when `t` is a source point.
///
/// Images of the left branch are all even and images of the right branch
/// all odd; mixed parity therefore has no preimage.
pub fn inverse_step(t: &CoeffTriple) -> Option<CoeffTriple> {
    let (b, c, d) = (&t.b, &t.c, &t.d);
    let odd = b.is_odd();
    if c.is_odd() != odd || d.is_odd() != odd {
        return None;
    }
    let (b0, c0, d0) = if odd {
        let b0 = exact_div(&(b - 3u32), 2)?;
        let c0 = exact_div(&(c - 3u32 - &b0 * 4u32), 4)?;
        let d0 = exact_div(&(d - 1u32 - &b0 * 2u32 - &c0 * 4u32), 8)?;
        (b0, c0, d0)
    } else {
        (exact_div(b, 2)?, exact_div(c, 4)?, exact_div(d, 8)?)
    };
    CoeffTriple::new(b0, c0, d0).ok()
}

fn exact_div(x: &BigInt, by: u32) -> Option<BigInt> {
    let (q, r) = x.div_mod_floor(&BigInt::from(by));
    r.is_zero().then_some(q)
}

impl fmt::Display for CoeffTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.b, self.c, self.d)
    }
}

impl TryFrom<(i64, i64, i64)> for CoeffTriple {
    type Error = Error;

    fn try_from((b, c, d): (i64, i64, i64)) -> Result<Self> {
        CoeffTriple::new(b, c, d)
    }
}

/// Accepts `b,c,d` or `(b, c, d)`.
impl FromStr for CoeffTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected three integers, got {s:?}")));
        }
        let parse = |p: &str| {
            p.parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("{p:?}: {e}")))
        };
        CoeffTriple::new(parse(parts[0])?, parse(parts[1])?, parse(parts[2])?)
    }
}

/// `max(|b|, |c|, |d|)`.
#[cfg(test)]
pub(crate) fn max_abs(t: &CoeffTriple) -> BigInt {
    let mut m = t.b.abs();
    for x in [&t.c, &t.d] {
        let a = x.abs();
        if a > m {
            m = a;
        }
    }
    m
}
