//! Exact sign evaluation at dyadic points and certified bisection.
//!
//! This is the independent reference for the orbit generator: the binary
//! expansion of the root is read off by halving `[0, 1)` and asking which
//! half the sign change of `f` lies in. No floating point is involved.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bits::BitStream;
use crate::error::{Error, Result};
use crate::triple::CoeffTriple;

/// `numerator / 2^exponent`, kept in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigInt,
    exponent: u64,
}

impl DyadicRational {
    pub fn new(numerator: impl Into<BigInt>, exponent: u64) -> Self {
        let mut numerator = numerator.into();
        let mut exponent = exponent;
        if numerator.is_zero() {
            exponent = 0;
        } else {
            let tz = numerator.trailing_zeros().unwrap_or(0).min(exponent);
            numerator >>= tz;
            exponent -= tz;
        }
        DyadicRational {
            numerator,
            exponent,
        }
    }

    pub fn zero() -> Self {
        DyadicRational::new(0, 0)
    }

    pub fn one() -> Self {
        DyadicRational::new(1, 0)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Numerator over `2^exponent` for an exponent at least as large as ours.
    pub fn scaled_numerator(&self, exponent: u64) -> BigInt {
        assert!(exponent >= self.exponent);
        &self.numerator << (exponent - self.exponent)
    }

    pub fn sub(&self, other: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(other.exponent);
        DyadicRational::new(self.scaled_numerator(e) - other.scaled_numerator(e), e)
    }

    pub fn add(&self, other: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(other.exponent);
        DyadicRational::new(self.scaled_numerator(e) + other.scaled_numerator(e), e)
    }

    pub fn mul_int(&self, k: &BigInt) -> DyadicRational {
        DyadicRational::new(&self.numerator * k, self.exponent)
    }

    pub fn to_f64(&self) -> f64 {
        // keep 64 significant bits so huge exponents do not overflow
        let bits = self.numerator.bits();
        let drop = bits.saturating_sub(64);
        let mantissa = (&self.numerator >> drop).to_f64().unwrap_or(f64::NAN);
        let e = drop as i64 - self.exponent as i64;
        mantissa * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// Decimal expansion truncated toward zero to `digits` places.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits);
        let scaled = (&self.numerator.abs() * scale) >> self.exponent;
        let (int, frac) = scaled.div_rem(&num_traits::pow(BigInt::from(10), digits));
        let sign = if self.numerator.is_negative() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{:0>digits$}", frac.to_string())
        }
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        self.scaled_numerator(e).cmp(&other.scaled_numerator(e))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.exponent)
        }
    }
}

/// `f(x)` evaluated exactly at `x = p/2^e`, scaled by `8^e`:
/// `p³ + b·p²·2^e + c·p·4^e + d·8^e`, in Horner order.
pub fn poly_value_scaled(t: &CoeffTriple, x: &DyadicRational) -> BigInt {
    let p = x.numerator();
    let e = x.exponent() as usize;
    let mut acc: BigInt = p + (t.b() << e);
    acc *= p;
    acc += t.c() << (2 * e);
    acc *= p;
    acc += t.d() << (3 * e);
    acc
}

/// Exact sign of `f(x)`.
pub fn poly_sign_at_dyadic(t: &CoeffTriple, x: &DyadicRational) -> Ordering {
    poly_value_scaled(t, x).cmp(&BigInt::zero())
}

/// `[lo, hi)` with `f(lo) < 0 < f(hi)`, so the root lies strictly inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: DyadicRational,
    pub hi: DyadicRational,
    pub triple: CoeffTriple,
}

impl RootInterval {
    pub fn unit(triple: CoeffTriple) -> Self {
        RootInterval {
            lo: DyadicRational::zero(),
            hi: DyadicRational::one(),
            triple,
        }
    }

    pub fn width(&self) -> DyadicRational {
        self.hi.sub(&self.lo)
    }

    /// Halve the interval, returning 1 if the root is in the upper half.
    pub fn bisect(&mut self) -> Result<u8> {
        let mid = self.lo.add(&self.hi);
        let mid = DyadicRational::new(mid.numerator().clone(), mid.exponent() + 1);
        match poly_sign_at_dyadic(&self.triple, &mid) {
            Ordering::Less => {
                self.lo = mid;
                Ok(1)
            }
            Ordering::Greater => {
                self.hi = mid;
                Ok(0)
            }
            Ordering::Equal => Err(Error::CorruptState(mid.to_string())),
        }
    }

    /// Both endpoint signs, recomputed from scratch.
    pub fn is_certified(&self) -> bool {
        poly_sign_at_dyadic(&self.triple, &self.lo) == Ordering::Less
            && poly_sign_at_dyadic(&self.triple, &self.hi) == Ordering::Greater
    }

    pub fn midpoint(&self) -> DyadicRational {
        let s = self.lo.add(&self.hi);
        DyadicRational::new(s.numerator().clone(), s.exponent() + 1)
    }
}

impl fmt::Display for RootInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // enough decimal places to show the interval width
        let digits = ((self.width().exponent() as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1;
        write!(
            f,
            "{} ± 2^-{}",
            self.midpoint().to_decimal(digits.max(1)),
            self.width().exponent() + 1
        )
    }
}

/// The first `k` binary digits of the root, read off by bisection.
pub fn isolate_root_bits(t: &CoeffTriple, k: usize) -> Result<(BitStream, RootInterval)> {
    let mut interval = RootInterval::unit(t.clone());
    let mut bits = BitStream::with_capacity(k);
    for _ in 0..k {
        bits.push(interval.bisect()? == 1);
    }
    Ok((bits, interval))
}

/// Interval of width `2^-eps_exponent` around the root.
pub fn refine_to_resolution(t: &CoeffTriple, eps_exponent: u32) -> Result<RootInterval> {
    if eps_exponent < 1 {
        return Err(Error::InvalidParameter("eps_exponent must be at least 1".into()));
    }
    isolate_root_bits(t, eps_exponent as usize).map(|(_, i)| i)
}

/// `true` when `p/2^e` lies in the closed unit interval.
pub fn in_unit_interval(x: &DyadicRational) -> bool {
    !x.numerator().is_negative() && x.numerator() <= &(BigInt::one() << x.exponent())
}
