//! Bit generation along a true orbit.
//!
//! The state after `n` steps is the triple of `2ⁿα mod 1`. Its coefficients
//! grow linearly with `n` (about `n`, `2n` and `2n` bits for `b`, `c`, `d`),
//! so each single step costs `O(n)` and a run of `N` bits costs `O(N²)`.
//!
//! Long runs go through a block advance: after enough steps the state
//! polynomial is almost linear and `−d/c` predicts the next `j` bits `m` of
//! the root. The prediction is then certified exactly by checking that the
//! composed transform `8ʲ·f((x + m)/2ʲ)` is again admissible, which holds iff
//! the root of `f` lies in `(m/2ʲ, (m+1)/2ʲ)`. A certified block yields the
//! same bits and the same triple as `j` single steps; if the certification
//! fails the generator falls back to single steps.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::bits::BitStream;
use crate::error::{Error, Result};
use crate::triple::CoeffTriple;

/// Default bits per certified block. Larger blocks trade more multiplication
/// work for fewer full passes over the coefficients.
pub const DEFAULT_BLOCK_BITS: usize = 4096;

const MIN_BLOCK_BITS: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerateOptions {
    /// Abort once any coefficient exceeds this many bits.
    pub max_coeff_bits: Option<u64>,
    /// Upper bound on the block advance width; `0` forces single steps.
    pub block_bits: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            max_coeff_bits: None,
            block_bits: DEFAULT_BLOCK_BITS,
        }
    }
}

impl GenerateOptions {
    pub fn single_step() -> Self {
        GenerateOptions {
            block_bits: 0,
            ..Self::default()
        }
    }
}

/// A point on the orbit together with its index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitState {
    triple: CoeffTriple,
    step_index: u64,
}

const RECORD_HEADER: &str = "bernoulli-cubic orbit-state v1";

impl OrbitState {
    pub fn new(seed: CoeffTriple) -> Self {
        OrbitState {
            triple: seed,
            step_index: 0,
        }
    }

    pub fn triple(&self) -> &CoeffTriple {
        &self.triple
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn into_triple(self) -> CoeffTriple {
        self.triple
    }

    /// Emit `n` more bits into `out`.
    pub fn advance(&mut self, n: usize, opts: &GenerateOptions, out: &mut BitStream) -> Result<()> {
        let mut scratch = BigInt::zero();
        let mut done = 0;
        while done < n {
            let remaining = n - done;
            if let Some(j) = self.block_width(opts.block_bits, remaining) {
                if let Some(m) = try_block(&mut self.triple, j) {
                    for i in (0..j as u64).rev() {
                        out.push(m.bit(i));
                    }
                    done += j;
                    self.step_index += j as u64;
                    self.check_limit(opts)?;
                    continue;
                }
            }
            // Without a block, run single steps until the next block could fit.
            let burst = remaining.min(MIN_BLOCK_BITS);
            for _ in 0..burst {
                let bit = self.triple.step_in_place(&mut scratch);
                out.push(bit == 1);
                self.step_index += 1;
                self.check_limit(opts)?;
            }
            done += burst;
        }
        Ok(())
    }

    fn block_width(&self, cap: usize, remaining: usize) -> Option<usize> {
        if cap < MIN_BLOCK_BITS {
            return None;
        }
        // the −d/c prediction needs c to have at least 4j + 64 bits
        let room = (self.triple.c().bits().saturating_sub(64) / 4) as usize;
        let j = cap.min(remaining).min(room);
        (j >= MIN_BLOCK_BITS).then_some(j)
    }

    fn check_limit(&self, opts: &GenerateOptions) -> Result<()> {
        match opts.max_coeff_bits {
            Some(limit) => {
                let bits = self.triple.max_bits();
                if bits > limit {
                    Err(Error::CoefficientLimit { bits, limit })
                } else {
                    Ok(())
                }
            }
            None => Ok(()),
        }
    }

    /// Versioned text checkpoint: a header line, then `step`, `b`, `c`, `d`
    /// records with decimal values.
    pub fn to_record(&self) -> String {
        format!(
            "{RECORD_HEADER}\nstep {}\nb {}\nc {}\nd {}\n",
            self.step_index,
            self.triple.b(),
            self.triple.c(),
            self.triple.d()
        )
    }

    pub fn from_record(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some(RECORD_HEADER) {
            return Err(Error::Parse("missing orbit-state header".into()));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing `{name}` record")))?;
            match line.split_once(' ') {
                Some((key, value)) if key == name => Ok(value.trim().to_string()),
                _ => Err(Error::Parse(format!("expected `{name}` record, got {line:?}"))),
            }
        };
        let step_index = field("step")?
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("step: {e}")))?;
        let mut int = |name: &str| -> Result<BigInt> {
            field(name)?
                .parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("{name}: {e}")))
        };
        let (b, c, d) = (int("b")?, int("c")?, int("d")?);
        Ok(OrbitState {
            triple: CoeffTriple::new(b, c, d)?,
            step_index,
        })
    }
}

/// Advance `j` steps at once if the predicted block certifies.
fn try_block(t: &mut CoeffTriple, j: usize) -> Option<BigInt> {
    let (b, c, d) = (t.b(), t.c(), t.d());
    let shift = c.bits() - (j as u64 + 64);
    let c_top = c.magnitude() >> shift;
    let d_top = d.magnitude() >> shift;
    let estimate = BigInt::from((d_top << j) / c_top);
    let limit = BigInt::from(1u8) << j;

    let bb: BigInt = b << j;
    let cc: BigInt = c << (2 * j);
    let dd: BigInt = d << (3 * j);
    for delta in [0i8, -1, 1] {
        let m = &estimate + delta;
        if m.is_negative() || m >= limit {
            continue;
        }
        // d' = 8ʲ f(m/2ʲ) = ((m + 2ʲb)·m + 4ʲc)·m + 8ʲd
        let mut d_next = &bb + &m;
        d_next *= &m;
        d_next += &cc;
        d_next *= &m;
        d_next += &dd;
        if !d_next.is_negative() {
            continue;
        }
        // c' = 4ʲc + 2m·2ʲb + 3m², b' = 2ʲb + 3m
        let m_sq = &m * &m;
        let mut c_next = &bb * (&m << 1usize);
        c_next += &cc;
        c_next += m_sq * 3u32;
        let b_next = &bb + &m * 3u32;
        // 1 + b' + c' + d' = 8ʲ f((m+1)/2ʲ)
        let upper = &b_next + &c_next + &d_next + 1u32;
        if !upper.is_positive() {
            continue;
        }
        *t = CoeffTriple::from_parts_unchecked(b_next, c_next, d_next);
        return Some(m);
    }
    None
}

/// Generate `n` bits from `seed` with default options.
pub fn generate_bits(seed: &CoeffTriple, n: usize) -> Result<(BitStream, OrbitState)> {
    generate_bits_with(seed, n, &GenerateOptions::default())
}

pub fn generate_bits_with(
    seed: &CoeffTriple,
    n: usize,
    opts: &GenerateOptions,
) -> Result<(BitStream, OrbitState)> {
    let mut state = OrbitState::new(seed.clone());
    let mut out = BitStream::with_capacity(n);
    state.advance(n, opts, &mut out)?;
    Ok((out, state))
}
