//! Pseudorandom bits from exact orbits of the doubling map on real cubic
//! algebraic integers in `(0, 1)`.
//!
//! A point is carried as the integer coefficients `(b, c, d)` of its minimal
//! polynomial `x³ + bx² + cx + d`. One step of the map is an integer transform
//! of the triple and emits one bit, so orbits are computed with no rounding.
//!
//! ```
//! use bernoulli_cubic::{generate_bits, CoeffTriple};
//!
//! let seed = CoeffTriple::new(0, 1, -1)?;
//! let (bits, _state) = generate_bits(&seed, 8)?;
//! assert_eq!(bits.to_ascii(), "10101110");
//! # Ok::<(), bernoulli_cubic::Error>(())
//! ```
//!
//! The crate also carries an MT19937 implementation with tools that expose its
//! GF(2)-linear output recurrence, and a small battery of frequency-style
//! statistical tests.

pub mod bits;
pub mod error;
pub mod mt;
pub mod orbit;
pub mod roots;
pub mod seeds;
pub mod stats;
pub mod triple;

pub use bits::{pack_words, words_from_le_bytes, words_to_le_bytes, BitStream, PackedWords};
pub use error::{Condition, Error, Result};
pub use orbit::{generate_bits, generate_bits_with, GenerateOptions, OrbitState, DEFAULT_BLOCK_BITS};
pub use roots::{isolate_root_bits, refine_to_resolution, DyadicRational, RootInterval};
pub use seeds::{
    build_seed_set, field_distinctness_check, gap_report, is_source_point, merger_audit, GapReport, MergerAudit,
    SeedSet, SourceReason, SourceVerdict,
};
pub use triple::{branch_sign, inverse_step, step, Branch, CoeffTriple, DiscriminantClass};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub mod readme {}

/// The guide's chapters, compiled so that their snippets run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/orbits.md")]
    pub mod orbits {}
    #[doc = include_str!("../../../book/src/roots.md")]
    pub mod roots {}
    #[doc = include_str!("../../../book/src/seeds.md")]
    pub mod seeds {}
    #[doc = include_str!("../../../book/src/mt.md")]
    pub mod mt {}
    #[doc = include_str!("../../../book/src/stats.md")]
    pub mod stats {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
