//! Seed sets: the triples `(b, c, d)` with `d = −1, …, −(b + c)` for fixed `b`, `c`.
//!
//! The roots of a set are spread across `(0, 1)` with gaps close to `1/c`,
//! and a set built only from source points (triples without a preimage) can
//! never produce merging orbits, since the map is injective.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::{refine_to_resolution, DyadicRational, RootInterval};
use crate::triple::CoeffTriple;

/// Why a triple is, or is not, a source point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SourceReason {
    /// `b, c, d` neither all even nor all odd.
    MixedParity,
    /// All even, but `c ≢ 0 (mod 4)` or `d ≢ 0 (mod 8)`.
    EvenResidue,
    /// All odd, but `−2b + c ≢ 1 (mod 4)` or `b − c + d ≢ 1 (mod 8)`.
    OddResidue,
    /// Has a preimage.
    NotSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SourceVerdict {
    pub is_source: bool,
    pub reason: SourceReason,
}

fn residue(x: &BigInt, m: u32) -> u32 {
    x.mod_floor(&BigInt::from(m)).to_u32().unwrap()
}

/// Classify by parity and residues alone, without computing a preimage.
pub fn is_source_point(t: &CoeffTriple) -> SourceVerdict {
    let (b, c, d) = (t.b(), t.c(), t.d());
    let odd = b.is_odd();
    let reason = if c.is_odd() != odd || d.is_odd() != odd {
        SourceReason::MixedParity
    } else if !odd {
        if residue(c, 4) != 0 || residue(d, 8) != 0 {
            SourceReason::EvenResidue
        } else {
            SourceReason::NotSource
        }
    } else if residue(&(c - b * 2u32), 4) != 1 || residue(&(b - c + d), 8) != 1 {
        SourceReason::OddResidue
    } else {
        SourceReason::NotSource
    };
    SourceVerdict {
        is_source: reason != SourceReason::NotSource,
        reason,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedMember {
    pub triple: CoeffTriple,
    pub source: SourceVerdict,
}

impl SeedMember {
    pub fn d(&self) -> &BigInt {
        self.triple.d()
    }
}

#[derive(Clone, Debug)]
pub struct SeedSet {
    pub b: i64,
    pub c: i64,
    /// Ordered by descending `d`: `−1, −2, …`.
    pub members: Vec<SeedMember>,
    /// Candidates in the `d` range that failed validation.
    pub excluded: Vec<(i64, String)>,
    /// `b` even and `c` odd, or `b` odd and `c` even. Guarantees that
    /// every member is a source point.
    pub parity_rule: bool,
}

impl SeedSet {
    pub fn triples(&self) -> impl Iterator<Item = &CoeffTriple> {
        self.members.iter().map(|m| &m.triple)
    }

    pub fn all_source_points(&self) -> bool {
        self.members.iter().all(|m| m.source.is_source)
    }

    /// One `b c d source_flag` line per member.
    pub fn to_text(&self) -> String {
        self.members
            .iter()
            .map(|m| {
                format!(
                    "{} {} {} {}\n",
                    m.triple.b(),
                    m.triple.c(),
                    m.triple.d(),
                    u8::from(m.source.is_source)
                )
            })
            .collect()
    }
}

/// The seed set for `(b, c)`, members in descending `d` order.
pub fn build_seed_set(b: i64, c: i64) -> Result<SeedSet> {
    let (bb, cc) = (i128::from(b), i128::from(c));
    if c < 1 || bb * bb > 3 * cc {
        return Err(Error::InvalidShape {
            b_squared: (bb * bb).to_string(),
            three_c: (3 * cc).to_string(),
        });
    }
    let count = b + c;
    if count < 1 {
        return Err(Error::InvalidParameter(format!("b + c = {count} leaves no members")));
    }
    let mut members = Vec::with_capacity(count as usize);
    let mut excluded = Vec::new();
    for k in 1..=count {
        match CoeffTriple::new(b, c, -k) {
            Ok(triple) => {
                let source = is_source_point(&triple);
                members.push(SeedMember { triple, source });
            }
            Err(e) => excluded.push((-k, e.to_string())),
        }
    }
    Ok(SeedSet {
        b,
        c,
        members,
        excluded,
        parity_rule: b.rem_euclid(2) != c.rem_euclid(2),
    })
}

/// `Δ_d = α_{d−1} − α_d` between consecutive members.
#[derive(Clone, Debug)]
pub struct Gap {
    /// The `d` of the lower root.
    pub d: i64,
    /// Difference of the interval midpoints.
    pub delta: DyadicRational,
    /// Certified enclosure `lower < Δ_d < upper`.
    pub lower: DyadicRational,
    pub upper: DyadicRational,
}

#[derive(Clone, Debug)]
pub struct GapReport {
    pub c: i64,
    pub precision: u32,
    pub gaps: Vec<Gap>,
    /// Certified upper bound on `max |Δ_d·c − 1|`.
    pub max_deviation: DyadicRational,
}

impl GapReport {
    pub fn max_deviation_f64(&self) -> f64 {
        self.max_deviation.to_f64()
    }

    /// Every gap strictly inside `((3 + 2|b| + c)⁻¹, (c − 2|b|)⁻¹)`, the
    /// mean-value bounds from `|b| ≤ √(3c)` and `f' ∈ (c − 2|b|, c + 2|b| + 3)`
    /// on `(0, 1)`. For `b = 0` this reads `c/(c+3) < Δ·c < 1`.
    /// Returns `None` when `c ≤ 2|b|` and the upper bound is vacuous.
    pub fn within_mean_value_bounds(&self, b: i64) -> Option<bool> {
        let lo_den = BigInt::from(3 + 2 * b.abs() + self.c);
        let hi_den = BigInt::from(self.c - 2 * b.abs());
        if !hi_den.is_positive() {
            return None;
        }
        let one = DyadicRational::one();
        Some(self.gaps.iter().all(|g| {
            g.lower.mul_int(&lo_den) > one && g.upper.mul_int(&hi_den) < one
        }))
    }
}

/// Locate every root to `precision` bits and bound the consecutive gaps.
pub fn gap_report(s: &SeedSet, precision: u32) -> Result<GapReport> {
    if precision < 32 {
        return Err(Error::PrecisionTooLow(precision));
    }
    let intervals: Vec<RootInterval> = s
        .members
        .par_iter()
        .map(|m| refine_to_resolution(&m.triple, precision))
        .collect::<Result<_>>()?;
    let c = BigInt::from(s.c);
    let one = DyadicRational::one();
    let mut gaps = Vec::with_capacity(intervals.len().saturating_sub(1));
    let mut max_deviation = DyadicRational::zero();
    for (k, pair) in intervals.windows(2).enumerate() {
        let (cur, next) = (&pair[0], &pair[1]);
        let lower = next.lo.sub(&cur.hi);
        let upper = next.hi.sub(&cur.lo);
        if lower <= DyadicRational::zero() {
            return Err(Error::PrecisionTooLow(precision));
        }
        for end in [&lower, &upper] {
            let dev = abs(&end.mul_int(&c).sub(&one));
            if dev > max_deviation {
                max_deviation = dev;
            }
        }
        gaps.push(Gap {
            d: s.members[k].d().to_i64().unwrap(),
            delta: next.midpoint().sub(&cur.midpoint()),
            lower,
            upper,
        });
    }
    Ok(GapReport {
        c: s.c,
        precision,
        gaps,
        max_deviation,
    })
}

fn abs(x: &DyadicRational) -> DyadicRational {
    DyadicRational::new(x.numerator().abs(), x.exponent())
}

/// The first time two orbits of a set meet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub first_member: usize,
    pub first_step: usize,
    pub second_member: usize,
    pub second_step: usize,
    pub state: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MergerAudit {
    Pass { horizon: usize, states_checked: usize },
    Fail(Collision),
}

impl MergerAudit {
    pub fn passed(&self) -> bool {
        matches!(self, MergerAudit::Pass { .. })
    }
}

/// Run every seed for `horizon` steps and look for a state shared by two
/// different orbits, at any pair of step indices. A shared state means the
/// orbits merge (or one seed lies on the other's orbit).
pub fn merger_audit<'a, I>(seeds: I, horizon: usize) -> Result<MergerAudit>
where
    I: IntoIterator<Item = &'a CoeffTriple>,
{
    if horizon < 1 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let mut states: Vec<CoeffTriple> = seeds.into_iter().cloned().collect();
    let mut seen: HashMap<CoeffTriple, (usize, usize)> = HashMap::new();
    let mut scratch = BigInt::zero();
    for step in 0..=horizon {
        for (member, state) in states.iter_mut().enumerate() {
            if step > 0 {
                state.step_in_place(&mut scratch);
            }
            match seen.get(state) {
                Some(&(other, other_step)) if other != member => {
                    return Ok(MergerAudit::Fail(Collision {
                        first_member: other,
                        first_step: other_step,
                        second_member: member,
                        second_step: step,
                        state: state.to_string(),
                    }));
                }
                Some(_) => {}
                None => {
                    seen.insert(state.clone(), (member, step));
                }
            }
        }
    }
    Ok(MergerAudit::Pass {
        horizon,
        states_checked: seen.len(),
    })
}

/// Squarefree part of a nonzero integer, as far as trial division can tell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeKernel {
    pub value: BigInt,
    /// False when an unfactored cofactor might still hide a square.
    pub certified: bool,
}

/// Strip squares of primes up to `factor_bound`. The leftover cofactor has
/// no prime factor `≤ factor_bound`; it is known squarefree when it is below
/// `(factor_bound + 1)²` (then it is 1 or a prime) or a perfect square.
pub fn squarefree_kernel(n: &BigInt, factor_bound: u64) -> SquarefreeKernel {
    assert!(!n.is_zero(), "kernel of zero");
    let negative = n.is_negative();
    let mut rest = n.abs();
    let mut kernel = BigInt::one();
    // set once p² > rest: the cofactor is then 1 or a prime
    let mut exhausted = false;
    for p in primes_up_to(factor_bound) {
        let p = BigInt::from(p);
        if rest.is_one() || &p * &p > rest {
            exhausted = true;
            break;
        }
        let mut exp = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            exp += 1;
        }
        if exp % 2 == 1 {
            kernel *= &p;
        }
    }
    let bound_sq = BigInt::from(factor_bound + 1).pow(2);
    let root = rest.sqrt();
    let certified = if &root * &root == rest {
        true
    } else {
        kernel *= &rest;
        exhausted || rest < bound_sq
    };
    if negative {
        kernel = -kernel;
    }
    SquarefreeKernel {
        value: kernel,
        certified,
    }
}

fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FieldVerdict {
    /// Different squarefree discriminant kernels: the cubic fields differ.
    Distinct,
    /// Kernels agree or could not be separated; no claim either way.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairVerdict {
    pub first: usize,
    pub second: usize,
    pub verdict: FieldVerdict,
}

#[derive(Clone, Debug)]
pub struct DistinctnessReport {
    pub discriminants: Vec<BigInt>,
    pub kernels: Vec<SquarefreeKernel>,
    pub pairs: Vec<PairVerdict>,
}

impl DistinctnessReport {
    pub fn all_distinct(&self) -> bool {
        self.pairs.iter().all(|p| p.verdict == FieldVerdict::Distinct)
    }
}

/// Necessary-condition check on `Q(α) ≠ Q(β)` for every pair of seeds.
///
/// Equal fields force the polynomial discriminants to agree up to a rational
/// square. Two kernels that are both certified and differ therefore prove
/// distinct fields. When a kernel is not certified, the pair is decided by
/// whether `D₁·D₂` is a perfect square, which compares the kernels exactly.
pub fn field_distinctness_check(seeds: &[CoeffTriple], factor_bound: u64) -> Result<DistinctnessReport> {
    if factor_bound < 2 {
        return Err(Error::InvalidParameter("factor_bound must be at least 2".into()));
    }
    let discriminants: Vec<BigInt> = seeds.iter().map(CoeffTriple::poly_discriminant).collect();
    let kernels: Vec<SquarefreeKernel> = discriminants
        .par_iter()
        .map(|d| squarefree_kernel(d, factor_bound))
        .collect();
    let mut pairs = Vec::new();
    for i in 0..seeds.len() {
        for j in i + 1..seeds.len() {
            let (ki, kj) = (&kernels[i], &kernels[j]);
            let distinct = if ki.certified && kj.certified {
                ki.value != kj.value
            } else {
                !is_square(&(&discriminants[i] * &discriminants[j]))
            };
            pairs.push(PairVerdict {
                first: i,
                second: j,
                verdict: if distinct {
                    FieldVerdict::Distinct
                } else {
                    FieldVerdict::Unknown
                },
            });
        }
    }
    Ok(DistinctnessReport {
        discriminants,
        kernels,
        pairs,
    })
}

fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

#[derive(Serialize)]
pub struct MemberRecord {
    pub b: String,
    pub c: String,
    pub d: String,
    pub source: bool,
    pub reason: SourceReason,
}

#[derive(Serialize)]
pub struct GapRecord {
    pub d: i64,
    pub delta: f64,
    pub delta_times_c: f64,
    pub lower: String,
    pub upper: String,
}

#[derive(Serialize)]
pub struct GapReportRecord {
    pub precision: u32,
    pub max_deviation: f64,
    pub within_mean_value_bounds: Option<bool>,
    pub gaps: Vec<GapRecord>,
}

#[derive(Serialize)]
pub struct PairRecord {
    pub first_d: String,
    pub second_d: String,
    pub verdict: FieldVerdict,
}

#[derive(Serialize)]
pub struct DistinctnessRecord {
    pub factor_bound: u64,
    pub all_distinct: bool,
    pub discriminants: Vec<String>,
    pub kernels: Vec<String>,
    pub kernels_certified: Vec<bool>,
    pub pairs: Vec<PairRecord>,
}

/// JSON-ready export of a seed set with optional attachments.
#[derive(Serialize)]
pub struct SeedSetRecord {
    pub b: i64,
    pub c: i64,
    pub parity_rule: bool,
    pub all_source_points: bool,
    pub member_count: usize,
    pub members: Vec<MemberRecord>,
    pub excluded: Vec<(i64, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaps: Option<GapReportRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub merger_audit: Option<MergerAudit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinctness: Option<DistinctnessRecord>,
}

impl SeedSetRecord {
    pub fn new(s: &SeedSet) -> Self {
        SeedSetRecord {
            b: s.b,
            c: s.c,
            parity_rule: s.parity_rule,
            all_source_points: s.all_source_points(),
            member_count: s.members.len(),
            members: s
                .members
                .iter()
                .map(|m| MemberRecord {
                    b: m.triple.b().to_string(),
                    c: m.triple.c().to_string(),
                    d: m.triple.d().to_string(),
                    source: m.source.is_source,
                    reason: m.source.reason,
                })
                .collect(),
            excluded: s.excluded.clone(),
            gaps: None,
            merger_audit: None,
            distinctness: None,
        }
    }

    pub fn with_gaps(mut self, s: &SeedSet, report: &GapReport) -> Self {
        let c = s.c as f64;
        self.gaps = Some(GapReportRecord {
            precision: report.precision,
            max_deviation: report.max_deviation_f64(),
            within_mean_value_bounds: report.within_mean_value_bounds(s.b),
            gaps: report
                .gaps
                .iter()
                .map(|g| GapRecord {
                    d: g.d,
                    delta: g.delta.to_f64(),
                    delta_times_c: g.delta.to_f64() * c,
                    lower: g.lower.to_string(),
                    upper: g.upper.to_string(),
                })
                .collect(),
        });
        self
    }

    pub fn with_audit(mut self, audit: MergerAudit) -> Self {
        self.merger_audit = Some(audit);
        self
    }

    pub fn with_distinctness(mut self, s: &SeedSet, factor_bound: u64, report: &DistinctnessReport) -> Self {
        let d_of = |i: usize| s.members[i].triple.d().to_string();
        self.distinctness = Some(DistinctnessRecord {
            factor_bound,
            all_distinct: report.all_distinct(),
            discriminants: report.discriminants.iter().map(ToString::to_string).collect(),
            kernels: report.kernels.iter().map(|k| k.value.to_string()).collect(),
            kernels_certified: report.kernels.iter().map(|k| k.certified).collect(),
            pairs: report
                .pairs
                .iter()
                .map(|p| PairRecord {
                    first_d: d_of(p.first),
                    second_d: d_of(p.second),
                    verdict: p.verdict,
                })
                .collect(),
        });
        self
    }
}
