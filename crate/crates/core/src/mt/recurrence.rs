//! The order-624 linear recurrence satisfied by MT19937 output words,
//!
//! ```text
//! y_n = y_{n−227} ⊕ A·y_{n−623} ⊕ B·y_{n−624},   n ≥ 624,
//! ```
//!
//! and the lag-227 top-byte defect it implies.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::gf2::{Gf2Matrix32, Gf2System64, Gf2Vector32};
use crate::error::{Error, Result};
use crate::stats::special::igamc;

pub const LAG_SHORT: usize = 227;
pub const LAG_A: usize = 623;
pub const LAG_B: usize = 624;

const MATRIX_A_DATA: &str = include_str!("../../data/matrix_a.txt");
const MATRIX_B_DATA: &str = include_str!("../../data/matrix_b.txt");

/// Parse a matrix data file: 32 rows of `0`/`1` and a `sha256 <hex>` line
/// covering the rows (each terminated by `\n`).
pub fn parse_matrix_file(text: &str) -> Result<Gf2Matrix32> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let (rows, tail) = match lines.split_last() {
        Some((tail, rows)) => (rows, *tail),
        None => return Err(Error::DataCorrupt("empty matrix file".into())),
    };
    let expected = tail
        .strip_prefix("sha256 ")
        .ok_or_else(|| Error::DataCorrupt("missing checksum line".into()))?
        .trim();
    let actual = rows_digest(rows);
    if actual != expected {
        return Err(Error::DataCorrupt(format!(
            "checksum mismatch: file says {expected}, rows hash to {actual}"
        )));
    }
    Gf2Matrix32::from_row_strings(rows)
}

fn rows_digest<S: AsRef<str>>(rows: &[S]) -> String {
    let mut hasher = Sha256::new();
    for r in rows {
        hasher.update(r.as_ref().trim().as_bytes());
        hasher.update(b"\n");
    }
    hasher
        .finalize()
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Serialize in the checked-in data format.
pub fn format_matrix_file(m: &Gf2Matrix32) -> String {
    let rows = m.to_row_strings();
    let mut out = String::new();
    for r in &rows {
        out.push_str(r);
        out.push('\n');
    }
    let _ = writeln!(out, "sha256 {}", rows_digest(&rows));
    out
}

/// The shipped `A` and `B`.
pub fn load_recurrence_matrices() -> Result<(Gf2Matrix32, Gf2Matrix32)> {
    Ok((parse_matrix_file(MATRIX_A_DATA)?, parse_matrix_file(MATRIX_B_DATA)?))
}

fn predicted(outputs: &[u32], n: usize, a: &Gf2Matrix32, b: &Gf2Matrix32) -> u32 {
    let y = |k: usize| Gf2Vector32(outputs[k]);
    (y(n - LAG_SHORT) ^ a.apply(y(n - LAG_A)) ^ b.apply(y(n - LAG_B))).0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecurrenceCheck {
    Pass { checked: usize },
    Fail { index: usize, expected: u32, actual: u32 },
}

impl RecurrenceCheck {
    pub fn passed(&self) -> bool {
        matches!(self, RecurrenceCheck::Pass { .. })
    }
}

/// Check the recurrence for every `n ≥ 624`; stops at the first violation.
pub fn verify_recurrence(outputs: &[u32], a: &Gf2Matrix32, b: &Gf2Matrix32) -> Result<RecurrenceCheck> {
    if outputs.len() <= LAG_B {
        return Err(Error::InvalidParameter(format!(
            "need at least {} outputs, got {}",
            LAG_B + 1,
            outputs.len()
        )));
    }
    for n in LAG_B..outputs.len() {
        let expected = predicted(outputs, n, a, b);
        if expected != outputs[n] {
            return Ok(RecurrenceCheck::Fail {
                index: n,
                expected,
                actual: outputs[n],
            });
        }
    }
    Ok(RecurrenceCheck::Pass {
        checked: outputs.len() - LAG_B,
    })
}

/// Solve for the unique `(A, B)` consistent with the data.
///
/// Each `n ≥ 624` gives, for every row `i`, one equation in the 64 unknowns
/// `(row_i(A), row_i(B))` with coefficient vector `(y_{n−623}, y_{n−624})`.
/// The coefficient vector is shared across rows, so all 32 rows are solved
/// in one elimination. Equations are collected until rank 64; any remaining
/// equations are not consulted (use [`verify_recurrence`] on held-out data).
pub fn recover_matrices(outputs: &[u32]) -> Result<(Gf2Matrix32, Gf2Matrix32)> {
    let mut sys = Gf2System64::new();
    let mut used = 0;
    for n in LAG_B..outputs.len() {
        let coeffs = (u64::from(outputs[n - LAG_A]) << 32) | u64::from(outputs[n - LAG_B]);
        let rhs = outputs[n] ^ outputs[n - LAG_SHORT];
        sys.add(coeffs, rhs);
        used += 1;
        if sys.rank() == 64 {
            break;
        }
    }
    if sys.is_inconsistent() {
        return Err(Error::DataCorrupt(
            "outputs do not satisfy any recurrence of this shape".into(),
        ));
    }
    let solution = sys.solution().ok_or(Error::RankDeficient {
        rank: sys.rank(),
        equations: used,
    })?;
    let (mut a, mut b) = ([0u32; 32], [0u32; 32]);
    for (unknown, column) in solution.iter().enumerate() {
        for i in 0..32 {
            // row i+1 lives at bit 31−i of the rhs word
            if column >> (31 - i) & 1 == 1 {
                if unknown >= 32 {
                    a[i] |= 1 << (unknown - 32);
                } else {
                    b[i] |= 1 << unknown;
                }
            }
        }
    }
    Ok((Gf2Matrix32::from_rows(a), Gf2Matrix32::from_rows(b)))
}

/// `(Y_{n−227}, Y_n)` for an index `n` meeting conditions (a) and (b).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LagPair {
    pub n: usize,
    pub y_lag_top8: u8,
    pub y_top8: u8,
}

impl LagPair {
    pub fn on_diagonal(&self) -> bool {
        self.y_lag_top8 == self.y_top8
    }
}

/// Indices where rows 1–8 of `A` are orthogonal to `y_{n−623}` and row 2 of
/// `B` is orthogonal to `y_{n−624}`. For MT19937 output the top byte of
/// `y_n` then equals that of `y_{n−227}`.
pub fn scan_conditions_ab(outputs: &[u32], a: &Gf2Matrix32, b: &Gf2Matrix32) -> Result<Vec<LagPair>> {
    if outputs.len() <= LAG_B {
        return Err(Error::InvalidParameter(format!(
            "need at least {} outputs, got {}",
            LAG_B + 1,
            outputs.len()
        )));
    }
    let b_row2 = b.row(2);
    let mut pairs = Vec::new();
    for n in LAG_B..outputs.len() {
        let ya = Gf2Vector32(outputs[n - LAG_A]);
        let yb = Gf2Vector32(outputs[n - LAG_B]);
        let cond_a = (1..=8).all(|i| a.row(i).dot(ya) == 0);
        if cond_a && b_row2.dot(yb) == 0 {
            pairs.push(LagPair {
                n,
                y_lag_top8: Gf2Vector32(outputs[n - LAG_SHORT]).top8(),
                y_top8: Gf2Vector32(outputs[n]).top8(),
            });
        }
    }
    Ok(pairs)
}

/// CSV with header `n,y_lag,y_n`.
pub fn lag_pairs_csv(pairs: &[LagPair]) -> String {
    let mut out = String::from("n,y_lag,y_n\n");
    for p in pairs {
        let _ = writeln!(out, "{},{},{}", p.n, p.y_lag_top8, p.y_top8);
    }
    out
}

/// Expected match count and its standard deviation when the nine bits
/// tested by conditions (a) and (b) behave like fair independent coins.
pub fn match_count_model(outputs_len: usize) -> (f64, f64) {
    let trials = outputs_len.saturating_sub(LAG_B) as f64;
    let p = 1.0 / 512.0;
    (trials * p, (trials * p * (1.0 - p)).sqrt())
}

/// Chi-square test of the pairs against uniformity on a `bins × bins` grid
/// over `[0, 255]²`. Returns `(statistic, p_value)`.
pub fn lag_pair_uniformity(pairs: &[LagPair], bins: usize) -> Result<(f64, f64)> {
    if !(2..=256).contains(&bins) || 256 % bins != 0 {
        return Err(Error::InvalidParameter(format!("{bins} bins do not divide 256")));
    }
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("no pairs to test".into()));
    }
    let width = 256 / bins;
    let mut counts = vec![0u64; bins * bins];
    for p in pairs {
        counts[(p.y_lag_top8 as usize / width) * bins + p.y_top8 as usize / width] += 1;
    }
    let expected = pairs.len() as f64 / (bins * bins) as f64;
    let stat: f64 = counts
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum();
    let dof = (bins * bins - 1) as f64;
    Ok((stat, igamc(dof / 2.0, stat / 2.0)))
}
