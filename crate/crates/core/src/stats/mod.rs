//! Statistical tests on bit streams, with P-values and a pass/fail verdict at
//! a chosen significance level.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitStream;
use crate::error::{Error, Result};

pub mod special;

pub use tests::{
    approximate_entropy, block_frequency, cumulative_sums, longest_run, monobit, runs, serial,
};

pub const DEFAULT_ALPHA: f64 = 0.01;
pub const DEFAULT_BLOCK_FREQUENCY_M: usize = 128;
pub const DEFAULT_SERIAL_M: usize = 16;
pub const DEFAULT_APEN_M: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub passed: bool,
    pub alpha: f64,
    pub parameters: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sub_p_values: Vec<f64>,
}

impl TestReport {
    pub(crate) fn new(name: &str, statistic: f64, p_value: f64, parameters: BTreeMap<String, f64>) -> Self {
        TestReport {
            name: name.to_string(),
            statistic,
            p_value,
            passed: p_value >= DEFAULT_ALPHA,
            alpha: DEFAULT_ALPHA,
            parameters,
            sub_p_values: Vec::new(),
        }
    }

    pub(crate) fn with_sub_p_values(mut self, p: Vec<f64>) -> Self {
        self.sub_p_values = p;
        self
    }

    /// Re-judge against another significance level.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self.passed = self.p_value >= alpha;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub bits: usize,
    pub alpha: f64,
    pub tests: Vec<TestReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.tests.iter().all(|t| t.passed)
    }

    pub fn get(&self, name: &str) -> Option<&TestReport> {
        self.tests.iter().find(|t| t.name == name)
    }
}

/// Names of the suite members, in report order.
pub const SUITE: [&str; 7] = [
    "monobit",
    "block_frequency",
    "runs",
    "longest_run",
    "serial",
    "cumulative_sums",
    "approximate_entropy",
];

/// Pattern length for the serial test: the default, capped so that
/// `m < ⌊log₂ n⌋ − 2`.
pub fn serial_m_for(n: usize) -> usize {
    DEFAULT_SERIAL_M.min(log2_floor(n).saturating_sub(3)).max(2)
}

/// Block length for approximate entropy: the default, capped so that
/// `m < ⌊log₂ n⌋ − 5`.
pub fn apen_m_for(n: usize) -> usize {
    DEFAULT_APEN_M.min(log2_floor(n).saturating_sub(6)).max(1)
}

fn log2_floor(n: usize) -> usize {
    n.checked_ilog2().unwrap_or(0) as usize
}

fn run_one(name: &str, s: &BitStream) -> Result<TestReport> {
    match name {
        "monobit" => monobit(s),
        "block_frequency" => block_frequency(s, DEFAULT_BLOCK_FREQUENCY_M),
        "runs" => runs(s),
        "longest_run" => longest_run(s),
        "serial" => serial(s, serial_m_for(s.len())),
        "cumulative_sums" => cumulative_sums(s),
        "approximate_entropy" => approximate_entropy(s, apen_m_for(s.len())),
        other => Err(Error::InvalidParameter(format!("unknown test {other}"))),
    }
}

/// Run every suite member with default parameters. Tests run in parallel;
/// the report order is fixed. The serial and approximate entropy pattern
/// lengths shrink for inputs too short for the defaults; the suite needs at
/// least 128 bits.
pub fn run_suite(s: &BitStream, alpha: f64) -> Result<SuiteReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1)")));
    }
    let tests = SUITE
        .par_iter()
        .map(|name| run_one(name, s).map(|r| r.with_alpha(alpha)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport {
        bits: s.len(),
        alpha,
        tests,
    })
}
