//! One-sided Wilcoxon signed-rank test for paired samples.
//!
//! Zero differences are dropped, tied `|d|` receive mid-ranks. The statistic
//! is `W+`, the rank sum of positive differences; the alternative is
//! `x > y`, so the p-value is `P(W+ >= observed)` under the null.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest number of non-zero pairs for which [`Method::Auto`] uses the exact
/// null distribution.
pub const EXACT_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Exact for `n <= 20` non-zero differences, normal approximation above.
    Auto,
    Exact,
    /// Normal approximation with tie and continuity correction.
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    pub w_plus: f64,
    pub n_nonzero: usize,
    pub p_value: f64,
    pub exact: bool,
}

/// Non-zero differences with their mid-ranks, doubled so they are integers.
pub(crate) struct SignedRanks {
    pub doubled_ranks: Vec<u64>,
    pub positive: Vec<bool>,
    pub tie_sizes: Vec<usize>,
}

pub(crate) fn signed_ranks(x: &[f64], y: &[f64]) -> Result<SignedRanks> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} paired values", x.len()),
            actual: format!("{} values", y.len()),
        });
    }
    if x.len() < 5 {
        return Err(Error::param(
            "samples",
            format!("need at least 5 pairs, got {}", x.len()),
        ));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::param("samples", "values must be finite"));
    }
    let mut diffs: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|&d| d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Err(Error::DegenerateTest(
            "all paired differences are zero".into(),
        ));
    }
    diffs.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let n = diffs.len();
    let mut doubled_ranks = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[j + 1].abs() == diffs[i].abs() {
            j += 1;
        }
        // 1-based positions i+1 ..= j+1 share rank (i + j + 2) / 2.
        let doubled = (i + j + 2) as u64;
        doubled_ranks[i..=j].fill(doubled);
        tie_sizes.push(j - i + 1);
        i = j + 1;
    }
    let positive = diffs.iter().map(|&d| d > 0.0).collect();
    Ok(SignedRanks {
        doubled_ranks,
        positive,
        tie_sizes,
    })
}

impl SignedRanks {
    fn doubled_w_plus(&self) -> u64 {
        self.doubled_ranks
            .iter()
            .zip(&self.positive)
            .filter_map(|(&r, &p)| p.then_some(r))
            .sum()
    }
}

/// `P(W+ >= w)` from the exact null distribution (each sign equally likely),
/// by dynamic programming over the doubled rank sums.
fn exact_upper_tail(ranks: &SignedRanks) -> f64 {
    let total: u64 = ranks.doubled_ranks.iter().sum();
    let mut counts = vec![0f64; total as usize + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in &ranks.doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            let c = counts[s];
            if c != 0.0 {
                counts[s + r] += c;
            }
        }
        reach += r;
    }
    let observed = ranks.doubled_w_plus() as usize;
    let tail: f64 = counts[observed..].iter().sum();
    tail / 2f64.powi(ranks.doubled_ranks.len() as i32)
}

fn normal_upper_tail(ranks: &SignedRanks) -> f64 {
    let n = ranks.doubled_ranks.len() as f64;
    let w = ranks.doubled_w_plus() as f64 / 2.0;
    let mean = n * (n + 1.0) / 4.0;
    let tie_term: f64 = ranks
        .tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum::<f64>()
        / 48.0;
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term;
    let z = (w - mean - 0.5) / var.sqrt();
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// One-sided test of `x > y`, choosing the method automatically.
pub fn wilcoxon_one_sided(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    wilcoxon_one_sided_with(x, y, Method::Auto)
}

pub fn wilcoxon_one_sided_with(x: &[f64], y: &[f64], method: Method) -> Result<WilcoxonResult> {
    let ranks = signed_ranks(x, y)?;
    let n = ranks.doubled_ranks.len();
    let exact = match method {
        Method::Auto => n <= EXACT_MAX_N,
        Method::Exact => true,
        Method::Normal => false,
    };
    let p_value = if exact {
        exact_upper_tail(&ranks)
    } else {
        normal_upper_tail(&ranks)
    };
    Ok(WilcoxonResult {
        w_plus: ranks.doubled_w_plus() as f64 / 2.0,
        n_nonzero: n,
        p_value: p_value.clamp(0.0, 1.0),
        exact,
    })
}
