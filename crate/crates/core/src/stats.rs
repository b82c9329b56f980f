//! Summary statistics and the two-sided Wilcoxon rank-sum (Mann-Whitney) test.
//!
//! Small samples (`n_a + n_b <= 16`) get an exact p-value from the full
//! permutation distribution of the midrank sum; larger ones use the normal
//! approximation with tie and continuity corrections. Both routes are public
//! so they can be compared directly.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Largest combined sample size routed to exact enumeration.
pub const EXACT_MAX_TOTAL: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` divisor); 0 for a single value.
    pub sd: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn sorted_copy(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Usage("cannot summarise an empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Usage("sample contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// Quantile by linear interpolation between order statistics at `(n - 1) p`.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    let sorted = sorted_copy(values)?;
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(SummaryStats {
        n,
        mean,
        sd,
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[n - 1],
    })
}

/// Five-number summary with Tukey whiskers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Smallest value not below `q1 - 1.5 IQR`.
    pub whisker_low: f64,
    /// Largest value not above `q3 + 1.5 IQR`.
    pub whisker_high: f64,
    /// Values outside the whiskers, ascending.
    pub outliers: Vec<f64>,
}

pub fn boxplot(values: &[f64]) -> Result<BoxplotStats> {
    let s = summarize(values)?;
    let sorted = sorted_copy(values)?;
    let iqr = s.q3 - s.q1;
    let (lo_fence, hi_fence) = (s.q1 - 1.5 * iqr, s.q3 + 1.5 * iqr);
    let inside = |v: &&f64| **v >= lo_fence && **v <= hi_fence;
    let whisker_low = *sorted.iter().find(inside).expect("the quartiles lie within the fences");
    let whisker_high = *sorted.iter().rev().find(inside).expect("the quartiles lie within the fences");
    Ok(BoxplotStats {
        min: s.min,
        q1: s.q1,
        median: s.median,
        q3: s.q3,
        max: s.max,
        whisker_low,
        whisker_high,
        outliers: sorted.into_iter().filter(|v| !inside(&v)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Mann-Whitney `U` of the first sample: its rank sum minus `n_a (n_a + 1) / 2`.
    pub statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub significant: bool,
    pub exact: bool,
}

/// Midranks (1-based) of the pooled sample `a ++ b`.
pub fn midranks(pooled: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        // Positions start..end (0-based) share the mean of ranks start+1..=end.
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn check_samples(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Usage("rank-sum test needs two non-empty samples".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::Usage("rank-sum test sample contains NaN".into()));
    }
    Ok(())
}

fn pooled(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().chain(b).copied().collect()
}

fn u_statistic(a: &[f64], ranks: &[f64]) -> f64 {
    let na = a.len() as f64;
    ranks[..a.len()].iter().sum::<f64>() - na * (na + 1.0) / 2.0
}

/// Exact two-sided p-value: the share of all `C(n, n_a)` assignments of the
/// pooled midranks to the first sample whose rank sum lies at least as far
/// from its mean as the observed one.
pub fn exact_p_value(a: &[f64], b: &[f64]) -> Result<f64> {
    check_samples(a, b)?;
    let ranks = midranks(&pooled(a, b));
    // Doubled midranks are integers.
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let (na, n) = (a.len(), doubled.len());
    let max_sum: usize = doubled.iter().sum();

    // counts[j][s]: subsets of size j with doubled rank sum s.
    let mut counts = vec![vec![0f64; max_sum + 1]; na + 1];
    counts[0][0] = 1.0;
    for &r in &doubled {
        for j in (1..=na).rev() {
            let (lower, upper) = counts.split_at_mut(j);
            let prev = &lower[j - 1];
            let cur = &mut upper[0];
            for s in (r..=max_sum).rev() {
                cur[s] += prev[s - r];
            }
        }
    }

    let observed: usize = doubled[..na].iter().sum();
    // Mean of the doubled rank sum is n_a (n + 1).
    let dev = |s: usize| s.abs_diff(na * (n + 1));
    let observed_dev = dev(observed);
    let row = &counts[na];
    let total: f64 = row.iter().sum();
    let extreme: f64 = row
        .iter()
        .enumerate()
        .filter(|&(s, _)| dev(s) >= observed_dev)
        .map(|(_, c)| c)
        .sum();
    Ok((extreme / total).clamp(0.0, 1.0))
}

/// Two-sided p-value from the normal approximation to `U`, with the tie
/// correction to its variance and a continuity correction of 1/2.
pub fn normal_p_value(a: &[f64], b: &[f64]) -> Result<f64> {
    check_samples(a, b)?;
    let all = pooled(a, b);
    let ranks = midranks(&all);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let u = u_statistic(a, &ranks);
    let mean = na * nb / 2.0;

    let mut sorted = all;
    sorted.sort_by(f64::total_cmp);
    let tie_term: f64 = sorted
        .chunk_by(|x, y| x == y)
        .map(|run| {
            let t = run.len() as f64;
            t * t * t - t
        })
        .sum();
    let variance = if n > 1.0 {
        na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))
    } else {
        0.0
    };
    if variance <= 0.0 {
        return Ok(1.0);
    }
    let distance = ((u - mean).abs() - 0.5).max(0.0);
    let z = distance / variance.sqrt();
    let normal = Normal::standard();
    Ok((2.0 * normal.sf(z)).clamp(0.0, 1.0))
}

pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    check_samples(a, b)?;
    let exact = a.len() + b.len() <= EXACT_MAX_TOTAL;
    let p_value = if exact {
        exact_p_value(a, b)?
    } else {
        normal_p_value(a, b)?
    };
    let ranks = midranks(&pooled(a, b));
    Ok(WilcoxonResult {
        statistic: u_statistic(a, &ranks),
        p_value,
        significant: p_value < SIGNIFICANCE_LEVEL,
        exact,
    })
}
