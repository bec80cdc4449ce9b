use statrs::distribution::{ContinuousCDF, Normal};

use super::StatsError;

/// Mann-Whitney U test of sample `x` (group 1) against `y` (group 2).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupTestResult {
    /// `U` for group 1: wins of `x` over `y` plus half the ties.
    pub u_statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    /// `u_statistic / (n1 * n2)`.
    pub auc: f64,
    pub group_means: (f64, f64),
    pub n: (usize, usize),
    /// Whether `p_value` came from exact enumeration.
    pub exact: bool,
}

impl GroupTestResult {
    /// The smaller of the two U statistics, as conventionally reported.
    pub fn u_min(&self) -> f64 {
        let total = (self.n.0 * self.n.1) as f64;
        self.u_statistic.min(total - self.u_statistic)
    }
}

/// Largest pooled sample size for which the p-value is enumerated exactly.
pub const EXACT_LIMIT: usize = 12;

fn check(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.is_empty() || y.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::Numeric("non-finite sample value".into()));
    }
    Ok(())
}

/// Midranks of the pooled sample `x ++ y`, plus the tie-group sizes.
fn midranks(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        // ranks i+1..=j averaged
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        ties.push(j - i);
        i = j;
    }
    (ranks, ties)
}

fn u_from_rank_sum(rank_sum: f64, n1: usize) -> f64 {
    rank_sum - (n1 * (n1 + 1)) as f64 / 2.0
}

/// `P(X > Y) + P(X = Y) / 2` over all cross-sample pairs.
pub fn auc_effect(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check(x, y)?;
    let (ranks, _) = midranks(x, y);
    let u = u_from_rank_sum(ranks[..x.len()].iter().sum(), x.len());
    Ok(u / (x.len() * y.len()) as f64)
}

/// Normal-approximation two-sided p-value with tie-corrected variance and a
/// 0.5 continuity correction.
pub fn mwu_normal_p(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check(x, y)?;
    let (ranks, ties) = midranks(x, y);
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let n = n1 + n2;
    let u = u_from_rank_sum(ranks[..x.len()].iter().sum(), x.len());
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(1.0);
    }
    let dev = ((u - n1 * n2 / 2.0).abs() - 0.5).max(0.0);
    let z = dev / var.sqrt();
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    Ok((2.0 * std.sf(z)).min(1.0))
}

/// Exact two-sided p-value: the share of all `C(n1+n2, n1)` reassignments of
/// the observed midranks to group 1 whose U lies at least as far from its
/// mean as the observed U.
pub fn mwu_exact_p(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check(x, y)?;
    let (ranks, _) = midranks(x, y);
    let (n1, n2) = (x.len(), y.len());
    let n = n1 + n2;
    if n > 30 {
        return Err(StatsError::Numeric(format!("exact enumeration over {n} values is infeasible")));
    }
    let centre = (n1 * n2) as f64 / 2.0;
    let observed = (u_from_rank_sum(ranks[..n1].iter().sum(), n1) - centre).abs();
    let (mut hits, mut total) = (0u64, 0u64);
    // Every n1-subset of positions, as a bitmask.
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        let rank_sum: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        let dev = (u_from_rank_sum(rank_sum, n1) - centre).abs();
        total += 1;
        if dev >= observed - 1e-9 {
            hits += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}

/// U statistic, AUC and two-sided p-value for `x` against `y`. The p-value is
/// exact when `n1 + n2 <= 12` and normal-approximated otherwise.
pub fn mann_whitney_u(x: &[f64], y: &[f64]) -> Result<GroupTestResult, StatsError> {
    check(x, y)?;
    let (ranks, _) = midranks(x, y);
    let u = u_from_rank_sum(ranks[..x.len()].iter().sum(), x.len());
    let exact = x.len() + y.len() <= EXACT_LIMIT;
    let p_value = if exact { mwu_exact_p(x, y)? } else { mwu_normal_p(x, y)? };
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    Ok(GroupTestResult {
        u_statistic: u,
        p_value,
        auc: u / (x.len() * y.len()) as f64,
        group_means: (mean(x), mean(y)),
        n: (x.len(), y.len()),
        exact,
    })
}
