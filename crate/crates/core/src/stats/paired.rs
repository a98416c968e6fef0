use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::{check_pairs, differences, Method, StatsError, TestResult};

/// Largest number of non-zero pairs that gets the exact signed-rank
/// distribution; larger samples use the normal approximation.
pub const EXACT_MAX_N: usize = 12;

/// Two-sided paired t-test on `a[i] - b[i]`.
pub fn paired_t(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    check_pairs(a, b)?;
    let d = differences(a, b);
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if sd <= f64::EPSILON * mean.abs().max(1.0) {
        return Err(StatsError::DegenerateDifferences);
    }
    let t = mean / (sd / n.sqrt());
    let df = d.len() - 1;
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df ≥ 2");
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(TestResult {
        method: Method::PairedT,
        statistic: t,
        p,
        z: None,
        effect_r: None,
        df: Some(df),
        n: d.len(),
    })
}

/// Tolerance for treating two absolute differences as tied.
fn tied(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0)
}

/// Mid-ranks of `values` (1-based), doubled so they are integers, plus the
/// tie group sizes.
fn doubled_midranks(values: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0u64; values.len()];
    let mut groups = Vec::new();
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && tied(values[idx[end]], values[idx[start]]) {
            end += 1;
        }
        // positions start+1 ..= end, mean doubled = start + 1 + end
        let r2 = (start + 1 + end) as u64;
        for &i in &idx[start..end] {
            ranks[i] = r2;
        }
        groups.push(end - start);
        start = end;
    }
    (ranks, groups)
}

/// Two-sided Wilcoxon signed-rank test on `a[i] - b[i]`.
///
/// Zero differences are dropped and tied magnitudes share mid-ranks. The
/// statistic T is the smaller of the positive and negative rank sums. For
/// up to [`EXACT_MAX_N`] remaining pairs the p-value is exact,
/// `min(1, 2 P(W+ ≤ T))` under the sign-flip distribution of the observed
/// ranks; beyond that it uses the normal approximation with tie and
/// continuity corrections. `z` always comes from the approximation and
/// `effect_r = |z| / sqrt(N)`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    check_pairs(a, b)?;
    let d: Vec<f64> = differences(a, b)
        .into_iter()
        .filter(|x| !tied(*x, 0.0))
        .collect();
    if d.is_empty() {
        return Err(StatsError::AllZeroDifferences);
    }
    let n = d.len();
    let magnitudes: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let (ranks2, groups) = doubled_midranks(&magnitudes);
    let plus2: u64 = d.iter().zip(&ranks2).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
    let total2: u64 = ranks2.iter().sum();
    let t2 = plus2.min(total2 - plus2);
    let t = t2 as f64 / 2.0;

    let nf = n as f64;
    let mu = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = groups
        .iter()
        .map(|&g| {
            let g = g as f64;
            g * g * g - g
        })
        .sum::<f64>()
        / 48.0;
    let sigma = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term).sqrt();
    let z = if sigma > 0.0 {
        ((t - mu + 0.5).min(0.0)) / sigma
    } else {
        0.0
    };

    let p = if n <= EXACT_MAX_N {
        exact_lower_tail(&ranks2, t2)
    } else {
        Normal::standard().cdf(z)
    };
    Ok(TestResult {
        method: Method::Wilcoxon,
        statistic: t,
        p: (2.0 * p).min(1.0),
        z: Some(z),
        effect_r: Some(z.abs() / nf.sqrt()),
        df: None,
        n,
    })
}

/// P(W+ ≤ t2 / 2) when each doubled rank is added with probability ½.
fn exact_lower_tail(ranks2: &[u64], t2: u64) -> f64 {
    let total: u64 = ranks2.iter().sum();
    let mut counts = vec![0f64; total as usize + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in ranks2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let hits: f64 = counts[..=t2 as usize].iter().sum();
    hits / 2f64.powi(ranks2.len() as i32)
}
