use serde::Serialize;

use super::StatsError;
use crate::indicators::IndicatorTable;
use crate::model::JournalId;

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// Sample Pearson correlation; `None` when either variable is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewPairs(x.len()));
    }
    if is_constant(x) || is_constant(y) {
        return Ok(None);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    // sqrt(s·s) == s in IEEE arithmetic, so identical inputs give exactly 1.
    Ok(Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)))
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Option<f64>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Journals DEFINED in both tables (pairwise deletion), in id order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Paired {
    pub journals: Vec<JournalId>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

pub fn paired_values(a: &IndicatorTable, b: &IndicatorTable) -> Paired {
    let mut out = Paired::default();
    for (j, x) in a.defined() {
        if let Some(Some(y)) = b.get(j.as_str()) {
            out.journals.push(j.clone());
            out.x.push(x);
            out.y.push(y);
        }
    }
    out
}

/// Sizes of `k` contiguous bins over `n` items: `⌊n/k⌋` each, with the
/// remainder handed one apiece to the leading bins.
pub fn decile_bin_sizes(n: usize, k: usize) -> Vec<usize> {
    let (base, extra) = (n / k, n % k);
    (0..k).map(|i| base + usize::from(i < extra)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecileBin {
    /// 1 is the top bin.
    pub bin: usize,
    pub size: usize,
    pub baseline_max: f64,
    pub baseline_min: f64,
    /// Spearman within the bin; `None` when either variable is constant
    /// there or the bin holds a single journal.
    pub rho: Option<f64>,
}

/// Sorts the shared support by `baseline` (descending, ties by id), cuts it
/// into `k` bins and correlates the two indicators inside each bin.
pub fn decile_correlations(
    baseline: &IndicatorTable,
    other: &IndicatorTable,
    k: usize,
) -> Result<Vec<DecileBin>, StatsError> {
    if k < 2 {
        return Err(StatsError::InvalidBins(k));
    }
    let paired = paired_values(baseline, other);
    let n = paired.x.len();
    if n < k {
        return Err(StatsError::SupportTooSmall {
            support: n,
            bins: k,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        paired.x[b]
            .total_cmp(&paired.x[a])
            .then_with(|| paired.journals[a].cmp(&paired.journals[b]))
    });
    let mut bins = Vec::with_capacity(k);
    let mut start = 0;
    for (i, size) in decile_bin_sizes(n, k).into_iter().enumerate() {
        let idx = &order[start..start + size];
        start += size;
        let x: Vec<f64> = idx.iter().map(|&i| paired.x[i]).collect();
        let y: Vec<f64> = idx.iter().map(|&i| paired.y[i]).collect();
        bins.push(DecileBin {
            bin: i + 1,
            size,
            baseline_max: x[0],
            baseline_min: x[size - 1],
            rho: spearman(&x, &y).ok().flatten(),
        });
    }
    Ok(bins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_relations() {
        let x = [1.0, 2.0, 3.5, 4.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &y).unwrap().unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&x, &neg).unwrap().unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&x, &x).unwrap(), Some(1.0));
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(pearson(&[1.0, 2.0], &[3.0, 3.0]), Ok(None));
        assert_eq!(pearson(&[1.0], &[3.0]), Err(StatsError::TooFewPairs(1)));
        assert!(pearson(&[1.0, 2.0], &[3.0]).is_err());
        let c = [0.1, 0.1, 0.1];
        assert_eq!(pearson(&c, &[1.0, 2.0, 3.0]), Ok(None));
    }

    #[test]
    fn tied_ranks() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 3.0]), [1.0, 2.5, 2.5, 4.0]);
        assert_eq!(average_ranks(&[5.0, 5.0, 5.0]), [2.0, 2.0, 2.0]);
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]), [3.0, 1.0, 2.0]);
    }

    #[test]
    fn spearman_is_rank_invariant() {
        let x = [0.3, 1.2, 0.5, 4.0, 2.2, 0.9];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.exp() * 10.0).collect();
        assert_eq!(spearman(&x, &y).unwrap(), Some(1.0));
    }

    #[test]
    fn bin_sizes() {
        assert_eq!(decile_bin_sizes(25, 10), [3, 3, 3, 3, 3, 2, 2, 2, 2, 2]);
        assert_eq!(decile_bin_sizes(20, 10), [2; 10]);
        assert_eq!(decile_bin_sizes(3, 2), [2, 1]);
    }

    fn table(id: &str, values: &[f64]) -> IndicatorTable {
        let names: Vec<String> = (0..values.len()).map(|i| format!("j{i:02}")).collect();
        IndicatorTable::from_values(
            id,
            names.iter().map(|n| n.as_str()).zip(values.iter().map(|v| Some(*v))),
        )
    }

    #[test]
    fn deciles_of_identical_tables() {
        let v: Vec<f64> = (0..25).map(|i| ((i * 7) % 25) as f64).collect();
        let bins = decile_correlations(&table("a", &v), &table("b", &v), 10).unwrap();
        let sizes: Vec<usize> = bins.iter().map(|b| b.size).collect();
        assert_eq!(sizes, [3, 3, 3, 3, 3, 2, 2, 2, 2, 2]);
        assert!(bins.iter().all(|b| b.rho == Some(1.0)));
        assert_eq!(bins[0].baseline_max, 24.0);
    }

    #[test]
    fn deciles_against_constant() {
        let v: Vec<f64> = (0..20).map(f64::from).collect();
        let bins = decile_correlations(&table("a", &v), &table("b", &[4.0; 20]), 10).unwrap();
        assert!(bins.iter().all(|b| b.rho.is_none()));
    }

    #[test]
    fn decile_errors() {
        let v = [1.0, 2.0, 3.0];
        assert_eq!(
            decile_correlations(&table("a", &v), &table("b", &v), 4),
            Err(StatsError::SupportTooSmall { support: 3, bins: 4 })
        );
        assert_eq!(
            decile_correlations(&table("a", &v), &table("b", &v), 1),
            Err(StatsError::InvalidBins(1))
        );
    }

    #[test]
    fn pairwise_deletion() {
        let a = IndicatorTable::from_values("a", [("x", Some(1.0)), ("y", None), ("z", Some(3.0))]);
        let b = IndicatorTable::from_values("b", [("x", Some(2.0)), ("y", Some(1.0)), ("w", Some(3.0))]);
        let p = paired_values(&a, &b);
        assert_eq!(p.journals, vec![JournalId::from("x")]);
        assert_eq!((p.x, p.y), (vec![1.0], vec![2.0]));
    }
}
