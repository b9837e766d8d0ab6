use serde::Serialize;

use super::StatsError;
use crate::indicators::IndicatorTable;
use crate::model::{ClusterId, Partition};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupMean {
    pub cluster: ClusterId,
    pub count: usize,
    pub mean: f64,
}

/// One-way sum-of-squares decomposition of DEFINED values by cluster.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceDecomposition {
    pub count: usize,
    pub ss_total: f64,
    pub ss_between: f64,
    pub ss_within: f64,
    /// Clusters with at least one DEFINED value, in partition order.
    pub group_means: Vec<GroupMean>,
    pub grand_mean: f64,
    /// `SS_b / SS_tot`; `None` when `SS_tot = 0`.
    pub eta_squared: Option<f64>,
}

impl VarianceDecomposition {
    /// Decomposes pre-grouped values. Groups with no values are skipped.
    pub fn from_groups(groups: &[(ClusterId, Vec<f64>)]) -> Result<Self, StatsError> {
        let count: usize = groups.iter().map(|(_, v)| v.len()).sum();
        if count < 2 {
            return Err(StatsError::TooFewValues {
                needed: 2,
                got: count,
            });
        }
        let grand_mean =
            groups.iter().flat_map(|(_, v)| v.iter()).sum::<f64>() / count as f64;
        let mut group_means = Vec::new();
        let (mut ss_total, mut ss_between, mut ss_within) = (0.0, 0.0, 0.0);
        for (cluster, values) in groups {
            if values.is_empty() {
                continue;
            }
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            ss_between += n * (mean - grand_mean).powi(2);
            for &x in values {
                ss_total += (x - grand_mean).powi(2);
                ss_within += (x - mean).powi(2);
            }
            group_means.push(GroupMean {
                cluster: cluster.clone(),
                count: values.len(),
                mean,
            });
        }
        Ok(Self {
            count,
            ss_total,
            ss_between,
            ss_within,
            group_means,
            grand_mean,
            eta_squared: (ss_total > 0.0).then(|| ss_between / ss_total),
        })
    }
}

pub fn variance_decomposition(
    table: &IndicatorTable,
    partition: &Partition,
) -> Result<VarianceDecomposition, StatsError> {
    let mut groups: Vec<(ClusterId, Vec<f64>)> = partition
        .clusters()
        .iter()
        .map(|c| (c.id.clone(), Vec::new()))
        .collect();
    for (j, v) in table.defined() {
        let g = partition
            .cluster_of(j.as_str())
            .ok_or_else(|| StatsError::Unassigned(j.clone()))?;
        groups[g].1.push(v);
    }
    VarianceDecomposition::from_groups(&groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn groups(data: &[&[f64]]) -> Vec<(ClusterId, Vec<f64>)> {
        data.iter()
            .enumerate()
            .map(|(i, v)| (ClusterId::from(format!("g{i}")), v.to_vec()))
            .collect()
    }

    #[test]
    fn two_separated_groups() {
        let d = VarianceDecomposition::from_groups(&groups(&[&[1.0, 1.0], &[3.0, 3.0]])).unwrap();
        assert_eq!(d.grand_mean, 2.0);
        assert_eq!(d.ss_between, 4.0);
        assert_eq!(d.ss_within, 0.0);
        assert_eq!(d.ss_total, 4.0);
        assert_eq!(d.eta_squared, Some(1.0));
    }

    #[test]
    fn constant_values() {
        let d = VarianceDecomposition::from_groups(&groups(&[&[2.5, 2.5], &[2.5]])).unwrap();
        assert_eq!((d.ss_total, d.ss_between, d.ss_within), (0.0, 0.0, 0.0));
        assert_eq!(d.eta_squared, None);
    }

    #[test]
    fn textbook_anova() {
        // Groups {1,2,3}, {4,5,6}: grand mean 3.5, SS_b = 13.5, SS_w = 4.
        let d = VarianceDecomposition::from_groups(&groups(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]))
            .unwrap();
        assert!((d.ss_between - 13.5).abs() < 1e-12);
        assert!((d.ss_within - 4.0).abs() < 1e-12);
        assert!((d.ss_total - 17.5).abs() < 1e-12);
    }

    #[test]
    fn needs_two_values() {
        assert!(VarianceDecomposition::from_groups(&groups(&[&[1.0], &[]])).is_err());
    }
}
