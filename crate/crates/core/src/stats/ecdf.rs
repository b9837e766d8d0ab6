use serde::Serialize;

use super::StatsError;
use crate::indicators::IndicatorTable;
use crate::model::{ClusterId, Partition};

/// Right-continuous step points `(value, F(value))`, one per distinct value,
/// ascending. The last fraction is exactly 1.
pub fn ecdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, x) in v.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *x => last.1 = frac,
            _ => out.push((*x, frac)),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupEcdf {
    pub cluster: ClusterId,
    pub name: String,
    pub count: usize,
    pub points: Vec<(f64, f64)>,
}

/// One ECDF per cluster over its DEFINED values, in partition order.
pub fn ecdf_by_group(
    table: &IndicatorTable,
    partition: &Partition,
) -> Result<Vec<GroupEcdf>, StatsError> {
    let clusters = partition.clusters();
    let mut groups = vec![Vec::new(); clusters.len()];
    for (j, v) in table.defined() {
        let g = partition
            .cluster_of(j.as_str())
            .ok_or_else(|| StatsError::Unassigned(j.clone()))?;
        groups[g].push(v);
    }
    clusters
        .iter()
        .zip(groups)
        .map(|(c, values)| {
            if values.is_empty() {
                return Err(StatsError::EmptyCluster(c.id.clone()));
            }
            Ok(GroupEcdf {
                cluster: c.id.clone(),
                name: c.name.clone(),
                count: values.len(),
                points: ecdf(&values),
            })
        })
        .collect()
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    // Past the end of one sample the other's ECDF can only approach 1.
    Ok(d)
}
