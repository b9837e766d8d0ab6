//! Cross-field fairness test.
//!
//! Sort all journals by an indicator and take the top `z`%. If the
//! indicator is fair, the number of journals of a cluster of size `N_g` in
//! that set follows the hypergeometric law with population `N` and
//! `n_z = ⌊zN/100⌋` draws. Each cluster's observed count is checked against
//! the central interval of that law.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exec::{derive_seed, Execution};
use crate::indicators::IndicatorTable;
use crate::model::{ClusterId, JournalId, Partition};
use crate::stats::{top_count, top_fraction, Hypergeometric, StatsError};

#[derive(Debug, Error, PartialEq)]
pub enum FairnessError {
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("cluster `{0}` has no DEFINED values")]
    EmptyCluster(ClusterId),
    #[error("journal `{0}` is not assigned to any cluster")]
    Unassigned(JournalId),
    #[error("reports are not comparable: {0}")]
    Mismatch(String),
    #[error("calibration needs at least one trial and one cluster")]
    NoTrials,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterFairness {
    pub cluster_id: ClusterId,
    pub name: String,
    /// `N_g`: journals of the cluster with DEFINED values.
    pub size: usize,
    /// `m_g`: members in the top set.
    pub members: usize,
    pub pct: f64,
    pub expected_pct: f64,
    pub ci_counts: (u64, u64),
    pub ci_pct: (f64, f64),
    pub within_ci: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PercentageSummary {
    /// Unweighted mean over clusters.
    pub mean_pct: f64,
    /// Sample standard deviation (n − 1); `None` for a single cluster.
    pub sd_pct: Option<f64>,
    /// `Σ_g |pct_g − z|`.
    pub sum_abs_dev: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    #[serde(flatten)]
    pub percentages: PercentageSummary,
    pub clusters_within_ci: usize,
    pub all_within_ci: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FairnessReport {
    pub indicator: String,
    pub z: f64,
    pub ci_level: f64,
    /// `N`: journals with DEFINED values.
    pub population: usize,
    pub n_z: usize,
    pub clusters: Vec<ClusterFairness>,
    pub summary: Summary,
}

/// Mean, sample sd and summed absolute deviation from `z` of per-cluster
/// percentages.
pub fn summarize_percentages(pcts: &[f64], z: f64) -> PercentageSummary {
    let n = pcts.len() as f64;
    let mean_pct = pcts.iter().sum::<f64>() / n;
    let sd_pct = (pcts.len() > 1).then(|| {
        let ss: f64 = pcts.iter().map(|p| (p - mean_pct).powi(2)).sum();
        (ss / (n - 1.0)).sqrt()
    });
    PercentageSummary {
        mean_pct,
        sd_pct,
        sum_abs_dev: pcts.iter().map(|p| (p - z).abs()).sum(),
    }
}

/// Intervals for a fixed cluster-size profile; shared by the test and the
/// calibration loop.
struct Frame {
    z: f64,
    level: f64,
    sizes: Vec<usize>,
    n_z: usize,
    laws: Vec<Hypergeometric>,
    intervals: Vec<(u64, u64)>,
}

impl Frame {
    fn new(sizes: Vec<usize>, z: f64, level: f64) -> Result<Self, FairnessError> {
        let population: usize = sizes.iter().sum();
        let n_z = top_count(population, z)?;
        let laws = sizes
            .iter()
            .map(|&s| Hypergeometric::new(population as u64, s as u64, n_z as u64))
            .collect::<Result<Vec<_>, _>>()?;
        let intervals = laws
            .iter()
            .map(|h| h.central_interval(level))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            z,
            level,
            sizes,
            n_z,
            laws,
            intervals,
        })
    }

    fn within(&self, g: usize, members: usize) -> bool {
        let (lo, hi) = self.intervals[g];
        (lo..=hi).contains(&(members as u64))
    }

    fn report(&self, indicator: &str, clusters: &[(ClusterId, String)], members: &[usize]) -> FairnessReport {
        let rows: Vec<ClusterFairness> = clusters
            .iter()
            .enumerate()
            .map(|(g, (id, name))| {
                let size = self.sizes[g];
                let pct = |m: f64| 100.0 * m / size as f64;
                let (lo, hi) = self.intervals[g];
                ClusterFairness {
                    cluster_id: id.clone(),
                    name: name.clone(),
                    size,
                    members: members[g],
                    pct: pct(members[g] as f64),
                    expected_pct: self.z,
                    ci_counts: (lo, hi),
                    ci_pct: (pct(lo as f64), pct(hi as f64)),
                    within_ci: self.within(g, members[g]),
                }
            })
            .collect();
        let pcts: Vec<f64> = rows.iter().map(|r| r.pct).collect();
        let clusters_within_ci = rows.iter().filter(|r| r.within_ci).count();
        FairnessReport {
            indicator: indicator.to_owned(),
            z: self.z,
            ci_level: self.level,
            population: self.sizes.iter().sum(),
            n_z: self.n_z,
            summary: Summary {
                percentages: summarize_percentages(&pcts, self.z),
                clusters_within_ci,
                all_within_ci: clusters_within_ci == rows.len(),
            },
            clusters: rows,
        }
    }
}

/// Runs the fairness test of `table` over `partition` for the top `z`%,
/// with `ci_level` central intervals.
pub fn fairness_test(
    table: &IndicatorTable,
    partition: &Partition,
    z: f64,
    ci_level: f64,
) -> Result<FairnessReport, FairnessError> {
    let clusters = partition.clusters();
    let mut sizes = vec![0usize; clusters.len()];
    for (j, _) in table.defined() {
        let g = partition
            .cluster_of(j.as_str())
            .ok_or_else(|| FairnessError::Unassigned(j.clone()))?;
        sizes[g] += 1;
    }
    if let Some(g) = sizes.iter().position(|&s| s == 0) {
        return Err(FairnessError::EmptyCluster(clusters[g].id.clone()));
    }
    let frame = Frame::new(sizes, z, ci_level)?;
    let selection = top_fraction(table, z)?;
    let mut members = vec![0usize; clusters.len()];
    for j in &selection.selected {
        if let Some(g) = partition.cluster_of(j.as_str()) {
            members[g] += 1;
        }
    }
    let labels: Vec<(ClusterId, String)> =
        clusters.iter().map(|c| (c.id.clone(), c.name.clone())).collect();
    Ok(frame.report(table.id(), &labels, &members))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    First,
    Second,
    Tie,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    First,
    Second,
    Tie,
    /// The criteria disagree.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub first: String,
    pub second: String,
    /// Smaller `Σ|pct − z|` wins.
    pub sum_abs_dev: Verdict,
    /// Smaller standard deviation wins.
    pub sd_pct: Verdict,
    /// More clusters inside their interval wins.
    pub within_ci: Verdict,
    pub overall: Overall,
}

fn smaller(a: f64, b: f64) -> Verdict {
    if a < b {
        Verdict::First
    } else if b < a {
        Verdict::Second
    } else {
        Verdict::Tie
    }
}

/// Compares two reports over the same partition and `z`. The overall
/// ordering is decided only when no criterion favours the other side.
pub fn compare_reports(a: &FairnessReport, b: &FairnessReport) -> Result<Comparison, FairnessError> {
    if a.z != b.z {
        return Err(FairnessError::Mismatch(format!("z {} vs {}", a.z, b.z)));
    }
    let ids = |r: &FairnessReport| r.clusters.iter().map(|c| c.cluster_id.clone()).collect::<Vec<_>>();
    if ids(a) != ids(b) {
        return Err(FairnessError::Mismatch("different cluster partitions".into()));
    }
    let (pa, pb) = (a.summary.percentages, b.summary.percentages);
    let sum_abs_dev = smaller(pa.sum_abs_dev, pb.sum_abs_dev);
    let sd_pct = match (pa.sd_pct, pb.sd_pct) {
        (Some(x), Some(y)) => smaller(x, y),
        _ => Verdict::Tie,
    };
    let within_ci = smaller(
        -(a.summary.clusters_within_ci as f64),
        -(b.summary.clusters_within_ci as f64),
    );
    let verdicts = [sum_abs_dev, sd_pct, within_ci];
    let firsts = verdicts.iter().filter(|v| **v == Verdict::First).count();
    let seconds = verdicts.iter().filter(|v| **v == Verdict::Second).count();
    let overall = match (firsts, seconds) {
        (0, 0) => Overall::Tie,
        (_, 0) => Overall::First,
        (0, _) => Overall::Second,
        _ => Overall::Mixed,
    };
    Ok(Comparison {
        first: a.indicator.clone(),
        second: b.indicator.clone(),
        sum_abs_dev,
        sd_pct,
        within_ci,
        overall,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub z: f64,
    pub ci_level: f64,
    pub n_z: usize,
    pub intervals: Vec<(u64, u64)>,
    /// Probability mass of each interval under the hypergeometric law.
    pub exact_coverage: Vec<f64>,
    /// Share of trials in which each cluster fell inside its interval.
    pub coverage: Vec<f64>,
}

/// Monte Carlo coverage of the fairness intervals under a fair indicator
/// (i.i.d. uniform values), per cluster.
pub fn calibration(
    sizes: &[usize],
    trials: usize,
    z: f64,
    ci_level: f64,
    seed: u64,
) -> Result<Calibration, FairnessError> {
    calibration_with(sizes, trials, z, ci_level, seed, Execution::default())
}

pub fn calibration_with(
    sizes: &[usize],
    trials: usize,
    z: f64,
    ci_level: f64,
    seed: u64,
    exec: Execution,
) -> Result<Calibration, FairnessError> {
    if trials == 0 || sizes.is_empty() {
        return Err(FairnessError::NoTrials);
    }
    let frame = Frame::new(sizes.to_vec(), z, ci_level)?;
    let owner: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(g, &s)| std::iter::repeat_n(g, s))
        .collect();

    let hits = exec.map_range(trials, |trial| {
        let members = fair_trial(&owner, sizes.len(), frame.n_z, derive_seed(seed, trial as u64));
        members
            .iter()
            .enumerate()
            .map(|(g, &m)| frame.within(g, m))
            .collect::<Vec<bool>>()
    });
    let mut inside = vec![0usize; sizes.len()];
    for trial in &hits {
        for (count, &ok) in inside.iter_mut().zip(trial) {
            *count += usize::from(ok);
        }
    }
    Ok(Calibration {
        sizes: sizes.to_vec(),
        trials,
        z,
        ci_level,
        n_z: frame.n_z,
        exact_coverage: frame
            .laws
            .iter()
            .zip(&frame.intervals)
            .map(|(h, &(lo, hi))| h.interval_mass(lo, hi))
            .collect(),
        intervals: frame.intervals,
        coverage: inside.iter().map(|&c| c as f64 / trials as f64).collect(),
    })
}

/// Draws one uniform value per journal and counts, per cluster, the journals
/// among the `n_z` largest (ties to the lower index).
fn fair_trial(owner: &[usize], clusters: usize, n_z: usize, seed: u64) -> Vec<usize> {
    let values = fair_values(owner.len(), seed);
    let mut order: Vec<usize> = (0..owner.len()).collect();
    let by_rank = |a: &usize, b: &usize| values[*b].total_cmp(&values[*a]).then(a.cmp(b));
    if n_z < order.len() {
        order.select_nth_unstable_by(n_z, by_rank);
    }
    let mut members = vec![0usize; clusters];
    for &i in &order[..n_z] {
        members[owner[i]] += 1;
    }
    members
}

pub(crate) fn fair_values(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random::<f64>()).collect()
}

fn label(c: &ClusterFairness) -> String {
    format!("{}. {}", c.cluster_id, c.name)
}

fn format_z(z: f64) -> String {
    if z.fract() == 0.0 {
        format!("{z:.0}")
    } else {
        format!("{z}")
    }
}

/// Writes reports side by side in the shape of a percentages table: a
/// header, one row per cluster (2 decimals), a `Mean (± st.dev.)` row and a
/// `Σ|x−z|` row.
pub fn write_percentage_table<W: Write>(reports: &[&FairnessReport], mut w: W) -> io::Result<()> {
    let Some(first) = reports.first() else {
        return Ok(());
    };
    write!(w, "Cluster")?;
    for r in reports {
        write!(w, "\t{}", r.indicator)?;
    }
    writeln!(w)?;
    for (g, c) in first.clusters.iter().enumerate() {
        write!(w, "{}", label(c))?;
        for r in reports {
            write!(w, "\t{:.2}", r.clusters[g].pct)?;
        }
        writeln!(w)?;
    }
    write!(w, "Mean (± st.dev.)")?;
    for r in reports {
        let p = r.summary.percentages;
        match p.sd_pct {
            Some(sd) => write!(w, "\t{:.2} (± {sd:.2})", p.mean_pct)?,
            None => write!(w, "\t{:.2} (± NA)", p.mean_pct)?,
        }
    }
    writeln!(w)?;
    write!(w, "Σ|x−{}|", format_z(first.z))?;
    for r in reports {
        write!(w, "\t{:.2}", r.summary.percentages.sum_abs_dev)?;
    }
    writeln!(w)?;
    w.flush()
}

/// Per-cluster detail rows: counts, percentages and interval bounds.
pub fn write_interval_table<W: Write>(report: &FairnessReport, mut w: W) -> io::Result<()> {
    writeln!(
        w,
        "cluster_id\tcluster_name\tsize\tmembers\tpct\tci_lo\tci_hi\tci_lo_pct\tci_hi_pct\twithin_ci"
    )?;
    for c in &report.clusters {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{:.2}\t{}\t{}\t{:.2}\t{:.2}\t{}",
            c.cluster_id,
            c.name,
            c.size,
            c.members,
            c.pct,
            c.ci_counts.0,
            c.ci_counts.1,
            c.ci_pct.0,
            c.ci_pct.1,
            c.within_ci
        )?;
    }
    w.flush()
}
