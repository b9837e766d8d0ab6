//! Journal indicators (impact factors, total cites, c/p ratios and their
//! numerators) under integer or fractional counting, plus per-cluster
//! mean rescaling.
//!
//! Fractional counting weights each citation by `1 / n_refs` of the citing
//! paper. Denominators (citable items) are the same in both modes.

mod table;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::model::{CitationEvent, ClusterId, Dataset, JournalId, Partition};

pub use table::{
    rank_table, read_table, write_table, Counting, IndicatorKind, IndicatorTable,
    Normalization, RankOrder, RankedEntry, RescaleBasis, TableMeta, Window, UNDEFINED,
};

/// Events summed per work unit; fixed so results do not depend on the
/// thread count.
const EVENT_CHUNK: usize = 1 << 16;

#[derive(Debug, Error, PartialEq)]
pub enum IndicatorError {
    #[error("{kind} cannot use window `{window}`")]
    InvalidSpec { kind: IndicatorKind, window: Window },
    #[error("journal `{0}` is not assigned to any cluster")]
    JournalNotInPartition(JournalId),
    #[error("cluster `{0}` has no DEFINED values to average")]
    NoDefinedValues(ClusterId),
    #[error("cluster `{0}` has a mean of zero and cannot be rescaled")]
    ZeroMean(ClusterId),
    #[error("line {line}: {message}")]
    TableFormat { line: usize, message: String },
}

/// Which indicator to compute from citation events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndicatorSpec {
    kind: IndicatorKind,
    window: Window,
    counting: Counting,
}

impl IndicatorSpec {
    pub fn new(
        kind: IndicatorKind,
        window: Window,
        counting: Counting,
    ) -> Result<Self, IndicatorError> {
        let ok = match kind {
            IndicatorKind::ImpactFactor | IndicatorKind::NumeratorOnly => {
                matches!(window, Window::Two | Window::Five)
            }
            IndicatorKind::TotalCites | IndicatorKind::CpRatio => window == Window::AllPrior,
            IndicatorKind::External => false,
        };
        if ok {
            Ok(Self {
                kind,
                window,
                counting,
            })
        } else {
            Err(IndicatorError::InvalidSpec { kind, window })
        }
    }

    pub fn impact_factor(years: Window, counting: Counting) -> Result<Self, IndicatorError> {
        Self::new(IndicatorKind::ImpactFactor, years, counting)
    }

    pub fn kind(&self) -> IndicatorKind {
        self.kind
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn counting(&self) -> Counting {
        self.counting
    }

    /// Short tag such as `IF2-FC`, `TC-IC5` or `CP-IC`.
    pub fn id(&self) -> String {
        let mode = match self.counting {
            Counting::Integer => "IC",
            Counting::Fractional => "FC",
        };
        let years = self.window.years().unwrap_or(0);
        match self.kind {
            IndicatorKind::ImpactFactor => format!("IF{years}-{mode}"),
            IndicatorKind::NumeratorOnly => format!("TC-{mode}{years}"),
            IndicatorKind::TotalCites => format!("TC-{mode}"),
            IndicatorKind::CpRatio => format!("CP-{mode}"),
            IndicatorKind::External => unreachable!("external specs are rejected by new"),
        }
    }

    /// Every indicator computable from citation events: IF2, IF5, total
    /// cites, the two IF numerators and c/p, each integer and fractional.
    pub fn catalog() -> Vec<IndicatorSpec> {
        let shapes = [
            (IndicatorKind::ImpactFactor, Window::Two),
            (IndicatorKind::ImpactFactor, Window::Five),
            (IndicatorKind::TotalCites, Window::AllPrior),
            (IndicatorKind::NumeratorOnly, Window::Two),
            (IndicatorKind::NumeratorOnly, Window::Five),
            (IndicatorKind::CpRatio, Window::AllPrior),
        ];
        shapes
            .into_iter()
            .flat_map(|(kind, window)| {
                [Counting::Integer, Counting::Fractional].map(|counting| Self {
                    kind,
                    window,
                    counting,
                })
            })
            .collect()
    }

    fn counts(&self, e: &CitationEvent, census_year: i32) -> bool {
        e.citing_year == census_year
            && match self.window.years() {
                Some(w) => e.cited_year >= census_year - w && e.cited_year < census_year,
                None => true,
            }
    }

    fn weight(&self, e: &CitationEvent) -> f64 {
        match self.counting {
            Counting::Integer => 1.0,
            Counting::Fractional => e.fractional_weight(),
        }
    }
}

impl fmt::Display for IndicatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Citations in the census year to the journal's items of the window years
/// (integer), or the sum of `1/n_refs` over the same events (fractional).
/// Total-cites and c/p specs count every cited year.
pub fn if_numerator(dataset: &Dataset, journal: &str, spec: &IndicatorSpec) -> f64 {
    let t = dataset.census_year();
    dataset
        .events()
        .iter()
        .filter(|e| e.cited_journal.as_str() == journal && spec.counts(e, t))
        .map(|e| spec.weight(e))
        .sum()
}

/// Citable items over the `window` years before the census year; missing
/// years count as zero.
pub fn if_denominator(dataset: &Dataset, journal: &str, window: Window) -> u64 {
    let t = dataset.census_year();
    let first = t - window.years().unwrap_or(0);
    dataset
        .publications()
        .iter()
        .filter(|p| p.journal.as_str() == journal && p.year >= first && p.year < t)
        .map(|p| p.citable_items)
        .sum()
}

pub fn compute_table(dataset: &Dataset, spec: &IndicatorSpec) -> IndicatorTable {
    compute_table_with(dataset, spec, Execution::default())
}

pub fn compute_table_with(
    dataset: &Dataset,
    spec: &IndicatorSpec,
    exec: Execution,
) -> IndicatorTable {
    let t = dataset.census_year();
    let index = dataset.journal_index();
    let n = dataset.journals().len();

    let partials = exec.map_chunks(dataset.events(), EVENT_CHUNK, |chunk| {
        let mut acc = vec![0.0f64; n];
        for e in chunk {
            if spec.counts(e, t) {
                if let Some(&i) = index.get(e.cited_journal.as_str()) {
                    acc[i] += spec.weight(e);
                }
            }
        }
        acc
    });
    let mut numerators = vec![0.0f64; n];
    for part in &partials {
        for (total, x) in numerators.iter_mut().zip(part) {
            *total += x;
        }
    }

    let denominators: Option<Vec<u64>> = match spec.kind {
        IndicatorKind::ImpactFactor | IndicatorKind::CpRatio => {
            let (first, last) = match spec.window.years() {
                Some(w) => (t - w, t - 1),
                None => (t, t),
            };
            let mut d = vec![0u64; n];
            for p in dataset.publications() {
                if (first..=last).contains(&p.year) {
                    if let Some(&i) = index.get(p.journal.as_str()) {
                        d[i] += p.citable_items;
                    }
                }
            }
            Some(d)
        }
        _ => None,
    };

    let values = dataset
        .journals()
        .iter()
        .enumerate()
        .map(|(i, j)| {
            let v = match &denominators {
                Some(d) if d[i] == 0 => None,
                Some(d) => Some(numerators[i] / d[i] as f64),
                None => Some(numerators[i]),
            };
            (j.id.clone(), v)
        })
        .collect();

    IndicatorTable::new(
        TableMeta {
            id: spec.id(),
            kind: spec.kind,
            window: spec.window,
            counting: spec.counting,
            normalization: Normalization::Raw,
            census_year: Some(t),
            source: None,
        },
        values,
    )
}

/// Divides every DEFINED value by the arithmetic mean of the DEFINED values
/// in its cluster. UNDEFINED values stay UNDEFINED and do not enter the
/// mean; clusters with no journals in the table are ignored.
pub fn rescale(table: &IndicatorTable, partition: &Partition) -> Result<IndicatorTable, IndicatorError> {
    let clusters = partition.clusters();
    let mut sums = vec![0.0f64; clusters.len()];
    let mut defined = vec![0usize; clusters.len()];
    let mut undefined = vec![0usize; clusters.len()];
    let mut assigned = Vec::with_capacity(table.len());
    for (j, v) in table.values() {
        let g = partition
            .cluster_of(j.as_str())
            .ok_or_else(|| IndicatorError::JournalNotInPartition(j.clone()))?;
        match v {
            Some(v) => {
                sums[g] += v;
                defined[g] += 1;
            }
            None => undefined[g] += 1,
        }
        assigned.push(g);
    }

    let mut means = vec![f64::NAN; clusters.len()];
    let mut basis = Vec::new();
    for (g, c) in clusters.iter().enumerate() {
        if defined[g] + undefined[g] == 0 {
            continue;
        }
        if defined[g] == 0 {
            return Err(IndicatorError::NoDefinedValues(c.id.clone()));
        }
        let mean = sums[g] / defined[g] as f64;
        if mean <= 0.0 {
            return Err(IndicatorError::ZeroMean(c.id.clone()));
        }
        means[g] = mean;
        basis.push(RescaleBasis {
            cluster: c.id.clone(),
            mean,
            defined: defined[g],
            undefined: undefined[g],
        });
    }

    let values: BTreeMap<JournalId, Option<f64>> = table
        .values()
        .iter()
        .zip(assigned)
        .map(|((j, v), g)| (j.clone(), v.map(|v| v / means[g])))
        .collect();
    let meta = TableMeta {
        id: format!("{}-rescaled", table.meta.id),
        normalization: Normalization::Rescaled,
        source: Some(table.meta.id.clone()),
        ..table.meta.clone()
    };
    Ok(IndicatorTable::new(meta, values).with_basis(basis))
}

/// Sum of each citing paper's fractional weights over the events it
/// contributes to the dataset. At most 1 per paper.
pub fn fractional_mass_per_paper(dataset: &Dataset) -> HashMap<&str, f64> {
    let mut out: HashMap<&str, f64> = HashMap::new();
    for e in dataset.events() {
        *out.entry(e.citing_paper.as_str()).or_default() += e.fractional_weight();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{event, journal, three_journals};
    use crate::model::{Cluster, PublicationCount};

    fn spec(kind: IndicatorKind, window: Window, counting: Counting) -> IndicatorSpec {
        IndicatorSpec::new(kind, window, counting).unwrap()
    }

    fn with_events(events: Vec<CitationEvent>, pubs: Vec<PublicationCount>) -> Dataset {
        Dataset::new(
            vec![journal("J", "c"), journal("K", "c")],
            vec![Cluster {
                id: "c".into(),
                name: "c".into(),
                size: 2,
            }],
            pubs,
            events,
            2010,
        )
    }

    fn items(journal: &str, year: i32, n: u64) -> PublicationCount {
        PublicationCount {
            journal: journal.into(),
            year,
            citable_items: n,
        }
    }

    #[test]
    fn numerator_counting_modes() {
        let d = with_events(
            vec![event("p", "K", "J", 2009, 4), event("p", "K", "J", 2008, 4)],
            vec![],
        );
        let frac = spec(IndicatorKind::ImpactFactor, Window::Two, Counting::Fractional);
        let int = spec(IndicatorKind::ImpactFactor, Window::Two, Counting::Integer);
        assert_eq!(if_numerator(&d, "J", &frac), 0.5);
        assert_eq!(if_numerator(&d, "J", &int), 2.0);
    }

    #[test]
    fn single_reference_papers_count_whole() {
        let events = (0..5)
            .map(|i| event(&format!("p{i}"), "K", "J", 2009, 1))
            .collect();
        let d = with_events(events, vec![]);
        let frac = spec(IndicatorKind::ImpactFactor, Window::Two, Counting::Fractional);
        let int = spec(IndicatorKind::ImpactFactor, Window::Two, Counting::Integer);
        assert_eq!(if_numerator(&d, "J", &frac), 5.0);
        assert_eq!(if_numerator(&d, "J", &int), 5.0);
    }

    #[test]
    fn window_boundaries() {
        let d = with_events(
            vec![
                event("a", "K", "J", 2010, 1),
                event("b", "K", "J", 2009, 1),
                event("c", "K", "J", 2008, 1),
                event("d", "K", "J", 2007, 1),
                event("e", "K", "J", 2005, 1),
                event("f", "K", "J", 2004, 1),
            ],
            vec![],
        );
        let n = |kind, window| if_numerator(&d, "J", &spec(kind, window, Counting::Integer));
        assert_eq!(n(IndicatorKind::ImpactFactor, Window::Two), 2.0);
        assert_eq!(n(IndicatorKind::ImpactFactor, Window::Five), 4.0);
        assert_eq!(n(IndicatorKind::TotalCites, Window::AllPrior), 6.0);
    }

    #[test]
    fn denominators() {
        let d = with_events(
            vec![],
            vec![items("J", 2009, 100), items("J", 2008, 150), items("J", 2007, 99)],
        );
        assert_eq!(if_denominator(&d, "J", Window::Two), 250);
        assert_eq!(if_denominator(&d, "K", Window::Two), 0);
        let five = with_events(vec![], (2005..=2009).map(|y| items("J", y, 10)).collect());
        assert_eq!(if_denominator(&five, "J", Window::Five), 50);
    }

    #[test]
    fn impact_factor_table() {
        let events = (0..50)
            .map(|i| event(&format!("p{i}"), "K", "J", 2009, 3))
            .collect();
        let d = with_events(events, vec![items("J", 2009, 100), items("J", 2008, 150)]);
        let t = compute_table(
            &d,
            &spec(IndicatorKind::ImpactFactor, Window::Two, Counting::Integer),
        );
        assert_eq!(t.get("J"), Some(Some(0.2)));
        assert_eq!(t.get("K"), Some(None));
        assert_eq!(t.id(), "IF2-IC");
    }

    #[test]
    fn cp_ratio_uses_current_year_items() {
        let d = with_events(
            vec![
                event("a", "K", "J", 2010, 2),
                event("b", "K", "J", 2001, 2),
                event("c", "K", "J", 2009, 2),
            ],
            vec![items("J", 2010, 4), items("J", 2009, 100)],
        );
        let ic = compute_table(
            &d,
            &spec(IndicatorKind::CpRatio, Window::AllPrior, Counting::Integer),
        );
        let fc = compute_table(
            &d,
            &spec(IndicatorKind::CpRatio, Window::AllPrior, Counting::Fractional),
        );
        assert_eq!(ic.get("J"), Some(Some(0.75)));
        assert_eq!(fc.get("J"), Some(Some(0.375)));
        assert_eq!(ic.get("K"), Some(None));
    }

    #[test]
    fn spec_validation() {
        assert!(IndicatorSpec::new(IndicatorKind::ImpactFactor, Window::AllPrior, Counting::Integer).is_err());
        assert!(IndicatorSpec::new(IndicatorKind::CpRatio, Window::Two, Counting::Integer).is_err());
        assert!(IndicatorSpec::new(IndicatorKind::External, Window::AllPrior, Counting::Integer).is_err());
        let ids: Vec<String> = IndicatorSpec::catalog().iter().map(|s| s.id()).collect();
        assert_eq!(
            ids,
            [
                "IF2-IC", "IF2-FC", "IF5-IC", "IF5-FC", "TC-IC", "TC-FC", "TC-IC2", "TC-FC2",
                "TC-IC5", "TC-FC5", "CP-IC", "CP-FC"
            ]
        );
    }

    #[test]
    fn table_matches_single_journal_functions() {
        let d = three_journals();
        for s in IndicatorSpec::catalog() {
            let t = compute_table(&d, &s);
            for j in d.journals() {
                let num = if_numerator(&d, j.id.as_str(), &s);
                let expected = match s.kind() {
                    IndicatorKind::ImpactFactor => {
                        let den = if_denominator(&d, j.id.as_str(), s.window());
                        (den > 0).then(|| num / den as f64)
                    }
                    IndicatorKind::CpRatio => {
                        let den: u64 = d
                            .publications()
                            .iter()
                            .filter(|p| p.journal == j.id && p.year == 2010)
                            .map(|p| p.citable_items)
                            .sum();
                        (den > 0).then(|| num / den as f64)
                    }
                    _ => Some(num),
                };
                assert_eq!(t.get(j.id.as_str()), Some(expected), "{s} {}", j.id);
            }
        }
    }

    fn cluster_table(values: &[(&str, &str, Option<f64>)]) -> (IndicatorTable, Partition) {
        let table = IndicatorTable::from_values("T", values.iter().map(|(j, _, v)| (*j, *v)));
        let journals: Vec<_> = values.iter().map(|(j, c, _)| journal(j, c)).collect();
        let mut clusters: Vec<Cluster> = Vec::new();
        for (_, c, _) in values {
            if !clusters.iter().any(|k| k.id.as_str() == *c) {
                clusters.push(Cluster {
                    id: (*c).into(),
                    name: (*c).into(),
                    size: 0,
                });
            }
        }
        (table, Partition::from_records(&journals, &clusters).unwrap())
    }

    #[test]
    fn rescale_divides_by_cluster_mean() {
        let (t, p) = cluster_table(&[
            ("a", "x", Some(2.0)),
            ("b", "x", Some(4.0)),
            ("c", "x", Some(6.0)),
            ("d", "y", Some(3.0)),
            ("e", "y", Some(3.0)),
            ("f", "y", None),
        ]);
        let r = rescale(&t, &p).unwrap();
        assert_eq!(r.get("a"), Some(Some(0.5)));
        assert_eq!(r.get("b"), Some(Some(1.0)));
        assert_eq!(r.get("c"), Some(Some(1.5)));
        assert_eq!(r.get("d"), Some(Some(1.0)));
        assert_eq!(r.get("f"), Some(None));
        assert_eq!(r.meta.source.as_deref(), Some("T"));
        assert_eq!(r.meta.normalization, Normalization::Rescaled);
        assert_eq!(r.rescale_basis()[1].defined, 2);
        assert_eq!(r.rescale_basis()[1].undefined, 1);
    }

    #[test]
    fn rescale_small_cluster_quotient() {
        // IF2 of 3.843 in a ten-journal cluster whose mean IF2 is 0.576.
        let mut rows = vec![("j0", "x", Some(3.843))];
        let names: Vec<String> = (1..10).map(|i| format!("j{i}")).collect();
        for n in &names {
            rows.push((n.as_str(), "x", Some((0.576 * 10.0 - 3.843) / 9.0)));
        }
        let (t, p) = cluster_table(&rows);
        let r = rescale(&t, &p).unwrap();
        let v = r.get("j0").unwrap().unwrap();
        assert!((r.rescale_basis()[0].mean - 0.576).abs() < 1e-12);
        assert_eq!(format!("{v:.3}"), "6.672");
    }

    #[test]
    fn rescale_errors() {
        let (t, p) = cluster_table(&[("a", "x", Some(0.0)), ("b", "x", Some(0.0))]);
        assert_eq!(rescale(&t, &p), Err(IndicatorError::ZeroMean("x".into())));
        let (t, p) = cluster_table(&[("a", "x", None), ("b", "y", Some(1.0))]);
        assert_eq!(rescale(&t, &p), Err(IndicatorError::NoDefinedValues("x".into())));
        let (_, p) = cluster_table(&[("a", "x", Some(1.0))]);
        let stray = IndicatorTable::from_values("T", [("zz", Some(1.0))]);
        assert!(matches!(
            rescale(&stray, &p),
            Err(IndicatorError::JournalNotInPartition(_))
        ));
    }

    #[test]
    fn fractional_mass_bounded_by_one() {
        let d = three_journals();
        let mass = fractional_mass_per_paper(&d);
        assert_eq!(mass["p1"], 0.75);
        assert_eq!(mass["p2"], 1.0);
    }
}
