//! Validated domain types shared by every other module.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

macro_rules! token {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(id: impl Into<Arc<str>>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.into())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s.into())
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

token!(
    /// Opaque journal identity (ISSN, abbreviated title, ...). Never parsed.
    JournalId
);
token!(
    /// Field category token from the input classification.
    ClusterId
);
token!(
    /// Opaque identity of a citing paper.
    PaperId
);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub id: JournalId,
    pub title: String,
    pub cluster: ClusterId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: ClusterId,
    pub name: String,
    /// Declared number of member journals.
    pub size: usize,
}

/// Citable items (articles, reviews, proceedings papers) a journal
/// published in one year.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationCount {
    pub journal: JournalId,
    pub year: i32,
    pub citable_items: u64,
}

/// One reference from a citing paper to a cited journal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationEvent {
    pub citing_paper: PaperId,
    pub citing_journal: JournalId,
    pub citing_year: i32,
    pub cited_journal: JournalId,
    pub cited_year: i32,
    /// Length of the citing paper's full reference list.
    pub n_refs: u32,
}

impl CitationEvent {
    /// Fractional weight `1 / n_refs`.
    pub fn fractional_weight(&self) -> f64 {
        1.0 / f64::from(self.n_refs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    journals: Vec<JournalRecord>,
    clusters: Vec<Cluster>,
    publications: Vec<PublicationCount>,
    events: Vec<CitationEvent>,
    census_year: i32,
}

impl Dataset {
    /// Bundles the parts without checking them; run [`validate`] (or go
    /// through `ingest::assemble`) to establish the invariants.
    pub fn new(
        journals: Vec<JournalRecord>,
        clusters: Vec<Cluster>,
        publications: Vec<PublicationCount>,
        events: Vec<CitationEvent>,
        census_year: i32,
    ) -> Self {
        Self {
            journals,
            clusters,
            publications,
            events,
            census_year,
        }
    }

    pub fn journals(&self) -> &[JournalRecord] {
        &self.journals
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn publications(&self) -> &[PublicationCount] {
        &self.publications
    }

    pub fn events(&self) -> &[CitationEvent] {
        &self.events
    }

    pub fn census_year(&self) -> i32 {
        self.census_year
    }

    pub fn journal(&self, id: &str) -> Option<&JournalRecord> {
        self.journals.iter().find(|j| j.id.as_str() == id)
    }

    /// Journal id → position in [`Dataset::journals`].
    pub fn journal_index(&self) -> HashMap<&str, usize> {
        self.journals
            .iter()
            .enumerate()
            .map(|(i, j)| (j.id.as_str(), i))
            .collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }

    /// The cluster partition induced by the journal records.
    pub fn partition(&self) -> Partition {
        Partition::from_records(&self.journals, &self.clusters)
            .expect("dataset journals reference undeclared clusters; validate first")
    }
}

/// Assignment of journals to clusters, in declaration order.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    clusters: Vec<Cluster>,
    membership: HashMap<JournalId, usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum PartitionError {
    #[error("journal `{journal}` assigned to undeclared cluster `{cluster}`")]
    UnknownCluster { journal: JournalId, cluster: ClusterId },
    #[error("journal `{0}` assigned twice")]
    DuplicateJournal(JournalId),
}

impl Partition {
    /// Builds a partition; cluster sizes are recomputed from membership and
    /// clusters without members are dropped.
    pub fn from_records(
        journals: &[JournalRecord],
        clusters: &[Cluster],
    ) -> Result<Self, PartitionError> {
        let position: HashMap<&ClusterId, usize> =
            clusters.iter().enumerate().map(|(i, c)| (&c.id, i)).collect();
        let mut sizes = vec![0usize; clusters.len()];
        let mut membership = HashMap::with_capacity(journals.len());
        for j in journals {
            let &g = position
                .get(&j.cluster)
                .ok_or_else(|| PartitionError::UnknownCluster {
                    journal: j.id.clone(),
                    cluster: j.cluster.clone(),
                })?;
            if membership.insert(j.id.clone(), g).is_some() {
                return Err(PartitionError::DuplicateJournal(j.id.clone()));
            }
            sizes[g] += 1;
        }
        let mut remap = vec![usize::MAX; clusters.len()];
        let mut kept = Vec::new();
        for (g, c) in clusters.iter().enumerate() {
            if sizes[g] > 0 {
                remap[g] = kept.len();
                kept.push(Cluster {
                    size: sizes[g],
                    ..c.clone()
                });
            }
        }
        for g in membership.values_mut() {
            *g = remap[*g];
        }
        Ok(Self {
            clusters: kept,
            membership,
        })
    }

    /// Every journal in one cluster.
    pub fn single<'a>(
        journals: impl IntoIterator<Item = &'a JournalId>,
        cluster: Cluster,
    ) -> Self {
        let membership: HashMap<JournalId, usize> =
            journals.into_iter().map(|j| (j.clone(), 0)).collect();
        let size = membership.len();
        Self {
            clusters: vec![Cluster { size, ..cluster }],
            membership,
        }
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    /// Index into [`Partition::clusters`].
    pub fn cluster_of(&self, journal: &str) -> Option<usize> {
        self.membership.get(journal).copied()
    }

    pub fn journal_count(&self) -> usize {
        self.membership.len()
    }

    pub fn same_clusters(&self, other: &Partition) -> bool {
        self.clusters.len() == other.clusters.len()
            && self
                .clusters
                .iter()
                .zip(&other.clusters)
                .all(|(a, b)| a.id == b.id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    DuplicateJournal,
    DuplicateCluster,
    UndeclaredCluster { cluster: ClusterId },
    EmptyCluster,
    ClusterSizeMismatch { declared: usize, actual: usize },
    DuplicatePublication { year: i32 },
    ZeroRefs,
    CitedAfterCiting { citing_year: i32, cited_year: i32 },
    InconsistentCitingPaper,
    UnresolvedCitedJournal { journal: JournalId },
}

/// A broken invariant, naming the offending record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub record: String,
    #[serde(flatten)]
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.record;
        match &self.rule {
            Rule::DuplicateJournal => write!(f, "journal `{r}` declared more than once"),
            Rule::DuplicateCluster => write!(f, "cluster `{r}` declared more than once"),
            Rule::UndeclaredCluster { cluster } => {
                write!(f, "journal `{r}` refers to undeclared cluster `{cluster}`")
            }
            Rule::EmptyCluster => write!(f, "cluster `{r}` has no member journals"),
            Rule::ClusterSizeMismatch { declared, actual } => write!(
                f,
                "cluster `{r}` declares {declared} journals but has {actual}"
            ),
            Rule::DuplicatePublication { year } => {
                write!(f, "journal `{r}` has more than one publication count for {year}")
            }
            Rule::ZeroRefs => write!(f, "citing paper `{r}` has an empty reference list"),
            Rule::CitedAfterCiting {
                citing_year,
                cited_year,
            } => write!(
                f,
                "citing paper `{r}` ({citing_year}) cites the future year {cited_year}"
            ),
            Rule::InconsistentCitingPaper => write!(
                f,
                "citing paper `{r}` has events disagreeing on n_refs, journal or year"
            ),
            Rule::UnresolvedCitedJournal { journal } => {
                write!(f, "citing paper `{r}` cites unknown journal `{journal}`")
            }
        }
    }
}

/// Checks every dataset invariant. Violations come back in record order.
pub fn validate(dataset: &Dataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |record: &str, rule: Rule| {
        out.push(Violation {
            record: record.to_owned(),
            rule,
        })
    };

    let mut declared: HashMap<&ClusterId, usize> = HashMap::new();
    for c in &dataset.clusters {
        if declared.insert(&c.id, c.size).is_some() {
            push(c.id.as_str(), Rule::DuplicateCluster);
        }
    }

    let mut seen = HashSet::new();
    let mut members: HashMap<&ClusterId, usize> = HashMap::new();
    for j in &dataset.journals {
        if !seen.insert(j.id.as_str()) {
            push(j.id.as_str(), Rule::DuplicateJournal);
            continue;
        }
        if declared.contains_key(&j.cluster) {
            *members.entry(&j.cluster).or_default() += 1;
        } else {
            push(
                j.id.as_str(),
                Rule::UndeclaredCluster {
                    cluster: j.cluster.clone(),
                },
            );
        }
    }

    for c in &dataset.clusters {
        let actual = members.get(&c.id).copied().unwrap_or(0);
        if actual == 0 {
            push(c.id.as_str(), Rule::EmptyCluster);
        } else if actual != c.size {
            push(
                c.id.as_str(),
                Rule::ClusterSizeMismatch {
                    declared: c.size,
                    actual,
                },
            );
        }
    }

    let mut pub_keys = HashSet::new();
    for p in &dataset.publications {
        if !pub_keys.insert((p.journal.as_str(), p.year)) {
            push(p.journal.as_str(), Rule::DuplicatePublication { year: p.year });
        }
    }

    let mut papers: HashMap<&PaperId, (u32, &JournalId, i32)> = HashMap::new();
    let mut inconsistent = HashSet::new();
    for e in &dataset.events {
        let paper = e.citing_paper.as_str();
        if e.n_refs == 0 {
            push(paper, Rule::ZeroRefs);
        }
        if e.cited_year > e.citing_year {
            push(
                paper,
                Rule::CitedAfterCiting {
                    citing_year: e.citing_year,
                    cited_year: e.cited_year,
                },
            );
        }
        if !seen.contains(e.cited_journal.as_str()) {
            push(
                paper,
                Rule::UnresolvedCitedJournal {
                    journal: e.cited_journal.clone(),
                },
            );
        }
        let key = (e.n_refs, &e.citing_journal, e.citing_year);
        match papers.get(&e.citing_paper) {
            None => {
                papers.insert(&e.citing_paper, key);
            }
            Some(first) if *first != key && inconsistent.insert(paper) => {
                push(paper, Rule::InconsistentCitingPaper);
            }
            Some(_) => {}
        }
    }
    out
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn well_formed_fixture_has_no_violations() {
        assert!(validate(&three_journals()).is_empty());
    }

    #[test]
    fn duplicate_journal_is_named() {
        let d = three_journals();
        let mut journals = d.journals().to_vec();
        journals.push(journal("B", "c1"));
        let d = Dataset::new(
            journals,
            d.clusters().to_vec(),
            d.publications().to_vec(),
            d.events().to_vec(),
            2010,
        );
        let v = validate(&d);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].record, "B");
        assert_eq!(v[0].rule, Rule::DuplicateJournal);
    }

    #[test]
    fn future_citation_is_flagged() {
        let d = three_journals();
        let mut events = d.events().to_vec();
        events.push(event("p3", "A", "C", 2011, 1));
        let d = Dataset::new(
            d.journals().to_vec(),
            d.clusters().to_vec(),
            d.publications().to_vec(),
            events,
            2010,
        );
        let v = validate(&d);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0].rule, Rule::CitedAfterCiting { cited_year: 2011, .. }));
    }

    #[test]
    fn other_rules() {
        let d = three_journals();
        let mut events = d.events().to_vec();
        events.push(event("p1", "A", "C", 2009, 5));
        events.push(event("p4", "A", "Z", 2009, 0));
        let mut clusters = d.clusters().to_vec();
        clusters[0].size = 3;
        clusters.push(Cluster {
            id: "c9".into(),
            name: "Empty".into(),
            size: 1,
        });
        let mut pubs = d.publications().to_vec();
        pubs.push(pubs[0].clone());
        let d = Dataset::new(d.journals().to_vec(), clusters, pubs, events, 2010);
        let rules: Vec<Rule> = validate(&d).into_iter().map(|v| v.rule).collect();
        assert_eq!(
            rules,
            vec![
                Rule::ClusterSizeMismatch {
                    declared: 3,
                    actual: 2
                },
                Rule::EmptyCluster,
                Rule::DuplicatePublication { year: 2009 },
                Rule::InconsistentCitingPaper,
                Rule::ZeroRefs,
                Rule::UnresolvedCitedJournal {
                    journal: "Z".into()
                },
            ]
        );
    }

    #[test]
    fn validate_is_pure() {
        let d = three_journals();
        assert_eq!(validate(&d), validate(&d));
    }

    #[test]
    fn partition_recomputes_sizes() {
        let p = three_journals().partition();
        assert_eq!(p.clusters().len(), 2);
        assert_eq!(p.clusters()[0].size, 2);
        assert_eq!(p.cluster_of("C"), Some(1));
        assert_eq!(p.cluster_of("nope"), None);
        assert_eq!(p.journal_count(), 3);
    }
}
