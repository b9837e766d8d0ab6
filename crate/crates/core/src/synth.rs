//! Seeded synthetic datasets with field-dependent citation behaviour.
//!
//! Every journal publishes a random number of citable items per year. In
//! the census year each item becomes a citing paper whose reference-list
//! length is a discretised lognormal with the cluster's mean and
//! dispersion. Each reference lands in the indexed set with probability
//! `indexed_ref_share`; an indexed reference picks a (journal, year) target
//! with probability proportional to
//!
//! `cluster attractiveness × journal prestige × items(journal, year) × recency(age)`
//!
//! so a cluster's expected citations per item scale with its
//! `mean_cites_per_item`, while a lognormal journal prestige gives the
//! skewed within-field spread. References outside the indexed set still
//! count toward `n_refs` but produce no event.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{derive_seed, Execution};
use crate::model::{CitationEvent, Cluster, Dataset, JournalId, JournalRecord, PaperId, PublicationCount};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterProfile {
    /// Cluster token; defaults to the 1-based position.
    #[serde(default)]
    pub id: Option<String>,
    pub name: String,
    pub size: usize,
    /// Relative citation attractiveness of the field.
    pub mean_cites_per_item: f64,
    /// Mean reference-list length of the field's papers.
    pub mean_refs: f64,
    /// Lognormal sigma of reference-list lengths.
    pub dispersion: f64,
}

fn default_share() -> f64 {
    0.9
}

fn default_spread() -> f64 {
    0.8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthProfile {
    pub name: String,
    pub clusters: Vec<ClusterProfile>,
    /// Inclusive range of citable items per journal and year.
    pub items_per_journal: (u32, u32),
    /// Inclusive publication-year span; the last year is the census year.
    pub years: (i32, i32),
    pub seed: u64,
    /// Probability that a reference targets an indexed journal.
    #[serde(default = "default_share")]
    pub indexed_ref_share: f64,
    /// Lognormal sigma of per-journal prestige (mean 1).
    #[serde(default = "default_spread")]
    pub journal_spread: f64,
}

impl SynthProfile {
    pub fn total_journals(&self) -> usize {
        self.clusters.iter().map(|c| c.size).sum()
    }

    pub fn census_year(&self) -> i32 {
        self.years.1
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidProfile(m));
        if self.clusters.is_empty() || self.total_journals() == 0 {
            return bad("profile has no journals".into());
        }
        for c in &self.clusters {
            if c.size == 0 {
                return bad(format!("cluster `{}` is empty", c.name));
            }
            let rates = [c.mean_cites_per_item, c.mean_refs, c.dispersion];
            if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                return bad(format!("cluster `{}` needs positive finite rates", c.name));
            }
        }
        if self.items_per_journal.0 > self.items_per_journal.1 {
            return bad("items_per_journal range is reversed".into());
        }
        if self.years.0 > self.years.1 {
            return bad("year span is reversed".into());
        }
        if !(self.indexed_ref_share > 0.0 && self.indexed_ref_share <= 1.0) {
            return bad("indexed_ref_share must lie in (0, 1]".into());
        }
        if !(self.journal_spread.is_finite() && self.journal_spread >= 0.0) {
            return bad("journal_spread must be finite and non-negative".into());
        }
        Ok(())
    }

    pub fn cluster_id(&self, g: usize) -> String {
        self.clusters[g]
            .id
            .clone()
            .unwrap_or_else(|| (g + 1).to_string())
    }
}

fn cluster(id: &str, name: &str, size: usize, cites: f64, refs: f64) -> ClusterProfile {
    ClusterProfile {
        id: Some(id.to_owned()),
        name: name.to_owned(),
        size,
        mean_cites_per_item: cites,
        mean_refs: refs,
        dispersion: 0.6,
    }
}

/// Eleven fields totalling 3,695 journals. Biomedical Research (514),
/// Mathematics (173), Physics (245), Social Sciences (31), Health Sciences
/// (32) and Psychology (42) have fixed sizes; the other five
/// split the remaining 2,658 evenly, the 3 left over going to Clinical
/// Medicine. Citation rates span 10× (Mathematics 0.5 to Biomedical
/// Research 5.0); reference lists run from ~8 (Mathematics) to ~45
/// (Biomedical Research, Psychology). Yields ≈2·10⁶ citation events.
pub fn paper2010_profile() -> SynthProfile {
    SynthProfile {
        name: "paper2010".into(),
        clusters: vec![
            cluster("1", "Biology", 531, 2.0, 38.0),
            cluster("2", "Biomedical Research", 514, 5.0, 45.0),
            cluster("3", "Chemistry", 531, 2.6, 35.0),
            cluster("4", "Clinical Medicine", 534, 2.4, 30.0),
            cluster("5", "Earth & Space", 531, 1.8, 40.0),
            cluster("6", "Engineering & Tech", 531, 1.0, 20.0),
            cluster("7", "Health Sciences", 32, 1.2, 28.0),
            cluster("9", "Mathematics", 173, 0.5, 8.0),
            cluster("10", "Physics", 245, 2.2, 25.0),
            cluster("12", "Psychology", 42, 1.9, 45.0),
            cluster("13", "Social Sciences", 31, 0.6, 42.0),
        ],
        items_per_journal: (8, 32),
        years: (2000, 2010),
        seed: 2010,
        indexed_ref_share: default_share(),
        journal_spread: default_spread(),
    }
}

/// Relative citation weight of items published `age` years before the
/// census year.
fn recency(age: i32) -> f64 {
    match age {
        0 => 0.5,
        a => 0.8f64.powi(a - 1),
    }
}

struct JournalDraw {
    items: Vec<u32>,
    prestige: f64,
}

fn journal_draw(profile: &SynthProfile, j: usize) -> JournalDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(profile.seed, j as u64));
    let (lo, hi) = profile.items_per_journal;
    let years = (profile.years.1 - profile.years.0 + 1) as usize;
    let items = (0..years).map(|_| rng.random_range(lo..=hi)).collect();
    let s = profile.journal_spread;
    let prestige = if s == 0.0 {
        1.0
    } else {
        LogNormal::new(-s * s / 2.0, s)
            .expect("validated spread")
            .sample(&mut rng)
    };
    JournalDraw { items, prestige }
}

/// Reference-list length sampler: lognormal with the given mean, rounded,
/// floored at 1.
struct RefLength(Option<LogNormal<f64>>, f64);

impl RefLength {
    fn new(mean: f64, sigma: f64) -> Self {
        if sigma < 1e-9 {
            Self(None, mean)
        } else {
            let d = LogNormal::new(mean.ln() - sigma * sigma / 2.0, sigma).expect("validated rates");
            Self(Some(d), mean)
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        let x = match &self.0 {
            Some(d) => d.sample(rng),
            None => self.1,
        };
        x.round().clamp(1.0, u32::MAX as f64) as u32
    }
}

pub fn generate(profile: &SynthProfile) -> Result<Dataset, SynthError> {
    generate_with(profile, Execution::default())
}

pub fn generate_with(profile: &SynthProfile, exec: Execution) -> Result<Dataset, SynthError> {
    profile.validate()?;
    let width = profile.total_journals().to_string().len().max(4);
    let owner: Vec<usize> = profile
        .clusters
        .iter()
        .enumerate()
        .flat_map(|(g, c)| std::iter::repeat_n(g, c.size))
        .collect();
    let clusters: Vec<Cluster> = profile
        .clusters
        .iter()
        .enumerate()
        .map(|(g, c)| Cluster {
            id: profile.cluster_id(g).into(),
            name: c.name.clone(),
            size: c.size,
        })
        .collect();
    let journals: Vec<JournalRecord> = owner
        .iter()
        .enumerate()
        .map(|(j, &g)| JournalRecord {
            id: JournalId::from(format!("J{:0width$}", j + 1)),
            title: format!("{} journal {}", profile.clusters[g].name, j + 1),
            cluster: clusters[g].id.clone(),
        })
        .collect();

    let draws = exec.map_range(journals.len(), |j| journal_draw(profile, j));
    let (first, census) = profile.years;
    let years = (census - first + 1) as usize;

    let mut weights = Vec::with_capacity(journals.len() * years);
    for (j, d) in draws.iter().enumerate() {
        let attract = profile.clusters[owner[j]].mean_cites_per_item * d.prestige;
        for (k, &items) in d.items.iter().enumerate() {
            let age = census - (first + k as i32);
            weights.push(attract * f64::from(items) * recency(age));
        }
    }
    if !weights.iter().any(|w| *w > 0.0) {
        return Err(SynthError::InvalidProfile(
            "no citable items to cite; raise items_per_journal".into(),
        ));
    }
    let targets = WeightedAliasIndex::new(weights)
        .map_err(|e| SynthError::InvalidProfile(format!("target weights: {e}")))?;
    let ref_lengths: Vec<RefLength> = profile
        .clusters
        .iter()
        .map(|c| RefLength::new(c.mean_refs, c.dispersion))
        .collect();

    let per_journal = exec.map_range(journals.len(), |j| {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(profile.seed ^ 0x5eed_c17e, j as u64));
        let citing = &journals[j].id;
        let papers = draws[j].items[years - 1];
        let lengths = &ref_lengths[owner[j]];
        let mut events = Vec::new();
        for k in 0..papers {
            let paper = PaperId::from(format!("{citing}-{census}-{k:04}"));
            let n_refs = lengths.sample(&mut rng);
            for _ in 0..n_refs {
                if rng.random::<f64>() >= profile.indexed_ref_share {
                    continue;
                }
                let t = targets.sample(&mut rng);
                events.push(CitationEvent {
                    citing_paper: paper.clone(),
                    citing_journal: citing.clone(),
                    citing_year: census,
                    cited_journal: journals[t / years].id.clone(),
                    cited_year: first + (t % years) as i32,
                    n_refs,
                });
            }
        }
        events
    });
    let events: Vec<CitationEvent> = per_journal.into_iter().flatten().collect();

    let publications = journals
        .iter()
        .zip(&draws)
        .flat_map(|(jr, d)| {
            d.items.iter().enumerate().map(move |(k, &n)| PublicationCount {
                journal: jr.id.clone(),
                year: first + k as i32,
                citable_items: u64::from(n),
            })
        })
        .collect();

    Ok(Dataset::new(journals, clusters, publications, events, census))
}
