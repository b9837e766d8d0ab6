//! Reading and writing the three delimiter-separated input files, and
//! assembling them into a validated [`Dataset`].
//!
//! Files are UTF-8 with a mandatory header row; columns are located by
//! name, so extra columns and any column order are accepted.
//!
//! | file         | columns                                                                       |
//! |--------------|-------------------------------------------------------------------------------|
//! | journals     | `journal_id, title, cluster_id, cluster_name`                                 |
//! | publications | `journal_id, year, citable_items`                                             |
//! | citations    | `citing_paper_id, citing_journal_id, citing_year, cited_journal_id, cited_year, n_refs` |

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    CitationEvent, Cluster, ClusterId, Dataset, JournalId, JournalRecord, PaperId,
    PublicationCount, Violation,
};

pub const JOURNAL_COLUMNS: [&str; 4] = ["journal_id", "title", "cluster_id", "cluster_name"];
pub const PUBLICATION_COLUMNS: [&str; 3] = ["journal_id", "year", "citable_items"];
pub const CITATION_COLUMNS: [&str; 6] = [
    "citing_paper_id",
    "citing_journal_id",
    "citing_year",
    "cited_journal_id",
    "cited_year",
    "n_refs",
];

pub const JOURNALS_FILE: &str = "journals.tsv";
pub const PUBLICATIONS_FILE: &str = "publications.tsv";
pub const CITATIONS_FILE: &str = "citations.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: u64,
        message: String,
    },
    #[error("{source_name}: missing required column `{column}`")]
    MissingColumn {
        source_name: String,
        column: &'static str,
    },
    #[error("citing paper `{paper}` cites unknown journal `{journal}`")]
    UnknownCitedJournal { paper: PaperId, journal: JournalId },
    #[error("min_cluster_size must be at least 1")]
    InvalidConfig,
    #[error("no journals remain after applying the exclusion policy")]
    EmptyDataset,
    #[error("cannot infer the census year: no citation events")]
    NoCensusYear,
    #[error("assembled dataset is invalid: {}", first_violation(.0))]
    Invalid(Vec<Violation>),
    #[error("{source_name}: field `{value}` contains the delimiter or a line break")]
    Unwritable { source_name: String, value: String },
    #[error("{}: {source}", path.display())]
    Manifest {
        path: PathBuf,
        source: serde_json::Error,
    },
}

fn first_violation(v: &[Violation]) -> String {
    match v {
        [] => "no violations".into(),
        [only] => only.to_string(),
        [first, rest @ ..] => format!("{first} (and {} more)", rest.len()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TextFormat {
    pub delimiter: u8,
}

impl Default for TextFormat {
    fn default() -> Self {
        Self { delimiter: b'\t' }
    }
}

impl TextFormat {
    fn reader<R: Read>(&self, r: R) -> csv::Reader<R> {
        csv::ReaderBuilder::new()
            .delimiter(self.delimiter)
            .quoting(self.delimiter != b'\t')
            .has_headers(true)
            .from_reader(r)
    }

    fn writer<W: Write>(&self, w: W) -> csv::Writer<W> {
        let style = if self.delimiter == b'\t' {
            csv::QuoteStyle::Never
        } else {
            csv::QuoteStyle::Necessary
        };
        csv::WriterBuilder::new()
            .delimiter(self.delimiter)
            .quote_style(style)
            .from_writer(w)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnknownCitedPolicy {
    #[default]
    Drop,
    Error,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroRefsPolicy {
    #[default]
    DropWithWarning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestConfig {
    /// Clusters with fewer member journals are excluded.
    pub min_cluster_size: usize,
    pub unknown_cited_policy: UnknownCitedPolicy,
    pub zero_refs_policy: ZeroRefsPolicy,
    /// Evaluation year; the latest citing year when absent.
    pub census_year: Option<i32>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            min_cluster_size: 10,
            unknown_cited_policy: UnknownCitedPolicy::Drop,
            zero_refs_policy: ZeroRefsPolicy::DropWithWarning,
            census_year: None,
        }
    }
}

/// Journal records plus the clusters they declare, in first-seen order.
#[derive(Clone, Debug, PartialEq)]
pub struct JournalsFile {
    pub journals: Vec<JournalRecord>,
    pub clusters: Vec<Cluster>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub source_name: String,
    pub line: u64,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.source_name, self.line, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParsedCitations {
    pub events: Vec<CitationEvent>,
    pub warnings: Vec<Warning>,
    pub zero_refs_dropped: usize,
}

struct Rows<R: Read> {
    reader: csv::Reader<R>,
    columns: Vec<usize>,
    source_name: String,
    record: csv::StringRecord,
    line: u64,
}

impl<R: Read> Rows<R> {
    fn open(
        r: R,
        source_name: &str,
        format: TextFormat,
        wanted: &[&'static str],
    ) -> Result<Self, IngestError> {
        let mut reader = format.reader(r);
        let headers = reader
            .headers()
            .map_err(|e| csv_error(e, source_name))?
            .clone();
        let columns = wanted
            .iter()
            .map(|&column| {
                headers
                    .iter()
                    .position(|h| h.trim() == column)
                    .ok_or_else(|| IngestError::MissingColumn {
                        source_name: source_name.to_owned(),
                        column,
                    })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            reader,
            columns,
            source_name: source_name.to_owned(),
            record: csv::StringRecord::new(),
            line: 1,
        })
    }

    fn advance(&mut self) -> Result<bool, IngestError> {
        let more = self
            .reader
            .read_record(&mut self.record)
            .map_err(|e| csv_error(e, &self.source_name))?;
        if more {
            self.line = self.record.position().map_or(self.line + 1, |p| p.line());
        }
        Ok(more)
    }

    fn error(&self, message: impl Into<String>) -> IngestError {
        IngestError::Parse {
            source_name: self.source_name.clone(),
            line: self.line,
            message: message.into(),
        }
    }

    /// Non-empty, trimmed text of the `i`-th wanted column.
    fn text(&self, i: usize, name: &str) -> Result<&str, IngestError> {
        let v = self.record.get(self.columns[i]).unwrap_or("").trim();
        if v.is_empty() {
            return Err(self.error(format!("empty `{name}`")));
        }
        Ok(v)
    }

    fn number<T: FromStr>(&self, i: usize, name: &str) -> Result<T, IngestError> {
        let v = self.text(i, name)?;
        v.parse()
            .map_err(|_| self.error(format!("`{name}` is not an integer: `{v}`")))
    }
}

fn csv_error(e: csv::Error, source_name: &str) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("expected {expected_len} columns, found {len}"),
        _ => e.to_string(),
    };
    IngestError::Parse {
        source_name: source_name.to_owned(),
        line,
        message,
    }
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })
}

fn source_name(path: &Path) -> String {
    path.display().to_string()
}

pub fn parse_journals(path: &Path, format: TextFormat) -> Result<JournalsFile, IngestError> {
    read_journals(open(path)?, &source_name(path), format)
}

pub fn read_journals<R: Read>(
    r: R,
    source_name: &str,
    format: TextFormat,
) -> Result<JournalsFile, IngestError> {
    let mut rows = Rows::open(r, source_name, format, &JOURNAL_COLUMNS)?;
    let mut journals = Vec::new();
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut cluster_pos: HashMap<String, usize> = HashMap::new();
    let mut seen = HashSet::new();
    while rows.advance()? {
        let id = rows.text(0, "journal_id")?;
        let title = rows.record.get(rows.columns[1]).unwrap_or("").trim();
        let cluster_id = rows.text(2, "cluster_id")?;
        let cluster_name = rows.record.get(rows.columns[3]).unwrap_or("").trim();
        if !seen.insert(id.to_owned()) {
            return Err(rows.error(format!("duplicate journal_id `{id}`")));
        }
        let g = match cluster_pos.get(cluster_id) {
            Some(&g) => {
                if clusters[g].name != cluster_name {
                    return Err(rows.error(format!(
                        "cluster `{cluster_id}` named both `{}` and `{cluster_name}`",
                        clusters[g].name
                    )));
                }
                g
            }
            None => {
                cluster_pos.insert(cluster_id.to_owned(), clusters.len());
                clusters.push(Cluster {
                    id: cluster_id.into(),
                    name: cluster_name.to_owned(),
                    size: 0,
                });
                clusters.len() - 1
            }
        };
        clusters[g].size += 1;
        journals.push(JournalRecord {
            id: id.into(),
            title: title.to_owned(),
            cluster: clusters[g].id.clone(),
        });
    }
    Ok(JournalsFile { journals, clusters })
}

pub fn parse_publications(
    path: &Path,
    format: TextFormat,
) -> Result<Vec<PublicationCount>, IngestError> {
    read_publications(open(path)?, &source_name(path), format)
}

pub fn read_publications<R: Read>(
    r: R,
    source_name: &str,
    format: TextFormat,
) -> Result<Vec<PublicationCount>, IngestError> {
    let mut rows = Rows::open(r, source_name, format, &PUBLICATION_COLUMNS)?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut interner = Interner::default();
    while rows.advance()? {
        let journal = interner.journal(rows.text(0, "journal_id")?);
        let year: i32 = rows.number(1, "year")?;
        let citable_items: u64 = rows.number(2, "citable_items")?;
        if !seen.insert((journal.clone(), year)) {
            return Err(rows.error(format!(
                "duplicate publication count for journal `{journal}` in {year}"
            )));
        }
        out.push(PublicationCount {
            journal,
            year,
            citable_items,
        });
    }
    Ok(out)
}

#[derive(Default)]
struct Interner {
    journals: HashMap<String, JournalId>,
    last_paper: Option<PaperId>,
}

impl Interner {
    fn journal(&mut self, id: &str) -> JournalId {
        if let Some(j) = self.journals.get(id) {
            return j.clone();
        }
        let j = JournalId::from(id);
        self.journals.insert(id.to_owned(), j.clone());
        j
    }

    fn paper(&mut self, id: &str) -> PaperId {
        match &self.last_paper {
            Some(p) if p.as_str() == id => p.clone(),
            _ => {
                let p = PaperId::from(id);
                self.last_paper = Some(p.clone());
                p
            }
        }
    }
}

pub fn parse_citations(
    path: &Path,
    format: TextFormat,
    zero_refs: ZeroRefsPolicy,
) -> Result<ParsedCitations, IngestError> {
    read_citations(open(path)?, &source_name(path), format, zero_refs)
}

pub fn read_citations<R: Read>(
    r: R,
    source_name: &str,
    format: TextFormat,
    zero_refs: ZeroRefsPolicy,
) -> Result<ParsedCitations, IngestError> {
    let mut rows = Rows::open(r, source_name, format, &CITATION_COLUMNS)?;
    let mut parsed = ParsedCitations::default();
    let mut interner = Interner::default();
    let mut papers: HashMap<PaperId, (u32, JournalId, i32)> = HashMap::new();
    while rows.advance()? {
        let citing_paper = interner.paper(rows.text(0, "citing_paper_id")?);
        let citing_journal = interner.journal(rows.text(1, "citing_journal_id")?);
        let citing_year: i32 = rows.number(2, "citing_year")?;
        let cited_journal = interner.journal(rows.text(3, "cited_journal_id")?);
        let cited_year: i32 = rows.number(4, "cited_year")?;
        let n_refs: u32 = rows.number(5, "n_refs")?;

        if cited_year > citing_year {
            return Err(rows.error(format!(
                "cited_year {cited_year} is after citing_year {citing_year}"
            )));
        }
        let key = (n_refs, citing_journal.clone(), citing_year);
        match papers.get(&citing_paper) {
            Some(first) if *first != key => {
                return Err(rows.error(format!(
                    "citing paper `{citing_paper}` disagrees with its earlier rows \
                     (n_refs {} vs {n_refs})",
                    first.0
                )));
            }
            Some(_) => {}
            None => {
                papers.insert(citing_paper.clone(), key);
            }
        }
        if n_refs == 0 {
            match zero_refs {
                ZeroRefsPolicy::Error => return Err(rows.error("n_refs must be at least 1")),
                ZeroRefsPolicy::DropWithWarning => {
                    parsed.zero_refs_dropped += 1;
                    parsed.warnings.push(Warning {
                        source_name: source_name.to_owned(),
                        line: rows.line,
                        message: format!("dropped event of `{citing_paper}` with n_refs = 0"),
                    });
                    continue;
                }
            }
        }
        parsed.events.push(CitationEvent {
            citing_paper,
            citing_journal,
            citing_year,
            cited_journal,
            cited_year,
            n_refs,
        });
    }
    Ok(parsed)
}

/// Accounting for everything [`assemble`] removed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExclusionSummary {
    pub excluded_clusters: Vec<Cluster>,
    pub excluded_journals: usize,
    pub dropped_publications: usize,
    pub dropped_events_excluded: usize,
    pub dropped_events_unknown_cited: usize,
    pub dropped_events_zero_refs: usize,
    pub retained_clusters: usize,
    pub retained_journals: usize,
    pub retained_publications: usize,
    pub retained_events: usize,
    pub census_year: i32,
}

#[derive(Clone, Debug)]
pub struct Assembled {
    pub dataset: Dataset,
    pub summary: ExclusionSummary,
    pub warnings: Vec<Warning>,
}

/// Joins parsed inputs, drops under-populated clusters with their journals
/// and every event touching them, and validates the result.
///
/// Citing journals outside the indexed set are kept; only cited journals
/// must resolve.
pub fn assemble(
    journals: JournalsFile,
    publications: Vec<PublicationCount>,
    citations: ParsedCitations,
    config: &IngestConfig,
) -> Result<Assembled, IngestError> {
    if config.min_cluster_size == 0 {
        return Err(IngestError::InvalidConfig);
    }
    let mut summary = ExclusionSummary {
        dropped_events_zero_refs: citations.zero_refs_dropped,
        ..Default::default()
    };

    let (kept_clusters, dropped_clusters): (Vec<Cluster>, Vec<Cluster>) = journals
        .clusters
        .into_iter()
        .partition(|c| c.size >= config.min_cluster_size);
    let dropped_ids: HashSet<&ClusterId> = dropped_clusters.iter().map(|c| &c.id).collect();

    let mut excluded: HashSet<JournalId> = HashSet::new();
    let mut kept_journals = Vec::with_capacity(journals.journals.len());
    for j in journals.journals {
        if dropped_ids.contains(&j.cluster) {
            excluded.insert(j.id);
        } else {
            kept_journals.push(j);
        }
    }
    summary.excluded_journals = excluded.len();
    summary.excluded_clusters = dropped_clusters;
    if kept_journals.is_empty() {
        return Err(IngestError::EmptyDataset);
    }
    let known: HashSet<&str> = kept_journals.iter().map(|j| j.id.as_str()).collect();

    let publications: Vec<PublicationCount> = publications
        .into_iter()
        .filter(|p| {
            let keep = known.contains(p.journal.as_str());
            if !keep {
                summary.dropped_publications += 1;
            }
            keep
        })
        .collect();

    let mut events = Vec::with_capacity(citations.events.len());
    for e in citations.events {
        if excluded.contains(&e.cited_journal) || excluded.contains(&e.citing_journal) {
            summary.dropped_events_excluded += 1;
        } else if !known.contains(e.cited_journal.as_str()) {
            match config.unknown_cited_policy {
                UnknownCitedPolicy::Drop => summary.dropped_events_unknown_cited += 1,
                UnknownCitedPolicy::Error => {
                    return Err(IngestError::UnknownCitedJournal {
                        paper: e.citing_paper,
                        journal: e.cited_journal,
                    })
                }
            }
        } else {
            events.push(e);
        }
    }

    let census_year = match config.census_year {
        Some(t) => t,
        None => events
            .iter()
            .map(|e| e.citing_year)
            .max()
            .ok_or(IngestError::NoCensusYear)?,
    };

    summary.retained_clusters = kept_clusters.len();
    summary.retained_journals = kept_journals.len();
    summary.retained_publications = publications.len();
    summary.retained_events = events.len();
    summary.census_year = census_year;

    let dataset = Dataset::new(kept_journals, kept_clusters, publications, events, census_year);
    let violations = dataset.validate();
    if !violations.is_empty() {
        return Err(IngestError::Invalid(violations));
    }
    Ok(Assembled {
        dataset,
        summary,
        warnings: citations.warnings,
    })
}

/// Paths of the three input files.
#[derive(Clone, Debug)]
pub struct InputPaths {
    pub journals: PathBuf,
    pub publications: PathBuf,
    pub citations: PathBuf,
}

/// Parses the three files concurrently, then assembles.
pub fn load(
    paths: &InputPaths,
    format: TextFormat,
    config: &IngestConfig,
) -> Result<Assembled, IngestError> {
    let (journals, publications, citations) = std::thread::scope(|s| {
        let j = s.spawn(|| parse_journals(&paths.journals, format));
        let p = s.spawn(|| parse_publications(&paths.publications, format));
        let c = parse_citations(&paths.citations, format, config.zero_refs_policy);
        (
            j.join().expect("journals parser panicked"),
            p.join().expect("publications parser panicked"),
            c,
        )
    });
    assemble(journals?, publications?, citations?, config)
}

fn write_row<W: Write>(
    w: &mut csv::Writer<W>,
    fields: &[&str],
    format: TextFormat,
    source_name: &str,
) -> Result<(), IngestError> {
    if let Some(bad) = fields
        .iter()
        .find(|f| format.delimiter == b'\t' && f.contains(['\t', '\n', '\r']))
    {
        return Err(IngestError::Unwritable {
            source_name: source_name.to_owned(),
            value: (*bad).to_owned(),
        });
    }
    w.write_record(fields).map_err(|e| io_error(e, source_name))
}

fn io_error(e: impl Into<io::Error>, source_name: &str) -> IngestError {
    IngestError::Io {
        path: source_name.into(),
        source: e.into(),
    }
}

pub fn write_journals<W: Write>(
    dataset: &Dataset,
    w: W,
    format: TextFormat,
) -> Result<(), IngestError> {
    let name = JOURNALS_FILE;
    let names: HashMap<&ClusterId, &str> = dataset
        .clusters()
        .iter()
        .map(|c| (&c.id, c.name.as_str()))
        .collect();
    let mut w = format.writer(w);
    write_row(&mut w, &JOURNAL_COLUMNS, format, name)?;
    for j in dataset.journals() {
        let cluster_name = names.get(&j.cluster).copied().unwrap_or("");
        write_row(
            &mut w,
            &[j.id.as_str(), &j.title, j.cluster.as_str(), cluster_name],
            format,
            name,
        )?;
    }
    w.flush().map_err(|e| io_error(e, name))
}

pub fn write_publications<W: Write>(
    dataset: &Dataset,
    w: W,
    format: TextFormat,
) -> Result<(), IngestError> {
    let name = PUBLICATIONS_FILE;
    let mut w = format.writer(w);
    write_row(&mut w, &PUBLICATION_COLUMNS, format, name)?;
    for p in dataset.publications() {
        write_row(
            &mut w,
            &[
                p.journal.as_str(),
                &p.year.to_string(),
                &p.citable_items.to_string(),
            ],
            format,
            name,
        )?;
    }
    w.flush().map_err(|e| io_error(e, name))
}

pub fn write_citations<W: Write>(
    dataset: &Dataset,
    w: W,
    format: TextFormat,
) -> Result<(), IngestError> {
    let name = CITATIONS_FILE;
    let mut w = format.writer(w);
    write_row(&mut w, &CITATION_COLUMNS, format, name)?;
    let mut citing_year = String::new();
    let mut cited_year = String::new();
    let mut n_refs = String::new();
    for e in dataset.events() {
        use std::fmt::Write as _;
        citing_year.clear();
        cited_year.clear();
        n_refs.clear();
        let _ = write!(citing_year, "{}", e.citing_year);
        let _ = write!(cited_year, "{}", e.cited_year);
        let _ = write!(n_refs, "{}", e.n_refs);
        write_row(
            &mut w,
            &[
                e.citing_paper.as_str(),
                e.citing_journal.as_str(),
                &citing_year,
                e.cited_journal.as_str(),
                &cited_year,
                &n_refs,
            ],
            format,
            name,
        )?;
    }
    w.flush().map_err(|e| io_error(e, name))
}

fn create(path: &Path) -> Result<BufWriter<File>, IngestError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })
}

/// Writes the three input files (tab-separated) into `dir`.
pub fn write_inputs(dataset: &Dataset, dir: &Path) -> Result<InputPaths, IngestError> {
    fs::create_dir_all(dir).map_err(|source| IngestError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let paths = InputPaths {
        journals: dir.join(JOURNALS_FILE),
        publications: dir.join(PUBLICATIONS_FILE),
        citations: dir.join(CITATIONS_FILE),
    };
    let format = TextFormat::default();
    write_journals(dataset, create(&paths.journals)?, format)?;
    write_publications(dataset, create(&paths.publications)?, format)?;
    write_citations(dataset, create(&paths.citations)?, format)?;
    Ok(paths)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub census_year: i32,
    pub clusters: usize,
    pub journals: usize,
    pub publications: usize,
    pub events: usize,
}

/// Persists a canonical dataset bundle: the three input files plus a
/// manifest carrying the census year.
pub fn write_bundle(dataset: &Dataset, dir: &Path) -> Result<(), IngestError> {
    write_inputs(dataset, dir)?;
    let manifest = Manifest {
        census_year: dataset.census_year(),
        clusters: dataset.clusters().len(),
        journals: dataset.journals().len(),
        publications: dataset.publications().len(),
        events: dataset.events().len(),
    };
    let path = dir.join(MANIFEST_FILE);
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &manifest)
        .map_err(|source| IngestError::Manifest {
            path: path.clone(),
            source,
        })?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|source| IngestError::Io { path, source })
}

pub fn read_bundle(dir: &Path) -> Result<Dataset, IngestError> {
    let path = dir.join(MANIFEST_FILE);
    let manifest: Manifest =
        serde_json::from_reader(open(&path)?).map_err(|source| IngestError::Manifest {
            path: path.clone(),
            source,
        })?;
    let config = IngestConfig {
        min_cluster_size: 1,
        unknown_cited_policy: UnknownCitedPolicy::Error,
        zero_refs_policy: ZeroRefsPolicy::Error,
        census_year: Some(manifest.census_year),
    };
    let paths = InputPaths {
        journals: dir.join(JOURNALS_FILE),
        publications: dir.join(PUBLICATIONS_FILE),
        citations: dir.join(CITATIONS_FILE),
    };
    Ok(load(&paths, TextFormat::default(), &config)?.dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::three_journals;

    const TAB: TextFormat = TextFormat { delimiter: b'\t' };

    fn journals(text: &str) -> Result<JournalsFile, IngestError> {
        read_journals(text.as_bytes(), "journals", TAB)
    }

    fn citations(text: &str, policy: ZeroRefsPolicy) -> Result<ParsedCitations, IngestError> {
        read_citations(text.as_bytes(), "citations", TAB, policy)
    }

    const JOURNALS: &str = "journal_id\ttitle\tcluster_id\tcluster_name\n\
                            A\tAlpha\t1\tBiology\n\
                            B\tBeta\t1\tBiology\n\
                            C\tGamma\t9\tMathematics\n";

    #[test]
    fn three_rows() {
        let f = journals(JOURNALS).unwrap();
        assert_eq!(f.journals.len(), 3);
        assert_eq!(f.clusters.len(), 2);
        assert_eq!(f.clusters[0].size, 2);
        assert_eq!(f.journals[2].cluster.as_str(), "9");
    }

    #[test]
    fn columns_by_name() {
        let f = journals(
            "cluster_name\tjournal_id\textra\tcluster_id\ttitle\n\
             Biology\tA\tx\t1\tAlpha\n",
        )
        .unwrap();
        assert_eq!(f.journals[0].id.as_str(), "A");
        assert_eq!(f.clusters[0].name, "Biology");
    }

    #[test]
    fn empty_id_names_line_two() {
        let err = journals("journal_id\ttitle\tcluster_id\tcluster_name\n\tAlpha\t1\tBio\n")
            .unwrap_err();
        match err {
            IngestError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn wrong_column_count_names_line() {
        let err = journals(
            "journal_id\ttitle\tcluster_id\tcluster_name\nA\tAlpha\t1\tBio\nB\tBeta\t1\n",
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn duplicate_journal_rejected() {
        let err = journals(
            "journal_id\ttitle\tcluster_id\tcluster_name\nA\tx\t1\tBio\nA\ty\t1\tBio\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate journal_id `A`"));
    }

    #[test]
    fn missing_header_column() {
        let err = journals("journal_id\ttitle\tcluster_id\nA\tx\t1\n").unwrap_err();
        assert!(matches!(
            err,
            IngestError::MissingColumn {
                column: "cluster_name",
                ..
            }
        ));
    }

    const CITE_HEADER: &str =
        "citing_paper_id\tciting_journal_id\tciting_year\tcited_journal_id\tcited_year\tn_refs\n";

    #[test]
    fn citation_row() {
        let p = citations(
            &format!("{CITE_HEADER}p1\tjA\t2010\tjB\t2009\t4\n"),
            ZeroRefsPolicy::Error,
        )
        .unwrap();
        assert_eq!(p.events.len(), 1);
        let e = &p.events[0];
        assert_eq!(e.n_refs, 4);
        assert_eq!(e.cited_journal.as_str(), "jB");
        assert_eq!(e.cited_year, 2009);
    }

    #[test]
    fn zero_refs_dropped_with_warning() {
        let p = citations(
            &format!("{CITE_HEADER}p1\tjA\t2010\tjB\t2009\t0\np2\tjA\t2010\tjB\t2009\t3\n"),
            ZeroRefsPolicy::DropWithWarning,
        )
        .unwrap();
        assert_eq!(p.events.len(), 1);
        assert_eq!(p.zero_refs_dropped, 1);
        assert_eq!(p.warnings[0].line, 2);
        let err = citations(
            &format!("{CITE_HEADER}p1\tjA\t2010\tjB\t2009\t0\n"),
            ZeroRefsPolicy::Error,
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 2, .. }));
    }

    #[test]
    fn conflicting_n_refs_rejected() {
        let err = citations(
            &format!("{CITE_HEADER}p1\tjA\t2010\tjB\t2009\t4\np1\tjA\t2010\tjC\t2008\t5\n"),
            ZeroRefsPolicy::Error,
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn non_integer_year() {
        let err = citations(
            &format!("{CITE_HEADER}p1\tjA\t2010.5\tjB\t2009\t4\n"),
            ZeroRefsPolicy::Error,
        )
        .unwrap_err();
        assert!(err.to_string().contains("citing_year"));
    }

    #[test]
    fn future_cited_year_rejected() {
        let err = citations(
            &format!("{CITE_HEADER}p1\tjA\t2010\tjB\t2011\t4\n"),
            ZeroRefsPolicy::Error,
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 2, .. }));
    }

    #[test]
    fn comma_delimited() {
        let f = read_journals(
            "journal_id,title,cluster_id,cluster_name\nA,\"Alpha, Beta\",1,Bio\n".as_bytes(),
            "j",
            TextFormat { delimiter: b',' },
        )
        .unwrap();
        assert_eq!(f.journals[0].title, "Alpha, Beta");
    }

    fn parsed_fixture() -> (JournalsFile, Vec<PublicationCount>, ParsedCitations) {
        let d = three_journals();
        (
            JournalsFile {
                journals: d.journals().to_vec(),
                clusters: d.clusters().to_vec(),
            },
            d.publications().to_vec(),
            ParsedCitations {
                events: d.events().to_vec(),
                ..Default::default()
            },
        )
    }

    #[test]
    fn nothing_excluded_when_clusters_large_enough() {
        let (j, p, c) = parsed_fixture();
        let config = IngestConfig {
            min_cluster_size: 1,
            ..Default::default()
        };
        let a = assemble(j, p, c, &config).unwrap();
        assert_eq!(a.dataset, three_journals());
        assert!(a.summary.excluded_clusters.is_empty());
        assert_eq!(a.summary.census_year, 2010);
    }

    #[test]
    fn small_cluster_excluded_with_its_events() {
        let (j, p, c) = parsed_fixture();
        let config = IngestConfig {
            min_cluster_size: 2,
            ..Default::default()
        };
        let a = assemble(j, p, c, &config).unwrap();
        assert_eq!(a.summary.excluded_clusters.len(), 1);
        assert_eq!(a.summary.excluded_journals, 1);
        assert_eq!(a.summary.dropped_publications, 2);
        assert_eq!(a.summary.dropped_events_excluded, 1);
        assert_eq!(a.dataset.journals().len(), 2);
        assert_eq!(a.dataset.events().len(), 4);
    }

    #[test]
    fn unknown_cited_policy() {
        let (j, p, mut c) = parsed_fixture();
        c.events
            .push(crate::model::fixtures::event("p9", "A", "ZZ", 2009, 1));
        let drop = IngestConfig {
            min_cluster_size: 1,
            ..Default::default()
        };
        let a = assemble(j.clone(), p.clone(), c.clone(), &drop).unwrap();
        assert_eq!(a.summary.dropped_events_unknown_cited, 1);
        let strict = IngestConfig {
            unknown_cited_policy: UnknownCitedPolicy::Error,
            ..drop
        };
        assert!(matches!(
            assemble(j, p, c, &strict),
            Err(IngestError::UnknownCitedJournal { .. })
        ));
    }

    #[test]
    fn everything_excluded_is_an_error() {
        let (j, p, c) = parsed_fixture();
        let config = IngestConfig {
            min_cluster_size: 50,
            ..Default::default()
        };
        assert!(matches!(
            assemble(j, p, c, &config),
            Err(IngestError::EmptyDataset)
        ));
        let (j, p, c) = parsed_fixture();
        let zero = IngestConfig {
            min_cluster_size: 0,
            ..Default::default()
        };
        assert!(matches!(
            assemble(j, p, c, &zero),
            Err(IngestError::InvalidConfig)
        ));
    }

    #[test]
    fn bundle_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = three_journals();
        write_bundle(&d, dir.path()).unwrap();
        assert_eq!(read_bundle(dir.path()).unwrap(), d);
    }
}
