use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IndicatorError;
use crate::model::{ClusterId, JournalId};

/// Sentinel written for UNDEFINED values.
pub const UNDEFINED: &str = "NA";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKind {
    ImpactFactor,
    TotalCites,
    CpRatio,
    NumeratorOnly,
    /// Values supplied from outside (for example JCR impact factors).
    External,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Window {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "5")]
    Five,
    #[serde(rename = "all")]
    AllPrior,
}

impl Window {
    pub fn years(self) -> Option<i32> {
        match self {
            Window::Two => Some(2),
            Window::Five => Some(5),
            Window::AllPrior => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Counting {
    Integer,
    Fractional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    Rescaled,
}

macro_rules! text_enum {
    ($t:ty { $($v:path => $s:literal),+ $(,)? }) => {
        impl $t {
            pub fn as_str(self) -> &'static str {
                match self { $($v => $s),+ }
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s { $($s => Ok($v),)+ _ => Err(format!("unrecognised value `{s}`")) }
            }
        }
    };
}

text_enum!(IndicatorKind {
    IndicatorKind::ImpactFactor => "impact_factor",
    IndicatorKind::TotalCites => "total_cites",
    IndicatorKind::CpRatio => "cp_ratio",
    IndicatorKind::NumeratorOnly => "numerator_only",
    IndicatorKind::External => "external",
});
text_enum!(Window {
    Window::Two => "2",
    Window::Five => "5",
    Window::AllPrior => "all",
});
text_enum!(Counting {
    Counting::Integer => "integer",
    Counting::Fractional => "fractional",
});
text_enum!(Normalization {
    Normalization::Raw => "raw",
    Normalization::Rescaled => "rescaled",
});

/// Provenance of an [`IndicatorTable`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub id: String,
    pub kind: IndicatorKind,
    pub window: Window,
    pub counting: Counting,
    pub normalization: Normalization,
    pub census_year: Option<i32>,
    /// Id of the raw table a rescaled table was derived from.
    pub source: Option<String>,
}

/// Per-cluster divisor used by `rescale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleBasis {
    pub cluster: ClusterId,
    pub mean: f64,
    /// DEFINED values that entered the mean.
    pub defined: usize,
    pub undefined: usize,
}

/// One indicator's value per journal; `None` marks UNDEFINED.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorTable {
    pub meta: TableMeta,
    values: BTreeMap<JournalId, Option<f64>>,
    basis: Vec<RescaleBasis>,
}

impl IndicatorTable {
    pub fn new(meta: TableMeta, values: BTreeMap<JournalId, Option<f64>>) -> Self {
        Self {
            meta,
            values,
            basis: Vec::new(),
        }
    }

    pub(crate) fn with_basis(mut self, basis: Vec<RescaleBasis>) -> Self {
        self.basis = basis;
        self
    }

    /// Convenience for fixtures: an external table from `(id, value)` pairs.
    pub fn from_values<'a>(
        id: &str,
        values: impl IntoIterator<Item = (&'a str, Option<f64>)>,
    ) -> Self {
        Self::new(
            TableMeta {
                id: id.to_owned(),
                kind: IndicatorKind::External,
                window: Window::AllPrior,
                counting: Counting::Integer,
                normalization: Normalization::Raw,
                census_year: None,
                source: None,
            },
            values.into_iter().map(|(j, v)| (j.into(), v)).collect(),
        )
    }

    pub fn id(&self) -> &str {
        &self.meta.id
    }

    pub fn values(&self) -> &BTreeMap<JournalId, Option<f64>> {
        &self.values
    }

    /// `None` when the journal is absent, `Some(None)` when UNDEFINED.
    pub fn get(&self, journal: &str) -> Option<Option<f64>> {
        self.values.get(journal).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn defined(&self) -> impl Iterator<Item = (&JournalId, f64)> {
        self.values.iter().filter_map(|(j, v)| v.map(|v| (j, v)))
    }

    pub fn defined_count(&self) -> usize {
        self.values.values().filter(|v| v.is_some()).count()
    }

    /// Cluster means used when this table was rescaled; empty for raw tables.
    pub fn rescale_basis(&self) -> &[RescaleBasis] {
        &self.basis
    }

    /// Multiplies every DEFINED value by `factor`, keeping provenance.
    pub fn scaled(&self, factor: f64) -> Self {
        let values = self
            .values
            .iter()
            .map(|(j, v)| (j.clone(), v.map(|v| v * factor)))
            .collect();
        Self::new(self.meta.clone(), values)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RankOrder {
    #[default]
    Descending,
    Ascending,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedEntry {
    pub journal: JournalId,
    pub value: Option<f64>,
    /// 1-based position.
    pub rank: usize,
}

/// Orders journals by value (UNDEFINED last), breaking ties by ascending
/// journal id, so every journal gets a distinct rank.
pub fn rank_table(table: &IndicatorTable, order: RankOrder) -> Vec<RankedEntry> {
    let mut rows: Vec<(&JournalId, Option<f64>)> =
        table.values.iter().map(|(j, v)| (j, *v)).collect();
    rows.sort_by(|a, b| {
        let by_value = match (a.1, b.1) {
            (Some(x), Some(y)) => match order {
                RankOrder::Descending => y.total_cmp(&x),
                RankOrder::Ascending => x.total_cmp(&y),
            },
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        };
        by_value.then_with(|| a.0.cmp(b.0))
    });
    rows.into_iter()
        .enumerate()
        .map(|(i, (journal, value))| RankedEntry {
            journal: journal.clone(),
            value,
            rank: i + 1,
        })
        .collect()
}

/// Writes the provenance line, a `journal_id\tvalue` header and one row per
/// journal in id order. Values use the shortest text that round-trips.
pub fn write_table<W: Write>(table: &IndicatorTable, mut w: W) -> std::io::Result<()> {
    let m = &table.meta;
    write!(
        w,
        "# id={} kind={} window={} counting={} normalization={} census_year=",
        m.id, m.kind, m.window, m.counting, m.normalization
    )?;
    match m.census_year {
        Some(t) => write!(w, "{t}")?,
        None => w.write_all(UNDEFINED.as_bytes())?,
    }
    if let Some(source) = &m.source {
        write!(w, " source={source}")?;
    }
    writeln!(w)?;
    writeln!(w, "journal_id\tvalue")?;
    for (j, v) in &table.values {
        match v {
            Some(v) => writeln!(w, "{j}\t{v}")?,
            None => writeln!(w, "{j}\t{UNDEFINED}")?,
        }
    }
    w.flush()
}

/// Reads a table written by [`write_table`], or a bare two-column values
/// file (`journal_id`, `value`) whose id then defaults to `fallback_id`.
pub fn read_table<R: BufRead>(r: R, fallback_id: &str) -> Result<IndicatorTable, IndicatorError> {
    let mut meta = TableMeta {
        id: fallback_id.to_owned(),
        kind: IndicatorKind::External,
        window: Window::AllPrior,
        counting: Counting::Integer,
        normalization: Normalization::Raw,
        census_year: None,
        source: None,
    };
    let mut values = BTreeMap::new();
    let mut header_seen = false;
    for (i, line) in r.lines().enumerate() {
        let line_no = i + 1;
        let bad = |message: String| IndicatorError::TableFormat {
            line: line_no,
            message,
        };
        let line = line.map_err(|e| bad(e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(prov) = line.strip_prefix('#') {
            if header_seen || line_no != 1 {
                continue;
            }
            for pair in prov.split_whitespace() {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| bad(format!("malformed provenance entry `{pair}`")))?;
                match k {
                    "id" => meta.id = v.to_owned(),
                    "kind" => meta.kind = v.parse().map_err(bad)?,
                    "window" => meta.window = v.parse().map_err(bad)?,
                    "counting" => meta.counting = v.parse().map_err(bad)?,
                    "normalization" => meta.normalization = v.parse().map_err(bad)?,
                    "census_year" if v == UNDEFINED => meta.census_year = None,
                    "census_year" => {
                        meta.census_year =
                            Some(v.parse().map_err(|_| bad(format!("bad census_year `{v}`")))?)
                    }
                    "source" => meta.source = Some(v.to_owned()),
                    _ => {}
                }
            }
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(journal), Some(value), None) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(bad("expected two tab-separated columns".into()));
        };
        let (journal, value) = (journal.trim(), value.trim());
        if !header_seen {
            if journal != "journal_id" || value != "value" {
                return Err(bad("expected header `journal_id\tvalue`".into()));
            }
            header_seen = true;
            continue;
        }
        if journal.is_empty() {
            return Err(bad("empty journal_id".into()));
        }
        let parsed = if value == UNDEFINED {
            None
        } else {
            let v: f64 = value
                .parse()
                .map_err(|_| bad(format!("value `{value}` is not a number")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(bad(format!("value `{value}` must be finite and non-negative")));
            }
            Some(v)
        };
        if values.insert(JournalId::from(journal), parsed).is_some() {
            return Err(bad(format!("duplicate journal_id `{journal}`")));
        }
    }
    if !header_seen {
        return Err(IndicatorError::TableFormat {
            line: 1,
            message: "missing header `journal_id\tvalue`".into(),
        });
    }
    Ok(IndicatorTable::new(meta, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(r: &[RankedEntry]) -> Vec<(&str, usize)> {
        r.iter().map(|e| (e.journal.as_str(), e.rank)).collect()
    }

    #[test]
    fn ranks_descending() {
        let t = IndicatorTable::from_values("t", [("a", Some(3.0)), ("b", Some(1.0)), ("c", Some(2.0))]);
        assert_eq!(
            ids(&rank_table(&t, RankOrder::Descending)),
            [("a", 1), ("c", 2), ("b", 3)]
        );
        assert_eq!(
            ids(&rank_table(&t, RankOrder::Ascending)),
            [("b", 1), ("c", 2), ("a", 3)]
        );
    }

    #[test]
    fn ties_by_id_and_undefined_last() {
        let t = IndicatorTable::from_values(
            "t",
            [("b", Some(2.0)), ("n", None), ("a", Some(2.0)), ("c", Some(0.0))],
        );
        assert_eq!(
            ids(&rank_table(&t, RankOrder::Descending)),
            [("a", 1), ("b", 2), ("c", 3), ("n", 4)]
        );
    }

    #[test]
    fn file_round_trip() {
        let mut t = IndicatorTable::from_values("IF2-FC", [("J1", Some(0.1 + 0.2)), ("J2", None)]);
        t.meta.kind = IndicatorKind::ImpactFactor;
        t.meta.window = Window::Two;
        t.meta.counting = Counting::Fractional;
        t.meta.census_year = Some(2010);
        let mut buf = Vec::new();
        write_table(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "# id=IF2-FC kind=impact_factor window=2 counting=fractional normalization=raw census_year=2010\n\
             journal_id\tvalue\nJ1\t0.30000000000000004\nJ2\tNA\n"
        );
        assert_eq!(read_table(buf.as_slice(), "x").unwrap(), t);
    }

    #[test]
    fn bare_values_file() {
        let t = read_table("journal_id\tvalue\nCA-CANCER\t94.333\nX\tNA\n".as_bytes(), "ISI-IF2")
            .unwrap();
        assert_eq!(t.id(), "ISI-IF2");
        assert_eq!(t.meta.kind, IndicatorKind::External);
        assert_eq!(t.get("X"), Some(None));
        assert_eq!(t.defined_count(), 1);
    }

    #[test]
    fn rejects_bad_rows() {
        for text in [
            "journal_id\tvalue\nA\t-1\n",
            "journal_id\tvalue\nA\tabc\n",
            "journal_id\tvalue\nA\t1\nA\t2\n",
            "A\t1\n",
            "journal_id\tvalue\nA\t1\t3\n",
        ] {
            assert!(read_table(text.as_bytes(), "x").is_err(), "{text:?}");
        }
    }
}
