use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;

use citenorm_core::fairness::{write_interval_table, write_percentage_table};
use citenorm_core::ingest::{self, InputPaths, CITATIONS_FILE, JOURNALS_FILE, PUBLICATIONS_FILE};
use citenorm_core::model::Partition;
use citenorm_core::stats::paired_values;
use citenorm_core::{
    compare_reports, compute_table, decile_correlations, ecdf_by_group, fairness_test, generate,
    ks_two_sample, paper2010_profile, pearson, rank_table, read_bundle, read_table, rescale,
    spearman, write_bundle, write_table, Comparison, DecileBin, FairnessReport, GroupEcdf,
    IndicatorKind, IndicatorSpec, IndicatorTable, IngestConfig, RankOrder, SynthProfile,
    TextFormat, UnknownCitedPolicy, Window, ZeroRefsPolicy,
};

use crate::output::{fixed, OutDir};
use crate::{
    Classify, CorrelateArgs, Failure, FairnessArgs, Global, IndicatorArgs, IngestArgs, Kind,
    Outcome, SynthArgs, UnknownCited, ZeroRefs,
};

fn input_error(message: String) -> Failure {
    Failure::Input(anyhow!(message))
}

pub fn ingest(g: &Global, a: &IngestArgs) -> Outcome {
    let pick = |explicit: &Option<PathBuf>, name: &str| -> Result<PathBuf, Failure> {
        match (explicit, &a.input) {
            (Some(p), _) => Ok(p.clone()),
            (None, Some(dir)) => Ok(dir.join(name)),
            (None, None) => Err(input_error(format!(
                "no path for {name}: pass --input or the file flag"
            ))),
        }
    };
    let paths = InputPaths {
        journals: pick(&a.journals, JOURNALS_FILE)?,
        publications: pick(&a.publications, PUBLICATIONS_FILE)?,
        citations: pick(&a.citations, CITATIONS_FILE)?,
    };
    let delimiter = u8::try_from(a.delimiter)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| input_error(format!("delimiter `{}` is not ASCII", a.delimiter)))?;
    let config = IngestConfig {
        min_cluster_size: a.min_cluster_size,
        unknown_cited_policy: match a.unknown_cited {
            UnknownCited::Drop => UnknownCitedPolicy::Drop,
            UnknownCited::Error => UnknownCitedPolicy::Error,
        },
        zero_refs_policy: match a.zero_refs {
            ZeroRefs::Drop => ZeroRefsPolicy::DropWithWarning,
            ZeroRefs::Error => ZeroRefsPolicy::Error,
        },
        census_year: a.census_year,
    };
    let assembled = ingest::load(&paths, TextFormat { delimiter }, &config).input()?;
    for w in &assembled.warnings {
        eprintln!("warning: {w}");
    }

    let out = OutDir::open(g)?;
    write_bundle(&assembled.dataset, out.root()).internal()?;
    let s = &assembled.summary;
    let mut primary = None;
    if g.format.tsv() {
        primary = Some(out.write("exclusions.tsv", |w| {
            writeln!(w, "field\tvalue")?;
            let rows = [
                ("census_year", s.census_year.to_string()),
                ("retained_clusters", s.retained_clusters.to_string()),
                ("retained_journals", s.retained_journals.to_string()),
                ("retained_publications", s.retained_publications.to_string()),
                ("retained_events", s.retained_events.to_string()),
                ("excluded_clusters", s.excluded_clusters.len().to_string()),
                ("excluded_journals", s.excluded_journals.to_string()),
                ("dropped_publications", s.dropped_publications.to_string()),
                ("dropped_events_excluded", s.dropped_events_excluded.to_string()),
                ("dropped_events_unknown_cited", s.dropped_events_unknown_cited.to_string()),
                ("dropped_events_zero_refs", s.dropped_events_zero_refs.to_string()),
            ];
            for (k, v) in rows {
                writeln!(w, "{k}\t{v}")?;
            }
            for c in &s.excluded_clusters {
                writeln!(w, "excluded_cluster.{}\t{} ({} journals)", c.id, c.name, c.size)?;
            }
            Ok(())
        })?);
    }
    if g.format.structured() {
        let bytes = out.json("exclusions.json", s)?;
        primary.get_or_insert(bytes);
    }
    eprintln!(
        "ingested {} journals in {} clusters, {} citation events (census year {}); excluded {} clusters",
        s.retained_journals,
        s.retained_clusters,
        s.retained_events,
        s.census_year,
        s.excluded_clusters.len()
    );
    out.mirror(&primary.unwrap_or_default())
}

pub fn indicators(g: &Global, a: &IndicatorArgs) -> Outcome {
    let bundle = a.bundle.clone().unwrap_or_else(|| g.out.clone());
    let specs = if a.all {
        IndicatorSpec::catalog()
    } else {
        let kind = match a.kind {
            Kind::ImpactFactor => IndicatorKind::ImpactFactor,
            Kind::TotalCites => IndicatorKind::TotalCites,
            Kind::CpRatio => IndicatorKind::CpRatio,
            Kind::NumeratorOnly => IndicatorKind::NumeratorOnly,
        };
        let window = a.window.unwrap_or(match kind {
            IndicatorKind::TotalCites | IndicatorKind::CpRatio => Window::AllPrior,
            _ => Window::Two,
        });
        vec![IndicatorSpec::new(kind, window, a.counting).input()?]
    };
    let dataset = read_bundle(&bundle).input()?;
    let partition = dataset.partition();
    let out = OutDir::open(g)?;
    let mut last = None;
    for spec in &specs {
        let raw = compute_table(&dataset, spec);
        let mut tables = vec![raw];
        if a.all || a.rescaled {
            tables.push(rescale(&tables[0], &partition).input()?);
        }
        for t in tables {
            out.write(&format!("{}.tsv", t.id()), |w| write_table(&t, w))?;
            eprintln!(
                "{}: {} journals, {} DEFINED",
                t.id(),
                t.len(),
                t.defined_count()
            );
            last = Some(t);
        }
    }
    if let Some(t) = last {
        let mut listing = Vec::new();
        write_ranking(&t, &mut listing).internal()?;
        out.mirror(&listing)?;
    }
    Ok(())
}

fn write_ranking(t: &IndicatorTable, w: &mut Vec<u8>) -> std::io::Result<()> {
    writeln!(w, "rank\tjournal_id\t{}", t.id())?;
    for e in rank_table(t, RankOrder::Descending) {
        writeln!(w, "{}\t{}\t{}", e.rank, e.journal, fixed(e.value, 3))?;
    }
    Ok(())
}

fn load_partition(bundle: &Path) -> Result<Partition, Failure> {
    let file = ingest::parse_journals(&bundle.join(JOURNALS_FILE), TextFormat::default()).input()?;
    Partition::from_records(&file.journals, &file.clusters).input()
}

fn load_tables(paths: &[PathBuf]) -> Result<Vec<IndicatorTable>, Failure> {
    paths
        .iter()
        .map(|p| {
            let file = File::open(p)
                .with_context(|| format!("cannot open {}", p.display()))
                .input()?;
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("table");
            read_table(BufReader::new(file), stem)
                .with_context(|| format!("{}", p.display()))
                .input()
        })
        .collect()
}

#[derive(Serialize)]
struct FairnessOutput<'a> {
    reports: &'a [FairnessReport],
    comparison: Option<Comparison>,
}

pub fn fairness(g: &Global, a: &FairnessArgs) -> Outcome {
    let bundle = a.bundle.clone().unwrap_or_else(|| g.out.clone());
    let partition = load_partition(&bundle)?;
    let tables = load_tables(&a.tables)?;
    let reports = tables
        .iter()
        .map(|t| {
            fairness_test(t, &partition, a.z, a.ci_level)
                .with_context(|| format!("fairness test of {}", t.id()))
                .input()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let comparison = match reports.as_slice() {
        [x, y] => Some(compare_reports(x, y).input()?),
        _ => None,
    };

    let out = OutDir::open(g)?;
    let refs: Vec<&FairnessReport> = reports.iter().collect();
    let mut table = Vec::new();
    write_percentage_table(&refs, &mut table).internal()?;
    if g.format.tsv() {
        out.write("fairness.tsv", |w| w.write_all(&table))?;
        for r in &reports {
            out.write(&format!("{}.intervals.tsv", r.indicator), |w| {
                write_interval_table(r, w)
            })?;
        }
        if let Some(c) = &comparison {
            out.write("comparison.tsv", |w| write_comparison(c, w))?;
        }
    }
    if g.format.structured() {
        out.json(
            "fairness.json",
            &FairnessOutput {
                reports: &reports,
                comparison: comparison.clone(),
            },
        )?;
    }
    for r in &reports {
        eprintln!(
            "{}: n_z = {} of {}, Σ|x−z| = {:.2}, {}/{} clusters within the {}% interval",
            r.indicator,
            r.n_z,
            r.population,
            r.summary.percentages.sum_abs_dev,
            r.summary.clusters_within_ci,
            r.clusters.len(),
            r.ci_level * 100.0
        );
    }
    out.mirror(&table)
}

fn verdict<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn write_comparison(c: &Comparison, w: &mut Vec<u8>) -> std::io::Result<()> {
    writeln!(w, "criterion\tfirst\tsecond\tfavours")?;
    writeln!(w, "sum_abs_dev\t{}\t{}\t{}", c.first, c.second, verdict(&c.sum_abs_dev))?;
    writeln!(w, "sd_pct\t{}\t{}\t{}", c.first, c.second, verdict(&c.sd_pct))?;
    writeln!(w, "within_ci\t{}\t{}\t{}", c.first, c.second, verdict(&c.within_ci))?;
    writeln!(w, "overall\t{}\t{}\t{}", c.first, c.second, verdict(&c.overall))
}

#[derive(Serialize)]
struct PairStats {
    first: String,
    second: String,
    pairs: usize,
    spearman: Option<f64>,
    pearson: Option<f64>,
}

#[derive(Serialize)]
struct DecileSet {
    baseline: String,
    indicator: String,
    bins: Vec<DecileBin>,
}

#[derive(Serialize)]
struct GroupSet {
    indicator: String,
    clusters: Vec<GroupEcdf>,
}

#[derive(Serialize)]
struct KsEntry {
    indicator: String,
    cluster_a: String,
    cluster_b: String,
    d: f64,
}

#[derive(Serialize)]
struct CorrelateOutput {
    indicators: Vec<String>,
    pairs: Vec<PairStats>,
    deciles: Vec<DecileSet>,
    ks: Vec<KsEntry>,
    ecdf: Vec<GroupSet>,
}

pub fn correlate(g: &Global, a: &CorrelateArgs) -> Outcome {
    if a.tables.len() < 2 {
        return Err(input_error(format!(
            "correlate needs at least two indicator tables, got {}",
            a.tables.len()
        )));
    }
    let bundle = a.bundle.clone().unwrap_or_else(|| g.out.clone());
    let partition = load_partition(&bundle)?;
    let tables = load_tables(&a.tables)?;
    let ids: Vec<String> = tables.iter().map(|t| t.id().to_owned()).collect();

    let mut pairs = Vec::new();
    for i in 0..tables.len() {
        for j in i + 1..tables.len() {
            let p = paired_values(&tables[i], &tables[j]);
            let context = || format!("{} vs {}", ids[i], ids[j]);
            pairs.push(PairStats {
                first: ids[i].clone(),
                second: ids[j].clone(),
                pairs: p.x.len(),
                spearman: spearman(&p.x, &p.y).with_context(context).input()?,
                pearson: pearson(&p.x, &p.y).with_context(context).input()?,
            });
        }
    }
    let deciles = tables[1..]
        .iter()
        .map(|t| {
            let bins = decile_correlations(&tables[0], t, a.deciles)
                .with_context(|| format!("deciles of {} against {}", t.id(), ids[0]))
                .input()?;
            Ok(DecileSet {
                baseline: ids[0].clone(),
                indicator: t.id().to_owned(),
                bins,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let ecdf = tables
        .iter()
        .map(|t| {
            let clusters = ecdf_by_group(t, &partition)
                .with_context(|| format!("ECDF of {}", t.id()))
                .input()?;
            Ok(GroupSet {
                indicator: t.id().to_owned(),
                clusters,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let mut ks = Vec::new();
    for set in &ecdf {
        let samples: Vec<Vec<f64>> = set
            .clusters
            .iter()
            .map(|c| c.points.iter().map(|p| p.0).collect())
            .collect();
        for x in 0..set.clusters.len() {
            for y in x + 1..set.clusters.len() {
                ks.push(KsEntry {
                    indicator: set.indicator.clone(),
                    cluster_a: set.clusters[x].cluster.to_string(),
                    cluster_b: set.clusters[y].cluster.to_string(),
                    d: ks_two_sample(&samples[x], &samples[y]).input()?,
                });
            }
        }
    }

    let n = tables.len();
    let mut matrix = Vec::new();
    write_matrix(&ids, &pairs, n, &mut matrix).internal()?;
    let out = OutDir::open(g)?;
    if g.format.tsv() {
        out.write("correlations.tsv", |w| w.write_all(&matrix))?;
        out.write("deciles.tsv", |w| {
            writeln!(w, "baseline\tindicator\tbin\tsize\tbaseline_max\tbaseline_min\trho")?;
            for d in &deciles {
                for b in &d.bins {
                    writeln!(
                        w,
                        "{}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{}",
                        d.baseline,
                        d.indicator,
                        b.bin,
                        b.size,
                        b.baseline_max,
                        b.baseline_min,
                        fixed(b.rho, 3)
                    )?;
                }
            }
            Ok(())
        })?;
        out.write("ecdf.tsv", |w| {
            writeln!(w, "indicator\tcluster_id\tcluster_name\tvalue\tcdf")?;
            for set in &ecdf {
                for c in &set.clusters {
                    for (v, f) in &c.points {
                        writeln!(w, "{}\t{}\t{}\t{v}\t{f}", set.indicator, c.cluster, c.name)?;
                    }
                }
            }
            Ok(())
        })?;
        out.write("ks.tsv", |w| {
            writeln!(w, "indicator\tcluster_a\tcluster_b\td")?;
            for k in &ks {
                writeln!(w, "{}\t{}\t{}\t{:.3}", k.indicator, k.cluster_a, k.cluster_b, k.d)?;
            }
            Ok(())
        })?;
    }
    if g.format.structured() {
        out.json(
            "correlations.json",
            &CorrelateOutput {
                indicators: ids,
                pairs,
                deciles,
                ks,
                ecdf,
            },
        )?;
    }
    out.mirror(&matrix)
}

/// Spearman above the diagonal, Pearson below, blank diagonal.
fn write_matrix(ids: &[String], pairs: &[PairStats], n: usize, w: &mut Vec<u8>) -> std::io::Result<()> {
    let pair = |i: usize, j: usize| {
        // pairs are stored row-major over i < j
        let (a, b) = (i.min(j), i.max(j));
        let index = a * n - a * (a + 1) / 2 + (b - a - 1);
        &pairs[index]
    };
    for id in ids {
        write!(w, "\t{id}")?;
    }
    writeln!(w)?;
    for i in 0..n {
        write!(w, "{}", ids[i])?;
        for j in 0..n {
            let cell = match i.cmp(&j) {
                std::cmp::Ordering::Equal => String::new(),
                std::cmp::Ordering::Less => fixed(pair(i, j).spearman, 3),
                std::cmp::Ordering::Greater => fixed(pair(i, j).pearson, 3),
            };
            write!(w, "\t{cell}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn synth(g: &Global, a: &SynthArgs) -> Outcome {
    let mut profile = if a.profile == "paper2010" {
        paper2010_profile()
    } else {
        let path = Path::new(&a.profile);
        if !path.is_file() {
            return Err(input_error(format!(
                "unknown profile `{}`: expected paper2010 or a JSON profile file",
                a.profile
            )));
        }
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))
            .input()?;
        serde_json::from_str::<SynthProfile>(&text)
            .with_context(|| format!("{}: invalid profile", path.display()))
            .input()?
    };
    if let Some(seed) = a.seed {
        profile.seed = seed;
    }
    let dataset = generate(&profile).input()?;
    let out = OutDir::open(g)?;
    ingest::write_inputs(&dataset, out.root()).internal()?;
    if g.format.structured() {
        out.json("profile.json", &profile)?;
    }
    let mut summary = Vec::new();
    writeln!(summary, "cluster_id\tcluster_name\tjournals").internal()?;
    for c in dataset.clusters() {
        writeln!(summary, "{}\t{}\t{}", c.id, c.name, c.size).internal()?;
    }
    eprintln!(
        "profile {} (seed {}): {} journals in {} clusters, {} publication rows, {} citation events, census year {}",
        profile.name,
        profile.seed,
        dataset.journals().len(),
        dataset.clusters().len(),
        dataset.publications().len(),
        dataset.events().len(),
        dataset.census_year()
    );
    out.mirror(&summary)
}
