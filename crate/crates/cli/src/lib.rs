//! Pipeline behind the `novascape` binary. Each subcommand is a method on
//! [`Pipeline`]; outputs land under the configured output directory:
//!
//! ```text
//! ingest/{corpus.csv, raw.csv, registry.txt, filter_report.json}
//! scores.csv
//! landscape/landscape_{year}.{graphml,json,svg}, landscape/centroids.csv
//! stats/{descriptives.csv, group_tests.csv, primary.txt, robustness.txt,
//!        poisson.txt, marginal_means.csv, models/*.csv}
//! synth/{corpus.csv, registry.txt}
//! ```

mod config;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use novascape::corpus::{
    apply_filters, load_registry, parse_records, write_records, FeatureRegistry, FilterReport, RecordSet,
};
use novascape::landscape::{
    build_landscape, build_snapshots, centroids, final_layout, render_svg, ExportFormat, ExportedGraph, LandscapeError,
    LandscapeParams, LayoutOptions, Positions,
};
use novascape::metrics::{score_corpus, ComparisonSet, ScoreTable, WindowSpec};
use novascape::stats::{
    build_design, coefficient_csv, describe_frame, fit_glm, mann_whitney_u, marginal_means, poisson_models,
    primary_models, regression_table, score_column, standardize, DesignMatrix, Family, FitResult, Frame, GlmOptions,
    ModelSpec, ReportColumn, StatsError, DESCRIBE_HEADER,
};
use novascape::synth::generate_corpus;
use rayon::prelude::*;
use thiserror::Error;

pub use config::{LandscapeConfig, PipelineConfig};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input error: {0}")]
    Input(String),
    #[error("empty result: {0}")]
    Empty(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Empty(_) => 3,
            Self::Numeric(_) => 4,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> PipelineError {
    PipelineError::Input(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Graphml,
    Svg,
    Dot,
}

/// Writes to a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), PipelineError> {
    let io = |e: std::io::Error| PipelineError::Input(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v}"))
}

/// Published crowdfunded coefficients, keyed by (outcome metric, family, span).
fn reference_value(spec: &ModelSpec) -> Option<f64> {
    let (metric, span) = spec.outcome.rsplit_once('_')?;
    let span: u32 = span.strip_suffix('y')?.parse().ok()?;
    let v = match (metric, spec.family, span) {
        ("distinctiveness", Family::Ols, 1) => 0.237,
        ("distinctiveness", Family::Ols, 2) => 0.235,
        ("distinctiveness", Family::Ols, 5) => 0.242,
        ("novelty_binary", Family::Logistic, 1) => 0.445,
        ("novelty_binary", Family::Logistic, 2) => 0.412,
        ("novelty_binary", Family::Logistic, 5) => 0.365,
        ("resonance", Family::Ols, 1) => 0.010,
        ("resonance", Family::Ols, 2) => 0.014,
        ("resonance", Family::Ols, 5) => 0.055,
        ("novelty_count", Family::Poisson, 1) => 0.211,
        ("novelty_count", Family::Poisson, 2) => 0.226,
        ("novelty_count", Family::Poisson, 5) => 0.243,
        _ => return None,
    };
    Some(v)
}

fn column_header(spec: &ModelSpec) -> String {
    let Some((metric, span)) = spec.outcome.rsplit_once('_') else {
        return spec.outcome.clone();
    };
    let name = match metric {
        "distinctiveness" => "Distinct.",
        "novelty_binary" => "Novelty",
        "novelty_count" => "Count Nov.",
        "resonance" => "Resonance",
        _ => return spec.outcome.clone(),
    };
    format!("{}-{name}", span.to_uppercase())
}

struct ModelGroup {
    stem: &'static str,
    title: String,
    specs: Vec<ModelSpec>,
}

struct Fitted {
    spec: ModelSpec,
    result: Result<(DesignMatrix, FitResult), StatsError>,
}

/// Summary of a `stats` run.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsSummary {
    pub fitted: usize,
    pub failed: Vec<(String, String)>,
}

pub struct Pipeline {
    pub cfg: PipelineConfig,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Self {
        Self { cfg }
    }

    fn out(&self, rel: &str) -> PathBuf {
        self.cfg.out_dir.join(rel)
    }

    fn registry(&self) -> Result<FeatureRegistry, PipelineError> {
        match &self.cfg.registry_path {
            Some(p) => load_registry(p).map_err(input),
            None => Ok(FeatureRegistry::canonical()),
        }
    }

    /// Validates and filters the corpus, caching the result for later steps.
    pub fn ingest(&self) -> Result<FilterReport, PipelineError> {
        self.cfg.validate()?;
        let corpus =
            self.cfg.corpus_path.as_ref().ok_or_else(|| PipelineError::Input("no corpus_path configured".into()))?;
        let registry = Arc::new(self.registry()?);
        let raw = parse_records(corpus, registry.clone()).map_err(input)?;
        let (filtered, report) = apply_filters(&raw, &self.cfg.filter);
        let mut buf = Vec::new();
        write_records(&mut buf, &raw).map_err(input)?;
        write_atomic(&self.out("ingest/raw.csv"), &buf)?;
        buf.clear();
        write_records(&mut buf, &filtered).map_err(input)?;
        write_atomic(&self.out("ingest/corpus.csv"), &buf)?;
        write_atomic(&self.out("ingest/registry.txt"), registry.to_text())?;
        let json = serde_json::to_string_pretty(&report).map_err(input)? + "\n";
        write_atomic(&self.out("ingest/filter_report.json"), json)?;
        Ok(report)
    }

    fn load_cached(&self, name: &str) -> Result<RecordSet, PipelineError> {
        let reg_path = self.out("ingest/registry.txt");
        let path = self.out(&format!("ingest/{name}"));
        if !reg_path.exists() || !path.exists() {
            return Err(PipelineError::Input(format!("missing ingest cache {}; run ingest first", path.display())));
        }
        let registry = Arc::new(load_registry(&reg_path).map_err(input)?);
        parse_records(&path, registry).map_err(input)
    }

    fn last_complete_year(&self, records: &RecordSet) -> Option<i32> {
        self.cfg.last_complete_year.or_else(|| records.year_range().map(|(_, hi)| hi))
    }

    /// Scores the cached corpus for every configured span.
    pub fn score(&self, format: Option<OutputFormat>) -> Result<ScoreTable, PipelineError> {
        self.cfg.validate()?;
        let records = self.load_cached("corpus.csv")?;
        let raw = match self.cfg.comparison_set {
            ComparisonSet::Raw => Some(self.load_cached("raw.csv")?),
            ComparisonSet::Filtered => None,
        };
        let spans: Vec<WindowSpec> = self
            .cfg
            .spans
            .iter()
            .map(|&s| WindowSpec { span_years: s, comparison_set: self.cfg.comparison_set })
            .collect();
        let last = self.last_complete_year(&records).unwrap_or(i32::MIN);
        let table = score_corpus(&records, raw.as_ref(), &spans, last).map_err(input)?;
        for &s in &self.cfg.spans {
            let missing = table.unscoreable().iter().filter(|(_, sp)| *sp == s).count();
            if missing > 0 {
                eprintln!(
                    "warning: {missing} of {} records unscoreable at span {s} (empty look-back window)",
                    records.len()
                );
            }
        }
        if table.rows().is_empty() {
            eprintln!("warning: no record could be scored");
        }
        match format {
            None | Some(OutputFormat::Csv) => {
                let mut buf = Vec::new();
                table.write_csv(&mut buf).map_err(input)?;
                write_atomic(&self.out("scores.csv"), buf)?;
            }
            Some(OutputFormat::Json) => {
                let rows: Vec<serde_json::Value> = table
                    .rows()
                    .iter()
                    .map(|r| {
                        serde_json::json!({
                            "id": r.record_id,
                            "span": r.span(),
                            "distinctiveness": r.distinctiveness,
                            "novelty_count": r.novelty_count,
                            "novelty_binary": r.novelty_binary,
                            "resonance": r.resonance,
                        })
                    })
                    .collect();
                write_atomic(&self.out("scores.json"), serde_json::to_string_pretty(&rows).map_err(input)? + "\n")?;
            }
            Some(f) => return Err(PipelineError::Input(format!("score cannot write {f:?}"))),
        }
        Ok(table)
    }

    fn load_scores(&self) -> Result<ScoreTable, PipelineError> {
        let path = self.out("scores.csv");
        let file = std::fs::File::open(&path)
            .map_err(|e| PipelineError::Input(format!("{}: {e}; run score first", path.display())))?;
        ScoreTable::read_csv(file).map_err(input)
    }

    /// Snapshot graphs with one fixed layout computed on the last corpus year,
    /// plus per-year funding-group centroids.
    pub fn landscape(&self, format: Option<OutputFormat>) -> Result<Vec<i32>, PipelineError> {
        let formats: Vec<OutputFormat> = match format {
            None => vec![OutputFormat::Graphml, OutputFormat::Json, OutputFormat::Svg],
            Some(OutputFormat::Csv) => return Err(PipelineError::Input("landscape cannot write csv".into())),
            Some(f) => vec![f],
        };
        let records = self.load_cached("corpus.csv")?;
        let Some((_, last_year)) = records.year_range() else {
            return Err(PipelineError::Empty("corpus is empty".into()));
        };
        let lc = &self.cfg.landscape;
        let params = LandscapeParams { min_type_count: lc.min_type_count, cf_share_threshold: lc.cf_share_threshold };
        let years: Vec<i32> = if lc.snapshot_years.is_empty() { vec![last_year] } else { lc.snapshot_years.clone() };
        let final_graph = build_landscape(&records, last_year, &params);
        let positions = final_layout(&final_graph, lc.seed, &LayoutOptions::default()).map_err(|e| match e {
            LandscapeError::EmptyGraph => {
                PipelineError::Empty(format!("no vector type reaches min_type_count = {}", lc.min_type_count))
            }
            other => input(other),
        })?;
        eprintln!("landscape layout seed: {}", lc.seed);

        let snapshots = build_snapshots(&records, &years, &params);
        let mut centroid_rows = Vec::new();
        for g in &snapshots {
            let pos: Positions =
                g.nodes.iter().filter_map(|n| positions.get(&n.vector).map(|p| (n.vector.clone(), *p))).collect();
            let (cf, trad) = centroids(&pos, &records, g.snapshot_year, lc.centroid_weighting);
            for (group, c) in [("crowdfunded", cf), ("traditional", trad)] {
                centroid_rows.push(vec![
                    g.snapshot_year.to_string(),
                    group.to_string(),
                    fmt_opt(c.map(|c| c.point.x)),
                    fmt_opt(c.map(|c| c.point.y)),
                ]);
            }
            let exported = ExportedGraph::from_graph(g, Some(&pos), Some(lc.seed));
            for f in &formats {
                let (ext, text) = match f {
                    OutputFormat::Graphml => ("graphml", exported.render(ExportFormat::GraphMl)),
                    OutputFormat::Json => ("json", exported.render(ExportFormat::Json)),
                    OutputFormat::Dot => ("dot", exported.render(ExportFormat::Dot)),
                    OutputFormat::Svg => {
                        ("svg", render_svg(g, &pos, &[cf, trad].into_iter().flatten().collect::<Vec<_>>()))
                    }
                    OutputFormat::Csv => unreachable!(),
                };
                write_atomic(&self.out(&format!("landscape/landscape_{}.{ext}", g.snapshot_year)), text)?;
            }
        }
        write_atomic(&self.out("landscape/centroids.csv"), csv_string(&["year", "group", "x", "y"], centroid_rows))?;
        Ok(snapshots.iter().map(|g| g.snapshot_year).collect())
    }

    fn model_groups(&self, spans: &[u32]) -> Vec<ModelGroup> {
        if let Some(models) = &self.cfg.models {
            return vec![ModelGroup { stem: "models", title: "Models".into(), specs: models.clone() }];
        }
        let mut groups = Vec::new();
        if spans.contains(&2) {
            groups.push(ModelGroup {
                stem: "primary",
                title: "Innovation outcomes, 2-year windows".into(),
                specs: primary_models(2),
            });
        }
        let robust: Vec<u32> = spans.iter().copied().filter(|&s| s != 2).collect();
        if !robust.is_empty() {
            groups.push(ModelGroup {
                stem: "robustness",
                title: "Innovation outcomes, alternative windows".into(),
                specs: robust.iter().flat_map(|&s| primary_models(s)).collect(),
            });
        }
        groups.push(ModelGroup {
            stem: "poisson",
            title: "Count novelty, Poisson models".into(),
            specs: poisson_models(spans),
        });
        groups
    }

    /// Descriptives, group tests, regression tables and marginal means. Every
    /// model is attempted; failures are reported together at the end.
    pub fn stats(&self) -> Result<StatsSummary, PipelineError> {
        let records = self.load_cached("corpus.csv")?;
        let scores = self.load_scores()?;
        let frame = Frame::from_records(&records, Some(&scores));
        let spans = scores.spans();

        let controls = [
            "crowdfunded",
            "team_size",
            "debut",
            "complexity",
            "playing_time",
            "min_players",
            "max_players",
            "min_age",
            "is_expansion",
            "is_adult",
            "num_ratings",
            "num_mechanisms",
        ];
        let metrics = ["distinctiveness", "novelty_count", "novelty_binary", "resonance"];
        let mut variables: Vec<String> = controls.iter().map(|s| s.to_string()).collect();
        for &s in &spans {
            variables.extend(metrics.iter().map(|m| score_column(m, s)));
        }
        let names: Vec<&str> = variables.iter().map(String::as_str).collect();
        let desc = describe_frame(&frame, &names);
        write_atomic(
            &self.out("stats/descriptives.csv"),
            csv_string(&DESCRIBE_HEADER, desc.iter().map(|d| d.row().to_vec())),
        )?;

        let cf = frame.numeric("crowdfunded").map_err(input)?;
        let mut group_rows = Vec::new();
        for v in names.iter().filter(|v| **v != "crowdfunded") {
            let col = frame.numeric(v).map_err(input)?;
            let (mut x, mut y) = (Vec::new(), Vec::new());
            for (val, flag) in col.iter().zip(cf) {
                if let (Some(val), Some(flag)) = (val, flag) {
                    if *flag == 1.0 {
                        x.push(*val)
                    } else {
                        y.push(*val)
                    }
                }
            }
            let row = match mann_whitney_u(&x, &y) {
                Ok(r) => vec![
                    v.to_string(),
                    r.n.0.to_string(),
                    r.n.1.to_string(),
                    format!("{}", r.group_means.0),
                    format!("{}", r.group_means.1),
                    format!("{}", r.u_statistic),
                    format!("{}", r.u_min()),
                    format!("{}", r.p_value),
                    format!("{}", r.auc),
                    u8::from(r.exact).to_string(),
                ],
                Err(_) => {
                    let mut row = vec![v.to_string(), x.len().to_string(), y.len().to_string()];
                    row.extend(std::iter::repeat_n("NA".to_string(), 7));
                    row
                }
            };
            group_rows.push(row);
        }
        write_atomic(
            &self.out("stats/group_tests.csv"),
            csv_string(
                &[
                    "variable",
                    "n_crowdfunded",
                    "n_traditional",
                    "mean_crowdfunded",
                    "mean_traditional",
                    "u_crowdfunded",
                    "u_min",
                    "p_value",
                    "auc",
                    "exact",
                ],
                group_rows,
            ),
        )?;

        let groups = self.model_groups(&spans);
        let mut summary = StatsSummary { fitted: 0, failed: Vec::new() };
        let mut mm_rows = Vec::new();
        let mut only_empty = true;
        for group in &groups {
            let fitted: Vec<Fitted> = group
                .specs
                .par_iter()
                .map(|spec| Fitted {
                    spec: spec.clone(),
                    result: build_design(&frame, spec).and_then(|d| {
                        let f = fit_glm(&d, spec.family, spec.robust_se, &GlmOptions::default())?;
                        Ok((d, f))
                    }),
                })
                .collect();
            let mut columns = Vec::new();
            for (i, f) in fitted.iter().enumerate() {
                let label = format!("{}_{}_{}", group.stem, i + 1, f.spec.outcome);
                match &f.result {
                    Ok((design, fit)) => {
                        summary.fitted += 1;
                        write_atomic(&self.out(&format!("stats/models/{label}.csv")), coefficient_csv(fit))?;
                        if !fit.converged {
                            eprintln!("warning: {label} did not converge after {} iterations", fit.iterations);
                        }
                        if fit.terms.iter().any(|t| t == "crowdfunded") {
                            let (mean, sd) = standardize(design.y.as_slice());
                            let mm = marginal_means(fit, design, "crowdfunded", &[0.0, 1.0]).map_err(input)?;
                            for m in mm {
                                let z = (fit.family == Family::Ols).then(|| m.standardized(mean, sd));
                                mm_rows.push(vec![
                                    label.clone(),
                                    f.spec.family.as_str().to_string(),
                                    format!("{}", m.level),
                                    format!("{}", m.estimate),
                                    format!("{}", m.se),
                                    format!("{}", m.lower),
                                    format!("{}", m.upper),
                                    fmt_opt(z.map(|z| z.estimate)),
                                    fmt_opt(z.map(|z| z.lower)),
                                    fmt_opt(z.map(|z| z.upper)),
                                ]);
                            }
                        }
                    }
                    Err(e) => {
                        eprintln!("error: model {label} failed: {e}");
                        only_empty &= matches!(e, StatsError::NoObservations);
                        summary.failed.push((label.clone(), e.to_string()));
                    }
                }
                columns.push(ReportColumn {
                    header: column_header(&f.spec),
                    spec: f.spec.clone(),
                    fit: f.result.as_ref().map(|(_, fit)| fit.clone()).map_err(|e| e.to_string()),
                    reference: if self.cfg.models.is_none() { reference_value(&f.spec) } else { None },
                });
            }
            write_atomic(&self.out(&format!("stats/{}.txt", group.stem)), regression_table(&group.title, &columns))?;
        }
        write_atomic(
            &self.out("stats/marginal_means.csv"),
            csv_string(
                &[
                    "model",
                    "family",
                    "crowdfunded",
                    "estimate",
                    "se",
                    "lower",
                    "upper",
                    "std_estimate",
                    "std_lower",
                    "std_upper",
                ],
                mm_rows,
            ),
        )?;
        if summary.failed.is_empty() {
            Ok(summary)
        } else if only_empty {
            Err(PipelineError::Empty(format!("{} model(s) had no complete cases", summary.failed.len())))
        } else {
            Err(PipelineError::Numeric(format!("{} model(s) failed", summary.failed.len())))
        }
    }

    /// Writes a synthetic corpus and its registry; returns their paths.
    pub fn synth(&self) -> Result<(PathBuf, PathBuf), PipelineError> {
        let set = generate_corpus(&self.cfg.synth).map_err(input)?;
        eprintln!("synth seed: {}", self.cfg.synth.seed);
        let mut buf = Vec::new();
        write_records(&mut buf, &set).map_err(input)?;
        let corpus = self.out("synth/corpus.csv");
        let registry = self.out("synth/registry.txt");
        write_atomic(&corpus, buf)?;
        write_atomic(&registry, set.registry().to_text())?;
        Ok((corpus, registry))
    }

    /// Ingest, score, landscape and stats in sequence. Without a corpus the
    /// synthetic generator supplies one.
    pub fn report(&mut self, format: Option<OutputFormat>) -> Result<(), PipelineError> {
        let echo = serde_json::to_string_pretty(&self.cfg).map_err(input)? + "\n";
        write_atomic(&self.out("config.json"), echo)?;
        if self.cfg.corpus_path.is_none() {
            let (corpus, registry) = self.synth()?;
            self.cfg.corpus_path = Some(corpus);
            self.cfg.registry_path = Some(registry);
            if self.cfg.last_complete_year.is_none() {
                self.cfg.last_complete_year = Some(self.cfg.synth.last_complete_year());
            }
        }
        self.ingest()?;
        self.score(None)?;
        let landscape_format = format.filter(|f| *f != OutputFormat::Csv);
        self.landscape(landscape_format)?;
        self.stats()?;
        Ok(())
    }
}

/// Sorted, de-duplicated spans parsed from `1,2,5`.
pub fn parse_spans(s: &str) -> Result<Vec<u32>, PipelineError> {
    let spans: BTreeSet<u32> = s
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|_| PipelineError::Input(format!("bad span {p:?}"))))
        .collect::<Result<_, _>>()?;
    Ok(spans.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_parse() {
        assert_eq!(parse_spans("5,1,2,2").unwrap(), vec![1, 2, 5]);
        assert!(parse_spans("1,x").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(PipelineError::Input(String::new()).exit_code(), 2);
        assert_eq!(PipelineError::Empty(String::new()).exit_code(), 3);
        assert_eq!(PipelineError::Numeric(String::new()).exit_code(), 4);
    }

    #[test]
    fn references_and_headers() {
        let p = primary_models(2);
        assert_eq!(reference_value(&p[0]), Some(0.235));
        assert_eq!(reference_value(&p[1]), Some(0.412));
        assert_eq!(reference_value(&poisson_models(&[5])[0]), Some(0.243));
        assert_eq!(column_header(&p[2]), "2Y-Resonance");
    }

    #[test]
    fn atomic_write_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.txt");
        write_atomic(&p, "x").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "x");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
