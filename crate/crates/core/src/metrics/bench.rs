use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::confusion::percent_or_undefined;
use super::report::{time_fit_eval, EvalReport};
use crate::classifiers::ClassifierSpec;
use crate::dataset::{Dataset, Schema};
use crate::error::{Error, Result};
use crate::preprocess::{apply_minmax, apply_onehot, fit_minmax, fit_onehot, project, FeatureSubset};

/// One feature set of the benchmark grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSetSpec {
    pub tag: String,
    /// None selects all attributes (the full-features baseline).
    pub subset: Option<FeatureSubset>,
    /// Free-form annotation copied into every report of this feature set.
    #[serde(default)]
    pub note: String,
}

/// Everything a benchmark run needs: dataset files, filtration, the feature
/// sets and classifiers of the grid, and seeding.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub train: PathBuf,
    pub test: PathBuf,
    pub schema: Schema,
    /// Columns removed before anything else (id, category attributes).
    pub drop: Vec<String>,
    pub feature_sets: Vec<FeatureSetSpec>,
    pub classifiers: Vec<ClassifierSpec>,
    /// Timed fit/predict repetitions per cell; the median is reported.
    pub timing_repeats: usize,
}

/// Per-feature-set preprocessing cost and encoded width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepInfo {
    pub feature_tag: String,
    pub encoded_width: usize,
    pub prep_seconds: f64,
}

/// Full benchmark output: the report grid plus run provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOutcome {
    pub reports: Vec<EvalReport>,
    pub prep: Vec<PrepInfo>,
    pub train_fingerprint: String,
    pub test_fingerprint: String,
}

/// Run the whole grid: for every feature set, preprocess once (project,
/// normalize, encode), then fit and score every classifier. Cells run
/// serially so timing measurements never overlap; classifiers parallelize
/// internally.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchOutcome> {
    if cfg.feature_sets.is_empty() {
        return Err(Error::invalid_param("feature_sets", "must not be empty"));
    }
    if cfg.classifiers.is_empty() {
        return Err(Error::invalid_param("classifiers", "must not be empty"));
    }
    let drop: Vec<&str> = cfg.drop.iter().map(String::as_str).collect();
    let train_raw = Dataset::load_csv(&cfg.train, &cfg.schema)?;
    let test_raw = Dataset::load_csv(&cfg.test, &cfg.schema)?;
    let train = train_raw.drop_columns(&drop)?;
    let test = test_raw.drop_columns(&drop)?;

    let mut reports = Vec::new();
    let mut prep = Vec::new();
    for feature_set in &cfg.feature_sets {
        let prep_started = Instant::now();
        let subset = feature_set
            .subset
            .clone()
            .unwrap_or_else(|| FeatureSubset::all_attributes(train.schema()));
        let (train_enc, test_enc, width) = preprocess_pair(&train, &test, &subset)?;
        prep.push(PrepInfo {
            feature_tag: feature_set.tag.clone(),
            encoded_width: width,
            prep_seconds: prep_started.elapsed().as_secs_f64(),
        });

        for spec in &cfg.classifiers {
            let mut report = time_fit_eval(spec, &train_enc, &test_enc, cfg.timing_repeats)?;
            report.feature_tag = feature_set.tag.clone();
            report.note = cell_note(spec, &feature_set.note);
            reports.push(report);
        }
    }

    Ok(BenchOutcome {
        reports,
        prep,
        train_fingerprint: train_raw.content_hash(),
        test_fingerprint: test_raw.content_hash(),
    })
}

/// Project both splits onto the subset, normalize with stats fitted on the
/// training rows only, and one-hot encode with the union vocabulary.
/// Returns the encoded pair and the encoded feature width.
pub fn preprocess_pair(
    train: &Dataset,
    test: &Dataset,
    subset: &FeatureSubset,
) -> Result<(Dataset, Dataset, usize)> {
    let train_p = project(train, subset)?;
    let test_p = project(test, subset)?;
    let stats = fit_minmax(&train_p)?;
    let train_n = apply_minmax(&stats, &train_p)?;
    let test_n = apply_minmax(&stats, &test_p)?;
    let encoder = fit_onehot(&train_n, &test_n)?;
    let width = encoder.encoded_width(train_n.schema())?;
    let train_e = apply_onehot(&encoder, &train_n)?;
    let test_e = apply_onehot(&encoder, &test_n)?;
    Ok((train_e, test_e, width))
}

fn cell_note(spec: &ClassifierSpec, feature_note: &str) -> String {
    let mut parts = Vec::new();
    if matches!(spec, ClassifierSpec::Linsvm(_)) {
        parts.push("linear-SVM stand-in; not comparable to RBF-SVM results");
    }
    if !feature_note.is_empty() {
        parts.push(feature_note);
    }
    parts.join("; ")
}

/// Seconds rendered the way the timing table reads: `4.64s` under a minute,
/// `0.74m` from there up.
pub fn humanize_seconds(seconds: f64) -> String {
    if seconds < 60.0 {
        format!("{seconds:.2}s")
    } else {
        format!("{:.2}m", seconds / 60.0)
    }
}

/// Performance grid: one block of ACC/DR/FAR rows per classifier, one column
/// per feature set.
pub fn render_performance(reports: &[EvalReport]) -> String {
    let tags = ordered_tags(reports);
    let mut out = String::new();
    let name_w = 10;
    let col_w = 12;
    out.push_str(&format!("{:<name_w$} {:<8}", "model", "metric"));
    for tag in &tags {
        out.push_str(&format!("{tag:>col_w$}"));
    }
    out.push('\n');
    for report in reports {
        if reports
            .iter()
            .take_while(|r| !std::ptr::eq(*r, report))
            .any(|r| r.classifier == report.classifier)
        {
            continue;
        }
        let kind = report.classifier;
        for (metric, pick) in [
            ("ACC", 0usize),
            ("DR", 1),
            ("FAR", 2),
        ] {
            let label = if pick == 0 { kind.as_str() } else { "" };
            out.push_str(&format!("{label:<name_w$} {metric:<8}"));
            for tag in &tags {
                let cell = reports
                    .iter()
                    .find(|r| r.classifier == kind && &r.feature_tag == tag)
                    .map(|r| {
                        percent_or_undefined(match pick {
                            0 => r.acc,
                            1 => r.dr,
                            _ => r.far,
                        })
                    })
                    .unwrap_or_else(|| "-".to_string());
                out.push_str(&format!("{cell:>col_w$}"));
            }
            out.push('\n');
        }
    }
    let notes: Vec<&str> = {
        let mut seen = Vec::new();
        for r in reports {
            if !r.note.is_empty() && !seen.contains(&r.note.as_str()) {
                seen.push(&r.note);
            }
        }
        seen
    };
    for note in notes {
        out.push_str(&format!("note: {note}\n"));
    }
    out
}

/// Timing grid: one row per feature set, one column per classifier.
pub fn render_timing(reports: &[EvalReport]) -> String {
    let tags = ordered_tags(reports);
    let mut kinds = Vec::new();
    for r in reports {
        if !kinds.contains(&r.classifier) {
            kinds.push(r.classifier);
        }
    }
    let mut out = String::new();
    out.push_str(&format!("{:<12}", "features"));
    for kind in &kinds {
        out.push_str(&format!("{:>10}", kind.as_str()));
    }
    out.push('\n');
    for tag in &tags {
        out.push_str(&format!("{tag:<12}"));
        for kind in &kinds {
            let cell = reports
                .iter()
                .find(|r| r.classifier == *kind && &r.feature_tag == tag)
                .map(|r| humanize_seconds(r.mbt_seconds))
                .unwrap_or_else(|| "-".to_string());
            out.push_str(&format!("{cell:>10}"));
        }
        out.push('\n');
    }
    out
}

/// One CSV row per grid cell. Timing lands in the final columns so that
/// byte-level comparisons of deterministic reruns can strip it.
pub fn reports_to_csv(reports: &[EvalReport]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io_err = |source: csv::Error| Error::Artifact {
        reason: format!("csv render failed: {source}"),
    };
    writer
        .write_record([
            "classifier",
            "feature_set",
            "tp",
            "tn",
            "fp",
            "fn",
            "acc",
            "dr",
            "far",
            "note",
            "mbt_seconds",
            "mbt_runs",
        ])
        .map_err(io_err)?;
    for r in reports {
        let rate = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), |f| f.to_string());
        writer
            .write_record([
                r.classifier.as_str().to_string(),
                r.feature_tag.clone(),
                r.confusion.true_positives.to_string(),
                r.confusion.true_negatives.to_string(),
                r.confusion.false_positives.to_string(),
                r.confusion.false_negatives.to_string(),
                rate(r.acc),
                rate(r.dr),
                rate(r.far),
                r.note.clone(),
                r.mbt_seconds.to_string(),
                r.mbt_runs
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            ])
            .map_err(io_err)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Artifact {
        reason: format!("csv render failed: {e}"),
    })?;
    String::from_utf8(bytes).map_err(|e| Error::Artifact {
        reason: format!("csv render produced invalid utf-8: {e}"),
    })
}

fn ordered_tags(reports: &[EvalReport]) -> Vec<String> {
    let mut tags = Vec::new();
    for r in reports {
        if !tags.contains(&r.feature_tag) {
            tags.push(r.feature_tag.clone());
        }
    }
    tags
}
