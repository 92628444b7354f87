use std::collections::{BinaryHeap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evaluate::{SearchConfig, SubsetEvaluator};
use super::folds::stratified_subsample;
use crate::dataset::Dataset;
use crate::dtree::TreeParams;
use crate::error::{Error, Result};
use crate::preprocess::FeatureSubset;

/// Merits closer than this to the best are not improvements; absorbs float
/// noise in the CV mean.
pub const MERIT_EPSILON: f64 = 1e-6;

pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleInfo {
    pub fraction: f64,
    pub seed: u64,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub version: u32,
    pub rows: usize,
    pub attributes: usize,
    pub folds: usize,
    pub termination: Option<usize>,
    pub seed: u64,
    pub evaluator: TreeParams,
    /// Merit CV runs on raw columns; the tree evaluator is scale-invariant.
    pub merit_data: String,
    pub subsample: Option<SubsampleInfo>,
    pub dataset_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChildRecord {
    pub add: String,
    pub merit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRecord {
    pub index: usize,
    pub subset: Vec<String>,
    pub merit: f64,
    pub children: Vec<ChildRecord>,
    pub best_merit: f64,
    pub best_subset: Vec<String>,
    /// Consecutive non-improving expansions; resets to 0 exactly when the
    /// best merit strictly improves.
    pub counter: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub best_subset: Vec<String>,
    pub best_merit: f64,
    pub distinct_subsets: usize,
    pub evaluator_fits: usize,
    /// `termination` or `exhausted`.
    pub stopped: String,
}

/// One line of the line-delimited search log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TraceRecord {
    Header(TraceHeader),
    Expansion(ExpansionRecord),
    Result(ResultRecord),
}

/// Complete audit log of one search run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub header: TraceHeader,
    pub expansions: Vec<ExpansionRecord>,
    pub result: Option<ResultRecord>,
}

impl SearchTrace {
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&serde_json::to_string(&TraceRecord::Header(
            self.header.clone(),
        ))?);
        out.push('\n');
        for e in &self.expansions {
            out.push_str(&serde_json::to_string(&TraceRecord::Expansion(e.clone()))?);
            out.push('\n');
        }
        if let Some(r) = &self.result {
            out.push_str(&serde_json::to_string(&TraceRecord::Result(r.clone()))?);
            out.push('\n');
        }
        Ok(out)
    }

    /// Parse a (possibly truncated) trace log. Lines that do not parse —
    /// typically a partial final line after an interrupt — are dropped.
    pub fn parse_jsonl(text: &str) -> Vec<TraceRecord> {
        text.lines()
            .filter_map(|line| serde_json::from_str::<TraceRecord>(line).ok())
            .collect()
    }

    /// Subset-to-merit pairs recorded in a trace, for warm-starting a rerun.
    pub fn merits_from_records(records: &[TraceRecord]) -> HashMap<Vec<String>, f64> {
        let mut merits = HashMap::new();
        for record in records {
            if let TraceRecord::Expansion(e) = record {
                merits.insert(canonical(&e.subset), e.merit);
                for child in &e.children {
                    let mut names = e.subset.clone();
                    names.push(child.add.clone());
                    merits.insert(canonical(&names), child.merit);
                }
            }
        }
        merits
    }
}

fn canonical(names: &[String]) -> Vec<String> {
    let mut v = names.to_vec();
    v.sort();
    v
}

/// Search output: the best subset found, its merit, and the full trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: FeatureSubset,
    pub merit: f64,
    pub trace: SearchTrace,
    pub distinct_subsets: usize,
    pub evaluator_fits: usize,
}

/// Open-list entry. Ordering puts the highest merit first; ties prefer the
/// smaller subset, then the lexicographically smallest position sequence.
struct OpenNode {
    merit: f64,
    positions: Vec<u32>,
}

impl PartialEq for OpenNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for OpenNode {}
impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenNode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.merit
            .total_cmp(&other.merit)
            .then_with(|| other.positions.len().cmp(&self.positions.len()))
            .then_with(|| other.positions.cmp(&self.positions))
    }
}

/// Best-first forward selection driven by the tree evaluator's CV merit.
///
/// Starts from the empty subset, always expands the highest-merit open node
/// into its one-feature-addition children, and stops after
/// `cfg.termination` consecutive expansions that fail to improve the best
/// merit (or when the space is exhausted).
pub fn best_first_search(d: &Dataset, cfg: &SearchConfig) -> Result<SearchOutcome> {
    best_first_search_streamed(d, cfg, &HashMap::new(), &mut |_| Ok(()))
}

/// As [`best_first_search`], with a warm-start merit map (from a prior
/// trace) and a sink that receives each trace record as it is produced.
pub fn best_first_search_streamed(
    d: &Dataset,
    cfg: &SearchConfig,
    warm: &HashMap<Vec<String>, f64>,
    sink: &mut dyn FnMut(&TraceRecord) -> Result<()>,
) -> Result<SearchOutcome> {
    if d.schema().attribute_count() == 0 {
        return Err(Error::NoAttributes);
    }

    let subsampled;
    let (data, subsample_info) = match cfg.subsample {
        Some(fraction) if fraction < 1.0 => {
            let rows = stratified_subsample(d, fraction, cfg.seed)?;
            let info = SubsampleInfo {
                fraction,
                seed: cfg.seed,
                rows: rows.len(),
            };
            subsampled = d.select_rows(&rows);
            (&subsampled, Some(info))
        }
        _ => (d, None),
    };

    let evaluator = SubsetEvaluator::new(data, cfg)?;
    evaluator.warm(warm)?;

    let header = TraceHeader {
        version: TRACE_VERSION,
        rows: data.row_count(),
        attributes: data.schema().attribute_count(),
        folds: cfg.folds,
        termination: cfg.termination,
        seed: cfg.seed,
        evaluator: cfg.evaluator.clone(),
        merit_data: "raw".to_string(),
        subsample: subsample_info,
        dataset_hash: d.content_hash(),
    };
    sink(&TraceRecord::Header(header.clone()))?;

    let schema = data.schema();
    let names_of = |positions: &[u32]| -> Vec<String> {
        positions
            .iter()
            .map(|&p| schema.column(p as usize).name.clone())
            .collect()
    };
    let attribute_positions: Vec<u32> =
        schema.attribute_positions().map(|p| p as u32).collect();

    let mut open = BinaryHeap::new();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut expansions: Vec<ExpansionRecord> = Vec::new();

    let empty: Vec<u32> = Vec::new();
    let empty_merit = evaluator.merit_positions(&empty)?;
    seen.insert(empty.clone());
    open.push(OpenNode {
        merit: empty_merit,
        positions: empty,
    });

    let mut best_merit = f64::NEG_INFINITY;
    let mut best_positions: Vec<u32> = Vec::new();
    let mut counter = 0usize;
    let mut stopped = "exhausted";

    while let Some(node) = open.pop() {
        // Children first (the spec'd expansion order), counter bookkeeping after.
        let children_positions: Vec<Vec<u32>> = attribute_positions
            .iter()
            .filter(|p| !node.positions.contains(p))
            .map(|&p| {
                let mut child = node.positions.clone();
                let at = child.partition_point(|&q| q < p);
                child.insert(at, p);
                child
            })
            .filter(|child| !seen.contains(child))
            .collect();
        let merits: Vec<f64> = children_positions
            .par_iter()
            .map(|child| evaluator.merit_positions(child))
            .collect::<Result<_>>()?;

        if node.merit > best_merit + MERIT_EPSILON {
            best_merit = node.merit;
            best_positions = node.positions.clone();
            counter = 0;
        } else {
            counter += 1;
        }

        let mut children_records = Vec::with_capacity(children_positions.len());
        for (child, &merit) in children_positions.iter().zip(&merits) {
            let added = child
                .iter()
                .find(|p| !node.positions.contains(p))
                .expect("child adds one position");
            children_records.push(ChildRecord {
                add: schema.column(*added as usize).name.clone(),
                merit,
            });
            seen.insert(child.clone());
            open.push(OpenNode {
                merit,
                positions: child.clone(),
            });
        }

        let record = ExpansionRecord {
            index: expansions.len(),
            subset: names_of(&node.positions),
            merit: node.merit,
            children: children_records,
            best_merit,
            best_subset: names_of(&best_positions),
            counter,
        };
        sink(&TraceRecord::Expansion(record.clone()))?;
        expansions.push(record);

        if let Some(limit) = cfg.termination {
            if counter >= limit {
                stopped = "termination";
                break;
            }
        }
    }

    let result = ResultRecord {
        best_subset: names_of(&best_positions),
        best_merit,
        distinct_subsets: evaluator.distinct_subsets(),
        evaluator_fits: evaluator.evaluator_fits(),
        stopped: stopped.to_string(),
    };
    sink(&TraceRecord::Result(result.clone()))?;

    Ok(SearchOutcome {
        best: FeatureSubset::new(result.best_subset.clone())?,
        merit: best_merit,
        trace: SearchTrace {
            header,
            expansions,
            result: Some(result.clone()),
        },
        distinct_subsets: result.distinct_subsets,
        evaluator_fits: result.evaluator_fits,
    })
}
