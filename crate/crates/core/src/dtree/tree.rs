use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::prune::added_errors;
use super::split::{
    gain_ratio_of, gini_decrease, threshold_scan, Criterion, GAIN_EPSILON,
};
use super::view::{AttrData, TrainingView};
use crate::dataset::{Column, ColumnKind, Dataset, Label};
use crate::error::{Error, Result};

/// Induction controls for the gain-ratio tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Minimum rows each side of a numeric cut must keep; nominal splits
    /// need at least two branches this large.
    pub min_leaf: usize,
    /// Confidence for pessimistic-error pruning, in (0, 1).
    pub pruning_confidence: f64,
    pub max_depth: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_leaf: 2,
            pruning_confidence: 0.25,
            max_depth: None,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_leaf < 1 {
            return Err(Error::invalid_param("min_leaf", "must be at least 1"));
        }
        if !(self.pruning_confidence > 0.0 && self.pruning_confidence < 1.0) {
            return Err(Error::invalid_param(
                "pruning_confidence",
                "must lie strictly between 0 and 1",
            ));
        }
        Ok(())
    }
}

/// Attribute referenced by tree nodes: its name, kind, and (for nominal
/// attributes) the category vocabulary observed at fit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct TreeAttr {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
}

/// Class counts at a node: `[normal, attack]`.
pub(crate) type NodeCounts = [u32; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub(crate) enum Node {
    Leaf {
        label: Label,
        counts: NodeCounts,
    },
    Numeric {
        attr: u32,
        threshold: f64,
        left: u32,
        right: u32,
        counts: NodeCounts,
    },
    Nominal {
        attr: u32,
        /// `(category index, child node)`, ascending by category index.
        edges: Vec<(u32, u32)>,
        /// Child that takes absent and unseen categories: the child with the
        /// most training rows.
        default_child: u32,
        counts: NodeCounts,
    },
}

impl Node {
    fn counts(&self) -> NodeCounts {
        match self {
            Node::Leaf { counts, .. }
            | Node::Numeric { counts, .. }
            | Node::Nominal { counts, .. } => *counts,
        }
    }
}

fn majority(counts: NodeCounts) -> Label {
    // Ties predict attack: failing toward detection is the safer default.
    if counts[1] >= counts[0] {
        Label::Attack
    } else {
        Label::Normal
    }
}

/// A fitted decision tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub(crate) attrs: Vec<TreeAttr>,
    pub(crate) nodes: Vec<Node>,
    pub(crate) root: u32,
}

/// How induction scores candidate splits and samples attributes.
pub(crate) struct Induction {
    pub criterion: Criterion,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    /// Attributes drawn uniformly per node (random forests); None uses all.
    pub features_per_node: Option<usize>,
    /// Pessimistic-error pruning confidence; None disables pruning.
    pub prune_confidence: Option<f64>,
}

impl DecisionTree {
    /// Top-down induction choosing maximum-gain-ratio splits, followed by
    /// pessimistic-error pruning with subtree replacement.
    pub fn fit(train: &Dataset, params: &TreeParams) -> Result<DecisionTree> {
        params.validate()?;
        if train.row_count() == 0 {
            return Err(Error::EmptyDataset);
        }
        let view = TrainingView::all(train);
        let rows: Vec<u32> = (0..train.row_count() as u32).collect();
        let induction = Induction {
            criterion: Criterion::GainRatio,
            min_leaf: params.min_leaf,
            max_depth: params.max_depth,
            features_per_node: None,
            prune_confidence: Some(params.pruning_confidence),
        };
        Ok(fit_view(&view, rows, &induction, None))
    }

    /// One prediction per row of `d`. Attributes the tree was fit on must be
    /// present in `d` with the same kind; unseen nominal categories route to
    /// the node's default child.
    pub fn predict(&self, d: &Dataset) -> Result<Vec<Label>> {
        let accessors = self.bind(d)?;
        Ok((0..d.row_count())
            .map(|row| self.predict_bound(&accessors, row))
            .collect())
    }

    /// Bind the tree's attributes to columns of `d`, translating category
    /// codes. Fails on a missing column or a kind mismatch.
    pub(crate) fn bind<'a>(&self, d: &'a Dataset) -> Result<Vec<BoundAttr<'a>>> {
        self.attrs
            .iter()
            .map(|attr| {
                let pos = d.schema().position_of(&attr.name).ok_or_else(|| {
                    Error::SchemaMismatch {
                        reason: format!("column {:?} missing from prediction data", attr.name),
                    }
                })?;
                match (d.column(pos), attr.kind) {
                    (Column::Numeric(v), ColumnKind::Numeric) => Ok(BoundAttr::Numeric(v)),
                    (Column::Nominal(c), ColumnKind::Nominal) => {
                        let translate = c
                            .vocab()
                            .iter()
                            .map(|cat| {
                                attr.categories
                                    .iter()
                                    .position(|k| k == cat)
                                    .map_or(u32::MAX, |i| i as u32)
                            })
                            .collect();
                        Ok(BoundAttr::Nominal {
                            codes: c.codes(),
                            translate,
                        })
                    }
                    _ => Err(Error::SchemaMismatch {
                        reason: format!(
                            "column {:?} has a different kind than at fit time",
                            attr.name
                        ),
                    }),
                }
            })
            .collect()
    }

    pub(crate) fn predict_bound(&self, accessors: &[BoundAttr<'_>], row: usize) -> Label {
        let mut idx = self.root;
        loop {
            match &self.nodes[idx as usize] {
                Node::Leaf { label, .. } => return *label,
                Node::Numeric {
                    attr,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    let value = match &accessors[*attr as usize] {
                        BoundAttr::Numeric(v) => v[row],
                        _ => unreachable!("bound accessor matches node kind"),
                    };
                    idx = if value <= *threshold { *left } else { *right };
                }
                Node::Nominal {
                    attr,
                    edges,
                    default_child,
                    ..
                } => {
                    let code = match &accessors[*attr as usize] {
                        BoundAttr::Nominal { codes, translate } => {
                            translate[codes[row] as usize]
                        }
                        _ => unreachable!("bound accessor matches node kind"),
                    };
                    idx = edges
                        .iter()
                        .find(|(cat, _)| *cat == code)
                        .map(|(_, child)| *child)
                        .unwrap_or(*default_child);
                }
            }
        }
    }

    /// Attack fraction of the leaf each row lands in.
    pub fn leaf_attack_fractions(&self, d: &Dataset) -> Result<Vec<f64>> {
        let accessors = self.bind(d)?;
        Ok((0..d.row_count())
            .map(|row| {
                let mut idx = self.root;
                loop {
                    match &self.nodes[idx as usize] {
                        Node::Leaf { counts, .. } => {
                            let total = counts[0] + counts[1];
                            return if total == 0 {
                                1.0
                            } else {
                                counts[1] as f64 / total as f64
                            };
                        }
                        Node::Numeric {
                            attr,
                            threshold,
                            left,
                            right,
                            ..
                        } => {
                            let value = match &accessors[*attr as usize] {
                                BoundAttr::Numeric(v) => v[row],
                                _ => unreachable!(),
                            };
                            idx = if value <= *threshold { *left } else { *right };
                        }
                        Node::Nominal {
                            attr,
                            edges,
                            default_child,
                            ..
                        } => {
                            let code = match &accessors[*attr as usize] {
                                BoundAttr::Nominal { codes, translate } => {
                                    translate[codes[row] as usize]
                                }
                                _ => unreachable!(),
                            };
                            idx = edges
                                .iter()
                                .find(|(cat, _)| *cat == code)
                                .map(|(_, child)| *child)
                                .unwrap_or(*default_child);
                        }
                    }
                }
            })
            .collect())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: u32) -> usize {
            match &nodes[idx as usize] {
                Node::Leaf { .. } => 0,
                Node::Numeric { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
                Node::Nominal { edges, .. } => {
                    1 + edges
                        .iter()
                        .map(|(_, child)| walk(nodes, *child))
                        .max()
                        .unwrap_or(0)
                }
            }
        }
        walk(&self.nodes, self.root)
    }

    /// Name of the attribute tested at the root, if the root is a split.
    pub fn root_attribute(&self) -> Option<&str> {
        match &self.nodes[self.root as usize] {
            Node::Leaf { .. } => None,
            Node::Numeric { attr, .. } | Node::Nominal { attr, .. } => {
                Some(&self.attrs[*attr as usize].name)
            }
        }
    }

    /// Misclassified fraction of the training rows recorded in the leaves.
    pub fn training_error(&self) -> f64 {
        fn walk(nodes: &[Node], idx: u32, errors: &mut u64, total: &mut u64) {
            match &nodes[idx as usize] {
                Node::Leaf { counts, .. } => {
                    *errors += u64::from(counts[0].min(counts[1]));
                    *total += u64::from(counts[0] + counts[1]);
                }
                Node::Numeric { left, right, .. } => {
                    walk(nodes, *left, errors, total);
                    walk(nodes, *right, errors, total);
                }
                Node::Nominal { edges, .. } => {
                    for (_, child) in edges {
                        walk(nodes, *child, errors, total);
                    }
                }
            }
        }
        let (mut errors, mut total) = (0u64, 0u64);
        walk(&self.nodes, self.root, &mut errors, &mut total);
        if total == 0 {
            0.0
        } else {
            errors as f64 / total as f64
        }
    }
}

pub(crate) enum BoundAttr<'a> {
    Numeric(&'a [f64]),
    Nominal {
        codes: &'a [u32],
        /// Dataset category code -> tree category index, `u32::MAX` if unseen.
        translate: Vec<u32>,
    },
}

/// Fit a tree over `rows` of a prepared view. `rng` supplies per-node
/// attribute sampling when `features_per_node` is set.
pub(crate) fn fit_view(
    view: &TrainingView<'_>,
    rows: Vec<u32>,
    induction: &Induction,
    rng: Option<&mut ChaCha8Rng>,
) -> DecisionTree {
    let attrs: Vec<TreeAttr> = view
        .attrs
        .iter()
        .map(|a| match &a.data {
            AttrData::Numeric(_) => TreeAttr {
                name: a.name.to_string(),
                kind: ColumnKind::Numeric,
                categories: Vec::new(),
            },
            AttrData::Nominal { categories, .. } => TreeAttr {
                name: a.name.to_string(),
                kind: ColumnKind::Nominal,
                categories: categories.to_vec(),
            },
        })
        .collect();

    let mut builder = Builder {
        view,
        induction,
        rng,
        nodes: Vec::new(),
        scratch: Vec::new(),
    };
    let root = builder.grow(rows, 0);
    let mut nodes = builder.nodes;

    if let Some(cf) = induction.prune_confidence {
        prune_subtree(&mut nodes, root, cf);
    }
    let (nodes, root) = compact(&nodes, root);
    DecisionTree { attrs, nodes, root }
}

struct Builder<'a, 'b> {
    view: &'a TrainingView<'a>,
    induction: &'a Induction,
    rng: Option<&'b mut ChaCha8Rng>,
    nodes: Vec<Node>,
    scratch: Vec<(f64, u8)>,
}

enum ChosenSplit {
    Numeric { threshold: f64 },
    Nominal,
}

impl Builder<'_, '_> {
    fn push(&mut self, node: Node) -> u32 {
        self.nodes.push(node);
        (self.nodes.len() - 1) as u32
    }

    fn grow(&mut self, rows: Vec<u32>, depth: usize) -> u32 {
        let mut counts: NodeCounts = [0, 0];
        for &r in &rows {
            counts[self.view.labels[r as usize].as_bit() as usize] += 1;
        }
        let leaf = Node::Leaf {
            label: majority(counts),
            counts,
        };
        if counts[0] == 0 || counts[1] == 0 {
            return self.push(leaf);
        }
        if let Some(max_depth) = self.induction.max_depth {
            if depth >= max_depth {
                return self.push(leaf);
            }
        }

        let candidates = self.candidate_attrs();
        let mut best: Option<(usize, ChosenSplit, f64)> = None;
        for ai in candidates {
            if let Some((split, score, gain)) = self.score_attr(ai, &rows, counts) {
                if gain <= GAIN_EPSILON {
                    continue;
                }
                if best.as_ref().is_none_or(|(_, _, s)| score > *s) {
                    best = Some((ai, split, score));
                }
            }
        }
        let Some((attr, split, _)) = best else {
            return self.push(leaf);
        };

        match split {
            ChosenSplit::Numeric { threshold } => {
                let AttrData::Numeric(values) = &self.view.attrs[attr].data else {
                    unreachable!("numeric split on numeric attribute");
                };
                let (mut left, mut right) = (Vec::new(), Vec::new());
                for &r in &rows {
                    if values[r as usize] <= threshold {
                        left.push(r);
                    } else {
                        right.push(r);
                    }
                }
                drop(rows);
                let left = self.grow(left, depth + 1);
                let right = self.grow(right, depth + 1);
                self.push(Node::Numeric {
                    attr: attr as u32,
                    threshold,
                    left,
                    right,
                    counts,
                })
            }
            ChosenSplit::Nominal => {
                let AttrData::Nominal { codes, categories } = &self.view.attrs[attr].data else {
                    unreachable!("nominal split on nominal attribute");
                };
                let categories = *categories;
                let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); categories.len()];
                for &r in &rows {
                    buckets[codes[r as usize] as usize].push(r);
                }
                drop(rows);
                let mut edges = Vec::new();
                let mut default_child = 0u32;
                let mut default_rows = 0usize;
                let mut default_cat: &str = "";
                for (cat, bucket) in buckets.into_iter().enumerate() {
                    if bucket.is_empty() {
                        continue;
                    }
                    let size = bucket.len();
                    let child = self.grow(bucket, depth + 1);
                    edges.push((cat as u32, child));
                    let cat_name = categories[cat].as_str();
                    if size > default_rows
                        || (size == default_rows && cat_name < default_cat)
                    {
                        default_rows = size;
                        default_child = child;
                        default_cat = cat_name;
                    }
                }
                self.push(Node::Nominal {
                    attr: attr as u32,
                    edges,
                    default_child,
                    counts,
                })
            }
        }
    }

    /// Attribute indices considered at this node, in view order.
    fn candidate_attrs(&mut self) -> Vec<usize> {
        match (self.induction.features_per_node, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < self.view.attrs.len() => {
                let mut picked =
                    rand::seq::index::sample(rng, self.view.attrs.len(), m).into_vec();
                picked.sort_unstable();
                picked
            }
            _ => (0..self.view.attrs.len()).collect(),
        }
    }

    /// Best split of one attribute over `rows`: `(split, score, gain)`.
    fn score_attr(
        &mut self,
        ai: usize,
        rows: &[u32],
        parent: NodeCounts,
    ) -> Option<(ChosenSplit, f64, f64)> {
        let parent = [parent[0] as usize, parent[1] as usize];
        match &self.view.attrs[ai].data {
            AttrData::Numeric(values) => {
                self.scratch.clear();
                self.scratch.extend(rows.iter().map(|&r| {
                    (
                        values[r as usize],
                        self.view.labels[r as usize].as_bit(),
                    )
                }));
                let found = threshold_scan(
                    &mut self.scratch,
                    self.induction.min_leaf,
                    self.induction.criterion,
                )?;
                Some((
                    ChosenSplit::Numeric {
                        threshold: found.threshold,
                    },
                    found.score,
                    found.gain,
                ))
            }
            AttrData::Nominal { codes, categories } => {
                let mut counts = vec![[0usize; 2]; categories.len()];
                for &r in rows {
                    counts[codes[r as usize] as usize]
                        [self.view.labels[r as usize].as_bit() as usize] += 1;
                }
                let children: Vec<[usize; 2]> = counts
                    .into_iter()
                    .filter(|c| c[0] + c[1] > 0)
                    .collect();
                if children.len() < 2 {
                    return None;
                }
                let large = children
                    .iter()
                    .filter(|c| c[0] + c[1] >= self.induction.min_leaf)
                    .count();
                if large < 2 {
                    return None;
                }
                let (score, gain) = match self.induction.criterion {
                    Criterion::GainRatio => {
                        let ratio = gain_ratio_of(parent, &children);
                        let (g, _) = super::split::gain_and_split_info(parent, &children);
                        (ratio, g)
                    }
                    Criterion::Gini => {
                        let dec = gini_decrease(parent, &children);
                        (dec, dec)
                    }
                };
                Some((ChosenSplit::Nominal, score, gain))
            }
        }
    }
}

/// Pessimistic subtree replacement: collapse an internal node to a leaf when
/// the leaf's estimated errors do not exceed the subtree's.
fn prune_subtree(nodes: &mut Vec<Node>, idx: u32, cf: f64) {
    let children: Vec<u32> = match &nodes[idx as usize] {
        Node::Leaf { .. } => return,
        Node::Numeric { left, right, .. } => vec![*left, *right],
        Node::Nominal { edges, .. } => edges.iter().map(|(_, c)| *c).collect(),
    };
    for child in children {
        prune_subtree(nodes, child, cf);
    }
    let counts = nodes[idx as usize].counts();
    let n = (counts[0] + counts[1]) as f64;
    let errors = counts[0].min(counts[1]) as f64;
    let leaf_estimate = errors + added_errors(n, errors, cf);
    if leaf_estimate <= subtree_error_estimate(nodes, idx, cf) + 0.1 {
        nodes[idx as usize] = Node::Leaf {
            label: majority(counts),
            counts,
        };
    }
}

fn subtree_error_estimate(nodes: &[Node], idx: u32, cf: f64) -> f64 {
    match &nodes[idx as usize] {
        Node::Leaf { counts, .. } => {
            let n = (counts[0] + counts[1]) as f64;
            let errors = counts[0].min(counts[1]) as f64;
            errors + added_errors(n, errors, cf)
        }
        Node::Numeric { left, right, .. } => {
            subtree_error_estimate(nodes, *left, cf) + subtree_error_estimate(nodes, *right, cf)
        }
        Node::Nominal { edges, .. } => edges
            .iter()
            .map(|(_, child)| subtree_error_estimate(nodes, *child, cf))
            .sum(),
    }
}

/// Drop nodes unreachable after pruning and renumber.
fn compact(nodes: &[Node], root: u32) -> (Vec<Node>, u32) {
    fn copy(nodes: &[Node], idx: u32, out: &mut Vec<Node>) -> u32 {
        let node = match &nodes[idx as usize] {
            leaf @ Node::Leaf { .. } => leaf.clone(),
            Node::Numeric {
                attr,
                threshold,
                left,
                right,
                counts,
            } => {
                let left = copy(nodes, *left, out);
                let right = copy(nodes, *right, out);
                Node::Numeric {
                    attr: *attr,
                    threshold: *threshold,
                    left,
                    right,
                    counts: *counts,
                }
            }
            Node::Nominal {
                attr,
                edges,
                default_child,
                counts,
            } => {
                let mut new_edges = Vec::with_capacity(edges.len());
                let mut new_default = 0u32;
                for (cat, child) in edges {
                    let new_child = copy(nodes, *child, out);
                    if child == default_child {
                        new_default = new_child;
                    }
                    new_edges.push((*cat, new_child));
                }
                Node::Nominal {
                    attr: *attr,
                    edges: new_edges,
                    default_child: new_default,
                    counts: *counts,
                }
            }
        };
        out.push(node);
        (out.len() - 1) as u32
    }
    let mut out = Vec::new();
    let root = copy(nodes, root, &mut out);
    (out, root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{NominalColumn, Schema};
    use crate::dtree::{gain_ratio, SplitSpec};

    fn labels(bits: &[u8]) -> Vec<Label> {
        bits.iter().map(|&b| Label::from_bit(b).unwrap()).collect()
    }

    fn mixed_dataset(rows: &[(f64, &str, u8)]) -> Dataset {
        let schema = Schema::new(vec![
            ("f1".into(), ColumnKind::Numeric),
            ("f2".into(), ColumnKind::Nominal),
            ("label".into(), ColumnKind::Label),
        ])
        .unwrap();
        Dataset::from_columns(
            schema,
            vec![
                Column::Numeric(rows.iter().map(|r| r.0).collect()),
                Column::Nominal(NominalColumn::from_values(rows.iter().map(|r| r.1))),
                Column::Label(labels(&rows.iter().map(|r| r.2).collect::<Vec<_>>())),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_class_data_yields_a_single_leaf() {
        let d = mixed_dataset(&[(1.0, "a", 1), (2.0, "b", 1), (3.0, "a", 1)]);
        let tree = DecisionTree::fit(&d, &TreeParams::default()).unwrap();
        assert_eq!(tree.node_count(), 1);
        assert_eq!(tree.depth(), 0);
        assert_eq!(tree.predict(&d).unwrap(), labels(&[1, 1, 1]));
    }

    #[test]
    fn perfect_separator_becomes_a_depth_one_tree() {
        // f1 separates labels exactly; f2 carries no signal.
        let d = mixed_dataset(&[
            (1.0, "a", 0),
            (2.0, "b", 0),
            (3.0, "a", 1),
            (4.0, "b", 1),
        ]);
        // Exhaustive candidate check: f1's best cut dominates every
        // alternative split available at the root.
        let best_f1 = gain_ratio(&d, "f1", &SplitSpec::NumericThreshold(2.5)).unwrap();
        for t in [1.5, 3.5] {
            assert!(gain_ratio(&d, "f1", &SplitSpec::NumericThreshold(t)).unwrap() < best_f1);
        }
        assert!(gain_ratio(&d, "f2", &SplitSpec::Nominal).unwrap() < best_f1);

        let tree = DecisionTree::fit(&d, &TreeParams::default()).unwrap();
        assert_eq!(tree.depth(), 1);
        assert_eq!(tree.root_attribute(), Some("f1"));
        assert_eq!(tree.predict(&d).unwrap(), d.labels());
    }

    #[test]
    fn unseen_nominal_category_routes_to_default_child() {
        let d = mixed_dataset(&[
            (1.0, "a", 1),
            (1.0, "a", 1),
            (1.0, "a", 1),
            (1.0, "b", 0),
            (1.0, "b", 0),
        ]);
        let params = TreeParams {
            min_leaf: 1,
            ..TreeParams::default()
        };
        let tree = DecisionTree::fit(&d, &params).unwrap();
        assert_eq!(tree.root_attribute(), Some("f2"));
        // "c" was never observed; the default child is the majority ("a").
        let probe = mixed_dataset(&[(1.0, "c", 0)]);
        assert_eq!(tree.predict(&probe).unwrap(), labels(&[1]));
    }

    #[test]
    fn predict_rejects_missing_column_and_kind_mismatch() {
        let d = mixed_dataset(&[(1.0, "a", 1), (2.0, "b", 0)]);
        let tree = DecisionTree::fit(&d, &TreeParams { min_leaf: 1, ..Default::default() }).unwrap();

        let missing = Dataset::from_columns(
            Schema::new(vec![
                ("f1".into(), ColumnKind::Numeric),
                ("label".into(), ColumnKind::Label),
            ])
            .unwrap(),
            vec![Column::Numeric(vec![1.0]), Column::Label(labels(&[0]))],
        )
        .unwrap();
        assert!(matches!(
            tree.predict(&missing).unwrap_err(),
            Error::SchemaMismatch { .. }
        ));

        let wrong_kind = Dataset::from_columns(
            Schema::new(vec![
                ("f1".into(), ColumnKind::Nominal),
                ("f2".into(), ColumnKind::Nominal),
                ("label".into(), ColumnKind::Label),
            ])
            .unwrap(),
            vec![
                Column::Nominal(NominalColumn::from_values(["1.0"])),
                Column::Nominal(NominalColumn::from_values(["a"])),
                Column::Label(labels(&[0])),
            ],
        )
        .unwrap();
        assert!(matches!(
            tree.predict(&wrong_kind).unwrap_err(),
            Error::SchemaMismatch { .. }
        ));
    }

    #[test]
    fn fit_rejects_empty_dataset_and_bad_params() {
        let empty = mixed_dataset(&[]);
        assert!(matches!(
            DecisionTree::fit(&empty, &TreeParams::default()).unwrap_err(),
            Error::EmptyDataset
        ));
        let d = mixed_dataset(&[(1.0, "a", 1)]);
        let bad = TreeParams {
            pruning_confidence: 1.5,
            ..TreeParams::default()
        };
        assert!(DecisionTree::fit(&d, &bad).is_err());
    }

    #[test]
    fn row_permutation_preserves_structure_and_predictions() {
        let rows = [
            (0.1, "a", 0),
            (0.9, "b", 1),
            (0.4, "a", 0),
            (0.7, "b", 1),
            (0.2, "c", 0),
            (0.8, "c", 1),
            (0.3, "a", 0),
            (0.6, "b", 1),
        ];
        let mut permuted = rows;
        permuted.reverse();
        permuted.swap(1, 5);
        let d1 = mixed_dataset(&rows);
        let d2 = mixed_dataset(&permuted);
        let t1 = DecisionTree::fit(&d1, &TreeParams::default()).unwrap();
        let t2 = DecisionTree::fit(&d2, &TreeParams::default()).unwrap();
        assert_eq!(t1.node_count(), t2.node_count());
        assert_eq!(t1.depth(), t2.depth());
        assert_eq!(t1.root_attribute(), t2.root_attribute());
        let probe = mixed_dataset(&[(0.15, "a", 0), (0.85, "b", 0), (0.5, "c", 0)]);
        assert_eq!(t1.predict(&probe).unwrap(), t2.predict(&probe).unwrap());
    }

    #[test]
    fn pruning_never_grows_the_tree_and_never_improves_training_error() {
        // Noisy data so the unpruned tree overfits.
        let mut rows = Vec::new();
        for i in 0..120 {
            let x = (i % 40) as f64 / 40.0;
            let noise = (i * 7919) % 13;
            let bit = if x < 0.5 {
                u8::from(noise < 2)
            } else {
                u8::from(noise >= 4)
            };
            let cat = ["a", "b", "c"][i % 3];
            rows.push((x, cat, bit));
        }
        let d = mixed_dataset(&rows);
        let view = TrainingView::all(&d);
        let all_rows: Vec<u32> = (0..d.row_count() as u32).collect();
        let base = Induction {
            criterion: Criterion::GainRatio,
            min_leaf: 2,
            max_depth: None,
            features_per_node: None,
            prune_confidence: None,
        };
        let unpruned = fit_view(&view, all_rows.clone(), &base, None);
        let pruned = fit_view(
            &view,
            all_rows,
            &Induction {
                prune_confidence: Some(0.25),
                ..base
            },
            None,
        );
        assert!(pruned.node_count() <= unpruned.node_count());
        assert!(pruned.training_error() >= unpruned.training_error());
        assert!(pruned.node_count() < unpruned.node_count(), "expected the noisy tree to shrink");
    }

    #[test]
    fn leaf_fractions_threshold_reproduces_predict() {
        let rows: Vec<(f64, &str, u8)> = (0..60)
            .map(|i| {
                let x = i as f64 / 60.0;
                let bit = u8::from(x > 0.45 && i % 5 != 0);
                (x, ["a", "b"][i % 2], bit)
            })
            .collect();
        let d = mixed_dataset(&rows);
        let tree = DecisionTree::fit(&d, &TreeParams::default()).unwrap();
        let scores = tree.leaf_attack_fractions(&d).unwrap();
        let pred = tree.predict(&d).unwrap();
        for (s, p) in scores.iter().zip(&pred) {
            assert_eq!(*s >= 0.5, p.is_attack());
        }
    }

    #[test]
    fn artifact_json_round_trip() {
        let d = mixed_dataset(&[(1.0, "a", 0), (2.0, "b", 1), (3.0, "a", 1), (4.0, "b", 0)]);
        let tree = DecisionTree::fit(&d, &TreeParams { min_leaf: 1, ..Default::default() }).unwrap();
        let json = serde_json::to_string(&tree).unwrap();
        let back: DecisionTree = serde_json::from_str(&json).unwrap();
        assert_eq!(tree, back);
        assert_eq!(tree.predict(&d).unwrap(), back.predict(&d).unwrap());
    }
}
