//! Weighted CART-style trees.
//!
//! Two fitting modes share one greedy splitter: classification trees minimize
//! weighted Gini impurity and predict ±1 at the leaves; regression trees
//! minimize weighted squared error and predict the weighted mean of their
//! targets, clamped to [−1, 1]. The splitter works on observation weights
//! throughout, so duplicating a row and doubling its weight are equivalent,
//! and scaling all weights by a positive constant changes nothing.

use crate::dataset::{BinaryDataset, Label};
use crate::error::{Error, Result};

/// Candidates whose scores differ by less than this are treated as tied and
/// resolved toward the lower feature index, then the lower threshold.
const SCORE_EPS: f64 = 1e-12;

/// Splits must decrease impurity by strictly more than this to be taken.
const MIN_DECREASE: f64 = 1e-12;

/// Stopping and regularization parameters for tree growth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    /// Maximum number of split levels below the root.
    pub max_depth: usize,
    /// Minimum total observation weight in a leaf, in units of the average
    /// observation weight (1.0 means one average observation).
    pub min_leaf_weight: f64,
    /// Minimum normalized impurity decrease for a split.
    pub min_split_improvement: f64,
}

impl TreeParams {
    pub fn new(max_depth: usize, min_leaf_weight: f64, min_split_improvement: f64) -> Result<Self> {
        if max_depth < 1 {
            return Err(Error::InvalidInput("max_depth must be at least 1".into()));
        }
        if !(min_leaf_weight > 0.0) {
            return Err(Error::InvalidInput("min_leaf_weight must be positive".into()));
        }
        if !(min_split_improvement >= 0.0) {
            return Err(Error::InvalidInput(
                "min_split_improvement must be nonnegative".into(),
            ));
        }
        Ok(Self {
            max_depth,
            min_leaf_weight,
            min_split_improvement,
        })
    }

    /// Deep trees for bagging: variance reduction wants low-bias learners.
    pub fn bagging_default() -> Self {
        Self {
            max_depth: 30,
            min_leaf_weight: 1.0,
            min_split_improvement: 0.0,
        }
    }

    /// Shallow trees as boosting weak learners.
    pub fn boosting_default() -> Self {
        Self {
            max_depth: 3,
            min_leaf_weight: 1e-9,
            min_split_improvement: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeKind {
    Classification,
    Regression,
}

/// One node of a fitted tree. Internal nodes route `x[feature] < threshold`
/// to the left child; equality goes right.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// A fitted tree, stored as a node list with the root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
    kind: TreeKind,
    n_features: usize,
}

impl Tree {
    /// Rebuild a tree from a node list, checking that it is a well-formed
    /// tree rooted at node 0 and that leaf values fit the kind.
    pub fn from_nodes(nodes: Vec<Node>, kind: TreeKind, n_features: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::MalformedModel("tree has no nodes".into()));
        }
        let mut referenced = vec![false; nodes.len()];
        referenced[0] = true;
        let mut stack = vec![0usize];
        let mut visited = 0usize;
        while let Some(i) = stack.pop() {
            visited += 1;
            match &nodes[i] {
                Node::Leaf { value } => {
                    let ok = match kind {
                        TreeKind::Classification => *value == 1.0 || *value == -1.0,
                        TreeKind::Regression => (-1.0..=1.0).contains(value),
                    };
                    if !ok {
                        return Err(Error::MalformedModel(format!("bad leaf value {value}")));
                    }
                }
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if *feature >= n_features {
                        return Err(Error::MalformedModel(format!(
                            "split feature {feature} out of range"
                        )));
                    }
                    if !threshold.is_finite() {
                        return Err(Error::MalformedModel("non-finite threshold".into()));
                    }
                    for &child in [left, right] {
                        if child >= nodes.len() || referenced[child] {
                            return Err(Error::MalformedModel(
                                "node list is not a tree rooted at 0".into(),
                            ));
                        }
                        referenced[child] = true;
                        stack.push(child);
                    }
                }
            }
        }
        if visited != nodes.len() {
            return Err(Error::MalformedModel("unreachable nodes in tree".into()));
        }
        Ok(Self {
            nodes,
            kind,
            n_features,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Internal { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Evaluate the tree on one row.
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: row.len(),
            });
        }
        Ok(self.predict_unchecked(row))
    }

    pub(crate) fn predict_unchecked(&self, row: &[f64]) -> f64 {
        let mut i = 0usize;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return *value,
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[*feature] < *threshold { *left } else { *right };
                }
            }
        }
    }
}

/// Fit a classification tree on ±1 labels under observation weights.
///
/// Leaves predict the weighted-majority label; an exact tie predicts −1.
pub fn fit_classification_tree(
    data: &BinaryDataset,
    weights: &[f64],
    params: TreeParams,
) -> Result<Tree> {
    let targets: Vec<f64> = data.labels().iter().map(|l| l.sign()).collect();
    fit_tree(data, &targets, weights, params, TreeKind::Classification)
}

/// Fit a regression tree to real-valued targets under observation weights.
///
/// Leaves predict the weighted mean of their targets, clamped to [−1, 1].
pub fn fit_regression_tree(
    data: &BinaryDataset,
    targets: &[f64],
    weights: &[f64],
    params: TreeParams,
) -> Result<Tree> {
    if targets.len() != data.n_rows() {
        return Err(Error::LengthMismatch(targets.len(), data.n_rows()));
    }
    if let Some(bad) = targets.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite target {bad}")));
    }
    fit_tree(data, targets, weights, params, TreeKind::Regression)
}

fn fit_tree(
    data: &BinaryDataset,
    targets: &[f64],
    weights: &[f64],
    params: TreeParams,
    kind: TreeKind,
) -> Result<Tree> {
    let n = data.n_rows();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    if weights.len() != n {
        return Err(Error::LengthMismatch(weights.len(), n));
    }
    if let Some(bad) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidWeights(format!("bad weight {bad}")));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::AllWeightsZero);
    }

    // min_leaf_weight counts in average-observation units so that scaling all
    // weights leaves the fitted tree unchanged.
    let min_leaf = params.min_leaf_weight * total / n as f64;
    let ctx = FitCtx {
        data,
        targets,
        weights,
        kind,
        min_leaf,
        min_improvement: params.min_split_improvement,
        max_depth: params.max_depth,
    };
    let mut nodes = Vec::new();
    let idx: Vec<usize> = (0..n).collect();
    build(&ctx, idx, 0, &mut nodes);
    Ok(Tree {
        nodes,
        kind,
        n_features: data.n_features(),
    })
}

struct FitCtx<'a> {
    data: &'a BinaryDataset,
    targets: &'a [f64],
    weights: &'a [f64],
    kind: TreeKind,
    min_leaf: f64,
    min_improvement: f64,
    max_depth: usize,
}

/// Node statistics: total weight, weighted target sum, weighted square sum.
#[derive(Clone, Copy, Default)]
struct Stats {
    w: f64,
    s: f64,
    q: f64,
}

impl Stats {
    fn add(&mut self, w: f64, y: f64) {
        self.w += w;
        self.s += w * y;
        self.q += w * y * y;
    }

    /// Impurity mass of this group (not normalized by total weight):
    /// Gini uses w·gini for ±1 targets, regression uses the SSE about the
    /// weighted mean. For ±1 targets both reduce to w − s²/w.
    fn impurity_mass(&self, kind: TreeKind) -> f64 {
        if self.w <= 0.0 {
            return 0.0;
        }
        let mass = match kind {
            // gini = 1 − p₋² − p₊² = ½(1 − (s/w)²) · 2; written directly:
            TreeKind::Classification => {
                let mean = self.s / self.w;
                self.w * 0.5 * (1.0 - mean * mean)
            }
            TreeKind::Regression => self.q - self.s * self.s / self.w,
        };
        mass.max(0.0)
    }

    fn leaf_value(&self, kind: TreeKind) -> f64 {
        match kind {
            TreeKind::Classification => {
                // Weighted majority; exact ties go to dislike.
                if self.s > 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            TreeKind::Regression => (self.s / self.w).clamp(-1.0, 1.0),
        }
    }
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
    decrease: f64,
}

fn build(ctx: &FitCtx, idx: Vec<usize>, depth: usize, nodes: &mut Vec<Node>) -> usize {
    let mut stats = Stats::default();
    for &i in &idx {
        stats.add(ctx.weights[i], ctx.targets[i]);
    }
    let node_impurity = stats.impurity_mass(ctx.kind) / stats.w;

    let split = if depth >= ctx.max_depth || node_impurity <= MIN_DECREASE {
        None
    } else {
        best_split(ctx, &idx, &stats).filter(|s| {
            s.decrease > ctx.min_improvement && s.decrease > MIN_DECREASE
        })
    };

    match split {
        None => {
            nodes.push(Node::Leaf {
                value: stats.leaf_value(ctx.kind),
            });
            nodes.len() - 1
        }
        Some(split) => {
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
                .into_iter()
                .partition(|&i| ctx.data.value(i, split.feature) < split.threshold);
            let slot = nodes.len();
            nodes.push(Node::Leaf { value: 0.0 }); // placeholder
            let left = build(ctx, left_idx, depth + 1, nodes);
            let right = build(ctx, right_idx, depth + 1, nodes);
            nodes[slot] = Node::Internal {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right,
            };
            slot
        }
    }
}

/// Greedy candidate enumeration over (feature, midpoint) pairs.
///
/// Scores are the total child impurity mass normalized by node weight, so
/// lower is better. Candidates within `SCORE_EPS` of the incumbent are ties
/// and the incumbent wins; enumeration runs in ascending (feature,
/// threshold) order, which implements the deterministic tie rule.
fn best_split(ctx: &FitCtx, idx: &[usize], node_stats: &Stats) -> Option<Split> {
    let node_mass = node_stats.impurity_mass(ctx.kind);
    let mut best: Option<Split> = None;
    let mut order = idx.to_vec();
    for feature in 0..ctx.data.n_features() {
        order.sort_unstable_by(|&a, &b| {
            ctx.data
                .value(a, feature)
                .total_cmp(&ctx.data.value(b, feature))
                .then(a.cmp(&b))
        });
        let mut left = Stats::default();
        for pos in 0..order.len().saturating_sub(1) {
            let i = order[pos];
            left.add(ctx.weights[i], ctx.targets[i]);
            let v = ctx.data.value(i, feature);
            let v_next = ctx.data.value(order[pos + 1], feature);
            if v == v_next {
                continue;
            }
            let threshold = 0.5 * (v + v_next);
            // Adjacent floats can collapse the midpoint onto v; such a
            // candidate would not reproduce the enumerated partition.
            if !(threshold > v) {
                continue;
            }
            let right = Stats {
                w: node_stats.w - left.w,
                s: node_stats.s - left.s,
                q: node_stats.q - left.q,
            };
            if left.w < ctx.min_leaf || right.w < ctx.min_leaf {
                continue;
            }
            let score =
                (left.impurity_mass(ctx.kind) + right.impurity_mass(ctx.kind)) / node_stats.w;
            let accept = match &best {
                None => true,
                Some(b) => score < b.score - SCORE_EPS,
            };
            if accept {
                best = Some(Split {
                    feature,
                    threshold,
                    score,
                    decrease: node_mass / node_stats.w - score,
                });
            }
        }
    }
    best
}

/// Convenience: predicted label of a classification tree.
pub fn predict_label(tree: &Tree, row: &[f64]) -> Result<Label> {
    Ok(Label::from_score(tree.predict(row)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(values: &[&[f64]], labels: &[Label]) -> BinaryDataset {
        let d = values[0].len();
        let flat: Vec<f64> = values.iter().flat_map(|r| r.iter().copied()).collect();
        BinaryDataset::from_parts(
            (0..d).map(|j| format!("f{j}")).collect(),
            flat,
            labels.to_vec(),
            "t",
        )
        .unwrap()
    }

    fn separable() -> BinaryDataset {
        dataset(
            &[&[1.0], &[2.0], &[4.0], &[5.0]],
            &[Label::Dislike, Label::Dislike, Label::Favor, Label::Favor],
        )
    }

    #[test]
    fn separable_fixture_gets_single_split_at_three() {
        let data = separable();
        let tree =
            fit_classification_tree(&data, &[1.0; 4], TreeParams::bagging_default()).unwrap();
        match &tree.nodes()[0] {
            Node::Internal { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 3.0);
            }
            other => panic!("expected split at root, got {other:?}"),
        }
        for i in 0..data.n_rows() {
            assert_eq!(tree.predict(data.row(i)).unwrap(), data.label(i).sign());
        }
        assert_eq!(tree.predict(&[1.5]).unwrap(), -1.0);
    }

    #[test]
    fn equality_with_threshold_goes_right() {
        let tree = Tree::from_nodes(
            vec![
                Node::Internal {
                    feature: 0,
                    threshold: 3.0,
                    left: 1,
                    right: 2,
                },
                Node::Leaf { value: -1.0 },
                Node::Leaf { value: 1.0 },
            ],
            TreeKind::Classification,
            1,
        )
        .unwrap();
        assert_eq!(tree.predict(&[3.0]).unwrap(), 1.0);
        assert_eq!(tree.predict(&[2.999]).unwrap(), -1.0);
    }

    #[test]
    fn leaf_only_tree_is_constant() {
        let tree =
            Tree::from_nodes(vec![Node::Leaf { value: 0.25 }], TreeKind::Regression, 3).unwrap();
        assert_eq!(tree.predict(&[9.0, 9.0, 9.0]).unwrap(), 0.25);
        assert!(matches!(
            tree.predict(&[1.0]).unwrap_err(),
            Error::DimensionMismatch { expected: 3, got: 1 }
        ));
    }

    #[test]
    fn duplicated_row_equals_doubled_weight() {
        let base = dataset(
            &[&[1.0, 2.0], &[2.0, 1.0], &[3.0, 4.0], &[4.0, 2.0], &[5.0, 5.0]],
            &[
                Label::Dislike,
                Label::Dislike,
                Label::Favor,
                Label::Dislike,
                Label::Favor,
            ],
        );
        let doubled_weight =
            fit_classification_tree(&base, &[1.0, 2.0, 1.0, 1.0, 1.0], TreeParams::bagging_default())
                .unwrap();
        let duplicated = dataset(
            &[
                &[1.0, 2.0],
                &[2.0, 1.0],
                &[2.0, 1.0],
                &[3.0, 4.0],
                &[4.0, 2.0],
                &[5.0, 5.0],
            ],
            &[
                Label::Dislike,
                Label::Dislike,
                Label::Dislike,
                Label::Favor,
                Label::Dislike,
                Label::Favor,
            ],
        );
        let dup_tree =
            fit_classification_tree(&duplicated, &[1.0; 6], TreeParams::bagging_default()).unwrap();
        assert_eq!(doubled_weight.nodes(), dup_tree.nodes());
    }

    #[test]
    fn weight_scaling_leaves_tree_unchanged() {
        let data = dataset(
            &[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0], &[2.5]],
            &[
                Label::Dislike,
                Label::Favor,
                Label::Dislike,
                Label::Favor,
                Label::Favor,
                Label::Dislike,
            ],
        );
        let w = [0.3, 0.1, 0.25, 0.05, 0.2, 0.1];
        let scaled: Vec<f64> = w.iter().map(|x| x * 37.5).collect();
        let params = TreeParams::new(4, 0.5, 0.0).unwrap();
        let a = fit_classification_tree(&data, &w, params).unwrap();
        let b = fit_classification_tree(&data, &scaled, params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn weights_concentrated_on_two_rows_separates_them() {
        let data = dataset(
            &[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0], &[6.0]],
            &[
                Label::Favor,
                Label::Dislike,
                Label::Favor,
                Label::Dislike,
                Label::Favor,
                Label::Dislike,
            ],
        );
        // All weight on rows 1 (dislike, x=2) and 4 (favor, x=5).
        let w = [0.0, 1.0, 0.0, 0.0, 1.0, 0.0];
        let tree = fit_classification_tree(&data, &w, TreeParams::bagging_default()).unwrap();
        assert_eq!(tree.predict(&[2.0]).unwrap(), -1.0);
        assert_eq!(tree.predict(&[5.0]).unwrap(), 1.0);
    }

    #[test]
    fn max_depth_and_min_leaf_are_respected() {
        let data = dataset(
            &[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0], &[1.5], &[2.5], &[4.5]],
            &[
                Label::Dislike,
                Label::Favor,
                Label::Dislike,
                Label::Favor,
                Label::Dislike,
                Label::Favor,
                Label::Dislike,
                Label::Favor,
            ],
        );
        let deep =
            fit_classification_tree(&data, &[1.0; 8], TreeParams::new(2, 1e-9, 0.0).unwrap())
                .unwrap();
        assert!(deep.depth() <= 2);

        // A leaf must keep at least two average observations of weight, so
        // no child may isolate a single row.
        let tree =
            fit_classification_tree(&data, &[1.0; 8], TreeParams::new(30, 2.0, 0.0).unwrap())
                .unwrap();
        fn check_leaf_counts(tree: &Tree, data: &BinaryDataset) {
            let mut counts = vec![0usize; tree.nodes().len()];
            for i in 0..data.n_rows() {
                let mut node = 0usize;
                loop {
                    match &tree.nodes()[node] {
                        Node::Leaf { .. } => {
                            counts[node] += 1;
                            break;
                        }
                        Node::Internal {
                            feature,
                            threshold,
                            left,
                            right,
                        } => {
                            node = if data.value(i, *feature) < *threshold {
                                *left
                            } else {
                                *right
                            };
                        }
                    }
                }
            }
            for (node, count) in counts.iter().enumerate() {
                if matches!(tree.nodes()[node], Node::Leaf { .. }) {
                    assert!(*count >= 2, "leaf {node} holds {count} rows");
                }
            }
        }
        check_leaf_counts(&tree, &data);
    }

    #[test]
    fn regression_constant_targets_gives_single_leaf() {
        let data = dataset(&[&[1.0], &[2.0], &[3.0]], &[Label::Favor; 3]);
        let tree = fit_regression_tree(
            &data,
            &[0.4, 0.4, 0.4],
            &[1.0; 3],
            TreeParams::boosting_default(),
        )
        .unwrap();
        match tree.nodes() {
            [Node::Leaf { value }] => assert!((value - 0.4).abs() < 1e-15),
            other => panic!("expected single leaf, got {other:?}"),
        }

        let all_pos = fit_regression_tree(
            &data,
            &[1.0, 1.0, 1.0],
            &[0.2, 0.3, 0.5],
            TreeParams::boosting_default(),
        )
        .unwrap();
        assert_eq!(all_pos.nodes(), &[Node::Leaf { value: 1.0 }]);
    }

    #[test]
    fn regression_leaf_values_are_clamped() {
        let data = dataset(&[&[1.0], &[2.0]], &[Label::Favor; 2]);
        let tree = fit_regression_tree(
            &data,
            &[3.0, 3.0],
            &[1.0; 2],
            TreeParams::boosting_default(),
        )
        .unwrap();
        assert_eq!(tree.nodes(), &[Node::Leaf { value: 1.0 }]);
    }

    #[test]
    fn weight_validation_errors() {
        let data = separable();
        assert!(matches!(
            fit_classification_tree(&data, &[1.0; 3], TreeParams::bagging_default()).unwrap_err(),
            Error::LengthMismatch(3, 4)
        ));
        assert!(matches!(
            fit_classification_tree(&data, &[0.0; 4], TreeParams::bagging_default()).unwrap_err(),
            Error::AllWeightsZero
        ));
        assert!(matches!(
            fit_classification_tree(&data, &[1.0, 1.0, -0.5, 1.0], TreeParams::bagging_default())
                .unwrap_err(),
            Error::InvalidWeights(_)
        ));
    }

    /// Exhaustive (feature, midpoint) enumeration, written independently of
    /// the splitter: per-candidate sums run in row order over the partition.
    /// Applies the same tie window and strict-decrease rule as the contract.
    fn brute_force_root(
        data: &BinaryDataset,
        targets: &[f64],
        weights: &[f64],
        kind: TreeKind,
        min_leaf_units: f64,
    ) -> Option<(usize, f64)> {
        let n = data.n_rows();
        let total: f64 = weights.iter().sum();
        let min_leaf = min_leaf_units * total / n as f64;
        let mass = |rows: &[usize]| -> (f64, f64) {
            let w: f64 = rows.iter().map(|&i| weights[i]).sum();
            if w <= 0.0 {
                return (0.0, 0.0);
            }
            let s: f64 = rows.iter().map(|&i| weights[i] * targets[i]).sum();
            let q: f64 = rows.iter().map(|&i| weights[i] * targets[i] * targets[i]).sum();
            let m = match kind {
                TreeKind::Classification => {
                    let mean = s / w;
                    w * 0.5 * (1.0 - mean * mean)
                }
                TreeKind::Regression => q - s * s / w,
            };
            (w, m.max(0.0))
        };
        let all: Vec<usize> = (0..n).collect();
        let (_, node_mass) = mass(&all);
        let node_impurity = node_mass / total;
        let mut best: Option<(usize, f64, f64)> = None;
        for f in 0..data.n_features() {
            let mut values: Vec<f64> = (0..n).map(|i| data.value(i, f)).collect();
            values.sort_unstable_by(f64::total_cmp);
            values.dedup();
            for pair in values.windows(2) {
                let threshold = 0.5 * (pair[0] + pair[1]);
                if !(threshold > pair[0]) {
                    continue;
                }
                let left: Vec<usize> = (0..n).filter(|&i| data.value(i, f) < threshold).collect();
                let right: Vec<usize> = (0..n).filter(|&i| data.value(i, f) >= threshold).collect();
                let (wl, ml) = mass(&left);
                let (wr, mr) = mass(&right);
                if wl < min_leaf || wr < min_leaf {
                    continue;
                }
                let score = (ml + mr) / total;
                let accept = match &best {
                    None => true,
                    Some((_, _, s)) => score < s - SCORE_EPS,
                };
                if accept {
                    best = Some((f, threshold, score));
                }
            }
        }
        best.filter(|(_, _, score)| node_impurity - score > MIN_DECREASE)
            .map(|(f, t, _)| (f, t))
    }

    fn root_split(tree: &Tree) -> Option<(usize, f64)> {
        match &tree.nodes()[0] {
            Node::Internal { feature, threshold, .. } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        }
    }

    #[test]
    fn classification_root_matches_brute_force_battery() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(27);
        for case in 0..200 {
            let n = rng.gen_range(2..=8);
            let d = rng.gen_range(1..=3);
            // Mix continuous and ordinal feature patterns.
            let ordinal = case % 3 == 0;
            let mut rows = Vec::new();
            for _ in 0..n {
                let row: Vec<f64> = (0..d)
                    .map(|_| {
                        if ordinal {
                            rng.gen_range(1..=5) as f64
                        } else {
                            rng.gen_range(0.0..5.0)
                        }
                    })
                    .collect();
                rows.push(row);
            }
            let labels: Vec<Label> = (0..n)
                .map(|_| if rng.gen_bool(0.5) { Label::Favor } else { Label::Dislike })
                .collect();
            let weights: Vec<f64> = (0..n)
                .map(|_| if ordinal { 1.0 } else { rng.gen_range(0.05..1.0) })
                .collect();
            let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
            let data = dataset(&refs, &labels);
            let params = TreeParams::new(1, 1e-9, 0.0).unwrap();
            let tree = fit_classification_tree(&data, &weights, params).unwrap();
            let targets: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
            let expected =
                brute_force_root(&data, &targets, &weights, TreeKind::Classification, 1e-9);
            assert_eq!(root_split(&tree), expected, "case {case}");
        }
    }

    #[test]
    fn regression_root_matches_brute_force() {
        let data = dataset(
            &[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0], &[6.0]],
            &[Label::Favor; 6],
        );
        let targets = [0.9, 0.8, -0.2, 0.5, -0.7, -0.9];
        let weights = [0.3, 0.1, 0.2, 0.15, 0.15, 0.1];
        let params = TreeParams::new(1, 1e-9, 0.0).unwrap();
        let tree = fit_regression_tree(&data, &targets, &weights, params).unwrap();
        let expected =
            brute_force_root(&data, &targets, &weights, TreeKind::Regression, 1e-9).unwrap();
        assert_eq!(root_split(&tree).unwrap(), expected);
    }

    #[test]
    fn from_nodes_rejects_malformed_trees() {
        // Child index out of range.
        assert!(Tree::from_nodes(
            vec![Node::Internal { feature: 0, threshold: 1.0, left: 1, right: 5 }],
            TreeKind::Classification,
            1,
        )
        .is_err());
        // Cycle back to the root.
        assert!(Tree::from_nodes(
            vec![
                Node::Internal { feature: 0, threshold: 1.0, left: 0, right: 1 },
                Node::Leaf { value: 1.0 },
            ],
            TreeKind::Classification,
            1,
        )
        .is_err());
        // Classification leaf outside ±1.
        assert!(Tree::from_nodes(
            vec![Node::Leaf { value: 0.5 }],
            TreeKind::Classification,
            1,
        )
        .is_err());
    }
}
