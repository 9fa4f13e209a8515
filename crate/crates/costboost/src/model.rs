//! Versioned text container for trained models.
//!
//! One tab-separated, line-oriented format covers every learner. Floats are
//! written in shortest round-trip form, so saving and reloading a model is
//! bit-exact and repeated runs with the same seed produce byte-identical
//! files. Bagged models keep their in-bag masks so out-of-bag quantities can
//! be recomputed after a reload; boosted models carry their cost matrix and
//! the per-round (α, ε) history for audit.

use std::path::Path;

use crate::bagging::BaggedEnsemble;
use crate::boosting::{BoostAlgorithm, BoostedEnsemble, CostMatrix, RoundRecord};
use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::svm::SvmModel;
use crate::tree::{Node, Tree, TreeKind};

/// First line of every model file.
pub const MODEL_VERSION_LINE: &str = "costboost-model v1";

/// Any trained classifier the toolkit can persist and evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Bagged(BaggedEnsemble),
    Boosted(BoostedEnsemble),
    Svm(SvmModel),
    /// Constant majority-class baseline.
    Majority {
        label: Label,
        feature_names: Vec<String>,
    },
}

/// Run metadata stored alongside the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta {
    pub target: String,
    pub seed: u64,
}

impl Model {
    pub fn algorithm_name(&self) -> &'static str {
        match self {
            Model::Bagged(_) => "bagging",
            Model::Boosted(b) => b.algorithm().name(),
            Model::Svm(_) => "linear-svm",
            Model::Majority { .. } => "majority",
        }
    }

    pub fn feature_names(&self) -> &[String] {
        match self {
            Model::Bagged(e) => e.feature_names(),
            Model::Boosted(e) => e.feature_names(),
            Model::Svm(m) => m.feature_names(),
            Model::Majority { feature_names, .. } => feature_names,
        }
    }

    /// Raw score: mean vote for bagging, additive score for boosting, the
    /// decision value for the SVM, and ±1 for the majority baseline.
    pub fn score(&self, row: &[f64]) -> Result<f64> {
        match self {
            Model::Bagged(e) => e.score(row),
            Model::Boosted(e) => e.score(row),
            Model::Svm(m) => m.decision_value(row),
            Model::Majority { label, feature_names } => {
                if row.len() != feature_names.len() {
                    return Err(Error::DimensionMismatch {
                        expected: feature_names.len(),
                        got: row.len(),
                    });
                }
                Ok(label.sign())
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> Result<Label> {
        match self {
            // The ensemble tie rules are already encoded in their scores.
            Model::Majority { label, .. } => {
                self.score(row)?;
                Ok(*label)
            }
            _ => Ok(Label::from_score(self.score(row)?)),
        }
    }

    /// Render the model file.
    pub fn to_text(&self, meta: &ModelMeta) -> String {
        let mut out = String::new();
        out.push_str(MODEL_VERSION_LINE);
        out.push('\n');
        push_line(&mut out, &["algorithm", self.algorithm_name()]);
        push_line(&mut out, &["target", &meta.target]);
        push_line(&mut out, &["seed", &meta.seed.to_string()]);
        let mut features = vec!["features".to_string()];
        features.extend(self.feature_names().iter().cloned());
        push_owned_line(&mut out, &features);

        match self {
            Model::Bagged(e) => {
                push_line(&mut out, &["bag_seed", &e.seed().to_string()]);
                push_line(&mut out, &["n_trees", &e.n_trees().to_string()]);
                for (t, tree) in e.trees().iter().enumerate() {
                    write_tree(&mut out, t, tree);
                }
                for (t, mask) in e.in_bag_masks().iter().enumerate() {
                    let bits: String =
                        mask.iter().map(|&b| if b { '1' } else { '0' }).collect();
                    push_line(&mut out, &["mask", &t.to_string(), &bits]);
                }
            }
            Model::Boosted(e) => {
                let c = e.cost().entries();
                push_owned_line(
                    &mut out,
                    &[
                        "cost".to_string(),
                        fmt(c[0]),
                        fmt(c[1]),
                        fmt(c[2]),
                        fmt(c[3]),
                    ],
                );
                push_line(&mut out, &["rounds", &e.rounds_used().to_string()]);
                for (m, rec) in e.history().iter().enumerate() {
                    push_owned_line(
                        &mut out,
                        &[
                            "round".to_string(),
                            m.to_string(),
                            fmt(rec.alpha),
                            fmt(rec.eps),
                        ],
                    );
                }
                for (m, tree) in e.weak_learners().iter().enumerate() {
                    write_tree(&mut out, m, tree);
                }
            }
            Model::Svm(m) => {
                push_vector(&mut out, "weights", m.weight_vector());
                push_line(&mut out, &["bias", &fmt(m.bias())]);
                push_vector(&mut out, "means", m.feature_means());
                push_vector(&mut out, "stds", m.feature_stds());
                push_line(&mut out, &["c_pos", &fmt(m.c_pos())]);
                push_line(&mut out, &["c_neg", &fmt(m.c_neg())]);
                push_line(&mut out, &["kkt_residual", &fmt(m.training_kkt_residual())]);
                push_line(&mut out, &["converged", if m.converged() { "1" } else { "0" }]);
            }
            Model::Majority { label, .. } => {
                push_line(&mut out, &["label", label.name()]);
            }
        }
        out.push_str("end\n");
        out
    }

    /// Parse a model file.
    pub fn from_text(text: &str) -> Result<(Model, ModelMeta)> {
        let mut lines = text.lines();
        let version = lines.next().unwrap_or_default();
        if version != MODEL_VERSION_LINE {
            return Err(Error::VersionMismatch {
                found: version.to_string(),
                expected: MODEL_VERSION_LINE.to_string(),
            });
        }
        let mut parser = Parser {
            lines: lines.collect(),
            pos: 0,
        };
        let algorithm = parser.expect_value("algorithm")?;
        let target = parser.expect_value("target")?;
        let seed: u64 = parser
            .expect_value("seed")?
            .parse()
            .map_err(|_| Error::MalformedModel("bad seed".into()))?;
        let features: Vec<String> = parser.expect_fields("features")?;
        let meta = ModelMeta { target, seed };

        let model = match algorithm.as_str() {
            "bagging" => {
                let bag_seed: u64 = parser
                    .expect_value("bag_seed")?
                    .parse()
                    .map_err(|_| Error::MalformedModel("bad bag_seed".into()))?;
                let n_trees: usize = parser
                    .expect_value("n_trees")?
                    .parse()
                    .map_err(|_| Error::MalformedModel("bad n_trees".into()))?;
                let mut trees = Vec::with_capacity(n_trees);
                for t in 0..n_trees {
                    trees.push(parser.read_tree(t, features.len())?);
                }
                let mut masks = Vec::with_capacity(n_trees);
                for t in 0..n_trees {
                    let fields = parser.expect_n("mask", 2)?;
                    if fields[0] != t.to_string() {
                        return Err(Error::MalformedModel("mask order".into()));
                    }
                    masks.push(fields[1].chars().map(|c| c == '1').collect());
                }
                Model::Bagged(BaggedEnsemble::from_parts(trees, masks, features, bag_seed)?)
            }
            name if BoostAlgorithm::from_name(name).is_some() => {
                let algorithm = BoostAlgorithm::from_name(name).unwrap();
                let c = parser.expect_n("cost", 4)?;
                let cost = CostMatrix::new([
                    [parse_f64(&c[0])?, parse_f64(&c[1])?],
                    [parse_f64(&c[2])?, parse_f64(&c[3])?],
                ])?;
                let rounds: usize = parser
                    .expect_value("rounds")?
                    .parse()
                    .map_err(|_| Error::MalformedModel("bad rounds".into()))?;
                let mut history = Vec::with_capacity(rounds);
                let mut alphas = Vec::with_capacity(rounds);
                for m in 0..rounds {
                    let fields = parser.expect_n("round", 3)?;
                    if fields[0] != m.to_string() {
                        return Err(Error::MalformedModel("round order".into()));
                    }
                    let alpha = parse_f64(&fields[1])?;
                    let eps = parse_f64(&fields[2])?;
                    alphas.push(alpha);
                    history.push(RoundRecord { eps, alpha });
                }
                let mut trees = Vec::with_capacity(rounds);
                for m in 0..rounds {
                    trees.push(parser.read_tree(m, features.len())?);
                }
                Model::Boosted(BoostedEnsemble::from_parts(
                    trees, alphas, history, algorithm, cost, features,
                )?)
            }
            "linear-svm" => {
                let weights = parser.expect_f64s("weights")?;
                let bias = parse_f64(&parser.expect_value("bias")?)?;
                let means = parser.expect_f64s("means")?;
                let stds = parser.expect_f64s("stds")?;
                let c_pos = parse_f64(&parser.expect_value("c_pos")?)?;
                let c_neg = parse_f64(&parser.expect_value("c_neg")?)?;
                let residual = parse_f64(&parser.expect_value("kkt_residual")?)?;
                let converged = parser.expect_value("converged")? == "1";
                Model::Svm(SvmModel::from_parts(
                    weights, bias, means, stds, c_pos, c_neg, residual, converged, features,
                )?)
            }
            "majority" => {
                let label = Label::from_name(&parser.expect_value("label")?)
                    .ok_or_else(|| Error::MalformedModel("bad majority label".into()))?;
                Model::Majority {
                    label,
                    feature_names: features,
                }
            }
            other => {
                return Err(Error::MalformedModel(format!("unknown algorithm {other:?}")));
            }
        };
        parser.expect_end()?;
        Ok((model, meta))
    }

    pub fn save<P: AsRef<Path>>(&self, path: P, meta: &ModelMeta) -> Result<()> {
        write_atomic(path, &self.to_text(meta))
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<(Model, ModelMeta)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::FileNotFound(path.display().to_string())
            } else {
                Error::Io(e)
            }
        })?;
        Model::from_text(&text)
    }
}

/// Write `contents` to `path` atomically: the data lands under a temporary
/// name first and is renamed into place, so readers never see partial files.
pub fn write_atomic<P: AsRef<Path>>(path: P, contents: &str) -> Result<()> {
    let path = path.as_ref();
    let tmp = path.with_extension("tmp~");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn fmt(v: f64) -> String {
    // Shortest representation that parses back to the same bits.
    format!("{v}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::MalformedModel(format!("bad float {s:?}")))
}

fn push_line(out: &mut String, fields: &[&str]) {
    out.push_str(&fields.join("\t"));
    out.push('\n');
}

fn push_owned_line(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join("\t"));
    out.push('\n');
}

fn push_vector(out: &mut String, key: &str, values: &[f64]) {
    let mut fields = vec![key.to_string()];
    fields.extend(values.iter().map(|v| fmt(*v)));
    push_owned_line(out, &fields);
}

fn write_tree(out: &mut String, index: usize, tree: &Tree) {
    let kind = match tree.kind() {
        TreeKind::Classification => "classification",
        TreeKind::Regression => "regression",
    };
    push_line(
        out,
        &[
            "tree",
            &index.to_string(),
            kind,
            &tree.nodes().len().to_string(),
        ],
    );
    for node in tree.nodes() {
        match node {
            Node::Internal {
                feature,
                threshold,
                left,
                right,
            } => push_owned_line(
                out,
                &[
                    "node".to_string(),
                    "internal".to_string(),
                    feature.to_string(),
                    fmt(*threshold),
                    left.to_string(),
                    right.to_string(),
                ],
            ),
            Node::Leaf { value } => push_owned_line(
                out,
                &["node".to_string(), "leaf".to_string(), fmt(*value)],
            ),
        }
    }
}

struct Parser<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn next_line(&mut self) -> Result<&'a str> {
        let line = self
            .lines
            .get(self.pos)
            .ok_or_else(|| Error::MalformedModel("unexpected end of file".into()))?;
        self.pos += 1;
        Ok(line)
    }

    /// `key\tvalue` with exactly one value field.
    fn expect_value(&mut self, key: &str) -> Result<String> {
        let fields = self.expect_n(key, 1)?;
        Ok(fields.into_iter().next().unwrap())
    }

    /// `key\tv1\tv2…` with any number of fields.
    fn expect_fields(&mut self, key: &str) -> Result<Vec<String>> {
        let line = self.next_line()?;
        let mut parts = line.split('\t');
        let found = parts.next().unwrap_or_default();
        if found != key {
            return Err(Error::MalformedModel(format!(
                "expected {key:?}, found {found:?}"
            )));
        }
        Ok(parts.map(str::to_string).collect())
    }

    /// `key` with exactly `n` fields.
    fn expect_n(&mut self, key: &str, n: usize) -> Result<Vec<String>> {
        let fields = self.expect_fields(key)?;
        if fields.len() != n {
            return Err(Error::MalformedModel(format!(
                "{key:?} expects {n} fields, found {}",
                fields.len()
            )));
        }
        Ok(fields)
    }

    fn expect_f64s(&mut self, key: &str) -> Result<Vec<f64>> {
        self.expect_fields(key)?
            .iter()
            .map(|s| parse_f64(s))
            .collect()
    }

    fn expect_end(&mut self) -> Result<()> {
        let line = self.next_line()?;
        if line != "end" {
            return Err(Error::MalformedModel("missing end marker".into()));
        }
        Ok(())
    }

    fn read_tree(&mut self, index: usize, n_features: usize) -> Result<Tree> {
        let header = self.expect_n("tree", 3)?;
        if header[0] != index.to_string() {
            return Err(Error::MalformedModel("tree order".into()));
        }
        let kind = match header[1].as_str() {
            "classification" => TreeKind::Classification,
            "regression" => TreeKind::Regression,
            other => {
                return Err(Error::MalformedModel(format!("unknown tree kind {other:?}")));
            }
        };
        let n_nodes: usize = header[2]
            .parse()
            .map_err(|_| Error::MalformedModel("bad node count".into()))?;
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let fields = self.expect_fields("node")?;
            match fields.first().map(String::as_str) {
                Some("internal") if fields.len() == 5 => nodes.push(Node::Internal {
                    feature: fields[1]
                        .parse()
                        .map_err(|_| Error::MalformedModel("bad feature index".into()))?,
                    threshold: parse_f64(&fields[2])?,
                    left: fields[3]
                        .parse()
                        .map_err(|_| Error::MalformedModel("bad child index".into()))?,
                    right: fields[4]
                        .parse()
                        .map_err(|_| Error::MalformedModel("bad child index".into()))?,
                }),
                Some("leaf") if fields.len() == 2 => nodes.push(Node::Leaf {
                    value: parse_f64(&fields[1])?,
                }),
                _ => return Err(Error::MalformedModel("bad node line".into())),
            }
        }
        Tree::from_nodes(nodes, kind, n_features)
    }
}
