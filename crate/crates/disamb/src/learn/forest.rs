//! Random forest of Gini-split decision trees grown on bootstrap samples,
//! with a random subset of dimensions considered at each node.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::TrainingMatrix;
use crate::features::SimilarityVector;

#[derive(Debug, Clone, Copy)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Dimensions sampled as split candidates at each node; floor(sqrt(6)).
    pub candidate_dims: usize,
    pub min_leaf: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            candidate_dims: 2,
            min_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Split {
        dim: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        positive_fraction: f64,
    },
}

/// One decision tree as a node arena; index 0 is the root.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &SimilarityVector) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { positive_fraction } => return *positive_fraction,
                Node::Split {
                    dim,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x.values()[*dim] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
}

impl ForestModel {
    /// Mean leaf positive-fraction over all trees; always in [0, 1].
    pub fn predict_prob(&self, x: &SimilarityVector) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        sum / self.trees.len() as f64
    }
}

pub fn fit(data: &TrainingMatrix, params: &ForestParams, seed: u64) -> ForestModel {
    assert!(params.n_trees >= 1 && params.candidate_dims >= 1);
    let mut seeder = ChaCha20Rng::seed_from_u64(seed);
    let tree_seeds: Vec<u64> = (0..params.n_trees).map(|_| seeder.random()).collect();
    let trees = tree_seeds
        .into_iter()
        .map(|tree_seed| {
            let mut rng = ChaCha20Rng::seed_from_u64(tree_seed);
            let n = data.len();
            let bootstrap: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let mut nodes = Vec::new();
            build_node(data, &bootstrap, params, &mut rng, &mut nodes);
            Tree { nodes }
        })
        .collect();
    ForestModel { trees }
}

fn positive_fraction(data: &TrainingMatrix, indices: &[usize]) -> f64 {
    let pos = indices.iter().filter(|&&i| data.rows[i].1).count();
    pos as f64 / indices.len() as f64
}

fn gini(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

struct Split {
    dim: usize,
    threshold: f64,
    impurity: f64,
}

/// Recursively grow the subtree for `indices`; returns its node index.
fn build_node(
    data: &TrainingMatrix,
    indices: &[usize],
    params: &ForestParams,
    rng: &mut ChaCha20Rng,
    nodes: &mut Vec<Node>,
) -> usize {
    let frac = positive_fraction(data, indices);
    if frac == 0.0 || frac == 1.0 {
        nodes.push(Node::Leaf {
            positive_fraction: frac,
        });
        return nodes.len() - 1;
    }

    let dims = rand::seq::index::sample(rng, SimilarityVector::DIM, params.candidate_dims);
    let mut best: Option<Split> = None;
    for dim in dims {
        if let Some(split) = best_split_on(data, indices, dim, params.min_leaf) {
            let better = match &best {
                None => true,
                Some(b) => split.impurity < b.impurity,
            };
            if better {
                best = Some(split);
            }
        }
    }

    let Some(split) = best else {
        // All sampled dimensions are constant here; mixed labels stay a leaf.
        nodes.push(Node::Leaf {
            positive_fraction: frac,
        });
        return nodes.len() - 1;
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .iter()
        .partition(|&&i| data.rows[i].0.values()[split.dim] <= split.threshold);

    // Reserve the slot so child indices land after this node.
    let at = nodes.len();
    nodes.push(Node::Leaf {
        positive_fraction: frac,
    });
    let left = build_node(data, &left_idx, params, rng, nodes);
    let right = build_node(data, &right_idx, params, rng, nodes);
    nodes[at] = Node::Split {
        dim: split.dim,
        threshold: split.threshold,
        left,
        right,
    };
    at
}

/// The lowest-impurity midpoint threshold on one dimension, if any
/// threshold separates the node's samples.
fn best_split_on(
    data: &TrainingMatrix,
    indices: &[usize],
    dim: usize,
    min_leaf: usize,
) -> Option<Split> {
    let mut values: Vec<(f64, bool)> = indices
        .iter()
        .map(|&i| (data.rows[i].0.values()[dim], data.rows[i].1))
        .collect();
    values.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let total = values.len();
    let total_pos = values.iter().filter(|(_, y)| *y).count();
    let mut best: Option<Split> = None;
    let mut left_pos = 0;
    for i in 0..total - 1 {
        if values[i].1 {
            left_pos += 1;
        }
        if values[i].0 == values[i + 1].0 {
            continue;
        }
        let left_n = i + 1;
        let right_n = total - left_n;
        if left_n < min_leaf || right_n < min_leaf {
            continue;
        }
        let impurity = (left_n as f64 * gini(left_pos, left_n)
            + right_n as f64 * gini(total_pos - left_pos, right_n))
            / total as f64;
        let better = match &best {
            None => true,
            Some(b) => impurity < b.impurity,
        };
        if better {
            // The midpoint of two adjacent floats can round up to the
            // larger one; fall back to the lower value so both children
            // stay non-empty under the `x <= threshold` rule.
            let mut threshold = (values[i].0 + values[i + 1].0) / 2.0;
            if threshold >= values[i + 1].0 {
                threshold = values[i].0;
            }
            best = Some(Split {
                dim,
                threshold,
                impurity,
            });
        }
    }
    best
}
