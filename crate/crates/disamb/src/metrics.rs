//! B-cubed precision/recall/F1, pairwise-F for contrast, and aggregation
//! of scores over repetitions and blocks.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cluster::Partition;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("predicted and truth partitions cover different instance sets")]
    InstanceSetMismatch,
}

/// B-cubed scores; all in [0, 1], with bF1 the harmonic mean of bP and bR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalScores {
    pub bp: f64,
    pub br: f64,
    pub bf1: f64,
}

impl EvalScores {
    pub fn from_precision_recall(bp: f64, br: f64) -> Self {
        let bf1 = if bp + br > 0.0 {
            2.0 * bp * br / (bp + br)
        } else {
            0.0
        };
        EvalScores { bp, br, bf1 }
    }
}

fn check_same_instances(pred: &Partition, truth: &Partition) -> Result<(), EvalError> {
    if pred.len() != truth.len() || pred.iter().any(|(id, _)| truth.cluster_of(id).is_none()) {
        return Err(EvalError::InstanceSetMismatch);
    }
    Ok(())
}

/// Per-cell overlap counts between the two partitions, plus cluster sizes.
fn overlap_counts(
    pred: &Partition,
    truth: &Partition,
) -> (
    BTreeMap<(usize, usize), u64>,
    BTreeMap<usize, u64>,
    BTreeMap<usize, u64>,
) {
    let mut cells = BTreeMap::new();
    let mut pred_sizes = BTreeMap::new();
    let mut truth_sizes = BTreeMap::new();
    for (id, pc) in pred.iter() {
        let tc = truth.cluster_of(id).expect("instance sets checked");
        *cells.entry((pc, tc)).or_insert(0u64) += 1;
        *pred_sizes.entry(pc).or_insert(0u64) += 1;
        *truth_sizes.entry(tc).or_insert(0u64) += 1;
    }
    (cells, pred_sizes, truth_sizes)
}

/// B-cubed evaluation of a predicted partition against truth.
///
/// Per instance i, the precision term is |C_pred(i) ∩ C_truth(i)| /
/// |C_pred(i)| and the recall term is the same overlap over
/// |C_truth(i)|; scores are the instance averages. Computed by grouping
/// instances into (pred cluster, truth cluster) overlap cells, which is
/// exactly the per-instance sum.
pub fn bcubed(pred: &Partition, truth: &Partition) -> Result<EvalScores, EvalError> {
    check_same_instances(pred, truth)?;
    let n = pred.len() as f64;
    let (cells, pred_sizes, truth_sizes) = overlap_counts(pred, truth);
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    for (&(pc, tc), &overlap) in &cells {
        let overlap = overlap as f64;
        precision_sum += overlap * overlap / pred_sizes[&pc] as f64;
        recall_sum += overlap * overlap / truth_sizes[&tc] as f64;
    }
    Ok(EvalScores::from_precision_recall(
        precision_sum / n,
        recall_sum / n,
    ))
}

/// Precision/recall/F1 over same-cluster instance pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn pairs_within(sizes: &BTreeMap<usize, u64>) -> u64 {
    sizes.values().map(|&s| s * (s - 1) / 2).sum()
}

/// Pairwise-F: precision and recall over the sets of same-cluster pairs.
/// When the predicted partition has no positive pairs, precision is
/// vacuously 1; when truth has none, recall is vacuously 1.
pub fn pairwise_f(pred: &Partition, truth: &Partition) -> Result<PairwiseScores, EvalError> {
    check_same_instances(pred, truth)?;
    let (cells, pred_sizes, truth_sizes) = overlap_counts(pred, truth);
    let pred_pairs = pairs_within(&pred_sizes);
    let truth_pairs = pairs_within(&truth_sizes);
    let common: u64 = cells.values().map(|&c| c * (c - 1) / 2).sum();
    let precision = if pred_pairs == 0 {
        1.0
    } else {
        common as f64 / pred_pairs as f64
    };
    let recall = if truth_pairs == 0 {
        1.0
    } else {
        common as f64 / truth_pairs as f64
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(PairwiseScores {
        precision,
        recall,
        f1,
    })
}

/// Mean and sample standard deviation of one score over repetitions.
/// The std is absent for a single observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std: Option<f64>,
}

pub fn summarize(values: &[f64]) -> Summary {
    assert!(!values.is_empty(), "cannot summarize zero observations");
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    let std = if count > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        Some((ss / (count - 1) as f64).sqrt())
    } else {
        None
    };
    Summary { count, mean, std }
}

/// Whether the sample std is strictly below `fraction` of the mean;
/// absent when the std itself is absent.
pub fn std_below_fraction(summary: &Summary, fraction: f64) -> Option<bool> {
    summary.std.map(|std| std < fraction * summary.mean)
}

/// Per-group score statistics over repetitions.
#[derive(Debug, Clone)]
pub struct AggregateRow<K> {
    pub key: K,
    pub bp: Summary,
    pub br: Summary,
    pub bf1: Summary,
}

impl<K> AggregateRow<K> {
    pub fn count(&self) -> usize {
        self.bf1.count
    }
}

/// Group scores by key and summarize each group. Output is sorted by key.
pub fn aggregate<K: Ord>(rows: impl IntoIterator<Item = (K, EvalScores)>) -> Vec<AggregateRow<K>> {
    let mut groups: BTreeMap<K, Vec<EvalScores>> = BTreeMap::new();
    for (key, scores) in rows {
        groups.entry(key).or_default().push(scores);
    }
    groups
        .into_iter()
        .map(|(key, scores)| {
            let collect = |f: fn(&EvalScores) -> f64| -> Vec<f64> { scores.iter().map(f).collect() };
            AggregateRow {
                key,
                bp: summarize(&collect(|s| s.bp)),
                br: summarize(&collect(|s| s.br)),
                bf1: summarize(&collect(|s| s.bf1)),
            }
        })
        .collect()
}
