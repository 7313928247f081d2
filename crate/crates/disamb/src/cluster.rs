//! Hierarchical agglomerative clustering over pairwise match
//! probabilities, with accuracy-maximizing threshold selection.

use std::collections::BTreeMap;

use crate::features::PairScorer;
use crate::learn::TrainedModel;
use crate::metrics::{bcubed, EvalError, EvalScores};

/// A symmetric pairwise distance matrix with zero diagonal, entries in
/// [0, 1], over an ordered set of instances.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    ids: Vec<String>,
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Build from a distance function evaluated once per unordered pair;
    /// symmetry and the zero diagonal hold by construction.
    pub fn from_fn(ids: Vec<String>, mut dist: impl FnMut(usize, usize) -> f64) -> Self {
        let n = ids.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = dist(i, j);
                debug_assert!((0.0..=1.0).contains(&v));
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        DistanceMatrix { ids, n, d }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }
}

/// Distance matrix over test instances: d(i, j) = 1 - predict_prob of the
/// pair, so a higher match probability means a closer pair.
pub fn build_distances(
    instance_ids: &[String],
    model: &TrainedModel,
    scorer: &PairScorer,
) -> DistanceMatrix {
    let mut ids = instance_ids.to_vec();
    ids.sort();
    DistanceMatrix::from_fn(ids.clone(), |i, j| {
        1.0 - model.predict_prob(&scorer.similarity(&ids[i], &ids[j]))
    })
}

/// One agglomeration step. `a` and `b` are cluster ids: leaves are
/// 0..n-1 in label order, and the cluster made by step t gets id n + t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
}

/// The full merge sequence of one clustering run; heights are
/// non-decreasing under average linkage.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    pub labels: Vec<String>,
    pub merges: Vec<Merge>,
}

/// Agglomerative clustering with average linkage: the distance between
/// clusters is the arithmetic mean of all cross-pair distances. Ties are
/// broken by the smallest (min cluster id, max cluster id) pair, making
/// the merge sequence fully deterministic.
pub fn average_linkage(m: &DistanceMatrix) -> Dendrogram {
    let n = m.len();
    let mut work = m.d.clone();
    let mut alive = vec![true; n];
    let mut size = vec![1usize; n];
    let mut cluster_id: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            for j in (i + 1)..n {
                if !alive[j] {
                    continue;
                }
                let dist = work[i * n + j];
                let (lo, hi) = if cluster_id[i] < cluster_id[j] {
                    (cluster_id[i], cluster_id[j])
                } else {
                    (cluster_id[j], cluster_id[i])
                };
                let replace = match &best {
                    None => true,
                    Some((bd, blo, bhi, _, _)) => match dist.total_cmp(bd) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Greater => false,
                        std::cmp::Ordering::Equal => (lo, hi) < (*blo, *bhi),
                    },
                };
                if replace {
                    best = Some((dist, lo, hi, i, j));
                }
            }
        }
        let (height, lo, hi, si, sj) = best.expect("at least two clusters remain");
        merges.push(Merge {
            a: lo,
            b: hi,
            height,
        });

        // Lance-Williams update for average linkage into slot si.
        let (wa, wb) = (size[si] as f64, size[sj] as f64);
        for k in 0..n {
            if !alive[k] || k == si || k == sj {
                continue;
            }
            let merged = (wa * work[si * n + k] + wb * work[sj * n + k]) / (wa + wb);
            work[si * n + k] = merged;
            work[k * n + si] = merged;
        }
        size[si] += size[sj];
        alive[sj] = false;
        cluster_id[si] = n + step;
    }

    Dendrogram {
        labels: m.ids().to_vec(),
        merges,
    }
}

/// A hard assignment of instances to dense integer cluster ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignments: BTreeMap<String, usize>,
}

impl Partition {
    /// Build from arbitrary cluster labels, renumbering them densely by
    /// first appearance over the sorted instance ids.
    pub fn from_assignments<L: Ord>(pairs: impl IntoIterator<Item = (String, L)>) -> Self {
        let raw: BTreeMap<String, L> = pairs.into_iter().collect();
        let mut dense: BTreeMap<&L, usize> = BTreeMap::new();
        let mut next = 0;
        let mut assignments = BTreeMap::new();
        for (id, label) in &raw {
            let cluster = *dense.entry(label).or_insert_with(|| {
                let c = next;
                next += 1;
                c
            });
            assignments.insert(id.clone(), cluster);
        }
        Partition { assignments }
    }

    /// The truth partition induced by author labels.
    pub fn from_labels(labeled: &[(String, String)]) -> Self {
        Partition::from_assignments(labeled.iter().cloned())
    }

    pub fn cluster_of(&self, id: &str) -> Option<usize> {
        self.assignments.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, usize)> {
        self.assignments.iter().map(|(id, &c)| (id, c))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn n_clusters(&self) -> usize {
        self.assignments
            .values()
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    }

    /// CSV export: header plus one `instance_id,cluster_id` row per
    /// instance, sorted by instance id.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance_id,cluster_id\n");
        for (id, cluster) in self.iter() {
            out.push_str(&format!("{id},{cluster}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line == "instance_id,cluster_id") {
                continue;
            }
            let (id, cluster) = line
                .split_once(',')
                .ok_or_else(|| format!("line {}: expected instance_id,cluster_id", i + 1))?;
            pairs.push((id.to_string(), cluster.to_string()));
        }
        Ok(Partition::from_assignments(pairs))
    }
}

impl Dendrogram {
    fn partition_after(&self, n_merges: usize) -> Partition {
        let n = self.labels.len();
        let mut parent: Vec<usize> = (0..n + n_merges).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (t, merge) in self.merges.iter().take(n_merges).enumerate() {
            let ra = find(&mut parent, merge.a);
            let rb = find(&mut parent, merge.b);
            parent[ra] = n + t;
            parent[rb] = n + t;
        }
        Partition::from_assignments(
            self.labels
                .iter()
                .enumerate()
                .map(|(i, id)| (id.clone(), find(&mut parent, i))),
        )
    }

    /// Apply the maximal prefix of merges whose heights are <= threshold;
    /// the remaining components are the clusters.
    pub fn cut(&self, threshold: f64) -> Partition {
        let n_merges = self
            .merges
            .iter()
            .take_while(|m| m.height <= threshold)
            .count();
        self.partition_after(n_merges)
    }

    /// Cut to a requested number of clusters (clamped to [1, n]).
    pub fn cut_to_clusters(&self, k: usize) -> Partition {
        let n = self.labels.len();
        let k = k.clamp(1, n.max(1));
        self.partition_after(n - k)
    }
}

/// The threshold search result: the bF1-maximizing cut.
#[derive(Debug, Clone)]
pub struct BestCut {
    pub threshold: f64,
    pub partition: Partition,
    pub scores: EvalScores,
}

/// Try a cut at 0, at every merge height, and just above the top merge,
/// scoring each against the truth partition with B-cubed F1. Ties go to
/// the smallest threshold.
pub fn best_threshold(dend: &Dendrogram, truth: &Partition) -> Result<BestCut, EvalError> {
    let mut candidates = vec![0.0];
    candidates.extend(dend.merges.iter().map(|m| m.height));
    if let Some(top) = dend.merges.last() {
        candidates.push(top.height + 1e-9);
    }
    candidates.sort_by(|a, b| a.total_cmp(b));
    candidates.dedup();

    let mut best: Option<BestCut> = None;
    for threshold in candidates {
        let partition = dend.cut(threshold);
        let scores = bcubed(&partition, truth)?;
        let replace = match &best {
            None => true,
            Some(b) => scores.bf1 > b.scores.bf1,
        };
        if replace {
            best = Some(BestCut {
                threshold,
                partition,
                scores,
            });
        }
    }
    Ok(best.expect("candidate list is never empty"))
}
