//! Training-pair enumeration, the maximum negative:positive ratio, and
//! ratio-controlled negative sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

/// An unordered instance pair with its truth match flag. The ids are
/// normalized so `a < b` lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LabeledPair {
    pub a: String,
    pub b: String,
    pub is_match: bool,
}

impl LabeledPair {
    pub fn new(x: &str, y: &str, is_match: bool) -> Self {
        debug_assert_ne!(x, y);
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        LabeledPair {
            a: a.to_string(),
            b: b.to_string(),
            is_match,
        }
    }
}

/// All C(n, 2) unordered pairs of the given labeled instances, each marked
/// positive (same label) or negative. Fewer than two instances yield an
/// empty list. Output is in canonical (a, b) order.
pub fn enumerate_pairs(instances: &[(String, String)]) -> Vec<LabeledPair> {
    let mut sorted: Vec<&(String, String)> = instances.iter().collect();
    sorted.sort();
    let mut pairs = Vec::with_capacity(sorted.len() * sorted.len().saturating_sub(1) / 2);
    for (i, (id_a, label_a)) in sorted.iter().enumerate() {
        for (id_b, label_b) in &sorted[i + 1..] {
            pairs.push(LabeledPair::new(id_a, id_b, label_a == label_b));
        }
    }
    pairs
}

/// Split pairs into (positives, negatives), each keeping canonical order.
pub fn split_by_label(pairs: Vec<LabeledPair>) -> (Vec<LabeledPair>, Vec<LabeledPair>) {
    pairs.into_iter().partition(|p| p.is_match)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatioError {
    #[error("ratio undefined: no positive training pairs")]
    NoPositives,
}

/// The maximum negative:positive ratio R = floor(negatives / positives).
pub fn max_ratio(pos_count: u64, neg_count: u64) -> Result<u64, RatioError> {
    if pos_count == 0 {
        return Err(RatioError::NoPositives);
    }
    Ok(neg_count / pos_count)
}

/// How many negatives to keep relative to positives. Ordering puts exact
/// ratios in numeric order with `All` last, matching plot x-axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RatioKind {
    /// Keep min(r * positives, all) negatives, r >= 1.
    Exact(u64),
    /// Keep every negative.
    All,
}

impl RatioKind {
    /// Ratio label used in result files: "1", "10", ..., or "all".
    pub fn label(&self) -> String {
        match self {
            RatioKind::Exact(r) => r.to_string(),
            RatioKind::All => "all".to_string(),
        }
    }
}

impl std::fmt::Display for RatioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatioPlan {
    pub kind: RatioKind,
    pub seed: u64,
}

/// All positives plus a seeded uniform sample of negatives without
/// replacement, sized by the plan (clamped to availability). Output order
/// is deterministic: positives, then sampled negatives, each in canonical
/// pair order.
pub fn sample_training_pairs(
    positives: &[LabeledPair],
    negatives: &[LabeledPair],
    plan: &RatioPlan,
) -> Vec<LabeledPair> {
    assert!(
        !positives.is_empty(),
        "sampling requires at least one positive pair"
    );
    let take = match plan.kind {
        RatioKind::All => negatives.len(),
        RatioKind::Exact(r) => {
            assert!(r >= 1, "exact ratio must be at least 1");
            usize::try_from((r as u128 * positives.len() as u128).min(negatives.len() as u128))
                .expect("pair counts fit in usize")
        }
    };
    let mut out: Vec<LabeledPair> = positives.to_vec();
    out.sort();
    if take == negatives.len() {
        let mut all = negatives.to_vec();
        all.sort();
        out.extend(all);
    } else {
        let mut rng = ChaCha20Rng::seed_from_u64(plan.seed);
        let mut chosen = rand::seq::index::sample(&mut rng, negatives.len(), take).into_vec();
        chosen.sort_unstable();
        let mut sampled: Vec<LabeledPair> =
            chosen.into_iter().map(|i| negatives[i].clone()).collect();
        sampled.sort();
        out.extend(sampled);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(ids_labels: &[(&str, &str)]) -> Vec<(String, String)> {
        ids_labels
            .iter()
            .map(|(i, l)| (i.to_string(), l.to_string()))
            .collect()
    }

    #[test]
    fn five_instances_one_positive_nine_negative() {
        let pairs = enumerate_pairs(&labeled(&[
            ("i1", "A"),
            ("i2", "A"),
            ("i3", "B"),
            ("i4", "C"),
            ("i5", "D"),
        ]));
        assert_eq!(pairs.len(), 10);
        let (pos, neg) = split_by_label(pairs);
        assert_eq!(pos.len(), 1);
        assert_eq!(neg.len(), 9);
        assert_eq!(pos[0], LabeledPair::new("i1", "i2", true));
    }

    #[test]
    fn same_label_everywhere_gives_all_positives() {
        let pairs = enumerate_pairs(&labeled(&[("a", "X"), ("b", "X"), ("c", "X"), ("d", "X")]));
        assert_eq!(pairs.len(), 6);
        assert!(pairs.iter().all(|p| p.is_match));
    }

    #[test]
    fn two_instances_different_labels() {
        let pairs = enumerate_pairs(&labeled(&[("a", "X"), ("b", "Y")]));
        assert_eq!(pairs.len(), 1);
        assert!(!pairs[0].is_match);
    }

    #[test]
    fn fewer_than_two_instances_is_empty_not_error() {
        assert!(enumerate_pairs(&labeled(&[("a", "X")])).is_empty());
        assert!(enumerate_pairs(&[]).is_empty());
    }

    #[test]
    fn pair_ids_are_normalized() {
        let p = LabeledPair::new("zz", "aa", false);
        assert_eq!((p.a.as_str(), p.b.as_str()), ("aa", "zz"));
    }

    #[test]
    fn max_ratio_rounds_down() {
        assert_eq!(max_ratio(2_936, 24_559), Ok(8));
        assert_eq!(max_ratio(1_853, 88_672), Ok(47));
        assert_eq!(max_ratio(903, 27_063), Ok(29));
    }

    #[test]
    fn max_ratio_with_no_positives_is_an_error() {
        assert_eq!(max_ratio(0, 10), Err(RatioError::NoPositives));
    }

    fn synth_pairs(n_pos: usize, n_neg: usize) -> (Vec<LabeledPair>, Vec<LabeledPair>) {
        let pos = (0..n_pos)
            .map(|i| LabeledPair::new(&format!("p{i:03}a"), &format!("p{i:03}b"), true))
            .collect();
        let neg = (0..n_neg)
            .map(|i| LabeledPair::new(&format!("n{i:03}a"), &format!("n{i:03}b"), false))
            .collect();
        (pos, neg)
    }

    #[test]
    fn one_to_one_sampling() {
        let (pos, neg) = synth_pairs(10, 200);
        let plan = RatioPlan {
            kind: RatioKind::Exact(1),
            seed: 5,
        };
        let out = sample_training_pairs(&pos, &neg, &plan);
        assert_eq!(out.len(), 20);
        assert_eq!(out.iter().filter(|p| p.is_match).count(), 10);
    }

    #[test]
    fn one_to_ten_sampling() {
        let (pos, neg) = synth_pairs(10, 200);
        let plan = RatioPlan {
            kind: RatioKind::Exact(10),
            seed: 5,
        };
        let out = sample_training_pairs(&pos, &neg, &plan);
        assert_eq!(out.len(), 110);
        assert_eq!(out.iter().filter(|p| !p.is_match).count(), 100);
    }

    #[test]
    fn sampling_clamps_to_available_negatives() {
        let (pos, neg) = synth_pairs(10, 5);
        let plan = RatioPlan {
            kind: RatioKind::Exact(10),
            seed: 5,
        };
        let out = sample_training_pairs(&pos, &neg, &plan);
        assert_eq!(out.len(), 15);
        assert_eq!(out.iter().filter(|p| !p.is_match).count(), 5);
    }

    #[test]
    fn all_plan_uses_every_negative() {
        let (pos, neg) = synth_pairs(3, 17);
        let plan = RatioPlan {
            kind: RatioKind::All,
            seed: 99,
        };
        let out = sample_training_pairs(&pos, &neg, &plan);
        assert_eq!(out.len(), 20);
    }

    #[test]
    fn sampling_is_deterministic() {
        let (pos, neg) = synth_pairs(5, 50);
        let plan = RatioPlan {
            kind: RatioKind::Exact(3),
            seed: 1234,
        };
        assert_eq!(
            sample_training_pairs(&pos, &neg, &plan),
            sample_training_pairs(&pos, &neg, &plan)
        );
        let other = RatioPlan {
            kind: RatioKind::Exact(3),
            seed: 1235,
        };
        assert_ne!(
            sample_training_pairs(&pos, &neg, &plan),
            sample_training_pairs(&pos, &neg, &other)
        );
    }
}
