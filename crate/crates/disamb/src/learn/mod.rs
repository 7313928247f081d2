//! Three from-scratch binary classifiers over 6-dimensional similarity
//! vectors, each emitting a match probability.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::SimilarityVector;

pub mod forest;
pub mod logistic;
pub mod naive_bayes;

pub use forest::{ForestModel, ForestParams};
pub use logistic::{LogisticModel, LogisticParams};
pub use naive_bayes::{NaiveBayesModel, NaiveBayesParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModelKind {
    LogisticRegression,
    NaiveBayes,
    RandomForest,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::LogisticRegression,
        ModelKind::NaiveBayes,
        ModelKind::RandomForest,
    ];

    /// Short code used in CLI flags and result files.
    pub fn code(&self) -> &'static str {
        match self {
            ModelKind::LogisticRegression => "lr",
            ModelKind::NaiveBayes => "nb",
            ModelKind::RandomForest => "rf",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lr" | "logistic" | "logistic_regression" => Ok(ModelKind::LogisticRegression),
            "nb" | "naive_bayes" => Ok(ModelKind::NaiveBayes),
            "rf" | "random_forest" => Ok(ModelKind::RandomForest),
            other => Err(format!("unknown classifier {other:?} (expected lr, nb, or rf)")),
        }
    }
}

/// Which classifier to fit, its hyperparameters, and the seed that makes
/// training deterministic.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub seed: u64,
    pub logistic: LogisticParams,
    pub naive_bayes: NaiveBayesParams,
    pub forest: ForestParams,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, seed: u64) -> Self {
        ModelSpec {
            kind,
            seed,
            logistic: LogisticParams::default(),
            naive_bayes: NaiveBayesParams::default(),
            forest: ForestParams::default(),
        }
    }
}

/// Labeled similarity vectors; `true` marks a matching pair.
#[derive(Debug, Clone, Default)]
pub struct TrainingMatrix {
    pub rows: Vec<(SimilarityVector, bool)>,
}

impl TrainingMatrix {
    pub fn new(rows: Vec<(SimilarityVector, bool)>) -> Self {
        TrainingMatrix { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn validate(&self) -> Result<(), TrainError> {
        if self.rows.is_empty() {
            return Err(TrainError::Empty);
        }
        if self.rows.iter().any(|(x, _)| !x.is_finite()) {
            return Err(TrainError::NonFinite);
        }
        let positives = self.rows.iter().filter(|(_, y)| *y).count();
        if positives == 0 || positives == self.rows.len() {
            return Err(TrainError::SingleClass);
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrainError {
    #[error("training data is empty")]
    Empty,
    #[error("training data contains a non-finite feature value")]
    NonFinite,
    #[error("training data contains a single class; both classes are required")]
    SingleClass,
}

/// A fitted classifier. Serializes to a self-describing JSON document for
/// reproducibility audits.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedModel {
    LogisticRegression(LogisticModel),
    NaiveBayes(NaiveBayesModel),
    RandomForest(ForestModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::LogisticRegression(_) => ModelKind::LogisticRegression,
            TrainedModel::NaiveBayes(_) => ModelKind::NaiveBayes,
            TrainedModel::RandomForest(_) => ModelKind::RandomForest,
        }
    }

    /// Probability that the pair described by `x` is a match; finite and
    /// in [0, 1] for every fitted model.
    pub fn predict_prob(&self, x: &SimilarityVector) -> f64 {
        match self {
            TrainedModel::LogisticRegression(m) => m.predict_prob(x),
            TrainedModel::NaiveBayes(m) => m.predict_prob(x),
            TrainedModel::RandomForest(m) => m.predict_prob(x),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("models serialize")
    }
}

/// Fit the classifier named by the spec. Deterministic in
/// (data, spec, seed).
pub fn train(spec: &ModelSpec, data: &TrainingMatrix) -> Result<TrainedModel, TrainError> {
    data.validate()?;
    Ok(match spec.kind {
        ModelKind::LogisticRegression => {
            TrainedModel::LogisticRegression(logistic::fit(data, &spec.logistic))
        }
        ModelKind::NaiveBayes => {
            TrainedModel::NaiveBayes(naive_bayes::fit(data, &spec.naive_bayes))
        }
        ModelKind::RandomForest => {
            TrainedModel::RandomForest(forest::fit(data, &spec.forest, spec.seed))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    pub(crate) fn vector(v: [f64; 6]) -> SimilarityVector {
        SimilarityVector(v)
    }

    fn axis(x: f64) -> SimilarityVector {
        vector([x, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    /// 1-D separable data: positives at 1.0, negatives at 0.0.
    fn separable_axis(n_per_class: usize) -> TrainingMatrix {
        let mut rows = Vec::new();
        for _ in 0..n_per_class {
            rows.push((axis(1.0), true));
            rows.push((axis(0.0), false));
        }
        TrainingMatrix::new(rows)
    }

    #[test]
    fn all_models_are_monotone_on_separable_data() {
        let data = separable_axis(50);
        for kind in ModelKind::ALL {
            let model = train(&ModelSpec::new(kind, 7), &data).unwrap();
            let high = model.predict_prob(&axis(0.9));
            let low = model.predict_prob(&axis(0.1));
            assert!(high > 0.5, "{kind}: p(0.9) = {high}");
            assert!(low < 0.5, "{kind}: p(0.1) = {low}");
        }
    }

    /// Noisy separable clusters in all six dimensions.
    fn separable_clusters(n_per_class: usize, seed: u64) -> TrainingMatrix {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        for _ in 0..n_per_class {
            let mut hi = [0.0; 6];
            let mut lo = [0.0; 6];
            for d in 0..6 {
                hi[d] = 0.8 + 0.15 * rng.random::<f64>();
                lo[d] = 0.05 + 0.15 * rng.random::<f64>();
            }
            rows.push((vector(hi), true));
            rows.push((vector(lo), false));
        }
        TrainingMatrix::new(rows)
    }

    #[test]
    fn held_out_accuracy_on_separable_data() {
        let train_data = separable_clusters(100, 11);
        let test_data = separable_clusters(100, 12);
        for kind in ModelKind::ALL {
            let model = train(&ModelSpec::new(kind, 3), &train_data).unwrap();
            let correct = test_data
                .rows
                .iter()
                .filter(|(x, y)| (model.predict_prob(x) > 0.5) == *y)
                .count();
            let accuracy = correct as f64 / test_data.len() as f64;
            assert!(accuracy >= 0.95, "{kind}: accuracy {accuracy}");
        }
    }

    #[test]
    fn single_class_data_is_rejected() {
        let rows = vec![(axis(0.2), true), (axis(0.9), true)];
        for kind in ModelKind::ALL {
            let err = train(&ModelSpec::new(kind, 0), &TrainingMatrix::new(rows.clone()));
            assert_eq!(err.unwrap_err(), TrainError::SingleClass);
        }
    }

    #[test]
    fn nan_features_are_rejected() {
        let rows = vec![(axis(f64::NAN), true), (axis(0.0), false)];
        let err = train(
            &ModelSpec::new(ModelKind::LogisticRegression, 0),
            &TrainingMatrix::new(rows),
        );
        assert_eq!(err.unwrap_err(), TrainError::NonFinite);
    }

    #[test]
    fn empty_data_is_rejected() {
        let err = train(
            &ModelSpec::new(ModelKind::NaiveBayes, 0),
            &TrainingMatrix::default(),
        );
        assert_eq!(err.unwrap_err(), TrainError::Empty);
    }

    #[test]
    fn training_is_deterministic() {
        let data = separable_clusters(40, 21);
        for kind in ModelKind::ALL {
            let a = train(&ModelSpec::new(kind, 99), &data).unwrap();
            let b = train(&ModelSpec::new(kind, 99), &data).unwrap();
            assert_eq!(a.to_json(), b.to_json(), "{kind}");
        }
    }

    #[test]
    fn model_json_is_self_describing() {
        let data = separable_axis(10);
        let model = train(&ModelSpec::new(ModelKind::NaiveBayes, 1), &data).unwrap();
        let json = model.to_json();
        assert!(json.contains("\"kind\": \"naive_bayes\""));
        let back: TrainedModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back.kind(), ModelKind::NaiveBayes);
    }
}
