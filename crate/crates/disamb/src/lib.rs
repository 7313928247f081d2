//! Author name disambiguation pipeline and experiment harness.
//!
//! The pipeline groups name instances into blocks by canonical name key,
//! splits each block into train and test halves, turns instance pairs
//! into TF-IDF character n-gram similarity vectors, trains a pairwise
//! match classifier, clusters test instances by agglomerative clustering
//! over predicted match probabilities, and scores the result with
//! B-cubed metrics. The [`expt`] harness sweeps negative:positive
//! training-pair ratios over this pipeline to measure how training-data
//! imbalance affects disambiguation accuracy.

pub mod cluster;
pub mod corpus;
pub mod expt;
pub mod features;
pub mod learn;
pub mod metrics;
pub mod pairs;
pub mod textprep;
