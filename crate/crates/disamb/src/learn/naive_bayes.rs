//! Gaussian naive Bayes with per-dimension class-conditional densities
//! and variance smoothing.

use serde::{Deserialize, Serialize};

use super::TrainingMatrix;
use crate::features::SimilarityVector;

#[derive(Debug, Clone, Copy)]
pub struct NaiveBayesParams {
    /// Variance floor as a fraction of the largest per-dimension variance
    /// of the training data (absolute when all variances are zero).
    pub var_smoothing: f64,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        NaiveBayesParams { var_smoothing: 1e-9 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub log_prior_pos: f64,
    pub log_prior_neg: f64,
    pub mean_pos: [f64; 6],
    pub var_pos: [f64; 6],
    pub mean_neg: [f64; 6],
    pub var_neg: [f64; 6],
}

impl NaiveBayesModel {
    /// Posterior (negative, positive) via Bayes' rule, accumulated in log
    /// space; the two values sum to 1 up to rounding.
    pub fn posterior(&self, x: &SimilarityVector) -> (f64, f64) {
        let log_pos = self.log_prior_pos + log_likelihood(x, &self.mean_pos, &self.var_pos);
        let log_neg = self.log_prior_neg + log_likelihood(x, &self.mean_neg, &self.var_neg);
        let m = log_pos.max(log_neg);
        let e_pos = (log_pos - m).exp();
        let e_neg = (log_neg - m).exp();
        let z = e_pos + e_neg;
        (e_neg / z, e_pos / z)
    }

    pub fn predict_prob(&self, x: &SimilarityVector) -> f64 {
        self.posterior(x).1
    }
}

fn log_likelihood(x: &SimilarityVector, means: &[f64; 6], vars: &[f64; 6]) -> f64 {
    let mut ll = 0.0;
    for d in 0..6 {
        let diff = x.values()[d] - means[d];
        ll += -0.5 * (2.0 * std::f64::consts::PI * vars[d]).ln() - diff * diff / (2.0 * vars[d]);
    }
    ll
}

fn class_stats(rows: &[&SimilarityVector]) -> ([f64; 6], [f64; 6]) {
    let n = rows.len() as f64;
    let mut mean = [0.0; 6];
    for x in rows {
        for d in 0..6 {
            mean[d] += x.values()[d];
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = [0.0; 6];
    for x in rows {
        for d in 0..6 {
            let diff = x.values()[d] - mean[d];
            var[d] += diff * diff;
        }
    }
    for v in &mut var {
        *v /= n;
    }
    (mean, var)
}

pub fn fit(data: &TrainingMatrix, params: &NaiveBayesParams) -> NaiveBayesModel {
    let pos: Vec<&SimilarityVector> = data.rows.iter().filter(|(_, y)| *y).map(|(x, _)| x).collect();
    let neg: Vec<&SimilarityVector> =
        data.rows.iter().filter(|(_, y)| !*y).map(|(x, _)| x).collect();

    // Smoothing floor scales with the pooled per-dimension variance.
    let all: Vec<&SimilarityVector> = data.rows.iter().map(|(x, _)| x).collect();
    let (_, pooled_var) = class_stats(&all);
    let max_var = pooled_var.iter().fold(0.0f64, |m, v| m.max(*v));
    let eps = if max_var > 0.0 {
        params.var_smoothing * max_var
    } else {
        params.var_smoothing
    };

    let (mean_pos, mut var_pos) = class_stats(&pos);
    let (mean_neg, mut var_neg) = class_stats(&neg);
    for v in var_pos.iter_mut().chain(var_neg.iter_mut()) {
        *v += eps;
    }

    let n = data.len() as f64;
    NaiveBayesModel {
        log_prior_pos: (pos.len() as f64 / n).ln(),
        log_prior_neg: (neg.len() as f64 / n).ln(),
        mean_pos,
        var_pos,
        mean_neg,
        var_neg,
    }
}
