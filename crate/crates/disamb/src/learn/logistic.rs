//! L2-regularized logistic regression fit by full-batch gradient descent
//! with a backtracking line search.

use serde::{Deserialize, Serialize};

use super::TrainingMatrix;
use crate::features::SimilarityVector;

#[derive(Debug, Clone, Copy)]
pub struct LogisticParams {
    /// L2 penalty on the weights (the bias is unpenalized).
    pub l2: f64,
    /// Stop once the gradient max-norm falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2: 1.0,
            tolerance: 1e-6,
            max_iterations: 5_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: [f64; 6],
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl LogisticModel {
    pub fn predict_prob(&self, x: &SimilarityVector) -> f64 {
        sigmoid(dot(&self.weights, x.values()) + self.bias)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn dot(w: &[f64; 6], x: &[f64; 6]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Mean negative log-likelihood plus (l2 / 2) * ||w||^2.
pub fn loss(weights: &[f64; 6], bias: f64, data: &TrainingMatrix, l2: f64) -> f64 {
    let n = data.len() as f64;
    let nll: f64 = data
        .rows
        .iter()
        .map(|(x, y)| {
            let z = dot(weights, x.values()) + bias;
            softplus(z) - if *y { z } else { 0.0 }
        })
        .sum();
    let penalty: f64 = weights.iter().map(|w| w * w).sum();
    nll / n + 0.5 * l2 * penalty
}

/// Analytic gradient of [`loss`] with respect to (weights, bias).
pub fn gradient(
    weights: &[f64; 6],
    bias: f64,
    data: &TrainingMatrix,
    l2: f64,
) -> ([f64; 6], f64) {
    let n = data.len() as f64;
    let mut gw = [0.0; 6];
    let mut gb = 0.0;
    for (x, y) in &data.rows {
        let z = dot(weights, x.values()) + bias;
        let residual = sigmoid(z) - if *y { 1.0 } else { 0.0 };
        for (g, xi) in gw.iter_mut().zip(x.values()) {
            *g += residual * xi;
        }
        gb += residual;
    }
    for (g, w) in gw.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (gw, gb / n)
}

pub fn fit(data: &TrainingMatrix, params: &LogisticParams) -> LogisticModel {
    let mut weights = [0.0; 6];
    let mut bias = 0.0;
    let mut step = 1.0f64;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iterations {
        let (gw, gb) = gradient(&weights, bias, data, params.l2);
        let max_norm = gw
            .iter()
            .chain(std::iter::once(&gb))
            .fold(0.0f64, |m, g| m.max(g.abs()));
        if max_norm < params.tolerance {
            converged = true;
            break;
        }
        let f0 = loss(&weights, bias, data, params.l2);
        let grad_sq: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;

        // Armijo backtracking, restarting from twice the last accepted step.
        step = (step * 2.0).min(1e6);
        loop {
            let mut w_next = weights;
            for (w, g) in w_next.iter_mut().zip(&gw) {
                *w -= step * g;
            }
            let b_next = bias - step * gb;
            if loss(&w_next, b_next, data, params.l2) <= f0 - 1e-4 * step * grad_sq {
                weights = w_next;
                bias = b_next;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                // No descent step representable; gradient is numerically flat.
                converged = true;
                break;
            }
        }
        if converged {
            break;
        }
        iterations += 1;
    }

    LogisticModel {
        weights,
        bias,
        iterations,
        converged,
    }
}
