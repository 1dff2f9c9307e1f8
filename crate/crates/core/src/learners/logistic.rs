//! L2-regularized logistic regression by full-batch gradient descent, on a
//! selected subset of the features.

use super::{dot, sigmoid};
use crate::dataset::{select_features, FeatureMask};

/// Loss changes below this end training early.
pub const TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub mask: FeatureMask,
    /// One weight per selected feature.
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean log-loss plus `lambda/2 · |w|²` (bias unregularized), with its
/// gradient `(dw, db)`.
pub fn loss_and_gradient(w: &[f64], b: f64, x: &[Vec<f64>], y: &[bool], lambda: f64) -> (f64, Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let z = dot(w, row) + b;
        let t = if label { 1.0 } else { 0.0 };
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        for (g, &v) in gw.iter_mut().zip(row) {
            *g += r * v;
        }
        gb += r;
    }
    loss /= n;
    loss += 0.5 * lambda * dot(w, w);
    for (g, &wi) in gw.iter_mut().zip(w) {
        *g = *g / n + lambda * wi;
    }
    (loss, gw, gb / n)
}

impl LogisticModel {
    pub fn fit(x: &[Vec<f64>], y: &[bool], lambda: f64, learning_rate: f64, epochs: usize, k: usize) -> Self {
        let mask = select_features(x, y, k);
        let projected: Vec<Vec<f64>> = x.iter().map(|r| mask.project(r)).collect();
        let (weights, bias) = descend(&projected, y, lambda, learning_rate, epochs);
        LogisticModel { mask, weights, bias }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, &self.mask.project(x)) + self.bias)
    }
}

pub fn descend(x: &[Vec<f64>], y: &[bool], lambda: f64, learning_rate: f64, epochs: usize) -> (Vec<f64>, f64) {
    let d = x.first().map_or(0, Vec::len);
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut previous = f64::INFINITY;
    for _ in 0..epochs {
        let (loss, gw, gb) = loss_and_gradient(&w, b, x, y, lambda);
        if (previous - loss).abs() < TOLERANCE {
            break;
        }
        previous = loss;
        for (wi, g) in w.iter_mut().zip(gw) {
            *wi -= learning_rate * g;
        }
        b -= learning_rate * gb;
    }
    (w, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_epochs_is_uninformed() {
        let x = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let m = LogisticModel::fit(&x, &[true, false], 0.1, 0.1, 0, 30);
        assert!(m.weights.iter().all(|&w| w == 0.0));
        assert_eq!(m.score(&[5.0, -3.0]), 0.5);
    }

    #[test]
    fn learns_a_threshold() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 19.0]).collect();
        let y: Vec<bool> = (0..20).map(|i| i >= 10).collect();
        let m = LogisticModel::fit(&x, &y, 0.0, 0.1, 5000, 30);
        assert!(m.score(&[1.0]) > 0.5 && m.score(&[0.0]) < 0.5);
    }
}
