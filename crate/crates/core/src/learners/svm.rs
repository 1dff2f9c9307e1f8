//! Linear SVM: regularized hinge loss minimized by full-batch subgradient
//! steps of size `1/(λ·t)`. The bias is an extra weight on a constant input
//! and is regularized with the rest. Scores are the logistic of the margin.

use super::{dot, sigmoid};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn sign(label: bool) -> f64 {
    if label {
        1.0
    } else {
        -1.0
    }
}

/// `λ/2·(|w|² + b²) + mean(max(0, 1 − y·(w·x + b)))`.
pub fn objective(w: &[f64], b: f64, x: &[Vec<f64>], y: &[bool], lambda: f64) -> f64 {
    let hinge: f64 = x.iter().zip(y).map(|(r, &l)| (1.0 - sign(l) * (dot(w, r) + b)).max(0.0)).sum();
    0.5 * lambda * (dot(w, w) + b * b) + hinge / x.len() as f64
}

/// Runs `epochs` steps, calling `observe` with the parameters after each.
pub fn descend(
    x: &[Vec<f64>],
    y: &[bool],
    lambda: f64,
    epochs: usize,
    mut observe: impl FnMut(&[f64], f64),
) -> (Vec<f64>, f64) {
    let d = x.first().map_or(0, Vec::len);
    let n = x.len() as f64;
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    if lambda <= 0.0 {
        return (w, b);
    }
    for t in 1..=epochs {
        let eta = 1.0 / (lambda * t as f64);
        let mut gw = vec![0.0; d];
        let mut gb = 0.0;
        for (row, &label) in x.iter().zip(y) {
            let s = sign(label);
            if s * (dot(&w, row) + b) < 1.0 {
                for (g, &v) in gw.iter_mut().zip(row) {
                    *g += s * v;
                }
                gb += s;
            }
        }
        let shrink = 1.0 - eta * lambda;
        for (wi, g) in w.iter_mut().zip(gw) {
            *wi = shrink * *wi + eta * g / n;
        }
        b = shrink * b + eta * gb / n;
        observe(&w, b);
    }
    (w, b)
}

impl LinearSvm {
    pub fn fit(x: &[Vec<f64>], y: &[bool], lambda: f64, epochs: usize) -> Self {
        let (weights, bias) = descend(x, y, lambda, epochs, |_, _| {});
        LinearSvm { weights, bias }
    }

    pub fn margin(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.margin(x))
    }
}
