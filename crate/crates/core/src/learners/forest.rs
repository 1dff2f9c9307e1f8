//! Random forest of CART trees with bootstrap sampling.

use rand::Rng as _;
use rayon::prelude::*;

use super::tree::{DecisionTree, TreeParams};
use super::{AlgorithmSpec, SCORE_THRESHOLD};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    /// Seed each tree was grown from.
    pub seeds: Vec<u64>,
}

impl RandomForest {
    pub fn fit(x: &[Vec<f64>], y: &[bool], spec: &AlgorithmSpec, seed: u64) -> Self {
        let params = TreeParams::from_spec(spec);
        let bootstrap = spec.flag("bootstrap");
        let seeds: Vec<u64> = (0..spec.int("ntrees") as u64).map(|t| rng::derive_seed(seed, t)).collect();
        let trees = seeds
            .par_iter()
            .map(|&tree_seed| {
                let samples: Vec<usize> = if bootstrap {
                    // The bootstrap draw uses its own stream so that feature
                    // subsampling sees the same seed with or without it.
                    let mut r = rng::stream(tree_seed, 0);
                    (0..x.len()).map(|_| r.gen_range(0..x.len())).collect()
                } else {
                    (0..x.len()).collect()
                };
                DecisionTree::fit_samples(x, y, &samples, &params, tree_seed)
            })
            .collect();
        RandomForest { trees, seeds }
    }

    /// Share of trees voting positive.
    pub fn score(&self, x: &[f64]) -> f64 {
        let votes = self.trees.iter().filter(|t| t.score(x) >= SCORE_THRESHOLD).count();
        votes as f64 / self.trees.len() as f64
    }
}
