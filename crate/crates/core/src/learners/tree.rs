//! CART classification tree with Gini impurity.

use rand::seq::index::sample;

use super::AlgorithmSpec;
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxFeatures {
    All,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl TreeParams {
    pub fn from_spec(spec: &AlgorithmSpec) -> Self {
        let max_features = match spec.params.get("max_features") {
            Some(_) if spec.text("max_features") == "sqrt" => MaxFeatures::Sqrt,
            _ => MaxFeatures::All,
        };
        TreeParams {
            max_depth: spec.limit("max_depth"),
            min_samples_split: spec.int("min_samples_split"),
            min_samples_leaf: spec.int("min_samples_leaf"),
            max_features,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Share of positive training samples that reached the leaf.
    Leaf { positive: f64 },
    /// Samples with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// Nodes in pre-order; the root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

pub fn gini(pos: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let p = pos / n;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [bool],
    params: &'a TreeParams,
    rng: Option<Rng>,
    nodes: Vec<Node>,
}

struct Best {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_> {
    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x[0].len();
        match (self.params.max_features, self.rng.as_mut()) {
            (MaxFeatures::Sqrt, Some(rng)) => {
                let m = ((d as f64).sqrt() as usize).clamp(1, d);
                let mut picked = sample(rng, d, m).into_vec();
                picked.sort_unstable();
                picked
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, samples: &[usize]) -> Option<Best> {
        let n = samples.len() as f64;
        let total_pos = samples.iter().filter(|&&i| self.y[i]).count() as f64;
        let min_leaf = self.params.min_samples_leaf.max(1);
        let mut best: Option<Best> = None;
        let mut order = samples.to_vec();
        for feature in self.candidate_features() {
            order.sort_by(|&a, &b| self.x[a][feature].total_cmp(&self.x[b][feature]).then(a.cmp(&b)));
            let mut left_pos = 0.0;
            for k in 0..order.len() - 1 {
                if self.y[order[k]] {
                    left_pos += 1.0;
                }
                let (lo, hi) = (self.x[order[k]][feature], self.x[order[k + 1]][feature]);
                let left_n = k + 1;
                if lo == hi || left_n < min_leaf || order.len() - left_n < min_leaf {
                    continue;
                }
                let ln = left_n as f64;
                let rn = n - ln;
                let impurity = (ln * gini(left_pos, ln) + rn * gini(total_pos - left_pos, rn)) / n;
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(Best { impurity, feature, threshold });
                }
            }
        }
        best
    }

    fn build(&mut self, samples: &[usize], depth: usize) -> usize {
        let id = self.nodes.len();
        let n = samples.len() as f64;
        let pos = samples.iter().filter(|&&i| self.y[i]).count() as f64;
        self.nodes.push(Node::Leaf { positive: pos / n });

        let pure = pos == 0.0 || pos == n;
        let depth_reached = self.params.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_reached || samples.len() < self.params.min_samples_split.max(2) {
            return id;
        }
        let Some(best) = self.best_split(samples) else { return id };
        if best.impurity > gini(pos, n) {
            return id;
        }
        let (left, right): (Vec<usize>, Vec<usize>) =
            samples.iter().partition(|&&i| self.x[i][best.feature] <= best.threshold);
        let l = self.build(&left, depth + 1);
        let r = self.build(&right, depth + 1);
        self.nodes[id] = Node::Split { feature: best.feature, threshold: best.threshold, left: l, right: r };
        id
    }
}

impl DecisionTree {
    /// Fits on all rows of `x`.
    pub fn fit(x: &[Vec<f64>], y: &[bool], params: &TreeParams, seed: u64) -> Self {
        let samples: Vec<usize> = (0..x.len()).collect();
        Self::fit_samples(x, y, &samples, params, seed)
    }

    /// Fits on the given sample indices, repeats allowed. The seed is only
    /// consumed when features are subsampled per split.
    pub fn fit_samples(x: &[Vec<f64>], y: &[bool], samples: &[usize], params: &TreeParams, seed: u64) -> Self {
        let rng = (params.max_features != MaxFeatures::All).then(|| rng::rng(seed));
        let mut b = Builder { x, y, params, rng, nodes: Vec::new() };
        b.build(samples, 0);
        DecisionTree { nodes: b.nodes }
    }

    /// Index of the leaf reached by `x`.
    pub fn leaf(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf(x)] {
            Node::Leaf { positive } => positive,
            Node::Split { .. } => unreachable!(),
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }
}
