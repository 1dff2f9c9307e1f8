//! Gaussian naive Bayes.

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNb {
    /// Class priors, `[negative, positive]`.
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    /// Per-class variances, smoothing already added.
    pub variances: [Vec<f64>; 2],
}

fn variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    values.map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

impl GaussianNb {
    /// `smoothing` times the largest feature variance of `x` is added to
    /// every variance. When all features are constant the raw `smoothing`
    /// is used instead.
    pub fn fit(x: &[Vec<f64>], y: &[bool], smoothing: f64) -> Self {
        let d = x[0].len();
        let max_var = (0..d).map(|j| variance(x.iter().map(move |r| r[j]))).fold(0.0, f64::max);
        let epsilon = if max_var > 0.0 { smoothing * max_var } else { smoothing };

        let mut priors = [0.0; 2];
        let mut means: [Vec<f64>; 2] = [vec![0.0; d], vec![0.0; d]];
        let mut variances: [Vec<f64>; 2] = [vec![0.0; d], vec![0.0; d]];
        for c in 0..2 {
            let rows: Vec<&Vec<f64>> = x.iter().zip(y).filter(|(_, &l)| l as usize == c).map(|(r, _)| r).collect();
            priors[c] = rows.len() as f64 / x.len() as f64;
            for j in 0..d {
                let column = rows.iter().map(move |r| r[j]);
                means[c][j] = column.clone().sum::<f64>() / rows.len() as f64;
                variances[c][j] = variance(column) + epsilon;
            }
        }
        GaussianNb { priors, means, variances }
    }

    fn log_joint(&self, c: usize, x: &[f64]) -> f64 {
        let mut l = self.priors[c].ln();
        for ((&v, &m), &s2) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
            l -= 0.5 * ((2.0 * std::f64::consts::PI * s2).ln() + (v - m).powi(2) / s2);
        }
        l
    }

    /// `[P(negative | x), P(positive | x)]`.
    pub fn posteriors(&self, x: &[f64]) -> [f64; 2] {
        let l = [self.log_joint(0, x), self.log_joint(1, x)];
        let top = l[0].max(l[1]);
        let e = [(l[0] - top).exp(), (l[1] - top).exp()];
        let z = e[0] + e[1];
        [e[0] / z, e[1] / z]
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.posteriors(x)[1]
    }
}
