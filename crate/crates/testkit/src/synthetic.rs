//! Synthetic labelled data for learner and evaluation tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Synthetic {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<bool>,
}

/// `n` points in `d ≥ 2` dimensions, alternating labels. Features 0 and 1
/// lie in [0, 1] for negatives and [2, 3] for positives, a margin of 1.0
/// per informative axis; the remaining features are noise on [0, 3].
pub fn separable(n: usize, d: usize, seed: u64) -> Synthetic {
    assert!(d >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2 == 0;
        let row = (0..d)
            .map(|j| {
                if j < 2 {
                    let v: f64 = rng.gen_range(0.0..1.0);
                    if label { v + 2.0 } else { v }
                } else {
                    rng.gen_range(0.0..3.0)
                }
            })
            .collect();
        x.push(row);
        y.push(label);
    }
    Synthetic { x, y }
}

/// Column 0 equals the label, the last column is the constant 0.5 and the
/// columns between are uniform noise.
pub fn label_copy(n: usize, d: usize, seed: u64) -> Synthetic {
    assert!(d >= 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2 == 1;
        let mut row: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..1.0)).collect();
        row[0] = if label { 1.0 } else { 0.0 };
        row[d - 1] = 0.5;
        x.push(row);
        y.push(label);
    }
    Synthetic { x, y }
}

/// Two jittered binary inputs labelled by their exclusive or.
pub fn xor(n: usize, seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (i % 2 == 1, (i / 2) % 2 == 1);
        let jitter = |rng: &mut ChaCha8Rng| rng.gen_range(-0.1..0.1);
        x.push(vec![f64::from(u8::from(a)) + jitter(&mut rng), f64::from(u8::from(b)) + jitter(&mut rng)]);
        y.push(a != b);
    }
    Synthetic { x, y }
}
