//! Linear max-margin classifier on edge pairs.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{ModelKey, PairSample, RankerError, TrainConfig};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainStats {
    pub samples: usize,
    pub train_accuracy: f64,
    pub validation_accuracy: Option<f64>,
    pub seed: u64,
    pub lambda: f64,
    pub epochs: usize,
    pub dataset_hash: String,
}

/// Pair classifier over a subset of schema features. A pair is encoded as
/// the standardized selected features of the first edge followed by those
/// of the second.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub key: ModelKey,
    /// Schema positions in use.
    pub mask: Vec<usize>,
    pub names: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Length `2 * mask.len()`.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub stats: TrainStats,
}

impl LinearModel {
    pub fn standardize(&self, x: &[f64]) -> Vec<f64> {
        self.mask.iter().zip(self.mean.iter().zip(&self.std)).map(|(&i, (m, s))| (x[i] - m) / s).collect()
    }

    fn norm(&self) -> f64 {
        let n = self.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        if n > 0.0 {
            n
        } else {
            1.0
        }
    }

    fn raw(&self, a: &[f64], b: &[f64]) -> f64 {
        let k = self.mask.len();
        let wa: f64 = self.weights[..k].iter().zip(a).map(|(w, x)| w * x).sum();
        let wb: f64 = self.weights[k..].iter().zip(b).map(|(w, x)| w * x).sum();
        wa + wb + self.bias
    }

    /// Signed distance of the pair `(x1, x2)` (full schema vectors) to the
    /// hyperplane.
    pub fn margin(&self, x1: &[f64], x2: &[f64]) -> f64 {
        self.raw(&self.standardize(x1), &self.standardize(x2)) / self.norm()
    }

    /// Symmetrized confidence that the first edge is the better one.
    /// `confidence(a, b) == -confidence(b, a)` holds exactly.
    pub fn confidence(&self, x1: &[f64], x2: &[f64]) -> f64 {
        let (a, b) = (self.standardize(x1), self.standardize(x2));
        let k = self.mask.len();
        let (w1, w2) = self.weights.split_at(k);
        let s: f64 = (0..k).map(|i| (w1[i] - w2[i]) * (a[i] - b[i])).sum();
        s / 2.0 / self.norm()
    }

    pub fn accuracy(&self, samples: &[PairSample]) -> f64 {
        if samples.is_empty() {
            return 0.0;
        }
        let right = samples.iter().filter(|s| (self.margin(&s.x1, &s.x2) > 0.0) == (s.y > 0)).count();
        right as f64 / samples.len() as f64
    }

    /// Combined absolute weight of both copies of each selected feature.
    pub fn feature_weights(&self) -> Vec<f64> {
        let k = self.mask.len();
        (0..k).map(|i| self.weights[i].abs() + self.weights[k + i].abs()).collect()
    }
}

/// Hex sha256 over labels and features of a sample list.
pub fn dataset_hash(samples: &[PairSample]) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    for s in samples {
        h.update([s.y as u8]);
        for x in s.x1.iter().chain(&s.x2) {
            h.update(x.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// Trains on the schema positions in `features`; positions without variance
/// in the training data are dropped.
pub fn train(
    key: ModelKey,
    samples: &[PairSample],
    features: &[usize],
    names: &[String],
    cfg: &TrainConfig,
    validation: Option<&[PairSample]>,
) -> Result<LinearModel, RankerError> {
    cfg.validate()?;
    if !(samples.iter().any(|s| s.y > 0) && samples.iter().any(|s| s.y < 0)) {
        return Err(RankerError::SingleClass(key));
    }
    // statistics over both halves of every pair
    let n = (2 * samples.len()) as f64;
    let mut mask = Vec::new();
    let mut mean = Vec::new();
    let mut std = Vec::new();
    for &i in features {
        let m = samples.iter().map(|s| s.x1[i] + s.x2[i]).sum::<f64>() / n;
        let var = samples.iter().map(|s| (s.x1[i] - m).powi(2) + (s.x2[i] - m).powi(2)).sum::<f64>() / n;
        if var.sqrt() > 1e-9 {
            mask.push(i);
            mean.push(m);
            std.push(var.sqrt());
        }
    }
    let k = mask.len();
    let mut model = LinearModel {
        key,
        names: mask.iter().map(|&i| names[i].clone()).collect(),
        mask,
        mean,
        std,
        weights: vec![0.0; 2 * k],
        bias: 0.0,
        stats: TrainStats {
            samples: samples.len(),
            train_accuracy: 0.0,
            validation_accuracy: None,
            seed: cfg.seed,
            lambda: cfg.lambda,
            epochs: cfg.epochs,
            dataset_hash: dataset_hash(samples),
        },
    };
    let data: Vec<(Vec<f64>, f64)> = samples
        .iter()
        .map(|s| {
            let mut z = model.standardize(&s.x1);
            z.extend(model.standardize(&s.x2));
            (z, s.y as f64)
        })
        .collect();
    let (w, b) = sgd(&data, 2 * k, cfg, key);
    model.weights = w;
    model.bias = b;
    model.stats.train_accuracy = model.accuracy(samples);
    model.stats.validation_accuracy = validation.filter(|v| !v.is_empty()).map(|v| model.accuracy(v));
    Ok(model)
}

/// Averaged stochastic subgradient descent on hinge loss + L2, with step
/// size `eta0 / (1 + eta0 * lambda * t)` and a seeded shuffle per epoch.
fn sgd(data: &[(Vec<f64>, f64)], dim: usize, cfg: &TrainConfig, key: ModelKey) -> (Vec<f64>, f64) {
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut avg_w = vec![0.0; dim];
    let mut avg_b = 0.0;
    let mut t = 0usize;
    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 0..cfg.epochs {
        order.sort_unstable();
        order.shuffle(&mut rng::stream(cfg.seed, &[key.id(), epoch as u64]));
        for &i in &order {
            let (z, y) = &data[i];
            let eta = cfg.eta0 / (1.0 + cfg.eta0 * cfg.lambda * t as f64);
            let m = y * (w.iter().zip(z).map(|(a, x)| a * x).sum::<f64>() + b);
            let shrink = 1.0 - eta * cfg.lambda;
            for a in w.iter_mut() {
                *a *= shrink;
            }
            if m < 1.0 {
                for (a, x) in w.iter_mut().zip(z) {
                    *a += eta * y * x;
                }
                b += eta * y;
            }
            t += 1;
            let r = 1.0 / t as f64;
            for (a, x) in avg_w.iter_mut().zip(&w) {
                *a += (x - *a) * r;
            }
            avg_b += (b - avg_b) * r;
        }
    }
    (avg_w, avg_b)
}
