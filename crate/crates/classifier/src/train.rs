//! Mini-batch training: seeded shuffling, SGD and Adam, per-epoch log.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ClassifierError, ClassifierResult};
use crate::eval::accuracy_of;
use crate::network::loss_and_gradients;
use crate::params::SimpleNetParams;
use crate::scalar::{fl, Scalar};

/// One labeled training or evaluation example.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<F> {
    pub image: Array2<F>,
    pub label: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OptimizerKind {
    /// Plain stochastic gradient descent.
    Sgd,
    /// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
    #[default]
    Adam,
}

/// Training hyperparameters. Defaults: Adam, learning rate 1e-3,
/// batch 32, 10 epochs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    /// Seed for [`crate::init_params`] (recorded here so one config
    /// value pins the whole run; `train` itself takes initial
    /// parameters).
    pub init_seed: u64,
    /// Seed of the epoch shuffling stream.
    pub shuffle_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 32,
            epochs: 10,
            learning_rate: 1e-3,
            optimizer: OptimizerKind::Adam,
            init_seed: 0,
            shuffle_seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> ClassifierResult<()> {
        if self.batch_size == 0 {
            return Err(ClassifierError::Config("batch_size must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(ClassifierError::Config("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(ClassifierError::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    /// 1-based epoch number.
    pub epoch: usize,
    /// Mean training loss over the epoch's batches.
    pub loss: f64,
    pub train_accuracy: f64,
    /// Present when a held-out set was supplied.
    pub test_accuracy: Option<f64>,
}

enum Optimizer<F> {
    Sgd,
    Adam {
        m: SimpleNetParams<F>,
        v: SimpleNetParams<F>,
        step: u64,
    },
}

impl<F: Scalar> Optimizer<F> {
    fn new(kind: OptimizerKind, params: &SimpleNetParams<F>) -> Self {
        match kind {
            OptimizerKind::Sgd => Optimizer::Sgd,
            OptimizerKind::Adam => Optimizer::Adam {
                m: params.zeros_like(),
                v: params.zeros_like(),
                step: 0,
            },
        }
    }

    fn apply(&mut self, params: &mut SimpleNetParams<F>, grads: &SimpleNetParams<F>, lr: f64) {
        match self {
            Optimizer::Sgd => {
                params.add_assign_scaled(grads, fl(-lr));
            }
            Optimizer::Adam { m, v, step } => {
                const BETA1: f64 = 0.9;
                const BETA2: f64 = 0.999;
                const EPS: f64 = 1e-8;
                *step += 1;
                let t = *step as i32;
                let corrected_lr =
                    lr * (1.0 - BETA2.powi(t)).sqrt() / (1.0 - BETA1.powi(t));
                let (b1, b2): (F, F) = (fl(BETA1), fl(BETA2));
                let (one_minus_b1, one_minus_b2): (F, F) = (fl(1.0 - BETA1), fl(1.0 - BETA2));
                let (alpha, eps): (F, F) = (fl(corrected_lr), fl(EPS));
                for (((mut p, g), mut m_i), mut v_i) in params
                    .views_mut()
                    .into_iter()
                    .zip(grads.views())
                    .zip(m.views_mut())
                    .zip(v.views_mut())
                {
                    ndarray::Zip::from(&mut p)
                        .and(&g)
                        .and(&mut m_i)
                        .and(&mut v_i)
                        .for_each(|p, &g, m, v| {
                            *m = b1 * *m + one_minus_b1 * g;
                            *v = b2 * *v + one_minus_b2 * g * g;
                            *p = *p - alpha * *m / (v.sqrt() + eps);
                        });
                }
            }
        }
    }
}

/// Train on `train_set` (optionally tracking accuracy on `test_set`)
/// and return the final parameters with the per-epoch log. Fully
/// deterministic given the parameters, data, and seeds. Fails with the
/// epoch index if the loss stops being finite.
pub fn train<F: Scalar>(
    mut params: SimpleNetParams<F>,
    train_set: &[Sample<F>],
    test_set: Option<&[Sample<F>]>,
    cfg: &TrainConfig,
) -> ClassifierResult<(SimpleNetParams<F>, Vec<EpochStats>)> {
    cfg.validate()?;
    if train_set.is_empty() {
        return Err(ClassifierError::Config("training set is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.shuffle_seed);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut optimizer = Optimizer::new(cfg.optimizer, &params);
    let mut log = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0f64;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<_> = chunk.iter().map(|&i| train_set[i].image.view()).collect();
            let labels: Vec<u8> = chunk.iter().map(|&i| train_set[i].label).collect();
            let (loss, grads) = loss_and_gradients(&params, &batch, &labels)?;
            let loss = loss.to_f64().expect("loss converts to f64");
            if !loss.is_finite() {
                return Err(ClassifierError::Training {
                    epoch: epoch + 1,
                    message: format!("batch loss became {loss}"),
                });
            }
            optimizer.apply(&mut params, &grads, cfg.learning_rate);
            loss_sum += loss * chunk.len() as f64;
        }
        let train_accuracy = accuracy_of(&params, train_set)?;
        let test_accuracy = match test_set {
            Some(set) => Some(accuracy_of(&params, set)?),
            None => None,
        };
        log.push(EpochStats {
            epoch: epoch + 1,
            loss: loss_sum / train_set.len() as f64,
            train_accuracy,
            test_accuracy,
        });
    }
    Ok((params, log))
}
