//! A small convolutional digit classifier with exact, testable
//! gradients.
//!
//! Architecture (fixed): four stages of 3x3 convolution (stride 1,
//! padding 1) -> ReLU -> 2x2 max pooling with 16, 16, 32, 32 channels,
//! then a 1024-wide hidden fully connected layer with ReLU and a
//! 10-logit output. Works on square inputs of side >= 16; a 200-pixel
//! input flattens to 4608 features.
//!
//! Everything is generic over the element type: training runs in `f32`
//! for speed, and the same code instantiates at `f64` for
//! finite-difference gradient verification. All randomness (weight
//! initialization, epoch shuffling) is seeded; the full train/eval
//! pipeline is a pure function of data, seeds, and configuration.

mod checkpoint;
mod error;
mod eval;
mod layers;
mod network;
mod params;
mod scalar;
mod train;

pub use checkpoint::{load_params, save_params};
pub use error::{ClassifierError, ClassifierResult};
pub use eval::{evaluate, EvalReport};
pub use network::{forward, loss_and_gradients, predict, ForwardCache};
pub use params::{
    flatten_dim, init_params, pooled_sizes, ConvLayer, FcLayer, SimpleNetParams, CONV_CHANNELS,
    HIDDEN_DIM, MIN_INPUT_SIZE, NUM_CLASSES,
};
pub use scalar::Scalar;
pub use train::{train, EpochStats, OptimizerKind, Sample, TrainConfig};
