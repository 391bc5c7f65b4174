//! Speckle dataset tooling: digit ingestion, capture generation,
//! preprocessing, train/test splitting, and container persistence.
//!
//! The pipeline from digits to a training-ready dataset:
//!
//! 1. [`load_idx`] reads IDX-encoded digit images and labels.
//! 2. [`binarize`] + [`embed_object`] turn each digit into a binary
//!    transmittance mask on the simulation grid.
//! 3. [`generate_dataset`] runs one capture per digit through a
//!    scenario, preprocesses it (crop, sensor noise, normalization),
//!    and records full provenance.
//! 4. [`split_train_test`] cuts the records into train and test sides.
//! 5. [`write_dataset`] / [`read_dataset`] persist records bit-exactly.

mod container;
mod error;
mod generate;
mod mnist;
mod preprocess;
mod split;

pub use container::{read_dataset, read_dataset_generation, write_dataset};
pub use error::{DatasetError, DatasetResult};
pub use generate::{
    generate_dataset, generate_record, reproduce_record, GenerationConfig, SpeckleRecord,
};
pub use mnist::{
    binarize, embed_object, load_idx, load_idx_limited, LabeledImage, DEFAULT_DIGIT_LIMIT,
};
pub use preprocess::{add_noise, crop, normalize, preprocess, CropAnchor, PreprocessConfig};
pub use split::{split_train_test, DatasetSplit, MIN_SPLIT_RECORDS};
