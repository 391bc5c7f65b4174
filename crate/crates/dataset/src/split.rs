//! Seeded train/test splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{DatasetError, DatasetResult};

/// Fewest records a split will accept; below this a held-out side is
/// too small to say anything.
pub const MIN_SPLIT_RECORDS: usize = 20;

/// The two sides of a split, each in shuffled order.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit<T> {
    pub train: Vec<T>,
    pub test: Vec<T>,
}

/// Shuffle `records` with a seeded generator and cut them into train
/// and test sides. The train side receives `round(n * train_ratio)`
/// records (computed as `floor(n * train_ratio + 0.5)`); both sides
/// must end up non-empty.
pub fn split_train_test<T>(
    records: Vec<T>,
    train_ratio: f64,
    seed: u64,
) -> DatasetResult<DatasetSplit<T>> {
    let n = records.len();
    if n < MIN_SPLIT_RECORDS {
        return Err(DatasetError::InvalidConfig(format!(
            "splitting needs at least {MIN_SPLIT_RECORDS} records, got {n}"
        )));
    }
    if !(train_ratio > 0.0 && train_ratio < 1.0) {
        return Err(DatasetError::InvalidConfig(format!(
            "train_ratio must lie strictly inside (0, 1), got {train_ratio}"
        )));
    }
    let n_train = (n as f64 * train_ratio + 0.5).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(DatasetError::InvalidConfig(format!(
            "train_ratio {train_ratio} leaves one side of the {n}-record split empty"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut slots: Vec<Option<T>> = records.into_iter().map(Some).collect();
    let mut take = |indices: &[usize]| -> Vec<T> {
        indices.iter().map(|&i| slots[i].take().unwrap()).collect()
    };
    let train = take(&order[..n_train]);
    let test = take(&order[n_train..]);
    Ok(DatasetSplit { train, test })
}
