//! Evaluation: accuracy, confusion matrix, per-class breakdown.

use serde::{Deserialize, Serialize};

use crate::error::{ClassifierError, ClassifierResult};
use crate::network::predict;
use crate::params::{SimpleNetParams, NUM_CLASSES};
use crate::scalar::Scalar;
use crate::train::Sample;

/// Evaluation results on a labeled set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Fraction of records predicted correctly.
    pub accuracy: f64,
    /// `confusion[t][p]` counts records of true class `t` predicted as
    /// `p`; row sums equal the per-class record counts.
    pub confusion: Vec<Vec<u64>>,
    /// Per-class accuracy; `None` for classes absent from the set.
    pub per_class_accuracy: Vec<Option<f64>>,
    pub record_count: usize,
}

impl EvalReport {
    /// Build a report from prediction/truth pairs.
    pub fn from_predictions(predicted: &[u8], truth: &[u8]) -> ClassifierResult<Self> {
        if predicted.len() != truth.len() {
            return Err(ClassifierError::Shape(format!(
                "{} predictions against {} labels",
                predicted.len(),
                truth.len()
            )));
        }
        if predicted.is_empty() {
            return Err(ClassifierError::Config("evaluation set is empty".into()));
        }
        let mut confusion = vec![vec![0u64; NUM_CLASSES]; NUM_CLASSES];
        for (&p, &t) in predicted.iter().zip(truth) {
            if p as usize >= NUM_CLASSES || t as usize >= NUM_CLASSES {
                return Err(ClassifierError::Domain(format!(
                    "class out of range in prediction pair ({p}, {t})"
                )));
            }
            confusion[t as usize][p as usize] += 1;
        }
        let correct: u64 = (0..NUM_CLASSES).map(|c| confusion[c][c]).sum();
        let per_class_accuracy = (0..NUM_CLASSES)
            .map(|c| {
                let total: u64 = confusion[c].iter().sum();
                if total == 0 {
                    None
                } else {
                    Some(confusion[c][c] as f64 / total as f64)
                }
            })
            .collect();
        Ok(Self {
            accuracy: correct as f64 / predicted.len() as f64,
            confusion,
            per_class_accuracy,
            record_count: predicted.len(),
        })
    }
}

/// Evaluation batch size: large enough to keep the parallel forward
/// pass busy, small enough to bound activation memory.
const EVAL_BATCH: usize = 64;

/// Predict every record and tabulate the results.
pub fn evaluate<F: Scalar>(
    params: &SimpleNetParams<F>,
    test_set: &[Sample<F>],
) -> ClassifierResult<EvalReport> {
    if test_set.is_empty() {
        return Err(ClassifierError::Config("evaluation set is empty".into()));
    }
    let mut predicted = Vec::with_capacity(test_set.len());
    for chunk in test_set.chunks(EVAL_BATCH) {
        let batch: Vec<_> = chunk.iter().map(|s| s.image.view()).collect();
        predicted.extend(predict(params, &batch)?);
    }
    let truth: Vec<u8> = test_set.iter().map(|s| s.label).collect();
    EvalReport::from_predictions(&predicted, &truth)
}

/// Plain accuracy (used by the per-epoch training log).
pub(crate) fn accuracy_of<F: Scalar>(
    params: &SimpleNetParams<F>,
    set: &[Sample<F>],
) -> ClassifierResult<f64> {
    Ok(evaluate(params, set)?.accuracy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictor_gives_identity_confusion() {
        let truth: Vec<u8> = (0..30).map(|i| (i % 10) as u8).collect();
        let report = EvalReport::from_predictions(&truth, &truth).unwrap();
        assert_eq!(report.accuracy, 1.0);
        for t in 0..10 {
            for p in 0..10 {
                assert_eq!(report.confusion[t][p], if t == p { 3 } else { 0 });
            }
            assert_eq!(report.per_class_accuracy[t], Some(1.0));
        }
    }

    #[test]
    fn constant_predictor_scores_majority_frequency() {
        // 6 records of class 2, 4 of class 7; always predict 2
        let truth = [2u8, 2, 2, 2, 2, 2, 7, 7, 7, 7];
        let predicted = [2u8; 10];
        let report = EvalReport::from_predictions(&predicted, &truth).unwrap();
        assert_eq!(report.accuracy, 0.6);
        assert_eq!(report.confusion[7][2], 4);
        assert_eq!(report.per_class_accuracy[2], Some(1.0));
        assert_eq!(report.per_class_accuracy[7], Some(0.0));
        assert_eq!(report.per_class_accuracy[0], None);
    }

    #[test]
    fn confusion_rows_sum_to_class_counts() {
        let truth = [0u8, 0, 1, 3, 3, 3, 9];
        let predicted = [1u8, 0, 1, 3, 2, 3, 9];
        let report = EvalReport::from_predictions(&predicted, &truth).unwrap();
        let row_sums: Vec<u64> = report.confusion.iter().map(|r| r.iter().sum()).collect();
        assert_eq!(row_sums, vec![2, 1, 0, 3, 0, 0, 0, 0, 0, 1]);
        let trace: u64 = (0..10).map(|c| report.confusion[c][c]).sum();
        assert_eq!(report.accuracy, trace as f64 / truth.len() as f64);
    }

    #[test]
    fn mismatched_or_empty_inputs_rejected() {
        assert!(EvalReport::from_predictions(&[1, 2], &[1]).is_err());
        assert!(EvalReport::from_predictions(&[], &[]).is_err());
        assert!(EvalReport::from_predictions(&[10], &[0]).is_err());
    }

    #[test]
    fn evaluate_runs_a_real_model() {
        use crate::params::init_params;
        use ndarray::Array2;
        let params = init_params::<f32>(32, 3).unwrap();
        let set: Vec<Sample<f32>> = (0..70)
            .map(|i| Sample {
                image: Array2::from_elem((32, 32), i as f32 / 70.0),
                label: (i % 10) as u8,
            })
            .collect();
        let report = evaluate(&params, &set).unwrap();
        assert_eq!(report.record_count, 70);
        let total: u64 = report.confusion.iter().flatten().sum();
        assert_eq!(total, 70);
        assert!((0.0..=1.0).contains(&report.accuracy));
    }
}
