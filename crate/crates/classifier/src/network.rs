//! The assembled network: forward pass, loss, and exact gradients.

use ndarray::{Array1, Array2, Array3, ArrayView2, Axis};
use rayon::prelude::*;

use crate::error::{ClassifierError, ClassifierResult};
use crate::layers::{
    conv_backward, conv_forward, fc_backward, fc_forward, flatten, maxpool_backward,
    maxpool_forward, relu_backward, relu_forward, relu_vec_backward, relu_vec_forward, unflatten,
};
use crate::params::{SimpleNetParams, NUM_CLASSES};
use crate::scalar::{fl, Scalar};

/// Everything the backward pass needs about one conv stage.
struct ConvStageCache<F> {
    patches: Array2<F>,
    pre_relu: Array3<F>,
    activated_dim: (usize, usize, usize),
    argmax: Array3<usize>,
}

/// Cached activations of one image's forward pass.
pub struct SampleCache<F> {
    stages: Vec<ConvStageCache<F>>,
    flat: Array1<F>,
    fc1_pre_relu: Array1<F>,
    fc1_activated: Array1<F>,
}

/// Cached activations for a whole batch, consumed by the backward
/// pass.
pub struct ForwardCache<F> {
    samples: Vec<SampleCache<F>>,
}

fn forward_one<F: Scalar>(
    params: &SimpleNetParams<F>,
    image: &ArrayView2<'_, F>,
) -> (Array1<F>, SampleCache<F>) {
    let (h, w) = image.dim();
    let mut x = Array3::zeros((1, h, w));
    x.index_axis_mut(Axis(0), 0).assign(image);

    let mut stages = Vec::with_capacity(4);
    for layer in params.conv_layers() {
        let (pre_relu, patches) = conv_forward(&x, &layer.weights, &layer.bias);
        let activated = relu_forward(&pre_relu);
        let (pooled, argmax) = maxpool_forward(&activated);
        stages.push(ConvStageCache {
            patches,
            pre_relu,
            activated_dim: activated.dim(),
            argmax,
        });
        x = pooled;
    }

    let flat = flatten(&x);
    let fc1_pre_relu = fc_forward(flat.view(), &params.fc1.weights, &params.fc1.bias);
    let fc1_activated = relu_vec_forward(&fc1_pre_relu);
    let logits = fc_forward(fc1_activated.view(), &params.fc2.weights, &params.fc2.bias);
    (
        logits,
        SampleCache {
            stages,
            flat,
            fc1_pre_relu,
            fc1_activated,
        },
    )
}

fn check_batch<F: Scalar>(
    params: &SimpleNetParams<F>,
    batch: &[ArrayView2<'_, F>],
) -> ClassifierResult<()> {
    if batch.is_empty() {
        return Err(ClassifierError::Shape("empty batch".into()));
    }
    let side = params.input_size();
    for (i, image) in batch.iter().enumerate() {
        if image.dim() != (side, side) {
            return Err(ClassifierError::Shape(format!(
                "batch image {i} has shape {:?}, but the network expects {side}x{side}",
                image.dim()
            )));
        }
    }
    Ok(())
}

/// Run a batch through the network. Returns the `(batch, 10)` logit
/// matrix and the cached activations needed for gradients.
pub fn forward<F: Scalar>(
    params: &SimpleNetParams<F>,
    batch: &[ArrayView2<'_, F>],
) -> ClassifierResult<(Array2<F>, ForwardCache<F>)> {
    check_batch(params, batch)?;
    let per_sample: Vec<(Array1<F>, SampleCache<F>)> = batch
        .par_iter()
        .map(|image| forward_one(params, image))
        .collect();
    let mut logits = Array2::zeros((batch.len(), NUM_CLASSES));
    let mut samples = Vec::with_capacity(batch.len());
    for (i, (row, cache)) in per_sample.into_iter().enumerate() {
        logits.row_mut(i).assign(&row);
        samples.push(cache);
    }
    Ok((logits, ForwardCache { samples }))
}

/// Class predictions: argmax of each logit row (ties go to the lower
/// class index).
pub fn predict<F: Scalar>(
    params: &SimpleNetParams<F>,
    batch: &[ArrayView2<'_, F>],
) -> ClassifierResult<Vec<u8>> {
    let (logits, _) = forward(params, batch)?;
    Ok(logits
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0usize;
            for j in 1..NUM_CLASSES {
                if row[j] > row[best] {
                    best = j;
                }
            }
            best as u8
        })
        .collect())
}

/// Numerically stable softmax probabilities and log-sum-exp of one
/// logit row.
fn softmax<F: Scalar>(logits: &Array1<F>) -> (Array1<F>, F) {
    let max = logits.iter().copied().fold(logits[0], F::max);
    let shifted = logits.mapv(|z| (z - max).exp());
    let sum = shifted.sum();
    (shifted.mapv(|e| e / sum), sum.ln() + max)
}

fn backward_one<F: Scalar>(
    params: &SimpleNetParams<F>,
    cache: &SampleCache<F>,
    d_logits: Array1<F>,
    grads: &mut SimpleNetParams<F>,
) {
    let (d_fc1_act, d_w2, d_b2) =
        fc_backward(cache.fc1_activated.view(), &params.fc2.weights, d_logits.view());
    grads.fc2.weights += &d_w2;
    grads.fc2.bias += &d_b2;

    let d_fc1_pre = relu_vec_backward(&cache.fc1_pre_relu, d_fc1_act.view());
    let (d_flat, d_w1, d_b1) = fc_backward(cache.flat.view(), &params.fc1.weights, d_fc1_pre.view());
    grads.fc1.weights += &d_w1;
    grads.fc1.bias += &d_b1;

    let final_stage = &cache.stages[3];
    let (channels, ah, aw) = final_stage.activated_dim;
    let mut d_pooled = unflatten(d_flat.view(), (channels, ah / 2, aw / 2));

    let conv_layers = params.conv_layers();
    let grad_layers = [
        &mut grads.conv1,
        &mut grads.conv2,
        &mut grads.conv3,
        &mut grads.conv4,
    ];
    for stage_index in (0..4).rev() {
        let stage = &cache.stages[stage_index];
        let d_activated = maxpool_backward(&d_pooled, &stage.argmax, stage.activated_dim);
        let d_pre_relu = relu_backward(&stage.pre_relu, &d_activated);
        let (d_input, d_weights, d_bias) =
            conv_backward(&stage.patches, &conv_layers[stage_index].weights, &d_pre_relu);
        grad_layers[stage_index].weights += &d_weights;
        grad_layers[stage_index].bias += &d_bias;
        d_pooled = d_input;
    }
}

/// Mean softmax cross-entropy over a batch, plus exact gradients for
/// every parameter (a structure congruent to the parameters).
pub fn loss_and_gradients<F: Scalar>(
    params: &SimpleNetParams<F>,
    batch: &[ArrayView2<'_, F>],
    labels: &[u8],
) -> ClassifierResult<(F, SimpleNetParams<F>)> {
    if batch.len() != labels.len() {
        return Err(ClassifierError::Shape(format!(
            "batch holds {} images but {} labels",
            batch.len(),
            labels.len()
        )));
    }
    for &label in labels {
        if label as usize >= NUM_CLASSES {
            return Err(ClassifierError::Domain(format!(
                "label {label} outside the digit range 0-9"
            )));
        }
    }
    let (logits, cache) = forward(params, batch)?;
    let batch_size = batch.len();
    let inv_n: F = fl(1.0 / batch_size as f64);

    // Backward runs in parallel over fixed-size index chunks; each
    // chunk accumulates serially and the chunks merge in index order,
    // so the result is bit-identical regardless of thread count.
    const BACKWARD_CHUNK: usize = 8;
    let indices: Vec<usize> = (0..batch_size).collect();
    let partials: Vec<(F, SimpleNetParams<F>)> = indices
        .par_chunks(BACKWARD_CHUNK)
        .map(|chunk| {
            let mut chunk_loss = F::zero();
            let mut chunk_grads = params.zeros_like();
            for &i in chunk {
                let row = logits.row(i).to_owned();
                let (probs, log_sum_exp) = softmax(&row);
                let label = labels[i] as usize;
                chunk_loss = chunk_loss + (log_sum_exp - row[label]) * inv_n;
                let mut d_logits = probs;
                d_logits[label] = d_logits[label] - F::one();
                d_logits.mapv_inplace(|g| g * inv_n);
                backward_one(params, &cache.samples[i], d_logits, &mut chunk_grads);
            }
            (chunk_loss, chunk_grads)
        })
        .collect();

    let mut loss = F::zero();
    let mut grads = params.zeros_like();
    for (chunk_loss, chunk_grads) in partials {
        loss = loss + chunk_loss;
        grads.add_assign_scaled(&chunk_grads, F::one());
    }
    Ok((loss, grads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::init_params;
    use approx::assert_relative_eq;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_images<F: Scalar>(n: usize, side: usize, seed: u64) -> Vec<Array2<F>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Array2::from_shape_fn((side, side), |_| fl::<F>(rng.random::<f64>())))
            .collect()
    }

    fn views<F: Scalar>(images: &[Array2<F>]) -> Vec<ArrayView2<'_, F>> {
        images.iter().map(|x| x.view()).collect()
    }

    #[test]
    fn logits_have_batch_by_ten_shape() {
        let params = init_params::<f32>(32, 0).unwrap();
        let images = random_images::<f32>(3, 32, 1);
        let (logits, _) = forward(&params, &views(&images)).unwrap();
        assert_eq!(logits.dim(), (3, 10));
    }

    #[test]
    fn zero_image_with_zero_biases_gives_exactly_zero_logits() {
        let params = init_params::<f64>(32, 5).unwrap();
        let zero = vec![Array2::<f64>::zeros((32, 32))];
        let (logits, _) = forward(&params, &views(&zero)).unwrap();
        assert!(
            logits.iter().all(|&z| z == 0.0),
            "zero input through zero biases must stay exactly zero"
        );
    }

    #[test]
    fn uniform_logits_lose_ln_ten() {
        // a zero image with zero biases yields all-zero (uniform)
        // logits, so the cross-entropy must be exactly ln(10)
        let params = init_params::<f64>(32, 5).unwrap();
        let zero = vec![Array2::<f64>::zeros((32, 32))];
        let (loss, _) = loss_and_gradients(&params, &views(&zero), &[4]).unwrap();
        assert!((loss - 10.0f64.ln()).abs() < 1e-9, "loss {loss}");
    }

    #[test]
    fn doubling_fc2_weights_doubles_logits() {
        let params = init_params::<f64>(32, 9).unwrap();
        let images = random_images::<f64>(2, 32, 10);
        let (logits, _) = forward(&params, &views(&images)).unwrap();
        let mut doubled = params.clone();
        doubled.fc2.weights.mapv_inplace(|w| w * 2.0);
        let (logits2, _) = forward(&doubled, &views(&images)).unwrap();
        // fc2 bias is zero, and scaling every addend by 2 is exact in
        // binary floating point
        assert_eq!(logits.mapv(|z| z * 2.0), logits2);
    }

    #[test]
    fn logit_shift_leaves_loss_and_predictions_unchanged() {
        let params = init_params::<f64>(32, 11).unwrap();
        let images = random_images::<f64>(3, 32, 12);
        let labels = [1u8, 7, 3];
        let (loss, _) = loss_and_gradients(&params, &views(&images), &labels).unwrap();
        let preds = predict(&params, &views(&images)).unwrap();
        // shifting fc2 bias by a constant shifts every logit by it
        let mut shifted = params.clone();
        shifted.fc2.bias.mapv_inplace(|b| b + 13.75);
        let (loss2, _) = loss_and_gradients(&shifted, &views(&images), &labels).unwrap();
        let preds2 = predict(&shifted, &views(&images)).unwrap();
        assert!((loss - loss2).abs() <= 1e-12, "{loss} vs {loss2}");
        assert_eq!(preds, preds2);
    }

    #[test]
    fn argmax_invariant_under_positive_fc2_rescale() {
        let params = init_params::<f64>(32, 13).unwrap();
        let images = random_images::<f64>(4, 32, 14);
        let preds = predict(&params, &views(&images)).unwrap();
        let mut rescaled = params.clone();
        rescaled.fc2.weights.mapv_inplace(|w| w * 3.7);
        rescaled.fc2.bias.mapv_inplace(|b| b * 3.7);
        assert_eq!(predict(&rescaled, &views(&images)).unwrap(), preds);
    }

    #[test]
    fn duplicating_a_batch_leaves_mean_loss_unchanged() {
        let params = init_params::<f64>(32, 15).unwrap();
        let images = random_images::<f64>(2, 32, 16);
        let once = views(&images);
        let twice: Vec<_> = once.iter().chain(once.iter()).copied().collect();
        let (a, _) = loss_and_gradients(&params, &once, &[2, 9]).unwrap();
        let (b, _) = loss_and_gradients(&params, &twice, &[2, 9, 2, 9]).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn out_of_range_label_rejected() {
        let params = init_params::<f32>(32, 0).unwrap();
        let images = random_images::<f32>(1, 32, 1);
        assert!(matches!(
            loss_and_gradients(&params, &views(&images), &[10]),
            Err(ClassifierError::Domain(_))
        ));
    }

    #[test]
    fn wrong_image_size_rejected() {
        let params = init_params::<f32>(32, 0).unwrap();
        let images = random_images::<f32>(1, 16, 1);
        assert!(matches!(
            forward(&params, &views(&images)),
            Err(ClassifierError::Shape(_))
        ));
    }

    #[test]
    fn forward_is_deterministic_across_calls() {
        let params = init_params::<f32>(32, 21).unwrap();
        let images = random_images::<f32>(5, 32, 22);
        let (a, _) = forward(&params, &views(&images)).unwrap();
        let (b, _) = forward(&params, &views(&images)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gradients_are_congruent_and_nonzero() {
        let params = init_params::<f64>(32, 23).unwrap();
        let images = random_images::<f64>(2, 32, 24);
        let (_, grads) = loss_and_gradients(&params, &views(&images), &[0, 5]).unwrap();
        for (p, g) in params.views().iter().zip(grads.views().iter()) {
            assert_eq!(p.shape(), g.shape());
        }
        assert!(grads.views().iter().any(|v| v.iter().any(|&g| g != 0.0)));
    }
}
