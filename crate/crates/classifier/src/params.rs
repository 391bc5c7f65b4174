//! Network parameters and their initialization.

use ndarray::{Array1, Array2, Array4, ArrayViewD, ArrayViewMutD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ClassifierError, ClassifierResult};
use crate::scalar::{fl, Scalar};

/// Input/output channel counts of the four convolution stages.
pub const CONV_CHANNELS: [(usize, usize); 4] = [(1, 16), (16, 16), (16, 32), (32, 32)];
/// Width of the hidden fully connected layer.
pub const HIDDEN_DIM: usize = 1024;
/// Number of output classes (digits 0-9).
pub const NUM_CLASSES: usize = 10;
/// Smallest input side that survives four halvings.
pub const MIN_INPUT_SIZE: usize = 16;

/// One convolution stage: 3x3 filters `(c_out, c_in, 3, 3)` plus one
/// bias per output channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer<F> {
    pub weights: Array4<F>,
    pub bias: Array1<F>,
}

/// One fully connected stage: weights `(dim_in, dim_out)` plus one
/// bias per output.
#[derive(Debug, Clone, PartialEq)]
pub struct FcLayer<F> {
    pub weights: Array2<F>,
    pub bias: Array1<F>,
}

/// All parameters of the classifier.
///
/// The architecture is fixed: four stages of conv(3x3, stride 1,
/// padding 1) -> ReLU -> maxpool(2x2, stride 2) with 16, 16, 32, 32
/// output channels, a 1024-wide hidden fully connected layer with
/// ReLU, and a 10-logit output layer. Only the square input side
/// varies; it determines the flattened dimension feeding `fc1`
/// (for a 200-pixel input the spatial side shrinks
/// 200 -> 100 -> 50 -> 25 -> 12, so `fc1` sees 32 * 12 * 12 = 4608
/// features).
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleNetParams<F> {
    pub conv1: ConvLayer<F>,
    pub conv2: ConvLayer<F>,
    pub conv3: ConvLayer<F>,
    pub conv4: ConvLayer<F>,
    pub fc1: FcLayer<F>,
    pub fc2: FcLayer<F>,
    input_size: usize,
}

/// Spatial side after each of the four pooling stages (convolutions
/// preserve size; each pool halves it, flooring odd sides).
pub fn pooled_sizes(input_size: usize) -> [usize; 4] {
    let mut side = input_size;
    let mut out = [0; 4];
    for slot in &mut out {
        side /= 2;
        *slot = side;
    }
    out
}

/// Features entering the first fully connected layer.
pub fn flatten_dim(input_size: usize) -> usize {
    let final_side = pooled_sizes(input_size)[3];
    CONV_CHANNELS[3].1 * final_side * final_side
}

impl<F: Scalar> SimpleNetParams<F> {
    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn flatten_dim(&self) -> usize {
        flatten_dim(self.input_size)
    }

    pub fn conv_layers(&self) -> [&ConvLayer<F>; 4] {
        [&self.conv1, &self.conv2, &self.conv3, &self.conv4]
    }

    /// All twelve parameter arrays in a fixed order (conv weights and
    /// bias, stages 1-4, then fc1 and fc2 weights and bias).
    pub(crate) fn views(&self) -> [ArrayViewD<'_, F>; 12] {
        [
            self.conv1.weights.view().into_dyn(),
            self.conv1.bias.view().into_dyn(),
            self.conv2.weights.view().into_dyn(),
            self.conv2.bias.view().into_dyn(),
            self.conv3.weights.view().into_dyn(),
            self.conv3.bias.view().into_dyn(),
            self.conv4.weights.view().into_dyn(),
            self.conv4.bias.view().into_dyn(),
            self.fc1.weights.view().into_dyn(),
            self.fc1.bias.view().into_dyn(),
            self.fc2.weights.view().into_dyn(),
            self.fc2.bias.view().into_dyn(),
        ]
    }

    pub(crate) fn views_mut(&mut self) -> [ArrayViewMutD<'_, F>; 12] {
        [
            self.conv1.weights.view_mut().into_dyn(),
            self.conv1.bias.view_mut().into_dyn(),
            self.conv2.weights.view_mut().into_dyn(),
            self.conv2.bias.view_mut().into_dyn(),
            self.conv3.weights.view_mut().into_dyn(),
            self.conv3.bias.view_mut().into_dyn(),
            self.conv4.weights.view_mut().into_dyn(),
            self.conv4.bias.view_mut().into_dyn(),
            self.fc1.weights.view_mut().into_dyn(),
            self.fc1.bias.view_mut().into_dyn(),
            self.fc2.weights.view_mut().into_dyn(),
            self.fc2.bias.view_mut().into_dyn(),
        ]
    }

    /// Names matching [`Self::views`] order, used by the checkpoint
    /// layer table.
    pub(crate) fn array_names() -> [&'static str; 12] {
        [
            "conv1.weight",
            "conv1.bias",
            "conv2.weight",
            "conv2.bias",
            "conv3.weight",
            "conv3.bias",
            "conv4.weight",
            "conv4.bias",
            "fc1.weight",
            "fc1.bias",
            "fc2.weight",
            "fc2.bias",
        ]
    }

    /// Congruent all-zero structure (gradient and moment buffers).
    pub(crate) fn zeros_like(&self) -> Self {
        let conv = |l: &ConvLayer<F>| ConvLayer {
            weights: Array4::zeros(l.weights.dim()),
            bias: Array1::zeros(l.bias.dim()),
        };
        let fc = |l: &FcLayer<F>| FcLayer {
            weights: Array2::zeros(l.weights.dim()),
            bias: Array1::zeros(l.bias.dim()),
        };
        Self {
            conv1: conv(&self.conv1),
            conv2: conv(&self.conv2),
            conv3: conv(&self.conv3),
            conv4: conv(&self.conv4),
            fc1: fc(&self.fc1),
            fc2: fc(&self.fc2),
            input_size: self.input_size,
        }
    }

    /// `self += other * factor`, elementwise across all twelve arrays.
    pub(crate) fn add_assign_scaled(&mut self, other: &Self, factor: F) {
        for (mut dst, src) in self.views_mut().into_iter().zip(other.views()) {
            ndarray::Zip::from(&mut dst).and(&src).for_each(|d, &s| {
                *d = *d + s * factor;
            });
        }
    }

    /// Precision conversion (used by checkpoints, which store binary32,
    /// and by tests that compare the two precisions).
    pub fn convert<G: Scalar>(&self) -> SimpleNetParams<G> {
        let to = |x: &F| -> G { fl(x.to_f64().expect("finite parameter")) };
        let conv = |l: &ConvLayer<F>| ConvLayer {
            weights: l.weights.mapv(|x| to(&x)),
            bias: l.bias.mapv(|x| to(&x)),
        };
        let fc = |l: &FcLayer<F>| FcLayer {
            weights: l.weights.mapv(|x| to(&x)),
            bias: l.bias.mapv(|x| to(&x)),
        };
        SimpleNetParams {
            conv1: conv(&self.conv1),
            conv2: conv(&self.conv2),
            conv3: conv(&self.conv3),
            conv4: conv(&self.conv4),
            fc1: fc(&self.fc1),
            fc2: fc(&self.fc2),
            input_size: self.input_size,
        }
    }

    pub fn all_finite(&self) -> bool {
        self.views().iter().all(|v| v.iter().all(|x| x.is_finite()))
    }

    /// Rebuild a parameter set from the twelve arrays in [`Self::views`]
    /// order, verifying every shape against the architecture for
    /// `input_size`.
    pub(crate) fn from_arrays(
        input_size: usize,
        mut arrays: Vec<ndarray::ArrayD<F>>,
    ) -> ClassifierResult<Self> {
        let expected = expected_shapes(input_size)?;
        if arrays.len() != expected.len() {
            return Err(ClassifierError::Shape(format!(
                "expected {} parameter arrays, got {}",
                expected.len(),
                arrays.len()
            )));
        }
        for (array, (name, shape)) in arrays.iter().zip(expected.iter()) {
            if array.shape() != &shape[..] {
                return Err(ClassifierError::Shape(format!(
                    "{name}: expected shape {:?}, got {:?}",
                    shape,
                    array.shape()
                )));
            }
        }
        let mut take = |expected_dims: usize| -> ndarray::ArrayD<F> {
            let a = arrays.remove(0);
            debug_assert_eq!(a.ndim(), expected_dims);
            a
        };
        let conv = |w: ndarray::ArrayD<F>, b: ndarray::ArrayD<F>| ConvLayer {
            weights: w.into_dimensionality().expect("shape checked"),
            bias: b.into_dimensionality().expect("shape checked"),
        };
        let fc = |w: ndarray::ArrayD<F>, b: ndarray::ArrayD<F>| FcLayer {
            weights: w.into_dimensionality().expect("shape checked"),
            bias: b.into_dimensionality().expect("shape checked"),
        };
        Ok(Self {
            conv1: conv(take(4), take(1)),
            conv2: conv(take(4), take(1)),
            conv3: conv(take(4), take(1)),
            conv4: conv(take(4), take(1)),
            fc1: fc(take(2), take(1)),
            fc2: fc(take(2), take(1)),
            input_size,
        })
    }
}

/// `(name, shape)` of each parameter array for a given input side, in
/// [`SimpleNetParams::views`] order.
pub(crate) fn expected_shapes(input_size: usize) -> ClassifierResult<Vec<(&'static str, Vec<usize>)>> {
    check_input_size(input_size)?;
    let names = SimpleNetParams::<f32>::array_names();
    let mut shapes: Vec<Vec<usize>> = Vec::new();
    for (c_in, c_out) in CONV_CHANNELS {
        shapes.push(vec![c_out, c_in, 3, 3]);
        shapes.push(vec![c_out]);
    }
    shapes.push(vec![flatten_dim(input_size), HIDDEN_DIM]);
    shapes.push(vec![HIDDEN_DIM]);
    shapes.push(vec![HIDDEN_DIM, NUM_CLASSES]);
    shapes.push(vec![NUM_CLASSES]);
    Ok(names.into_iter().zip(shapes).collect())
}

fn check_input_size(input_size: usize) -> ClassifierResult<()> {
    if input_size < MIN_INPUT_SIZE {
        return Err(ClassifierError::Config(format!(
            "input side {input_size} is too small for four 2x2 pooling stages \
             (minimum {MIN_INPUT_SIZE})"
        )));
    }
    Ok(())
}

/// Seeded network initialization: zero biases, weights drawn from a
/// normal distribution scaled by `sqrt(2 / fan_in)` (the ReLU-aware
/// variance-preserving choice); the same seed always produces the same
/// parameters.
pub fn init_params<F: Scalar>(input_size: usize, seed: u64) -> ClassifierResult<SimpleNetParams<F>> {
    check_input_size(input_size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut he = |fan_in: usize, n: usize| -> Vec<F> {
        let scale: F = fl((2.0 / fan_in as f64).sqrt());
        (0..n).map(|_| F::std_normal(&mut rng) * scale).collect()
    };
    let mut conv = |c_in: usize, c_out: usize| -> ConvLayer<F> {
        let fan_in = c_in * 9;
        ConvLayer {
            weights: Array4::from_shape_vec((c_out, c_in, 3, 3), he(fan_in, c_out * fan_in))
                .expect("length matches shape"),
            bias: Array1::zeros(c_out),
        }
    };
    let conv1 = conv(CONV_CHANNELS[0].0, CONV_CHANNELS[0].1);
    let conv2 = conv(CONV_CHANNELS[1].0, CONV_CHANNELS[1].1);
    let conv3 = conv(CONV_CHANNELS[2].0, CONV_CHANNELS[2].1);
    let conv4 = conv(CONV_CHANNELS[3].0, CONV_CHANNELS[3].1);
    let mut fc = |dim_in: usize, dim_out: usize| -> FcLayer<F> {
        FcLayer {
            weights: Array2::from_shape_vec((dim_in, dim_out), he(dim_in, dim_in * dim_out))
                .expect("length matches shape"),
            bias: Array1::zeros(dim_out),
        }
    };
    let flat = flatten_dim(input_size);
    Ok(SimpleNetParams {
        conv1,
        conv2,
        conv3,
        conv4,
        fc1: fc(flat, HIDDEN_DIM),
        fc2: fc(HIDDEN_DIM, NUM_CLASSES),
        input_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_scale_input_flattens_to_4608() {
        // independent size chain: conv preserves, pool halves (floored)
        let mut side = 200usize;
        let mut chain = vec![side];
        for _ in 0..4 {
            side /= 2;
            chain.push(side);
        }
        assert_eq!(chain, vec![200, 100, 50, 25, 12]);
        assert_eq!(flatten_dim(200), 32 * 12 * 12);
        let p = init_params::<f32>(200, 1).unwrap();
        assert_eq!(p.fc1.weights.dim(), (4608, HIDDEN_DIM));
    }

    #[test]
    fn desk_scale_input_flattens_to_512() {
        assert_eq!(pooled_sizes(64), [32, 16, 8, 4]);
        assert_eq!(flatten_dim(64), 32 * 4 * 4);
    }

    #[test]
    fn same_seed_gives_identical_params() {
        let a = init_params::<f32>(32, 7).unwrap();
        let b = init_params::<f32>(32, 7).unwrap();
        assert_eq!(a, b);
        let c = init_params::<f32>(32, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn tiny_input_rejected() {
        assert!(init_params::<f32>(8, 0).is_err());
        assert!(init_params::<f32>(15, 0).is_err());
        assert!(init_params::<f32>(16, 0).is_ok());
    }

    #[test]
    fn biases_start_at_zero_and_weights_do_not() {
        let p = init_params::<f64>(32, 3).unwrap();
        assert!(p.conv1.bias.iter().all(|&b| b == 0.0));
        assert!(p.fc1.bias.iter().all(|&b| b == 0.0));
        assert!(p.conv1.weights.iter().any(|&w| w != 0.0));
        assert!(p.all_finite());
    }

    #[test]
    fn he_scaling_shrinks_with_fan_in() {
        // sample std of each layer ~ sqrt(2/fan_in); fc1 (fan-in 512 at
        // a 64-pixel input) must be much tighter than conv1 (fan-in 9)
        let p = init_params::<f64>(64, 5).unwrap();
        let std = |v: Vec<f64>| {
            let n = v.len() as f64;
            let m = v.iter().sum::<f64>() / n;
            (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n).sqrt()
        };
        let conv1_std = std(p.conv1.weights.iter().copied().collect());
        let fc1_std = std(p.fc1.weights.iter().copied().collect());
        let expect_conv1 = (2.0f64 / 9.0).sqrt();
        let expect_fc1 = (2.0f64 / 512.0).sqrt();
        assert!((conv1_std - expect_conv1).abs() / expect_conv1 < 0.25);
        assert!((fc1_std - expect_fc1).abs() / expect_fc1 < 0.05);
    }

    #[test]
    fn from_arrays_round_trips_views() {
        let p = init_params::<f32>(32, 11).unwrap();
        let arrays: Vec<ndarray::ArrayD<f32>> =
            p.views().iter().map(|v| v.to_owned()).collect();
        let q = SimpleNetParams::from_arrays(32, arrays).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn from_arrays_rejects_wrong_shapes() {
        let p = init_params::<f32>(32, 11).unwrap();
        let mut arrays: Vec<ndarray::ArrayD<f32>> =
            p.views().iter().map(|v| v.to_owned()).collect();
        arrays[0] = ndarray::ArrayD::zeros(ndarray::IxDyn(&[16, 1, 5, 5]));
        assert!(SimpleNetParams::from_arrays(32, arrays).is_err());
    }
}
