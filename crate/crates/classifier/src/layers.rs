//! Layer primitives: convolution (via patch-matrix multiplication),
//! ReLU, max pooling, and fully connected stages, each with its exact
//! backward pass.

use ndarray::{Array1, Array2, Array3, Array4, ArrayView1, ArrayView2};

use crate::scalar::Scalar;

/// Patch matrix of a `(c_in, h, w)` feature map for 3x3 windows with
/// padding 1 and stride 1: row `r*w + c` holds the flattened window
/// centered on `(r, c)`, columns ordered `(channel, window row, window
/// column)`; out-of-frame pixels contribute zero.
pub(crate) fn im2col<F: Scalar>(input: &Array3<F>) -> Array2<F> {
    let (c_in, h, w) = input.dim();
    let mut patches = Array2::zeros((h * w, c_in * 9));
    for ci in 0..c_in {
        let plane = input.index_axis(ndarray::Axis(0), ci);
        for dr in 0..3usize {
            for dc in 0..3usize {
                let col = ci * 9 + dr * 3 + dc;
                // input row sampled by output row r is r + dr - 1
                let r_lo = 1usize.saturating_sub(dr);
                let r_hi = (h + 1 - dr).min(h);
                let c_lo = 1usize.saturating_sub(dc);
                let c_hi = (w + 1 - dc).min(w);
                for r in r_lo..r_hi {
                    let ir = r + dr - 1;
                    for c in c_lo..c_hi {
                        patches[[r * w + c, col]] = plane[[ir, c + dc - 1]];
                    }
                }
            }
        }
    }
    patches
}

/// Scatter-add of a patch-matrix gradient back onto the feature map it
/// came from (the exact adjoint of [`im2col`]).
pub(crate) fn col2im<F: Scalar>(d_patches: &Array2<F>, c_in: usize, h: usize, w: usize) -> Array3<F> {
    let mut d_input = Array3::zeros((c_in, h, w));
    for ci in 0..c_in {
        for dr in 0..3usize {
            for dc in 0..3usize {
                let col = ci * 9 + dr * 3 + dc;
                let r_lo = 1usize.saturating_sub(dr);
                let r_hi = (h + 1 - dr).min(h);
                let c_lo = 1usize.saturating_sub(dc);
                let c_hi = (w + 1 - dc).min(w);
                for r in r_lo..r_hi {
                    let ir = r + dr - 1;
                    for c in c_lo..c_hi {
                        d_input[[ci, ir, c + dc - 1]] =
                            d_input[[ci, ir, c + dc - 1]] + d_patches[[r * w + c, col]];
                    }
                }
            }
        }
    }
    d_input
}

/// Filters `(c_out, c_in, 3, 3)` reshaped to the `(c_in*9, c_out)`
/// matrix that multiplies a patch matrix.
fn weight_matrix<F: Scalar>(weights: &Array4<F>) -> Array2<F> {
    let (c_out, c_in, _, _) = weights.dim();
    let mut m = Array2::zeros((c_in * 9, c_out));
    for co in 0..c_out {
        for ci in 0..c_in {
            for k in 0..9 {
                m[[ci * 9 + k, co]] = weights[[co, ci, k / 3, k % 3]];
            }
        }
    }
    m
}

/// 3x3 convolution, stride 1, padding 1 (size-preserving).
/// Returns the output map and the patch matrix, which the backward
/// pass reuses.
pub(crate) fn conv_forward<F: Scalar>(
    input: &Array3<F>,
    weights: &Array4<F>,
    bias: &Array1<F>,
) -> (Array3<F>, Array2<F>) {
    let (_, h, w) = input.dim();
    let c_out = weights.dim().0;
    let patches = im2col(input);
    let out_mat = patches.dot(&weight_matrix(weights));
    let mut out = Array3::zeros((c_out, h, w));
    for co in 0..c_out {
        for r in 0..h {
            for c in 0..w {
                out[[co, r, c]] = out_mat[[r * w + c, co]] + bias[co];
            }
        }
    }
    (out, patches)
}

/// Gradients of a convolution: with respect to its input, filters, and
/// biases, given the gradient at its output.
pub(crate) fn conv_backward<F: Scalar>(
    patches: &Array2<F>,
    weights: &Array4<F>,
    d_out: &Array3<F>,
) -> (Array3<F>, Array4<F>, Array1<F>) {
    let (c_out, c_in, _, _) = weights.dim();
    let (_, h, w) = d_out.dim();
    let mut d_out_mat = Array2::zeros((h * w, c_out));
    let mut d_bias = Array1::zeros(c_out);
    for co in 0..c_out {
        let mut sum = F::zero();
        for r in 0..h {
            for c in 0..w {
                let g = d_out[[co, r, c]];
                d_out_mat[[r * w + c, co]] = g;
                sum = sum + g;
            }
        }
        d_bias[co] = sum;
    }
    // dW (as a matrix) = patches^T . dOut; dPatches = dOut . W^T
    let d_wmat = patches.t().dot(&d_out_mat);
    let mut d_weights = Array4::zeros((c_out, c_in, 3, 3));
    for co in 0..c_out {
        for ci in 0..c_in {
            for k in 0..9 {
                d_weights[[co, ci, k / 3, k % 3]] = d_wmat[[ci * 9 + k, co]];
            }
        }
    }
    let d_patches = d_out_mat.dot(&weight_matrix(weights).t());
    let d_input = col2im(&d_patches, c_in, h, w);
    (d_input, d_weights, d_bias)
}

/// Elementwise `max(x, 0)`.
pub(crate) fn relu_forward<F: Scalar>(z: &Array3<F>) -> Array3<F> {
    z.mapv(|v| if v > F::zero() { v } else { F::zero() })
}

/// ReLU gradient: passes where the pre-activation was positive.
pub(crate) fn relu_backward<F: Scalar>(z: &Array3<F>, d_a: &Array3<F>) -> Array3<F> {
    let mut d_z = d_a.clone();
    ndarray::Zip::from(&mut d_z).and(z).for_each(|g, &v| {
        if v <= F::zero() {
            *g = F::zero();
        }
    });
    d_z
}

/// 2x2 max pooling with stride 2 (odd trailing rows/columns are
/// dropped). Returns the pooled map and, per output cell, the flat
/// `row * w + col` index of the winning input pixel; ties go to the
/// first cell in row-major window order.
pub(crate) fn maxpool_forward<F: Scalar>(input: &Array3<F>) -> (Array3<F>, Array3<usize>) {
    let (channels, h, w) = input.dim();
    let (oh, ow) = (h / 2, w / 2);
    let mut out = Array3::zeros((channels, oh, ow));
    let mut argmax = Array3::zeros((channels, oh, ow));
    for ch in 0..channels {
        for r in 0..oh {
            for c in 0..ow {
                let mut best = input[[ch, 2 * r, 2 * c]];
                let mut best_at = (2 * r) * w + 2 * c;
                for (dr, dc) in [(0, 1), (1, 0), (1, 1)] {
                    let v = input[[ch, 2 * r + dr, 2 * c + dc]];
                    if v > best {
                        best = v;
                        best_at = (2 * r + dr) * w + 2 * c + dc;
                    }
                }
                out[[ch, r, c]] = best;
                argmax[[ch, r, c]] = best_at;
            }
        }
    }
    (out, argmax)
}

/// Max-pooling gradient: each output gradient is routed to the single
/// input pixel that won its window; everything else gets zero.
pub(crate) fn maxpool_backward<F: Scalar>(
    d_out: &Array3<F>,
    argmax: &Array3<usize>,
    input_dim: (usize, usize, usize),
) -> Array3<F> {
    let (channels, _, w) = input_dim;
    let (_, oh, ow) = d_out.dim();
    let mut d_input = Array3::zeros(input_dim);
    for ch in 0..channels {
        for r in 0..oh {
            for c in 0..ow {
                let flat = argmax[[ch, r, c]];
                d_input[[ch, flat / w, flat % w]] =
                    d_input[[ch, flat / w, flat % w]] + d_out[[ch, r, c]];
            }
        }
    }
    d_input
}

/// Fully connected stage `y = x W + b`.
pub(crate) fn fc_forward<F: Scalar>(
    x: ArrayView1<'_, F>,
    weights: &Array2<F>,
    bias: &Array1<F>,
) -> Array1<F> {
    x.dot(weights) + bias
}

/// Gradients of a fully connected stage with respect to its input,
/// weights, and bias.
pub(crate) fn fc_backward<F: Scalar>(
    x: ArrayView1<'_, F>,
    weights: &Array2<F>,
    d_y: ArrayView1<'_, F>,
) -> (Array1<F>, Array2<F>, Array1<F>) {
    let d_x = weights.dot(&d_y);
    let (dim_in, dim_out) = weights.dim();
    let mut d_w = Array2::zeros((dim_in, dim_out));
    for i in 0..dim_in {
        let xi = x[i];
        for j in 0..dim_out {
            d_w[[i, j]] = xi * d_y[j];
        }
    }
    (d_x, d_w, d_y.to_owned())
}

/// 1-channel ReLU helper for the hidden fully connected layer.
pub(crate) fn relu_vec_forward<F: Scalar>(z: &Array1<F>) -> Array1<F> {
    z.mapv(|v| if v > F::zero() { v } else { F::zero() })
}

pub(crate) fn relu_vec_backward<F: Scalar>(z: &Array1<F>, d_a: ArrayView1<'_, F>) -> Array1<F> {
    let mut d_z = d_a.to_owned();
    ndarray::Zip::from(&mut d_z).and(z).for_each(|g, &v| {
        if v <= F::zero() {
            *g = F::zero();
        }
    });
    d_z
}

/// Row-major flattening of a feature map (channel, then row, then
/// column), matching `fc1`'s weight layout.
pub(crate) fn flatten<F: Scalar>(x: &Array3<F>) -> Array1<F> {
    Array1::from_iter(x.iter().copied())
}

pub(crate) fn unflatten<F: Scalar>(v: ArrayView1<'_, F>, dim: (usize, usize, usize)) -> Array3<F> {
    Array3::from_shape_vec(dim, v.to_vec()).expect("length matches dimensions")
}

#[allow(dead_code)]
pub(crate) fn as_view2<F: Scalar>(x: &Array2<F>) -> ArrayView2<'_, F> {
    x.view()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_map(c: usize, h: usize, w: usize, seed: u64) -> Array3<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array3::from_shape_fn((c, h, w), |_| rng.random::<f64>() * 2.0 - 1.0)
    }

    /// Direct quadruple-loop convolution: the independent oracle for
    /// the patch-matrix implementation.
    fn conv_oracle(input: &Array3<f64>, weights: &Array4<f64>, bias: &Array1<f64>) -> Array3<f64> {
        let (c_in, h, w) = input.dim();
        let c_out = weights.dim().0;
        let mut out = Array3::zeros((c_out, h, w));
        for co in 0..c_out {
            for r in 0..h {
                for c in 0..w {
                    let mut acc = bias[co];
                    for ci in 0..c_in {
                        for kr in 0..3usize {
                            for kc in 0..3usize {
                                let (ir, ic) = (r + kr, c + kc);
                                if ir >= 1 && ir <= h && ic >= 1 && ic <= w {
                                    acc += input[[ci, ir - 1, ic - 1]]
                                        * weights[[co, ci, kr, kc]];
                                }
                            }
                        }
                    }
                    out[[co, r, c]] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn conv_matches_direct_loop_oracle() {
        let input = random_map(3, 7, 5, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let weights = Array4::from_shape_fn((4, 3, 3, 3), |_| rng.random::<f64>() - 0.5);
        let bias = Array1::from_shape_fn(4, |_| rng.random::<f64>() - 0.5);
        let (fast, _) = conv_forward(&input, &weights, &bias);
        let slow = conv_oracle(&input, &weights, &bias);
        for (a, b) in fast.iter().zip(slow.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn conv_backward_is_the_adjoint_of_forward() {
        // adjoint identity: <conv(x), y> == <x, conv_backward_input(y)>
        // for bias-free convolution, plus the matching identity for
        // weights; validates every gradient path at once
        let input = random_map(2, 6, 6, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let weights = Array4::from_shape_fn((3, 2, 3, 3), |_| rng.random::<f64>() - 0.5);
        let bias = Array1::zeros(3);
        let d_out = random_map(3, 6, 6, 5);

        let (out, patches) = conv_forward(&input, &weights, &bias);
        let (d_input, d_weights, d_bias) = conv_backward(&patches, &weights, &d_out);

        let lhs: f64 = out.iter().zip(d_out.iter()).map(|(a, b)| a * b).sum();
        let rhs_input: f64 = input.iter().zip(d_input.iter()).map(|(a, b)| a * b).sum();
        let rhs_weights: f64 = weights.iter().zip(d_weights.iter()).map(|(a, b)| a * b).sum();
        // for linear f(x, w) = out: <out, d> = <x, df/dx^T d> = <w, df/dw^T d>
        assert_relative_eq!(lhs, rhs_input, epsilon = 1e-9);
        assert_relative_eq!(lhs, rhs_weights, epsilon = 1e-9);
        // bias gradient is the plain sum over each output channel
        for co in 0..3 {
            let sum: f64 = d_out.index_axis(ndarray::Axis(0), co).iter().sum();
            assert_relative_eq!(d_bias[co], sum, epsilon = 1e-12);
        }
    }

    #[test]
    fn col2im_is_adjoint_of_im2col() {
        let x = random_map(2, 5, 4, 7);
        let y = {
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            Array2::from_shape_fn((20, 18), |_| rng.random::<f64>() - 0.5)
        };
        let lhs: f64 = im2col(&x).iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        let back = col2im(&y, 2, 5, 4);
        let rhs: f64 = x.iter().zip(back.iter()).map(|(a, b)| a * b).sum();
        assert_relative_eq!(lhs, rhs, epsilon = 1e-10);
    }

    #[test]
    fn maxpool_picks_window_maxima() {
        let input = array![[
            [1.0, 2.0, 5.0, 4.0],
            [3.0, 0.0, 1.0, 1.0],
            [9.0, 8.0, 2.0, 2.0],
            [7.0, 6.0, 2.0, 3.0],
        ]];
        let (out, argmax) = maxpool_forward(&input);
        assert_eq!(out, array![[[3.0, 5.0], [9.0, 3.0]]]);
        // flat indices within the 4-wide plane
        assert_eq!(argmax, ndarray::arr3(&[[[4, 2], [8, 15]]]));
    }

    #[test]
    fn maxpool_backward_routes_only_to_argmax_cells() {
        let input = array![[
            [1.0, 2.0, 5.0, 4.0],
            [3.0, 0.0, 1.0, 1.0],
            [9.0, 8.0, 2.0, 2.0],
            [7.0, 6.0, 2.0, 3.0],
        ]];
        let (_, argmax) = maxpool_forward(&input);
        let d_out = array![[[10.0, 20.0], [30.0, 40.0]]];
        let d_in = maxpool_backward(&d_out, &argmax, (1, 4, 4));
        let expected = array![[
            [0.0, 0.0, 20.0, 0.0],
            [10.0, 0.0, 0.0, 0.0],
            [30.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 40.0],
        ]];
        assert_eq!(d_in, expected);
    }

    #[test]
    fn maxpool_tie_goes_to_the_first_cell() {
        let input = array![[[2.0, 2.0], [2.0, 2.0]]];
        let (out, argmax) = maxpool_forward(&input);
        assert_eq!(out[[0, 0, 0]], 2.0);
        assert_eq!(argmax[[0, 0, 0]], 0, "row-major first cell wins ties");
    }

    #[test]
    fn maxpool_drops_odd_trailing_rows() {
        let input = random_map(1, 5, 5, 9);
        let (out, _) = maxpool_forward(&input);
        assert_eq!(out.dim(), (1, 2, 2));
    }

    #[test]
    fn relu_zeroes_negatives_and_their_gradients() {
        let z = array![[[-1.0, 0.0], [2.0, -3.0]]];
        let a = relu_forward(&z);
        assert_eq!(a, array![[[0.0, 0.0], [2.0, 0.0]]]);
        let d_a = array![[[5.0, 6.0], [7.0, 8.0]]];
        let d_z = relu_backward(&z, &d_a);
        assert_eq!(d_z, array![[[0.0, 0.0], [7.0, 0.0]]]);
    }

    #[test]
    fn fc_matches_hand_computation() {
        let x = array![1.0, 2.0];
        let w = array![[3.0, 4.0, 5.0], [6.0, 7.0, 8.0]];
        let b = array![0.1, 0.2, 0.3];
        let y = fc_forward(x.view(), &w, &b);
        assert_eq!(y, array![15.1, 18.2, 21.3]);
        let d_y = array![1.0, 0.0, -1.0];
        let (d_x, d_w, d_b) = fc_backward(x.view(), &w, d_y.view());
        assert_eq!(d_x, array![3.0 - 5.0, 6.0 - 8.0]);
        assert_eq!(d_w, array![[1.0, 0.0, -1.0], [2.0, 0.0, -2.0]]);
        assert_eq!(d_b, d_y);
    }

    #[test]
    fn flatten_orders_channel_row_column() {
        let x = array![[[1.0, 2.0], [3.0, 4.0]], [[5.0, 6.0], [7.0, 8.0]]];
        let v = flatten(&x);
        assert_eq!(v, array![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert_eq!(unflatten(v.view(), (2, 2, 2)), x);
    }
}
