//! Minimal dense-tensor and feed-forward kernel: matrices, networks with
//! hand-derived backpropagation, first-order optimizers, and stable softmax.

pub mod kernels;
mod matrix;
mod net;
mod optim;

pub use matrix::Matrix;
pub use net::{Activation, DenseNet, ForwardTrace, Layer, LayerGrad, NetGradients};
pub use optim::{Optimizer, OptimizerKind};

/// Numerically stable softmax (max-subtraction form).
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let mut out = logits.to_vec();
    softmax_in_place(&mut out);
    out
}

pub(crate) fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// Row-wise softmax of a logits matrix.
pub fn softmax_rows(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    let cols = out.cols();
    for row in out.data_mut().chunks_exact_mut(cols) {
        softmax_in_place(row);
    }
    out
}

/// log(sum(exp(row))) with max-subtraction.
pub fn log_sum_exp(row: &[f64]) -> f64 {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = row.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}
