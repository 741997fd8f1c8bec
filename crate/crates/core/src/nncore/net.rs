//! Feed-forward dense network with hand-derived backpropagation.

use rand::Rng;

use crate::error::{Error, Result};
use crate::nncore::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the post-activation value. For ReLU the
    /// output is positive exactly when the pre-activation is.
    #[inline]
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Identity => "identity",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::Config(format!("unknown activation `{other}`"))),
        }
    }
}

/// One dense layer: `y = act(x * weight + bias)`, weight is in-dim x out-dim.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weight: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn input_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.weight.cols()
    }
}

/// Multi-layer dense network producing raw logits (final layer is identity).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet {
    layers: Vec<Layer>,
}

/// Per-layer activations cached by [`DenseNet::forward`]; index 0 is the
/// input batch, index `k+1` the output of layer `k`.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    activations: Vec<Matrix>,
}

impl ForwardTrace {
    pub fn output(&self) -> &Matrix {
        self.activations.last().expect("trace is never empty")
    }
}

/// Gradients shaped exactly like the network parameters.
#[derive(Debug, Clone)]
pub struct LayerGrad {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct NetGradients {
    pub layers: Vec<LayerGrad>,
}

impl DenseNet {
    /// Builds a net with the given hidden widths, ReLU hidden activations and
    /// an identity output layer. Weights are drawn uniformly from
    /// +-sqrt(6/(fan_in+fan_out)), biases start at zero.
    pub fn glorot_init(
        input_dim: usize,
        hidden: &[usize],
        output_dim: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 || hidden.contains(&0) {
            return Err(Error::Config("layer dimensions must be positive".into()));
        }
        let mut dims = vec![input_dim];
        dims.extend_from_slice(hidden);
        dims.push(output_dim);
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for w in dims.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let mut weight = Matrix::zeros(fan_in, fan_out);
            for v in weight.data_mut() {
                *v = rng.random_range(-bound..=bound);
            }
            let activation = if layers.len() + 1 == dims.len() - 1 {
                Activation::Identity
            } else {
                Activation::Relu
            };
            layers.push(Layer {
                weight,
                bias: vec![0.0; fan_out],
                activation,
            });
        }
        DenseNet::from_layers(layers)
    }

    /// Validates dimension chaining and the identity output activation.
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::Config(format!(
                    "layer dimensions do not chain: {} -> {}",
                    pair[0].output_dim(),
                    pair[1].input_dim()
                )));
            }
        }
        for layer in &layers {
            if layer.bias.len() != layer.output_dim() {
                return Err(Error::Config("bias length does not match layer width".into()));
            }
        }
        if layers.last().unwrap().activation != Activation::Identity {
            return Err(Error::Config("final layer activation must be identity".into()));
        }
        Ok(DenseNet { layers })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().output_dim()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.rows() * l.weight.cols() + l.bias.len())
            .sum()
    }

    /// Forward pass over a batch (one input row per sample). Returns the
    /// logits and the trace [`DenseNet::backward`] needs.
    pub fn forward(&self, batch: &Matrix) -> Result<(Matrix, ForwardTrace)> {
        if batch.cols() != self.input_dim() {
            return Err(Error::Config(format!(
                "batch has {} columns, network expects {}",
                batch.cols(),
                self.input_dim()
            )));
        }
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(batch.clone());
        for layer in &self.layers {
            let mut z = activations.last().unwrap().matmul(&layer.weight)?;
            z.add_row_bias(&layer.bias)?;
            for v in z.data_mut() {
                *v = layer.activation.apply(*v);
            }
            activations.push(z);
        }
        let logits = activations.last().unwrap().clone();
        Ok((logits, ForwardTrace { activations }))
    }

    /// Forward pass without keeping the trace.
    pub fn infer(&self, batch: &Matrix) -> Result<Matrix> {
        if batch.cols() != self.input_dim() {
            return Err(Error::Config(format!(
                "batch has {} columns, network expects {}",
                batch.cols(),
                self.input_dim()
            )));
        }
        let mut current = batch.clone();
        for layer in &self.layers {
            let mut z = current.matmul(&layer.weight)?;
            z.add_row_bias(&layer.bias)?;
            for v in z.data_mut() {
                *v = layer.activation.apply(*v);
            }
            current = z;
        }
        Ok(current)
    }

    /// Backpropagates `upstream` (gradient w.r.t. the logits) through the
    /// trace produced by [`DenseNet::forward`] on the same batch. Returns the
    /// parameter gradients and the gradient w.r.t. the input batch.
    pub fn backward(&self, trace: &ForwardTrace, upstream: &Matrix) -> Result<(NetGradients, Matrix)> {
        if trace.activations.len() != self.layers.len() + 1 {
            return Err(Error::Config(
                "forward trace does not match network depth".into(),
            ));
        }
        let out = trace.output();
        if upstream.rows() != out.rows() || upstream.cols() != out.cols() {
            return Err(Error::Config(format!(
                "upstream gradient is {}x{}, logits are {}x{}",
                upstream.rows(),
                upstream.cols(),
                out.rows(),
                out.cols()
            )));
        }

        let mut grads = vec![
            LayerGrad {
                weight: Matrix::zeros(0, 0),
                bias: Vec::new(),
            };
            self.layers.len()
        ];
        let mut delta = upstream.clone();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let layer_out = &trace.activations[k + 1];
            if layer.activation != Activation::Identity {
                for (d, y) in delta.data_mut().iter_mut().zip(layer_out.data()) {
                    *d *= layer.activation.derivative_from_output(*y);
                }
            }
            let layer_in = &trace.activations[k];
            grads[k] = LayerGrad {
                weight: layer_in.matmul_tn(&delta)?,
                bias: delta.col_sums(),
            };
            delta = delta.matmul_nt(&layer.weight)?;
        }
        Ok((NetGradients { layers: grads }, delta))
    }
}
