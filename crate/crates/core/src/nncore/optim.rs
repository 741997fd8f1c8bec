//! First-order optimizers: plain SGD and bias-corrected Adam.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nncore::net::{DenseNet, NetGradients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

impl OptimizerKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sgd" => Ok(OptimizerKind::Sgd),
            "adam" => Ok(OptimizerKind::Adam),
            other => Err(Error::Config(format!("unknown optimizer `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
struct LayerMoments {
    m_weight: Vec<f64>,
    v_weight: Vec<f64>,
    m_bias: Vec<f64>,
    v_bias: Vec<f64>,
}

/// Optimizer for one [`DenseNet`]; Adam moment buffers are shaped exactly
/// like the parameters they track.
#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    learning_rate: f64,
    beta1: f64,
    beta2: f64,
    epsilon_stab: f64,
    step_count: u64,
    moments: Vec<LayerMoments>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f64) -> Result<Self> {
        if !(learning_rate.is_finite() && learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {learning_rate}"
            )));
        }
        Ok(Optimizer {
            kind,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon_stab: 1e-8,
            step_count: 0,
            moments: Vec::new(),
        })
    }

    pub fn sgd(learning_rate: f64) -> Result<Self> {
        Optimizer::new(OptimizerKind::Sgd, learning_rate)
    }

    pub fn adam(learning_rate: f64) -> Result<Self> {
        Optimizer::new(OptimizerKind::Adam, learning_rate)
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    /// Applies one update. SGD: `p -= lr * g`. Adam: standard bias-corrected
    /// moment update with the crate defaults (0.9, 0.999, 1e-8).
    pub fn step(&mut self, net: &mut DenseNet, grads: &NetGradients) -> Result<()> {
        if grads.layers.len() != net.layers().len() {
            return Err(Error::Config("gradient layer count mismatch".into()));
        }
        for (layer, grad) in net.layers().iter().zip(&grads.layers) {
            if layer.weight.rows() != grad.weight.rows()
                || layer.weight.cols() != grad.weight.cols()
                || layer.bias.len() != grad.bias.len()
            {
                return Err(Error::Config("gradient shape mismatch".into()));
            }
        }
        match self.kind {
            OptimizerKind::Sgd => {
                for (layer, grad) in net.layers_mut().iter_mut().zip(&grads.layers) {
                    for (p, g) in layer.weight.data_mut().iter_mut().zip(grad.weight.data()) {
                        *p -= self.learning_rate * g;
                    }
                    for (p, g) in layer.bias.iter_mut().zip(&grad.bias) {
                        *p -= self.learning_rate * g;
                    }
                }
            }
            OptimizerKind::Adam => {
                if self.moments.is_empty() {
                    self.moments = net
                        .layers()
                        .iter()
                        .map(|l| LayerMoments {
                            m_weight: vec![0.0; l.weight.data().len()],
                            v_weight: vec![0.0; l.weight.data().len()],
                            m_bias: vec![0.0; l.bias.len()],
                            v_bias: vec![0.0; l.bias.len()],
                        })
                        .collect();
                }
                self.step_count += 1;
                let bc1 = 1.0 - self.beta1.powi(self.step_count as i32);
                let bc2 = 1.0 - self.beta2.powi(self.step_count as i32);
                for ((layer, grad), mom) in net
                    .layers_mut()
                    .iter_mut()
                    .zip(&grads.layers)
                    .zip(&mut self.moments)
                {
                    adam_update(
                        layer.weight.data_mut(),
                        grad.weight.data(),
                        &mut mom.m_weight,
                        &mut mom.v_weight,
                        self.learning_rate,
                        self.beta1,
                        self.beta2,
                        self.epsilon_stab,
                        bc1,
                        bc2,
                    );
                    adam_update(
                        &mut layer.bias,
                        &grad.bias,
                        &mut mom.m_bias,
                        &mut mom.v_bias,
                        self.learning_rate,
                        self.beta1,
                        self.beta2,
                        self.epsilon_stab,
                        bc1,
                        bc2,
                    );
                }
            }
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn adam_update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    bc1: f64,
    bc2: f64,
) {
    for i in 0..params.len() {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nncore::net::{Activation, Layer, LayerGrad};
    use crate::nncore::Matrix;

    fn scalar_net(p: f64) -> DenseNet {
        DenseNet::from_layers(vec![Layer {
            weight: Matrix::from_vec(1, 1, vec![p]).unwrap(),
            bias: vec![0.0],
            activation: Activation::Identity,
        }])
        .unwrap()
    }

    fn scalar_grads(g: f64) -> NetGradients {
        NetGradients {
            layers: vec![LayerGrad {
                weight: Matrix::from_vec(1, 1, vec![g]).unwrap(),
                bias: vec![0.0],
            }],
        }
    }

    #[test]
    fn sgd_one_step_arithmetic() {
        let mut net = scalar_net(1.0);
        let mut opt = Optimizer::sgd(0.1).unwrap();
        opt.step(&mut net, &scalar_grads(2.0)).unwrap();
        assert_eq!(net.layers()[0].weight.get(0, 0), 0.8);
    }

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        for kind in [OptimizerKind::Sgd, OptimizerKind::Adam] {
            let mut net = scalar_net(0.75);
            let mut opt = Optimizer::new(kind, 0.05).unwrap();
            opt.step(&mut net, &scalar_grads(0.0)).unwrap();
            opt.step(&mut net, &scalar_grads(0.0)).unwrap();
            assert_eq!(net.layers()[0].weight.get(0, 0), 0.75);
        }
    }

    // Oracle: a standalone scalar Adam recurrence, written independently of
    // the implementation above.
    #[test]
    fn adam_three_steps_match_scalar_reference() {
        let grads = [0.3, -1.2, 0.05];
        let lr = 0.01;
        let (b1, b2, eps) = (0.9, 0.999, 1e-8);

        let mut p_ref = 0.5;
        let (mut m, mut v) = (0.0, 0.0);
        for (t, g) in grads.iter().enumerate() {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let m_hat = m / (1.0 - b1_pow(b1, t + 1));
            let v_hat = v / (1.0 - b1_pow(b2, t + 1));
            p_ref -= lr * m_hat / (v_hat.sqrt() + eps);
        }

        let mut net = scalar_net(0.5);
        let mut opt = Optimizer::adam(lr).unwrap();
        for g in grads {
            opt.step(&mut net, &scalar_grads(g)).unwrap();
        }
        let got = net.layers()[0].weight.get(0, 0);
        assert!((got - p_ref).abs() < 1e-15, "{got} vs {p_ref}");
    }

    fn b1_pow(b: f64, t: usize) -> f64 {
        let mut acc = 1.0;
        for _ in 0..t {
            acc *= b;
        }
        acc
    }

    #[test]
    fn rejects_bad_learning_rate_and_shapes() {
        assert!(Optimizer::sgd(0.0).is_err());
        assert!(Optimizer::adam(-1.0).is_err());
        assert!(Optimizer::adam(f64::NAN).is_err());

        let mut net = scalar_net(1.0);
        let mut opt = Optimizer::sgd(0.1).unwrap();
        let bad = NetGradients {
            layers: vec![LayerGrad {
                weight: Matrix::zeros(2, 2),
                bias: vec![0.0; 2],
            }],
        };
        assert!(opt.step(&mut net, &bad).is_err());
    }
}
