use hrl_neural::{
    backward_into, forward, init_params, Architecture, Gradients, NetworkParams, Sgd,
};

use crate::Result;

/// One regression sample: move `Q(input)[action]` towards `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f64>,
    pub action: usize,
    pub target: f64,
}

/// Online network, its frozen target copy and the optimiser state.
#[derive(Debug, Clone)]
pub struct QNetwork {
    online: NetworkParams,
    target: NetworkParams,
    opt: Sgd,
    grad_clip: f64,
}

impl QNetwork {
    pub fn new(
        arch: &Architecture,
        seed: u64,
        lr: f64,
        momentum: f64,
        grad_clip: f64,
    ) -> Result<Self> {
        let online = init_params(arch, seed)?;
        Ok(Self::from_params(online, lr, momentum, grad_clip))
    }

    pub fn from_params(online: NetworkParams, lr: f64, momentum: f64, grad_clip: f64) -> Self {
        let target = online.copy_params();
        QNetwork {
            online,
            target,
            opt: Sgd::new(lr, momentum),
            grad_clip,
        }
    }

    pub fn online(&self) -> &NetworkParams {
        &self.online
    }

    pub fn target(&self) -> &NetworkParams {
        &self.target
    }

    pub fn q(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.online.predict(input)?)
    }

    pub fn q_target(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.target.predict(input)?)
    }

    pub fn sync_target(&mut self) {
        self.target = self.online.copy_params();
    }

    /// One SGD step on the mean squared error over `batch`, taken only on
    /// the chosen actions. Returns the loss before the step.
    pub fn train(&mut self, batch: &[Sample]) -> Result<f64> {
        if batch.is_empty() {
            return Ok(0.0);
        }
        let n = batch.len() as f64;
        let mut grads = Gradients::zeros_like(&self.online);
        let mut loss = 0.0;
        let mut out_grad = vec![0.0; self.online.architecture().output_dim];
        for s in batch {
            let (q, trace) = forward(&self.online, &s.input)?;
            let err = q[s.action] - s.target;
            loss += err * err / n;
            out_grad.fill(0.0);
            out_grad[s.action] = 2.0 * err / n;
            backward_into(&self.online, &trace, &out_grad, &mut grads)?;
        }
        if self.grad_clip > 0.0 {
            grads.clip_global_norm(self.grad_clip);
        }
        self.opt.step(&mut self.online, &grads)?;
        Ok(loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arch() -> Architecture {
        Architecture::dense(3, 1, 8, &[8], 2)
    }

    #[test]
    fn target_only_moves_at_sync() {
        let mut net = QNetwork::new(&arch(), 1, 0.05, 0.9, 0.0).unwrap();
        let x = [0.3, -0.2, 0.9];
        let before = net.q_target(&x).unwrap();
        for _ in 0..20 {
            net.train(&[Sample {
                input: x.to_vec(),
                action: 1,
                target: 3.0,
            }])
            .unwrap();
        }
        assert_eq!(net.q_target(&x).unwrap(), before);
        assert_ne!(net.q(&x).unwrap(), before);
        net.sync_target();
        assert_eq!(net.q_target(&x).unwrap(), net.q(&x).unwrap());
    }

    #[test]
    fn regression_reduces_loss_on_chosen_action_only() {
        let mut net = QNetwork::new(&arch(), 2, 0.05, 0.0, 0.0).unwrap();
        let x = vec![0.5, 0.1, -0.4];
        let first = net
            .train(&[Sample {
                input: x.clone(),
                action: 0,
                target: 1.0,
            }])
            .unwrap();
        let mut last = first;
        for _ in 0..200 {
            last = net
                .train(&[Sample {
                    input: x.clone(),
                    action: 0,
                    target: 1.0,
                }])
                .unwrap();
        }
        assert!(last < 1e-3 * first.max(1e-3), "loss {first} -> {last}");
        assert!((net.q(&x).unwrap()[0] - 1.0).abs() < 0.05);
    }
}
