use crate::params::{Gradients, NetworkParams};
use crate::{NeuralError, Result};

/// Plain SGD with heavy-ball momentum:
///
/// ```text
/// v <- momentum * v + grad
/// p <- p - lr * v
/// ```
///
/// The velocity buffers live here, not in the parameters, and persist
/// across calls.
#[derive(Debug, Clone)]
pub struct Sgd {
    pub lr: f64,
    pub momentum: f64,
    velocity: Option<Vec<Vec<f64>>>,
}

impl Sgd {
    pub fn new(lr: f64, momentum: f64) -> Self {
        Sgd {
            lr,
            momentum,
            velocity: None,
        }
    }

    pub fn velocity(&self) -> Option<&[Vec<f64>]> {
        self.velocity.as_deref()
    }

    pub fn step(&mut self, params: &mut NetworkParams, grads: &Gradients) -> Result<()> {
        if grads.blocks.len() != params.blocks.len() {
            return Err(NeuralError::Shape {
                expected: params.blocks.len(),
                actual: grads.blocks.len(),
            });
        }
        for (g, p) in grads.blocks.iter().zip(&params.blocks) {
            if g.len() != p.data.len() {
                return Err(NeuralError::Shape {
                    expected: p.data.len(),
                    actual: g.len(),
                });
            }
        }
        let velocity = self
            .velocity
            .get_or_insert_with(|| grads.blocks.iter().map(|g| vec![0.0; g.len()]).collect());
        if velocity.len() != grads.blocks.len() {
            return Err(NeuralError::Shape {
                expected: velocity.len(),
                actual: grads.blocks.len(),
            });
        }
        for ((v, g), p) in velocity
            .iter_mut()
            .zip(&grads.blocks)
            .zip(params.blocks.iter_mut())
        {
            for ((vi, gi), pi) in v.iter_mut().zip(g).zip(p.data.iter_mut()) {
                *vi = self.momentum * *vi + gi;
                *pi -= self.lr * *vi;
            }
        }
        params.bump_generation();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Architecture, NetworkParams};

    fn scalar_net(value: f64) -> NetworkParams {
        // dense(1,1,1) has blocks enc.w, enc.b, out.w, out.b; use enc.w as "p".
        let mut p = NetworkParams::zeros(&Architecture::dense(1, 1, 1, &[], 1)).unwrap();
        p.set_flat(0, value);
        p
    }

    fn grad_of(p: &NetworkParams, dp: f64) -> Gradients {
        let mut g = Gradients::zeros_like(p);
        g.blocks[0][0] = dp;
        g
    }

    #[test]
    fn zero_learning_rate_leaves_params() {
        let mut p = scalar_net(1.5);
        let before = p.clone();
        let mut opt = Sgd::new(0.0, 0.9);
        let g = grad_of(&p, 3.0);
        opt.step(&mut p, &g).unwrap();
        assert_eq!(p.blocks(), before.blocks());
    }

    #[test]
    fn quadratic_contracts_geometrically() {
        // loss = p^2, grad = 2p, lr 0.1 => p_{k+1} = 0.8 p_k
        let mut p = scalar_net(1.0);
        let mut opt = Sgd::new(0.1, 0.0);
        let mut expected = 1.0;
        for _ in 0..20 {
            let g = grad_of(&p, 2.0 * p.get_flat(0));
            opt.step(&mut p, &g).unwrap();
            expected *= 0.8;
            assert!((p.get_flat(0) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_gradient_on_fresh_state_is_a_no_op() {
        let mut p = scalar_net(0.25);
        let mut opt = Sgd::new(0.1, 0.9);
        let g = grad_of(&p, 0.0);
        opt.step(&mut p, &g).unwrap();
        assert_eq!(p.get_flat(0), 0.25);
    }

    #[test]
    fn momentum_decays_under_zero_gradient() {
        let mut p = scalar_net(0.0);
        let mut opt = Sgd::new(0.01, 0.9);
        let g = grad_of(&p, 1.0);
        opt.step(&mut p, &g).unwrap();
        for k in 1..5 {
            let g = grad_of(&p, 0.0);
            opt.step(&mut p, &g).unwrap();
            let v = opt.velocity().unwrap()[0][0];
            assert!((v - 0.9f64.powi(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn one_step_decreases_quadratic_probe() {
        for start in [-3.0, -0.5, 0.1, 2.0] {
            let mut p = scalar_net(start);
            let mut opt = Sgd::new(0.05, 0.9);
            let loss = |v: f64| (v - 0.3) * (v - 0.3);
            let before = loss(p.get_flat(0));
            let g = grad_of(&p, 2.0 * (p.get_flat(0) - 0.3));
            opt.step(&mut p, &g).unwrap();
            assert!(loss(p.get_flat(0)) < before);
        }
    }

    #[test]
    fn mismatched_shapes_error() {
        let mut p = scalar_net(0.0);
        let other = NetworkParams::zeros(&Architecture::dense(2, 1, 1, &[], 1)).unwrap();
        let g = Gradients::zeros_like(&other);
        assert!(Sgd::new(0.1, 0.0).step(&mut p, &g).is_err());
    }
}
