use std::sync::Arc;

use crate::domain::{ExpertPool, Instance, Label};
use crate::error::{invalid, Result};
use crate::rng::RngStream;

use super::OnlineWeakLearner;

/// Multiplicative weights over a finite expert pool, diluted by `gamma`:
/// with probability `gamma` it follows an expert drawn from the weights,
/// otherwise it flips a fair coin.
#[derive(Debug, Clone)]
pub struct HedgeLearner {
    pool: Arc<ExpertPool>,
    weights: Vec<f64>,
    eta: f64,
    gamma: f64,
    // exp(eta) and exp(-eta); every gain is +-1
    up: f64,
    down: f64,
    rng: RngStream,
}

/// `sqrt(2 ln K / T)`, the rate for the update `w_k *= exp(eta * h_k(x) y)`.
pub fn hedge_learning_rate(pool_size: usize, horizon: usize) -> f64 {
    if pool_size <= 1 {
        return 0.0;
    }
    (2.0 * (pool_size as f64).ln() / horizon.max(1) as f64).sqrt()
}

/// `gamma * sqrt(2 T ln K)`; zero for a single expert.
pub fn hedge_declared_regret(gamma: f64, pool_size: usize, horizon: usize) -> f64 {
    if pool_size <= 1 {
        return 0.0;
    }
    gamma * (2.0 * horizon as f64 * (pool_size as f64).ln()).sqrt()
}

impl HedgeLearner {
    /// Hedge tuned for `horizon` rounds.
    pub fn new(pool: Arc<ExpertPool>, gamma: f64, horizon: usize, rng: RngStream) -> Result<Self> {
        if horizon == 0 {
            return invalid("hedge horizon must be at least 1");
        }
        let eta = hedge_learning_rate(pool.len(), horizon);
        Self::with_learning_rate(pool, gamma, eta, rng)
    }

    pub fn with_learning_rate(
        pool: Arc<ExpertPool>,
        gamma: f64,
        eta: f64,
        rng: RngStream,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return invalid(format!("dilution must lie in [0, 1], got {gamma}"));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return invalid(format!("learning rate must be finite and >= 0, got {eta}"));
        }
        let k = pool.len();
        Ok(Self {
            weights: vec![1.0 / k as f64; k],
            pool,
            eta,
            gamma,
            up: eta.exp(),
            down: (-eta).exp(),
            rng,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn learning_rate(&self) -> f64 {
        self.eta
    }

    pub fn pool(&self) -> &ExpertPool {
        &self.pool
    }

    /// One dilution coin, then either one expert draw or one fair coin.
    pub fn hedge_predict(&mut self, x: Instance) -> Label {
        if self.rng.bernoulli(self.gamma) {
            let k = self.rng.weighted_index(&self.weights);
            self.pool.get(k).predict(x)
        } else {
            Label::from_bool(self.rng.bernoulli(0.5))
        }
    }

    /// `w_k <- w_k * exp(eta * h_k(x) * y)`, then renormalize.
    pub fn hedge_update(&mut self, x: Instance, y: Label) {
        let mut total = 0.0;
        for (w, h) in self.weights.iter_mut().zip(self.pool.members()) {
            *w *= if h.predict(x) == y {
                self.up
            } else {
                self.down
            };
            total += *w;
        }
        let inv = 1.0 / total;
        for w in &mut self.weights {
            *w *= inv;
        }
    }
}

impl OnlineWeakLearner for HedgeLearner {
    fn advantage(&self) -> f64 {
        self.gamma
    }

    fn declared_regret(&self, horizon: usize) -> f64 {
        hedge_declared_regret(self.gamma, self.pool.len(), horizon)
    }

    fn predict(&mut self, x: Instance) -> Result<Label> {
        Ok(self.hedge_predict(x))
    }

    fn update(&mut self, x: Instance, y: Label) -> Result<()> {
        self.hedge_update(x, y);
        Ok(())
    }
}
