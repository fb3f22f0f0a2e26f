//! Online convex optimization over axis-aligned boxes, with online gradient
//! descent as the shipped optimizer.

use crate::error::{invalid, Error, Result};

/// Relative slack before a gradient counts as oversized (rounding only).
const CLIP_TOLERANCE: f64 = 1e-9;

/// `[lower, upper]` componentwise, with positive diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return invalid("box bounds must be non-empty and of equal dimension");
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !l.is_finite() || !u.is_finite() || l > u)
        {
            return invalid("box bounds must be finite with lower <= upper");
        }
        let b = Self { lower, upper };
        if b.diameter() <= 0.0 {
            return invalid("box must have positive diameter");
        }
        Ok(b)
    }

    /// `[lo, hi]^dim`.
    pub fn cube(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Euclidean diameter `||upper - lower||_2`.
    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l) * (u - l))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    /// Minimum of `<sum, p>` over the box: each coordinate sits at the bound
    /// opposing the sign of `sum`.
    pub fn min_linear(&self, sum: &[f64]) -> f64 {
        sum.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(s, (l, u))| (s * l).min(s * u))
            .sum()
    }

    fn project(&self, p: &mut [f64]) {
        for (v, (l, u)) in p.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }
}

/// `l(p) = <coeff, p>`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearLoss {
    coeff: Vec<f64>,
}

impl LinearLoss {
    pub fn new(coeff: Vec<f64>) -> Result<Self> {
        if coeff.iter().any(|c| !c.is_finite()) {
            return invalid("loss coefficients must be finite");
        }
        Ok(Self { coeff })
    }

    pub fn scalar(c: f64) -> Result<Self> {
        Self::new(vec![c])
    }

    pub fn coeff(&self) -> &[f64] {
        &self.coeff
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        dot(&self.coeff, p)
    }

    pub fn norm(&self) -> f64 {
        self.coeff.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The player side of an online convex optimization game over a box.
pub trait OnlineConvexOptimizer {
    fn domain(&self) -> &BoxDomain;

    fn horizon(&self) -> usize;

    fn step_index(&self) -> usize;

    /// Current play. Fails once the horizon is exhausted.
    fn next(&self) -> Result<&[f64]>;

    /// Charges the current play with the linear loss `<coeff, p>` and moves
    /// to the next play.
    fn update_coeff(&mut self, coeff: &[f64]) -> Result<()>;

    fn update(&mut self, loss: &LinearLoss) -> Result<()> {
        self.update_coeff(loss.coeff())
    }

    /// `sum_t l_t(p_t)` over the losses seen so far.
    fn cumulative_loss(&self) -> f64;

    /// Realized regret against the best fixed point of the domain.
    fn regret(&self) -> f64;

    /// Worst-case regret the optimizer certifies for its full horizon.
    fn regret_bound(&self) -> f64;

    /// Number of losses whose gradient exceeded the declared bound.
    fn clip_events(&self) -> u64;
}

/// Builds optimizers; boosters construct a fresh one per round.
pub trait OcoFactory {
    type Optimizer: OnlineConvexOptimizer;

    fn build(
        &self,
        domain: BoxDomain,
        horizon: usize,
        grad_bound: f64,
        initial: Vec<f64>,
    ) -> Result<Self::Optimizer>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OgdFactory;

impl OcoFactory for OgdFactory {
    type Optimizer = Ogd;

    fn build(
        &self,
        domain: BoxDomain,
        horizon: usize,
        grad_bound: f64,
        initial: Vec<f64>,
    ) -> Result<Ogd> {
        Ogd::new(domain, horizon, grad_bound, initial)
    }
}

/// Online gradient descent with step size `D / (G sqrt(t))` and Euclidean
/// projection (componentwise clamping) onto the box.
#[derive(Debug, Clone)]
pub struct Ogd {
    domain: BoxDomain,
    horizon: usize,
    grad_bound: f64,
    diameter: f64,
    step_index: usize,
    iterate: Vec<f64>,
    cumulative_loss: f64,
    coeff_sum: Vec<f64>,
    clip_events: u64,
}

impl Ogd {
    pub fn new(
        domain: BoxDomain,
        horizon: usize,
        grad_bound: f64,
        initial: Vec<f64>,
    ) -> Result<Self> {
        if horizon == 0 {
            return invalid("horizon must be at least 1");
        }
        if !(grad_bound > 0.0 && grad_bound.is_finite()) {
            return invalid(format!("gradient bound must be positive, got {grad_bound}"));
        }
        if !domain.contains(&initial) {
            return invalid("initial play lies outside the domain");
        }
        let dim = domain.dim();
        Ok(Self {
            diameter: domain.diameter(),
            domain,
            horizon,
            grad_bound,
            step_index: 0,
            iterate: initial,
            cumulative_loss: 0.0,
            coeff_sum: vec![0.0; dim],
            clip_events: 0,
        })
    }

    pub fn grad_bound(&self) -> f64 {
        self.grad_bound
    }

    pub fn iterate(&self) -> &[f64] {
        &self.iterate
    }

    fn step_size(&self, t: usize) -> f64 {
        self.diameter / (self.grad_bound * (t as f64).sqrt())
    }
}

impl OnlineConvexOptimizer for Ogd {
    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn step_index(&self) -> usize {
        self.step_index
    }

    fn next(&self) -> Result<&[f64]> {
        if self.step_index >= self.horizon {
            return Err(Error::Protocol(format!(
                "horizon of {} steps exhausted",
                self.horizon
            )));
        }
        Ok(&self.iterate)
    }

    fn update_coeff(&mut self, coeff: &[f64]) -> Result<()> {
        if self.step_index >= self.horizon {
            return Err(Error::Protocol(format!(
                "horizon of {} steps exhausted",
                self.horizon
            )));
        }
        if coeff.iter().any(|c| !c.is_finite()) {
            return invalid("loss coefficients must be finite");
        }
        if coeff.len() != self.domain.dim() {
            return invalid(format!(
                "loss dimension {} does not match domain dimension {}",
                coeff.len(),
                self.domain.dim()
            ));
        }
        self.cumulative_loss += dot(coeff, &self.iterate);
        for (s, c) in self.coeff_sum.iter_mut().zip(coeff) {
            *s += c;
        }

        let norm = coeff.iter().map(|c| c * c).sum::<f64>().sqrt();
        let scale = if norm > self.grad_bound * (1.0 + CLIP_TOLERANCE) {
            self.clip_events += 1;
            self.grad_bound / norm
        } else {
            1.0
        };

        self.step_index += 1;
        let eta = self.step_size(self.step_index) * scale;
        for (p, c) in self.iterate.iter_mut().zip(coeff) {
            *p -= eta * c;
        }
        self.domain.project(&mut self.iterate);
        Ok(())
    }

    fn cumulative_loss(&self) -> f64 {
        self.cumulative_loss
    }

    fn regret(&self) -> f64 {
        self.cumulative_loss - self.domain.min_linear(&self.coeff_sum)
    }

    fn regret_bound(&self) -> f64 {
        ogd_regret_bound(self.grad_bound, self.diameter, self.horizon)
    }

    fn clip_events(&self) -> u64 {
        self.clip_events
    }
}

/// `(3/2) G D sqrt(N)`: the regret guarantee of [`Ogd`] after `N` steps.
pub fn ogd_regret_bound(grad_bound: f64, diameter: f64, steps: usize) -> f64 {
    1.5 * grad_bound * diameter * (steps as f64).sqrt()
}

/// Regret of `state` given the exact list of losses it was fed.
pub fn oco_realized_regret<O: OnlineConvexOptimizer + ?Sized>(
    state: &O,
    losses: &[LinearLoss],
) -> f64 {
    let dim = state.domain().dim();
    let mut sum = vec![0.0; dim];
    for l in losses {
        for (s, c) in sum.iter_mut().zip(l.coeff()) {
            *s += c;
        }
    }
    state.cumulative_loss() - state.domain().min_linear(&sum)
}
