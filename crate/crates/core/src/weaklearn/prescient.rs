use std::sync::Arc;

use crate::domain::{Instance, Label, LabeledSequence};
use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

use super::OnlineWeakLearner;

/// Predicts the true base label `y_t` with probability `(1 + gamma) / 2`.
pub fn prescient_oracle_predict(
    seq: &LabeledSequence,
    t: usize,
    gamma: f64,
    rng: &mut RngStream,
) -> Result<Label> {
    let Some(e) = seq.examples().get(t) else {
        return Err(Error::Protocol(format!(
            "round {t} is past the end of a {}-round sequence",
            seq.len()
        )));
    };
    Ok(if rng.bernoulli((1.0 + gamma) / 2.0) {
        e.y
    } else {
        e.y.flip()
    })
}

/// A weak online learner with zero regret that reads the oblivious base
/// sequence. Its guarantee refers to the base labels, so it is only valid
/// where the booster feeds those labels unchanged (the realizable booster).
#[derive(Debug, Clone)]
pub struct PrescientOracle {
    seq: Arc<LabeledSequence>,
    gamma: f64,
    round: usize,
    rng: RngStream,
}

impl PrescientOracle {
    pub fn new(seq: Arc<LabeledSequence>, gamma: f64, rng: RngStream) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return invalid(format!("advantage must lie in [0, 1], got {gamma}"));
        }
        Ok(Self {
            seq,
            gamma,
            round: 0,
            rng,
        })
    }
}

impl OnlineWeakLearner for PrescientOracle {
    fn advantage(&self) -> f64 {
        self.gamma
    }

    fn declared_regret(&self, _horizon: usize) -> f64 {
        0.0
    }

    fn predict(&mut self, _x: Instance) -> Result<Label> {
        let label = prescient_oracle_predict(&self.seq, self.round, self.gamma, &mut self.rng)?;
        self.round += 1;
        Ok(label)
    }

    fn update(&mut self, _x: Instance, _y: Label) -> Result<()> {
        Ok(())
    }

    fn tracks_fed_labels(&self) -> bool {
        false
    }
}
