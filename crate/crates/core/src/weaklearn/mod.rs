//! Weak-learner contracts for the online and statistical settings, and the
//! compliant learners shipped with the crate.

mod hedge;
mod prescient;
mod stump;

pub use hedge::{hedge_declared_regret, hedge_learning_rate, HedgeLearner};
pub use prescient::{prescient_oracle_predict, PrescientOracle};
pub use stump::{hoeffding_epsilon0, stump_erm, stump_erm_train, StumpLearner};

use crate::domain::{Hypothesis, Instance, Label, LabeledExample};
use crate::error::Result;

/// An online learner with advantage `gamma` over a reference class: for any
/// label sequence it is fed, `E[sum W(x_t) y_t] >= gamma * max_h sum h(x_t) y_t - R(T)`.
///
/// Each round the learner is asked to predict exactly once before it may
/// be updated (updates can be skipped).
pub trait OnlineWeakLearner {
    fn advantage(&self) -> f64;

    /// The additive regret `R(T)` the learner certifies at horizon `T`.
    fn declared_regret(&self, horizon: usize) -> f64;

    fn predict(&mut self, x: Instance) -> Result<Label>;

    fn update(&mut self, x: Instance, y: Label) -> Result<()>;

    /// Whether the guarantee is measured against the labels actually fed to
    /// the learner. Learners that peek at a base sequence return `false` and
    /// are only valid when fed labels equal base labels.
    fn tracks_fed_labels(&self) -> bool {
        true
    }
}

/// A batch learner trained on `sample_size()` examples per call.
pub trait StatWeakLearner {
    fn advantage(&self) -> f64;

    /// Declared additive slack of the weak-learning guarantee.
    fn epsilon0(&self) -> f64;

    fn sample_size(&self) -> usize;

    fn train(&mut self, sample: &[LabeledExample]) -> Result<Hypothesis>;
}
