//! Online realizable boosting: weak learners only see the examples the
//! booster forwards to them. Compares diluted Hedge with the prescient
//! oracle on a clean threshold sequence.
//!
//! cargo run --release --example online_realizable

use agnostic_boost::boost_online::Mode;
use agnostic_boost::harness::{
    run_experiment, seed_range, AdversaryKind, LearnerKind, OnlineExperiment,
};

fn main() -> agnostic_boost::Result<()> {
    for learner in [LearnerKind::Hedge, LearnerKind::Prescient] {
        let exp = OnlineExperiment {
            mode: Mode::Realizable,
            gamma: 0.3,
            horizon: 500,
            n_learners: 200,
            adversary: AdversaryKind::ThresholdRealizable,
            learner,
            grid: 32,
        };
        let out = run_experiment(&exp, &seed_range(0, 10))?;
        let rates = out.mistake_report(0.5)?;
        println!(
            "{learner:?}: mistake rate {:.3} +- {:.3}",
            rates.mean, rates.ci_half_width
        );
    }
    Ok(())
}
