//! Online agnostic boosting of diluted Hedge learners against a noisy
//! threshold sequence, with the regret bound printed alongside.
//!
//! cargo run --release --example online_agnostic

use agnostic_boost::boost_online::Mode;
use agnostic_boost::harness::{
    run_experiment, seed_range, AdversaryKind, LearnerKind, OnlineExperiment,
};

fn main() -> agnostic_boost::Result<()> {
    let exp = OnlineExperiment {
        mode: Mode::Agnostic,
        gamma: 0.5,
        horizon: 1000,
        n_learners: 400,
        adversary: AdversaryKind::NoisyThreshold(0.2),
        learner: LearnerKind::Hedge,
        grid: 32,
    };
    let out = run_experiment(&exp, &seed_range(0, 10))?;
    for run in &out.runs {
        let t = &run.trace;
        println!(
            "seed {:>2}: booster gain {:>6.0}, best expert {:>6.0}, regret {:>5.0}",
            run.seed,
            t.cum_gain[t.horizon() - 1],
            t.best_gain[t.horizon() - 1],
            t.regret()
        );
    }
    println!("{}", out.report.summary());
    Ok(())
}
