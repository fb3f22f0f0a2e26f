//! The shipped weak learners: diluted Hedge (online), the prescient oracle,
//! and diluted stump ERM (statistical).
//!
//! cargo run --release --example weak_learners

use std::sync::Arc;

use agnostic_boost::domain::{best_in_hindsight, threshold_grid, ExpertPool};
use agnostic_boost::harness::{generate_sequence, threshold_sample, AdversaryKind, AdversarySpec};
use agnostic_boost::rng::RngStream;
use agnostic_boost::weaklearn::{
    hedge_declared_regret, stump_erm, HedgeLearner, OnlineWeakLearner, StatWeakLearner,
    StumpLearner,
};

fn main() -> agnostic_boost::Result<()> {
    let t = 2000;
    let pool = Arc::new(ExpertPool::thresholds(32)?);
    let seq = generate_sequence(&AdversarySpec::new(
        AdversaryKind::NoisyThreshold(0.2),
        t,
        3,
    ))?;
    let (best, best_gain) = best_in_hindsight(&pool, &seq)?;
    println!("best expert {:?} gains {best_gain}", best.rule);

    for gamma in [1.0, 0.5, 0.2] {
        let mut h = HedgeLearner::new(Arc::clone(&pool), gamma, t, RngStream::new(1, 1))?;
        let mut gain = 0.0;
        for e in seq.iter() {
            gain += (h.predict(e.x)? * e.y).as_f64();
            h.update(e.x, e.y)?;
        }
        println!(
            "Hedge gamma={gamma}: gain {gain:>6.0}, guarantee {:>7.1}",
            gamma * best_gain - hedge_declared_regret(gamma, pool.len(), t)
        );
    }

    let sample = threshold_sample(400, 0.15, 5)?;
    let (stump, cor) = stump_erm(sample.examples(), &threshold_grid(32))?;
    println!("stump ERM: {:?} with correlation {cor:.3}", stump.rule);
    let mut learner = StumpLearner::new(threshold_grid(32), 0.4, 50, RngStream::new(5, 1))?;
    println!(
        "diluted stump learner declares eps0 = {:.3}",
        learner.epsilon0()
    );
    let h = learner.train(&sample.examples()[..50])?;
    println!("one training call returned {:?}", h.rule);
    Ok(())
}
