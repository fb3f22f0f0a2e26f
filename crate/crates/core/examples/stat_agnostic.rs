//! Statistical agnostic boosting of a diluted stump learner on a sample
//! with 15% label noise.
//!
//! cargo run --release --example stat_agnostic

use agnostic_boost::boost_online::Mode;
use agnostic_boost::harness::{run_stat_experiment, seed_range, StatExperiment};

fn main() -> agnostic_boost::Result<()> {
    let exp = StatExperiment {
        mode: Mode::Agnostic,
        gamma: 0.4,
        rounds: 400,
        sample_size: 400,
        weak_sample_size: 50,
        noise: 0.15,
        grid: 32,
    };
    let out = run_stat_experiment(&exp, &seed_range(0, 10))?;
    for r in &out.runs {
        println!(
            "seed {}: ensemble {:.3}, best stump {:.3}",
            r.seed, r.correlation, r.best_stump
        );
    }
    println!("eps0 = {:.3}", out.runs[0].epsilon0);
    println!("{}", out.report.summary());
    Ok(())
}
