//! Online gradient descent on a box against adversarial linear losses.
//!
//! cargo run --release --example oco_regret

use agnostic_boost::oco::{BoxDomain, LinearLoss, OcoFactory, OgdFactory, OnlineConvexOptimizer};

fn main() -> agnostic_boost::Result<()> {
    let domain = BoxDomain::cube(-1.0, 1.0, 2)?;
    for steps in [10, 100, 1000, 10_000] {
        let mut ogd = OgdFactory.build(domain.clone(), steps, 1.0, domain.center())?;
        for t in 0..steps {
            // push against the current iterate in the first coordinate
            let p = ogd.next()?[0];
            let c = if p > 0.0 || (p == 0.0 && t % 2 == 0) {
                0.8
            } else {
                -0.8
            };
            ogd.update(&LinearLoss::new(vec![c, 0.6])?)?;
        }
        println!(
            "N = {steps:>5}: regret {:>8.3}, bound {:>8.3}",
            ogd.regret(),
            ogd.regret_bound()
        );
    }
    Ok(())
}
