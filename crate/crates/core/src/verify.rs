//! The invariant suite behind the `verify` subcommand.

use std::sync::Arc;

use crate::boost_online::Mode;
use crate::boost_stat::{stat_boost, StatBoosterConfig};
use crate::cli::trace::{read_online_trace, write_online_trace};
use crate::domain::{
    best_in_hindsight, gain, threshold_grid, vote_expectation, vote_project, ExpertPool, Label,
};
use crate::games::{
    best_response_index, certify_solution, game_value_grid, random_game, solve_improper_game,
    OracleSpec,
};
use crate::harness::{
    generate_sequence, run_experiment, seed_range, threshold_sample, AdversaryKind, AdversarySpec,
    LearnerKind, OnlineExperiment,
};
use crate::oco::{ogd_regret_bound, BoxDomain, OcoFactory, OgdFactory, OnlineConvexOptimizer};
use crate::rng::RngStream;
use crate::weaklearn::{
    hedge_declared_regret, stump_erm, HedgeLearner, OnlineWeakLearner, StumpLearner,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> std::result::Result<String, String>;

const CHECKS: &[(&str, Check)] = &[
    ("loss dominated by its corner value", corner_value),
    ("vote has a binary witness", binary_witness),
    ("vote is unbiased inside [-1, 1]", vote_unbiased),
    (
        "relabeling preserves the expected gain",
        relabel_expectation,
    ),
    ("best in hindsight matches a scan", hindsight_scan),
    ("OGD regret within its bound", ogd_regret),
    ("diluted Hedge meets its declared regret", hedge_compliance),
    ("stump ERM is optimal on its grid", stump_optimal),
    (
        "best response attains the column maximum",
        best_response_contract,
    ),
    (
        "game certificate holds, with and without noise",
        game_certificate,
    ),
    ("online booster stays within bound", online_booster),
    ("statistical booster plays stay feasible", stat_booster),
    ("sequences and traces are reproducible", reproducible),
];

/// Runs every check in order.
pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, f)| {
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome {
                name,
                passed,
                detail,
            }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn corner_value() -> std::result::Result<String, String> {
    for hy in [-1.0f64, 1.0] {
        for k in 0..=200 {
            let p = -1.0 + k as f64 * 0.01;
            ensure(p * (hy - 1.0) >= hy - 1.0 - 1e-15, || {
                format!("p={p} hy={hy}")
            })?;
        }
    }
    Ok("402 grid points".into())
}

fn binary_witness() -> std::result::Result<String, String> {
    for k in 0..=240 {
        let h = -3.0 + k as f64 * 0.025;
        for y in [-1.0f64, 1.0] {
            let rhs = vote_expectation(h).map_err(e2s)? * y - 1.0;
            let ok = [0.0f64, 1.0]
                .iter()
                .any(|&p| p * (h * y - 1.0) <= rhs + 1e-12);
            ensure(ok, || format!("h={h} y={y}"))?;
        }
    }
    Ok("482 grid points".into())
}

fn vote_unbiased() -> std::result::Result<String, String> {
    let draws = 100_000;
    let mut worst: f64 = 0.0;
    for k in 0..=20 {
        let z = -1.0 + k as f64 * 0.1;
        let mut rng = RngStream::new(k, 0);
        let mut sum = 0i64;
        for _ in 0..draws {
            sum += vote_project(z, &mut rng).map_err(e2s)?.value() as i64;
        }
        let mean = sum as f64 / draws as f64;
        let sigma = ((1.0 - z * z) / draws as f64).sqrt();
        let dev = (mean - z).abs();
        ensure(dev <= 4.0 * sigma + 1e-12, || format!("z={z}: mean {mean}"))?;
        if sigma > 0.0 {
            worst = worst.max(dev / sigma);
        }
    }
    Ok(format!("21 scores, worst deviation {worst:.2} sigma"))
}

/// A learner whose prediction depends on `(p, y)` but not on the relabel
/// coin: `E[W y'] = E[W p y]`.
fn relabel_expectation() -> std::result::Result<String, String> {
    let rounds = 100_000;
    let mut rng = RngStream::new(2024, 0);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..rounds {
        let p = 2.0 * rng.uniform() - 1.0;
        let y = Label::from_bool(rng.bernoulli(0.5)).as_f64();
        let w = Label::from_bool(rng.bernoulli((1.0 + 0.6 * p * y) / 2.0)).as_f64();
        let fed = if rng.bernoulli((1.0 + p) / 2.0) {
            y
        } else {
            -y
        };
        let d = w * fed - w * p * y;
        s += d;
        s2 += d * d;
    }
    let n = rounds as f64;
    let mean = s / n;
    let sd = ((s2 / n - mean * mean) * n / (n - 1.0)).sqrt();
    ensure(mean.abs() <= 4.0 * sd / n.sqrt(), || {
        format!("mean difference {mean}")
    })?;
    Ok(format!(
        "mean difference {mean:.5}, 4 sigma {:.5}",
        4.0 * sd / n.sqrt()
    ))
}

fn hindsight_scan() -> std::result::Result<String, String> {
    let pool = ExpertPool::thresholds(32).map_err(e2s)?;
    for seed in 0..20 {
        let seq = generate_sequence(&AdversarySpec::new(
            AdversaryKind::NoisyThreshold(0.2),
            300,
            seed,
        ))
        .map_err(e2s)?;
        let (_, best) = best_in_hindsight(&pool, &seq).map_err(e2s)?;
        let scan = pool
            .members()
            .iter()
            .map(|h| gain(h, &seq))
            .fold(f64::NEG_INFINITY, f64::max);
        ensure(best == scan, || format!("seed {seed}: {best} vs {scan}"))?;
    }
    Ok("20 sequences".into())
}

fn ogd_regret() -> std::result::Result<String, String> {
    let mut rng = RngStream::new(77, 0);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let dim = 1 + rng.index(4);
        let lo: Vec<f64> = (0..dim).map(|_| -2.0 * rng.uniform()).collect();
        let hi: Vec<f64> = lo.iter().map(|l| l + 0.1 + 2.0 * rng.uniform()).collect();
        let domain = BoxDomain::new(lo, hi).map_err(e2s)?;
        let steps = 1 + rng.index(400);
        let g = 0.5 + 3.0 * rng.uniform();
        let start = domain.center();
        let mut ogd = OgdFactory
            .build(domain.clone(), steps, g, start)
            .map_err(e2s)?;
        let mut sum = vec![0.0; dim];
        for t in 0..steps {
            let c: Vec<f64> = if case % 2 == 0 {
                (0..dim).map(|_| 2.0 * rng.uniform() - 1.0).collect()
            } else {
                // push away from the current iterate
                let p = ogd.next().map_err(e2s)?;
                let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                p.iter()
                    .map(|v| if *v >= 0.0 { sign } else { -sign })
                    .collect()
            };
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            let c: Vec<f64> = c.iter().map(|v| v * g / norm.max(g)).collect();
            for (s, v) in sum.iter_mut().zip(&c) {
                *s += v;
            }
            ogd.update_coeff(&c).map_err(e2s)?;
        }
        let regret = ogd.cumulative_loss() - domain.min_linear(&sum);
        let bound = ogd_regret_bound(g, domain.diameter(), steps);
        ensure(regret <= bound + 1e-9, || {
            format!("case {case}: {regret} > {bound}")
        })?;
        ensure(ogd.clip_events() == 0, || format!("case {case}: clipped"))?;
        worst = worst.max(regret / bound);
    }
    Ok(format!("100 sequences, worst regret/bound {worst:.3}"))
}

fn hedge_compliance() -> std::result::Result<String, String> {
    let t = 1000;
    let gamma = 0.5;
    let pool = Arc::new(ExpertPool::thresholds(32).map_err(e2s)?);
    let kinds = [
        AdversaryKind::Constant(Label::Minus),
        AdversaryKind::Alternating,
        AdversaryKind::DriftingThreshold(250),
        AdversaryKind::NoisyThreshold(0.2),
        AdversaryKind::UniformRandom,
    ];
    for kind in kinds {
        let seq = generate_sequence(&AdversarySpec::new(kind, t, 5)).map_err(e2s)?;
        let (_, best) = best_in_hindsight(&pool, &seq).map_err(e2s)?;
        let seeds = 10;
        let mut gains = Vec::new();
        for s in 0..seeds {
            let mut h =
                HedgeLearner::new(pool.clone(), gamma, t, RngStream::new(s, 1)).map_err(e2s)?;
            let mut g = 0.0;
            for e in seq.iter() {
                g += (h.predict(e.x).map_err(e2s)? * e.y).as_f64();
                h.update(e.x, e.y).map_err(e2s)?;
            }
            gains.push(g);
        }
        let mean = gains.iter().sum::<f64>() / seeds as f64;
        let var = gains.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (seeds as f64 - 1.0);
        let floor = gamma * best - hedge_declared_regret(gamma, pool.len(), t);
        ensure(mean + 4.0 * (var / seeds as f64).sqrt() >= floor, || {
            format!("{kind}: mean gain {mean} below {floor}")
        })?;
    }
    Ok("5 adversaries".into())
}

fn stump_optimal() -> std::result::Result<String, String> {
    let grid = threshold_grid(16);
    for seed in 0..20 {
        let seq = threshold_sample(60, 0.25, seed).map_err(e2s)?;
        let (_, cor) = stump_erm(seq.examples(), &grid).map_err(e2s)?;
        let mut best = f64::NEG_INFINITY;
        for &theta in &grid {
            for pol in [1.0, -1.0] {
                let c = seq
                    .iter()
                    .map(|e| if e.x.value() >= theta { pol } else { -pol } * e.y.as_f64())
                    .sum::<f64>()
                    / seq.len() as f64;
                best = best.max(c);
            }
        }
        ensure((cor - best).abs() < 1e-12, || {
            format!("seed {seed}: {cor} vs {best}")
        })?;
    }
    Ok("20 samples".into())
}

fn best_response_contract() -> std::result::Result<String, String> {
    let mut rng = RngStream::new(31, 0);
    for _ in 0..500 {
        let game = random_game(3, 4, &mut rng).map_err(e2s)?;
        let p: Vec<f64> = (0..3).map(|_| 2.0 * rng.uniform() - 1.0).collect();
        let cols = game.column_payoffs(&p);
        let j = best_response_index(&game, &p);
        let max = cols.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        ensure(cols[j] == max && cols[..j].iter().all(|v| *v < max), || {
            format!("{cols:?} -> {j}")
        })?;
    }
    Ok("500 random plays".into())
}

fn game_certificate() -> std::result::Result<String, String> {
    let rounds = 2000;
    let mut rng = RngStream::new(8, 0);
    let mut min_margin = f64::INFINITY;
    for g in 0..10u64 {
        let game = random_game(3, 3, &mut rng).map_err(e2s)?;
        let value = game_value_grid(&game, 60).map_err(e2s)?;
        let exact = solve_improper_game(&game, &mut OracleSpec::exact(), &OgdFactory, rounds)
            .map_err(e2s)?;
        let cert = certify_solution(&game, &exact.q_bar, rounds, 0.0, &value);
        ensure(cert.passed, || format!("game {g}: {cert:?}"))?;
        let mut noisy_oracle = OracleSpec::noisy(0.05, RngStream::new(g, 1)).map_err(e2s)?;
        let noisy =
            solve_improper_game(&game, &mut noisy_oracle, &OgdFactory, rounds).map_err(e2s)?;
        let ncert = certify_solution(&game, &noisy.q_bar, rounds, 0.05, &value);
        ensure(ncert.passed, || format!("game {g} (noisy): {ncert:?}"))?;
        ensure(
            (cert.threshold - ncert.threshold - 0.05).abs() < 1e-12,
            || "threshold shift".into(),
        )?;
        min_margin = min_margin.min(cert.margin).min(ncert.margin);
    }
    Ok(format!("10 games, smallest margin {min_margin:.4}"))
}

fn online_booster() -> std::result::Result<String, String> {
    let exp = OnlineExperiment {
        mode: Mode::Agnostic,
        gamma: 0.5,
        horizon: 300,
        n_learners: 64,
        adversary: AdversaryKind::NoisyThreshold(0.2),
        learner: LearnerKind::Hedge,
        grid: 32,
    };
    let out = run_experiment(&exp, &seed_range(0, 10)).map_err(e2s)?;
    ensure(out.report.passed, || out.report.summary())?;
    ensure(out.report.clip_events == 0, || "clip events".into())?;
    for r in &out.runs {
        ensure(r.trace.max_oco_regret_ratio <= 1.0 + 1e-9, || {
            format!("seed {}: OCO regret", r.seed)
        })?;
    }
    Ok(out.report.summary())
}

fn stat_booster() -> std::result::Result<String, String> {
    for (mode, noise, gamma) in [(Mode::Realizable, 0.0, 1.0), (Mode::Agnostic, 0.15, 0.4)] {
        for seed in 0..5 {
            let sample = threshold_sample(100, noise, seed).map_err(e2s)?;
            let mut learner =
                StumpLearner::new(threshold_grid(32), gamma, 30, RngStream::new(seed, 1))
                    .map_err(e2s)?;
            let config = StatBoosterConfig {
                rounds: 100,
                gamma,
                sample_size: 30,
                mode,
                master_seed: seed,
            };
            let run =
                stat_boost(&config, sample.examples(), &mut learner, &OgdFactory).map_err(e2s)?;
            ensure(run.plays_feasible && run.clip_events == 0, || {
                format!("{mode:?} seed {seed}")
            })?;
            ensure(run.oco_regret <= run.oco_regret_bound + 1e-9, || {
                format!("{mode:?} seed {seed}: regret")
            })?;
        }
    }
    Ok("10 runs".into())
}

fn reproducible() -> std::result::Result<String, String> {
    let exp = OnlineExperiment {
        mode: Mode::Realizable,
        gamma: 1.0,
        horizon: 50,
        n_learners: 16,
        adversary: AdversaryKind::ThresholdRealizable,
        learner: LearnerKind::Hedge,
        grid: 8,
    };
    let mut bytes = Vec::new();
    for _ in 0..2 {
        let out = run_experiment(&exp, &seed_range(40, 10)).map_err(e2s)?;
        let mut buf = Vec::new();
        write_online_trace(&out.runs, &mut buf).map_err(e2s)?;
        bytes.push(buf);
    }
    ensure(bytes[0] == bytes[1], || "traces differ".into())?;
    let rows = read_online_trace(bytes[0].as_slice()).map_err(e2s)?;
    ensure(rows.len() == 500, || format!("{} rows", rows.len()))?;
    Ok(format!("{} bytes identical", bytes[0].len()))
}
