//! Acceptance criteria A1-A8. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::time::Instant;

use agnostic_boost::boost_online::Mode;
use agnostic_boost::cli::trace::{write_online_trace, write_stat_trace};
use agnostic_boost::domain::{vote_expectation, vote_project, LabeledSequence};
use agnostic_boost::games::{
    certify_solution, game_value_grid, random_game, solve_improper_game, MatrixGame, OracleSpec,
};
use agnostic_boost::harness::{
    generate_sequence, run_experiment, run_stat_experiment, seed_range, threshold_sample,
    AdversaryKind, AdversarySpec, LearnerKind, OnlineExperiment, OnlineOutcome, StatExperiment,
    StatOutcome, StatRun,
};
use agnostic_boost::oco::{BoxDomain, OcoFactory, OgdFactory, OnlineConvexOptimizer};
use agnostic_boost::rng::{data_stream_id, RngStream};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// State carried between criteria: clip counts for A7, traces for A8.
#[derive(Default)]
struct Shared {
    clip_events: u64,
    booster_runs: usize,
    online: Vec<(OnlineExperiment, Vec<u64>, Vec<u8>)>,
    stat: Vec<(StatExperiment, Vec<u64>, Vec<u8>)>,
}

fn online_csv(o: &OnlineOutcome) -> Vec<u8> {
    let mut buf = Vec::new();
    write_online_trace(&o.runs, &mut buf).unwrap();
    buf
}

fn stat_csv(o: &StatOutcome) -> Vec<u8> {
    let mut buf = Vec::new();
    write_stat_trace(&o.runs, &mut buf).unwrap();
    buf
}

fn mean_ci(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    (mean, 3.0 * std / n.sqrt())
}

/// Best gain of the 64 signed thresholds j/32, by direct count.
fn best_threshold_gain(seq: &LabeledSequence) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for j in 0..32 {
        let theta = j as f64 / 32.0;
        let agree: i64 = seq
            .iter()
            .map(|e| {
                let h = if e.x.value() >= theta { 1 } else { -1 };
                h * e.y.value() as i64
            })
            .sum();
        best = best.max(agree as f64).max(-agree as f64);
    }
    best
}

fn a1(shared: &mut Shared) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (gamma, t, n) in [(1.0f64, 4000usize, 3600usize), (0.5, 2000, 2500)] {
        let exp = OnlineExperiment {
            mode: Mode::Agnostic,
            gamma,
            horizon: t,
            n_learners: n,
            adversary: AdversaryKind::NoisyThreshold(0.2),
            learner: LearnerKind::Hedge,
            grid: 32,
        };
        let seeds = seed_range(1000, 20);
        let start = Instant::now();
        let out = run_experiment(&exp, &seeds).expect("A1 run");
        let secs = start.elapsed().as_secs_f64();

        let weak = gamma * (2.0 * t as f64 * 64f64.ln()).sqrt();
        let bound = weak / gamma + 6.0 * t as f64 / (gamma * (n as f64).sqrt());
        let mut consistent = (out.report.threshold - bound).abs() < 1e-9;
        for run in &out.runs {
            let seq = generate_sequence(
                &AdversarySpec::new(exp.adversary, t, run.seed).on_stream(data_stream_id(n)),
            )
            .unwrap();
            consistent &= run.trace.best_gain[t - 1] == best_threshold_gain(&seq);
        }
        let values: Vec<f64> = out.runs.iter().map(|r| r.trace.regret()).collect();
        let (mean, ci) = mean_ci(&values);
        ok &= consistent && mean <= bound + ci && secs <= 180.0;
        lines.push(format!(
            "gamma={gamma} T={t} N={n}: mean regret {mean:.1} (ci {ci:.1}) vs bound {bound:.1}, {secs:.0}s"
        ));
        shared.clip_events += out.report.clip_events;
        shared.booster_runs += out.runs.len();
        shared.online.push((exp, seeds, online_csv(&out)));
    }
    outcome(ok, lines.join("; "))
}

fn a2() -> Outcome {
    let mut ok = true;
    // p (hy - 1) >= hy - 1 on a 201-point grid
    for hy in [-1.0f64, 1.0] {
        for k in 0..=200 {
            let p = -1.0 + 2.0 * k as f64 / 200.0;
            ok &= p * (hy - 1.0) >= hy - 1.0 - 1e-15;
        }
    }
    // some p* in {0, 1} satisfies p* (h y - 1) <= E[vote(h)] y - 1
    for k in 0..=240 {
        let h = -3.0 + 6.0 * k as f64 / 240.0;
        let clamped = h.clamp(-1.0, 1.0);
        ok &= (vote_expectation(h).unwrap() - clamped).abs() < 1e-15;
        for y in [-1.0f64, 1.0] {
            ok &= [0.0f64, 1.0]
                .iter()
                .any(|&p| p * (h * y - 1.0) <= clamped * y - 1.0 + 1e-12);
        }
    }
    // relabeled gain W y' has the same mean as W p y when W ignores the coin
    let rounds = 100_000;
    let mut rng = RngStream::new(99, 0);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..rounds {
        let p = 2.0 * rng.uniform() - 1.0;
        let y = if rng.bernoulli(0.5) { 1.0 } else { -1.0 };
        let w = if rng.bernoulli((1.0 + 0.8 * p * y) / 2.0) {
            1.0
        } else {
            -1.0
        };
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
    let sd = ((s2 - n * mean * mean) / (n - 1.0)).sqrt();
    let four_sigma = 4.0 * sd / n.sqrt();
    ok &= mean.abs() <= four_sigma;
    // vote unbiasedness on a 41-point grid
    let draws = 100_000;
    let mut worst: f64 = 0.0;
    for k in 0..=40 {
        let z = -1.0 + k as f64 / 20.0;
        let mut rng = RngStream::new(7, k);
        let sum: i64 = (0..draws)
            .map(|_| vote_project(z, &mut rng).unwrap().value() as i64)
            .sum();
        let dev = (sum as f64 / draws as f64 - z).abs();
        let sigma = ((1.0 - z * z) / draws as f64).sqrt();
        ok &= dev <= 4.0 * sigma + 1e-15;
        if sigma > 0.0 {
            worst = worst.max(dev / sigma);
        }
    }
    outcome(
        ok,
        format!("grids exact; relabel mean diff {mean:.5} (4 sigma {four_sigma:.5}); vote worst {worst:.2} sigma"),
    )
}

/// `min_{p in [-1,1]^3} p^T A q` by enumerating the 8 corners.
fn corner_min(a: &[Vec<f64>], q: &[f64]) -> f64 {
    let aq: Vec<f64> = a
        .iter()
        .map(|r| r.iter().zip(q).map(|(x, y)| x * y).sum())
        .collect();
    let mut best = f64::INFINITY;
    for mask in 0..8 {
        let v: f64 = (0..3)
            .map(|i| if mask & (1 << i) != 0 { aq[i] } else { -aq[i] })
            .sum();
        best = best.min(v);
    }
    best
}

fn a3() -> Outcome {
    let start = Instant::now();
    let rounds = 10_000;
    let resolution = 150;
    let mut rng = RngStream::new(2023, 0);
    let (mut exact_pass, mut noisy_pass, mut consistent) = (0, 0, true);
    let mut min_margin = f64::INFINITY;
    for g in 0..50u64 {
        let game = random_game(3, 3, &mut rng).unwrap();
        let a = game.matrix().to_vec();
        // brute-force value over the simplex grid, and its Lipschitz error
        let mut value = f64::NEG_INFINITY;
        for i in 0..=resolution {
            for j in 0..=resolution - i {
                let q = [
                    i as f64 / resolution as f64,
                    j as f64 / resolution as f64,
                    (resolution - i - j) as f64 / resolution as f64,
                ];
                value = value.max(corner_min(&a, &q));
            }
        }
        let lip = (0..3)
            .map(|j| a.iter().map(|r| r[j].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let grid_err = lip * 3.0 / resolution as f64;
        let col_norm = (0..3)
            .map(|j| a.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let oco_term = 1.5 * col_norm * (2.0 * 3f64.sqrt()) / (rounds as f64).sqrt();

        let grid = game_value_grid(&game, resolution).unwrap();
        consistent &= (grid.value - value).abs() < 1e-12;

        let exact =
            solve_improper_game(&game, &mut OracleSpec::exact(), &OgdFactory, rounds).unwrap();
        let thr = value - oco_term - grid_err;
        let m = corner_min(&a, &exact.q_bar);
        exact_pass += usize::from(m >= thr);
        let cert = certify_solution(&game, &exact.q_bar, rounds, 0.0, &grid);
        consistent &= cert.passed == (m >= thr);

        let mut oracle = OracleSpec::noisy(0.05, RngStream::new(g, 1)).unwrap();
        let noisy = solve_improper_game(&game, &mut oracle, &OgdFactory, rounds).unwrap();
        let nm = corner_min(&a, &noisy.q_bar);
        noisy_pass += usize::from(nm >= thr - 0.05);
        let ncert = certify_solution(&game, &noisy.q_bar, rounds, 0.05, &grid);
        consistent &= (cert.threshold - ncert.threshold - 0.05).abs() < 1e-12;
        min_margin = min_margin.min(m - thr).min(nm - thr + 0.05);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        exact_pass == 50 && noisy_pass == 50 && consistent && secs <= 60.0,
        format!("exact {exact_pass}/50, noisy {noisy_pass}/50, smallest margin {min_margin:.4}, {secs:.1}s"),
    )
}

/// `E[cor_S]` of the ensemble recomputed from its members.
fn ensemble_expected_cor(run: &StatRun, sample: &LabeledSequence) -> f64 {
    let members = run.run.ensemble.members();
    let gamma = run.run.ensemble.gamma();
    sample
        .iter()
        .map(|e| {
            let sum: f64 = members.iter().map(|h| h.predict(e.x).as_f64()).sum();
            (sum / (gamma * members.len() as f64)).clamp(-1.0, 1.0) * e.y.as_f64()
        })
        .sum::<f64>()
        / sample.len() as f64
}

fn stat_check(
    exp: StatExperiment,
    floor_of: impl Fn(&StatOutcome) -> f64,
    shared: &mut Shared,
) -> Outcome {
    let start = Instant::now();
    let seeds = seed_range(500, 10);
    let out = run_stat_experiment(&exp, &seeds).expect("stat run");
    let mut consistent = true;
    let mut values = Vec::new();
    for r in &out.runs {
        let sample = threshold_sample(exp.sample_size, exp.noise, r.seed).unwrap();
        let c = ensemble_expected_cor(r, &sample);
        consistent &= (c - r.correlation).abs() < 1e-12;
        values.push(c);
    }
    let (mean, ci) = mean_ci(&values);
    let floor = floor_of(&out);
    consistent &= (floor - out.report.threshold).abs() < 1e-12;
    shared.clip_events += out.report.clip_events;
    shared.booster_runs += out.runs.len();
    shared.stat.push((exp, seeds, stat_csv(&out)));
    outcome(
        consistent && mean >= floor - ci,
        format!(
            "mean cor_S {mean:.4} (ci {ci:.4}) vs floor {floor:.4}, {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn a4(shared: &mut Shared) -> Outcome {
    let exp = StatExperiment {
        mode: Mode::Realizable,
        gamma: 1.0,
        rounds: 400,
        sample_size: 200,
        weak_sample_size: 30,
        noise: 0.0,
        grid: 32,
    };
    stat_check(exp, |_| 1.0 - 3.0 / 400f64.sqrt(), shared)
}

fn a5(shared: &mut Shared) -> Outcome {
    let exp = StatExperiment {
        mode: Mode::Agnostic,
        gamma: 0.4,
        rounds: 400,
        sample_size: 400,
        weak_sample_size: 50,
        noise: 0.15,
        grid: 32,
    };
    let eps0 = (2.0 * 64f64.ln() / 50.0).sqrt();
    stat_check(
        exp,
        move |out| {
            let best = out
                .runs
                .iter()
                .map(|r| best_threshold_gain(&threshold_sample(400, 0.15, r.seed).unwrap()) / 400.0)
                .sum::<f64>()
                / out.runs.len() as f64;
            best - eps0 / 0.4 - 6.0 / (0.4 * 400f64.sqrt())
        },
        shared,
    )
}

fn a6(shared: &mut Shared) -> Outcome {
    let start = Instant::now();
    let (gamma, eps) = (0.3f64, 0.5f64);
    let n = (1.0 / (gamma * gamma * eps * eps)).ceil() as usize;
    let exp = OnlineExperiment {
        mode: Mode::Realizable,
        gamma,
        horizon: n,
        n_learners: n,
        adversary: AdversaryKind::ThresholdRealizable,
        learner: LearnerKind::Prescient,
        grid: 32,
    };
    let seeds = seed_range(700, 10);
    let out = run_experiment(&exp, &seeds).expect("A6 run");
    let rates: Vec<f64> = out
        .runs
        .iter()
        .map(|r| r.trace.mistakes as f64 / n as f64)
        .collect();
    let (mean, ci) = mean_ci(&rates);
    shared.clip_events += out.report.clip_events;
    shared.booster_runs += out.runs.len();
    shared.online.push((exp, seeds, online_csv(&out)));
    outcome(
        n == 45 && mean <= eps + ci,
        format!(
            "N=T={n}: mean mistake rate {mean:.4} (ci {ci:.4}) vs {eps}, {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn a7(shared: &Shared) -> Outcome {
    let mut rng = RngStream::new(4242, 0);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for case in 0..100 {
        let dim = 1 + rng.index(5);
        let lo: Vec<f64> = (0..dim).map(|_| -1.0 - rng.uniform()).collect();
        let hi: Vec<f64> = (0..dim).map(|_| 0.2 + rng.uniform()).collect();
        let domain = BoxDomain::new(lo.clone(), hi.clone()).unwrap();
        let diam = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| (h - l).powi(2))
            .sum::<f64>()
            .sqrt();
        let steps = 1 + rng.index(1000);
        let g = 0.1 + 5.0 * rng.uniform();
        let mut ogd = OgdFactory.build(domain, steps, g, vec![0.0; dim]).unwrap();
        let mut sum = vec![0.0; dim];
        let mut loss = 0.0;
        for t in 0..steps {
            let p = ogd.next().unwrap().to_vec();
            let dir: Vec<f64> = match case % 3 {
                0 => (0..dim).map(|_| 2.0 * rng.uniform() - 1.0).collect(),
                // chase the iterate
                1 => p
                    .iter()
                    .map(|v| if *v > 0.0 { 1.0 } else { -1.0 })
                    .collect(),
                // first coordinate flips sign in blocks
                _ => (0..dim)
                    .map(|i| {
                        if i == 0 && (t / 25) % 2 == 0 {
                            -1.0
                        } else {
                            1.0
                        }
                    })
                    .collect(),
            };
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            let c: Vec<f64> = dir.iter().map(|v| v * g / norm * 0.999_999).collect();
            loss += c.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>();
            for (s, v) in sum.iter_mut().zip(&c) {
                *s += v;
            }
            ogd.update_coeff(&c).unwrap();
        }
        let best: f64 = sum
            .iter()
            .zip(lo.iter().zip(&hi))
            .map(|(s, (l, h))| (s * l).min(s * h))
            .sum();
        let regret = loss - best;
        let bound = 1.5 * g * diam * (steps as f64).sqrt();
        ok &= regret <= bound + 1e-9 && ogd.clip_events() == 0;
        worst = worst.max(regret / bound);
    }
    outcome(
        ok && shared.clip_events == 0,
        format!(
            "100 sequences, worst regret/bound {worst:.3}; {} clip events over {} booster runs",
            shared.clip_events, shared.booster_runs
        ),
    )
}

fn a8(shared: &Shared) -> Outcome {
    let mut same = 0;
    let mut total = 0;
    for (exp, seeds, bytes) in &shared.online {
        total += 1;
        let again = online_csv(&run_experiment(exp, seeds).unwrap());
        same += usize::from(&again == bytes);
    }
    for (exp, seeds, bytes) in &shared.stat {
        total += 1;
        let again = stat_csv(&run_stat_experiment(exp, seeds).unwrap());
        same += usize::from(&again == bytes);
    }
    let game = MatrixGame::matching_pennies();
    let plays = || {
        let mut o = OracleSpec::noisy(0.05, RngStream::new(7, 1)).unwrap();
        solve_improper_game(&game, &mut o, &OgdFactory, 2000)
            .unwrap()
            .q_plays
    };
    let game_same = plays() == plays();
    outcome(
        same == total && total > 0 && game_same,
        format!("{same}/{total} experiment traces byte-identical on rerun; game plays identical: {game_same}"),
    )
}

fn main() {
    let mut shared = Shared::default();
    let results = [
        ("A1 online agnostic regret bound", a1(&mut shared)),
        ("A2 inequality grids and Monte-Carlo checks", a2()),
        ("A3 game certificate on 50 random games", a3()),
        ("A4 realizable statistical floor", a4(&mut shared)),
        ("A5 agnostic statistical floor", a5(&mut shared)),
        ("A6 realizable online mistake rate", a6(&mut shared)),
        ("A7 OGD regret and zero clipping", a7(&shared)),
        ("A8 determinism", a8(&shared)),
    ];

    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "{} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
