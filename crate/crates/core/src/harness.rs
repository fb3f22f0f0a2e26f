//! Seeded adversaries, datasets and the Monte-Carlo experiment runner.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::boost_online::{run_online, Mode, OnlineBoosterConfig, RegretTrace};
use crate::boost_stat::{
    agnostic_floor, realizable_floor, stat_boost, StatBoostRun, StatBoosterConfig,
};
use crate::domain::{threshold_grid, ExpertPool, Instance, Label, LabeledExample, LabeledSequence};
use crate::error::{invalid, Error, Result};
use crate::oco::OgdFactory;
use crate::rng::{data_stream_id, learner_stream_id, vote_stream_id, RngStream};
use crate::weaklearn::{stump_erm, HedgeLearner, OnlineWeakLearner, PrescientOracle, StumpLearner};

/// Fewest seeds for which a report's confidence interval is computed.
pub const MIN_SEEDS: usize = 10;

const THRESHOLD: f64 = 0.5;
const DRIFT_LOW: f64 = 0.25;
const DRIFT_HIGH: f64 = 0.75;

/// Label rule of a generated sequence. Instances are always uniform on `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdversaryKind {
    Constant(Label),
    /// `+1, -1, +1, ...`
    Alternating,
    /// `y = +1` iff `x >= 0.5`.
    ThresholdRealizable,
    /// Threshold labels, each flipped independently with the given rate.
    NoisyThreshold(f64),
    /// Threshold alternating between 0.25 and 0.75 every `period` rounds.
    DriftingThreshold(usize),
    /// Fair-coin labels independent of `x`.
    UniformRandom,
}

impl AdversaryKind {
    fn validate(&self) -> Result<()> {
        match *self {
            AdversaryKind::NoisyThreshold(rate) if !(0.0..=0.5).contains(&rate) => {
                invalid(format!("noise rate must lie in [0, 0.5], got {rate}"))
            }
            AdversaryKind::DriftingThreshold(0) => invalid("drift period must be positive"),
            _ => Ok(()),
        }
    }

    /// Whether some threshold expert labels every generated sequence perfectly.
    pub fn is_realizable(&self) -> bool {
        matches!(
            self,
            AdversaryKind::Constant(_)
                | AdversaryKind::ThresholdRealizable
                | AdversaryKind::NoisyThreshold(0.0)
        )
    }
}

impl FromStr for AdversaryKind {
    type Err = Error;

    /// `name[:param]`, e.g. `noisy-threshold:0.2`, `constant:-1`,
    /// `drifting-threshold:100`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let parse_err = |what: &str| Error::Parse(format!("adversary `{s}`: {what}"));
        let kind = match (name, param) {
            ("constant", None) => AdversaryKind::Constant(Label::Plus),
            ("constant", Some(p)) => match p {
                "+1" | "1" => AdversaryKind::Constant(Label::Plus),
                "-1" => AdversaryKind::Constant(Label::Minus),
                _ => return Err(parse_err("constant label must be +1 or -1")),
            },
            ("alternating", None) => AdversaryKind::Alternating,
            ("threshold-realizable", None) => AdversaryKind::ThresholdRealizable,
            ("noisy-threshold", Some(p)) => AdversaryKind::NoisyThreshold(
                p.parse()
                    .map_err(|_| parse_err("noise rate must be a number"))?,
            ),
            ("drifting-threshold", Some(p)) => AdversaryKind::DriftingThreshold(
                p.parse()
                    .map_err(|_| parse_err("period must be a positive integer"))?,
            ),
            ("uniform-random", None) => AdversaryKind::UniformRandom,
            ("noisy-threshold" | "drifting-threshold", None) => {
                return Err(parse_err("missing parameter"))
            }
            ("alternating" | "threshold-realizable" | "uniform-random", Some(_)) => {
                return Err(parse_err("takes no parameter"))
            }
            _ => return Err(parse_err("unknown adversary")),
        };
        kind.validate().map_err(|e| parse_err(&e.to_string()))?;
        Ok(kind)
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryKind::Constant(l) => write!(f, "constant:{l}"),
            AdversaryKind::Alternating => write!(f, "alternating"),
            AdversaryKind::ThresholdRealizable => write!(f, "threshold-realizable"),
            AdversaryKind::NoisyThreshold(r) => write!(f, "noisy-threshold:{r}"),
            AdversaryKind::DriftingThreshold(p) => write!(f, "drifting-threshold:{p}"),
            AdversaryKind::UniformRandom => write!(f, "uniform-random"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversarySpec {
    pub kind: AdversaryKind,
    pub horizon: usize,
    pub seed: u64,
    pub stream: u64,
}

impl AdversarySpec {
    pub fn new(kind: AdversaryKind, horizon: usize, seed: u64) -> Self {
        Self {
            kind,
            horizon,
            seed,
            stream: 0,
        }
    }

    pub fn on_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }
}

/// Materializes the whole sequence up front; deterministic in the spec.
pub fn generate_sequence(spec: &AdversarySpec) -> Result<LabeledSequence> {
    if spec.horizon == 0 {
        return invalid("sequence length must be at least 1");
    }
    spec.kind.validate()?;
    let mut rng = RngStream::new(spec.seed, spec.stream);
    let mut out = Vec::with_capacity(spec.horizon);
    for t in 0..spec.horizon {
        let x = rng.uniform();
        let above = |theta: f64| Label::from_bool(x >= theta);
        let y = match spec.kind {
            AdversaryKind::Constant(l) => l,
            AdversaryKind::Alternating => Label::from_bool(t % 2 == 0),
            AdversaryKind::ThresholdRealizable => above(THRESHOLD),
            AdversaryKind::NoisyThreshold(rate) => {
                let y = above(THRESHOLD);
                if rng.bernoulli(rate) {
                    y.flip()
                } else {
                    y
                }
            }
            AdversaryKind::DriftingThreshold(period) => {
                let theta = if (t / period) % 2 == 0 {
                    DRIFT_LOW
                } else {
                    DRIFT_HIGH
                };
                above(theta)
            }
            AdversaryKind::UniformRandom => Label::from_bool(rng.bernoulli(0.5)),
        };
        out.push(LabeledExample::new(Instance::new(x)?, y));
    }
    Ok(LabeledSequence::new(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Pass iff `mean <= threshold + ci`.
    AtMost,
    /// Pass iff `mean >= threshold - ci`.
    AtLeast,
}

/// Aggregate of one scalar per seed against a theoretical threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    /// `(seed, value)`, sorted by seed.
    pub values: Vec<(u64, f64)>,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub std: f64,
    /// `3 std / sqrt(n)`.
    pub ci_half_width: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub passed: bool,
    pub wall_time: Duration,
    pub clip_events: u64,
}

impl ExperimentReport {
    pub fn new(
        mut values: Vec<(u64, f64)>,
        threshold: f64,
        direction: Direction,
        wall_time: Duration,
        clip_events: u64,
    ) -> Result<Self> {
        if values.len() < MIN_SEEDS {
            return invalid(format!(
                "need at least {MIN_SEEDS} seeds for a confidence interval, got {}",
                values.len()
            ));
        }
        values.sort_by_key(|(s, _)| *s);
        let n = values.len() as f64;
        let mean = values.iter().map(|(_, v)| v).sum::<f64>() / n;
        let var = values.iter().map(|(_, v)| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let std = var.sqrt();
        let ci_half_width = 3.0 * std / n.sqrt();
        let passed = match direction {
            Direction::AtMost => mean <= threshold + ci_half_width,
            Direction::AtLeast => mean >= threshold - ci_half_width,
        };
        Ok(Self {
            values,
            mean,
            std,
            ci_half_width,
            threshold,
            direction,
            passed,
            wall_time,
            clip_events,
        })
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let op = match self.direction {
            Direction::AtMost => "<=",
            Direction::AtLeast => ">=",
        };
        format!(
            "{}: mean {:.4} (std {:.4}, ci {:.4}, {} seeds) {op} {:.4} [{:.2}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.mean,
            self.std,
            self.ci_half_width,
            self.values.len(),
            self.threshold,
            self.wall_time.as_secs_f64()
        )
    }
}

fn check_seeds(seeds: &[u64]) -> Result<Vec<u64>> {
    if seeds.len() < MIN_SEEDS {
        return invalid(format!(
            "need at least {MIN_SEEDS} seeds for a confidence interval, got {}",
            seeds.len()
        ));
    }
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return invalid("seeds must be distinct");
    }
    Ok(sorted)
}

/// `base, base + 1, ..., base + count - 1`.
pub fn seed_range(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base + i).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerKind {
    /// Hedge over the threshold pool, diluted to the booster's advantage.
    Hedge,
    /// Peeks at the base sequence; only valid in realizable mode.
    Prescient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnlineExperiment {
    pub mode: Mode,
    pub gamma: f64,
    pub horizon: usize,
    pub n_learners: usize,
    pub adversary: AdversaryKind,
    pub learner: LearnerKind,
    /// The pool holds the `2 * grid` signed thresholds at `j / grid`.
    pub grid: usize,
}

impl OnlineExperiment {
    pub fn booster_config(&self, seed: u64) -> OnlineBoosterConfig {
        OnlineBoosterConfig {
            n_learners: self.n_learners,
            gamma: self.gamma,
            horizon: self.horizon,
            mode: self.mode,
            master_seed: seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OnlineRun {
    pub seed: u64,
    pub trace: RegretTrace,
}

/// Per-seed traces plus the regret report.
#[derive(Debug, Clone)]
pub struct OnlineOutcome {
    pub runs: Vec<OnlineRun>,
    pub report: ExperimentReport,
}

impl OnlineOutcome {
    /// Re-aggregates the per-seed mistake rates against `threshold`.
    pub fn mistake_report(&self, threshold: f64) -> Result<ExperimentReport> {
        ExperimentReport::new(
            self.runs
                .iter()
                .map(|r| (r.seed, r.trace.mistake_rate()))
                .collect(),
            threshold,
            Direction::AtMost,
            self.report.wall_time,
            self.report.clip_events,
        )
    }
}

/// One booster run on the seed's own sequence.
pub fn run_online_seed(
    exp: &OnlineExperiment,
    pool: &Arc<ExpertPool>,
    seed: u64,
) -> Result<OnlineRun> {
    let config = exp.booster_config(seed);
    config.validate()?;
    let n = exp.n_learners;
    let spec = AdversarySpec::new(exp.adversary, exp.horizon, seed).on_stream(data_stream_id(n));
    let seq = generate_sequence(&spec)?;
    let trace = match exp.learner {
        LearnerKind::Hedge => {
            let learners = (0..n)
                .map(|i| {
                    HedgeLearner::new(
                        Arc::clone(pool),
                        exp.gamma,
                        exp.horizon,
                        RngStream::new(seed, learner_stream_id(i)),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            run_online(&config, &seq, pool, learners, OgdFactory)?
        }
        LearnerKind::Prescient => {
            let seq = Arc::new(seq);
            let learners = (0..n)
                .map(|i| {
                    PrescientOracle::new(
                        Arc::clone(&seq),
                        exp.gamma,
                        RngStream::new(seed, learner_stream_id(i)),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            check_wiring(exp.mode, &learners)?;
            run_online(&config, &seq, pool, learners, OgdFactory)?
        }
    };
    Ok(OnlineRun { seed, trace })
}

fn check_wiring<W: OnlineWeakLearner>(mode: Mode, learners: &[W]) -> Result<()> {
    if mode == Mode::Agnostic && learners.iter().any(|w| !w.tracks_fed_labels()) {
        return Err(Error::Configuration(
            "this learner's guarantee does not cover relabeled feedback; use realizable mode"
                .into(),
        ));
    }
    Ok(())
}

/// Runs every seed in order and reports final regret against the bound
/// `R_W(T) / gamma + T R_A(N) / N`.
pub fn run_experiment(exp: &OnlineExperiment, seeds: &[u64]) -> Result<OnlineOutcome> {
    let seeds = check_seeds(seeds)?;
    let pool = Arc::new(ExpertPool::thresholds(exp.grid)?);
    let start = Instant::now();
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let run = run_online_seed(exp, &pool, seed).map_err(|e| Error::Run {
            seed,
            source: Box::new(e),
        })?;
        runs.push(run);
    }
    let bound = runs[0].trace.final_bound();
    let clip_events = runs.iter().map(|r| r.trace.clip_events).sum();
    let report = ExperimentReport::new(
        runs.iter().map(|r| (r.seed, r.trace.regret())).collect(),
        bound,
        Direction::AtMost,
        start.elapsed(),
        clip_events,
    )?;
    Ok(OnlineOutcome { runs, report })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatExperiment {
    pub mode: Mode,
    pub gamma: f64,
    pub rounds: usize,
    /// Size `m` of the training sample.
    pub sample_size: usize,
    /// Weak-learner sample size `m0`.
    pub weak_sample_size: usize,
    /// Label noise of the threshold sample.
    pub noise: f64,
    /// Stumps are restricted to thresholds `j / grid`.
    pub grid: usize,
}

#[derive(Debug, Clone)]
pub struct StatRun {
    pub seed: u64,
    pub run: StatBoostRun,
    /// `E[cor_S]` of the final ensemble over the vote.
    pub correlation: f64,
    /// Realized `cor_S` of each prefix ensemble.
    pub prefix_correlations: Vec<f64>,
    /// Correlation of the best stump on the grid.
    pub best_stump: f64,
    pub epsilon0: f64,
}

#[derive(Debug, Clone)]
pub struct StatOutcome {
    pub runs: Vec<StatRun>,
    pub report: ExperimentReport,
}

/// The seed's threshold sample with label noise.
pub fn threshold_sample(size: usize, noise: f64, seed: u64) -> Result<LabeledSequence> {
    let kind = if noise == 0.0 {
        AdversaryKind::ThresholdRealizable
    } else {
        AdversaryKind::NoisyThreshold(noise)
    };
    generate_sequence(&AdversarySpec::new(kind, size, seed).on_stream(data_stream_id(1)))
}

pub fn run_stat_seed(exp: &StatExperiment, seed: u64) -> Result<StatRun> {
    let sample = threshold_sample(exp.sample_size, exp.noise, seed)?;
    let grid = threshold_grid(exp.grid);
    let mut learner = StumpLearner::new(
        grid.clone(),
        exp.gamma,
        exp.weak_sample_size,
        RngStream::new(seed, learner_stream_id(0)),
    )?;
    let config = StatBoosterConfig {
        rounds: exp.rounds,
        gamma: exp.gamma,
        sample_size: exp.weak_sample_size,
        mode: exp.mode,
        master_seed: seed,
    };
    let run = stat_boost(&config, sample.examples(), &mut learner, &OgdFactory)?;
    let mut vote_rng = RngStream::new(seed, vote_stream_id(1));
    let prefix_correlations = run
        .ensemble
        .prefix_correlations(sample.examples(), &mut vote_rng)?;
    let correlation = run.ensemble.expected_correlation(sample.examples())?;
    let (_, best_stump) = stump_erm(sample.examples(), &grid)?;
    Ok(StatRun {
        seed,
        correlation,
        prefix_correlations,
        best_stump,
        epsilon0: crate::weaklearn::hoeffding_epsilon0(exp.grid, exp.weak_sample_size),
        run,
    })
}

/// Runs every seed and reports the final expected correlation against the
/// mode's floor: `1 - 3/(gamma sqrt T)` (realizable) or
/// `mean best - eps0/gamma - 6/(gamma sqrt T)` (agnostic).
pub fn run_stat_experiment(exp: &StatExperiment, seeds: &[u64]) -> Result<StatOutcome> {
    let seeds = check_seeds(seeds)?;
    let start = Instant::now();
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        runs.push(run_stat_seed(exp, seed).map_err(|e| Error::Run {
            seed,
            source: Box::new(e),
        })?);
    }
    let threshold = match exp.mode {
        Mode::Realizable => realizable_floor(exp.gamma, exp.rounds),
        Mode::Agnostic => {
            let best = runs.iter().map(|r| r.best_stump).sum::<f64>() / runs.len() as f64;
            agnostic_floor(best, runs[0].epsilon0, exp.gamma, exp.rounds)
        }
    };
    let clip_events = runs.iter().map(|r| r.run.clip_events).sum();
    let report = ExperimentReport::new(
        runs.iter().map(|r| (r.seed, r.correlation)).collect(),
        threshold,
        Direction::AtLeast,
        start.elapsed(),
        clip_events,
    )?;
    Ok(StatOutcome { runs, report })
}
