//! Statistical boosting over a fixed sample.
//!
//! An OCO player over per-example weights `p in K^m` picks, each round, the
//! distribution the weak learner is trained on: examples drawn in proportion
//! to `p` (realizable, `K = [0, 1]`) or uniformly and relabeled to agree
//! with `y_i` with probability `(1 + p_i) / 2` (agnostic, `K = [-1, 1]`).
//! The returned hypotheses are combined by a randomized majority vote.

use crate::boost_online::Mode;
use crate::domain::{vote_expectation, vote_project, Hypothesis, Label, LabeledExample};
use crate::error::{invalid, Error, Result};
use crate::oco::{ogd_regret_bound, BoxDomain, OcoFactory, OnlineConvexOptimizer};
use crate::rng::{relabel_stream_id, RngStream};
use crate::weaklearn::StatWeakLearner;

const ZERO_MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatBoosterConfig {
    pub rounds: usize,
    pub gamma: f64,
    /// Weak-learner sample size `m0`.
    pub sample_size: usize,
    pub mode: Mode,
    pub master_seed: u64,
}

impl StatBoosterConfig {
    fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return invalid("boosting needs at least one round");
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return invalid(format!("advantage must lie in (0, 1], got {}", self.gamma));
        }
        if self.sample_size == 0 {
            return invalid("weak-learner sample size must be positive");
        }
        Ok(())
    }
}

/// Outcome of realizable resampling.
#[derive(Debug, Clone, PartialEq)]
pub enum Resample {
    Sample(Vec<LabeledExample>),
    /// All weights vanished; the caller reuses the previous hypothesis.
    Fallback,
}

/// `m0` i.i.d. draws with `Pr[i] = p_i / sum(p)`, or [`Resample::Fallback`]
/// when `sum(p)` is zero up to `1e-12`.
pub fn realizable_resample(
    p: &[f64],
    sample: &[LabeledExample],
    m0: usize,
    rng: &mut RngStream,
) -> Result<Resample> {
    check_weights(p, sample, 0.0)?;
    let mut cumulative = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &w in p {
        acc += w;
        cumulative.push(acc);
    }
    if acc <= ZERO_MASS_TOLERANCE {
        return Ok(Resample::Fallback);
    }
    let draws = (0..m0)
        .map(|_| {
            let target = rng.uniform() * acc;
            let i = cumulative.partition_point(|&c| c <= target);
            sample[i.min(sample.len() - 1)]
        })
        .collect();
    Ok(Resample::Sample(draws))
}

/// `m0` uniform draws, each relabeled to `y_i` with probability
/// `(1 + p_i) / 2` and to `-y_i` otherwise. Two draws per example.
pub fn agnostic_resample(
    p: &[f64],
    sample: &[LabeledExample],
    m0: usize,
    rng: &mut RngStream,
) -> Result<Vec<LabeledExample>> {
    check_weights(p, sample, -1.0)?;
    Ok((0..m0)
        .map(|_| {
            let i = rng.index(sample.len());
            let e = sample[i];
            let keep = rng.bernoulli((1.0 + p[i]) / 2.0);
            LabeledExample::new(e.x, if keep { e.y } else { e.y.flip() })
        })
        .collect())
}

fn check_weights(p: &[f64], sample: &[LabeledExample], lower: f64) -> Result<()> {
    if sample.is_empty() {
        return invalid("cannot resample an empty sample");
    }
    if p.len() != sample.len() {
        return invalid(format!("{} weights for {} examples", p.len(), sample.len()));
    }
    if p.iter().any(|&w| !(lower..=1.0).contains(&w)) {
        return invalid(format!("weights must lie in [{lower}, 1]"));
    }
    Ok(())
}

/// `x -> vote_project(sum_t h_t(x) / (gamma T))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<Hypothesis>,
    gamma: f64,
}

impl Ensemble {
    pub fn new(members: Vec<Hypothesis>, gamma: f64) -> Result<Self> {
        if members.is_empty() {
            return invalid("an ensemble needs at least one member");
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return invalid(format!("advantage must lie in (0, 1], got {gamma}"));
        }
        Ok(Self { members, gamma })
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn score(&self, x: crate::domain::Instance) -> f64 {
        let sum: i64 = self
            .members
            .iter()
            .map(|h| h.predict(x).value() as i64)
            .sum();
        sum as f64 / (self.gamma * self.members.len() as f64)
    }

    pub fn predict(&self, x: crate::domain::Instance, rng: &mut RngStream) -> Result<Label> {
        vote_project(self.score(x), rng)
    }

    /// `E[cor_S]` over the vote's randomness.
    pub fn expected_correlation(&self, sample: &[LabeledExample]) -> Result<f64> {
        if sample.is_empty() {
            return invalid("correlation of an empty sample");
        }
        let mut total = 0.0;
        for e in sample {
            total += vote_expectation(self.score(e.x))? * e.y.as_f64();
        }
        Ok(total / sample.len() as f64)
    }

    /// One realization of `cor_S` with the vote drawn from `rng`.
    pub fn correlation(&self, sample: &[LabeledExample], rng: &mut RngStream) -> Result<f64> {
        if sample.is_empty() {
            return invalid("correlation of an empty sample");
        }
        let mut total = 0i64;
        for e in sample {
            total += (self.predict(e.x, rng)? * e.y).value() as i64;
        }
        Ok(total as f64 / sample.len() as f64)
    }

    /// Realized `cor_S` of every prefix ensemble `h_1..h_t`, `t = 1..T`.
    pub fn prefix_correlations(
        &self,
        sample: &[LabeledExample],
        rng: &mut RngStream,
    ) -> Result<Vec<f64>> {
        if sample.is_empty() {
            return invalid("correlation of an empty sample");
        }
        let mut sums = vec![0i64; sample.len()];
        let mut out = Vec::with_capacity(self.members.len());
        for (t, h) in self.members.iter().enumerate() {
            let scale = 1.0 / (self.gamma * (t + 1) as f64);
            let mut total = 0i64;
            for (s, e) in sums.iter_mut().zip(sample) {
                *s += h.predict(e.x).value() as i64;
                total += (vote_project(*s as f64 * scale, rng)? * e.y).value() as i64;
            }
            out.push(total as f64 / sample.len() as f64);
        }
        Ok(out)
    }
}

/// Diagnostics of a boosting run alongside the ensemble.
#[derive(Debug, Clone)]
pub struct StatBoostRun {
    pub ensemble: Ensemble,
    /// Rounds that reused the previous hypothesis because `p` vanished.
    pub fallbacks: usize,
    pub clip_events: u64,
    /// Whether every OCO play lay inside the mode's box.
    pub plays_feasible: bool,
    pub oco_regret: f64,
    pub oco_regret_bound: f64,
}

/// Boosts `learner` over `sample` for `config.rounds` rounds.
pub fn stat_boost<L: StatWeakLearner, F: OcoFactory>(
    config: &StatBoosterConfig,
    sample: &[LabeledExample],
    learner: &mut L,
    oco: &F,
) -> Result<StatBoostRun> {
    config.validate()?;
    if sample.is_empty() {
        return invalid("boosting needs a non-empty sample");
    }
    if learner.sample_size() != config.sample_size {
        return invalid(format!(
            "weak learner expects {} examples, configured m0 is {}",
            learner.sample_size(),
            config.sample_size
        ));
    }
    let m = sample.len();
    let (domain, initial) = match config.mode {
        Mode::Agnostic => (BoxDomain::cube(-1.0, 1.0, m)?, vec![0.0; m]),
        Mode::Realizable => (BoxDomain::cube(0.0, 1.0, m)?, vec![1.0; m]),
    };
    let grad_bound = 2.0 * (m as f64).sqrt() / config.gamma;
    let diameter = domain.diameter();
    let mut player = oco.build(domain.clone(), config.rounds, grad_bound, initial)?;
    let mut rng = RngStream::new(config.master_seed, relabel_stream_id(1));

    let mut members = Vec::with_capacity(config.rounds);
    let mut previous = Hypothesis::constant(u32::MAX, Label::Plus);
    let mut fallbacks = 0;
    let mut feasible = true;
    let mut coeff = vec![0.0; m];
    for t in 1..=config.rounds {
        let p = player.next()?.to_vec();
        feasible &= domain.contains(&p);
        let h = match config.mode {
            Mode::Realizable => {
                match realizable_resample(&p, sample, config.sample_size, &mut rng)? {
                    Resample::Sample(s) => train(learner, &s, t)?,
                    Resample::Fallback => {
                        fallbacks += 1;
                        previous
                    }
                }
            }
            Mode::Agnostic => {
                let s = agnostic_resample(&p, sample, config.sample_size, &mut rng)?;
                train(learner, &s, t)?
            }
        };
        for (c, e) in coeff.iter_mut().zip(sample) {
            *c = (h.predict(e.x) * e.y).as_f64() / config.gamma - 1.0;
        }
        player.update_coeff(&coeff)?;
        members.push(h);
        previous = h;
    }

    Ok(StatBoostRun {
        ensemble: Ensemble::new(members, config.gamma)?,
        fallbacks,
        clip_events: player.clip_events(),
        plays_feasible: feasible,
        oco_regret: player.regret(),
        oco_regret_bound: ogd_regret_bound(grad_bound, diameter, config.rounds),
    })
}

fn train<L: StatWeakLearner>(
    learner: &mut L,
    s: &[LabeledExample],
    round: usize,
) -> Result<Hypothesis> {
    learner.train(s).map_err(|e| Error::WeakLearner {
        round,
        source: Box::new(e),
    })
}

/// `1 - 3 / (gamma sqrt(T))`: expected-correlation floor of the realizable booster.
pub fn realizable_floor(gamma: f64, rounds: usize) -> f64 {
    1.0 - 3.0 / (gamma * (rounds as f64).sqrt())
}

/// `best - eps0 / gamma - 6 / (gamma sqrt(T))`: expected-correlation floor of
/// the agnostic booster against the best reference hypothesis.
pub fn agnostic_floor(best: f64, epsilon0: f64, gamma: f64, rounds: usize) -> f64 {
    best - epsilon0 / gamma - 6.0 / (gamma * (rounds as f64).sqrt())
}
