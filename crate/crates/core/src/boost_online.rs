//! Online boosting by reduction to online convex optimization.
//!
//! Every round the booster predicts with a randomized majority vote of its
//! `N` weak learners, then runs a fresh `N`-step OCO instance whose `i`-th
//! play decides how learner `i` is trained on the current example:
//!
//! * agnostic: the play `p` lies in `[-1, 1]` and learner `i` receives the
//!   label `y` with probability `(1 + p) / 2`, `-y` otherwise;
//! * realizable: the play lies in `[0, 1]` and learner `i` receives `(x, y)`
//!   with probability `p`, or nothing.
//!
//! The `i`-th OCO loss is `p * (W_i(x) y / gamma - 1)`, using the prediction
//! cached during the vote, so every learner is queried once per round.

use crate::domain::{vote_project, ExpertPool, HypothesisId, Instance, Label, LabeledSequence};
use crate::error::{invalid, Error, Result};
use crate::oco::{ogd_regret_bound, BoxDomain, OcoFactory, OgdFactory, OnlineConvexOptimizer};
use crate::rng::{relabel_stream_id, vote_stream_id, RngStream};
use crate::weaklearn::OnlineWeakLearner;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Agnostic,
    Realizable,
}

impl Mode {
    pub fn domain(self) -> BoxDomain {
        match self {
            Mode::Agnostic => BoxDomain::cube(-1.0, 1.0, 1),
            Mode::Realizable => BoxDomain::cube(0.0, 1.0, 1),
        }
        .expect("static domain")
    }

    pub fn initial_play(self) -> f64 {
        match self {
            Mode::Agnostic => 0.0,
            Mode::Realizable => 0.5,
        }
    }

    pub fn diameter(self) -> f64 {
        match self {
            Mode::Agnostic => 2.0,
            Mode::Realizable => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnlineBoosterConfig {
    pub n_learners: usize,
    pub gamma: f64,
    pub horizon: usize,
    pub mode: Mode,
    pub master_seed: u64,
}

impl OnlineBoosterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_learners == 0 {
            return invalid("booster needs at least one weak learner");
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return invalid(format!("advantage must lie in (0, 1], got {}", self.gamma));
        }
        if self.horizon == 0 {
            return invalid("horizon must be at least 1");
        }
        Ok(())
    }

    /// `G = 2 / gamma`, a bound on every per-learner loss coefficient.
    pub fn grad_bound(&self) -> f64 {
        2.0 / self.gamma
    }

    /// `R_A(N) = (3/2) G D sqrt(N)` for the per-round OCO instance.
    pub fn oco_regret_bound(&self) -> f64 {
        ogd_regret_bound(self.grad_bound(), self.mode.diameter(), self.n_learners)
    }

    /// `R_W(T) / gamma + t * R_A(N) / N`.
    pub fn regret_bound_at(&self, weak_regret: f64, t: usize) -> f64 {
        weak_regret / self.gamma + t as f64 * self.oco_regret_bound() / self.n_learners as f64
    }
}

/// Everything that happened in one booster round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    /// Cached `W_i(x_t)`.
    pub predictions: Vec<Label>,
    /// OCO plays `p_t^i`.
    pub plays: Vec<f64>,
    pub prediction: Label,
    pub label: Label,
    /// `l_t^i(p_t^i)`.
    pub losses: Vec<f64>,
    /// What learner `i` was fed: the (re)label, or `None` if it was skipped.
    pub fed: Vec<Option<Label>>,
    /// Realized regret of this round's OCO instance.
    pub oco_regret: f64,
}

pub struct OnlineBooster<W, F: OcoFactory = OgdFactory> {
    config: OnlineBoosterConfig,
    learners: Vec<W>,
    oco: F,
    cached: Vec<Label>,
    pending: Option<(Instance, Label)>,
    round: usize,
    relabel_rng: RngStream,
    vote_rng: RngStream,
    clip_events: u64,
}

impl<W: OnlineWeakLearner> OnlineBooster<W, OgdFactory> {
    pub fn new(config: OnlineBoosterConfig, learners: Vec<W>) -> Result<Self> {
        Self::with_oco(config, learners, OgdFactory)
    }
}

impl<W: OnlineWeakLearner, F: OcoFactory> OnlineBooster<W, F> {
    pub fn with_oco(config: OnlineBoosterConfig, learners: Vec<W>, oco: F) -> Result<Self> {
        config.validate()?;
        if learners.len() != config.n_learners {
            return invalid(format!(
                "expected {} weak learners, got {}",
                config.n_learners,
                learners.len()
            ));
        }
        if config.mode == Mode::Agnostic && learners.iter().any(|w| !w.tracks_fed_labels()) {
            return Err(Error::Configuration(
                "agnostic boosting relabels examples; weak learners whose guarantee refers to \
                 base labels (e.g. the prescient oracle) are only valid in realizable mode"
                    .into(),
            ));
        }
        let n = config.n_learners;
        Ok(Self {
            relabel_rng: RngStream::new(config.master_seed, relabel_stream_id(n)),
            vote_rng: RngStream::new(config.master_seed, vote_stream_id(n)),
            cached: Vec::with_capacity(n),
            config,
            learners,
            oco,
            pending: None,
            round: 0,
            clip_events: 0,
        })
    }

    pub fn config(&self) -> &OnlineBoosterConfig {
        &self.config
    }

    pub fn learners(&self) -> &[W] {
        &self.learners
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Gradient-clip events across all per-round OCO instances.
    pub fn clip_events(&self) -> u64 {
        self.clip_events
    }

    /// Queries every learner once, caches the answers and returns
    /// `vote_project(sum_i W_i(x) / (gamma N))`.
    pub fn predict(&mut self, x: Instance) -> Result<Label> {
        if self.pending.is_some() {
            return Err(Error::Protocol(format!(
                "predict called twice in round {}",
                self.round + 1
            )));
        }
        self.cached.clear();
        let mut sum = 0i64;
        for w in &mut self.learners {
            let label = w.predict(x)?;
            sum += label.value() as i64;
            self.cached.push(label);
        }
        let z = sum as f64 / (self.config.gamma * self.config.n_learners as f64);
        let prediction = vote_project(z, &mut self.vote_rng)?;
        self.pending = Some((x, prediction));
        Ok(prediction)
    }

    /// Finishes the round with the revealed label.
    pub fn update(&mut self, x: Instance, y: Label) -> Result<RoundRecord> {
        let Some((px, prediction)) = self.pending else {
            return Err(Error::Protocol(format!(
                "update called before predict in round {}",
                self.round + 1
            )));
        };
        if px != x {
            return Err(Error::Protocol(
                "update instance differs from the predicted instance".into(),
            ));
        }
        let n = self.config.n_learners;
        let gamma = self.config.gamma;
        let mode = self.config.mode;
        let mut oco = self.oco.build(
            mode.domain(),
            n,
            self.config.grad_bound(),
            vec![mode.initial_play()],
        )?;

        let mut plays = Vec::with_capacity(n);
        let mut losses = Vec::with_capacity(n);
        let mut fed = Vec::with_capacity(n);
        for (w, &wx) in self.learners.iter_mut().zip(&self.cached) {
            let p = oco.next()?[0];
            let c = (wx * y).as_f64() / gamma - 1.0;
            plays.push(p);
            losses.push(p * c);
            oco.update_coeff(&[c])?;

            match mode {
                Mode::Agnostic => {
                    let yi = if self.relabel_rng.bernoulli((1.0 + p) / 2.0) {
                        y
                    } else {
                        y.flip()
                    };
                    w.update(x, yi)?;
                    fed.push(Some(yi));
                }
                Mode::Realizable => {
                    if self.relabel_rng.bernoulli(p) {
                        w.update(x, y)?;
                        fed.push(Some(y));
                    } else {
                        fed.push(None);
                    }
                }
            }
        }
        self.clip_events += oco.clip_events();
        self.pending = None;
        self.round += 1;
        Ok(RoundRecord {
            t: self.round,
            predictions: std::mem::take(&mut self.cached),
            plays,
            prediction,
            label: y,
            losses,
            fed,
            oco_regret: oco.regret(),
        })
    }
}

/// Per-round regret accounting of a booster run.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    /// `sum_{s <= t} yhat_s y_s`.
    pub cum_gain: Vec<f64>,
    /// Best single-expert gain over the first `t` rounds.
    pub best_gain: Vec<f64>,
    /// `R_W(T) / gamma + t R_A(N) / N`.
    pub bound: Vec<f64>,
    pub mistakes: usize,
    pub best_expert: HypothesisId,
    pub clip_events: u64,
    /// Largest per-round OCO regret relative to its certified bound.
    pub max_oco_regret_ratio: f64,
}

impl RegretTrace {
    pub fn horizon(&self) -> usize {
        self.cum_gain.len()
    }

    pub fn cum_regret(&self, t: usize) -> f64 {
        self.best_gain[t] - self.cum_gain[t]
    }

    pub fn regret(&self) -> f64 {
        self.cum_regret(self.horizon() - 1)
    }

    pub fn final_bound(&self) -> f64 {
        *self.bound.last().expect("non-empty trace")
    }

    pub fn mistake_rate(&self) -> f64 {
        self.mistakes as f64 / self.horizon() as f64
    }
}

/// Runs the booster over `seq` and measures regret against `pool`.
pub fn run_online<W: OnlineWeakLearner, F: OcoFactory>(
    config: &OnlineBoosterConfig,
    seq: &LabeledSequence,
    pool: &ExpertPool,
    learners: Vec<W>,
    oco: F,
) -> Result<RegretTrace> {
    if seq.len() != config.horizon {
        return invalid(format!(
            "sequence has {} rounds, configured horizon is {}",
            seq.len(),
            config.horizon
        ));
    }
    let weak_regret = learners
        .first()
        .map(|w| w.declared_regret(config.horizon))
        .unwrap_or(0.0);
    let mut booster = OnlineBooster::with_oco(*config, learners, oco)?;
    let oco_bound = config.oco_regret_bound();

    let t_max = config.horizon;
    let mut expert_gain = vec![0i64; pool.len()];
    let mut trace = RegretTrace {
        cum_gain: Vec::with_capacity(t_max),
        best_gain: Vec::with_capacity(t_max),
        bound: Vec::with_capacity(t_max),
        mistakes: 0,
        best_expert: pool.get(0).id,
        clip_events: 0,
        max_oco_regret_ratio: 0.0,
    };
    let mut gain = 0i64;
    for (t, e) in seq.iter().enumerate() {
        let yhat = booster.predict(e.x)?;
        let record = booster.update(e.x, e.y)?;
        gain += (yhat * e.y).value() as i64;
        if yhat != e.y {
            trace.mistakes += 1;
        }
        for (g, h) in expert_gain.iter_mut().zip(pool.members()) {
            *g += (h.predict(e.x) * e.y).value() as i64;
        }
        trace.cum_gain.push(gain as f64);
        trace
            .best_gain
            .push(*expert_gain.iter().max().expect("pool is non-empty") as f64);
        trace.bound.push(config.regret_bound_at(weak_regret, t + 1));
        trace.max_oco_regret_ratio = trace
            .max_oco_regret_ratio
            .max(record.oco_regret / oco_bound);
    }
    let best = *expert_gain.iter().max().expect("pool is non-empty");
    trace.best_expert = pool
        .members()
        .iter()
        .zip(&expert_gain)
        .filter(|(_, &g)| g == best)
        .map(|(h, _)| h.id)
        .min()
        .expect("pool is non-empty");
    trace.clip_events = booster.clip_events();
    Ok(trace)
}
